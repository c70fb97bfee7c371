//! Generators for the OEIS sequences built from n-free runs and Fibonacci
//! residues, plus b-file export.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::construct::{build_division_rich, predecessor_chain};
use crate::error::{Error, Result};
use crate::fibmod;
use crate::sequence::{generate, Modulus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceDescriptor {
    pub id: &'static str,
    /// Index of the first term, following the OEIS entry.
    pub offset: i64,
    pub name: &'static str,
}

const fn d(id: &'static str, offset: i64, name: &'static str) -> SequenceDescriptor {
    SequenceDescriptor { id, offset, name }
}

pub const SUPPORTED: &[SequenceDescriptor] = &[
    d("A000032", 0, "Lucas numbers"),
    d("A000045", 0, "Fibonacci numbers"),
    d("A000057", 1, "Primes dividing all Fibonacci-like sequences"),
    d("A000285", 0, "Fibonacci-like sequence starting 1, 4"),
    d("A001175", 1, "Pisano periods"),
    d("A001177", 1, "Fibonacci entry points"),
    d("A001602", 1, "Fibonacci entry points of the primes"),
    d("A015134", 1, "Number of Fibonacci-like cycles modulo n"),
    d("A015135", 1, "Number of distinct Fibonacci-like cycle lengths modulo n"),
    d("A060305", 1, "Pisano periods of the primes"),
    d("A064362", 1, "Numbers dividing no Lucas number"),
    d("A064414", 1, "Fibonacci omni-factors"),
    d("A065156", 1, "Numbers dividing some Lucas number"),
    d("A078414", 0, "7-free Fibonacci numbers"),
    d("A214684", 0, "5-free Fibonacci numbers"),
    d("A224382", 0, "4-free Fibonacci numbers"),
    d("A230359", 1, "Primes that are not Fibonacci omni-factors"),
    d("A230457", 1, "Numbers that are not Fibonacci omni-factors"),
    d(
        "A232357",
        1,
        "Residue pairs mod n whose Fibonacci-like sequence avoids 0",
    ),
    d(
        "A232656",
        1,
        "Residue pairs mod n whose Fibonacci-like sequence meets 0",
    ),
    d("A232658", 1, "Non-omni-factors that divide some Lucas number"),
    d("A232666", 0, "6-free Fibonacci numbers"),
    d("A233246", 1, "Sum of squares of Fibonacci-like cycle lengths mod n"),
    d("A233248", 1, "Rounded half mean of squared cycle lengths mod n"),
    d("A233525", 1, "Division-rich 3-free run read backwards from 1, 1"),
    d("A233526", 1, "Minimal 2-free predecessors read backwards from 3, 1"),
];

pub fn descriptor(id: &str) -> Result<&'static SequenceDescriptor> {
    SUPPORTED
        .iter()
        .find(|s| s.id.eq_ignore_ascii_case(id))
        .ok_or_else(|| Error::UnsupportedSequence(id.to_string()))
}

fn fibonacci_like(a: u32, b: u32, count: usize) -> Vec<BigUint> {
    let (mut x, mut y) = (BigUint::from(a), BigUint::from(b));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let next = &x + &y;
        out.push(std::mem::replace(&mut x, std::mem::replace(&mut y, next)));
    }
    out
}

fn n_free_numbers(n: u64, count: usize) -> Result<Vec<BigUint>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let n = Modulus::new(n)?;
    if count == 1 {
        return Ok(vec![BigUint::zero()]);
    }
    Ok(generate(BigUint::zero(), BigUint::one(), n, count)?.to_terms())
}

/// `f(1), f(2), ...`
fn per_index(count: usize, f: impl Fn(u64) -> Result<u64>) -> Result<Vec<BigUint>> {
    (1..=count as u64).map(|n| f(n).map(BigUint::from)).collect()
}

/// The first `count` values of `n >= 1` with `keep(n)`.
fn filtered(count: usize, keep: impl Fn(u64) -> Result<bool>) -> Result<Vec<BigUint>> {
    let mut out = Vec::with_capacity(count);
    let mut n = 1u64;
    while out.len() < count {
        if keep(n)? {
            out.push(BigUint::from(n));
        }
        n += 1;
    }
    Ok(out)
}

fn nth_primes(count: usize) -> impl Iterator<Item = u64> {
    (2u64..).filter(|&p| fibmod::is_prime(p)).take(count)
}

fn non_omni(n: u64) -> Result<bool> {
    Ok(fibmod::count_zero_pairs(n)?.1 > 0)
}

/// The first `count` terms of a supported sequence.
pub fn emit(id: &str, count: usize) -> Result<Vec<BigUint>> {
    let desc = descriptor(id)?;
    let big = |v: Vec<u64>| v.into_iter().map(BigUint::from).collect::<Vec<_>>();
    match desc.id {
        "A000032" => Ok(fibonacci_like(2, 1, count)),
        "A000045" => Ok(fibonacci_like(0, 1, count)),
        "A000285" => Ok(fibonacci_like(1, 4, count)),
        "A000057" => filtered(count, |n| Ok(fibmod::is_prime(n) && fibmod::prime_omni_test(n)?)),
        "A230359" => filtered(count, |n| Ok(fibmod::is_prime(n) && !fibmod::prime_omni_test(n)?)),
        "A001175" => per_index(count, fibmod::pisano_period),
        "A001177" => per_index(count, fibmod::entry_point),
        "A001602" => nth_primes(count)
            .map(|p| fibmod::entry_point(p).map(BigUint::from))
            .collect(),
        "A060305" => nth_primes(count)
            .map(|p| fibmod::pisano_period(p).map(BigUint::from))
            .collect(),
        "A015134" => per_index(count, |n| Ok(fibmod::orbit_decomposition(n)?.cycle_count() as u64)),
        "A015135" => per_index(count, |n| Ok(fibmod::orbit_decomposition(n)?.distinct_lengths() as u64)),
        "A064362" => filtered(count, |n| Ok(!fibmod::lucas_divides(n)?)),
        "A065156" => filtered(count, fibmod::lucas_divides),
        "A064414" => filtered(count, |n| Ok(!non_omni(n)?)),
        "A230457" => filtered(count, non_omni),
        "A232658" => filtered(count, |n| Ok(non_omni(n)? && fibmod::lucas_divides(n)?)),
        "A232357" => per_index(count, |n| Ok(fibmod::count_zero_pairs(n)?.1)),
        "A232656" => per_index(count, |n| Ok(fibmod::count_zero_pairs(n)?.0)),
        "A233246" => per_index(count, |n| Ok(fibmod::cycle_length_moments(n)?.0)),
        "A233248" => per_index(count, |n| Ok(fibmod::cycle_length_moments(n)?.1)),
        "A224382" => n_free_numbers(4, count),
        "A214684" => n_free_numbers(5, count),
        "A232666" => n_free_numbers(6, count),
        "A078414" => n_free_numbers(7, count),
        "A233525" => {
            if count < 2 {
                return Ok(big(vec![1; count]));
            }
            let one = BigUint::one();
            let three = Modulus::new(3)?;
            let mut terms = build_division_rich(three, count, (&one, &one))?.to_terms();
            terms.reverse();
            Ok(terms)
        }
        "A233526" => {
            let mut v = predecessor_chain(&BigUint::from(3u32), &BigUint::one(), count.max(2))?;
            v.truncate(count);
            Ok(v)
        }
        other => unreachable!("descriptor table and dispatch disagree on {other}"),
    }
}

/// b-file text: one `index value` line per term, newline terminated.
pub fn format_bfile(offset: i64, values: &[BigUint]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{} {}\n", offset + i as i64, v));
    }
    out
}

pub fn export_bfile(id: &str, count: usize, destination: &Path) -> Result<()> {
    let desc = descriptor(id)?;
    let values = emit(id, count)?;
    let io = |source| Error::Io {
        path: destination.to_path_buf(),
        source,
    };
    let mut file = fs::File::create(destination).map_err(io)?;
    file.write_all(format_bfile(desc.offset, &values).as_bytes())
        .map_err(io)?;
    Ok(())
}

/// Reads `index value` lines; blank lines and `#` comments are skipped.
pub fn parse_bfile(path: &Path) -> Result<Vec<(i64, BigUint)>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            reason: reason.to_string(),
        };
        let (index, value) = line.split_once(' ').ok_or_else(|| bad("expected `index value`"))?;
        let index = index.parse().map_err(|_| bad("bad index"))?;
        let value = value.trim().parse().map_err(|_| bad("bad value"))?;
        out.push((index, value));
    }
    Ok(out)
}
