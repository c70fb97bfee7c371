//! Fibonacci residues modulo `n`: entry points, Pisano periods and the orbit
//! structure of the pair map `(a, b) -> (b, a + b) mod n`.
//!
//! The pair map is a permutation of the `n²` residue pairs, so its orbits
//! partition them. Whether a Fibonacci-like sequence ever meets a multiple of
//! `n` depends only on the orbit of its starting pair.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};

/// Largest modulus accepted by the orbit enumerations by default.
pub const DEFAULT_ORBIT_CAP: u64 = 10_000;

fn need_positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidModulus(0));
    }
    Ok(())
}

fn check_cap(n: u64, cap: u64) -> Result<()> {
    need_positive(n)?;
    if n > cap {
        return Err(Error::ResourceBound { n, cap });
    }
    Ok(())
}

/// Entry point `Z(m)`: the smallest `k >= 1` with `m | F_k`.
pub fn entry_point(m: u64) -> Result<u64> {
    need_positive(m)?;
    let (mut a, mut b, mut k) = (0u64, 1 % m, 1u64);
    while b != 0 {
        (a, b) = (b, (a + b) % m);
        k += 1;
    }
    Ok(k)
}

/// Pisano period `π(n)`: the period of the Fibonacci sequence modulo `n`.
pub fn pisano_period(n: u64) -> Result<u64> {
    need_positive(n)?;
    if n == 1 {
        return Ok(1);
    }
    let (mut a, mut b, mut k) = (1u64, 1u64, 1u64);
    while (a, b) != (0, 1) {
        (a, b) = (b, (a + b) % n);
        k += 1;
    }
    Ok(k)
}

/// True iff some Lucas number is a multiple of `n`.
pub fn lucas_divides(n: u64) -> Result<bool> {
    let period = pisano_period(n)?;
    let (mut a, mut b) = (2 % n, 1 % n);
    for _ in 0..period {
        if a == 0 {
            return Ok(true);
        }
        (a, b) = (b, (a + b) % n);
    }
    Ok(false)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// One orbit of the pair map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Lexicographically smallest pair in the orbit.
    pub start: (u64, u64),
    pub length: u64,
    pub contains_zero: bool,
}

impl Orbit {
    pub fn pairs(&self, n: u64) -> OrbitPairs {
        OrbitPairs {
            n,
            current: self.start,
            remaining: self.length,
        }
    }
}

/// Pairs of an orbit in iteration order, starting from [`Orbit::start`].
#[derive(Debug, Clone)]
pub struct OrbitPairs {
    n: u64,
    current: (u64, u64),
    remaining: u64,
}

impl Iterator for OrbitPairs {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.current;
        let (a, b) = out;
        self.current = (b, (a + b) % self.n);
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomposition {
    pub modulus: u64,
    /// Orbits ordered by their smallest pair.
    pub orbits: Vec<Orbit>,
}

impl OrbitDecomposition {
    /// Number of cycles (A015134).
    pub fn cycle_count(&self) -> usize {
        self.orbits.len()
    }

    /// Number of distinct cycle lengths (A015135).
    pub fn distinct_lengths(&self) -> usize {
        self.orbits.iter().map(|o| o.length).collect::<BTreeSet<_>>().len()
    }

    /// Cycle lengths in increasing order.
    pub fn lengths(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.orbits.iter().map(|o| o.length).collect();
        v.sort_unstable();
        v
    }

    pub fn zero_free(&self) -> impl Iterator<Item = &Orbit> + '_ {
        self.orbits.iter().filter(|o| !o.contains_zero)
    }
}

struct Visited(Vec<u64>);

impl Visited {
    fn new(len: usize) -> Self {
        Visited(vec![0; len.div_ceil(64)])
    }

    /// Marks `i`; returns whether it was already set.
    fn set(&mut self, i: usize) -> bool {
        let (w, bit) = (i / 64, 1u64 << (i % 64));
        let was = self.0[w] & bit != 0;
        self.0[w] |= bit;
        was
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] & (1u64 << (i % 64)) != 0
    }
}

/// Walks every orbit once, in order of smallest pair, handing each orbit's
/// pairs to `visit`.
fn for_each_orbit(n: u64, mut visit: impl FnMut(&[(u64, u64)])) {
    let nn = (n * n) as usize;
    let mut visited = Visited::new(nn);
    let mut buf = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if visited.get((a * n + b) as usize) {
                continue;
            }
            buf.clear();
            let (mut x, mut y) = (a, b);
            while !visited.set((x * n + y) as usize) {
                buf.push((x, y));
                (x, y) = (y, (x + y) % n);
            }
            visit(&buf);
        }
    }
}

pub fn orbit_decomposition(n: u64) -> Result<OrbitDecomposition> {
    orbit_decomposition_with_cap(n, DEFAULT_ORBIT_CAP)
}

pub fn orbit_decomposition_with_cap(n: u64, cap: u64) -> Result<OrbitDecomposition> {
    check_cap(n, cap)?;
    let mut orbits = Vec::new();
    for_each_orbit(n, |pairs| {
        orbits.push(Orbit {
            start: pairs[0],
            length: pairs.len() as u64,
            contains_zero: pairs.iter().any(|&(a, _)| a == 0),
        });
    });
    Ok(OrbitDecomposition { modulus: n, orbits })
}

/// `(pairs whose orbit meets 0, pairs whose orbit avoids 0)`; the two sum to
/// `n²`. The `(0, 0)` pair counts as meeting zero.
pub fn count_zero_pairs(n: u64) -> Result<(u64, u64)> {
    let d = orbit_decomposition(n)?;
    let zero_free: u64 = d.zero_free().map(|o| o.length).sum();
    Ok((n * n - zero_free, zero_free))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationRecord {
    pub n: u64,
    /// Every Fibonacci-like sequence contains a multiple of `n`.
    pub omni_factor: bool,
    /// No Lucas number is a multiple of `n`.
    pub lucas_witness: bool,
    /// Smallest starting pair whose Fibonacci-like sequence avoids multiples of `n`.
    pub witness_start: Option<(u64, u64)>,
}

pub fn is_omni_factor(n: u64) -> Result<ClassificationRecord> {
    let d = orbit_decomposition(n)?;
    let witness_start = d.zero_free().map(|o| o.start).next();
    Ok(ClassificationRecord {
        n,
        omni_factor: witness_start.is_none(),
        lucas_witness: !lucas_divides(n)?,
        witness_start,
    })
}

/// A prime is an omni-factor iff `Z(p) = p + 1`.
pub fn prime_omni_test(p: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::WrongDomain(format!("{p} is not prime")));
    }
    Ok(entry_point(p)? == p + 1)
}

/// For each residue `r`, the residues that can follow it inside a sequence
/// that never meets a multiple of `n`. Empty for omni-factors.
pub fn division_free_successors(n: u64) -> Result<BTreeMap<u64, BTreeSet<u64>>> {
    let d = orbit_decomposition(n)?;
    let mut map: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for orbit in d.zero_free() {
        for (r, s) in orbit.pairs(n) {
            map.entry(r).or_default().insert(s);
        }
    }
    Ok(map)
}

/// Average number of terms from just after a division up to (not including)
/// the next multiple of `n`.
///
/// The average is uniform over states `(u, r)` where `u` is the term before
/// the division, coprime to `n`, and `r` is the non-zero remainder the
/// division left.
pub fn avg_steps_between_divisions(n: u64) -> Result<Ratio<u64>> {
    check_cap(n, DEFAULT_ORBIT_CAP)?;
    if n < 2 {
        return Err(Error::InvalidModulus(n));
    }
    let mut total = 0u64;
    let mut states = 0u64;
    let mut diverges = false;
    let mut dist = Vec::new();
    for_each_orbit(n, |pairs| {
        let counted = |&(u, r): &(u64, u64)| r != 0 && u.gcd(&n) == 1;
        if !pairs.iter().any(|&(a, _)| a == 0) {
            if pairs.iter().any(counted) {
                diverges = true;
            }
            return;
        }
        // Distance from each pair to the next pair whose second entry is 0,
        // computed by two backward sweeps around the cycle.
        let len = pairs.len();
        dist.clear();
        dist.resize(len, u64::MAX);
        let mut next = u64::MAX;
        for _ in 0..2 {
            for i in (0..len).rev() {
                next = if pairs[i].1 == 0 { 0 } else { next.saturating_add(1) };
                dist[i] = dist[i].min(next);
            }
        }
        for (i, p) in pairs.iter().enumerate() {
            if counted(p) {
                total += dist[i];
                states += 1;
            }
        }
    });
    if diverges {
        return Err(Error::Divergence(n));
    }
    Ok(Ratio::new(total, states))
}

/// `(Σ ℓ², round(Σ ℓ² / (2n²)))` over all orbit lengths `ℓ`, including the
/// trivial `(0, 0)` orbit. Rounding is half away from zero.
pub fn cycle_length_moments(n: u64) -> Result<(u64, u64)> {
    let d = orbit_decomposition(n)?;
    let sum_squares: u64 = d.orbits.iter().map(|o| o.length * o.length).sum();
    let denom = 2 * n * n;
    Ok((sum_squares, (2 * sum_squares + denom) / (2 * denom)))
}

/// `gcd(π(p))` over the prime factors `p` of `n − 1`. Every n-free cycle has
/// a length divisible by this value. Returns 1 for `n = 2`.
pub fn cycle_length_divisor(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidModulus(n));
    }
    let mut g = 0u64;
    for p in prime_factors(n - 1) {
        g = g.gcd(&pisano_period(p)?);
    }
    Ok(g.max(1))
}
