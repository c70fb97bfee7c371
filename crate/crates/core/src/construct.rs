//! Backward construction of n-free runs with prescribed division behaviour.
//!
//! Every construction here runs the recurrence in reverse,
//! `a_{k-2} = d_k·a_k − a_{k-1}`, where `d_k` is the divisor applied at step
//! `k`. Where a choice exists the smallest admissible exponent or offset is
//! taken. Runs are returned in forward order with the terminal pair last.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::sequence::{generate, strip_generic, Modulus, SequenceRun, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignatureEntry {
    /// The first two places, where the preceding terms are not known.
    Unknown,
    /// Division by `n^power`; `power == 0` means no division.
    Power(u32),
}

/// Per-step list of the divisors applied along a run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    modulus: Modulus,
    entries: Vec<SignatureEntry>,
}

impl Signature {
    pub fn new(modulus: Modulus, entries: Vec<SignatureEntry>) -> Self {
        Signature { modulus, entries }
    }

    /// Builds a signature from exponents, with `None` for unknown places.
    pub fn from_powers(modulus: Modulus, powers: &[Option<u32>]) -> Self {
        let entries = powers
            .iter()
            .map(|p| p.map_or(SignatureEntry::Unknown, SignatureEntry::Power))
            .collect();
        Signature { modulus, entries }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn entries(&self) -> &[SignatureEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Divisor `n^i` at 1-based place `k`, if known.
    pub fn divisor(&self, k: usize) -> Option<BigUint> {
        match self.entries[k - 1] {
            SignatureEntry::Unknown => None,
            SignatureEntry::Power(p) => Some(self.modulus.pow(p)),
        }
    }

    /// Sum of the known exponents, i.e. `log_n` of the divisor product.
    pub fn total_power(&self) -> u64 {
        self.entries
            .iter()
            .map(|e| match e {
                SignatureEntry::Power(p) => u64::from(*p),
                SignatureEntry::Unknown => 0,
            })
            .sum()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match e {
                SignatureEntry::Unknown => f.write_str("*")?,
                SignatureEntry::Power(p) => write!(f, "{}", self.modulus.pow(*p))?,
            }
        }
        Ok(())
    }
}

pub fn signature_of(run: &SequenceRun) -> Signature {
    let entries = run
        .steps()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if i < 2 {
                SignatureEntry::Unknown
            } else {
                SignatureEntry::Power(s.power)
            }
        })
        .collect();
    Signature::new(run.modulus(), entries)
}

/// A remainder sequence together with the signature it should realise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemainderPrescription {
    pub remainders: Vec<u64>,
    pub signature: Signature,
}

impl RemainderPrescription {
    pub fn new(remainders: Vec<u64>, signature: Signature) -> Result<Self> {
        let p = RemainderPrescription { remainders, signature };
        p.check_legal()?;
        Ok(p)
    }

    pub fn modulus(&self) -> Modulus {
        self.signature.modulus()
    }

    pub fn len(&self) -> usize {
        self.remainders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.remainders.is_empty()
    }

    /// Checks that the remainders are legal and match the signature.
    /// Errors name the first offending 1-based index.
    pub fn check_legal(&self) -> Result<()> {
        let n = self.modulus().get();
        let r = &self.remainders;
        if r.len() != self.signature.len() {
            return Err(Error::WrongShape(format!(
                "{} remainders but {} signature entries",
                r.len(),
                self.signature.len()
            )));
        }
        if r.len() < 2 {
            return Err(Error::WrongShape("a prescription needs at least 2 places".into()));
        }
        let illegal = |index: usize, reason: String| Err(Error::Illegal { index, reason });
        for (i, &x) in r.iter().enumerate() {
            if x >= n {
                return illegal(i + 1, format!("remainder {x} is not below {n}"));
            }
        }
        for (i, e) in self.signature.entries().iter().enumerate().take(2) {
            if *e != SignatureEntry::Unknown {
                return illegal(i + 1, "the first two signature places must be unknown".into());
            }
        }
        for k in 3..=r.len() {
            let sum = (r[k - 3] + r[k - 2]) % n;
            let power = match self.signature.entries()[k - 1] {
                SignatureEntry::Unknown => return illegal(k, "unknown divisor after the first two places".into()),
                SignatureEntry::Power(p) => p,
            };
            if r[k - 1] == 0 {
                return illegal(k, "a term past the first two cannot be a multiple of n".into());
            }
            if sum == 0 && power == 0 {
                return illegal(
                    k,
                    format!("previous remainders sum to a multiple of {n} but no division is prescribed"),
                );
            }
            if sum != 0 && power > 0 {
                return illegal(
                    k,
                    format!("division prescribed but previous remainders sum to {sum} mod {n}"),
                );
            }
            if sum != 0 && r[k - 1] != sum {
                return illegal(
                    k,
                    format!("remainder {} breaks the sum rule (expected {sum})", r[k - 1]),
                );
            }
        }
        Ok(())
    }
}

/// One step of a replay over signed integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedStep {
    pub term: BigInt,
    pub power: u32,
    pub residue: u64,
}

fn residue_signed(x: &BigInt, n: Modulus) -> u64 {
    x.mod_floor(&BigInt::from(n.get()))
        .to_u64()
        .expect("residue fits in u64")
}

/// Forward n-free recurrence over signed integers. Positivity is not required;
/// a zero sum is a degenerate-input error.
pub fn replay_signed(a1: &BigInt, a2: &BigInt, n: Modulus, count: usize) -> Result<Vec<SignedStep>> {
    if count < 2 {
        return Err(Error::DegenerateInput(format!(
            "a run needs at least 2 terms, got {count}"
        )));
    }
    let big_n = BigInt::from(n.get());
    let mut out = vec![
        SignedStep {
            term: a1.clone(),
            power: 0,
            residue: residue_signed(a1, n),
        },
        SignedStep {
            term: a2.clone(),
            power: 0,
            residue: residue_signed(a2, n),
        },
    ];
    for k in 2..count {
        let sum = &out[k - 2].term + &out[k - 1].term;
        if sum.is_zero() {
            return Err(Error::DegenerateInput(format!("zero sum at index {}", k + 1)));
        }
        let (term, power) = strip_generic(sum, &big_n);
        let residue = residue_signed(&term, n);
        out.push(SignedStep { term, power, residue });
    }
    Ok(out)
}

/// Runs the recurrence backwards from `terminal = (a_{L-1}, a_L)` using the
/// prescribed divisors. The result may contain negative terms.
pub fn build_from_prescription(p: &RemainderPrescription, terminal: (&BigInt, &BigInt)) -> Result<Vec<BigInt>> {
    p.check_legal()?;
    let n = p.modulus();
    let len = p.len();
    let (prev, last) = terminal;
    for (index, t) in [(len - 1, prev), (len, last)] {
        let want = p.remainders[index - 1];
        let got = residue_signed(t, n);
        if got != want {
            return Err(Error::Illegal {
                index,
                reason: format!("terminal term {t} has remainder {got}, prescription says {want}"),
            });
        }
    }
    let mut back = vec![last.clone(), prev.clone()];
    for k in (3..=len).rev() {
        let divisor = BigInt::from(p.signature.divisor(k).expect("checked legal"));
        // back holds a_L, a_{L-1}, ..., a_k, a_{k-1}
        let a_k = &back[back.len() - 2];
        let a_km1 = &back[back.len() - 1];
        let a_km2 = divisor * a_k - a_km1;
        back.push(a_km2);
    }
    back.reverse();
    Ok(back)
}

/// Prescription for a division-poor stretch: divide by exactly `n` at the
/// last step and at every other step before it, with the given terminal
/// remainders.
pub fn division_poor_prescription(n: Modulus, length: usize, terminal: (u64, u64)) -> Result<RemainderPrescription> {
    if length < 2 {
        return Err(Error::DegenerateInput("length must be at least 2".into()));
    }
    let m = n.get();
    let mut powers = vec![None; length];
    for (k, slot) in powers.iter_mut().enumerate().skip(2) {
        // 0-based slot k is place k+1; divide when (length - 1 - k) is even.
        *slot = Some(u32::from((length - 1 - k).is_multiple_of(2)));
    }
    let mut r = vec![0u64; length];
    r[length - 2] = terminal.0 % m;
    r[length - 1] = terminal.1 % m;
    for k in (3..=length).rev() {
        let divides = powers[k - 1] == Some(1);
        r[k - 3] = if divides {
            (m - r[k - 2]) % m
        } else {
            (r[k - 1] + m - r[k - 2]) % m
        };
    }
    RemainderPrescription::new(r, Signature::from_powers(n, &powers))
}

/// Division-rich run of `length` terms ending in `terminal = (a_{L-1}, a_L)`:
/// every step from the third divides, each backward step using the smallest
/// exponent that keeps the new term positive.
pub fn build_division_rich(n: Modulus, length: usize, terminal: (&Term, &Term)) -> Result<SequenceRun> {
    let (prev, last) = terminal;
    if length < 2 {
        return Err(Error::DegenerateInput("length must be at least 2".into()));
    }
    for t in [prev, last] {
        if t.is_zero() || n.residue(t) == 0 {
            return Err(Error::WrongDomain(format!(
                "terminal terms must be positive and not divisible by {n}, got {t}"
            )));
        }
    }
    let big_n = n.as_big();
    let mut back: Vec<Term> = vec![last.clone(), prev.clone()];
    while back.len() < length {
        let a_k = &back[back.len() - 2];
        let a_km1 = &back[back.len() - 1];
        let mut scaled = a_k * &big_n;
        while scaled <= *a_km1 {
            scaled *= &big_n;
        }
        let a_km2 = scaled - a_km1;
        back.push(a_km2);
    }
    back.reverse();
    let run = generate(back[0].clone(), back[1].clone(), n, length)?;
    debug_assert_eq!(run.to_terms(), back);
    Ok(run)
}

/// Smallest odd `a_0 = 2^k·a_2 − a_1 > 0` (with `k >= 1`) such that
/// `a_0, a_1, a_2` is a 2-free run.
pub fn build_2free_predecessor(a1: &Term, a2: &Term) -> Result<Term> {
    for t in [a1, a2] {
        if t.is_zero() || !t.bit(0) {
            return Err(Error::WrongDomain(format!(
                "predecessor needs odd positive terms, got {t}"
            )));
        }
    }
    let mut scaled = a2 << 1u32;
    while scaled <= *a1 {
        scaled <<= 1u32;
    }
    Ok(scaled - a1)
}

/// Extends `a_1, a_2` backwards `count - 2` times and lists the result in
/// reverse reading order: `a_2, a_1, a_0, a_{-1}, ...`.
pub fn predecessor_chain(a1: &Term, a2: &Term, count: usize) -> Result<Vec<Term>> {
    let mut out = vec![a2.clone(), a1.clone()];
    while out.len() < count {
        let k = out.len();
        let next = build_2free_predecessor(&out[k - 1], &out[k - 2])?;
        out.push(next);
    }
    out.truncate(count);
    Ok(out)
}

/// Shifts the first two raw terms by the smallest non-negative multiples of
/// `n^m` that make every term positive, then replays the run forward.
///
/// The shift keeps the signature and remainder trace as long as the product
/// of the divisors along the raw run is below `n^m`.
pub fn adjust_positive(raw: &[BigInt], n: Modulus, m: u32) -> Result<SequenceRun> {
    if raw.len() < 2 {
        return Err(Error::DegenerateInput("raw run needs at least 2 terms".into()));
    }
    let replay = replay_signed(&raw[0], &raw[1], n, raw.len())?;
    if replay.iter().zip(raw).any(|(s, t)| s.term != *t) {
        return Err(Error::WrongShape(format!("raw terms are not a {n}-free run")));
    }
    let total: u64 = replay.iter().skip(2).map(|s| u64::from(s.power)).sum();
    if total >= u64::from(m) {
        return Err(Error::AdjustmentExponentTooSmall {
            product: n.pow(total.min(u64::from(u32::MAX)) as u32).to_string(),
            modulus: n.get(),
            exponent: m,
        });
    }
    let step = BigInt::from_biguint(Sign::Plus, n.pow(m));
    let lift = |a: &BigInt| -> Term {
        let d = if a.is_positive() {
            BigInt::zero()
        } else {
            // ceil((1 - a) / step)
            (BigInt::one() - a).div_ceil(&step)
        };
        (a + d * &step).to_biguint().expect("lifted term is positive")
    };
    generate(lift(&raw[0]), lift(&raw[1]), n, raw.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u64) -> Modulus {
        Modulus::new(n).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn small(run: &SequenceRun) -> Vec<u64> {
        run.terms().map(|t| t.to_u64().unwrap()).collect()
    }

    #[test]
    fn signature_display() {
        let run = generate(5u32.into(), 4u32.into(), m(3), 7).unwrap();
        assert_eq!(small(&run), [5, 4, 1, 5, 2, 7, 1]);
        assert_eq!(run.signature().to_string(), "*, *, 9, 1, 3, 1, 9");
    }

    #[test]
    fn lucas_signature_has_no_divisions() {
        let run = generate(2u32.into(), 1u32.into(), m(5), 12).unwrap();
        let s = run.signature();
        assert!(s.entries()[2..].iter().all(|e| *e == SignatureEntry::Power(0)));
        assert_eq!(s.total_power(), 0);
    }

    #[test]
    fn division_rich_example() {
        let one = BigUint::one();
        let run = build_division_rich(m(3), 10, (&one, &one)).unwrap();
        assert_eq!(small(&run), [49, 32, 1, 11, 4, 5, 1, 2, 1, 1]);
        assert!(run.powers()[2..].iter().all(|&p| p >= 1));
        let short = build_division_rich(m(3), 4, (&one, &one)).unwrap();
        assert_eq!(small(&short), [1, 2, 1, 1]);
    }

    #[test]
    fn division_rich_rejects_bad_terminal() {
        let (three, one) = (BigUint::from(3u32), BigUint::one());
        assert_eq!(
            build_division_rich(m(3), 5, (&three, &one)).unwrap_err().kind(),
            "wrong-domain"
        );
    }

    #[test]
    fn two_free_predecessors() {
        let t = |x: u32| BigUint::from(x);
        assert_eq!(build_2free_predecessor(&t(3), &t(1)).unwrap(), t(1));
        assert_eq!(build_2free_predecessor(&t(1), &t(3)).unwrap(), t(5));
        assert_eq!(build_2free_predecessor(&t(5), &t(1)).unwrap(), t(3));
        assert!(build_2free_predecessor(&t(2), &t(1)).is_err());
        let chain = predecessor_chain(&t(3), &t(1), 9).unwrap();
        let chain: Vec<u64> = chain.iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(chain, [1, 3, 1, 5, 3, 7, 5, 9, 1]);
    }

    #[test]
    fn predecessor_replays_forward() {
        let t = |x: u32| BigUint::from(x);
        let a0 = build_2free_predecessor(&t(5), &t(1)).unwrap();
        let run = generate(a0, t(5), m(2), 3).unwrap();
        assert_eq!(small(&run), [3, 5, 1]);
    }

    fn paper_poor() -> RemainderPrescription {
        RemainderPrescription::new(
            vec![1, 1, 2, 2, 1, 1],
            Signature::from_powers(m(3), &[None, None, Some(0), Some(1), Some(0), Some(1)]),
        )
        .unwrap()
    }

    #[test]
    fn division_poor_raw_and_adjusted() {
        let p = paper_poor();
        let one = BigInt::one();
        let raw = build_from_prescription(&p, (&one, &one)).unwrap();
        assert_eq!(raw, ints(&[-8, 7, -1, 2, 1, 1]));
        let adjusted = adjust_positive(&raw, m(3), 3).unwrap();
        assert_eq!(small(&adjusted), [19, 7, 26, 11, 37, 16]);
        assert_eq!(adjusted.signature(), p.signature);
        assert_eq!(adjusted.remainders(), p.remainders);
    }

    #[test]
    fn division_poor_helper_matches_listing() {
        let p = division_poor_prescription(m(3), 6, (1, 1)).unwrap();
        assert_eq!(p, paper_poor());
    }

    #[test]
    fn adjustment_exponent_must_exceed_divisions() {
        let raw = ints(&[-8, 7, -1, 2, 1, 1]);
        assert_eq!(
            adjust_positive(&raw, m(3), 2).unwrap_err().kind(),
            "adjustment-exponent-too-small"
        );
        assert!(adjust_positive(&ints(&[1, 2, 3]), m(3), 2).is_err());
    }

    #[test]
    fn positive_raw_is_unchanged() {
        let raw = ints(&[5, 4, 1, 5, 2, 7, 1]);
        let adjusted = adjust_positive(&raw, m(3), 8).unwrap();
        assert_eq!(small(&adjusted), [5, 4, 1, 5, 2, 7, 1]);
    }

    #[test]
    fn no_division_prescription_is_plain_backward_fibonacci() {
        let p = RemainderPrescription::new(
            vec![3, 1, 4, 5, 2],
            Signature::from_powers(m(7), &[None, None, Some(0), Some(0), Some(0)]),
        )
        .unwrap();
        let raw = build_from_prescription(&p, (&BigInt::from(5), &BigInt::from(9))).unwrap();
        assert_eq!(raw, ints(&[3, 1, 4, 5, 9]));
    }

    #[test]
    fn illegal_prescriptions_name_the_index() {
        let sig = |p: &[Option<u32>]| Signature::from_powers(m(3), p);
        // 1 + 2 = 3 is a multiple of 3 but no division is prescribed.
        let err = RemainderPrescription::new(vec![1, 2, 1], sig(&[None, None, Some(0)])).unwrap_err();
        assert!(matches!(err, Error::Illegal { index: 3, .. }));
        // 1 + 1 = 2 but the prescription says 1.
        let err = RemainderPrescription::new(vec![1, 1, 2, 1], sig(&[None, None, Some(0), Some(0)])).unwrap_err();
        assert!(matches!(err, Error::Illegal { index: 4, .. }));
        // Division where the sum is not a multiple.
        let err = RemainderPrescription::new(vec![1, 1, 2], sig(&[None, None, Some(1)])).unwrap_err();
        assert!(matches!(err, Error::Illegal { index: 3, .. }));
        // Zero remainder past the start.
        let err = RemainderPrescription::new(vec![1, 2, 0], sig(&[None, None, Some(1)])).unwrap_err();
        assert!(matches!(err, Error::Illegal { index: 3, .. }));
        let err = RemainderPrescription::new(vec![1, 2], sig(&[None])).unwrap_err();
        assert_eq!(err.kind(), "wrong-shape");
    }

    #[test]
    fn terminal_residue_mismatch() {
        let p = paper_poor();
        let err = build_from_prescription(&p, (&BigInt::from(2), &BigInt::one())).unwrap_err();
        assert!(matches!(err, Error::Illegal { index: 5, .. }));
    }

    #[test]
    fn signed_replay_handles_negatives() {
        let steps = replay_signed(&BigInt::from(-8), &BigInt::from(7), m(3), 6).unwrap();
        let terms: Vec<BigInt> = steps.iter().map(|s| s.term.clone()).collect();
        assert_eq!(terms, ints(&[-8, 7, -1, 2, 1, 1]));
        assert_eq!(steps[0].residue, 1);
        assert!(replay_signed(&BigInt::from(-3), &BigInt::from(3), m(3), 3).is_err());
    }
}
