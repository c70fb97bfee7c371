//! Exact cycle detection on the consecutive-term pair.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::sequence::{Modulus, Steps, Term};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    /// Number of terms before the cycle starts.
    pub preperiod: usize,
    pub period: usize,
    pub cycle_terms: Vec<Term>,
    pub content_gcd: Term,
}

impl CycleReport {
    pub fn primitive_terms(&self) -> Vec<Term> {
        self.cycle_terms.iter().map(|t| t / &self.content_gcd).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleOutcome {
    Cycle(CycleReport),
    /// No pair repeated within the budget. Says nothing about eventual cycling.
    Exhausted {
        budget: usize,
        last_pair: (Term, Term),
    },
}

impl CycleOutcome {
    pub fn cycle(&self) -> Option<&CycleReport> {
        match self {
            CycleOutcome::Cycle(report) => Some(report),
            CycleOutcome::Exhausted { .. } => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, CycleOutcome::Exhausted { .. })
    }
}

fn fingerprint(a: &Term, b: &Term) -> u64 {
    let mut h = DefaultHasher::new();
    a.hash(&mut h);
    b.hash(&mut h);
    h.finish()
}

fn pair_at(a1: &Term, a2: &Term, n: Modulus, index: usize) -> Result<(Term, Term)> {
    let mut steps = Steps::new(a1.clone(), a2.clone(), n)?;
    for _ in 0..index {
        steps.next();
    }
    let (a, b) = steps.pair();
    Ok((a.clone(), b.clone()))
}

/// Looks for the first exact repetition of a consecutive-term pair within
/// `budget` generated terms.
///
/// The set of visited pairs is kept as 64-bit fingerprints; a fingerprint hit
/// is confirmed by replaying to the earlier index, so the reported pre-period
/// and period are exact and minimal.
pub fn detect_cycle(a1: &Term, a2: &Term, n: Modulus, budget: usize) -> Result<CycleOutcome> {
    if budget == 0 {
        return Err(Error::DegenerateInput("budget must be positive".into()));
    }
    let mut steps = Steps::new(a1.clone(), a2.clone(), n)?;
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
    seen.insert(fingerprint(a1, a2), vec![0]);

    for index in 1..=budget {
        steps.next();
        let (a, b) = steps.pair();
        let fp = fingerprint(a, b);
        if let Some(candidates) = seen.get(&fp) {
            for &earlier in candidates {
                let (x, y) = pair_at(a1, a2, n, earlier)?;
                if &x == a && &y == b {
                    return Ok(CycleOutcome::Cycle(report(x, y, n, earlier, index - earlier)));
                }
            }
        }
        seen.entry(fp).or_default().push(index);
    }
    let (a, b) = steps.pair();
    Ok(CycleOutcome::Exhausted {
        budget,
        last_pair: (a.clone(), b.clone()),
    })
}

fn report(x: Term, y: Term, n: Modulus, preperiod: usize, period: usize) -> CycleReport {
    let mut steps = Steps::new(x, y, n).expect("cycle pair is non-degenerate");
    let mut cycle_terms = Vec::with_capacity(period);
    for _ in 0..period {
        cycle_terms.push(steps.pair().0.clone());
        steps.next();
    }
    let content_gcd = content(&cycle_terms);
    CycleReport {
        preperiod,
        period,
        cycle_terms,
        content_gcd,
    }
}

fn content(terms: &[Term]) -> Term {
    terms.iter().fold(BigUint::zero(), |g, t| g.gcd(t))
}

/// Divides a cycle by the gcd of its terms.
pub fn primitive_cycle(cycle_terms: &[Term]) -> Result<(Vec<Term>, Term)> {
    if cycle_terms.is_empty() {
        return Err(Error::DegenerateInput("empty cycle".into()));
    }
    let g = content(cycle_terms);
    if g.is_zero() {
        return Err(Error::DegenerateInput("cycle of zeros".into()));
    }
    let primitive = cycle_terms.iter().map(|t| t / &g).collect();
    Ok((primitive, g))
}

/// True iff the 3-cycle is a rotation of `k, k, 2k` with `3 ∤ k`.
pub fn verify_three_cycle_form(cycle_terms: &[Term]) -> Result<bool> {
    if cycle_terms.len() != 3 {
        return Err(Error::WrongShape(format!(
            "expected a cycle of length 3, got {}",
            cycle_terms.len()
        )));
    }
    let three = BigUint::from(3u32);
    for r in 0..3 {
        let k = &cycle_terms[r];
        let k2 = &cycle_terms[(r + 1) % 3];
        let double = &cycle_terms[(r + 2) % 3];
        if k == k2 && *double == k << 1u32 && !(k % &three).is_zero() && !k.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}
