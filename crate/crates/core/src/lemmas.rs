//! Structural properties that every n-free run must satisfy.
//!
//! Each check returns the first 1-based index where the property fails.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::sequence::SequenceRun;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub property: &'static str,
    pub index: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at index {}", self.property, self.index)
    }
}

impl std::error::Error for Violation {}

type Check = Result<(), Violation>;

fn fail(property: &'static str, index: usize) -> Check {
    Err(Violation { property, index })
}

fn is_even(x: &BigUint) -> bool {
    !x.bit(0)
}

/// No term past the first two is a multiple of `n`.
pub fn n_free(run: &SequenceRun) -> Check {
    for (i, s) in run.steps().iter().enumerate().skip(2) {
        if s.residue == 0 {
            return fail("n-free", i + 1);
        }
    }
    Ok(())
}

/// 4-free runs: after the first odd term, no two consecutive even terms.
pub fn four_free_parity(run: &SequenceRun) -> Check {
    let terms: Vec<_> = run.terms().collect();
    let Some(first_odd) = terms.iter().position(|t| !is_even(t)) else {
        return Ok(());
    };
    for k in first_odd + 1..terms.len() {
        if is_even(terms[k]) && is_even(terms[k - 1]) {
            return fail("4-free parity", k + 1);
        }
    }
    Ok(())
}

/// The run contains at least one odd term.
pub fn contains_odd(run: &SequenceRun) -> Check {
    if run.terms().any(|t| !is_even(t)) {
        Ok(())
    } else {
        fail("contains odd", run.len())
    }
}

/// 3-free runs: a step without division is always followed by one with
/// division, once both summands are non-multiples of 3.
pub fn three_free_cadence(run: &SequenceRun) -> Check {
    let steps = run.steps();
    for k in 2..steps.len().saturating_sub(1) {
        let clean = steps[k - 2].residue != 0 && steps[k - 1].residue != 0;
        if clean && steps[k].power == 0 && steps[k + 1].power == 0 {
            return fail("3-free division cadence", k + 2);
        }
    }
    Ok(())
}

/// Where two consecutive steps both divide,
/// `3·max(a_{j+1}, a_{j+2}) <= 2·max(a_{j-1}, a_j)`. Holds for every `n >= 3`.
pub fn division_rich_decay(run: &SequenceRun) -> Check {
    let steps = run.steps();
    for j in 2..steps.len().saturating_sub(1) {
        if steps[j].power == 0 || steps[j + 1].power == 0 {
            continue;
        }
        let before = (&steps[j - 2].term).max(&steps[j - 1].term);
        let after = (&steps[j].term).max(&steps[j + 1].term);
        if after * 3u32 > before * 2u32 {
            return fail("division-rich decay", j + 2);
        }
    }
    Ok(())
}

/// A step without division strictly exceeds the term two places back.
pub fn undivided_steps_grow(run: &SequenceRun) -> Check {
    let steps = run.steps();
    for k in 2..steps.len() {
        if steps[k].power == 0 && !steps[k - 1].term.is_zero() && steps[k].term <= steps[k - 2].term {
            return fail("undivided growth", k + 1);
        }
    }
    Ok(())
}
