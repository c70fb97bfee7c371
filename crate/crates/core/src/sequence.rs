//! Exact n-free Fibonacci sequences.
//!
//! Each term after the first two is the sum of the previous two with the
//! largest power of the modulus divided out. Terms are arbitrary precision,
//! so there is no overflow path; runs are indexed from 1 to match the usual
//! `a_1, a_2, ...` notation.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::construct::Signature;
use crate::error::{Error, Result};

/// A sequence element. Always non-negative.
pub type Term = BigUint;

/// The `n` in "n-free". Guaranteed to be at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidModulus(n));
        }
        Ok(Modulus(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_big(self) -> BigUint {
        BigUint::from(self.0)
    }

    /// `n^power` as a big integer.
    pub fn pow(self, power: u32) -> BigUint {
        num_traits::pow(self.as_big(), power as usize)
    }

    /// Residue of `x` in `[0, n)`.
    pub fn residue(self, x: &BigUint) -> u64 {
        (x % self.0).to_u64().expect("residue fits in u64")
    }
}

impl TryFrom<u64> for Modulus {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        Modulus::new(n)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Divides the largest power of `n` out of a non-zero integer of any sign.
pub(crate) fn strip_generic<T: Integer + Clone>(mut x: T, n: &T) -> (T, u32) {
    debug_assert!(!x.is_zero());
    let mut power = 0;
    loop {
        let (q, r) = x.div_rem(n);
        if !r.is_zero() {
            return (x, power);
        }
        x = q;
        power += 1;
    }
}

/// Splits `x` into `reduced * n^power` with `n` not dividing `reduced`.
pub fn strip_powers(x: &BigUint, n: Modulus) -> Result<(BigUint, u32)> {
    if x.is_zero() {
        return Err(Error::DegenerateInput("cannot strip powers from 0".to_string()));
    }
    Ok(strip_generic(x.clone(), &n.as_big()))
}

/// One generation step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub term: Term,
    /// Exponent of `n` divided out to produce `term`. Zero for the two starting terms.
    pub power: u32,
    /// `term mod n`.
    pub residue: u64,
}

impl StepRecord {
    fn start(term: Term, n: Modulus) -> Self {
        let residue = n.residue(&term);
        StepRecord {
            term,
            power: 0,
            residue,
        }
    }
}

fn check_start(a: &Term, b: &Term) -> Result<()> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::DegenerateInput(
            "start pair (0, 0) generates the all-zero sequence".to_string(),
        ));
    }
    Ok(())
}

/// Advances the consecutive-term pair `(a, b)` to `(b, c)`.
pub fn next_state(pair: (&Term, &Term), n: Modulus) -> Result<((Term, Term), StepRecord)> {
    let (a, b) = pair;
    check_start(a, b)?;
    let (c, power) = strip_powers(&(a + b), n)?;
    let record = StepRecord {
        residue: n.residue(&c),
        term: c.clone(),
        power,
    };
    Ok(((b.clone(), c), record))
}

/// Unbounded stream of step records for `a_3, a_4, ...`.
///
/// The start pair must not be `(0, 0)`; use [`Steps::new`] to check it.
#[derive(Debug, Clone)]
pub struct Steps {
    n: Modulus,
    big_n: BigUint,
    prev: Term,
    last: Term,
}

impl Steps {
    pub fn new(a1: Term, a2: Term, n: Modulus) -> Result<Self> {
        check_start(&a1, &a2)?;
        Ok(Steps {
            n,
            big_n: n.as_big(),
            prev: a1,
            last: a2,
        })
    }

    /// Current consecutive-term pair.
    pub fn pair(&self) -> (&Term, &Term) {
        (&self.prev, &self.last)
    }
}

impl Iterator for Steps {
    type Item = StepRecord;

    fn next(&mut self) -> Option<StepRecord> {
        let sum = &self.prev + &self.last;
        let (c, power) = strip_generic(sum, &self.big_n);
        let residue = self.n.residue(&c);
        self.prev = std::mem::replace(&mut self.last, c.clone());
        Some(StepRecord {
            term: c,
            power,
            residue,
        })
    }
}

/// A finite n-free run together with per-step division data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRun {
    modulus: Modulus,
    steps: Vec<StepRecord>,
}

impl SequenceRun {
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> (&Term, &Term) {
        (&self.steps[0].term, &self.steps[1].term)
    }

    /// 1-based term access.
    pub fn term(&self, k: usize) -> &Term {
        &self.steps[k - 1].term
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> + '_ {
        self.steps.iter().map(|s| &s.term)
    }

    pub fn to_terms(&self) -> Vec<Term> {
        self.terms().cloned().collect()
    }

    pub fn powers(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.power).collect()
    }

    /// Remainder trace `a_k mod n`.
    pub fn remainders(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.residue).collect()
    }

    pub fn signature(&self) -> Signature {
        crate::construct::signature_of(self)
    }
}

/// Generates the first `count` terms of the n-free sequence starting `a1, a2`.
pub fn generate(a1: Term, a2: Term, n: Modulus, count: usize) -> Result<SequenceRun> {
    if count < 2 {
        return Err(Error::DegenerateInput(format!(
            "a run needs at least 2 terms, got {count}"
        )));
    }
    let steps_iter = Steps::new(a1.clone(), a2.clone(), n)?;
    let mut steps = Vec::with_capacity(count);
    steps.push(StepRecord::start(a1, n));
    steps.push(StepRecord::start(a2, n));
    steps.extend(steps_iter.take(count - 2));
    Ok(SequenceRun { modulus: n, steps })
}
