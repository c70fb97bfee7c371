//! n-free Fibonacci sequences.
//!
//! Start from two non-negative integers, then repeatedly add the last two
//! terms and divide out the largest power of `n`. This crate generates such
//! runs exactly, detects their cycles, builds runs with prescribed division
//! patterns, analyses the Fibonacci recurrence modulo `n`, and estimates
//! growth rates by simulation.

pub mod construct;
pub mod cycle;
pub mod error;
pub mod experiments;
pub mod fibmod;
pub mod lemmas;
pub mod oeis;
pub mod sequence;

pub use construct::{RemainderPrescription, Signature, SignatureEntry};
pub use cycle::{detect_cycle, primitive_cycle, CycleOutcome, CycleReport};
pub use error::{Error, Result};
pub use sequence::{generate, next_state, strip_powers, Modulus, SequenceRun, StepRecord, Term};
