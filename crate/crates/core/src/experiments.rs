//! Monte-Carlo growth estimates and the closed-form constants of the
//! probabilistic growth models for `n = 3` and `n = 4`.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fibmod;
use crate::sequence::{generate, Modulus, SequenceRun};

/// How per-index values are pooled across trials before the log-linear fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    /// Mean of the terms themselves, then its logarithm.
    #[default]
    Terms,
    /// Mean of the logarithms of the terms.
    LogTerms,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub n: Modulus,
    pub trials: usize,
    /// Terms per trial, including the two starting terms.
    pub length: usize,
    pub init_low: u64,
    pub init_high: u64,
    pub master_seed: u64,
    /// Indices `<= tail_skip` are left out of the fit.
    pub tail_skip: usize,
    pub averaging: Averaging,
}

impl ExperimentConfig {
    /// 10000 runs of 500 terms, starts uniform in `[1, 1000]`.
    pub fn paper(n: Modulus, master_seed: u64) -> Self {
        ExperimentConfig {
            n,
            trials: 10_000,
            length: 500,
            init_low: 1,
            init_high: 1000,
            master_seed,
            tail_skip: 50,
            averaging: Averaging::Terms,
        }
    }

    /// 1000 runs of 300 terms; fast enough for CI.
    pub fn desk(n: Modulus, master_seed: u64) -> Self {
        ExperimentConfig {
            trials: 1000,
            length: 300,
            ..Self::paper(n, master_seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.length < self.tail_skip + 10 {
            return Err(Error::InvalidConfig(format!(
                "length {} must be at least tail_skip + 10 = {}",
                self.length,
                self.tail_skip + 10
            )));
        }
        if self.init_low == 0 || self.init_low > self.init_high {
            return Err(Error::InvalidConfig(format!(
                "bad start range [{}, {}]",
                self.init_low, self.init_high
            )));
        }
        Ok(())
    }

    /// The run for one trial. Depends only on the seed and trial index.
    pub fn trial_run(&self, trial: usize) -> SequenceRun {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(trial as u64);
        let a1 = rng.random_range(self.init_low..=self.init_high);
        let a2 = rng.random_range(self.init_low..=self.init_high);
        generate(a1.into(), a2.into(), self.n, self.length).expect("positive start")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub n: u64,
    /// Per-step growth factor `exp(slope)`.
    pub g: f64,
    /// Standard error of `g` (delta method on the slope).
    pub stderr: f64,
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub trials_used: usize,
    pub length: usize,
    pub seed: u64,
    pub averaging: Averaging,
}

/// Natural log of a big integer, without overflowing `f64`.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub residual_rms: f64,
}

/// Ordinary least squares `y = intercept + slope·x`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 3, "need at least 3 points");
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    LineFit {
        slope,
        intercept,
        slope_stderr: (ssr / (m - 2.0) / sxx).sqrt(),
        residual_rms: (ssr / m).sqrt(),
    }
}

const BLOCK: usize = 64;

/// Per-index mean (of terms or of logs, per `config.averaging`), as logs.
///
/// Trials are pooled in fixed blocks and the blocks are combined in order,
/// so the result does not depend on the thread schedule.
pub fn mean_log_profile(config: &ExperimentConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let blocks: Vec<usize> = (0..config.trials).step_by(BLOCK).collect();
    let len = config.length;
    let block_end = |start: usize| (start + BLOCK).min(config.trials);
    let profile = match config.averaging {
        Averaging::Terms => {
            let sums: Vec<Vec<BigUint>> = blocks
                .par_iter()
                .map(|&start| {
                    let mut acc = vec![BigUint::zero(); len];
                    for t in start..block_end(start) {
                        for (a, term) in acc.iter_mut().zip(config.trial_run(t).terms()) {
                            *a += term;
                        }
                    }
                    acc
                })
                .collect();
            let mut total = vec![BigUint::zero(); len];
            for block in sums {
                for (a, b) in total.iter_mut().zip(block) {
                    *a += b;
                }
            }
            let ln_trials = (config.trials as f64).ln();
            total.iter().map(|s| ln_big(s) - ln_trials).collect()
        }
        Averaging::LogTerms => {
            let sums: Vec<Vec<f64>> = blocks
                .par_iter()
                .map(|&start| {
                    let mut acc = vec![0.0; len];
                    for t in start..block_end(start) {
                        for (a, term) in acc.iter_mut().zip(config.trial_run(t).terms()) {
                            *a += ln_big(term);
                        }
                    }
                    acc
                })
                .collect();
            let mut total = vec![0.0; len];
            for block in sums {
                for (a, b) in total.iter_mut().zip(block) {
                    *a += b;
                }
            }
            total.iter().map(|s| s / config.trials as f64).collect()
        }
    };
    Ok(profile)
}

/// Estimates the per-step growth factor `g(n)` by a least-squares line
/// through the pooled log profile past `tail_skip`.
pub fn mc_growth(config: &ExperimentConfig) -> Result<GrowthFit> {
    let profile = mean_log_profile(config)?;
    let xs: Vec<f64> = (config.tail_skip + 1..=config.length).map(|k| k as f64).collect();
    let ys = &profile[config.tail_skip..];
    let fit = fit_line(&xs, ys);
    let g = fit.slope.exp();
    Ok(GrowthFit {
        n: config.n.get(),
        g,
        stderr: g * fit.slope_stderr,
        slope: fit.slope,
        intercept: fit.intercept,
        residual_rms: fit.residual_rms,
        trials_used: config.trials,
        length: config.length,
        seed: config.master_seed,
        averaging: config.averaging,
    })
}

/// Fraction of trials whose last `tail` steps contain no division.
pub fn division_free_tail_fraction(config: &ExperimentConfig, tail: usize) -> Result<f64> {
    config.validate()?;
    if tail + 2 > config.length {
        return Err(Error::InvalidConfig(format!(
            "tail {tail} is longer than the generated part of the run"
        )));
    }
    let hits: usize = (0..config.trials)
        .into_par_iter()
        .filter(|&t| {
            let run = config.trial_run(t);
            run.steps()[config.length - tail..].iter().all(|s| s.power == 0)
        })
        .count();
    Ok(hits as f64 / config.trials as f64)
}

/// Expected divisor per division, `n^{n/(n-1)}`, when a sum divisible by `n`
/// is divisible by `n^k` with probability `n^{1-k}`.
pub fn avg_division_factor(n: Modulus) -> f64 {
    let n = n.get() as f64;
    n.powf(n / (n - 1.0))
}

/// Average division per step, `n^{n/((n-1)·a)}`, for `a` average steps
/// between divisions.
pub fn avg_division_per_step(n: Modulus, a: Ratio<u64>) -> f64 {
    let a = *a.numer() as f64 / *a.denom() as f64;
    let n = n.get() as f64;
    n.powf(n / ((n - 1.0) * a))
}

/// Growth of `x_k = (x_{k-1} + x_{k-2}) / d`: the positive root of `d·t² = t + 1`.
pub fn recurrence_growth(d: f64) -> Result<f64> {
    if !d.is_finite() || d <= 0.0 {
        return Err(Error::Domain(format!("division factor must be positive, got {d}")));
    }
    Ok((1.0 + (1.0 + 4.0 * d).sqrt()) / (2.0 * d))
}

/// A term of the coin-flip model as `(c1·a1 + c2·a2)`.
type Form = (Ratio<u64>, Ratio<u64>);

fn add(x: Form, y: Form) -> Form {
    (x.0 + y.0, x.1 + y.1)
}

fn div(x: Form, d: u64) -> Form {
    (x.0 / d, x.1 / d)
}

/// Coin-flip model for 3-free runs: heads appends `(x+y)/5`; tails appends
/// `x+y` and then divides the following sum by 5.
fn flip(terms: &mut Vec<Form>, heads: bool) {
    let last = |t: &Vec<Form>| (t[t.len() - 2], t[t.len() - 1]);
    if heads {
        let (x, y) = last(terms);
        terms.push(div(add(x, y), 5));
    } else {
        let (x, y) = last(terms);
        terms.push(add(x, y));
        let (x, y) = last(terms);
        terms.push(div(add(x, y), 5));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model3Bound {
    /// `(2·3·7·13)^{1/4} / 5`.
    pub closed_form: f64,
    /// Bound on the larger of the last two terms, relative to the larger
    /// start, after heads-heads, heads-tails, tails-heads and tails-tails.
    pub case_bounds: [Ratio<u64>; 4],
}

pub fn model3_bound() -> Model3Bound {
    let one = Ratio::from_integer(1);
    let zero = Ratio::from_integer(0);
    let mut case_bounds = [zero; 4];
    for (i, (f1, f2)) in [(true, true), (true, false), (false, true), (false, false)]
        .into_iter()
        .enumerate()
    {
        let mut terms: Vec<Form> = vec![(one, zero), (zero, one)];
        flip(&mut terms, f1);
        flip(&mut terms, f2);
        let k = terms.len();
        // Both coefficients are non-negative, so a1 = a2 = M is the worst case.
        case_bounds[i] = terms[k - 2..].iter().map(|(c1, c2)| c1 + c2).max().expect("two terms");
    }
    let product: f64 = case_bounds
        .iter()
        .map(|r| *r.numer() as f64 / *r.denom() as f64)
        .product();
    Model3Bound {
        closed_form: product.powf(0.25),
        case_bounds,
    }
}

/// Geometric-mean growth per flip pair over `pairs` random flip pairs, each
/// scaling the bound by the factor of its case.
pub fn simulate_model3(pairs: usize, seed: u64) -> f64 {
    let bounds = model3_bound()
        .case_bounds
        .map(|r| (*r.numer() as f64 / *r.denom() as f64).ln());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = (0..pairs).map(|_| bounds[rng.random_range(0..4)]).sum();
    (total / pairs as f64).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model4Bound {
    /// Lower bound on the growth of the larger of the last two terms from
    /// one division to the next when `b > a`.
    pub r_up: f64,
    /// The same bound when `b <= a`.
    pub r_down: f64,
    /// `r_up² · r_down`.
    pub overall: f64,
}

impl Model4Bound {
    /// Geometric mean of the three division-to-division factors.
    pub fn per_division_growth(&self) -> f64 {
        self.overall.cbrt()
    }
}

/// Growth bounds of the 4-free model that divides by `x = 4^{4/3}` whenever
/// a division is due, with continuations of 1, 3 or 4 terms equally likely.
pub fn model4_bound() -> Model4Bound {
    let x = avg_division_factor(Modulus::new(4).expect("4 >= 2"));
    let r_up = (((x + 2.0) + 2.0 / (x + 1.0)) / x * (((2.0 * x + 3.0) + 3.0 / (x + 1.0)) / x)).cbrt();
    let denom = (1.0 + x) * x * x;
    let r_down = ((2.0 + 2.0 * x + x * x) / denom
        * ((3.0 * x * x + 6.0 * x + 4.0) / denom)
        * ((5.0 * x * x + 10.0 * x + 6.0) / denom))
        .cbrt();
    Model4Bound {
        r_up,
        r_down,
        overall: r_up * r_up * r_down,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub n: u64,
    pub fit: GrowthFit,
    pub entry_point: u64,
    pub omni_factor: bool,
    /// Not applicable (divisions stop) for non-omni-factors.
    pub avg_steps: Option<Ratio<u64>>,
    pub avg_division: Option<f64>,
    pub recurrence_growth: Option<f64>,
}

/// One row per `n`: Monte-Carlo growth alongside the model columns.
/// `base` supplies everything but `n`.
pub fn growth_table(ns: &[u64], base: &ExperimentConfig) -> Result<Vec<GrowthRow>> {
    ns.iter()
        .map(|&n| {
            let modulus = Modulus::new(n)?;
            let fit = mc_growth(&ExperimentConfig {
                n: modulus,
                ..base.clone()
            })?;
            let omni = fibmod::is_omni_factor(n)?.omni_factor;
            let (avg_steps, avg_division, recurrence) = if omni {
                let a = fibmod::avg_steps_between_divisions(n)?;
                let d = avg_division_per_step(modulus, a);
                (Some(a), Some(d), Some(recurrence_growth(d)?))
            } else {
                (None, None, None)
            };
            Ok(GrowthRow {
                n,
                fit,
                entry_point: fibmod::entry_point(n)?,
                omni_factor: omni,
                avg_steps,
                avg_division,
                recurrence_growth: recurrence,
            })
        })
        .collect()
}
