//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use freefib::construct::{adjust_positive, build_from_prescription, replay_signed};
use freefib::cycle::verify_three_cycle_form;
use freefib::experiments::{
    avg_division_factor, avg_division_per_step, mc_growth, model3_bound, model4_bound, recurrence_growth, Averaging,
    ExperimentConfig,
};
use freefib::{detect_cycle, fibmod, generate, lemmas, oeis, Modulus, RemainderPrescription, Signature};
use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20131122;
const OMNI: [u64; 9] = [4, 6, 7, 9, 14, 23, 27, 43, 49];

fn m(n: u64) -> Modulus {
    Modulus::new(n).unwrap()
}

/// Collects failures for one criterion.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
    checked: usize,
}

impl Check {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn near(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        self.expect((got - want).abs() <= tol, || {
            format!("{label} = {got:.6}, want {want} ± {tol}")
        });
    }

    fn within(&mut self, label: &str, got: f64, lo: f64, hi: f64) {
        self.expect((lo..=hi).contains(&got), || {
            format!("{label} = {got:.6}, want [{lo}, {hi}]")
        });
    }
}

fn small(id: &str, count: usize) -> Vec<u64> {
    oeis::emit(id, count)
        .unwrap()
        .iter()
        .map(|v| v.to_u64().unwrap())
        .collect()
}

fn golden_prefixes(c: &mut Check) {
    let cases: [(&str, &[u64]); 8] = [
        ("A224382", &[0, 1, 1, 2, 3, 5, 2, 7, 9, 1, 10, 11, 21, 2, 23, 25]),
        ("A214684", &[0, 1, 1, 2, 3, 1, 4, 1, 1, 2]),
        ("A230457", &[5, 8, 10, 11, 12, 13, 15]),
        ("A230359", &[5, 11, 13]),
        (
            "A232658",
            &[
                11, 18, 19, 22, 29, 31, 38, 41, 44, 46, 47, 54, 58, 59, 62, 71, 76, 79, 82, 94,
            ],
        ),
        ("A233525", &[1, 1, 2, 1, 5, 4, 11, 1, 32, 49]),
        ("A233526", &[1, 3, 1, 5, 3, 7, 5, 9, 1]),
        ("A000032", &[2, 1, 3, 4, 7, 11]),
    ];
    for (id, want) in cases {
        let got = small(id, want.len());
        c.expect(got == want, || format!("{id}: {got:?}"));
    }
}

fn exact_analytics(c: &mut Check) {
    c.expect(fibmod::entry_point(10).unwrap() == 15, || "Z(10)".into());
    c.expect(fibmod::entry_point(5).unwrap() == 5, || "Z(5)".into());
    let zs: Vec<u64> = OMNI.iter().map(|&n| fibmod::entry_point(n).unwrap()).collect();
    c.expect(zs == [6, 12, 8, 12, 24, 24, 36, 44, 56], || {
        format!("entry points {zs:?}")
    });
    c.expect(fibmod::pisano_period(3).unwrap() == 8, || "pi(3)".into());
    for (n, want) in [(5, 4), (8, 24), (59, 116)] {
        let got = fibmod::count_zero_pairs(n).unwrap().1;
        c.expect(got == want, || format!("zero-free pairs mod {n} = {got}, want {want}"));
    }
    let census = fibmod::orbit_decomposition(8).unwrap().lengths();
    c.expect(census == [1, 3, 6, 6, 6, 6, 6, 6, 12, 12], || {
        format!("orbit lengths mod 8 = {census:?}, want [1, 3, 6x6, 12, 12]")
    });
    let table: BTreeMap<u64, BTreeSet<u64>> = [
        (1, vec![3, 4, 5, 6]),
        (2, vec![1, 5]),
        (3, vec![1, 2, 4, 7]),
        (4, vec![1, 3, 5, 7]),
        (5, vec![1, 4, 6, 7]),
        (6, vec![3, 7]),
        (7, vec![2, 3, 4, 5]),
    ]
    .into_iter()
    .map(|(k, v)| (k, v.into_iter().collect()))
    .collect();
    let got = fibmod::division_free_successors(8).unwrap();
    c.expect(got == table, || format!("successors mod 8 = {got:?}"));
}

fn exact_rationals(c: &mut Check) {
    let want = [
        (8, 3),
        (6, 1),
        (7, 2),
        (45, 8),
        (154, 13),
        (23, 2),
        (459, 26),
        (43, 2),
        (441, 16),
    ];
    for (&n, (p, q)) in OMNI.iter().zip(want) {
        let got = fibmod::avg_steps_between_divisions(n).unwrap();
        c.expect(got == Ratio::new(p, q), || format!("n = {n}: {got}, want {p}/{q}"));
    }
}

fn model_constants(c: &mut Check) {
    c.within("division factor n=3", avg_division_factor(m(3)), 5.19, 5.20);
    c.within("division factor n=4", avg_division_factor(m(4)), 6.34, 6.36);
    let b3 = model3_bound().closed_form;
    c.expect((0.966..0.97).contains(&b3), || {
        format!("3-free model bound = {b3:.6}, want [0.966, 0.97)")
    });
    let b4 = model4_bound();
    c.near("4-free r_up", b4.r_up, 1.51023, 1e-4);
    c.near("4-free r_down", b4.r_down, 0.453822, 1e-5);
    c.near("4-free overall", b4.overall, 1.03507, 1e-4);
    let a4 = fibmod::avg_steps_between_divisions(4).unwrap();
    c.near("division per step n=4", avg_division_per_step(m(4), a4), 2.00, 0.005);
    let want = [1.0, 1.26, 1.03, 1.19, 1.36, 1.32, 1.41, 1.42, 1.46];
    for (&n, want) in OMNI.iter().zip(want) {
        let a = fibmod::avg_steps_between_divisions(n).unwrap();
        let g = recurrence_growth(avg_division_per_step(m(n), a)).unwrap();
        c.near(&format!("recurrence growth n={n}"), g, want, 0.01);
    }
}

fn monte_carlo(c: &mut Check) -> f64 {
    let mut g4 = f64::NAN;
    for (n, want) in [(4, 1.32), (6, 1.42), (7, 1.34), (9, 1.40), (14, 1.49)] {
        let fit = mc_growth(&ExperimentConfig {
            averaging: Averaging::Terms,
            ..ExperimentConfig::desk(m(n), SEED)
        })
        .unwrap();
        if n == 4 {
            g4 = fit.g;
        }
        c.near(&format!("g({n})"), fit.g, want, 0.03);
    }
    for n in [5, 8, 10, 11] {
        let fit = mc_growth(&ExperimentConfig::desk(m(n), SEED)).unwrap();
        c.within(&format!("g({n})"), fit.g, 1.58, 1.63);
    }
    g4
}

/// Remainders chosen forward; a division happens exactly where the sum vanishes.
fn fuzz_prescription(rng: &mut ChaCha8Rng) -> (u64, Vec<u64>, Vec<Option<u32>>) {
    let n = rng.random_range(2..=7u64);
    let len = rng.random_range(3..=12usize);
    let mut r = vec![rng.random_range(0..n), rng.random_range(1..n)];
    let mut powers = vec![None, None];
    while r.len() < len {
        let sum = (r[r.len() - 2] + r[r.len() - 1]) % n;
        if sum == 0 {
            powers.push(Some(rng.random_range(1..=3)));
            r.push(rng.random_range(1..n));
        } else {
            powers.push(Some(0));
            r.push(sum);
        }
    }
    (n, r, powers)
}

fn property_suites(c: &mut Check) {
    let mut slow = Vec::new();
    for a in 1u64..=100 {
        for b in 1u64..=100 {
            let outcome = detect_cycle(&a.into(), &b.into(), m(2), 100_000).unwrap();
            let settled = outcome.cycle().map(|r| r.preperiod);
            if settled.is_none_or(|p| p as u64 > a.max(b)) {
                slow.push((a, b, settled));
            }
        }
    }
    c.expect(slow.is_empty(), || {
        format!(
            "2-free: {} starts take more than max(a1, a2) steps to settle, first {:?}",
            slow.len(),
            slow[0]
        )
    });

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..200 {
        let (a, b) = (rng.random_range(1..=1000u64), rng.random_range(1..=1000u64));
        let outcome = detect_cycle(&a.into(), &b.into(), m(3), 100_000).unwrap();
        let ok = outcome.cycle().is_some_and(|r| {
            r.period == 3
                && verify_three_cycle_form(&r.cycle_terms).unwrap()
                && Some(&r.content_gcd) == r.cycle_terms.iter().min()
        });
        c.expect(ok, || format!("3-free start ({a}, {b})"));
    }

    for n in 3..=12u64 {
        let d = fibmod::cycle_length_divisor(n).unwrap() as usize;
        for _ in 0..30 {
            let (a, b) = (rng.random_range(1..=200u64), rng.random_range(1..=200u64));
            if let Some(r) = detect_cycle(&a.into(), &b.into(), m(n), 20_000).unwrap().cycle() {
                c.expect(r.period % d == 0, || {
                    format!("n = {n}, ({a}, {b}): period {}", r.period)
                });
            }
        }
    }

    for _ in 0..100 {
        let (a, b) = (rng.random_range(1..=1_000_000u64), rng.random_range(1..=1_000_000u64));
        let run = generate(a.into(), b.into(), m(4), 500).unwrap();
        let ok = lemmas::four_free_parity(&run).is_ok() && lemmas::contains_odd(&run).is_ok();
        c.expect(ok, || format!("4-free parity ({a}, {b})"));
    }

    for _ in 0..500 {
        let (n, r, powers) = fuzz_prescription(&mut rng);
        let len = r.len();
        let p = RemainderPrescription::new(r.clone(), Signature::from_powers(m(n), &powers)).unwrap();
        let prev = BigInt::from(r[len - 2]) + BigInt::from(n) * rng.random_range(0..3i64);
        let last = BigInt::from(r[len - 1]) + BigInt::from(n) * rng.random_range(-2..3i64);
        let raw = build_from_prescription(&p, (&prev, &last)).unwrap();
        let replay = replay_signed(&raw[0], &raw[1], m(n), len).unwrap();
        let round_trip = replay.iter().zip(&raw).all(|(s, t)| s.term == *t)
            && replay.iter().map(|s| s.residue).eq(r.iter().copied())
            && replay
                .iter()
                .zip(&powers)
                .all(|(s, pw)| pw.is_none_or(|pw| pw == s.power));
        c.expect(round_trip, || format!("round trip n = {n}, remainders {r:?}"));
        let total: u32 = powers.iter().flatten().sum();
        let adjusted = adjust_positive(&raw, m(n), total + 1).unwrap();
        c.expect(
            adjusted.signature() == p.signature && adjusted.remainders() == r,
            || format!("adjustment n = {n}, remainders {r:?}"),
        );
    }
}

fn four_free_growth(c: &mut Check, g4: f64) {
    let outcome = detect_cycle(&BigUint::from(0u32), &BigUint::from(1u32), m(4), 100_000).unwrap();
    c.expect(outcome.is_exhausted(), || {
        "4-free run from 0, 1 cycled within 10^5 steps".into()
    });
    c.expect(g4 > 1.25, || format!("g(4) = {g4:.4}, want > 1.25"));
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut report = |id: u32, name: &str, c: Check, started: Instant| {
        let status = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{status} {id} {name}: {}/{} checks ({:.1}s)",
            c.checked - c.failures.len(),
            c.checked,
            started.elapsed().as_secs_f64()
        );
        if !c.failures.is_empty() {
            line.push_str(" | ");
            line.push_str(&c.failures.join("; "));
            all_ok = false;
        }
        println!("{line}");
    };

    let t = Instant::now();
    let mut c = Check::default();
    golden_prefixes(&mut c);
    report(1, "golden prefixes", c, t);

    let t = Instant::now();
    let mut c = Check::default();
    exact_analytics(&mut c);
    report(2, "exact analytics", c, t);

    let t = Instant::now();
    let mut c = Check::default();
    exact_rationals(&mut c);
    report(3, "average steps between divisions", c, t);

    let t = Instant::now();
    let mut c = Check::default();
    model_constants(&mut c);
    report(4, "model constants", c, t);

    let t = Instant::now();
    let mut c = Check::default();
    let g4 = monte_carlo(&mut c);
    report(5, "monte-carlo growth at desk scale", c, t);

    let t = Instant::now();
    let mut c = Check::default();
    property_suites(&mut c);
    report(6, "property suites", c, t);

    let t = Instant::now();
    let mut c = Check::default();
    four_free_growth(&mut c, g4);
    report(7, "4-free runs keep growing", c, t);

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
