//! `freefib`: generate n-free Fibonacci runs, find their cycles, build runs
//! backwards, classify moduli and estimate growth rates.

mod manifest;
mod output;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};

use freefib::construct::{
    adjust_positive, build_division_rich, build_from_prescription, division_poor_prescription, predecessor_chain,
};
use freefib::experiments::{
    avg_division_factor, avg_division_per_step, growth_table, model3_bound, model4_bound, recurrence_growth,
    simulate_model3, Averaging, ExperimentConfig,
};
use freefib::{
    cycle::DEFAULT_BUDGET, detect_cycle, fibmod, generate, oeis, CycleOutcome, Error, Modulus, RemainderPrescription,
    Result, Signature,
};
use output::{join, show, Format, Report};

#[derive(Parser, Debug)]
#[command(
    name = "freefib",
    version,
    about = "Fibonacci-like sequences with powers of n divided out"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Print at most this many leading digits of large numbers.
    #[arg(long, global = true)]
    digits: Option<usize>,
    /// File of `flag = value` lines; flags on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the first terms of a run.
    Gen(GenArgs),
    /// Find the cycle a run falls into.
    Cycle(CycleArgs),
    /// Build runs backwards from their last two terms.
    #[command(subcommand)]
    Construct(Construct),
    /// Omni-factor table for 1..=max.
    Classify(ClassifyArgs),
    /// Orbits of the pair map (a, b) -> (b, a + b) mod n.
    Orbits(OrbitsArgs),
    /// Terms of a supported OEIS sequence.
    Oeis(OeisArgs),
    /// Growth experiments and model constants.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: u64,
    /// First two terms, `a,b`.
    #[arg(long, value_parser = parse_pair::<BigUint>)]
    start: Pair<BigUint>,
    #[arg(long, default_value_t = 20)]
    count: usize,
}

#[derive(Args, Debug)]
struct CycleArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, value_parser = parse_pair::<BigUint>)]
    start: Pair<BigUint>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Subcommand, Debug)]
enum Construct {
    /// Every step divides, by the smallest power keeping terms positive.
    Rich {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        length: usize,
        #[arg(long, value_parser = parse_pair::<BigUint>)]
        terminal: Pair<BigUint>,
    },
    /// Divide by n at the last step and every other step before it.
    Poor {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        length: usize,
        /// Last two terms; their remainders fix the prescription.
        #[arg(long, value_parser = parse_pair::<BigInt>)]
        terminal: Pair<BigInt>,
        /// Lift to a positive run using multiples of n^M.
        #[arg(long, value_name = "M")]
        adjust: Option<u32>,
    },
    /// Realise a remainder sequence and signature.
    Prescription {
        #[arg(long)]
        n: u64,
        /// Comma-separated remainders mod n.
        #[arg(long, value_parser = parse_list::<u64>)]
        remainders: List<u64>,
        /// Comma-separated powers of n, `*` for the first two places.
        #[arg(long)]
        powers: String,
        #[arg(long, value_parser = parse_pair::<BigInt>)]
        terminal: Pair<BigInt>,
        #[arg(long, value_name = "M")]
        adjust: Option<u32>,
    },
    /// Minimal 2-free predecessors, listed from the given pair backwards.
    Predecessor {
        #[arg(long, value_parser = parse_pair::<BigUint>)]
        start: Pair<BigUint>,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Shift a raw (possibly negative) run to positive terms.
    Adjust {
        #[arg(long)]
        n: u64,
        #[arg(long, value_name = "M")]
        m: u32,
        #[arg(long, value_parser = parse_list::<BigInt>, allow_hyphen_values = true)]
        raw: List<BigInt>,
    },
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long, default_value_t = 50)]
    max: u64,
}

#[derive(Args, Debug)]
struct OrbitsArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = fibmod::DEFAULT_ORBIT_CAP)]
    cap: u64,
    /// Print the division-free successor of each remainder instead.
    #[arg(long)]
    successors: bool,
}

#[derive(Args, Debug)]
struct OeisArgs {
    #[arg(long)]
    id: String,
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Write a b-file here instead of printing.
    #[arg(long, value_name = "PATH")]
    bfile: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AveragingArg {
    Terms,
    LogTerms,
}

impl From<AveragingArg> for Averaging {
    fn from(a: AveragingArg) -> Self {
        match a {
            AveragingArg::Terms => Averaging::Terms,
            AveragingArg::LogTerms => Averaging::LogTerms,
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// 10000 runs of 500 terms instead of 1000 of 300.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    init_high: Option<u64>,
    #[arg(long)]
    tail_skip: Option<usize>,
    #[arg(long, value_enum, default_value_t = AveragingArg::Terms)]
    averaging: AveragingArg,
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Monte-Carlo growth rate for each n.
    Growth {
        /// Moduli, e.g. `4,6,7` or `2-50`.
        #[arg(long, value_parser = parse_moduli, default_value = "4,5,6,7,8,9,10,11,14")]
        n: List<u64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Entry point, average steps between divisions and the growth they predict.
    Table3 {
        #[arg(long, value_parser = parse_moduli, default_value = "4,6,7,9,14,23,27,43,49")]
        n: List<u64>,
        /// Add a Monte-Carlo growth column.
        #[arg(long)]
        mc: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Constants of the probabilistic growth models.
    Models {
        /// Also sample the 3-free coin-flip model.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        pairs: usize,
    },
}

#[derive(Debug, Clone)]
struct Pair<T>(T, T);

#[derive(Debug, Clone)]
struct List<T>(Vec<T>);

fn parse_list<T: std::str::FromStr>(s: &str) -> std::result::Result<List<T>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|_| format!("cannot parse `{}`", x.trim()))
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(List)
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> std::result::Result<Pair<T>, String> {
    let List(mut v) = parse_list::<T>(s)?;
    if v.len() != 2 {
        return Err(format!("expected two comma-separated values, got {}", v.len()));
    }
    let b = v.pop().expect("two values");
    let a = v.pop().expect("two values");
    Ok(Pair(a, b))
}

/// Comma-separated values and inclusive `lo-hi` ranges.
fn parse_moduli(s: &str) -> std::result::Result<List<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let num = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("cannot parse `{x}`"));
        match part.split_once('-') {
            Some((lo, hi)) => out.extend(num(lo)?..=num(hi)?),
            None => out.push(num(part)?),
        }
    }
    Ok(List(out))
}

fn modulus(n: u64) -> Result<Modulus> {
    Modulus::new(n)
}

struct Ctx {
    digits: Option<usize>,
}

impl Ctx {
    fn show(&self, x: &impl std::fmt::Display) -> String {
        show(x, self.digits)
    }
}

fn terms_report<T: std::fmt::Display>(ctx: &Ctx, terms: &[T]) -> Report {
    let mut r = Report::table(&["index", "term"]);
    for (i, t) in terms.iter().enumerate() {
        r.row(vec![(i + 1).to_string(), ctx.show(t)]);
        r.line(ctx.show(t));
    }
    r
}

fn gen(ctx: &Ctx, a: GenArgs) -> Result<Report> {
    let run = generate(a.start.0, a.start.1, modulus(a.n)?, a.count)?;
    let mut r = Report::table(&["index", "term", "power", "residue"]);
    for (i, s) in run.steps().iter().enumerate() {
        r.row(vec![
            (i + 1).to_string(),
            ctx.show(&s.term),
            s.power.to_string(),
            s.residue.to_string(),
        ]);
        r.line(ctx.show(&s.term));
    }
    Ok(r)
}

fn cycle(ctx: &Ctx, a: CycleArgs) -> Result<Report> {
    let outcome = detect_cycle(&a.start.0, &a.start.1, modulus(a.n)?, a.budget)?;
    let mut r = Report::table(&["outcome", "preperiod", "period", "content_gcd", "cycle"]);
    match outcome {
        CycleOutcome::Cycle(c) => {
            let terms = join(&c.cycle_terms, |t| ctx.show(t));
            r.row(vec![
                "cycle".into(),
                c.preperiod.to_string(),
                c.period.to_string(),
                ctx.show(&c.content_gcd),
                terms.clone(),
            ]);
            r.line(format!("preperiod {}", c.preperiod));
            r.line(format!("period {}", c.period));
            r.line(format!("cycle {terms}"));
            r.line(format!("content_gcd {}", ctx.show(&c.content_gcd)));
        }
        CycleOutcome::Exhausted { budget, last_pair } => {
            r.row(vec![
                "exhausted".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
            r.line(format!("no cycle within {budget} steps"));
            r.line(format!(
                "last pair {},{}",
                ctx.show(&last_pair.0),
                ctx.show(&last_pair.1)
            ));
        }
    }
    Ok(r)
}

fn signed_report(ctx: &Ctx, raw: &[BigInt], signature: &Signature, adjusted: Option<Vec<BigUint>>) -> Report {
    let mut headers = vec!["index", "raw", "divisor"];
    if adjusted.is_some() {
        headers.push("adjusted");
    }
    let mut r = Report::table(&headers);
    let divisors: Vec<String> = signature.to_string().split(", ").map(str::to_string).collect();
    for (i, t) in raw.iter().enumerate() {
        let mut row = vec![(i + 1).to_string(), ctx.show(t), divisors[i].clone()];
        if let Some(adj) = &adjusted {
            row.push(ctx.show(&adj[i]));
        }
        r.row(row);
    }
    r.line(format!("raw {}", join(raw, |t| ctx.show(t))));
    r.line(format!("signature {signature}"));
    if let Some(adj) = &adjusted {
        r.line(format!("adjusted {}", join(adj, |t| ctx.show(t))));
    }
    r
}

fn realise(ctx: &Ctx, p: &RemainderPrescription, terminal: &Pair<BigInt>, adjust: Option<u32>) -> Result<Report> {
    let raw = build_from_prescription(p, (&terminal.0, &terminal.1))?;
    let adjusted = adjust
        .map(|m| adjust_positive(&raw, p.modulus(), m).map(|run| run.to_terms()))
        .transpose()?;
    Ok(signed_report(ctx, &raw, &p.signature, adjusted))
}

fn residue(x: &BigInt, n: u64) -> u64 {
    let n = BigInt::from(n);
    let r = ((x % &n) + &n) % &n;
    u64::try_from(r).expect("residue below n")
}

fn parse_powers(s: &str) -> std::result::Result<Vec<Option<u32>>, Error> {
    s.split(',')
        .map(str::trim)
        .map(|x| match x {
            "*" => Ok(None),
            _ => x
                .parse()
                .map(Some)
                .map_err(|_| Error::DegenerateInput(format!("bad power `{x}`"))),
        })
        .collect()
}

fn construct(ctx: &Ctx, c: Construct) -> Result<Report> {
    match c {
        Construct::Rich { n, length, terminal } => {
            let run = build_division_rich(modulus(n)?, length, (&terminal.0, &terminal.1))?;
            let mut r = Report::table(&["index", "term", "power"]);
            for (i, s) in run.steps().iter().enumerate() {
                r.row(vec![(i + 1).to_string(), ctx.show(&s.term), s.power.to_string()]);
                r.line(ctx.show(&s.term));
            }
            Ok(r)
        }
        Construct::Poor {
            n,
            length,
            terminal,
            adjust,
        } => {
            let rem = (residue(&terminal.0, n), residue(&terminal.1, n));
            let p = division_poor_prescription(modulus(n)?, length, rem)?;
            realise(ctx, &p, &terminal, adjust)
        }
        Construct::Prescription {
            n,
            remainders,
            powers,
            terminal,
            adjust,
        } => {
            let sig = Signature::from_powers(modulus(n)?, &parse_powers(&powers)?);
            let p = RemainderPrescription::new(remainders.0, sig)?;
            realise(ctx, &p, &terminal, adjust)
        }
        Construct::Predecessor { start, count } => {
            Ok(terms_report(ctx, &predecessor_chain(&start.0, &start.1, count)?))
        }
        Construct::Adjust { n, m, raw } => {
            let run = adjust_positive(&raw.0, modulus(n)?, m)?;
            let terms = run.to_terms();
            Ok(signed_report(ctx, &raw.0, &run.signature(), Some(terms)))
        }
    }
}

fn classify(a: ClassifyArgs) -> Result<Report> {
    let mut r = Report::table(&["n", "omni_factor", "entry_point", "lucas_divides", "witness"]);
    let mut non_omni = Vec::new();
    for n in 1..=a.max {
        let c = fibmod::is_omni_factor(n)?;
        let witness = c.witness_start.map(|(x, y)| format!("{x} {y}")).unwrap_or_default();
        r.row(vec![
            n.to_string(),
            c.omni_factor.to_string(),
            fibmod::entry_point(n)?.to_string(),
            (!c.lucas_witness).to_string(),
            witness,
        ]);
        if !c.omni_factor {
            non_omni.push(n);
        }
    }
    r.plain.push(r.headers.join(" "));
    r.plain
        .extend(r.rows.iter().map(|row| row.join(" ").trim_end().to_string()));
    r.line(format!("non-omni {}", join(&non_omni, u64::to_string)));
    Ok(r)
}

fn orbits(a: OrbitsArgs) -> Result<Report> {
    if a.successors {
        let mut r = Report::table(&["remainder", "successors"]);
        for (k, v) in fibmod::division_free_successors(a.n)? {
            let v: Vec<u64> = v.into_iter().collect();
            r.row(vec![k.to_string(), join(&v, u64::to_string)]);
        }
        return Ok(r);
    }
    let d = fibmod::orbit_decomposition_with_cap(a.n, a.cap)?;
    let mut r = Report::table(&["start", "length", "contains_zero"]);
    for o in &d.orbits {
        r.row(vec![
            format!("{} {}", o.start.0, o.start.1),
            o.length.to_string(),
            o.contains_zero.to_string(),
        ]);
    }
    let (with, without) = fibmod::count_zero_pairs(a.n)?;
    r.plain.push(r.headers.join(" "));
    r.plain.extend(r.rows.iter().map(|row| row.join(" ")));
    r.line(format!(
        "cycles {} distinct_lengths {}",
        d.cycle_count(),
        d.distinct_lengths()
    ));
    r.line(format!("pairs_meeting_zero {with} pairs_avoiding_zero {without}"));
    Ok(r)
}

fn oeis_cmd(ctx: &Ctx, a: OeisArgs) -> Result<Report> {
    if let Some(path) = &a.bfile {
        oeis::export_bfile(&a.id, a.count, path)?;
        let mut r = Report::table(&["id", "count", "path"]);
        let id = oeis::descriptor(&a.id)?.id;
        r.row(vec![id.into(), a.count.to_string(), path.display().to_string()]);
        r.line(format!("wrote {} terms of {id} to {}", a.count, path.display()));
        return Ok(r);
    }
    let d = oeis::descriptor(&a.id)?;
    let values = oeis::emit(d.id, a.count)?;
    let mut r = Report::table(&["index", "value"]);
    for (i, v) in values.iter().enumerate() {
        r.row(vec![(d.offset + i as i64).to_string(), ctx.show(v)]);
        r.line(ctx.show(v));
    }
    Ok(r)
}

/// Resolves the seed, recording it in the preamble when it was not given.
fn seed_of(seed: Option<u64>, r: &mut Report) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        r.preamble.push(format!("seed {s}"));
        s
    })
}

fn base_config(run: &RunArgs, seed: u64) -> ExperimentConfig {
    let n = Modulus::new(2).expect("2 >= 2");
    let mut c = if run.full {
        ExperimentConfig::paper(n, seed)
    } else {
        ExperimentConfig::desk(n, seed)
    };
    c.trials = run.trials.unwrap_or(c.trials);
    c.length = run.length.unwrap_or(c.length);
    c.init_high = run.init_high.unwrap_or(c.init_high);
    c.tail_skip = run.tail_skip.unwrap_or(c.tail_skip);
    c.averaging = run.averaging.into();
    c
}

fn fmt4(x: f64) -> String {
    format!("{x:.4}")
}

fn experiment(e: Experiment) -> Result<Report> {
    match e {
        Experiment::Growth { n, run } => {
            let mut r = Report::default();
            let seed = seed_of(run.seed, &mut r);
            let base = base_config(&run, seed);
            r.headers = vec!["n", "g", "stderr", "omni_factor", "trials", "length", "seed"];
            for row in growth_table(&n.0, &base)? {
                r.row(vec![
                    row.n.to_string(),
                    fmt4(row.fit.g),
                    fmt4(row.fit.stderr),
                    row.omni_factor.to_string(),
                    row.fit.trials_used.to_string(),
                    row.fit.length.to_string(),
                    row.fit.seed.to_string(),
                ]);
            }
            Ok(r)
        }
        Experiment::Table3 { n, mc, run } => {
            let mut r = Report::table(&["n", "entry_point", "avg_steps", "avg_division", "recurrence_growth"]);
            let mut growth = None;
            if mc {
                let seed = seed_of(run.seed, &mut r);
                r.headers.push("mc_growth");
                growth = Some(growth_table(&n.0, &base_config(&run, seed))?);
            }
            for (i, &k) in n.0.iter().enumerate() {
                let m = modulus(k)?;
                let mut row = vec![k.to_string(), fibmod::entry_point(k)?.to_string()];
                match fibmod::avg_steps_between_divisions(k) {
                    Ok(a) => {
                        let d = avg_division_per_step(m, a);
                        row.extend([a.to_string(), fmt4(d), fmt4(recurrence_growth(d)?)]);
                    }
                    Err(Error::Divergence(_)) => row.extend(["diverges".to_string(), String::new(), String::new()]),
                    Err(e) => return Err(e),
                }
                if let Some(g) = &growth {
                    row.push(fmt4(g[i].fit.g));
                }
                r.row(row);
            }
            Ok(r)
        }
        Experiment::Models { seed, pairs } => {
            let mut r = Report::table(&["constant", "value"]);
            let m3 = model3_bound();
            let m4 = model4_bound();
            let mut add = |name: &str, value: String| r.row(vec![name.to_string(), value]);
            add("division_factor_3", fmt4(avg_division_factor(Modulus::new(3)?)));
            add("division_factor_4", fmt4(avg_division_factor(Modulus::new(4)?)));
            add("model3_closed_form", format!("{:.6}", m3.closed_form));
            for (name, b) in ["hh", "ht", "th", "tt"].iter().zip(m3.case_bounds) {
                add(&format!("model3_case_{name}"), b.to_string());
            }
            add("model4_r_up", format!("{:.6}", m4.r_up));
            add("model4_r_down", format!("{:.6}", m4.r_down));
            add("model4_overall", format!("{:.6}", m4.overall));
            add("model4_per_division", format!("{:.6}", m4.per_division_growth()));
            if let Some(seed) = seed {
                add("model3_sampled", format!("{:.6}", simulate_model3(pairs, seed)));
            }
            Ok(r)
        }
    }
}

fn run(cli: Cli) -> Result<Report> {
    let ctx = Ctx { digits: cli.digits };
    match cli.command {
        Command::Gen(a) => gen(&ctx, a),
        Command::Cycle(a) => cycle(&ctx, a),
        Command::Construct(c) => construct(&ctx, c),
        Command::Classify(a) => classify(a),
        Command::Orbits(a) => orbits(a),
        Command::Oeis(a) => oeis_cmd(&ctx, a),
        Command::Experiment(e) => experiment(e),
    }
}

fn command() -> clap::Command {
    fn overriding(cmd: clap::Command) -> clap::Command {
        cmd.args_override_self(true).mut_subcommands(overriding)
    }
    overriding(Cli::command())
}

/// Index just past the deepest subcommand name in `argv`.
fn subcommand_end(argv: &[OsString]) -> usize {
    let mut cmd = command();
    let mut end = 1;
    for (i, arg) in argv.iter().enumerate().skip(1) {
        let Some(name) = arg.to_str() else { continue };
        if let Some(sub) = cmd.find_subcommand(name).cloned() {
            cmd = sub;
            end = i + 1;
        }
    }
    end
}

fn parse(argv: Vec<OsString>) -> std::result::Result<Cli, clap::Error> {
    let matches = command().try_get_matches_from(&argv)?;
    Cli::from_arg_matches(&matches)
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error[{}]: {e}", e.kind());
    ExitCode::from(1)
}

/// The `--manifest` value, found before full parsing so that required flags
/// may come from the manifest.
fn manifest_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut iter = argv.iter().skip(1);
    while let Some(arg) = iter.next() {
        let arg = arg.to_str()?;
        if arg == "--" {
            return None;
        }
        if arg == "--manifest" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(path) = arg.strip_prefix("--manifest=") {
            return Some(PathBuf::from(path));
        }
    }
    None
}

fn main() -> ExitCode {
    let mut argv: Vec<OsString> = std::env::args_os().collect();
    if let Some(path) = manifest_path(&argv) {
        match manifest::read(&path) {
            Ok(extra) => argv = manifest::splice(&argv, subcommand_end(&argv), extra),
            Err(e) => return fail(e),
        }
    }
    let cli = match parse(argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let format = cli.format;
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    match report.write(format, &mut out).and_then(|()| out.flush()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[io]: {e}");
            ExitCode::from(1)
        }
    }
}
