use std::process::{Command, Output};

fn freefib(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freefib"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = freefib(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn lines(args: &[&str]) -> Vec<String> {
    stdout(args).lines().map(str::to_string).collect()
}

#[test]
fn gen_prints_four_free_numbers() {
    let got = lines(&["gen", "--n", "4", "--start", "0,1", "--count", "16"]);
    assert_eq!(got.join(","), "0,1,1,2,3,5,2,7,9,1,10,11,21,2,23,25");
}

#[test]
fn cycle_reports_period() {
    let got = lines(&["cycle", "--n", "5", "--start", "0,1", "--budget", "1000"]);
    assert!(got.contains(&"period 6".to_string()));
    assert!(got.contains(&"cycle 1,1,2,3,1,4".to_string()));
}

#[test]
fn cycle_budget_exhaustion() {
    let got = stdout(&["cycle", "--n", "4", "--start", "0,1", "--budget", "500"]);
    assert!(got.starts_with("no cycle within 500 steps"));
}

#[test]
fn classify_lists_non_omni_factors() {
    let got = lines(&["classify", "--max", "15"]);
    assert_eq!(got.last().unwrap(), "non-omni 5,8,10,11,12,13,15");
}

#[test]
fn csv_round_trips() {
    let text = stdout(&["gen", "--n", "3", "--start", "5,4", "--count", "30", "--format", "csv"]);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["index", "term", "power", "residue"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 30);
    let terms: Vec<u64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(&terms[..7], [5, 4, 1, 5, 2, 7, 1]);
    for (r, t) in rows.iter().zip(&terms) {
        assert_eq!(r[3].parse::<u64>().unwrap(), t % 3);
    }
}

#[test]
fn construct_poor_and_adjust() {
    let got = lines(&["construct", "poor", "--n", "3", "--length", "6", "--terminal", "1,1"]);
    assert_eq!(got[0], "raw -8,7,-1,2,1,1");
    let got = lines(&["construct", "adjust", "--n", "3", "--m", "4", "--raw=-8,7,-1,2,1,1"]);
    assert_eq!(got[1], "signature *, *, 1, 3, 1, 3");
}

#[test]
fn construct_rich_and_predecessors() {
    let got = lines(&["construct", "rich", "--n", "3", "--length", "10", "--terminal", "1,1"]);
    assert_eq!(got.join(","), "49,32,1,11,4,5,1,2,1,1");
    let got = lines(&["construct", "predecessor", "--start", "3,1", "--count", "9"]);
    assert_eq!(got.join(","), "1,3,1,5,3,7,5,9,1");
}

#[test]
fn illegal_prescription_exits_1() {
    let out = freefib(&[
        "construct",
        "prescription",
        "--n",
        "3",
        "--remainders",
        "1,1,1",
        "--powers",
        "*,*,0",
        "--terminal",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[illegal-prescription]"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(freefib(&["gen", "--n", "4"]).status.code(), Some(2));
    assert_eq!(freefib(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(freefib(&["gen", "--n", "4", "--start", "1"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_1() {
    let out = freefib(&["gen", "--n", "1", "--start", "0,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[invalid-modulus]"));
    let out = freefib(&["gen", "--n", "4", "--start", "0,0"]);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[degenerate-input]"));
    let out = freefib(&["oeis", "--id", "A000000"]);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[unsupported-sequence]"));
}

#[test]
fn digits_flag_truncates() {
    let got = lines(&["gen", "--n", "9", "--start", "1,1", "--count", "400", "--digits", "5"]);
    let last = got.last().unwrap();
    assert!(last.contains("…(") && last.ends_with(" digits)"), "{last}");
}

#[test]
fn seeded_experiments_are_reproducible() {
    let args = [
        "experiment",
        "growth",
        "--n",
        "6,8",
        "--trials",
        "64",
        "--length",
        "80",
        "--tail-skip",
        "10",
        "--seed",
        "11",
    ];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn unseeded_experiments_print_their_seed() {
    let args = [
        "experiment",
        "growth",
        "--n",
        "6",
        "--trials",
        "64",
        "--length",
        "80",
        "--tail-skip",
        "10",
    ];
    let first = lines(&args);
    let seed = first[0].strip_prefix("seed ").expect("seed line first");
    let mut replay = args.to_vec();
    replay.extend(["--seed", seed]);
    assert_eq!(lines(&replay), first[1..]);
}

#[test]
fn manifest_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "n = 5\nstart = 0,1\ncount = 7\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(lines(&["gen", "--manifest", p]).join(","), "0,1,1,2,3,1,4");
    assert_eq!(lines(&["gen", "--manifest", p, "--n", "4"]).join(","), "0,1,1,2,3,5,2");
}

#[test]
fn oeis_bfile_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b214684.txt");
    stdout(&[
        "oeis",
        "--id",
        "A214684",
        "--count",
        "3",
        "--bfile",
        path.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "0 0\n1 1\n2 1\n");
}

#[test]
fn orbits_census() {
    let got = lines(&["orbits", "--n", "5"]);
    assert!(got.contains(&"pairs_meeting_zero 21 pairs_avoiding_zero 4".to_string()));
}

#[test]
fn table_columns() {
    let text = stdout(&["experiment", "table3", "--n", "4,5", "--format", "csv"]);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(&rows[0][2], "8/3");
    assert_eq!(&rows[1][2], "diverges");
}
