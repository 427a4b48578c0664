//! End-to-end tests of the `pdakit` binary: golden outputs, exit codes,
//! and byte-identity with the library calls it wraps.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pdakit::construct::exemplar;
use pdakit::format::write_pda;

const EX1_PDA: &str = "PDA v1\nK=4 F=2 Z=1 S=2\n* 1 * 0\n0 * 1 *\n";

const MN42_PDA: &str = "\
PDA v1
K=4 F=6 Z=3 S=4
* * 0 1
* 0 * 2
* 1 2 *
0 * * 3
1 * 3 *
2 3 * *
";

const EX1_GPDA: &str = "\
GPDA v1
K=8 F=2 Z=1 S=2 I=3
* * * 1^1 1^2 * * 0^1
0^1 0^2 0^3 * * 1^1 1^2 *
";

const EX1_ASSOCIATION: &str = "\
cache 0: users {0,1,2}
cache 1: users {3,4}
cache 2: users {5,6}
cache 3: users {7}
";

fn pdakit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdakit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// Run and require exit 0, returning stdout.
fn expect_ok(args: &[&str]) -> String {
    let out = pdakit(args);
    assert!(
        out.status.success(),
        "`pdakit {}` failed: {}",
        args.join(" "),
        stderr_of(&out)
    );
    stdout_of(&out)
}

fn expect_code(args: &[&str], code: i32) -> Output {
    let out = pdakit(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "`pdakit {}`: stdout={} stderr={}",
        args.join(" "),
        stdout_of(&out),
        stderr_of(&out)
    );
    out
}

fn write_ex1(dir: &Path) -> String {
    let path = dir.join("e.pda");
    fs::write(&path, EX1_PDA).unwrap();
    path.to_str().unwrap().to_owned()
}

// ---- construct ----------------------------------------------------------

#[test]
fn construct_exemplar_writes_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.pda");
    let path_str = path.to_str().unwrap();
    let stdout = expect_ok(&["construct", "exemplar", "--name", "ex1", "-o", path_str]);
    assert_eq!(fs::read_to_string(&path).unwrap(), EX1_PDA);
    assert_eq!(stdout, format!("K=4 F=2 Z=1 S=2\nwrote {path_str}\n"));

    // Byte-identical to the library call it wraps.
    assert_eq!(
        fs::read_to_string(&path).unwrap(),
        write_pda(&exemplar("ex1").unwrap())
    );
}

#[test]
fn construct_exemplar_stdout_golden() {
    assert_eq!(
        expect_ok(&["construct", "exemplar", "--name", "ex1"]),
        EX1_PDA
    );
}

#[test]
fn construct_mn_stdout_golden() {
    assert_eq!(
        expect_ok(&["construct", "mn", "--k", "4", "--t", "2"]),
        MN42_PDA
    );
}

#[test]
fn construct_mn_rejects_out_of_range_t() {
    let out = expect_code(&["construct", "mn", "--k", "4", "--t", "5"], 2);
    assert!(
        stderr_of(&out).contains("t = 5"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn construct_unknown_exemplar_is_usage_error() {
    let out = expect_code(&["construct", "exemplar", "--name", "nope"], 2);
    assert!(stderr_of(&out).contains("nope"));
}

// ---- validate ------------------------------------------------------------

#[test]
fn validate_accepts_valid_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_ex1(dir.path());
    assert_eq!(expect_ok(&["validate", &path]), "OK\n");
}

#[test]
fn validate_lists_violations_for_corrupted_cell() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.pda");
    // Overwrite both 0 cells with 1s: value 1 now repeats in a row and a
    // column, and 0 disappears from the array.
    fs::write(
        &path,
        EX1_PDA
            .replace("* 1 * 0", "* 1 * 1")
            .replace("0 * 1 *", "1 * 1 *"),
    )
    .unwrap();
    let out = expect_code(&["validate", path.to_str().unwrap()], 1);
    let report = stdout_of(&out);
    assert!(
        report.contains("C3: integer 1 repeats in row 0"),
        "report: {report}"
    );
    assert!(
        report.contains("C2: integer 0 never appears"),
        "report: {report}"
    );
}

#[test]
fn validate_missing_file_is_usage_error() {
    let out = expect_code(&["validate", "/nonexistent/q.pda"], 2);
    assert!(stderr_of(&out).contains("cannot read"));
}

#[test]
fn validate_rejects_malformed_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.pda");
    fs::write(&path, "not an array\n").unwrap();
    let out = expect_code(&["validate", path.to_str().unwrap()], 2);
    assert!(stderr_of(&out).contains("cannot parse"));
}

#[test]
fn validate_gpda_accepts_expansion() {
    let dir = tempfile::tempdir().unwrap();
    let gpda = dir.path().join("e.gpda");
    fs::write(&gpda, EX1_GPDA).unwrap();
    assert_eq!(
        expect_ok(&["validate", gpda.to_str().unwrap(), "--gpda"]),
        "OK\n"
    );
}

// ---- expand --------------------------------------------------------------

#[test]
fn expand_writes_golden_gpda() {
    let dir = tempfile::tempdir().unwrap();
    let pda = write_ex1(dir.path());
    let gpda = dir.path().join("e.gpda");
    let gpda_str = gpda.to_str().unwrap();
    let stdout = expect_ok(&["expand", &pda, "--profile", "3,2,2,1", "-o", gpda_str]);
    assert_eq!(fs::read_to_string(&gpda).unwrap(), EX1_GPDA);
    assert_eq!(
        stdout,
        format!("K=8 F=2 Z=1 S=2 I=3\n{EX1_ASSOCIATION}wrote {gpda_str}\n")
    );
}

#[test]
fn expand_stdout_stays_parseable() {
    let dir = tempfile::tempdir().unwrap();
    let pda = write_ex1(dir.path());
    let stdout = expect_ok(&["expand", &pda, "--profile", "3,2,2,1"]);
    let comments: String = EX1_ASSOCIATION
        .lines()
        .map(|l| format!("# {l}\n"))
        .collect();
    assert_eq!(stdout, format!("{EX1_GPDA}{comments}"));
}

#[test]
fn expand_unit_profile_copies_with_superscript_one() {
    let dir = tempfile::tempdir().unwrap();
    let pda = write_ex1(dir.path());
    let stdout = expect_ok(&["expand", &pda, "--profile", "1,1,1,1"]);
    assert!(
        stdout.starts_with("GPDA v1\nK=4 F=2 Z=1 S=2 I=1\n* 1^1 * 0^1\n0^1 * 1^1 *\n"),
        "stdout: {stdout}"
    );
}

#[test]
fn expand_profile_sum_is_unconstrained() {
    let dir = tempfile::tempdir().unwrap();
    let pda = write_ex1(dir.path());
    let stdout = expect_ok(&["expand", &pda, "--profile", "2,1,1,1"]);
    assert!(stdout.contains("K=5"), "stdout: {stdout}");
}

#[test]
fn expand_rejects_profile_length_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let pda = write_ex1(dir.path());
    let out = expect_code(&["expand", &pda, "--profile", "3,2,2"], 2);
    assert!(
        stderr_of(&out).contains("4") && stderr_of(&out).contains("3"),
        "stderr: {}",
        stderr_of(&out)
    );
}

// ---- deliver ---------------------------------------------------------------

#[test]
fn deliver_worked_example_golden_log() {
    let dir = tempfile::tempdir().unwrap();
    let gpda = dir.path().join("e.gpda");
    fs::write(&gpda, EX1_GPDA).unwrap();
    let stdout = expect_ok(&[
        "deliver",
        gpda.to_str().unwrap(),
        "--demands",
        "0,1,2,3,4,5,6,7",
    ]);
    assert_eq!(
        stdout,
        "8 users, 2 subfile rows, 8 files of 4096 bytes, demands (0,1,2,3,4,5,6,7), seed 24301
0^(1): (user 0, row 1) + (user 7, row 0)
0^(2): (user 1, row 1)
0^(3): (user 2, row 1)
1^(1): (user 3, row 0) + (user 5, row 1)
1^(2): (user 4, row 0) + (user 6, row 1)
5 transmissions, load 5/2 = 2.500
all 8 users decoded OK
"
    );
}

#[test]
fn deliver_six_row_example_eleven_transmissions() {
    let dir = tempfile::tempdir().unwrap();
    let pda = dir.path().join("m.pda");
    let gpda = dir.path().join("m.gpda");
    fs::write(&pda, MN42_PDA).unwrap();
    expect_ok(&[
        "expand",
        pda.to_str().unwrap(),
        "--profile",
        "3,2,2,1",
        "-o",
        gpda.to_str().unwrap(),
    ]);
    let stdout = expect_ok(&[
        "deliver",
        gpda.to_str().unwrap(),
        "--demands",
        "0,1,2,3,4,5,6,7",
    ]);
    assert!(
        stdout.contains("11 transmissions, load 11/6 = 1.833"),
        "stdout: {stdout}"
    );
    assert!(stdout.ends_with("all 8 users decoded OK\n"));
    // 1 header + 11 transmissions + 2 summary lines.
    assert_eq!(stdout.lines().count(), 14);
}

#[test]
fn deliver_handles_repeated_demands_and_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let gpda = dir.path().join("e.gpda");
    fs::write(&gpda, EX1_GPDA).unwrap();
    for seed in ["7", "99"] {
        let stdout = expect_ok(&[
            "deliver",
            gpda.to_str().unwrap(),
            "--demands",
            "0,0,1,1,2,2,3,3",
            "--seed",
            seed,
            "--bytes",
            "1000",
        ]);
        assert!(stdout.contains("4 files of 1000 bytes"), "stdout: {stdout}");
        assert!(stdout.ends_with("all 8 users decoded OK\n"));
    }
}

#[test]
fn deliver_rejects_wrong_demand_count() {
    let dir = tempfile::tempdir().unwrap();
    let gpda = dir.path().join("e.gpda");
    fs::write(&gpda, EX1_GPDA).unwrap();
    expect_code(
        &["deliver", gpda.to_str().unwrap(), "--demands", "0,1,2"],
        2,
    );
}

// ---- compare ---------------------------------------------------------------

#[test]
fn compare_table_golden() {
    let dir = tempfile::tempdir().unwrap();
    let pda = write_ex1(dir.path());
    let stdout = expect_ok(&["compare", "--pda", &pda, "--profile", "3,2,2,1"]);
    assert_eq!(
        stdout,
        "scheme  F  S  load  decimal
ours    2  2  5/2   2.500
PUE     6  4  11/6  1.833
"
    );
}

#[test]
fn compare_csv_golden() {
    let dir = tempfile::tempdir().unwrap();
    let pda = write_ex1(dir.path());
    let stdout = expect_ok(&[
        "compare",
        "--pda",
        &pda,
        "--profile",
        "3,2,2,1",
        "--ratio",
        "1/2",
        "--csv",
    ]);
    assert_eq!(
        stdout,
        "scheme,F,S,load_num,load_den,load_decimal
ours,2,2,5,2,2.500
PUE,6,4,11,6,1.833
"
    );
}

#[test]
fn compare_mn_uniform_profile_rows_agree() {
    // With one user per cache the baseline rebuilds the same array, so the
    // two rows must agree in everything but the label.
    let stdout = expect_ok(&["compare", "--mn", "4,2", "--profile", "1,1,1,1", "--csv"]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    let ours = lines[1].strip_prefix("ours").unwrap();
    let pue = lines[2].strip_prefix("PUE").unwrap();
    assert_eq!(ours, pue);
    assert_eq!(ours, ",6,4,4,6,0.6667");
}

#[test]
fn compare_rejects_mismatched_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let pda = write_ex1(dir.path());
    expect_code(
        &[
            "compare",
            "--pda",
            &pda,
            "--profile",
            "3,2,2,1",
            "--ratio",
            "1/3",
        ],
        2,
    );
}

#[test]
fn compare_requires_exactly_one_source() {
    expect_code(&["compare", "--profile", "1,1"], 2);
    let dir = tempfile::tempdir().unwrap();
    let pda = write_ex1(dir.path());
    expect_code(
        &["compare", "--pda", &pda, "--mn", "4,2", "--profile", "1,1"],
        2,
    );
}
