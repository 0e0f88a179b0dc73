use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_speedgame"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn schedule_of_two_jobs() {
    let o = run(&["schedule", data("two_jobs.txt").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "start,end,speed,job_id\n0,1,2,1\n1,2,1,2\n# energy=5\n"
    );
    assert_eq!(stderr(&o).trim(), "energy=5 segments=2");
}

#[test]
fn verify_marginal_equilibrium() {
    let o = run(&["verify", data("unit_pair.txt").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("is_nash=true"), "{}", stderr(&o));

    let o = run(&[
        "verify",
        data("unit_pair.txt").to_str().unwrap(),
        "--mechanism",
        "proportional",
    ]);
    assert!(stderr(&o).starts_with("is_nash=false"), "{}", stderr(&o));
}

#[test]
fn flags_override_header() {
    let o = run(&[
        "schedule",
        data("two_jobs.txt").to_str().unwrap(),
        "--alpha",
        "3",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("# energy=9\n"), "{}", stdout(&o));
}

#[test]
fn shares_and_bestresp() {
    let inst = data("unit_pair.txt");
    let o = run(&[
        "shares",
        inst.to_str().unwrap(),
        "--mechanism",
        "proportional",
    ]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.starts_with("id,share,waiting,penalty\n"), "{csv}");
    assert!(stderr(&o).contains("mechanism=proportional"));

    let o = run(&["bestresp", inst.to_str().unwrap(), "--player", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("player=2 d_star=1 "), "{}", stderr(&o));
}

#[test]
fn dynamics_finds_the_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "dynamics",
        data("unit_pair.txt").to_str().unwrap(),
        "--profile",
        data("unit_pair_start.txt").to_str().unwrap(),
        "--mechanism",
        "proportional",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("verdict=cycle cycle_start=3 period=4"),
        "{}",
        stdout(&o)
    );
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().filter(|l| !l.starts_with('#')).count(), 1 + 7);
}

#[test]
fn scan_writes_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "scan",
        "--grid",
        "3x4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let region = fs::read_to_string(dir.path().join("region.csv")).unwrap();
    assert_eq!(
        region.lines().filter(|l| !l.starts_with('#')).count(),
        1 + 12
    );
    assert!(dir.path().join("thresholds.csv").exists());
    assert!(stdout(&o).contains("cells=12"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 1 0\n").unwrap();
    let late = dir.path().join("late.txt");
    fs::write(&late, "1 1 2 1 1\n").unwrap();

    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["schedule", bad.to_str().unwrap()]), 3);
    assert!(stderr(&run(&["schedule", bad.to_str().unwrap()])).contains("line 1"));
    assert_eq!(code(&["schedule", late.to_str().unwrap()]), 4);
    assert_eq!(code(&["schedule", "/nonexistent/instance.txt"]), 6);
    assert_eq!(
        code(&[
            "schedule",
            data("two_jobs.txt").to_str().unwrap(),
            "--alpha",
            "1.5"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "schedule",
            data("two_jobs.txt").to_str().unwrap(),
            "--mode",
            "weird"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "bestresp",
            data("two_jobs.txt").to_str().unwrap(),
            "--player",
            "9"
        ]),
        2
    );
}
