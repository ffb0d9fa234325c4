use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellfree"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

const SMALL: &[&str] = &[
    "--aps",
    "4",
    "--ues",
    "8",
    "--pilots",
    "2",
    "--instances",
    "5",
    "--realizations",
    "4",
    "--seed",
    "11",
];

#[test]
fn writes_all_outputs_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = run(SMALL, &a);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert!(run(SMALL, &b).status.success());

    let per_ue = fs::read_to_string(a.join("per_ue.csv")).unwrap();
    let mut lines = per_ue.lines();
    assert_eq!(
        lines.next(),
        Some("scheme,instance,ue,pilot,controller_ap,n_serving_aps,se_ul,se_dl")
    );
    assert_eq!(lines.count(), 3 * 5 * 8);

    for scheme in ["proposed", "random", "scalable"] {
        for link in ["ul", "dl"] {
            let name = format!("cdf_{scheme}_{link}.csv");
            let cdf = fs::read_to_string(a.join(&name)).unwrap();
            assert_eq!(cdf.lines().count(), 1 + 5 * 8, "{name}");
            let last = cdf.lines().last().unwrap();
            assert!(last.ends_with(",1"), "{name}: {last}");
        }
    }
    for file in [
        "per_ue.csv",
        "summary.txt",
        "config.txt",
        "cdf_proposed_dl.csv",
    ] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
    let summary = fs::read_to_string(a.join("summary.txt")).unwrap();
    assert_eq!(String::from_utf8(first.stdout).unwrap(), summary);
    assert!(summary.contains("proposed.p10_dl = "));
    assert!(summary.contains("digest = "));
}

#[test]
fn config_dump_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    assert!(run(&[SMALL, &["--scheme", "proposed"]].concat(), &a)
        .status
        .success());
    let dumped = a.join("config.txt");
    let b = dir.path().join("b");
    let again = run(&["--config", dumped.to_str().unwrap()], &b);
    assert!(
        again.status.success(),
        "{}",
        String::from_utf8_lossy(&again.stderr)
    );
    assert_eq!(
        fs::read(a.join("summary.txt")).unwrap(),
        fs::read(b.join("summary.txt")).unwrap()
    );
    assert!(!b.join("cdf_random_ul.csv").exists());
}

#[test]
fn bad_config_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "n_aps = 4\n\nn_pilots = zero\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()], &dir.path().join("o"));
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("n_pilots"), "{err}");
}

#[test]
fn overfull_network_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["--aps", "2", "--ues", "9", "--pilots", "4"],
        &dir.path().join("o"),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("capacity"));
}
