use std::path::Path;
use std::process::{Command, Output};

const SMALL: &[&str] = &["--h", "0.3", "--tau-list", "2^-3,2^-4,2^-5", "--tau-ref", "2^-7"];

fn dynbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynbc")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = dynbc(args);
    assert!(out.status.success(), "dynbc {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn study_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let stdout = run_ok(&[&["run", "--out", path(d)], SMALL].concat());
        assert!(stdout.contains("averaged"));
    }
    for f in ["errors.csv", "orders.csv", "energy.csv", "plot.gp"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert!(!x.is_empty(), "{f} is empty");
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f} differs between runs");
    }
    let errors = std::fs::read_to_string(a.join("errors.csv")).unwrap();
    let mut lines = errors.lines();
    assert_eq!(lines.next(), Some("problem,scheme,h,tau,variable,norm,error"));
    // 2 schemes x 3 steps x 2 variables x 4 norms
    assert_eq!(lines.count(), 48);
    assert!(std::fs::read_to_string(a.join("failures.txt")).unwrap().is_empty());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.cfg");
    std::fs::write(
        &cfg,
        "# acoustic run\nproblem = acoustic\nscheme = strang-cn\nh = 0.3\ntau_list = 2^-3, 2^-4, 2^-5\ntau_ref = 2^-7\nnorms = L2L2\nnonlinearity = allen-cahn-surface\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    run_ok(&["run", "--config", path(&cfg), "--scheme", "lie-euler", "--out", path(&out), "--no-reference-check"]);
    let written = std::fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(written.contains("problem = acoustic"));
    assert!(written.contains("scheme = lie-euler\n"));
    let orders = std::fs::read_to_string(out.join("orders.csv")).unwrap();
    assert!(orders.contains("lie-euler,delta,L2L2"));
    assert!(!orders.contains("strang-cn"));
}

#[test]
fn snapshot_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("snap.txt");
    run_ok(&[&["snapshot", "--t", "0.5", "--tau", "2^-5", "--scheme", "strang-cn", "--file", path(&snap)], SMALL].concat());
    let text = std::fs::read_to_string(&snap).unwrap();
    assert!(text.lines().count() > 10);
    assert!(text.lines().all(|l| l.split_whitespace().filter_map(|v| v.parse::<f64>().ok()).count() == 3));

    let out = dir.path().join("export");
    run_ok(&["export", "--h", "0.3", "--problem", "acoustic", "--out", path(&out)]);
    let mesh = std::fs::read_to_string(out.join("mesh.txt")).unwrap();
    let counts: Vec<usize> = mesh.lines().next().unwrap().split(' ').map(|c| c.parse().unwrap()).collect();
    assert_eq!(mesh.lines().count(), 1 + counts.iter().sum::<usize>());
    assert_eq!(text.lines().count(), counts[0]);
    for m in ["M_bulk", "A_bulk", "M_surf", "A_surf", "B"] {
        let mtx = std::fs::read_to_string(out.join(format!("{m}.mtx"))).unwrap();
        assert!(mtx.starts_with("%%MatrixMarket matrix coordinate real general"));
    }
}

#[test]
fn bad_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "h = 0.3\ncolour = red\n").unwrap();
    let out = dynbc(&["run", "--config", path(&cfg)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("colour"), "{err}");

    let out = dynbc(&["run", "--tau-list", "0.3", "--h", "0.3"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid study configuration"));
}
