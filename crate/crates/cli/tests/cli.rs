use std::fs;
use std::process::{Command, Output};

fn treeheat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treeheat")).args(args).output().expect("binary runs")
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(out: &Output, name: &str) -> Vec<String> {
    let text = String::from_utf8_lossy(&out.stdout);
    let header: Vec<&str> = text.lines().find(|l| !l.starts_with('#')).unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows(out).into_iter().map(|r| r[i].clone()).collect()
}

#[test]
fn kernel_tree_both_methods_agree() {
    let out = treeheat(&["kernel-tree", "--q", "2", "--t", "10", "--nmax", "40", "--method", "both"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let agree = column(&out, "agree");
    assert_eq!(agree.len(), 41);
    assert!(agree.iter().all(|a| a == "true"));
    for gap in column(&out, "rel_gap") {
        assert!(gap.parse::<f64>().unwrap() < 1e-9);
    }
}

#[test]
fn converge_rows_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("delta_y2.json");
    fs::write(&f, r#"{"q": 2, "entries": [{"vertex": "0.1", "value": 1.0}]}"#).unwrap();
    let out = treeheat(&["converge", "--q", "2", "--p", "1", "--f", f.to_str().unwrap(), "--t", "100,300,1000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let e: Vec<f64> = column(&out, "E").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(e.len(), 3);
    assert!(e[0] > e[1] && e[1] > e[2]);
    assert!(column(&out, "tail_bound").iter().all(|v| v.parse::<f64>().unwrap() < 1e-6));
}

#[test]
fn converge_z_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("z.json");
    fs::write(&f, r#"{"entries": [{"site": 2, "value": 1.0}]}"#).unwrap();
    let out = treeheat(&["converge-z", "--p", "2", "--f", f.to_str().unwrap(), "--t-grid", "100:10:3"]);
    assert!(out.status.success());
    let t = column(&out, "t");
    assert_eq!(t.len(), 3);
    assert_eq!(t[2].parse::<f64>().unwrap(), 10000.0);
}

#[test]
fn selftest_passes() {
    let out = treeheat(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().count() >= 5);
    assert!(!text.contains("FAIL"));
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let status = Command::new(env!("CARGO_BIN_EXE_treeheat"))
            .env("TREEHEAT_THREADS", threads)
            .args(["asymptotics", "--q", "2", "--regime", "diffusive", "--t", "250,500", "--output", path.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let (a, b) = (fs::read(a).unwrap(), fs::read(b).unwrap());
    assert_eq!(a, b);
    assert!(String::from_utf8_lossy(&a).starts_with("# treeheat "));
}

#[test]
fn full_precision_numbers() {
    let out = treeheat(&["spherical", "--q", "3", "--lambda-re", "0.7", "--nmax", "3"]);
    let re = column(&out, "re");
    // 17 significant digits: d.dddddddddddddddde±x
    assert!(re.iter().all(|v| v.split('e').next().unwrap().trim_start_matches('-').len() == 18));
    assert_eq!(re[0].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn validation_errors_exit_2() {
    assert_eq!(treeheat(&["kernel-z", "--t", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(treeheat(&["kernel-tree", "--q", "1", "--t", "1"]).status.code(), Some(2));
    assert_eq!(treeheat(&["kernel-tree", "--q", "2", "--t", "-1"]).status.code(), Some(2));
    assert_eq!(treeheat(&["concentrate", "--q", "2", "--p", "0.5", "--t", "10"]).status.code(), Some(2));
    assert_eq!(treeheat(&["concentrate", "--q", "2", "--p", "2", "--t", "10,5"]).status.code(), Some(2));
    assert_eq!(treeheat(&["converge", "--q", "2", "--p", "1", "--f", "/nonexistent.json", "--t", "10"]).status.code(), Some(2));
    assert_eq!(treeheat(&["nonsense"]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_treeheat"))
        .env("TREEHEAT_THREADS", "zero")
        .args(["selftest"])
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}
