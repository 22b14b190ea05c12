use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const XILINX: &str = "virtex7_690t_7v3";
const ALTERA: &str = "stratixV_gxa7_de5";

fn kp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kernelpipe"))
        .args(args)
        .env_remove("KERNELPIPE_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {}: {}", o.status, String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn measured_bench() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/measured_bench.csv").display().to_string()
}

fn zero_weights(dir: &Path) -> String {
    // a fixture file with every parameter replaced by zero
    let out = dir.join("fx");
    stdout(&kp(&["fixture", "--out", out.to_str().unwrap(), "--count", "1"]));
    let text = fs::read_to_string(out.join("weights.txt")).unwrap();
    let zeroed: String = text
        .lines()
        .map(|l| {
            if l.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '.') {
                l.split_whitespace().map(|_| "0").collect::<Vec<_>>().join(" ")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let path = dir.join("zero.txt");
    fs::write(&path, zeroed + "\n").unwrap();
    path.display().to_string()
}

#[test]
fn classify_zero_weights_picks_class_zero() {
    let dir = tempfile::tempdir().unwrap();
    let w = zero_weights(dir.path());
    let out = stdout(&kp(&["classify", "--weights", &w, "--count", "2"]));
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("index,winner,logit0"));
    for (i, l) in lines.enumerate() {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols[0], i.to_string());
        assert_eq!(cols[1], "0");
        assert!(cols[2..].iter().all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
}

#[test]
fn classify_with_oracle_agrees() {
    let out = stdout(&kp(&["classify", "--count", "3", "--oracle"]));
    assert!(out.lines().any(|l| l == "agreement,1"), "{out}");
    assert!(out.lines().any(|l| l == "float_agreement,1"), "{out}");
}

#[test]
fn missing_file_names_the_path() {
    let o = kp(&["classify", "--weights", "/nonexistent/w.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/w.txt"));
    assert_eq!(kp(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(kp(&["--help"]).status.code(), Some(0));
}

#[test]
fn bench_models_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let report = stdout(&kp(&["bench", "--out", csv.to_str().unwrap()]));
    assert!(report.contains(XILINX) && report.contains(ALTERA));
    let text = fs::read_to_string(&csv).unwrap();
    // 5 kernels x 3 modes x 2 platforms
    assert_eq!(text.lines().count(), 1 + 30);

    let one = stdout(&kp(&["bench", "--platform", XILINX]));
    assert!(one.contains("skipped"), "{one}");
}

#[test]
fn bench_replay_reproduces_reference_acceleration() {
    let dir = tempfile::tempdir().unwrap();
    let accel = dir.path().join("accel.csv");
    let out = dir.path().join("bench.csv");
    stdout(&kp(&[
        "bench",
        "--from-csv",
        &measured_bench(),
        "--out",
        out.to_str().unwrap(),
        "--accel-out",
        accel.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&accel).unwrap();
    let percents: Vec<i64> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(percents, [259, 94, 100, 92, 24, 15, -166, -16, -116, -83, -229, -267, 133, 150, 169]);
    // the replayed bench CSV is the input, byte for byte
    assert_eq!(fs::read_to_string(out).unwrap(), fs::read_to_string(measured_bench()).unwrap());
}

#[test]
fn sweep_rows_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    stdout(&kp(&["sweep", "--count", "2", "--out", csv.to_str().unwrap()]));
    let text = fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    let widest: Vec<&str> = rows[4].split(',').collect();
    assert_eq!((widest[0], widest[1], widest[4]), ("32", "16", "1"));

    assert_eq!(kp(&["sweep", "--grid", ""]).status.code(), Some(1));
    assert_eq!(kp(&["sweep", "--grid", "16:20"]).status.code(), Some(1));
}

#[test]
fn stream_verdicts() {
    let out = stdout(&kp(&["stream"]));
    let verdict =
        |name: &str| out.lines().find(|l| l.starts_with(name)).unwrap().rsplit(',').next().unwrap().to_string();
    assert_eq!(verdict(XILINX), "constant");
    assert_eq!(verdict(ALTERA), "growing");

    let single = stdout(&kp(&["stream", "--platform", ALTERA, "--frames", "1"]));
    assert!(single.lines().nth(1).unwrap().ends_with(",0,constant"), "{single}");

    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("series.csv");
    stdout(&kp(&["stream", "--frames", "10", "--interval", "5", "--out", series.to_str().unwrap()]));
    assert_eq!(fs::read_to_string(series).unwrap().lines().count(), 1 + 20);
}

#[test]
fn same_seed_same_bytes() {
    let a = stdout(&kp(&["classify", "--count", "2", "--seed", "9"]));
    let b = stdout(&kp(&["classify", "--count", "2", "--seed", "9"]));
    assert_eq!(a, b);
    assert_ne!(a, stdout(&kp(&["classify", "--count", "2", "--seed", "10"])));
}

#[test]
fn fixture_files_feed_classify() {
    let dir = tempfile::tempdir().unwrap();
    let fx = dir.path().join("fx");
    stdout(&kp(&["fixture", "--out", fx.to_str().unwrap(), "--count", "2", "--seed", "42"]));
    let w = fx.join("weights.txt");
    let i = fx.join("images.txt");
    let from_files = stdout(&kp(&["classify", "--weights", w.to_str().unwrap(), "--images", i.to_str().unwrap()]));
    assert_eq!(from_files.lines().count(), 3);
}
