use std::path::Path;
use std::process::{Command, Output};

fn gencude(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gencude")).args(args).current_dir(cwd).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const BOUND: [&str; 14] = [
    "bound", "--k", "1", "--delta", "0.5", "--M", "2", "--n", "100000", "--epsilon", "0.6", "--epsilon-star", "0.01",
    "--lambda-max",
];

#[test]
fn bound_prints_constants() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = BOUND.to_vec();
    args.push("1");
    let o = gencude(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("c1 = 54\n"), "{out}");
    assert!(out.contains("bound = "));
}

#[test]
fn bound_below_threshold_fails_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = BOUND.to_vec();
    args[10] = "0.5";
    args.push("1");
    let o = gencude(&args, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("c1 = 54"));
    let err = stderr(&o);
    assert!(err.contains("[bound]") && err.contains("0.53"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn unknown_subcommand_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = gencude(&["frobnicate"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn simulate_denoise_evaluate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.txt"), "mode = synthetic\nM = 2\nn = 3000\nseed = 3\nepochs = 20\nbatch_size = 32\nhidden = 16\n")
        .unwrap();
    let o = gencude(&["simulate", "--config", "cfg.txt", "--out-dir", "data"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["clean.txt", "noisy.txt", "quantized.txt"] {
        let text = std::fs::read_to_string(dir.path().join("data").join(f)).unwrap();
        assert_eq!(text.lines().count(), 3000);
    }
    let o = gencude(
        &["denoise", "--config", "cfg.txt", "--scheme", "gen_cude", "--k", "2", "--noisy", "data/noisy.txt", "--out", "xhat.txt"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let o = gencude(
        &["evaluate", "--clean", "data/clean.txt", "--denoised", "xhat.txt", "--k", "2", "--baseline", "data/quantized.txt"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let normalized: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("normalized_error = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(normalized < 1.0, "{out}");
}

#[test]
fn bench_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.txt"),
        "mode = synthetic\nM = 2\nn = 2000\nseed = 0\nepochs = 2\nhidden = 8\nschemes = gen_cude, fb, ml_pdf\nk = 1, 2, 4\noutput = out.csv\n",
    )
    .unwrap();
    let o = gencude(&["bench", "--config", "cfg.txt"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "scheme,k,n,M,raw_error,interior_error,normalized_error,similarity,runtime_seconds,seed,error_message"
    );
    assert_eq!(lines.len(), 8);
}

#[test]
fn config_errors_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.txt"), "mode = synthetic\nM = 2\nseed = 0\nwidth = 3\n").unwrap();
    let o = gencude(&["bench", "--config", "bad.txt"], dir.path());
    assert_eq!(o.status.code(), Some(6));
    let err = stderr(&o);
    assert!(err.contains("[config]") && err.contains("line 4") && err.contains("width"), "{err}");
    assert!(!dir.path().join("results.csv").exists());

    let o = gencude(&["bench", "--config", "missing.txt"], dir.path());
    assert_eq!(o.status.code(), Some(10));

    std::fs::write(dir.path().join("flip.txt"), "mode = synthetic\nM = 2\nseed = 0\nstay_prob = 1.5\n").unwrap();
    let o = gencude(&["bench", "--config", "flip.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("stay_prob"));
}

#[test]
fn denoise_reports_cap_errors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.txt"), "mode = synthetic\nM = 2\nn = 200\nseed = 1\ntuple_cap = 4\n").unwrap();
    assert!(gencude(&["simulate", "--config", "cfg.txt"], dir.path()).status.success());
    let o = gencude(
        &["denoise", "--config", "cfg.txt", "--scheme", "gen_dude", "--k", "1", "--noisy", "noisy.txt", "--out", "x.txt"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(8));
    assert!(stderr(&o).contains("[denoise]"));
}
