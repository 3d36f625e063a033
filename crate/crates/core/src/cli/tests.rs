use super::*;

fn run_ok(args: &[&str]) {
    let mut full = vec!["swapsim"];
    full.extend_from_slice(args);
    assert_eq!(run(full), EXIT_OK, "{args:?}");
}

#[test]
fn sweep_rows_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    run_ok(&[
        "sweep",
        "--alpha-steps",
        "11",
        "--out",
        path.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("alpha,i_zz,i_xx,i_ind,i_corr,s_max,fidelity,complementarity_sum\n"));
    let rows: Vec<SweepRow> = read_rows(text.as_bytes(), Format::Csv).unwrap();
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert!((r.complementarity_sum - 2.0).abs() < 1e-10);
    }
}

#[test]
fn sweep_special_point() {
    let grid = sweep_grid(101, true);
    assert_eq!(grid.len(), 102);
    assert!(grid.windows(2).all(|w| w[0] < w[1]));
    let r = sweep_row(std::f64::consts::FRAC_1_SQRT_2).unwrap();
    assert!((r.i_corr - 2.0).abs() < 1e-10);
    assert!(r.i_ind.abs() < 1e-10);
    assert!((r.fidelity - 0.5).abs() < 1e-12);
}

#[test]
fn rows_round_trip_byte_for_byte() {
    let rows: Vec<SweepRow> = [0.0, 0.13, 0.5, 1.0]
        .iter()
        .map(|&a| sweep_row(a).unwrap())
        .collect();
    for format in [Format::Csv, Format::Json] {
        let mut first = Vec::new();
        write_rows(&rows, format, &mut first).unwrap();
        let back: Vec<SweepRow> = read_rows(first.as_slice(), format).unwrap();
        let mut second = Vec::new();
        write_rows(&back, format, &mut second).unwrap();
        assert_eq!(first, second, "{format:?}");
    }
    let json: Vec<SweepRow> = {
        let mut buf = Vec::new();
        write_rows(&rows, Format::Json, &mut buf).unwrap();
        read_rows(buf.as_slice(), Format::Json).unwrap()
    };
    assert_eq!(json, rows);
}

#[test]
fn paper_chain() {
    let rows = paper_rows(2.421, 0.091).unwrap();
    let get = |q: &str| rows.iter().find(|r| r.quantity == q).unwrap().value;
    assert!((get("i_corr") - 1.465).abs() < 0.002);
    assert!((get("f_bound") - 0.589).abs() < 0.002);
    assert!((get("f_cl") - 0.6667).abs() < 1e-4);
    assert!((get("sigmas_above_local_bound") - 4.6).abs() < 0.05);
    assert_eq!(get("below_classical_limit"), 1.0);
}

#[test]
fn delayed_writes_log_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    run_ok(&[
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
        "delayed",
        "--alpha",
        "0.7071",
        "--shots",
        "20000",
    ]);
    let summary: delayed::RunSummary =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let psi_minus = summary.conditional_estimates[PSI_MINUS].estimate.unwrap();
    assert!((psi_minus.e_hat + 1.0).abs() < 1e-3);
    assert_eq!(summary.chsh.len(), 4);
    let events = delayed::read_events_csv(File::open(out.join("runlog.csv")).unwrap()).unwrap();
    assert_eq!(events.len(), 60_000);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(["swapsim", "delayed", "--alice-dir", "w"]), EXIT_USAGE);
    assert_eq!(run(["swapsim", "sweep", "--alpha-steps", "1"]), EXIT_USAGE);
    assert_eq!(run(["swapsim", "frobnicate"]), EXIT_USAGE);
    assert_eq!(
        run(["swapsim", "fidelity", "--alphas", "1.5", "--samples", "10"]),
        EXIT_USAGE
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("x.csv");
    assert_eq!(
        run(["swapsim", "paper-numbers", "--out", bad.to_str().unwrap()]),
        EXIT_USAGE
    );
}

#[test]
fn chsh_on_haar_states() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chsh.json");
    run_ok(&[
        "--seed",
        "3",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
        "chsh",
        "--haar",
        "10",
    ]);
    let rows: Vec<ChshRow> = read_rows(File::open(&path).unwrap(), Format::Json).unwrap();
    assert_eq!(rows.len(), 10);
}
