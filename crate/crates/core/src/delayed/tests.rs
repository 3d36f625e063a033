use std::f64::consts::FRAC_1_SQRT_2;

use super::*;
use crate::swapkit::{PSI_MINUS, PSI_PLUS};

fn within(x: f64, target: f64, sigma: f64) -> bool {
    (x - target).abs() <= 3.0 * sigma
}

#[test]
fn bell_victor_outcomes_are_uniform() {
    let cfg = ExperimentConfig::new(FRAC_1_SQRT_2, 100_000, 1);
    let log = run_experiment(&cfg).unwrap();
    let counts = log.counts().unwrap();
    let n = cfg.shots as f64;
    let sigma = (0.25 * 0.75 / n).sqrt();
    for c in counts {
        assert!(within(c as f64 / n, 0.25, sigma), "{counts:?}");
    }
    assert_eq!(counts.iter().sum::<u64>(), cfg.shots);
}

#[test]
fn victor_records_come_last() {
    let log = run_experiment(&ExperimentConfig::new(0.4, 2_000, 3)).unwrap();
    assert_eq!(log.events.len(), 6_000);
    for shot in log.events.chunks(3) {
        let v = shot.iter().find(|e| e.party == Party::Victor).unwrap();
        assert_eq!(v.time_ns, 70.0);
        for e in shot.iter().filter(|e| e.party != Party::Victor) {
            assert_eq!(e.time_ns, 20.0);
            assert!(v.time_ns > e.time_ns);
            assert_eq!(e.shot_id, v.shot_id);
        }
    }
    assert_eq!(log.config.timing.light_cone_margin_ns(), 42.0);
}

#[test]
fn same_seed_same_log_and_bytes() {
    let cfg =
        ExperimentConfig::new(0.3, 40_000, 99).with_directions(Direction::x(), Direction::z());
    let (a, b) = (run_experiment(&cfg).unwrap(), run_experiment(&cfg).unwrap());
    assert_eq!(a, b);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    a.write_csv(&mut x).unwrap();
    b.write_csv(&mut y).unwrap();
    assert_eq!(x, y);
    let other = run_experiment(&ExperimentConfig { seed: 100, ..cfg }).unwrap();
    assert_ne!(a, other);
}

#[test]
fn sharded_run_matches_single_thread() {
    let cfg = ExperimentConfig::new(0.6, 50_000, 12);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let single = pool.install(|| run_experiment(&cfg).unwrap());
    assert_eq!(single, run_experiment(&cfg).unwrap());
}

#[test]
fn csv_and_json_round_trip() {
    let cfg = ExperimentConfig::new(0.8, 500, 4)
        .with_directions(Direction::from_spherical(0.4, 1.2), -Direction::x());
    let log = run_experiment(&cfg).unwrap();
    let mut buf = Vec::new();
    log.write_csv(&mut buf).unwrap();
    assert!(buf.starts_with(b"shot_id,party,time_ns,setting_tag,outcome\n"));
    let events = read_events_csv(buf.as_slice()).unwrap();
    assert_eq!(events, log.events);

    let summary = log.summary().unwrap();
    let json = serde_json::to_string(&summary).unwrap();
    let back: RunSummary = serde_json::from_str(&json).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), json);
}

#[test]
fn sorted_subsets() {
    let cfg = ExperimentConfig::new(1.0, 100_000, 21);
    let log = run_experiment(&cfg).unwrap();
    let groups = sort_by_victor(&log).unwrap();
    assert_eq!(groups.values().map(Vec::len).sum::<usize>(), 100_000);
    assert!(groups[&PSI_PLUS].iter().all(|&p| p == (-1, 1)));
    let n = cfg.shots as f64;
    let sigma = (0.25 * 0.75 / n).sqrt();
    for g in groups.values() {
        assert!(within(g.len() as f64 / n, 0.25, sigma));
    }
    let m = alice_marginal(&log).unwrap();
    assert!(within(m.e_hat, 0.0, (1.0 / n).sqrt()));
}

#[test]
fn conditional_correlations_follow_victor() {
    let cfg = ExperimentConfig::new(FRAC_1_SQRT_2, 100_000, 8);
    let log = run_experiment(&cfg).unwrap();
    let e = conditional_correlation(&log, PSI_MINUS).unwrap();
    assert_eq!(e.e_hat, -1.0);

    let cfg =
        ExperimentConfig::new(0.5, 100_000, 8).with_directions(Direction::x(), Direction::x());
    let log = run_experiment(&cfg).unwrap();
    let e = conditional_correlation(&log, PSI_MINUS).unwrap();
    let expected = -2.0 * 0.5 * 0.75f64.sqrt();
    assert!((expected_conditional_correlation(&cfg, PSI_MINUS).unwrap() - expected).abs() < 1e-12);
    assert!(within(e.e_hat, expected, e.stderr), "{e:?}");

    let cfg =
        ExperimentConfig::new(1.0, 100_000, 8).with_directions(Direction::x(), Direction::x());
    let log = run_experiment(&cfg).unwrap();
    for k in 0..4 {
        let e = conditional_correlation(&log, k).unwrap();
        assert!(within(e.e_hat, 0.0, e.stderr));
    }
}

#[test]
fn empty_subset_is_an_error() {
    let cfg = ExperimentConfig::new(0.5, 1, 0);
    let mut log = run_experiment(&cfg).unwrap();
    log.events[2].outcome = 0;
    for k in 1..4 {
        assert!(matches!(
            conditional_correlation(&log, k),
            Err(Error::InsufficientData(_))
        ));
    }
    assert!(conditional_correlation(&log, 4).is_err());
    let s = log.summary().unwrap();
    assert!(s.conditional_estimates[1].estimate.is_none());
}

#[test]
fn malformed_logs_are_rejected() {
    let mut log = run_experiment(&ExperimentConfig::new(0.5, 3, 0)).unwrap();
    log.events.pop();
    assert!(log.shots().is_err());
}

#[test]
fn no_signaling_from_victor() {
    for mode in [VictorMode::GeneralizedBasis, VictorMode::SeparableZ] {
        for (a, b) in [
            (Direction::z(), Direction::z()),
            (Direction::x(), Direction::x()),
        ] {
            let cfg = ExperimentConfig::new(FRAC_1_SQRT_2, 100_000, 31)
                .with_mode(mode)
                .with_directions(a, b);
            let log = run_experiment(&cfg).unwrap();
            let e = unconditioned_correlation(&log).unwrap();
            assert!(within(e.e_hat, 0.0, e.stderr), "{mode:?} {e:?}");
        }
    }
}

#[test]
fn delayed_chsh_estimates() {
    let cfg = ExperimentConfig::new(FRAC_1_SQRT_2, 200_000, 5);
    let est = delayed_chsh(&cfg, &chsh::Settings::singlet_optimal()).unwrap();
    let s = &est[PSI_MINUS];
    assert!(within(s.s_hat, chsh::TSIRELSON_BOUND, s.stderr), "{s:?}");

    let cfg = ExperimentConfig::new(0.5, 200_000, 5);
    let per = chsh_per_outcome(&cfg).unwrap();
    let expected = 2.0 * 1.75f64.sqrt();
    assert!((per[PSI_MINUS].s_expected - expected).abs() < 1e-12);
    assert!(within(
        per[PSI_MINUS].s_hat,
        expected,
        per[PSI_MINUS].stderr
    ));

    let cfg = ExperimentConfig::new(0.5, 100_000, 5).with_mode(VictorMode::SeparableZ);
    for o in chsh_per_outcome(&cfg).unwrap() {
        assert!(o.s_hat <= 2.0 + 3.0 * o.stderr, "{o:?}");
    }
}

#[test]
fn order_independence() {
    let cases = [
        ExperimentConfig::new(FRAC_1_SQRT_2, 1, 0),
        ExperimentConfig::new(0.3, 1, 0).with_directions(Direction::x(), Direction::x()),
    ];
    for cfg in cases {
        let r = order_independence_check(&cfg).unwrap();
        assert!(r.max_abs_diff < 1e-12);
        assert_eq!(r.victor_first.len(), 16);
        assert!((r.victor_first.values().sum::<f64>() - 1.0).abs() < 1e-12);
        let joint = joint_distribution(&cfg).unwrap();
        for (k, p) in &joint {
            assert!((p - r.victor_first[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn config_validation() {
    assert!(run_experiment(&ExperimentConfig::new(0.5, 0, 0)).is_err());
    assert!(run_experiment(&ExperimentConfig::new(1.5, 10, 0)).is_err());
    let mut cfg = ExperimentConfig::new(0.5, 10, 0);
    cfg.timing.victor_delay_ns = 0.0;
    assert!(run_experiment(&cfg).is_err());
    cfg.timing.victor_delay_ns = 50.0;
    cfg.timing.source_to_ab_ns = -1.0;
    assert!(run_experiment(&cfg).is_err());
    assert_eq!(
        "separable-z".parse::<VictorMode>().unwrap(),
        VictorMode::SeparableZ
    );
    assert!("bell".parse::<VictorMode>().is_err());
}
