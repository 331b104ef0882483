use hierperc_core::classify::ClassifierConfig;
use hierperc_core::sweep::{alpha_sweep, SweepConfig};
use hierperc_core::{ConnectivityProfile, SampleConfig, ScheduleProfile};

fn config(alphas: &[f64], depth: u32) -> SweepConfig {
    let profile = ConnectivityProfile::critical(2, 10.0, 1.0).unwrap();
    SweepConfig {
        base: SampleConfig::new(depth, profile, 0),
        alphas: alphas.to_vec(),
        shells: (1..depth).collect(),
        schedule: ScheduleProfile::new(0.5, 0.0, 10.0, 1.0).unwrap(),
        j_min: 2,
        tol: 1e-10,
        classifier: ClassifierConfig::default(),
    }
}

#[test]
fn extreme_exponents_are_ordered_at_every_shell() {
    let cfg = config(&[0.5, 8.0], 10);
    for seed in 0..5 {
        let r = alpha_sweep(&cfg, seed).unwrap();
        assert!(r.monotone);
        let shells = cfg.shells.len();
        for s in 0..shells {
            let (lo, hi) = (r.rows[s], r.rows[shells + s]);
            assert_eq!(lo.k, hi.k);
            assert!(lo.resistance >= hi.resistance * (1.0 - 1e-6), "{lo:?} {hi:?}");
        }
    }
}

#[test]
fn one_row_per_exponent_and_shell() {
    let cfg = config(&[0.5, 1.0, 2.0], 9);
    let r = alpha_sweep(&cfg, 4).unwrap();
    assert_eq!(r.rows.len(), 3 * 8);
    assert_eq!(r.labels.len(), 3);
    for (i, row) in r.rows.iter().enumerate() {
        assert_eq!(row.alpha, cfg.alphas[i / 8]);
        assert_eq!(row.k, cfg.shells[i % 8]);
        assert!(row.nw_partial >= 0.0);
        // The cutset bound never exceeds the resistance it bounds.
        assert!(row.nw_partial <= row.resistance * (1.0 + 1e-8));
    }
}
