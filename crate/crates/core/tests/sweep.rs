use risbeam_core::evaluation::{paired_difference, run_sweep, ScenarioConfig, Variant};
use risbeam_core::Position3D;

fn config() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::with_defaults(
        "sweep",
        350e9,
        Position3D::new(-4.0, -4.0, -2.0),
        Position3D::ORIGIN,
        vec![
            Position3D::new(2.0, 2.0, 1.0),
            Position3D::new(0.0, 3.4, 0.85),
            Position3D::new(4.0, 0.0, 2.07),
            Position3D::new(0.0, 0.0, 5.8),
        ],
        4,
        4,
        4,
    )
    .unwrap();
    cfg.trials = 40;
    cfg.seed = 77;
    cfg
}

#[test]
fn sweep_does_not_depend_on_thread_count() {
    let cfg = config();
    let many = run_sweep(&cfg, &Variant::ALL).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let one = pool.install(|| run_sweep(&cfg, &Variant::ALL)).unwrap();
    assert_eq!(many, one);
}

#[test]
fn variants_share_trials() {
    let cfg = config();
    let all = run_sweep(&cfg, &Variant::ALL).unwrap();
    let alone = run_sweep(&cfg, &[Variant::Estimated]).unwrap();
    assert_eq!(all[2].samples, alone[0].samples);
    assert_eq!(all[0].points.len(), cfg.transmit_power_dbm.len());
    for r in &all {
        assert_eq!(r.samples[0].len(), cfg.trials);
    }
    let (d, _) = paired_difference(&all[2].samples[6], &all[0].samples[6]);
    assert!(d > 0.0);
}
