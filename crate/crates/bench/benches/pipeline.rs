use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use risbeam_core::beamforming::{
    closed_form_ris_phase, design_receive_beam, pba, AngularLattice, PbaParams, PbaProblem,
};
use risbeam_core::channel::{steering_vector, UpaShape};
use risbeam_core::evaluation::{ScenarioConfig, Simulator, Variant};
use risbeam_core::geometry::link_angles;
use risbeam_core::linalg::CMatrix;
use risbeam_core::localization::{multilaterate, range_measurements, HalfSpace, RangingErrorModel, UwbAnchorSet};
use risbeam_core::rng::seeded;
use risbeam_core::{AnglePair, Complex64, Orientation, Position3D, SPEED_OF_LIGHT};

fn far_field(n: usize) -> ScenarioConfig {
    let users = vec![
        Position3D::new(2.0, 2.0, 1.0),
        Position3D::new(0.0, 3.4, 0.85),
        Position3D::new(4.0, 0.0, 2.07),
        Position3D::new(0.0, 0.0, 5.8),
    ];
    let mut cfg = ScenarioConfig::with_defaults(
        "bench",
        350e9,
        Position3D::new(-4.0, -4.0, -2.0),
        Position3D::ORIGIN,
        users,
        n,
        n,
        n,
    )
    .unwrap();
    cfg.flags.random_phase_baseline = true;
    cfg
}

fn trial(c: &mut Criterion) {
    let mut group = c.benchmark_group("trial");
    for n in [4, 8] {
        let cfg = far_field(n);
        let sim = Simulator::new(&cfg).unwrap();
        let variants = cfg.flags.enabled_variants();
        group.bench_function(format!("prepare_{n}x{n}"), |b| {
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                black_box(sim.prepare(seed, &variants).unwrap())
            })
        });
        let prepared = sim.prepare(1, &variants).unwrap();
        group.bench_function(format!("evaluate_{n}x{n}"), |b| {
            b.iter(|| black_box(prepared.evaluate(&sim, Variant::EstimatedPba, 6).unwrap()))
        });
    }
    group.finish();
}

fn localization(c: &mut Criterion) {
    let set = UwbAnchorSet::at_corners(
        Position3D::ORIGIN,
        &Orientation::identity(),
        1.0,
        0.05,
        RangingErrorModel::Gaussian,
    )
    .unwrap();
    let user = Position3D::new(1.0, 2.0, 3.0);
    let mut rng = seeded(5);
    c.bench_function("multilaterate", |b| {
        b.iter_batched(
            || range_measurements(&set, user, &mut rng).unwrap(),
            |r| black_box(multilaterate(&set, &r, HalfSpace::Positive)),
            BatchSize::SmallInput,
        )
    });
}

fn refinement(c: &mut Criterion) {
    let lambda = SPEED_OF_LIGHT / 350e9;
    let ris_shape = UpaShape::new(8, 8, lambda / 2.0);
    let user_shape = UpaShape::new(4, 4, lambda / 2.0);
    let id = Orientation::identity();
    let user = Position3D::new(1.0, 1.0, 7.0f64.sqrt());
    let truth = link_angles(Position3D::ORIGIN, &id, user, &id).unwrap();
    let h: CMatrix = steering_vector(&user_shape, &truth.at_remote, lambda).entries
        * steering_vector(&ris_shape, &truth.at_reference, lambda)
            .entries
            .adjoint();
    let a_sa = steering_vector(&ris_shape, &AnglePair::new(-2.4, 0.5).unwrap(), lambda).entries;
    let incident = a_sa.map(|z| z * Complex64::new((ris_shape.len() as f64).sqrt(), 0.0));
    // A fixed 5 cm position error.
    let guess = link_angles(Position3D::ORIGIN, &id, user + Position3D::new(0.05, 0.0, 0.0), &id).unwrap();
    let v_init = design_receive_beam(&guess.at_remote, &user_shape, lambda);
    let h_hat = steering_vector(&user_shape, &guess.at_remote, lambda).entries
        * steering_vector(&ris_shape, &guess.at_reference, lambda)
            .entries
            .adjoint();
    let q_init = closed_form_ris_phase(&h_hat, &v_init, &a_sa).unwrap().q;
    let lattice = AngularLattice::new(0.5f64.to_radians()).unwrap();
    let problem = PbaProblem {
        h: &h,
        incident: &incident,
        a_sa: &a_sa,
        user_shape,
        ris_shape,
        wavelength: lambda,
        v_init,
        q_init,
        aoa_user: guess.at_remote,
        aod_ris: guess.at_reference,
        error_radius: 0.1,
        distance: guess.distance,
    };
    c.bench_function("pba_8x8_ris", |b| {
        b.iter(|| black_box(pba(&problem, &lattice, &lattice, &PbaParams::default()).unwrap()))
    });
}

criterion_group!(benches, trial, localization, refinement);
criterion_main!(benches);
