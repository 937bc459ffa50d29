//! Codebook refinement of the receive beam and RIS phases inside the cone of
//! directions allowed by the positioning error.

use num_complex::Complex64;

use super::codebook::AngularLattice;
use super::ris::directional_phase;
use crate::channel::{project, steering_vector, UpaShape};
use crate::error::{Error, Result};
use crate::geometry::AnglePair;
use crate::linalg::{CMatrix, CVector};

/// Termination rule of the alternating search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbaParams {
    pub max_iters: usize,
    /// Stop once the relative objective gain of an iteration falls below this.
    pub tolerance: f64,
}

impl Default for PbaParams {
    fn default() -> Self {
        Self {
            max_iters: 20,
            tolerance: 1e-6,
        }
    }
}

/// Everything the search needs about one user and its serving sub-RIS.
#[derive(Debug, Clone)]
pub struct PbaProblem<'a> {
    /// True RIS-user block `H_kk` (user elements x sub-RIS elements).
    pub h: &'a CMatrix,
    /// Field incident on the sub-RIS, `G_kk w_k`.
    pub incident: &'a CVector,
    /// Arrival steering vector used to build codebook reflections.
    pub a_sa: &'a CVector,
    pub user_shape: UpaShape,
    pub ris_shape: UpaShape,
    pub wavelength: f64,
    pub v_init: CVector,
    pub q_init: CVector,
    /// Location-derived AOA at the user and AOD at the sub-RIS.
    pub aoa_user: AnglePair,
    pub aod_ris: AnglePair,
    pub error_radius: f64,
    /// Estimated sub-RIS to user distance.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PbaOutcome {
    pub v: CVector,
    pub q: CVector,
    pub iterations: usize,
    /// Objective before the first iteration and after each one.
    pub trace: Vec<f64>,
    pub receive_candidates: usize,
    pub ris_candidates: usize,
    /// Codebook entries scored over the whole search.
    pub evaluations: usize,
    /// A sub-codebook came out empty; the initial beams were kept.
    pub fallback: bool,
}

impl PbaOutcome {
    pub fn objective(&self) -> f64 {
        *self.trace.last().unwrap_or(&0.0)
    }
}

/// `|v^H H diag(q) g|^2`.
pub fn pba_objective(v: &CVector, h: &CMatrix, q: &CVector, incident: &CVector) -> f64 {
    let u = h * q.component_mul(incident);
    v.dotc(&u).norm_sqr()
}

/// Half-angle of the cone subtended by an error sphere of radius `r_e` at
/// distance `d`: `asin(min(1, r_e / d))`.
pub fn error_cone_half_angle(error_radius: f64, distance: f64) -> f64 {
    if !(error_radius > 0.0) {
        return 0.0;
    }
    (error_radius / distance).min(1.0).asin()
}

/// Alternating search over the cone-restricted receive and RIS codebooks.
///
/// A candidate replaces the current beam only if it raises the objective,
/// so the trace never decreases and a search whose sub-codebooks hold no
/// better entry returns its input unchanged.
pub fn pba(
    problem: &PbaProblem<'_>,
    user_lattice: &AngularLattice,
    ris_lattice: &AngularLattice,
    params: &PbaParams,
) -> Result<PbaOutcome> {
    let p = problem;
    if p.h.nrows() != p.v_init.len() || p.h.ncols() != p.q_init.len() || p.incident.len() != p.q_init.len() {
        return Err(Error::dimension("PBA inputs do not conform"));
    }
    if p.a_sa.len() != p.ris_shape.len() || p.q_init.len() != p.ris_shape.len() || p.v_init.len() != p.user_shape.len()
    {
        return Err(Error::dimension("PBA array shapes do not match the channel block"));
    }
    if !(p.distance > 0.0) {
        return Err(Error::domain("PBA needs a positive user distance"));
    }
    let half = error_cone_half_angle(p.error_radius, p.distance);
    let v_set = user_lattice.points_in_cone(&p.aoa_user, half);
    let q_set = ris_lattice.points_in_cone(&p.aod_ris, half);

    let mut v = p.v_init.clone();
    let mut q = p.q_init.clone();
    let mut best = pba_objective(&v, p.h, &q, p.incident);
    let mut out = PbaOutcome {
        v: v.clone(),
        q: q.clone(),
        iterations: 0,
        trace: vec![best],
        receive_candidates: v_set.len(),
        ris_candidates: q_set.len(),
        evaluations: 0,
        fallback: false,
    };
    if v_set.is_empty() || q_set.is_empty() {
        out.fallback = true;
        return Ok(out);
    }

    let n_ris = p.ris_shape.len() as f64;
    let a_sa_conj: CVector = p.a_sa.map(|z| z.conj());
    for it in 0..params.max_iters {
        let start = best;

        // Receive beam with the reflection fixed.
        let u = p.h * q.component_mul(p.incident);
        let mut pick = None;
        for (i, ang) in v_set.iter().enumerate() {
            let val = project(&p.user_shape, ang, p.wavelength, u.as_slice()).norm_sqr();
            if val > best * (1.0 + 1e-12) {
                best = val;
                pick = Some(i);
            }
        }
        if let Some(i) = pick {
            v = steering_vector(&p.user_shape, &v_set[i], p.wavelength).entries;
        }

        // Reflection with the receive beam fixed. For q_d = sqrt(N) a_sd(d) . conj(a_sa),
        // |q_d^T x|^2 = N |a_sd(d)^H conj(conj(a_sa) . x)|^2.
        let x = (p.h.transpose() * v.map(|z| z.conj())).component_mul(p.incident);
        let y: Vec<Complex64> = x.iter().zip(a_sa_conj.iter()).map(|(a, b)| (a * b).conj()).collect();
        let mut pick = None;
        for (i, ang) in q_set.iter().enumerate() {
            let val = n_ris * project(&p.ris_shape, ang, p.wavelength, &y).norm_sqr();
            if val > best * (1.0 + 1e-12) {
                best = val;
                pick = Some(i);
            }
        }
        if let Some(i) = pick {
            q = directional_phase(&p.ris_shape, &q_set[i], p.a_sa, p.wavelength);
        }

        out.evaluations += v_set.len() + q_set.len();
        out.iterations = it + 1;
        out.trace.push(best);
        if start <= 0.0 || (best - start) / start < params.tolerance {
            break;
        }
    }
    out.v = v;
    out.q = q;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::ris::closed_form_ris_phase;
    use crate::rng::seeded;
    use rand::Rng;

    const LAMBDA: f64 = 1e-3;

    struct Fixture {
        h: CMatrix,
        g: CVector,
        a_sa: CVector,
        ue: UpaShape,
        ris: UpaShape,
        aod_true: AnglePair,
    }

    fn fixture(seed: u64) -> Fixture {
        let mut rng = seeded(seed);
        let ue = UpaShape::new(4, 4, LAMBDA / 2.0);
        let ris = UpaShape::new(4, 4, LAMBDA / 2.0);
        let aod_true = AnglePair::new(rng.random_range(-3.0..3.0), rng.random_range(0.2..1.2)).unwrap();
        let a_r = steering_vector(&ue, &aod_true.negated(), LAMBDA).entries;
        let a_sd = steering_vector(&ris, &aod_true, LAMBDA).entries;
        let h = &a_r * a_sd.adjoint() * Complex64::new(16.0, 0.0);
        let a_sa = steering_vector(&ris, &AnglePair::new(-2.0, 0.4).unwrap(), LAMBDA).entries;
        let g = a_sa.clone() * Complex64::new(0.0, 4.0);
        Fixture {
            h,
            g,
            a_sa,
            ue,
            ris,
            aod_true,
        }
    }

    fn problem<'a>(f: &'a Fixture, est: AnglePair, r_e: f64) -> PbaProblem<'a> {
        let v = steering_vector(&f.ue, &est.negated(), LAMBDA).entries;
        let a_sd = steering_vector(&f.ris, &est, LAMBDA).entries;
        let h_est = &v * a_sd.adjoint();
        let q = closed_form_ris_phase(&h_est, &v, &f.a_sa).unwrap().q;
        PbaProblem {
            h: &f.h,
            incident: &f.g,
            a_sa: &f.a_sa,
            user_shape: f.ue,
            ris_shape: f.ris,
            wavelength: LAMBDA,
            v_init: v,
            q_init: q,
            aoa_user: est.negated(),
            aod_ris: est,
            error_radius: r_e,
            distance: 3.0,
        }
    }

    #[test]
    fn zero_radius_returns_input() {
        let f = fixture(1);
        let est = AnglePair::new(f.aod_true.azimuth + 0.03, f.aod_true.elevation - 0.02).unwrap();
        let pr = problem(&f, est, 0.0);
        let lat = AngularLattice::new(0.5f64.to_radians()).unwrap();
        let out = pba(&pr, &lat, &lat, &PbaParams::default()).unwrap();
        assert_eq!(out.v, pr.v_init);
        assert_eq!(out.q, pr.q_init);
        assert!(out.fallback);
    }

    #[test]
    fn lattice_centered_estimate_keeps_input_when_cone_is_a_point() {
        let f = fixture(2);
        let r = 0.5f64.to_radians();
        let est = AnglePair::new(40.0 * r, 30.0 * r).unwrap();
        let pr = problem(&f, est, 0.0);
        let lat = AngularLattice::new(r).unwrap();
        let out = pba(&pr, &lat, &lat, &PbaParams::default()).unwrap();
        assert!(!out.fallback);
        assert_eq!(out.v, pr.v_init);
        assert_eq!(out.q, pr.q_init);
    }

    #[test]
    fn trace_is_nondecreasing_and_improves_misaligned_start() {
        let lat = AngularLattice::new(0.5f64.to_radians()).unwrap();
        let mut improved = 0;
        for seed in 0..20 {
            let f = fixture(seed);
            let est = AnglePair::new(f.aod_true.azimuth + 0.02, f.aod_true.elevation + 0.015).unwrap();
            let pr = problem(&f, est, 0.1);
            let out = pba(&pr, &lat, &lat, &PbaParams::default()).unwrap();
            assert!(out.iterations <= 20);
            for w in out.trace.windows(2) {
                assert!(w[1] >= w[0]);
            }
            let direct = pba_objective(&out.v, &f.h, &out.q, &f.g);
            assert!((direct - out.objective()).abs() <= 1e-9 * direct);
            if out.objective() > out.trace[0] * (1.0 + 1e-9) {
                improved += 1;
            }
        }
        assert!(improved >= 15, "{improved}");
    }

    #[test]
    fn cone_half_angle() {
        assert_eq!(error_cone_half_angle(0.0, 3.0), 0.0);
        assert!((error_cone_half_angle(0.1, 3.0) - (0.1f64 / 3.0).asin()).abs() < 1e-15);
        assert_eq!(error_cone_half_angle(5.0, 3.0), std::f64::consts::FRAC_PI_2);
    }
}
