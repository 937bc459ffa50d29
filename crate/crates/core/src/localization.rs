//! UWB ranging from four RIS-mounted anchors and 3D multilateration.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channel::PathLossModel;
use crate::error::{Error, Result};
use crate::geometry::{angles_subris_to_user, AnglePair, Orientation, Position3D};

/// `sqrt` of the 0.999 quantile of a chi-square with three degrees of freedom.
const RADIUS_SIGMAS: f64 = 4.0331;
const MAX_ITERS: usize = 50;

/// Statistical law of the additive ranging error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangingErrorModel {
    /// Zero-mean Gaussian with standard deviation `epsilon`.
    #[default]
    Gaussian,
    /// Uniform on `[-epsilon, epsilon]`.
    Uniform,
}

/// Side of the anchor plane the users are served on, along the plane normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfSpace {
    #[default]
    Positive,
    Negative,
}

impl HalfSpace {
    fn sign(self) -> f64 {
        match self {
            HalfSpace::Positive => 1.0,
            HalfSpace::Negative => -1.0,
        }
    }
}

/// Four coplanar UWB anchors and their ranging error.
#[derive(Debug, Clone, PartialEq)]
pub struct UwbAnchorSet {
    anchors: [Position3D; 4],
    pub epsilon: f64,
    pub error_model: RangingErrorModel,
    centroid: Position3D,
    /// Orthonormal in-plane axes and the plane normal.
    e1: Position3D,
    e2: Position3D,
    normal: Position3D,
}

impl UwbAnchorSet {
    /// Anchors must be coplanar and not collinear. The plane normal is
    /// oriented by the right-hand rule over the first three anchors.
    pub fn new(anchors: [Position3D; 4], epsilon: f64, error_model: RangingErrorModel) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::domain("ranging error must be nonnegative"));
        }
        if anchors.iter().any(|a| !a.is_finite()) {
            return Err(Error::domain("anchor positions must be finite"));
        }
        let centroid = anchors.iter().fold(Position3D::ORIGIN, |s, a| s + *a) * 0.25;
        let span = anchors.iter().map(|a| a.distance(&centroid)).fold(0.0, f64::max);
        let e1v = anchors[1] - anchors[0];
        let n = e1v.cross(&(anchors[2] - anchors[0]));
        if !(span > 0.0) || n.norm() <= 1e-12 * span * span {
            return Err(Error::domain("anchors are collinear"));
        }
        let normal = n.normalized();
        if anchors.iter().any(|a| (*a - centroid).dot(&normal).abs() > 1e-9 * span) {
            return Err(Error::domain("anchors are not coplanar"));
        }
        let e1 = e1v.normalized();
        let e2 = normal.cross(&e1);
        Ok(Self {
            anchors,
            epsilon,
            error_model,
            centroid,
            e1,
            e2,
            normal,
        })
    }

    /// Anchors at the corners of a `span x span` square in the local x-y
    /// plane of an array centered at `center`; the normal is local +z.
    pub fn at_corners(
        center: Position3D,
        orientation: &Orientation,
        span: f64,
        epsilon: f64,
        error_model: RangingErrorModel,
    ) -> Result<Self> {
        if !(span > 0.0) {
            return Err(Error::domain("anchor span must be positive"));
        }
        let h = span / 2.0;
        let corner = |x: f64, y: f64| center + orientation.local_to_global(Position3D::new(x, y, 0.0));
        Self::new(
            [corner(-h, -h), corner(h, -h), corner(h, h), corner(-h, h)],
            epsilon,
            error_model,
        )
    }

    pub fn anchors(&self) -> &[Position3D; 4] {
        &self.anchors
    }

    pub fn normal(&self) -> Position3D {
        self.normal
    }

    /// Standard deviation of one ranging error.
    pub fn error_std(&self) -> f64 {
        match self.error_model {
            RangingErrorModel::Gaussian => self.epsilon,
            RangingErrorModel::Uniform => self.epsilon / 3f64.sqrt(),
        }
    }

    fn to_local(&self, p: Position3D) -> Vector3<f64> {
        let d = p - self.centroid;
        Vector3::new(d.dot(&self.e1), d.dot(&self.e2), d.dot(&self.normal))
    }

    fn to_global(&self, v: &Vector3<f64>) -> Position3D {
        self.centroid + self.e1 * v.x + self.e2 * v.y + self.normal * v.z
    }
}

/// Noisy ranges `|user - anchor_i| + e_i`.
pub fn range_measurements<R: Rng + ?Sized>(set: &UwbAnchorSet, user: Position3D, rng: &mut R) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (o, a) in out.iter_mut().zip(set.anchors.iter()) {
        let d = user.distance(a);
        if !(d > 0.0) {
            return Err(Error::domain("user coincides with an anchor"));
        }
        let e = if set.epsilon == 0.0 {
            0.0
        } else {
            match set.error_model {
                RangingErrorModel::Gaussian => Normal::new(0.0, set.epsilon)
                    .map_err(|e| Error::domain(e.to_string()))?
                    .sample(rng),
                RangingErrorModel::Uniform => rng.random_range(-set.epsilon..=set.epsilon),
            }
        };
        *o = d + e;
    }
    Ok(out)
}

/// Multilateration output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionEstimate {
    pub position: Position3D,
    /// Conservative bound on the position error, meters.
    pub error_radius: f64,
    /// The solution lies (numerically) on the anchor plane, so the mirror
    /// ambiguity could not be resolved.
    pub degenerate: bool,
    pub iterations: usize,
    /// RMS of the range residuals at the solution, meters.
    pub residual_rms: f64,
}

impl PositionEstimate {
    /// An exact estimate with zero error radius.
    pub fn exact(position: Position3D) -> Self {
        Self {
            position,
            error_radius: 0.0,
            degenerate: false,
            iterations: 0,
            residual_rms: 0.0,
        }
    }
}

/// Closed-form start: in-plane coordinates from the differenced sphere
/// equations, normal offset from the mean remaining squared range.
fn initial_guess(local: &[Vector3<f64>; 4], ranges: &[f64; 4]) -> Result<Vector3<f64>> {
    let mut ata = Matrix2::zeros();
    let mut atb = Vector2::zeros();
    let (a0, r0) = (local[0], ranges[0]);
    for i in 1..4 {
        let a = local[i];
        let row = Vector2::new(2.0 * (a.x - a0.x), 2.0 * (a.y - a0.y));
        let rhs = a.norm_squared() - a0.norm_squared() - (ranges[i] * ranges[i] - r0 * r0);
        ata += row * row.transpose();
        atb += row * rhs;
    }
    let xy = ata
        .try_inverse()
        .ok_or_else(|| Error::EstimationFailure("anchor geometry is singular".into()))?
        * atb;
    let z2 = local
        .iter()
        .zip(ranges)
        .map(|(a, r)| r * r - (xy.x - a.x).powi(2) - (xy.y - a.y).powi(2))
        .sum::<f64>()
        / 4.0;
    Ok(Vector3::new(xy.x, xy.y, z2.max(0.0).sqrt()))
}

fn residuals(local: &[Vector3<f64>; 4], ranges: &[f64; 4], p: &Vector3<f64>) -> ([f64; 4], [Vector3<f64>; 4]) {
    let mut r = [0.0; 4];
    let mut j = [Vector3::zeros(); 4];
    for i in 0..4 {
        let d = p - local[i];
        let n = d.norm();
        r[i] = n - ranges[i];
        j[i] = if n > 0.0 { d / n } else { Vector3::zeros() };
    }
    (r, j)
}

fn cost(local: &[Vector3<f64>; 4], ranges: &[f64; 4], p: &Vector3<f64>) -> f64 {
    residuals(local, ranges, p).0.iter().map(|x| x * x).sum()
}

fn gauss_newton(local: &[Vector3<f64>; 4], ranges: &[f64; 4], mut p: Vector3<f64>) -> Result<(Vector3<f64>, usize)> {
    let mut iterations = 0;
    for it in 0..MAX_ITERS {
        let (r, j) = residuals(local, ranges, &p);
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for i in 0..4 {
            jtj += j[i] * j[i].transpose();
            jtr += j[i] * r[i];
        }
        let Some(inv) = jtj.try_inverse() else { break };
        let step = inv * jtr;
        if !step.iter().all(|s| s.is_finite()) {
            return Err(Error::EstimationFailure("Gauss-Newton step is not finite".into()));
        }
        p -= step;
        iterations = it + 1;
        if step.norm() <= 1e-14 * (1.0 + p.norm()) {
            break;
        }
    }
    Ok((p, iterations))
}

/// Least-squares position from four ranges.
///
/// Gauss-Newton runs from the closed-form solution on the declared side of
/// the anchor plane and, when the closed form puts the user near the plane,
/// also from two points further out along the normal; the lowest-cost result
/// wins. The returned error radius is `4.03 sigma sqrt(trace((J^T J)^-1))`,
/// with `sigma` the larger of the declared ranging error and the residual RMS.
pub fn multilaterate(set: &UwbAnchorSet, ranges: &[f64; 4], half_space: HalfSpace) -> Result<PositionEstimate> {
    if ranges.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::domain("ranges must be positive"));
    }
    let local = set.anchors.map(|a| set.to_local(a));
    let scale = local.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let sign = half_space.sign();
    let flat_tol = 1e-7 * scale.max(1.0);
    let mean_range = ranges.iter().sum::<f64>() / 4.0;

    let closed = initial_guess(&local, ranges)?;
    let mut starts = vec![Vector3::new(closed.x, closed.y, sign * closed.z)];
    if closed.z < 0.5 * mean_range {
        starts.push(Vector3::new(closed.x, closed.y, sign * 0.5 * mean_range));
        starts.push(Vector3::new(0.0, 0.0, sign * mean_range));
    }
    let mut best: Option<(Vector3<f64>, usize, f64)> = None;
    let mut failure = None;
    for start in starts {
        let found = if start.z.abs() > flat_tol {
            gauss_newton(&local, ranges, start)
        } else {
            Ok((start, 0))
        };
        match found {
            Ok((mut p, it)) if p.iter().all(|s| s.is_finite()) && p.norm() <= 1e9 * (1.0 + scale) => {
                // Both mirror images fit the ranges equally well; keep the declared side.
                if p.z * sign < 0.0 {
                    p.z = -p.z;
                }
                let c = cost(&local, ranges, &p);
                if best.as_ref().is_none_or(|b| c < b.2) {
                    best = Some((p, it, c));
                }
            }
            Ok(_) => failure = Some(Error::EstimationFailure("multilateration diverged".into())),
            Err(e) => failure = Some(e),
        }
    }
    let Some((p, iterations, _)) = best else {
        return Err(failure.unwrap_or_else(|| Error::EstimationFailure("multilateration diverged".into())));
    };
    let degenerate = p.z.abs() <= flat_tol;

    let (r, j) = residuals(&local, ranges, &p);
    let residual_rms = (r.iter().map(|x| x * x).sum::<f64>() / 4.0).sqrt();
    let mut jtj = Matrix3::zeros();
    for ji in &j {
        jtj += ji * ji.transpose();
    }
    let sigma = set.error_std().max(residual_rms);
    let error_radius = if sigma == 0.0 {
        0.0
    } else {
        match jtj.try_inverse() {
            Some(inv) if inv.trace() > 0.0 && !degenerate => RADIUS_SIGMAS * sigma * inv.trace().sqrt(),
            _ => f64::INFINITY,
        }
    };
    Ok(PositionEstimate {
        position: set.to_global(&p),
        error_radius,
        degenerate,
        iterations,
        residual_rms,
    })
}

/// LOS parameters of the sub-RIS to user link derived from a position estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserChannelEstimate {
    pub aod_at_ris: AnglePair,
    pub aoa_at_user: AnglePair,
    pub distance: f64,
    /// `|beta_2|`, magnitude of the LOS gain at the estimated distance.
    pub gain: f64,
}

pub fn estimate_user_channel_params(
    est: &PositionEstimate,
    subris_center: Position3D,
    model: &PathLossModel,
) -> Result<UserChannelEstimate> {
    let (aod, aoa, d) = angles_subris_to_user(est.position, subris_center)?;
    Ok(UserChannelEstimate {
        aod_at_ris: aod,
        aoa_at_user: aoa,
        distance: d,
        gain: model.los_gain_sq(d)?.sqrt(),
    })
}
