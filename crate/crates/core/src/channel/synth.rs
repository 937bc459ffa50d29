//! Random synthesis of the BS-RIS, RIS-user and direct BS-user channels.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::pathloss::PathLossModel;
use super::steering::{steering_vector, UpaShape};
use crate::error::{Error, Result};
use crate::geometry::{link_angles, wrap_azimuth, AnglePair, ArrayGeometry, FieldRegion, Position3D};
use crate::linalg::{CMatrix, CVector};

/// Scattered-path statistics around a LOS ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlosProfile {
    pub count: usize,
    /// Per-path attenuation relative to the LOS power, dB, drawn uniformly.
    pub attenuation_db: (f64, f64),
    /// Full angular spread, radians; offsets are uniform in +-spread/2.
    pub angular_spread: f64,
}

impl NlosProfile {
    pub fn new(count: usize, attenuation_db: (f64, f64), angular_spread: f64) -> Result<Self> {
        let p = Self {
            count,
            attenuation_db,
            angular_spread,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn los_only() -> Self {
        Self {
            count: 0,
            attenuation_db: (10.0, 20.0),
            angular_spread: 40f64.to_radians(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.attenuation_db;
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::domain("attenuation range must satisfy min <= max"));
        }
        if !(self.angular_spread > 0.0) || !self.angular_spread.is_finite() {
            return Err(Error::domain("angular spread must be positive"));
        }
        Ok(())
    }

    fn draw_attenuation<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (lo, hi) = self.attenuation_db;
        let a = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        10f64.powf(-a / 20.0)
    }

    fn perturb<R: Rng + ?Sized>(&self, base: &AnglePair, rng: &mut R) -> AnglePair {
        let h = self.angular_spread / 2.0;
        let az = base.azimuth + rng.random_range(-h..=h);
        let el = base.elevation + rng.random_range(-h..=h);
        AnglePair {
            azimuth: wrap_azimuth(az),
            elevation: el.clamp(-PI / 2.0, PI / 2.0),
        }
    }
}

impl Default for NlosProfile {
    fn default() -> Self {
        Self {
            count: 2,
            attenuation_db: (10.0, 20.0),
            angular_spread: 40f64.to_radians(),
        }
    }
}

/// Which link a matrix describes; fixes the meaning of rows and columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// `G`: RIS elements x BS elements.
    BsToRis,
    /// `H_k`: user elements x RIS elements.
    RisToUser,
    /// `Q_k`: user elements x BS elements (NLOS only).
    BsToUser,
}

/// One rank-one term of a channel block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub row_block: usize,
    pub col_block: usize,
    /// Complex path gain before the array-size factor.
    pub gain: Complex64,
    /// Extra amplitude factor applied on top of `gain`.
    pub scale: f64,
    /// Angles at the row-side array.
    pub arrival: AnglePair,
    /// Angles at the column-side array.
    pub departure: AnglePair,
    /// LOS length of the block this term belongs to, meters.
    pub distance: f64,
    pub is_los: bool,
}

/// A dense channel matrix partitioned into equal blocks, with the path terms
/// that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: CMatrix,
    pub kind: ChannelKind,
    /// Elements per row block (user array, sub-RIS, ...).
    pub row_block_len: usize,
    /// Elements per column block.
    pub col_block_len: usize,
    pub components: Vec<PathComponent>,
}

impl ChannelMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn row_blocks(&self) -> usize {
        self.nrows() / self.row_block_len
    }

    pub fn col_blocks(&self) -> usize {
        self.ncols() / self.col_block_len
    }

    /// Copy of block `(r, c)`.
    pub fn block(&self, r: usize, c: usize) -> CMatrix {
        self.entries
            .view(
                (r * self.row_block_len, c * self.col_block_len),
                (self.row_block_len, self.col_block_len),
            )
            .into_owned()
    }

    pub fn components_of(&self, r: usize, c: usize) -> impl Iterator<Item = &PathComponent> {
        self.components
            .iter()
            .filter(move |p| p.row_block == r && p.col_block == c)
    }

    pub fn zeros(kind: ChannelKind, rows: usize, cols: usize, row_block_len: usize, col_block_len: usize) -> Self {
        Self {
            entries: CMatrix::zeros(rows, cols),
            kind,
            row_block_len,
            col_block_len,
            components: Vec::new(),
        }
    }
}

/// Which cascade law the RIS-user blocks are normalized to, and where the BS
/// sits; see [`PathLossModel::cascade_correction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeScaling {
    pub bs_center: Position3D,
    pub region: FieldRegion,
}

fn add_outer(m: &mut CMatrix, r0: usize, c0: usize, coef: Complex64, row_vec: &CVector, col_vec: &CVector) {
    for (j, b) in col_vec.iter().enumerate() {
        let cb = coef * b.conj();
        for (i, a) in row_vec.iter().enumerate() {
            m[(r0 + i, c0 + j)] += a * cb;
        }
    }
}

struct Assembler {
    m: CMatrix,
    row_shape: UpaShape,
    col_shape: UpaShape,
    wavelength: f64,
    components: Vec<PathComponent>,
}

impl Assembler {
    fn new(row_shape: UpaShape, row_blocks: usize, col_shape: UpaShape, col_blocks: usize, wavelength: f64) -> Self {
        Self {
            m: CMatrix::zeros(row_shape.len() * row_blocks, col_shape.len() * col_blocks),
            row_shape,
            col_shape,
            wavelength,
            components: Vec::new(),
        }
    }

    fn push(&mut self, p: PathComponent) {
        let a = steering_vector(&self.row_shape, &p.arrival, self.wavelength).entries;
        let b = steering_vector(&self.col_shape, &p.departure, self.wavelength).entries;
        let size = ((self.row_shape.len() * self.col_shape.len()) as f64).sqrt();
        add_outer(
            &mut self.m,
            p.row_block * self.row_shape.len(),
            p.col_block * self.col_shape.len(),
            p.gain * (size * p.scale),
            &a,
            &b,
        );
        self.components.push(p);
    }

    fn finish(self, kind: ChannelKind) -> ChannelMatrix {
        ChannelMatrix {
            row_block_len: self.row_shape.len(),
            col_block_len: self.col_shape.len(),
            entries: self.m,
            kind,
            components: self.components,
        }
    }
}

/// Adds one LOS term and `nlos.count` scattered terms to block `(r, c)`.
#[allow(clippy::too_many_arguments)]
fn los_block<R: Rng + ?Sized>(
    asm: &mut Assembler,
    r: usize,
    c: usize,
    arrival: AnglePair,
    departure: AnglePair,
    distance: f64,
    scale: f64,
    model: &PathLossModel,
    nlos: &NlosProfile,
    rng: &mut R,
) -> Result<()> {
    let los = model.los_gain(distance)?;
    asm.push(PathComponent {
        row_block: r,
        col_block: c,
        gain: los,
        scale,
        arrival,
        departure,
        distance,
        is_los: true,
    });
    for _ in 0..nlos.count {
        let att = nlos.draw_attenuation(rng);
        let phase = rng.random_range(0.0..2.0 * PI);
        let arr = nlos.perturb(&arrival, rng);
        let dep = nlos.perturb(&departure, rng);
        asm.push(PathComponent {
            row_block: r,
            col_block: c,
            gain: Complex64::from_polar(los.norm() * att, phase),
            scale,
            arrival: arr,
            departure: dep,
            distance,
            is_los: false,
        });
    }
    Ok(())
}

/// BS-RIS channel `G` with every (sub-RIS, BS subarray) block populated.
pub fn synthesize_g<R: Rng + ?Sized>(
    bs: &ArrayGeometry,
    ris: &ArrayGeometry,
    model: &PathLossModel,
    nlos: &NlosProfile,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    bs.validate()?;
    ris.validate()?;
    nlos.validate()?;
    let mut asm = Assembler::new(
        ris.into(),
        ris.block_count(),
        bs.into(),
        bs.block_count(),
        model.wavelength(),
    );
    for s in 0..ris.block_count() {
        for b in 0..bs.block_count() {
            let l = link_angles(
                ris.block_center(s),
                &ris.orientation,
                bs.block_center(b),
                &bs.orientation,
            )?;
            los_block(
                &mut asm,
                s,
                b,
                l.at_reference,
                l.at_remote,
                l.distance,
                1.0,
                model,
                nlos,
                rng,
            )?;
        }
    }
    Ok(asm.finish(ChannelKind::BsToRis))
}

/// RIS-user channel `H_k` for the user array `user` (one block).
///
/// With `scaling`, each sub-RIS block is multiplied by the cascade correction
/// for `d1` = BS-center to sub-RIS distance and `d2` = sub-RIS to user
/// distance, so that `|beta_1 beta_2|^2` of the cascade follows the near- or
/// far-field cascade law instead of the bare product of two hop losses.
pub fn synthesize_h<R: Rng + ?Sized>(
    user: &ArrayGeometry,
    ris: &ArrayGeometry,
    model: &PathLossModel,
    nlos: &NlosProfile,
    scaling: Option<&CascadeScaling>,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    user.validate()?;
    ris.validate()?;
    nlos.validate()?;
    if user.block_count() != 1 {
        return Err(Error::dimension("a user array has exactly one block"));
    }
    let mut asm = Assembler::new(user.into(), 1, ris.into(), ris.block_count(), model.wavelength());
    for s in 0..ris.block_count() {
        let center = ris.block_center(s);
        let l = link_angles(center, &ris.orientation, user.center, &user.orientation)?;
        let scale = match scaling {
            Some(sc) => model.cascade_correction(center.distance(&sc.bs_center), l.distance, sc.region)?,
            None => 1.0,
        };
        los_block(
            &mut asm,
            0,
            s,
            l.at_remote,
            l.at_reference,
            l.distance,
            scale,
            model,
            nlos,
            rng,
        )?;
    }
    Ok(asm.finish(ChannelKind::RisToUser))
}

/// Direct BS-user channel `Q_k`: scattered paths only.
///
/// Each path has one arrival and one departure direction shared by all BS
/// subarrays, a power `A` dB below the LOS gain at the BS-user distance, and
/// an independent phase per subarray. The rank is therefore at most
/// `nlos.count`. A zero count yields the zero matrix.
pub fn synthesize_direct_q<R: Rng + ?Sized>(
    bs: &ArrayGeometry,
    user: &ArrayGeometry,
    model: &PathLossModel,
    nlos: &NlosProfile,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    bs.validate()?;
    user.validate()?;
    nlos.validate()?;
    let mut asm = Assembler::new(user.into(), 1, bs.into(), bs.block_count(), model.wavelength());
    if nlos.count == 0 {
        return Ok(asm.finish(ChannelKind::BsToUser));
    }
    let l = link_angles(user.center, &user.orientation, bs.center, &bs.orientation)?;
    let los_mag = model.los_gain_sq(l.distance)?.sqrt();
    for _ in 0..nlos.count {
        let att = nlos.draw_attenuation(rng);
        let arr = nlos.perturb(&l.at_reference, rng);
        let dep = nlos.perturb(&l.at_remote, rng);
        for b in 0..bs.block_count() {
            let phase = rng.random_range(0.0..2.0 * PI);
            asm.push(PathComponent {
                row_block: 0,
                col_block: b,
                gain: Complex64::from_polar(los_mag * att, phase),
                scale: 1.0,
                arrival: arr,
                departure: dep,
                distance: l.distance,
                is_los: false,
            });
        }
    }
    Ok(asm.finish(ChannelKind::BsToUser))
}

/// Block-diagonal reflection matrix `O = diag(q_1, ..., q_L)`.
pub fn reflection_matrix(phases: &[CVector]) -> CMatrix {
    let n: usize = phases.iter().map(|q| q.len()).sum();
    let mut o = CMatrix::zeros(n, n);
    let mut i = 0;
    for q in phases {
        for z in q.iter() {
            o[(i, i)] = *z;
            i += 1;
        }
    }
    o
}

/// Cascaded channel `T = H O G`.
pub fn cascade(h: &CMatrix, o: &CMatrix, g: &CMatrix) -> Result<CMatrix> {
    if h.ncols() != o.nrows() || o.ncols() != g.nrows() {
        return Err(Error::dimension(format!(
            "cannot form H O G from {}x{}, {}x{}, {}x{}",
            h.nrows(),
            h.ncols(),
            o.nrows(),
            o.ncols(),
            g.nrows(),
            g.ncols()
        )));
    }
    Ok(h * o * g)
}

/// `H diag(q) G` for a diagonal reflection given as its phase vector.
pub fn cascade_diag(h: &CMatrix, q: &CVector, g: &CMatrix) -> Result<CMatrix> {
    if h.ncols() != q.len() || q.len() != g.nrows() {
        return Err(Error::dimension("reflection length does not match H and G"));
    }
    let mut hq = h.clone();
    for (j, z) in q.iter().enumerate() {
        for x in hq.column_mut(j).iter_mut() {
            *x *= z;
        }
    }
    Ok(hq * g)
}
