use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::link::{effective_row, received_signal_terms, user_rate};
use super::scenario::{dbm_to_watts, NoiseMode, PrecoderCsi, ScenarioConfig, Variant};
use crate::beamforming::{
    closed_form_ris_phase, design_receive_beam, design_transmit_beam, pba, precoder, AnalogBeamformer, AngularLattice,
    PbaProblem, RisPhaseConfig,
};
use crate::channel::{
    steering_vector, synthesize_direct_q, synthesize_g, synthesize_h, CascadeScaling, ChannelMatrix, PathLossModel,
    UpaShape,
};
use crate::error::{Error, Result};
use crate::geometry::{link_angles, ArrayGeometry, Position3D};
use crate::linalg::{CMatrix, CVector};
use crate::localization::{multilaterate, range_measurements, HalfSpace, PositionEstimate, UwbAnchorSet};
use crate::rng::{Stream, TrialStreams};

/// Outcome of one trial for one variant at one transmit power.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub variant: Variant,
    pub power_dbm: f64,
    pub signal: Vec<f64>,
    pub interference: Vec<f64>,
    pub noise: Vec<f64>,
    pub sinr: Vec<f64>,
    /// bits/s/Hz per user.
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    /// Codebook entries scored by the refinement search, all users.
    pub search_evaluations: usize,
    /// At least one user could not be localized reliably.
    pub degraded: bool,
}

/// Per-scenario state shared by all trials: geometry, the BS beams toward
/// the sub-RISs, the anchors and the pointing lattice.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: ScenarioConfig,
    model: PathLossModel,
    lambda: f64,
    noise_power: f64,
    users: Vec<ArrayGeometry>,
    bs_shape: UpaShape,
    ris_shape: UpaShape,
    ue_shape: UpaShape,
    /// Arrival steering vector at sub-RIS `k` from BS subarray `k`.
    a_sa: Vec<CVector>,
    ris_beams: AnalogBeamformer,
    scaling: Vec<CascadeScaling>,
    anchors: UwbAnchorSet,
    lattice: AngularLattice,
}

/// Location estimate used to steer one user's beams.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Located {
    position: Position3D,
    error_radius: f64,
    degraded: bool,
}

#[derive(Debug, Clone)]
struct Design {
    variant: Variant,
    w: CMatrix,
    v: Vec<CVector>,
    /// True effective rows `t_k`.
    rows: Vec<CVector>,
    /// Channel the precoder is computed from.
    design: CMatrix,
    evaluations: usize,
}

/// Power-independent part of a trial: channels, position estimates and the
/// beams of every requested variant.
#[derive(Debug, Clone)]
pub struct PreparedTrial {
    designs: Vec<Design>,
    /// Sampled noise vectors, `[power][user]`.
    noise: Vec<Vec<CVector>>,
    degraded: bool,
}

impl Simulator {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let model = cfg.model()?;
        let lambda = cfg.wavelength();
        let k = cfg.user_count();
        let bs_shape = UpaShape::from(&cfg.bs);
        let ris_shape = UpaShape::from(&cfg.ris);
        let users: Vec<ArrayGeometry> = (0..k).map(|i| cfg.user_geometry(i)).collect();
        let ue_shape = UpaShape::from(&users[0]);

        let mut a_sa = Vec::with_capacity(k);
        let mut beams = Vec::with_capacity(k);
        let mut scaling = Vec::with_capacity(k);
        for s in 0..k {
            let l = link_angles(
                cfg.ris.block_center(s),
                &cfg.ris.orientation,
                cfg.bs.block_center(s),
                &cfg.bs.orientation,
            )?;
            a_sa.push(steering_vector(&ris_shape, &l.at_reference, lambda).entries);
            beams.push(design_transmit_beam(&l.at_remote, &bs_shape, 1.0 / k as f64, lambda)?);
            let d2 = cfg.users[s].distance(&cfg.ris.block_center(s));
            scaling.push(CascadeScaling {
                bs_center: cfg.bs.center,
                region: cfg.cascade_region(s, d2)?,
            });
        }
        let l = &cfg.localization;
        let anchors = UwbAnchorSet::at_corners(
            cfg.ris.center,
            &cfg.ris.orientation,
            l.anchor_span,
            l.ranging_error,
            l.error_model,
        )?;
        Ok(Self {
            model,
            lambda,
            noise_power: cfg.noise_power(),
            users,
            bs_shape,
            ris_shape,
            ue_shape,
            a_sa,
            ris_beams: AnalogBeamformer::from_beams(&beams)?,
            scaling,
            anchors,
            lattice: AngularLattice::new(cfg.beamforming.codebook_resolution)?,
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    fn k(&self) -> usize {
        self.users.len()
    }

    /// Synthesizes the channels, localizes every user and designs the beams
    /// of `variants`. All variants see the same channels and estimates.
    pub fn prepare(&self, seed: u64, variants: &[Variant]) -> Result<PreparedTrial> {
        if !self.cfg.flags.enable_direct_link && variants.contains(&Variant::NoRis) {
            return Err(Error::config(
                "flags.enable_direct_link",
                "the no-RIS baseline needs the direct link",
            ));
        }
        let streams = TrialStreams::new(seed);
        let k = self.k();
        let cfg = &self.cfg;

        let mut rng = streams.stream(Stream::Channel);
        let g = synthesize_g(&cfg.bs, &cfg.ris, &self.model, &cfg.nlos_ris, &mut rng)?;
        let mut h = Vec::with_capacity(k);
        let mut qd = Vec::with_capacity(k);
        for u in 0..k {
            h.push(synthesize_h(
                &self.users[u],
                &cfg.ris,
                &self.model,
                &cfg.nlos_ris,
                Some(&self.scaling[u]),
                &mut rng,
            )?);
            qd.push(synthesize_direct_q(
                &cfg.bs,
                &self.users[u],
                &self.model,
                &cfg.nlos_direct,
                &mut rng,
            )?);
        }

        let mut rng = streams.stream(Stream::Localization);
        let located: Vec<Located> = (0..k).map(|u| self.locate(u, &mut rng)).collect::<Result<_>>()?;
        let degraded = located.iter().any(|l| l.degraded);

        let random_q = RisPhaseConfig::random(k, self.ris_shape.len(), &mut streams.stream(Stream::RandomPhase));

        let mut rng = streams.stream(Stream::Noise);
        let noise = match cfg.noise_mode {
            NoiseMode::Analytic => Vec::new(),
            NoiseMode::Sampled => {
                let sd = (self.noise_power / 2.0).sqrt();
                (0..cfg.transmit_power_dbm.len())
                    .map(|_| {
                        (0..k)
                            .map(|_| {
                                CVector::from_fn(self.ue_shape.len(), |_, _| {
                                    let re: f64 = StandardNormal.sample(&mut rng);
                                    let im: f64 = StandardNormal.sample(&mut rng);
                                    Complex64::new(re * sd, im * sd)
                                })
                            })
                            .collect()
                    })
                    .collect()
            }
        };

        let ch = Channels { g: &g, h: &h, qd: &qd };
        let mut designs = Vec::with_capacity(variants.len());
        for &variant in variants {
            designs.push(match variant {
                Variant::NoRis => self.direct_design(&ch, None)?,
                Variant::RandomPhase => self.direct_design(&ch, Some(&random_q))?,
                Variant::Estimated => self.located_design(&ch, &located, false)?,
                Variant::EstimatedPba => self.located_design(&ch, &located, true)?,
            });
        }
        Ok(PreparedTrial {
            designs,
            noise,
            degraded,
        })
    }

    fn locate(&self, u: usize, rng: &mut crate::rng::SimRng) -> Result<Located> {
        let loc = &self.cfg.localization;
        let ranges = range_measurements(&self.anchors, self.cfg.users[u], rng)?;
        match multilaterate(&self.anchors, &ranges, loc.half_space) {
            Ok(PositionEstimate {
                position,
                error_radius,
                degenerate,
                ..
            }) => Ok(Located {
                position,
                error_radius: if loc.adaptive_error_radius {
                    error_radius
                } else {
                    loc.error_radius
                },
                degraded: degenerate,
            }),
            Err(Error::EstimationFailure(_)) => {
                // No usable fix: steer along the RIS normal on the served side.
                let sign = match loc.half_space {
                    HalfSpace::Positive => 1.0,
                    HalfSpace::Negative => -1.0,
                };
                let normal = self
                    .cfg
                    .ris
                    .orientation
                    .local_to_global(Position3D::new(0.0, 0.0, sign));
                Ok(Located {
                    position: self.cfg.ris.center + normal,
                    error_radius: loc.error_radius,
                    degraded: true,
                })
            }
            Err(e) => Err(e),
        }
    }

    fn direct_part<'a>(&self, ch: &'a Channels<'_>, u: usize) -> Option<&'a CMatrix> {
        self.cfg.flags.enable_direct_link.then(|| &ch.qd[u].entries)
    }

    /// Beams on the strongest direct path of each user; with `random_q`
    /// the RIS reflects with those phases, otherwise it is absent.
    fn direct_design(&self, ch: &Channels<'_>, random_q: Option<&RisPhaseConfig>) -> Result<Design> {
        let k = self.k();
        let mut beams = Vec::with_capacity(k);
        let mut v = Vec::with_capacity(k);
        for u in 0..k {
            let strongest = ch.qd[u]
                .components_of(0, u)
                .max_by(|a, b| a.gain.norm().total_cmp(&b.gain.norm()));
            let (arrival, departure) = match strongest {
                Some(p) => (p.arrival, p.departure),
                None => {
                    let l = link_angles(
                        self.users[u].center,
                        &self.users[u].orientation,
                        self.cfg.bs.block_center(u),
                        &self.cfg.bs.orientation,
                    )?;
                    (l.at_reference, l.at_remote)
                }
            };
            beams.push(design_transmit_beam(
                &departure,
                &self.bs_shape,
                1.0 / k as f64,
                self.lambda,
            )?);
            v.push(design_receive_beam(&arrival, &self.ue_shape, self.lambda));
        }
        let w = AnalogBeamformer::from_beams(&beams)?.w;
        let q_all = random_q.map(|q| q.diagonal());
        let mut rows = Vec::with_capacity(k);
        for u in 0..k {
            let ris = q_all.as_ref().map(|q| (&ch.h[u].entries, q, &ch.g.entries));
            rows.push(effective_row(&v[u], ris, self.direct_part(ch, u), &w)?);
        }
        // Conventional CSI: the precoder sees the effective channel,
        // including whatever the unconfigured RIS reflects.
        let design = stack_rows(&rows);
        Ok(Design {
            variant: if random_q.is_some() {
                Variant::RandomPhase
            } else {
                Variant::NoRis
            },
            w,
            v,
            rows,
            design,
            evaluations: 0,
        })
    }

    /// Beams and RIS phases from the position estimates, optionally refined
    /// by the codebook search. The precoder sees either the measured
    /// effective channel or the LOS channel implied by the estimates.
    fn located_design(&self, ch: &Channels<'_>, located: &[Located], refine: bool) -> Result<Design> {
        let k = self.k();
        let cfg = &self.cfg;
        let w = self.ris_beams.w.clone();
        let mut v = Vec::with_capacity(k);
        let mut q = Vec::with_capacity(k);
        let mut evaluations = 0;
        for u in 0..k {
            let est = &located[u];
            let l = link_angles(
                cfg.ris.block_center(u),
                &cfg.ris.orientation,
                est.position,
                &self.users[u].orientation,
            )?;
            let v_hat = design_receive_beam(&l.at_remote, &self.ue_shape, self.lambda);
            let h_hat = self.estimated_block(u, est.position, u)?;
            let q_hat = closed_form_ris_phase(&h_hat, &v_hat, &self.a_sa[u])?.q;
            if refine {
                let h_true = ch.h[u].block(0, u);
                let incident = ch.g.block(u, u) * self.ris_beams.beam(u);
                let problem = PbaProblem {
                    h: &h_true,
                    incident: &incident,
                    a_sa: &self.a_sa[u],
                    user_shape: self.ue_shape,
                    ris_shape: self.ris_shape,
                    wavelength: self.lambda,
                    v_init: v_hat,
                    q_init: q_hat,
                    aoa_user: l.at_remote,
                    aod_ris: l.at_reference,
                    error_radius: est.error_radius,
                    distance: l.distance,
                };
                let out = pba(&problem, &self.lattice, &self.lattice, &cfg.beamforming.pba)?;
                evaluations += out.evaluations;
                v.push(out.v);
                q.push(out.q);
            } else {
                v.push(v_hat);
                q.push(q_hat);
            }
        }
        let q_all = RisPhaseConfig { phases: q }.diagonal();
        let mut rows = Vec::with_capacity(k);
        for u in 0..k {
            rows.push(effective_row(
                &v[u],
                Some((&ch.h[u].entries, &q_all, &ch.g.entries)),
                self.direct_part(ch, u),
                &w,
            )?);
        }
        let design = match cfg.flags.precoder_csi {
            PrecoderCsi::Effective => stack_rows(&rows),
            PrecoderCsi::Location => {
                let mut est_rows = Vec::with_capacity(k);
                for u in 0..k {
                    let r = self.estimated_row(u, located[u].position, &v[u])?.component_mul(&q_all);
                    est_rows.push(w.tr_mul(&ch.g.entries.tr_mul(&r)));
                }
                stack_rows(&est_rows)
            }
        };
        Ok(Design {
            variant: if refine {
                Variant::EstimatedPba
            } else {
                Variant::Estimated
            },
            design,
            w,
            v,
            rows,
            evaluations,
        })
    }

    /// LOS path from sub-RIS `s` to user `u` as seen from an estimated
    /// position: angles and the LOS gain at the estimated distance, with the
    /// cascade correction.
    fn estimated_path(&self, u: usize, position: Position3D, s: usize) -> Result<(CVector, CVector, Complex64)> {
        let cfg = &self.cfg;
        let center = cfg.ris.block_center(s);
        let l = link_angles(center, &cfg.ris.orientation, position, &self.users[u].orientation)?;
        let region = cfg.cascade_region(s, l.distance)?;
        let gain = self.model.los_gain(l.distance)?
            * self
                .model
                .cascade_correction(cfg.bs_ris_distance(s), l.distance, region)?;
        let a_r = steering_vector(&self.ue_shape, &l.at_remote, self.lambda).entries;
        let a_d = steering_vector(&self.ris_shape, &l.at_reference, self.lambda).entries;
        let size = ((self.ue_shape.len() * self.ris_shape.len()) as f64).sqrt();
        Ok((a_r, a_d, gain * size))
    }

    fn estimated_block(&self, u: usize, position: Position3D, s: usize) -> Result<CMatrix> {
        let (a_r, a_d, c) = self.estimated_path(u, position, s)?;
        Ok(a_r * a_d.adjoint() * c)
    }

    /// `(v^H H_hat)^T` over all sub-RIS blocks.
    fn estimated_row(&self, u: usize, position: Position3D, v: &CVector) -> Result<CVector> {
        let n = self.ris_shape.len();
        let mut out = CVector::zeros(n * self.k());
        for s in 0..self.k() {
            let (a_r, a_d, c) = self.estimated_path(u, position, s)?;
            let coef = v.dotc(&a_r) * c;
            for (i, z) in a_d.iter().enumerate() {
                out[s * n + i] = coef * z.conj();
            }
        }
        Ok(out)
    }
}

struct Channels<'a> {
    g: &'a ChannelMatrix,
    h: &'a [ChannelMatrix],
    qd: &'a [ChannelMatrix],
}

fn stack_rows(rows: &[CVector]) -> CMatrix {
    let cols = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

impl PreparedTrial {
    pub fn degraded(&self) -> bool {
        self.degraded
    }

    /// True effective channel `T` (`K x K`, row `k` is `t_k`) of a prepared
    /// variant, before precoding.
    pub fn effective_channel(&self, variant: Variant) -> Option<CMatrix> {
        self.designs
            .iter()
            .find(|d| d.variant == variant)
            .map(|d| stack_rows(&d.rows))
    }

    pub fn variants(&self) -> impl Iterator<Item = Variant> + '_ {
        self.designs.iter().map(|d| d.variant)
    }

    /// Precodes and scores `variant` at transmit power index `power_index`
    /// of the scenario's power list.
    pub fn evaluate(&self, sim: &Simulator, variant: Variant, power_index: usize) -> Result<TrialResult> {
        let cfg = &sim.cfg;
        let d = self
            .designs
            .iter()
            .find(|d| d.variant == variant)
            .ok_or_else(|| Error::domain(format!("variant {variant} was not prepared")))?;
        let power_dbm = *cfg
            .transmit_power_dbm
            .get(power_index)
            .ok_or_else(|| Error::domain("power index out of range"))?;
        let p = dbm_to_watts(power_dbm);
        let f = precoder(cfg.flags.precoder, &d.design, &d.w, sim.noise_power, p)?.f;
        let k = sim.k();
        let mut out = TrialResult {
            variant,
            power_dbm,
            signal: Vec::with_capacity(k),
            interference: Vec::with_capacity(k),
            noise: Vec::with_capacity(k),
            sinr: Vec::with_capacity(k),
            rates: Vec::with_capacity(k),
            sum_rate: 0.0,
            search_evaluations: d.evaluations,
            degraded: self.degraded,
        };
        for u in 0..k {
            let t = received_signal_terms(&d.rows[u], &f, u, p)?;
            let noise = match cfg.noise_mode {
                NoiseMode::Analytic => sim.noise_power,
                NoiseMode::Sampled => d.v[u].dotc(&self.noise[power_index][u]).norm_sqr(),
            };
            let rate = user_rate(t.signal, t.interference, noise);
            out.signal.push(t.signal);
            out.interference.push(t.interference);
            out.noise.push(noise);
            out.sinr.push(t.signal / (t.interference + noise));
            out.rates.push(rate);
            out.sum_rate += rate;
        }
        Ok(out)
    }
}

/// One trial of one variant at one power.
pub fn run_trial(cfg: &ScenarioConfig, variant: Variant, power_index: usize, seed: u64) -> Result<TrialResult> {
    let sim = Simulator::new(cfg)?;
    sim.prepare(seed, &[variant])?.evaluate(&sim, variant, power_index)
}
