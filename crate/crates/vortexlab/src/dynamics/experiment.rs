//! Two weak solutions of the rescaled problem with the same data and forcing.
//!
//! Run A is the radial solution `K_eps`; run B adds the evolved perturbation
//! `J_eps(x, t) = S^{-1} sigma(x S^{-1/alpha}, tau)` with `S = eps^alpha + alpha gamma t`.

use super::diagnostics::PolarQuadrature;
use super::evolve::{evolve_with, EvolutionConfig, Stepper, Trajectory, Variant};
use super::field::{Field2D, FieldKind};
use super::weak::{weak_residual_analytic, AnalyticQuadrature, TestFunction, WeakSolution};
use crate::dynamics::diagnostics::fit_line;
use crate::error::{Error, Result};
use crate::norms::lebesgue_norm;
use crate::profiles::RadialVortexProfile;
use crate::scaling::{layer_breaks, limit_initial, Layer, ModeShape, ScalingFamily};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

/// Radial solutions built from one background layer per time.
pub struct RadialSolution<'a> {
    pub profile: &'a RadialVortexProfile,
    pub family: ScalingFamily<f64>,
    /// `true` for the `eps -> 0` limit, `false` for `K_eps`.
    pub limit: bool,
}

impl RadialSolution<'_> {
    fn layer(&self, t: f64) -> Layer {
        if self.limit {
            Layer::limit(&self.family, t).expect("t > 0 inside the time quadrature")
        } else {
            Layer::rescaled(&self.family, t)
        }
    }
}

impl WeakSolution for RadialSolution<'_> {
    fn omega0(&self, x: [f64; 2]) -> f64 {
        if self.limit {
            limit_initial(&self.family, x)
        } else {
            self.layer(0.0).background(self.profile, self.family.c4, x).0
        }
    }

    fn omega(&self, x: [f64; 2], t: f64) -> f64 {
        self.layer(t).background(self.profile, self.family.c4, x).0
    }

    fn velocity(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        self.layer(t).background(self.profile, self.family.c4, x).1
    }

    fn forcing(&self, x: [f64; 2], t: f64) -> f64 {
        self.layer(t).forcing(self.profile, self.family.c4, self.family.gamma, x)
    }

    fn radial_breaks(&self, t: f64) -> Vec<f64> {
        if self.limit && t <= 0.0 {
            let c4 = self.family.c4;
            return vec![0.0, c4, 2.0 * c4];
        }
        layer_breaks(self.profile, self.family.c4, &self.layer(t))
    }
}

/// `K_eps + J_eps` with `sigma` interpolated between stored snapshots.
pub struct AssembledSolution<'a> {
    pub radial: RadialSolution<'a>,
    /// `(sigma, w_x, w_y)` at increasing self-similar times.
    pub samples: Vec<(Field2D, Field2D, Field2D)>,
}

impl AssembledSolution<'_> {
    fn perturbation(&self, x: [f64; 2], t: f64) -> (f64, [f64; 2]) {
        let fam = &self.radial.family;
        let tau = fam.tau_rescaled(t);
        let layer = Layer::rescaled(fam, t);
        let d = layer.dilation;
        let y = [x[0] / d, x[1] / d];
        let k = self.samples.partition_point(|s| s.0.time <= tau).clamp(1, self.samples.len().max(2) - 1);
        let (a, b) = (&self.samples[k - 1], &self.samples[k.min(self.samples.len() - 1)]);
        let span = b.0.time - a.0.time;
        let th = if span > 0.0 { ((tau - a.0.time) / span).clamp(0.0, 1.0) } else { 0.0 };
        let mix = |p: &Field2D, q: &Field2D| (1.0 - th) * p.sample_bicubic(y) + th * q.sample_bicubic(y);
        let alpha = fam.alpha;
        let amp = d.powf(-alpha);
        let vamp = d.powf(1.0 - alpha);
        (amp * mix(&a.0, &b.0), [vamp * mix(&a.1, &b.1), vamp * mix(&a.2, &b.2)])
    }
}

impl WeakSolution for AssembledSolution<'_> {
    fn omega0(&self, x: [f64; 2]) -> f64 {
        self.radial.omega0(x) + self.perturbation(x, 0.0).0
    }

    fn omega(&self, x: [f64; 2], t: f64) -> f64 {
        self.radial.omega(x, t) + self.perturbation(x, t).0
    }

    fn velocity(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let v = self.radial.velocity(x, t);
        let w = self.perturbation(x, t).1;
        [v[0] + w[0], v[1] + w[1]]
    }

    fn forcing(&self, x: [f64; 2], t: f64) -> f64 {
        self.radial.forcing(x, t)
    }

    fn radial_breaks(&self, t: f64) -> Vec<f64> {
        let mut b = self.radial.radial_breaks(t);
        if let Some(s) = self.samples.first() {
            let d = Layer::rescaled(&self.radial.family, t).dilation;
            b.push(s.0.half_width * d);
        }
        b
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NonuniqConfig {
    pub ladder: Vec<f64>,
    pub n: usize,
    pub half_width: f64,
    pub q: f64,
    pub evolution: EvolutionConfig,
    pub t_final: f64,
    /// Physical times of the rescaled problem at which runs are compared.
    pub report_times: Vec<f64>,
    pub weak_tests: usize,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for NonuniqConfig {
    fn default() -> Self {
        NonuniqConfig {
            ladder: vec![0.1, 0.05, 0.025],
            n: 256,
            half_width: 10.0,
            q: 3.0,
            evolution: EvolutionConfig {
                variant: Variant::CutoffV1,
                dtau: 2.5e-3,
                snapshot_every: Some(20),
                ..EvolutionConfig::default()
            },
            t_final: 1.0,
            report_times: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            weak_tests: 8,
            seed: 7,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimePoint {
    pub t: f64,
    pub tau: f64,
    /// `||omega_B - omega_A||_Q = ||J_eps||_Q`.
    pub distance: f64,
    pub nonradial_fraction: f64,
    /// `||P||_Q` of the self-similar prediction and `||J_eps - P||_Q`, absent at `t = 0`.
    pub prediction_norm: Option<f64>,
    pub prediction_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub epsilon: f64,
    pub initial_distance: f64,
    pub points: Vec<TimePoint>,
    pub weak_residual_a: f64,
    pub weak_residual_b: f64,
    pub integral_drift: f64,
    pub max_symmetry_defect: f64,
    pub tau_final: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub q: f64,
    pub rows: Vec<LadderRow>,
    /// Fitted slope of `log(initial distance)` against `log eps`.
    pub initial_slope: f64,
    /// `rho - alpha + 2/Q`.
    pub expected_slope: f64,
    /// Distances at `t_final` along the ladder.
    pub final_distances: Vec<f64>,
    /// Non-radial fraction at `t_final` over its initial value.
    pub nonradial_growth: Vec<f64>,
}

/// Evolves `initial` through the self-similar times `taus`, returning the
/// states at those times and the concatenated trajectory data.
pub fn evolve_through(stepper: &Stepper, initial: &Field2D, taus: &[f64]) -> Result<(Vec<Field2D>, Trajectory)> {
    let mut state = stepper.project(initial);
    let mut at = vec![];
    let mut all: Option<Trajectory> = None;
    for &tau in taus {
        if tau > state.time {
            let tr = evolve_with(stepper, &state, tau)?;
            state = tr.final_state.clone();
            all = Some(match all {
                None => tr,
                Some(mut acc) => {
                    acc.records.extend(tr.records.into_iter().skip(1));
                    acc.snapshots.extend(tr.snapshots.into_iter().skip(1));
                    acc.integral_drift = acc.integral_drift.max(tr.integral_drift);
                    acc.max_symmetry_defect = acc.max_symmetry_defect.max(tr.max_symmetry_defect);
                    acc.final_state = tr.final_state;
                    acc
                }
            });
        }
        at.push(state.clone());
    }
    let tr = match all {
        Some(t) => t,
        None => evolve_with(stepper, &state, state.time)?,
    };
    Ok((at, tr))
}

/// `Re(c eta(y))` on the grid.
pub fn mode_field(mode: &ModeShape, c: num_complex::Complex64, n: usize, half_width: f64) -> Field2D {
    let mut f = Field2D::from_fn(n, half_width, FieldKind::Sigma, |y| mode.real_part(c, y));
    f.symmetry = Some(mode.m);
    f
}

fn ladder_row(
    config: &NonuniqConfig,
    family: &ScalingFamily<f64>,
    profile: &RadialVortexProfile,
    mode: &ModeShape,
    epsilon: f64,
) -> Result<LadderRow> {
    let fam = family.with_epsilon(epsilon)?;
    let q = config.q;
    let alpha = fam.alpha;
    let ag = alpha * fam.gamma;
    let sigma0 = mode_field(mode, mode.amplitude(&fam), config.n, config.half_width);
    let stepper = Stepper::new(&sigma0, config.evolution.clone(), &fam, profile)?;
    let taus: Vec<f64> = config.report_times.iter().map(|&t| fam.tau_rescaled(t)).collect();
    let tau_final = fam.tau_rescaled(config.t_final);
    let mut all_taus = taus.clone();
    all_taus.push(tau_final);
    let (states, traj) = evolve_through(&stepper, &sigma0, &all_taus)?;

    let exponent = -1.0 + 2.0 / (alpha * q);
    let sigma0p = stepper.project(&sigma0);
    let initial_distance = fam.rescaled_base(0.0).powf(exponent) * lebesgue_norm(&sigma0p.data, sigma0p.cell_area(), q);
    let radial = RadialSolution {
        profile,
        family: fam,
        limit: false,
    };
    let eta_lq = {
        let f = mode_field(mode, num_complex::Complex64::new(1.0, 0.0), config.n, config.half_width);
        lebesgue_norm(&f.data, f.cell_area(), q)
    };
    let mut points = Vec::new();
    for (&t, state) in config.report_times.iter().zip(&states) {
        let s = fam.rescaled_base(t);
        let d = s.powf(1.0 / alpha);
        let area = state.cell_area();
        let distance = s.powf(exponent) * lebesgue_norm(&state.data, area, q);
        let layer = Layer::rescaled(&fam, t);
        let mut breaks = layer_breaks(profile, fam.c4, &layer);
        breaks.push(config.half_width * d);
        let quad = PolarQuadrature::new(&breaks, 4, 8, 64);
        let nonradial = quad.nonradial_fraction(|x| {
            let y = [x[0] / d, x[1] / d];
            layer.background(profile, fam.c4, x).0 + state.sample_bicubic(y) / s
        });
        let (prediction_norm, prediction_gap) = if t > 0.0 {
            let base = ag * t;
            let c = (mode.lambda / ag * base.ln()).exp();
            let scale = base.powf(1.0 / alpha);
            let diff: Vec<f64> = state
                .points()
                .zip(&state.data)
                .map(|(y, &v)| {
                    let x = [d * y[0], d * y[1]];
                    v / s - mode.real_part(c, [x[0] / scale, x[1] / scale]) / base
                })
                .collect();
            (
                Some(base.powf(exponent + fam.a_growth / ag) * eta_lq),
                Some(d.powf(2.0 / q) * lebesgue_norm(&diff, area, q)),
            )
        } else {
            (None, None)
        };
        points.push(TimePoint {
            t,
            tau: state.time,
            distance,
            nonradial_fraction: nonradial,
            prediction_norm,
            prediction_gap,
        });
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let tests = TestFunction::random_family(&mut rng, config.weak_tests, 1.0, (0.15, 0.4), config.t_final);
    let quad = AnalyticQuadrature {
        time_panels: 6,
        time_order: 8,
        radial_panels: 2,
        radial_order: 8,
        n_theta: 64,
    };
    let weak_a = weak_residual_analytic(&radial, &tests, &quad)?.residual;
    let samples = traj
        .snapshots
        .iter()
        .map(|s| {
            let [u, v] = stepper.velocity(s);
            (s.clone(), u, v)
        })
        .collect();
    let assembled = AssembledSolution { radial, samples };
    let weak_b = weak_residual_analytic(&assembled, &tests, &quad)?.residual;
    Ok(LadderRow {
        epsilon,
        initial_distance,
        points,
        weak_residual_a: weak_a,
        weak_residual_b: weak_b,
        integral_drift: traj.integral_drift,
        max_symmetry_defect: traj.max_symmetry_defect,
        tau_final,
    })
}

/// Runs both solutions along the ladder.
pub fn nonuniqueness_experiment(
    config: &NonuniqConfig,
    family: &ScalingFamily<f64>,
    profile: &RadialVortexProfile,
    mode: &ModeShape,
) -> Result<ExperimentReport> {
    if config.ladder.len() < 2 {
        return Err(Error::InvalidParams("the ladder needs at least two values".into()));
    }
    if !config.report_times.iter().any(|&t| t == 0.0) || !config.report_times.contains(&config.t_final) {
        return Err(Error::InvalidParams("report times must include 0 and t_final".into()));
    }
    let jobs = config.jobs.max(1);
    let mut rows: Vec<Option<Result<LadderRow>>> = (0..config.ladder.len()).map(|_| None).collect();
    for chunk in (0..config.ladder.len()).collect::<Vec<_>>().chunks(jobs) {
        let results: Vec<(usize, Result<LadderRow>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&i| {
                    let eps = config.ladder[i];
                    scope.spawn(move || (i, ladder_row(config, family, profile, mode, eps)))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("ladder job panicked")).collect()
        });
        for (i, r) in results {
            rows[i] = Some(r);
        }
    }
    let rows: Vec<LadderRow> = rows.into_iter().map(|r| r.expect("every job ran")).collect::<Result<_>>()?;
    let slope = fit_line(
        &rows
            .iter()
            .map(|r| (r.epsilon.ln(), r.initial_distance.ln()))
            .collect::<Vec<_>>(),
    )?
    .slope;
    let at_final = |r: &LadderRow| r.points.iter().find(|p| p.t == config.t_final).cloned();
    let at_zero = |r: &LadderRow| r.points.iter().find(|p| p.t == 0.0).cloned();
    Ok(ExperimentReport {
        q: config.q,
        initial_slope: slope,
        expected_slope: family.rho - family.alpha + 2.0 / config.q,
        final_distances: rows.iter().filter_map(|r| at_final(r).map(|p| p.distance)).collect(),
        nonradial_growth: rows
            .iter()
            .filter_map(|r| Some(at_final(r)?.nonradial_fraction / at_zero(r)?.nonradial_fraction))
            .collect(),
        rows,
    })
}

/// Settings of the weak-form check of the assembled physical vorticity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnsatzCheck {
    pub n: usize,
    pub half_width: f64,
    pub dtau: f64,
    pub snapshot_every: usize,
    pub t_end: f64,
    pub tests: usize,
    pub seed: u64,
}

impl Default for AnsatzCheck {
    fn default() -> Self {
        AnsatzCheck {
            n: 256,
            half_width: 10.0,
            dtau: 2.5e-3,
            snapshot_every: 4,
            t_end: 1.0,
            tests: 12,
            seed: 11,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzReport {
    pub weak: super::weak::WeakResidual,
    pub integral_drift: f64,
    pub max_symmetry_defect: f64,
}

/// Evolves `sigma` with the cutoff background, assembles the physical
/// vorticity on the dilated grids and evaluates the weak residual against
/// the physical forcing.
pub fn ansatz_weak_residual(
    check: &AnsatzCheck,
    family: &ScalingFamily<f64>,
    profile: &RadialVortexProfile,
    mode: &ModeShape,
) -> Result<AnsatzReport> {
    use super::weak::{weak_residual, WeakSnapshot};
    let sigma0 = mode_field(mode, mode.amplitude(family), check.n, check.half_width);
    let config = EvolutionConfig {
        variant: Variant::CutoffV1,
        dtau: check.dtau,
        record_every: usize::MAX,
        snapshot_every: Some(check.snapshot_every),
        ..EvolutionConfig::default()
    };
    let stepper = Stepper::new(&sigma0, config, family, profile)?;
    let tau_end = family.time_maps(check.t_end).1;
    let traj = evolve_with(&stepper, &sigma0, tau_end)?;
    let alpha = family.alpha;
    let c4 = family.c4;
    let mut snaps = Vec::with_capacity(traj.snapshots.len());
    for s in &traj.snapshots {
        let t = family.t_of_tau(s.time);
        let layer = Layer::physical(family, t);
        layer.check_support(profile, c4)?;
        let omega = crate::scaling::assemble_layer(s, &layer, profile, c4, t);
        let [wu, wv] = stepper.velocity(s);
        let vamp = layer.dilation.powf(1.0 - alpha);
        let mut vx = vec![0.0; omega.data.len()];
        let mut vy = vec![0.0; omega.data.len()];
        let mut z = vec![0.0; omega.data.len()];
        for (k, x) in omega.points().enumerate() {
            let v = layer.background(profile, c4, x).1;
            vx[k] = vamp * wu.data[k] + v[0];
            vy[k] = vamp * wv.data[k] + v[1];
            z[k] = layer.forcing(profile, c4, family.gamma, x);
        }
        snaps.push(WeakSnapshot {
            velocity: [omega.like(FieldKind::VelocityX, vx), omega.like(FieldKind::VelocityY, vy)],
            forcing: omega.like(FieldKind::Forcing, z),
            omega,
        });
    }
    let omega0 = snaps[0].omega.clone();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(check.seed);
    let tests = TestFunction::random_family(&mut rng, check.tests, 2.0, (0.5, 1.0), check.t_end);
    Ok(AnsatzReport {
        weak: weak_residual(&snaps, &omega0, &tests)?,
        integral_drift: traj.integral_drift,
        max_symmetry_defect: traj.max_symmetry_defect,
    })
}

/// Settings of the `L^Q` transport bound check on the forced Euler equations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransportCheck {
    pub epsilon: f64,
    pub n: usize,
    pub half_width: f64,
    pub dt: f64,
    pub t_end: f64,
    pub q_list: Vec<f64>,
    pub snapshot_every: usize,
}

impl Default for TransportCheck {
    fn default() -> Self {
        TransportCheck {
            epsilon: 1.0,
            n: 256,
            half_width: 44.0,
            dt: 5e-3,
            t_end: 1.0,
            q_list: vec![2.0, 3.0],
            snapshot_every: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportRow {
    pub t: f64,
    pub q: f64,
    pub omega_norm: f64,
    /// `||omega_0||_Q + int_0^t ||Z||_Q`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportReport {
    pub rows: Vec<TransportRow>,
    /// Largest `omega_norm / bound`.
    pub worst_ratio: f64,
    pub integral_drift: f64,
}

/// Evolves the perturbed data of the `eps` rescaled problem under the forced
/// Euler equations and compares `||omega(t)||_Q` with the transport bound.
pub fn transport_bound(
    check: &TransportCheck,
    family: &ScalingFamily<f64>,
    profile: &RadialVortexProfile,
    mode: &ModeShape,
) -> Result<TransportReport> {
    let fam = family.with_epsilon(check.epsilon)?;
    Layer::rescaled(&fam, check.t_end).check_support(profile, fam.c4)?;
    let omega0 = crate::scaling::initial_data(
        &fam,
        profile,
        mode,
        crate::scaling::InitialVariant::Perturbed,
        check.n,
        check.half_width,
    );
    let config = EvolutionConfig {
        variant: Variant::PhysicalEuler,
        dtau: check.dt,
        record_every: usize::MAX,
        snapshot_every: Some(check.snapshot_every),
        q_list: check.q_list.clone(),
        ..EvolutionConfig::default()
    };
    let stepper = Stepper::new(&omega0, config, &fam, profile)?;
    let traj = evolve_with(&stepper, &omega0, check.t_end)?;
    let mut rows = Vec::new();
    for &q in &check.q_list {
        let first = &traj.snapshots[0];
        let n0 = lebesgue_norm(&first.data, first.cell_area(), q);
        for s in &traj.snapshots {
            let z = if s.time > 0.0 {
                crate::scaling::forcing_time_integral(profile, &fam, fam.c4, q, s.time, false)?
            } else {
                0.0
            };
            rows.push(TransportRow {
                t: s.time,
                q,
                omega_norm: lebesgue_norm(&s.data, s.cell_area(), q),
                bound: n0 + z,
            });
        }
    }
    let worst_ratio = rows.iter().map(|r| r.omega_norm / r.bound).fold(0.0, f64::max);
    Ok(TransportReport {
        rows,
        worst_ratio,
        integral_drift: traj.integral_drift,
    })
}
