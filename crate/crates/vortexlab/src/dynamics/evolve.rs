//! Pseudo-spectral RK4 evolution of the perturbation equation and of the
//! rescaled forced Euler equations.

use super::fft::Spectral2D;
use super::field::{Field2D, FieldKind};
use crate::error::{Error, Result};
use crate::norms::{lebesgue_norm, lorentz_norm_integral};
use crate::profiles::RadialVortexProfile;
use crate::scaling::{cutoff_chi, Layer, ScalingFamily};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Background `V` everywhere.
    FullV,
    /// Background `chi(eps e^{gamma tau}|y|) V(y)`.
    CutoffV1,
    /// Full background without the quadratic term.
    Linearized,
    /// Forced Euler for the full vorticity of the rescaled problem.
    PhysicalEuler,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    pub variant: Variant,
    pub dtau: f64,
    pub dealias: bool,
    pub cfl: f64,
    pub q_list: Vec<f64>,
    /// Steps between norm records.
    pub record_every: usize,
    /// Steps between stored snapshots; `None` keeps only the final state.
    pub snapshot_every: Option<usize>,
    /// Multiplier on the dilation rate; zero switches off the scaling terms.
    #[serde(default = "one")]
    pub dilation: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            variant: Variant::CutoffV1,
            dtau: 2.5e-3,
            dealias: true,
            cfl: 0.5,
            q_list: vec![3.0],
            record_every: 10,
            snapshot_every: None,
            dilation: 1.0,
        }
    }
}

/// Background quantities at the grid nodes.
struct Background {
    r: Vec<f64>,
    omega: Vec<f64>,
    omega_prime: Vec<f64>,
    g: Vec<f64>,
    g_prime: Vec<f64>,
}

impl Background {
    fn new(profile: &RadialVortexProfile, grid: &Field2D) -> Self {
        let pts: Vec<[f64; 2]> = grid.points().collect();
        let r: Vec<f64> = pts.iter().map(|p| p[0].hypot(p[1])).collect();
        Background {
            omega: r.iter().map(|&s| profile.angular_velocity(s)).collect(),
            omega_prime: r.iter().map(|&s| profile.angular_velocity_prime(s)).collect(),
            g: r.iter().map(|&s| profile.vorticity(s)).collect(),
            g_prime: r.iter().map(|&s| profile.vorticity_prime(s)).collect(),
            r,
        }
    }
}

fn chi_second(c4: f64, r: f64) -> f64 {
    let h = 1e-5 * c4;
    (cutoff_chi(c4, r + h).1 - cutoff_chi(c4, r - h).1) / (2.0 * h)
}

/// Right-hand side evaluator with precomputed background data.
pub struct Stepper<'a> {
    pub config: EvolutionConfig,
    family: ScalingFamily<f64>,
    profile: &'a RadialVortexProfile,
    sp: Spectral2D,
    template: Field2D,
    bg: Option<Background>,
    y: [Vec<f64>; 2],
}

/// Velocity field produced during a right-hand side evaluation.
struct Rhs {
    value: Vec<f64>,
    max_speed: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(
        template: &Field2D,
        config: EvolutionConfig,
        family: &ScalingFamily<f64>,
        profile: &'a RadialVortexProfile,
    ) -> Result<Self> {
        if !(config.dtau > 0.0) || !(config.cfl > 0.0) {
            return Err(Error::InvalidParams("dtau and CFL factor must be positive".into()));
        }
        let sp = Spectral2D::new(template.n, template.half_width);
        let pts: Vec<[f64; 2]> = template.points().collect();
        let y = [pts.iter().map(|p| p[0]).collect(), pts.iter().map(|p| p[1]).collect()];
        let bg = match config.variant {
            Variant::PhysicalEuler => None,
            _ => Some(Background::new(profile, template)),
        };
        Ok(Stepper {
            config,
            family: *family,
            profile,
            sp,
            template: template.like(template.kind, vec![0.0; template.n * template.n]),
            bg,
            y,
        })
    }

    fn gamma(&self) -> f64 {
        self.family.gamma * self.config.dilation
    }

    /// Background velocity, vorticity gradient factor `G1'(r)/r` at time `tau`.
    fn background_fields(&self, tau: f64) -> (Vec<[f64; 2]>, Vec<f64>) {
        let bg = self.bg.as_ref().expect("perturbation variants carry the background");
        let c4 = self.family.c4;
        let c = match self.config.variant {
            Variant::CutoffV1 => self.family.epsilon * (self.family.gamma * tau).exp(),
            _ => 0.0,
        };
        let nn = bg.r.len();
        let mut vel = Vec::with_capacity(nn);
        let mut grad = Vec::with_capacity(nn);
        for k in 0..nn {
            let r = bg.r[k];
            let (x, y) = (self.y[0][k], self.y[1][k]);
            let (chi, dchi) = if c > 0.0 { cutoff_chi(c4, c * r) } else { (1.0, 0.0) };
            let om = chi * bg.omega[k];
            vel.push([-om * y, om * x]);
            let gp = if dchi == 0.0 {
                chi * bg.g_prime[k]
            } else {
                let d2 = chi_second(c4, c * r);
                c * dchi * bg.g[k]
                    + chi * bg.g_prime[k]
                    + c * dchi * bg.omega[k]
                    + c * c * r * d2 * bg.omega[k]
                    + c * r * dchi * bg.omega_prime[k]
            };
            grad.push(if r > 0.0 { gp / r } else { 0.0 });
        }
        (vel, grad)
    }

    fn rhs(&self, state: &[f64], time: f64) -> Rhs {
        let n = self.template.n;
        let nn = n * n;
        let sp = &self.sp;
        let mut hat = sp.forward(state);
        if self.config.dealias {
            sp.dealias(&mut hat);
        }
        let [wu, wv] = sp.biot_savart_hat(&hat);
        let w = [sp.inverse(&wu), sp.inverse(&wv)];
        let mut flux = [vec![0.0; nn], vec![0.0; nn]];
        let mut point = vec![0.0; nn];
        let mut max_speed: f64 = 0.0;
        match self.config.variant {
            Variant::PhysicalEuler => {
                let layer = Layer::rescaled(&self.family, time);
                for k in 0..nn {
                    let (u, v) = (w[0][k], w[1][k]);
                    flux[0][k] = u * state[k];
                    flux[1][k] = v * state[k];
                    max_speed = max_speed.max(u.hypot(v));
                    point[k] = layer.forcing(self.profile, self.family.c4, self.family.gamma, [self.y[0][k], self.y[1][k]]);
                }
            }
            variant => {
                let gamma = self.gamma();
                let alpha = self.family.alpha;
                let nonlinear = variant != Variant::Linearized;
                let (vel, grad) = self.background_fields(time);
                for k in 0..nn {
                    let (x, y) = (self.y[0][k], self.y[1][k]);
                    let mut u = vel[k][0] - gamma * x;
                    let mut v = vel[k][1] - gamma * y;
                    if nonlinear {
                        u += w[0][k];
                        v += w[1][k];
                    }
                    max_speed = max_speed.max(u.hypot(v));
                    flux[0][k] = u * state[k];
                    flux[1][k] = v * state[k];
                    point[k] = -(w[0][k] * x + w[1][k] * y) * grad[k] + gamma * (alpha - 2.0) * state[k];
                }
            }
        }
        // The continuum integral of the background coupling vanishes; its
        // discrete mean is removed so that the mean evolves exactly.
        let mean_coupling = match self.config.variant {
            Variant::PhysicalEuler => point.iter().sum::<f64>() / nn as f64,
            _ => {
                let g = self.gamma() * (self.family.alpha - 2.0);
                point.iter().zip(state).map(|(p, s)| p - g * s).sum::<f64>() / nn as f64
            }
        };
        let fx = sp.forward(&flux[0]);
        let fy = sp.forward(&flux[1]);
        let mut ph = sp.forward(&point);
        ph[0] -= Complex64::new(mean_coupling * nn as f64, 0.0);
        let mut out = vec![Complex64::default(); sp.spectral_len()];
        for a in 0..sp.modes_x {
            for b in 0..n {
                let i = a * n + b;
                let div = Complex64::new(0.0, sp.kx[a]) * fx[i] + Complex64::new(0.0, sp.k[b]) * fy[i];
                out[i] = ph[i] - div;
            }
        }
        if self.config.dealias {
            sp.dealias(&mut out);
        }
        Rhs {
            value: sp.inverse(&out),
            max_speed,
        }
    }

    fn cfl_bound(&self, max_speed: f64) -> f64 {
        if max_speed == 0.0 {
            f64::INFINITY
        } else {
            self.config.cfl * self.template.spacing() / max_speed
        }
    }

    /// One RK4 step of size `dtau` from `state`.
    pub fn step(&self, state: &Field2D) -> Result<Field2D> {
        self.advance(state, self.config.dtau)
    }

    /// One RK4 step of size `dt`.
    pub fn advance(&self, state: &Field2D, dt: f64) -> Result<Field2D> {
        let t = state.time;
        let s0 = &state.data;
        let k1 = self.rhs(s0, t);
        let bound = self.cfl_bound(k1.max_speed);
        if dt > bound {
            return Err(Error::CflViolation { dtau: dt, bound });
        }
        let axpy = |a: f64, k: &[f64]| -> Vec<f64> { s0.iter().zip(k).map(|(s, d)| s + a * d).collect() };
        let k2 = self.rhs(&axpy(0.5 * dt, &k1.value), t + 0.5 * dt);
        let k3 = self.rhs(&axpy(0.5 * dt, &k2.value), t + 0.5 * dt);
        let k4 = self.rhs(&axpy(dt, &k3.value), t + dt);
        let mut data = Vec::with_capacity(s0.len());
        for i in 0..s0.len() {
            data.push(s0[i] + dt / 6.0 * (k1.value[i] + 2.0 * k2.value[i] + 2.0 * k3.value[i] + k4.value[i]));
        }
        let mut next = state.like(state.kind, data);
        next.time = t + dt;
        if !next.is_finite() {
            return Err(Error::NonFinite(next.time));
        }
        Ok(next)
    }

    /// The dealiased projection of `state`, the starting point of an evolution.
    pub fn project(&self, state: &Field2D) -> Field2D {
        if !self.config.dealias {
            return state.clone();
        }
        let mut hat = self.sp.forward(&state.data);
        self.sp.dealias(&mut hat);
        state.like(state.kind, self.sp.inverse(&hat))
    }

    /// Perturbation velocity `K * sigma` on the grid.
    pub fn velocity(&self, state: &Field2D) -> [Field2D; 2] {
        let hat = self.sp.forward(&state.data);
        let [u, v] = self.sp.biot_savart_hat(&hat);
        let mut fu = state.like(FieldKind::VelocityX, self.sp.inverse(&u));
        let mut fv = state.like(FieldKind::VelocityY, self.sp.inverse(&v));
        fu.time = state.time;
        fv.time = state.time;
        [fu, fv]
    }

    pub fn record(&self, state: &Field2D) -> NormRecord {
        let area = state.cell_area();
        let [gx, gy] = self.sp.gradient(&state.data);
        let grad: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
        let weighted: Vec<f64> = grad
            .iter()
            .zip(self.y[0].iter().zip(&self.y[1]))
            .map(|(g, (x, y))| g * x.hypot(*y))
            .collect();
        let mut lq = Vec::new();
        let mut weighted_lq = Vec::new();
        for &q in &self.config.q_list {
            lq.push(lebesgue_norm(&state.data, area, q));
            weighted_lq.push(lebesgue_norm(&weighted, area, q));
        }
        NormRecord {
            tau: state.time,
            lq,
            weighted_lq,
            grad_lorentz: lorentz_norm_integral(&grad, area, 2.0),
            l2: lebesgue_norm(&state.data, area, 2.0),
            integral: state.integral(),
            symmetry_defect: state.symmetry.and_then(|m| state.symmetry_defect(m)).unwrap_or(0.0),
        }
    }
}

/// Norms of one state; `lq[i]` and `weighted_lq[i]` use `config.q_list[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub tau: f64,
    pub lq: Vec<f64>,
    pub weighted_lq: Vec<f64>,
    /// `L^{2,1}` norm of `|grad sigma|`.
    pub grad_lorentz: f64,
    pub l2: f64,
    pub integral: f64,
    pub symmetry_defect: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub q_list: Vec<f64>,
    pub records: Vec<NormRecord>,
    pub snapshots: Vec<Field2D>,
    pub final_state: Field2D,
    /// Largest deviation of the box integral from its exact evolution.
    pub integral_drift: f64,
    pub max_symmetry_defect: f64,
}

impl Trajectory {
    /// `(tau, value)` pairs of one recorded quantity.
    pub fn series(&self, pick: impl Fn(&NormRecord) -> f64) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.tau, pick(r))).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("tau");
        for q in &self.q_list {
            s += &format!(",lq_{q},weighted_lq_{q}");
        }
        s += ",grad_lorentz_2_1,l2,integral,symmetry_defect\n";
        for r in &self.records {
            s += &format!("{:.17e}", r.tau);
            for (a, b) in r.lq.iter().zip(&r.weighted_lq) {
                s += &format!(",{a:.17e},{b:.17e}");
            }
            s += &format!(
                ",{:.17e},{:.17e},{:.17e},{:.17e}\n",
                r.grad_lorentz, r.l2, r.integral, r.symmetry_defect
            );
        }
        s
    }
}

/// One RK4 step.
pub fn step(
    state: &Field2D,
    config: &EvolutionConfig,
    family: &ScalingFamily<f64>,
    profile: &RadialVortexProfile,
) -> Result<Field2D> {
    Stepper::new(state, config.clone(), family, profile)?.step(state)
}

/// Integrates from `initial.time` to `tau_end`, the last step shortened to land on it.
pub fn evolve(
    initial: &Field2D,
    config: &EvolutionConfig,
    family: &ScalingFamily<f64>,
    profile: &RadialVortexProfile,
    tau_end: f64,
) -> Result<Trajectory> {
    let stepper = Stepper::new(initial, config.clone(), family, profile)?;
    evolve_with(&stepper, initial, tau_end)
}

pub fn evolve_with(stepper: &Stepper, initial: &Field2D, tau_end: f64) -> Result<Trajectory> {
    let config = &stepper.config;
    let mut state = stepper.project(initial);
    let steps = ((tau_end - initial.time) / config.dtau - 1e-9).ceil().max(0.0) as usize;
    let decay = match config.variant {
        Variant::PhysicalEuler => 0.0,
        _ => stepper.gamma() * (stepper.family.alpha - 2.0),
    };
    let m0 = state.integral();
    let t0 = state.time;
    let mut records = vec![stepper.record(&state)];
    let mut snapshots = vec![];
    if config.snapshot_every.is_some() {
        snapshots.push(state.clone());
    }
    let mut drift: f64 = 0.0;
    let mut worst_sym = records[0].symmetry_defect;
    for i in 1..=steps {
        let remaining = tau_end - state.time;
        let dt = if remaining < config.dtau { remaining } else { config.dtau };
        state = stepper.advance(&state, dt)?;
        let expected = m0 * (decay * (state.time - t0)).exp();
        drift = drift.max((state.integral() - expected).abs());
        let last = i == steps;
        if i % config.record_every.max(1) == 0 || last {
            let rec = stepper.record(&state);
            worst_sym = worst_sym.max(rec.symmetry_defect);
            records.push(rec);
        }
        if let Some(every) = config.snapshot_every {
            if i % every.max(1) == 0 || last {
                snapshots.push(state.clone());
            }
        }
    }
    Ok(Trajectory {
        q_list: config.q_list.clone(),
        records,
        snapshots,
        final_state: state,
        integral_drift: drift,
        max_symmetry_defect: worst_sym,
    })
}

/// Velocity of a vorticity field on the periodic box, zero mean mode.
pub fn biot_savart(omega: &Field2D) -> [Field2D; 2] {
    let sp = Spectral2D::new(omega.n, omega.half_width);
    let hat = sp.forward(&omega.data);
    let [u, v] = sp.biot_savart_hat(&hat);
    let mut fu = omega.like(FieldKind::VelocityX, sp.inverse(&u));
    let mut fv = omega.like(FieldKind::VelocityY, sp.inverse(&v));
    fu.symmetry = omega.symmetry;
    fv.symmetry = omega.symmetry;
    [fu, fv]
}
