//! One-call setup of the objects shared by the dynamics studies: the
//! profile, its unstable mode, the `gamma` mode and the scaling family.

use crate::dynamics::experiment::mode_field;
use crate::dynamics::fft::Spectral2D;
use crate::error::{Error, Result};
use crate::norms::{lebesgue_norm, lorentz_norm_integral};
use crate::profiles::{build_class_c_profile, ProfileParams, RadialVortexProfile};
use crate::scaling::{ModeShape, ScalingFamily};
use crate::spectral::{self_consistent_gamma, unstable_spectrum, EigenMode, GammaMode, SpectralGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabConfig {
    pub profile: ProfileParams,
    pub m: usize,
    /// Nodes of the pencil grid.
    pub pencil_n: usize,
    /// Nodes of the grid carrying the `gamma` operator.
    pub operator_n: usize,
    /// `gamma = theta a / alpha`.
    pub theta: f64,
    pub epsilon: f64,
    pub c4: f64,
    pub c0_small: f64,
    pub q: f64,
    /// Box used to measure `C1`.
    pub n: usize,
    pub half_width: f64,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            profile: ProfileParams::default(),
            m: 2,
            pencil_n: 1024,
            operator_n: 900,
            theta: 0.45,
            epsilon: 0.05,
            c4: 20.0,
            c0_small: 0.1,
            q: 3.0,
            n: 256,
            half_width: 10.0,
        }
    }
}

impl LabConfig {
    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        let alpha = self.profile.alpha;
        if self.m < 2 {
            return Err(Error::InvalidParams(format!("mode number {} must be at least 2", self.m)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParams(format!("theta = {} must lie in (0, 1)", self.theta)));
        }
        if !(self.q > 2.0 && self.q < 2.0 / alpha) {
            return Err(Error::InvalidParams(format!(
                "Q = {} must lie in (2, 2/alpha) = (2, {})",
                self.q,
                2.0 / alpha
            )));
        }
        if self.n < 16 || !self.n.is_power_of_two() || !(self.half_width > 0.0) {
            return Err(Error::InvalidParams("box needs n a power of two >= 16 and L > 0".into()));
        }
        if self.pencil_n < 64 || self.operator_n < 64 {
            return Err(Error::InvalidParams("spectral grids need at least 64 nodes".into()));
        }
        Ok(())
    }
}

pub struct Lab {
    pub config: LabConfig,
    pub profile: RadialVortexProfile,
    pub pencil_mode: EigenMode,
    pub gamma_mode: GammaMode,
    pub mode: ModeShape,
    pub family: ScalingFamily<f64>,
    pub c1: C1Measurement,
}

impl Lab {
    pub fn build(config: LabConfig) -> Result<Self> {
        config.validate()?;
        let profile = build_class_c_profile(config.profile)?;
        let grid = SpectralGrid::for_profile(&profile, config.pencil_n);
        let pencil_mode = unstable_spectrum(&profile, config.m, &grid)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::NoConvergence(format!("no unstable eigenvalue for m = {}", config.m)))?;
        let op_grid = SpectralGrid::for_profile(&profile, config.operator_n);
        let gamma_mode = self_consistent_gamma(&profile, config.m, &op_grid, pencil_mode.lambda, config.theta)?;
        let mode = ModeShape::from_gamma_mode(&gamma_mode, config.m);
        let c1 = measure_c1(&profile, &mode, config.q, config.n, config.half_width);
        let lambda = Complex64::new(gamma_mode.lambda.re, gamma_mode.lambda.im.abs());
        let family = ScalingFamily::new(
            profile.alpha(),
            gamma_mode.gamma,
            config.epsilon,
            lambda,
            config.c4,
            config.c0_small,
            c1.c1,
        )?;
        Ok(Lab {
            config,
            profile,
            pencil_mode,
            gamma_mode,
            mode,
            family,
            c1,
        })
    }
}

/// The three norms bounding the perturbation size: `||f||_Q`,
/// `|| |y| grad f ||_Q` and `||grad f||_{L^{2,1}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeNorms {
    pub lq: f64,
    pub weighted: f64,
    pub grad_lorentz: f64,
}

impl SizeNorms {
    fn of(values: &[f64], grad: &[f64], points: &[[f64; 2]], area: f64, q: f64) -> Self {
        let weighted: Vec<f64> = points.iter().zip(grad).map(|(y, g)| y[0].hypot(y[1]) * g).collect();
        SizeNorms {
            lq: lebesgue_norm(values, area, q),
            weighted: lebesgue_norm(&weighted, area, q),
            grad_lorentz: lorentz_norm_integral(grad, area, 2.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct C1Measurement {
    pub mode: SizeNorms,
    /// The same norms of the background vorticity restricted to `|y| <= M`.
    pub core: SizeNorms,
    /// Largest of the three ratios `mode / core`.
    pub c1: f64,
}

/// Sizes of `Re eta` on the box, measured against the background core.
pub fn measure_c1(profile: &RadialVortexProfile, mode: &ModeShape, q: f64, n: usize, half_width: f64) -> C1Measurement {
    let f = mode_field(mode, Complex64::new(1.0, 0.0), n, half_width);
    let area = f.cell_area();
    let points: Vec<[f64; 2]> = f.points().collect();
    let sp = Spectral2D::new(n, half_width);
    let [gx, gy] = sp.gradient(&f.data);
    let grad: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
    let m = profile.m_outer();
    let radius: Vec<f64> = points.iter().map(|y| y[0].hypot(y[1])).collect();
    let core: Vec<f64> = radius.iter().map(|&r| if r <= m { profile.vorticity(r) } else { 0.0 }).collect();
    let core_grad: Vec<f64> = radius
        .iter()
        .map(|&r| if r <= m { profile.vorticity_prime(r).abs() } else { 0.0 })
        .collect();
    let mode_norms = SizeNorms::of(&f.data, &grad, &points, area, q);
    let core_norms = SizeNorms::of(&core, &core_grad, &points, area, q);
    let c1 = (mode_norms.lq / core_norms.lq)
        .max(mode_norms.weighted / core_norms.weighted)
        .max(mode_norms.grad_lorentz / core_norms.grad_lorentz);
    C1Measurement {
        mode: mode_norms,
        core: core_norms,
        c1,
    }
}
