//! The space-time identity satisfied by weak solutions with forcing,
//!
//! `int w0 psi(0) + int int w d_t psi + int int w (v . grad) psi + int int Z psi = 0`,
//! evaluated as a residual over a family of test functions.

use super::diagnostics::PolarQuadrature;
use super::field::Field2D;
use crate::error::{Error, Result};
use crate::quadrature::{linspace, simpson_weights, GaussLegendre};
use crate::scaling::chi_tilde;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// `psi(x, t) = phi(t / T) exp(-|x - c|^2 / (2 w^2)) cos(k . x + p)`, with
/// `phi = 1` on `[0, 1/2]` and `phi = 0` past 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: [f64; 2],
    pub width: f64,
    pub wave: [f64; 2],
    pub phase: f64,
    pub t_support: f64,
    pub amplitude: f64,
}

impl TestFunction {
    fn space(&self, x: [f64; 2]) -> (f64, [f64; 2]) {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let g = self.amplitude * (-(d[0] * d[0] + d[1] * d[1]) / (2.0 * self.width * self.width)).exp();
        let arg = self.wave[0] * x[0] + self.wave[1] * x[1] + self.phase;
        let (s, c) = arg.sin_cos();
        let w2 = self.width * self.width;
        let grad = [
            g * (-d[0] / w2 * c - self.wave[0] * s),
            g * (-d[1] / w2 * c - self.wave[1] * s),
        ];
        (g * c, grad)
    }

    fn time(&self, t: f64) -> (f64, f64) {
        let (v, d) = chi_tilde(2.0 * t / self.t_support);
        (v, 2.0 * d / self.t_support)
    }

    /// `(psi, d_t psi, grad psi)`.
    pub fn eval(&self, x: [f64; 2], t: f64) -> (f64, f64, [f64; 2]) {
        let (phi, dphi) = self.time(t);
        let (s, g) = self.space(x);
        (phi * s, dphi * s, [phi * g[0], phi * g[1]])
    }

    /// Smallest length scale of the function.
    pub fn scale(&self) -> f64 {
        let k = self.wave[0].hypot(self.wave[1]);
        if k > 0.0 {
            self.width.min(1.0 / k)
        } else {
            self.width
        }
    }

    /// Reach beyond which the Gaussian envelope is below `1e-16` of its peak.
    pub fn reach(&self) -> f64 {
        self.center[0].hypot(self.center[1]) + 8.6 * self.width
    }

    /// Random test functions with centres within `radius`, widths in `widths`.
    pub fn random_family(rng: &mut impl Rng, count: usize, radius: f64, widths: (f64, f64), t_support: f64) -> Vec<Self> {
        (0..count)
            .map(|_| {
                let r = radius * rng.random::<f64>().sqrt();
                let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                let width = widths.0 + (widths.1 - widths.0) * rng.random::<f64>();
                let kmag = rng.random::<f64>() / width;
                let kth = 2.0 * std::f64::consts::PI * rng.random::<f64>();
                TestFunction {
                    center: [r * th.cos(), r * th.sin()],
                    width,
                    wave: [kmag * kth.cos(), kmag * kth.sin()],
                    phase: 2.0 * std::f64::consts::PI * rng.random::<f64>(),
                    t_support,
                    amplitude: 1.0,
                }
            })
            .collect()
    }
}

/// Fields of one time sample on a common grid.
#[derive(Clone, Debug)]
pub struct WeakSnapshot {
    pub omega: Field2D,
    pub velocity: [Field2D; 2],
    pub forcing: Field2D,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    /// Largest normalized residual over the test set.
    pub residual: f64,
    /// `[initial, d_t psi, transport, forcing]` integrals per test function.
    pub integrals: Vec<[f64; 4]>,
}

fn normalized(terms: &[f64; 4]) -> f64 {
    let scale = terms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        0.0
    } else {
        terms.iter().sum::<f64>().abs() / scale
    }
}

fn collect(integrals: Vec<[f64; 4]>) -> WeakResidual {
    WeakResidual {
        residual: integrals.iter().map(normalized).fold(0.0, f64::max),
        integrals,
    }
}

/// Composite Simpson in `t` over the snapshots and grid sums in `x`.
pub fn weak_residual(snapshots: &[WeakSnapshot], omega0: &Field2D, tests: &[TestFunction]) -> Result<WeakResidual> {
    let Some(last) = snapshots.last() else {
        return Err(Error::MismatchedSampling("no snapshots".into()));
    };
    let h = snapshots
        .iter()
        .map(|s| s.omega.spacing())
        .fold(omega0.spacing(), f64::max);
    for s in snapshots {
        s.omega.check_same_grid(&s.forcing)?;
        s.omega.check_same_grid(&s.velocity[0])?;
        s.omega.check_same_grid(&s.velocity[1])?;
    }
    for f in tests {
        if f.amplitude != 0.0 && f.scale() < 4.0 * h {
            return Err(Error::UnresolvedQuadrature(format!(
                "test function scale {} below four grid spacings ({})",
                f.scale(),
                4.0 * h
            )));
        }
        if f.t_support > last.omega.time * (1.0 + 1e-12) {
            return Err(Error::UnresolvedQuadrature(format!(
                "time support {} extends past the last sample {}",
                f.t_support, last.omega.time
            )));
        }
    }
    let times: Vec<f64> = snapshots.iter().map(|s| s.omega.time).collect();
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::MismatchedSampling("snapshot times must increase".into()));
    }
    let weights = simpson_weights(&times);
    let mut out = Vec::with_capacity(tests.len());
    for f in tests {
        let mut terms = [0.0; 4];
        let area0 = omega0.cell_area();
        terms[0] = omega0
            .points()
            .zip(&omega0.data)
            .map(|(x, &w)| w * f.eval(x, 0.0).0)
            .sum::<f64>()
            * area0;
        let samples: Vec<[f64; 3]> = snapshots
            .iter()
            .map(|s| {
                let t = s.omega.time;
                let area = s.omega.cell_area();
                let mut acc = [0.0; 3];
                for (k, x) in s.omega.points().enumerate() {
                    let (psi, dt, g) = f.eval(x, t);
                    let w = s.omega.data[k];
                    acc[0] += w * dt;
                    acc[1] += w * (s.velocity[0].data[k] * g[0] + s.velocity[1].data[k] * g[1]);
                    acc[2] += s.forcing.data[k] * psi;
                }
                acc.map(|v| v * area)
            })
            .collect();
        for (sample, w) in samples.iter().zip(&weights) {
            for c in 0..3 {
                terms[c + 1] += w * sample[c];
            }
        }
        out.push(terms);
    }
    Ok(collect(out))
}

/// A weak solution given by point evaluations.
pub trait WeakSolution: Sync {
    fn omega0(&self, x: [f64; 2]) -> f64;
    fn omega(&self, x: [f64; 2], t: f64) -> f64;
    fn velocity(&self, x: [f64; 2], t: f64) -> [f64; 2];
    fn forcing(&self, x: [f64; 2], t: f64) -> f64;
    /// Radii at time `t` where the fields change character.
    fn radial_breaks(&self, _t: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// Settings of the polar-in-space, Gauss-in-time quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticQuadrature {
    pub time_panels: usize,
    pub time_order: usize,
    pub radial_panels: usize,
    pub radial_order: usize,
    pub n_theta: usize,
}

impl Default for AnalyticQuadrature {
    fn default() -> Self {
        AnalyticQuadrature {
            time_panels: 8,
            time_order: 12,
            radial_panels: 4,
            radial_order: 12,
            n_theta: 96,
        }
    }
}

/// The same residual with a polar quadrature about the origin in space and
/// Gauss-Legendre in `u` with `t = T u^4` in time.
pub fn weak_residual_analytic(
    sol: &dyn WeakSolution,
    tests: &[TestFunction],
    quad: &AnalyticQuadrature,
) -> Result<WeakResidual> {
    let t_end = tests.iter().map(|f| f.t_support).fold(0.0, f64::max);
    let reach = tests.iter().map(|f| f.reach()).fold(0.0, f64::max);
    let gl = GaussLegendre::<f64>::new(quad.time_order);
    let edges = linspace(0.0, 1.0, quad.time_panels + 1);
    let breaks_at = |t: f64| {
        let mut b: Vec<f64> = sol.radial_breaks(t).into_iter().filter(|&r| r < reach).collect();
        b.push(reach);
        for f in tests {
            let c = f.center[0].hypot(f.center[1]);
            b.push(c);
            b.push((c - 4.0 * f.width).max(0.0));
            b.push(c + 4.0 * f.width);
        }
        b
    };
    let mut out = vec![[0.0; 4]; tests.len()];
    let q0 = PolarQuadrature::new(&breaks_at(0.0), quad.radial_panels, quad.radial_order, quad.n_theta);
    for (x, w) in q0.points() {
        let v = sol.omega0(x);
        if v != 0.0 {
            for (k, f) in tests.iter().enumerate() {
                out[k][0] += w * v * f.eval(x, 0.0).0;
            }
        }
    }
    for e in edges.windows(2) {
        for (u, wu) in gl.mapped(e[0], e[1]) {
            let t = t_end * u.powi(4);
            let jac = 4.0 * t_end * u.powi(3) * wu;
            if t <= 0.0 {
                continue;
            }
            let q = PolarQuadrature::new(&breaks_at(t), quad.radial_panels, quad.radial_order, quad.n_theta);
            for (x, w) in q.points() {
                let om = sol.omega(x, t);
                let vel = sol.velocity(x, t);
                let z = sol.forcing(x, t);
                for (k, f) in tests.iter().enumerate() {
                    let (psi, dt, g) = f.eval(x, t);
                    let ww = w * jac;
                    out[k][1] += ww * om * dt;
                    out[k][2] += ww * om * (vel[0] * g[0] + vel[1] * g[1]);
                    out[k][3] += ww * z * psi;
                }
            }
        }
    }
    Ok(collect(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::field::FieldKind;

    #[test]
    fn zero_test_function_contributes_nothing() {
        let f = Field2D::from_fn(32, 4.0, FieldKind::Omega, |[x, y]| (-(x * x + y * y)).exp());
        let mut snaps = Vec::new();
        for k in 0..3 {
            let mut o = f.clone();
            o.time = 0.5 * k as f64;
            snaps.push(WeakSnapshot {
                velocity: [o.like(FieldKind::VelocityX, vec![0.0; 1024]), o.like(FieldKind::VelocityY, vec![0.0; 1024])],
                forcing: o.like(FieldKind::Forcing, vec![1.0; 1024]),
                omega: o,
            });
        }
        let zero = TestFunction {
            center: [0.0; 2],
            width: 1.0,
            wave: [0.0; 2],
            phase: 0.0,
            t_support: 1.0,
            amplitude: 0.0,
        };
        let r = weak_residual(&snaps, &f, &[zero]).unwrap();
        assert_eq!(r.integrals[0], [0.0; 4]);
        assert_eq!(r.residual, 0.0);
        let narrow = TestFunction {
            width: 0.1,
            amplitude: 1.0,
            ..zero
        };
        assert!(matches!(weak_residual(&snaps, &f, &[narrow]), Err(Error::UnresolvedQuadrature(_))));
    }

    #[test]
    fn time_profile_is_one_then_zero() {
        let f = TestFunction {
            center: [0.0; 2],
            width: 1.0,
            wave: [0.0; 2],
            phase: 0.0,
            t_support: 2.0,
            amplitude: 1.0,
        };
        assert_eq!(f.time(0.5), (1.0, 0.0));
        assert_eq!(f.time(2.5), (0.0, 0.0));
        let h = 1e-6;
        let fd = (f.time(1.5 + h).0 - f.time(1.5 - h).0) / (2.0 * h);
        assert!((fd - f.time(1.5).1).abs() < 1e-6);
    }
}
