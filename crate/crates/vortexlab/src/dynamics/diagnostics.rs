//! Measurements on trajectories: gaps, growth fits, mode phases, radial
//! content and Hölder exponents.

use super::evolve::Trajectory;
use super::field::Field2D;
use crate::error::{Error, Result};
use crate::norms::lebesgue_norm;
use crate::quadrature::GaussLegendre;
use crate::scaling::ModeShape;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub tau: f64,
    pub gap: f64,
    pub linear_norm: f64,
    pub ratio: f64,
}

/// `||sigma - sigma_lin||_Q` and its ratio to `||sigma_lin||_Q` at the shared snapshots.
pub fn linear_gap(nonlinear: &Trajectory, linear: &Trajectory, q: f64) -> Result<Vec<GapPoint>> {
    let (a, b) = (&nonlinear.snapshots, &linear.snapshots);
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::MismatchedSampling(format!("{} and {} snapshots", a.len(), b.len())));
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            x.check_same_grid(y)?;
            if (x.time - y.time).abs() > 1e-9 * (1.0 + x.time.abs()) {
                return Err(Error::MismatchedSampling(format!("snapshot times {} and {}", x.time, y.time)));
            }
            let diff: Vec<f64> = x.data.iter().zip(&y.data).map(|(u, v)| u - v).collect();
            let gap = lebesgue_norm(&diff, x.cell_area(), q);
            let lin = lebesgue_norm(&y.data, y.cell_area(), q);
            Ok(GapPoint {
                tau: x.time,
                gap,
                linear_norm: lin,
                ratio: if lin > 0.0 { gap / lin } else { 0.0 },
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub samples: usize,
}

/// Least squares line through `(x, y)` pairs.
pub fn fit_line(points: &[(f64, f64)]) -> Result<LineFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} samples", points.len())));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let sxy = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let syy = points.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("zero variance in the abscissae".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        r2,
        samples: points.len(),
    })
}

/// Fit of `log norm = rate tau + intercept` over `window`.
pub fn growth_rate_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<LineFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .map(|&(t, v)| {
            if v > 0.0 {
                Ok((t, v.ln()))
            } else {
                Err(Error::DegenerateFit(format!("non-positive norm {v} at tau = {t}")))
            }
        })
        .collect::<Result<_>>()?;
    if pts.len() < 10 {
        return Err(Error::DegenerateFit(format!("{} samples in the window, need 10", pts.len())));
    }
    fit_line(&pts)
}

/// Projection `sum sigma conj(eta) h^2` of each snapshot on the mode.
pub fn mode_projection(field: &Field2D, eta: &ModeShape) -> Complex64 {
    let area = field.cell_area();
    field
        .points()
        .zip(&field.data)
        .map(|(y, &v)| eta.eta(y).conj() * v)
        .sum::<Complex64>()
        * area
}

/// Unwrapped phase of the mode projection along the snapshots.
pub fn mode_phase_series(snapshots: &[Field2D], eta: &ModeShape) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(snapshots.len());
    for s in snapshots {
        let mut ph = mode_projection(s, eta).arg();
        if let Some(&(_, prev)) = out.last() {
            let two_pi = 2.0 * std::f64::consts::PI;
            ph += two_pi * ((prev - ph) / two_pi).round();
        }
        out.push((s.time, ph));
    }
    out
}

/// Nodes and weights of a polar quadrature about the origin.
#[derive(Clone, Debug)]
pub struct PolarQuadrature {
    pub radii: Vec<f64>,
    pub weights: Vec<f64>,
    pub n_theta: usize,
}

impl PolarQuadrature {
    /// Gauss-Legendre panels between the sorted `breaks` in `r`, with
    /// geometric panels towards the origin.
    pub fn new(breaks: &[f64], panels_per_gap: usize, order: usize, n_theta: usize) -> Self {
        let gl = GaussLegendre::<f64>::new(order);
        let mut b: Vec<f64> = breaks.iter().copied().filter(|v| v.is_finite() && *v >= 0.0).collect();
        b.push(0.0);
        b.sort_by(f64::total_cmp);
        b.dedup_by(|a, c| (*a - *c).abs() <= 1e-14 * c.abs().max(1e-300));
        let mut radii = Vec::new();
        let mut weights = Vec::new();
        for w in b.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let edges: Vec<f64> = if lo == 0.0 {
                let mut e: Vec<f64> = (0..=panels_per_gap * 3).map(|k| hi * 0.5f64.powi(k as i32)).collect();
                e.push(0.0);
                e.reverse();
                e
            } else {
                (0..=panels_per_gap)
                    .map(|k| lo + (hi - lo) * k as f64 / panels_per_gap as f64)
                    .collect()
            };
            for e in edges.windows(2) {
                for (r, wt) in gl.mapped(e[0], e[1]) {
                    radii.push(r);
                    weights.push(wt * r);
                }
            }
        }
        PolarQuadrature {
            radii,
            weights,
            n_theta,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        let dth = 2.0 * std::f64::consts::PI / self.n_theta as f64;
        self.radii.iter().zip(&self.weights).flat_map(move |(&r, &w)| {
            (0..self.n_theta).map(move |k| {
                let th = (k as f64 + 0.5) * dth;
                ([r * th.cos(), r * th.sin()], w * dth)
            })
        })
    }

    /// Share of the `L^2` energy of `f` outside the zero azimuthal mode.
    pub fn nonradial_fraction(&self, f: impl Fn([f64; 2]) -> f64) -> f64 {
        let dth = 2.0 * std::f64::consts::PI / self.n_theta as f64;
        let mut total = 0.0;
        let mut radial = 0.0;
        let mut ring = vec![0.0; self.n_theta];
        for (&r, &w) in self.radii.iter().zip(&self.weights) {
            for (k, v) in ring.iter_mut().enumerate() {
                let th = (k as f64 + 0.5) * dth;
                *v = f([r * th.cos(), r * th.sin()]);
            }
            let mean = ring.iter().sum::<f64>() / self.n_theta as f64;
            let sq = ring.iter().map(|v| v * v).sum::<f64>();
            total += w * sq * dth;
            radial += w * mean * mean * self.n_theta as f64 * dth;
        }
        if total == 0.0 {
            0.0
        } else {
            ((total - radial) / total).clamp(0.0, 1.0)
        }
    }
}

/// Non-radial energy share of a grid field over the inscribed disc.
pub fn nonradial_fraction(field: &Field2D) -> f64 {
    let l = field.half_width - 2.0 * field.spacing();
    let panels = field.n / 2;
    let quad = PolarQuadrature::new(&[l], panels, 4, 2 * field.n);
    quad.nonradial_fraction(|x| field.sample_bicubic(x))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub space_exponent: f64,
    pub time_exponent: Option<f64>,
    pub exponent: f64,
    pub separations: Vec<f64>,
}

/// Largest increment of `f` over shifts of `shift` cells along either axis.
fn max_increment(f: &Field2D, shift: usize) -> f64 {
    let n = f.n;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let v = f.data[j * n + i];
            if i + shift < n {
                worst = worst.max((f.data[j * n + i + shift] - v).abs());
            }
            if j + shift < n {
                worst = worst.max((f.data[(j + shift) * n + i] - v).abs());
            }
        }
    }
    worst
}

/// Empirical Hölder exponent of velocity components sampled over time.
///
/// Spatial increments are measured at separations `2h, 4h, 8h`; pairs closer
/// than `2h` are not used. The exponent is the slope of `log max|dv|` against
/// `log |dx|`, capped at 1; the time exponent uses the dyadic multiples of the
/// first sampling interval.
pub fn holder_diagnostic(series: &[[Field2D; 2]], _q: f64) -> Result<HolderReport> {
    if series.len() < 2 {
        return Err(Error::InvalidParams("need at least two time samples".into()));
    }
    let h = series[0][0].spacing();
    let shifts = [2usize, 4, 8];
    let mut space: f64 = 1.0;
    for pair in series {
        for comp in pair {
            let pts: Vec<(f64, f64)> = shifts
                .iter()
                .map(|&s| ((s as f64 * h).ln(), max_increment(comp, s).max(1e-300).ln()))
                .collect();
            let slope = fit_line(&pts)?.slope;
            space = space.min(slope);
        }
    }
    let mut time = None;
    let mut lags = vec![1usize];
    while 2 * lags.last().unwrap() < series.len() {
        let l = 2 * lags.last().unwrap();
        lags.push(l);
    }
    if lags.len() >= 2 {
        let dt = series[1][0].time - series[0][0].time;
        let pts: Vec<(f64, f64)> = lags
            .iter()
            .map(|&lag| {
                let mut worst: f64 = 0.0;
                for k in 0..series.len() - lag {
                    for c in 0..2 {
                        let (a, b) = (&series[k][c], &series[k + lag][c]);
                        for (u, v) in a.data.iter().zip(&b.data) {
                            worst = worst.max((u - v).abs());
                        }
                    }
                }
                ((lag as f64 * dt).ln(), worst.max(1e-300).ln())
            })
            .collect();
        time = Some(fit_line(&pts)?.slope.min(1.0));
    }
    let space = space.min(1.0);
    Ok(HolderReport {
        space_exponent: space,
        time_exponent: time,
        exponent: time.map_or(space, |t| t.min(space)),
        separations: shifts.iter().map(|&s| s as f64 * h).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::field::FieldKind;

    #[test]
    fn growth_fit_recovers_exponentials() {
        let s: Vec<(f64, f64)> = (0..40).map(|k| (k as f64 * 0.1, 2.0 * (0.3 * k as f64 * 0.1).exp())).collect();
        let f = growth_rate_fit(&s, (0.0, 4.0)).unwrap();
        assert!((f.slope - 0.3).abs() < 1e-12);
        assert!((f.intercept - 2f64.ln()).abs() < 1e-12);
        assert!(growth_rate_fit(&s, (0.0, 0.5)).is_err());
        let flat = vec![(1.0, 1.0); 12];
        assert!(matches!(growth_rate_fit(&flat, (0.0, 2.0)), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn polar_energy_split() {
        let quad = PolarQuadrature::new(&[1.0, 3.0, 8.0], 8, 8, 64);
        let radial = |x: [f64; 2]| (-(x[0] * x[0] + x[1] * x[1])).exp();
        assert!(quad.nonradial_fraction(radial) < 1e-14);
        let mode = |x: [f64; 2]| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            (x[0] * x[0] - x[1] * x[1]) / r2.max(1e-300) * (-r2).exp()
        };
        assert!((quad.nonradial_fraction(mode) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_fields_are_lipschitz() {
        let mk = |t: f64| {
            let f = Field2D::from_fn(128, 4.0, FieldKind::VelocityX, |[x, y]| (-(x * x + y * y) / 2.0).exp() * (1.0 + t));
            [f.clone(), f]
        };
        let mut series = Vec::new();
        for k in 0..5 {
            let mut p = mk(0.1 * k as f64);
            p[0].time = 0.1 * k as f64;
            p[1].time = p[0].time;
            series.push(p);
        }
        let rep = holder_diagnostic(&series, 3.0).unwrap();
        assert!(rep.space_exponent > 0.95, "{rep:?}");
        assert!(rep.time_exponent.unwrap() > 0.95);
    }
}
