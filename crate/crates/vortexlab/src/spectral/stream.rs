//! Stream function and velocity of a single azimuthal mode `g(s) e^{i m theta}`.

use super::grid::SpectralGrid;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Default bound on the relative size of the truncated tails.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Running integrals of one mode on a log radius grid.
///
/// With `f(u) = g(e^u) e^{2u}` the stream function is
/// `psi(t) = -(L(t) + U(t)) / (2|m|)` where
/// `L(t) = int_{-inf}^t f(u) e^{-|m|(t-u)} du` and
/// `U(t) = int_t^inf f(u) e^{-|m|(u-t)} du`.
#[derive(Clone, Debug)]
pub struct RadialStream {
    m: i64,
    t: Vec<f64>,
    f: Vec<Complex64>,
    lower: Vec<Complex64>,
    upper: Vec<Complex64>,
}

impl RadialStream {
    pub fn new(grid: &SpectralGrid, g: &[Complex64], m: i64) -> Result<Self> {
        Self::with_tolerance(grid, g, m, TAIL_TOLERANCE)
    }

    pub fn with_tolerance(grid: &SpectralGrid, g: &[Complex64], m: i64, tol: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("azimuthal index must be nonzero".into()));
        }
        if g.len() != grid.n {
            return Err(Error::InvalidParams(format!(
                "{} samples for a grid of {} points",
                g.len(),
                grid.n
            )));
        }
        let t = grid.nodes();
        let h = grid.h();
        let k = m.unsigned_abs() as f64;
        check_tails(&t, g, k, tol)?;
        let f: Vec<Complex64> = t.iter().zip(g).map(|(&u, &v)| v * (2.0 * u).exp()).collect();
        let n = f.len();
        let r = (-k * h).exp();
        let mut lower = vec![Complex64::default(); n];
        for j in 1..n {
            lower[j] = lower[j - 1] * r + (f[j - 1] * r + f[j]) * (0.5 * h);
        }
        let mut upper = vec![Complex64::default(); n];
        for j in (0..n - 1).rev() {
            upper[j] = upper[j + 1] * r + (f[j + 1] * r + f[j]) * (0.5 * h);
        }
        Ok(RadialStream {
            m,
            t,
            f,
            lower,
            upper,
        })
    }

    fn k(&self) -> f64 {
        self.m.unsigned_abs() as f64
    }

    /// Values of `psi` at the grid nodes.
    pub fn psi_nodes(&self) -> Vec<Complex64> {
        let c = -0.5 / self.k();
        self.lower.iter().zip(&self.upper).map(|(&l, &u)| (l + u) * c).collect()
    }

    /// `(L, U)` at log radius `t`, by cubic Hermite interpolation inside the
    /// window and exact exponential continuation outside.
    fn running(&self, t: f64) -> (Complex64, Complex64) {
        let k = self.k();
        let n = self.t.len();
        let (t0, tn) = (self.t[0], self.t[n - 1]);
        if t <= t0 {
            return (Complex64::default(), self.upper[0] * (-k * (t0 - t)).exp());
        }
        if t >= tn {
            return (self.lower[n - 1] * (-k * (t - tn)).exp(), Complex64::default());
        }
        let h = self.t[1] - t0;
        let j = (((t - t0) / h).floor() as usize).min(n - 2);
        let x = (t - self.t[j]) / h;
        let herm = |y0: Complex64, d0: Complex64, y1: Complex64, d1: Complex64| {
            let h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
            let h10 = x * (1.0 - x) * (1.0 - x);
            let h01 = x * x * (3.0 - 2.0 * x);
            let h11 = x * x * (x - 1.0);
            y0 * h00 + d0 * (h10 * h) + y1 * h01 + d1 * (h11 * h)
        };
        let dl = |i: usize| self.f[i] - self.lower[i] * k;
        let du = |i: usize| self.upper[i] * k - self.f[i];
        (
            herm(self.lower[j], dl(j), self.lower[j + 1], dl(j + 1)),
            herm(self.upper[j], du(j), self.upper[j + 1], du(j + 1)),
        )
    }

    /// `psi(s)` and `psi'(s)` at radius `s > 0`.
    pub fn psi_and_derivative(&self, s: f64) -> (Complex64, Complex64) {
        let (l, u) = self.running(s.ln());
        let k = self.k();
        ((l + u) * (-0.5 / k), (u - l) * (-0.5 / s))
    }

    /// Complex velocity of `w = grad^perp(e^{i m theta} psi(|x|))`.
    pub fn velocity(&self, x: [f64; 2]) -> [Complex64; 2] {
        let s = x[0].hypot(x[1]);
        if s == 0.0 {
            return [Complex64::default(); 2];
        }
        let (c, sn) = (x[0] / s, x[1] / s);
        let theta = x[1].atan2(x[0]);
        let phase = Complex64::from_polar(1.0, self.m as f64 * theta);
        let (psi, dpsi) = self.psi_and_derivative(s);
        let radial = Complex64::new(0.0, -(self.m as f64) / s) * psi;
        // psi' e_theta - (i m / s) psi e_r
        [
            phase * (-dpsi * sn + radial * c),
            phase * (dpsi * c + radial * sn),
        ]
    }
}

fn check_tails(t: &[f64], g: &[Complex64], k: f64, tol: f64) -> Result<()> {
    let n = t.len();
    let h = t[1] - t[0];
    let mass = |p: f64| -> f64 { t.iter().zip(g).map(|(&u, v)| v.norm() * (p * u).exp()).sum::<f64>() * h };
    let slope = |a: usize, b: usize| -> Option<f64> {
        let (ga, gb) = (g[a].norm(), g[b].norm());
        (ga > 0.0 && gb > 0.0).then(|| (gb.ln() - ga.ln()) / (t[b] - t[a]))
    };
    // Tail of int g tau^{1+|m|} below the window.
    if g[0].norm() > 0.0 {
        let q = slope(0, 1).unwrap_or(0.0) + 2.0 + k;
        let rem = if q > 0.0 { g[0].norm() * ((2.0 + k) * t[0]).exp() / q } else { f64::INFINITY };
        let total = mass(2.0 + k);
        if !(rem <= tol * total) {
            return Err(Error::TailTruncation(format!(
                "inner remainder {rem:e} against total {total:e}"
            )));
        }
    }
    // Tail of int g tau^{1-|m|} above the window.
    if g[n - 1].norm() > 0.0 {
        let q = -(slope(n - 2, n - 1).unwrap_or(0.0) + 2.0 - k);
        let rem = if q > 0.0 { g[n - 1].norm() * ((2.0 - k) * t[n - 1]).exp() / q } else { f64::INFINITY };
        let total = mass(2.0 - k);
        if !(rem <= tol * total) {
            return Err(Error::TailTruncation(format!(
                "outer remainder {rem:e} against total {total:e}"
            )));
        }
    }
    Ok(())
}

/// `psi` at the grid nodes from the two-integral representation.
pub fn stream_from_vorticity(grid: &SpectralGrid, g: &[Complex64], m: i64) -> Result<Vec<Complex64>> {
    Ok(RadialStream::new(grid, g, m)?.psi_nodes())
}

/// Complex velocity of the mode at a point of the plane.
pub fn velocity_from_vorticity(
    grid: &SpectralGrid,
    g: &[Complex64],
    m: i64,
    x: [f64; 2],
) -> Result<[Complex64; 2]> {
    Ok(RadialStream::new(grid, g, m)?.velocity(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn indicator_outside_its_support() {
        let grid = SpectralGrid::new(-12.0, 4.0, 16001).unwrap();
        let t = grid.nodes();
        let g: Vec<Complex64> = t.iter().map(|&u| c(if u < -1e-9 { 1.0 } else if u < 1e-9 { 0.5 } else { 0.0 })).collect();
        let psi = stream_from_vorticity(&grid, &g, 2).unwrap();
        for (&u, p) in t.iter().zip(&psi).skip(12500).step_by(211) {
            let s = u.exp();
            let want = -1.0 / (16.0 * s * s);
            assert!((p.re - want).abs() < 2e-3 * want.abs(), "s = {s}: {} vs {want}", p.re);
        }
    }

    #[test]
    fn zero_vorticity_gives_zero_stream() {
        let grid = SpectralGrid::new(-5.0, 5.0, 101).unwrap();
        let psi = stream_from_vorticity(&grid, &[c(0.0); 101], 3).unwrap();
        assert!(psi.iter().all(|p| p.norm() == 0.0));
    }

    #[test]
    fn slowly_decaying_vorticity_is_rejected() {
        let grid = SpectralGrid::new(-5.0, 5.0, 101).unwrap();
        let g: Vec<Complex64> = grid.nodes().iter().map(|&u| c((-u).exp())).collect();
        assert!(matches!(stream_from_vorticity(&grid, &g, 2), Err(Error::TailTruncation(_))));
    }
}
