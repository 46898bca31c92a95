//! Far field of eigenmodes: tail fits, slopes and the moment functional.

use super::grid::SpectralGrid;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Distance kept between the fitted decade and the Dirichlet end.
pub const TAIL_GAP: f64 = 1.5;

/// Least squares fit of `g(e^t) e^{(|m|+alpha+2)t}` on
/// `{1, e^{-alpha t}, e^{-2 alpha t}, e^{2|m|(t - t_max)}}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TailFit {
    pub coefficient: Complex64,
    pub basis: [Complex64; 4],
    pub t_start: f64,
    pub t_end: f64,
    pub relative_residual: f64,
}

fn basis(t: f64, k: f64, alpha: f64, t_max: f64) -> [f64; 4] {
    [1.0, (-alpha * t).exp(), (-2.0 * alpha * t).exp(), (2.0 * k * (t - t_max)).exp()]
}

fn solve4(mut a: [[Complex64; 4]; 4], mut b: [Complex64; 4]) -> Option<[Complex64; 4]> {
    for col in 0..4 {
        let p = (col..4).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[p][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for c in col..4 {
                let v = a[col][c];
                a[row][c] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [Complex64::default(); 4];
    for row in (0..4).rev() {
        let mut s = b[row];
        for c in row + 1..4 {
            s -= a[row][c] * x[c];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Fits the tail over the decade `[t_max - TAIL_GAP - ln 10, t_max - TAIL_GAP]`.
pub fn tail_fit(grid: &SpectralGrid, g: &[Complex64], m: i64, alpha: f64) -> Result<TailFit> {
    let k = m.unsigned_abs() as f64;
    let t_end = grid.t_max - TAIL_GAP;
    let t_start = t_end - std::f64::consts::LN_10;
    let t = grid.nodes();
    let rows: Vec<(f64, Complex64)> = t
        .iter()
        .zip(g)
        .filter(|(&u, _)| u >= t_start && u <= t_end)
        .map(|(&u, &v)| (u, v * ((k + alpha + 2.0) * u).exp()))
        .collect();
    if rows.len() < 8 {
        return Err(Error::DegenerateFit(format!("{} samples in the tail decade", rows.len())));
    }
    let scale: [f64; 4] = {
        let b = basis(t_start, k, alpha, grid.t_max);
        let e = basis(t_end, k, alpha, grid.t_max);
        [0, 1, 2, 3].map(|i| b[i].abs().max(e[i].abs()))
    };
    let mut ata = [[Complex64::default(); 4]; 4];
    let mut atb = [Complex64::default(); 4];
    for &(u, y) in &rows {
        let phi = basis(u, k, alpha, grid.t_max);
        for i in 0..4 {
            let pi = phi[i] / scale[i];
            atb[i] += y * pi;
            for j in 0..4 {
                ata[i][j] += Complex64::new(pi * phi[j] / scale[j], 0.0);
            }
        }
    }
    let x = solve4(ata, atb).ok_or_else(|| Error::DegenerateFit("singular tail basis".into()))?;
    let coef = [0, 1, 2, 3].map(|i| x[i] / scale[i]);
    let (mut res, mut norm) = (0.0, 0.0);
    for &(u, y) in &rows {
        let phi = basis(u, k, alpha, grid.t_max);
        let fit: Complex64 = (0..4).map(|i| coef[i] * phi[i]).sum();
        res += (y - fit).norm_sqr();
        norm += y.norm_sqr();
    }
    Ok(TailFit {
        coefficient: coef[0],
        basis: coef,
        t_start,
        t_end,
        relative_residual: (res / norm.max(f64::MIN_POSITIVE)).sqrt(),
    })
}

/// Least squares slope of `log|g|` against `log s` over the fitted decade.
pub fn tail_slope(grid: &SpectralGrid, g: &[Complex64]) -> Result<f64> {
    let t_end = grid.t_max - TAIL_GAP;
    let t_start = t_end - std::f64::consts::LN_10;
    let pts: Vec<(f64, f64)> = grid
        .nodes()
        .into_iter()
        .zip(g)
        .filter(|(u, v)| *u >= t_start && *u <= t_end && v.norm() > 0.0)
        .map(|(u, v)| (u, v.norm().ln()))
        .collect();
    let n = pts.len() as f64;
    if n < 2.0 {
        return Err(Error::DegenerateFit("too few tail samples".into()));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("zero variance in log radius".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MomentVariant {
    /// `mu = -(alpha / 2|m|) int_0^inf g tau^{1+|m|} d tau`.
    Plain,
    /// `lambda = (i alpha / 2 kappa0) int_0^inf g tau^{1+|m|} d tau - |m| - 2`.
    Scaled { kappa0: f64 },
}

/// How the moment integral is continued beyond the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentTail {
    /// The samples are taken to vanish outside the window.
    Truncated,
    /// The samples follow the normalized power law, whose contribution past
    /// `t_max - TAIL_GAP` is integrated from the fitted expansion.
    PowerLaw,
}

/// `int_0^inf g(tau) tau^{1+|m|} d tau` by the trapezoid rule in log radius.
pub fn moment_integral(
    grid: &SpectralGrid,
    g: &[Complex64],
    m: i64,
    alpha: f64,
    tail: MomentTail,
) -> Result<Complex64> {
    let k = m.unsigned_abs() as f64;
    let t = grid.nodes();
    let h = grid.h();
    let cut = match tail {
        MomentTail::Truncated => grid.t_max + h,
        MomentTail::PowerLaw => grid.t_max - TAIL_GAP,
    };
    let idx: Vec<usize> = (0..t.len()).filter(|&j| t[j] <= cut + 1e-12 * h).collect();
    let last = *idx.last().unwrap();
    let mut s = Complex64::default();
    for &j in &idx {
        let w = if j == 0 || j == last { 0.5 * h } else { h };
        s += g[j] * ((2.0 + k) * t[j]).exp() * w;
    }
    if tail == MomentTail::PowerLaw {
        let fit = tail_fit(grid, g, m, alpha)?;
        let dev = (fit.coefficient - 1.0).norm();
        if dev > 0.1 {
            return Err(Error::NotNormalized(format!(
                "fitted tail coefficient {} deviates by {dev:.3}",
                fit.coefficient
            )));
        }
        let tc = t[last];
        for (p, c) in fit.basis[..3].iter().enumerate() {
            let q = (p as f64 + 1.0) * alpha;
            s += c * (-q * tc).exp() / q;
        }
    }
    Ok(s)
}

pub fn moment_functional(
    grid: &SpectralGrid,
    g: &[Complex64],
    m: i64,
    alpha: f64,
    variant: MomentVariant,
    tail: MomentTail,
) -> Result<Complex64> {
    let k = m.unsigned_abs() as f64;
    let p = moment_integral(grid, g, m, alpha, tail)?;
    Ok(match variant {
        MomentVariant::Plain => -p * (alpha / (2.0 * k)),
        MomentVariant::Scaled { kappa0 } => Complex64::new(0.0, alpha / (2.0 * kappa0)) * p - (k + 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_moment() {
        let grid = SpectralGrid::new(-12.0, 3.0, 15001).unwrap();
        let g: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&u| Complex64::new(if u <= 1e-12 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        let v = moment_functional(&grid, &g, 2, 1.0, MomentVariant::Plain, MomentTail::Truncated).unwrap();
        assert!((v.re + 1.0 / 16.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn pure_power_tail_is_fitted_exactly() {
        let grid = SpectralGrid::new(-6.0, 9.0, 3001).unwrap();
        let (m, alpha) = (3i64, 0.4);
        let c = Complex64::new(0.7, -0.2);
        let g: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&u| c * (-(5.4) * u).exp() * (1.0 + 0.3 * (-alpha * u).exp()))
            .collect();
        let fit = tail_fit(&grid, &g, m, alpha).unwrap();
        assert!((fit.coefficient - c).norm() < 1e-10, "{:?}", fit);
        let slope = tail_slope(&grid, &g).unwrap();
        assert!((slope + 5.4).abs() < 0.1, "{slope}");
    }

    #[test]
    fn unnormalized_tail_is_rejected() {
        let grid = SpectralGrid::new(-6.0, 9.0, 3001).unwrap();
        let g: Vec<Complex64> = grid.nodes().iter().map(|&u| Complex64::new(3.0 * (-4.4 * u).exp(), 0.0)).collect();
        let r = moment_functional(&grid, &g, 2, 0.4, MomentVariant::Plain, MomentTail::PowerLaw);
        assert!(matches!(r, Err(Error::NotNormalized(_))));
    }
}
