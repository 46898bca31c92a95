//! Green's function of `-d^2/dt^2 + m^2` on a uniform log radius grid.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Decay ratio `r = e^{-m~h}` and node weight `h^2 / (2 sinh(m~h))` of the
/// lattice kernel, where `cosh(m~h) = 1 + m^2 h^2 / 2`.
///
/// The lattice kernel is the exact inverse of the three point operator, so it
/// tends to `(1/2m) e^{-m|t - eta|}` with error `O(h^2)`.
pub fn lattice_kernel(m: f64, h: f64) -> (f64, f64) {
    let x = (m * h).powi(2);
    let mh = (1.0 + 0.5 * x).acosh();
    ((-mh).exp(), h * h / (2.0 * mh.sinh()))
}

fn check(m: f64, h: f64) -> Result<()> {
    if !(m > 0.0) {
        return Err(Error::InvalidParams(format!("kernel index m = {m} must be positive")));
    }
    if m * h > 0.5 {
        return Err(Error::GridTooCoarse(format!("m h = {} exceeds 0.5", m * h)));
    }
    Ok(())
}

fn convolve<T>(r: f64, w: f64, f: &[T]) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    let mut left = vec![T::default(); n];
    let mut acc = T::default();
    for j in 0..n {
        acc = acc * r + f[j];
        left[j] = acc;
    }
    let mut out = vec![T::default(); n];
    acc = T::default();
    for j in (0..n).rev() {
        acc = acc * r + f[j];
        out[j] = (left[j] + acc - f[j]) * w;
    }
    out
}

/// `psi(t) = int K_m(t, eta) f(eta) d eta` over the grid with spacing `h`,
/// evaluated in O(n) by two running exponential sums.
pub fn greens_apply(m: f64, h: f64, f: &[f64]) -> Result<Vec<f64>> {
    check(m, h)?;
    let (r, w) = lattice_kernel(m, h);
    Ok(convolve(r, w, f))
}

pub fn greens_apply_complex(m: f64, h: f64, f: &[Complex64]) -> Result<Vec<Complex64>> {
    check(m, h)?;
    let (r, w) = lattice_kernel(m, h);
    Ok(convolve(r, w, f))
}

/// `(-d^2/dt^2 + m^2) psi` by centered differences at interior nodes; the two
/// end values are left at zero.
pub fn helmholtz_apply(m: f64, h: f64, psi: &[f64]) -> Vec<f64> {
    let n = psi.len();
    let mut out = vec![0.0; n];
    for j in 1..n.saturating_sub(1) {
        out[j] = (2.0 * psi[j] - psi[j - 1] - psi[j + 1]) / (h * h) + m * m * psi[j];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::linspace;

    #[test]
    fn recovers_gaussian_from_its_forcing() {
        let m = 2.0;
        let mut errs = Vec::new();
        for &n in &[801usize, 1601] {
            let t: Vec<f64> = linspace(-10.0, 10.0, n);
            let h = t[1] - t[0];
            let f: Vec<f64> = t
                .iter()
                .map(|&x| (2.0 - 4.0 * x * x + m * m) * (-x * x).exp())
                .collect();
            let psi = greens_apply(m, h, &f).unwrap();
            let err = t
                .iter()
                .zip(&psi)
                .map(|(&x, &p)| (p - (-x * x).exp()).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[0] < 1e-3, "{errs:?}");
        assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
    }

    #[test]
    fn narrow_bump_gives_the_kernel() {
        let t = linspace(-20.0, 20.0, 8001);
        let h = t[1] - t[0];
        let mut f = vec![0.0; t.len()];
        f[4000] = 1.0 / h;
        let psi = greens_apply(1.0, h, &f).unwrap();
        for (&x, &p) in t.iter().zip(&psi).step_by(97) {
            assert!((p - 0.5 * (-x.abs()).exp()).abs() < 1e-5, "{x} {p}");
        }
    }

    #[test]
    fn zero_in_zero_out_and_coarse_grid_rejected() {
        assert!(greens_apply(2.0, 0.01, &[0.0; 50]).unwrap().iter().all(|&v| v == 0.0));
        assert!(matches!(greens_apply(2.0, 0.3, &[1.0; 5]), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn lattice_kernel_inverts_the_three_point_operator() {
        let t: Vec<f64> = linspace(-15.0, 15.0, 1201);
        let h = t[1] - t[0];
        let f: Vec<f64> = t.iter().map(|&x| (-(x - 1.0).powi(2)).exp() * x.sin()).collect();
        let psi = greens_apply(3.0, h, &f).unwrap();
        let back = helmholtz_apply(3.0, h, &psi);
        let err = (1..t.len() - 1).map(|j| (back[j] - f[j]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }
}
