//! Two dimensional FFTs on the periodic box and spectral derivatives.
//!
//! Real data are transformed along `x` first, so only the `n / 2 + 1`
//! nonnegative `x` wavenumbers are stored. Spectral arrays are laid out as
//! `hat[a * n + b]` with `a` the `x` wavenumber index and `b` the `y` index.

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct Spectral2D {
    pub n: usize,
    pub half_width: f64,
    /// Number of stored `x` wavenumbers, `n / 2 + 1`.
    pub modes_x: usize,
    /// Angular `x` wavenumbers by index `a < modes_x`.
    pub kx: Vec<f64>,
    /// Angular wavenumbers by index, used along `y`.
    pub k: Vec<f64>,
    /// Modes kept by the two-thirds rule, by index.
    pub keep: Vec<bool>,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn transpose(a: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); rows * cols];
    const B: usize = 32;
    for rb in (0..rows).step_by(B) {
        for cb in (0..cols).step_by(B) {
            for r in rb..(rb + B).min(rows) {
                for c in cb..(cb + B).min(cols) {
                    out[c * rows + r] = a[r * cols + c];
                }
            }
        }
    }
    out
}

impl Spectral2D {
    pub fn new(n: usize, half_width: f64) -> Self {
        assert!(n >= 4 && n % 2 == 0, "grid size must be even");
        let mut planner = FftPlanner::new();
        let mut real_planner = RealFftPlanner::new();
        let base = std::f64::consts::PI / half_width;
        let k: Vec<f64> = (0..n)
            .map(|i| {
                let j = if i <= n / 2 { i as isize } else { i as isize - n as isize };
                if i == n / 2 {
                    0.0
                } else {
                    base * j as f64
                }
            })
            .collect();
        let keep = (0..n)
            .map(|i| {
                let j = if i <= n / 2 { i } else { n - i };
                i != n / 2 && 3 * j < n
            })
            .collect();
        let modes_x = n / 2 + 1;
        Spectral2D {
            n,
            half_width,
            modes_x,
            kx: k[..modes_x].to_vec(),
            k,
            keep,
            r2c: real_planner.plan_fft_forward(n),
            c2r: real_planner.plan_fft_inverse(n),
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// Length of a spectral array.
    pub fn spectral_len(&self) -> usize {
        self.modes_x * self.n
    }

    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        let (n, h) = (self.n, self.modes_x);
        let mut rows = vec![Complex64::default(); n * h];
        let mut line = vec![0.0; n];
        for (j, out) in rows.chunks_exact_mut(h).enumerate() {
            line.copy_from_slice(&data[j * n..(j + 1) * n]);
            self.r2c.process(&mut line, out).expect("buffer sizes match the plan");
        }
        let mut t = transpose(&rows, n, h);
        self.fwd.process(&mut t);
        t
    }

    pub fn inverse(&self, hat: &[Complex64]) -> Vec<f64> {
        let (n, h) = (self.n, self.modes_x);
        let mut buf = hat.to_vec();
        self.inv.process(&mut buf);
        let mut rows = transpose(&buf, h, n);
        let scale = 1.0 / (n * n) as f64;
        let mut out = vec![0.0; n * n];
        for (j, row) in rows.chunks_exact_mut(h).enumerate() {
            row[0].im = 0.0;
            row[h - 1].im = 0.0;
            self.c2r
                .process(row, &mut out[j * n..(j + 1) * n])
                .expect("buffer sizes match the plan");
        }
        out.iter_mut().for_each(|v| *v *= scale);
        out
    }

    pub fn dealias(&self, hat: &mut [Complex64]) {
        let n = self.n;
        for a in 0..self.modes_x {
            for b in 0..n {
                if !(self.keep[a] && self.keep[b]) {
                    hat[a * n + b] = Complex64::default();
                }
            }
        }
    }

    /// `i k_x hat` (`axis = 0`) or `i k_y hat` (`axis = 1`).
    pub fn derivative(&self, hat: &[Complex64], axis: usize) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::default(); self.spectral_len()];
        for a in 0..self.modes_x {
            for b in 0..n {
                let kk = if axis == 0 { self.kx[a] } else { self.k[b] };
                out[a * n + b] = Complex64::new(0.0, kk) * hat[a * n + b];
            }
        }
        out
    }

    /// Velocity `(-d_y psi, d_x psi)` with `Laplace psi = omega`, zero mean mode.
    pub fn biot_savart_hat(&self, omega_hat: &[Complex64]) -> [Vec<Complex64>; 2] {
        let n = self.n;
        let mut u = vec![Complex64::default(); self.spectral_len()];
        let mut v = vec![Complex64::default(); self.spectral_len()];
        for a in 0..self.modes_x {
            for b in 0..n {
                let (kx, ky) = (self.kx[a], self.k[b]);
                let k2 = kx * kx + ky * ky;
                if k2 == 0.0 {
                    continue;
                }
                let psi = -omega_hat[a * n + b] / k2;
                u[a * n + b] = -Complex64::new(0.0, ky) * psi;
                v[a * n + b] = Complex64::new(0.0, kx) * psi;
            }
        }
        [u, v]
    }

    /// Gradient in physical space.
    pub fn gradient(&self, data: &[f64]) -> [Vec<f64>; 2] {
        let hat = self.forward(data);
        [self.inverse(&self.derivative(&hat, 0)), self.inverse(&self.derivative(&hat, 1))]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_a_trigonometric_field_is_exact() {
        let n = 32;
        let l = 3.0;
        let s = Spectral2D::new(n, l);
        let h = 2.0 * l / n as f64;
        let kx = std::f64::consts::PI / l * 2.0;
        let ky = std::f64::consts::PI / l * 3.0;
        let mut f = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (-l + i as f64 * h, -l + j as f64 * h);
                f[j * n + i] = (kx * x).sin() * (ky * y).cos();
            }
        }
        let [gx, gy] = s.gradient(&f);
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (-l + i as f64 * h, -l + j as f64 * h);
                assert!((gx[j * n + i] - kx * (kx * x).cos() * (ky * y).cos()).abs() < 1e-11);
                assert!((gy[j * n + i] + ky * (kx * x).sin() * (ky * y).sin()).abs() < 1e-11);
            }
        }
        let back = s.inverse(&s.forward(&f));
        assert!(back.iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-13));
    }
}
