//! The log radius eigenproblem `(R - mu)(-psi'' + m^2 psi) + A psi = 0`
//! as a linear pencil `D psi = mu B psi`.

use super::greens::greens_apply_complex;
use super::grid::SpectralGrid;
use super::moments::{tail_fit, TailFit};
use super::tridiag::solve_tridiagonal;
use crate::error::{Error, Result};
use crate::profiles::RadialVortexProfile;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Second order finite difference pencil on the interior nodes of a grid.
#[derive(Clone, Debug)]
pub struct Pencil {
    pub m: usize,
    pub grid: SpectralGrid,
    /// `R` at the interior nodes.
    pub r: Vec<f64>,
    /// `A` at the interior nodes.
    pub a: Vec<f64>,
}

pub fn assemble_ode_eigenproblem(
    profile: &RadialVortexProfile,
    m: usize,
    grid: &SpectralGrid,
) -> Result<Pencil> {
    if m < 2 {
        return Err(Error::InvalidParams(format!("azimuthal index m = {m} must be at least 2")));
    }
    grid.check_window(profile)?;
    let t = grid.nodes();
    let inner = &t[1..t.len() - 1];
    Ok(Pencil {
        m,
        grid: *grid,
        r: inner.iter().map(|&x| profile.r_t(x)).collect(),
        a: inner.iter().map(|&x| profile.a_t(x)).collect(),
    })
}

fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

impl Pencil {
    /// Pencil with the same grid and an arbitrary potential, for tests.
    pub fn from_samples(m: usize, grid: SpectralGrid, r: Vec<f64>, a: Vec<f64>) -> Self {
        Pencil { m, grid, r, a }
    }

    pub fn interior_len(&self) -> usize {
        self.r.len()
    }

    fn stencil(&self) -> (f64, f64) {
        let h = self.grid.h();
        let m2 = (self.m * self.m) as f64;
        (2.0 / (h * h) + m2, -1.0 / (h * h))
    }

    pub fn apply_b(&self, x: &[Complex64]) -> Vec<Complex64> {
        let (d, o) = self.stencil();
        let n = x.len();
        (0..n)
            .map(|j| {
                let mut v = x[j] * d;
                if j > 0 {
                    v += x[j - 1] * o;
                }
                if j + 1 < n {
                    v += x[j + 1] * o;
                }
                v
            })
            .collect()
    }

    pub fn apply_d(&self, x: &[Complex64]) -> Vec<Complex64> {
        let bx = self.apply_b(x);
        bx.iter()
            .zip(x)
            .enumerate()
            .map(|(j, (&b, &v))| b * self.r[j] + v * self.a[j])
            .collect()
    }

    /// Frobenius norm of `D`.
    pub fn d_norm(&self) -> f64 {
        let (d, o) = self.stencil();
        let n = self.r.len();
        (0..n)
            .map(|j| {
                let off = if j == 0 || j + 1 == n { 1.0 } else { 2.0 };
                (self.r[j] * d + self.a[j]).powi(2) + off * (self.r[j] * o).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `||(D - mu B) psi|| / (||D|| ||psi||)`.
    pub fn residual(&self, mu: Complex64, psi: &[Complex64]) -> f64 {
        let d = self.apply_d(psi);
        let b = self.apply_b(psi);
        let r: Vec<Complex64> = d.iter().zip(&b).map(|(x, y)| x - mu * y).collect();
        norm2(&r) / (self.d_norm() * norm2(psi))
    }

    /// Solves `(D - sigma B) x = rhs`.
    pub fn solve_shifted(&self, sigma: Complex64, rhs: &[Complex64]) -> Vec<Complex64> {
        let (d, o) = self.stencil();
        let n = self.r.len();
        let diag: Vec<Complex64> = (0..n).map(|j| (self.r[j] - sigma) * d + self.a[j]).collect();
        let sub: Vec<Complex64> = (1..n).map(|j| (self.r[j] - sigma) * o).collect();
        let sup: Vec<Complex64> = (0..n - 1).map(|j| (self.r[j] - sigma) * o).collect();
        solve_tridiagonal(&sub, &diag, &sup, rhs)
    }

    /// All eigenvalues of the pencil from the dense matrix `diag(R) + diag(A) B^{-1}`,
    /// which is similar to `B^{-1} D`.
    pub fn dense_eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.r.len();
        let (d, o) = self.stencil();
        let binv = tridiagonal_inverse_sym(n, d, o);
        let mat = Mat::<f64>::from_fn(n, n, |i, j| {
            self.a[i] * binv[i * n + j] + if i == j { self.r[i] } else { 0.0 }
        });
        mat.eigenvalues()
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))
            .map(|v| v.into_iter().map(|z| Complex64::new(z.re, z.im)).collect())
    }

    /// Shifted inverse iteration with Rayleigh quotient updates started at `mu0`.
    pub fn refine(&self, mu0: Complex64, max_iter: usize) -> (Complex64, Vec<Complex64>) {
        let n = self.r.len();
        let mut x: Vec<Complex64> = (0..n)
            .map(|j| {
                let u = j as f64 / n as f64;
                Complex64::new(1.0 + 0.1 * u, 0.3 * (7.0 * u).sin())
            })
            .collect();
        let mut sigma = mu0;
        let mut best = (f64::INFINITY, sigma, x.clone());
        for it in 0..max_iter {
            let bx = self.apply_b(&x);
            let mut y = self.solve_shifted(sigma, &bx);
            let ny = norm2(&y);
            if !ny.is_finite() || ny == 0.0 {
                break;
            }
            y.iter_mut().for_each(|v| *v /= ny);
            x = y;
            let rq = dot(&x, &self.apply_d(&x)) / dot(&x, &self.apply_b(&x));
            let res = self.residual(rq, &x);
            if res < best.0 {
                best = (res, rq, x.clone());
            }
            // Hold the shift for a few steps so the iterate settles on the
            // eigenvector nearest to the starting value.
            if it >= 2 {
                sigma = rq;
            }
            if res < 1e-14 {
                break;
            }
        }
        (best.1, best.2)
    }
}

/// Dense inverse of the symmetric Toeplitz tridiagonal matrix with diagonal
/// `d` and off diagonal `o`, row major, from the closed form
/// `G_ij = sinh(i th) sinh((n+1-j) th) / (-o sinh(th) sinh((n+1) th))` for `i <= j`.
fn tridiagonal_inverse_sym(n: usize, d: f64, o: f64) -> Vec<f64> {
    let q = d / (-2.0 * o);
    let mh = q.acosh();
    let mut out = vec![0.0; n * n];
    let big = (n + 1) as f64;
    for i in 0..n {
        for j in i..n {
            let (a, b) = ((i + 1) as f64, (j + 1) as f64);
            // G_ij = sinh(a mh) sinh((n+1-b) mh) / (-o sinh(mh) sinh((n+1) mh))
            let v = ((a - b) * mh).exp()
                * (1.0 - (-2.0 * a * mh).exp())
                * (1.0 - (-2.0 * (big - b) * mh).exp())
                / ((1.0 - (-2.0 * big * mh).exp()) * (-o) * 2.0 * mh.sinh());
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    out
}

/// How an eigenmode is scaled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Normalization {
    /// `g(s) ~ s^{-|m|-alpha-2}`; `raw_coefficient` is the tail coefficient
    /// before rescaling.
    Tail { raw_coefficient: Complex64 },
    UnitL2,
}

/// One unstable azimuthal eigenpair with its samples on the full grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenMode {
    pub m: usize,
    pub l: i64,
    pub mu: Complex64,
    /// `lambda = -i m mu`, the growth exponent of `e^{i m theta}` modes.
    pub lambda: Complex64,
    pub grid: SpectralGrid,
    pub psi: Vec<Complex64>,
    pub g: Vec<Complex64>,
    pub normalization: Normalization,
    pub residual_pencil: f64,
    pub residual_integral: f64,
    /// Relative eigenvalue change under grid doubling.
    pub refinement_drift: f64,
}

impl EigenMode {
    pub fn t_nodes(&self) -> Vec<f64> {
        self.grid.nodes()
    }

    pub fn tail_fit(&self, alpha: f64) -> Result<TailFit> {
        tail_fit(&self.grid, &self.g, self.m as i64, alpha)
    }
}

/// Thresholds used to separate discrete modes from discretized continuum.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpectrumFilter {
    pub imag_floor: f64,
    pub boundary_decay: f64,
    pub refinement_tol: f64,
}

impl Default for SpectrumFilter {
    fn default() -> Self {
        SpectrumFilter {
            imag_floor: 1e-6,
            boundary_decay: 1e-6,
            refinement_tol: 1e-3,
        }
    }
}

fn with_ends(interior: &[Complex64]) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(interior.len() + 2);
    v.push(Complex64::default());
    v.extend_from_slice(interior);
    v.push(Complex64::default());
    v
}

/// Vorticity `g = e^{-2t} A psi / (R - mu)` on the full grid.
pub fn reconstruct_vorticity(
    profile: &RadialVortexProfile,
    grid: &SpectralGrid,
    psi: &[Complex64],
    mu: Complex64,
) -> Vec<Complex64> {
    grid.nodes()
        .iter()
        .zip(psi)
        .map(|(&t, &p)| p * ((-2.0 * t).exp() * profile.a_t(t)) / (profile.r_t(t) - mu))
        .collect()
}

/// `||psi + K_m * [A/(R - mu) psi]|| / ||psi||` on the interior nodes.
pub fn eigen_residual_integral(
    profile: &RadialVortexProfile,
    grid: &SpectralGrid,
    m: usize,
    mu: Complex64,
    psi: &[Complex64],
) -> Result<f64> {
    let t = grid.nodes();
    if psi.len() != t.len() {
        return Err(Error::InvalidParams("psi must be sampled on the full grid".into()));
    }
    let npsi = norm2(psi);
    if npsi == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let mut f = vec![Complex64::default(); t.len()];
    let mut dmin = f64::INFINITY;
    for j in 0..t.len() {
        let den = profile.r_t(t[j]) - mu;
        dmin = dmin.min(den.norm());
        f[j] = psi[j] * profile.a_t(t[j]) / den;
    }
    if dmin < 1e-12 {
        return Err(Error::SingularDenominator(dmin));
    }
    // Dirichlet ends: only interior samples carry the equation.
    let n = t.len();
    let kf = greens_apply_complex(m as f64, grid.h(), &f[1..n - 1])?;
    let r: Vec<Complex64> = psi[1..n - 1].iter().zip(&kf).map(|(p, k)| p + k).collect();
    Ok(norm2(&r) / npsi)
}

/// Relative eigenvalue change when refining from `mu` on another grid.
pub fn eigenvalue_drift(
    profile: &RadialVortexProfile,
    m: usize,
    grid: &SpectralGrid,
    mu: Complex64,
) -> Result<(f64, Complex64)> {
    let p = assemble_ode_eigenproblem(profile, m, grid)?;
    let (mu2, _) = p.refine(mu, 60);
    Ok(((mu2 - mu).norm() / mu.norm(), mu2))
}

/// Finishes one refined eigenpair: full grid samples, tail normalization and
/// both residuals.
pub fn build_mode(
    profile: &RadialVortexProfile,
    pencil: &Pencil,
    mu: Complex64,
    psi_interior: &[Complex64],
    drift: f64,
) -> Result<EigenMode> {
    let grid = pencil.grid;
    let m = pencil.m;
    let residual_pencil = pencil.residual(mu, psi_interior);
    let mut psi = with_ends(psi_interior);
    let mut g = reconstruct_vorticity(profile, &grid, &psi, mu);
    let normalization = match tail_fit(&grid, &g, m as i64, profile.alpha()) {
        Ok(fit) if fit.coefficient.norm() > 0.0 && fit.relative_residual < 0.05 => {
            let c = fit.coefficient;
            psi.iter_mut().for_each(|v| *v /= c);
            g.iter_mut().for_each(|v| *v /= c);
            Normalization::Tail { raw_coefficient: c }
        }
        _ => {
            let n = norm2(&g) * grid.h().sqrt();
            psi.iter_mut().for_each(|v| *v /= n);
            g.iter_mut().for_each(|v| *v /= n);
            Normalization::UnitL2
        }
    };
    let residual_integral = eigen_residual_integral(profile, &grid, m, mu, &psi)?;
    Ok(EigenMode {
        m,
        l: 1,
        mu,
        lambda: Complex64::new(0.0, -(m as f64)) * mu,
        grid,
        psi,
        g,
        normalization,
        residual_pencil,
        residual_integral,
        refinement_drift: drift,
    })
}

/// Unstable eigenvalues of `m` that survive the imaginary floor, the
/// boundary decay test and grid doubling.
pub fn unstable_spectrum(
    profile: &RadialVortexProfile,
    m: usize,
    grid: &SpectralGrid,
) -> Result<Vec<EigenMode>> {
    unstable_spectrum_with(profile, m, grid, &SpectrumFilter::default())
}

pub fn unstable_spectrum_with(
    profile: &RadialVortexProfile,
    m: usize,
    grid: &SpectralGrid,
    filter: &SpectrumFilter,
) -> Result<Vec<EigenMode>> {
    let pencil = assemble_ode_eigenproblem(profile, m, grid)?;
    let fine = assemble_ode_eigenproblem(profile, m, &grid.refined())?;
    let mut candidates: Vec<Complex64> = pencil
        .dense_eigenvalues()?
        .into_iter()
        .filter(|z| z.im > filter.imag_floor)
        .collect();
    candidates.sort_by(|a, b| b.im.total_cmp(&a.im));
    let mut modes: Vec<EigenMode> = Vec::new();
    let mut decayed = 0usize;
    for z in candidates {
        let (mu, psi) = pencil.refine(z, 40);
        if mu.im <= filter.imag_floor || (mu - z).norm() > 1e-6 * z.norm().max(1.0) {
            continue;
        }
        let peak = psi.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let edge = psi[0].norm().max(psi[psi.len() - 1].norm());
        if !(edge < filter.boundary_decay * peak) {
            continue;
        }
        decayed += 1;
        let (mu_fine, _) = fine.refine(mu, 60);
        let drift = (mu_fine - mu).norm() / mu.norm();
        if !(drift < filter.refinement_tol) {
            continue;
        }
        if modes.iter().any(|md| (md.mu - mu).norm() < 1e-8 * mu.norm()) {
            continue;
        }
        modes.push(build_mode(profile, &pencil, mu, &psi, drift)?);
    }
    if decayed > 0 && modes.is_empty() {
        return Err(Error::NoConvergence(format!(
            "{decayed} candidate(s) for m = {m} failed the refinement test"
        )));
    }
    Ok(modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_inverse_matches_tridiagonal_solve() {
        let n = 50;
        let (d, o) = (2.0 / 0.01 + 4.0, -1.0 / 0.01);
        let inv = tridiagonal_inverse_sym(n, d, o);
        for j in [0usize, 7, 49] {
            let mut e = vec![Complex64::default(); n];
            e[j] = Complex64::new(1.0, 0.0);
            let sub = vec![Complex64::new(o, 0.0); n - 1];
            let x = solve_tridiagonal(&sub, &vec![Complex64::new(d, 0.0); n], &sub, &e);
            for i in 0..n {
                assert!((x[i].re - inv[i * n + j]).abs() < 1e-12 * inv[j * n + j].abs());
            }
        }
    }

    #[test]
    fn zero_potential_has_no_unstable_eigenvalue() {
        let grid = SpectralGrid::new(-6.0, 6.0, 301).unwrap();
        let t = grid.nodes();
        let r: Vec<f64> = t[1..300].iter().map(|&x| 1.0 / (1.0 + x.exp())).collect();
        let p = Pencil::from_samples(2, grid, r, vec![0.0; 299]);
        let ev = p.dense_eigenvalues().unwrap();
        assert!(ev.iter().all(|z| z.im.abs() < 1e-8), "{:?}", ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max));
    }

    #[test]
    fn shifted_form_is_the_product_form() {
        let grid = SpectralGrid::new(-3.0, 3.0, 41).unwrap();
        let t = grid.nodes();
        let r: Vec<f64> = t[1..40].iter().map(|&x| x.cos()).collect();
        let a: Vec<f64> = t[1..40].iter().map(|&x| x.sin()).collect();
        let p = Pencil::from_samples(3, grid, r.clone(), a.clone());
        let psi: Vec<Complex64> = (0..39).map(|j| Complex64::new((j as f64).sin(), 0.5)).collect();
        let mu = Complex64::new(0.3, 0.7);
        let lhs: Vec<Complex64> = p
            .apply_d(&psi)
            .iter()
            .zip(p.apply_b(&psi))
            .map(|(d, b)| d - mu * b)
            .collect();
        let bpsi = p.apply_b(&psi);
        for j in 0..39 {
            let rhs = (r[j] - mu) * bpsi[j] + a[j] * psi[j];
            assert!((lhs[j] - rhs).norm() < 1e-9 * rhs.norm().max(1.0));
        }
    }
}
