//! Dense radial operators of one azimuthal mode `g(s) e^{i k theta}`,
//! `k = m l`, on a log spaced radial grid.

use super::grid::SpectralGrid;
use crate::error::{Error, Result};
use crate::profiles::RadialVortexProfile;
use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Matrix of `L g = -i k Omega g + i k E psi[g] + gamma (alpha g + s g')
/// + kappa (s g' + g)`, where `psi[g]` is the Nystrom discretization of the
/// two-integral stream formula and `s g' = dg/dt` uses centered differences
/// closed by a one-sided difference at the inner end.
///
/// When `gamma + kappa > 0` the outermost node is held at zero and the
/// matrix has one row fewer than the grid.
pub fn assemble_mode_operator(
    profile: &RadialVortexProfile,
    m: usize,
    l: i64,
    gamma: f64,
    kappa: f64,
    grid: &SpectralGrid,
) -> Result<Mat<Complex64>> {
    if m < 2 {
        return Err(Error::InvalidParams(format!("azimuthal index m = {m} must be at least 2")));
    }
    if gamma < 0.0 || kappa < 0.0 {
        return Err(Error::InvalidParams("gamma and kappa must be nonnegative".into()));
    }
    let t = grid.nodes();
    let n = t.len();
    let h = grid.h();
    let k = m as f64 * l as f64;
    let ka = k.abs();
    let r: Vec<f64> = t.iter().map(|&x| profile.r_t(x)).collect();
    let e: Vec<f64> = t.iter().map(|&x| profile.a_t(x) * (-2.0 * x).exp()).collect();
    // With a transport term the outer end is an inflow boundary, where the
    // mode must vanish; that node is removed from the unknowns.
    let c = gamma + kappa;
    let size = if c > 0.0 { n - 1 } else { n };
    let mut mat = Mat::<Complex64>::zeros(size, size);
    for i in 0..size {
        mat[(i, i)] = Complex64::new(gamma * profile.alpha() + kappa, -k * r[i]);
    }
    if l != 0 {
        let c = -1.0 / (2.0 * ka);
        for i in 0..size {
            let pref = Complex64::new(0.0, k * e[i] * c);
            for j in 0..size {
                let w = if j == 0 || j == n - 1 { 0.5 * h } else { h };
                let kern = (2.0 * t[j] - ka * (t[i] - t[j]).abs()).exp();
                mat[(i, j)] += pref * (w * kern);
            }
        }
    }
    if c > 0.0 {
        // Second order differences biased toward the inflow side.
        for i in 0..size {
            if i + 2 < n {
                mat[(i, i)] -= 1.5 * c / h;
                mat[(i, i + 1)] += 2.0 * c / h;
                if i + 2 < size {
                    mat[(i, i + 2)] -= 0.5 * c / h;
                }
            }
        }
        if size >= 1 {
            let i = size - 1;
            mat[(i, i)] -= c / h;
        }
    }
    Ok(mat)
}

pub fn eigenvalues(mat: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    mat.eigenvalues().map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

fn norm(v: &Mat<Complex64>) -> f64 {
    (0..v.nrows()).map(|i| v[(i, 0)].norm_sqr()).sum::<f64>().sqrt()
}

/// Shift-invert iteration with Rayleigh quotient updates.
///
/// Returns the eigenvalue and a unit eigenvector.
pub fn inverse_iteration(
    mat: &Mat<Complex64>,
    shift: Complex64,
    start: Option<&[Complex64]>,
) -> Result<(Complex64, Vec<Complex64>)> {
    let n = mat.nrows();
    let mut v = Mat::<Complex64>::from_fn(n, 1, |i, _| match start {
        Some(s) => s[i],
        None => Complex64::new(1.0, 0.01 * i as f64 / n as f64),
    });
    let nv = norm(&v);
    v.col_mut(0).iter_mut().for_each(|x| *x /= nv);
    let mut sigma = shift;
    let mut lam = shift;
    for it in 0..40 {
        let shifted = Mat::<Complex64>::from_fn(n, n, |i, j| {
            mat[(i, j)] - if i == j { sigma } else { Complex64::default() }
        });
        let lu = shifted.partial_piv_lu();
        let mut w = v.clone();
        lu.solve_in_place(&mut w);
        let nw = norm(&w);
        if !nw.is_finite() || nw == 0.0 {
            return Err(Error::NoConvergence("inverse iteration broke down".into()));
        }
        w.col_mut(0).iter_mut().for_each(|x| *x /= nw);
        let mw = mat * &w;
        let num: Complex64 = (0..n).map(|i| w[(i, 0)].conj() * mw[(i, 0)]).sum();
        let res = (0..n).map(|i| (mw[(i, 0)] - num * w[(i, 0)]).norm_sqr()).sum::<f64>().sqrt();
        v = w;
        let change = (num - lam).norm();
        lam = num;
        if it >= 1 {
            sigma = lam;
        }
        if res < 1e-11 * lam.norm().max(1.0) || change < 1e-13 * lam.norm().max(1.0) {
            break;
        }
    }
    Ok((lam, (0..n).map(|i| v[(i, 0)]).collect()))
}

/// One point on a continuation branch.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BranchPoint {
    pub parameter: f64,
    pub lambda: Complex64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KappaTrajectory {
    pub lambda0: Complex64,
    pub points: Vec<BranchPoint>,
}

/// Tracks the unstable eigenvalue of the `kappa` operator along `kappas`.
///
/// The branch starts from the eigenvalue of the unperturbed operator nearest
/// to `lambda_seed` and walks through the values in increasing order; each
/// step keeps only eigenvalues with `Re > Re(lambda0) / 100` and matches by
/// nearest neighbour. Eigenvalues are reported with positive imaginary part,
/// which is the conjugate pair member belonging to `e^{-i m theta}`.
pub fn kappa_continuation(
    profile: &RadialVortexProfile,
    m: usize,
    l: i64,
    kappas: &[f64],
    grid: &SpectralGrid,
    lambda_seed: Complex64,
) -> Result<KappaTrajectory> {
    let base = assemble_mode_operator(profile, m, l, 0.0, 0.0, grid)?;
    let ev0 = eigenvalues(&base)?;
    let lambda0 = nearest(&ev0, lambda_seed).0;
    let d = lambda0.re / 100.0;
    let mut order: Vec<f64> = kappas.to_vec();
    order.sort_by(|a, b| a.total_cmp(b));
    let mut prev = lambda0;
    let mut out = Vec::new();
    for &kap in &order {
        let mat = assemble_mode_operator(profile, m, l, 0.0, kap, grid)?;
        let ev: Vec<Complex64> = eigenvalues(&mat)?.into_iter().filter(|z| z.re > d).collect();
        if ev.is_empty() {
            return Err(Error::TrackingLost {
                parameter: kap,
                distance: f64::INFINITY,
                spacing: 0.0,
            });
        }
        let (lam, dist) = nearest(&ev, prev);
        let spacing = spacing_around(&ev, lam).max(spacing_around(&ev0, lambda0));
        if dist > spacing {
            return Err(Error::TrackingLost {
                parameter: kap,
                distance: dist,
                spacing,
            });
        }
        out.push(BranchPoint {
            parameter: kap,
            lambda: lam,
        });
        prev = lam;
    }
    let flip = |z: Complex64| if z.im < 0.0 { z.conj() } else { z };
    let mut points: Vec<BranchPoint> = kappas
        .iter()
        .map(|&k| {
            let p = out.iter().find(|p| p.parameter == k).unwrap();
            BranchPoint {
                parameter: k,
                lambda: flip(p.lambda),
            }
        })
        .collect();
    points.dedup_by(|a, b| a.parameter == b.parameter);
    Ok(KappaTrajectory {
        lambda0: flip(lambda0),
        points,
    })
}

fn nearest(ev: &[Complex64], target: Complex64) -> (Complex64, f64) {
    ev.iter()
        .map(|&z| (z, (z - target).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((target, f64::INFINITY))
}

fn spacing_around(ev: &[Complex64], z: Complex64) -> f64 {
    ev.iter()
        .map(|&w| (w - z).norm())
        .filter(|&d| d > 1e-12 * z.norm().max(1.0))
        .fold(f64::INFINITY, f64::min)
}

/// Eigenpair of the `gamma` operator used by the self-similar dynamics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaMode {
    pub gamma: f64,
    pub lambda: Complex64,
    pub grid: SpectralGrid,
    /// Radial vorticity on the grid, scaled to `g(s) ~ s^{-m-alpha-2}` when
    /// the tail fit succeeds and to unit maximum otherwise.
    pub g: Vec<Complex64>,
    pub branch: Vec<BranchPoint>,
}

/// Solves `gamma = theta Re(lambda(gamma)) / alpha` on the tracked branch,
/// where `lambda(gamma)` is the unstable eigenvalue of the `gamma` operator.
///
/// The branch is followed from `gamma = 0` in small steps by shift-invert
/// iteration with an extrapolated shift, then bracketed and refined. The
/// discretization carries a cluster of spurious eigenvalues with real part
/// close to `gamma`, so dense nearest neighbour matching is not used here.
pub fn self_consistent_gamma(
    profile: &RadialVortexProfile,
    m: usize,
    grid: &SpectralGrid,
    lambda_seed: Complex64,
    theta: f64,
) -> Result<GammaMode> {
    let alpha = profile.alpha();
    let step = 0.02;
    let base = assemble_mode_operator(profile, m, 1, 0.0, 0.0, grid)?;
    let (lam0, v0) = inverse_iteration(&base, lambda_seed, None)?;
    let f = |g: f64, lam: Complex64| g - theta * lam.re / alpha;
    let mut branch = vec![BranchPoint {
        parameter: 0.0,
        lambda: lam0,
    }];
    let (mut g, mut lam, mut v, mut prev) = (0.0, lam0, v0, None::<Complex64>);
    // March until the sign of f changes.
    loop {
        let g2 = g + step;
        let mat = assemble_mode_operator(profile, m, 1, g2, 0.0, grid)?;
        let pred = prev.map(|p| lam * 2.0 - p).unwrap_or(lam);
        let (l2, v2) = inverse_iteration(&mat, pred, Some(&v))?;
        if (l2 - pred).norm() > 0.1 * lam.norm() {
            return Err(Error::TrackingLost {
                parameter: g2,
                distance: (l2 - pred).norm(),
                spacing: 0.1 * lam.norm(),
            });
        }
        branch.push(BranchPoint {
            parameter: g2,
            lambda: l2,
        });
        if f(g2, l2) >= 0.0 {
            // Secant refinement inside [g, g2].
            let (mut ga, mut la, mut va) = (g, lam, v.clone());
            let (mut gb, mut lb) = (g2, l2);
            let mut vb = v2;
            for _ in 0..30 {
                let (fa, fb) = (f(ga, la), f(gb, lb));
                let gm = if fb != fa { ga - fa * (gb - ga) / (fb - fa) } else { 0.5 * (ga + gb) };
                let gm = gm.clamp(ga + 0.05 * (gb - ga), gb - 0.05 * (gb - ga));
                let mat = assemble_mode_operator(profile, m, 1, gm, 0.0, grid)?;
                let w = (gm - ga) / (gb - ga);
                let (lm, vm) = inverse_iteration(&mat, la * (1.0 - w) + lb * w, Some(&va))?;
                if f(gm, lm) >= 0.0 {
                    gb = gm;
                    lb = lm;
                    vb = vm;
                } else {
                    ga = gm;
                    la = lm;
                    va = vm;
                }
                if gb - ga < 1e-10 {
                    break;
                }
            }
            let gamma = 0.5 * (ga + gb);
            let lambda = (la + lb) * 0.5;
            vb.resize(grid.n, Complex64::default());
            if let Ok(fit) = super::moments::tail_fit(grid, &vb, m as i64, alpha) {
                if fit.relative_residual < 0.05 && fit.coefficient.norm() > 0.0 {
                    let c = fit.coefficient;
                    vb.iter_mut().for_each(|v| *v /= c);
                }
            }
            return Ok(GammaMode {
                gamma,
                lambda,
                grid: *grid,
                g: vb,
                branch,
            });
        }
        if l2.re <= 0.0 {
            return Err(Error::NoConvergence("branch became stable before the fixed point".into()));
        }
        prev = Some(lam);
        g = g2;
        lam = l2;
        v = v2;
    }
}
