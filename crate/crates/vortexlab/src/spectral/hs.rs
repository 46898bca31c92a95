//! Hilbert-Schmidt norm of the mode-`ml` feedback operator.

use super::grid::SpectralGrid;
use crate::error::{Error, Result};
use crate::profiles::RadialVortexProfile;

/// `(int int |Q_l(s, tau)|^2 s ds tau d tau)^{1/2}` for the kernel
/// `Q_l(s, tau) = (i/2) sign(l) s G'(s) s^{-2} (s^{-k} tau^k [tau < s] + s^k tau^{-k} [tau > s])`
/// with `k = |m l|`. In log radius the integrand is
/// `A(t)^2 / 4 * (e^{(2k+2)(u-t)} [u < t] + e^{(2-2k)(u-t)} [u > t])`;
/// the inner integrals use the trapezoid rule on the grid with exact
/// exponential tails, the outer one adds the closed-form core and tail of `A`.
pub fn hs_norm_a_l(profile: &RadialVortexProfile, m: usize, l: i64, grid: &SpectralGrid) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidParams("harmonic index l must be nonzero".into()));
    }
    let k = (m as f64 * l as f64).abs();
    if k <= 1.0 {
        return Err(Error::InvalidParams(format!("mode number |ml| = {k} must exceed 1")));
    }
    let t = grid.nodes();
    let n = t.len();
    let h = grid.h();
    let (p, q) = (2.0 * k + 2.0, 2.0 * k - 2.0);
    // lower[i] = int_{-inf}^{t_i} e^{p (u - t_i)} du, upper[i] = int_{t_i}^inf e^{-q (u - t_i)} du.
    let (rp, rq) = ((-p * h).exp(), (-q * h).exp());
    let mut lower = vec![0.0; n];
    lower[0] = 1.0 / p;
    for i in 1..n {
        lower[i] = lower[i - 1] * rp + 0.5 * h * (rp + 1.0);
    }
    let mut upper = vec![0.0; n];
    upper[n - 1] = 1.0 / q;
    for i in (0..n - 1).rev() {
        upper[i] = upper[i + 1] * rq + 0.5 * h * (rq + 1.0);
    }
    let mut total = 0.0;
    for i in 0..n {
        let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
        total += w * profile.a_t(t[i]).powi(2) * (lower[i] + upper[i]);
    }
    // A^2 beyond the window, with the inner integrals at their exact values.
    let c0 = profile.c0();
    let alpha = profile.alpha();
    let inner = 1.0 / p + 1.0 / q;
    let lo = t[0].min(profile.m_inner().ln());
    let hi = t[n - 1].max(profile.m_outer().ln());
    total += inner * (16.0 * c0 * c0 * (4.0 * lo).exp() + 0.5 * alpha * (-2.0 * alpha * hi).exp());
    Ok((0.25 * total).sqrt())
}
