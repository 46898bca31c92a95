use num_complex::Complex64;

/// Solves a tridiagonal system by Gaussian elimination with partial pivoting.
///
/// `sub[i]` is the entry in row `i + 1`, column `i`; `sup[i]` is the entry
/// in row `i`, column `i + 1`.
pub fn solve_tridiagonal(
    sub: &[Complex64],
    diag: &[Complex64],
    sup: &[Complex64],
    rhs: &[Complex64],
) -> Vec<Complex64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut dl = sub.to_vec();
    let mut du2 = vec![Complex64::default(); n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    if n == 1 {
        return vec![b[0] / d[0]];
    }
    for i in 0..n - 1 {
        if d[i].norm() >= dl[i].norm() {
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] = b[i + 1] - fact * b[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - fact * tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = tmp;
            let bi = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bi - fact * b[i];
        }
        dl[i] = Complex64::default();
    }
    let mut x = vec![Complex64::default(); n];
    x[n - 1] = b[n - 1] / d[n - 1];
    x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_system_that_needs_pivoting() {
        let n = 40;
        let c = |a: f64, b: f64| Complex64::new(a, b);
        let sub: Vec<_> = (0..n - 1).map(|i| c(3.0 + i as f64, 0.5)).collect();
        let diag: Vec<_> = (0..n).map(|i| c(if i % 3 == 0 { 1e-14 } else { 0.2 }, 0.1 * i as f64)).collect();
        let sup: Vec<_> = (0..n - 1).map(|i| c(-1.0, 0.3 * i as f64)).collect();
        let x_true: Vec<_> = (0..n).map(|i| c((i as f64).sin(), (i as f64).cos())).collect();
        let mut rhs = vec![Complex64::default(); n];
        for i in 0..n {
            rhs[i] = diag[i] * x_true[i];
            if i > 0 {
                rhs[i] += sub[i - 1] * x_true[i - 1];
            }
            if i + 1 < n {
                rhs[i] += sup[i] * x_true[i + 1];
            }
        }
        let x = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        // The matrix is badly conditioned, so check the backward error.
        let mut res: f64 = 0.0;
        for i in 0..n {
            let mut r = diag[i] * x[i] - rhs[i];
            if i > 0 {
                r += sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                r += sup[i] * x[i + 1];
            }
            res = res.max(r.norm());
        }
        assert!(res < 1e-12, "{res}");
        let well: Vec<_> = diag.iter().map(|d| d + c(50.0, 0.0)).collect();
        let mut rhs2 = rhs.clone();
        for i in 0..n {
            rhs2[i] += c(50.0, 0.0) * x_true[i];
        }
        let y = solve_tridiagonal(&sub, &well, &sup, &rhs2);
        let err = y.iter().zip(&x_true).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }
}
