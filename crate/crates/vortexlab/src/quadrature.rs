//! Gauss–Legendre rules and composite integration helpers.

use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// `order`-point rule on [-1, 1]; nodes from Newton iteration on P_n.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre {
            nodes: nodes.into_iter().map(T::of).collect(),
            weights: weights.into_iter().map(T::of).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) * T::of(0.5);
        let mid = (a + b) * T::of(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        self.mapped(a, b).fold(T::zero(), |acc, (x, w)| acc + w * f(x))
    }

    /// Sum of the rule over consecutive intervals of `breaks`.
    pub fn composite<F: FnMut(T) -> T>(&self, breaks: &[T], mut f: F) -> T {
        breaks
            .windows(2)
            .fold(T::zero(), |acc, ab| acc + self.integrate(ab[0], ab[1], &mut f))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, d)
}

/// `n` equispaced points from `a` to `b` inclusive.
pub fn linspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / T::from_usize(n - 1).unwrap();
            (0..n).map(|i| a + h * T::from_usize(i).unwrap()).collect()
        }
    }
}

/// Uniform breakpoints splitting [a, b] into `panels` pieces, with extra
/// breakpoints inserted (sorted, deduplicated) so that kinks can be honoured.
pub fn breakpoints<T: Real>(a: T, b: T, panels: usize, extra: &[T]) -> Vec<T> {
    let mut out = linspace(a, b, panels + 1);
    out.extend(extra.iter().copied().filter(|&x| x > a && x < b));
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup_by(|x, y| (*x - *y).abs() <= T::epsilon() * (T::one() + y.abs()));
    out
}

/// Trapezoid weights for a uniform grid of `n` points with spacing `h`.
pub fn trapezoid_weights<T: Real>(n: usize, h: T) -> Vec<T> {
    let mut w = vec![h; n];
    if n > 0 {
        w[0] = h * T::of(0.5);
        w[n - 1] = h * T::of(0.5);
    }
    w
}

/// Weights of composite Simpson on arbitrary increasing nodes: the quadratic
/// through each pair of intervals is integrated exactly. With an odd number
/// of intervals the last one uses the quadratic through its three final nodes.
pub fn simpson_weights<T: Real>(nodes: &[T]) -> Vec<T> {
    let n = nodes.len();
    let mut w = vec![T::zero(); n];
    if n < 3 {
        if n == 2 {
            let h = nodes[1] - nodes[0];
            w[0] = h * T::of(0.5);
            w[1] = h * T::of(0.5);
        }
        return w;
    }
    let six = T::of(6.0);
    let two = T::of(2.0);
    let three = T::of(3.0);
    let mut i = 0;
    while i + 2 < n {
        let h0 = nodes[i + 1] - nodes[i];
        let h1 = nodes[i + 2] - nodes[i + 1];
        let s = h0 + h1;
        w[i] = w[i] + s / six * (two - h1 / h0);
        w[i + 1] = w[i + 1] + s * s * s / (six * h0 * h1);
        w[i + 2] = w[i + 2] + s / six * (two - h0 / h1);
        i += 2;
    }
    if i + 1 < n {
        let h0 = nodes[i] - nodes[i - 1];
        let h1 = nodes[i + 1] - nodes[i];
        let s = h0 + h1;
        w[i - 1] = w[i - 1] - (h1 * h1 * h1 / (six * h0 * s));
        w[i] = w[i] + h1 * (h1 + three * h0) / (six * h0);
        w[i + 1] = w[i + 1] + h1 * (two * h1 + three * h0) / (six * s);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics_on_uneven_nodes() {
        for nodes in [
            vec![0.0, 0.3, 0.45, 1.0, 1.2],
            vec![0.0, 0.1, 0.5, 0.6, 1.3, 2.0],
        ] {
            let w = simpson_weights(&nodes);
            let quad: f64 = nodes.iter().zip(&w).map(|(x, w)| w * (1.0 - 2.0 * x + x * x)).sum();
            let b: f64 = *nodes.last().unwrap();
            let exact = b - b * b + b * b * b / 3.0;
            assert!((quad - exact).abs() < 1e-14, "{quad} vs {exact}");
        }
        let nodes: Vec<f64> = linspace(0.0, 1.0, 5);
        let uniform = simpson_weights(&nodes);
        let x4: f64 = nodes.iter().zip(&uniform).map(|(x, w)| w * x.powi(3)).sum();
        assert!((x4 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        let gl = GaussLegendre::<f64>::new(8);
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let w: f64 = gl.mapped(-1.0, 1.0).map(|(_, w)| w).sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let gl = GaussLegendre::<f32>::new(6);
        let v = gl.integrate(0.0, 1.0, |x| x.exp());
        assert!((v - (1f32.exp() - 1.0)).abs() < 1e-5);
    }

    #[test]
    fn composite_handles_kinks() {
        let gl = GaussLegendre::<f64>::new(5);
        let br = breakpoints(-1.0, 1.0, 4, &[0.3]);
        let v = gl.composite(&br, |x: f64| (x - 0.3).abs());
        let exact = 0.5 * (1.3f64.powi(2) + 0.7f64.powi(2));
        assert!((v - exact).abs() < 1e-13);
    }
}
