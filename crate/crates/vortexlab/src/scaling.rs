//! Self-similar scaling machinery: time maps, cutoffs, forcing, the ansatz for
//! the vorticity and the explicit radial solution.

use crate::dynamics::field::{Field2D, FieldKind};
use crate::error::{Error, Result};
use crate::profiles::RadialVortexProfile;
use crate::quadrature::{GaussLegendre, linspace};
use crate::scalar::Real;
use crate::spectral::{GammaMode, SpectralGrid};
use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

/// Parameters of the scaling family.
///
/// `lambda = a + i b` is stored with `b > 0`; `rho + i zeta = lambda / gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFamily<T> {
    pub alpha: T,
    pub gamma: T,
    pub epsilon: T,
    pub rho: T,
    pub zeta: T,
    pub a_growth: T,
    pub b_freq: T,
    pub c4: T,
    pub c0_small: T,
    /// Size constant `C1` of the initial perturbation, used for `t_star`.
    pub c1: T,
    pub t_star: T,
}

impl<T: Real> ScalingFamily<T> {
    pub fn new(alpha: T, gamma: T, epsilon: T, lambda: Complex<T>, c4: T, c0_small: T, c1: T) -> Result<Self> {
        let zero = T::zero();
        let one = T::one();
        if !(alpha > zero && alpha < one) {
            return Err(Error::InvalidParams(format!("alpha = {alpha:?} must lie in (0, 1)")));
        }
        if !(epsilon > zero && epsilon <= one) {
            return Err(Error::InvalidParams(format!("epsilon = {epsilon:?} must lie in (0, 1]")));
        }
        if !(c0_small > zero && c0_small < one) || !(c4 > zero) || !(c1 > zero) {
            return Err(Error::InvalidParams("c4, C0 and C1 must be positive, C0 < 1".into()));
        }
        let a = lambda.re;
        let b = lambda.im.abs();
        if !(a > zero) {
            return Err(Error::InvalidParams(format!("growth rate {a:?} must be positive")));
        }
        if !(gamma > zero && gamma < a / alpha) {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma:?} must lie in (0, a/alpha) = (0, {:?})",
                a / alpha
            )));
        }
        let rho = a / gamma;
        let zeta = b / gamma;
        let t_star = ((c0_small / c1).ln() - rho * epsilon.ln()) / a;
        Ok(ScalingFamily {
            alpha,
            gamma,
            epsilon,
            rho,
            zeta,
            a_growth: a,
            b_freq: b,
            c4,
            c0_small,
            c1,
            t_star,
        })
    }

    /// The family with another `epsilon`.
    pub fn with_epsilon(&self, epsilon: T) -> Result<Self> {
        let lambda = Complex::new(self.a_growth, self.b_freq);
        Self::new(self.alpha, self.gamma, epsilon, lambda, self.c4, self.c0_small, self.c1)
    }

    pub fn lambda(&self) -> Complex<T> {
        Complex::new(self.a_growth, self.b_freq)
    }

    /// `(R(t), tau(t))` with `R = (1 + alpha gamma t)^{1/alpha}`.
    pub fn time_maps(&self, t: T) -> (T, T) {
        let ag = self.alpha * self.gamma;
        let base = T::one() + ag * t;
        (base.powf(T::one() / self.alpha), base.ln() / ag)
    }

    pub fn t_of_tau(&self, tau: T) -> T {
        let ag = self.alpha * self.gamma;
        (ag * tau).exp_m1() / ag
    }

    pub fn r_of_tau(&self, tau: T) -> T {
        (self.gamma * tau).exp()
    }

    /// Self-similar time reached at time `t` of the `epsilon` rescaled problem.
    pub fn tau_rescaled(&self, t: T) -> T {
        self.time_maps(t * self.epsilon.powf(-self.alpha)).1
    }

    /// `epsilon^alpha + alpha gamma t`, the amplitude base of the rescaled problem.
    pub fn rescaled_base(&self, t: T) -> T {
        self.epsilon.powf(self.alpha) + self.alpha * self.gamma * t
    }

    /// `epsilon^{rho + i zeta}` computed as `exp((rho + i zeta) ln epsilon)`.
    pub fn amplitude(&self) -> Complex<T> {
        let l = self.epsilon.ln();
        Complex::new(self.rho * l, self.zeta * l).exp()
    }
}

/// `1 - S(u - 1)` with the exponential partition step `S`.
pub fn chi_tilde<T: Real>(u: T) -> (T, T) {
    let one = T::one();
    let x = u - one;
    if x <= T::zero() {
        return (one, T::zero());
    }
    if x >= one {
        return (T::zero(), T::zero());
    }
    let f = |s: T| (-one / s).exp();
    let (a, b) = (f(x), f(one - x));
    let d = a + b;
    let da = a / (x * x);
    let db = b / ((one - x) * (one - x));
    let s = a / d;
    let ds = (da * b + a * db) / (d * d);
    (one - s, -ds)
}

/// `chi(r) = chi_tilde(r / c4)` and its derivative in `r`.
pub fn cutoff_chi<T: Real>(c4: T, r: T) -> (T, T) {
    let (v, d) = chi_tilde(r / c4);
    (v, d / c4)
}

/// `W(s) = -alpha G(s) - s G'(s)`.
pub fn w_profile(profile: &RadialVortexProfile, s: f64) -> f64 {
    let alpha = profile.alpha();
    if s <= 0.0 {
        return -alpha * profile.g_core_level;
    }
    if s >= profile.m_outer() {
        return 0.0;
    }
    -alpha * profile.vorticity(s) - s * profile.vorticity_prime(s)
}

/// `B(s) = -alpha Omega(s) - s Omega'(s)`.
pub fn b_profile(profile: &RadialVortexProfile, s: f64) -> f64 {
    let alpha = profile.alpha();
    if s <= 0.0 {
        return -alpha * 0.5 * profile.g_core_level;
    }
    if s >= profile.m_outer() {
        return b_tail_constant(profile) / (s * s);
    }
    -alpha * profile.angular_velocity(s) - s * profile.angular_velocity_prime(s)
}

/// `c_B` in `B(s) = c_B s^{-2}` for `s >= M`.
pub fn b_tail_constant(profile: &RadialVortexProfile) -> f64 {
    (2.0 - profile.alpha()) * profile.c_omega
}

/// Samples of `W` and `B` on a log radial grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WbSamples {
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn wb_profiles(profile: &RadialVortexProfile) -> WbSamples {
    let s: Vec<f64> = profile.sample_log_grid().into_iter().map(f64::exp).collect();
    let w = s.iter().map(|&x| w_profile(profile, x)).collect();
    let b = s.iter().map(|&x| b_profile(profile, x)).collect();
    WbSamples { s, w, b }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingVariant {
    /// `Z(x, t)` of the original problem.
    Physical,
    /// `Z_eps(x, t)` of the rescaled problem.
    Rescaled,
    /// `Z_bar(x, t)`, the `eps -> 0` limit.
    Limit,
    /// Velocity forcing `F_eps` with `curl F_eps = Z_eps`.
    Velocity,
}

#[derive(Clone, Debug)]
pub struct ForcingSpec<'a> {
    pub profile: &'a RadialVortexProfile,
    pub c4: f64,
    pub samples: WbSamples,
    pub variant: ForcingVariant,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ForcingValue {
    Scalar(f64),
    Vector([f64; 2]),
}

impl ForcingValue {
    pub fn scalar(self) -> f64 {
        match self {
            ForcingValue::Scalar(v) => v,
            ForcingValue::Vector(_) => f64::NAN,
        }
    }

    pub fn vector(self) -> [f64; 2] {
        match self {
            ForcingValue::Vector(v) => v,
            ForcingValue::Scalar(_) => [f64::NAN; 2],
        }
    }
}

/// Dilation `D` and cutoff factor `c` of a radial layer: the layer is
/// `D^{-alpha} curl[chi(c|x|) V(x / D)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Layer {
    pub dilation: f64,
    pub cut: f64,
}

impl Layer {
    /// Layer of the original problem at time `t`.
    pub fn physical(family: &ScalingFamily<f64>, t: f64) -> Self {
        Layer {
            dilation: family.time_maps(t).0,
            cut: family.epsilon,
        }
    }

    /// Layer of the rescaled problem at time `t`.
    pub fn rescaled(family: &ScalingFamily<f64>, t: f64) -> Self {
        Layer {
            dilation: family.rescaled_base(t).powf(1.0 / family.alpha),
            cut: 1.0,
        }
    }

    pub fn limit(family: &ScalingFamily<f64>, t: f64) -> Result<Self> {
        if t <= 0.0 {
            return Err(Error::TimeSingularity(t));
        }
        Ok(Layer {
            dilation: (family.alpha * family.gamma * t).powf(1.0 / family.alpha),
            cut: 1.0,
        })
    }

    /// The cutoff annulus must sit where `W` vanishes: `c D <= c4 / M`.
    pub fn check_support(&self, profile: &RadialVortexProfile, c4: f64) -> Result<()> {
        let bound = c4 / profile.m_outer();
        if self.cut * self.dilation > bound * (1.0 + 1e-12) {
            return Err(Error::SupportViolation(format!(
                "cutoff factor times dilation {} exceeds c4/M = {bound}",
                self.cut * self.dilation
            )));
        }
        Ok(())
    }

    /// Background vorticity and velocity at `x`.
    pub fn background(&self, profile: &RadialVortexProfile, c4: f64, x: [f64; 2]) -> (f64, [f64; 2]) {
        let alpha = profile.alpha();
        let r = x[0].hypot(x[1]);
        let (chi, dchi) = cutoff_chi(c4, self.cut * r);
        let amp = self.dilation.powf(-alpha);
        if chi == 0.0 && dchi == 0.0 {
            return (0.0, [0.0; 2]);
        }
        let s = r / self.dilation;
        let om = profile.angular_velocity(s);
        let g = if chi > 0.0 { profile.vorticity(s) } else { 0.0 };
        let w = amp * (chi * g + self.cut * r * dchi * om);
        let vel = amp * chi * om;
        (w, [-vel * x[1], vel * x[0]])
    }

    /// `gamma D^{-2 alpha} [chi(c|x|) W(|x|/D) + c|x| chi'(c|x|) B(|x|/D)]`.
    pub fn forcing(&self, profile: &RadialVortexProfile, c4: f64, gamma: f64, x: [f64; 2]) -> f64 {
        let alpha = profile.alpha();
        let r = x[0].hypot(x[1]);
        let (chi, dchi) = cutoff_chi(c4, self.cut * r);
        let s = r / self.dilation;
        let mut z = 0.0;
        if chi > 0.0 {
            z += chi * w_profile(profile, s);
        }
        if dchi != 0.0 {
            z += self.cut * r * dchi * b_profile(profile, s);
        }
        gamma * self.dilation.powf(-2.0 * alpha) * z
    }

    /// `gamma D^{-2 alpha} chi(c|x|) B(|x|/D) x^perp`.
    pub fn velocity_forcing(&self, profile: &RadialVortexProfile, c4: f64, gamma: f64, x: [f64; 2]) -> [f64; 2] {
        let alpha = profile.alpha();
        let r = x[0].hypot(x[1]);
        let (chi, _) = cutoff_chi(c4, self.cut * r);
        if chi == 0.0 {
            return [0.0; 2];
        }
        let f = gamma * self.dilation.powf(-2.0 * alpha) * chi * b_profile(profile, r / self.dilation);
        [-f * x[1], f * x[0]]
    }
}

impl<'a> ForcingSpec<'a> {
    pub fn new(profile: &'a RadialVortexProfile, c4: f64, variant: ForcingVariant) -> Self {
        ForcingSpec {
            profile,
            c4,
            samples: wb_profiles(profile),
            variant,
        }
    }

    fn layer(&self, family: &ScalingFamily<f64>, t: f64) -> Result<Layer> {
        let layer = match self.variant {
            ForcingVariant::Physical => Layer::physical(family, t),
            ForcingVariant::Rescaled | ForcingVariant::Velocity => Layer::rescaled(family, t),
            ForcingVariant::Limit => Layer::limit(family, t)?,
        };
        layer.check_support(self.profile, self.c4)?;
        Ok(layer)
    }

    pub fn evaluate(&self, family: &ScalingFamily<f64>, x: [f64; 2], t: f64) -> Result<ForcingValue> {
        let layer = self.layer(family, t)?;
        Ok(match self.variant {
            ForcingVariant::Velocity => {
                ForcingValue::Vector(layer.velocity_forcing(self.profile, self.c4, family.gamma, x))
            }
            _ => ForcingValue::Scalar(layer.forcing(self.profile, self.c4, family.gamma, x)),
        })
    }

    /// Radial profile `r -> Z(r e_1, t)` of a scalar variant.
    pub fn radial(&self, family: &ScalingFamily<f64>, t: f64) -> Result<impl Fn(f64) -> f64 + '_> {
        let layer = self.layer(family, t)?;
        let (profile, c4, gamma) = (self.profile, self.c4, family.gamma);
        Ok(move |r: f64| layer.forcing(profile, c4, gamma, [r, 0.0]))
    }
}

/// Forcing at `x` and time `t` for the given variant.
pub fn forcing(spec: &ForcingSpec, family: &ScalingFamily<f64>, x: [f64; 2], t: f64) -> Result<ForcingValue> {
    spec.evaluate(family, x, t)
}

/// The limit forcing written as `curl d/dt [chi(|x|) (alpha gamma t)^{-1+1/alpha} V(x (alpha gamma t)^{-1/alpha})]`,
/// with the time derivative taken analytically and the curl by a fourth
/// order difference of step `h`.
pub fn limit_forcing_curl_form(
    profile: &RadialVortexProfile,
    family: &ScalingFamily<f64>,
    c4: f64,
    x: [f64; 2],
    t: f64,
    h: f64,
) -> Result<f64> {
    let layer = Layer::limit(family, t)?;
    layer.check_support(profile, c4)?;
    let f = |p: [f64; 2]| layer.velocity_forcing(profile, c4, family.gamma, p);
    let d = |e: [f64; 2], comp: usize| {
        let at = |k: f64| f([x[0] + k * h * e[0], x[1] + k * h * e[1]])[comp];
        (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h)
    };
    Ok(d([1.0, 0.0], 1) - d([0.0, 1.0], 0))
}

/// `L^Q` norm of a radial function over the plane by piecewise Gauss-Legendre
/// quadrature with the given breakpoints in `r`.
pub fn radial_lq_norm(f: impl Fn(f64) -> f64, q: f64, breaks: &[f64]) -> f64 {
    let gl = GaussLegendre::<f64>::new(24);
    let mut b = breaks.to_vec();
    b.retain(|v| v.is_finite() && *v >= 0.0);
    b.sort_by(f64::total_cmp);
    b.dedup();
    let mut total = 0.0;
    for w in b.windows(2) {
        // split each piece geometrically so that power laws near 0 are resolved
        let lo = w[0].max(w[1] * 1e-12);
        let pieces = if w[0] == 0.0 { 40 } else { 8 };
        let edges: Vec<f64> = if w[0] == 0.0 {
            linspace(lo.ln(), w[1].ln(), pieces + 1).into_iter().map(f64::exp).collect()
        } else {
            linspace(w[0], w[1], pieces + 1)
        };
        total += gl.composite(&edges, |r| f(r).abs().powf(q) * r);
    }
    (2.0 * std::f64::consts::PI * total).powf(1.0 / q)
}

/// Radii where the forcing of `layer` changes character.
pub fn layer_breaks(profile: &RadialVortexProfile, c4: f64, layer: &Layer) -> Vec<f64> {
    let d = layer.dilation;
    let (za, zb) = profile.a_zeros;
    let mut b = vec![
        0.0,
        profile.m_inner() * d,
        za.exp() * d,
        zb.exp() * d,
        profile.m_outer() * d,
        c4 / layer.cut,
        2.0 * c4 / layer.cut,
    ];
    let lo = profile.m_inner() * d;
    let hi = profile.m_outer() * d;
    b.extend(linspace(lo.ln(), hi.ln(), 9).into_iter().map(f64::exp));
    b
}

/// `int_0^T ||Z_eps(t) - Z_bar(t)||_Q dt` (or of `Z_eps` alone when
/// `subtract_limit` is false), with `t = T u^4` and Gauss-Legendre in `u`.
pub fn forcing_time_integral(
    profile: &RadialVortexProfile,
    family: &ScalingFamily<f64>,
    c4: f64,
    q: f64,
    t_end: f64,
    subtract_limit: bool,
) -> Result<f64> {
    let gl = GaussLegendre::<f64>::new(32);
    let edges = linspace(0.0, 1.0, 9);
    let mut failure = None;
    let total = gl.composite(&edges, |u| {
        let t = t_end * u.powi(4);
        let dt = 4.0 * t_end * u.powi(3);
        if t <= 0.0 {
            return 0.0;
        }
        let eps_layer = Layer::rescaled(family, t);
        let lim_layer = Layer::limit(family, t).expect("t > 0");
        for l in [&eps_layer, &lim_layer] {
            if let Err(e) = l.check_support(profile, c4) {
                failure.get_or_insert(e);
            }
        }
        let mut breaks = layer_breaks(profile, c4, &eps_layer);
        if subtract_limit {
            breaks.extend(layer_breaks(profile, c4, &lim_layer));
        }
        let g = family.gamma;
        let norm = radial_lq_norm(
            |r| {
                let z = eps_layer.forcing(profile, c4, g, [r, 0.0]);
                if subtract_limit {
                    z - lim_layer.forcing(profile, c4, g, [r, 0.0])
                } else {
                    z
                }
            },
            q,
            &breaks,
        );
        norm * dt
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// One azimuthal eigenmode `eta(y) = g(|y|) e^{i m theta}` sampled on its log
/// radial grid, stored in the convention where `Im lambda < 0` for the
/// operator acting on `e^{i m theta}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeShape {
    pub m: usize,
    pub lambda: Complex64,
    pub grid: SpectralGrid,
    pub g: Vec<Complex64>,
}

impl ModeShape {
    pub fn from_gamma_mode(mode: &GammaMode, m: usize) -> Self {
        ModeShape {
            m,
            lambda: mode.lambda,
            grid: mode.grid,
            g: mode.g.clone(),
        }
    }

    /// Cubic (Catmull-Rom) interpolation in log radius, `s^m` below the grid
    /// and zero above it.
    pub fn radial(&self, s: f64) -> Complex64 {
        let h = self.grid.h();
        let n = self.g.len();
        if s <= 0.0 {
            return Complex64::default();
        }
        let t = s.ln();
        if t <= self.grid.t_min {
            return self.g[0] * (s / self.grid.t_min.exp()).powi(self.m as i32);
        }
        let u = (t - self.grid.t_min) / h;
        if u >= (n - 1) as f64 {
            return Complex64::default();
        }
        let i = u.floor() as usize;
        let f = u - i as f64;
        let at = |k: isize| {
            let j = i as isize + k;
            if j < 0 {
                self.g[0]
            } else if j as usize >= n {
                Complex64::default()
            } else {
                self.g[j as usize]
            }
        };
        let (p0, p1, p2, p3) = (at(-1), at(0), at(1), at(2));
        let f2 = f * f;
        let f3 = f2 * f;
        (p1 * 2.0 + (p2 - p0) * f + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * f2 + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * f3)
            * 0.5
    }

    pub fn eta(&self, y: [f64; 2]) -> Complex64 {
        let s = y[0].hypot(y[1]);
        let th = y[1].atan2(y[0]);
        self.radial(s) * Complex64::from_polar(1.0, self.m as f64 * th)
    }

    /// `Re(c eta(y))`; the amplitude `c` carries any `epsilon^{lambda/gamma}` factor.
    pub fn real_part(&self, c: Complex64, y: [f64; 2]) -> f64 {
        (c * self.eta(y)).re
    }

    /// `epsilon^{lambda/gamma}` in this convention, equal to the conjugate of
    /// `epsilon^{rho + i zeta}`; `Re(epsilon^{rho + i zeta} eta)` is the same field.
    pub fn amplitude(&self, family: &ScalingFamily<f64>) -> Complex64 {
        if self.lambda.im > 0.0 {
            family.amplitude()
        } else {
            family.amplitude().conj()
        }
    }

    /// `Re(e^{lambda tau} c eta)`, the linear evolution of `Re(c eta)`.
    pub fn evolved_amplitude(&self, c: Complex64, tau: f64) -> Complex64 {
        c * (self.lambda * tau).exp()
    }
}

/// `omega(x, t) = R^{-alpha} sigma(x/R, tau) + R^{-alpha} curl[chi(eps R |y|) V(y)]`, sampled on
/// the dilated grid `x = R y` of the `sigma` grid.
pub fn assemble_ansatz(
    sigma: &Field2D,
    family: &ScalingFamily<f64>,
    profile: &RadialVortexProfile,
    t: f64,
) -> Result<Field2D> {
    let layer = Layer::physical(family, t);
    layer.check_support(profile, family.c4)?;
    Ok(assemble_layer(sigma, &layer, profile, family.c4, t))
}

/// The ansatz written for a general layer: amplitude `D^{-alpha}` and dilation `D`.
pub fn assemble_layer(sigma: &Field2D, layer: &Layer, profile: &RadialVortexProfile, c4: f64, t: f64) -> Field2D {
    let d = layer.dilation;
    let amp = d.powf(-profile.alpha());
    let mut out = Field2D::zeros(sigma.n, sigma.half_width * d, FieldKind::Omega);
    out.time = t;
    out.symmetry = sigma.symmetry;
    for (k, y) in sigma.points().enumerate() {
        let x = [d * y[0], d * y[1]];
        out.data[k] = amp * sigma.data[k] + layer.background(profile, c4, x).0;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RescaleKind {
    Vorticity,
    Velocity,
    Forcing,
}

impl RescaleKind {
    pub fn exponent(self, alpha: f64) -> f64 {
        match self {
            RescaleKind::Vorticity => -alpha,
            RescaleKind::Velocity => 1.0 - alpha,
            RescaleKind::Forcing => -2.0 * alpha,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rescaled {
    pub field: Field2D,
    /// Set when `eps < 4 h / (2 L)`: the rescaled features span fewer than
    /// four cells of the box.
    pub resolution_loss: bool,
}

/// `eps^p f(x / eps)` on the grid of `field`, sampled by bicubic
/// interpolation, with the time label mapped to `eps^alpha t`.
pub fn rescale_field(field: &Field2D, epsilon: f64, alpha: f64, kind: RescaleKind) -> Result<Rescaled> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParams(format!("rescaling factor {epsilon} must be positive")));
    }
    let resolution_loss = epsilon < 4.0 * field.spacing() / (2.0 * field.half_width);
    if epsilon == 1.0 {
        return Ok(Rescaled {
            field: field.clone(),
            resolution_loss,
        });
    }
    let amp = epsilon.powf(kind.exponent(alpha));
    let mut out = Field2D::from_fn(field.n, field.half_width, field.kind, |x| {
        amp * field.sample_bicubic([x[0] / epsilon, x[1] / epsilon])
    });
    out.time = epsilon.powf(alpha) * field.time;
    out.symmetry = field.symmetry;
    Ok(Rescaled {
        field: out,
        resolution_loss,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialVariant {
    /// `Re(eps^{rho+i zeta-alpha} eta(x/eps)) + curl[chi(|x|) eps^{1-alpha} V(x/eps)]`.
    Perturbed,
    /// `(2-alpha)^{-1} curl[chi(|x|) |x|^{-alpha} x^perp]`.
    Limit,
}

/// Initial vorticity of the rescaled problem on the grid `n`, `[-L, L]^2`.
pub fn initial_data(
    family: &ScalingFamily<f64>,
    profile: &RadialVortexProfile,
    eta: &ModeShape,
    variant: InitialVariant,
    n: usize,
    half_width: f64,
) -> Field2D {
    let mut f = Field2D::from_fn(n, half_width, FieldKind::Omega, |x| match variant {
        InitialVariant::Perturbed => {
            perturbation_initial(family, eta, x) + Layer::rescaled(family, 0.0).background(profile, family.c4, x).0
        }
        InitialVariant::Limit => limit_initial(family, x),
    });
    f.symmetry = Some(eta.m);
    f
}

/// `Re(eps^{rho+i zeta-alpha} eta(x/eps))`.
pub fn perturbation_initial(family: &ScalingFamily<f64>, eta: &ModeShape, x: [f64; 2]) -> f64 {
    let e = family.epsilon;
    let c = eta.amplitude(family) * e.powf(-family.alpha);
    eta.real_part(c, [x[0] / e, x[1] / e])
}

/// `chi(|x|)|x|^{-alpha} + |x| chi'(|x|) |x|^{-alpha}/(2-alpha)`.
pub fn limit_initial(family: &ScalingFamily<f64>, x: [f64; 2]) -> f64 {
    let a = family.alpha;
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return f64::INFINITY;
    }
    let (chi, dchi) = cutoff_chi(family.c4, r);
    r.powf(-a) * (chi + r * dchi / (2.0 - a))
}

/// `(omega_bar, v_bar)` at `(x, t)`, `t > 0`.
pub fn exact_radial_solution(
    family: &ScalingFamily<f64>,
    profile: &RadialVortexProfile,
    x: [f64; 2],
    t: f64,
) -> Result<(f64, [f64; 2])> {
    let layer = Layer::limit(family, t)?;
    Ok(layer.background(profile, family.c4, x))
}

/// `d_t omega_bar` at `(x, t)` by the chain rule through `D(t) = (alpha gamma t)^{1/alpha}`,
/// using `G'` and `Omega'` of the profile.
pub fn exact_radial_solution_dt(
    family: &ScalingFamily<f64>,
    profile: &RadialVortexProfile,
    x: [f64; 2],
    t: f64,
) -> Result<f64> {
    let layer = Layer::limit(family, t)?;
    let alpha = family.alpha;
    let r = x[0].hypot(x[1]);
    let d = layer.dilation;
    let s = r / d;
    let (chi, dchi) = cutoff_chi(family.c4, r);
    let mut inner = 0.0;
    if chi > 0.0 {
        inner += chi * (alpha * profile.vorticity(s) + s * profile.vorticity_prime(s));
    }
    if dchi != 0.0 {
        inner += r * dchi * (alpha * profile.angular_velocity(s) + s * profile.angular_velocity_prime(s));
    }
    Ok(-family.gamma * d.powf(-2.0 * alpha) * inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{build_class_c_profile, ProfileParams};

    fn family() -> ScalingFamily<f64> {
        ScalingFamily::new(0.4, 0.58, 1.0, Complex64::new(0.52, 7.3), 20.0, 0.05, 1.0).unwrap()
    }

    #[test]
    fn time_maps_start_at_unit_radius() {
        let f = family();
        assert_eq!(f.time_maps(0.0), (1.0, 0.0));
        let g = ScalingFamily::new(0.99, 0.5, 1.0, Complex64::new(1.2, 1.0), 1.0, 0.05, 1.0).unwrap();
        let (r, tau) = g.time_maps(2.0);
        assert!((r - (1.0 + 0.99 * 0.5 * 2.0f64).powf(1.0 / 0.99)).abs() < 1e-14);
        assert!((g.t_of_tau(tau) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn radial_time_derivative_matches_difference_quotient() {
        let profile = build_class_c_profile(ProfileParams::default()).unwrap();
        let f = family();
        for (r, t) in [(0.05, 0.2), (0.4, 0.5), (3.0, 1.0), (21.0, 0.8), (35.0, 0.3)] {
            let x = [0.6 * r, 0.8 * r];
            let w = |t: f64| exact_radial_solution(&f, &profile, x, t).unwrap().0;
            let h = 1e-5 * t;
            let fd = (w(t - 2.0 * h) - 8.0 * w(t - h) + 8.0 * w(t + h) - w(t + 2.0 * h)) / (12.0 * h);
            let exact = exact_radial_solution_dt(&f, &profile, x, t).unwrap();
            assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "r = {r}: {fd} vs {exact}");
        }
    }

    #[test]
    fn gamma_above_the_growth_bound_is_rejected() {
        assert!(ScalingFamily::new(0.4, 2.0, 1.0, Complex64::new(0.5, 1.0), 20.0, 0.05, 1.0).is_err());
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff_chi(3.0, 1.5).0, 1.0);
        assert_eq!(cutoff_chi(3.0, 9.0).0, 0.0);
        let mut prev = 1.0;
        for k in 0..400 {
            let r = k as f64 * 0.02;
            let (v, d) = cutoff_chi(3.0, r);
            assert!(v <= prev + 1e-15);
            prev = v;
            if !(3.0..=6.0).contains(&r) {
                assert_eq!(d, 0.0);
            }
            let h = 1e-6;
            let fd = (cutoff_chi(3.0, r + h).0 - cutoff_chi(3.0, r - h).0) / (2.0 * h);
            assert!((fd - d).abs() < 1e-6, "r={r} {fd} {d}");
        }
    }

    #[test]
    fn w_and_b_tails() {
        let p = build_class_c_profile(ProfileParams::default()).unwrap();
        let cb = b_tail_constant(&p);
        for s in [10.0, 14.0, 50.0, 300.0] {
            assert!(w_profile(&p, s).abs() < 1e-10);
            let direct = -0.4 * p.angular_velocity(s) - s * p.angular_velocity_prime(s);
            assert!((direct * s * s - cb).abs() < 1e-8 * cb.abs());
        }
        // core: G = G0 - 4 c0 s^2 gives W = -alpha G0 + (4 alpha + 8) c0 s^2
        let s = 0.5;
        let expect = -0.4 * p.g_core_level + (4.0 * 0.4 + 8.0) * p.c0() * s * s;
        assert!((w_profile(&p, s) - expect).abs() < 1e-10);
        assert!((w_profile(&p, 0.0) + 0.4 * p.g_core_level).abs() < 1e-12);
    }

    #[test]
    fn forcing_is_the_time_derivative_of_the_background() {
        let p = build_class_c_profile(ProfileParams::default()).unwrap();
        let f = family().with_epsilon(0.5).unwrap();
        let spec = ForcingSpec::new(&p, f.c4, ForcingVariant::Physical);
        for &x in &[[0.7, 0.2], [3.0, -1.0], [15.0, 20.0]] {
            let t = 0.8;
            let z = spec.evaluate(&f, x, t).unwrap().scalar();
            let h = 1e-5;
            let w = |t| Layer::physical(&f, t).background(&p, f.c4, x).0;
            let fd = (w(t + h) - w(t - h)) / (2.0 * h);
            assert!((z - fd).abs() < 1e-6 * (1.0 + z.abs()), "{x:?} {z} {fd}");
        }
    }

    #[test]
    fn physical_forcing_rejects_late_times() {
        let p = build_class_c_profile(ProfileParams::default()).unwrap();
        let f = family();
        let spec = ForcingSpec::new(&p, f.c4, ForcingVariant::Physical);
        assert!(matches!(spec.evaluate(&f, [1.0, 0.0], 100.0), Err(Error::SupportViolation(_))));
        let lim = ForcingSpec::new(&p, f.c4, ForcingVariant::Limit);
        assert!(matches!(lim.evaluate(&f, [1.0, 0.0], 0.0), Err(Error::TimeSingularity(_))));
    }

    #[test]
    fn mode_interpolation_is_smooth() {
        let grid = SpectralGrid::new(-3.0, 3.0, 601).unwrap();
        let g: Vec<Complex64> = grid.nodes().iter().map(|&t| Complex64::new((-t * t).exp(), t.sin())).collect();
        let mode = ModeShape {
            m: 2,
            lambda: Complex64::new(0.5, -1.0),
            grid,
            g,
        };
        for t in [-2.345f64, 0.1234, 1.77] {
            let exact = Complex64::new((-t * t).exp(), t.sin());
            assert!((mode.radial(t.exp()) - exact).norm() < 1e-7);
        }
    }
}
