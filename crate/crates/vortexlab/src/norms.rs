//! Lebesgue and Lorentz norms of grid functions.
//!
//! A grid function is piecewise constant on cells of area `cell_area`, so
//! every distribution function is a finite step function and both `L^{q,1}`
//! expressions can be summed exactly.

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Lebesgue,
    LorentzIntegral,
    LorentzDyadic,
    /// `L^q` norm of `|y| |grad f|`; the caller supplies the weighted values.
    Weighted,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec<T> {
    pub q: T,
    pub kind: NormKind,
    pub cell_area: T,
}

impl<T: Real> NormSpec<T> {
    pub fn new(q: T, kind: NormKind, cell_area: T) -> Result<Self> {
        let lorentz = matches!(kind, NormKind::LorentzIntegral | NormKind::LorentzDyadic);
        if !(q >= T::one()) || (lorentz && !(q > T::one())) || !(cell_area > T::zero()) {
            return Err(Error::InvalidParams(format!("invalid norm exponent {q:?} or cell area")));
        }
        Ok(NormSpec { q, kind, cell_area })
    }

    pub fn apply(&self, values: &[T]) -> T {
        match self.kind {
            NormKind::Lebesgue | NormKind::Weighted => lebesgue_norm(values, self.cell_area, self.q),
            NormKind::LorentzIntegral => lorentz_norm_integral(values, self.cell_area, self.q),
            NormKind::LorentzDyadic => lorentz_norm_dyadic(values, self.cell_area, self.q),
        }
    }
}

/// Nonincreasing rearrangement of `|f|`: level `levels[k]` is taken on
/// `(measure[k-1], measure[k]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rearrangement<T> {
    pub levels: Vec<T>,
    pub measure: Vec<T>,
}

impl<T: Real> Rearrangement<T> {
    /// `f*(t)`.
    pub fn star(&self, t: T) -> T {
        let k = self.measure.partition_point(|&m| m < t);
        self.levels.get(k).copied().unwrap_or(T::zero())
    }

    /// `f**(t) = t^{-1} int_0^t f*`.
    pub fn double_star(&self, t: T) -> T {
        if t <= T::zero() {
            return self.levels.first().copied().unwrap_or(T::zero());
        }
        let mut acc = T::zero();
        let mut prev = T::zero();
        for (&v, &m) in self.levels.iter().zip(&self.measure) {
            if m >= t {
                acc = acc + v * (t - prev);
                return acc / t;
            }
            acc = acc + v * (m - prev);
            prev = m;
        }
        acc / t
    }
}

/// Sorts `|f|` descending and merges equal values.
pub fn decreasing_rearrangement<T: Real>(values: &[T], cell_area: T) -> Rearrangement<T> {
    let mut v: Vec<T> = values.iter().map(|x| x.abs()).filter(|x| *x > T::zero()).collect();
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite values"));
    let mut levels = Vec::new();
    let mut measure = Vec::new();
    let mut count = 0usize;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        count += j - i;
        levels.push(v[i]);
        measure.push(T::from_usize(count).unwrap() * cell_area);
        i = j;
    }
    Rearrangement { levels, measure }
}

pub fn lebesgue_norm<T: Real>(values: &[T], cell_area: T, q: T) -> T {
    let mut scale = T::zero();
    for v in values {
        scale = scale.max(v.abs());
    }
    if scale == T::zero() {
        return T::zero();
    }
    let sum = values.iter().fold(T::zero(), |acc, v| acc + (v.abs() / scale).powf(q));
    scale * (sum * cell_area).powf(T::one() / q)
}

/// `int_0^inf t^{1/q} f**(t) dt / t`, exact on the step structure.
pub fn lorentz_norm_integral<T: Real>(values: &[T], cell_area: T, q: T) -> T {
    let re = decreasing_rearrangement(values, cell_area);
    if re.levels.is_empty() {
        return T::zero();
    }
    let one = T::one();
    let p = one / q;
    // F(t) = int_0^t f* is linear on each step, so each piece integrates in closed form.
    let mut total = T::zero();
    let mut f_prev = T::zero();
    let mut t_prev = T::zero();
    for (&v, &t) in re.levels.iter().zip(&re.measure) {
        if t_prev == T::zero() {
            total = total + v * t.powf(p) / p;
        } else {
            let c = f_prev - v * t_prev;
            total = total + c * (t.powf(p - one) - t_prev.powf(p - one)) / (p - one) + v * (t.powf(p) - t_prev.powf(p)) / p;
        }
        f_prev = f_prev + v * (t - t_prev);
        t_prev = t;
    }
    total + f_prev * t_prev.powf(p - one) / (one - p)
}

/// `sum_j 2^j |{2^j <= |f| < 2^{j+1}}|^{1/q}`.
pub fn lorentz_norm_dyadic<T: Real>(values: &[T], cell_area: T, q: T) -> T {
    let mut bins: std::collections::BTreeMap<i64, usize> = Default::default();
    for v in values {
        let a = v.abs();
        if a > T::zero() {
            let mut j = a.log2().floor().to_i64().expect("finite");
            // guard the floor against rounding at exact powers of two
            let two = T::one() + T::one();
            if two.powi(j as i32) > a {
                j -= 1;
            } else if two.powi(j as i32 + 1) <= a {
                j += 1;
            }
            *bins.entry(j).or_default() += 1;
        }
    }
    let two = T::one() + T::one();
    bins.iter().fold(T::zero(), |acc, (&j, &c)| {
        acc + two.powi(j as i32) * (T::from_usize(c).unwrap() * cell_area).powf(T::one() / q)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_rearrangement() {
        let f = [2.0, 1.0, 1.0, 0.0];
        let r = decreasing_rearrangement(&f, 1.0);
        assert_eq!(r.levels, vec![2.0, 1.0]);
        assert_eq!(r.measure, vec![1.0, 3.0]);
        assert_eq!(r.star(0.5), 2.0);
        assert_eq!(r.star(2.5), 1.0);
        assert_eq!(r.star(3.5), 0.0);
        assert!((r.double_star(2.0) - 1.5f64).abs() < 1e-15);
    }

    #[test]
    fn indicator_values() {
        let f = vec![1.0f64; 9];
        let a = 0.25;
        let e = 9.0 * a;
        assert!((lorentz_norm_integral(&f, a, 2.0) - 4.0 * e.sqrt()).abs() < 1e-13);
        assert!((lorentz_norm_dyadic(&f, a, 2.0) - e.sqrt()).abs() < 1e-15);
        let r = decreasing_rearrangement(&f, a);
        assert!((r.double_star(4.0) - e / 4.0).abs() < 1e-15);
        assert_eq!(lorentz_norm_integral(&[0.0f64; 4], 1.0, 2.0), 0.0);
    }

    #[test]
    fn generic_in_the_scalar() {
        let f = [1.0f32, 1.0, 1.0, 1.0];
        assert!((lorentz_norm_integral(&f, 1.0f32, 2.0) - 8.0).abs() < 1e-5);
    }

    #[test]
    fn exact_powers_of_two_fall_in_their_own_bin() {
        let f = [4.0f64, 0.5, 0.25];
        let d = lorentz_norm_dyadic(&f, 1.0, 2.0);
        assert!((d - (4.0 + 0.5 + 0.25)).abs() < 1e-15);
    }

    #[test]
    fn spec_rejects_lorentz_at_q_one() {
        assert!(NormSpec::new(1.0, NormKind::LorentzIntegral, 1.0).is_err());
        assert!(NormSpec::new(1.0, NormKind::Lebesgue, 1.0).is_ok());
    }
}
