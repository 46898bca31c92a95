use proptest::prelude::*;
use vortexlab::norms::{decreasing_rearrangement, lebesgue_norm, lorentz_norm_dyadic, lorentz_norm_integral};
use vortexlab::{F64NormSpec, NormKind};

fn field() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (
        prop::collection::vec(prop_oneof![Just(0.0), -1e3..1e3f64, -1e-3..1e-3f64], 1..300),
        1e-3..10.0f64,
    )
}

proptest! {
    #[test]
    fn integral_and_dyadic_forms_are_equivalent((values, area) in field()) {
        prop_assume!(values.iter().any(|v| *v != 0.0));
        let r = lorentz_norm_integral(&values, area, 2.0) / lorentz_norm_dyadic(&values, area, 2.0);
        prop_assert!((1.0..=8.0).contains(&r), "ratio {r}");
    }

    #[test]
    fn norms_ignore_order_and_scale_linearly((values, area) in field(), c in -5.0..5.0f64) {
        let mut rev = values.clone();
        rev.reverse();
        let scaled: Vec<f64> = values.iter().map(|v| c * v).collect();
        for q in [1.5, 2.0, 3.0] {
            let base = lorentz_norm_integral(&values, area, q);
            prop_assert!((lorentz_norm_integral(&rev, area, q) - base).abs() <= 1e-12 * base);
            prop_assert!((lorentz_norm_integral(&scaled, area, q) - c.abs() * base).abs() <= 1e-12 * base.max(1e-300));
            let lp = lebesgue_norm(&values, area, q);
            prop_assert!((lebesgue_norm(&scaled, area, q) - c.abs() * lp).abs() <= 1e-12 * lp.max(1e-300));
        }
    }

    #[test]
    fn rearrangement_is_nonincreasing_with_full_measure((values, area) in field()) {
        let r = decreasing_rearrangement(&values, area);
        prop_assert!(r.levels.windows(2).all(|w| w[0] >= w[1]));
        let nonzero = values.iter().filter(|v| **v != 0.0).count() as f64;
        prop_assert!(r.star(0.5 * area * nonzero) > 0.0 || nonzero == 0.0);
        prop_assert_eq!(r.star(area * (values.len() as f64 + 1.0)), 0.0);
    }
}

#[test]
fn indicator_values_are_exact() {
    let area = 0.37;
    for k in [1usize, 5, 100] {
        let values = vec![1.0; k];
        let measure = area * k as f64;
        assert!((lebesgue_norm(&values, area, 3.0) - measure.powf(1.0 / 3.0)).abs() < 1e-14);
        assert!((lorentz_norm_integral(&values, area, 2.0) - 4.0 * measure.sqrt()).abs() < 1e-13);
    }
}

#[test]
fn norm_spec_dispatches_and_validates() {
    let values = [3.0, -4.0];
    let spec = F64NormSpec::new(2.0, NormKind::Lebesgue, 1.0).unwrap();
    assert!((spec.apply(&values) - 5.0).abs() < 1e-14);
    assert!(F64NormSpec::new(1.0, NormKind::LorentzIntegral, 1.0).is_err());
    assert!(F64NormSpec::new(2.0, NormKind::Lebesgue, 0.0).is_err());
}

#[test]
fn single_precision_follows_double() {
    let v64 = [0.5, -2.0, 1.25, 0.0, 3.0];
    let v32: Vec<f32> = v64.iter().map(|&v| v as f32).collect();
    let a = lorentz_norm_integral(&v64, 0.1, 2.0);
    let b = lorentz_norm_integral(&v32, 0.1f32, 2.0f32) as f64;
    assert!((a - b).abs() < 1e-5 * a);
}
