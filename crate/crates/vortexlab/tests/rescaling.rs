use num_complex::Complex;
use vortexlab::dynamics::{Field2D, FieldKind};
use vortexlab::norms::lebesgue_norm;
use vortexlab::scaling::{rescale_field, RescaleKind, ScalingFamily};

const ALPHA: f64 = 0.4;

fn blob() -> Field2D {
    let mut f = Field2D::from_fn(256, 10.0, FieldKind::Omega, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        (1.0 + 0.3 * x[0] * x[1]) * (-r2 / 2.0).exp()
    });
    f.time = 0.8;
    f
}

#[test]
fn unit_factor_is_the_identity() {
    let f = blob();
    let r = rescale_field(&f, 1.0, ALPHA, RescaleKind::Vorticity).unwrap();
    assert_eq!(r.field, f);
    assert!(!r.resolution_loss);
}

#[test]
fn lebesgue_norms_follow_the_change_of_variables() {
    let f = blob();
    for eps in [0.6, 1.4] {
        for (kind, q) in [(RescaleKind::Vorticity, 3.0), (RescaleKind::Velocity, 2.0), (RescaleKind::Forcing, 1.5)] {
            let r = rescale_field(&f, eps, ALPHA, kind).unwrap().field;
            let got = lebesgue_norm(&r.data, r.cell_area(), q);
            let want = eps.powf(kind.exponent(ALPHA) + 2.0 / q) * lebesgue_norm(&f.data, f.cell_area(), q);
            assert!((got - want).abs() < 1e-3 * want, "eps = {eps}, {kind:?}: {got} vs {want}");
            assert!((r.time - eps.powf(ALPHA) * f.time).abs() < 1e-15);
        }
    }
}

#[test]
fn rescaling_composes() {
    let f = blob();
    let (e1, e2) = (1.3, 0.7);
    let two = rescale_field(&rescale_field(&f, e1, ALPHA, RescaleKind::Vorticity).unwrap().field, e2, ALPHA, RescaleKind::Vorticity)
        .unwrap()
        .field;
    let one = rescale_field(&f, e1 * e2, ALPHA, RescaleKind::Vorticity).unwrap().field;
    let scale = one.max_abs();
    let worst = two.data.iter().zip(&one.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-3 * scale, "{worst}");
}

#[test]
fn tiny_factors_flag_resolution_loss() {
    let f = blob();
    assert!(rescale_field(&f, 0.01, ALPHA, RescaleKind::Vorticity).unwrap().resolution_loss);
    assert!(rescale_field(&f, 0.0, ALPHA, RescaleKind::Vorticity).is_err());
}

#[test]
fn time_maps_invert_and_grow_exponentially() {
    let fam = ScalingFamily::new(ALPHA, 0.5, 0.05, Complex::new(0.5, 7.3), 20.0, 0.1, 3.5).unwrap();
    for t in [0.0, 0.3, 2.0, 9.0] {
        let (r, tau) = fam.time_maps(t);
        assert!((fam.t_of_tau(tau) - t).abs() < 1e-12 * t.max(1.0));
        assert!((r - (fam.gamma * tau).exp()).abs() < 1e-12 * r);
        assert!((r.powf(ALPHA) - 1.0 - ALPHA * fam.gamma * t).abs() < 1e-12 * r.powf(ALPHA));
    }
    let single = ScalingFamily::<f32>::new(0.4, 0.5, 0.05, Complex::new(0.5, 7.3), 20.0, 0.1, 3.5).unwrap();
    let (r32, _) = single.time_maps(2.0);
    assert!((r32 as f64 - fam.time_maps(2.0).0).abs() < 1e-5 * r32 as f64);
}
