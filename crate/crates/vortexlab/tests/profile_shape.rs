use vortexlab::quadrature::GaussLegendre;
use vortexlab::{build_class_c_profile, verify_class_c, ProfileParams, RadialVortexProfile};

fn weak() -> RadialVortexProfile {
    build_class_c_profile(ProfileParams {
        alpha: 0.4,
        m_inner: 1.0,
        m_outer: 10.0,
        c0: 0.1,
        ..ProfileParams::default()
    })
    .unwrap()
}

#[test]
fn weak_core_profile_is_certified() {
    let report = verify_class_c(&weak());
    assert!(report.passed(), "{:?}", report.first_failure);
    assert!(report.cumulative_max < 0.0);
    assert_eq!(report.zero_count, 2);
}

#[test]
fn angular_velocity_is_the_enclosed_circulation() {
    let profile = weak();
    let gl = GaussLegendre::<f64>::new(20);
    for s in [0.3, 1.0, 2.5, 7.0, 10.0, 40.0] {
        let breaks: Vec<f64> = (0..=400).map(|i| s * i as f64 / 400.0).collect();
        let circ = gl.composite(&breaks, |r| r * profile.vorticity(r));
        let want = circ / (s * s);
        let got = profile.angular_velocity(s);
        assert!((got - want).abs() < 1e-8 * want.abs().max(1e-3), "s = {s}: {got} vs {want}");
    }
}

#[test]
fn tail_is_the_pure_power_law() {
    let profile = weak();
    let a = profile.alpha();
    for s in [12.0, 100.0, 1e3] {
        let g = profile.vorticity(s);
        assert!((g - s.powf(-a)).abs() < 1e-12 * s.powf(-a));
    }
}

#[test]
fn background_velocity_is_azimuthal() {
    let profile = weak();
    for x in [[0.5, 0.1], [-3.0, 2.0], [8.0, -9.0]] {
        let v = profile.background_velocity(x);
        let r = x[0].hypot(x[1]);
        assert!((v[0] * x[0] + v[1] * x[1]).abs() < 1e-14 * r * r);
        let speed = v[0].hypot(v[1]);
        assert!((speed - profile.angular_velocity(r).abs() * r).abs() < 1e-12 * speed);
    }
}

#[test]
fn embedded_json_roundtrip_reproduces_the_profile() {
    let profile = weak();
    let back = RadialVortexProfile::from_json(&profile.to_json().unwrap(), None).unwrap();
    for s in [0.01, 0.9, 3.3, 10.0, 55.0] {
        assert_eq!(profile.vorticity(s).to_bits(), back.vorticity(s).to_bits());
    }
}

#[test]
fn invalid_exponent_is_rejected() {
    let params = ProfileParams {
        alpha: 2.5,
        ..ProfileParams::default()
    };
    assert!(build_class_c_profile(params).is_err());
}
