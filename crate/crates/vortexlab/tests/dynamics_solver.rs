use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vortexlab::dynamics::{
    biot_savart, evolve, weak_residual_analytic, AnalyticQuadrature, EvolutionConfig, Field2D, FieldKind,
    RadialSolution, Stepper, TestFunction, Variant, WeakSolution,
};
use vortexlab::{build_class_c_profile, Family, ProfileParams, RadialVortexProfile};

fn family() -> Family {
    Family::new(0.4, 2.6, 0.05, Complex64::new(2.384, -5.147), 20.0, 0.1, 3.5).unwrap()
}

fn profile() -> RadialVortexProfile {
    build_class_c_profile(ProfileParams::default()).unwrap()
}

#[test]
fn biot_savart_of_a_gaussian_stream_function() {
    let omega = Field2D::from_fn(128, 10.0, FieldKind::Omega, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        (r2 - 2.0) * (-r2 / 2.0).exp()
    });
    let [u, v] = biot_savart(&omega);
    let mut worst: f64 = 0.0;
    for (k, x) in omega.points().enumerate() {
        let psi = (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp();
        worst = worst.max((u.data[k] - x[1] * psi).abs()).max((v.data[k] + x[0] * psi).abs());
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn zero_perturbation_stays_zero() {
    let (profile, family) = (profile(), family());
    let zero = Field2D::zeros(64, 10.0, FieldKind::Sigma);
    for variant in [Variant::CutoffV1, Variant::Linearized, Variant::FullV] {
        let config = EvolutionConfig {
            variant,
            dtau: 2.5e-3,
            ..EvolutionConfig::default()
        };
        let stepper = Stepper::new(&zero, config, &family, &profile).unwrap();
        let mut state = zero.clone();
        for _ in 0..5 {
            state = stepper.step(&state).unwrap();
        }
        assert_eq!(state.max_abs(), 0.0, "{variant:?}");
        assert!((state.time - 0.0125).abs() < 1e-12);
    }
}

#[test]
fn short_run_keeps_symmetry_and_integral_law() {
    let (profile, family) = (profile(), family());
    let mut initial = Field2D::from_fn(64, 10.0, FieldKind::Sigma, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        1e-3 * (0.5 + x[0] * x[0] - x[1] * x[1] + x[0] * x[1]) * (-r2).exp()
    });
    initial.symmetry = Some(2);
    let config = EvolutionConfig {
        dtau: 2.5e-3,
        record_every: 4,
        ..EvolutionConfig::default()
    };
    let tr = evolve(&initial, &config, &family, &profile, 0.1).unwrap();
    assert!(tr.final_state.is_finite());
    assert!((tr.final_state.time - 0.1).abs() < 1e-12);
    assert!(tr.integral_drift < 1e-10, "{}", tr.integral_drift);
    assert!(tr.max_symmetry_defect < 1e-8, "{}", tr.max_symmetry_defect);
    assert_eq!(tr.records.len(), 11);
}

struct Inflated<'a>(RadialSolution<'a>);

impl WeakSolution for Inflated<'_> {
    fn omega0(&self, x: [f64; 2]) -> f64 {
        self.0.omega0(x)
    }
    fn omega(&self, x: [f64; 2], t: f64) -> f64 {
        1.1 * self.0.omega(x, t)
    }
    fn velocity(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        self.0.velocity(x, t)
    }
    fn forcing(&self, x: [f64; 2], t: f64) -> f64 {
        self.0.forcing(x, t)
    }
    fn radial_breaks(&self, t: f64) -> Vec<f64> {
        self.0.radial_breaks(t)
    }
}

#[test]
fn weak_residual_separates_exact_from_perturbed() {
    let profile = profile();
    let quad = AnalyticQuadrature {
        time_panels: 6,
        time_order: 8,
        radial_panels: 3,
        radial_order: 10,
        n_theta: 64,
    };
    let tests = TestFunction::random_family(&mut ChaCha8Rng::seed_from_u64(7), 4, 1.0, (0.15, 0.4), 1.0);
    let exact = RadialSolution {
        profile: &profile,
        family: family(),
        limit: true,
    };
    let good = weak_residual_analytic(&exact, &tests, &quad).unwrap().residual;
    let bad = weak_residual_analytic(&Inflated(exact), &tests, &quad).unwrap().residual;
    assert!(good < 5e-3, "{good}");
    assert!(bad > 10.0 * good, "{bad} vs {good}");
}
