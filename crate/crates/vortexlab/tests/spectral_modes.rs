use num_complex::Complex64;
use vortexlab::quadrature::GaussLegendre;
use vortexlab::spectral::{
    hs_norm_a_l, stream_from_vorticity, unstable_spectrum, velocity_from_vorticity, SpectralGrid,
};
use vortexlab::{build_class_c_profile, Error, ProfileParams};

// psi = s^m e^{-s^2} has Laplacian (in mode m) s^m e^{-s^2} (4 s^2 - 4 m - 4).
fn gaussian_mode(m: i64, s: f64) -> (f64, f64) {
    let k = m as f64;
    let psi = s.powf(k) * (-s * s).exp();
    (psi, psi * (4.0 * s * s - 4.0 * k - 4.0))
}

#[test]
fn stream_of_a_gaussian_mode_is_the_closed_form() {
    let grid = SpectralGrid::new(-9.0, 3.0, 12001).unwrap();
    for m in [2i64, 3, 5] {
        let g: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&t| Complex64::new(gaussian_mode(m, t.exp()).1, 0.0))
            .collect();
        let psi = stream_from_vorticity(&grid, &g, m).unwrap();
        let peak = (m as f64 / 2.0).sqrt();
        let scale = gaussian_mode(m, peak).0;
        for (t, p) in grid.nodes().iter().zip(&psi).step_by(193) {
            let want = gaussian_mode(m, t.exp()).0;
            assert!((p - want).norm() < 1e-5 * scale, "m = {m}, s = {}: {p} vs {want}", t.exp());
        }
    }
}

#[test]
fn mode_velocity_is_the_perpendicular_gradient() {
    let m = 2i64;
    let grid = SpectralGrid::new(-9.0, 3.0, 6001).unwrap();
    let g: Vec<Complex64> = grid
        .nodes()
        .iter()
        .map(|&t| Complex64::new(gaussian_mode(m, t.exp()).1, 0.0))
        .collect();
    let field = |x: [f64; 2]| {
        let s = x[0].hypot(x[1]);
        Complex64::from_polar(gaussian_mode(m, s).0, m as f64 * x[1].atan2(x[0]))
    };
    let h = 1e-5;
    for x in [[0.4, 0.3], [-1.1, 0.2], [0.7, -1.6], [2.0, 1.0]] {
        let v = velocity_from_vorticity(&grid, &g, m, x).unwrap();
        let dx = (field([x[0] + h, x[1]]) - field([x[0] - h, x[1]])) / (2.0 * h);
        let dy = (field([x[0], x[1] + h]) - field([x[0], x[1] - h])) / (2.0 * h);
        let want = [-dy, dx];
        for c in 0..2 {
            assert!((v[c] - want[c]).norm() < 1e-5, "x = {x:?}: {:?} vs {want:?}", v);
        }
    }
}

#[test]
fn hs_norm_matches_the_factorized_kernel_integral() {
    let profile = build_class_c_profile(ProfileParams::default()).unwrap();
    let grid = SpectralGrid::for_profile(&profile, 2048);
    let gl = GaussLegendre::<f64>::new(24);
    let breaks: Vec<f64> = (0..=240).map(|i| -20.0 + 0.125 * i as f64).collect();
    let alpha = profile.alpha();
    let a2 = gl.composite(&breaks, |t| profile.a_t(t).powi(2)) + 0.5 * alpha * (-20.0 * alpha).exp();
    for (m, l) in [(2usize, 1i64), (2, 3), (3, -2)] {
        let k = (m as f64 * l as f64).abs();
        let want = (0.25 * a2 * (1.0 / (2.0 * k + 2.0) + 1.0 / (2.0 * k - 2.0))).sqrt();
        let got = hs_norm_a_l(&profile, m, l, &grid).unwrap();
        assert!((got - want).abs() < 1e-3 * want, "m = {m}, l = {l}: {got} vs {want}");
    }
    assert!(matches!(hs_norm_a_l(&profile, 2, 0, &grid), Err(Error::InvalidParams(_))));
}

#[test]
fn the_weak_core_profile_has_an_unstable_quadrupole() {
    let params = ProfileParams {
        c0: 0.1,
        ..ProfileParams::default()
    };
    let profile = build_class_c_profile(params).unwrap();
    let grid = SpectralGrid::for_profile(&profile, 1024);
    let modes = unstable_spectrum(&profile, 2, &grid).unwrap();
    assert!(!modes.is_empty());
    for md in &modes {
        assert!(md.mu.im > 1e-4);
        assert!(md.residual_pencil < 1e-8);
        let lam = Complex64::new(0.0, -2.0) * md.mu;
        assert!((md.lambda - lam).norm() < 1e-12 * lam.norm());
    }
}
