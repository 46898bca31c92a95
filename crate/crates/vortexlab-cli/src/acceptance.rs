//! The eighteen acceptance checks, run in order against one shared [`Lab`].
//!
//! Every check yields an [`Outcome`] whose `line()` is the row printed in the
//! pass/fail table. Numerical errors inside a check turn into a failing row
//! rather than aborting the suite.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use vortexlab::dynamics::{
    ansatz_weak_residual, evolve, growth_rate_fit, linear_gap, mode_field, mode_phase_series, fit_line,
    nonuniqueness_experiment, transport_bound, weak_residual_analytic, AnalyticQuadrature, AnsatzCheck,
    EvolutionConfig, NonuniqConfig, RadialSolution, TestFunction, TransportCheck, Variant,
};
use vortexlab::norms::{lorentz_norm_dyadic, lorentz_norm_integral};
use vortexlab::quadrature::linspace;
use vortexlab::scaling::{exact_radial_solution, exact_radial_solution_dt, forcing_time_integral, Layer};
use vortexlab::spectral::operator::inverse_iteration;
use vortexlab::spectral::pencil::eigenvalue_drift;
use vortexlab::spectral::{
    assemble_mode_operator, greens_apply, hs_norm_a_l, kappa_continuation, moment_functional,
    moments::moment_integral, tail_slope, unstable_spectrum, EigenMode, MomentTail, MomentVariant, Normalization,
    SpectralGrid,
};
use vortexlab::{verify_class_c, Lab, LabConfig, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteOptions {
    pub lab: LabConfig,
    /// Nodes of the pencil grid used by the mode scan.
    pub spectral_n: usize,
    pub scan_m: Vec<usize>,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            lab: LabConfig::default(),
            spectral_n: 2048,
            scan_m: (2..=10).collect(),
            seed: 2024,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    /// Stated time budget in seconds, reported next to the measured time.
    pub budget: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        let over = if self.seconds > self.budget { ", over budget" } else { "" };
        format!(
            "{} {:>2} {:<26} {} [{:.1}s of {:.0}s{}]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds,
            self.budget,
            over
        )
    }
}

/// Integral drift and symmetry defect of one dynamics run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunHealth {
    pub run: String,
    pub integral_drift: f64,
    pub symmetry_defect: f64,
}

struct Suite {
    options: SuiteOptions,
    lab: Lab,
    scan: Vec<EigenMode>,
    health: Vec<RunHealth>,
    rng: ChaCha8Rng,
}

type Check = Result<(bool, String)>;

/// Builds the shared objects and runs all checks, handing each outcome to
/// `report` as soon as it is known.
pub fn run_suite(options: &SuiteOptions, mut report: impl FnMut(&Outcome)) -> Result<Vec<Outcome>> {
    let lab = Lab::build(options.lab.clone())?;
    let mut suite = Suite {
        rng: ChaCha8Rng::seed_from_u64(options.seed),
        options: options.clone(),
        lab,
        scan: Vec::new(),
        health: Vec::new(),
    };
    let checks: [(u32, &str, f64, fn(&mut Suite) -> Check); 18] = [
        (1, "greens-identity", 1.0, Suite::greens_identity),
        (2, "class-c-certification", 1.0, Suite::class_c),
        (3, "unstable-mode-scan", 120.0, Suite::mode_scan),
        (4, "cross-solver-identity", 60.0, Suite::cross_solver),
        (5, "tail-law", 10.0, Suite::tail_law),
        (6, "moment-consistency", 10.0, Suite::moments),
        (7, "hs-scaling", 30.0, Suite::hs_scaling),
        (8, "kappa-continuation", 120.0, Suite::kappa),
        (9, "time-maps", 1.0, Suite::time_maps),
        (10, "ansatz-exactness", 300.0, Suite::ansatz),
        (11, "linear-growth", 180.0, Suite::linear_growth),
        (12, "nonlinear-closeness", 300.0, Suite::closeness),
        (13, "lorentz-equivalence", 10.0, Suite::lorentz),
        (14, "transport-bound", 180.0, Suite::transport),
        (15, "forcing-limit", 60.0, Suite::forcing_limit),
        (16, "exact-radial-solution", 30.0, Suite::radial_solution),
        (17, "nonuniqueness-signature", 900.0, Suite::nonuniqueness),
        (18, "symmetry-conservation", 1.0, Suite::symmetry_conservation),
    ];
    let mut out = Vec::with_capacity(checks.len());
    for (id, name, budget, check) in checks {
        let start = Instant::now();
        let (passed, detail) = match check(&mut suite) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let outcome = Outcome {
            id,
            name: name.to_string(),
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
            budget,
        };
        report(&outcome);
        out.push(outcome);
    }
    Ok(out)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

impl Suite {
    fn greens_identity(&mut self) -> Check {
        let h: f64 = 5e-3;
        let t: Vec<f64> = linspace(-12.0, 12.0, (24.0 / h).round() as usize + 1);
        let forcings: [(f64, fn(f64) -> f64); 5] = [
            (2.0, |x| (-x * x).exp()),
            (3.0, |x| (-(x - 1.5).powi(2) / 0.3).exp()),
            (2.0, |x| (-x * x / 2.0).exp() * (3.0 * x).cos()),
            (4.0, |x| 1.0 / x.cosh().powi(2)),
            (5.0, |x| if x.abs() < 2.0 { (-1.0 / (1.0 - x * x / 4.0)).exp() } else { 0.0 }),
        ];
        let mut worst: f64 = 0.0;
        for (m, f) in forcings {
            let fv: Vec<f64> = t.iter().map(|&x| f(x)).collect();
            let psi = greens_apply(m, h, &fv)?;
            let lf = vortexlab::spectral::greens::helmholtz_apply(m, h, &psi);
            let scale = fv.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let err = (1..t.len() - 1).map(|i| (lf[i] - fv[i]).abs()).fold(0.0, f64::max);
            worst = worst.max(err / scale);
        }
        Ok((worst < 1e-4, format!("max relative defect {worst:.2e} (< 1e-4)")))
    }

    fn class_c(&mut self) -> Check {
        let r = verify_class_c(&self.lab.profile);
        Ok((
            r.passed() && r.cumulative_max < 0.0,
            format!(
                "items {}/{}/{}, cumulative margin max {:.3e} (< 0)",
                r.item_i, r.item_ii, r.item_iii, r.cumulative_max
            ),
        ))
    }

    fn mode_scan(&mut self) -> Check {
        let profile = &self.lab.profile;
        let grid = SpectralGrid::for_profile(profile, self.options.spectral_n);
        let wider = grid.extended(2.0);
        let mut found = Vec::new();
        let mut all_good = true;
        let mut rows = Vec::new();
        for &m in &self.options.scan_m {
            let modes = match unstable_spectrum(profile, m, &grid) {
                Ok(v) => v,
                Err(e) => {
                    rows.push(format!("m={m}: {e}"));
                    continue;
                }
            };
            for md in modes.into_iter().filter(|md| md.mu.im > 1e-4) {
                let (ext, _) = eigenvalue_drift(profile, m, &wider, md.mu)?;
                let good = md.residual_pencil < 1e-5
                    && md.residual_integral < 1e-5
                    && md.refinement_drift < 1e-3
                    && ext < 1e-3;
                all_good &= good;
                rows.push(format!(
                    "m={m} mu={:.5}{:+.5}i res {:.1e}/{:.1e} drift {:.1e}/{:.1e}",
                    md.mu.re, md.mu.im, md.residual_pencil, md.residual_integral, md.refinement_drift, ext
                ));
                found.push(md);
            }
        }
        let passed = !found.is_empty() && all_good;
        self.scan = found;
        Ok((passed, format!("{} mode(s): {}", self.scan.len(), rows.join("; "))))
    }

    fn reference_mode(&self) -> &EigenMode {
        let m = self.lab.config.m;
        self.scan.iter().find(|md| md.m == m).unwrap_or(&self.lab.pencil_mode)
    }

    fn cross_solver(&mut self) -> Check {
        let md = self.reference_mode();
        let grid = SpectralGrid::for_profile(&self.lab.profile, self.lab.config.operator_n);
        let mat = assemble_mode_operator(&self.lab.profile, md.m, 1, 0.0, 0.0, &grid)?;
        let (lam, _) = inverse_iteration(&mat, md.lambda, None)?;
        let err = (lam - md.lambda).norm() / md.lambda.norm();
        Ok((
            err < 1e-3,
            format!(
                "operator {:.5}{:+.5}i vs -i m mu {:.5}{:+.5}i, relative {err:.2e} (< 1e-3)",
                lam.re, lam.im, md.lambda.re, md.lambda.im
            ),
        ))
    }

    fn tail_law(&mut self) -> Check {
        let md = self.reference_mode();
        let slope = tail_slope(&md.grid, &md.g)?;
        let expect = -(md.m as f64 + self.lab.profile.alpha() + 2.0);
        let err = rel(slope, expect);
        Ok((err < 0.05, format!("slope {slope:.4} vs {expect:.4}, relative {err:.2e} (< 5e-2)")))
    }

    fn moments(&mut self) -> Check {
        let alpha = self.lab.profile.alpha();
        let md = self.reference_mode();
        let mu_moment = moment_functional(&md.grid, &md.g, md.m as i64, alpha, MomentVariant::Plain, MomentTail::PowerLaw)?;
        let err = (mu_moment - md.mu).norm() / md.mu.norm();
        let mut smallest = f64::INFINITY;
        let mut modes: Vec<&EigenMode> = self.scan.iter().collect();
        if modes.is_empty() {
            modes.push(&self.lab.pencil_mode);
        }
        for md in modes {
            let tail = match md.normalization {
                Normalization::Tail { .. } => MomentTail::PowerLaw,
                Normalization::UnitL2 => MomentTail::Truncated,
            };
            let p = moment_integral(&md.grid, &md.g, md.m as i64, alpha, tail)?;
            let gnorm = (md.g.iter().map(|v| v.norm_sqr()).sum::<f64>() * md.grid.h()).sqrt();
            smallest = smallest.min(p.norm() / gnorm);
        }
        Ok((
            err <= 0.05 && smallest >= 1e-6,
            format!("moment vs mu relative {err:.2e} (<= 5e-2); smallest |moment|/|g| {smallest:.2e} (>= 1e-6)"),
        ))
    }

    fn hs_scaling(&mut self) -> Check {
        let m = self.lab.config.m;
        let grid = SpectralGrid::for_profile(&self.lab.profile, self.options.spectral_n);
        let mut values = Vec::new();
        for l in 1..=8i64 {
            let hs = hs_norm_a_l(&self.lab.profile, m, l, &grid)?;
            values.push(hs * hs * (m as f64 * l as f64));
        }
        let worst = values.iter().map(|v| (v / values[0]).max(values[0] / v)).fold(1.0, f64::max);
        Ok((worst <= 3.0, format!("hs^2 |ml| spread over l = 1..8 is a factor {worst:.3} (<= 3)")))
    }

    fn kappa(&mut self) -> Check {
        let md = self.lab.pencil_mode.clone();
        let grid = SpectralGrid::for_profile(&self.lab.profile, self.lab.config.operator_n);
        let kappas = [0.1, 0.05, 0.025];
        let tr = kappa_continuation(&self.lab.profile, md.m, 1, &kappas, &grid, md.lambda)?;
        let d: Vec<f64> = tr.points.iter().map(|p| (p.lambda - tr.lambda0).norm()).collect();
        let decreasing = d.windows(2).all(|w| w[1] < w[0]);
        let last = d[d.len() - 1] / tr.lambda0.norm();
        Ok((
            decreasing && last < 0.05,
            format!(
                "|lambda_k - lambda_0| = {:.3e}, {:.3e}, {:.3e}; last relative {last:.2e} (< 5e-2)",
                d[0], d[1], d[2]
            ),
        ))
    }

    fn time_maps(&mut self) -> Check {
        let fam = self.lab.family;
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let t: f64 = self.rng.random_range(0.0..10.0);
            let (r, tau) = fam.time_maps(t);
            worst = worst.max((r - fam.r_of_tau(tau)).abs());
        }
        Ok((worst < 1e-12, format!("max |R - e^(gamma tau)| = {worst:.2e} (< 1e-12)")))
    }

    fn ansatz(&mut self) -> Check {
        let lab = &self.lab;
        let coarse = AnsatzCheck::default();
        let fine = AnsatzCheck {
            n: 2 * coarse.n,
            dtau: coarse.dtau / 2.0,
            snapshot_every: 2 * coarse.snapshot_every,
            ..coarse.clone()
        };
        let a = ansatz_weak_residual(&coarse, &lab.family, &lab.profile, &lab.mode)?;
        let b = ansatz_weak_residual(&fine, &lab.family, &lab.profile, &lab.mode)?;
        for (name, r) in [("ansatz n=256", &a), ("ansatz n=512", &b)] {
            self.health.push(RunHealth {
                run: name.into(),
                integral_drift: r.integral_drift,
                symmetry_defect: r.max_symmetry_defect,
            });
        }
        let ratio = a.weak.residual / b.weak.residual;
        Ok((
            a.weak.residual < 5e-3 && ratio >= 3.0,
            format!(
                "residual {:.2e} at n={} (< 5e-3), {:.2e} at n={}, improvement {ratio:.2} (>= 3)",
                a.weak.residual, coarse.n, b.weak.residual, fine.n
            ),
        ))
    }

    fn linear_growth(&mut self) -> Check {
        let lab = &self.lab;
        let sigma0 = mode_field(&lab.mode, Complex64::new(1e-3, 0.0), lab.config.n, lab.config.half_width);
        let config = EvolutionConfig {
            variant: Variant::Linearized,
            dtau: 2.5e-3,
            record_every: 5,
            snapshot_every: Some(20),
            ..EvolutionConfig::default()
        };
        let tr = evolve(&sigma0, &config, &lab.family, &lab.profile, 4.0)?;
        self.health.push(RunHealth {
            run: "linearized growth".into(),
            integral_drift: tr.integral_drift,
            symmetry_defect: tr.max_symmetry_defect,
        });
        let rate = growth_rate_fit(&tr.series(|r| r.l2), (1.0, 4.0))?.slope;
        let phase: Vec<(f64, f64)> = mode_phase_series(&tr.snapshots, &lab.mode)
            .into_iter()
            .filter(|p| p.0 >= 1.0)
            .collect();
        let freq = fit_line(&phase)?.slope;
        let lambda = lab.mode.lambda;
        let (er, ei) = (rel(rate, lambda.re), rel(freq, lambda.im));
        Ok((
            er <= 0.05 && ei <= 0.05,
            format!(
                "rate {rate:.4} vs {:.4} ({er:.2e}), frequency {freq:.4} vs {:.4} ({ei:.2e}), both <= 5e-2",
                lambda.re, lambda.im
            ),
        ))
    }

    fn closeness(&mut self) -> Check {
        let lab = &self.lab;
        let fam = lab.family.with_epsilon(1e-3)?;
        if !(fam.t_star > 0.0) {
            return Ok((false, format!("T_* = {:.3} leaves no window", fam.t_star)));
        }
        let c = lab.mode.amplitude(&fam);
        let sigma0 = mode_field(&lab.mode, c, lab.config.n, lab.config.half_width);
        let config = |variant| EvolutionConfig {
            variant,
            dtau: 2.5e-3,
            record_every: 20,
            snapshot_every: Some(20),
            q_list: vec![lab.config.q],
            ..EvolutionConfig::default()
        };
        let a = evolve(&sigma0, &config(Variant::CutoffV1), &fam, &lab.profile, fam.t_star)?;
        let b = evolve(&sigma0, &config(Variant::Linearized), &fam, &lab.profile, fam.t_star)?;
        for (name, t) in [("closeness cutoff", &a), ("closeness linearized", &b)] {
            self.health.push(RunHealth {
                run: name.into(),
                integral_drift: t.integral_drift,
                symmetry_defect: t.max_symmetry_defect,
            });
        }
        let gap = linear_gap(&a, &b, lab.config.q)?;
        let worst = gap.iter().map(|g| g.ratio).fold(0.0, f64::max);
        Ok((
            worst <= 0.2,
            format!("max gap ratio {worst:.3e} over tau in [0, {:.3}] (<= 0.2)", fam.t_star),
        ))
    }

    fn lorentz(&mut self) -> Check {
        let q = 2.0;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..100 {
            let cells = self.rng.random_range(16..600);
            let area = self.rng.random_range(1e-3..1.0);
            let values: Vec<f64> = (0..cells)
                .map(|_| {
                    if self.rng.random_bool(0.2) {
                        0.0
                    } else {
                        let mag = 2f64.powf(self.rng.random_range(-12.0..12.0));
                        if self.rng.random_bool(0.5) { mag } else { -mag }
                    }
                })
                .collect();
            let r = lorentz_norm_integral(&values, area, q) / lorentz_norm_dyadic(&values, area, q);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let mut indicator_err: f64 = 0.0;
        for k in [1usize, 7, 64, 333] {
            let area = 0.01;
            let mut values = vec![0.0; 2 * k];
            values[..k].iter_mut().for_each(|v| *v = 1.0);
            let exact = 4.0 * (k as f64 * area).sqrt();
            indicator_err = indicator_err.max(rel(lorentz_norm_integral(&values, area, q), exact));
        }
        Ok((
            lo >= 1.0 && hi <= 8.0 && indicator_err < 1e-12,
            format!("ratio in [{lo:.3}, {hi:.3}] (within [1, 8]); indicator relative error {indicator_err:.1e}"),
        ))
    }

    fn transport(&mut self) -> Check {
        let lab = &self.lab;
        let r = transport_bound(&TransportCheck::default(), &lab.family, &lab.profile, &lab.mode)?;
        Ok((
            r.worst_ratio <= 1.01,
            format!("max ||omega||_Q / bound = {:.4} for Q in {{2, 3}} (<= 1.01)", r.worst_ratio),
        ))
    }

    fn forcing_limit(&mut self) -> Check {
        let lab = &self.lab;
        let q = lab.config.q;
        let mut diffs = Vec::new();
        let mut sizes = Vec::new();
        for eps in [0.1, 0.05, 0.025] {
            let fam = lab.family.with_epsilon(eps)?;
            diffs.push(forcing_time_integral(&lab.profile, &fam, fam.c4, q, 1.0, true)?);
            sizes.push(forcing_time_integral(&lab.profile, &fam, fam.c4, q, 1.0, false)?);
        }
        let ratios: Vec<f64> = diffs.windows(2).map(|w| w[0] / w[1]).collect();
        let spread = sizes.iter().fold(0.0f64, |a, &v| a.max(v)) / sizes.iter().fold(f64::INFINITY, |a, &v| a.min(v));
        Ok((
            ratios.iter().all(|&r| r >= 1.5) && spread <= 2.0,
            format!(
                "Q = {q}: difference ratios {:.3}, {:.3} (>= 1.5); size spread {spread:.3} (<= 2)",
                ratios[0], ratios[1]
            ),
        ))
    }

    fn radial_solution(&mut self) -> Check {
        let lab = &self.lab;
        let fam = lab.family;
        let mut structural: f64 = 0.0;
        let mut forcing: f64 = 0.0;
        let mut difference: f64 = 0.0;
        for _ in 0..200 {
            let r = 10f64.powf(self.rng.random_range(-2.0..1.6));
            let th = self.rng.random_range(0.0..std::f64::consts::TAU);
            let x = [r * th.cos(), r * th.sin()];
            let t = self.rng.random_range(0.05..1.0);
            let (_, v) = exact_radial_solution(&fam, &lab.profile, x, t)?;
            let speed = v[0].hypot(v[1]);
            if speed > 0.0 {
                structural = structural.max((v[0] * x[0] + v[1] * x[1]).abs() / (speed * r));
            }
            let z = Layer::limit(&fam, t)?.forcing(&lab.profile, fam.c4, fam.gamma, x);
            forcing = forcing.max((exact_radial_solution_dt(&fam, &lab.profile, x, t)? - z).abs());
            let h = 1e-5 * t;
            let w = |t: f64| exact_radial_solution(&fam, &lab.profile, x, t).map(|s| s.0);
            let fd = (w(t + h)? - w(t - h)?) / (2.0 * h);
            difference = difference.max((fd - z).abs() / z.abs().max(1.0));
        }
        let sol = RadialSolution {
            profile: &lab.profile,
            family: fam,
            limit: true,
        };
        let tests = TestFunction::random_family(&mut self.rng, 8, 1.0, (0.15, 0.4), 1.0);
        let weak = weak_residual_analytic(&sol, &tests, &AnalyticQuadrature::default())?.residual;
        Ok((
            structural < 1e-12 && forcing < 1e-6 && difference < 1e-4 && weak < 1e-4,
            format!(
                "radial transport {structural:.1e}; max |d_t omega - Z| {forcing:.2e} (< 1e-6), \
                 difference quotient {difference:.1e} (< 1e-4 relative); weak residual {weak:.2e} (< 1e-4)"
            ),
        ))
    }

    fn nonuniqueness(&mut self) -> Check {
        let lab = &self.lab;
        let config = NonuniqConfig {
            q: lab.config.q,
            n: lab.config.n,
            half_width: lab.config.half_width,
            seed: self.options.seed,
            jobs: self.options.jobs,
            ..NonuniqConfig::default()
        };
        let rep = nonuniqueness_experiment(&config, &lab.family, &lab.profile, &lab.mode)?;
        for r in &rep.rows {
            self.health.push(RunHealth {
                run: format!("nonuniq eps={}", r.epsilon),
                integral_drift: r.integral_drift,
                symmetry_defect: r.max_symmetry_defect,
            });
        }
        let slope_err = rel(rep.initial_slope, rep.expected_slope);
        let not_decreasing = rep.final_distances.windows(2).all(|w| w[1] >= w[0]);
        let growth = config
            .ladder
            .iter()
            .position(|&e| e == 0.05)
            .and_then(|i| rep.nonradial_growth.get(i).copied())
            .unwrap_or(f64::NAN);
        let d = &rep.final_distances;
        Ok((
            slope_err <= 0.15 && not_decreasing && growth > 10.0,
            format!(
                "slope {:.4} vs {:.4} ({slope_err:.2e}, <= 0.15); distances at t=1 {:.3}, {:.3}, {:.3} (non-decreasing required: {}); non-radial growth {growth:.1} at eps=0.05 (> 10)",
                rep.initial_slope,
                rep.expected_slope,
                d[0],
                d[1],
                d[2],
                if not_decreasing { "holds" } else { "violated" }
            ),
        ))
    }

    fn symmetry_conservation(&mut self) -> Check {
        if self.health.is_empty() {
            return Ok((false, "no dynamics run completed".into()));
        }
        let drift = self.health.iter().map(|h| h.integral_drift).fold(0.0, f64::max);
        let sym = self.health.iter().map(|h| h.symmetry_defect).fold(0.0, f64::max);
        Ok((
            drift < 1e-10 && sym < 1e-8,
            format!(
                "{} runs: max integral drift {drift:.1e} (< 1e-10), max symmetry defect {sym:.1e} (< 1e-8)",
                self.health.len()
            ),
        ))
    }
}
