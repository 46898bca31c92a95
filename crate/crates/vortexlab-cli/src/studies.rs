//! The subcommands. Each study writes its artifacts into one run directory
//! and finishes with `manifest.json`, so a directory without a manifest is an
//! interrupted run.

use crate::acceptance::{run_suite, Outcome, SuiteOptions};
use crate::config::ExperimentConfig;
use crate::error::{CliError, Stage};
use crate::plot::Plot;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write;
use std::path::{Path, PathBuf};
use vortexlab::dynamics::{evolve, mode_field, nonuniqueness_experiment, Field2D};
use vortexlab::spectral::{unstable_spectrum, EigenMode, SpectralGrid};
use vortexlab::{build_class_c_profile, verify_class_c, Lab, RadialVortexProfile};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    pub config: ExperimentConfig,
    /// Paths relative to the run directory.
    pub files: Vec<String>,
}

pub struct RunDir {
    root: PathBuf,
    files: Vec<String>,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).stage("output directory")?;
        Ok(RunDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&mut self, name: &str) -> Result<PathBuf, CliError> {
        let p = self.root.join(name);
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir).stage("output directory")?;
        }
        Ok(p)
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let p = self.path(name)?;
        std::fs::write(p, contents).stage("write")?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).stage("write")?;
        self.text(name, &(text + "\n"))
    }

    /// `<stem>.f64` with the JSON header `<stem>.json`.
    pub fn f64_array<H: Serialize>(&mut self, stem: &str, values: &[f64], header: &H) -> Result<(), CliError> {
        let p = self.path(stem)?;
        vortexlab::io::write_f64_with_header(&p, values, header).stage("write")?;
        self.files.push(format!("{stem}.f64"));
        self.files.push(format!("{stem}.json"));
        Ok(())
    }

    pub fn dump(&mut self, stem: &str, field: &Field2D) -> Result<(), CliError> {
        let p = self.path(stem)?;
        field.write_dump(&p).stage("write")?;
        self.files.push(format!("{stem}.f64"));
        self.files.push(format!("{stem}.json"));
        Ok(())
    }

    pub fn finish(self, subcommand: &str, config: &ExperimentConfig) -> Result<PathBuf, CliError> {
        let manifest = Manifest {
            subcommand: subcommand.into(),
            config: config.clone(),
            files: self.files,
        };
        let text = serde_json::to_string_pretty(&manifest).stage("write")?;
        std::fs::write(self.root.join(MANIFEST), text + "\n").stage("write")?;
        Ok(self.root)
    }
}

fn profile_plot(profile: &RadialVortexProfile) -> (String, String) {
    let mut csv = String::from("s,vorticity,angular_velocity\n");
    let mut pts = Vec::new();
    for t in profile.sample_log_grid() {
        let s = t.exp();
        let (g, w) = (profile.vorticity(s), profile.angular_velocity(s));
        let _ = writeln!(csv, "{s:.17e},{g:.17e},{w:.17e}");
        pts.push((s, g));
    }
    let svg = Plot::new("background vorticity", "s", "G(s)").log_x().series("G", pts).to_svg();
    (csv, svg)
}

pub fn profile_build(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf, CliError> {
    let profile = build_class_c_profile(cfg.lab.profile).stage("profile")?;
    let report = verify_class_c(&profile);
    let mut dir = RunDir::create(out)?;
    let p = dir.path("profile.json")?;
    profile.write_with_sidecar(&p).stage("write")?;
    dir.files.push("profile.json".into());
    dir.files.push("profile.f64".into());
    dir.json("class_c.json", &report)?;
    let (csv, svg) = profile_plot(&profile);
    dir.text("profile.csv", &csv)?;
    dir.text("profile.svg", &svg)?;
    let root = dir.finish("profile build", cfg)?;
    if !report.passed() {
        return Err(CliError::numerical(
            "verify",
            report.first_failure.unwrap_or_else(|| "class C check failed".into()),
        ));
    }
    Ok(root)
}

pub fn profile_verify(cfg: &ExperimentConfig, profile_path: &Path, out: &Path) -> Result<PathBuf, CliError> {
    let text = std::fs::read_to_string(profile_path)
        .map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", profile_path.display())))?;
    let profile = RadialVortexProfile::from_json(&text, profile_path.parent()).stage("profile read")?;
    let report = verify_class_c(&profile);
    let mut dir = RunDir::create(out)?;
    dir.json("class_c.json", &report)?;
    let root = dir.finish("profile verify", cfg)?;
    if !report.passed() {
        return Err(CliError::numerical(
            "verify",
            report.first_failure.unwrap_or_else(|| "class C check failed".into()),
        ));
    }
    Ok(root)
}

/// Runs `job` on every item with up to `jobs` worker threads, keeping the input order.
fn fan_out<I: Sync, R: Send>(items: &[I], jobs: usize, job: impl Fn(&I) -> R + Sync) -> Vec<R> {
    let jobs = jobs.clamp(1, items.len().max(1));
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|w| {
                let job = &job;
                scope.spawn(move || {
                    (w..items.len())
                        .step_by(jobs)
                        .map(|k| (k, job(&items[k])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (k, r) in h.join().expect("worker panicked") {
                slots[k] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.unwrap()).collect()
}

#[derive(Serialize)]
struct ModeHeader<'a> {
    m: usize,
    l: i64,
    mu: [f64; 2],
    n: usize,
    t_min: f64,
    t_max: f64,
    /// Interleaved `(Re g, Im g)` on the log radius nodes.
    layout: &'a str,
}

pub fn spectrum(cfg: &ExperimentConfig, jobs: usize, out: &Path) -> Result<PathBuf, CliError> {
    let profile = build_class_c_profile(cfg.lab.profile).stage("profile")?;
    let grid = SpectralGrid::for_profile(&profile, cfg.spectral_n);
    let results = fan_out(&cfg.scan_m, jobs, |&m| unstable_spectrum(&profile, m, &grid));
    let mut modes: Vec<EigenMode> = Vec::new();
    for (m, r) in cfg.scan_m.iter().zip(results) {
        modes.extend(r.stage(&format!("spectrum m={m}"))?);
    }
    let mut dir = RunDir::create(out)?;
    let mut csv = String::from("m,l,gamma,kappa,Re,Im,residual_pencil,residual_integral,n,t_min,t_max\n");
    let mut plot = Plot::new("unstable eigenvalues", "Re mu", "Im mu").markers();
    for (k, md) in modes.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},0,0,{:.17e},{:.17e},{:.6e},{:.6e},{},{:.17e},{:.17e}",
            md.m, md.l, md.mu.re, md.mu.im, md.residual_pencil, md.residual_integral, md.grid.n, md.grid.t_min, md.grid.t_max
        );
        let values: Vec<f64> = md.g.iter().flat_map(|z| [z.re, z.im]).collect();
        let header = ModeHeader {
            m: md.m,
            l: md.l,
            mu: [md.mu.re, md.mu.im],
            n: md.grid.n,
            t_min: md.grid.t_min,
            t_max: md.grid.t_max,
            layout: "interleaved re,im",
        };
        dir.f64_array(&format!("modes/mode_m{}_{k}", md.m), &values, &header)?;
        plot = plot.series(format!("m = {}", md.m), vec![(md.mu.re, md.mu.im)]);
    }
    dir.text("spectrum.csv", &csv)?;
    dir.text("spectrum.svg", &plot.to_svg())?;
    dir.finish("spectrum", cfg)
}

fn optional(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.17e}")).unwrap_or_default()
}

/// Constants of the scaling family used by a dynamics run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabSummary {
    pub m: usize,
    pub mu: [f64; 2],
    pub gamma: f64,
    pub lambda: [f64; 2],
    pub rho: f64,
    pub c1: f64,
    pub t_star: f64,
}

impl LabSummary {
    pub fn of(lab: &Lab) -> Self {
        LabSummary {
            m: lab.config.m,
            mu: [lab.pencil_mode.mu.re, lab.pencil_mode.mu.im],
            gamma: lab.family.gamma,
            lambda: [lab.gamma_mode.lambda.re, lab.gamma_mode.lambda.im],
            rho: lab.family.rho,
            c1: lab.family.c1,
            t_star: lab.family.t_star,
        }
    }
}

pub fn evolve_study(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf, CliError> {
    let lab = Lab::build(cfg.lab.clone()).stage("lab")?;
    cfg.check_support(&lab, &[lab.family.epsilon], lab.family.t_of_tau(cfg.tau_end))?;
    let sigma0 = mode_field(&lab.mode, Complex64::new(cfg.amplitude, 0.0), lab.config.n, lab.config.half_width);
    let mut ev = cfg.evolution.clone();
    ev.q_list = cfg.q_list.clone();
    let tr = evolve(&sigma0, &ev, &lab.family, &lab.profile, cfg.tau_end).stage("evolve")?;
    let mut dir = RunDir::create(out)?;
    dir.json("lab.json", &LabSummary::of(&lab))?;
    dir.text("norms.csv", &tr.to_csv())?;
    dir.dump("snapshots/initial", &sigma0)?;
    for (k, s) in tr.snapshots.iter().enumerate() {
        dir.dump(&format!("snapshots/sigma_{k:04}"), s)?;
    }
    dir.dump("snapshots/final", &tr.final_state)?;
    let mut plot = Plot::new(&format!("{:?} evolution", ev.variant), "tau", "norm")
        .log_y()
        .series("L2", tr.series(|r| r.l2));
    for (k, q) in ev.q_list.iter().enumerate() {
        plot = plot.series(format!("L{q}"), tr.series(|r| r.lq[k]));
    }
    dir.text("norms.svg", &plot.to_svg())?;
    dir.finish("evolve", cfg)
}

pub fn nonuniq_study(cfg: &ExperimentConfig, jobs: usize, out: &Path) -> Result<PathBuf, CliError> {
    let lab = Lab::build(cfg.lab.clone()).stage("lab")?;
    let mut nu = cfg.nonuniq.clone();
    nu.seed = cfg.seed;
    nu.jobs = jobs;
    cfg.check_support(&lab, &nu.ladder, nu.t_final)?;
    let rep = nonuniqueness_experiment(&nu, &lab.family, &lab.profile, &lab.mode).stage("nonuniq")?;
    let mut dir = RunDir::create(out)?;
    dir.json("lab.json", &LabSummary::of(&lab))?;
    dir.json("nonuniq.json", &rep)?;
    let mut ladder =
        String::from("epsilon,initial_distance,weak_residual_a,weak_residual_b,integral_drift,max_symmetry_defect,tau_final\n");
    let mut points = String::from("epsilon,t,tau,distance,nonradial_fraction,prediction_norm,prediction_gap\n");
    let mut fraction = Plot::new("non-radial fraction of run B", "t", "fraction").log_y();
    let mut distance = Plot::new("distance between runs A and B", "t", "L^Q distance").log_y();
    for r in &rep.rows {
        let _ = writeln!(
            ladder,
            "{},{:.17e},{:.6e},{:.6e},{:.6e},{:.6e},{:.17e}",
            r.epsilon, r.initial_distance, r.weak_residual_a, r.weak_residual_b, r.integral_drift, r.max_symmetry_defect, r.tau_final
        );
        for p in &r.points {
            let _ = writeln!(
                points,
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{},{}",
                r.epsilon,
                p.t,
                p.tau,
                p.distance,
                p.nonradial_fraction,
                optional(p.prediction_norm),
                optional(p.prediction_gap)
            );
        }
        let label = format!("eps = {}", r.epsilon);
        fraction = fraction.series(&label, r.points.iter().map(|p| (p.t, p.nonradial_fraction)).collect());
        distance = distance.series(&label, r.points.iter().map(|p| (p.t, p.distance)).collect());
    }
    dir.text("ladder.csv", &ladder)?;
    dir.text("points.csv", &points)?;
    dir.text("nonradial_fraction.svg", &fraction.to_svg())?;
    dir.text("distance.svg", &distance.to_svg())?;
    dir.finish("nonuniq", cfg)
}

pub fn acceptance_study(
    cfg: &ExperimentConfig,
    jobs: usize,
    out: &Path,
    mut report: impl FnMut(&Outcome),
) -> Result<PathBuf, CliError> {
    let options = SuiteOptions {
        lab: cfg.lab.clone(),
        spectral_n: cfg.spectral_n,
        scan_m: cfg.scan_m.clone(),
        seed: cfg.seed,
        jobs,
    };
    let outcomes = run_suite(&options, &mut report).stage("acceptance setup")?;
    let mut dir = RunDir::create(out)?;
    dir.json("acceptance.json", &outcomes)?;
    let table: String = outcomes.iter().map(|o| o.line() + "\n").collect();
    dir.text("acceptance.txt", &table)?;
    let root = dir.finish("acceptance", cfg)?;
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    if failed.is_empty() {
        Ok(root)
    } else {
        Err(CliError::numerical("acceptance", format!("criteria {} failed", failed.join(", "))))
    }
}
