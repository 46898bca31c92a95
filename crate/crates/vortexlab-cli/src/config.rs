//! The experiment configuration shared by every subcommand.
//!
//! Every field has a default, so `{}` is a valid config. Unknown keys are
//! rejected.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use vortexlab::dynamics::{EvolutionConfig, NonuniqConfig, Variant};
use vortexlab::scaling::Layer;
use vortexlab::{Lab, LabConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Profile, mode number, spectral grids and scaling family parameters.
    pub lab: LabConfig,
    /// Pencil nodes used by `spectrum`.
    pub spectral_n: usize,
    pub scan_m: Vec<usize>,
    /// Stepping of `evolve`.
    pub evolution: EvolutionConfig,
    pub tau_end: f64,
    /// Real amplitude of the mode in the initial `sigma` of `evolve`.
    pub amplitude: f64,
    pub nonuniq: NonuniqConfig,
    /// Exponents of the `L^Q` columns in the norm series.
    pub q_list: Vec<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            lab: LabConfig::default(),
            spectral_n: 2048,
            scan_m: (2..=10).collect(),
            evolution: EvolutionConfig {
                variant: Variant::CutoffV1,
                dtau: 2.5e-3,
                record_every: 4,
                snapshot_every: Some(200),
                ..EvolutionConfig::default()
            },
            tau_end: 2.0,
            amplitude: 1e-3,
            nonuniq: NonuniqConfig::default(),
            q_list: vec![2.0, 3.0],
            seed: 2024,
            out: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that is known before the spectrum is computed.
    pub fn validate(&self) -> Result<(), CliError> {
        self.lab.validate().map_err(|e| invalid(e.to_string()))?;
        let alpha = self.lab.profile.alpha;
        if self.spectral_n < 64 {
            return Err(invalid("spectral_n must be at least 64"));
        }
        if self.scan_m.is_empty() || self.scan_m.iter().any(|&m| m < 2) {
            return Err(invalid("scan_m needs mode numbers >= 2"));
        }
        if !(self.evolution.dtau > 0.0) || !(self.tau_end > 0.0) || self.evolution.record_every == 0 {
            return Err(invalid("evolution needs dtau > 0, tau_end > 0 and record_every >= 1"));
        }
        if !self.amplitude.is_finite() {
            return Err(invalid("amplitude must be finite"));
        }
        if self.q_list.is_empty() || self.q_list.iter().any(|&q| !(q >= 1.0) || !q.is_finite()) {
            return Err(invalid("q_list needs finite exponents >= 1"));
        }
        let nu = &self.nonuniq;
        if !(nu.q > 2.0 && nu.q < 2.0 / alpha) {
            return Err(invalid(format!("nonuniq.q = {} must lie in (2, {})", nu.q, 2.0 / alpha)));
        }
        if nu.ladder.len() < 2 || nu.ladder.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(invalid("nonuniq.ladder needs at least two epsilons in (0, 1]"));
        }
        if !(nu.t_final > 0.0) || nu.report_times.iter().any(|&t| !(0.0..=nu.t_final).contains(&t)) {
            return Err(invalid("nonuniq needs t_final > 0 and report times in [0, t_final]"));
        }
        if nu.n < 16 || !nu.n.is_power_of_two() {
            return Err(invalid("nonuniq.n must be a power of two >= 16"));
        }
        Ok(())
    }

    /// The support condition `c D <= c4 / M` of the rescaled layer at the
    /// physical time `t` for every `eps` in `epsilons`.
    pub fn check_support(&self, lab: &Lab, epsilons: &[f64], t: f64) -> Result<(), CliError> {
        for &eps in epsilons {
            let fam = lab.family.with_epsilon(eps).map_err(|e| invalid(e.to_string()))?;
            Layer::rescaled(&fam, t)
                .check_support(&lab.profile, fam.c4)
                .map_err(|e| invalid(format!("eps = {eps}, t = {t}: {e}")))?;
        }
        Ok(())
    }
}
