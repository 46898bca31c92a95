use crate::error::{Error, Result};
use crate::profiles::RadialVortexProfile;
use crate::quadrature::linspace;
use serde::{Deserialize, Serialize};

/// Uniform grid on a truncated log radius window `[t_min, t_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl SpectralGrid {
    pub fn new(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_max > t_min) || n < 3 {
            return Err(Error::InvalidParams(format!(
                "grid needs t_min < t_max and n >= 3, got [{t_min}, {t_max}] with n = {n}"
            )));
        }
        Ok(SpectralGrid { t_min, t_max, n })
    }

    /// Window `[log M1 - 6, log M + 6]` with `n` points.
    pub fn for_profile(profile: &RadialVortexProfile, n: usize) -> Self {
        SpectralGrid {
            t_min: profile.m_inner().ln() - 6.0,
            t_max: profile.m_outer().ln() + 6.0,
            n,
        }
    }

    pub fn h(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.n)
    }

    /// Same window with the spacing halved; the old nodes are kept.
    pub fn refined(&self) -> Self {
        SpectralGrid {
            n: 2 * self.n - 1,
            ..*self
        }
    }

    /// Window extended to the right by about `extra` at unchanged spacing.
    pub fn extended(&self, extra: f64) -> Self {
        let h = self.h();
        let steps = (extra / h).round() as usize;
        SpectralGrid {
            t_max: self.t_max + steps as f64 * h,
            n: self.n + steps,
            ..*self
        }
    }

    /// Checks that the window holds both zeros of `A` with margin and that
    /// the grid is fine enough for dense counting.
    pub fn check_window(&self, profile: &RadialVortexProfile) -> Result<()> {
        let lo = profile.m_inner().ln() - 4.0;
        let hi = profile.m_outer().ln() + 4.0;
        if !(self.t_min < lo && self.t_max > hi) {
            return Err(Error::WindowTooSmall(format!(
                "[{}, {}] must contain [{lo}, {hi}]",
                self.t_min, self.t_max
            )));
        }
        if self.n < 512 {
            return Err(Error::WindowTooSmall(format!(
                "n = {} is below the minimum of 512",
                self.n
            )));
        }
        Ok(())
    }
}
