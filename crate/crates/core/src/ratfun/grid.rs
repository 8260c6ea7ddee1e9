use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Log,
    Linear,
}

/// Strictly increasing, nonnegative frequencies in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
    scale: GridScale,
}

impl FrequencyGrid {
    pub fn new(omegas: Vec<f64>, scale: GridScale) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidArgument("frequency grid is empty".into()));
        }
        if omegas.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument("frequencies must be finite and nonnegative".into()));
        }
        if omegas.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidArgument("frequencies must be strictly increasing".into()));
        }
        Ok(Self { omegas, scale })
    }

    /// Log-spaced grid with `points_per_decade` intervals per decade, endpoints included.
    pub fn log(omega_min: f64, omega_max: f64, points_per_decade: usize) -> Result<Self> {
        if !(omega_min > 0.0 && omega_max > omega_min) {
            return Err(Error::InvalidArgument(format!(
                "log grid needs 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]"
            )));
        }
        if points_per_decade == 0 {
            return Err(Error::InvalidArgument("points per decade must be at least 1".into()));
        }
        let (lo, hi) = (omega_min.log10(), omega_max.log10());
        let intervals = (((hi - lo) * points_per_decade as f64).ceil() as usize).max(1);
        let omegas = (0..=intervals)
            .map(|k| {
                if k == intervals {
                    omega_max
                } else if k == 0 {
                    omega_min
                } else {
                    10f64.powf(lo + (hi - lo) * k as f64 / intervals as f64)
                }
            })
            .collect();
        Self::new(omegas, GridScale::Log)
    }

    /// `count` log-spaced frequencies, endpoints included.
    pub fn log_count(omega_min: f64, omega_max: f64, count: usize) -> Result<Self> {
        if count < 2 || !(omega_min > 0.0 && omega_max > omega_min) {
            return Err(Error::InvalidArgument(
                "log grid needs count >= 2 and 0 < omega_min < omega_max".into(),
            ));
        }
        let (lo, hi) = (omega_min.ln(), omega_max.ln());
        let omegas = (0..count)
            .map(|k| match k {
                0 => omega_min,
                k if k + 1 == count => omega_max,
                k => (lo + (hi - lo) * k as f64 / (count - 1) as f64).exp(),
            })
            .collect();
        Self::new(omegas, GridScale::Log)
    }

    pub fn linear(omega_min: f64, omega_max: f64, count: usize) -> Result<Self> {
        if count < 2 || !(omega_max > omega_min) {
            return Err(Error::InvalidArgument("linear grid needs count >= 2 and omega_max > omega_min".into()));
        }
        let step = (omega_max - omega_min) / (count - 1) as f64;
        let omegas = (0..count)
            .map(|k| if k + 1 == count { omega_max } else { omega_min + step * k as f64 })
            .collect();
        Self::new(omegas, GridScale::Linear)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn scale(&self) -> GridScale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn max(&self) -> f64 {
        *self.omegas.last().unwrap()
    }
}
