//! Noise channels, density-matrix simulation and randomized benchmarking.

mod channel;
mod clifford;
mod density;
mod fit;
mod rb;

pub use channel::{amplitude_damping, depolarizing_1q, paulis, phase_damping, thermal_channel, Kraus1};
pub use clifford::{
    is_clifford, one_qubit_cliffords, random_clifford2, CliffordClass, CliffordElement, CliffordTable,
};
pub use density::{
    average_gate_error, sample_counts, simulate_density, simulate_segments, DensityMatrix,
    MAX_DENSITY_WIRES,
};
pub use fit::{fit_decay, DecayFit};
pub use rb::{
    calibrate_depol_2q, irb_gate_error, rb_sequences, run_irb_experiment, standard_swap_error, IrbConfig, IrbResult,
    RbSequence, SurvivalRow,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Pulse- and time-attached noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Depolarizing probability after each `Rx`/`Ry` pulse.
    pub depol_1q: f64,
    /// Two-qubit depolarizing probability after each CR.
    pub depol_2q: f64,
    /// Relaxation on every wire for each moment's duration.
    pub thermal: bool,
    /// Sample this many shots instead of using exact probabilities.
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseModel {
    pub fn ideal() -> Self {
        NoiseModel {
            depol_1q: 0.0,
            depol_2q: 0.0,
            thermal: false,
            shots: None,
            seed: 0,
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.depol_1q == 0.0 && self.depol_2q == 0.0 && !self.thermal
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("depol_1q", self.depol_1q), ("depol_2q", self.depol_2q)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Invalid(format!("{name} = {p} is not a probability")));
            }
        }
        if self.shots == Some(0) {
            return Err(Error::Invalid("shots must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let n: NoiseModel = serde_path_to_error::deserialize(de).map_err(|e| {
            Error::Invalid(format!("noise schema violation at `{}`: {}", e.path(), e.inner()))
        })?;
        n.validate()?;
        Ok(n)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
