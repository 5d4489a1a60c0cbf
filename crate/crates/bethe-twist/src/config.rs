//! Run configuration: JSON model/twist/suite settings with validation.
//!
//! Scalars in config files are exact `"p/q"` strings or float numbers;
//! exact literals coerce to float when the run mode is float, but a float
//! literal in an exact-mode run is rejected rather than silently rounded.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::chain::SpinChainModel;
use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};
use crate::twist::TwistMatrix;

/// Inhomogeneity values used by default and by the `--length` override,
/// taken as prefixes.
pub const DEFAULT_XI_POOL: [(i64, i64); 8] = [
    (0, 1),
    (1, 7),
    (-2, 5),
    (3, 11),
    (5, 13),
    (-7, 17),
    (2, 19),
    (9, 23),
];

/// Returns the first `n` default inhomogeneities as exact scalars.
pub fn default_inhomogeneities(n: usize) -> Vec<Scalar> {
    DEFAULT_XI_POOL
        .iter()
        .take(n)
        .map(|&(p, q)| Scalar::rational(p, q).expect("static pool"))
        .collect()
}

/// Model block of a run configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelConfig {
    pub length: usize,
    pub c: Scalar,
    pub inhomogeneities: Vec<Scalar>,
    /// When set, all sites share one inhomogeneity value and the field
    /// above must hold exactly that single value.
    #[serde(default)]
    pub homogeneous: bool,
}

/// Full run configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelConfig,
    /// Twist entries `[[k11, k12], [k21, k22]]`.
    pub twist: [[Scalar; 2]; 2],
    pub mode: Mode,
    pub seed: u64,
    /// Pass threshold for float residuals; exact residuals must be zero.
    pub tolerance: f64,
    /// Random draws per suite check.
    #[serde(default = "default_draws")]
    pub draws: usize,
    /// Creation parameters for solver/expansion commands.
    #[serde(default = "default_magnons")]
    pub magnons: usize,
}

fn default_draws() -> usize {
    3
}

fn default_magnons() -> usize {
    2
}

impl Default for RunConfig {
    fn default() -> Self {
        let one = Scalar::rational(1, 1).expect("static");
        let two = Scalar::rational(2, 1).expect("static");
        RunConfig {
            model: ModelConfig {
                length: 4,
                c: one.clone(),
                inhomogeneities: default_inhomogeneities(4),
                homogeneous: false,
            },
            twist: [[one.clone(), one.clone()], [one, two]],
            mode: Mode::Exact,
            seed: 42,
            tolerance: 1e-10,
            draws: default_draws(),
            magnons: default_magnons(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.check()?;
        Ok(config)
    }

    /// Structural validation with field paths; model/twist invariants are
    /// enforced again by [`RunConfig::build_model`] / [`RunConfig::build_twist`].
    pub fn check(&self) -> Result<()> {
        if self.tolerance <= 0.0 || !self.tolerance.is_finite() {
            return Err(Error::Config(format!(
                "tolerance: must be a positive real, got {}",
                self.tolerance
            )));
        }
        if self.draws == 0 {
            return Err(Error::Config("draws: must be at least 1".into()));
        }
        if self.model.homogeneous && self.model.inhomogeneities.len() != 1 {
            return Err(Error::Config(format!(
                "model.inhomogeneities: homogeneous models take exactly one value, got {}",
                self.model.inhomogeneities.len()
            )));
        }
        if !self.model.homogeneous && self.model.inhomogeneities.len() != self.model.length {
            return Err(Error::Config(format!(
                "model.inhomogeneities: expected {} values for length {}, got {}",
                self.model.length,
                self.model.length,
                self.model.inhomogeneities.len()
            )));
        }
        self.coerce_scalar(&self.model.c, "model.c")?;
        for (k, x) in self.model.inhomogeneities.iter().enumerate() {
            self.coerce_scalar(x, &format!("model.inhomogeneities[{k}]"))?;
        }
        for i in 0..2 {
            for j in 0..2 {
                self.coerce_scalar(&self.twist[i][j], &format!("twist[{i}][{j}]"))?;
            }
        }
        Ok(())
    }

    /// Exact literals pass in both modes (coerced to float on demand); a
    /// float literal cannot be promoted to exact.
    fn coerce_scalar(&self, s: &Scalar, field: &str) -> Result<Scalar> {
        match (self.mode, s.mode()) {
            (Mode::Exact, Mode::Float) => Err(Error::Config(format!(
                "{field}: float literal in an exact-mode run; write it as a \"p/q\" string"
            ))),
            (Mode::Float, Mode::Exact) => Ok(s.to_float()),
            _ => Ok(s.clone()),
        }
    }

    /// Builds and validates the spin-chain model in the configured mode.
    pub fn build_model(&self) -> Result<SpinChainModel> {
        let c = self.coerce_scalar(&self.model.c, "model.c")?;
        if self.model.homogeneous {
            let xi0 = self.coerce_scalar(&self.model.inhomogeneities[0], "model.inhomogeneities[0]")?;
            return SpinChainModel::homogeneous(self.model.length, c, xi0);
        }
        let xi = self
            .model
            .inhomogeneities
            .iter()
            .enumerate()
            .map(|(k, x)| self.coerce_scalar(x, &format!("model.inhomogeneities[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        SpinChainModel::new(self.model.length, c, xi)
    }

    /// Builds and validates the twist in the configured mode.
    pub fn build_twist(&self) -> Result<TwistMatrix> {
        let e = |i: usize, j: usize| self.coerce_scalar(&self.twist[i][j], &format!("twist[{i}][{j}]"));
        TwistMatrix::new(e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?)
    }

    /// Replaces the chain length, re-deriving inhomogeneities from the
    /// default pool (a homogeneous model keeps its single value).
    pub fn override_length(&mut self, length: usize) {
        self.model.length = length;
        if !self.model.homogeneous {
            self.model.inhomogeneities = default_inhomogeneities(length);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_builds() {
        let config = RunConfig::default();
        config.check().unwrap();
        let model = config.build_model().unwrap();
        assert_eq!(model.length(), 4);
        assert_eq!(model.mode(), Mode::Exact);
        let twist = config.build_twist().unwrap();
        assert!(twist.k11().is_one());
    }

    #[test]
    fn json_round_trip_preserves_exact_scalars() {
        let config = RunConfig::default();
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        back.check().unwrap();
        assert_eq!(back.model.inhomogeneities, config.model.inhomogeneities);
        assert_eq!(back.seed, 42);
    }

    #[test]
    fn parses_handwritten_json() {
        let text = r#"{
            "model": {"length": 2, "c": "1", "inhomogeneities": ["0", "1/7"]},
            "twist": [["1", "1"], ["1", "2"]],
            "mode": "exact",
            "seed": 7,
            "tolerance": 1e-10
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        config.check().unwrap();
        assert_eq!(config.draws, 3);
        assert_eq!(config.magnons, 2);
        assert_eq!(config.model.inhomogeneities[1], Scalar::rational(1, 7).unwrap());
    }

    #[test]
    fn float_literal_rejected_in_exact_mode() {
        let text = r#"{
            "model": {"length": 1, "c": 1.0, "inhomogeneities": ["0"]},
            "twist": [["1", "0"], ["0", "1"]],
            "mode": "exact",
            "seed": 7,
            "tolerance": 1e-10
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        let err = config.check().unwrap_err();
        assert!(matches!(err, Error::Config(msg) if msg.contains("model.c")));
    }

    #[test]
    fn exact_literals_coerce_in_float_mode() {
        let mut config = RunConfig::default();
        config.mode = Mode::Float;
        config.check().unwrap();
        let model = config.build_model().unwrap();
        assert_eq!(model.mode(), Mode::Float);
        let twist = config.build_twist().unwrap();
        assert_eq!(twist.mode(), Mode::Float);
    }

    #[test]
    fn homogeneous_flag_takes_single_value() {
        let text = r#"{
            "model": {"length": 2, "c": "1", "inhomogeneities": ["0"], "homogeneous": true},
            "twist": [["1", "1"], ["0", "1"]],
            "mode": "exact",
            "seed": 7,
            "tolerance": 1e-10
        }"#;
        let config: RunConfig = serde_json::from_str(text).unwrap();
        config.check().unwrap();
        let model = config.build_model().unwrap();
        assert_eq!(model.length(), 2);
        // wrong cardinality is a config error
        let bad = r#"{
            "model": {"length": 2, "c": "1", "inhomogeneities": ["0", "0"], "homogeneous": true},
            "twist": [["1", "1"], ["0", "1"]],
            "mode": "exact",
            "seed": 7,
            "tolerance": 1e-10
        }"#;
        let config: RunConfig = serde_json::from_str(bad).unwrap();
        assert!(config.check().is_err());
    }

    #[test]
    fn length_override_rederives_pool() {
        let mut config = RunConfig::default();
        config.override_length(6);
        config.check().unwrap();
        let model = config.build_model().unwrap();
        assert_eq!(model.length(), 6);
        assert_eq!(
            model.inhomogeneities().get(5),
            &Scalar::rational(-7, 17).unwrap()
        );
    }

    #[test]
    fn validation_errors_carry_field_paths() {
        let mut config = RunConfig::default();
        config.tolerance = -1.0;
        assert!(matches!(config.check(), Err(Error::Config(msg)) if msg.contains("tolerance")));
        let mut config = RunConfig::default();
        config.model.inhomogeneities.pop();
        assert!(
            matches!(config.check(), Err(Error::Config(msg)) if msg.contains("inhomogeneities"))
        );
    }
}
