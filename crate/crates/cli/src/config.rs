//! Run configuration: a JSON document whose fields command-line flags override.

use std::path::PathBuf;

use jacobi_spectral::identities::IdentityGrid;
use jacobi_spectral::precision::Precision;
use jacobi_spectral::CoefficientSource;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Asc2 { q: f64, a: f64 },
    Table { alphas: Vec<f64>, betas: Vec<f64> },
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec::Asc2 { q: 0.5, a: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub eig_tol: f64,
    pub atol: f64,
    /// Overrides the Wronskian and resolvent thresholds of `verify` when set.
    pub rtol: Option<f64>,
    pub max_terms: usize,
    /// Steps of the ratio route in `charfn`.
    pub ratio_terms: usize,
    pub precision_digits: Option<u32>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eig_tol: 1e-10, atol: 1e-12, rtol: None, max_terms: 8192, ratio_terms: 200, precision_digits: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.z_max
                } else {
                    self.z_min + (self.z_max - self.z_min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

impl std::str::FromStr for Grid {
    type Err = String;

    /// `MIN:MAX:POINTS`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid must be MIN:MAX:POINTS, got {s:?}"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad grid bound {p:?}: {e}"));
        let points = parts[2].trim().parse::<usize>().map_err(|e| format!("bad grid size {:?}: {e}", parts[2]))?;
        Ok(Grid { z_min: num(parts[0])?, z_max: num(parts[1])?, points })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub format: Format,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityConfig {
    pub q_list: Vec<f64>,
    pub relation_samples: usize,
    pub seed: u64,
    pub gap_tol: f64,
    pub relation_tol: f64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        let g = IdentityGrid::default();
        IdentityConfig {
            q_list: g.q_list,
            relation_samples: g.relation_samples,
            seed: g.seed,
            gap_tol: g.gap_tol,
            relation_tol: g.relation_tol,
        }
    }
}

impl IdentityConfig {
    pub fn grid(&self) -> IdentityGrid {
        IdentityGrid {
            q_list: self.q_list.clone(),
            relation_samples: self.relation_samples,
            seed: self.seed,
            gap_tol: self.gap_tol,
            relation_tol: self.relation_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub family: FamilySpec,
    pub shift: f64,
    /// Asserted lower bound of the spectrum; taken from the family if absent.
    pub gamma: Option<f64>,
    /// Eigenvalues requested by `spectrum`.
    pub k: usize,
    pub tolerances: Tolerances,
    pub grid: Option<Grid>,
    pub identities: IdentityConfig,
    pub output: Output,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: FamilySpec::default(),
            shift: 0.0,
            gamma: None,
            k: 8,
            tolerances: Tolerances::default(),
            grid: None,
            identities: IdentityConfig::default(),
            output: Output::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config document: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn source(&self) -> Result<CoefficientSource, CliError> {
        let src = match &self.family {
            FamilySpec::Asc2 { q, a } => CoefficientSource::asc2(*q, *a),
            FamilySpec::Table { alphas, betas } => CoefficientSource::table(alphas.clone(), betas.clone()),
        }
        .map_err(CliError::from_config)?;
        Ok(src.with_shift(self.shift))
    }

    /// Asserted lower spectral bound: explicit `gamma` or the family's own.
    pub fn gamma(&self, src: &CoefficientSource) -> Option<f64> {
        self.gamma.or(src.spectral_floor())
    }

    pub fn precision(&self) -> Result<Precision, CliError> {
        match self.tolerances.precision_digits {
            None => Ok(Precision::Binary64),
            Some(d) => Precision::from_digits(d).map_err(CliError::from_config),
        }
    }

    /// Checks the invariants shared by every command.
    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        if !(t.eig_tol > 0.0) {
            return Err(CliError::Config(format!("eig_tol must be positive, got {}", t.eig_tol)));
        }
        if !(t.atol > 0.0) {
            return Err(CliError::Config(format!("atol must be positive, got {}", t.atol)));
        }
        if let Some(r) = t.rtol {
            if !(r > 0.0) {
                return Err(CliError::Config(format!("rtol must be positive, got {r}")));
            }
        }
        if t.max_terms == 0 || t.ratio_terms == 0 {
            return Err(CliError::Config("max_terms and ratio_terms must be at least 1".into()));
        }
        if let Some(g) = &self.grid {
            if g.points < 2 {
                return Err(CliError::Config(format!("grid needs at least 2 points, got {}", g.points)));
            }
            if !(g.z_min.is_finite() && g.z_max.is_finite() && g.z_min < g.z_max) {
                return Err(CliError::Config(format!("grid bounds must satisfy z_min < z_max, got {} and {}", g.z_min, g.z_max)));
            }
        }
        if !self.shift.is_finite() {
            return Err(CliError::Config("shift must be finite".into()));
        }
        self.precision()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parses_and_spans_bounds() {
        let g: Grid = "-1:2:13".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 13);
        assert_eq!(v[0], -1.0);
        assert_eq!(v[12], 2.0);
        assert_eq!(v[4], 0.0);
        assert!("1:2".parse::<Grid>().is_err());
        assert!("a:2:3".parse::<Grid>().is_err());
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let cfg = RunConfig::from_json(r#"{"family": {"kind": "asc2", "q": 0.3, "a": 0.3}, "k": 4}"#).unwrap();
        assert_eq!(cfg.family, FamilySpec::Asc2 { q: 0.3, a: 0.3 });
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.tolerances, Tolerances::default());
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(RunConfig::from_json(r#"{"shfit": 0.5}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.grid = Some(Grid { z_min: 0.0, z_max: 1.0, points: 1 });
        assert!(cfg.validate().is_err());
        cfg.grid = None;
        cfg.tolerances.precision_digits = Some(40);
        assert!(cfg.validate().is_err());
        cfg.tolerances.precision_digits = Some(30);
        assert_eq!(cfg.precision().unwrap(), Precision::DoubleDouble);
    }
}
