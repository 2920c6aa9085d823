//! Experiment configuration, readable from JSON.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::SamplerMode;
use crate::error::{contract, Error, Result};
use crate::scalar::QValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    MarkovMarginal,
    Intertwine,
    Desintegration,
    SmallQ,
    LargeQ,
    KernelDump,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::MarkovMarginal,
        ExperimentKind::Intertwine,
        ExperimentKind::Desintegration,
        ExperimentKind::SmallQ,
        ExperimentKind::LargeQ,
        ExperimentKind::KernelDump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::MarkovMarginal => "markov-marginal",
            ExperimentKind::Intertwine => "intertwine",
            ExperimentKind::Desintegration => "desintegration",
            ExperimentKind::SmallQ => "small-q",
            ExperimentKind::LargeQ => "large-q",
            ExperimentKind::KernelDump => "kernel-dump",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment {s:?}")))
    }
}

/// Pass thresholds. Unset values fall back to the noise-based defaults in
/// [`crate::harness::stats`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct Thresholds {
    /// Main TV comparison of the experiment.
    pub tv: Option<f64>,
    /// TV of the pair law in `markov-marginal`.
    pub pair_tv: Option<f64>,
    /// TV against the generator semigroup in `small-q`.
    pub semigroup_tv: Option<f64>,
    /// Per-coordinate KS in `large-q`.
    pub ks: Option<f64>,
    /// Joint KS in `large-q`.
    pub joint_ks: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Pattern depth.
    pub k: usize,
    /// Matrix size for `large-q`; must equal `k + 1` when given.
    pub d: Option<usize>,
    /// `num/den` or a decimal. Ignored by `small-q` and `large-q`, which
    /// derive `q` from `scale`.
    pub q: String,
    /// Number of discrete steps.
    pub horizon: usize,
    /// Continuous time for `small-q`.
    pub t_max: f64,
    /// `N` in `q = 1/N` or `q = 1 - 1/N`.
    pub scale: u64,
    /// Two scales `[N_lo, N_hi]` for the convergence trend check.
    pub trend: Option<[u64; 2]>,
    pub n_paths: usize,
    pub seed: u64,
    /// Truncation radius of exact laws.
    pub radius: i64,
    /// Largest truncated mass accepted.
    pub tolerance: f64,
    /// Coordinate bound of the exhaustive checks.
    pub bound: i64,
    pub sampler: SamplerMode,
    pub thresholds: Thresholds,
    /// Directory for `report.json` and CSV files.
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::MarkovMarginal,
            k: 2,
            d: None,
            q: "1/2".into(),
            horizon: 1,
            t_max: 1.0,
            scale: 200,
            trend: None,
            n_paths: 10_000,
            seed: 0,
            radius: 30,
            tolerance: 1e-4,
            bound: 4,
            sampler: SamplerMode::InverseCdf,
            thresholds: Thresholds::default(),
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn q_value(&self) -> Result<QValue> {
        self.q.parse()
    }

    /// Checks the parameter ranges the experiment supports.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(contract(format!("{}: {msg}", self.experiment)));
        if self.k == 0 {
            return fail("k must be positive".into());
        }
        if !(self.tolerance >= 0.0) {
            return fail("tolerance must be non-negative".into());
        }
        let q_ok = |exact: bool| -> Result<()> {
            let q = self.q_value()?;
            if exact && !q.is_exact() {
                return Err(contract(format!("{}: q must be given as num/den", self.experiment)));
            }
            let v = q.as_f64();
            if !(v > 0.0 && v < 1.0) {
                return Err(contract(format!("{}: q must lie in (0,1)", self.experiment)));
            }
            Ok(())
        };
        match self.experiment {
            ExperimentKind::MarkovMarginal => {
                q_ok(false)?;
                if self.k > 5 || !(1..=4).contains(&self.horizon) {
                    return fail("needs k ≤ 5 and 1 ≤ horizon ≤ 4".into());
                }
            }
            ExperimentKind::Intertwine => {
                q_ok(true)?;
                if !(2..=5).contains(&self.k) || self.bound < 1 {
                    return fail("needs 2 ≤ k ≤ 5 and bound ≥ 1".into());
                }
            }
            ExperimentKind::Desintegration => {
                q_ok(true)?;
                if self.bound < 2 {
                    return fail("needs bound ≥ 2".into());
                }
            }
            ExperimentKind::SmallQ => {
                if self.scale < 50 || !(self.t_max > 0.0) {
                    return fail("needs N ≥ 50 and t_max > 0".into());
                }
            }
            ExperimentKind::LargeQ => {
                if self.scale < 20 || !(1..=4).contains(&self.horizon) {
                    return fail("needs N ≥ 20 and 1 ≤ horizon ≤ 4".into());
                }
                if self.d.is_some_and(|d| d != self.k + 1) {
                    return fail("d must equal k + 1".into());
                }
            }
            ExperimentKind::KernelDump => {
                q_ok(false)?;
                if self.horizon == 0 {
                    return fail("horizon must be positive".into());
                }
            }
        }
        if let Some([lo, hi]) = self.trend {
            if lo >= hi {
                return fail("trend scales must be increasing".into());
            }
        }
        if self.n_paths == 0 {
            return fail("n_paths must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut c = ExperimentConfig::new(ExperimentKind::LargeQ);
        c.trend = Some([25, 200]);
        c.thresholds.ks = Some(0.05);
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"large-q\""));
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        let partial = ExperimentConfig::from_json(r#"{"experiment": "small-q", "k": 1, "n-paths": 50}"#).unwrap();
        assert_eq!(partial.k, 1);
        assert_eq!(partial.n_paths, 50);
        assert_eq!(partial.scale, 200);
        assert!(ExperimentConfig::from_json(r#"{"experiment": "small-q", "bogus": 1}"#).is_err());
    }

    #[test]
    fn kind_names() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::new(ExperimentKind::Intertwine);
        assert!(c.validate().is_ok());
        c.q = "0.5".into();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(ExperimentKind::MarkovMarginal);
        c.horizon = 5;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(ExperimentKind::SmallQ);
        c.scale = 10;
        assert!(c.validate().is_err());
    }
}
