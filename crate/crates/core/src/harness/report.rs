//! Comparison results and their on-disk form.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::config::ExperimentConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Tv,
    Ks,
    MaxAbs,
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::Tv => "tv",
            Statistic::Ks => "ks",
            Statistic::MaxAbs => "max-abs",
        })
    }
}

/// One statistic compared against its threshold.
///
/// `pass` requires `value ≤ threshold` and every truncation deficit within
/// `tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub label: String,
    pub statistic: Statistic,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Half the truncated mass of the compared laws, for TV.
    pub bias: f64,
    pub sample_sizes: Vec<usize>,
    pub deficits: Vec<f64>,
    pub tolerance: f64,
}

impl ComparisonReport {
    pub fn new(label: impl Into<String>, statistic: Statistic, value: f64, threshold: f64) -> Self {
        ComparisonReport {
            label: label.into(),
            statistic,
            value,
            threshold,
            pass: value <= threshold,
            bias: 0.0,
            sample_sizes: Vec::new(),
            deficits: Vec::new(),
            tolerance: f64::INFINITY,
        }
    }

    pub fn with_samples(mut self, sizes: &[usize]) -> Self {
        self.sample_sizes = sizes.to_vec();
        self
    }

    pub fn with_bias(mut self, bias: f64) -> Self {
        self.bias = bias;
        self
    }

    pub fn with_deficits(mut self, deficits: &[f64], tolerance: f64) -> Self {
        self.deficits = deficits.to_vec();
        self.tolerance = tolerance;
        self.pass = self.value <= self.threshold && deficits.iter().all(|d| *d <= tolerance);
        self
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} = {:.5} (threshold {:.5}",
            if self.pass { "PASS" } else { "FAIL" },
            self.label,
            self.statistic,
            self.value,
            self.threshold
        )?;
        if !self.sample_sizes.is_empty() {
            write!(f, ", samples {:?}", self.sample_sizes)?;
        }
        if !self.deficits.is_empty() {
            let worst = self.deficits.iter().cloned().fold(0.0, f64::max);
            write!(f, ", deficit {worst:.2e}")?;
        }
        write!(f, ")")
    }
}

/// A table written as CSV next to the report.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl Histogram {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["state".to_string()];
        header.extend(self.columns.iter().cloned());
        out.write_record(&header)?;
        for (state, values) in &self.rows {
            let mut rec = vec![state.clone()];
            rec.extend(values.iter().map(|v| v.to_string()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub reports: Vec<ComparisonReport>,
    /// Free-form values worth keeping, such as exact discrepancies.
    pub notes: Vec<String>,
    #[serde(skip)]
    pub histograms: Vec<Histogram>,
    /// Extra JSON files, written as `<name>.json`.
    #[serde(skip)]
    pub documents: Vec<(String, serde_json::Value)>,
}

impl ExperimentOutcome {
    pub fn new(config: &ExperimentConfig) -> Self {
        ExperimentOutcome {
            config: config.clone(),
            reports: Vec::new(),
            notes: Vec::new(),
            histograms: Vec::new(),
            documents: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    /// Writes `report.json`, one `<name>.csv` per histogram and one
    /// `<name>.json` per document into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        for h in &self.histograms {
            h.write_csv(fs::File::create(dir.join(format!("{}.csv", h.name)))?)?;
        }
        for (name, doc) in &self.documents {
            fs::write(dir.join(format!("{name}.json")), serde_json::to_string_pretty(doc)?)?;
        }
        Ok(())
    }
}
