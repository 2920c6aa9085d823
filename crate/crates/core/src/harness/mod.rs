//! Experiment orchestration and the statistics used to compare simulations
//! with exact laws.

pub mod config;
pub mod experiments;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentKind, Thresholds};
pub use experiments::{
    experiment_desintegration, experiment_intertwine, experiment_kernel_dump, experiment_large_q,
    experiment_markov_marginal, experiment_small_q, run_experiment,
};
pub use report::{ComparisonReport, ExperimentOutcome, Histogram, Statistic};
pub use stats::{ks_critical, ks_joint, ks_threshold, ks_two_sample, tv_distance, tv_noise_threshold, TvDistance};
