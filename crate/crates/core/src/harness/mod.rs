//! Experiment orchestration: configuration, seeded replications, summary
//! statistics, and the exhaustive small-case checks.

pub mod config;
pub mod equivalence;
pub mod experiment;
pub mod stats;

pub use config::{format_weight_spec, parse_weight_spec, ExperimentConfig, LayerParams};
pub use equivalence::{matching_law_check, percolation_equivalence, EquivalenceReport, MatchingLawReport};
pub use experiment::{
    centering, quantile_summary, run_dichotomy_comparison, run_fluctuation_experiment, write_records_csv,
    DichotomySummary, ExperimentRecord,
};
pub use stats::{iqr, loglog_tail_slope, nearest_rank, ols_slope};
