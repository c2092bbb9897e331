//! Experiment runner, statistics, and reporting.

mod align;
mod config;
mod experiment;
mod report;
mod stats;

pub use align::{
    normalized_smith_waterman, similarity_matrix, smith_waterman, AlignmentScoring,
    SimilarityMatrix,
};
pub use config::FileConfig;
pub use experiment::{
    initial_point, load_records, persist_record, record_path, run_experiment, run_single,
    BudgetRule, ExperimentConfig, ExperimentOutcome, PolicySpec, ProblemSpec,
    DEFAULT_BUDGET_FACTOR, WORKERS_ENV,
};
pub use report::{
    build_report, write_report, BestSingle, CellSummary, ComparisonReport, FriedmanSummary,
    PairedCell, PairwiseComparison, ProblemKey, ProblemSimilarity,
};
pub use stats::{
    average_ranks, friedman_test, mean_std, paired_t_test, Comparison, Friedman, TTest, Tally,
};
