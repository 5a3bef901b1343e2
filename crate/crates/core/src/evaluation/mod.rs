//! PIM, lambda* selection, significance testing and the benchmark harness.

mod benchmark;
mod pim;
mod wilcoxon;

pub use benchmark::{
    baseline_payoff, benchmark, evaluation_set, parse_methods, score_grid, write_plot_data_csv,
    BenchmarkConfig, BenchmarkReport, BenchmarkSettings, Convergence, CriterionTest, DeltaSeries,
    GridSelection, LambdaScore, MethodRow, DEFAULT_SIGNIFICANCE, REPORT_SCHEMA_VERSION,
};
pub use pim::{
    improvement, improvement_means, path_pim, pim, select_lambda_star, ImprovementMeans,
};
pub use wilcoxon::{
    exact_p_value, normal_p_value, signed_ranks, wilcoxon_signed_rank, WilcoxonMethod,
    WilcoxonResult, EXACT_MAX_N,
};
