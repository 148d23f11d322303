//! The perturbation protocol: β-grid sweeps scored against edit distance.

pub mod stats;
pub mod sweep;

pub use stats::{auc_edges, auc_selection, mean_ranks, spearman};
pub use sweep::{
    emit_heatmap, parse_heatmap, run_sweep, summary_csv, Heatmap, SweepConfig, SweepResult, DEFAULT_BETA_GRID, METRICS,
};
