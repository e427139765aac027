//! Experiment orchestration: configs, sweep plans, runs and fits.

pub mod config;
pub mod fit;
pub mod plan;
pub mod sweep;

pub use config::{parse_literal, Config, Quantity, SymbolFamily};
pub use fit::{compare_to_theory, fit_log_slope, ols, theory_slope, FitResult, Predictor, Response, TheoryReport, Verdict};
pub use plan::{plan_sweep, BaseConfig, ExperimentPlan, Regime, REGIME_THRESHOLD};
pub use sweep::{read_csv, run_sweep, CsvRow, RunRecord, CSV_HEADER};
