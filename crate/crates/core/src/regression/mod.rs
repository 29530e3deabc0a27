//! Least squares with HAC inference and the test battery built on it.

mod granger;
mod inference;
mod lags;
mod ols;
mod qlr;
mod report;

pub use granger::{
    contemporaneous_model, granger_test, significance_summary, ContemporaneousFit, Direction,
    DirectionalTest, GrangerResult, SignificanceCount,
};
pub use inference::{
    breusch_godfrey, chi2_sf, diff_mean_test, diff_var_test, long_run, long_run_block,
    long_run_effect, mean_test, normal_p_value, stars, wald, BreuschGodfrey, DiffMeanTest, LongRun,
    MeanTest, VarianceRatioTest, WaldTest,
};
pub use lags::{fit_with, select_lags, Frame, GrangerConfig, LagChoice, ModelSpec, Term};
pub use ols::{default_bandwidth, ols, ols_with_bandwidth, Design, OlsFit};
pub use qlr::{level_correct, qlr_break, BreakResult, QLR_CRITICAL, TRIM};
pub use report::{coef_cell, granger_table, regression_table, significance_table, Table};
