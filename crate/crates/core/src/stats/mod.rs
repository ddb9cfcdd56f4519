//! Two-group statistics for cohort comparisons.

mod cohort;
mod hypothesis;
mod normality;
pub mod special;

pub use cohort::{
    align_and_unwrap, box_plot, quantile_sorted, run_cohort_analysis, AlignedSeries, BoxPlot, CohortSample,
    CohortStats, FeatureComparison, Group, COHORT_FEATURES,
};
pub use hypothesis::{
    choose_test, cohens_d, mann_whitney_u, welch_t, TestChoice, TestKind, TestResult, NORMALITY_ALPHA,
};
pub use normality::{shapiro_wilk, ShapiroWilk};

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Bessel-corrected variance.
pub fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() as f64 - 1.0)
}
