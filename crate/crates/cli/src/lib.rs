//! Command-line front end for symstat: derivation scripts, built-in demos
//! and likelihood fits from CSV data, reported as text, JSON or LaTeX.

pub mod dataset;
pub mod demos;
pub mod fit;
pub mod report;
pub mod script;

use std::path::PathBuf;

use dataset::{DataError, Dataset};
use demos::DemoError;
use fit::{FitError, LogisticSpec};
use report::{Block, Report, Table};
use script::RunError;

/// Any error the command line reports.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Script(#[from] RunError),
    #[error(transparent)]
    Demo(#[from] DemoError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

/// Logistic regression of `spec.events` out of `spec.trials` on the named
/// predictors.
pub fn logistic_report(data: &Dataset, spec: &LogisticSpec) -> Result<Report, FitError> {
    let f = fit::fit_logistic(data, spec)?;
    let mut r = Report::new("fit-logistic");
    r.push_fit("logistic fit", f.summary());
    Ok(r)
}

/// Stationary AR(1) fit of a series by bounded maximum likelihood.
pub fn ar1_report(series: &[f64]) -> Result<Report, FitError> {
    let f = fit::fit_ar1(series)?;
    let mut r = Report::new("fit-ar1");
    let rows = series.iter().enumerate().map(|(i, v)| vec![(i + 1) as f64, *v]).collect();
    r.push(Block::table("series", Table::new(&["i", "x_i"], rows)));
    r.push(Block::latex("log L", f.loglik.to_latex(), f.loglik.to_plain()));
    r.push_fit("ar1 fit", f.summary());
    Ok(r)
}
