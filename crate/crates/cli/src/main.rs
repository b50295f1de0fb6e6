use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use symstat_cli::dataset::Dataset;
use symstat_cli::demos::{demo, DemoOptions};
use symstat_cli::fit::{apply_transforms, LogisticSpec};
use symstat_cli::report::Report;
use symstat_cli::script::run_script;
use symstat_cli::{ar1_report, logistic_report, Error};

/// Exact symbolic derivations for statistics, with compiled numeric fits.
#[derive(Parser)]
#[command(name = "symstat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Also write the report as JSON.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Also write the report as a LaTeX document.
    #[arg(long, value_name = "FILE")]
    latex: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a derivation script.
    Run {
        script: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Run a built-in demo: calculus, anova, logistic, lagrange, ar1 or variance-avg.
    Demo {
        name: String,
        /// variance-avg: correlate neighbouring observations only.
        #[arg(long)]
        tridiagonal: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Fit a binomial logistic regression to a CSV file.
    FitLogistic {
        #[arg(long, value_name = "FILE")]
        csv: PathBuf,
        /// Column with the number of events.
        #[arg(long)]
        events: String,
        /// Column with the number of trials.
        #[arg(long)]
        trials: String,
        /// Comma-separated predictor columns.
        #[arg(long, value_delimiter = ',')]
        predictors: Vec<String>,
        /// Transform a column before fitting, as log2:col, log:col or log10:col.
        #[arg(long, value_name = "FN:COL")]
        transform: Vec<String>,
        /// Leave out the intercept column.
        #[arg(long)]
        no_intercept: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Fit a stationary AR(1) model to a series.
    FitAr1 {
        #[arg(long, value_name = "FILE", requires = "column", conflicts_with = "series")]
        csv: Option<PathBuf>,
        #[arg(long)]
        column: Option<String>,
        /// Comma-separated values, e.g. "0.1,-0.9,0.4,0.0".
        #[arg(long, allow_hyphen_values = true)]
        series: Option<String>,
        #[command(flatten)]
        out: Output,
    },
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn emit(report: &Report, out: &Output) -> Result<(), Error> {
    print!("{}", report.to_text());
    if let Some(p) = &out.json {
        write(p, &report.to_json_string())?;
    }
    if let Some(p) = &out.latex {
        write(p, &report.to_latex_document())?;
    }
    Ok(())
}

fn parse_series(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Usage(format!("--series: `{}` is not a number", v.trim())))
        })
        .collect()
}

fn execute(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Run { script, out } => emit(&run_script(&script)?, &out),
        Command::Demo { name, tridiagonal, out } => emit(&demo(&name, DemoOptions { tridiagonal })?, &out),
        Command::FitLogistic { csv, events, trials, mut predictors, transform, no_intercept, out } => {
            let mut data = Dataset::from_path(&csv)?;
            apply_transforms(&mut data, &transform, &mut predictors)?;
            let spec = LogisticSpec { events, trials, predictors, intercept: !no_intercept };
            emit(&logistic_report(&data, &spec)?, &out)
        }
        Command::FitAr1 { csv, column, series, out } => {
            let values = match (csv, column, series) {
                (Some(path), Some(col), None) => Dataset::from_path(&path)?.column(&col)?,
                (None, None, Some(s)) => parse_series(&s)?,
                _ => return Err(Error::Usage("give either --csv FILE --column NAME or --series VALUES".into())),
            };
            emit(&ar1_report(&values)?, &out)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
