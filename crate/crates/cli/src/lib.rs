//! Front end for the `randers` binary: config parsing, command dispatch and
//! report rendering. The binary itself only handles arguments and I/O.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{load_config, parse_config, AnalysisConfig, Command, Format, Overrides};
pub use error::{CliError, Issue};
pub use report::{from_json, to_json, ReportDocument};
pub use run::{run, trajectory_csv, Outcome};

/// Runs `command` on an already validated config, on a dedicated pool when
/// a thread count is configured, and renders the result.
pub fn execute(config: &AnalysisConfig, command: Command, styled: bool) -> Result<String, CliError> {
    let outcome = match config.options.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Engine(randers_lie::GeometryError::NumericalFailure(e.to_string())))?
            .install(|| run(config, command))?,
        None => run(config, command)?,
    };
    Ok(render(&outcome, config.options.format, styled))
}

pub fn render(outcome: &Outcome, format: Format, styled: bool) -> String {
    match (format, &outcome.trajectory) {
        (Format::Json, _) => to_json(&outcome.document),
        (Format::Text, Some(rows)) => trajectory_csv(rows),
        (Format::Text, None) => report::to_text(&outcome.document, styled),
    }
}
