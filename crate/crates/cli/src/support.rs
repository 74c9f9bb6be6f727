//! Input loading, exit-code mapping and small shared helpers.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use crest_core::data::{parse_rating_csv, RatingList};
use crest_core::Error as CoreError;

/// A numerical failure that must map to exit code 3 (boundary fits,
/// singular information, diverged searches).
#[derive(Debug)]
pub struct NumericFailure(pub String);

impl std::fmt::Display for NumericFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "numerical failure: {}", self.0)
    }
}

impl std::error::Error for NumericFailure {}

/// Exit code for a failed command: 3 for numerical failures, 2 for
/// everything else (usage, IO, format, domain).
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<NumericFailure>().is_some() {
        return 3;
    }
    if let Some(core) = err.downcast_ref::<CoreError>() {
        return match core {
            CoreError::SingularInformation(_) | CoreError::Convergence(_) => 3,
            _ => 2,
        };
    }
    2
}

/// Read and parse a rating-list file, reporting rejected rows on stderr.
/// Returns the raw bytes (for the input digest) alongside the list.
pub fn load_rating_list(path: &Path) -> Result<(Vec<u8>, RatingList)> {
    let bytes =
        fs::read(path).with_context(|| format!("cannot read input '{}'", path.display()))?;
    let report = parse_rating_csv(bytes.as_slice(), &path.display().to_string())?;
    if !report.rejected.is_empty() {
        eprintln!(
            "warning: {} row(s) rejected while parsing '{}'",
            report.rejected.len(),
            path.display()
        );
        for issue in report.rejected.iter().take(5) {
            eprintln!("  line {}: {}", issue.line, issue.message);
        }
        if report.rejected.len() > 5 {
            eprintln!("  ... and {} more", report.rejected.len() - 5);
        }
    }
    Ok((bytes, report.list))
}

/// Promote a boundary-warning fit to a hard numerical failure, per the
/// command-line contract.
pub fn reject_boundary_fits(fit: &crest_core::FitResult, stratum: &str) -> Result<()> {
    if fit.warnings.is_empty() {
        Ok(())
    } else {
        Err(anyhow!(NumericFailure(format!(
            "fit for stratum '{stratum}' hit the search boundary: {:?}",
            fit.warnings
        ))))
    }
}

/// Require a positive sample before fitting, with a friendly message.
pub fn require_sample_size(n: usize, stratum: &str) -> Result<()> {
    if n < 10 {
        Err(anyhow!(CoreError::SampleTooSmall { min: 10, got: n })
            .context(format!("stratum '{stratum}' is too small to fit")))
    } else {
        Ok(())
    }
}

/// Print a document to stdout, treating a closed pipe as a clean exit.
pub fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

/// Write raw bytes to stdout, treating a closed pipe as a clean exit.
pub fn write_stdout(bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(bytes) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}
