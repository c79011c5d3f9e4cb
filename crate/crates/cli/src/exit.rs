//! Exit codes: 0 all pass, 1 I/O or configuration, 2 numerical, 3 structural.

use std::path::PathBuf;

use c60::Error;

pub const OK: u8 = 0;
pub const IO: u8 = 1;
pub const NUMERICAL: u8 = 2;
pub const STRUCTURAL: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("missing stage `{stage}`: {} not found, run `c60 {stage}` first", file.display())]
    MissingStage { stage: String, file: PathBuf },
    #[error("{} check(s) failed: {}", failed.len(), failed.join(", "))]
    Checks { code: u8, failed: Vec<String> },
}

/// Exit code for a library error.
pub fn library_code(e: &Error) -> u8 {
    match e {
        Error::NoConvergence { .. }
        | Error::StepSizeUnderflow { .. }
        | Error::StepFailure { .. }
        | Error::SingularJacobian
        | Error::SymmetryViolation(_)
        | Error::ResonanceDetected(_)
        | Error::DegenerateGeometry { .. }
        | Error::DomainViolation { .. } => NUMERICAL,
        Error::ClusterAmbiguity { .. }
        | Error::MultiplicityMismatch { .. }
        | Error::UnknownOrbitType(_)
        | Error::EmptyFixedSpace(_)
        | Error::UnsupportedPair(_)
        | Error::DuplicateOrbitPoint => STRUCTURAL,
        Error::Parse(_) | Error::Data(_) => IO,
    }
}

/// Walks the error chain for the first classifiable cause.
pub fn code_of(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return match f {
                Failure::MissingStage { .. } => STRUCTURAL,
                Failure::Checks { code, .. } => *code,
            };
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return library_code(e);
        }
    }
    IO
}
