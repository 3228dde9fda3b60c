use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: |det| = {det:e} below threshold {threshold:e}")]
    SingularMatrix { det: f64, threshold: f64 },

    #[error("state outside admissible ball: distance {distance} >= radius {radius}{}", cell_suffix(*.cell))]
    OutsideAdmissibleBall {
        cell: Option<usize>,
        distance: f64,
        radius: f64,
    },

    #[error("invalid boundary tag rule: {0}")]
    InvalidTagRule(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("ellipticity violated: Rayleigh quotient {value:e} < nu = {nu:e}")]
    EllipticityViolation { value: f64, nu: f64 },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("no convergence after {iterations} iterations (last norm {norm:e})")]
    NoConvergence { iterations: usize, norm: f64 },

    #[error("singular Jacobian: {0}")]
    SingularJacobian(String),

    #[error("degenerate Dirichlet lifting: det = {det:e} on cell {cell}")]
    LiftDegenerate { cell: usize, det: f64 },

    #[error("contraction lost at iteration {iteration}: increment ratio {ratio}")]
    ContractionLost { iteration: usize, ratio: f64 },

    #[error("guard violation at t = {t}: {reason}")]
    GuardViolation { t: f64, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn cell_suffix(cell: Option<usize>) -> String {
    match cell {
        Some(c) => format!(" (cell {c})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
