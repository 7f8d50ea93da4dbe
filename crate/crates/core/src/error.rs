use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} is outside its domain: {reason}")]
    Domain { what: &'static str, reason: String },

    #[error("r = {r} is not exterior to the solenoid (radius a = {radius_a})")]
    ExteriorDomain { r: f64, radius_a: f64 },

    #[error("flux is not differentiable at t = {t}; evaluate a one-sided derivative")]
    NonDifferentiable { t: f64 },

    #[error("field model mismatch: {0}")]
    ModelMismatch(String),

    #[error(
        "flux amplitude mismatch: 4*pi^2*n*I0*a^2/c = {from_current} but the flux profile has Phi(0) = {phi0}"
    )]
    FluxMismatch { from_current: f64, phi0: f64 },

    #[error("beam {beam} hit the solenoid at t = {t} (r = {r}, a = {radius_a})")]
    TrajectoryHitsSolenoid {
        beam: usize,
        t: f64,
        r: f64,
        radius_a: f64,
    },

    #[error("time step {dt} is below the time resolution at t = {t}")]
    StepUnderflow { dt: f64, t: f64 },

    #[error("beams did not meet before t_max = {t_max} (swept-angle sum reached {swept})")]
    NoMeeting { t_max: f64, swept: f64 },

    #[error("meeting-time event did not converge: residual {residual} exceeds tolerance {tolerance}")]
    EventNotConverged { residual: f64, tolerance: f64 },

    #[error("beam-pair run is incomplete: {0}")]
    IncompleteRun(String),

    #[error("insufficient points: need at least {need}, got {got}")]
    InsufficientPoints { need: usize, got: usize },

    #[error("{}", format_config_errors(.0))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by the scenario description rather than by the run itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidParameter { .. }
                | Error::FluxMismatch { .. }
                | Error::ModelMismatch(_)
        )
    }
}

fn format_config_errors(errors: &[String]) -> String {
    let mut out = format!("{} configuration error(s)", errors.len());
    for e in errors {
        out.push_str("\n  - ");
        out.push_str(e);
    }
    out
}
