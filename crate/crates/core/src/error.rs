use thiserror::Error;

/// Errors produced by the planner.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("unknown environment '{0}'")]
    UnknownEnvironment(String),

    #[error(
        "quadrature did not reach relative tolerance {rel_tol:e} within {panels} panels \
         (last relative change {last_change:e})"
    )]
    QuadratureNonConvergence {
        rel_tol: f64,
        panels: usize,
        last_change: f64,
    },

    /// The kernel derivative never turned positive while growing the bracket.
    #[error("no sign change of dGamma/dh_n for environment '{env}' up to h_max = {h_max:e}")]
    BracketFailure { env: String, h_max: f64 },

    /// A grid sweep found a point with lower kernel value than the bisection result.
    #[error(
        "bisection returned h_n = {found} for '{env}' but the grid sweep minimum is at {grid_argmin}"
    )]
    NotGlobalMinimizer {
        env: String,
        found: f64,
        grid_argmin: f64,
    },

    #[error("user density is zero while circuit power is positive; optimal radius is unbounded")]
    DegenerateDensity,

    #[error(
        "no altitude reaches power {power:e} at radius {r_b} m (largest feasible radius {max_radius} m)"
    )]
    NoSolution {
        power: f64,
        r_b: f64,
        max_radius: f64,
    },

    #[error("subregion '{label}': {source}")]
    Subregion {
        label: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            detail: detail.into(),
        }
    }

    /// Wraps the error with the label of the subregion it came from.
    pub fn in_subregion(self, label: &str) -> Self {
        Error::Subregion {
            label: label.to_string(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping subregion labels.
    pub fn root(&self) -> &Error {
        match self {
            Error::Subregion { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
