//! One module per experiment family.

pub mod bricklayer;
pub mod convergence;
pub mod evolve;
pub mod riemann;
pub mod tables;

use depolab::bricklayer::BrickError;
use depolab::entropy::EntropyError;
use depolab::hydroflux::HydroError;
use depolab::shocks::ShockError;
use depolab::solvers::SolverError;

/// Command failures carrying their exit code class.
#[derive(Debug)]
pub enum CmdError {
    /// Exit 2: the scenario itself is malformed.
    Invalid(String),
    /// Exit 3: a numerical-domain violation (CFL, hyperbolicity,
    /// positivity, frozen dynamics, out-of-domain states).
    Domain(String),
    /// Exit 4: an iteration or truncation failed to converge.
    NonConvergent(String),
    /// Exit 1: filesystem trouble.
    Io(std::io::Error),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Io(_) => 1,
            CmdError::Invalid(_) => 2,
            CmdError::Domain(_) => 3,
            CmdError::NonConvergent(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CmdError::Io(e) => format!("io error: {e}"),
            CmdError::Invalid(m) => format!("invalid config: {m}"),
            CmdError::Domain(m) => format!("numerical-domain violation: {m}"),
            CmdError::NonConvergent(m) => format!("non-convergence: {m}"),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e)
    }
}

impl From<SolverError> for CmdError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Grid(g) => CmdError::Invalid(g.to_string()),
            other => CmdError::Domain(other.to_string()),
        }
    }
}

impl From<ShockError> for CmdError {
    fn from(e: ShockError) -> Self {
        CmdError::Domain(e.to_string())
    }
}

impl From<BrickError> for CmdError {
    fn from(e: BrickError) -> Self {
        match e {
            BrickError::InvalidParams(_) | BrickError::InvalidRateTable(_) => {
                CmdError::Invalid(e.to_string())
            }
            BrickError::NonConvergent(_) => CmdError::NonConvergent(e.to_string()),
            BrickError::FrozenState => CmdError::Domain(e.to_string()),
        }
    }
}

impl From<HydroError> for CmdError {
    fn from(e: HydroError) -> Self {
        match e {
            HydroError::NewtonDiverged { .. } => CmdError::NonConvergent(e.to_string()),
            HydroError::OutsideImage { .. } => CmdError::Domain(e.to_string()),
            HydroError::Brick(b) => b.into(),
        }
    }
}

impl From<EntropyError> for CmdError {
    fn from(e: EntropyError) -> Self {
        match e {
            EntropyError::Ode(_) => CmdError::NonConvergent(e.to_string()),
            other => CmdError::Domain(other.to_string()),
        }
    }
}
