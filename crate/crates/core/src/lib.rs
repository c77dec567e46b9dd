//! Forward and inverse nodal problems for a one-dimensional Dirac operator
//! with a transmission condition at `pi/2`.

pub mod asymptotics;
pub mod forward;
pub mod inverse;
pub mod io;
pub mod model;
pub mod numerics;
pub mod pipeline;

pub use asymptotics::{AsymptoticError, Mode};
pub use forward::{ForwardError, NodalSet, SolverOptions, Trajectory};
pub use inverse::{InverseError, NodalDataset, NodalEntry, ReconstructionResult};
pub use model::{validate_config, ConfigError, PotentialSpec, ProblemConfig, RawConfig};
