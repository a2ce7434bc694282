//! Time evolution of composed network models: fixed-step RK4 on the density
//! matrix for small models, and waiting-time quantum trajectories with
//! deterministic parallel ensembles for the full network.

mod active;
pub mod dense;
pub mod ensemble;
pub mod error;
pub mod generator;
pub mod grid;
pub mod observable;
pub mod trajectory;

pub use dense::{integrate_dense, pure_density, DenseResult};
pub use ensemble::{run_ensemble, EnsembleEstimate, ObservableEstimate};
pub use error::{Result, SimError};
pub use generator::CompiledGenerator;
pub use grid::TimeGrid;
pub use observable::{fidelity_observable, relay_minus_population, Observable};
pub use trajectory::{run_trajectory, JumpRecord, TrajectoryResult};
