//! Covariance-matrix simulation of a two-mode squeezed state decohering in a
//! thermal environment, and classification of the resulting
//! system-environment entanglement.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod separability;
pub mod state;
pub mod symplectic;

pub use error::{Error, Result};
pub use state::{GaussianState, ModeSelection};
pub use symplectic::SymplecticMatrix;
