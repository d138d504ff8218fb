//! Channel–state duality for finite-dimensional quantum channels relative to an arbitrary
//! faithful reference state, with the covariance toolkit built on top of it.

pub mod channel;
pub mod choi;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod phase_covariant;
pub mod random;
pub mod rotation;
pub mod states;
pub mod symmetry;
pub mod transpose;

pub use channel::Channel;
pub use choi::{channel_from_choi, choi_from_channel, ChoiState};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use states::{make_reference, DensityMatrix, ReferenceState};
