//! Gromov–Hausdorff-type quantities on finite pointed metric spaces.
//!
//! Everything is generic over a [`Scalar`] backend: exact rationals ([`Q`])
//! or tolerant `f64`.

pub mod error;
pub mod fixtures;
pub mod gluing;
pub mod io;
pub mod kantorovich;
pub mod lipschitz;
pub mod local_gh;
pub mod lp;
pub mod metric_core;
pub mod random;
pub mod scalar;
pub mod tunnels;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Ext, Scalar, Q};
