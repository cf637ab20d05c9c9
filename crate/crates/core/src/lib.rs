//! Boundary-layer cell problems, resolved fracture/porous-medium flow and
//! verification of an effective nonlinear slip law at the interface.

pub mod analysis;
pub mod boundary_layer;
pub mod dns;
pub mod error;
pub mod geometry;
pub mod saddle;
pub mod scaling;
pub mod verification;

pub use error::{Error, Result};
