//! Exact computation with finitely generated nilpotent groups.

pub mod error;
pub mod gogiso;
pub mod malcev;
pub mod nilgroup;
pub mod outsep;
pub mod pcp;
pub mod whitehead;
pub mod zmod;

pub use error::{Error, Result};
