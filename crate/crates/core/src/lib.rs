//! Holonomy of quantum channels.
//!
//! Kraus representations, overlap matrices and polar factors, discrete and
//! smooth channel holonomies, the Uhlmann holonomy of purified states,
//! holonomic channels and an interferometric model of their measurement.
#![no_std]

extern crate alloc;

pub mod discrete;
pub mod error;
pub mod holonomic;
pub mod interferometer;
pub mod kraus;
pub mod matcore;
pub mod ops;
pub mod random;
pub mod smooth;
pub mod tol;
pub mod uhlmann;

pub use error::{Error, Result};
pub use kraus::{GaugeUnitary, KrausRep};
pub use matcore::{CMat, CVec, C64};
