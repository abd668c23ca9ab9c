pub mod apposition;
pub mod error;
pub mod harness;
pub mod lie_core;
pub mod master_system;
pub mod linalg;
pub mod phase_space;
pub mod reduction_lab;
pub mod su2_model;
pub mod words;

pub use error::{Error, Result};
