pub mod cli;
pub mod derivations;
pub mod dsl;
pub mod error;
pub mod graded_core;
pub mod ideal;
pub mod koszul_tate;
pub mod linalg;
pub mod normal_forms;
pub mod perturbation;
pub mod qmanifold;
pub mod random;

pub use error::{Error, Result};
