//! Graded-commutative polynomial arithmetic with truncation windows.

pub mod basis;
pub mod context;
pub mod monomial;
pub mod polynomial;

pub use context::{Ctx, GradedContext, Variable};
pub use monomial::{canonicalize, DegreeReport, Monomial};
pub use polynomial::{int, rat, GradedPolynomial, Grading, Rat};
