//! Normal forms: trivialization away from the zero locus, straightening,
//! and splitting at zero-locus points.

pub mod split;
pub mod straighten;
pub mod trivialize;

pub use split::{normal_form, split_at_point, Splitting};
pub use straighten::{straighten, Straightening};
pub use trivialize::{contracting_homotopy, homotopy_alpha, trivialize, HomotopyReport, Trivialization};
