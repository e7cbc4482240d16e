//! Exact computations for rational maps on the Berkovich projective line
//! over a ramified extension of `Q_p`.

pub mod berk_points;
pub mod entropy;
pub mod error;
pub mod ext_field;
pub mod julia_struct;
pub mod linalg;
pub mod map_action;
pub mod poly;
pub mod rational;
pub mod residue_dyn;
pub mod tropical;

pub use error::{Error, Result};
