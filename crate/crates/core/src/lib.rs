pub mod arith;
pub mod characters;
pub mod dickman;
pub mod error;
pub mod experiments;
pub mod moments;
pub mod numeric;
pub mod polya;
pub mod realchar;
pub mod smooth;
pub mod weight;

pub use error::{LabError, Result};
