// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod cylinder;
pub mod error;
pub mod gluing;
pub mod interface_ops;
pub mod oracle;
pub mod quad;
pub mod report;
pub mod series;
pub mod spectra;
pub mod sum;
pub mod zreg;

pub use error::{Error, Result};
