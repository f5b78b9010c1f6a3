// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod curves;
pub mod error;
pub mod gamble;
pub mod lp;
mod math;
pub mod oracle;
pub mod preference;
pub mod scenario;
pub mod suites;
pub mod utility;
pub mod witness;
