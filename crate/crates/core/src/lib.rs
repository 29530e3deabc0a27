//! Media sentiment measurement: corpus ingestion, a multinomial naive Bayes
//! classifier, a monthly sentiment index and the time-series tests used to
//! relate it to survey expectations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
mod error;
pub mod index;
pub mod io;
pub mod nb;
pub mod period;
pub mod pipeline;
pub mod regression;
pub mod series;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
