// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adapt;
pub mod classify;
pub mod dataset;
pub mod error;
pub mod evaluate;
pub mod experiment;
pub mod igselect;
pub mod io;
pub mod neighbors;
pub mod resample;
pub mod rng;
pub mod synth;
pub mod textprep;
pub mod vectorize;

pub use dataset::{squared_distance, Dataset, Label, SparseVector};
pub use error::{Error, Result};
