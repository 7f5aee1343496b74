//! Matching covers built from algorithmic regularity partitions, with a
//! single-pass streaming matching algorithm (buffer cascade), a two-regime
//! fully dynamic matching engine, and brute-force oracles plus space
//! accounting to verify the guarantees at desk scale.

pub mod compact;
pub mod cover;
pub mod dynamic;
pub mod error;
pub mod fractional;
pub mod graph;
pub mod matching;
pub mod oracle;
pub mod regularity;
pub mod script;
pub mod stream;

pub use error::{Error, Result};
