//! Exact arithmetic on quotient rings O/𝔭^N of p-adic integer rings, with
//! set algebra, measures, density combinatorics and bounded-generation
//! procedures for small sum-product experiments.

pub mod bitset;
pub mod density;
pub mod digits;
pub mod error;
pub mod exec;
pub mod harness;
pub mod measures;
pub mod procedures;
pub mod rational;
pub mod ring;
pub mod sets;

pub use error::{Error, Result};
pub use exec::Exec;
pub use rational::Rational;
pub use ring::{Ring, RingElem, RingParams};
