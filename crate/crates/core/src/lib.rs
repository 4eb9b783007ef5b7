//! Models RLWE/MLWE public-key encryption as a noisy channel.
//!
//! The crate builds the exact per-coefficient decryption-noise law of
//! NewHope/Kyber-style schemes, bounds coefficient and block failure rates,
//! lower-bounds the capacity of the resulting Q-ary channel, searches
//! Gilbert–Varshamov and BCH code parameters under failure-rate constraints,
//! and validates the model with a Monte Carlo encrypt/decrypt simulator.
//!
//! Probability mass functions ([`pmf::Pmf`]) are the common currency. They
//! come in two backends: exact rationals (the oracle) and MPFR floats with a
//! configurable mantissa and an effectively unbounded exponent.

pub mod channel;
pub mod code_search;
pub mod compression;
pub mod error;
pub mod noise;
pub mod params;
pub mod pmf;
pub mod report;
pub mod ring;
pub mod simulator;

pub use error::{Error, Result};
pub use params::{ParamSet, PrecisionConfig, QaryConfig};
pub use pmf::{Backend, Pmf};
