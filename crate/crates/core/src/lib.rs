//! Finite metric measure spaces, exact Hardy-Littlewood type maximal
//! operators with dilation `k`, and lower-bound searches for their weak
//! and strong `(p,p)` constants.
//!
//! All distances, weights and function values are exact rationals.

pub mod constants;
pub mod constructions;
pub mod error;
pub mod maximal;
pub mod rational;
pub mod space;

pub use error::{Error, Result};
pub use rational::{Exponent, Rational};
pub use space::{MetricMeasureSpace, PointId};
