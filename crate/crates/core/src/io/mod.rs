//! File formats, instance generation and the benchmark harness.

pub mod bench;
pub mod format;
pub mod generate;

pub use format::{parse_parity, parse_ssg, print_parity, print_ssg, ParityGame};

use serde::Serializer;

use crate::rational::Rational;

/// Serializes a rational as its canonical `num/den` string.
pub fn serialize_rational<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}
