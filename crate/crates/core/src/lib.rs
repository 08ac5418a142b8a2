//! Parity games, simple stochastic games, and exact reductions between them.
//!
//! The crate provides:
//!
//! - arenas with exact rational transition probabilities and bit-size
//!   accounting ([`arena`]);
//! - a Zielonka solver and a brute-force oracle for 2-player parity games
//!   ([`parity`]);
//! - a direct reduction from parity games to simple stochastic games built
//!   from one probabilistic gadget per edge ([`reduction`]), together with
//!   exact analysis of the induced random walks ([`analysis`]);
//! - the classical three-step pipeline through mean-payoff and discounted
//!   games ([`chain`]);
//! - exact solvers for simple stochastic games: strategy improvement,
//!   policy evaluation by fraction-free elimination, fixed-point
//!   verification and the fair-coin normal form ([`ssg`]);
//! - file formats, instance generators and the benchmark harness ([`io`]).

pub mod analysis;
pub mod arena;
pub mod battery;
pub mod chain;
pub mod error;
pub mod io;
pub mod parity;
pub mod rational;
pub mod reduction;
pub mod ssg;

pub use error::{Error, Result};
