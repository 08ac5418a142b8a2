//! Exact rational arithmetic.
//!
//! All probabilities, rewards and game values in this crate are
//! arbitrary-precision rationals kept in lowest terms with a positive
//! denominator. The only additions over [`num_rational`] are the bit-size
//! accounting used by arena size reports and a few dyadic helpers.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rational;

/// Builds `n / d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-j`, exactly.
pub fn pow2_recip(j: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << j as usize)
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// Number of binary digits of `|k|`, counting zero as one digit.
pub fn int_bits(k: &BigInt) -> u64 {
    if k.is_zero() {
        1
    } else {
        k.magnitude().bits()
    }
}

/// Combined length of the binary representations of numerator and
/// denominator, e.g. `|1/2| = 3`.
pub fn bit_length(r: &Rational) -> u64 {
    int_bits(r.numer()) + int_bits(r.denom())
}

fn dyadic_denominator_exponent(d: &BigUint) -> Option<u64> {
    if d.count_ones() == 1 {
        d.trailing_zeros()
    } else {
        None
    }
}

/// True if the denominator (in lowest terms) is a power of two.
pub fn is_dyadic(r: &Rational) -> bool {
    dyadic_exponent(r).is_some()
}

/// The `k` with denominator `2^k`, if the rational is dyadic.
pub fn dyadic_exponent(r: &Rational) -> Option<u64> {
    debug_assert!(r.denom().is_positive());
    dyadic_denominator_exponent(r.denom().magnitude())
}
