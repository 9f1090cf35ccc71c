//! Closed-form rejection counts.
//!
//! Over all `m^n` samples the total number of rejections is
//!
//! ```text
//! R(n, m) = 1/2 * sum_{k=2..n} n^(k) * m^(n-k+1)
//! ```
//!
//! where `n^(k) = n (n-1) ... (n-k+1)` is the falling factorial, and the
//! average per player is `R / (n m^n)`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// An exact non-negative count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactCount(pub BigUint);

impl ExactCount {
    pub fn to_u128(&self) -> Option<u128> {
        u128::try_from(&self.0).ok()
    }
}

impl fmt::Display for ExactCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for ExactCount {
    fn from(v: u64) -> Self {
        ExactCount(BigUint::from(v))
    }
}

/// `n (n-1) ... (n-k+1)`; 1 for `k = 0`, 0 for `k > n`.
pub fn falling_factorial(n: u64, k: u64) -> ExactCount {
    if k > n {
        return ExactCount(BigUint::zero());
    }
    ExactCount((n - k + 1..=n).fold(BigUint::one(), |acc, f| acc * f))
}

fn check_range(n: u64, m: u64) -> Result<()> {
    if n < 1 || n > m {
        return Err(Error::InvalidParameters(format!("need 1 <= n <= m, got n={n}, m={m}")));
    }
    Ok(())
}

/// Total rejections over all `m^n` samples.
pub fn closed_form_total(n: u64, m: u64) -> Result<ExactCount> {
    check_range(n, m)?;
    let m_big = BigUint::from(m);
    let mut sum = BigUint::zero();
    // n^(k) and m^(n-k+1), updated in lockstep as k grows
    let mut falling = BigUint::from(n);
    let mut power = m_big.pow(n as u32);
    for k in 2..=n {
        falling *= n - k + 1;
        power /= &m_big;
        sum += &falling * &power;
    }
    if sum.bit(0) {
        return Err(Error::InvariantViolation(format!(
            "rejection sum {sum} for n={n}, m={m} is odd"
        )));
    }
    Ok(ExactCount(sum >> 1u32))
}

/// Average rejections per player, exactly.
pub fn closed_form_average(n: u64, m: u64) -> Result<BigRational> {
    let total = closed_form_total(n, m)?;
    let denom = BigUint::from(n) * BigUint::from(m).pow(n as u32);
    Ok(BigRational::new(BigInt::from(total.0), BigInt::from(denom)))
}

/// Floating evaluation of `(1/2n) sum_{k=2..n} n^(k) / m^(k-1)` with each
/// term built from the previous one by the factor `(n-k+1)/m`.
pub fn closed_form_average_float(n: u64, m: u64) -> Result<f64> {
    check_range(n, m)?;
    let (nf, mf) = (n as f64, m as f64);
    let mut term = nf;
    let mut sum = 0.0;
    for k in 2..=n {
        term *= (n - k + 1) as f64 / mf;
        if term == 0.0 {
            break;
        }
        sum += term;
    }
    Ok(sum / (2.0 * nf))
}

/// Renders a rational as `p/q`, or `p` when the denominator is 1.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
