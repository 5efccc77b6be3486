//! Prime handling, p-adic valuations of integers, factorials and binomials,
//! and Gaussian binomial coefficients evaluated at a prime.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rational prime, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::domain(format!("{p} is not prime")))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^e` as a big integer.
    pub fn pow_big(self, e: u32) -> BigUint {
        num_traits::pow(BigUint::from(self.0), e as usize)
    }

    /// `p^e`, or `None` on overflow.
    pub fn checked_pow(self, e: u32) -> Option<u64> {
        self.0.checked_pow(e)
    }

    /// Whether `m` is a power `p^e` with `e >= 0`.
    pub fn is_power(self, mut m: u64) -> bool {
        if m == 0 {
            return false;
        }
        while m % self.0 == 0 {
            m /= self.0;
        }
        m == 1
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Height `n`, subgroup exponent `k` and the prime they live over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussianParams {
    pub p: Prime,
    pub n: u32,
    pub k: u32,
}

impl GaussianParams {
    pub fn new(p: Prime, n: u32, k: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("height n must be at least 1"));
        }
        Ok(GaussianParams { p, n, k })
    }
}

/// The exponent of the largest power of `p` dividing `m`.
pub fn vp(m: u64, p: Prime) -> Result<u32> {
    if m == 0 {
        return Err(Error::domain("the valuation of 0 is infinite"));
    }
    let mut m = m;
    let mut e = 0;
    while m % p.0 == 0 {
        m /= p.0;
        e += 1;
    }
    Ok(e)
}

/// [`vp`] for big integers.
pub fn vp_big(m: &BigUint, p: Prime) -> Result<u32> {
    if m.is_zero() {
        return Err(Error::domain("the valuation of 0 is infinite"));
    }
    let p = BigUint::from(p.0);
    let mut m = m.clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Ok(e);
        }
        m = q;
        e += 1;
    }
}

/// Legendre's formula: `v_p(m!) = sum_{i>=1} floor(m / p^i)`.
pub fn vp_factorial(m: u64, p: Prime) -> u64 {
    let mut total = 0;
    let mut q = m;
    while q > 0 {
        q /= p.0;
        total += q;
    }
    total
}

/// `v_p(C(m, i))` by Kummer's theorem: the number of carries when adding
/// `i` and `m - i` in base `p`.
///
/// Panics if `i > m`.
pub fn vp_binomial(m: u64, i: u64, p: Prime) -> u32 {
    assert!(i <= m, "binomial C({m}, {i}) needs i <= m");
    let (mut a, mut b) = (i, m - i);
    let mut carry = 0;
    let mut carries = 0;
    while a > 0 || b > 0 || carry > 0 {
        let digit = a % p.0 + b % p.0 + carry;
        carry = u64::from(digit >= p.0);
        carries += carry as u32;
        a /= p.0;
        b /= p.0;
    }
    carries
}

/// The Gaussian binomial `[n+k-1 choose n-1]_p = prod_{j=1}^{n-1} (p^{k+j}-1)/(p^j-1)`,
/// which counts lattices of index `p^k` in `Z_p^n`.
///
/// The running product after step `j` is `[k+j choose j]_p`, so every
/// division is exact; this is asserted.
pub fn gaussian_binomial(params: GaussianParams) -> BigUint {
    let GaussianParams { p, n, k } = params;
    let mut acc = BigUint::one();
    for j in 1..n {
        let num = p.pow_big(k + j) - 1u32;
        let den = p.pow_big(j) - 1u32;
        acc *= num;
        let (q, r) = acc.div_rem(&den);
        assert!(r.is_zero(), "inexact division in gaussian_binomial at j={j}");
        acc = q;
    }
    acc
}

/// `sum_{i=u}^{v-1} p^i`.
pub fn geometric_sum(p: Prime, u: u32, v: u32) -> BigUint {
    (u..v).map(|i| p.pow_big(i)).sum()
}
