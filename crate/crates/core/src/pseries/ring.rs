//! Finite coefficient rings: `F_p`, `Z/p^a` and `F_q = F_p[w]/f(w)`.

use std::fmt::{self, Debug, Write as _};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::Prime;

/// Largest extension degree supported by [`CoeffRing::extension`].
pub const MAX_EXT_DEGREE: usize = 8;

/// Operations a power series needs from its coefficients.
pub trait Coefficients: Clone + PartialEq + Debug {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, if `a` is a unit.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Canonical string form used in serialized output.
    fn render(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingKind {
    PrimeField,
    /// `Z/p^a`
    Cyclic { exponent: u32 },
    /// `F_p[w]/f(w)` with `f` monic irreducible, coefficients low to high.
    Extension { modulus: Vec<u64> },
}

/// A finite coefficient ring of characteristic a power of `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoeffRing {
    p: Prime,
    /// the additive order of 1: `p` or `p^a`
    characteristic: u64,
    kind: RingKind,
}

/// An element in canonical reduced form. Residue rings use slot 0 only; for
/// `F_q` the slots are the coefficients of `1, w, w^2, ...`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem([u64; MAX_EXT_DEGREE]);

impl Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&c| c != 0).unwrap_or(0);
        write!(f, "{:?}", &self.0[..=last])
    }
}

impl RingElem {
    pub fn coeffs(&self) -> &[u64; MAX_EXT_DEGREE] {
        &self.0
    }
}

// Conway polynomials, coefficients low to high.
const CONWAY: &[(u64, &[u64])] = &[
    (2, &[1, 1, 1]),
    (2, &[1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 1]),
    (2, &[1, 0, 1, 0, 0, 1]),
    (2, &[1, 1, 0, 1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (3, &[2, 2, 1]),
    (3, &[1, 2, 0, 1]),
    (3, &[2, 0, 0, 2, 1]),
    (3, &[1, 2, 0, 0, 0, 1]),
    (3, &[2, 2, 1, 0, 2, 0, 1]),
    (5, &[2, 4, 1]),
    (5, &[3, 3, 0, 1]),
    (5, &[2, 4, 4, 0, 1]),
    (7, &[3, 6, 1]),
    (7, &[4, 0, 6, 1]),
];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

/// Inverse of `a` modulo `m`, if it exists.
fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

impl CoeffRing {
    pub fn prime_field(p: Prime) -> Self {
        CoeffRing { p, characteristic: p.get(), kind: RingKind::PrimeField }
    }

    /// `Z/p^a`, `a >= 1`, with `p^a < 2^62`.
    pub fn cyclic(p: Prime, exponent: u32) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::domain("Z/p^a needs a >= 1"));
        }
        let characteristic = p
            .checked_pow(exponent)
            .filter(|&m| m < (1 << 62))
            .ok_or_else(|| Error::domain(format!("{p}^{exponent} exceeds the supported modulus")))?;
        if exponent == 1 {
            return Ok(Self::prime_field(p));
        }
        Ok(CoeffRing { p, characteristic, kind: RingKind::Cyclic { exponent } })
    }

    /// `F_p[w]/f(w)`; `modulus` lists the coefficients of `f` from low to high
    /// and must be monic and irreducible over `F_p`.
    pub fn extension(p: Prime, modulus: &[u64]) -> Result<Self> {
        let deg = modulus.len().saturating_sub(1);
        if deg == 0 || deg > MAX_EXT_DEGREE {
            return Err(Error::domain(format!("extension degree must be in 1..={MAX_EXT_DEGREE}")));
        }
        if modulus[deg] != 1 || modulus.iter().any(|&c| c >= p.get()) {
            return Err(Error::domain("modulus must be monic with reduced coefficients"));
        }
        if !is_irreducible(modulus, p.get()) {
            return Err(Error::domain(format!("{} is reducible over F_{p}", render_poly(modulus))));
        }
        if deg == 1 {
            return Ok(Self::prime_field(p));
        }
        Ok(CoeffRing {
            p,
            characteristic: p.get(),
            kind: RingKind::Extension { modulus: modulus.to_vec() },
        })
    }

    /// `F_{p^degree}` defined by the shipped Conway polynomial.
    pub fn conway(p: Prime, degree: usize) -> Result<Self> {
        if degree == 1 {
            return Ok(Self::prime_field(p));
        }
        let (_, poly) = CONWAY
            .iter()
            .find(|(q, f)| *q == p.get() && f.len() == degree + 1)
            .ok_or_else(|| Error::domain(format!("no shipped polynomial for F_{p}^{degree}")))?;
        Self::extension(p, poly)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn kind(&self) -> &RingKind {
        &self.kind
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    /// Dimension over `F_p` for fields, 1 otherwise.
    pub fn degree(&self) -> usize {
        match &self.kind {
            RingKind::Extension { modulus } => modulus.len() - 1,
            _ => 1,
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self.kind, RingKind::Cyclic { .. })
    }

    /// Number of elements.
    pub fn size(&self) -> u64 {
        self.characteristic.pow(self.degree() as u32)
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            RingKind::PrimeField => format!("F_{}", self.p),
            RingKind::Cyclic { exponent } => format!("Z/{}^{}", self.p, exponent),
            RingKind::Extension { modulus } => {
                format!("F_{}^{}[w]/({})", self.p, modulus.len() - 1, render_poly(modulus))
            }
        }
    }

    /// Element with the given coefficients (reduced); slots beyond the degree are ignored.
    pub fn elem(&self, coeffs: &[u64]) -> RingElem {
        let mut out = [0u64; MAX_EXT_DEGREE];
        for (slot, &c) in out.iter_mut().zip(coeffs).take(self.degree()) {
            *slot = c % self.characteristic;
        }
        RingElem(out)
    }

    /// The generator `w` of an extension field.
    pub fn generator(&self) -> Option<RingElem> {
        (self.degree() > 1).then(|| self.elem(&[0, 1]))
    }

    /// Image of a rational with denominator prime to `p`.
    pub fn from_rational(&self, q: &BigRational) -> Result<RingElem> {
        let m = BigInt::from(self.characteristic);
        let den = q.denom().mod_floor(&m).to_u64().unwrap();
        let den_inv = inv_mod(den, self.characteristic).ok_or_else(|| {
            Error::Domain(format!("{q} is not {}-integral", self.p))
        })?;
        let num = q.numer().mod_floor(&m).to_u64().unwrap();
        Ok(self.elem(&[mul_mod(num, den_inv, self.characteristic)]))
    }

    /// Every element, in increasing coefficient order. Only sensible for small rings.
    pub fn elements(&self) -> Vec<RingElem> {
        let d = self.degree();
        let total = self.size();
        (0..total)
            .map(|mut idx| {
                let mut c = [0u64; MAX_EXT_DEGREE];
                for slot in c.iter_mut().take(d) {
                    *slot = idx % self.characteristic;
                    idx /= self.characteristic;
                }
                RingElem(c)
            })
            .collect()
    }

    fn pow_elem(&self, a: &RingElem, mut e: u64) -> RingElem {
        let mut base = *a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl Coefficients for CoeffRing {
    type Elem = RingElem;

    fn zero(&self) -> RingElem {
        RingElem([0; MAX_EXT_DEGREE])
    }

    fn one(&self) -> RingElem {
        self.from_int(1)
    }

    fn from_int(&self, n: i64) -> RingElem {
        let r = (n as i128).rem_euclid(self.characteristic as i128) as u64;
        self.elem(&[r])
    }

    fn is_zero(&self, a: &RingElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let m = self.characteristic;
        let mut out = [0u64; MAX_EXT_DEGREE];
        for i in 0..self.degree() {
            let s = a.0[i] + b.0[i];
            out[i] = if s >= m { s - m } else { s };
        }
        RingElem(out)
    }

    fn neg(&self, a: &RingElem) -> RingElem {
        let m = self.characteristic;
        let mut out = [0u64; MAX_EXT_DEGREE];
        for i in 0..self.degree() {
            out[i] = if a.0[i] == 0 { 0 } else { m - a.0[i] };
        }
        RingElem(out)
    }

    fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let m = self.characteristic;
        match &self.kind {
            RingKind::PrimeField | RingKind::Cyclic { .. } => self.elem(&[mul_mod(a.0[0], b.0[0], m)]),
            RingKind::Extension { modulus } => {
                let d = modulus.len() - 1;
                let mut prod = [0u64; 2 * MAX_EXT_DEGREE];
                for i in 0..d {
                    if a.0[i] == 0 {
                        continue;
                    }
                    for j in 0..d {
                        prod[i + j] = (prod[i + j] + a.0[i] * b.0[j]) % m;
                    }
                }
                // w^d = -(f_0 + f_1 w + ... + f_{d-1} w^{d-1})
                for top in (d..2 * d - 1).rev() {
                    let c = prod[top];
                    if c == 0 {
                        continue;
                    }
                    prod[top] = 0;
                    for (i, &f) in modulus[..d].iter().enumerate() {
                        let idx = top - d + i;
                        prod[idx] = (prod[idx] + (m - c) * f) % m;
                    }
                }
                let mut out = [0u64; MAX_EXT_DEGREE];
                out[..d].copy_from_slice(&prod[..d]);
                RingElem(out)
            }
        }
    }

    fn inv(&self, a: &RingElem) -> Option<RingElem> {
        if self.is_zero(a) {
            return None;
        }
        match &self.kind {
            RingKind::PrimeField | RingKind::Cyclic { .. } => {
                inv_mod(a.0[0], self.characteristic).map(|x| self.elem(&[x]))
            }
            RingKind::Extension { .. } => Some(self.pow_elem(a, self.size() - 2)),
        }
    }

    fn render(&self, a: &RingElem) -> String {
        match &self.kind {
            RingKind::Extension { modulus } => {
                let mut s = String::new();
                for i in 0..modulus.len() - 1 {
                    if i > 0 {
                        s.push('+');
                    }
                    match i {
                        0 => write!(s, "{}", a.0[0]),
                        1 => write!(s, "{}*w", a.0[1]),
                        _ => write!(s, "{}*w^{}", a.0[i], i),
                    }
                    .unwrap();
                }
                s
            }
            _ => a.0[0].to_string(),
        }
    }
}

/// The rationals, used for logarithm computations before reduction mod `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Coefficients for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_int(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }

    fn render(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            let sign = if a.numer().sign() == Sign::Minus { "-" } else { "" };
            format!("{sign}{}/{}", a.numer().abs(), a.denom())
        }
    }
}

fn render_poly(coeffs: &[u64]) -> String {
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "w".to_string(),
            _ => format!("w^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}*{mono}"),
        });
    }
    parts.join("+")
}

/// Remainder of `a` modulo the monic polynomial `b` over `F_p` (low to high).
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - lead) * bc) % p;
            }
        }
        r.pop();
    }
    r
}

/// Irreducibility by trial division with every monic polynomial of degree
/// at most half the degree.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                g.push(x % p);
                x /= p;
            }
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}
