use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::ring::{CoeffRing, Coefficients};
use crate::error::{Error, Result};

/// A multivariate power series truncated at total degree `order`: terms of
/// total degree `>= order` are discarded, so the truncation is an ideal and
/// every ring operation is exact modulo it.
///
/// At most [`MAX_VARS`] variables are supported. Monomials are packed into a
/// `u64`, 16 bits per variable with the first variable most significant, so
/// the `BTreeMap` order is the lexicographic order on exponent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<R: Coefficients = CoeffRing> {
    ring: R,
    vars: Vec<String>,
    order: u32,
    terms: BTreeMap<u64, R::Elem>,
}

pub const MAX_VARS: usize = 4;
const MAX_ORDER: u32 = u16::MAX as u32;

fn shift(var: usize) -> u32 {
    48 - 16 * var as u32
}

fn pack(exp: &[u32]) -> u64 {
    exp.iter().enumerate().fold(0, |acc, (i, &e)| acc | (u64::from(e) << shift(i)))
}

fn unpack(key: u64, nvars: usize) -> Vec<u32> {
    (0..nvars).map(|i| exponent_of(key, i)).collect()
}

fn exponent_of(key: u64, var: usize) -> u32 {
    ((key >> shift(var)) & 0xffff) as u32
}

fn key_degree(key: u64) -> u32 {
    (0..MAX_VARS).map(|i| exponent_of(key, i)).sum()
}

impl<R: Coefficients> TruncSeries<R> {
    pub fn zero(ring: &R, vars: &[&str], order: u32) -> Result<Self> {
        let names: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        if names.len() > MAX_VARS {
            return Err(Error::structural(format!("at most {MAX_VARS} variables are supported")));
        }
        if order > MAX_ORDER {
            return Err(Error::structural(format!("truncation order above {MAX_ORDER}")));
        }
        for (i, v) in names.iter().enumerate() {
            if names[..i].contains(v) {
                return Err(Error::structural(format!("duplicate variable {v}")));
            }
        }
        Ok(TruncSeries { ring: ring.clone(), vars: names, order, terms: BTreeMap::new() })
    }

    /// Builds a series from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(ring: &R, vars: &[&str], order: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, R::Elem)>,
    {
        let mut s = Self::zero(ring, vars, order)?;
        for (exp, c) in terms {
            if exp.len() != s.vars.len() {
                return Err(Error::structural("exponent vector length differs from variable count"));
            }
            if exp.iter().any(|&e| e >= MAX_ORDER) {
                return Err(Error::structural("exponent too large"));
            }
            s.add_term(pack(&exp), c);
        }
        Ok(s)
    }

    /// The same (empty) shape as `self`.
    pub fn zero_like(&self) -> Self {
        TruncSeries { ring: self.ring.clone(), vars: self.vars.clone(), order: self.order, terms: BTreeMap::new() }
    }

    pub fn constant_like(&self, c: R::Elem) -> Self {
        let mut s = self.zero_like();
        s.add_term(0, c);
        s
    }

    pub fn one_like(&self) -> Self {
        self.constant_like(self.ring.one())
    }

    /// The coordinate series for variable `idx`.
    pub fn var_like(&self, idx: usize) -> Self {
        let mut s = self.zero_like();
        s.add_term(1 << shift(idx), self.ring.one());
        s
    }

    pub fn variable(ring: &R, vars: &[&str], order: u32, idx: usize) -> Result<Self> {
        if idx >= vars.len() {
            return Err(Error::structural(format!("no variable with index {idx}")));
        }
        Ok(Self::zero(ring, vars, order)?.var_like(idx))
    }

    /// Accumulates `c * exp`, dropping it if it falls outside the truncation.
    fn add_term(&mut self, key: u64, c: R::Elem) {
        if key_degree(key) >= self.order || self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = self.ring.add(existing, &c);
                if self.ring.is_zero(&sum) {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Terms in lexicographic order of exponent vectors.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, &R::Elem)> + '_ {
        let n = self.vars.len();
        self.terms.iter().map(move |(&k, c)| (unpack(k, n), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &[u32]) -> R::Elem {
        if exp.len() != self.vars.len() || exp.iter().any(|&e| e >= MAX_ORDER) {
            return self.ring.zero();
        }
        self.terms.get(&pack(exp)).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> R::Elem {
        self.terms.get(&0).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Coefficient of `x^e` in a one-variable series.
    pub fn coeff1(&self, e: u32) -> R::Elem {
        self.coefficient(&[e])
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::structural("coefficient rings differ"));
        }
        if self.vars != other.vars {
            return Err(Error::structural(format!(
                "variables differ: {:?} vs {:?}",
                self.vars, other.vars
            )));
        }
        if self.order != other.order {
            return Err(Error::structural(format!(
                "truncation orders differ: {} vs {}",
                self.order, other.order
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.zero_like();
        for (&e, c) in &self.terms {
            out.terms.insert(e, self.ring.neg(c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = self.zero_like();
        for (&e, a) in &self.terms {
            out.add_term(e, self.ring.mul(a, c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = self.zero_like();
        let rhs: Vec<(u64, u32, &R::Elem)> =
            other.terms.iter().map(|(&k, c)| (k, key_degree(k), c)).collect();
        for (&ea, ca) in &self.terms {
            let da = key_degree(ea);
            for &(eb, db, cb) in &rhs {
                if da + db >= self.order {
                    continue;
                }
                // fields cannot carry: each sum is below the order
                out.add_term(ea + eb, self.ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Lowers the truncation order, discarding terms that no longer fit.
    pub fn truncate(&self, order: u32) -> Result<Self> {
        if order > self.order {
            return Err(Error::structural(format!(
                "cannot raise truncation from {} to {order}",
                self.order
            )));
        }
        let mut out = self.clone();
        out.order = order;
        out.terms.retain(|&e, _| key_degree(e) < order);
        Ok(out)
    }

    /// Substitutes `inner[i]` for the `i`-th variable of `self`.
    ///
    /// The inner series must share ring, variables and order, and have zero
    /// constant term. The result is truncated at `min(self.order, inner order)`,
    /// which is exact because every inner series has valuation at least one.
    pub fn compose(&self, inner: &[Self]) -> Result<Self> {
        if inner.len() != self.vars.len() {
            return Err(Error::structural(format!(
                "compose needs {} inner series, got {}",
                self.vars.len(),
                inner.len()
            )));
        }
        let Some(first) = inner.first() else {
            return Err(Error::structural("compose needs at least one variable"));
        };
        if first.ring != self.ring {
            return Err(Error::structural("coefficient rings differ"));
        }
        for s in inner {
            first.check_compatible(s)?;
            if !self.ring.is_zero(&s.constant_term()) {
                return Err(Error::domain("inner series must have zero constant term"));
            }
        }
        let order = self.order.min(first.order);
        let inner: Vec<Self> = inner.iter().map(|s| s.truncate(order)).collect::<Result<_>>()?;
        let base = inner[0].zero_like();

        // Horner in the first variable; the coefficient of each power of it
        // is evaluated through cached powers of the other inner series.
        let g = &inner[0];
        let mut powers: Vec<Vec<Self>> =
            inner[1..].iter().map(|s| vec![s.one_like(), s.clone()]).collect();
        let mut groups: Vec<(u32, Self)> = Vec::new();
        for (&key, c) in &self.terms {
            let d = exponent_of(key, 0);
            let mut term = base.constant_like(c.clone());
            for (v, table) in powers.iter_mut().enumerate() {
                let k = exponent_of(key, v + 1) as usize;
                if k == 0 {
                    continue;
                }
                while table.len() <= k {
                    let next = table.last().unwrap().mul_unchecked(&inner[v + 1]);
                    table.push(next);
                }
                term = term.mul_unchecked(&table[k]);
                if term.is_zero() {
                    break;
                }
            }
            match groups.last_mut() {
                Some((gd, acc)) if *gd == d => {
                    for (ee, cc) in term.terms {
                        acc.add_term(ee, cc);
                    }
                }
                _ => groups.push((d, term)),
            }
        }
        let mut acc = base;
        let mut prev: Option<u32> = None;
        for (d, coeff) in groups.into_iter().rev() {
            if let Some(pd) = prev {
                acc = acc.mul_unchecked(&g.pow(u64::from(pd - d)));
            }
            for (ee, cc) in coeff.terms {
                acc.add_term(ee, cc);
            }
            prev = Some(d);
        }
        if let Some(pd) = prev {
            acc = acc.mul_unchecked(&g.pow(u64::from(pd)));
        }
        Ok(acc)
    }

    /// Compositional inverse of a one-variable series `c x + ...` with `c` a unit.
    pub fn reversion(&self) -> Result<Self> {
        if self.vars.len() != 1 {
            return Err(Error::structural("reversion needs a one-variable series"));
        }
        if !self.ring.is_zero(&self.constant_term()) {
            return Err(Error::domain("reversion needs zero constant term"));
        }
        let lin = self.coeff1(1);
        let lin_inv = self
            .ring
            .inv(&lin)
            .ok_or_else(|| Error::domain("linear coefficient is not a unit"))?;
        let x = self.var_like(0);
        let mut g = x.scale(&lin_inv);
        // each pass fixes at least one more degree
        for _ in 0..self.order {
            let err = x.sub(&self.compose(std::slice::from_ref(&g))?)?;
            if err.is_zero() {
                return Ok(g);
            }
            g = g.add(&err.scale(&lin_inv))?;
        }
        Ok(g)
    }

    /// Smallest total degree carrying a nonzero coefficient; `None` for the zero series.
    pub fn weierstrass_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&e| key_degree(e)).min()
    }

    /// Coefficient of the lowest-degree term of a one-variable series.
    pub fn leading_coefficient(&self) -> Option<R::Elem> {
        let d = self.weierstrass_degree()?;
        self.terms.iter().find(|(&e, _)| key_degree(e) == d).map(|(_, c)| c.clone())
    }

    /// Reduction modulo `t^d` where `t` is variable `var`: drops every term
    /// whose exponent of `t` is at least `d`.
    pub fn quotient_ring_reduce(&self, var: usize, d: u32) -> Result<Self> {
        if var >= self.vars.len() {
            return Err(Error::structural(format!("no variable with index {var}")));
        }
        if d > self.order {
            return Err(Error::structural(format!(
                "modulus exponent {d} exceeds truncation order {}",
                self.order
            )));
        }
        let mut out = self.clone();
        out.terms.retain(|&e, _| exponent_of(e, var) < d);
        Ok(out)
    }

    /// Applies a coefficient map into another ring, e.g. reduction mod `p`.
    pub fn map_coefficients<S, F>(&self, target: &S, mut f: F) -> Result<TruncSeries<S>>
    where
        S: Coefficients,
        F: FnMut(&R::Elem) -> Result<S::Elem>,
    {
        let mut out = TruncSeries { ring: target.clone(), vars: self.vars.clone(), order: self.order, terms: BTreeMap::new() };
        for (&e, c) in &self.terms {
            out.add_term(e, f(c)?);
        }
        Ok(out)
    }

    /// Same coefficients under new variable names.
    pub fn rename(&self, vars: &[&str]) -> Result<Self> {
        if vars.len() != self.vars.len() {
            return Err(Error::structural("rename needs the same number of variables"));
        }
        let mut out = Self::zero(&self.ring, vars, self.order)?;
        out.terms = self.terms.clone();
        Ok(out)
    }

    /// Embeds a series in a space with more variables; `positions[i]` is the
    /// target index of variable `i`.
    pub fn embed(&self, vars: &[&str], positions: &[usize]) -> Result<Self> {
        if positions.len() != self.vars.len() || positions.iter().any(|&i| i >= vars.len()) {
            return Err(Error::structural("bad embedding"));
        }
        let mut out = Self::zero(&self.ring, vars, self.order)?;
        for (e, c) in self.terms() {
            let mut exp = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                exp[positions[i]] += k;
            }
            out.add_term(pack(&exp), c.clone());
        }
        Ok(out)
    }

    /// `[{"exp":[..],"coeff":".."}, ...]`, sorted by exponent vector.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(e, c)| json!({"exp": e, "coeff": self.ring.render(c)}))
                .collect(),
        )
    }

    /// Human-readable form, lowest total degree first.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut items: Vec<(Vec<u32>, &R::Elem)> = self.terms().collect();
        items.sort_by_key(|(e, _)| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
        let parts: Vec<String> = items
            .into_iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .zip(&self.vars)
                    .filter(|(k, _)| **k > 0)
                    .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                    .collect();
                let coeff = self.ring.render(c);
                match (mono.is_empty(), self.ring.is_one(c)) {
                    (true, _) => coeff,
                    (false, true) => mono.join("*"),
                    (false, false) => format!("({coeff})*{}", mono.join("*")),
                }
            })
            .collect();
        format!("{} + O({})", parts.join(" + "), self.order)
    }
}

impl<R: Coefficients> std::fmt::Display for TruncSeries<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::Prime;
    use crate::pseries::ring::Rationals;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn ring(p: u64, a: u32) -> CoeffRing {
        CoeffRing::cyclic(Prime::new(p).unwrap(), a).unwrap()
    }

    fn uni(r: &CoeffRing, order: u32, coeffs: &[i64]) -> TruncSeries {
        TruncSeries::from_terms(
            r,
            &["x"],
            order,
            coeffs.iter().enumerate().map(|(i, &c)| (vec![i as u32], r.from_int(c))),
        )
        .unwrap()
    }

    #[test]
    fn basic_products() {
        let f2 = ring(2, 1);
        let x = TruncSeries::variable(&f2, &["x", "y"], 3, 0).unwrap();
        let y = TruncSeries::variable(&f2, &["x", "y"], 3, 1).unwrap();
        let xy = x.mul(&y).unwrap();
        assert_eq!(xy.num_terms(), 1);
        assert_eq!(xy.coefficient(&[1, 1]), f2.one());

        let z4 = ring(2, 2);
        let s = uni(&z4, 3, &[1, 1]);
        assert_eq!(s.mul(&s).unwrap(), uni(&z4, 3, &[1, 2, 1]));

        let x2 = uni(&f2, 3, &[0, 0, 1]);
        assert!(x2.mul(&x2).unwrap().is_zero());
    }

    #[test]
    fn mismatches_are_structural() {
        let f2 = ring(2, 1);
        let a = uni(&f2, 3, &[1]);
        let b = uni(&f2, 4, &[1]);
        assert!(matches!(a.add(&b), Err(Error::Structural(_))));
        let c = uni(&ring(3, 1), 3, &[1]);
        assert!(matches!(a.mul(&c), Err(Error::Structural(_))));
        let d = TruncSeries::variable(&f2, &["t"], 3, 0).unwrap();
        assert!(matches!(a.mul(&d), Err(Error::Structural(_))));
        assert!(TruncSeries::zero(&f2, &["x", "x"], 3).is_err());
    }

    #[test]
    fn composition() {
        let f2 = ring(2, 1);
        let x = uni(&f2, 4, &[0, 1]);
        let y = TruncSeries::variable(&f2, &["y"], 4, 0).unwrap();
        assert_eq!(x.rename(&["q"]).unwrap().compose(std::slice::from_ref(&y)).unwrap(), y);

        // (x + x^2) o (x + x^2) = x + x^2 + x^2 + 2x^3 + x^4 = x + 0 + 0 mod (2, x^4)
        let s = uni(&f2, 4, &[0, 1, 1]);
        let c = s.compose(std::slice::from_ref(&s)).unwrap();
        assert_eq!(c, uni(&f2, 4, &[0, 1]));

        let zero = uni(&f2, 4, &[]);
        let t = uni(&f2, 4, &[1, 1, 1]);
        assert_eq!(t.compose(&[zero]).unwrap(), uni(&f2, 4, &[1]));

        let bad = uni(&f2, 4, &[1, 1]);
        assert!(matches!(s.compose(&[bad]), Err(Error::Domain(_))));
    }

    #[test]
    fn reversion_catalan() {
        // inverse of x + x^2 is sum (-1)^{k} C_k x^{k+1}
        let z = ring(3, 20);
        let s = uni(&z, 9, &[0, 1, 1]);
        let g = s.reversion().unwrap();
        let catalan = [1i64, 1, 2, 5, 14, 42, 132, 429];
        let expected: Vec<i64> = std::iter::once(0)
            .chain(catalan.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c } else { -c }))
            .collect();
        assert_eq!(g, uni(&z, 9, &expected));

        let f2 = ring(2, 1);
        let x = uni(&f2, 5, &[0, 1]);
        assert_eq!(x.reversion().unwrap(), x);

        let z4 = ring(2, 2);
        assert!(matches!(uni(&z4, 5, &[0, 2]).reversion(), Err(Error::Domain(_))));
    }

    #[test]
    fn weierstrass() {
        let f2 = ring(2, 1);
        assert_eq!(uni(&f2, 8, &[0, 0, 0, 1, 0, 1]).weierstrass_degree(), Some(3));
        assert_eq!(uni(&f2, 8, &[]).weierstrass_degree(), None);
        let z4 = ring(2, 2);
        assert_eq!(uni(&z4, 8, &[0, 2]).weierstrass_degree(), Some(1));
    }

    #[test]
    fn quotient_reduction() {
        let f2 = ring(2, 1);
        let t = TruncSeries::from_terms(&f2, &["t"], 6, [(vec![3], f2.one()), (vec![1], f2.one())]).unwrap();
        let r = t.quotient_ring_reduce(0, 2).unwrap();
        assert_eq!(r, TruncSeries::variable(&f2, &["t"], 6, 0).unwrap());

        let xt2 = TruncSeries::from_terms(&f2, &["x", "t"], 6, [(vec![1, 2], f2.one())]).unwrap();
        assert!(xt2.quotient_ring_reduce(1, 2).unwrap().is_zero());
        assert_eq!(t.quotient_ring_reduce(0, 6).unwrap(), t);
        assert!(matches!(t.quotient_ring_reduce(0, 7), Err(Error::Structural(_))));
    }

    #[test]
    fn json_format() {
        let f4 = CoeffRing::conway(Prime::new(2).unwrap(), 2).unwrap();
        let s = TruncSeries::from_terms(
            &f4,
            &["x", "y"],
            3,
            [(vec![1, 0], f4.one()), (vec![0, 1], f4.generator().unwrap())],
        )
        .unwrap();
        assert_eq!(
            s.to_json().to_string(),
            r#"[{"exp":[0,1],"coeff":"0+1*w"},{"exp":[1,0],"coeff":"1+0*w"}]"#
        );
    }

    #[test]
    fn rational_series() {
        let q = Rationals;
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let s = TruncSeries::from_terms(&q, &["x"], 4, [(vec![1], q.one()), (vec![2], half)]).unwrap();
        let g = s.reversion().unwrap();
        assert_eq!(s.compose(std::slice::from_ref(&g)).unwrap(), s.var_like(0));
        assert_eq!(g.coeff1(2), BigRational::new(BigInt::from(-1), BigInt::from(2)));
    }
}
