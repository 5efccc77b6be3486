//! Formal group laws over finite rings, their `r`-series and Euler classes,
//! torsion points of the Honda law and the divisors they cut out.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact_arith::{vp, Prime};
use crate::pseries::{CoeffRing, Coefficients, Rationals, TruncSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FglKind {
    Additive,
    Multiplicative,
    Honda { height: u32 },
    Custom,
}

impl fmt::Display for FglKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FglKind::Additive => write!(f, "additive"),
            FglKind::Multiplicative => write!(f, "multiplicative"),
            FglKind::Honda { height } => write!(f, "honda({height})"),
            FglKind::Custom => write!(f, "custom"),
        }
    }
}

/// A two-variable series `F(x, y)` that is unital, commutative and associative
/// modulo its truncation. The axioms are checked once, at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalGroupLaw {
    series: TruncSeries,
    kind: FglKind,
}

impl FormalGroupLaw {
    pub fn new(series: TruncSeries, kind: FglKind) -> Result<Self> {
        if series.vars().len() != 2 {
            return Err(Error::structural("a formal group law has two variables"));
        }
        if series.order() < 2 {
            return Err(Error::domain("formal group laws need truncation order at least 2"));
        }
        let fgl = FormalGroupLaw { series, kind };
        fgl.check_axioms()?;
        Ok(fgl)
    }

    /// `F(x, y) = x + y`.
    pub fn additive(ring: &CoeffRing, order: u32) -> Result<Self> {
        let x = TruncSeries::variable(ring, &["x", "y"], order, 0)?;
        let y = x.var_like(1);
        Self::new(x.add(&y)?, FglKind::Additive)
    }

    /// `F(x, y) = x + y + xy`.
    pub fn multiplicative(ring: &CoeffRing, order: u32) -> Result<Self> {
        let x = TruncSeries::variable(ring, &["x", "y"], order, 0)?;
        let y = x.var_like(1);
        Self::new(x.add(&y)?.add(&x.mul(&y)?)?, FglKind::Multiplicative)
    }

    /// The Honda law of height `height`, `f^{-1}(f(x) + f(y))` with logarithm
    /// `f(x) = sum_i x^{p^{ni}} / p^i`, computed over the rationals and reduced
    /// into `ring`. Every coefficient is checked to be `p`-integral.
    ///
    /// The truncation order is raised to at least `p^n + p`.
    pub fn honda(ring: &CoeffRing, height: u32, order: u32) -> Result<Self> {
        if height == 0 {
            return Err(Error::domain("height must be at least 1"));
        }
        let p = ring.prime();
        let pn = p
            .checked_pow(height)
            .filter(|&q| q < 1 << 15)
            .ok_or_else(|| Error::domain("p^n too large for the Honda construction"))?;
        let order = order.max((pn + p.get()) as u32);
        let rational = honda_over_rationals(p, height, order)?;
        let series = rational.map_coefficients(ring, |c| {
            ring.from_rational(c).map_err(|_| {
                Error::Invariant(format!("Honda coefficient {c} is not {p}-integral"))
            })
        })?;
        Self::new(series, FglKind::Honda { height })
    }

    /// Honda law of height `n` over `F_{p^n}`.
    pub fn honda_default(p: Prime, height: u32, order: u32) -> Result<Self> {
        let ring = CoeffRing::conway(p, height as usize)?;
        Self::honda(&ring, height, order)
    }

    pub fn series(&self) -> &TruncSeries {
        &self.series
    }

    pub fn kind(&self) -> &FglKind {
        &self.kind
    }

    pub fn ring(&self) -> &CoeffRing {
        self.series.ring()
    }

    pub fn order(&self) -> u32 {
        self.series.order()
    }

    pub fn prime(&self) -> Prime {
        self.ring().prime()
    }

    /// The coordinate `x` as a one-variable series at this law's order.
    pub fn coordinate(&self) -> TruncSeries {
        TruncSeries::variable(self.ring(), &["x"], self.order(), 0).expect("one variable")
    }

    /// Unit, commutativity and associativity modulo the truncation.
    pub fn check_axioms(&self) -> Result<()> {
        let f = &self.series;
        let x = f.var_like(0);
        let y = f.var_like(1);
        let zero = f.zero_like();
        if f.compose(&[x.clone(), zero.clone()])? != x {
            return Err(Error::Invariant(format!("F(x,0) != x for {}", self.kind)));
        }
        if f.compose(&[zero, y.clone()])? != y {
            return Err(Error::Invariant(format!("F(0,y) != y for {}", self.kind)));
        }
        if f.compose(&[y, x])? != *f {
            return Err(Error::Invariant(format!("F(x,y) != F(y,x) for {}", self.kind)));
        }
        let vars = ["x", "y", "z"];
        let x3 = TruncSeries::variable(self.ring(), &vars, self.order(), 0)?;
        let (y3, z3) = (x3.var_like(1), x3.var_like(2));
        let left = f.compose(&[f.compose(&[x3.clone(), y3.clone()])?, z3.clone()])?;
        let right = f.compose(&[x3, f.compose(&[y3, z3])?])?;
        if left != right {
            return Err(Error::Invariant(format!("associativity fails for {}", self.kind)));
        }
        Ok(())
    }

    /// Formal sum `F(a, b)` of two series sharing a context.
    pub fn sum(&self, a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries> {
        if a.order() > self.order() {
            return Err(Error::structural(format!(
                "context order {} exceeds the law's order {}",
                a.order(),
                self.order()
            )));
        }
        self.series.compose(&[a.clone(), b.clone()])
    }

    /// `[r](a)`, the `r`-fold formal sum of `a`, by double-and-add.
    pub fn multiple(&self, r: u64, a: &TruncSeries) -> Result<TruncSeries> {
        let mut acc = a.zero_like();
        for bit in (0..u64::BITS - r.leading_zeros()).rev() {
            acc = self.sum(&acc, &acc)?;
            if (r >> bit) & 1 == 1 {
                acc = self.sum(&acc, a)?;
            }
        }
        Ok(acc)
    }

    /// The `r`-series `[r](x)`.
    pub fn r_series(&self, r: u64) -> Result<TruncSeries> {
        self.multiple(r, &self.coordinate())
    }

    /// The formal inverse `i(x)` with `F(x, i(x)) = 0`.
    pub fn negation(&self) -> Result<TruncSeries> {
        let x = self.coordinate();
        // F(x, y) = x + y + H(x, y); iterate i = -x - H(x, i)
        let h = self.series.sub(&self.series.var_like(0))?.sub(&self.series.var_like(1))?;
        let mut inv = x.neg();
        for _ in 0..self.order() {
            let next = x.neg().sub(&h.compose(&[x.clone(), inv.clone()])?)?;
            if next == inv {
                break;
            }
            inv = next;
        }
        if !self.sum(&x, &inv)?.is_zero() {
            return Err(Error::Invariant("formal inverse did not converge".into()));
        }
        Ok(inv)
    }

    /// `i(a)` for a point `a` in some context.
    pub fn negate_point(&self, negation: &TruncSeries, a: &TruncSeries) -> Result<TruncSeries> {
        negation.compose(std::slice::from_ref(a))
    }

    /// `e(U - 1) = prod_{r=1}^{p-1} [r](x)` where `U` is the pulled-back
    /// regular representation of `C_p`.
    pub fn euler_class_u_minus_1(&self) -> Result<TruncSeries> {
        let x = self.coordinate();
        let mut acc = x.one_like();
        for r in 1..self.prime().get() {
            acc = acc.mul(&self.multiple(r, &x)?)?;
        }
        Ok(acc)
    }
}

fn honda_over_rationals(p: Prime, height: u32, order: u32) -> Result<TruncSeries<Rationals>> {
    let q = Rationals;
    let mut log_terms = Vec::new();
    let mut i = 0u32;
    while let Some(deg) = p.checked_pow(height * i).filter(|&d| d < u64::from(order)) {
        let den = BigInt::from(p.get()).pow(i);
        log_terms.push((vec![deg as u32], BigRational::new(BigInt::from(1), den)));
        i += 1;
    }
    let log = TruncSeries::from_terms(&q, &["x"], order, log_terms)?;
    let exp = log.reversion()?;
    let sum = log
        .embed(&["x", "y"], &[0])?
        .add(&log.embed(&["x", "y"], &[1])?)?;
    exp.compose(&[sum])
}

/// Result of the socle nonvanishing check in `F_q[x]/x^{p^n}`.
#[derive(Clone, Debug)]
pub struct SocleCheck {
    pub exponent: u64,
    pub nonzero: bool,
    /// `e(U-1)^exponent` in the quotient ring
    pub power: TruncSeries,
}

/// Computes `c = e(U-1)` for the height-`n` Honda law over `F_{p^n}` and tests
/// `c^{(p^n-1)/(p-1)} != 0` in `F_{p^n}[x]/x^{p^n}`.
pub fn socle_nonvanishing_check(p: Prime, height: u32) -> Result<SocleCheck> {
    let fgl = FormalGroupLaw::honda_default(p, height, 0)?;
    socle_check_for(&fgl)
}

/// [`socle_nonvanishing_check`] for an already constructed Honda law.
pub fn socle_check_for(fgl: &FormalGroupLaw) -> Result<SocleCheck> {
    let FglKind::Honda { height } = *fgl.kind() else {
        return Err(Error::domain("socle check needs a Honda law"));
    };
    let p = fgl.prime();
    let pn = p.get().pow(height);
    let d = pn as u32;
    let exponent = (pn - 1) / (p.get() - 1);
    let c = fgl.euler_class_u_minus_1()?.quotient_ring_reduce(0, d)?;
    let mut power = c.one_like();
    for _ in 0..exponent {
        power = power.mul(&c)?.quotient_ring_reduce(0, d)?;
    }
    Ok(SocleCheck { exponent, nonzero: !power.is_zero(), power })
}

/// Points `[j](t)`, `0 <= j < p^k`, of the `p^k`-torsion of a height-`n`
/// Honda law, as elements of `F_q[t]/t^{p^{kn}}`.
#[derive(Clone, Debug)]
pub struct TorsionPoints {
    pub level: u32,
    /// exponent `d` of the quotient `F_q[t]/t^d`
    pub modulus: u32,
    pub points: Vec<TruncSeries>,
}

impl TorsionPoints {
    /// The zero element of the quotient ring.
    pub fn context(&self) -> &TruncSeries {
        &self.points[0]
    }
}

/// Torsion points `[j](t)` in `F_q[t]/t^{p^{kn}}`. If the law is truncated
/// below `p^{kn} + 1` it is rebuilt at that order first.
pub fn torsion_points(fgl: &FormalGroupLaw, level: u32) -> Result<TorsionPoints> {
    let FglKind::Honda { height } = *fgl.kind() else {
        return Err(Error::domain("torsion points are computed for Honda laws"));
    };
    let p = fgl.prime();
    let modulus = p
        .checked_pow(level * height)
        .filter(|&d| d < u64::from(u16::MAX))
        .ok_or_else(|| Error::domain(format!("p^(kn) for k={level} is too large")))? as u32;
    let fgl = at_least_order(fgl, modulus + 1)?;
    // at modulus 1 the quotient is F_q itself and t is already zero
    let t = TruncSeries::variable(fgl.ring(), &["t"], modulus, 0)?;
    let count = p.get().pow(level);
    let points = (0..count).map(|j| fgl.multiple(j, &t)).collect::<Result<Vec<_>>>()?;
    Ok(TorsionPoints { level, modulus, points })
}

/// `fgl` itself, or for a Honda law truncated below `order`, the same law
/// rebuilt at `order`.
fn at_least_order(fgl: &FormalGroupLaw, order: u32) -> Result<std::borrow::Cow<'_, FormalGroupLaw>> {
    use std::borrow::Cow;
    if fgl.order() >= order {
        return Ok(Cow::Borrowed(fgl));
    }
    match fgl.kind() {
        FglKind::Honda { height } => Ok(Cow::Owned(FormalGroupLaw::honda(fgl.ring(), *height, order)?)),
        _ => Err(Error::structural(format!(
            "law truncated at order {} but order {order} is needed",
            fgl.order()
        ))),
    }
}

/// The divisor `prod_i (x - a_i)` with coefficients in a quotient ring.
///
/// `chern[i]` is the coefficient of `x^{m-i}`, so `chern[0] = 1` and the
/// coefficient of `x^k` is `chern[m-k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Divisor {
    chern: Vec<TruncSeries>,
}

impl Divisor {
    pub fn degree(&self) -> usize {
        self.chern.len() - 1
    }

    /// `a_i`, the coefficient of `x^{m-i}`.
    pub fn chern(&self, i: usize) -> &TruncSeries {
        &self.chern[i]
    }

    /// Coefficient of `x^k`.
    pub fn coefficient_of_power(&self, k: usize) -> &TruncSeries {
        &self.chern[self.degree() - k]
    }

    /// `a'`, the coefficient of `x`.
    pub fn a_prime(&self) -> Option<&TruncSeries> {
        (self.degree() >= 1).then(|| self.coefficient_of_power(1))
    }

    /// `f(a)` by Horner's rule.
    pub fn evaluate(&self, a: &TruncSeries) -> Result<TruncSeries> {
        let mut acc = a.zero_like();
        for c in &self.chern {
            acc = acc.mul(a)?.add(c)?;
        }
        Ok(acc)
    }

    /// One line per coefficient, the coefficient of `x` labelled `a'`.
    pub fn render(&self) -> String {
        let m = self.degree();
        let mut lines = Vec::new();
        for k in (0..=m).rev() {
            let label = if k == 1 { " (a')".to_string() } else { String::new() };
            lines.push(format!("x^{k}: a_{}{label} = {}", m - k, self.chern[m - k].render()));
        }
        lines.join("\n")
    }
}

/// Expands `prod_i (x - a_i)` for nilpotent points `a_i` sharing a context.
pub fn divisor_from_points(points: &[TruncSeries], context: &TruncSeries) -> Result<Divisor> {
    for a in points {
        if !context.ring().is_zero(&a.constant_term()) {
            return Err(Error::domain("divisor points must be nilpotent"));
        }
    }
    // coefficients of x^0, x^1, ... low to high
    let mut poly = vec![context.one_like()];
    for a in points {
        let mut next = vec![context.zero_like(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c)?;
            next[i] = next[i].sub(&c.mul(a)?)?;
        }
        poly = next;
    }
    poly.reverse();
    Ok(Divisor { chern: poly })
}

/// `c_{p^k}` restricted to the `p^k`-torsion: `prod_{j=1}^{p^k-1} [j](t)`.
pub fn regular_rep_euler_class(fgl: &FormalGroupLaw, level: u32) -> Result<TruncSeries> {
    let tp = torsion_points(fgl, level)?;
    let mut acc = tp.context().one_like();
    for pt in &tp.points[1..] {
        acc = acc.mul(pt)?;
    }
    Ok(acc)
}

/// `sum_{j=1}^{p^k-1} p^{n v_p(j)}`, the expected `t`-valuation of
/// [`regular_rep_euler_class`] before reduction.
pub fn regular_rep_valuation(p: Prime, height: u32, level: u32) -> u64 {
    (1..p.get().pow(level))
        .map(|j| p.get().pow(height * vp(j, p).expect("j > 0")))
        .sum()
}

/// Whether `points` contains zero and is closed under the formal sum and
/// the formal inverse.
pub fn subgroup_divisor_closure_check(points: &[TruncSeries], fgl: &FormalGroupLaw) -> Result<bool> {
    let Some(first) = points.first() else {
        return Ok(false);
    };
    if !points.iter().any(TruncSeries::is_zero) {
        return Ok(false);
    }
    let fgl = at_least_order(fgl, first.order())?;
    let negation = fgl.negation()?.truncate(first.order())?;
    for a in points {
        let neg = fgl.negate_point(&negation, a)?;
        if !points.contains(&neg) {
            return Ok(false);
        }
        for b in points {
            if !points.contains(&fgl.sum(a, b)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
