//! Monomial bases for the ring of functions on the scheme of subgroups of
//! order `p^m` of a height-`n` formal group, and for the quotients `E'(k,l)`
//! used to prove that they are bases.
//!
//! Monomials live in the variables `a_0, ..., a_{m-1}`, where `a_j` is the
//! `(p^m - p^j)`-th Chern class of the permutation representation `V_{p^m}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{gaussian_binomial, GaussianParams, Prime};

/// `sigma(u, v) = sum_{i=u}^{v-1} p^i`.
pub fn sigma(u: u32, v: u32, p: Prime) -> Result<u64> {
    if u > v {
        return Err(Error::domain(format!("sigma({u}, {v}) needs u <= v")));
    }
    (u..v)
        .map(|i| p.checked_pow(i))
        .sum::<Option<u64>>()
        .ok_or_else(|| Error::domain("sigma overflows u64"))
}

/// A pair of sequences `l = mu_0 < ... < mu_r <= n` and
/// `k <= nu_0 < ... < nu_r = m`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MuNuPair {
    pub mu: Vec<u32>,
    pub nu: Vec<u32>,
}

/// Parameters `(k, l, m, n, p)` of the family `C_{kl}`; the main basis is `k = 0, l = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    pub k: u32,
    pub l: u32,
    pub m: u32,
    pub n: u32,
    pub p: Prime,
}

impl FamilyParams {
    pub fn new(k: u32, l: u32, m: u32, n: u32, p: Prime) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("height n must be at least 1"));
        }
        if k > m {
            return Err(Error::domain(format!("k = {k} exceeds m = {m}")));
        }
        if l == 0 || l > n {
            return Err(Error::domain(format!("l = {l} outside 1..={n}")));
        }
        Ok(FamilyParams { k, l, m, n, p })
    }

    pub fn main(m: u32, n: u32, p: Prime) -> Result<Self> {
        Self::new(0, 1, m, n, p)
    }

    fn validate(&self, pair: &MuNuPair) -> Result<()> {
        let MuNuPair { mu, nu } = pair;
        let malformed = |why: &str| Err(Error::structural(format!("malformed pair {mu:?}/{nu:?}: {why}")));
        if mu.is_empty() || mu.len() != nu.len() {
            return malformed("sequences must be nonempty and of equal length");
        }
        if mu[0] != self.l || mu.windows(2).any(|w| w[0] >= w[1]) || *mu.last().unwrap() > self.n {
            return malformed("mu must start at l, increase strictly and stay <= n");
        }
        if nu[0] < self.k || nu.windows(2).any(|w| w[0] >= w[1]) || *nu.last().unwrap() != self.m {
            return malformed("nu must start at >= k, increase strictly and end at m");
        }
        Ok(())
    }

    /// Every admissible `(mu, nu)`, in lexicographic order.
    pub fn pairs(&self) -> Vec<MuNuPair> {
        let upper: Vec<u32> = (self.l + 1..=self.n).collect();
        let lower: Vec<u32> = (self.k..self.m).collect();
        let mut out = Vec::new();
        for r in 0..=upper.len().min(lower.len()) {
            for mu_tail in subsets(&upper, r) {
                for nu_head in subsets(&lower, r) {
                    let mut mu = vec![self.l];
                    mu.extend(&mu_tail);
                    let mut nu = nu_head.clone();
                    nu.push(self.m);
                    out.push(MuNuPair { mu, nu });
                }
            }
        }
        out.sort();
        out
    }
}

/// Size-`r` subsets of a sorted slice, each sorted.
fn subsets(items: &[u32], r: usize) -> Vec<Vec<u32>> {
    if r == 0 {
        return vec![vec![]];
    }
    if items.len() < r {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], r - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A monomial `b * a^alpha` together with the pair it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisMonomial {
    pub pair: MuNuPair,
    pub b_exponents: Vec<u64>,
    pub alpha: Vec<u64>,
    pub total: Vec<u64>,
}

impl BasisMonomial {
    /// `a0^2*a1`, or `1` for the empty monomial.
    pub fn render(&self) -> String {
        render_monomial(&self.total, |j| format!("a{j}"))
    }

    /// The same monomial with `a_j` written as `c_{p^m - p^j}`.
    pub fn render_chern(&self, p: Prime) -> String {
        let m = self.total.len() as u32;
        render_monomial(&self.total, |j| format!("c{}", p.get().pow(m) - p.get().pow(j as u32)))
    }

    /// Weight with `a_j` in degree `p^m - p^j`.
    pub fn weight(&self, p: Prime) -> u64 {
        let m = self.total.len() as u32;
        self.total
            .iter()
            .enumerate()
            .map(|(j, &e)| e * (p.get().pow(m) - p.get().pow(j as u32)))
            .sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mu": self.pair.mu,
            "nu": self.pair.nu,
            "alpha": self.alpha,
            "total": self.total,
            "string": self.render(),
        })
    }
}

fn render_monomial(exps: &[u64], name: impl Fn(usize) -> String) -> String {
    let mut s = String::new();
    for (j, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !s.is_empty() {
            s.push('*');
        }
        s.push_str(&name(j));
        if e > 1 {
            write!(s, "^{e}").unwrap();
        }
    }
    if s.is_empty() {
        s.push('1');
    }
    s
}

/// `rho_j` for `0 <= j < m`. Entries below `k` are 0, meaning `alpha_j` is
/// forced to vanish. For `j >= k` the locator `nu_{i-1} <= j < nu_i` is read
/// with `nu_{-1} = k`.
pub fn rho_vector(pair: &MuNuPair, params: &FamilyParams) -> Result<Vec<u64>> {
    params.validate(pair)?;
    let p = params.p;
    Ok((0..params.m)
        .map(|j| {
            if j < params.k {
                return 0;
            }
            let i = pair.nu.iter().take_while(|&&v| v <= j).count();
            let mu = pair.mu[i];
            if mu < params.n {
                p.get().pow(mu)
            } else {
                1
            }
        })
        .collect())
}

/// `b = prod_{i<r} a_{nu_i}^{sigma(mu_i, mu_{i+1})}` as an exponent vector.
fn b_exponents(pair: &MuNuPair, params: &FamilyParams) -> Result<Vec<u64>> {
    let mut b = vec![0u64; params.m as usize];
    for i in 0..pair.mu.len() - 1 {
        b[pair.nu[i] as usize] += sigma(pair.mu[i], pair.mu[i + 1], params.p)?;
    }
    Ok(b)
}

/// `C_{kl}(mu, nu)` with `alpha` in lexicographic order.
pub fn monomials_for_pair(pair: &MuNuPair, params: &FamilyParams) -> Result<Vec<BasisMonomial>> {
    let rho = rho_vector(pair, params)?;
    let b = b_exponents(pair, params)?;
    let bounds: Vec<u64> = rho.iter().map(|&r| r.max(1)).collect();
    let mut out = Vec::new();
    let mut alpha = vec![0u64; bounds.len()];
    loop {
        let total = b.iter().zip(&alpha).map(|(x, y)| x + y).collect();
        out.push(BasisMonomial { pair: pair.clone(), b_exponents: b.clone(), alpha: alpha.clone(), total });
        // odometer, last index fastest so the order is lexicographic
        let mut pos = bounds.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            alpha[pos] += 1;
            if alpha[pos] < bounds[pos] {
                break;
            }
            alpha[pos] = 0;
        }
    }
}

/// `C_{kl}`: the union of `C_{kl}(mu, nu)` over all admissible pairs, in
/// pair order then `alpha` order. Fails if two monomials coincide.
pub fn generate_basis_kl(params: &FamilyParams) -> Result<Vec<BasisMonomial>> {
    let mut out = Vec::new();
    for pair in params.pairs() {
        out.extend(monomials_for_pair(&pair, params)?);
    }
    let mut seen: BTreeMap<&[u64], &MuNuPair> = BTreeMap::new();
    for mono in &out {
        if let Some(prev) = seen.insert(&mono.total, &mono.pair) {
            return Err(Error::Invariant(format!(
                "monomial {} arises from both {:?}/{:?} and {:?}/{:?}",
                mono.render(),
                prev.mu,
                prev.nu,
                mono.pair.mu,
                mono.pair.nu
            )));
        }
    }
    Ok(out)
}

/// The basis `C` of the ring of subgroups of order `p^m`.
pub fn generate_basis(m: u32, n: u32, p: Prime) -> Result<Vec<BasisMonomial>> {
    generate_basis_kl(&FamilyParams::main(m, n, p)?)
}

/// Outcome of checking `C'_{kl} = C_{kl}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RecursionCheck {
    pub degenerate: bool,
    pub first_piece: usize,
    pub second_piece: usize,
    pub target: usize,
    pub failures: Vec<String>,
}

impl RecursionCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

fn shifted(monos: &[BasisMonomial], var: usize, by: u64) -> Vec<Vec<u64>> {
    monos
        .iter()
        .map(|t| {
            let mut e = t.total.clone();
            e[var] += by;
            e
        })
        .collect()
}

fn sorted(mut v: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    v.sort();
    v
}

/// Checks that `C'_{kl} = {a_k^j t : t in C_{k+1,l}, j < p^l} ⊔ {a_k^{p^l} t : t in C_{k,l+1}}`
/// equals `C_{kl}` as a multiset, together with the piecewise identities for
/// each `(mu, nu)`. Vacuous when `k = m` or `l = n`.
pub fn verify_recursion(params: &FamilyParams) -> Result<RecursionCheck> {
    let FamilyParams { k, l, m, n, p } = *params;
    if k == m || l == n {
        return Ok(RecursionCheck { degenerate: true, ..Default::default() });
    }
    let lower = FamilyParams::new(k + 1, l, m, n, p)?;
    let wider = FamilyParams::new(k, l + 1, m, n, p)?;
    let a_k = k as usize;
    let p_l = p.get().pow(l);
    let mut check = RecursionCheck::default();

    let target = generate_basis_kl(params)?;
    check.target = target.len();

    let mut first = Vec::new();
    for pair in lower.pairs() {
        let piece = monomials_for_pair(&pair, &lower)?;
        let mut lifted = Vec::new();
        for j in 0..p_l {
            lifted.extend(shifted(&piece, a_k, j));
        }
        // the same (mu, nu) read in C_{kl}, where nu_0 > k
        let expected = monomials_for_pair(&pair, params)?;
        let expected: Vec<Vec<u64>> = expected.into_iter().map(|b| b.total).collect();
        if sorted(lifted.clone()) != sorted(expected) {
            check.failures.push(format!("first piece differs for {:?}/{:?}", pair.mu, pair.nu));
        }
        first.extend(lifted);
    }

    let mut second = Vec::new();
    for pair in wider.pairs() {
        let piece = monomials_for_pair(&pair, &wider)?;
        let lifted = shifted(&piece, a_k, p_l);
        let reindexed = if pair.nu[0] == k {
            let mut mu = pair.mu.clone();
            mu[0] = l;
            MuNuPair { mu, nu: pair.nu.clone() }
        } else {
            let mut mu = vec![l];
            mu.extend(&pair.mu);
            let mut nu = vec![k];
            nu.extend(&pair.nu);
            MuNuPair { mu, nu }
        };
        let expected: Vec<Vec<u64>> =
            monomials_for_pair(&reindexed, params)?.into_iter().map(|b| b.total).collect();
        if sorted(lifted.clone()) != sorted(expected) {
            check.failures.push(format!(
                "second piece differs for {:?}/{:?} -> {:?}/{:?}",
                pair.mu, pair.nu, reindexed.mu, reindexed.nu
            ));
        }
        second.extend(lifted);
    }
    check.first_piece = first.len();
    check.second_piece = second.len();

    let mut union = first;
    union.extend(second);
    let union = sorted(union);
    if union.windows(2).any(|w| w[0] == w[1]) {
        check.failures.push("the two pieces of C'_kl overlap".to_string());
    }
    if union != sorted(target.into_iter().map(|b| b.total).collect()) {
        check.failures.push("C'_kl differs from C_kl".to_string());
    }
    Ok(check)
}

/// `(|C|, d̄(m), equal)`.
pub fn cardinality_check(m: u32, n: u32, p: Prime) -> Result<(BigUint, BigUint, bool)> {
    let size = BigUint::from(generate_basis(m, n, p)?.len());
    let expected = gaussian_binomial(GaussianParams::new(p, n, m)?);
    let ok = size == expected;
    Ok((size, expected, ok))
}

/// The largest weight in `basis` and whether exactly one monomial attains it.
pub fn top_weight(basis: &[BasisMonomial], p: Prime) -> Option<(u64, bool)> {
    let max = basis.iter().map(|b| b.weight(p)).max()?;
    let count = basis.iter().filter(|b| b.weight(p) == max).count();
    Some((max, count == 1))
}
