//! Ranks `d(k)` of `E^0 B Sigma_k`, computed from orbit types and checked
//! against a brute-force count of commuting tuples in `Sigma_k`, plus the
//! valuation bookkeeping for transfers from partition subgroups.

use std::cmp::Reverse;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{gaussian_binomial, vp_binomial, vp_factorial, GaussianParams, Prime};

/// Largest `k` for which the homomorphism oracle enumerates `Sigma_k` by default.
pub const DEFAULT_HOM_BUDGET_K: u32 = 7;

/// `d̄(j)` for `j = 0, 1, ...` while `p^j <= k`.
fn orbit_class_counts(k: u32, p: Prime, n: u32) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut j = 0;
    while p.checked_pow(j).is_some_and(|size| size <= u64::from(k)) {
        out.push(gaussian_binomial(GaussianParams { p, n, k: j }));
        j += 1;
    }
    out
}

/// Coefficients `0..=k` of `prod_{j>=0} (1 - t^{p^j})^{-d̄(j)}`.
pub fn rank_table(kmax: u32, p: Prime, n: u32) -> Vec<BigUint> {
    let len = kmax as usize + 1;
    let mut coeffs = vec![BigUint::zero(); len];
    coeffs[0] = BigUint::one();
    for (j, classes) in orbit_class_counts(kmax, p, n).into_iter().enumerate() {
        let step = p.checked_pow(j as u32).unwrap() as usize;
        // one factor 1/(1 - t^step) per orbit class
        let classes = classes.to_u64().expect("class count fits u64 for feasible k");
        for _ in 0..classes {
            for d in step..len {
                let prev = coeffs[d - step].clone();
                coeffs[d] += prev;
            }
        }
    }
    coeffs
}

/// `d(k)`: the number of isomorphism classes of `Z_p^n`-sets of order `k`.
pub fn rank_d(k: u32, p: Prime, n: u32) -> BigUint {
    rank_table(k, p, n).pop().unwrap()
}

/// An isomorphism class of `Z_p^n`-sets, recorded as a multiset of orbits.
/// Each orbit is `(j, c)`: size `p^j`, stabilizer the `c`-th lattice of
/// index `p^j` in the canonical enumeration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitTypeMultiset {
    entries: Vec<(u32, u64)>,
}

impl OrbitTypeMultiset {
    pub fn entries(&self) -> &[(u32, u64)] {
        &self.entries
    }

    pub fn order(&self, p: Prime) -> u64 {
        self.entries.iter().map(|&(j, _)| p.get().pow(j)).sum()
    }

    fn sort_key(&self) -> Vec<(Reverse<u32>, u64)> {
        self.entries.iter().map(|&(j, c)| (Reverse(j), c)).collect()
    }
}

/// All orbit-type multisets of total order `k`, orbit exponents descending
/// and class indices ascending within each multiset and across the list.
pub fn enumerate_orbit_types(k: u32, p: Prime, n: u32, budget: u64) -> Result<Vec<OrbitTypeMultiset>> {
    let total = rank_d(k, p, n);
    if total > BigUint::from(budget) {
        return Err(Error::budget(format!("orbit types of order {k}"), total, budget));
    }
    let mut types: Vec<(u32, u64)> = Vec::new();
    for (j, classes) in orbit_class_counts(k, p, n).into_iter().enumerate() {
        for c in 0..classes.to_u64().unwrap() {
            types.push((j as u32, c));
        }
    }
    types.sort_by_key(|&(j, c)| (Reverse(j), c));

    fn go(
        types: &[(u32, u64)],
        p: u64,
        rest: u64,
        current: &mut Vec<(u32, u64)>,
        out: &mut Vec<OrbitTypeMultiset>,
    ) {
        if rest == 0 {
            out.push(OrbitTypeMultiset { entries: current.clone() });
            return;
        }
        let Some((&(j, c), tail)) = types.split_first() else {
            return;
        };
        let size = p.pow(j);
        let max = rest / size;
        for mult in 0..=max {
            for _ in 0..mult {
                current.push((j, c));
            }
            go(tail, p, rest - mult * size, current, out);
            current.truncate(current.len() - mult as usize);
        }
    }

    let mut out = Vec::new();
    go(&types, p.get(), u64::from(k), &mut Vec::new(), &mut out);
    out.sort_by_cached_key(|m| m.sort_key());
    Ok(out)
}

/// Smallest depth `M` with `p^M >= k`.
pub fn default_depth(k: u32, p: Prime) -> u32 {
    let mut m = 0;
    while p.get().pow(m) < u64::from(k) {
        m += 1;
    }
    m
}

type Perm = Vec<u8>;

fn all_permutations(k: usize) -> Vec<Perm> {
    let mut current: Perm = (0..k as u8).collect();
    let mut out = vec![current.clone()];
    // lexicographic successor
    loop {
        let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..k).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
    out
}

fn commute(a: &[u8], b: &[u8]) -> bool {
    a.iter().zip(b).all(|(&ai, &bi)| a[bi as usize] == b[ai as usize])
}

/// Whether every cycle length of `perm` is a power of `p` at most `p^depth`.
fn has_order_dividing(perm: &[u8], p: u64, depth: u32) -> bool {
    let bound = p.saturating_pow(depth);
    let mut seen = vec![false; perm.len()];
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x] as usize;
            len += 1;
        }
        if len > bound || bound % len != 0 {
            return false;
        }
    }
    true
}

/// Number of `Sigma_k`-conjugacy classes of commuting `n`-tuples of
/// permutations whose orders divide `p^depth`, i.e. of homomorphisms
/// `(Z/p^depth)^n -> Sigma_k` up to conjugacy.
///
/// Counted with Burnside's lemma: the number of orbits is `1/k!` times the
/// number of pairs `(g, tuple)` with `g` centralizing the tuple.
pub fn hom_count_oracle(k: u32, p: Prime, n: u32, depth: u32, max_k: u32) -> Result<BigUint> {
    if k > max_k {
        return Err(Error::budget("hom-count oracle over Sigma_k", format!("k = {k}"), u64::from(max_k)));
    }
    if k > 12 {
        return Err(Error::domain("hom-count oracle supports k <= 12"));
    }
    let group = all_permutations(k as usize);
    let restricted: Vec<&Perm> = group
        .iter()
        .filter(|g| has_order_dividing(g, p.get(), depth))
        .collect();
    let r = restricted.len();
    let words = r.div_ceil(64).max(1);
    let mut commutes = vec![vec![0u64; words]; r];
    for a in 0..r {
        for b in a..r {
            if commute(restricted[a], restricted[b]) {
                commutes[a][b / 64] |= 1 << (b % 64);
                commutes[b][a / 64] |= 1 << (a % 64);
            }
        }
    }

    fn count_tuples(depth: u32, cand: &[u64], commutes: &[Vec<u64>]) -> u64 {
        if depth == 0 {
            return 1;
        }
        let mut total = 0;
        for (w, &word) in cand.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let a = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if depth == 1 {
                    total += 1;
                } else {
                    let next: Vec<u64> = cand.iter().zip(&commutes[a]).map(|(x, y)| x & y).collect();
                    total += count_tuples(depth - 1, &next, commutes);
                }
            }
        }
        total
    }

    let mut fixed_pairs = BigUint::zero();
    for g in &group {
        let mut cand = vec![0u64; words];
        for (idx, a) in restricted.iter().enumerate() {
            if commute(g, a) {
                cand[idx / 64] |= 1 << (idx % 64);
            }
        }
        fixed_pairs += count_tuples(n, &cand, &commutes);
    }
    let order = BigUint::from(group.len());
    let (classes, rem) = fixed_pairs.div_rem(&order);
    if !rem.is_zero() {
        return Err(Error::Invariant(format!(
            "Burnside sum {fixed_pairs} not divisible by |Sigma_{k}| = {order}"
        )));
    }
    Ok(classes)
}

/// A partition subgroup `Sigma_i x Sigma_j` of `Sigma_{i+j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionSubgroup {
    pub i: u64,
    pub j: u64,
}

/// A partition subgroup of `Sigma_m` of index prime to `p`, if one exists.
///
/// Such a subgroup exists exactly when `m` is not a power of `p`; the first
/// `i` with `v_p(C(m, i)) = 0` is returned.
pub fn transfer_unit_witness(m: u64, p: Prime) -> Option<PartitionSubgroup> {
    (1..m)
        .find(|&i| vp_binomial(m, i, p) == 0)
        .map(|i| PartitionSubgroup { i, j: m - i })
}

/// One row of the Sylow comparison for `L = Sigma_i x Sigma_{p^k - i}`
/// against `H = Sigma_{p^{k-1}}^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SylowRow {
    pub i: u64,
    pub r: u64,
    pub s: u64,
    /// `v_p |H ∩ L|`
    pub lhs: u64,
    /// `v_p |L|`
    pub rhs: u64,
}

impl SylowRow {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// For each `0 < i < p^k`, written `i = p^{k-1} r + s` with `0 <= s < p^{k-1}`,
/// compares `v_p |H ∩ L|` where `H ∩ L = Sigma_{p^{k-1}}^{p-1} x Sigma_s x Sigma_{p^{k-1}-s}`
/// with `v_p |L|`. Equality means `H` contains a Sylow `p`-subgroup of `L`.
pub fn sylow_valuation_check(k: u32, p: Prime, budget: u64) -> Result<Vec<SylowRow>> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let top = p
        .checked_pow(k)
        .filter(|&t| t <= budget)
        .ok_or_else(|| Error::budget("Sylow valuation table", format!("p^{k}"), budget))?;
    let block = top / p.get();
    Ok((1..top)
        .map(|i| {
            let (r, s) = (i / block, i % block);
            let lhs = (p.get() - 1) * vp_factorial(block, p)
                + vp_factorial(s, p)
                + vp_factorial(block - s, p);
            let rhs = vp_factorial(i, p) + vp_factorial(top - i, p);
            SylowRow { i, r, s, lhs, rhs }
        })
        .collect())
}
