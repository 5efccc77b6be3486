//! Sublattices of `Z^n` of index `p^k`, in Hermite normal form.
//!
//! Convention: a lattice is given by an upper-triangular matrix whose rows
//! form a basis. Diagonal entries are powers of `p` whose product is `p^k`,
//! and the entry in row `i`, column `j > i` lies in `[0, d_j)` where `d_j`
//! is the diagonal entry of column `j`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{gaussian_binomial, GaussianParams, Prime};

/// Default cap on the number of matrices an enumeration may produce.
pub const DEFAULT_BUDGET: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeIndexSpec {
    pub p: Prime,
    pub n: u32,
    pub k: u32,
}

impl LatticeIndexSpec {
    pub fn new(p: Prime, n: u32, k: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("lattice dimension must be at least 1"));
        }
        Ok(LatticeIndexSpec { p, n, k })
    }

    pub fn gaussian_params(&self) -> GaussianParams {
        GaussianParams { p: self.p, n: self.n, k: self.k }
    }
}

/// A sublattice of `Z^n` in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HnfLattice {
    rows: Vec<Vec<u64>>,
}

impl HnfLattice {
    /// Validates the HNF reduction conditions.
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::structural("HNF matrix must be square"));
            }
            if row[i] == 0 {
                return Err(Error::structural(format!("zero diagonal entry in row {i}")));
            }
            for j in 0..n {
                let ok = if j < i { row[j] == 0 } else if j > i { row[j] < rows[j][j] } else { true };
                if !ok {
                    return Err(Error::structural(format!(
                        "entry ({i},{j}) = {} violates HNF reduction",
                        row[j]
                    )));
                }
            }
        }
        Ok(HnfLattice { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Product of the diagonal, which is the index in `Z^n`.
    pub fn index(&self) -> BigUint {
        (0..self.dim()).map(|i| BigUint::from(self.rows[i][i])).product()
    }

    pub fn flattened(&self) -> Vec<u64> {
        self.rows.iter().flatten().copied().collect()
    }
}

/// Number of HNF matrices for `spec`: the sum over diagonals of `prod_j d_j^j`.
fn hnf_total(spec: &LatticeIndexSpec) -> BigUint {
    let mut total = BigUint::from(0u32);
    for diag in compositions(spec.k, spec.n as usize) {
        let mut cell = BigUint::from(1u32);
        for (j, &e) in diag.iter().enumerate() {
            cell *= num_traits::pow(spec.p.pow_big(e), j);
        }
        total += cell;
    }
    total
}

/// All `parts`-tuples of nonnegative integers summing to `total`.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn go(rest: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in 0..=rest {
            prefix.push(e);
            go(rest - e, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Every HNF lattice of index `p^k` in `Z^n`, sorted by flattened entries.
pub fn enumerate_sublattices(spec: LatticeIndexSpec, budget: u64) -> Result<Vec<HnfLattice>> {
    let needed = hnf_total(&spec);
    if needed > BigUint::from(budget) {
        return Err(Error::budget(
            format!("lattice enumeration (p={}, n={}, k={})", spec.p, spec.n, spec.k),
            needed,
            budget,
        ));
    }
    let n = spec.n as usize;
    let mut out = Vec::with_capacity(needed.to_usize().unwrap_or(0));
    for diag_exp in compositions(spec.k, n) {
        let diag: Vec<u64> = diag_exp
            .iter()
            .map(|&e| spec.p.checked_pow(e).expect("diagonal entry fits in u64 under budget"))
            .collect();
        // free positions (i, j), i < j, each running over [0, diag[j])
        let slots: Vec<(usize, usize)> =
            (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        let mut rows: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut r = vec![0; n];
                r[i] = diag[i];
                r
            })
            .collect();
        loop {
            out.push(HnfLattice { rows: rows.clone() });
            // odometer increment over the free positions
            let mut advanced = false;
            for &(i, j) in &slots {
                rows[i][j] += 1;
                if rows[i][j] < diag[j] {
                    advanced = true;
                    break;
                }
                rows[i][j] = 0;
            }
            if !advanced {
                break;
            }
        }
    }
    out.sort_by_cached_key(|l| l.flattened());
    Ok(out)
}

/// `|latt_k|`, by enumeration.
pub fn count_sublattices(spec: LatticeIndexSpec, budget: u64) -> Result<BigUint> {
    Ok(BigUint::from(enumerate_sublattices(spec, budget)?.len()))
}

/// The closed-form count, for callers that want it without enumerating.
pub fn expected_count(spec: LatticeIndexSpec) -> BigUint {
    gaussian_binomial(spec.gaussian_params())
}

/// JSON document `{"p":..,"n":..,"k":..,"lattices":[...]}` with row-major matrices.
pub fn lattices_json(spec: LatticeIndexSpec, lattices: &[HnfLattice]) -> serde_json::Value {
    serde_json::json!({
        "p": spec.p.get(),
        "n": spec.n,
        "k": spec.k,
        "lattices": lattices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: u64, n: u32, k: u32) -> LatticeIndexSpec {
        LatticeIndexSpec::new(Prime::new(p).unwrap(), n, k).unwrap()
    }

    #[test]
    fn rank_one() {
        let l = enumerate_sublattices(spec(2, 1, 2), DEFAULT_BUDGET).unwrap();
        assert_eq!(l, vec![HnfLattice::from_rows(vec![vec![4]]).unwrap()]);
        assert_eq!(count_sublattices(spec(5, 1, 4), DEFAULT_BUDGET).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn index_two_in_rank_two() {
        let l = enumerate_sublattices(spec(2, 2, 1), DEFAULT_BUDGET).unwrap();
        let rows: Vec<_> = l.iter().map(|m| m.rows().to_vec()).collect();
        assert_eq!(
            rows,
            vec![
                vec![vec![1, 0], vec![0, 2]],
                vec![vec![1, 1], vec![0, 2]],
                vec![vec![2, 0], vec![0, 1]],
            ]
        );
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_sublattices(spec(3, 2, 2), DEFAULT_BUDGET).unwrap().len(), 13);
        assert_eq!(count_sublattices(spec(2, 3, 2), DEFAULT_BUDGET).unwrap(), BigUint::from(35u32));
        assert_eq!(hnf_total(&spec(2, 3, 2)), expected_count(spec(2, 3, 2)));
    }

    #[test]
    fn budget_error_names_bound() {
        let err = enumerate_sublattices(spec(5, 3, 4), DEFAULT_BUDGET).unwrap_err();
        match err {
            Error::Budget { needed, budget, .. } => {
                assert_eq!(needed, "508431");
                assert_eq!(budget, DEFAULT_BUDGET);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hnf_validation() {
        assert!(HnfLattice::from_rows(vec![vec![2, 1], vec![0, 1]]).is_err());
        assert!(HnfLattice::from_rows(vec![vec![0]]).is_err());
        assert!(HnfLattice::from_rows(vec![vec![1, 0], vec![1, 2]]).is_err());
    }

    #[test]
    fn json_shape() {
        let s = spec(2, 2, 1);
        let l = enumerate_sublattices(s, DEFAULT_BUDGET).unwrap();
        let text = serde_json::to_string(&lattices_json(s, &l)).unwrap();
        assert_eq!(
            text,
            r#"{"p":2,"n":2,"k":1,"lattices":[[[1,0],[0,2]],[[1,1],[0,2]],[[2,0],[0,1]]]}"#
        );
    }
}
