//! The verification grid: every executable identity of the crate, evaluated
//! over a parameter grid and collected into a [`VerificationReport`].

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact_arith::{gaussian_binomial, vp, vp_binomial, vp_factorial, GaussianParams, Prime};
use crate::fgl::{
    divisor_from_points, socle_check_for, subgroup_divisor_closure_check, torsion_points, FormalGroupLaw,
};
use crate::lattice_count::{count_sublattices, expected_count, LatticeIndexSpec, DEFAULT_BUDGET};
use crate::pseries::{CoeffRing, Coefficients};
use crate::subgroup_basis::{generate_basis, top_weight, verify_recursion, FamilyParams};
use crate::sym_rank::{
    default_depth, enumerate_orbit_types, hom_count_oracle, rank_d, sylow_valuation_check,
    transfer_unit_witness, DEFAULT_HOM_BUDGET_K,
};

/// Largest basis the grid will generate.
pub const BASIS_LIMIT: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Arith,
    Lattices,
    Ranks,
    Fgl,
    Basis,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Arith, Suite::Lattices, Suite::Ranks, Suite::Fgl, Suite::Basis];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Arith => "arith",
            Suite::Lattices => "lattices",
            Suite::Ranks => "ranks",
            Suite::Fgl => "fgl",
            Suite::Basis => "basis",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown suite {s:?}")))
    }
}

/// Grid selection. With `prime` or `height` set, only matching cells run,
/// and cells that the default grid would skip for size run anyway and
/// report their budget errors.
#[derive(Clone, Copy, Debug)]
pub struct GridOptions {
    pub extended: bool,
    pub prime: Option<Prime>,
    pub height: Option<u32>,
    pub budget: u64,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { extended: false, prime: None, height: None, budget: DEFAULT_BUDGET }
    }
}

impl GridOptions {
    fn primes(&self, default: &[u64]) -> Vec<Prime> {
        match self.prime {
            Some(p) => vec![p],
            None => default.iter().map(|&p| Prime::new(p).expect("prime")).collect(),
        }
    }

    fn heights(&self, default: impl IntoIterator<Item = u32>) -> Vec<u32> {
        match self.height {
            Some(h) => vec![h],
            None => default.into_iter().collect(),
        }
    }

    fn explicit(&self) -> bool {
        self.prime.is_some() || self.height.is_some()
    }
}

/// One grid cell.
#[derive(Clone, Debug)]
pub struct Cell {
    pub suite: Suite,
    pub check: String,
    pub params: Vec<(&'static str, u64)>,
    pub pass: bool,
    /// why the cell failed
    pub witness: Option<String>,
    /// informational value reported for passing cells
    pub note: Option<String>,
    pub elapsed: Duration,
}

impl Cell {
    pub fn params_string(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    }

    fn key(&self) -> (Suite, &str, &[(&'static str, u64)]) {
        (self.suite, &self.check, &self.params)
    }
}

enum Outcome {
    Pass,
    PassWith(String),
    Fail(String),
}

fn run_cell(
    suite: Suite,
    check: impl Into<String>,
    params: &[(&'static str, u64)],
    f: impl FnOnce() -> Result<Outcome>,
) -> Cell {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (pass, witness, note) = match outcome {
        Ok(Outcome::Pass) => (true, None, None),
        Ok(Outcome::PassWith(n)) => (true, None, Some(n)),
        Ok(Outcome::Fail(w)) => (false, Some(w), None),
        Err(e) => (false, Some(e.to_string()), None),
    };
    Cell { suite, check: check.into(), params: params.to_vec(), pass, witness, note, elapsed }
}

fn expect_eq<T: PartialEq + fmt::Display>(got: T, want: T) -> Outcome {
    if got == want {
        Outcome::Pass
    } else {
        Outcome::Fail(format!("got {got}, expected {want}"))
    }
}

/// Results of a grid run, sorted by suite, check and parameters.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub cells: Vec<Cell>,
}

impl VerificationReport {
    pub fn passed(&self) -> usize {
        self.cells.iter().filter(|c| c.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.cells.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn render_text(&self, timing: bool) -> String {
        let mut out = String::new();
        for c in &self.cells {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let mut line = format!("{status} {:<8} {} [{}]", c.suite.name(), c.check, c.params_string());
            if let Some(n) = &c.note {
                line.push_str(&format!(" ({n})"));
            }
            if let Some(w) = &c.witness {
                line.push_str(&format!(": {w}"));
            }
            if timing {
                line.push_str(&format!(" {}us", c.elapsed.as_micros()));
            }
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&format!(
            "{} cells, {} passed, {} failed\n",
            self.cells.len(),
            self.passed(),
            self.failed()
        ));
        out
    }

    pub fn render_csv(&self, timing: bool) -> String {
        let mut out = String::from("suite,check,params,pass,detail");
        if timing {
            out.push_str(",micros");
        }
        out.push('\n');
        for c in &self.cells {
            let detail = c.witness.as_ref().or(c.note.as_ref()).cloned().unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}",
                csv_field(c.suite.name()),
                csv_field(&c.check),
                csv_field(&c.params_string()),
                c.pass,
                csv_field(&detail)
            ));
            if timing {
                out.push_str(&format!(",{}", c.elapsed.as_micros()));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, timing: bool) -> serde_json::Value {
        let cells: Vec<_> = self
            .cells
            .iter()
            .map(|c| {
                let params: serde_json::Map<String, serde_json::Value> =
                    c.params.iter().map(|(k, v)| (k.to_string(), json!(v.to_string()))).collect();
                let mut cell = json!({
                    "suite": c.suite.name(),
                    "check": c.check,
                    "params": params,
                    "pass": c.pass,
                    "witness": c.witness,
                    "note": c.note,
                });
                if timing {
                    cell["micros"] = json!(c.elapsed.as_micros().to_string());
                }
                cell
            })
            .collect();
        json!({
            "summary": {
                "cells": self.cells.len().to_string(),
                "passed": self.passed().to_string(),
                "failed": self.failed().to_string(),
            },
            "cells": cells,
        })
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs the given suites, one thread per suite.
pub fn run(suites: &[Suite], opts: &GridOptions) -> VerificationReport {
    let mut cells: Vec<Cell> = std::thread::scope(|scope| {
        let handles: Vec<_> = suites
            .iter()
            .map(|&suite| scope.spawn(move || run_suite(suite, opts)))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite thread panicked")).collect()
    });
    cells.sort_by(|a, b| a.key().cmp(&b.key()));
    VerificationReport { cells }
}

pub fn run_suite(suite: Suite, opts: &GridOptions) -> Vec<Cell> {
    match suite {
        Suite::Arith => arith_cells(opts),
        Suite::Lattices => lattice_cells(opts),
        Suite::Ranks => rank_cells(opts),
        Suite::Fgl => fgl_cells(opts),
        Suite::Basis => basis_cells(opts),
    }
}

fn arith_cells(opts: &GridOptions) -> Vec<Cell> {
    let s = Suite::Arith;
    let kmax = if opts.extended { 7 } else { 5 };
    let mmax: u64 = if opts.extended { 1000 } else { 200 };
    let mut cells = Vec::new();
    for p in opts.primes(&[2, 3]) {
        for k in 0..=kmax {
            let params = [("p", p.get()), ("k", u64::from(k))];
            let Some(pk) = p.checked_pow(k) else { continue };
            cells.push(run_cell(s, "vp_factorial(p^k)=(p^k-1)/(p-1)", &params, || {
                Ok(expect_eq(vp_factorial(pk, p), (pk - 1) / (p.get() - 1)))
            }));
            cells.push(run_cell(s, "vp_binomial(p^k,i)=k-vp(i)", &params, || {
                for i in 1..pk {
                    let want = k - vp(i, p)?;
                    let got = vp_binomial(pk, i, p);
                    if got != want {
                        return Ok(Outcome::Fail(format!("i={i}: got {got}, expected {want}")));
                    }
                }
                Ok(Outcome::Pass)
            }));
        }
        for k in 1..=3 {
            let params = [("p", p.get()), ("k", u64::from(k))];
            cells.push(run_cell(s, "sylow lhs=rhs", &params, || {
                let rows = sylow_valuation_check(k, p, opts.budget)?;
                Ok(match rows.iter().find(|r| !r.holds()) {
                    Some(r) => Outcome::Fail(format!("i={}: lhs {} rhs {}", r.i, r.lhs, r.rhs)),
                    None => Outcome::Pass,
                })
            }));
        }
        cells.push(run_cell(s, "kummer=legendre", &[("p", p.get()), ("mmax", mmax)], || {
            for m in 0..=mmax {
                for i in 0..=m {
                    let legendre = vp_factorial(m, p) - vp_factorial(i, p) - vp_factorial(m - i, p);
                    if u64::from(vp_binomial(m, i, p)) != legendre {
                        return Ok(Outcome::Fail(format!("m={m} i={i}")));
                    }
                }
            }
            Ok(Outcome::Pass)
        }));
    }
    for p in opts.primes(&[2, 3, 5]) {
        cells.push(run_cell(s, "transfer witness iff not p-power", &[("p", p.get()), ("mmax", mmax)], || {
            for m in 1..=mmax {
                let witness = transfer_unit_witness(m, p);
                if witness.is_some() == p.is_power(m) {
                    return Ok(Outcome::Fail(format!("m={m}: witness {witness:?}")));
                }
                if let Some(w) = witness {
                    if w.i + w.j != m || vp_binomial(m, w.i, p) != 0 {
                        return Ok(Outcome::Fail(format!("m={m}: invalid witness {w:?}")));
                    }
                }
            }
            Ok(Outcome::Pass)
        }));
    }
    cells
}

fn lattice_cells(opts: &GridOptions) -> Vec<Cell> {
    let (nmax, kmax) = if opts.extended { (4, 5) } else { (3, 4) };
    let mut cells = Vec::new();
    for p in opts.primes(&[2, 3, 5]) {
        for n in opts.heights(1..=nmax) {
            for k in 0..=kmax {
                let params = [("p", p.get()), ("n", u64::from(n)), ("k", u64::from(k))];
                let Ok(spec) = LatticeIndexSpec::new(p, n, k) else {
                    cells.push(run_cell(Suite::Lattices, "count=gaussian", &params, || {
                        LatticeIndexSpec::new(p, n, k).map(|_| Outcome::Pass)
                    }));
                    continue;
                };
                if !opts.explicit() && expected_count(spec) > BigUint::from(opts.budget) {
                    continue;
                }
                cells.push(run_cell(Suite::Lattices, "count=gaussian", &params, || {
                    let count = count_sublattices(spec, opts.budget)?;
                    Ok(expect_eq(count, gaussian_binomial(spec.gaussian_params())))
                }));
            }
        }
    }
    cells
}

fn rank_cells(opts: &GridOptions) -> Vec<Cell> {
    let ext = opts.extended;
    let mut cells = Vec::new();
    for p in opts.primes(&[2, 3]) {
        let (kmax, heights): (u32, Vec<u32>) = match (p.get(), ext) {
            (2, false) => (6, vec![1, 2]),
            (2, true) => (7, vec![1, 2, 3]),
            (3, false) => (4, vec![1]),
            (3, true) => (5, vec![1, 2]),
            (q, _) => (q as u32 + 1, vec![1, 2]),
        };
        let hom_limit = DEFAULT_HOM_BUDGET_K.max(if ext { 7 } else { 0 });
        for n in opts.heights(heights) {
            for k in 0..=kmax {
                let params = [("p", p.get()), ("n", u64::from(n)), ("k", u64::from(k))];
                let depth = default_depth(k, p).max(3);
                cells.push(run_cell(Suite::Ranks, "d(k)=hom count", &params, || {
                    let oracle = hom_count_oracle(k, p, n, depth, hom_limit)?;
                    Ok(expect_eq(rank_d(k, p, n), oracle))
                }));
                cells.push(run_cell(Suite::Ranks, "d(k)=#orbit types", &params, || {
                    let types = enumerate_orbit_types(k, p, n, opts.budget)?;
                    Ok(expect_eq(rank_d(k, p, n), BigUint::from(types.len())))
                }));
            }
        }
    }
    cells
}

fn fgl_cells(opts: &GridOptions) -> Vec<Cell> {
    let s = Suite::Fgl;
    let limit: u64 = if opts.extended { 125 } else { 27 };
    let default_primes: &[u64] = if opts.extended { &[2, 3, 5] } else { &[2, 3] };
    let mut cells = Vec::new();
    for p in opts.primes(default_primes) {
        let pp = p.get();
        let heights: Vec<u32> = (1..).take_while(|&n| pp.pow(n) <= limit).collect();
        for n in opts.heights(heights) {
            let params = [("p", pp), ("n", u64::from(n))];
            let Some(pn) = p.checked_pow(n) else { continue };
            let mut built = None;
            cells.push(run_cell(s, "honda axioms", &params, || {
                let fgl = FormalGroupLaw::honda_default(p, n, 0)?;
                let note = format!("order {}", fgl.order());
                built = Some(fgl);
                Ok(Outcome::PassWith(note))
            }));
            let Some(fgl) = built else { continue };
            cells.push(run_cell(s, format!("[{pp}](x)=x^{pn}"), &params, || {
                let series = fgl.r_series(pp)?;
                let x = fgl.coordinate();
                let want = x.pow(pn);
                Ok(if series == want {
                    Outcome::Pass
                } else {
                    Outcome::Fail(series.render())
                })
            }));
            cells.push(run_cell(s, "[p](x) weierstrass degree p^n", &params, || {
                let degree = fgl.r_series(pp)?.weierstrass_degree();
                Ok(expect_eq(format!("{degree:?}"), format!("{:?}", Some(pn as u32))))
            }));
            cells.extend(euler_and_linear_cells(&fgl, &params));
            cells.push(run_cell(s, "socle power nonzero", &params, || {
                let check = socle_check_for(&fgl)?;
                Ok(if check.nonzero {
                    Outcome::PassWith(format!("exponent {}", check.exponent))
                } else {
                    Outcome::Fail(format!("c^{} vanishes", check.exponent))
                })
            }));
            let max_level = if pn * pn <= limit { 2 } else { 1 };
            for level in 1..=max_level {
                let mut lp = params.to_vec();
                lp.push(("level", u64::from(level)));
                cells.push(run_cell(s, "divisor roots and closure", &lp, || divisor_root_check(&fgl, level)));
            }
        }
        if opts.height.is_none_or(|h| h == 1) {
            let ring = CoeffRing::prime_field(p);
            let order = (pp + 2).min(64) as u32;
            let mult = FormalGroupLaw::multiplicative(&ring, order);
            let mp = [("p", pp)];
            match mult {
                Ok(m) => {
                    cells.push(run_cell(s, "multiplicative axioms", &mp, || Ok(Outcome::Pass)));
                    cells.push(run_cell(s, "multiplicative [p](x)=x^p", &mp, || {
                        Ok(expect_eq(m.r_series(pp)?, m.coordinate().pow(pp)))
                    }));
                    cells.extend(euler_and_linear_cells(&m, &mp));
                }
                Err(e) => cells.push(run_cell(s, "multiplicative axioms", &mp, || Err(e))),
            }
        }
        if opts.height.is_none() {
            let ring = CoeffRing::prime_field(p);
            let mp = [("p", pp)];
            match FormalGroupLaw::additive(&ring, (pp + 2).min(64) as u32) {
                Ok(a) => {
                    cells.push(run_cell(s, "additive axioms", &mp, || Ok(Outcome::Pass)));
                    cells.push(run_cell(s, "additive [p](x)=0", &mp, || {
                        Ok(expect_eq(a.r_series(pp)?.is_zero(), true))
                    }));
                }
                Err(e) => cells.push(run_cell(s, "additive axioms", &mp, || Err(e))),
            }
        }
    }
    cells
}

fn euler_and_linear_cells(fgl: &FormalGroupLaw, params: &[(&'static str, u64)]) -> Vec<Cell> {
    let s = Suite::Fgl;
    let p = fgl.prime();
    let mut cells = vec![run_cell(s, format!("{}: e(U-1) degree p-1, lead (p-1)!", fgl.kind()), params, || {
        let e = fgl.euler_class_u_minus_1()?;
        let degree = e.weierstrass_degree();
        if degree != Some(p.get() as u32 - 1) {
            return Ok(Outcome::Fail(format!("weierstrass degree {degree:?}")));
        }
        let ring = e.ring();
        let factorial = (1..p.get()).fold(1u64, |acc, r| acc * r % p.get());
        let want = ring.from_int(factorial as i64);
        let lead = e.coeff1(p.get() as u32 - 1);
        Ok(if ring.is_zero(&ring.sub(&lead, &want)) {
            Outcome::Pass
        } else {
            Outcome::Fail(format!("leading coefficient {}", ring.render(&lead)))
        })
    })];
    cells.push(run_cell(s, format!("{}: [r](x)=rx mod x^2, r<=10", fgl.kind()), params, || {
        let x = fgl.coordinate();
        for r in 0..=10u64 {
            let series = fgl.r_series(r)?.truncate(2)?;
            let want = x.scale(&x.ring().from_int(r as i64)).truncate(2)?;
            if series != want {
                return Ok(Outcome::Fail(format!("r={r}: {}", series.render())));
            }
        }
        Ok(Outcome::Pass)
    }));
    cells
}

fn divisor_root_check(fgl: &FormalGroupLaw, level: u32) -> Result<Outcome> {
    let tp = torsion_points(fgl, level)?;
    let divisor = divisor_from_points(&tp.points, tp.context())?;
    for (j, pt) in tp.points.iter().enumerate() {
        let value = divisor.evaluate(pt)?;
        if !value.is_zero() {
            return Ok(Outcome::Fail(format!("f([{j}](t)) = {}", value.render())));
        }
    }
    if !subgroup_divisor_closure_check(&tp.points, fgl)? {
        return Ok(Outcome::Fail("torsion points not closed under the group law".into()));
    }
    Ok(Outcome::PassWith(format!("{} points mod t^{}", tp.points.len(), tp.modulus)))
}

fn basis_cells(opts: &GridOptions) -> Vec<Cell> {
    let s = Suite::Basis;
    let mmax = if opts.extended { 5 } else { 4 };
    let mut cells = Vec::new();
    for p in opts.primes(&[2, 3]) {
        for n in opts.heights(1..=3) {
            for m in 0..=mmax {
                let params = [("p", p.get()), ("n", u64::from(n)), ("m", u64::from(m))];
                let expected = match GaussianParams::new(p, n, m) {
                    Ok(g) => gaussian_binomial(g),
                    Err(e) => {
                        cells.push(run_cell(s, "|C|=gaussian", &params, || Err(e)));
                        continue;
                    }
                };
                if expected > BigUint::from(BASIS_LIMIT) {
                    if opts.explicit() {
                        cells.push(run_cell(s, "|C|=gaussian", &params, || {
                            Err(Error::budget("basis generation", &expected, BASIS_LIMIT))
                        }));
                    }
                    continue;
                }
                let mut generated = None;
                cells.push(run_cell(s, "disjoint union", &params, || {
                    generated = Some(generate_basis(m, n, p)?);
                    Ok(Outcome::Pass)
                }));
                let Some(basis) = generated else { continue };
                cells.push(run_cell(s, "|C|=gaussian", &params, || {
                    Ok(expect_eq(BigUint::from(basis.len()), expected.clone()))
                }));
                cells.push(run_cell(s, "unique top weight", &params, || {
                    Ok(match top_weight(&basis, p) {
                        Some((w, true)) => Outcome::PassWith(format!("weight {w}")),
                        Some((w, false)) => Outcome::Fail(format!("weight {w} attained more than once")),
                        None => Outcome::Fail("empty basis".into()),
                    })
                }));
                if n == 2 {
                    cells.push(run_cell(s, "n=2 closed form (p^(m+1)-1)/(p-1)", &params, || {
                        let closed = (p.pow_big(m + 1) - 1u32) / (p.get() - 1);
                        Ok(expect_eq(BigUint::from(basis.len()), closed))
                    }));
                }
                for k in 0..=m {
                    for l in 1..=n {
                        let mut rp = params.to_vec();
                        rp.extend([("k", u64::from(k)), ("l", u64::from(l))]);
                        cells.push(run_cell(s, "recursion C'_kl=C_kl", &rp, || {
                            let check = verify_recursion(&FamilyParams::new(k, l, m, n, p)?)?;
                            Ok(if check.holds() {
                                Outcome::Pass
                            } else {
                                Outcome::Fail(check.failures.join("; "))
                            })
                        }));
                    }
                }
            }
        }
    }
    cells
}
