//! The acceptance criteria, one check per criterion. Each prints a
//! `PASS`/`FAIL` line with its wall time; the test fails if any criterion
//! fails or overruns its time limit.

use std::time::{Duration, Instant};

use msym_core::fgl::{
    divisor_from_points, socle_nonvanishing_check, subgroup_divisor_closure_check, torsion_points, FormalGroupLaw,
};
use msym_core::lattice_count::{count_sublattices, LatticeIndexSpec, DEFAULT_BUDGET};
use msym_core::pseries::{CoeffRing, Coefficients};
use msym_core::subgroup_basis::{cardinality_check, generate_basis, verify_recursion, FamilyParams};
use msym_core::sym_rank::{hom_count_oracle, rank_d, sylow_valuation_check, transfer_unit_witness, DEFAULT_HOM_BUDGET_K};
use msym_core::{gaussian_binomial, vp, vp_binomial, vp_factorial, Error, GaussianParams, Prime};
use num_bigint::BigUint;

type Outcome = Result<String, String>;

fn p(v: u64) -> Prime {
    Prime::new(v).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lattice_counts() -> Outcome {
    let mut cells = 0;
    for pp in [2, 3, 5] {
        for n in 1..=3 {
            for k in 0..=4 {
                let spec = LatticeIndexSpec::new(p(pp), n, k).unwrap();
                let expected = gaussian_binomial(spec.gaussian_params());
                match count_sublattices(spec, DEFAULT_BUDGET) {
                    Ok(count) => {
                        ensure(count == expected, || format!("p={pp} n={n} k={k}: {count} != {expected}"))?;
                        cells += 1;
                    }
                    Err(Error::Budget { .. }) if expected > BigUint::from(DEFAULT_BUDGET) => {}
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
    }
    Ok(format!("{cells} (p, n, k) within budget"))
}

fn rank_identity() -> Outcome {
    let grid = [(2, 1, 6), (2, 2, 6), (3, 1, 4)];
    for (pp, n, kmax) in grid {
        for k in 0..=kmax {
            let oracle = hom_count_oracle(k, p(pp), n, 3, DEFAULT_HOM_BUDGET_K).map_err(|e| e.to_string())?;
            let d = rank_d(k, p(pp), n);
            ensure(d == oracle, || format!("p={pp} n={n} k={k}: d={d}, homs={oracle}"))?;
        }
    }
    Ok("d(k) = #Hom(Z_p^n, Sigma_k)/conj".into())
}

fn valuation_identities() -> Outcome {
    for pp in [2, 3] {
        for k in 0..=5 {
            let pk = p(pp).checked_pow(k).unwrap();
            ensure(vp_factorial(pk, p(pp)) == (pk - 1) / (pp - 1), || format!("vp(p^{k}!) at p={pp}"))?;
            for i in 1..pk {
                let want = k - vp(i, p(pp)).unwrap();
                ensure(vp_binomial(pk, i, p(pp)) == want, || format!("vp C({pk},{i}) at p={pp}"))?;
            }
        }
        for k in 1..=3 {
            let rows = sylow_valuation_check(k, p(pp), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            if let Some(r) = rows.iter().find(|r| !r.holds()) {
                return Err(format!("sylow p={pp} k={k} i={}: {} != {}", r.i, r.lhs, r.rhs));
            }
        }
    }
    Ok("Legendre, Kummer and Sylow rows".into())
}

fn kummer_witness() -> Outcome {
    for pp in [2, 3, 5] {
        for m in 1..=200 {
            let w = transfer_unit_witness(m, p(pp));
            ensure(w.is_some() != p(pp).is_power(m), || format!("p={pp} m={m}: {w:?}"))?;
        }
    }
    Ok("m <= 200".into())
}

fn honda_grid() -> Vec<(u64, u32)> {
    vec![(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)]
}

fn fgl_axioms_and_height() -> Outcome {
    for (pp, n) in honda_grid() {
        // construction checks unit, commutativity and associativity
        let fgl = FormalGroupLaw::honda_default(p(pp), n, 0).map_err(|e| e.to_string())?;
        let pn = pp.pow(n);
        ensure(u64::from(fgl.order()) >= pn + pp, || format!("order {} too small", fgl.order()))?;
        let degree = fgl.r_series(pp).map_err(|e| e.to_string())?.weierstrass_degree();
        ensure(degree == Some(pn as u32), || format!("p={pp} n={n}: degree {degree:?}"))?;
    }
    for pp in [2, 3] {
        let ring = CoeffRing::cyclic(p(pp), 3).unwrap();
        FormalGroupLaw::additive(&ring, 10).map_err(|e| e.to_string())?;
        FormalGroupLaw::multiplicative(&ring, 10).map_err(|e| e.to_string())?;
    }
    Ok("Honda laws of height n have [p]-series of degree p^n".into())
}

fn euler_identities() -> Outcome {
    let mut laws: Vec<FormalGroupLaw> =
        honda_grid().into_iter().map(|(pp, n)| FormalGroupLaw::honda_default(p(pp), n, 0).unwrap()).collect();
    for pp in [2, 3, 5] {
        laws.push(FormalGroupLaw::multiplicative(&CoeffRing::prime_field(p(pp)), 12).unwrap());
        laws.push(FormalGroupLaw::additive(&CoeffRing::prime_field(p(pp)), 12).unwrap());
    }
    for fgl in &laws {
        let pp = fgl.prime().get();
        let ring = fgl.ring();
        let x = fgl.coordinate();
        let e = fgl.euler_class_u_minus_1().map_err(|e| e.to_string())?;
        ensure(e.weierstrass_degree() == Some(pp as u32 - 1), || format!("{}: e(U-1) = {e}", fgl.kind()))?;
        let factorial = (1..pp).product::<u64>() % pp;
        ensure(e.leading_coefficient() == Some(ring.from_int(factorial as i64)), || {
            format!("{}: leading coefficient of {e}", fgl.kind())
        })?;
        for r in 1..=10u64 {
            let linear = fgl.r_series(r).map_err(|e| e.to_string())?.truncate(2).unwrap();
            ensure(linear == x.scale(&ring.from_int(r as i64)).truncate(2).unwrap(), || {
                format!("{}: [{r}](x) = {linear} mod x^2", fgl.kind())
            })?;
        }
    }
    Ok(format!("{} laws", laws.len()))
}

fn socle_nonvanishing() -> Outcome {
    for (pp, n) in honda_grid() {
        let check = socle_nonvanishing_check(p(pp), n).map_err(|e| e.to_string())?;
        ensure(check.nonzero, || format!("p={pp} n={n}: c^{} = 0", check.exponent))?;
    }
    Ok("c^((p^n-1)/(p-1)) != 0 in F_q[x]/x^(p^n)".into())
}

fn basis_grid() -> Vec<(u64, u32, u32)> {
    let mut out = Vec::new();
    for pp in [2, 3] {
        for n in 1..=3 {
            for m in 0..=4 {
                if gaussian_binomial(GaussianParams::new(p(pp), n, m).unwrap()) <= BigUint::from(100_000u32) {
                    out.push((pp, n, m));
                }
            }
        }
    }
    out
}

fn basis_cardinality() -> Outcome {
    for (pp, n, m) in basis_grid() {
        let (size, expected, ok) = cardinality_check(m, n, p(pp)).map_err(|e| e.to_string())?;
        ensure(ok, || format!("p={pp} n={n} m={m}: |C|={size}, expected {expected}"))?;
    }
    for (m, want) in [(1, 3), (2, 7), (3, 15)] {
        let size = generate_basis(m, 2, p(2)).map_err(|e| e.to_string())?.len();
        ensure(size == want, || format!("p=2 n=2 m={m}: |C|={size}"))?;
    }
    Ok(format!("{} (p, n, m)", basis_grid().len()))
}

fn basis_recursion() -> Outcome {
    let mut checks = 0;
    for (pp, n, m) in basis_grid() {
        for k in 0..=m {
            for l in 1..=n {
                let params = FamilyParams::new(k, l, m, n, p(pp)).unwrap();
                let check = verify_recursion(&params).map_err(|e| e.to_string())?;
                ensure(check.holds(), || format!("p={pp} n={n} m={m} k={k} l={l}: {:?}", check.failures))?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} (k, l) families"))
}

fn divisor_roots() -> Outcome {
    let cases = [(2, 1, 1), (2, 1, 2), (2, 2, 1), (2, 2, 2), (2, 3, 1), (3, 1, 1), (3, 1, 2), (3, 2, 1), (3, 3, 1)];
    for (pp, n, level) in cases {
        let order = (pp as u32).pow(n * level);
        let fgl = FormalGroupLaw::honda_default(p(pp), n, order).map_err(|e| e.to_string())?;
        let tp = torsion_points(&fgl, level).map_err(|e| e.to_string())?;
        let divisor = divisor_from_points(&tp.points, tp.context()).map_err(|e| e.to_string())?;
        for (j, pt) in tp.points.iter().enumerate() {
            let value = divisor.evaluate(pt).map_err(|e| e.to_string())?;
            ensure(value.is_zero(), || format!("p={pp} n={n} level={level}: f([{j}](t)) = {value}"))?;
        }
        let closed = subgroup_divisor_closure_check(&tp.points, &fgl).map_err(|e| e.to_string())?;
        ensure(closed, || format!("p={pp} n={n} level={level}: torsion points not closed"))?;
    }
    Ok(format!("{} torsion subgroups", cases.len()))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "lattice count = gaussian binomial", limit: secs(10), run: lattice_counts },
        Criterion { id: 2, name: "rank d(k) = homomorphism count", limit: secs(60), run: rank_identity },
        Criterion { id: 3, name: "valuation identities", limit: secs(1), run: valuation_identities },
        Criterion { id: 4, name: "transfer witness iff not a p-power", limit: secs(1), run: kummer_witness },
        Criterion { id: 5, name: "FGL axioms and [p]-series height", limit: secs(30), run: fgl_axioms_and_height },
        Criterion { id: 6, name: "Euler class identities", limit: secs(5), run: euler_identities },
        Criterion { id: 7, name: "socle power nonvanishing", limit: secs(5), run: socle_nonvanishing },
        Criterion { id: 8, name: "basis cardinality", limit: secs(30), run: basis_cardinality },
        Criterion { id: 9, name: "basis recursion C'_kl = C_kl", limit: secs(30), run: basis_recursion },
        Criterion { id: 10, name: "divisor roots and subgroup closure", limit: secs(10), run: divisor_roots },
    ];

    let mut failures = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (status, detail) = match &outcome {
            Ok(_) if elapsed > c.limit => ("FAIL", format!("took {elapsed:?}, limit {:?}", c.limit)),
            Ok(note) => ("PASS", note.clone()),
            Err(witness) => ("FAIL", witness.clone()),
        };
        println!("criterion {:>2} {status}: {} ({detail}; {} ms)", c.id, c.name, elapsed.as_millis());
        if status == "FAIL" {
            failures.push(format!("criterion {}: {detail}", c.id));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
