//! Ring axioms and composition laws for truncated series, on random inputs
//! from fixed seeds over each kind of coefficient ring.

use msym_core::pseries::{CoeffRing, Coefficients, TruncSeries};
use msym_core::{Error, Prime};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rings() -> Vec<CoeffRing> {
    let p = |v| Prime::new(v).unwrap();
    vec![
        CoeffRing::prime_field(p(5)),
        CoeffRing::cyclic(p(3), 4).unwrap(),
        CoeffRing::cyclic(p(2), 10).unwrap(),
        CoeffRing::conway(p(2), 3).unwrap(),
        CoeffRing::conway(p(3), 2).unwrap(),
    ]
}

fn random_elem(ring: &CoeffRing, rng: &mut ChaCha8Rng) -> <CoeffRing as Coefficients>::Elem {
    let coords: Vec<u64> = (0..ring.degree()).map(|_| rng.gen_range(0..ring.characteristic())).collect();
    ring.elem(&coords)
}

/// A random series with `terms` monomials; `min_degree` bounds the total
/// degree of every monomial from below.
fn random_series(
    ring: &CoeffRing,
    vars: &[&str],
    order: u32,
    terms: usize,
    min_degree: u32,
    rng: &mut ChaCha8Rng,
) -> TruncSeries {
    let mut list = Vec::new();
    for _ in 0..terms {
        let total = rng.gen_range(min_degree..order);
        let mut exp = vec![0u32; vars.len()];
        for _ in 0..total {
            exp[rng.gen_range(0..vars.len())] += 1;
        }
        list.push((exp, random_elem(ring, rng)));
    }
    TruncSeries::from_terms(ring, vars, order, list).unwrap()
}

const XY: &[&str] = &["x", "y"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), ring_idx in 0usize..5) {
        let ring = &rings()[ring_idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_series(ring, XY, 7, 12, 0, &mut rng);
        let b = random_series(ring, XY, 7, 12, 0, &mut rng);
        let c = random_series(ring, XY, 7, 12, 0, &mut rng);

        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
        prop_assert_eq!(a.mul(&a.one_like()).unwrap(), a.clone());
        prop_assert_eq!(a.sub(&b).unwrap().add(&b).unwrap(), a.clone());
        prop_assert_eq!(a.pow(3), a.mul(&a).unwrap().mul(&a).unwrap());
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>(), ring_idx in 0usize..5) {
        let ring = &rings()[ring_idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_series(ring, &["x"], 9, 6, 0, &mut rng);
        let g = random_series(ring, &["x"], 9, 6, 1, &mut rng);
        let h = random_series(ring, &["x"], 9, 6, 1, &mut rng);
        let left = f.compose(&[g.compose(&[h.clone()]).unwrap()]).unwrap();
        let right = f.compose(&[g]).unwrap().compose(&[h]).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn composition_is_a_ring_map(seed in any::<u64>(), ring_idx in 0usize..5) {
        let ring = &rings()[ring_idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_series(ring, &["x"], 8, 6, 0, &mut rng);
        let b = random_series(ring, &["x"], 8, 6, 0, &mut rng);
        let u = random_series(ring, XY, 8, 8, 1, &mut rng);
        let sub = |s: &TruncSeries| s.compose(std::slice::from_ref(&u)).unwrap();
        prop_assert_eq!(sub(&a.mul(&b).unwrap()), sub(&a).mul(&sub(&b)).unwrap());
        prop_assert_eq!(sub(&a.add(&b).unwrap()), sub(&a).add(&sub(&b)).unwrap());
    }

    #[test]
    fn reversion_round_trip(seed in any::<u64>(), ring_idx in 0usize..5) {
        let ring = &rings()[ring_idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = TruncSeries::variable(ring, &["x"], 10, 0).unwrap();
        let tail = random_series(ring, &["x"], 10, 8, 2, &mut rng);
        // 1 + p*c is a unit in every ring here
        let unit = ring.add(&ring.one(), &ring.mul(&ring.from_int(ring.prime().get() as i64), &random_elem(ring, &mut rng)));
        let f = x.scale(&unit).add(&tail).unwrap();
        let g = f.reversion().unwrap();
        prop_assert_eq!(f.compose(&[g.clone()]).unwrap(), x.clone());
        prop_assert_eq!(g.compose(&[f]).unwrap(), x);
    }

    #[test]
    fn weierstrass_degree_is_additive_over_fields(seed in any::<u64>(), ring_idx in prop::sample::select(vec![0usize, 3, 4])) {
        let ring = &rings()[ring_idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_series(ring, &["x"], 12, 5, 0, &mut rng);
        let b = random_series(ring, &["x"], 12, 5, 0, &mut rng);
        let product = a.mul(&b).unwrap();
        match (a.weierstrass_degree(), b.weierstrass_degree()) {
            (Some(da), Some(db)) if da + db < 12 => {
                prop_assert_eq!(product.weierstrass_degree(), Some(da + db));
                let lead = ring.mul(&a.leading_coefficient().unwrap(), &b.leading_coefficient().unwrap());
                prop_assert_eq!(product.leading_coefficient(), Some(lead));
            }
            (Some(da), Some(db)) => prop_assert!(product.is_zero() || product.weierstrass_degree() >= Some(da + db)),
            _ => prop_assert!(product.is_zero()),
        }
    }

    #[test]
    fn quotient_reduction_is_a_ring_map(seed in any::<u64>(), ring_idx in 0usize..5, d in 1u32..8) {
        let ring = &rings()[ring_idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_series(ring, &["x"], 8, 6, 0, &mut rng);
        let b = random_series(ring, &["x"], 8, 6, 0, &mut rng);
        let red = |s: &TruncSeries| s.quotient_ring_reduce(0, d).unwrap();
        prop_assert_eq!(red(&a.mul(&b).unwrap()), red(&red(&a).mul(&red(&b)).unwrap()));
    }
}

#[test]
fn mismatched_operands_are_rejected() {
    let f5 = CoeffRing::prime_field(Prime::new(5).unwrap());
    let f7 = CoeffRing::prime_field(Prime::new(7).unwrap());
    let a = TruncSeries::variable(&f5, &["x"], 5, 0).unwrap();
    let b = TruncSeries::variable(&f7, &["x"], 5, 0).unwrap();
    let c = TruncSeries::variable(&f5, &["x"], 6, 0).unwrap();
    let d = TruncSeries::variable(&f5, &["t"], 5, 0).unwrap();
    for other in [&b, &c, &d] {
        assert!(matches!(a.add(other), Err(Error::Structural(_))));
        assert!(matches!(a.mul(other), Err(Error::Structural(_))));
    }
    assert!(matches!(a.one_like().reversion(), Err(Error::Domain(_))));
    assert!(matches!(a.compose(&[a.one_like()]), Err(Error::Domain(_))));
}

#[test]
fn finite_fields_have_inverses() {
    for ring in rings().into_iter().filter(CoeffRing::is_field) {
        for e in ring.elements() {
            if ring.is_zero(&e) {
                assert!(ring.inv(&e).is_none());
                continue;
            }
            let inv = ring.inv(&e).unwrap();
            assert!(ring.is_one(&ring.mul(&e, &inv)), "{}", ring.describe());
        }
    }
}
