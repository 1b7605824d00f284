use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use perdyn::catalog;
use perdyn::dynamics::{image_size, periodic_points_graph, periodic_points_iterate, FieldMap, FunctionalGraph, Mobius, ProjPoint};
use perdyn::field::{build_field, Field, DEFAULT_ENUM_BUDGET};
use perdyn::treegroup::quotient::build_levels;
use perdyn::treegroup::{build_level_quotient, Budget, FppMethod, FppOptions, Perm};

fn field_for(choice: u8) -> Field {
    let (p, n) = [(3, 2), (5, 2), (3, 3), (7, 1)][choice as usize % 4];
    build_field(p, n).unwrap()
}

fn elem(f: &Field, r: u64) -> perdyn::field::FieldElem {
    f.unrank(r % f.size().unwrap())
}

fn quad_map(f: &Field, c: &[u64; 6]) -> Option<FieldMap> {
    let num = vec![elem(f, c[0]), elem(f, c[1]), elem(f, c[2])];
    let den = vec![elem(f, c[3]), elem(f, c[4]), elem(f, c[5])];
    if num[2].is_zero() && den[2].is_zero() {
        return None;
    }
    FieldMap::new(f.clone(), num, den).ok().filter(|m| m.degree() == 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(choice in 0u8..4, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = field_for(choice);
        let (a, b, c) = (elem(&f, a), elem(&f, b), elem(&f, c));
        prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
        prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
        prop_assert_eq!(f.sub(&f.add(&a, &b), &b), a.clone());
        if let Some(inv) = f.inv(&a) {
            prop_assert!(f.is_one(&f.mul(&a, &inv)));
        } else {
            prop_assert!(a.is_zero());
        }
        let q = f.size().unwrap();
        prop_assert_eq!(f.pow(&a, q), a.clone());
        prop_assert_eq!(f.rank(&a), f.rank(&f.unrank(f.rank(&a))));
    }

    #[test]
    fn periodic_oracles_agree(choice in 0u8..4, c in any::<[u64; 6]>()) {
        let f = field_for(choice);
        if let Some(m) = quad_map(&f, &c) {
            let a = periodic_points_iterate(&m, DEFAULT_ENUM_BUDGET).unwrap();
            let b = periodic_points_graph(&m, DEFAULT_ENUM_BUDGET).unwrap();
            prop_assert_eq!(&a, &b);
            // the periodic set is the eventual image
            let n = FunctionalGraph::build(&m, DEFAULT_ENUM_BUDGET).unwrap().index().len();
            prop_assert_eq!(image_size(&m, n, DEFAULT_ENUM_BUDGET).unwrap(), a.len());
            let sizes: Vec<usize> = (0..4).map(|k| image_size(&m, k, DEFAULT_ENUM_BUDGET).unwrap()).collect();
            prop_assert!(sizes.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn periodic_count_is_conjugacy_invariant(choice in 0u8..4, c in any::<[u64; 6]>(), m in any::<[u64; 4]>()) {
        let f = field_for(choice);
        let Some(map) = quad_map(&f, &c) else { return Ok(()) };
        let pts: Vec<ProjPoint> = (0..3u64).map(|i| ProjPoint::Finite(elem(&f, m[i as usize].wrapping_add(i)))).collect();
        let Some(mu) = Mobius::to_standard(&f, &pts[0], &pts[1], &pts[2]) else { return Ok(()) };
        let conj = map.conjugate(&mu).unwrap();
        let a = periodic_points_graph(&map, DEFAULT_ENUM_BUDGET).unwrap().len();
        let b = periodic_points_graph(&conj, DEFAULT_ENUM_BUDGET).unwrap().len();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn element_degrees_partition_the_field(n in 1usize..7, p_idx in 0usize..3) {
        let p = [2u64, 3, 5][p_idx];
        let f = build_field(p, n).unwrap();
        if f.size().unwrap() > 20_000 { return Ok(()) }
        let mut by_degree = vec![0u64; n + 1];
        for e in f.enumerate(DEFAULT_ENUM_BUDGET).unwrap() {
            let d = f.element_degree(&e);
            prop_assert_eq!(n % d, 0);
            by_degree[d] += 1;
        }
        prop_assert_eq!(by_degree.iter().sum::<u64>(), f.size().unwrap());
        if n > 1 {
            let lower: u64 = by_degree[..n].iter().sum();
            prop_assert!(lower as f64 <= 2.0 * (p as f64).powf(n as f64 / 2.0));
        }
    }

    #[test]
    fn perm_group_laws(seed in any::<u64>(), n in 1usize..40) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shuffled = |rng: &mut ChaCha8Rng| {
            let mut v: Vec<u32> = (0..n as u32).collect();
            v.shuffle(rng);
            Perm(v)
        };
        let (a, b, c) = (shuffled(&mut rng), shuffled(&mut rng), shuffled(&mut rng));
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        prop_assert!(a.compose(&a.inverse()).is_identity());
        for x in 0..n as u32 {
            prop_assert_eq!(a.compose(&b).apply(x), a.apply(b.apply(x)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_membership_and_sampling(name_idx in 0usize..4, level in 1usize..7, seed in any::<u64>()) {
        let name = catalog::list()[name_idx];
        let aut = catalog::load_automaton(name).unwrap();
        let q = build_level_quotient(&aut, level, &Budget::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let g = q.chain.sample(&mut rng);
            prop_assert!(q.chain.contains(&g));
            for h in &q.generators {
                prop_assert!(q.chain.contains(&g.compose(h)));
            }
        }
    }
}

#[test]
fn order_is_product_of_level_kernels() {
    let budget = Budget::default();
    for name in catalog::list() {
        let aut = catalog::load_automaton(name).unwrap();
        let levels = build_levels(&aut, 9, &budget).unwrap();
        let mut prev = BigUint::from(1u32);
        for q in &levels {
            let h = q.kernel_h();
            assert_eq!(q.order, &prev * &h.order, "{name} level {}", q.level);
            // the direct build agrees with the projection from the top level
            let direct = build_level_quotient(&aut, q.level, &budget).unwrap();
            assert_eq!(direct.order, q.order, "{name} level {}", q.level);
            prev = q.order.clone();
        }
    }
}

#[test]
fn fpp_is_non_increasing_on_exact_levels() {
    let opts = FppOptions::default();
    for name in catalog::list() {
        let aut = catalog::load_automaton(name).unwrap();
        let r = perdyn::treegroup::fpp_report(&aut, 7, &opts).unwrap();
        let exact: Vec<_> = r.levels.iter().filter(|l| l.method == FppMethod::Exact).collect();
        assert!(!exact.is_empty());
        for w in exact.windows(2) {
            assert!(w[1].value <= w[0].value, "{name} level {}", w[1].level);
        }
    }
}

#[test]
fn sampler_matches_enumeration_within_three_sigma() {
    let budget = Budget::default();
    for name in catalog::list() {
        let aut = catalog::load_automaton(name).unwrap();
        for level in [3, 5] {
            let q = build_level_quotient(&aut, level, &budget).unwrap();
            let exact = q.fpp_exact(&budget).unwrap();
            let p = *exact.numer() as f64 / *exact.denom() as f64;
            let n = 20_000u64;
            let hits = q.fpp_sampled(n, 99);
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            let observed = hits as f64 / n as f64;
            assert!((observed - p).abs() <= 3.0 * sigma + 1e-12, "{name} level {level}: {observed} vs {p}");
        }
    }
}

#[test]
fn sampling_is_uniform_on_a_small_group() {
    let aut = catalog::load_automaton("basilica").unwrap();
    let q = build_level_quotient(&aut, 2, &Budget::default()).unwrap();
    let order = q.order_u64().unwrap() as usize;
    let mut counts = std::collections::BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 8000;
    for _ in 0..n {
        *counts.entry(q.chain.sample(&mut rng).0).or_insert(0usize) += 1;
    }
    assert_eq!(counts.len(), order);
    let expected = n as f64 / order as f64;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // generous bound for `order - 1` degrees of freedom
    assert!(chi2 < 4.0 * order as f64, "chi2 {chi2}");
}
