use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use proptest::prelude::*;
use vondyck::permgrp::*;
use vondyck::todd_coxeter::{enumerate, EnumerationLimits};
use vondyck::vondyck::dn_bar_presentation;
use vondyck::words::{parse_presentation, Presentation, Word};
use vondyck::zlinalg::abelianization;

/// Every element of the group generated by `gens`, by breadth-first
/// closure under right multiplication.
fn bfs_elements(gens: &[Permutation]) -> Vec<Permutation> {
    let id = Permutation::identity(gens[0].degree());
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = &x * g;
            if seen.insert(y.clone()) {
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    out
}

fn regular(p: &Presentation) -> Vec<Permutation> {
    enumerate(p, &[], &EnumerationLimits::default())
        .unwrap()
        .generator_actions()
        .unwrap()
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

#[test]
fn s4_from_two_generators() {
    let c = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
    let t = Permutation::from_cycles(4, &[&[0, 1]]).unwrap();
    let g = schreier_sims(&[c.clone(), t.clone()]).unwrap();
    assert_eq!(bfs_elements(&[c, t]).len(), 24);
    assert_eq!(g.order(), big(24));
    assert!(!g.is_abelian());
}

#[test]
fn identity_group() {
    let g = schreier_sims(&[Permutation::identity(5)]).unwrap();
    assert_eq!(g.order(), big(1));
    assert!(g.is_trivial());
    assert_eq!(element_order(&Permutation::identity(5)), big(1));
    assert_eq!(schreier_sims(&[]).unwrap_err(), PermError::NoGenerators);
}

#[test]
fn membership_degree_mismatch() {
    let g = schreier_sims(&[Permutation::from_cycles(4, &[&[0, 1]]).unwrap()]).unwrap();
    assert!(matches!(
        g.contains(&Permutation::identity(5)),
        Err(PermError::DegreeMismatch { .. })
    ));
}

fn perm(degree: usize) -> impl Strategy<Value = Permutation> {
    Just((0..degree as u32).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn gens() -> impl Strategy<Value = Vec<Permutation>> {
    (2usize..8).prop_flat_map(|d| prop::collection::vec(perm(d), 1..4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_and_membership_match_bfs(g in gens(), probe in prop::collection::vec(any::<prop::sample::Index>(), 4)) {
        let elements = bfs_elements(&g);
        let group = schreier_sims(&g).unwrap();
        prop_assert_eq!(group.order(), big(elements.len() as u64));
        let set: HashSet<&Permutation> = elements.iter().collect();
        for e in &elements {
            prop_assert!(group.contains(e).unwrap());
        }
        // Random permutations of the same degree.
        let d = g[0].degree();
        for ix in probe {
            let mut images: Vec<u32> = (0..d as u32).collect();
            let k = ix.index(d);
            images.rotate_left(k);
            images.swap(0, d - 1 - k.min(d - 1));
            let p = Permutation::from_images(images).unwrap();
            prop_assert_eq!(group.contains(&p).unwrap(), set.contains(&p));
        }
    }

    #[test]
    fn product_of_transversals_is_order(g in gens()) {
        let group = schreier_sims(&g).unwrap();
        let product: BigUint = group.transversal_sizes().iter().map(|&s| BigUint::from(s)).product();
        prop_assert_eq!(product, group.order());
        for x in &g {
            prop_assert!(group.contains(x).unwrap());
        }
    }

    #[test]
    fn element_order_is_lcm_of_cycles(p in (1usize..10).prop_flat_map(perm)) {
        let mut k = 1u64;
        let mut x = p.clone();
        while !x.is_identity() {
            x = &x * &p;
            k += 1;
        }
        prop_assert_eq!(element_order(&p), big(k));
    }

    #[test]
    fn normal_closure_matches_bfs(g in gens(), pick in any::<prop::sample::Index>()) {
        let group = schreier_sims(&g).unwrap();
        let elements = bfs_elements(&g);
        let seed = elements[pick.index(elements.len())].clone();
        let conjugates: Vec<Permutation> = elements.iter().map(|h| seed.conjugate_by(h)).collect();
        let oracle = bfs_elements(&conjugates).len() as u64;
        let closure = group.normal_closure(&[seed]).unwrap();
        prop_assert_eq!(closure.order(), big(oracle));
        prop_assert!(closure.is_normal_in(&group));
    }
}

#[test]
fn cover_of_a7_center_from_a7() {
    let p = parse_presentation("< a,b | a*b*a=b*a*b, a*b^2*a=(a^2*b^-2)^3*b^5 >").unwrap();
    let gens = regular(&p);
    let g = schreier_sims(&gens).unwrap();
    assert_eq!(g.order(), big(336));
    assert_eq!(element_order(&gens[0]), big(14));
    let z = gens[0].pow(7);
    // Brute force: conjugates of z over all 336 elements, then their closure.
    let elements = bfs_elements(&gens);
    assert_eq!(elements.len(), 336);
    let conjugates: Vec<Permutation> = elements.iter().map(|h| z.conjugate_by(h)).collect();
    assert_eq!(bfs_elements(&conjugates).len(), 2);
    assert_eq!(
        g.normal_closure(std::slice::from_ref(&z)).unwrap().order(),
        big(2)
    );
    let center = g.center(DEFAULT_CENTER_CAP).unwrap();
    assert_eq!(center.order(), big(2));
    assert!(center.contains(&z).unwrap());
    let s = g.is_simple(SimplicityMode::default()).unwrap();
    match s {
        SimplicityVerdict::NotSimple {
            normal_subgroup_order,
            ..
        } => assert_eq!(normal_subgroup_order, big(2)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn binary_tetrahedral_derived_subgroup() {
    let gens = regular(&dn_bar_presentation(3));
    let g = schreier_sims(&gens).unwrap();
    assert_eq!(g.order(), big(24));
    // Oracle: closure of all commutators.
    let elements = bfs_elements(&gens);
    let commutators: Vec<Permutation> = elements
        .iter()
        .flat_map(|x| elements.iter().map(move |y| x.commutator(y)))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    assert_eq!(bfs_elements(&commutators).len(), 8);
    assert_eq!(g.derived_subgroup().order(), big(8));
    assert!(!g.is_perfect());
}

#[test]
fn centers_of_dn_bar_by_brute_force() {
    for (n, order) in [(3u32, 24u64), (4, 48), (5, 120)] {
        let gens = regular(&dn_bar_presentation(n));
        let elements = bfs_elements(&gens);
        let central = elements
            .iter()
            .filter(|x| gens.iter().all(|g| (*x * g) == (g * *x)))
            .count();
        let g = schreier_sims(&gens).unwrap();
        assert_eq!(g.order(), big(order));
        assert_eq!(central, 2, "n={n}");
        let center = g.center(DEFAULT_CENTER_CAP).unwrap();
        assert_eq!(center.order(), big(2));
        assert!(center.contains(&gens[0].pow(n as i64)).unwrap());
        assert_eq!(element_order(&gens[0]), big(2 * n as u64));
    }
}

#[test]
fn a5_classes_and_simplicity() {
    let a = Permutation::from_cycles(5, &[&[0, 1, 2]]).unwrap();
    let b = Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
    let g = schreier_sims(&[a.clone(), b.clone()]).unwrap();
    assert_eq!(g.order(), big(60));
    let mut sizes = g.conjugacy_class_sizes(1000).unwrap();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 12, 12, 15, 20]);
    assert_eq!(
        g.is_simple(SimplicityMode::default()).unwrap(),
        SimplicityVerdict::Simple
    );
    assert_eq!(
        g.is_simple(SimplicityMode::MonteCarlo {
            trials: 50,
            seed: 7
        })
        .unwrap(),
        SimplicityVerdict::ProbablySimple { trials: 50 }
    );
    assert!(g.is_perfect());
    assert_eq!(g.center(1000).unwrap().order(), big(1));
}

#[test]
fn class_sizes_match_brute_force() {
    let c = Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap();
    let t = Permutation::from_cycles(5, &[&[0, 1]]).unwrap();
    let gens = [c, t];
    let elements = bfs_elements(&gens);
    let mut left: HashSet<Permutation> = elements.iter().cloned().collect();
    let mut oracle = Vec::new();
    for x in &elements {
        if !left.contains(x) {
            continue;
        }
        let class: HashSet<Permutation> = elements.iter().map(|h| x.conjugate_by(h)).collect();
        for y in &class {
            left.remove(y);
        }
        oracle.push(class.len());
    }
    oracle.sort_unstable();
    let g = schreier_sims(&gens).unwrap();
    let mut sizes = g.conjugacy_class_sizes(1000).unwrap();
    sizes.sort_unstable();
    assert_eq!(sizes, oracle);
}

#[test]
fn prime_cyclic_is_simple_composite_is_not() {
    let c7 = Permutation::from_cycles(7, &[&[0, 1, 2, 3, 4, 5, 6]]).unwrap();
    let g = schreier_sims(&[c7]).unwrap();
    assert_eq!(
        g.is_simple(SimplicityMode::default()).unwrap(),
        SimplicityVerdict::Simple
    );
    let c6 = Permutation::from_cycles(6, &[&[0, 1, 2, 3, 4, 5]]).unwrap();
    let g = schreier_sims(&[c6]).unwrap();
    assert!(!g
        .is_simple(SimplicityMode::default())
        .unwrap()
        .is_simple_or_probably());
    let trivial = schreier_sims(&[Permutation::identity(3)]).unwrap();
    assert_eq!(
        trivial.is_simple(SimplicityMode::default()).unwrap_err(),
        PermError::TooSmall
    );
}

#[test]
fn deterministic_cap_is_enforced() {
    let gens = regular(&dn_bar_presentation(5));
    let g = schreier_sims(&gens).unwrap();
    assert!(matches!(
        g.is_simple(SimplicityMode::Deterministic { cap: 100 }),
        Err(PermError::BudgetExceeded { .. })
    ));
}

#[test]
fn monte_carlo_is_reproducible() {
    let gens = regular(&dn_bar_presentation(5));
    let g = schreier_sims(&gens).unwrap();
    let mode = SimplicityMode::MonteCarlo {
        trials: 200,
        seed: 99,
    };
    let first = g.is_simple(mode).unwrap();
    assert_eq!(first, g.is_simple(mode).unwrap());
    assert!(!first.is_simple_or_probably());
}

#[test]
fn quotient_by_central_element() {
    for (n, order) in [(3u32, 12u64), (4, 24), (5, 60)] {
        let z = Word::generator_power(0, n as i64);
        let q = quotient_by_central(&dn_bar_presentation(n), &z, &EnumerationLimits::default());
        assert_eq!(q, Ok(order));
    }
    let not_central = Word::generator_power(0, 1);
    assert_eq!(
        quotient_by_central(
            &dn_bar_presentation(5),
            &not_central,
            &EnumerationLimits::default()
        ),
        Err(PermError::NotCentral)
    );
}

#[test]
fn derived_times_abelianization_is_order() {
    for text in [
        "< a,b | a^4, b^2, (a*b)^2 >",
        "< a,b | a^3, b^3, (a*b)^2 >",
        "< a,b | a*b*a=b*a*b, a*b^2*a=b, a^3 >",
        "< a,b | a^6, b^4, a*b=b*a >",
    ] {
        let p = parse_presentation(text).unwrap();
        let g = schreier_sims(&regular(&p)).unwrap();
        let ab = abelianization(&p);
        assert_eq!(ab.free_rank, 0, "{text}");
        let ab_order = ab.order().unwrap().to_biguint().unwrap();
        assert_eq!(g.derived_subgroup().order() * ab_order, g.order(), "{text}");
    }
}
