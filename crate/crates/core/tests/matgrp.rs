use std::collections::{HashSet, VecDeque};

use vondyck::matgrp::*;
use vondyck::permgrp::{evaluate_word, schreier_sims};
use vondyck::words::{parse_presentation, Presentation};

/// Carry-less product modulo x^3 + x + 1, on 3-bit codes.
fn gf8_mul(a: u32, b: u32) -> u32 {
    let mut r = 0;
    for i in 0..3 {
        if b >> i & 1 == 1 {
            r ^= a << i;
        }
    }
    for bit in (3..5).rev() {
        if r >> bit & 1 == 1 {
            r ^= 0b1011 << (bit - 3);
        }
    }
    r
}

#[test]
fn gf8_matches_bitwise_arithmetic() {
    let f = make_field(8).unwrap();
    assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    for a in 0..8 {
        for b in 0..8 {
            assert_eq!(f.add(a, b), a ^ b);
            assert_eq!(f.mul(a, b), gf8_mul(a, b), "{a} * {b}");
        }
    }
}

#[test]
fn gf9_matches_gaussian_integers_mod_3() {
    // x^2 + 1 is the first monic irreducible quadratic, so GF(9) = F3[i].
    let f = make_field(9).unwrap();
    assert_eq!(f.modulus(), &[1, 0, 1]);
    let split = |c: u32| (c % 3, c / 3);
    for a in 0..9 {
        for b in 0..9 {
            let ((a0, a1), (b0, b1)) = (split(a), split(b));
            let re = (a0 * b0 + 2 * a1 * b1) % 3;
            let im = (a0 * b1 + a1 * b0) % 3;
            assert_eq!(f.mul(a, b), re + 3 * im);
            assert_eq!(f.add(a, b), (a0 + b0) % 3 + 3 * ((a1 + b1) % 3));
        }
    }
}

#[test]
fn prime_fields_match_modular_arithmetic() {
    for p in [2u32, 3, 5, 7, 11, 13, 31, 127] {
        let f = make_field(p).unwrap();
        for a in 0..p {
            for b in 0..p {
                assert_eq!(f.mul(a, b), a * b % p);
                assert_eq!(f.add(a, b), (a + b) % p);
            }
            let squares: HashSet<u32> = (0..p).map(|x| x * x % p).collect();
            assert_eq!(f.is_square(a), squares.contains(&a), "p={p} a={a}");
        }
    }
}

#[test]
fn orders() {
    assert_eq!(psl2_order(7), Ok(168));
    assert_eq!(psl2_order(8), Ok(504));
    assert_eq!(psl2_order(4), Ok(60));
    assert_eq!(psl2_order(5), Ok(60));
    assert_eq!(psl2_order(127), Ok(1_024_128));
    assert!(psl2_order(6).is_err());
    assert!(make_field(1 << 17).is_err());
}

fn a7() -> Presentation {
    parse_presentation("< a,b | a*b*a=b*a*b, a*b^2*a=b^5, (a*b^-1)^4 >").unwrap()
}

#[test]
fn a7_maps_onto_psl_2_7() {
    let p = a7();
    let epi = find_epimorphism(&p, 7, &EpiBudget::default())
        .unwrap()
        .unwrap();
    assert_eq!(epi.image_order, 168);
    let f = make_field(7).unwrap();
    let (a, b) = epi.permutations(&f);
    assert_eq!(a.degree(), 8);
    for r in p.relators() {
        assert!(evaluate_word(r, &[a.clone(), b.clone()]).is_identity());
    }
    assert_eq!(schreier_sims(&[a, b]).unwrap().order_u64(), Some(168));
}

type M = [i64; 4];

fn m_mul(x: &M, y: &M, p: i64) -> M {
    [
        (x[0] * y[0] + x[1] * y[2]) % p,
        (x[0] * y[1] + x[1] * y[3]) % p,
        (x[2] * y[0] + x[3] * y[2]) % p,
        (x[2] * y[1] + x[3] * y[3]) % p,
    ]
}

/// Sign-normalized representative of `{x, -x}` in PSL(2, p).
fn canon(x: &M, p: i64) -> M {
    let first = x.iter().find(|&&v| v != 0).copied().unwrap();
    if first * 2 > p {
        x.map(|v| (p - v) % p)
    } else {
        *x
    }
}

#[test]
fn a7_has_no_epimorphism_onto_psl_2_5() {
    assert_eq!(find_epimorphism(&a7(), 5, &EpiBudget::default()), Ok(None));

    // Exhaustive oracle over SL(2, 5) modulo sign.
    let p = 5i64;
    let mut elements: Vec<M> = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let m = [a, b, c, d];
                    if (a * d - b * c).rem_euclid(p) == 1 && canon(&m, p) == m {
                        elements.push(m);
                    }
                }
            }
        }
    }
    assert_eq!(elements.len(), 60);
    let inv = |x: &M| canon(&[x[3], (p - x[1]) % p, (p - x[2]) % p, x[0]], p);
    let word = |s: &[(usize, i64)], g: &[M; 2]| {
        let mut acc: M = [1, 0, 0, 1];
        for &(i, e) in s {
            let base = if e > 0 { g[i] } else { inv(&g[i]) };
            for _ in 0..e.abs() {
                acc = m_mul(&acc, &base, p);
            }
        }
        canon(&acc, p)
    };
    let rels: Vec<Vec<(usize, i64)>> = a7().relators().iter().map(|r| r.syllables()).collect();
    let identity = [1, 0, 0, 1];
    let mut satisfying = 0;
    let mut generating = 0;
    for x in &elements {
        for y in &elements {
            let g = [*x, *y];
            if rels.iter().all(|r| word(r, &g) == identity) {
                satisfying += 1;
                let mut seen: HashSet<M> = HashSet::from([identity]);
                let mut queue = VecDeque::from([identity]);
                while let Some(z) = queue.pop_front() {
                    for h in &g {
                        let w = canon(&m_mul(&z, h, p), p);
                        if seen.insert(w) {
                            queue.push_back(w);
                        }
                    }
                }
                generating += (seen.len() == 60) as usize;
            }
        }
    }
    // A simple group of order 168 only maps trivially into a group of order 60.
    assert_eq!(satisfying, 1);
    assert_eq!(generating, 0);
}

#[test]
fn a5_presentation_maps_onto_both_models() {
    let p = parse_presentation("< a,b | a*b*a=b*a*b, a*b^2*a=b^3, a^5 >").unwrap();
    for q in [4, 5] {
        let epi = find_epimorphism(&p, q, &EpiBudget::default())
            .unwrap()
            .unwrap();
        assert_eq!(epi.image_order, 60, "q={q}");
    }
}

#[test]
fn a8_presentation_maps_onto_psl_2_8() {
    let p = parse_presentation("< a,b | a*b*a=b*a*b, a*b^2*a=(a^2*b^-2*a*b^-2)^2*b^5 >").unwrap();
    let epi = find_epimorphism(&p, 8, &EpiBudget::default())
        .unwrap()
        .unwrap();
    assert_eq!(epi.image_order, 504);
}

#[test]
fn budgets() {
    let p = a7();
    assert!(matches!(
        find_epimorphism(&p, 131, &EpiBudget::default()),
        Err(EpiError::BudgetExhausted { q: 131, .. })
    ));
    let tight = EpiBudget {
        max_q: 127,
        max_pairs: Some(10),
    };
    assert!(matches!(
        find_epimorphism(&p, 7, &tight),
        Err(EpiError::BudgetExhausted { .. })
    ));
    assert!(matches!(
        find_epimorphism(&p, 6, &EpiBudget::default()),
        Err(EpiError::InvalidQ(_))
    ));
    let three = parse_presentation("< a,b,c | a >").unwrap();
    assert_eq!(
        find_epimorphism(&three, 5, &EpiBudget::default()),
        Err(EpiError::NotTwoGenerators(3))
    );
}

#[test]
fn projective_line_action_is_faithful_on_psl() {
    for q in [4u32, 5, 7, 8, 9] {
        let f = make_field(q).unwrap();
        let elements = psl2_elements(&f);
        let images: HashSet<Vec<u32>> = elements
            .iter()
            .map(|m| projective_line_action(&f, m).unwrap().images().to_vec())
            .collect();
        assert_eq!(images.len(), elements.len(), "q={q}");
        assert!(projective_line_action(&f, &ProjMatrix::identity())
            .unwrap()
            .is_identity());
        for x in elements.iter().take(20) {
            for y in elements.iter().skip(7).take(20) {
                let lhs = projective_line_action(&f, &x.mul(&f, y)).unwrap();
                let rhs = &projective_line_action(&f, x).unwrap()
                    * &projective_line_action(&f, y).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}
