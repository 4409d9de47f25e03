//! Von Dyck groups, the braid-type presentations `D_n` and their central
//! extensions, and the surface formulas for finite factors.

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::permgrp::{evaluate_word, Permutation};
use crate::todd_coxeter::{enumerate, EnumerationError, EnumerationLimits};
use crate::words::{concat, power, substitute, Presentation, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TriangleParams {
    pub l: u32,
    pub m: u32,
    pub n: u32,
}

impl TriangleParams {
    /// `None` unless all parameters are at least 2.
    pub fn new(l: u32, m: u32, n: u32) -> Option<Self> {
        (l >= 2 && m >= 2 && n >= 2).then_some(TriangleParams { l, m, n })
    }
}

fn names(a: &str, b: &str) -> Vec<String> {
    vec![a.to_string(), b.to_string()]
}

fn gen(g: usize, k: i64) -> Word {
    Word::generator_power(g, k)
}

/// `< x, y | x^l, y^m, (xy)^n >`.
pub fn vondyck_presentation(t: TriangleParams) -> Presentation {
    let xy = concat(&gen(0, 1), &gen(1, 1));
    Presentation::new(
        names("x", "y"),
        vec![
            gen(0, t.l as i64),
            gen(1, t.m as i64),
            power(&xy, t.n as i64),
        ],
    )
    .expect("two generators")
}

/// `aba (bab)^-1`.
pub fn braid_relator() -> Word {
    Word::from_syllables(&[(0, 1), (1, 1), (0, 1), (1, -1), (0, -1), (1, -1)])
}

/// `ab^2a b^-(n-2)`.
pub fn second_relator(n: u32) -> Word {
    Word::from_syllables(&[(0, 1), (1, 2), (0, 1), (1, -(n as i64 - 2))])
}

/// `< a, b | aba = bab, ab^2a = b^(n-2), a^n >`.
pub fn dn_presentation(n: u32) -> Presentation {
    dn_bar_presentation(n).with_relator(gen(0, n as i64))
}

/// `D_n` without the relator `a^n`.
pub fn dn_bar_presentation(n: u32) -> Presentation {
    Presentation::new(names("a", "b"), vec![braid_relator(), second_relator(n)])
        .expect("two generators")
}

/// How the extra relator `W` enters a `D_n` presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExtraForm {
    /// `W` as a separate relator.
    Append,
    /// `ab^2a = W^-1 b^(n-2)`, keeping two relators in total.
    Fold,
}

/// `D_n` (or `D̄_n` when `keep_order_relator` is false) with the extra
/// relation `W = 1`.
pub fn dn_with_extra(n: u32, w: &Word, form: ExtraForm, keep_order_relator: bool) -> Presentation {
    let mut relators = vec![braid_relator()];
    match form {
        ExtraForm::Append => {
            relators.push(second_relator(n));
            relators.push(w.clone());
        }
        ExtraForm::Fold => {
            // ab^2a (W^-1 b^(n-2))^-1 = ab^2a b^-(n-2) W
            relators.push(concat(&second_relator(n), w));
        }
    }
    if keep_order_relator {
        relators.push(gen(0, n as i64));
    }
    Presentation::new(names("a", "b"), relators).expect("two generators")
}

/// Words for the maps between `D(2,3,n)` and `D_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prop1Maps {
    /// Images of `x`, `y` as words in `a`, `b`.
    pub x: Word,
    pub y: Word,
    /// Images of `a`, `b` as words in `x`, `y`.
    pub a: Word,
    pub b: Word,
}

impl Default for Prop1Maps {
    /// `x -> aba`, `y -> ab`, `a -> y^2 x`, `b -> x y^2`.
    fn default() -> Self {
        Prop1Maps {
            x: Word::from_syllables(&[(0, 1), (1, 1), (0, 1)]),
            y: Word::from_syllables(&[(0, 1), (1, 1)]),
            a: Word::from_syllables(&[(1, 2), (0, 1)]),
            b: Word::from_syllables(&[(0, 1), (1, 2)]),
        }
    }
}

fn holds(relators: &[Word], images: &[Permutation]) -> bool {
    relators
        .iter()
        .all(|r| evaluate_word(r, images).is_identity())
}

fn images(maps: &[&Word], gens: &[Permutation]) -> Vec<Permutation> {
    maps.iter().map(|w| evaluate_word(w, gens)).collect()
}

/// Checks the isomorphism `D(2,3,n) = D_n` on enumerated images with the
/// default maps.
pub fn check_prop1_isomorphism(
    n: u32,
    limits: &EnumerationLimits,
) -> Result<bool, EnumerationError> {
    check_prop1_with(&dn_presentation(n), n, &Prop1Maps::default(), limits)
}

/// Checks the maps between a finite factor `dn_factor` of `D_n` and the
/// corresponding factor of `D(2,3,n)` (the extra relators of `dn_factor`
/// transported along `a -> maps.a`, `b -> maps.b`):
/// each side's relators hold on the other's images, and both composites
/// fix the generators.
pub fn check_prop1_with(
    dn_factor: &Presentation,
    n: u32,
    maps: &Prop1Maps,
    limits: &EnumerationLimits,
) -> Result<bool, EnumerationError> {
    let t = TriangleParams { l: 2, m: 3, n };
    let extra: Vec<Word> = dn_factor
        .relators()
        .iter()
        .map(|r| substitute(r, &[maps.a.clone(), maps.b.clone()]))
        .collect();
    let mut triangle = vondyck_presentation(t);
    for r in extra {
        triangle = triangle.with_relator(r);
    }

    let dn_table = enumerate(dn_factor, &[], limits)?;
    let ab = dn_table.generator_actions().expect("closed table");
    let tri_table = enumerate(&triangle, &[], limits)?;
    let xy = tri_table.generator_actions().expect("closed table");

    // (i) D(2,3,n) relators hold on the images of x, y in D_n.
    let xy_in_dn = images(&[&maps.x, &maps.y], &ab);
    if !holds(vondyck_presentation(t).relators(), &xy_in_dn) {
        return Ok(false);
    }
    // (ii) D_n relators hold on the images of a, b in D(2,3,n).
    let ab_in_tri = images(&[&maps.a, &maps.b], &xy);
    if !holds(dn_factor.relators(), &ab_in_tri) {
        return Ok(false);
    }
    // (iii) Composites fix the generators.
    let back = images(&[&maps.a, &maps.b], &xy_in_dn);
    if back != ab {
        return Ok(false);
    }
    let back = images(&[&maps.x, &maps.y], &ab_in_tri);
    Ok(back == xy)
}

/// `1 + order (n - 6) / (12 n)`.
pub fn genus(order: u64, n: u32) -> Ratio<i64> {
    let n = n as i64;
    Ratio::from_integer(1) + Ratio::new(order as i64 * (n - 6), 12 * n)
}

/// Does `12 n` divide the order?
pub fn check_divisibility(order: u64, n: u32) -> bool {
    order.is_multiple_of(12 * n as u64)
}

/// Are 2, 3 and `n` pairwise coprime?
pub fn pairwise_coprime(n: u32) -> bool {
    n.gcd(&6) == 1
}

/// Face, edge and vertex counts of the tessellation by `order / 3`
/// triangles meeting `n` at each vertex, with the resulting genus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceInvariants {
    pub faces: Ratio<i64>,
    pub edges: Ratio<i64>,
    pub vertices: Ratio<i64>,
    pub euler_characteristic: Ratio<i64>,
    pub genus: Ratio<i64>,
}

impl SurfaceInvariants {
    pub fn is_integral(&self) -> bool {
        [
            &self.faces,
            &self.edges,
            &self.vertices,
            &self.euler_characteristic,
            &self.genus,
        ]
        .iter()
        .all(|r| r.is_integer())
    }
}

pub fn surface_invariants(order: u64, n: u32) -> SurfaceInvariants {
    let faces = Ratio::new(order as i64, 3);
    let edges = faces * Ratio::new(3, 2);
    let vertices = faces * Ratio::new(3, n as i64);
    let euler_characteristic = vertices - edges + faces;
    SurfaceInvariants {
        faces,
        edges,
        vertices,
        euler_characteristic,
        genus: Ratio::from_integer(1) - euler_characteristic / 2,
    }
}
