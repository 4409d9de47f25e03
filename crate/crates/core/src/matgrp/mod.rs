//! GF(q), PSL(2, q) and the search for epimorphisms from two-generator
//! presentations onto PSL(2, q).

mod field;

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::permgrp::{schreier_sims, Permutation};
use crate::words::{Letter, Presentation, Word};

pub use field::{make_field, prime_power, Field, MAX_Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("field size {0} exceeds the supported maximum")]
    FieldTooLarge(u32),
    #[error("matrix is singular")]
    Singular,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EpiError {
    #[error("epimorphism search for q={q} exceeds the budget ({reason})")]
    BudgetExhausted { q: u32, reason: String },
    #[error("presentation has {0} generators, epimorphism search needs 2")]
    NotTwoGenerators(usize),
    #[error(transparent)]
    InvalidQ(#[from] MatError),
}

/// `q (q^2 - 1) / gcd(2, q - 1)`.
pub fn psl2_order(q: u32) -> Result<u64, MatError> {
    prime_power(q).ok_or(MatError::NotPrimePower(q))?;
    let q = q as u64;
    Ok(q * (q * q - 1) / if q % 2 == 1 { 2 } else { 1 })
}

/// Raw 2x2 matrix `[a, b, c, d]` over a field, row-major.
type Raw = [u32; 4];

#[inline]
fn mat_mul(f: &Field, x: &Raw, y: &Raw) -> Raw {
    [
        f.add(f.mul(x[0], y[0]), f.mul(x[1], y[2])),
        f.add(f.mul(x[0], y[1]), f.mul(x[1], y[3])),
        f.add(f.mul(x[2], y[0]), f.mul(x[3], y[2])),
        f.add(f.mul(x[2], y[1]), f.mul(x[3], y[3])),
    ]
}

fn det(f: &Field, x: &Raw) -> u32 {
    f.sub(f.mul(x[0], x[3]), f.mul(x[1], x[2]))
}

/// Inverse up to a scalar.
fn adjugate(f: &Field, x: &Raw) -> Raw {
    [x[3], f.neg(x[1]), f.neg(x[2]), x[0]]
}

#[inline]
fn is_scalar(x: &Raw) -> bool {
    x[1] == 0 && x[2] == 0 && x[0] == x[3]
}

/// Element of PGL(2, q) in normal form: the first nonzero entry is 1.
/// It lies in PSL(2, q) iff its determinant is a square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProjMatrix {
    entries: [u32; 4],
}

impl ProjMatrix {
    pub fn new(f: &Field, entries: [u32; 4]) -> Result<Self, MatError> {
        if det(f, &entries) == 0 {
            return Err(MatError::Singular);
        }
        Ok(ProjMatrix::normalized(f, entries))
    }

    fn normalized(f: &Field, x: Raw) -> Self {
        let lead = *x.iter().find(|&&e| e != 0).expect("nonzero matrix");
        let s = f.inv(lead);
        ProjMatrix {
            entries: x.map(|e| f.mul(e, s)),
        }
    }

    pub fn identity() -> Self {
        ProjMatrix {
            entries: [1, 0, 0, 1],
        }
    }

    pub fn entries(&self) -> [u32; 4] {
        self.entries
    }

    pub fn mul(&self, f: &Field, other: &ProjMatrix) -> ProjMatrix {
        ProjMatrix::normalized(f, mat_mul(f, &self.entries, &other.entries))
    }

    pub fn inverse(&self, f: &Field) -> ProjMatrix {
        ProjMatrix::normalized(f, adjugate(f, &self.entries))
    }

    pub fn is_identity(&self) -> bool {
        is_scalar(&self.entries)
    }

    pub fn in_psl(&self, f: &Field) -> bool {
        f.is_square(det(f, &self.entries))
    }

    /// A determinant-one representative, if one exists.
    pub fn sl_lift(&self, f: &Field) -> Option<[u32; 4]> {
        let s = f.sqrt(f.inv(det(f, &self.entries)))?;
        Some(self.entries.map(|e| f.mul(e, s)))
    }

    /// Evaluates `w` with `a -> self`, `b -> other` (generators 0 and 1).
    pub fn evaluate(f: &Field, w: &Word, images: &[ProjMatrix]) -> ProjMatrix {
        let raw: Vec<Raw> = images.iter().map(|m| m.entries).collect();
        let inv: Vec<Raw> = raw.iter().map(|m| adjugate(f, m)).collect();
        ProjMatrix::normalized(f, eval_raw(f, w.letters(), &raw, &inv))
    }
}

impl fmt::Display for ProjMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

fn eval_raw(f: &Field, letters: &[Letter], raw: &[Raw], inv: &[Raw]) -> Raw {
    let mut acc: Raw = [1, 0, 0, 1];
    for l in letters {
        let m = if l.is_inverse() {
            &inv[l.generator()]
        } else {
            &raw[l.generator()]
        };
        acc = mat_mul(f, &acc, m);
    }
    acc
}

/// Right action on row vectors: `[u:v] -> [u:v] m`.
pub fn projective_line_action(f: &Field, m: &ProjMatrix) -> Result<Permutation, MatError> {
    let m = &m.entries;
    if det(f, m) == 0 {
        return Err(MatError::Singular);
    }
    let images = (0..f.order() + 1)
        .map(|i| {
            let (u, v) = p1_point(i);
            let (x, y) = (
                f.add(f.mul(u, m[0]), f.mul(v, m[2])),
                f.add(f.mul(u, m[1]), f.mul(v, m[3])),
            );
            p1_index(f, x, y)
        })
        .collect();
    Ok(Permutation::from_images(images).expect("invertible matrices permute P^1"))
}

/// Points of P^1(GF(q)): `[0:1]` is 0, `[1:x]` is `x + 1` (so `[1:0]` is 1).
fn p1_point(i: u32) -> (u32, u32) {
    match i {
        0 => (0, 1),
        _ => (1, i - 1),
    }
}

fn p1_index(f: &Field, u: u32, v: u32) -> u32 {
    if u == 0 {
        0
    } else {
        f.div(v, u) + 1
    }
}

/// Search limits for [`find_epimorphism`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpiBudget {
    pub max_q: u32,
    /// Cap on the number of (A, B) pairs scanned.
    pub max_pairs: Option<u64>,
}

impl Default for EpiBudget {
    fn default() -> Self {
        EpiBudget {
            max_q: 127,
            max_pairs: None,
        }
    }
}

/// Images of the two generators under a surjection onto PSL(2, q).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Epimorphism {
    pub q: u32,
    pub a: ProjMatrix,
    pub b: ProjMatrix,
    pub image_order: u64,
}

impl Epimorphism {
    pub fn permutations(&self, f: &Field) -> (Permutation, Permutation) {
        (
            projective_line_action(f, &self.a).expect("nonsingular"),
            projective_line_action(f, &self.b).expect("nonsingular"),
        )
    }
}

/// All of PSL(2, q) in normal form, in scan order.
pub fn psl2_elements(f: &Field) -> Vec<ProjMatrix> {
    let q = f.order();
    let mut out = Vec::new();
    // a = 1
    for b in 0..q {
        for c in 0..q {
            for d in 0..q {
                let m = [1, b, c, d];
                let dt = det(f, &m);
                if dt != 0 && f.is_square(dt) {
                    out.push(ProjMatrix { entries: m });
                }
            }
        }
    }
    // a = 0, b = 1
    for c in 1..q {
        for d in 0..q {
            let m = [0, 1, c, d];
            if f.is_square(det(f, &m)) {
                out.push(ProjMatrix { entries: m });
            }
        }
    }
    out
}

/// One companion matrix `[[0,-1],[1,t]]` per trace class `{t, -t}`. Every
/// non-scalar element of PSL(2, q) is conjugate under PGL(2, q) to one of
/// them, and conjugating an epimorphism gives an epimorphism.
fn class_representatives(f: &Field) -> Vec<ProjMatrix> {
    f.elements()
        .filter(|&t| t <= f.neg(t))
        .map(|t| ProjMatrix::normalized(f, [0, f.neg(1), 1, t]))
        .collect()
}

/// Looks for `A, B` in PSL(2, q) satisfying every relator of `p` and
/// generating PSL(2, q). `Ok(None)` means the scan was exhaustive.
pub fn find_epimorphism(
    p: &Presentation,
    q: u32,
    budget: &EpiBudget,
) -> Result<Option<Epimorphism>, EpiError> {
    if p.generator_count() != 2 {
        return Err(EpiError::NotTwoGenerators(p.generator_count()));
    }
    let target = psl2_order(q)?;
    if q > budget.max_q {
        return Err(EpiError::BudgetExhausted {
            q,
            reason: format!("q > {}", budget.max_q),
        });
    }
    let f = make_field(q)?;
    let reps = class_representatives(&f);
    let all = psl2_elements(&f);
    let total = reps.len() as u64 * all.len() as u64;
    if let Some(cap) = budget.max_pairs {
        if total > cap {
            return Err(EpiError::BudgetExhausted {
                q,
                reason: format!("{total} pairs > {cap}"),
            });
        }
    }
    let mut relators: Vec<&[Letter]> = p.relators().iter().map(Word::letters).collect();
    relators.sort_by_key(|r| r.len());
    let n = all.len() as u64;
    let found = (0..total).into_par_iter().find_map_first(|idx| {
        let a = reps[(idx / n) as usize];
        let b = all[(idx % n) as usize];
        let raw = [a.entries, b.entries];
        let inv = [adjugate(&f, &raw[0]), adjugate(&f, &raw[1])];
        if !relators
            .iter()
            .all(|r| is_scalar(&eval_raw(&f, r, &raw, &inv)))
        {
            return None;
        }
        let gens = [
            projective_line_action(&f, &a).ok()?,
            projective_line_action(&f, &b).ok()?,
        ];
        let order = schreier_sims(&gens).ok()?.order_u64()?;
        (order == target).then_some(Epimorphism {
            q,
            a,
            b,
            image_order: order,
        })
    });
    Ok(found)
}
