//! Permutation groups: Schreier–Sims, membership, normal closures, center
//! and simplicity testing.

mod algorithms;
mod chain;
mod perm;

use std::sync::OnceLock;

use num_bigint::BigUint;
use thiserror::Error;

use crate::todd_coxeter::{EnumerationError, TableError};
use crate::words::Word;

pub use algorithms::{quotient_by_central, SimplicityMode, SimplicityVerdict};
pub use perm::{element_order, Permutation};

use chain::StabChain;

/// Default element cap for deterministic simplicity tests.
pub const DEFAULT_SIMPLICITY_CAP: u64 = 100_000;
/// Default element cap for [`PermutationGroup::center`].
pub const DEFAULT_CENTER_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PermError {
    #[error("permutation degrees differ ({expected} vs {found})")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("images do not form a bijection")]
    NotABijection,
    #[error("permutation is not a member of the group")]
    NotMember,
    #[error("group order {order} exceeds the cap {cap}")]
    BudgetExceeded { order: BigUint, cap: u64 },
    #[error("group has order less than 2")]
    TooSmall,
    #[error("no generators given")]
    NoGenerators,
    #[error("word image is not central")]
    NotCentral,
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// A permutation group given by generators, with a lazily built
/// base and strong generating set.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabChain>,
}

/// Builds the group generated by `gens` and runs Schreier–Sims on it.
pub fn schreier_sims(gens: &[Permutation]) -> Result<PermutationGroup, PermError> {
    let first = gens.first().ok_or(PermError::NoGenerators)?;
    let g = PermutationGroup::new(first.degree(), gens.to_vec())?;
    g.chain();
    Ok(g)
}

impl PermutationGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self, PermError> {
        if let Some(bad) = generators.iter().find(|g| g.degree() != degree) {
            return Err(PermError::DegreeMismatch {
                expected: degree,
                found: bad.degree(),
            });
        }
        let generators = if generators.is_empty() {
            vec![Permutation::identity(degree)]
        } else {
            generators
        };
        Ok(PermutationGroup {
            degree,
            generators,
            chain: OnceLock::new(),
        })
    }

    pub(crate) fn from_chain(
        degree: usize,
        generators: Vec<Permutation>,
        chain: StabChain,
    ) -> Self {
        let g = PermutationGroup::new(degree, generators).expect("degrees checked by caller");
        let _ = g.chain.set(chain);
        g
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub(crate) fn chain(&self) -> &StabChain {
        self.chain
            .get_or_init(|| StabChain::from_generators(self.degree, &self.generators))
    }

    pub fn base(&self) -> Vec<u32> {
        self.chain().base()
    }

    /// Orbit lengths along the stabilizer chain.
    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.chain().levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        self.chain().strong_generators()
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    /// The order, if it fits in a `u64`.
    pub fn order_u64(&self) -> Option<u64> {
        self.chain().order_u64()
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool, PermError> {
        if p.degree() != self.degree {
            return Err(PermError::DegreeMismatch {
                expected: self.degree,
                found: p.degree(),
            });
        }
        Ok(self.chain().contains(p))
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(Permutation::is_identity)
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| (&g[i] * &g[j]) == (&g[j] * &g[i])))
    }

    /// Is `self` a normal subgroup of `overgroup`? Checks conjugates of the
    /// generators by the overgroup's generators.
    pub fn is_normal_in(&self, overgroup: &PermutationGroup) -> bool {
        self.generators.iter().all(|h| {
            overgroup
                .generators
                .iter()
                .all(|g| self.chain().contains(&h.conjugate_by(g)))
        })
    }
}

/// Evaluates `w` with generator `i` sent to `images[i]`.
pub fn evaluate_word(w: &Word, images: &[Permutation]) -> Permutation {
    let degree = images.first().map_or(0, Permutation::degree);
    let mut inverses: Vec<Option<Permutation>> = vec![None; images.len()];
    let mut x: Vec<u32> = (0..degree as u32).collect();
    for letter in w.letters() {
        let g = letter.generator();
        let p = if letter.is_inverse() {
            inverses[g].get_or_insert_with(|| images[g].inverse())
        } else {
            &images[g]
        };
        for y in &mut x {
            *y = p.image(*y);
        }
    }
    Permutation::from_images_unchecked(x)
}
