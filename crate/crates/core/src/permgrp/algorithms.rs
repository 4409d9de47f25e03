use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::chain::{Factor, LazyElement, StabChain};
use super::{evaluate_word, PermError, Permutation, PermutationGroup};
use crate::todd_coxeter::{enumerate, EnumerationLimits};
use crate::words::{Presentation, Word};

const MC_WORD_LENGTH: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimplicityMode {
    /// Class-by-class normal closures; refuses groups above `cap` elements.
    Deterministic { cap: u64 },
    /// Normal closures of `trials` random elements.
    MonteCarlo { trials: u32, seed: u64 },
}

impl Default for SimplicityMode {
    fn default() -> Self {
        SimplicityMode::Deterministic {
            cap: super::DEFAULT_SIMPLICITY_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimplicityVerdict {
    Simple,
    /// `witness` is a non-identity element whose normal closure has order
    /// `normal_subgroup_order`, strictly less than the group order.
    NotSimple {
        witness: Permutation,
        normal_subgroup_order: BigUint,
    },
    ProbablySimple {
        trials: u32,
    },
}

impl SimplicityVerdict {
    pub fn is_simple_or_probably(&self) -> bool {
        !matches!(self, SimplicityVerdict::NotSimple { .. })
    }
}

impl PermutationGroup {
    /// Smallest normal subgroup containing `seeds`, built on this group's
    /// base.
    pub fn normal_closure(&self, seeds: &[Permutation]) -> Result<PermutationGroup, PermError> {
        for s in seeds {
            if !self.contains(s)? {
                return Err(PermError::NotMember);
            }
        }
        Ok(self.normal_closure_unchecked(seeds))
    }

    fn normal_closure_unchecked(&self, seeds: &[Permutation]) -> PermutationGroup {
        let target = self.order();
        let mut k = StabChain::with_fixed_base(self.degree, &self.base());
        let mut gens: Vec<Permutation> = Vec::new();
        for s in seeds {
            if !s.is_identity() && !k.contains_member(s) {
                k.add_generator(s.clone());
                gens.push(s.clone());
            }
        }
        let conjugators: Vec<&Permutation> = self
            .generators
            .iter()
            .filter(|g| !g.is_identity())
            .collect();
        let mut i = 0;
        while i < gens.len() && k.order() != target {
            let h = gens[i].clone();
            i += 1;
            for g in &conjugators {
                let c = h.conjugate_by(g);
                if !k.contains_member(&c) {
                    k.add_generator(c.clone());
                    gens.push(c);
                    if k.order() == target {
                        break;
                    }
                }
            }
        }
        PermutationGroup::from_chain(self.degree, gens, k)
    }

    /// Normal closure of the commutators of generator pairs.
    pub fn derived_subgroup(&self) -> PermutationGroup {
        let g = &self.generators;
        let mut seeds = Vec::new();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                seeds.push(g[i].commutator(&g[j]));
            }
        }
        self.normal_closure_unchecked(&seeds)
    }

    pub fn is_perfect(&self) -> bool {
        self.derived_subgroup().order() == self.order()
    }

    fn capped_order(&self, cap: u64) -> Result<u64, PermError> {
        match self.order_u64() {
            Some(n) if n <= cap => Ok(n),
            _ => Err(PermError::BudgetExceeded {
                order: self.order(),
                cap,
            }),
        }
    }

    /// Strong generator indices of the non-identity group generators.
    fn generator_factors(&self) -> Vec<u32> {
        let chain = self.chain();
        self.generators
            .iter()
            .filter(|g| !g.is_identity())
            .map(|g| {
                chain
                    .strong_index_of(g)
                    .expect("group generators are strong generators")
            })
            .collect()
    }

    /// Index of `s^-1 g s`, `g` given by index.
    fn conjugate_index(&self, index: u64, s: u32) -> u64 {
        let chain = self.chain();
        let word = chain.element_word(&chain.positions_of_index(index));
        let mut tail: Vec<Factor> = Vec::with_capacity(word.len() + 2);
        tail.push((s, true));
        tail.extend(word);
        tail.push((s, false));
        let pos = chain
            .positions(LazyElement::word(tail))
            .expect("conjugate stays in the group");
        chain.index_of(&pos)
    }

    pub(crate) fn element(&self, index: u64) -> Permutation {
        let chain = self.chain();
        let word = chain.element_word(&chain.positions_of_index(index));
        chain.materialize(&LazyElement::word(word))
    }

    /// Center, by testing every element against the generators.
    pub fn center(&self, cap: u64) -> Result<PermutationGroup, PermError> {
        let order = self.capped_order(cap)?;
        if self.is_abelian() {
            return Ok(self.clone());
        }
        let gens = self.generator_factors();
        let central: Vec<u64> = (1..order)
            .into_par_iter()
            .filter(|&i| gens.iter().all(|&s| self.conjugate_index(i, s) == i))
            .collect();
        let mut k = StabChain::with_fixed_base(self.degree, &self.base());
        let mut kgens = Vec::new();
        for i in central {
            let p = self.element(i);
            if !k.contains_member(&p) {
                k.add_generator(p.clone());
                kgens.push(p);
            }
        }
        Ok(PermutationGroup::from_chain(self.degree, kgens, k))
    }

    /// Conjugacy classes as sorted element-index lists, ordered by their
    /// smallest index (so the identity class comes first).
    pub(crate) fn conjugacy_classes(&self, cap: u64) -> Result<Vec<Vec<u64>>, PermError> {
        let order = self.capped_order(cap)?;
        let gens = self.generator_factors();
        let images: Vec<Vec<u64>> = (0..order)
            .into_par_iter()
            .map(|i| gens.iter().map(|&s| self.conjugate_index(i, s)).collect())
            .collect();
        let mut class = vec![u64::MAX; order as usize];
        let mut classes = Vec::new();
        for start in 0..order {
            if class[start as usize] != u64::MAX {
                continue;
            }
            let id = classes.len() as u64;
            class[start as usize] = id;
            let mut members = vec![start];
            let mut k = 0;
            while k < members.len() {
                let x = members[k];
                k += 1;
                for &y in &images[x as usize] {
                    if class[y as usize] == u64::MAX {
                        class[y as usize] = id;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        Ok(classes)
    }

    pub fn conjugacy_class_sizes(&self, cap: u64) -> Result<Vec<usize>, PermError> {
        Ok(self.conjugacy_classes(cap)?.iter().map(Vec::len).collect())
    }

    pub fn is_simple(&self, mode: SimplicityMode) -> Result<SimplicityVerdict, PermError> {
        let order = self.order();
        if order < BigUint::from(2u32) {
            return Err(PermError::TooSmall);
        }
        match mode {
            SimplicityMode::Deterministic { cap } => {
                let n = self.capped_order(cap)?;
                if is_prime(n) {
                    return Ok(SimplicityVerdict::Simple);
                }
                let classes = self.conjugacy_classes(cap)?;
                let reps: Vec<u64> = classes.iter().skip(1).map(|c| c[0]).collect();
                Ok(self
                    .first_proper_closure(reps.into_par_iter().map(|i| self.element(i)))
                    .unwrap_or(SimplicityVerdict::Simple))
            }
            SimplicityMode::MonteCarlo { trials, seed } => {
                let samples = self.random_elements(trials, seed);
                Ok(self
                    .first_proper_closure(samples.into_par_iter())
                    .unwrap_or(SimplicityVerdict::ProbablySimple { trials }))
            }
        }
    }

    fn first_proper_closure<I>(&self, seeds: I) -> Option<SimplicityVerdict>
    where
        I: IndexedParallelIterator<Item = Permutation>,
    {
        let order = self.order();
        seeds.find_map_first(|g| {
            let k = self
                .normal_closure_unchecked(std::slice::from_ref(&g))
                .order();
            (k != order).then_some(SimplicityVerdict::NotSimple {
                witness: g,
                normal_subgroup_order: k,
            })
        })
    }

    /// `count` non-identity elements from random words of length 32 in the
    /// generators and their inverses.
    fn random_elements(&self, count: u32, seed: u64) -> Vec<Permutation> {
        let gens = self.generator_factors();
        let chain = self.chain();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut words: Vec<Vec<Factor>> = Vec::with_capacity(count as usize);
        while words.len() < count as usize {
            let w: Vec<Factor> = (0..MC_WORD_LENGTH)
                .map(|_| (gens[rng.gen_range(0..gens.len())], rng.gen_bool(0.5)))
                .collect();
            let trivial = chain
                .positions(LazyElement::word(w.clone()))
                .is_some_and(|p| p.iter().all(|&x| x == 0));
            if !trivial {
                words.push(w);
            }
        }
        words
            .into_par_iter()
            .map(|w| chain.materialize(&LazyElement::word(w)))
            .collect()
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Order of `p / ⟨⟨w⟩⟩` for a word `w` whose image in `p` is central.
pub fn quotient_by_central(
    p: &Presentation,
    central_word: &Word,
    limits: &EnumerationLimits,
) -> Result<u64, PermError> {
    let table = enumerate(p, &[], limits)?;
    if central_word.is_empty() {
        return Ok(table.live_count() as u64);
    }
    let actions = table.generator_actions()?;
    let z = evaluate_word(central_word, &actions);
    if actions.iter().any(|g| (&z * g) != (g * &z)) {
        return Err(PermError::NotCentral);
    }
    let quotient = enumerate(&p.with_relator(central_word.clone()), &[], limits)?;
    Ok(quotient.live_count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgrp::schreier_sims;

    fn cyclic(n: u32) -> PermutationGroup {
        let c = Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap();
        schreier_sims(&[c]).unwrap()
    }

    fn a5() -> PermutationGroup {
        let a = Permutation::from_cycles(5, &[&[0, 1, 2]]).unwrap();
        let b = Permutation::from_cycles(5, &[&[2, 3, 4]]).unwrap();
        schreier_sims(&[a, b]).unwrap()
    }

    fn s4() -> PermutationGroup {
        let c = Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let t = Permutation::from_cycles(4, &[&[0, 1]]).unwrap();
        schreier_sims(&[c, t]).unwrap()
    }

    #[test]
    fn closure_of_identity_is_trivial() {
        let g = a5();
        let k = g.normal_closure(&[Permutation::identity(5)]).unwrap();
        assert_eq!(k.order(), BigUint::from(1u32));
    }

    #[test]
    fn closure_requires_membership() {
        let t = Permutation::from_cycles(5, &[&[0, 1]]).unwrap();
        assert_eq!(a5().normal_closure(&[t]).unwrap_err(), PermError::NotMember);
    }

    #[test]
    fn s4_normal_subgroups() {
        let g = s4();
        let v = Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap();
        let k = g.normal_closure(&[v]).unwrap();
        assert_eq!(k.order(), BigUint::from(4u32));
        assert!(k.is_normal_in(&g));
        assert_eq!(g.derived_subgroup().order(), BigUint::from(12u32));
        assert_eq!(g.center(1000).unwrap().order(), BigUint::from(1u32));
        let sizes = g.conjugacy_class_sizes(1000).unwrap();
        let mut sorted = sizes.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![1, 3, 6, 6, 8]);
        assert_eq!(sizes[0], 1);
    }

    #[test]
    fn simplicity() {
        assert_eq!(
            a5().is_simple(SimplicityMode::default()).unwrap(),
            SimplicityVerdict::Simple
        );
        assert_eq!(
            cyclic(7).is_simple(SimplicityMode::default()).unwrap(),
            SimplicityVerdict::Simple
        );
        match s4().is_simple(SimplicityMode::default()).unwrap() {
            SimplicityVerdict::NotSimple {
                normal_subgroup_order,
                ..
            } => {
                assert!(
                    normal_subgroup_order == BigUint::from(4u32)
                        || normal_subgroup_order == BigUint::from(12u32)
                )
            }
            v => panic!("{v:?}"),
        }
        let mc = SimplicityMode::MonteCarlo {
            trials: 50,
            seed: 1,
        };
        assert_eq!(
            a5().is_simple(mc).unwrap(),
            SimplicityVerdict::ProbablySimple { trials: 50 }
        );
        assert!(matches!(
            cyclic(6).is_simple(mc).unwrap(),
            SimplicityVerdict::NotSimple { .. }
        ));
        assert_eq!(
            schreier_sims(&[Permutation::identity(2)])
                .unwrap()
                .is_simple(mc),
            Err(PermError::TooSmall)
        );
        assert!(matches!(
            a5().is_simple(SimplicityMode::Deterministic { cap: 10 }),
            Err(PermError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn abelian_center_and_derived() {
        let g = cyclic(6);
        assert_eq!(g.center(100).unwrap().order(), BigUint::from(6u32));
        assert_eq!(cyclic(5).derived_subgroup().order(), BigUint::from(1u32));
    }
}
