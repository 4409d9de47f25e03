//! Stabilizer chains with Schreier vectors and deterministic Schreier–Sims.
//!
//! Transversal elements are never stored explicitly; a coset representative
//! is the word read off the Schreier vector. Elements under test are kept as
//! lazy words in the strong generators and only evaluated at the points the
//! sift needs, which keeps regular representations of degree ~10^6 workable.

use num_bigint::BigUint;

use super::Permutation;

const NONE: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

/// One factor of a lazy word: strong generator `index`, inverted or not.
pub(crate) type Factor = (u32, bool);

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub(crate) point: u32,
    gens: Vec<u32>,
    done: Vec<usize>,
    pub(crate) orbit: Vec<u32>,
    /// Per point: strong generator that reached it, `ROOT` for the base
    /// point, `NONE` outside the orbit.
    label: Vec<u32>,
    /// Per point: position in `orbit`, `NONE` outside.
    pos: Vec<u32>,
}

impl Level {
    fn new(point: u32, degree: usize) -> Self {
        let mut label = vec![NONE; degree];
        let mut pos = vec![NONE; degree];
        label[point as usize] = ROOT;
        pos[point as usize] = 0;
        Level {
            point,
            gens: Vec::new(),
            done: Vec::new(),
            orbit: vec![point],
            label,
            pos,
        }
    }

    #[inline]
    pub(crate) fn contains(&self, x: u32) -> bool {
        self.pos[x as usize] != NONE
    }

    #[inline]
    pub(crate) fn position(&self, x: u32) -> Option<usize> {
        match self.pos[x as usize] {
            NONE => None,
            p => Some(p as usize),
        }
    }
}

/// Base and strong generating set.
#[derive(Clone, Debug)]
pub(crate) struct StabChain {
    degree: usize,
    strong: Vec<Permutation>,
    strong_inv: Vec<Permutation>,
    pub(crate) levels: Vec<Level>,
    /// The base is known to be a base of an overgroup containing every
    /// element ever sifted, so fixing all base points means identity.
    fixed_base: bool,
}

/// Lazily evaluated group element: optional explicit head, then strong
/// generator factors.
#[derive(Clone, Debug)]
pub(crate) struct LazyElement<'a> {
    head: Option<&'a Permutation>,
    tail: Vec<Factor>,
}

impl<'a> LazyElement<'a> {
    pub(crate) fn word(tail: Vec<Factor>) -> Self {
        LazyElement { head: None, tail }
    }

    pub(crate) fn explicit(p: &'a Permutation) -> Self {
        LazyElement {
            head: Some(p),
            tail: Vec::new(),
        }
    }
}

impl StabChain {
    pub(crate) fn empty(degree: usize) -> Self {
        StabChain {
            degree,
            strong: Vec::new(),
            strong_inv: Vec::new(),
            levels: Vec::new(),
            fixed_base: false,
        }
    }

    /// A chain whose base is fixed in advance (a complete base of some
    /// overgroup). Only elements of that overgroup may be added or tested
    /// with [`contains_member`](Self::contains_member).
    pub(crate) fn with_fixed_base(degree: usize, base: &[u32]) -> Self {
        StabChain {
            degree,
            strong: Vec::new(),
            strong_inv: Vec::new(),
            levels: base.iter().map(|&b| Level::new(b, degree)).collect(),
            fixed_base: true,
        }
    }

    pub(crate) fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub(crate) fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    pub(crate) fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| {
            acc * BigUint::from(l.orbit.len())
        })
    }

    /// `None` if the order does not fit in a u64.
    pub(crate) fn order_u64(&self) -> Option<u64> {
        self.levels
            .iter()
            .try_fold(1u64, |acc, l| acc.checked_mul(l.orbit.len() as u64))
    }

    #[inline]
    fn apply(&self, x: u32, f: Factor) -> u32 {
        if f.1 {
            self.strong_inv[f.0 as usize].image(x)
        } else {
            self.strong[f.0 as usize].image(x)
        }
    }

    #[inline]
    pub(crate) fn eval(&self, e: &LazyElement<'_>, x: u32) -> u32 {
        let mut y = match e.head {
            Some(h) => h.image(x),
            None => x,
        };
        for &f in &e.tail {
            y = self.apply(y, f);
        }
        y
    }

    pub(crate) fn materialize(&self, e: &LazyElement<'_>) -> Permutation {
        // One factor at a time over all points; far friendlier to the cache
        // than evaluating the whole word point by point.
        let mut images: Vec<u32> = match e.head {
            Some(h) => h.images().to_vec(),
            None => (0..self.degree as u32).collect(),
        };
        for &(s, inv) in &e.tail {
            let p = if inv {
                &self.strong_inv[s as usize]
            } else {
                &self.strong[s as usize]
            };
            for y in &mut images {
                *y = p.image(*y);
            }
        }
        Permutation::from_images_unchecked(images)
    }

    /// Appends the factors of `u_γ^-1` (mapping `γ` back to the base point).
    fn push_inverse_transversal(&self, level: usize, mut gamma: u32, out: &mut Vec<Factor>) {
        let lv = &self.levels[level];
        loop {
            let s = lv.label[gamma as usize];
            debug_assert_ne!(s, NONE);
            if s == ROOT {
                return;
            }
            out.push((s, true));
            gamma = self.strong_inv[s as usize].image(gamma);
        }
    }

    /// Appends the factors of `u_γ` (mapping the base point to `γ`).
    pub(crate) fn push_transversal(&self, level: usize, gamma: u32, out: &mut Vec<Factor>) {
        let start = out.len();
        self.push_inverse_transversal(level, gamma, out);
        out[start..].reverse();
        for f in &mut out[start..] {
            f.1 = false;
        }
    }

    /// Sifts from `from` downwards. Returns the level where the sift
    /// stopped (`levels.len()` if it went through) and the residue.
    pub(crate) fn sift<'a>(&self, mut e: LazyElement<'a>, from: usize) -> (usize, LazyElement<'a>) {
        for l in from..self.levels.len() {
            let gamma = self.eval(&e, self.levels[l].point);
            if !self.levels[l].contains(gamma) {
                return (l, e);
            }
            self.push_inverse_transversal(l, gamma, &mut e.tail);
        }
        (self.levels.len(), e)
    }

    /// Orbit positions of a sifted element, or `None` if it is not in the
    /// group described by the base images. Only meaningful for elements of
    /// the group itself (fixing the base then means identity).
    pub(crate) fn positions(&self, e: LazyElement<'_>) -> Option<Vec<usize>> {
        let mut e = e;
        let mut out = Vec::with_capacity(self.levels.len());
        for l in 0..self.levels.len() {
            let gamma = self.eval(&e, self.levels[l].point);
            out.push(self.levels[l].position(gamma)?);
            self.push_inverse_transversal(l, gamma, &mut e.tail);
        }
        Some(out)
    }

    /// Membership for an arbitrary permutation of the right degree.
    pub(crate) fn contains(&self, p: &Permutation) -> bool {
        let (l, residue) = self.sift(LazyElement::explicit(p), 0);
        l == self.levels.len() && (0..self.degree as u32).all(|x| self.eval(&residue, x) == x)
    }

    /// Membership for an element known to lie in a group for which this
    /// chain's base is a base (the group itself, or the fixed overgroup).
    pub(crate) fn contains_member(&self, p: &Permutation) -> bool {
        self.sift(LazyElement::explicit(p), 0).0 == self.levels.len()
    }

    fn push_strong(&mut self, p: Permutation) -> u32 {
        self.strong_inv.push(p.inverse());
        self.strong.push(p);
        (self.strong.len() - 1) as u32
    }

    /// Adds strong generator `s` to level `l` and extends its orbit.
    fn add_to_level(&mut self, l: usize, s: u32) {
        let strong = &self.strong;
        let lv = &mut self.levels[l];
        lv.gens.push(s);
        lv.done.push(0);
        let old_len = lv.orbit.len();
        for i in 0..old_len {
            let y = strong[s as usize].image(lv.orbit[i]);
            if lv.pos[y as usize] == NONE {
                lv.pos[y as usize] = lv.orbit.len() as u32;
                lv.label[y as usize] = s;
                lv.orbit.push(y);
            }
        }
        let mut i = old_len;
        while i < lv.orbit.len() {
            let x = lv.orbit[i];
            for &t in &lv.gens {
                let y = strong[t as usize].image(x);
                if lv.pos[y as usize] == NONE {
                    lv.pos[y as usize] = lv.orbit.len() as u32;
                    lv.label[y as usize] = t;
                    lv.orbit.push(y);
                }
            }
            i += 1;
        }
    }

    /// Adds a new (non-identity) generator fixing the first `from` base
    /// points, appending a base point if it fixes them all. Returns the
    /// deepest level it was added to.
    fn insert_generator(&mut self, p: Permutation, from: usize) -> usize {
        let stop = (from..self.levels.len())
            .find(|&l| p.image(self.levels[l].point) != self.levels[l].point);
        let deepest = match stop {
            Some(l) => l,
            None => {
                assert!(!self.fixed_base, "element outside the fixed-base overgroup");
                let point = p
                    .smallest_moved_point()
                    .expect("identity passed as strong generator");
                self.levels.push(Level::new(point, self.degree));
                self.levels.len() - 1
            }
        };
        let s = self.push_strong(p);
        for l in from..=deepest {
            self.add_to_level(l, s);
        }
        deepest
    }

    /// Adds a generator of the group (not a Schreier generator) and
    /// restores the chain.
    pub(crate) fn add_generator(&mut self, p: Permutation) {
        if p.is_identity() {
            return;
        }
        self.insert_generator(p, 0);
        self.complete();
    }

    /// Deterministic Schreier–Sims: tests every untested Schreier generator,
    /// deepest level first, inserting non-trivial residues.
    pub(crate) fn complete(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            match self.process_level(i - 1) {
                Some(j) => i = j + 1,
                None => i -= 1,
            }
        }
    }

    fn process_level(&mut self, i: usize) -> Option<usize> {
        let last = i + 1 == self.levels.len();
        if self.fixed_base && last {
            // A Schreier generator fixes every base point here, so it is trivial.
            let lv = &mut self.levels[i];
            let n = lv.orbit.len();
            lv.done.iter_mut().for_each(|d| *d = n);
            return None;
        }
        for gi in 0..self.levels[i].gens.len() {
            let s = self.levels[i].gens[gi];
            while self.levels[i].done[gi] < self.levels[i].orbit.len() {
                let p = self.levels[i].done[gi];
                self.levels[i].done[gi] += 1;
                let beta = self.levels[i].orbit[p];
                let img = self.strong[s as usize].image(beta);
                // Tree edge: u_beta * s == u_img, trivial Schreier generator.
                if self.levels[i].label[img as usize] == s
                    && self.strong_inv[s as usize].image(img) == beta
                {
                    continue;
                }
                let mut tail = Vec::new();
                self.push_transversal(i, beta, &mut tail);
                tail.push((s, false));
                self.push_inverse_transversal(i, img, &mut tail);
                let (stop, residue) = self.sift(LazyElement::word(tail), i + 1);
                if stop < self.levels.len() {
                    let h = self.materialize(&residue);
                    return Some(self.insert_generator(h, i + 1));
                }
                if self.fixed_base {
                    continue;
                }
                let h = self.materialize(&residue);
                if !h.is_identity() {
                    return Some(self.insert_generator(h, i + 1));
                }
            }
        }
        None
    }

    /// Chain for a transitive group acting regularly, certified without
    /// sifting: for each generator `s`, the map `ℓ` with `ℓ(0) = 0^s`
    /// and `ℓ(x^t) = ℓ(x)^t` must be well defined. Then the centralizer is
    /// transitive, so point stabilizers are normal and hence trivial.
    pub(crate) fn try_regular(degree: usize, gens: &[Permutation]) -> Option<StabChain> {
        if degree < 2 {
            return None;
        }
        let gens: Vec<&Permutation> = gens.iter().filter(|g| !g.is_identity()).collect();
        if gens.is_empty() {
            return None;
        }
        let mut chain = StabChain::empty(degree);
        chain.levels.push(Level::new(0, degree));
        for g in &gens {
            let s = chain.push_strong((*g).clone());
            chain.levels[0].gens.push(s);
            chain.levels[0].done.push(0);
        }
        chain.add_to_level_all(0);
        if chain.levels[0].orbit.len() != degree {
            return None;
        }
        let orbit = &chain.levels[0].orbit;
        let label = &chain.levels[0].label;
        let mut ell = vec![NONE; degree];
        for g in &gens {
            ell[0] = g.image(0);
            for &x in &orbit[1..] {
                let s = label[x as usize] as usize;
                let pred = chain.strong_inv[s].image(x);
                ell[x as usize] = chain.strong[s].image(ell[pred as usize]);
            }
            for x in 0..degree {
                for t in &chain.strong {
                    if ell[t.image(x as u32) as usize] != t.image(ell[x]) {
                        return None;
                    }
                }
            }
        }
        let n = chain.levels[0].orbit.len();
        chain.levels[0].done.iter_mut().for_each(|d| *d = n);
        Some(chain)
    }

    fn add_to_level_all(&mut self, l: usize) {
        let strong = &self.strong;
        let lv = &mut self.levels[l];
        let mut i = 0;
        while i < lv.orbit.len() {
            let x = lv.orbit[i];
            for &t in &lv.gens {
                let y = strong[t as usize].image(x);
                if lv.pos[y as usize] == NONE {
                    lv.pos[y as usize] = lv.orbit.len() as u32;
                    lv.label[y as usize] = t;
                    lv.orbit.push(y);
                }
            }
            i += 1;
        }
    }

    /// Full deterministic Schreier–Sims from generators, smallest moved
    /// points as base points.
    pub(crate) fn from_generators(degree: usize, gens: &[Permutation]) -> StabChain {
        if let Some(c) = StabChain::try_regular(degree, gens) {
            return c;
        }
        let mut chain = StabChain::empty(degree);
        for g in gens {
            if g.is_identity() {
                continue;
            }
            chain.insert_generator(g.clone(), 0);
        }
        chain.complete();
        chain
    }

    /// Lazy word for the element with the given orbit positions
    /// (`g = u_{k-1} ... u_1 u_0`).
    pub(crate) fn element_word(&self, positions: &[usize]) -> Vec<Factor> {
        let mut tail = Vec::new();
        for l in (0..self.levels.len()).rev() {
            let gamma = self.levels[l].orbit[positions[l]];
            self.push_transversal(l, gamma, &mut tail);
        }
        tail
    }

    /// Mixed-radix index of orbit positions, level 0 least significant.
    pub(crate) fn index_of(&self, positions: &[usize]) -> u64 {
        let mut idx = 0u64;
        for l in (0..self.levels.len()).rev() {
            idx = idx * self.levels[l].orbit.len() as u64 + positions[l] as u64;
        }
        idx
    }

    pub(crate) fn positions_of_index(&self, mut idx: u64) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.levels.len());
        for lv in &self.levels {
            let n = lv.orbit.len() as u64;
            out.push((idx % n) as usize);
            idx /= n;
        }
        out
    }

    /// Index of the strong generator equal to the `i`-th group generator,
    /// if it was kept as is.
    pub(crate) fn strong_index_of(&self, p: &Permutation) -> Option<u32> {
        self.strong.iter().position(|s| s == p).map(|i| i as u32)
    }
}
