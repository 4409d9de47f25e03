//! Integer matrices, Smith normal form and abelianization of presentations.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::todd_coxeter::{CosetTable, TableError};
use crate::words::{Letter, Presentation};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Panics if `rows` is ragged.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().cloned().map(Into::into).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= k * row[src]
    fn sub_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = k * &self[(src, j)];
            self[(dst, j)] -= t;
        }
    }

    /// col[dst] -= k * col[src]
    fn sub_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = k * &self[(i, src)];
            self[(i, dst)] -= t;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(r, j)]);
            self[(r, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

/// Result of [`smith_normal_form`]: `u * m * v` is diagonal with the
/// invariant factors followed by zeros.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let mut t = 0;
    while t < a.rows.min(a.cols) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                if !a[(i, j)].is_zero()
                    && pivot.is_none_or(|(pi, pj)| a[(i, j)].abs() < a[(pi, pj)].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        let mut dirty = false;
        for i in t + 1..a.rows {
            let q = a[(i, t)].div_floor(&a[(t, t)]);
            a.sub_row(i, t, &q);
            u.sub_row(i, t, &q);
            dirty |= !a[(i, t)].is_zero();
        }
        for j in t + 1..a.cols {
            let q = a[(t, j)].div_floor(&a[(t, t)]);
            a.sub_col(j, t, &q);
            v.sub_col(j, t, &q);
            dirty |= !a[(t, j)].is_zero();
        }
        if dirty {
            // A smaller remainder appeared; pick a new pivot.
            continue;
        }
        // Pivot must divide the whole remaining block.
        let bad = (t + 1..a.rows)
            .flat_map(|i| (t + 1..a.cols).map(move |j| (i, j)))
            .find(|&(i, j)| !a[(i, j)].is_multiple_of(&a[(t, t)]));
        if let Some((i, _)) = bad {
            // Add row i to row t and retry.
            let minus_one = -BigInt::one();
            a.sub_row(t, i, &minus_one);
            u.sub_row(t, i, &minus_one);
            continue;
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let diagonal: Vec<BigInt> = (0..t).map(|i| a[(i, i)].clone()).collect();
    SmithForm {
        rank: diagonal.len(),
        diagonal,
        u,
        v,
    }
}

/// Abelian group `Z^free_rank x Z/torsion[0] x ...`, torsion in
/// divisibility order, all entries at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Order of the group, `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|t| format!("Z/{t}")).collect();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        if parts.is_empty() {
            f.write_str("trivial")
        } else {
            f.write_str(&parts.join(" x "))
        }
    }
}

/// Relator-by-generator exponent sum matrix.
pub fn exponent_matrix(p: &Presentation) -> IntMatrix {
    let rows: Vec<Vec<i64>> = p
        .relators()
        .iter()
        .map(|r| {
            (0..p.generator_count())
                .map(|g| r.exponent_sum(g))
                .collect()
        })
        .collect();
    let mut m = IntMatrix::from_rows(&rows);
    m.cols = p.generator_count();
    m
}

pub fn abelianization(p: &Presentation) -> AbelianInvariants {
    let snf = smith_normal_form(&exponent_matrix(p));
    AbelianInvariants {
        torsion: snf.diagonal.into_iter().filter(|d| !d.is_one()).collect(),
        free_rank: p.generator_count() - snf.rank,
    }
}

/// Sorts by column, merges repeats and drops zeros.
fn normalize(mut row: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    row.sort_unstable_by_key(|&(c, _)| c);
    let mut out: Vec<(usize, i64)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
        if out.last().is_some_and(|&(_, v)| v == 0) {
            out.pop();
        }
    }
    out
}

/// `a - k * b` on sorted sparse rows; `None` on overflow.
fn axpy(a: &[(usize, i64)], k: i64, b: &[(usize, i64)]) -> Option<Vec<(usize, i64)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, b[j].1.checked_mul(k)?.checked_neg()?));
            j += 1;
        } else {
            let v = a[i].1.checked_sub(b[j].1.checked_mul(k)?)?;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Invariants of `Z^ncols` modulo the given sparse relation rows.
///
/// Unit pivots are eliminated sparsely (cheapest fill-in first); whatever
/// is left goes through the dense Smith form.
pub fn sparse_abelian_invariants(rows: Vec<Vec<(usize, i64)>>, ncols: usize) -> AbelianInvariants {
    let mut rows: Vec<Vec<(usize, i64)>> = rows
        .into_iter()
        .map(normalize)
        .filter(|r| !r.is_empty())
        .collect();
    let mut row_alive = vec![true; rows.len()];
    let mut col_alive = vec![true; ncols];
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    let mut col_count = vec![0usize; ncols];
    for (i, r) in rows.iter().enumerate() {
        for &(c, _) in r {
            col_rows[c].push(i);
            col_count[c] += 1;
        }
    }
    let mut remaining = ncols;
    'outer: loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if !row_alive[i] {
                continue;
            }
            for &(c, v) in r {
                if v.abs() == 1 {
                    let score = (r.len() - 1) * (col_count[c] - 1);
                    if best.is_none_or(|(s, _, _)| score < s) {
                        best = Some((score, i, c));
                    }
                }
            }
            if best.is_some_and(|(s, _, _)| s == 0) {
                break;
            }
        }
        let Some((_, pr, pc)) = best else { break };
        let pivot = std::mem::take(&mut rows[pr]);
        let u = pivot.iter().find(|&&(c, _)| c == pc).unwrap().1;
        let mut targets = std::mem::take(&mut col_rows[pc]);
        targets.sort_unstable();
        targets.dedup();
        for i in targets {
            if i == pr || !row_alive[i] {
                continue;
            }
            let Some(k) = rows[i].iter().find(|&&(c, _)| c == pc).map(|&(_, v)| v) else {
                continue;
            };
            let Some(next) = axpy(&rows[i], k * u, &pivot) else {
                // Coefficients outgrew i64; finish densely.
                rows[pr] = pivot;
                break 'outer;
            };
            for &(c, _) in &rows[i] {
                col_count[c] -= 1;
            }
            for &(c, _) in &next {
                col_count[c] += 1;
                col_rows[c].push(i);
            }
            row_alive[i] = !next.is_empty();
            rows[i] = next;
        }
        for &(c, _) in &pivot {
            col_count[c] -= 1;
        }
        row_alive[pr] = false;
        col_alive[pc] = false;
        remaining -= 1;
    }

    let cols: Vec<usize> = (0..ncols).filter(|&c| col_alive[c]).collect();
    let mut index = vec![usize::MAX; ncols];
    for (k, &c) in cols.iter().enumerate() {
        index[c] = k;
    }
    let live: Vec<&Vec<(usize, i64)>> = rows
        .iter()
        .enumerate()
        .filter(|&(i, r)| row_alive[i] && !r.is_empty())
        .map(|(_, r)| r)
        .collect();
    let mut m = IntMatrix::zeros(live.len(), cols.len());
    for (i, r) in live.iter().enumerate() {
        for &(c, v) in r.iter() {
            m[(i, index[c])] += v;
        }
    }
    let snf = smith_normal_form(&m);
    AbelianInvariants {
        torsion: snf.diagonal.into_iter().filter(|d| !d.is_one()).collect(),
        free_rank: remaining - snf.rank,
    }
}

/// Abelianization of the stabilizer of coset 0 in a closed table, read off
/// its Reidemeister-Schreier presentation. For a cyclic subgroup this is
/// the subgroup itself.
pub fn subgroup_abelianization(
    t: &CosetTable,
    p: &Presentation,
) -> Result<AbelianInvariants, TableError> {
    if !t.is_closed() {
        return Err(TableError::NotClosed);
    }
    let gens = t.generator_count();
    let m = t.live_count();
    // Schreier generator (c, g) stands for c * g * rep(c g)^-1.
    let col = |c: usize, g: usize| c * gens + g;
    let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
    let mut seen = vec![false; m];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for g in 0..gens {
            for inv in [false, true] {
                let d = t.image(c, Letter::new(g, inv)).expect("closed");
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                    rows.push(vec![(if inv { col(d, g) } else { col(c, g) }, 1)]);
                }
            }
        }
    }
    for r in p.relators() {
        for start in 0..m {
            let mut c = start;
            let mut row = Vec::with_capacity(r.len());
            for &l in r.letters() {
                let d = t.image(c, l).expect("closed");
                if l.is_inverse() {
                    row.push((col(d, l.generator()), -1));
                } else {
                    row.push((col(c, l.generator()), 1));
                }
                c = d;
            }
            rows.push(row);
        }
    }
    Ok(sparse_abelian_invariants(rows, m * gens))
}
