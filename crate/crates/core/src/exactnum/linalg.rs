//! Exact elimination kernels.
//!
//! `rank` is the workhorse for homology and uses a Markowitz-style sparse
//! elimination after splitting the matrix into connected blocks. `rref` is a
//! deterministic reduced row echelon form used wherever bases or solutions
//! are needed.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Field, SparseMat, SparseVec};

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Exact rank.
pub fn rank<S: Field>(m: &SparseMat<S>) -> usize {
    let nr = m.nrows();
    let nc = m.ncols();
    if nr == 0 || nc == 0 {
        return 0;
    }
    // rows are nodes 0..nr, columns nr..nr+nc
    let mut uf = UnionFind::new(nr + nc);
    for (j, c) in m.columns().iter().enumerate() {
        for (i, _) in c.iter() {
            uf.union(i, nr + j);
        }
    }
    let mut block_of = vec![usize::MAX; nr + nc];
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for j in 0..nc {
        if m.col(j).is_zero() {
            continue;
        }
        let r = uf.find(nr + j);
        if block_of[r] == usize::MAX {
            block_of[r] = blocks.len();
            blocks.push((Vec::new(), Vec::new()));
        }
        blocks[block_of[r]].1.push(j);
    }
    for i in 0..nr {
        let r = uf.find(i);
        if block_of[r] != usize::MAX {
            blocks[block_of[r]].0.push(i);
        }
    }
    blocks
        .into_iter()
        .map(|(rows, cols)| {
            let mut pos = vec![usize::MAX; nr];
            for (k, &i) in rows.iter().enumerate() {
                pos[i] = k;
            }
            let mut row_vecs: Vec<Vec<(usize, S)>> = vec![Vec::new(); rows.len()];
            for (k, &j) in cols.iter().enumerate() {
                for (i, x) in m.col(j).iter() {
                    row_vecs[pos[i]].push((k, x.clone()));
                }
            }
            markowitz_rank(row_vecs.into_iter().map(SparseVec::from_pairs).collect(), cols.len())
        })
        .sum()
}

/// Markowitz elimination on a list of sparse rows over `ncols` columns.
fn markowitz_rank<S: Field>(rows: Vec<SparseVec<S>>, ncols: usize) -> usize {
    let mut rows: Vec<Option<SparseVec<S>>> = rows.into_iter().map(Some).collect();
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    let mut count = vec![0usize; ncols];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row.as_ref().unwrap().iter() {
            col_rows[c].push(r);
            count[c] += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..ncols).filter(|&c| count[c] > 0).map(|c| Reverse((count[c], c))).collect();
    let mut rank = 0;
    while let Some(Reverse((cnt, c))) = heap.pop() {
        if cnt != count[c] || cnt == 0 {
            continue;
        }
        // live rows holding column c
        let holders: Vec<usize> = {
            let list = &mut col_rows[c];
            list.sort_unstable();
            list.dedup();
            list.retain(|&r| rows[r].as_ref().is_some_and(|v| !v.get(c).is_zero()));
            list.clone()
        };
        debug_assert_eq!(holders.len(), cnt);
        let piv = *holders
            .iter()
            .min_by(|&&a, &&b| {
                let (ra, rb) = (rows[a].as_ref().unwrap(), rows[b].as_ref().unwrap());
                ra.nnz()
                    .cmp(&rb.nnz())
                    .then(ra.get(c).pivot_cost().total_cmp(&rb.get(c).pivot_cost()))
                    .then(a.cmp(&b))
            })
            .unwrap();
        let prow = rows[piv].take().unwrap();
        rank += 1;
        let pinv = prow.get(c).inv();
        let mut touched: Vec<usize> = prow.iter().map(|(k, _)| k).collect();
        for (k, _) in prow.iter() {
            count[k] -= 1;
        }
        for &r in holders.iter().filter(|&&r| r != piv) {
            let old = rows[r].take().unwrap();
            let f = old.get(c).mul(&pinv).neg();
            let new = old.axpy(&f, &prow);
            // bookkeeping of column counts
            let (mut a, mut b) = (old.entries().iter().peekable(), new.entries().iter().peekable());
            loop {
                match (a.peek().map(|p| p.0), b.peek().map(|p| p.0)) {
                    (Some(i), Some(j)) if i == j => {
                        a.next();
                        b.next();
                    }
                    (Some(i), Some(j)) if i < j => {
                        count[i] -= 1;
                        touched.push(i);
                        a.next();
                    }
                    (Some(_), Some(j)) | (None, Some(j)) => {
                        count[j] += 1;
                        col_rows[j].push(r);
                        touched.push(j);
                        b.next();
                    }
                    (Some(i), None) => {
                        count[i] -= 1;
                        touched.push(i);
                        a.next();
                    }
                    (None, None) => break,
                }
            }
            rows[r] = Some(new);
        }
        touched.sort_unstable();
        touched.dedup();
        for k in touched {
            if count[k] > 0 {
                heap.push(Reverse((count[k], k)));
            }
        }
    }
    rank
}

/// Reduced row echelon form of the rows of `m`.
///
/// Columns are scanned left to right; among candidate rows the pivot with the
/// lowest `pivot_cost` wins, then the sparsest row, then the lowest index.
/// Returns the nonzero reduced rows (pivot entry 1) and their pivot columns.
pub fn rref<S: Field>(m: &SparseMat<S>) -> (Vec<SparseVec<S>>, Vec<usize>) {
    let t = m.transpose();
    let mut pending: Vec<SparseVec<S>> =
        t.into_columns().into_iter().filter(|r| !r.is_zero()).collect();
    let mut done: Vec<SparseVec<S>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for c in 0..m.ncols() {
        let cand = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.get(c).is_zero())
            .min_by(|(ia, a), (ib, b)| {
                a.get(c)
                    .pivot_cost()
                    .total_cmp(&b.get(c).pivot_cost())
                    .then(a.nnz().cmp(&b.nnz()))
                    .then(ia.cmp(ib))
            })
            .map(|(i, _)| i);
        let Some(pi) = cand else { continue };
        let p = pending.swap_remove(pi);
        let p = p.scale(&p.get(c).inv());
        for r in pending.iter_mut().chain(done.iter_mut()) {
            let x = r.get(c);
            if !x.is_zero() {
                *r = r.axpy(&x.neg(), &p);
            }
        }
        pending.retain(|r| !r.is_zero());
        done.push(p);
        pivots.push(c);
    }
    (done, pivots)
}

/// Rank together with a kernel basis.
///
/// For each free column `f` the basis vector is `Σ_p R[p][f] e_{pivot(p)} − e_f`,
/// so its `f` coordinate is `−1` and other free coordinates vanish.
pub fn rank_kernel<S: Field>(m: &SparseMat<S>) -> (usize, Vec<SparseVec<S>>) {
    let (rows, pivots) = rref(m);
    let mut is_pivot = vec![false; m.ncols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for f in (0..m.ncols()).filter(|&f| !is_pivot[f]) {
        let mut pairs = vec![(f, S::one().neg())];
        for (r, &p) in rows.iter().zip(&pivots) {
            let x = r.get(f);
            if !x.is_zero() {
                pairs.push((p, x));
            }
        }
        basis.push(SparseVec::from_pairs(pairs));
    }
    (pivots.len(), basis)
}

/// Some solution of `m x = b`, or `None` when `b` is outside the column space.
/// Free variables are set to zero, which makes the answer deterministic.
pub fn solve<S: Field>(m: &SparseMat<S>, b: &SparseVec<S>) -> Option<SparseVec<S>> {
    let n = m.ncols();
    let mut cols: Vec<SparseVec<S>> = m.columns().to_vec();
    cols.push(b.clone());
    let aug = SparseMat::from_columns(m.nrows(), cols);
    let (rows, pivots) = rref(&aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let pairs = rows
        .iter()
        .zip(&pivots)
        .map(|(r, &p)| (p, r.get(n)))
        .filter(|(_, x)| !x.is_zero())
        .collect();
    Some(SparseVec::from_pairs(pairs))
}

pub fn in_column_space<S: Field>(m: &SparseMat<S>, b: &SparseVec<S>) -> bool {
    solve(m, b).is_some()
}

/// The solution of `m x = b` of least Euclidean norm, `x = mᵀ y` with
/// `(m mᵀ) y = b`.
pub fn solve_min_norm<S: Field>(m: &SparseMat<S>, b: &SparseVec<S>) -> Option<SparseVec<S>> {
    let mt = m.transpose();
    let gram = m.matmul(&mt);
    let y = solve(&gram, b)?;
    let x = mt.mul_vec(&y);
    // gram y = b implies m x = b, but b outside the image has no solution anyway
    (m.mul_vec(&x) == *b).then_some(x)
}
