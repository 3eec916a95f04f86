use super::{Rational, Scalar};

/// Sparse vector: entries sorted by index, no stored zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct SparseVec<S> {
    entries: Vec<(usize, S)>,
}

impl<S> Default for SparseVec<S> {
    fn default() -> Self {
        SparseVec { entries: Vec::new() }
    }
}

impl<S: Scalar> SparseVec<S> {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec { entries: vec![(i, S::one())] }
    }

    /// Builds from arbitrary `(index, value)` pairs, summing duplicates.
    pub fn from_pairs(mut pairs: Vec<(usize, S)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(usize, S)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, w)) if *j == i => w.add_assign(&v),
                _ => {
                    if let Some((_, w)) = entries.last() {
                        if w.is_zero() {
                            entries.pop();
                        }
                    }
                    entries.push((i, v));
                }
            }
        }
        if entries.last().is_some_and(|(_, w)| w.is_zero()) {
            entries.pop();
        }
        SparseVec { entries }
    }

    pub fn from_dense(v: &[S]) -> Self {
        SparseVec {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<S> {
        let mut v = vec![S::zero(); len];
        for (i, x) in &self.entries {
            v[*i] = x.clone();
        }
        v
    }

    pub fn entries(&self) -> &[(usize, S)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, S)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.entries.iter().map(|(i, x)| (*i, x))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> S {
        match self.entries.binary_search_by_key(&i, |p| p.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|p| p.0)
    }

    /// `self + c * other`
    pub fn axpy(&self, c: &S, other: &SparseVec<S>) -> SparseVec<S> {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, c.mul(y)));
                        b.next();
                    } else {
                        let s = x.add(&c.mul(y));
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, c.mul(y)));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec<S>) -> SparseVec<S> {
        self.axpy(&S::one(), other)
    }

    pub fn sub(&self, other: &SparseVec<S>) -> SparseVec<S> {
        self.axpy(&S::one().neg(), other)
    }

    pub fn scale(&self, c: &S) -> SparseVec<S> {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, x)| (*i, x.mul(c)))
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        }
    }

    pub fn dot(&self, other: &SparseVec<S>) -> S {
        let mut acc = S::zero();
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < other.entries.len() {
            let (i, x) = &self.entries[a];
            let (j, y) = &other.entries[b];
            if i < j {
                a += 1;
            } else if j < i {
                b += 1;
            } else {
                acc.add_assign(&x.mul(y));
                a += 1;
                b += 1;
            }
        }
        acc
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseVec<T> {
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, x)| (*i, f(x)))
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        }
    }

    /// Reindexes entries; `f` returning `None` drops the entry.
    pub fn reindex(&self, f: impl Fn(usize) -> Option<usize>) -> SparseVec<S> {
        SparseVec::from_pairs(
            self.entries
                .iter()
                .filter_map(|(i, x)| f(*i).map(|j| (j, x.clone())))
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64
    where
        S: ToF64,
    {
        self.entries.iter().map(|(_, x)| x.to_f64().abs()).fold(0.0, f64::max)
    }
}

/// Lossy conversion for residual reporting.
pub trait ToF64 {
    fn to_f64(&self) -> f64;
}

impl ToF64 for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl ToF64 for Rational {
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
}

/// Column accumulator for operator assembly. Pushes are cheap; `finish`
/// sorts and merges.
pub struct Acc<S> {
    pairs: Vec<(usize, S)>,
}

impl<S: Scalar> Default for Acc<S> {
    fn default() -> Self {
        Acc { pairs: Vec::new() }
    }
}

impl<S: Scalar> Acc<S> {
    pub fn new() -> Self {
        Acc::default()
    }

    pub fn push(&mut self, i: usize, v: S) {
        if !v.is_zero() {
            self.pairs.push((i, v));
        }
    }

    pub fn extend(&mut self, v: &SparseVec<S>, c: &S) {
        for (i, x) in v.iter() {
            self.push(i, x.mul(c));
        }
    }

    pub fn clear(&mut self) {
        self.pairs.clear();
    }

    pub fn finish(&mut self) -> SparseVec<S> {
        SparseVec::from_pairs(std::mem::take(&mut self.pairs))
    }
}

/// Column-major sparse matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct SparseMat<S> {
    rows: usize,
    cols: Vec<SparseVec<S>>,
}

pub type QMatrix = SparseMat<Rational>;

impl<S: Scalar> SparseMat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMat { rows: n, cols: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_columns(rows: usize, cols: Vec<SparseVec<S>>) -> Self {
        debug_assert!(cols.iter().all(|c| c.max_index().is_none_or(|m| m < rows)));
        SparseMat { rows, cols }
    }

    pub fn from_triplets(rows: usize, ncols: usize, trip: Vec<(usize, usize, S)>) -> Self {
        let mut per: Vec<Vec<(usize, S)>> = vec![Vec::new(); ncols];
        for (r, c, v) in trip {
            assert!(r < rows && c < ncols, "triplet out of range");
            per[c].push((r, v));
        }
        SparseMat { rows, cols: per.into_iter().map(SparseVec::from_pairs).collect() }
    }

    pub fn from_dense(rows: &[Vec<S>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut trip = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                if !x.is_zero() {
                    trip.push((i, j, x.clone()));
                }
            }
        }
        SparseMat::from_triplets(nrows, ncols, trip)
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let mut out = vec![vec![S::zero(); self.ncols()]; self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                out[i][j] = x.clone();
            }
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &SparseVec<S> {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec<S>] {
        &self.cols
    }

    pub fn into_columns(self) -> Vec<SparseVec<S>> {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.cols[j].get(i)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.nnz()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    pub fn mul_vec(&self, v: &SparseVec<S>) -> SparseVec<S> {
        let mut acc = Acc::new();
        for (j, x) in v.iter() {
            acc.extend(&self.cols[j], x);
        }
        acc.finish()
    }

    pub fn mul_dense(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.ncols(), "dimension mismatch");
        let mut out = vec![S::zero(); self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            if v[j].is_zero() {
                continue;
            }
            for (i, x) in c.iter() {
                out[i].add_assign(&x.mul(&v[j]));
            }
        }
        out
    }

    /// `self * rhs`
    pub fn matmul(&self, rhs: &SparseMat<S>) -> SparseMat<S> {
        assert_eq!(self.ncols(), rhs.rows, "dimension mismatch in matmul");
        SparseMat { rows: self.rows, cols: rhs.cols.iter().map(|c| self.mul_vec(c)).collect() }
    }

    pub fn transpose(&self) -> SparseMat<S> {
        let mut per: Vec<Vec<(usize, S)>> = vec![Vec::new(); self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                per[i].push((j, x.clone()));
            }
        }
        SparseMat {
            rows: self.ncols(),
            cols: per.into_iter().map(|entries| SparseVec { entries }).collect(),
        }
    }

    pub fn add(&self, rhs: &SparseMat<S>) -> SparseMat<S> {
        self.axpy(&S::one(), rhs)
    }

    pub fn sub(&self, rhs: &SparseMat<S>) -> SparseMat<S> {
        self.axpy(&S::one().neg(), rhs)
    }

    /// `self + c * rhs`
    pub fn axpy(&self, c: &S, rhs: &SparseMat<S>) -> SparseMat<S> {
        assert!(self.rows == rhs.rows && self.ncols() == rhs.ncols(), "shape mismatch");
        SparseMat {
            rows: self.rows,
            cols: self.cols.iter().zip(&rhs.cols).map(|(a, b)| a.axpy(c, b)).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> SparseMat<S> {
        SparseMat { rows: self.rows, cols: self.cols.iter().map(|v| v.scale(c)).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseMat<T> {
        SparseMat { rows: self.rows, cols: self.cols.iter().map(|v| v.map(&f)).collect() }
    }

    pub fn select_columns(&self, idx: &[usize]) -> SparseMat<S> {
        SparseMat { rows: self.rows, cols: idx.iter().map(|&j| self.cols[j].clone()).collect() }
    }

    /// Keeps the listed rows, renumbered in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> SparseMat<S> {
        let mut pos = vec![usize::MAX; self.rows];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        SparseMat {
            rows: idx.len(),
            cols: self
                .cols
                .iter()
                .map(|c| c.reindex(|i| (pos[i] != usize::MAX).then_some(pos[i])))
                .collect(),
        }
    }

    /// Horizontal concatenation.
    pub fn hcat(parts: &[&SparseMat<S>]) -> SparseMat<S> {
        let rows = parts.first().map_or(0, |p| p.rows);
        assert!(parts.iter().all(|p| p.rows == rows), "row mismatch in hcat");
        SparseMat { rows, cols: parts.iter().flat_map(|p| p.cols.iter().cloned()).collect() }
    }

    /// Places `self` inside a larger zero matrix at the given offsets.
    pub fn embed(&self, rows: usize, cols: usize, row_off: usize, col_off: usize) -> SparseMat<S> {
        let mut out = SparseMat::zeros(rows, cols);
        for (j, c) in self.cols.iter().enumerate() {
            out.cols[col_off + j] = c.reindex(|i| Some(i + row_off));
        }
        out
    }

    pub fn max_abs(&self) -> f64
    where
        S: ToF64,
    {
        self.cols.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::integer(n)
    }

    #[test]
    fn from_pairs_merges_and_drops_zeros() {
        let v = SparseVec::from_pairs(vec![(3, q(1)), (1, q(2)), (3, q(-1)), (1, q(1))]);
        assert_eq!(v.entries(), &[(1, q(3))]);
        let w = SparseVec::from_pairs(vec![(0, q(1)), (0, q(-1)), (2, q(5))]);
        assert_eq!(w.entries(), &[(2, q(5))]);
    }

    #[test]
    fn matmul_and_transpose() {
        let a = QMatrix::from_dense(&[vec![q(1), q(2)], vec![q(0), q(3)]]);
        let b = QMatrix::from_dense(&[vec![q(1), q(0)], vec![q(-1), q(1)]]);
        let ab = a.matmul(&b);
        assert_eq!(ab.to_dense(), vec![vec![q(-1), q(2)], vec![q(-3), q(3)]]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().get(1, 0), q(2));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn row_selection() {
        let a = QMatrix::from_dense(&[vec![q(1)], vec![q(2)], vec![q(3)]]);
        let s = a.select_rows(&[2, 0]);
        assert_eq!(s.to_dense(), vec![vec![q(3)], vec![q(1)]]);
    }
}
