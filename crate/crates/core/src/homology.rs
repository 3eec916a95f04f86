//! Hochschild, cyclic and periodic cyclic homology by exact ranks.
//!
//! `CC_m = ⊕_{k ≥ 0} C_{m−2k}` with differential `b + B` is the total complex
//! of the `(b, B)` bicomplex. Truncation window `N` has even part `CC_{2N}`
//! (degrees `0, 2, …, 2N`) and odd part `CC_{2N−1}`; its homology is
//! `(HC_{2N}, HC_{2N−1})`. The periodicity map `S: CC_m → CC_{m−2}` forgets
//! the top component, and the rank of `S^w` on homology is obtained from the
//! long exact sequence of `0 → K_w → CC → CC[−2w] → 0` using dimensions only.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::chains::chain_space_dim;
use crate::exactnum::{rank, QMatrix, Rational, SparseMat};
use crate::operators::Operators;

pub const DEFAULT_MAX_BASIS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HomologyError {
    #[error("resource cap: dim C_{degree} = {dim} exceeds the limit of {cap} basis elements")]
    ResourceCap { degree: usize, dim: usize, cap: usize },
    #[error("invalid request: {0}")]
    Invalid(String),
}

/// Window of the truncated periodic complex.
///
/// The `Z/2`-graded quotient of the periodic complex by
/// `∏_{n>2N} C_n ⊕ b(C_{2N+1})`: even part `⊕_{k≤N} C_{2k}` modulo the top
/// boundaries, odd part `⊕_{k<N} C_{2k+1}`, and `B` out of `C_{2N}` dropped.
/// Its homology is `(HC_{2N}, HC_{2N−1})`.
#[derive(Clone, Debug)]
pub struct TruncationWindow {
    pub n: usize,
    /// Chain degrees of the even space in block order.
    pub even_degrees: Vec<usize>,
    pub odd_degrees: Vec<usize>,
    pub even_to_odd: QMatrix,
    pub odd_to_even: QMatrix,
    /// `b(C_{2N+1})` inside the even space; quotiented out.
    pub top_boundary: QMatrix,
}

impl TruncationWindow {
    pub fn even_dim(&self) -> usize {
        self.even_to_odd.ncols()
    }

    pub fn odd_dim(&self) -> usize {
        self.odd_to_even.ncols()
    }

    /// `d² = 0` on the quotient, exactly.
    pub fn is_complex(&self) -> bool {
        if !self.even_to_odd.matmul(&self.odd_to_even).is_zero() {
            return false;
        }
        let dd = self.odd_to_even.matmul(&self.even_to_odd);
        let r = rank(&self.top_boundary);
        dd.is_zero() || rank(&SparseMat::hcat(&[&self.top_boundary, &dd])) == r
    }

    pub fn homology_dims(&self) -> (usize, usize) {
        let re = rank(&self.even_to_odd);
        let rt = rank(&self.top_boundary);
        // rank of odd→even as a map into the quotient
        let ro = rank(&SparseMat::hcat(&[&self.odd_to_even, &self.top_boundary])) - rt;
        (self.even_dim() - rt - re - ro, self.odd_dim() - ro - re)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HpSummary {
    pub even: usize,
    pub odd: usize,
    pub stabilized: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub hh: Vec<usize>,
    /// `[HC_{2N}, HC_{2N−1}]` for `N = 0, 1, …`
    pub hc: Vec<[usize; 2]>,
    /// Rank of `S^window` out of each window, `[even, odd]` for `N = 1, 2, …`
    pub s_ranks: Vec<[usize; 2]>,
    pub hp: HpSummary,
    pub window: usize,
    /// The inverse-limit `lim¹` term is not computed.
    pub lim1_ignored: bool,
}

/// Rank engine for one algebra; ranks are memoized per degree.
pub struct HomologyEngine {
    ops: Operators<Rational>,
    max_basis: usize,
    ranks: Mutex<HashMap<(usize, usize), usize>>,
}

impl HomologyEngine {
    pub fn new(alg: FiniteAlgebra) -> Self {
        Self::with_cap(alg, DEFAULT_MAX_BASIS)
    }

    pub fn with_cap(alg: FiniteAlgebra, max_basis: usize) -> Self {
        HomologyEngine { ops: Operators::new(alg), max_basis, ranks: Mutex::new(HashMap::new()) }
    }

    pub fn operators(&self) -> &Operators<Rational> {
        &self.ops
    }

    fn d(&self) -> usize {
        self.ops.algebra().dim()
    }

    fn cdim(&self, n: isize) -> usize {
        chain_space_dim(self.d(), n)
    }

    fn check_cap(&self, n: usize) -> Result<(), HomologyError> {
        let dim = self.cdim(n as isize);
        if dim > self.max_basis {
            return Err(HomologyError::ResourceCap { degree: n, dim, cap: self.max_basis });
        }
        Ok(())
    }

    /// Degrees of `CC_m` with `m − deg < 2w`, highest first (`w = ∞` for all).
    fn cc_degrees(m: isize, w: usize) -> Vec<usize> {
        (0..w).map(|k| m - 2 * k as isize).take_while(|&j| j >= 0).map(|j| j as usize).collect()
    }

    pub fn cc_dim(&self, m: isize, w: usize) -> usize {
        Self::cc_degrees(m, w).iter().map(|&j| self.cdim(j as isize)).sum()
    }

    /// `d_m: CC_m → CC_{m−1}` restricted to the first `w` components of the
    /// source; rows always span all of `CC_{m−1}`.
    pub fn total_differential(&self, m: usize, w: usize) -> QMatrix {
        let src = Self::cc_degrees(m as isize, w);
        let tgt = Self::cc_degrees(m as isize - 1, usize::MAX);
        let mut tgt_off = HashMap::new();
        let mut off = 0;
        for &j in &tgt {
            tgt_off.insert(j, off);
            off += self.cdim(j as isize);
        }
        let rows = off;
        let mut parts = Vec::new();
        for &j in &src {
            let cols = self.cdim(j as isize);
            let mut block = SparseMat::zeros(rows, cols);
            if j >= 1 {
                let b = self.ops.b(j);
                block = block.add(&b.embed(rows, cols, tgt_off[&(j - 1)], 0));
            }
            if let Some(&o) = tgt_off.get(&(j + 1)) {
                let bb = self.ops.connes(j);
                block = block.add(&bb.embed(rows, cols, o, 0));
            }
            parts.push(block);
        }
        SparseMat::hcat(&parts.iter().collect::<Vec<_>>())
    }

    fn rank_of(&self, m: isize, w: usize) -> Result<usize, HomologyError> {
        if m <= 0 {
            return Ok(0);
        }
        let w = w.min(m as usize / 2 + 1);
        let key = (m as usize, w);
        if let Some(r) = self.ranks.lock().unwrap().get(&key) {
            return Ok(*r);
        }
        self.check_cap(m as usize)?;
        let r = rank(&self.total_differential(m as usize, w));
        self.ranks.lock().unwrap().insert(key, r);
        Ok(r)
    }

    /// `dim H_m` of the subcomplex `K_w`; `w = usize::MAX` gives `HC_m`.
    fn homology_dim(&self, m: isize, w: usize) -> Result<usize, HomologyError> {
        if m < 0 {
            return Ok(0);
        }
        let w_m = w.min(m as usize / 2 + 1);
        let w_up = w.min((m as usize + 1) / 2 + 1);
        Ok(self.cc_dim(m, w) - self.rank_of(m, w_m)? - self.rank_of(m + 1, w_up)?)
    }

    pub fn hc(&self, m: isize) -> Result<usize, HomologyError> {
        self.homology_dim(m, usize::MAX)
    }

    pub fn hh(&self, n: isize) -> Result<usize, HomologyError> {
        self.homology_dim(n, 1)
    }

    pub fn hh_dims(&self, n_max: usize) -> Result<Vec<usize>, HomologyError> {
        (0..=n_max as isize).map(|n| self.hh(n)).collect()
    }

    /// Homology of the truncation window `N`.
    pub fn hc_dims(&self, n: usize) -> Result<(usize, usize), HomologyError> {
        Ok(self.window(n)?.homology_dims())
    }

    fn block_offsets(&self, degrees: &[usize]) -> (HashMap<usize, usize>, usize) {
        let mut off = HashMap::new();
        let mut total = 0;
        for &j in degrees {
            off.insert(j, total);
            total += self.cdim(j as isize);
        }
        (off, total)
    }

    /// `b + B` from the `src` blocks into the `tgt` blocks; pieces landing
    /// outside `tgt` are dropped.
    fn block_differential(&self, src: &[usize], tgt: &[usize]) -> QMatrix {
        let (toff, rows) = self.block_offsets(tgt);
        let parts: Vec<QMatrix> = src
            .iter()
            .map(|&j| {
                let cols = self.cdim(j as isize);
                let mut block = SparseMat::zeros(rows, cols);
                if let (true, Some(&o)) = (j >= 1, toff.get(&(j.wrapping_sub(1)))) {
                    block = block.add(&self.ops.b(j).embed(rows, cols, o, 0));
                }
                if let Some(&o) = toff.get(&(j + 1)) {
                    block = block.add(&self.ops.connes(j).embed(rows, cols, o, 0));
                }
                block
            })
            .collect();
        if parts.is_empty() {
            return SparseMat::zeros(rows, 0);
        }
        SparseMat::hcat(&parts.iter().collect::<Vec<_>>())
    }

    pub fn window(&self, n: usize) -> Result<TruncationWindow, HomologyError> {
        self.check_cap(2 * n)?;
        let even_degrees: Vec<usize> = (0..=n).map(|k| 2 * k).collect();
        let odd_degrees: Vec<usize> = (0..n).map(|k| 2 * k + 1).collect();
        let (off, rows) = self.block_offsets(&even_degrees);
        let top = self.ops.b(2 * n + 1);
        Ok(TruncationWindow {
            n,
            even_to_odd: self.block_differential(&even_degrees, &odd_degrees),
            odd_to_even: self.block_differential(&odd_degrees, &even_degrees),
            top_boundary: top.embed(rows, top.ncols(), off[&(2 * n)], 0),
            even_degrees,
            odd_degrees,
        })
    }

    /// Ranks of `S^w: HC_j → HC_{j−2w}` for `j = 0..=j_max`.
    pub fn s_power_ranks(&self, j_max: usize, w: usize) -> Result<Vec<usize>, HomologyError> {
        let mut s = vec![0usize; j_max + 1];
        for j in 2 * w..=j_max {
            let j = j as isize;
            let val = self.hc(j - 1)? as isize - s[(j - 1) as usize] as isize - self.homology_dim(j - 1, w)? as isize
                + self.hc(j - 2 * w as isize)? as isize;
            if val < 0 {
                return Err(HomologyError::Invalid(format!("negative S-rank at degree {j}")));
            }
            s[j as usize] = val as usize;
        }
        Ok(s)
    }

    /// Periodic cyclic homology through stabilized composite `S`-ranks.
    ///
    /// Windows `N = 1..=n_max` are computed in order and the search stops at
    /// the first `N ≥ w + 1` whose ranks repeat those of `N − 1` in both
    /// parities.
    pub fn hp_dims(&self, n_max: usize, w: usize) -> Result<HomologyReport, HomologyError> {
        if w < 1 || n_max < w {
            return Err(HomologyError::Invalid(format!("need N_max ≥ window ≥ 1, got {n_max}, {w}")));
        }
        let mut hc = Vec::new();
        let mut s_ranks: Vec<[usize; 2]> = Vec::new();
        let mut stabilized = false;
        for n in 0..=n_max {
            self.check_cap(2 * n)?;
            hc.push([self.hc(2 * n as isize)?, self.hc(2 * n as isize - 1)?]);
            if n == 0 {
                continue;
            }
            let s = self.s_power_ranks(2 * n, w)?;
            s_ranks.push([s[2 * n], s[2 * n - 1]]);
            if n > w && s_ranks[n - 1] == s_ranks[n - 2] {
                stabilized = true;
                break;
            }
        }
        let top = 2 * (hc.len() - 1);
        let last = *s_ranks.last().expect("n_max ≥ 1");
        Ok(HomologyReport {
            hh: self.hh_dims(top)?,
            hc,
            s_ranks,
            hp: HpSummary { even: last[0], odd: last[1], stabilized },
            window: w,
            lim1_ignored: true,
        })
    }
}

pub fn hh_dims(alg: &FiniteAlgebra, n_max: usize) -> Result<Vec<usize>, HomologyError> {
    HomologyEngine::new(alg.clone()).hh_dims(n_max)
}

pub fn hc_dims(alg: &FiniteAlgebra, n: usize) -> Result<(usize, usize), HomologyError> {
    HomologyEngine::new(alg.clone()).hc_dims(n)
}

pub fn hp_dims(alg: &FiniteAlgebra, n_max: usize, window: usize) -> Result<HomologyReport, HomologyError> {
    HomologyEngine::new(alg.clone()).hp_dims(n_max, window)
}
