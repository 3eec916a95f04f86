//! `∇̃ = R ∘ ∇_GM ∘ I` on the retract along a family, one exact retract per
//! grid point.
//!
//! Sections are kept in ambient cochain coordinates `f ∈ ⊕_{k≤2N} C^k` with
//! `b_u^T f_{2N} = 0`. With `r = R_u(I_{E_u}^T f)` the parallel equation is
//! `f'_{<2N} = −r_{<2N}` and `f'_{2N} = −r_{2N} − h_u ḃ_u^T f_{2N}`; the last
//! term is the derivative of the moving kernel.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chains::stacked_offsets;
use crate::deformation::{vertical_window_poly, DeformationFamily};
use crate::exactnum::{PolyQ, Rational, Scalar, SparseMat, SparseVec};
use crate::operators::Operators;

use super::complex::RetractComplex;
use super::universal::{solve_universal_coboundary_min_norm, CoboundingCochain, UniversalCoboundary};
use super::RetractError;

pub const DEFAULT_MAX_JUMP: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetractTransportOptions {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub grid_step: Rational,
    /// Largest allowed max-abs change of `φ_u` between neighbouring grid points.
    pub max_jump: f64,
}

impl RetractTransportOptions {
    pub fn new(n: usize, big_n: usize, grid_step: Rational) -> Self {
        RetractTransportOptions { n, big_n, grid_step, max_jump: DEFAULT_MAX_JUMP }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub u: Rational,
    pub solvable: bool,
    pub phi_norm: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RetractResiduals {
    /// Max-abs gap against the run with half the step.
    pub richardson_gap: f64,
    /// Max over the grid of `|b_u^T f_{2N}(u)|`.
    pub constraint_residual: f64,
    pub max_phi_jump: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetractTrajectory {
    pub s: Rational,
    pub t: Rational,
    pub step: Rational,
    /// Ambient cochain coordinates on `⊕_{k≤2N} C^k`.
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    pub residuals: RetractResiduals,
    #[serde(skip)]
    pub grid: Vec<(f64, Vec<f64>)>,
}

impl RetractTrajectory {
    /// Max over the grid of `|⟨f(u), c(u)⟩ − ⟨f(s), c(s)⟩|` for a family of
    /// stacked chains `c(u)` on `⊕_{k≤2N} C_k`.
    pub fn pairing_drift(&self, cycle: impl Fn(f64) -> Vec<f64>) -> f64 {
        let pair = |u: f64, f: &[f64]| -> f64 { f.iter().zip(cycle(u)).map(|(a, b)| a * b).sum() };
        let (u0, f0) = &self.grid[0];
        let start = pair(*u0, f0);
        self.grid.iter().map(|(u, f)| (pair(*u, f) - start).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetractTransportReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub solvable_grid: Vec<GridPoint>,
    /// Cohomology of the retract at `s`.
    pub hp: [usize; 2],
    pub transport: RetractTrajectory,
}

/// What one fiber contributes: the dense generator and the kernel constraint.
struct Fiber {
    phi: CoboundingCochain,
    generator: Vec<Vec<f64>>,
    constraint: SparseMat<f64>,
}

struct Builder<'a> {
    family: &'a DeformationFamily,
    opts: &'a RetractTransportOptions,
    vertical: SparseMat<PolyQ>,
    b_top_dot: SparseMat<PolyQ>,
    cache: BTreeMap<Rational, Fiber>,
}

impl<'a> Builder<'a> {
    fn new(family: &'a DeformationFamily, opts: &'a RetractTransportOptions) -> Result<Self, RetractError> {
        let top = 2 * opts.big_n;
        let vertical = vertical_window_poly(family, top + 2)?;
        let pops = Operators::new(family.polynomial_algebra().clone());
        let b_top_dot = pops.b(top + 1).map(|p| p.derivative());
        Ok(Builder { family, opts, vertical, b_top_dot, cache: BTreeMap::new() })
    }

    fn phi(&self, u: &Rational) -> Option<CoboundingCochain> {
        match solve_universal_coboundary_min_norm(&self.family.fiber(u), self.opts.n) {
            UniversalCoboundary::Solvable(p) => Some(p),
            UniversalCoboundary::Unsolvable(_) => None,
        }
    }

    fn fiber(&mut self, u: &Rational) -> Result<&Fiber, RetractError> {
        if !self.cache.contains_key(u) {
            let f = self.build(u)?;
            self.cache.insert(u.clone(), f);
        }
        Ok(&self.cache[u])
    }

    fn build(&self, u: &Rational) -> Result<Fiber, RetractError> {
        let phi = self.phi(u).ok_or_else(|| RetractError::SolvabilityLost(u.clone()))?;
        let ops = Operators::new(self.family.fiber(u));
        let (rc, contraction) = RetractComplex::assemble(&ops, &phi, self.opts.big_n)?;
        let top = 2 * self.opts.big_n;
        let offs = stacked_offsets(self.family.dim(), top + 2);
        let amb = offs[top + 1];
        let iet = self.vertical.map(|p| p.eval(u)).transpose().select_columns(&(0..amb).collect::<Vec<_>>());
        let mut g = rc.retraction_ambient().matmul(&iet).scale(&Rational::integer(-1));
        let bt = ops.b(top + 1).transpose();
        let jump = contraction.cochain(top).matmul(&self.b_top_dot.map(|p| p.eval(u)).transpose());
        g = g.sub(&jump.embed(amb, amb, offs[top], offs[top]));
        let generator = g.map(|x| x.to_f64()).to_dense();
        let constraint = bt.map(|x| x.to_f64()).embed(bt.nrows(), amb, 0, offs[top]);
        Ok(Fiber { phi, generator, constraint })
    }
}

fn apply(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| r.iter().zip(y).map(|(a, b)| a * b).sum()).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn grid(s: &Rational, t: &Rational, h: &Rational) -> Vec<Rational> {
    let len = t.sub(s).abs();
    let mut pts = vec![s.clone()];
    let dir = if t >= s { h.clone() } else { h.neg() };
    let mut walked = Rational::zero();
    loop {
        walked = walked.add(&h.abs());
        if walked >= len {
            pts.push(t.clone());
            return pts;
        }
        pts.push(pts.last().unwrap().add(&dir));
    }
}

fn rk4(b: &mut Builder<'_>, pts: &[Rational], y0: &[f64], keep: bool) -> Result<(Vec<f64>, Vec<(f64, Vec<f64>)>), RetractError> {
    let mut y = y0.to_vec();
    let mut out = vec![(pts[0].to_f64(), y.clone())];
    for w in pts.windows(2) {
        let (u0, u1) = (&w[0], &w[1]);
        let mid = u0.add(u1).mul(&Rational::new(1, 2));
        let h = u1.sub(u0).to_f64();
        let k1 = apply(&b.fiber(u0)?.generator, &y);
        let tmp: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + h / 2.0 * k).collect();
        let k2 = apply(&b.fiber(&mid)?.generator, &tmp);
        let tmp: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + h / 2.0 * k).collect();
        let k3 = apply(&b.fiber(&mid)?.generator, &tmp);
        let tmp: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
        let k4 = apply(&b.fiber(u1)?.generator, &tmp);
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if keep {
            out.push((u1.to_f64(), y.clone()));
        }
    }
    Ok((y, out))
}

/// Transports a class of `C_0^per(A_s)`, given in ambient cochain
/// coordinates, to `t` along the retract connection.
///
/// Every grid point and midpoint must have a solvable `δφ = d^{⊗(n+1)}`;
/// this is checked first, then the family's safe interval.
pub fn retract_transport(
    family: &DeformationFamily,
    s: &Rational,
    t: &Rational,
    input: &[f64],
    opts: &RetractTransportOptions,
) -> Result<RetractTransportReport, RetractError> {
    if opts.grid_step <= Rational::zero() {
        return Err(RetractError::Precondition("grid step must be positive".into()));
    }
    let mut b = Builder::new(family, opts)?;
    let pts = grid(s, t, &opts.grid_step);
    // every fiber first, so that an unsolvable point is reported even where
    // φ already blows up on its approach
    for (j, u) in pts.iter().enumerate() {
        let mut probe = vec![u.clone()];
        if j + 1 < pts.len() {
            probe.push(u.add(&pts[j + 1]).mul(&Rational::new(1, 2)));
        }
        for v in &probe {
            if b.phi(v).is_none() {
                return Err(RetractError::SolvabilityLost(v.clone()));
            }
        }
    }
    let mut solvable_grid = Vec::with_capacity(pts.len());
    let mut prev: Option<SparseVec<Rational>> = None;
    let mut max_phi_jump: f64 = 0.0;
    for u in &pts {
        let phi = b.fiber(u)?.phi.flatten();
        solvable_grid.push(GridPoint { u: u.clone(), solvable: true, phi_norm: phi.max_abs() });
        if let Some(p) = &prev {
            let jump = phi.sub(p).max_abs();
            if jump > opts.max_jump {
                return Err(RetractError::GridDiscontinuity { u: u.clone(), jump });
            }
            max_phi_jump = max_phi_jump.max(jump);
        }
        prev = Some(phi);
    }
    if !family.covers(s, t) {
        let (lo, hi) = family.safe_interval.clone().expect("covers() is true without an interval");
        return Err(RetractError::Deformation(crate::deformation::DeformationError::SafeIntervalViolation {
            s: s.clone(),
            t: t.clone(),
            lo,
            hi,
        }));
    }
    let top = 2 * opts.big_n;
    let amb = stacked_offsets(family.dim(), top)[top + 1];
    if input.len() != amb {
        return Err(RetractError::Precondition(format!("input has {} coordinates, the ambient space {amb}", input.len())));
    }
    let constraint_at = |b: &mut Builder<'_>, u: &Rational, y: &[f64]| -> Result<f64, RetractError> {
        Ok(b.fiber(u)?.constraint.mul_vec(&SparseVec::from_dense(y)).max_abs())
    };
    let start_residual = constraint_at(&mut b, s, input)?;
    if start_residual > 1e-9 * (1.0 + max_abs(input)) {
        return Err(RetractError::Precondition(format!("input top component is not in ker b^T (residual {start_residual:e})")));
    }
    let (y, path) = rk4(&mut b, &pts, input, true)?;
    let mut constraint_residual: f64 = 0.0;
    for (u, (_, f)) in pts.iter().zip(&path) {
        constraint_residual = constraint_residual.max(constraint_at(&mut b, u, f)?);
    }
    let fine_pts = grid(s, t, &opts.grid_step.mul(&Rational::new(1, 2)));
    let (fine, _) = rk4(&mut b, &fine_pts, input, false)?;
    let richardson_gap = y.iter().zip(&fine).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);

    let at_s = super::complex::build_retract(&family.fiber(s), &b.fiber(s)?.phi, opts.big_n)?.homology();
    Ok(RetractTransportReport {
        n: opts.n,
        big_n: opts.big_n,
        solvable_grid,
        hp: [at_s.even, at_s.odd],
        transport: RetractTrajectory {
            s: s.clone(),
            t: t.clone(),
            step: opts.grid_step.clone(),
            input: input.to_vec(),
            output: y,
            residuals: RetractResiduals { richardson_gap, constraint_residual, max_phi_jump },
            grid: path,
        },
    })
}
