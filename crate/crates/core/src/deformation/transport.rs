//! Parallel transport for `∇_GM` on the window `⊕_{k≤2N} C_k`.
//!
//! The vertical operator never raises degree, so the window is invariant and
//! the ODE `ω' = I_{E_u} ω` is solved there without truncation error.

use serde::{Deserialize, Serialize};

use crate::chains::{chain_to_doc, stacked_offsets, ChainVector, Cochain, ComponentDoc, DualFunctional};
use crate::exactnum::{Field, PolyQ, Rational, Scalar, SparseMat, SparseVec};
use crate::operators::Operators;

use super::gm::{gauge_generator, vertical_window_poly, window_cocycles};
use super::{DeformationError, DeformationFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    Dyson,
    NilpotentExp,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "dyson" => Ok(Method::Dyson),
            "nilpotent_exp" => Ok(Method::NilpotentExp),
            _ => Err(format!("unknown method {s}")),
        }
    }
}

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DYSON_TOL: f64 = 1e-14;
pub const DYSON_MAX_ORDER: usize = 25;

#[derive(Clone, Debug, PartialEq)]
pub struct TransportOptions {
    pub method: Method,
    pub step: f64,
    /// Top degree `2N` of the window.
    pub top: usize,
    /// Also run a second method and report the gap.
    pub cross_check: bool,
    /// Drop input components above the window instead of failing.
    pub truncate_input: bool,
    /// Functionals at `s` and at `t` for the pairing drift.
    pub characters: Option<(Vec<DualFunctional<f64>>, Vec<DualFunctional<f64>>)>,
}

impl TransportOptions {
    pub fn new(method: Method, top: usize) -> Self {
        TransportOptions { method, step: DEFAULT_STEP, top, cross_check: true, truncate_input: false, characters: None }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct TransportResiduals {
    /// Simpson defect of the integral equation over the output grid.
    pub parallel_ode_residual: f64,
    pub pairing_drift: Option<f64>,
    pub cross_method_gap: Option<f64>,
    /// rk4 at `h` against rk4 at `h/2`.
    pub richardson_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportReport {
    pub input: ChainVector<f64>,
    pub output: ChainVector<f64>,
    pub s: Rational,
    pub t: Rational,
    pub window: usize,
    pub method: Method,
    pub step: Option<f64>,
    pub residuals: TransportResiduals,
    pub input_truncation_norm: f64,
}

/// JSON form of [`TransportReport`], chains in the exchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportReportDoc {
    pub input: Vec<ComponentDoc>,
    pub output: Vec<ComponentDoc>,
    pub s: Rational,
    pub t: Rational,
    pub window: usize,
    pub method: Method,
    pub step: Option<f64>,
    pub residuals: TransportResiduals,
    pub input_truncation_norm: f64,
}

impl TransportReport {
    pub fn to_doc(&self, names: &[String]) -> TransportReportDoc {
        TransportReportDoc {
            input: chain_to_doc(names, &self.input),
            output: chain_to_doc(names, &self.output),
            s: self.s.clone(),
            t: self.t.clone(),
            window: self.window,
            method: self.method,
            step: self.step,
            residuals: self.residuals.clone(),
            input_truncation_norm: self.input_truncation_norm,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualTransportReport {
    pub input: Vec<DualFunctional<f64>>,
    pub output: Vec<DualFunctional<f64>>,
    pub s: Rational,
    pub t: Rational,
    pub window: usize,
    pub method: Method,
    pub residuals: TransportResiduals,
    /// `|d/du⟨φ,ω⟩ − ⟨∇φ,ω⟩ − ⟨φ,∇ω⟩|` on a sample grid, `ω` a fixed chain.
    pub pairing_compatibility: f64,
}

/// `Σ_r u^r M_r` with `f64` coefficient matrices.
#[derive(Clone, Debug)]
pub struct PolyMatrix {
    terms: Vec<SparseMat<f64>>,
    dim: usize,
}

impl PolyMatrix {
    pub fn from_poly(m: &SparseMat<PolyQ>) -> Self {
        let deg = m.columns().iter().flat_map(|c| c.iter().filter_map(|(_, p)| p.degree())).max().unwrap_or(0);
        let terms = (0..=deg).map(|r| m.map(|p| p.coeff(r).to_f64())).collect();
        PolyMatrix { terms, dim: m.ncols() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `−M(u)^T`, the generator of the dual flow.
    pub fn dual(&self) -> Self {
        PolyMatrix { terms: self.terms.iter().map(|m| m.transpose().scale(&-1.0)).collect(), dim: self.dim }
    }

    pub fn apply(&self, u: f64, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        let mut pw = 1.0;
        for m in &self.terms {
            if pw != 0.0 {
                for (j, c) in m.columns().iter().enumerate() {
                    let yj = y[j] * pw;
                    if yj != 0.0 {
                        for (i, x) in c.iter() {
                            out[i] += x * yj;
                        }
                    }
                }
            }
            pw *= u;
        }
        out
    }

    /// Coefficients in powers of `τ = u − s`.
    fn recentered(&self, s: f64) -> Vec<SparseMat<f64>> {
        let n = self.terms.len();
        (0..n)
            .map(|j| {
                let mut acc = SparseMat::zeros(self.dim, self.dim);
                for r in j..n {
                    let c = binomial(r, j) * s.powi((r - j) as i32);
                    acc = acc.axpy(&c, &self.terms[r]);
                }
                acc
            })
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Classical fixed-step RK4 from `s` to `t`; returns every grid value.
pub fn rk4(m: &PolyMatrix, s: f64, t: f64, y0: &[f64], h: f64) -> Vec<Vec<f64>> {
    let steps = (((t - s).abs() / h).round() as usize).max(1);
    let h = (t - s) / steps as f64;
    let mut ys = Vec::with_capacity(steps + 1);
    let mut y = y0.to_vec();
    ys.push(y.clone());
    for k in 0..steps {
        let u = s + k as f64 * h;
        let k1 = m.apply(u, &y);
        let mut tmp = y.clone();
        axpy(&mut tmp, h / 2.0, &k1);
        let k2 = m.apply(u + h / 2.0, &tmp);
        tmp.copy_from_slice(&y);
        axpy(&mut tmp, h / 2.0, &k2);
        let k3 = m.apply(u + h / 2.0, &tmp);
        tmp.copy_from_slice(&y);
        axpy(&mut tmp, h, &k3);
        let k4 = m.apply(u + h, &tmp);
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        ys.push(y.clone());
    }
    ys
}

/// Max Simpson defect `|y_{j+2} − y_j − (h/3)(f_j + 4f_{j+1} + f_{j+2})| / 2h`.
fn simpson_defect(m: &PolyMatrix, s: f64, t: f64, ys: &[Vec<f64>]) -> f64 {
    let steps = ys.len() - 1;
    if steps < 2 {
        return 0.0;
    }
    let h = (t - s) / steps as f64;
    let f: Vec<Vec<f64>> = ys.iter().enumerate().map(|(j, y)| m.apply(s + j as f64 * h, y)).collect();
    let mut worst: f64 = 0.0;
    for j in (0..steps - 1).step_by(2) {
        for i in 0..ys[j].len() {
            let r = ys[j + 2][i] - ys[j][i] - h / 3.0 * (f[j][i] + 4.0 * f[j + 1][i] + f[j + 2][i]);
            worst = worst.max((r / (2.0 * h)).abs());
        }
    }
    worst
}

/// Dyson series `Σ_k ∫…∫ M(u_k)…M(u_1) y0`, integrated exactly as polynomials
/// in `u − s`.
pub fn dyson(m: &PolyMatrix, s: f64, t: f64, y0: &[f64]) -> Result<Vec<f64>, DeformationError> {
    let coeffs = m.recentered(s);
    let tau = t - s;
    let eval = |poly: &[Vec<f64>]| -> Vec<f64> {
        let mut out = vec![0.0; m.dim];
        for c in poly.iter().rev() {
            for (o, x) in out.iter_mut().zip(c) {
                *o = *o * tau + x;
            }
        }
        out
    };
    let mut term: Vec<Vec<f64>> = vec![y0.to_vec()];
    let mut total = y0.to_vec();
    for _order in 1..=DYSON_MAX_ORDER {
        let mut prod: Vec<Vec<f64>> = vec![vec![0.0; m.dim]; term.len() + coeffs.len() - 1];
        for (l, c) in term.iter().enumerate() {
            if c.iter().all(|x| *x == 0.0) {
                continue;
            }
            for (j, mj) in coeffs.iter().enumerate() {
                let v = mj.mul_vec(&SparseVec::from_dense(c)).to_dense(m.dim);
                axpy(&mut prod[j + l], 1.0, &v);
            }
        }
        // ∫_0^τ σ^p dσ = τ^{p+1}/(p+1)
        let mut next = vec![vec![0.0; m.dim]];
        for (p, c) in prod.into_iter().enumerate() {
            next.push(c.into_iter().map(|x| x / (p + 1) as f64).collect());
        }
        let val = eval(&next);
        axpy(&mut total, 1.0, &val);
        if max_abs(&val) < DYSON_TOL {
            return Ok(total);
        }
        term = next;
    }
    Err(DeformationError::DysonNotConverged(DYSON_MAX_ORDER))
}

/// `exp((t−s)M)` in exact arithmetic for a constant nilpotent `M`.
pub fn nilpotent_exp_matrix(m: &SparseMat<PolyQ>, s: &Rational, t: &Rational) -> Result<SparseMat<Rational>, DeformationError> {
    if m.columns().iter().any(|c| c.iter().any(|(_, p)| !p.is_constant())) {
        return Err(DeformationError::PreconditionFailed("vertical operator depends on t".into()));
    }
    let mq = m.map(|p| p.coeff(0));
    let dt = t.sub(s);
    let n = mq.ncols();
    let mut total = SparseMat::identity(n);
    let mut power = SparseMat::identity(n);
    let mut coef = Rational::one();
    for k in 1..=n + 1 {
        power = mq.matmul(&power);
        if power.is_zero() {
            return Ok(total);
        }
        coef = coef.mul(&dt).div(&Rational::integer(k as i64));
        total = total.axpy(&coef, &power);
    }
    Err(DeformationError::PreconditionFailed("vertical operator is not nilpotent on the window".into()))
}

fn stack_f64(w: &ChainVector<f64>, top: usize) -> Vec<f64> {
    let len = stacked_offsets(w.dim_of_algebra(), top)[top + 1];
    w.to_stacked(top).to_dense(len)
}

fn unstack_f64(d: usize, top: usize, y: &[f64]) -> ChainVector<f64> {
    ChainVector::from_stacked(d, top, &SparseVec::from_dense(y))
}

fn stack_dual(d: usize, top: usize, phi: &[DualFunctional<f64>]) -> Result<Vec<f64>, DeformationError> {
    let offs = stacked_offsets(d, top);
    let mut y = vec![0.0; offs[top + 1]];
    for f in phi {
        if f.order > top {
            return Err(DeformationError::WindowOverflow { degree: f.order, top });
        }
        for (i, x) in f.coeffs.iter() {
            y[offs[f.order] + i] += x;
        }
    }
    Ok(y)
}

fn unstack_dual(d: usize, top: usize, y: &[f64]) -> Vec<DualFunctional<f64>> {
    let offs = stacked_offsets(d, top);
    (0..=top)
        .map(|n| DualFunctional::new(n, SparseVec::from_dense(&y[offs[n]..offs[n + 1]])))
        .filter(|f| !f.coeffs.is_zero())
        .collect()
}

fn pair_stacked(d: usize, top: usize, phi: &[DualFunctional<f64>], y: &[f64]) -> Result<f64, DeformationError> {
    let p = stack_dual(d, top, phi)?;
    Ok(p.iter().zip(y).map(|(a, b)| a * b).sum())
}

fn check_interval(family: &DeformationFamily, s: &Rational, t: &Rational) -> Result<(), DeformationError> {
    if family.covers(s, t) {
        Ok(())
    } else {
        let (lo, hi) = family.safe_interval.clone().expect("covers() is true without an interval");
        Err(DeformationError::SafeIntervalViolation { s: s.clone(), t: t.clone(), lo, hi })
    }
}

/// Runs one method; `Ok((output, grid))` where the grid is only kept by rk4.
fn run(
    method: Method,
    poly: &SparseMat<PolyQ>,
    pm: &PolyMatrix,
    s: &Rational,
    t: &Rational,
    y0: &[f64],
    h: f64,
) -> Result<(Vec<f64>, Option<Vec<Vec<f64>>>), DeformationError> {
    let (sf, tf) = (s.to_f64(), t.to_f64());
    match method {
        Method::Rk4 => {
            let ys = rk4(pm, sf, tf, y0, h);
            Ok((ys.last().expect("nonempty grid").clone(), Some(ys)))
        }
        Method::Dyson => Ok((dyson(pm, sf, tf, y0)?, None)),
        Method::NilpotentExp => {
            let e = nilpotent_exp_matrix(poly, s, t)?.map(|x| x.to_f64());
            Ok((e.mul_vec(&SparseVec::from_dense(y0)).to_dense(pm.dim()), None))
        }
    }
}

fn transport_core(
    family: &DeformationFamily,
    gen: &SparseMat<PolyQ>,
    s: &Rational,
    t: &Rational,
    omega: &ChainVector<f64>,
    opts: &TransportOptions,
) -> Result<TransportReport, DeformationError> {
    check_interval(family, s, t)?;
    let top = opts.top;
    let d = family.dim();
    let mut input_truncation_norm = 0.0;
    let mut input = omega.clone();
    if let Some(m) = omega.max_degree().filter(|&m| m > top) {
        if !opts.truncate_input {
            return Err(DeformationError::WindowOverflow { degree: m, top });
        }
        input_truncation_norm = omega.components().range(top + 1..).map(|(_, v)| v.max_abs()).fold(0.0, f64::max);
        input = omega.truncate(top);
    }
    let pm = PolyMatrix::from_poly(gen);
    let y0 = stack_f64(&input, top);
    let (y, grid) = run(opts.method, gen, &pm, s, t, &y0, opts.step)?;
    let (sf, tf) = (s.to_f64(), t.to_f64());
    let mut residuals = TransportResiduals::default();
    let grid = match grid {
        Some(g) => g,
        None => rk4(&pm, sf, tf, &y0, opts.step),
    };
    residuals.parallel_ode_residual = simpson_defect(&pm, sf, tf, &grid);
    if opts.method == Method::Rk4 {
        let fine = rk4(&pm, sf, tf, &y0, opts.step / 2.0);
        residuals.richardson_gap = Some(max_abs_diff(&y, fine.last().expect("nonempty")));
    }
    if opts.cross_check {
        let other = match opts.method {
            Method::Rk4 => Method::Dyson,
            _ => Method::Rk4,
        };
        if let Ok((z, _)) = run(other, gen, &pm, s, t, &y0, opts.step) {
            residuals.cross_method_gap = Some(max_abs_diff(&y, &z));
        }
    }
    if let Some((at_s, at_t)) = &opts.characters {
        let before = pair_stacked(d, top, at_s, &y0)?;
        let after = pair_stacked(d, top, at_t, &y)?;
        residuals.pairing_drift = Some((after - before).abs());
    }
    Ok(TransportReport {
        input,
        output: unstack_f64(d, top, &y),
        s: s.clone(),
        t: t.clone(),
        window: top,
        method: opts.method,
        step: (opts.method == Method::Rk4).then_some(opts.step),
        residuals,
        input_truncation_norm,
    })
}

/// Solves `ω' = I_{E_u} ω` on `[s, t]` inside the window.
pub fn transport(
    family: &DeformationFamily,
    s: &Rational,
    t: &Rational,
    omega: &ChainVector<f64>,
    opts: &TransportOptions,
) -> Result<TransportReport, DeformationError> {
    let gen = vertical_window_poly(family, opts.top)?;
    transport_core(family, &gen, s, t, omega, opts)
}

/// Transport with an arbitrary polynomial generator on the window, for
/// connections other than `d/dt`.
pub fn transport_with_generator(
    family: &DeformationFamily,
    gen: &SparseMat<PolyQ>,
    s: &Rational,
    t: &Rational,
    omega: &ChainVector<f64>,
    opts: &TransportOptions,
) -> Result<TransportReport, DeformationError> {
    transport_core(family, gen, s, t, omega, opts)
}

/// Solves `φ' = −I_{E_u}^T φ`, so that `⟨φ(u), ω(u)⟩` is constant along
/// parallel `ω`.
pub fn transport_dual(
    family: &DeformationFamily,
    s: &Rational,
    t: &Rational,
    phi: &[DualFunctional<f64>],
    opts: &TransportOptions,
) -> Result<DualTransportReport, DeformationError> {
    check_interval(family, s, t)?;
    let top = opts.top;
    let d = family.dim();
    let gen = vertical_window_poly(family, top)?;
    let pm = PolyMatrix::from_poly(&gen);
    let dual = pm.dual();
    let dual_poly = gen.transpose().map(|p| p.neg());
    let y0 = stack_dual(d, top, phi)?;
    let (y, grid) = run(opts.method, &dual_poly, &dual, s, t, &y0, opts.step)?;
    let (sf, tf) = (s.to_f64(), t.to_f64());
    let grid = grid.unwrap_or_else(|| rk4(&dual, sf, tf, &y0, opts.step));
    let mut residuals = TransportResiduals { parallel_ode_residual: simpson_defect(&dual, sf, tf, &grid), ..Default::default() };
    if opts.method == Method::Rk4 {
        let fine = rk4(&dual, sf, tf, &y0, opts.step / 2.0);
        residuals.richardson_gap = Some(max_abs_diff(&y, fine.last().expect("nonempty")));
    }
    if opts.cross_check {
        let other = if opts.method == Method::Rk4 { Method::Dyson } else { Method::Rk4 };
        if let Ok((z, _)) = run(other, &dual_poly, &dual, s, t, &y0, opts.step) {
            residuals.cross_method_gap = Some(max_abs_diff(&y, &z));
        }
    }
    // d/du⟨φ, ω⟩ for a fixed ω against ⟨∇φ, ω⟩ + ⟨φ, ∇ω⟩ = ⟨φ, −M ω⟩,
    // the derivative by the five-point stencil on the rk4 grid
    let omega: Vec<f64> = (0..y0.len()).map(|i| 1.0 / (1.0 + i as f64)).collect();
    let dot = |a: &[f64]| a.iter().zip(&omega).map(|(x, w)| x * w).sum::<f64>();
    let steps = grid.len() - 1;
    let h = (tf - sf) / steps as f64;
    let mut compat: f64 = 0.0;
    for j in 2..steps.saturating_sub(1) {
        let deriv = (-dot(&grid[j + 2]) + 8.0 * dot(&grid[j + 1]) - 8.0 * dot(&grid[j - 1]) + dot(&grid[j - 2])) / (12.0 * h);
        let m_omega = pm.apply(sf + j as f64 * h, &omega);
        let rhs = -grid[j].iter().zip(&m_omega).map(|(x, w)| x * w).sum::<f64>();
        compat = compat.max((deriv - rhs).abs());
    }
    Ok(DualTransportReport {
        input: phi.to_vec(),
        output: unstack_dual(d, top, &y),
        s: s.clone(),
        t: t.clone(),
        window: top,
        method: opts.method,
        residuals,
        pairing_compatibility: compat,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeReport {
    pub s: Rational,
    pub t: Rational,
    pub window: usize,
    /// Max-abs of the difference of the two transported chains.
    pub difference_norm: f64,
    /// Number of independent window cocycles at `t`.
    pub cocycles: usize,
    /// Largest `|φ(Δ)| / (‖φ‖₁ ‖Δ‖_∞)` over the cocycle basis.
    pub max_relative_pairing: f64,
    /// Whether every reconstructed pairing is exactly zero.
    pub is_boundary: bool,
}

pub const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Transports `ω` with `d/dt` and with `d/dt − F` and tests whether the two
/// results differ by a `(b_t+B)`-boundary in the window.
///
/// The difference is irrational, so it is not snapped to rationals itself.
/// Instead each exact window cocycle is paired with it and the normalized
/// pairing is reconstructed at `RECONSTRUCTION_TOL`.
pub fn gauge_independence(
    family: &DeformationFamily,
    f: &Cochain<PolyQ>,
    s: &Rational,
    t: &Rational,
    omega: &ChainVector<f64>,
    top: usize,
) -> Result<GaugeReport, DeformationError> {
    let mut opts = TransportOptions::new(Method::Rk4, top);
    opts.cross_check = false;
    let plain = transport(family, s, t, omega, &opts)?;
    let gen = gauge_generator(family, f, top)?;
    let gauged = transport_with_generator(family, &gen, s, t, omega, &opts)?;
    let diff = plain.output.sub(&gauged.output);
    let ops = Operators::new(family.fiber(t));
    let cocycles = window_cocycles(&ops, top);
    let dv = stack_f64(&diff, top);
    let norm = max_abs(&dv);
    let mut worst: f64 = 0.0;
    let mut is_boundary = true;
    for phi in &cocycles {
        let val: f64 = phi.iter().map(|(j, c)| c.to_f64() * dv[j]).sum();
        let weight: f64 = phi.iter().map(|(_, c)| c.to_f64().abs()).sum();
        let rel = if norm == 0.0 { 0.0 } else { val / (weight * norm) };
        worst = worst.max(rel.abs());
        let r = Rational::approximate(rel, RECONSTRUCTION_TOL)
            .map_err(|e| DeformationError::PreconditionFailed(format!("rational reconstruction: {e}")))?;
        is_boundary &= r.is_zero();
    }
    Ok(GaugeReport {
        s: s.clone(),
        t: t.clone(),
        window: top,
        difference_norm: diff.components().values().map(|v| v.max_abs()).fold(0.0, f64::max),
        cocycles: cocycles.len(),
        max_relative_pairing: worst,
        is_boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(coeffs: &[i64]) -> PolyMatrix {
        let p = PolyQ::new(coeffs.iter().map(|&c| Rational::integer(c)).collect()).unwrap();
        PolyMatrix::from_poly(&SparseMat::from_columns(1, vec![SparseVec::unit(0).scale(&p)]))
    }

    #[test]
    fn rk4_solves_y_prime_equals_y() {
        let m = scalar(&[1]);
        let y = rk4(&m, 0.0, 1.0, &[1.0], 1e-3);
        assert!((y.last().unwrap()[0] - std::f64::consts::E).abs() < 1e-12);
        assert!(simpson_defect(&m, 0.0, 1.0, &y) < 1e-9);
    }

    #[test]
    fn dyson_with_time_dependent_generator() {
        // y' = 2u y, y(1) = 1 → y(3/2) = e^{5/4}
        let m = scalar(&[0, 2]);
        let y = dyson(&m, 1.0, 1.5, &[1.0]).unwrap();
        assert!((y[0] - 1.25f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn dyson_gives_up() {
        assert_eq!(dyson(&scalar(&[40]), 0.0, 1.0, &[1.0]), Err(DeformationError::DysonNotConverged(DYSON_MAX_ORDER)));
    }

    #[test]
    fn recentering_is_a_taylor_shift() {
        // 1 + 2u + 3u² at u = s + τ
        let m = scalar(&[1, 2, 3]);
        let c = m.recentered(2.0);
        let got: Vec<f64> = c.iter().map(|k| k.get(0, 0)).collect();
        assert_eq!(got, vec![17.0, 14.0, 3.0]);
    }

    #[test]
    fn nilpotent_exp_is_exact() {
        let n = SparseMat::from_triplets(2, 2, vec![(0, 1, PolyQ::one())]);
        let e = nilpotent_exp_matrix(&n, &Rational::integer(1), &Rational::new(7, 2)).unwrap();
        assert_eq!(e.get(0, 1), Rational::new(5, 2));
        assert_eq!(e.get(0, 0), Rational::one());
    }

    #[test]
    fn method_names() {
        assert_eq!("nilpotent_exp".parse::<Method>(), Ok(Method::NilpotentExp));
        assert_eq!(serde_json::to_string(&Method::Rk4).unwrap(), "\"rk4\"");
        assert!("euler".parse::<Method>().is_err());
    }
}
