use std::path::PathBuf;

use clap::Args;
use cyclo::chains::{chain_space_dim, random_cochain, random_poly_cochain, stacked_offsets, ComponentDoc};
use cyclo::chern::{chern_idempotent, chern_invertible, pair, PeriodicChain};
use cyclo::deformation::{gm_chain_map_check, transport, DeformationFamily, Method, TransportOptions, DEFAULT_STEP};
use cyclo::homology::HomologyEngine;
use cyclo::operators::identities::{check_all, IdentityFailure};
use cyclo::retract::{bidimension_upper, build_retract, retract_transport, solve_universal_coboundary, Bidimension, RetractTransportOptions, UniversalCoboundary};
use cyclo::{ChainVector, DualFunctional, FiniteAlgebra, Operators, Rational, Scalar, SparseVec};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{self, CharactersDoc, Input, Structure};
use crate::report::{Failure, Outcome, EXIT_CAP};

pub type Inputs = Vec<(&'static str, Input)>;

fn cap_guard(d: usize, degree: usize, cap: usize) -> Result<(), Failure> {
    let dim = chain_space_dim(d, degree as isize);
    if dim > cap {
        return Err(Failure::new(EXIT_CAP, "ResourceCap", format!("dim C_{degree} = {dim} exceeds the cap {cap}")));
    }
    Ok(())
}

fn identity_failure(f: IdentityFailure) -> Failure {
    let mut out = Failure::math("IdentityFailure", format!("{} fails on C_{} with {} nonzero entries", f.name, f.degree, f.nonzero));
    out.partial = Some(json!({ "identity": f.name, "degree": f.degree, "nonzero": f.nonzero }));
    out
}

/// Orders of the `i`-th cochain pair, cycling through 1..=3.
fn orders(i: u64) -> (usize, usize) {
    (1 + (i % 3) as usize, 1 + ((i + 1) % 3) as usize)
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    /// Algebra or family JSON.
    pub file: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub max_degree: usize,
    /// Number of seeded random cochain pairs.
    #[arg(long, default_value_t = 2)]
    pub seeds: u64,
}

pub fn check(a: &CheckArgs, cap: usize, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let file = Input::read(&a.file)?;
    let st = input::structure(&file);
    inputs.push(("file", file));
    match st? {
        Structure::Algebra(alg) => {
            alg.check_associative()?;
            alg.check_unit()?;
            cap_guard(alg.dim(), a.max_degree, cap)?;
            let ops = Operators::new(alg.clone());
            for i in 0..a.seeds {
                let (k, l) = orders(i);
                let (dc, ec) = (random_cochain(&alg, k, 2 * i), random_cochain(&alg, l, 2 * i + 1));
                check_all(&ops, &dc, &ec, a.max_degree).map_err(identity_failure)?;
            }
            Ok(Outcome {
                results: json!({ "structure": "algebra", "dim": alg.dim(), "associative": true, "unital": alg.unit().is_some(), "identities_hold": true }),
                residuals: json!({ "identity_nonzero_entries": 0 }),
            })
        }
        Structure::Family(fam) => {
            let d = fam.dim();
            cap_guard(d, a.max_degree, cap)?;
            let ops = Operators::new(fam.polynomial_algebra().clone());
            for i in 0..a.seeds {
                let (k, l) = orders(i);
                let (dc, ec) = (random_poly_cochain(d, k, 1, 2 * i), random_poly_cochain(d, l, 1, 2 * i + 1));
                check_all(&ops, &dc, &ec, a.max_degree).map_err(identity_failure)?;
            }
            let window = (a.max_degree / 2 * 2).max(2);
            let gm = gm_chain_map_check(&fam, window)?;
            if !gm.interior_zero {
                let mut f = Failure::math("ChainMapFailure", "[b+B, ∇_GM] has nonzero interior residuals");
                f.partial = Some(serde_json::to_value(&gm).expect("serializes"));
                return Err(f);
            }
            Ok(Outcome {
                results: json!({ "structure": "family", "dim": d, "associative": true, "unital": fam.unit().is_some(), "identities_hold": true, "gm_chain_map": gm }),
                residuals: json!({ "identity_nonzero_entries": 0 }),
            })
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct HomologyArgs {
    pub file: PathBuf,
    /// Top degree for HH and HC.
    #[arg(long, default_value_t = 4)]
    pub max_degree: usize,
    /// Largest `N` tried for HP stabilization.
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1)]
    pub hp_window: usize,
}

pub fn homology(a: &HomologyArgs, cap: usize, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let file = Input::read(&a.file)?;
    let alg = input::algebra(&file);
    inputs.push(("file", file));
    let eng = HomologyEngine::with_cap(alg?, cap);
    let hh = eng.hh_dims(a.max_degree)?;
    let hc = (0..=a.max_degree as isize).map(|n| eng.hc(n)).collect::<Result<Vec<_>, _>>()?;
    let hp = eng.hp_dims(a.n_max, a.hp_window)?;
    Ok(Outcome { results: json!({ "hh": hh, "hc": hc, "hp": hp.hp, "periodic": hp }), residuals: Value::Null })
}

#[derive(Args, Debug, Serialize)]
pub struct HpArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1)]
    pub window: usize,
}

pub fn hp(a: &HpArgs, cap: usize, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let file = Input::read(&a.file)?;
    let alg = input::algebra(&file);
    inputs.push(("file", file));
    let rep = HomologyEngine::with_cap(alg?, cap).hp_dims(a.n_max, a.window)?;
    Ok(Outcome { results: serde_json::to_value(&rep).expect("serializes"), residuals: Value::Null })
}

#[derive(Args, Debug, Serialize)]
pub struct ChernArgs {
    pub file: PathBuf,
    /// Idempotent of `M_N(A)`.
    #[arg(long, conflicts_with = "invertible", required_unless_present = "invertible")]
    pub idempotent: Option<PathBuf>,
    /// Invertible of `M_N(A)`.
    #[arg(long)]
    pub invertible: Option<PathBuf>,
    /// Highest degree; defaults to 6 for idempotents and 5 for invertibles.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Functionals to pair with, in the chain format; one per component.
    #[arg(long)]
    pub cochains: Option<PathBuf>,
}

/// Each component of a chain document, read as a functional on its degree.
fn functionals(alg: &FiniteAlgebra, docs: &[ComponentDoc]) -> Result<Vec<DualFunctional>, Failure> {
    docs.iter()
        .map(|c| Ok(DualFunctional::new(c.degree, input::chain(alg, std::slice::from_ref(c))?.component(c.degree).into_owned())))
        .collect()
}

fn label(alg: &FiniteAlgebra, f: &DualFunctional) -> String {
    let names = alg.names().to_vec();
    let doc = cyclo::chains::chain_to_doc(&names, &{
        let mut w = ChainVector::zero(alg.dim());
        w.set(f.order, f.coeffs.clone());
        w
    });
    serde_json::to_string(&doc).expect("serializes")
}

pub fn chern(a: &ChernArgs, cap: usize, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let file = Input::read(&a.file)?;
    let alg = input::algebra(&file);
    inputs.push(("file", file));
    let alg = alg?;
    let (role, path) = match (&a.idempotent, &a.invertible) {
        (Some(p), _) => ("idempotent", p),
        (None, Some(p)) => ("invertible", p),
        (None, None) => return Err(Failure::input("InvalidArgument", "need --idempotent or --invertible")),
    };
    let elem = Input::read(path)?;
    let parsed = input::matrix_element(&alg, &elem);
    inputs.push((role, elem));
    let (size, x) = parsed?;
    let cutoff = a.cutoff.unwrap_or(if role == "idempotent" { 6 } else { 5 });
    cap_guard(alg.dim(), cutoff, cap)?;
    let ch: PeriodicChain = if role == "idempotent" { chern_idempotent(&alg, size, &x, cutoff)? } else { chern_invertible(&alg, size, &x, cutoff)? };
    let mut table = Vec::new();
    if let Some(p) = &a.cochains {
        let cin = Input::read(p)?;
        let docs = cin.parse::<Vec<ComponentDoc>>("cochain list");
        inputs.push(("cochains", cin));
        for f in functionals(&alg, &docs?)? {
            let v = pair(std::slice::from_ref(&f), &ch)?;
            table.push(json!({ "functional": label(&alg, &f), "pairing": v }));
        }
    } else if role == "idempotent" {
        // coordinates of ch_0 P = tr P
        for (i, n) in alg.names().iter().enumerate() {
            let f = DualFunctional::new(0, SparseVec::from_pairs(vec![(i, Rational::one())]));
            table.push(json!({ "functional": format!("coordinate {n} in degree 0"), "pairing": pair(&[f], &ch)? }));
        }
    }
    let doc = ch.to_doc(alg.names());
    Ok(Outcome {
        results: json!({ "chern": doc, "pairings": table }),
        residuals: json!({ "closedness": ch.residuals.iter().map(|(k, v)| (k.to_string(), *v)).collect::<std::collections::BTreeMap<_, _>>() }),
    })
}

#[derive(Args, Debug, Serialize)]
pub struct TransportArgs {
    pub family: PathBuf,
    #[arg(long, value_parser = input::parameter, allow_hyphen_values = true)]
    pub from: Rational,
    #[arg(long, value_parser = input::parameter, allow_hyphen_values = true)]
    pub to: Rational,
    /// Top degree `2N` of the window.
    #[arg(long, default_value_t = 6)]
    pub window: usize,
    #[arg(long, default_value = "rk4")]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub step: f64,
    /// Chain to transport, in the chain format over the fiber at `from`.
    #[arg(long, conflicts_with = "chern_idempotent", required_unless_present = "chern_idempotent")]
    pub chain: Option<PathBuf>,
    /// Transport `ch P` for this idempotent of `M_N(A_from)`.
    #[arg(long)]
    pub chern_idempotent: Option<PathBuf>,
    /// `{"from": [...], "to": [...]}` functionals for the pairing drift.
    #[arg(long)]
    pub characters: Option<PathBuf>,
    #[arg(long)]
    pub no_cross_check: bool,
    /// Drop chain components above the window instead of failing.
    #[arg(long)]
    pub truncate_input: bool,
}

pub fn transport_cmd(a: &TransportArgs, cap: usize, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let file = Input::read(&a.family)?;
    let fam = input::family(&file);
    inputs.push(("family", file));
    let fam = fam?;
    if a.window % 2 != 0 {
        return Err(Failure::input("InvalidArgument", "window must be even"));
    }
    cap_guard(fam.dim(), a.window, cap)?;
    let fiber = fam.fiber(&a.from);
    let mut opts = TransportOptions::new(a.method, a.window);
    opts.step = a.step;
    opts.cross_check = !a.no_cross_check;
    opts.truncate_input = a.truncate_input;
    let omega: ChainVector<f64> = if let Some(p) = &a.chain {
        let cin = Input::read(p)?;
        let docs = cin.parse::<Vec<ComponentDoc>>("chain");
        inputs.push(("chain", cin));
        input::chain(&fiber, &docs?)?.map(|x| x.to_f64())
    } else {
        let p = a.chern_idempotent.as_ref().expect("clap enforces one input");
        let ein = Input::read(p)?;
        let parsed = input::matrix_element(&fiber, &ein);
        inputs.push(("chern_idempotent", ein));
        let (size, x) = parsed?;
        // one degree past the window so that the discarded tail is reported
        opts.truncate_input = true;
        chern_idempotent(&fiber, size, &x, a.window + 2)?.chain.map(|x| x.to_f64())
    };
    if let Some(p) = &a.characters {
        let cin = Input::read(p)?;
        let doc = cin.parse::<CharactersDoc>("characters");
        inputs.push(("characters", cin));
        let doc = doc?;
        let to_fiber = fam.fiber(&a.to);
        let f64s = |fs: Vec<DualFunctional>| fs.into_iter().map(|f| DualFunctional::new(f.order, f.coeffs.map(|x| x.to_f64()))).collect();
        opts.characters = Some((f64s(functionals(&fiber, &doc.from)?), f64s(functionals(&to_fiber, &doc.to)?)));
    }
    let rep = transport(&fam, &a.from, &a.to, &omega, &opts)?;
    let doc = rep.to_doc(fam.names());
    Ok(Outcome {
        residuals: json!({ "transport": doc.residuals, "input_truncation_norm": doc.input_truncation_norm }),
        results: serde_json::to_value(&doc).expect("serializes"),
    })
}

#[derive(Args, Debug, Serialize)]
pub struct RetractArgs {
    /// Algebra, or family when transporting.
    pub file: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    /// Retract size; defaults to the least `N` with `2N > n + 1`.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    /// Order of `φ`; defaults to the bidimension bound at `from`.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = input::parameter, allow_hyphen_values = true, requires = "to")]
    pub from: Option<Rational>,
    #[arg(long, value_parser = input::parameter, allow_hyphen_values = true, requires = "from")]
    pub to: Option<Rational>,
    #[arg(long, value_parser = input::parameter, default_value = "1/100")]
    pub grid_step: Rational,
    #[arg(long, default_value_t = cyclo::retract::DEFAULT_MAX_JUMP)]
    pub max_jump: f64,
    /// Cochains to transport, in the chain format; default the degree-0
    /// coordinate of the first basis element.
    #[arg(long)]
    pub cochain: Option<PathBuf>,
}

fn least_n(n: usize) -> usize {
    (n + 3) / 2
}

pub fn retract(a: &RetractArgs, cap: usize, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let file = Input::read(&a.file)?;
    let st = input::structure(&file);
    inputs.push(("file", file));
    match (st?, &a.from, &a.to) {
        (Structure::Algebra(alg), None, None) => {
            alg.check_associative()?;
            alg.check_unit()?;
            cap_guard(alg.dim(), a.n_max + 1, cap)?;
            retract_algebra(a, &alg, cap)
        }
        (Structure::Family(fam), Some(s), Some(t)) => retract_family(a, &fam, s, t, cap, inputs),
        (Structure::Algebra(_), _, _) => Err(Failure::input("InvalidArgument", "--from/--to need a family file")),
        (Structure::Family(_), _, _) => Err(Failure::input("InvalidArgument", "a family needs --from and --to")),
    }
}

fn retract_algebra(a: &RetractArgs, alg: &FiniteAlgebra, cap: usize) -> Result<Outcome, Failure> {
    let bd = match a.n {
        Some(n) => {
            if solve_universal_coboundary(alg, n).is_solvable() {
                Bidimension::AtMost(n)
            } else {
                Bidimension::NotFound(n)
            }
        }
        None => bidimension_upper(alg, a.n_max),
    };
    let Bidimension::AtMost(n) = bd else {
        let last = a.n.unwrap_or(a.n_max);
        let cert = match solve_universal_coboundary(alg, last) {
            UniversalCoboundary::Unsolvable(c) => Some(c),
            UniversalCoboundary::Solvable(_) => None,
        };
        return Ok(Outcome { results: json!({ "bidimension_upper": bd, "certificate": cert }), residuals: Value::Null });
    };
    let UniversalCoboundary::Solvable(phi) = solve_universal_coboundary(alg, n) else { unreachable!("solvable at n") };
    let big_n = a.big_n.unwrap_or(least_n(n));
    cap_guard(alg.dim(), 2 * big_n + 2, cap)?;
    let rc = build_retract(alg, &phi, big_n)?;
    let h = rc.homology();
    Ok(Outcome {
        results: json!({ "bidimension_upper": bd, "N": big_n, "retract_dims": rc.dims(), "hp": [h.even, h.odd] }),
        residuals: json!({ "phi_max_abs": phi.max_abs() }),
    })
}

fn retract_family(a: &RetractArgs, fam: &DeformationFamily, s: &Rational, t: &Rational, cap: usize, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let d = fam.dim();
    let fiber = fam.fiber(s);
    let n = match a.n {
        Some(n) => n,
        None => match bidimension_upper(&fiber, a.n_max) {
            Bidimension::AtMost(n) => n,
            Bidimension::NotFound(_) => return Err(Failure::math("SolvabilityLost", format!("δφ = d^(n+1) has no solution on the fiber at {s} for n ≤ {}", a.n_max))),
        },
    };
    let big_n = a.big_n.unwrap_or(least_n(n));
    cap_guard(d, 2 * big_n + 2, cap)?;
    let top = 2 * big_n;
    let offs = stacked_offsets(d, top);
    let input: Vec<f64> = match &a.cochain {
        Some(p) => {
            let cin = Input::read(p)?;
            let docs = cin.parse::<Vec<ComponentDoc>>("cochain list");
            inputs.push(("cochain", cin));
            let docs = docs?;
            let mut w = ChainVector::<Rational>::zero(d);
            for f in functionals(&fiber, &docs)? {
                if f.order > top {
                    return Err(Failure::input("WindowOverflow", format!("cochain of degree {} above 2N = {top}", f.order)));
                }
                w.set(f.order, w.component(f.order).add(&f.coeffs));
            }
            w.to_stacked(top).to_dense(offs[top + 1]).iter().map(|x| x.to_f64()).collect()
        }
        None => {
            let mut v = vec![0.0; offs[top + 1]];
            v[0] = 1.0;
            v
        }
    };
    let opts = RetractTransportOptions { n, big_n, grid_step: a.grid_step.clone(), max_jump: a.max_jump };
    let rep = retract_transport(fam, s, t, &input, &opts)?;
    Ok(Outcome { residuals: serde_json::to_value(&rep.transport.residuals).expect("serializes"), results: serde_json::to_value(&rep).expect("serializes") })
}
