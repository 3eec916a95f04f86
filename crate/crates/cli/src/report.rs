//! The report document and its table rendering.

use std::collections::BTreeMap;

use cyclo::algebra::AlgebraError;
use cyclo::chern::ChernError;
use cyclo::deformation::DeformationError;
use cyclo::homology::HomologyError;
use cyclo::retract::RetractError;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// A command that did not produce results.
#[derive(Debug)]
pub struct Failure {
    pub kind: String,
    pub message: String,
    pub code: i32,
    /// Partial results worth keeping, e.g. the grid scan before a failure.
    pub partial: Option<Value>,
}

impl Failure {
    pub fn new(code: i32, kind: &str, message: impl Into<String>) -> Self {
        Failure { kind: kind.into(), message: message.into(), code, partial: None }
    }

    pub fn math(kind: &str, message: impl Into<String>) -> Self {
        Self::new(EXIT_MATH, kind, message)
    }

    pub fn input(kind: &str, message: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, kind, message)
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        let (code, kind) = match &e {
            AlgebraError::Associativity { .. } => (EXIT_MATH, "AssociativityError"),
            AlgebraError::Unit(_) => (EXIT_MATH, "UnitError"),
            AlgebraError::Shape(_) | AlgebraError::DimensionMismatch { .. } => (EXIT_INPUT, "ShapeError"),
            AlgebraError::Parse(_) => (EXIT_INPUT, "ParseError"),
        };
        Failure::new(code, kind, e.to_string())
    }
}

impl From<HomologyError> for Failure {
    fn from(e: HomologyError) -> Self {
        match &e {
            HomologyError::ResourceCap { .. } => Failure::new(EXIT_CAP, "ResourceCap", e.to_string()),
            HomologyError::Invalid(_) => Failure::input("InvalidArgument", e.to_string()),
        }
    }
}

impl From<ChernError> for Failure {
    fn from(e: ChernError) -> Self {
        let (code, kind) = match &e {
            ChernError::NotIdempotent(_) => (EXIT_MATH, "NotIdempotent"),
            ChernError::NotInvertible(_) => (EXIT_MATH, "NotInvertible"),
            ChernError::NotClosed { .. } => (EXIT_MATH, "NotClosed"),
            ChernError::Cutoff { .. } => (EXIT_INPUT, "InvalidArgument"),
            ChernError::ParityMismatch { .. } => (EXIT_INPUT, "ParityMismatch"),
        };
        Failure::new(code, kind, e.to_string())
    }
}

impl From<DeformationError> for Failure {
    fn from(e: DeformationError) -> Self {
        let (code, kind) = match e {
            DeformationError::Algebra(a) => return a.into(),
            DeformationError::Cocycle => (EXIT_MATH, "CocycleError"),
            DeformationError::Filtration(_) => (EXIT_INPUT, "FiltrationError"),
            DeformationError::DegreeCap(_) => (EXIT_CAP, "ResourceCap"),
            DeformationError::SafeIntervalViolation { .. } => (EXIT_MATH, "SafeIntervalViolation"),
            DeformationError::WindowOverflow { .. } => (EXIT_INPUT, "WindowOverflow"),
            DeformationError::DysonNotConverged(_) => (EXIT_MATH, "DysonNotConverged"),
            DeformationError::PreconditionFailed(_) => (EXIT_MATH, "PreconditionFailed"),
        };
        Failure::new(code, kind, e.to_string())
    }
}

impl From<RetractError> for Failure {
    fn from(e: RetractError) -> Self {
        let kind = match e {
            RetractError::Deformation(d) => return d.into(),
            RetractError::HomotopyIdentityFailed(_) => "HomotopyIdentityFailed",
            RetractError::RankError(_) => "RankError",
            RetractError::IdentityFailed(_) => "IdentityFailed",
            RetractError::SolvabilityLost(_) => "SolvabilityLost",
            RetractError::GridDiscontinuity { .. } => "GridDiscontinuity",
            RetractError::Precondition(_) => "PreconditionFailed",
        };
        Failure::math(kind, e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    /// sha256 of each input file, keyed by role.
    pub inputs_digest: BTreeMap<String, String>,
    /// Every flag with its effective value, defaults included.
    pub flags: Value,
    pub results: Value,
    pub residuals: Value,
    pub versions: BTreeMap<String, String>,
    pub exit_code: i32,
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([("cyclo".to_string(), env!("CARGO_PKG_VERSION").to_string()), ("report_format".to_string(), "1".to_string())])
}

/// What a command hands back on success.
pub struct Outcome {
    pub results: Value,
    pub residuals: Value,
}

impl ReportDocument {
    pub fn finish(command: &str, inputs: BTreeMap<String, String>, flags: Value, outcome: Result<Outcome, Failure>) -> Self {
        let (results, residuals, exit_code) = match outcome {
            Ok(o) => (o.results, o.residuals, EXIT_OK),
            Err(f) => {
                let mut r = json!({ "error": { "kind": f.kind, "message": f.message } });
                if let Some(p) = f.partial {
                    r["partial"] = p;
                }
                (r, Value::Null, f.code)
            }
        };
        ReportDocument { command: command.into(), inputs_digest: inputs, flags, results, residuals, versions: versions(), exit_code }
    }

    pub fn to_json(&self) -> String {
        // through Value, so that key order is the sorted order a re-parse gives
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    /// One `path  value` row per JSON leaf; values print exactly as in the JSON.
    pub fn to_table(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut rows = Vec::new();
        leaves("", &v, &mut rows);
        let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
    }
}

fn leaves(path: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => m.iter().for_each(|(k, x)| leaves(&join(k), x, out)),
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            a.iter().enumerate().for_each(|(i, x)| leaves(&format!("{path}[{i}]"), x, out))
        }
        Value::String(s) => out.push((path.to_string(), s.clone())),
        _ => out.push((path.to_string(), v.to_string())),
    }
}
