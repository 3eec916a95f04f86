//! Reading input documents.

use std::path::Path;

use cyclo::algebra::AlgebraDoc;
use cyclo::chains::{chain_from_doc, ComponentDoc};
use cyclo::deformation::{DeformationFamily, FamilyDoc};
use cyclo::exactnum::{Rational, SparseVec};
use cyclo::{ChainVector, FiniteAlgebra};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::report::Failure;

pub struct Input {
    pub bytes: Vec<u8>,
    pub value: serde_json::Value,
}

impl Input {
    pub fn read(path: &Path) -> Result<Self, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::input("IoError", format!("{}: {e}", path.display())))?;
        let value = serde_json::from_slice(&bytes).map_err(|e| Failure::input("ParseError", format!("{}: {e}", path.display())))?;
        Ok(Input { bytes, value })
    }

    pub fn digest(&self) -> String {
        Sha256::digest(&self.bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn parse<T: for<'de> Deserialize<'de>>(&self, what: &str) -> Result<T, Failure> {
        T::deserialize(&self.value).map_err(|e| Failure::input("ParseError", format!("not a {what} document: {e}")))
    }
}

/// An algebra file, or a family file when some entry mentions `t` or a safe
/// interval is declared.
pub enum Structure {
    Algebra(FiniteAlgebra),
    Family(DeformationFamily),
}

pub fn is_family(doc: &FamilyDoc) -> bool {
    let rational = |s: &String| Rational::parse_decimal(s).is_ok();
    doc.safe_interval.is_some()
        || !doc.algebra.structure.iter().flatten().flatten().all(rational)
        || !doc.algebra.unit.iter().flatten().all(rational)
}

/// Parses without the associativity check so the caller can report it as a
/// mathematical failure.
pub fn structure(input: &Input) -> Result<Structure, Failure> {
    let doc: FamilyDoc = input.parse("algebra or family")?;
    if is_family(&doc) {
        return DeformationFamily::from_doc(&doc).map(Structure::Family).map_err(Failure::from);
    }
    algebra_unchecked(&doc.algebra).map(Structure::Algebra)
}

pub fn algebra_unchecked(doc: &AlgebraDoc) -> Result<FiniteAlgebra, Failure> {
    let (names, s, unit) = doc.scalars(|s| Rational::parse_decimal(s).map_err(|e| e.to_string()))?;
    Ok(FiniteAlgebra::new_unchecked(names, s, unit)?)
}

pub fn algebra(input: &Input) -> Result<FiniteAlgebra, Failure> {
    match structure(input)? {
        Structure::Algebra(a) => {
            a.check_associative()?;
            a.check_unit()?;
            Ok(a)
        }
        Structure::Family(_) => Err(Failure::input("ParseError", "expected an algebra with constant structure constants")),
    }
}

pub fn family(input: &Input) -> Result<DeformationFamily, Failure> {
    let doc: FamilyDoc = input.parse("family")?;
    Ok(DeformationFamily::from_doc(&doc)?)
}

/// `{"size": N, "terms": [{"basis": "E11.a", "coeff": "1/2"}]}` in `M_N(A)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixElementDoc {
    pub size: usize,
    pub terms: Vec<MatrixTermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixTermDoc {
    pub basis: String,
    pub coeff: String,
}

pub fn matrix_element(alg: &FiniteAlgebra, input: &Input) -> Result<(usize, SparseVec<Rational>), Failure> {
    let doc: MatrixElementDoc = input.parse("matrix element")?;
    if doc.size == 0 {
        return Err(Failure::input("ParseError", "matrix size must be positive"));
    }
    let m = alg.matrix_algebra(doc.size);
    let mut pairs = Vec::new();
    for t in &doc.terms {
        let i = m
            .basis_index(&t.basis)
            .ok_or_else(|| Failure::input("ParseError", format!("unknown basis element {} of M_{}(A)", t.basis, doc.size)))?;
        pairs.push((i, rational(&t.coeff)?));
    }
    Ok((doc.size, SparseVec::from_pairs(pairs)))
}

pub fn rational(s: &str) -> Result<Rational, Failure> {
    Rational::parse_decimal(s).map_err(|e| Failure::input("ParseError", format!("{s}: {e}")))
}

pub fn parameter(s: &str) -> Result<Rational, String> {
    Rational::parse_decimal(s).map_err(|e| format!("{s}: {e}"))
}

/// A chain in the exchange format.
pub fn chain(alg: &FiniteAlgebra, docs: &[ComponentDoc]) -> Result<ChainVector, Failure> {
    chain_from_doc(alg, docs).map_err(|e| Failure::input("ParseError", e.to_string()))
}

/// `{"from": [...], "to": [...]}`, each a chain document read as functionals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharactersDoc {
    pub from: Vec<ComponentDoc>,
    pub to: Vec<ComponentDoc>,
}
