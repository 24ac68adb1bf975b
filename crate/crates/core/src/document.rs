//! The `cusp/1` document format: one JSON object `{version, kind, payload}` per file.
//!
//! Writing is canonical (struct field order, ordered maps, reduced `a/b` rationals), so
//! equal values serialise to identical bytes.

use std::fmt;

use serde::de::{DeserializeOwned, IgnoredAny};
use serde::{Deserialize, Serialize};

use crate::cusemigroup::RankFunction;
use crate::element::CuElement;
use crate::entourage::MorphismTable;
use crate::error::{Error, Result};
use crate::morphism::StandardFormHom;
use crate::spectrum::{LevelSet, Shape};
use crate::tower::{AlphaFamily, IntertwiningCertificate, Tower};

pub const VERSION: &str = "cusp/1";

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LiftCertificate {
    pub table_depth: u32,
    pub entourage_depth: u32,
    pub checked: bool,
}

/// A lifted hom together with the entourage it was checked against.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Lifted {
    pub hom: StandardFormHom,
    pub certificate: LiftCertificate,
}

/// Nested level sets whose indicators add up to a rank function.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Decomposition {
    pub shape: Shape,
    pub levels: Vec<LevelSet>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Document {
    Shape(Shape),
    Rankfn(RankFunction),
    Element(CuElement),
    Hom(StandardFormHom),
    Table(MorphismTable),
    Tower(Tower),
    AlphaFamily(AlphaFamily),
    Lift(Lifted),
    Certificate(IntertwiningCertificate),
    Decomposition(Decomposition),
}

pub const KINDS: [&str; 10] = [
    "shape",
    "rankfn",
    "element",
    "hom",
    "table",
    "tower",
    "alpha-family",
    "lift",
    "certificate",
    "decomposition",
];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Problem {
    /// Not JSON, or JSON of the wrong form.
    Syntax,
    /// Well formed, but the payload breaks an invariant.
    Invalid,
    Version,
    UnknownKind,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DocError {
    pub problem: Problem,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.problem {
            Problem::Syntax => "parse error",
            Problem::Invalid => "invalid",
            Problem::Version => "unsupported version",
            Problem::UnknownKind => "unknown kind",
        };
        if self.line > 0 {
            write!(f, "{what} at line {}, column {}: {}", self.line, self.column, self.message)
        } else {
            write!(f, "{what}: {}", self.message)
        }
    }
}

impl From<DocError> for Error {
    fn from(e: DocError) -> Error {
        Error::Document(e.to_string())
    }
}

fn json_error(e: serde_json::Error) -> DocError {
    use serde_json::error::Category;
    let problem = match e.classify() {
        Category::Data => Problem::Invalid,
        _ => Problem::Syntax,
    };
    // serde_json appends " at line L column C"; keep the bare message.
    let full = e.to_string();
    let message = match full.rfind(" at line ") {
        Some(k) if e.line() > 0 => full[..k].to_string(),
        _ => full,
    };
    let problem = if message.contains("malformed rational") || message.contains("zero denominator") {
        Problem::Syntax
    } else {
        problem
    };
    DocError { problem, line: e.line(), column: e.column(), message }
}

#[derive(Deserialize)]
struct Envelope {
    version: String,
    kind: String,
    #[allow(dead_code)]
    payload: IgnoredAny,
}

#[derive(Deserialize)]
struct Typed<T> {
    payload: T,
}

#[derive(Serialize)]
struct Out<'a, T> {
    version: &'static str,
    kind: &'static str,
    payload: &'a T,
}

fn typed<T: DeserializeOwned>(text: &str) -> std::result::Result<T, DocError> {
    serde_json::from_str::<Typed<T>>(text).map(|t| t.payload).map_err(json_error)
}

fn emit<T: Serialize>(kind: &'static str, payload: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Out { version: VERSION, kind, payload })
        .expect("document values serialise");
    s.push('\n');
    s
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Shape(_) => "shape",
            Document::Rankfn(_) => "rankfn",
            Document::Element(_) => "element",
            Document::Hom(_) => "hom",
            Document::Table(_) => "table",
            Document::Tower(_) => "tower",
            Document::AlphaFamily(_) => "alpha-family",
            Document::Lift(_) => "lift",
            Document::Certificate(_) => "certificate",
            Document::Decomposition(_) => "decomposition",
        }
    }

    pub fn parse(text: &str) -> std::result::Result<Document, DocError> {
        let env: Envelope = serde_json::from_str(text).map_err(|e| {
            let mut d = json_error(e);
            if d.problem == Problem::Invalid {
                d.problem = Problem::Syntax;
            }
            d
        })?;
        if env.version != VERSION {
            return Err(DocError {
                problem: Problem::Version,
                line: 0,
                column: 0,
                message: format!("expected {VERSION:?}, found {:?}", env.version),
            });
        }
        Ok(match env.kind.as_str() {
            "shape" => Document::Shape(typed(text)?),
            "rankfn" => Document::Rankfn(typed(text)?),
            "element" => Document::Element(typed(text)?),
            "hom" => Document::Hom(typed(text)?),
            "table" => Document::Table(typed(text)?),
            "tower" => Document::Tower(typed(text)?),
            "alpha-family" => Document::AlphaFamily(typed(text)?),
            "lift" => Document::Lift(typed(text)?),
            "certificate" => Document::Certificate(typed(text)?),
            "decomposition" => Document::Decomposition(typed(text)?),
            other => {
                return Err(DocError {
                    problem: Problem::UnknownKind,
                    line: 0,
                    column: 0,
                    message: format!("{other:?}; expected one of {}", KINDS.join(", ")),
                })
            }
        })
    }

    pub fn to_json(&self) -> String {
        let k = self.kind();
        match self {
            Document::Shape(x) => emit(k, x),
            Document::Rankfn(x) => emit(k, x),
            Document::Element(x) => emit(k, x),
            Document::Hom(x) => emit(k, x),
            Document::Table(x) => emit(k, x),
            Document::Tower(x) => emit(k, x),
            Document::AlphaFamily(x) => emit(k, x),
            Document::Lift(x) => emit(k, x),
            Document::Certificate(x) => emit(k, x),
            Document::Decomposition(x) => emit(k, x),
        }
    }

    /// The payload as an element of a Cu-semigroup, when it is one.
    pub fn into_element(self) -> Result<CuElement> {
        match self {
            Document::Rankfn(f) => Ok(CuElement::Rank(f)),
            Document::Element(e) => Ok(e),
            other => Err(Error::Document(format!("expected rankfn or element, found {}", other.kind()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entourage::MorphismTable;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn round_trip(d: &Document) {
        let s = d.to_json();
        let back = Document::parse(&s).unwrap();
        assert_eq!(&back, d);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn documents_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let sh = sample::shape(&mut rng, 3, 2);
            let f = sample::rank_function(&mut rng, &sh, 3, 3);
            let h = sample::hom(&mut rng, &sh, sample::TargetKind::Algebra, 2, true).unwrap();
            let t = MorphismTable::tabulate(&h, 2).unwrap();
            round_trip(&Document::Shape(sh.clone()));
            round_trip(&Document::Rankfn(f.clone()));
            round_trip(&Document::Decomposition(Decomposition { shape: sh, levels: f.decompose().unwrap() }));
            round_trip(&Document::Hom(h));
            round_trip(&Document::Table(t));
        }
    }

    #[test]
    fn errors_carry_positions() {
        let bad = "{\n  \"version\": \"cusp/1\",\n  \"kind\": \"rankfn\",\n  \"payload\": {\"shape\": {\"m\": 1, \"p\": [1], \"q\": [1]},\n  \"left\": [0], \"breaks\": [\"0\", \"1/0\"], \"intervals\": [0], \"points\": [], \"right\": [0]}\n}";
        let e = Document::parse(bad).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.to_string().contains("zero denominator"), "{e}");
        assert_eq!(e.problem, Problem::Syntax);

        let v = "{\"version\": \"cusp/2\", \"kind\": \"shape\", \"payload\": {}}";
        assert_eq!(Document::parse(v).unwrap_err().problem, Problem::Version);
        let k = "{\"version\": \"cusp/1\", \"kind\": \"blob\", \"payload\": {}}";
        assert_eq!(Document::parse(k).unwrap_err().problem, Problem::UnknownKind);
        let s = "{\"version\": \"cusp/1\", \"kind\": \"shape\", \"payload\": {\"m\": 2, \"p\": [1], \"q\": [2]}}";
        assert_eq!(Document::parse(s).unwrap_err().problem, Problem::Invalid);
    }
}
