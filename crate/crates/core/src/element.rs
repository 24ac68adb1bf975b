//! Elements of the Cuntz semigroups of possible codomains: matrix algebras (`ℕ̄`),
//! splitting interval algebras (rank functions) and finite direct sums of these.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cusemigroup::RankFunction;
use crate::error::{Error, Result};
use crate::extnat::{ExtNat, Fin};
use crate::spectrum::Shape;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Matrix(u64),
    Algebra(Shape),
    Sum(Vec<Target>),
}

impl Target {
    pub fn matrix_sum(sizes: &[u64]) -> Target {
        Target::Sum(sizes.iter().map(|&m| Target::Matrix(m)).collect())
    }

    pub fn algebra_sum(shapes: &[Shape]) -> Target {
        Target::Sum(shapes.iter().cloned().map(Target::Algebra).collect())
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Matrix(m) => write!(f, "M_{m}"),
            Target::Algebra(s) => write!(f, "{s}"),
            Target::Sum(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "{}", parts.join(" ⊕ "))
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CuElement {
    Scalar(ExtNat),
    Rank(RankFunction),
    Sum(Vec<CuElement>),
}

fn mismatch(a: &CuElement, b: &CuElement) -> Error {
    Error::ShapeMismatch(format!("{} vs {}", a.target(), b.target()))
}

impl CuElement {
    pub fn zero(t: &Target) -> CuElement {
        match t {
            Target::Matrix(_) => CuElement::Scalar(Fin(0)),
            Target::Algebra(s) => CuElement::Rank(RankFunction::zero(s)),
            Target::Sum(ts) => CuElement::Sum(ts.iter().map(CuElement::zero).collect()),
        }
    }

    pub fn unit(t: &Target) -> CuElement {
        match t {
            Target::Matrix(m) => CuElement::Scalar(Fin(*m)),
            Target::Algebra(s) => CuElement::Rank(RankFunction::unit(s)),
            Target::Sum(ts) => CuElement::Sum(ts.iter().map(CuElement::unit).collect()),
        }
    }

    /// The codomain this element lives in. Scalars report `M_0`; use
    /// [`CuElement::fits`] to check against a declared target.
    pub fn target(&self) -> Target {
        match self {
            CuElement::Scalar(_) => Target::Matrix(0),
            CuElement::Rank(f) => Target::Algebra(f.shape().clone()),
            CuElement::Sum(es) => Target::Sum(es.iter().map(CuElement::target).collect()),
        }
    }

    pub fn fits(&self, t: &Target) -> bool {
        match (self, t) {
            (CuElement::Scalar(_), Target::Matrix(_)) => true,
            (CuElement::Rank(f), Target::Algebra(s)) => f.shape() == s,
            (CuElement::Sum(es), Target::Sum(ts)) => {
                es.len() == ts.len() && es.iter().zip(ts).all(|(e, t)| e.fits(t))
            }
            _ => false,
        }
    }

    pub fn as_rank(&self) -> Option<&RankFunction> {
        match self {
            CuElement::Rank(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_scalar(&self) -> Option<ExtNat> {
        match self {
            CuElement::Scalar(v) => Some(*v),
            _ => None,
        }
    }

    pub fn components(&self) -> Option<&[CuElement]> {
        match self {
            CuElement::Sum(es) => Some(es),
            _ => None,
        }
    }

    fn zip<T>(
        &self,
        other: &CuElement,
        scalar: &dyn Fn(ExtNat, ExtNat) -> Result<T>,
        rank: &dyn Fn(&RankFunction, &RankFunction) -> Result<T>,
        sum: &dyn Fn(Vec<T>) -> T,
    ) -> Result<T> {
        match (self, other) {
            (CuElement::Scalar(a), CuElement::Scalar(b)) => scalar(*a, *b),
            (CuElement::Rank(f), CuElement::Rank(g)) => rank(f, g),
            (CuElement::Sum(xs), CuElement::Sum(ys)) if xs.len() == ys.len() => {
                let parts: Result<Vec<T>> =
                    xs.iter().zip(ys).map(|(x, y)| x.zip(y, scalar, rank, sum)).collect();
                Ok(sum(parts?))
            }
            _ => Err(mismatch(self, other)),
        }
    }

    pub fn add(&self, other: &CuElement) -> Result<CuElement> {
        self.zip(
            other,
            &|a, b| Ok(CuElement::Scalar(a + b)),
            &|f, g| Ok(CuElement::Rank(f.add(g)?)),
            &CuElement::Sum,
        )
    }

    pub fn checked_sub(&self, other: &CuElement) -> Result<CuElement> {
        self.zip(
            other,
            &|a, b| {
                a.checked_sub(b)
                    .map(CuElement::Scalar)
                    .ok_or_else(|| Error::NegativeRank(format!("{a} - {b}")))
            },
            &|f, g| Ok(CuElement::Rank(f.checked_sub(g)?)),
            &CuElement::Sum,
        )
    }

    pub fn leq(&self, other: &CuElement) -> Result<bool> {
        self.zip(other, &|a, b| Ok(a <= b), &|f, g| f.leq(g), &|v| v.into_iter().all(|b| b))
    }

    pub fn way_below(&self, other: &CuElement) -> Result<bool> {
        self.zip(
            other,
            &|a, b| Ok(a.is_finite() && a <= b),
            &|f, g| f.way_below(g),
            &|v| v.into_iter().all(|b| b),
        )
    }

    pub fn is_compact(&self) -> bool {
        self.way_below(self).expect("same target")
    }

    pub fn scale(&self, k: u64) -> CuElement {
        match self {
            CuElement::Scalar(a) => CuElement::Scalar(a.scale(k)),
            CuElement::Rank(f) => CuElement::Rank(f.scale(k)),
            CuElement::Sum(es) => CuElement::Sum(es.iter().map(|e| e.scale(k)).collect()),
        }
    }

    pub fn sum_all(t: &Target, es: &[CuElement]) -> Result<CuElement> {
        let mut acc = CuElement::zero(t);
        for e in es {
            acc = acc.add(e)?;
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CuElement::Scalar(a) => *a == Fin(0),
            CuElement::Rank(f) => f.is_zero(),
            CuElement::Sum(es) => es.iter().all(CuElement::is_zero),
        }
    }
}

impl fmt::Display for CuElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CuElement::Scalar(a) => write!(f, "{a}"),
            CuElement::Rank(g) => write!(f, "{g}"),
            CuElement::Sum(es) => {
                let parts: Vec<String> = es.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", parts.join(" ⊕ "))
            }
        }
    }
}
