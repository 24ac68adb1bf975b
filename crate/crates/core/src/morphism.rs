//! Standard-form homomorphisms and the Cu-morphisms they induce.
//!
//! A standard-form `φ: A → B` is `diag(Λ_ν(f), Λ_ω(f), f∘λ_1, …, f∘λ_μ)` conjugated by a
//! unitary that is a permutation at the ends. Only the combinatorial data is kept:
//! multiplicities of the endpoint representations, the eigenvalue functions, and for
//! each endpoint block of the target the tuple describing that block.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cusemigroup::{RankFunction, RankParts};
use crate::element::{CuElement, Target};
use crate::entourage::MorphismTable;
use crate::error::{Error, Result};
use crate::extnat::ExtNat;
use crate::pl::EigenFunction;
use crate::rational::Q;
use crate::spectrum::Shape;

/// Where a boundary tuple lives: a tag `0'_k` or `1'_k` of an interval-algebra target,
/// or block `k` of a matrix-sum target.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BoundaryKey {
    Left(usize),
    Right(usize),
    Block(usize),
}

impl fmt::Display for BoundaryKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryKey::Left(k) => write!(f, "0_{}", k + 1),
            BoundaryKey::Right(k) => write!(f, "1_{}", k + 1),
            BoundaryKey::Block(k) => write!(f, "b_{}", k + 1),
        }
    }
}

impl FromStr for BoundaryKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<BoundaryKey> {
        let bad = || Error::Document(format!("bad boundary key {s:?}"));
        let (side, idx) = s.split_once('_').ok_or_else(bad)?;
        let k: usize = idx.parse().map_err(|_| bad())?;
        let k = k.checked_sub(1).ok_or_else(bad)?;
        match side {
            "0" => Ok(BoundaryKey::Left(k)),
            "1" => Ok(BoundaryKey::Right(k)),
            "b" => Ok(BoundaryKey::Block(k)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for BoundaryKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BoundaryKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<BoundaryKey, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A representation of `A` on a matrix block: `ν_i` copies of `π_{0_i}`, `ω_j` copies
/// of `π_{1_j}` and evaluations at the points `λ` (ascending).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct PointTuple {
    pub nu: Vec<u64>,
    pub omega: Vec<u64>,
    pub lambdas: Vec<Q>,
}

impl PointTuple {
    pub fn zero(source: &Shape) -> PointTuple {
        PointTuple { nu: vec![0; source.r()], omega: vec![0; source.s()], lambdas: vec![] }
    }

    pub fn mu(&self) -> usize {
        self.lambdas.len()
    }

    pub fn dim(&self, source: &Shape) -> u64 {
        let a: u64 = self.nu.iter().zip(&source.p).map(|(n, p)| n * p).sum();
        let b: u64 = self.omega.iter().zip(&source.q).map(|(w, q)| w * q).sum();
        a + b + self.mu() as u64 * source.m
    }

    /// Evaluations at `0` and `1` rewritten as endpoint representations: the result has
    /// all `λ` strictly inside `(0,1)`.
    pub fn expand(&self) -> PointTuple {
        let z0 = self.lambdas.iter().filter(|l| l.is_zero()).count() as u64;
        let z1 = self.lambdas.iter().filter(|l| l.is_one()).count() as u64;
        PointTuple {
            nu: self.nu.iter().map(|n| n + z0).collect(),
            omega: self.omega.iter().map(|w| w + z1).collect(),
            lambdas: self.lambdas.iter().filter(|l| !l.is_zero() && !l.is_one()).cloned().collect(),
        }
    }

    /// The unique form with some `ν_i = 0` and some `ω_j = 0`.
    pub fn normalize(&self) -> PointTuple {
        let e = self.expand();
        let c = e.nu.iter().copied().min().unwrap_or(0);
        let d = e.omega.iter().copied().min().unwrap_or(0);
        let mut lambdas = e.lambdas;
        lambdas.extend(std::iter::repeat_n(Q::zero(), c as usize));
        lambdas.extend(std::iter::repeat_n(Q::one(), d as usize));
        lambdas.sort();
        PointTuple {
            nu: e.nu.iter().map(|n| n - c).collect(),
            omega: e.omega.iter().map(|w| w - d).collect(),
            lambdas,
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.nu.contains(&0) && self.omega.contains(&0)
    }

    pub fn add(&self, other: &PointTuple) -> PointTuple {
        let mut lambdas: Vec<Q> = self.lambdas.iter().chain(&other.lambdas).cloned().collect();
        lambdas.sort();
        PointTuple {
            nu: self.nu.iter().zip(&other.nu).map(|(a, b)| a + b).collect(),
            omega: self.omega.iter().zip(&other.omega).map(|(a, b)| a + b).collect(),
            lambdas,
        }
    }

    /// `Σ ν_i f(0_i) + Σ ω_j f(1_j) + Σ_k f̃(λ_k)`.
    pub fn apply(&self, f: &RankFunction) -> ExtNat {
        endpoint_part(&self.nu, &self.omega, f) + self.lambdas.iter().map(|l| f.folded(l)).sum()
    }

    fn same_counts(&self, other: &PointTuple) -> bool {
        self.nu == other.nu && self.omega == other.omega && self.mu() == other.mu()
    }
}

fn endpoint_part(nu: &[u64], omega: &[u64], f: &RankFunction) -> ExtNat {
    let a: ExtNat = nu.iter().zip(f.left()).map(|(n, v)| v.scale(*n)).sum();
    let b: ExtNat = omega.iter().zip(f.right()).map(|(w, v)| v.scale(*w)).sum();
    a + b
}

/// Document form; every field is checked by [`StandardFormHom::new`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HomParts {
    pub source: Shape,
    pub target: Target,
    pub nu: Vec<u64>,
    pub omega: Vec<u64>,
    pub lambdas: Vec<EigenFunction>,
    pub boundary: BTreeMap<BoundaryKey, PointTuple>,
    pub unital: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "HomParts", into = "HomParts")]
pub struct StandardFormHom {
    parts: HomParts,
}

impl TryFrom<HomParts> for StandardFormHom {
    type Error = Error;
    fn try_from(p: HomParts) -> Result<StandardFormHom> {
        StandardFormHom::new(p)
    }
}

impl From<StandardFormHom> for HomParts {
    fn from(h: StandardFormHom) -> HomParts {
        h.parts
    }
}

fn check_dim(problems: &mut Vec<String>, what: &str, got: u64, want: u64, unital: bool) {
    if unital && got != want {
        problems.push(format!("dimension at {what}: blocks fill {got}, target block has size {want}"));
    } else if !unital && got > want {
        problems.push(format!("dimension at {what}: blocks fill {got} > {want}"));
    }
}

fn check_tuple(problems: &mut Vec<String>, what: &str, t: &PointTuple, source: &Shape) {
    if t.nu.len() != source.r() || t.omega.len() != source.s() {
        problems.push(format!("structure at {what}: tuple lengths do not match the source"));
        return;
    }
    if !t.is_normalized() {
        problems.push(format!("normalization at {what}: no zero component in nu or omega"));
    }
    if t.lambdas.iter().any(|l| !l.in_unit()) {
        problems.push(format!("range at {what}: eigenvalue outside [0,1]"));
    }
    if t.lambdas.windows(2).any(|w| w[0] > w[1]) {
        problems.push(format!("ordering at {what}: eigenvalues not ascending"));
    }
}

impl StandardFormHom {
    pub fn new(parts: HomParts) -> Result<StandardFormHom> {
        let problems = StandardFormHom::violations(&parts);
        if problems.is_empty() {
            Ok(StandardFormHom { parts })
        } else {
            Err(Error::InvalidHom(problems))
        }
    }

    pub fn violations(h: &HomParts) -> Vec<String> {
        let mut out = Vec::new();
        let src = &h.source;
        if h.nu.len() != src.r() || h.omega.len() != src.s() {
            out.push("structure: nu/omega lengths do not match the source".into());
            return out;
        }
        if !(h.nu.contains(&0) && h.omega.contains(&0)) {
            out.push("normalization: no zero component in nu or omega".into());
        }
        if h.lambdas.iter().any(|l| !l.in_unit_range()) {
            out.push("range: eigenvalue function leaves [0,1]".into());
        }
        if h.lambdas.windows(2).any(|w| !w[0].leq(&w[1])) {
            out.push("ordering: eigenvalue functions not pointwise ascending".into());
        }
        let interior = PointTuple {
            nu: h.nu.clone(),
            omega: h.omega.clone(),
            lambdas: vec![],
        };
        let dim = interior.dim(src) + h.lambdas.len() as u64 * src.m;
        let at = |side: bool| {
            let mut t = interior.clone();
            t.lambdas = h.lambdas.iter().map(|l| if side { l.at_one() } else { l.at_zero() }).collect();
            t.lambdas.sort();
            t
        };
        let expected_keys: Vec<BoundaryKey> = match &h.target {
            Target::Matrix(m) => {
                check_dim(&mut out, "interior", dim, *m, h.unital);
                if h.lambdas.iter().any(|l| !l.is_constant()) {
                    out.push("structure: eigenvalues into a matrix algebra must be constant".into());
                }
                vec![]
            }
            Target::Algebra(t) => {
                check_dim(&mut out, "interior", dim, t.m, h.unital);
                (0..t.r()).map(BoundaryKey::Left).chain((0..t.s()).map(BoundaryKey::Right)).collect()
            }
            Target::Sum(ts) => {
                if ts.iter().any(|t| !matches!(t, Target::Matrix(_))) {
                    out.push("structure: direct-sum targets must consist of matrix algebras".into());
                    return out;
                }
                if h.lambdas.iter().any(|l| !l.is_constant()) {
                    out.push("structure: eigenvalues into matrix algebras must be constant".into());
                }
                let total: u64 = ts.iter().map(|t| if let Target::Matrix(m) = t { *m } else { 0 }).sum();
                check_dim(&mut out, "interior", dim, total, h.unital);
                (0..ts.len()).map(BoundaryKey::Block).collect()
            }
        };
        let keys: Vec<BoundaryKey> = h.boundary.keys().copied().collect();
        if keys != expected_keys {
            out.push(format!(
                "structure: boundary tuples given for [{}], expected [{}]",
                keys.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","),
                expected_keys.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
            ));
            return out;
        }
        for (k, t) in &h.boundary {
            check_tuple(&mut out, &k.to_string(), t, src);
        }
        if !out.is_empty() {
            return out;
        }
        let combined = |pred: &dyn Fn(&BoundaryKey) -> bool| -> PointTuple {
            h.boundary
                .iter()
                .filter(|(k, _)| pred(k))
                .fold(PointTuple::zero(src), |acc, (_, t)| acc.add(&t.expand()))
                .normalize()
        };
        match &h.target {
            Target::Algebra(t) => {
                for (k, tuple) in &h.boundary {
                    let (what, size) = match k {
                        BoundaryKey::Left(i) => (k.to_string(), t.p[*i]),
                        BoundaryKey::Right(j) => (k.to_string(), t.q[*j]),
                        BoundaryKey::Block(_) => unreachable!(),
                    };
                    check_dim(&mut out, &what, tuple.dim(src), size, h.unital);
                }
                if at(false).normalize() != combined(&|k| matches!(k, BoundaryKey::Left(_))) {
                    out.push("boundary compatibility at 0: tags do not refine the interior data".into());
                }
                if at(true).normalize() != combined(&|k| matches!(k, BoundaryKey::Right(_))) {
                    out.push("boundary compatibility at 1: tags do not refine the interior data".into());
                }
            }
            Target::Sum(ts) => {
                for (k, tuple) in &h.boundary {
                    if let BoundaryKey::Block(i) = k {
                        if let Some(Target::Matrix(m)) = ts.get(*i) {
                            check_dim(&mut out, &format!("block {}", i + 1), tuple.dim(src), *m, h.unital);
                        }
                    }
                }
                if at(false).normalize() != combined(&|_| true) {
                    out.push("boundary compatibility: blocks do not refine the combined data".into());
                }
            }
            Target::Matrix(_) => {}
        }
        out
    }

    pub fn source(&self) -> &Shape {
        &self.parts.source
    }

    pub fn target(&self) -> &Target {
        &self.parts.target
    }

    pub fn nu(&self) -> &[u64] {
        &self.parts.nu
    }

    pub fn omega(&self) -> &[u64] {
        &self.parts.omega
    }

    pub fn lambdas(&self) -> &[EigenFunction] {
        &self.parts.lambdas
    }

    pub fn mu(&self) -> usize {
        self.parts.lambdas.len()
    }

    pub fn boundary(&self) -> &BTreeMap<BoundaryKey, PointTuple> {
        &self.parts.boundary
    }

    pub fn is_unital(&self) -> bool {
        self.parts.unital
    }

    pub fn parts(&self) -> &HomParts {
        &self.parts
    }

    /// The interior tuple at `t ∈ [0,1]`, unnormalized.
    pub fn tuple_at(&self, t: &Q) -> PointTuple {
        let mut lambdas: Vec<Q> = self.parts.lambdas.iter().map(|l| l.eval(t)).collect();
        lambdas.sort();
        PointTuple { nu: self.parts.nu.clone(), omega: self.parts.omega.clone(), lambdas }
    }

    /// Size of the corner the image lives in.
    pub fn dim(&self) -> u64 {
        self.tuple_at(&Q::zero()).dim(&self.parts.source)
    }

    /// `Cu(φ)(f)`.
    pub fn apply(&self, f: &RankFunction) -> Result<CuElement> {
        if f.shape() != self.source() {
            return Err(Error::ShapeMismatch(format!("{} is not over {}", f, self.source())));
        }
        Ok(match &self.parts.target {
            Target::Matrix(_) => CuElement::Scalar(self.tuple_at(&Q::zero()).apply(f)),
            Target::Sum(_) => CuElement::Sum(
                self.parts.boundary.values().map(|t| CuElement::Scalar(t.apply(f))).collect(),
            ),
            Target::Algebra(shape) => CuElement::Rank(self.apply_interval(shape, f)?),
        })
    }

    fn apply_interval(&self, shape: &Shape, f: &RankFunction) -> Result<RankFunction> {
        let mut ts: Vec<Q> = vec![Q::zero(), Q::one()];
        for l in &self.parts.lambdas {
            ts.extend(l.node_ts());
            ts.extend(l.level_crossings(f.breaks()));
        }
        ts.sort();
        ts.dedup();
        let base = endpoint_part(&self.parts.nu, &self.parts.omega, f);
        let value = |t: &Q| base + self.parts.lambdas.iter().map(|l| f.folded(&l.eval(t))).sum();
        let intervals = ts.windows(2).map(|w| value(&w[0].midpoint(&w[1]))).collect();
        let points = ts[1..ts.len() - 1].iter().map(value).collect();
        let tag = |k: BoundaryKey| self.parts.boundary[&k].apply(f);
        RankFunction::from_parts(RankParts {
            shape: shape.clone(),
            left: (0..shape.r()).map(|i| tag(BoundaryKey::Left(i))).collect(),
            breaks: ts,
            intervals,
            points,
            right: (0..shape.s()).map(|j| tag(BoundaryKey::Right(j))).collect(),
        })
        .map_err(|e| Error::PostconditionFailure(format!("induced image is not a rank function: {e}")))
    }
}

impl PointTuple {
    /// This tuple, read as a representation of `φ`'s target, composed with `φ`.
    pub fn pull_back(&self, phi: &StandardFormHom) -> Result<PointTuple> {
        if !matches!(phi.target(), Target::Algebra(_)) {
            return Err(Error::ShapeMismatch(format!("{} is not a splitting interval algebra", phi.target())));
        }
        let mut out = PointTuple::zero(phi.source());
        let b = phi.boundary();
        for (k, n) in self.nu.iter().enumerate() {
            for _ in 0..*n {
                out = out.add(&b[&BoundaryKey::Left(k)].expand());
            }
        }
        for (k, n) in self.omega.iter().enumerate() {
            for _ in 0..*n {
                out = out.add(&b[&BoundaryKey::Right(k)].expand());
            }
        }
        for l in &self.lambdas {
            out = out.add(&phi.tuple_at(l).expand());
        }
        Ok(out.normalize())
    }
}

fn shift_to_normal(nu: &mut [u64], omega: &mut [u64], lambdas: &mut Vec<EigenFunction>) {
    let c = nu.iter().copied().min().unwrap_or(0);
    let d = omega.iter().copied().min().unwrap_or(0);
    nu.iter_mut().for_each(|v| *v -= c);
    omega.iter_mut().for_each(|v| *v -= d);
    lambdas.extend(std::iter::repeat_n(EigenFunction::constant(Q::zero()), c as usize));
    lambdas.extend(std::iter::repeat_n(EigenFunction::constant(Q::one()), d as usize));
    *lambdas = EigenFunction::sort_pointwise(lambdas);
}

fn assembled(parts: HomParts) -> Result<StandardFormHom> {
    StandardFormHom::new(parts).map_err(|e| Error::PostconditionFailure(format!("assembled hom is invalid: {e}")))
}

impl StandardFormHom {
    /// The zero map into `target`.
    pub fn zero(source: &Shape, target: &Target) -> Result<StandardFormHom> {
        let keys: Vec<BoundaryKey> = match target {
            Target::Algebra(t) => (0..t.r()).map(BoundaryKey::Left).chain((0..t.s()).map(BoundaryKey::Right)).collect(),
            Target::Sum(ts) => (0..ts.len()).map(BoundaryKey::Block).collect(),
            Target::Matrix(_) => vec![],
        };
        StandardFormHom::new(HomParts {
            source: source.clone(),
            target: target.clone(),
            nu: vec![0; source.r()],
            omega: vec![0; source.s()],
            lambdas: vec![],
            boundary: keys.into_iter().map(|k| (k, PointTuple::zero(source))).collect(),
            unital: false,
        })
    }

    /// `ψ ∘ φ`, where `φ` lands in a splitting interval algebra feeding `ψ`.
    pub fn compose(phi: &StandardFormHom, psi: &StandardFormHom) -> Result<StandardFormHom> {
        if *phi.target() != Target::Algebra(psi.source().clone()) {
            return Err(Error::ShapeMismatch(format!("{} does not feed {}", phi.target(), psi.source())));
        }
        let src = phi.source();
        let b = phi.boundary();
        let mut nu = vec![0; src.r()];
        let mut omega = vec![0; src.s()];
        let mut lambdas = Vec::new();
        let mut absorb = |t: &PointTuple, times: u64, nu: &mut Vec<u64>, omega: &mut Vec<u64>| {
            for _ in 0..times {
                nu.iter_mut().zip(&t.nu).for_each(|(a, x)| *a += x);
                omega.iter_mut().zip(&t.omega).for_each(|(a, x)| *a += x);
                lambdas.extend(t.lambdas.iter().cloned().map(EigenFunction::constant));
            }
        };
        for (k, n) in psi.nu().iter().enumerate() {
            absorb(&b[&BoundaryKey::Left(k)], *n, &mut nu, &mut omega);
        }
        for (k, n) in psi.omega().iter().enumerate() {
            absorb(&b[&BoundaryKey::Right(k)], *n, &mut nu, &mut omega);
        }
        for l in psi.lambdas() {
            nu.iter_mut().zip(phi.nu()).for_each(|(a, x)| *a += x);
            omega.iter_mut().zip(phi.omega()).for_each(|(a, x)| *a += x);
            lambdas.extend(phi.lambdas().iter().map(|f| f.compose(l)));
        }
        shift_to_normal(&mut nu, &mut omega, &mut lambdas);
        let boundary =
            psi.boundary().iter().map(|(k, t)| Ok((*k, t.pull_back(phi)?))).collect::<Result<_>>()?;
        assembled(HomParts {
            source: src.clone(),
            target: psi.target().clone(),
            nu,
            omega,
            lambdas,
            boundary,
            unital: phi.is_unital() && psi.is_unital(),
        })
    }

    /// Block-diagonal sum of maps with a common source and target; unital when the
    /// blocks fill the target.
    pub fn orthogonal_sum(source: &Shape, target: &Target, homs: &[StandardFormHom]) -> Result<StandardFormHom> {
        let zero = StandardFormHom::zero(source, target)?;
        let mut p = zero.parts.clone();
        for h in homs {
            if h.source() != source || h.target() != target {
                return Err(Error::ShapeMismatch("summands must share source and target".into()));
            }
            p.nu.iter_mut().zip(h.nu()).for_each(|(a, x)| *a += x);
            p.omega.iter_mut().zip(h.omega()).for_each(|(a, x)| *a += x);
            p.lambdas.extend(h.lambdas().iter().cloned());
            for (k, t) in h.boundary() {
                let acc = p.boundary.get_mut(k).expect("same target");
                *acc = acc.expand().add(&t.expand());
            }
        }
        shift_to_normal(&mut p.nu, &mut p.omega, &mut p.lambdas);
        for t in p.boundary.values_mut() {
            *t = t.normalize();
        }
        let full = match target {
            Target::Matrix(m) => *m,
            Target::Algebra(t) => t.m,
            Target::Sum(ts) => ts.iter().map(|t| if let Target::Matrix(m) = t { *m } else { 0 }).sum(),
        };
        let interior = PointTuple { nu: p.nu.clone(), omega: p.omega.clone(), lambdas: vec![] };
        p.unital = interior.dim(source) + p.lambdas.len() as u64 * source.m == full;
        assembled(p)
    }
}

/// Result of comparing eigenvalue patterns.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PatternDistance {
    pub tuples_equal: bool,
    pub max_gap: Option<Q>,
}

/// Compares `(μ, ν, ω)` of `φ` and `ψ` in the interior and in every boundary tuple,
/// and the largest eigenvalue gap when the multiplicities agree everywhere.
pub fn eigen_pattern_distance(phi: &StandardFormHom, psi: &StandardFormHom) -> Result<PatternDistance> {
    if phi.source() != psi.source() || phi.target() != psi.target() {
        return Err(Error::ShapeMismatch("homs have different source or target".into()));
    }
    let mut equal = phi.nu() == psi.nu() && phi.omega() == psi.omega();
    let mut same_mu = phi.mu() == psi.mu();
    let mut gap = Q::zero();
    if same_mu {
        for (a, b) in phi.lambdas().iter().zip(psi.lambdas()) {
            gap = gap.max(a.sup_distance(b));
        }
    }
    for (k, a) in phi.boundary() {
        let b = &psi.boundary()[k];
        equal &= a.same_counts(b);
        if a.mu() != b.mu() {
            same_mu = false;
        } else {
            for (x, y) in a.lambdas.iter().zip(&b.lambdas) {
                gap = gap.max((x - y).abs());
            }
        }
    }
    equal &= same_mu;
    Ok(PatternDistance { tuples_equal: equal, max_gap: same_mu.then_some(gap) })
}

/// Anything that evaluates like a Cu-morphism on rank functions over `source`.
pub trait CuMap {
    fn source(&self) -> &Shape;
    fn target(&self) -> Target;
    fn eval(&self, f: &RankFunction) -> Result<CuElement>;
}

impl CuMap for StandardFormHom {
    fn source(&self) -> &Shape {
        &self.parts.source
    }
    fn target(&self) -> Target {
        self.parts.target.clone()
    }
    fn eval(&self, f: &RankFunction) -> Result<CuElement> {
        self.apply(f)
    }
}

#[derive(Clone, Debug)]
pub enum CuMorphism {
    Identity(Shape),
    Induced(StandardFormHom),
    Table(MorphismTable),
    /// Into a direct sum, one map per summand.
    Summands(Shape, Vec<CuMorphism>),
    /// Left to right.
    Composite(Vec<CuMorphism>),
}

impl CuMap for CuMorphism {
    fn source(&self) -> &Shape {
        match self {
            CuMorphism::Identity(s) | CuMorphism::Summands(s, _) => s,
            CuMorphism::Induced(h) => h.source(),
            CuMorphism::Table(t) => t.source(),
            CuMorphism::Composite(ms) => ms[0].source(),
        }
    }

    fn target(&self) -> Target {
        match self {
            CuMorphism::Identity(s) => Target::Algebra(s.clone()),
            CuMorphism::Induced(h) => h.target().clone(),
            CuMorphism::Table(t) => t.target().clone(),
            CuMorphism::Summands(_, ms) => Target::Sum(ms.iter().map(|m| m.target()).collect()),
            CuMorphism::Composite(ms) => ms[ms.len() - 1].target(),
        }
    }

    fn eval(&self, f: &RankFunction) -> Result<CuElement> {
        match self {
            CuMorphism::Identity(s) => {
                if f.shape() != s {
                    return Err(Error::ShapeMismatch(format!("{} is not over {s}", f)));
                }
                Ok(CuElement::Rank(f.clone()))
            }
            CuMorphism::Induced(h) => h.apply(f),
            CuMorphism::Table(t) => t.eval(f),
            CuMorphism::Summands(_, ms) => Ok(CuElement::Sum(ms.iter().map(|m| m.eval(f)).collect::<Result<_>>()?)),
            CuMorphism::Composite(ms) => {
                let mut cur = ms[0].eval(f)?;
                for m in &ms[1..] {
                    let g = cur
                        .as_rank()
                        .ok_or_else(|| Error::ShapeMismatch("intermediate value is not a rank function".into()))?;
                    cur = m.eval(g)?;
                }
                Ok(cur)
            }
        }
    }
}

/// Composes left to right after checking that shapes chain.
pub fn cu_compose(ms: Vec<CuMorphism>) -> Result<CuMorphism> {
    if ms.is_empty() {
        return Err(Error::ShapeMismatch("empty composition".into()));
    }
    for w in ms.windows(2) {
        if w[0].target() != Target::Algebra(w[1].source().clone()) {
            return Err(Error::ShapeMismatch(format!("{} does not feed {}", w[0].target(), w[1].source())));
        }
    }
    if ms.len() == 1 {
        return Ok(ms.into_iter().next().unwrap());
    }
    Ok(CuMorphism::Composite(ms))
}

/// Tabulates `Cu(φ)` on `F_n`.
pub fn restrict_table(phi: &StandardFormHom, n: u32) -> Result<MorphismTable> {
    MorphismTable::tabulate(phi, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entourage::GeneratorKey;
    use crate::extnat::Fin;

    fn src() -> Shape {
        Shape::new(2, vec![1, 1], vec![2]).unwrap()
    }

    fn parts(nu: Vec<u64>, omega: Vec<u64>, mu: usize, m: u64) -> HomParts {
        HomParts {
            source: src(),
            target: Target::Matrix(m),
            nu,
            omega,
            lambdas: vec![EigenFunction::constant(Q::new(1, 2)); mu],
            boundary: BTreeMap::new(),
            unital: true,
        }
    }

    /// `ν = (1,0), ω = (0), λ_1 = id` into `M_3(C[0,1])`.
    pub(crate) fn example() -> StandardFormHom {
        let t = Shape::interval(3);
        let mut boundary = BTreeMap::new();
        boundary.insert(
            BoundaryKey::Left(0),
            PointTuple { nu: vec![1, 0], omega: vec![0], lambdas: vec![Q::zero()] }.normalize(),
        );
        boundary.insert(
            BoundaryKey::Right(0),
            PointTuple { nu: vec![1, 0], omega: vec![0], lambdas: vec![Q::one()] }.normalize(),
        );
        StandardFormHom::new(HomParts {
            source: src(),
            target: Target::Algebra(t),
            nu: vec![1, 0],
            omega: vec![0],
            lambdas: vec![EigenFunction::identity()],
            boundary,
            unital: true,
        })
        .unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(StandardFormHom::new(parts(vec![1, 0], vec![0], 1, 3)).is_ok());
        let e = StandardFormHom::new(parts(vec![1, 1], vec![0], 1, 3)).unwrap_err();
        assert!(matches!(&e, Error::InvalidHom(v) if v.iter().any(|s| s.starts_with("normalization"))));
        let e = StandardFormHom::new(parts(vec![1, 0], vec![0], 2, 3)).unwrap_err();
        assert!(matches!(&e, Error::InvalidHom(v) if v.iter().any(|s| s.starts_with("dimension"))));
    }

    #[test]
    fn apply_examples() {
        let phi = example();
        let s = src();
        let x11 = RankFunction::generator_x(&s, 0, 0).unwrap();
        assert_eq!(phi.apply(&x11).unwrap(), CuElement::Rank(RankFunction::compact(&Shape::interval(3), vec![2], 2, vec![2]).unwrap()));
        let yh = RankFunction::generator_y(&s, &Q::new(1, 2)).unwrap();
        let img = phi.apply(&yh).unwrap();
        let g = img.as_rank().unwrap();
        assert_eq!(g.at(&Q::new(1, 4)), Fin(0));
        assert_eq!(g.at(&Q::new(1, 2)), Fin(0));
        assert_eq!(g.at(&Q::new(3, 4)), Fin(1));
        assert_eq!(g.right(), &[Fin(1)]);
        assert_eq!(g.left(), &[Fin(0)]);
        assert!(phi.apply(&RankFunction::zero(&s)).unwrap().is_zero());
        assert_eq!(phi.apply(&RankFunction::unit(&s)).unwrap(), CuElement::unit(phi.target()));
    }

    #[test]
    fn table_example() {
        let t = restrict_table(&example(), 1).unwrap();
        let v = |k: GeneratorKey| t.value(&k).unwrap().as_rank().unwrap().clone();
        assert_eq!(v(GeneratorKey::X(0, 0)).interior_constant(), Some(Fin(2)));
        assert_eq!(v(GeneratorKey::X(1, 0)).interior_constant(), Some(Fin(1)));
        assert_eq!(v(GeneratorKey::Y(0)).interior_constant(), Some(Fin(1)));
        assert_eq!(v(GeneratorKey::Y(0)).left(), &[Fin(0)]);
        assert!(v(GeneratorKey::Y(2)).is_zero());
    }

    #[test]
    fn pattern_distance() {
        let phi = example();
        assert_eq!(
            eigen_pattern_distance(&phi, &phi).unwrap(),
            PatternDistance { tuples_equal: true, max_gap: Some(Q::zero()) }
        );
        let mut p = phi.parts().clone();
        p.lambdas = vec![EigenFunction::new(vec![
            (Q::zero(), Q::zero()),
            (Q::new(1, 2), Q::new(9, 16)),
            (Q::one(), Q::one()),
        ])
        .unwrap()];
        let psi = StandardFormHom::new(p).unwrap();
        assert_eq!(eigen_pattern_distance(&phi, &psi).unwrap().max_gap, Some(Q::new(1, 16)));
        let a = StandardFormHom::new(parts(vec![1, 0], vec![0], 1, 3)).unwrap();
        let b = StandardFormHom::new(parts(vec![0, 1], vec![0], 1, 3)).unwrap();
        assert!(!eigen_pattern_distance(&a, &b).unwrap().tuples_equal);
    }

    #[test]
    fn boundary_compatibility_is_enforced() {
        let mut p = example().parts().clone();
        p.boundary.insert(
            BoundaryKey::Left(0),
            PointTuple { nu: vec![0, 0], omega: vec![0], lambdas: vec![Q::zero(), Q::new(1, 3)] },
        );
        let e = StandardFormHom::new(p).unwrap_err();
        assert!(matches!(&e, Error::InvalidHom(v) if v.iter().any(|s| s.contains("compatibility at 0"))));
    }

    #[test]
    fn composing_homs_composes_cu_maps() {
        let phi = example();
        let t = Shape::interval(3);
        let mut boundary = BTreeMap::new();
        boundary.insert(BoundaryKey::Left(0), PointTuple { nu: vec![0], omega: vec![0], lambdas: vec![Q::zero(), Q::new(1, 2)] });
        boundary.insert(BoundaryKey::Right(0), PointTuple { nu: vec![0], omega: vec![0], lambdas: vec![Q::new(1, 2), Q::one()] });
        let psi = StandardFormHom::new(HomParts {
            source: t.clone(),
            target: Target::Algebra(Shape::interval(6)),
            nu: vec![0],
            omega: vec![0],
            lambdas: EigenFunction::sort_pointwise(&[EigenFunction::identity(), EigenFunction::constant(Q::new(1, 2))]),
            boundary,
            unital: true,
        })
        .unwrap();
        let c = StandardFormHom::compose(&phi, &psi).unwrap();
        assert!(c.is_unital());
        for k in crate::entourage::GeneratorKey::all(&src(), 2) {
            let f = k.element(&src(), 2).unwrap();
            let direct = psi.apply(phi.apply(&f).unwrap().as_rank().unwrap()).unwrap();
            assert_eq!(c.apply(&f).unwrap(), direct, "{k}");
        }
        assert!(StandardFormHom::compose(&psi, &phi).is_err());
    }

    #[test]
    fn orthogonal_sums_add_images() {
        let phi = example();
        let t = phi.target().clone();
        let z = StandardFormHom::zero(&src(), &t).unwrap();
        let s = StandardFormHom::orthogonal_sum(&src(), &t, &[phi.clone(), z.clone()]).unwrap();
        assert_eq!(s, phi);
        let x = RankFunction::generator_x(&src(), 0, 0).unwrap();
        assert!(z.apply(&x).unwrap().is_zero());
    }

    #[test]
    fn composition() {
        let phi = example();
        let id = CuMorphism::Identity(src());
        assert!(cu_compose(vec![]).is_err());
        let one = cu_compose(vec![id.clone()]).unwrap();
        let x = RankFunction::generator_x(&src(), 1, 0).unwrap();
        assert_eq!(one.eval(&x).unwrap(), CuElement::Rank(x.clone()));
        let c = cu_compose(vec![id, CuMorphism::Induced(phi.clone())]).unwrap();
        assert_eq!(c.eval(&x).unwrap(), phi.apply(&x).unwrap());
        assert!(cu_compose(vec![CuMorphism::Induced(phi.clone()), CuMorphism::Induced(phi)]).is_err());
    }
}
