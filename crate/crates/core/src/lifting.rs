//! Lifting tables on `F_n` to standard-form homomorphisms.
//!
//! A table `α` satisfying the hypotheses determines multiplicities from the images of
//! the compact generators, and a descending chain `z_{k/2^n}` whose level sets say how
//! many eigenvalues exceed `k/2^n` at each target point. Eigenvalue functions are built
//! from Urysohn functions for the nested level sets, so the counts are reproduced
//! exactly: `|{i : λ_i(t) > k/2^n}| = z_{k/2^n}(t)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cusemigroup::{RankFunction, RankParts};
use crate::element::{CuElement, Target};
use crate::entourage::{folded_level, in_entourage, GeneratorSet, MorphismTable};
use crate::error::{Error, Result};
use crate::extnat::{ExtNat, Fin};
use crate::morphism::{BoundaryKey, HomParts, PointTuple, StandardFormHom};
use crate::pl::EigenFunction;
use crate::rational::Q;
use crate::spectrum::Shape;

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ConditionCheck {
    pub condition: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, condition: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.condition == condition)
    }

    pub fn first_failure(&self) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn require(&self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(c) => Err(Error::ConditionsFailed(format!(
                "({}) at {}",
                c.condition,
                c.witness.as_deref().unwrap_or("?")
            ))),
        }
    }
}

fn x(a: &MorphismTable, i: usize, j: usize) -> &CuElement {
    a.x(i, j)
}

fn first_witness(items: impl Iterator<Item = (String, Result<bool>)>) -> Option<String> {
    for (w, ok) in items {
        if !ok.unwrap_or(false) {
            return Some(w);
        }
    }
    None
}

fn eq_elements(a: &CuElement, b: &CuElement) -> Result<bool> {
    Ok(a.leq(b)? && b.leq(a)?)
}

/// Left side of (vii′) and its right side with coefficient `c` on `α(x_{i′,j′})`.
fn vii_sides(a: &MorphismTable, i0: usize, j0: usize, c: u64) -> Result<(CuElement, CuElement)> {
    let s = a.source();
    let t = a.target();
    let mut lhs = CuElement::zero(t);
    for (i, p) in s.p.iter().enumerate() {
        lhs = lhs.add(&x(a, i, j0).scale(*p))?;
    }
    for (j, q) in s.q.iter().enumerate() {
        lhs = lhs.add(&x(a, i0, j).scale(*q))?;
    }
    let rhs = a.unit().add(&x(a, i0, j0).scale(c))?;
    Ok((lhs, rhs))
}

fn pairs(s: &Shape) -> Vec<(usize, usize)> {
    (0..s.r()).flat_map(|i| (0..s.s()).map(move |j| (i, j))).collect()
}

/// Evaluates the lifting hypotheses (i)–(vi), (vii′) and `α(y_1) = 0` with witnesses.
pub fn check_conditions(a: &MorphismTable) -> ConditionReport {
    let s = a.source();
    let top = 1u64 << a.depth();
    let ij = pairs(s);
    let mut checks = Vec::new();
    let mut push = |condition: &'static str, witness: Option<String>| {
        checks.push(ConditionCheck { condition, passed: witness.is_none(), witness })
    };
    push(
        "i",
        first_witness(ij.iter().map(|&(i, j)| (format!("x_{}_{}", i + 1, j + 1), Ok(x(a, i, j).is_compact())))),
    );
    push(
        "ii",
        first_witness(ij.iter().flat_map(|&(i, j)| {
            (0..top).map(move |k| {
                let w = format!("i={}, j={}, k={k}", i + 1, j + 1);
                (w, a.y(k).add(x(a, i, j)).and_then(|r| x(a, i, 0).way_below(&r)))
            })
        })),
    );
    push("iii", first_witness((0..top).map(|k| (format!("k={k}"), a.y(k + 1).way_below(a.y(k))))));
    push("iv", first_witness((0..s.r()).map(|i| (format!("i={}", i + 1), a.y(0).leq(x(a, i, 0))))));
    push(
        "v",
        first_witness(ij.iter().flat_map(|&(i, j)| {
            ij.iter().map(move |&(i2, j2)| {
                let w = format!("({},{}) ({},{})", i + 1, j + 1, i2 + 1, j2 + 1);
                let l = x(a, i, j).add(x(a, i2, j2));
                let r = x(a, i, j2).add(x(a, i2, j));
                (w, l.and_then(|l| r.and_then(|r| eq_elements(&l, &r))))
            })
        })),
    );
    let bound = CuElement::unit(a.target());
    push(
        "vi",
        first_witness(
            ij.iter()
                .map(|&(i, j)| (format!("x_{}_{}", i + 1, j + 1), x(a, i, j).leq(a.unit())))
                .chain([("unit".to_string(), a.unit().leq(&bound))]),
        ),
    );
    push(
        "vii'",
        first_witness(ij.iter().map(|&(i, j)| {
            let ok = vii_sides(a, i, j, s.m).and_then(|(l, r)| eq_elements(&l, &r));
            (format!("i'={}, j'={}", i + 1, j + 1), ok)
        })),
    );
    push("zero", (!a.y(top).is_zero()).then(|| format!("y_{top}")));
    ConditionReport { checks }
}

/// The identity (vii) with the constant `2m − 1` in place of `m`.
pub fn printed_vii_holds(a: &MorphismTable) -> bool {
    let m = a.source().m;
    pairs(a.source()).iter().all(|&(i, j)| {
        vii_sides(a, i, j, 2 * m - 1).and_then(|(l, r)| eq_elements(&l, &r)).unwrap_or(false)
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Extracted {
    pub mu: u64,
    pub nu: Vec<u64>,
    pub omega: Vec<u64>,
    pub i0: usize,
    pub j0: usize,
}

fn base_value(e: &CuElement) -> Result<u64> {
    let v = match e {
        CuElement::Scalar(v) => Some(*v),
        CuElement::Rank(f) => f.interior_constant(),
        CuElement::Sum(_) => {
            return Err(Error::Precondition("multiplicities are read off one target summand at a time".into()))
        }
    };
    v.and_then(ExtNat::finite).ok_or_else(|| Error::Precondition(format!("{e} is not a finite constant")))
}

/// `(μ, ν, ω)` with `(i′, j′)` the lexicographically first minimiser of `α(x_{i,j})`.
pub fn extract_tuple(a: &MorphismTable) -> Result<Extracted> {
    let s = a.source();
    let mut best: Option<(u64, usize, usize)> = None;
    for (i, j) in pairs(s) {
        let v = base_value(x(a, i, j))?;
        if best.is_none_or(|(b, _, _)| v < b) {
            best = Some((v, i, j));
        }
    }
    let (mu, i0, j0) = best.expect("shapes have tags");
    let diff = |v: u64, what: String| {
        v.checked_sub(mu).ok_or_else(|| Error::NegativeMultiplicity(format!("{what}: {v} - {mu}")))
    };
    let nu = (0..s.r()).map(|i| diff(base_value(x(a, i, j0))?, format!("nu_{}", i + 1))).collect::<Result<_>>()?;
    let omega =
        (0..s.s()).map(|j| diff(base_value(x(a, i0, j))?, format!("omega_{}", j + 1))).collect::<Result<_>>()?;
    Ok(Extracted { mu, nu, omega, i0, j0 })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZProfile {
    pub depth: u32,
    /// `z_{k/2^n}` for `0 ≤ k < 2^n`.
    pub values: Vec<CuElement>,
}

/// `z_{k/2^n} = α(y_{k/2^n}) + α(x_{i′,j′}) − α(x_{i′,1})`.
pub fn z_profile(a: &MorphismTable, i0: usize, j0: usize) -> Result<ZProfile> {
    let values = (0..1u64 << a.depth())
        .map(|k| a.y(k).add(x(a, i0, j0))?.checked_sub(x(a, i0, 0)))
        .collect::<Result<_>>()?;
    Ok(ZProfile { depth: a.depth(), values })
}

/// A relatively open subset of `[0,1]`, one component.
#[derive(Clone, Debug)]
struct Component {
    lo: Q,
    has_lo: bool,
    hi: Q,
    has_hi: bool,
}

fn level_components(e: &CuElement, level: u64) -> Result<Vec<Component>> {
    match e {
        CuElement::Scalar(Fin(v)) => Ok(if *v >= level {
            vec![Component { lo: Q::zero(), has_lo: true, hi: Q::one(), has_hi: true }]
        } else {
            vec![]
        }),
        CuElement::Rank(f) if f.shape().r() == 1 && f.shape().s() == 1 => Ok(folded_level(f, level)
            .into_iter()
            .map(|(lo, has_lo, hi, has_hi)| Component { lo, has_lo, hi, has_hi })
            .collect()),
        _ => Err(Error::Precondition(format!("{e} is not a scalar or an interval rank function"))),
    }
}

/// A piecewise-linear `h` with `h = 1` on the closure of `inner`, `h > 0` on `outer` and
/// `h = 0` off `outer`. Requires the closure of `inner` to lie in `outer`.
fn urysohn(outer: &[Component], inner: &[Component]) -> Result<EigenFunction> {
    let (zero, one) = (Q::zero(), Q::one());
    let mut nodes: Vec<(Q, Q)> = Vec::new();
    for j in outer {
        let inside: Vec<&Component> = inner.iter().filter(|c| j.lo <= c.lo && c.hi <= j.hi).collect();
        nodes.push((j.lo.clone(), if j.has_lo { one.clone() } else { zero.clone() }));
        match (inside.first(), inside.last()) {
            (Some(c), Some(d)) => {
                nodes.push((c.lo.clone(), one.clone()));
                nodes.push((d.hi.clone(), one.clone()));
            }
            _ if !j.has_lo && !j.has_hi => nodes.push((j.lo.midpoint(&j.hi), one.clone())),
            _ => {}
        }
        nodes.push((j.hi.clone(), if j.has_hi { one.clone() } else { zero.clone() }));
    }
    if inner.iter().any(|c| !outer.iter().any(|j| j.lo <= c.lo && c.hi <= j.hi)) {
        return Err(Error::ConditionsFailed("level sets are not nested".into()));
    }
    if nodes.first().is_none_or(|n| !n.0.is_zero()) {
        nodes.insert(0, (zero.clone(), zero.clone()));
    }
    if nodes.last().is_none_or(|n| !n.0.is_one()) {
        nodes.push((one.clone(), zero.clone()));
    }
    nodes.dedup();
    if nodes.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::ConditionsFailed("a level set is not compactly contained in the next".into()));
    }
    EigenFunction::new(nodes)
}

/// `μ` eigenvalue functions, pointwise ascending, with `|{i : λ_i(t) > k/2^n}| = z_{k/2^n}(t)`.
///
/// For each level `i`, `λ_i = 2^{−n} Σ_k h_{k,i}` where `h_{k,i}` separates the closure
/// of `{z_{k+1} ≥ i}` from the complement of `{z_k ≥ i}`.
pub fn eigenfunctions_from_profile(z: &ZProfile, mu: u64) -> Result<Vec<EigenFunction>> {
    if let Some(z0) = z.values.first() {
        let ok = match z0 {
            CuElement::Scalar(v) => *v <= Fin(mu),
            CuElement::Rank(f) => f.max_value() <= Fin(mu),
            CuElement::Sum(_) => false,
        };
        if !ok {
            return Err(Error::Infeasible(format!("z_0 = {z0} exceeds {mu} eigenvalues")));
        }
    }
    let step = Q::dyadic(1, z.depth);
    let mut out = Vec::with_capacity(mu as usize);
    for level in 1..=mu {
        let sets: Vec<Vec<Component>> =
            z.values.iter().map(|e| level_components(e, level)).collect::<Result<_>>()?;
        let mut g = EigenFunction::constant(Q::zero());
        for k in 0..sets.len() {
            let inner = sets.get(k + 1).map(Vec::as_slice).unwrap_or(&[]);
            g = g.add(&urysohn(&sets[k], inner)?);
        }
        out.push(g.scale(&step));
    }
    Ok(EigenFunction::sort_pointwise(&out))
}

/// Lift of a table into `M_m` or `M_m(C[0,1])`: multiplicities and eigenvalue functions.
fn lift_block(a: &MorphismTable) -> Result<(Extracted, Vec<EigenFunction>)> {
    let e = extract_tuple(a)?;
    let z = z_profile(a, e.i0, e.j0)?;
    let lambdas = eigenfunctions_from_profile(&z, e.mu)?;
    Ok((e, lambdas))
}

fn block_tuple(a: &MorphismTable) -> Result<PointTuple> {
    let (e, lambdas) = lift_block(a)?;
    Ok(PointTuple { nu: e.nu, omega: e.omega, lambdas: lambdas.iter().map(EigenFunction::at_zero).collect() })
}

fn component(e: &CuElement, k: usize) -> Result<CuElement> {
    e.components()
        .and_then(|c| c.get(k))
        .cloned()
        .ok_or_else(|| Error::ShapeMismatch(format!("{e} has no summand {}", k + 1)))
}

fn is_unital(a: &MorphismTable) -> bool {
    *a.unit() == CuElement::unit(a.target())
}

fn check_entourage(a: &MorphismTable, phi: &StandardFormHom, depth: u32) -> Result<()> {
    let table = a.restrict(depth)?;
    let fam = GeneratorSet::new(a.source(), depth);
    if !in_entourage(fam.as_ref(), &table, phi)? {
        return Err(Error::PostconditionFailure(format!("lift is not in the entourage of F_{depth}")));
    }
    Ok(())
}

/// Lifts into matrix targets; the lift `φ` satisfies `(α, Cu(φ)) ∈ U_{F_n}`.
pub fn lift_to_matrix(a: &MorphismTable) -> Result<StandardFormHom> {
    check_conditions(a).require()?;
    let (tuple, boundary) = match a.target() {
        Target::Matrix(_) => (block_tuple(a)?, BTreeMap::new()),
        Target::Sum(ts) if ts.iter().all(|t| matches!(t, Target::Matrix(_))) => {
            let mut boundary = BTreeMap::new();
            let mut combined = PointTuple::zero(a.source());
            for (k, t) in ts.iter().enumerate() {
                let block = a.map_values(t.clone(), |e| component(e, k))?;
                let tuple = block_tuple(&block)?;
                combined = combined.add(&tuple.expand());
                boundary.insert(BoundaryKey::Block(k), tuple);
            }
            (combined.normalize(), boundary)
        }
        t => return Err(Error::Precondition(format!("{t} is not a matrix algebra or a sum of them"))),
    };
    let phi = StandardFormHom::new(HomParts {
        source: a.source().clone(),
        target: a.target().clone(),
        nu: tuple.nu,
        omega: tuple.omega,
        lambdas: tuple.lambdas.into_iter().map(EigenFunction::constant).collect(),
        boundary,
        unital: is_unital(a),
    })
    .map_err(|e| Error::PostconditionFailure(format!("assembled hom is invalid: {e}")))?;
    check_entourage(a, &phi, a.depth())?;
    Ok(phi)
}

/// `f` viewed in `M_m(C[0,1])`: each end carries the sum of its tags.
pub fn project_interval(f: &RankFunction) -> Result<RankFunction> {
    let p = f.parts();
    RankFunction::from_parts(RankParts {
        shape: Shape::interval(f.shape().m),
        left: vec![f.left_sum()],
        right: vec![f.right_sum()],
        ..p
    })
}

/// `f` evaluated at the tags of one end, as an element of `⊕ M_{p_k}` or `⊕ M_{q_k}`.
pub fn evaluate_end(f: &RankFunction, at_one: bool) -> CuElement {
    let tags = if at_one { f.right() } else { f.left() };
    CuElement::Sum(tags.iter().map(|v| CuElement::Scalar(*v)).collect())
}

fn as_rank(e: &CuElement) -> Result<&RankFunction> {
    e.as_rank().ok_or_else(|| Error::ShapeMismatch(format!("{e} is not a rank function")))
}

/// Lifts into a splitting interval algebra; the lift `φ` satisfies `(α, Cu(φ)) ∈ U_{F_{n−3}}`.
///
/// The interior is lifted through `M_m(C[0,1])` and each end through its block algebra.
/// The three lifts must carry the same multiplicities, which is automatic once the
/// images of the `x_{i,j}` have tags summing to their interior value; the interior
/// eigenvalues are then pinned to the endpoint ones by a linear correction.
pub fn lift_to_sia(a: &MorphismTable) -> Result<StandardFormHom> {
    let n = a.depth();
    if n < 4 {
        return Err(Error::DepthTooSmall { needed: 4, got: n });
    }
    let shape = match a.target() {
        Target::Algebra(t) => t.clone(),
        t => return Err(Error::Precondition(format!("{t} is not a splitting interval algebra"))),
    };
    for (i, j) in pairs(a.source()) {
        let f = as_rank(x(a, i, j))?;
        if let Some(c) = f.interior_constant() {
            if f.left_sum() != c || f.right_sum() != c {
                return Err(Error::BoundaryMisalignment(format!(
                    "x_{}_{} is {c} inside but its tags sum to {} and {}",
                    i + 1,
                    j + 1,
                    f.left_sum(),
                    f.right_sum()
                )));
            }
        }
    }
    check_conditions(a).require()?;
    let interior = a.map_values(Target::Algebra(Shape::interval(shape.m)), |e| {
        Ok(CuElement::Rank(project_interval(as_rank(e)?)?))
    })?;
    let (e, lambdas) = lift_block(&interior)?;
    let ends = [(false, &shape.p), (true, &shape.q)].map(|(side, sizes)| {
        a.map_values(Target::matrix_sum(sizes), |v| Ok(evaluate_end(as_rank(v)?, side)))
            .and_then(|t| lift_to_matrix(&t))
    });
    let [start, end] = ends;
    let (start, end) = (start?, end?);
    for (hom, name) in [(&start, "0"), (&end, "1")] {
        if hom.nu() != e.nu.as_slice() || hom.omega() != e.omega.as_slice() || hom.mu() as u64 != e.mu {
            return Err(Error::BoundaryMisalignment(format!(
                "endpoint {name} lift has nu={:?}, omega={:?}, mu={}, interior has nu={:?}, omega={:?}, mu={}",
                hom.nu(),
                hom.omega(),
                hom.mu(),
                e.nu,
                e.omega,
                e.mu
            )));
        }
    }
    let c: Vec<Q> = start.lambdas().iter().map(EigenFunction::at_zero).collect();
    let d: Vec<Q> = end.lambdas().iter().map(EigenFunction::at_zero).collect();
    let pinned: Vec<EigenFunction> = lambdas
        .iter()
        .enumerate()
        .map(|(i, l)| {
            l.add(&EigenFunction::linear(&c[i] - &l.at_zero(), &d[i] - &l.at_one())).clip(&Q::zero(), &Q::one())
        })
        .collect();
    let pinned = EigenFunction::sort_pointwise(&pinned);
    let bound = Q::dyadic(1, n - 2);
    if lambdas.iter().zip(&pinned).any(|(l, p)| l.sup_distance(p) > bound) {
        return Err(Error::PostconditionFailure("pinning moved an eigenvalue by more than 1/2^(n-2)".into()));
    }
    let mut boundary = BTreeMap::new();
    for (hom, key) in [(&start, BoundaryKey::Left as fn(usize) -> BoundaryKey), (&end, BoundaryKey::Right)] {
        for (b, t) in hom.boundary() {
            if let BoundaryKey::Block(k) = b {
                boundary.insert(key(*k), t.clone());
            }
        }
    }
    let phi = StandardFormHom::new(HomParts {
        source: a.source().clone(),
        target: a.target().clone(),
        nu: e.nu,
        omega: e.omega,
        lambdas: pinned,
        boundary,
        unital: is_unital(a),
    })
    .map_err(|e| Error::PostconditionFailure(format!("assembled hom is invalid: {e}")))?;
    check_entourage(a, &phi, n - 3)?;
    Ok(phi)
}

/// Dispatches on the table's target.
pub fn lift(a: &MorphismTable) -> Result<StandardFormHom> {
    match a.target() {
        Target::Algebra(_) => lift_to_sia(a),
        _ => lift_to_matrix(a),
    }
}

/// Depth at which [`lift`] certifies its output.
pub fn certified_depth(a: &MorphismTable) -> u32 {
    match a.target() {
        Target::Algebra(_) => a.depth().saturating_sub(3),
        _ => a.depth(),
    }
}

/// Sandwich check used by tests: at `t`, the counts of eigenvalues above each `k/2^n`
/// match `z_{k/2^n}` evaluated in the projected algebra.
pub fn counts_match(z: &ZProfile, lambdas: &[EigenFunction], t: &Q) -> bool {
    z.values.iter().enumerate().all(|(k, zk)| {
        let level = Q::dyadic(k as u64, z.depth);
        let count = lambdas.iter().filter(|l| l.eval(t) > level).count() as u64;
        let want = match zk {
            CuElement::Scalar(v) => *v,
            CuElement::Rank(f) => f.folded(t),
            CuElement::Sum(_) => return false,
        };
        want == Fin(count)
    })
}
