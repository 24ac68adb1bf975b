//! Finite inductive systems of direct sums of splitting interval algebras, and
//! approximate intertwining against a morphism into their limit.
//!
//! The limit is never built. An element of the limit is a stage-tagged representative,
//! and comparisons in the limit are semidecisions: a witness stage or a negative answer
//! valid for this finite prefix only.

use serde::{Deserialize, Serialize};

use crate::element::{CuElement, Target};
use crate::entourage::{in_entourage, GeneratorSet, MorphismTable};
use crate::error::{Error, Result};
use crate::lifting::{check_conditions, lift_to_sia};
use crate::morphism::{eigen_pattern_distance, CuMorphism, PatternDistance, StandardFormHom};
use crate::rational::Q;
use crate::spectrum::Shape;

/// `hom` maps summand `from` of one stage into a corner of size `corner` of summand `to`
/// of the next.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Connect {
    pub from: usize,
    pub to: usize,
    pub hom: StandardFormHom,
    pub corner: u64,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TowerParts {
    pub stages: Vec<Vec<Shape>>,
    pub connects: Vec<Vec<Connect>>,
    pub distinguished: Vec<CuElement>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "TowerParts", into = "TowerParts")]
pub struct Tower {
    parts: TowerParts,
}

impl TryFrom<TowerParts> for Tower {
    type Error = Error;
    fn try_from(p: TowerParts) -> Result<Tower> {
        Tower::new(p)
    }
}

impl From<Tower> for TowerParts {
    fn from(t: Tower) -> TowerParts {
        t.parts
    }
}

impl Tower {
    pub fn new(parts: TowerParts) -> Result<Tower> {
        let bad = |s: String| Err(Error::InvalidTower(s));
        let n = parts.stages.len();
        if n == 0 {
            return bad("a tower needs at least one stage".into());
        }
        if parts.connects.len() + 1 != n || parts.distinguished.len() != n {
            return bad(format!(
                "{n} stages need {} connecting layers and {n} distinguished classes, got {} and {}",
                n - 1,
                parts.connects.len(),
                parts.distinguished.len()
            ));
        }
        for (i, layer) in parts.connects.iter().enumerate() {
            let (here, next) = (&parts.stages[i], &parts.stages[i + 1]);
            for c in layer {
                if c.from >= here.len() || c.to >= next.len() {
                    return bad(format!("stage {i}: connect {} -> {} is out of range", c.from, c.to));
                }
                if c.hom.source() != &here[c.from] || *c.hom.target() != Target::Algebra(next[c.to].clone()) {
                    return bad(format!("stage {i}: connect {} -> {} has the wrong source or target", c.from, c.to));
                }
                if c.corner != c.hom.dim() {
                    return bad(format!("stage {i}: corner {} but the map fills {}", c.corner, c.hom.dim()));
                }
            }
            for (l, shape) in next.iter().enumerate() {
                let into: Vec<&Connect> = layer.iter().filter(|c| c.to == l).collect();
                let total: u64 = into.iter().map(|c| c.corner).sum();
                if total > shape.m {
                    return bad(format!("stage {}: corners into summand {l} fill {total} > {}", i + 1, shape.m));
                }
                for (k, size) in shape.p.iter().enumerate() {
                    let key = crate::morphism::BoundaryKey::Left(k);
                    let used: u64 = into.iter().map(|c| c.hom.boundary()[&key].dim(c.hom.source())).sum();
                    if used > *size {
                        return bad(format!("stage {}: blocks at {key} of summand {l} overfilled", i + 1));
                    }
                }
                for (k, size) in shape.q.iter().enumerate() {
                    let key = crate::morphism::BoundaryKey::Right(k);
                    let used: u64 = into.iter().map(|c| c.hom.boundary()[&key].dim(c.hom.source())).sum();
                    if used > *size {
                        return bad(format!("stage {}: blocks at {key} of summand {l} overfilled", i + 1));
                    }
                }
            }
        }
        let t = Tower { parts };
        for i in 0..n {
            if !t.parts.distinguished[i].fits(&t.stage_target(i)) {
                return bad(format!("distinguished class of stage {i} is not in {}", t.stage_target(i)));
            }
            if i + 1 < n && !t.push_step(i, &t.parts.distinguished[i])?.leq(&t.parts.distinguished[i + 1])? {
                return bad(format!("distinguished class of stage {i} does not push below that of stage {}", i + 1));
            }
        }
        Ok(t)
    }

    /// A tower whose distinguished classes are the units.
    pub fn unital(stages: Vec<Vec<Shape>>, connects: Vec<Vec<Connect>>) -> Result<Tower> {
        let distinguished =
            stages.iter().map(|s| CuElement::unit(&Target::algebra_sum(s))).collect();
        Tower::new(TowerParts { stages, connects, distinguished })
    }

    pub fn stage_count(&self) -> usize {
        self.parts.stages.len()
    }

    pub fn stage(&self, i: usize) -> &[Shape] {
        &self.parts.stages[i]
    }

    pub fn stage_target(&self, i: usize) -> Target {
        Target::algebra_sum(&self.parts.stages[i])
    }

    pub fn distinguished(&self, i: usize) -> &CuElement {
        &self.parts.distinguished[i]
    }

    pub fn parts(&self) -> &TowerParts {
        &self.parts
    }

    fn check_stages(&self, i: usize, j: usize) -> Result<()> {
        if i > j || j >= self.stage_count() {
            return Err(Error::StageOutOfRange(format!("cannot push from stage {i} to stage {j} of {}", self.stage_count())));
        }
        Ok(())
    }

    fn push_step(&self, i: usize, e: &CuElement) -> Result<CuElement> {
        let parts = e.components().ok_or_else(|| Error::ShapeMismatch(format!("{e} is not a stage element")))?;
        let next = &self.parts.stages[i + 1];
        let mut out: Vec<CuElement> = next.iter().map(|s| CuElement::zero(&Target::Algebra(s.clone()))).collect();
        for c in &self.parts.connects[i] {
            let f = parts[c.from].as_rank().ok_or_else(|| Error::ShapeMismatch("stage summands are rank functions".into()))?;
            out[c.to] = out[c.to].add(&c.hom.apply(f)?)?;
        }
        Ok(CuElement::Sum(out))
    }

    /// `Cu(ρ_{i,j})(e)`.
    pub fn push_forward(&self, e: &CuElement, i: usize, j: usize) -> Result<CuElement> {
        self.check_stages(i, j)?;
        if !e.fits(&self.stage_target(i)) {
            return Err(Error::ShapeMismatch(format!("{e} is not in stage {i}")));
        }
        let mut cur = e.clone();
        for k in i..j {
            cur = self.push_step(k, &cur)?;
        }
        Ok(cur)
    }

    /// Composes a map into stage `i`, given summand by summand, with `ρ_{i,j}`.
    pub fn push_homs(&self, homs: &[StandardFormHom], i: usize, j: usize) -> Result<Vec<StandardFormHom>> {
        self.check_stages(i, j)?;
        let mut cur = homs.to_vec();
        for k in i..j {
            let source = cur.first().map(|h| h.source().clone());
            let source = source.ok_or_else(|| Error::ShapeMismatch("no summands".into()))?;
            let mut next = Vec::new();
            for (l, shape) in self.parts.stages[k + 1].iter().enumerate() {
                let target = Target::Algebra(shape.clone());
                let pieces = self.parts.connects[k]
                    .iter()
                    .filter(|c| c.to == l)
                    .map(|c| StandardFormHom::compose(&cur[c.from], &c.hom))
                    .collect::<Result<Vec<_>>>()?;
                next.push(StandardFormHom::orthogonal_sum(&source, &target, &pieces)?);
            }
            cur = next;
        }
        Ok(cur)
    }

    pub fn push_table(&self, t: &MorphismTable, i: usize, j: usize) -> Result<MorphismTable> {
        if *t.target() != self.stage_target(i) {
            return Err(Error::DomainMismatch(format!("table lands in {}, not stage {i}", t.target())));
        }
        t.map_values(self.stage_target(j), |e| self.push_forward(e, i, j))
    }
}

/// A representative, at some stage, of an element of the limit.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LimitElement {
    pub stage: usize,
    pub value: CuElement,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub holds: bool,
    pub stage: Option<usize>,
}

fn scan(t: &Tower, x: &LimitElement, y: &LimitElement) -> Result<Witness> {
    let start = x.stage.max(y.stage);
    for j in start..t.stage_count() {
        if t.push_forward(&x.value, x.stage, j)?.leq(&t.push_forward(&y.value, y.stage, j)?)? {
            return Ok(Witness { holds: true, stage: Some(j) });
        }
    }
    Ok(Witness { holds: false, stage: None })
}

/// For compact `x`: `x ≤ y` in the limit iff the pushes compare at some stage.
pub fn limit_leq_compact(t: &Tower, x: &LimitElement, y: &LimitElement) -> Result<Witness> {
    if !x.value.is_compact() {
        return Err(Error::Precondition(format!("{} is not compact", x.value)));
    }
    scan(t, x, y)
}

/// For `x′ ≪ x ≤ y` in the limit, some stage has `push(x′) ≤ push(y)`.
pub fn limit_way_below_check(t: &Tower, xp: &LimitElement, x: &LimitElement, y: &LimitElement) -> Result<Witness> {
    let j = xp.stage.max(x.stage);
    if !t.push_forward(&xp.value, xp.stage, j)?.way_below(&t.push_forward(&x.value, x.stage, j)?)? {
        return Err(Error::NotWayBelow(format!("{} vs {}", xp.value, x.value)));
    }
    scan(t, xp, y)
}

/// A table on `F_d` with values declared at one stage.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StagedTable {
    pub stage: usize,
    pub table: MorphismTable,
}

/// A morphism into the limit, presented by staged tables at increasing depths.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AlphaFamily {
    pub source: Shape,
    pub tables: Vec<StagedTable>,
}

impl AlphaFamily {
    /// The table of smallest depth `≥ d`, restricted to `F_d`.
    pub fn at_depth(&self, d: u32) -> Result<StagedTable> {
        let best = self
            .tables
            .iter()
            .filter(|s| s.table.depth() >= d)
            .min_by_key(|s| s.table.depth())
            .ok_or_else(|| Error::Precondition(format!("the family has no table of depth {d} or more")))?;
        Ok(StagedTable { stage: best.stage, table: best.table.restrict(d)? })
    }

    /// The family of a map into stage `stage`, pushed to the stages given per depth.
    pub fn from_homs(t: &Tower, homs: &[StandardFormHom], stage: usize, placement: &[(u32, usize)]) -> Result<AlphaFamily> {
        let source = homs.first().ok_or_else(|| Error::Precondition("no summands".into()))?.source().clone();
        let mut tables = Vec::new();
        for &(d, s) in placement {
            let pushed = t.push_homs(homs, stage, s)?;
            let map = CuMorphism::Summands(source.clone(), pushed.into_iter().map(CuMorphism::Induced).collect());
            tables.push(StagedTable { stage: s, table: MorphismTable::tabulate(&map, d)? });
        }
        Ok(AlphaFamily { source, tables })
    }
}

fn summands(source: &Shape, homs: &[StandardFormHom]) -> CuMorphism {
    CuMorphism::Summands(source.clone(), homs.iter().cloned().map(CuMorphism::Induced).collect())
}

fn component_table(t: &MorphismTable, l: usize, shape: &Shape) -> Result<MorphismTable> {
    t.map_values(Target::Algebra(shape.clone()), |e| {
        e.components()
            .and_then(|c| c.get(l))
            .cloned()
            .ok_or_else(|| Error::ShapeMismatch(format!("{e} has no summand {}", l + 1)))
    })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TowerLift {
    pub stage: usize,
    pub homs: Vec<StandardFormHom>,
    /// The input table pushed to `stage`.
    pub table: MorphismTable,
    pub entourage_depth: u32,
}

/// Pushes the table forward until every summand satisfies the lifting hypotheses, then
/// lifts summand by summand. The result is certified on `F_{d−3}`.
pub fn lift_through_tower(t: &Tower, staged: &StagedTable) -> Result<TowerLift> {
    let (s, table) = (staged.stage, &staged.table);
    let d = table.depth();
    if s >= t.stage_count() {
        return Err(Error::StageOutOfRange(format!("stage {s} of a tower with {} stages", t.stage_count())));
    }
    if d < 4 {
        return Err(Error::DepthTooSmall { needed: 4, got: d });
    }
    let unit = LimitElement { stage: s, value: table.unit().clone() };
    let dist = LimitElement { stage: s, value: t.distinguished(s).clone() };
    if !scan(t, &unit, &dist)?.holds {
        return Err(Error::Precondition("the image of the unit is not below the distinguished class".into()));
    }
    let mut last_failure = String::new();
    for k in s..t.stage_count() {
        let pushed = t.push_table(table, s, k)?;
        let pieces: Vec<MorphismTable> = t
            .stage(k)
            .iter()
            .enumerate()
            .map(|(l, shape)| component_table(&pushed, l, shape))
            .collect::<Result<_>>()?;
        let failure = pieces.iter().enumerate().find_map(|(l, p)| {
            check_conditions(p).first_failure().map(|c| {
                format!("summand {}: ({}) at {}", l + 1, c.condition, c.witness.as_deref().unwrap_or("?"))
            })
        });
        if let Some(f) = failure {
            last_failure = format!("stage {k}, {f}");
            continue;
        }
        let homs = pieces.iter().map(lift_to_sia).collect::<Result<Vec<_>>>()?;
        let depth = d - 3;
        let fam = GeneratorSet::new(table.source(), depth);
        if !in_entourage(fam.as_ref(), &pushed.restrict(depth)?, &summands(table.source(), &homs))? {
            return Err(Error::PostconditionFailure(format!("stage lift is not in the entourage of F_{depth}")));
        }
        return Ok(TowerLift { stage: k, homs, table: pushed, entourage_depth: depth });
    }
    Err(Error::StageExhausted(format!("relations never descend; last failure: {last_failure}")))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ChainCheck {
    pub depth: u32,
    pub holds: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: u32,
    pub stage: usize,
    pub homs: Vec<StandardFormHom>,
    /// `α` on `F_n`, at `stage`.
    pub table: MorphismTable,
    pub entourage: bool,
    /// Against the previous level, both pushed to the later stage.
    pub chain: Option<ChainCheck>,
    pub distance: Option<PatternDistance>,
    pub within_bound: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct IntertwiningCertificate {
    pub depth: u32,
    pub source: Shape,
    pub levels: Vec<LevelRecord>,
}

/// `1/2^{n−2}`.
pub fn gap_bound(n: u32) -> Q {
    match n {
        0 => Q::int(4),
        1 => Q::int(2),
        _ => Q::dyadic(1, n - 2),
    }
}

pub fn combined_distance(a: &[StandardFormHom], b: &[StandardFormHom]) -> Result<PatternDistance> {
    let mut out = PatternDistance { tuples_equal: true, max_gap: Some(Q::zero()) };
    for (x, y) in a.iter().zip(b) {
        let d = eigen_pattern_distance(x, y)?;
        out.tuples_equal &= d.tuples_equal;
        out.max_gap = match (out.max_gap, d.max_gap) {
            (Some(g), Some(h)) => Some(g.max(h)),
            _ => None,
        };
    }
    Ok(out)
}

/// Chain check and pattern distance between consecutive levels.
fn compare_levels(t: &Tower, source: &Shape, prev: &LevelRecord, n: u32, stage: usize, homs: &[StandardFormHom]) -> Result<(ChainCheck, PatternDistance, usize)> {
    let common = prev.stage.max(stage);
    let a = t.push_homs(&prev.homs, prev.stage, common)?;
    let b = t.push_homs(homs, stage, common)?;
    let depth = n.saturating_sub(1);
    let fam = GeneratorSet::new(source, depth);
    let holds = in_entourage(fam.as_ref(), &summands(source, &a), &summands(source, &b))?;
    Ok((ChainCheck { depth, holds }, combined_distance(&a, &b)?, common))
}

fn tables_agree(t: &Tower, a: &StagedTable, b: &StagedTable) -> Result<bool> {
    let d = a.table.depth().min(b.table.depth());
    let (ra, rb) = (a.table.restrict(d)?, b.table.restrict(d)?);
    for j in a.stage.max(b.stage)..t.stage_count() {
        if t.push_table(&ra, a.stage, j)? == t.push_table(&rb, b.stage, j)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Levels `1..=N`: at level `n` a stage lift of `α` on `F_{n+3}`, certified on `F_n`,
/// checked against level `n − 1` on `F_{n−1}` and by pattern distance.
pub fn intertwine(t: &Tower, fam: &AlphaFamily, big_n: u32) -> Result<IntertwiningCertificate> {
    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut prev_table: Option<StagedTable> = None;
    for n in 1..=big_n {
        let staged = fam.at_depth(n + 3)?;
        if let Some(p) = &prev_table {
            if !tables_agree(t, p, &staged)? {
                return Err(Error::InconsistentFamily {
                    depth: n + 3,
                    reason: format!("the table of depth {} disagrees with depth {} at every stage", n + 3, n + 2),
                });
            }
        }
        let lift = lift_through_tower(t, &staged)?;
        let (chain, distance) = match levels.last() {
            Some(prev) => {
                let (c, d, _) = compare_levels(t, &fam.source, prev, n, lift.stage, &lift.homs)?;
                if !c.holds {
                    return Err(Error::PostconditionFailure(format!("levels {} and {n} fail the chain law", n - 1)));
                }
                (Some(c), Some(d))
            }
            None => (None, None),
        };
        let within_bound = distance.as_ref().is_none_or(|d| {
            d.tuples_equal && d.max_gap.as_ref().is_some_and(|g| *g <= gap_bound(n))
        });
        levels.push(LevelRecord {
            n,
            stage: lift.stage,
            table: lift.table.restrict(n)?,
            homs: lift.homs,
            entourage: true,
            chain,
            distance,
            within_bound,
        });
        prev_table = Some(staged);
    }
    Ok(IntertwiningCertificate { depth: big_n, source: fam.source.clone(), levels })
}

/// Recomputes every check of a certificate from the tower and the family.
pub fn verify_certificate(t: &Tower, fam: &AlphaFamily, cert: &IntertwiningCertificate) -> Result<()> {
    let fail = |s: String| Err(Error::PostconditionFailure(s));
    if cert.levels.len() != cert.depth as usize || cert.source != fam.source {
        return fail("certificate does not cover levels 1..=N of this family".into());
    }
    for (idx, rec) in cert.levels.iter().enumerate() {
        let n = idx as u32 + 1;
        if rec.n != n {
            return fail(format!("record {idx} is labelled level {}", rec.n));
        }
        let staged = fam.at_depth(n + 3)?;
        if rec.stage < staged.stage || rec.stage >= t.stage_count() {
            return fail(format!("level {n}: stage {} is not reachable from {}", rec.stage, staged.stage));
        }
        if t.push_table(&staged.table.restrict(n)?, staged.stage, rec.stage)? != rec.table {
            return fail(format!("level {n}: recorded table is not the family's"));
        }
        if rec.homs.len() != t.stage(rec.stage).len()
            || rec.homs.iter().zip(t.stage(rec.stage)).any(|(h, s)| *h.target() != Target::Algebra(s.clone()) || h.source() != &fam.source)
        {
            return fail(format!("level {n}: maps do not land in the summands of stage {}", rec.stage));
        }
        let set = GeneratorSet::new(&fam.source, n);
        let ok = in_entourage(set.as_ref(), &rec.table, &summands(&fam.source, &rec.homs))?;
        if !ok || !rec.entourage {
            return fail(format!("level {n}: entourage check fails"));
        }
        match (idx.checked_sub(1).map(|i| &cert.levels[i]), &rec.chain, &rec.distance) {
            (None, None, None) => {}
            (Some(prev), Some(chain), Some(dist)) => {
                let (c, d, _) = compare_levels(t, &fam.source, prev, n, rec.stage, &rec.homs)?;
                if c != *chain || !c.holds || d != *dist {
                    return fail(format!("level {n}: recorded comparison with level {} does not recompute", n - 1));
                }
            }
            _ => return fail(format!("level {n}: comparison records are missing or spurious")),
        }
        let within = rec.distance.as_ref().is_none_or(|d| {
            d.tuples_equal && d.max_gap.as_ref().is_some_and(|g| *g <= gap_bound(n))
        });
        if within != rec.within_bound || !within {
            return fail(format!("level {n}: pattern gap exceeds 1/2^(n-2)"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cusemigroup::RankFunction;
    use crate::extnat::Fin;
    use crate::morphism::{BoundaryKey, HomParts, PointTuple};
    use crate::pl::EigenFunction;
    use std::collections::BTreeMap;

    fn src() -> Shape {
        Shape::new(2, vec![1, 1], vec![2]).unwrap()
    }

    /// `ν = (1,0), ω = (0), λ = id` into `M_3(C[0,1])`.
    fn phi0() -> StandardFormHom {
        let mut boundary = BTreeMap::new();
        boundary.insert(BoundaryKey::Left(0), PointTuple { nu: vec![1, 0], omega: vec![0], lambdas: vec![Q::zero()] }.normalize());
        boundary.insert(BoundaryKey::Right(0), PointTuple { nu: vec![1, 0], omega: vec![0], lambdas: vec![Q::one()] }.normalize());
        StandardFormHom::new(HomParts {
            source: src(),
            target: Target::Algebra(Shape::interval(3)),
            nu: vec![1, 0],
            omega: vec![0],
            lambdas: vec![EigenFunction::identity()],
            boundary,
            unital: true,
        })
        .unwrap()
    }

    /// `f ↦ diag(f, f(1/2))` from `M_3(C[0,1])` to `M_6(C[0,1])`.
    fn doubling() -> StandardFormHom {
        let mut boundary = BTreeMap::new();
        boundary.insert(BoundaryKey::Left(0), PointTuple { nu: vec![0], omega: vec![0], lambdas: vec![Q::zero(), Q::new(1, 2)] });
        boundary.insert(BoundaryKey::Right(0), PointTuple { nu: vec![0], omega: vec![0], lambdas: vec![Q::new(1, 2), Q::one()] });
        StandardFormHom::new(HomParts {
            source: Shape::interval(3),
            target: Target::Algebra(Shape::interval(6)),
            nu: vec![0],
            omega: vec![0],
            lambdas: EigenFunction::sort_pointwise(&[EigenFunction::identity(), EigenFunction::constant(Q::new(1, 2))]),
            boundary,
            unital: true,
        })
        .unwrap()
    }

    fn tower() -> Tower {
        let c = doubling();
        Tower::unital(
            vec![vec![Shape::interval(3)], vec![Shape::interval(6)]],
            vec![vec![Connect { from: 0, to: 0, corner: 6, hom: c }]],
        )
        .unwrap()
    }

    #[test]
    fn push_forward_examples() {
        let t = tower();
        let e = CuElement::Sum(vec![CuElement::Rank(RankFunction::unit(&Shape::interval(3)))]);
        assert_eq!(t.push_forward(&e, 0, 0).unwrap(), e);
        let pushed = t.push_forward(&e, 0, 1).unwrap();
        assert_eq!(pushed, CuElement::unit(&t.stage_target(1)));
        assert!(matches!(t.push_forward(&e, 1, 0), Err(Error::StageOutOfRange(_))));
    }

    #[test]
    fn pushed_homs_induce_pushed_maps() {
        let t = tower();
        let homs = t.push_homs(&[phi0()], 0, 1).unwrap();
        for k in crate::entourage::GeneratorKey::all(&src(), 2) {
            let f = k.element(&src(), 2).unwrap();
            let direct = CuElement::Sum(vec![phi0().apply(&f).unwrap()]);
            assert_eq!(CuElement::Sum(vec![homs[0].apply(&f).unwrap()]), t.push_forward(&direct, 0, 1).unwrap());
        }
    }

    #[test]
    fn limit_comparisons() {
        let t = tower();
        let s = Shape::interval(3);
        let el = |f: RankFunction, stage| LimitElement { stage, value: CuElement::Sum(vec![CuElement::Rank(f)]) };
        let zero = el(RankFunction::zero(&s), 0);
        let one = el(RankFunction::unit(&s), 0);
        assert_eq!(limit_leq_compact(&t, &zero, &one).unwrap(), Witness { holds: true, stage: Some(0) });
        assert_eq!(limit_leq_compact(&t, &one, &zero).unwrap(), Witness { holds: false, stage: None });
        let y = |q: Q| RankFunction::generator_y(&s, &q).unwrap();
        let w = limit_way_below_check(&t, &el(y(Q::new(1, 2)), 0), &el(y(Q::new(1, 4)), 0), &el(y(Q::new(1, 4)), 0));
        assert_eq!(w.unwrap(), Witness { holds: true, stage: Some(0) });
        let disjoint = el(RankFunction::compact(&s, vec![0], 0, vec![0]).unwrap(), 0);
        assert!(!limit_way_below_check(&t, &el(y(Q::new(1, 2)), 0), &el(y(Q::new(1, 4)), 0), &disjoint).unwrap().holds);
        assert!(matches!(
            limit_way_below_check(&t, &el(y(Q::new(1, 4)), 0), &el(y(Q::new(1, 2)), 0), &one),
            Err(Error::NotWayBelow(_))
        ));
    }

    #[test]
    fn single_stage_reduces_to_lift() {
        let t = Tower::unital(vec![vec![Shape::interval(3)]], vec![]).unwrap();
        let a = MorphismTable::tabulate(&summands(&src(), &[phi0()]), 5).unwrap();
        let lift = lift_through_tower(&t, &StagedTable { stage: 0, table: a.clone() }).unwrap();
        let direct = lift_to_sia(&component_table(&a, 0, &Shape::interval(3)).unwrap()).unwrap();
        assert_eq!(lift.homs, vec![direct]);
        assert_eq!(lift.entourage_depth, 2);
    }

    #[test]
    fn unit_above_distinguished_is_rejected() {
        let mut p = tower().parts().clone();
        p.distinguished = vec![CuElement::Sum(vec![CuElement::Rank(RankFunction::zero(&Shape::interval(3)))]), CuElement::unit(&Target::algebra_sum(&[Shape::interval(6)]))];
        let t = Tower::new(p).unwrap();
        let a = MorphismTable::tabulate(&summands(&src(), &[phi0()]), 4).unwrap();
        assert!(matches!(lift_through_tower(&t, &StagedTable { stage: 0, table: a }), Err(Error::Precondition(_))));
    }

    #[test]
    fn genuine_intertwining() {
        let t = tower();
        let fam = AlphaFamily::from_homs(&t, &[phi0()], 0, &[(4, 0), (5, 1), (6, 0), (7, 1)]).unwrap();
        assert!(intertwine(&t, &fam, 0).unwrap().levels.is_empty());
        let cert = intertwine(&t, &fam, 4).unwrap();
        verify_certificate(&t, &fam, &cert).unwrap();
        for rec in &cert.levels {
            let genuine = t.push_homs(&[phi0()], 0, rec.stage).unwrap();
            let d = combined_distance(&rec.homs, &genuine).unwrap();
            assert!(d.tuples_equal);
            assert!(d.max_gap.unwrap() <= Q::dyadic(1, rec.n + 1));
        }
        let mut forged = cert.clone();
        forged.levels[2].within_bound = false;
        assert!(verify_certificate(&t, &fam, &forged).is_err());
    }

    #[test]
    fn inconsistent_family_is_rejected() {
        let t = tower();
        let mut fam = AlphaFamily::from_homs(&t, &[phi0()], 0, &[(4, 0), (5, 0)]).unwrap();
        let other = phi0().parts().clone();
        let mut other = other;
        other.nu = vec![0, 1];
        for tup in other.boundary.values_mut() {
            tup.nu = vec![0, 1];
        }
        let psi = StandardFormHom::new(other).unwrap();
        fam.tables[1].table = MorphismTable::tabulate(&summands(&src(), &[psi]), 5).unwrap();
        assert!(matches!(intertwine(&t, &fam, 2), Err(Error::InconsistentFamily { depth: 5, .. })));
    }

    #[test]
    fn tower_validation() {
        let mut p = tower().parts().clone();
        p.connects[0][0].corner = 5;
        assert!(matches!(Tower::new(p), Err(Error::InvalidTower(_))));
        let mut p = tower().parts().clone();
        let dup = p.connects[0][0].clone();
        p.connects[0].push(dup);
        assert!(matches!(Tower::new(p), Err(Error::InvalidTower(_))));
        let text = serde_json::to_string(&tower()).unwrap();
        assert_eq!(serde_json::from_str::<Tower>(&text).unwrap(), tower());
        assert_eq!(Fin(6), tower().distinguished(1).components().unwrap()[0].as_rank().unwrap().max_value());
    }
}
