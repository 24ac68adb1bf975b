//! Rank functions: lower semicontinuous `ℕ̄`-valued step functions on the spectrum.
//!
//! The boundary inequalities `f(0+) ≥ Σ f(0_i)` and `f(1−) ≥ Σ f(1_j)` encode that the
//! fibre at `0` is block diagonal with blocks of sizes `p_i`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extnat::{ExtNat, Fin};
use crate::rational::Q;
use crate::spectrum::{LevelSet, Shape, SpectrumPoint};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RankParts", into = "RankParts")]
pub struct RankFunction {
    shape: Shape,
    left: Vec<ExtNat>,
    breaks: Vec<Q>,
    intervals: Vec<ExtNat>,
    points: Vec<ExtNat>,
    right: Vec<ExtNat>,
}

/// Unvalidated rank-function data, as read from a document.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RankParts {
    pub shape: Shape,
    pub left: Vec<ExtNat>,
    pub breaks: Vec<Q>,
    pub intervals: Vec<ExtNat>,
    pub points: Vec<ExtNat>,
    pub right: Vec<ExtNat>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    Structure(String),
    Lsc { at: Q, point: ExtNat, neighbours: (ExtNat, ExtNat) },
    LeftBoundary { limit: ExtNat, tag_sum: ExtNat },
    RightBoundary { limit: ExtNat, tag_sum: ExtNat },
    Redundant { at: Q },
}

impl Violation {
    /// Redundant breakpoints are normalised away on load rather than rejected.
    pub fn is_fatal(&self) -> bool {
        !matches!(self, Violation::Redundant { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Structure(s) => write!(f, "malformed: {s}"),
            Violation::Lsc { at, point, neighbours } => write!(
                f,
                "not lower semicontinuous at {at}: value {point} exceeds min({}, {})",
                neighbours.0, neighbours.1
            ),
            Violation::LeftBoundary { limit, tag_sum } => write!(
                f,
                "left boundary: lim_(t->0) f(t) = {limit} < {tag_sum} = sum_i f(0_i)"
            ),
            Violation::RightBoundary { limit, tag_sum } => write!(
                f,
                "right boundary: lim_(t->1) f(t) = {limit} < {tag_sum} = sum_j f(1_j)"
            ),
            Violation::Redundant { at } => write!(f, "redundant breakpoint at {at}"),
        }
    }
}

pub fn validate_parts(x: &RankParts) -> Vec<Violation> {
    let mut out = Vec::new();
    let sh = &x.shape;
    if x.left.len() != sh.r() {
        out.push(Violation::Structure(format!("{} left values for r = {}", x.left.len(), sh.r())));
    }
    if x.right.len() != sh.s() {
        out.push(Violation::Structure(format!("{} right values for s = {}", x.right.len(), sh.s())));
    }
    let k = x.breaks.len();
    if k < 2 || !x.breaks[0].is_zero() || !x.breaks[k - 1].is_one() {
        out.push(Violation::Structure("breakpoints must run from 0 to 1".into()));
        return out;
    }
    if x.breaks.windows(2).any(|w| w[0] >= w[1]) {
        out.push(Violation::Structure("breakpoints must be strictly increasing".into()));
    }
    if x.intervals.len() != k - 1 {
        out.push(Violation::Structure(format!("{} interval values for {} cells", x.intervals.len(), k - 1)));
    }
    if x.points.len() != k - 2 {
        out.push(Violation::Structure(format!("{} point values for {} interior breakpoints", x.points.len(), k - 2)));
    }
    if !out.is_empty() {
        return out;
    }
    for (idx, p) in x.points.iter().enumerate() {
        let (a, b) = (x.intervals[idx], x.intervals[idx + 1]);
        if *p > a.min(b) {
            out.push(Violation::Lsc { at: x.breaks[idx + 1].clone(), point: *p, neighbours: (a, b) });
        } else if *p == a && a == b {
            out.push(Violation::Redundant { at: x.breaks[idx + 1].clone() });
        }
    }
    let lsum: ExtNat = x.left.iter().copied().sum();
    if x.intervals[0] < lsum {
        out.push(Violation::LeftBoundary { limit: x.intervals[0], tag_sum: lsum });
    }
    let rsum: ExtNat = x.right.iter().copied().sum();
    if x.intervals[k - 2] < rsum {
        out.push(Violation::RightBoundary { limit: x.intervals[k - 2], tag_sum: rsum });
    }
    out
}

impl TryFrom<RankParts> for RankFunction {
    type Error = Error;
    fn try_from(x: RankParts) -> Result<RankFunction> {
        RankFunction::from_parts(x)
    }
}

impl From<RankFunction> for RankParts {
    fn from(f: RankFunction) -> RankParts {
        RankParts {
            shape: f.shape,
            left: f.left,
            breaks: f.breaks,
            intervals: f.intervals,
            points: f.points,
            right: f.right,
        }
    }
}

/// Why `f ≪ g` fails.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WayBelowFailure {
    Infinite,
    Exceeds(SpectrumPoint),
    /// A component of `{f ≥ n}` starts at `a` exactly where `{g ≥ n}` does.
    UncappedLeftEnd(Q),
    UncappedRightEnd(Q),
    /// Near 0, `f` needs more levels than `g` has left tags to cap.
    LeftCapacity { need: ExtNat, have: ExtNat },
    RightCapacity { need: ExtNat, have: ExtNat },
}

impl fmt::Display for WayBelowFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WayBelowFailure::Infinite => write!(f, "left side takes the value inf"),
            WayBelowFailure::Exceeds(x) => write!(f, "not below at {x}"),
            WayBelowFailure::UncappedLeftEnd(a) => write!(f, "uncapped left end at {a}"),
            WayBelowFailure::UncappedRightEnd(b) => write!(f, "uncapped right end at {b}"),
            WayBelowFailure::LeftCapacity { need, have } => write!(
                f,
                "uncapped end at 0: limit {need} exceeds {have} = sum of left tag values"
            ),
            WayBelowFailure::RightCapacity { need, have } => write!(
                f,
                "uncapped end at 1: limit {need} exceeds {have} = sum of right tag values"
            ),
        }
    }
}

fn check_same(f: &RankFunction, g: &RankFunction) -> Result<()> {
    if f.shape != g.shape {
        return Err(Error::ShapeMismatch(format!("{} vs {}", f.shape, g.shape)));
    }
    Ok(())
}

/// Merged walk over the breakpoints of several functions: the common grid, and for
/// each function its values on the common cells and at the interior grid points.
struct Merged {
    grid: Vec<Q>,
    cells: Vec<Vec<ExtNat>>,
    points: Vec<Vec<ExtNat>>,
}

fn merge(fs: &[&RankFunction]) -> Merged {
    let k = fs.len();
    let mut at = vec![0usize; k];
    let mut grid = vec![Q::zero()];
    let mut cells = Vec::new();
    let mut points = Vec::new();
    loop {
        cells.push((0..k).map(|f| fs[f].intervals[at[f]]).collect());
        let next = (0..k).map(|f| &fs[f].breaks[at[f] + 1]).min().unwrap().clone();
        if next.is_one() {
            break;
        }
        let mut here = Vec::with_capacity(k);
        for f in 0..k {
            if fs[f].breaks[at[f] + 1] == next {
                here.push(fs[f].points[at[f]]);
                at[f] += 1;
            } else {
                here.push(fs[f].intervals[at[f]]);
            }
        }
        points.push(here);
        grid.push(next);
    }
    grid.push(Q::one());
    Merged { grid, cells, points }
}

impl RankFunction {
    pub fn from_parts(x: RankParts) -> Result<RankFunction> {
        let fatal: Vec<String> =
            validate_parts(&x).iter().filter(|v| v.is_fatal()).map(|v| v.to_string()).collect();
        if !fatal.is_empty() {
            return Err(Error::InvalidRankFunction(fatal));
        }
        let mut f = RankFunction {
            shape: x.shape,
            left: x.left,
            breaks: x.breaks,
            intervals: x.intervals,
            points: x.points,
            right: x.right,
        };
        f.canonicalize();
        Ok(f)
    }

    /// Builds from a grid of values and then checks the invariants.
    fn build(
        shape: &Shape,
        left: Vec<ExtNat>,
        breaks: Vec<Q>,
        intervals: Vec<ExtNat>,
        points: Vec<ExtNat>,
        right: Vec<ExtNat>,
    ) -> Result<RankFunction> {
        RankFunction::from_parts(RankParts { shape: shape.clone(), left, breaks, intervals, points, right })
    }

    fn canonicalize(&mut self) {
        let mut keep = vec![true; self.breaks.len()];
        for idx in 0..self.points.len() {
            let p = self.points[idx];
            if p == self.intervals[idx] && p == self.intervals[idx + 1] {
                keep[idx + 1] = false;
            }
        }
        if keep.iter().all(|&k| k) {
            return;
        }
        let mut breaks = vec![self.breaks[0].clone()];
        let mut intervals = vec![self.intervals[0]];
        let mut points = Vec::new();
        for idx in 1..self.breaks.len() - 1 {
            if keep[idx] {
                breaks.push(self.breaks[idx].clone());
                points.push(self.points[idx - 1]);
                intervals.push(self.intervals[idx]);
            }
        }
        breaks.push(Q::one());
        self.breaks = breaks;
        self.intervals = intervals;
        self.points = points;
    }

    pub fn parts(&self) -> RankParts {
        self.clone().into()
    }

    pub fn zero(shape: &Shape) -> RankFunction {
        RankFunction::constant_with_tags(shape, Fin(0), vec![Fin(0); shape.r()], vec![Fin(0); shape.s()])
    }

    /// `[1_A]`: interior rank `m`, tag values the block sizes.
    pub fn unit(shape: &Shape) -> RankFunction {
        RankFunction::constant_with_tags(
            shape,
            Fin(shape.m),
            shape.p.iter().map(|&p| Fin(p)).collect(),
            shape.q.iter().map(|&q| Fin(q)).collect(),
        )
    }

    fn constant_with_tags(shape: &Shape, c: ExtNat, left: Vec<ExtNat>, right: Vec<ExtNat>) -> RankFunction {
        RankFunction {
            shape: shape.clone(),
            left,
            breaks: vec![Q::zero(), Q::one()],
            intervals: vec![c],
            points: vec![],
            right,
        }
    }

    /// The compact element with interior value `c` and the given tag values.
    pub fn compact(shape: &Shape, left: Vec<u64>, c: u64, right: Vec<u64>) -> Result<RankFunction> {
        RankFunction::build(
            shape,
            left.into_iter().map(Fin).collect(),
            vec![Q::zero(), Q::one()],
            vec![Fin(c)],
            vec![],
            right.into_iter().map(Fin).collect(),
        )
    }

    pub fn indicator(shape: &Shape, u: &LevelSet) -> Result<RankFunction> {
        if !u.is_open(shape) {
            return Err(Error::NotOpen(u.to_string()));
        }
        let mut breaks = vec![Q::zero()];
        for (a, b) in u.intervals() {
            breaks.push(a.clone());
            breaks.push(b.clone());
        }
        breaks.push(Q::one());
        breaks.sort();
        breaks.dedup();
        let inside = |t: &Q| u.contains(&SpectrumPoint::Interior(t.clone()));
        let ind = |b: bool| if b { Fin(1) } else { Fin(0) };
        let intervals = breaks.windows(2).map(|w| ind(inside(&w[0].midpoint(&w[1])))).collect();
        let points = breaks[1..breaks.len() - 1].iter().map(|t| ind(inside(t))).collect();
        RankFunction::build(
            shape,
            (0..shape.r()).map(|i| ind(u.left().contains(&i))).collect(),
            breaks,
            intervals,
            points,
            (0..shape.s()).map(|j| ind(u.right().contains(&j))).collect(),
        )
    }

    /// `x_{i,j}`, indicator of `{0_i} ∪ (0,1) ∪ {1_j}` (0-based indices).
    pub fn generator_x(shape: &Shape, i: usize, j: usize) -> Result<RankFunction> {
        SpectrumPoint::Left(i).check(shape)?;
        SpectrumPoint::Right(j).check(shape)?;
        let mut left = vec![0; shape.r()];
        let mut right = vec![0; shape.s()];
        left[i] = 1;
        right[j] = 1;
        RankFunction::compact(shape, left, 1, right)
    }

    /// `y_t`, indicator of `(t,1) ∪ {1_1}`; `y_1 = 0`.
    pub fn generator_y(shape: &Shape, t: &Q) -> Result<RankFunction> {
        if !t.in_unit() {
            return Err(Error::IndexOutOfRange(format!("y_t needs 0 <= t <= 1, got {t}")));
        }
        if t.is_one() {
            return Ok(RankFunction::zero(shape));
        }
        let u = LevelSet::new(BTreeSet::new(), vec![(t.clone(), Q::one())], [0].into())?;
        RankFunction::indicator(shape, &u)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn left(&self) -> &[ExtNat] {
        &self.left
    }

    pub fn right(&self) -> &[ExtNat] {
        &self.right
    }

    pub fn breaks(&self) -> &[Q] {
        &self.breaks
    }

    pub fn intervals(&self) -> &[ExtNat] {
        &self.intervals
    }

    pub fn points(&self) -> &[ExtNat] {
        &self.points
    }

    pub fn left_sum(&self) -> ExtNat {
        self.left.iter().copied().sum()
    }

    pub fn right_sum(&self) -> ExtNat {
        self.right.iter().copied().sum()
    }

    /// Value on the first open cell, i.e. `lim_{t→0} f(t)`.
    pub fn limit_at_zero(&self) -> ExtNat {
        self.intervals[0]
    }

    pub fn limit_at_one(&self) -> ExtNat {
        *self.intervals.last().unwrap()
    }

    pub fn is_finite(&self) -> bool {
        self.left.iter().chain(&self.right).chain(&self.intervals).all(|v| v.is_finite())
    }

    pub fn max_value(&self) -> ExtNat {
        self.left.iter().chain(&self.right).chain(&self.intervals).copied().max().unwrap_or(Fin(0))
    }

    pub fn is_zero(&self) -> bool {
        self.max_value() == Fin(0)
    }

    /// If `f` is constant on `(0,1)`, that constant.
    pub fn interior_constant(&self) -> Option<ExtNat> {
        (self.intervals.len() == 1).then(|| self.intervals[0])
    }

    /// Value at an interior `t ∈ (0,1)`.
    pub fn at(&self, t: &Q) -> ExtNat {
        match self.breaks.binary_search(t) {
            Ok(idx) => self.points[idx - 1],
            Err(idx) => self.intervals[idx - 1],
        }
    }

    /// `f` as a function on `[0,1]` with the tags folded in: `f̃(0) = Σ f(0_i)`.
    pub fn folded(&self, u: &Q) -> ExtNat {
        if u.is_zero() {
            self.left_sum()
        } else if u.is_one() {
            self.right_sum()
        } else {
            self.at(u)
        }
    }

    pub fn value_at(&self, x: &SpectrumPoint) -> Result<ExtNat> {
        x.check(&self.shape)?;
        Ok(match x {
            SpectrumPoint::Left(i) => self.left[*i],
            SpectrumPoint::Right(j) => self.right[*j],
            SpectrumPoint::Interior(t) => self.at(t),
        })
    }

    /// Pointwise combination on the merged grid.
    pub fn zip_with(fs: &[&RankFunction], op: impl Fn(&[ExtNat]) -> ExtNat) -> Result<RankFunction> {
        let first = fs.first().ok_or_else(|| Error::ShapeMismatch("empty family".into()))?;
        for f in fs {
            check_same(first, f)?;
        }
        let m = merge(fs);
        let intervals = m.cells.iter().map(|v| op(v)).collect();
        let points = m.points.iter().map(|v| op(v)).collect();
        let sample = |look: &dyn Fn(&RankFunction) -> ExtNat| -> ExtNat {
            let vals: Vec<ExtNat> = fs.iter().map(|f| look(f)).collect();
            op(&vals)
        };
        let left = (0..first.shape.r()).map(|i| sample(&|f: &RankFunction| f.left[i])).collect();
        let right = (0..first.shape.s()).map(|j| sample(&|f: &RankFunction| f.right[j])).collect();
        RankFunction::build(&first.shape, left, m.grid, intervals, points, right)
    }

    pub fn add(&self, g: &RankFunction) -> Result<RankFunction> {
        RankFunction::zip_with(&[self, g], |v| v[0] + v[1])
    }

    pub fn sum(shape: &Shape, fs: &[RankFunction]) -> Result<RankFunction> {
        let mut acc = RankFunction::zero(shape);
        for f in fs {
            acc = acc.add(f)?;
        }
        Ok(acc)
    }

    pub fn scale(&self, k: u64) -> RankFunction {
        RankFunction::zip_with(&[self], |v| v[0].scale(k)).expect("scaling preserves invariants")
    }

    /// Guarded pointwise `f − g`; `NegativeRank` on underflow or `∞ − ∞`.
    pub fn checked_sub(&self, g: &RankFunction) -> Result<RankFunction> {
        check_same(self, g)?;
        let bad = std::cell::Cell::new(false);
        let out = RankFunction::zip_with(&[self, g], |v| {
            v[0].checked_sub(v[1]).unwrap_or_else(|| {
                bad.set(true);
                Fin(0)
            })
        });
        if bad.get() {
            return Err(Error::NegativeRank("pointwise subtraction underflows".into()));
        }
        out.map_err(|e| Error::NegativeRank(format!("difference is not a rank function: {e}")))
    }

    /// Pointwise maximum. Errors when the maximum breaks a boundary inequality, which
    /// can happen for incomparable families; chains are always fine.
    pub fn pointwise_sup(fs: &[RankFunction]) -> Result<RankFunction> {
        let refs: Vec<&RankFunction> = fs.iter().collect();
        RankFunction::zip_with(&refs, |v| v.iter().copied().max().unwrap())
    }

    /// First point of the merged grid where `f > g`, if any.
    pub fn exceeds_at(&self, g: &RankFunction) -> Result<Option<SpectrumPoint>> {
        check_same(self, g)?;
        for i in 0..self.shape.r() {
            if self.left[i] > g.left[i] {
                return Ok(Some(SpectrumPoint::Left(i)));
            }
        }
        for j in 0..self.shape.s() {
            if self.right[j] > g.right[j] {
                return Ok(Some(SpectrumPoint::Right(j)));
            }
        }
        let m = merge(&[self, g]);
        for (c, v) in m.cells.iter().enumerate() {
            if v[0] > v[1] {
                return Ok(Some(SpectrumPoint::Interior(m.grid[c].midpoint(&m.grid[c + 1]))));
            }
            if let Some(p) = m.points.get(c) {
                if p[0] > p[1] {
                    return Ok(Some(SpectrumPoint::Interior(m.grid[c + 1].clone())));
                }
            }
        }
        Ok(None)
    }

    pub fn leq(&self, g: &RankFunction) -> Result<bool> {
        Ok(self.exceeds_at(g)?.is_none())
    }

    /// `{f ≥ n}` for `n ≥ 1`.
    pub fn level_set(&self, n: u64) -> LevelSet {
        let ge = |v: ExtNat| v >= Fin(n);
        let mut ivs: Vec<(Q, Q)> = Vec::new();
        let mut open: Option<Q> = None;
        let cells = self.intervals.len();
        for c in 0..cells {
            if ge(self.intervals[c]) {
                if open.is_none() {
                    open = Some(self.breaks[c].clone());
                }
            } else if let Some(a) = open.take() {
                ivs.push((a, self.breaks[c].clone()));
            }
            let closes = c + 1 == cells || !ge(self.points[c]);
            if closes {
                if let Some(a) = open.take() {
                    ivs.push((a, self.breaks[c + 1].clone()));
                }
            }
        }
        let left = (0..self.shape.r()).filter(|&i| ge(self.left[i])).collect();
        let right = (0..self.shape.s()).filter(|&j| ge(self.right[j])).collect();
        LevelSet::new(left, ivs, right).expect("level sets of rank functions are well formed")
    }

    /// Decides `f ≪ g`, returning the first obstruction found.
    ///
    /// `f ≪ g` iff `f` is finite, the upper envelope of `f` stays below `g` at every
    /// interior point, tag values are dominated, and near each end `f` uses no more
    /// levels than the tags of `g` can cap: `f(0+) ≤ Σ g(0_i)` and `f(1−) ≤ Σ g(1_j)`.
    pub fn way_below_failure(&self, g: &RankFunction) -> Result<Option<WayBelowFailure>> {
        check_same(self, g)?;
        if !self.is_finite() {
            return Ok(Some(WayBelowFailure::Infinite));
        }
        if let Some(x) = self.exceeds_at(g)? {
            return Ok(Some(WayBelowFailure::Exceeds(x)));
        }
        for (k, b) in self.breaks.iter().enumerate().skip(1).take(self.breaks.len().saturating_sub(2)) {
            let gb = g.at(b);
            if self.intervals[k] > gb {
                return Ok(Some(WayBelowFailure::UncappedLeftEnd(b.clone())));
            }
            if self.intervals[k - 1] > gb {
                return Ok(Some(WayBelowFailure::UncappedRightEnd(b.clone())));
            }
        }
        let (need, have) = (self.limit_at_zero(), g.left_sum());
        if need > have {
            return Ok(Some(WayBelowFailure::LeftCapacity { need, have }));
        }
        let (need, have) = (self.limit_at_one(), g.right_sum());
        if need > have {
            return Ok(Some(WayBelowFailure::RightCapacity { need, have }));
        }
        Ok(None)
    }

    pub fn way_below(&self, g: &RankFunction) -> Result<bool> {
        Ok(self.way_below_failure(g)?.is_none())
    }

    pub fn is_compact(&self) -> bool {
        self.way_below(self).expect("same shape")
    }

    /// Strands `V_n = {t_n} ∪ U_n ∪ {t'_n}` with `U_n = {f > n−1} ∩ (0,1)` and
    /// `Σ 𝟙_{V_n} = f`. Tags go to the lowest levels, `0_1` first.
    pub fn decompose(&self) -> Result<Vec<LevelSet>> {
        if !self.is_finite() {
            return Err(Error::InfiniteValue);
        }
        let top = self.intervals.iter().filter_map(|v| v.finite()).max().unwrap_or(0);
        let spread = |vals: &[ExtNat]| -> Vec<usize> {
            vals.iter()
                .enumerate()
                .flat_map(|(i, v)| std::iter::repeat_n(i, v.finite().unwrap() as usize))
                .collect()
        };
        let (ltags, rtags) = (spread(&self.left), spread(&self.right));
        let mut out = Vec::with_capacity(top as usize);
        for n in 1..=top {
            let level = self.level_set(n);
            let idx = (n - 1) as usize;
            let left: BTreeSet<usize> = ltags.get(idx).copied().into_iter().collect();
            let right: BTreeSet<usize> = rtags.get(idx).copied().into_iter().collect();
            out.push(LevelSet::new(left, level.intervals().to_vec(), right)?);
        }
        Ok(out)
    }

    /// The `k`-th member of the canonical `≪`-chain with supremum `f`: every strand end
    /// not carrying a tag moves inward by `len / 2^k`.
    pub fn shrink(&self, k: u32) -> Result<RankFunction> {
        let strands = self.decompose()?;
        let mut acc = RankFunction::zero(&self.shape);
        for v in strands {
            let mut ivs = Vec::new();
            for (a, b) in v.intervals() {
                let off = (b - a) * Q::dyadic(1, k);
                let lo = if a.is_zero() && !v.left().is_empty() { a.clone() } else { a + &off };
                let hi = if b.is_one() && !v.right().is_empty() { b.clone() } else { b - &off };
                if lo < hi {
                    ivs.push((lo, hi));
                }
            }
            let touches0 = ivs.first().is_some_and(|(a, _): &(Q, Q)| a.is_zero());
            let touches1 = ivs.last().is_some_and(|(_, b): &(Q, Q)| b.is_one());
            let w = LevelSet::new(
                if touches0 { v.left().clone() } else { BTreeSet::new() },
                ivs,
                if touches1 { v.right().clone() } else { BTreeSet::new() },
            )?;
            acc = acc.add(&RankFunction::indicator(&self.shape, &w)?)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for RankFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags = |v: &[ExtNat]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "[{}] ", tags(&self.left))?;
        for (k, v) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, " |{}:{}| ", self.breaks[k], self.points[k - 1])?;
            }
            write!(f, "{v}")?;
        }
        write!(f, " [{}]", tags(&self.right))
    }
}
