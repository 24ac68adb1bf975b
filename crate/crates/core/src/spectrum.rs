//! The split-endpoint spectrum `{0_1..0_r} ∪ (0,1) ∪ {1_1..1_s}` and its open sets.
//!
//! Open sets are generated by `{0_i} ∪ (0,t)`, `(a,b)` and `(t,1) ∪ {1_j}`. Closed
//! sets need not be quasi-compact here: `(0,1/2]` is closed in the interior but only
//! becomes quasi-compact once a left tag is attached.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "ShapeRaw")]
pub struct Shape {
    pub m: u64,
    pub p: Vec<u64>,
    pub q: Vec<u64>,
}

#[derive(Deserialize)]
struct ShapeRaw {
    m: u64,
    p: Vec<u64>,
    q: Vec<u64>,
}

impl TryFrom<ShapeRaw> for Shape {
    type Error = Error;
    fn try_from(raw: ShapeRaw) -> Result<Shape> {
        Shape::new(raw.m, raw.p, raw.q)
    }
}

impl Shape {
    pub fn new(m: u64, p: Vec<u64>, q: Vec<u64>) -> Result<Shape> {
        if m == 0 {
            return Err(Error::InvalidShape("m must be positive".into()));
        }
        if p.is_empty() || q.is_empty() {
            return Err(Error::InvalidShape("need at least one block at each end".into()));
        }
        if p.iter().chain(&q).any(|&b| b == 0) {
            return Err(Error::InvalidShape("block sizes must be positive".into()));
        }
        let (p_sum, q_sum) = (p.iter().sum::<u64>(), q.iter().sum::<u64>());
        if p_sum != m || q_sum != m {
            return Err(Error::SumMismatch { m, p_sum, q_sum });
        }
        Ok(Shape { m, p, q })
    }

    /// `M_m(C[0,1])`, viewed as the shape with one full block at each end.
    pub fn interval(m: u64) -> Shape {
        Shape { m, p: vec![m], q: vec![m] }
    }

    pub fn r(&self) -> usize {
        self.p.len()
    }

    pub fn s(&self) -> usize {
        self.q.len()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{}{:?}{:?}", self.m, self.p, self.q)
    }
}

/// Tag indices are 0-based in memory and 1-based in text.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SpectrumPoint {
    Left(usize),
    Interior(Q),
    Right(usize),
}

impl SpectrumPoint {
    pub fn check(&self, shape: &Shape) -> Result<()> {
        match self {
            SpectrumPoint::Left(i) if *i >= shape.r() => {
                Err(Error::IndexOutOfRange(format!("left tag {} of {}", i + 1, shape.r())))
            }
            SpectrumPoint::Right(j) if *j >= shape.s() => {
                Err(Error::IndexOutOfRange(format!("right tag {} of {}", j + 1, shape.s())))
            }
            SpectrumPoint::Interior(t) if t.is_zero() || *t >= Q::one() || t.is_negative() => {
                Err(Error::IndexOutOfRange(format!("interior point {t} not in (0,1)")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SpectrumPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumPoint::Left(i) => write!(f, "0_{}", i + 1),
            SpectrumPoint::Interior(t) => write!(f, "{t}"),
            SpectrumPoint::Right(j) => write!(f, "1_{}", j + 1),
        }
    }
}

/// A finite union of open intervals of `(0,1)` plus endpoint tags.
///
/// Normalized on construction: intervals sorted, overlapping ones merged. Intervals
/// that merely touch at a point stay separate, since the point is not covered.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(try_from = "LevelSetRaw", into = "LevelSetRaw")]
pub struct LevelSet {
    left: BTreeSet<usize>,
    intervals: Vec<(Q, Q)>,
    right: BTreeSet<usize>,
}

#[derive(Serialize, Deserialize)]
struct LevelSetRaw {
    left: Vec<usize>,
    intervals: Vec<(Q, Q)>,
    right: Vec<usize>,
}

impl TryFrom<LevelSetRaw> for LevelSet {
    type Error = Error;
    fn try_from(raw: LevelSetRaw) -> Result<LevelSet> {
        let one_based = |v: Vec<usize>| -> Result<BTreeSet<usize>> {
            v.into_iter()
                .map(|i| i.checked_sub(1).ok_or_else(|| Error::IndexOutOfRange("tag 0".into())))
                .collect()
        };
        LevelSet::new(one_based(raw.left)?, raw.intervals, one_based(raw.right)?)
    }
}

impl From<LevelSet> for LevelSetRaw {
    fn from(u: LevelSet) -> LevelSetRaw {
        LevelSetRaw {
            left: u.left.iter().map(|i| i + 1).collect(),
            intervals: u.intervals,
            right: u.right.iter().map(|j| j + 1).collect(),
        }
    }
}

impl LevelSet {
    pub fn new(
        left: BTreeSet<usize>,
        mut intervals: Vec<(Q, Q)>,
        right: BTreeSet<usize>,
    ) -> Result<LevelSet> {
        for (a, b) in &intervals {
            if a.is_negative() || *b > Q::one() || a >= b {
                return Err(Error::NotOpen(format!("malformed interval ({a},{b})")));
            }
        }
        intervals.sort();
        let mut merged: Vec<(Q, Q)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a < last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        Ok(LevelSet { left, intervals: merged, right })
    }

    pub fn empty() -> LevelSet {
        LevelSet::default()
    }

    pub fn left(&self) -> &BTreeSet<usize> {
        &self.left
    }

    pub fn right(&self) -> &BTreeSet<usize> {
        &self.right
    }

    pub fn intervals(&self) -> &[(Q, Q)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty() && self.right.is_empty() && self.intervals.is_empty()
    }

    pub fn touches_zero(&self) -> bool {
        self.intervals.first().is_some_and(|(a, _)| a.is_zero())
    }

    pub fn touches_one(&self) -> bool {
        self.intervals.last().is_some_and(|(_, b)| b.is_one())
    }

    pub fn is_open(&self, shape: &Shape) -> bool {
        self.left.iter().all(|&i| i < shape.r())
            && self.right.iter().all(|&j| j < shape.s())
            && (self.left.is_empty() || self.touches_zero())
            && (self.right.is_empty() || self.touches_one())
    }

    pub fn contains(&self, x: &SpectrumPoint) -> bool {
        match x {
            SpectrumPoint::Left(i) => self.left.contains(i),
            SpectrumPoint::Right(j) => self.right.contains(j),
            SpectrumPoint::Interior(t) => self.intervals.iter().any(|(a, b)| a < t && t < b),
        }
    }

    /// Index of the component of `self` containing the interval `(a,b)`.
    pub fn component_containing(&self, a: &Q, b: &Q) -> Option<usize> {
        self.intervals.iter().position(|(c, d)| c <= a && b <= d)
    }

    pub fn is_subset(&self, other: &LevelSet) -> bool {
        self.left.is_subset(&other.left)
            && self.right.is_subset(&other.right)
            && self.intervals.iter().all(|(a, b)| other.component_containing(a, b).is_some())
    }
}

impl fmt::Display for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.left.is_empty() {
            let tags: Vec<String> = self.left.iter().map(|i| format!("0_{}", i + 1)).collect();
            parts.push(format!("{{{}}}", tags.join(",")));
        }
        parts.extend(self.intervals.iter().map(|(a, b)| format!("({a},{b})")));
        if !self.right.is_empty() {
            let tags: Vec<String> = self.right.iter().map(|j| format!("1_{}", j + 1)).collect();
            parts.push(format!("{{{}}}", tags.join(",")));
        }
        if parts.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{}", parts.join("∪"))
        }
    }
}

/// An interval piece of a quasi-compact set. `lo_closed = false` only occurs at 0 and
/// `hi_closed = false` only at 1, where an attached tag caps the open end.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Piece {
    pub lo: Q,
    pub lo_closed: bool,
    pub hi: Q,
    pub hi_closed: bool,
}

/// A quasi-compact subset of the spectrum, witnessing `U ⊆ K ⊆ V`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CompactSet {
    pub left: BTreeSet<usize>,
    pub pieces: Vec<Piece>,
    pub right: BTreeSet<usize>,
}

impl CompactSet {
    pub fn contains(&self, x: &SpectrumPoint) -> bool {
        match x {
            SpectrumPoint::Left(i) => self.left.contains(i),
            SpectrumPoint::Right(j) => self.right.contains(j),
            SpectrumPoint::Interior(t) => self.pieces.iter().any(|pc| {
                (if pc.lo_closed { &pc.lo <= t } else { &pc.lo < t })
                    && (if pc.hi_closed { t <= &pc.hi } else { t < &pc.hi })
            }),
        }
    }

    /// Every open end is capped by a tag, which is what quasi-compactness needs.
    pub fn is_capped(&self) -> bool {
        self.pieces.iter().all(|pc| {
            (pc.lo_closed || (pc.lo.is_zero() && !self.left.is_empty()))
                && (pc.hi_closed || (pc.hi.is_one() && !self.right.is_empty()))
        })
    }
}

impl fmt::Display for CompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.left.is_empty() {
            let tags: Vec<String> = self.left.iter().map(|i| format!("0_{}", i + 1)).collect();
            parts.push(format!("{{{}}}", tags.join(",")));
        }
        for pc in &self.pieces {
            parts.push(format!(
                "{}{},{}{}",
                if pc.lo_closed { '[' } else { '(' },
                pc.lo,
                pc.hi,
                if pc.hi_closed { ']' } else { ')' }
            ));
        }
        if !self.right.is_empty() {
            let tags: Vec<String> = self.right.iter().map(|j| format!("1_{}", j + 1)).collect();
            parts.push(format!("{{{}}}", tags.join(",")));
        }
        if parts.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{}", parts.join("∪"))
        }
    }
}

/// Why no quasi-compact `K` fits between `U` and `V`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CapFailure {
    NotContained,
    LeftEnd(Q),
    RightEnd(Q),
    NoLeftTag,
    NoRightTag,
}

impl fmt::Display for CapFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapFailure::NotContained => write!(f, "not contained"),
            CapFailure::LeftEnd(a) => write!(f, "uncapped left end at {a}"),
            CapFailure::RightEnd(b) => write!(f, "uncapped right end at {b}"),
            CapFailure::NoLeftTag => write!(f, "end at 0 has no left tag to cap it"),
            CapFailure::NoRightTag => write!(f, "end at 1 has no right tag to cap it"),
        }
    }
}

/// Decides whether some quasi-compact `K` satisfies `U ⊆ K ⊆ V`.
///
/// An interior end of a component of `U` is capped by closing it, which needs room
/// inside the surrounding component of `V`. An end at 0 or 1 cannot be closed in the
/// interior; it is capped by a tag of `V` instead.
pub fn compact_interpolant(u: &LevelSet, v: &LevelSet, shape: &Shape) -> Result<Option<CompactSet>> {
    Ok(cap_check(u, v, shape)?.ok())
}

pub fn cap_check(
    u: &LevelSet,
    v: &LevelSet,
    shape: &Shape,
) -> Result<std::result::Result<CompactSet, CapFailure>> {
    for (name, w) in [("U", u), ("V", v)] {
        if !w.is_open(shape) {
            return Err(Error::NotOpen(format!("{name} = {w}")));
        }
    }
    if !u.left.is_subset(&v.left) || !u.right.is_subset(&v.right) {
        return Ok(Err(CapFailure::NotContained));
    }
    let mut k = CompactSet { left: u.left.clone(), pieces: Vec::new(), right: u.right.clone() };
    for (a, b) in &u.intervals {
        let Some(c) = v.component_containing(a, b) else {
            return Ok(Err(CapFailure::NotContained));
        };
        let (c, d) = &v.intervals[c];
        let lo_closed = if a.is_zero() {
            match v.left.first() {
                None => return Ok(Err(CapFailure::NoLeftTag)),
                Some(&i) => {
                    if k.left.is_empty() {
                        k.left.insert(i);
                    }
                    false
                }
            }
        } else if c < a {
            true
        } else {
            return Ok(Err(CapFailure::LeftEnd(a.clone())));
        };
        let hi_closed = if b.is_one() {
            match v.right.first() {
                None => return Ok(Err(CapFailure::NoRightTag)),
                Some(&j) => {
                    if k.right.is_empty() {
                        k.right.insert(j);
                    }
                    false
                }
            }
        } else if b < d {
            true
        } else {
            return Ok(Err(CapFailure::RightEnd(b.clone())));
        };
        k.pieces.push(Piece { lo: a.clone(), lo_closed, hi: b.clone(), hi_closed });
    }
    Ok(Ok(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(left: &[usize], iv: &[(i64, i64, i64, i64)], right: &[usize]) -> LevelSet {
        LevelSet::new(
            left.iter().copied().collect(),
            iv.iter().map(|&(a, b, c, d)| (Q::new(a, b), Q::new(c, d))).collect(),
            right.iter().copied().collect(),
        )
        .unwrap()
    }

    fn shape2() -> Shape {
        Shape::new(2, vec![1, 1], vec![2]).unwrap()
    }

    #[test]
    fn shapes() {
        assert!(Shape::new(2, vec![1, 1], vec![2]).is_ok());
        assert!(Shape::new(1, vec![1], vec![1]).is_ok());
        assert!(matches!(Shape::new(2, vec![1, 1], vec![1]), Err(Error::SumMismatch { .. })));
        assert!(Shape::new(0, vec![], vec![]).is_err());
        let s: Shape = serde_json::from_str(r#"{"m":2,"p":[1,1],"q":[2]}"#).unwrap();
        assert_eq!(s, shape2());
        assert!(serde_json::from_str::<Shape>(r#"{"m":2,"p":[1],"q":[2]}"#).is_err());
    }

    #[test]
    fn openness() {
        let sh = shape2();
        assert!(set(&[0], &[(0, 1, 1, 2)], &[]).is_open(&sh));
        assert!(!set(&[0], &[], &[]).is_open(&sh));
        assert!(set(&[], &[(1, 4, 3, 4)], &[]).is_open(&sh));
        assert!(!set(&[], &[(1, 4, 3, 4)], &[0]).is_open(&sh));
        assert!(!set(&[2], &[(0, 1, 1, 2)], &[]).is_open(&sh));
    }

    #[test]
    fn normalization() {
        let a = set(&[], &[(1, 2, 3, 4), (1, 4, 5, 8)], &[]);
        assert_eq!(a.intervals(), &[(Q::new(1, 4), Q::new(3, 4))]);
        let b = set(&[], &[(1, 2, 3, 4), (1, 4, 1, 2)], &[]);
        assert_eq!(b.intervals().len(), 2);
        assert!(!b.contains(&SpectrumPoint::Interior(Q::new(1, 2))));
    }

    #[test]
    fn interpolants() {
        let sh = Shape::interval(1);
        let u = set(&[], &[(1, 2, 1, 1)], &[0]);
        let v = set(&[], &[(1, 4, 1, 1)], &[0]);
        let k = compact_interpolant(&u, &v, &sh).unwrap().unwrap();
        assert_eq!(k.to_string(), "[1/2,1)∪{1_1}");
        assert!(k.is_capped());

        let u = set(&[], &[(1, 4, 3, 4)], &[]);
        let v = set(&[], &[(1, 4, 7, 8)], &[]);
        assert_eq!(
            cap_check(&u, &v, &sh).unwrap(),
            Err(CapFailure::LeftEnd(Q::new(1, 4)))
        );

        let e = LevelSet::empty();
        assert_eq!(compact_interpolant(&e, &e, &sh).unwrap(), Some(CompactSet::default()));

        let bad = set(&[0], &[], &[]);
        assert!(matches!(compact_interpolant(&bad, &e, &sh), Err(Error::NotOpen(_))));
    }

    #[test]
    fn end_at_zero_needs_a_tag() {
        let sh = shape2();
        let u = set(&[], &[(0, 1, 1, 4)], &[]);
        let v = set(&[], &[(0, 1, 1, 2)], &[]);
        assert_eq!(cap_check(&u, &v, &sh).unwrap(), Err(CapFailure::NoLeftTag));
        let v = set(&[1], &[(0, 1, 1, 2)], &[]);
        let k = compact_interpolant(&u, &v, &sh).unwrap().unwrap();
        assert_eq!(k.left, [1].into_iter().collect());
        assert_eq!(k.to_string(), "{0_2}∪(0,1/4]");
    }

    fn dyadic_set(r: usize, s: usize) -> impl Strategy<Value = LevelSet> {
        (
            proptest::collection::vec(0u64..=8, 0..6),
            proptest::collection::btree_set(0..r, 0..=r),
            proptest::collection::btree_set(0..s, 0..=s),
        )
            .prop_map(|(mut pts, left, right)| {
                pts.sort();
                pts.dedup();
                let ivs: Vec<(Q, Q)> = pts
                    .chunks(2)
                    .filter(|c| c.len() == 2)
                    .map(|c| (Q::dyadic(c[0], 3), Q::dyadic(c[1], 3)))
                    .collect();
                let mut u = LevelSet::new(BTreeSet::new(), ivs, BTreeSet::new()).unwrap();
                if u.touches_zero() {
                    u.left = left;
                }
                if u.touches_one() {
                    u.right = right;
                }
                u
            })
    }

    proptest! {
        #[test]
        fn witness_is_sandwiched_and_capped(u in dyadic_set(2, 2), v in dyadic_set(2, 2)) {
            let sh = Shape::new(2, vec![1, 1], vec![1, 1]).unwrap();
            if let Some(k) = compact_interpolant(&u, &v, &sh).unwrap() {
                prop_assert!(k.is_capped());
                for j in 0..=64u64 {
                    let t = Q::dyadic(j, 6);
                    if t.is_zero() || t.is_one() { continue; }
                    let x = SpectrumPoint::Interior(t);
                    prop_assert!(!u.contains(&x) || k.contains(&x));
                    prop_assert!(!k.contains(&x) || v.contains(&x));
                }
                prop_assert!(u.left().iter().all(|i| k.left.contains(i)));
                prop_assert!(k.left.is_subset(v.left()) && k.right.is_subset(v.right()));
            }
        }

        #[test]
        fn monotone_in_v(u in dyadic_set(2, 2), v in dyadic_set(2, 2), w in dyadic_set(2, 2)) {
            let sh = Shape::new(2, vec![1, 1], vec![1, 1]).unwrap();
            let mut big = v.intervals().to_vec();
            big.extend(w.intervals().iter().cloned());
            let vv = LevelSet::new(
                v.left().union(w.left()).copied().collect(),
                big,
                v.right().union(w.right()).copied().collect(),
            ).unwrap();
            if compact_interpolant(&u, &v, &sh).unwrap().is_some() {
                prop_assert!(compact_interpolant(&u, &vv, &sh).unwrap().is_some());
            }
        }

        #[test]
        fn tags_absorb_small_neighbourhoods(a in 1u64..64, b in 1u64..64, i in 0usize..2) {
            prop_assume!(a < b);
            let sh = Shape::new(2, vec![1, 1], vec![2]).unwrap();
            let u = LevelSet::new([i].into(), vec![(Q::zero(), Q::dyadic(a, 6))], BTreeSet::new()).unwrap();
            let v = LevelSet::new([i].into(), vec![(Q::zero(), Q::dyadic(b, 6))], BTreeSet::new()).unwrap();
            prop_assert!(compact_interpolant(&u, &v, &sh).unwrap().is_some());
        }
    }
}
