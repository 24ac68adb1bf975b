//! The finite sets `F_n`, morphism tables on them, and the entourages `U_F`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cusemigroup::RankFunction;
use crate::element::{CuElement, Target};
use crate::error::{Error, Result};
use crate::extnat::Fin;
use crate::morphism::CuMap;
use crate::rational::Q;
use crate::spectrum::Shape;

/// `x_{i,j}` (0-based) or `y_{k/2^n}` at the depth of the surrounding set.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GeneratorKey {
    X(usize, usize),
    Y(u64),
}

impl fmt::Display for GeneratorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKey::X(i, j) => write!(f, "x_{}_{}", i + 1, j + 1),
            GeneratorKey::Y(k) => write!(f, "y_{k}"),
        }
    }
}

impl FromStr for GeneratorKey {
    type Err = Error;
    fn from_str(s: &str) -> Result<GeneratorKey> {
        let bad = || Error::Document(format!("bad generator key {s:?}"));
        let mut it = s.split('_');
        match (it.next(), it.next(), it.next(), it.next()) {
            (Some("x"), Some(i), Some(j), None) => {
                let i: usize = i.parse().map_err(|_| bad())?;
                let j: usize = j.parse().map_err(|_| bad())?;
                Ok(GeneratorKey::X(i.checked_sub(1).ok_or_else(bad)?, j.checked_sub(1).ok_or_else(bad)?))
            }
            (Some("y"), Some(k), None, None) => Ok(GeneratorKey::Y(k.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for GeneratorKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GeneratorKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<GeneratorKey, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl GeneratorKey {
    pub fn element(&self, shape: &Shape, depth: u32) -> Result<RankFunction> {
        match *self {
            GeneratorKey::X(i, j) => RankFunction::generator_x(shape, i, j),
            GeneratorKey::Y(k) if k <= 1 << depth => RankFunction::generator_y(shape, &Q::dyadic(k, depth)),
            GeneratorKey::Y(k) => Err(Error::IndexOutOfRange(format!("y_{k} at depth {depth}"))),
        }
    }

    /// All keys of `F_n`: every `x_{i,j}`, then `y_{k/2^n}` for `0 ≤ k ≤ 2^n`.
    pub fn all(shape: &Shape, depth: u32) -> Vec<GeneratorKey> {
        let mut keys = Vec::new();
        for i in 0..shape.r() {
            for j in 0..shape.s() {
                keys.push(GeneratorKey::X(i, j));
            }
        }
        keys.extend((0..=1u64 << depth).map(GeneratorKey::Y));
        keys
    }

    /// Recognises a generator of `F_depth` by its shape.
    pub fn identify(f: &RankFunction, depth: u32) -> Option<GeneratorKey> {
        let top = 1u64 << depth;
        if f.is_zero() {
            return Some(GeneratorKey::Y(top));
        }
        let unit_at = |v: &[crate::ExtNat]| -> Option<usize> {
            let ones: Vec<usize> = v.iter().enumerate().filter(|(_, x)| **x == Fin(1)).map(|(i, _)| i).collect();
            let zeros = v.iter().filter(|x| **x == Fin(0)).count();
            (ones.len() == 1 && zeros + 1 == v.len()).then(|| ones[0])
        };
        let j = unit_at(f.right())?;
        if f.interior_constant() == Some(Fin(1)) {
            if f.left().iter().all(|v| *v == Fin(0)) {
                return (j == 0).then_some(GeneratorKey::Y(0));
            }
            return unit_at(f.left()).map(|i| GeneratorKey::X(i, j));
        }
        if j != 0 || f.left().iter().any(|v| *v != Fin(0)) || f.breaks().len() != 3 {
            return None;
        }
        if f.intervals() != [Fin(0), Fin(1)] || f.points() != [Fin(0)] {
            return None;
        }
        let scaled = &f.breaks()[1] * &Q::dyadic(top, 0);
        let k = scaled.ceil_int();
        (Q::from_bigint(k.clone()) == scaled).then(|| GeneratorKey::Y(k.try_into().unwrap()))
    }
}

/// A finite subset of `Cu(A)` with its way-below pairs.
pub trait PairFamily {
    fn shape(&self) -> &Shape;
    fn elements(&self) -> &[RankFunction];
    fn pairs(&self) -> &[(usize, usize)];
}

#[derive(Clone, Debug)]
pub struct GeneratorSet {
    shape: Shape,
    depth: u32,
    keys: Vec<GeneratorKey>,
    elements: Vec<RankFunction>,
    wb_pairs: Vec<(usize, usize)>,
}

type Cache = Mutex<HashMap<(Shape, u32), Arc<GeneratorSet>>>;

impl GeneratorSet {
    /// `F_n`, with every way-below pair among its elements. Memoised per shape and depth.
    pub fn new(shape: &Shape, depth: u32) -> Arc<GeneratorSet> {
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(g) = cache.lock().unwrap().get(&(shape.clone(), depth)) {
            return g.clone();
        }
        let keys = GeneratorKey::all(shape, depth);
        let elements: Vec<RankFunction> =
            keys.iter().map(|k| k.element(shape, depth).expect("keys are in range")).collect();
        let mut wb_pairs = Vec::new();
        for (a, fa) in elements.iter().enumerate() {
            for (b, fb) in elements.iter().enumerate() {
                if fa.way_below(fb).expect("same shape") {
                    wb_pairs.push((a, b));
                }
            }
        }
        let g = Arc::new(GeneratorSet { shape: shape.clone(), depth, keys, elements, wb_pairs });
        cache.lock().unwrap().insert((shape.clone(), depth), g.clone());
        g
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn keys(&self) -> &[GeneratorKey] {
        &self.keys
    }

    pub fn index_of(&self, k: &GeneratorKey) -> Option<usize> {
        self.keys.iter().position(|x| x == k)
    }

    pub fn contains_pair(&self, a: &GeneratorKey, b: &GeneratorKey) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(a), Some(b)) => self.wb_pairs.contains(&(a, b)),
            _ => false,
        }
    }
}

impl PairFamily for GeneratorSet {
    fn shape(&self) -> &Shape {
        &self.shape
    }
    fn elements(&self) -> &[RankFunction] {
        &self.elements
    }
    fn pairs(&self) -> &[(usize, usize)] {
        &self.wb_pairs
    }
}

/// An explicit finite family with declared way-below pairs.
#[derive(Clone, Debug)]
pub struct FiniteFamily {
    shape: Shape,
    elements: Vec<RankFunction>,
    pairs: Vec<(usize, usize)>,
}

impl FiniteFamily {
    pub fn new(shape: &Shape, elements: Vec<RankFunction>, pairs: Vec<(usize, usize)>) -> Result<FiniteFamily> {
        for &(a, b) in &pairs {
            let (fa, fb) = match (elements.get(a), elements.get(b)) {
                (Some(x), Some(y)) => (x, y),
                _ => return Err(Error::IndexOutOfRange(format!("pair ({a},{b})"))),
            };
            if !fa.way_below(fb)? {
                return Err(Error::NotWayBelow(format!("{fa} vs {fb}")));
            }
        }
        Ok(FiniteFamily { shape: shape.clone(), elements, pairs })
    }

    pub fn union(&self, other: &FiniteFamily) -> FiniteFamily {
        let off = self.elements.len();
        let mut elements = self.elements.clone();
        elements.extend(other.elements.iter().cloned());
        let mut pairs = self.pairs.clone();
        pairs.extend(other.pairs.iter().map(|(a, b)| (a + off, b + off)));
        FiniteFamily { shape: self.shape.clone(), elements, pairs }
    }
}

impl PairFamily for FiniteFamily {
    fn shape(&self) -> &Shape {
        &self.shape
    }
    fn elements(&self) -> &[RankFunction] {
        &self.elements
    }
    fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// First way-below pair `(a,b)` of `F` where `α(a) ≤ β(b)` or `β(a) ≤ α(b)` fails.
pub fn entourage_failure(
    fam: &dyn PairFamily,
    alpha: &dyn CuMap,
    beta: &dyn CuMap,
) -> Result<Option<(usize, usize)>> {
    if alpha.source() != fam.shape() || beta.source() != fam.shape() {
        return Err(Error::DomainMismatch("maps are not defined on the family's algebra".into()));
    }
    let ta = alpha.target();
    if !targets_agree(&ta, &beta.target()) {
        return Err(Error::DomainMismatch(format!("targets {} and {} differ", ta, beta.target())));
    }
    let av: Vec<CuElement> = fam.elements().iter().map(|f| alpha.eval(f)).collect::<Result<_>>()?;
    let bv: Vec<CuElement> = fam.elements().iter().map(|f| beta.eval(f)).collect::<Result<_>>()?;
    for &(a, b) in fam.pairs() {
        if !av[a].leq(&bv[b])? || !bv[a].leq(&av[b])? {
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

fn targets_agree(a: &Target, b: &Target) -> bool {
    a == b
}

pub fn in_entourage(fam: &dyn PairFamily, alpha: &dyn CuMap, beta: &dyn CuMap) -> Result<bool> {
    Ok(entourage_failure(fam, alpha, beta)?.is_none())
}

/// A step function on `[0,1]` obtained by folding tag values into the endpoints; its
/// level sets are relatively open, listed as `(lo, contains_0, hi, contains_1)`.
pub(crate) fn folded_level(f: &RankFunction, c: u64) -> Vec<(Q, bool, Q, bool)> {
    let u = f.level_set(c);
    let with0 = f.left_sum() >= Fin(c);
    let with1 = f.right_sum() >= Fin(c);
    u.intervals()
        .iter()
        .map(|(a, b)| (a.clone(), with0 && a.is_zero(), b.clone(), with1 && b.is_one()))
        .collect()
}

/// Smallest `n` with a cell `[k/2^n, (k+1)/2^n]` inside `[x, y]`, and strictly below `y`
/// when `strict` is set.
fn depth_for_gap(x: &Q, y: &Q, strict: bool) -> Result<u32> {
    for n in 0..=256 {
        let scale = Q::one() / Q::dyadic(1, n);
        let k = Q::from_bigint((x * &scale).ceil_int());
        let upper = (k + Q::one()) / scale;
        if upper < *y || (!strict && upper == *y) {
            return Ok(n);
        }
    }
    Err(Error::PostconditionFailure(format!("no grid cell fits in [{x},{y}]")))
}

/// An `n` with `U_{F_n} ⊆ U_F`.
///
/// For a pair `a ≪ b` and a pair of standard-form morphisms in `U_{F_n}`, the tuples
/// agree and at each target point the eigenvalue counts interleave on the grid `k/2^n`.
/// Writing `α(a)` and `β(b)` as sums over the level sets of the folded functions `ã`,
/// `b̃`, each component `J` of `{b̃ ≥ c}` must contain the hull `I` of `{ã ≥ c} ∩ J`
/// with a full grid cell in each of the gaps at its free ends: `t ≤ k/2^n`,
/// `(k+1)/2^n ≤ s` on the left and strictly below the end of `J` on the right.
pub fn basis_index(fam: &FiniteFamily) -> Result<u32> {
    let mut n = 0;
    for &(ia, ib) in fam.pairs() {
        let (a, b) = (&fam.elements()[ia], &fam.elements()[ib]);
        if !a.way_below(b)? {
            return Err(Error::NotWayBelow(format!("{a} vs {b}")));
        }
        let top = a.max_value().finite().ok_or(Error::InfiniteValue)?;
        for c in 1..=top {
            let ac = folded_level(a, c);
            for (jlo, j0, jhi, j1) in folded_level(b, c) {
                let inside: Vec<&(Q, bool, Q, bool)> =
                    ac.iter().filter(|(lo, _, hi, _)| jlo <= *lo && *hi <= jhi).collect();
                if inside.is_empty() {
                    continue;
                }
                if !j0 {
                    n = n.max(depth_for_gap(&jlo, &inside[0].0, false)?);
                }
                if !j1 {
                    n = n.max(depth_for_gap(&inside[inside.len() - 1].2, &jhi, true)?);
                }
            }
        }
    }
    Ok(n)
}

/// A map `F_n → Cu(B)` together with the image of `[1_A]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "TableParts", into = "TableParts")]
pub struct MorphismTable {
    parts: TableParts,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TableParts {
    pub depth: u32,
    pub source: Shape,
    pub target: Target,
    pub values: BTreeMap<GeneratorKey, CuElement>,
    pub unit: CuElement,
}

impl TryFrom<TableParts> for MorphismTable {
    type Error = Error;
    fn try_from(p: TableParts) -> Result<MorphismTable> {
        MorphismTable::new(p)
    }
}

impl From<MorphismTable> for TableParts {
    fn from(t: MorphismTable) -> TableParts {
        t.parts
    }
}

impl MorphismTable {
    pub fn new(parts: TableParts) -> Result<MorphismTable> {
        let want = GeneratorKey::all(&parts.source, parts.depth);
        let have: Vec<GeneratorKey> = parts.values.keys().copied().collect();
        if want != have {
            return Err(Error::DomainMismatch(format!(
                "table at depth {} must list exactly {} generators, found {}",
                parts.depth,
                want.len(),
                have.len()
            )));
        }
        for (k, v) in parts.values.iter().map(|(k, v)| (k.to_string(), v)).chain([("one".to_string(), &parts.unit)]) {
            if !v.fits(&parts.target) {
                return Err(Error::DomainMismatch(format!("value at {k} is not in {}", parts.target)));
            }
        }
        Ok(MorphismTable { parts })
    }

    /// Evaluates a map on `F_n` and on `[1_A]`.
    pub fn tabulate(map: &dyn CuMap, depth: u32) -> Result<MorphismTable> {
        let source = map.source().clone();
        let mut values = BTreeMap::new();
        for k in GeneratorKey::all(&source, depth) {
            values.insert(k, map.eval(&k.element(&source, depth)?)?);
        }
        let unit = map.eval(&RankFunction::unit(&source))?;
        MorphismTable::new(TableParts { depth, source, target: map.target(), values, unit })
    }

    pub fn depth(&self) -> u32 {
        self.parts.depth
    }

    pub fn source(&self) -> &Shape {
        &self.parts.source
    }

    pub fn target(&self) -> &Target {
        &self.parts.target
    }

    pub fn unit(&self) -> &CuElement {
        &self.parts.unit
    }

    pub fn value(&self, k: &GeneratorKey) -> Option<&CuElement> {
        self.parts.values.get(k)
    }

    pub fn x(&self, i: usize, j: usize) -> &CuElement {
        &self.parts.values[&GeneratorKey::X(i, j)]
    }

    pub fn y(&self, k: u64) -> &CuElement {
        &self.parts.values[&GeneratorKey::Y(k)]
    }

    pub fn values(&self) -> &BTreeMap<GeneratorKey, CuElement> {
        &self.parts.values
    }

    pub fn parts(&self) -> &TableParts {
        &self.parts
    }

    /// The same map on `F_m`, `m ≤ n`.
    pub fn restrict(&self, m: u32) -> Result<MorphismTable> {
        if m > self.depth() {
            return Err(Error::DomainMismatch(format!("cannot refine depth {} to {m}", self.depth())));
        }
        let step = 1u64 << (self.depth() - m);
        let values = GeneratorKey::all(self.source(), m)
            .into_iter()
            .map(|k| {
                let src = match k {
                    GeneratorKey::Y(j) => GeneratorKey::Y(j * step),
                    x => x,
                };
                (k, self.parts.values[&src].clone())
            })
            .collect();
        MorphismTable::new(TableParts { depth: m, values, ..self.parts.clone() })
    }

    /// Post-composes every value with `f`, landing in `target`.
    pub fn map_values(&self, target: Target, f: impl Fn(&CuElement) -> Result<CuElement>) -> Result<MorphismTable> {
        let values = self.parts.values.iter().map(|(k, v)| Ok((*k, f(v)?))).collect::<Result<_>>()?;
        MorphismTable::new(TableParts {
            depth: self.depth(),
            source: self.source().clone(),
            target,
            values,
            unit: f(&self.parts.unit)?,
        })
    }
}

impl CuMap for MorphismTable {
    fn source(&self) -> &Shape {
        &self.parts.source
    }
    fn target(&self) -> Target {
        self.parts.target.clone()
    }
    fn eval(&self, f: &RankFunction) -> Result<CuElement> {
        if let Some(k) = GeneratorKey::identify(f, self.depth()) {
            if let Some(v) = self.parts.values.get(&k) {
                return Ok(v.clone());
            }
        }
        if *f == RankFunction::unit(self.source()) {
            return Ok(self.parts.unit.clone());
        }
        Err(Error::DomainMismatch(format!("{f} is not in the table's domain")))
    }
}
