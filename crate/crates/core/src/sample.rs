//! Random shapes, rank functions, homomorphisms and towers for tests and fixtures.
//!
//! Homomorphisms are generated first and their targets read off: the irreducible
//! representations making up the endpoint values are dealt into blocks at random.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cusemigroup::{RankFunction, RankParts};
use crate::element::Target;
use crate::error::Result;
use crate::extnat::{ExtNat, Fin};
use crate::morphism::{BoundaryKey, HomParts, PointTuple, StandardFormHom};
use crate::pl::EigenFunction;
use crate::rational::Q;
use crate::spectrum::Shape;
use crate::tower::{Connect, Tower};

/// A composition of `total` into `parts` positive summands.
pub fn composition<R: Rng>(rng: &mut R, total: u64, parts: usize) -> Vec<u64> {
    let mut cuts: Vec<u64> = (1..total).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<u64> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain([total]) {
        out.push(c - prev);
        prev = c;
    }
    out
}

pub fn shape<R: Rng>(rng: &mut R, max_m: u64, max_tags: usize) -> Shape {
    let m = rng.gen_range(1..=max_m);
    let cap = max_tags.min(m as usize);
    let r = rng.gen_range(1..=cap);
    let s = rng.gen_range(1..=cap);
    Shape::new(m, composition(rng, m, r), composition(rng, m, s)).expect("compositions sum to m")
}

/// Lowers entries until they sum to at most `cap`.
fn squeeze<R: Rng>(rng: &mut R, mut v: Vec<u64>, cap: u64) -> Vec<u64> {
    while v.iter().sum::<u64>() > cap {
        let i = rng.gen_range(0..v.len());
        v[i] = v[i].saturating_sub(1);
    }
    v
}

/// A finite rank function with breakpoints on the grid `k/2^grid` and values `≤ max`.
pub fn rank_function<R: Rng>(rng: &mut R, shape: &Shape, grid: u32, max: u64) -> RankFunction {
    let n = 1u64 << grid;
    let mut breaks = vec![Q::zero()];
    for k in 1..n {
        if rng.gen_bool(0.4) {
            breaks.push(Q::dyadic(k, grid));
        }
    }
    breaks.push(Q::one());
    let intervals: Vec<u64> = (0..breaks.len() - 1).map(|_| rng.gen_range(0..=max)).collect();
    let points = intervals.windows(2).map(|w| rng.gen_range(0..=w[0].min(w[1]))).collect::<Vec<_>>();
    let left: Vec<u64> = (0..shape.r()).map(|_| rng.gen_range(0..=max)).collect();
    let left = squeeze(rng, left, intervals[0]);
    let right: Vec<u64> = (0..shape.s()).map(|_| rng.gen_range(0..=max)).collect();
    let right = squeeze(rng, right, intervals[intervals.len() - 1]);
    let fin = |v: Vec<u64>| v.into_iter().map(Fin).collect::<Vec<ExtNat>>();
    RankFunction::from_parts(RankParts {
        shape: shape.clone(),
        left: fin(left),
        breaks,
        intervals: fin(intervals),
        points: fin(points),
        right: fin(right),
    })
    .expect("generated parts satisfy the boundary inequalities")
}

/// Piecewise linear with nodes at `k/4` and values on the grid `k/16`; the ends are
/// sometimes pinned to 0 or 1.
pub fn eigen_function<R: Rng>(rng: &mut R) -> EigenFunction {
    let mut vals: Vec<Q> = (0..5).map(|_| Q::dyadic(rng.gen_range(0..=16), 4)).collect();
    for end in [0, 4] {
        match rng.gen_range(0..6) {
            0 => vals[end] = Q::zero(),
            1 => vals[end] = Q::one(),
            _ => {}
        }
    }
    EigenFunction::new(vals.into_iter().enumerate().map(|(k, v)| (Q::dyadic(k as u64, 2), v)).collect())
        .expect("nodes increase")
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TargetKind {
    Matrix,
    MatrixSum,
    Algebra,
}

#[derive(Clone, Copy, Debug)]
enum Irreducible {
    Left(usize),
    Right(usize),
    Point(usize),
}

/// Deals the irreducible summands of `t` into between 1 and `max_blocks` blocks.
fn deal<R: Rng>(rng: &mut R, source: &Shape, t: &PointTuple, max_blocks: usize) -> Vec<PointTuple> {
    let e = t.expand();
    let mut irr = Vec::new();
    for (i, n) in e.nu.iter().enumerate() {
        irr.extend(std::iter::repeat_n(Irreducible::Left(i), *n as usize));
    }
    for (j, n) in e.omega.iter().enumerate() {
        irr.extend(std::iter::repeat_n(Irreducible::Right(j), *n as usize));
    }
    irr.extend((0..e.lambdas.len()).map(Irreducible::Point));
    irr.shuffle(rng);
    let k = rng.gen_range(1..=max_blocks.min(irr.len()).max(1));
    let sizes = composition(rng, irr.len() as u64, k);
    let mut out = Vec::new();
    let mut it = irr.into_iter();
    for size in sizes {
        let mut b = PointTuple::zero(source);
        for x in it.by_ref().take(size as usize) {
            match x {
                Irreducible::Left(i) => b.nu[i] += 1,
                Irreducible::Right(j) => b.omega[j] += 1,
                Irreducible::Point(l) => b.lambdas.push(e.lambdas[l].clone()),
            }
        }
        b.lambdas.sort();
        out.push(b.normalize());
    }
    out
}

/// A random standard-form hom out of `source`, with a target built to fit it. Units are
/// preserved unless `unital` is false, in which case a zero block pads each end.
pub fn hom<R: Rng>(rng: &mut R, source: &Shape, kind: TargetKind, max_mu: usize, unital: bool) -> Result<StandardFormHom> {
    let mut nu: Vec<u64> = (0..source.r()).map(|_| rng.gen_range(0..=1)).collect();
    let mut omega: Vec<u64> = (0..source.s()).map(|_| rng.gen_range(0..=1)).collect();
    nu[rng.gen_range(0..source.r())] = 0;
    omega[rng.gen_range(0..source.s())] = 0;
    let mu = rng.gen_range(1..=max_mu.max(1));
    let lambdas: Vec<EigenFunction> = match kind {
        TargetKind::Algebra => EigenFunction::sort_pointwise(&(0..mu).map(|_| eigen_function(rng)).collect::<Vec<_>>()),
        _ => {
            let mut v: Vec<Q> = (0..mu).map(|_| eigen_function(rng).at_zero()).collect();
            v.sort();
            v.into_iter().map(EigenFunction::constant).collect()
        }
    };
    let pad = if unital { 0 } else { rng.gen_range(1..=2) };
    let at = |end_one: bool| PointTuple {
        nu: nu.clone(),
        omega: omega.clone(),
        lambdas: lambdas.iter().map(|l| if end_one { l.at_one() } else { l.at_zero() }).collect(),
    };
    let mut boundary = BTreeMap::new();
    let target = match kind {
        TargetKind::Matrix => Target::Matrix(at(false).dim(source) + pad),
        TargetKind::MatrixSum => {
            let mut blocks = deal(rng, source, &at(false), 3);
            if pad > 0 {
                blocks.push(PointTuple::zero(source));
            }
            let mut sizes: Vec<u64> = blocks.iter().map(|b| b.dim(source)).collect();
            if pad > 0 {
                *sizes.last_mut().unwrap() = pad;
            }
            for (k, b) in blocks.into_iter().enumerate() {
                boundary.insert(BoundaryKey::Block(k), b);
            }
            Target::matrix_sum(&sizes)
        }
        TargetKind::Algebra => {
            let mut sizes = [vec![], vec![]];
            for (side, key) in [(false, BoundaryKey::Left as fn(usize) -> BoundaryKey), (true, BoundaryKey::Right)] {
                let mut blocks = deal(rng, source, &at(side), 3);
                if pad > 0 {
                    blocks.push(PointTuple::zero(source));
                }
                let s = &mut sizes[side as usize];
                for (k, b) in blocks.into_iter().enumerate() {
                    s.push(b.dim(source));
                    boundary.insert(key(k), b);
                }
                if pad > 0 {
                    *s.last_mut().unwrap() = pad;
                }
            }
            let m = at(false).dim(source) + pad;
            let [p, q] = sizes;
            Target::Algebra(Shape::new(m, p, q)?)
        }
    };
    StandardFormHom::new(HomParts { source: source.clone(), target, nu, omega, lambdas, boundary, unital })
}

/// Moves the interior nodes of every eigenvalue function by at most `eps`, keeping the
/// endpoint values, so the result has the same source, target and boundary data.
pub fn perturb<R: Rng>(rng: &mut R, phi: &StandardFormHom, eps_exp: u32) -> Result<StandardFormHom> {
    let mut p = phi.parts().clone();
    if !matches!(p.target, Target::Algebra(_)) {
        return Ok(phi.clone());
    }
    let scale = 1u64 << 3;
    let moved: Vec<EigenFunction> = p
        .lambdas
        .iter()
        .map(|l| {
            let mut nodes = vec![(Q::zero(), l.at_zero())];
            for k in 1..scale {
                let t = Q::dyadic(k, 3);
                let shift = Q::dyadic(rng.gen_range(0..=4), eps_exp + 1) - Q::dyadic(1, eps_exp);
                let v = (l.eval(&t) + shift).max(Q::zero()).min(Q::one());
                nodes.push((t, v));
            }
            nodes.push((Q::one(), l.at_one()));
            EigenFunction::new(nodes).expect("nodes increase")
        })
        .collect();
    p.lambdas = EigenFunction::sort_pointwise(&moved);
    StandardFormHom::new(p)
}

/// A unital tower with `stages` stages. Each summand after the first stage is the
/// target of exactly one connecting map, generated with a fitted target.
pub fn tower<R: Rng>(rng: &mut R, first: &[Shape], stages: usize, max_mu: usize) -> Result<Tower> {
    let mut shapes = vec![first.to_vec()];
    let mut connects = Vec::new();
    for _ in 1..stages {
        let here = shapes.last().unwrap().clone();
        let width = rng.gen_range(1..=2);
        let mut layer = Vec::new();
        let mut next = Vec::new();
        for l in 0..width {
            let from = if l < here.len() { l } else { rng.gen_range(0..here.len()) };
            let h = hom(rng, &here[from], TargetKind::Algebra, max_mu, true)?;
            let Target::Algebra(t) = h.target().clone() else { unreachable!() };
            layer.push(Connect { from, to: l, corner: h.dim(), hom: h });
            next.push(t);
        }
        shapes.push(next);
        connects.push(layer);
    }
    Tower::unital(shapes, connects)
}

/// A tower together with a unital map from `source` into its first stage; the
/// first-stage summands are the fitted targets of the map's components.
pub fn tower_with_map<R: Rng>(
    rng: &mut R,
    source: &Shape,
    width: usize,
    stages: usize,
    max_mu: usize,
) -> Result<(Tower, Vec<StandardFormHom>)> {
    let mut homs = Vec::new();
    let mut first = Vec::new();
    for _ in 0..width {
        let h = hom(rng, source, TargetKind::Algebra, max_mu, true)?;
        let Target::Algebra(t) = h.target().clone() else { unreachable!() };
        first.push(t);
        homs.push(h);
    }
    Ok((tower(rng, &first, stages, max_mu)?, homs))
}
