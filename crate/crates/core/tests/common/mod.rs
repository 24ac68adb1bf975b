//! Independent oracles. Nothing here calls the library's order relations: rank
//! functions are read from their raw parts and compared on a fine sample grid.

use cusp_core::cusemigroup::RankFunction;
use cusp_core::extnat::ExtNat;
use cusp_core::Q;

/// Sample grid `i / 2^GRID`; every breakpoint in the suites lies on `k/8`, and the
/// shrunk ends of the oracle lie on `1/2^(3+SHRINK)`, so `GRID = 4 + SHRINK` also
/// samples strictly between consecutive breakpoints.
pub const SHRINK: u32 = 6;
pub const GRID: u32 = 4 + SHRINK;

/// A finite rank function sampled at tags and at `i / 2^GRID`, `0 < i < 2^GRID`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Sampled {
    pub left: Vec<u64>,
    pub right: Vec<u64>,
    pub interior: Vec<u64>,
}

fn fin(v: ExtNat) -> u64 {
    v.finite().expect("oracle inputs are finite")
}

pub fn grid_point(i: usize) -> Q {
    Q::dyadic(i as u64, GRID)
}

fn grid() -> &'static [Q] {
    static GRID_POINTS: std::sync::OnceLock<Vec<Q>> = std::sync::OnceLock::new();
    GRID_POINTS.get_or_init(|| (1..1usize << GRID).map(grid_point).collect())
}

/// Reads values at the grid points straight from breakpoints, cells and point values,
/// walking both sorted lists together.
pub fn sample(f: &RankFunction) -> Sampled {
    let (b, cells, pts) = (f.breaks(), f.intervals(), f.points());
    let mut k = 0;
    let interior = grid()
        .iter()
        .map(|t| {
            while *t > b[k + 1] {
                k += 1;
            }
            if *t == b[k + 1] {
                fin(pts[k])
            } else {
                fin(cells[k])
            }
        })
        .collect();
    Sampled {
        left: f.left().iter().map(|&v| fin(v)).collect(),
        right: f.right().iter().map(|&v| fin(v)).collect(),
        interior,
    }
}

pub fn sampled_leq(a: &Sampled, b: &Sampled) -> bool {
    a.left.iter().zip(&b.left).all(|(x, y)| x <= y)
        && a.right.iter().zip(&b.right).all(|(x, y)| x <= y)
        && a.interior.iter().zip(&b.interior).all(|(x, y)| x <= y)
}

/// Maximal runs of grid indices where `v ≥ level`, as open intervals `(lo, hi)` in
/// grid units (`0` and `2^GRID` are the ends).
fn runs(v: &[u64], level: u64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (k, &x) in v.iter().chain(std::iter::once(&0)).enumerate() {
        match (x >= level && k < v.len(), start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                // index k covers the point (k+1)/2^GRID
                out.push((s as i64, k as i64 + 1));
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// The `k`-th canonical approximant of `g`, sampled. Strand `n` is `{g ≥ n} ∩ (0,1)`
/// with the `n`-th left and right tag (tags listed with multiplicity, `0_1` first);
/// every strand end that is not an endpoint carrying a tag moves inward by
/// `len / 2^k`. All quantities stay on the grid for `k ≤ SHRINK`.
pub fn approximant(g: &RankFunction, k: u32) -> Sampled {
    assert!(k <= SHRINK);
    let s = sample(g);
    let n = 1i64 << GRID;
    let spread = |v: &[u64]| -> Vec<usize> {
        v.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize)).collect()
    };
    let (lt, rt) = (spread(&s.left), spread(&s.right));
    let top = s.interior.iter().copied().max().unwrap_or(0);
    let mut out = Sampled { left: s.left.clone(), right: s.right.clone(), interior: vec![0; s.interior.len()] };
    for level in 1..=top {
        let idx = (level - 1) as usize;
        for (lo, hi) in runs(&s.interior, level) {
            let off = (hi - lo) >> k;
            assert_eq!(off << k, hi - lo, "shrink offset leaves the grid");
            let lo = if lo == 0 && lt.get(idx).is_some() { lo } else { lo + off };
            let hi = if hi == n && rt.get(idx).is_some() { hi } else { hi - off };
            for i in (lo + 1)..hi {
                out.interior[(i - 1) as usize] += 1;
            }
        }
    }
    out
}

/// `f ≪ g` iff `f` lies below a member of the canonical chain of `g`. Members
/// increase with `k` and the suites' offsets fall below the `1/8` resolution at
/// `k = SHRINK`, so the last member decides.
pub fn way_below_oracle(f: &RankFunction, g: &RankFunction) -> bool {
    if !f.is_finite() {
        return false;
    }
    sampled_leq(&sample(f), &approximant(g, SHRINK))
}

pub fn leq_oracle(f: &RankFunction, g: &RankFunction) -> bool {
    sampled_leq(&sample(f), &sample(g))
}

/// Pointwise sum of sampled functions.
pub fn sampled_add(a: &Sampled, b: &Sampled) -> Sampled {
    let z = |x: &[u64], y: &[u64]| x.iter().zip(y).map(|(p, q)| p + q).collect();
    Sampled { left: z(&a.left, &b.left), right: z(&a.right, &b.right), interior: z(&a.interior, &b.interior) }
}
