//! Continuous piecewise-linear functions on `[0,1]` with rational nodes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Q;

/// Nodes `(t_0 = 0, v_0), …, (t_L = 1, v_L)`, linearly interpolated.
///
/// Values are unconstrained here; eigenvalue functions additionally need
/// `0 ≤ v ≤ 1`, checked by [`EigenFunction::in_unit_range`].
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "PlRaw", into = "PlRaw")]
pub struct EigenFunction {
    nodes: Vec<(Q, Q)>,
}

#[derive(Serialize, Deserialize)]
struct PlRaw {
    nodes: Vec<(Q, Q)>,
}

impl TryFrom<PlRaw> for EigenFunction {
    type Error = Error;
    fn try_from(raw: PlRaw) -> Result<EigenFunction> {
        EigenFunction::new(raw.nodes)
    }
}

impl From<EigenFunction> for PlRaw {
    fn from(f: EigenFunction) -> PlRaw {
        PlRaw { nodes: f.nodes }
    }
}

fn lerp(t: &Q, (t0, v0): &(Q, Q), (t1, v1): &(Q, Q)) -> Q {
    v0 + &((v1 - v0) * (t - t0) / (t1 - t0))
}

fn merge_ts(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut ts: Vec<Q> = a.iter().chain(b).cloned().collect();
    ts.sort();
    ts.dedup();
    ts
}

impl EigenFunction {
    pub fn new(nodes: Vec<(Q, Q)>) -> Result<EigenFunction> {
        let bad = |s: &str| Err(Error::InvalidHom(vec![format!("eigenvalue function: {s}")]));
        if nodes.len() < 2 {
            return bad("needs at least the nodes 0 and 1");
        }
        if !nodes[0].0.is_zero() || !nodes[nodes.len() - 1].0.is_one() {
            return bad("nodes must start at 0 and end at 1");
        }
        if nodes.windows(2).any(|w| w[0].0 >= w[1].0) {
            return bad("nodes must be strictly increasing");
        }
        Ok(EigenFunction::simplified(nodes))
    }

    /// Drops interior nodes lying on the segment through their neighbours.
    fn simplified(nodes: Vec<(Q, Q)>) -> EigenFunction {
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(nodes.len());
        for n in nodes {
            while out.len() >= 2 {
                let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
                if lerp(&b.0, a, &n) == b.1 {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(n);
        }
        EigenFunction { nodes: out }
    }

    pub fn constant(v: Q) -> EigenFunction {
        EigenFunction { nodes: vec![(Q::zero(), v.clone()), (Q::one(), v)] }
    }

    pub fn identity() -> EigenFunction {
        EigenFunction { nodes: vec![(Q::zero(), Q::zero()), (Q::one(), Q::one())] }
    }

    /// Linear from `a` at 0 to `b` at 1.
    pub fn linear(a: Q, b: Q) -> EigenFunction {
        EigenFunction { nodes: vec![(Q::zero(), a), (Q::one(), b)] }
    }

    pub fn nodes(&self) -> &[(Q, Q)] {
        &self.nodes
    }

    pub fn node_ts(&self) -> Vec<Q> {
        self.nodes.iter().map(|(t, _)| t.clone()).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.nodes.len() == 2 && self.nodes[0].1 == self.nodes[1].1
    }

    pub fn in_unit_range(&self) -> bool {
        self.nodes.iter().all(|(_, v)| v.in_unit())
    }

    pub fn eval(&self, t: &Q) -> Q {
        match self.nodes.binary_search_by(|(s, _)| s.cmp(t)) {
            Ok(i) => self.nodes[i].1.clone(),
            Err(i) => lerp(t, &self.nodes[i - 1], &self.nodes[i]),
        }
    }

    pub fn at_zero(&self) -> Q {
        self.nodes[0].1.clone()
    }

    pub fn at_one(&self) -> Q {
        self.nodes[self.nodes.len() - 1].1.clone()
    }

    fn on_grid(ts: Vec<Q>, f: impl Fn(&Q) -> Q) -> EigenFunction {
        let nodes = ts.into_iter().map(|t| {
            let v = f(&t);
            (t, v)
        });
        EigenFunction::simplified(nodes.collect())
    }

    pub fn add(&self, g: &EigenFunction) -> EigenFunction {
        let ts = merge_ts(&self.node_ts(), &g.node_ts());
        EigenFunction::on_grid(ts, |t| self.eval(t) + g.eval(t))
    }

    pub fn scale(&self, c: &Q) -> EigenFunction {
        EigenFunction::on_grid(self.node_ts(), |t| self.eval(t) * c)
    }

    /// Parameters in `[0,1]` where the function takes one of the given values, found
    /// segment by segment. Constant segments contribute nothing.
    pub fn level_crossings(&self, levels: &[Q]) -> Vec<Q> {
        let mut out = Vec::new();
        for w in self.nodes.windows(2) {
            let ((t0, v0), (t1, v1)) = (&w[0], &w[1]);
            if v0 == v1 {
                continue;
            }
            let (lo, hi) = if v0 < v1 { (v0, v1) } else { (v1, v0) };
            for b in levels {
                if lo < b && b < hi {
                    out.push(t0 + &((b - v0) * (t1 - t0) / (v1 - v0)));
                }
            }
        }
        out
    }

    /// `self ∘ inner`. Between the nodes of `inner` and the parameters where `inner`
    /// reaches a node of `self`, the composite is linear.
    pub fn compose(&self, inner: &EigenFunction) -> EigenFunction {
        let mut ts = inner.node_ts();
        ts.extend(inner.level_crossings(&self.node_ts()));
        ts.sort();
        ts.dedup();
        EigenFunction::on_grid(ts, |t| self.eval(&inner.eval(t)))
    }

    /// Truncates to `[lo, hi]`, inserting nodes where the function crosses either bound.
    pub fn clip(&self, lo: &Q, hi: &Q) -> EigenFunction {
        let mut ts = self.node_ts();
        ts.extend(self.level_crossings(&[lo.clone(), hi.clone()]));
        ts.sort();
        ts.dedup();
        EigenFunction::on_grid(ts, |t| self.eval(t).max(lo.clone()).min(hi.clone()))
    }

    /// `sup_t |f(t) − g(t)|`, attained at a node of either function.
    pub fn sup_distance(&self, g: &EigenFunction) -> Q {
        merge_ts(&self.node_ts(), &g.node_ts())
            .iter()
            .map(|t| (self.eval(t) - g.eval(t)).abs())
            .max()
            .unwrap_or_else(Q::zero)
    }

    /// `f ≤ g` everywhere; checking the merged nodes suffices.
    pub fn leq(&self, g: &EigenFunction) -> bool {
        merge_ts(&self.node_ts(), &g.node_ts()).iter().all(|t| self.eval(t) <= g.eval(t))
    }

    /// Pointwise order statistics: output `k` is the `k`-th smallest value at every `t`.
    /// Between consecutive pairwise crossings the order is fixed, so each output is
    /// linear between grid points.
    pub fn sort_pointwise(fs: &[EigenFunction]) -> Vec<EigenFunction> {
        if fs.len() <= 1 {
            return fs.to_vec();
        }
        let mut ts: Vec<Q> = Vec::new();
        for f in fs {
            ts.extend(f.node_ts());
        }
        ts.sort();
        ts.dedup();
        let mut cuts = ts.clone();
        for w in ts.windows(2) {
            let (t0, t1) = (&w[0], &w[1]);
            let v0: Vec<Q> = fs.iter().map(|f| f.eval(t0)).collect();
            let v1: Vec<Q> = fs.iter().map(|f| f.eval(t1)).collect();
            for a in 0..fs.len() {
                for b in a + 1..fs.len() {
                    let d0 = &v0[a] - &v0[b];
                    let d1 = &v1[a] - &v1[b];
                    if (d0.is_negative() && !d1.is_negative() && !d1.is_zero())
                        || (d1.is_negative() && !d0.is_negative() && !d0.is_zero())
                    {
                        let s = &d0 / &(&d0 - &d1);
                        cuts.push(t0 + &(s * (t1 - t0)));
                    }
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        let columns: Vec<Vec<Q>> = cuts
            .iter()
            .map(|t| {
                let mut v: Vec<Q> = fs.iter().map(|f| f.eval(t)).collect();
                v.sort();
                v
            })
            .collect();
        (0..fs.len())
            .map(|k| {
                let nodes = cuts.iter().zip(&columns).map(|(t, col)| (t.clone(), col[k].clone()));
                EigenFunction::simplified(nodes.collect())
            })
            .collect()
    }
}

impl fmt::Display for EigenFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.nodes.iter().map(|(t, v)| format!("({t},{v})")).collect();
        write!(f, "{}", parts.join("-"))
    }
}
