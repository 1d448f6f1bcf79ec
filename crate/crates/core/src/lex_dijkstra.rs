//! Tie-broken shortest-path trees.
//!
//! Every edge gets a composite weight `(w_p(e), -p(e), -chi(e))` compared
//! lexicographically: shortest first, then most revenue, then the priceable
//! edge set with the largest fingerprint. A tree of lexicographically
//! minimal paths realizes the revenue-maximizing follower response, so
//! [`naive_revenue`] only needs one Dijkstra run.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::instance::{Digraph, EdgeKind, Instance, PriceFunction};
use crate::rational::{ExtRational, Rational};

/// Subset fingerprint of an edge: `2^i` for `e_i`, zero for fixed-cost edges.
pub fn chi(kind: &EdgeKind) -> u64 {
    match kind {
        EdgeKind::Priceable(i) => 1u64 << i,
        EdgeKind::Fixed(_) => 0,
    }
}

/// Fingerprint of a set of priceable indices. Injective on sets.
pub fn chi_of_set(indices: impl IntoIterator<Item = usize>) -> u64 {
    indices.into_iter().map(|i| 1u64 << i).sum()
}

/// Lexicographically ordered `(length, -price, -chi)`.
///
/// Field order matters: the derived `Ord` compares `w` first, then
/// `neg_p`, then `neg_chi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompositeWeight {
    pub w: ExtRational,
    pub neg_p: Rational,
    pub neg_chi: i64,
}

impl CompositeWeight {
    pub fn zero() -> Self {
        CompositeWeight {
            w: ExtRational::zero(),
            neg_p: Rational::zero(),
            neg_chi: 0,
        }
    }

    pub fn unreachable() -> Self {
        CompositeWeight {
            w: ExtRational::PosInfinity,
            neg_p: Rational::zero(),
            neg_chi: 0,
        }
    }

    pub fn new(w: impl Into<ExtRational>, neg_p: Rational, neg_chi: i64) -> Self {
        CompositeWeight {
            w: w.into(),
            neg_p,
            neg_chi,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite()
    }

    /// Total price of the priceable edges on the path.
    pub fn price(&self) -> Rational {
        -&self.neg_p
    }
}

impl Add<&CompositeWeight> for &CompositeWeight {
    type Output = CompositeWeight;
    fn add(self, rhs: &CompositeWeight) -> CompositeWeight {
        CompositeWeight {
            w: &self.w + &rhs.w,
            neg_p: &self.neg_p + &rhs.neg_p,
            neg_chi: self.neg_chi + rhs.neg_chi,
        }
    }
}

pub fn composite_weight(kind: &EdgeKind, p: &PriceFunction) -> CompositeWeight {
    match kind {
        EdgeKind::Fixed(c) => CompositeWeight::new(c.clone(), Rational::zero(), 0),
        EdgeKind::Priceable(i) => {
            let price = p.get(*i);
            CompositeWeight::new(price.clone(), -price, -(chi(kind) as i64))
        }
    }
}

/// A composite-weight shortest-path tree.
#[derive(Clone, Debug)]
pub struct SptResult {
    /// Tree edge entering each vertex; `None` for the source and for
    /// unreachable vertices.
    pub parent: Vec<Option<usize>>,
    pub dist: Vec<CompositeWeight>,
    /// Reachable vertices in the order they were settled (parents first).
    pub order: Vec<usize>,
}

impl SptResult {
    pub fn is_reachable(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }

    /// For each vertex, the index of the last priceable edge on its tree
    /// path, or `None` if the path has none (or the vertex is unreachable).
    pub fn last_priceable(&self, graph: &Digraph) -> Vec<Option<usize>> {
        let mut last = vec![None; self.parent.len()];
        for &v in &self.order {
            if let Some(id) = self.parent[v] {
                let e = graph.edge(id);
                last[v] = e.priceable_index().or(last[e.tail]);
            }
        }
        last
    }
}

/// Dijkstra over composite weights from `source`.
///
/// A vertex's parent only changes on strict improvement, so among equal
/// composite distances the first edge relaxed wins; which one that is
/// depends on edge-list order, but the distances never do.
pub fn lex_dijkstra(graph: &Digraph, p: &PriceFunction, source: usize) -> SptResult {
    let n = graph.vertex_count();
    let mut dist = vec![CompositeWeight::unreachable(); n];
    let mut parent = vec![None; n];
    let mut settled = vec![false; n];
    let mut order = Vec::new();
    let mut heap = BinaryHeap::new();

    dist[source] = CompositeWeight::zero();
    heap.push(Reverse((CompositeWeight::zero(), source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        order.push(u);
        for (id, e) in graph.out_edges(u) {
            if settled[e.head] {
                continue;
            }
            let cand = &d + &composite_weight(&e.kind, p);
            if cand < dist[e.head] {
                dist[e.head] = cand.clone();
                parent[e.head] = Some(id);
                heap.push(Reverse((cand, e.head)));
            }
        }
    }
    SptResult { parent, dist, order }
}

/// Shortest distances from `source` using fixed-cost edges only; `+inf`
/// where a vertex cannot be reached that way.
pub fn fixed_cost_sssp(graph: &Digraph, source: usize) -> Vec<ExtRational> {
    let n = graph.vertex_count();
    let mut dist = vec![ExtRational::PosInfinity; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = ExtRational::zero();
    heap.push(Reverse((Rational::zero(), source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        for (_, e) in graph.out_edges(u) {
            let EdgeKind::Fixed(c) = &e.kind else {
                continue;
            };
            if settled[e.head] {
                continue;
            }
            let cand = &d + c;
            if ExtRational::Finite(cand.clone()) < dist[e.head] {
                dist[e.head] = ExtRational::Finite(cand.clone());
                heap.push(Reverse((cand, e.head)));
            }
        }
    }
    dist
}

/// First positive-demand vertex the tree does not reach, if any.
pub(crate) fn unreachable_demand(inst: &Instance, spt: &SptResult) -> Option<usize> {
    (0..inst.n()).find(|&v| inst.demand(v).is_positive() && !spt.is_reachable(v))
}

/// Revenue of `p` computed directly from a full-graph tie-broken tree:
/// the sum over vertices of demand times the priceable-price total on the
/// tree path.
pub fn naive_revenue(inst: &Instance, p: &PriceFunction) -> Result<Rational> {
    let spt = lex_dijkstra(inst.graph(), p, inst.root());
    if let Some(vertex) = unreachable_demand(inst, &spt) {
        return Err(Error::Unreachable { vertex });
    }
    Ok((0..inst.n())
        .filter(|&v| spt.is_reachable(v) && !inst.demand(v).is_zero())
        .map(|v| inst.demand(v) * &spt.dist[v].price())
        .sum())
}
