//! The constant-size model graph and reduced trees.
//!
//! The model graph has the root plus both endpoints of every priceable
//! edge. Fixed-cost edges run from the root to every endpoint and from each
//! head `t_i` to every other endpoint, weighted by shortest distances in the
//! graph without priceable edges. Its tie-broken shortest-path tree,
//! contracted to priceable edges, is the same reduced tree as the full
//! graph's, so a price function's reduced tree costs one Dijkstra run on
//! `2k + 1` vertices.

use crate::error::{Error, Result};
use crate::instance::{Digraph, Edge, EdgeKind, Instance, PriceFunction};
use crate::lex_dijkstra::{fixed_cost_sssp, lex_dijkstra, SptResult};
use crate::rational::{ExtRational, Rational};

/// Fixed-cost shortest distances from the root and from every priceable
/// head `t_i`.
#[derive(Clone, Debug)]
pub struct DistanceTables {
    tails: Vec<usize>,
    heads: Vec<usize>,
    from_root: Vec<ExtRational>,
    from_head: Vec<Vec<ExtRational>>,
}

impl DistanceTables {
    /// `k + 1` fixed-cost Dijkstra runs. No formula reads distances out of
    /// a tail `s_i`, so those runs are skipped.
    pub fn compute(inst: &Instance) -> Self {
        let (tails, heads): (Vec<_>, Vec<_>) = (1..=inst.k()).map(|i| inst.priceable_endpoints(i)).unzip();
        let from_root = fixed_cost_sssp(inst.graph(), inst.root());
        let from_head = heads.iter().map(|&t| fixed_cost_sssp(inst.graph(), t)).collect();
        DistanceTables {
            tails,
            heads,
            from_root,
            from_head,
        }
    }

    pub fn k(&self) -> usize {
        self.heads.len()
    }

    /// `d_inf(r, v)`.
    pub fn from_root(&self, v: usize) -> &ExtRational {
        &self.from_root[v]
    }

    /// `d_inf(t_i, v)`, with `i` 1-based.
    pub fn from_head(&self, i: usize, v: usize) -> &ExtRational {
        &self.from_head[i - 1][v]
    }

    pub fn tail(&self, i: usize) -> usize {
        self.tails[i - 1]
    }

    pub fn head(&self, i: usize) -> usize {
        self.heads[i - 1]
    }
}

/// Model graph over logical vertices `0` (root), `2i - 1` (`s_i`) and `2i`
/// (`t_i`). Endpoints that coincide in the original graph stay separate
/// logical vertices, joined by zero-weight edges.
#[derive(Clone, Debug)]
pub struct ModelGraph {
    graph: Digraph,
    k: usize,
}

pub const MODEL_ROOT: usize = 0;

pub fn model_tail(i: usize) -> usize {
    2 * i - 1
}

pub fn model_head(i: usize) -> usize {
    2 * i
}

impl ModelGraph {
    pub fn build(tables: &DistanceTables) -> Self {
        let k = tables.k();
        let mut edges = Vec::with_capacity(2 * k * k + 2 * k);
        let mut fixed = |from: usize, to: usize, d: &ExtRational| {
            if let Some(w) = d.finite() {
                edges.push(Edge::fixed(from, to, w.clone()));
            }
        };
        for i in 1..=k {
            fixed(MODEL_ROOT, model_tail(i), tables.from_root(tables.tail(i)));
            fixed(MODEL_ROOT, model_head(i), tables.from_root(tables.head(i)));
        }
        for i in 1..=k {
            for j in (1..=k).filter(|&j| j != i) {
                fixed(model_head(i), model_tail(j), tables.from_head(i, tables.tail(j)));
                fixed(model_head(i), model_head(j), tables.from_head(i, tables.head(j)));
            }
        }
        for i in 1..=k {
            edges.push(Edge::priceable(model_tail(i), model_head(i), i));
        }
        ModelGraph {
            graph: Digraph::new(2 * k + 1, edges),
            k,
        }
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Reduced tree of `p`, from a tie-broken tree of the model graph.
    pub fn reduced_tree(&self, p: &PriceFunction) -> ReducedTree {
        let spt = lex_dijkstra(&self.graph, p, MODEL_ROOT);
        ReducedTree::contract(&self.graph, &spt, self.k)
    }
}

/// Position of a priceable edge in a reduced tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeSlot {
    Absent,
    /// No priceable edge precedes it on the path from the root.
    Root,
    /// Its closest priceable ancestor is `e_j`.
    Below(usize),
}

/// A rooted tree labelled by priceable edges, stored as one parent slot per
/// edge. Equal trees have equal slot arrays.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedTree {
    parent_of: Vec<TreeSlot>,
}

impl ReducedTree {
    pub fn empty(k: usize) -> Self {
        ReducedTree {
            parent_of: vec![TreeSlot::Absent; k],
        }
    }

    /// `parent_of[i - 1]` is the slot of `e_i`. Parents must be present and
    /// the parent relation acyclic.
    pub fn new(parent_of: Vec<TreeSlot>) -> Result<Self> {
        let k = parent_of.len();
        for (idx, slot) in parent_of.iter().enumerate() {
            let i = idx + 1;
            if let TreeSlot::Below(j) = *slot {
                if j == 0 || j > k || j == i || parent_of[j - 1] == TreeSlot::Absent {
                    return Err(Error::Unrealizable(format!("e_{i} hangs below missing edge e_{j}")));
                }
            }
            let mut cur = *slot;
            let mut steps = 0;
            while let TreeSlot::Below(j) = cur {
                steps += 1;
                if steps > k {
                    return Err(Error::Unrealizable(format!("cycle through e_{i}")));
                }
                cur = parent_of[j - 1];
            }
        }
        Ok(ReducedTree { parent_of })
    }

    /// Contracts the fixed-cost edges of a tie-broken tree of `graph`.
    pub fn contract(graph: &Digraph, spt: &SptResult, k: usize) -> Self {
        let last = spt.last_priceable(graph);
        let mut parent_of = vec![TreeSlot::Absent; k];
        for (id, e) in graph.edges().iter().enumerate() {
            if let EdgeKind::Priceable(i) = e.kind {
                if spt.parent[e.head] == Some(id) {
                    parent_of[i - 1] = match last[e.tail] {
                        None => TreeSlot::Root,
                        Some(j) => TreeSlot::Below(j),
                    };
                }
            }
        }
        ReducedTree { parent_of }
    }

    pub fn k(&self) -> usize {
        self.parent_of.len()
    }

    pub fn slot(&self, i: usize) -> TreeSlot {
        self.parent_of[i - 1]
    }

    pub fn slots(&self) -> &[TreeSlot] {
        &self.parent_of
    }

    pub fn contains(&self, i: usize) -> bool {
        self.parent_of[i - 1] != TreeSlot::Absent
    }

    /// Indices of the edges in the tree, ascending.
    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.k()).filter(|&i| self.contains(i))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_count() == 0
    }

    /// Edge labels on the path from the root down to `e_i`, ending with
    /// `e_i`; empty when `e_i` is not in the tree.
    pub fn sequence_of(&self, i: usize) -> EdgeSequence {
        let mut seq = Vec::new();
        let mut cur = i;
        loop {
            match self.slot(cur) {
                TreeSlot::Absent => return EdgeSequence::default(),
                TreeSlot::Root => {
                    seq.push(cur);
                    break;
                }
                TreeSlot::Below(j) => {
                    seq.push(cur);
                    cur = j;
                }
            }
        }
        seq.reverse();
        EdgeSequence(seq)
    }
}

impl std::fmt::Display for ReducedTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.edges().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            match self.slot(i) {
                TreeSlot::Root => write!(f, "e{i}<-r")?,
                TreeSlot::Below(j) => write!(f, "e{i}<-e{j}")?,
                TreeSlot::Absent => unreachable!(),
            }
        }
        f.write_str("}")
    }
}

/// Distinct priceable indices in path order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EdgeSequence(Vec<usize>);

impl EdgeSequence {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        for (n, &i) in indices.iter().enumerate() {
            if i == 0 || indices[..n].contains(&i) {
                return Err(Error::Unrealizable(format!("bad edge sequence {indices:?}")));
            }
        }
        Ok(EdgeSequence(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn price(&self, p: &PriceFunction) -> Rational {
        self.0.iter().map(|&i| p.get(i)).sum()
    }

    pub fn chi(&self) -> u64 {
        crate::lex_dijkstra::chi_of_set(self.0.iter().copied())
    }

    /// Fixed-cost length of the gaps: `d_inf(r, s_first)` plus
    /// `d_inf(t_a, s_b)` for each consecutive pair.
    pub fn w_infinity(&self, tables: &DistanceTables) -> Result<ExtRational> {
        let (&first, _) = self.0.split_first().ok_or(Error::EmptySequence)?;
        let mut total = tables.from_root(tables.tail(first)).clone();
        for pair in self.0.windows(2) {
            total = &total + tables.from_head(pair[0], tables.tail(pair[1]));
        }
        Ok(total)
    }
}

/// `a` precedes `b` when it carries more revenue, or equal revenue and the
/// larger fingerprint. Total on distinct sequences.
pub fn seq_order_lt(a: &EdgeSequence, b: &EdgeSequence, p: &PriceFunction) -> bool {
    (a.price(p), a.chi()) > (b.price(p), b.chi())
}
