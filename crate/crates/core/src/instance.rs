//! Pricing-game instances: the directed graph with fixed-cost and priceable
//! edges, the root, and per-vertex demand, plus the text format they are
//! stored in.
//!
//! ```text
//! stackspt 1
//! graph <n> <m> <k>
//! root <r>
//! demand <v> <phi>        # optional, vertices without a line get demand 1
//! edge <u> <v> F <cost>
//! edge <u> <v> P <i>
//! ```
//!
//! Numeric literals are integers, decimals or `a/b` fractions, all exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest supported number of priceable edges. Tie-break fingerprints use
/// `2^i`, and the model graph has `2k + 1` vertices.
pub const MAX_PRICEABLE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Fixed cost. Strictly positive in an [`Instance`]; model graphs may
    /// carry zero-cost edges between coinciding endpoints.
    Fixed(Rational),
    /// Priceable edge `e_i`, with `i` in `1..=k`.
    Priceable(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn fixed(tail: usize, head: usize, cost: impl Into<Rational>) -> Self {
        Edge {
            tail,
            head,
            kind: EdgeKind::Fixed(cost.into()),
        }
    }

    pub fn priceable(tail: usize, head: usize, index: usize) -> Self {
        Edge {
            tail,
            head,
            kind: EdgeKind::Priceable(index),
        }
    }

    pub fn priceable_index(&self) -> Option<usize> {
        match self.kind {
            EdgeKind::Priceable(i) => Some(i),
            EdgeKind::Fixed(_) => None,
        }
    }

    pub fn fixed_cost(&self) -> Option<&Rational> {
        match &self.kind {
            EdgeKind::Fixed(c) => Some(c),
            EdgeKind::Priceable(_) => None,
        }
    }
}

/// Edge list with a compressed out-adjacency index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    out: Vec<usize>,
}

impl Digraph {
    /// Endpoints must be `< n`; callers validate.
    pub fn new(n: usize, edges: Vec<Edge>) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for e in &edges {
            offsets[e.tail + 1] += 1;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        let mut fill = offsets.clone();
        let mut out = vec![0usize; edges.len()];
        for (id, e) in edges.iter().enumerate() {
            out[fill[e.tail]] = id;
            fill[e.tail] += 1;
        }
        Digraph {
            n,
            edges,
            offsets,
            out,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Outgoing edges of `v` as `(edge id, edge)`, in edge-list order.
    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = (usize, &Edge)> + '_ {
        self.out[self.offsets[v]..self.offsets[v + 1]]
            .iter()
            .map(move |&id| (id, &self.edges[id]))
    }
}

/// A validated pricing-game instance. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    graph: Digraph,
    root: usize,
    demand: Vec<Rational>,
    // priceable[i - 1] is the edge id of e_i.
    priceable: Vec<usize>,
}

impl Instance {
    /// Validates and builds an instance. `demand` must have one entry per
    /// vertex.
    pub fn new(n: usize, root: usize, edges: Vec<Edge>, demand: Vec<Rational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("n", "graph needs at least one vertex"));
        }
        if root >= n {
            return Err(Error::validation("root", format!("vertex {root} out of range 0..{n}")));
        }
        if demand.len() != n {
            return Err(Error::validation(
                "demand",
                format!("expected {n} entries, got {}", demand.len()),
            ));
        }
        if let Some(v) = demand.iter().position(|d| d.is_negative()) {
            return Err(Error::validation("demand", format!("vertex {v} has negative demand")));
        }
        let k = edges.iter().filter(|e| e.priceable_index().is_some()).count();
        if k == 0 {
            return Err(Error::validation("k", "at least one priceable edge is required"));
        }
        if k > MAX_PRICEABLE {
            return Err(Error::validation(
                "k",
                format!("{k} priceable edges exceed the supported maximum {MAX_PRICEABLE}"),
            ));
        }
        let mut priceable = vec![usize::MAX; k];
        for (id, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(Error::validation(
                    "edge",
                    format!("edge {id} ({} -> {}) has a vertex outside 0..{n}", e.tail, e.head),
                ));
            }
            if e.tail == e.head {
                return Err(Error::validation("edge", format!("edge {id} is a self-loop at {}", e.tail)));
            }
            match &e.kind {
                EdgeKind::Fixed(c) if !c.is_positive() => {
                    return Err(Error::validation("cost", format!("edge {id} has nonpositive cost {c}")));
                }
                EdgeKind::Fixed(_) => {}
                EdgeKind::Priceable(i) => {
                    if *i == 0 || *i > k {
                        return Err(Error::validation(
                            "priceable index",
                            format!("edge {id} has index {i}, expected 1..={k}"),
                        ));
                    }
                    if priceable[i - 1] != usize::MAX {
                        return Err(Error::validation(
                            "priceable index",
                            format!("index {i} used by edges {} and {id}", priceable[i - 1]),
                        ));
                    }
                    priceable[i - 1] = id;
                }
            }
        }
        Ok(Instance {
            graph: Digraph::new(n, edges),
            root,
            demand,
            priceable,
        })
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn m(&self) -> usize {
        self.graph.edges().len()
    }

    pub fn k(&self) -> usize {
        self.priceable.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[Edge] {
        self.graph.edges()
    }

    pub fn demand(&self, v: usize) -> &Rational {
        &self.demand[v]
    }

    pub fn demands(&self) -> &[Rational] {
        &self.demand
    }

    /// Edge id of priceable edge `e_i` (1-based).
    pub fn priceable_edge_id(&self, i: usize) -> usize {
        self.priceable[i - 1]
    }

    /// `(s_i, t_i)` for priceable edge `e_i` (1-based).
    pub fn priceable_endpoints(&self, i: usize) -> (usize, usize) {
        let e = self.graph.edge(self.priceable[i - 1]);
        (e.tail, e.head)
    }

    /// Same instance with the edge list reordered: edge `perm[j]` of `self`
    /// becomes edge `j`. Priceable indices are kept.
    pub fn with_edge_order(&self, perm: &[usize]) -> Self {
        let edges = perm.iter().map(|&id| self.graph.edge(id).clone()).collect();
        Instance::new(self.n(), self.root, edges, self.demand.clone())
            .expect("edge permutation of a valid instance")
    }
}

/// Strictly positive prices for `e_1..e_k`. Fixed-cost edges implicitly
/// have price zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PriceFunction(Vec<Rational>);

impl PriceFunction {
    pub fn new(prices: Vec<Rational>, k: usize) -> Result<Self> {
        if prices.len() != k {
            return Err(Error::Price(format!("expected {k} prices, got {}", prices.len())));
        }
        if let Some(i) = prices.iter().position(|p| !p.is_positive()) {
            return Err(Error::Price(format!("price of e_{} must be positive, got {}", i + 1, prices[i])));
        }
        Ok(PriceFunction(prices))
    }

    /// Parses a comma-separated list such as `"3,1/2,4.5"`.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let prices = text
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<Rational>>>()?;
        Self::new(prices, k)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// Price of `e_i` (1-based).
    pub fn get(&self, i: usize) -> &Rational {
        &self.0[i - 1]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    /// Price of an edge: its own price if priceable, zero otherwise.
    pub fn of_edge(&self, kind: &EdgeKind) -> Rational {
        match kind {
            EdgeKind::Priceable(i) => self.get(*i).clone(),
            EdgeKind::Fixed(_) => Rational::zero(),
        }
    }
}

impl std::fmt::Display for PriceFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (j, p) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

const MAGIC: &str = "stackspt";
const VERSION: &str = "1";

/// Meaningful tokens of a line, with `#` comments stripped.
fn tokens(line: &str) -> Vec<&str> {
    let body = line.split_once('#').map_or(line, |(b, _)| b);
    body.split_whitespace().collect()
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected {what}, found {tok:?}")))
}

fn parse_number(tok: &str, line: usize) -> Result<Rational> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid numeric literal {tok:?}")))
}

/// Parses the text instance format and validates the result.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut seen_magic = false;
    let mut root: Option<usize> = None;
    let mut demand: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut edges = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        let Some(&directive) = toks.first() else {
            continue;
        };
        if !seen_magic {
            if toks != [MAGIC, VERSION] {
                return Err(Error::parse(line, format!("expected `{MAGIC} {VERSION}` header")));
            }
            seen_magic = true;
            continue;
        }
        let arity = |want: usize| {
            if toks.len() == want {
                Ok(())
            } else {
                Err(Error::parse(
                    line,
                    format!("`{directive}` takes {} arguments, found {}", want - 1, toks.len() - 1),
                ))
            }
        };
        if directive != "graph" && header.is_none() {
            return Err(Error::parse(line, "`graph` line must precede other directives"));
        }
        match directive {
            "graph" => {
                arity(4)?;
                if header.is_some() {
                    return Err(Error::parse(line, "duplicate `graph` line"));
                }
                header = Some((
                    parse_usize(toks[1], line, "vertex count")?,
                    parse_usize(toks[2], line, "edge count")?,
                    parse_usize(toks[3], line, "priceable count")?,
                ));
            }
            "root" => {
                arity(2)?;
                if root.is_some() {
                    return Err(Error::parse(line, "duplicate `root` line"));
                }
                root = Some(parse_usize(toks[1], line, "root vertex")?);
            }
            "demand" => {
                arity(3)?;
                let v = parse_usize(toks[1], line, "vertex id")?;
                let phi = parse_number(toks[2], line)?;
                if demand.insert(v, phi).is_some() {
                    return Err(Error::parse(line, format!("duplicate demand for vertex {v}")));
                }
            }
            "edge" => {
                arity(5)?;
                let u = parse_usize(toks[1], line, "tail vertex")?;
                let v = parse_usize(toks[2], line, "head vertex")?;
                let kind = match toks[3] {
                    "F" => EdgeKind::Fixed(parse_number(toks[4], line)?),
                    "P" => EdgeKind::Priceable(parse_usize(toks[4], line, "priceable index")?),
                    other => {
                        return Err(Error::parse(line, format!("edge kind must be F or P, found {other:?}")))
                    }
                };
                edges.push(Edge { tail: u, head: v, kind });
            }
            other => return Err(Error::parse(line, format!("unknown directive {other:?}"))),
        }
    }

    let (n, m, k) = header.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing `graph` line"))?;
    let root = root.ok_or_else(|| Error::validation("root", "missing `root` line"))?;
    if edges.len() != m {
        return Err(Error::validation("m", format!("header declares {m} edges, found {}", edges.len())));
    }
    let found_k = edges.iter().filter(|e| e.priceable_index().is_some()).count();
    if found_k != k {
        return Err(Error::validation("k", format!("header declares {k} priceable edges, found {found_k}")));
    }
    let mut phi = vec![Rational::one(); n];
    for (v, d) in demand {
        if v >= n {
            return Err(Error::validation("demand", format!("vertex {v} out of range 0..{n}")));
        }
        phi[v] = d;
    }
    Instance::new(n, root, edges, phi)
}

/// Canonical text form. `parse_instance` inverts it exactly.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "# vertices without a demand line have demand 1");
    let _ = writeln!(out, "graph {} {} {}", inst.n(), inst.m(), inst.k());
    let _ = writeln!(out, "root {}", inst.root());
    let one = Rational::one();
    for (v, d) in inst.demands().iter().enumerate() {
        if *d != one {
            let _ = writeln!(out, "demand {v} {d}");
        }
    }
    for e in inst.edges() {
        match &e.kind {
            EdgeKind::Fixed(c) => {
                let _ = writeln!(out, "edge {} {} F {c}", e.tail, e.head);
            }
            EdgeKind::Priceable(i) => {
                let _ = writeln!(out, "edge {} {} P {i}", e.tail, e.head);
            }
        }
    }
    out
}
