//! Static weighted orthogonal range searching.
//!
//! Coordinates are exact [`ExtRational`]s. At build time every dimension is
//! reduced to rank space (indices into the sorted distinct coordinates), so
//! a query bound, open or closed, turns into a half-open rank range after
//! one binary search per dimension and the tree itself only compares
//! integers.
//!
//! The tree is a layered range tree. The two innermost dimensions use a
//! segment tree over the first of them whose nodes keep their points sorted
//! by the second, with prefix sums of weights and, for each prefix of a
//! node's array, how many of those points went to the left child. A query
//! binary-searches the root array once and then walks the cuts down in
//! constant time per node, for `O(log n)` per 2-D query. Each further
//! dimension adds a segment-tree level whose nodes own a lower-dimensional
//! structure, giving `O(n log^{d-1} n)` space and `O(log^{d-1} n)` queries.

use std::ops::Bound;

use crate::error::{Error, Result};
use crate::rational::{ExtRational, Rational};

/// Points with `dim` coordinates each and a nonnegative weight.
#[derive(Clone, Debug, Default)]
pub struct WeightedPointSet {
    dim: usize,
    coords: Vec<ExtRational>,
    weights: Vec<Rational>,
}

impl WeightedPointSet {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "points need at least one coordinate");
        WeightedPointSet {
            dim,
            coords: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn push(&mut self, coords: Vec<ExtRational>, weight: Rational) -> Result<()> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: coords.len(),
            });
        }
        if weight.is_negative() {
            return Err(Error::validation("weight", format!("negative point weight {weight}")));
        }
        self.coords.extend(coords);
        self.weights.push(weight);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, idx: usize) -> &[ExtRational] {
        &self.coords[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn weight(&self, idx: usize) -> &Rational {
        &self.weights[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[ExtRational], &Rational)> {
        self.coords.chunks(self.dim).zip(&self.weights)
    }
}

/// One side-bounded or unbounded interval per dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lower: Bound<ExtRational>,
    pub upper: Bound<ExtRational>,
}

impl Interval {
    pub fn unbounded() -> Self {
        Interval {
            lower: Bound::Unbounded,
            upper: Bound::Unbounded,
        }
    }

    /// `(-inf, v]`
    pub fn at_most(v: ExtRational) -> Self {
        Interval {
            lower: Bound::Unbounded,
            upper: Bound::Included(v),
        }
    }

    /// `(-inf, v)`
    pub fn below(v: ExtRational) -> Self {
        Interval {
            lower: Bound::Unbounded,
            upper: Bound::Excluded(v),
        }
    }

    pub fn contains(&self, x: &ExtRational) -> bool {
        let above = match &self.lower {
            Bound::Unbounded => true,
            Bound::Included(v) => x >= v,
            Bound::Excluded(v) => x > v,
        };
        let under = match &self.upper {
            Bound::Unbounded => true,
            Bound::Included(v) => x <= v,
            Bound::Excluded(v) => x < v,
        };
        above && under
    }
}

/// Cartesian product of intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryRect {
    pub intervals: Vec<Interval>,
}

impl QueryRect {
    pub fn new(intervals: Vec<Interval>) -> Self {
        QueryRect { intervals }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, point: &[ExtRational]) -> bool {
        point.len() == self.dim() && self.intervals.iter().zip(point).all(|(iv, x)| iv.contains(x))
    }
}

/// Rank-space point coordinates, stride `dim`.
struct Ranked {
    dim: usize,
    ranks: Vec<u32>,
    weights: Vec<Rational>,
}

impl Ranked {
    fn rank(&self, id: u32, axis: usize) -> u32 {
        self.ranks[id as usize * self.dim + axis]
    }
}

const NO_CHILD: u32 = u32::MAX;

/// Range tree over a static weighted point set. Immutable once built.
pub struct RangeTree {
    dim: usize,
    // Sorted distinct coordinates per dimension.
    keys: Vec<Vec<ExtRational>>,
    root: Level,
}

impl RangeTree {
    pub fn build(points: &WeightedPointSet) -> Self {
        let dim = points.dim();
        let n = points.len();
        let mut keys = Vec::with_capacity(dim);
        let mut ranks = vec![0u32; n * dim];
        for axis in 0..dim {
            let mut axis_keys: Vec<ExtRational> = (0..n).map(|i| points.point(i)[axis].clone()).collect();
            axis_keys.sort_unstable();
            axis_keys.dedup();
            for i in 0..n {
                let r = axis_keys.binary_search(&points.point(i)[axis]).expect("coordinate present");
                ranks[i * dim + axis] = r as u32;
            }
            keys.push(axis_keys);
        }
        let ranked = Ranked {
            dim,
            ranks,
            weights: points.weights.clone(),
        };
        let ids: Vec<u32> = (0..n as u32).collect();
        RangeTree {
            dim,
            keys,
            root: Level::build(&ranked, 0, &ids),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total weight of the points inside `rect`.
    pub fn query(&self, rect: &QueryRect) -> Result<Rational> {
        if rect.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rect.dim(),
            });
        }
        let mut ranges = Vec::with_capacity(self.dim);
        for (iv, keys) in rect.intervals.iter().zip(&self.keys) {
            let lo = match &iv.lower {
                Bound::Unbounded => 0,
                Bound::Included(v) => keys.partition_point(|k| k < v),
                Bound::Excluded(v) => keys.partition_point(|k| k <= v),
            };
            let hi = match &iv.upper {
                Bound::Unbounded => keys.len(),
                Bound::Included(v) => keys.partition_point(|k| k <= v),
                Bound::Excluded(v) => keys.partition_point(|k| k < v),
            };
            if lo >= hi {
                return Ok(Rational::zero());
            }
            ranges.push((lo as u32, hi as u32));
        }
        let mut acc = Rational::zero();
        self.root.query(&ranges, &mut acc);
        Ok(acc)
    }
}

enum Level {
    Empty,
    One(Sorted1D),
    Two(Layered2D),
    Nested(Nested),
}

impl Level {
    fn build(pts: &Ranked, axis: usize, ids: &[u32]) -> Level {
        if ids.is_empty() {
            return Level::Empty;
        }
        match pts.dim - axis {
            1 => Level::One(Sorted1D::build(pts, axis, ids)),
            2 => Level::Two(Layered2D::build(pts, axis, ids)),
            _ => Level::Nested(Nested::build(pts, axis, ids)),
        }
    }

    /// `ranges` holds the half-open rank ranges of this level's dimensions.
    fn query(&self, ranges: &[(u32, u32)], acc: &mut Rational) {
        match self {
            Level::Empty => {}
            Level::One(s) => s.query(ranges[0], acc),
            Level::Two(l) => l.query(ranges[0], ranges[1], acc),
            Level::Nested(t) => t.query(ranges, acc),
        }
    }
}

struct Sorted1D {
    keys: Vec<u32>,
    prefix: Vec<Rational>,
}

impl Sorted1D {
    fn build(pts: &Ranked, axis: usize, ids: &[u32]) -> Self {
        let mut order: Vec<(u32, u32)> = ids.iter().map(|&id| (pts.rank(id, axis), id)).collect();
        order.sort_unstable();
        let mut prefix = Vec::with_capacity(order.len() + 1);
        prefix.push(Rational::zero());
        for &(_, id) in &order {
            let next = prefix.last().unwrap() + &pts.weights[id as usize];
            prefix.push(next);
        }
        Sorted1D {
            keys: order.into_iter().map(|(k, _)| k).collect(),
            prefix,
        }
    }

    fn query(&self, (lo, hi): (u32, u32), acc: &mut Rational) {
        let a = self.keys.partition_point(|&k| k < lo);
        let b = self.keys.partition_point(|&k| k < hi);
        if a < b {
            *acc = &*acc + &(&self.prefix[b] - &self.prefix[a]);
        }
    }
}

struct Node2 {
    lo: u32,
    hi: u32,
    left: u32,
    right: u32,
    prefix_at: usize,
    lcount_at: usize,
}

/// Two innermost dimensions: segment tree over `x` positions, each node's
/// points ordered by `y`.
struct Layered2D {
    xs: Vec<u32>,
    root_ys: Vec<u32>,
    nodes: Vec<Node2>,
    // Per internal node, lcount[q] = how many of the node's first q points
    // (in y order) belong to the left child.
    lcount: Vec<u32>,
    // Per node, prefix sums of weights in y order.
    prefix: Vec<Rational>,
}

impl Layered2D {
    fn build(pts: &Ranked, axis: usize, ids: &[u32]) -> Self {
        let mut order = ids.to_vec();
        order.sort_unstable_by_key(|&id| (pts.rank(id, axis), pts.rank(id, axis + 1), id));
        let mut this = Layered2D {
            xs: order.iter().map(|&id| pts.rank(id, axis)).collect(),
            root_ys: Vec::new(),
            nodes: Vec::with_capacity(2 * order.len()),
            lcount: Vec::new(),
            prefix: Vec::new(),
        };
        let ys: Vec<u32> = order.iter().map(|&id| pts.rank(id, axis + 1)).collect();
        let weights: Vec<&Rational> = order.iter().map(|&id| &pts.weights[id as usize]).collect();
        let root_list = this.build_node(0, order.len() as u32, &ys, &weights);
        this.root_ys = root_list.into_iter().map(|(y, _)| y).collect();
        this
    }

    /// Builds the node for positions `[lo, hi)` and returns its points as
    /// `(y, position)` sorted ascending.
    fn build_node(&mut self, lo: u32, hi: u32, ys: &[u32], weights: &[&Rational]) -> Vec<(u32, u32)> {
        let id = self.nodes.len();
        self.nodes.push(Node2 {
            lo,
            hi,
            left: NO_CHILD,
            right: NO_CHILD,
            prefix_at: 0,
            lcount_at: 0,
        });
        let list = if hi - lo == 1 {
            vec![(ys[lo as usize], lo)]
        } else {
            let mid = lo + (hi - lo) / 2;
            let left = self.nodes.len() as u32;
            let l = self.build_node(lo, mid, ys, weights);
            let right = self.nodes.len() as u32;
            let r = self.build_node(mid, hi, ys, weights);
            let merged = merge(l, r);
            let lcount_at = self.lcount.len();
            self.lcount.reserve(merged.len() + 1);
            self.lcount.push(0);
            let mut went_left = 0u32;
            for &(_, pos) in &merged {
                went_left += u32::from(pos < mid);
                self.lcount.push(went_left);
            }
            let node = &mut self.nodes[id];
            node.left = left;
            node.right = right;
            node.lcount_at = lcount_at;
            merged
        };
        let prefix_at = self.prefix.len();
        self.prefix.reserve(list.len() + 1);
        self.prefix.push(Rational::zero());
        for &(_, pos) in &list {
            let next = self.prefix.last().unwrap() + weights[pos as usize];
            self.prefix.push(next);
        }
        self.nodes[id].prefix_at = prefix_at;
        list
    }

    fn query(&self, (xlo, xhi): (u32, u32), (ylo, yhi): (u32, u32), acc: &mut Rational) {
        let a = self.xs.partition_point(|&x| x < xlo) as u32;
        let b = self.xs.partition_point(|&x| x < xhi) as u32;
        let clo = self.root_ys.partition_point(|&y| y < ylo) as u32;
        let chi = self.root_ys.partition_point(|&y| y < yhi) as u32;
        if a < b && clo < chi {
            self.visit(0, a, b, clo, chi, acc);
        }
    }

    fn visit(&self, id: u32, a: u32, b: u32, clo: u32, chi: u32, acc: &mut Rational) {
        let node = &self.nodes[id as usize];
        if clo >= chi || node.hi <= a || b <= node.lo {
            return;
        }
        if a <= node.lo && node.hi <= b {
            let base = node.prefix_at;
            *acc = &*acc + &(&self.prefix[base + chi as usize] - &self.prefix[base + clo as usize]);
            return;
        }
        let lc = &self.lcount[node.lcount_at..];
        let (llo, lhi) = (lc[clo as usize], lc[chi as usize]);
        self.visit(node.left, a, b, llo, lhi, acc);
        self.visit(node.right, a, b, clo - llo, chi - lhi, acc);
    }
}

fn merge(l: Vec<(u32, u32)>, r: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(l.len() + r.len());
    let (mut i, mut j) = (0, 0);
    while i < l.len() && j < r.len() {
        if l[i] <= r[j] {
            out.push(l[i]);
            i += 1;
        } else {
            out.push(r[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&l[i..]);
    out.extend_from_slice(&r[j..]);
    out
}

struct NodeN {
    lo: u32,
    hi: u32,
    left: u32,
    right: u32,
    bucket: u32,
    assoc: Level,
}

// Nodes this small keep their points and are scanned instead of getting
// children and an associated structure.
const BUCKET: u32 = 8;

struct Bucket {
    // Remaining-dimension ranks in position order, stride `rest`.
    ranks: Vec<u32>,
    weights: Vec<Rational>,
}

/// Segment tree over the first remaining dimension whose nodes own a
/// structure on the remaining ones.
struct Nested {
    xs: Vec<u32>,
    nodes: Vec<NodeN>,
    rest: usize,
    buckets: Vec<Bucket>,
}

impl Nested {
    fn build(pts: &Ranked, axis: usize, ids: &[u32]) -> Self {
        let mut order = ids.to_vec();
        order.sort_unstable_by_key(|&id| (pts.rank(id, axis), id));
        let mut this = Nested {
            xs: order.iter().map(|&id| pts.rank(id, axis)).collect(),
            nodes: Vec::with_capacity(2 * order.len() / BUCKET as usize + 1),
            rest: pts.dim - axis - 1,
            buckets: Vec::new(),
        };
        this.build_node(pts, axis, &order, 0, order.len() as u32);
        this
    }

    fn build_node(&mut self, pts: &Ranked, axis: usize, order: &[u32], lo: u32, hi: u32) -> u32 {
        let id = self.nodes.len();
        let members = &order[lo as usize..hi as usize];
        if hi - lo <= BUCKET {
            self.nodes.push(NodeN {
                lo,
                hi,
                left: NO_CHILD,
                right: NO_CHILD,
                bucket: self.buckets.len() as u32,
                assoc: Level::Empty,
            });
            self.buckets.push(Bucket {
                ranks: members
                    .iter()
                    .flat_map(|&p| (axis + 1..pts.dim).map(move |a| pts.rank(p, a)))
                    .collect(),
                weights: members.iter().map(|&p| pts.weights[p as usize].clone()).collect(),
            });
            return id as u32;
        }
        self.nodes.push(NodeN {
            lo,
            hi,
            left: NO_CHILD,
            right: NO_CHILD,
            bucket: NO_CHILD,
            assoc: Level::build(pts, axis + 1, members),
        });
        let mid = lo + (hi - lo) / 2;
        let left = self.build_node(pts, axis, order, lo, mid);
        let right = self.build_node(pts, axis, order, mid, hi);
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        id as u32
    }

    fn query(&self, ranges: &[(u32, u32)], acc: &mut Rational) {
        let (xlo, xhi) = ranges[0];
        let a = self.xs.partition_point(|&x| x < xlo) as u32;
        let b = self.xs.partition_point(|&x| x < xhi) as u32;
        if a < b {
            self.visit(0, a, b, &ranges[1..], acc);
        }
    }

    fn visit(&self, id: u32, a: u32, b: u32, rest: &[(u32, u32)], acc: &mut Rational) {
        let node = &self.nodes[id as usize];
        if node.hi <= a || b <= node.lo {
            return;
        }
        if node.bucket != NO_CHILD {
            let bucket = &self.buckets[node.bucket as usize];
            for pos in node.lo.max(a)..node.hi.min(b) {
                let j = (pos - node.lo) as usize;
                let ranks = &bucket.ranks[j * self.rest..(j + 1) * self.rest];
                if ranks.iter().zip(rest).all(|(&r, &(lo, hi))| lo <= r && r < hi) {
                    *acc = &*acc + &bucket.weights[j];
                }
            }
            return;
        }
        if a <= node.lo && node.hi <= b {
            node.assoc.query(rest, acc);
            return;
        }
        self.visit(node.left, a, b, rest, acc);
        self.visit(node.right, a, b, rest, acc);
    }
}
