//! Polylogarithmic revenue queries.
//!
//! For a price function `p` with reduced tree `R`, a vertex `v` takes its
//! last priceable edge from `e_i` exactly when the route through
//! `sigma(e_i, R)` and then fixed edges to `v` beats, under the tie-break
//! order, both the priceable-free route and the route through every other
//! `sigma(e_j, R)`. Moving everything that does not depend on `p` to one
//! side turns each of those comparisons into a coordinate bound on a point
//! `p_v`, so `phi(V(e_i, p))` is one dominance query on a range tree built
//! once per `(R, e_i)`.

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use crate::error::{Error, Result};
use crate::instance::{Instance, PriceFunction};
use crate::model_graph::{seq_order_lt, DistanceTables, ModelGraph, ReducedTree};
use crate::range_tree::{Interval, QueryRect, RangeTree, WeightedPointSet};
use crate::rational::{ExtRational, Rational};

/// Deliberate corruption for exercising the verification harness.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// Adds one to every revenue answer.
    SkewRevenue,
}

type Slot = Arc<Mutex<Option<Arc<RangeTree>>>>;

/// `phi(V(e_i, p))` and the price collected per unit of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeShare {
    pub edge: usize,
    pub sequence_price: Rational,
    pub demand: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevenueBreakdown {
    pub tree: ReducedTree,
    pub shares: Vec<EdgeShare>,
    pub total: Rational,
}

pub struct RevenueOracle {
    instance: Instance,
    tables: DistanceTables,
    model: ModelGraph,
    unreachable_demand: Option<usize>,
    memo: RwLock<HashMap<(ReducedTree, usize), Slot>>,
    builds: AtomicUsize,
    fault: Fault,
}

/// Preprocesses `inst`. Range trees are built lazily, on the first query
/// that needs them.
pub fn build_oracle(inst: &Instance) -> Result<RevenueOracle> {
    RevenueOracle::build(inst)
}

impl RevenueOracle {
    pub fn build(inst: &Instance) -> Result<Self> {
        if inst.k() < 2 {
            return Err(Error::TooFewPriceable(inst.k()));
        }
        let tables = DistanceTables::compute(inst);
        let model = ModelGraph::build(&tables);
        Ok(RevenueOracle {
            instance: inst.clone(),
            unreachable_demand: first_unreachable_demand(inst),
            tables,
            model,
            memo: RwLock::new(HashMap::new()),
            builds: AtomicUsize::new(0),
            fault: Fault::None,
        })
    }

    #[doc(hidden)]
    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = fault;
        self
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn tables(&self) -> &DistanceTables {
        &self.tables
    }

    pub fn model(&self) -> &ModelGraph {
        &self.model
    }

    pub fn reduced_tree(&self, p: &PriceFunction) -> ReducedTree {
        self.model.reduced_tree(p)
    }

    /// Number of range trees constructed so far.
    pub fn builds(&self) -> usize {
        self.builds.load(Ordering::Relaxed)
    }

    /// The point set behind `DS(R, e_i)`: one point per vertex reachable
    /// from `t_i` without priceable edges, with one coordinate per edge of
    /// `R` in ascending index order.
    pub fn embed_points(&self, r: &ReducedTree, i: usize) -> Result<WeightedPointSet> {
        if i == 0 || i > r.k() || !r.contains(i) {
            return Err(Error::Unrealizable(format!("e_{i} is not in {r}")));
        }
        let axes: Vec<usize> = r.edges().collect();
        let mut gaps = Vec::with_capacity(axes.len());
        for &j in &axes {
            match r.sequence_of(j).w_infinity(&self.tables)? {
                ExtRational::Finite(w) => gaps.push(w),
                _ => return Err(Error::Unrealizable(format!("sequence of e_{j} in {r} has no finite gap length"))),
            }
        }
        let own = axes.iter().position(|&j| j == i).expect("i is an axis");
        let mut points = WeightedPointSet::new(axes.len());
        for v in 0..self.instance.n() {
            let Some(dti) = self.tables.from_head(i, v).finite() else {
                continue;
            };
            let base = &gaps[own] + dti;
            let coords = axes
                .iter()
                .zip(&gaps)
                .map(|(&j, wj)| {
                    let other = if j == i {
                        self.tables.from_root(v).finite().map(|d| &base - d)
                    } else {
                        self.tables.from_head(j, v).finite().map(|d| &(&base - wj) - d)
                    };
                    other.map_or(ExtRational::NegInfinity, ExtRational::Finite)
                })
                .collect();
            points.push(coords, self.instance.demand(v).clone())?;
        }
        Ok(points)
    }

    /// Dominance box whose points are exactly `V(e_i, p)`, for `p` whose
    /// reduced tree is `r`.
    pub fn query_intervals(&self, r: &ReducedTree, i: usize, p: &PriceFunction) -> Result<QueryRect> {
        let own = r.sequence_of(i);
        if own.is_empty() {
            return Err(Error::Unrealizable(format!("e_{i} is not in {r}")));
        }
        let own_price = own.price(p);
        let intervals = r
            .edges()
            .map(|j| {
                if j == i {
                    return Interval::at_most(ExtRational::Finite(-&own_price));
                }
                let other = r.sequence_of(j);
                let bound = ExtRational::Finite(&other.price(p) - &own_price);
                if seq_order_lt(&own, &other, p) {
                    Interval::at_most(bound)
                } else {
                    Interval::below(bound)
                }
            })
            .collect();
        Ok(QueryRect::new(intervals))
    }

    /// `DS(R, e_i)`, building it on first use. Concurrent first requests
    /// for one key wait on a single construction.
    pub fn structure(&self, r: &ReducedTree, i: usize) -> Result<Arc<RangeTree>> {
        let key = (r.clone(), i);
        let slot = {
            let memo = self.memo.read().expect("memo lock poisoned");
            memo.get(&key).cloned()
        };
        let slot = match slot {
            Some(s) => s,
            None => {
                let mut memo = self.memo.write().expect("memo lock poisoned");
                memo.entry(key).or_default().clone()
            }
        };
        let mut guard = slot.lock().expect("structure lock poisoned");
        if let Some(tree) = guard.as_ref() {
            return Ok(tree.clone());
        }
        let tree = Arc::new(RangeTree::build(&self.embed_points(r, i)?));
        self.builds.fetch_add(1, Ordering::Relaxed);
        *guard = Some(tree.clone());
        Ok(tree)
    }

    /// Materializes every structure the given reduced trees need.
    pub fn warm_up<'a>(&self, trees: impl IntoIterator<Item = &'a ReducedTree>) -> Result<()> {
        for r in trees {
            for i in r.edges() {
                self.structure(r, i)?;
            }
        }
        Ok(())
    }

    pub fn breakdown(&self, p: &PriceFunction) -> Result<RevenueBreakdown> {
        if p.k() != self.instance.k() {
            return Err(Error::Price(format!("expected {} prices, got {}", self.instance.k(), p.k())));
        }
        if let Some(vertex) = self.unreachable_demand {
            return Err(Error::Unreachable { vertex });
        }
        let tree = self.reduced_tree(p);
        let mut shares = Vec::with_capacity(tree.edge_count());
        let mut total = Rational::zero();
        for i in tree.edges() {
            let ds = self.structure(&tree, i)?;
            let demand = ds.query(&self.query_intervals(&tree, i, p)?)?;
            let sequence_price = tree.sequence_of(i).price(p);
            total = &total + &(&sequence_price * &demand);
            shares.push(EdgeShare {
                edge: i,
                sequence_price,
                demand,
            });
        }
        if self.fault == Fault::SkewRevenue {
            total = &total + &Rational::one();
        }
        Ok(RevenueBreakdown { tree, shares, total })
    }

    pub fn revenue(&self, p: &PriceFunction) -> Result<Rational> {
        Ok(self.breakdown(p)?.total)
    }
}

fn first_unreachable_demand(inst: &Instance) -> Option<usize> {
    let mut seen = vec![false; inst.n()];
    let mut queue = VecDeque::from([inst.root()]);
    seen[inst.root()] = true;
    while let Some(u) = queue.pop_front() {
        for (_, e) in inst.graph().out_edges(u) {
            if !seen[e.head] {
                seen[e.head] = true;
                queue.push_back(e.head);
            }
        }
    }
    (0..inst.n()).find(|&v| !seen[v] && inst.demand(v).is_positive())
}
