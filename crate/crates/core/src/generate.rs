//! Seeded random instances for tests and benchmarks.

use std::ops::RangeInclusive;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Edge, Instance, MAX_PRICEABLE};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct GeneratorParams {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Fixed costs are drawn uniformly from this integer range (min >= 1).
    pub cost_range: RangeInclusive<i64>,
    /// Demands are drawn uniformly from this integer range (min >= 0).
    pub demand_range: RangeInclusive<i64>,
    pub seed: u64,
    /// Keep the spanning arborescence fixed-cost, so every vertex is
    /// reachable from the root without priceable edges and revenue stays
    /// bounded.
    pub fixed_backbone: bool,
}

impl GeneratorParams {
    pub fn new(n: usize, m: usize, k: usize, seed: u64) -> Self {
        GeneratorParams {
            n,
            m,
            k,
            cost_range: 1..=5,
            demand_range: 1..=1,
            seed,
            fixed_backbone: false,
        }
    }
}

/// Generates a valid instance in which every vertex is reachable from the
/// root. The same parameters always give the same instance.
///
/// A random spanning arborescence rooted at a random vertex supplies the
/// first `n - 1` edges; the remaining edges join uniform random pairs. `k`
/// edges are then made priceable and the edge list is shuffled.
pub fn random_instance(params: &GeneratorParams) -> Result<Instance> {
    let GeneratorParams { n, m, k, .. } = *params;
    if n < 2 {
        return Err(Error::Infeasible("need at least 2 vertices".into()));
    }
    if m < n - 1 {
        return Err(Error::Infeasible(format!("{m} edges cannot connect {n} vertices")));
    }
    if k == 0 || k > MAX_PRICEABLE {
        return Err(Error::Infeasible(format!("k must be in 1..={MAX_PRICEABLE}, got {k}")));
    }
    let spare = if params.fixed_backbone { m - (n - 1) } else { m };
    if k > spare {
        return Err(Error::Infeasible(format!("only {spare} edges can be priceable, asked for {k}")));
    }
    if params.cost_range.is_empty() || *params.cost_range.start() < 1 {
        return Err(Error::Infeasible("cost range must be nonempty and >= 1".into()));
    }
    if params.demand_range.is_empty() || *params.demand_range.start() < 0 {
        return Err(Error::Infeasible("demand range must be nonempty and >= 0".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let root = rng.gen_range(0..n);
    let mut order: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    order.shuffle(&mut rng);

    let mut pairs = Vec::with_capacity(m);
    for (j, &v) in order.iter().enumerate() {
        let pick = rng.gen_range(0..=j);
        let parent = if pick == j { root } else { order[pick] };
        pairs.push((parent, v));
    }
    while pairs.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n - 1);
        let v = if v >= u { v + 1 } else { v };
        pairs.push((u, v));
    }

    let first = if params.fixed_backbone { n - 1 } else { 0 };
    let chosen = index::sample(&mut rng, m - first, k);
    let mut price_index = vec![0usize; m];
    for (slot, offset) in chosen.iter().enumerate() {
        price_index[first + offset] = slot + 1;
    }

    let mut edges: Vec<Edge> = pairs
        .into_iter()
        .zip(price_index)
        .map(|((u, v), i)| {
            if i > 0 {
                Edge::priceable(u, v, i)
            } else {
                Edge::fixed(u, v, Rational::from_integer(rng.gen_range(params.cost_range.clone())))
            }
        })
        .collect();
    edges.shuffle(&mut rng);

    let demand = (0..n)
        .map(|_| Rational::from_integer(rng.gen_range(params.demand_range.clone())))
        .collect();
    Instance::new(n, root, edges, demand)
}
