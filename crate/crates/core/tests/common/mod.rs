//! Brute-force references shared by the integration tests. Nothing here
//! calls the library's shortest-path code.

#![allow(dead_code)]

use rand::Rng;
use stackspt::{EdgeKind, Instance, PriceFunction, Rational};

/// Edge weight under `p`; `None` drops the edge.
pub fn weight(kind: &EdgeKind, p: Option<&PriceFunction>) -> Option<Rational> {
    match (kind, p) {
        (EdgeKind::Fixed(c), _) => Some(c.clone()),
        (EdgeKind::Priceable(i), Some(p)) => Some(p.get(*i).clone()),
        (EdgeKind::Priceable(_), None) => None,
    }
}

/// Bellman-Ford distances from `source`. Priceable edges are dropped when
/// `p` is `None`.
pub fn bellman_ford(inst: &Instance, source: usize, p: Option<&PriceFunction>) -> Vec<Option<Rational>> {
    let mut dist: Vec<Option<Rational>> = vec![None; inst.n()];
    dist[source] = Some(Rational::zero());
    for _ in 0..inst.n() {
        let mut changed = false;
        for e in inst.edges() {
            let (Some(du), Some(w)) = (dist[e.tail].clone(), weight(&e.kind, p)) else {
                continue;
            };
            let cand = &du + &w;
            if dist[e.head].as_ref().is_none_or(|d| cand < *d) {
                dist[e.head] = Some(cand);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Maximum of `rho(T, p)` over every shortest-path tree `T` for the plain
/// weights `w_p`, found by enumerating every choice of tight parent edge.
/// Returns the maximum and the number of trees enumerated.
pub fn max_revenue_over_all_trees(inst: &Instance, p: &PriceFunction) -> (Rational, usize) {
    let dist = bellman_ford(inst, inst.root(), Some(p));
    let mut choices: Vec<Vec<usize>> = vec![Vec::new(); inst.n()];
    for (id, e) in inst.edges().iter().enumerate() {
        if let (Some(du), Some(dv)) = (&dist[e.tail], &dist[e.head]) {
            if e.head != inst.root() && &(du + &weight(&e.kind, Some(p)).unwrap()) == dv {
                choices[e.head].push(id);
            }
        }
    }
    let vertices: Vec<usize> = (0..inst.n()).filter(|&v| v != inst.root() && dist[v].is_some()).collect();
    let mut pick = vec![0usize; vertices.len()];
    let mut best: Option<Rational> = None;
    let mut trees = 0;
    loop {
        trees += 1;
        let mut parent = vec![None; inst.n()];
        for (slot, &v) in vertices.iter().enumerate() {
            parent[v] = Some(choices[v][pick[slot]]);
        }
        let mut total = Rational::zero();
        for v in 0..inst.n() {
            let mut cur = v;
            let mut price = Rational::zero();
            while let Some(id) = parent[cur] {
                let e = &inst.edges()[id];
                if let EdgeKind::Priceable(i) = e.kind {
                    price = &price + p.get(i);
                }
                cur = e.tail;
            }
            total = &total + &(inst.demand(v) * &price);
        }
        if best.as_ref().is_none_or(|b| total > *b) {
            best = Some(total);
        }
        // Next combination, odometer style.
        let mut slot = 0;
        loop {
            if slot == vertices.len() {
                return (best.unwrap(), trees);
            }
            pick[slot] += 1;
            if pick[slot] < choices[vertices[slot]].len() {
                break;
            }
            pick[slot] = 0;
            slot += 1;
        }
    }
}

/// Uniform rationals `a/b` with `b` in `1..=4` and value in `(0, max]`.
pub fn uniform_prices(rng: &mut impl Rng, k: usize, max: i64) -> PriceFunction {
    let prices = (0..k)
        .map(|_| {
            let b = rng.gen_range(1..=4);
            Rational::new(rng.gen_range(1..=max * b), b)
        })
        .collect();
    PriceFunction::new(prices, k).unwrap()
}

/// Demand collected per last priceable edge (slot 0: none) in a
/// classification given as one optional edge index per vertex.
pub fn class_weights(inst: &Instance, last: &[Option<usize>], reachable: impl Fn(usize) -> bool) -> Vec<Rational> {
    let mut classes = vec![Rational::zero(); inst.k() + 1];
    for v in (0..inst.n()).filter(|&v| reachable(v)) {
        let slot = last[v].unwrap_or(0);
        classes[slot] = &classes[slot] + inst.demand(v);
    }
    classes
}
