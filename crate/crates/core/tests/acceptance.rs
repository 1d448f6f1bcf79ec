//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::ops::Bound;
use std::time::{Duration, Instant};

use common::{class_weights, max_revenue_over_all_trees, uniform_prices};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stackspt::lex_dijkstra::{chi_of_set, lex_dijkstra};
use stackspt::{
    build_oracle, heuristic_candidates, naive_revenue, random_instance, solve, ExtRational, GeneratorParams,
    Instance, Interval, PriceFunction, PriceSampler, QueryRect, RangeTree, Rational, ReducedTree, WeightedPointSet,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Criteria 1 and 2 share their trials.
fn equivalence_and_fidelity() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let (mut trials, mut revenue_bad, mut tree_bad) = (0, 0, 0);
    let mut first = None;
    for seed in 0..60u64 {
        let n = rng.gen_range(10..=200);
        let k = rng.gen_range(2..=4);
        let m = rng.gen_range((n - 1 + k).max(2 * n)..=5 * n);
        let params = GeneratorParams {
            demand_range: 0..=3,
            ..GeneratorParams::new(n, m, k, seed)
        };
        let inst = random_instance(&params).unwrap();
        let oracle = build_oracle(&inst).unwrap();
        let sampler = PriceSampler::new(&inst);
        for t in 0..200 {
            let p = if t % 2 == 0 { sampler.sample(&mut rng) } else { uniform_prices(&mut rng, k, 12) };
            trials += 1;
            let fast = oracle.revenue(&p).unwrap();
            let naive = naive_revenue(&inst, &p).unwrap();
            if fast != naive {
                revenue_bad += 1;
                first.get_or_insert(format!("seed {seed} p {p}: fast {fast} naive {naive}"));
            }
            let spt = lex_dijkstra(inst.graph(), &p, inst.root());
            if oracle.reduced_tree(&p) != ReducedTree::contract(inst.graph(), &spt, k) {
                tree_bad += 1;
            }
        }
    }
    let c1 = outcome(
        trials >= 10_000 && revenue_bad == 0,
        format!("{trials} trials on 60 instances, {revenue_bad} mismatches{}", first.map(|f| format!(", first {f}")).unwrap_or_default()),
    );
    let c2 = outcome(tree_bad == 0, format!("{trials} trials, {tree_bad} reduced-tree mismatches"));
    (c1, c2)
}

fn classification(inst: &Instance, p: &PriceFunction) -> (ReducedTree, Vec<Rational>) {
    let spt = lex_dijkstra(inst.graph(), p, inst.root());
    let last = spt.last_priceable(inst.graph());
    (
        ReducedTree::contract(inst.graph(), &spt, inst.k()),
        class_weights(inst, &last, |v| spt.is_reachable(v)),
    )
}

fn tie_break_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let (mut checks, mut bad) = (0, 0);
    for seed in 0..20u64 {
        let params = GeneratorParams {
            demand_range: 0..=3,
            cost_range: 1..=3,
            ..GeneratorParams::new(60, 200, 3, seed)
        };
        let inst = random_instance(&params).unwrap();
        let sampler = PriceSampler::new(&inst);
        for _ in 0..20 {
            let p = sampler.sample(&mut rng);
            let base = classification(&inst, &p);
            let mut perm: Vec<usize> = (0..inst.m()).collect();
            for _ in 0..10 {
                perm.shuffle(&mut rng);
                checks += 1;
                if classification(&inst.with_edge_order(&perm), &p) != base {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{checks} permuted runs, {bad} mismatches"))
}

fn revenue_maximal_tree() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let (mut cases, mut bad, mut trees) = (0, 0, 0);
    for seed in 0..250u64 {
        let n = rng.gen_range(3..=8);
        let k = rng.gen_range(1..=3);
        let m = rng.gen_range((n - 1 + k).max(n)..=3 * n);
        let params = GeneratorParams {
            demand_range: 0..=3,
            cost_range: 1..=3,
            ..GeneratorParams::new(n, m, k, seed)
        };
        let inst = random_instance(&params).unwrap();
        let sampler = PriceSampler::new(&inst);
        for _ in 0..4 {
            let p = sampler.sample(&mut rng);
            let (best, count) = max_revenue_over_all_trees(&inst, &p);
            cases += 1;
            trees += count;
            if naive_revenue(&inst, &p).unwrap() != best {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("250 instances, {cases} price vectors, {trees} trees enumerated, {bad} mismatches"))
}

fn random_bound(rng: &mut ChaCha8Rng, span: i64) -> Bound<ExtRational> {
    let v = ExtRational::from(rng.gen_range(-span..=span));
    match rng.gen_range(0..5) {
        0 => Bound::Unbounded,
        1 | 2 => Bound::Included(v),
        _ => Bound::Excluded(v),
    }
}

fn range_tree_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let (mut queries, mut bad) = (0, 0);
    let mut configs = Vec::new();
    for dim in 1..=4 {
        for n in [1usize, 100, 1000, 10_000] {
            // A coarse grid makes many points sit exactly on query boundaries.
            let span = 20;
            let mut pts = WeightedPointSet::new(dim);
            for _ in 0..n {
                let c = (0..dim)
                    .map(|_| {
                        if rng.gen_ratio(1, 20) {
                            ExtRational::NegInfinity
                        } else {
                            ExtRational::from(Rational::new(rng.gen_range(-2 * span..=2 * span), 2))
                        }
                    })
                    .collect();
                pts.push(c, Rational::new(rng.gen_range(0..7), rng.gen_range(1..4))).unwrap();
            }
            let tree = RangeTree::build(&pts);
            for _ in 0..1000 {
                let rect = QueryRect::new(
                    (0..dim)
                        .map(|_| Interval {
                            lower: random_bound(&mut rng, span),
                            upper: random_bound(&mut rng, span),
                        })
                        .collect(),
                );
                let scan: Rational = pts.iter().filter(|(c, _)| rect.contains(c)).map(|(_, w)| w.clone()).sum();
                queries += 1;
                if tree.query(&rect).unwrap() != scan {
                    bad += 1;
                }
            }
            configs.push(format!("d{dim}/n{n}"));
        }
    }
    outcome(bad == 0, format!("{} configurations, {queries} rectangles, {bad} mismatches", configs.len()))
}

fn chi_injectivity() -> Outcome {
    let mut pairs = 0u64;
    let mut bad = 0u64;
    for k in 1..=12usize {
        let subsets: Vec<Vec<usize>> = (0u32..1 << k).map(|mask| (1..=k).filter(|i| mask >> (i - 1) & 1 == 1).collect()).collect();
        let fingerprints: Vec<u64> = subsets.iter().map(|s| chi_of_set(s.iter().copied())).collect();
        for a in 0..subsets.len() {
            for b in 0..subsets.len() {
                pairs += 1;
                if (fingerprints[a] == fingerprints[b]) != (subsets[a] == subsets[b]) {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{pairs} subset pairs for k <= 12, {bad} violations"))
}

struct BenchRow {
    n: usize,
    build: Duration,
    fast: Duration,
    naive: Duration,
    nonempty: usize,
    agree: bool,
}

fn performance_trend() -> Outcome {
    let queries = 200;
    let mut rows = Vec::new();
    for (idx, e) in (10..=17).enumerate() {
        let n = 1usize << e;
        let inst = random_instance(&GeneratorParams::new(n, 4 * n, 2, 7000 + idx as u64)).unwrap();
        let ps = PriceSampler::new(&inst).sample_seeded(idx as u64, queries);
        let started = Instant::now();
        let oracle = build_oracle(&inst).unwrap();
        let trees: Vec<ReducedTree> = ps.iter().map(|p| oracle.reduced_tree(p)).collect();
        oracle.warm_up(&trees).unwrap();
        let build = started.elapsed();
        let mut fast = Duration::MAX;
        let mut answers = Vec::new();
        for _ in 0..5 {
            let started = Instant::now();
            answers = ps.iter().map(|p| oracle.revenue(p).unwrap()).collect();
            fast = fast.min(started.elapsed());
        }
        let started = Instant::now();
        let naive: Vec<Rational> = ps.iter().map(|p| naive_revenue(&inst, p).unwrap()).collect();
        let naive_time = started.elapsed();
        rows.push(BenchRow {
            n,
            build,
            fast: fast / queries as u32,
            naive: naive_time / queries as u32,
            nonempty: trees.iter().filter(|t| !t.is_empty()).count(),
            agree: answers == naive,
        });
    }
    for r in &rows {
        println!(
            "    n={:<7} build {:>8.3} s  fast {:>9.2} us  naive {:>11.2} us  speedup {:>9.1}  nonempty trees {}/{}",
            r.n,
            r.build.as_secs_f64(),
            r.fast.as_secs_f64() * 1e6,
            r.naive.as_secs_f64() * 1e6,
            r.naive.as_secs_f64() / r.fast.as_secs_f64(),
            r.nonempty,
            queries
        );
    }
    let first = rows.first().unwrap();
    let last = rows.last().unwrap();
    let speedup = last.naive.as_secs_f64() / last.fast.as_secs_f64();
    let growth = last.fast.as_secs_f64() / first.fast.as_secs_f64();
    let agree = rows.iter().all(|r| r.agree);
    outcome(
        speedup >= 10.0 && growth <= 8.0 && agree,
        format!("speedup at n=2^17 {speedup:.1}x (need >= 10), fast-query growth 2^10..2^17 {growth:.2}x (need <= 8), answers agree: {agree}"),
    )
}

fn solver_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let mut beaten = 0;
    let mut samples = 0;
    for seed in 0..20u64 {
        let params = GeneratorParams {
            demand_range: 0..=3,
            fixed_backbone: true,
            ..GeneratorParams::new(30, 90, 1, seed)
        };
        let inst = random_instance(&params).unwrap();
        let cands = heuristic_candidates(&inst);
        let res = solve(&inst, &cands).unwrap();
        let top = cands.per_edge(1).last().cloned().unwrap_or_else(|| Rational::from_integer(10));
        let denom = 16;
        let top_scaled = (top.to_f64() * 2.0 * denom as f64).ceil() as i64;
        for _ in 0..10_000 {
            let p = PriceFunction::new(vec![Rational::new(rng.gen_range(1..=top_scaled), denom)], 1).unwrap();
            samples += 1;
            if naive_revenue(&inst, &p).unwrap() > res.best_revenue {
                beaten += 1;
            }
        }
    }

    let mut sweeps = 0;
    let mut mismatches = 0;
    let mut seed = 0u64;
    while sweeps < 10 {
        seed += 1;
        let params = GeneratorParams {
            demand_range: 0..=3,
            cost_range: 1..=4,
            ..GeneratorParams::new(8, 18, 2, 500 + seed)
        };
        let inst = random_instance(&params).unwrap();
        let cands = heuristic_candidates(&inst);
        let Ok(res) = solve(&inst, &cands) else { continue };
        sweeps += 1;
        let axes: Vec<Vec<Rational>> = (1..=2)
            .map(|i| {
                let v: Vec<Rational> = cands.per_edge(i).cloned().collect();
                if v.is_empty() {
                    vec![res.best_price.get(i).clone()]
                } else {
                    v
                }
            })
            .collect();
        let mut best: Option<(Rational, PriceFunction)> = None;
        for a in &axes[0] {
            for b in &axes[1] {
                let p = PriceFunction::new(vec![a.clone(), b.clone()], 2).unwrap();
                let r = naive_revenue(&inst, &p).unwrap();
                if best.as_ref().is_none_or(|(br, _)| r > *br) {
                    best = Some((r, p));
                }
            }
        }
        let (r, p) = best.unwrap();
        if (r, p) != (res.best_revenue.clone(), res.best_price.clone()) {
            mismatches += 1;
        }
    }
    outcome(
        beaten == 0 && mismatches == 0,
        format!("k=1: {samples} random prices, {beaten} beat the solver; k=2: {sweeps} sweeps, {mismatches} mismatches"),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome, Duration)> = Vec::new();
    let timed = |f: &dyn Fn() -> Outcome| {
        let started = Instant::now();
        let o = f();
        (o, started.elapsed())
    };

    let started = Instant::now();
    let (c1, c2) = equivalence_and_fidelity();
    let t = started.elapsed();
    results.push((1, "oracle equivalence", c1, t));
    results.push((2, "model-graph fidelity", c2, t));
    let (o, t) = timed(&tie_break_invariance);
    results.push((3, "tie-break well-definedness", o, t));
    let (o, t) = timed(&revenue_maximal_tree);
    results.push((4, "revenue-maximal shortest-path tree", o, t));
    let (o, t) = timed(&range_tree_correctness);
    results.push((5, "range-tree correctness", o, t));
    let (o, t) = timed(&chi_injectivity);
    results.push((6, "fingerprint injectivity", o, t));
    let (o, t) = timed(&performance_trend);
    results.push((7, "performance trend", o, t));
    let (o, t) = timed(&solver_sanity);
    results.push((8, "solver sanity", o, t));

    let mut all = true;
    for (num, name, o, t) in &results {
        all &= o.pass;
        println!(
            "criterion {num} {name}: {} ({}; {:.1} s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.as_secs_f64()
        );
    }
    if !all {
        std::process::exit(1);
    }
}
