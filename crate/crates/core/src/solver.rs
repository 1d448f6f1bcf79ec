//! Price search over finite candidate sets, and the equivalence harness
//! that checks the fast oracle against the direct computation.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{serialize_instance, Instance, PriceFunction};
use crate::lex_dijkstra::{lex_dijkstra, naive_revenue};
use crate::model_graph::{DistanceTables, ModelGraph, ReducedTree};
use crate::oracle::{Fault, RevenueOracle};
use crate::rational::Rational;

/// Candidate prices per priceable edge, plus whole vectors to try as-is.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateSet {
    per_edge: Vec<BTreeSet<Rational>>,
    vectors: Vec<PriceFunction>,
}

impl CandidateSet {
    pub fn new(k: usize) -> Self {
        CandidateSet {
            per_edge: vec![BTreeSet::new(); k],
            vectors: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.per_edge.len()
    }

    pub fn add(&mut self, i: usize, price: Rational) -> Result<()> {
        if i == 0 || i > self.k() {
            return Err(Error::Price(format!("no priceable edge e_{i}")));
        }
        if !price.is_positive() {
            return Err(Error::Price(format!("candidate {price} for e_{i} is not positive")));
        }
        self.per_edge[i - 1].insert(price);
        Ok(())
    }

    pub fn add_vector(&mut self, p: PriceFunction) -> Result<()> {
        if p.k() != self.k() {
            return Err(Error::Price(format!("expected {} prices, got {}", self.k(), p.k())));
        }
        self.vectors.push(p);
        Ok(())
    }

    /// Sorted ascending, without duplicates.
    pub fn per_edge(&self, i: usize) -> impl Iterator<Item = &Rational> {
        self.per_edge[i - 1].iter()
    }

    pub fn vectors(&self) -> &[PriceFunction] {
        &self.vectors
    }

    /// Reads `cand <i> <price>` and `vector <p1> ... <pk>` lines. Blank
    /// lines and `#` comments are ignored. A file listing nothing is an
    /// error.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let mut set = CandidateSet::new(k);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            let mut words = content.split_whitespace();
            let at = |e: Error| Error::parse(line, e.to_string());
            match words.next() {
                None => {}
                Some("cand") => {
                    let rest: Vec<&str> = words.collect();
                    let [i, price] = rest[..] else {
                        return Err(Error::parse(line, "expected `cand <i> <price>`"));
                    };
                    let i: usize = i.parse().map_err(|_| Error::parse(line, format!("bad edge index {i:?}")))?;
                    set.add(i, price.parse().map_err(at)?).map_err(at)?;
                }
                Some("vector") => {
                    let prices = words.map(str::parse).collect::<Result<Vec<Rational>>>().map_err(at)?;
                    set.add_vector(PriceFunction::new(prices, k).map_err(at)?).map_err(at)?;
                }
                Some(other) => return Err(Error::parse(line, format!("unknown directive {other:?}"))),
            }
        }
        if set.vectors.is_empty() && set.per_edge.iter().all(BTreeSet::is_empty) {
            return Err(Error::EmptyCandidateSpace);
        }
        Ok(set)
    }
}

/// Per edge, the positive prices at which some vertex's route through the
/// edge ties its priceable-free route:
/// `d_inf(r, v) - d_inf(r, s_i) - d_inf(t_i, v)`.
///
/// For `k = 1` the optimum is among these. For larger `k` they are only a
/// heuristic.
pub fn heuristic_candidates(inst: &Instance) -> CandidateSet {
    heuristic_from_tables(inst, &DistanceTables::compute(inst))
}

fn heuristic_from_tables(inst: &Instance, tables: &DistanceTables) -> CandidateSet {
    let mut set = CandidateSet::new(inst.k());
    for i in 1..=inst.k() {
        let Some(to_tail) = tables.from_root(tables.tail(i)).finite() else {
            continue;
        };
        for v in 0..inst.n() {
            let (Some(direct), Some(below)) = (tables.from_root(v).finite(), tables.from_head(i, v).finite()) else {
                continue;
            };
            let gap = &(direct - to_tail) - below;
            if gap.is_positive() {
                set.per_edge[i - 1].insert(gap);
            }
        }
    }
    set
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub best_price: PriceFunction,
    pub best_revenue: Rational,
    pub evaluations: usize,
    pub wall_time: Duration,
}

/// One oracle for both paths: the fast one needs `k >= 2`.
enum Evaluator<'a> {
    Naive(&'a Instance),
    Fast(Box<RevenueOracle>),
}

impl Evaluator<'_> {
    fn new(inst: &Instance) -> Result<Evaluator<'_>> {
        if inst.k() < 2 {
            Ok(Evaluator::Naive(inst))
        } else {
            Ok(Evaluator::Fast(Box::new(RevenueOracle::build(inst)?)))
        }
    }

    fn revenue(&self, p: &PriceFunction) -> Result<Rational> {
        match self {
            Evaluator::Naive(inst) => naive_revenue(inst, p),
            Evaluator::Fast(oracle) => oracle.revenue(p),
        }
    }
}

/// Search space in lexicographic order: the cross product of the per-edge
/// lists, then the explicit vectors. An empty list contributes one price
/// too high for the edge ever to be used.
struct Space {
    axes: Vec<Vec<Rational>>,
    product: usize,
    vectors: Vec<PriceFunction>,
}

impl Space {
    fn new(inst: &Instance, cands: &CandidateSet) -> Result<Self> {
        if cands.k() != inst.k() {
            return Err(Error::Price(format!("candidates are for {} edges, instance has {}", cands.k(), inst.k())));
        }
        // Explicit vectors alone skip the cross product unless some edge
        // also lists prices.
        let any = cands.vectors.is_empty() || cands.per_edge.iter().any(|s| !s.is_empty());
        // Above every path length, so an edge priced this way is never used.
        let prohibitive = inst
            .edges()
            .iter()
            .filter_map(|e| e.fixed_cost().cloned())
            .fold(Rational::one(), |acc, c| &acc + &c);
        let axes: Vec<Vec<Rational>> = if any {
            cands
                .per_edge
                .iter()
                .map(|s| if s.is_empty() { vec![prohibitive.clone()] } else { s.iter().cloned().collect() })
                .collect()
        } else {
            Vec::new()
        };
        let product = if any {
            axes.iter()
                .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
                .ok_or_else(|| Error::Infeasible("candidate cross product is too large".into()))?
        } else {
            0
        };
        let space = Space {
            axes,
            product,
            vectors: cands.vectors.clone(),
        };
        if space.len() == 0 {
            return Err(Error::EmptyCandidateSpace);
        }
        Ok(space)
    }

    fn len(&self) -> usize {
        self.product + self.vectors.len()
    }

    fn get(&self, idx: usize) -> PriceFunction {
        if idx >= self.product {
            return self.vectors[idx - self.product].clone();
        }
        let mut rest = idx;
        let mut prices = vec![Rational::zero(); self.axes.len()];
        for (slot, axis) in prices.iter_mut().zip(&self.axes).rev() {
            *slot = axis[rest % axis.len()].clone();
            rest /= axis.len();
        }
        PriceFunction::new(prices, self.axes.len()).expect("candidates are positive")
    }

    /// For each edge and each power-of-two magnitude among its candidates,
    /// one vector with that edge in the bucket and the others at their
    /// smallest candidate.
    fn warm_up_vectors(&self) -> Vec<PriceFunction> {
        let mut out = Vec::new();
        for (i, axis) in self.axes.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for price in axis {
                if seen.insert(price.to_f64().log2().floor() as i64) {
                    let mut prices: Vec<Rational> = self.axes.iter().map(|a| a[0].clone()).collect();
                    prices[i] = price.clone();
                    out.push(PriceFunction::new(prices, self.axes.len()).expect("candidates are positive"));
                }
            }
        }
        out
    }
}

/// Better revenue wins; equal revenue goes to the lexicographically
/// smaller vector.
fn better(a: &(Rational, PriceFunction), b: &(Rational, PriceFunction)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1.as_slice() < b.1.as_slice())
}

fn best_in(space: &Space, eval: &Evaluator, range: std::ops::Range<usize>) -> Result<Option<(Rational, PriceFunction)>> {
    let mut best: Option<(Rational, PriceFunction)> = None;
    for idx in range {
        let p = space.get(idx);
        let cand = (eval.revenue(&p)?, p);
        if best.as_ref().is_none_or(|b| better(&cand, b)) {
            best = Some(cand);
        }
    }
    Ok(best)
}

/// Evaluates every candidate and returns the best, single-threaded.
pub fn solve(inst: &Instance, cands: &CandidateSet) -> Result<SolveResult> {
    solve_parallel(inst, cands, 1)
}

/// As [`solve`], splitting the candidate order into `threads` contiguous
/// blocks. The answer does not depend on `threads`.
pub fn solve_parallel(inst: &Instance, cands: &CandidateSet, threads: usize) -> Result<SolveResult> {
    let started = Instant::now();
    let space = Space::new(inst, cands)?;
    let eval = Evaluator::new(inst)?;
    let threads = threads.max(1);

    if let Evaluator::Fast(oracle) = &eval {
        let trees: BTreeSet<ReducedTree> = space.warm_up_vectors().iter().map(|p| oracle.reduced_tree(p)).collect();
        oracle.warm_up(&trees)?;
    }

    let total = space.len();
    let best = if threads == 1 {
        best_in(&space, &eval, 0..total)?
    } else {
        let block = total.div_ceil(threads);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Infeasible(format!("thread pool: {e}")))?;
        let partial: Vec<Option<(Rational, PriceFunction)>> = pool.install(|| {
            (0..threads)
                .into_par_iter()
                .map(|t| best_in(&space, &eval, (t * block).min(total)..((t + 1) * block).min(total)))
                .collect::<Result<_>>()
        })?;
        partial.into_iter().flatten().fold(None, |acc, cand| match acc {
            Some(b) if !better(&cand, &b) => Some(b),
            _ => Some(cand),
        })
    };
    let (best_revenue, best_price) = best.expect("nonempty space");
    Ok(SolveResult {
        best_price,
        best_revenue,
        evaluations: total,
        wall_time: started.elapsed(),
    })
}

/// Random price vectors mixing tie-prone breakpoints with small integers
/// and halves, so that ties between routes come up often.
#[derive(Clone, Debug)]
pub struct PriceSampler {
    breakpoints: Vec<Vec<Rational>>,
    scale: i64,
}

impl PriceSampler {
    pub fn new(inst: &Instance) -> Self {
        let tables = DistanceTables::compute(inst);
        Self::from_tables(inst, &tables)
    }

    fn from_tables(inst: &Instance, tables: &DistanceTables) -> Self {
        let cands = heuristic_from_tables(inst, tables);
        let longest = (0..inst.n())
            .filter_map(|v| tables.from_root(v).finite().map(Rational::to_f64))
            .fold(1.0f64, f64::max);
        PriceSampler {
            breakpoints: (1..=inst.k()).map(|i| cands.per_edge(i).cloned().collect()).collect(),
            scale: longest.ceil().clamp(1.0, 1e9) as i64,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> PriceFunction {
        let prices = self
            .breakpoints
            .iter()
            .map(|bp| {
                if !bp.is_empty() && rng.gen_ratio(1, 3) {
                    bp[rng.gen_range(0..bp.len())].clone()
                } else if rng.gen_bool(0.5) {
                    Rational::from_integer(rng.gen_range(1..=self.scale))
                } else {
                    Rational::new(rng.gen_range(1..=2 * self.scale), 2)
                }
            })
            .collect();
        PriceFunction::new(prices, self.breakpoints.len()).expect("sampled prices are positive")
    }

    /// `count` vectors from a generator seeded with `seed`.
    pub fn sample_seeded(&self, seed: u64, count: usize) -> Vec<PriceFunction> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample(&mut rng)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: usize,
    pub prices: PriceFunction,
    pub fast: Rational,
    pub naive: Rational,
    pub tree_match: bool,
    pub partition_ok: bool,
}

impl TrialRecord {
    pub fn pass(&self) -> bool {
        self.fast == self.naive && self.tree_match && self.partition_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub trials: Vec<TrialRecord>,
    /// Instance and price vector of the first failing trial.
    pub counterexample: Option<String>,
}

pub const VERIFY_CSV_HEADER: &str = "trial,prices,fast,naive,tree_match,partition_ok,pass";

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn failures(&self) -> usize {
        self.trials.iter().filter(|t| !t.pass()).count()
    }

    /// Rows without the header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for t in &self.trials {
            writeln!(
                out,
                "{},\"{}\",{},{},{},{},{}",
                t.trial,
                t.prices,
                t.fast,
                t.naive,
                t.tree_match,
                t.partition_ok,
                t.pass()
            )
            .unwrap();
        }
        out
    }
}

/// Checks, for `trials` sampled price vectors, that the fast oracle agrees
/// with the direct computation, that the model graph yields the full
/// graph's reduced tree, and that the per-edge demand classes match the
/// full graph's. With one priceable edge only the tree check is
/// meaningful; the revenue columns then both come from the direct path.
pub fn verify_oracle(inst: &Instance, trials: usize, seed: u64) -> Result<VerifyReport> {
    verify_oracle_with_fault(inst, trials, seed, Fault::None)
}

#[doc(hidden)]
pub fn verify_oracle_with_fault(inst: &Instance, trials: usize, seed: u64, fault: Fault) -> Result<VerifyReport> {
    let tables = DistanceTables::compute(inst);
    let model = ModelGraph::build(&tables);
    let sampler = PriceSampler::from_tables(inst, &tables);
    let oracle = if inst.k() >= 2 {
        Some(RevenueOracle::build(inst)?.with_fault(fault))
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport {
        trials: Vec::with_capacity(trials),
        counterexample: None,
    };
    for trial in 0..trials {
        let p = sampler.sample(&mut rng);
        let naive = naive_revenue(inst, &p)?;
        let spt = lex_dijkstra(inst.graph(), &p, inst.root());
        let full_tree = ReducedTree::contract(inst.graph(), &spt, inst.k());
        let tree_match = model.reduced_tree(&p) == full_tree;

        let last = spt.last_priceable(inst.graph());
        let mut classes = vec![Rational::zero(); inst.k() + 1];
        for v in (0..inst.n()).filter(|&v| spt.is_reachable(v)) {
            let slot = last[v].unwrap_or(0);
            classes[slot] = &classes[slot] + inst.demand(v);
        }
        let (fast, partition_ok) = match &oracle {
            Some(oracle) => {
                let b = oracle.breakdown(&p)?;
                let mut shares = vec![Rational::zero(); inst.k() + 1];
                for s in &b.shares {
                    shares[s.edge] = s.demand.clone();
                }
                let covered: Rational = shares.iter().chain([&classes[0]]).sum();
                let everyone: Rational = inst.demands().iter().sum();
                (b.total, shares[1..] == classes[1..] && covered == everyone)
            }
            None => (naive.clone(), true),
        };
        let record = TrialRecord {
            trial,
            prices: p,
            fast,
            naive,
            tree_match,
            partition_ok,
        };
        if !record.pass() && report.counterexample.is_none() {
            report.counterexample = Some(format!(
                "# trial {trial}: prices {}, fast {}, naive {}, tree_match {}, partition_ok {}\n{}",
                record.prices,
                record.fast,
                record.naive,
                record.tree_match,
                record.partition_ok,
                serialize_instance(inst)
            ));
        }
        report.trials.push(record);
    }
    Ok(report)
}
