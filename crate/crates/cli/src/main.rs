use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use stackspt::oracle::Fault;
use stackspt::solver::{verify_oracle_with_fault, VERIFY_CSV_HEADER};
use stackspt::{
    build_oracle, heuristic_candidates, naive_revenue, parse_instance, random_instance, serialize_instance,
    solve_parallel, CandidateSet, GeneratorParams, Instance, PriceFunction, PriceSampler, Rational,
};

#[derive(Parser)]
#[command(name = "stackspt", version, about = "Revenue oracle for shortest-path-tree pricing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance.
    Gen(GenArgs),
    /// Revenue of one price vector.
    Eval(EvalArgs),
    /// Best price vector among a candidate set.
    Solve(SolveArgs),
    /// Cross-check the fast oracle against direct evaluation.
    Verify(VerifyArgs),
    /// Time fast queries against direct evaluation over growing sizes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    cost_max: i64,
    #[arg(long, default_value_t = 1)]
    demand_max: i64,
    /// Keep a spanning tree of fixed-cost edges.
    #[arg(long)]
    fixed_backbone: bool,
    /// Write here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated prices for e_1..e_k, e.g. "3,5/2".
    #[arg(long, allow_hyphen_values = true)]
    prices: String,
    /// Also evaluate directly and require agreement.
    #[arg(long)]
    naive: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Candidate file; defaults to the breakpoint heuristic.
    #[arg(long)]
    candidates: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "random", conflicts_with = "random")]
    instance: Option<PathBuf>,
    /// Check a fleet of generated instances instead of one file.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 60)]
    n: usize,
    #[arg(long, default_value_t = 180)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: bool,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated sizes; `2^e` is accepted.
    #[arg(long, default_value = "2^10,2^11,2^12,2^13,2^14,2^15,2^16,2^17")]
    sizes: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Edges per vertex.
    #[arg(long, default_value_t = 4)]
    m_factor: usize,
    #[arg(long, default_value_t = 200)]
    queries: usize,
    /// Fast-query passes; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: bool,
}

/// Usage and input errors exit 2; failed checks exit 1.
enum Failure {
    Usage(String),
    Check(String),
}

impl From<stackspt::Error> for Failure {
    fn from(e: stackspt::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Eval(a) => eval(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_instance(path: &PathBuf) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn gen(a: GenArgs) -> CmdResult {
    let params = GeneratorParams {
        cost_range: 1..=a.cost_max,
        demand_range: 1.min(a.demand_max)..=a.demand_max,
        fixed_backbone: a.fixed_backbone,
        ..GeneratorParams::new(a.n, a.m, a.k, a.seed)
    };
    let text = serialize_instance(&random_instance(&params)?);
    match a.output {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn eval(a: EvalArgs) -> CmdResult {
    let inst = read_instance(&a.instance)?;
    let p = PriceFunction::parse(&a.prices, inst.k())?;
    let fast = if inst.k() >= 2 {
        build_oracle(&inst)?.revenue(&p)?
    } else {
        naive_revenue(&inst, &p)?
    };
    if !a.naive {
        return Ok(format!("{fast}\n"));
    }
    let naive = naive_revenue(&inst, &p)?;
    let out = format!("fast {fast}\nnaive {naive}\n");
    if fast != naive {
        return Err(Failure::Check(format!("{out}mismatch")));
    }
    Ok(out)
}

fn solve(a: SolveArgs) -> CmdResult {
    let inst = read_instance(&a.instance)?;
    let cands = match &a.candidates {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            CandidateSet::parse(&text, inst.k()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => heuristic_candidates(&inst),
    };
    let res = solve_parallel(&inst, &cands, a.parallel)?;
    eprintln!("solved in {:.3} s", res.wall_time.as_secs_f64());
    Ok(format!(
        "prices {}\nrevenue {}\nevaluations {}\n",
        res.best_price, res.best_revenue, res.evaluations
    ))
}

fn verify(a: VerifyArgs) -> CmdResult {
    let fault = if a.inject_fault { Fault::SkewRevenue } else { Fault::None };
    let fleet: Vec<Instance> = match &a.instance {
        Some(path) => vec![read_instance(path)?],
        None => (0..a.instances as u64)
            .map(|j| random_instance(&GeneratorParams::new(a.n, a.m, a.k, a.seed + j)))
            .collect::<Result<_, _>>()?,
    };
    let mut csv = format!("instance,{VERIFY_CSV_HEADER}\n");
    let mut trials = 0;
    let mut first_failure = None;
    let mut failures = 0;
    for (idx, inst) in fleet.iter().enumerate() {
        let report = verify_oracle_with_fault(inst, a.trials, a.seed.wrapping_add(idx as u64), fault)?;
        for row in report.csv_rows().lines() {
            writeln!(csv, "{idx},{row}").unwrap();
        }
        trials += report.trials.len();
        failures += report.failures();
        if first_failure.is_none() {
            first_failure = report.counterexample.map(|c| format!("# instance {idx}\n{c}"));
        }
    }
    let summary = format!("{} instances, {trials} trials, {failures} failed\n", fleet.len());
    let out = if a.csv { csv } else { summary.clone() };
    match first_failure {
        None => Ok(out),
        Some(cex) => {
            if a.csv {
                print!("{out}");
            }
            Err(Failure::Check(format!("{summary}first counterexample:\n{cex}")))
        }
    }
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            let parsed = match s.split_once('^') {
                Some((b, e)) => b
                    .parse::<usize>()
                    .ok()
                    .zip(e.parse::<u32>().ok())
                    .and_then(|(b, e)| b.checked_pow(e)),
                None => s.parse().ok(),
            };
            parsed.filter(|&n| n >= 2).ok_or_else(|| Failure::Usage(format!("bad size {s:?}")))
        })
        .collect()
}

struct BenchRecord {
    n: usize,
    m: usize,
    k: usize,
    build: Duration,
    fast: Duration,
    naive: Duration,
}

impl BenchRecord {
    fn speedup(&self) -> f64 {
        self.naive.as_secs_f64() / self.fast.as_secs_f64().max(1e-12)
    }
}

fn bench(a: BenchArgs) -> CmdResult {
    if a.queries == 0 {
        return Err(Failure::Usage("--queries must be positive".into()));
    }
    let mut out = String::new();
    if a.csv {
        out.push_str("n,m,k,build_s,fast_us,naive_us,speedup\n");
    } else {
        out.push_str("       n        m  k   build(s)   fast(us)   naive(us)   speedup\n");
    }
    for (idx, n) in parse_sizes(&a.sizes)?.into_iter().enumerate() {
        let seed = a.seed.wrapping_add(idx as u64);
        let inst = random_instance(&GeneratorParams::new(n, a.m_factor * n, a.k, seed))?;
        let queries = PriceSampler::new(&inst).sample_seeded(seed, a.queries);

        let started = Instant::now();
        let oracle = build_oracle(&inst)?;
        let trees: Vec<_> = queries.iter().map(|p| oracle.reduced_tree(p)).collect();
        oracle.warm_up(&trees)?;
        let build = started.elapsed();

        let mut fast_answers: Vec<Rational> = Vec::new();
        let mut fast = Duration::MAX;
        for _ in 0..a.repeats.max(1) {
            let started = Instant::now();
            fast_answers = queries.iter().map(|p| oracle.revenue(p)).collect::<Result<_, _>>()?;
            fast = fast.min(started.elapsed());
        }
        let started = Instant::now();
        let naive_answers: Vec<Rational> = queries.iter().map(|p| naive_revenue(&inst, p)).collect::<Result<_, _>>()?;
        let naive = started.elapsed();
        if let Some(j) = (0..queries.len()).find(|&j| fast_answers[j] != naive_answers[j]) {
            return Err(Failure::Check(format!(
                "n = {n}: prices {} give fast {} but naive {}",
                queries[j], fast_answers[j], naive_answers[j]
            )));
        }

        let q = a.queries as u32;
        let rec = BenchRecord {
            n,
            m: inst.m(),
            k: inst.k(),
            build,
            fast: fast / q,
            naive: naive / q,
        };
        if a.csv {
            writeln!(
                out,
                "{},{},{},{:.3},{},{},{:.1}",
                rec.n,
                rec.m,
                rec.k,
                rec.build.as_secs_f64(),
                rec.fast.as_micros(),
                rec.naive.as_micros(),
                rec.speedup()
            )
            .unwrap();
        } else {
            writeln!(
                out,
                "{:>8} {:>8} {:>2} {:>10.3} {:>10} {:>11} {:>9.1}",
                rec.n,
                rec.m,
                rec.k,
                rec.build.as_secs_f64(),
                rec.fast.as_micros(),
                rec.naive.as_micros(),
                rec.speedup()
            )
            .unwrap();
        }
    }
    Ok(out)
}
