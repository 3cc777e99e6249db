use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rankagg::aggregate::{
    borda_aggregate, generalized_borda, kemeny_exact_with, local_search_aggregate,
};
use rankagg::distance::{
    cayley_distance, weighted_kendall_monotone, DEFAULT_ORACLE_CAP,
};
use rankagg::gossip::{gap_and_spread, monte_carlo_tail, theoretical_bound, trial_rng, MonteCarloConfig};
use rankagg::io::{
    format_significant, parse_adjacent_weights, parse_generators, parse_network, parse_profile,
    parse_rankings, parse_transposition_weights, parse_weight_list,
};
use rankagg::perm::kendall_tau;
use rankagg::selftest::{run_selftest, Fault};
use rankagg::{
    BoundInputs, Error, ExactOracle, GeneratorSet, GossipNetwork, Metric, MixingMatrix,
    Permutation, PositionalScores, Profile,
};
use rankagg_cli::output::{
    to_json, AggregateReport, BoundReport, DistanceReport, ObjectBound, ObjectScore, TailRow,
    TailTable, TOLERANCE,
};

#[derive(Parser)]
#[command(name = "rankagg", version, about = "Rank aggregation with weighted Kendall and Cayley distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two rankings: `dist 4 3 1 2 -- 1 2 3 4`
    Dist(DistArgs),
    /// Aggregate a profile of rankings into one
    Aggregate(AggregateArgs),
    /// Monte Carlo consensus-time tail of gossiped Borda aggregation
    Gossip(GossipArgs),
    /// Tail bound on the gossip consensus time and its components
    Bound(BoundArgs),
    /// Run the built-in invariant checks
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistanceKind {
    Kendall,
    Wkendall,
    Cayley,
    Wcayley,
    Gendist,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rule {
    Borda,
    Genborda,
    Kemeny,
    Local,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct MetricArgs {
    #[arg(long, value_enum, default_value = "kendall")]
    distance: DistanceKind,
    /// Adjacent weights (wkendall) or a transposition table (wcayley)
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Generator set (gendist)
    #[arg(long)]
    generators: Option<PathBuf>,
    /// Use the shortest-path oracle for wkendall (any nonnegative weights)
    #[arg(long)]
    exact: bool,
    /// Largest n the exhaustive solvers accept
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    cap: usize,
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    metric: MetricArgs,
    /// Read the two rankings from a file instead
    #[arg(long, conflicts_with_all = ["p", "q"])]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    p: Vec<usize>,
    #[arg(last = true)]
    q: Vec<usize>,
}

#[derive(Args)]
struct AggregateArgs {
    #[arg(long, value_enum)]
    rule: Rule,
    #[arg(long)]
    profile: PathBuf,
    /// Positional increments for genborda
    #[arg(long)]
    phi: Option<PathBuf>,
    #[command(flatten)]
    metric: MetricArgs,
    /// Seed for local search
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the JSON report here
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct GossipArgs {
    #[arg(long)]
    profile: PathBuf,
    #[arg(long)]
    network: PathBuf,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 100_000)]
    tmax: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated time points
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<u64>,
    /// Write the CSV here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    profile: PathBuf,
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    t: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    NonMonotoneWeights,
}

enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
    Failed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::CapExceeded { .. }) => 3,
            CliError::Core(Error::Timeout { .. }) => 4,
            CliError::Failed => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn resolve_seed(seed: Option<u64>) -> (u64, bool) {
    match seed {
        Some(s) => (s, false),
        None => (rand::random(), true),
    }
}

impl MetricArgs {
    fn weights_text(&self, what: &str) -> CliResult<String> {
        let path = self.weights.as_deref().ok_or_else(|| usage(format!("--weights is required for {what}")))?;
        read(path)
    }

    fn build(&self, n: usize) -> CliResult<Metric> {
        let metric = match self.distance {
            DistanceKind::Kendall => Metric::Kendall,
            DistanceKind::Cayley => Metric::Cayley,
            DistanceKind::Wkendall => {
                let w = parse_adjacent_weights(&self.weights_text("wkendall")?)?;
                if self.exact {
                    Metric::WeightedKendallExact(w)
                } else {
                    Metric::WeightedKendall(w)
                }
            }
            DistanceKind::Wcayley => {
                Metric::WeightedCayley(parse_transposition_weights(&self.weights_text("wcayley")?, n)?)
            }
            DistanceKind::Gendist => {
                let path = self
                    .generators
                    .as_deref()
                    .ok_or_else(|| usage("--generators is required for gendist"))?;
                Metric::Generators(parse_generators(&read(path)?)?)
            }
        };
        metric.validate(n)?;
        Ok(metric)
    }

    fn oracle(&self) -> ExactOracle {
        ExactOracle::with_cap(self.cap)
    }
}

fn oracle_generators(metric: &Metric) -> Option<GeneratorSet> {
    match metric {
        Metric::WeightedKendallExact(w) => Some(GeneratorSet::adjacent(w)),
        Metric::WeightedCayley(t) => Some(GeneratorSet::transpositions(t)),
        Metric::Generators(g) => Some(g.clone()),
        _ => None,
    }
}

/// `None` when `q` is unreachable.
fn distance(metric: &Metric, oracle: &ExactOracle, p: &Permutation, q: &Permutation) -> CliResult<Option<f64>> {
    let d = match metric {
        Metric::Kendall => kendall_tau(p, q).map(|d| d as f64),
        Metric::Cayley => cayley_distance(p, q).map(|d| d as f64),
        Metric::WeightedKendall(w) => weighted_kendall_monotone(p, q, w),
        _ => {
            let gens = oracle_generators(metric).expect("oracle metric");
            oracle.distance(&gens, p, q)
        }
    };
    match d {
        Ok(d) => Ok(Some(d)),
        Err(Error::Unreachable) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn cmd_dist(args: DistArgs) -> CliResult<()> {
    let (p, q) = match &args.file {
        Some(path) => {
            let rankings = parse_rankings(&read(path)?)?;
            match <[Permutation; 2]>::try_from(rankings) {
                Ok([p, q]) => (p, q),
                Err(rs) => return Err(usage(format!("{} holds {} rankings, expected 2", path.display(), rs.len()))),
            }
        }
        None => {
            if args.p.is_empty() || args.q.is_empty() {
                return Err(usage("give two rankings: dist 4 3 1 2 -- 1 2 3 4, or --file"));
            }
            (Permutation::new(args.p.clone())?, Permutation::new(args.q.clone())?)
        }
    };
    if p.len() != q.len() {
        return Err(Error::SizeMismatch { expected: p.len(), found: q.len() }.into());
    }
    let metric = args.metric.build(p.len())?;
    let value = distance(&metric, &args.metric.oracle(), &p, &q)?;
    match args.format {
        Format::Text => println!("{}", value.map_or("inf".into(), |d| format_significant(d, 12))),
        Format::Json => print!(
            "{}",
            to_json(&DistanceReport {
                distance: metric.name().into(),
                p: p.entries().to_vec(),
                q: q.entries().to_vec(),
                value,
                tolerance: TOLERANCE,
            })
        ),
        Format::Csv => return Err(usage("dist supports --format text or json")),
    }
    Ok(())
}

fn cmd_aggregate(args: AggregateArgs) -> CliResult<()> {
    if args.format == Format::Csv {
        return Err(usage("aggregate supports --format text or json"));
    }
    let profile = parse_profile(&read(&args.profile)?)?;
    let phi = args.phi.as_deref().map(read).transpose()?;
    let n = profile.n();
    let mut report = AggregateReport {
        rule: String::new(),
        distance: None,
        seed: None,
        ranking: Vec::new(),
        cost: None,
        scores: Vec::new(),
        tolerance: TOLERANCE,
    };
    let mut seed_line = None;
    let (ranking, scores) = match args.rule {
        Rule::Borda => {
            let (r, s) = borda_aggregate(&profile);
            (r, Some(s))
        }
        Rule::Genborda => {
            let phi = match phi {
                Some(text) => PositionalScores::from_increments(parse_weight_list(&text)?)?,
                None => PositionalScores::classic(n),
            };
            let (r, s) = generalized_borda(&profile, &phi)?;
            (r, Some(s))
        }
        Rule::Kemeny => {
            let metric = args.metric.build(n)?;
            let agg = kemeny_exact_with(&profile, &metric, &args.metric.oracle())?;
            report.distance = Some(metric.name().into());
            report.cost = Some(agg.cost);
            (agg.ranking, None)
        }
        Rule::Local => {
            let metric = args.metric.build(n)?;
            if oracle_generators(&metric).is_some() && n > args.metric.cap {
                return Err(Error::CapExceeded { n, cap: args.metric.cap }.into());
            }
            let (seed, generated) = resolve_seed(args.seed);
            if generated {
                seed_line = Some(seed);
            }
            let agg = local_search_aggregate(&profile, &metric, None, &mut trial_rng(seed, 0))?;
            report.distance = Some(metric.name().into());
            report.seed = Some(seed);
            report.cost = Some(agg.cost);
            (agg.ranking, None)
        }
    };
    report.rule = args.rule.to_possible_value().expect("visible").get_name().into();
    report.ranking = ranking.entries().to_vec();
    if let Some(s) = scores {
        report.scores = (1..=n).map(|object| ObjectScore { object, score: s.score(object) }).collect();
    }
    let json = to_json(&report);
    if let Some(path) = &args.sidecar {
        write(path, &json)?;
    }
    if let Some(seed) = seed_line {
        println!("# seed={seed}");
    }
    match args.format {
        Format::Text => println!("{ranking}"),
        _ => print!("{json}"),
    }
    Ok(())
}

fn load_gossip_inputs(profile: &Path, network: &Path) -> CliResult<(Profile, GossipNetwork)> {
    let profile_text = read(profile)?;
    let network_text = read(network)?;
    let profile = parse_profile(&profile_text)?;
    let network = parse_network(&network_text)?;
    if profile.m() != network.m() {
        return Err(usage(format!(
            "profile has {} rankings but the network has {} agents",
            profile.m(),
            network.m()
        )));
    }
    Ok((profile, network))
}

fn cmd_gossip(args: GossipArgs) -> CliResult<()> {
    let (profile, network) = load_gossip_inputs(&args.profile, &args.network)?;
    let (seed, generated) = resolve_seed(args.seed);
    // with CSV on stdout the seed is already its first line
    if generated && args.out.is_some() {
        println!("# seed={seed}");
    }
    let config = MonteCarloConfig::new(args.trials, args.grid.clone(), args.tmax, seed);
    let report = monte_carlo_tail(&profile, &network, &config)?;
    let table = TailTable {
        comments: vec![
            format!("seed={seed}"),
            format!("trials={} tmax={} m={} n={}", args.trials, args.tmax, report.m, profile.n()),
            format!("lambda2={}", report.lambda2),
            format!("timeouts={}", report.timeouts),
        ],
        rows: report
            .tail
            .iter()
            .map(|p| TailRow {
                t: p.t,
                empirical_tail: p.empirical,
                wilson_lo: p.wilson_lo,
                wilson_hi: p.wilson_hi,
                theoretical_bound: p.bound,
            })
            .collect(),
    };
    let csv = table.to_csv().map_err(|e| usage(e.to_string()))?;
    match &args.out {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    if report.timeouts > 0 {
        eprintln!("{} of {} trials did not reach consensus within {} steps", report.timeouts, args.trials, args.tmax);
        return Err(Error::Timeout { t_max: args.tmax }.into());
    }
    Ok(())
}

fn cmd_bound(args: BoundArgs) -> CliResult<()> {
    let (profile, network) = load_gossip_inputs(&args.profile, &args.network)?;
    let gaps = gap_and_spread(&profile);
    let lambda2 = MixingMatrix::build(&network).lambda2().clamp(0.0, 1.0);
    let inputs = BoundInputs::new(&gaps, lambda2, network.m())?;
    let bound = theoretical_bound(args.t, &inputs)?;
    let report = BoundReport {
        t: args.t,
        bound,
        m: network.m(),
        lambda2,
        objects: (0..profile.n())
            .map(|k| ObjectBound {
                object: gaps.order.at(k + 1),
                mean: gaps.means[k],
                d: gaps.d[k],
                r: gaps.r[k],
                ratio: gaps.d[k] / gaps.r[k],
            })
            .collect(),
        tolerance: TOLERANCE,
    };
    match args.format {
        Format::Text => {
            let f = |x: f64| format_significant(x, 12);
            println!("bound {}", f(report.bound));
            println!("t {}", report.t);
            println!("m {}", report.m);
            println!("lambda2 {}", f(report.lambda2));
            println!("object mean d r d/r");
            for o in &report.objects {
                println!("{} {} {} {} {}", o.object, f(o.mean), f(o.d), f(o.r), f(o.ratio));
            }
        }
        Format::Json => print!("{}", to_json(&report)),
        Format::Csv => return Err(usage("bound supports --format text or json")),
    }
    Ok(())
}

fn cmd_selftest(args: SelftestArgs) -> CliResult<()> {
    let fault = args.inject_fault.map(|FaultArg::NonMonotoneWeights| Fault::NonMonotoneWeights);
    let results = run_selftest(fault);
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        return Err(CliError::Failed);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dist(a) => cmd_dist(a),
        Command::Aggregate(a) => cmd_aggregate(a),
        Command::Gossip(a) => cmd_gossip(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Core(err) => eprintln!("error: {err}"),
                CliError::Io(path, err) => eprintln!("error: {}: {err}", path.display()),
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Failed => {}
            }
            ExitCode::from(e.exit_code())
        }
    }
}
