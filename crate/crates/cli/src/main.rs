//! `korder`: generate, score and compare k-subset query orderings.

mod algo;
mod verify;

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use korder::exact_search::{branch_and_prune_with, brute_force, SearchOptions};
use korder::scoring::{
    monte_carlo_random_score, random_remaining_curve, sigma_remaining_curve, write_profile_csv,
};
use korder::{
    expected_random_score, parse_sequence, score_by_elimination, sigma, write_sequence,
    ProblemParams, QuerySequence,
};

use algo::{Algo, AlgoOptions};

const DEFAULT_CLI_SCENE_CAP: u32 = 24;

#[derive(Parser, Debug)]
#[command(
    name = "korder",
    version,
    about = "Order k-subset queries to minimise expected time to discovery"
)]
struct Cli {
    /// Worker threads for scoring and search (1 forces the sequential path).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a complete query sequence.
    Generate {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact score of a sequence file (or of a generated sequence).
    Score {
        #[command(flatten)]
        source: Source,
        /// Append the per-step discovery CSV.
        #[arg(long)]
        profile: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-step discovery CSV of a sequence.
    Profile {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean score over all complete sequences.
    Sigma {
        #[command(flatten)]
        problem: Problem,
        /// Print the expected remaining-scene curve as CSV instead.
        #[arg(long)]
        remaining: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected score of random queries drawn with repetition.
    RandomBaseline {
        #[command(flatten)]
        problem: Problem,
        /// Monte Carlo trials; 0 prints the closed form only.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Queries per trial before a sample is censored (default 100 N).
        #[arg(long)]
        cutoff: Option<u64>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum by branch-and-prune (or brute force).
    Optimal {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, value_enum, default_value_t = Method::BranchAndPrune)]
        method: Method,
        /// Disable a pruning rule; repeatable.
        #[arg(long = "without", value_enum)]
        without: Vec<Rule>,
        #[arg(long)]
        json: bool,
        /// Write the optimal sequence here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score several algorithms side by side, with the random baselines.
    Compare {
        #[command(flatten)]
        problem: Problem,
        /// Comma separated; defaults to every generator and greedy builder.
        #[arg(long, value_enum, value_delimiter = ',')]
        algos: Vec<Algo>,
        #[arg(long, default_value_t = 2)]
        base: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CLI_SCENE_CAP)]
        scene_cap: u32,
        /// Add scenes-remaining columns R1..RN.
        #[arg(long)]
        remaining: bool,
        /// Write every generated sequence into this directory.
        #[arg(long)]
        archive: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites, or check a sequence file.
    Verify {
        #[arg(long, default_value_t = 1)]
        n_min: u32,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[arg(long, default_value_t = 1)]
        k_min: u32,
        #[arg(long, default_value_t = 4)]
        k_max: u32,
        /// Check this file instead of running the suites.
        #[arg(long)]
        sequence: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Problem {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
}

#[derive(Args, Debug, Clone)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = Algo::Gse)]
    algo: Algo,
    /// Digit base for base-unrank.
    #[arg(long, default_value_t = 2)]
    base: u64,
    /// Reference order: lex, colex, revdoor, or recursive (pattern-shift only).
    #[arg(long)]
    reference: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CLI_SCENE_CAP)]
    scene_cap: u32,
}

impl GenArgs {
    fn options(&self) -> AlgoOptions {
        AlgoOptions {
            base: self.base,
            reference: self.reference.clone(),
            seed: self.seed,
            scene_cap: self.scene_cap,
        }
    }
}

/// A sequence file, or `--n --k --algo` to generate one on the fly.
#[derive(Args, Debug, Clone)]
struct Source {
    file: Option<PathBuf>,
    #[arg(long, requires = "k", conflicts_with = "file")]
    n: Option<u32>,
    #[arg(long, requires = "n")]
    k: Option<u32>,
    #[command(flatten)]
    gen: GenArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    BranchAndPrune,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rule {
    P1,
    P2,
    P3,
    P4,
    Incumbent,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Capacity(String),
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Capacity(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Capacity(m) | CliError::Verification(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<korder::Error> for CliError {
    fn from(e: korder::Error) -> Self {
        if e.is_capacity() {
            CliError::Capacity(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Validation(format!("i/o error: {e}"))
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Generate { problem, gen, out } => cmd_generate(problem, &gen, out.as_deref()),
        Command::Score {
            source,
            profile,
            json,
            out,
        } => cmd_score(&source, profile, json, out.as_deref()),
        Command::Profile { source, out } => cmd_profile(&source, out.as_deref()),
        Command::Sigma {
            problem,
            remaining,
            json,
            out,
        } => cmd_sigma(problem, remaining, json, out.as_deref()),
        Command::RandomBaseline {
            problem,
            trials,
            seed,
            cutoff,
            json,
            out,
        } => cmd_random_baseline(problem, trials, seed, cutoff, json, out.as_deref()),
        Command::Optimal {
            problem,
            method,
            without,
            json,
            out,
        } => cmd_optimal(problem, method, &without, json, out.as_deref()),
        Command::Compare {
            problem,
            algos,
            base,
            seed,
            scene_cap,
            remaining,
            archive,
            json,
            out,
        } => {
            let opts = AlgoOptions {
                base,
                reference: None,
                seed,
                scene_cap,
            };
            let algos = if algos.is_empty() {
                Algo::COMPARE_DEFAULT.to_vec()
            } else {
                algos
            };
            cmd_compare(
                problem,
                &algos,
                &opts,
                remaining,
                archive.as_deref(),
                json,
                out.as_deref(),
            )
        }
        Command::Verify {
            n_min,
            n_max,
            k_min,
            k_max,
            sequence,
            seed,
        } => match sequence {
            Some(path) => verify::check_file(&read_sequence(&path)?),
            None => verify::run_suites(n_min..=n_max, k_min..=k_max, seed),
        },
    }
}

fn params(problem: Problem) -> CliResult<ProblemParams> {
    Ok(ProblemParams::new(problem.n, problem.k)?)
}

fn require_scene_cap(params: ProblemParams, cap: u32) -> CliResult {
    if params.n() > cap {
        return Err(CliError::Capacity(format!(
            "n={} exceeds the scene cap of {cap} (raise --scene-cap)",
            params.n()
        )));
    }
    Ok(())
}

fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_sequence(path: &Path) -> CliResult<QuerySequence> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_sequence(&text)?)
}

fn load(source: &Source) -> CliResult<QuerySequence> {
    match (&source.file, source.n, source.k) {
        (Some(path), _, _) => read_sequence(path),
        (None, Some(n), Some(k)) => {
            let p = params(Problem { n, k })?;
            if source.gen.algo.needs_scenes() {
                require_scene_cap(p, source.gen.scene_cap)?;
            }
            Ok(algo::build(source.gen.algo, p, &source.gen.options())?)
        }
        _ => Err(CliError::Validation(
            "give a sequence file or --n and --k".into(),
        )),
    }
}

fn cmd_generate(problem: Problem, gen: &GenArgs, out: Option<&Path>) -> CliResult {
    let p = params(problem)?;
    if gen.algo.needs_scenes() {
        require_scene_cap(p, gen.scene_cap)?;
    }
    let seq = algo::build(gen.algo, p, &gen.options())?;
    let mut w = sink(out)?;
    write_sequence(&seq, &mut w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ScoreReport {
    n: u32,
    k: u32,
    #[serde(rename = "U")]
    u: u64,
    scene_count: u64,
    #[serde(rename = "T")]
    t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<Vec<u64>>,
}

fn cmd_score(source: &Source, profile: bool, json: bool, out: Option<&Path>) -> CliResult {
    let seq = load(source)?;
    require_scene_cap(seq.params(), source.gen.scene_cap)?;
    let (score, prof) = score_by_elimination(&seq)?;
    let mut w = sink(out)?;
    if json {
        let report = ScoreReport {
            n: seq.params().n(),
            k: seq.params().k(),
            u: score.numerator,
            scene_count: score.denominator,
            t: score.value(),
            profile: profile.then(|| prof.counts.clone()),
        };
        serde_json::to_writer_pretty(&mut w, &report).map_err(io::Error::from)?;
        writeln!(w)?;
    } else {
        writeln!(
            w,
            "U={} |S|={} T={}",
            score.numerator,
            score.denominator,
            score.value()
        )?;
        if profile {
            write_profile_csv(&seq, &prof, score.denominator, &mut w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_profile(source: &Source, out: Option<&Path>) -> CliResult {
    let seq = load(source)?;
    require_scene_cap(seq.params(), source.gen.scene_cap)?;
    let (score, prof) = score_by_elimination(&seq)?;
    let mut w = sink(out)?;
    write_profile_csv(&seq, &prof, score.denominator, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_sigma(problem: Problem, remaining: bool, json: bool, out: Option<&Path>) -> CliResult {
    let p = params(problem)?;
    let mut w = sink(out)?;
    if remaining {
        writeln!(w, "i,expected_remaining")?;
        for (i, r) in sigma_remaining_curve(p).iter().enumerate() {
            writeln!(w, "{},{r}", i + 1)?;
        }
    } else if json {
        let value = serde_json::json!({ "n": p.n(), "k": p.k(), "sigma": sigma(p) });
        writeln!(w, "{value}")?;
    } else {
        writeln!(w, "sigma={:.6}", sigma(p))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_random_baseline(
    problem: Problem,
    trials: u64,
    seed: u64,
    cutoff: Option<u64>,
    json: bool,
    out: Option<&Path>,
) -> CliResult {
    let p = params(problem)?;
    let expected = expected_random_score(p);
    let estimate = if trials > 0 {
        let cutoff = cutoff.unwrap_or_else(|| p.query_count().saturating_mul(100));
        Some(monte_carlo_random_score(p, trials, seed, cutoff)?)
    } else {
        None
    };
    let mut w = sink(out)?;
    if json {
        let value = serde_json::json!({
            "n": p.n(),
            "k": p.k(),
            "expected": expected,
            "monte_carlo": estimate,
        });
        writeln!(w, "{value}")?;
    } else {
        writeln!(w, "expected={expected:.6}")?;
        if let Some(e) = estimate {
            writeln!(
                w,
                "monte_carlo={:.6} stderr={:.6} trials={} censored={}",
                e.mean, e.std_error, e.trials, e.censored
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_optimal(
    problem: Problem,
    method: Method,
    without: &[Rule],
    json: bool,
    out: Option<&Path>,
) -> CliResult {
    let p = params(problem)?;
    let result = match method {
        Method::BruteForce => brute_force(p)?,
        Method::BranchAndPrune => {
            let off = |r: Rule| !without.contains(&r);
            let opts = SearchOptions {
                score_bound: off(Rule::P1),
                monotonicity: off(Rule::P2),
                canonical_labels: off(Rule::P3),
                singleton_tail: off(Rule::P4),
                seed_incumbent: off(Rule::Incumbent),
                count_optima: false,
            };
            branch_and_prune_with(p, opts)?
        }
    };
    if let Some(path) = out {
        let mut w = BufWriter::new(File::create(path)?);
        write_sequence(&result.best, &mut w)?;
        w.flush()?;
    }
    let mut w = sink(None)?;
    if json {
        serde_json::to_writer_pretty(&mut w, &result.report()).map_err(io::Error::from)?;
        writeln!(w)?;
    } else {
        let s = result.score;
        writeln!(w, "U={} |S|={} T={}", s.numerator, s.denominator, s.value())?;
        let pr = result.pruned;
        writeln!(
            w,
            "nodes={} pruned p1={} p2={} p3={} p4={}",
            result.nodes_expanded, pr.p1, pr.p2, pr.p3, pr.p4
        )?;
        if let Some(count) = result.optimal_count {
            writeln!(w, "optimal_sequences={count}")?;
        }
        if let Some((_, worst, count)) = &result.worst {
            writeln!(
                w,
                "worst U={} T={} sequences={count}",
                worst.numerator,
                worst.value()
            )?;
        }
        if out.is_none() {
            for q in &result.best {
                writeln!(w, "{q}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CompareRow {
    algo: String,
    status: String,
    #[serde(rename = "U")]
    u: Option<u64>,
    scene_count: Option<u64>,
    #[serde(rename = "T")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    remaining: Option<Vec<f64>>,
}

fn cmd_compare(
    problem: Problem,
    algos: &[Algo],
    opts: &AlgoOptions,
    remaining: bool,
    archive: Option<&Path>,
    json: bool,
    out: Option<&Path>,
) -> CliResult {
    let p = params(problem)?;
    require_scene_cap(p, opts.scene_cap)?;
    if let Some(dir) = archive {
        fs::create_dir_all(dir)?;
    }
    let scenes = korder::scene_count(p)?;
    let mut rows = Vec::new();
    for &algo in algos {
        let outcome = algo::build(algo, p, opts).and_then(|seq| {
            let (score, prof) = score_by_elimination(&seq)?;
            Ok((seq, score, prof))
        });
        match outcome {
            Ok((seq, score, prof)) => {
                if let Some(dir) = archive {
                    let path = dir.join(format!("{}_n{}_k{}.txt", algo.name(), p.n(), p.k()));
                    let mut w = BufWriter::new(File::create(path)?);
                    write_sequence(&seq, &mut w)?;
                    w.flush()?;
                }
                rows.push(CompareRow {
                    algo: algo.name().into(),
                    status: "ok".into(),
                    u: Some(score.numerator),
                    scene_count: Some(score.denominator),
                    t: Some(score.value()),
                    remaining: remaining
                        .then(|| prof.remaining(scenes).iter().map(|&r| r as f64).collect()),
                });
            }
            Err(e) => {
                eprintln!("{}: {e}", algo.name());
                rows.push(CompareRow {
                    algo: algo.name().into(),
                    status: if e.is_capacity() { "capacity" } else { "error" }.into(),
                    u: None,
                    scene_count: None,
                    t: None,
                    remaining: None,
                });
            }
        }
    }
    let len = p.query_count() as usize;
    rows.push(CompareRow {
        algo: "sigma".into(),
        status: "ok".into(),
        u: None,
        scene_count: Some(scenes),
        t: Some(sigma(p)),
        remaining: remaining.then(|| sigma_remaining_curve(p)),
    });
    rows.push(CompareRow {
        algo: "random-baseline".into(),
        status: "ok".into(),
        u: None,
        scene_count: Some(scenes),
        t: Some(expected_random_score(p)),
        remaining: remaining.then(|| random_remaining_curve(p, len)),
    });
    // Failed rows sort last; the sort is stable so ties keep input order.
    rows.sort_by(|a, b| match (a.t, b.t) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });

    let mut w = sink(out)?;
    if json {
        serde_json::to_writer_pretty(&mut w, &rows).map_err(io::Error::from)?;
        writeln!(w)?;
    } else {
        write!(w, "algo,status,U,scenes,T")?;
        if remaining {
            for i in 1..=len {
                write!(w, ",R{i}")?;
            }
        }
        writeln!(w)?;
        for row in &rows {
            let opt = |v: Option<String>| v.unwrap_or_default();
            write!(
                w,
                "{},{},{},{},{}",
                row.algo,
                row.status,
                opt(row.u.map(|u| u.to_string())),
                opt(row.scene_count.map(|s| s.to_string())),
                opt(row.t.map(|t| t.to_string())),
            )?;
            if remaining {
                match &row.remaining {
                    Some(r) => r.iter().try_for_each(|x| write!(w, ",{x}"))?,
                    None => (0..len).try_for_each(|_| write!(w, ","))?,
                }
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
