use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use borda_manip::gen::{GenConfig, Model};
use borda_manip::greedy::{lsla_traced, lslg_traced, GreedyOutcome};
use borda_manip::harness::{read_csv, run_experiment, write_csv, ExperimentConfig, SummaryTable, Target};
use borda_manip::io::Instance;
use borda_manip::{
    convert_to_votes, exists_manipulation, minimum_manipulators, reverse, tally, Budget, Election, Error, Feasibility,
    Profile, TiePolicy, VoteMatrix,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Minimum-size coalitional manipulation of Borda elections.
#[derive(Parser, Debug)]
#[command(name = "borda-manip", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Root seed for random generation.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output file (or directory for batch generation).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for experiments; 0 means one per core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Node limit for the exact search.
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    /// Time limit for the exact search, in milliseconds.
    #[arg(long, global = true)]
    budget_ms: Option<u64>,
    /// Candidate the coalition backs. Defaults to `last` for gen, `worst`
    /// for experiment, and the file's own choice for solve and exact.
    #[arg(long, global = true)]
    target: Option<TargetArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    Last,
    Worst,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Last => Target::Last,
            TargetArg::Worst => Target::Worst,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate election JSON files.
    Gen(GenArgs),
    /// Run one algorithm on an election or score-profile file.
    Solve(SolveArgs),
    /// Determine the optimal coalition size, or decide a single size.
    Exact(ExactArgs),
    /// Run the batch comparison and write the per-instance CSV.
    Experiment(ExperimentArgs),
    /// Summarize a per-instance CSV.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// uniform, urn, urn-a<A>, prop1 or thm2-k<K>.
    #[arg(long, default_value = "uniform")]
    model: String,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 4)]
    p: usize,
    /// Write this many elections into the `--out` directory.
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algorithm {
    Reverse,
    Lslg,
    Lsla,
    Exact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TieArg {
    MinFill,
    Index,
}

#[derive(Args, Debug)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// Coalition size; required for lslg and lsla.
    #[arg(long)]
    n: Option<usize>,
    /// LSLA tie-breaking rule.
    #[arg(long, value_enum, default_value_t = TieArg::MinFill)]
    tie: TieArg,
    /// Print each greedy step as `iter,column,score,column_sum`.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct ExactArgs {
    file: PathBuf,
    /// Decide only whether a coalition of this size exists.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Vote models to run.
    #[arg(long, value_delimiter = ',', default_value = "uniform,urn")]
    models: Vec<String>,
    /// Candidate counts; defaults to 4,8,16 (or up to 128 with --full).
    #[arg(long, value_delimiter = ',')]
    ms: Option<Vec<usize>>,
    /// Voter counts; defaults to 4,8,...,128.
    #[arg(long, value_delimiter = ',')]
    ps: Option<Vec<usize>>,
    /// Elections per (m, p) cell.
    #[arg(long)]
    per_cell: Option<usize>,
    /// The full grid with 1000 elections per cell. Takes days.
    #[arg(long)]
    full: bool,
    /// Record wall-clock times in the CSV (breaks byte-identical reruns).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct ReportArgs {
    csv: PathBuf,
}

/// Exit statuses: 0 success or known, 1 failure or unsat, 2 timeout or
/// unknown, 3 input error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Ok,
    Negative,
    Unknown,
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> Self {
        ExitCode::from(match o {
            Outcome::Ok => 0,
            Outcome::Negative => 1,
            Outcome::Unknown => 2,
        })
    }
}

const INPUT_ERROR: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(INPUT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(o) => o.into(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let g = &cli.global;
    match &cli.command {
        Command::Gen(a) => gen(g, a),
        Command::Solve(a) => solve(g, a),
        Command::Exact(a) => exact(g, a),
        Command::Experiment(a) => experiment(g, a),
        Command::Report(a) => report(g, a),
    }
}

fn budget(g: &Global, default: Budget) -> Result<Budget, Error> {
    let b = if g.budget_nodes.is_none() && g.budget_ms.is_none() {
        default
    } else {
        Budget {
            max_nodes: g.budget_nodes,
            max_time: g.budget_ms.map(Duration::from_millis),
        }
    };
    b.validate()?;
    Ok(b)
}

fn retarget(election: Election, target: Target) -> Result<Election, Error> {
    match target {
        Target::Last => Ok(election),
        Target::Worst => {
            let worst = tally::<i64>(&election).worst_off();
            election.with_distinguished(worst)
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text)?;
    Ok(())
}

fn gen(g: &Global, a: &GenArgs) -> Result<Outcome, Error> {
    let model: Model = a.model.parse()?;
    let target = g.target.map(Target::from).unwrap_or(Target::Last);
    let make = |seed: u64| -> Result<Election, Error> {
        retarget(
            GenConfig {
                m: a.m,
                p: a.p,
                model,
                seed,
            }
            .generate()?,
            target,
        )
    };
    match a.count {
        None => {
            let json = make(g.seed)?.to_json();
            match &g.out {
                Some(path) => write_text(path, &(json + "\n"))?,
                None => println!("{json}"),
            }
        }
        Some(count) => {
            let dir = g
                .out
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("--count needs --out <directory>".into()))?;
            fs::create_dir_all(dir)?;
            for idx in 0..count {
                let e = make(g.seed.wrapping_add(idx as u64))?;
                let name = format!("{model}_m{}_p{}_{idx}.json", e.m(), e.votes().len());
                write_text(&dir.join(name), &(e.to_json() + "\n"))?;
            }
            eprintln!("wrote {count} elections to {}", dir.display());
        }
    }
    Ok(Outcome::Ok)
}

fn load_profile(g: &Global, path: &Path) -> Result<Profile, Error> {
    let profile: Profile = Instance::read(path)?.profile();
    match g.target {
        None => Ok(profile),
        Some(TargetArg::Last) => {
            let last = borda_manip::Candidate::new(profile.m(), profile.m())?;
            profile.with_distinguished(last)
        }
        Some(TargetArg::Worst) => {
            let worst = profile.worst_off();
            profile.with_distinguished(worst)
        }
    }
}

/// Manipulator ballots in the election file format.
fn ballots_json(profile: &Profile, votes: &VoteMatrix) -> Result<String, Error> {
    let rankings: Vec<Vec<usize>> = votes.ballots().iter().map(|v| v.to_indices()).collect();
    Ok(Election::new(profile.m(), profile.distinguished().index(), &rankings)?.to_json())
}

fn emit(g: &Global, text: &str) -> Result<(), Error> {
    match &g.out {
        Some(path) => write_text(path, &format!("{text}\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn solve(g: &Global, a: &SolveArgs) -> Result<Outcome, Error> {
    let profile = load_profile(g, &a.file)?;
    let tie = match a.tie {
        TieArg::MinFill => TiePolicy::MinFill,
        TieArg::Index => TiePolicy::IndexOrder,
    };
    let need_n = || {
        a.n.ok_or_else(|| Error::InvalidConfig("--n is required for lslg and lsla".into()))
    };
    match a.algorithm {
        Algorithm::Reverse => {
            let run = reverse(&profile);
            if a.trace {
                for row in &run.score_trace {
                    let cells: Vec<String> = row.iter().map(|s| s.to_string()).collect();
                    println!("{}", cells.join(","));
                }
            }
            println!("n: {}", run.n);
            emit(g, &ballots_json(&profile, &run.votes)?)?;
            Ok(Outcome::Ok)
        }
        Algorithm::Lslg => greedy_result(g, &profile, lslg_traced(&profile, need_n()?), a.trace),
        Algorithm::Lsla => greedy_result(g, &profile, lsla_traced(&profile, need_n()?, tie), a.trace),
        Algorithm::Exact => optimum(g, &profile),
    }
}

fn greedy_result(g: &Global, profile: &Profile, out: GreedyOutcome<i64>, trace: bool) -> Result<Outcome, Error> {
    if trace {
        println!("iter,column,score,column_sum");
        for step in out.trace.iter().flatten() {
            println!("{}", step.csv_line());
        }
    }
    println!("status: {}", out.status);
    match &out.matrix {
        Some(b) if out.is_success() => {
            emit(g, &ballots_json(profile, &convert_to_votes(b)?)?)?;
            Ok(Outcome::Ok)
        }
        _ => {
            let totals: Vec<String> = out.final_totals.iter().map(|s| s.to_string()).collect();
            println!("final totals: {}", totals.join(","));
            Ok(Outcome::Negative)
        }
    }
}

fn optimum(g: &Global, profile: &Profile) -> Result<Outcome, Error> {
    let report = minimum_manipulators(profile, budget(g, Budget::default())?)?;
    println!("{report}");
    Ok(if report.n_optimal.is_some() {
        Outcome::Ok
    } else {
        Outcome::Unknown
    })
}

fn exact(g: &Global, a: &ExactArgs) -> Result<Outcome, Error> {
    let profile = load_profile(g, &a.file)?;
    let Some(n) = a.n else { return optimum(g, &profile) };
    let res = exists_manipulation(&profile, n, budget(g, Budget::default())?)?;
    let label = match res.status {
        Feasibility::Sat => "sat",
        Feasibility::Unsat => "unsat",
        Feasibility::Timeout => "timeout",
    };
    println!("n: {n}\nstatus: {label}\nsearch nodes: {}", res.nodes);
    if let Some(b) = &res.witness {
        emit(g, &ballots_json(&profile, &convert_to_votes(b)?)?)?;
    }
    Ok(match res.status {
        Feasibility::Sat => Outcome::Ok,
        Feasibility::Unsat => Outcome::Negative,
        Feasibility::Timeout => Outcome::Unknown,
    })
}

fn experiment(g: &Global, a: &ExperimentArgs) -> Result<Outcome, Error> {
    let models = a.models.iter().map(|s| s.parse()).collect::<Result<Vec<Model>, _>>()?;
    let mut cfg = if a.full {
        eprintln!("warning: the full grid takes CPU-days");
        ExperimentConfig::full(models, g.seed)
    } else {
        ExperimentConfig::desk(models, g.seed)
    };
    if let Some(ms) = &a.ms {
        cfg.ms = ms.clone();
    }
    if let Some(ps) = &a.ps {
        cfg.ps = ps.clone();
    }
    if let Some(k) = a.per_cell {
        cfg.per_cell = k;
    }
    if let Some(t) = g.target {
        cfg.target = t.into();
    }
    cfg.budget = budget(g, cfg.budget)?;
    cfg.workers = g.workers;
    cfg.record_timings = a.timings;

    let res = run_experiment(&cfg)?;
    if let Some(path) = &g.out {
        let file = fs::File::create(path)?;
        let mut w = io::BufWriter::new(file);
        write_csv(&res.records, cfg.seed, &mut w)?;
        w.flush()?;
    }
    let unknown = res.records.iter().filter(|r| r.n_optimal.is_none()).count();
    println!(
        "target: {}; {} generated, {} duplicates dropped, {} solved, {unknown} unknown",
        cfg.target,
        res.generated,
        res.duplicates,
        res.records.len()
    );
    for t in &res.tables {
        println!("\n{}", t.render_text());
    }
    if !res.dominance_violations.is_empty() {
        eprintln!(
            "warning: LSLA failed at REVERSE's size and one below on instances {:?}",
            res.dominance_violations
        );
    }
    Ok(Outcome::Ok)
}

fn report(g: &Global, a: &ReportArgs) -> Result<Outcome, Error> {
    let file = fs::File::open(&a.csv)?;
    let records = read_csv(BufReader::new(file))?;
    let tables = SummaryTable::from_records(&records);
    let mut csv = String::new();
    for (i, t) in tables.iter().enumerate() {
        println!("{}\n", t.render_text());
        let body = t.render_csv();
        // One header for the combined CSV.
        let skip = if i == 0 {
            0
        } else {
            body.find('\n').map_or(body.len(), |k| k + 1)
        };
        csv.push_str(&body[skip..]);
    }
    if tables.is_empty() {
        println!("no instances");
    }
    match &g.out {
        Some(path) => write_text(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(Outcome::Ok)
}
