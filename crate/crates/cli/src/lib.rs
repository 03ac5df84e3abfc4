//! Command-line driver for the `vanplan` solvers.

use std::cmp::Ordering;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use vanplan::genetic::{run_ga, GAParams, GaBudget};
use vanplan::heuristic::{run_heuristic, Budget, HeuristicParams, ScoreMode, Strategy};
use vanplan::io;
use vanplan::tourpool::SAParams;
use vanplan::validate::schedule_key;
use vanplan::{compare_schedules, validate_schedule, vans_required, Error, Instance, Schedule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INVALID_SCHEDULE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "vanplan", version, about = "Route and schedule mobile examination vans")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// JSON file overriding exam_duration, max_day and working_days.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic instance.
    Gen(GenArgs),
    /// Solve an instance.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Validate(ValidateArgs),
    /// Export a schedule as GeoJSON or a static HTML page.
    Export(ExportArgs),
    /// Rank two schedules of the same instance.
    Compare(CompareArgs),
    /// Build an instance file from a table-service travel-time matrix.
    FetchMatrix(FetchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 93)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Yearly untested births per township, as `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    pub births: Option<(u64, u64)>,
    /// Minutes of driving per coordinate degree.
    #[arg(long)]
    pub speed: Option<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Heuristic,
    Genetic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Furthest,
    Closest,
    Relevant,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScoreModeArg {
    Ratio,
    Difference,
}

#[derive(Debug, Clone, Args)]
pub struct SolveOptions {
    #[arg(long, value_enum, default_value_t = Algo::Heuristic)]
    pub algo: Algo,
    /// Time budget in seconds.
    #[arg(long, default_value_t = 20.0)]
    pub time: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed iteration count instead of the time budget: planning restarts
    /// for the heuristic, generations for the genetic algorithm.
    #[arg(long)]
    pub generations: Option<usize>,

    #[arg(long, value_enum, default_value_t = StrategyArg::Furthest)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0.2)]
    pub keep_percent: f64,
    #[arg(long, value_enum, default_value_t = ScoreModeArg::Ratio)]
    pub score_mode: ScoreModeArg,
    #[arg(long, default_value_t = 2)]
    pub min_exams_per_stop: u32,
    /// Annealing runs feeding the heuristic's tour pool.
    #[arg(long, default_value_t = 8)]
    pub sa_runs: usize,
    #[arg(long, default_value_t = 200_000)]
    pub sa_iterations: usize,

    #[arg(long, default_value_t = 150)]
    pub mu: usize,
    #[arg(long, default_value_t = 300)]
    pub lambda: usize,
    #[arg(long, default_value_t = 0.6)]
    pub cx_prob: f64,
    #[arg(long, default_value_t = 0.2)]
    pub mut_prob: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        let cli = Cli::parse_from(["vanplan", "solve", "-i", "x", "-o", "y"]);
        match cli.command {
            Command::Solve(s) => s.options,
            _ => unreachable!(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub options: SolveOptions,
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write the plain-text day-by-day plan.
    #[arg(long)]
    pub text: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub schedule: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Geojson,
    Html,
    Text,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_enum)]
    pub format: Format,
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub schedule: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Exactly two schedules.
    #[arg(short, long, num_args = 1, required = true)]
    pub schedule: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// Table service base URL, e.g. `http://localhost:5000/table/v1/driving`.
    #[arg(long)]
    pub endpoint: String,
    #[arg(long)]
    pub coords: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

impl SolveOptions {
    pub fn heuristic_params(&self) -> HeuristicParams {
        HeuristicParams {
            strategy: match self.strategy {
                StrategyArg::Furthest => Strategy::FurthestFirst,
                StrategyArg::Closest => Strategy::ClosestFirst,
                StrategyArg::Relevant => Strategy::MostRelevantFirst,
                StrategyArg::Random => Strategy::Random,
            },
            score_mode: match self.score_mode {
                ScoreModeArg::Ratio => ScoreMode::Ratio,
                ScoreModeArg::Difference => ScoreMode::Difference,
            },
            keep_percent: self.keep_percent,
            min_exams_per_stop: self.min_exams_per_stop,
            seed: self.seed,
            budget: match self.generations {
                Some(n) => Budget::Restarts(n),
                None => Budget::Time(Duration::from_secs_f64(self.time.max(0.0))),
            },
            ..HeuristicParams::default()
        }
    }

    pub fn sa_params(&self) -> SAParams {
        SAParams {
            runs: self.sa_runs,
            iterations_per_run: self.sa_iterations,
            seed: self.seed,
            ..SAParams::default()
        }
    }

    pub fn ga_params(&self) -> GAParams {
        GAParams {
            mu: self.mu,
            lambda: self.lambda,
            cx_prob: self.cx_prob,
            mut_prob: self.mut_prob,
            seed: self.seed,
            budget: match self.generations {
                Some(n) => GaBudget::Generations(n),
                None => GaBudget::Time(Duration::from_secs_f64(self.time.max(0.0))),
            },
            ..GAParams::default()
        }
    }
}

/// The `solve` pipeline without file handling.
pub fn solve(instance: &Instance, options: &SolveOptions) -> vanplan::Result<Schedule> {
    match options.algo {
        Algo::Heuristic => run_heuristic(instance, &options.heuristic_params(), &options.sa_params()),
        Algo::Genetic => run_ga(instance, &options.ga_params()),
    }
}

/// Maps a library error to the documented exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InfeasibleInstance(_) => EXIT_INFEASIBLE,
        Error::ContractViolation(_) => EXIT_INVALID_SCHEDULE,
        Error::InvalidParams(_) => EXIT_USAGE,
        Error::InvalidInstance(_)
        | Error::NoProductiveTour
        | Error::Parse { .. }
        | Error::Schema(_)
        | Error::MissingCoordinates
        | Error::Network(_)
        | Error::MalformedResponse(_)
        | Error::Io { .. } => EXIT_IO,
    }
}

fn code_of(e: &anyhow::Error) -> i32 {
    e.chain()
        .find_map(|c| c.downcast_ref::<Error>())
        .map_or(EXIT_IO, exit_code)
}

fn load(cli: &Cli, path: &PathBuf) -> anyhow::Result<Instance> {
    let instance = io::load_instance(path)?;
    Ok(match &cli.config {
        Some(cfg) => instance.with_params(io::load_params(cfg)?)?,
        None => instance,
    })
}

fn write(path: &PathBuf, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents)
        .map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })
        .context("writing output")
}

fn summary(s: &Schedule, instance: &Instance) -> anyhow::Result<String> {
    let (tours, duration) = schedule_key(s, instance)?;
    Ok(format!(
        "tours={tours} total_duration={duration} vans={}",
        vans_required(tours, instance.params())
    ))
}

fn run_command(cli: &Cli) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Gen(args) => {
            let mut spec = io::GenSpec {
                n: args.n,
                seed: args.seed,
                ..io::GenSpec::default()
            };
            if let Some(range) = args.births {
                spec.births_range = range;
            }
            if let Some(speed) = args.speed {
                spec.speed = speed;
            }
            if let Some(cfg) = &cli.config {
                spec.params = io::load_params(cfg)?;
            }
            let instance = io::generate_instance(&spec)?;
            io::save_instance(&instance, &args.output)?;
            eprintln!(
                "wrote {} townships, {} monthly examinations to {}",
                instance.n(),
                instance.total_demand(),
                args.output.display()
            );
            Ok(EXIT_OK)
        }
        Command::Solve(args) => {
            let instance = load(cli, &args.input)?;
            let schedule = solve(&instance, &args.options)?;
            io::save_schedule(&schedule, &args.output)?;
            if let Some(text) = &args.text {
                write(text, &io::write_schedule_text(&schedule, &instance))?;
            }
            eprintln!("{}", summary(&schedule, &instance)?);
            Ok(EXIT_OK)
        }
        Command::Validate(args) => {
            let instance = load(cli, &args.input)?;
            let schedule = io::load_schedule(&args.schedule)?;
            let violations = validate_schedule(&schedule, &instance);
            if violations.is_empty() {
                println!("valid: {}", summary(&schedule, &instance)?);
                Ok(EXIT_OK)
            } else {
                for v in &violations {
                    println!("{v}");
                }
                println!("invalid: {} violations", violations.len());
                Ok(EXIT_INVALID_SCHEDULE)
            }
        }
        Command::Export(args) => {
            let instance = load(cli, &args.input)?;
            let schedule = io::load_schedule(&args.schedule)?;
            let out = match args.format {
                Format::Geojson => {
                    let v = io::export_geojson(io::Routes::Schedule(&schedule), &instance)?;
                    serde_json::to_string_pretty(&v)? + "\n"
                }
                Format::Html => io::export_html(&schedule, &instance)?,
                Format::Text => io::write_schedule_text(&schedule, &instance),
            };
            write(&args.output, &out)?;
            Ok(EXIT_OK)
        }
        Command::Compare(args) => {
            let [a, b] = args.schedule.as_slice() else {
                eprintln!("compare needs exactly two --schedule files");
                return Ok(EXIT_USAGE);
            };
            let instance = load(cli, &args.input)?;
            let sa = io::load_schedule(a)?;
            let sb = io::load_schedule(b)?;
            let order = compare_schedules(&sa, &sb, &instance)?;
            println!("{}: {}", a.display(), summary(&sa, &instance)?);
            println!("{}: {}", b.display(), summary(&sb, &instance)?);
            println!(
                "{}",
                match order {
                    Ordering::Less => format!("{} is better", a.display()),
                    Ordering::Greater => format!("{} is better", b.display()),
                    Ordering::Equal => "equal".to_string(),
                }
            );
            Ok(EXIT_OK)
        }
        Command::FetchMatrix(args) => {
            let text = std::fs::read_to_string(&args.coords).map_err(|source| Error::Io {
                path: args.coords.clone(),
                source,
            })?;
            let coords: io::CoordsFile = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", args.coords.display()))?;
            let points: Vec<(f64, f64)> = coords.coords.iter().map(|c| (c[0], c[1])).collect();
            let matrix = io::fetch_distance_matrix(&args.endpoint, &points)?;
            let file = coords.into_instance_file(matrix);
            let instance = file.clone().into_instance()?;
            io::save_instance(&instance, &args.output)?;
            eprintln!("wrote {}x{} matrix to {}", points.len(), points.len(), args.output.display());
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI on `argv` and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(threads) = cli.threads {
        // Only the first configuration in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    match run_command(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            code_of(&e)
        }
    }
}
