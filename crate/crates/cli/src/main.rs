//! `roster`: generate unit instances, solve them, export reports and run the
//! method comparison.
//!
//! Exit codes: 0 on success, 2 when an input document is invalid, 3 when the
//! configuration is rejected, 1 for anything else (I/O and the like).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use roster_core::codec::{from_json, to_canonical};
use roster_core::compare::{compare_on_instance, write_comparison_csv, CompareSettings, ComparisonRow};
use roster_core::instances::{builtin_profile, GeneratorManifest};
use roster_core::reports::{
    coverage_rate, solve, utilization_satisfaction, write_coverage_csv, write_gantt_csv, write_pareto_csv,
    write_staff_csv,
};
use roster_core::{
    builtin_profiles, decode_instance, encode_instance, generate_instance, select_extreme, Config, ConfigError, Method,
    ModelError, RunReport, SolveError, UnitProfile,
};

#[derive(Parser)]
#[command(
    name = "roster",
    version,
    about = "Multi-objective staff rostering for hospital units"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic unit instance.
    Generate {
        /// unit1..unit5, or `custom` together with --counts.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Headcounts L1,L2,L3,L4 for a custom profile.
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<u32>>,
        #[arg(long, default_value_t = 1.0)]
        demand_scale: f64,
        /// Config file supplying weights and generator knobs.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve an instance and write a run report.
    Solve {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `ga.master_seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Greedy repetitions for `--method greedy`.
        #[arg(long, default_value_t = 1000)]
        greedy_runs: usize,
        /// Write one JSON line per NSGA-II generation to this file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Export CSV data from a run report.
    Report {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum)]
        emit: Emit,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Front member to export: the balanced one or the minimum of f1, f2 or f3.
        #[arg(long, value_enum, default_value = "balanced")]
        pick: Pick,
        /// Break coverage down by skill.
        #[arg(long)]
        per_skill: bool,
    },
    /// Compare greedy, single-objective GA and NSGA-II on builtin units.
    Compare {
        /// unit1..unit5 or `all`.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long, default_value_t = 1000)]
        greedy_runs: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed of the generated instance.
        #[arg(long, default_value_t = 42)]
        instance_seed: u64,
        /// GA run `i` uses master seed `base_seed + i`.
        #[arg(long, default_value_t = 1)]
        base_seed: u64,
    },
    /// Inspect configuration.
    Config {
        /// Print every default as a config file.
        #[arg(long)]
        dump: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Greedy,
    Soga,
    Moo,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Greedy => Method::Greedy,
            MethodArg::Soga => Method::Soga,
            MethodArg::Moo => Method::Moo,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    #[value(name = "pareto.csv")]
    Pareto,
    #[value(name = "gantt.csv")]
    Gantt,
    #[value(name = "coverage.csv")]
    Coverage,
    #[value(name = "staff.csv")]
    Staff,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Pick {
    Balanced,
    F1,
    F2,
    F3,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Validation(anyhow::Error),
    Config(anyhow::Error),
    Other(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Config(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Validation(e) | Failure::Config(e) | Failure::Other(e) => e,
        }
    }

    /// The reader of our stdout went away, as with `| head`.
    fn is_broken_pipe(&self) -> bool {
        self.error().chain().any(|c| {
            c.downcast_ref::<std::io::Error>()
                .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
        })
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Validation(e.into())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.into())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Config(c) => c.into(),
            SolveError::Model(m) => m.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.is_broken_pipe() => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Generate {
            profile,
            seed,
            out,
            counts,
            demand_scale,
            config,
        } => generate(&profile, seed, &out, counts, demand_scale, config.as_deref()),
        Command::Solve {
            method,
            instance,
            config,
            seed,
            out,
            greedy_runs,
            log,
        } => solve_cmd(
            method.into(),
            &instance,
            config.as_deref(),
            seed,
            &out,
            greedy_runs,
            log.as_deref(),
        ),
        Command::Report {
            report,
            emit,
            out,
            pick,
            per_skill,
        } => report_cmd(&report, emit, out.as_deref(), pick, per_skill),
        Command::Compare {
            profile,
            seeds,
            greedy_runs,
            out,
            config,
            instance_seed,
            base_seed,
        } => {
            let settings = CompareSettings {
                seeds,
                greedy_runs,
                base_seed,
                instance_seed,
            };
            compare(&profile, &settings, &out, config.as_deref())
        }
        Command::Config { dump } => {
            if !dump {
                return Err(Failure::Config(anyhow!("nothing to do; pass --dump")));
            }
            let text = serde_json::to_string_pretty(&Config::default()).map_err(anyhow::Error::from)?;
            writeln!(std::io::stdout().lock(), "{text}")?;
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Other)
}

fn write(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let config: Config = from_json(&read(path)?)
        .map_err(|e| Failure::Config(anyhow::Error::from(e).context(format!("config file {}", path.display()))))?;
    config.validate()?;
    Ok(config)
}

fn unit_profile(name: &str, counts: Option<Vec<u32>>, demand_scale: f64) -> Result<UnitProfile, Failure> {
    let mut profile = match (name, counts) {
        ("custom", Some(c)) => {
            let counts: [u32; 4] = c
                .try_into()
                .map_err(|_| Failure::Config(anyhow!("--counts takes exactly four values L1,L2,L3,L4")))?;
            UnitProfile::new("custom", counts)
        }
        ("custom", None) => return Err(Failure::Config(anyhow!("--profile custom needs --counts L1,L2,L3,L4"))),
        (_, Some(_)) => return Err(Failure::Config(anyhow!("--counts is only valid with --profile custom"))),
        (n, None) => builtin_profile(n).ok_or_else(|| Failure::Config(anyhow!("unknown profile {n:?}")))?,
    };
    profile.demand_scale = demand_scale;
    profile.validate()?;
    Ok(profile)
}

fn generate(
    name: &str,
    seed: u64,
    out: &Path,
    counts: Option<Vec<u32>>,
    demand_scale: f64,
    config: Option<&Path>,
) -> Outcome {
    let config = load_config(config)?;
    let profile = unit_profile(name, counts, demand_scale)?;
    let instance = generate_instance(&profile, &config.generator, &config.weights, seed)?;
    write(out, &encode_instance(&instance))?;
    let manifest = GeneratorManifest {
        profile,
        knobs: config.generator,
        seed,
    };
    write(&out.with_extension("manifest.json"), &to_canonical(&manifest))
}

fn solve_cmd(
    method: Method,
    instance: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
    greedy_runs: usize,
    log: Option<&Path>,
) -> Outcome {
    let mut config = load_config(config)?;
    if let Some(s) = seed {
        config.ga.master_seed = s;
    }
    config.validate()?;
    let instance = decode_instance(&read(instance)?)?;

    let mut log_file = match log {
        Some(p) => Some(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => None,
    };
    let mut log_error = None;
    let report = solve(method, &instance, &config.ga, greedy_runs, |stats| {
        if let Some(w) = log_file.as_mut() {
            if let Err(e) = writeln!(w, "{}", to_canonical(stats)) {
                log_error.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = log_error {
        return Err(e.into());
    }
    if let Some(mut w) = log_file {
        w.flush()?;
    }
    write(out, &to_canonical(&report))
}

fn report_cmd(path: &Path, emit: Emit, out: Option<&Path>, pick: Pick, per_skill: bool) -> Outcome {
    let mut report: RunReport = from_json(&read(path)?)?;
    report.validate()?;
    if pick != Pick::Balanced {
        let objective = match pick {
            Pick::F1 => 1,
            Pick::F2 => 2,
            _ => 3,
        };
        report.selected = select_extreme(&report.fitnesses(), objective)?;
        let chosen = report.schedule(report.selected)?;
        report.coverage_rate = coverage_rate(&chosen, &report.instance);
        report.staff = utilization_satisfaction(&chosen, &report.instance);
    }

    let mut sink: Box<dyn Write> = match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    match emit {
        Emit::Pareto => write_pareto_csv(&report, &mut sink)?,
        Emit::Gantt => write_gantt_csv(&report, &mut sink)?,
        Emit::Coverage => write_coverage_csv(&report, per_skill, &mut sink)?,
        Emit::Staff => write_staff_csv(&report, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn compare(name: &str, settings: &CompareSettings, out: &Path, config: Option<&Path>) -> Outcome {
    let config = load_config(config)?;
    let profiles = if name == "all" {
        builtin_profiles()
    } else {
        vec![builtin_profile(name).ok_or_else(|| Failure::Config(anyhow!("unknown profile {name:?}")))?]
    };
    let mut rows: Vec<ComparisonRow> = Vec::new();
    for p in &profiles {
        let instance = generate_instance(p, &config.generator, &config.weights, settings.instance_seed)?;
        let c = compare_on_instance(&instance, &config, settings)?;
        for r in &c.rows {
            eprintln!(
                "{} {:<7} total {:>12.3}  improvement vs greedy {:>7.2}%",
                r.unit,
                format!("{:?}", r.method).to_lowercase(),
                r.total,
                r.improvement_vs_greedy_pct
            );
        }
        rows.extend(c.rows);
    }
    let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
    write_comparison_csv(&rows, BufWriter::new(file))?;
    Ok(())
}
