#![allow(clippy::result_large_err)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pag_core::rational::int;
use pag_core::report;
use pag_core::{
    analysis, io, parse_rational, CountryId, Environment, EquilibriumConcept, Execution,
    GridOptions, PairValues, Relation, Schedule, StrategyMatrix, UtilityForm, UtilityModel,
    WelfareMode,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const MAX_SPACE_VAR: &str = "PAG_MAX_SPACE";

#[derive(Parser)]
#[command(name = "pag", version, about = "Power allocation game solver")]
struct Cli {
    /// Write the JSON result here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for grid scans (default: all cores); never changes the output
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Override the utility form of the scenario
    #[arg(long, value_parser = parse_form)]
    form: Option<UtilityForm>,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Grid denominator d: allocations are multiples of 1/d
    #[arg(long)]
    grid: Option<u64>,

    #[arg(long, value_enum, default_value_t = ConceptArg::Utility)]
    concept: ConceptArg,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a scenario file
    Validate { scenario: PathBuf },
    /// Support, threat and state of every country under an allocation
    States {
        scenario: PathBuf,
        allocation: PathBuf,
    },
    /// Exact best response of one country against an allocation
    BestResponse {
        scenario: PathBuf,
        allocation: PathBuf,
        #[arg(long)]
        country: String,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Every equilibrium on the grid
    Equilibria {
        scenario: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Best-response dynamics from an allocation (all power on self by default)
    Dynamics {
        scenario: PathBuf,
        #[arg(long)]
        start: Option<PathBuf>,
        /// Shuffle the update order every round with this seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        max_rounds: usize,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Compare a country's optimal welfare with fewer and with more friends
    Paradox {
        /// Scenario where the country has fewer friends
        small: PathBuf,
        /// Same scenario with extra friends for the country
        large: PathBuf,
        #[arg(long)]
        country: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Equilibria)]
        mode: ModeArg,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Price of anarchy on the grid, with the analytic bounds
    Poa {
        scenario: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Analytic price-of-anarchy bounds
    Bounds {
        scenario: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Build a pair of environments exhibiting the paradox
    #[command(subcommand)]
    Construct(Construct),
}

#[derive(Args)]
struct ConstructArgs {
    /// Number of countries
    #[arg(long)]
    n: usize,
    /// Comma-separated powers of countries 1..n
    #[arg(long, value_delimiter = ',')]
    powers: Vec<String>,
    /// The country that loses by gaining friends (1-based)
    #[arg(long)]
    i: usize,
    /// Value of each target to the country as an adversary in good standing
    #[arg(long, default_value = "2")]
    adversary_value: String,
    /// Also write <prefix>_small.json and <prefix>_large.json
    #[arg(long)]
    out_prefix: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Construct {
    /// A single target country j
    Single {
        #[command(flatten)]
        common: ConstructArgs,
        #[arg(long)]
        j: usize,
    },
    /// A set of target countries
    Targets {
        #[command(flatten)]
        common: ConstructArgs,
        /// Comma-separated targets (1-based)
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<usize>,
        /// Leave targets unrelated to each other instead of mutual adversaries
        #[arg(long)]
        unrelated_targets: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Equilibria,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConceptArg {
    Utility,
    StrongPreference,
}

fn parse_form(s: &str) -> Result<UtilityForm, pag_core::Error> {
    s.parse()
}

enum Failure {
    /// Unreadable or invalid input: exit 2.
    Input(String),
    /// The analysis itself failed: exit 3.
    Module(pag_core::Error),
}

impl From<pag_core::Error> for Failure {
    fn from(e: pag_core::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Module(e)
        }
    }
}

type Outcome<T> = Result<T, Failure>;

struct Manifest {
    command: &'static str,
    inputs: Vec<Value>,
    parameters: serde_json::Map<String, Value>,
}

impl Manifest {
    fn new(command: &'static str) -> Self {
        Manifest {
            command,
            inputs: Vec::new(),
            parameters: serde_json::Map::new(),
        }
    }

    fn read(&mut self, path: &Path) -> Outcome<String> {
        let bytes =
            std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.inputs.push(json!({
            "file": path.file_name().map(|f| f.to_string_lossy().into_owned()),
            "sha256": hex::encode(Sha256::digest(&bytes)),
        }));
        String::from_utf8(bytes)
            .map_err(|_| Failure::Input(format!("{}: not UTF-8", path.display())))
    }

    fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    fn finish(self, report: Value) -> Value {
        json!({
            "manifest": {
                "command": self.command,
                "inputs": self.inputs,
                "parameters": self.parameters,
                "tool_version": env!("CARGO_PKG_VERSION"),
            },
            "report": report,
        })
    }
}

fn max_space() -> Outcome<u128> {
    match std::env::var(MAX_SPACE_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Input(format!(
                "{MAX_SPACE_VAR} must be a positive integer, got `{v}`"
            ))
        }),
        Err(_) => Ok(pag_core::DEFAULT_MAX_SPACE),
    }
}

fn execution(jobs: Option<usize>) -> Execution {
    match jobs {
        Some(1) => Execution::Sequential,
        Some(n) => Execution::ParallelJobs(n),
        None => Execution::Parallel,
    }
}

fn load(
    manifest: &mut Manifest,
    path: &Path,
    model: &ModelArgs,
) -> Outcome<(Environment, UtilityModel)> {
    let text = manifest.read(path)?;
    let (env, mut m) = io::parse_scenario(&text)?;
    if let Some(form) = model.form {
        m = m.with_form(form);
    }
    manifest.param("form", m.form.as_str());
    Ok((env, m))
}

fn country(env: &Environment, label: &str) -> Outcome<CountryId> {
    env.id_of(label)
        .ok_or_else(|| Failure::Input(format!("unknown country label `{label}`")))
}

fn grid_options(
    manifest: &mut Manifest,
    args: &GridArgs,
    jobs: Option<usize>,
    envs: &[&Environment],
) -> Outcome<GridOptions> {
    let cap = max_space()?;
    let denominator = match args.grid {
        Some(0) => return Err(Failure::Input("--grid must be positive".into())),
        Some(d) => {
            manifest.param("grid_source", "explicit");
            d
        }
        None => {
            manifest.param("grid_source", "largest-within-cap");
            envs.iter()
                .map(|env| pag_core::largest_denominator_within(env, cap))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .min()
                .unwrap_or(1)
        }
    };
    let concept = match args.concept {
        ConceptArg::Utility => EquilibriumConcept::Utility,
        ConceptArg::StrongPreference => EquilibriumConcept::StrongPreference,
    };
    manifest.param("grid_denominator", denominator);
    manifest.param("max_space", cap.to_string());
    manifest.param(
        "concept",
        match args.concept {
            ConceptArg::Utility => "utility",
            ConceptArg::StrongPreference => "strong-preference",
        },
    );
    Ok(GridOptions::new(denominator)
        .with_max_space(cap)
        .with_execution(execution(jobs))
        .with_concept(concept))
}

fn allocation(manifest: &mut Manifest, env: &Environment, path: &Path) -> Outcome<StrategyMatrix> {
    let text = manifest.read(path)?;
    Ok(io::parse_allocation(env, &text)?)
}

fn one_based(n: usize, k: usize, what: &str) -> Outcome<CountryId> {
    if k == 0 || k > n {
        return Err(Failure::Input(format!(
            "--{what} must be between 1 and {n}, got {k}"
        )));
    }
    Ok(CountryId(k - 1))
}

fn construct(manifest: &mut Manifest, cmd: &Construct) -> Outcome<Value> {
    let (common, targets, relations) = match cmd {
        Construct::Single { common, j } => {
            (common, vec![*j], analysis::SubsetRelations::Adversarial)
        }
        Construct::Targets {
            common,
            s,
            unrelated_targets,
        } => (
            common,
            s.clone(),
            if *unrelated_targets {
                analysis::SubsetRelations::Unrelated
            } else {
                analysis::SubsetRelations::Adversarial
            },
        ),
    };
    if common.powers.len() != common.n {
        return Err(Failure::Input(format!(
            "--n is {} but {} powers were given",
            common.n,
            common.powers.len()
        )));
    }
    let powers = common
        .powers
        .iter()
        .map(|p| parse_rational(p.trim()).map_err(|e| Failure::Input(format!("--powers: {e}"))))
        .collect::<Outcome<Vec<_>>>()?;
    let i = one_based(common.n, common.i, "i")?;
    let targets: BTreeSet<CountryId> = targets
        .iter()
        .map(|&t| one_based(common.n, t, "j"))
        .collect::<Outcome<_>>()?;
    let value = parse_rational(&common.adversary_value)
        .map_err(|e| Failure::Input(format!("--adversary-value: {e}")))?;
    manifest.param("n", common.n);
    manifest.param(
        "powers",
        powers
            .iter()
            .map(pag_core::format_rational)
            .collect::<Vec<_>>(),
    );
    manifest.param("i", common.i);
    manifest.param(
        "targets",
        targets.iter().map(|t| t.0 + 1).collect::<Vec<_>>(),
    );
    manifest.param("adversary_value", pag_core::format_rational(&value));

    let pair = match cmd {
        Construct::Single { j, .. } => {
            analysis::construct_single_target_pair(&powers, i, one_based(common.n, *j, "j")?)?
        }
        Construct::Targets { .. } => {
            analysis::construct_target_pair(&powers, i, &targets, relations)?
        }
    };
    let mut model = UtilityModel::default_for(&pair.more_friends);
    for &t in &targets {
        model.table.set_pair(
            i,
            t,
            Relation::Adversary,
            PairValues::new(value.clone(), int(0)),
        )?;
    }
    if let Some(prefix) = &common.out_prefix {
        for (suffix, env) in [
            ("small", &pair.fewer_friends),
            ("large", &pair.more_friends),
        ] {
            let path = PathBuf::from(format!("{}_{suffix}.json", prefix.display()));
            std::fs::write(&path, io::write_scenario(env, Some(&model)))
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(report::constructed_pair_report(&pair, Some(&model)))
}

fn run(cli: &Cli) -> Outcome<Value> {
    let jobs = cli.jobs;
    let value = match &cli.command {
        Command::Validate { scenario } => {
            let mut m = Manifest::new("validate");
            let (env, model) = load(&mut m, scenario, &ModelArgs { form: None })?;
            let summary = json!({
                "valid": true,
                "countries": env.len(),
                "relations": env.relations().count(),
                "form": model.form.as_str(),
            });
            m.finish(summary)
        }
        Command::States {
            scenario,
            allocation: alloc,
        } => {
            let mut m = Manifest::new("states");
            let (env, _) = load(&mut m, scenario, &ModelArgs { form: None })?;
            let u = allocation(&mut m, &env, alloc)?;
            m.finish(report::states_report(&env, &u)?)
        }
        Command::BestResponse {
            scenario,
            allocation: alloc,
            country: label,
            model,
        } => {
            let mut m = Manifest::new("best-response");
            let (env, model) = load(&mut m, scenario, model)?;
            let u = allocation(&mut m, &env, alloc)?;
            let i = country(&env, label)?;
            m.param("country", label.as_str());
            let br = pag_core::best_response(&env, &model, &u, i)?;
            m.finish(report::best_response_report(&env, &model, &u, &br)?)
        }
        Command::Equilibria {
            scenario,
            model,
            grid,
        } => {
            let mut m = Manifest::new("equilibria");
            let (env, model) = load(&mut m, scenario, model)?;
            let options = grid_options(&mut m, grid, jobs, &[&env])?;
            let set = pag_core::enumerate_equilibria(&env, &model, &options)?;
            m.finish(report::equilibrium_set_report(&env, &model, &set)?)
        }
        Command::Dynamics {
            scenario,
            start,
            seed,
            max_rounds,
            model,
        } => {
            let mut m = Manifest::new("dynamics");
            let (env, model) = load(&mut m, scenario, model)?;
            let u0 = match start {
                Some(path) => allocation(&mut m, &env, path)?,
                None => StrategyMatrix::all_on_self(&env),
            };
            let schedule = match seed {
                Some(s) => Schedule::Random(*s),
                None => Schedule::RoundRobin,
            };
            m.param("seed", *seed);
            m.param("max_rounds", *max_rounds);
            let d = pag_core::best_response_dynamics(&env, &model, &u0, schedule, *max_rounds)?;
            m.finish(report::dynamics_report(&env, &model, &d)?)
        }
        Command::Paradox {
            small,
            large,
            country: label,
            mode,
            model,
            grid,
        } => {
            let mut m = Manifest::new("paradox");
            let (env_small, model_small) = load(&mut m, small, model)?;
            let (env_large, model_large) = load(&mut m, large, model)?;
            let i = country(&env_small, label)?;
            let mode = match mode {
                ModeArg::Equilibria => WelfareMode::OverEquilibria,
                ModeArg::All => WelfareMode::OverAllMatrices,
            };
            m.param("country", label.as_str());
            m.param("mode", mode.as_str());
            let options = grid_options(&mut m, grid, jobs, &[&env_small, &env_large])?;
            let p = analysis::detect_paradox(
                &env_small,
                &env_large,
                &model_small,
                &model_large,
                i,
                mode,
                &options,
            )?;
            let nc = analysis::check_necessary_condition(&model_large, i)?;
            let mut out = report::paradox_report(&p);
            out["necessary_condition"] = report::necessary_condition_value(&env_large, &nc);
            m.finish(out)
        }
        Command::Poa {
            scenario,
            model,
            grid,
        } => {
            let mut m = Manifest::new("poa");
            let (env, model) = load(&mut m, scenario, model)?;
            let options = grid_options(&mut m, grid, jobs, &[&env])?;
            m.finish(report::poa_report(&analysis::price_of_anarchy(
                &env, &model, &options,
            )?))
        }
        Command::Bounds { scenario, model } => {
            let mut m = Manifest::new("bounds");
            let (env, model) = load(&mut m, scenario, model)?;
            m.finish(report::bounds_value(&analysis::welfare_bounds(
                &env, &model,
            )?))
        }
        Command::Construct(cmd) => {
            let mut m = Manifest::new("construct");
            let out = construct(&mut m, cmd)?;
            m.finish(out)
        }
    };
    Ok(value)
}

fn emit(out: Option<&Path>, value: &Value) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(value) => match emit(cli.out.as_deref(), &value) {
            Ok(()) => ExitCode::SUCCESS,
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
        },
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Module(e)) => {
            let value = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("error: {e}");
            let _ = emit(cli.out.as_deref(), &value);
            ExitCode::from(3)
        }
    }
}
