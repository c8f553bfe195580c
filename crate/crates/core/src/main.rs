use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use amplitude_flow::scenario::{
    bundled, bundled_scenarios, run_scenario, verify_all, Engines, Profile, ScenarioConfig,
};
use amplitude_flow::Error;

#[derive(Parser)]
#[command(
    name = "afl",
    version,
    about = "Schmidt-weight trajectories and conservation checks for amplitude-flow channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a bundled scenario by name.
    Run {
        config: String,
        /// Output directory (overrides the config and AFL_OUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of time points.
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
    },
    /// List bundled scenarios.
    List,
    /// Sweep the invariant suite and print a JSON summary.
    Verify {
        #[arg(long, default_value = "strict")]
        profile: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Closed,
    Oracle,
    Both,
}

impl From<EngineArg> for Engines {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Closed => Engines { closed_form: true, oracle: false },
            EngineArg::Oracle => Engines { closed_form: false, oracle: true },
            EngineArg::Both => Engines::BOTH,
        }
    }
}

const EXIT_INVARIANT: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Config(_) | Error::InvalidInput(_) | Error::Range(_) => EXIT_CONFIG,
        _ => EXIT_INVARIANT,
    }
}

fn load(config: &str) -> amplitude_flow::Result<ScenarioConfig> {
    let path = Path::new(config);
    if path.exists() {
        return ScenarioConfig::from_path(path);
    }
    match bundled(config) {
        Some(s) => s.config(),
        None => ScenarioConfig::from_path(path),
    }
}

fn run(
    config: &str,
    out: Option<PathBuf>,
    points: Option<usize>,
    engine: Option<EngineArg>,
) -> amplitude_flow::Result<bool> {
    let mut cfg = load(config)?;
    if let Some(n) = points {
        if n < 2 {
            return Err(Error::Config(format!("--points must be at least 2, got {n}")));
        }
        cfg.n_points = n;
    }
    if let Some(e) = engine {
        cfg.engines = e.into();
    }
    let dir = out
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os("AFL_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let result = run_scenario(&cfg)?;
    let (csv, json) = result.write(&dir)?;
    for check in &result.checks {
        let verdict = match (check.threshold, check.pass) {
            (None, _) => "INFO",
            (Some(_), true) => "PASS",
            (Some(_), false) => "FAIL",
        };
        match check.threshold {
            Some(t) => println!("{verdict} {:<36} max {:.3e} (limit {:.1e})", check.name, check.max, t),
            None => println!("{verdict} {:<36} max {:.3e}", check.name, check.max),
        }
    }
    println!("wrote {}", csv.display());
    println!("wrote {}", json.display());
    Ok(result.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out, points, engine } => run(&config, out, points, engine),
        Command::List => {
            for s in bundled_scenarios() {
                println!("{:<20} {}", s.name, s.description());
            }
            Ok(true)
        }
        Command::Verify { profile } => profile.parse::<Profile>().and_then(verify_all).map(|summary| {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            summary.pass
        }),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_INVARIANT),
        Err(err) => {
            eprintln!("afl: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
