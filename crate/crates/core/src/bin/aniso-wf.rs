use aniso_wf::config::{load_config, RunConfig};
use aniso_wf::detector::{classify, decay_profile, wavefront_map};
use aniso_wf::presets::{label_string, run_experiment, PRESET_NAMES};
use aniso_wf::Error;
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Anisotropic wave front detection from short-time Fourier transforms.
#[derive(Parser)]
#[command(name = "aniso-wf", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the named experiments.
    List,
    /// Run a named experiment; exits 1 if any expectation fails.
    Run {
        preset: String,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Classify a direction sweep; writes map.json and map.csv.
    Wfmap {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Decay profile along one direction; writes profile.csv.
    Decay {
        config: PathBuf,
        /// Direction as w,sigma_x,sigma_xi; overrides the config file.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<f64>>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::UnknownPreset(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn out_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.cmd {
        Cmd::List => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(true)
        }
        Cmd::Run { preset, report } => {
            let r = run_experiment(&preset)?;
            print!("{}", r.summary());
            if let Some(path) = report {
                write(&path, &r.to_json())?;
            }
            println!("{}", if r.passed() { "PASS" } else { "FAIL" });
            Ok(r.passed())
        }
        Cmd::Wfmap { config, out_dir: dir } => {
            let cfg = load_config(&config)?;
            let m = wavefront_map(&cfg.evaluator()?, cfg.idx, cfg.sweep, &cfg.policy)?;
            out_dir(&dir)?;
            write(&dir.join("map.json"), &m.to_json())?;
            write(&dir.join("map.csv"), &m.to_csv())?;
            println!("{}", label_string(&m));
            Ok(true)
        }
        Cmd::Decay { config, direction, out_dir: dir } => {
            let cfg: RunConfig = load_config(&config)?;
            let params = match direction {
                Some(v) if v.len() == 3 => (v[0], v[1], v[2]),
                Some(v) => return Err(Failure::Usage(format!("--direction takes three values, got {}", v.len()))),
                None => cfg
                    .direction
                    .ok_or_else(|| Failure::Usage("no direction given (use --direction or decay.w)".into()))?,
            };
            let dir_q = cfg.direction_dir(params).map_err(|e| Failure::Usage(e.to_string()))?;
            let p = decay_profile(&cfg.evaluator()?, dir_q, cfg.idx, &cfg.policy)?;
            out_dir(&dir)?;
            write(&dir.join("profile.csv"), &p.to_csv())?;
            let v = classify(&p, &cfg.policy)?;
            println!("{} rate={} {}", v.label.as_str(), v.fitted_terminal_rate, v.confidence_notes);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
