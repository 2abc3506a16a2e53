use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nkcert::config::RunConfig;
use nkcert::pipeline::{config_error_outcome, run, RunStatus};
use nkcert::plot::{plot_config, PlotError};
use nkcert::salem::enum_salem4;

#[derive(Parser)]
#[command(name = "nkcert", version, about = "Certify compact quotient manifolds built from number-field units")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check and write the JSON certificate.
    Verify {
        config: PathBuf,
        #[command(flatten)]
        over: Overrides,
    },
    /// Draw the fan orbit and fundamental domain as SVG (two real
    /// embeddings only).
    Plot {
        config: PathBuf,
        #[command(flatten)]
        over: Overrides,
    },
    /// List palindromic quartics with the Salem root pattern.
    Salem4 {
        #[arg(long, allow_hyphen_values = true)]
        q1_min: i64,
        #[arg(long, allow_hyphen_values = true)]
        q1_max: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Overrides {
    /// Exponent bound for windowed orbit checks.
    #[arg(long)]
    window: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Residual tolerance of the numeric identity checks.
    #[arg(long)]
    tol: Option<f64>,
    /// Output path; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(w) = self.window {
            cfg.run.window = w;
        }
        if let Some(n) = self.samples {
            cfg.run.samples = n;
        }
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        if let Some(t) = self.tol {
            cfg.tolerances.check = t;
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn load(path: &Path, over: &Overrides) -> Result<RunConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut cfg = RunConfig::from_toml(&text).map_err(|e| e.to_string())?;
    over.apply(&mut cfg);
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn verify(config: &Path, over: &Overrides) -> ExitCode {
    let (outcome, default_out) = match load(config, over) {
        Ok(cfg) => {
            let out = PathBuf::from(&cfg.output.certificate);
            (run(&cfg), out)
        }
        Err(msg) => (config_error_outcome(msg), PathBuf::from("certificate.json")),
    };
    let out = over.out.clone().unwrap_or(default_out);
    if let Err(e) = write_atomic(&out, &outcome.certificate.to_json()) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return ExitCode::from(2);
    }
    for e in &outcome.certificate.errors {
        eprintln!("error: {e}");
    }
    for w in &outcome.certificate.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}: {}", outcome.certificate.status, out.display());
    ExitCode::from(outcome.status.exit_code() as u8)
}

fn plot(config: &Path, over: &Overrides) -> ExitCode {
    let cfg = match load(config, over) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let out = over.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.plot));
    match plot_config(&cfg) {
        Ok(svg) => {
            if let Err(e) = write_atomic(&out, &svg) {
                eprintln!("error: cannot write {}: {e}", out.display());
                return ExitCode::from(2);
            }
            println!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e @ PlotError::UnsupportedDimension { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(RunStatus::ConfigError.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RunStatus::CheckFailure.exit_code() as u8)
        }
    }
}

fn salem4(q1_min: i64, q1_max: i64, out: Option<&Path>) -> ExitCode {
    if q1_min > q1_max {
        eprintln!("error: --q1-min must not exceed --q1-max");
        return ExitCode::from(2);
    }
    let list = enum_salem4(q1_min, q1_max);
    let mut text = serde_json::to_string_pretty(&list).expect("serializable");
    text.push('\n');
    match out {
        Some(p) => {
            if let Err(e) = write_atomic(p, &text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
            println!("{} polynomials: {}", list.len(), p.display());
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify { config, over } => verify(config, over),
        Command::Plot { config, over } => plot(config, over),
        Command::Salem4 { q1_min, q1_max, out } => salem4(*q1_min, *q1_max, out.as_deref()),
    }
}
