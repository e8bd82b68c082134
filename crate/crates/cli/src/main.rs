use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use maxlab_cli::experiments;
use maxlab_cli::sweep::{run_sweep, SweepSpec};
use maxlab_core::constants::{ascent_search, AscentOptions, Kind};
use maxlab_core::constructions::Descriptor;
use maxlab_core::maximal::{maximal, OpKind, TestFunction};
use maxlab_core::rational::{parse_rational, Exponent};
use maxlab_core::{MetricMeasureSpace, Rational};

#[derive(Parser)]
#[command(name = "maxlab", version, about = "Modified maximal operators on finite metric measure spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a space from a descriptor and write it as JSON.
    BuildSpace {
        /// Descriptor JSON, inline or a file path.
        #[arg(long)]
        desc: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a maximal function with witnesses.
    Eval {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = parse_op)]
        op: OpKind,
        #[arg(long, value_parser = parse_q)]
        k: Rational,
        /// Function values as a JSON array, inline or a file path.
        #[arg(long)]
        f: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower-bound search for a best constant.
    Estimate {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = parse_q)]
        k: Rational,
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, value_parser = parse_kind)]
        kind: Kind,
        #[arg(long, value_parser = parse_op)]
        op: OpKind,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 50)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment and write `<name>.json` into the output directory.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(experiments::EXPERIMENTS))]
        name: String,
        /// Parameter overrides as a JSON object, inline or a file path.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a sweep spec and write CSV rows plus a witness sidecar.
    Sweep {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_q(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e: maxlab_core::Error| e.to_string())
}

fn parse_op(s: &str) -> Result<OpKind, String> {
    s.parse().map_err(|e: maxlab_core::Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<Kind, String> {
    s.parse().map_err(|e: maxlab_core::Error| e.to_string())
}

/// The argument itself when it looks like JSON, otherwise a file's contents.
fn inline_or_file(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

fn load_space(path: &Path) -> Result<MetricMeasureSpace> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(MetricMeasureSpace::from_json(&text)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    maxlab_cli::init_threads()?;
    match Cli::parse().command {
        Command::BuildSpace { desc, out } => {
            let space = Descriptor::from_json(&inline_or_file(&desc)?)?.build()?;
            emit(&space.to_json()?, Some(&out))
        }
        Command::Eval { space, op, k, f, out } => {
            let space = load_space(&space)?;
            let f = TestFunction::from_json(&inline_or_file(&f)?)?;
            let values = maximal(&space, &k, op, &f)?;
            emit(&serde_json::to_string_pretty(&values.to_json(&space))?, out.as_deref())
        }
        Command::Estimate { space, k, p, kind, op, restarts, iters, seed, out } => {
            let space = load_space(&space)?;
            let found = ascent_search(&space, &k, &p, kind, op, &AscentOptions::new(restarts, iters, seed))?;
            emit(&serde_json::to_string_pretty(&found.to_json())?, out.as_deref())
        }
        Command::Reproduce { name, params, out } => {
            let params = match params {
                Some(p) => serde_json::from_str(&inline_or_file(&p)?)?,
                None => serde_json::Value::Null,
            };
            let report = experiments::run(&name, params)?;
            fs::create_dir_all(&out)?;
            let path = out.join(format!("{name}.json"));
            emit(&report.to_json(), Some(&path))?;
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if !report.passed() {
                anyhow::bail!("{} of {} checks failed", report.failures().count(), report.checks.len());
            }
            Ok(())
        }
        Command::Sweep { spec, out } => {
            let spec: SweepSpec = serde_json::from_str(&inline_or_file(&spec)?)?;
            let result = run_sweep(&spec)?;
            emit(&result.to_csv()?, Some(&out))?;
            let sidecar = PathBuf::from(format!("{}.witnesses.json", out.display()));
            emit(&result.witnesses_json(), Some(&sidecar))?;
            let errors = result.rows.iter().filter(|r| r.status.starts_with("error")).count();
            eprintln!("{} rows, {errors} error cells", result.rows.len());
            Ok(())
        }
    }
}
