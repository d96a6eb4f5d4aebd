use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kfim_core::experiment::{
    haar_refs, preset, render, run_experiment, write_atomic, ExperimentConfig, HaarSettings,
    OutputFormat,
};
use kfim_core::haar::{haar_reference, HaarMeasure};
use kfim_core::measures::TriPartition;
use kfim_core::verify::run_checks;
use kfim_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "kfim",
    version,
    about = "Mixed-state entanglement in the kicked-field Ising chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a figure preset.
    Preset {
        name: String,
        #[arg(long = "L")]
        sites: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long)]
        t_max: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        bits: bool,
        /// Also write Haar reference values (JSON keyed by CSV column).
        #[arg(long)]
        refs: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Haar-random reference values.
    Haar {
        #[arg(long = "L")]
        sites: usize,
        /// Block sizes `a,b,c`.
        #[arg(long, value_delimiter = ',', required = true)]
        partition: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        alphas: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-engine and transfer-matrix checks; nonzero exit on failure.
    Verify {
        /// Include the t=3 spectral certificate.
        #[arg(long)]
        full: bool,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_config(config: &ExperimentConfig) -> Result<()> {
    let records = run_experiment(config)?;
    let (format, bits, path) = match &config.output {
        Some(o) => (o.format, o.bits, Some(&o.path)),
        None => (OutputFormat::Csv, false, None),
    };
    emit(&render(config, &records, format, bits)?, path)
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run { config } => {
            run_config(&ExperimentConfig::load(&config)?)?;
        }
        Command::Preset {
            name,
            sites,
            epsilon,
            t_max,
            out,
            format,
            bits,
            refs,
            samples,
            seed,
        } => {
            let mut config = preset(&name, sites)?;
            config.epsilon = epsilon;
            if let Some(t) = t_max {
                config.t_max = t;
            }
            if refs.is_some() {
                config.haar = Some(HaarSettings { samples, seed });
            }
            config.validate()?;
            let records = run_experiment(&config)?;
            emit(
                &render(&config, &records, format.into(), bits)?,
                out.as_ref(),
            )?;
            if let Some(path) = refs {
                let mut text = serde_json::to_string_pretty(&haar_refs(&config)?)?;
                text.push('\n');
                write_atomic(&path, &text)?;
            }
        }
        Command::Haar {
            sites,
            partition,
            samples,
            seed,
            alphas,
            out,
        } => {
            let [a, b, c] = partition[..] else {
                return Err(Error::InvalidConfig(format!(
                    "--partition takes three sizes a,b,c, got {}",
                    partition.len()
                )));
            };
            let part = TriPartition::new(a, b, c)?;
            let mut alphas = alphas;
            alphas.sort_by(f64::total_cmp);
            alphas.dedup();
            let reference =
                haar_reference(sites, &part, &HaarMeasure::all(&alphas), samples, seed)?;
            let mut text = serde_json::to_string_pretty(&reference)?;
            text.push('\n');
            emit(&text, out.as_ref())?;
        }
        Command::Verify { full } => {
            let results = run_checks(full)?;
            for r in &results {
                println!("{r}");
            }
            return Ok(results.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
