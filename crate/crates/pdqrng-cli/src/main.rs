//! Command line front end. Every subcommand loads the TOML config (or the
//! built-in defaults), applies flag overrides, runs one pipeline stage, and
//! prints a short human summary; files land in the output directory.

use clap::{Parser, Subcommand};
use pdqrng::config::PipelineConfig;
use pdqrng::pipeline;
use pdqrng::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "pdqrng",
    version,
    about = "Phase-diffusion QRNG simulator and analysis pipeline"
)]
struct Cli {
    /// TOML configuration file; omitted = built-in defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override run.seed from the config
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override run.out_dir from the config
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Worker threads for parallel stages (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Print the default configuration as TOML and exit
    #[arg(long)]
    print_defaults: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the laser, interfere pulse pairs, digitize, write samples
    Simulate,
    /// Certify min-entropy from a sample file
    Certify {
        /// Binary sample file (little-endian u16 codes)
        samples: PathBuf,
    },
    /// Hash samples down to the certified rate
    Extract {
        /// Binary sample file (little-endian u16 codes)
        samples: PathBuf,
        /// Entropy report JSON carrying the reduction factor
        report: PathBuf,
        /// Also write bits.txt with one ASCII 0/1 per bit
        #[arg(long)]
        text: bool,
    },
    /// Run the statistical battery over an extracted bit stream
    Test {
        /// Raw bit stream file
        bits: PathBuf,
    },
    /// Fit conservative laser parameters to a reference pulse trace
    Fit {
        /// Check the configured parameters instead of searching
        #[arg(long)]
        verify: bool,
    },
    /// Full chain: simulate, certify, extract, test, one manifest
    RunAll,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::reference_defaults(),
    };
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    if let Some(dir) = &cli.out_dir {
        cfg.run.out_dir = dir.clone();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    if cli.print_defaults {
        print!("{}", PipelineConfig::reference_defaults().to_toml_string());
        return Ok(());
    }
    let Some(command) = &cli.command else {
        return Err(Error::Validation(
            "no subcommand given; try --help or --print-defaults".into(),
        ));
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let cfg = load_config(cli)?;

    match command {
        Command::Simulate => {
            let out = pipeline::cmd_simulate(&cfg)?;
            println!(
                "simulate: wrote trajectory.csv, pulses.csv, samples.bin to {}",
                out.display()
            );
        }
        Command::Certify { samples } => {
            let report = pipeline::cmd_certify(&cfg, samples)?;
            println!(
                "certify: visibility {:.4}{} H_exact {:.4} bits, reduction factor {:.4}, {:.2} Gbps",
                report.visibility,
                if report.visibility_clamped { " (clamped)," } else { "," },
                report.h_exact_bits,
                report.reduction_factor,
                report.bit_rate_bps / 1e9,
            );
        }
        Command::Extract {
            samples,
            report,
            text,
        } => {
            let outcome = pipeline::cmd_extract(&cfg, samples, report, *text)?;
            println!(
                "extract: {} bits from {} blocks ({} tail samples unhashed)",
                outcome.bits.len(),
                outcome.blocks_hashed,
                outcome.dropped_tail_samples,
            );
        }
        Command::Test { bits } => {
            let report = pipeline::cmd_test(&cfg, bits)?;
            let all_within = report.summary.tests.iter().all(|t| t.within_interval);
            println!(
                "test: {} sequences x {} bits, proportions {}",
                report.summary.m,
                report.summary.sequence_bits,
                if all_within {
                    "within interval"
                } else {
                    "OUTSIDE interval"
                },
            );
            for t in &report.summary.tests {
                println!(
                    "  {:>16}: proportion {:.4} in [{:.4}, {:.4}]{}",
                    t.test_name,
                    t.proportion,
                    t.interval_low,
                    t.interval_high,
                    t.p_value_t
                        .map_or(String::new(), |p| format!(", P_value_T = {p:.4e}")),
                );
            }
        }
        Command::Fit { verify } => {
            let report = pipeline::cmd_fit(&cfg, *verify)?;
            println!(
                "fit: gain {:.4e} 1/s, cavity {:.0} um, rms {:.3e} W, margin {:.3e} W ({} candidates, {} infeasible)",
                report.params.gain_per_carrier,
                report.params.cavity_length * 1e6,
                report.rms_w,
                report.margin_w,
                report.candidates_evaluated,
                report.candidates_infeasible,
            );
        }
        Command::RunAll => {
            let report = pipeline::cmd_run_all(&cfg)?;
            println!(
                "run-all: peak {:.3} mW, width {:.1} ps, phase variance {:.1} rad^2",
                report.pulse_peak_w * 1e3,
                report.pulse_width_1e2_s * 1e12,
                report.interval_phase_variance_rad2,
            );
            println!(
                "         H_exact {:.4} bits, reduction factor {:.4}, {} output bits",
                report.entropy.h_exact_bits, report.entropy.reduction_factor, report.bit_count,
            );
            let all_within = report.battery.tests.iter().all(|t| t.within_interval);
            println!(
                "         battery: {} sequences, proportions {}",
                report.battery.m,
                if all_within {
                    "within interval"
                } else {
                    "OUTSIDE interval"
                },
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
