//! `csd` - experiment harness for the convex set disjointness toolkit.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error.

use clap::{Args, Parser, Subcommand};
use csd_cli::{
    bits_scaling_report, generate_instance, run_experiment, write_records, Caps, DomainShape,
    ExperimentConfig, GenSpec, InstanceSource, NetChoice, OutputFormat, Task,
};
use csd_core::scalar::Scalar;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "csd",
    about = "Exact two-party convex set disjointness: runs, sweeps, verification, generators",
    long_about = "Runs the deterministic protocols on generated or file instances, verifies \
decisions against brute-force oracles, measures communication, and emits fixed-column CSV \
(instance_id,n,d,eps,decision,oracle,bits,rounds,time_ms) or JSON.\n\nCaps can also be set \
through CSD_MAX_N, CSD_MAX_D, CSD_MAX_FAMILY. time_ms is 0 unless --timing is given, so \
identical config and seed produce byte-identical outputs."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonRunArgs {
    /// Task to run.
    #[arg(long, value_enum)]
    task: Task,
    /// Instance file (JSON); omits generation.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Domain size for generated instances.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Dimension for generated instances.
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Domain shape for generated instances (defaults per dimension).
    #[arg(long, value_enum)]
    shape: Option<DomainShape>,
    /// Number of generated instances.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Container epsilon, e.g. 1/4.
    #[arg(long, default_value = "1/4")]
    eps: Scalar,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Net construction used by the protocol configuration.
    #[arg(long, value_enum, default_value_t = NetChoice::Full)]
    net: NetChoice,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Record wall-clock time (breaks byte-identical reproducibility).
    #[arg(long)]
    timing: bool,
    /// Hardness sweep: bits per block.
    #[arg(long)]
    k: Option<usize>,
    /// Hardness sweep: number of blocks.
    #[arg(long)]
    c: Option<usize>,
    /// Cap override: maximum domain size.
    #[arg(long)]
    cap_n: Option<usize>,
    /// Cap override: maximum dimension.
    #[arg(long)]
    cap_d: Option<usize>,
    /// Cap override: maximum container-family size.
    #[arg(long)]
    cap_family: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run instances through a task (verification on by default).
    Run(CommonRunArgs),
    /// Run with verification enforced; exits 1 on any oracle mismatch.
    Verify(CommonRunArgs),
    /// Bits-versus-size sweep with a fitted constant.
    Sweep {
        #[arg(long, value_enum, default_value_t = Task::PromiseCsd)]
        task: Task,
        #[arg(long, default_value_t = 16)]
        n_min: usize,
        #[arg(long, default_value_t = 256)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        d_min: usize,
        #[arg(long, default_value_t = 2)]
        d_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Separated-hull samples per size (plus one shared-point run).
        #[arg(long, default_value_t = 2)]
        samples: usize,
        /// Bound the fitted constant must respect.
        #[arg(long, default_value_t = 24.0)]
        c_max: f64,
        #[arg(long, value_enum, default_value_t = NetChoice::Sampled)]
        net: NetChoice,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Emit an instance file for a task.
    Gen {
        #[arg(long, value_enum)]
        task: Task,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, value_enum)]
        shape: Option<DomainShape>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "1/4")]
        eps: Scalar,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        c: Option<usize>,
        /// Alice's hardness input, bit-packed little-endian.
        #[arg(long)]
        x_bits: Option<u64>,
        /// Bob's hardness input, bit-packed little-endian.
        #[arg(long)]
        y_bits: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn default_shape_for(d: usize) -> DomainShape {
    match d {
        1 => DomainShape::Line,
        2 => DomainShape::Parabola,
        _ => DomainShape::Moment,
    }
}

fn build_config(args: &CommonRunArgs, force_verify: bool) -> ExperimentConfig {
    let mut caps = Caps::from_env();
    if let Some(v) = args.cap_n {
        caps.max_n = v;
    }
    if let Some(v) = args.cap_d {
        caps.max_d = v;
    }
    if let Some(v) = args.cap_family {
        caps.max_family = v;
    }
    let source = match &args.input {
        Some(p) => InstanceSource::File(p.clone()),
        None => InstanceSource::Generated {
            shape: args.shape.unwrap_or_else(|| default_shape_for(args.d)),
            n: args.n,
            d: args.d,
            count: args.count,
        },
    };
    ExperimentConfig {
        task: args.task,
        source,
        epsilon: args.eps.clone(),
        seed: args.seed,
        caps,
        net: args.net,
        verify: true || force_verify,
        timing: args.timing,
        k: args.k,
        c: args.c,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Run(args) | Command::Verify(args) => {
            let config = build_config(&args, true);
            let report = run_experiment(&config)?;
            write_records(&report.records, args.format, args.output.as_deref())?;
            if report.failures > 0 {
                for r in report.records.iter().filter(|r| r.flagged) {
                    eprintln!(
                        "verification failure on {}: decision {:?} vs oracle {:?}\n{}",
                        r.instance_id,
                        r.decision,
                        r.oracle,
                        r.detail.as_deref().unwrap_or("")
                    );
                }
                return Ok(1);
            }
            Ok(0)
        }
        Command::Sweep {
            task,
            n_min,
            n_max,
            d_min,
            d_max,
            seed,
            samples,
            c_max,
            net,
            output,
            format,
        } => {
            let caps = Caps::from_env();
            let report = bits_scaling_report(
                task,
                (n_min, n_max),
                (d_min, d_max),
                seed,
                samples,
                c_max,
                net,
                &caps,
            )?;
            write_records(&report.records, format, output.as_deref())?;
            eprintln!("{}", serde_json::to_string_pretty(&report.summary)?);
            Ok(u8::from(!report.summary.within_bound))
        }
        Command::Gen {
            task,
            n,
            d,
            shape,
            seed,
            eps,
            k,
            c,
            x_bits,
            y_bits,
            output,
        } => {
            let spec = GenSpec {
                task,
                shape: shape.unwrap_or_else(|| default_shape_for(d)),
                n,
                d,
                seed,
                epsilon: eps,
                k,
                c,
                x_bits,
                y_bits,
            };
            let inst = generate_instance(&spec)?;
            let body = serde_json::to_string_pretty(&inst)?;
            match output {
                Some(p) => std::fs::write(p, body + "\n")?,
                None => println!("{body}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
