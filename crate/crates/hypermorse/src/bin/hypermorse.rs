//! Command-line front end over the experiment drivers. Exit code 0 means
//! every gated check passed, 1 means a violation, 2 means bad input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hypermorse::bounds::MorseConstants;
use hypermorse::error::{Error, Result};
use hypermorse::experiments::{
    run_contraction, run_delta_length, run_displacement, run_hyperbolicity, run_morse,
    run_richness, space_from_args, ContractionConfig, DeltaLengthConfig, MorseConfig, Report,
};
use hypermorse::rational::{parse_rational, Rational};
use hypermorse::richness::RichnessThresholds;

#[derive(Parser)]
#[command(
    name = "hypermorse",
    version,
    about = "Hyperbolicity diagnostics and Morse-lemma experiments on finite graph metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpaceArgs {
    /// Generator spec: tree:d=,R= | path:n= | cycle:n= | grid:n= | tess:p=,q=,layers=
    #[arg(long, value_name = "SPEC")]
    gen: Option<String>,
    /// Edge-list file, one "u v" pair per line, 0-based ids
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
}

impl SpaceArgs {
    fn resolve(&self) -> Result<(hypermorse::graphs::Graph, String)> {
        space_from_args(self.gen.as_deref(), self.input.as_deref())
    }
}

#[derive(Args)]
struct ConstantArgs {
    /// Constants file with key=value lines (a3, r0..r4, a2_denominator)
    #[arg(long, value_name = "FILE")]
    constants: Option<PathBuf>,
    /// Exponent denominator in the neighborhood bound
    #[arg(long, value_name = "38|28")]
    a2_denominator: Option<u32>,
}

impl ConstantArgs {
    fn resolve(&self) -> Result<MorseConstants> {
        let mut consts = match &self.constants {
            Some(path) => MorseConstants::from_config_file(path)?,
            None => MorseConstants::default(),
        };
        if let Some(d) = self.a2_denominator {
            consts.a2_exponent_denominator = d;
        }
        consts.validate()?;
        Ok(consts)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Four-point and thin-triangle constants of a space
    Hyperbolicity {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Quasi-geodesics against the geodesic-neighborhood bound
    Morse {
        #[command(flatten)]
        space: SpaceArgs,
        /// Multiplicative constant, integer or fraction like 3/2
        #[arg(long, default_value = "2")]
        lambda: String,
        /// Additive constant, integer or fraction
        #[arg(long, default_value = "2")]
        c: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the tight construction instead of random curves
        #[arg(long)]
        extremal: bool,
        #[command(flatten)]
        consts: ConstantArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Center-shift self-map of a tree ball against displacement bounds
    Displacement {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 4)]
        lambda: i64,
        #[arg(long, default_value_t = 2)]
        c: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        consts: ConstantArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Projection extents of random curves avoiding a diametral geodesic
    Contraction {
        #[command(flatten)]
        space: SpaceArgs,
        /// Mesh of the measured curves
        #[arg(long = "delta-param", default_value_t = 2)]
        delta_param: u32,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        consts: ConstantArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Geodesic-richness verdict and fitted constants
    Richness {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        consts: ConstantArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Mesh-length diagnostics of random quasi-geodesics
    DeltaLength {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value = "2")]
        lambda: String,
        #[arg(long, default_value = "1")]
        c: String,
        /// Mesh; defaults to max(1, 2c)
        #[arg(long = "delta-param")]
        delta_param: Option<u32>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn positive_rational(text: &str, name: &str) -> Result<Rational> {
    let r = parse_rational(text)?;
    if r < Rational::from_integer(0) {
        return Err(Error::Domain(format!("{name} must be nonnegative, got {r}")));
    }
    Ok(r)
}

/// Richness thresholds come from the same r0..r4 keys as the bound
/// constants; the file overrides the built-in defaults.
fn thresholds_from(args: &ConstantArgs) -> Result<RichnessThresholds> {
    let consts = match &args.constants {
        Some(path) => MorseConstants::from_config_file(path)?,
        None => return Ok(RichnessThresholds::default()),
    };
    let mut out = [0u32; 5];
    for (slot, (name, value)) in out.iter_mut().zip([
        ("r0", consts.r0),
        ("r1", consts.r1),
        ("r2", consts.r2),
        ("r3", consts.r3),
        ("r4", consts.r4),
    ]) {
        if !value.is_integer() || value < Rational::from_integer(0) {
            return Err(Error::Domain(format!(
                "richness threshold {name} must be a nonnegative integer, got {value}"
            )));
        }
        *slot = value.to_integer() as u32;
    }
    Ok(RichnessThresholds { r0: out[0], r1: out[1], r2: out[2], r3: out[3], r4: out[4] })
}

fn run(cli: Cli) -> Result<(Report, Format)> {
    match cli.command {
        Command::Hyperbolicity { space, seed, out } => {
            let (graph, name) = space.resolve()?;
            Ok((run_hyperbolicity(&graph, &name, seed)?, out.format))
        }
        Command::Morse { space, lambda, c, trials, seed, extremal, consts, out } => {
            let (graph, name) = space.resolve()?;
            let cfg = MorseConfig {
                lambda: positive_rational(&lambda, "lambda")?,
                c: positive_rational(&c, "c")?,
                trials,
                seed,
                extremal,
            };
            Ok((run_morse(&graph, &name, &cfg, &consts.resolve()?)?, out.format))
        }
        Command::Displacement { space, lambda, c, seed, consts, out } => {
            let (graph, name) = space.resolve()?;
            Ok((
                run_displacement(&graph, &name, lambda, c, seed, &consts.resolve()?)?,
                out.format,
            ))
        }
        Command::Contraction { space, delta_param, trials, seed, consts, out } => {
            let (graph, name) = space.resolve()?;
            let cfg = ContractionConfig { mesh: delta_param, trials, seed };
            Ok((run_contraction(&graph, &name, &cfg, &consts.resolve()?)?, out.format))
        }
        Command::Richness { space, seed, consts, out } => {
            let (graph, name) = space.resolve()?;
            let thresholds = thresholds_from(&consts)?;
            Ok((run_richness(&graph, &name, thresholds, seed)?, out.format))
        }
        Command::DeltaLength { space, lambda, c, delta_param, trials, seed, out } => {
            let (graph, name) = space.resolve()?;
            let cfg = DeltaLengthConfig {
                lambda: positive_rational(&lambda, "lambda")?,
                c: positive_rational(&c, "c")?,
                mesh: delta_param,
                trials,
                seed,
            };
            Ok((run_delta_length(&graph, &name, &cfg)?, out.format))
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("HYPERMORSE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| Error::Parse(format!("HYPERMORSE_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Construction(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok((report, format)) => {
            let mut out = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            if !out.ends_with('\n') {
                out.push('\n');
            }
            // A closed pipe (e.g. `| head`) is not an error; the gate verdict
            // still decides the exit code.
            use std::io::Write;
            let _ = std::io::stdout().write_all(out.as_bytes());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
