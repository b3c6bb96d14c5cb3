use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gencude_core::config::{parse_config, ExperimentConfig, FULL_N};
use gencude_core::eval::{
    alignment_similarity, build_channel, build_quantizer, hamming_loss, normalized_error, run_experiment, run_scheme,
    simulate, theorem_bound, true_transition, BoundInputs, Scheme,
};
use gencude_core::source::{flow_to_dna, load_sequence, save_sequence, Sequence, SequenceKind, SymbolSequence, WashCycle};
use gencude_core::Error;

/// Universal denoising of discrete sources seen through continuous-output channels.
#[derive(Parser)]
#[command(name = "gencude", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate clean, noisy and quantized sequence files from a config.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Directory receiving clean.txt, noisy.txt and quantized.txt.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run one scheme on a noisy sequence and write the reconstruction.
    Denoise {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        scheme: Scheme,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        noisy: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a reconstruction with the clean sequence.
    Evaluate {
        #[arg(long)]
        clean: PathBuf,
        #[arg(long)]
        denoised: PathBuf,
        /// Window size; interior error averages over positions k..n-k.
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Simple quantizer output, for the normalized error.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Wash cycle, for the DNA alignment similarity of flow sequences.
        #[arg(long)]
        wash_cycle: Option<String>,
    },
    /// Print the finite-sample bound constants.
    Bound(BoundArgs),
    /// Run every (scheme, k) cell of a config and write the results CSV.
    Bench {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Overrides the config's output path.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// Use the full-scale sequence length instead of the configured one.
    #[arg(long)]
    full_n: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long = "M")]
    alphabet: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    epsilon_star: f64,
    #[arg(long)]
    lambda_max: f64,
}

/// Exit status for command-line usage errors.
const EXIT_USAGE: u8 = 64;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) => 2,
        Error::InvalidChannel(_) => 3,
        Error::InsufficientData { .. } => 4,
        Error::Encoding(_) => 5,
        Error::Format { .. } => 6,
        Error::TrainingDiverged { .. } => 7,
        Error::ComplexityCap { .. } => 8,
        Error::NumericalUnderflow { .. } => 9,
        Error::Io { .. } => 10,
        Error::Csv(_) => 11,
    }
}

struct Failure {
    stage: &'static str,
    error: Error,
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for Result<T, Error> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|error| Failure { stage, error })
    }
}

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = parse_config(&args.config).stage("config")?;
    if args.full_n {
        cfg.n = FULL_N;
    }
    Ok(cfg)
}

fn symbols(path: &PathBuf) -> Result<SymbolSequence, Error> {
    match load_sequence::<f64>(path, SequenceKind::Symbols)? {
        Sequence::Symbols(s) => Ok(s),
        Sequence::Observations(_) => unreachable!("symbol files load as symbols"),
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Simulate { cfg, out_dir } => {
            let cfg = load_config(&cfg)?;
            let sim = simulate(&cfg).stage("simulate")?;
            let z = sim.quantized().stage("simulate")?;
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::Io { path: out_dir.clone(), source: e }).stage("io")?;
            save_sequence::<f64>(out_dir.join("clean.txt"), &Sequence::Symbols(sim.clean.clone())).stage("io")?;
            save_sequence(out_dir.join("noisy.txt"), &Sequence::Observations(sim.noisy.clone())).stage("io")?;
            save_sequence::<f64>(out_dir.join("quantized.txt"), &Sequence::Symbols(z)).stage("io")?;
            println!("wrote {} symbols to {}", sim.clean.len(), out_dir.display());
        }
        Command::Denoise { cfg, scheme, k, noisy, out } => {
            let cfg = load_config(&cfg)?;
            let y = match load_sequence::<f64>(&noisy, SequenceKind::Observations).stage("io")? {
                Sequence::Observations(y) => y,
                Sequence::Symbols(_) => unreachable!("observation files load as observations"),
            };
            let channel = build_channel(&cfg).stage("channel")?;
            let q = build_quantizer(&cfg).stage("quantizer")?;
            let t = true_transition(&cfg);
            let xhat = run_scheme(scheme, k, &y, &channel, &q, t.as_ref(), &cfg).stage("denoise")?;
            save_sequence::<f64>(&out, &Sequence::Symbols(xhat)).stage("io")?;
        }
        Command::Evaluate { clean, denoised, k, baseline, wash_cycle } => {
            let x = symbols(&clean).stage("io")?;
            let xhat = symbols(&denoised).stage("io")?;
            let raw = hamming_loss(&x, &xhat, false, 0).stage("evaluate")?;
            let interior = hamming_loss(&x, &xhat, true, k).stage("evaluate")?;
            println!("raw_error = {raw}");
            println!("interior_error = {interior}");
            if let Some(b) = baseline {
                let base = symbols(&b).stage("io")?;
                let be = hamming_loss(&x, &base, true, k).stage("evaluate")?;
                println!("normalized_error = {}", normalized_error(interior, be).stage("evaluate")?);
            }
            if let Some(c) = wash_cycle {
                let c = WashCycle::new(&c).stage("evaluate")?;
                let s = alignment_similarity(&flow_to_dna(x.symbols(), &c), &flow_to_dna(xhat.symbols(), &c))
                    .stage("evaluate")?;
                println!("similarity = {s}");
            }
        }
        Command::Bound(b) => {
            let inputs = BoundInputs {
                k: b.k,
                n: b.n,
                alphabet: b.alphabet,
                delta: b.delta,
                epsilon: b.epsilon,
                epsilon_star: b.epsilon_star,
                lambda_max: b.lambda_max,
            };
            println!("c1 = {}", inputs.c1());
            println!("threshold = {}", inputs.threshold());
            let r = theorem_bound(&inputs).stage("bound")?;
            println!("c2 = {}", r.c2);
            println!("bound = {:e}", r.bound);
        }
        Command::Bench { cfg, output } => {
            let mut cfg = load_config(&cfg)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            let runs = run_experiment(&cfg).stage("bench")?;
            let failed = runs.iter().filter(|r| r.error_message.is_some()).count();
            println!("{} cells ({failed} failed) written to {}", runs.len(), cfg.output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { stage, error }) => {
            eprintln!("error [{stage}]: {error}");
            ExitCode::from(exit_code(&error))
        }
    }
}
