//! `lindcert` command-line interface.
//!
//! Exit codes: 0 on success or ACCEPT, 2 on REJECT, 1 on any error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lindcert::detector::{self, DetectionParams, Verdict};
use lindcert::{oracle, par, parse_config, report, Mode};

#[derive(Parser)]
#[command(name = "lindcert", version, about = "Simulate local Lindbladians and certify the absence of dissipation")]
struct Cli {
    /// Master seed. Drawn from entropy and printed when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for rounds and verification trials.
    #[arg(long, global = true, env = "LINDCERT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dissipation detector on a generator file.
    Detect(DetectArgs),
    /// Identity fraction and Choi purity along exp(tL).
    Curve {
        config: PathBuf,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues of the generator.
    Spectrum {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bell outcome distribution of exp(tL).
    BellDist {
        config: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Detector parameters and theoretical budgets.
    Params {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        degree: usize,
        /// Promised bound on the diamond norm of the generator.
        #[arg(long = "l-bound")]
        l_bound: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max_factor: f64,
    },
    /// Run the brute-force inequality checks.
    Verify {
        /// A check name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DetectArgs {
    config: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    /// Promised locality. Defaults to the value derived from the file.
    #[arg(long)]
    k: Option<usize>,
    /// Promised degree. Defaults to the value derived from the file.
    #[arg(long)]
    degree: Option<usize>,
    /// Promised diamond-norm bound. Defaults to the model's own bound.
    #[arg(long = "l-bound")]
    l_bound: Option<f64>,
    #[arg(long, default_value = "sampled_pauli")]
    mode: Mode,
    /// Slices per round instead of the derived m.
    #[arg(long = "m")]
    m_override: Option<u64>,
    /// Rounds instead of the derived R.
    #[arg(long = "rounds")]
    r_override: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    t_max_factor: f64,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep the sampled Pauli frames in the JSON report.
    #[arg(long)]
    frames: bool,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn output(path: Option<&Path>) -> AnyResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| format!("cannot create {}: {e}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> AnyResult<()> {
    let mut w = output(Some(path))?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn detect(args: DetectArgs, seed: u64) -> AnyResult<ExitCode> {
    let l = parse_config(&args.config)?;
    let (k, degree) = l.locality_degree();
    let mut params = DetectionParams::new(
        args.epsilon,
        args.delta,
        args.k.unwrap_or(k.max(1)),
        args.degree.unwrap_or(degree.max(1)),
    );
    params.l_bound = args.l_bound;
    params.mode = args.mode;
    params.seed = seed;
    params.m_override = args.m_override;
    params.r_override = args.r_override;
    params.t_max_factor = args.t_max_factor;

    let mut rep = detector::run_detection(&l, &params)?;
    print!("{}", rep.summary());
    for note in &rep.notes {
        println!("note: {note}");
    }
    if let Some(path) = &args.out {
        if !args.frames {
            rep.strip_frames();
        }
        write_json(path, &rep)?;
    }
    Ok(match rep.verdict {
        Verdict::Accept => ExitCode::SUCCESS,
        Verdict::Reject => ExitCode::from(2),
    })
}

fn verify(suite: &str, trials: usize, seed: u64, out: Option<&Path>) -> AnyResult<ExitCode> {
    let results = oracle::run_suite(suite, trials, seed)?;
    let mut all_passed = true;
    for r in &results {
        println!("{r}");
        for f in r.failures.iter().take(5) {
            println!(
                "  instance {}: lhs={:e} rhs={:e} margin={:e} ({})",
                f.seed, f.lhs, f.rhs, f.margin, f.detail
            );
        }
        all_passed &= r.passed;
    }
    if let Some(path) = out {
        write_json(path, &results)?;
    }
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run(cli: Cli) -> AnyResult<ExitCode> {
    if let Some(threads) = cli.threads {
        par::set_threads(threads)?;
    }
    let seed = match cli.seed {
        Some(s) => s,
        None => {
            let s = rand::random();
            eprintln!("seed: {s}");
            s
        }
    };

    match cli.command {
        Command::Detect(args) => detect(args, seed),
        Command::Curve { config, t_max, points, out } => {
            let rows = report::decay_curve(&parse_config(config)?, t_max, points)?;
            report::write_curve_csv(output(out.as_deref())?, &rows)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum { config, out } => {
            let eigs = report::spectrum(&parse_config(config)?)?;
            report::write_spectrum_csv(output(out.as_deref())?, &eigs)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::BellDist { config, t, out } => {
            let dist = report::bell_distribution_at(&parse_config(config)?, t)?;
            report::write_bell_csv(output(out.as_deref())?, &dist)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Params { epsilon, delta, k, degree, l_bound, t_max_factor } => {
            let p = detector::derive_parameters_with_factor(epsilon, delta, k, degree, l_bound, t_max_factor)?;
            let b = detector::theoretical_budgets(epsilon, delta, k, degree, l_bound)?;
            println!("epsilon' = {}", p.epsilon_prime);
            println!("m = {}", p.m);
            println!("R = {}", p.r);
            println!("t_max = {}", p.t_max);
            println!("T_bound = {}", b.t_bound);
            println!("Q_bound = {}", b.q_bound);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, trials, out } => verify(&suite, trials, seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors, which would read as REJECT.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
