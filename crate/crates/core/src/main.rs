use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use svst_core::cli::{self, Format, OutputRecord};
use svst_core::{ClassKind, FiniteProblem, MatrixClass};

/// Minimax singular-value soft thresholding: AMSE curves, finite-n corrections and simulations.
#[derive(Parser)]
#[command(name = "svst-minimax", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = FormatArg::Json, global = true)]
    format: FormatArg,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Mat,
    Sym,
}

#[derive(Args)]
struct ClassOpts {
    #[arg(long, value_enum, default_value_t = ClassArg::Mat)]
    class: ClassArg,
    /// Aspect ratio m/n (ignored for sym).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

impl ClassOpts {
    fn class(&self) -> svst_core::Result<MatrixClass> {
        match self.class {
            ClassArg::Mat => MatrixClass::mat(self.beta),
            ClassArg::Sym => Ok(MatrixClass::Sym),
        }
    }
}

#[derive(Args)]
struct ProblemOpts {
    #[arg(long)]
    r: usize,
    /// Defaults to n.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = ClassArg::Mat)]
    class: ClassArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ProblemOpts {
    fn problem(&self) -> svst_core::Result<FiniteProblem> {
        let kind = match self.class {
            ClassArg::Mat => ClassKind::Mat,
            ClassArg::Sym => ClassKind::Sym,
        };
        FiniteProblem::new(self.r, self.m.unwrap_or(self.n), self.n, kind)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Minimax threshold and AMSE at one rank fraction.
    Amse {
        #[arg(long)]
        rho: f64,
        #[command(flatten)]
        class: ClassOpts,
    },
    /// Minimax AMSE curve over a rho grid.
    Curve {
        #[command(flatten)]
        class: ClassOpts,
        /// START:STOP:STEP; defaults to a linear grid plus a log-spaced tail near zero.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Square-case curve traced through the angle parametrization.
    Parametric {
        #[command(flatten)]
        class: ClassOpts,
        #[arg(long, default_value_t = 100)]
        theta_count: usize,
    },
    /// Finite-n minimax threshold by Monte Carlo.
    FiniteN {
        #[command(flatten)]
        problem: ProblemOpts,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Empirical risk at a spike matrix.
    Simulate {
        #[command(flatten)]
        problem: ProblemOpts,
        #[arg(long, default_value_t = 100.0)]
        mu: f64,
        /// Data-scale threshold; defaults to the minimax one.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Compares mean SURE with the empirical loss.
    SureCheck {
        #[command(flatten)]
        problem: ProblemOpts,
        #[arg(long, default_value_t = 10.0)]
        mu: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
    },
}

fn run(command: &Command) -> svst_core::Result<OutputRecord> {
    match command {
        Command::Amse { rho, class } => cli::cmd_amse(class.class()?, *rho),
        Command::Curve { class, grid } => {
            let class = class.class()?;
            match grid {
                Some(spec) => cli::cmd_curve(class, &cli::parse_grid(spec)?, spec),
                None => cli::cmd_curve(class, &svst_core::amse::default_rho_grid(), "default"),
            }
        }
        Command::Parametric { class, theta_count } => cli::cmd_parametric(class.class()?, *theta_count),
        Command::FiniteN { problem, trials } => cli::cmd_finite_n(&problem.problem()?, *trials, problem.seed),
        Command::Simulate {
            problem,
            mu,
            lambda,
            trials,
        } => cli::cmd_simulate(&problem.problem()?, *mu, *lambda, *trials, problem.seed),
        Command::SureCheck {
            problem,
            mu,
            lambda,
            trials,
        } => cli::cmd_sure_check(&problem.problem()?, *mu, *lambda, *trials, problem.seed),
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let record = match run(&args.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_usage() { 2 } else { 3 });
        }
    };
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let text = record.render(format);
    let written = match &args.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
