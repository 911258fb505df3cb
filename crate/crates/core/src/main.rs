use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use segre_lie::algebra::{parse_rational, Rational};
use segre_lie::cli::parse::parse_point;
use segre_lie::cli::{run, Command, Config, EXIT_INPUT};
use segre_lie::lieeq::DEFAULT_SEED;
use segre_lie::lintype::DEFAULT_RMAX;

#[derive(Parser)]
#[command(name = "segre-lie", version, about = "Lie symmetries of second-order PDE systems and Segre families")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Truncation order, overriding the input header.
    #[arg(long, global = true)]
    cap: Option<u32>,
    /// Seed for generic-rank sample points (decimal or 0x hex).
    #[arg(long, global = true, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest prolongation tried by the finite-type search.
    #[arg(long, global = true, default_value_t = DEFAULT_RMAX)]
    rmax: u32,
    /// Evaluation point, comma separated rationals.
    #[arg(long, global = true, value_parser = parse_point_arg)]
    point: Option<Vec<Rational>>,
    /// Deformation parameter sample; repeatable.
    #[arg(long, global = true, value_parser = parse_eps)]
    epsilon: Vec<Rational>,
    /// Cross-check the bound against polynomial solutions of this degree.
    #[arg(long, global = true)]
    oracle_degree: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the input in canonical form.
    Parse { file: Option<PathBuf> },
    /// Prolongation formulas of a general vector field.
    Prolong {
        n: usize,
        m: usize,
        #[arg(default_value_t = 2)]
        order: u32,
    },
    /// Determining equations as a linear file.
    LieEqs { file: Option<PathBuf> },
    /// Involutivity, determining equations, finite type and dimension bound.
    Analyze { file: Option<PathBuf> },
    /// Second-order system of a Segre family.
    Segre { file: Option<PathBuf> },
    /// Compatibility residuals up to the cap.
    Involutive { file: Option<PathBuf> },
    /// Symmetry bound of the flat system with the given relation matrices.
    FlatDim { file: Option<PathBuf> },
    /// Type and bound along the scaling deformation.
    DeformCheck { file: Option<PathBuf> },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16),
        None => s.parse(),
    }
    .map_err(|e| e.to_string())
}

fn parse_point_arg(s: &str) -> Result<Vec<Rational>, String> {
    parse_point(s).map_err(|e| e.to_string())
}

fn parse_eps(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("invalid rational `{s}`"))
}

fn read_input(file: Option<&PathBuf>) -> std::io::Result<String> {
    match file {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = Config { cap: cli.cap, seed: cli.seed, rmax: cli.rmax, point: cli.point, epsilon: cli.epsilon, oracle_degree: cli.oracle_degree };
    let (cmd, file) = match cli.cmd {
        Cmd::Parse { file } => (Command::Parse, file),
        Cmd::Prolong { n, m, order } => (Command::Prolong { n, m, order }, None),
        Cmd::LieEqs { file } => (Command::LieEqs, file),
        Cmd::Analyze { file } => (Command::Analyze, file),
        Cmd::Segre { file } => (Command::Segre, file),
        Cmd::Involutive { file } => (Command::Involutive, file),
        Cmd::FlatDim { file } => (Command::FlatDim, file),
        Cmd::DeformCheck { file } => (Command::DeformCheck, file),
    };
    let input = if matches!(cmd, Command::Prolong { .. }) {
        String::new()
    } else {
        match read_input(file.as_ref()) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: cannot read input: {e}");
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
    };
    let out = run(&cmd, &cfg, &input);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
