use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drinfeld_core::config::Config;
use drinfeld_core::error::ErrorKind;
use drinfeld_core::exec::Execution;

mod commands;
mod pretty;

#[derive(Parser, Debug)]
#[command(
    name = "drinfeld",
    version,
    about = "Drinfeld modules over F_q(T): reduction, torsion, local invariants, Iwasawa mu/lambda and the lambda bound"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Print a human-readable table instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Seed for every randomized step; recorded in the output.
    #[arg(long, global = true, env = "DRINFELD_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the result to a file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Re-read a result emitted by the same subcommand, check it and print it again.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Default ϖ-adic precision of Iwasawa coefficients.
    #[arg(long, global = true, env = "DRINFELD_PREC_PI", value_parser = clap::value_parser!(u32).range(1..))]
    pub prec_pi: Option<u32>,
    /// T-adic precision imposed on Iwasawa input series.
    #[arg(long = "prec-t", global = true, env = "DRINFELD_PREC_T", value_parser = clap::value_parser!(u32).range(1..))]
    pub prec_t: Option<u32>,
    /// Precision of local expansions at a place.
    #[arg(long, global = true, env = "DRINFELD_LOCAL_N", value_parser = clap::value_parser!(u32).range(1..))]
    pub local_n: Option<u32>,
    /// Largest level n of φ[p^n] used for corank detection.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_n: Option<u32>,
    /// Largest tower layer m tried for stabilization.
    #[arg(long, global = true)]
    pub max_m: Option<u32>,
    /// Run every kernel sequentially.
    #[arg(long, global = true)]
    pub sequential: bool,
}

impl Common {
    pub fn config(&self) -> Config {
        let mut c = Config {
            seed: self.seed,
            ..Config::default()
        };
        if let Some(v) = self.prec_pi {
            c.prec_pi = v as usize;
        }
        if let Some(v) = self.prec_t {
            c.prec_t = v as usize;
        }
        if let Some(v) = self.local_n {
            c.local_n = v as usize;
        }
        if let Some(v) = self.max_n {
            c.max_n = v;
        }
        if let Some(v) = self.max_m {
            c.max_m = v;
        }
        if self.sequential {
            c.execution = Execution::Sequential;
        }
        c
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reduction type of a module at a finite place.
    Reduction {
        /// Module document: a path or inline JSON.
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        place: Option<String>,
    },
    /// Torsion φ̄[a] of the reduction at a place, over the degree-e extension of its residue field.
    Torsion {
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        place: Option<String>,
        #[arg(long)]
        a: Option<String>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        e: u32,
    },
    /// Local term dim H⁰(F_w, φ[p^∞]) ⊗ F_p at a place v.
    LocalH0 {
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        prime: Option<String>,
        #[arg(long)]
        place: Option<String>,
    },
    /// Weierstrass preparation of an Iwasawa series.
    Weierstrass {
        /// Series document: a path or inline JSON.
        #[arg(long)]
        series: Option<String>,
    },
    /// μ and λ of a series or of an elementary module.
    MuLambda {
        #[arg(long, conflicts_with = "elementary")]
        series: Option<String>,
        /// Elementary module document: a path or inline JSON.
        #[arg(long)]
        elementary: Option<String>,
    },
    /// Upper bound for the λ-invariant.
    LambdaBound {
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        prime: Option<String>,
        /// Dimension of the residual fine Selmer group (an input, never computed).
        #[arg(long, allow_hyphen_values = true)]
        residual_dim: Option<i64>,
        #[arg(long, default_value = "user-supplied")]
        residual_dim_provenance: String,
    },
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Parse => 2,
        ErrorKind::Precision => 3,
        ErrorKind::Math => 4,
        ErrorKind::Internal => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command, &cli.common) {
        Ok(out) => {
            let text = if cli.common.pretty {
                out.pretty
            } else {
                out.json
            };
            let res = match &cli.common.output {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = res {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
