//! `dcomplex` — exact computations with polynomial differential operators on
//! the Segal-Bargmann space: evaluate operators, verify identities, check
//! coercivity conditions, scan for sign failures, and solve Du = α.

mod commands;
mod random;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dcomplex", version, about)]
struct Cli {
    /// Emit machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized checks (runs are reproducible).
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Default number of randomized trials.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operator expression to a polynomial, exactly.
    Eval {
        /// Operator in DSL form, e.g. "d1^2" or "z1*d1 - i".
        expr: String,
        /// Polynomial operand, e.g. "z1^4".
        operand: String,
        /// Ambient dimension (default: inferred from the variable indices).
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Verify an identity exactly: hamil, comm11, energy, duality, d_squared.
    Check {
        identity: String,
        /// Number of randomized trials (overrides --trials).
        #[arg(long)]
        random: Option<usize>,
        /// Operator family "p1; p2; ..." (dimension = number of entries).
        #[arg(long)]
        family: Option<String>,
        /// Inline (1,0)-form "u1; u2; ..." (requires --family).
        #[arg(long)]
        form: Option<String>,
        /// JSON file holding a form.
        #[arg(long)]
        form_file: Option<PathBuf>,
    },
    /// Check the degree-2 coercivity conditions for a two-operator family.
    Conditions {
        #[arg(long)]
        family: String,
    },
    /// Scan monomial (1,0)-forms for negative quadratic-form values.
    Scan {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        /// Widen the coefficient grid from the unit phases to small rationals.
        #[arg(long)]
        wide: bool,
    },
    /// Canonical solution of Du = alpha for p = a0 + a1 d/dz + ... in one variable.
    Solve {
        /// Comma-separated exact coefficients a0,a1,..., e.g. "0,1" or "1,i,2".
        #[arg(long)]
        coeffs: String,
        /// Datum polynomial in z1.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 16)]
        cutoff: usize,
    },
    /// Run the four built-in example families end to end.
    Examples {
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_mode = cli.json;
    let result = match &cli.command {
        Command::Eval { expr, operand, dim } => commands::cmd_eval(expr, operand, *dim),
        Command::Check {
            identity,
            random,
            family,
            form,
            form_file,
        } => commands::cmd_check(commands::CheckArgs {
            identity,
            trials: random.unwrap_or(cli.trials),
            seed: cli.seed,
            family: family.as_deref(),
            form: form.as_deref(),
            form_file: form_file.as_deref(),
        }),
        Command::Conditions { family } => commands::cmd_conditions(family),
        Command::Scan {
            family,
            max_degree,
            wide,
        } => commands::cmd_scan(family, *max_degree, *wide),
        Command::Solve {
            coeffs,
            alpha,
            cutoff,
        } => commands::cmd_solve(coeffs, alpha, *cutoff),
        Command::Examples { max_degree } => commands::cmd_examples(*max_degree),
    };
    match result {
        Ok(outcome) => {
            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&outcome.json).expect("report serializes")
                );
            } else {
                print!("{}", outcome.text);
                if !outcome.text.ends_with('\n') && !outcome.text.is_empty() {
                    println!();
                }
            }
            ExitCode::from(outcome.code)
        }
        Err(err) => {
            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({"error": format!("{err:#}")}))
                        .expect("error serializes")
                );
            } else {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(2)
        }
    }
}
