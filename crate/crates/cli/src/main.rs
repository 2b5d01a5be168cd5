//! `srcf`: batch front end for exact semi-regular continued fraction computations.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::CommandResult;

#[derive(Parser, Debug)]
#[command(name = "srcf", version, about = "Exact computations with semi-regular continued fractions")]
struct Cli {
    /// Print a human-readable report instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

/// A spec from a file or a named family.
#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Spec document (`{"head", "terms"}` or `{"family", "params"}`); `-` reads stdin
    pub file: Option<PathBuf>,
    /// Named family, instead of a file
    #[arg(long, conflicts_with = "file")]
    pub family: Option<String>,
    /// Family parameter; the value is read as JSON when it parses, else as a string
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergent table with determinant certificates
    Expand {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Certified rational enclosure of the value
    Value {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        /// Decimal digits shown; internal arithmetic is always exact
        #[arg(long, default_value_t = 20)]
        digits: u32,
    },
    /// Rewrite into a regular or negative expansion with an alignment map
    Convert {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        mode: ConvertMode,
        /// Source terms to consume (defaults to all terms of an explicit prefix)
        #[arg(long)]
        depth: Option<usize>,
        /// Largest enclosure width accepted by the equivalence certificate
        #[arg(long, default_value = "1")]
        tolerance: String,
        /// Also write the output expansion to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the irrationality exponent from a finite prefix
    Mu {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 60)]
        terms: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Start of the limsup window as a fraction of `--terms`
        #[arg(long, default_value_t = 0.5)]
        window: f64,
    },
    /// Run a certified check over an index range
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        check: CheckArg,
        /// Inclusive index range `a..b`
        #[arg(long, default_value = "1..30")]
        range: String,
        /// Condition to use for automatic constants or to require
        #[arg(long, value_enum)]
        condition: Option<ConditionArg>,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long)]
        tau: Option<String>,
        /// Depth of the reference enclosure (default `max(2b, b + 2)`)
        #[arg(long)]
        eval_depth: Option<usize>,
    },
    /// Build an expansion with a prescribed exponent or from a named family
    Construct {
        #[arg(long, value_enum)]
        target: TargetArg,
        /// Target exponent, `p/q` or decimal
        #[arg(long)]
        s: Option<String>,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        /// Base of the Adams–Davison series
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        b: String,
        /// Period of `alpha = [c_1; c_2, ..., c_H, c_1, ...]`, comma separated
        #[arg(long, conflicts_with = "alpha_inverse")]
        alpha_period: Option<String>,
        /// Regular quotients `c_0, c_1, ...` of `1/alpha`, comma separated
        #[arg(long)]
        alpha_inverse: Option<String>,
        #[arg(long, default_value_t = 25)]
        n_max: usize,
        #[arg(long)]
        family: Option<String>,
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Terms written for expansions that are not finite prefixes
        #[arg(long)]
        depth: Option<usize>,
        /// Also write the expansion to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ConvertMode {
    Ncf2rcf,
    Rcf2ncf,
    Lcf2rcf,
    Srcf2rcf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MethodArg {
    Form,
    Form1,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum CheckArg {
    Sandwich,
    Encad,
    Invariants,
    Conditions,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ConditionArg {
    A,
    B,
    C,
    D,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum TargetArg {
    #[value(name = "ncf_exp")]
    NcfExp,
    #[value(name = "lcf_exp")]
    LcfExp,
    #[value(name = "adams_davison")]
    AdamsDavison,
    Named,
}

fn run(cmd: Command) -> CommandResult {
    let result = match cmd {
        Command::Expand { input, terms } => commands::expand(&input, terms),
        Command::Value { input, depth, digits } => commands::value(&input, depth, digits),
        Command::Convert {
            input,
            mode,
            depth,
            tolerance,
            out,
        } => commands::convert(&input, mode, depth, &tolerance, out.as_deref()),
        Command::Mu {
            input,
            terms,
            method,
            window,
        } => commands::mu(&input, terms, method, window),
        Command::Verify {
            input,
            check,
            range,
            condition,
            rho,
            sigma,
            tau,
            eval_depth,
        } => commands::verify(
            &input,
            check,
            &range,
            condition,
            [rho, sigma, tau],
            eval_depth,
        ),
        Command::Construct {
            target,
            s,
            k_max,
            b,
            alpha_period,
            alpha_inverse,
            n_max,
            family,
            params,
            depth,
            out,
        } => commands::construct(commands::ConstructArgs {
            target,
            s,
            k_max,
            b,
            alpha_period,
            alpha_inverse,
            n_max,
            family,
            params,
            depth,
            out,
        }),
    };
    result.unwrap_or_else(|e| e)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let pretty = cli.pretty;
    let result = run(cli.command);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(result.render(pretty).as_bytes());
    ExitCode::from(result.exit_code)
}
