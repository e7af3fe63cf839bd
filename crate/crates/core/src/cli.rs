//! Command-line front end. [`run`] takes argv and output streams so tests can
//! drive it in-process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::assessment::{prioritize_by, RankBasis};
use crate::closure::transitive_closure;
use crate::export::{export_csv, assessment_table, render_matrix, report, to_dot};
use crate::graph::{canonical_factor_graph, literal_closure_matrix, literal_factor_graph, parse_graph, FactorGraph};
use crate::predictor::{monte_carlo_success, project_success_rate, SuccessEstimate};
use crate::register::{
    load_register, mitigation_warnings, parse_register, validate_register, ParseOptions, RegisterError, RiskRegister,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitCode {
    Success = 0,
    ValidationFailure = 1,
    InputError = 2,
    UsageError = 3,
}

impl From<ExitCode> for std::process::ExitCode {
    fn from(code: ExitCode) -> Self {
        std::process::ExitCode::from(code as u8)
    }
}

#[derive(Parser, Debug)]
#[command(name = "riskgraph", version, about = "Risk register assessment with factor-influence graphs")]
struct Cli {
    /// Ignore unknown keys in input files
    #[arg(long, global = true)]
    lenient: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a register and list every violation
    Validate { register: PathBuf },

    /// Print the prioritized risk table
    Assess {
        register: PathBuf,
        /// Rank by post-mitigation impact where a plan exists
        #[arg(long)]
        residual: bool,
        /// Emit CSV instead of the text table
        #[arg(long)]
        csv: bool,
    },

    /// Emit the factor graph as DOT
    Graph {
        /// Read factors and edges from this file
        #[arg(long, conflicts_with_all = ["canonical", "paper_literal"])]
        register: Option<PathBuf>,
        /// Use the built-in six-factor model (default)
        #[arg(long)]
        canonical: bool,
        /// Draw edges added by transitive closure as dashed lines
        #[arg(long)]
        closure: bool,
        /// Use the matrix exactly as originally typeset
        #[arg(long)]
        paper_literal: bool,
        /// Output DOT (the only format)
        #[arg(long)]
        dot: bool,
    },

    /// Print the factor relation as a 0/1 matrix
    Matrix {
        /// Print the transitive closure instead of the direct relation
        #[arg(long)]
        closure: bool,
        /// Use the matrices exactly as originally typeset
        #[arg(long, conflicts_with = "register")]
        paper_literal: bool,
        /// Read factors and edges from this file
        #[arg(long)]
        register: Option<PathBuf>,
    },

    /// Estimate the project success rate
    Predict {
        register: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        residual: bool,
    },

    /// Full report: ranking plus success estimate
    Report {
        register: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        residual: bool,
    },
}

#[derive(clap::Args, Debug)]
struct Sampling {
    /// Monte Carlo trials; omitted means analytic only
    #[arg(long)]
    trials: Option<u64>,
    /// Seed for the Monte Carlo generator
    #[arg(long, requires = "trials", default_value_t = 0)]
    seed: u64,
}

struct Failure {
    code: ExitCode,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: ExitCode::InputError,
            message: message.into(),
        }
    }

    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: ExitCode::ValidationFailure,
            message: message.into(),
        }
    }
}

impl From<RegisterError> for Failure {
    fn from(e: RegisterError) -> Self {
        match e {
            RegisterError::Invalid(_) => Failure::validation(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

/// Runs one command. Artifacts go to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    ExitCode::Success
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    ExitCode::UsageError
                }
            };
        }
    };
    let options = ParseOptions { lenient: cli.lenient };
    match execute(cli.command, options, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_valid(path: &Path, options: ParseOptions, err: &mut dyn Write) -> Result<RiskRegister, Failure> {
    let register = parse_register(&read(path)?, options)?;
    for w in mitigation_warnings(&register) {
        let _ = writeln!(err, "{w}");
    }
    Ok(register)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::input(format!("writing output: {e}")))
}

fn estimate(register: &RiskRegister, sampling: &Sampling, residual: bool) -> Result<SuccessEstimate, Failure> {
    let result = match sampling.trials {
        Some(trials) => monte_carlo_success(register, trials, sampling.seed, residual),
        None => project_success_rate(register, residual),
    };
    result.map_err(|e| match e {
        crate::predictor::PredictError::ZeroTrials => Failure {
            code: ExitCode::UsageError,
            message: e.to_string(),
        },
        other => Failure::validation(other.to_string()),
    })
}

fn graph_from(path: Option<&Path>, paper_literal: bool, options: ParseOptions) -> Result<FactorGraph, Failure> {
    if let Some(path) = path {
        let parsed = parse_graph(&read(path)?, options).map_err(|e| Failure::input(e.to_string()))?;
        return Ok(parsed.unwrap_or_else(canonical_factor_graph));
    }
    Ok(if paper_literal {
        literal_factor_graph()
    } else {
        canonical_factor_graph()
    })
}

fn execute(
    command: Command,
    options: ParseOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<ExitCode, Failure> {
    match command {
        Command::Validate { register } => {
            let reg = load_register(&read(&register)?, options)?;
            let violations = validate_register(&reg);
            for w in mitigation_warnings(&reg) {
                let _ = writeln!(err, "{w}");
            }
            if violations.is_empty() {
                emit(out, &format!("ok: {} risks valid\n", reg.risks.len()))?;
                return Ok(ExitCode::Success);
            }
            let mut text = String::new();
            for v in &violations {
                text.push_str(&v.to_string());
                text.push('\n');
            }
            emit(out, &text)?;
            let _ = writeln!(err, "{} violation(s)", violations.len());
            Ok(ExitCode::ValidationFailure)
        }
        Command::Assess {
            register,
            residual,
            csv,
        } => {
            let reg = load_valid(&register, options, err)?;
            let basis = if residual { RankBasis::Residual } else { RankBasis::Inherent };
            let ranked = prioritize_by(&reg, basis).map_err(|e| Failure::validation(e.to_string()))?;
            let text = if csv {
                export_csv(&ranked)
            } else {
                assessment_table(&reg, &ranked).map_err(|e| Failure::input(e.to_string()))?
            };
            emit(out, &text)?;
            Ok(ExitCode::Success)
        }
        Command::Graph {
            register,
            canonical: _,
            closure,
            paper_literal,
            dot: _,
        } => {
            let graph = graph_from(register.as_deref(), paper_literal, options)?;
            let closed = closure.then(|| transitive_closure(&graph.adjacency_matrix()));
            let text = to_dot(&graph, closed.as_ref()).map_err(|e| Failure::input(e.to_string()))?;
            emit(out, &text)?;
            Ok(ExitCode::Success)
        }
        Command::Matrix {
            closure,
            paper_literal,
            register,
        } => {
            let graph = graph_from(register.as_deref(), paper_literal, options)?;
            let matrix = match (closure, paper_literal) {
                (false, _) => graph.adjacency_matrix(),
                (true, false) => transitive_closure(&graph.adjacency_matrix()),
                (true, true) => {
                    // The typeset closure is printed verbatim; only its
                    // priority column is claimed to follow from closure.
                    let literal = literal_closure_matrix();
                    let computed = transitive_closure(&canonical_factor_graph().adjacency_matrix());
                    let agree = literal.column_set("N5") == computed.column_set("N5");
                    let _ = writeln!(
                        err,
                        "column N5 {} the computed closure of the canonical model",
                        if agree { "matches" } else { "differs from" }
                    );
                    literal
                }
            };
            emit(out, &render_matrix(&matrix))?;
            Ok(ExitCode::Success)
        }
        Command::Predict {
            register,
            sampling,
            residual,
        } => {
            let reg = load_valid(&register, options, err)?;
            let est = estimate(&reg, &sampling, residual)?;
            let mut text = serde_json::to_string_pretty(&est).expect("estimate serializes");
            text.push('\n');
            emit(out, &text)?;
            Ok(ExitCode::Success)
        }
        Command::Report {
            register,
            sampling,
            residual,
        } => {
            let reg = load_valid(&register, options, err)?;
            let basis = if residual { RankBasis::Residual } else { RankBasis::Inherent };
            let ranked = prioritize_by(&reg, basis).map_err(|e| Failure::validation(e.to_string()))?;
            let est = estimate(&reg, &sampling, residual)?;
            let text = report(&reg, &ranked, &est).map_err(|e| Failure::input(e.to_string()))?;
            emit(out, &text)?;
            Ok(ExitCode::Success)
        }
    }
}
