use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use tropical::json::{
    document_semifield, matrix_from_json, matrix_to_json, outcome_from_json, outcome_to_json,
    problem_from_json, project_from_json, scalar_to_json, schedule_to_json,
};
use tropical::semifield::set_relative_tolerance;
use tropical::{
    solve_project, verify_solution_set, Error, ErrorCategory, GridSpec, Matrix, MaxPlus, MaxTimes,
    MinPlus, MinTimes, Semifield, SemifieldId,
};

const TOLERANCE_VAR: &str = "TROPICAL_TOLERANCE";

#[derive(Parser, Debug)]
#[command(
    name = "tropical",
    version,
    about = "Tropical optimization and flow-time scheduling"
)]
struct Cli {
    /// Semifield to interpret the input in; defaults to the document's `semifield` field, then max-plus.
    #[arg(long, global = true)]
    semifield: Option<SemifieldId>,

    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectral radius and the trace terms it is built from.
    Spectral { input: Option<PathBuf> },
    /// Kleene star I ⊕ A ⊕ … ⊕ A^(n-1).
    Star { input: Option<PathBuf> },
    /// Solve an optimization problem document.
    Solve { input: Option<PathBuf> },
    /// Solve a project document and print the optimal schedule.
    Schedule {
        input: Option<PathBuf>,
        /// Print the activity table instead of JSON.
        #[arg(long)]
        table: bool,
    },
    /// Check a solved problem against a brute-force grid search.
    Verify {
        input: Option<PathBuf>,
        /// Grid `lo:hi:step` used for every coordinate.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Outcome document to check; defaults to the input's `outcome` field, then the solver.
        #[arg(long)]
        outcome: Option<PathBuf>,
    },
}

enum Failure {
    Library(Error),
    Io(String),
    /// Verification ran and found counterexamples; carries the report.
    Rejected(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_input(path: Option<&Path>) -> CliResult<String> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
            Ok(text)
        }
    }
}

fn read_json(path: Option<&Path>) -> CliResult<Value> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("invalid JSON: {e}")).into())
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

/// The matrix of a spectral/star input: a matrix document or a problem document's `A`.
fn input_matrix<S: Semifield>(doc: &Value) -> tropical::Result<Matrix<S>> {
    match doc.get("A") {
        Some(a) => matrix_from_json(a),
        None => matrix_from_json(doc),
    }
}

fn spectral<S: Semifield>(doc: &Value) -> CliResult<String> {
    let a = input_matrix::<S>(doc)?;
    let lambda = a.spectral_radius()?;
    let mut out = format!("lambda = {}\n", lambda.render());
    for (m, term) in a.spectral_terms()?.into_iter().enumerate() {
        let _ = writeln!(out, "tr^(1/{k})(A^{k}) = {}", term.render(), k = m + 1);
    }
    Ok(out)
}

fn star<S: Semifield>(doc: &Value) -> CliResult<String> {
    let a = input_matrix::<S>(doc)?;
    let star = a.kleene_star()?;
    let result = json!({
        "semifield": S::ID.as_str(),
        "trace": scalar_to_json(a.tr_cumulative()?),
        "star": matrix_to_json(&star),
    });
    Ok(pretty(&result))
}

fn solve<S: Semifield>(doc: &Value) -> CliResult<String> {
    let problem = problem_from_json::<S>(doc)?;
    let outcome = problem.solve()?;
    Ok(pretty(&outcome_to_json(&outcome)))
}

fn verify<S: Semifield>(doc: &Value, grid: &str, outcome_doc: Option<&Value>) -> CliResult<String> {
    let problem = problem_from_json::<S>(doc)?;
    let grid = GridSpec::parse_uniform(problem.dimension(), grid)?;
    let outcome = match outcome_doc.or_else(|| doc.get("outcome")) {
        Some(v) => outcome_from_json::<S>(v)?,
        None => problem.solve()?,
    };
    let report = verify_solution_set(&problem, &outcome, &grid)?;
    let text = format!("{report}\n");
    if report.passed() {
        Ok(text)
    } else {
        Err(Failure::Rejected(text))
    }
}

fn schedule(doc: &Value, table: bool) -> CliResult<String> {
    let project = project_from_json(doc)?;
    let solution = solve_project(&project)?;
    let rendered = solution.family.render_table(project.activities());
    if table {
        return Ok(format!(
            "{rendered}max flow time = {}\n",
            solution.schedule.max_flow_time.render()
        ));
    }
    let mut out = schedule_to_json(&project, &solution);
    out["table"] = Value::String(rendered);
    Ok(pretty(&out))
}

macro_rules! dispatch {
    ($id:expr, $f:ident ( $($arg:expr),* )) => {
        match $id {
            SemifieldId::MaxPlus => $f::<MaxPlus>($($arg),*),
            SemifieldId::MinPlus => $f::<MinPlus>($($arg),*),
            SemifieldId::MaxTimes => $f::<MaxTimes>($($arg),*),
            SemifieldId::MinTimes => $f::<MinTimes>($($arg),*),
        }
    };
}

fn run(cli: &Cli) -> CliResult<String> {
    if let Ok(text) = std::env::var(TOLERANCE_VAR) {
        let tolerance: f64 = text
            .trim()
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite() && *t >= 0.0)
            .ok_or_else(|| {
                Error::Malformed(format!("{TOLERANCE_VAR}={text} is not a tolerance"))
            })?;
        set_relative_tolerance(tolerance);
    }
    let field = |doc: &Value| -> CliResult<SemifieldId> {
        Ok(cli
            .semifield
            .or(document_semifield(doc)?)
            .unwrap_or(SemifieldId::MaxPlus))
    };
    match &cli.command {
        Command::Spectral { input } => {
            let doc = read_json(input.as_deref())?;
            dispatch!(field(&doc)?, spectral(&doc))
        }
        Command::Star { input } => {
            let doc = read_json(input.as_deref())?;
            dispatch!(field(&doc)?, star(&doc))
        }
        Command::Solve { input } => {
            let doc = read_json(input.as_deref())?;
            dispatch!(field(&doc)?, solve(&doc))
        }
        Command::Schedule { input, table } => {
            let doc = read_json(input.as_deref())?;
            if field(&doc)? != SemifieldId::MaxPlus {
                return Err(Error::Malformed("projects are max-plus only".into()).into());
            }
            schedule(&doc, *table)
        }
        Command::Verify {
            input,
            grid,
            outcome,
        } => {
            let doc = read_json(input.as_deref())?;
            let outcome = outcome.as_deref().map(|p| read_json(Some(p))).transpose()?;
            dispatch!(field(&doc)?, verify(&doc, grid, outcome.as_ref()))
        }
    }
}

fn exit_code(category: ErrorCategory) -> u8 {
    match category {
        ErrorCategory::Input => 2,
        ErrorCategory::Dimension => 3,
        ErrorCategory::Solver => 4,
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => match emit(&cli, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
        },
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Rejected(report)) => {
            let _ = emit(&cli, &report);
            eprintln!("verification failed");
            ExitCode::from(5)
        }
        Err(Failure::Library(e)) => {
            let diagnostics = json!({
                "diagnostics": {
                    "error": e.name(),
                    "message": e.to_string(),
                }
            });
            let _ = emit(&cli, &pretty(&diagnostics));
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.category()))
        }
    }
}
