//! `imp-slice`: run, trace and slice Imp programs, and certify the
//! forward/backward Galois connection.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 evaluation error,
//! 3 fuel exhausted, 4 criterion or lattice mismatch, 5 lattice too large,
//! 6 a Galois law was violated.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use imp_slice_core::lattice::DEFAULT_DOWNSET_BOUND;
use imp_slice_core::oracle::{check_connection, CheckReport};
use imp_slice_core::schema::{versioned, ErrorKind, ErrorView, ForwardView, RunView, SliceView};
use imp_slice_core::tracer::{eval_cmd, render_trace, Derivation, DEFAULT_FUEL};
use imp_slice_core::{parse_command, parse_partial_command, parse_partial_state, parse_state, ParseError};

#[derive(Parser)]
#[command(name = "imp-slice", version, about = "Dynamic program slicing for Imp")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a program and print the output state.
    Run(RunArgs),
    /// Evaluate a program and print its execution trace.
    Trace(RunArgs),
    /// Backward slice: which part of the program and input explains a partial output.
    Bwd {
        #[command(flatten)]
        run: RunArgs,
        /// Partial output state, e.g. "x = _, y = 1, z = _".
        #[arg(long)]
        criterion: String,
    },
    /// Forward slice: evaluate a partial program on a partial input along the run.
    Fwd {
        #[command(flatten)]
        run: RunArgs,
        /// Partial program: a file path, or program text if no such file exists.
        #[arg(long)]
        partial_program: String,
        /// Partial input state, e.g. "x = _, y = 0, z = _".
        #[arg(long)]
        partial_state: String,
    },
    /// Exhaustively check the Galois laws for one program or a directory of programs.
    Check {
        #[command(flatten)]
        run: RunArgs,
        /// Largest combined size of the program, input and output lattices.
        #[arg(long, default_value_t = DEFAULT_DOWNSET_BOUND)]
        bound: u64,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value_t = 7878)]
        port: u16,
        /// Directory of static files served for unmatched paths.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Program file (`.imp`); for `check`, a directory is also accepted.
    program: PathBuf,
    /// Input state inline, e.g. "x = 1, y = 0".
    #[arg(long, conflicts_with = "state_file")]
    state: Option<String>,
    /// Input state file. Defaults to the program path with extension `.state`.
    #[arg(long)]
    state_file: Option<PathBuf>,
    /// Maximum number of command-rule applications.
    #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// A failure with its exit status.
struct Failure {
    view: Box<ErrorView>,
    context: Option<String>,
}

impl Failure {
    fn new(view: ErrorView) -> Self {
        Failure {
            view: Box::new(view),
            context: None,
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::new(ErrorView::new(
            ErrorKind::BadRequest,
            format!("cannot read {}: {e}", path.display()),
        ))
    }

    fn parse(source: &str, e: &ParseError) -> Self {
        Failure {
            view: Box::new(ErrorView::from(e).in_source(source)),
            context: Some(source.to_owned()),
        }
    }

    fn exit_code(&self) -> u8 {
        exit_code(self.view.error)
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::ParseError | ErrorKind::DuplicateVariable | ErrorKind::BadRequest | ErrorKind::NotFound => 1,
        ErrorKind::UnboundVariable | ErrorKind::Overflow => 2,
        ErrorKind::FuelExhausted => 3,
        ErrorKind::CriterionMismatch | ErrorKind::LatticeMismatch => 4,
        ErrorKind::SizeExceeded => 5,
        ErrorKind::LawViolation => 6,
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.context {
            Some(c) => write!(f, "{c}:{}", self.view.message),
            None => f.write_str(&self.view.message),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn load(args: &RunArgs) -> Result<Derivation, Failure> {
    load_from(
        &args.program,
        args.state.as_deref(),
        args.state_file.as_deref(),
        args.fuel,
    )
}

fn load_from(program: &Path, state: Option<&str>, state_file: Option<&Path>, fuel: u64) -> Result<Derivation, Failure> {
    let program_name = program.display().to_string();
    let c = parse_command(&read(program)?).map_err(|e| Failure::parse(&program_name, &e))?;
    let (state_name, state_text) = match (state, state_file) {
        (Some(s), _) => ("--state".to_owned(), s.to_owned()),
        (None, Some(p)) => (p.display().to_string(), read(p)?),
        (None, None) => {
            let p = program.with_extension("state");
            (p.display().to_string(), read(&p)?)
        }
    };
    let mu = parse_state(&state_text).map_err(|e| Failure::parse(&state_name, &e))?;
    eval_cmd(&mu, &c, fuel).map_err(|e| Failure::new(ErrorView::from(&e)))
}

/// Prints a line to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_line(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}").and_then(|()| out.flush());
}

fn emit<T: Serialize>(format: Format, body: T, text: impl FnOnce(&T) -> String) {
    match format {
        Format::Text => print_line(&text(&body)),
        Format::Json => print_line(&serde_json::to_string_pretty(&versioned(body)).expect("views serialise")),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Cmd::Run(args) => {
            let d = load(&args)?;
            emit(args.format, RunView::new(&d), |v| v.output_text.clone());
        }
        Cmd::Trace(args) => {
            let d = load(&args)?;
            let listing = render_trace(&d.trace);
            match args.format {
                Format::Text => print_line(&listing),
                Format::Json => emit(
                    Format::Json,
                    json!({
                        "program_text": d.program.to_string(),
                        "input_state": d.input,
                        "output_state": d.output,
                        "trace_stats": d.stats(),
                        "listing": listing,
                        "trace": d.trace,
                    }),
                    |_| String::new(),
                ),
            }
        }
        Cmd::Bwd { run, criterion } => {
            let d = load(&run)?;
            let q = parse_partial_state(&criterion).map_err(|e| Failure::parse("--criterion", &e))?;
            let slice = d.backward(&q).map_err(|e| Failure::new(ErrorView::from(&e)))?;
            emit(run.format, SliceView::new(&d.program, &slice), |v| {
                format!("program: {}\ninput:   {}", v.program_slice_text, v.input_slice_text)
            });
        }
        Cmd::Fwd {
            run,
            partial_program,
            partial_state,
        } => {
            let d = load(&run)?;
            let path = Path::new(&partial_program);
            let (name, text) = if path.is_file() {
                (path.display().to_string(), read(path)?)
            } else {
                ("--partial-program".to_owned(), partial_program.clone())
            };
            let c = parse_partial_command(&text).map_err(|e| Failure::parse(&name, &e))?;
            let mu = parse_partial_state(&partial_state).map_err(|e| Failure::parse("--partial-state", &e))?;
            let out = d.forward(&c, &mu).map_err(|e| Failure::new(ErrorView::from(&e)))?;
            emit(run.format, ForwardView::new(out), |v| v.partial_output_text.clone());
        }
        Cmd::Check { run, bound } => {
            if run.program.is_dir() {
                return check_directory(&run, bound);
            }
            let d = load(&run)?;
            let report = check_connection(&d, bound).map_err(|e| Failure::new(ErrorView::from(&e)))?;
            let holds = report.holds;
            emit(run.format, report, |r| r.to_string());
            if !holds {
                return Ok(exit_code(ErrorKind::LawViolation));
            }
        }
        Cmd::Serve { port, assets } => return serve(port, assets),
    }
    Ok(0)
}

#[derive(Serialize)]
#[serde(untagged)]
enum Outcome {
    Report(CheckReport),
    Error(ErrorView),
}

#[derive(Serialize)]
struct FileOutcome {
    file: String,
    #[serde(flatten)]
    outcome: Outcome,
}

/// Checks every `foo.imp` with a sibling `foo.state`, one line per file.
fn check_directory(args: &RunArgs, bound: u64) -> Result<u8, Failure> {
    let mut programs: Vec<PathBuf> = std::fs::read_dir(&args.program)
        .map_err(|e| Failure::io(&args.program, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "imp"))
        .collect();
    programs.sort();
    let mut worst = 0u8;
    let mut outcomes = Vec::new();
    for path in &programs {
        let outcome = load_from(path, None, None, args.fuel)
            .and_then(|d| check_connection(&d, bound).map_err(|e| Failure::new(ErrorView::from(&e))));
        let (code, outcome) = match outcome {
            Ok(r) if r.holds => (0, Outcome::Report(r)),
            Ok(r) => (exit_code(ErrorKind::LawViolation), Outcome::Report(r)),
            Err(f) => (f.exit_code(), Outcome::Error(*f.view)),
        };
        worst = worst.max(code);
        let file = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default();
        outcomes.push(FileOutcome { file, outcome });
    }
    emit(args.format, &outcomes, |rows| {
        let mut lines = vec![format!(
            "{:<24} {:>10} {:>8} {:>8} {:>9}  {}",
            "file", "program", "input", "output", "ms", "verdict"
        )];
        for row in rows.iter() {
            lines.push(match &row.outcome {
                Outcome::Report(r) => format!(
                    "{:<24} {:>10} {:>8} {:>8} {:>9}  {}",
                    row.file,
                    r.sizes.program.to_string(),
                    r.sizes.input_state.to_string(),
                    r.sizes.output_state.to_string(),
                    r.elapsed_ms,
                    if r.holds {
                        "all laws hold".to_owned()
                    } else {
                        let failing: Vec<&str> = r
                            .laws
                            .iter()
                            .filter(|l| l.verdict != imp_slice_core::oracle::Verdict::Holds)
                            .map(|l| l.law.name())
                            .collect();
                        format!("VIOLATED: {}", failing.join(", "))
                    }
                ),
                Outcome::Error(e) => format!("{:<24} error: {}", row.file, e.message),
            });
        }
        let ok = rows
            .iter()
            .filter(|r| matches!(&r.outcome, Outcome::Report(r) if r.holds))
            .count();
        lines.push(format!("{ok}/{} programs certified", rows.len()));
        lines.join("\n")
    });
    Ok(worst)
}

fn serve(port: u16, assets: Option<PathBuf>) -> Result<u8, Failure> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .thread_stack_size(256 << 20)
        .build()
        .map_err(|e| {
            Failure::new(ErrorView::new(
                ErrorKind::BadRequest,
                format!("cannot start runtime: {e}"),
            ))
        })?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await.map_err(|e| {
            Failure::new(ErrorView::new(
                ErrorKind::BadRequest,
                format!("cannot bind port {port}: {e}"),
            ))
        })?;
        eprintln!("listening on http://127.0.0.1:{port}");
        let router = imp_slice_service::app(imp_slice_service::AppState::default(), assets);
        imp_slice_service::serve(listener, router)
            .await
            .map_err(|e| Failure::new(ErrorView::new(ErrorKind::BadRequest, format!("server failed: {e}"))))?;
        Ok(0)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let json = match &cli.command {
        Cmd::Run(a) | Cmd::Trace(a) => a.format == Format::Json,
        Cmd::Bwd { run, .. } | Cmd::Fwd { run, .. } | Cmd::Check { run, .. } => run.format == Format::Json,
        Cmd::Serve { .. } => false,
    };
    // long loops yield deep traces; give the work a generous stack
    let worker = std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(move || run(cli))
        .expect("spawn worker thread");
    match worker.join().expect("worker thread panicked") {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            if json {
                print_line(&serde_json::to_string_pretty(&versioned(&failure.view)).expect("views serialise"));
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
