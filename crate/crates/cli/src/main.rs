//! `snpneg` — batch front end for the negation engines.
//!
//! Exit codes: 0 success/agreement, 1 usage or input error, 2 semantic
//! disagreement between engines, 3 budget exhaustion.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use snpneg_core::compile::{
    compile_with, layout_document, layout_dot, trace_table, CompileOptions, NeuronLayout,
};
use snpneg_core::gen::random_database;
use snpneg_core::kb::{Database, Interpretation, VarId};
use snpneg_core::semantics::{cwa_set, naf_set, Direction};
use snpneg_core::sld::{default_budget, failure_set, SldError};
use snpneg_core::snp::{system_document, SnpSystem};
use snpneg_core::text::parse_kb;

#[derive(Parser)]
#[command(
    name = "snpneg",
    version,
    about = "Negation for propositional deductive databases via three cross-validating engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a database file and report its shape.
    Check { path: PathBuf },
    /// Compute the negated variables under CWA or finite failure.
    Negate {
        path: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Engine::All)]
        engine: Engine,
        /// Node budget for the resolution engine (default: 2^n * (k+1)).
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Translate a database into its spiking neural P system.
    Compile {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Doc)]
        emit: Emit,
        /// Omit the sub-threshold clearing rules in variable neurons.
        #[arg(long)]
        strict_paper: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a fixpoint iteration on the compiled system and print the full
    /// spike table.
    Trace {
        path: PathBuf,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate random databases and cross-check every engine on each.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Cwa,
    Naf,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Cwa => "cwa",
            Mode::Naf => "naf",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Operator,
    Sld,
    Snp,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Doc,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Down,
    Up,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Direction {
        match d {
            DirectionArg::Down => Direction::Down,
            DirectionArg::Up => Direction::Up,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Doc,
}

enum CliError {
    Usage(String),
    Disagreement(String),
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Disagreement(_) => 2,
            CliError::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Disagreement(m) | CliError::Budget(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successes; anything else is a
            // usage error (exit 1 by convention here, not clap's 2).
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Check { path } => cmd_check(&path),
        Cmd::Negate {
            path,
            mode,
            engine,
            budget,
            out,
        } => cmd_negate(&path, mode, engine, budget, out.as_deref()),
        Cmd::Compile {
            path,
            emit,
            strict_paper,
            out,
        } => cmd_compile(&path, emit, strict_paper, out.as_deref()),
        Cmd::Trace {
            path,
            direction,
            format,
            out,
        } => cmd_trace(&path, direction.into(), format, out.as_deref()),
        Cmd::Fuzz {
            seed,
            count,
            n_max,
            k_max,
            budget,
            out,
        } => cmd_fuzz(seed, count, n_max, k_max, budget, out.as_deref()),
    }
}

fn load_db(path: &std::path::Path) -> Result<Database, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_kb(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&std::path::Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_check(path: &std::path::Path) -> Result<(), CliError> {
    let db = load_db(path)?;
    println!("{} variables, {} rules, definite: yes", db.n(), db.k());
    if db.n() == 0 && db.k() == 0 {
        eprintln!("warning: empty database");
    }
    Ok(())
}

struct EngineResult {
    engine: &'static str,
    set: std::collections::BTreeSet<VarId>,
    elapsed: Duration,
}

fn cmd_negate(
    path: &std::path::Path,
    mode: Mode,
    engine: Engine,
    budget: Option<usize>,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if engine == Engine::Sld && mode == Mode::Cwa {
        return Err(CliError::Usage(
            "engine `sld` supports only `--mode naf` (finite failure has no \
             closed-world reading)"
                .to_string(),
        ));
    }
    let db = load_db(path)?;
    let budget = budget.unwrap_or_else(|| default_budget(&db));

    let engines: Vec<&'static str> = match (engine, mode) {
        (Engine::Operator, _) => vec!["operator"],
        (Engine::Sld, _) => vec!["sld"],
        (Engine::Snp, _) => vec!["snp"],
        (Engine::All, Mode::Cwa) => vec!["operator", "snp"],
        (Engine::All, Mode::Naf) => vec!["operator", "sld", "snp"],
    };

    let mut results: Vec<EngineResult> = Vec::new();
    for name in engines {
        let started = Instant::now();
        let set = match (name, mode) {
            ("operator", Mode::Cwa) => cwa_set(&db),
            ("operator", Mode::Naf) => naf_set(&db),
            ("sld", Mode::Naf) => failure_set(&db, budget).map_err(|e| match e {
                SldError::BudgetExhausted { .. } => CliError::Budget(e.to_string()),
                other => CliError::Usage(other.to_string()),
            })?,
            ("snp", Mode::Cwa) => snpneg_core::compile::cwa_via_snp(&db)
                .map_err(|e| CliError::Usage(e.to_string()))?,
            ("snp", Mode::Naf) => snpneg_core::compile::naf_via_snp(&db)
                .map_err(|e| CliError::Usage(e.to_string()))?,
            _ => unreachable!("engine/mode pairs are filtered above"),
        };
        results.push(EngineResult {
            engine: name,
            set,
            elapsed: started.elapsed(),
        });
    }

    let agreement = results.windows(2).all(|w| w[0].set == w[1].set);

    let mut body = String::new();
    let _ = writeln!(body, "database: {} variables, {} rules", db.n(), db.k());
    let _ = writeln!(body, "mode: {}", mode.name());
    for result in &results {
        let _ = writeln!(body, "{}: {}", result.engine, db.format_var_set(&result.set));
    }
    let _ = writeln!(body, "agreement: {agreement}");
    write_out(out, &body)?;

    let timings: Vec<String> = results
        .iter()
        .map(|r| format!("{}={:?}", r.engine, r.elapsed))
        .collect();
    eprintln!("timing: {}", timings.join(" "));

    if agreement {
        Ok(())
    } else {
        Err(CliError::Disagreement(
            "engines disagree; see the report above".to_string(),
        ))
    }
}

fn compiled(db: &Database, strict_paper: bool) -> Result<(SnpSystem, NeuronLayout), CliError> {
    let options = CompileOptions { strict_paper };
    compile_with(db, &Interpretation::bottom(db.n()), &options)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_compile(
    path: &std::path::Path,
    emit: Emit,
    strict_paper: bool,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let db = load_db(path)?;
    let (system, layout) = compiled(&db, strict_paper)?;
    let content = match emit {
        Emit::Doc => {
            let doc = serde_json::json!({
                "system": system_document(&system),
                "layout": layout_document(&db, &layout),
            });
            let mut text = serde_json::to_string_pretty(&doc)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            text.push('\n');
            text
        }
        Emit::Dot => layout_dot(&db, &system, &layout),
    };
    write_out(out, &content)
}

fn cmd_trace(
    path: &std::path::Path,
    direction: Direction,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let db = load_db(path)?;
    let table = trace_table(&db, direction).map_err(|e| CliError::Usage(e.to_string()))?;
    let content = match format {
        Format::Tsv => table.to_tsv(),
        Format::Doc => {
            let mut text = serde_json::to_string_pretty(&table.document())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            text.push('\n');
            text
        }
    };
    write_out(out, &content)
}

fn cmd_fuzz(
    seed: u64,
    count: usize,
    n_max: usize,
    k_max: usize,
    budget: Option<usize>,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if n_max < 1 || k_max < 1 || count < 1 {
        return Err(CliError::Usage("bounds must be >= 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut body = String::new();
    for round in 0..count {
        let db = random_database(&mut rng, n_max, k_max);
        let budget = budget.unwrap_or_else(|| default_budget(&db));

        let naf_operator = naf_set(&db);
        let cwa_operator = cwa_set(&db);
        let naf_sld = failure_set(&db, budget).map_err(|e| match e {
            SldError::BudgetExhausted { .. } => {
                CliError::Budget(format!("db {round}: {e}\n{}", render(&db)))
            }
            other => CliError::Usage(other.to_string()),
        })?;
        let naf_snp = snpneg_core::compile::naf_via_snp(&db)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let cwa_snp = snpneg_core::compile::cwa_via_snp(&db)
            .map_err(|e| CliError::Usage(e.to_string()))?;

        let mut mismatches = Vec::new();
        if naf_sld != naf_operator {
            mismatches.push(format!(
                "naf: operator {} vs sld {}",
                db.format_var_set(&naf_operator),
                db.format_var_set(&naf_sld)
            ));
        }
        if naf_snp != naf_operator {
            mismatches.push(format!(
                "naf: operator {} vs snp {}",
                db.format_var_set(&naf_operator),
                db.format_var_set(&naf_snp)
            ));
        }
        if cwa_snp != cwa_operator {
            mismatches.push(format!(
                "cwa: operator {} vs snp {}",
                db.format_var_set(&cwa_operator),
                db.format_var_set(&cwa_snp)
            ));
        }
        if !naf_operator.is_subset(&cwa_operator) {
            mismatches.push("naf is not contained in cwa".to_string());
        }

        if !mismatches.is_empty() {
            write_out(out, &body)?;
            return Err(CliError::Disagreement(format!(
                "db {round} (seed {seed}): {}\n{}",
                mismatches.join("; "),
                render(&db)
            )));
        }
        let _ = writeln!(
            body,
            "db {round}: n={} k={} naf={} cwa={} ok",
            db.n(),
            db.k(),
            db.format_var_set(&naf_operator),
            db.format_var_set(&cwa_operator)
        );
    }
    let _ = writeln!(body, "{count} databases checked, all engines agree");
    write_out(out, &body)
}

fn render(db: &Database) -> String {
    snpneg_core::text::render_kb(db)
}
