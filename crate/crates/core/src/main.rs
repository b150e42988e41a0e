//! Command-line front end: parse a Hermitian form pack, run the direct
//! solver, the Tanaka prolongation, or the full isomorphism certification,
//! and emit a canonical JSON report.
//!
//! Exit codes: 0 when every verdict in scope passes, 1 on any failed verdict
//! (including degenerate input, which is reported with a witness), 2 on
//! usage, I/O, or parse errors.

use clap::{Parser, Subcommand};
use cr_quadric::report::{
    catalog_document, prolong_document, solve_document, verify_document, write_report,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cr-quadric",
    about = "Exact symmetry algebras of non-degenerate CR quadrics: direct solver, Tanaka prolongation, isomorphism certification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the constraint systems and report the graded algebra directly
    Solve {
        /// Path to a form pack JSON file
        #[arg(long)]
        form: PathBuf,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct the Tanaka prolongation tower and certify its identities
    Prolong {
        #[arg(long)]
        form: PathBuf,
        /// Stop (with an error) if the tower has not terminated by this level
        #[arg(long, default_value_t = 6)]
        max_level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run both pipelines and certify that the canonical map is an isomorphism
    Verify {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify every pack in a builtin catalog suite
    Catalog {
        /// One of: heisenberg, hyperquadric, diagonal-codim2, full-suite
        #[arg(long)]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Embed structure constants in each entry
        #[arg(long)]
        include_constants: bool,
    },
}

const DEFAULT_MAX_LEVEL: usize = 6;

fn load_pack(path: &Path) -> Result<cr_quadric::HermitianFormPack, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("reading {}: {e}", path.display()))?;
    cr_quadric::forms::parse_form_pack(&text).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<bool, String> {
    let (doc, pass, out) = match cli.command {
        Command::Solve { form, out } => {
            let pack = load_pack(&form)?;
            let (doc, pass) = solve_document(&pack).map_err(|e| e.to_string())?;
            (doc, pass, out)
        }
        Command::Prolong {
            form,
            max_level,
            out,
        } => {
            let pack = load_pack(&form)?;
            let (doc, pass) = prolong_document(&pack, max_level).map_err(|e| e.to_string())?;
            (doc, pass, out)
        }
        Command::Verify { form, out } => {
            let pack = load_pack(&form)?;
            let (doc, pass) =
                verify_document(&pack, DEFAULT_MAX_LEVEL).map_err(|e| e.to_string())?;
            (doc, pass, out)
        }
        Command::Catalog {
            suite,
            out,
            include_constants,
        } => {
            let (doc, pass) = catalog_document(&suite, DEFAULT_MAX_LEVEL, include_constants)
                .map_err(|e| e.to_string())?;
            (doc, pass, out)
        }
    };
    write_report(&doc, out.as_deref()).map_err(|e| e.to_string())?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
