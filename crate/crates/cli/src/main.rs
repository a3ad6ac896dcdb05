use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chernlab_cli::{exit, output, run, Suite};
use chernlab_core::registry;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chernlab", version, about = "Numerical checks of Chern curvature identities and Schwarz-type estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-point values as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Override the probe seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// List registered metrics, maps and scenes.
    List,
    Curvature(RunArgs),
    Bochner1(RunArgs),
    Bochner2(RunArgs),
    SchwarzA(RunArgs),
    SchwarzB(RunArgs),
    SchwarzC(RunArgs),
    Rigidity(RunArgs),
    Integral(RunArgs),
    Gauduchon(RunArgs),
    Kahler(RunArgs),
    All(RunArgs),
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CHERNLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CHERNLAB_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn list() -> i32 {
    let doc = serde_json::json!({
        "entries": registry::list(),
        "scenes": chernlab_core::scenes::bochner_scenes().iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
    });
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&doc).expect("registry serializes"));
    exit::PASS
}

fn execute(suite: Suite, args: RunArgs) -> i32 {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("chernlab: cannot read {}: {e}", args.config.display());
            return exit::INVALID;
        }
    };
    let outcome = run(suite, &text, args.seed);
    let json = outcome.report.to_json();
    match &args.out {
        Some(path) => {
            if let Err(e) = output::write_atomic(path, json.as_bytes()) {
                eprintln!("chernlab: cannot write {}: {e}", path.display());
                return exit::INVALID;
            }
        }
        None => {
            let _ = std::io::stdout().lock().write_all(json.as_bytes());
        }
    }
    if let (Some(path), Some(table)) = (&args.csv, &outcome.table) {
        let bytes = match table.to_csv() {
            Ok(b) => b,
            Err(e) => {
                eprintln!("chernlab: cannot format CSV: {e}");
                return exit::INVALID;
            }
        };
        if let Err(e) = output::write_atomic(path, &bytes) {
            eprintln!("chernlab: cannot write {}: {e}", path.display());
            return exit::INVALID;
        }
    }
    if let Some(err) = &outcome.report.error {
        eprintln!("chernlab: {}: {}", err.kind, err.message);
    }
    eprintln!(
        "chernlab {}: {} (max residual {:e})",
        suite,
        if outcome.report.pass { "PASS" } else { "FAIL" },
        outcome.report.max_residual
    );
    outcome.exit_code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("chernlab: {e}");
        return ExitCode::from(exit::INVALID as u8);
    }
    let code = match cli.command {
        Command::List => list(),
        Command::Curvature(a) => execute(Suite::Curvature, a),
        Command::Bochner1(a) => execute(Suite::Bochner1, a),
        Command::Bochner2(a) => execute(Suite::Bochner2, a),
        Command::SchwarzA(a) => execute(Suite::SchwarzA, a),
        Command::SchwarzB(a) => execute(Suite::SchwarzB, a),
        Command::SchwarzC(a) => execute(Suite::SchwarzC, a),
        Command::Rigidity(a) => execute(Suite::Rigidity, a),
        Command::Integral(a) => execute(Suite::Integral, a),
        Command::Gauduchon(a) => execute(Suite::Gauduchon, a),
        Command::Kahler(a) => execute(Suite::Kahler, a),
        Command::All(a) => execute(Suite::All, a),
    };
    ExitCode::from(code as u8)
}
