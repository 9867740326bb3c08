use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hnf_cavity::bench::{reproduce_tables, run_case, run_grid_study, run_sweep, BenchConfig};
use hnf_cavity::mms::{ManufacturedCase, MmsStudy};
use hnf_cavity::post::export::write_file;
use hnf_cavity::Error;

#[derive(Parser)]
#[command(name = "hnf-cavity", version, about = "Natural convection of a hybrid nanofluid in square, L and H cavities")]
struct Cli {
    /// Configuration file (`[section]` headers, `key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Concurrent cases in sweeps, grid studies and tables.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured case.
    Run,
    /// Cartesian product over the [sweep] axes.
    Sweep,
    /// Solve the configured case on each grid of [gridstudy].
    Gridstudy {
        /// Overrides `gridstudy.grids`.
        #[arg(value_delimiter = ',')]
        grids: Vec<usize>,
    },
    /// Reproduce published tables and compare.
    Tables {
        /// Table ids; overrides `tables.ids`, default all.
        ids: Vec<u32>,
    },
    /// Manufactured-solution convergence study.
    Mms,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. }
        | Error::Parse { .. }
        | Error::InvalidStudy(_)
        | Error::InvalidGeometry(_)
        | Error::InvalidMixture(_)
        | Error::InvalidSolverConfig(_)
        | Error::MaterialData { .. } => 2,
        Error::NonConvergence { .. } | Error::StudyAborted { .. } => 3,
        Error::Io { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn converged_code(ok: bool) -> u8 {
    if ok {
        0
    } else {
        3
    }
}

fn execute(cli: &Cli) -> Result<u8, Error> {
    let cfg = BenchConfig::load(cli.config.as_deref())?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::Run => {
            let outcome = run_case(&cfg.case, Some(out))?;
            println!("{}", outcome.summary_line());
            if let Some(msg) = &outcome.error {
                eprintln!("warning: {msg}");
            }
            Ok(converged_code(outcome.converged))
        }
        Command::Sweep => {
            let table = run_sweep(&cfg.case, &cfg.sweep, cli.workers, Some(out))?;
            for row in &table.rows {
                println!("{}", row.summary_line());
            }
            for check in table.monotonicity() {
                println!("{check}");
            }
            Ok(converged_code(table.all_converged()))
        }
        Command::Gridstudy { grids } => {
            let grids = if grids.is_empty() { &cfg.grids } else { grids };
            if grids.is_empty() {
                return Err(Error::Config {
                    line: 0,
                    message: "no grids: set gridstudy.grids or pass them as arguments".into(),
                });
            }
            let study = run_grid_study(&cfg.case, grids, cli.workers, Some(out))?;
            for row in &study.rows {
                println!("{}", row.summary_line());
            }
            println!("nu change between finest grids: {:.4}%", 100.0 * study.nu_change());
            println!("max change between finest grids: {:.4}%", 100.0 * study.max_relative_change());
            Ok(converged_code(study.rows.iter().all(|r| r.converged)))
        }
        Command::Tables { ids } => {
            let ids = match (ids.is_empty(), cfg.tables.is_empty()) {
                (false, _) => ids.clone(),
                (true, false) => cfg.tables.clone(),
                (true, true) => hnf_cavity::bench::TABLE_IDS.to_vec(),
            };
            let report = reproduce_tables(&ids, cli.workers, Some(out))?;
            print!("{}", report.to_text());
            Ok(converged_code(report.all_converged()))
        }
        Command::Mms => run_mms(&cfg, out),
    }
}

fn run_mms(cfg: &BenchConfig, out: &Path) -> Result<u8, Error> {
    let s = &cfg.mms;
    let study = MmsStudy::new(s.levels, s.prandtl, s.rayleigh);
    let case = ManufacturedCase { kind: s.case };
    let (report, failure) = match study.run(&case) {
        Ok(r) => (r, None),
        Err(Error::StudyAborted { partial, source }) => (*partial, Some(*source)),
        Err(e) => return Err(e),
    };
    std::fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    let csv = report.to_csv();
    write_file(&out.join("mms.csv"), |w| std::io::Write::write_all(w, csv.as_bytes()))?;
    print!("{csv}");
    println!("{}", report.summary());
    match failure {
        None => Ok(0),
        Some(e) => {
            eprintln!("error: {e}");
            Ok(3)
        }
    }
}
