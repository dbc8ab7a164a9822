use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use orbint::cli::{error_exit_code, format_table, list_scenarios, load_config, run_scenario, RunOptions};

#[derive(Parser)]
#[command(name = "orbint", version, about = "Orbital integral experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write a gnuplot script next to the CSV.
        #[arg(long)]
        emit_plot_script: bool,
    },
    /// List registered scenarios.
    List {
        #[arg(long)]
        json: bool,
        /// Keep scenarios whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("ORBINT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("ORBINT_THREADS={v:?} is not a count"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::List { json, filter } => {
            let infos = list_scenarios(filter.as_deref());
            if json {
                match serde_json::to_string_pretty(&infos) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(3);
                    }
                }
            } else {
                print!("{}", format_table(&infos));
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            out,
            seed,
            emit_plot_script,
        } => {
            let opts = RunOptions {
                out_dir: out,
                seed,
                emit_plot_script,
            };
            let report = load_config(&config).and_then(|cfg| run_scenario(&cfg, &opts));
            match report {
                Ok(r) => {
                    for c in &r.checks {
                        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
                    }
                    println!(
                        "{}: {} rows in {:.2}s -> {}, {}",
                        r.scenario,
                        r.rows,
                        r.wall_time_s,
                        r.csv.display(),
                        r.json.display()
                    );
                    if r.non_finite_rows > 0 {
                        eprintln!("error: {} rows are not finite", r.non_finite_rows);
                    }
                    ExitCode::from(r.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(error_exit_code(&e) as u8)
                }
            }
        }
    }
}
