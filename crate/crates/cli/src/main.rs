use std::process::ExitCode;
use std::time::Instant;

use loctime_cli::args::{self, Command, RunManifest, USAGE};
use loctime_cli::report::{emit_report, print_summary};
use loctime_cli::verify;
use loctime_core::montecarlo::{conjecture_probe, expectation_scan, run_experiment};

fn main() -> ExitCode {
    let mut manifest = match args::parse_args(std::env::args().skip(1)) {
        Ok(m) => m,
        Err(e) => {
            if e.0 == "help requested" {
                println!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e}\n\n{USAGE}");
            return ExitCode::from(1);
        }
    };
    let env_cap = std::env::var("LOCTIME_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok());
    args::apply_worker_cap(&mut manifest.config, env_cap);

    match run(&manifest) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(manifest: &RunManifest) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let started = Instant::now();
    match manifest.command {
        Command::VerifyIdentities => {
            let results = verify::run_suite();
            let ok = verify::print_results(&results);
            println!("elapsed: {:.2}s", started.elapsed().as_secs_f64());
            return Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            });
        }
        Command::Clt | Command::TauClt => {
            let report = run_experiment(&manifest.config)?;
            print_summary(&report);
            let written = emit_report(&report, manifest, None)?;
            announce(&written, started);
        }
        Command::ExpectationScan => {
            let (report, rows) = expectation_scan(&manifest.config)?;
            print_summary(&report);
            println!("h        mean_S2       stderr     mean_S2 - 4th");
            for row in &rows {
                println!(
                    "{:<8} {:<13.8} {:<10.2e} {:+.8}",
                    row.h, row.mean_s, row.stderr, row.deviation
                );
            }
            let table = serde_json::to_value(&rows)?;
            let written = emit_report(&report, manifest, Some(("expectation_table", table)))?;
            announce(&written, started);
        }
        Command::ConjectureProbe => {
            let (report, rows) = conjecture_probe(&manifest.config)?;
            print_summary(&report);
            println!("h        Var(R_c)/h^(q+1)  Var(T_q)      mean_R (se)");
            for row in &rows {
                println!(
                    "{:<8} {:<17.6e} {:<13.6e} {:+.6e} ({:.2e})",
                    row.h, row.var_r_normalized, row.var_t, row.mean_r, row.stderr_r
                );
            }
            let table = serde_json::to_value(&rows)?;
            let written = emit_report(&report, manifest, Some(("conjecture_table", table)))?;
            announce(&written, started);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn announce(written: &[std::path::PathBuf], started: Instant) {
    for path in written {
        println!("wrote {}", path.display());
    }
    println!("elapsed: {:.2}s", started.elapsed().as_secs_f64());
}
