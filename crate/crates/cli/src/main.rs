use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use maxwell_cfm::harness::report::{write_errors, write_jumps, write_longtime};
use maxwell_cfm::harness::run::{convergence_ladder, longtime, run, write_ladder, Rung};
use maxwell_cfm::harness::RunConfig;
use maxwell_cfm::Error;

#[derive(Parser)]
#[command(version, about = "FDTD Maxwell interface solver with correction functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run to the configured final time; writes errors.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Convergence study over several grid sizes.
    Ladder {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        h_list: Vec<f64>,
        /// Also evaluate jump conditions at the final time.
        #[arg(long)]
        jumps: bool,
    },
    /// Jump-condition errors of the correction functions at `tf`.
    Jumps {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tf: f64,
        /// Refinement ladder; the config's h alone when absent.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        h_list: Vec<f64>,
    },
    /// Long run with the error sampled every `error_every` steps.
    Longtime {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "T", default_value_t = 25.0)]
        t_final: f64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BlowUp { .. } => 2,
        Error::Config(_) | Error::UnsupportedDegree(_) => 3,
        _ => 1,
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run { config } => {
            let config = RunConfig::load(&config)?;
            let (p, record) = run(&config)?;
            if config.snapshot_every > 0 {
                p.snapshot()?;
            }
            println!("h = {:.6}  steps = {}  t = {:.4}  error = {:.6e}", record.h, record.steps, record.time, record.errors.combined);
            let path = write_errors(&config, &[Rung { h: config.h, outcome: Ok((record, None)) }])?;
            println!("wrote {}", path.display());
        }
        Command::Ladder { config, h_list, jumps } => {
            let config = RunConfig::load(&config)?;
            let report = convergence_ladder(&config, &h_list, jumps)?;
            for r in &report.rungs {
                match &r.outcome {
                    Ok((rec, _)) => println!("h = {:.6}  error = {:.6e}", r.h, rec.errors.combined),
                    Err(e) => println!("h = {:.6}  failed: {e}", r.h),
                }
            }
            println!("slope = {:.3}", report.slope());
            write_ladder(&report)?;
        }
        Command::Jumps { config, tf, h_list } => {
            let config = RunConfig { t_final: tf, ..RunConfig::load(&config)? };
            let hs = if h_list.is_empty() { vec![config.h] } else { h_list };
            let rungs: Vec<Rung> = if hs.len() >= 3 {
                let report = convergence_ladder(&config, &hs, true)?;
                for q in 0..4 {
                    let s = report.jump_slope(q);
                    if s.is_finite() {
                        println!("order {q}: slope = {s:.3}");
                    }
                }
                report.rungs
            } else {
                hs.iter()
                    .map(|&h| {
                        let c = RunConfig { h, ..config.clone() };
                        let outcome = run(&c).and_then(|(p, rec)| Ok((rec, Some(p.jump_table()?))));
                        Rung { h, outcome: outcome.map_err(|e| e.to_string()) }
                    })
                    .collect()
            };
            for r in &rungs {
                match &r.outcome {
                    Ok((_, Some(t))) => {
                        for (q, e) in &t.orders {
                            println!("h = {:.6}  E{q} = {e:.6e}", r.h);
                        }
                    }
                    Ok(_) => {}
                    Err(e) => println!("h = {:.6}  failed: {e}", r.h),
                }
            }
            let path = write_jumps(&config, &rungs)?;
            println!("wrote {}", path.display());
        }
        Command::Longtime { config, t_final } => {
            let config = RunConfig { t_final, ..RunConfig::load(&config)? };
            let (samples, failure) = longtime(&config, t_final)?;
            let path = write_longtime(&config, &samples)?;
            if let Some(last) = samples.last() {
                println!("t = {:.4}  error = {:.6e}", last.time, last.errors.combined);
            }
            println!("wrote {}", path.display());
            if let Some(e) = failure {
                return Err(e);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_class() {
        assert_eq!(exit_code(&Error::BlowUp { step: 3, time: 0.1 }), 2);
        assert_eq!(exit_code(&Error::Config("bad".into())), 3);
        assert_eq!(exit_code(&Error::UnsupportedDegree(7)), 3);
        assert_eq!(exit_code(&Error::OutOfPatch { x: 0.0, y: 0.0, t: 0.0 }), 1);
    }
}
