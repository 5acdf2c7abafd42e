//! Command-line front end.
//!
//! Exit codes: 0 on success (including equilibrium searches that hit the
//! iteration cap, which report `converged=false` in their outputs), 1 on
//! usage errors, 2 when an input fails to load or validate, 3 on runtime
//! failures.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::baselines::compare_schemes;
use crate::cost::estimate_sessions;
use crate::emit::{emit_results, prices_csv, profits_csv, ResultBundle};
use crate::error::Error;
use crate::game::ResponseMode;
use crate::markov::{discretize, estimate_stp, ObservationTrace, SpaceKind};
use crate::scenario::{load_scenario, Scenario};
use crate::solver::{find_ne, tla_gts};

#[derive(Parser)]
#[command(
    name = "fedmarket",
    about = "Price-competition simulator for federated-learning incentives",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full selection game plus the scheme comparison; write the
    /// result bundle (prices.csv, profits.csv, predictions.csv, outcome.json).
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the equilibrium search only; write the price trajectory CSV.
    NeSolve {
        #[arg(long)]
        scenario: PathBuf,
        /// Override the buyer's response mode (printed|derived).
        #[arg(long)]
        mode: Option<String>,
        /// Override the convergence ratio.
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Estimate a transition matrix from a whitespace-separated trace of
    /// state indices and print it.
    EstimateMc {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        states: usize,
        /// State-space kind (load|gain); estimation depends only on the count.
        #[arg(long)]
        kind: String,
    },
    /// Run the three-scheme profit comparison; write profits.csv.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        /// Cost-plus markup for the independent linear pricing scheme.
        #[arg(long)]
        markup: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ScenarioParse { .. } | Error::ScenarioValidation { .. } | Error::Io { .. } => 2,
        Error::InsufficientData(_) => 2,
        _ => 3,
    }
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

fn reference_predictions(scenario: &Scenario) -> Vec<crate::cost::SessionEstimates> {
    let theta_ref = match scenario.contract.theta_max() {
        Ok(tm) => tm / 2.0,
        Err(_) => return Vec::new(),
    };
    scenario
        .ues
        .iter()
        .filter_map(|ue| {
            estimate_sessions(
                ue,
                &scenario.contract,
                &scenario.channel.chain,
                &scenario.channel.initial,
                theta_ref,
                scenario.solver.iteration_rule,
            )
            .ok()
        })
        .collect()
}

fn cmd_simulate(scenario_path: &Path, out: &Path) -> Result<(), Error> {
    let scenario = load_scenario(scenario_path)?;
    let outcome = tla_gts(
        &scenario.ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
    )?;
    let reports = compare_schemes(
        &scenario.ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
        scenario.ilps_markup,
        &scenario.id,
    )?;
    let bundle = ResultBundle {
        scenario_id: scenario.id.clone(),
        outcome,
        reports,
        predictions: reference_predictions(&scenario),
    };
    let files = emit_results(&bundle, out)?;
    if bundle.outcome.infeasible {
        println!(
            "infeasible contract: every candidate was removed; \
             the buyer must lower its performance metrics"
        );
    } else {
        println!(
            "converged={} iterations={} survivors={} eliminated={:?}",
            bundle.outcome.converged,
            bundle.outcome.iterations,
            bundle.outcome.ues.len(),
            bundle.outcome.eliminated
        );
    }
    for file in files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn cmd_ne_solve(
    scenario_path: &Path,
    mode: Option<&str>,
    xi: Option<f64>,
    out: &Path,
) -> Result<(), Error> {
    let scenario = load_scenario(scenario_path)?;
    let mut config = scenario.solver.clone();
    if let Some(mode) = mode {
        config.mode = match mode {
            "printed" => ResponseMode::Printed,
            "derived" => ResponseMode::Derived,
            other => {
                return Err(Error::invalid(format!(
                    "unknown mode {other:?} (printed|derived)"
                )))
            }
        };
    }
    if let Some(xi) = xi {
        config.xi = xi;
    }
    let outcome = find_ne(
        &scenario.ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &config,
    )?;
    let path = write_text(
        out,
        "prices.csv",
        &prices_csv(&outcome.trajectory, &outcome.ues),
    )?;
    println!(
        "converged={} iterations={}",
        outcome.converged, outcome.iterations
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_estimate_mc(trace_path: &Path, states: usize, kind: &str) -> Result<(), Error> {
    let kind = match kind {
        "load" => SpaceKind::Load,
        "gain" => SpaceKind::Gain,
        other => {
            return Err(Error::invalid(format!(
                "unknown kind {other:?} (load|gain)"
            )))
        }
    };
    let text = std::fs::read_to_string(trace_path).map_err(|source| Error::Io {
        path: trace_path.display().to_string(),
        source,
    })?;
    let slots: Vec<usize> = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| {
                Error::InsufficientData(format!("trace token {tok:?} is not a state index"))
            })
        })
        .collect::<Result<_, _>>()?;
    // Estimation only consumes the state count; unit bounds are fine here.
    let space = match kind {
        SpaceKind::Load => discretize(kind, 0.0, 1.0, states)?,
        SpaceKind::Gain => discretize(kind, 0.1, 1.0, states)?,
    };
    let chain = estimate_stp(&space, &ObservationTrace::new(slots, 0.0))?;
    for row in chain.matrix() {
        let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
        println!("{}", cells.join(" "));
    }
    Ok(())
}

fn cmd_compare(scenario_path: &Path, markup: Option<f64>, out: &Path) -> Result<(), Error> {
    let scenario = load_scenario(scenario_path)?;
    let markup = markup.unwrap_or(scenario.ilps_markup);
    let reports = compare_schemes(
        &scenario.ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
        markup,
        &scenario.id,
    )?;
    let path = write_text(out, "profits.csv", &profits_csv(&reports))?;
    for report in &reports {
        let profits: Vec<String> = report
            .entries
            .iter()
            .map(|e| format!("ue{}={:.6e}", e.ue, e.profit))
            .collect();
        println!("{}: {}", report.scheme.as_str(), profits.join(" "));
    }
    println!("wrote {}", path.display());
    Ok(())
}

/// Run the CLI against `argv` (without the program name); returns the exit
/// code instead of exiting, so the binary stays a one-line wrapper.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut full: Vec<OsString> = vec!["fedmarket".into()];
    full.extend(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(full) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate { scenario, out } => cmd_simulate(scenario, out),
        Command::NeSolve {
            scenario,
            mode,
            xi,
            out,
        } => cmd_ne_solve(scenario, mode.as_deref(), *xi, out),
        Command::EstimateMc {
            trace,
            states,
            kind,
        } => cmd_estimate_mc(trace, *states, kind),
        Command::Compare {
            scenario,
            markup,
            out,
        } => cmd_compare(scenario, *markup, out),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
