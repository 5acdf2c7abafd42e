//! Result persistence: plot-ready CSV files plus a full-precision JSON
//! rendering of the equilibrium outcome.
//!
//! All emission is deterministic: a given bundle always produces
//! byte-identical files. JSON numbers are written with 17 significant
//! digits so every double survives a parse round trip exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::baselines::ProfitReport;
use crate::cost::SessionEstimates;
use crate::error::{Error, Result};
use crate::solver::{IterationRecord, NeOutcome, UeOutcome};

/// Everything one simulation run wants to persist.
#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub scenario_id: String,
    pub outcome: NeOutcome,
    pub reports: Vec<ProfitReport>,
    /// Reference forecasts per UE, in input order.
    pub predictions: Vec<SessionEstimates>,
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

/// `iteration,ue,session,price,grad_norm` — one row per recorded iteration,
/// seller and session. The gradient norm is the seller's, repeated on each
/// of its session rows.
pub fn prices_csv(trajectory: &[IterationRecord], ues: &[UeOutcome]) -> String {
    let mut out = String::from("iteration,ue,session,price,grad_norm\n");
    for rec in trajectory {
        for (i, prices) in rec.prices.iter().enumerate() {
            let id = ues.get(i).map(|u| u.id).unwrap_or(i as u32 + 1);
            for (t, p) in prices.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    rec.index,
                    id,
                    t + 1,
                    p,
                    rec.grad_norms[i]
                );
            }
        }
    }
    out
}

/// `scheme,ue,profit_J,payment_J`
pub fn profits_csv(reports: &[ProfitReport]) -> String {
    let mut out = String::from("scheme,ue,profit_J,payment_J\n");
    for report in reports {
        for e in &report.entries {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                report.scheme.as_str(),
                e.ue,
                e.profit,
                e.payment
            );
        }
    }
    out
}

/// `ue,session,load_state_hz,gain_state,eF_J,eC_J,psi_J`
pub fn predictions_csv(predictions: &[SessionEstimates]) -> String {
    let mut out = String::from("ue,session,load_state_hz,gain_state,eF_J,eC_J,psi_J\n");
    for est in predictions {
        for (t, s) in est.sessions.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                est.ue,
                t + 1,
                s.load_hz,
                s.gain_state,
                s.training_j,
                s.transmission_j,
                s.total_j
            );
        }
    }
    out
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_f64_array(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| f(x)).collect();
    format!("[{}]", items.join(","))
}

/// Render an outcome as JSON with full-precision floats.
pub fn outcome_json(scenario_id: &str, outcome: &NeOutcome) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"scenario\": {},", json_string(scenario_id));
    let _ = writeln!(out, "  \"theta_max\": {},", f(outcome.theta_max));
    let _ = writeln!(out, "  \"converged\": {},", outcome.converged);
    let _ = writeln!(out, "  \"iterations\": {},", outcome.iterations);
    let _ = writeln!(out, "  \"infeasible\": {},", outcome.infeasible);
    let elim: Vec<String> = outcome.eliminated.iter().map(|id| id.to_string()).collect();
    let _ = writeln!(out, "  \"eliminated_ues\": [{}],", elim.join(","));
    let _ = writeln!(out, "  \"mo_cost\": {},", f(outcome.mo_cost));
    out.push_str("  \"ues\": [\n");
    for (i, ue) in outcome.ues.iter().enumerate() {
        let _ = write!(
            out,
            "    {{\"id\": {}, \"theta\": {}, \"theta_eval\": {}, \"theta_clamped\": {}, \"iterations_bought\": {}, \"payment\": {}, \"energy\": {}, \"profit\": {}, \"prices\": {}}}",
            ue.id,
            f(ue.theta),
            f(ue.theta_eval),
            ue.theta_clamped,
            f(ue.iterations_bought),
            f(ue.payment),
            f(ue.energy),
            f(ue.profit),
            json_f64_array(&ue.prices)
        );
        out.push_str(if i + 1 < outcome.ues.len() {
            ",\n"
        } else {
            "\n"
        });
    }
    out.push_str("  ],\n");
    out.push_str("  \"trajectory\": [\n");
    for (i, rec) in outcome.trajectory.iter().enumerate() {
        let prices: Vec<String> = rec.prices.iter().map(|row| json_f64_array(row)).collect();
        let clamped: Vec<String> = rec.clamped.iter().map(|c| c.to_string()).collect();
        let _ = write!(
            out,
            "    {{\"iteration\": {}, \"prices\": [{}], \"thetas\": {}, \"grad_norms\": {}, \"clamped\": [{}], \"max_price_step\": {}}}",
            rec.index,
            prices.join(","),
            json_f64_array(&rec.thetas),
            json_f64_array(&rec.grad_norms),
            clamped.join(","),
            f(rec.max_price_step)
        );
        out.push_str(if i + 1 < outcome.trajectory.len() {
            ",\n"
        } else {
            "\n"
        });
    }
    out.push_str("  ]\n}\n");
    out
}

#[derive(Debug, Deserialize)]
struct OutcomeDoc {
    scenario: String,
    theta_max: f64,
    converged: bool,
    iterations: usize,
    infeasible: bool,
    eliminated_ues: Vec<u32>,
    mo_cost: f64,
    ues: Vec<UeDoc>,
    trajectory: Vec<TrajectoryDoc>,
}

#[derive(Debug, Deserialize)]
struct UeDoc {
    id: u32,
    theta: f64,
    theta_eval: f64,
    theta_clamped: bool,
    iterations_bought: f64,
    payment: f64,
    energy: f64,
    profit: f64,
    prices: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct TrajectoryDoc {
    iteration: usize,
    prices: Vec<Vec<f64>>,
    thetas: Vec<f64>,
    grad_norms: Vec<f64>,
    clamped: Vec<usize>,
    max_price_step: f64,
}

/// Parse an outcome JSON file back into memory.
pub fn read_outcome(path: impl AsRef<Path>) -> Result<(String, NeOutcome)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let doc: OutcomeDoc = serde_json::from_str(&text).map_err(|e| Error::ScenarioParse {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let outcome = NeOutcome {
        theta_max: doc.theta_max,
        converged: doc.converged,
        iterations: doc.iterations,
        infeasible: doc.infeasible,
        eliminated: doc.eliminated_ues,
        ues: doc
            .ues
            .into_iter()
            .map(|u| UeOutcome {
                id: u.id,
                prices: u.prices,
                theta: u.theta,
                theta_eval: u.theta_eval,
                theta_clamped: u.theta_clamped,
                iterations_bought: u.iterations_bought,
                payment: u.payment,
                energy: u.energy,
                profit: u.profit,
            })
            .collect(),
        mo_cost: doc.mo_cost,
        trajectory: doc
            .trajectory
            .into_iter()
            .map(|t| IterationRecord {
                index: t.iteration,
                prices: t.prices,
                thetas: t.thetas,
                grad_norms: t.grad_norms,
                clamped: t.clamped,
                max_price_step: t.max_price_step,
            })
            .collect(),
    };
    Ok((doc.scenario, outcome))
}

/// Write the four result files into `dir` and return their paths.
pub fn emit_results(bundle: &ResultBundle, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    Ok(vec![
        write_file(
            dir,
            "prices.csv",
            &prices_csv(&bundle.outcome.trajectory, &bundle.outcome.ues),
        )?,
        write_file(dir, "profits.csv", &profits_csv(&bundle.reports))?,
        write_file(
            dir,
            "predictions.csv",
            &predictions_csv(&bundle.predictions),
        )?,
        write_file(
            dir,
            "outcome.json",
            &outcome_json(&bundle.scenario_id, &bundle.outcome),
        )?,
    ])
}
