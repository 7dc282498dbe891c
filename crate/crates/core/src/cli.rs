//! Machine-readable records for the `svst-minimax` command-line tool.
//!
//! Every command produces an [`OutputRecord`]: a fixed set of JSON keys
//! (`command`, `tool_version`, `seed`, `inputs`, `columns`, `rows`) or, with
//! `--format csv`, a header line followed by one line per row. Floats are
//! rounded to 12 significant digits so output is byte-stable.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::amse::{self, MatrixClass};
use crate::error::{invalid, Result};
use crate::finite_n::{finite_n_minimax, ClassKind, FiniteProblem};
use crate::sim::{monte_carlo_risk, sure_vs_empirical, SimConfig};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Columns shared by every curve-shaped output, in this order.
pub const CURVE_COLUMNS: [&str; 6] = ["rho", "gamma", "lambda_star", "amse", "tuning_scale", "lower_bound"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

impl OutputRecord {
    fn new(command: &str, seed: Option<u64>, inputs: BTreeMap<String, Value>, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            seed,
            inputs,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row.into_iter().map(round_sig).collect());
    }

    /// Value of `column` in row `row`.
    pub fn get(&self, row: usize, column: &str) -> Option<f64> {
        let idx = self.columns.iter().position(|c| c == column)?;
        self.rows.get(row).map(|r| r[idx])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn class_inputs(class: MatrixClass) -> BTreeMap<String, Value> {
    let mut inputs = BTreeMap::new();
    inputs.insert("class".into(), json!(class.name()));
    inputs.insert("beta".into(), json!(class.beta()));
    inputs
}

fn curve_row(row: &amse::CurveRow) -> Vec<f64> {
    vec![
        row.rho,
        row.gamma,
        row.lambda_star,
        row.amse,
        row.tuning_scale,
        row.lower_bound,
    ]
}

/// Parses `START:STOP:STEP` into an inclusive grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(invalid(format!("grid must look like START:STOP:STEP, got {spec:?}")));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| invalid(format!("bad grid number {s:?}")))
    };
    let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
    if !(step > 0.0) || !(start <= stop) || !start.is_finite() || !stop.is_finite() {
        return Err(invalid(format!("grid needs START <= STOP and STEP > 0, got {spec:?}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| round_sig((start + i as f64 * step).min(stop)))
        .collect())
}

/// Interior `θ` grid `(π/2)·i/(count + 1)`, `i = 1..=count`.
pub fn theta_grid(count: usize) -> Vec<f64> {
    (1..=count).map(|i| FRAC_PI_2 * i as f64 / (count + 1) as f64).collect()
}

pub fn cmd_amse(class: MatrixClass, rho: f64) -> Result<OutputRecord> {
    let p = amse::minimax_amse(class, rho)?;
    let mut inputs = class_inputs(class);
    inputs.insert("rho".into(), json!(rho));
    let mut columns = CURVE_COLUMNS.to_vec();
    columns.push("ratio_bound");
    let mut rec = OutputRecord::new("amse", None, inputs, &columns);
    let mut row = curve_row(&p.into());
    row.push(amse::ratio_bound(class));
    rec.push(row);
    Ok(rec)
}

pub fn cmd_curve(class: MatrixClass, rhos: &[f64], grid: &str) -> Result<OutputRecord> {
    let table = amse::tabulate(class, rhos)?;
    let mut inputs = class_inputs(class);
    inputs.insert("grid".into(), json!(grid));
    inputs.insert("description".into(), json!(table.description));
    let mut rec = OutputRecord::new("curve", None, inputs, &CURVE_COLUMNS);
    for row in &table.rows {
        rec.push(curve_row(row));
    }
    Ok(rec)
}

/// Parametric square-case curve with an agreement column against the direct solver.
pub fn cmd_parametric(class: MatrixClass, theta_count: usize) -> Result<OutputRecord> {
    if theta_count == 0 {
        return Err(invalid("theta count must be at least 1"));
    }
    let thetas = theta_grid(theta_count);
    let table = amse::parametric_curve(class, &thetas)?;
    let mut inputs = class_inputs(class);
    inputs.insert("theta_count".into(), json!(theta_count));
    let mut columns = CURVE_COLUMNS.to_vec();
    columns.extend(["theta", "direct_amse", "abs_diff"]);
    let mut rec = OutputRecord::new("parametric", None, inputs, &columns);
    for (row, theta) in table.rows.iter().zip(thetas.iter().rev()) {
        let direct = amse::minimax_amse(class, row.rho)?.amse;
        let mut out = curve_row(row);
        out.extend([*theta, direct, (direct - row.amse).abs()]);
        rec.push(out);
    }
    Ok(rec)
}

fn problem_inputs(prob: &FiniteProblem, trials: usize) -> BTreeMap<String, Value> {
    let mut inputs = BTreeMap::new();
    inputs.insert(
        "class".into(),
        json!(match prob.kind {
            ClassKind::Mat => "mat",
            ClassKind::Sym => "sym",
        }),
    );
    inputs.insert("r".into(), json!(prob.r));
    inputs.insert("m".into(), json!(prob.m));
    inputs.insert("n".into(), json!(prob.n));
    inputs.insert("trials".into(), json!(trials));
    inputs
}

pub fn cmd_finite_n(prob: &FiniteProblem, trials: usize, seed: u64) -> Result<OutputRecord> {
    let fin = finite_n_minimax(prob, trials, seed)?;
    let asym = amse::minimax_amse(prob.class(), prob.rho())?;
    let columns = [
        "rho",
        "alpha",
        "lambda_star",
        "mse",
        "std_error",
        "data_threshold",
        "asymptotic_lambda_star",
        "asymptotic_amse",
        "lower_bound",
    ];
    let mut rec = OutputRecord::new("finite-n", Some(seed), problem_inputs(prob, trials), &columns);
    rec.push(vec![
        prob.rho(),
        prob.alpha(),
        fin.lambda_star,
        fin.mse,
        fin.std_error,
        fin.data_threshold,
        asym.lambda_star,
        asym.amse,
        amse::global_lower_bound_finite(prob.r, prob.m, prob.n),
    ]);
    Ok(rec)
}

/// Data-scale minimax threshold `√(1 − r/n)·Λ*(r/m, m/n, α)`.
pub fn minimax_data_threshold(prob: &FiniteProblem) -> Result<f64> {
    Ok(prob.data_threshold(amse::minimax_threshold(prob.class(), prob.rho())?))
}

pub fn cmd_simulate(
    prob: &FiniteProblem,
    mu: f64,
    lambda: Option<f64>,
    trials: usize,
    seed: u64,
) -> Result<OutputRecord> {
    let (policy, lambda) = match lambda {
        Some(l) => ("explicit", l),
        None => ("minimax", minimax_data_threshold(prob)?),
    };
    let stats = monte_carlo_risk(&SimConfig {
        prob: *prob,
        mu,
        lambda,
        trials,
        seed,
    })?;
    let mut inputs = problem_inputs(prob, trials);
    inputs.insert("mu".into(), json!(mu));
    inputs.insert("lambda_policy".into(), json!(policy));
    let columns = ["mu", "lambda", "risk", "std_error", "asymptotic_amse"];
    let mut rec = OutputRecord::new("simulate", Some(seed), inputs, &columns);
    let asym = amse::minimax_amse(prob.class(), prob.rho())?.amse;
    rec.push(vec![mu, lambda, stats.mean, stats.std_error, asym]);
    Ok(rec)
}

pub fn cmd_sure_check(prob: &FiniteProblem, mu: f64, lambda: f64, trials: usize, seed: u64) -> Result<OutputRecord> {
    let check = sure_vs_empirical(&SimConfig {
        prob: *prob,
        mu,
        lambda,
        trials,
        seed,
    })?;
    let mut inputs = problem_inputs(prob, trials);
    inputs.insert("mu".into(), json!(mu));
    let columns = [
        "mu",
        "lambda",
        "sure_mean",
        "sure_std_error",
        "risk_mean",
        "risk_std_error",
        "discrepancy_z",
        "resampled",
    ];
    let mut rec = OutputRecord::new("sure-check", Some(seed), inputs, &columns);
    rec.push(vec![
        mu,
        lambda,
        check.sure.mean,
        check.sure.std_error,
        check.risk.mean,
        check.risk.std_error,
        check.discrepancy_z,
        check.resampled as f64,
    ]);
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.234_567_890_123_456), 1.234_567_890_12);
        assert_eq!(round_sig(-2.5e-7), -2.5e-7);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:0.3:0.1").unwrap(), vec![0.0, 0.1, 0.2, 0.3]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a:1:0.1").is_err());
    }

    #[test]
    fn amse_record_endpoints() {
        let rec = cmd_amse(MatrixClass::Mat { beta: 1.0 }, 0.0).unwrap();
        assert_eq!(rec.get(0, "amse"), Some(0.0));
        assert_eq!(rec.get(0, "lambda_star"), Some(2.0));
        let rec = cmd_amse(MatrixClass::Mat { beta: 0.5 }, 1.0).unwrap();
        assert_eq!(rec.get(0, "amse"), Some(1.0));
        assert_eq!(rec.columns[..6], CURVE_COLUMNS.map(String::from));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rec = cmd_curve(MatrixClass::Sym, &[0.0, 0.5, 1.0], "0:1:0.5").unwrap();
        let text = rec.to_csv();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("rho,gamma,lambda_star,amse,tuning_scale,lower_bound")
        );
        assert_eq!(lines.count(), 3);
    }
}
