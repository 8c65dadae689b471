//! Executes a [`RunConfig`] and renders the result as CSV or JSON.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::checks::validation_suites;
use crate::config::{Format, Mode, Parameters, PhysicalInput, RunConfig};
use crate::error::{Error, Result};
use crate::oscillation::{implied_masses_ev, step_frequencies, transition_probability};
use crate::pmns::{build_pmns, Flavor};
use crate::walk::{encoding_table, RegimeWarning, WalkParams};
use crate::wavepacket::{
    flavor_correlation_entropy, spin_space_entropy, wavepacket_probability, CorrelationEvolution,
    PacketEvolution,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(x.to_string())),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub walk: WalkParams,
    pub warnings: Vec<RegimeWarning>,
    pub table: Table,
    /// False when a validation suite failed.
    pub passed: bool,
}

/// Step counts written to the output: `0, stride, 2·stride, … ≤ steps`.
pub fn output_steps(config: &RunConfig) -> impl Iterator<Item = u64> {
    (0..=config.steps).step_by(config.stride.max(1) as usize)
}

pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    let (walk, warnings) = config.walk_params()?;
    let pmns = build_pmns(&config.pmns)?;
    let source = config.source;
    let mut passed = true;

    let table = match config.mode {
        Mode::Oscillate => {
            let mut t = Table::new(&["step", "P_e", "P_mu", "P_tau"]);
            let spec = config.wavepacket.as_ref().map(|w| w.specs()[0]);
            for n in output_steps(config) {
                let mut row = vec![Cell::Int(n)];
                for beta in Flavor::ALL {
                    let p = match &spec {
                        Some(s) => wavepacket_probability(s, &pmns, &walk, source, beta, n)?,
                        None => transition_probability(source, beta, &pmns, &walk, n),
                    };
                    row.push(Cell::Num(p));
                }
                t.rows.push(row);
            }
            t
        }
        Mode::Entropy => {
            let specs = config.wavepacket.as_ref().map(|w| w.specs()).unwrap_or_default();
            let names: Vec<String> = specs.iter().map(|s| format!("S_e_eps={}", s.epsilon)).collect();
            let mut columns = vec!["step"];
            columns.extend(names.iter().map(String::as_str));
            let mut t = Table::new(&columns);
            let packets = specs
                .iter()
                .map(|s| PacketEvolution::new(s, &pmns, &walk, source))
                .collect::<Result<Vec<_>>>()?;
            for n in output_steps(config) {
                let mut row = vec![Cell::Int(n)];
                for p in &packets {
                    row.push(Cell::Num(spin_space_entropy(&p.coin_density(n))?));
                }
                t.rows.push(row);
            }
            t
        }
        Mode::FlavorCorr => {
            let spec = config
                .wavepacket
                .as_ref()
                .map(|w| w.specs()[0])
                .ok_or_else(|| Error::InvalidWavepacket("flavor-corr needs a wavepacket".into()))?;
            let evolution = CorrelationEvolution::new(&spec, &pmns, &walk, source)?;
            let mut t = Table::new(&[
                "step",
                "S_e_corr",
                "S_mu_corr",
                "S_tau_corr",
                "raw_trace_e",
                "raw_trace_mu",
                "raw_trace_tau",
            ]);
            for n in output_steps(config) {
                let densities = Flavor::ALL
                    .iter()
                    .map(|&a| evolution.density(a, n))
                    .collect::<Result<Vec<_>>>()?;
                let mut row = vec![Cell::Int(n)];
                for d in &densities {
                    row.push(Cell::Num(flavor_correlation_entropy(d)?));
                }
                row.extend(densities.iter().map(|d| Cell::Num(d.raw_trace)));
                t.rows.push(row);
            }
            t
        }
        Mode::MapParams => map_params_table(config, &walk, &warnings)?,
        Mode::Validate => {
            let specs = config.wavepacket.as_ref().map(|w| w.specs()).unwrap_or_default();
            let suites = validation_suites(&pmns, &walk, source, config.encoding, config.steps, &specs)?;
            let mut t = Table::new(&["suite", "measured", "tolerance", "status"]);
            for s in suites {
                passed &= s.passed;
                t.rows.push(vec![
                    Cell::Text(s.name),
                    Cell::Num(s.measured),
                    Cell::Num(s.tolerance),
                    Cell::Text(if s.passed { "pass" } else { "FAIL" }.into()),
                ]);
            }
            t
        }
    };

    Ok(RunOutput {
        config: config.clone(),
        walk,
        warnings,
        table,
        passed,
    })
}

fn map_params_table(config: &RunConfig, walk: &WalkParams, warnings: &[RegimeWarning]) -> Result<Table> {
    let mut t = Table::new(&["quantity", "value"]);
    let mut push = |name: &str, cell: Cell| t.rows.push(vec![Cell::Text(name.into()), cell]);
    for (j, theta) in walk.theta.iter().enumerate() {
        push(&format!("theta{}", j + 1), Cell::Num(*theta));
    }
    push("ktilde", Cell::Num(walk.ktilde));
    if let Some(dt) = walk.dt_seconds {
        push("dt_seconds", Cell::Num(dt));
    }
    if let Some(a) = walk.a_meters {
        push("a_meters", Cell::Num(a));
    }
    let phases = walk.phases();
    for (j, phi) in phases.iter().enumerate() {
        push(&format!("phi{}", j + 1), Cell::Num(*phi));
    }
    match step_frequencies(walk) {
        Ok(f) => push("frequency_ratio", Cell::Num(f.ratio)),
        Err(e) => push("frequency_ratio", Cell::Text(e.to_string().replace(',', ";"))),
    }
    if let Parameters::Physical(PhysicalInput::Splittings { params, .. }) = &config.parameters {
        push("splitting_ratio", Cell::Num(params.dm31_sq / params.dm21_sq));
    }
    if let Some(dt) = walk.dt_seconds {
        for (j, m) in implied_masses_ev(&walk.theta, dt).iter().enumerate() {
            push(&format!("mass{}_ev", j + 1), Cell::Num(*m));
        }
    }
    let table = encoding_table(config.encoding.name())?;
    for (i, label) in table.labels.iter().enumerate() {
        push(&format!("label.zeta{}", i + 1), Cell::Text(label.to_string()));
    }
    for w in warnings {
        push(&format!("warning.{}", w.quantity), Cell::Num(w.value));
    }
    Ok(t)
}

/// CSV: `#` comment lines with the resolved configuration, a column header,
/// then one line per row.
pub fn render_csv(output: &RunOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# nuwalk {} {}", env!("CARGO_PKG_VERSION"), output.config.mode);
    for line in output.config.describe() {
        let _ = writeln!(s, "# {line}");
    }
    let w = &output.walk;
    let _ = writeln!(
        s,
        "# resolved.theta = [{:.16e}, {:.16e}, {:.16e}]",
        w.theta[0], w.theta[1], w.theta[2]
    );
    let _ = writeln!(s, "# resolved.ktilde = {:.16e}", w.ktilde);
    for warning in &output.warnings {
        let _ = writeln!(s, "# warning: {warning}");
    }
    let _ = writeln!(s, "{}", output.table.columns.join(","));
    for row in &output.table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

/// JSON: `{"config": {...}, "series": [{column: value, ...}, ...]}`.
pub fn render_json(output: &RunOutput) -> String {
    let mut config = serde_json::to_value(&output.config).expect("config serializes to JSON");
    if let Value::Object(map) = &mut config {
        map.insert(
            "resolved_walk".into(),
            serde_json::to_value(output.walk).expect("walk serializes to JSON"),
        );
        map.insert(
            "warnings".into(),
            Value::Array(output.warnings.iter().map(|w| Value::String(w.to_string())).collect()),
        );
    }
    let series: Vec<Value> = output
        .table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (name, cell) in output.table.columns.iter().zip(row) {
                obj.insert(name.clone(), cell.json());
            }
            Value::Object(obj)
        })
        .collect();
    let mut root = Map::new();
    root.insert("config".into(), config);
    root.insert("series".into(), Value::Array(series));
    let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("JSON renders");
    text.push('\n');
    text
}

pub fn render(output: &RunOutput) -> String {
    match output.config.output.format {
        Format::Csv => render_csv(output),
        Format::Json => render_json(output),
    }
}

/// Executes the run and writes the rendered output to the configured path,
/// or returns it when no path is set.
pub fn run(config: &RunConfig) -> Result<(RunOutput, Option<String>)> {
    let output = execute(config)?;
    let text = render(&output);
    match &output.config.output.path {
        Some(path) => {
            std::fs::write(path, &text).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            Ok((output, None))
        }
        None => Ok((output, Some(text))),
    }
}
