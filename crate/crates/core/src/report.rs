// Copyright 2026 The unscathed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Result records, uncertainty formatting and the summary tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regions::{compose_cn, compose_p, region_catalog, CoefficientMode, QuadrantSignature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Cubature,
    McIntegration,
    McSimulation,
    CartesianCheck,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Cubature, Method::McIntegration, Method::McSimulation, Method::CartesianCheck];

    pub fn label(self) -> &'static str {
        match self {
            Method::Cubature => "cubature",
            Method::McIntegration => "mc-integration",
            Method::McSimulation => "mc-simulation",
            Method::CartesianCheck => "cartesian-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UncertaintyKind {
    #[serde(rename = "error-bound")]
    ErrorBound,
    #[serde(rename = "1σ")]
    OneSigma,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecordMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("uncertainty must be finite and non-negative, got {0}")]
    Uncertainty(f64),
    #[error("value must be finite, got {0}")]
    Value(f64),
    #[error("malformed record on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One computed quantity: a region (by signature, e.g. "I,IV"), "c2".."c5",
/// "P" or "mean-shooters".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub quantity: String,
    pub method: Method,
    pub value: f64,
    pub uncertainty: f64,
    pub uncertainty_kind: UncertaintyKind,
    #[serde(default)]
    pub metadata: RecordMetadata,
}

impl ResultRecord {
    pub fn new(
        quantity: impl Into<String>,
        method: Method,
        value: f64,
        uncertainty: f64,
        uncertainty_kind: UncertaintyKind,
        metadata: RecordMetadata,
    ) -> Result<Self, ReportError> {
        if !value.is_finite() {
            return Err(ReportError::Value(value));
        }
        if !(uncertainty >= 0.0 && uncertainty.is_finite()) {
            return Err(ReportError::Uncertainty(uncertainty));
        }
        Ok(ResultRecord { quantity: quantity.into(), method, value, uncertainty, uncertainty_kind, metadata })
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// Parses a JSON-lines results file; blank lines are skipped.
pub fn parse_records(text: &str) -> Result<Vec<ResultRecord>, ReportError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ResultRecord =
            serde_json::from_str(line).map_err(|e| ReportError::Parse { line: i + 1, message: e.to_string() })?;
        if !(rec.uncertainty >= 0.0) {
            return Err(ReportError::Parse { line: i + 1, message: "negative uncertainty".into() });
        }
        out.push(rec);
    }
    Ok(out)
}

/// Parenthesized uncertainty notation: the uncertainty is rounded to two
/// significant digits (one when the second is zero) and printed in units of
/// the value's last displayed digit. Zero uncertainty prints the value as is.
pub fn format_uncertainty(value: f64, uncertainty: f64) -> String {
    if !(uncertainty > 0.0) || !uncertainty.is_finite() || !value.is_finite() {
        return format!("{value}");
    }
    let mut d = uncertainty.log10().floor() as i32 - 1;
    let mut q = (uncertainty / 10f64.powi(d)).round() as u64;
    if q >= 100 {
        q = (q as f64 / 10.0).round() as u64;
        d += 1;
    }
    if q % 10 == 0 {
        q /= 10;
        d += 1;
    }
    if d < 0 {
        format!("{:.*}({q})", (-d) as usize, value)
    } else {
        let unit = 10f64.powi(d);
        format!("{:.0}({})", (value / unit).round() * unit, q * 10u64.pow(d as u32))
    }
}

/// A value with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub value: f64,
    pub uncertainty: f64,
    pub kind: UncertaintyKind,
    /// True when derived from stored region values rather than stored directly.
    pub composed: bool,
}

impl Cell {
    fn of(r: &ResultRecord) -> Self {
        Cell { value: r.value, uncertainty: r.uncertainty, kind: r.uncertainty_kind, composed: false }
    }

    pub fn formatted(&self) -> String {
        format_uncertainty(self.value, self.uncertainty)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<Cell>>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tables {
    pub estimates_of_p: Table,
    pub coefficients: Table,
    pub regions: Table,
    /// Stored c_n or P values that disagree with the composition of the
    /// stored region values by more than the combined uncertainty.
    pub inconsistencies: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Json,
    Csv,
    #[default]
    Markdown,
}

const CN_NAMES: [&str; 4] = ["c2", "c3", "c4", "c5"];

/// Latest record per (quantity, method).
fn latest(records: &[ResultRecord]) -> BTreeMap<(String, Method), &ResultRecord> {
    let mut m = BTreeMap::new();
    for r in records {
        m.insert((r.quantity.clone(), r.method), r);
    }
    m
}

fn combine_uncertainty(kind: UncertaintyKind, parts: impl Iterator<Item = f64>) -> f64 {
    match kind {
        UncertaintyKind::ErrorBound => parts.sum(),
        UncertaintyKind::OneSigma => parts.map(|u| u * u).sum::<f64>().sqrt(),
    }
}

/// c_2..c_5 and P composed from one method's region records, if complete.
fn composed(
    store: &BTreeMap<(String, Method), &ResultRecord>,
    method: Method,
    mode: CoefficientMode,
) -> Option<([Cell; 4], Cell)> {
    let mut values = BTreeMap::new();
    let mut unc = BTreeMap::new();
    let mut kind = None;
    for spec in region_catalog() {
        let r = store.get(&(spec.signature.to_string(), method))?;
        values.insert(spec.signature.clone(), r.value);
        unc.insert(spec.signature.clone(), r.uncertainty);
        kind = Some(r.uncertainty_kind);
    }
    let kind = kind?;
    let c = compose_cn(&values, mode).ok()?;
    let mut cells = [Cell { value: 0.0, uncertainty: 0.0, kind, composed: true }; 4];
    for (slot, n) in (2..=5usize).enumerate() {
        let weights = crate::regions::composition(n, mode);
        let u = combine_uncertainty(kind, weights.iter().map(|(s, w)| w * unc[s]));
        cells[slot] = Cell { value: c[slot], uncertainty: u, kind, composed: true };
    }
    let p = Cell {
        value: compose_p(&c),
        uncertainty: combine_uncertainty(kind, cells.iter().map(|c| c.uncertainty)),
        kind,
        composed: true,
    };
    Some((cells, p))
}

fn disagree(a: &Cell, b: &Cell) -> bool {
    let combined = match (a.kind, b.kind) {
        (UncertaintyKind::OneSigma, UncertaintyKind::OneSigma) => a.uncertainty.hypot(b.uncertainty),
        _ => a.uncertainty + b.uncertainty,
    };
    (a.value - b.value).abs() > combined.max(1e-15 * a.value.abs().max(b.value.abs()))
}

/// Builds the three summary tables from stored records. Stored c_n and P
/// take precedence; otherwise they are composed from the region records.
pub fn assemble_tables(records: &[ResultRecord], mode: CoefficientMode) -> Tables {
    let store = latest(records);
    let mut inconsistencies = Vec::new();
    let mut p_rows = Vec::new();
    let mut c_rows = Vec::new();
    for method in Method::ALL {
        let comp = composed(&store, method, mode);
        let mut cn: Vec<Option<Cell>> = Vec::new();
        for (slot, name) in CN_NAMES.iter().enumerate() {
            let stored = store.get(&(name.to_string(), method)).map(|r| Cell::of(r));
            let from_regions = comp.as_ref().map(|(c, _)| c[slot]);
            if let (Some(s), Some(c)) = (&stored, &from_regions) {
                if disagree(s, c) {
                    inconsistencies.push(format!(
                        "{} {name}: stored {} vs composed {}",
                        method.label(),
                        s.formatted(),
                        c.formatted()
                    ));
                }
            }
            cn.push(stored.or(from_regions));
        }
        let stored_p = store.get(&("P".to_string(), method)).map(|r| Cell::of(r));
        let comp_p = comp.as_ref().map(|(_, p)| *p);
        if let (Some(s), Some(c)) = (&stored_p, &comp_p) {
            if disagree(s, c) {
                inconsistencies.push(format!(
                    "{} P: stored {} vs composed {}",
                    method.label(),
                    s.formatted(),
                    c.formatted()
                ));
            }
        }
        let p = stored_p.or(comp_p);
        if cn.iter().any(Option::is_some) {
            c_rows.push((method.label().to_string(), cn));
        }
        if p.is_some() {
            p_rows.push((method.label().to_string(), vec![p]));
        }
    }
    let region_methods: Vec<Method> = Method::ALL
        .into_iter()
        .filter(|m| region_catalog().iter().any(|s| store.contains_key(&(s.signature.to_string(), *m))))
        .collect();
    let region_rows = region_catalog()
        .iter()
        .map(|s| {
            let key = s.signature.to_string();
            let cells = region_methods.iter().map(|m| store.get(&(key.clone(), *m)).map(|r| Cell::of(r))).collect();
            (format!("({key})"), cells)
        })
        .collect();
    Tables {
        estimates_of_p: Table { title: "Estimates of P".into(), columns: vec!["P".into()], rows: p_rows },
        coefficients: Table {
            title: "Inclusion-exclusion coefficients".into(),
            columns: CN_NAMES.iter().map(|s| s.to_string()).collect(),
            rows: c_rows,
        },
        regions: Table {
            title: "Region integrals".into(),
            columns: region_methods.iter().map(|m| m.label().to_string()).collect(),
            rows: region_rows,
        },
        inconsistencies,
    }
}

fn cell_text(c: &Option<Cell>) -> String {
    match c {
        Some(c) if c.composed => format!("{}*", c.formatted()),
        Some(c) => c.formatted(),
        None => String::new(),
    }
}

pub fn render_tables(tables: &Tables, format: TableFormat) -> String {
    let all = [&tables.estimates_of_p, &tables.coefficients, &tables.regions];
    let mut out = String::new();
    match format {
        TableFormat::Json => {
            out = serde_json::to_string_pretty(tables).expect("tables serialize");
            out.push('\n');
        }
        TableFormat::Csv => {
            out.push_str("table,row,column,value,uncertainty,uncertainty_kind,composed,formatted\n");
            for t in all {
                for (row, cells) in &t.rows {
                    for (col, cell) in t.columns.iter().zip(cells) {
                        if let Some(c) = cell {
                            let kind = match c.kind {
                                UncertaintyKind::ErrorBound => "error-bound",
                                UncertaintyKind::OneSigma => "1σ",
                            };
                            let _ = writeln!(
                                out,
                                "\"{}\",\"{row}\",{col},{:e},{:e},{kind},{},{}",
                                t.title,
                                c.value,
                                c.uncertainty,
                                c.composed,
                                c.formatted()
                            );
                        }
                    }
                }
            }
        }
        TableFormat::Markdown => {
            for t in all {
                let _ = writeln!(out, "### {}\n", t.title);
                let _ = writeln!(out, "| | {} |", t.columns.join(" | "));
                let _ = writeln!(out, "|---|{}", "---|".repeat(t.columns.len()));
                for (row, cells) in &t.rows {
                    let texts: Vec<String> = cells.iter().map(cell_text).collect();
                    let _ = writeln!(out, "| {row} | {} |", texts.join(" | "));
                }
                out.push('\n');
            }
            out.push_str("Entries marked * are composed from the region integrals.\n");
            if !tables.inconsistencies.is_empty() {
                out.push_str("\nInconsistencies:\n");
                for line in &tables.inconsistencies {
                    let _ = writeln!(out, "- {line}");
                }
            }
        }
    }
    out
}

/// Signature string used as the quantity name of a region record.
pub fn region_quantity(sig: &QuadrantSignature) -> String {
    sig.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_examples() {
        assert_eq!(format_uncertainty(0.28418556313, 9.6e-10), "0.28418556313(96)");
        assert_eq!(format_uncertainty(0.28418, 1e-5), "0.28418(1)");
        assert_eq!(format_uncertainty(1.5, 0.0), "1.5");
        assert_eq!(format_uncertainty(0.0330563647606, 8.8e-12), "0.0330563647606(88)");
        assert_eq!(format_uncertainty(0.2841817, 6.2e-6), "0.2841817(62)");
        assert_eq!(format_uncertainty(1234.5, 23.0), "1235(23)");
        assert_eq!(format_uncertainty(12345.0, 230.0), "12350(230)");
        assert_eq!(format_uncertainty(0.5, 0.0999), "0.5(1)");
    }

    #[test]
    fn record_validation_and_round_trip() {
        assert!(ResultRecord::new("P", Method::Cubature, 0.3, -1.0, UncertaintyKind::ErrorBound, Default::default())
            .is_err());
        let r = ResultRecord::new(
            "I,IV",
            Method::McIntegration,
            0.028881492960397,
            1.1e-7,
            UncertaintyKind::OneSigma,
            RecordMetadata { seed: Some(3), evaluations: Some(10), converged: None, wall_time_s: Some(0.5) },
        )
        .unwrap();
        let line = r.to_json_line();
        assert!(line.contains("\"1σ\"") && line.contains("mc-integration"));
        assert_eq!(parse_records(&line).unwrap(), vec![r]);
        assert!(matches!(parse_records("{\"x\":1}"), Err(ReportError::Parse { line: 1, .. })));
    }

    #[test]
    fn composed_tables_and_inconsistency_flag() {
        let mut recs: Vec<ResultRecord> = region_catalog()
            .iter()
            .enumerate()
            .map(|(i, s)| {
                ResultRecord::new(
                    s.signature.to_string(),
                    Method::Cubature,
                    1e-3 * (i + 1) as f64,
                    1e-9,
                    UncertaintyKind::ErrorBound,
                    Default::default(),
                )
                .unwrap()
            })
            .collect();
        let t = assemble_tables(&recs, CoefficientMode::AsPrinted);
        assert!(t.inconsistencies.is_empty());
        let c2 = t.coefficients.rows[0].1[0].unwrap();
        assert!(c2.composed);
        assert!((c2.value - 2.0 * (1e-3 + 2e-3)).abs() < 1e-15);
        recs.push(
            ResultRecord::new("c2", Method::Cubature, 1.0, 1e-9, UncertaintyKind::ErrorBound, Default::default())
                .unwrap(),
        );
        let t = assemble_tables(&recs, CoefficientMode::AsPrinted);
        assert_eq!(t.inconsistencies.len(), 1);
        let md = render_tables(&t, TableFormat::Markdown);
        assert!(md.contains("Inconsistencies") && md.contains("| (I,IV) |"));
        let csv = render_tables(&t, TableFormat::Csv);
        assert!(csv.lines().count() > 12);
        let json: Tables = serde_json::from_str(&render_tables(&t, TableFormat::Json)).unwrap();
        assert_eq!(json, t);
    }
}
