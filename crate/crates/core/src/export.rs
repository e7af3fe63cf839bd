//! Text renderings: DOT graphs, fixed-layout matrices, CSV and reports.
//!
//! Every renderer is a pure function of its inputs and produces the same
//! bytes for equal inputs.

use std::fmt::Write as _;

use thiserror::Error;

use crate::assessment::{Assessment, ImpactScore};
use crate::closure::closure_delta;
use crate::graph::{BoolMatrix, FactorGraph, GraphError};
use crate::predictor::SuccessEstimate;
use crate::register::RiskRegister;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("closure matrix order does not match the graph's factor order")]
    OrderMismatch,
    #[error("assessments do not match the register: {0}")]
    IdMismatch(String),
    #[error("matrix text line {line}: {message}")]
    MatrixSyntax { line: usize, message: String },
    #[error(transparent)]
    Matrix(#[from] GraphError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv row {row}: {message}")]
    CsvField { row: usize, message: String },
}

fn dot_id(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders the graph as a Graphviz digraph.
///
/// Graph edges are solid. When a closure is supplied, pairs it adds beyond
/// the graph's own edges are drawn dashed.
pub fn to_dot(graph: &FactorGraph, highlight_closure: Option<&BoolMatrix>) -> Result<String, ExportError> {
    let base = graph.adjacency_matrix();
    let derived = match highlight_closure {
        Some(c) if c.order() != base.order() => return Err(ExportError::OrderMismatch),
        Some(c) => closure_delta(&base, c),
        None => Vec::new(),
    };
    if graph.is_empty() {
        return Ok("digraph { }\n".to_string());
    }
    let factors = graph.factors();
    let mut out = String::from("digraph {\n");
    for f in factors {
        let _ = writeln!(out, "    {} [label={}];", dot_id(&f.id), dot_id(&f.name));
    }
    for (i, j) in graph.edge_indices() {
        let _ = writeln!(out, "    {} -> {};", dot_id(&factors[i].id), dot_id(&factors[j].id));
    }
    for (i, j) in derived {
        let _ = writeln!(
            out,
            "    {} -> {} [style=dashed];",
            dot_id(&factors[i].id),
            dot_id(&factors[j].id)
        );
    }
    out.push_str("}\n");
    Ok(out)
}

/// Fixed-layout matrix text: a header line of column ids, then one line per
/// row with the row id left-aligned and space-separated 0/1 cells.
///
/// ```text
///    N N1 N2
/// N  0 0 0
/// N1 1 0 0
/// N2 1 0 0
/// ```
pub fn render_matrix(m: &BoolMatrix) -> String {
    let width = m.order().iter().map(String::len).max().unwrap_or(0);
    let mut out = format!("{:width$}", "");
    for id in m.order() {
        out.push(' ');
        out.push_str(id);
    }
    out.push('\n');
    for (i, id) in m.order().iter().enumerate() {
        let _ = write!(out, "{id:width$}");
        for j in 0..m.len() {
            out.push_str(if m.get(i, j) { " 1" } else { " 0" });
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`render_matrix`]. Tolerates extra spaces between tokens.
pub fn parse_matrix(text: &str) -> Result<BoolMatrix, ExportError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(ExportError::MatrixSyntax {
        line: 1,
        message: "missing header line".into(),
    })?;
    let order: Vec<String> = header.split_whitespace().map(str::to_string).collect();
    let mut rows = Vec::with_capacity(order.len());
    for (k, line) in lines.enumerate() {
        let line_no = k + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().unwrap_or_default();
        let expected = order.get(rows.len()).ok_or_else(|| ExportError::MatrixSyntax {
            line: line_no,
            message: "more rows than header columns".into(),
        })?;
        if label != expected {
            return Err(ExportError::MatrixSyntax {
                line: line_no,
                message: format!("row label {label:?} does not match column {expected:?}"),
            });
        }
        let row = tokens
            .map(|t| match t {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(ExportError::MatrixSyntax {
                    line: line_no,
                    message: format!("cell {other:?} is not 0 or 1"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(BoolMatrix::from_rows(order, &rows)?)
}

/// Column order of [`export_csv`].
pub const CSV_HEADER: [&str; 8] = [
    "rank",
    "risk_id",
    "type_weight",
    "probability_fraction",
    "frequency_weight",
    "impact",
    "residual_frequency_weight",
    "residual_impact",
];

/// One row per assessment in the given order; residual columns are empty
/// for risks without a mitigation. Floats use the shortest exact form.
pub fn export_csv(assessments: &[Assessment]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("write to Vec");
    for a in assessments {
        let (rfw, ri) = match &a.residual_impact {
            Some(r) => (r.frequency_weight.to_string(), r.value.to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([
            a.priority.to_string(),
            a.risk_id.clone(),
            a.impact.type_weight.to_string(),
            a.impact.probability_fraction.to_string(),
            a.impact.frequency_weight.to_string(),
            a.impact.value.to_string(),
            rfw,
            ri,
        ])
        .expect("write to Vec");
    }
    String::from_utf8(w.into_inner().expect("flush to Vec")).expect("csv output is utf-8")
}

/// Reads [`export_csv`] output back into assessments.
pub fn parse_csv(text: &str) -> Result<Vec<Assessment>, ExportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(ExportError::CsvField {
            row: 0,
            message: format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let row = k + 1;
        let num = |idx: usize| -> Result<f64, ExportError> {
            record[idx].parse::<f64>().map_err(|e| ExportError::CsvField {
                row,
                message: format!("{}: {e}", CSV_HEADER[idx]),
            })
        };
        let priority = record[0].parse::<usize>().map_err(|e| ExportError::CsvField {
            row,
            message: format!("rank: {e}"),
        })?;
        let impact = ImpactScore {
            value: num(5)?,
            type_weight: num(2)?,
            probability_fraction: num(3)?,
            frequency_weight: num(4)?,
        };
        let residual_impact = match (record[6].is_empty(), record[7].is_empty()) {
            (true, true) => None,
            (false, false) => Some(ImpactScore {
                value: num(7)?,
                frequency_weight: num(6)?,
                ..impact
            }),
            _ => {
                return Err(ExportError::CsvField {
                    row,
                    message: "residual columns must both be set or both empty".into(),
                })
            }
        };
        out.push(Assessment {
            risk_id: record[1].to_string(),
            impact,
            residual_impact,
            priority,
        });
    }
    Ok(out)
}

fn check_correspondence(register: &RiskRegister, assessments: &[Assessment]) -> Result<(), ExportError> {
    if register.risks.len() != assessments.len() {
        return Err(ExportError::IdMismatch(format!(
            "{} risks but {} assessments",
            register.risks.len(),
            assessments.len()
        )));
    }
    let mut ids: Vec<&str> = register.risks.iter().map(|r| r.id.as_str()).collect();
    let mut assessed: Vec<&str> = assessments.iter().map(|a| a.risk_id.as_str()).collect();
    ids.sort_unstable();
    assessed.sort_unstable();
    if let Some((r, a)) = ids.iter().zip(&assessed).find(|(r, a)| r != a) {
        return Err(ExportError::IdMismatch(format!("register has {r:?}, assessments have {a:?}")));
    }
    Ok(())
}

fn fixed(x: f64) -> String {
    format!("{x:.4}")
}

/// Prioritized table: one line per risk, sorted by rank.
pub fn assessment_table(register: &RiskRegister, assessments: &[Assessment]) -> Result<String, ExportError> {
    check_correspondence(register, assessments)?;
    if assessments.is_empty() {
        return Ok("no risks\n".to_string());
    }
    let mut sorted: Vec<&Assessment> = assessments.iter().collect();
    sorted.sort_by_key(|a| a.priority);

    let header = ["Rank", "ID", "Type", "Probability", "Frequency", "Impact", "Residual", "Title"];
    let mut rows: Vec<[String; 8]> = Vec::with_capacity(sorted.len());
    for a in sorted {
        let risk = register.get(&a.risk_id).expect("checked above");
        rows.push([
            a.priority.to_string(),
            risk.id.clone(),
            risk.risk_type.kind.name().to_string(),
            format!("{}%", risk.probability),
            risk.frequency.name().to_string(),
            fixed(a.impact.value),
            a.residual_impact.map_or_else(|| "-".to_string(), |r| fixed(r.value)),
            risk.title.clone(),
        ]);
    }
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let mut l = String::new();
        for (k, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if k > 0 {
                l.push_str("  ");
            }
            if k + 1 == cells.len() {
                l.push_str(cell);
            } else {
                let _ = write!(l, "{cell:<w$}");
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(&header);
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&cells);
    }
    Ok(out)
}

/// Full report: project header, prioritized table, success estimate footer.
pub fn report(
    register: &RiskRegister,
    assessments: &[Assessment],
    estimate: &SuccessEstimate,
) -> Result<String, ExportError> {
    let table = assessment_table(register, assessments)?;
    let mut out = String::new();
    let _ = writeln!(out, "Project: {}", register.project_name);
    let _ = writeln!(out, "Risks: {}", register.risks.len());
    out.push('\n');
    out.push_str(&table);
    out.push('\n');
    let basis = if estimate.use_residual {
        "residual impacts"
    } else {
        "inherent impacts"
    };
    let _ = writeln!(
        out,
        "Success rate (analytic): {:.6}  [{}, {}]",
        estimate.analytic, estimate.model, basis
    );
    if let Some(s) = &estimate.sampled {
        let _ = writeln!(
            out,
            "Success rate (sampled):  {:.6}  [{} trials, seed {}, {}]",
            s.mean, s.trials, s.seed, s.rng
        );
    }
    Ok(out)
}
