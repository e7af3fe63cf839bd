//! Browser bindings for the riskgraph demo page.
//!
//! Each exported function takes JSON text and returns JSON text, so the page
//! needs no bundler or generated type definitions. The `*_json` functions hold
//! the logic and are plain Rust; the `#[wasm_bindgen]` wrappers only convert
//! errors into JS exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use riskgraph::assessment::{prioritize_by, RankBasis};
use riskgraph::closure::{closure_delta, is_transitive, transitive_closure};
use riskgraph::export::{export_csv, render_matrix, to_dot};
use riskgraph::graph::{canonical_factor_graph, literal_factor_graph, parse_graph, FactorGraph};
use riskgraph::predictor::{monte_carlo_success, project_success_rate};
use riskgraph::register::{parse_register, ParseOptions, RiskRegister};

const OPTIONS: ParseOptions = ParseOptions { lenient: true };

#[derive(Serialize)]
struct NodeView {
    id: String,
    name: String,
    kind: &'static str,
    layer: usize,
    slot: usize,
}

#[derive(Serialize)]
struct MatrixView {
    order: Vec<String>,
    nodes: Vec<NodeView>,
    relation: Vec<Vec<bool>>,
    closure: Vec<Vec<bool>>,
    /// Cells set by the closure only, as `[row, column]`.
    added: Vec<[usize; 2]>,
    relation_is_transitive: bool,
    relation_text: String,
    closure_text: String,
    dot: String,
}

/// Longest-path layering from the sources. Nodes on a cycle stop at `n - 1`.
fn layers(graph: &FactorGraph) -> Vec<usize> {
    let n = graph.len();
    let mut layer = vec![0usize; n];
    for _ in 0..n {
        let mut changed = false;
        for (i, j) in graph.edge_indices() {
            if layer[j] < layer[i] + 1 && layer[i] + 1 < n {
                layer[j] = layer[i] + 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    layer
}

fn load_graph(graph_json: &str, paper_literal: bool) -> Result<FactorGraph, String> {
    if graph_json.trim().is_empty() {
        return Ok(if paper_literal {
            literal_factor_graph()
        } else {
            canonical_factor_graph()
        });
    }
    Ok(parse_graph(graph_json, OPTIONS)
        .map_err(|e| e.to_string())?
        .unwrap_or_else(canonical_factor_graph))
}

/// Relation matrix, its closure and a layered node layout. An empty
/// `graph_json` selects the built-in model.
pub fn matrix_view_json(graph_json: &str, paper_literal: bool) -> Result<String, String> {
    let graph = load_graph(graph_json, paper_literal)?;
    let relation = graph.adjacency_matrix();
    let closure = transitive_closure(&relation);
    let layer = layers(&graph);
    let mut slots = vec![0usize; graph.len()];
    let nodes = graph
        .factors()
        .iter()
        .zip(&layer)
        .map(|(f, &l)| {
            let slot = slots[l];
            slots[l] += 1;
            NodeView {
                id: f.id.clone(),
                name: f.name.clone(),
                kind: f.kind.name(),
                layer: l,
                slot,
            }
        })
        .collect();
    let view = MatrixView {
        order: graph.order(),
        nodes,
        relation: relation.rows(),
        closure: closure.rows(),
        added: closure_delta(&relation, &closure)
            .into_iter()
            .map(|(i, j)| [i, j])
            .collect(),
        relation_is_transitive: is_transitive(&relation),
        relation_text: render_matrix(&relation),
        closure_text: render_matrix(&closure),
        dot: to_dot(&graph, Some(&closure)).map_err(|e| e.to_string())?,
    };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

#[derive(Serialize)]
struct RowView {
    rank: usize,
    id: String,
    title: String,
    risk_type: String,
    probability: f64,
    frequency: &'static str,
    impact: f64,
    residual_impact: Option<f64>,
}

#[derive(Serialize)]
struct AssessView {
    project: String,
    rows: Vec<RowView>,
    analytic_success: f64,
    csv: String,
}

fn load_register(register_json: &str) -> Result<RiskRegister, String> {
    parse_register(register_json, OPTIONS).map_err(|e| e.to_string())
}

/// Prioritized rows plus the analytic success rate.
pub fn assess_json(register_json: &str, residual: bool) -> Result<String, String> {
    let reg = load_register(register_json)?;
    let basis = if residual {
        RankBasis::Residual
    } else {
        RankBasis::Inherent
    };
    let ranked = prioritize_by(&reg, basis).map_err(|e| e.to_string())?;
    let estimate = project_success_rate(&reg, residual).map_err(|e| e.to_string())?;
    let rows = ranked
        .iter()
        .map(|a| {
            let risk = reg.get(&a.risk_id).expect("assessment ids come from the register");
            RowView {
                rank: a.priority,
                id: risk.id.clone(),
                title: risk.title.clone(),
                risk_type: risk.risk_type.kind.name().to_string(),
                probability: risk.probability,
                frequency: risk.frequency.name(),
                impact: a.impact.value,
                residual_impact: a.residual_impact.map(|r| r.value),
            }
        })
        .collect();
    let view = AssessView {
        project: reg.project_name,
        rows,
        analytic_success: estimate.analytic,
        csv: export_csv(&ranked),
    };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

/// Analytic and sampled success estimate.
pub fn predict_json(register_json: &str, trials: u32, seed: u32, residual: bool) -> Result<String, String> {
    let reg = load_register(register_json)?;
    let est = monte_carlo_success(&reg, u64::from(trials), u64::from(seed), residual)
        .map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&est).expect("estimate serializes"))
}

#[wasm_bindgen(js_name = matrixView)]
pub fn matrix_view(graph_json: &str, paper_literal: bool) -> Result<String, JsValue> {
    matrix_view_json(graph_json, paper_literal).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn assess(register_json: &str, residual: bool) -> Result<String, JsValue> {
    assess_json(register_json, residual).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn predict(register_json: &str, trials: u32, seed: u32, residual: bool) -> Result<String, JsValue> {
    predict_json(register_json, trials, seed, residual).map_err(|e| JsValue::from_str(&e))
}
