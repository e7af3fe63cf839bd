//! Shared generators and independent oracles for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;

use riskgraph::graph::{BoolMatrix, Factor, FactorGraph, FactorKind};
use riskgraph::register::{FrequencyClass, Mitigation, Rate, Risk, RiskKind, RiskRegister, RiskType};

pub fn freq() -> impl Strategy<Value = FrequencyClass> {
    (0usize..5).prop_map(|i| FrequencyClass::ALL[i])
}

pub fn probability() -> impl Strategy<Value = f64> {
    prop_oneof![
        (1u32..100).prop_map(f64::from),
        (0.0f64..100.0).prop_filter("open interval", |p| *p > 0.0),
    ]
}

pub fn kind() -> impl Strategy<Value = RiskKind> {
    prop_oneof![
        3 => (0usize..9).prop_map(|i| RiskKind::BUILTIN[i].clone()),
        1 => "[a-z]{3,8}( [a-z]{2,6})?"
            .prop_filter("not a built-in name", |s| {
                matches!(riskgraph::classify_type(s), Ok(RiskKind::Custom(_)))
            })
            .prop_map(RiskKind::Custom),
    ]
}

fn rate() -> impl Strategy<Value = Rate> {
    ((0u32..50).prop_map(f64::from), "hour|day|week").prop_map(|(c, p)| Rate::new(c, p))
}

fn mitigation() -> impl Strategy<Value = Mitigation> {
    ("[ -~]{0,16}", freq(), proptest::option::of(rate())).prop_map(|(description, post_frequency, post_rate)| {
        Mitigation {
            description,
            post_frequency,
            post_rate,
        }
    })
}

/// A valid risk with default severity weight; id is assigned by the caller.
pub fn risk_body() -> impl Strategy<Value = Risk> {
    (
        "[ -~]{0,24}",
        kind(),
        probability(),
        freq(),
        proptest::option::of(rate()),
        proptest::option::of(mitigation()),
        proptest::option::of("[a-z]{3,10}"),
    )
        .prop_map(|(title, kind, probability, frequency, observed_rate, mitigation, phase)| Risk {
            id: String::new(),
            title,
            risk_type: RiskType::new(kind),
            probability,
            frequency,
            observed_rate,
            mitigation,
            phase,
        })
}

/// Valid registers with unique ids and one consistent weight per kind.
pub fn register(max: usize) -> impl Strategy<Value = RiskRegister> {
    (
        "[A-Za-z ]{1,20}",
        proptest::collection::vec((risk_body(), "[A-Z]{1,3}"), 0..=max),
        proptest::collection::vec(prop_oneof![Just(1.0), (1u32..=100).prop_map(|w| f64::from(w) / 100.0)], 16),
    )
        .prop_map(|(name, bodies, weights)| {
            let mut kinds: Vec<RiskKind> = Vec::new();
            let risks = bodies
                .into_iter()
                .enumerate()
                .map(|(i, (mut r, prefix))| {
                    r.id = format!("{prefix}{i}");
                    let slot = kinds.iter().position(|k| *k == r.risk_type.kind).unwrap_or_else(|| {
                        kinds.push(r.risk_type.kind.clone());
                        kinds.len() - 1
                    });
                    r.risk_type.severity_weight = weights[slot % weights.len()];
                    r
                })
                .collect();
            RiskRegister::new(name, risks)
        })
}

pub fn square_matrix(max: usize) -> impl Strategy<Value = BoolMatrix> {
    (0..=max).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(proptest::bool::weighted(0.2), n), n).prop_map(move |rows| {
            let order = (0..n).map(|i| format!("f{i}")).collect();
            BoolMatrix::from_rows(order, &rows).unwrap()
        })
    })
}

/// Random simple digraph (no self-loops) on up to `max` factors.
pub fn graph(max: usize) -> impl Strategy<Value = FactorGraph> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.2), n * n).prop_map(move |cells| {
            let factors = (0..n)
                .map(|i| Factor::new(format!("F{i}"), format!("Factor {i}"), FactorKind::Dependent))
                .collect();
            let edges: Vec<(String, String)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j && cells[i * n + j])
                .map(|(i, j)| (format!("F{i}"), format!("F{j}")))
                .collect();
            FactorGraph::new(factors, &edges).unwrap()
        })
    })
}

/// Reachability by explicit depth-first path extension over matrix cells:
/// (i, j) is set iff some walk of length 1..=n leads from i to j.
pub fn walk_closure(m: &BoolMatrix) -> Vec<Vec<bool>> {
    let n = m.len();
    let mut out = vec![vec![false; n]; n];
    for start in 0..n {
        let mut stack: Vec<usize> = (0..n).filter(|&j| m.get(start, j)).collect();
        while let Some(v) = stack.pop() {
            if out[start][v] {
                continue;
            }
            out[start][v] = true;
            stack.extend((0..n).filter(|&j| m.get(v, j) && !out[start][j]));
        }
    }
    out
}

pub fn ids(v: &[&str]) -> BTreeSet<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Independent recomputation of the impact formula.
pub fn oracle_impact(r: &Risk, f: FrequencyClass) -> f64 {
    let fw = [0.1, 0.3, 0.5, 0.7, 0.9][f as usize - 1];
    r.risk_type.severity_weight * (r.probability / 100.0) * fw
}

/// Ranking oracle: ids ordered by oracle impact descending, then id.
pub fn oracle_ranking(reg: &RiskRegister) -> Vec<String> {
    let mut v: Vec<(f64, String)> = reg
        .risks
        .iter()
        .map(|r| (oracle_impact(r, r.frequency), r.id.clone()))
        .collect();
    v.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    v.into_iter().map(|(_, id)| id).collect()
}

/// Structural check of the DOT subset emitted by the exporter:
/// `digraph { stmt* }` where each statement is a quoted node with an
/// attribute list or a quoted edge with an optional attribute list.
pub fn check_dot(text: &str) -> Result<(usize, usize), String> {
    let tokens = dot_tokens(text)?;
    let mut it = tokens.iter().peekable();
    if it.next().map(String::as_str) != Some("digraph") {
        return Err("expected 'digraph'".into());
    }
    if it.next().map(String::as_str) != Some("{") {
        return Err("expected '{'".into());
    }
    let (mut nodes, mut edges) = (0, 0);
    loop {
        let tok = it.next().ok_or("unexpected end")?;
        if tok == "}" {
            break;
        }
        if !tok.starts_with('"') {
            return Err(format!("expected quoted id, got {tok}"));
        }
        let is_edge = it.peek().map(|t| t.as_str()) == Some("->");
        if is_edge {
            it.next();
            let to = it.next().ok_or("edge without target")?;
            if !to.starts_with('"') {
                return Err(format!("bad edge target {to}"));
            }
            edges += 1;
        } else {
            nodes += 1;
        }
        if it.peek().map(|t| t.as_str()) == Some("[") {
            it.next();
            loop {
                let key = it.next().ok_or("unterminated attribute list")?;
                if key == "]" {
                    break;
                }
                if it.next().map(String::as_str) != Some("=") {
                    return Err(format!("expected '=' after {key}"));
                }
                it.next().ok_or("missing attribute value")?;
                if it.peek().map(|t| t.as_str()) == Some(",") {
                    it.next();
                }
            }
        }
        if it.next().map(String::as_str) != Some(";") {
            return Err("expected ';'".into());
        }
    }
    if it.next().is_some() {
        return Err("trailing tokens".into());
    }
    Ok((nodes, edges))
}

fn dot_tokens(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '{' | '}' | '[' | ']' | ';' | '=' | ',' => {
                out.push(c.to_string());
                chars.next();
            }
            '-' => {
                chars.next();
                if chars.next() != Some('>') {
                    return Err("expected '->'".into());
                }
                out.push("->".into());
            }
            '"' => {
                let mut s = String::from('"');
                chars.next();
                loop {
                    match chars.next().ok_or("unterminated string")? {
                        '\\' => {
                            s.push('\\');
                            s.push(chars.next().ok_or("dangling escape")?);
                        }
                        '"' => break,
                        ch => s.push(ch),
                    }
                }
                s.push('"');
                out.push(s);
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(s);
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}
