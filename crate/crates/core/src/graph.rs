//! Factor-influence graph and its boolean adjacency matrix.

use std::collections::BTreeSet;
use std::fmt;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::register::{check_keys, parse_json, ParseOptions, RegisterError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// The assessed object itself.
    Root,
    /// Set directly from register data.
    Independent,
    /// Derived from other factors.
    Dependent,
}

impl FactorKind {
    pub fn name(self) -> &'static str {
        match self {
            FactorKind::Root => "root",
            FactorKind::Independent => "independent",
            FactorKind::Dependent => "dependent",
        }
    }

    fn from_label(label: &str) -> Option<Self> {
        [FactorKind::Root, FactorKind::Independent, FactorKind::Dependent]
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(label.trim()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub id: String,
    pub name: String,
    pub kind: FactorKind,
}

impl Factor {
    pub fn new(id: impl Into<String>, name: impl Into<String>, kind: FactorKind) -> Self {
        Factor {
            id: id.into(),
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("factor id must be a nonempty token without whitespace (got {0:?})")]
    InvalidId(String),
    #[error("duplicate factor id {0:?}")]
    DuplicateFactor(String),
    #[error("unknown factor id {0:?}")]
    UnknownFactor(String),
    #[error("self-loop on factor {0:?}")]
    SelfLoop(String),
    #[error("duplicate edge {0:?} -> {1:?}")]
    DuplicateEdge(String, String),
    #[error("matrix must be square: {rows} rows for {order} factor ids")]
    NotSquare { rows: usize, order: usize },
    #[error("matrix order does not match the graph's factor order")]
    OrderMismatch,
    #[error("matrix row {row} has {len} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        len: usize,
        expected: usize,
    },
}

pub(crate) fn valid_token(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(char::is_whitespace)
}

/// Directed influence graph with a fixed factor order.
///
/// Edges are kept as index pairs in a sorted set, so iteration follows the
/// factor order of the source and then of the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    factors: Vec<Factor>,
    edges: BTreeSet<(usize, usize)>,
}

impl FactorGraph {
    pub fn empty() -> Self {
        FactorGraph {
            factors: Vec::new(),
            edges: BTreeSet::new(),
        }
    }

    /// Builds a graph; duplicate or dangling edges and self-loops are errors.
    pub fn new<S: AsRef<str>>(factors: Vec<Factor>, edges: &[(S, S)]) -> Result<Self, GraphError> {
        let mut graph = FactorGraph::empty();
        for f in factors {
            graph.push_factor(f)?;
        }
        for (from, to) in edges {
            graph.push_edge(from.as_ref(), to.as_ref())?;
        }
        Ok(graph)
    }

    fn push_factor(&mut self, factor: Factor) -> Result<(), GraphError> {
        if !valid_token(&factor.id) {
            return Err(GraphError::InvalidId(factor.id));
        }
        if self.index_of(&factor.id).is_some() {
            return Err(GraphError::DuplicateFactor(factor.id));
        }
        self.factors.push(factor);
        Ok(())
    }

    fn push_edge(&mut self, from: &str, to: &str) -> Result<(), GraphError> {
        let i = self.require(from)?;
        let j = self.require(to)?;
        if i == j {
            return Err(GraphError::SelfLoop(from.to_string()));
        }
        if !self.edges.insert((i, j)) {
            return Err(GraphError::DuplicateEdge(from.to_string(), to.to_string()));
        }
        Ok(())
    }

    fn require(&self, id: &str) -> Result<usize, GraphError> {
        self.index_of(id)
            .ok_or_else(|| GraphError::UnknownFactor(id.to_string()))
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.id == id)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, id: &str) -> Option<&Factor> {
        self.index_of(id).map(|i| &self.factors[i])
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn order(&self) -> Vec<String> {
        self.factors.iter().map(|f| f.id.clone()).collect()
    }

    /// Edges as index pairs, in factor order.
    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Edges as id pairs, in factor order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges
            .iter()
            .map(|&(i, j)| (self.factors[i].id.as_str(), self.factors[j].id.as_str()))
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(i), Some(j)) => self.edges.contains(&(i, j)),
            _ => false,
        }
    }

    /// Out-neighbor indices of `index`, in factor order.
    pub fn successors(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .range((index, 0)..(index + 1, 0))
            .map(|&(_, j)| j)
    }

    /// Returns a new graph with `factor` appended to the order.
    pub fn add_factor(&self, factor: Factor) -> Result<Self, GraphError> {
        let mut next = self.clone();
        next.push_factor(factor)?;
        Ok(next)
    }

    /// Returns a new graph with the edge `from -> to` added.
    pub fn add_influence(&self, from: &str, to: &str) -> Result<Self, GraphError> {
        let mut next = self.clone();
        next.push_edge(from, to)?;
        Ok(next)
    }

    /// The relational set of a factor: the factors it directly influences.
    pub fn relation_set(&self, id: &str) -> Result<BTreeSet<String>, GraphError> {
        let i = self.require(id)?;
        Ok(self
            .successors(i)
            .map(|j| self.factors[j].id.clone())
            .collect())
    }

    pub fn adjacency_matrix(&self) -> BoolMatrix {
        let mut m = BoolMatrix::zeros(self.order());
        for (i, j) in self.edge_indices() {
            m.set(i, j, true);
        }
        m
    }

    /// Rebuilds a graph from a matrix whose order matches these factors.
    pub fn with_matrix_edges(&self, m: &BoolMatrix) -> Result<Self, GraphError> {
        if m.order() != self.order().as_slice() {
            return Err(GraphError::OrderMismatch);
        }
        let mut next = FactorGraph {
            factors: self.factors.clone(),
            edges: BTreeSet::new(),
        };
        for (i, j) in m.true_cells() {
            if i == j {
                return Err(GraphError::SelfLoop(self.factors[i].id.clone()));
            }
            next.edges.insert((i, j));
        }
        Ok(next)
    }
}

fn canonical_factors() -> Vec<Factor> {
    vec![
        Factor::new("N", "Risk", FactorKind::Root),
        Factor::new("N1", "Risk Type", FactorKind::Independent),
        Factor::new("N2", "Risk Probability", FactorKind::Independent),
        Factor::new("N3", "Risk Frequency", FactorKind::Independent),
        Factor::new("N4", "Risk Impact", FactorKind::Dependent),
        Factor::new("N5", "Risk Priority", FactorKind::Dependent),
    ]
}

/// The six-factor risk assessment model.
///
/// Type, probability and frequency each influence the risk and its impact;
/// impact influences priority. The risk node has no out-edges.
pub fn canonical_factor_graph() -> FactorGraph {
    FactorGraph::new(
        canonical_factors(),
        &[
            ("N1", "N"),
            ("N1", "N4"),
            ("N2", "N"),
            ("N2", "N4"),
            ("N3", "N"),
            ("N3", "N4"),
            ("N4", "N5"),
        ],
    )
    .expect("canonical graph is well formed")
}

/// The model as originally typeset: the three independent factors point only
/// at the risk node, and impact points at priority. Kept for archival
/// comparison; it lacks the edges into impact.
pub fn literal_factor_graph() -> FactorGraph {
    FactorGraph::new(
        canonical_factors(),
        &[("N1", "N"), ("N2", "N"), ("N3", "N"), ("N4", "N5")],
    )
    .expect("literal graph is well formed")
}

/// The closure matrix as originally typeset: column N5 is filled for the
/// independent factors but column N4 is not.
pub fn literal_closure_matrix() -> BoolMatrix {
    let mut m = literal_factor_graph().adjacency_matrix();
    for row in 1..=3 {
        m.set(row, 5, true);
    }
    m
}

/// Square boolean relation over an ordered list of factor ids, stored as
/// one bitset per row.
#[derive(Clone, PartialEq, Eq)]
pub struct BoolMatrix {
    order: Vec<String>,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BoolMatrix {
    pub fn zeros(order: Vec<String>) -> Self {
        let n = order.len();
        let words_per_row = n.div_ceil(64);
        BoolMatrix {
            order,
            words_per_row,
            bits: vec![0; n * words_per_row],
        }
    }

    pub fn from_rows(order: Vec<String>, rows: &[Vec<bool>]) -> Result<Self, GraphError> {
        if rows.len() != order.len() {
            return Err(GraphError::NotSquare {
                rows: rows.len(),
                order: order.len(),
            });
        }
        if let Some(id) = order.iter().find(|id| !valid_token(id)) {
            return Err(GraphError::InvalidId(id.clone()));
        }
        let mut seen = BTreeSet::new();
        if let Some(id) = order.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(GraphError::DuplicateFactor(id.clone()));
        }
        let n = order.len();
        let mut m = BoolMatrix::zeros(order);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::RaggedRow {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
            for (j, &cell) in row.iter().enumerate() {
                m.set(i, j, cell);
            }
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[String] {
        &self.order
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.order.iter().position(|o| o == id)
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.len() && j < self.len(), "cell ({i}, {j}) out of range");
        self.bits[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.len() && j < self.len(), "cell ({i}, {j}) out of range");
        let word = &mut self.bits[i * self.words_per_row + j / 64];
        let mask = 1u64 << (j % 64);
        if value {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    pub fn get_by_id(&self, from: &str, to: &str) -> Option<bool> {
        Some(self.get(self.index_of(from)?, self.index_of(to)?))
    }

    /// `row[dst] |= row[src]`
    pub(crate) fn or_row_into(&mut self, src: usize, dst: usize) {
        let w = self.words_per_row;
        for k in 0..w {
            let v = self.bits[src * w + k];
            self.bits[dst * w + k] |= v;
        }
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Ids of the columns set in row `id`.
    pub fn row_set(&self, id: &str) -> Option<BTreeSet<String>> {
        let i = self.index_of(id)?;
        Some(
            (0..self.len())
                .filter(|&j| self.get(i, j))
                .map(|j| self.order[j].clone())
                .collect(),
        )
    }

    /// Ids of the rows set in column `id`.
    pub fn column_set(&self, id: &str) -> Option<BTreeSet<String>> {
        let j = self.index_of(id)?;
        Some(
            (0..self.len())
                .filter(|&i| self.get(i, j))
                .map(|i| self.order[i].clone())
                .collect(),
        )
    }

    pub fn true_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (0..n).filter(move |&j| self.get(i, j)).map(move |j| (i, j)))
    }

    pub fn count_true(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Cellwise `self ⊆ other`. Matrices of different order are never subsets.
    pub fn is_subset_of(&self, other: &BoolMatrix) -> bool {
        self.order == other.order && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix {:?}", self.order)?;
        for i in 0..self.len() {
            let row: String = (0..self.len())
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {} {}", self.order[i], row)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Graph-definition file: {"factors": [{"id", "name", "kind"}], "edges": [["N1", "N"], ...]}

#[derive(Debug, Error)]
pub enum GraphFileError {
    #[error(transparent)]
    Format(#[from] RegisterError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Deserialize)]
struct RawFactor {
    id: String,
    #[serde(default)]
    name: Option<String>,
    kind: String,
}

/// Reads a graph definition from a JSON document. Returns `None` when the
/// document has no `factors` key, so a plain register file falls back to the
/// caller's default graph. Other top-level keys are ignored.
pub fn parse_graph(text: &str, options: ParseOptions) -> Result<Option<FactorGraph>, GraphFileError> {
    let root = parse_json(text)?;
    let Value::Object(top) = root else {
        return Err(schema("$", "graph file must be a JSON object").into());
    };
    let Some(factors_value) = top.get("factors") else {
        return Ok(None);
    };
    let Value::Array(items) = factors_value else {
        return Err(schema("factors", "expected an array").into());
    };
    let mut factors = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let path = format!("factors[{i}]");
        let Value::Object(obj) = item else {
            return Err(schema(&path, "expected an object").into());
        };
        check_keys(obj, &["id", "name", "kind"], &path, options)?;
        let raw = RawFactor::deserialize(item).map_err(|e| schema(&path, e))?;
        let kind = FactorKind::from_label(&raw.kind).ok_or_else(|| {
            schema(
                format!("{path}.kind"),
                format!("unknown factor kind {:?} (expected root, independent or dependent)", raw.kind),
            )
        })?;
        let name = raw.name.unwrap_or_else(|| raw.id.clone());
        factors.push(Factor::new(raw.id, name, kind));
    }
    let edges: Vec<(String, String)> = match top.get("edges") {
        None | Some(Value::Null) => Vec::new(),
        Some(v) => Vec::<(String, String)>::deserialize(v).map_err(|e| schema("edges", e))?,
    };
    Ok(Some(FactorGraph::new(factors, &edges)?))
}

fn schema(path: impl Into<String>, message: impl fmt::Display) -> RegisterError {
    RegisterError::Schema {
        path: path.into(),
        message: message.to_string(),
    }
}
