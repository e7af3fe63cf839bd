//! Transitive closure of influence relations.

use std::collections::{BTreeSet, VecDeque};

use crate::graph::{BoolMatrix, FactorGraph, GraphError};

/// Warshall's algorithm over the bitset rows.
///
/// The pivot `k` is the outer loop; whenever `i -> k` holds, row `k` is
/// OR-ed into row `i`, which covers the inner `j` loop a word at a time.
/// The diagonal is only set when the relation has a cycle.
pub fn transitive_closure(m: &BoolMatrix) -> BoolMatrix {
    let mut out = m.clone();
    let n = out.len();
    for k in 0..n {
        for i in 0..n {
            if out.get(i, k) {
                out.or_row_into(k, i);
            }
        }
    }
    out
}

/// Checks `m(i,j) ∧ m(j,k) ⇒ m(i,k)` for every triple.
pub fn is_transitive(m: &BoolMatrix) -> bool {
    let n = m.len();
    for i in 0..n {
        for j in 0..n {
            if !m.get(i, j) {
                continue;
            }
            for k in 0..n {
                if m.get(j, k) && !m.get(i, k) {
                    return false;
                }
            }
        }
    }
    true
}

/// Factors reachable from `from` by a path of at least one edge, found by
/// breadth-first search over the graph's edge list.
pub fn reachable(graph: &FactorGraph, from: &str) -> Result<BTreeSet<String>, GraphError> {
    let start = graph
        .index_of(from)
        .ok_or_else(|| GraphError::UnknownFactor(from.to_string()))?;
    let mut seen = vec![false; graph.len()];
    let mut queue: VecDeque<usize> = graph.successors(start).collect();
    for &s in &queue {
        seen[s] = true;
    }
    while let Some(node) = queue.pop_front() {
        for next in graph.successors(node) {
            if !seen[next] {
                seen[next] = true;
                queue.push_back(next);
            }
        }
    }
    let factors = graph.factors();
    Ok(seen
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(i, _)| factors[i].id.clone())
        .collect())
}

/// Cells set in the closure but not in the original relation.
pub fn closure_delta(m: &BoolMatrix, closure: &BoolMatrix) -> Vec<(usize, usize)> {
    closure.true_cells().filter(|&(i, j)| !m.get(i, j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{canonical_factor_graph, Factor, FactorKind};

    fn ids(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn canonical_closure_adds_priority_column() {
        let g = canonical_factor_graph();
        let m = g.adjacency_matrix();
        let c = transitive_closure(&m);
        let delta: Vec<_> = closure_delta(&m, &c)
            .into_iter()
            .map(|(i, j)| (m.order()[i].as_str(), m.order()[j].as_str()))
            .collect();
        assert_eq!(delta, vec![("N1", "N5"), ("N2", "N5"), ("N3", "N5")]);
        for r in ["N1", "N2", "N3"] {
            assert_eq!(c.row_set(r).unwrap(), ids(&["N", "N4", "N5"]));
        }
        assert_eq!(c.column_set("N5").unwrap(), ids(&["N1", "N2", "N3", "N4"]));
        // input left untouched
        assert_eq!(m, g.adjacency_matrix());
    }

    #[test]
    fn zero_and_chain() {
        let order: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let z = BoolMatrix::zeros(order.clone());
        assert_eq!(transitive_closure(&z), z);
        assert!(is_transitive(&z));
        assert!(is_transitive(&BoolMatrix::zeros(Vec::new())));

        let chain = BoolMatrix::from_rows(
            order,
            &[
                vec![false, true, false],
                vec![false, false, true],
                vec![false, false, false],
            ],
        )
        .unwrap();
        let c = transitive_closure(&chain);
        assert!(c.get(0, 2));
        assert_eq!(c.count_true(), 3);
    }

    #[test]
    fn canonical_is_not_transitive() {
        let m = canonical_factor_graph().adjacency_matrix();
        assert!(!is_transitive(&m));
        assert!(is_transitive(&transitive_closure(&m)));
    }

    #[test]
    fn cycle_sets_diagonal() {
        let g = FactorGraph::new(
            vec![
                Factor::new("a", "a", FactorKind::Dependent),
                Factor::new("b", "b", FactorKind::Dependent),
            ],
            &[("a", "b"), ("b", "a")],
        )
        .unwrap();
        let c = transitive_closure(&g.adjacency_matrix());
        assert!(c.get(0, 0) && c.get(1, 1));
        assert_eq!(reachable(&g, "a").unwrap(), ids(&["a", "b"]));
    }

    #[test]
    fn reachability_examples() {
        let g = canonical_factor_graph();
        assert_eq!(reachable(&g, "N1").unwrap(), ids(&["N", "N4", "N5"]));
        assert_eq!(reachable(&g, "N5").unwrap(), ids(&[]));
        assert_eq!(reachable(&g, "N4").unwrap(), ids(&["N5"]));
        assert!(reachable(&g, "nope").is_err());
    }

    #[test]
    fn closure_beyond_one_word() {
        // 0 -> 1 -> ... -> 99 crosses the 64-bit row boundary
        let n = 100;
        let order: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
        let mut m = BoolMatrix::zeros(order);
        for i in 0..n - 1 {
            m.set(i, i + 1, true);
        }
        let c = transitive_closure(&m);
        assert_eq!(c.count_true(), n * (n - 1) / 2);
        assert!(c.get(0, n - 1) && !c.get(n - 1, 0));
    }
}
