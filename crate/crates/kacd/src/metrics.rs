//! Structural Hamming Distance between learned and true graphs with an
//! edge-class breakdown and the normalized score S / (C(n,2)/2).

use crate::graphs::MixedGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShdReport {
    pub extra: usize,
    pub missing: usize,
    pub wrong_mark: usize,
    pub true_edges: usize,
    pub shd: usize,
    pub normalized: f64,
    pub n_nodes: usize,
}

/// Per-pair classification: both with identical marks -> true edge, both
/// with any differing endpoint mark -> one wrong_mark, only in the true
/// graph -> missing, only in the learned graph -> extra.
pub fn classify_edges(g_true: &MixedGraph, g_learned: &MixedGraph) -> Result<ShdReport> {
    if g_true.node_count() != g_learned.node_count() {
        return Err(Error::Input(format!(
            "node count mismatch: {} vs {}",
            g_true.node_count(),
            g_learned.node_count()
        )));
    }
    if g_true.kind() != g_learned.kind() {
        return Err(Error::Input("graph kind mismatch".into()));
    }
    let p = g_true.node_count();
    let mut extra = 0;
    let mut missing = 0;
    let mut wrong_mark = 0;
    let mut true_edges = 0;
    for i in 0..p {
        for j in (i + 1)..p {
            match (g_true.edge(i, j), g_learned.edge(i, j)) {
                (Some(t), Some(l)) => {
                    if t == l {
                        true_edges += 1;
                    } else {
                        wrong_mark += 1;
                    }
                }
                (Some(_), None) => missing += 1,
                (None, Some(_)) => extra += 1,
                (None, None) => {}
            }
        }
    }
    let shd = extra + missing + wrong_mark;
    let pairs = (p * (p - 1) / 2) as f64;
    let normalized = if pairs > 0.0 { shd as f64 / (pairs / 2.0) } else { 0.0 };
    Ok(ShdReport {
        extra,
        missing,
        wrong_mark,
        true_edges,
        shd,
        normalized,
        n_nodes: p,
    })
}

pub fn shd(g_true: &MixedGraph, g_learned: &MixedGraph) -> Result<ShdReport> {
    classify_edges(g_true, g_learned)
}
