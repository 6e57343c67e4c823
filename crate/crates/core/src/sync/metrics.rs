use serde::{Deserialize, Serialize};

use super::SyncError;
use crate::topology::Topology;

/// Directed cyclic difference `(a - b) mod 1`.
pub fn xi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    if d >= 1.0 {
        0.0
    } else {
        d
    }
}

fn cyclic_distance(a: f64, b: f64) -> f64 {
    let x = xi(a, b);
    x.min(xi(b, a))
}

/// Per-edge cyclic phase distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaVector {
    pub edges: Vec<(usize, usize)>,
    pub values: Vec<f64>,
}

impl DeltaVector {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

pub fn delta_vector(topo: &Topology, phases: &[f64]) -> DeltaVector {
    let edges = topo.edges().to_vec();
    let values = edges.iter().map(|&(i, j)| cyclic_distance(phases[i], phases[j])).collect();
    DeltaVector { edges, values }
}

/// Largest cyclic distance over all node pairs.
pub fn delta_max(phases: &[f64]) -> f64 {
    let mut m: f64 = 0.0;
    for (a, &pa) in phases.iter().enumerate() {
        for &pb in &phases[a + 1..] {
            m = m.max(cyclic_distance(pa, pb));
        }
    }
    m
}

/// Nodes whose forward difference to every other node equals the cyclic
/// distance, i.e. nodes that lead everybody.
pub fn head_nodes(phases: &[f64], eps: f64) -> Result<Vec<usize>, SyncError> {
    let heads: Vec<usize> = (0..phases.len())
        .filter(|&h| {
            phases.iter().all(|&pj| {
                let x = xi(phases[h], pj);
                let d = cyclic_distance(phases[h], pj);
                (x - d).abs() <= eps || 1.0 - x <= eps
            })
        })
        .collect();
    if heads.is_empty() {
        Err(SyncError::NoHead)
    } else {
        Ok(heads)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Fire,
    Deliver,
    Absorb,
}

/// One line of the event trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub time: f64,
    #[serde(rename = "type")]
    pub kind: TraceKind,
    pub sender: usize,
    pub receiver: usize,
    pub phase: f64,
}

impl TraceEvent {
    /// Renders events as line-delimited JSON.
    pub fn to_jsonl(events: &[TraceEvent]) -> String {
        let mut out = String::new();
        for e in events {
            out.push_str(&serde_json::to_string(e).expect("trace events serialize"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn head_of_two_node_offset() {
        let p = [0.30, 0.29];
        assert_eq!(head_nodes(&p, 1e-12).unwrap(), vec![0]);
        assert!((delta_max(&p) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn synchronized_nodes_are_all_heads() {
        assert_eq!(head_nodes(&[0.4, 0.4, 0.4], 1e-12).unwrap(), vec![0, 1, 2]);
        assert_eq!(delta_max(&[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn wraparound_distance() {
        assert!((delta_max(&[0.99, 0.01]) - 0.02).abs() < 1e-12);
        assert_eq!(head_nodes(&[0.01, 0.99], 1e-12).unwrap(), vec![0]);
    }

    #[test]
    fn trace_serializes_type_field() {
        let e = TraceEvent {
            time: 0.5,
            kind: TraceKind::Absorb,
            sender: 0,
            receiver: 1,
            phase: 1.0,
        };
        let line = TraceEvent::to_jsonl(&[e]);
        assert!(line.contains("\"type\":\"absorb\""));
        assert!(line.ends_with('\n'));
    }
}
