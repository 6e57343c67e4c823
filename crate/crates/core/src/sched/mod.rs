//! Two-timer pulse-coupled scheduling protocol.
//!
//! Every node keeps a start timer `Φ` and an end timer `Ψ` on a frame of
//! length one. A node's transmission slot runs from its start firing to its
//! end firing. Once per round a node moves both timers towards targets
//! computed from the end timer of the node that transmits just before it.

mod engine;
mod init;

pub use engine::{SchedEngine, SchedRun};
pub use init::{init_schedule, random_state_where, InitMode};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratio::{to_f64, Q};
use crate::sync::xi;
use crate::topology::{CliqueCover, TopologyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchedError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("clique {0} has a single member")]
    DegenerateClique(usize),
    #[error("node {node} is not in clique {clique}")]
    NotInClique { node: usize, clique: usize },
    #[error("no collision-free initialization after {0} attempts")]
    InitRejectionExhausted(usize),
    #[error("node {0} updated without a stored predecessor reference")]
    MissingPreReference(usize),
    #[error("explicit timers violate collision avoidance in clique {0}")]
    Collision(usize),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Protocol parameters. Demands and the guard are exact rationals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedConfig {
    pub beta: f64,
    pub delta: Q,
    pub demands: Vec<Q>,
    pub max_frames: u64,
    pub eps_fix: f64,
    pub eps_time: f64,
}

impl SchedConfig {
    pub fn new(beta: f64, delta: Q, demands: Vec<Q>) -> Self {
        SchedConfig {
            beta,
            delta,
            demands,
            max_frames: 20_000,
            eps_fix: 1e-9,
            eps_time: 1e-12,
        }
    }

    /// Equal demand `d` for `n` nodes.
    pub fn equal(n: usize, beta: f64, d: Q, delta: Q) -> Self {
        Self::new(beta, delta, vec![d; n])
    }

    pub fn validate(&self, cover: &CliqueCover) -> Result<(), SchedError> {
        let zero = Q::from_integer(0);
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(SchedError::InvalidConfig(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if self.delta <= zero || self.demands.iter().any(|d| *d <= zero) {
            return Err(SchedError::InvalidConfig("demands and delta must be positive".into()));
        }
        if self.demands.len() != cover.membership.len() {
            return Err(SchedError::InvalidConfig(format!(
                "{} demands for {} nodes",
                self.demands.len(),
                cover.membership.len()
            )));
        }
        if let Some(c) = cover.cliques.iter().position(|m| m.len() < 2) {
            return Err(SchedError::DegenerateClique(c));
        }
        Ok(())
    }

    pub fn demand_f64(&self, i: usize) -> f64 {
        to_f64(&self.demands[i])
    }

    pub fn delta_f64(&self) -> f64 {
        to_f64(&self.delta)
    }
}

/// Protocol stage of a node within its current round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    /// Waiting for its own start firing.
    Idle,
    /// Started transmitting; the predecessor reference is stored.
    Armed,
    /// Finished transmitting; updates at the next neighbor start firing.
    Ended,
}

/// Timers, per-clique firing orders and per-node protocol stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedState {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub sim_time: f64,
    /// Per clique, members sorted by descending start phase at
    /// initialization.
    pub order: Vec<Vec<usize>>,
    pub stage: Vec<Stage>,
    pub updates: Vec<u64>,
}

impl SchedState {
    /// Builds a state from explicit timers, checking collision avoidance and
    /// deriving the firing orders.
    pub fn from_timers(cover: &CliqueCover, start: Vec<f64>, end: Vec<f64>) -> Result<Self, SchedError> {
        let n = cover.membership.len();
        if start.len() != n || end.len() != n {
            return Err(SchedError::InvalidConfig("timer vectors must cover every node".into()));
        }
        if start.iter().chain(&end).any(|p| !(0.0..1.0).contains(p)) {
            return Err(SchedError::InvalidConfig("timers must lie in [0, 1)".into()));
        }
        if let Some(c) = first_collision(cover, &start, &end) {
            return Err(SchedError::Collision(c));
        }
        let order = cover.cliques.iter().map(|m| descending(m, &start)).collect();
        Ok(SchedState {
            start,
            end,
            sim_time: 0.0,
            order,
            stage: vec![Stage::Idle; n],
            updates: vec![0; n],
        })
    }

    /// Slot width `Γ_i = (Φ_i − Ψ_i) mod 1`.
    pub fn gamma(&self, i: usize) -> f64 {
        xi(self.start[i], self.end[i])
    }

    pub fn gammas(&self) -> Vec<f64> {
        (0..self.start.len()).map(|i| self.gamma(i)).collect()
    }
}

fn descending(members: &[usize], start: &[f64]) -> Vec<usize> {
    let mut m = members.to_vec();
    m.sort_by(|&a, &b| start[b].total_cmp(&start[a]).then(a.cmp(&b)));
    m
}

/// Index of the first clique whose members overlap or share a start phase.
pub fn first_collision(cover: &CliqueCover, start: &[f64], end: &[f64]) -> Option<usize> {
    cover.cliques.iter().position(|members| {
        members.iter().any(|&i| {
            let width = xi(start[i], end[i]);
            members.iter().any(|&j| j != i && (start[i] == start[j] || width > xi(start[i], start[j])))
        })
    })
}

/// Whether the cyclic order of `current` matches `stored`.
pub fn same_cyclic_order(stored: &[usize], current: &[usize]) -> bool {
    if stored.len() != current.len() {
        return false;
    }
    if stored.is_empty() {
        return true;
    }
    match current.iter().position(|&x| x == stored[0]) {
        Some(off) => (0..stored.len()).all(|k| stored[k] == current[(k + off) % current.len()]),
        None => false,
    }
}

/// Cyclic neighbors of `i` in the firing order of clique `c`.
pub fn pre_suc(state: &SchedState, cover: &CliqueCover, i: usize, c: usize) -> Result<(usize, usize), SchedError> {
    let order = state.order.get(c).ok_or(SchedError::NotInClique { node: i, clique: c })?;
    let k = order
        .iter()
        .position(|&x| x == i)
        .ok_or(SchedError::NotInClique { node: i, clique: c })?;
    if order.len() < 2 {
        return Err(SchedError::DegenerateClique(c));
    }
    debug_assert!(cover.contains(c, i));
    let m = order.len();
    Ok((order[(k + m - 1) % m], order[(k + 1) % m]))
}

/// Predecessor and successor across all cliques of `i`, choosing the
/// candidate with the smallest gap. Ties go to the lower clique index.
pub fn global_pre_suc(state: &SchedState, cover: &CliqueCover, i: usize) -> (usize, usize) {
    let mut best_pre: Option<(f64, usize)> = None;
    let mut best_suc: Option<(f64, usize)> = None;
    for &c in &cover.membership[i] {
        let (p, s) = pre_suc(state, cover, i, c).expect("membership is consistent");
        let gp = xi(state.end[p], state.start[i]);
        let gs = xi(state.end[i], state.start[s]);
        if best_pre.map_or(true, |(g, _)| gp < g) {
            best_pre = Some((gp, p));
        }
        if best_suc.map_or(true, |(g, _)| gs < g) {
            best_suc = Some((gs, s));
        }
    }
    (best_pre.expect("node in a clique").1, best_suc.expect("node in a clique").1)
}

/// Target timers `(Φ*, Ψ*)` for demand `d` and guard `delta`.
pub fn compute_target(psi_pre: f64, d: f64, delta: f64) -> (f64, f64) {
    let denom = d + 2.0 * delta;
    ((d + delta) / denom * psi_pre, delta / denom * psi_pre)
}

/// Interleaved guard/slot vector of clique `c` in its firing order.
pub fn extract_upsilon(state: &SchedState, c: usize) -> Vec<f64> {
    let order = &state.order[c];
    let m = order.len();
    let mut out = Vec::with_capacity(2 * m);
    for k in 0..m {
        let i = order[k];
        let pre = order[(k + m - 1) % m];
        out.push(xi(state.end[pre], state.start[i]));
        out.push(xi(state.start[i], state.end[i]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::qi;
    use crate::topology::generators::{complete, line};
    use crate::topology::maximal_cliques;

    #[test]
    fn target_examples() {
        let (p, e) = compute_target(0.6, 4.0, 1.0);
        assert!((p - 0.5).abs() < 1e-15 && (e - 0.1).abs() < 1e-15);
        assert_eq!(compute_target(0.0, 4.0, 1.0), (0.0, 0.0));
        let (p, e) = compute_target(0.4, 4.0, 1.0);
        assert!((p - 1.0 / 3.0).abs() < 1e-15 && (e - 1.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn pre_suc_wraps() {
        let cover = maximal_cliques(&complete(3, 0.0).unwrap()).unwrap();
        let s = SchedState::from_timers(&cover, vec![0.5, 0.2, 0.8], vec![0.45, 0.15, 0.75]).unwrap();
        assert_eq!(s.order[0], vec![2, 0, 1]);
        assert_eq!(pre_suc(&s, &cover, 0, 0).unwrap(), (2, 1));
        assert_eq!(pre_suc(&s, &cover, 2, 0).unwrap(), (1, 0));
        assert!(matches!(pre_suc(&s, &cover, 0, 3), Err(SchedError::NotInClique { .. })));
        assert_eq!(global_pre_suc(&s, &cover, 0), (2, 1));
    }

    #[test]
    fn two_node_clique_neighbors_are_each_other() {
        let cover = maximal_cliques(&line(2, 0.0).unwrap()).unwrap();
        let s = SchedState::from_timers(&cover, vec![0.5, 0.0], vec![0.4, 0.9]).unwrap();
        assert_eq!(pre_suc(&s, &cover, 0, 0).unwrap(), (1, 1));
    }

    #[test]
    fn collision_is_rejected() {
        let cover = maximal_cliques(&line(2, 0.0).unwrap()).unwrap();
        assert_eq!(
            SchedState::from_timers(&cover, vec![0.5, 0.4], vec![0.3, 0.35]),
            Err(SchedError::Collision(0))
        );
    }

    #[test]
    fn degenerate_clique_rejected() {
        let cover = maximal_cliques(&crate::topology::Topology::new(1, &[], &[]).unwrap()).unwrap();
        let cfg = SchedConfig::equal(1, 0.5, qi(4), qi(1));
        assert_eq!(cfg.validate(&cover), Err(SchedError::DegenerateClique(0)));
    }

    #[test]
    fn cyclic_order_comparison() {
        assert!(same_cyclic_order(&[1, 2, 3], &[3, 1, 2]));
        assert!(!same_cyclic_order(&[1, 2, 3], &[1, 3, 2]));
    }
}
