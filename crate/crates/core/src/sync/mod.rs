//! Excitatory pulse-coupled synchronization with propagation delays and a
//! refractory period.
//!
//! A run is driven by [`SyncEngine`]: it owns no state, so one engine can
//! drive many independent [`SyncState`]s concurrently.

mod engine;
mod metrics;

pub use engine::{join_node, SyncEngine, SyncRun, StepReport};
pub use metrics::{delta_max, delta_vector, head_nodes, xi, DeltaVector, TraceEvent, TraceKind};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{Topology, TopologyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyncError {
    #[error("no admissible refractory period: 2*max_tau = {two_max} >= 1/2 + min_tau = {upper}")]
    RefractoryWindowEmpty { two_max: f64, upper: f64 },
    #[error("refractory period {rho} outside the admissible window ({lo}, {hi})")]
    RefractoryOutOfWindow { rho: f64, lo: f64, hi: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("event storm: {events} events at time {time}")]
    EventStorm { time: f64, events: usize },
    #[error("no head node: state is not a delayed fixed point")]
    NoHead,
    #[error("join requires a synchronized zero-delay state")]
    NotSynchronized,
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Parameters of a synchronization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncConfig {
    /// Excitatory coupling strength.
    pub alpha: f64,
    /// Refractory length; `None` picks `2*max_tau + 0.01` with delays and
    /// `0` without.
    pub rho: Option<f64>,
    pub max_periods: f64,
    pub eps_fix: f64,
    pub eps_time: f64,
    /// Number of consecutive unchanged period samples that declare a fixed
    /// point.
    pub window: usize,
}

impl Default for SyncConfig {
    fn default() -> Self {
        SyncConfig {
            alpha: 0.01,
            rho: None,
            max_periods: 10_000.0,
            eps_fix: 1e-10,
            eps_time: 1e-12,
            window: 3,
        }
    }
}

impl SyncConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        SyncConfig {
            alpha,
            ..Self::default()
        }
    }

    /// Resolves and validates the refractory period for `topo`.
    pub fn resolve_rho(&self, topo: &Topology) -> Result<f64, SyncError> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(SyncError::InvalidConfig(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.window == 0 || !(self.max_periods > 0.0) {
            return Err(SyncError::InvalidConfig("window and max_periods must be positive".into()));
        }
        if !topo.has_delays() {
            let rho = self.rho.unwrap_or(0.0);
            if !(0.0..1.0).contains(&rho) {
                return Err(SyncError::RefractoryOutOfWindow { rho, lo: 0.0, hi: 1.0 });
            }
            return Ok(rho);
        }
        let lo = 2.0 * topo.max_delay();
        let hi = 0.5 + topo.min_edge_delay();
        if lo >= hi {
            return Err(SyncError::RefractoryWindowEmpty { two_max: lo, upper: hi });
        }
        let rho = self.rho.unwrap_or_else(|| (lo + 0.01).min(0.5 * (lo + hi)));
        if rho <= lo || rho >= hi {
            return Err(SyncError::RefractoryOutOfWindow { rho, lo, hi });
        }
        Ok(rho)
    }
}

/// A beacon in flight from `sender` to `receiver`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    pub time: f64,
    pub sender: usize,
    pub receiver: usize,
}

impl Eq for Delivery {}

impl Ord for Delivery {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.sender.cmp(&self.sender))
            .then_with(|| other.receiver.cmp(&self.receiver))
    }
}

impl PartialOrd for Delivery {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Mutable simulation state: phases at `sim_time` plus beacons in flight.
#[derive(Debug, Clone)]
pub struct SyncState {
    pub phases: Vec<f64>,
    pub sim_time: f64,
    /// Min-ordered queue of pending deliveries.
    pub pending: BinaryHeap<Delivery>,
    /// Event trace, recorded only when enabled.
    pub trace: Option<Vec<TraceEvent>>,
}

/// Initial phase source.
#[derive(Debug, Clone, PartialEq)]
pub enum InitPhases {
    /// I.i.d. uniform phases from a ChaCha8 stream seeded with the value.
    Seed(u64),
    Explicit(Vec<f64>),
}

impl SyncState {
    pub fn new(phases: Vec<f64>) -> Self {
        SyncState {
            phases,
            sim_time: 0.0,
            pending: BinaryHeap::new(),
            trace: None,
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn node_count(&self) -> usize {
        self.phases.len()
    }
}

/// Builds the initial state after validating `cfg` against `topo`.
pub fn init_sync(topo: &Topology, cfg: &SyncConfig, init: InitPhases) -> Result<SyncState, SyncError> {
    cfg.resolve_rho(topo)?;
    let n = topo.node_count();
    let phases = match init {
        InitPhases::Seed(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.gen::<f64>()).collect()
        }
        InitPhases::Explicit(p) => {
            if p.len() != n || p.iter().any(|x| !(0.0..1.0).contains(x)) {
                return Err(SyncError::InvalidConfig(format!(
                    "expected {n} phases in [0, 1), got {p:?}"
                )));
            }
            p
        }
    };
    Ok(SyncState::new(phases))
}

/// Multiplicative excitatory update; a result of `1` means absorption.
pub fn apply_firing_update(phase: f64, alpha: f64, coupled: bool) -> f64 {
    if coupled {
        ((1.0 + alpha) * phase).min(1.0)
    } else {
        phase
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::generators::{complete, line};

    #[test]
    fn firing_update_examples() {
        assert!((apply_firing_update(0.5, 0.01, true) - 0.505).abs() < 1e-15);
        assert_eq!(apply_firing_update(0.995, 0.01, true), 1.0);
        assert_eq!(apply_firing_update(0.5, 0.01, false), 0.5);
    }

    #[test]
    fn seeded_init_is_deterministic() {
        let t = complete(5, 0.0).unwrap();
        let cfg = SyncConfig::default();
        let a = init_sync(&t, &cfg, InitPhases::Seed(7)).unwrap();
        let b = init_sync(&t, &cfg, InitPhases::Seed(7)).unwrap();
        assert_eq!(a.phases, b.phases);
    }

    #[test]
    fn refractory_window() {
        let t = line(2, 0.3).unwrap();
        let rho = SyncConfig::default().resolve_rho(&t).unwrap();
        assert!(rho > 0.6 && rho < 0.8);
        let wide = Topology::new(3, &[(0, 1), (1, 2)], &[0.3, 0.01]).unwrap();
        assert!(matches!(
            SyncConfig::default().resolve_rho(&wide),
            Err(SyncError::RefractoryWindowEmpty { .. })
        ));
        let cfg = SyncConfig {
            rho: Some(0.01),
            ..SyncConfig::default()
        };
        assert!(matches!(
            cfg.resolve_rho(&line(2, 0.01).unwrap()),
            Err(SyncError::RefractoryOutOfWindow { .. })
        ));
        assert_eq!(SyncConfig::default().resolve_rho(&line(2, 0.0).unwrap()).unwrap(), 0.0);
    }
}
