use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::metrics::{delta_max, delta_vector, head_nodes, DeltaVector, TraceEvent, TraceKind};
use super::{Delivery, SyncConfig, SyncError, SyncState};
use crate::topology::Topology;

/// Tolerance used when testing the head-node property on a final state.
const HEAD_EPS: f64 = 1e-9;

/// What happened at one timestamp.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    pub time: f64,
    pub fired: Vec<usize>,
    pub deliveries: usize,
    /// Deliveries that moved the receiver's phase.
    pub updates: usize,
    pub absorptions: usize,
}

/// Result of [`SyncEngine::run_until_fixed`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncRun {
    pub converged: bool,
    /// Time of the last phase-changing update, relative to the run start.
    pub time: f64,
    /// Periods simulated in total.
    pub periods: f64,
    pub deltas: DeltaVector,
    /// Largest cyclic distance over all node pairs.
    pub delta_max: f64,
    /// All head nodes of the final state (empty if none or not converged).
    pub heads: Vec<usize>,
    /// Head with the smallest delay eccentricity, ties to the lowest id.
    pub head: Option<usize>,
    pub phases: Vec<f64>,
}

/// Stateless driver binding a topology to a validated configuration.
#[derive(Debug, Clone)]
pub struct SyncEngine<'a> {
    topo: &'a Topology,
    cfg: SyncConfig,
    rho: f64,
}

impl<'a> SyncEngine<'a> {
    pub fn new(topo: &'a Topology, cfg: &SyncConfig) -> Result<Self, SyncError> {
        let rho = cfg.resolve_rho(topo)?;
        Ok(SyncEngine {
            topo,
            cfg: cfg.clone(),
            rho,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn topology(&self) -> &Topology {
        self.topo
    }

    /// Time of the next event (natural firing or delivery).
    pub fn next_event_time(&self, state: &SyncState) -> f64 {
        let lead = state.phases.iter().copied().fold(0.0, f64::max);
        let fire = state.sim_time + (1.0 - lead).max(0.0);
        match state.pending.peek() {
            Some(d) if d.time < fire => d.time,
            _ => fire,
        }
    }

    /// Advances to the next event time and processes every event of that
    /// timestamp, including absorption cascades.
    pub fn step(&self, state: &mut SyncState) -> Result<StepReport, SyncError> {
        let n = state.node_count();
        let eps = self.cfg.eps_time;
        let t = self.next_event_time(state);
        let dt = t - state.sim_time;
        if dt > 0.0 {
            for p in &mut state.phases {
                *p += dt;
            }
        }
        state.sim_time = t;
        let mut report = StepReport {
            time: t,
            ..StepReport::default()
        };
        let mut events = 0usize;
        loop {
            let mut due = Vec::new();
            while let Some(d) = state.pending.peek() {
                if d.time <= t + eps {
                    due.push(state.pending.pop().expect("peeked"));
                } else {
                    break;
                }
            }
            for d in &due {
                self.deliver(state, d, &mut report);
            }
            let firing: Vec<usize> = (0..n).filter(|&i| state.phases[i] >= 1.0 - eps).collect();
            for &i in &firing {
                self.fire(state, i, t);
            }
            events += due.len() + firing.len();
            if events > n * n {
                return Err(SyncError::EventStorm { time: t, events });
            }
            report.deliveries += due.len();
            report.fired.extend_from_slice(&firing);
            if due.is_empty() && firing.is_empty() {
                break;
            }
        }
        Ok(report)
    }

    fn deliver(&self, state: &mut SyncState, d: &Delivery, report: &mut StepReport) {
        let eps = self.cfg.eps_time;
        let j = d.receiver;
        let phase = state.phases[j];
        let due_to_fire = phase >= 1.0 - eps;
        let kind = if due_to_fire || phase <= self.rho {
            TraceKind::Deliver
        } else {
            let next = super::apply_firing_update(phase, self.cfg.alpha, true);
            report.updates += usize::from(next != phase);
            if next >= 1.0 - eps {
                state.phases[j] = 1.0;
                report.absorptions += 1;
                TraceKind::Absorb
            } else {
                state.phases[j] = next;
                TraceKind::Deliver
            }
        };
        if let Some(trace) = &mut state.trace {
            trace.push(TraceEvent {
                time: d.time,
                kind,
                sender: d.sender,
                receiver: j,
                phase: state.phases[j],
            });
        }
    }

    fn fire(&self, state: &mut SyncState, i: usize, t: f64) {
        state.phases[i] = 0.0;
        for &j in self.topo.neighbors(i) {
            state.pending.push(Delivery {
                time: t + self.topo.delay(i, j),
                sender: i,
                receiver: j,
            });
        }
        if let Some(trace) = &mut state.trace {
            trace.push(TraceEvent {
                time: t,
                kind: TraceKind::Fire,
                sender: i,
                receiver: i,
                phase: 0.0,
            });
        }
    }

    /// Processes every event strictly before `sim_time + periods` and leaves
    /// the clock there. Returns the number of phase-changing updates.
    pub fn run_periods(&self, state: &mut SyncState, periods: f64) -> Result<usize, SyncError> {
        let target = state.sim_time + periods;
        let mut updates = 0;
        while self.next_event_time(state) < target {
            updates += self.step(state)?.updates;
        }
        let dt = target - state.sim_time;
        for p in &mut state.phases {
            *p += dt;
        }
        state.sim_time = target;
        Ok(updates)
    }

    /// Runs until the edge distances stay unchanged over `window`
    /// consecutive whole periods or `max_periods` elapse.
    pub fn run_until_fixed(&self, state: &mut SyncState) -> Result<SyncRun, SyncError> {
        let start = state.sim_time;
        let window = self.cfg.window;
        let mut samples: VecDeque<Vec<f64>> = VecDeque::with_capacity(window + 1);
        let mut next_sample = start.floor() + 1.0;
        let mut last_change = start;
        let mut converged = false;
        while state.sim_time - start < self.cfg.max_periods {
            let t = self.next_event_time(state);
            if t > next_sample {
                samples.push_back(delta_vector(self.topo, &state.phases).values);
                if samples.len() > window + 1 {
                    samples.pop_front();
                }
                next_sample += 1.0;
                if samples.len() == window + 1 && self.stable(&samples) {
                    converged = true;
                    break;
                }
                continue;
            }
            let report = self.step(state)?;
            if report.updates > 0 {
                last_change = report.time;
            }
        }
        Ok(self.record(state, converged, last_change - start, state.sim_time - start))
    }

    fn stable(&self, samples: &VecDeque<Vec<f64>>) -> bool {
        samples.iter().zip(samples.iter().skip(1)).all(|(a, b)| {
            a.iter().zip(b).all(|(x, y)| (x - y).abs() < self.cfg.eps_fix)
        })
    }

    fn record(&self, state: &SyncState, converged: bool, time: f64, periods: f64) -> SyncRun {
        let heads = if converged {
            head_nodes(&state.phases, HEAD_EPS).unwrap_or_default()
        } else {
            Vec::new()
        };
        let head = heads.iter().copied().min_by(|&a, &b| {
            self.topo
                .delay_eccentricity(a)
                .total_cmp(&self.topo.delay_eccentricity(b))
                .then(a.cmp(&b))
        });
        SyncRun {
            converged,
            time,
            periods,
            deltas: delta_vector(self.topo, &state.phases),
            delta_max: delta_max(&state.phases),
            heads,
            head,
            phases: state.phases.clone(),
        }
    }
}

/// Attaches a new node with the given `(neighbor, tau)` links and initial
/// phase to a synchronized zero-delay network.
pub fn join_node(
    topo: &Topology,
    state: &SyncState,
    links: &[(usize, f64)],
    phase: f64,
    eps: f64,
) -> Result<(Topology, SyncState), SyncError> {
    if topo.has_delays() || links.iter().any(|&(_, t)| t != 0.0) || delta_max(&state.phases) >= eps {
        return Err(SyncError::NotSynchronized);
    }
    if !(0.0..1.0).contains(&phase) {
        return Err(SyncError::InvalidConfig(format!("phase {phase} outside [0, 1)")));
    }
    let grown = topo.with_extra_node(links)?;
    let mut next = state.clone();
    next.phases.push(phase);
    next.pending.clear();
    Ok((grown, next))
}
