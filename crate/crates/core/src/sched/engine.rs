use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{
    compute_target, descending, extract_upsilon, global_pre_suc, same_cyclic_order, SchedConfig, SchedError,
    SchedState, Stage,
};
use crate::topology::{CliqueCover, Topology};

/// Number of consecutive stable frames that declare a fixed point.
const STABLE_FRAMES: usize = 3;

/// Result of [`SchedEngine::run_frames`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedRun {
    pub converged: bool,
    /// Frame index at which the stable window began (or frames simulated).
    pub frames: u64,
    /// Final guard/slot vectors, one per clique.
    pub upsilon: Vec<Vec<f64>>,
    /// Final slot width per node.
    pub gamma: Vec<f64>,
    /// Whether every clique kept its cyclic firing order at every sample.
    pub order_preserved: bool,
    /// Largest `|Σ Υ_c − 1|` seen over all samples.
    pub max_sum_error: f64,
    /// Most updates any node performed between two frame samples, after
    /// the first frame.
    pub max_updates_per_frame: u64,
}

/// Stateless driver of the scheduling protocol.
#[derive(Debug, Clone)]
pub struct SchedEngine<'a> {
    topo: &'a Topology,
    cover: &'a CliqueCover,
    cfg: SchedConfig,
    demand: Vec<f64>,
    delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Timer {
    End,
    Start,
}

impl<'a> SchedEngine<'a> {
    pub fn new(topo: &'a Topology, cover: &'a CliqueCover, cfg: &SchedConfig) -> Result<Self, SchedError> {
        cfg.validate(cover)?;
        let demand = (0..cfg.demands.len()).map(|i| cfg.demand_f64(i)).collect();
        Ok(SchedEngine {
            topo,
            cover,
            cfg: cfg.clone(),
            demand,
            delta: cfg.delta_f64(),
        })
    }

    pub fn config(&self) -> &SchedConfig {
        &self.cfg
    }

    fn next_event_time(&self, state: &SchedState) -> f64 {
        let lead = state.start.iter().chain(&state.end).copied().fold(0.0, f64::max);
        state.sim_time + (1.0 - lead).max(0.0)
    }

    /// Moves node `i`'s timers towards their targets. The node must have
    /// finished its slot in the current round.
    pub fn apply_update(&self, state: &mut SchedState, i: usize) -> Result<(), SchedError> {
        if state.stage[i] != Stage::Ended {
            return Err(SchedError::MissingPreReference(i));
        }
        let (pre, _) = global_pre_suc(state, self.cover, i);
        let (phi_t, psi_t) = compute_target(state.end[pre], self.demand[i], self.delta);
        let b = self.cfg.beta;
        state.start[i] = (1.0 - b) * state.start[i] + b * phi_t;
        state.end[i] = (1.0 - b) * state.end[i] + b * psi_t;
        state.stage[i] = Stage::Idle;
        state.updates[i] += 1;
        Ok(())
    }

    /// Advances to the next timer expiration and processes every timer
    /// expiring at that instant, end timers first and then by node id.
    pub fn step(&self, state: &mut SchedState) -> Result<f64, SchedError> {
        let t = self.next_event_time(state);
        let dt = t - state.sim_time;
        for p in state.start.iter_mut().chain(state.end.iter_mut()) {
            *p += dt;
        }
        state.sim_time = t;
        let eps = self.cfg.eps_time;
        let mut due: Vec<(Timer, usize)> = Vec::new();
        for i in 0..state.start.len() {
            if state.end[i] >= 1.0 - eps {
                due.push((Timer::End, i));
            }
            if state.start[i] >= 1.0 - eps {
                due.push((Timer::Start, i));
            }
        }
        due.sort();
        for (timer, j) in due {
            match timer {
                Timer::End => {
                    state.end[j] = 0.0;
                    if state.stage[j] == Stage::Armed {
                        state.stage[j] = Stage::Ended;
                    }
                }
                Timer::Start => {
                    state.start[j] = 0.0;
                    for &i in self.topo.neighbors(j) {
                        if state.stage[i] == Stage::Ended {
                            self.apply_update(state, i)?;
                        }
                    }
                    state.stage[j] = Stage::Armed;
                }
            }
        }
        Ok(t)
    }

    /// Guard/slot vectors of every clique.
    pub fn upsilon(&self, state: &SchedState) -> Vec<Vec<f64>> {
        (0..self.cover.len()).map(|c| extract_upsilon(state, c)).collect()
    }

    fn orders_intact(&self, state: &SchedState) -> bool {
        self.cover
            .cliques
            .iter()
            .enumerate()
            .all(|(c, members)| same_cyclic_order(&state.order[c], &descending(members, &state.start)))
    }

    /// Runs until every guard/slot vector changes by less than `eps_fix`
    /// over three consecutive frames, or `max_frames` elapse.
    pub fn run_frames(&self, state: &mut SchedState) -> Result<SchedRun, SchedError> {
        self.run_frames_observed(state, self.cfg.max_frames, true, |_, _, _| {})
    }

    /// Simulates up to `max_frames` frames and calls `observe` with the frame
    /// index, the state and the guard/slot vectors at every integer time.
    /// With `stop_at_fixed` the run ends at the first detected fixed point.
    pub fn run_frames_observed<F>(
        &self,
        state: &mut SchedState,
        max_frames: u64,
        stop_at_fixed: bool,
        mut observe: F,
    ) -> Result<SchedRun, SchedError>
    where
        F: FnMut(u64, &SchedState, &[Vec<f64>]),
    {
        let start_time = state.sim_time;
        let mut next_sample = start_time.floor() + 1.0;
        let mut frame: u64 = 0;
        let mut history: VecDeque<Vec<Vec<f64>>> = VecDeque::new();
        let mut order_preserved = true;
        let mut max_sum_error: f64 = 0.0;
        let mut max_updates: u64 = 0;
        let mut last_counts = state.updates.clone();
        let mut converged_at: Option<u64> = None;
        while frame < max_frames {
            if self.next_event_time(state) > next_sample {
                frame += 1;
                next_sample += 1.0;
                let ups = self.upsilon(state);
                for u in &ups {
                    max_sum_error = max_sum_error.max((u.iter().sum::<f64>() - 1.0).abs());
                }
                order_preserved &= self.orders_intact(state);
                if frame > 1 {
                    for (now, before) in state.updates.iter().zip(&last_counts) {
                        max_updates = max_updates.max(now - before);
                    }
                }
                last_counts.clone_from(&state.updates);
                observe(frame, state, &ups);
                history.push_back(ups);
                if history.len() > STABLE_FRAMES + 1 {
                    history.pop_front();
                }
                if history.len() == STABLE_FRAMES + 1 && self.stable(&history) {
                    if converged_at.is_none() {
                        converged_at = Some(frame - STABLE_FRAMES as u64);
                    }
                    if stop_at_fixed {
                        break;
                    }
                }
                continue;
            }
            self.step(state)?;
        }
        Ok(SchedRun {
            converged: converged_at.is_some(),
            frames: converged_at.unwrap_or(frame),
            upsilon: self.upsilon(state),
            gamma: state.gammas(),
            order_preserved,
            max_sum_error,
            max_updates_per_frame: max_updates,
        })
    }

    fn stable(&self, history: &VecDeque<Vec<Vec<f64>>>) -> bool {
        history.iter().zip(history.iter().skip(1)).all(|(a, b)| {
            a.iter()
                .zip(b)
                .all(|(x, y)| x.iter().zip(y).all(|(p, q)| (p - q).abs() < self.cfg.eps_fix))
        })
    }
}
