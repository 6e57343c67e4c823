use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{first_collision, SchedConfig, SchedError, SchedState};
use crate::topology::CliqueCover;

/// Cap on resampling attempts for random initializations.
pub const MAX_INIT_ATTEMPTS: usize = 10_000;

/// How initial timers are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum InitMode {
    /// Node `k` starts at phase `k/N` with slot width `1/(2N)`.
    GlobalEqual,
    /// Uniform start phases and slot widths uniform in `(0, max_width]`,
    /// resampled until collision-free in every clique.
    RandomRejection { max_width: f64 },
    /// Random global firing order with a uniformly random (Dirichlet)
    /// split of the frame into guards and slots. Always collision-free.
    RandomPartition,
    Explicit { start: Vec<f64>, end: Vec<f64> },
}

impl InitMode {
    /// Rejection sampling with slots up to one over the largest clique size.
    pub fn rejection_for(cover: &CliqueCover) -> Self {
        let largest = cover.cliques.iter().map(Vec::len).max().unwrap_or(1);
        InitMode::RandomRejection {
            max_width: 1.0 / largest as f64,
        }
    }
}

pub fn init_schedule(
    cover: &CliqueCover,
    cfg: &SchedConfig,
    mode: &InitMode,
    seed: u64,
) -> Result<SchedState, SchedError> {
    random_state_where(cover, cfg, mode, seed, |_| true, MAX_INIT_ATTEMPTS)
}

/// Draws initial states from one seeded stream until `accept` holds.
pub fn random_state_where<F: Fn(&SchedState) -> bool>(
    cover: &CliqueCover,
    cfg: &SchedConfig,
    mode: &InitMode,
    seed: u64,
    accept: F,
    max_attempts: usize,
) -> Result<SchedState, SchedError> {
    cfg.validate(cover)?;
    let n = cover.membership.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match mode {
        InitMode::GlobalEqual => {
            let start: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
            let end = start.iter().map(|s| (s - 0.5 / n as f64).rem_euclid(1.0)).collect();
            let state = SchedState::from_timers(cover, start, end)?;
            if accept(&state) {
                Ok(state)
            } else {
                Err(SchedError::InitRejectionExhausted(1))
            }
        }
        InitMode::Explicit { start, end } => {
            let state = SchedState::from_timers(cover, start.clone(), end.clone())?;
            if accept(&state) {
                Ok(state)
            } else {
                Err(SchedError::InitRejectionExhausted(1))
            }
        }
        InitMode::RandomRejection { max_width } => {
            if !(*max_width > 0.0 && *max_width <= 1.0) {
                return Err(SchedError::InvalidConfig(format!("max_width {max_width} outside (0, 1]")));
            }
            for _ in 0..max_attempts {
                let start: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
                let end: Vec<f64> = start
                    .iter()
                    .map(|&s| {
                        let w = max_width * (1.0 - rng.gen::<f64>());
                        (s - w).rem_euclid(1.0)
                    })
                    .collect();
                if first_collision(cover, &start, &end).is_some() || !well_separated(cover, &start, &end) {
                    continue;
                }
                let state = SchedState::from_timers(cover, start, end)?;
                if accept(&state) {
                    return Ok(state);
                }
            }
            Err(SchedError::InitRejectionExhausted(max_attempts))
        }
        InitMode::RandomPartition => {
            for _ in 0..max_attempts {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let pieces: Vec<f64> = (0..2 * n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
                let total: f64 = pieces.iter().sum();
                let offset = rng.gen::<f64>();
                let mut start = vec![0.0; n];
                let mut end = vec![0.0; n];
                // Walking backwards in phase visits nodes in firing order.
                let mut cursor = offset;
                for (k, &i) in perm.iter().enumerate() {
                    cursor -= pieces[2 * k] / total;
                    start[i] = cursor.rem_euclid(1.0);
                    cursor -= pieces[2 * k + 1] / total;
                    end[i] = cursor.rem_euclid(1.0);
                }
                for p in start.iter_mut().chain(end.iter_mut()) {
                    if *p >= 1.0 {
                        *p = 0.0;
                    }
                }
                if first_collision(cover, &start, &end).is_some() || !well_separated(cover, &start, &end) {
                    continue;
                }
                let state = SchedState::from_timers(cover, start, end)?;
                if accept(&state) {
                    return Ok(state);
                }
            }
            Err(SchedError::InitRejectionExhausted(max_attempts))
        }
    }
}

/// Rejects near-ties between timers of the same clique so that firing
/// orders are unambiguous.
fn well_separated(cover: &CliqueCover, start: &[f64], end: &[f64]) -> bool {
    const MIN_GAP: f64 = 1e-9;
    cover.cliques.iter().all(|members| {
        let mut phases: Vec<f64> = members.iter().flat_map(|&i| [start[i], end[i]]).collect();
        phases.sort_by(f64::total_cmp);
        let k = phases.len();
        (0..k).all(|a| {
            let next = if a + 1 < k { phases[a + 1] } else { phases[0] + 1.0 };
            next - phases[a] > MIN_GAP
        })
    })
}
