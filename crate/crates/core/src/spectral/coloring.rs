use serde::{Deserialize, Serialize};

use super::fixed_point::{predict_fixed_point, Arrangement};
use super::SpectralError;
use crate::ratio::{to_f64, Q};
use crate::sched::SchedState;
use crate::topology::{CliqueCover, Topology};

/// Largest graph for which the chromatic number is computed exactly.
pub const EXACT_CHROMATIC_LIMIT: usize = 12;
const EXACT_PIERCING_LIMIT: usize = 20;
const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColoringVerdict {
    Minimal,
    NotMinimal { chromatic: usize },
    /// The graph is too large for the exact chromatic number.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub count: usize,
    pub proper: bool,
    pub verdict: ColoringVerdict,
}

fn contains(start: f64, width: f64, p: f64) -> bool {
    let mut d = (p - start).rem_euclid(1.0);
    if d > 1.0 - EPS {
        d = 0.0;
    }
    d < width - EPS || (width <= EPS && d == 0.0)
}

/// Colors nodes by the slot-reuse instants of a schedule. Every color is a
/// time instant and a node takes the first chosen instant inside its slot;
/// the chosen instants form a smallest set meeting every slot.
pub fn coloring_from_slots(topo: &Topology, start: &[f64], width: &[f64]) -> Coloring {
    let n = start.len();
    let mut cand: Vec<f64> = start.iter().map(|s| s.rem_euclid(1.0)).collect();
    cand.sort_by(f64::total_cmp);
    cand.dedup_by(|a, b| (*a - *b).abs() < EPS);
    let hits: Vec<Vec<bool>> = cand
        .iter()
        .map(|&p| (0..n).map(|i| contains(start[i], width[i], p)).collect())
        .collect();
    let covers = |sel: &[usize]| (0..n).all(|i| sel.iter().any(|&k| hits[k][i]));

    let chosen: Vec<usize> = if cand.len() <= EXACT_PIERCING_LIMIT {
        let mut masks: Vec<u32> = (1..(1u32 << cand.len())).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        masks
            .into_iter()
            .map(|m| (0..cand.len()).filter(|k| m >> k & 1 == 1).collect::<Vec<_>>())
            .find(|sel| covers(sel))
            .unwrap_or_else(|| (0..cand.len()).collect())
    } else {
        let mut sel = Vec::new();
        let mut covered = vec![false; n];
        while covered.iter().any(|c| !c) {
            let best = (0..cand.len())
                .max_by_key(|&k| (0..n).filter(|&i| !covered[i] && hits[k][i]).count())
                .expect("candidates exist");
            if (0..n).all(|i| covered[i] || !hits[best][i]) {
                break;
            }
            for i in 0..n {
                covered[i] |= hits[best][i];
            }
            sel.push(best);
        }
        sel.sort_unstable();
        sel
    };

    let colors: Vec<usize> = (0..n)
        .map(|i| chosen.iter().position(|&k| hits[k][i]).unwrap_or(chosen.len()))
        .collect();
    let count = {
        let mut c = colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    let proper = topo.edges().iter().all(|&(a, b)| colors[a] != colors[b]);
    let verdict = match chromatic_number(topo) {
        Ok(chi) if chi == count => ColoringVerdict::Minimal,
        Ok(chi) => ColoringVerdict::NotMinimal { chromatic: chi },
        Err(_) => ColoringVerdict::Skipped,
    };
    Coloring {
        colors,
        count,
        proper,
        verdict,
    }
}

/// Coloring induced by the fixed point in the limit of vanishing guards.
pub fn prediction_coloring(
    topo: &Topology,
    cover: &CliqueCover,
    demands: &[Q],
    arrangement: &Arrangement,
) -> Result<Coloring, SpectralError> {
    let pred = predict_fixed_point(cover, demands, Q::from_integer(0), arrangement)?;
    let theta = pred.default_theta();
    let start: Vec<f64> = pred.start_positions(theta).iter().map(to_f64).collect();
    let width: Vec<f64> = pred.gamma_at(theta).iter().map(to_f64).collect();
    Ok(coloring_from_slots(topo, &start, &width))
}

/// Coloring induced by the slots of a simulated state.
pub fn state_coloring(topo: &Topology, state: &SchedState) -> Coloring {
    let start: Vec<f64> = state.start.iter().map(|p| (1.0 - p).rem_euclid(1.0)).collect();
    coloring_from_slots(topo, &start, &state.gammas())
}

/// Exact chromatic number by backtracking.
pub fn chromatic_number(topo: &Topology) -> Result<usize, SpectralError> {
    let n = topo.node_count();
    if n > EXACT_CHROMATIC_LIMIT {
        return Err(SpectralError::TooLargeForExactChromatic {
            nodes: n,
            limit: EXACT_CHROMATIC_LIMIT,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    fn assign(topo: &Topology, k: usize, i: usize, colors: &mut Vec<usize>) -> bool {
        if i == colors.len() {
            return true;
        }
        let used = colors[..i].iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..k.min(used + 1) {
            if topo.neighbors(i).iter().all(|&j| j >= i || colors[j] != c) {
                colors[i] = c;
                if assign(topo, k, i + 1, colors) {
                    return true;
                }
            }
        }
        false
    }
    let mut colors = vec![0; n];
    Ok((1..=n).find(|&k| assign(topo, k, 0, &mut colors)).expect("n colors always suffice"))
}
