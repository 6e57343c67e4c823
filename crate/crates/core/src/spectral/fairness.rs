use serde::{Deserialize, Serialize};

use super::fixed_point::FixedPointPrediction;
use crate::ratio::{to_f64, Q};
use crate::sched::SchedState;
use crate::topology::{clique_totals, CliqueCover};

/// Tolerance for exact predictions.
pub const PREDICTION_TOL: f64 = 1e-9;
/// Tolerance for simulated states stopped at a numerical fixed point.
pub const STATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FairnessWitness {
    /// Consecutive local nodes with different normalized slots.
    Consecutive { clique: usize, node: usize, pre: usize },
    /// Local nodes of one clique with different normalized slots.
    LocalPair { clique: usize, a: usize, b: usize },
    /// Slot narrower than the node's smallest clique share.
    MinShare { node: usize, gamma: f64, bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub partial: bool,
    pub global: bool,
    pub witnesses: Vec<FairnessWitness>,
}

pub fn check_fairness(
    cover: &CliqueCover,
    orders: &[Vec<usize>],
    gamma: &[f64],
    demands: &[Q],
    delta: Q,
    tol: f64,
) -> FairnessReport {
    let d: Vec<f64> = demands.iter().map(to_f64).collect();
    let ratio = |i: usize| gamma[i] / d[i];
    let local = |i: usize| cover.membership[i].len() == 1;
    let mut witnesses = Vec::new();

    let mut partial = true;
    for (c, ord) in orders.iter().enumerate() {
        let m = ord.len();
        for k in 0..m {
            let (i, j) = (ord[k], ord[(k + m - 1) % m]);
            if i != j && local(i) && local(j) && (ratio(i) - ratio(j)).abs() > tol {
                partial = false;
                witnesses.push(FairnessWitness::Consecutive { clique: c, node: i, pre: j });
            }
        }
    }

    let mut global = true;
    for (c, locals) in cover.local.iter().enumerate() {
        for (x, &a) in locals.iter().enumerate() {
            for &b in &locals[x + 1..] {
                if (ratio(a) - ratio(b)).abs() > tol {
                    global = false;
                    witnesses.push(FairnessWitness::LocalPair { clique: c, a, b });
                }
            }
        }
    }
    let totals: Vec<f64> = clique_totals(cover, demands, delta).iter().map(to_f64).collect();
    for (i, cs) in cover.membership.iter().enumerate() {
        let bound = cs.iter().map(|&c| d[i] / totals[c]).fold(f64::INFINITY, f64::min);
        if gamma[i] < bound - tol {
            global = false;
            witnesses.push(FairnessWitness::MinShare {
                node: i,
                gamma: gamma[i],
                bound,
            });
        }
    }
    FairnessReport {
        partial,
        global: global && partial,
        witnesses,
    }
}

/// Fairness of a prediction at parameter `theta`.
pub fn prediction_fairness(
    pred: &FixedPointPrediction,
    theta: Q,
    cover: &CliqueCover,
    demands: &[Q],
    delta: Q,
) -> FairnessReport {
    let gamma: Vec<f64> = pred.gamma_at(theta).iter().map(to_f64).collect();
    check_fairness(cover, &pred.orders, &gamma, demands, delta, PREDICTION_TOL)
}

/// Fairness of a simulated state.
pub fn state_fairness(state: &SchedState, cover: &CliqueCover, demands: &[Q], delta: Q) -> FairnessReport {
    check_fairness(cover, &state.order, &state.gammas(), demands, delta, STATE_TOL)
}

#[cfg(test)]
mod tests {
    use super::super::fixed_point::{default_arrangement, predict_fixed_point};
    use super::*;
    use crate::ratio::{q, qi};
    use crate::topology::generators::{complete, three_clique_chain};
    use crate::topology::maximal_cliques;

    #[test]
    fn single_clique_is_fair() {
        let cover = maximal_cliques(&complete(4, 0.0).unwrap()).unwrap();
        let d = vec![qi(1), qi(2), qi(3), qi(4)];
        let p = predict_fixed_point(&cover, &d, qi(1), &default_arrangement(&cover)).unwrap();
        let r = prediction_fairness(&p, qi(0), &cover, &d, qi(1));
        assert!(r.partial && r.global, "{r:?}");
    }

    #[test]
    fn chain_fairness_depends_on_theta() {
        let cover = maximal_cliques(&three_clique_chain(0.0).unwrap()).unwrap();
        let d = vec![qi(4); 9];
        let p = predict_fixed_point(&cover, &d, qi(1), &default_arrangement(&cover)).unwrap();
        let wide = prediction_fairness(&p, q(1, 20), &cover, &d, qi(1));
        assert!(wide.partial && wide.global);
        let narrow = prediction_fairness(&p, q(3, 10), &cover, &d, qi(1));
        assert!(narrow.partial && !narrow.global);
        assert!(narrow
            .witnesses
            .iter()
            .any(|w| matches!(w, FairnessWitness::MinShare { node: 4, .. })));
    }

    #[test]
    fn unequal_locals_break_partial() {
        let cover = maximal_cliques(&complete(3, 0.0).unwrap()).unwrap();
        let r = check_fairness(&cover, &[vec![2, 1, 0]], &[0.3, 0.2, 0.2], &[qi(4); 3], qi(1), 1e-9);
        assert!(!r.partial && !r.global);
    }
}
