//! Exact fixed-point predictions for the scheduling protocol.
//!
//! A prediction lists, for every clique, the interleaved guard/slot vector
//! `Υ_c = [Θ_{π1}, Γ_{π1}, Θ_{π2}, …]` in a given firing order. Entries are
//! affine in a single free parameter `θ` so that set-valued fixed points of
//! chained cliques can be represented exactly; for unique fixed points every
//! entry is constant.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::ratio::{to_f64, Q};
use crate::sched::same_cyclic_order;
use crate::topology::{clique_totals, CliqueCover};

/// Per-clique cyclic firing order.
pub type Arrangement = Vec<Vec<usize>>;

/// Value `c + s·θ` with exact rational coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineRatio {
    pub c: Q,
    pub s: Q,
}

impl AffineRatio {
    pub fn constant(c: Q) -> Self {
        AffineRatio { c, s: zero() }
    }

    pub fn theta() -> Self {
        AffineRatio { c: zero(), s: one() }
    }

    pub fn eval(&self, theta: Q) -> Q {
        self.c + self.s * theta
    }

    pub fn eval_f64(&self, theta: f64) -> f64 {
        to_f64(&self.c) + to_f64(&self.s) * theta
    }

    pub fn is_constant(&self) -> bool {
        self.s == zero()
    }
}

impl Add for AffineRatio {
    type Output = AffineRatio;
    fn add(self, o: AffineRatio) -> AffineRatio {
        AffineRatio {
            c: self.c + o.c,
            s: self.s + o.s,
        }
    }
}

impl Sub for AffineRatio {
    type Output = AffineRatio;
    fn sub(self, o: AffineRatio) -> AffineRatio {
        AffineRatio {
            c: self.c - o.c,
            s: self.s - o.s,
        }
    }
}

impl Mul<Q> for AffineRatio {
    type Output = AffineRatio;
    fn mul(self, k: Q) -> AffineRatio {
        AffineRatio {
            c: self.c * k,
            s: self.s * k,
        }
    }
}

fn zero() -> Q {
    Q::from_integer(0)
}

fn one() -> Q {
    Q::from_integer(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictionKind {
    SingleClique,
    TwoClique,
    MultiClique,
}

/// Admissible interval of the free parameter and where it appears.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaRange {
    pub lo: Q,
    pub hi: Q,
    /// `upsilon[clique][entry]` equals `θ`.
    pub clique: usize,
    pub entry: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointPrediction {
    pub kind: PredictionKind,
    pub orders: Arrangement,
    pub upsilon: Vec<Vec<AffineRatio>>,
    pub gamma: Vec<AffineRatio>,
    pub theta: Option<ThetaRange>,
}

impl FixedPointPrediction {
    pub fn is_unique(&self) -> bool {
        self.theta.is_none()
    }

    /// Lower end of the admissible range, or zero for unique predictions.
    pub fn default_theta(&self) -> Q {
        self.theta.as_ref().map_or(zero(), |t| t.lo)
    }

    pub fn upsilon_at(&self, theta: Q) -> Vec<Vec<Q>> {
        self.upsilon.iter().map(|u| u.iter().map(|a| a.eval(theta)).collect()).collect()
    }

    pub fn gamma_at(&self, theta: Q) -> Vec<Q> {
        self.gamma.iter().map(|a| a.eval(theta)).collect()
    }

    pub fn gamma_f64(&self, theta: f64) -> Vec<f64> {
        self.gamma.iter().map(|a| a.eval_f64(theta)).collect()
    }

    /// Checks observed guard/slot vectors against the prediction. For a
    /// set-valued prediction the parameter is read off the observation and
    /// must fall in the admissible range. Returns the parameter used.
    pub fn matches(&self, observed: &[Vec<f64>], tol: f64) -> Option<f64> {
        if observed.len() != self.upsilon.len() {
            return None;
        }
        let theta = match &self.theta {
            None => 0.0,
            Some(r) => {
                let t = *observed.get(r.clique)?.get(r.entry)?;
                if t < to_f64(&r.lo) - tol || t > to_f64(&r.hi) + tol {
                    return None;
                }
                t
            }
        };
        let ok = self.upsilon.iter().zip(observed).all(|(pred, obs)| {
            pred.len() == obs.len() && pred.iter().zip(obs).all(|(p, o)| (p.eval_f64(theta) - o).abs() <= tol)
        });
        ok.then_some(theta)
    }

    /// Slot start times within one frame, anchored so that the first node of
    /// the first clique starts at time zero.
    pub fn start_positions(&self, theta: Q) -> Vec<Q> {
        let n = self.gamma.len();
        let ups = self.upsilon_at(theta);
        let gam = self.gamma_at(theta);
        let mut pos: Vec<Option<Q>> = vec![None; n];
        if let Some(&first) = self.orders.first().and_then(|o| o.first()) {
            pos[first] = Some(zero());
        }
        let mut done = vec![false; self.orders.len()];
        loop {
            let next = (0..self.orders.len()).find(|&c| !done[c] && self.orders[c].iter().any(|&i| pos[i].is_some()));
            let Some(c) = next else { break };
            done[c] = true;
            let ord = &self.orders[c];
            let m = ord.len();
            let k0 = ord.iter().position(|&i| pos[i].is_some()).expect("anchor exists");
            for step in 1..m {
                let cur = ord[(k0 + step - 1) % m];
                let k = (k0 + step) % m;
                let nxt = ord[k];
                if pos[nxt].is_none() {
                    let p = pos[cur].expect("walked in order") + gam[cur] + ups[c][2 * k];
                    pos[nxt] = Some(p - p.floor());
                }
            }
        }
        pos.into_iter().map(|p| p.unwrap_or_else(zero)).collect()
    }
}

/// `Υ = (δ, D_{π1}, δ, D_{π2}, …) / Σ(D+δ)` for demands listed in firing order.
pub fn fixed_point_single_clique(demands_in_order: &[Q], delta: Q) -> Vec<Q> {
    let total: Q = demands_in_order.iter().map(|&d| d + delta).sum();
    demands_in_order.iter().flat_map(|&d| [delta / total, d / total]).collect()
}

/// Firing order of every clique by descending node id.
pub fn default_arrangement(cover: &CliqueCover) -> Arrangement {
    cover
        .cliques
        .iter()
        .map(|m| {
            let mut v = m.clone();
            v.sort_unstable_by(|a, b| b.cmp(a));
            v
        })
        .collect()
}

fn check_inputs(cover: &CliqueCover, demands: &[Q], delta: Q, arr: &Arrangement) -> Result<(), SpectralError> {
    if cover.is_empty() {
        return Err(SpectralError::InvalidInput("empty clique cover".into()));
    }
    if demands.len() != cover.membership.len() {
        return Err(SpectralError::InvalidInput(format!(
            "{} demands for {} nodes",
            demands.len(),
            cover.membership.len()
        )));
    }
    if delta < zero() || demands.iter().any(|d| *d <= zero()) {
        return Err(SpectralError::InvalidInput("demands must be positive and delta non-negative".into()));
    }
    if arr.len() != cover.len() {
        return Err(SpectralError::UnsupportedArrangement("one firing order per clique is required".into()));
    }
    for (c, ord) in arr.iter().enumerate() {
        let mut sorted = ord.clone();
        sorted.sort_unstable();
        if sorted != cover.cliques[c] {
            return Err(SpectralError::UnsupportedArrangement(format!(
                "order of clique {c} is not a permutation of its members"
            )));
        }
    }
    Ok(())
}

/// True when cliques and gateway nodes form a forest, i.e. the cliques are
/// joined in chains and trees without cycles through shared nodes.
fn gateways_form_forest(cover: &CliqueCover) -> bool {
    let k = cover.len();
    let mut parent: Vec<usize> = (0..k + cover.membership.len()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, cs) in cover.membership.iter().enumerate() {
        if cs.len() < 2 {
            continue;
        }
        for &c in cs {
            let (a, b) = (root(&mut parent, c), root(&mut parent, k + i));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
    }
    true
}

/// Dispatches on the number of cliques.
pub fn predict_fixed_point(
    cover: &CliqueCover,
    demands: &[Q],
    delta: Q,
    arrangement: &Arrangement,
) -> Result<FixedPointPrediction, SpectralError> {
    check_inputs(cover, demands, delta, arrangement)?;
    match cover.len() {
        1 => {
            let ord = &arrangement[0];
            let d: Vec<Q> = ord.iter().map(|&i| demands[i]).collect();
            let ups: Vec<AffineRatio> = fixed_point_single_clique(&d, delta)
                .into_iter()
                .map(AffineRatio::constant)
                .collect();
            let mut gamma = vec![AffineRatio::constant(zero()); demands.len()];
            for (k, &i) in ord.iter().enumerate() {
                gamma[i] = ups[2 * k + 1];
            }
            Ok(FixedPointPrediction {
                kind: PredictionKind::SingleClique,
                orders: arrangement.clone(),
                upsilon: vec![ups],
                gamma,
                theta: None,
            })
        }
        2 => fixed_point_two_clique(cover, demands, delta, arrangement),
        _ => fixed_point_multiclique(cover, demands, delta, arrangement),
    }
}

/// Splits a clique's cyclic order into runs of local nodes following each
/// shared node of `shared_seq`.
fn segments(order: &[usize], shared_seq: &[usize], is_shared: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let m = order.len();
    let k0 = order.iter().position(|&x| x == shared_seq[0]).expect("shared node in order");
    let mut out: Vec<Vec<usize>> = Vec::new();
    for step in 0..m {
        let i = order[(k0 + step) % m];
        if is_shared(i) {
            out.push(Vec::new());
        } else {
            out.last_mut().expect("starts at a shared node").push(i);
        }
    }
    out
}

/// Two overlapping cliques. The shared nodes cut each clique's frame into
/// segments; within a segment the clique needing more room fixes its length
/// and the other clique stretches its local slots and guards to match.
pub fn fixed_point_two_clique(
    cover: &CliqueCover,
    demands: &[Q],
    delta: Q,
    arrangement: &Arrangement,
) -> Result<FixedPointPrediction, SpectralError> {
    check_inputs(cover, demands, delta, arrangement)?;
    if cover.len() != 2 {
        return Err(SpectralError::InvalidInput(format!("expected two cliques, got {}", cover.len())));
    }
    let in_both = |i: usize| cover.contains(0, i) && cover.contains(1, i);
    let seq0: Vec<usize> = arrangement[0].iter().copied().filter(|&i| in_both(i)).collect();
    let seq1: Vec<usize> = arrangement[1].iter().copied().filter(|&i| in_both(i)).collect();
    if seq0.is_empty() {
        return Err(SpectralError::AssumptionViolated("the two cliques share no node".into()));
    }
    if !same_cyclic_order(&seq0, &seq1) {
        return Err(SpectralError::UnsupportedArrangement(
            "shared nodes fire in different cyclic orders in the two cliques".into(),
        ));
    }
    let segs: Vec<Vec<Vec<usize>>> = (0..2).map(|c| segments(&arrangement[c], &seq0, in_both)).collect();
    let m = seq0.len();
    let units = |c: usize, j: usize| -> Q { segs[c][j].iter().map(|&i| demands[i] + delta).sum::<Q>() + delta };
    let ustar: Vec<Q> = (0..m).map(|j| units(0, j).max(units(1, j))).collect();
    let total: Q = seq0.iter().map(|&s| demands[s]).sum::<Q>() + ustar.iter().copied().sum::<Q>();

    let n = demands.len();
    let mut gamma = vec![AffineRatio::constant(zero()); n];
    for &s in &seq0 {
        gamma[s] = AffineRatio::constant(demands[s] / total);
    }
    // guard[c][i]: the guard preceding node i in clique c.
    let mut guard = vec![vec![zero(); n]; 2];
    for c in 0..2 {
        for j in 0..m {
            let u = units(c, j);
            let f = if u == zero() { zero() } else { ustar[j] / (u * total) };
            for &i in &segs[c][j] {
                gamma[i] = AffineRatio::constant(demands[i] * f);
                guard[c][i] = delta * f;
            }
            guard[c][seq0[(j + 1) % m]] = delta * f;
        }
    }
    let upsilon = (0..2)
        .map(|c| {
            arrangement[c]
                .iter()
                .flat_map(|&i| [AffineRatio::constant(guard[c][i]), gamma[i]])
                .collect()
        })
        .collect();
    Ok(FixedPointPrediction {
        kind: PredictionKind::TwoClique,
        orders: arrangement.clone(),
        upsilon,
        gamma,
        theta: None,
    })
}

struct Greedy<'a> {
    demands: &'a [Q],
    delta: Q,
    pos: Vec<Option<AffineRatio>>,
    gam: Vec<Option<AffineRatio>>,
    frame: Vec<Option<usize>>,
    frames: usize,
    theta: Option<ThetaRange>,
    upsilon: Vec<Option<Vec<AffineRatio>>>,
}

impl Greedy<'_> {
    fn rep(&self) -> Q {
        self.theta.as_ref().map_or(zero(), |t| (t.lo + t.hi) / Q::from_integer(2))
    }

    /// Reduces an affine value modulo one at the representative parameter.
    fn cyc(&self, a: AffineRatio) -> AffineRatio {
        let k = a.eval(self.rep()).floor();
        AffineRatio { c: a.c - k, s: a.s }
    }

    fn place(&mut self, nodes: &[usize], mut t: AffineRatio, scale: AffineRatio, frame: usize) {
        for &i in nodes {
            t = t + scale * self.delta;
            self.pos[i] = Some(t);
            let g = scale * self.demands[i];
            self.gam[i] = Some(g);
            self.frame[i] = Some(frame);
            t = t + g;
        }
    }

    /// Firing position of the first member of the single contiguous block
    /// of placed nodes in `ord`.
    fn block_start(&self, ord: &[usize]) -> Option<usize> {
        let m = ord.len();
        let starts: Vec<usize> = (0..m)
            .filter(|&k| self.pos[ord[k]].is_some() && self.pos[ord[(k + m - 1) % m]].is_none())
            .collect();
        (starts.len() == 1).then(|| starts[0])
    }

    /// Frame share per unit of demand that the free members of a clique
    /// would receive if it were placed next. `None` when the clique has no
    /// free members or would bridge separately placed groups.
    fn free_scale(&self, ord: &[usize], total: Q) -> Option<Q> {
        let m = ord.len();
        let fixed = ord.iter().filter(|&&i| self.pos[i].is_some()).count();
        if fixed == 0 {
            return Some(one() / total);
        }
        let mut frames: Vec<usize> = ord.iter().filter_map(|&i| self.frame[i]).collect();
        frames.sort_unstable();
        frames.dedup();
        if fixed == m || frames.len() != 1 {
            return None;
        }
        let k0 = self.block_start(ord)?;
        let first = ord[k0];
        let last = ord[(k0 + fixed - 1) % m];
        let span = self.cyc(self.pos[last]? - self.pos[first]?) + self.gam[last]?;
        let room = one() - span.eval(self.rep());
        let denom: Q = (fixed..m).map(|s| self.demands[ord[(k0 + s) % m]] + self.delta).sum::<Q>() + self.delta;
        Some(room / denom)
    }

    fn extract(&self, ord: &[usize]) -> Vec<AffineRatio> {
        let m = ord.len();
        (0..m)
            .flat_map(|k| {
                let i = ord[k];
                let p = ord[(k + m - 1) % m];
                let gp = self.gam[p].expect("placed");
                let theta_i = self.cyc(self.pos[i].expect("placed") - self.pos[p].expect("placed") - gp);
                [theta_i, self.gam[i].expect("placed")]
            })
            .collect()
    }

    /// Smallest guard preceding `i` over already processed cliques.
    fn guard_before(&self, arr: &Arrangement, i: usize) -> Q {
        self.processed_min(arr, i, 0)
    }

    /// Smallest guard following `i` over already processed cliques.
    fn guard_after(&self, arr: &Arrangement, i: usize) -> Q {
        self.processed_min(arr, i, 1)
    }

    fn processed_min(&self, arr: &Arrangement, i: usize, offset: usize) -> Q {
        let rep = self.rep();
        let mut best: Option<Q> = None;
        for (c, ups) in self.upsilon.iter().enumerate() {
            let Some(ups) = ups else { continue };
            let ord = &arr[c];
            if let Some(k) = ord.iter().position(|&x| x == i) {
                let idx = 2 * ((k + offset) % ord.len());
                let v = ups[idx].eval(rep);
                best = Some(best.map_or(v, |b: Q| b.min(v)));
            }
        }
        best.unwrap_or_else(zero)
    }
}

/// Greedy construction for chains and trees of cliques by progressive
/// filling. The next clique placed is always the one offering its free
/// members the smallest share per unit of demand, which before anything is
/// placed means the largest total demand; a clique whose members are not
/// yet placed gets its single-clique split, one that already has a contiguous
/// placed block fills the remaining frame proportionally, and one that
/// bridges two independently placed groups through exactly two nodes
/// introduces the free parameter `θ`.
pub fn fixed_point_multiclique(
    cover: &CliqueCover,
    demands: &[Q],
    delta: Q,
    arrangement: &Arrangement,
) -> Result<FixedPointPrediction, SpectralError> {
    check_inputs(cover, demands, delta, arrangement)?;
    if !gateways_form_forest(cover) {
        return Err(SpectralError::AssumptionViolated(
            "cliques are joined in a cycle through their shared nodes".into(),
        ));
    }
    let n = demands.len();
    let totals = clique_totals(cover, demands, delta);
    let mut done = vec![false; cover.len()];

    let mut g = Greedy {
        demands,
        delta,
        pos: vec![None; n],
        gam: vec![None; n],
        frame: vec![None; n],
        frames: 0,
        theta: None,
        upsilon: vec![None; cover.len()],
    };

    for _ in 0..cover.len() {
        let c = (0..cover.len())
            .filter(|&c| !done[c])
            .min_by(|&a, &b| {
                let (ka, kb) = (g.free_scale(&arrangement[a], totals[a]), g.free_scale(&arrangement[b], totals[b]));
                match (ka, kb) {
                    (Some(x), Some(y)) => x.cmp(&y),
                    (Some(_), None) => Ordering::Less,
                    (None, Some(_)) => Ordering::Greater,
                    (None, None) => Ordering::Equal,
                }
                .then(a.cmp(&b))
            })
            .expect("cliques remain");
        done[c] = true;
        let ord = &arrangement[c];
        let m = ord.len();
        let fixed: Vec<usize> = ord.iter().copied().filter(|&i| g.pos[i].is_some()).collect();
        let mut frames: Vec<usize> = fixed.iter().map(|&i| g.frame[i].expect("placed")).collect();
        frames.sort_unstable();
        frames.dedup();

        if fixed.is_empty() {
            let f = g.frames;
            g.frames += 1;
            let scale = AffineRatio::constant(one() / totals[c]);
            g.place(ord, AffineRatio::constant(zero()), scale, f);
        } else if frames.len() == 1 {
            if fixed.len() < m {
                let k0 = g.block_start(ord).ok_or_else(|| {
                    SpectralError::AssumptionViolated(format!(
                        "placed members of clique {c} are not contiguous in its firing order"
                    ))
                })?;
                let first = ord[k0];
                let last = ord[(k0 + fixed.len() - 1) % m];
                let gl = g.gam[last].expect("placed");
                let span = g.cyc(g.pos[last].expect("placed") - g.pos[first].expect("placed")) + gl;
                let free: Vec<usize> = (fixed.len()..m).map(|s| ord[(k0 + s) % m]).collect();
                let room = AffineRatio::constant(one()) - span;
                if room.eval(g.rep()) <= zero() {
                    return Err(SpectralError::AssumptionViolated(format!(
                        "no room left in the frame for clique {c}"
                    )));
                }
                let denom: Q = free.iter().map(|&i| demands[i] + delta).sum::<Q>() + delta;
                let scale = room * (one() / denom);
                let start = g.pos[last].expect("placed") + gl;
                g.place(&free, start, scale, frames[0]);
            }
        } else if frames.len() == 2 && fixed.len() == 2 && g.theta.is_none() {
            let ka = ord.iter().position(|&i| i == fixed[0]).expect("member");
            let kb = ord.iter().position(|&i| i == fixed[1]).expect("member");
            let gap_ab = (kb + m - ka) % m - 1;
            let gap_ba = (ka + m - kb) % m - 1;
            // x -> y is the pair of consecutive placed nodes with no free
            // node between them.
            let (x, y, ky) = if gap_ab == 0 {
                (fixed[0], fixed[1], kb)
            } else if gap_ba == 0 {
                (fixed[1], fixed[0], ka)
            } else {
                return Err(SpectralError::AssumptionViolated(format!(
                    "clique {c} has unplaced members on both sides of its bridging nodes"
                )));
            };
            if m == 2 {
                return Err(SpectralError::UnsupportedArrangement(format!(
                    "clique {c} bridges two placed groups without a free member, so its spare guard \
                     can also shrink the shares of its members"
                )));
            }
            let gx = g.gam[x].expect("placed");
            let gy = g.gam[y].expect("placed");
            let free: Vec<usize> = (1..m - 1).map(|s| ord[(ky + s) % m]).collect();
            let lo = g.guard_before(arrangement, y).max(g.guard_after(arrangement, x));
            let bound = g.guard_after(arrangement, y).max(g.guard_before(arrangement, x));
            let denom: Q = free.iter().map(|&i| demands[i] + delta).sum::<Q>() + delta;
            let mut hi = one() - gx.c - gy.c;
            if delta > zero() {
                hi -= bound * denom / delta;
            }
            if lo > hi {
                return Err(SpectralError::AssumptionViolated(format!(
                    "empty admissible range for the free guard of clique {c}"
                )));
            }
            let shift = g.pos[x].expect("placed") + gx + AffineRatio::theta() - g.pos[y].expect("placed");
            let fy = g.frame[y];
            let fx = g.frame[x];
            for i in 0..n {
                if g.frame[i].is_some() && g.frame[i] == fy {
                    g.pos[i] = Some(g.pos[i].expect("placed") + shift);
                    g.frame[i] = fx;
                }
            }
            g.theta = Some(ThetaRange {
                lo,
                hi,
                clique: c,
                entry: 2 * ky,
            });
            let room = AffineRatio::constant(one()) - gx - gy - AffineRatio::theta();
            let scale = room * (one() / denom);
            let start = g.pos[y].expect("placed") + gy;
            g.place(&free, start, scale, fx.expect("placed"));
        } else {
            return Err(SpectralError::AssumptionViolated(format!(
                "clique {c} joins {} placed groups through {} nodes",
                frames.len(),
                fixed.len()
            )));
        }

        let ups = g.extract(ord);
        let sum: Q = ups.iter().map(|a| a.eval(g.rep())).sum();
        if sum != one() || ups.iter().any(|a| a.eval(g.rep()) < zero()) {
            return Err(SpectralError::UnsupportedArrangement(format!(
                "firing order of clique {c} is inconsistent with the placement of its members"
            )));
        }
        g.upsilon[c] = Some(ups);
    }

    let gamma = g.gam.iter().map(|x| x.expect("every node is in a clique")).collect();
    let upsilon = g.upsilon.into_iter().map(|u| u.expect("processed")).collect();
    Ok(FixedPointPrediction {
        kind: PredictionKind::MultiClique,
        orders: arrangement.clone(),
        upsilon,
        gamma,
        theta: g.theta,
    })
}
