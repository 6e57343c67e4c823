//! Undirected network graph with symmetric propagation delays, plus the
//! maximal-clique decomposition and demand partition derived from it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rand::Rng;
use thiserror::Error;

use crate::ratio::Q;

/// Default ceiling on the number of maximal cliques accepted by
/// [`maximal_cliques`].
pub const DEFAULT_CLIQUE_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("edge list has {edges} entries but delay list has {delays}")]
    LengthMismatch { edges: usize, delays: usize },
    #[error("node {node} is out of range for a {count}-node graph")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("self loop on node {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) listed more than once")]
    DuplicateEdge(usize, usize),
    #[error("delay {tau} on edge ({i}, {j}) is outside [0, 1)")]
    DelayOutOfRange { i: usize, j: usize, tau: f64 },
    #[error("graph is disconnected: node {unreachable} cannot be reached from node 0")]
    DisconnectedGraph { unreachable: usize },
    #[error("more than {cap} maximal cliques")]
    CliqueExplosion { cap: usize },
    #[error("cliques {a} and {b} share nodes and have equal total demand")]
    AmbiguousPartition { a: usize, b: usize },
    #[error("demand vector has {got} entries for {expected} nodes")]
    DemandLength { got: usize, expected: usize },
    #[error("demands and guard must be positive")]
    NonPositiveDemand,
}

/// Connected undirected graph with a dense symmetric delay matrix measured in
/// oscillator periods.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    n: usize,
    adj: Vec<Vec<usize>>,
    delay: Vec<f64>,
    edges: Vec<(usize, usize)>,
}

impl Topology {
    /// Validates and builds a topology. Edges are unordered; `(i, j)` and
    /// `(j, i)` denote the same edge.
    pub fn new(
        node_count: usize,
        edges: &[(usize, usize)],
        delays: &[f64],
    ) -> Result<Self, TopologyError> {
        if node_count == 0 {
            return Err(TopologyError::Empty);
        }
        if edges.len() != delays.len() {
            return Err(TopologyError::LengthMismatch {
                edges: edges.len(),
                delays: delays.len(),
            });
        }
        let n = node_count;
        let mut adj = vec![Vec::new(); n];
        let mut delay = vec![0.0; n * n];
        let mut seen = BTreeSet::new();
        for (&(i, j), &tau) in edges.iter().zip(delays) {
            for node in [i, j] {
                if node >= n {
                    return Err(TopologyError::NodeOutOfRange { node, count: n });
                }
            }
            if i == j {
                return Err(TopologyError::SelfLoop(i));
            }
            if !(0.0..1.0).contains(&tau) || !tau.is_finite() {
                return Err(TopologyError::DelayOutOfRange { i, j, tau });
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(TopologyError::DuplicateEdge(key.0, key.1));
            }
            adj[i].push(j);
            adj[j].push(i);
            delay[i * n + j] = tau;
            delay[j * n + i] = tau;
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let topo = Topology {
            n,
            adj,
            delay,
            edges: seen.into_iter().collect(),
        };
        topo.check_connected()?;
        Ok(topo)
    }

    /// Builds a topology from `(i, j, tau)` triples.
    pub fn from_triples(node_count: usize, triples: &[(usize, usize, f64)]) -> Result<Self, TopologyError> {
        let edges: Vec<_> = triples.iter().map(|&(i, j, _)| (i, j)).collect();
        let delays: Vec<_> = triples.iter().map(|&(_, _, t)| t).collect();
        Self::new(node_count, &edges, &delays)
    }

    /// Builds a topology where every edge carries the same delay.
    pub fn uniform(node_count: usize, edges: &[(usize, usize)], tau: f64) -> Result<Self, TopologyError> {
        Self::new(node_count, edges, &vec![tau; edges.len()])
    }

    fn check_connected(&self) -> Result<(), TopologyError> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(unreachable) => Err(TopologyError::DisconnectedGraph { unreachable }),
            None => Ok(()),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Edges as sorted pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.adj[i].binary_search(&j).is_ok()
    }

    /// Delay of the direct link, `0` for non-edges and the diagonal.
    pub fn delay(&self, i: usize, j: usize) -> f64 {
        self.delay[i * self.n + j]
    }

    pub fn max_delay(&self) -> f64 {
        self.edges.iter().map(|&(i, j)| self.delay(i, j)).fold(0.0, f64::max)
    }

    /// Smallest delay over edges (`0` for an edgeless single node).
    pub fn min_edge_delay(&self) -> f64 {
        if self.edges.is_empty() {
            return 0.0;
        }
        self.edges.iter().map(|&(i, j)| self.delay(i, j)).fold(f64::INFINITY, f64::min)
    }

    pub fn has_delays(&self) -> bool {
        self.max_delay() > 0.0
    }

    /// Minimum accumulated delay from `source` to every node.
    pub fn path_delays_from(&self, source: usize) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
            }
        }
        let mut dist = vec![f64::INFINITY; self.n];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::from([Item(0.0, source)]);
        while let Some(Item(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &v in &self.adj[u] {
                let nd = d + self.delay(u, v);
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Item(nd, v));
                }
            }
        }
        dist
    }

    /// Accumulated delay along the minimum-delay path from `i` to `j`.
    pub fn path_delay(&self, i: usize, j: usize) -> f64 {
        self.path_delays_from(i)[j]
    }

    /// Largest accumulated delay from `h` to any other node.
    pub fn delay_eccentricity(&self, h: usize) -> f64 {
        self.path_delays_from(h).into_iter().fold(0.0, f64::max)
    }

    /// Returns a copy extended by one node attached with the given
    /// `(neighbor, tau)` links.
    pub fn with_extra_node(&self, links: &[(usize, f64)]) -> Result<Topology, TopologyError> {
        let mut triples: Vec<(usize, usize, f64)> =
            self.edges.iter().map(|&(i, j)| (i, j, self.delay(i, j))).collect();
        triples.extend(links.iter().map(|&(j, t)| (self.n, j, t)));
        Topology::from_triples(self.n + 1, &triples)
    }
}

/// Maximal cliques together with shared and local node sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueCover {
    /// Each clique sorted ascending; cliques sorted lexicographically.
    pub cliques: Vec<Vec<usize>>,
    /// `membership[i]` lists the cliques containing node `i`, ascending.
    pub membership: Vec<Vec<usize>>,
    /// Non-empty pairwise intersections keyed by `(c, c')` with `c < c'`.
    pub shared: BTreeMap<(usize, usize), Vec<usize>>,
    /// Nodes that belong to exactly one clique, per clique.
    pub local: Vec<Vec<usize>>,
}

impl CliqueCover {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn is_shared(&self, i: usize) -> bool {
        self.membership[i].len() > 1
    }

    pub fn contains(&self, c: usize, i: usize) -> bool {
        self.cliques[c].binary_search(&i).is_ok()
    }

    fn from_cliques(n: usize, mut cliques: Vec<Vec<usize>>) -> Self {
        for c in &mut cliques {
            c.sort_unstable();
        }
        cliques.sort();
        let mut membership = vec![Vec::new(); n];
        for (c, members) in cliques.iter().enumerate() {
            for &i in members {
                membership[i].push(c);
            }
        }
        let mut shared = BTreeMap::new();
        for a in 0..cliques.len() {
            for b in a + 1..cliques.len() {
                let common: Vec<usize> = cliques[a]
                    .iter()
                    .copied()
                    .filter(|i| cliques[b].binary_search(i).is_ok())
                    .collect();
                if !common.is_empty() {
                    shared.insert((a, b), common);
                }
            }
        }
        let local = cliques
            .iter()
            .map(|members| members.iter().copied().filter(|&i| membership[i].len() == 1).collect())
            .collect();
        CliqueCover {
            cliques,
            membership,
            shared,
            local,
        }
    }
}

/// Enumerates all maximal cliques with the default cap.
pub fn maximal_cliques(topo: &Topology) -> Result<CliqueCover, TopologyError> {
    maximal_cliques_capped(topo, DEFAULT_CLIQUE_CAP)
}

/// Bron–Kerbosch enumeration with pivoting, seeded in degeneracy order.
pub fn maximal_cliques_capped(topo: &Topology, cap: usize) -> Result<CliqueCover, TopologyError> {
    let n = topo.node_count();
    let nbr: Vec<BTreeSet<usize>> = (0..n).map(|i| topo.neighbors(i).iter().copied().collect()).collect();
    let mut out = Vec::new();
    let order = degeneracy_order(topo);
    let mut position = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        position[v] = k;
    }
    for &v in &order {
        let p: BTreeSet<usize> = nbr[v].iter().copied().filter(|&u| position[u] > position[v]).collect();
        let x: BTreeSet<usize> = nbr[v].iter().copied().filter(|&u| position[u] < position[v]).collect();
        bron_kerbosch(&nbr, vec![v], p, x, &mut out, cap)?;
    }
    Ok(CliqueCover::from_cliques(n, out))
}

fn bron_kerbosch(
    nbr: &[BTreeSet<usize>],
    r: Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<(), TopologyError> {
    if p.is_empty() && x.is_empty() {
        if out.len() >= cap {
            return Err(TopologyError::CliqueExplosion { cap });
        }
        out.push(r);
        return Ok(());
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.intersection(&nbr[u]).count())
        .expect("P or X is non-empty");
    let candidates: Vec<usize> = p.difference(&nbr[pivot]).copied().collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.intersection(&nbr[v]).copied().collect();
        let x2 = x.intersection(&nbr[v]).copied().collect();
        bron_kerbosch(nbr, r2, p2, x2, out, cap)?;
        p.remove(&v);
        x.insert(v);
    }
    Ok(())
}

fn degeneracy_order(topo: &Topology) -> Vec<usize> {
    let n = topo.node_count();
    let mut degree: Vec<usize> = (0..n).map(|i| topo.neighbors(i).len()).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("nodes remain");
        removed[v] = true;
        order.push(v);
        for &u in topo.neighbors(v) {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    order
}

/// Assignment of every node to the overlapping clique of largest total demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandPartition {
    /// `assignment[i]` is the clique index of the part containing node `i`.
    pub assignment: Vec<usize>,
    /// Clique indices sorted by non-increasing part demand `Σ_{A_c}(D+δ)`.
    pub order: Vec<usize>,
    /// Total demand `Σ_{V_c}(D+δ)` per clique.
    pub clique_totals: Vec<Q>,
}

impl DemandPartition {
    pub fn part(&self, c: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == c).collect()
    }
}

/// Total demand `Σ_{v∈V_c}(D_v+δ)` of every clique.
pub fn clique_totals(cover: &CliqueCover, demands: &[Q], delta: Q) -> Vec<Q> {
    cover
        .cliques
        .iter()
        .map(|members| members.iter().map(|&v| demands[v] + delta).sum())
        .collect()
}

pub fn demand_partition(cover: &CliqueCover, demands: &[Q], delta: Q) -> Result<DemandPartition, TopologyError> {
    let n = cover.membership.len();
    if demands.len() != n {
        return Err(TopologyError::DemandLength {
            got: demands.len(),
            expected: n,
        });
    }
    let zero = Q::from_integer(0);
    if delta <= zero || demands.iter().any(|d| *d <= zero) {
        return Err(TopologyError::NonPositiveDemand);
    }
    let totals = clique_totals(cover, demands, delta);
    for &(a, b) in cover.shared.keys() {
        if totals[a] == totals[b] {
            return Err(TopologyError::AmbiguousPartition { a, b });
        }
    }
    let assignment: Vec<usize> = cover
        .membership
        .iter()
        .map(|cs| *cs.iter().max_by(|&&a, &&b| totals[a].cmp(&totals[b])).expect("covered"))
        .collect();
    let mut part_totals = vec![zero; cover.len()];
    for (i, &c) in assignment.iter().enumerate() {
        part_totals[c] += demands[i] + delta;
    }
    let mut order: Vec<usize> = (0..cover.len()).collect();
    order.sort_by(|&a, &b| part_totals[b].cmp(&part_totals[a]).then(a.cmp(&b)));
    Ok(DemandPartition {
        assignment,
        order,
        clique_totals: totals,
    })
}

/// Outcome of the "every clique spans at most two parts" check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPairCheck {
    pub holds: bool,
    /// A violating clique and the parts it touches.
    pub witness: Option<(usize, Vec<usize>)>,
}

pub fn check_assumption_two(cover: &CliqueCover, partition: &DemandPartition) -> PartitionPairCheck {
    for (c, members) in cover.cliques.iter().enumerate() {
        let mut parts: BTreeSet<usize> = members.iter().map(|&v| partition.assignment[v]).collect();
        parts.insert(c);
        if parts.len() > 2 {
            return PartitionPairCheck {
                holds: false,
                witness: Some((c, parts.into_iter().collect())),
            };
        }
    }
    PartitionPairCheck {
        holds: true,
        witness: None,
    }
}

/// Named graph families used by tests, presets and the command line.
pub mod generators {
    use super::*;

    /// Path `0 – 1 – … – (n-1)` with a uniform per-hop delay.
    pub fn line(n: usize, tau: f64) -> Result<Topology, TopologyError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Topology::uniform(n, &edges, tau)
    }

    /// Star with center `0` and `leaves` leaves at equal delay.
    pub fn star(leaves: usize, tau: f64) -> Result<Topology, TopologyError> {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Topology::uniform(leaves + 1, &edges, tau)
    }

    pub fn complete(n: usize, tau: f64) -> Result<Topology, TopologyError> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Topology::uniform(n, &edges, tau)
    }

    pub fn ring(n: usize, tau: f64) -> Result<Topology, TopologyError> {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Topology::uniform(n, &edges, tau)
    }

    /// Union of cliques given as node lists, all links at delay `tau`.
    pub fn clique_union(n: usize, cliques: &[Vec<usize>], tau: f64) -> Result<Topology, TopologyError> {
        let mut edges = BTreeSet::new();
        for members in cliques {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    edges.insert((i.min(j), i.max(j)));
                }
            }
        }
        let edges: Vec<_> = edges.into_iter().collect();
        Topology::uniform(n, &edges, tau)
    }

    /// Two cliques sharing `shared` gateways. Nodes `0..l1` are local to the
    /// first clique, the next `shared` ids are gateways and the last `l2`
    /// ids are local to the second clique.
    pub fn two_cliques(l1: usize, shared: usize, l2: usize, tau: f64) -> Result<Topology, TopologyError> {
        let n = l1 + shared + l2;
        let first: Vec<_> = (0..l1 + shared).collect();
        let second: Vec<_> = (l1..n).collect();
        clique_union(n, &[first, second], tau)
    }

    /// Three cliques chained by single gateways: `{0,1,2,3}`, `{3,4,5}` and
    /// `{5,6,7,8}`.
    pub fn three_clique_chain(tau: f64) -> Result<Topology, TopologyError> {
        clique_union(9, &[vec![0, 1, 2, 3], vec![3, 4, 5], vec![5, 6, 7, 8]], tau)
    }

    /// Random connected graph: a random spanning tree plus each remaining
    /// pair with probability `p`; delays uniform in `[tau_lo, tau_hi]`.
    pub fn random_connected<R: Rng>(
        n: usize,
        p: f64,
        tau_lo: f64,
        tau_hi: f64,
        rng: &mut R,
    ) -> Result<Topology, TopologyError> {
        let mut edges = BTreeSet::new();
        for i in 1..n {
            let j = rng.gen_range(0..i);
            edges.insert((j, i));
        }
        for i in 0..n {
            for j in i + 1..n {
                if !edges.contains(&(i, j)) && rng.gen::<f64>() < p {
                    edges.insert((i, j));
                }
            }
        }
        let edges: Vec<_> = edges.into_iter().collect();
        let delays: Vec<f64> = edges
            .iter()
            .map(|_| if tau_hi > tau_lo { rng.gen_range(tau_lo..=tau_hi) } else { tau_lo })
            .collect();
        Topology::new(n, &edges, &delays)
    }

    /// Star whose leaves are scattered uniformly over a disc around the
    /// center `0`, with delay proportional to distance. Leaf `1` sits on the
    /// rim at `tau_max`; the other leaves get `tau_max·sqrt(U)`.
    pub fn star_disc<R: Rng>(n: usize, tau_max: f64, rng: &mut R) -> Result<Topology, TopologyError> {
        let edges: Vec<_> = (1..n).map(|j| (0, j)).collect();
        let delays: Vec<f64> = (1..n)
            .map(|j| if j == 1 { tau_max } else { tau_max * rng.gen::<f64>().sqrt() })
            .collect();
        Topology::new(n, &edges, &delays)
    }

    /// Random tree on `n` nodes (uniform attachment).
    pub fn random_tree<R: Rng>(n: usize, tau: f64, rng: &mut R) -> Result<Topology, TopologyError> {
        let edges: Vec<_> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
        Topology::uniform(n, &edges, tau)
    }
}
