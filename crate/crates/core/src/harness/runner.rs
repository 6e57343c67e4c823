use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentKind, ExperimentSpec, SchedInit};
use super::report::{aggregate_sched, aggregate_sync, AggregateReport};
use super::{HarnessError, RNG_ID};
use crate::ratio::to_f64;
use crate::sched::{init_schedule, InitMode, SchedConfig, SchedEngine};
use crate::spectral::{
    analyse, build_clique_system, char_poly_eval, default_arrangement, mu, perturbation_roots, predict_fixed_point,
    PerturbationRoot,
};
use crate::sync::{init_sync, InitPhases, SyncConfig, SyncEngine, TraceEvent};
use crate::topology::generators::{line, star_disc};
use crate::topology::{maximal_cliques, CliqueCover, Topology};

/// Outcome of one seeded trial. Failed trials keep their seed and carry
/// the error text instead of being dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub converged: bool,
    /// Periods (synchronization) or frames (scheduling) until convergence.
    pub time: f64,
    /// `Δmax` for synchronization, `θ` for set-valued schedules.
    pub metric: Option<f64>,
    pub head: Option<usize>,
    /// `max_j τ_{h→j}` of the reported head.
    pub head_bound: Option<f64>,
    /// Whether the converged schedule matched the closed-form prediction.
    pub matched: Option<bool>,
    pub sum_error: Option<f64>,
    pub order_preserved: Option<bool>,
    pub error: Option<String>,
}

impl RunRecord {
    fn failed(seed: u64, err: impl ToString) -> Self {
        RunRecord {
            seed,
            converged: false,
            time: 0.0,
            metric: None,
            head: None,
            head_bound: None,
            matched: None,
            sum_error: None,
            order_preserved: None,
            error: Some(err.to_string()),
        }
    }
}

/// Trials sharing one configuration, e.g. one network size of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialGroup {
    pub label: String,
    pub size: Option<usize>,
    pub records: Vec<RunRecord>,
    pub aggregate: AggregateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub n: usize,
    pub beta: f64,
    pub delta: f64,
    pub demands: Vec<f64>,
    /// `[re, im]` pairs by decreasing modulus.
    pub eigenvalues: Vec<[f64; 2]>,
    pub residuals: Vec<f64>,
    pub lambda2_exact: f64,
    pub lambda2_per_update: f64,
    pub lambda2_approx: Option<f64>,
    pub perturbation_roots: Vec<PerturbationRoot>,
    pub charpoly_residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub kind: ExperimentKind,
    pub rng: String,
    pub base_seed: u64,
    /// Header of the per-trial metric column.
    pub metric_name: String,
    pub groups: Vec<TrialGroup>,
    pub spectral: Option<SpectralSummary>,
}

impl ExperimentOutput {
    pub fn failed_trials(&self) -> usize {
        self.groups.iter().map(|g| g.aggregate.failed).sum()
    }
}

fn seeds(spec: &ExperimentSpec) -> Vec<u64> {
    (0..spec.seeds.trials as u64).map(|k| spec.seeds.base.wrapping_add(k)).collect()
}

fn sync_config(spec: &ExperimentSpec) -> SyncConfig {
    SyncConfig {
        alpha: spec.sync.alpha,
        rho: spec.sync.rho,
        max_periods: spec.sync.max_periods,
        ..SyncConfig::default()
    }
}

/// One synchronization trial from a random initial phase vector.
pub fn sync_trial(topo: &Topology, cfg: &SyncConfig, seed: u64) -> RunRecord {
    let run = SyncEngine::new(topo, cfg).and_then(|engine| {
        let mut state = init_sync(topo, cfg, InitPhases::Seed(seed))?;
        engine.run_until_fixed(&mut state)
    });
    match run {
        Ok(r) => RunRecord {
            seed,
            converged: r.converged,
            time: r.time,
            metric: Some(r.delta_max),
            head: r.head,
            head_bound: r.head.map(|h| topo.delay_eccentricity(h)),
            matched: None,
            sum_error: None,
            order_preserved: None,
            error: None,
        },
        Err(e) => RunRecord::failed(seed, e),
    }
}

/// Runs `trial` for every seed in parallel; results keep seed order.
pub fn run_seeded<F>(seeds: &[u64], trial: F) -> Vec<RunRecord>
where
    F: Fn(u64) -> RunRecord + Sync,
{
    seeds.par_iter().map(|&s| trial(s)).collect()
}

fn init_mode(init: SchedInit, cover: &CliqueCover) -> InitMode {
    match init {
        SchedInit::Partition => InitMode::RandomPartition,
        SchedInit::Rejection => InitMode::rejection_for(cover),
        SchedInit::Equal => InitMode::GlobalEqual,
    }
}

/// One scheduling trial, checked against the prediction for the trial's
/// own firing order.
pub fn sched_trial(topo: &Topology, cover: &CliqueCover, cfg: &SchedConfig, mode: &InitMode, seed: u64) -> RunRecord {
    let run = SchedEngine::new(topo, cover, cfg).and_then(|engine| {
        let mut state = init_schedule(cover, cfg, mode, seed)?;
        let order = state.order.clone();
        engine.run_frames(&mut state).map(|r| (r, order))
    });
    match run {
        Ok((r, order)) => {
            let (matched, metric) = match predict_fixed_point(cover, &cfg.demands, cfg.delta, &order) {
                Ok(p) => {
                    let m = p.matches(&r.upsilon, 1e-6);
                    (Some(m.is_some()), if p.is_unique() { None } else { m })
                }
                Err(_) => (None, None),
            };
            RunRecord {
                seed,
                converged: r.converged,
                time: r.frames as f64,
                metric,
                head: None,
                head_bound: None,
                matched,
                sum_error: Some(r.max_sum_error),
                order_preserved: Some(r.order_preserved),
                error: None,
            }
        }
        Err(e) => RunRecord::failed(seed, e),
    }
}

fn sched_config(spec: &ExperimentSpec, n: usize) -> Result<SchedConfig, HarnessError> {
    let mut cfg = SchedConfig::new(spec.sched.beta, spec.delta()?, spec.demands(n)?);
    cfg.max_frames = spec.sched.max_frames;
    Ok(cfg)
}

fn spectral_summary(spec: &ExperimentSpec) -> Result<SpectralSummary, HarnessError> {
    let topo = spec.topology()?;
    let cover = maximal_cliques(&topo)?;
    let demands = spec.demands(topo.node_count())?;
    let delta = spec.delta()?;
    let arr = default_arrangement(&cover);
    let c = (0..cover.len())
        .max_by(|&a, &b| cover.cliques[a].len().cmp(&cover.cliques[b].len()).then(b.cmp(&a)))
        .ok_or_else(|| HarnessError::Config("topology has no clique".into()))?;
    let d: Vec<f64> = arr[c].iter().map(|&i| to_f64(&demands[i])).collect();
    let dl = to_f64(&delta);
    let beta = spec.sched.beta;
    let sys = build_clique_system(&d, dl, beta)?;
    let report = analyse(&sys)?;
    let equal = d.iter().all(|&x| x == d[0]);
    let (roots, residuals) = if equal {
        let m = mu(d[0], dl);
        let roots = perturbation_roots(d.len(), beta, m);
        let res = roots
            .iter()
            .map(|r| char_poly_eval(r.lambda(), d.len(), beta, m).norm())
            .collect();
        (roots, res)
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(SpectralSummary {
        n: d.len(),
        beta,
        delta: dl,
        demands: d,
        eigenvalues: report.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
        residuals: report.residuals,
        lambda2_exact: report.lambda2_exact,
        lambda2_per_update: report.lambda2_per_update,
        lambda2_approx: report.lambda2_approx,
        perturbation_roots: roots,
        charpoly_residuals: residuals,
    })
}

/// Executes every trial of `spec` and aggregates per group.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput, HarnessError> {
    spec.validate()?;
    let seeds = seeds(spec);
    let mut groups = Vec::new();
    let mut spectral = None;
    let metric_name;
    match spec.kind {
        ExperimentKind::Sync | ExperimentKind::SyncDelay => {
            metric_name = "delta_max";
            let topo = spec.topology()?;
            if spec.kind == ExperimentKind::SyncDelay && !topo.has_delays() {
                return Err(HarnessError::Config("sync-delay needs a topology with delays".into()));
            }
            let cfg = sync_config(spec);
            SyncEngine::new(&topo, &cfg)?;
            let records = run_seeded(&seeds, |s| sync_trial(&topo, &cfg, s));
            let aggregate = aggregate_sync(&records, Some(&topo), None);
            groups.push(TrialGroup {
                label: "all".into(),
                size: Some(topo.node_count()),
                records,
                aggregate,
            });
        }
        ExperimentKind::MontecarloLine | ExperimentKind::MontecarloStar => {
            metric_name = "delta_max";
            let cfg = sync_config(spec);
            let tau_max = spec.montecarlo.tau_max;
            for &n in &spec.montecarlo.sizes {
                let (records, fixed) = if spec.kind == ExperimentKind::MontecarloLine {
                    let topo = line(n, tau_max / (n - 1) as f64)?;
                    SyncEngine::new(&topo, &cfg)?;
                    (run_seeded(&seeds, |s| sync_trial(&topo, &cfg, s)), Some(topo))
                } else {
                    let records = run_seeded(&seeds, |s| {
                        let mut rng = ChaCha8Rng::seed_from_u64(s);
                        rng.set_stream(1);
                        match star_disc(n, tau_max, &mut rng) {
                            Ok(topo) => sync_trial(&topo, &cfg, s),
                            Err(e) => RunRecord::failed(s, e),
                        }
                    });
                    (records, None)
                };
                let aggregate = aggregate_sync(&records, fixed.as_ref(), Some(tau_max));
                groups.push(TrialGroup {
                    label: format!("n{n}"),
                    size: Some(n),
                    records,
                    aggregate,
                });
            }
        }
        ExperimentKind::Sched | ExperimentKind::HistogramF => {
            metric_name = "theta";
            let topo = spec.topology()?;
            let cover = maximal_cliques(&topo)?;
            let cfg = sched_config(spec, topo.node_count())?;
            cfg.validate(&cover)?;
            let mode = init_mode(spec.sched.init, &cover);
            let records = run_seeded(&seeds, |s| sched_trial(&topo, &cover, &cfg, &mode, s));
            let range = predict_fixed_point(&cover, &cfg.demands, cfg.delta, &default_arrangement(&cover))
                .ok()
                .and_then(|p| p.theta)
                .map(|r| (to_f64(&r.lo), to_f64(&r.hi)));
            let aggregate = aggregate_sched(&records, range);
            groups.push(TrialGroup {
                label: "all".into(),
                size: Some(topo.node_count()),
                records,
                aggregate,
            });
        }
        ExperimentKind::Spectral => {
            metric_name = "delta_max";
            spectral = Some(spectral_summary(spec)?);
        }
    }
    Ok(ExperimentOutput {
        kind: spec.kind,
        rng: RNG_ID.to_string(),
        base_seed: spec.seeds.base,
        metric_name: metric_name.to_string(),
        groups,
        spectral,
    })
}

/// One node's timers at the end of a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame: u64,
    pub node: usize,
    pub phi: f64,
    pub psi: f64,
}

/// Event trace of the synchronization trial with `seed`, one JSON object
/// per line.
pub fn sync_trace_jsonl(spec: &ExperimentSpec, seed: u64) -> Result<String, HarnessError> {
    let topo = spec.topology()?;
    let cfg = sync_config(spec);
    let engine = SyncEngine::new(&topo, &cfg)?;
    let mut state = init_sync(&topo, &cfg, InitPhases::Seed(seed))?.with_trace();
    engine.run_until_fixed(&mut state)?;
    Ok(TraceEvent::to_jsonl(state.trace.as_deref().unwrap_or(&[])))
}

/// Per-frame `(frame, node, Φ, Ψ)` records of the scheduling trial with
/// `seed`, one JSON object per line.
pub fn sched_dump_jsonl(spec: &ExperimentSpec, seed: u64) -> Result<String, HarnessError> {
    let topo = spec.topology()?;
    let cover = maximal_cliques(&topo)?;
    let cfg = sched_config(spec, topo.node_count())?;
    let engine = SchedEngine::new(&topo, &cover, &cfg)?;
    let mut state = init_schedule(&cover, &cfg, &init_mode(spec.sched.init, &cover), seed)?;
    let mut out = String::new();
    engine.run_frames_observed(&mut state, cfg.max_frames, true, |frame, st, _| {
        for node in 0..st.start.len() {
            let rec = FrameRecord {
                frame,
                node,
                phi: st.start[node],
                psi: st.end[node],
            };
            out.push_str(&serde_json::to_string(&rec).expect("frame records serialize"));
            out.push('\n');
        }
    })?;
    Ok(out)
}
