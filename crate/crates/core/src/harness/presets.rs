use super::config::{
    DemandSpec, ExperimentKind, ExperimentSpec, MonteCarloSection, OutputSection, RatioText, SchedInit, SchedSection,
    SeedSection, SyncSection, TopologySection,
};

/// Names accepted by [`preset`].
pub const PRESET_NAMES: &[&str] = &[
    "three-node",
    "line-accuracy",
    "star-accuracy",
    "single-clique",
    "two-clique",
    "histogram-f",
    "spectral-n8",
];

fn base(kind: ExperimentKind, topology: TopologySection, trials: usize) -> ExperimentSpec {
    ExperimentSpec {
        kind,
        topology,
        sync: SyncSection::default(),
        sched: SchedSection::default(),
        seeds: SeedSection { base: 0, trials },
        montecarlo: MonteCarloSection::default(),
        output: OutputSection::default(),
        base_dir: None,
    }
}

fn generated(name: &str, size: Option<usize>) -> TopologySection {
    TopologySection {
        generator: Some(name.to_string()),
        size,
        ..TopologySection::default()
    }
}

fn equal_demand_sched(beta: f64) -> SchedSection {
    SchedSection {
        beta,
        delta: RatioText::Int(1),
        demands: Some(DemandSpec::Uniform(RatioText::Int(4))),
        max_frames: 20_000,
        init: SchedInit::Partition,
    }
}

/// Built-in experiment reproducing one of the reference campaigns.
pub fn preset(name: &str) -> Option<ExperimentSpec> {
    let spec = match name {
        "three-node" => {
            let mut s = base(ExperimentKind::Sync, generated("line", Some(3)), 1000);
            s.sync.alpha = 0.01;
            s
        }
        "line-accuracy" | "star-accuracy" => {
            let kind = if name == "line-accuracy" {
                ExperimentKind::MontecarloLine
            } else {
                ExperimentKind::MontecarloStar
            };
            let mut s = base(kind, TopologySection::default(), 200);
            s.sync.alpha = 0.1;
            s.montecarlo = MonteCarloSection {
                sizes: vec![2, 4, 8, 16, 32],
                tau_max: 1e-4,
            };
            s
        }
        "single-clique" => {
            let mut s = base(ExperimentKind::Sched, generated("complete", Some(3)), 50);
            s.sched = equal_demand_sched(0.5);
            s
        }
        "two-clique" => {
            let topo = TopologySection {
                generator: Some("two-cliques".into()),
                l1: Some(5),
                shared: Some(2),
                l2: Some(2),
                ..TopologySection::default()
            };
            let mut s = base(ExperimentKind::Sched, topo, 50);
            s.sched = equal_demand_sched(0.5);
            s
        }
        "histogram-f" => {
            let mut s = base(ExperimentKind::HistogramF, generated("three-clique-chain", None), 2000);
            s.sched = equal_demand_sched(0.5);
            s
        }
        "spectral-n8" => {
            let mut s = base(ExperimentKind::Spectral, generated("complete", Some(8)), 1);
            s.sched = equal_demand_sched(0.5);
            s
        }
        _ => return None,
    };
    Some(spec)
}
