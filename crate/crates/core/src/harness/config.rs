use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::ratio::{parse_ratio, Q};
use crate::topology::generators;
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Sync,
    SyncDelay,
    Sched,
    Spectral,
    MontecarloLine,
    MontecarloStar,
    HistogramF,
}

/// A rational given either as an integer or as `"p/q"` text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatioText {
    Int(i64),
    Text(String),
}

impl RatioText {
    pub fn value(&self) -> Result<Q, HarnessError> {
        match self {
            RatioText::Int(v) => Ok(Q::from_integer(*v as i128)),
            RatioText::Text(s) => parse_ratio(s).map_err(|e| HarnessError::Config(e.to_string())),
        }
    }
}

/// One demand for every node, or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DemandSpec {
    Uniform(RatioText),
    List(Vec<RatioText>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySection {
    pub nodes: Option<usize>,
    /// `[i, j]` or `[i, j, tau]` entries.
    pub edges: Option<Vec<Vec<f64>>>,
    /// Another file holding `nodes` and `edges`.
    pub file: Option<PathBuf>,
    /// `line`, `star`, `complete`, `ring`, `two-cliques` or
    /// `three-clique-chain`.
    pub generator: Option<String>,
    pub size: Option<usize>,
    pub tau: Option<f64>,
    pub l1: Option<usize>,
    pub shared: Option<usize>,
    pub l2: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyncSection {
    pub alpha: f64,
    pub rho: Option<f64>,
    pub max_periods: f64,
}

impl Default for SyncSection {
    fn default() -> Self {
        SyncSection {
            alpha: 0.01,
            rho: None,
            max_periods: 10_000.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedInit {
    Partition,
    Rejection,
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchedSection {
    pub beta: f64,
    pub delta: RatioText,
    pub demands: Option<DemandSpec>,
    pub max_frames: u64,
    pub init: SchedInit,
}

impl Default for SchedSection {
    fn default() -> Self {
        SchedSection {
            beta: 0.5,
            delta: RatioText::Int(1),
            demands: None,
            max_frames: 20_000,
            init: SchedInit::Partition,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedSection {
    pub base: u64,
    pub trials: usize,
}

impl Default for SeedSection {
    fn default() -> Self {
        SeedSection { base: 0, trials: 1 }
    }
}

/// Network-size sweep of the accuracy campaigns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloSection {
    pub sizes: Vec<usize>,
    pub tau_max: f64,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        MonteCarloSection {
            sizes: vec![2, 4, 8, 16, 32],
            tau_max: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub topology: TopologySection,
    #[serde(default)]
    pub sync: SyncSection,
    #[serde(default)]
    pub sched: SchedSection,
    #[serde(default)]
    pub seeds: SeedSection,
    #[serde(default)]
    pub montecarlo: MonteCarloSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let mut spec = Self::from_toml_str(&text)?;
        spec.base_dir = path.parent().map(Path::to_path_buf);
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds.trials == 0 {
            return Err(HarnessError::Config("seeds.trials must be at least 1".into()));
        }
        if matches!(self.kind, ExperimentKind::MontecarloLine | ExperimentKind::MontecarloStar) {
            if self.montecarlo.sizes.iter().any(|&n| n < 2) || self.montecarlo.sizes.is_empty() {
                return Err(HarnessError::Config("montecarlo.sizes must list sizes of at least 2".into()));
            }
            if !(self.montecarlo.tau_max > 0.0) {
                return Err(HarnessError::Config("montecarlo.tau_max must be positive".into()));
            }
        }
        Ok(())
    }

    /// Builds the configured topology.
    pub fn topology(&self) -> Result<Topology, HarnessError> {
        let t = &self.topology;
        if let Some(file) = &t.file {
            let path = match &self.base_dir {
                Some(dir) if file.is_relative() => dir.join(file),
                _ => file.clone(),
            };
            let text =
                fs::read_to_string(&path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
            let inner: TopologySection = toml::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))?;
            return inline_topology(&inner);
        }
        if let Some(name) = &t.generator {
            let tau = t.tau.unwrap_or(0.0);
            let need = |v: Option<usize>, key: &str| {
                v.ok_or_else(|| HarnessError::Config(format!("generator {name} needs topology.{key}")))
            };
            let topo = match name.as_str() {
                "line" => generators::line(need(t.size, "size")?, tau),
                "star" => generators::star(need(t.size, "size")?.saturating_sub(1), tau),
                "complete" => generators::complete(need(t.size, "size")?, tau),
                "ring" => generators::ring(need(t.size, "size")?, tau),
                "two-cliques" => generators::two_cliques(need(t.l1, "l1")?, need(t.shared, "shared")?, need(t.l2, "l2")?, tau),
                "three-clique-chain" => generators::three_clique_chain(tau),
                other => return Err(HarnessError::Config(format!("unknown generator {other}"))),
            };
            return Ok(topo?);
        }
        inline_topology(t)
    }

    pub fn demands(&self, n: usize) -> Result<Vec<Q>, HarnessError> {
        match &self.sched.demands {
            None => Err(HarnessError::Config("sched.demands is required".into())),
            Some(DemandSpec::Uniform(r)) => Ok(vec![r.value()?; n]),
            Some(DemandSpec::List(v)) => {
                if v.len() != n {
                    return Err(HarnessError::Config(format!("{} demands for {n} nodes", v.len())));
                }
                v.iter().map(RatioText::value).collect()
            }
        }
    }

    pub fn delta(&self) -> Result<Q, HarnessError> {
        self.sched.delta.value()
    }
}

fn inline_topology(t: &TopologySection) -> Result<Topology, HarnessError> {
    let n = t
        .nodes
        .ok_or_else(|| HarnessError::Config("topology.nodes is required".into()))?;
    let mut triples = Vec::new();
    for e in t.edges.as_deref().unwrap_or(&[]) {
        if !(e.len() == 2 || e.len() == 3) {
            return Err(HarnessError::Config(format!("edge entry {e:?} must be [i, j] or [i, j, tau]")));
        }
        let idx = |x: f64| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(HarnessError::Config(format!("edge endpoint {x} is not a node id")))
            }
        };
        triples.push((idx(e[0])?, idx(e[1])?, e.get(2).copied().unwrap_or(0.0)));
    }
    Ok(Topology::from_triples(n, &triples)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::q;

    #[test]
    fn parses_every_documented_key() {
        let spec = ExperimentSpec::from_toml_str(
            r#"
            kind = "sched"
            [topology]
            nodes = 3
            edges = [[0, 1, 0.0], [1, 2]]
            [sync]
            alpha = 0.1
            rho = 0.05
            max_periods = 500
            [sched]
            beta = 0.3
            delta = "1/2"
            demands = [4, "3/2", "2"]
            max_frames = 100
            [seeds]
            base = 7
            trials = 5
            "#,
        )
        .unwrap();
        assert_eq!(spec.kind, ExperimentKind::Sched);
        assert_eq!(spec.sync.rho, Some(0.05));
        assert_eq!(spec.delta().unwrap(), q(1, 2));
        assert_eq!(spec.demands(3).unwrap(), vec![q(4, 1), q(3, 2), q(2, 1)]);
        assert_eq!(spec.topology().unwrap().edges(), &[(0, 1), (1, 2)]);
        assert_eq!((spec.seeds.base, spec.seeds.trials), (7, 5));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ExperimentSpec::from_toml_str("kind = \"nope\""), Err(HarnessError::Config(_))));
        assert!(matches!(
            ExperimentSpec::from_toml_str("kind = \"sync\"\n[seeds]\ntrials = 0"),
            Err(HarnessError::Config(_))
        ));
        assert!(matches!(
            ExperimentSpec::from_toml_str("kind = \"sync\"\nunknown = 1"),
            Err(HarnessError::Config(_))
        ));
        let spec = ExperimentSpec::from_toml_str("kind = \"sync\"\n[topology]\nnodes = 2\nedges = [[0, 1.5]]").unwrap();
        assert!(spec.topology().is_err());
    }

    #[test]
    fn generator_topologies() {
        let spec = ExperimentSpec::from_toml_str(
            "kind = \"sched\"\n[topology]\ngenerator = \"two-cliques\"\nl1 = 5\nshared = 2\nl2 = 2",
        )
        .unwrap();
        assert_eq!(spec.topology().unwrap().node_count(), 9);
    }
}
