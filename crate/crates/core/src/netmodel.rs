//! Network scenario model: directed topology with wavelength capacities,
//! the candidate path table with delays and availability probabilities,
//! and the static sets of attacked edges.
//!
//! Scenarios are loaded from a TOML config (see `scenarios/nsfnet.cfg` and
//! `docs/scenario-format.md`) and are immutable after validation.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// A directed edge between two nodes; `capacity` counts the parallel
/// wavelength links the edge provides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: u32,
    pub head: u32,
    pub capacity: u32,
}

/// Unkeyed edge identity, `tail -> head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub tail: u32,
    pub head: u32,
}

impl EdgeId {
    pub fn new(tail: u32, head: u32) -> Self {
        EdgeId { tail, head }
    }

    /// Parse the `"2-5"` notation used in configs and on the CLI.
    pub fn parse(s: &str) -> Result<Self, ScenarioError> {
        let (t, h) = s
            .split_once('-')
            .ok_or_else(|| ScenarioError::BadEdgeName(s.to_string()))?;
        let tail = t.trim().parse().map_err(|_| ScenarioError::BadEdgeName(s.to_string()))?;
        let head = h.trim().parse().map_err(|_| ScenarioError::BadEdgeName(s.to_string()))?;
        Ok(EdgeId { tail, head })
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.tail, self.head)
    }
}

#[derive(Debug, Clone)]
pub struct Topology {
    pub node_count: u32,
    pub source: u32,
    pub destination: u32,
    pub edges: Vec<Edge>,
    index: HashMap<EdgeId, usize>,
}

impl Topology {
    pub fn new(
        node_count: u32,
        source: u32,
        destination: u32,
        edges: Vec<Edge>,
    ) -> Result<Self, ScenarioError> {
        if source == destination {
            return Err(ScenarioError::SourceIsDestination(source));
        }
        let mut index = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= node_count || e.head >= node_count {
                return Err(ScenarioError::UnknownNode(EdgeId::new(e.tail, e.head)));
            }
            if e.capacity == 0 {
                return Err(ScenarioError::ZeroCapacity(EdgeId::new(e.tail, e.head)));
            }
            if index.insert(EdgeId::new(e.tail, e.head), i).is_some() {
                return Err(ScenarioError::DuplicateEdge(EdgeId::new(e.tail, e.head)));
            }
        }
        Ok(Topology { node_count, source, destination, edges, index })
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.index.get(&id).map(|&i| &self.edges[i])
    }
}

/// One candidate lightpath from source to destination.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    /// Position in the delay-sorted table.
    pub id: usize,
    /// Node sequence from source to destination.
    pub nodes: Vec<u32>,
    /// End-to-end delay (hop count in the bundled scenario).
    pub delay: u32,
    /// Probability the path is available at request time.
    pub availability: f64,
}

impl Path {
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.nodes.windows(2).map(|w| EdgeId::new(w[0], w[1]))
    }

    pub fn crosses(&self, edge: EdgeId) -> bool {
        self.edges().any(|e| e == edge)
    }
}

/// All candidate paths, sorted ascending by delay with config order kept
/// among equal delays (the P-OPT tie-break is ascending id).
#[derive(Debug, Clone)]
pub struct PathTable {
    paths: Vec<Path>,
}

impl PathTable {
    /// Sort stably by delay and assign ids by the resulting order.
    pub fn new(mut paths: Vec<Path>) -> Self {
        paths.sort_by_key(|p| p.delay);
        for (i, p) in paths.iter_mut().enumerate() {
            p.id = i;
        }
        PathTable { paths }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn availabilities(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.availability).collect()
    }

    /// Per-path flag: does the path cross any of the given wiretap edges?
    pub fn wiretap_flags(&self, wiretap_edges: &[EdgeId]) -> Vec<bool> {
        self.paths.iter().map(|p| path_is_wiretapped(p, wiretap_edges)).collect()
    }
}

/// The static sets of attacked edges; eavesdropping and jamming run on
/// disjoint edges when performed simultaneously.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttackScenario {
    pub eavesdrop_edges: Vec<EdgeId>,
    pub jam_edges: Vec<EdgeId>,
}

impl AttackScenario {
    /// All attacked edges, eavesdrop first.
    pub fn all_edges(&self) -> Vec<EdgeId> {
        let mut v = self.eavesdrop_edges.clone();
        v.extend(&self.jam_edges);
        v
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub topology: Topology,
    pub paths: PathTable,
    pub attack: AttackScenario,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("cannot read scenario file: {0}")]
    Io(String),
    #[error("cannot parse scenario config: {0}")]
    Parse(String),
    #[error("edge name {0:?} is not of the form \"tail-head\"")]
    BadEdgeName(String),
    #[error("source and destination are both node {0}")]
    SourceIsDestination(u32),
    #[error("edge {0} references a node outside the topology")]
    UnknownNode(EdgeId),
    #[error("edge {0} has zero capacity")]
    ZeroCapacity(EdgeId),
    #[error("edge {0} is declared twice")]
    DuplicateEdge(EdgeId),
    #[error("path {index} uses edge {edge} which is not in the topology")]
    MissingPathEdge { index: usize, edge: EdgeId },
    #[error("path {index} does not run from source {from} to destination {to}")]
    PathEndpoints { index: usize, from: u32, to: u32 },
    #[error("path {index} has fewer than two nodes")]
    PathTooShort { index: usize },
    #[error("path {index} has zero delay")]
    ZeroDelay { index: usize },
    #[error("path {index} availability {value} is outside [0, 1]")]
    BadProbability { index: usize, value: f64 },
    #[error("attack edge {0} is not in the topology")]
    UnknownAttackEdge(EdgeId),
    #[error("edge {0} appears in both the eavesdrop and jam sets")]
    OverlappingAttackSets(EdgeId),
}

/// Is the given wiretap link on the path? Wiretapping an edge exposes all
/// of its wavelengths, so this collapses to edge membership.
pub fn link_on_path(
    topology: &Topology,
    edge: EdgeId,
    path: &Path,
) -> Result<bool, ScenarioError> {
    if !topology.contains_edge(edge) {
        return Err(ScenarioError::UnknownAttackEdge(edge));
    }
    Ok(path.crosses(edge))
}

/// The Q indicator: a path counts as wiretapped at most once, however many
/// wiretap edges it crosses.
pub fn path_is_wiretapped(path: &Path, wiretap_edges: &[EdgeId]) -> bool {
    wiretap_edges.iter().any(|&e| path.crosses(e))
}

/// True when the max-flow from source to destination, with edge capacities
/// in wavelengths, is at least `n` (enough room for n parallel lightpaths).
pub fn min_cut_check(topology: &Topology, n: u32) -> bool {
    max_flow(topology) >= n
}

/// Edmonds-Karp on the wavelength-capacity graph.
fn max_flow(topology: &Topology) -> u32 {
    let n = topology.node_count as usize;
    let mut cap = vec![vec![0i64; n]; n];
    for e in &topology.edges {
        cap[e.tail as usize][e.head as usize] += e.capacity as i64;
    }
    let (s, t) = (topology.source as usize, topology.destination as usize);
    let mut flow = 0i64;
    loop {
        // BFS for an augmenting path in the residual graph.
        let mut parent = vec![usize::MAX; n];
        parent[s] = s;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if parent[v] == usize::MAX && cap[u][v] > 0 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[t] == usize::MAX {
            break;
        }
        let mut bottleneck = i64::MAX;
        let mut v = t;
        while v != s {
            let u = parent[v];
            bottleneck = bottleneck.min(cap[u][v]);
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = parent[v];
            cap[u][v] -= bottleneck;
            cap[v][u] += bottleneck;
            v = u;
        }
        flow += bottleneck;
    }
    flow.min(u32::MAX as i64) as u32
}

// --- config document ---

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioDoc {
    name: String,
    topology: TopologyDoc,
    #[serde(rename = "path", default)]
    paths: Vec<PathDoc>,
    #[serde(default)]
    attack: AttackDoc,
}

#[derive(Debug, Serialize, Deserialize)]
struct TopologyDoc {
    nodes: u32,
    source: u32,
    destination: u32,
    edges: Vec<Edge>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PathDoc {
    nodes: Vec<u32>,
    delay: u32,
    availability: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct AttackDoc {
    #[serde(default)]
    eavesdrop_edges: Vec<String>,
    #[serde(default)]
    jam_edges: Vec<String>,
}

/// Parse and validate a scenario from TOML text.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    let topology = Topology::new(
        doc.topology.nodes,
        doc.topology.source,
        doc.topology.destination,
        doc.topology.edges,
    )?;

    let mut paths = Vec::with_capacity(doc.paths.len());
    for (index, p) in doc.paths.into_iter().enumerate() {
        if p.nodes.len() < 2 {
            return Err(ScenarioError::PathTooShort { index });
        }
        if p.nodes[0] != topology.source || *p.nodes.last().unwrap() != topology.destination {
            return Err(ScenarioError::PathEndpoints {
                index,
                from: topology.source,
                to: topology.destination,
            });
        }
        if p.delay == 0 {
            return Err(ScenarioError::ZeroDelay { index });
        }
        if !(0.0..=1.0).contains(&p.availability) || !p.availability.is_finite() {
            return Err(ScenarioError::BadProbability { index, value: p.availability });
        }
        let path = Path { id: index, nodes: p.nodes, delay: p.delay, availability: p.availability };
        for e in path.edges() {
            if !topology.contains_edge(e) {
                return Err(ScenarioError::MissingPathEdge { index, edge: e });
            }
        }
        paths.push(path);
    }

    let parse_edges = |names: &[String]| -> Result<Vec<EdgeId>, ScenarioError> {
        names
            .iter()
            .map(|s| {
                let e = EdgeId::parse(s)?;
                if !topology.contains_edge(e) {
                    return Err(ScenarioError::UnknownAttackEdge(e));
                }
                Ok(e)
            })
            .collect()
    };
    let eavesdrop_edges = parse_edges(&doc.attack.eavesdrop_edges)?;
    let jam_edges = parse_edges(&doc.attack.jam_edges)?;
    if let Some(shared) = eavesdrop_edges.iter().find(|e| jam_edges.contains(e)) {
        return Err(ScenarioError::OverlappingAttackSets(*shared));
    }

    Ok(Scenario {
        name: doc.name,
        topology,
        paths: PathTable::new(paths),
        attack: AttackScenario { eavesdrop_edges, jam_edges },
    })
}

/// Load a scenario config from disk.
pub fn load_scenario(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// Serialize a scenario back to its TOML config form; `parse_scenario` of
/// the result reproduces the scenario data.
pub fn save_scenario(scenario: &Scenario) -> String {
    let doc = ScenarioDoc {
        name: scenario.name.clone(),
        topology: TopologyDoc {
            nodes: scenario.topology.node_count,
            source: scenario.topology.source,
            destination: scenario.topology.destination,
            edges: scenario.topology.edges.clone(),
        },
        paths: scenario
            .paths
            .paths()
            .iter()
            .map(|p| PathDoc {
                nodes: p.nodes.clone(),
                delay: p.delay,
                availability: p.availability,
            })
            .collect(),
        attack: AttackDoc {
            eavesdrop_edges: scenario.attack.eavesdrop_edges.iter().map(|e| e.to_string()).collect(),
            jam_edges: scenario.attack.jam_edges.iter().map(|e| e.to_string()).collect(),
        },
    };
    toml::to_string_pretty(&doc).expect("scenario serializes")
}
