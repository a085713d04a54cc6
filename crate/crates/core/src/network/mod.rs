//! Geometric sensor networks, link neighborhoods and the command layer.
//!
//! Sensors sit at fixed planar positions and can talk to every other sensor
//! within the communication radius `r`. Command nodes control all sensors
//! within their radius `R`, and two command nodes are adjacent when their
//! `R`-balls touch.

mod io;
mod kmeans;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{
    parse_sensor_csv, random_network, write_sensor_csv, CenterRecord, CommandLayerFile,
    NetworkFile, NodeRecord,
};
pub use kmeans::{kmeans_objective, kmeans_place, KMeansResult};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("sensors {0} and {1} share the same position")]
    DuplicatePosition(usize, usize),
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("position of sensor {0} is not finite")]
    NonFinitePosition(usize),
    #[error("link {0} is not an edge of the network")]
    UnknownEdge(LinkId),
    #[error("command radius R = {big} must exceed communication radius r = {small}")]
    CommandRadiusTooSmall { small: f64, big: f64 },
    #[error("k-means needs 1 <= K <= N, got K = {k} for N = {n}")]
    InvalidClusterCount { k: usize, n: usize },
    #[error("node {0} is not in the graph")]
    UnknownNode(usize),
    #[error("malformed input: {0}")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Undirected link between two sensors, stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId {
    i: usize,
    j: usize,
}

impl LinkId {
    /// Canonical link between `a` and `b`. Panics on a self loop.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "a link needs two distinct endpoints");
        LinkId {
            i: a.min(b),
            j: a.max(b),
        }
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn endpoints(&self) -> [usize; 2] {
        [self.i, self.j]
    }

    pub fn touches(&self, v: usize) -> bool {
        self.i == v || self.j == v
    }

    /// Two links interfere when they share an endpoint.
    pub fn shares_endpoint(&self, other: &LinkId) -> bool {
        self.touches(other.i) || self.touches(other.j)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.i, self.j)
    }
}

impl Serialize for LinkId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.i, self.j].serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinkId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [a, b] = <[usize; 2]>::deserialize(d)?;
        if a == b {
            return Err(serde::de::Error::custom("link endpoints must differ"));
        }
        Ok(LinkId::new(a, b))
    }
}

/// Axis-aligned box containing every sensor (the compact region).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn of(points: &[Point]) -> Bounds {
        let mut b = Bounds {
            min: Point::new(f64::INFINITY, f64::INFINITY),
            max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        };
        for p in points {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        if points.is_empty() {
            b.min = Point::new(0.0, 0.0);
            b.max = Point::new(0.0, 0.0);
        }
        b
    }

    pub fn diameter(&self) -> f64 {
        self.min.dist(&self.max)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Plain undirected graph over (global) node indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub nodes: BTreeSet<usize>,
    pub edges: BTreeSet<LinkId>,
}

impl Graph {
    pub fn new(nodes: impl IntoIterator<Item = usize>, edges: impl IntoIterator<Item = LinkId>) -> Self {
        let mut g = Graph {
            nodes: nodes.into_iter().collect(),
            edges: BTreeSet::new(),
        };
        for e in edges {
            g.nodes.insert(e.i());
            g.nodes.insert(e.j());
            g.edges.insert(e);
        }
        g
    }

    /// Graph on nodes `0..n` with the given edges.
    pub fn with_order(n: usize, edges: impl IntoIterator<Item = LinkId>) -> Self {
        Graph::new(0..n, edges)
    }

    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter(|e| e.touches(v))
            .map(|e| if e.i() == v { e.j() } else { e.i() })
            .collect()
    }

    pub fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> =
            self.nodes.iter().map(|&v| (v, Vec::new())).collect();
        for e in &self.edges {
            adj.entry(e.i()).or_default().push(e.j());
            adj.entry(e.j()).or_default().push(e.i());
        }
        adj
    }

    /// Subgraph induced by `keep`: every edge between two kept nodes.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> Graph {
        Graph {
            nodes: self.nodes.intersection(keep).copied().collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| keep.contains(&e.i()) && keep.contains(&e.j()))
                .copied()
                .collect(),
        }
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self).len() <= 1
    }
}

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in &g.nodes {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Static sensor network with the proximity edge set `‖x_i − x_j‖ ≤ r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorNetwork {
    positions: Vec<Point>,
    r: f64,
    edges: Vec<LinkId>,
    bounds: Bounds,
}

impl SensorNetwork {
    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn edges(&self) -> &[LinkId] {
        &self.edges
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn has_edge(&self, e: &LinkId) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    pub fn graph(&self) -> Graph {
        Graph::with_order(self.positions.len(), self.edges.iter().copied())
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.touches(v))
            .map(|e| if e.i() == v { e.j() } else { e.i() })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Exact threshold graph: ties at distance `r` are links.
pub fn build_geometric_graph(positions: Vec<Point>, r: f64) -> Result<SensorNetwork, NetworkError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(NetworkError::InvalidRadius(r));
    }
    for (i, p) in positions.iter().enumerate() {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(NetworkError::NonFinitePosition(i));
        }
    }
    let mut edges = Vec::new();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let d = positions[i].dist(&positions[j]);
            if d == 0.0 {
                return Err(NetworkError::DuplicatePosition(i, j));
            }
            if d <= r {
                edges.push(LinkId::new(i, j));
            }
        }
    }
    let bounds = Bounds::of(&positions);
    Ok(SensorNetwork {
        positions,
        r,
        edges,
        bounds,
    })
}

/// All links sharing an endpoint with `e`, `e` included.
pub fn link_neighborhood(g: &Graph, e: LinkId) -> Result<BTreeSet<LinkId>, NetworkError> {
    if !g.edges.contains(&e) {
        return Err(NetworkError::UnknownEdge(e));
    }
    Ok(g.edges.iter().filter(|f| f.shares_endpoint(&e)).copied().collect())
}

/// Sufficient condition for every link to lie inside some command subgraph.
///
/// With `ρ* = max_i min_j ‖x_i − c_j‖`, returns `ε = R − ρ*` when it exceeds
/// `r`, and `None` otherwise.
pub fn coverage_check(
    net: &SensorNetwork,
    centers: &[Point],
    big_r: f64,
) -> Result<Option<f64>, NetworkError> {
    if !(big_r > net.radius()) {
        return Err(NetworkError::CommandRadiusTooSmall {
            small: net.radius(),
            big: big_r,
        });
    }
    if net.is_empty() {
        return Ok(Some(big_r));
    }
    if centers.is_empty() {
        return Ok(None);
    }
    let rho = max_min_distance(net.positions(), centers);
    let eps = big_r - rho;
    Ok((eps > net.radius()).then_some(eps))
}

/// Largest distance from a sensor to its nearest center.
pub fn max_min_distance(points: &[Point], centers: &[Point]) -> f64 {
    points
        .iter()
        .map(|p| {
            centers
                .iter()
                .map(|c| p.dist(c))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Command graph: `jk` is an edge when `‖c_j − c_k‖ ≤ 2R`.
pub fn build_command_graph(centers: &[Point], big_r: f64) -> Graph {
    let mut edges = Vec::new();
    for j in 0..centers.len() {
        for k in j + 1..centers.len() {
            if centers[j].dist(&centers[k]) <= 2.0 * big_r {
                edges.push(LinkId::new(j, k));
            }
        }
    }
    Graph::with_order(centers.len(), edges)
}

/// Sensor subgraph induced by the sensors within `R` of `center`.
pub fn local_subgraph(net: &SensorNetwork, center: &Point, big_r: f64) -> Graph {
    let keep: BTreeSet<usize> = net
        .positions()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.dist(center) <= big_r)
        .map(|(i, _)| i)
        .collect();
    net.graph().induced(&keep)
}

/// Closed `k`-hop neighborhood of `j`.
pub fn k_hop_neighborhood(g: &Graph, j: usize, k: usize) -> Result<BTreeSet<usize>, NetworkError> {
    if !g.nodes.contains(&j) {
        return Err(NetworkError::UnknownNode(j));
    }
    let adj = g.adjacency();
    let mut depth = BTreeMap::from([(j, 0usize)]);
    let mut queue = VecDeque::from([j]);
    while let Some(v) = queue.pop_front() {
        let d = depth[&v];
        if d == k {
            continue;
        }
        for &w in &adj[&v] {
            if let std::collections::btree_map::Entry::Vacant(e) = depth.entry(w) {
                e.insert(d + 1);
                queue.push_back(w);
            }
        }
    }
    Ok(depth.into_keys().collect())
}

/// Subgraph induced by the closed `k`-hop neighborhood of `j`.
pub fn k_hop_subgraph(g: &Graph, j: usize, k: usize) -> Result<Graph, NetworkError> {
    Ok(g.induced(&k_hop_neighborhood(g, j, k)?))
}

/// Command graph for non-geometric networks: command nodes `a`, `b` (given as
/// positions in `commanders`) are adjacent when their `k`-hop neighborhoods meet.
pub fn k_hop_command_graph(g: &Graph, commanders: &[usize], k: usize) -> Result<Graph, NetworkError> {
    let hoods = commanders
        .iter()
        .map(|&c| k_hop_neighborhood(g, c, k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut edges = Vec::new();
    for a in 0..hoods.len() {
        for b in a + 1..hoods.len() {
            if !hoods[a].is_disjoint(&hoods[b]) {
                edges.push(LinkId::new(a, b));
            }
        }
    }
    Ok(Graph::with_order(commanders.len(), edges))
}

/// Command nodes with their induced sensor subgraphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandLayer {
    pub centers: Vec<Point>,
    pub radius: f64,
    pub cmd_graph: Graph,
    pub subgraphs: Vec<Graph>,
    pub epsilon_witness: Option<f64>,
}

impl CommandLayer {
    pub fn build(net: &SensorNetwork, centers: Vec<Point>, big_r: f64) -> Result<Self, NetworkError> {
        let epsilon_witness = coverage_check(net, &centers, big_r)?;
        let subgraphs = centers.iter().map(|c| local_subgraph(net, c, big_r)).collect();
        let cmd_graph = build_command_graph(&centers, big_r);
        Ok(CommandLayer {
            centers,
            radius: big_r,
            cmd_graph,
            subgraphs,
            epsilon_witness,
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Links of `net` that no command subgraph contains.
    pub fn uncovered_edges(&self, net: &SensorNetwork) -> Vec<LinkId> {
        net.edges()
            .iter()
            .filter(|e| !self.subgraphs.iter().any(|g| g.edges.contains(e)))
            .copied()
            .collect()
    }

    /// Every connected component of the sensor graph is touched only by
    /// command nodes of a single command-graph component.
    pub fn components_contained(&self, net: &SensorNetwork) -> bool {
        let cmd_comps = connected_components(&self.cmd_graph);
        let mut comp_of = vec![usize::MAX; self.len()];
        for (ci, comp) in cmd_comps.iter().enumerate() {
            for &j in comp {
                comp_of[j] = ci;
            }
        }
        connected_components(&net.graph()).iter().all(|sensor_comp| {
            let owners: BTreeSet<usize> = (0..self.len())
                .filter(|&j| {
                    sensor_comp
                        .iter()
                        .any(|v| self.subgraphs[j].nodes.contains(v))
                })
                .map(|j| comp_of[j])
                .collect();
            // isolated sensors are not links, they need no controller
            owners.len() <= 1 || sensor_comp.len() == 1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn collinear_points_give_path() {
        let net = build_geometric_graph(pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]), 1.0).unwrap();
        assert_eq!(net.edges(), &[LinkId::new(0, 1), LinkId::new(1, 2)]);
    }

    #[test]
    fn equilateral_triangle_is_complete() {
        let h = 3f64.sqrt() / 2.0;
        let net = build_geometric_graph(pts(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)]), 1.0 + 1e-12).unwrap();
        assert_eq!(net.edges().len(), 3);
    }

    #[test]
    fn duplicate_positions_rejected() {
        let err = build_geometric_graph(pts(&[(0.0, 0.0), (0.0, 0.0)]), 1.0).unwrap_err();
        assert!(matches!(err, NetworkError::DuplicatePosition(0, 1)));
        assert!(build_geometric_graph(pts(&[(0.0, 0.0)]), 0.0).is_err());
    }

    #[test]
    fn neighborhoods() {
        let p4 = Graph::with_order(4, [LinkId::new(0, 1), LinkId::new(1, 2), LinkId::new(2, 3)]);
        assert_eq!(link_neighborhood(&p4, LinkId::new(1, 2)).unwrap().len(), 3);
        assert_eq!(link_neighborhood(&p4, LinkId::new(0, 1)).unwrap().len(), 2);
        let iso = Graph::with_order(2, [LinkId::new(0, 1)]);
        assert_eq!(
            link_neighborhood(&iso, LinkId::new(0, 1)).unwrap(),
            BTreeSet::from([LinkId::new(0, 1)])
        );
        let k3 = Graph::with_order(3, [LinkId::new(0, 1), LinkId::new(1, 2), LinkId::new(0, 2)]);
        assert_eq!(link_neighborhood(&k3, LinkId::new(0, 2)).unwrap().len(), 3);
        assert!(link_neighborhood(&k3, LinkId::new(0, 3)).is_err());
    }

    #[test]
    fn coverage_examples() {
        let net = build_geometric_graph(pts(&[(0.0, 0.0)]), 1.0).unwrap();
        assert_eq!(coverage_check(&net, &pts(&[(0.0, 0.0)]), 3.0).unwrap(), Some(3.0));
        let net = build_geometric_graph(pts(&[(3.0, 0.0), (-3.0, 0.0)]), 1.0).unwrap();
        assert_eq!(coverage_check(&net, &pts(&[(0.0, 0.0)]), 3.0).unwrap(), None);
        assert!(coverage_check(&net, &pts(&[(0.0, 0.0)]), 1.0).is_err());
    }

    #[test]
    fn command_graph_ties_are_edges() {
        let g = build_command_graph(&pts(&[(0.0, 0.0), (4.0, 0.0)]), 2.0);
        assert_eq!(g.edges.len(), 1);
        let g = build_command_graph(&pts(&[(0.0, 0.0), (4.0 + 1e-9, 0.0)]), 2.0);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn local_subgraph_extremes() {
        let net = build_geometric_graph(pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]), 1.0).unwrap();
        let far = local_subgraph(&net, &Point::new(100.0, 0.0), 5.0);
        assert!(far.nodes.is_empty() && far.edges.is_empty());
        assert_eq!(local_subgraph(&net, &Point::new(1.0, 0.0), 5.0), net.graph());
    }

    #[test]
    fn k_hop() {
        let p5 = Graph::with_order(5, (0..4).map(|i| LinkId::new(i, i + 1)));
        let g = k_hop_subgraph(&p5, 2, 1).unwrap();
        assert_eq!(g.nodes, BTreeSet::from([1, 2, 3]));
        assert_eq!(g.edges.len(), 2);
        let g0 = k_hop_subgraph(&p5, 2, 0).unwrap();
        assert_eq!(g0.nodes.len(), 1);
        assert!(g0.edges.is_empty());
        assert_eq!(k_hop_subgraph(&p5, 0, 10).unwrap(), p5);
        let cmd = k_hop_command_graph(&p5, &[0, 4], 1).unwrap();
        assert!(cmd.edges.is_empty());
        let cmd = k_hop_command_graph(&p5, &[0, 4], 2).unwrap();
        assert_eq!(cmd.edges.len(), 1);
    }

    #[test]
    fn components() {
        assert!(connected_components(&Graph::default()).is_empty());
        let k3 = Graph::with_order(3, [LinkId::new(0, 1), LinkId::new(1, 2), LinkId::new(0, 2)]);
        assert_eq!(connected_components(&k3), vec![vec![0, 1, 2]]);
        let two = Graph::with_order(4, [LinkId::new(2, 3), LinkId::new(0, 1)]);
        assert_eq!(connected_components(&two), vec![vec![0, 1], vec![2, 3]]);
    }
}
