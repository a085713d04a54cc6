//! Laplacian consensus over the switching graph induced by a link schedule.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{build_liveness, eval_lasso};
use crate::network::{Graph, LinkId};
use crate::ts::Schedule;

pub const DEFAULT_EPSILON: f64 = 0.5;
/// Gap that separates two consensus clusters.
pub const CLUSTER_GAP: f64 = 1e-3;
/// Spread below which a run counts as converged.
pub const CONVERGED_SPREAD: f64 = 1e-6;
/// Longest window, in suffix periods, accepted by [`check_joint_connectivity`].
pub const MAX_WINDOW_PERIODS: usize = 64;

#[derive(Debug, Error)]
pub enum ConsensusError {
    #[error("step size must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("state has {got} entries but the network needs {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("window must be at least 1")]
    ZeroWindow,
    #[error("window {window} exceeds the limit of {limit} steps")]
    WindowTooLong { window: usize, limit: usize },
    #[error("schedule is empty")]
    EmptySchedule,
    #[error("failed to write trajectory: {0}")]
    Io(String),
}

fn check_epsilon(eps: f64) -> Result<(), ConsensusError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(ConsensusError::BadEpsilon(eps))
    }
}

/// Edges active at each time of a schedule, seen as subgraphs of `g`.
#[derive(Clone, Copy, Debug)]
pub struct SwitchingGraph<'a> {
    pub base: &'a Graph,
    pub schedule: &'a Schedule,
}

impl<'a> SwitchingGraph<'a> {
    pub fn new(base: &'a Graph, schedule: &'a Schedule) -> Self {
        SwitchingGraph { base, schedule }
    }

    /// Active links at `t` that belong to the base graph.
    pub fn edges(&self, t: usize) -> BTreeSet<LinkId> {
        self.schedule
            .at(t)
            .iter()
            .filter(|e| self.base.edges.contains(e))
            .copied()
            .collect()
    }

    pub fn vertices(&self, t: usize) -> BTreeSet<usize> {
        self.edges(t).iter().flat_map(|e| e.endpoints()).collect()
    }

    pub fn neighbors(&self, i: usize, t: usize) -> BTreeSet<usize> {
        self.edges(t)
            .iter()
            .filter(|e| e.touches(i))
            .map(|e| if e.i() == i { e.j() } else { e.i() })
            .collect()
    }
}

/// `y − εL y` with `L` the Laplacian of the active links.
pub fn step(y: &[f64], active: &BTreeSet<LinkId>, eps: f64) -> Vec<f64> {
    let mut ly = vec![0.0; y.len()];
    for e in active {
        let d = y[e.i()] - y[e.j()];
        ly[e.i()] += d;
        ly[e.j()] -= d;
    }
    y.iter().zip(&ly).map(|(v, l)| v - eps * l).collect()
}

/// Per-node update: a node with one active link moves to
/// `(1−ε) y_i + ε y_j`, a node without keeps its value. `None` when some
/// node has more than one active link.
pub fn step_message_passing(y: &[f64], active: &BTreeSet<LinkId>, eps: f64) -> Option<Vec<f64>> {
    let mut partner: BTreeMap<usize, usize> = BTreeMap::new();
    for e in active {
        if partner.insert(e.i(), e.j()).is_some() || partner.insert(e.j(), e.i()).is_some() {
            return None;
        }
    }
    Some(
        (0..y.len())
            .map(|i| match partner.get(&i) {
                Some(&j) => (1.0 - eps) * y[i] + eps * y[j],
                None => y[i],
            })
            .collect(),
    )
}

fn is_matching(active: &BTreeSet<LinkId>) -> bool {
    let mut seen = BTreeSet::new();
    active.iter().all(|e| seen.insert(e.i()) && seen.insert(e.j()))
}

pub fn spread(y: &[f64]) -> f64 {
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = y.iter().copied().fold(f64::INFINITY, f64::min);
    if y.is_empty() {
        0.0
    } else {
        max - min
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsensusTrajectory {
    pub epsilon: f64,
    /// `y(0), …, y(T)`.
    pub states: Vec<Vec<f64>>,
    pub spread: Vec<f64>,
    pub sum: Vec<f64>,
    /// Some step had a node with several active links, so the update used
    /// the matrix form outside the message-passing rule.
    pub matrix_fallback: bool,
}

impl ConsensusTrajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds y(0)")
    }

    pub fn final_spread(&self) -> f64 {
        *self.spread.last().expect("trajectory holds y(0)")
    }

    /// First time the spread drops below `tol`.
    pub fn time_to_spread(&self, tol: f64) -> Option<usize> {
        self.spread.iter().position(|&s| s < tol)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), ConsensusError> {
        let io = |e: csv::Error| ConsensusError::Io(e.to_string());
        let mut out = csv::Writer::from_writer(w);
        let n = self.states.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((0..n).map(|i| format!("y_{i}")));
        header.push("spread".into());
        header.push("sum".into());
        out.write_record(&header).map_err(io)?;
        for (t, y) in self.states.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(y.iter().map(|v| v.to_string()));
            row.push(self.spread[t].to_string());
            row.push(self.sum[t].to_string());
            out.write_record(&row).map_err(io)?;
        }
        out.flush().map_err(|e| ConsensusError::Io(e.to_string()))
    }
}

fn dimension(g: &Graph) -> usize {
    g.nodes.iter().next_back().map_or(0, |&v| v + 1)
}

/// Runs `steps` updates, reading the schedule from time 0 and cycling its
/// suffix.
pub fn run(g: &Graph, schedule: &Schedule, y0: &[f64], eps: f64, steps: usize) -> Result<ConsensusTrajectory, ConsensusError> {
    check_epsilon(eps)?;
    if schedule.suffix.is_empty() {
        return Err(ConsensusError::EmptySchedule);
    }
    let n = dimension(g);
    if y0.len() != n {
        return Err(ConsensusError::Dimension {
            expected: n,
            got: y0.len(),
        });
    }
    let sw = SwitchingGraph::new(g, schedule);
    let mut states = vec![y0.to_vec()];
    let mut spreads = vec![spread(y0)];
    let mut sums = vec![y0.iter().sum()];
    let mut matrix_fallback = false;
    for t in 0..steps {
        let active = sw.edges(t);
        matrix_fallback |= !is_matching(&active);
        let y = step(states.last().unwrap(), &active, eps);
        spreads.push(spread(&y));
        sums.push(y.iter().sum());
        states.push(y);
    }
    Ok(ConsensusTrajectory {
        epsilon: eps,
        states,
        spread: spreads,
        sum: sums,
        matrix_fallback,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seeding {
    /// One node, picked by the seed, holds 1 and the rest 0.
    UnitBasis,
    /// Independent uniform values in `[0, 1)`.
    Uniform,
}

pub fn initial_state(n: usize, seeding: Seeding, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match seeding {
        Seeding::UnitBasis => {
            let mut y = vec![0.0; n];
            if n > 0 {
                y[rng.gen_range(0..n)] = 1.0;
            }
            y
        }
        Seeding::Uniform => (0..n).map(|_| rng.gen::<f64>()).collect(),
    }
}

fn connected_on(nodes: &BTreeSet<usize>, edges: &BTreeSet<LinkId>) -> bool {
    let Some(&root) = nodes.iter().next() else {
        return true;
    };
    let mut seen = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for e in edges.iter().filter(|e| e.touches(v)) {
            let w = if e.i() == v { e.j() } else { e.i() };
            if nodes.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == nodes.len()
}

/// Whether the union of active links over every window
/// `[p + kW, p + (k+1)W)`, `k ≥ 0`, connects all nodes of `g`, where `p` is
/// the prefix length. The prefix joins the first window, which cannot make
/// an unconnected union connected, so it is not checked on its own. Windows
/// are checked until their phase in the suffix repeats.
pub fn check_joint_connectivity(g: &Graph, s: &Schedule, window: usize) -> Result<bool, ConsensusError> {
    if window == 0 {
        return Err(ConsensusError::ZeroWindow);
    }
    if s.suffix.is_empty() {
        return Err(ConsensusError::EmptySchedule);
    }
    let limit = s.suffix.len() * MAX_WINDOW_PERIODS;
    if window > limit {
        return Err(ConsensusError::WindowTooLong { window, limit });
    }
    let sw = SwitchingGraph::new(g, s);
    let (plen, slen) = (s.prefix.len(), s.suffix.len());
    let mut phases = BTreeSet::new();
    let mut start = plen;
    loop {
        if !phases.insert((start - plen) % slen) {
            return Ok(true);
        }
        let union: BTreeSet<LinkId> = (start..start + window).flat_map(|t| sw.edges(t)).collect();
        if !connected_on(&g.nodes, &union) {
            return Ok(false);
        }
        start += window;
    }
}

/// Liveness by inspection: every link of `g` is active somewhere in the suffix.
pub fn liveness_direct(g: &Graph, s: &Schedule) -> bool {
    let seen = s.suffix_items();
    g.edges.iter().all(|e| seen.contains(e))
}

/// Liveness by evaluating `⋀ G F π_e` on the lasso.
pub fn liveness_semantic(g: &Graph, s: &Schedule) -> bool {
    let (p, q) = s.letters();
    eval_lasso(&build_liveness(g), &p, &q)
}

/// Both liveness routes; panics if they disagree.
pub fn liveness_check(g: &Graph, s: &Schedule) -> bool {
    let a = liveness_direct(g, s);
    let b = liveness_semantic(g, s);
    assert_eq!(a, b, "liveness routes disagree");
    a
}

/// Mean share of links active per suffix step, in percent.
pub fn efficiency(s: &Schedule, g: &Graph) -> f64 {
    if g.edges.is_empty() || s.suffix.is_empty() {
        return 0.0;
    }
    let total: usize = s.suffix.iter().map(|x| x.len()).sum();
    100.0 * total as f64 / (s.suffix.len() * g.edges.len()) as f64
}

/// Single-linkage groups of node values: sorted values split wherever two
/// neighbors differ by more than `gap`.
pub fn clusters(y: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..y.len()).collect();
    idx.sort_by(|&a, &b| y[a].total_cmp(&y[b]).then(a.cmp(&b)));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (k, &i) in idx.iter().enumerate() {
        if k == 0 || y[i] - y[idx[k - 1]] > gap {
            out.push(Vec::new());
        }
        out.last_mut().unwrap().push(i);
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsensusSummary {
    pub converged: bool,
    pub clusters: usize,
    pub final_spread: f64,
    pub efficiency_pct: f64,
}

pub fn summarize(traj: &ConsensusTrajectory, g: &Graph, s: &Schedule) -> ConsensusSummary {
    ConsensusSummary {
        converged: traj.final_spread() < CONVERGED_SPREAD,
        clusters: clusters(traj.final_state(), CLUSTER_GAP).len(),
        final_spread: traj.final_spread(),
        efficiency_pct: efficiency(s, g),
    }
}
