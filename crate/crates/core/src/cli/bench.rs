//! Scaling sweeps: centralized synthesis on growing paths against the
//! hierarchical planner on growing chains of command regions.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::hlnc::{plan_hierarchical, HlncOptions};
use crate::ltl::TranslateOptions;
use crate::network::{Graph, LinkId};
use crate::planner::{plan_centralized, PlanOptions};
use crate::ts::CostFn;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub planner: String,
    pub k: usize,
    pub edges: usize,
    pub e_max: usize,
    pub pba_states: usize,
    pub wallclock_ms: f64,
    /// `ok`, or `dnf` when a budget stopped the run.
    pub status: String,
    pub cost: Option<f64>,
}

impl BenchRow {
    pub fn finished(&self) -> bool {
        self.status == "ok"
    }
}

/// Path with `m` links on nodes `0..=m`.
pub fn path_graph(m: usize) -> Graph {
    Graph::with_order(m + 1, (0..m).map(|k| LinkId::new(k, k + 1)))
}

/// `k` path blocks of `block_edges` links joined by bridge links. Command
/// node `j` owns block `j` plus the first node of block `j + 1`, so its
/// subgraph has `block_edges + 1` links (the last one `block_edges`) and
/// neighboring command nodes share exactly one sensor.
pub fn chain_of_regions(k: usize, block_edges: usize) -> (Graph, Graph, Vec<Graph>) {
    let width = block_edges + 1;
    let n = k * width;
    let edges: Vec<LinkId> = (0..n.saturating_sub(1)).map(|v| LinkId::new(v, v + 1)).collect();
    let g = Graph::with_order(n, edges);
    let subgraphs = (0..k)
        .map(|j| {
            let hi = ((j + 1) * width).min(n - 1);
            let keep: BTreeSet<usize> = (j * width..=hi).collect();
            g.induced(&keep)
        })
        .collect();
    let g_cmd = Graph::with_order(k, (1..k).map(|j| LinkId::new(j - 1, j)));
    (g, g_cmd, subgraphs)
}

/// Full-specification centralized planning on paths with `2..=max_edges`
/// links; runs that hit `budget` are recorded as `dnf`.
pub fn bench_centralized(max_edges: usize, budget: usize) -> Vec<BenchRow> {
    let opts = PlanOptions {
        pba_budget: budget,
        translate: TranslateOptions { max_states: budget },
        ..PlanOptions::faithful()
    };
    (2..=max_edges)
        .map(|m| {
            let g = path_graph(m);
            let start = Instant::now();
            let out = plan_centralized(&g, &CostFn::Jaccard, &opts);
            let wallclock_ms = start.elapsed().as_secs_f64() * 1e3;
            let (pba_states, status, cost) = match out {
                Ok(o) => (o.report.pba_states, "ok", Some(o.cost)),
                Err(e) if e.is_budget() => (0, "dnf", None),
                Err(_) => (0, "error", None),
            };
            BenchRow {
                planner: "centralized".into(),
                k: 1,
                edges: m,
                e_max: m,
                pba_states,
                wallclock_ms,
                status: status.into(),
                cost,
            }
        })
        .collect()
}

/// Hierarchical planning on [`chain_of_regions`] for each `k`.
pub fn bench_hlnc(ks: impl IntoIterator<Item = usize>, block_edges: usize, opts: &HlncOptions) -> Vec<BenchRow> {
    ks.into_iter()
        .map(|k| {
            let (g, g_cmd, subs) = chain_of_regions(k, block_edges);
            let e_max = subs.iter().map(|s| s.edges.len()).max().unwrap_or(0);
            let start = Instant::now();
            let out = plan_hierarchical(&g, &g_cmd, &subs, &CostFn::Jaccard, opts);
            let wallclock_ms = start.elapsed().as_secs_f64() * 1e3;
            let (pba_states, status, cost) = match out {
                Ok(p) => (
                    p.report.command_pba_states + p.report.local_pba_states.iter().sum::<usize>(),
                    "ok",
                    Some(p.stitched.cost),
                ),
                Err(e) if e.is_budget() => (0, "dnf", None),
                Err(_) => (0, "error", None),
            };
            BenchRow {
                planner: "hlnc".into(),
                k,
                edges: g.edges.len(),
                e_max,
                pba_states,
                wallclock_ms,
                status: status.into(),
                cost,
            }
        })
        .collect()
}

/// Least-squares line through `(x, y)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}
