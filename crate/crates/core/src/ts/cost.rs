use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Lasso, ProductTs};
use crate::ltl::AtomicProp;
use crate::network::{LinkId, Point, SensorNetwork};

/// `1 − |A∩B| / |A∪B|`, with `d(∅, ∅) = 0`.
pub fn jaccard_cost<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    1.0 - a.intersection(b).count() as f64 / union as f64
}

/// Jaccard distance on bitmask-encoded sets.
pub fn jaccard_mask(a: u64, b: u64) -> f64 {
    let union = (a | b).count_ones();
    if union == 0 {
        return 0.0;
    }
    1.0 - (a & b).count_ones() as f64 / union as f64
}

/// Symmetric Hausdorff distance; `empty` when exactly one side is empty.
pub fn hausdorff(a: &[Point], b: &[Point], empty: f64) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => empty,
        _ => {
            let directed = |x: &[Point], y: &[Point]| {
                x.iter()
                    .map(|p| y.iter().map(|q| p.dist(q)).fold(f64::INFINITY, f64::min))
                    .fold(0.0, f64::max)
            };
            directed(a, b).max(directed(b, a))
        }
    }
}

/// Transition cost between consecutive link activation sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFn {
    Jaccard,
    /// Hausdorff distance between the endpoint coordinates of the active
    /// links of each set.
    Hausdorff {
        positions: Vec<Point>,
        empty_distance: f64,
    },
    /// Explicit costs for chosen pairs, `default` elsewhere.
    Table {
        entries: Vec<TableEntry>,
        default: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub from: BTreeSet<LinkId>,
    pub to: BTreeSet<LinkId>,
    pub cost: f64,
}

impl CostFn {
    /// Hausdorff cost whose empty-set distance is the diameter of the
    /// network's bounding box.
    pub fn hausdorff(net: &SensorNetwork) -> Self {
        CostFn::Hausdorff {
            positions: net.positions().to_vec(),
            empty_distance: net.bounds().diameter(),
        }
    }

    pub fn eval(&self, a: &BTreeSet<LinkId>, b: &BTreeSet<LinkId>) -> f64 {
        match self {
            CostFn::Jaccard => jaccard_cost(a, b),
            CostFn::Hausdorff {
                positions,
                empty_distance,
            } => {
                let pts = |s: &BTreeSet<LinkId>| -> Vec<Point> {
                    let nodes: BTreeSet<usize> = s.iter().flat_map(|e| [e.i(), e.j()]).collect();
                    nodes.into_iter().map(|v| positions[v]).collect()
                };
                hausdorff(&pts(a), &pts(b), *empty_distance)
            }
            CostFn::Table { entries, default } => entries
                .iter()
                .find(|t| &t.from == a && &t.to == b)
                .map_or(*default, |t| t.cost),
        }
    }

    /// Specializes the cost to bitmask states of `ts`, whose universe must
    /// consist of link propositions.
    pub fn bind(&self, ts: &ProductTs) -> MaskCost {
        let links: Vec<Option<LinkId>> = ts
            .items()
            .iter()
            .map(|p| match p {
                AtomicProp::Link(e) => Some(*e),
                AtomicProp::Node(_) => None,
            })
            .collect();
        match self {
            CostFn::Jaccard => MaskCost::Jaccard,
            CostFn::Hausdorff {
                positions,
                empty_distance,
            } => MaskCost::Hausdorff {
                endpoints: links
                    .iter()
                    .map(|e| {
                        let e = e.expect("hausdorff cost needs link items");
                        [positions[e.i()], positions[e.j()]]
                    })
                    .collect(),
                nodes: links
                    .iter()
                    .map(|e| {
                        let e = e.expect("hausdorff cost needs link items");
                        [e.i(), e.j()]
                    })
                    .collect(),
                empty_distance: *empty_distance,
            },
            CostFn::Table { entries, default } => {
                let mask = |s: &BTreeSet<LinkId>| -> Option<u64> {
                    let mut m = 0u64;
                    for e in s {
                        let k = links.iter().position(|x| *x == Some(*e))?;
                        m |= 1 << k;
                    }
                    Some(m)
                };
                let table = entries
                    .iter()
                    .filter_map(|t| Some(((mask(&t.from)?, mask(&t.to)?), t.cost)))
                    .collect();
                MaskCost::Table {
                    table,
                    default: *default,
                }
            }
        }
    }
}

/// A [`CostFn`] evaluated on bitmask states.
#[derive(Clone, Debug)]
pub enum MaskCost {
    Jaccard,
    Hausdorff {
        endpoints: Vec<[Point; 2]>,
        nodes: Vec<[usize; 2]>,
        empty_distance: f64,
    },
    Table {
        table: BTreeMap<(u64, u64), f64>,
        default: f64,
    },
}

impl MaskCost {
    pub fn eval(&self, a: u64, b: u64) -> f64 {
        match self {
            MaskCost::Jaccard => jaccard_mask(a, b),
            MaskCost::Hausdorff {
                endpoints,
                nodes,
                empty_distance,
            } => {
                let pts = |m: u64| -> Vec<Point> {
                    let mut seen: BTreeMap<usize, Point> = BTreeMap::new();
                    for k in (0..endpoints.len()).filter(|k| m >> k & 1 == 1) {
                        for s in 0..2 {
                            seen.insert(nodes[k][s], endpoints[k][s]);
                        }
                    }
                    seen.into_values().collect()
                };
                hausdorff(&pts(a), &pts(b), *empty_distance)
            }
            MaskCost::Table { table, default } => table.get(&(a, b)).copied().unwrap_or(*default),
        }
    }
}

/// `Σ c(τ(t−1) → τ(t))` over consecutive elements.
pub fn cost_to_go<T: Ord + Clone>(
    trace: &[BTreeSet<T>],
    c: impl Fn(&BTreeSet<T>, &BTreeSet<T>) -> f64,
) -> f64 {
    trace.windows(2).map(|w| c(&w[0], &w[1])).sum()
}

/// Prefix cost plus one suffix period including the wrap transition back to
/// the first suffix element.
pub fn plan_cost<T: Ord + Clone>(
    s: &Lasso<T>,
    c: impl Fn(&BTreeSet<T>, &BTreeSet<T>) -> f64,
) -> f64 {
    let wrap = c(s.suffix.last().unwrap(), &s.suffix[0]);
    cost_to_go(&s.prefix, &c) + cost_to_go(&s.suffix, &c) + wrap
}
