use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::ts::ProductTs;

use super::lasso::COST_TOLERANCE;
use super::PlanError;

/// Lasso on TS state indices: `prefix` starts at the empty state and ends at
/// the loop state; `suffix` ends at the loop state again.
#[derive(Clone, Debug, PartialEq)]
pub struct TsLasso {
    pub prefix: Vec<usize>,
    pub suffix: Vec<usize>,
    pub cost: f64,
}

#[derive(PartialEq)]
struct Item(f64, u32, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
            .then(o.1.cmp(&self.1))
            .then(o.2.cmp(&self.2))
    }
}

fn better(a: (f64, u32), b: (f64, u32)) -> bool {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) == Ordering::Less
}

/// Minimum-cost lasso whose loop activates every item at least once,
/// searched directly on the states of `ts`.
///
/// With the non-interfering policy every state already satisfies the
/// exclusion constraints, so the only remaining obligation is that each item
/// recurs, i.e. the loop's states cover the universe. For each loop state
/// `v` (in order of distance from the empty state) a Dijkstra over
/// `(state, covered items)` finds the cheapest covering closed walk.
pub fn plan_covering_lasso(
    ts: &ProductTs,
    cost: &(dyn Fn(u64, u64) -> f64 + Sync),
    budget: usize,
) -> Result<TsLasso, PlanError> {
    let n = ts.num_states();
    let m = ts.items().len();
    if m >= 32 || n.saturating_mul(1usize << m) > budget {
        return Err(PlanError::BudgetExceeded {
            what: "coverage search states",
            limit: budget,
        });
    }
    let full = ts.full_mask();
    if m == 0 {
        let q0 = ts.initial();
        return Ok(TsLasso {
            prefix: vec![q0],
            suffix: vec![q0],
            cost: cost(0, 0),
        });
    }
    let masks = 1usize << m;
    let c = |a: usize, b: usize| cost(ts.state(a), ts.state(b));

    // distances from the empty state
    let q0 = ts.initial();
    let mut d0 = vec![(f64::INFINITY, u32::MAX); n];
    let mut par0 = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    d0[q0] = (0.0, 0);
    heap.push(Item(0.0, 0, q0));
    while let Some(Item(d, h, u)) = heap.pop() {
        if better(d0[u], (d, h)) {
            continue;
        }
        for w in ts.successors(u) {
            let nd = (d + c(u, w), h + 1);
            if better(nd, d0[w]) {
                d0[w] = nd;
                par0[w] = u;
                heap.push(Item(nd.0, nd.1, w));
            }
        }
    }

    let mut anchors: Vec<usize> = (0..n).collect();
    anchors.sort_by(|&a, &b| d0[a].0.total_cmp(&d0[b].0).then(d0[a].1.cmp(&d0[b].1)).then(a.cmp(&b)));

    // (cost, suffix len, prefix len, anchor) and the loop
    let mut best: Option<((f64, u32, u32, usize), Vec<usize>)> = None;
    for &v in &anchors {
        if let Some(((bc, ..), _)) = &best {
            if d0[v].0 > bc + COST_TOLERANCE {
                break;
            }
        }
        let node = |q: usize, mask: u64| q * masks + mask as usize;
        let mut dist = vec![(f64::INFINITY, u32::MAX); n * masks];
        let mut parent = vec![usize::MAX; n * masks];
        let start = node(v, 0);
        let target = node(v, full);
        dist[start] = (0.0, 0);
        let mut heap = BinaryHeap::new();
        heap.push(Item(0.0, 0, start));
        while let Some(Item(d, h, x)) = heap.pop() {
            if better(dist[x], (d, h)) {
                continue;
            }
            if x == target {
                break;
            }
            let (q, mask) = (x / masks, (x % masks) as u64);
            for w in ts.successors(q) {
                let y = node(w, mask | ts.state(w));
                let nd = (d + c(q, w), h + 1);
                if better(nd, dist[y]) {
                    dist[y] = nd;
                    parent[y] = x;
                    heap.push(Item(nd.0, nd.1, y));
                }
            }
        }
        if dist[target].0.is_infinite() {
            continue;
        }
        let key = (d0[v].0 + dist[target].0, dist[target].1, d0[v].1 + 1, v);
        let wins = match &best {
            None => true,
            Some(((bc, bs, bp, bv), _)) => {
                if key.0 < bc - COST_TOLERANCE {
                    true
                } else if key.0 > bc + COST_TOLERANCE {
                    false
                } else {
                    (key.1, key.2, key.3) < (*bs, *bp, *bv)
                }
            }
        };
        if wins {
            let mut cyc = vec![target];
            while parent[*cyc.last().unwrap()] != usize::MAX {
                cyc.push(parent[*cyc.last().unwrap()]);
            }
            cyc.reverse();
            let cyc: Vec<usize> = cyc[1..].iter().map(|&x| x / masks).collect();
            best = Some((key, cyc));
        }
    }
    let ((cost, _, _, v), suffix) = best.ok_or(PlanError::Infeasible)?;
    let mut prefix = vec![v];
    while par0[*prefix.last().unwrap()] != usize::MAX {
        prefix.push(par0[*prefix.last().unwrap()]);
    }
    prefix.reverse();
    Ok(TsLasso { prefix, suffix, cost })
}
