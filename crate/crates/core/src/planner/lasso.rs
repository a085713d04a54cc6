use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;

use super::{scc_decompose, Pba, PlanError, SccDecomposition};

/// Costs closer than this are treated as equal when breaking ties.
pub const COST_TOLERANCE: f64 = 1e-9;

/// Accepting lasso in the product: `prefix` runs from an initial node to the
/// loop node `v` (inclusive); `cycle` lists the nodes after `v` up to and
/// including `v` again, passing an accepting node.
#[derive(Clone, Debug, PartialEq)]
pub struct LassoPlan {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
    pub cost: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key {
    cost: f64,
    hops: u32,
}

impl Key {
    const INF: Key = Key {
        cost: f64::INFINITY,
        hops: u32::MAX,
    };

    fn add(self, cost: f64) -> Key {
        Key {
            cost: self.cost + cost,
            hops: self.hops + 1,
        }
    }

    fn cmp(&self, other: &Key) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.hops.cmp(&other.hops))
    }
}

#[derive(PartialEq)]
struct HeapItem(Key, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap
        other.0.cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

struct Search {
    dist: Vec<Key>,
    parent: Vec<usize>,
}

/// Dijkstra on local indices `0..n`. `edges(u, out)` pushes `(w, cost)`.
fn dijkstra(n: usize, sources: &[usize], mut edges: impl FnMut(usize, &mut Vec<(usize, f64)>)) -> Search {
    let mut dist = vec![Key::INF; n];
    let mut parent = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = Key { cost: 0.0, hops: 0 };
        heap.push(HeapItem(dist[s], s));
    }
    let mut buf = Vec::new();
    while let Some(HeapItem(k, u)) = heap.pop() {
        if k.cmp(&dist[u]) == Ordering::Greater {
            continue;
        }
        buf.clear();
        edges(u, &mut buf);
        for &(w, c) in &buf {
            let nk = k.add(c);
            if nk.cmp(&dist[w]) == Ordering::Less {
                dist[w] = nk;
                parent[w] = u;
                heap.push(HeapItem(nk, w));
            }
        }
    }
    Search { dist, parent }
}

fn path_to(parent: &[usize], target: usize) -> Vec<usize> {
    let mut p = vec![target];
    while parent[*p.last().unwrap()] != usize::MAX {
        p.push(parent[*p.last().unwrap()]);
    }
    p.reverse();
    p
}

/// Best loop through accepting node `a` (given as a local index).
#[derive(Clone, Copy, Debug)]
struct Candidate {
    cost: f64,
    suffix_len: u32,
    prefix_len: u32,
    v: usize,
    a: usize,
}

impl Candidate {
    fn better_than(&self, o: &Candidate) -> bool {
        if self.cost < o.cost - COST_TOLERANCE {
            return true;
        }
        if self.cost > o.cost + COST_TOLERANCE {
            return false;
        }
        (self.suffix_len, self.prefix_len, self.v, self.a) < (o.suffix_len, o.prefix_len, o.v, o.a)
    }
}

struct Ctx<'a, C> {
    pba: &'a Pba,
    scc: &'a SccDecomposition,
    local: Vec<usize>,
    cost: &'a C,
    init: Search,
}

impl<C: Fn(usize, usize) -> f64 + Sync> Ctx<'_, C> {
    fn edge_cost(&self, u: usize, w: usize) -> f64 {
        (self.cost)(self.pba.ts_state(u), self.pba.ts_state(w))
    }

    /// Forward search from `a` and backward search to `a`, both confined to
    /// the component of `a`.
    fn around(&self, a: usize) -> (Search, Search) {
        let comp = self.scc.component_of(a);
        let members = self.scc.members(comp);
        let fwd = dijkstra(members.len(), &[self.local[a]], |u, out| {
            let gu = members[u];
            for &w in self.pba.successors(gu) {
                let w = w as usize;
                if self.scc.component_of(w) == comp {
                    out.push((self.local[w], self.edge_cost(gu, w)));
                }
            }
        });
        let bwd = dijkstra(members.len(), &[self.local[a]], |w, out| {
            let gw = members[w];
            for u in self.pba.predecessors(gw) {
                if self.scc.component_of(u) == comp {
                    out.push((self.local[u], self.edge_cost(u, gw)));
                }
            }
        });
        (fwd, bwd)
    }

    /// Cheapest closed walk `a → a` with at least one step: returns the
    /// last node before `a` and the key.
    fn min_cycle(&self, a: usize, fwd: &Search) -> Option<(usize, Key)> {
        let comp = self.scc.component_of(a);
        let mut best: Option<(usize, Key)> = None;
        for u in self.pba.predecessors(a) {
            if self.scc.component_of(u) != comp {
                continue;
            }
            let d = fwd.dist[self.local[u]];
            if d.cost.is_infinite() {
                continue;
            }
            let k = d.add(self.edge_cost(u, a));
            let better = match best {
                None => true,
                Some((bu, bk)) => k.cmp(&bk).then(u.cmp(&bu)) == Ordering::Less,
            };
            if better {
                best = Some((u, k));
            }
        }
        best
    }

    fn best_through(&self, a: usize, bound: f64) -> Option<Candidate> {
        let comp = self.scc.component_of(a);
        let members = self.scc.members(comp);
        let (fwd, bwd) = self.around(a);
        let cyc = self.min_cycle(a, &fwd);
        let mut best: Option<Candidate> = None;
        for (li, &v) in members.iter().enumerate() {
            let di = self.init.dist[v];
            if di.cost.is_infinite() || di.cost > bound + COST_TOLERANCE {
                continue;
            }
            let (cost, suffix_len) = if v == a {
                match cyc {
                    Some((_, k)) => (k.cost, k.hops),
                    None => continue,
                }
            } else {
                let (f, b) = (fwd.dist[li], bwd.dist[li]);
                if f.cost.is_infinite() || b.cost.is_infinite() {
                    continue;
                }
                (f.cost + b.cost, f.hops + b.hops)
            };
            let c = Candidate {
                cost: di.cost + cost,
                suffix_len,
                prefix_len: di.hops + 1,
                v,
                a,
            };
            if best.as_ref().is_none_or(|b| c.better_than(b)) {
                best = Some(c);
            }
        }
        best
    }
}

/// Minimum-cost accepting lasso. `cost(q, q')` prices a move between TS
/// state indices. Loops of cost ties are broken by shorter suffix, then
/// shorter prefix, then node order.
pub fn find_optimal_lasso<C>(pba: &Pba, cost: &C, parallel: bool) -> Result<LassoPlan, PlanError>
where
    C: Fn(usize, usize) -> f64 + Sync,
{
    let scc = scc_decompose(pba.len(), |v| pba.successors(v).iter().map(|&w| w as usize).collect::<Vec<_>>());
    find_optimal_lasso_with(pba, &scc, cost, parallel)
}

pub(crate) fn find_optimal_lasso_with<C>(
    pba: &Pba,
    scc: &SccDecomposition,
    cost: &C,
    parallel: bool,
) -> Result<LassoPlan, PlanError>
where
    C: Fn(usize, usize) -> f64 + Sync,
{
    let n = pba.len();
    let mut local = vec![0; n];
    for c in 0..scc.len() {
        for (k, &v) in scc.members(c).iter().enumerate() {
            local[v] = k;
        }
    }
    let init_sources: Vec<usize> = pba.initial().iter().map(|&v| v as usize).collect();
    let init = dijkstra(n, &init_sources, |u, out| {
        for &w in pba.successors(u) {
            out.push((w as usize, cost(pba.ts_state(u), pba.ts_state(w as usize))));
        }
    });
    let ctx = Ctx {
        pba,
        scc,
        local,
        cost,
        init,
    };

    let mut targets: Vec<usize> = (0..n)
        .filter(|&a| {
            pba.is_accepting(a) && scc.is_nontrivial(scc.component_of(a)) && ctx.init.dist[a].cost.is_finite()
        })
        .collect();
    if targets.is_empty() {
        return Err(PlanError::Infeasible);
    }
    targets.sort_by(|&x, &y| ctx.init.dist[x].cmp(&ctx.init.dist[y]).then(x.cmp(&y)));

    let bound = AtomicU64::new(f64::INFINITY.to_bits());
    let eval = |a: usize| -> Option<Candidate> {
        let b = f64::from_bits(bound.load(AtomicOrdering::Relaxed));
        if ctx.init.dist[a].cost > b + COST_TOLERANCE {
            return None;
        }
        let c = ctx.best_through(a, b)?;
        bound.fetch_min(c.cost.to_bits(), AtomicOrdering::Relaxed);
        Some(c)
    };
    let pick = |acc: Option<Candidate>, c: Option<Candidate>| match (acc, c) {
        (None, c) | (c, None) => c,
        (Some(x), Some(y)) => Some(if y.better_than(&x) { y } else { x }),
    };
    let best = if parallel {
        targets
            .par_iter()
            .map(|&a| eval(a))
            .reduce(|| None, pick)
    } else {
        targets.iter().map(|&a| eval(a)).fold(None, pick)
    };
    let best = best.ok_or(PlanError::Infeasible)?;

    let (v, a) = (best.v, best.a);
    let members = scc.members(scc.component_of(a));
    let (fwd, bwd) = ctx.around(a);
    let prefix = path_to(&ctx.init.parent, v);
    let cycle = if v == a {
        let (u, _) = ctx.min_cycle(a, &fwd).expect("cycle exists for chosen node");
        let mut c: Vec<usize> = path_to(&fwd.parent, ctx.local[u]).into_iter().map(|k| members[k]).collect();
        c.push(a);
        c.remove(0);
        c
    } else {
        // v → a along backward parents, then a → v along forward parents
        let mut to_a: Vec<usize> = path_to(&bwd.parent, ctx.local[v]).into_iter().map(|k| members[k]).collect();
        to_a.reverse();
        let from_a: Vec<usize> = path_to(&fwd.parent, ctx.local[v]).into_iter().map(|k| members[k]).collect();
        let mut c: Vec<usize> = to_a[1..].to_vec();
        c.extend_from_slice(&from_a[1..]);
        c
    };
    Ok(LassoPlan {
        prefix,
        cycle,
        cost: best.cost,
    })
}
