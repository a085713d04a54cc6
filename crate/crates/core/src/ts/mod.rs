//! Transition systems for link activation, transition costs and schedules.

mod cost;
mod schedule;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{AtomicProp, Label, Letter};
use crate::network::{Graph, LinkId};

pub use cost::{
    cost_to_go, hausdorff, jaccard_cost, jaccard_mask, plan_cost, CostFn, MaskCost, TableEntry,
};
pub use schedule::{sequential_schedule, CostedLasso, Lasso, Schedule, ScheduleError};

/// Items are capped by the bitmask width.
pub const MAX_ITEMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TsError {
    #[error("{0} items exceed the {MAX_ITEMS}-item bitset universe")]
    TooManyItems(usize),
    #[error("product transition system exceeds the budget of {0} states")]
    BudgetExceeded(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkState {
    Inactive,
    Active,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkInput {
    Standby,
    Switch,
}

/// Two-state activation model of a single link. Starts inactive; the active
/// state observes the link's proposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinkTs {
    pub edge: LinkId,
}

impl LinkTs {
    pub fn initial(&self) -> LinkState {
        LinkState::Inactive
    }

    pub fn step(&self, q: LinkState, input: LinkInput) -> LinkState {
        match (q, input) {
            (q, LinkInput::Standby) => q,
            (LinkState::Inactive, LinkInput::Switch) => LinkState::Active,
            (LinkState::Active, LinkInput::Switch) => LinkState::Inactive,
        }
    }

    pub fn observe(&self, q: LinkState) -> BTreeSet<AtomicProp> {
        match q {
            LinkState::Active => BTreeSet::from([AtomicProp::Link(self.edge)]),
            LinkState::Inactive => BTreeSet::new(),
        }
    }

    pub fn transitions(&self) -> Vec<(LinkState, LinkInput, LinkState)> {
        let mut out = Vec::new();
        for q in [LinkState::Inactive, LinkState::Active] {
            for s in [LinkInput::Standby, LinkInput::Switch] {
                out.push((q, s, self.step(q, s)));
            }
        }
        out
    }
}

pub fn build_link_ts(e: LinkId) -> LinkTs {
    LinkTs { edge: e }
}

/// Which item subsets are states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Every subset.
    Complete,
    /// Only subsets without two conflicting items.
    NonInterfering,
}

/// Product of per-item activation systems. States are item subsets stored
/// as bitmasks over `items`; the transition relation is complete (every
/// ordered pair of states, self-loops included) and the only initial state is
/// the empty set.
#[derive(Clone, Debug)]
pub struct ProductTs {
    items: Vec<AtomicProp>,
    conflicts: Vec<u64>,
    policy: Policy,
    states: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl ProductTs {
    /// `conflicts[k]` is the mask of items interfering with item `k`.
    pub fn new(
        items: Vec<AtomicProp>,
        conflicts: Vec<u64>,
        policy: Policy,
        budget: usize,
    ) -> Result<Self, TsError> {
        let n = items.len();
        if n > MAX_ITEMS {
            return Err(TsError::TooManyItems(n));
        }
        assert_eq!(conflicts.len(), n);
        let states = match policy {
            Policy::Complete => {
                if n >= 63 || (1u64 << n) as usize > budget {
                    return Err(TsError::BudgetExceeded(budget));
                }
                (0..1u64 << n).collect()
            }
            Policy::NonInterfering => independent_sets(&conflicts, budget)?,
        };
        let index = states.iter().enumerate().map(|(k, &m)| (m, k)).collect();
        Ok(ProductTs {
            items,
            conflicts,
            policy,
            states,
            index,
        })
    }

    pub fn items(&self) -> &[AtomicProp] {
        &self.items
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn conflicts(&self, k: usize) -> u64 {
        self.conflicts[k]
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, idx: usize) -> u64 {
        self.states[idx]
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn index_of(&self, mask: u64) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    /// Index of the empty set.
    pub fn initial(&self) -> usize {
        self.index[&0]
    }

    /// Lazily enumerated successors: every state.
    pub fn successors(&self, _idx: usize) -> std::ops::Range<usize> {
        0..self.states.len()
    }

    pub fn full_mask(&self) -> u64 {
        if self.items.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.items.len()) - 1
        }
    }

    pub fn is_independent(&self, mask: u64) -> bool {
        (0..self.items.len()).all(|k| mask >> k & 1 == 0 || self.conflicts[k] & mask == 0)
    }

    pub fn observation(&self, mask: u64) -> Letter {
        self.items
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, p)| *p)
            .collect()
    }

    pub fn mask_of(&self, props: &BTreeSet<AtomicProp>) -> Option<u64> {
        let mut m = 0u64;
        for p in props {
            m |= 1 << self.items.iter().position(|x| x == p)?;
        }
        Some(m)
    }

    /// Label as `(need, forbid)` masks. `None` when the label requires a
    /// proposition outside the universe (it can never be observed);
    /// forbidden propositions outside the universe are ignored.
    pub fn compile_label(&self, l: &Label) -> Option<(u64, u64)> {
        let need = self.mask_of(&l.must_true)?;
        let forbid = l
            .must_false
            .iter()
            .filter_map(|p| self.items.iter().position(|x| x == p))
            .fold(0u64, |m, k| m | 1 << k);
        Some((need, forbid))
    }

    pub fn links_of(&self, mask: u64) -> BTreeSet<LinkId> {
        self.observation(mask)
            .into_iter()
            .filter_map(|p| match p {
                AtomicProp::Link(e) => Some(e),
                AtomicProp::Node(_) => None,
            })
            .collect()
    }

    pub fn nodes_of(&self, mask: u64) -> BTreeSet<usize> {
        self.observation(mask)
            .into_iter()
            .filter_map(|p| match p {
                AtomicProp::Node(j) => Some(j),
                AtomicProp::Link(_) => None,
            })
            .collect()
    }
}

fn independent_sets(conflicts: &[u64], budget: usize) -> Result<Vec<u64>, TsError> {
    let n = conflicts.len();
    let mut out = Vec::new();
    // depth-first over items in order; `blocked` holds items excluded so far
    let mut stack = vec![(0usize, 0u64, 0u64)];
    while let Some((k, mask, blocked)) = stack.pop() {
        if k == n {
            if out.len() >= budget {
                return Err(TsError::BudgetExceeded(budget));
            }
            out.push(mask);
            continue;
        }
        if blocked >> k & 1 == 0 {
            stack.push((k + 1, mask | 1 << k, blocked | conflicts[k]));
        }
        stack.push((k + 1, mask, blocked));
    }
    out.sort_unstable();
    Ok(out)
}

/// Product system over the links of `g`; links conflict when they share an
/// endpoint.
pub fn build_product_ts(g: &Graph, policy: Policy, budget: usize) -> Result<ProductTs, TsError> {
    let edges: Vec<LinkId> = g.edges.iter().copied().collect();
    let conflicts = edges
        .iter()
        .enumerate()
        .map(|(a, e)| {
            edges
                .iter()
                .enumerate()
                .filter(|&(b, f)| a != b && e.shares_endpoint(f))
                .fold(0u64, |m, (b, _)| m | 1 << b)
        })
        .collect();
    if edges.len() > MAX_ITEMS {
        return Err(TsError::TooManyItems(edges.len()));
    }
    ProductTs::new(
        edges.into_iter().map(AtomicProp::Link).collect(),
        conflicts,
        policy,
        budget,
    )
}

/// Product system over the nodes of a command graph; adjacent nodes conflict.
pub fn build_command_ts(g_cmd: &Graph, policy: Policy, budget: usize) -> Result<ProductTs, TsError> {
    let nodes: Vec<usize> = g_cmd.nodes.iter().copied().collect();
    if nodes.len() > MAX_ITEMS {
        return Err(TsError::TooManyItems(nodes.len()));
    }
    let conflicts = nodes
        .iter()
        .map(|&j| {
            let nb = g_cmd.neighbors(j);
            nodes
                .iter()
                .enumerate()
                .filter(|(_, k)| nb.contains(k))
                .fold(0u64, |m, (b, _)| m | 1 << b)
        })
        .collect();
    ProductTs::new(
        nodes.into_iter().map(AtomicProp::Node).collect(),
        conflicts,
        policy,
        budget,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, j: usize) -> LinkId {
        LinkId::new(i, j)
    }

    #[test]
    fn link_ts_transitions() {
        let ts = build_link_ts(e(0, 1));
        assert_eq!(ts.step(LinkState::Inactive, LinkInput::Standby), LinkState::Inactive);
        assert_eq!(ts.step(LinkState::Inactive, LinkInput::Switch), LinkState::Active);
        for q in [LinkState::Inactive, LinkState::Active] {
            let back = ts.step(ts.step(q, LinkInput::Switch), LinkInput::Switch);
            assert_eq!(back, q);
        }
        assert_eq!(ts.transitions().len(), 4);
        assert!(ts.observe(ts.initial()).is_empty());
    }

    #[test]
    fn product_state_counts() {
        let single = Graph::with_order(2, [e(0, 1)]);
        assert_eq!(build_product_ts(&single, Policy::NonInterfering, 100).unwrap().num_states(), 2);
        assert_eq!(build_product_ts(&single, Policy::Complete, 100).unwrap().num_states(), 2);
        let p3 = Graph::with_order(3, [e(0, 1), e(1, 2)]);
        let ts = build_product_ts(&p3, Policy::NonInterfering, 100).unwrap();
        assert_eq!(ts.states(), &[0b00, 0b01, 0b10]);
        let disjoint = Graph::with_order(4, [e(0, 1), e(2, 3)]);
        assert_eq!(build_product_ts(&disjoint, Policy::NonInterfering, 100).unwrap().num_states(), 4);
    }

    #[test]
    fn complete_has_all_subsets() {
        for m in 0..=10 {
            let g = Graph::with_order(m + 1, (0..m).map(|k| e(k, k + 1)));
            let ts = build_product_ts(&g, Policy::Complete, 1 << 12).unwrap();
            assert_eq!(ts.num_states(), 1 << m);
        }
    }

    #[test]
    fn budget_and_width() {
        let g = Graph::with_order(5, (0..4).map(|k| e(k, k + 1)));
        assert_eq!(
            build_product_ts(&g, Policy::Complete, 8).unwrap_err(),
            TsError::BudgetExceeded(8)
        );
        assert!(build_product_ts(&g, Policy::NonInterfering, 8).is_ok());
    }

    #[test]
    fn labels_compile() {
        let p3 = Graph::with_order(3, [e(0, 1), e(1, 2)]);
        let ts = build_product_ts(&p3, Policy::NonInterfering, 100).unwrap();
        let l = Label::new(
            BTreeSet::from([AtomicProp::Link(e(1, 2))]),
            BTreeSet::from([AtomicProp::Link(e(0, 1)), AtomicProp::Link(e(5, 6))]),
        );
        assert_eq!(ts.compile_label(&l), Some((0b10, 0b01)));
        let out = Label::new(BTreeSet::from([AtomicProp::Link(e(5, 6))]), BTreeSet::new());
        assert_eq!(ts.compile_label(&out), None);
    }

    #[test]
    fn command_ts_star() {
        let star = Graph::with_order(3, [e(0, 1), e(0, 2)]);
        let ts = build_command_ts(&star, Policy::NonInterfering, 100).unwrap();
        // {}, {0}, {1}, {2}, {1,2}
        assert_eq!(ts.num_states(), 5);
        assert!(ts.states().iter().all(|&m| ts.is_independent(m)));
    }
}
