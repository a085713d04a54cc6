use std::collections::HashMap;

use crate::ltl::Nba;
use crate::ts::ProductTs;

use super::PlanError;

/// Product Büchi automaton `TS ⊗ B`, restricted to reachable states.
///
/// Node `(q, s)` means the system is in TS state `q` and the automaton has
/// read the observations up to and including `q`. Because the TS relation is
/// complete, the successors of a node depend only on its automaton state and
/// are shared per automaton state.
#[derive(Clone, Debug)]
pub struct Pba {
    ts_state: Vec<u32>,
    nba_state: Vec<u32>,
    accepting: Vec<bool>,
    initial: Vec<u32>,
    /// successors per automaton state, as product node ids
    succ: Vec<Vec<u32>>,
    by_nba: Vec<Vec<u32>>,
    /// predecessor automaton states per (automaton state, TS state)
    pred_nba: HashMap<(u32, u32), Vec<u32>>,
}

impl Pba {
    pub fn len(&self) -> usize {
        self.ts_state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts_state.is_empty()
    }

    pub fn ts_state(&self, v: usize) -> usize {
        self.ts_state[v] as usize
    }

    pub fn nba_state(&self, v: usize) -> usize {
        self.nba_state[v] as usize
    }

    pub fn is_accepting(&self, v: usize) -> bool {
        self.accepting[v]
    }

    pub fn num_accepting(&self) -> usize {
        self.accepting.iter().filter(|&&a| a).count()
    }

    pub fn initial(&self) -> &[u32] {
        &self.initial
    }

    pub fn successors(&self, v: usize) -> &[u32] {
        &self.succ[self.nba_state[v] as usize]
    }

    /// Nodes with an edge into `w`.
    pub fn predecessors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        let key = (self.nba_state[w], self.ts_state[w]);
        self.pred_nba
            .get(&key)
            .into_iter()
            .flatten()
            .flat_map(move |&s| self.by_nba[s as usize].iter().map(|&v| v as usize))
    }

    /// Number of product edges (computed, not stored).
    pub fn num_edges(&self) -> usize {
        (0..self.len()).map(|v| self.successors(v).len()).sum()
    }
}

/// Builds the reachable part of `ts ⊗ nba`, failing once more than `budget`
/// product states exist.
pub fn build_pba(ts: &ProductTs, nba: &Nba, budget: usize) -> Result<Pba, PlanError> {
    let n_nba = nba.num_states();
    // TS states matching each transition label, computed once per transition
    let mut moves: Vec<Vec<(u32, Vec<u32>)>> = vec![Vec::new(); n_nba];
    for t in nba.transitions() {
        let Some((need, forbid)) = ts.compile_label(&t.label) else {
            continue;
        };
        let qs: Vec<u32> = (0..ts.num_states())
            .filter(|&q| {
                let m = ts.state(q);
                m & need == need && m & forbid == 0
            })
            .map(|q| q as u32)
            .collect();
        if !qs.is_empty() {
            moves[t.from].push((t.to as u32, qs));
        }
    }

    let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
    let mut ts_state = Vec::new();
    let mut nba_state = Vec::new();
    let mut add = |q: u32, s: u32, ts_state: &mut Vec<u32>, nba_state: &mut Vec<u32>| -> Result<u32, PlanError> {
        if let Some(&v) = ids.get(&(q, s)) {
            return Ok(v);
        }
        if ts_state.len() >= budget {
            return Err(PlanError::BudgetExceeded {
                what: "product states",
                limit: budget,
            });
        }
        let v = ts_state.len() as u32;
        ids.insert((q, s), v);
        ts_state.push(q);
        nba_state.push(s);
        Ok(v)
    };

    let q0 = ts.initial() as u32;
    let mut initial = Vec::new();
    for &s0 in nba.initial() {
        for (to, qs) in &moves[s0] {
            if qs.contains(&q0) {
                initial.push(add(q0, *to, &mut ts_state, &mut nba_state)?);
            }
        }
    }
    initial.sort_unstable();
    initial.dedup();

    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); n_nba];
    let mut expanded = vec![false; n_nba];
    let mut cursor = 0;
    while cursor < ts_state.len() {
        let s = nba_state[cursor] as usize;
        cursor += 1;
        if expanded[s] {
            continue;
        }
        expanded[s] = true;
        let mut out = Vec::new();
        for (to, qs) in &moves[s] {
            for &q in qs {
                out.push(add(q, *to, &mut ts_state, &mut nba_state)?);
            }
        }
        out.sort_unstable();
        out.dedup();
        succ[s] = out;
    }

    let mut by_nba: Vec<Vec<u32>> = vec![Vec::new(); n_nba];
    for (v, &s) in nba_state.iter().enumerate() {
        by_nba[s as usize].push(v as u32);
    }
    let mut pred_nba: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (s, ms) in moves.iter().enumerate() {
        if !expanded[s] {
            continue;
        }
        for (to, qs) in ms {
            for &q in qs {
                pred_nba.entry((*to, q)).or_default().push(s as u32);
            }
        }
    }
    for v in pred_nba.values_mut() {
        v.sort_unstable();
        v.dedup();
    }
    let accepting = nba_state.iter().map(|&s| nba.is_accepting(s as usize)).collect();
    Ok(Pba {
        ts_state,
        nba_state,
        accepting,
        initial,
        succ,
        by_nba,
        pred_nba,
    })
}
