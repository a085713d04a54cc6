use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{AtomicProp, Letter};
use crate::planner::scc_decompose;

/// Partial letter constraint: a conjunction of literals.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub must_true: BTreeSet<AtomicProp>,
    pub must_false: BTreeSet<AtomicProp>,
}

impl Label {
    pub fn new(must_true: BTreeSet<AtomicProp>, must_false: BTreeSet<AtomicProp>) -> Self {
        Label {
            must_true,
            must_false,
        }
    }

    pub fn matches(&self, letter: &Letter) -> bool {
        self.must_true.iter().all(|p| letter.contains(p))
            && self.must_false.iter().all(|p| !letter.contains(p))
    }

    pub fn is_consistent(&self) -> bool {
        self.must_true.is_disjoint(&self.must_false)
    }

    pub fn is_tautology(&self) -> bool {
        self.must_true.is_empty() && self.must_false.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NbaTransition {
    pub from: usize,
    #[serde(flatten)]
    pub label: Label,
    pub to: usize,
}

/// State-based Büchi automaton over the alphabet `2^AP`.
///
/// A run starts in an initial state and reads one letter per transition, so
/// the state reached after `t` steps has consumed positions `0..t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nba {
    num_states: usize,
    initial: BTreeSet<usize>,
    accepting: Vec<bool>,
    transitions: Vec<NbaTransition>,
    out: Vec<Vec<usize>>,
}

/// JSON export layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NbaJson {
    pub states: Vec<usize>,
    pub initial: Vec<usize>,
    pub accepting: Vec<usize>,
    pub transitions: Vec<NbaTransition>,
}

impl Nba {
    /// Panics if a transition or initial state is out of range or a label is
    /// contradictory; automata are only built internally or from checked JSON.
    pub fn new(
        num_states: usize,
        initial: BTreeSet<usize>,
        accepting: BTreeSet<usize>,
        mut transitions: Vec<NbaTransition>,
    ) -> Self {
        transitions.sort();
        transitions.dedup();
        let mut out = vec![Vec::new(); num_states];
        for (k, t) in transitions.iter().enumerate() {
            assert!(t.from < num_states && t.to < num_states, "transition out of range");
            assert!(t.label.is_consistent(), "contradictory label");
            out[t.from].push(k);
        }
        assert!(initial.iter().all(|&s| s < num_states));
        let mut acc = vec![false; num_states];
        for s in accepting {
            acc[s] = true;
        }
        Nba {
            num_states,
            initial,
            accepting: acc,
            transitions,
            out,
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn accepting(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states).filter(|&s| self.accepting[s])
    }

    pub fn transitions(&self) -> &[NbaTransition] {
        &self.transitions
    }

    pub fn outgoing(&self, s: usize) -> impl Iterator<Item = &NbaTransition> + '_ {
        self.out[s].iter().map(|&k| &self.transitions[k])
    }

    pub fn props(&self) -> BTreeSet<AtomicProp> {
        self.transitions
            .iter()
            .flat_map(|t| t.label.must_true.iter().chain(&t.label.must_false))
            .copied()
            .collect()
    }

    pub fn to_json(&self) -> NbaJson {
        NbaJson {
            states: (0..self.num_states).collect(),
            initial: self.initial.iter().copied().collect(),
            accepting: self.accepting().collect(),
            transitions: self.transitions.clone(),
        }
    }

    pub fn from_json(j: &NbaJson) -> Result<Self, String> {
        let n = j.states.len();
        if j.states.iter().enumerate().any(|(k, &s)| k != s) {
            return Err("states must be numbered 0..n".into());
        }
        let in_range = |s: &usize| *s < n;
        if !j.initial.iter().all(in_range) || !j.accepting.iter().all(in_range) {
            return Err("state index out of range".into());
        }
        for t in &j.transitions {
            if t.from >= n || t.to >= n {
                return Err(format!("transition {} -> {} out of range", t.from, t.to));
            }
            if !t.label.is_consistent() {
                return Err(format!("contradictory label on {} -> {}", t.from, t.to));
            }
        }
        Ok(Nba::new(
            n,
            j.initial.iter().copied().collect(),
            j.accepting.iter().copied().collect(),
            j.transitions.clone(),
        ))
    }
}

/// Whether some run of `b` on `prefix · suffix^ω` visits an accepting state
/// infinitely often. Panics when `suffix` is empty.
pub fn nba_accepts_lasso(b: &Nba, prefix: &[Letter], suffix: &[Letter]) -> bool {
    assert!(!suffix.is_empty(), "lasso suffix must be nonempty");
    let word: Vec<&Letter> = prefix.iter().chain(suffix).collect();
    let word = &word;
    let len = word.len();
    let n = b.num_states();
    let next_pos = |i: usize| if i + 1 < len { i + 1 } else { prefix.len() };
    // product node (i, s): in state s, about to read position i
    let succ = |v: usize| {
        let (i, s) = (v / n, v % n);
        let j = next_pos(i);
        b.outgoing(s)
            .filter(move |t| t.label.matches(word[i]))
            .map(move |t| j * n + t.to)
            .collect::<Vec<_>>()
    };
    let total = len * n;
    let mut seen = vec![false; total];
    let mut stack: Vec<usize> = b.initial().iter().copied().collect();
    for &v in &stack {
        seen[v] = true;
    }
    while let Some(v) = stack.pop() {
        for w in succ(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    let scc = scc_decompose(total, |v| if seen[v] { succ(v) } else { Vec::new() });
    (0..total).any(|v| seen[v] && b.is_accepting(v % n) && scc.is_nontrivial(scc.component_of(v)))
}
