//! LTL to Büchi translation.
//!
//! Pipeline: GPVW tableau (generalized Büchi, state labels) → transition-based
//! GBA → bisimulation quotient → degeneralization → quotient and pruning.
//!
//! The tableau splits `U`, `F`, `R` and `|` so that sibling nodes disagree on a
//! literal whenever the distinguishing subformula is a literal. This keeps
//! successor choice close to letter-deterministic without changing the
//! language.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Formula, Label, LtlError, Nba, NbaTransition};
use crate::planner::scc_decompose;

/// Limits for [`translate_to_nba`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranslateOptions {
    /// Maximum number of tableau nodes and of degeneralized states.
    pub max_states: usize,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            max_states: 100_000,
        }
    }
}

type FId = usize;

#[derive(Default)]
struct Interner {
    formulas: Vec<Formula>,
    ids: HashMap<Formula, FId>,
}

impl Interner {
    fn id(&mut self, f: &Formula) -> FId {
        if let Some(&k) = self.ids.get(f) {
            return k;
        }
        let k = self.formulas.len();
        self.formulas.push(f.clone());
        self.ids.insert(f.clone(), k);
        k
    }

    fn get(&self, k: FId) -> &Formula {
        &self.formulas[k]
    }
}

const INIT: usize = usize::MAX;

#[derive(Clone)]
struct Pending {
    incoming: BTreeSet<usize>,
    new: Vec<FId>,
    old: BTreeSet<FId>,
    next: BTreeSet<FId>,
}

struct Done {
    incoming: BTreeSet<usize>,
    old: BTreeSet<FId>,
}

fn literal_negation(f: &Formula) -> Option<Formula> {
    f.is_literal().then(|| f.negated_nnf())
}

/// GPVW node expansion with a worklist. Returns finished nodes.
fn tableau(root: &Formula, intern: &mut Interner, budget: usize) -> Result<Vec<Done>, LtlError> {
    let mut done: Vec<Done> = Vec::new();
    let mut index: HashMap<(BTreeSet<FId>, BTreeSet<FId>), usize> = HashMap::new();
    let root_id = intern.id(root);
    let mut work = vec![Pending {
        incoming: BTreeSet::from([INIT]),
        new: vec![root_id],
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];
    let mut created = 1usize;
    let limit = |created: usize| -> Result<(), LtlError> {
        if created > budget {
            Err(LtlError::ResourceLimit {
                what: "tableau nodes",
                limit: budget,
            })
        } else {
            Ok(())
        }
    };

    'outer: while let Some(mut node) = work.pop() {
        while let Some(eta) = node.new.pop() {
            if node.old.contains(&eta) {
                continue;
            }
            let f = intern.get(eta).clone();
            match &f {
                Formula::False => continue 'outer,
                Formula::True => {
                    node.old.insert(eta);
                }
                Formula::Atom(_) | Formula::Not(_) => {
                    let neg = intern.id(&f.negated_nnf());
                    if node.old.contains(&neg) {
                        continue 'outer;
                    }
                    node.old.insert(eta);
                }
                Formula::And(v) => {
                    for g in v {
                        node.new.push(intern.id(g));
                    }
                    node.old.insert(eta);
                }
                Formula::Next(g) => {
                    node.next.insert(intern.id(g));
                    node.old.insert(eta);
                }
                Formula::Always(g) => {
                    node.new.push(intern.id(g));
                    node.next.insert(eta);
                    node.old.insert(eta);
                }
                Formula::Or(v) => {
                    node.old.insert(eta);
                    let mut branches = Vec::with_capacity(v.len());
                    for (i, g) in v.iter().enumerate() {
                        let mut b = node.clone();
                        b.new.push(intern.id(g));
                        for h in &v[..i] {
                            if let Some(n) = literal_negation(h) {
                                b.new.push(intern.id(&n));
                            }
                        }
                        branches.push(b);
                    }
                    created += branches.len() - 1;
                    limit(created)?;
                    node = branches.remove(0);
                    work.extend(branches);
                }
                Formula::Until(_, b) | Formula::Eventually(b) => {
                    let lhs = match &f {
                        Formula::Until(a, _) => Some(intern.id(a)),
                        _ => None,
                    };
                    node.old.insert(eta);
                    // defer: lhs now, same obligation next, rhs not yet
                    let mut defer = node.clone();
                    defer.new.extend(lhs);
                    defer.next.insert(eta);
                    if let Some(n) = literal_negation(b) {
                        defer.new.push(intern.id(&n));
                    }
                    node.new.push(intern.id(b));
                    created += 1;
                    limit(created)?;
                    work.push(defer);
                }
                Formula::Release(a, b) => {
                    node.old.insert(eta);
                    // stay: b now, a R b next, a not yet (if a is a literal)
                    let mut stay = node.clone();
                    stay.new.push(intern.id(b));
                    stay.next.insert(eta);
                    if let Some(n) = literal_negation(a) {
                        stay.new.push(intern.id(&n));
                    }
                    node.new.push(intern.id(a));
                    node.new.push(intern.id(b));
                    created += 1;
                    limit(created)?;
                    work.push(stay);
                }
            }
        }
        let key = (node.old, node.next);
        if let Some(&k) = index.get(&key) {
            done[k].incoming.extend(node.incoming);
            continue;
        }
        let k = done.len();
        let (old, next) = key;
        index.insert((old.clone(), next.clone()), k);
        done.push(Done {
            incoming: node.incoming,
            old,
        });
        created += 1;
        limit(created)?;
        work.push(Pending {
            incoming: BTreeSet::from([k]),
            new: next.into_iter().collect(),
            old: BTreeSet::new(),
            next: BTreeSet::new(),
        });
    }
    Ok(done)
}

/// Transition-based generalized Büchi automaton with interned labels.
struct Tgba {
    num_states: usize,
    initial: usize,
    /// (label, acceptance bits, target) per state, sorted and deduplicated.
    out: Vec<Vec<(usize, u64, usize)>>,
    labels: Vec<Label>,
    k: usize,
}

fn node_label(old: &BTreeSet<FId>, intern: &Interner) -> Label {
    let mut l = Label::default();
    for &f in old {
        match intern.get(f) {
            Formula::Atom(p) => {
                l.must_true.insert(*p);
            }
            Formula::Not(g) => {
                if let Formula::Atom(p) = **g {
                    l.must_false.insert(p);
                }
            }
            _ => {}
        }
    }
    l
}

fn build_tgba(nodes: &[Done], intern: &Interner) -> Result<Tgba, LtlError> {
    // acceptance conditions: every U/F formula found in some Old set
    let mut goals: BTreeSet<FId> = BTreeSet::new();
    for n in nodes {
        for &f in &n.old {
            if matches!(intern.get(f), Formula::Until(..) | Formula::Eventually(_)) {
                goals.insert(f);
            }
        }
    }
    let mut columns: Vec<Vec<bool>> = Vec::new();
    for &g in &goals {
        let rhs = match intern.get(g) {
            Formula::Until(_, b) | Formula::Eventually(b) => &**b,
            _ => unreachable!(),
        };
        let rhs_id = intern.ids.get(rhs).copied();
        let col: Vec<bool> = nodes
            .iter()
            .map(|n| !n.old.contains(&g) || rhs_id.is_some_and(|r| n.old.contains(&r)))
            .collect();
        if col.iter().all(|&b| b) || columns.contains(&col) {
            continue;
        }
        columns.push(col);
    }
    let k = columns.len();
    if k > 64 {
        return Err(LtlError::ResourceLimit {
            what: "acceptance sets",
            limit: 64,
        });
    }
    let bits: Vec<u64> = (0..nodes.len())
        .map(|n| {
            columns
                .iter()
                .enumerate()
                .filter(|(_, c)| c[n])
                .fold(0u64, |m, (i, _)| m | (1 << i))
        })
        .collect();

    let mut label_ids: HashMap<Label, usize> = HashMap::new();
    let mut labels = Vec::new();
    let init = nodes.len();
    let mut out = vec![Vec::new(); nodes.len() + 1];
    for (t, n) in nodes.iter().enumerate() {
        let l = node_label(&n.old, intern);
        let lid = *label_ids.entry(l.clone()).or_insert_with(|| {
            labels.push(l);
            labels.len() - 1
        });
        for &m in &n.incoming {
            let src = if m == INIT { init } else { m };
            out[src].push((lid, bits[t], t));
        }
    }
    for o in &mut out {
        o.sort_unstable();
        o.dedup();
    }
    Ok(Tgba {
        num_states: nodes.len() + 1,
        initial: init,
        out,
        labels,
        k,
    })
}

/// Coarsest partition such that equal blocks have equal sets of
/// `(key, target block)` pairs. `seed` gives the initial blocks.
fn refine<K: Ord + Clone + std::hash::Hash>(
    seed: &[usize],
    out: &[Vec<(K, usize)>],
) -> Vec<usize> {
    let n = seed.len();
    let mut block = seed.to_vec();
    let mut count = block.iter().copied().collect::<BTreeSet<_>>().len();
    loop {
        let mut ids: HashMap<(usize, Vec<(K, usize)>), usize> = HashMap::new();
        let mut next = vec![0; n];
        for s in 0..n {
            let mut sig: Vec<(K, usize)> = out[s].iter().map(|(k, t)| (k.clone(), block[*t])).collect();
            sig.sort();
            sig.dedup();
            let len = ids.len();
            next[s] = *ids.entry((block[s], sig)).or_insert(len);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

fn quotient_tgba(t: Tgba) -> Tgba {
    let out: Vec<Vec<((usize, u64), usize)>> = t
        .out
        .iter()
        .map(|o| o.iter().map(|&(l, b, s)| ((l, b), s)).collect())
        .collect();
    let block = refine(&vec![0; t.num_states], &out);
    let nb = block.iter().max().map_or(0, |m| m + 1);
    let mut q_out = vec![Vec::new(); nb];
    let mut filled = vec![false; nb];
    for s in 0..t.num_states {
        let b = block[s];
        if filled[b] {
            continue;
        }
        filled[b] = true;
        let mut o: Vec<(usize, u64, usize)> = t.out[s].iter().map(|&(l, bits, d)| (l, bits, block[d])).collect();
        o.sort_unstable();
        o.dedup();
        q_out[b] = o;
    }
    Tgba {
        num_states: nb,
        initial: block[t.initial],
        out: q_out,
        labels: t.labels,
        k: t.k,
    }
}

/// Degeneralized automaton before final cleanup: state-based acceptance.
struct RawNba {
    initial: usize,
    accepting: Vec<bool>,
    out: Vec<Vec<(usize, usize)>>,
}

fn degeneralize(t: &Tgba, budget: usize) -> Result<RawNba, LtlError> {
    // state key: (tgba state, mask); mask == STAR marks the accepting copy
    const STAR: u64 = u64::MAX;
    let full: u64 = if t.k == 64 { u64::MAX - 1 } else { (1u64 << t.k) - 1 };
    let mut ids: HashMap<(usize, u64), usize> = HashMap::new();
    let mut keys: Vec<(usize, u64)> = Vec::new();
    let mut out: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut intern = |key: (usize, u64),
                      keys: &mut Vec<(usize, u64)>,
                      out: &mut Vec<Vec<(usize, usize)>>|
     -> Result<usize, LtlError> {
        if let Some(&k) = ids.get(&key) {
            return Ok(k);
        }
        if keys.len() >= budget {
            return Err(LtlError::ResourceLimit {
                what: "automaton states",
                limit: budget,
            });
        }
        let k = keys.len();
        ids.insert(key, k);
        keys.push(key);
        out.push(Vec::new());
        Ok(k)
    };
    let init = intern((t.initial, 0), &mut keys, &mut out)?;
    let mut cursor = 0;
    while cursor < keys.len() {
        let (s, mask) = keys[cursor];
        let mut edges = Vec::new();
        for &(l, bits, d) in &t.out[s] {
            match t.k {
                0 => edges.push((l, intern((d, 0), &mut keys, &mut out)?)),
                // single set: remember whether the last step was accepting
                1 => edges.push((l, intern((d, bits & 1), &mut keys, &mut out)?)),
                _ => {
                    let base = if mask == STAR { 0 } else { mask };
                    let m = base | bits;
                    if m == full {
                        edges.push((l, intern((d, full), &mut keys, &mut out)?));
                        edges.push((l, intern((d, STAR), &mut keys, &mut out)?));
                    } else {
                        edges.push((l, intern((d, m), &mut keys, &mut out)?));
                    }
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        out[cursor] = edges;
        cursor += 1;
    }
    let accepting = keys
        .iter()
        .map(|&(_, m)| match t.k {
            0 => true,
            1 => m == 1,
            _ => m == STAR,
        })
        .collect();
    Ok(RawNba {
        initial: init,
        accepting,
        out,
    })
}

/// Drops states that cannot start an accepting run, then merges bisimilar
/// states.
fn cleanup(raw: RawNba, labels: &[Label]) -> Nba {
    let n = raw.out.len();
    let scc = scc_decompose(n, |v| raw.out[v].iter().map(|&(_, t)| t).collect::<Vec<_>>());
    // states that can reach an accepting state lying on a cycle
    let mut live = vec![false; n];
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, o) in raw.out.iter().enumerate() {
        for &(_, t) in o {
            rev[t].push(s);
        }
    }
    let mut stack: Vec<usize> = (0..n)
        .filter(|&s| raw.accepting[s] && scc.is_nontrivial(scc.component_of(s)))
        .collect();
    for &s in &stack {
        live[s] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &rev[v] {
            if !live[u] {
                live[u] = true;
                stack.push(u);
            }
        }
    }
    if !live[raw.initial] {
        return Nba::new(1, BTreeSet::from([0]), BTreeSet::new(), Vec::new());
    }
    let out: Vec<Vec<((usize, bool), usize)>> = raw
        .out
        .iter()
        .map(|o| {
            o.iter()
                .filter(|&&(_, t)| live[t])
                .map(|&(l, t)| ((l, true), t))
                .collect()
        })
        .collect();
    // seed blocks: dead states apart, then accepting vs not
    let seed: Vec<usize> = (0..n)
        .map(|s| if !live[s] { 0 } else if raw.accepting[s] { 1 } else { 2 })
        .collect();
    let block = refine(&seed, &out);

    // renumber blocks by BFS from the initial state for stable output
    let mut order: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rep: Vec<usize> = Vec::new();
    let mut queue = std::collections::VecDeque::from([raw.initial]);
    let mut visited = vec![false; n];
    visited[raw.initial] = true;
    while let Some(s) = queue.pop_front() {
        if let std::collections::btree_map::Entry::Vacant(e) = order.entry(block[s]) {
            e.insert(rep.len());
            rep.push(s);
        }
        for &((_, _), t) in &out[s] {
            if !visited[t] {
                visited[t] = true;
                queue.push_back(t);
            }
        }
    }
    let mut transitions = Vec::new();
    let mut accepting = BTreeSet::new();
    for (q, &s) in rep.iter().enumerate() {
        if raw.accepting[s] {
            accepting.insert(q);
        }
        for &((l, _), t) in &out[s] {
            transitions.push(NbaTransition {
                from: q,
                label: labels[l].clone(),
                to: order[&block[t]],
            });
        }
    }
    Nba::new(rep.len(), BTreeSet::from([0]), accepting, transitions)
}

/// Translates `f` (NNF is produced internally if needed) into an NBA that
/// accepts exactly the words satisfying `f`.
pub fn translate_to_nba(f: &Formula, opts: &TranslateOptions) -> Result<Nba, LtlError> {
    let f = f.to_nnf().simplify();
    let mut intern = Interner::default();
    let nodes = tableau(&f, &mut intern, opts.max_states)?;
    let tgba = quotient_tgba(build_tgba(&nodes, &intern)?);
    let raw = degeneralize(&tgba, opts.max_states)?;
    Ok(cleanup(raw, &tgba.labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{eval_lasso, nba_accepts_lasso, parse, AtomicProp, Letter};

    fn tr(text: &str) -> Nba {
        translate_to_nba(&parse(text).unwrap(), &TranslateOptions::default()).unwrap()
    }

    #[test]
    fn always_p_is_one_state() {
        let b = tr("G e_0_1");
        assert_eq!(b.num_states(), 1);
        assert!(b.is_accepting(0));
        assert_eq!(b.transitions().len(), 1);
        let t = &b.transitions()[0];
        assert_eq!((t.from, t.to), (0, 0));
        assert_eq!(t.label.must_true, BTreeSet::from([AtomicProp::link(0, 1)]));
        assert!(t.label.must_false.is_empty());
    }

    #[test]
    fn eventually_p_is_two_states() {
        let b = tr("F e_0_1");
        assert_eq!(b.num_states(), 2);
        assert_eq!(b.accepting().count(), 1);
        let acc = b.accepting().next().unwrap();
        assert!(b.outgoing(acc).all(|t| t.to == acc && t.label.is_tautology()));
    }

    #[test]
    fn contradiction_is_empty() {
        let b = tr("G e_0_1 & G !e_0_1");
        assert_eq!(b.accepting().count(), 0);
        let b = tr("false");
        assert_eq!(b.accepting().count(), 0);
    }

    #[test]
    fn budget_is_enforced() {
        let f = parse("G F e_0_1 & G F e_1_2 & G F e_2_3 & G F e_3_4").unwrap();
        let err = translate_to_nba(&f, &TranslateOptions { max_states: 4 }).unwrap_err();
        assert!(matches!(err, LtlError::ResourceLimit { .. }));
    }

    fn all_lassos(props: &[AtomicProp], max_pre: usize, max_suf: usize) -> Vec<(Vec<Letter>, Vec<Letter>)> {
        let letters: Vec<Letter> = (0..1usize << props.len())
            .map(|m| {
                props
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| m >> i & 1 == 1)
                    .map(|(_, p)| *p)
                    .collect()
            })
            .collect();
        let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
        let mut by_len = vec![words.clone()];
        for _ in 0..max_pre.max(max_suf) {
            words = words
                .iter()
                .flat_map(|w| {
                    letters.iter().map(move |l| {
                        let mut w = w.clone();
                        w.push(l.clone());
                        w
                    })
                })
                .collect();
            by_len.push(words.clone());
        }
        let mut out = Vec::new();
        for pl in 0..=max_pre {
            for sl in 1..=max_suf {
                for p in &by_len[pl] {
                    for s in &by_len[sl] {
                        out.push((p.clone(), s.clone()));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn agrees_with_semantics_on_handpicked() {
        let props = [AtomicProp::link(0, 1), AtomicProp::link(1, 2)];
        let lassos = all_lassos(&props, 2, 3);
        for text in [
            "G F e_0_1 & G F e_1_2",
            "G (e_0_1 -> !e_1_2) & G F e_0_1 & G F e_1_2",
            "e_0_1 U e_1_2",
            "e_0_1 R e_1_2",
            "F G e_0_1",
            "G (e_0_1 -> X (!e_0_1 U e_1_2))",
            "X (e_0_1 | X !e_1_2)",
            "!(G F e_0_1 -> F e_1_2)",
            "(e_0_1 U e_1_2) | G !e_1_2",
            "G (e_0_1 -> G (!e_0_1 U e_1_2))",
        ] {
            let f = parse(text).unwrap();
            let b = translate_to_nba(&f, &TranslateOptions::default()).unwrap();
            for (p, s) in &lassos {
                assert_eq!(
                    nba_accepts_lasso(&b, p, s),
                    eval_lasso(&f, p, s),
                    "{text} on {p:?} {s:?}"
                );
            }
        }
    }

    #[test]
    fn gf_conjunction_stays_small() {
        let b = tr("G F e_0_1 & G F e_1_2 & G F e_2_3");
        // one TGBA state with 3 acceptance sets
        assert!(b.num_states() <= 16, "{}", b.num_states());
    }
}
