//! Brute-force ground truth for small instances: exhaustive lasso
//! enumeration checked with the lasso semantics of LTL.
//!
//! Nothing here uses automata or product search.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ltl::{build_fairness, build_phi, eval_lasso, nba_accepts_lasso, AtomicProp, Formula, Letter, LtlError, Nba};
use crate::network::{Graph, LinkId};
use crate::ts::{plan_cost, CostFn, Lasso, Schedule};

/// Largest link count accepted by [`brute_force_optimal`].
pub const MAX_ORACLE_EDGES: usize = 4;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle limited to {MAX_ORACLE_EDGES} links, got {0}")]
    TooManyEdges(usize),
    #[error("bounds must allow a prefix and a suffix of length at least 1")]
    BadBounds,
    #[error("formula has {got} propositions, more than the limit of {limit}")]
    TooManyProps { got: usize, limit: usize },
    #[error(transparent)]
    Ltl(#[from] LtlError),
}

/// All `(prefix, suffix)` pairs of words over `alphabet` with
/// `min_prefix ≤ |prefix| ≤ max_prefix` and `1 ≤ |suffix| ≤ max_suffix`.
#[derive(Clone, Debug)]
pub struct LassoEnumeration<T> {
    pub alphabet: Vec<BTreeSet<T>>,
    pub min_prefix: usize,
    pub max_prefix: usize,
    pub max_suffix: usize,
}

fn words<T: Clone + Ord>(alphabet: &[BTreeSet<T>], len: usize) -> Vec<Vec<BTreeSet<T>>> {
    let mut out: Vec<Vec<BTreeSet<T>>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |a| {
                    let mut w = w.clone();
                    w.push(a.clone());
                    w
                })
            })
            .collect();
    }
    out
}

impl<T: Clone + Ord> LassoEnumeration<T> {
    pub fn iter(&self) -> impl Iterator<Item = (Vec<BTreeSet<T>>, Vec<BTreeSet<T>>)> + '_ {
        (self.min_prefix..=self.max_prefix).flat_map(move |pl| {
            (1..=self.max_suffix).flat_map(move |sl| {
                let prefixes = words(&self.alphabet, pl);
                let suffixes = words(&self.alphabet, sl);
                prefixes
                    .into_iter()
                    .flat_map(move |p| suffixes.clone().into_iter().map(move |s| (p.clone(), s)))
            })
        })
    }

    pub fn count(&self) -> usize {
        let a = self.alphabet.len();
        let prefixes: usize = (self.min_prefix..=self.max_prefix).map(|l| a.pow(l as u32)).sum();
        let suffixes: usize = (1..=self.max_suffix).map(|l| a.pow(l as u32)).sum();
        prefixes * suffixes
    }
}

/// Link subsets without two links sharing an endpoint, in a fixed order
/// (by size, then lexicographic).
pub fn independent_link_sets(g: &Graph) -> Vec<BTreeSet<LinkId>> {
    let edges: Vec<LinkId> = g.edges.iter().copied().collect();
    let mut out = Vec::new();
    for m in 0u32..1 << edges.len() {
        let set: BTreeSet<LinkId> = (0..edges.len())
            .filter(|k| m >> k & 1 == 1)
            .map(|k| edges[k])
            .collect();
        let clash = set
            .iter()
            .any(|a| set.iter().any(|b| a < b && a.shares_endpoint(b)));
        if !clash {
            out.push(set);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub schedule: Schedule,
    pub cost: f64,
    pub checked: usize,
}

fn letters(v: &[BTreeSet<LinkId>]) -> Vec<Letter> {
    v.iter()
        .map(|s| s.iter().map(|&e| AtomicProp::Link(e)).collect())
        .collect()
}

/// Cheapest lasso within the bounds that starts with every link inactive
/// and satisfies the link specification (plus fairness when asked).
///
/// Prefixes have length `1..=max_prefix` and begin with `∅`; suffixes have
/// length `1..=max_suffix` and end on the last prefix element. Only
/// non-interfering sets are enumerated: any other set violates the safety
/// part at the instant it occurs. Ties go to the shorter suffix, then the
/// shorter prefix, then enumeration order.
pub fn brute_force_optimal(
    g: &Graph,
    cost: &CostFn,
    max_prefix: usize,
    max_suffix: usize,
    fairness: bool,
) -> Result<Option<OracleResult>, OracleError> {
    if g.edges.len() > MAX_ORACLE_EDGES {
        return Err(OracleError::TooManyEdges(g.edges.len()));
    }
    if max_prefix == 0 || max_suffix == 0 {
        return Err(OracleError::BadBounds);
    }
    let mut f = build_phi(g);
    if fairness {
        let mut parts = vec![f];
        for &e in &g.edges {
            parts.push(build_fairness(g, e)?);
        }
        f = Formula::and_all(parts);
    }
    let alphabet = independent_link_sets(g);
    let c = |a: &BTreeSet<LinkId>, b: &BTreeSet<LinkId>| cost.eval(a, b);

    // partitioned by the first suffix element
    let per_first: Vec<(Option<(f64, usize, usize, usize, Schedule)>, usize)> = alphabet
        .par_iter()
        .enumerate()
        .map(|(fi, first)| {
            let mut best: Option<(f64, usize, usize, usize, Schedule)> = None;
            let mut checked = 0;
            let mut order = 0usize;
            for pl in 1..=max_prefix {
                for prefix in words(&alphabet, pl - 1) {
                    let mut prefix = prefix;
                    prefix.insert(0, BTreeSet::new());
                    for sl in 1..=max_suffix {
                        for rest in words(&alphabet, sl - 1) {
                            order += 1;
                            let mut suffix = vec![first.clone()];
                            suffix.extend(rest);
                            if suffix.last() != prefix.last() {
                                continue;
                            }
                            checked += 1;
                            if !eval_lasso(&f, &letters(&prefix), &letters(&suffix)) {
                                continue;
                            }
                            let s = Lasso {
                                prefix: prefix.clone(),
                                suffix,
                            };
                            let j = plan_cost(&s, c);
                            let key = (j, sl, pl, fi * 1_000_000_000 + order);
                            let wins = match &best {
                                None => true,
                                Some((bj, bs, bp, bo, _)) => {
                                    j < bj - 1e-12 || ((j - bj).abs() <= 1e-12 && (key.1, key.2, key.3) < (*bs, *bp, *bo))
                                }
                            };
                            if wins {
                                best = Some((key.0, key.1, key.2, key.3, s));
                            }
                        }
                    }
                }
            }
            (best, checked)
        })
        .collect();

    let checked = per_first.iter().map(|(_, k)| k).sum();
    let best = per_first.into_iter().filter_map(|(b, _)| b).fold(None, |acc, b| match acc {
        None => Some(b),
        Some(a) => {
            let take = b.0 < a.0 - 1e-12 || ((b.0 - a.0).abs() <= 1e-12 && (b.1, b.2, b.3) < (a.1, a.2, a.3));
            Some(if take { b } else { a })
        }
    });
    Ok(best.map(|(cost, _, _, _, schedule)| OracleResult {
        schedule,
        cost,
        checked,
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Disagreement {
    pub prefix: Vec<Letter>,
    pub suffix: Vec<Letter>,
    pub automaton: bool,
    pub semantics: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranslationReport {
    pub formula: String,
    pub states: usize,
    pub lassos_checked: usize,
    pub disagreements: Vec<Disagreement>,
}

impl TranslationReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

fn all_letters(props: &BTreeSet<AtomicProp>) -> Vec<Letter> {
    let props: Vec<AtomicProp> = props.iter().copied().collect();
    (0u32..1 << props.len())
        .map(|m| {
            (0..props.len())
                .filter(|k| m >> k & 1 == 1)
                .map(|k| props[k])
                .collect()
        })
        .collect()
}

/// Compares `nba` against the semantics of `f` on every lasso over the
/// propositions of `f` with prefix length `0..=max_len` and suffix length
/// `1..=max_len`.
pub fn verify_nba(f: &Formula, nba: &Nba, max_props: usize, max_len: usize) -> Result<TranslationReport, OracleError> {
    let props = f.props();
    if props.len() > max_props {
        return Err(OracleError::TooManyProps {
            got: props.len(),
            limit: max_props,
        });
    }
    let en = LassoEnumeration {
        alphabet: all_letters(&props),
        min_prefix: 0,
        max_prefix: max_len,
        max_suffix: max_len,
    };
    let cases: Vec<(Vec<Letter>, Vec<Letter>)> = en.iter().collect();
    let disagreements: Vec<Disagreement> = cases
        .par_iter()
        .filter_map(|(p, s)| {
            let automaton = nba_accepts_lasso(nba, p, s);
            let semantics = eval_lasso(f, p, s);
            (automaton != semantics).then(|| Disagreement {
                prefix: p.clone(),
                suffix: s.clone(),
                automaton,
                semantics,
            })
        })
        .collect();
    Ok(TranslationReport {
        formula: f.to_string(),
        states: nba.num_states(),
        lassos_checked: cases.len(),
        disagreements,
    })
}

/// Translates `f` and checks the automaton exhaustively, see [`verify_nba`].
pub fn verify_translation(f: &Formula, max_props: usize, max_len: usize) -> Result<TranslationReport, OracleError> {
    let nba = crate::ltl::translate_to_nba(f, &Default::default())?;
    verify_nba(f, &nba, max_props, max_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn e(i: usize, j: usize) -> LinkId {
        LinkId::new(i, j)
    }

    #[test]
    fn enumeration_counts() {
        let en = LassoEnumeration {
            alphabet: vec![BTreeSet::<usize>::new(), BTreeSet::from([1])],
            min_prefix: 0,
            max_prefix: 2,
            max_suffix: 2,
        };
        let all: Vec<_> = en.iter().collect();
        assert_eq!(all.len(), en.count());
        assert_eq!(all.len(), (1 + 2 + 4) * (2 + 4));
        let unique: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(unique.len(), all.len());
    }

    #[test]
    fn single_edge_short_bounds_toggles() {
        let g = Graph::with_order(2, [e(0, 1)]);
        let r = brute_force_optimal(&g, &CostFn::Jaccard, 1, 2, false).unwrap().unwrap();
        assert_eq!(r.cost, 2.0);
        assert_eq!(r.schedule.suffix, vec![BTreeSet::from([e(0, 1)]), BTreeSet::new()]);
        let r = brute_force_optimal(&g, &CostFn::Jaccard, 2, 4, false).unwrap().unwrap();
        assert_eq!(r.cost, 1.0);
    }

    #[test]
    fn p3_alternates() {
        let g = Graph::with_order(3, [e(0, 1), e(1, 2)]);
        let r = brute_force_optimal(&g, &CostFn::Jaccard, 2, 2, false).unwrap().unwrap();
        assert_eq!(r.cost, 3.0);
        assert_eq!(r.schedule.suffix.len(), 2);
        assert!(r.schedule.suffix.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn empty_net_is_trivial() {
        let r = brute_force_optimal(&Graph::with_order(2, []), &CostFn::Jaccard, 2, 4, false)
            .unwrap()
            .unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.schedule.suffix, vec![BTreeSet::new()]);
    }

    #[test]
    fn rejects_large_nets() {
        let g = Graph::with_order(6, (0..5).map(|k| e(k, k + 1)));
        assert!(matches!(
            brute_force_optimal(&g, &CostFn::Jaccard, 2, 4, false),
            Err(OracleError::TooManyEdges(5))
        ));
    }

    #[test]
    fn translation_sweeps() {
        for text in ["G F e_0_1", "G (e_0_1 -> true) & G F e_0_1"] {
            let r = verify_translation(&parse(text).unwrap(), 2, 3).unwrap();
            assert!(r.passed(), "{text}: {:?}", r.disagreements.first());
        }
    }

    #[test]
    fn corrupted_automaton_is_caught() {
        let f = parse("G F e_0_1").unwrap();
        let good = crate::ltl::translate_to_nba(&f, &Default::default()).unwrap();
        let bad = Nba::new(
            good.num_states(),
            good.initial().clone(),
            BTreeSet::new(),
            good.transitions().to_vec(),
        );
        let r = verify_nba(&f, &bad, 2, 3).unwrap();
        assert!(!r.passed());
    }
}
