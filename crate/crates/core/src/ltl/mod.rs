//! Linear temporal logic: syntax, semantics on lassos, the link-activation
//! specifications, and translation to Büchi automata.

mod eval;
mod nba;
mod parse;
mod translate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{link_neighborhood, Graph, LinkId, NetworkError};

pub use eval::{eval_lasso, Letter};
pub use nba::{nba_accepts_lasso, Label, Nba, NbaJson, NbaTransition};
pub use parse::{parse, parse_declared, ParseError};
pub use translate::{translate_to_nba, TranslateOptions};

#[derive(Debug, Error)]
pub enum LtlError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("link {0} has no interfering neighbor; the fairness disjunction would be empty")]
    EmptyFairnessNeighborhood(LinkId),
    #[error("automaton construction exceeded the limit of {limit} {what}")]
    ResourceLimit { what: &'static str, limit: usize },
}

/// Atomic proposition: a link is active (`e_i_j`) or a command node is active (`c_j`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomicProp {
    Link(LinkId),
    Node(usize),
}

impl AtomicProp {
    pub fn link(i: usize, j: usize) -> Self {
        AtomicProp::Link(LinkId::new(i, j))
    }
}

impl fmt::Display for AtomicProp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomicProp::Link(e) => write!(f, "e_{}_{}", e.i(), e.j()),
            AtomicProp::Node(j) => write!(f, "c_{j}"),
        }
    }
}

impl FromStr for AtomicProp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split('_').collect();
        let num = |t: &str| -> Result<usize, String> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("`{s}` is not a declared proposition"));
            }
            t.parse().map_err(|_| format!("index out of range in `{s}`"))
        };
        match parts.as_slice() {
            ["e", a, b] => {
                let (a, b) = (num(a)?, num(b)?);
                if a == b {
                    return Err(format!("`{s}` names a self loop"));
                }
                Ok(AtomicProp::link(a, b))
            }
            ["c", j] => Ok(AtomicProp::Node(num(j)?)),
            _ => Err(format!("`{s}` is not a declared proposition")),
        }
    }
}

impl Serialize for AtomicProp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AtomicProp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// LTL abstract syntax. `And`/`Or` always carry at least two children.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(AtomicProp),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Always(Box<Formula>),
    Eventually(Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn atom(p: AtomicProp) -> Self {
        Atom(p)
    }

    pub fn link(e: LinkId) -> Self {
        Atom(AtomicProp::Link(e))
    }

    pub fn node(j: usize) -> Self {
        Atom(AtomicProp::Node(j))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Not(Box::new(f))
    }

    pub fn next(f: Formula) -> Self {
        Next(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Always(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Self {
        Eventually(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Release(Box::new(a), Box::new(b))
    }

    /// `a ⇒ b`, kept as `¬a ∨ b`.
    pub fn implies(a: Formula, b: Formula) -> Self {
        Or(vec![Formula::not(a), b])
    }

    /// Conjunction; the empty conjunction is `true`.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut v: Vec<Formula> = items.into_iter().collect();
        match v.len() {
            0 => True,
            1 => v.pop().unwrap(),
            _ => And(v),
        }
    }

    /// Disjunction; the empty disjunction is `false`.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut v: Vec<Formula> = items.into_iter().collect();
        match v.len() {
            0 => False,
            1 => v.pop().unwrap(),
            _ => Or(v),
        }
    }

    /// Symbol count `|φ|`; an n-ary connective contributes n − 1 symbols.
    pub fn size(&self) -> usize {
        match self {
            True | False | Atom(_) => 1,
            Not(f) | Next(f) | Always(f) | Eventually(f) => 1 + f.size(),
            Until(a, b) | Release(a, b) => 1 + a.size() + b.size(),
            And(v) | Or(v) => v.len() - 1 + v.iter().map(Formula::size).sum::<usize>(),
        }
    }

    pub fn props(&self) -> BTreeSet<AtomicProp> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<AtomicProp>) {
        match self {
            True | False => {}
            Atom(p) => {
                out.insert(*p);
            }
            Not(f) | Next(f) | Always(f) | Eventually(f) => f.collect_props(out),
            Until(a, b) | Release(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
            And(v) | Or(v) => v.iter().for_each(|f| f.collect_props(out)),
        }
    }

    pub fn is_literal(&self) -> bool {
        match self {
            True | False | Atom(_) => true,
            Not(f) => matches!(**f, Atom(_)),
            _ => false,
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            True | False | Atom(_) => true,
            Not(f) => matches!(**f, Atom(_)),
            Next(f) | Always(f) | Eventually(f) => f.is_nnf(),
            Until(a, b) | Release(a, b) => a.is_nnf() && b.is_nnf(),
            And(v) | Or(v) => v.iter().all(Formula::is_nnf),
        }
    }

    /// Negation normal form: negations only on atoms.
    pub fn to_nnf(&self) -> Formula {
        self.nnf(false)
    }

    /// NNF of `¬self`.
    pub fn negated_nnf(&self) -> Formula {
        self.nnf(true)
    }

    fn nnf(&self, neg: bool) -> Formula {
        match (self, neg) {
            (True, false) | (False, true) => True,
            (True, true) | (False, false) => False,
            (Atom(p), false) => Atom(*p),
            (Atom(p), true) => Formula::not(Atom(*p)),
            (Not(f), n) => f.nnf(!n),
            (And(v), false) => And(v.iter().map(|f| f.nnf(false)).collect()),
            (And(v), true) => Or(v.iter().map(|f| f.nnf(true)).collect()),
            (Or(v), false) => Or(v.iter().map(|f| f.nnf(false)).collect()),
            (Or(v), true) => And(v.iter().map(|f| f.nnf(true)).collect()),
            (Next(f), n) => Formula::next(f.nnf(n)),
            (Until(a, b), false) => Formula::until(a.nnf(false), b.nnf(false)),
            (Until(a, b), true) => Formula::release(a.nnf(true), b.nnf(true)),
            (Release(a, b), false) => Formula::release(a.nnf(false), b.nnf(false)),
            (Release(a, b), true) => Formula::until(a.nnf(true), b.nnf(true)),
            (Always(f), false) => Formula::always(f.nnf(false)),
            (Always(f), true) => Formula::eventually(f.nnf(true)),
            (Eventually(f), false) => Formula::eventually(f.nnf(false)),
            (Eventually(f), true) => Formula::always(f.nnf(true)),
        }
    }

    /// Constant folding and idempotence only.
    pub fn simplify(&self) -> Formula {
        match self {
            True | False | Atom(_) => self.clone(),
            Not(f) => match f.simplify() {
                True => False,
                False => True,
                Not(g) => *g,
                g => Formula::not(g),
            },
            And(v) => {
                let mut kids: Vec<Formula> = Vec::new();
                for f in v {
                    match f.simplify() {
                        True => {}
                        False => return False,
                        g if kids.contains(&g) => {}
                        g => kids.push(g),
                    }
                }
                Formula::and_all(kids)
            }
            Or(v) => {
                let mut kids: Vec<Formula> = Vec::new();
                for f in v {
                    match f.simplify() {
                        False => {}
                        True => return True,
                        g if kids.contains(&g) => {}
                        g => kids.push(g),
                    }
                }
                Formula::or_all(kids)
            }
            Next(f) => match f.simplify() {
                c @ (True | False) => c,
                g => Formula::next(g),
            },
            Always(f) => match f.simplify() {
                c @ (True | False) => c,
                g => Formula::always(g),
            },
            Eventually(f) => match f.simplify() {
                c @ (True | False) => c,
                g => Formula::eventually(g),
            },
            Until(a, b) => match (a.simplify(), b.simplify()) {
                (_, True) => True,
                (False, b) => b,
                (True, b) => Formula::eventually(b),
                (a, b) if a == b => a,
                (a, b) => Formula::until(a, b),
            },
            Release(a, b) => match (a.simplify(), b.simplify()) {
                (_, False) => False,
                (True, b) => b,
                (False, b) => Formula::always(b),
                (a, b) if a == b => a,
                (a, b) => Formula::release(a, b),
            },
        }
    }

    /// Top-level conjuncts, with nested conjunctions flattened.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            And(v) => v.iter().flat_map(Formula::conjuncts).collect(),
            True => Vec::new(),
            f => vec![f],
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom(p) => write!(f, "{p}"),
            Not(g) => write!(f, "!{g}"),
            Next(g) => write!(f, "X {g}"),
            Always(g) => write!(f, "G {g}"),
            Eventually(g) => write!(f, "F {g}"),
            Until(a, b) => write!(f, "({a} U {b})"),
            Release(a, b) => write!(f, "({a} R {b})"),
            And(v) | Or(v) => {
                let op = if matches!(self, And(_)) { " & " } else { " | " };
                write!(f, "(")?;
                for (k, g) in v.iter().enumerate() {
                    if k > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Local non-interference plus liveness for one link:
/// `G(π_e ⇒ ⋀ ¬π_e') ∧ G F π_e` over the other links sharing an endpoint.
pub fn build_phi_ij(g: &Graph, e: LinkId) -> Result<Formula, NetworkError> {
    let hood = link_neighborhood(g, e)?;
    let quiet = Formula::and_all(
        hood.into_iter()
            .filter(|&f| f != e)
            .map(|f| Formula::not(Formula::link(f))),
    );
    Ok(And(vec![
        Formula::always(Formula::implies(Formula::link(e), quiet)),
        Formula::always(Formula::eventually(Formula::link(e))),
    ]))
}

/// Conjunction of [`build_phi_ij`] over every link; `true` without links.
pub fn build_phi(g: &Graph) -> Formula {
    Formula::and_all(
        g.edges
            .iter()
            .map(|&e| build_phi_ij(g, e).expect("edge taken from the graph")),
    )
}

/// Liveness only: every link active infinitely often.
pub fn build_liveness(g: &Graph) -> Formula {
    Formula::and_all(
        g.edges
            .iter()
            .map(|&e| Formula::always(Formula::eventually(Formula::link(e)))),
    )
}

/// Command activation spec: each command node infinitely often, never
/// together with a command-graph neighbor.
pub fn build_psi(g_cmd: &Graph) -> Formula {
    Formula::and_all(g_cmd.nodes.iter().map(|&j| {
        let quiet = Formula::and_all(
            g_cmd
                .neighbors(j)
                .into_iter()
                .map(|k| Formula::not(Formula::node(k))),
        );
        And(vec![
            Formula::always(Formula::implies(Formula::node(j), quiet)),
            Formula::always(Formula::eventually(Formula::node(j))),
        ])
    }))
}

fn fairness_parts(g: &Graph, e: LinkId) -> Result<(Formula, Formula), LtlError> {
    let others: Vec<LinkId> = link_neighborhood(g, e)?
        .into_iter()
        .filter(|&f| f != e)
        .collect();
    if others.is_empty() {
        return Err(LtlError::EmptyFairnessNeighborhood(e));
    }
    Ok((
        Formula::link(e),
        Formula::or_all(others.into_iter().map(Formula::link)),
    ))
}

/// Fairness for link `e`: after each activation, `e` stays off until some
/// interfering neighbor has been active, `G(π_e ⇒ X(¬π_e U ⋁ π_e'))`.
pub fn build_fairness(g: &Graph, e: LinkId) -> Result<Formula, LtlError> {
    let (a, others) = fairness_parts(g, e)?;
    Ok(Formula::always(Formula::implies(
        a.clone(),
        Formula::next(Formula::until(Formula::not(a), others)),
    )))
}

/// The fairness formula without the next-step shift,
/// `G(π_e ⇒ G(¬π_e U ⋁ π_e'))`. Together with local non-interference it
/// forbids `e` from ever activating, so it is only useful as a test corpus.
pub fn build_fairness_literal(g: &Graph, e: LinkId) -> Result<Formula, LtlError> {
    let (a, others) = fairness_parts(g, e)?;
    Ok(Formula::always(Formula::implies(
        a.clone(),
        Formula::always(Formula::until(Formula::not(a), others)),
    )))
}

/// One step of the semantic Laplacian: node `i` takes the conjunction of the
/// formulas on its closed neighborhood. Conjuncts are flattened, sorted and
/// deduplicated so that equal sets of conjuncts give equal formulas.
pub fn semantic_laplacian_step(
    g: &Graph,
    assignment: &BTreeMap<usize, Formula>,
) -> BTreeMap<usize, Formula> {
    let adj = g.adjacency();
    assignment
        .keys()
        .map(|&i| {
            let mut parts: BTreeSet<Formula> = BTreeSet::new();
            let closed = std::iter::once(i).chain(adj.get(&i).into_iter().flatten().copied());
            for j in closed {
                if let Some(f) = assignment.get(&j) {
                    parts.extend(f.conjuncts().into_iter().cloned());
                }
            }
            (i, Formula::and_all(parts))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, j: usize) -> LinkId {
        LinkId::new(i, j)
    }

    fn count_negated_atoms(f: &Formula) -> usize {
        match f {
            Not(g) if matches!(**g, Atom(_)) => 1,
            True | False | Atom(_) => 0,
            Not(g) | Next(g) | Always(g) | Eventually(g) => count_negated_atoms(g),
            Until(a, b) | Release(a, b) => count_negated_atoms(a) + count_negated_atoms(b),
            And(v) | Or(v) => v.iter().map(count_negated_atoms).sum(),
        }
    }

    fn safety_part(f: &Formula) -> &Formula {
        match f {
            And(v) => match &v[0] {
                Always(inner) => match &**inner {
                    Or(w) => &w[1],
                    _ => panic!("unexpected shape"),
                },
                _ => panic!("unexpected shape"),
            },
            _ => panic!("unexpected shape"),
        }
    }

    #[test]
    fn prop_names() {
        assert_eq!(AtomicProp::link(3, 1).to_string(), "e_1_3");
        assert_eq!("e_4_2".parse::<AtomicProp>().unwrap(), AtomicProp::link(2, 4));
        assert_eq!("c_7".parse::<AtomicProp>().unwrap(), AtomicProp::Node(7));
        assert!("p".parse::<AtomicProp>().is_err());
        assert!("e_1_1".parse::<AtomicProp>().is_err());
        assert!("e_1_x".parse::<AtomicProp>().is_err());
    }

    #[test]
    fn nnf_dualities() {
        let p = Formula::link(e(0, 1));
        let q = Formula::link(e(1, 2));
        assert_eq!(
            Formula::not(Formula::always(p.clone())).to_nnf(),
            Formula::eventually(Formula::not(p.clone()))
        );
        assert_eq!(
            Formula::not(Formula::until(p.clone(), q.clone())).to_nnf(),
            Formula::release(Formula::not(p.clone()), Formula::not(q.clone()))
        );
        assert_eq!(Formula::not(Formula::not(p.clone())).to_nnf(), p);
        assert!(Formula::not(Formula::and_all([p.clone(), Formula::next(q)])).to_nnf().is_nnf());
    }

    #[test]
    fn phi_isolated_edge() {
        let g = Graph::with_order(2, [e(0, 1)]);
        let f = build_phi_ij(&g, e(0, 1)).unwrap();
        assert_eq!(safety_part(&f), &True);
        assert_eq!(build_phi(&g), f);
        assert!(build_phi_ij(&g, e(0, 2)).is_err());
    }

    #[test]
    fn phi_negation_counts() {
        let p4 = Graph::with_order(4, [e(0, 1), e(1, 2), e(2, 3)]);
        assert_eq!(count_negated_atoms(safety_part(&build_phi_ij(&p4, e(1, 2)).unwrap())), 2);
        let k3 = Graph::with_order(3, [e(0, 1), e(1, 2), e(0, 2)]);
        assert_eq!(count_negated_atoms(safety_part(&build_phi_ij(&k3, e(0, 1)).unwrap())), 2);
    }

    #[test]
    fn empty_graph_phi_is_true() {
        assert_eq!(build_phi(&Graph::default()), True);
        assert_eq!(build_psi(&Graph::default()), True);
    }

    #[test]
    fn psi_star() {
        let star = Graph::with_order(3, [e(0, 1), e(0, 2)]);
        let psi = build_psi(&star);
        let And(parts) = psi else { panic!() };
        let negs: Vec<usize> = parts.iter().map(|p| count_negated_atoms(safety_part(p))).collect();
        assert_eq!(negs, vec![2, 1, 1]);
    }

    #[test]
    fn fairness_needs_neighbors() {
        let iso = Graph::with_order(2, [e(0, 1)]);
        assert!(matches!(
            build_fairness(&iso, e(0, 1)),
            Err(LtlError::EmptyFairnessNeighborhood(_))
        ));
    }

    #[test]
    fn size_counts_symbols() {
        let p = Formula::link(e(0, 1));
        let q = Formula::link(e(1, 2));
        assert_eq!(Formula::always(Formula::implies(p.clone(), Formula::next(q))).size(), 6);
        assert_eq!(Formula::and_all([p.clone(), p.clone(), p]).size(), 5);
    }

    #[test]
    fn simplify_folds() {
        let p = Formula::link(e(0, 1));
        assert_eq!(Formula::and_all([True, p.clone(), p.clone()]).simplify(), p);
        assert_eq!(Formula::or_all([False, True]).simplify(), True);
        assert_eq!(Formula::always(Formula::implies(p.clone(), True)).simplify(), True);
        assert_eq!(Formula::not(Formula::not(p.clone())).simplify(), p);
    }

    #[test]
    fn laplacian_examples() {
        let p = Formula::link(e(0, 1));
        let q = Formula::link(e(1, 2));
        let iso = Graph::with_order(1, []);
        let a = BTreeMap::from([(0, p.clone())]);
        assert_eq!(semantic_laplacian_step(&iso, &a), a);

        let edge = Graph::with_order(2, [e(0, 1)]);
        let a = BTreeMap::from([(0, p.clone()), (1, q.clone())]);
        let b = semantic_laplacian_step(&edge, &a);
        assert_eq!(b[&0], And(vec![p.clone(), q.clone()]));
        assert_eq!(b[&0], b[&1]);

        let p3 = Graph::with_order(3, [e(0, 1), e(1, 2)]);
        let r = Formula::node(0);
        let mut a = BTreeMap::from([(0, p), (1, q), (2, r)]);
        a = semantic_laplacian_step(&p3, &a);
        assert_ne!(a[&0], a[&2]);
        a = semantic_laplacian_step(&p3, &a);
        assert!(a.values().all(|f| f == &a[&0]));
    }
}
