use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{AtomicProp, Letter};
use crate::network::{Graph, LinkId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("lasso suffix is empty")]
    EmptySuffix,
    #[error("suffix does not close on the last prefix element")]
    OpenLoop,
}

/// Ultimately periodic sequence `prefix · suffix^ω` of item sets.
///
/// When the prefix is nonempty its last element equals the last suffix
/// element, so the loop returns to the state where it was entered.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Ord", deserialize = "T: Deserialize<'de> + Ord"))]
pub struct Lasso<T> {
    pub prefix: Vec<BTreeSet<T>>,
    pub suffix: Vec<BTreeSet<T>>,
}

/// Link activation schedule.
pub type Schedule = Lasso<LinkId>;

/// A lasso together with its cost, the on-disk schedule layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Ord", deserialize = "T: Deserialize<'de> + Ord"))]
pub struct CostedLasso<T> {
    #[serde(flatten)]
    pub lasso: Lasso<T>,
    pub cost: f64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl<T: Ord + Clone> Lasso<T> {
    pub fn new(prefix: Vec<BTreeSet<T>>, suffix: Vec<BTreeSet<T>>) -> Result<Self, ScheduleError> {
        if suffix.is_empty() {
            return Err(ScheduleError::EmptySuffix);
        }
        if let Some(last) = prefix.last() {
            if last != suffix.last().unwrap() {
                return Err(ScheduleError::OpenLoop);
            }
        }
        Ok(Lasso { prefix, suffix })
    }

    /// Builds the closed form of the word `stem · cycle^ω` (any stem, any
    /// nonempty cycle).
    pub fn from_word(stem: &[BTreeSet<T>], cycle: &[BTreeSet<T>]) -> Result<Self, ScheduleError> {
        if cycle.is_empty() {
            return Err(ScheduleError::EmptySuffix);
        }
        let (stem, cycle) = minimize(stem.to_vec(), cycle.to_vec());
        let mut prefix = stem;
        prefix.push(cycle[0].clone());
        let mut suffix = cycle;
        suffix.rotate_left(1);
        Ok(Lasso { prefix, suffix })
    }

    pub fn period(&self) -> usize {
        self.suffix.len()
    }

    /// Element of the infinite word at time `t`.
    pub fn at(&self, t: usize) -> &BTreeSet<T> {
        if t < self.prefix.len() {
            &self.prefix[t]
        } else {
            &self.suffix[(t - self.prefix.len()) % self.suffix.len()]
        }
    }

    /// Same word with the shortest prefix and a primitive period, in closed
    /// form.
    pub fn normalize(&self) -> Self {
        Lasso::from_word(&self.prefix, &self.suffix).expect("suffix is nonempty")
    }

    /// Pointwise union of two words.
    pub fn union(&self, other: &Self) -> Self {
        let k = self.prefix.len().max(other.prefix.len());
        let (a, b) = (self.period(), other.period());
        let l = a / gcd(a, b) * b;
        let word = |t: usize| -> BTreeSet<T> { self.at(t).union(other.at(t)).cloned().collect() };
        let stem: Vec<_> = (0..k).map(word).collect();
        let cycle: Vec<_> = (k..k + l).map(word).collect();
        Lasso::from_word(&stem, &cycle).expect("period is nonempty")
    }

    pub fn items(&self) -> BTreeSet<T> {
        self.prefix
            .iter()
            .chain(&self.suffix)
            .flat_map(|s| s.iter().cloned())
            .collect()
    }

    pub fn suffix_items(&self) -> BTreeSet<T> {
        self.suffix.iter().flat_map(|s| s.iter().cloned()).collect()
    }

    pub fn map<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> Lasso<U> {
        let conv = |v: &Vec<BTreeSet<T>>| v.iter().map(|s| s.iter().map(&f).collect()).collect();
        Lasso {
            prefix: conv(&self.prefix),
            suffix: conv(&self.suffix),
        }
    }
}

/// Shortest stem and primitive cycle for `stem · cycle^ω`.
fn minimize<T: Ord + Clone>(
    mut stem: Vec<BTreeSet<T>>,
    mut cycle: Vec<BTreeSet<T>>,
) -> (Vec<BTreeSet<T>>, Vec<BTreeSet<T>>) {
    let n = cycle.len();
    if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (0..n).all(|i| cycle[i] == cycle[(i + d) % n])) {
        cycle.truncate(d);
    }
    while let Some(last) = stem.last() {
        if last != cycle.last().unwrap() {
            break;
        }
        stem.pop();
        cycle.rotate_right(1);
    }
    (stem, cycle)
}

impl Lasso<LinkId> {
    /// Observation word over link propositions.
    pub fn letters(&self) -> (Vec<Letter>, Vec<Letter>) {
        let conv = |v: &Vec<BTreeSet<LinkId>>| -> Vec<Letter> {
            v.iter()
                .map(|s| s.iter().map(|&e| AtomicProp::Link(e)).collect())
                .collect()
        };
        (conv(&self.prefix), conv(&self.suffix))
    }
}

impl Lasso<usize> {
    /// Observation word over command-node propositions.
    pub fn node_letters(&self) -> (Vec<Letter>, Vec<Letter>) {
        let conv = |v: &Vec<BTreeSet<usize>>| -> Vec<Letter> {
            v.iter()
                .map(|s| s.iter().map(|&j| AtomicProp::Node(j)).collect())
                .collect()
        };
        (conv(&self.prefix), conv(&self.suffix))
    }
}

/// One link at a time: prefix `[∅, {e_m}]`, suffix `[{e_1}, …, {e_m}]`.
/// Without links: prefix `[∅]`, suffix `[∅]`.
pub fn sequential_schedule(g: &Graph) -> Schedule {
    let edges: Vec<LinkId> = g.edges.iter().copied().collect();
    match edges.last() {
        None => Lasso {
            prefix: vec![BTreeSet::new()],
            suffix: vec![BTreeSet::new()],
        },
        Some(&last) => Lasso {
            prefix: vec![BTreeSet::new(), BTreeSet::from([last])],
            suffix: edges.iter().map(|&e| BTreeSet::from([e])).collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn closed_form_is_enforced() {
        assert_eq!(Lasso::<usize>::new(vec![], vec![]), Err(ScheduleError::EmptySuffix));
        assert_eq!(
            Lasso::new(vec![s(&[]), s(&[1])], vec![s(&[2])]),
            Err(ScheduleError::OpenLoop)
        );
        assert!(Lasso::new(vec![], vec![s(&[2])]).is_ok());
    }

    #[test]
    fn normalize_examples() {
        // ∅ {a} {a} ... → prefix [∅,{a}] suffix [{a}]
        let l = Lasso::from_word(&[s(&[])], &[s(&[1]), s(&[1])]).unwrap();
        assert_eq!(l.prefix, vec![s(&[]), s(&[1])]);
        assert_eq!(l.suffix, vec![s(&[1])]);
        // ∅ {a} ∅ {a} ... → prefix [∅], suffix [{a}, ∅]
        let l = Lasso::from_word(&[s(&[]), s(&[1])], &[s(&[]), s(&[1])]).unwrap();
        assert_eq!(l.prefix, vec![s(&[])]);
        assert_eq!(l.suffix, vec![s(&[1]), s(&[])]);
    }

    #[test]
    fn union_uses_lcm_period() {
        let a = Lasso::from_word(&[], &[s(&[1]), s(&[])]).unwrap();
        let b = Lasso::from_word(&[], &[s(&[2]), s(&[]), s(&[])]).unwrap();
        let u = a.union(&b);
        for t in 0..30 {
            let want: BTreeSet<usize> = a.at(t).union(b.at(t)).copied().collect();
            assert_eq!(u.at(t), &want, "t={t}");
        }
        assert_eq!(u.period(), 6);
    }

    #[test]
    fn sequential_shape() {
        let g = Graph::with_order(3, [LinkId::new(0, 1), LinkId::new(1, 2)]);
        let seq = sequential_schedule(&g);
        assert_eq!(seq.prefix.len(), 2);
        assert_eq!(seq.suffix.len(), 2);
        assert_eq!(seq.prefix.last(), seq.suffix.last());
        let empty = sequential_schedule(&Graph::default());
        assert_eq!(empty.suffix, vec![BTreeSet::new()]);
    }

    #[test]
    fn json_layout() {
        let l = Lasso::new(
            vec![BTreeSet::new(), BTreeSet::from([LinkId::new(0, 1)])],
            vec![BTreeSet::from([LinkId::new(0, 1)])],
        )
        .unwrap();
        let text = serde_json::to_string(&CostedLasso { lasso: l.clone(), cost: 1.0 }).unwrap();
        assert_eq!(text, r#"{"prefix":[[],[[0,1]]],"suffix":[[[0,1]]],"cost":1.0}"#);
        let back: CostedLasso<LinkId> = serde_json::from_str(&text).unwrap();
        assert_eq!(back.lasso, l);
    }
}
