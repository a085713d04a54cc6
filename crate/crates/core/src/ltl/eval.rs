use std::collections::BTreeSet;

use super::{AtomicProp, Formula};

/// One letter of a word: the propositions that hold at that instant.
pub type Letter = BTreeSet<AtomicProp>;

/// Truth of `f` at position 0 of `prefix · suffix^ω`.
///
/// The word has `|prefix| + |suffix|` distinct positions; temporal operators
/// are evaluated as least (`U`, `F`) or greatest (`R`, `G`) fixpoints over
/// them. Panics when `suffix` is empty.
pub fn eval_lasso(f: &Formula, prefix: &[Letter], suffix: &[Letter]) -> bool {
    assert!(!suffix.is_empty(), "lasso suffix must be nonempty");
    let word: Vec<&Letter> = prefix.iter().chain(suffix).collect();
    let ctx = Lasso {
        word,
        loop_start: prefix.len(),
    };
    ctx.eval(f)[0]
}

struct Lasso<'a> {
    word: Vec<&'a Letter>,
    loop_start: usize,
}

impl Lasso<'_> {
    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.word.len() {
            i + 1
        } else {
            self.loop_start
        }
    }

    fn fixpoint(&self, init: bool, step: impl Fn(usize, &[bool]) -> bool) -> Vec<bool> {
        let n = self.word.len();
        let mut v = vec![init; n];
        loop {
            let mut changed = false;
            for i in (0..n).rev() {
                let x = step(i, &v);
                if x != v[i] {
                    v[i] = x;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }

    fn eval(&self, f: &Formula) -> Vec<bool> {
        let n = self.word.len();
        match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(p) => self.word.iter().map(|l| l.contains(p)).collect(),
            Formula::Not(g) => self.eval(g).into_iter().map(|b| !b).collect(),
            Formula::And(v) => v.iter().fold(vec![true; n], |acc, g| {
                acc.iter().zip(self.eval(g)).map(|(a, b)| *a && b).collect()
            }),
            Formula::Or(v) => v.iter().fold(vec![false; n], |acc, g| {
                acc.iter().zip(self.eval(g)).map(|(a, b)| *a || b).collect()
            }),
            Formula::Next(g) => {
                let inner = self.eval(g);
                (0..n).map(|i| inner[self.succ(i)]).collect()
            }
            Formula::Until(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                self.fixpoint(false, |i, v| b[i] || (a[i] && v[self.succ(i)]))
            }
            Formula::Release(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                self.fixpoint(true, |i, v| b[i] && (a[i] || v[self.succ(i)]))
            }
            Formula::Always(g) => {
                let g = self.eval(g);
                self.fixpoint(true, |i, v| g[i] && v[self.succ(i)])
            }
            Formula::Eventually(g) => {
                let g = self.eval(g);
                self.fixpoint(false, |i, v| g[i] || v[self.succ(i)])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn letter(props: &[&str]) -> Letter {
        props.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn basic_examples() {
        let f = parse("F e_0_1").unwrap();
        assert!(eval_lasso(&f, &[letter(&[])], &[letter(&["e_0_1"]), letter(&[])]));
        let gf = parse("G F e_0_1").unwrap();
        assert!(!eval_lasso(&gf, &[], &[letter(&[]), letter(&[])]));
        assert!(eval_lasso(&gf, &[letter(&[])], &[letter(&[]), letter(&["e_0_1"])]));
        let g = parse("G e_0_1").unwrap();
        assert!(eval_lasso(&g, &[], &[letter(&["e_0_1"])]));
        assert!(!eval_lasso(&g, &[letter(&["e_0_1"])], &[letter(&[])]));
    }

    #[test]
    fn until_and_release() {
        let u = parse("e_0_1 U e_1_2").unwrap();
        let a = letter(&["e_0_1"]);
        let b = letter(&["e_1_2"]);
        assert!(eval_lasso(&u, &[a.clone(), a.clone()], std::slice::from_ref(&b)));
        assert!(!eval_lasso(&u, &[], std::slice::from_ref(&a)));
        let r = parse("e_0_1 R e_1_2").unwrap();
        assert!(eval_lasso(&r, &[], std::slice::from_ref(&b)));
        assert!(!eval_lasso(&r, std::slice::from_ref(&b), std::slice::from_ref(&a)));
        assert!(eval_lasso(&r, &[b.clone(), letter(&["e_0_1", "e_1_2"])], &[a]));
    }

    #[test]
    fn next_wraps_into_loop() {
        let f = parse("X X X e_0_1").unwrap();
        // positions: 0 (prefix), 1, 2 (loop); X^3 from 0 lands on 1
        assert!(eval_lasso(&f, &[letter(&[])], &[letter(&["e_0_1"]), letter(&[])]));
        assert!(!eval_lasso(&f, &[letter(&[])], &[letter(&[]), letter(&["e_0_1"])]));
    }
}
