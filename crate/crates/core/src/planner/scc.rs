/// Strongly connected components of a digraph on `0..n`.
///
/// Components are numbered in the order Tarjan's algorithm completes them,
/// which is a reverse topological order of the condensation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    component: Vec<usize>,
    members: Vec<Vec<usize>>,
    nontrivial: Vec<bool>,
}

impl SccDecomposition {
    pub fn component_of(&self, v: usize) -> usize {
        self.component[v]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    /// A component is nontrivial when it contains a cycle: more than one
    /// vertex, or a single vertex with a self-loop.
    pub fn is_nontrivial(&self, c: usize) -> bool {
        self.nontrivial[c]
    }

    pub fn num_nontrivial(&self) -> usize {
        self.nontrivial.iter().filter(|&&b| b).count()
    }
}

/// Iterative Tarjan. Roots are tried in increasing vertex order and
/// successors in the order `succ` yields them.
pub fn scc_decompose<I, F>(n: usize, succ: F) -> SccDecomposition
where
    F: Fn(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component = vec![UNSEEN; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut nontrivial = Vec::new();
    let mut self_loop = vec![false; n];
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        let open = |v: usize,
                    index: &mut Vec<usize>,
                    low: &mut Vec<usize>,
                    counter: &mut usize,
                    stack: &mut Vec<usize>,
                    on_stack: &mut Vec<bool>,
                    self_loop: &mut Vec<bool>| {
            index[v] = *counter;
            low[v] = *counter;
            *counter += 1;
            stack.push(v);
            on_stack[v] = true;
            let next: Vec<usize> = succ(v).into_iter().collect();
            if next.contains(&v) {
                self_loop[v] = true;
            }
            (v, next, 0)
        };
        call.push(open(
            root,
            &mut index,
            &mut low,
            &mut counter,
            &mut stack,
            &mut on_stack,
            &mut self_loop,
        ));
        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if index[w] == UNSEEN {
                    let f = open(
                        w,
                        &mut index,
                        &mut low,
                        &mut counter,
                        &mut stack,
                        &mut on_stack,
                        &mut self_loop,
                    );
                    call.push(f);
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(parent) = call.last() {
                let p = parent.0;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                let c = members.len();
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component[w] = c;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                nontrivial.push(comp.len() > 1 || self_loop[v]);
                members.push(comp);
            }
        }
    }
    SccDecomposition {
        component,
        members,
        nontrivial,
    }
}
