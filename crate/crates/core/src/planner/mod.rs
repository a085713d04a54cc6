//! Optimal schedule synthesis on the product of the transition system and
//! the specification automaton.

mod lasso;
mod pba;
mod scc;
mod specialized;

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{
    build_fairness, build_liveness, build_phi, build_psi, eval_lasso, translate_to_nba, Formula,
    LtlError, TranslateOptions,
};
use crate::network::{link_neighborhood, Graph, LinkId};
use crate::ts::{
    build_command_ts, build_product_ts, jaccard_mask, CostFn, Lasso, Policy, ProductTs, Schedule,
    TsError,
};

pub use lasso::{find_optimal_lasso, LassoPlan, COST_TOLERANCE};
pub use pba::{build_pba, Pba};
pub use scc::{scc_decompose, SccDecomposition};
pub use specialized::{plan_covering_lasso, TsLasso};

/// Default cap on product automaton states.
pub const DEFAULT_PBA_BUDGET: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Ts(#[from] TsError),
    #[error(transparent)]
    Ltl(#[from] LtlError),
    #[error("no accepting lasso exists: the specification is infeasible on this system")]
    Infeasible,
    #[error("{what} exceed the budget of {limit}")]
    BudgetExceeded { what: &'static str, limit: usize },
    #[error("invalid planner configuration: {0}")]
    Config(String),
    #[error("planner output failed verification: {0}")]
    Verification(String),
}

impl PlanError {
    /// Whether the failure is a resource limit rather than a verdict.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            PlanError::BudgetExceeded { .. }
                | PlanError::Ts(TsError::BudgetExceeded(_))
                | PlanError::Ltl(LtlError::ResourceLimit { .. })
        )
    }
}

/// Which formula the automaton is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecMode {
    /// The full specification, safety and liveness.
    Full,
    /// Liveness only; safety is enforced by the non-interfering state space.
    LivenessOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanOptions {
    pub policy: Policy,
    pub spec: SpecMode,
    /// Conjoin the per-link fairness formulas.
    pub fairness: bool,
    pub ts_budget: usize,
    pub pba_budget: usize,
    pub translate: TranslateOptions,
    pub parallel: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            policy: Policy::NonInterfering,
            spec: SpecMode::LivenessOnly,
            fairness: false,
            ts_budget: 1 << 20,
            pba_budget: DEFAULT_PBA_BUDGET,
            translate: TranslateOptions::default(),
            parallel: false,
        }
    }
}

impl PlanOptions {
    /// Complete transition system with the full formula.
    pub fn faithful() -> Self {
        PlanOptions {
            policy: Policy::Complete,
            spec: SpecMode::Full,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanningReport {
    pub pba_states: usize,
    pub accepting: usize,
    pub sccs: usize,
    pub cost: f64,
    pub wallclock_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanOutcome<T> {
    pub schedule: Lasso<T>,
    pub cost: f64,
    pub report: PlanningReport,
}

/// Searches `ts ⊗ B_f` for a minimum-cost accepting lasso and projects it to
/// TS states.
pub fn plan_on_ts(
    ts: &ProductTs,
    f: &Formula,
    cost: &(dyn Fn(u64, u64) -> f64 + Sync),
    opts: &PlanOptions,
) -> Result<(TsLasso, PlanningReport), PlanError> {
    let start = Instant::now();
    let nba = translate_to_nba(f, &opts.translate)?;
    let pba = build_pba(ts, &nba, opts.pba_budget)?;
    let scc = scc_decompose(pba.len(), |v| {
        pba.successors(v).iter().map(|&w| w as usize).collect::<Vec<_>>()
    });
    let c = |a: usize, b: usize| cost(ts.state(a), ts.state(b));
    let plan = lasso::find_optimal_lasso_with(&pba, &scc, &c, opts.parallel)?;
    let project = |v: &[usize]| v.iter().map(|&x| pba.ts_state(x)).collect::<Vec<_>>();
    let lasso = TsLasso {
        prefix: project(&plan.prefix),
        suffix: project(&plan.cycle),
        cost: plan.cost,
    };
    let report = PlanningReport {
        pba_states: pba.len(),
        accepting: pba.num_accepting(),
        sccs: scc.len(),
        cost: plan.cost,
        wallclock_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((lasso, report))
}

fn to_lasso<T: Ord + Clone>(l: &TsLasso, f: impl Fn(u64) -> BTreeSet<T>, ts: &ProductTs) -> Lasso<T> {
    let conv = |v: &[usize]| v.iter().map(|&q| f(ts.state(q))).collect::<Vec<_>>();
    Lasso::new(conv(&l.prefix), conv(&l.suffix)).expect("planner lassos close on the loop state")
}

fn link_formula(g: &Graph, opts: &PlanOptions) -> Result<Formula, PlanError> {
    let base = match (opts.spec, opts.policy) {
        (SpecMode::Full, _) => build_phi(g),
        (SpecMode::LivenessOnly, Policy::NonInterfering) => build_liveness(g),
        (SpecMode::LivenessOnly, Policy::Complete) => {
            return Err(PlanError::Config(
                "liveness-only planning needs the non-interfering policy".into(),
            ))
        }
    };
    if !opts.fairness {
        return Ok(base);
    }
    let mut parts = vec![base];
    for &e in &g.edges {
        parts.push(build_fairness(g, e)?);
    }
    Ok(Formula::and_all(parts))
}

/// The full specification a link schedule must satisfy under `opts`.
pub fn link_spec(g: &Graph, fairness: bool) -> Result<Formula, PlanError> {
    link_formula(
        g,
        &PlanOptions {
            spec: SpecMode::Full,
            fairness,
            ..Default::default()
        },
    )
}

/// Optimal link schedule for `g` through automaton translation and product
/// search. The result is checked against the full specification.
pub fn plan_centralized(g: &Graph, cost: &CostFn, opts: &PlanOptions) -> Result<PlanOutcome<LinkId>, PlanError> {
    let ts = build_product_ts(g, opts.policy, opts.ts_budget)?;
    let f = link_formula(g, opts)?;
    let mc = cost.bind(&ts);
    let (l, report) = plan_on_ts(&ts, &f, &|a, b| mc.eval(a, b), opts)?;
    let schedule = to_lasso(&l, |m| ts.links_of(m), &ts);
    verify_links(g, &schedule, opts.fairness)?;
    Ok(PlanOutcome {
        schedule,
        cost: l.cost,
        report,
    })
}

/// Optimal link schedule found by a covering-cycle search on the
/// non-interfering system, without automata.
pub fn plan_specialized_lnc(g: &Graph, cost: &CostFn, budget: usize) -> Result<PlanOutcome<LinkId>, PlanError> {
    let start = Instant::now();
    let ts = build_product_ts(g, Policy::NonInterfering, budget)?;
    let mc = cost.bind(&ts);
    let l = plan_covering_lasso(&ts, &|a, b| mc.eval(a, b), budget)?;
    let schedule = to_lasso(&l, |m| ts.links_of(m), &ts);
    verify_links(g, &schedule, false)?;
    Ok(PlanOutcome {
        schedule,
        cost: l.cost,
        report: PlanningReport {
            pba_states: ts.num_states(),
            accepting: 0,
            sccs: 0,
            cost: l.cost,
            wallclock_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    })
}

/// Which search plans command activations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    #[default]
    Centralized,
    Specialized,
}

/// Optimal command-node schedule for the activation spec of `g_cmd`,
/// priced by Jaccard distance between active node sets.
pub fn plan_commands(
    g_cmd: &Graph,
    kind: PlannerKind,
    opts: &PlanOptions,
) -> Result<PlanOutcome<usize>, PlanError> {
    let start = Instant::now();
    let (ts, l, report) = match kind {
        PlannerKind::Centralized => {
            let ts = build_command_ts(g_cmd, opts.policy, opts.ts_budget)?;
            let f = match (opts.spec, opts.policy) {
                (SpecMode::LivenessOnly, Policy::NonInterfering) => Formula::and_all(
                    g_cmd
                        .nodes
                        .iter()
                        .map(|&j| Formula::always(Formula::eventually(Formula::node(j)))),
                ),
                (SpecMode::LivenessOnly, Policy::Complete) => {
                    return Err(PlanError::Config(
                        "liveness-only planning needs the non-interfering policy".into(),
                    ))
                }
                (SpecMode::Full, _) => build_psi(g_cmd),
            };
            let (l, report) = plan_on_ts(&ts, &f, &jaccard_mask, opts)?;
            (ts, l, report)
        }
        PlannerKind::Specialized => {
            let ts = build_command_ts(g_cmd, Policy::NonInterfering, opts.ts_budget)?;
            let l = plan_covering_lasso(&ts, &jaccard_mask, opts.pba_budget)?;
            let report = PlanningReport {
                pba_states: ts.num_states(),
                accepting: 0,
                sccs: 0,
                cost: l.cost,
                wallclock_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            (ts, l, report)
        }
    };
    let schedule = to_lasso(&l, |m| ts.nodes_of(m), &ts);
    let (p, s) = schedule.node_letters();
    if !eval_lasso(&build_psi(g_cmd), &p, &s) {
        return Err(PlanError::Verification(
            "command schedule violates the activation spec".into(),
        ));
    }
    Ok(PlanOutcome {
        schedule,
        cost: l.cost,
        report,
    })
}

fn verify_links(g: &Graph, s: &Schedule, fairness: bool) -> Result<(), PlanError> {
    audit_schedule(g, s).map_err(|e| PlanError::Verification(e.to_string()))?;
    let f = link_spec(g, fairness)?;
    let (p, q) = s.letters();
    if !eval_lasso(&f, &p, &q) {
        return Err(PlanError::Verification("schedule violates the specification".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("schedule does not start with every link inactive")]
    ActiveStart,
    #[error("time {t}: link {e} is not in the network")]
    UnknownLink { t: usize, e: LinkId },
    #[error("time {t}: links {a} and {b} interfere")]
    Interference { t: usize, a: LinkId, b: LinkId },
    #[error("links never activated in the periodic part: {0:?}")]
    Uncovered(Vec<LinkId>),
    #[error("suffix does not close on the last prefix element")]
    OpenLoop,
    #[error("suffix is empty")]
    EmptySuffix,
}

/// Trace-level checks: starts inactive, only known links, no two
/// interfering links at once, every link in the periodic part.
pub fn audit_schedule(g: &Graph, s: &Schedule) -> Result<(), AuditError> {
    if s.suffix.is_empty() {
        return Err(AuditError::EmptySuffix);
    }
    if let Some(last) = s.prefix.last() {
        if last != s.suffix.last().unwrap() {
            return Err(AuditError::OpenLoop);
        }
    }
    if !s.at(0).is_empty() {
        return Err(AuditError::ActiveStart);
    }
    for (t, set) in s.prefix.iter().chain(&s.suffix).enumerate() {
        for &e in set {
            if !g.edges.contains(&e) {
                return Err(AuditError::UnknownLink { t, e });
            }
            let hood = link_neighborhood(g, e).expect("edge is in the graph");
            if let Some(&b) = set.iter().find(|&&b| b != e && hood.contains(&b)) {
                return Err(AuditError::Interference { t, a: e, b });
            }
        }
    }
    let covered = s.suffix_items();
    let missing: Vec<LinkId> = g.edges.iter().filter(|e| !covered.contains(e)).copied().collect();
    if !missing.is_empty() {
        return Err(AuditError::Uncovered(missing));
    }
    Ok(())
}
