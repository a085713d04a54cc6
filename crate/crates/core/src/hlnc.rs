//! Hierarchical planning: command nodes take turns under the activation
//! spec, each plans its own neighborhood, and the local plans are stitched
//! into one global link schedule.
//!
//! Pointer semantics: a command node's local plan only advances on steps
//! where the node is active. Inactive nodes keep their position, so every
//! element of a local suffix is eventually played.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{build_phi, eval_lasso};
use crate::network::{connected_components, link_neighborhood, CommandLayer, Graph, LinkId, NetworkError, Point, SensorNetwork};
use crate::planner::{
    audit_schedule, plan_centralized, plan_commands, plan_specialized_lnc, PlanError, PlanOptions, PlannerKind,
    PlanningReport,
};
use crate::ts::{plan_cost, CostFn, CostedLasso, Lasso, Schedule};

/// Default cap on stitched steps before the joint configuration must repeat.
pub const DEFAULT_STITCH_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum HlncError {
    #[error("command layer fails the coverage condition; links outside every command region: {uncovered:?}")]
    Coverage { uncovered: Vec<LinkId> },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("command activation planning failed: {0}")]
    Commands(#[source] PlanError),
    #[error("local planning for command node {node} failed: {source}")]
    Local {
        node: usize,
        #[source]
        source: PlanError,
    },
    #[error("local plan missing for command node {0}")]
    MissingLocalPlan(usize),
    #[error("stitched schedule did not close within {cap} steps")]
    StitchCap { cap: usize },
    #[error("stitched schedule failed the feasibility audit: {0}")]
    Verification(String),
}

impl HlncError {
    pub fn is_budget(&self) -> bool {
        match self {
            HlncError::Commands(e) | HlncError::Local { source: e, .. } => e.is_budget(),
            HlncError::StitchCap { .. } => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HlncOptions {
    /// Options for the local syntheses and, with `command_planner`, for ρ.
    pub plan: PlanOptions,
    pub local_planner: PlannerKind,
    pub command_planner: PlannerKind,
    pub stitch_cap: usize,
    /// Retry with the specialized planner when the automaton route runs
    /// out of budget.
    pub fallback: bool,
    /// Run local syntheses on the rayon pool.
    pub parallel: bool,
}

impl Default for HlncOptions {
    fn default() -> Self {
        HlncOptions {
            plan: PlanOptions::default(),
            local_planner: PlannerKind::Centralized,
            command_planner: PlannerKind::Centralized,
            stitch_cap: DEFAULT_STITCH_CAP,
            fallback: true,
            parallel: true,
        }
    }
}

/// Activation schedule of command nodes with its Jaccard cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandPlan {
    pub rho: CostedLasso<usize>,
    /// One report per connected component of the command graph.
    pub reports: Vec<PlanningReport>,
    /// Planner that produced each component's schedule.
    pub planners: Vec<PlannerKind>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalPlan {
    pub node: usize,
    pub nodes: Vec<usize>,
    pub edges: Vec<LinkId>,
    pub schedule: CostedLasso<LinkId>,
    pub report: PlanningReport,
    pub planner: PlannerKind,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub command_ms: f64,
    pub local_ms: f64,
    pub stitch_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HlncReport {
    pub command_pba_states: usize,
    pub local_pba_states: Vec<usize>,
    pub max_local_edges: usize,
    pub stitched_period: usize,
    pub stitched_cost: f64,
    pub stages: StageTimes,
    /// Where local pointers start; local prefixes are played, not skipped.
    pub pointer_start: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalPlan {
    pub rho: CommandPlan,
    pub local_plans: Vec<LocalPlan>,
    /// Local pointers at the start of the stitched suffix.
    pub pointers: Vec<usize>,
    pub stitched: CostedLasso<LinkId>,
    pub report: HlncReport,
}

/// Runs `plan` with `kind`, retrying with the specialized planner on a
/// budget failure of the automaton route when `fallback` is set.
fn with_fallback<T>(
    kind: PlannerKind,
    fallback: bool,
    plan: impl Fn(PlannerKind) -> Result<T, PlanError>,
) -> Result<(T, PlannerKind), PlanError> {
    match plan(kind) {
        Err(e) if fallback && kind == PlannerKind::Centralized && e.is_budget() => {
            Ok((plan(PlannerKind::Specialized)?, PlannerKind::Specialized))
        }
        r => r.map(|t| (t, kind)),
    }
}

/// Plans ρ separately on every connected component of `g_cmd` and merges
/// the component schedules by pointwise union.
pub fn plan_command_activations(
    g_cmd: &Graph,
    kind: PlannerKind,
    opts: &PlanOptions,
    fallback: bool,
) -> Result<CommandPlan, PlanError> {
    let mut rho: Option<Lasso<usize>> = None;
    let mut reports = Vec::new();
    let mut planners = Vec::new();
    for comp in connected_components(g_cmd) {
        let sub = g_cmd.induced(&comp.into_iter().collect());
        let (out, used) = with_fallback(kind, fallback, |k| plan_commands(&sub, k, opts))?;
        reports.push(out.report);
        planners.push(used);
        rho = Some(match rho {
            None => out.schedule,
            Some(r) => r.union(&out.schedule),
        });
    }
    let rho = rho.unwrap_or(Lasso {
        prefix: vec![BTreeSet::new()],
        suffix: vec![BTreeSet::new()],
    });
    let cost = plan_cost(&rho, crate::ts::jaccard_cost);
    Ok(CommandPlan {
        rho: CostedLasso { lasso: rho, cost },
        reports,
        planners,
    })
}

fn trivial_local() -> (Schedule, f64, PlanningReport) {
    (
        Lasso {
            prefix: vec![BTreeSet::new()],
            suffix: vec![BTreeSet::new()],
        },
        0.0,
        PlanningReport {
            pba_states: 0,
            accepting: 0,
            sccs: 0,
            cost: 0.0,
            wallclock_ms: 0.0,
        },
    )
}

/// Optimal schedule for the link spec restricted to `g_j`; the constant
/// empty schedule when `g_j` has no links.
pub fn plan_local(g_j: &Graph, cost: &CostFn, kind: PlannerKind, opts: &PlanOptions) -> Result<(Schedule, f64, PlanningReport), PlanError> {
    if g_j.edges.is_empty() {
        return Ok(trivial_local());
    }
    let out = match kind {
        PlannerKind::Centralized => plan_centralized(g_j, cost, opts)?,
        PlannerKind::Specialized => plan_specialized_lnc(g_j, cost, opts.pba_budget)?,
    };
    Ok((out.schedule, out.cost, out.report))
}

/// Position in the word of a lasso, kept inside `0..prefix+suffix`.
fn advance<T>(l: &Lasso<T>, p: usize) -> usize {
    let n = l.prefix.len() + l.suffix.len();
    if p + 1 == n {
        l.prefix.len()
    } else {
        p + 1
    }
}

fn element<T>(l: &Lasso<T>, p: usize) -> &BTreeSet<T> {
    if p < l.prefix.len() {
        &l.prefix[p]
    } else {
        &l.suffix[p - l.prefix.len()]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stitched {
    pub schedule: Schedule,
    /// Local pointers when the suffix starts.
    pub pointers: Vec<usize>,
}

/// Global schedule `τ(t) = ⋃_{j ∈ ρ(t)} τ_j(p_j)`, where active nodes advance
/// their pointer `p_j` and inactive ones hold it. The trace is folded into a
/// lasso at the first repeated joint configuration `(ρ position, pointers)`.
///
/// `local[j]` is the plan of command node `j`.
pub fn stitch(rho: &Lasso<usize>, local: &[Schedule], cap: usize) -> Result<Stitched, HlncError> {
    for j in rho.items() {
        if j >= local.len() {
            return Err(HlncError::MissingLocalPlan(j));
        }
    }
    let mut seen: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut trace: Vec<BTreeSet<LinkId>> = Vec::new();
    let mut r = 0;
    let mut ptr = vec![0; local.len()];
    loop {
        if let Some(&t0) = seen.get(&(r, ptr.clone())) {
            let (stem, cycle) = trace.split_at(t0);
            let schedule = Lasso::from_word(stem, cycle).expect("cycle is nonempty");
            return Ok(Stitched { schedule, pointers: ptr });
        }
        if trace.len() >= cap {
            return Err(HlncError::StitchCap { cap });
        }
        seen.insert((r, ptr.clone()), trace.len());
        let mut letter = BTreeSet::new();
        for &j in element(rho, r) {
            letter.extend(element(&local[j], ptr[j]).iter().copied());
            ptr[j] = advance(&local[j], ptr[j]);
        }
        trace.push(letter);
        r = advance(rho, r);
    }
}

/// Plans with a geometric command layer. Refuses to plan unless the
/// coverage condition holds for `centers` and `big_r`.
pub fn plan_hlnc(
    net: &SensorNetwork,
    centers: &[Point],
    big_r: f64,
    cost: &CostFn,
    opts: &HlncOptions,
) -> Result<HierarchicalPlan, HlncError> {
    let layer = CommandLayer::build(net, centers.to_vec(), big_r)?;
    if layer.epsilon_witness.is_none() {
        return Err(HlncError::Coverage {
            uncovered: layer.uncovered_edges(net),
        });
    }
    plan_hierarchical(&net.graph(), &layer.cmd_graph, &layer.subgraphs, cost, opts)
}

/// Plans with an explicit command graph and local subgraphs. Every link of
/// `g` must lie in some subgraph, and subgraphs of command nodes that are
/// not adjacent in `g_cmd` must not share sensors.
pub fn plan_hierarchical(
    g: &Graph,
    g_cmd: &Graph,
    subgraphs: &[Graph],
    cost: &CostFn,
    opts: &HlncOptions,
) -> Result<HierarchicalPlan, HlncError> {
    let start = Instant::now();
    let uncovered: Vec<LinkId> = g
        .edges
        .iter()
        .filter(|e| !subgraphs.iter().any(|s| s.edges.contains(e)))
        .copied()
        .collect();
    if !uncovered.is_empty() {
        return Err(HlncError::Coverage { uncovered });
    }
    if let Some(j) = g_cmd.nodes.iter().find(|&&j| j >= subgraphs.len()) {
        return Err(HlncError::MissingLocalPlan(*j));
    }

    let rho = plan_command_activations(g_cmd, opts.command_planner, &opts.plan, opts.fallback)
        .map_err(HlncError::Commands)?;
    let command_ms = start.elapsed().as_secs_f64() * 1e3;

    let t_local = Instant::now();
    let run = |(j, g_j): (usize, &Graph)| {
        // the specialized search has no fairness constraints
        with_fallback(opts.local_planner, opts.fallback && !opts.plan.fairness, |k| plan_local(g_j, cost, k, &opts.plan))
            .map_err(|source| HlncError::Local { node: j, source })
    };
    let locals: Vec<((Schedule, f64, PlanningReport), PlannerKind)> = if opts.parallel {
        subgraphs.par_iter().enumerate().map(run).collect::<Result<_, _>>()?
    } else {
        subgraphs.iter().enumerate().map(run).collect::<Result<_, _>>()?
    };
    let local_ms = t_local.elapsed().as_secs_f64() * 1e3;

    let t_stitch = Instant::now();
    let schedules: Vec<Schedule> = locals.iter().map(|((s, ..), _)| s.clone()).collect();
    let stitched = stitch(&rho.rho.lasso, &schedules, opts.stitch_cap)?;
    let stitch_ms = t_stitch.elapsed().as_secs_f64() * 1e3;

    let report = audit_feasibility(g, &stitched.schedule);
    if !report.passed() {
        return Err(HlncError::Verification(report.summary()));
    }
    let stitched_cost = plan_cost(&stitched.schedule, |a, b| cost.eval(a, b));

    let local_plans: Vec<LocalPlan> = locals
        .into_iter()
        .zip(subgraphs)
        .enumerate()
        .map(|(j, (((schedule, c, report), planner), g_j))| LocalPlan {
            node: j,
            nodes: g_j.nodes.iter().copied().collect(),
            edges: g_j.edges.iter().copied().collect(),
            schedule: CostedLasso { lasso: schedule, cost: c },
            report,
            planner,
        })
        .collect();
    let report = HlncReport {
        command_pba_states: rho.reports.iter().map(|r| r.pba_states).sum(),
        local_pba_states: local_plans.iter().map(|l| l.report.pba_states).collect(),
        max_local_edges: subgraphs.iter().map(|s| s.edges.len()).max().unwrap_or(0),
        stitched_period: stitched.schedule.period(),
        stitched_cost,
        stages: StageTimes {
            command_ms,
            local_ms,
            stitch_ms,
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        pointer_start: "local_prefix".into(),
    };
    Ok(HierarchicalPlan {
        rho,
        local_plans,
        pointers: stitched.pointers,
        stitched: CostedLasso {
            lasso: stitched.schedule,
            cost: stitched_cost,
        },
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterferenceViolation {
    pub t: usize,
    pub a: LinkId,
    pub b: LinkId,
}

/// Outcome of the feasibility checks; a schedule passes when every field
/// reports no violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub well_formed: bool,
    pub starts_inactive: bool,
    /// First link not in the network, with its time step.
    pub unknown_link: Option<(usize, LinkId)>,
    /// First pair of interfering links active together.
    pub interference: Option<InterferenceViolation>,
    /// Links missing from the periodic part.
    pub uncovered: Vec<LinkId>,
    /// The whole specification evaluated on the lasso.
    pub spec_holds: bool,
}

impl FeasibilityReport {
    pub fn passed(&self) -> bool {
        self.well_formed
            && self.starts_inactive
            && self.unknown_link.is_none()
            && self.interference.is_none()
            && self.uncovered.is_empty()
            && self.spec_holds
    }

    pub fn summary(&self) -> String {
        if !self.well_formed {
            return "schedule is not a closed lasso".into();
        }
        if let Some((t, e)) = self.unknown_link {
            return format!("time {t}: link {e} is not in the network");
        }
        if let Some(v) = &self.interference {
            return format!("time {}: links {} and {} interfere", v.t, v.a, v.b);
        }
        if !self.uncovered.is_empty() {
            return format!("links never active in the suffix: {:?}", self.uncovered);
        }
        if !self.starts_inactive {
            return "schedule does not start with every link inactive".into();
        }
        if !self.spec_holds {
            return "specification does not hold".into();
        }
        "ok".into()
    }
}

/// Checks per-step non-interference, suffix coverage of every link and the
/// specification itself, reporting the first violation of each kind.
pub fn audit_feasibility(g: &Graph, s: &Schedule) -> FeasibilityReport {
    let well_formed = !s.suffix.is_empty() && s.prefix.last().is_none_or(|l| Some(l) == s.suffix.last());
    let mut unknown_link = None;
    let mut interference = None;
    for (t, set) in s.prefix.iter().chain(&s.suffix).enumerate() {
        for &e in set {
            let Ok(hood) = link_neighborhood(g, e) else {
                unknown_link.get_or_insert((t, e));
                continue;
            };
            if interference.is_none() {
                if let Some(&b) = set.iter().find(|&&b| b > e && hood.contains(&b)) {
                    interference = Some(InterferenceViolation { t, a: e, b });
                }
            }
        }
    }
    let covered = s.suffix_items();
    let uncovered = g.edges.iter().filter(|e| !covered.contains(e)).copied().collect();
    let starts_inactive = s.prefix.first().or(s.suffix.first()).is_some_and(|x| x.is_empty());
    let spec_holds = well_formed && {
        let (p, q) = s.letters();
        eval_lasso(&build_phi(g), &p, &q)
    };
    debug_assert!(!(spec_holds && well_formed && starts_inactive) || audit_schedule(g, s).is_ok());
    FeasibilityReport {
        well_formed,
        starts_inactive,
        unknown_link,
        interference,
        uncovered,
        spec_holds,
    }
}
