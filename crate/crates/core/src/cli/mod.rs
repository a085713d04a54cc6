//! The `lnc` command-line tool.
//!
//! Settings are resolved as flags, then the `--config` JSON file, then
//! defaults. `LNC_BUDGET` replaces the default product-state budget.

pub mod bench;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::consensus::{self, initial_state, ConsensusSummary, Seeding};
use crate::hlnc::{audit_feasibility, plan_hlnc, FeasibilityReport, HlncError, HlncOptions};
use crate::ltl::{parse, TranslateOptions};
use crate::network::{
    build_geometric_graph, coverage_check, kmeans_place, parse_sensor_csv, random_network, NetworkError, NetworkFile, SensorNetwork,
};
use crate::oracle::{brute_force_optimal, verify_translation, OracleError};
use crate::planner::{
    plan_centralized, plan_specialized_lnc, PlanError, PlanOptions, PlannerKind, PlanningReport, SpecMode,
    DEFAULT_PBA_BUDGET,
};
use crate::ts::{sequential_schedule, CostFn, Lasso, Policy, Schedule};

/// Environment variable overriding the default product-state budget.
pub const BUDGET_ENV: &str = "LNC_BUDGET";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::Infeasible => CliError::Infeasible(e.to_string()),
            PlanError::Config(_) => CliError::Config(e.to_string()),
            e if e.is_budget() => CliError::Budget(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<HlncError> for CliError {
    fn from(e: HlncError) -> Self {
        match e {
            HlncError::Coverage { .. } => CliError::Infeasible(format!("{e}; raise K or R")),
            HlncError::Network(_) => CliError::Config(e.to_string()),
            HlncError::Commands(PlanError::Infeasible) | HlncError::Local { source: PlanError::Infeasible, .. } => {
                CliError::Infeasible(e.to_string())
            }
            e if e.is_budget() => CliError::Budget(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    Jaccard,
    Hausdorff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Central,
    Specialized,
    Hlnc,
}

/// Every tunable setting. Serialized into each output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub n: usize,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
    pub width: f64,
    pub height: f64,
    pub epsilon: f64,
    pub horizon: usize,
    pub cost: CostKind,
    pub policy: Policy,
    pub spec: SpecMode,
    pub fairness: bool,
    pub command_planner: PlannerKind,
    pub local_planner: PlannerKind,
    pub ts_budget: usize,
    pub pba_budget: usize,
    pub translate_budget: usize,
    pub stitch_cap: usize,
    pub seeding: Seeding,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 54,
            r: 6.0,
            big_r: 8.0,
            k: 10,
            seed: 0,
            width: 40.0,
            height: 30.0,
            epsilon: consensus::DEFAULT_EPSILON,
            horizon: 1000,
            cost: CostKind::Jaccard,
            policy: Policy::NonInterfering,
            spec: SpecMode::LivenessOnly,
            fairness: false,
            command_planner: PlannerKind::Centralized,
            local_planner: PlannerKind::Centralized,
            ts_budget: 1 << 20,
            pba_budget: DEFAULT_PBA_BUDGET,
            translate_budget: TranslateOptions::default().max_states,
            stitch_cap: crate::hlnc::DEFAULT_STITCH_CAP,
            seeding: Seeding::UnitBasis,
        }
    }
}

impl RunConfig {
    pub fn plan_options(&self) -> PlanOptions {
        PlanOptions {
            policy: self.policy,
            spec: self.spec,
            fairness: self.fairness,
            ts_budget: self.ts_budget,
            pba_budget: self.pba_budget,
            translate: TranslateOptions {
                max_states: self.translate_budget,
            },
            parallel: false,
        }
    }

    pub fn hlnc_options(&self) -> HlncOptions {
        HlncOptions {
            plan: self.plan_options(),
            local_planner: self.local_planner,
            command_planner: self.command_planner,
            stitch_cap: self.stitch_cap,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CliError::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(CliError::Config(format!("r must be positive, got {}", self.r)));
        }
        if self.spec == SpecMode::LivenessOnly && self.policy == Policy::Complete {
            return Err(CliError::Config("spec liveness_only needs policy non_interfering".into()));
        }
        Ok(())
    }
}

fn parse_json_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

/// Optional overrides for [`RunConfig`]; unset flags fall through.
#[derive(Args, Debug, Default, Clone)]
pub struct ConfigFlags {
    /// JSON file with any subset of the settings
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Communication radius
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Command radius
    #[arg(long = "R", global = true)]
    pub big_r: Option<f64>,
    /// Number of command nodes
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub width: Option<f64>,
    #[arg(long, global = true)]
    pub height: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Consensus steps
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub cost: Option<CostKind>,
    /// complete | non_interfering
    #[arg(long, global = true, value_parser = parse_json_enum::<Policy>)]
    pub policy: Option<Policy>,
    /// full | liveness_only
    #[arg(long, global = true, value_parser = parse_json_enum::<SpecMode>)]
    pub spec: Option<SpecMode>,
    /// Conjoin the per-link fairness formulas
    #[arg(long, global = true)]
    pub fairness: bool,
    /// centralized | specialized
    #[arg(long, global = true, value_parser = parse_json_enum::<PlannerKind>)]
    pub command_planner: Option<PlannerKind>,
    /// centralized | specialized
    #[arg(long, global = true, value_parser = parse_json_enum::<PlannerKind>)]
    pub local_planner: Option<PlannerKind>,
    #[arg(long, global = true)]
    pub ts_budget: Option<usize>,
    #[arg(long, global = true)]
    pub pba_budget: Option<usize>,
    #[arg(long, global = true)]
    pub translate_budget: Option<usize>,
    #[arg(long, global = true)]
    pub stitch_cap: Option<usize>,
    /// unit_basis | uniform
    #[arg(long, global = true, value_parser = parse_json_enum::<Seeding>)]
    pub seeding: Option<Seeding>,
}

impl ConfigFlags {
    /// Flags over the config file over defaults (with the budget taken
    /// from the environment when set).
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut base = RunConfig::default();
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            base.pba_budget = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{BUDGET_ENV} must be a positive integer, got {v:?}")))?;
        }
        let mut c = match &self.config {
            Some(path) => {
                let text = read(path)?;
                let mut v: Value =
                    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let merged = merge(serde_json::to_value(&base).unwrap(), v.take());
                serde_json::from_value(merged).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => base,
        };
        macro_rules! take {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { c.$f = v; })*};
        }
        take!(n, r, big_r, k, seed, width, height, epsilon, horizon, cost, policy, spec, command_planner, local_planner, ts_budget, pba_budget, translate_budget, stitch_cap, seeding);
        if self.fairness {
            c.fairness = true;
        }
        c.validate()?;
        Ok(c)
    }
}

fn merge(mut base: Value, over: Value) -> Value {
    if let (Some(b), Value::Object(o)) = (base.as_object_mut(), over) {
        for (k, v) in o {
            b.insert(k, v);
        }
    }
    base
}

#[derive(Parser, Debug)]
#[command(name = "lnc", version, about = "Locally non-interfering link scheduling")]
pub struct Cli {
    #[command(flatten)]
    pub flags: ConfigFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random network or ingest a sensor CSV
    Gen(GenArgs),
    /// Synthesize and audit a link schedule
    Plan(PlanArgs),
    /// Run consensus along a schedule
    Simulate(SimulateArgs),
    /// Audit a schedule against a network
    Check(CheckArgs),
    /// Brute-force optimum or automaton cross-check on small inputs
    Oracle(OracleArgs),
    /// Scaling sweep of centralized against hierarchical planning
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Read positions from an `id,x,y` CSV instead of sampling
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Add K command centers placed by k-means, with radius R
    #[arg(long)]
    pub centers: bool,
    /// With --centers, raise K until the coverage condition holds
    #[arg(long, requires = "centers")]
    pub cover: bool,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long, value_enum, default_value = "central")]
    pub mode: Mode,
    /// Schedule output (JSON)
    #[arg(long, short)]
    pub out: PathBuf,
    /// Planning report output (JSON)
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
    /// Trajectory CSV output
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Summary JSON output (stdout when absent)
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Also run the one-link-at-a-time schedule; its trajectory goes here
    #[arg(long)]
    pub paired: Option<PathBuf>,
    /// Simulate schedules that fail the audit
    #[arg(long)]
    pub allow_infeasible: bool,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
    /// Also check joint connectivity over windows of this length
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Network with at most four links
    #[arg(long, conflicts_with = "formula", required_unless_present = "formula")]
    pub net: Option<PathBuf>,
    /// Formula whose automaton is checked against the lasso semantics
    #[arg(long)]
    pub formula: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub prefix: usize,
    #[arg(long, default_value_t = 4)]
    pub suffix: usize,
    /// Lasso length bound for formula checks
    #[arg(long, default_value_t = 3)]
    pub max_len: usize,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, short)]
    pub out: PathBuf,
    /// Largest path for the centralized sweep
    #[arg(long, default_value_t = 14)]
    pub max_edges: usize,
    /// Largest number of command regions
    #[arg(long, default_value_t = 8)]
    pub max_k: usize,
    /// Links per region block; local subgraphs have one more
    #[arg(long, default_value_t = 5)]
    pub block_edges: usize,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    write(path, &(serde_json::to_string_pretty(v).unwrap() + "\n"))
}

/// Loads a network file; `r` and `R` in the returned config come from the
/// file when it carries them.
fn load_network(path: &Path, c: &RunConfig) -> Result<(NetworkFile, SensorNetwork, RunConfig), CliError> {
    let file: NetworkFile = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let net = file.to_network()?;
    let mut c = c.clone();
    c.r = net.radius();
    if let Some(layer) = &file.command {
        c.big_r = layer.big_r;
        c.k = layer.centers.len();
    }
    Ok((file, net, c))
}

/// Accepts a bare lasso or any JSON object with a `schedule` field.
pub fn load_schedule(path: &Path) -> Result<Schedule, CliError> {
    let bad = |e: String| CliError::Config(format!("{}: {e}", path.display()));
    let mut v: Value = serde_json::from_str(&read(path)?).map_err(|e| bad(e.to_string()))?;
    if let Some(s) = v.get_mut("schedule") {
        v = s.take();
    }
    let l: Schedule = serde_json::from_value(v).map_err(|e| bad(e.to_string()))?;
    Lasso::new(l.prefix, l.suffix).map_err(|e| bad(e.to_string()))
}

fn cost_fn(c: &RunConfig, net: &SensorNetwork) -> CostFn {
    match c.cost {
        CostKind::Jaccard => CostFn::Jaccard,
        CostKind::Hausdorff => CostFn::hausdorff(net),
    }
}

fn cmd_gen(c: &RunConfig, a: &GenArgs) -> Result<(), CliError> {
    let net = match &a.csv {
        Some(p) => {
            let f = fs::File::open(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            build_geometric_graph(parse_sensor_csv(f)?, c.r)?
        }
        None => random_network(c.n, c.r, c.width, c.height, c.seed)?,
    };
    let mut file = NetworkFile::from_network(&net);
    if a.centers {
        let mut km = kmeans_place(net.positions(), c.k, c.seed)?;
        while a.cover && coverage_check(&net, &km.centers, c.big_r)?.is_none() {
            if km.centers.len() >= net.len() {
                return Err(CliError::Infeasible(format!(
                    "no K up to N = {} satisfies the coverage condition; raise R",
                    net.len()
                )));
            }
            km = kmeans_place(net.positions(), km.centers.len() + 1, c.seed)?;
        }
        file = file.with_command_layer(&km.centers, c.big_r);
    }
    let mut v = serde_json::to_value(&file).unwrap();
    v["config"] = serde_json::to_value(c).unwrap();
    write_json(&a.out, &v)?;
    eprintln!(
        "wrote {} sensors, {} links, {} centers to {}",
        net.len(),
        net.edges().len(),
        file.command.as_ref().map_or(0, |c| c.centers.len()),
        a.out.display()
    );
    Ok(())
}

fn cmd_plan(c: &RunConfig, a: &PlanArgs) -> Result<(), CliError> {
    let (file, net, c) = load_network(&a.net, c)?;
    let c = &c;
    let g = net.graph();
    let cost = cost_fn(c, &net);
    let (schedule, plan_cost, report, extra) = match a.mode {
        Mode::Central => {
            let out = plan_centralized(&g, &cost, &c.plan_options())?;
            (out.schedule, out.cost, out.report, Value::Null)
        }
        Mode::Specialized => {
            let out = plan_specialized_lnc(&g, &cost, c.pba_budget)?;
            (out.schedule, out.cost, out.report, Value::Null)
        }
        Mode::Hlnc => {
            let (centers, big_r) = match file.centers() {
                Some(x) => x,
                None => (kmeans_place(net.positions(), c.k, c.seed)?.centers, c.big_r),
            };
            if !(big_r > net.radius()) {
                return Err(CliError::Config(format!(
                    "hierarchical planning needs r < R, got r = {} and R = {big_r}",
                    net.radius()
                )));
            }
            let plan = plan_hlnc(&net, &centers, big_r, &cost, &c.hlnc_options())?;
            let report = PlanningReport {
                pba_states: plan.report.command_pba_states + plan.report.local_pba_states.iter().sum::<usize>(),
                accepting: plan.rho.reports.iter().map(|r| r.accepting).sum::<usize>()
                    + plan.local_plans.iter().map(|l| l.report.accepting).sum::<usize>(),
                sccs: plan.rho.reports.iter().map(|r| r.sccs).sum::<usize>()
                    + plan.local_plans.iter().map(|l| l.report.sccs).sum::<usize>(),
                cost: plan.stitched.cost,
                wallclock_ms: plan.report.stages.total_ms,
            };
            (plan.stitched.lasso.clone(), plan.stitched.cost, report, serde_json::to_value(&plan).unwrap())
        }
    };
    let audit = audit_feasibility(&g, &schedule);
    if !audit.passed() {
        return Err(CliError::Infeasible(format!("refusing to write: {}", audit.summary())));
    }
    let mut out = json!({
        "config": c,
        "mode": a.mode,
        "schedule": schedule,
        "cost": plan_cost,
        "audit": audit,
    });
    if !extra.is_null() {
        out["hierarchical"] = extra;
    }
    write_json(&a.out, &out)?;
    let mut rep = serde_json::to_value(&report).unwrap();
    rep["config"] = serde_json::to_value(c).unwrap();
    if let Some(h) = out.get("hierarchical") {
        rep["hlnc"] = h["report"].clone();
    }
    match &a.report {
        Some(p) => write_json(p, &rep)?,
        None => println!("{}", serde_json::to_string(&rep).unwrap()),
    }
    Ok(())
}

fn audited(g: &crate::network::Graph, s: &Schedule) -> Result<FeasibilityReport, CliError> {
    let r = audit_feasibility(g, s);
    if let Some((t, e)) = r.unknown_link {
        return Err(CliError::Config(format!("schedule does not match the network: time {t}, link {e}")));
    }
    Ok(r)
}

fn simulate_one(
    c: &RunConfig,
    g: &crate::network::Graph,
    s: &Schedule,
    csv: Option<&Path>,
) -> Result<(ConsensusSummary, bool), CliError> {
    let y0 = initial_state(net_dim(g), c.seeding, c.seed);
    let tr = consensus::run(g, s, &y0, c.epsilon, c.horizon).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(p) = csv {
        let f = fs::File::create(p).map_err(|e| CliError::Failed(format!("cannot write {}: {e}", p.display())))?;
        tr.write_csv(f).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    Ok((consensus::summarize(&tr, g, s), tr.matrix_fallback))
}

fn net_dim(g: &crate::network::Graph) -> usize {
    g.nodes.iter().next_back().map_or(0, |&v| v + 1)
}

fn cmd_simulate(c: &RunConfig, a: &SimulateArgs) -> Result<(), CliError> {
    let (_, net, c) = load_network(&a.net, c)?;
    let c = &c;
    let g = net.graph();
    let s = load_schedule(&a.schedule)?;
    let audit = audited(&g, &s)?;
    if !audit.passed() && !a.allow_infeasible {
        return Err(CliError::Infeasible(format!("{}; pass --allow-infeasible to simulate anyway", audit.summary())));
    }
    let (summary, fallback) = simulate_one(c, &g, &s, a.csv.as_deref())?;
    let mut out = serde_json::to_value(&summary).unwrap();
    out["matrix_fallback"] = json!(fallback);
    if let Some(p) = &a.paired {
        let (seq, _) = simulate_one(c, &g, &sequential_schedule(&g), Some(p))?;
        out["sequential"] = serde_json::to_value(&seq).unwrap();
    }
    out["config"] = serde_json::to_value(c).unwrap();
    match &a.summary {
        Some(p) => write_json(p, &out),
        None => {
            println!("{}", serde_json::to_string(&out).unwrap());
            Ok(())
        }
    }
}

fn cmd_check(c: &RunConfig, a: &CheckArgs) -> Result<(), CliError> {
    let (_, net, c) = load_network(&a.net, c)?;
    let c = &c;
    let g = net.graph();
    let s = load_schedule(&a.schedule)?;
    let audit = audited(&g, &s)?;
    let mut out = json!({
        "audit": audit,
        "liveness": consensus::liveness_check(&g, &s),
        "efficiency_pct": consensus::efficiency(&s, &g),
        "config": c,
    });
    if let Some(w) = a.window {
        let jc = consensus::check_joint_connectivity(&g, &s, w).map_err(|e| CliError::Config(e.to_string()))?;
        out["joint_connectivity"] = json!(jc);
    }
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    if audit.passed() {
        Ok(())
    } else {
        Err(CliError::Infeasible(audit.summary()))
    }
}

fn oracle_err(e: OracleError) -> CliError {
    match e {
        OracleError::Ltl(l) => CliError::from(PlanError::Ltl(l)),
        e => CliError::Config(e.to_string()),
    }
}

fn cmd_oracle(c: &RunConfig, a: &OracleArgs) -> Result<(), CliError> {
    if let Some(text) = &a.formula {
        let f = parse(text).map_err(|e| CliError::Config(e.to_string()))?;
        let report = verify_translation(&f, 2, a.max_len).map_err(oracle_err)?;
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return if report.passed() {
            Ok(())
        } else {
            Err(CliError::Failed(format!("{} disagreements", report.disagreements.len())))
        };
    }
    let (_, net, c) = load_network(a.net.as_deref().expect("clap requires --net or --formula"), c)?;
    let c = &c;
    let g = net.graph();
    let cost = cost_fn(c, &net);
    let best = brute_force_optimal(&g, &cost, a.prefix, a.suffix, c.fairness).map_err(oracle_err)?;
    let central = plan_centralized(&g, &cost, &c.plan_options()).map(|o| o.cost).ok();
    let out = json!({
        "oracle": best,
        "centralized_cost": central,
        "agree": match (&best, central) {
            (Some(b), Some(x)) => Some((b.cost - x).abs() <= 1e-9),
            _ => None,
        },
        "config": c,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    match best {
        Some(_) => Ok(()),
        None => Err(CliError::Infeasible("no lasso within the bounds satisfies the specification".into())),
    }
}

fn cmd_bench(c: &RunConfig, a: &BenchArgs) -> Result<(), CliError> {
    let mut rows = bench::bench_centralized(a.max_edges, c.pba_budget);
    rows.extend(bench::bench_hlnc(2..=a.max_k, a.block_edges, &c.hlnc_options()));
    let mut w = csv::Writer::from_path(&a.out).map_err(|e| CliError::Failed(e.to_string()))?;
    for r in &rows {
        w.serialize(r).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Failed(e.to_string()))?;
    eprintln!("wrote {} rows to {}", rows.len(), a.out.display());
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let c = cli.flags.resolve()?;
    match &cli.command {
        Command::Gen(a) => cmd_gen(&c, a),
        Command::Plan(a) => cmd_plan(&c, a),
        Command::Simulate(a) => cmd_simulate(&c, a),
        Command::Check(a) => cmd_check(&c, a),
        Command::Oracle(a) => cmd_oracle(&c, a),
        Command::Bench(a) => cmd_bench(&c, a),
    }
}

/// Parses `args` (including the program name), runs, and returns the exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
