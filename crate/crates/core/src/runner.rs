//! Runs resolved scenarios and writes the per-task CSV tables and the JSON
//! summary.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correspondence::{
    cylinder_identity_residual, projection_formula_check, pull_back, push_forward, slice_family, spread_consistency,
    CorrespondenceKernel, Factor, ProductSpace,
};
use crate::current::{evaluate_with, Current};
use crate::error::{Error, Result};
use crate::form::{random_polynomial_form, FormField, SmoothForm};
use crate::geometry::Plateau;
use crate::integrate::QuadOptions;
use crate::intersection::{
    check_associativity, check_closed, check_graded_commutativity, intersect_with, kronecker_index_in, triple_intersect,
};
use crate::lebesgue::lebesgue_diagnostic;
use crate::limit::{extrapolate, EpsilonLimit, EpsilonSchedule, Verdict};
use crate::oracles::{closed_form_parabola_self, plane_curve_multiplicity, tangency_closed_forms, transversal_points};
use crate::scenario::{
    parse, poly_from_spec, resolve, CheckKind, CorrespondenceOp, OracleSpec, TaskKind, TaskSpec, World, BUMP_NAMES,
    CHART_KINDS,
};
use crate::smoothing::{dual_pair, homotopy_terms};

/// Flags of a run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the scenario seed.
    pub seed: Option<u64>,
    pub serial: bool,
    /// Overrides every task tolerance.
    pub tol: Option<f64>,
}

/// One line of a task's convergence table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub eps: f64,
    pub raw_value: f64,
    pub extrapolant: Option<f64>,
    pub error_estimate: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub schedule: EpsilonSchedule,
    pub nodes: usize,
    pub kernel_nodes: usize,
    pub leaf_scale: f64,
    pub max_depth: usize,
    pub bump_rule: (usize, usize),
    pub data_id: Option<String>,
    pub parallel: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskReport {
    pub name: String,
    pub kind: TaskKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckKind>,
    pub rows: Vec<Row>,
    pub extrapolated: Option<f64>,
    pub error_estimate: Option<f64>,
    pub verdict: Option<Verdict>,
    pub oracle: Option<f64>,
    /// Residual of a property check, or the oracle mismatch.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub message: Option<String>,
    pub environment: Environment,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub comment: String,
    pub seed: u64,
    pub serial: bool,
    pub tasks: Vec<TaskReport>,
    pub passed: bool,
}

/// Table rows: the best extrapolant available at each `ε` and its change
/// from the previous one.
pub fn rows_of(limit: &EpsilonLimit) -> Vec<Row> {
    let eps = limit.schedule.epsilons();
    (0..limit.raw_values.len())
        .map(|i| {
            let level = (0..limit.levels.len()).rev().find(|&l| i >= 2 * l);
            let (extrapolant, error_estimate) = match level {
                Some(l) if l > 0 => {
                    let v = &limit.levels[l];
                    let j = i - 2 * l;
                    (Some(v[j]), (j >= 1).then(|| (v[j] - v[j - 1]).abs()))
                }
                _ => (None, None),
            };
            Row { eps: eps[i], raw_value: limit.raw_values[i], extrapolant, error_estimate }
        })
        .collect()
}

fn raw_rows(schedule: &EpsilonSchedule, raw: &[f64]) -> Vec<Row> {
    schedule
        .epsilons()
        .iter()
        .zip(raw)
        .map(|(&eps, &raw_value)| Row { eps, raw_value, extrapolant: None, error_estimate: None })
        .collect()
}

/// Outcome of a task body before comparison with the oracle.
struct Outcome {
    rows: Vec<Row>,
    limit: Option<EpsilonLimit>,
    residual: Option<f64>,
    details: serde_json::Value,
    data_id: Option<String>,
    /// Advisory checks always pass and explain themselves in `note`.
    advisory: bool,
    note: Option<String>,
}

impl Outcome {
    fn limit(l: EpsilonLimit, data_id: Option<String>) -> Self {
        Outcome { rows: rows_of(&l), limit: Some(l), residual: None, details: serde_json::Value::Null, data_id, advisory: false, note: None }
    }

    fn residual(rows: Vec<Row>, r: f64) -> Self {
        Outcome { rows, limit: None, residual: Some(r), details: serde_json::Value::Null, data_id: None, advisory: false, note: None }
    }
}

/// `a − s·b` along the schedule, extrapolated.
fn difference(a: &EpsilonLimit, b: &EpsilonLimit, s: f64) -> Result<EpsilonLimit> {
    let raw = a.raw_values.iter().zip(&b.raw_values).map(|(x, y)| x - s * y).collect();
    extrapolate(&a.schedule, raw)
}

fn default_tol(t: &TaskSpec) -> f64 {
    match (t.kind, t.check) {
        (TaskKind::Kronecker, _) => 0.1,
        (_, Some(CheckKind::CylinderIdentity)) => 1e-12,
        (_, Some(CheckKind::Boundary)) => 1e-8,
        (_, Some(CheckKind::Homotopy)) => 1e-6,
        (_, Some(CheckKind::Dual)) => 1e-4,
        _ => 1e-5,
    }
}

struct Ctx<'a> {
    world: &'a World,
    task: &'a TaskSpec,
    at: String,
    schedule: EpsilonSchedule,
    opts: QuadOptions,
    seed: u64,
}

impl Ctx<'_> {
    fn name<'b>(&self, v: &'b Option<String>, field: &str) -> Result<&'b str> {
        v.as_deref().ok_or_else(|| Error::Validation(format!("{}.{field}: missing", self.at)))
    }

    fn cur(&self, v: &Option<String>, field: &str) -> Result<Current> {
        self.world.current(self.name(v, field)?, &format!("{}.{field}", self.at))
    }

    fn form(&self) -> Result<&SmoothForm> {
        self.world.form(self.name(&self.task.form, "form")?, &format!("{}.form", self.at))
    }

    fn data(&self, v: &Option<String>, field: &str) -> Result<Arc<crate::charts::DeRhamData>> {
        Ok(self.world.data(self.name(v, field)?, &format!("{}.{field}", self.at))?.clone())
    }

    fn space(&self) -> Result<ProductSpace> {
        ProductSpace::new(self.data(&self.task.x_derham, "x_derham")?, self.data(&self.task.y_derham, "y_derham")?)
    }

    fn chain(&self, v: &Option<String>, field: &str) -> Result<crate::chain::CellChain> {
        Ok(self.world.chain(self.name(v, field)?, &format!("{}.{field}", self.at))?.clone())
    }
}

fn body(c: &Ctx) -> Result<Outcome> {
    let t = c.task;
    let opts = &c.opts;
    let sched = &c.schedule;
    match t.kind {
        TaskKind::Intersect => {
            let data = c.data(&t.derham, "derham")?;
            let r = intersect_with(&c.cur(&t.t1, "t1")?, &c.cur(&t.t2, "t2")?, c.form()?, &data, sched, opts)?;
            Ok(Outcome::limit(r.value, Some(r.data_id)))
        }
        TaskKind::Kronecker => {
            let data = c.data(&t.derham, "derham")?;
            let (a, b) = (c.cur(&t.t1, "t1")?, c.cur(&t.t2, "t2")?);
            let window = match &t.window {
                Some(w) => w.clone(),
                None => {
                    let hint = match (a.support_box(), b.support_box(), a.is_compact(), b.is_compact()) {
                        (Some(x), Some(y), true, true) => x.intersect(&y),
                        (Some(x), _, true, _) => x,
                        (_, Some(y), _, true) => y,
                        _ => return Err(Error::Unsupported("Kronecker index of two unbounded currents".into())),
                    };
                    let w = hint.expand(data.reach(sched.eps0) + 0.05);
                    crate::scenario::BoxSpec { lo: w.lo, hi: w.hi }
                }
            };
            let window = crate::geometry::BBox::new(window.lo, window.hi);
            let l = kronecker_index_in(&a, &b, &window, &data, sched, opts)?;
            Ok(Outcome::limit(l, Some(data.id().to_string())))
        }
        TaskKind::Triple => {
            let data = c.data(&t.derham, "derham")?;
            let l = triple_intersect(&c.cur(&t.t1, "t1")?, &c.cur(&t.t2, "t2")?, &c.cur(&t.t3, "t3")?, c.form()?, &data, sched, opts)?;
            Ok(Outcome::limit(l, Some(data.id().to_string())))
        }
        TaskKind::Correspondence => {
            let space = c.space()?;
            let kernel = CorrespondenceKernel::new(c.cur(&t.t1, "t1")?, true);
            let tc = c.cur(&t.t2, "t2")?;
            let l = match t.op.expect("checked at resolution") {
                CorrespondenceOp::PullBack => pull_back(&kernel, &tc, c.form()?, &space, sched, opts)?,
                CorrespondenceOp::PushForward => push_forward(&kernel, &tc, c.form()?, &space, sched, opts)?,
            };
            Ok(Outcome::limit(l, Some(space.data.id().to_string())))
        }
        TaskKind::Slice => {
            let space = c.space()?;
            let s = t.at.as_ref().expect("checked at resolution");
            let l = slice_family(&c.cur(&t.t1, "t1")?, s, c.form()?, &space, sched, opts)?;
            Ok(Outcome::limit(l, Some(space.data.id().to_string())))
        }
        TaskKind::PropertyCheck => check_body(c),
    }
}

fn check_body(c: &Ctx) -> Result<Outcome> {
    let t = c.task;
    let opts = &c.opts;
    let sched = &c.schedule;
    let check = t.check.expect("checked at resolution");
    match check {
        CheckKind::Homotopy | CheckKind::Dual => {
            let data = c.data(&t.derham, "derham")?;
            let chain = c.chain(&t.t1, "t1")?;
            let n = t.samples.unwrap_or(10);
            let b = chain.bbox();
            let cutoff = Plateau::new(b.expand(0.1), b.expand(0.4));
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let forms: Vec<SmoothForm> =
                (0..n).map(|_| random_polynomial_form(chain.dim(), chain.param_dim(), &cutoff, &mut rng)).collect();
            let mut per_eps = Vec::new();
            for eps in sched.epsilons() {
                let mut worst = 0.0f64;
                for phi in &forms {
                    let r = if check == CheckKind::Homotopy {
                        homotopy_terms(&chain, phi, eps, &data, opts)?.residual()
                    } else {
                        let (l, r) = dual_pair(&chain, phi, eps, &data, opts)?;
                        l - r
                    };
                    worst = worst.max(r.abs());
                }
                per_eps.push(worst);
            }
            let r = per_eps.iter().cloned().fold(0.0, f64::max);
            let mut o = Outcome::residual(raw_rows(sched, &per_eps), r);
            o.data_id = Some(data.id().to_string());
            o.details = serde_json::json!({ "forms": n, "per_eps_max": per_eps });
            Ok(o)
        }
        CheckKind::Commutativity => {
            let data = c.data(&t.derham, "derham")?;
            let r = check_graded_commutativity(&c.cur(&t.t1, "t1")?, &c.cur(&t.t2, "t2")?, c.form()?, &data, sched, opts)?;
            let d = difference(&r.forward, &r.backward, r.sign)?;
            let mut o = Outcome::residual(rows_of(&d), r.residual);
            o.data_id = Some(data.id().to_string());
            o.details = serde_json::json!({ "forward": r.forward.extrapolated, "backward": r.backward.extrapolated, "sign": r.sign });
            Ok(o)
        }
        CheckKind::Associativity => {
            let data = c.data(&t.derham, "derham")?;
            let r = check_associativity(
                &c.cur(&t.t1, "t1")?,
                &c.cur(&t.t2, "t2")?,
                &c.cur(&t.t3, "t3")?,
                c.form()?,
                &data,
                sched,
                opts,
            )?;
            let d = difference(&r.left, &r.right, r.sign)?;
            let mut o = Outcome::residual(rows_of(&d), r.residual);
            o.data_id = Some(data.id().to_string());
            o.details = serde_json::json!({ "left": r.left.extrapolated, "right": r.right.extrapolated, "sign": r.sign });
            Ok(o)
        }
        CheckKind::Closed => {
            let data = c.data(&t.derham, "derham")?;
            let l = check_closed(&c.cur(&t.t1, "t1")?, &c.cur(&t.t2, "t2")?, c.form()?, &data, sched, opts)?;
            let r = l.extrapolated.abs();
            let mut o = Outcome::residual(rows_of(&l), r);
            o.data_id = Some(data.id().to_string());
            Ok(o)
        }
        CheckKind::Projection => {
            let space = c.space()?;
            let r = projection_formula_check(&c.cur(&t.t1, "t1")?, &c.cur(&t.t2, "t2")?, c.form()?, &space, sched, opts)?;
            let d = difference(&r.lhs, &r.rhs, 1.0)?;
            let mut o = Outcome::residual(rows_of(&d), r.residual);
            o.data_id = Some(space.data.id().to_string());
            o.details = serde_json::json!({ "lhs": r.lhs.extrapolated, "rhs": r.rhs.extrapolated });
            Ok(o)
        }
        CheckKind::Spread => {
            let space = c.space()?;
            let (l, r) = spread_consistency(&c.cur(&t.t1, "t1")?, &c.cur(&t.t2, "t2")?, c.form()?, &space, sched, opts)?;
            let d = difference(&l, &r, 1.0)?;
            let mut o = Outcome::residual(rows_of(&d), (l.extrapolated - r.extrapolated).abs());
            o.data_id = Some(space.data.id().to_string());
            o.details = serde_json::json!({ "lhs": l.extrapolated, "rhs": r.extrapolated });
            Ok(o)
        }
        CheckKind::CylinderIdentity => {
            let space = c.space()?;
            let sigma = c.chain(&t.t2, "t2")?;
            let n = t.samples.unwrap_or(100);
            let mut worst = 0.0f64;
            let mut per_eps = Vec::new();
            for eps in sched.epsilons() {
                let mut e = 0.0f64;
                for f in [Factor::First, Factor::Second] {
                    if space.factor_data(f).dim() == sigma.dim() {
                        e = e.max(cylinder_identity_residual(&sigma, f, &space, eps, n, c.seed, opts)?);
                    }
                }
                worst = worst.max(e);
                per_eps.push(e);
            }
            let mut o = Outcome::residual(raw_rows(sched, &per_eps), worst);
            o.data_id = Some(space.data.id().to_string());
            o.details = serde_json::json!({ "points": n });
            Ok(o)
        }
        CheckKind::Boundary => {
            let k = CorrespondenceKernel::new(c.cur(&t.t1, "t1")?, true);
            let w = t.window.as_ref().expect("checked at resolution");
            let window = crate::geometry::BBox::new(w.lo.clone(), w.hi.clone());
            let r = k.boundary_residual(&window, t.samples.unwrap_or(5), c.seed, opts)?;
            Ok(Outcome::residual(Vec::new(), r))
        }
        CheckKind::Lebesgue => {
            let chain = c.chain(&t.t1, "t1")?;
            let rep = lebesgue_diagnostic(&chain, t.axes.as_ref().expect("checked at resolution"), t.grid.unwrap_or(32))?;
            let mut o = Outcome::residual(Vec::new(), 0.0);
            o.details = serde_json::to_value(&rep).expect("report serializes");
            o.advisory = true;
            o.note = Some(
                if rep.suspect_atom {
                    "suspected atom"
                } else if rep.integrable_singularity {
                    "unbounded but integrable density"
                } else {
                    "bounded density"
                }
                .to_string(),
            );
            Ok(o)
        }
    }
}

fn point_value(phi: &SmoothForm, p: &[f64], at: &str) -> Result<f64> {
    if phi.degree() != 0 || p.len() != phi.dim() {
        return Err(Error::Validation(format!("{at}: point oracle needs a 0-form and a point of ℝ^{}", phi.dim())));
    }
    Ok(phi.eval(p)[0])
}

fn oracle_value(c: &Ctx, spec: &OracleSpec) -> Result<f64> {
    let t = c.task;
    let at = format!("{}.oracle", c.at);
    match spec {
        OracleSpec::Value { value } => Ok(*value),
        OracleSpec::FormAt { point, coefficient } => Ok(coefficient * point_value(c.form()?, point, &at)?),
        OracleSpec::Transversal => {
            let pts = transversal_points(&c.chain(&t.t1, "t1")?, &c.chain(&t.t2, "t2")?)?;
            if t.kind == TaskKind::Kronecker {
                return Ok(pts.iter().map(|p| p.sign as f64 * p.weight).sum());
            }
            let phi = c.form()?;
            pts.iter()
                .map(|p| Ok(p.sign as f64 * p.weight * point_value(phi, &p.location, &at)?))
                .sum()
        }
        OracleSpec::ParabolaSelf => {
            let data = c.data(&t.derham, "derham")?;
            closed_form_parabola_self(&data.bumps()[0], c.form()?)
        }
        OracleSpec::Tangency { k } => {
            let data = c.data(&t.derham, "derham")?;
            let pred = tangency_closed_forms(*k, &data.bumps()[0])?;
            let phi = c.form()?;
            Ok(pred.coefficient * point_value(phi, &vec![0.0; phi.dim()], &at)?)
        }
        OracleSpec::Multiplicity { p, q, point, at: where_ } => {
            let p = poly_from_spec(2, p, &format!("{at}.p"))?;
            let q = poly_from_spec(2, q, &format!("{at}.q"))?;
            let mult = plane_curve_multiplicity(&p, &q, point)?;
            Ok(mult as f64 * point_value(c.form()?, where_, &at)?)
        }
        OracleSpec::Evaluate { current, form } => {
            let cur = c.world.current(current, &format!("{at}.current"))?;
            evaluate_with(&cur, c.world.form(form, &format!("{at}.form"))?, &c.opts)
        }
    }
}

fn run_task(world: &World, index: usize, task: &TaskSpec, run: &RunOptions) -> TaskReport {
    let start = Instant::now();
    let sc = &world.scenario;
    let tolerance = run.tol.or(task.tol).or(sc.tolerance).unwrap_or_else(|| default_tol(task));
    let schedule = match &task.schedule {
        Some(s) => EpsilonSchedule { eps0: s.eps0, ratio: s.ratio, count: s.count, tol: tolerance },
        None => EpsilonSchedule::standard(1.0).with_tol(tolerance),
    };
    let mut opts = QuadOptions::default();
    if let Some(q) = &sc.quadrature {
        opts = q.apply(opts);
    }
    if let Some(q) = &task.quadrature {
        opts = q.apply(opts);
    }
    opts.parallel = !run.serial;
    let seed = run.seed.unwrap_or(sc.seed).wrapping_add(index as u64);
    let ctx = Ctx { world, task, at: format!("tasks[{}]", task.name), schedule: schedule.clone(), opts: opts.clone(), seed };
    let environment = |data_id: Option<String>| Environment {
        schedule: schedule.clone(),
        nodes: opts.nodes,
        kernel_nodes: opts.kernel_nodes,
        leaf_scale: opts.leaf_scale,
        max_depth: opts.max_depth,
        bump_rule: (opts.bump_nodes, opts.bump_pieces),
        data_id,
        parallel: opts.parallel,
    };
    let mut report = TaskReport {
        name: task.name.clone(),
        kind: task.kind,
        check: task.check,
        rows: Vec::new(),
        extrapolated: None,
        error_estimate: None,
        verdict: None,
        oracle: None,
        residual: None,
        tolerance,
        pass: false,
        message: None,
        environment: environment(None),
        details: serde_json::Value::Null,
        seconds: 0.0,
    };
    let outcome = body(&ctx).and_then(|o| {
        let oracle = task.oracle.as_ref().map(|s| oracle_value(&ctx, s)).transpose()?;
        Ok((o, oracle))
    });
    match outcome {
        Ok((o, oracle)) => {
            report.rows = o.rows;
            report.message = o.note;
            report.details = o.details;
            report.environment = environment(o.data_id);
            report.oracle = oracle;
            if let Some(l) = &o.limit {
                report.extrapolated = Some(l.extrapolated);
                report.error_estimate = Some(l.error_estimate);
                report.verdict = Some(l.verdict);
            }
            let value = o.limit.as_ref().map(|l| l.extrapolated);
            let scale = |oracle: f64| -> f64 {
                if !task.relative {
                    return 1.0;
                }
                let sup = ctx.form().map(|f| f.sup_norm(9)).unwrap_or(1.0);
                // Oracles computed by quadrature are zero only up to rounding.
                if oracle.abs() > 1e-12 * sup {
                    oracle.abs()
                } else {
                    sup
                }
            };
            report.pass = match (value, oracle, o.residual) {
                (Some(v), Some(or), _) => {
                    let mismatch = (v - or).abs();
                    report.residual = Some(mismatch);
                    mismatch <= tolerance * scale(or)
                }
                (Some(_), None, _) => o.limit.as_ref().is_some_and(|l| l.is_converged()),
                (None, _, Some(r)) => {
                    report.residual = Some(r);
                    o.advisory || r <= tolerance
                }
                (None, _, None) => false,
            };
        }
        Err(e) => report.message = Some(e.to_string()),
    }
    report.seconds = start.elapsed().as_secs_f64();
    report
}

/// Runs every task in declaration order.
pub fn run_world(world: &World, run: &RunOptions) -> Report {
    let tasks: Vec<TaskReport> = world
        .scenario
        .tasks
        .iter()
        .enumerate()
        .map(|(i, t)| run_task(world, i, t, run))
        .collect();
    let passed = tasks.iter().all(|t| t.pass);
    Report {
        scenario: world.scenario.name.clone(),
        comment: world.scenario.comment.clone(),
        seed: run.seed.unwrap_or(world.scenario.seed),
        serial: run.serial,
        tasks,
        passed,
    }
}

/// Parses, resolves and runs a scenario file. Parse and validation errors
/// are returned; task failures are recorded in the report.
pub fn run_file(path: &Path, run: &RunOptions) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let world = resolve(parse(&text)?)?;
    Ok(run_world(&world, run))
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// The CSV body of one task's table.
pub fn csv_table(rows: &[Row]) -> String {
    let mut s = String::from("eps,raw_value,extrapolant,error_estimate\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", num(r.eps), num(r.raw_value), opt(r.extrapolant), opt(r.error_estimate)));
    }
    s
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// Writes `NN_<task>.csv` per task and `summary.json` into `dir`.
pub fn write_reports(report: &Report, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (i, t) in report.tasks.iter().enumerate() {
        let p = dir.join(format!("{:02}_{}.csv", i, file_stem(&t.name)));
        fs::write(&p, csv_table(&t.rows))?;
        written.push(p);
    }
    let p = dir.join("summary.json");
    fs::write(&p, serde_json::to_string_pretty(report).expect("report serializes"))?;
    written.push(p);
    Ok(written)
}

/// One line per task for the terminal.
pub fn summary_lines(report: &Report) -> Vec<String> {
    report
        .tasks
        .iter()
        .map(|t| {
            let status = if t.pass { "PASS" } else { "FAIL" };
            let value = t.extrapolated.or(t.residual).map(|v| format!("{v:.10e}")).unwrap_or_else(|| "-".into());
            let oracle = t.oracle.map(|v| format!(" oracle {v:.10e}")).unwrap_or_default();
            let msg = t.message.as_ref().map(|m| format!(" ({m})")).unwrap_or_default();
            format!("{status} {:<28} {value}{oracle} [{:.1}s]{msg}", t.name, t.seconds)
        })
        .collect()
}

#[derive(Serialize)]
struct Builtin {
    bumps: Vec<(String, String)>,
    charts: Vec<(String, String)>,
    tasks: Vec<(String, String)>,
    checks: Vec<(String, String)>,
}

/// Bump profiles, chart kinds, task kinds and property checks.
pub fn list_builtin(json: bool) -> String {
    let pairs = |v: &[(&str, &str)]| v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect::<Vec<_>>();
    let b = Builtin {
        bumps: pairs(&BUMP_NAMES),
        charts: pairs(&CHART_KINDS),
        tasks: TaskKind::ALL.iter().map(|(_, a, b)| (a.to_string(), b.to_string())).collect(),
        checks: CheckKind::ALL.iter().map(|(_, a, b)| (a.to_string(), b.to_string())).collect(),
    };
    if json {
        return serde_json::to_string_pretty(&b).expect("static data serializes");
    }
    let mut s = String::new();
    for (title, items) in [("bump profiles", &b.bumps), ("chart kinds", &b.charts), ("task kinds", &b.tasks), ("property checks", &b.checks)] {
        s.push_str(title);
        s.push_str(":\n");
        for (n, d) in items {
            s.push_str(&format!("  {n:<18} {d}\n"));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_follow_the_deepest_level() {
        let s = EpsilonSchedule::new(0.2, 0.5, 6, 1e-6).unwrap();
        let raw: Vec<f64> = s.epsilons().iter().map(|e| 1.0 + e).collect();
        let l = extrapolate(&s, raw).unwrap();
        let rows = rows_of(&l);
        assert_eq!(rows.len(), 6);
        assert!(rows[0].extrapolant.is_none() && rows[1].extrapolant.is_none());
        assert!(rows[2].extrapolant.is_some());
        assert!((rows[5].extrapolant.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let t = csv_table(&[Row { eps: 0.1, raw_value: 1.0 / 3.0, extrapolant: None, error_estimate: None }]);
        assert_eq!(t.lines().nth(1).unwrap(), "1.0000000000000001e-1,3.3333333333333331e-1,,");
    }

    #[test]
    fn builtin_lists_bumps() {
        let s = list_builtin(false);
        for b in ["smooth-radial", "poly4", "skewed-radial"] {
            assert!(s.contains(b));
        }
        let v: serde_json::Value = serde_json::from_str(&list_builtin(true)).unwrap();
        assert_eq!(v["bumps"].as_array().unwrap().len(), 3);
    }
}
