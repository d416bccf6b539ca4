//! Declarative scenario files: the JSON schema and its resolution into
//! chains, forms and de Rham data.
//!
//! Polynomials are lists of `[coefficient, [exponents…]]` pairs. Every
//! object is named; tasks refer to objects by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bump::BumpProfile;
use crate::chain::{Cell, CellChain};
use crate::charts::{Chart, ChartMap, DeRhamData};
use crate::current::Current;
use crate::error::{Error, Result};
use crate::form::SmoothForm;
use crate::geometry::{BBox, Plateau};
use crate::integrate::QuadOptions;
use crate::limit::EpsilonSchedule;
use crate::poly::Poly;
use crate::scalar::ScalarField;

pub const SCHEMA_VERSION: u32 = 1;

pub type PolySpec = Vec<(f64, Vec<u32>)>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub comment: String,
    pub dimension: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub quadrature: Option<QuadSpec>,
    #[serde(default)]
    pub chains: Vec<ChainSpec>,
    #[serde(default)]
    pub forms: Vec<FormSpec>,
    #[serde(default)]
    pub derham: Vec<DerhamSpec>,
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxSpec {
    fn to_box(&self, dim: usize, at: &str) -> Result<BBox> {
        if self.lo.len() != dim || self.hi.len() != dim {
            return Err(Error::Validation(format!("{at}: box corners must have {dim} coordinates")));
        }
        if self.lo.iter().zip(&self.hi).any(|(a, b)| a > b) {
            return Err(Error::Validation(format!("{at}: box has lo > hi")));
        }
        Ok(BBox::new(self.lo.clone(), self.hi.clone()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateauSpec {
    pub inner: BoxSpec,
    pub outer: BoxSpec,
}

impl PlateauSpec {
    fn to_plateau(&self, dim: usize, at: &str) -> Result<Plateau> {
        let inner = self.inner.to_box(dim, &format!("{at}.inner"))?;
        let outer = self.outer.to_box(dim, &format!("{at}.outer"))?;
        if !outer.contains_box(&inner) {
            return Err(Error::Validation(format!("{at}: inner box not inside outer box")));
        }
        Ok(Plateau::new(inner, outer))
    }
}

fn one() -> f64 {
    1.0
}

fn plus() -> i8 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CellSpec {
    Polynomial {
        map: Vec<PolySpec>,
        #[serde(default = "one")]
        weight: f64,
        #[serde(default = "plus")]
        orientation: i8,
    },
    Segment {
        from: Vec<f64>,
        to: Vec<f64>,
        #[serde(default = "one")]
        weight: f64,
    },
    Point {
        at: Vec<f64>,
        #[serde(default = "one")]
        weight: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default = "one")]
        weight: f64,
        #[serde(default = "plus")]
        orientation: i8,
    },
    /// Two parabolic arcs forming a closed counter-clockwise curve.
    Lens {
        center: Vec<f64>,
        half_width: f64,
        height: f64,
        #[serde(default = "one")]
        weight: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub name: String,
    /// Ambient dimension; defaults to the scenario's.
    #[serde(default)]
    pub dim: Option<usize>,
    pub cells: Vec<CellSpec>,
    /// The chain is a finite piece of an unbounded object.
    #[serde(default)]
    pub truncated: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub index: Vec<usize>,
    /// Defaults to the constant 1.
    #[serde(default)]
    pub poly: Option<PolySpec>,
    #[serde(default)]
    pub cutoff: Option<PlateauSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub name: String,
    #[serde(default)]
    pub dim: Option<usize>,
    pub degree: usize,
    pub terms: Vec<TermSpec>,
    #[serde(default)]
    pub support: Option<BoxSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub name: String,
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub tilt: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    /// `z ↦ A z + b`, `A` row-major.
    Affine { a: Vec<f64>, b: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    #[serde(default)]
    pub map: Option<MapSpec>,
    /// Defaults to the constant 1.
    #[serde(default)]
    pub cutoff: Option<PlateauSpec>,
    pub bump: BumpSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerhamSpec {
    pub name: String,
    #[serde(default)]
    pub dim: Option<usize>,
    pub charts: Vec<ChartSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    pub nodes: Option<usize>,
    pub kernel_nodes: Option<usize>,
    pub leaf_scale: Option<f64>,
    pub rel_tol: Option<f64>,
    pub bump_nodes: Option<usize>,
    pub bump_pieces: Option<usize>,
}

impl QuadSpec {
    pub fn apply(&self, mut o: QuadOptions) -> QuadOptions {
        if let Some(v) = self.nodes {
            o.nodes = v;
        }
        if let Some(v) = self.kernel_nodes {
            o.kernel_nodes = v;
        }
        if let Some(v) = self.leaf_scale {
            o.leaf_scale = v;
        }
        if let Some(v) = self.rel_tol {
            o.rel_tol = v;
        }
        if let Some(v) = self.bump_nodes {
            o.bump_nodes = v;
        }
        if let Some(v) = self.bump_pieces {
            o.bump_pieces = v;
        }
        o
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Intersect,
    Kronecker,
    Triple,
    PropertyCheck,
    Correspondence,
    Slice,
}

impl TaskKind {
    pub const ALL: [(TaskKind, &'static str, &'static str); 6] = [
        (TaskKind::Intersect, "intersect", "extrapolated [T1∧T2](φ)"),
        (TaskKind::Kronecker, "kronecker", "[T1∧T2](1) for closed currents of complementary degree"),
        (TaskKind::Triple, "triple", "[[T1∧T2]∧T3](φ) with nested smoothing scales"),
        (TaskKind::PropertyCheck, "property-check", "residual of an identity (see `check`)"),
        (TaskKind::Correspondence, "correspondence", "pull-back or push-forward through a current on a product"),
        (TaskKind::Slice, "slice", "member of a family of currents at a parameter value"),
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Homotopy,
    Dual,
    Commutativity,
    Associativity,
    Closed,
    Projection,
    CylinderIdentity,
    Boundary,
    Spread,
    Lebesgue,
}

impl CheckKind {
    pub const ALL: [(CheckKind, &'static str, &'static str); 10] = [
        (CheckKind::Homotopy, "homotopy", "R T − T − A bT − b A T on seeded forms, every ε"),
        (CheckKind::Dual, "dual", "∫ R T ∧ φ against T(R^*φ), every ε"),
        (CheckKind::Commutativity, "commutativity", "[T1∧T2] − (−1)^{ij}[T2∧T1]"),
        (CheckKind::Associativity, "associativity", "[[T1∧T2]∧T3] − [T1∧[T2∧T3]]"),
        (CheckKind::Closed, "closed", "[T1∧T2](dψ) for closed currents"),
        (CheckKind::Projection, "projection", "[(P₂)_*T ∧ σ] − (P₂)_*[T ∧ (X₁×σ)]"),
        (CheckKind::CylinderIdentity, "cylinder-identity", "product-kernel cylinder against the pulled-back factor smoothing"),
        (CheckKind::Boundary, "boundary", "|F(dψ)| for a current declared closed"),
        (CheckKind::Spread, "spread", "(P_X)_*[I∧(S×W)] − [(P_X)_*I∧W]"),
        (CheckKind::Lebesgue, "lebesgue", "projected mass density (advisory)"),
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrespondenceOp {
    PullBack,
    PushForward,
}

/// Expected value of a task.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OracleSpec {
    Value { value: f64 },
    /// `coefficient · φ(point)` for a 0-form `φ`.
    FormAt {
        point: Vec<f64>,
        #[serde(default = "one")]
        coefficient: f64,
    },
    /// Signed crossings of `t1` and `t2` weighted by `φ` (or counted, for
    /// Kronecker tasks).
    Transversal,
    /// The closed-form limit for a parabola against itself.
    ParabolaSelf,
    /// `coefficient(k) · φ(0)` for the curve `x₁ = x₂^k` against `x₁ = 0`.
    Tangency { k: u32 },
    /// `mult · φ(at)` with `mult` the exact multiplicity of `p = q = 0` at
    /// `point`.
    Multiplicity { p: PolySpec, q: PolySpec, point: Vec<f64>, at: Vec<f64> },
    /// Direct evaluation `current(form)`.
    Evaluate { current: String, form: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub name: String,
    pub kind: TaskKind,
    #[serde(default)]
    pub check: Option<CheckKind>,
    #[serde(default)]
    pub op: Option<CorrespondenceOp>,
    #[serde(default)]
    pub t1: Option<String>,
    #[serde(default)]
    pub t2: Option<String>,
    #[serde(default)]
    pub t3: Option<String>,
    #[serde(default)]
    pub form: Option<String>,
    #[serde(default)]
    pub derham: Option<String>,
    /// Data on the first and second factor for product tasks.
    #[serde(default)]
    pub x_derham: Option<String>,
    #[serde(default)]
    pub y_derham: Option<String>,
    /// Slice parameter.
    #[serde(default)]
    pub at: Option<Vec<f64>>,
    #[serde(default)]
    pub window: Option<BoxSpec>,
    #[serde(default)]
    pub axes: Option<Vec<usize>>,
    #[serde(default)]
    pub grid: Option<usize>,
    /// Random test forms (or sample points) for property checks.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub oracle: Option<OracleSpec>,
    #[serde(default)]
    pub tol: Option<f64>,
    /// Compare with the oracle relative to its magnitude.
    #[serde(default)]
    pub relative: bool,
    #[serde(default)]
    pub quadrature: Option<QuadSpec>,
}

/// A scenario with every name resolved.
pub struct World {
    pub scenario: Scenario,
    pub chains: BTreeMap<String, CellChain>,
    pub forms: BTreeMap<String, SmoothForm>,
    pub derham: BTreeMap<String, Arc<DeRhamData>>,
}

impl World {
    pub fn chain(&self, name: &str, at: &str) -> Result<&CellChain> {
        self.chains
            .get(name)
            .ok_or_else(|| Error::Validation(format!("{at}: no chain named '{name}'")))
    }

    pub fn current(&self, name: &str, at: &str) -> Result<Current> {
        if let Some(c) = self.chains.get(name) {
            return Ok(Current::Chain(c.clone()));
        }
        if let Some(f) = self.forms.get(name) {
            return Ok(Current::Form(f.clone()));
        }
        Err(Error::Validation(format!("{at}: no chain or form named '{name}'")))
    }

    pub fn form(&self, name: &str, at: &str) -> Result<&SmoothForm> {
        self.forms
            .get(name)
            .ok_or_else(|| Error::Validation(format!("{at}: no form named '{name}'")))
    }

    pub fn data(&self, name: &str, at: &str) -> Result<&Arc<DeRhamData>> {
        self.derham
            .get(name)
            .ok_or_else(|| Error::Validation(format!("{at}: no de Rham data named '{name}'")))
    }
}

/// Parses a scenario; errors carry the line and column.
pub fn parse(text: &str) -> Result<Scenario> {
    let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if s.schema != SCHEMA_VERSION {
        return Err(Error::Parse(format!("schema version {} (this build reads {SCHEMA_VERSION})", s.schema)));
    }
    Ok(s)
}

pub fn poly_from_spec(nvars: usize, spec: &PolySpec, at: &str) -> Result<Poly> {
    for (c, e) in spec {
        if e.len() != nvars {
            return Err(Error::Validation(format!("{at}: exponent tuple {e:?} for {nvars} variables")));
        }
        if !c.is_finite() {
            return Err(Error::Validation(format!("{at}: non-finite coefficient")));
        }
    }
    Ok(Poly::from_terms(nvars, spec.iter().map(|(c, e)| (e.clone(), *c)).collect()))
}

fn check_point(p: &[f64], dim: usize, at: &str) -> Result<()> {
    if p.len() != dim {
        return Err(Error::Validation(format!("{at}: point with {} coordinates in ℝ^{dim}", p.len())));
    }
    Ok(())
}

fn build_cells(spec: &CellSpec, dim: usize, at: &str) -> Result<Vec<Cell>> {
    let wrap = |e: Error| Error::Validation(format!("{at}: {e}"));
    match spec {
        CellSpec::Polynomial { map, weight, orientation } => {
            if map.len() != dim {
                return Err(Error::Validation(format!("{at}: map has {} components in ℝ^{dim}", map.len())));
            }
            let k = map.first().and_then(|p| p.first()).map_or(0, |t| t.1.len());
            let polys = map
                .iter()
                .enumerate()
                .map(|(i, p)| poly_from_spec(k, p, &format!("{at}.map[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![Cell::new(polys, *weight, *orientation).map_err(wrap)?])
        }
        CellSpec::Segment { from, to, weight } => {
            check_point(from, dim, &format!("{at}.from"))?;
            check_point(to, dim, &format!("{at}.to"))?;
            let mut c = Cell::segment(from, to).map_err(wrap)?;
            c.weight = *weight;
            Ok(vec![c])
        }
        CellSpec::Point { at: p, weight } => {
            check_point(p, dim, &format!("{at}.at"))?;
            Ok(vec![Cell::point(p, *weight)])
        }
        CellSpec::Box { lo, hi, weight, orientation } => {
            let b = BoxSpec { lo: lo.clone(), hi: hi.clone() }.to_box(dim, at)?;
            let mut c = Cell::from_box(&b).map_err(wrap)?;
            c.weight = *weight;
            if *orientation == -1 {
                c = c.flipped();
            }
            Ok(vec![c])
        }
        CellSpec::Lens { center, half_width, height, weight } => {
            if dim != 2 {
                return Err(Error::Validation(format!("{at}: lenses live in the plane")));
            }
            let l = CellChain::lens(center, *half_width, *height).map_err(wrap)?;
            Ok(l.scale(*weight).cells().to_vec())
        }
    }
}

fn build_chain(spec: &ChainSpec, dim: usize) -> Result<CellChain> {
    let at = format!("chains[{}]", spec.name);
    if spec.cells.is_empty() {
        return Err(Error::Validation(format!("{at}: chain without cells")));
    }
    let mut cells = Vec::new();
    for (i, c) in spec.cells.iter().enumerate() {
        cells.extend(build_cells(c, dim, &format!("{at}.cells[{i}]"))?);
    }
    let k = cells[0].param_dim();
    let chain = CellChain::new(dim, k, cells).map_err(|e| Error::Validation(format!("{at}: {e}")))?;
    Ok(if spec.truncated { chain.truncated() } else { chain })
}

fn build_form(spec: &FormSpec, dim: usize) -> Result<SmoothForm> {
    let at = format!("forms[{}]", spec.name);
    let mut terms = Vec::new();
    for (i, t) in spec.terms.iter().enumerate() {
        let tat = format!("{at}.terms[{i}]");
        let poly = match &t.poly {
            Some(p) => poly_from_spec(dim, p, &format!("{tat}.poly"))?,
            None => Poly::constant(dim, 1.0),
        };
        let f = match &t.cutoff {
            Some(c) => ScalarField::poly_cutoff(poly, c.to_plateau(dim, &format!("{tat}.cutoff"))?),
            None => ScalarField::Poly(poly),
        };
        terms.push((t.index.clone(), f));
    }
    let mut f = SmoothForm::new(dim, spec.degree, terms).map_err(|e| Error::Validation(format!("{at}: {e}")))?;
    if let Some(b) = &spec.support {
        f = f.with_support(b.to_box(dim, &format!("{at}.support"))?);
    }
    Ok(f)
}

pub fn build_bump(spec: &BumpSpec, dim: usize, at: &str) -> Result<BumpProfile> {
    let wrap = |e: Error| Error::Validation(format!("{at}: {e}"));
    match spec.name.as_str() {
        "smooth-radial" => Ok(BumpProfile::smooth_radial(dim)),
        "poly4" => Ok(BumpProfile::poly4(dim)),
        "skewed-radial" => {
            let (Some(c), Some(r), Some(t)) = (&spec.center, spec.radius, &spec.tilt) else {
                return Err(Error::Validation(format!("{at}: skewed-radial needs center, radius and tilt")));
            };
            if c.len() != dim {
                return Err(Error::Validation(format!("{at}.center: expected {dim} coordinates")));
            }
            BumpProfile::skewed(c.clone(), r, t.clone()).map_err(wrap)
        }
        other => Err(Error::Validation(format!(
            "{at}.name: unknown bump profile '{other}' (known: {})",
            BUMP_NAMES.iter().map(|b| b.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}

pub const BUMP_NAMES: [(&str, &str); 3] = [
    ("smooth-radial", "exp(1/(|x|²−1)) on the unit ball, normalized"),
    ("poly4", "(1−|x|²)^4 on the unit ball, normalized"),
    ("skewed-radial", "shifted, tilted smooth bump (center, radius, tilt); not symmetric"),
];

pub const CHART_KINDS: [(&str, &str); 2] = [
    ("identity", "the identity map"),
    ("affine", "z ↦ A z + b with invertible A (row-major `a`, offset `b`)"),
];

fn build_data(spec: &DerhamSpec, dim: usize) -> Result<DeRhamData> {
    let at = format!("derham[{}]", spec.name);
    if spec.charts.is_empty() {
        return Err(Error::Validation(format!("{at}: {}", Error::ChartCountZero)));
    }
    let mut charts = Vec::new();
    let mut bumps = Vec::new();
    for (i, c) in spec.charts.iter().enumerate() {
        let cat = format!("{at}.charts[{i}]");
        let map = match &c.map {
            None | Some(MapSpec::Identity) => ChartMap::identity(dim),
            Some(MapSpec::Affine { a, b }) => {
                if a.len() != dim * dim || b.len() != dim {
                    return Err(Error::Validation(format!("{cat}.map: affine map of the wrong size")));
                }
                ChartMap::affine(a.clone(), b.clone()).map_err(|e| Error::Validation(format!("{cat}.map: {e}")))?
            }
        };
        let cutoff = match &c.cutoff {
            Some(p) => p.to_plateau(dim, &format!("{cat}.cutoff"))?,
            None => Plateau::everywhere(dim),
        };
        charts.push(Chart { id: i, map, cutoff });
        bumps.push(build_bump(&c.bump, dim, &format!("{cat}.bump"))?);
    }
    DeRhamData::new(dim, charts, bumps)
        .map(|d| d.with_label(spec.name.clone()))
        .map_err(|e| Error::Validation(format!("{at}: {e}")))
}

fn unique<'a>(kind: &str, names: impl Iterator<Item = &'a String>) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::Validation(format!("{kind}: duplicate name '{n}'")));
        }
    }
    Ok(())
}

/// Builds every object and checks that tasks refer to existing names.
pub fn resolve(scenario: Scenario) -> Result<World> {
    let m = scenario.dimension;
    if m == 0 || m > 8 {
        return Err(Error::Validation(format!("dimension: {m} is outside 1..=8")));
    }
    unique("chains", scenario.chains.iter().map(|c| &c.name))?;
    unique("forms", scenario.forms.iter().map(|c| &c.name))?;
    unique("derham", scenario.derham.iter().map(|c| &c.name))?;
    unique("tasks", scenario.tasks.iter().map(|c| &c.name))?;
    let mut chains = BTreeMap::new();
    for c in &scenario.chains {
        chains.insert(c.name.clone(), build_chain(c, c.dim.unwrap_or(m))?);
    }
    let mut forms = BTreeMap::new();
    for f in &scenario.forms {
        if chains.contains_key(&f.name) {
            return Err(Error::Validation(format!("forms[{}]: name already used by a chain", f.name)));
        }
        forms.insert(f.name.clone(), build_form(f, f.dim.unwrap_or(m))?);
    }
    let mut derham = BTreeMap::new();
    for d in &scenario.derham {
        derham.insert(d.name.clone(), Arc::new(build_data(d, d.dim.unwrap_or(m))?));
    }
    let world = World { scenario, chains, forms, derham };
    for t in &world.scenario.tasks {
        check_task(&world, t)?;
    }
    Ok(world)
}

fn need<'a>(v: &'a Option<String>, field: &str, at: &str) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| Error::Validation(format!("{at}.{field}: required for this task")))
}

/// Name and dimension checks done before anything runs.
fn check_task(w: &World, t: &TaskSpec) -> Result<()> {
    let at = format!("tasks[{}]", t.name);
    let cur = |f: &Option<String>, field: &str| -> Result<Current> {
        w.current(need(f, field, &at)?, &format!("{at}.{field}"))
    };
    let form = |f: &Option<String>| -> Result<&SmoothForm> { w.form(need(f, "form", &at)?, &format!("{at}.form")) };
    let data = |f: &Option<String>, field: &str| -> Result<&Arc<DeRhamData>> {
        w.data(need(f, field, &at)?, &format!("{at}.{field}"))
    };
    if let Some(s) = &t.schedule {
        EpsilonSchedule::new(s.eps0, s.ratio, s.count, 1.0).map_err(|e| Error::Validation(format!("{at}.schedule: {e}")))?;
    }
    if let Some(tol) = t.tol {
        if !(tol > 0.0) {
            return Err(Error::Validation(format!("{at}.tol: must be positive")));
        }
    }
    let same_dim = |cs: &[&Current], d: &DeRhamData| -> Result<()> {
        for c in cs {
            if c.dim() != d.dim() {
                return Err(Error::Validation(format!(
                    "{at}: current on ℝ^{} with de Rham data on ℝ^{}",
                    c.dim(),
                    d.dim()
                )));
            }
        }
        Ok(())
    };
    match t.kind {
        TaskKind::Intersect => {
            let (a, b) = (cur(&t.t1, "t1")?, cur(&t.t2, "t2")?);
            form(&t.form)?;
            same_dim(&[&a, &b], data(&t.derham, "derham")?)?;
        }
        TaskKind::Kronecker => {
            let (a, b) = (cur(&t.t1, "t1")?, cur(&t.t2, "t2")?);
            same_dim(&[&a, &b], data(&t.derham, "derham")?)?;
        }
        TaskKind::Triple => {
            let (a, b, c) = (cur(&t.t1, "t1")?, cur(&t.t2, "t2")?, cur(&t.t3, "t3")?);
            form(&t.form)?;
            same_dim(&[&a, &b, &c], data(&t.derham, "derham")?)?;
        }
        TaskKind::Correspondence => {
            if t.op.is_none() {
                return Err(Error::Validation(format!("{at}.op: required (pull-back or push-forward)")));
            }
            cur(&t.t1, "t1")?;
            cur(&t.t2, "t2")?;
            form(&t.form)?;
            data(&t.x_derham, "x_derham")?;
            data(&t.y_derham, "y_derham")?;
        }
        TaskKind::Slice => {
            cur(&t.t1, "t1")?;
            form(&t.form)?;
            data(&t.x_derham, "x_derham")?;
            data(&t.y_derham, "y_derham")?;
            if t.at.is_none() {
                return Err(Error::Validation(format!("{at}.at: required for slices")));
            }
        }
        TaskKind::PropertyCheck => {
            let check = t
                .check
                .ok_or_else(|| Error::Validation(format!("{at}.check: required for property checks")))?;
            match check {
                CheckKind::Homotopy | CheckKind::Dual => {
                    w.chain(need(&t.t1, "t1", &at)?, &format!("{at}.t1"))?;
                    data(&t.derham, "derham")?;
                }
                CheckKind::Commutativity | CheckKind::Closed => {
                    let (a, b) = (cur(&t.t1, "t1")?, cur(&t.t2, "t2")?);
                    form(&t.form)?;
                    same_dim(&[&a, &b], data(&t.derham, "derham")?)?;
                }
                CheckKind::Associativity => {
                    let (a, b, c) = (cur(&t.t1, "t1")?, cur(&t.t2, "t2")?, cur(&t.t3, "t3")?);
                    form(&t.form)?;
                    same_dim(&[&a, &b, &c], data(&t.derham, "derham")?)?;
                }
                CheckKind::Projection | CheckKind::Spread => {
                    cur(&t.t1, "t1")?;
                    cur(&t.t2, "t2")?;
                    form(&t.form)?;
                    data(&t.x_derham, "x_derham")?;
                    data(&t.y_derham, "y_derham")?;
                }
                CheckKind::CylinderIdentity => {
                    w.chain(need(&t.t2, "t2", &at)?, &format!("{at}.t2"))?;
                    data(&t.x_derham, "x_derham")?;
                    data(&t.y_derham, "y_derham")?;
                }
                CheckKind::Boundary => {
                    cur(&t.t1, "t1")?;
                    if t.window.is_none() {
                        return Err(Error::Validation(format!("{at}.window: required for boundary checks")));
                    }
                }
                CheckKind::Lebesgue => {
                    let c = w.chain(need(&t.t1, "t1", &at)?, &format!("{at}.t1"))?;
                    let axes = t
                        .axes
                        .as_ref()
                        .ok_or_else(|| Error::Validation(format!("{at}.axes: required for the Lebesgue check")))?;
                    if axes.len() != c.param_dim() || axes.iter().any(|&a| a >= c.dim()) {
                        return Err(Error::Validation(format!("{at}.axes: must select {} axes of ℝ^{}", c.param_dim(), c.dim())));
                    }
                }
            }
        }
    }
    if let Some(OracleSpec::Evaluate { current, form: f }) = &t.oracle {
        w.current(current, &format!("{at}.oracle.current"))?;
        w.form(f, &format!("{at}.oracle.form"))?;
    }
    if let Some(q) = &t.quadrature {
        if q.nodes == Some(0) || q.kernel_nodes == Some(0) || q.bump_nodes == Some(0) || q.bump_pieces == Some(0) {
            return Err(Error::Validation(format!("{at}.quadrature: node counts must be positive")));
        }
    }
    Ok(())
}
