//! Currents on products: projection push-forwards, correspondences and
//! families of currents.
//!
//! Cylinders `X × T` and `T × Y` are never built as cells. Their
//! regularizations are pullbacks of the factor regularization,
//! `R(X × σ) = P_Y^*(R^Y σ)` and `R(T × Y) = P_X^*(R^X T)`, which fixes the
//! orientation of `X × σ` to be `(-1)^{m₁ p}` times the product orientation
//! (`p` the degree of `σ`). [`CylinderField`] evaluates the product kernel
//! on the cylinder directly and [`cylinder_identity_residual`] checks the two
//! agree.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{CellChain, PointMass};
use crate::charts::DeRhamData;
use crate::current::{evaluate_field, Current};
use crate::error::{Error, Result};
use crate::exterior::{binomial, chain_minor_vector};
use crate::form::{exterior_derivative, random_polynomial_form, FormField, ProjectedField, SmoothForm, WedgeField};
use crate::geometry::{BBox, Plateau};
use crate::integrate::{cell_nodes, QuadOptions};
use crate::limit::{limit_of, EpsilonLimit, EpsilonSchedule};
use crate::poly::Poly;
use crate::smoothing::{leaves_of, regularize_with, MollifiedForm};

/// Which factor of `X × Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// `X × Y = ℝ^{m₁} × ℝ^{m₂}` with de Rham data on each factor and their
/// product.
#[derive(Clone, Debug)]
pub struct ProductSpace {
    pub x: Arc<DeRhamData>,
    pub y: Arc<DeRhamData>,
    pub data: Arc<DeRhamData>,
}

impl ProductSpace {
    pub fn new(x: Arc<DeRhamData>, y: Arc<DeRhamData>) -> Result<Self> {
        let data = Arc::new(DeRhamData::product(&x, &y)?);
        Ok(ProductSpace { x, y, data })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x.dim(), self.y.dim())
    }

    pub fn dim(&self) -> usize {
        self.x.dim() + self.y.dim()
    }

    /// Coordinates of the given factor inside the product.
    pub fn axes(&self, f: Factor) -> Vec<usize> {
        let (m1, m2) = self.dims();
        match f {
            Factor::First => (0..m1).collect(),
            Factor::Second => (m1..m1 + m2).collect(),
        }
    }

    pub fn factor_data(&self, f: Factor) -> &Arc<DeRhamData> {
        match f {
            Factor::First => &self.x,
            Factor::Second => &self.y,
        }
    }

    fn factor_dim(&self, f: Factor) -> usize {
        self.factor_data(f).dim()
    }

    /// `P^*ω` for a field on the given factor.
    pub fn pull(&self, f: Factor, field: Arc<dyn FormField>) -> Result<Arc<dyn FormField>> {
        if field.dim() != self.factor_dim(f) {
            return Err(Error::DimensionMismatch(format!(
                "form on ℝ^{} pulled back from a factor ℝ^{}",
                field.dim(),
                self.factor_dim(f)
            )));
        }
        Ok(Arc::new(ProjectedField { inner: field, axes: self.axes(f), ambient: self.dim() }))
    }

    /// Graph `{(x, f(x))}` of a polynomial map over a chain of `X`.
    pub fn graph(&self, base: &CellChain, f: &[Poly]) -> Result<CellChain> {
        let (m1, m2) = self.dims();
        if base.dim() != m1 || f.len() != m2 || f.iter().any(|p| p.nvars() != m1) {
            return Err(Error::DimensionMismatch("graph map does not match the factors".into()));
        }
        let mut map: Vec<Poly> = (0..m1).map(|i| Poly::var(m1, i)).collect();
        map.extend(f.iter().cloned());
        base.push_forward(&map)
    }

    /// The diagonal over a chain of `X` (requires `X = Y`).
    pub fn diagonal(&self, base: &CellChain) -> Result<CellChain> {
        let (m1, m2) = self.dims();
        if m1 != m2 {
            return Err(Error::DimensionMismatch("diagonal of factors of different dimension".into()));
        }
        let id: Vec<Poly> = (0..m1).map(|i| Poly::var(m1, i)).collect();
        self.graph(base, &id)
    }
}

/// A current on `X × Y` acting as a correspondence.
#[derive(Clone)]
pub struct CorrespondenceKernel {
    pub current: Current,
    pub declared_closed: bool,
}

impl CorrespondenceKernel {
    pub fn new(current: Current, declared_closed: bool) -> Self {
        CorrespondenceKernel { current, declared_closed }
    }

    /// `max |F(dψ)| / sup|ψ|` over `samples` random polynomial forms cut off
    /// to `window`, which should avoid any truncation boundary of `F`.
    pub fn boundary_residual(&self, window: &BBox, samples: usize, seed: u64, opts: &QuadOptions) -> Result<f64> {
        let m = self.current.dim();
        let k = self.current.current_dim();
        if k == 0 {
            return Ok(0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cutoff = Plateau::new(window.expand(-0.1 * window.diameter() / (m as f64).sqrt()), window.clone());
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let psi = random_polynomial_form(m, k - 1, &cutoff, &mut rng);
            let d = exterior_derivative(&psi);
            let v = evaluate_field(&self.current, Arc::new(d), opts)?;
            worst = worst.max(v.abs() / psi.sup_norm(6).max(1e-300));
        }
        Ok(worst)
    }
}

/// `(P_*T)(φ) = T(P^*φ)` for `T` on `X × Y` and `φ` on one factor.
#[derive(Clone)]
pub struct ProjectedCurrent {
    pub current: Current,
    pub space: ProductSpace,
    pub target: Factor,
}

/// The push-forward of `T` to the `target` factor, as a functional.
pub fn pushforward_projection(t: &Current, space: &ProductSpace, target: Factor) -> Result<ProjectedCurrent> {
    if t.dim() != space.dim() {
        return Err(Error::DimensionMismatch(format!(
            "current on ℝ^{} projected from ℝ^{}",
            t.dim(),
            space.dim()
        )));
    }
    Ok(ProjectedCurrent { current: t.clone(), space: space.clone(), target })
}

impl ProjectedCurrent {
    /// Dimension of the projected current.
    pub fn current_dim(&self) -> usize {
        self.current.current_dim()
    }

    pub fn evaluate_field(&self, phi: Arc<dyn FormField>, opts: &QuadOptions) -> Result<f64> {
        if phi.degree() != self.current.current_dim() {
            return Err(Error::DimensionMismatch(format!(
                "projected current of dimension {} evaluated on a form of degree {}",
                self.current.current_dim(),
                phi.degree()
            )));
        }
        let pulled = self.space.pull(self.target, phi)?;
        evaluate_field(&self.current, pulled, opts)
    }

    pub fn evaluate(&self, phi: &SmoothForm, opts: &QuadOptions) -> Result<f64> {
        self.evaluate_field(Arc::new(phi.clone()), opts)
    }
}

/// `∫_F P_a^*(R^a T) ∧ P_b^*φ`, the common core of pull-back and push-forward.
fn cylinder_pairing(
    f: &CorrespondenceKernel,
    t: &Current,
    t_factor: Factor,
    phi: &SmoothForm,
    space: &ProductSpace,
    eps: f64,
    opts: &QuadOptions,
) -> Result<f64> {
    let other = match t_factor {
        Factor::First => Factor::Second,
        Factor::Second => Factor::First,
    };
    let rt = regularize_with(t, eps, space.factor_data(t_factor), opts)?;
    let a = space.pull(t_factor, Arc::new(rt))?;
    let b = space.pull(other, Arc::new(phi.clone()))?;
    evaluate_field(&f.current, Arc::new(WedgeField { a, b }), opts)
}

fn check_cylinder(
    f: &CorrespondenceKernel,
    t: &Current,
    t_factor: Factor,
    phi: &SmoothForm,
    space: &ProductSpace,
) -> Result<()> {
    let other = match t_factor {
        Factor::First => Factor::Second,
        Factor::Second => Factor::First,
    };
    if f.current.dim() != space.dim() {
        return Err(Error::DimensionMismatch("correspondence not on the product space".into()));
    }
    if t.dim() != space.factor_dim(t_factor) || phi.dim() != space.factor_dim(other) {
        return Err(Error::DimensionMismatch("current or test form on the wrong factor".into()));
    }
    let need = f.current.current_dim() as i64 - t.degree() as i64;
    if need < 0 {
        return Err(Error::DegreeUnderflow(need));
    }
    if phi.degree() as i64 != need {
        return Err(Error::DimensionMismatch(format!(
            "test form of degree {} where {need} is required",
            phi.degree()
        )));
    }
    if !t.is_compact() && !f.current.is_compact() {
        return Err(Error::Unsupported("neither the correspondence nor the current is compact".into()));
    }
    Ok(())
}

/// `F^*T (φ) = lim ∫_F P_Y^*(R^Y_ε T) ∧ P_X^*φ` for `T` on `Y`, `φ` on `X`.
pub fn pull_back(
    f: &CorrespondenceKernel,
    t: &Current,
    phi: &SmoothForm,
    space: &ProductSpace,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<EpsilonLimit> {
    check_cylinder(f, t, Factor::Second, phi, space)?;
    limit_of(schedule, opts.parallel, |eps| {
        cylinder_pairing(f, t, Factor::Second, phi, space, eps, opts)
    })
}

/// `F_*T (φ) = lim ∫_F P_X^*(R^X_ε T) ∧ P_Y^*φ` for `T` on `X`, `φ` on `Y`.
pub fn push_forward(
    f: &CorrespondenceKernel,
    t: &Current,
    phi: &SmoothForm,
    space: &ProductSpace,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<EpsilonLimit> {
    check_cylinder(f, t, Factor::First, phi, space)?;
    limit_of(schedule, opts.parallel, |eps| {
        cylinder_pairing(f, t, Factor::First, phi, space, eps, opts)
    })
}

/// The member `I_s(φ) = lim ∫_I R_ε({s} × X) ∧ P_X^*φ` of the family `I` on
/// `S × X`, where `space = S × X`.
pub fn slice_family(
    i: &Current,
    s: &[f64],
    phi: &SmoothForm,
    space: &ProductSpace,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<EpsilonLimit> {
    let (ms, _) = space.dims();
    if s.len() != ms {
        return Err(Error::DimensionMismatch(format!("slice parameter of length {} in ℝ^{ms}", s.len())));
    }
    let point = Current::Points(PointMass::new(ms, vec![(s.to_vec(), 1.0)])?);
    pull_back_first(i, &point, phi, space, schedule, opts)
}

fn pull_back_first(
    i: &Current,
    point: &Current,
    phi: &SmoothForm,
    space: &ProductSpace,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<EpsilonLimit> {
    let f = CorrespondenceKernel::new(i.clone(), false);
    check_cylinder(&f, point, Factor::First, phi, space)?;
    limit_of(schedule, opts.parallel, |eps| {
        cylinder_pairing(&f, point, Factor::First, phi, space, eps, opts)
    })
}

/// Both sides of the spreading identity for a family `I` on `S × X` and a
/// current `W` on `X`: `(P_X)_*[I ∧ (S × W)](φ)` and `[(P_X)_*I ∧ W](φ)`,
/// each extrapolated.
pub fn spread_consistency(
    i: &Current,
    w: &Current,
    phi: &SmoothForm,
    space: &ProductSpace,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<(EpsilonLimit, EpsilonLimit)> {
    let (_, mx) = space.dims();
    if i.dim() != space.dim() || w.dim() != mx || phi.dim() != mx {
        return Err(Error::DimensionMismatch("spreading inputs on the wrong spaces".into()));
    }
    if i.current_dim() != w.degree() + phi.degree() {
        return Err(Error::DimensionMismatch(format!(
            "family of dimension {} against degrees {} + {}",
            i.current_dim(),
            w.degree(),
            phi.degree()
        )));
    }
    let lhs = limit_of(schedule, opts.parallel, |eps| {
        let rw = regularize_with(w, eps, &space.y, opts)?;
        let a = space.pull(Factor::Second, Arc::new(rw))?;
        let b = space.pull(Factor::Second, Arc::new(phi.clone()))?;
        evaluate_field(i, Arc::new(WedgeField { a, b }), opts)
    })?;
    let projected = pushforward_projection(i, space, Factor::Second)?;
    let rhs = limit_of(schedule, opts.parallel, |eps| {
        let rw = regularize_with(w, eps, &space.y, opts)?;
        let field = WedgeField { a: Arc::new(rw), b: Arc::new(phi.clone()) };
        projected.evaluate_field(Arc::new(field), opts)
    })?;
    Ok((lhs, rhs))
}

/// The regularized cylinder `R(X × σ)` (or `R(σ × Y)`) evaluated from the
/// product kernel `f₁ ⊗ f₂` on the cylinder itself.
///
/// The full factor is integrated against the discrete unit-mass measure of
/// its bump; the chain factor uses the block Jacobian `diag(I, Dσ)` and the
/// product minors. Requires translation data on both factors.
pub struct CylinderField {
    dim: usize,
    degree: usize,
    eps: f64,
    chain_factor: Factor,
    m1: usize,
    m2: usize,
    positions: Vec<f64>,
    weights: Vec<f64>,
    chain_data: Arc<DeRhamData>,
    full_mass: f64,
    sign: f64,
    support: BBox,
}

impl CylinderField {
    pub fn new(
        sigma: &CellChain,
        chain_factor: Factor,
        space: &ProductSpace,
        eps: f64,
        opts: &QuadOptions,
    ) -> Result<Self> {
        if !space.x.is_translation() || !space.y.is_translation() {
            return Err(Error::Unsupported("cylinder kernel needs translation data on both factors".into()));
        }
        let (m1, m2) = space.dims();
        let m = m1 + m2;
        let chain_data = space.factor_data(chain_factor).clone();
        let full_data = match chain_factor {
            Factor::First => &space.y,
            Factor::Second => &space.x,
        };
        if sigma.dim() != chain_data.dim() {
            return Err(Error::DimensionMismatch("cylinder base on the wrong factor".into()));
        }
        let k = sigma.param_dim();
        let (mf, offset) = match chain_factor {
            Factor::First => (m2, 0),
            Factor::Second => (m1, m1),
        };
        let kc = k + mf;
        let degree = m - kc;
        let sign = match chain_factor {
            Factor::Second if (m1 * degree) % 2 == 1 => -1.0,
            _ => 1.0,
        };
        let rule = full_data.bumps()[0].rule(opts.bump_nodes, opts.bump_pieces);
        let full_mass: f64 = rule.weights.iter().sum();
        let leaf = opts.leaf_scale * chain_data.resolution(eps);
        let nb = binomial(m, degree);
        let mut positions = Vec::new();
        let mut weights = Vec::new();
        let mut block = vec![0.0; m * kc];
        let mut minors = vec![0.0; nb];
        let md = chain_data.dim();
        for cell in sigma.cells() {
            let mut leaves = Vec::new();
            leaves_of(cell, &BBox::everything(md), leaf, opts.max_depth, &mut leaves);
            for b in leaves {
                let nodes = cell_nodes(cell, &b, opts.kernel_nodes);
                for (q, gw) in nodes.weights.iter().enumerate() {
                    let jac = &nodes.jacobians[q * md * k..(q + 1) * md * k];
                    block.iter_mut().for_each(|v| *v = 0.0);
                    // Columns: the full factor's unit vectors, then Dσ, in the
                    // order of the factors.
                    let (full_cols, chain_cols) = match chain_factor {
                        Factor::Second => (0, mf),
                        Factor::First => (k, 0),
                    };
                    let full_rows = match chain_factor {
                        Factor::Second => 0,
                        Factor::First => m1,
                    };
                    for a in 0..mf {
                        block[(full_rows + a) * kc + full_cols + a] = 1.0;
                    }
                    for r in 0..md {
                        for c in 0..k {
                            block[(offset + r) * kc + chain_cols + c] = jac[r * k + c];
                        }
                    }
                    chain_minor_vector(m, kc, &block, &mut minors);
                    positions.extend_from_slice(&nodes.points[q * md..(q + 1) * md]);
                    let s = gw * cell.signed_weight();
                    weights.extend(minors.iter().map(|v| v * s));
                }
            }
        }
        let reach = chain_data.reach(eps);
        let cb = sigma.bbox().expand(reach);
        let full = BBox::everything(full_data.dim());
        let support = match chain_factor {
            Factor::First => cb.product(&full),
            Factor::Second => full.product(&cb),
        };
        Ok(CylinderField {
            dim: m,
            degree,
            eps,
            chain_factor,
            m1,
            m2,
            positions,
            weights,
            chain_data,
            full_mass,
            sign,
            support,
        })
    }
}

impl FormField for CylinderField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn support(&self) -> Option<BBox> {
        Some(self.support.clone())
    }

    fn resolution(&self) -> Option<f64> {
        Some(self.chain_data.resolution(self.eps))
    }

    fn eval_batch(&self, points: &[f64]) -> Result<Vec<f64>> {
        let m = self.dim;
        let nb = binomial(m, self.degree);
        let (lo, md) = match self.chain_factor {
            Factor::First => (0, self.m1),
            Factor::Second => (self.m1, self.m2),
        };
        let bump = &self.chain_data.bumps()[0];
        let r2 = (self.eps * bump.support_radius()).powi(2);
        let nn = self.weights.len() / nb;
        let mut out = vec![0.0; points.len() / m * nb];
        let mut diff = vec![0.0; md];
        for (pi, z) in points.chunks(m).enumerate() {
            let y = &z[lo..lo + md];
            let dst = &mut out[pi * nb..(pi + 1) * nb];
            for j in 0..nn {
                let pos = &self.positions[j * md..(j + 1) * md];
                let mut d2 = 0.0;
                for a in 0..md {
                    diff[a] = y[a] - pos[a];
                    d2 += diff[a] * diff[a];
                }
                if d2 > r2 {
                    continue;
                }
                let fv = bump.eval_scaled(&diff, self.eps) * self.full_mass * self.sign;
                if fv == 0.0 {
                    continue;
                }
                for (d, w) in dst.iter_mut().zip(&self.weights[j * nb..(j + 1) * nb]) {
                    *d += fv * w;
                }
            }
        }
        Ok(out)
    }
}

/// Largest coefficient difference between the cylinder kernel and the
/// pulled-back factor regularization at `samples` random points near the
/// cylinder.
pub fn cylinder_identity_residual(
    sigma: &CellChain,
    chain_factor: Factor,
    space: &ProductSpace,
    eps: f64,
    samples: usize,
    seed: u64,
    opts: &QuadOptions,
) -> Result<f64> {
    let cyl = CylinderField::new(sigma, chain_factor, space, eps, opts)?;
    let factor = regularize_with(&Current::Chain(sigma.clone()), eps, space.factor_data(chain_factor), opts)?;
    let pulled = space.pull(chain_factor, Arc::new(factor))?;
    let m = space.dim();
    let axes = space.axes(chain_factor);
    let near = sigma.bbox().expand(0.5 * space.factor_data(chain_factor).reach(eps));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(samples * m);
    for _ in 0..samples {
        let mut z: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for (j, &a) in axes.iter().enumerate() {
            z[a] = rng.gen_range(near.lo[j]..=near.hi[j]);
        }
        pts.extend(z);
    }
    let a = cyl.eval_batch(&pts)?;
    let b = pulled.eval_batch(&pts)?;
    Ok(a.iter().zip(&b).fold(0.0f64, |acc, (u, v)| acc.max((u - v).abs())))
}

#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub lhs: EpsilonLimit,
    pub rhs: EpsilonLimit,
    pub residual: f64,
}

/// Both sides of `[(P_{X₂})_*T ∧ σ](φ) = (P_{X₂})_*[T ∧ (X₁ × σ)](φ)`.
///
/// The left side pairs `T` with `P^*(R σ ∧ φ)`. The right side regularizes
/// the cylinder with [`CylinderField`] when `σ` is a chain, and as
/// `P^*(R σ)` when it is a form.
pub fn projection_formula_check(
    t: &Current,
    sigma: &Current,
    phi: &SmoothForm,
    space: &ProductSpace,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<ProjectionReport> {
    let (_, m2) = space.dims();
    if t.dim() != space.dim() || sigma.dim() != m2 || phi.dim() != m2 {
        return Err(Error::DimensionMismatch("projection formula inputs on the wrong spaces".into()));
    }
    let projected = pushforward_projection(t, space, Factor::Second)?;
    let lhs = limit_of(schedule, opts.parallel, |eps| {
        let rs = regularize_with(sigma, eps, &space.y, opts)?;
        projected.evaluate_field(Arc::new(WedgeField { a: Arc::new(rs), b: Arc::new(phi.clone()) }), opts)
    })?;
    let rhs = limit_of(schedule, opts.parallel, |eps| {
        let cyl: Arc<dyn FormField> = match sigma.as_chain() {
            Some(c) if space.x.is_translation() && space.y.is_translation() => {
                Arc::new(CylinderField::new(&c, Factor::Second, space, eps, opts)?)
            }
            _ => {
                let rs: MollifiedForm = regularize_with(sigma, eps, &space.y, opts)?;
                space.pull(Factor::Second, Arc::new(rs))?
            }
        };
        let b = space.pull(Factor::Second, Arc::new(phi.clone()))?;
        evaluate_field(t, Arc::new(WedgeField { a: cyl, b }), opts)
    })?;
    let residual = (lhs.extrapolated - rhs.extrapolated).abs();
    Ok(ProjectionReport { lhs, rhs, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::BumpProfile;
    use crate::chain::Cell;
    use crate::scalar::ScalarField;

    fn plane() -> ProductSpace {
        let d = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(1)));
        ProductSpace::new(d.clone(), d).unwrap()
    }

    fn bump_fn(m: usize, c: f64) -> SmoothForm {
        let p = Plateau::centered(&vec![c; m], 0.2, 0.6);
        SmoothForm::function(m, ScalarField::plateau(p))
    }

    #[test]
    fn cylinder_kernel_matches_pullback() {
        let x = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)));
        let y = Arc::new(DeRhamData::standard(BumpProfile::poly4(2)));
        let space = ProductSpace::new(x, y).unwrap();
        let arc = Cell::new(
            vec![Poly::affine(-0.5, &[1.0]), Poly::from_terms(1, vec![(vec![2], 0.8), (vec![0], -0.1)])],
            1.0,
            1,
        )
        .unwrap();
        let sigma = CellChain::single(arc);
        let opts = QuadOptions::default();
        for f in [Factor::First, Factor::Second] {
            let r = cylinder_identity_residual(&sigma, f, &space, 0.1, 100, 7, &opts).unwrap();
            assert!(r < 1e-12, "{f:?}: {r}");
        }
    }

    #[test]
    fn diagonal_pull_back_is_identity() {
        let space = plane();
        let base = CellChain::single(Cell::segment(&[-1.5], &[1.5]).unwrap()).truncated();
        let delta = CorrespondenceKernel::new(Current::Chain(space.diagonal(&base).unwrap()), true);
        let t = Current::Points(PointMass::new(1, vec![(vec![0.3], 2.0)]).unwrap());
        let phi = bump_fn(1, 0.1);
        let expect = 2.0 * phi.eval(&[0.3])[0];
        let sched = EpsilonSchedule::new(0.2, 0.5, 5, 1e-6).unwrap();
        let l = pull_back(&delta, &t, &phi, &space, &sched, &QuadOptions::default()).unwrap();
        assert!((l.extrapolated - expect).abs() < 1e-6, "{l:?}");
    }

    #[test]
    fn graph_push_forward_is_composition() {
        let space = plane();
        let base = CellChain::single(Cell::segment(&[-1.5], &[1.5]).unwrap()).truncated();
        let f = [Poly::affine(0.1, &[0.5])];
        let gamma = CorrespondenceKernel::new(Current::Chain(space.graph(&base, &f).unwrap()), true);
        let t = Current::Points(PointMass::new(1, vec![(vec![0.4], 1.0)]).unwrap());
        let phi = bump_fn(1, 0.2);
        let expect = phi.eval(&[0.3])[0];
        let sched = EpsilonSchedule::new(0.2, 0.5, 5, 1e-6).unwrap();
        let l = push_forward(&gamma, &t, &phi, &space, &sched, &QuadOptions::default()).unwrap();
        assert!((l.extrapolated - expect).abs() < 1e-6, "{l:?}");
    }

    #[test]
    fn closed_graph_has_no_boundary() {
        let space = plane();
        let base = CellChain::single(Cell::segment(&[-1.5], &[1.5]).unwrap()).truncated();
        let g = space.graph(&base, &[Poly::from_terms(1, vec![(vec![2], 0.5)])]).unwrap();
        let k = CorrespondenceKernel::new(Current::Chain(g), true);
        let r = k.boundary_residual(&BBox::cube(2, -0.8, 0.8), 4, 3, &QuadOptions::default()).unwrap();
        assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn projection_formula_on_a_product_chain() {
        let x = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(1)));
        let y = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)));
        let space = ProductSpace::new(x, y).unwrap();
        // {0.3} × (horizontal segment) against a vertical line in the second factor.
        let t = CellChain::single(Cell::segment(&[0.3, -0.5, 0.1], &[0.3, 0.5, 0.1]).unwrap());
        let line = CellChain::single(Cell::segment(&[0.1, -1.5], &[0.1, 1.5]).unwrap()).truncated();
        let phi = bump_fn(2, 0.0);
        let sched = EpsilonSchedule::new(0.2, 0.5, 4, 1e-6).unwrap();
        let r = projection_formula_check(&Current::Chain(t), &Current::Chain(line), &phi, &space, &sched, &QuadOptions::default())
            .unwrap();
        assert!(r.residual < 1e-9, "{r:?}");
        assert!((r.lhs.extrapolated.abs() - phi.eval(&[0.1, 0.1])[0]).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn slice_of_a_moving_point() {
        let space = plane();
        let path = CellChain::single(
            Cell::new(vec![Poly::affine(-1.0, &[2.0]), Poly::from_terms(1, vec![(vec![2], 0.3), (vec![0], 0.05)])], 1.0, 1).unwrap(),
        );
        let phi = bump_fn(1, 0.2);
        let sched = EpsilonSchedule::new(0.2, 0.5, 5, 1e-6).unwrap();
        let l = slice_family(&Current::Chain(path), &[0.2], &phi, &space, &sched, &QuadOptions::default()).unwrap();
        // s = 0.2 is reached at u = 0.6, where the second coordinate is 0.158.
        let expect = phi.eval(&[0.158])[0];
        assert!((l.extrapolated - expect).abs() < 1e-6, "{l:?}");
    }

    #[test]
    fn projection_rejects_wrong_space() {
        let space = plane();
        let t = Current::Points(PointMass::new(3, vec![(vec![0.0; 3], 1.0)]).unwrap());
        assert!(pushforward_projection(&t, &space, Factor::First).is_err());
    }
}
