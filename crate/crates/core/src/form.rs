//! Differential forms: explicit smooth forms and the `FormField` interface
//! shared with forms produced numerically by smoothing.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exterior::{basis, binomial, indices, merge_sign, rank, to_mask, wedge};
use crate::geometry::BBox;
use crate::scalar::ScalarField;

/// A degree-`p` form on `ℝ^m` that can be sampled in batches.
///
/// `eval_batch` takes points flattened row by row and returns the dense
/// coefficients (in `exterior::basis` order) of each point in turn.
pub trait FormField: Send + Sync {
    fn dim(&self) -> usize;
    fn degree(&self) -> usize;
    /// A box outside which every coefficient vanishes, if known.
    fn support(&self) -> Option<BBox>;
    /// Length scale on which the coefficients vary, if much smaller than 1.
    fn resolution(&self) -> Option<f64> {
        None
    }
    fn eval_batch(&self, points: &[f64]) -> Result<Vec<f64>>;
}

/// Smallest box containing the given flattened points.
pub fn points_bbox(dim: usize, points: &[f64]) -> BBox {
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points.chunks(dim.max(1)) {
        for a in 0..dim {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    BBox::new(lo, hi)
}

fn scaled(f: ScalarField, s: f64) -> ScalarField {
    if s == 1.0 {
        return f;
    }
    match f {
        ScalarField::Const(c) => ScalarField::Const(c * s),
        ScalarField::Poly(p) => ScalarField::Poly(p.scale(s)),
        other => ScalarField::Product(vec![ScalarField::Const(s), other]),
    }
}

/// A form with explicit coefficient functions, stored for increasing
/// multi-indices only.
#[derive(Clone, Debug)]
pub struct SmoothForm {
    dim: usize,
    degree: usize,
    terms: Vec<(u32, ScalarField)>,
    declared_support: Option<BBox>,
}

impl SmoothForm {
    /// Builds `Σ c_I dx_I`. Indices may be given in any order; the sign of the
    /// sorting permutation is applied and repeated indices give zero.
    pub fn new(dim: usize, degree: usize, terms: Vec<(Vec<usize>, ScalarField)>) -> Result<Self> {
        let mut acc: BTreeMap<u32, Vec<ScalarField>> = BTreeMap::new();
        for (idx, f) in terms {
            if idx.len() != degree {
                return Err(Error::DimensionMismatch(format!(
                    "multi-index {idx:?} in a form of degree {degree}"
                )));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::DimensionMismatch(format!("index {bad} in dimension {dim}")));
            }
            let sign = crate::exterior::permutation_sign(&idx);
            if sign == 0.0 || f.is_zero() {
                continue;
            }
            acc.entry(to_mask(&idx)).or_default().push(scaled(f, sign));
        }
        let terms = acc
            .into_iter()
            .map(|(m, mut v)| (m, if v.len() == 1 { v.pop().unwrap() } else { ScalarField::Sum(v) }))
            .collect();
        Ok(SmoothForm { dim, degree, terms, declared_support: None })
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        SmoothForm { dim, degree, terms: Vec::new(), declared_support: None }
    }

    /// The 0-form `f`.
    pub fn function(dim: usize, f: ScalarField) -> Self {
        SmoothForm::new(dim, 0, vec![(vec![], f)]).unwrap()
    }

    /// `f dx_0 ∧ … ∧ dx_{m-1}`.
    pub fn top(dim: usize, f: ScalarField) -> Self {
        SmoothForm::new(dim, dim, vec![((0..dim).collect(), f)]).unwrap()
    }

    /// Declares a box outside which the form vanishes.
    pub fn with_support(mut self, b: BBox) -> Self {
        self.declared_support = Some(b);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &ScalarField)> {
        self.terms.iter().map(|(m, f)| (indices(*m), f))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `dx_{idx}` with the antisymmetry sign applied.
    pub fn coefficient(&self, idx: &[usize], x: &[f64]) -> f64 {
        let s = crate::exterior::permutation_sign(idx);
        if s == 0.0 {
            return 0.0;
        }
        let m = to_mask(idx);
        self.terms
            .iter()
            .find(|(k, _)| *k == m)
            .map(|(_, f)| s * f.eval(x))
            .unwrap_or(0.0)
    }

    /// Dense coefficients at one point.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; binomial(self.dim, self.degree)];
        self.eval_into(x, &mut out);
        out
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if let Some(s) = &self.declared_support {
            if !s.contains(x) {
                return;
            }
        }
        for (m, f) in &self.terms {
            out[rank(self.dim, *m)] = f.eval(x);
        }
    }

    pub fn scale(&self, c: f64) -> SmoothForm {
        let mut out = self.clone();
        out.terms = self.terms.iter().map(|(m, f)| (*m, scaled(f.clone(), c))).collect();
        out.terms.retain(|(_, f)| !f.is_zero());
        out
    }

    pub fn add(&self, other: &SmoothForm) -> Result<SmoothForm> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::DimensionMismatch("adding forms of different shape".into()));
        }
        let mut terms: Vec<(Vec<usize>, ScalarField)> = self.terms().map(|(i, f)| (i, f.clone())).collect();
        terms.extend(other.terms().map(|(i, f)| (i, f.clone())));
        let mut out = SmoothForm::new(self.dim, self.degree, terms)?;
        out.declared_support = match (&self.declared_support, &other.declared_support) {
            (Some(a), Some(b)) => Some(a.union(b)),
            _ => None,
        };
        Ok(out)
    }

    pub fn wedge(&self, other: &SmoothForm) -> Result<SmoothForm> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch("wedge of forms on different spaces".into()));
        }
        let mut terms = Vec::new();
        for (a, fa) in &self.terms {
            for (b, fb) in &other.terms {
                let s = merge_sign(*a, *b);
                if s != 0.0 {
                    let f = ScalarField::Product(vec![fa.clone(), fb.clone()]);
                    terms.push((indices(a | b), scaled(f, s)));
                }
            }
        }
        let mut out = SmoothForm::new(self.dim, self.degree + other.degree, terms)?;
        out.declared_support = match (&self.declared_support, &other.declared_support) {
            (Some(a), Some(b)) => Some(a.intersect(b)),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            _ => None,
        };
        Ok(out)
    }

    /// Largest absolute coefficient over a grid on the support box.
    pub fn sup_norm(&self, samples_per_axis: usize) -> f64 {
        let b = match FormField::support(self) {
            Some(b) => b,
            None => return f64::NAN,
        };
        let n = samples_per_axis.max(2);
        let total = n.pow(self.dim as u32);
        let mut best: f64 = 0.0;
        let mut x = vec![0.0; self.dim];
        for k in 0..total {
            let mut r = k;
            for a in 0..self.dim {
                let i = r % n;
                r /= n;
                x[a] = b.lo[a] + b.width(a) * i as f64 / (n - 1) as f64;
            }
            for v in self.eval(&x) {
                best = best.max(v.abs());
            }
        }
        best
    }
}

/// A form of the given degree whose coefficients are random quadratics
/// (uniform coefficients in `[-1, 1]`) times `cutoff`.
pub fn random_polynomial_form<R: rand::Rng>(dim: usize, degree: usize, cutoff: &crate::geometry::Plateau, rng: &mut R) -> SmoothForm {
    let terms = basis(dim, degree)
        .iter()
        .map(|&mask| {
            let mut mono = vec![(vec![0u32; dim], rng.gen_range(-1.0..1.0))];
            for i in 0..dim {
                let mut e = vec![0u32; dim];
                e[i] = 1;
                mono.push((e.clone(), rng.gen_range(-1.0..1.0)));
                for j in i..dim {
                    let mut f = e.clone();
                    f[j] += 1;
                    mono.push((f, rng.gen_range(-1.0..1.0)));
                }
            }
            let p = crate::poly::Poly::from_terms(dim, mono);
            (indices(mask), ScalarField::poly_cutoff(p, cutoff.clone()))
        })
        .collect();
    SmoothForm::new(dim, degree, terms).expect("basis indices are valid")
}

/// `dφ`, computed symbolically from the coefficient expressions.
pub fn exterior_derivative(phi: &SmoothForm) -> SmoothForm {
    let mut terms = Vec::new();
    for (m, f) in &phi.terms {
        for j in 0..phi.dim {
            let bit = 1u32 << j;
            if m & bit != 0 {
                continue;
            }
            let df = f.derivative(j);
            if df.is_zero() {
                continue;
            }
            terms.push((indices(m | bit), scaled(df, merge_sign(bit, *m))));
        }
    }
    let mut out = SmoothForm::new(phi.dim, phi.degree + 1, terms).expect("valid indices");
    out.declared_support = phi.declared_support.clone();
    out
}

impl FormField for SmoothForm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn support(&self) -> Option<BBox> {
        let mut acc: Option<BBox> = None;
        let mut all_known = true;
        for (_, f) in &self.terms {
            match f.support() {
                Some(b) => acc = Some(acc.map_or(b.clone(), |a| a.union(&b))),
                None => all_known = false,
            }
        }
        if self.terms.is_empty() {
            // The zero form: an empty box.
            return Some(BBox::cube(self.dim, 1.0, -1.0));
        }
        let computed = if all_known { acc } else { None };
        match (computed, &self.declared_support) {
            (Some(a), Some(b)) => Some(a.intersect(b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    }

    fn eval_batch(&self, points: &[f64]) -> Result<Vec<f64>> {
        let nb = binomial(self.dim, self.degree);
        let npts = if self.dim == 0 { 1 } else { points.len() / self.dim };
        let mut out = vec![0.0; npts * nb];
        for (i, x) in points.chunks(self.dim.max(1)).enumerate() {
            self.eval_into(x, &mut out[i * nb..(i + 1) * nb]);
        }
        Ok(out)
    }
}

/// Pointwise wedge product `a ∧ b` of two fields.
pub struct WedgeField {
    pub a: Arc<dyn FormField>,
    pub b: Arc<dyn FormField>,
}

impl FormField for WedgeField {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn degree(&self) -> usize {
        self.a.degree() + self.b.degree()
    }

    fn support(&self) -> Option<BBox> {
        match (self.a.support(), self.b.support()) {
            (Some(x), Some(y)) => Some(x.intersect(&y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            _ => None,
        }
    }

    fn resolution(&self) -> Option<f64> {
        match (self.a.resolution(), self.b.resolution()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }

    fn eval_batch(&self, points: &[f64]) -> Result<Vec<f64>> {
        let m = self.dim();
        let (p, q) = (self.a.degree(), self.b.degree());
        let (na, nb, nc) = (binomial(m, p), binomial(m, q), binomial(m, p + q));
        // Evaluate the cheaper factor first and skip the other one at points
        // where it vanishes.
        let a_first = !(self.a.resolution().is_some() && self.b.resolution().is_none());
        let (first, second) = if a_first { (&self.a, &self.b) } else { (&self.b, &self.a) };
        let (nf, ns) = if a_first { (na, nb) } else { (nb, na) };
        let vf = first.eval_batch(points)?;
        let npts = if m == 0 { 1 } else { points.len() / m };
        let live: Vec<usize> = (0..npts).filter(|&i| vf[i * nf..(i + 1) * nf].iter().any(|&c| c != 0.0)).collect();
        let mut sub = Vec::with_capacity(live.len() * m);
        for &i in &live {
            sub.extend_from_slice(&points[i * m..(i + 1) * m]);
        }
        let mut out = vec![0.0; npts * nc];
        if live.is_empty() {
            return Ok(out);
        }
        let vs = second.eval_batch(&sub)?;
        for (j, &i) in live.iter().enumerate() {
            let f = &vf[i * nf..(i + 1) * nf];
            let s = &vs[j * ns..(j + 1) * ns];
            let (ca, cb) = if a_first { (f, s) } else { (s, f) };
            wedge(m, p, ca, q, cb, &mut out[i * nc..(i + 1) * nc]);
        }
        Ok(out)
    }
}

/// Pullback of a field along the coordinate projection
/// `ℝ^ambient → ℝ^{axes.len()}`, `z ↦ (z_{axes[0]}, …)`.
pub struct ProjectedField {
    pub inner: Arc<dyn FormField>,
    pub axes: Vec<usize>,
    pub ambient: usize,
}

impl FormField for ProjectedField {
    fn dim(&self) -> usize {
        self.ambient
    }

    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn support(&self) -> Option<BBox> {
        let s = self.inner.support()?;
        let mut b = BBox::everything(self.ambient);
        for (j, &a) in self.axes.iter().enumerate() {
            b.lo[a] = s.lo[j];
            b.hi[a] = s.hi[j];
        }
        Some(b)
    }

    fn resolution(&self) -> Option<f64> {
        self.inner.resolution()
    }

    fn eval_batch(&self, points: &[f64]) -> Result<Vec<f64>> {
        let d = self.axes.len();
        let p = self.degree();
        let mut sub = Vec::with_capacity(points.len() / self.ambient * d);
        for z in points.chunks(self.ambient) {
            sub.extend(self.axes.iter().map(|&a| z[a]));
        }
        let v = self.inner.eval_batch(&sub)?;
        let nin = binomial(d, p);
        let nout = binomial(self.ambient, p);
        let npts = points.len() / self.ambient;
        // dx_J on the factor pulls back to dz_{axes(J)}; reorder with sign.
        let map: Vec<(usize, f64)> = basis(d, p)
            .iter()
            .map(|&mj| {
                let img: Vec<usize> = indices(mj).iter().map(|&j| self.axes[j]).collect();
                (rank(self.ambient, to_mask(&img)), crate::exterior::permutation_sign(&img))
            })
            .collect();
        let mut out = vec![0.0; npts * nout];
        for i in 0..npts {
            for (j, &(r, s)) in map.iter().enumerate() {
                out[i * nout + r] += s * v[i * nin + j];
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn x(dim: usize, i: usize) -> ScalarField {
        ScalarField::Poly(Poly::var(dim, i))
    }

    #[test]
    fn derivative_examples() {
        // d(x1 dx2) = dx1 ∧ dx2
        let f = SmoothForm::new(2, 1, vec![(vec![1], x(2, 0))]).unwrap();
        let df = exterior_derivative(&f);
        assert_eq!(df.coefficient(&[0, 1], &[0.3, 0.9]), 1.0);
        assert_eq!(df.coefficient(&[1, 0], &[0.3, 0.9]), -1.0);
        // d(const) = 0
        assert!(exterior_derivative(&SmoothForm::function(3, ScalarField::Const(2.0))).is_zero());
        // d(x1 x2) = x2 dx1 + x1 dx2
        let g = SmoothForm::function(2, ScalarField::Poly(Poly::from_terms(2, vec![(vec![1, 1], 1.0)])));
        let dg = exterior_derivative(&g);
        assert_eq!(dg.eval(&[2.0, 5.0]), vec![5.0, 2.0]);
    }

    #[test]
    fn d_squared_vanishes() {
        let c = crate::geometry::Plateau::centered(&[0.0; 3], 0.2, 0.8);
        let p = Poly::from_terms(3, vec![(vec![1, 2, 0], 1.0), (vec![0, 1, 3], -2.0)]);
        let f = SmoothForm::new(3, 1, vec![(vec![2], ScalarField::poly_cutoff(p.clone(), c.clone())), (vec![0], ScalarField::Poly(p))]).unwrap();
        let ddf = exterior_derivative(&exterior_derivative(&f));
        for pt in [[0.1, 0.5, -0.3], [0.5, -0.45, 0.3]] {
            for v in ddf.eval(&pt) {
                assert!(v.abs() < 1e-9, "{v}");
            }
        }
    }

    #[test]
    fn antisymmetric_construction() {
        let f = SmoothForm::new(3, 2, vec![(vec![2, 0], ScalarField::Const(3.0))]).unwrap();
        assert_eq!(f.coefficient(&[0, 2], &[0.0; 3]), -3.0);
        assert!(SmoothForm::new(3, 2, vec![(vec![1, 1], ScalarField::Const(1.0))]).unwrap().is_zero());
    }

    #[test]
    fn projected_field_reorders_indices() {
        // dy0 on the factor with axes [2, 0] becomes dz2; dy0∧dy1 becomes -dz0∧dz2.
        let inner = SmoothForm::new(2, 2, vec![(vec![0, 1], x(2, 0))]).unwrap();
        let pf = ProjectedField { inner: Arc::new(inner), axes: vec![2, 0], ambient: 3 };
        let v = pf.eval_batch(&[1.0, 7.0, 4.0]).unwrap();
        // basis(3,2) = {01, 02, 12}
        assert_eq!(v, vec![0.0, -4.0, 0.0]);
    }
}
