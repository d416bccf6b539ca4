//! Reference values computed without the smoothing and intersection code.
//!
//! Everything here works from the geometry of the inputs alone (Newton
//! solves, exact resultants, low-dimensional quadrature of reduced
//! integrals), so agreement with the ε-limits is a genuine check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bump::BumpProfile;
use crate::chain::{Cell, CellChain};
use crate::error::{Error, Result};
use crate::exterior::det;
use crate::form::SmoothForm;
use crate::gauss::rule01;
use crate::poly::Poly;

/// Crossings with `|det|` below this (unit tangent columns) are degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// A transversal crossing of two chains of complementary dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedPoint {
    pub location: Vec<f64>,
    pub sign: i8,
    /// `det[Dσ₁ | Dσ₂]` with unit tangent columns.
    pub det: f64,
    /// Product of the absolute cell weights.
    pub weight: f64,
}

fn in_unit_box(u: &[f64], tol: f64) -> bool {
    u.iter().all(|&x| x >= -tol && x <= 1.0 + tol)
}

fn normalized_det(m: usize, j1: &[f64], k1: usize, j2: &[f64], k2: usize) -> f64 {
    let mut a = vec![0.0; m * m];
    for r in 0..m {
        for c in 0..k1 {
            a[r * m + c] = j1[r * k1 + c];
        }
        for c in 0..k2 {
            a[r * m + k1 + c] = j2[r * k2 + c];
        }
    }
    for c in 0..m {
        let n = (0..m).map(|r| a[r * m + c].powi(2)).sum::<f64>().sqrt();
        if n > 0.0 {
            for r in 0..m {
                a[r * m + c] /= n;
            }
        }
    }
    det(m, &a)
}

/// Solves `σ₁(u) = σ₂(w)` for every cell pair by damped Newton from a grid
/// of starts and returns the distinct solutions with their signs.
pub fn transversal_points(t1: &CellChain, t2: &CellChain) -> Result<Vec<SignedPoint>> {
    let m = t1.dim();
    if t2.dim() != m {
        return Err(Error::DimensionMismatch("chains in different ambient spaces".into()));
    }
    let (k1, k2) = (t1.param_dim(), t2.param_dim());
    if k1 + k2 != m {
        return Err(Error::DimensionMismatch(format!("dimensions {k1} + {k2} do not add up to {m}")));
    }
    let mut out: Vec<SignedPoint> = Vec::new();
    for c1 in t1.cells() {
        for c2 in t2.cells() {
            for p in cell_pair_crossings(c1, c2)? {
                if !out.iter().any(|q| dist(&q.location, &p.location) < 1e-7) {
                    out.push(p);
                }
            }
        }
    }
    out.sort_by(|a, b| a.location.partial_cmp(&b.location).unwrap());
    Ok(out)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn cell_pair_crossings(c1: &Cell, c2: &Cell) -> Result<Vec<SignedPoint>> {
    let m = c1.dim();
    let (k1, k2) = (c1.param_dim(), c2.param_dim());
    let grid: usize = match m {
        0..=2 => 9,
        3 => 6,
        _ => 4,
    };
    let starts = grid.pow(m as u32);
    let mut found: Vec<SignedPoint> = Vec::new();
    let mut x = vec![0.0; m];
    let mut p1 = vec![0.0; m];
    let mut p2 = vec![0.0; m];
    let mut j1 = vec![0.0; m * k1];
    let mut j2 = vec![0.0; m * k2];
    for s in 0..starts {
        let mut code = s;
        for xi in x.iter_mut() {
            *xi = ((code % grid) as f64 + 0.5) / grid as f64;
            code /= grid;
        }
        let mut converged = false;
        for _ in 0..80 {
            c1.eval(&x[..k1], &mut p1);
            c2.eval(&x[k1..], &mut p2);
            let f: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| a - b).collect();
            let fnorm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
            if fnorm < 1e-13 {
                converged = true;
                break;
            }
            c1.jacobian(&x[..k1], &mut j1);
            c2.jacobian(&x[k1..], &mut j2);
            let mut a = nalgebra::DMatrix::<f64>::zeros(m, m);
            for r in 0..m {
                for c in 0..k1 {
                    a[(r, c)] = j1[r * k1 + c];
                }
                for c in 0..k2 {
                    a[(r, k1 + c)] = -j2[r * k2 + c];
                }
            }
            let rhs = nalgebra::DVector::from_iterator(m, f.iter().map(|v| -v));
            let Some(step) = a.clone().lu().solve(&rhs) else { break };
            // Damping: halve until the residual decreases.
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, d)| xi + t * d).collect();
                c1.eval(&trial[..k1], &mut p1);
                c2.eval(&trial[k1..], &mut p2);
                let n: f64 = p1.iter().zip(&p2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                if n < fnorm {
                    x.copy_from_slice(&trial);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
            if !in_unit_box(&x, 0.5) {
                break;
            }
        }
        c1.eval(&x[..k1], &mut p1);
        c2.eval(&x[k1..], &mut p2);
        let res = dist(&p1, &p2);
        if !in_unit_box(&x, 1e-9) {
            continue;
        }
        c1.jacobian(&x[..k1], &mut j1);
        c2.jacobian(&x[k1..], &mut j2);
        let d = normalized_det(m, &j1, k1, &j2, k2);
        if res < 1e-7 && d.abs() < DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateCrossing { location: p1.clone(), det: d });
        }
        if !converged && res > 1e-10 {
            continue;
        }
        if d.abs() < DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateCrossing { location: p1.clone(), det: d });
        }
        if found.iter().any(|q| dist(&q.location, &p1) < 1e-7) {
            continue;
        }
        let w = c1.signed_weight() * c2.signed_weight();
        let sign = if d * w > 0.0 { 1 } else { -1 };
        found.push(SignedPoint { location: p1.clone(), sign, det: d, weight: w.abs() });
    }
    Ok(found)
}

/// Signed count `Σ sign · weight` of the crossings.
pub fn signed_intersection_number(t1: &CellChain, t2: &CellChain) -> Result<f64> {
    Ok(transversal_points(t1, t2)?.iter().map(|p| p.sign as f64 * p.weight).sum())
}

/// Composite Gauss–Legendre nodes on `[a, b]`.
fn composite(a: f64, b: f64, pieces: usize, nodes: usize) -> Vec<(f64, f64)> {
    let r = rule01(nodes);
    let h = (b - a) / pieces as f64;
    let mut out = Vec::with_capacity(pieces * nodes);
    for p in 0..pieces {
        let lo = a + h * p as f64;
        for (x, w) in r.0.iter().zip(&r.1) {
            out.push((lo + h * x, h * w));
        }
    }
    out
}

/// Limit of the self-intersection of the parabola `x₁ = x₂²`
/// (parametrized by `t ↦ (t², t)`) tested on a 0-form `φ`:
/// `∫ g(v) φ((v/2)², v/2) dv` with `g(v) = ∫ u h(uv, u) du`.
pub fn closed_form_parabola_self(h: &BumpProfile, phi: &SmoothForm) -> Result<f64> {
    closed_form_parabola_self_with(h, phi, 64)
}

/// Same with `pieces` sub-intervals per axis (12 nodes each).
pub fn closed_form_parabola_self_with(h: &BumpProfile, phi: &SmoothForm, pieces: usize) -> Result<f64> {
    if h.dim() != 2 {
        return Err(Error::DimensionMismatch("the parabola oracle needs a planar bump".into()));
    }
    if phi.dim() != 2 || phi.degree() != 0 {
        return Err(Error::DimensionMismatch("the parabola oracle takes a 0-form on ℝ²".into()));
    }
    use crate::form::FormField;
    let s = phi
        .support()
        .ok_or_else(|| Error::Validation("test form without a support box".into()))?;
    if s.is_empty() {
        return Ok(0.0);
    }
    let r = h.support_radius();
    let us = composite(-r, r, pieces, 12);
    let vs = composite(2.0 * s.lo[1], 2.0 * s.hi[1], pieces, 12);
    let mut total = 0.0;
    for &(v, wv) in &vs {
        let f = phi.eval(&[0.25 * v * v, 0.5 * v])[0];
        if f == 0.0 {
            continue;
        }
        let g: f64 = us.iter().map(|&(u, wu)| wu * u * h.eval(&[u * v, u])).sum();
        total += wv * g * f;
    }
    Ok(total)
}

/// Prediction for the curve `x₁ = x₂^k` against the line `x₁ = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyPrediction {
    pub k: u32,
    /// The limit is `coefficient · φ(0)`.
    pub coefficient: f64,
    /// `∫_0^∞ h₁` and `∫_{-∞}^0 h₁` for the marginal `h₁(s) = ∫ h(s, y) dy`.
    pub half_masses: (f64, f64),
}

/// Substituting `s = t^k` turns `∫_{T1} h₁^ε(x₁) φ dx₁` into integrals of
/// the marginal `h₁` over half-lines. For odd `k` both half-lines are
/// traversed forwards, for even `k` the branch `t < 0` runs backwards over
/// `s > 0`.
pub fn tangency_closed_forms(k: u32, h: &BumpProfile) -> Result<TangencyPrediction> {
    if h.dim() != 2 {
        return Err(Error::DimensionMismatch("tangency oracle needs a planar bump".into()));
    }
    if k < 1 {
        return Err(Error::Validation("curve power must be positive".into()));
    }
    let r = h.support_radius();
    let ys = composite(-r, r, 64, 12);
    let marginal = |s: f64| ys.iter().map(|&(y, w)| w * h.eval(&[s, y])).sum::<f64>();
    let pos: f64 = composite(0.0, r, 64, 12).iter().map(|&(s, w)| w * marginal(s)).sum();
    let neg: f64 = composite(-r, 0.0, 64, 12).iter().map(|&(s, w)| w * marginal(s)).sum();
    // The branch t < 0 of an even power runs from s = ∞ back to 0.
    let backward: f64 = composite(r, 0.0, 64, 12).iter().map(|&(s, w)| w * marginal(s)).sum();
    let coefficient = if k % 2 == 1 { pos + neg } else { pos + backward };
    Ok(TangencyPrediction { k, coefficient, half_masses: (pos, neg) })
}

/// Predicted `[[T1∧T2]∧T3](φ) = sign · φ(p)` for an affine `k`-plane `T1`
/// and affine hyperplanes `T2, …` meeting it in one point `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineCrossing {
    pub point: Vec<f64>,
    pub sign: i8,
}

/// Normal `n` of an affine hyperplane cell with `det[n | e₁ … e_{m-1}] > 0`.
fn cofactor_normal(m: usize, edges: &[f64]) -> Vec<f64> {
    let k = m - 1;
    (0..m)
        .map(|i| {
            let mut a = vec![0.0; k * k];
            let mut row = 0;
            for r in 0..m {
                if r == i {
                    continue;
                }
                for c in 0..k {
                    a[row * k + c] = edges[r * k + c];
                }
                row += 1;
            }
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * det(k, &a)
        })
        .collect()
}

/// Sign and location of the point where the affine `k`-cell `t1` meets
/// the affine hyperplane cells `others` (`k` of them, in order). With
/// normals `nᵢ` oriented so that `det[nᵢ | Dσᵢ] > 0`, the sign is
/// `sign det(N · Dσ₁)` for the matrix `N` with rows `nᵢ`.
pub fn affine_hyperplane_crossing(t1: &Cell, others: &[&Cell]) -> Result<AffineCrossing> {
    let m = t1.dim();
    let k = t1.param_dim();
    if others.len() != k || others.iter().any(|c| c.param_dim() + 1 != m || c.dim() != m) {
        return Err(Error::DimensionMismatch("need one hyperplane per parameter of the first cell".into()));
    }
    let mid = vec![0.5; k];
    let mut j1 = vec![0.0; m * k];
    t1.jacobian(&mid, &mut j1);
    let mut o1 = vec![0.0; m];
    t1.eval(&vec![0.0; k], &mut o1);
    let mut nmat = vec![0.0; k * m];
    let mut offsets = vec![0.0; k];
    let mut sign = t1.signed_weight().signum();
    for (i, c) in others.iter().enumerate() {
        let mut e = vec![0.0; m * (m - 1)];
        c.jacobian(&vec![0.5; m - 1], &mut e);
        let n = cofactor_normal(m, &e);
        let mut o = vec![0.0; m];
        c.eval(&vec![0.0; m - 1], &mut o);
        offsets[i] = n.iter().zip(&o).map(|(a, b)| a * b).sum();
        nmat[i * m..(i + 1) * m].copy_from_slice(&n);
        sign *= c.signed_weight().signum();
    }
    // Solve N (o₁ + Dσ₁ s) = offsets for s.
    let mut a = nalgebra::DMatrix::<f64>::zeros(k, k);
    let mut b = nalgebra::DVector::<f64>::zeros(k);
    for i in 0..k {
        for j in 0..k {
            a[(i, j)] = (0..m).map(|r| nmat[i * m + r] * j1[r * k + j]).sum();
        }
        b[i] = offsets[i] - (0..m).map(|r| nmat[i * m + r] * o1[r]).sum::<f64>();
    }
    let d = a.determinant();
    if d.abs() < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateCrossing { location: o1, det: d });
    }
    let s = a.lu().solve(&b).expect("nonsingular");
    let point: Vec<f64> = (0..m).map(|r| o1[r] + (0..k).map(|j| j1[r * k + j] * s[j]).sum::<f64>()).collect();
    Ok(AffineCrossing { point, sign: (sign * d.signum()) as i8 })
}

// Exact resultants -----------------------------------------------------------

type Q = BigRational;

/// Univariate polynomial over `ℚ`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
struct UPoly(Vec<Q>);

impl UPoly {
    fn zero() -> Self {
        UPoly(Vec::new())
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let mut c = vec![Q::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            c[i] += a;
        }
        for (i, a) in o.0.iter().enumerate() {
            c[i] += a;
        }
        UPoly(c).trim()
    }

    fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly(c).trim()
    }

    /// Exact quotient; the division must leave no remainder.
    fn div_exact(&self, d: &UPoly) -> UPoly {
        let mut r = self.0.clone();
        let dl = d.0.len();
        let lead = d.0.last().unwrap().clone();
        if r.len() < dl {
            return UPoly::zero();
        }
        let mut q = vec![Q::zero(); r.len() - dl + 1];
        for i in (0..q.len()).rev() {
            let c = &r[i + dl - 1] / &lead;
            for (j, dj) in d.0.iter().enumerate() {
                r[i + j] -= &c * dj;
            }
            q[i] = c;
        }
        debug_assert!(r.iter().all(|c| c.is_zero()));
        UPoly(q).trim()
    }

    fn valuation(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }
}

fn to_q(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::NonFiniteValue(format!("coefficient {x}")))
}

fn binom(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Exact coefficients of `p(x + a + c·y, y + b)` indexed by `[y-degree][x-degree]`.
fn shifted(p: &Poly, a: &Q, b: &Q, c: &Q) -> Result<Vec<UPoly>> {
    if p.nvars() != 2 {
        return Err(Error::DimensionMismatch("plane curves need bivariate polynomials".into()));
    }
    let deg = p.total_degree() as usize;
    let mut grid = vec![vec![Q::zero(); deg + 1]; deg + 1];
    for (e, coef) in p.terms() {
        let (i, j) = (e[0], e[1]);
        let coef = to_q(*coef)?;
        // (x + a + c y)^i (y + b)^j
        for i1 in 0..=i {
            for i2 in 0..=(i - i1) {
                let i3 = i - i1 - i2;
                let multi = Q::from_integer(binom(i, i1) * binom(i - i1, i2));
                let xa = multi * pow_q(a, i2) * pow_q(c, i3);
                for j1 in 0..=j {
                    let t = &coef * &xa * Q::from_integer(binom(j, j1)) * pow_q(b, j - j1);
                    grid[(i3 + j1) as usize][i1 as usize] += t;
                }
            }
        }
    }
    let mut rows: Vec<UPoly> = grid.into_iter().map(|r| UPoly(r).trim()).collect();
    while rows.last().is_some_and(|r| r.is_zero()) {
        rows.pop();
    }
    Ok(rows)
}

fn pow_q(x: &Q, k: u32) -> Q {
    let mut r = Q::one();
    for _ in 0..k {
        r *= x;
    }
    r
}

/// Determinant over `ℚ[x]` by fraction-free Bareiss elimination.
fn bareiss(mut a: Vec<Vec<UPoly>>) -> UPoly {
    let n = a.len();
    if n == 0 {
        return UPoly(vec![Q::one()]);
    }
    let mut prev = UPoly(vec![Q::one()]);
    let mut sign = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return UPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[k][k].mul(&a[i][j]).add(&a[i][k].mul(&a[k][j]).neg());
                a[i][j] = t.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        d.neg()
    } else {
        d
    }
}

/// `Res_y(p, q)` as a polynomial in `x`, from coefficient rows in `y`.
fn resultant_y(p: &[UPoly], q: &[UPoly]) -> UPoly {
    if p.is_empty() || q.is_empty() {
        return UPoly::zero();
    }
    let (dp, dq) = (p.len() - 1, q.len() - 1);
    let n = dp + dq;
    if n == 0 {
        return UPoly(vec![Q::one()]);
    }
    let mut s = vec![vec![UPoly::zero(); n]; n];
    for r in 0..dq {
        for (k, c) in p.iter().rev().enumerate() {
            s[r][r + k] = c.clone();
        }
    }
    for r in 0..dp {
        for (k, c) in q.iter().rev().enumerate() {
            s[dq + r][r + k] = c.clone();
        }
    }
    bareiss(s)
}

/// Intersection multiplicity of the plane curves `p = 0` and `q = 0` at
/// `point`: the order of vanishing of `Res_y` at the point after a shear
/// `x ↦ x + c y` that separates it from other common zeros. The smallest
/// order over a few shears is returned.
pub fn plane_curve_multiplicity(p: &Poly, q: &Poly, point: &[f64]) -> Result<u32> {
    if point.len() != 2 {
        return Err(Error::DimensionMismatch("plane curve point must have two coordinates".into()));
    }
    let a = to_q(point[0])?;
    let b = to_q(point[1])?;
    let shears = [(0i64, 1i64), (1, 3), (-2, 7), (5, 11), (3, 2)];
    let mut best: Option<u32> = None;
    for (num, den) in shears {
        let c = Q::new(BigInt::from(num), BigInt::from(den));
        // Points (x, y) on the sheared curves correspond to (x + a + c y', y' + b).
        let ps = shifted(p, &a, &b, &c)?;
        let qs = shifted(q, &a, &b, &c)?;
        let r = resultant_y(&ps, &qs);
        if r.is_zero() {
            return Err(Error::NonIsolated);
        }
        let v = r.valuation().unwrap() as u32;
        best = Some(best.map_or(v, |b: u32| b.min(v)));
    }
    Ok(best.unwrap())
}

/// Whether both polynomials vanish at the point within `tol`.
pub fn is_common_zero(p: &Poly, q: &Poly, point: &[f64], tol: f64) -> bool {
    p.eval(point).abs() <= tol && q.eval(point).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Plateau;
    use crate::scalar::ScalarField;

    fn xy(terms: Vec<(Vec<u32>, f64)>) -> Poly {
        Poly::from_terms(2, terms)
    }

    #[test]
    fn axes_cross_once_positively() {
        let x = CellChain::single(Cell::segment(&[-1.0, 0.0], &[1.0, 0.0]).unwrap());
        let y = CellChain::single(Cell::segment(&[0.0, -1.0], &[0.0, 1.0]).unwrap());
        let pts = transversal_points(&x, &y).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].sign, 1);
        assert!(pts[0].location.iter().all(|v| v.abs() < 1e-12));
        let flipped = transversal_points(&x.negate(), &y).unwrap();
        assert_eq!(flipped[0].sign, -1);
    }

    #[test]
    fn tangent_parabola_is_degenerate() {
        let t = Poly::affine(-1.0, &[2.0]);
        let par = CellChain::single(Cell::new(vec![t.clone(), t.pow(2)], 1.0, 1).unwrap());
        let line = CellChain::single(Cell::segment(&[-1.0, 0.0], &[1.0, 0.0]).unwrap());
        assert!(matches!(transversal_points(&par, &line), Err(Error::DegenerateCrossing { .. })));
    }

    #[test]
    fn multiplicities_of_model_curves() {
        let y = xy(vec![(vec![0, 1], 1.0)]);
        let par = xy(vec![(vec![0, 1], 1.0), (vec![2, 0], -1.0)]);
        let cub = xy(vec![(vec![0, 1], 1.0), (vec![3, 0], -1.0)]);
        let l1 = xy(vec![(vec![0, 1], 1.0), (vec![1, 0], -1.0)]);
        let l2 = xy(vec![(vec![0, 1], 1.0), (vec![1, 0], 1.0)]);
        assert_eq!(plane_curve_multiplicity(&par, &y, &[0.0, 0.0]).unwrap(), 2);
        assert_eq!(plane_curve_multiplicity(&cub, &y, &[0.0, 0.0]).unwrap(), 3);
        assert_eq!(plane_curve_multiplicity(&l1, &l2, &[0.0, 0.0]).unwrap(), 1);
        assert_eq!(plane_curve_multiplicity(&y, &par, &[0.0, 0.0]).unwrap(), 2);
        assert!(matches!(plane_curve_multiplicity(&y, &y, &[0.0, 0.0]), Err(Error::NonIsolated)));
    }

    #[test]
    fn shear_separates_vertically_aligned_points() {
        // y² = 1 + x meets x = 0 at (0, ±1); each crossing is simple.
        let p = xy(vec![(vec![0, 2], 1.0), (vec![0, 0], -1.0), (vec![1, 0], -1.0)]);
        let q = xy(vec![(vec![1, 0], 1.0)]);
        assert_eq!(plane_curve_multiplicity(&p, &q, &[0.0, 1.0]).unwrap(), 1);
    }

    #[test]
    fn symmetric_bump_gives_zero_parabola_limit() {
        let phi = SmoothForm::function(2, ScalarField::plateau(Plateau::centered(&[0.0, 0.0], 0.3, 0.8)));
        let v = closed_form_parabola_self(&BumpProfile::smooth_radial(2), &phi).unwrap();
        assert!(v.abs() < 1e-14, "{v}");
    }

    #[test]
    fn skewed_bump_gives_stable_nonzero_limit() {
        let h = BumpProfile::skewed(vec![0.3, 0.2], 0.5, vec![0.5, -0.4]).unwrap();
        let phi = SmoothForm::function(2, ScalarField::plateau(Plateau::centered(&[0.0, 0.0], 0.5, 0.9)));
        let a = closed_form_parabola_self_with(&h, &phi, 48).unwrap();
        let b = closed_form_parabola_self_with(&h, &phi, 96).unwrap();
        assert!(a.abs() > 1e-3);
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn tangency_coefficients() {
        for h in [BumpProfile::smooth_radial(2), BumpProfile::skewed(vec![0.2, 0.1], 0.6, vec![0.4, 0.3]).unwrap()] {
            assert!(tangency_closed_forms(2, &h).unwrap().coefficient.abs() < 1e-14);
            assert!((tangency_closed_forms(3, &h).unwrap().coefficient - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn coordinate_planes_cross_positively() {
        let e = |i: usize| {
            let mut v = vec![0.0; 3];
            v[i] = 1.0;
            v
        };
        let plane = |a: usize, b: usize| {
            let o: Vec<f64> = (0..3).map(|i| -e(a)[i] - e(b)[i]).collect();
            Cell::affine(&o, &[e(a).iter().map(|x| 2.0 * x).collect(), e(b).iter().map(|x| 2.0 * x).collect()]).unwrap()
        };
        let p12 = plane(0, 1);
        let p23 = plane(1, 2);
        let p31 = plane(2, 0);
        let c = affine_hyperplane_crossing(&p12, &[&p23, &p31]).unwrap();
        assert!(c.point.iter().all(|v| v.abs() < 1e-12));
        let swapped = affine_hyperplane_crossing(&p12, &[&p31, &p23]).unwrap();
        assert_eq!(c.sign, -swapped.sign);
    }
}
