//! Normalized bump functions used as mollifier kernels.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gauss::{rule01, tensor_rule};
use crate::geometry::BBox;

#[derive(Clone, Debug, PartialEq)]
pub enum BumpKind {
    /// `exp(1/(|x|²-1))` on the unit ball.
    SmoothRadial,
    /// `(1-|x|²)^4` on the unit ball.
    Poly4,
    /// `(1 + tilt·x) exp(1/(|x-c|²/r² - 1))` on the ball of radius `r` about `c`.
    SkewedRadial { center: Vec<f64>, radius: f64, tilt: Vec<f64> },
    /// `f1(x') f2(x'')` for `x = (x', x'')`.
    Product(Box<BumpProfile>, Box<BumpProfile>),
}

/// A nonnegative bounded profile `f` on `ℝ^m` with `∫ f = 1`, supported in
/// the closed ball of radius `support_radius() ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpProfile {
    dim: usize,
    kind: BumpKind,
    /// Factor turning the raw profile into a unit-mass density.
    scale: f64,
}

fn radial_raw(kind: &BumpKind, rho: f64) -> f64 {
    if rho >= 1.0 {
        return 0.0;
    }
    match kind {
        BumpKind::Poly4 => (1.0 - rho * rho).powi(4),
        _ => (1.0 / (rho * rho - 1.0)).exp(),
    }
}

fn sphere_area(m: usize) -> f64 {
    // Area of the unit sphere in ℝ^m: 2 π^{m/2} / Γ(m/2).
    let mut gamma = if m % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if m % 2 == 0 { 1.0 } else { 0.5 };
    while x < m as f64 / 2.0 - 1e-12 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(m as f64 / 2.0) / gamma
}

/// `∫_{ℝ^m} g(|x|) dx` for the unit-ball radial profile of `kind`.
fn radial_mass(kind: &BumpKind, m: usize) -> f64 {
    let r = rule01(24);
    let pieces = 64;
    let mut s = 0.0;
    for k in 0..pieces {
        let a = k as f64 / pieces as f64;
        let h = 1.0 / pieces as f64;
        for (x, w) in r.0.iter().zip(&r.1) {
            let rho = a + h * x;
            s += h * w * rho.powi(m as i32 - 1) * radial_raw(kind, rho);
        }
    }
    if m == 1 {
        2.0 * s
    } else {
        sphere_area(m) * s
    }
}

impl BumpProfile {
    pub fn smooth_radial(dim: usize) -> Self {
        let kind = BumpKind::SmoothRadial;
        let scale = 1.0 / radial_mass(&kind, dim);
        BumpProfile { dim, kind, scale }
    }

    pub fn poly4(dim: usize) -> Self {
        let kind = BumpKind::Poly4;
        let scale = 1.0 / radial_mass(&kind, dim);
        BumpProfile { dim, kind, scale }
    }

    /// Shifted and tilted smooth bump. Requires the ball of radius `radius`
    /// about `center` to lie in the unit ball and `1 + tilt·x ≥ 0` on it.
    pub fn skewed(center: Vec<f64>, radius: f64, tilt: Vec<f64>) -> Result<Self> {
        let dim = center.len();
        if tilt.len() != dim {
            return Err(Error::DimensionMismatch("skewed bump tilt length".into()));
        }
        let cn = center.iter().map(|c| c * c).sum::<f64>().sqrt();
        let tn = tilt.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(radius > 0.0) || cn + radius > 1.0 + 1e-12 {
            return Err(Error::Validation(format!(
                "skewed bump ball (|c| = {cn}, r = {radius}) must lie in the unit ball"
            )));
        }
        if tn * (cn + radius) > 1.0 + 1e-12 {
            return Err(Error::Validation("skewed bump tilt would make the profile negative".into()));
        }
        let tc: f64 = tilt.iter().zip(&center).map(|(a, b)| a * b).sum();
        // ∫ (1 + t·(c + y)) e(|y|/r) dy = (1 + t·c) r^m ∫ e(|η|) dη.
        let mass = (1.0 + tc) * radius.powi(dim as i32) * radial_mass(&BumpKind::SmoothRadial, dim);
        Ok(BumpProfile { dim, kind: BumpKind::SkewedRadial { center, radius, tilt }, scale: 1.0 / mass })
    }

    pub fn product(a: BumpProfile, b: BumpProfile) -> Self {
        let dim = a.dim + b.dim;
        BumpProfile { dim, kind: BumpKind::Product(Box::new(a), Box::new(b)), scale: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BumpKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            BumpKind::SmoothRadial => "smooth-radial".into(),
            BumpKind::Poly4 => "poly4".into(),
            BumpKind::SkewedRadial { .. } => "skewed-radial".into(),
            BumpKind::Product(a, b) => format!("product({},{})", a.name(), b.name()),
        }
    }

    /// The normalization constant multiplying the raw profile.
    pub fn normalization(&self) -> f64 {
        self.scale
    }

    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            BumpKind::SmoothRadial | BumpKind::Poly4 => 1.0,
            BumpKind::SkewedRadial { center, radius, .. } => {
                center.iter().map(|c| c * c).sum::<f64>().sqrt() + radius
            }
            BumpKind::Product(a, b) => a.support_radius().hypot(b.support_radius()),
        }
    }

    /// A box containing the support, in profile coordinates.
    pub fn support_box(&self) -> BBox {
        match &self.kind {
            BumpKind::SmoothRadial | BumpKind::Poly4 => BBox::cube(self.dim, -1.0, 1.0),
            BumpKind::SkewedRadial { center, radius, .. } => BBox::new(
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            BumpKind::Product(a, b) => a.support_box().product(&b.support_box()),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            BumpKind::SmoothRadial | BumpKind::Poly4 => true,
            BumpKind::SkewedRadial { center, tilt, .. } => {
                center.iter().all(|&c| c == 0.0) && tilt.iter().all(|&t| t == 0.0)
            }
            BumpKind::Product(a, b) => a.is_symmetric() && b.is_symmetric(),
        }
    }

    /// `f(x)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            BumpKind::SmoothRadial | BumpKind::Poly4 => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                if r2 >= 1.0 {
                    return 0.0;
                }
                self.scale * radial_raw(&self.kind, r2.sqrt())
            }
            BumpKind::SkewedRadial { center, radius, tilt } => {
                let mut r2 = 0.0;
                let mut lin = 1.0;
                for i in 0..self.dim {
                    let d = x[i] - center[i];
                    r2 += d * d;
                    lin += tilt[i] * x[i];
                }
                let rho2 = r2 / (radius * radius);
                if rho2 >= 1.0 {
                    return 0.0;
                }
                self.scale * lin.max(0.0) * (1.0 / (rho2 - 1.0)).exp()
            }
            BumpKind::Product(a, b) => {
                let fa = a.eval(&x[..a.dim]);
                if fa == 0.0 {
                    return 0.0;
                }
                fa * b.eval(&x[a.dim..])
            }
        }
    }

    /// `f^ε(x) = ε^{-m} f(x/ε)`.
    pub fn eval_scaled(&self, x: &[f64], eps: f64) -> f64 {
        let mut buf = [0.0f64; 16];
        let y = &mut buf[..x.len()];
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi / eps;
        }
        self.eval(y) / eps.powi(self.dim as i32)
    }

    /// A discrete probability measure approximating `f(x) dx`: tensor
    /// Gauss–Legendre nodes on `pieces^m` sub-boxes of the support box,
    /// weighted by `f` and renormalized to total mass one.
    pub fn rule(&self, nodes: usize, pieces: usize) -> BumpRule {
        let sb = self.support_box();
        let m = self.dim;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let total_pieces = pieces.pow(m as u32);
        for k in 0..total_pieces {
            let mut r = k;
            let mut lo = vec![0.0; m];
            let mut hi = vec![0.0; m];
            for a in 0..m {
                let i = r % pieces;
                r /= pieces;
                let h = sb.width(a) / pieces as f64;
                lo[a] = sb.lo[a] + h * i as f64;
                hi[a] = lo[a] + h;
            }
            let (p, w) = tensor_rule(&BBox::new(lo, hi), nodes);
            for (j, wj) in w.iter().enumerate() {
                let x = &p[j * m..(j + 1) * m];
                let fx = self.eval(x);
                if fx > 0.0 {
                    points.extend_from_slice(x);
                    weights.push(wj * fx);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        BumpRule { dim: m, points, weights }
    }
}

/// Nodes `x_q` and weights `w_q` with `Σ w_q g(x_q) ≈ ∫ f(x) g(x) dx`.
#[derive(Clone, Debug)]
pub struct BumpRule {
    pub dim: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl BumpRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, q: usize) -> &[f64] {
        &self.points[q * self.dim..(q + 1) * self.dim]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mass(b: &BumpProfile, n: usize) -> f64 {
        let sb = b.support_box();
        let mut s = 0.0;
        let pieces: usize = 8;
        let m = b.dim();
        for k in 0..pieces.pow(m as u32) {
            let mut r = k;
            let mut lo = vec![0.0; m];
            let mut hi = vec![0.0; m];
            for a in 0..m {
                let i = r % pieces;
                r /= pieces;
                let h = sb.width(a) / pieces as f64;
                lo[a] = sb.lo[a] + h * i as f64;
                hi[a] = lo[a] + h;
            }
            let (p, w) = tensor_rule(&BBox::new(lo, hi), n);
            for (j, wj) in w.iter().enumerate() {
                s += wj * b.eval(&p[j * m..(j + 1) * m]);
            }
        }
        s
    }

    #[test]
    fn profiles_have_unit_mass() {
        for m in 1..=3 {
            for b in [BumpProfile::smooth_radial(m), BumpProfile::poly4(m)] {
                assert!((mass(&b, 12) - 1.0).abs() < 1e-6, "{} in dim {m}", b.name());
            }
        }
        let s = BumpProfile::skewed(vec![0.2, -0.1], 0.6, vec![0.5, 0.7]).unwrap();
        assert!((mass(&s, 12) - 1.0).abs() < 1e-6);
        let p = BumpProfile::product(BumpProfile::smooth_radial(1), BumpProfile::poly4(2));
        assert!((mass(&p, 12) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn symmetry_flags() {
        let b = BumpProfile::smooth_radial(2);
        assert!(b.is_symmetric());
        assert_eq!(b.eval(&[0.3, -0.2]), b.eval(&[-0.3, 0.2]));
        let s = BumpProfile::skewed(vec![0.1, 0.0], 0.5, vec![0.0, 0.0]).unwrap();
        assert!(!s.is_symmetric());
        assert!(BumpProfile::skewed(vec![0.5, 0.0], 0.6, vec![0.0, 0.0]).is_err());
        assert!(BumpProfile::skewed(vec![0.0, 0.0], 0.5, vec![3.0, 0.0]).is_err());
    }

    #[test]
    fn rule_is_a_probability_measure_with_symmetric_moments() {
        let r = BumpProfile::smooth_radial(2).rule(8, 2);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let m1: f64 = (0..r.len()).map(|q| r.weights[q] * r.point(q)[0]).sum();
        assert!(m1.abs() < 1e-15);
    }
}
