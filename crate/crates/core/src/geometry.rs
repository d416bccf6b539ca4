//! Axis-aligned boxes and smooth plateau cutoffs.

use serde::{Deserialize, Serialize};

/// Closed axis-aligned box. Infinite bounds are allowed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        BBox { lo, hi }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        BBox::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn unit(dim: usize) -> Self {
        BBox::cube(dim, 0.0, 1.0)
    }

    pub fn everything(dim: usize) -> Self {
        BBox::cube(dim, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn from_point(p: &[f64]) -> Self {
        BBox::new(p.to_vec(), p.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l) * (h - l))
            .sum::<f64>()
            .sqrt()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| *x >= *l && *x <= *h)
    }

    pub fn contains_box(&self, other: &BBox) -> bool {
        (0..self.dim()).all(|i| other.lo[i] >= self.lo[i] && other.hi[i] <= self.hi[i])
    }

    pub fn intersect(&self, other: &BBox) -> BBox {
        BBox::new(
            self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
        )
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        !self.intersect(other).is_empty()
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox::new(
            self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        )
    }

    pub fn expand(&self, r: f64) -> BBox {
        BBox::new(
            self.lo.iter().map(|l| l - r).collect(),
            self.hi.iter().map(|h| h + r).collect(),
        )
    }

    /// Euclidean distance between the boxes (0 when they meet).
    pub fn distance(&self, other: &BBox) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim() {
            let gap = (self.lo[i] - other.hi[i]).max(other.lo[i] - self.hi[i]).max(0.0);
            s += gap * gap;
        }
        s.sqrt()
    }

    pub fn distance_to_point(&self, p: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, x) in p.iter().enumerate() {
            let gap = (self.lo[i] - x).max(x - self.hi[i]).max(0.0);
            s += gap * gap;
        }
        s.sqrt()
    }

    /// The two halves obtained by bisecting `axis`.
    pub fn split(&self, axis: usize) -> (BBox, BBox) {
        let mid = 0.5 * (self.lo[axis] + self.hi[axis]);
        let mut a = self.clone();
        let mut b = self.clone();
        a.hi[axis] = mid;
        b.lo[axis] = mid;
        (a, b)
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &BBox) -> BBox {
        let mut lo = self.lo.clone();
        lo.extend_from_slice(&other.lo);
        let mut hi = self.hi.clone();
        hi.extend_from_slice(&other.hi);
        BBox::new(lo, hi)
    }

    /// Coordinates `axes` of the box.
    pub fn select(&self, axes: &[usize]) -> BBox {
        BBox::new(
            axes.iter().map(|&a| self.lo[a]).collect(),
            axes.iter().map(|&a| self.hi[a]).collect(),
        )
    }
}

/// Truncated Taylor jet used to differentiate the smooth step exactly.
#[derive(Clone, Debug)]
struct Jet(Vec<f64>);

impl Jet {
    fn var(t: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = t;
        if order > 0 {
            c[1] = 1.0;
        }
        Jet(c)
    }

    fn div(&self, o: &Jet) -> Jet {
        let n = self.0.len();
        let mut c = vec![0.0; n];
        for k in 0..n {
            let mut s = self.0[k];
            for j in 1..=k {
                s -= o.0[j] * c[k - j];
            }
            c[k] = s / o.0[0];
        }
        Jet(c)
    }

    fn exp(&self) -> Jet {
        let n = self.0.len();
        let mut c = vec![0.0; n];
        c[0] = self.0[0].exp();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.0[j] * c[k - j];
            }
            c[k] = s / k as f64;
        }
        Jet(c)
    }

    fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn neg_scalar_plus(&self, s: f64) -> Jet {
        let mut c: Vec<f64> = self.0.iter().map(|a| -a).collect();
        c[0] += s;
        Jet(c)
    }
}

/// `exp(-1/t)` for `t > 0`, zero otherwise, as a jet in `t`.
fn psi_jet(t: &Jet) -> Jet {
    if t.0[0] <= 0.0 {
        return Jet(vec![0.0; t.0.len()]);
    }
    let one = {
        let mut c = vec![0.0; t.0.len()];
        c[0] = 1.0;
        Jet(c)
    };
    let inv = one.div(t);
    Jet(inv.0.iter().map(|a| -a).collect()).exp()
}

/// Derivative of order `order` of the C^∞ step `s(t)`, which is 0 for
/// `t ≤ 0`, 1 for `t ≥ 1`, and `ψ(t)/(ψ(t)+ψ(1-t))` between.
pub fn smooth_step(t: f64, order: usize) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    if order <= 1 {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        let s = a + b;
        return if order == 0 {
            a / s
        } else {
            a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s)
        };
    }
    let x = Jet::var(t, order);
    let a = psi_jet(&x);
    let b = psi_jet(&x.neg_scalar_plus(1.0));
    let s = a.div(&a.add(&b));
    // Taylor coefficient k times k! is the k-th derivative.
    let fact: f64 = (1..=order).map(|i| i as f64).product();
    s.0[order] * fact
}

/// A C^∞ cutoff equal to 1 on `inner` and 0 outside `outer`, built as a
/// product of one-dimensional smooth steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub inner: BBox,
    pub outer: BBox,
}

impl Plateau {
    pub fn new(inner: BBox, outer: BBox) -> Self {
        assert!(outer.contains_box(&inner), "plateau inner box must lie in outer box");
        Plateau { inner, outer }
    }

    /// The constant function 1.
    pub fn everywhere(dim: usize) -> Self {
        Plateau { inner: BBox::everything(dim), outer: BBox::everything(dim) }
    }

    /// Symmetric plateau around `center`.
    pub fn centered(center: &[f64], inner_half: f64, outer_half: f64) -> Self {
        Plateau::new(
            BBox::new(
                center.iter().map(|c| c - inner_half).collect(),
                center.iter().map(|c| c + inner_half).collect(),
            ),
            BBox::new(
                center.iter().map(|c| c - outer_half).collect(),
                center.iter().map(|c| c + outer_half).collect(),
            ),
        )
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Value of the one-axis factor, or its derivative.
    pub fn axis_factor(&self, axis: usize, x: f64, order: usize) -> f64 {
        let (il, ih, ol, oh) = (self.inner.lo[axis], self.inner.hi[axis], self.outer.lo[axis], self.outer.hi[axis]);
        if x < ol || x > oh {
            return 0.0;
        }
        if x >= il && x <= ih {
            return if order == 0 { 1.0 } else { 0.0 };
        }
        if x < il {
            let w = il - ol;
            smooth_step((x - ol) / w, order) / w.powi(order as i32)
        } else {
            let w = oh - ih;
            let sign = if order % 2 == 1 { -1.0 } else { 1.0 };
            sign * smooth_step((oh - x) / w, order) / w.powi(order as i32)
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = 1.0;
        for (a, &xa) in x.iter().enumerate() {
            v *= self.axis_factor(a, xa, 0);
            if v == 0.0 {
                break;
            }
        }
        v
    }

    /// Mixed partial derivative with per-axis orders.
    pub fn derivative(&self, x: &[f64], orders: &[usize]) -> f64 {
        let mut v = 1.0;
        for (a, &xa) in x.iter().enumerate() {
            v *= self.axis_factor(a, xa, orders[a]);
            if v == 0.0 {
                break;
            }
        }
        v
    }

    pub fn support(&self) -> BBox {
        self.outer.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_derivatives_match_finite_differences() {
        for &t in &[0.2, 0.5, 0.77] {
            let h = 1e-5;
            for order in 0..3 {
                let fd = (smooth_step(t + h, order) - smooth_step(t - h, order)) / (2.0 * h);
                let an = smooth_step(t, order + 1);
                assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()), "order {order} at {t}: {fd} vs {an}");
            }
        }
        assert_eq!(smooth_step(0.5, 0), 0.5);
    }

    #[test]
    fn plateau_values() {
        let p = Plateau::centered(&[0.0, 0.0], 0.2, 0.5);
        assert_eq!(p.eval(&[0.1, -0.2]), 1.0);
        assert_eq!(p.eval(&[0.6, 0.0]), 0.0);
        let v = p.eval(&[0.35, 0.0]);
        assert!(v > 0.0 && v < 1.0);
        let h = 1e-6;
        let fd = (p.eval(&[0.3 + h, 0.1]) - p.eval(&[0.3 - h, 0.1])) / (2.0 * h);
        assert!((fd - p.derivative(&[0.3, 0.1], &[1, 0])).abs() < 1e-6);
        assert_eq!(Plateau::everywhere(3).eval(&[1e9, -4.0, 0.0]), 1.0);
    }

    #[test]
    fn box_distance() {
        let a = BBox::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let b = BBox::new(vec![4.0, 5.0], vec![6.0, 6.0]);
        assert!((a.distance(&b) - 5.0).abs() < 1e-15);
        assert_eq!(a.distance(&a.expand(0.1)), 0.0);
    }
}
