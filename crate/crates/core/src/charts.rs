//! Charts, cutoffs and de Rham data: the auxiliary choices every smoothing
//! operator and intersection depends on.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::geometry::{BBox, Plateau};

type MapFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// A diffeomorphism `h: ℝ^m → ℝ^m` (onto its image).
#[derive(Clone)]
pub enum ChartMap {
    /// `h(z) = A z + b` with row-major `A`.
    Affine { a: Vec<f64>, b: Vec<f64>, a_inv: Vec<f64>, det: f64 },
    /// A general map with explicit inverse and Jacobian, plus a bound
    /// `lipschitz` on the operator norms of `Dh` and `Dh^{-1}`.
    Smooth { forward: MapFn, inverse: MapFn, jacobian: MapFn, lipschitz: f64 },
}

impl fmt::Debug for ChartMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartMap::Affine { a, b, .. } => write!(f, "Affine {{ a: {a:?}, b: {b:?} }}"),
            ChartMap::Smooth { lipschitz, .. } => write!(f, "Smooth {{ lipschitz: {lipschitz} }}"),
        }
    }
}

fn op_norm(m: usize, a: &[f64]) -> f64 {
    DMatrix::from_row_slice(m, m, a).singular_values().max()
}

impl ChartMap {
    pub fn identity(m: usize) -> Self {
        let mut a = vec![0.0; m * m];
        for i in 0..m {
            a[i * m + i] = 1.0;
        }
        ChartMap::Affine { a: a.clone(), b: vec![0.0; m], a_inv: a, det: 1.0 }
    }

    pub fn affine(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let m = b.len();
        if a.len() != m * m {
            return Err(Error::DimensionMismatch("affine chart matrix".into()));
        }
        let mat = DMatrix::from_row_slice(m, m, &a);
        let det = mat.determinant();
        let inv = mat
            .try_inverse()
            .filter(|_| det.abs() > 1e-12)
            .ok_or_else(|| Error::Validation("affine chart matrix is singular".into()))?;
        let mut a_inv = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                a_inv[i * m + j] = inv[(i, j)];
            }
        }
        Ok(ChartMap::Affine { a, b, a_inv, det })
    }

    pub fn smooth(
        forward: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        inverse: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        jacobian: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        lipschitz: f64,
    ) -> Self {
        ChartMap::Smooth {
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            jacobian: Arc::new(jacobian),
            lipschitz,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            ChartMap::Affine { a, b, .. } => {
                let m = b.len();
                b.iter().all(|&v| v == 0.0)
                    && (0..m * m).all(|k| a[k] == if k / m == k % m { 1.0 } else { 0.0 })
            }
            ChartMap::Smooth { .. } => false,
        }
    }

    pub fn forward(&self, z: &[f64], out: &mut [f64]) {
        match self {
            ChartMap::Affine { a, b, .. } => {
                let m = b.len();
                for i in 0..m {
                    out[i] = b[i] + (0..m).map(|j| a[i * m + j] * z[j]).sum::<f64>();
                }
            }
            ChartMap::Smooth { forward, .. } => forward(z, out),
        }
    }

    pub fn inverse(&self, w: &[f64], out: &mut [f64]) {
        match self {
            ChartMap::Affine { b, a_inv, .. } => {
                let m = b.len();
                for i in 0..m {
                    out[i] = (0..m).map(|j| a_inv[i * m + j] * (w[j] - b[j])).sum::<f64>();
                }
            }
            ChartMap::Smooth { inverse, .. } => inverse(w, out),
        }
    }

    /// Row-major `Dh(z)`.
    pub fn jacobian(&self, z: &[f64], out: &mut [f64]) {
        match self {
            ChartMap::Affine { a, .. } => out.copy_from_slice(a),
            ChartMap::Smooth { jacobian, .. } => jacobian(z, out),
        }
    }

    /// Bound on `|Dh^{-1}|`: chart-coordinate distances map to at most this
    /// multiple in ambient coordinates.
    pub fn inverse_lipschitz(&self) -> f64 {
        match self {
            ChartMap::Affine { a_inv, b, .. } => op_norm(b.len(), a_inv),
            ChartMap::Smooth { lipschitz, .. } => *lipschitz,
        }
    }

    /// Bound on `|Dh|`.
    pub fn forward_lipschitz(&self) -> f64 {
        match self {
            ChartMap::Affine { a, b, .. } => op_norm(b.len(), a),
            ChartMap::Smooth { lipschitz, .. } => *lipschitz,
        }
    }
}

/// One chart of de Rham data: a map `h_i` and a cutoff `g_i`.
#[derive(Clone, Debug)]
pub struct Chart {
    pub id: usize,
    pub map: ChartMap,
    pub cutoff: Plateau,
}

impl Chart {
    pub fn identity(id: usize, m: usize) -> Self {
        Chart { id, map: ChartMap::identity(m), cutoff: Plateau::everywhere(m) }
    }

    /// Checks `h ∘ h^{-1} = id` on sample points of the cutoff support.
    pub fn check_inverse(&self, samples: usize) -> Result<()> {
        let m = self.cutoff.dim();
        let s = self.cutoff.support();
        let mut z = vec![0.0; m];
        let mut w = vec![0.0; m];
        let mut back = vec![0.0; m];
        for k in 0..samples {
            for a in 0..m {
                let (lo, hi) = (s.lo[a].max(-10.0), s.hi[a].min(10.0));
                // A low-discrepancy sequence keeps this deterministic.
                let t = ((k as f64 + 0.5) * (0.618_033_988_749_895 + a as f64 * 0.414_213_562)).fract();
                z[a] = lo + (hi - lo) * t;
            }
            self.map.forward(&z, &mut w);
            self.map.inverse(&w, &mut back);
            let err = z.iter().zip(&back).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            if err > 1e-9 * (1.0 + z.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
                return Err(Error::Validation(format!("chart {} inverse fails at {z:?}", self.id)));
            }
        }
        Ok(())
    }
}

/// Ordered charts with one bump profile each.
#[derive(Clone, Debug)]
pub struct DeRhamData {
    dim: usize,
    charts: Vec<Chart>,
    bumps: Vec<BumpProfile>,
    label: String,
}

impl DeRhamData {
    pub fn new(dim: usize, charts: Vec<Chart>, bumps: Vec<BumpProfile>) -> Result<Self> {
        if charts.is_empty() {
            return Err(Error::ChartCountZero);
        }
        if charts.len() != bumps.len() {
            return Err(Error::Validation(format!(
                "{} charts but {} bump profiles",
                charts.len(),
                bumps.len()
            )));
        }
        for (c, b) in charts.iter().zip(&bumps) {
            if b.dim() != dim || c.cutoff.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "chart {} in dimension {} with bump of dimension {} (ambient {dim})",
                    c.id,
                    c.cutoff.dim(),
                    b.dim()
                )));
            }
            c.check_inverse(16)?;
        }
        let label = charts
            .iter()
            .zip(&bumps)
            .map(|(c, b)| format!("{}:{}", c.id, b.name()))
            .collect::<Vec<_>>()
            .join(",");
        Ok(DeRhamData { dim, charts, bumps, label })
    }

    /// A single identity chart with cutoff 1.
    pub fn standard(bump: BumpProfile) -> Self {
        let m = bump.dim();
        DeRhamData::new(m, vec![Chart::identity(0, m)], vec![bump]).expect("standard data is valid")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn bumps(&self) -> &[BumpProfile] {
        &self.bumps
    }

    /// Identifier recorded in reports.
    pub fn id(&self) -> &str {
        &self.label
    }

    /// True for one identity chart with cutoff 1 (pure translation smoothing).
    pub fn is_translation(&self) -> bool {
        self.charts.len() == 1
            && self.charts[0].map.is_identity()
            && self.charts[0].cutoff == Plateau::everywhere(self.dim)
    }

    /// Ambient distance beyond which chart `i`'s kernel at scale `eps` vanishes.
    pub fn chart_reach(&self, i: usize, eps: f64) -> f64 {
        eps * self.bumps[i].support_radius() * self.charts[i].map.inverse_lipschitz()
    }

    /// Total reach of the composite operator.
    pub fn reach(&self, eps: f64) -> f64 {
        (0..self.charts.len()).map(|i| self.chart_reach(i, eps)).sum()
    }

    /// Smallest ambient length scale of the kernels at `eps`.
    pub fn resolution(&self, eps: f64) -> f64 {
        (0..self.charts.len())
            .map(|i| eps * self.bumps[i].support_radius() / self.charts[i].map.forward_lipschitz())
            .fold(f64::INFINITY, f64::min)
    }

    /// Product data on `X × Y` (single charts only): the product map and
    /// cutoff with bump `f1 ⊗ f2`.
    pub fn product(x: &DeRhamData, y: &DeRhamData) -> Result<DeRhamData> {
        if x.charts.len() != 1 || y.charts.len() != 1 {
            return Err(Error::Unsupported("product data is built from single-chart factors".into()));
        }
        let (m1, m2) = (x.dim, y.dim);
        let m = m1 + m2;
        let (cx, cy) = (&x.charts[0], &y.charts[0]);
        let map = match (&cx.map, &cy.map) {
            (ChartMap::Affine { a: a1, b: b1, .. }, ChartMap::Affine { a: a2, b: b2, .. }) => {
                let mut a = vec![0.0; m * m];
                for i in 0..m1 {
                    for j in 0..m1 {
                        a[i * m + j] = a1[i * m1 + j];
                    }
                }
                for i in 0..m2 {
                    for j in 0..m2 {
                        a[(m1 + i) * m + m1 + j] = a2[i * m2 + j];
                    }
                }
                let mut b = b1.clone();
                b.extend_from_slice(b2);
                ChartMap::affine(a, b)?
            }
            _ => return Err(Error::Unsupported("product of non-affine charts".into())),
        };
        let cutoff = Plateau {
            inner: cx.cutoff.inner.product(&cy.cutoff.inner),
            outer: cx.cutoff.outer.product(&cy.cutoff.outer),
        };
        let bump = BumpProfile::product(x.bumps[0].clone(), y.bumps[0].clone());
        let label = format!("({})x({})", x.label, y.label);
        Ok(DeRhamData::new(m, vec![Chart { id: 0, map, cutoff }], vec![bump])?.with_label(label))
    }
}

/// Box containing `h^{-1}(h(b) + ball(r))`, a conservative reach of a
/// chart-local kernel applied to sources in `b`.
pub fn widen(map: &ChartMap, b: &BBox, r: f64) -> BBox {
    b.expand(r * map.inverse_lipschitz())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_inverse_roundtrip() {
        let c = Chart {
            id: 0,
            map: ChartMap::affine(vec![2.0, 1.0, 0.0, -1.0], vec![0.5, 0.0]).unwrap(),
            cutoff: Plateau::centered(&[0.0, 0.0], 1.0, 2.0),
        };
        c.check_inverse(32).unwrap();
        assert!((c.map.inverse_lipschitz() - 1.0 / (3.0 - 5f64.sqrt()).sqrt()).abs() < 1e-9);
        assert!(ChartMap::affine(vec![1.0, 2.0, 2.0, 4.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn data_validation() {
        assert_eq!(DeRhamData::new(2, vec![], vec![]).unwrap_err(), Error::ChartCountZero);
        let d = DeRhamData::standard(BumpProfile::smooth_radial(2));
        assert!(d.is_translation());
        assert!(DeRhamData::new(3, vec![Chart::identity(0, 3)], vec![BumpProfile::poly4(2)]).is_err());
    }
}
