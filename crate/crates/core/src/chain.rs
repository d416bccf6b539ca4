//! Polynomial cells and chains of them (currents of integration).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gauss::tensor_rule;
use crate::geometry::BBox;
use crate::poly::Poly;

/// Tolerance below which two parametrizations are considered identical.
const MERGE_TOL: f64 = 1e-12;

/// A weighted, oriented polynomial map `σ: [0,1]^k → ℝ^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    map: Vec<Poly>,
    jac: Vec<Poly>,
    k: usize,
    pub weight: f64,
    pub orientation: i8,
}

impl Cell {
    /// Builds a cell and rejects maps whose Jacobian drops rank at interior
    /// sample nodes.
    pub fn new(map: Vec<Poly>, weight: f64, orientation: i8) -> Result<Self> {
        let cell = Cell::unchecked(map, weight, orientation)?;
        cell.check_immersed()?;
        Ok(cell)
    }

    fn unchecked(map: Vec<Poly>, weight: f64, orientation: i8) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::DimensionMismatch("cell with no components".into()));
        }
        let k = map[0].nvars();
        if map.iter().any(|p| p.nvars() != k) {
            return Err(Error::DimensionMismatch("cell components with different variable counts".into()));
        }
        if k > map.len() {
            return Err(Error::DimensionMismatch(format!("{k}-cell in ℝ^{}", map.len())));
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::Validation(format!("orientation must be ±1, got {orientation}")));
        }
        if !weight.is_finite() {
            return Err(Error::NonFiniteValue("cell weight".into()));
        }
        let mut jac = Vec::with_capacity(map.len() * k);
        for p in &map {
            for j in 0..k {
                jac.push(p.derivative(j));
            }
        }
        Ok(Cell { map, jac, k, weight, orientation })
    }

    fn check_immersed(&self) -> Result<()> {
        if self.k == 0 {
            return Ok(());
        }
        let (pts, _) = tensor_rule(&BBox::unit(self.k), 3);
        let m = self.dim();
        let mut jac = vec![0.0; m * self.k];
        for u in pts.chunks(self.k) {
            self.jacobian(u, &mut jac);
            let d = DMatrix::from_row_slice(m, self.k, &jac);
            let sv = d.singular_values();
            let max = sv.max();
            let min = sv.min();
            if !(max > 0.0) || min < 1e-9 * max {
                return Err(Error::DegenerateCell(format!("Jacobian rank drops at u = {u:?}")));
            }
        }
        Ok(())
    }

    /// The 0-cell at `p`.
    pub fn point(p: &[f64], weight: f64) -> Self {
        let map = p.iter().map(|&c| Poly::constant(0, c)).collect();
        let o = if weight < 0.0 { -1 } else { 1 };
        Cell::unchecked(map, weight.abs(), o).expect("valid point cell")
    }

    /// The affine cell `u ↦ origin + Σ u_j edges[j]`.
    pub fn affine(origin: &[f64], edges: &[Vec<f64>]) -> Result<Self> {
        let k = edges.len();
        let map = (0..origin.len())
            .map(|i| {
                let coeffs: Vec<f64> = edges.iter().map(|e| e[i]).collect();
                if k == 0 {
                    Poly::constant(0, origin[i])
                } else {
                    Poly::affine(origin[i], &coeffs)
                }
            })
            .collect();
        Cell::new(map, 1.0, 1)
    }

    /// The segment from `a` to `b`.
    pub fn segment(a: &[f64], b: &[f64]) -> Result<Self> {
        let e: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
        Cell::affine(a, &[e])
    }

    /// The axis-aligned box as a positively oriented `m`-cell in `ℝ^m`.
    pub fn from_box(b: &BBox) -> Result<Self> {
        let m = b.dim();
        let edges: Vec<Vec<f64>> = (0..m)
            .map(|j| {
                let mut e = vec![0.0; m];
                e[j] = b.width(j);
                e
            })
            .collect();
        Cell::affine(&b.lo, &edges)
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn param_dim(&self) -> usize {
        self.k
    }

    pub fn components(&self) -> &[Poly] {
        &self.map
    }

    /// `weight · orientation`.
    pub fn signed_weight(&self) -> f64 {
        self.weight * self.orientation as f64
    }

    pub fn eval(&self, u: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.map) {
            *o = p.eval(u);
        }
    }

    /// Row-major `m × k` Jacobian at `u`.
    pub fn jacobian(&self, u: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.jac) {
            *o = p.eval(u);
        }
    }

    /// Enclosure of `σ(B)`: interval arithmetic intersected with the
    /// mean-value form around the box center.
    pub fn image_bbox(&self, b: &BBox) -> BBox {
        let m = self.dim();
        let c = b.center();
        let mut lo = vec![0.0; m];
        let mut hi = vec![0.0; m];
        for i in 0..m {
            let (il, ih) = self.map[i].range_on(b);
            let ci = self.map[i].eval(&c);
            let mut r = 0.0;
            for j in 0..self.k {
                let (dl, dh) = self.jac[i * self.k + j].range_on(b);
                r += dl.abs().max(dh.abs()) * 0.5 * b.width(j);
            }
            lo[i] = il.max(ci - r);
            hi[i] = ih.min(ci + r);
        }
        BBox::new(lo, hi)
    }

    /// Upper bound of `|∂σ/∂u_j|` over the box, per parameter axis.
    pub fn axis_speeds(&self, b: &BBox) -> Vec<f64> {
        (0..self.k)
            .map(|j| {
                (0..self.dim())
                    .map(|i| {
                        let (dl, dh) = self.jac[i * self.k + j].range_on(b);
                        let v = dl.abs().max(dh.abs());
                        v * v
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// The face `u_var = side` as a `(k-1)`-cell with this cell's weight.
    pub fn face(&self, var: usize, side: f64) -> Cell {
        let map = self.map.iter().map(|p| p.face(var, side)).collect();
        Cell::unchecked(map, self.weight, self.orientation).expect("faces of valid cells are valid")
    }

    pub fn flipped(&self) -> Cell {
        let mut c = self.clone();
        c.orientation = -c.orientation;
        c
    }

    /// Reparametrizes the cell as `σ ∘ τ` for an affine `τ` mapping the unit
    /// cube onto the sub-box `b`, keeping orientation.
    pub fn restrict(&self, b: &BBox) -> Cell {
        let subs: Vec<Poly> = (0..self.k).map(|j| {
            let mut c = vec![0.0; self.k];
            c[j] = b.width(j);
            Poly::affine(b.lo[j], &c)
        }).collect();
        let map = self.map.iter().map(|p| p.compose(self.k, &subs)).collect();
        Cell::unchecked(map, self.weight, self.orientation).expect("restriction of a valid cell")
    }

    /// Composes with a polynomial map `F: ℝ^m → ℝ^n`.
    pub fn push_forward(&self, f: &[Poly]) -> Result<Cell> {
        let map = f.iter().map(|p| p.compose(self.k, &self.map)).collect();
        Cell::new(map, self.weight, self.orientation)
    }

    fn same_map(&self, other: &Cell) -> bool {
        self.map.len() == other.map.len()
            && self.k == other.k
            && self.map.iter().zip(&other.map).all(|(a, b)| a.max_coeff_diff(b) <= MERGE_TOL)
    }
}

/// A formal sum of `k`-cells in `ℝ^m`; a current of dimension `k` and
/// degree `m - k`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellChain {
    dim: usize,
    k: usize,
    cells: Vec<Cell>,
    compact: bool,
}

impl CellChain {
    pub fn new(dim: usize, k: usize, cells: Vec<Cell>) -> Result<Self> {
        for c in &cells {
            if c.dim() != dim || c.param_dim() != k {
                return Err(Error::DimensionMismatch(format!(
                    "{}-cell in ℝ^{} added to a {k}-chain in ℝ^{dim}",
                    c.param_dim(),
                    c.dim()
                )));
            }
        }
        Ok(CellChain { dim, k, cells, compact: true })
    }

    pub fn empty(dim: usize, k: usize) -> Self {
        CellChain { dim, k, cells: Vec::new(), compact: true }
    }

    pub fn single(cell: Cell) -> Self {
        CellChain { dim: cell.dim(), k: cell.param_dim(), cells: vec![cell], compact: true }
    }

    /// A closed counter-clockwise curve in the plane made of two parabolic
    /// arcs through `center ± (half_width, 0)`, bulging by `height`.
    pub fn lens(center: &[f64], half_width: f64, height: f64) -> Result<Self> {
        if center.len() != 2 {
            return Err(Error::DimensionMismatch("lens center must be planar".into()));
        }
        let (cx, cy, a, b) = (center[0], center[1], half_width, height);
        let x = Poly::affine(cx - a, &[2.0 * a]);
        let bulge = Poly::from_terms(1, vec![(vec![1], 4.0 * b), (vec![2], -4.0 * b)]);
        let lower = Cell::new(vec![x.clone(), Poly::constant(1, cy).add(&bulge.scale(-1.0))], 1.0, 1)?;
        let upper = Cell::new(vec![x, Poly::constant(1, cy).add(&bulge)], 1.0, -1)?;
        CellChain::new(2, 1, vec![lower, upper])
    }

    /// Marks the chain as a truncation of a non-compact object (a line, a
    /// plane): its far boundary is an artifact and lies outside every test
    /// form support considered.
    pub fn truncated(mut self) -> Self {
        self.compact = false;
        self
    }

    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn param_dim(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> usize {
        self.dim - self.k
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn push(&mut self, c: Cell) -> Result<()> {
        if c.dim() != self.dim || c.param_dim() != self.k {
            return Err(Error::DimensionMismatch("cell shape differs from chain".into()));
        }
        self.cells.push(c);
        Ok(())
    }

    pub fn scale(&self, s: f64) -> CellChain {
        let mut out = self.clone();
        for c in &mut out.cells {
            c.weight *= s.abs();
            if s < 0.0 {
                c.orientation = -c.orientation;
            }
        }
        out
    }

    pub fn negate(&self) -> CellChain {
        self.scale(-1.0)
    }

    pub fn add(&self, other: &CellChain) -> Result<CellChain> {
        if self.dim != other.dim || self.k != other.k {
            return Err(Error::DimensionMismatch("adding chains of different shape".into()));
        }
        let mut out = self.clone();
        out.cells.extend(other.cells.iter().cloned());
        out.compact = self.compact && other.compact;
        Ok(out)
    }

    /// Bounding box of the support.
    pub fn bbox(&self) -> BBox {
        let mut acc = BBox::cube(self.dim, f64::INFINITY, f64::NEG_INFINITY);
        for c in &self.cells {
            acc = acc.union(&c.image_bbox(&BBox::unit(self.k)));
        }
        acc
    }

    /// Merges cells with identical parametrizations and drops zero weights.
    pub fn simplify(&self) -> CellChain {
        let mut merged: Vec<(Cell, f64)> = Vec::new();
        for c in &self.cells {
            match merged.iter_mut().find(|(m, _)| m.same_map(c)) {
                Some((_, w)) => *w += c.signed_weight(),
                None => merged.push((c.clone(), c.signed_weight())),
            }
        }
        let cells = merged
            .into_iter()
            .filter(|(_, w)| w.abs() > MERGE_TOL)
            .map(|(mut c, w)| {
                c.weight = w.abs();
                c.orientation = if w < 0.0 { -1 } else { 1 };
                c
            })
            .collect();
        CellChain { dim: self.dim, k: self.k, cells, compact: self.compact }
    }

    /// Boundary `Σ_j (-1)^j (face_{j,0} - face_{j,1})` (with `j` counted from
    /// 1), followed by cancellation of identical faces.
    pub fn boundary(&self) -> CellChain {
        if self.k == 0 {
            return CellChain::empty(self.dim, 0);
        }
        let mut cells = Vec::new();
        for c in &self.cells {
            for j in 0..self.k {
                // (-1)^{j+1} with 0-based j.
                let s: i8 = if j % 2 == 0 { -1 } else { 1 };
                let mut f0 = c.face(j, 0.0);
                f0.orientation *= s;
                let mut f1 = c.face(j, 1.0);
                f1.orientation *= -s;
                cells.push(f0);
                cells.push(f1);
            }
        }
        CellChain { dim: self.dim, k: self.k - 1, cells, compact: self.compact }.simplify()
    }

    /// Image under a polynomial map `ℝ^m → ℝ^n`.
    pub fn push_forward(&self, f: &[Poly]) -> Result<CellChain> {
        let cells = self.cells.iter().map(|c| c.push_forward(f)).collect::<Result<Vec<_>>>()?;
        Ok(CellChain { dim: f.len(), k: self.k, cells, compact: self.compact })
    }
}

/// A finite sum of weighted Dirac masses, a current of top degree.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMass {
    pub dim: usize,
    pub points: Vec<(Vec<f64>, f64)>,
}

impl PointMass {
    pub fn new(dim: usize, points: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        for (p, c) in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch("point mass location".into()));
            }
            if !c.is_finite() {
                return Err(Error::NonFiniteValue("point mass coefficient".into()));
            }
        }
        Ok(PointMass { dim, points })
    }

    pub fn to_chain(&self) -> CellChain {
        let cells = self.points.iter().map(|(p, c)| Cell::point(p, *c)).collect();
        CellChain { dim: self.dim, k: 0, cells, compact: true }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_boundary() {
        let s = CellChain::single(Cell::segment(&[0.0, 0.0], &[1.0, 0.0]).unwrap());
        let b = s.boundary();
        assert_eq!(b.cells().len(), 2);
        let mut got: Vec<(f64, f64)> = b
            .cells()
            .iter()
            .map(|c| (c.components()[0].eval(&[]), c.signed_weight()))
            .collect();
        got.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert_eq!(got, vec![(0.0, -1.0), (1.0, 1.0)]);
    }

    #[test]
    fn square_boundary_and_its_boundary() {
        let sq = CellChain::single(Cell::from_box(&BBox::unit(2)).unwrap());
        let b = sq.boundary();
        assert_eq!(b.cells().len(), 4);
        assert!(b.boundary().is_empty());
        let cube = CellChain::single(Cell::from_box(&BBox::unit(3)).unwrap());
        assert_eq!(cube.boundary().cells().len(), 6);
        assert!(cube.boundary().boundary().is_empty());
    }

    #[test]
    fn degenerate_cells_are_rejected() {
        let map = vec![Poly::var(2, 0), Poly::var(2, 0)];
        assert!(matches!(Cell::new(map, 1.0, 1), Err(Error::DegenerateCell(_))));
    }

    #[test]
    fn image_bbox_encloses_samples() {
        let c = Cell::new(
            vec![Poly::var(1, 0).pow(2), Poly::from_terms(1, vec![(vec![3], 1.0), (vec![1], -0.5)])],
            1.0,
            1,
        )
        .unwrap();
        let b = BBox::new(vec![0.2], vec![0.6]);
        let ib = c.image_bbox(&b);
        let mut out = [0.0; 2];
        for i in 0..=20 {
            c.eval(&[0.2 + 0.4 * i as f64 / 20.0], &mut out);
            assert!(ib.expand(1e-12).contains(&out));
        }
    }
}
