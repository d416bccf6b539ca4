//! A numerical look at how a chain's mass projects onto coordinate planes.
//!
//! The mass measure of the chain is pushed to the plane spanned by the
//! selected axes and binned on grids of `n` and `2n` cells per axis. A
//! bounded density makes the largest bin mass drop by `2^k` under refinement;
//! an atom keeps it fixed. The report is advisory and never blocks anything.

use serde::Serialize;

use crate::chain::CellChain;
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::integrate::cell_nodes;
use crate::smoothing::leaves_of;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub axes: Vec<usize>,
    /// Cells per axis of the coarse and the fine grid.
    pub grids: [usize; 2],
    pub total_mass: f64,
    /// Largest bin mass divided by bin volume, per grid.
    pub max_density: [f64; 2],
    /// Largest bin mass as a fraction of the total, per grid.
    pub max_fraction: [f64; 2],
    pub suspect_atom: bool,
    pub integrable_singularity: bool,
}

impl DensityReport {
    pub fn bounded(&self) -> bool {
        !self.suspect_atom && !self.integrable_singularity
    }
}

struct Binned {
    total: f64,
    max_mass: f64,
    volume: f64,
}

fn bin(chain: &CellChain, axes: &[usize], grid: &BBox, n: usize) -> Binned {
    let (m, k) = (chain.dim(), chain.param_dim());
    let d = axes.len();
    let widths: Vec<f64> = (0..d).map(|a| grid.width(a) / n as f64).collect();
    let leaf = widths.iter().cloned().fold(f64::INFINITY, f64::min) / 4.0;
    let mut bins = vec![0.0; n.pow(d as u32)];
    let mut total = 0.0;
    for cell in chain.cells() {
        let mut leaves = Vec::new();
        leaves_of(cell, &BBox::everything(m), leaf, 40, &mut leaves);
        for b in leaves {
            let nodes = cell_nodes(cell, &b, 4);
            for (q, gw) in nodes.weights.iter().enumerate() {
                let jac = &nodes.jacobians[q * m * k..(q + 1) * m * k];
                let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| (0..m).map(|r| jac[r * k + i] * jac[r * k + j]).sum::<f64>());
                let mass = gw * cell.weight.abs() * gram.determinant().max(0.0).sqrt();
                let p = &nodes.points[q * m..(q + 1) * m];
                let mut idx = 0;
                for (a, &ax) in axes.iter().enumerate().rev() {
                    let t = ((p[ax] - grid.lo[a]) / widths[a]).floor().clamp(0.0, (n - 1) as f64) as usize;
                    idx = idx * n + t;
                }
                bins[idx] += mass;
                total += mass;
            }
        }
    }
    let max_mass = bins.iter().cloned().fold(0.0, f64::max);
    Binned { total, max_mass, volume: widths.iter().product() }
}

/// Bins the mass of `chain` projected to the coordinates `axes` on grids of
/// `n` and `2n` cells per axis.
pub fn lebesgue_diagnostic(chain: &CellChain, axes: &[usize], n: usize) -> Result<DensityReport> {
    let k = chain.param_dim();
    if axes.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "projection to a {}-plane of a {k}-dimensional chain",
            axes.len()
        )));
    }
    if let Some(&a) = axes.iter().find(|&&a| a >= chain.dim()) {
        return Err(Error::DimensionMismatch(format!("axis {a} in ℝ^{}", chain.dim())));
    }
    if n == 0 {
        return Err(Error::Validation("grid needs at least one cell".into()));
    }
    let full = chain.bbox();
    let scale = full.diameter().max(1e-3);
    let mut grid = full.select(axes);
    for a in 0..k {
        if grid.width(a) < 1e-9 * scale {
            let c = 0.5 * (grid.lo[a] + grid.hi[a]);
            grid.lo[a] = c - 0.5 * scale;
            grid.hi[a] = c + 0.5 * scale;
        }
    }
    let grid = grid.expand(1e-9 * scale);
    let coarse = bin(chain, axes, &grid, n);
    let fine = bin(chain, axes, &grid, 2 * n);
    let total = fine.total;
    let frac = |b: &Binned| if total > 0.0 { b.max_mass / total } else { 0.0 };
    let dens = |b: &Binned| b.max_mass / b.volume;
    let shrink = if coarse.max_mass > 0.0 { fine.max_mass / coarse.max_mass } else { 0.0 };
    let bounded_shrink = 0.5f64.powi(k as i32);
    let suspect_atom = total > 0.0 && shrink > 0.9;
    let integrable_singularity = !suspect_atom && total > 0.0 && shrink > 1.2 * bounded_shrink;
    Ok(DensityReport {
        axes: axes.to_vec(),
        grids: [n, 2 * n],
        total_mass: total,
        max_density: [dens(&coarse), dens(&fine)],
        max_fraction: [frac(&coarse), frac(&fine)],
        suspect_atom,
        integrable_singularity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Cell;
    use crate::poly::Poly;

    #[test]
    fn horizontal_segment_has_unit_density() {
        let s = CellChain::single(Cell::segment(&[0.0, 0.0], &[1.0, 0.0]).unwrap());
        let r = lebesgue_diagnostic(&s, &[0], 16).unwrap();
        assert!(r.bounded(), "{r:?}");
        assert!((r.max_density[1] - 1.0).abs() < 1e-6, "{r:?}");
        assert!((r.total_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vertical_segment_is_an_atom() {
        let s = CellChain::single(Cell::segment(&[0.0, 0.0], &[0.0, 1.0]).unwrap());
        let r = lebesgue_diagnostic(&s, &[0], 16).unwrap();
        assert!(r.suspect_atom, "{r:?}");
    }

    #[test]
    fn parabola_has_an_integrable_peak() {
        // t ↦ (t², t) for t in [-1, 1].
        let s = CellChain::single(
            Cell::new(vec![Poly::from_terms(1, vec![(vec![2], 4.0), (vec![1], -4.0), (vec![0], 1.0)]), Poly::affine(-1.0, &[2.0])], 1.0, 1)
                .unwrap(),
        );
        let r = lebesgue_diagnostic(&s, &[0], 32).unwrap();
        assert!(r.integrable_singularity && !r.suspect_atom, "{r:?}");
    }
}
