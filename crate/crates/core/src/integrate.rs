//! Integration of form fields over chains.
//!
//! Smooth integrands use adaptive dyadic subdivision of each cell's parameter
//! box. Integrands with a declared resolution (mollified forms) use fixed
//! leaves whose image is a fraction of that length, so the kernel is
//! resolved. In both modes parameter boxes whose image misses the support of
//! the field are dropped, which makes far-away contributions exactly zero.

use rayon::prelude::*;

use crate::chain::{Cell, CellChain};
use crate::error::{Error, Result};
use crate::exterior::pullback_top;
use crate::form::FormField;
use crate::gauss::tensor_rule;
use crate::geometry::BBox;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadOptions {
    /// Gauss–Legendre nodes per axis in adaptive mode.
    pub nodes: usize,
    /// Gauss–Legendre nodes per axis on kernel-resolving leaves.
    pub kernel_nodes: usize,
    /// Leaf image diameter as a multiple of the field's resolution.
    pub leaf_scale: f64,
    /// Relative agreement required between two refinements.
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections along any root-to-leaf path.
    pub max_depth: usize,
    /// Gauss–Legendre nodes per axis and sub-boxes per axis of discrete
    /// bump rules (used when convolving explicit forms).
    pub bump_nodes: usize,
    pub bump_pieces: usize,
    /// Nodes of the segment integral in the homotopy operator.
    pub t_nodes: usize,
    pub parallel: bool,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            nodes: 16,
            kernel_nodes: 10,
            leaf_scale: 0.25,
            rel_tol: 1e-10,
            abs_tol: 1e-15,
            max_depth: 60,
            bump_nodes: 8,
            bump_pieces: 2,
            t_nodes: 12,
            parallel: true,
        }
    }
}

impl QuadOptions {
    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }
}

/// Axis along which bisection shrinks the image the most.
fn split_axis(cell: &Cell, b: &BBox) -> usize {
    let speeds = cell.axis_speeds(b);
    (0..b.dim())
        .max_by(|&i, &j| {
            let a = b.width(i) * speeds[i].max(1e-300);
            let c = b.width(j) * speeds[j].max(1e-300);
            a.partial_cmp(&c).unwrap()
        })
        .unwrap_or(0)
}

/// Quadrature nodes of `cell` over the parameter box `b`: image points,
/// row-major Jacobians and weights (parameter weights only).
pub struct Nodes {
    pub points: Vec<f64>,
    pub jacobians: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn cell_nodes(cell: &Cell, b: &BBox, n: usize) -> Nodes {
    let (m, k) = (cell.dim(), cell.param_dim());
    let (us, ws) = tensor_rule(b, n);
    let count = ws.len();
    let mut points = vec![0.0; count * m];
    let mut jacobians = vec![0.0; count * m * k];
    for q in 0..count {
        let u = &us[q * k..(q + 1) * k];
        cell.eval(u, &mut points[q * m..(q + 1) * m]);
        cell.jacobian(u, &mut jacobians[q * m * k..(q + 1) * m * k]);
    }
    Nodes { points, jacobians, weights: ws }
}

fn box_integral(cell: &Cell, b: &BBox, field: &dyn FormField, n: usize) -> Result<f64> {
    let (m, k) = (cell.dim(), cell.param_dim());
    let nodes = cell_nodes(cell, b, n);
    let vals = field.eval_batch(&nodes.points)?;
    let nb = vals.len() / nodes.weights.len();
    let mut acc = 0.0;
    for (q, w) in nodes.weights.iter().enumerate() {
        let c = &vals[q * nb..(q + 1) * nb];
        if c.iter().all(|&v| v == 0.0) {
            continue;
        }
        acc += w * pullback_top(m, k, c, &nodes.jacobians[q * m * k..(q + 1) * m * k]);
    }
    Ok(acc * cell.signed_weight())
}

fn misses(cell: &Cell, b: &BBox, support: &Option<BBox>) -> bool {
    match support {
        Some(s) => !cell.image_bbox(b).intersects(s),
        None => false,
    }
}

fn collect_leaves(
    cell: &Cell,
    b: BBox,
    depth: usize,
    h: f64,
    support: &Option<BBox>,
    opts: &QuadOptions,
    out: &mut Vec<BBox>,
) {
    if misses(cell, &b, support) {
        return;
    }
    if cell.param_dim() == 0 || depth >= opts.max_depth || cell.image_bbox(&b).diameter() <= h {
        out.push(b);
        return;
    }
    let (l, r) = b.split(split_axis(cell, &b));
    collect_leaves(cell, l, depth + 1, h, support, opts, out);
    collect_leaves(cell, r, depth + 1, h, support, opts, out);
}

/// Gauss rules of `n` and `n/2` nodes per axis on `b`, plus `∫|integrand|`
/// from the finer rule. Comparing the two rules sees every parameter axis at
/// once, unlike comparing a box with its halves along one axis.
fn box_estimate(cell: &Cell, b: &BBox, field: &dyn FormField, n: usize) -> Result<(f64, f64, f64)> {
    let (m, k) = (cell.dim(), cell.param_dim());
    let mut out = [0.0; 2];
    let mut mass = 0.0;
    for (slot, nn) in [n, (n / 2).max(2)].into_iter().enumerate() {
        let nodes = cell_nodes(cell, b, nn);
        let vals = field.eval_batch(&nodes.points)?;
        let nb = vals.len() / nodes.weights.len();
        for (q, w) in nodes.weights.iter().enumerate() {
            let c = &vals[q * nb..(q + 1) * nb];
            if c.iter().all(|&v| v == 0.0) {
                continue;
            }
            let v = w * pullback_top(m, k, c, &nodes.jacobians[q * m * k..(q + 1) * m * k]);
            out[slot] += v;
            if slot == 0 {
                mass += v.abs();
            }
        }
    }
    let sw = cell.signed_weight();
    Ok((out[0] * sw, out[1] * sw, mass * sw.abs()))
}

fn adaptive(
    cell: &Cell,
    b: &BBox,
    depth: usize,
    field: &dyn FormField,
    support: &Option<BBox>,
    opts: &QuadOptions,
) -> Result<f64> {
    if misses(cell, b, support) {
        return Ok(0.0);
    }
    let (fine, coarse, mass) = box_estimate(cell, b, field, opts.nodes)?;
    let tol = opts.rel_tol * fine.abs() + opts.abs_tol + 1e-13 * mass;
    if (fine - coarse).abs() <= tol || depth >= opts.max_depth {
        return Ok(fine);
    }
    let (l, r) = b.split(split_axis(cell, b));
    Ok(adaptive(cell, &l, depth + 1, field, support, opts)? + adaptive(cell, &r, depth + 1, field, support, opts)?)
}

/// `∫_T ω` for a chain `T` of dimension `k` and a field `ω` of degree `k`.
pub fn integrate_chain(chain: &CellChain, field: &dyn FormField, opts: &QuadOptions) -> Result<f64> {
    if field.dim() != chain.dim() {
        return Err(Error::DimensionMismatch(format!(
            "form on ℝ^{} integrated over a chain in ℝ^{}",
            field.dim(),
            chain.dim()
        )));
    }
    if field.degree() != chain.param_dim() {
        return Err(Error::DimensionMismatch(format!(
            "degree-{} form integrated over a {}-chain",
            field.degree(),
            chain.param_dim()
        )));
    }
    let support = field.support();
    if let Some(s) = &support {
        if s.is_empty() {
            return Ok(0.0);
        }
    }
    let k = chain.param_dim();
    let total = match field.resolution() {
        Some(res) => {
            let h = opts.leaf_scale * res;
            let mut leaves: Vec<(usize, BBox)> = Vec::new();
            for (ci, cell) in chain.cells().iter().enumerate() {
                let mut bs = Vec::new();
                collect_leaves(cell, BBox::unit(k), 0, h, &support, opts, &mut bs);
                leaves.extend(bs.into_iter().map(|b| (ci, b)));
            }
            let eval = |(ci, b): &(usize, BBox)| box_integral(&chain.cells()[*ci], b, field, opts.kernel_nodes);
            let parts: Vec<Result<f64>> = if opts.parallel {
                leaves.par_iter().map(eval).collect()
            } else {
                leaves.iter().map(eval).collect()
            };
            let mut s = 0.0;
            for p in parts {
                s += p?;
            }
            s
        }
        None => {
            let mut s = 0.0;
            for cell in chain.cells() {
                let b = BBox::unit(k);
                if misses(cell, &b, &support) {
                    continue;
                }
                if k == 0 {
                    s += box_integral(cell, &b, field, 1)?;
                    continue;
                }
                s += adaptive(cell, &b, 0, field, &support, opts)?;
            }
            s
        }
    };
    if !total.is_finite() {
        return Err(Error::NonFiniteValue("chain quadrature".into()));
    }
    Ok(total)
}

/// `∫_{ℝ^m} ω` for a compactly supported top-degree field.
pub fn integrate_space(field: &dyn FormField, opts: &QuadOptions) -> Result<f64> {
    let m = field.dim();
    if field.degree() != m {
        return Err(Error::DimensionMismatch(format!(
            "integrating a degree-{} form over ℝ^{m}",
            field.degree()
        )));
    }
    let s = field
        .support()
        .ok_or_else(|| Error::Unsupported("integration over ℝ^m needs a compactly supported form".into()))?;
    if s.is_empty() || s.volume() == 0.0 {
        return Ok(0.0);
    }
    if s.lo.iter().chain(&s.hi).any(|v| !v.is_finite()) {
        return Err(Error::Unsupported("integrand support is unbounded".into()));
    }
    let chain = CellChain::single(Cell::from_box(&s)?);
    integrate_chain(&chain, field, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::SmoothForm;
    use crate::geometry::Plateau;
    use crate::poly::Poly;
    use crate::scalar::ScalarField;

    #[test]
    fn unit_segment_against_dx1() {
        let t = CellChain::single(Cell::segment(&[0.0, 0.0], &[1.0, 0.0]).unwrap());
        let phi = SmoothForm::new(2, 1, vec![(vec![0], ScalarField::Const(1.0))])
            .unwrap()
            .with_support(BBox::cube(2, -2.0, 2.0));
        let v = integrate_chain(&t, &phi, &QuadOptions::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn plateau_area() {
        // ∫ of a product of 1-d plateaus factorizes.
        let p = Plateau::new(BBox::cube(2, -0.5, 0.5), BBox::cube(2, -1.0, 1.0));
        let f = SmoothForm::top(2, ScalarField::plateau(p.clone()));
        let v = integrate_space(&f, &QuadOptions::default()).unwrap();
        let one_d = SmoothForm::top(1, ScalarField::plateau(Plateau::new(BBox::cube(1, -0.5, 0.5), BBox::cube(1, -1.0, 1.0))));
        let w = integrate_space(&one_d, &QuadOptions::default()).unwrap();
        assert!((v - w * w).abs() < 1e-9);
        // By symmetry of the step, the 1-d integral is exactly 1.5.
        assert!((w - 1.5).abs() < 1e-9, "{w}");
    }

    #[test]
    fn parabola_odd_integrand_vanishes() {
        let t = CellChain::single(
            Cell::new(
                vec![Poly::affine(-1.0, &[2.0]).pow(2), Poly::affine(-1.0, &[2.0])],
                1.0,
                1,
            )
            .unwrap(),
        );
        let phi = SmoothForm::new(2, 1, vec![(vec![1], ScalarField::Poly(Poly::var(2, 1)))])
            .unwrap()
            .with_support(BBox::cube(2, -3.0, 3.0));
        assert!(integrate_chain(&t, &phi, &QuadOptions::default()).unwrap().abs() < 1e-15);
    }
}
