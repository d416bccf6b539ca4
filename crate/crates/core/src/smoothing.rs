//! The smoothing operators `R_ε` and `A_ε`.
//!
//! For a single chart `h` with cutoff `g` and bump `f`, the operator is
//! `R T = h^{-1}_* r_ε h_* (g T) + (1 - g) T`, where `r_ε` convolves with
//! `f^ε(x) = ε^{-m} f(x/ε)`. Several charts compose in order,
//! `R = R^1 ∘ ⋯ ∘ R^n`, so chart `n` acts first.
//!
//! On a chain, `r_ε T` is the form whose `dx_J` coefficient at `z` is
//! `sign(J, Jᶜ) Σ_cells ± w ∫ f^ε(z - σ(u)) det Dσ(u)[Jᶜ] du`. With this
//! convention `∫ r_ε T ∧ φ = T(r_ε^* φ)` where
//! `r_ε^* φ(y) = ∫ φ(y + x) f^ε(x) dx`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::bump::BumpRule;
use crate::chain::{Cell, CellChain};
use crate::charts::DeRhamData;
use crate::current::{evaluate_field, Current};
use crate::error::{Error, Result};
use crate::exterior::{basis, binomial, chain_minor_vector, det, indices, pullback_linear, rank};
use crate::form::{points_bbox, FormField, SmoothForm};
use crate::geometry::BBox;
use crate::integrate::{cell_nodes, integrate_chain, QuadOptions};

/// Largest admissible `ε` (bump profiles live in the unit ball).
pub const EPS_MARGIN: f64 = 1.0;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || eps > EPS_MARGIN {
        return Err(Error::EpsilonTooLarge { eps, margin: EPS_MARGIN });
    }
    Ok(())
}

fn inverse_matrix(m: usize, a: &[f64]) -> Vec<f64> {
    let inv = nalgebra::DMatrix::from_row_slice(m, m, a)
        .try_inverse()
        .expect("chart Jacobian is invertible");
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            out[i * m + j] = inv[(i, j)];
        }
    }
    out
}

#[derive(Clone)]
enum Source {
    Chain(CellChain),
    Form(Arc<dyn FormField>),
}

/// `R_ε T` as a smooth form, evaluated by quadrature over the source.
#[derive(Clone)]
pub struct MollifiedForm {
    dim: usize,
    degree: usize,
    eps: f64,
    data: Arc<DeRhamData>,
    source: Source,
    opts: QuadOptions,
    rules: Vec<BumpRule>,
    /// Support box of each layer; entry `i` covers charts `i..n`.
    layer_support: Vec<Option<BBox>>,
    fast: bool,
}

/// Kernel node of a chain source in chart coordinates.
struct KernelNodes {
    positions: Vec<f64>,
    weights: Vec<f64>,
}

impl MollifiedForm {
    fn build(source: Source, eps: f64, data: Arc<DeRhamData>, opts: QuadOptions) -> Result<Self> {
        check_eps(eps)?;
        let m = data.dim();
        let (dim, degree) = match &source {
            Source::Chain(c) => (c.dim(), c.degree()),
            Source::Form(f) => (f.dim(), f.degree()),
        };
        if dim != m {
            return Err(Error::DimensionMismatch(format!(
                "current on ℝ^{dim} with de Rham data on ℝ^{m}"
            )));
        }
        let n = data.charts().len();
        let rules = data
            .bumps()
            .iter()
            .map(|b| b.rule(opts.bump_nodes, opts.bump_pieces))
            .collect();
        let base: Option<BBox> = match &source {
            Source::Chain(_) => Some(BBox::cube(m, 1.0, -1.0)),
            Source::Form(f) => f.support(),
        };
        let chain_box = match &source {
            Source::Chain(c) => Some(c.bbox()),
            Source::Form(_) => None,
        };
        let mut layer_support = vec![None; n + 1];
        layer_support[n] = base;
        for i in (0..n).rev() {
            let r = data.chart_reach(i, eps);
            let g = data.charts()[i].cutoff.support();
            let below = layer_support[i + 1].clone();
            let mut s = below.clone();
            if let Some(b) = &below {
                let conv = b.intersect(&g);
                if !conv.is_empty() {
                    s = Some(join(b, &conv.expand(r)));
                }
            }
            if let (Some(cb), Some(cur)) = (&chain_box, &s) {
                let part = cb.intersect(&g);
                if !part.is_empty() {
                    s = Some(join(cur, &part.expand(r)));
                }
            }
            layer_support[i] = s;
        }
        let fast = data.is_translation() && matches!(source, Source::Chain(_));
        Ok(MollifiedForm { dim, degree, eps, data, source, opts, rules, layer_support, fast })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn data(&self) -> &DeRhamData {
        &self.data
    }

    /// Dense coefficients at a single point.
    pub fn coefficients(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.eval_batch(z)
    }

    fn nb(&self) -> usize {
        binomial(self.dim, self.degree)
    }

    /// Kernel nodes of the chain source for chart `i`, restricted to sources
    /// that can reach `region`.
    fn kernel_nodes(&self, chain: &CellChain, i: usize, region: &BBox) -> KernelNodes {
        let m = self.dim;
        let k = chain.param_dim();
        let p = self.degree;
        let nb = binomial(m, p);
        let chart = &self.data.charts()[i];
        let identity = chart.map.is_identity();
        let reach = self.data.chart_reach(i, self.eps);
        let mut search = region.expand(reach);
        search = search.intersect(&chart.cutoff.support());
        let leaf = self.opts.leaf_scale * self.data.resolution(self.eps);
        let mut positions = Vec::new();
        let mut weights = Vec::new();
        if search.is_empty() {
            return KernelNodes { positions, weights };
        }
        let later: Vec<_> = self.data.charts()[i + 1..].iter().map(|c| &c.cutoff).collect();
        let mut dh = vec![0.0; m * m];
        let mut composed = vec![0.0; m * k];
        let mut w = vec![0.0; m];
        let mut minors = vec![0.0; nb];
        for cell in chain.cells() {
            let mut leaves = Vec::new();
            descend(cell, BBox::unit(k), &search, leaf, 0, self.opts.max_depth, &mut leaves);
            for b in leaves {
                let nodes = cell_nodes(cell, &b, self.opts.kernel_nodes);
                for (q, gw) in nodes.weights.iter().enumerate() {
                    let y = &nodes.points[q * m..(q + 1) * m];
                    let mut cut = chart.cutoff.eval(y);
                    for g in &later {
                        if cut == 0.0 {
                            break;
                        }
                        cut *= 1.0 - g.eval(y);
                    }
                    if cut == 0.0 {
                        continue;
                    }
                    let jac = &nodes.jacobians[q * m * k..(q + 1) * m * k];
                    let scale = gw * cell.signed_weight() * cut;
                    if identity {
                        positions.extend_from_slice(y);
                        chain_minor_vector(m, k, jac, &mut minors);
                    } else {
                        chart.map.forward(y, &mut w);
                        positions.extend_from_slice(&w);
                        chart.map.jacobian(y, &mut dh);
                        for r in 0..m {
                            for c in 0..k {
                                composed[r * k + c] = (0..m).map(|s| dh[r * m + s] * jac[s * k + c]).sum();
                            }
                        }
                        chain_minor_vector(m, k, &composed, &mut minors);
                    }
                    weights.extend(minors.iter().map(|v| v * scale));
                }
            }
        }
        KernelNodes { positions, weights }
    }

    /// Chain contribution of chart `i` at the given points.
    fn chain_part(&self, chain: &CellChain, i: usize, points: &[f64], out: &mut [f64]) {
        let m = self.dim;
        let nb = self.nb();
        let region = points_bbox(m, points);
        let kn = self.kernel_nodes(chain, i, &region);
        let nn = kn.positions.len() / m.max(1);
        if nn == 0 {
            return;
        }
        let chart = &self.data.charts()[i];
        let bump = &self.data.bumps()[i];
        let identity = chart.map.is_identity();
        let radius = self.eps * bump.support_radius();
        let cut = radius * radius;
        let grid = (nn > 64 && points.len() / m > 8).then(|| Grid::new(m, radius, &kn.positions));
        let mut w = vec![0.0; m];
        let mut diff = vec![0.0; m];
        let mut acc = vec![0.0; nb];
        let mut dh = vec![0.0; m * m];
        let mut near = Vec::new();
        for (pi, z) in points.chunks(m).enumerate() {
            if identity {
                w.copy_from_slice(z);
            } else {
                chart.map.forward(z, &mut w);
            }
            acc.iter_mut().for_each(|v| *v = 0.0);
            let mut any = false;
            near.clear();
            match &grid {
                Some(g) => g.neighbours(&w, &mut near),
                None => near.extend(0..nn as u32),
            }
            for &j in &near {
                let j = j as usize;
                let pos = &kn.positions[j * m..(j + 1) * m];
                let mut d2 = 0.0;
                for a in 0..m {
                    diff[a] = w[a] - pos[a];
                    d2 += diff[a] * diff[a];
                }
                if d2 > cut {
                    continue;
                }
                let fv = bump.eval_scaled(&diff, self.eps);
                if fv == 0.0 {
                    continue;
                }
                any = true;
                for (a, wt) in acc.iter_mut().zip(&kn.weights[j * nb..(j + 1) * nb]) {
                    *a += fv * wt;
                }
            }
            if !any {
                continue;
            }
            let dst = &mut out[pi * nb..(pi + 1) * nb];
            if identity {
                for (d, a) in dst.iter_mut().zip(&acc) {
                    *d += a;
                }
            } else {
                chart.map.jacobian(z, &mut dh);
                let s = det(m, &dh).signum();
                let pulled = pullback_linear(m, m, self.degree, &acc, &dh);
                for (d, a) in dst.iter_mut().zip(&pulled) {
                    *d += s * a;
                }
            }
        }
    }

    /// Coefficients of layer `i` (charts `i..n` applied) at the points.
    fn eval_layer(&self, i: usize, points: &[f64]) -> Result<Vec<f64>> {
        let m = self.dim;
        let nb = self.nb();
        let npts = points.len() / m.max(1);
        let n = self.data.charts().len();
        if i == n {
            return match &self.source {
                Source::Form(f) => f.eval_batch(points),
                Source::Chain(_) => Ok(vec![0.0; npts * nb]),
            };
        }
        let mut out = vec![0.0; npts * nb];
        let region = points_bbox(m, points);
        if let Some(s) = &self.layer_support[i] {
            if !s.intersects(&region) {
                return Ok(out);
            }
        }
        let chart = &self.data.charts()[i];
        let below_support = self.layer_support[i + 1].clone();
        let below_live = below_support.as_ref().map_or(true, |s| !s.is_empty());
        // (1 - g_i) · below
        if below_live && below_support.as_ref().map_or(true, |s| s.intersects(&region)) {
            let below = self.eval_layer(i + 1, points)?;
            for (pi, z) in points.chunks(m).enumerate() {
                let g = chart.cutoff.eval(z);
                if g == 1.0 {
                    continue;
                }
                for a in 0..nb {
                    out[pi * nb + a] += (1.0 - g) * below[pi * nb + a];
                }
            }
        }
        // M_i[g_i Π_{j>i}(1 - g_j) T]
        if let Source::Chain(c) = &self.source {
            self.chain_part(c, i, points, &mut out);
        }
        // M_i[g_i · below]
        if below_live {
            self.convolve_layer(i, points, &mut out)?;
        }
        Ok(out)
    }

    /// Adds `h_i^* [ f^ε * ((h_i^{-1})^*(g_i · layer_{i+1})) ](z)` at each point.
    fn convolve_layer(&self, i: usize, points: &[f64], out: &mut [f64]) -> Result<()> {
        let m = self.dim;
        let nb = self.nb();
        let p = self.degree;
        let chart = &self.data.charts()[i];
        let rule = &self.rules[i];
        let identity = chart.map.is_identity();
        let g_support = chart.cutoff.support();
        let below_support = self.layer_support[i + 1].clone().map(|s| s.intersect(&g_support)).unwrap_or(g_support);
        if below_support.is_empty() {
            return Ok(());
        }
        let reach = self.data.chart_reach(i, self.eps);
        let mut w = vec![0.0; m];
        let mut wq = vec![0.0; m];
        let mut y = vec![0.0; m];
        // Sample points y_q = h^{-1}(h(z) - ε x_q) where g_i · below may be nonzero.
        let mut samples = Vec::new();
        let mut owners = Vec::new();
        for (pi, z) in points.chunks(m).enumerate() {
            if below_support.distance_to_point(z) > reach {
                continue;
            }
            if identity {
                w.copy_from_slice(z);
            } else {
                chart.map.forward(z, &mut w);
            }
            for q in 0..rule.len() {
                let x = rule.point(q);
                for a in 0..m {
                    wq[a] = w[a] - self.eps * x[a];
                }
                if identity {
                    y.copy_from_slice(&wq);
                } else {
                    chart.map.inverse(&wq, &mut y);
                }
                if !below_support.contains(&y) {
                    continue;
                }
                let g = chart.cutoff.eval(&y);
                if g == 0.0 {
                    continue;
                }
                samples.extend_from_slice(&y);
                owners.push((pi, rule.weights[q] * g));
            }
        }
        if owners.is_empty() {
            return Ok(());
        }
        let vals = self.eval_layer(i + 1, &samples)?;
        let mut acc = vec![0.0; points.len() / m * nb];
        let mut dh = vec![0.0; m * m];
        for (s, &(pi, wt)) in owners.iter().enumerate() {
            let beta = &vals[s * nb..(s + 1) * nb];
            if identity {
                for a in 0..nb {
                    acc[pi * nb + a] += wt * beta[a];
                }
            } else {
                let ys = &samples[s * m..(s + 1) * m];
                chart.map.jacobian(ys, &mut dh);
                let pulled = pullback_linear(m, m, p, beta, &inverse_matrix(m, &dh));
                for a in 0..nb {
                    acc[pi * nb + a] += wt * pulled[a];
                }
            }
        }
        for (pi, z) in points.chunks(m).enumerate() {
            let c = &acc[pi * nb..(pi + 1) * nb];
            if c.iter().all(|&v| v == 0.0) {
                continue;
            }
            if identity {
                for a in 0..nb {
                    out[pi * nb + a] += c[a];
                }
            } else {
                chart.map.jacobian(z, &mut dh);
                let pulled = pullback_linear(m, m, p, c, &dh);
                for a in 0..nb {
                    out[pi * nb + a] += pulled[a];
                }
            }
        }
        Ok(())
    }
}

/// Uniform bucket grid over kernel node positions.
struct Grid {
    dim: usize,
    size: f64,
    buckets: HashMap<Vec<i64>, Vec<u32>>,
}

impl Grid {
    fn new(dim: usize, size: f64, positions: &[f64]) -> Self {
        let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        for (j, p) in positions.chunks(dim).enumerate() {
            let key = p.iter().map(|x| (x / size).floor() as i64).collect();
            buckets.entry(key).or_default().push(j as u32);
        }
        Grid { dim, size, buckets }
    }

    /// Indices of nodes in the `3^m` buckets around `w`.
    fn neighbours(&self, w: &[f64], out: &mut Vec<u32>) {
        let base: Vec<i64> = w.iter().map(|x| (x / self.size).floor() as i64).collect();
        let mut key = base.clone();
        let total = 3usize.pow(self.dim as u32);
        for code in 0..total {
            let mut c = code;
            for a in 0..self.dim {
                key[a] = base[a] + (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(v) = self.buckets.get(&key) {
                out.extend_from_slice(v);
            }
        }
    }
}

/// Union that treats an empty box as the identity.
fn join(a: &BBox, b: &BBox) -> BBox {
    if a.is_empty() {
        b.clone()
    } else if b.is_empty() {
        a.clone()
    } else {
        a.union(b)
    }
}

/// Parameter boxes of `cell` whose images meet `search`, subdivided until
/// their image diameter is at most `leaf`.
pub(crate) fn leaves_of(cell: &Cell, search: &BBox, leaf: f64, max_depth: usize, out: &mut Vec<BBox>) {
    descend(cell, BBox::unit(cell.param_dim()), search, leaf, 0, max_depth, out);
}

fn descend(cell: &Cell, b: BBox, search: &BBox, leaf: f64, depth: usize, max_depth: usize, out: &mut Vec<BBox>) {
    let ib = cell.image_bbox(&b);
    if !ib.intersects(search) {
        return;
    }
    if cell.param_dim() == 0 || depth >= max_depth || ib.diameter() <= leaf {
        out.push(b);
        return;
    }
    let speeds = cell.axis_speeds(&b);
    let axis = (0..b.dim())
        .max_by(|&i, &j| (b.width(i) * speeds[i]).partial_cmp(&(b.width(j) * speeds[j])).unwrap())
        .unwrap();
    let (l, r) = b.split(axis);
    descend(cell, l, search, leaf, depth + 1, max_depth, out);
    descend(cell, r, search, leaf, depth + 1, max_depth, out);
}

impl FormField for MollifiedForm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn support(&self) -> Option<BBox> {
        self.layer_support[0].clone()
    }

    fn resolution(&self) -> Option<f64> {
        match self.source {
            Source::Chain(_) => Some(self.data.resolution(self.eps)),
            Source::Form(_) => None,
        }
    }

    fn eval_batch(&self, points: &[f64]) -> Result<Vec<f64>> {
        if self.fast {
            let Source::Chain(c) = &self.source else { unreachable!() };
            let mut out = vec![0.0; points.len() / self.dim.max(1) * self.nb()];
            self.chain_part(c, 0, points, &mut out);
            return Ok(out);
        }
        self.eval_layer(0, points)
    }
}

/// Checks that the chart cutoffs cover the chain, i.e. `Π_j (1 - g_j)`
/// vanishes at sample nodes inside `region`.
pub fn check_coverage(chain: &CellChain, data: &DeRhamData, region: Option<&BBox>) -> Result<()> {
    let k = chain.param_dim();
    let m = chain.dim();
    for cell in chain.cells() {
        let nodes = cell_nodes(cell, &BBox::unit(k), 5);
        for y in nodes.points.chunks(m) {
            if let Some(r) = region {
                if !r.contains(y) {
                    continue;
                }
            }
            let rest: f64 = data.charts().iter().map(|c| 1.0 - c.cutoff.eval(y)).product();
            if rest != 0.0 {
                return Err(Error::UncoveredSupport(y.to_vec()));
            }
        }
    }
    Ok(())
}

/// `R_ε T` with default quadrature options.
pub fn regularize(t: &Current, eps: f64, data: &Arc<DeRhamData>) -> Result<MollifiedForm> {
    regularize_with(t, eps, data, &QuadOptions::default())
}

pub fn regularize_with(t: &Current, eps: f64, data: &Arc<DeRhamData>, opts: &QuadOptions) -> Result<MollifiedForm> {
    let source = match t {
        Current::Chain(c) => {
            if c.is_compact() {
                check_coverage(c, data, None)?;
            }
            Source::Chain(c.clone())
        }
        Current::Points(p) => Source::Chain(p.to_chain()),
        Current::Form(f) => Source::Form(Arc::new(f.clone())),
        Current::Mollified(mf) => Source::Form(mf.clone()),
    };
    MollifiedForm::build(source, eps, data.clone(), opts.clone())
}

/// The glued operator `R^1 ∘ ⋯ ∘ R^n` over all charts of `data`.
pub fn regularize_glued(t: &Current, eps: f64, data: &Arc<DeRhamData>) -> Result<MollifiedForm> {
    if data.charts().is_empty() {
        return Err(Error::ChartCountZero);
    }
    regularize(t, eps, data)
}

/// `R_ε^* φ`, the dual smoothing of a test form, with `T(R^* φ) = ∫ R T ∧ φ`.
pub struct MollifiedTestForm {
    phi: Arc<dyn FormField>,
    eps: f64,
    data: Arc<DeRhamData>,
    rules: Vec<BumpRule>,
    supports: Vec<Option<BBox>>,
}

impl MollifiedTestForm {
    /// Layer `i` has charts `0..=i` applied (chart 0 first).
    fn eval_layer(&self, i: isize, points: &[f64]) -> Result<Vec<f64>> {
        if i < 0 {
            return self.phi.eval_batch(points);
        }
        let i = i as usize;
        let m = self.phi.dim();
        let p = self.phi.degree();
        let nb = binomial(m, p);
        let npts = points.len() / m.max(1);
        let mut out = vec![0.0; npts * nb];
        let region = points_bbox(m, points);
        if let Some(s) = &self.supports[i + 1] {
            if !s.intersects(&region) {
                return Ok(out);
            }
        }
        let chart = &self.data.charts()[i];
        let identity = chart.map.is_identity();
        let rule = &self.rules[i];
        let g: Vec<f64> = points.chunks(m).map(|z| chart.cutoff.eval(z)).collect();
        // (1 - g) · F
        if g.iter().any(|&v| v != 1.0) {
            let below = self.eval_layer(i as isize - 1, points)?;
            for pi in 0..npts {
                for a in 0..nb {
                    out[pi * nb + a] += (1.0 - g[pi]) * below[pi * nb + a];
                }
            }
        }
        // g · h^* r^* (h^{-1})^* F
        let mut samples = Vec::new();
        let mut owners = Vec::new();
        let mut w = vec![0.0; m];
        let mut wq = vec![0.0; m];
        let mut y = vec![0.0; m];
        let below_support = self.supports[i].clone();
        for (pi, z) in points.chunks(m).enumerate() {
            if g[pi] == 0.0 {
                continue;
            }
            if identity {
                w.copy_from_slice(z);
            } else {
                chart.map.forward(z, &mut w);
            }
            for q in 0..rule.len() {
                let x = rule.point(q);
                for a in 0..m {
                    wq[a] = w[a] + self.eps * x[a];
                }
                if identity {
                    y.copy_from_slice(&wq);
                } else {
                    chart.map.inverse(&wq, &mut y);
                }
                if let Some(s) = &below_support {
                    if !s.contains(&y) {
                        continue;
                    }
                }
                samples.extend_from_slice(&y);
                owners.push((pi, rule.weights[q]));
            }
        }
        if owners.is_empty() {
            return Ok(out);
        }
        let vals = self.eval_layer(i as isize - 1, &samples)?;
        let mut acc = vec![0.0; npts * nb];
        let mut dh = vec![0.0; m * m];
        for (s, &(pi, wt)) in owners.iter().enumerate() {
            let beta = &vals[s * nb..(s + 1) * nb];
            if identity {
                for a in 0..nb {
                    acc[pi * nb + a] += wt * beta[a];
                }
            } else {
                chart.map.jacobian(&samples[s * m..(s + 1) * m], &mut dh);
                let pulled = pullback_linear(m, m, p, beta, &inverse_matrix(m, &dh));
                for a in 0..nb {
                    acc[pi * nb + a] += wt * pulled[a];
                }
            }
        }
        for (pi, z) in points.chunks(m).enumerate() {
            if g[pi] == 0.0 {
                continue;
            }
            let c = &acc[pi * nb..(pi + 1) * nb];
            let c = if identity {
                c.to_vec()
            } else {
                chart.map.jacobian(z, &mut dh);
                pullback_linear(m, m, p, c, &dh)
            };
            for a in 0..nb {
                out[pi * nb + a] += g[pi] * c[a];
            }
        }
        Ok(out)
    }
}

impl FormField for MollifiedTestForm {
    fn dim(&self) -> usize {
        self.phi.dim()
    }

    fn degree(&self) -> usize {
        self.phi.degree()
    }

    fn support(&self) -> Option<BBox> {
        self.supports.last().cloned().flatten()
    }

    fn eval_batch(&self, points: &[f64]) -> Result<Vec<f64>> {
        self.eval_layer(self.data.charts().len() as isize - 1, points)
    }
}

/// `R_ε^* φ` for a test form.
pub fn mollify_form(phi: &SmoothForm, eps: f64, data: &Arc<DeRhamData>) -> Result<MollifiedTestForm> {
    mollify_field(Arc::new(phi.clone()), eps, data, &QuadOptions::default())
}

pub fn mollify_field(
    phi: Arc<dyn FormField>,
    eps: f64,
    data: &Arc<DeRhamData>,
    opts: &QuadOptions,
) -> Result<MollifiedTestForm> {
    check_eps(eps)?;
    if phi.dim() != data.dim() {
        return Err(Error::DimensionMismatch("test form and de Rham data dimensions".into()));
    }
    let rules = data.bumps().iter().map(|b| b.rule(opts.bump_nodes, opts.bump_pieces)).collect();
    let mut supports = vec![phi.support()];
    for i in 0..data.charts().len() {
        let prev = supports[i].clone();
        supports.push(prev.map(|s| s.expand(data.chart_reach(i, eps))));
    }
    Ok(MollifiedTestForm { phi, eps, data: data.clone(), rules, supports })
}

/// The homotopy form `a_ε^* ψ(y) = ∫ f^ε(x) ∫_0^1 (ι_x ψ)(y + t x) dt dx`.
pub struct HomotopyForm {
    psi: Arc<dyn FormField>,
    eps: f64,
    rule: BumpRule,
    reach: f64,
    t_nodes: usize,
}

impl FormField for HomotopyForm {
    fn dim(&self) -> usize {
        self.psi.dim()
    }

    fn degree(&self) -> usize {
        self.psi.degree() - 1
    }

    fn support(&self) -> Option<BBox> {
        self.psi.support().map(|s| s.expand(self.reach))
    }

    fn eval_batch(&self, points: &[f64]) -> Result<Vec<f64>> {
        let m = self.dim();
        let q = self.psi.degree();
        let nq = binomial(m, q);
        let np = binomial(m, q - 1);
        let npts = points.len() / m;
        let t_rule = crate::gauss::rule01(self.t_nodes);
        let support = self.psi.support();
        let mut samples = Vec::new();
        let mut owners = Vec::new();
        let mut y = vec![0.0; m];
        for (pi, z) in points.chunks(m).enumerate() {
            if let Some(s) = &support {
                if s.distance_to_point(z) > self.reach {
                    continue;
                }
            }
            for k in 0..self.rule.len() {
                let x = self.rule.point(k);
                for (t, tw) in t_rule.0.iter().zip(&t_rule.1) {
                    for a in 0..m {
                        y[a] = z[a] + t * self.eps * x[a];
                    }
                    if let Some(s) = &support {
                        if !s.contains(&y) {
                            continue;
                        }
                    }
                    samples.extend_from_slice(&y);
                    owners.push((pi, k, self.rule.weights[k] * tw));
                }
            }
        }
        let mut out = vec![0.0; npts * np];
        if owners.is_empty() {
            return Ok(out);
        }
        let vals = self.psi.eval_batch(&samples)?;
        // ι_x dx_I = Σ_a (-1)^a x_{I_a} dx_{I \ I_a}.
        let contraction: Vec<Vec<(usize, usize, f64)>> = basis(m, q)
            .iter()
            .map(|&mi| {
                let idx = indices(mi);
                idx.iter()
                    .enumerate()
                    .map(|(a, &i)| {
                        let s = if a % 2 == 0 { 1.0 } else { -1.0 };
                        (i, rank(m, mi & !(1u32 << i)), s)
                    })
                    .collect()
            })
            .collect();
        for (s, &(pi, k, wt)) in owners.iter().enumerate() {
            let x = self.rule.point(k);
            let psi = &vals[s * nq..(s + 1) * nq];
            for (j, terms) in contraction.iter().enumerate() {
                if psi[j] == 0.0 {
                    continue;
                }
                for &(i, r, sign) in terms {
                    out[pi * np + r] += wt * sign * self.eps * x[i] * psi[j];
                }
            }
        }
        Ok(out)
    }
}

fn homotopy_field(psi: Arc<dyn FormField>, eps: f64, data: &DeRhamData, opts: &QuadOptions) -> Result<HomotopyForm> {
    check_eps(eps)?;
    if !data.is_translation() {
        return Err(Error::Unsupported("the homotopy operator is implemented for a single translation chart".into()));
    }
    if psi.degree() == 0 {
        return Err(Error::DegreeUnderflow(-1));
    }
    let bump = &data.bumps()[0];
    Ok(HomotopyForm {
        psi,
        eps,
        rule: bump.rule(opts.bump_nodes, opts.bump_pieces),
        reach: eps * bump.support_radius(),
        t_nodes: opts.t_nodes,
    })
}

/// `(A_ε T)(φ) = T(a_ε^* φ)`; zero for 0-forms.
pub fn homotopy_apply(t: &CellChain, phi: &SmoothForm, eps: f64, data: &DeRhamData) -> Result<f64> {
    homotopy_apply_with(t, phi, eps, data, &QuadOptions::default())
}

pub fn homotopy_apply_with(
    t: &CellChain,
    phi: &SmoothForm,
    eps: f64,
    data: &DeRhamData,
    opts: &QuadOptions,
) -> Result<f64> {
    check_eps(eps)?;
    if phi.degree() == 0 {
        return Ok(0.0);
    }
    let h = homotopy_field(Arc::new(phi.clone()), eps, data, opts)?;
    integrate_chain(t, &h, opts)
}

/// The four terms of `R_ε T - T = b A_ε T + A_ε b T` on a test form.
#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyTerms {
    /// `T(r_ε^* φ)`
    pub smoothed: f64,
    /// `T(φ)`
    pub original: f64,
    /// `(A_ε T)(dφ)`
    pub homotopy_of_d: f64,
    /// `(A_ε bT)(φ)`
    pub homotopy_of_boundary: f64,
}

impl HomotopyTerms {
    pub fn residual(&self) -> f64 {
        self.smoothed - self.original - self.homotopy_of_d - self.homotopy_of_boundary
    }
}

/// Evaluates all four terms of the homotopy formula for a chain and a test
/// form of degree `k`.
pub fn homotopy_terms(t: &CellChain, phi: &SmoothForm, eps: f64, data: &Arc<DeRhamData>, opts: &QuadOptions) -> Result<HomotopyTerms> {
    let r = mollify_field(Arc::new(phi.clone()), eps, data, opts)?;
    let smoothed = integrate_chain(t, &r, opts)?;
    let original = integrate_chain(t, phi, opts)?;
    let dphi = crate::form::exterior_derivative(phi);
    let homotopy_of_d = homotopy_apply_with(t, &dphi, eps, data, opts)?;
    let bt = t.boundary();
    let homotopy_of_boundary = if bt.is_empty() { 0.0 } else { homotopy_apply_with(&bt, phi, eps, data, opts)? };
    Ok(HomotopyTerms { smoothed, original, homotopy_of_d, homotopy_of_boundary })
}

/// `∫ r_ε T ∧ φ` and `T(r_ε^* φ)` computed independently.
pub fn dual_pair(t: &CellChain, phi: &SmoothForm, eps: f64, data: &Arc<DeRhamData>, opts: &QuadOptions) -> Result<(f64, f64)> {
    let rt = regularize_with(&Current::Chain(t.clone()), eps, data, opts)?;
    let lhs = evaluate_field(&Current::Mollified(Arc::new(rt)), Arc::new(phi.clone()), opts)?;
    let rphi = mollify_field(Arc::new(phi.clone()), eps, data, opts)?;
    let rhs = integrate_chain(t, &rphi, opts)?;
    Ok((lhs, rhs))
}

/// Measured surrogate for smoothness of `R_ε T`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessReport {
    pub eps: f64,
    pub max_coefficient: f64,
    pub max_second_difference: f64,
    /// `ε² · max|∂²c| / max|c|`; bounded in `ε` for a smooth family.
    pub constant: f64,
}

/// Samples the coefficients of `R_ε T` along the segment `a → b` and
/// measures second differences at step `ε / 8`.
pub fn smoothness_proxy(t: &Current, eps: f64, data: &Arc<DeRhamData>, a: &[f64], b: &[f64], samples: usize) -> Result<SmoothnessReport> {
    let rt = regularize(t, eps, data)?;
    let m = a.len();
    let len = a.iter().zip(b).map(|(x, y)| (y - x).powi(2)).sum::<f64>().sqrt();
    let dir: Vec<f64> = a.iter().zip(b).map(|(x, y)| (y - x) / len).collect();
    let h = eps / 8.0;
    let mut pts = Vec::new();
    for s in 0..samples {
        let c = s as f64 / (samples - 1).max(1) as f64 * len;
        for off in [-h, 0.0, h] {
            for i in 0..m {
                pts.push(a[i] + (c + off) * dir[i]);
            }
        }
    }
    let v = rt.eval_batch(&pts)?;
    let nb = binomial(m, rt.degree());
    let (mut cmax, mut dmax) = (0.0f64, 0.0f64);
    for s in 0..samples {
        for j in 0..nb {
            let lo = v[(3 * s) * nb + j];
            let mid = v[(3 * s + 1) * nb + j];
            let hi = v[(3 * s + 2) * nb + j];
            cmax = cmax.max(mid.abs());
            dmax = dmax.max(((hi - 2.0 * mid + lo) / (h * h)).abs());
        }
    }
    let constant = if cmax > 0.0 { eps * eps * dmax / cmax } else { 0.0 };
    Ok(SmoothnessReport { eps, max_coefficient: cmax, max_second_difference: dmax, constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::BumpProfile;
    use crate::chain::PointMass;
    use crate::charts::{Chart, ChartMap};
    use crate::geometry::Plateau;
    use crate::poly::Poly;
    use crate::scalar::ScalarField;

    fn parabola() -> CellChain {
        let x = Poly::affine(-1.2, &[2.4]);
        CellChain::single(Cell::new(vec![x.clone(), x.pow(2).scale(0.5)], 1.0, 1).unwrap())
    }

    fn test_one_form() -> SmoothForm {
        let cut = Plateau::centered(&[0.0, 0.0], 0.5, 1.0);
        let a = Poly::from_terms(2, vec![(vec![0, 0], 1.0), (vec![1, 0], 1.0), (vec![1, 1], 0.5)]);
        let b = Poly::from_terms(2, vec![(vec![0, 0], 0.3), (vec![0, 1], -1.0)]);
        SmoothForm::new(
            2,
            1,
            vec![
                (vec![0], ScalarField::poly_cutoff(a, cut.clone())),
                (vec![1], ScalarField::poly_cutoff(b, cut)),
            ],
        )
        .unwrap()
    }

    fn two_chart_data() -> Arc<DeRhamData> {
        let a = ChartMap::affine(vec![1.2, 0.3, -0.2, 0.9], vec![0.1, -0.05]).unwrap();
        let c0 = Chart { id: 0, map: a, cutoff: Plateau::centered(&[0.2, 0.1], 0.3, 0.7) };
        let c1 = Chart::identity(1, 2);
        Arc::new(DeRhamData::new(2, vec![c0, c1], vec![BumpProfile::smooth_radial(2), BumpProfile::poly4(2)]).unwrap())
    }

    #[test]
    fn dual_pairing_translation() {
        let data = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)));
        let opts = QuadOptions::default().serial();
        let (l, r) = dual_pair(&parabola(), &test_one_form(), 0.2, &data, &opts).unwrap();
        assert!((l - r).abs() < 1e-7, "{l} {r}");
    }

    #[test]
    fn dual_pairing_two_charts() {
        let opts = QuadOptions { kernel_nodes: 6, bump_nodes: 4, bump_pieces: 2, ..QuadOptions::default() }.serial();
        let (l, r) = dual_pair(&parabola(), &test_one_form(), 0.2, &two_chart_data(), &opts).unwrap();
        assert!((l - r).abs() < 1e-7, "{l} {r}");
    }

    #[test]
    fn homotopy_formula_closes() {
        let data = Arc::new(DeRhamData::standard(BumpProfile::poly4(2)));
        let opts = QuadOptions::default().serial();
        let terms = homotopy_terms(&parabola(), &test_one_form(), 0.15, &data, &opts).unwrap();
        assert!(terms.residual().abs() < 1e-8, "{terms:?}");
        assert!(terms.homotopy_of_boundary.abs() > 0.0 || terms.homotopy_of_d.abs() > 0.0);
    }

    #[test]
    fn point_mass_becomes_the_bump() {
        let data = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)));
        let p = Current::Points(PointMass::new(2, vec![(vec![0.1, -0.2], 1.0)]).unwrap());
        let rt = regularize(&p, 0.3, &data).unwrap();
        let z = [0.15, -0.1];
        let c = rt.coefficients(&z).unwrap();
        let f = data.bumps()[0].eval_scaled(&[0.05, 0.1], 0.3);
        assert!((c[0] - f).abs() < 1e-12 * f.max(1.0), "{} {f}", c[0]);
    }

    #[test]
    fn rejects_large_eps() {
        let data = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)));
        let t = Current::Chain(parabola());
        assert!(matches!(regularize(&t, 1.5, &data), Err(Error::EpsilonTooLarge { .. })));
        assert!(matches!(regularize(&t, 0.0, &data), Err(Error::EpsilonTooLarge { .. })));
    }

    #[test]
    fn uncovered_chain_is_reported() {
        let a = ChartMap::affine(vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 0.0]).unwrap();
        let c0 = Chart { id: 0, map: a, cutoff: Plateau::centered(&[0.0, 0.0], 0.2, 0.4) };
        let data = Arc::new(DeRhamData::new(2, vec![c0], vec![BumpProfile::smooth_radial(2)]).unwrap());
        let r = regularize(&Current::Chain(parabola()), 0.1, &data);
        assert!(matches!(r, Err(Error::UncoveredSupport(_))));
    }
}
