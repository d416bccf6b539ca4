//! Gauss–Legendre rules on `[0, 1]` and tensor products of them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;

use crate::geometry::BBox;

/// Nodes and weights of the `n`-point rule on `[0, 1]`, cached.
pub fn rule01(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| {
            if n <= 1 {
                return Arc::new((vec![0.5], vec![1.0]));
            }
            let gl = GaussLegendre::new(n).expect("rule with at least two nodes");
            let mut pairs: Vec<(f64, f64)> = gl.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let nodes = pairs.iter().map(|(x, _)| 0.5 * (x + 1.0)).collect();
            let weights = pairs.iter().map(|(_, w)| 0.5 * w).collect();
            Arc::new((nodes, weights))
        })
        .clone()
}

/// Tensor rule on a box: returns `(points, weights)` with points flattened
/// row by row (`dim` coordinates each). A zero-dimensional box yields a
/// single empty point of weight 1.
pub fn tensor_rule(b: &BBox, n: usize) -> (Vec<f64>, Vec<f64>) {
    let d = b.dim();
    let r = rule01(n);
    let (xs, ws) = (&r.0, &r.1);
    let total = n.pow(d as u32);
    let mut pts = Vec::with_capacity(total * d);
    let mut wts = Vec::with_capacity(total);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        let mut w = 1.0;
        for a in 0..d {
            let h = b.hi[a] - b.lo[a];
            pts.push(b.lo[a] + h * xs[idx[a]]);
            w *= h * ws[idx[a]];
        }
        wts.push(w);
        for a in (0..d).rev() {
            idx[a] += 1;
            if idx[a] < n {
                break;
            }
            idx[a] = 0;
        }
    }
    (pts, wts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let b = BBox::new(vec![0.0, -1.0], vec![2.0, 1.0]);
        let (p, w) = tensor_rule(&b, 4);
        let s: f64 = w.iter().enumerate().map(|(i, wi)| wi * p[2 * i].powi(3) * p[2 * i + 1].powi(2)).sum();
        assert!((s - 4.0 * 2.0 / 3.0).abs() < 1e-13);
        let (p0, w0) = tensor_rule(&BBox::new(vec![], vec![]), 8);
        assert!(p0.is_empty() && w0 == vec![1.0]);
    }
}
