//! Complex curves as real surfaces in ℝ⁴: `y = x²` meets `y = 0` at the
//! origin with multiplicity two, and the smoothed intersection recovers
//! `2 φ(0)`. The multiplicity itself comes from a resultant. Takes about half
//! a minute in release mode.

use std::sync::Arc;

use currents_lab::bump::BumpProfile;
use currents_lab::chain::{Cell, CellChain};
use currents_lab::charts::DeRhamData;
use currents_lab::current::Current;
use currents_lab::form::SmoothForm;
use currents_lab::geometry::Plateau;
use currents_lab::integrate::QuadOptions;
use currents_lab::intersection::intersect_with;
use currents_lab::limit::EpsilonSchedule;
use currents_lab::oracles::plane_curve_multiplicity;
use currents_lab::poly::Poly;
use currents_lab::scalar::ScalarField;

fn main() -> currents_lab::error::Result<()> {
    // x = u + iv over the square [-1, 1]².
    let u = Poly::affine(-1.0, &[2.0, 0.0]);
    let v = Poly::affine(-1.0, &[0.0, 2.0]);
    let re = u.pow(2).add(&v.pow(2).scale(-1.0));
    let im = u.mul(&v).scale(2.0);
    let zero = Poly::zero(2);
    let graph = Current::Chain(CellChain::single(Cell::new(vec![u.clone(), v.clone(), re, im], 1.0, 1)?));
    let axis = Current::Chain(CellChain::single(Cell::new(vec![u, v, zero.clone(), zero], 1.0, 1)?));

    let phi = SmoothForm::function(4, ScalarField::plateau(Plateau::centered(&[0.0; 4], 0.15, 0.5)));
    let data = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(4)));
    let schedule = EpsilonSchedule::new(0.2, 0.5, 5, 1e-6)?;
    let opts = QuadOptions { kernel_nodes: 6, leaf_scale: 0.5, ..QuadOptions::default() };

    let r = intersect_with(&graph, &axis, &phi, &data, &schedule, &opts)?;
    let p = Poly::from_terms(2, vec![(vec![0, 1], 1.0), (vec![2, 0], -1.0)]);
    let q = Poly::var(2, 1);
    let mult = plane_curve_multiplicity(&p, &q, &[0.0, 0.0])?;
    println!("raw values {:?}", r.value.raw_values);
    println!("limit {:.7} ± {:.1e}, multiplicity {mult}", r.value.extrapolated, r.value.error_estimate);
    Ok(())
}
