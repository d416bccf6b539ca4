//! A family of points in ℝ moving along `γ(s) = 0.3 s² - 0.1`, stored as one
//! curve in `S × X = ℝ × ℝ`. Slicing at `s` recovers the point mass at
//! `γ(s)`; the spreading identity relates the family to its image in `X`.

use std::sync::Arc;

use currents_lab::bump::BumpProfile;
use currents_lab::chain::{Cell, CellChain};
use currents_lab::charts::DeRhamData;
use currents_lab::correspondence::{slice_family, spread_consistency, ProductSpace};
use currents_lab::current::Current;
use currents_lab::form::SmoothForm;
use currents_lab::geometry::Plateau;
use currents_lab::integrate::QuadOptions;
use currents_lab::limit::EpsilonSchedule;
use currents_lab::poly::Poly;
use currents_lab::scalar::ScalarField;

fn main() -> currents_lab::error::Result<()> {
    let line = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(1)));
    let space = ProductSpace::new(line.clone(), line)?;
    let s = Poly::affine(-1.5, &[3.0]);
    let gamma = s.pow(2).scale(0.3).add(&Poly::constant(1, -0.1));
    let family = Current::Chain(CellChain::single(Cell::new(vec![s, gamma], 1.0, 1)?));

    let p = Poly::from_terms(1, vec![(vec![0], 1.0), (vec![1], 0.7), (vec![2], -0.4)]);
    let phi = SmoothForm::function(1, ScalarField::poly_cutoff(p, Plateau::centered(&[0.0], 0.5, 1.2)));
    let schedule = EpsilonSchedule::new(0.2, 0.5, 5, 1e-6)?;
    let opts = QuadOptions::default();

    for at in [-0.6, 0.0, 0.4, 0.9] {
        let g = 0.3 * at * at - 0.1;
        let v = slice_family(&family, &[at], &phi, &space, &schedule, &opts)?;
        println!("s = {at:+.1}: slice {:.9}, φ(γ(s)) = {:.9}", v.extrapolated, phi.eval(&[g])[0]);
    }

    // Spreading needs a family that crosses the fixed point once; γ above
    // passes 0.15 twice with opposite orientations and would give 0 = 0.
    let s = Poly::affine(-1.5, &[3.0]);
    let monotone = s.scale(0.4).add(&s.pow(3).scale(0.1));
    let family = Current::Chain(CellChain::single(Cell::new(vec![s, monotone], 1.0, 1)?));
    let w = Current::Chain(CellChain::single(Cell::point(&[0.15], 1.0)));
    let (lhs, rhs) = spread_consistency(&family, &w, &phi, &space, &schedule, &opts)?;
    println!("spreading: {:.9} vs {:.9}, φ(0.15) = {:.9}", lhs.extrapolated, rhs.extrapolated, phi.eval(&[0.15])[0]);
    Ok(())
}
