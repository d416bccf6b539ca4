//! Both sides of the projection formula for `P: ℝ¹ × ℝ² → ℝ²`:
//! `[P_*T ∧ σ](φ) = P_*[T ∧ (ℝ¹ × σ)](φ)`. Here `T = {0.3} × segment` and
//! `σ` is a vertical line, so both sides approach `φ(0.1, 0.1)` up to sign.

use std::sync::Arc;

use currents_lab::bump::BumpProfile;
use currents_lab::chain::{Cell, CellChain};
use currents_lab::charts::DeRhamData;
use currents_lab::correspondence::{cylinder_identity_residual, projection_formula_check, Factor, ProductSpace};
use currents_lab::current::Current;
use currents_lab::form::SmoothForm;
use currents_lab::geometry::Plateau;
use currents_lab::integrate::QuadOptions;
use currents_lab::limit::EpsilonSchedule;
use currents_lab::poly::Poly;
use currents_lab::scalar::ScalarField;

fn main() -> currents_lab::error::Result<()> {
    let x = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(1)));
    let y = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)));
    let space = ProductSpace::new(x, y)?;
    let t = Current::Chain(CellChain::single(Cell::segment(&[0.3, -0.5, 0.1], &[0.3, 0.5, 0.1])?));
    let line = CellChain::single(Cell::segment(&[0.1, -1.5], &[0.1, 1.5])?).truncated();
    let phi = SmoothForm::function(
        2,
        ScalarField::poly_cutoff(Poly::affine(1.0, &[0.5, -0.3]), Plateau::centered(&[0.0, 0.0], 0.3, 0.9)),
    );
    let schedule = EpsilonSchedule::new(0.2, 0.5, 5, 1e-6)?;
    let opts = QuadOptions::default();

    let r = projection_formula_check(&t, &Current::Chain(line.clone()), &phi, &space, &schedule, &opts)?;
    println!("left {:.10}  right {:.10}  φ(0.1, 0.1) = {:.10}", r.lhs.extrapolated, r.rhs.extrapolated, phi.eval(&[0.1, 0.1])[0]);

    // The product kernel of the cylinder ℝ¹ × σ against the pulled-back
    // kernel of σ, pointwise.
    for eps in [0.2, 0.05] {
        let e = cylinder_identity_residual(&line, Factor::Second, &space, eps, 100, 1, &opts)?;
        println!("eps {eps}: cylinder kernel mismatch {e:.1e} over 100 points");
    }
    Ok(())
}
