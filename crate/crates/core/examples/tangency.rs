//! Curves `x = y^k` touching the line `x = 0` at the origin. For even `k` the
//! two branches cancel and the intersection is the zero current; for odd `k`
//! it is the point mass at the origin.

use std::sync::Arc;

use currents_lab::bump::BumpProfile;
use currents_lab::chain::{Cell, CellChain};
use currents_lab::charts::DeRhamData;
use currents_lab::current::Current;
use currents_lab::form::SmoothForm;
use currents_lab::geometry::Plateau;
use currents_lab::intersection::intersect;
use currents_lab::limit::EpsilonSchedule;
use currents_lab::oracles::tangency_closed_forms;
use currents_lab::poly::Poly;
use currents_lab::scalar::ScalarField;

fn main() -> currents_lab::error::Result<()> {
    let t = Poly::affine(-1.5, &[3.0]);
    let line = Current::Chain(CellChain::single(Cell::new(vec![Poly::zero(1), t.clone()], 1.0, 1)?));
    let phi = SmoothForm::function(
        2,
        ScalarField::poly_cutoff(Poly::affine(1.0, &[0.5, -0.3]), Plateau::centered(&[0.0, 0.0], 0.4, 1.0)),
    );
    let bump = BumpProfile::smooth_radial(2);
    let data = Arc::new(DeRhamData::standard(bump.clone()));
    let schedule = EpsilonSchedule::standard(1.0);

    for k in [2, 3, 4, 5] {
        let curve = Current::Chain(CellChain::single(Cell::new(vec![t.pow(k), t.clone()], 1.0, 1)?));
        let r = intersect(&curve, &line, &phi, &data, &schedule)?;
        let predicted = tangency_closed_forms(k, &bump)?.coefficient * phi.eval(&[0.0, 0.0])[0];
        println!(
            "k = {k}: limit {:+.9} (error estimate {:.1e}), predicted {predicted:+.9}",
            r.value.extrapolated, r.value.error_estimate
        );
    }
    Ok(())
}
