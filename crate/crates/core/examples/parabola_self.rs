//! A parabola intersected with itself is an excess intersection: the limit
//! exists but changes with the bump. Skewed bumps give different nonzero
//! values that match a closed-form integral of the bump; a symmetric one
//! gives zero.

use std::sync::Arc;

use currents_lab::bump::BumpProfile;
use currents_lab::chain::{Cell, CellChain};
use currents_lab::charts::DeRhamData;
use currents_lab::current::Current;
use currents_lab::form::SmoothForm;
use currents_lab::geometry::Plateau;
use currents_lab::intersection::intersect;
use currents_lab::limit::EpsilonSchedule;
use currents_lab::oracles::closed_form_parabola_self;
use currents_lab::poly::Poly;
use currents_lab::scalar::ScalarField;

fn main() -> currents_lab::error::Result<()> {
    let t = Poly::affine(-1.5, &[3.0]);
    let parabola = Current::Chain(CellChain::single(Cell::new(vec![t.pow(2), t], 1.0, 1)?));
    let phi = SmoothForm::function(
        2,
        ScalarField::poly_cutoff(Poly::affine(1.0, &[0.5, -0.3]), Plateau::centered(&[0.0, 0.0], 0.4, 1.0)),
    );
    let schedule = EpsilonSchedule::standard(1.0);
    let bumps = [
        ("skewed a", BumpProfile::skewed(vec![0.3, 0.2], 0.5, vec![0.5, -0.4])?),
        ("skewed b", BumpProfile::skewed(vec![-0.2, 0.4], 0.5, vec![-0.3, 0.6])?),
        ("radial", BumpProfile::smooth_radial(2)),
    ];
    for (name, h) in bumps {
        let closed_form = closed_form_parabola_self(&h, &phi)?;
        let data = Arc::new(DeRhamData::standard(h));
        let r = intersect(&parabola, &parabola, &phi, &data, &schedule)?;
        println!(
            "{name:<9} limit {:+.8} ± {:.1e}   closed form {closed_form:+.8}",
            r.value.extrapolated, r.value.error_estimate
        );
    }
    Ok(())
}
