//! The coordinate axes cross once at the origin, so `[T1∧T2](φ) = φ(0)` no
//! matter which de Rham data does the smoothing. Three different data are
//! tried here and the per-epsilon values are printed next to the limit.

use std::sync::Arc;

use currents_lab::bump::BumpProfile;
use currents_lab::chain::{Cell, CellChain};
use currents_lab::charts::{Chart, ChartMap, DeRhamData};
use currents_lab::current::Current;
use currents_lab::form::SmoothForm;
use currents_lab::geometry::Plateau;
use currents_lab::intersection::intersect;
use currents_lab::limit::EpsilonSchedule;
use currents_lab::poly::Poly;
use currents_lab::scalar::ScalarField;

fn main() -> currents_lab::error::Result<()> {
    let x_axis = Current::Chain(CellChain::single(Cell::segment(&[-1.5, 0.0], &[1.5, 0.0])?));
    let y_axis = Current::Chain(CellChain::single(Cell::segment(&[0.0, -1.5], &[0.0, 1.5])?));

    // φ = (1 + x/2 - 0.3y + xy) on [-0.4, 0.4]², cut off smoothly by [-1, 1]².
    let p = Poly::from_terms(2, vec![(vec![0, 0], 1.0), (vec![1, 0], 0.5), (vec![0, 1], -0.3), (vec![1, 1], 1.0)]);
    let phi = SmoothForm::function(2, ScalarField::poly_cutoff(p, Plateau::centered(&[0.0, 0.0], 0.4, 1.0)));

    let sheared = Chart {
        id: 0,
        map: ChartMap::affine(vec![1.2, 0.3, -0.2, 0.9], vec![0.1, -0.05])?,
        cutoff: Plateau::centered(&[0.2, 0.1], 0.3, 0.7),
    };
    let data = [
        DeRhamData::standard(BumpProfile::smooth_radial(2)),
        DeRhamData::standard(BumpProfile::poly4(2)),
        DeRhamData::new(2, vec![sheared, Chart::identity(1, 2)], vec![BumpProfile::smooth_radial(2), BumpProfile::poly4(2)])?,
    ];

    let schedule = EpsilonSchedule::standard(1.0);
    for d in data {
        let d = Arc::new(d);
        let r = intersect(&x_axis, &y_axis, &phi, &d, &schedule)?;
        println!("{}", d.id());
        for (eps, v) in schedule.epsilons().iter().zip(&r.value.raw_values) {
            println!("  eps {eps:<10} {v:.12}");
        }
        println!("  limit {:.12} ± {:.1e} ({:?})", r.value.extrapolated, r.value.error_estimate, r.value.verdict);
    }
    println!("phi(0) = {}", phi.eval(&[0.0, 0.0])[0]);
    Ok(())
}
