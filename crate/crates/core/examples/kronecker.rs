//! Kronecker indices `[T1∧T2](1)` of curves in the plane, compared with a
//! signed count of crossings found by Newton's method.

use std::sync::Arc;

use currents_lab::bump::BumpProfile;
use currents_lab::chain::CellChain;
use currents_lab::charts::DeRhamData;
use currents_lab::current::Current;
use currents_lab::intersection::kronecker_index;
use currents_lab::limit::EpsilonSchedule;
use currents_lab::oracles::transversal_points;

fn main() -> currents_lab::error::Result<()> {
    let data = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)));
    let schedule = EpsilonSchedule::new(0.2, 0.5, 6, 1e-6)?;
    let a = CellChain::lens(&[-0.3, 0.0], 0.6, 0.4)?;
    let pairs = [
        ("overlapping lenses", CellChain::lens(&[0.3, 0.05], 0.6, 0.4)?),
        ("disjoint lenses", CellChain::lens(&[2.0, 0.0], 0.3, 0.2)?),
    ];
    for (name, b) in pairs {
        let points = transversal_points(&a, &b)?;
        let signed: i32 = points.iter().map(|p| p.sign as i32).sum();
        let k = kronecker_index(&Current::Chain(a.clone()), &Current::Chain(b), &data, &schedule)?;
        let (n, dist) = k.rounded();
        println!("{name}: {} crossings, signed sum {signed}; index {:.9} → {n} (off by {dist:.1e})", points.len(), k.extrapolated);
        for p in points {
            println!("  at ({:+.4}, {:+.4}) sign {:+}", p.location[0], p.location[1], p.sign);
        }
    }
    Ok(())
}
