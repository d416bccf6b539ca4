//! The smoothing operator is chain homotopic to the identity:
//! `T(r*φ) - T(φ) = (A T)(dφ) + (A ∂T)(φ)`. This prints the four terms for a
//! segment and a closed lens against random test forms.

use std::sync::Arc;

use currents_lab::bump::BumpProfile;
use currents_lab::chain::{Cell, CellChain};
use currents_lab::charts::DeRhamData;
use currents_lab::form::random_polynomial_form;
use currents_lab::geometry::Plateau;
use currents_lab::integrate::QuadOptions;
use currents_lab::smoothing::homotopy_terms;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> currents_lab::error::Result<()> {
    let data = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)));
    let chains = [
        ("segment", CellChain::single(Cell::segment(&[-0.5, -0.3], &[0.6, 0.4])?)),
        ("lens", CellChain::lens(&[0.1, -0.05], 0.6, 0.35)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, chain) in chains {
        let b = chain.bbox();
        let cutoff = Plateau::new(b.expand(0.1), b.expand(0.4));
        for _ in 0..3 {
            let phi = random_polynomial_form(2, 1, &cutoff, &mut rng);
            for eps in [0.2, 0.05] {
                let t = homotopy_terms(&chain, &phi, eps, &data, &QuadOptions::default())?;
                println!(
                    "{name:<8} eps {eps:<5} smoothed {:+.6} original {:+.6} A(dφ) {:+.6} A(∂T) {:+.6} residual {:.1e}",
                    t.smoothed,
                    t.original,
                    t.homotopy_of_d,
                    t.homotopy_of_boundary,
                    t.residual()
                );
            }
        }
    }
    Ok(())
}
