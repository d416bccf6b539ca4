//! How a chain's mass projects onto a coordinate axis. A horizontal segment
//! projects with density one, a vertical one collapses to an atom, and a
//! parabola folds over with an integrable `1/√x` peak.

use currents_lab::chain::{Cell, CellChain};
use currents_lab::lebesgue::lebesgue_diagnostic;
use currents_lab::poly::Poly;

fn main() -> currents_lab::error::Result<()> {
    let t = Poly::affine(-1.0, &[2.0]);
    let chains = [
        ("horizontal", CellChain::single(Cell::segment(&[0.0, 0.0], &[1.0, 0.0])?)),
        ("vertical", CellChain::single(Cell::segment(&[0.0, 0.0], &[0.0, 1.0])?)),
        ("parabola", CellChain::single(Cell::new(vec![t.pow(2), t], 1.0, 1)?)),
    ];
    for (name, c) in chains {
        let r = lebesgue_diagnostic(&c, &[0], 32)?;
        println!(
            "{name:<10} mass {:.4}  max density {:>8.3} → {:>8.3}  atom {}  integrable peak {}",
            r.total_mass, r.max_density[0], r.max_density[1], r.suspect_atom, r.integrable_singularity
        );
    }
    Ok(())
}
