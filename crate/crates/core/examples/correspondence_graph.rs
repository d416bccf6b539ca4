//! Transporting currents through the graph of an affine map
//! `f(x, y) = (0.5x + 0.2y + 0.1, -0.3x + 0.8y)`. Pushing a lens forward
//! through the graph must agree with integrating `f*φ` over the lens, and the
//! diagonal must act as the identity.

use std::sync::Arc;

use currents_lab::bump::BumpProfile;
use currents_lab::chain::{Cell, CellChain};
use currents_lab::charts::DeRhamData;
use currents_lab::correspondence::{pull_back, push_forward, CorrespondenceKernel, ProductSpace};
use currents_lab::current::{evaluate, Current};
use currents_lab::form::SmoothForm;
use currents_lab::geometry::BBox;
use currents_lab::integrate::QuadOptions;
use currents_lab::limit::EpsilonSchedule;
use currents_lab::poly::Poly;
use currents_lab::scalar::ScalarField;

fn main() -> currents_lab::error::Result<()> {
    let data = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)));
    let space = ProductSpace::new(data.clone(), data)?;
    let base = CellChain::single(Cell::from_box(&BBox::cube(2, -2.0, 2.0))?).truncated();
    let f = [Poly::affine(0.1, &[0.5, 0.2]), Poly::affine(0.0, &[-0.3, 0.8])];
    let graph = CorrespondenceKernel::new(Current::Chain(space.graph(&base, &f)?), true);
    let diagonal = CorrespondenceKernel::new(Current::Chain(space.diagonal(&base)?), true);

    // φ = (1 + xy) dx + x² dy; polynomial, so the support box is declared.
    let x = Poly::var(2, 0);
    let y = Poly::var(2, 1);
    let phi = SmoothForm::new(
        2,
        1,
        vec![
            (vec![0], ScalarField::Poly(Poly::constant(2, 1.0).add(&x.mul(&y)))),
            (vec![1], ScalarField::Poly(x.pow(2))),
        ],
    )?
    .with_support(BBox::cube(2, -4.0, 4.0));

    let lens = CellChain::lens(&[0.1, -0.05], 0.6, 0.35)?;
    let image = Current::Chain(lens.push_forward(&f)?);
    let lens = Current::Chain(lens);

    let schedule = EpsilonSchedule::new(0.2, 0.5, 4, 1e-6)?;
    let opts = QuadOptions { kernel_nodes: 6, leaf_scale: 0.5, ..QuadOptions::default() };

    let pushed = push_forward(&graph, &lens, &phi, &space, &schedule, &opts)?;
    println!("graph push-forward  {:.9}   lens(f*φ) = f(lens)(φ) = {:.9}", pushed.extrapolated, evaluate(&image, &phi)?);
    let pulled = pull_back(&graph, &image, &phi, &space, &schedule, &opts)?;
    println!("graph pull-back     {:.9}   lens(φ) = {:.9}", pulled.extrapolated, evaluate(&lens, &phi)?);
    let same = pull_back(&diagonal, &lens, &phi, &space, &schedule, &opts)?;
    println!("diagonal pull-back  {:.9}", same.extrapolated);
    Ok(())
}
