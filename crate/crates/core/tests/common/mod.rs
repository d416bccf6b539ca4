//! Seeded property checks shared by the property tests and the acceptance run.
//! Each returns `Err` with a description of the first violation.

#![allow(dead_code)]

use std::sync::Arc;

use currents_lab::bump::BumpProfile;
use currents_lab::chain::{Cell, CellChain};
use currents_lab::charts::DeRhamData;
use currents_lab::current::{evaluate_with, Current};
use currents_lab::form::{exterior_derivative, random_polynomial_form, SmoothForm};
use currents_lab::geometry::{BBox, Plateau};
use currents_lab::integrate::QuadOptions;
use currents_lab::intersection::wedge_eval_with;
use currents_lab::poly::Poly;
use currents_lab::scalar::ScalarField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn axes() -> (Current, Current) {
    let x = CellChain::single(Cell::segment(&[-1.5, 0.0], &[1.5, 0.0]).unwrap());
    let y = CellChain::single(Cell::segment(&[0.0, -1.5], &[0.0, 1.5]).unwrap());
    (Current::Chain(x), Current::Chain(y))
}

pub fn radial() -> Arc<DeRhamData> {
    Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)))
}

fn bump_form(center: &[f64], inner: f64, outer: f64, r: &mut ChaCha8Rng) -> SmoothForm {
    let p = Poly::affine(1.0 + r.gen_range(0.0..0.5), &[r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5)]);
    SmoothForm::function(2, ScalarField::poly_cutoff(p, Plateau::centered(center, inner, outer)))
}

/// A random immersed `k`-cell in ℝ^m: an affine box bent by small quadratic terms.
pub fn random_cell(m: usize, k: usize, r: &mut ChaCha8Rng) -> Cell {
    loop {
        let map: Vec<Poly> = (0..m)
            .map(|i| {
                let mut lin: Vec<f64> = (0..k).map(|_| r.gen_range(-0.3..0.3)).collect();
                if i < k {
                    lin[i] += 1.0;
                }
                let mut p = Poly::affine(r.gen_range(-0.5..0.0), &lin);
                for j in 0..k {
                    let mut e = vec![0u32; k];
                    e[j] = 2;
                    p = p.add(&Poly::from_terms(k, vec![(e, r.gen_range(-0.2..0.2))]));
                }
                p
            })
            .collect();
        if let Ok(c) = Cell::new(map, 1.0, 1) {
            return c;
        }
    }
}

/// `[T1∧T2](φ)` vanishes identically, not approximately, when `supp φ`
/// misses the crossing by more than the smoothing reach.
pub fn supportivity(seed: u64) -> Check {
    let mut r = rng(seed);
    let (t1, t2) = axes();
    let data = radial();
    let angle = r.gen_range(0.0..std::f64::consts::TAU);
    let center = [0.9 * angle.cos(), 0.9 * angle.sin()];
    let phi = bump_form(&center, 0.1, 0.25, &mut r);
    for eps in [0.1, 0.05, 0.01] {
        let v = wedge_eval_with(&t1, &t2, &phi, eps, &data, &QuadOptions::default()).map_err(|e| e.to_string())?;
        if v != 0.0 {
            return Err(format!("seed {seed}: value {v:e} at eps {eps} for a form centered at {center:?}"));
        }
    }
    Ok(())
}

/// Changing `φ` away from the crossing leaves every approximation unchanged.
pub fn locality(seed: u64) -> Check {
    let mut r = rng(seed);
    let (t1, t2) = axes();
    let data = radial();
    let near = bump_form(&[0.0, 0.0], 0.2, 0.5, &mut r);
    let far = bump_form(&[0.9, 0.9], 0.1, 0.3, &mut r);
    let both = near.add(&far).unwrap();
    for eps in [0.1, 0.02] {
        let opts = QuadOptions::default();
        let a = wedge_eval_with(&t1, &t2, &near, eps, &data, &opts).map_err(|e| e.to_string())?;
        let b = wedge_eval_with(&t1, &t2, &both, eps, &data, &opts).map_err(|e| e.to_string())?;
        if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
            return Err(format!("seed {seed}: {a} vs {b} at eps {eps}"));
        }
    }
    Ok(())
}

/// `∫_{T1} R_ε(a T2 + b T2') ∧ (c φ + d ψ)` expands bilinearly.
pub fn bilinearity(seed: u64) -> Check {
    let mut r = rng(seed);
    let (t1, t2) = axes();
    let shift = r.gen_range(-0.3..0.3);
    let t2b = CellChain::single(Cell::segment(&[shift, -1.5], &[shift + 0.2, 1.5]).unwrap());
    let data = radial();
    let phi = bump_form(&[0.0, 0.0], 0.3, 0.8, &mut r);
    let psi = bump_form(&[0.1, -0.1], 0.2, 0.6, &mut r);
    let (a, b, c, d) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
    let eps = 0.05;
    let opts = QuadOptions::default();
    let ev = |t: &Current, f: &SmoothForm| wedge_eval_with(&t1, t, f, eps, &data, &opts).map_err(|e| e.to_string());
    let Current::Chain(c2) = &t2 else { unreachable!() };
    let mix = Current::Chain(c2.scale(a).add(&t2b.scale(b)).unwrap());
    let form = phi.scale(c).add(&psi.scale(d)).unwrap();
    let t2b = Current::Chain(t2b);
    let lhs = ev(&mix, &form)?;
    let rhs = a * c * ev(&t2, &phi)? + a * d * ev(&t2, &psi)? + b * c * ev(&t2b, &phi)? + b * d * ev(&t2b, &psi)?;
    if (lhs - rhs).abs() > 1e-9 * rhs.abs().max(1.0) {
        return Err(format!("seed {seed}: {lhs} vs {rhs}"));
    }
    Ok(())
}

/// `T(dψ) = (∂T)(ψ)` on random bent cells.
pub fn stokes(seed: u64) -> Check {
    let mut r = rng(seed);
    let m = r.gen_range(2..=3);
    let k = r.gen_range(1..=m);
    let t = CellChain::single(random_cell(m, k, &mut r));
    let cutoff = Plateau::new(BBox::cube(m, -1.0, 1.0), BBox::cube(m, -2.0, 2.0));
    let psi = random_polynomial_form(m, k - 1, &cutoff, &mut r);
    let opts = QuadOptions::default();
    let lhs = evaluate_with(&Current::Chain(t.clone()), &exterior_derivative(&psi), &opts).map_err(|e| e.to_string())?;
    let rhs = evaluate_with(&Current::Chain(t.boundary()), &psi, &opts).map_err(|e| e.to_string())?;
    if (lhs - rhs).abs() > 1e-8 * rhs.abs().max(1.0) {
        return Err(format!("seed {seed}: m {m} k {k}: {lhs} vs {rhs}"));
    }
    Ok(())
}

/// The boundary of a boundary cancels exactly.
pub fn boundary_squared(seed: u64) -> Check {
    let mut r = rng(seed);
    let m = r.gen_range(2..=4);
    let k = r.gen_range(2..=m);
    let t = CellChain::single(random_cell(m, k, &mut r));
    let bb = t.boundary().boundary().simplify();
    if !bb.is_empty() {
        return Err(format!("seed {seed}: m {m} k {k}: {} cells survive", bb.cells().len()));
    }
    Ok(())
}

/// Serial and parallel evaluation agree to the last bit, run after run.
pub fn determinism(seed: u64) -> Check {
    let mut r = rng(seed);
    let (t1, t2) = axes();
    let data = radial();
    let phi = bump_form(&[0.0, 0.0], 0.3, 0.8, &mut r);
    let eps = r.gen_range(0.02..0.2);
    let par = QuadOptions::default();
    let ser = QuadOptions::default().serial();
    let a = wedge_eval_with(&t1, &t2, &phi, eps, &data, &par).map_err(|e| e.to_string())?;
    let b = wedge_eval_with(&t1, &t2, &phi, eps, &data, &par).map_err(|e| e.to_string())?;
    let c = wedge_eval_with(&t1, &t2, &phi, eps, &data, &ser).map_err(|e| e.to_string())?;
    if a.to_bits() != b.to_bits() || a.to_bits() != c.to_bits() {
        return Err(format!("seed {seed}: {a:e} {b:e} {c:e}"));
    }
    Ok(())
}

pub const PROPERTIES: [(&str, fn(u64) -> Check); 6] = [
    ("supportivity", supportivity),
    ("locality", locality),
    ("bilinearity", bilinearity),
    ("stokes", stokes),
    ("boundary-squared", boundary_squared),
    ("determinism", determinism),
];
