//! The intersection `[T1∧T2](φ) = lim_{ε→0} ∫_{T1} R_ε T2 ∧ φ` and the
//! products and checks built on it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::charts::DeRhamData;
use crate::current::{evaluate_field, Current};
use crate::error::{Error, Result};
use crate::form::{exterior_derivative, FormField, SmoothForm, WedgeField};
use crate::geometry::{BBox, Plateau};
use crate::integrate::QuadOptions;
use crate::limit::{limit_of, EpsilonLimit, EpsilonSchedule};
use crate::scalar::ScalarField;
use crate::smoothing::{regularize_with, EPS_MARGIN};

/// Result of [`intersect`] on one test form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionResult {
    pub value: EpsilonLimit,
    /// `deg T1 + deg T2`.
    pub degree: usize,
    /// Box containing `supp T1 ∩ supp T2`, when both are bounded.
    pub support_hint: Option<BBox>,
    pub data_id: String,
}

fn check_degrees(t1: &Current, t2: &Current, phi_degree: usize) -> Result<()> {
    if t1.dim() != t2.dim() {
        return Err(Error::DimensionMismatch(format!("currents on ℝ^{} and ℝ^{}", t1.dim(), t2.dim())));
    }
    let need = t1.current_dim() as i64 - t2.degree() as i64;
    if need < 0 {
        return Err(Error::DegreeUnderflow(need));
    }
    if need as usize != phi_degree {
        return Err(Error::DimensionMismatch(format!(
            "test form of degree {phi_degree}, expected {need}"
        )));
    }
    Ok(())
}

/// A chain cut off at a finite window must keep its artificial boundary out
/// of reach of the test form.
fn check_truncation(t1: &Current, t2: &Current, phi: &dyn FormField, eps: f64, data: &DeRhamData) -> Result<()> {
    let Some(sphi) = phi.support() else {
        return Err(Error::Validation("test form without a support box".into()));
    };
    if !t1.is_compact() && !t2.is_compact() {
        return Err(Error::Unsupported("neither current is compactly supported".into()));
    }
    let reach = data.reach(eps);
    if let Current::Chain(c) = t2 {
        if !c.is_compact() {
            for cell in c.boundary().cells() {
                let d = cell.image_bbox(&BBox::unit(cell.param_dim())).distance(&sphi);
                if d <= reach {
                    let margin = (d / (reach / eps)).min(EPS_MARGIN);
                    return Err(Error::EpsilonTooLarge { eps, margin });
                }
            }
        }
    }
    if let Current::Chain(c) = t1 {
        if !c.is_compact() {
            for cell in c.boundary().cells() {
                if cell.image_bbox(&BBox::unit(cell.param_dim())).intersects(&sphi) {
                    return Err(Error::Validation(
                        "the cut-off end of a truncated chain lies inside the test-form support".into(),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// `∫_{T1} R_ε T2 ∧ φ` for an arbitrary test field.
pub fn wedge_eval_field(
    t1: &Current,
    t2: &Current,
    phi: Arc<dyn FormField>,
    eps: f64,
    data: &Arc<DeRhamData>,
    opts: &QuadOptions,
) -> Result<f64> {
    check_degrees(t1, t2, phi.degree())?;
    if data.dim() != t1.dim() {
        return Err(Error::DimensionMismatch("de Rham data and currents live in different spaces".into()));
    }
    check_truncation(t1, t2, phi.as_ref(), eps, data)?;
    let r = regularize_with(t2, eps, data, opts)?;
    let field = WedgeField { a: Arc::new(r), b: phi };
    evaluate_field(t1, Arc::new(field), opts)
}

/// `∫_{T1} R_ε T2 ∧ φ`.
pub fn wedge_eval(t1: &Current, t2: &Current, phi: &SmoothForm, eps: f64, data: &Arc<DeRhamData>) -> Result<f64> {
    wedge_eval_with(t1, t2, phi, eps, data, &QuadOptions::default())
}

pub fn wedge_eval_with(
    t1: &Current,
    t2: &Current,
    phi: &SmoothForm,
    eps: f64,
    data: &Arc<DeRhamData>,
    opts: &QuadOptions,
) -> Result<f64> {
    wedge_eval_field(t1, t2, Arc::new(phi.clone()), eps, data, opts)
}

fn support_hint(t1: &Current, t2: &Current) -> Option<BBox> {
    match (t1.support_box(), t2.support_box()) {
        (Some(a), Some(b)) => Some(a.intersect(&b)),
        (Some(a), None) | (None, Some(a)) => Some(a),
        _ => None,
    }
}

/// `[T1∧T2](φ)` extrapolated along the schedule.
pub fn intersect(
    t1: &Current,
    t2: &Current,
    phi: &SmoothForm,
    data: &Arc<DeRhamData>,
    schedule: &EpsilonSchedule,
) -> Result<IntersectionResult> {
    intersect_with(t1, t2, phi, data, schedule, &QuadOptions::default())
}

pub fn intersect_with(
    t1: &Current,
    t2: &Current,
    phi: &SmoothForm,
    data: &Arc<DeRhamData>,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<IntersectionResult> {
    check_degrees(t1, t2, phi.degree())?;
    let field: Arc<dyn FormField> = Arc::new(phi.clone());
    let value = limit_of(schedule, opts.parallel, |eps| wedge_eval_field(t1, t2, field.clone(), eps, data, opts))?;
    Ok(IntersectionResult {
        value,
        degree: t1.degree() + t2.degree(),
        support_hint: support_hint(t1, t2),
        data_id: data.id().to_string(),
    })
}

/// The constant 1 on `window`, cut off smoothly outside it.
pub fn unit_on(window: &BBox, collar: f64) -> SmoothForm {
    let outer = window.expand(collar);
    SmoothForm::function(window.dim(), ScalarField::plateau(Plateau::new(window.clone(), outer)))
}

/// `[T1∧T2](1)` for closed currents of complementary degree.
pub fn kronecker_index(
    t1: &Current,
    t2: &Current,
    data: &Arc<DeRhamData>,
    schedule: &EpsilonSchedule,
) -> Result<EpsilonLimit> {
    let m = t1.dim();
    if t1.degree() + t2.degree() != m {
        return Err(Error::NotTopDegree(t1.degree(), t2.degree(), m));
    }
    let hint = support_hint(t1, t2)
        .ok_or_else(|| Error::Unsupported("Kronecker index of two unbounded currents".into()))?;
    let window = hint.expand(data.reach(schedule.eps0) + 0.05);
    kronecker_index_in(t1, t2, &window, data, schedule, &QuadOptions::default())
}

/// `[T1∧T2](φ)` with `φ = 1` on `window`, localizing the index there.
pub fn kronecker_index_in(
    t1: &Current,
    t2: &Current,
    window: &BBox,
    data: &Arc<DeRhamData>,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<EpsilonLimit> {
    let m = t1.dim();
    if t1.degree() + t2.degree() != m {
        return Err(Error::NotTopDegree(t1.degree(), t2.degree(), m));
    }
    let phi = unit_on(window, 0.1);
    Ok(intersect_with(t1, t2, &phi, data, schedule, opts)?.value)
}

/// `[[T1∧T2]∧T3](φ)` as `∫_{T1} R_{ε₂}T2 ∧ R_{ε₃}T3 ∧ φ` with
/// `ε₂ = ρ² ε₃`, extrapolated in `ε₃`.
pub fn triple_intersect(
    t1: &Current,
    t2: &Current,
    t3: &Current,
    phi: &SmoothForm,
    data: &Arc<DeRhamData>,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<EpsilonLimit> {
    let m = t1.dim();
    if t2.dim() != m || t3.dim() != m || phi.dim() != m {
        return Err(Error::DimensionMismatch("triple product in different ambient spaces".into()));
    }
    let need = t1.current_dim() as i64 - t2.degree() as i64 - t3.degree() as i64;
    if need < 0 {
        return Err(Error::DegreeUnderflow(need));
    }
    if need as usize != phi.degree() {
        return Err(Error::DimensionMismatch(format!("test form of degree {}, expected {need}", phi.degree())));
    }
    let compact = [t1, t2, t3].iter().filter(|t| t.is_compact()).count();
    if compact < 2 {
        return Err(Error::Unsupported("the triple product needs two compact factors".into()));
    }
    let rho2 = schedule.ratio * schedule.ratio;
    let phi: Arc<dyn FormField> = Arc::new(phi.clone());
    limit_of(schedule, opts.parallel, |eps| {
        let inner = rho2 * eps;
        let r3 = regularize_with(t3, eps, data, opts)?;
        let right: Arc<dyn FormField> = Arc::new(WedgeField { a: Arc::new(r3), b: phi.clone() });
        check_truncation(t1, t2, right.as_ref(), inner, data)?;
        let r2 = regularize_with(t2, inner, data, opts)?;
        let field = WedgeField { a: Arc::new(r2), b: right };
        evaluate_field(t1, Arc::new(field), opts)
    })
}

/// Both sides of `[[T1∧T2]∧T3] = [T1∧[T2∧T3]]`. The right side is computed
/// as `(−1)^{p₁(p₂+p₃)} [[T2∧T3]∧T1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssociativityReport {
    pub left: EpsilonLimit,
    pub right: EpsilonLimit,
    pub sign: f64,
    pub residual: f64,
}

pub fn check_associativity(
    t1: &Current,
    t2: &Current,
    t3: &Current,
    phi: &SmoothForm,
    data: &Arc<DeRhamData>,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<AssociativityReport> {
    let left = triple_intersect(t1, t2, t3, phi, data, schedule, opts)?;
    let right = triple_intersect(t2, t3, t1, phi, data, schedule, opts)?;
    let e = t1.degree() * (t2.degree() + t3.degree());
    let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
    let residual = (left.extrapolated - sign * right.extrapolated).abs();
    Ok(AssociativityReport { left, right, sign, residual })
}

/// `[T1∧T2](dψ)`, which vanishes when both currents are closed.
pub fn check_closed(
    t1: &Current,
    t2: &Current,
    psi: &SmoothForm,
    data: &Arc<DeRhamData>,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<EpsilonLimit> {
    let dpsi = exterior_derivative(psi);
    Ok(intersect_with(t1, t2, &dpsi, data, schedule, opts)?.value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutativityReport {
    pub forward: EpsilonLimit,
    pub backward: EpsilonLimit,
    /// `(−1)^{ij}` for degrees `i`, `j`.
    pub sign: f64,
    pub residual: f64,
}

/// `|[T1∧T2](φ) − (−1)^{ij} [T2∧T1](φ)|`.
pub fn check_graded_commutativity(
    t1: &Current,
    t2: &Current,
    phi: &SmoothForm,
    data: &Arc<DeRhamData>,
    schedule: &EpsilonSchedule,
    opts: &QuadOptions,
) -> Result<CommutativityReport> {
    let forward = intersect_with(t1, t2, phi, data, schedule, opts)?.value;
    let backward = intersect_with(t2, t1, phi, data, schedule, opts)?.value;
    let sign = if (t1.degree() * t2.degree()) % 2 == 0 { 1.0 } else { -1.0 };
    let residual = (forward.extrapolated - sign * backward.extrapolated).abs();
    Ok(CommutativityReport { forward, backward, sign, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::BumpProfile;
    use crate::chain::{Cell, CellChain};
    use crate::poly::Poly;

    fn axes() -> (Current, Current) {
        let x = CellChain::single(Cell::segment(&[-1.5, 0.0], &[1.5, 0.0]).unwrap());
        let y = CellChain::single(Cell::segment(&[0.0, -1.5], &[0.0, 1.5]).unwrap());
        (Current::Chain(x), Current::Chain(y))
    }

    fn bump_fn(c: &[f64], inner: f64, outer: f64, p: Poly) -> SmoothForm {
        SmoothForm::function(c.len(), ScalarField::poly_cutoff(p, Plateau::centered(c, inner, outer)))
    }

    #[test]
    fn transversal_axes_give_point_evaluation() {
        let (x, y) = axes();
        let data = Arc::new(DeRhamData::standard(BumpProfile::smooth_radial(2)));
        let p = Poly::from_terms(2, vec![(vec![0, 0], 2.0), (vec![1, 0], 1.0), (vec![0, 1], -0.5)]);
        let phi = bump_fn(&[0.0, 0.0], 0.3, 0.9, p);
        let v = wedge_eval(&x, &y, &phi, 0.05, &data).unwrap();
        // Linear terms integrate out against the symmetric bump.
        assert!((v - 2.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn far_test_form_gives_exact_zero() {
        let (x, y) = axes();
        let data = Arc::new(DeRhamData::standard(BumpProfile::poly4(2)));
        let phi = bump_fn(&[0.8, 0.0], 0.1, 0.3, Poly::constant(2, 1.0));
        assert_eq!(wedge_eval(&x, &y, &phi, 0.2, &data).unwrap(), 0.0);
    }

    #[test]
    fn degree_underflow() {
        let (x, _) = axes();
        let data = Arc::new(DeRhamData::standard(BumpProfile::poly4(2)));
        let pt = Current::Points(crate::chain::PointMass::new(2, vec![(vec![0.0, 0.0], 1.0)]).unwrap());
        let phi = bump_fn(&[0.0, 0.0], 0.1, 0.3, Poly::constant(2, 1.0));
        assert!(matches!(wedge_eval(&x, &pt, &phi, 0.1, &data), Err(Error::DegreeUnderflow(-1))));
    }

    #[test]
    fn truncated_line_needs_room() {
        let x = Current::Chain(CellChain::single(Cell::segment(&[-1.5, 0.0], &[1.5, 0.0]).unwrap()));
        let y = Current::Chain(CellChain::single(Cell::segment(&[0.0, -0.5], &[0.0, 0.5]).unwrap()).truncated());
        let data = Arc::new(DeRhamData::standard(BumpProfile::poly4(2)));
        let phi = bump_fn(&[0.0, 0.0], 0.2, 0.4, Poly::constant(2, 1.0));
        assert!(matches!(wedge_eval(&x, &y, &phi, 0.2, &data), Err(Error::EpsilonTooLarge { .. })));
        assert!(wedge_eval(&x, &y, &phi, 0.05, &data).is_ok());
    }
}
