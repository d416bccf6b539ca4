//! The current sum type and plain evaluation on test forms.

use std::sync::Arc;

use crate::chain::{CellChain, PointMass};
use crate::error::{Error, Result};
use crate::form::{FormField, SmoothForm, WedgeField};
use crate::geometry::BBox;
use crate::integrate::{integrate_chain, integrate_space, QuadOptions};
use crate::smoothing::MollifiedForm;

/// A current on `ℝ^m`.
///
/// Smooth forms act by `ω(φ) = ∫ ω ∧ φ`, chains by integration.
#[derive(Clone)]
pub enum Current {
    Chain(CellChain),
    Form(SmoothForm),
    Mollified(Arc<MollifiedForm>),
    Points(PointMass),
}

impl From<CellChain> for Current {
    fn from(c: CellChain) -> Self {
        Current::Chain(c)
    }
}

impl From<SmoothForm> for Current {
    fn from(f: SmoothForm) -> Self {
        Current::Form(f)
    }
}

impl From<PointMass> for Current {
    fn from(p: PointMass) -> Self {
        Current::Points(p)
    }
}

impl Current {
    pub fn dim(&self) -> usize {
        match self {
            Current::Chain(c) => c.dim(),
            Current::Form(f) => f.dim(),
            Current::Mollified(m) => m.dim(),
            Current::Points(p) => p.dim,
        }
    }

    /// Degree `m - k` of a `k`-dimensional current.
    pub fn degree(&self) -> usize {
        match self {
            Current::Chain(c) => c.degree(),
            Current::Form(f) => f.degree(),
            Current::Mollified(m) => m.degree(),
            Current::Points(p) => p.dim,
        }
    }

    /// Dimension `k` of the current (degree of the forms it eats).
    pub fn current_dim(&self) -> usize {
        self.dim() - self.degree()
    }

    /// Whether the current is known to have compact support.
    pub fn is_compact(&self) -> bool {
        match self {
            Current::Chain(c) => c.is_compact(),
            Current::Form(f) => f.support().is_some(),
            Current::Mollified(m) => m.support().is_some(),
            Current::Points(_) => true,
        }
    }

    /// A box containing the support, if bounded.
    pub fn support_box(&self) -> Option<BBox> {
        match self {
            Current::Chain(c) => Some(c.bbox()),
            Current::Form(f) => f.support(),
            Current::Mollified(m) => m.support(),
            Current::Points(p) => Some(p.to_chain().bbox()),
        }
    }

    pub fn as_chain(&self) -> Option<CellChain> {
        match self {
            Current::Chain(c) => Some(c.clone()),
            Current::Points(p) => Some(p.to_chain()),
            _ => None,
        }
    }
}

/// `T(ω)` for any field `ω` of complementary degree.
pub fn evaluate_field(t: &Current, field: Arc<dyn FormField>, opts: &QuadOptions) -> Result<f64> {
    if field.dim() != t.dim() {
        return Err(Error::DimensionMismatch(format!(
            "current on ℝ^{} evaluated on a form on ℝ^{}",
            t.dim(),
            field.dim()
        )));
    }
    if field.degree() != t.current_dim() {
        return Err(Error::DimensionMismatch(format!(
            "current of dimension {} evaluated on a form of degree {}",
            t.current_dim(),
            field.degree()
        )));
    }
    match t {
        Current::Chain(c) => integrate_chain(c, field.as_ref(), opts),
        Current::Points(p) => integrate_chain(&p.to_chain(), field.as_ref(), opts),
        Current::Form(f) => {
            let w = WedgeField { a: Arc::new(f.clone()), b: field };
            integrate_space(&w, opts)
        }
        Current::Mollified(m) => {
            let w = WedgeField { a: m.clone(), b: field };
            integrate_space(&w, opts)
        }
    }
}

/// `∫_T φ`. The test form must have a support box.
pub fn evaluate(t: &Current, phi: &SmoothForm) -> Result<f64> {
    evaluate_with(t, phi, &QuadOptions::default())
}

pub fn evaluate_with(t: &Current, phi: &SmoothForm, opts: &QuadOptions) -> Result<f64> {
    if phi.support().is_none() {
        return Err(Error::Validation("test form without a support box".into()));
    }
    evaluate_field(t, Arc::new(phi.clone()), opts)
}
