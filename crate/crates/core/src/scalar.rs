//! Scalar coefficient functions with symbolic partial derivatives.

use std::fmt;
use std::sync::Arc;

use crate::geometry::{BBox, Plateau};
use crate::poly::Poly;

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A smooth real function on `ℝ^m`.
#[derive(Clone)]
pub enum ScalarField {
    Const(f64),
    Poly(Poly),
    /// A mixed partial derivative of a plateau cutoff.
    Plateau { plateau: Plateau, orders: Vec<usize> },
    Product(Vec<ScalarField>),
    Sum(Vec<ScalarField>),
    /// An opaque closure; derivatives fall back to central differences.
    Custom { f: ScalarFn, support: Option<BBox> },
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Const(c) => write!(f, "{c}"),
            ScalarField::Poly(p) => write!(f, "({p:?})"),
            ScalarField::Plateau { orders, .. } => write!(f, "plateau{orders:?}"),
            ScalarField::Product(v) => write!(f, "prod{v:?}"),
            ScalarField::Sum(v) => write!(f, "sum{v:?}"),
            ScalarField::Custom { .. } => write!(f, "custom"),
        }
    }
}

const FD_STEP: f64 = 1e-5;

impl ScalarField {
    pub fn plateau(p: Plateau) -> Self {
        let orders = vec![0; p.dim()];
        ScalarField::Plateau { plateau: p, orders }
    }

    pub fn custom(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, support: Option<BBox>) -> Self {
        ScalarField::Custom { f: Arc::new(f), support }
    }

    /// `poly · plateau`, the usual shape of a test-form coefficient.
    pub fn poly_cutoff(p: Poly, cutoff: Plateau) -> Self {
        ScalarField::Product(vec![ScalarField::Poly(p), ScalarField::plateau(cutoff)])
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ScalarField::Const(c) => *c == 0.0,
            ScalarField::Poly(p) => p.is_zero(),
            ScalarField::Product(v) => v.iter().any(|s| s.is_zero()),
            ScalarField::Sum(v) => v.iter().all(|s| s.is_zero()),
            _ => false,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Const(c) => *c,
            ScalarField::Poly(p) => p.eval(x),
            ScalarField::Plateau { plateau, orders } => plateau.derivative(x, orders),
            ScalarField::Product(v) => {
                let mut acc = 1.0;
                for s in v {
                    acc *= s.eval(x);
                    if acc == 0.0 {
                        break;
                    }
                }
                acc
            }
            ScalarField::Sum(v) => v.iter().map(|s| s.eval(x)).sum(),
            ScalarField::Custom { f, .. } => f(x),
        }
    }

    pub fn derivative(&self, axis: usize) -> ScalarField {
        match self {
            ScalarField::Const(_) => ScalarField::Const(0.0),
            ScalarField::Poly(p) => ScalarField::Poly(p.derivative(axis)),
            ScalarField::Plateau { plateau, orders } => {
                let mut o = orders.clone();
                o[axis] += 1;
                ScalarField::Plateau { plateau: plateau.clone(), orders: o }
            }
            ScalarField::Product(v) => {
                let mut terms = Vec::new();
                for i in 0..v.len() {
                    let di = v[i].derivative(axis);
                    if di.is_zero() {
                        continue;
                    }
                    let mut factors = v.clone();
                    factors[i] = di;
                    terms.push(ScalarField::Product(factors));
                }
                ScalarField::Sum(terms)
            }
            ScalarField::Sum(v) => {
                ScalarField::Sum(v.iter().map(|s| s.derivative(axis)).filter(|s| !s.is_zero()).collect())
            }
            ScalarField::Custom { f, support } => {
                let f = f.clone();
                ScalarField::Custom {
                    f: Arc::new(move |x: &[f64]| {
                        let mut a = x.to_vec();
                        let mut b = x.to_vec();
                        a[axis] += FD_STEP;
                        b[axis] -= FD_STEP;
                        (f(&a) - f(&b)) / (2.0 * FD_STEP)
                    }),
                    support: support.clone(),
                }
            }
        }
    }

    /// A box outside which the function vanishes, when one is known.
    pub fn support(&self) -> Option<BBox> {
        match self {
            ScalarField::Plateau { plateau, .. } => Some(plateau.support()),
            ScalarField::Product(v) => v
                .iter()
                .filter_map(|s| s.support())
                .reduce(|a, b| a.intersect(&b)),
            ScalarField::Sum(v) => {
                let mut acc: Option<BBox> = None;
                for s in v {
                    let b = s.support()?;
                    acc = Some(match acc {
                        None => b,
                        Some(a) => a.union(&b),
                    });
                }
                acc
            }
            ScalarField::Custom { support, .. } => support.clone(),
            ScalarField::Const(_) | ScalarField::Poly(_) => None,
        }
    }

    /// Whether derivatives are exact (no finite differences involved).
    pub fn is_symbolic(&self) -> bool {
        match self {
            ScalarField::Custom { .. } => false,
            ScalarField::Product(v) | ScalarField::Sum(v) => v.iter().all(|s| s.is_symbolic()),
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let p = Poly::from_terms(2, vec![(vec![1, 2], 1.0)]);
        let f = ScalarField::poly_cutoff(p, Plateau::centered(&[0.0, 0.0], 0.3, 1.0));
        let x = [0.5, -0.4];
        let h = 1e-6;
        for axis in 0..2 {
            let mut a = x;
            let mut b = x;
            a[axis] += h;
            b[axis] -= h;
            let fd = (f.eval(&a) - f.eval(&b)) / (2.0 * h);
            assert!((fd - f.derivative(axis).eval(&x)).abs() < 1e-7);
        }
        assert_eq!(f.support().unwrap(), BBox::cube(2, -1.0, 1.0));
    }

    #[test]
    fn custom_uses_central_differences() {
        let f = ScalarField::custom(|x| x[0].sin(), None);
        assert!((f.derivative(0).eval(&[0.3]) - 0.3f64.cos()).abs() < 1e-9);
        assert!(!f.is_symbolic());
    }
}
