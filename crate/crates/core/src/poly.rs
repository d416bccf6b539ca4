//! Multivariate real polynomials used for cell parametrizations and test-form
//! coefficients.
//!
//! Terms are kept in canonical form: sorted by exponent tuple, merged, and
//! free of exact zeros.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::BBox;

/// A polynomial in `nvars` real variables.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

/// Wire form: a list of `(coefficient, exponent-tuple)` pairs.
#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl TryFrom<PolyRepr> for Poly {
    type Error = String;
    fn try_from(r: PolyRepr) -> Result<Self, String> {
        for (_, e) in &r.terms {
            if e.len() != r.nvars {
                return Err(format!(
                    "exponent tuple of length {} in a polynomial of {} variables",
                    e.len(),
                    r.nvars
                ));
            }
        }
        Ok(Poly::from_terms(
            r.nvars,
            r.terms.into_iter().map(|(c, e)| (e, c)).collect(),
        ))
    }
}

impl From<Poly> for PolyRepr {
    fn from(p: Poly) -> Self {
        PolyRepr {
            nvars: p.nvars,
            terms: p.terms.into_iter().map(|(e, c)| (c, e)).collect(),
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (v, &k) in e.iter().enumerate() {
                if k == 1 {
                    write!(f, "*u{v}")?;
                } else if k > 1 {
                    write!(f, "*u{v}^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self::from_terms(nvars, vec![(vec![0; nvars], c)])
    }

    /// The coordinate function `u_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Self::from_terms(nvars, vec![(e, 1.0)])
    }

    /// `offset + Σ_j coeffs[j] u_j`.
    pub fn affine(offset: f64, coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        let mut terms = vec![(vec![0; n], offset)];
        for (j, &c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 1;
            terms.push((e, c));
        }
        Self::from_terms(n, terms)
    }

    pub fn from_terms(nvars: usize, mut terms: Vec<(Vec<u32>, f64)>) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Vec<u32>, f64)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            debug_assert_eq!(e.len(), nvars);
            match merged.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        Poly { nvars, terms: merged }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.nvars);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (x, &k) in u.iter().zip(e) {
                if k > 0 {
                    t *= x.powi(k as i32);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[var] -= 1;
                (e2, c * e[var] as f64)
            })
            .collect();
        Poly::from_terms(self.nvars, terms)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Poly::from_terms(self.nvars, terms)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                terms.push((e, c1 * c2));
            }
        }
        Poly::from_terms(self.nvars, terms)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(self.nvars, 1.0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes `u_var = value`, keeping the variable count.
    pub fn fix_var(&self, var: usize, value: f64) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                let k = e2[var];
                e2[var] = 0;
                (e2, c * value.powi(k as i32))
            })
            .collect();
        Poly::from_terms(self.nvars, terms)
    }

    /// Drops variable `var` (which must not occur).
    pub fn remove_var(&self, var: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                assert_eq!(e[var], 0, "variable still present");
                let mut e2 = e.clone();
                e2.remove(var);
                (e2, *c)
            })
            .collect();
        Poly::from_terms(self.nvars - 1, terms)
    }

    /// Restricts to the face `u_var = value` of the unit cube.
    pub fn face(&self, var: usize, value: f64) -> Poly {
        self.fix_var(var, value).remove_var(var)
    }

    /// Composition `self(q_0, …, q_{n-1})`; every `q_i` has `nv` variables.
    pub fn compose(&self, nv: usize, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars);
        let mut acc = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(nv, *c);
            for (q, &k) in subs.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&q.pow(k));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Re-embeds into a larger variable list: variable `j` becomes `map[j]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = vec![0; nvars];
                for (j, &k) in e.iter().enumerate() {
                    e2[map[j]] += k;
                }
                (e2, *c)
            })
            .collect();
        Poly::from_terms(nvars, terms)
    }

    /// Conservative enclosure of the range over a box, by interval arithmetic.
    pub fn range_on(&self, b: &BBox) -> (f64, f64) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for (e, c) in &self.terms {
            let (mut tl, mut th) = (*c, *c);
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let (pl, ph) = interval_pow(b.lo[v], b.hi[v], k);
                let cands = [tl * pl, tl * ph, th * pl, th * ph];
                tl = cands.iter().cloned().fold(f64::INFINITY, f64::min);
                th = cands.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            }
            lo += tl;
            hi += th;
        }
        (lo, hi)
    }

    /// Largest absolute coefficient of `self - other`.
    pub fn max_coeff_diff(&self, other: &Poly) -> f64 {
        self.add(&other.scale(-1.0))
            .terms
            .iter()
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }
}

fn interval_pow(lo: f64, hi: f64, k: u32) -> (f64, f64) {
    let a = lo.powi(k as i32);
    let b = hi.powi(k as i32);
    if k % 2 == 1 || lo >= 0.0 {
        (a.min(b), a.max(b))
    } else if hi <= 0.0 {
        (b.min(a), a.max(b))
    } else {
        (0.0, a.max(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_and_eval() {
        // 3 u0^2 u1 + 2
        let p = Poly::from_terms(2, vec![(vec![2, 1], 3.0), (vec![0, 0], 2.0)]);
        assert_eq!(p.eval(&[2.0, 1.5]), 3.0 * 4.0 * 1.5 + 2.0);
        let d0 = p.derivative(0);
        assert_eq!(d0.eval(&[2.0, 1.5]), 6.0 * 2.0 * 1.5);
        assert!(p.derivative(0).derivative(0).derivative(0).is_zero());
    }

    #[test]
    fn compose_matches_pointwise() {
        let p = Poly::from_terms(2, vec![(vec![1, 1], 1.0), (vec![2, 0], -2.0)]);
        let q0 = Poly::affine(1.0, &[2.0]);
        let q1 = Poly::var(1, 0).pow(3);
        let c = p.compose(1, &[q0.clone(), q1.clone()]);
        for &t in &[-1.0, 0.3, 2.0] {
            let want = p.eval(&[q0.eval(&[t]), q1.eval(&[t])]);
            assert!((c.eval(&[t]) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn range_encloses_samples() {
        let p = Poly::from_terms(2, vec![(vec![2, 0], 1.0), (vec![1, 1], -3.0), (vec![0, 3], 0.5)]);
        let b = BBox::new(vec![-0.5, 0.2], vec![0.7, 1.1]);
        let (lo, hi) = p.range_on(&b);
        for i in 0..=10 {
            for j in 0..=10 {
                let u = [-0.5 + 1.2 * i as f64 / 10.0, 0.2 + 0.9 * j as f64 / 10.0];
                let v = p.eval(&u);
                assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn wire_format_roundtrip() {
        let p = Poly::from_terms(2, vec![(vec![0, 2], 1.0), (vec![1, 0], -0.5)]);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("[1.0,[0,2]]"));
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Poly>(r#"{"nvars":2,"terms":[[1.0,[1]]]}"#).is_err());
    }
}
