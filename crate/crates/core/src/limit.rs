//! Extraction of `lim_{ε→0}` from values on a geometric schedule.
//!
//! The leading error is modelled as `c ε^α`. Each Richardson step fits `α`
//! from every window of three consecutive values (iterated Aitken), so two
//! steps remove two power terms without knowing their exponents.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ε_k = eps0 · ratio^k` for `k = 0..count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
    /// Agreement required between the last two extrapolants.
    pub tol: f64,
}

impl EpsilonSchedule {
    pub fn new(eps0: f64, ratio: f64, count: usize, tol: f64) -> Result<Self> {
        if !(eps0 > 0.0) || !eps0.is_finite() {
            return Err(Error::Validation(format!("eps0 must be positive, got {eps0}")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Validation(format!("ratio must lie in (0, 1), got {ratio}")));
        }
        if count == 0 {
            return Err(Error::Validation("schedule needs at least one ε".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
        }
        Ok(EpsilonSchedule { eps0, ratio, count, tol })
    }

    /// `eps0 = 0.2 · scale`, halving eight times.
    pub fn standard(scale: f64) -> Self {
        EpsilonSchedule { eps0: 0.2 * scale, ratio: 0.5, count: 8, tol: 1e-6 }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn epsilons(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.eps0 * self.ratio.powi(k as i32)).collect()
    }

    pub fn last(&self) -> f64 {
        self.eps0 * self.ratio.powi(self.count as i32 - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Oscillating,
    Diverged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonLimit {
    pub schedule: EpsilonSchedule,
    pub raw_values: Vec<f64>,
    pub extrapolated: f64,
    pub error_estimate: f64,
    /// Fitted exponents of the removed error terms, one per level.
    pub orders: Vec<f64>,
    /// Extrapolants by level; level 0 is the raw sequence.
    pub levels: Vec<Vec<f64>>,
    pub verdict: Verdict,
}

impl EpsilonLimit {
    pub fn is_converged(&self) -> bool {
        self.verdict == Verdict::Converged
    }

    /// Nearest integer and the distance to it.
    pub fn rounded(&self) -> (i64, f64) {
        let r = self.extrapolated.round();
        (r as i64, (self.extrapolated - r).abs())
    }
}

/// Exponent `α` with `d_{k+1}/d_k = ρ^α`, from three consecutive values.
pub fn fit_order(v: &[f64], ratio: f64) -> Option<f64> {
    if v.len() < 3 {
        return None;
    }
    let n = v.len();
    let d1 = v[n - 2] - v[n - 3];
    let d2 = v[n - 1] - v[n - 2];
    if d1 == 0.0 || d2 == 0.0 {
        return None;
    }
    let q = d2 / d1;
    if !(q > 0.0 && q < 1.0) {
        return None;
    }
    let a = q.ln() / ratio.ln();
    (a.is_finite() && a > 0.05 && a < 8.0).then_some(a)
}

/// One Richardson step removing `c ε^α`.
pub fn richardson_step(v: &[f64], ratio: f64, alpha: f64) -> Vec<f64> {
    let r = ratio.powf(alpha);
    v.windows(2).map(|w| w[1] + (w[1] - w[0]) * r / (1.0 - r)).collect()
}

/// Extrapolates the values on `schedule`.
pub fn extrapolate(schedule: &EpsilonSchedule, raw: Vec<f64>) -> Result<EpsilonLimit> {
    extrapolate_with(schedule, raw, None)
}

/// Same as [`extrapolate`] with an optional known leading exponent.
pub fn extrapolate_with(schedule: &EpsilonSchedule, raw: Vec<f64>, known: Option<f64>) -> Result<EpsilonLimit> {
    if raw.len() != schedule.count {
        return Err(Error::Validation(format!(
            "{} values for a schedule of length {}",
            raw.len(),
            schedule.count
        )));
    }
    if let Some(i) = raw.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue(format!("raw value at ε index {i}")));
    }
    let rho = schedule.ratio;
    let mut levels = vec![raw.clone()];
    let mut orders = Vec::new();
    let scale = raw.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let flat = |v: &[f64]| v.windows(2).all(|w| (w[1] - w[0]).abs() <= 1e-15 * scale.max(1e-300));
    for level in 0..2 {
        let cur = levels.last().unwrap().clone();
        if cur.len() < 3 || flat(&cur) {
            break;
        }
        // Exponent fitted locally from each window of three values.
        let fallback = orders.last().map_or(1.0, |a: &f64| a + 1.0);
        let mut next = Vec::with_capacity(cur.len() - 2);
        let mut last_alpha = fallback;
        for k in 2..cur.len() {
            let alpha = match (level, known) {
                (0, Some(a)) => a,
                _ => fit_order(&cur[k - 2..=k], rho).unwrap_or(fallback),
            };
            last_alpha = alpha;
            next.push(richardson_step(&cur[k - 1..=k], rho, alpha)[0]);
        }
        orders.push(last_alpha);
        levels.push(next);
    }
    let top = levels.last().unwrap();
    let extrapolated = *top.last().unwrap();
    let error_estimate = if top.len() >= 2 { (top[top.len() - 1] - top[top.len() - 2]).abs() } else { 0.0 };
    let diffs: Vec<f64> = raw.windows(2).map(|w| w[1] - w[0]).collect();
    let alternations = diffs
        .windows(2)
        .rev()
        .take(3)
        .filter(|w| w[0] * w[1] < 0.0)
        .count();
    let verdict = if error_estimate < schedule.tol {
        Verdict::Converged
    } else if alternations >= 2 {
        Verdict::Oscillating
    } else {
        Verdict::Diverged
    };
    Ok(EpsilonLimit {
        schedule: schedule.clone(),
        raw_values: raw,
        extrapolated,
        error_estimate,
        orders,
        levels,
        verdict,
    })
}

/// Evaluates `f` at every `ε` of the schedule and extrapolates.
pub fn limit_of<F>(schedule: &EpsilonSchedule, parallel: bool, f: F) -> Result<EpsilonLimit>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let eps = schedule.epsilons();
    let raw: Vec<Result<f64>> = if parallel {
        eps.par_iter().map(|&e| f(e)).collect()
    } else {
        eps.iter().map(|&e| f(e)).collect()
    };
    let raw = raw.into_iter().collect::<Result<Vec<_>>>()?;
    extrapolate(schedule, raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_is_geometric() {
        let s = EpsilonSchedule::new(0.2, 0.5, 4, 1e-6).unwrap();
        assert_eq!(s.epsilons(), vec![0.2, 0.1, 0.05, 0.025]);
        assert!(EpsilonSchedule::new(0.2, 1.0, 4, 1e-6).is_err());
        assert!(EpsilonSchedule::new(-0.2, 0.5, 4, 1e-6).is_err());
    }

    #[test]
    fn removes_two_power_terms() {
        let s = EpsilonSchedule::new(0.2, 0.5, 8, 1e-9).unwrap();
        let raw: Vec<f64> = s.epsilons().iter().map(|e| 3.0 + 0.7 * e.powf(2.0 / 3.0) - 0.4 * e.powf(4.0 / 3.0)).collect();
        let l = extrapolate(&s, raw).unwrap();
        assert!((l.extrapolated - 3.0).abs() < 5e-5, "{l:?}");
        assert!((l.orders[0] - 2.0 / 3.0).abs() < 0.05);
    }

    #[test]
    fn constant_sequence_is_exact() {
        let s = EpsilonSchedule::standard(1.0);
        let l = extrapolate(&s, vec![0.0; 8]).unwrap();
        assert_eq!(l.extrapolated, 0.0);
        assert_eq!(l.verdict, Verdict::Converged);
    }

    #[test]
    fn alternating_growth_is_oscillating() {
        let s = EpsilonSchedule::new(0.2, 0.5, 6, 1e-6).unwrap();
        let raw: Vec<f64> = (0..6).map(|k| if k % 2 == 0 { k as f64 } else { -(k as f64) }).collect();
        assert_eq!(extrapolate(&s, raw).unwrap().verdict, Verdict::Oscillating);
        let grow: Vec<f64> = (0..6).map(|k| 2f64.powi(k)).collect();
        assert_eq!(extrapolate(&s, grow).unwrap().verdict, Verdict::Diverged);
    }

    #[test]
    fn rejects_non_finite() {
        let s = EpsilonSchedule::new(0.2, 0.5, 3, 1e-6).unwrap();
        assert!(extrapolate(&s, vec![1.0, f64::NAN, 1.0]).is_err());
    }
}
