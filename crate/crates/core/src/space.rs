use alloc::vec;
use alloc::vec::Vec;

use crate::error::{config, Result};

/// Closed box `[lower_1, upper_1] x ... x [lower_n, upper_n]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(config("search space needs at least one dimension"));
        }
        if lower.len() != upper.len() {
            return Err(config("lower and upper bounds differ in length"));
        }
        for (j, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(config(alloc::format!("bound {j} is not finite")));
            }
            if lo > hi {
                return Err(config(alloc::format!(
                    "degenerate bounds in dimension {j}: lower {lo} > upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[lo, hi]^n`.
    pub fn uniform(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (lo + hi) / 2.0)
            .collect()
    }

    pub fn contains_component(&self, j: usize, v: f64) -> bool {
        self.lower[j] <= v && v <= self.upper[j]
    }

    /// Inclusive bounds check. NaN components are infeasible.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(j, &v)| self.contains_component(j, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(SearchSpace::new(vec![], vec![]).is_err());
        assert!(SearchSpace::new(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(SearchSpace::new(vec![1.0], vec![0.0]).is_err());
        assert!(SearchSpace::new(vec![2.0, 2.0], vec![2.0, 2.0]).is_ok());
    }

    #[test]
    fn bounds_are_closed() {
        let s = SearchSpace::uniform(2, -5.0, 5.0).unwrap();
        assert!(s.contains(&[5.0, -5.0]));
        assert!(!s.contains(&[5.000_000_1, 0.0]));
        assert!(!s.contains(&[f64::NAN, 0.0]));
    }
}
