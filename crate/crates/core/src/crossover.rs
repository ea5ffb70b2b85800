use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{internal, Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "&str", into = "&'static str"))]
pub enum CrossoverKind {
    Binomial,
    Exponential,
}

impl CrossoverKind {
    pub const ALL: [CrossoverKind; 2] = [Self::Binomial, Self::Exponential];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Binomial => "bin",
            Self::Exponential => "exp",
        }
    }

    pub fn apply(self, target: &[f64], donor: &[f64], cr: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
        match self {
            Self::Binomial => binomial_crossover(target, donor, cr, rng),
            Self::Exponential => exponential_crossover(target, donor, cr, rng),
        }
    }
}

impl fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CrossoverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bin" | "binomial" => Ok(Self::Binomial),
            "exp" | "exponential" => Ok(Self::Exponential),
            _ => Err(Error::UnknownTag {
                kind: "crossover",
                tag: s.into(),
            }),
        }
    }
}

impl TryFrom<&str> for CrossoverKind {
    type Error = Error;

    fn try_from(s: &str) -> Result<Self> {
        s.parse()
    }
}

impl From<CrossoverKind> for &'static str {
    fn from(c: CrossoverKind) -> Self {
        c.tag()
    }
}

fn check_lengths(target: &[f64], donor: &[f64]) -> Result<()> {
    if target.len() != donor.len() || target.is_empty() {
        return Err(internal(alloc::format!(
            "crossover length mismatch: target {} vs donor {}",
            target.len(),
            donor.len()
        )));
    }
    Ok(())
}

/// Draws `j_rand` first, then one uniform per component in ascending order.
/// Component `j` comes from the donor iff `u_j <= cr` or `j == j_rand`.
pub fn binomial_crossover(target: &[f64], donor: &[f64], cr: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    check_lengths(target, donor)?;
    let n = target.len();
    let j_rand = rng.index(n);
    Ok((0..n)
        .map(|j| {
            let u = rng.uniform();
            if u <= cr || j == j_rand {
                donor[j]
            } else {
                target[j]
            }
        })
        .collect())
}

/// Copies a wrapped block `start, start+1, ...` from the donor. The start is
/// copied unconditionally; each further component needs `U(0,1) < cr`.
pub fn exponential_crossover(target: &[f64], donor: &[f64], cr: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    check_lengths(target, donor)?;
    let n = target.len();
    let start = rng.index(n);
    let mut trial = target.to_vec();
    trial[start] = donor[start];
    let mut len = 1;
    while len < n && rng.uniform() < cr {
        let j = (start + len) % n;
        trial[j] = donor[j];
        len += 1;
    }
    Ok(trial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn differing(a: &[f64], b: &[f64]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn binomial_extremes() {
        let t = vec![0.0; 6];
        let d = vec![1.0; 6];
        for seed in 0..50 {
            let mut rng = RngStream::new(seed);
            assert_eq!(binomial_crossover(&t, &d, 1.0, &mut rng).unwrap(), d);
            assert_eq!(differing(&binomial_crossover(&t, &d, 0.0, &mut rng).unwrap(), &t), 1);
            assert_eq!(binomial_crossover(&t, &t, 0.4, &mut rng).unwrap(), t);
        }
    }

    #[test]
    fn exponential_extremes() {
        let t = vec![0.0; 6];
        let d = vec![1.0; 6];
        for seed in 0..50 {
            let mut rng = RngStream::new(seed);
            assert_eq!(exponential_crossover(&t, &d, 1.0, &mut rng).unwrap(), d);
            assert_eq!(differing(&exponential_crossover(&t, &d, 0.0, &mut rng).unwrap(), &t), 1);
        }
    }

    #[test]
    fn exponential_wraps() {
        // n = 3; find a seed that starts at the last component and passes two tests.
        let t = vec![0.0; 3];
        let d = vec![1.0, 2.0, 3.0];
        let mut seen = false;
        for seed in 0..500 {
            let mut probe = RngStream::new(seed);
            let start = probe.index(3);
            let passes = probe.uniform() < 0.7 && probe.uniform() < 0.7;
            if start == 2 && passes {
                let trial = exponential_crossover(&t, &d, 0.7, &mut RngStream::new(seed)).unwrap();
                assert_eq!(trial, d);
                seen = true;
            }
            if start == 2 && !passes {
                let trial = exponential_crossover(&t, &d, 0.7, &mut RngStream::new(seed)).unwrap();
                assert_eq!(trial[2], 3.0);
                assert_eq!(trial[1], 0.0);
            }
        }
        assert!(seen);
    }

    #[test]
    fn length_mismatch() {
        let mut rng = RngStream::new(0);
        assert!(binomial_crossover(&[0.0], &[0.0, 1.0], 0.5, &mut rng).is_err());
        assert!(exponential_crossover(&[0.0, 1.0], &[0.0], 0.5, &mut rng).is_err());
    }
}
