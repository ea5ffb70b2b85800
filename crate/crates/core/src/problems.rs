//! Objective functions: the `f0` noise landscape and one or more surrogate
//! functions for each of the five benchmark function groups.
//!
//! | tag            | group | form (z = x - o)                                     |
//! |----------------|-------|------------------------------------------------------|
//! | `f0-noise`     | -     | fresh `U(0,1)` per call                               |
//! | `sphere`       | 1     | `sum z_j^2`                                           |
//! | `linear-slope` | 1     | `sum s_j (5 - x_j sign(o_j))`, `s_j = 10^((j-1)/(n-1))`, `o` a corner |
//! | `rosenbrock`   | 2     | `sum 100 (z_j^2 - z_{j+1})^2 + (z_j - 1)^2`           |
//! | `ellipsoid-rot`| 3     | `sum 10^(6(j-1)/(n-1)) y_j^2`, `y = R z`              |
//! | `rastrigin`    | 4     | `10 n + sum z_j^2 - 10 cos(2 pi z_j)`                 |
//! | `random-peaks` | 5     | `min_k w_k + |x - c_k|^2` over 21 peaks, `w_0 = 0`    |
//!
//! Every value is offset by `f_opt ~ U(-100, 100)`. The rosenbrock surrogate
//! as written has its minimum at `z = 1`; the shift is applied to `z + 1` so
//! that `o` itself is the optimum.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{config, Error, Result};
use crate::population::Budget;
use crate::rng::{mix64, RngStream};
use crate::space::SearchSpace;

pub const PEAK_COUNT: usize = 21;
pub const DEFAULT_BOUND: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "&str", into = "&'static str"))]
pub enum ProblemKind {
    F0Noise,
    Sphere,
    LinearSlope,
    Rosenbrock,
    EllipsoidRot,
    Rastrigin,
    RandomPeaks,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 7] = [
        Self::F0Noise,
        Self::Sphere,
        Self::LinearSlope,
        Self::Rosenbrock,
        Self::EllipsoidRot,
        Self::Rastrigin,
        Self::RandomPeaks,
    ];

    /// The surrogates with a known optimum, one or more per function group.
    pub const BENCHMARK: [ProblemKind; 6] = [
        Self::Sphere,
        Self::LinearSlope,
        Self::Rosenbrock,
        Self::EllipsoidRot,
        Self::Rastrigin,
        Self::RandomPeaks,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::F0Noise => "f0-noise",
            Self::Sphere => "sphere",
            Self::LinearSlope => "linear-slope",
            Self::Rosenbrock => "rosenbrock",
            Self::EllipsoidRot => "ellipsoid-rot",
            Self::Rastrigin => "rastrigin",
            Self::RandomPeaks => "random-peaks",
        }
    }

    /// Function group 1..=5; `None` for the noise landscape.
    pub fn group(self) -> Option<u8> {
        match self {
            Self::F0Noise => None,
            Self::Sphere | Self::LinearSlope => Some(1),
            Self::Rosenbrock => Some(2),
            Self::EllipsoidRot => Some(3),
            Self::Rastrigin => Some(4),
            Self::RandomPeaks => Some(5),
        }
    }

    pub fn is_deterministic(self) -> bool {
        self != Self::F0Noise
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| Error::UnknownTag {
                kind: "function",
                tag: s.into(),
            })
    }
}

impl TryFrom<&str> for ProblemKind {
    type Error = Error;

    fn try_from(s: &str) -> Result<Self> {
        s.parse()
    }
}

impl From<ProblemKind> for &'static str {
    fn from(p: ProblemKind) -> Self {
        p.tag()
    }
}

/// Row-major orthogonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    n: usize,
    data: Vec<f64>,
}

impl Rotation {
    /// Modified Gram-Schmidt on the rows of a seeded Gaussian matrix.
    pub fn random(n: usize, rng: &mut RngStream) -> Self {
        let mut data: Vec<f64> = (0..n * n).map(|_| rng.normal(0.0, 1.0)).collect();
        for i in 0..n {
            for k in 0..i {
                let dot: f64 = (0..n).map(|c| data[i * n + c] * data[k * n + c]).sum();
                for c in 0..n {
                    data[i * n + c] -= dot * data[k * n + c];
                }
            }
            let norm = libm::sqrt((0..n).map(|c| data[i * n + c] * data[i * n + c]).sum());
            for c in 0..n {
                data[i * n + c] /= norm;
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.data[r * self.n + c] * z[c]).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Peaks {
    centers: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub kind: ProblemKind,
    pub space: SearchSpace,
    /// Optimum location; `None` for the noise landscape.
    pub shift: Option<Vec<f64>>,
    pub rotation: Option<Rotation>,
    pub f_opt: f64,
    pub instance_seed: u64,
    peaks: Option<Peaks>,
}

/// Instance on the default `[-5, 5]^n` box.
pub fn make_instance(kind: ProblemKind, n: usize, instance_seed: u64) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(config(alloc::format!("dimension must be at least 2, got {n}")));
    }
    make_instance_in(kind, SearchSpace::uniform(n, -DEFAULT_BOUND, DEFAULT_BOUND)?, instance_seed)
}

/// Instance on an arbitrary box. Shifts, peak centers and the linear-slope
/// corner are drawn relative to `space`.
pub fn make_instance_in(kind: ProblemKind, space: SearchSpace, instance_seed: u64) -> Result<ProblemInstance> {
    let n = space.dim();
    let mut rng = RngStream::new(mix64(instance_seed ^ (kind as u64).wrapping_mul(0x9E37_79B9)));
    let draw_point = |rng: &mut RngStream| -> Vec<f64> {
        (0..n)
            .map(|j| rng.uniform_in(space.lower()[j], space.upper()[j]))
            .collect()
    };

    let f_opt = if kind == ProblemKind::F0Noise {
        0.0
    } else {
        rng.uniform_in(-100.0, 100.0)
    };
    let mut rotation = None;
    let mut peaks = None;
    let shift = match kind {
        ProblemKind::F0Noise => None,
        ProblemKind::LinearSlope => Some(
            (0..n)
                .map(|j| {
                    if rng.uniform() < 0.5 {
                        space.lower()[j]
                    } else {
                        space.upper()[j]
                    }
                })
                .collect(),
        ),
        ProblemKind::EllipsoidRot => {
            let o = draw_point(&mut rng);
            rotation = Some(Rotation::random(n, &mut rng));
            Some(o)
        }
        ProblemKind::RandomPeaks => {
            let centers: Vec<Vec<f64>> = (0..PEAK_COUNT).map(|_| draw_point(&mut rng)).collect();
            let mut weights = vec![0.0];
            weights.extend((1..PEAK_COUNT).map(|_| rng.uniform_in(1.0, 10.0)));
            let o = centers[0].clone();
            peaks = Some(Peaks { centers, weights });
            Some(o)
        }
        _ => Some(draw_point(&mut rng)),
    };
    Ok(ProblemInstance {
        kind,
        space,
        shift,
        rotation,
        f_opt,
        instance_seed,
        peaks,
    })
}

impl ProblemInstance {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Objective value without budget accounting. `rng` is only read by `f0`.
    pub fn value(&self, x: &[f64], rng: &mut RngStream) -> f64 {
        let n = self.dim();
        let shifted = |x: &[f64]| -> Vec<f64> {
            let o = self.shift.as_deref().expect("deterministic instances carry a shift");
            x.iter().zip(o).map(|(a, b)| a - b).collect()
        };
        let exponent = |j: usize| j as f64 / (n - 1).max(1) as f64;
        let raw = match self.kind {
            ProblemKind::F0Noise => return rng.uniform(),
            ProblemKind::Sphere => shifted(x).iter().map(|z| z * z).sum(),
            ProblemKind::LinearSlope => {
                let o = self.shift.as_deref().expect("linear slope has a corner");
                let bound = |j: usize| if o[j] >= 0.0 { self.space.upper()[j] } else { self.space.lower()[j] };
                (0..n)
                    .map(|j| {
                        let s = libm::pow(10.0, exponent(j));
                        let sign = if o[j] >= 0.0 { 1.0 } else { -1.0 };
                        s * (bound(j) * sign - x[j] * sign)
                    })
                    .sum()
            }
            ProblemKind::Rosenbrock => {
                let z: Vec<f64> = shifted(x).iter().map(|z| z + 1.0).collect();
                z.windows(2)
                    .map(|w| {
                        let a = w[0] * w[0] - w[1];
                        let b = w[0] - 1.0;
                        100.0 * a * a + b * b
                    })
                    .sum()
            }
            ProblemKind::EllipsoidRot => {
                let y = self.rotation.as_ref().expect("rotation present").apply(&shifted(x));
                y.iter()
                    .enumerate()
                    .map(|(j, yj)| libm::pow(10.0, 6.0 * exponent(j)) * yj * yj)
                    .sum()
            }
            ProblemKind::Rastrigin => {
                let z = shifted(x);
                10.0 * n as f64
                    + z.iter()
                        .map(|zj| zj * zj - 10.0 * libm::cos(2.0 * core::f64::consts::PI * zj))
                        .sum::<f64>()
            }
            ProblemKind::RandomPeaks => {
                let peaks = self.peaks.as_ref().expect("peaks present");
                peaks
                    .centers
                    .iter()
                    .zip(&peaks.weights)
                    .map(|(c, w)| w + c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                    .fold(f64::INFINITY, f64::min)
            }
        };
        raw + self.f_opt
    }

    /// One budgeted evaluation.
    pub fn evaluate(&self, x: &[f64], budget: &mut Budget, rng: &mut RngStream) -> Result<f64> {
        budget.consume()?;
        Ok(self.value(x, rng))
    }
}
