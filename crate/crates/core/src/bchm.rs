//! Boundary constraint handling methods.
//!
//! Eleven methods repair a donor vector through [`repair`]. Resampling wraps
//! the mutation step itself ([`resample_guard`]) and death penalty screens
//! trial vectors after crossover ([`death_penalty_check`]). Bounds are closed.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{config, Error, Result};
use crate::mutation::{mutate, MutationOutcome, MutationStrategy};
use crate::population::Population;
use crate::rng::RngStream;
use crate::space::SearchSpace;

/// Resampling gives up after this many re-draws and projects the last donor.
pub const MAX_RESAMPLES: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "&str", into = "&'static str"))]
pub enum BchmKind {
    Resampling,
    Reinitialization,
    Projection,
    Reflection,
    Wrapping,
    Transformation,
    RandBase,
    MidpointBase,
    MidpointTarget,
    Conservatism,
    ProjectionMidpoint,
    ProjectionBase,
    DeathPenalty,
}

impl BchmKind {
    pub const ALL: [BchmKind; 13] = [
        Self::Resampling,
        Self::Reinitialization,
        Self::Projection,
        Self::Reflection,
        Self::Wrapping,
        Self::Transformation,
        Self::RandBase,
        Self::MidpointBase,
        Self::MidpointTarget,
        Self::Conservatism,
        Self::ProjectionMidpoint,
        Self::ProjectionBase,
        Self::DeathPenalty,
    ];

    /// Methods that run through [`repair`].
    pub const REPAIRING: [BchmKind; 11] = [
        Self::Reinitialization,
        Self::Projection,
        Self::Reflection,
        Self::Wrapping,
        Self::Transformation,
        Self::RandBase,
        Self::MidpointBase,
        Self::MidpointTarget,
        Self::Conservatism,
        Self::ProjectionMidpoint,
        Self::ProjectionBase,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Resampling => "resampling",
            Self::Reinitialization => "reinitialization",
            Self::Projection => "projection",
            Self::Reflection => "reflection",
            Self::Wrapping => "wrapping",
            Self::Transformation => "transformation",
            Self::RandBase => "rand-base",
            Self::MidpointBase => "midpoint-base",
            Self::MidpointTarget => "midpoint-target",
            Self::Conservatism => "conservatism",
            Self::ProjectionMidpoint => "projection-midpoint",
            Self::ProjectionBase => "projection-base",
            Self::DeathPenalty => "death-penalty",
        }
    }

    /// Methods that act on one component at a time.
    pub fn is_componentwise(self) -> bool {
        matches!(
            self,
            Self::Reinitialization
                | Self::Projection
                | Self::Reflection
                | Self::Wrapping
                | Self::Transformation
                | Self::RandBase
                | Self::MidpointBase
                | Self::MidpointTarget
        )
    }
}

impl fmt::Display for BchmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BchmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.tag() == s)
            .ok_or_else(|| Error::UnknownTag {
                kind: "bchm",
                tag: s.into(),
            })
    }
}

impl TryFrom<&str> for BchmKind {
    type Error = Error;

    fn try_from(s: &str) -> Result<Self> {
        s.parse()
    }
}

impl From<BchmKind> for &'static str {
    fn from(b: BchmKind) -> Self {
        b.tag()
    }
}

/// Everything a repair method may consult.
#[derive(Debug, Clone, Copy)]
pub struct RepairContext<'a> {
    pub donor: &'a [f64],
    pub base: &'a [f64],
    pub target: &'a [f64],
    pub space: &'a SearchSpace,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Candidate {
    Vector(Vec<f64>),
    /// Death penalty marker: fitness is [`crate::population::PENALTY`], no evaluation.
    Penalty,
}

impl Candidate {
    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Candidate::Vector(v) => Some(v),
            Candidate::Penalty => None,
        }
    }

    pub fn into_vector(self) -> Option<Vec<f64>> {
        match self {
            Candidate::Vector(v) => Some(v),
            Candidate::Penalty => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepairReport {
    /// The vector was modified or penalized.
    pub repaired: bool,
    pub result: Candidate,
}

impl RepairReport {
    fn from_result(donor: &[f64], result: Vec<f64>) -> Self {
        let repaired = donor
            .iter()
            .zip(&result)
            .any(|(a, b)| a.to_bits() != b.to_bits());
        Self {
            repaired,
            result: Candidate::Vector(result),
        }
    }
}

pub fn repair(kind: BchmKind, ctx: &RepairContext<'_>, rng: &mut RngStream) -> Result<RepairReport> {
    let space = ctx.space;
    let n = space.dim();
    if ctx.donor.len() != n || ctx.base.len() != n || ctx.target.len() != n {
        return Err(crate::error::internal("repair context vectors must match the space dimension"));
    }
    let lower = space.lower();
    let upper = space.upper();
    let donor = ctx.donor;

    let componentwise = |f: &mut dyn FnMut(usize, f64, f64, f64) -> f64| -> Vec<f64> {
        donor
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                if space.contains_component(j, v) {
                    v
                } else {
                    f(j, v, lower[j], upper[j])
                }
            })
            .collect()
    };

    let result = match kind {
        BchmKind::Resampling | BchmKind::DeathPenalty => {
            return Err(config(alloc::format!(
                "{kind} is not a donor repair; use resample_guard or death_penalty_check"
            )))
        }
        BchmKind::Reinitialization => componentwise(&mut |_, _, lo, hi| rng.uniform_in(lo, hi)),
        BchmKind::Projection => componentwise(&mut |_, v, lo, hi| project_component(v, lo, hi)),
        BchmKind::Reflection => componentwise(&mut |_, v, lo, hi| reflect_component(v, lo, hi)),
        BchmKind::Wrapping => componentwise(&mut |_, v, lo, hi| wrap_component(v, lo, hi)),
        BchmKind::Transformation => donor
            .iter()
            .enumerate()
            .map(|(j, &v)| transform_component(v, lower[j], upper[j]))
            .collect(),
        BchmKind::RandBase => componentwise(&mut |j, v, lo, hi| {
            let b = ctx.base[j];
            if v < lo {
                rng.uniform_in(lo, b)
            } else {
                rng.uniform_in(b, hi)
            }
        }),
        BchmKind::MidpointBase => componentwise(&mut |j, v, lo, hi| {
            let b = ctx.base[j];
            if v < lo {
                (lo + b) / 2.0
            } else {
                (b + hi) / 2.0
            }
        }),
        BchmKind::MidpointTarget => componentwise(&mut |j, v, lo, hi| {
            let t = ctx.target[j];
            if v < lo {
                (lo + t) / 2.0
            } else {
                (t + hi) / 2.0
            }
        }),
        BchmKind::Conservatism => {
            if space.contains(donor) {
                donor.to_vec()
            } else {
                ctx.base.to_vec()
            }
        }
        BchmKind::ProjectionMidpoint => project_toward(donor, &space.center(), space),
        BchmKind::ProjectionBase => project_toward(donor, ctx.base, space),
    };
    Ok(RepairReport::from_result(donor, result))
}

pub fn project_component(v: f64, lo: f64, hi: f64) -> f64 {
    v.clamp(lo, hi)
}

/// Repeated mirroring at the violated bound, computed in closed form by
/// reducing the excess modulo `2W` first.
pub fn reflect_component(v: f64, lo: f64, hi: f64) -> f64 {
    let w = hi - lo;
    if lo <= v && v <= hi {
        return v;
    }
    if w == 0.0 {
        return lo;
    }
    let period = 2.0 * w;
    let x = if v < lo {
        let x = lo + (lo - v) % period;
        if x > hi {
            2.0 * hi - x
        } else {
            x
        }
    } else {
        let x = hi - (v - hi) % period;
        if x < lo {
            2.0 * lo - x
        } else {
            x
        }
    };
    x.clamp(lo, hi)
}

/// Toroidal re-entry on the opposite side.
pub fn wrap_component(v: f64, lo: f64, hi: f64) -> f64 {
    let w = libm::fabs(hi - lo);
    if lo <= v && v <= hi {
        return v;
    }
    if w == 0.0 {
        return lo;
    }
    let x = if v < lo {
        hi - (lo - v) % w
    } else {
        lo + (v - hi) % w
    };
    x.clamp(lo, hi)
}

/// Offsets `(a_l, a_u)` of the boundary transformation for `[lo, hi]`.
pub fn transformation_offsets(lo: f64, hi: f64) -> (f64, f64) {
    let half = (hi - lo) / 2.0;
    (
        f64::min(half, 1.0 + libm::fabs(lo) / 20.0),
        f64::min(half, 1.0 + libm::fabs(hi) / 20.0),
    )
}

/// Boundary transformation: identity on `[lo + a_l, hi - a_u]`, quadratic
/// near the bounds, periodic (period `2(W + a_l + a_u)`) and mirrored outside
/// the preimage `[lo - a_l, hi + a_u]`.
pub fn transform_component(v: f64, lo: f64, hi: f64) -> f64 {
    let w = hi - lo;
    if w == 0.0 {
        return lo;
    }
    let (al, au) = transformation_offsets(lo, hi);
    if lo + al <= v && v <= hi - au {
        return v;
    }
    let low_edge = lo - al;
    let high_edge = hi + au;
    let mut x = v;
    let start = lo - 2.0 * al - w / 2.0;
    if x < start || x > hi + 2.0 * au + w / 2.0 {
        let period = 2.0 * (w + al + au);
        x -= period * libm::floor((x - start) / period);
    }
    if x > high_edge {
        x -= 2.0 * (x - high_edge);
    }
    if x < low_edge {
        x += 2.0 * (low_edge - x);
    }
    let y = if x < lo + al {
        lo + (x - low_edge) * (x - low_edge) / (4.0 * al)
    } else if x > hi - au {
        hi - (x - high_edge) * (x - high_edge) / (4.0 * au)
    } else {
        x
    };
    y.clamp(lo, hi)
}

/// Largest `alpha` in `[0, 1]` with `anchor + alpha (donor - anchor)` inside
/// the box, and the index of the binding component (if any).
pub fn max_feasible_alpha(donor: &[f64], anchor: &[f64], space: &SearchSpace) -> (f64, Option<usize>) {
    let mut alpha = 1.0;
    let mut binding = None;
    for (j, (&v, &a)) in donor.iter().zip(anchor).enumerate() {
        let bound = if v > space.upper()[j] {
            space.upper()[j]
        } else if v < space.lower()[j] {
            space.lower()[j]
        } else {
            continue;
        };
        let step = v - a;
        if step == 0.0 {
            continue;
        }
        let candidate = ((bound - a) / step).clamp(0.0, 1.0);
        if candidate < alpha || binding.is_none() {
            alpha = candidate.min(alpha);
            binding = Some(j);
        }
    }
    (alpha, binding)
}

fn project_toward(donor: &[f64], anchor: &[f64], space: &SearchSpace) -> Vec<f64> {
    if space.contains(donor) {
        return donor.to_vec();
    }
    let (alpha, binding) = max_feasible_alpha(donor, anchor, space);
    let mut out: Vec<f64> = donor
        .iter()
        .zip(anchor)
        .enumerate()
        .map(|(j, (&v, &a))| ((1.0 - alpha) * a + alpha * v).clamp(space.lower()[j], space.upper()[j]))
        .collect();
    if let Some(j) = binding {
        out[j] = if donor[j] > space.upper()[j] {
            space.upper()[j]
        } else {
            space.lower()[j]
        };
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResampleReport {
    pub outcome: MutationOutcome,
    /// Number of mutation calls, in `1..=MAX_RESAMPLES + 1`.
    pub attempts: u32,
    pub repaired: bool,
}

/// Re-runs `mutate` until the donor is feasible; after [`MAX_RESAMPLES`]
/// failed re-draws the last donor is projected onto the box.
pub fn resample_guard(
    strategy: MutationStrategy,
    pop: &Population,
    target: usize,
    f: f64,
    space: &SearchSpace,
    rng: &mut RngStream,
) -> Result<ResampleReport> {
    let mut attempts = 0;
    loop {
        attempts += 1;
        let mut outcome = mutate(strategy, pop, target, f, rng)?;
        if space.contains(&outcome.donor) {
            return Ok(ResampleReport {
                outcome,
                attempts,
                repaired: attempts > 1,
            });
        }
        if attempts > MAX_RESAMPLES {
            for (j, v) in outcome.donor.iter_mut().enumerate() {
                *v = project_component(*v, space.lower()[j], space.upper()[j]);
            }
            return Ok(ResampleReport {
                outcome,
                attempts,
                repaired: true,
            });
        }
    }
}

/// Infeasible trials are penalized without evaluation; feasible ones pass.
pub fn death_penalty_check(trial: &[f64], space: &SearchSpace) -> RepairReport {
    if space.contains(trial) {
        RepairReport {
            repaired: false,
            result: Candidate::Vector(trial.to_vec()),
        }
    } else {
        RepairReport {
            repaired: true,
            result: Candidate::Penalty,
        }
    }
}
