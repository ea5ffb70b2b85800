//! Donor generation for the 14 mutation strategies.
//!
//! Every strategy also reports its base vector, the vector the scaled
//! differences are added to. Base-referencing repair methods need it.
//!
//! Random draw order (fixed, so runs replay bit-exactly):
//!
//! * uniform index picks use rejection sampling: draw `index(M)` until the
//!   value differs from the target and from every earlier pick;
//! * `target-to-pbest/1` and `ranking-pbest/1` draw the pbest slot first,
//!   then `r1`, then `r2`;
//! * `nsde` draws its indices, then the branch uniform, then the scale factor;
//! * `trigonometric` draws the `Γ` uniform first, then its three indices;
//! * roulette picks draw one uniform per pick, scaled by the remaining weight.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{config, Error, Result};
use crate::population::Population;
use crate::rng::RngStream;

/// Probability of applying the trigonometric rule; otherwise rand/1 is used.
pub const TRIGONOMETRIC_PROBABILITY: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "&str", into = "&'static str"))]
pub enum MutationStrategy {
    Rand1,
    Best1,
    TargetToBest1,
    Best2,
    Rand2,
    TargetToBest2,
    TargetToPbest1,
    Rand2Dir,
    Nsde,
    Trigonometric,
    TwoOpt1,
    TwoOpt2,
    ProximityRand1,
    RankingPbest1,
}

impl MutationStrategy {
    pub const ALL: [MutationStrategy; 14] = [
        Self::Rand1,
        Self::Best1,
        Self::TargetToBest1,
        Self::Best2,
        Self::Rand2,
        Self::TargetToBest2,
        Self::TargetToPbest1,
        Self::Rand2Dir,
        Self::Nsde,
        Self::Trigonometric,
        Self::TwoOpt1,
        Self::TwoOpt2,
        Self::ProximityRand1,
        Self::RankingPbest1,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Rand1 => "rand/1",
            Self::Best1 => "best/1",
            Self::TargetToBest1 => "target-to-best/1",
            Self::Best2 => "best/2",
            Self::Rand2 => "rand/2",
            Self::TargetToBest2 => "target-to-best/2",
            Self::TargetToPbest1 => "target-to-pbest/1",
            Self::Rand2Dir => "rand/2/dir",
            Self::Nsde => "nsde",
            Self::Trigonometric => "trigonometric",
            Self::TwoOpt1 => "2-opt/1",
            Self::TwoOpt2 => "2-opt/2",
            Self::ProximityRand1 => "proximity-rand/1",
            Self::RankingPbest1 => "ranking-pbest/1",
        }
    }

    /// Number of distinct non-target indices `r_k` the strategy draws.
    pub fn index_count(self) -> usize {
        match self {
            Self::Best1 | Self::TargetToBest1 | Self::TargetToPbest1 | Self::RankingPbest1 => 2,
            Self::Rand1 | Self::Nsde | Self::Trigonometric | Self::TwoOpt1 | Self::ProximityRand1 => 3,
            Self::Best2 | Self::TargetToBest2 | Self::Rand2Dir => 4,
            Self::Rand2 | Self::TwoOpt2 => 5,
        }
    }

    pub fn min_population(self) -> usize {
        self.index_count() + 1
    }

    /// `donor - base` is `F` times a vector that does not depend on `F`.
    pub fn is_linear_in_f(self) -> bool {
        !matches!(self, Self::Nsde | Self::Trigonometric)
    }
}

impl fmt::Display for MutationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MutationStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::UnknownTag {
                kind: "mutation",
                tag: s.into(),
            })
    }
}

impl TryFrom<&str> for MutationStrategy {
    type Error = Error;

    fn try_from(s: &str) -> Result<Self> {
        s.parse()
    }
}

impl From<MutationStrategy> for &'static str {
    fn from(m: MutationStrategy) -> Self {
        m.tag()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MutationOutcome {
    pub donor: Vec<f64>,
    pub base: Vec<f64>,
    /// The `r_k` indices in formula order (after any reordering).
    pub indices_used: Vec<usize>,
}

/// Greediness of target-to-pbest: `p = max(0.05, 3/M)`.
pub fn pbest_fraction(pop_size: usize) -> f64 {
    f64::max(0.05, 3.0 / pop_size as f64)
}

/// Size of the pbest pool, `ceil(p * M)`, at least one.
pub fn pbest_pool_size(pop_size: usize) -> usize {
    let k = libm::ceil(pbest_fraction(pop_size) * pop_size as f64) as usize;
    k.clamp(1, pop_size)
}

pub fn mutate(
    strategy: MutationStrategy,
    pop: &Population,
    target: usize,
    f: f64,
    rng: &mut RngStream,
) -> Result<MutationOutcome> {
    let m = pop.len();
    if m < strategy.min_population() {
        return Err(config(alloc::format!(
            "{strategy} needs a population of at least {}, got {m}",
            strategy.min_population()
        )));
    }
    if target >= m {
        return Err(config(alloc::format!("target index {target} out of range")));
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(config(alloc::format!("scale factor F must be positive, got {f}")));
    }
    let x = |i: usize| pop.x(i);

    let outcome = match strategy {
        MutationStrategy::Rand1 => {
            let r = distinct(rng, m, target, 3);
            rand1(pop, &r, f)
        }
        MutationStrategy::Best1 => {
            let best = pop.best_index()?;
            let r = distinct(rng, m, target, 2);
            let mut donor = x(best).to_vec();
            add_diff(&mut donor, f, x(r[0]), x(r[1]));
            outcome(donor, x(best), r)
        }
        MutationStrategy::TargetToBest1 => {
            let best = pop.best_index()?;
            let r = distinct(rng, m, target, 2);
            let mut donor = x(target).to_vec();
            add_diff(&mut donor, f, x(best), x(target));
            add_diff(&mut donor, f, x(r[0]), x(r[1]));
            outcome(donor, x(target), r)
        }
        MutationStrategy::Best2 => {
            let best = pop.best_index()?;
            let r = distinct(rng, m, target, 4);
            let mut donor = x(best).to_vec();
            add_diff(&mut donor, f, x(r[0]), x(r[1]));
            add_diff(&mut donor, f, x(r[2]), x(r[3]));
            outcome(donor, x(best), r)
        }
        MutationStrategy::Rand2 => {
            let r = distinct(rng, m, target, 5);
            let mut donor = x(r[0]).to_vec();
            add_diff(&mut donor, f, x(r[1]), x(r[2]));
            add_diff(&mut donor, f, x(r[3]), x(r[4]));
            outcome(donor, x(r[0]), r)
        }
        MutationStrategy::TargetToBest2 => {
            let best = pop.best_index()?;
            let r = distinct(rng, m, target, 4);
            let mut donor = x(target).to_vec();
            add_diff(&mut donor, f, x(best), x(target));
            add_diff(&mut donor, f, x(r[0]), x(r[1]));
            add_diff(&mut donor, f, x(r[2]), x(r[3]));
            outcome(donor, x(target), r)
        }
        MutationStrategy::TargetToPbest1 => {
            let pbest = draw_pbest(pop, rng)?;
            let r = distinct(rng, m, target, 2);
            target_to_pbest(pop, target, pbest, &r, f)
        }
        MutationStrategy::Rand2Dir => {
            let mut r = distinct(rng, m, target, 4);
            if pop.f(r[0])? > pop.f(r[1])? {
                r.swap(0, 1);
            }
            if pop.f(r[2])? > pop.f(r[3])? {
                r.swap(2, 3);
            }
            let half = f / 2.0;
            let donor = (0..x(r[0]).len())
                .map(|j| {
                    x(r[0])[j] + half * (x(r[0])[j] - x(r[1])[j] + x(r[2])[j] - x(r[3])[j])
                })
                .collect();
            outcome(donor, x(r[0]), r)
        }
        MutationStrategy::Nsde => {
            let r = distinct(rng, m, target, 3);
            let scale = if rng.uniform() < 0.5 {
                rng.normal(0.5, 0.5)
            } else {
                rng.cauchy(0.0, 1.0)
            };
            let mut donor = x(r[0]).to_vec();
            add_diff(&mut donor, scale, x(r[1]), x(r[2]));
            outcome(donor, x(r[0]), r)
        }
        MutationStrategy::Trigonometric => {
            let apply = rng.uniform() < TRIGONOMETRIC_PROBABILITY;
            let r = distinct(rng, m, target, 3);
            let a1 = libm::fabs(pop.f(r[0])?);
            let a2 = libm::fabs(pop.f(r[1])?);
            let a3 = libm::fabs(pop.f(r[2])?);
            let total = a1 + a2 + a3;
            if apply && total > 0.0 && total.is_finite() {
                let (p1, p2, p3) = (a1 / total, a2 / total, a3 / total);
                let (x1, x2, x3) = (x(r[0]), x(r[1]), x(r[2]));
                let centroid: Vec<f64> = (0..x1.len())
                    .map(|j| (x1[j] + x2[j] + x3[j]) / 3.0)
                    .collect();
                let donor = (0..x1.len())
                    .map(|j| {
                        centroid[j]
                            + (p2 - p1) * (x1[j] - x2[j])
                            + (p3 - p2) * (x2[j] - x3[j])
                            + (p1 - p3) * (x3[j] - x1[j])
                    })
                    .collect();
                MutationOutcome {
                    donor,
                    base: centroid,
                    indices_used: r,
                }
            } else {
                rand1(pop, &r, f)
            }
        }
        MutationStrategy::TwoOpt1 | MutationStrategy::TwoOpt2 => {
            let r = distinct(rng, m, target, strategy.index_count());
            let (base, other) = if pop.f(r[0])? < pop.f(r[1])? {
                (r[0], r[1])
            } else {
                (r[1], r[0])
            };
            let mut donor = x(base).to_vec();
            add_diff(&mut donor, f, x(other), x(r[2]));
            if strategy == MutationStrategy::TwoOpt2 {
                add_diff(&mut donor, f, x(r[3]), x(r[4]));
            }
            outcome(donor, x(base), r)
        }
        MutationStrategy::ProximityRand1 => {
            let weights: Vec<f64> = (0..m)
                .map(|i| if i == target { 0.0 } else { euclidean(x(target), x(i)) })
                .collect();
            let r = roulette_without_replacement(rng, &weights, target, 3);
            rand1(pop, &r, f)
        }
        MutationStrategy::RankingPbest1 => {
            let pbest = draw_pbest(pop, rng)?;
            let ranked = pop.ranked_indices()?;
            let mut weights = alloc::vec![0.0; m];
            for (pos, &i) in ranked.iter().enumerate() {
                weights[i] = (m - pos) as f64;
            }
            weights[target] = 0.0;
            let mut r = roulette_without_replacement(rng, &weights, target, 1);
            let r2 = pick_distinct(rng, m, target, &r);
            r.push(r2);
            target_to_pbest(pop, target, pbest, &r, f)
        }
    };
    Ok(outcome)
}

fn outcome(donor: Vec<f64>, base: &[f64], indices_used: Vec<usize>) -> MutationOutcome {
    MutationOutcome {
        donor,
        base: base.to_vec(),
        indices_used,
    }
}

fn rand1(pop: &Population, r: &[usize], f: f64) -> MutationOutcome {
    let mut donor = pop.x(r[0]).to_vec();
    add_diff(&mut donor, f, pop.x(r[1]), pop.x(r[2]));
    outcome(donor, pop.x(r[0]), r.to_vec())
}

fn target_to_pbest(pop: &Population, target: usize, pbest: usize, r: &[usize], f: f64) -> MutationOutcome {
    let mut donor = pop.x(target).to_vec();
    add_diff(&mut donor, f, pop.x(pbest), pop.x(target));
    add_diff(&mut donor, f, pop.x(r[0]), pop.x(r[1]));
    outcome(donor, pop.x(target), r.to_vec())
}

fn draw_pbest(pop: &Population, rng: &mut RngStream) -> Result<usize> {
    let ranked = pop.ranked_indices()?;
    let slot = rng.index(pbest_pool_size(pop.len()));
    Ok(ranked[slot])
}

/// `v += scale * (a - b)`.
fn add_diff(v: &mut [f64], scale: f64, a: &[f64], b: &[f64]) {
    for ((vj, aj), bj) in v.iter_mut().zip(a).zip(b) {
        *vj += scale * (aj - bj);
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn pick_distinct(rng: &mut RngStream, m: usize, target: usize, taken: &[usize]) -> usize {
    loop {
        let r = rng.index(m);
        if r != target && !taken.contains(&r) {
            return r;
        }
    }
}

/// `k` distinct uniform indices in `0..m`, none equal to `target`.
pub(crate) fn distinct(rng: &mut RngStream, m: usize, target: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let r = pick_distinct(rng, m, target, &out);
        out.push(r);
    }
    out
}

/// Roulette picks without replacement, re-normalizing over what is left.
/// `weights[target]` is ignored. If every remaining weight is zero the pick
/// falls back to a uniform draw over the remaining indices.
pub fn roulette_without_replacement(
    rng: &mut RngStream,
    weights: &[f64],
    target: usize,
    k: usize,
) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(k);
    for _ in 0..k {
        let available = |i: usize| i != target && !out.contains(&i);
        let total: f64 = (0..weights.len()).filter(|&i| available(i)).map(|i| weights[i]).sum();
        let pick = if total > 0.0 {
            let u = rng.uniform() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            let mut last_positive = None;
            for i in (0..weights.len()).filter(|&i| available(i)) {
                if weights[i] <= 0.0 {
                    continue;
                }
                last_positive = Some(i);
                acc += weights[i];
                if u < acc {
                    chosen = Some(i);
                    break;
                }
            }
            chosen.or(last_positive).expect("positive total implies a positive weight")
        } else {
            let remaining: Vec<usize> = (0..weights.len()).filter(|&i| available(i)).collect();
            remaining[rng.index(remaining.len())]
        };
        out.push(pick);
    }
    out
}
