//! One DE run: initialization, generation loop with batch selection, SHADE
//! updates, fixed-target trajectory and repair counters.

use alloc::string::String;
use alloc::vec::Vec;

use crate::adaptation::{Adaptation, ParameterControl, SuccessRecord};
use crate::bchm::{death_penalty_check, repair, resample_guard, BchmKind, Candidate, RepairContext};
use crate::crossover::CrossoverKind;
use crate::error::{config, Result};
use crate::mutation::{mutate, MutationStrategy};
use crate::population::{initialize_population, Budget, Individual, PENALTY};
use crate::problems::ProblemInstance;
use crate::rng::{derive_seed, RngStream};

pub const DEFAULT_POPULATION: usize = 100;
pub const DEFAULT_BUDGET_MULTIPLIER: u64 = 10_000;

/// A run also stops after this many consecutive generations without a
/// single objective evaluation (all trials death-penalized).
pub const STALL_GENERATIONS: u64 = 1_000;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeConfig {
    pub mutation: MutationStrategy,
    pub crossover: CrossoverKind,
    pub bchm: BchmKind,
    pub adaptation: Adaptation,
    pub population_size: usize,
    /// Budget is `n * budget_multiplier` evaluations.
    pub budget_multiplier: u64,
    /// Optional cap on the number of generations after initialization.
    pub max_generations: Option<u64>,
    pub runs: u64,
    pub master_seed: u64,
}

impl DeConfig {
    pub fn new(mutation: MutationStrategy, crossover: CrossoverKind, bchm: BchmKind) -> Self {
        Self {
            mutation,
            crossover,
            bchm,
            adaptation: Adaptation::default(),
            population_size: DEFAULT_POPULATION,
            budget_multiplier: DEFAULT_BUDGET_MULTIPLIER,
            max_generations: None,
            runs: 1,
            master_seed: 0,
        }
    }

    /// Path-safe identity: `<mutation>__<crossover>__<bchm>` with `/` as `_`.
    pub fn config_id(&self) -> String {
        config_id(self.mutation, self.crossover, self.bchm)
    }

    pub fn validate(&self) -> Result<()> {
        let min = self.mutation.min_population().max(crate::population::MIN_POPULATION);
        if self.population_size < min {
            return Err(config(alloc::format!(
                "population size {} is too small for {} (needs {min})",
                self.population_size,
                self.mutation
            )));
        }
        if self.budget_multiplier < 1 {
            return Err(config("budget multiplier must be at least 1"));
        }
        if self.runs < 1 {
            return Err(config("runs must be at least 1"));
        }
        self.adaptation.validate()
    }

    pub fn budget_for(&self, n: usize) -> u64 {
        n as u64 * self.budget_multiplier
    }
}

pub fn config_id(mutation: MutationStrategy, crossover: CrossoverKind, bchm: BchmKind) -> String {
    alloc::format!("{}__{}__{}", mutation.tag().replace('/', "_"), crossover.tag(), bchm.tag())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunLog {
    pub config_id: String,
    pub mutation: MutationStrategy,
    pub crossover: CrossoverKind,
    pub bchm: BchmKind,
    pub function: String,
    pub n: usize,
    pub run_index: u64,
    pub seed: u64,
    pub instance_seed: u64,
    /// `(evaluations_used, best_f_so_far)`, one entry per improvement plus the final point.
    pub trajectory: Vec<(u64, f64)>,
    pub final_best: f64,
    pub f_opt: Option<f64>,
    pub evals_used: u64,
    pub generations: u64,
    pub pors_numerator: u64,
    pub pors_denominator: u64,
    /// Filled by hosts that can measure time; never part of exported files.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub wall_time_secs: Option<f64>,
}

impl RunLog {
    /// Share of generated candidates that were repaired or penalized.
    pub fn pors(&self) -> Option<f64> {
        pors(self.pors_numerator, self.pors_denominator)
    }
}

pub fn pors(numerator: u64, denominator: u64) -> Option<f64> {
    if denominator == 0 {
        None
    } else {
        Some(numerator as f64 / denominator as f64)
    }
}

/// Per-evaluation hook: `(point, value)`, called after every objective call.
pub trait EvaluationObserver {
    fn observe(&mut self, x: &[f64], value: f64);
}

impl<F: FnMut(&[f64], f64)> EvaluationObserver for F {
    fn observe(&mut self, x: &[f64], value: f64) {
        self(x, value)
    }
}

struct NoObserver;

impl EvaluationObserver for NoObserver {
    fn observe(&mut self, _: &[f64], _: f64) {}
}

/// Seed for run `run_index` of `cfg` on `function`.
pub fn run_seed(cfg: &DeConfig, function: &str, run_index: u64) -> u64 {
    derive_seed(cfg.master_seed, &cfg.config_id(), function, run_index)
}

pub fn run_single(cfg: &DeConfig, inst: &ProblemInstance, run_index: u64) -> Result<RunLog> {
    run_single_observed(cfg, inst, run_index, &mut NoObserver)
}

struct Tracker {
    best: f64,
    trajectory: Vec<(u64, f64)>,
}

impl Tracker {
    fn record(&mut self, evals: u64, value: f64) {
        if value < self.best {
            self.best = value;
            self.trajectory.push((evals, value));
        }
    }
}

pub fn run_single_observed(
    cfg: &DeConfig,
    inst: &ProblemInstance,
    run_index: u64,
    observer: &mut dyn EvaluationObserver,
) -> Result<RunLog> {
    cfg.validate()?;
    let space = &inst.space;
    let n = space.dim();
    let m = cfg.population_size;
    let max_evals = cfg.budget_for(n);
    if max_evals < m as u64 {
        return Err(config(alloc::format!(
            "budget of {max_evals} evaluations cannot cover the initial population of {m}"
        )));
    }
    let function = inst.kind.tag();
    let seed = run_seed(cfg, function, run_index);
    let mut rng = RngStream::new(seed);
    let mut budget = Budget::new(max_evals);
    let mut params = ParameterControl::new(cfg.adaptation)?;
    let mut tracker = Tracker {
        best: f64::INFINITY,
        trajectory: Vec::new(),
    };

    let mut pop = initialize_population(space, m, &mut rng)?;
    for member in pop.members.iter_mut() {
        let value = inst.evaluate(&member.x, &mut budget, &mut rng)?;
        observer.observe(&member.x, value);
        member.fitness = Some(value);
        tracker.record(budget.used(), value);
    }

    let mut repaired = 0u64;
    let mut generated = 0u64;
    let mut stalled = 0u64;
    let mut trials: Vec<Option<(Individual, f64, f64)>> = Vec::with_capacity(m);

    while !budget.is_exhausted()
        && cfg.max_generations.is_none_or(|g| pop.generation < g)
        && stalled < STALL_GENERATIONS
    {
        trials.clear();
        let used_before = budget.used();
        for i in 0..m {
            if budget.is_exhausted() {
                break;
            }
            let (f, cr) = params.sample(&mut rng);
            let target = pop.x(i);

            let donor = if cfg.bchm == BchmKind::Resampling {
                let report = resample_guard(cfg.mutation, &pop, i, f, space, &mut rng)?;
                generated += 1;
                repaired += u64::from(report.repaired);
                report.outcome.donor
            } else {
                let outcome = mutate(cfg.mutation, &pop, i, f, &mut rng)?;
                if cfg.bchm == BchmKind::DeathPenalty {
                    outcome.donor
                } else {
                    let ctx = RepairContext {
                        donor: &outcome.donor,
                        base: &outcome.base,
                        target,
                        space,
                    };
                    let report = repair(cfg.bchm, &ctx, &mut rng)?;
                    generated += 1;
                    repaired += u64::from(report.repaired);
                    report.result.into_vector().expect("repair yields a vector")
                }
            };

            let trial_x = cfg.crossover.apply(target, &donor, cr, &mut rng)?;

            let trial = if cfg.bchm == BchmKind::DeathPenalty {
                let report = death_penalty_check(&trial_x, space);
                generated += 1;
                repaired += u64::from(report.repaired);
                match report.result {
                    Candidate::Penalty => Individual::evaluated(trial_x, PENALTY),
                    Candidate::Vector(x) => evaluate(inst, x, &mut budget, &mut rng, observer, &mut tracker)?,
                }
            } else {
                evaluate(inst, trial_x, &mut budget, &mut rng, observer, &mut tracker)?
            };
            trials.push(Some((trial, f, cr)));
        }

        let complete = trials.len() == m;
        let mut successes = Vec::new();
        for (i, slot) in trials.iter_mut().enumerate() {
            let (trial, f, cr) = slot.take().expect("filled above");
            let parent_f = pop.f(i)?;
            let trial_f = trial.fitness()?;
            if trial_f < parent_f {
                successes.push(SuccessRecord {
                    f_used: f,
                    cr_used: cr,
                    improvement: parent_f - trial_f,
                });
                pop.members[i] = trial;
            }
        }
        pop.generation += 1;
        if complete {
            params.update(&successes);
        }
        if budget.used() == used_before {
            stalled += 1;
        } else {
            stalled = 0;
        }
    }

    let used = budget.used();
    if tracker.trajectory.last().is_some_and(|&(e, _)| e != used) {
        tracker.trajectory.push((used, tracker.best));
    }
    Ok(RunLog {
        config_id: cfg.config_id(),
        mutation: cfg.mutation,
        crossover: cfg.crossover,
        bchm: cfg.bchm,
        function: function.into(),
        n,
        run_index,
        seed,
        instance_seed: inst.instance_seed,
        trajectory: tracker.trajectory,
        final_best: tracker.best,
        f_opt: inst.kind.is_deterministic().then_some(inst.f_opt),
        evals_used: used,
        generations: pop.generation,
        pors_numerator: repaired,
        pors_denominator: generated,
        wall_time_secs: None,
    })
}

fn evaluate(
    inst: &ProblemInstance,
    x: Vec<f64>,
    budget: &mut Budget,
    rng: &mut RngStream,
    observer: &mut dyn EvaluationObserver,
    tracker: &mut Tracker,
) -> Result<Individual> {
    let value = inst.evaluate(&x, budget, rng)?;
    observer.observe(&x, value);
    tracker.record(budget.used(), value);
    Ok(Individual::evaluated(x, value))
}
