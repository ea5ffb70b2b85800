//! Modular differential evolution with pluggable boundary constraint handling.
//!
//! The crate is `no_std` (it needs `alloc`). It provides the operator
//! catalog (14 mutation strategies, 2 crossovers, 13 boundary handling
//! methods), SHADE parameter adaptation, a small surrogate benchmark suite and
//! a deterministic single-run engine that records fixed-target trajectories
//! and the share of repaired solutions. Parallel sweeps, statistics and file
//! formats live in the `modde` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adaptation;
pub mod bchm;
pub mod crossover;
pub mod error;
pub mod mutation;
pub mod population;
pub mod problems;
pub mod rng;
pub mod runner;
pub mod space;

pub use adaptation::{Adaptation, ParamMemory, ParameterControl, SuccessRecord};
pub use bchm::{
    death_penalty_check, repair, resample_guard, BchmKind, Candidate, RepairContext, RepairReport, ResampleReport,
};
pub use crossover::{binomial_crossover, exponential_crossover, CrossoverKind};
pub use error::{Error, Result};
pub use mutation::{mutate, MutationOutcome, MutationStrategy};
pub use population::{initialize_population, select, Budget, Individual, Population, PENALTY};
pub use problems::{make_instance, make_instance_in, ProblemInstance, ProblemKind};
pub use rng::{derive_seed, RngStream};
pub use runner::{pors, run_single, run_single_observed, DeConfig, RunLog};
pub use space::SearchSpace;
