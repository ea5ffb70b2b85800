//! Cartesian sweeps over operator grids, run on a worker pool.

use std::time::Instant;

use modde_core::problems::{make_instance, ProblemInstance};
use modde_core::rng::derive_seed;
use modde_core::runner::{run_single, DeConfig, RunLog};
use modde_core::{BchmKind, CrossoverKind, MutationStrategy, ProblemKind};
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub mutations: Vec<MutationStrategy>,
    pub crossovers: Vec<CrossoverKind>,
    pub bchms: Vec<BchmKind>,
}

impl Grid {
    pub fn full() -> Self {
        Self {
            mutations: MutationStrategy::ALL.to_vec(),
            crossovers: CrossoverKind::ALL.to_vec(),
            bchms: BchmKind::ALL.to_vec(),
        }
    }

    pub fn single(m: MutationStrategy, c: CrossoverKind, b: BchmKind) -> Self {
        Self {
            mutations: vec![m],
            crossovers: vec![c],
            bchms: vec![b],
        }
    }

    pub fn len(&self) -> usize {
        self.mutations.len() * self.crossovers.len() * self.bchms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Configurations in mutation-major, then crossover, then BCHM order.
    pub fn configs(&self, common: &DeConfig) -> Vec<DeConfig> {
        let mut out = Vec::with_capacity(self.len());
        for &mutation in &self.mutations {
            for &crossover in &self.crossovers {
                for &bchm in &self.bchms {
                    out.push(DeConfig {
                        mutation,
                        crossover,
                        bchm,
                        ..common.clone()
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub grid: Grid,
    pub functions: Vec<ProblemKind>,
    pub n: usize,
    /// Instances per function; run `k` uses instance `k % instances`.
    pub instances: u64,
    /// Shared settings; its operator fields are overwritten per cell.
    pub common: DeConfig,
}

/// Seed of instance `index` of `function` in dimension `n`.
pub fn instance_seed(master_seed: u64, function: ProblemKind, n: usize, index: u64) -> u64 {
    derive_seed(master_seed, &format!("instance/n{n}"), function.tag(), index)
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Usage("operator grid is empty".into()));
        }
        if self.functions.is_empty() {
            return Err(Error::Usage("no functions selected".into()));
        }
        if self.instances == 0 {
            return Err(Error::Usage("instances must be at least 1".into()));
        }
        for cfg in self.grid.configs(&self.common) {
            cfg.validate().map_err(|e| match e {
                modde_core::Error::Config(msg) => {
                    modde_core::Error::Config(format!("cell {}: {msg}", cfg.config_id()))
                }
                other => other,
            })?;
            if cfg.budget_for(self.n) < cfg.population_size as u64 {
                return Err(modde_core::Error::Config(format!(
                    "cell {}: budget {} below population size {}",
                    cfg.config_id(),
                    cfg.budget_for(self.n),
                    cfg.population_size
                ))
                .into());
            }
        }
        Ok(())
    }

    pub fn instance(&self, function: ProblemKind, index: u64) -> Result<ProblemInstance> {
        let seed = instance_seed(self.common.master_seed, function, self.n, index);
        Ok(make_instance(function, self.n, seed)?)
    }

    pub fn job_count(&self) -> usize {
        self.grid.len() * self.functions.len() * self.common.runs as usize
    }
}

/// Runs every (configuration, function, run) triple. The result order is the
/// grid order, then function, then run index, whatever the worker count.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<RunLog>> {
    spec.validate()?;
    let mut instances = Vec::new();
    for &function in &spec.functions {
        let per_function: Vec<ProblemInstance> = (0..spec.instances)
            .map(|i| spec.instance(function, i))
            .collect::<Result<_>>()?;
        instances.push(per_function);
    }
    let configs = spec.grid.configs(&spec.common);
    let mut jobs = Vec::with_capacity(spec.job_count());
    for cfg in &configs {
        for (fi, _) in spec.functions.iter().enumerate() {
            for run in 0..spec.common.runs {
                jobs.push((cfg, fi, run));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Pool(e.to_string()))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(cfg, fi, run)| {
                let inst = &instances[fi][(run % spec.instances) as usize];
                let started = Instant::now();
                let mut log = run_single(cfg, inst, run)?;
                log.wall_time_secs = Some(started.elapsed().as_secs_f64());
                Ok(log)
            })
            .collect()
    })
}
