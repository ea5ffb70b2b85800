use alloc::vec::Vec;

use crate::error::{config, internal, Error, Result};
use crate::rng::RngStream;
use crate::space::SearchSpace;

/// Fitness assigned to death-penalized trials. Compares greater than every
/// finite objective value and equal to itself.
pub const PENALTY: f64 = f64::INFINITY;

/// Smallest admissible population: three distinct non-target indices.
pub const MIN_POPULATION: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub x: Vec<f64>,
    /// `None` until evaluated. Penalized individuals hold [`PENALTY`].
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(x: Vec<f64>) -> Self {
        Self { x, fitness: None }
    }

    pub fn evaluated(x: Vec<f64>, fitness: f64) -> Self {
        Self {
            x,
            fitness: Some(fitness),
        }
    }

    pub fn fitness(&self) -> Result<f64> {
        self.fitness
            .ok_or_else(|| internal("fitness read before evaluation"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: u64,
}

impl Population {
    pub fn from_members(members: Vec<Individual>) -> Self {
        Self {
            members,
            generation: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.members[i].x
    }

    /// Fitness of member `i`; errors when unevaluated.
    pub fn f(&self, i: usize) -> Result<f64> {
        self.members[i].fitness()
    }

    pub fn fitness_values(&self) -> Result<Vec<f64>> {
        self.members.iter().map(Individual::fitness).collect()
    }

    /// Index of the minimum-fitness member; ties go to the lowest index.
    pub fn best_index(&self) -> Result<usize> {
        let mut best = 0;
        let mut best_f = self.f(0)?;
        for i in 1..self.len() {
            let f = self.f(i)?;
            if f < best_f {
                best = i;
                best_f = f;
            }
        }
        Ok(best)
    }

    /// Member indices sorted best-first, ties broken by index.
    pub fn ranked_indices(&self) -> Result<Vec<usize>> {
        let f = self.fitness_values()?;
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
        Ok(order)
    }
}

/// Uniform initialization inside `space`. Members are left unevaluated.
pub fn initialize_population(
    space: &SearchSpace,
    size: usize,
    rng: &mut RngStream,
) -> Result<Population> {
    if size < MIN_POPULATION {
        return Err(config(alloc::format!(
            "population size {size} is below the minimum of {MIN_POPULATION}"
        )));
    }
    let members = (0..size)
        .map(|_| {
            let x = (0..space.dim())
                .map(|j| rng.uniform_in(space.lower()[j], space.upper()[j]))
                .collect();
            Individual::new(x)
        })
        .collect();
    Ok(Population::from_members(members))
}

/// Elitist one-to-one selection: the trial wins only on strict improvement.
pub fn select<'a>(parent: &'a Individual, trial: &'a Individual) -> Result<&'a Individual> {
    if trial.fitness()? < parent.fitness()? {
        Ok(trial)
    } else {
        Ok(parent)
    }
}

/// Evaluation counter with a hard cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    max_evaluations: u64,
    used_evaluations: u64,
}

impl Budget {
    pub fn new(max_evaluations: u64) -> Self {
        Self {
            max_evaluations,
            used_evaluations: 0,
        }
    }

    pub fn max(&self) -> u64 {
        self.max_evaluations
    }

    pub fn used(&self) -> u64 {
        self.used_evaluations
    }

    pub fn remaining(&self) -> u64 {
        self.max_evaluations - self.used_evaluations
    }

    pub fn is_exhausted(&self) -> bool {
        self.used_evaluations >= self.max_evaluations
    }

    /// Reserve one evaluation.
    pub fn consume(&mut self) -> Result<()> {
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted);
        }
        self.used_evaluations += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn init_stays_in_box() {
        let space = SearchSpace::uniform(2, -5.0, 5.0).unwrap();
        let pop = initialize_population(&space, 4, &mut RngStream::new(9)).unwrap();
        assert_eq!(pop.len(), 4);
        assert!(pop.members.iter().all(|m| space.contains(&m.x) && m.fitness.is_none()));
    }

    #[test]
    fn zero_width_box() {
        let space = SearchSpace::new(vec![2.0, 2.0], vec![2.0, 2.0]).unwrap();
        assert!(initialize_population(&space, 3, &mut RngStream::new(1)).is_err());
        let pop = initialize_population(&space, 4, &mut RngStream::new(1)).unwrap();
        assert!(pop.members.iter().all(|m| m.x == vec![2.0, 2.0]));
    }

    #[test]
    fn init_is_deterministic() {
        let space = SearchSpace::uniform(5, -5.0, 5.0).unwrap();
        let a = initialize_population(&space, 10, &mut RngStream::new(42)).unwrap();
        let b = initialize_population(&space, 10, &mut RngStream::new(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn selection_is_strict() {
        let parent = Individual::evaluated(vec![0.0], 1.0);
        let better = Individual::evaluated(vec![1.0], 0.5);
        let equal = Individual::evaluated(vec![2.0], 1.0);
        assert_eq!(select(&parent, &better).unwrap().x, vec![1.0]);
        assert_eq!(select(&parent, &equal).unwrap().x, vec![0.0]);

        let finite = Individual::evaluated(vec![0.0], 3.7);
        let penalized = Individual::evaluated(vec![9.0], PENALTY);
        assert_eq!(select(&finite, &penalized).unwrap().x, vec![0.0]);
        let both = Individual::evaluated(vec![0.0], PENALTY);
        assert_eq!(select(&both, &penalized).unwrap().x, vec![0.0]);
    }

    #[test]
    fn selection_needs_fitness() {
        let parent = Individual::evaluated(vec![0.0], 1.0);
        let trial = Individual::new(vec![1.0]);
        assert!(matches!(select(&parent, &trial), Err(Error::Internal(_))));
    }

    #[test]
    fn budget_caps() {
        let mut b = Budget::new(2);
        b.consume().unwrap();
        b.consume().unwrap();
        assert_eq!(b.consume(), Err(Error::BudgetExhausted));
        assert_eq!(b.used(), 2);
    }

    #[test]
    fn best_ties_go_low() {
        let pop = Population::from_members(vec![
            Individual::evaluated(vec![0.0], 2.0),
            Individual::evaluated(vec![0.0], 1.0),
            Individual::evaluated(vec![0.0], 1.0),
        ]);
        assert_eq!(pop.best_index().unwrap(), 1);
        assert_eq!(pop.ranked_indices().unwrap(), vec![1, 2, 0]);
    }
}
