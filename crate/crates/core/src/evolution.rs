//! The mutation-selection loop.
//!
//! Each generation tries to produce `m` mutants by cloning uniformly drawn
//! parents and applying a weighted mutation operator (add / remove /
//! substitute a rule). An operator whose precondition fails counts as a
//! failed attempt and a fresh (parent, operator) pair is drawn; reaching the
//! failed-attempt limit before `m` mutants exist stops the whole run.
//! Survivors are then selected from parents plus mutants with NSGA-II.
//! Crossover is deliberately absent.

use alloc::vec::Vec;
use core::fmt;

use crate::dataset::Dataset;
use crate::metrics::{self, evaluate};
use crate::nsga2::{self, FitnessTuple, Nsga2Error};
use crate::rng::Rng;
use crate::rule::{DefaultRule, Individual, ModelError};
use crate::rulegen::{self, RuleGenConfig, RuleGenError};

/// Relative weights of the three mutation operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MutationWeights {
    pub add: u32,
    pub remove: u32,
    pub substitute: u32,
}

impl Default for MutationWeights {
    fn default() -> Self {
        MutationWeights {
            add: 1,
            remove: 2,
            substitute: 4,
        }
    }
}

impl MutationWeights {
    pub fn total(&self) -> u32 {
        self.add + self.remove + self.substitute
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    Add,
    Remove,
    Substitute,
}

/// Maps a 1-based draw in `[1, total]` to an operator. With the default
/// weights the draw is uniform on 1..=7: 7 adds, 6 and 5 remove, the rest
/// substitute.
pub fn mutation_from_draw(weights: &MutationWeights, draw: u32) -> Mutation {
    debug_assert!(draw >= 1 && draw <= weights.total());
    if draw <= weights.substitute {
        Mutation::Substitute
    } else if draw <= weights.substitute + weights.remove {
        Mutation::Remove
    } else {
        Mutation::Add
    }
}

/// Draws a mutation operator with the configured weights.
pub fn pick_mutation(weights: &MutationWeights, rng: &mut Rng) -> Mutation {
    let draw = rng.next_below(weights.total() as u64) as u32 + 1;
    mutation_from_draw(weights, draw)
}

/// Outcome of one mutation attempt. `Failed` is the operator's expected
/// precondition failure, not an error.
#[derive(Clone, Debug, PartialEq)]
pub enum MutationOutcome {
    Mutant(Individual),
    Failed,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvolutionError {
    InvalidConfig(&'static str),
    RuleGen(RuleGenError),
    Model(ModelError),
    Selection(Nsga2Error),
}

impl fmt::Display for EvolutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvolutionError::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            EvolutionError::RuleGen(e) => write!(f, "{e}"),
            EvolutionError::Model(e) => write!(f, "{e}"),
            EvolutionError::Selection(e) => write!(f, "{e}"),
        }
    }
}

impl From<RuleGenError> for EvolutionError {
    fn from(e: RuleGenError) -> Self {
        EvolutionError::RuleGen(e)
    }
}

impl From<ModelError> for EvolutionError {
    fn from(e: ModelError) -> Self {
        EvolutionError::Model(e)
    }
}

impl From<Nsga2Error> for EvolutionError {
    fn from(e: Nsga2Error) -> Self {
        EvolutionError::Selection(e)
    }
}

/// Run configuration. `t` has no sensible universal default and must be
/// chosen per dataset; the other defaults follow the engine's standard
/// operating point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvolutionConfig {
    pub pop_size: usize,
    pub max_generations: usize,
    pub mutants_per_generation: usize,
    pub max_failed_attempts: usize,
    pub t: usize,
    pub mutation_weights: MutationWeights,
    pub rng_seed: u64,
}

impl EvolutionConfig {
    pub fn new(t: usize) -> Self {
        EvolutionConfig {
            pop_size: 80,
            max_generations: 200,
            mutants_per_generation: 40,
            max_failed_attempts: 2000,
            t,
            mutation_weights: MutationWeights::default(),
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        if self.pop_size == 0 {
            return Err(EvolutionError::InvalidConfig(
                "population size must be >= 1",
            ));
        }
        if self.max_generations == 0 {
            return Err(EvolutionError::InvalidConfig(
                "generation count must be >= 1",
            ));
        }
        if self.mutants_per_generation == 0 {
            return Err(EvolutionError::InvalidConfig("mutant count must be >= 1"));
        }
        if self.max_failed_attempts == 0 {
            return Err(EvolutionError::InvalidConfig(
                "failed-attempt limit must be >= 1",
            ));
        }
        if self.t == 0 {
            return Err(EvolutionError::InvalidConfig(
                "covered-instance target must be >= 1",
            ));
        }
        if self.mutation_weights.add == 0
            || self.mutation_weights.remove == 0
            || self.mutation_weights.substitute == 0
        {
            return Err(EvolutionError::InvalidConfig(
                "mutation weights must be positive",
            ));
        }
        Ok(())
    }
}

/// Why the run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    GenerationsExhausted,
    FailedAttemptLimit,
}

/// Per-generation record: the selected population's fitness, the number of
/// failed mutation attempts, and (on the last record) the stop reason.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationLog {
    pub generation: usize,
    pub fitness: Vec<FitnessTuple>,
    pub failed_attempts: usize,
    pub stop: Option<StopReason>,
}

/// Final population with cached fitness, the per-generation logs, and the
/// training-derived default rule.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub population: Vec<(Individual, FitnessTuple)>,
    pub logs: Vec<GenerationLog>,
    pub default_rule: DefaultRule,
}

/// Add mutation: clones the parent and appends a rule created against its
/// rule set. Fails when the parent already covers every instance.
pub fn mutate_add(
    parent: &Individual,
    dataset: &Dataset,
    cfg: &RuleGenConfig,
    rng: &mut Rng,
) -> Result<MutationOutcome, EvolutionError> {
    match rulegen::create_rule(parent.rules(), dataset, cfg, rng) {
        Ok(rule) => {
            let mut rules = parent.rules().to_vec();
            rules.push(rule);
            Ok(MutationOutcome::Mutant(Individual::from_disjoint_rules(
                rules,
            )))
        }
        Err(RuleGenError::NoUncoveredInstance) => Ok(MutationOutcome::Failed),
        Err(e) => Err(e.into()),
    }
}

/// Remove mutation: clones the parent and drops one uniformly chosen rule.
/// Fails on single-rule parents, which removal would destroy.
pub fn mutate_remove(parent: &Individual, rng: &mut Rng) -> MutationOutcome {
    if parent.size() == 1 {
        return MutationOutcome::Failed;
    }
    let victim = rng.index(parent.size());
    let mut rules = parent.rules().to_vec();
    rules.remove(victim);
    MutationOutcome::Mutant(Individual::from_disjoint_rules(rules))
}

/// Substitute mutation: clones the parent, removes one uniformly chosen rule
/// and creates a replacement against the reduced set. Never fails: the
/// removed rule's region is free again, so a seed always exists.
pub fn mutate_substitute(
    parent: &Individual,
    dataset: &Dataset,
    cfg: &RuleGenConfig,
    rng: &mut Rng,
) -> Result<Individual, EvolutionError> {
    let victim = rng.index(parent.size());
    let mut rules = parent.rules().to_vec();
    rules.remove(victim);
    let replacement = rulegen::create_rule(&rules, dataset, cfg, rng)?;
    rules.push(replacement);
    Ok(Individual::from_disjoint_rules(rules))
}

/// Runs the full loop on a training dataset. Deterministic in
/// `cfg.rng_seed`: identical configurations produce identical results.
pub fn run(dataset: &Dataset, cfg: &EvolutionConfig) -> Result<RunResult, EvolutionError> {
    cfg.validate()?;
    let mut rng = Rng::seed_from_u64(cfg.rng_seed);
    let rulegen_cfg = RuleGenConfig::new(cfg.t)?;
    let default = metrics::default_rule(dataset);

    let mut population: Vec<(Individual, FitnessTuple)> = Vec::with_capacity(cfg.pop_size);
    for _ in 0..cfg.pop_size {
        let individual = rulegen::init_individual(dataset, &rulegen_cfg, &mut rng);
        let fitness = evaluate(&individual, &default, dataset)?;
        population.push((individual, fitness));
    }

    let mut logs = Vec::with_capacity(cfg.max_generations);
    for generation in 0..cfg.max_generations {
        let mut mutants: Vec<(Individual, FitnessTuple)> =
            Vec::with_capacity(cfg.mutants_per_generation);
        let mut failed_attempts = 0usize;
        let mut limit_hit = false;

        while mutants.len() < cfg.mutants_per_generation {
            let parent = &population[rng.index(population.len())].0;
            let outcome = match pick_mutation(&cfg.mutation_weights, &mut rng) {
                Mutation::Add => mutate_add(parent, dataset, &rulegen_cfg, &mut rng)?,
                Mutation::Remove => mutate_remove(parent, &mut rng),
                Mutation::Substitute => MutationOutcome::Mutant(mutate_substitute(
                    parent,
                    dataset,
                    &rulegen_cfg,
                    &mut rng,
                )?),
            };
            match outcome {
                MutationOutcome::Mutant(individual) => {
                    let fitness = evaluate(&individual, &default, dataset)?;
                    mutants.push((individual, fitness));
                }
                MutationOutcome::Failed => {
                    failed_attempts += 1;
                    if failed_attempts >= cfg.max_failed_attempts {
                        limit_hit = true;
                        break;
                    }
                }
            }
        }

        if limit_hit {
            // partial mutants are discarded; the last selected population stands
            logs.push(GenerationLog {
                generation,
                fitness: population.iter().map(|(_, f)| *f).collect(),
                failed_attempts,
                stop: Some(StopReason::FailedAttemptLimit),
            });
            return Ok(RunResult {
                population,
                logs,
                default_rule: default,
            });
        }

        population.extend(mutants);
        let fitness: Vec<FitnessTuple> = population.iter().map(|(_, f)| *f).collect();
        let survivors = nsga2::select_survivors(&fitness, cfg.pop_size)?;
        let mut keep = alloc::vec![false; population.len()];
        for &i in &survivors {
            keep[i] = true;
        }
        let mut keep_flags = keep.into_iter();
        population.retain(|_| keep_flags.next().expect("flag per member"));

        logs.push(GenerationLog {
            generation,
            fitness: population.iter().map(|(_, f)| *f).collect(),
            failed_attempts,
            stop: (generation + 1 == cfg.max_generations)
                .then_some(StopReason::GenerationsExhausted),
        });
    }

    Ok(RunResult {
        population,
        logs,
        default_rule: default,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line_dataset() -> Dataset {
        Dataset::new(
            1,
            2,
            (0..8).map(|i| i as f64).collect(),
            (0..8)
                .flat_map(|i| [u8::from(i < 4), u8::from(i >= 4)])
                .collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn draw_mapping_matches_the_weights() {
        let w = MutationWeights::default();
        assert_eq!(mutation_from_draw(&w, 7), Mutation::Add);
        assert_eq!(mutation_from_draw(&w, 6), Mutation::Remove);
        assert_eq!(mutation_from_draw(&w, 5), Mutation::Remove);
        for draw in 1..=4 {
            assert_eq!(mutation_from_draw(&w, draw), Mutation::Substitute);
        }
    }

    #[test]
    fn add_fails_when_everything_is_covered() {
        let d = line_dataset();
        let all = Individual::from_rules(vec![crate::rule::Rule::new(
            crate::rule::HyperBox::full(1),
            vec![1, 0],
        )
        .unwrap()])
        .unwrap();
        let cfg = RuleGenConfig::new(1).unwrap();
        let mut rng = Rng::seed_from_u64(0);
        assert_eq!(
            mutate_add(&all, &d, &cfg, &mut rng).unwrap(),
            MutationOutcome::Failed
        );
    }

    #[test]
    fn add_grows_a_consistent_clone() {
        let d = line_dataset();
        let cfg = RuleGenConfig::new(2).unwrap();
        let mut rng = Rng::seed_from_u64(1);
        let parent = rulegen::init_individual(&d, &cfg, &mut rng);
        let before = parent.clone();
        match mutate_add(&parent, &d, &cfg, &mut rng).unwrap() {
            MutationOutcome::Mutant(child) => {
                assert_eq!(child.size(), parent.size() + 1);
                assert!(child.is_consistent());
            }
            MutationOutcome::Failed => panic!("uncovered instances existed"),
        }
        assert_eq!(parent, before, "parent must not be modified");
    }

    #[test]
    fn remove_fails_only_on_single_rule() {
        let d = line_dataset();
        let cfg = RuleGenConfig::new(1).unwrap();
        let mut rng = Rng::seed_from_u64(2);
        let one = rulegen::init_individual(&d, &cfg, &mut rng);
        assert_eq!(mutate_remove(&one, &mut rng), MutationOutcome::Failed);

        let two = match mutate_add(&one, &d, &cfg, &mut rng).unwrap() {
            MutationOutcome::Mutant(m) => m,
            MutationOutcome::Failed => panic!(),
        };
        match mutate_remove(&two, &mut rng) {
            MutationOutcome::Mutant(m) => {
                assert_eq!(m.size(), 1);
                assert!(m.is_consistent());
            }
            MutationOutcome::Failed => panic!("two rules can lose one"),
        }
    }

    #[test]
    fn substitute_never_fails_even_on_single_rule() {
        let d = line_dataset();
        let cfg = RuleGenConfig::new(3).unwrap();
        for seed in 0..10 {
            let mut rng = Rng::seed_from_u64(seed);
            let parent = rulegen::init_individual(&d, &cfg, &mut rng);
            let child = mutate_substitute(&parent, &d, &cfg, &mut rng).unwrap();
            assert_eq!(child.size(), parent.size());
            assert!(child.is_consistent());
        }
    }

    #[test]
    fn single_generation_keeps_population_size() {
        let d = line_dataset();
        let mut cfg = EvolutionConfig::new(2);
        cfg.pop_size = 10;
        cfg.max_generations = 1;
        cfg.mutants_per_generation = 5;
        cfg.rng_seed = 7;
        let result = run(&d, &cfg).unwrap();
        assert_eq!(result.population.len(), 10);
        assert_eq!(result.logs.len(), 1);
        assert_eq!(result.logs[0].stop, Some(StopReason::GenerationsExhausted));
    }

    #[test]
    fn single_instance_dataset_completes() {
        // every initial individual covers the lone instance, so add and
        // remove always fail and substitutes carry each generation
        let d = Dataset::new(1, 1, vec![5.0], vec![1], None).unwrap();
        let mut cfg = EvolutionConfig::new(1);
        cfg.pop_size = 4;
        cfg.max_generations = 3;
        cfg.mutants_per_generation = 6;
        cfg.rng_seed = 3;
        let result = run(&d, &cfg).unwrap();
        assert_eq!(result.logs.len(), 3);
        assert!(result.logs.iter().all(|l| l.fitness.len() == 4));
        assert_eq!(result.logs[2].stop, Some(StopReason::GenerationsExhausted));
        assert!(result
            .logs
            .iter()
            .all(|l| l.failed_attempts < cfg.max_failed_attempts));
    }

    #[test]
    fn identical_seeds_reproduce_bit_identical_runs() {
        let d = line_dataset();
        let mut cfg = EvolutionConfig::new(2);
        cfg.pop_size = 8;
        cfg.max_generations = 4;
        cfg.mutants_per_generation = 6;
        cfg.rng_seed = 99;
        let a = run(&d, &cfg).unwrap();
        let b = run(&d, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failed_attempt_limit_stops_the_run() {
        // one instance: add and remove always fail, so failures accumulate
        // at roughly 3/7 of the attempts
        let d = Dataset::new(1, 1, vec![5.0], vec![1], None).unwrap();
        let mut cfg = EvolutionConfig::new(1);
        cfg.pop_size = 2;
        cfg.max_generations = 50;
        cfg.mutants_per_generation = 1000; // unreachable before the limit
        cfg.max_failed_attempts = 20;
        cfg.rng_seed = 0;
        let result = run(&d, &cfg).unwrap();
        let last = result.logs.last().unwrap();
        assert_eq!(last.stop, Some(StopReason::FailedAttemptLimit));
        assert_eq!(last.failed_attempts, 20);
        assert_eq!(result.population.len(), 2);
    }

    #[test]
    fn config_validation() {
        let mut cfg = EvolutionConfig::new(1);
        cfg.pop_size = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = EvolutionConfig::new(0);
        assert!(cfg.validate().is_err());
        cfg = EvolutionConfig::new(4);
        cfg.mutation_weights.remove = 0;
        assert!(cfg.validate().is_err());
        assert!(EvolutionConfig::new(4).validate().is_ok());
    }
}
