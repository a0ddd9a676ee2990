//! Micro-averaged F-Score, fitness evaluation, the default rule, and Pareto
//! filtering.

use alloc::vec::Vec;
use core::fmt;

use crate::dataset::Dataset;
use crate::nsga2::{dominates, FitnessTuple};
use crate::rule::{DefaultRule, Individual, ModelError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricsError {
    ShapeMismatch { left: usize, right: usize },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::ShapeMismatch { left, right } => {
                write!(
                    f,
                    "prediction and truth shapes differ: {left} vs {right} cells"
                )
            }
        }
    }
}

/// Confusion counts pooled over all (instance, label) cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_positive: u64,
    pub false_positive: u64,
    pub false_negative: u64,
    pub true_negative: u64,
}

impl ConfusionCounts {
    pub fn accumulate(&mut self, predicted: &[u8], truth: &[u8]) {
        debug_assert_eq!(predicted.len(), truth.len());
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p, t) {
                (1, 1) => self.true_positive += 1,
                (1, 0) => self.false_positive += 1,
                (0, 1) => self.false_negative += 1,
                _ => self.true_negative += 1,
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.false_negative + self.true_negative
    }

    /// `2*tp / (2*tp + fp + fn)`, defined as 0 when the denominator is 0.
    pub fn micro_fscore(&self) -> f64 {
        let denominator = 2 * self.true_positive + self.false_positive + self.false_negative;
        if denominator == 0 {
            0.0
        } else {
            (2 * self.true_positive) as f64 / denominator as f64
        }
    }
}

/// Micro-averaged F-Score over two equal-shape binary matrices given as flat
/// cell slices.
pub fn micro_fscore(predicted: &[u8], truth: &[u8]) -> Result<f64, MetricsError> {
    if predicted.len() != truth.len() {
        return Err(MetricsError::ShapeMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let mut counts = ConfusionCounts::default();
    counts.accumulate(predicted, truth);
    Ok(counts.micro_fscore())
}

/// Default rule: label `l` is set iff at least half of the training
/// instances carry it (a mean of exactly 0.5 rounds to 1).
pub fn default_rule(train: &Dataset) -> DefaultRule {
    let n = train.num_instances();
    let mut positives = alloc::vec![0usize; train.num_labels()];
    for i in 0..n {
        for (acc, &bit) in positives.iter_mut().zip(train.labels_of(i)) {
            *acc += bit as usize;
        }
    }
    let consequent: Vec<u8> = positives.iter().map(|&p| u8::from(2 * p >= n)).collect();
    DefaultRule::new(consequent).expect("datasets have at least one label")
}

/// Fitness of one individual on `data`: micro-F-Score of its predictions and
/// its rule count. The default rule predicts for uncovered instances but is
/// not counted towards the size.
pub fn evaluate(
    individual: &Individual,
    default: &DefaultRule,
    data: &Dataset,
) -> Result<FitnessTuple, ModelError> {
    let labels = data.num_labels();
    if default.consequent().len() != labels {
        return Err(ModelError::LabelArityMismatch {
            left: default.consequent().len(),
            right: labels,
        });
    }
    if individual.rules()[0].consequent().len() != labels {
        return Err(ModelError::LabelArityMismatch {
            left: individual.rules()[0].consequent().len(),
            right: labels,
        });
    }
    let mut counts = ConfusionCounts::default();
    for i in 0..data.num_instances() {
        let predicted = individual.predict(default, data.instance(i))?;
        counts.accumulate(predicted, data.labels_of(i));
    }
    Ok(FitnessTuple::new(counts.micro_fscore(), individual.size()))
}

/// Indices of the members not dominated by any other member, ascending.
pub fn pareto_front(fitness: &[FitnessTuple]) -> Vec<usize> {
    (0..fitness.len())
        .filter(|&i| !fitness.iter().any(|other| dominates(other, &fitness[i])))
        .collect()
}

/// Interpretability of a model, measured as the inverse of its size.
pub fn interpretability_score(size: usize) -> f64 {
    debug_assert!(size >= 1);
    1.0 / size as f64
}
