//! Model archives: JSON documents holding a population of rule-set models,
//! the default rule, training fitness, and the dataset arities.
//!
//! Interval bounds are JSON numbers, with the infinite bounds encoded as the
//! string sentinels `"-inf"` and `"+inf"`. Serialization is deterministic:
//! serialize -> parse -> serialize reproduces the bytes.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use boxrules_core::rule::{DefaultRule, FeatureTest, HyperBox, Individual, Rule};
use boxrules_core::{ColumnNames, FitnessTuple, RunResult};

use crate::error::CliError;

pub const FORMAT_TAG: &str = "boxrules-archive-v1";

/// One interval bound; `f64::INFINITY` and `f64::NEG_INFINITY` round-trip
/// through the string sentinels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound(pub f64);

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            serializer.serialize_str("+inf")
        } else if self.0 == f64::NEG_INFINITY {
            serializer.serialize_str("-inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

struct BoundVisitor;

impl Visitor<'_> for BoundVisitor {
    type Value = Bound;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a finite number or \"-inf\"/\"+inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Bound, E> {
        if v.is_finite() {
            Ok(Bound(v))
        } else {
            Err(E::custom("non-finite numeric bound"))
        }
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Bound, E> {
        Ok(Bound(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Bound, E> {
        Ok(Bound(v as f64))
    }

    fn visit_str<E: de::Error>(self, s: &str) -> Result<Bound, E> {
        match s {
            "+inf" => Ok(Bound(f64::INFINITY)),
            "-inf" => Ok(Bound(f64::NEG_INFINITY)),
            other => Err(E::custom(format!("unknown bound sentinel '{other}'"))),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Bound, D::Error> {
        deserializer.deserialize_any(BoundVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleRepr {
    pub lower: Vec<Bound>,
    pub upper: Vec<Bound>,
    pub consequent: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelRepr {
    pub train_fscore: f64,
    pub rules: Vec<RuleRepr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    pub format: String,
    pub num_features: usize,
    pub num_labels: usize,
    pub feature_names: Option<Vec<String>>,
    pub label_names: Option<Vec<String>>,
    pub default_rule: Vec<u8>,
    pub best_index: usize,
    pub models: Vec<ModelRepr>,
}

fn rule_repr(rule: &Rule) -> RuleRepr {
    RuleRepr {
        lower: rule
            .antecedent()
            .tests()
            .iter()
            .map(|t| Bound(t.lower()))
            .collect(),
        upper: rule
            .antecedent()
            .tests()
            .iter()
            .map(|t| Bound(t.upper()))
            .collect(),
        consequent: rule.consequent().to_vec(),
    }
}

/// Index of the training-best model: highest F-Score, ties to the smaller
/// model, then to the earlier index.
pub fn best_model_index(population: &[(Individual, FitnessTuple)]) -> usize {
    let mut best = 0usize;
    for (i, (_, fit)) in population.iter().enumerate().skip(1) {
        let champion = &population[best].1;
        if fit.fscore > champion.fscore
            || (fit.fscore == champion.fscore && fit.size < champion.size)
        {
            best = i;
        }
    }
    best
}

impl Archive {
    pub fn from_population(
        population: &[(Individual, FitnessTuple)],
        default_rule: &DefaultRule,
        num_features: usize,
        num_labels: usize,
        names: Option<&ColumnNames>,
    ) -> Archive {
        Archive {
            format: FORMAT_TAG.to_string(),
            num_features,
            num_labels,
            feature_names: names.map(|n| n.features.clone()),
            label_names: names.map(|n| n.labels.clone()),
            default_rule: default_rule.consequent().to_vec(),
            best_index: best_model_index(population),
            models: population
                .iter()
                .map(|(ind, fit)| ModelRepr {
                    train_fscore: fit.fscore,
                    rules: ind.rules().iter().map(rule_repr).collect(),
                })
                .collect(),
        }
    }

    pub fn from_run(
        result: &RunResult,
        num_features: usize,
        num_labels: usize,
        names: Option<&ColumnNames>,
    ) -> Archive {
        Archive::from_population(
            &result.population,
            &result.default_rule,
            num_features,
            num_labels,
            names,
        )
    }

    /// Archive holding only the given model, re-indexed to 0.
    pub fn single_model(&self, index: usize) -> Result<Archive, CliError> {
        let model = self.models.get(index).ok_or_else(|| {
            CliError::Validation(format!(
                "model index {index} out of range for {} models",
                self.models.len()
            ))
        })?;
        Ok(Archive {
            format: self.format.clone(),
            num_features: self.num_features,
            num_labels: self.num_labels,
            feature_names: self.feature_names.clone(),
            label_names: self.label_names.clone(),
            default_rule: self.default_rule.clone(),
            best_index: 0,
            models: vec![model.clone()],
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("archive serialization cannot fail")
    }

    pub fn parse(text: &str) -> Result<Archive, CliError> {
        let archive: Archive = serde_json::from_str(text)
            .map_err(|e| CliError::Validation(format!("malformed archive: {e}")))?;
        if archive.format != FORMAT_TAG {
            return Err(CliError::Validation(format!(
                "unsupported archive format '{}', expected '{FORMAT_TAG}'",
                archive.format
            )));
        }
        if archive.models.is_empty() {
            return Err(CliError::Validation("archive holds no models".into()));
        }
        if archive.best_index >= archive.models.len() {
            return Err(CliError::Validation(format!(
                "best_index {} out of range for {} models",
                archive.best_index,
                archive.models.len()
            )));
        }
        if archive.default_rule.len() != archive.num_labels {
            return Err(CliError::Validation("default rule arity mismatch".into()));
        }
        Ok(archive)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Archive, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Archive::parse(&text)
    }

    pub fn default_rule(&self) -> Result<DefaultRule, CliError> {
        DefaultRule::new(self.default_rule.clone()).map_err(|e| CliError::Validation(e.to_string()))
    }

    /// Rebuilds one model, re-validating arities and pairwise consistency;
    /// inconsistent external models are rejected here.
    pub fn model(&self, index: usize) -> Result<Individual, CliError> {
        let repr = self.models.get(index).ok_or_else(|| {
            CliError::Validation(format!(
                "model index {index} out of range for {} models",
                self.models.len()
            ))
        })?;
        let mut rules = Vec::with_capacity(repr.rules.len());
        for (ri, rule) in repr.rules.iter().enumerate() {
            if rule.lower.len() != self.num_features || rule.upper.len() != self.num_features {
                return Err(CliError::Validation(format!(
                    "model {index}, rule {ri}: expected {} bounds per side",
                    self.num_features
                )));
            }
            if rule.consequent.len() != self.num_labels {
                return Err(CliError::Validation(format!(
                    "model {index}, rule {ri}: consequent arity mismatch"
                )));
            }
            let tests = rule
                .lower
                .iter()
                .zip(&rule.upper)
                .map(|(l, u)| FeatureTest::new(l.0, u.0))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Validation(format!("model {index}, rule {ri}: {e}")))?;
            let antecedent = HyperBox::new(tests)
                .map_err(|e| CliError::Validation(format!("model {index}, rule {ri}: {e}")))?;
            rules.push(
                Rule::new(antecedent, rule.consequent.clone())
                    .map_err(|e| CliError::Validation(format!("model {index}, rule {ri}: {e}")))?,
            );
        }
        Individual::from_rules(rules)
            .map_err(|e| CliError::Validation(format!("model {index}: {e}")))
    }

    pub fn best_model(&self) -> Result<Individual, CliError> {
        self.model(self.best_index)
    }

    pub fn fitness_matrix(&self) -> Vec<FitnessTuple> {
        self.models
            .iter()
            .map(|m| FitnessTuple::new(m.train_fscore, m.rules.len()))
            .collect()
    }
}
