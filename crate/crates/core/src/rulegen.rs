//! Rule creation: pick an uncovered seed, run CFSBE for the outer box, grow
//! an inner box towards the nearest uncovered instances, derive the
//! consequent from the covered labels.

use alloc::vec::Vec;
use core::fmt;

use crate::cfsbe::{self, CfsbeError, ExpansionOrder};
use crate::dataset::Dataset;
use crate::rng::Rng;
use crate::rule::{FeatureTest, HyperBox, Individual, ModelError, Rule};

#[derive(Clone, Debug, PartialEq)]
pub enum RuleGenError {
    /// The covered-instance target `t` must be at least 1.
    InvalidTarget,
    /// Every instance is already covered; no seed exists. This is the
    /// expected failure mode of the add mutation.
    NoUncoveredInstance,
    Cfsbe(CfsbeError),
    Model(ModelError),
}

impl fmt::Display for RuleGenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleGenError::InvalidTarget => write!(f, "covered-instance target must be >= 1"),
            RuleGenError::NoUncoveredInstance => {
                write!(f, "all dataset instances are already covered")
            }
            RuleGenError::Cfsbe(e) => write!(f, "{e}"),
            RuleGenError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<CfsbeError> for RuleGenError {
    fn from(e: CfsbeError) -> Self {
        RuleGenError::Cfsbe(e)
    }
}

impl From<ModelError> for RuleGenError {
    fn from(e: ModelError) -> Self {
        RuleGenError::Model(e)
    }
}

/// Rule-creation configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleGenConfig {
    t: usize,
}

impl RuleGenConfig {
    pub fn new(t: usize) -> Result<Self, RuleGenError> {
        if t == 0 {
            return Err(RuleGenError::InvalidTarget);
        }
        Ok(RuleGenConfig { t })
    }

    /// Number of instances a new rule tries to cover.
    pub fn target(&self) -> usize {
        self.t
    }
}

/// Indices of the instances covered by no rule.
pub fn uncovered_instances(rules: &[Rule], dataset: &Dataset) -> Vec<usize> {
    (0..dataset.num_instances())
        .filter(|&i| !rules.iter().any(|r| r.covers(dataset.instance(i))))
        .collect()
}

/// Squared Euclidean distance after min-max normalisation by the dataset's
/// per-feature ranges. Constant features contribute nothing.
fn normalized_sq_distance(a: &[f64], b: &[f64], ranges: &[f64]) -> f64 {
    let mut acc = 0.0;
    for ((&x, &y), &r) in a.iter().zip(b).zip(ranges) {
        if r > 0.0 {
            let d = (x - y) / r;
            acc += d * d;
        }
    }
    acc
}

/// Smallest snapped upper bound strictly above `value`: the next distinct
/// dataset value, clamped into the outer box.
fn snap_upper(dataset: &Dataset, dim: usize, value: f64, outer_upper: f64) -> f64 {
    dataset
        .next_value_above(dim, value)
        .unwrap_or(f64::INFINITY)
        .min(outer_upper)
}

/// Creates one rule that is consistent with `existing` by construction.
///
/// A seed is drawn uniformly among the uncovered instances and a random
/// expansion order is generated; CFSBE yields the outer box. The inner box
/// starts as the minimal snapped cell around the seed and admits uncovered
/// instances in ascending distance order (ties broken by instance index),
/// each time extending minimally per dimension, until `t` instances are
/// covered or no further candidate fits. A candidate is skipped permanently
/// if its admission would leave the outer box or lift the covered count
/// past `t` (one extension can swallow several candidates at once).
///
/// The consequent sets label `l` iff at least half of the covered instances
/// carry it.
pub fn create_rule(
    existing: &[Rule],
    dataset: &Dataset,
    cfg: &RuleGenConfig,
    rng: &mut Rng,
) -> Result<Rule, RuleGenError> {
    let uncovered = uncovered_instances(existing, dataset);
    if uncovered.is_empty() {
        return Err(RuleGenError::NoUncoveredInstance);
    }
    let dims = dataset.num_features();
    let seed_index = uncovered[rng.index(uncovered.len())];
    let seed = dataset.instance(seed_index);
    let order = ExpansionOrder::random(dims, rng);
    let outer = cfsbe::enlarge_box(existing, seed, &order)?;

    let ranges: Vec<f64> = (0..dims)
        .map(|j| {
            let (lo, hi) = dataset.feature_range(j);
            hi - lo
        })
        .collect();
    let mut candidates: Vec<(f64, usize)> = uncovered
        .iter()
        .copied()
        .filter(|&i| outer.contains(dataset.instance(i)))
        .map(|i| {
            (
                normalized_sq_distance(seed, dataset.instance(i), &ranges),
                i,
            )
        })
        .collect();
    candidates.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite distances")
            .then(a.1.cmp(&b.1))
    });

    // inner box: minimal snapped cell containing the seed
    let mut lower: Vec<f64> = seed.to_vec();
    let mut upper: Vec<f64> = (0..dims)
        .map(|e| snap_upper(dataset, e, seed[e], outer.test(e).upper()))
        .collect();

    let inside = |lower: &[f64], upper: &[f64], point: &[f64]| {
        point
            .iter()
            .enumerate()
            .all(|(e, &v)| lower[e] <= v && v < upper[e])
    };

    let mut covered = alloc::vec![false; candidates.len()];
    let mut covered_count = 0usize;
    // the initial cell itself may cover several candidates (duplicate rows)
    for (flag, &(_, idx)) in covered.iter_mut().zip(&candidates) {
        if inside(&lower, &upper, dataset.instance(idx)) {
            *flag = true;
            covered_count += 1;
        }
    }

    let mut ext_lower = alloc::vec![0.0f64; dims];
    let mut ext_upper = alloc::vec![0.0f64; dims];
    let mut newly = Vec::new();
    for pos in 0..candidates.len() {
        if covered_count >= cfg.t {
            break;
        }
        if covered[pos] {
            continue;
        }
        let point = dataset.instance(candidates[pos].1);
        let mut fits = true;
        for e in 0..dims {
            let v = point[e];
            ext_lower[e] = lower[e].min(v);
            ext_upper[e] = if v < upper[e] {
                upper[e]
            } else {
                snap_upper(dataset, e, v, outer.test(e).upper())
            };
            if ext_lower[e] < outer.test(e).lower() || ext_upper[e] > outer.test(e).upper() {
                fits = false;
                break;
            }
        }
        if !fits {
            // permanently skipped; later admissions only grow the box
            continue;
        }
        newly.clear();
        for (i, &(_, idx)) in candidates.iter().enumerate() {
            if !covered[i] && inside(&ext_lower, &ext_upper, dataset.instance(idx)) {
                newly.push(i);
            }
        }
        if covered_count + newly.len() > cfg.t {
            // admitting this candidate would overshoot the target
            continue;
        }
        lower.copy_from_slice(&ext_lower);
        upper.copy_from_slice(&ext_upper);
        for &i in &newly {
            covered[i] = true;
        }
        covered_count += newly.len();
    }

    let tests = lower
        .iter()
        .zip(&upper)
        .map(|(&l, &u)| FeatureTest::new(l, u))
        .collect::<Result<Vec<_>, _>>()?;
    let antecedent = HyperBox::new(tests)?;

    let num_labels = dataset.num_labels();
    let mut positives = alloc::vec![0usize; num_labels];
    let mut covered_total = 0usize;
    for i in 0..dataset.num_instances() {
        if antecedent.contains(dataset.instance(i)) {
            covered_total += 1;
            for (acc, &bit) in positives.iter_mut().zip(dataset.labels_of(i)) {
                *acc += bit as usize;
            }
        }
    }
    debug_assert!(covered_total >= 1, "a new rule must cover its seed");
    let consequent: Vec<u8> = positives
        .iter()
        .map(|&p| u8::from(2 * p >= covered_total))
        .collect();

    let rule = Rule::new(antecedent, consequent)?;
    debug_assert!(rule.covers(seed));
    debug_assert!(existing
        .iter()
        .all(|r| !rule.antecedent().overlaps(r.antecedent()).unwrap()));
    Ok(rule)
}

/// First-generation individual: a single rule created against the empty rule
/// set. Randomness in the seed and order makes initial individuals differ.
pub fn init_individual(dataset: &Dataset, cfg: &RuleGenConfig, rng: &mut Rng) -> Individual {
    let rule = create_rule(&[], dataset, cfg, rng)
        .expect("an empty rule set leaves every instance uncovered");
    Individual::from_disjoint_rules(alloc::vec![rule])
}
