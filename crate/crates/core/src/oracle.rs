//! Brute-force reference implementations and scenario generators used by the
//! test suites. Everything here is deliberately naive and kept independent
//! of the engine's own code paths, so the two can check each other.

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::nsga2::FitnessTuple;
use crate::rng::Rng;
use crate::rule::{FeatureTest, HyperBox, Rule};

/// Literal pairwise dominance re-statement, kept separate from
/// [`crate::nsga2::dominates`].
pub fn dominates_naive(a: &FitnessTuple, b: &FitnessTuple) -> bool {
    let no_worse = a.fscore >= b.fscore && a.size <= b.size;
    let better = a.fscore > b.fscore || a.size < b.size;
    no_worse && better
}

/// O(n^2)-per-front sort: repeatedly peel off the members dominated by
/// nobody still standing.
pub fn fronts_naive(fitness: &[FitnessTuple]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..fitness.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| {
                !remaining
                    .iter()
                    .any(|&j| dominates_naive(&fitness[j], &fitness[i]))
            })
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// Members not dominated by any other member.
pub fn non_dominated_naive(fitness: &[FitnessTuple]) -> Vec<usize> {
    (0..fitness.len())
        .filter(|&i| {
            !fitness
                .iter()
                .any(|other| dominates_naive(other, &fitness[i]))
        })
        .collect()
}

/// Cell-by-cell confusion counting straight from the definitions.
pub fn micro_fscore_naive(predicted: &[u8], truth: &[u8]) -> f64 {
    assert_eq!(predicted.len(), truth.len());
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    for (&p, &t) in predicted.iter().zip(truth) {
        if p == 1 && t == 1 {
            tp += 1;
        }
        if p == 1 && t == 0 {
            fp += 1;
        }
        if p == 0 && t == 1 {
            fn_ += 1;
        }
    }
    if 2 * tp + fp + fn_ == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    }
}

/// Interval overlap restated for the checker.
fn intervals_overlap(a_lo: f64, a_up: f64, b_lo: f64, b_up: f64) -> bool {
    a_lo.max(b_lo) < a_up.min(b_up)
}

fn boxes_overlap_naive(a: &HyperBox, b: &HyperBox) -> bool {
    (0..a.dims()).all(|d| {
        intervals_overlap(
            a.test(d).lower(),
            a.test(d).upper(),
            b.test(d).lower(),
            b.test(d).upper(),
        )
    })
}

/// Checks the three box-enlargement postconditions: the box contains the
/// seed, overlaps no rule, and no face can move to the next candidate
/// boundary (any rule bound on that dimension, or infinity) without hitting
/// a rule. Returns a description of the first violation.
pub fn check_enlarged_box(
    result: &HyperBox,
    rules: &[Rule],
    seed: &[f64],
) -> Result<(), alloc::string::String> {
    use alloc::format;

    for (d, &coordinate) in seed.iter().enumerate() {
        let t = result.test(d);
        if !(t.lower() <= coordinate && coordinate < t.upper()) {
            return Err(format!("seed escapes dimension {d}"));
        }
    }
    for (i, rule) in rules.iter().enumerate() {
        if boxes_overlap_naive(result, rule.antecedent()) {
            return Err(format!("output overlaps rule {i}"));
        }
    }

    for d in 0..result.dims() {
        let bounds_on_d: Vec<f64> = rules
            .iter()
            .flat_map(|r| {
                [
                    r.antecedent().test(d).lower(),
                    r.antecedent().test(d).upper(),
                ]
            })
            .filter(|b| b.is_finite())
            .collect();

        let lower = result.test(d).lower();
        if lower.is_finite() {
            // next candidate strictly below, or -inf
            let candidate = bounds_on_d
                .iter()
                .copied()
                .filter(|&b| b < lower)
                .fold(f64::NEG_INFINITY, f64::max);
            let widened = widen(result, d, candidate, result.test(d).upper());
            if !rules
                .iter()
                .any(|r| boxes_overlap_naive(&widened, r.antecedent()))
            {
                return Err(format!(
                    "lower face of dimension {d} could move from {lower} to {candidate}"
                ));
            }
        }

        let upper = result.test(d).upper();
        if upper.is_finite() {
            let candidate = bounds_on_d
                .iter()
                .copied()
                .filter(|&b| b > upper)
                .fold(f64::INFINITY, f64::min);
            let widened = widen(result, d, result.test(d).lower(), candidate);
            if !rules
                .iter()
                .any(|r| boxes_overlap_naive(&widened, r.antecedent()))
            {
                return Err(format!(
                    "upper face of dimension {d} could move from {upper} to {candidate}"
                ));
            }
        }
    }
    Ok(())
}

fn widen(original: &HyperBox, dim: usize, lower: f64, upper: f64) -> HyperBox {
    let tests: Vec<FeatureTest> = (0..original.dims())
        .map(|d| {
            if d == dim {
                FeatureTest::new(lower, upper).expect("widened interval is non-degenerate")
            } else {
                *original.test(d)
            }
        })
        .collect();
    HyperBox::new(tests).expect("non-empty")
}

/// A random CFSBE scenario: pairwise-disjoint rules plus an uncovered seed
/// on an integer grid.
pub struct BoxScenario {
    pub rules: Vec<Rule>,
    pub seed: Vec<f64>,
}

/// Builds disjoint boxes by recursively splitting the full space at grid
/// values in 1..=8, then drawing the rules and the seed's cell from
/// different leaves. Grid points live in 0..=9, so every leaf contains at
/// least one of them.
pub fn random_disjoint_scenario(dims: usize, max_rules: usize, rng: &mut Rng) -> BoxScenario {
    assert!(dims >= 1);
    let mut leaves = alloc::vec![HyperBox::full(dims)];
    let cuts = 2 + rng.index(3); // 2..=4 splits
    for _ in 0..cuts {
        let leaf_idx = rng.index(leaves.len());
        let leaf = leaves[leaf_idx].clone();
        let d = rng.index(dims);
        let t = leaf.test(d);
        // admissible cut points strictly inside the interval
        let choices: Vec<f64> = (1..=8)
            .map(|v| v as f64)
            .filter(|&v| t.lower() < v && v < t.upper())
            .collect();
        if choices.is_empty() {
            continue;
        }
        let cut = choices[rng.index(choices.len())];
        let left = widen(&leaf, d, t.lower(), cut);
        let right = widen(&leaf, d, cut, t.upper());
        leaves[leaf_idx] = left;
        leaves.push(right);
    }

    rng.shuffle(&mut leaves);
    let seed_leaf = leaves.pop().expect("at least one leaf");
    let rule_count = rng.index(max_rules.min(leaves.len()) + 1);
    let rules: Vec<Rule> = leaves
        .into_iter()
        .take(rule_count)
        .map(|antecedent| {
            let consequent = alloc::vec![rng.index(2) as u8, rng.index(2) as u8];
            Rule::new(antecedent, consequent).expect("binary consequent")
        })
        .collect();

    let seed: Vec<f64> = (0..dims)
        .map(|d| {
            let t = seed_leaf.test(d);
            let values: Vec<f64> = (0..=9)
                .map(|v| v as f64)
                .filter(|&v| t.lower() <= v && v < t.upper())
                .collect();
            values[rng.index(values.len())]
        })
        .collect();

    BoxScenario { rules, seed }
}

/// Deterministic toy dataset: two well-separated clusters with one-hot-ish
/// labels. `n` instances, 2 features, 2 labels.
pub fn toy_clusters(n: usize) -> Dataset {
    let mut rng = Rng::seed_from_u64(0xC1);
    let mut features = Vec::with_capacity(n * 2);
    let mut labels = Vec::with_capacity(n * 2);
    for i in 0..n {
        let cluster = i % 2;
        let base = if cluster == 0 { 0.0 } else { 10.0 };
        features.push(base + rng.index(4) as f64);
        features.push(base + rng.index(4) as f64);
        labels.push(u8::from(cluster == 0));
        labels.push(u8::from(cluster == 1));
    }
    Dataset::new(2, 2, features, labels, None).expect("valid toy data")
}

/// Deterministic toy dataset: a 3-feature integer lattice with threshold
/// labels. `n` instances, 3 features, 3 labels.
pub fn toy_lattice(n: usize) -> Dataset {
    let mut features = Vec::with_capacity(n * 3);
    let mut labels = Vec::with_capacity(n * 3);
    for i in 0..n {
        let a = (i % 5) as f64;
        let b = ((i / 5) % 4) as f64;
        let c = ((i / 20) % 3) as f64;
        features.extend_from_slice(&[a, b, c]);
        labels.push(u8::from(a >= 2.0));
        labels.push(u8::from(b >= 2.0));
        labels.push(u8::from(a + b + c >= 5.0));
    }
    Dataset::new(3, 3, features, labels, None).expect("valid toy data")
}

/// Deterministic toy dataset: L1 rings around the origin, labels by ring
/// parity and side. `n` instances, 2 features, 2 labels.
pub fn toy_rings(n: usize) -> Dataset {
    let mut rng = Rng::seed_from_u64(0xD2);
    let mut features = Vec::with_capacity(n * 2);
    let mut labels = Vec::with_capacity(n * 2);
    for _ in 0..n {
        let x = rng.index(13) as f64 - 6.0;
        let y = rng.index(13) as f64 - 6.0;
        let ring = (x.abs() + y.abs()) as usize / 3;
        features.extend_from_slice(&[x, y]);
        labels.push(u8::from(ring.is_multiple_of(2)));
        labels.push(u8::from(x >= 0.0));
    }
    Dataset::new(2, 2, features, labels, None).expect("valid toy data")
}

/// Random dataset on a small integer grid; duplicates and boundary ties are
/// likely on purpose.
pub fn random_grid_dataset(
    n: usize,
    num_features: usize,
    num_labels: usize,
    rng: &mut Rng,
) -> Dataset {
    let features: Vec<f64> = (0..n * num_features)
        .map(|_| rng.index(10) as f64)
        .collect();
    let labels: Vec<u8> = (0..n * num_labels).map(|_| rng.index(2) as u8).collect();
    Dataset::new(num_features, num_labels, features, labels, None).expect("valid random data")
}

/// Random fitness population for selection tests.
pub fn random_population(max_len: usize, rng: &mut Rng) -> Vec<FitnessTuple> {
    let len = 1 + rng.index(max_len);
    (0..len)
        .map(|_| FitnessTuple::new((rng.index(101) as f64) / 100.0, 1 + rng.index(30)))
        .collect()
}
