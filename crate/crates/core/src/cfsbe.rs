//! Constrained feature-space box enlargement (CFSBE).
//!
//! Given a set of consistent rules `R`, a seed instance covered by none of
//! them, and a dimension-expansion order `O`, [`enlarge_box`] computes the
//! maximal axis-aligned box that contains the seed and overlaps no rule box
//! of `R`. Different orders yield different maximal boxes.
//!
//! The procedure starts from the degenerate point box at the seed and widens
//! one dimension at a time, in `O`'s order. When dimension `d` is widened,
//! the rules that matter (the obstructors) are those whose boxes meet the
//! current box on every dimension other than `d`: an unprocessed dimension
//! meets a rule iff the rule's interval contains the seed coordinate, a
//! processed one iff the intervals strictly overlap. The new bounds on `d`
//! are the tightest obstructor bounds on each side of the seed, or infinite
//! when a side has no obstructor. Each finite output bound is therefore
//! always a bound of some rule in `R`.

use alloc::vec::Vec;
use core::fmt;

use crate::rng::Rng;
use crate::rule::{FeatureTest, HyperBox, ModelError, Rule};

#[derive(Clone, Debug, PartialEq)]
pub enum CfsbeError {
    /// The order is not a permutation of `0..dims`.
    InvalidOrder,
    OrderArity {
        expected: usize,
        actual: usize,
    },
    SeedArity {
        expected: usize,
        actual: usize,
    },
    SeedNotFinite {
        feature: usize,
    },
    RuleArity {
        rule: usize,
        expected: usize,
        actual: usize,
    },
    /// The seed must not be covered by any rule of `R`.
    SeedCovered {
        rule: usize,
    },
    InconsistentRules {
        first: usize,
        second: usize,
    },
    Model(ModelError),
}

impl fmt::Display for CfsbeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfsbeError::InvalidOrder => write!(f, "expansion order is not a permutation"),
            CfsbeError::OrderArity { expected, actual } => {
                write!(
                    f,
                    "expansion order has {actual} entries, expected {expected}"
                )
            }
            CfsbeError::SeedArity { expected, actual } => {
                write!(f, "seed has {actual} features, expected {expected}")
            }
            CfsbeError::SeedNotFinite { feature } => {
                write!(f, "seed feature {feature} is not finite")
            }
            CfsbeError::RuleArity {
                rule,
                expected,
                actual,
            } => {
                write!(
                    f,
                    "rule {rule} has {actual} dimensions, expected {expected}"
                )
            }
            CfsbeError::SeedCovered { rule } => {
                write!(f, "seed is covered by rule {rule}")
            }
            CfsbeError::InconsistentRules { first, second } => {
                write!(f, "input rules {first} and {second} are inconsistent")
            }
            CfsbeError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl From<ModelError> for CfsbeError {
    fn from(e: ModelError) -> Self {
        CfsbeError::Model(e)
    }
}

/// Permutation of the feature dimensions governing expansion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionOrder {
    order: Vec<usize>,
}

impl ExpansionOrder {
    pub fn new(order: Vec<usize>) -> Result<Self, CfsbeError> {
        let mut seen = alloc::vec![false; order.len()];
        for &d in &order {
            if d >= order.len() || seen[d] {
                return Err(CfsbeError::InvalidOrder);
            }
            seen[d] = true;
        }
        Ok(ExpansionOrder { order })
    }

    /// Uniformly random permutation of `0..dims`.
    pub fn random(dims: usize, rng: &mut Rng) -> Self {
        let mut order: Vec<usize> = (0..dims).collect();
        rng.shuffle(&mut order);
        ExpansionOrder { order }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// One widening step of the trace emitted by [`enlarge_box_traced`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionStep {
    pub dim: usize,
    pub obstructors: usize,
    pub lower: f64,
    pub upper: f64,
}

/// See the module docs. Returns the enlarged box.
pub fn enlarge_box(
    rules: &[Rule],
    seed: &[f64],
    order: &ExpansionOrder,
) -> Result<HyperBox, CfsbeError> {
    enlarge_box_traced(rules, seed, order).map(|(b, _)| b)
}

/// [`enlarge_box`] plus the per-dimension expansion trace.
pub fn enlarge_box_traced(
    rules: &[Rule],
    seed: &[f64],
    order: &ExpansionOrder,
) -> Result<(HyperBox, Vec<ExpansionStep>), CfsbeError> {
    let dims = seed.len();
    if dims == 0 {
        return Err(CfsbeError::Model(ModelError::EmptyBox));
    }
    if order.len() != dims {
        return Err(CfsbeError::OrderArity {
            expected: dims,
            actual: order.len(),
        });
    }
    for (j, &v) in seed.iter().enumerate() {
        if !v.is_finite() {
            return Err(CfsbeError::SeedNotFinite { feature: j });
        }
    }
    for (idx, r) in rules.iter().enumerate() {
        if r.antecedent().dims() != dims {
            return Err(CfsbeError::RuleArity {
                rule: idx,
                expected: dims,
                actual: r.antecedent().dims(),
            });
        }
        if r.covers(seed) {
            return Err(CfsbeError::SeedCovered { rule: idx });
        }
    }
    for i in 0..rules.len() {
        for j in i + 1..rules.len() {
            if !rules[i].consistent_with(&rules[j])? {
                return Err(CfsbeError::InconsistentRules {
                    first: i,
                    second: j,
                });
            }
        }
    }

    let mut lower = alloc::vec![f64::NEG_INFINITY; dims];
    let mut upper = alloc::vec![f64::INFINITY; dims];
    let mut processed = alloc::vec![false; dims];
    let mut trace = Vec::with_capacity(dims);

    for &dim in order.as_slice() {
        let mut new_lower = f64::NEG_INFINITY;
        let mut new_upper = f64::INFINITY;
        let mut obstructors = 0usize;

        'rules: for rule in rules {
            for e in 0..dims {
                if e == dim {
                    continue;
                }
                let t = rule.antecedent().test(e);
                let meets = if processed[e] {
                    t.lower().max(lower[e]) < t.upper().min(upper[e])
                } else {
                    t.passes(seed[e])
                };
                if !meets {
                    continue 'rules;
                }
            }
            obstructors += 1;
            let t = rule.antecedent().test(dim);
            if t.upper() <= seed[dim] {
                // obstructor lies below the seed on this dimension
                new_lower = new_lower.max(t.upper());
            } else if t.lower() > seed[dim] {
                new_upper = new_upper.min(t.lower());
            } else {
                // An obstructor containing seed[dim] would have to cover the
                // seed outright, which the precondition excludes.
                unreachable!("obstructor contains the seed coordinate");
            }
        }

        lower[dim] = new_lower;
        upper[dim] = new_upper;
        processed[dim] = true;
        trace.push(ExpansionStep {
            dim,
            obstructors,
            lower: new_lower,
            upper: new_upper,
        });
    }

    let tests = lower
        .into_iter()
        .zip(upper)
        .map(|(l, u)| FeatureTest::new(l, u))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((HyperBox::new(tests)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::Rule;
    use alloc::vec;

    fn rule_2d(f1: (f64, f64), f2: (f64, f64), consequent: &[u8]) -> Rule {
        Rule::new(
            HyperBox::new(vec![
                FeatureTest::new(f1.0, f1.1).unwrap(),
                FeatureTest::new(f2.0, f2.1).unwrap(),
            ])
            .unwrap(),
            consequent.to_vec(),
        )
        .unwrap()
    }

    fn order(dims: &[usize]) -> ExpansionOrder {
        ExpansionOrder::new(dims.to_vec()).unwrap()
    }

    #[test]
    fn empty_rule_set_yields_the_whole_space() {
        let b = enlarge_box(&[], &[3.0, -2.0, 7.0], &order(&[2, 0, 1])).unwrap();
        assert!(b.tests().iter().all(|t| t.is_full()));
    }

    #[test]
    fn expansion_order_changes_the_box() {
        // one rule at [4,7) x [5,9), seed at (2,2)
        let rules = [rule_2d((4.0, 7.0), (5.0, 9.0), &[1])];
        let seed = [2.0, 2.0];

        // f1 first: the rule never meets the seed's f2 coordinate, so f1 is
        // unobstructed; f2 is then capped at the rule's lower bound 5
        let first = enlarge_box(&rules, &seed, &order(&[0, 1])).unwrap();
        assert!(first.test(0).is_full());
        assert_eq!(first.test(1).lower(), f64::NEG_INFINITY);
        assert_eq!(first.test(1).upper(), 5.0);

        // f2 first: now f2 is unobstructed and f1 is capped at 4
        let second = enlarge_box(&rules, &seed, &order(&[1, 0])).unwrap();
        assert_eq!(second.test(0).lower(), f64::NEG_INFINITY);
        assert_eq!(second.test(0).upper(), 4.0);
        assert!(second.test(1).is_full());

        assert_ne!(first, second);
    }

    #[test]
    fn covered_seed_is_rejected() {
        let rules = [rule_2d((0.0, 10.0), (0.0, 10.0), &[1])];
        let err = enlarge_box(&rules, &[5.0, 5.0], &order(&[0, 1])).unwrap_err();
        assert_eq!(err, CfsbeError::SeedCovered { rule: 0 });
    }

    #[test]
    fn inconsistent_rules_are_rejected() {
        let rules = [
            rule_2d((0.0, 10.0), (0.0, 10.0), &[1]),
            rule_2d((5.0, 15.0), (5.0, 15.0), &[0]),
        ];
        let err = enlarge_box(&rules, &[20.0, 20.0], &order(&[0, 1])).unwrap_err();
        assert_eq!(
            err,
            CfsbeError::InconsistentRules {
                first: 0,
                second: 1
            }
        );
    }

    #[test]
    fn trace_records_each_dimension_once() {
        let rules = [rule_2d((4.0, 7.0), (5.0, 9.0), &[1])];
        let (_, trace) = enlarge_box_traced(&rules, &[2.0, 2.0], &order(&[1, 0])).unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace[0].dim, 1);
        assert_eq!(trace[0].obstructors, 0);
        assert_eq!(trace[1].dim, 0);
        assert_eq!(trace[1].obstructors, 1);
        assert_eq!(trace[1].upper, 4.0);
    }

    #[test]
    fn touching_rule_does_not_obstruct_further() {
        // rule occupies [5,9) on the only axis; the box must stop at 5 and
        // treat the shared boundary as final, not as an overlap
        let rules = [Rule::new(
            HyperBox::new(vec![FeatureTest::new(5.0, 9.0).unwrap()]).unwrap(),
            vec![1],
        )
        .unwrap()];
        let b = enlarge_box(&rules, &[1.0], &order(&[0])).unwrap();
        assert_eq!(b.test(0).upper(), 5.0);
        assert!(!b.overlaps(rules[0].antecedent()).unwrap());
    }

    #[test]
    fn order_must_be_a_permutation() {
        assert!(ExpansionOrder::new(vec![0, 0]).is_err());
        assert!(ExpansionOrder::new(vec![0, 2]).is_err());
        assert!(ExpansionOrder::new(vec![1, 0, 2]).is_ok());
    }

    #[test]
    fn random_order_is_a_permutation() {
        let mut rng = Rng::seed_from_u64(11);
        for _ in 0..20 {
            let o = ExpansionOrder::random(6, &mut rng);
            let mut sorted = o.as_slice().to_vec();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        }
    }
}
