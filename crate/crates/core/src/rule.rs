//! Feature tests, boxes, rules, and rule-set models.
//!
//! A [`FeatureTest`] is a half-open interval `[lower, upper)` over one
//! feature; `lower` may be `-inf` and `upper` may be `+inf`. A [`Rule`] holds
//! one test per feature (full width) plus a binary consequent. An
//! [`Individual`] is a non-empty set of rules whose boxes are pairwise
//! disjoint, which is what makes prediction order-free: at most one rule can
//! cover any instance.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    /// `lower < upper` violated (the interval admits no value).
    InvalidInterval {
        lower: f64,
        upper: f64,
    },
    EmptyBox,
    EmptyConsequent,
    NonBinaryConsequent {
        index: usize,
    },
    EmptyModel,
    /// Two boxes (or a box and an instance) disagree on feature count.
    DimensionMismatch {
        left: usize,
        right: usize,
    },
    LabelArityMismatch {
        left: usize,
        right: usize,
    },
    /// Two rules overlap with different consequents.
    InconsistentRules {
        first: usize,
        second: usize,
    },
    /// Prediction found two covering rules with different consequents.
    /// Engine-built models can never trigger this.
    ConflictingCoverage {
        first: usize,
        second: usize,
    },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidInterval { lower, upper } => {
                write!(f, "invalid interval [{lower}, {upper})")
            }
            ModelError::EmptyBox => write!(f, "box has no dimensions"),
            ModelError::EmptyConsequent => write!(f, "consequent has no labels"),
            ModelError::NonBinaryConsequent { index } => {
                write!(f, "consequent entry {index} outside {{0,1}}")
            }
            ModelError::EmptyModel => write!(f, "model has no rules"),
            ModelError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            ModelError::LabelArityMismatch { left, right } => {
                write!(f, "label arity mismatch: {left} vs {right}")
            }
            ModelError::InconsistentRules { first, second } => {
                write!(
                    f,
                    "rules {first} and {second} overlap with different consequents"
                )
            }
            ModelError::ConflictingCoverage { first, second } => {
                write!(
                    f,
                    "rules {first} and {second} both cover the instance with different consequents"
                )
            }
        }
    }
}

/// Half-open interval test `lower <= value < upper` over one feature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureTest {
    lower: f64,
    upper: f64,
}

impl FeatureTest {
    pub fn new(lower: f64, upper: f64) -> Result<Self, ModelError> {
        // NaN bounds compare as incomparable and are rejected here too
        if lower.partial_cmp(&upper) != Some(core::cmp::Ordering::Less) {
            return Err(ModelError::InvalidInterval { lower, upper });
        }
        Ok(FeatureTest { lower, upper })
    }

    /// The tautological test `[-inf, +inf)`.
    pub fn full() -> Self {
        FeatureTest {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn passes(&self, value: f64) -> bool {
        self.lower <= value && value < self.upper
    }

    /// Strict interval overlap. Touching intervals (`a.upper == b.lower`) do
    /// not overlap, which is what lets neighbouring rules share a boundary.
    pub fn overlaps(&self, other: &FeatureTest) -> bool {
        self.lower.max(other.lower) < self.upper.min(other.upper)
    }

    pub fn is_full(&self) -> bool {
        self.lower == f64::NEG_INFINITY && self.upper == f64::INFINITY
    }
}

/// Axis-aligned box: one [`FeatureTest`] per feature.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperBox {
    tests: Vec<FeatureTest>,
}

impl HyperBox {
    pub fn new(tests: Vec<FeatureTest>) -> Result<Self, ModelError> {
        if tests.is_empty() {
            return Err(ModelError::EmptyBox);
        }
        Ok(HyperBox { tests })
    }

    /// Box covering the whole feature space.
    pub fn full(dims: usize) -> Self {
        debug_assert!(dims > 0);
        HyperBox {
            tests: alloc::vec![FeatureTest::full(); dims],
        }
    }

    pub fn dims(&self) -> usize {
        self.tests.len()
    }

    pub fn tests(&self) -> &[FeatureTest] {
        &self.tests
    }

    pub fn test(&self, dim: usize) -> &FeatureTest {
        &self.tests[dim]
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        debug_assert_eq!(self.tests.len(), point.len());
        self.tests.iter().zip(point).all(|(t, &v)| t.passes(v))
    }

    /// True iff the boxes intersect in every dimension.
    pub fn overlaps(&self, other: &HyperBox) -> Result<bool, ModelError> {
        if self.tests.len() != other.tests.len() {
            return Err(ModelError::DimensionMismatch {
                left: self.tests.len(),
                right: other.tests.len(),
            });
        }
        Ok(self
            .tests
            .iter()
            .zip(&other.tests)
            .all(|(a, b)| a.overlaps(b)))
    }
}

/// One classification rule: a full-width box plus a binary label vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    antecedent: HyperBox,
    consequent: Vec<u8>,
}

impl Rule {
    pub fn new(antecedent: HyperBox, consequent: Vec<u8>) -> Result<Self, ModelError> {
        if consequent.is_empty() {
            return Err(ModelError::EmptyConsequent);
        }
        if let Some(bad) = consequent.iter().position(|&b| b > 1) {
            return Err(ModelError::NonBinaryConsequent { index: bad });
        }
        Ok(Rule {
            antecedent,
            consequent,
        })
    }

    pub fn antecedent(&self) -> &HyperBox {
        &self.antecedent
    }

    pub fn consequent(&self) -> &[u8] {
        &self.consequent
    }

    pub fn covers(&self, instance: &[f64]) -> bool {
        self.antecedent.contains(instance)
    }

    /// Two rules are consistent when their consequents are equal or their
    /// boxes do not overlap.
    pub fn consistent_with(&self, other: &Rule) -> Result<bool, ModelError> {
        if self.consequent.len() != other.consequent.len() {
            return Err(ModelError::LabelArityMismatch {
                left: self.consequent.len(),
                right: other.consequent.len(),
            });
        }
        if self.consequent == other.consequent {
            return Ok(true);
        }
        Ok(!self.antecedent.overlaps(&other.antecedent)?)
    }

    /// Reporting-time view that drops tautological tests and renders
    /// half-bounded ones one-sided. Evolution always keeps the full-width
    /// antecedent; this never changes what the rule covers.
    pub fn simplify(&self) -> SimplifiedRule {
        let conditions = self
            .antecedent
            .tests
            .iter()
            .enumerate()
            .filter_map(|(dim, t)| {
                let lower_open = t.lower == f64::NEG_INFINITY;
                let upper_open = t.upper == f64::INFINITY;
                match (lower_open, upper_open) {
                    (true, true) => None,
                    (true, false) => Some((dim, SimplifiedTest::Below { upper: t.upper })),
                    (false, true) => Some((dim, SimplifiedTest::AtLeast { lower: t.lower })),
                    (false, false) => Some((
                        dim,
                        SimplifiedTest::Within {
                            lower: t.lower,
                            upper: t.upper,
                        },
                    )),
                }
            })
            .collect();
        SimplifiedRule {
            conditions,
            consequent: self.consequent.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SimplifiedTest {
    Within { lower: f64, upper: f64 },
    AtLeast { lower: f64 },
    Below { upper: f64 },
}

impl SimplifiedTest {
    pub fn passes(&self, value: f64) -> bool {
        match *self {
            SimplifiedTest::Within { lower, upper } => lower <= value && value < upper,
            SimplifiedTest::AtLeast { lower } => lower <= value,
            SimplifiedTest::Below { upper } => value < upper,
        }
    }
}

/// Simplified rendering of a rule; see [`Rule::simplify`].
#[derive(Clone, Debug, PartialEq)]
pub struct SimplifiedRule {
    conditions: Vec<(usize, SimplifiedTest)>,
    consequent: Vec<u8>,
}

impl SimplifiedRule {
    pub fn conditions(&self) -> &[(usize, SimplifiedTest)] {
        &self.conditions
    }

    pub fn consequent(&self) -> &[u8] {
        &self.consequent
    }

    pub fn covers(&self, instance: &[f64]) -> bool {
        self.conditions
            .iter()
            .all(|(dim, t)| t.passes(instance[*dim]))
    }

    /// Text form, e.g. `IF f0 in [1, 4) AND f2 < 9 THEN [0, 1]`. With names
    /// supplied, feature indexes are replaced and the consequent becomes the
    /// set of assigned label names.
    pub fn render(
        &self,
        feature_names: Option<&[String]>,
        label_names: Option<&[String]>,
    ) -> String {
        let mut out = String::from("IF ");
        if self.conditions.is_empty() {
            out.push_str("always");
        } else {
            for (pos, (dim, test)) in self.conditions.iter().enumerate() {
                if pos > 0 {
                    out.push_str(" AND ");
                }
                match feature_names.and_then(|n| n.get(*dim)) {
                    Some(name) => out.push_str(name),
                    None => {
                        let _ = write!(out, "f{dim}");
                    }
                }
                match test {
                    SimplifiedTest::Within { lower, upper } => {
                        let _ = write!(out, " in [{lower}, {upper})");
                    }
                    SimplifiedTest::AtLeast { lower } => {
                        let _ = write!(out, " >= {lower}");
                    }
                    SimplifiedTest::Below { upper } => {
                        let _ = write!(out, " < {upper}");
                    }
                }
            }
        }
        out.push_str(" THEN ");
        match label_names {
            Some(names) => {
                out.push('{');
                let mut first = true;
                for (i, &bit) in self.consequent.iter().enumerate() {
                    if bit == 1 {
                        if !first {
                            out.push_str(", ");
                        }
                        first = false;
                        out.push_str(names.get(i).map(String::as_str).unwrap_or("?"));
                    }
                }
                out.push('}');
            }
            None => {
                out.push('[');
                for (i, &bit) in self.consequent.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{bit}");
                }
                out.push(']');
            }
        }
        out
    }
}

impl fmt::Display for SimplifiedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None, None))
    }
}

/// Fallback consequent for instances covered by no rule. Carries no
/// antecedent and never counts towards model size.
#[derive(Clone, Debug, PartialEq)]
pub struct DefaultRule {
    consequent: Vec<u8>,
}

impl DefaultRule {
    pub fn new(consequent: Vec<u8>) -> Result<Self, ModelError> {
        if consequent.is_empty() {
            return Err(ModelError::EmptyConsequent);
        }
        if let Some(bad) = consequent.iter().position(|&b| b > 1) {
            return Err(ModelError::NonBinaryConsequent { index: bad });
        }
        Ok(DefaultRule { consequent })
    }

    pub fn consequent(&self) -> &[u8] {
        &self.consequent
    }
}

/// A complete classification model: a non-empty set of mutually consistent
/// rules. Everything the engine produces satisfies the stronger property
/// that rule boxes are pairwise disjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    rules: Vec<Rule>,
}

impl Individual {
    /// Validating constructor for externally supplied rule sets: non-empty,
    /// uniform arities, pairwise consistent.
    pub fn from_rules(rules: Vec<Rule>) -> Result<Self, ModelError> {
        if rules.is_empty() {
            return Err(ModelError::EmptyModel);
        }
        let dims = rules[0].antecedent.dims();
        let labels = rules[0].consequent.len();
        for r in &rules[1..] {
            if r.antecedent.dims() != dims {
                return Err(ModelError::DimensionMismatch {
                    left: dims,
                    right: r.antecedent.dims(),
                });
            }
            if r.consequent.len() != labels {
                return Err(ModelError::LabelArityMismatch {
                    left: labels,
                    right: r.consequent.len(),
                });
            }
        }
        for i in 0..rules.len() {
            for j in i + 1..rules.len() {
                if !rules[i].consistent_with(&rules[j])? {
                    return Err(ModelError::InconsistentRules {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(Individual { rules })
    }

    /// Constructor for engine-built rule sets, which are disjoint by
    /// construction. The disjointness is asserted, not re-derived.
    pub(crate) fn from_disjoint_rules(rules: Vec<Rule>) -> Self {
        debug_assert!(!rules.is_empty());
        debug_assert!(
            {
                let mut ok = true;
                'outer: for i in 0..rules.len() {
                    for j in i + 1..rules.len() {
                        if rules[i]
                            .antecedent
                            .overlaps(&rules[j].antecedent)
                            .unwrap_or(true)
                        {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
                ok
            },
            "engine produced overlapping rule boxes"
        );
        Individual { rules }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Model size: the rule count.
    pub fn size(&self) -> usize {
        self.rules.len()
    }

    /// True iff every unordered pair of rules is consistent.
    pub fn is_consistent(&self) -> bool {
        for i in 0..self.rules.len() {
            for j in i + 1..self.rules.len() {
                if !self.rules[i]
                    .consistent_with(&self.rules[j])
                    .unwrap_or(false)
                {
                    return false;
                }
            }
        }
        true
    }

    /// Predicts the label vector for one instance.
    ///
    /// All covering rules are inspected: they must agree on the consequent
    /// (engine-built models have at most one). No covering rule means the
    /// default applies.
    pub fn predict<'a>(
        &'a self,
        default: &'a DefaultRule,
        instance: &[f64],
    ) -> Result<&'a [u8], ModelError> {
        let mut hit: Option<usize> = None;
        for (idx, rule) in self.rules.iter().enumerate() {
            if rule.covers(instance) {
                match hit {
                    None => hit = Some(idx),
                    Some(first) => {
                        if self.rules[first].consequent != rule.consequent {
                            return Err(ModelError::ConflictingCoverage { first, second: idx });
                        }
                    }
                }
            }
        }
        Ok(match hit {
            Some(idx) => &self.rules[idx].consequent,
            None => &default.consequent,
        })
    }
}
