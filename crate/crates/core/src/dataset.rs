//! In-memory datasets: a continuous feature matrix, a binary label matrix,
//! and per-feature sorted distinct-value indexes used for boundary snapping.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rng::Rng;

/// Optional column names carried along for reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnNames {
    pub features: Vec<String>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetError {
    NoInstances,
    NoFeatures,
    NoLabels,
    /// Feature buffer length is not `num_instances * num_features`.
    FeatureShape {
        len: usize,
        num_features: usize,
    },
    /// Label buffer length does not match the instance count.
    LabelShape {
        expected: usize,
        actual: usize,
    },
    NonFiniteFeature {
        instance: usize,
        feature: usize,
    },
    NonBinaryLabel {
        instance: usize,
        label: usize,
    },
    NameCount {
        expected: usize,
        actual: usize,
    },
    InvalidFoldCount {
        fold_count: usize,
        num_instances: usize,
    },
    /// A fold assignment that breaks the balanced-partition invariants.
    InvalidAssignment {
        reason: &'static str,
    },
    IndexOutOfRange {
        index: usize,
        len: usize,
    },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::NoInstances => write!(f, "dataset has no instances"),
            DatasetError::NoFeatures => write!(f, "dataset has no feature columns"),
            DatasetError::NoLabels => write!(f, "dataset has no label columns"),
            DatasetError::FeatureShape { len, num_features } => write!(
                f,
                "feature buffer of length {len} is not a multiple of {num_features} features"
            ),
            DatasetError::LabelShape { expected, actual } => {
                write!(f, "label buffer length {actual}, expected {expected}")
            }
            DatasetError::NonFiniteFeature { instance, feature } => {
                write!(
                    f,
                    "non-finite feature value at instance {instance}, feature {feature}"
                )
            }
            DatasetError::NonBinaryLabel { instance, label } => {
                write!(
                    f,
                    "label value outside {{0,1}} at instance {instance}, label {label}"
                )
            }
            DatasetError::NameCount { expected, actual } => {
                write!(f, "{actual} column names given, expected {expected}")
            }
            DatasetError::InvalidFoldCount {
                fold_count,
                num_instances,
            } => write!(
                f,
                "fold count {fold_count} invalid for {num_instances} instances"
            ),
            DatasetError::InvalidAssignment { reason } => {
                write!(f, "invalid fold assignment: {reason}")
            }
            DatasetError::IndexOutOfRange { index, len } => {
                write!(f, "instance index {index} out of range for {len} instances")
            }
        }
    }
}

/// Immutable dataset: `num_instances x num_features` continuous features
/// (row-major) plus `num_instances x num_labels` binary labels.
///
/// Construction validates everything once; afterwards the dataset is safe to
/// share read-only across any number of evaluation workers.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<u8>,
    num_instances: usize,
    num_features: usize,
    num_labels: usize,
    feature_values: Vec<Vec<f64>>,
    names: Option<ColumnNames>,
}

impl Dataset {
    pub fn new(
        num_features: usize,
        num_labels: usize,
        features: Vec<f64>,
        labels: Vec<u8>,
        names: Option<ColumnNames>,
    ) -> Result<Self, DatasetError> {
        if num_features == 0 {
            return Err(DatasetError::NoFeatures);
        }
        if num_labels == 0 {
            return Err(DatasetError::NoLabels);
        }
        if features.is_empty() {
            return Err(DatasetError::NoInstances);
        }
        if !features.len().is_multiple_of(num_features) {
            return Err(DatasetError::FeatureShape {
                len: features.len(),
                num_features,
            });
        }
        let num_instances = features.len() / num_features;
        if labels.len() != num_instances * num_labels {
            return Err(DatasetError::LabelShape {
                expected: num_instances * num_labels,
                actual: labels.len(),
            });
        }
        for (pos, &v) in features.iter().enumerate() {
            if !v.is_finite() {
                return Err(DatasetError::NonFiniteFeature {
                    instance: pos / num_features,
                    feature: pos % num_features,
                });
            }
        }
        for (pos, &l) in labels.iter().enumerate() {
            if l > 1 {
                return Err(DatasetError::NonBinaryLabel {
                    instance: pos / num_labels,
                    label: pos % num_labels,
                });
            }
        }
        if let Some(n) = &names {
            if n.features.len() != num_features {
                return Err(DatasetError::NameCount {
                    expected: num_features,
                    actual: n.features.len(),
                });
            }
            if n.labels.len() != num_labels {
                return Err(DatasetError::NameCount {
                    expected: num_labels,
                    actual: n.labels.len(),
                });
            }
        }

        let mut feature_values = Vec::with_capacity(num_features);
        for j in 0..num_features {
            let mut column: Vec<f64> = (0..num_instances)
                .map(|i| features[i * num_features + j])
                .collect();
            column.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
            column.dedup();
            feature_values.push(column);
        }

        Ok(Dataset {
            features,
            labels,
            num_instances,
            num_features,
            num_labels,
            feature_values,
            names,
        })
    }

    pub fn num_instances(&self) -> usize {
        self.num_instances
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    /// Feature row of one instance.
    pub fn instance(&self, i: usize) -> &[f64] {
        &self.features[i * self.num_features..(i + 1) * self.num_features]
    }

    /// Label row of one instance.
    pub fn labels_of(&self, i: usize) -> &[u8] {
        &self.labels[i * self.num_labels..(i + 1) * self.num_labels]
    }

    /// Sorted distinct values occurring in feature column `j`.
    pub fn feature_values(&self, j: usize) -> &[f64] {
        &self.feature_values[j]
    }

    /// Smallest distinct value of feature `j` strictly greater than `value`,
    /// if any.
    pub fn next_value_above(&self, j: usize, value: f64) -> Option<f64> {
        let vals = &self.feature_values[j];
        let idx = vals.partition_point(|&v| v <= value);
        vals.get(idx).copied()
    }

    /// (min, max) of feature column `j`.
    pub fn feature_range(&self, j: usize) -> (f64, f64) {
        let vals = &self.feature_values[j];
        (vals[0], vals[vals.len() - 1])
    }

    pub fn names(&self) -> Option<&ColumnNames> {
        self.names.as_ref()
    }

    /// New dataset holding only the given instances. Distinct-value indexes
    /// are recomputed from the subset, so rule bounds snapped on a training
    /// partition only ever use values present in that partition.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset, DatasetError> {
        let mut features = Vec::with_capacity(indices.len() * self.num_features);
        let mut labels = Vec::with_capacity(indices.len() * self.num_labels);
        for &i in indices {
            if i >= self.num_instances {
                return Err(DatasetError::IndexOutOfRange {
                    index: i,
                    len: self.num_instances,
                });
            }
            features.extend_from_slice(self.instance(i));
            labels.extend_from_slice(self.labels_of(i));
        }
        Dataset::new(
            self.num_features,
            self.num_labels,
            features,
            labels,
            self.names.clone(),
        )
    }

    pub fn feature_matrix(&self) -> &[f64] {
        &self.features
    }

    pub fn label_matrix(&self) -> &[u8] {
        &self.labels
    }
}

/// Assignment of every instance to one of `fold_count` folds, with fold
/// sizes differing by at most one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldSplit {
    fold_count: usize,
    assignment: Vec<usize>,
}

impl FoldSplit {
    /// Random balanced split: a shuffled permutation of the instances is
    /// dealt round-robin into the folds. Deterministic given the rng state.
    pub fn random(
        dataset: &Dataset,
        fold_count: usize,
        rng: &mut Rng,
    ) -> Result<Self, DatasetError> {
        let n = dataset.num_instances();
        if fold_count == 0 || fold_count > n {
            return Err(DatasetError::InvalidFoldCount {
                fold_count,
                num_instances: n,
            });
        }
        let mut perm: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut perm);
        let mut assignment = alloc::vec![0usize; n];
        for (pos, &inst) in perm.iter().enumerate() {
            assignment[inst] = pos % fold_count;
        }
        Ok(FoldSplit {
            fold_count,
            assignment,
        })
    }

    /// Builds a split from an explicit assignment, checking the balance
    /// invariants.
    pub fn from_assignment(
        fold_count: usize,
        assignment: Vec<usize>,
    ) -> Result<Self, DatasetError> {
        if fold_count == 0 || assignment.is_empty() {
            return Err(DatasetError::InvalidAssignment {
                reason: "empty split",
            });
        }
        let mut sizes = alloc::vec![0usize; fold_count];
        for &f in &assignment {
            if f >= fold_count {
                return Err(DatasetError::InvalidAssignment {
                    reason: "fold index out of range",
                });
            }
            sizes[f] += 1;
        }
        let min = *sizes.iter().min().expect("fold_count > 0");
        let max = *sizes.iter().max().expect("fold_count > 0");
        if min == 0 {
            return Err(DatasetError::InvalidAssignment {
                reason: "empty fold",
            });
        }
        if max - min > 1 {
            return Err(DatasetError::InvalidAssignment {
                reason: "fold sizes differ by more than one",
            });
        }
        Ok(FoldSplit {
            fold_count,
            assignment,
        })
    }

    pub fn fold_count(&self) -> usize {
        self.fold_count
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0usize; self.fold_count];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }

    /// (train, test) instance indices for one fold, both ascending.
    pub fn train_test_indices(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.assignment.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tiny() -> Dataset {
        // 3 instances, 2 features, 1 label
        Dataset::new(
            2,
            1,
            vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            vec![0, 1, 0],
            None,
        )
        .unwrap()
    }

    #[test]
    fn direct_construction() {
        let d = tiny();
        assert_eq!(d.num_instances(), 3);
        assert_eq!(d.num_features(), 2);
        assert_eq!(d.num_labels(), 1);
        assert_eq!(d.instance(1), &[2.0, 3.0]);
        assert_eq!(d.labels_of(1), &[1]);
    }

    #[test]
    fn rejects_non_binary_label() {
        let err = Dataset::new(1, 1, vec![0.0, 1.0], vec![0, 2], None).unwrap_err();
        assert_eq!(
            err,
            DatasetError::NonBinaryLabel {
                instance: 1,
                label: 0
            }
        );
    }

    #[test]
    fn rejects_non_finite_feature() {
        let err = Dataset::new(2, 1, vec![0.0, f64::NAN], vec![0], None).unwrap_err();
        assert_eq!(
            err,
            DatasetError::NonFiniteFeature {
                instance: 0,
                feature: 1
            }
        );
    }

    #[test]
    fn feature_values_sorted_distinct_and_complete() {
        let d = Dataset::new(1, 1, vec![3.0, 1.0, 3.0, 2.0], vec![0, 0, 1, 1], None).unwrap();
        assert_eq!(d.feature_values(0), &[1.0, 2.0, 3.0]);
        for i in 0..d.num_instances() {
            let v = d.instance(i)[0];
            assert!(d
                .feature_values(0)
                .binary_search_by(|x| x.partial_cmp(&v).unwrap())
                .is_ok());
        }
        assert_eq!(d.next_value_above(0, 1.0), Some(2.0));
        assert_eq!(d.next_value_above(0, 2.5), Some(3.0));
        assert_eq!(d.next_value_above(0, 3.0), None);
    }

    fn n_instance_dataset(n: usize) -> Dataset {
        Dataset::new(1, 1, (0..n).map(|i| i as f64).collect(), vec![0; n], None).unwrap()
    }

    #[test]
    fn folds_of_one_each() {
        let d = n_instance_dataset(10);
        let mut rng = Rng::seed_from_u64(0);
        let split = FoldSplit::random(&d, 10, &mut rng).unwrap();
        assert!(split.fold_sizes().iter().all(|&s| s == 1));
    }

    #[test]
    fn eleven_into_ten_folds() {
        let d = n_instance_dataset(11);
        let mut rng = Rng::seed_from_u64(0);
        let split = FoldSplit::random(&d, 10, &mut rng).unwrap();
        let mut sizes = split.fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 2]);
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let d = n_instance_dataset(37);
        let a = FoldSplit::random(&d, 5, &mut Rng::seed_from_u64(9)).unwrap();
        let b = FoldSplit::random(&d, 5, &mut Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn split_covers_every_instance_once() {
        let d = n_instance_dataset(23);
        let split = FoldSplit::random(&d, 4, &mut Rng::seed_from_u64(1)).unwrap();
        assert_eq!(split.assignment().len(), 23);
        let (train, test) = split.train_test_indices(2);
        let mut all: Vec<usize> = train.into_iter().chain(test).collect();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
    }

    #[test]
    fn too_many_folds_is_an_error() {
        let d = n_instance_dataset(5);
        let err = FoldSplit::random(&d, 6, &mut Rng::seed_from_u64(0)).unwrap_err();
        assert_eq!(
            err,
            DatasetError::InvalidFoldCount {
                fold_count: 6,
                num_instances: 5
            }
        );
    }

    #[test]
    fn assignment_validation() {
        assert!(FoldSplit::from_assignment(2, vec![0, 1, 0]).is_ok());
        // empty fold
        assert!(FoldSplit::from_assignment(3, vec![0, 1, 0]).is_err());
        // unbalanced
        assert!(FoldSplit::from_assignment(2, vec![0, 0, 0, 1]).is_err());
    }

    #[test]
    fn subset_recomputes_value_index() {
        let d = Dataset::new(1, 1, vec![1.0, 5.0, 9.0], vec![0, 1, 0], None).unwrap();
        let s = d.subset(&[0, 2]).unwrap();
        assert_eq!(s.feature_values(0), &[1.0, 9.0]);
        assert_eq!(s.labels_of(1), &[0]);
    }
}
