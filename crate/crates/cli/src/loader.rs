//! Dataset and fold-split file formats.
//!
//! Datasets are UTF-8 text: one header line of comma-separated column names,
//! then one instance per line of comma-separated decimal numbers. The
//! trailing `label_count` columns are binary labels. Fold splits are CSV
//! files of `instance_index,fold_index` pairs under a fixed header.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use boxrules_core::{ColumnNames, Dataset, FoldSplit};

use crate::error::CliError;

pub const FOLD_FILE_HEADER: &str = "instance_index,fold_index";

/// Loads a dataset, treating the trailing `label_count` columns as labels.
/// Errors name the offending line and column (1-based, counting the header
/// as line 1).
pub fn load_dataset(path: &Path, label_count: usize) -> Result<Dataset, CliError> {
    if label_count == 0 {
        return Err(CliError::Validation("label count must be >= 1".into()));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Validation(format!("{}: empty file", path.display())))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    if label_count >= columns.len() {
        return Err(CliError::Validation(format!(
            "{}: label count {label_count} must be smaller than the column count {}",
            path.display(),
            columns.len()
        )));
    }
    let num_features = columns.len() - label_count;

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 2;
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(CliError::Validation(format!(
                "{}: line {line_no}: expected {} fields, found {}",
                path.display(),
                columns.len(),
                cells.len()
            )));
        }
        for (col, cell) in cells.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                CliError::Validation(format!(
                    "{}: line {line_no}, column {}: invalid numeric value '{cell}'",
                    path.display(),
                    col + 1
                ))
            })?;
            if col < num_features {
                if !value.is_finite() {
                    return Err(CliError::Validation(format!(
                        "{}: line {line_no}, column {}: non-finite feature value '{cell}'",
                        path.display(),
                        col + 1
                    )));
                }
                features.push(value);
            } else if value == 0.0 {
                labels.push(0);
            } else if value == 1.0 {
                labels.push(1);
            } else {
                return Err(CliError::Validation(format!(
                    "{}: line {line_no}, column {}: label value '{cell}' outside {{0,1}}",
                    path.display(),
                    col + 1
                )));
            }
        }
    }

    let names = ColumnNames {
        features: columns[..num_features]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        labels: columns[num_features..]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    Ok(Dataset::new(
        num_features,
        label_count,
        features,
        labels,
        Some(names),
    )?)
}

/// Writes a dataset back to the external format. Feature values use Rust's
/// shortest round-trip float formatting, so save-then-load reproduces the
/// matrices bit for bit.
pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<(), CliError> {
    let mut out = String::new();
    match dataset.names() {
        Some(names) => {
            let all: Vec<&str> = names
                .features
                .iter()
                .chain(&names.labels)
                .map(String::as_str)
                .collect();
            out.push_str(&all.join(","));
        }
        None => {
            let mut all: Vec<String> = (0..dataset.num_features())
                .map(|j| format!("f{j}"))
                .collect();
            all.extend((0..dataset.num_labels()).map(|l| format!("label{l}")));
            out.push_str(&all.join(","));
        }
    }
    out.push('\n');
    for i in 0..dataset.num_instances() {
        for (j, v) in dataset.instance(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        for l in dataset.labels_of(i) {
            let _ = write!(out, ",{l}");
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn save_fold_split(split: &FoldSplit, path: &Path) -> Result<(), CliError> {
    let mut out = String::from(FOLD_FILE_HEADER);
    out.push('\n');
    for (instance, fold) in split.assignment().iter().enumerate() {
        let _ = writeln!(out, "{instance},{fold}");
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Reads a fold split back, checking that it covers `expected_instances`
/// exactly once and satisfies the balance invariants.
pub fn load_fold_split(path: &Path, expected_instances: usize) -> Result<FoldSplit, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == FOLD_FILE_HEADER => {}
        _ => {
            return Err(CliError::Validation(format!(
                "{}: expected header '{FOLD_FILE_HEADER}'",
                path.display()
            )))
        }
    }
    let mut assignment = vec![usize::MAX; expected_instances];
    let mut fold_count = 0usize;
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 2;
        if line.is_empty() {
            continue;
        }
        let bad = || {
            CliError::Validation(format!(
                "{}: line {line_no}: expected 'instance,fold' pair, found '{line}'",
                path.display()
            ))
        };
        let (inst, fold) = line.split_once(',').ok_or_else(bad)?;
        let inst: usize = inst.trim().parse().map_err(|_| bad())?;
        let fold: usize = fold.trim().parse().map_err(|_| bad())?;
        if inst >= expected_instances {
            return Err(CliError::Validation(format!(
                "{}: line {line_no}: instance index {inst} out of range for {expected_instances} instances",
                path.display()
            )));
        }
        if assignment[inst] != usize::MAX {
            return Err(CliError::Validation(format!(
                "{}: line {line_no}: instance {inst} assigned twice",
                path.display()
            )));
        }
        assignment[inst] = fold;
        fold_count = fold_count.max(fold + 1);
    }
    if let Some(missing) = assignment.iter().position(|&f| f == usize::MAX) {
        return Err(CliError::Validation(format!(
            "{}: instance {missing} has no fold assignment",
            path.display()
        )));
    }
    Ok(FoldSplit::from_assignment(fold_count, assignment)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use boxrules_core::Rng;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_a_small_file() {
        let f = write_tmp("a,b,y\n0.5,1.5,0\n2.5,3.5,1\n4.5,5.5,0\n");
        let d = load_dataset(f.path(), 1).unwrap();
        assert_eq!(d.num_instances(), 3);
        assert_eq!(d.num_features(), 2);
        assert_eq!(d.num_labels(), 1);
        assert_eq!(d.instance(1), &[2.5, 3.5]);
        assert_eq!(d.labels_of(1), &[1]);
        assert_eq!(d.names().unwrap().labels, vec!["y"]);
    }

    #[test]
    fn label_two_is_named_with_position() {
        let f = write_tmp("a,y\n1.0,0\n2.0,2\n");
        let err = load_dataset(f.path(), 1).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("column 2"), "{msg}");
        assert!(msg.contains("'2'"), "{msg}");
    }

    #[test]
    fn malformed_row_and_bad_number_are_reported() {
        let f = write_tmp("a,b,y\n1.0,2.0,0\n1.0,0\n");
        assert!(load_dataset(f.path(), 1)
            .unwrap_err()
            .to_string()
            .contains("expected 3 fields, found 2"));

        let f = write_tmp("a,y\nfoo,0\n");
        assert!(load_dataset(f.path(), 1)
            .unwrap_err()
            .to_string()
            .contains("invalid numeric value 'foo'"));
    }

    #[test]
    fn label_count_must_leave_features() {
        let f = write_tmp("a,b\n1.0,0\n");
        assert!(load_dataset(f.path(), 2)
            .unwrap_err()
            .to_string()
            .contains("label count"));
        assert!(load_dataset(f.path(), 0).is_err());
    }

    #[test]
    fn save_load_round_trip_is_bit_identical() {
        let f = write_tmp("a,b,y\n0.1,-7.25,1\n1e-3,3.5,0\n0.30000000000000004,2.0,1\n");
        let d = load_dataset(f.path(), 1).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        save_dataset(&d, out.path()).unwrap();
        let d2 = load_dataset(out.path(), 1).unwrap();
        assert_eq!(d.feature_matrix(), d2.feature_matrix());
        assert_eq!(d.label_matrix(), d2.label_matrix());
    }

    #[test]
    fn fold_split_round_trip() {
        let d = Dataset::new(1, 1, (0..10).map(f64::from).collect(), vec![0; 10], None).unwrap();
        let split = FoldSplit::random(&d, 3, &mut Rng::seed_from_u64(4)).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_fold_split(&split, f.path()).unwrap();
        let loaded = load_fold_split(f.path(), 10).unwrap();
        assert_eq!(split, loaded);
    }

    #[test]
    fn fold_split_import_rejects_gaps_and_duplicates() {
        let f = write_tmp("instance_index,fold_index\n0,0\n0,1\n");
        assert!(load_fold_split(f.path(), 2)
            .unwrap_err()
            .to_string()
            .contains("twice"));
        let f = write_tmp("instance_index,fold_index\n0,0\n");
        assert!(load_fold_split(f.path(), 2)
            .unwrap_err()
            .to_string()
            .contains("no fold assignment"));
    }
}
