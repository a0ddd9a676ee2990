//! Pareto compromise curves: fitness matrices from several runs are row-wise
//! aligned, averaged elementwise, converted to (interpretability, F-Score)
//! pairs, and reduced to their non-dominated rows.

use std::fmt::Write as _;

use boxrules_core::FitnessTuple;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParetoRow {
    pub interpretability: f64,
    pub fscore: f64,
}

pub const PARETO_CSV_HEADER: &str = "interpretability,fscore";

/// Averages the populations elementwise after sorting each by (F-Score
/// descending, size ascending), substitutes model size by its inverse, and
/// keeps the non-dominated rows, sorted by ascending interpretability.
pub fn averaged_front(populations: &[Vec<FitnessTuple>]) -> Result<Vec<ParetoRow>, CliError> {
    if populations.is_empty() {
        return Err(CliError::Validation("no populations given".into()));
    }
    let rows = populations[0].len();
    if rows == 0 {
        return Err(CliError::Validation("empty population".into()));
    }
    for (i, p) in populations.iter().enumerate() {
        if p.len() != rows {
            return Err(CliError::Validation(format!(
                "population {i} has {} rows, expected {rows}; matrices must align",
                p.len()
            )));
        }
    }

    let mut fscore_sums = vec![0.0f64; rows];
    let mut size_sums = vec![0.0f64; rows];
    for population in populations {
        let mut sorted = population.clone();
        sorted.sort_by(|a, b| {
            b.fscore
                .partial_cmp(&a.fscore)
                .expect("finite scores")
                .then(a.size.cmp(&b.size))
        });
        for (row, fit) in sorted.iter().enumerate() {
            fscore_sums[row] += fit.fscore;
            size_sums[row] += fit.size as f64;
        }
    }
    let count = populations.len() as f64;
    let averaged: Vec<ParetoRow> = (0..rows)
        .map(|row| ParetoRow {
            // 1 / mean size
            interpretability: count / size_sums[row],
            fscore: fscore_sums[row] / count,
        })
        .collect();

    let mut front: Vec<ParetoRow> = averaged
        .iter()
        .copied()
        .filter(|candidate| {
            !averaged.iter().any(|other| {
                other.fscore >= candidate.fscore
                    && other.interpretability >= candidate.interpretability
                    && (other.fscore > candidate.fscore
                        || other.interpretability > candidate.interpretability)
            })
        })
        .collect();
    front.sort_by(|a, b| {
        a.interpretability
            .partial_cmp(&b.interpretability)
            .expect("finite values")
            .then(a.fscore.partial_cmp(&b.fscore).expect("finite values"))
    });
    Ok(front)
}

pub fn pareto_csv(rows: &[ParetoRow]) -> String {
    let mut out = String::from(PARETO_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{},{}", row.interpretability, row.fscore);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(fscore: f64, size: usize) -> FitnessTuple {
        FitnessTuple::new(fscore, size)
    }

    #[test]
    fn single_population_keeps_its_own_front() {
        let population = vec![fit(0.9, 5), fit(0.8, 3), fit(0.7, 10)];
        let front = averaged_front(&[population]).unwrap();
        // (0.7, 10) is dominated after inversion as well
        assert_eq!(front.len(), 2);
        assert!((front[0].interpretability - 0.2).abs() < 1e-12);
        assert!((front[0].fscore - 0.9).abs() < 1e-12);
        assert!((front[1].interpretability - 1.0 / 3.0).abs() < 1e-12);
        assert!((front[1].fscore - 0.8).abs() < 1e-12);
    }

    #[test]
    fn identical_archives_average_to_the_same_front() {
        let population = vec![fit(0.6, 2), fit(0.4, 1), fit(0.9, 7)];
        let one = averaged_front(std::slice::from_ref(&population)).unwrap();
        let two = averaged_front(&[population.clone(), population]).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn three_hand_built_populations() {
        // sorted by (fscore desc, size asc), the row-wise averages are
        // hand-computed below
        let a = vec![fit(0.9, 4), fit(0.5, 2), fit(0.1, 1)];
        let b = vec![fit(0.7, 6), fit(0.3, 2), fit(0.3, 4)];
        let c = vec![fit(0.8, 5), fit(0.8, 7), fit(0.2, 1)];
        // row 0: f = (0.9+0.7+0.8)/3 = 0.8,  size = (4+6+5)/3 = 5
        // row 1: f = (0.5+0.3+0.8)/3 = 0.5333..., size = (2+2+7)/3 = 11/3
        //   (b's ties sort 0.3@2 before 0.3@4)
        // row 2: f = (0.1+0.3+0.2)/3 = 0.2, size = (1+4+1)/3 = 2
        let front = averaged_front(&[a, b, c]).unwrap();
        // after inversion: rows (0.2, 0.8), (3/11, 0.5333), (0.5, 0.2) are
        // mutually non-dominated
        assert_eq!(front.len(), 3);
        assert!((front[0].interpretability - 0.2).abs() < 1e-12);
        assert!((front[0].fscore - 0.8).abs() < 1e-12);
        assert!((front[1].interpretability - 3.0 / 11.0).abs() < 1e-12);
        assert!((front[1].fscore - (0.5 + 0.3 + 0.8) / 3.0).abs() < 1e-12);
        assert!((front[2].interpretability - 0.5).abs() < 1e-12);
        assert!((front[2].fscore - 0.2).abs() < 1e-12);
    }

    #[test]
    fn mismatched_population_sizes_are_rejected() {
        let err = averaged_front(&[vec![fit(0.5, 1)], vec![fit(0.5, 1), fit(0.4, 2)]]).unwrap_err();
        assert!(err.to_string().contains("matrices must align"));
    }

    #[test]
    fn csv_is_header_plus_rows() {
        let rows = vec![
            ParetoRow {
                interpretability: 0.25,
                fscore: 0.75,
            },
            ParetoRow {
                interpretability: 1.0,
                fscore: 0.5,
            },
        ];
        assert_eq!(
            pareto_csv(&rows),
            "interpretability,fscore\n0.25,0.75\n1,0.5\n"
        );
    }
}
