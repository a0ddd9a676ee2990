//! Survivor selection: fast non-dominated sorting plus crowding distance
//! over the two objectives (maximise F-Score, minimise rule count).

use alloc::vec::Vec;
use core::fmt;

/// Fitness of one individual: training micro-F-Score and model size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitnessTuple {
    pub fscore: f64,
    pub size: usize,
}

impl FitnessTuple {
    pub fn new(fscore: f64, size: usize) -> Self {
        debug_assert!((0.0..=1.0).contains(&fscore));
        debug_assert!(size >= 1);
        FitnessTuple { fscore, size }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nsga2Error {
    TargetExceedsPopulation { target: usize, len: usize },
    ZeroTarget,
}

impl fmt::Display for Nsga2Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nsga2Error::TargetExceedsPopulation { target, len } => {
                write!(f, "cannot select {target} survivors from {len} individuals")
            }
            Nsga2Error::ZeroTarget => write!(f, "survivor target must be >= 1"),
        }
    }
}

/// `a` dominates `b` iff it is no worse in both objectives and strictly
/// better in at least one.
pub fn dominates(a: &FitnessTuple, b: &FitnessTuple) -> bool {
    a.fscore >= b.fscore && a.size <= b.size && (a.fscore > b.fscore || a.size < b.size)
}

/// Fast non-dominated sort. Front `0` is the non-dominated set; each later
/// front is non-dominated once the earlier fronts are removed. Indices
/// within a front are ascending.
pub fn non_dominated_sort(fitness: &[FitnessTuple]) -> Vec<Vec<usize>> {
    let n = fitness.len();
    let mut dominated_by: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    let mut domination_count = alloc::vec![0usize; n];

    for i in 0..n {
        for j in i + 1..n {
            if dominates(&fitness[i], &fitness[j]) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&fitness[j], &fitness[i]) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(core::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each member of one front. Boundary members per
/// objective get infinity; interior members accumulate the normalised gap
/// between their neighbours. An objective with zero range contributes
/// nothing.
pub fn crowding_distance(front: &[FitnessTuple]) -> Vec<f64> {
    debug_assert!(!front.is_empty());
    let k = front.len();
    let mut distance = alloc::vec![0.0f64; k];

    let objectives: [&dyn Fn(&FitnessTuple) -> f64; 2] = [&|f| f.fscore, &|f| f.size as f64];
    for objective in objectives {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            objective(&front[a])
                .partial_cmp(&objective(&front[b]))
                .expect("finite objectives")
                .then(a.cmp(&b))
        });
        distance[order[0]] = f64::INFINITY;
        distance[order[k - 1]] = f64::INFINITY;
        let range = objective(&front[order[k - 1]]) - objective(&front[order[0]]);
        if range > 0.0 {
            for w in 1..k - 1 {
                let gap = objective(&front[order[w + 1]]) - objective(&front[order[w - 1]]);
                distance[order[w]] += gap / range;
            }
        }
    }
    distance
}

/// Picks exactly `target` survivors: fronts are admitted whole in order, and
/// the first front that does not fit is filtered by descending crowding
/// distance (ties go to the earlier population index). The returned indices
/// are ascending, so a full-population selection is the identity.
pub fn select_survivors(fitness: &[FitnessTuple], target: usize) -> Result<Vec<usize>, Nsga2Error> {
    if target == 0 {
        return Err(Nsga2Error::ZeroTarget);
    }
    if fitness.len() < target {
        return Err(Nsga2Error::TargetExceedsPopulation {
            target,
            len: fitness.len(),
        });
    }

    let mut chosen = Vec::with_capacity(target);
    for front in non_dominated_sort(fitness) {
        if chosen.len() + front.len() <= target {
            chosen.extend_from_slice(&front);
        } else {
            let members: Vec<FitnessTuple> = front.iter().map(|&i| fitness[i]).collect();
            let crowding = crowding_distance(&members);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| {
                crowding[b]
                    .partial_cmp(&crowding[a])
                    .expect("crowding distances are ordered")
                    .then(front[a].cmp(&front[b]))
            });
            chosen.extend(order[..target - chosen.len()].iter().map(|&p| front[p]));
        }
        if chosen.len() == target {
            break;
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}
