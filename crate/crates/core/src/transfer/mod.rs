//! Minimum-distance transfer of drones between two placements.
//!
//! Sources are the DBS positions at time `t`, targets those at `t + 1`. A
//! drone can only fly to a target within `speed * time_budget`. The plan
//! matches as many sources to targets as reachability allows and, among
//! those matchings, minimises the summed flight distance. Unmatched sources
//! are retired and unmatched targets are served by freshly launched drones.

mod hungarian;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Norm, Point};
use crate::placement::Placement;

use hungarian::{assign_square, LexCost};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferProblem {
    pub sources: Vec<Point>,
    pub targets: Vec<Point>,
    /// Drone speed, m/s.
    pub speed: f64,
    /// Time available for the move, s.
    pub time_budget: f64,
    #[serde(default = "default_move_norm")]
    pub move_norm: Norm,
}

fn default_move_norm() -> Norm {
    Norm::L2
}

impl TransferProblem {
    pub fn validate(&self) -> Result<()> {
        if self.sources.is_empty() || self.targets.is_empty() {
            return Err(Error::param("sources/targets", "both sides need at least one position"));
        }
        if !(self.speed.is_finite() && self.speed > 0.0) {
            return Err(Error::param("speed", "must be > 0"));
        }
        if !(self.time_budget.is_finite() && self.time_budget > 0.0) {
            return Err(Error::param("time_budget", "must be > 0"));
        }
        Ok(())
    }

    pub fn reach(&self) -> f64 {
        self.speed * self.time_budget
    }
}

/// Pairwise move distances; `None` marks unreachable pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Option<f64>>,
}

impl CostMatrix {
    pub fn from_rows(rows: Vec<Vec<Option<f64>>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged cost matrix");
        CostMatrix {
            rows: n,
            cols: m,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i * self.cols + j]
    }
}

pub fn build_cost_matrix(problem: &TransferProblem) -> Result<CostMatrix> {
    problem.validate()?;
    let reach = problem.reach();
    let entries = problem
        .sources
        .iter()
        .flat_map(|s| {
            problem.targets.iter().map(move |t| {
                let d = s.distance(t, problem.move_norm);
                (d <= reach).then_some(d)
            })
        })
        .collect();
    Ok(CostMatrix {
        rows: problem.sources.len(),
        cols: problem.targets.len(),
        entries,
    })
}

/// One-to-one transfer between sources and targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferPlan {
    /// `(source, target, distance)`, ascending by source.
    pub matches: Vec<(usize, usize, f64)>,
    pub retired: Vec<usize>,
    pub launched: Vec<usize>,
    #[serde(rename = "total_cost_m")]
    pub total_cost: f64,
}

/// Optimum of a sub-problem: number of reachable pairs matched, their total
/// distance, and the row -> column matching.
struct SubOptimum {
    matched: usize,
    dist: f64,
}

fn sub_optimum(costs: &CostMatrix, rows: &[usize], cols: &[usize]) -> SubOptimum {
    let n = rows.len().max(cols.len());
    if n == 0 || rows.is_empty() || cols.is_empty() {
        return SubOptimum { matched: 0, dist: 0.0 };
    }
    let cell = |a: usize, b: usize| match (rows.get(a), cols.get(b)) {
        (Some(&i), Some(&j)) => costs.get(i, j),
        _ => None,
    };
    let assignment = assign_square(n, |a, b| match cell(a, b) {
        Some(d) => LexCost { penalty: 0, dist: d },
        None => LexCost { penalty: 1, dist: 0.0 },
    });
    let mut matched = 0;
    let mut dist = 0.0;
    for (a, &b) in assignment.iter().enumerate() {
        if let Some(d) = cell(a, b) {
            matched += 1;
            dist += d;
        }
    }
    SubOptimum { matched, dist }
}

fn same_cost(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Maximum-cardinality, minimum-distance matching over reachable pairs.
///
/// Among cost-equal optima the lexicographically smallest match list is
/// returned: sources are fixed one at a time in index order, each to the
/// smallest target (or to no target, last) that keeps the optimum
/// attainable.
pub fn solve_transfer(costs: &CostMatrix) -> Result<TransferPlan> {
    if costs.rows == 0 || costs.cols == 0 {
        return Err(Error::param("costs", "cost matrix must be at least 1 x 1"));
    }
    let all_rows: Vec<usize> = (0..costs.rows).collect();
    let all_cols: Vec<usize> = (0..costs.cols).collect();
    let best = sub_optimum(costs, &all_rows, &all_cols);

    let mut col_free = vec![true; costs.cols];
    let mut prefix_matched = 0;
    let mut prefix_dist = 0.0;
    let mut matches = Vec::new();
    for i in 0..costs.rows {
        let rest_rows: Vec<usize> = (i + 1..costs.rows).collect();
        let mut chosen = false;
        for j in (0..costs.cols).filter(|&j| col_free[j]) {
            let Some(d) = costs.get(i, j) else { continue };
            let rest_cols: Vec<usize> = (0..costs.cols).filter(|&c| col_free[c] && c != j).collect();
            let sub = sub_optimum(costs, &rest_rows, &rest_cols);
            if prefix_matched + 1 + sub.matched == best.matched
                && same_cost(prefix_dist + d + sub.dist, best.dist)
            {
                col_free[j] = false;
                prefix_matched += 1;
                prefix_dist += d;
                matches.push((i, j, d));
                chosen = true;
                break;
            }
        }
        // otherwise source i stays unmatched, which must then be optimal
        let _ = chosen;
    }

    let matched_sources: Vec<bool> = {
        let mut v = vec![false; costs.rows];
        for &(i, _, _) in &matches {
            v[i] = true;
        }
        v
    };
    Ok(TransferPlan {
        total_cost: matches.iter().map(|m| m.2).sum(),
        retired: (0..costs.rows).filter(|&i| !matched_sources[i]).collect(),
        launched: (0..costs.cols).filter(|&j| col_free[j]).collect(),
        matches,
    })
}

/// Transfer plan from the drones of `from` to the sites of `to`.
pub fn plan_transition(
    from: &Placement,
    to: &Placement,
    speed: f64,
    time_budget: f64,
    move_norm: Norm,
) -> Result<TransferPlan> {
    let problem = TransferProblem {
        sources: from.positions.clone(),
        targets: to.positions.clone(),
        speed,
        time_budget,
        move_norm,
    };
    solve_transfer(&build_cost_matrix(&problem)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn problem(s: &[(f64, f64)], t: &[(f64, f64)], speed: f64, time: f64) -> TransferProblem {
        TransferProblem {
            sources: pts(s),
            targets: pts(t),
            speed,
            time_budget: time,
            move_norm: Norm::L2,
        }
    }

    #[test]
    fn identical_sets_have_zero_diagonal() {
        let p = problem(&[(0.0, 0.0), (10.0, 5.0)], &[(0.0, 0.0), (10.0, 5.0)], 1.0, 100.0);
        let c = build_cost_matrix(&p).unwrap();
        assert_eq!(c.get(0, 0), Some(0.0));
        assert_eq!(c.get(1, 1), Some(0.0));
        let plan = solve_transfer(&c).unwrap();
        assert_eq!(plan.matches, vec![(0, 0, 0.0), (1, 1, 0.0)]);
        assert_eq!(plan.total_cost, 0.0);
    }

    #[test]
    fn tiny_reach_blocks_everything() {
        let p = problem(&[(0.0, 0.0)], &[(1.0, 0.0), (0.0, 2.0)], 1e-6, 1e-6);
        let c = build_cost_matrix(&p).unwrap();
        assert!(c.entries.iter().all(Option::is_none));
        let plan = solve_transfer(&c).unwrap();
        assert!(plan.matches.is_empty());
        assert_eq!(plan.retired, vec![0]);
        assert_eq!(plan.launched, vec![0, 1]);
        assert_eq!(plan.total_cost, 0.0);
    }

    #[test]
    fn reach_boundary_is_inclusive() {
        let p = problem(&[(0.0, 0.0)], &[(180.0, 240.0), (180.0, 240.001)], 10.0, 30.0);
        let c = build_cost_matrix(&p).unwrap();
        assert_eq!(c.get(0, 0), Some(300.0));
        assert_eq!(c.get(0, 1), None);
    }

    #[test]
    fn rectangular_launches_surplus_target() {
        let p = problem(&[(0.0, 0.0), (100.0, 0.0)], &[(0.0, 10.0), (50.0, 0.0), (100.0, 10.0)], 10.0, 100.0);
        let plan = solve_transfer(&build_cost_matrix(&p).unwrap()).unwrap();
        assert_eq!(plan.matches, vec![(0, 0, 10.0), (1, 2, 10.0)]);
        assert_eq!(plan.launched, vec![1]);
        assert!(plan.retired.is_empty());
    }

    #[test]
    fn reachability_beats_distance() {
        // matching 0->0 is cheapest but leaves source 1 with nothing reachable
        let c = CostMatrix::from_rows(vec![vec![Some(1.0), Some(5.0)], vec![Some(2.0), None]]);
        let plan = solve_transfer(&c).unwrap();
        assert_eq!(plan.matches, vec![(0, 1, 5.0), (1, 0, 2.0)]);
    }

    #[test]
    fn unreachable_target_is_launched() {
        let p = problem(&[(0.0, 0.0), (10.0, 0.0)], &[(0.0, 0.0), (5000.0, 0.0)], 1.0, 100.0);
        let plan = solve_transfer(&build_cost_matrix(&p).unwrap()).unwrap();
        assert_eq!(plan.matches, vec![(0, 0, 0.0)]);
        assert_eq!(plan.launched, vec![1]);
        assert_eq!(plan.retired, vec![1]);
    }

    #[test]
    fn ties_resolve_lexicographically() {
        let c = CostMatrix::from_rows(vec![vec![Some(1.0); 3]; 3]);
        let plan = solve_transfer(&c).unwrap();
        assert_eq!(plan.matches, vec![(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]);
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(build_cost_matrix(&problem(&[], &[(0.0, 0.0)], 1.0, 1.0)).is_err());
        assert!(build_cost_matrix(&problem(&[(0.0, 0.0)], &[(0.0, 0.0)], 0.0, 1.0)).is_err());
        assert!(build_cost_matrix(&problem(&[(0.0, 0.0)], &[(0.0, 0.0)], 1.0, -1.0)).is_err());
    }
}
