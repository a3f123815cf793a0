use aerocell_core::transfer::{build_cost_matrix, solve_transfer};
use aerocell_core::{Norm, Point, TransferProblem};
use proptest::prelude::*;

fn points(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0f64..300.0, 0.0f64..400.0).prop_map(|(x, y)| Point::new(x, y)), 1..max)
}

fn problem(sources: Vec<Point>, targets: Vec<Point>, reach: f64) -> TransferProblem {
    TransferProblem {
        sources,
        targets,
        speed: reach / 10.0,
        time_budget: 10.0,
        move_norm: Norm::L2,
    }
}

proptest! {
    #[test]
    fn identical_placements_cost_nothing(p in points(9), reach in 1.0f64..600.0) {
        let plan = solve_transfer(&build_cost_matrix(&problem(p.clone(), p.clone(), reach)).unwrap()).unwrap();
        prop_assert_eq!(plan.matches.len(), p.len());
        prop_assert_eq!(plan.total_cost, 0.0);
        prop_assert!(plan.retired.is_empty() && plan.launched.is_empty());
    }

    #[test]
    fn plan_partitions_both_sides(s in points(8), t in points(8), reach in 1.0f64..600.0) {
        let prob = problem(s.clone(), t.clone(), reach);
        let costs = build_cost_matrix(&prob).unwrap();
        let plan = solve_transfer(&costs).unwrap();
        prop_assert_eq!(plan.matches.len() + plan.retired.len(), s.len());
        prop_assert_eq!(plan.matches.len() + plan.launched.len(), t.len());
        let mut sum = 0.0;
        for &(i, j, d) in &plan.matches {
            prop_assert!(d <= prob.reach());
            prop_assert_eq!(costs.get(i, j), Some(d));
            sum += d;
        }
        prop_assert!((sum - plan.total_cost).abs() <= 1e-9 * (1.0 + sum));
    }

    #[test]
    fn source_order_does_not_change_the_optimum(s in points(8), t in points(8), reach in 1.0f64..600.0, rot in 0usize..8) {
        let base = solve_transfer(&build_cost_matrix(&problem(s.clone(), t.clone(), reach)).unwrap()).unwrap();
        let mut perm = s.clone();
        perm.rotate_left(rot % s.len());
        perm.reverse();
        let other = solve_transfer(&build_cost_matrix(&problem(perm, t.clone(), reach)).unwrap()).unwrap();
        prop_assert_eq!(base.matches.len(), other.matches.len());
        prop_assert!((base.total_cost - other.total_cost).abs() <= 1e-9 * (1.0 + base.total_cost));
    }

    #[test]
    fn larger_reach_never_matches_fewer(s in points(8), t in points(8), r1 in 1.0f64..600.0, r2 in 1.0f64..600.0) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let a = solve_transfer(&build_cost_matrix(&problem(s.clone(), t.clone(), lo)).unwrap()).unwrap();
        let b = solve_transfer(&build_cost_matrix(&problem(s, t, hi)).unwrap()).unwrap();
        prop_assert!(b.matches.len() >= a.matches.len());
    }
}
