use aerocell_core::placement::{binary_search_fleet, candidate_sites, max_drones, PlacementSolver};
use aerocell_core::{ChannelParams, GroundUser, Region};
use proptest::prelude::*;

const REGION: Region = Region {
    width: 150.0,
    length: 150.0,
    range: 50.0,
};

fn users(max: usize) -> impl Strategy<Value = Vec<GroundUser>> {
    let bw = prop::sample::select(vec![0.1, 0.5, 1.0, 1.5, 2.0]);
    prop::collection::vec((0.0f64..150.0, 0.0f64..150.0, bw), 1..max).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(id, (x, y, bw))| GroundUser { id, x, y, bw })
            .collect()
    })
}

fn capacity() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![2.0, 5.0, 10.0, 40.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn placements_pass_audit_and_grow(u in users(60), cap in capacity()) {
        let params = ChannelParams::default();
        let mut solver = PlacementSolver::new(&u, candidate_sites(&REGION, &u), cap, &params).unwrap();
        let mut prev = 0;
        for n in 1..=max_drones(&REGION) {
            let (pl, rep) = solver.solve(n).unwrap();
            prop_assert_eq!(pl.positions.len(), n);
            prop_assert!(pl.audit(&u, &params).is_ok(), "{:?}", pl.audit(&u, &params));
            prop_assert_eq!(rep.clone(), pl.report(&u));
            prop_assert!(rep.covered_count >= prev);
            prev = rep.covered_count;
        }
    }

    #[test]
    fn fleet_search_is_minimal(u in users(60), cap in capacity(), alpha in 0.3f64..=1.0) {
        let params = ChannelParams::default();
        let fs = binary_search_fleet(&u, &REGION, cap, &params, alpha, 32).unwrap();
        prop_assert!(fs.n_star >= 1 && fs.n_star <= fs.max_drones);
        prop_assert_eq!(fs.below_target, fs.report.coverage_fraction < alpha);
        if !fs.below_target && fs.n_star > 1 {
            let mut solver = PlacementSolver::new(&u, candidate_sites(&REGION, &u), cap, &params).unwrap();
            let (_, rep) = solver.solve(fs.n_star - 1).unwrap();
            prop_assert!(rep.coverage_fraction < alpha);
        }
    }

    #[test]
    fn solver_is_deterministic(u in users(40), cap in capacity(), n in 1usize..5) {
        let params = ChannelParams::default();
        let mut a = PlacementSolver::new(&u, candidate_sites(&REGION, &u), cap, &params).unwrap();
        let mut b = PlacementSolver::new(&u, candidate_sites(&REGION, &u), cap, &params).unwrap();
        prop_assert_eq!(a.solve(n).unwrap(), b.solve(n).unwrap());
    }
}
