use aerocell_core::scenario::{
    generate_hotspot_users, generate_hotspots, generate_users, materialize_users, parse_trace, read_users, write_trace,
    write_users,
};
use aerocell_core::{BsRecord, ScenarioConfig};
use proptest::prelude::*;

fn records() -> impl Strategy<Value = Vec<BsRecord>> {
    prop::collection::btree_map((0u32..5, 0i64..1_000_000), (-1e4f64..1e4, -1e4f64..1e4, 0u64..100_000), 1..40)
        .prop_map(|m| {
            m.into_iter()
                .map(|((bs_id, timestamp), (x_m, y_m, online_users))| BsRecord {
                    timestamp,
                    bs_id,
                    x_m,
                    y_m,
                    online_users,
                })
                .collect()
        })
}

fn config() -> ScenarioConfig {
    ScenarioConfig::new(10.0, 30.0)
}

proptest! {
    #[test]
    fn trace_round_trip_is_idempotent(mut recs in records()) {
        let mut first = Vec::new();
        write_trace(&recs, &mut first).unwrap();
        let parsed = parse_trace(first.as_slice()).unwrap();
        recs.sort_by_key(|r| (r.bs_id, r.timestamp));
        prop_assert_eq!(&parsed, &recs);
        let mut second = Vec::new();
        write_trace(&parsed, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn generators_are_deterministic_and_in_region(seed in any::<u64>(), n in 0usize..200, k in 1usize..6) {
        let cfg = config();
        let r = &cfg.region;
        let a = generate_users(&cfg, n, seed);
        prop_assert_eq!(&a, &generate_users(&cfg, n, seed));
        let centres = generate_hotspots(&cfg, k, seed);
        prop_assert_eq!(&centres, &generate_hotspots(&cfg, k, seed));
        let b = generate_hotspot_users(&cfg, &centres, n, seed);
        prop_assert_eq!(&b, &generate_hotspot_users(&cfg, &centres, n, seed));
        for u in a.iter().chain(&b) {
            prop_assert!(u.x >= 0.0 && u.x <= r.width && u.y >= 0.0 && u.y <= r.length);
            prop_assert!(cfg.bw_palette.contains(&u.bw));
        }
    }

    #[test]
    fn materialized_users_stay_near_their_station(seed in any::<u64>(), n in 0usize..100, x in 0.0f64..300.0, y in 0.0f64..400.0) {
        let cfg = config();
        let bs = BsRecord { timestamp: 0, bs_id: 3, x_m: x, y_m: y, online_users: n as u64 };
        let users = materialize_users(&cfg, &bs, n, seed);
        prop_assert_eq!(users.len(), n);
        prop_assert_eq!(&users, &materialize_users(&cfg, &bs, n, seed));
        for u in &users {
            prop_assert!(cfg.region.contains(&u.position()));
            prop_assert!((u.x - x).hypot(u.y - y) <= cfg.cell_radius() + 1e-9);
        }
    }

    #[test]
    fn user_csv_round_trip(seed in any::<u64>(), n in 0usize..50) {
        let users = generate_users(&config(), n, seed);
        let mut buf = Vec::new();
        write_users(&users, &mut buf).unwrap();
        prop_assert_eq!(read_users(buf.as_slice()).unwrap(), users);
    }
}
