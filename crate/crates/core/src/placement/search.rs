//! Site selection (greedy maximum coverage + 1-swap local search) and the
//! fleet-size binary search.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::geometry::Point;

use super::assign::{Assignment, Instance};
use super::{
    candidate_sites, max_drones, validate_capacity, validate_users, CoverageReport, GroundUser, Placement,
    Region,
};

/// Instances up to this many users evaluate site sets with the exact
/// association search; larger ones use the association rule with repair.
pub const EXACT_ASSIGNMENT_MAX_USERS: usize = 24;

/// With exact association, fleet sizes whose site subsets number at most
/// this many are solved by enumerating every subset.
pub const ENUMERATION_MAX_SUBSETS: u64 = 25_000;

/// Incremental placement solver over a fixed candidate set.
///
/// Solutions are built as a chain: the `k + 1` site solution starts from the
/// `k` site solution plus the greedy best extra site, then runs 1-swap local
/// search. Coverage is therefore non-decreasing in the fleet size, and the
/// chain is cached so repeated solves (as in the fleet binary search) reuse
/// earlier work.
///
/// Small instances (exact association, few enough site subsets) replace a
/// chain level by the enumerated optimum when that is strictly better, so
/// those levels are globally optimal.
pub struct PlacementSolver {
    inst: Instance,
    exact: bool,
    chain: Vec<Assignment>,
    calls: usize,
}

impl PlacementSolver {
    pub fn new(
        users: &[GroundUser],
        candidates: Vec<Point>,
        capacity: f64,
        params: &ChannelParams,
    ) -> Result<Self> {
        validate_users(users)?;
        validate_capacity(capacity)?;
        params.validate()?;
        if candidates.is_empty() {
            return Err(Error::param("candidates", "candidate set is empty"));
        }
        Ok(PlacementSolver {
            exact: users.len() <= EXACT_ASSIGNMENT_MAX_USERS,
            inst: Instance::new(users, candidates, capacity, params),
            chain: Vec::new(),
            calls: 0,
        })
    }

    pub fn candidates(&self) -> &[Point] {
        &self.inst.candidates
    }

    /// Number of [`Self::solve`] calls so far.
    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn solve(&mut self, n_dbs: usize) -> Result<(Placement, CoverageReport)> {
        let max = self.inst.candidates.len();
        if n_dbs == 0 || n_dbs > max {
            return Err(Error::FleetSizeOutOfRange { n: n_dbs, max });
        }
        self.calls += 1;
        while self.chain.len() < n_dbs {
            let mut next = self.grow();
            if let Some(best) = self.enumerate(next.sites.len()) {
                if best.count > next.count {
                    next = best;
                }
            }
            self.chain.push(next);
        }
        let a = &self.chain[n_dbs - 1];
        let placement = self.inst.placement(a);
        Ok(Self::report(&placement, a, self.inst.n_users()))
    }

    fn report(placement: &Placement, a: &Assignment, n_users: usize) -> (Placement, CoverageReport) {
        let per_dbs_load: Vec<f64> = a.load.iter().map(|&k| k as f64 / 1000.0).collect();
        let report = CoverageReport {
            covered_count: a.count,
            total_users: n_users,
            coverage_fraction: if n_users == 0 {
                1.0
            } else {
                a.count as f64 / n_users as f64
            },
            served_rate: per_dbs_load.iter().sum(),
            per_dbs_load,
        };
        (placement.clone(), report)
    }

    fn grow(&self) -> Assignment {
        let empty = Assignment {
            sites: Vec::new(),
            owner: vec![None; self.inst.n_users()],
            load: Vec::new(),
            count: 0,
        };
        let base = self.chain.last().unwrap_or(&empty);
        let mut used = vec![false; self.inst.candidates.len()];
        for &c in &base.sites {
            used[c] = true;
        }

        // Greedy extension: the unused site covering the most still-unserved
        // users (lowest index on ties).
        let mut best: Option<(usize, usize)> = None;
        let mut best_exact: Option<Assignment> = None;
        for c in (0..self.inst.candidates.len()).filter(|&c| !used[c]) {
            let score = if self.exact {
                let mut sites = base.sites.clone();
                sites.push(c);
                let a = self.inst.exact_assign(&sites);
                let score = a.count;
                if best.is_none_or(|(s, _)| score > s) {
                    best_exact = Some(a);
                }
                score
            } else {
                self.inst.extend_gain(base, c)
            };
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, c));
            }
        }
        let (_, c) = best.expect("fleet size is bounded by the candidate count");
        let current = match best_exact {
            Some(a) => a,
            None => self.inst.extend(base, c),
        };
        self.local_search(current)
    }

    /// Best site subset of size `k` by exhaustive enumeration (first subset in
    /// lexicographic order on ties), if affordable.
    fn enumerate(&self, k: usize) -> Option<Assignment> {
        let m = self.inst.candidates.len();
        if !self.exact || binomial(m, k) > ENUMERATION_MAX_SUBSETS {
            return None;
        }
        let n_users = self.inst.n_users();
        let mut idx: Vec<usize> = (0..k).collect();
        let mut best: Option<Assignment> = None;
        loop {
            let a = self.inst.exact_assign(&idx);
            if best.as_ref().is_none_or(|b| a.count > b.count) {
                let done = a.count == n_users;
                best = Some(a);
                if done {
                    break;
                }
            }
            // next combination
            let Some(i) = (0..k).rev().find(|&i| idx[i] < m - k + i) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
        best
    }

    /// First-improvement 1-swap search: slots in index order, replacement
    /// candidates in index order, until a full pass finds no improvement.
    fn local_search(&self, mut current: Assignment) -> Assignment {
        let n_cand = self.inst.candidates.len();
        let mut used = vec![false; n_cand];
        for &c in &current.sites {
            used[c] = true;
        }
        let mut slot_of = self.inst.slot_map(&current.sites);
        loop {
            let mut improved = false;
            for i in 0..current.sites.len() {
                for c in 0..n_cand {
                    // Repair never moves served users, so a site that covers
                    // nobody unserved cannot help there.
                    if used[c] || (!self.exact && !self.inst.swap_can_help(&current, i, c)) {
                        continue;
                    }
                    let candidate = if self.exact {
                        let mut sites = current.sites.clone();
                        sites[i] = c;
                        self.inst.exact_assign(&sites)
                    } else {
                        self.inst.swap_repair(&current, &mut slot_of, i, c)
                    };
                    if candidate.count > current.count {
                        let old = current.sites[i];
                        used[old] = false;
                        used[c] = true;
                        current = candidate;
                        slot_of = self.inst.slot_map(&current.sites);
                        improved = true;
                    }
                }
            }
            if !improved {
                return current;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n as u64 - i) / (i + 1);
    }
    acc
}

/// Result of [`binary_search_fleet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetSearch {
    pub n_star: usize,
    pub max_drones: usize,
    pub placement: Placement,
    pub report: CoverageReport,
    /// Set when even the returned fleet misses the coverage target.
    pub below_target: bool,
    pub solver_calls: usize,
}

/// Smallest fleet whose placement serves at least `alpha` of the users.
///
/// Binary search over `[1, max_drones]` with midpoint `floor((lo + hi) / 2)`,
/// stopping when the interval closes or after `max_iter` probes. If the
/// final fleet misses the target and a larger fleet is allowed, the fleet
/// is increased by one.
pub fn binary_search_fleet(
    users: &[GroundUser],
    region: &Region,
    capacity: f64,
    params: &ChannelParams,
    alpha: f64,
    max_iter: usize,
) -> Result<FleetSearch> {
    region.validate()?;
    let mut solver = PlacementSolver::new(users, candidate_sites(region, users), capacity, params)?;
    search_with(&mut solver, max_drones(region), alpha, max_iter)
}

/// [`binary_search_fleet`] over an existing solver and explicit bound.
pub fn search_with(
    solver: &mut PlacementSolver,
    max_d: usize,
    alpha: f64,
    max_iter: usize,
) -> Result<FleetSearch> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    if max_iter == 0 {
        return Err(Error::param("max_iter", "must be >= 1"));
    }
    let max_d = max_d.min(solver.candidates().len()).max(1);
    let calls_before = solver.calls();

    let (mut lo, mut hi) = (1usize, max_d);
    let mut best: Option<(usize, Placement, CoverageReport)> = None;
    let mut iter = 0;
    while lo < hi && iter < max_iter {
        let mid = (lo + hi) / 2;
        let (pl, rep) = solver.solve(mid)?;
        iter += 1;
        if rep.coverage_fraction >= alpha {
            best = Some((mid, pl, rep));
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }

    let (mut n, mut pl, mut rep) = match best {
        Some((n, pl, rep)) if n == hi => (n, pl, rep),
        _ => {
            let (pl, rep) = solver.solve(hi)?;
            (hi, pl, rep)
        }
    };
    if rep.coverage_fraction < alpha && n < max_d {
        n += 1;
        (pl, rep) = solver.solve(n)?;
    }
    Ok(FleetSearch {
        n_star: n,
        max_drones: max_d,
        below_target: rep.coverage_fraction < alpha,
        placement: pl,
        report: rep,
        solver_calls: solver.calls() - calls_before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn user(id: usize, x: f64, y: f64, bw: f64) -> GroundUser {
        GroundUser { id, x, y, bw }
    }

    #[test]
    fn co_located_users_need_one_drone() {
        let p = ChannelParams::default();
        let users: Vec<_> = (0..5).map(|i| user(i, 100.0, 100.0, 1.0)).collect();
        let r = binary_search_fleet(&users, &Region::default(), 10.0, &p, 0.9, 32).unwrap();
        assert_eq!(r.n_star, 1);
        assert!(!r.below_target);
    }

    #[test]
    fn unreachable_user_sets_flag() {
        let p = ChannelParams::default();
        let region = Region {
            width: 100.0,
            length: 100.0,
            range: 50.0,
        };
        // oversized demand: fits no DBS at all
        let users = vec![user(0, 10.0, 10.0, 1.0), user(1, 90.0, 90.0, 50.0)];
        let r = binary_search_fleet(&users, &region, 10.0, &p, 1.0, 32).unwrap();
        assert!(r.below_target);
        assert_eq!(r.n_star, max_drones(&region));
    }

    #[test]
    fn k_clusters_need_k_drones() {
        let p = ChannelParams::default();
        let centres = [(40.0, 40.0), (250.0, 60.0), (150.0, 350.0)];
        let users: Vec<_> = centres
            .iter()
            .enumerate()
            .flat_map(|(k, &(x, y))| (0..4).map(move |i| user(k * 4 + i, x + i as f64, y, 2.0)))
            .collect();
        let region = Region::default();
        let r = binary_search_fleet(&users, &region, 10.0, &p, 1.0, 32).unwrap();
        assert_eq!(r.n_star, 3);
        // linear-scan oracle
        let mut solver =
            PlacementSolver::new(&users, candidate_sites(&region, &users), 10.0, &p).unwrap();
        let first = (1..=max_drones(&region))
            .find(|&n| solver.solve(n).unwrap().1.coverage_fraction >= 1.0)
            .unwrap();
        assert_eq!(first, r.n_star);
    }

    #[test]
    fn solver_call_budget() {
        let p = ChannelParams::default();
        let users: Vec<_> = (0..40)
            .map(|i| user(i, (i * 37 % 300) as f64, (i * 91 % 400) as f64, 1.0))
            .collect();
        let region = Region::default();
        let r = binary_search_fleet(&users, &region, 10.0, &p, 0.9, 64).unwrap();
        let max = r.max_drones as f64;
        assert!(r.solver_calls <= max.log2().ceil() as usize + 2, "{}", r.solver_calls);
    }

    #[test]
    fn rejects_bad_alpha() {
        let p = ChannelParams::default();
        let users = [user(0, 1.0, 1.0, 1.0)];
        assert!(binary_search_fleet(&users, &Region::default(), 10.0, &p, 0.0, 8).is_err());
        assert!(binary_search_fleet(&users, &Region::default(), 10.0, &p, 1.5, 8).is_err());
        assert!(binary_search_fleet(&users, &Region::default(), 10.0, &p, 0.9, 0).is_err());
    }
}
