//! User association for a fixed set of sites.

use crate::channel::ChannelParams;
use crate::geometry::Point;

use super::{to_kbps, GroundUser, Placement};

const NO_SLOT: usize = usize::MAX;

/// Search budget of the exact association search; past it the best
/// association found so far is kept.
const EXACT_NODE_BUDGET: u64 = 2_000_000;

/// Precomputed coverage relation between users and candidate sites.
pub(crate) struct Instance {
    pub demand: Vec<u64>,
    pub capacity: u64,
    capacity_mbps: f64,
    /// User indices in ascending id order.
    pub order: Vec<usize>,
    pub candidates: Vec<Point>,
    /// Per candidate, the users it covers whose demand fits an empty DBS.
    pub covers: Vec<Vec<usize>>,
    /// Per user, the candidates covering it, ascending.
    pub covered_by: Vec<Vec<usize>>,
}

/// Sites occupied by the fleet (one per slot) and the association of users
/// to slots.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Assignment {
    pub sites: Vec<usize>,
    pub owner: Vec<Option<usize>>,
    pub load: Vec<u64>,
    pub count: usize,
}

impl Assignment {
    fn empty(sites: &[usize], n_users: usize) -> Self {
        Assignment {
            sites: sites.to_vec(),
            owner: vec![None; n_users],
            load: vec![0; sites.len()],
            count: 0,
        }
    }
}

impl Instance {
    pub fn new(users: &[GroundUser], candidates: Vec<Point>, capacity: f64, params: &ChannelParams) -> Self {
        let cap = to_kbps(capacity);
        let demand: Vec<u64> = users.iter().map(|u| to_kbps(u.bw)).collect();
        let mut order: Vec<usize> = (0..users.len()).collect();
        order.sort_by_key(|&j| (users[j].id, j));

        let mut covers = vec![Vec::new(); candidates.len()];
        let mut covered_by = vec![Vec::new(); users.len()];
        for (c, site) in candidates.iter().enumerate() {
            for &j in &order {
                if params.covers(&users[j].position(), site) {
                    covered_by[j].push(c);
                    if demand[j] < cap {
                        covers[c].push(j);
                    }
                }
            }
        }
        Instance {
            demand,
            capacity: cap,
            capacity_mbps: capacity,
            order,
            candidates,
            covers,
            covered_by,
        }
    }

    pub fn n_users(&self) -> usize {
        self.demand.len()
    }

    pub fn slot_map(&self, sites: &[usize]) -> Vec<usize> {
        let mut slot_of = vec![NO_SLOT; self.candidates.len()];
        for (s, &c) in sites.iter().enumerate() {
            slot_of[c] = s;
        }
        slot_of
    }

    /// Most-remaining-capacity slot among those covering `j` that still fit
    /// its demand; lowest slot index on ties.
    fn best_slot(&self, j: usize, a: &Assignment, slot_of: &[usize]) -> Option<usize> {
        let d = self.demand[j];
        let mut best: Option<(u64, usize)> = None;
        for &c in &self.covered_by[j] {
            let s = slot_of[c];
            if s == NO_SLOT || a.load[s] + d >= self.capacity {
                continue;
            }
            let rem = self.capacity - a.load[s];
            match best {
                Some((br, bs)) if br > rem || (br == rem && bs < s) => {}
                _ => best = Some((rem, s)),
            }
        }
        best.map(|(_, s)| s)
    }

    fn attach(&self, a: &mut Assignment, j: usize, s: usize) {
        a.owner[j] = Some(s);
        a.load[s] += self.demand[j];
        a.count += 1;
    }

    /// Offers every unassigned user, in id order, to its best fitting slot.
    pub fn repair(&self, a: &mut Assignment, slot_of: &[usize]) {
        for &j in &self.order {
            if a.owner[j].is_none() {
                if let Some(s) = self.best_slot(j, a, slot_of) {
                    self.attach(a, j, s);
                }
            }
        }
    }

    /// The deterministic association rule applied from scratch.
    pub fn rule_assign(&self, sites: &[usize]) -> Assignment {
        let mut a = Assignment::empty(sites, self.n_users());
        let slot_of = self.slot_map(sites);
        self.repair(&mut a, &slot_of);
        a
    }

    /// Adds `c` as a new slot and packs unassigned users into it.
    pub fn extend(&self, a: &Assignment, c: usize) -> Assignment {
        let mut next = a.clone();
        next.sites.push(c);
        next.load.push(0);
        let s = next.sites.len() - 1;
        for &j in &self.covers[c] {
            if next.owner[j].is_none() && next.load[s] + self.demand[j] < self.capacity {
                self.attach(&mut next, j, s);
            }
        }
        next
    }

    /// Number of users [`Self::extend`] would attach to `c`.
    pub fn extend_gain(&self, a: &Assignment, c: usize) -> usize {
        let mut load = 0;
        let mut gain = 0;
        for &j in &self.covers[c] {
            if a.owner[j].is_none() && load + self.demand[j] < self.capacity {
                load += self.demand[j];
                gain += 1;
            }
        }
        gain
    }

    /// Replaces the site of slot `i` by candidate `c`, releasing its users,
    /// then repairs. `slot_of` must describe `a` and is left unchanged.
    pub fn swap_repair(&self, a: &Assignment, slot_of: &mut [usize], i: usize, c: usize) -> Assignment {
        let mut next = a.clone();
        let old = next.sites[i];
        for j in 0..next.owner.len() {
            if next.owner[j] == Some(i) {
                next.owner[j] = None;
                next.count -= 1;
            }
        }
        next.sites[i] = c;
        next.load[i] = 0;
        slot_of[old] = NO_SLOT;
        slot_of[c] = i;
        self.repair(&mut next, slot_of);
        slot_of[c] = NO_SLOT;
        slot_of[old] = i;
        next
    }

    /// True if swapping slot `i` to `c` could raise the count: `c` must cover
    /// a user that is unassigned or released by the swap.
    pub fn swap_can_help(&self, a: &Assignment, i: usize, c: usize) -> bool {
        self.covers[c]
            .iter()
            .any(|&j| a.owner[j].is_none() || a.owner[j] == Some(i))
    }

    /// Maximum-cardinality association for `sites` by depth-first branch and
    /// bound, seeded with the rule association. Among equally large
    /// associations the first one found is kept, so the result is
    /// deterministic.
    pub fn exact_assign(&self, sites: &[usize]) -> Assignment {
        let incumbent = self.rule_assign(sites);
        let slot_of = self.slot_map(sites);
        let options: Vec<(usize, Vec<usize>)> = self
            .order
            .iter()
            .filter(|&&j| self.demand[j] < self.capacity)
            .filter_map(|&j| {
                let mut slots: Vec<usize> = self.covered_by[j]
                    .iter()
                    .map(|&c| slot_of[c])
                    .filter(|&s| s != NO_SLOT)
                    .collect();
                slots.sort_unstable();
                (!slots.is_empty()).then_some((j, slots))
            })
            .collect();
        if incumbent.count == options.len() {
            return incumbent;
        }

        struct Dfs<'a> {
            inst: &'a Instance,
            options: &'a [(usize, Vec<usize>)],
            current: Assignment,
            best: Assignment,
            nodes: u64,
        }
        impl Dfs<'_> {
            fn go(&mut self, k: usize) {
                self.nodes += 1;
                if self.current.count > self.best.count {
                    self.best = self.current.clone();
                }
                let remaining = self.options.len() - k;
                if k == self.options.len()
                    || self.current.count + remaining <= self.best.count
                    || self.nodes > EXACT_NODE_BUDGET
                {
                    return;
                }
                let (j, ref slots) = self.options[k];
                let d = self.inst.demand[j];
                for &s in slots {
                    if self.current.load[s] + d < self.inst.capacity {
                        self.current.owner[j] = Some(s);
                        self.current.load[s] += d;
                        self.current.count += 1;
                        self.go(k + 1);
                        self.current.owner[j] = None;
                        self.current.load[s] -= d;
                        self.current.count -= 1;
                    }
                }
                self.go(k + 1);
            }
        }

        let mut dfs = Dfs {
            inst: self,
            options: &options,
            current: Assignment::empty(sites, self.n_users()),
            best: incumbent,
            nodes: 0,
        };
        dfs.go(0);
        dfs.best
    }

    pub fn placement(&self, a: &Assignment) -> Placement {
        let mut ucd = vec![vec![0u8; self.n_users()]; a.sites.len()];
        for (j, owner) in a.owner.iter().enumerate() {
            if let Some(s) = owner {
                ucd[*s][j] = 1;
            }
        }
        Placement {
            positions: a.sites.iter().map(|&c| self.candidates[c]).collect(),
            capacity: self.capacity_mbps,
            ucd,
        }
    }
}
