//! Shortest-augmenting-path Hungarian algorithm over a lexicographic cost.
//!
//! Forbidden pairs are not priced with a large constant. Every entry of the
//! padded square matrix instead carries a `(penalty, distance)` pair that is
//! compared lexicographically: reachable real pairs cost `(0, d)`, anything
//! else `(1, 0)`. Minimising that sum maximises the number of reachable
//! pairs first and the distance second.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Sub, SubAssign};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LexCost {
    pub penalty: i64,
    pub dist: f64,
}

impl LexCost {
    pub const ZERO: LexCost = LexCost { penalty: 0, dist: 0.0 };
    const INF: LexCost = LexCost {
        penalty: i64::MAX / 4,
        dist: 0.0,
    };
}

impl PartialOrd for LexCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(
            self.penalty
                .cmp(&other.penalty)
                .then(self.dist.total_cmp(&other.dist)),
        )
    }
}

impl Add for LexCost {
    type Output = LexCost;
    fn add(self, o: LexCost) -> LexCost {
        LexCost {
            penalty: self.penalty + o.penalty,
            dist: self.dist + o.dist,
        }
    }
}

impl Sub for LexCost {
    type Output = LexCost;
    fn sub(self, o: LexCost) -> LexCost {
        LexCost {
            penalty: self.penalty - o.penalty,
            dist: self.dist - o.dist,
        }
    }
}

impl AddAssign for LexCost {
    fn add_assign(&mut self, o: LexCost) {
        *self = *self + o;
    }
}

impl SubAssign for LexCost {
    fn sub_assign(&mut self, o: LexCost) {
        *self = *self - o;
    }
}

/// Minimum-cost perfect assignment of an `n x n` matrix. Returns the column
/// assigned to every row.
pub(crate) fn assign_square(n: usize, cost: impl Fn(usize, usize) -> LexCost) -> Vec<usize> {
    // 1-based potentials; column 0 is the virtual root of each search.
    let mut u = vec![LexCost::ZERO; n + 1];
    let mut v = vec![LexCost::ZERO; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![LexCost::INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = LexCost::INF;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(m: &[[f64; 3]; 3]) -> impl Fn(usize, usize) -> LexCost + '_ {
        move |i, j| LexCost {
            penalty: 0,
            dist: m[i][j],
        }
    }

    #[test]
    fn small_matrices() {
        let m = [[4.0, 3.0, 5.0], [3.0, 5.0, 9.0], [4.0, 1.0, 4.0]];
        assert_eq!(assign_square(3, plain(&m)), vec![2, 0, 1]);
        let m = [[4.0, 3.0, 5.0], [3.0, 5.0, 0.0], [4.0, 1.0, 4.0]];
        assert_eq!(assign_square(3, plain(&m)), vec![0, 2, 1]);
    }

    #[test]
    fn penalty_dominates_distance() {
        // the (0,0)/(1,1) diagonal is cheap but (1,1) is penalised
        let cost = |i: usize, j: usize| match (i, j) {
            (0, 0) => LexCost { penalty: 0, dist: 1.0 },
            (1, 1) => LexCost { penalty: 1, dist: 0.0 },
            _ => LexCost { penalty: 0, dist: 1000.0 },
        };
        assert_eq!(assign_square(2, cost), vec![1, 0]);
    }
}
