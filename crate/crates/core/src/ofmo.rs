//! Offloading-mode selection: a unit-weight 0–1 knapsack over actor scores.

use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub struct OfmoProblem {
    pub scores: Vec<f64>,
    pub capacity: usize,
}

/// Ξ(m, c) = max(Ξ(m-1, c), Ξ(m-1, c-1) + O_m), then backtrack from m = M.
/// On equality the exclusion branch wins.
pub fn knapsack_ofmo(p: &OfmoProblem) -> Vec<bool> {
    let m = p.scores.len();
    let cap = p.capacity.min(m);
    let mut xi = vec![vec![0.0f64; cap + 1]; m + 1];
    for i in 1..=m {
        let o = p.scores[i - 1];
        for c in 0..=cap {
            let skip = xi[i - 1][c];
            xi[i][c] = if c > 0 && xi[i - 1][c - 1] + o > skip {
                xi[i - 1][c - 1] + o
            } else {
                skip
            };
        }
    }
    let mut b = vec![false; m];
    let mut c = cap;
    for i in (1..=m).rev() {
        if xi[i][c] != xi[i - 1][c] {
            b[i - 1] = true;
            c -= 1;
        }
    }
    b
}

pub const BRUTE_FORCE_MAX_USERS: usize = 20;

/// Exhaustive search over all feasible selections. A later mask replaces
/// the incumbent only on strict improvement, so equal-value alternatives
/// resolve toward excluding users and toward lower indices.
pub fn brute_force_ofmo(p: &OfmoProblem) -> Result<Vec<bool>, ModelError> {
    let m = p.scores.len();
    if m > BRUTE_FORCE_MAX_USERS {
        return Err(ModelError::TooManyUsers {
            max: BRUTE_FORCE_MAX_USERS,
            got: m,
        });
    }
    let mut best_mask = 0u32;
    let mut best = 0.0;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize > p.capacity {
            continue;
        }
        let v = objective_mask(&p.scores, mask);
        if v > best {
            best = v;
            best_mask = mask;
        }
    }
    Ok((0..m).map(|i| best_mask & (1 << i) != 0).collect())
}

fn objective_mask(scores: &[f64], mask: u32) -> f64 {
    scores
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, s)| s)
        .sum()
}

pub fn objective(scores: &[f64], b: &[bool]) -> f64 {
    scores.iter().zip(b).filter(|(_, &x)| x).map(|(s, _)| s).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(scores: &[f64], capacity: usize) -> Vec<bool> {
        knapsack_ofmo(&OfmoProblem {
            scores: scores.to_vec(),
            capacity,
        })
    }

    #[test]
    fn worked_instance() {
        let b = solve(&[0.9, 0.2, 0.5, 0.7], 2);
        assert_eq!(b, vec![true, false, false, true]);
        assert!((objective(&[0.9, 0.2, 0.5, 0.7], &b) - 1.6).abs() < 1e-15);
    }

    #[test]
    fn sign_and_capacity_extremes() {
        assert_eq!(solve(&[-0.1, -0.5, -0.9], 3), vec![false; 3]);
        assert_eq!(solve(&[0.1, 0.5, 0.9], 5), vec![true; 3]);
        assert_eq!(solve(&[0.1, 0.5, 0.9], 0), vec![false; 3]);
        assert_eq!(solve(&[0.0, 0.3], 2), vec![false, true]);
    }

    #[test]
    fn brute_force_small_cases() {
        let p = OfmoProblem {
            scores: vec![-1.0],
            capacity: 1,
        };
        assert_eq!(brute_force_ofmo(&p).unwrap(), vec![false]);
        let p = OfmoProblem {
            scores: vec![1.0],
            capacity: 1,
        };
        assert_eq!(brute_force_ofmo(&p).unwrap(), vec![true]);
        let p = OfmoProblem {
            scores: vec![0.0; 21],
            capacity: 1,
        };
        assert!(brute_force_ofmo(&p).is_err());
    }
}
