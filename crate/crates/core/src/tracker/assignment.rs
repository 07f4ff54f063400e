//! Optimal bipartite assignment (Hungarian algorithm with potentials).
//!
//! Used to match detections to predicted tracks by maximizing total IoU.

/// Minimum-cost assignment for an n x m cost matrix with n <= m.
/// Returns, for each row, the column it is assigned to.
fn min_cost_rows(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let m = cost.first().map_or(0, |r| r.len());
    debug_assert!(n <= m);
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1]; // row matched to column j (1-based, 0 = free)
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
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
    let mut row_to_col = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Assignment of rows to columns maximizing the total score.
///
/// Every index on the smaller side is matched; callers filter weak pairs
/// afterwards. Pairs are returned as (row, column) in row order.
pub fn max_score_assignment(score: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let n = score.len();
    let m = score.first().map_or(0, |r| r.len());
    if n == 0 || m == 0 {
        return Vec::new();
    }
    if n <= m {
        let cost: Vec<Vec<f64>> = score.iter().map(|r| r.iter().map(|&s| -s).collect()).collect();
        min_cost_rows(&cost)
            .into_iter()
            .enumerate()
            .collect()
    } else {
        // Transpose so rows are the smaller side, then flip pairs back.
        let cost: Vec<Vec<f64>> = (0..m)
            .map(|j| (0..n).map(|i| -score[i][j]).collect())
            .collect();
        let mut pairs: Vec<(usize, usize)> = min_cost_rows(&cost)
            .into_iter()
            .enumerate()
            .map(|(j, i)| (i, j))
            .collect();
        pairs.sort_unstable();
        pairs
    }
}

pub fn total_score(score: &[Vec<f64>], pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(i, j)| score[i][j]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive permutation search over the smaller side.
    pub(crate) fn brute_force_best(score: &[Vec<f64>]) -> f64 {
        let n = score.len();
        let m = score.first().map_or(0, |r| r.len());
        if n == 0 || m == 0 {
            return 0.0;
        }
        fn recurse(score: &[Vec<f64>], row: usize, used: &mut [bool]) -> f64 {
            if row == score.len() {
                return 0.0;
            }
            let m = score[0].len();
            let mut best = f64::NEG_INFINITY;
            if score.len() > used.iter().filter(|&&u| !u).count() {
                // Not enough columns left; skip this row.
                best = recurse(score, row + 1, used);
            }
            for j in 0..m {
                if !used[j] {
                    used[j] = true;
                    let v = score[row][j] + recurse(score, row + 1, used);
                    used[j] = false;
                    best = best.max(v);
                }
            }
            best
        }
        if n <= m {
            recurse(score, 0, &mut vec![false; m])
        } else {
            let t: Vec<Vec<f64>> = (0..m).map(|j| (0..n).map(|i| score[i][j]).collect()).collect();
            recurse(&t, 0, &mut vec![false; n])
        }
    }

    #[test]
    fn simple_cases() {
        let score = vec![vec![0.9, 0.1], vec![0.2, 0.8]];
        let pairs = max_score_assignment(&score);
        assert_eq!(pairs, vec![(0, 0), (1, 1)]);

        // Greedy would take (0,1)=0.9 and lose; optimum crosses over.
        let score = vec![vec![0.5, 0.9], vec![0.0, 0.8]];
        let pairs = max_score_assignment(&score);
        assert!((total_score(&score, &pairs) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn rectangular_and_empty() {
        assert!(max_score_assignment(&[]).is_empty());
        let score = vec![vec![0.3, 0.9, 0.5]];
        assert_eq!(max_score_assignment(&score), vec![(0, 1)]);
        let score = vec![vec![0.3], vec![0.9], vec![0.5]];
        assert_eq!(max_score_assignment(&score), vec![(1, 0)]);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=6);
            let m = rng.gen_range(1..=6);
            let score: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..m).map(|_| rng.gen::<f64>()).collect())
                .collect();
            let pairs = max_score_assignment(&score);
            assert_eq!(pairs.len(), n.min(m));
            let got = total_score(&score, &pairs);
            let best = brute_force_best(&score);
            assert!(
                (got - best).abs() < 1e-9,
                "suboptimal: got {got}, brute force {best} on {score:?}"
            );
        }
    }
}
