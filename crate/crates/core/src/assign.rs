//! Optimal assignment on small dense cost matrices.
//!
//! Two flavors are needed: minimal total cost (branch matching along a
//! parameter sweep) and minimal worst pair (multiset distance between
//! spectra). Sizes stay at the lattice dimension, so cubic algorithms
//! are plenty.

/// Minimum-sum perfect assignment via shortest augmenting paths with
/// potentials. `cost[i * n + j]` is the cost of pairing row i with
/// column j. Returns, for each row, the assigned column.
pub fn hungarian(n: usize, cost: &[f64]) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    // 1-based internal arrays, standard formulation.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut matched = vec![0usize; n + 1]; // column -> row
    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
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
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if matched[j] != 0 {
            row_to_col[matched[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Smallest threshold d such that a perfect matching exists using only
/// pairs with cost <= d (bottleneck assignment value).
pub fn bottleneck_value(n: usize, cost: &[f64]) -> f64 {
    assert_eq!(cost.len(), n * n);
    if n == 0 {
        return 0.0;
    }
    let mut values: Vec<f64> = cost.to_vec();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup();
    let mut lo = 0usize;
    let mut hi = values.len() - 1;
    // The full cost set always admits a matching.
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(n, cost, values[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    values[lo]
}

/// Kuhn augmenting paths on the thresholded bipartite graph.
fn has_perfect_matching(n: usize, cost: &[f64], threshold: f64) -> bool {
    let mut col_match: Vec<Option<usize>> = vec![None; n];
    fn try_row(
        i: usize,
        n: usize,
        cost: &[f64],
        threshold: f64,
        seen: &mut [bool],
        col_match: &mut [Option<usize>],
    ) -> bool {
        for j in 0..n {
            if seen[j] || cost[i * n + j] > threshold {
                continue;
            }
            seen[j] = true;
            if col_match[j].is_none()
                || try_row(col_match[j].unwrap(), n, cost, threshold, seen, col_match)
            {
                col_match[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..n {
        let mut seen = vec![false; n];
        if !try_row(i, n, cost, threshold, &mut seen, &mut col_match) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hungarian_picks_diagonal_when_cheapest() {
        let cost = vec![0.0, 5.0, 5.0, 5.0, 0.0, 5.0, 5.0, 5.0, 0.0];
        assert_eq!(hungarian(3, &cost), vec![0, 1, 2]);
    }

    #[test]
    fn hungarian_resolves_permutation() {
        // Row i is close to column (i + 1) mod 3.
        let big = 10.0;
        let cost = vec![big, 0.1, big, big, big, 0.2, 0.3, big, big];
        assert_eq!(hungarian(3, &cost), vec![1, 2, 0]);
    }

    #[test]
    fn bottleneck_trades_sum_for_worst_pair() {
        // Min-sum would pick (0,0) + (1,1) = 0 + 3; bottleneck prefers
        // the pairing with worst edge 2.
        let cost = vec![0.0, 2.0, 2.0, 3.0];
        assert_eq!(bottleneck_value(2, &cost), 2.0);
    }

    #[test]
    fn bottleneck_zero_for_identical_sets() {
        let cost = vec![0.0, 1.0, 1.0, 0.0];
        assert_eq!(bottleneck_value(2, &cost), 0.0);
    }
}
