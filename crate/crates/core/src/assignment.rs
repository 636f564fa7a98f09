//! Minimum-cost bipartite assignment.

/// Optimal assignment for a square cost matrix (row-major, `n * n`), by the
/// shortest augmenting path form of the Hungarian method. Returns the column
/// assigned to each row.
pub fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    // 1-based potentials; column 0 is the virtual start.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
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
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        while j0 != 0 {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        if owner[j] != 0 {
            out[owner[j] - 1] = j - 1;
        }
    }
    out
}

/// Greedy assignment by increasing cost, with the gap to a lower bound on the
/// optimum (the larger of the row-minimum and column-minimum sums).
pub fn greedy(cost: &[f64], n: usize) -> (Vec<usize>, f64) {
    let mut order: Vec<usize> = (0..n * n).collect();
    order.sort_by(|&a, &b| cost[a].total_cmp(&cost[b]));
    let mut out = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for idx in order {
        let (r, c) = (idx / n, idx % n);
        if out[r] == usize::MAX && !taken[c] {
            out[r] = c;
            taken[c] = true;
        }
    }
    let total: f64 = out.iter().enumerate().map(|(r, &c)| cost[r * n + c]).sum();
    let rows: f64 = (0..n).map(|r| (0..n).map(|c| cost[r * n + c]).fold(f64::INFINITY, f64::min)).sum();
    let cols: f64 = (0..n).map(|c| (0..n).map(|r| cost[r * n + c]).fold(f64::INFINITY, f64::min)).sum();
    (out, total - rows.max(cols))
}
