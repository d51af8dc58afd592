//! Minimum-cost perfect assignment on a dense square cost matrix.
//!
//! The solver is the O(n^3) shortest-augmenting-path form of the Hungarian
//! method. Its final dual potentials identify the *tight* edges (zero reduced
//! cost); every optimal assignment uses tight edges only, and every perfect
//! matching of tight edges is optimal. That lets us pick one optimum by a
//! deterministic preference order without another cost search.

use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// `row_to_col[r]` is the column assigned to row `r`.
    pub row_to_col: Vec<usize>,
    pub total: i64,
}

struct Solved {
    row_to_col: Vec<usize>,
    row_potential: Vec<i64>,
    col_potential: Vec<i64>,
}

fn hungarian(costs: &[Vec<i64>]) -> Solved {
    let n = costs.len();
    debug_assert!(costs.iter().all(|row| row.len() == n));
    let inf = i64::MAX / 4;
    // 1-based with a virtual column 0, as in the classic formulation.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
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

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    Solved {
        row_to_col,
        row_potential: u[1..].to_vec(),
        col_potential: v[1..].to_vec(),
    }
}

fn total_cost(costs: &[Vec<i64>], row_to_col: &[usize]) -> i64 {
    row_to_col.iter().enumerate().map(|(r, &c)| costs[r][c]).sum()
}

/// Any minimum-cost assignment.
pub fn solve(costs: &[Vec<i64>]) -> Assignment {
    let solved = hungarian(costs);
    let total = total_cost(costs, &solved.row_to_col);
    Assignment {
        row_to_col: solved.row_to_col,
        total,
    }
}

/// The minimum-cost assignment that is lexicographically smallest when rows
/// are visited in `row_order` and columns compared by `col_rank` (lower is
/// preferred).
///
/// After solving, rows are fixed one at a time: each takes the best-ranked
/// tight column that still admits a perfect tight matching of the remaining
/// rows. Feasibility is an alternating-cycle reachability test, so the whole
/// pass stays O(n^3).
pub fn solve_lexicographic(costs: &[Vec<i64>], row_order: &[usize], col_rank: &[usize]) -> Assignment {
    let n = costs.len();
    assert_eq!(row_order.len(), n, "row_order must be a permutation of rows");
    assert_eq!(col_rank.len(), n, "col_rank must rank every column");
    let solved = hungarian(costs);
    let tight = |r: usize, c: usize| costs[r][c] - solved.row_potential[r] - solved.col_potential[c] == 0;

    let mut row_to_col = solved.row_to_col;
    let mut col_to_row = vec![0usize; n];
    for (r, &c) in row_to_col.iter().enumerate() {
        col_to_row[c] = r;
    }
    debug_assert!((0..n).all(|r| tight(r, row_to_col[r])));

    let mut row_fixed = vec![false; n];
    let mut col_fixed = vec![false; n];

    for &row in row_order {
        let current = row_to_col[row];
        // Rows that can hand their column over along an alternating path
        // ending at `current`: reverse search from `current`.
        let mut reaches = vec![false; n];
        let mut col_seen = vec![false; n];
        let mut queue = VecDeque::from([current]);
        col_seen[current] = true;
        while let Some(col) = queue.pop_front() {
            for r in 0..n {
                if row_fixed[r] || reaches[r] || r == row || row_to_col[r] == col || !tight(r, col) {
                    continue;
                }
                reaches[r] = true;
                let next = row_to_col[r];
                if !col_seen[next] {
                    col_seen[next] = true;
                    queue.push_back(next);
                }
            }
        }

        let mut best = current;
        for c in 0..n {
            if col_fixed[c] || c == current || !tight(row, c) {
                continue;
            }
            if reaches[col_to_row[c]] && col_rank[c] < col_rank[best] {
                best = c;
            }
        }

        if best != current {
            rotate(row, best, current, &tight, &row_fixed, &mut row_to_col, &mut col_to_row);
        }
        row_fixed[row] = true;
        col_fixed[best] = true;
    }

    let total = total_cost(costs, &row_to_col);
    Assignment { row_to_col, total }
}

/// Moves `row` onto column `target` and shifts the displaced rows along a
/// tight alternating path until `freed` (the old column of `row`) is taken.
fn rotate(
    row: usize,
    target: usize,
    freed: usize,
    tight: &impl Fn(usize, usize) -> bool,
    row_fixed: &[bool],
    row_to_col: &mut [usize],
    col_to_row: &mut [usize],
) {
    let n = row_to_col.len();
    let start = col_to_row[target];
    // came_from[r] = previous row on the path
    let mut came_from: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut queue = VecDeque::from([start]);
    visited[start] = true;
    let mut last = None;
    'search: while let Some(r) = queue.pop_front() {
        for (c, &next) in col_to_row.iter().enumerate() {
            if c == row_to_col[r] || !tight(r, c) {
                continue;
            }
            if c == freed {
                last = Some(r);
                break 'search;
            }
            if next == row || row_fixed[next] || visited[next] {
                continue;
            }
            visited[next] = true;
            came_from[next] = Some(r);
            queue.push_back(next);
        }
    }
    let last = last.expect("alternating path exists for a feasible column");

    let mut path = vec![last];
    while let Some(prev) = came_from[*path.last().unwrap()] {
        path.push(prev);
    }
    path.reverse();
    // Each row takes the column currently held by its successor.
    let mut takes: Vec<usize> = path.windows(2).map(|w| row_to_col[w[1]]).collect();
    takes.push(freed);
    for (&r, &c) in path.iter().zip(&takes) {
        row_to_col[r] = c;
        col_to_row[c] = r;
    }
    row_to_col[row] = target;
    col_to_row[target] = row;
}
