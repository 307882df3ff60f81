//! Minimum-cost perfect assignment (Hungarian method with potentials).

/// Returns the minimum total cost of assigning every row of the square
/// `size × size` matrix `cost` (row-major) to a distinct column.
pub fn min_assignment_cost(size: usize, cost: &[i64]) -> i64 {
    debug_assert_eq!(cost.len(), size * size);
    if size == 0 {
        return 0;
    }
    const INF: i64 = i64::MAX / 4;
    // 1-based potentials; column 0 is the virtual start.
    let mut u = vec![0i64; size + 1];
    let mut v = vec![0i64; size + 1];
    let mut matched_row = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    let mut min_v = vec![INF; size + 1];
    let mut used = vec![false; size + 1];

    for row in 1..=size {
        matched_row[0] = row;
        let mut col0 = 0;
        min_v.iter_mut().for_each(|m| *m = INF);
        used.iter_mut().for_each(|f| *f = false);
        loop {
            used[col0] = true;
            let row0 = matched_row[col0];
            let mut delta = INF;
            let mut col1 = 0;
            for col in 1..=size {
                if used[col] {
                    continue;
                }
                let reduced = cost[(row0 - 1) * size + (col - 1)] - u[row0] - v[col];
                if reduced < min_v[col] {
                    min_v[col] = reduced;
                    way[col] = col0;
                }
                if min_v[col] < delta {
                    delta = min_v[col];
                    col1 = col;
                }
            }
            for col in 0..=size {
                if used[col] {
                    u[matched_row[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_v[col] -= delta;
                }
            }
            col0 = col1;
            if matched_row[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            matched_row[col0] = matched_row[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    (1..=size)
        .map(|col| cost[(matched_row[col] - 1) * size + (col - 1)])
        .sum()
}
