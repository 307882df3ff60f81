//! Depth-first search over vertex assignments.
//!
//! Vertex `k` of the first graph is assigned to a vertex of the second graph
//! at depth `k`, candidates in ascending order, so leaves are visited in
//! lexicographic order of the assignment. The objective is the pair
//! `(total, edge)` compared lexicographically, packed into one integer key.

use rand::{Rng, RngCore};

use super::assignment::min_assignment_cost;

pub(crate) struct Outcome {
    /// `sigma[i]` is the vertex of the second graph matched to vertex `i`.
    pub sigma: Vec<usize>,
    pub total: u32,
    pub edge: u32,
}

pub(crate) fn search(
    n: usize,
    a: &[u32],
    b: &[u32],
    pruning: bool,
    ties: Option<&mut dyn RngCore>,
) -> Outcome {
    let mut dfs = Dfs {
        n,
        a,
        b,
        weight: (n * n + 1) as u64,
        pruning,
        sigma: vec![0; n],
        used: vec![false; n],
        best_key: u64::MAX,
        best: Vec::new(),
        best_total: 0,
        best_edge: 0,
        tie_count: 0,
        rng: ties,
        cross: if pruning {
            vec![vec![0; n * n]; n + 1]
        } else {
            Vec::new()
        },
        scratch: Vec::new(),
        rows: Vec::with_capacity(n),
        cols: Vec::with_capacity(n),
    };
    if pruning {
        for u in 0..n {
            for w in 0..n {
                dfs.cross[0][u * n + w] = i64::from(a[u * n + u] != b[w * n + w]);
            }
        }
    }
    dfs.descend(0, 0, 0);
    Outcome {
        sigma: dfs.best,
        total: dfs.best_total,
        edge: dfs.best_edge,
    }
}

struct Dfs<'a, 'r> {
    n: usize,
    a: &'a [u32],
    b: &'a [u32],
    weight: u64,
    pruning: bool,
    sigma: Vec<usize>,
    used: Vec<bool>,
    best_key: u64,
    best: Vec<usize>,
    best_total: u32,
    best_edge: u32,
    tie_count: u64,
    rng: Option<&'r mut dyn RngCore>,
    /// `cross[depth][u * n + w]`: diagonal mismatch of `u -> w` plus edge
    /// mismatches between `u`/`w` and the first `depth` assigned pairs.
    cross: Vec<Vec<i64>>,
    scratch: Vec<i64>,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Dfs<'_, '_> {
    #[inline]
    fn a(&self, i: usize, j: usize) -> u32 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn b(&self, i: usize, j: usize) -> u32 {
        self.b[i * self.n + j]
    }

    #[inline]
    fn key(&self, total: u32, edge: u32) -> u64 {
        u64::from(total) * self.weight + u64::from(edge)
    }

    #[inline]
    fn pruned(&self, lower: u64) -> bool {
        if self.rng.is_some() {
            lower > self.best_key
        } else {
            lower >= self.best_key
        }
    }

    fn descend(&mut self, k: usize, total: u32, edge: u32) {
        let n = self.n;
        if k == n {
            self.leaf(total, edge);
            return;
        }
        for v in 0..n {
            if self.used[v] {
                continue;
            }
            let diag = u32::from(self.a(k, k) != self.b(v, v));
            let mut inc_edge = 0;
            for i in 0..k {
                let s = self.sigma[i];
                inc_edge += u32::from(self.a(k, i) != self.b(v, s));
                inc_edge += u32::from(self.a(i, k) != self.b(s, v));
            }
            let child_total = total + diag + inc_edge;
            let child_edge = edge + inc_edge;
            if self.pruning {
                if self.pruned(self.key(child_total, child_edge)) {
                    continue;
                }
                let lb = self.remaining_bound(k, v);
                if self.pruned(self.key(child_total + lb, child_edge)) {
                    continue;
                }
            }
            self.sigma[k] = v;
            self.used[v] = true;
            self.descend(k + 1, child_total, child_edge);
            self.used[v] = false;
        }
    }

    fn leaf(&mut self, total: u32, edge: u32) {
        let key = self.key(total, edge);
        let take = if key < self.best_key {
            self.tie_count = 1;
            true
        } else if key == self.best_key {
            match self.rng.as_deref_mut() {
                Some(rng) => {
                    self.tie_count += 1;
                    rng.random_range(0..self.tie_count) == 0
                }
                None => false,
            }
        } else {
            false
        };
        if take {
            self.best_key = key;
            self.best_total = total;
            self.best_edge = edge;
            self.best.clear();
            self.best.extend_from_slice(&self.sigma);
        }
    }

    /// Admissible bound on the cost of completing the assignment after
    /// `k -> v`: an optimal assignment over the unassigned vertices, where a
    /// pair's cost counts its diagonal mismatch, its edge mismatches against
    /// already-assigned vertices, and half the in/out degree gap within the
    /// unassigned subgraphs (costs doubled to stay integral).
    fn remaining_bound(&mut self, k: usize, v: usize) -> u32 {
        let n = self.n;
        self.rows.clear();
        self.rows.extend(k + 1..n);
        self.cols.clear();
        for w in 0..n {
            if !self.used[w] && w != v {
                self.cols.push(w);
            }
        }
        let r = self.rows.len();
        if r == 0 {
            return 0;
        }

        let (head, tail) = self.cross.split_at_mut(k + 1);
        let prev = &head[k];
        let next = &mut tail[0];
        for &u in &self.rows {
            let a_uk = self.a[u * n + k];
            let a_ku = self.a[k * n + u];
            for &w in &self.cols {
                let mism =
                    u32::from(a_uk != self.b[w * n + v]) + u32::from(a_ku != self.b[v * n + w]);
                next[u * n + w] = prev[u * n + w] + i64::from(mism);
            }
        }

        let degree = |m: &[u32], set: &[usize], x: usize| -> (i64, i64) {
            let mut out = 0;
            let mut inc = 0;
            for &y in set {
                if y != x {
                    out += i64::from(m[x * n + y]);
                    inc += i64::from(m[y * n + x]);
                }
            }
            (out, inc)
        };

        self.scratch.clear();
        self.scratch.resize(r * r, 0);
        let col_deg: Vec<(i64, i64)> = self
            .cols
            .iter()
            .map(|&w| degree(self.b, &self.cols, w))
            .collect();
        for (ri, &u) in self.rows.iter().enumerate() {
            let (out_u, in_u) = degree(self.a, &self.rows, u);
            for (ci, &w) in self.cols.iter().enumerate() {
                let (out_w, in_w) = col_deg[ci];
                self.scratch[ri * r + ci] =
                    2 * self.cross[k + 1][u * n + w] + (out_u - out_w).abs() + (in_u - in_w).abs();
            }
        }
        let doubled = min_assignment_cost(r, &self.scratch);
        ((doubled + 1) / 2) as u32
    }
}
