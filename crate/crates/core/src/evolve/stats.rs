//! Parent-pair statistics for crossover events and simple order statistics.

use std::collections::BTreeMap;

use serde::Serialize;

/// Edge distances and edge counts of one crossover's parents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParentEvent {
    /// Off-diagonal component of the GED from the target to parent 1.
    pub d_opt_p1: u32,
    /// Off-diagonal component of the GED between the parents.
    pub d_p1_p2: u32,
    pub n1_p1: usize,
    pub n1_p2: usize,
}

/// Counts over `(d_opt_p1, d_p1_p2)` and `(n1_p1, n1_p2)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParentStats {
    pub d: BTreeMap<(u32, u32), u64>,
    pub n1: BTreeMap<(usize, usize), u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyRow<K> {
    pub x: K,
    pub y: K,
    pub count: u64,
    pub frequency: f64,
}

impl ParentStats {
    pub fn add(&mut self, e: &ParentEvent) {
        *self.d.entry((e.d_opt_p1, e.d_p1_p2)).or_default() += 1;
        *self.n1.entry((e.n1_p1, e.n1_p2)).or_default() += 1;
    }

    pub fn merge(&mut self, other: &ParentStats) {
        for (&k, &v) in &other.d {
            *self.d.entry(k).or_default() += v;
        }
        for (&k, &v) in &other.n1 {
            *self.n1.entry(k).or_default() += v;
        }
    }

    pub fn events(&self) -> u64 {
        self.d.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Relative frequencies over `(d_opt_p1, d_p1_p2)`.
    pub fn d_table(&self) -> Vec<FrequencyRow<u32>> {
        normalize(&self.d)
    }

    /// Relative frequencies over `(n1_p1, n1_p2)`.
    pub fn n1_table(&self) -> Vec<FrequencyRow<usize>> {
        normalize(&self.n1)
    }
}

fn normalize<K: Copy>(counts: &BTreeMap<(K, K), u64>) -> Vec<FrequencyRow<K>> {
    let total: u64 = counts.values().sum();
    counts
        .iter()
        .map(|(&(x, y), &count)| FrequencyRow {
            x,
            y,
            count,
            frequency: count as f64 / total as f64,
        })
        .collect()
}

pub fn collect_parent_stats<'a>(events: impl IntoIterator<Item = &'a ParentEvent>) -> ParentStats {
    let mut stats = ParentStats::default();
    for e in events {
        stats.add(e);
    }
    stats
}

/// Linear-interpolation quantile of sorted data, `q` in `[0, 1]`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        len => {
            let pos = q.clamp(0.0, 1.0) * (len - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}
