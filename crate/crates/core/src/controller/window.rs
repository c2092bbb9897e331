//! Sliding-window credit assignment.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::record::EfficiencyRecord;

/// FIFO buffer holding the most recent `capacity` efficiency records.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowMemory {
    entries: VecDeque<EfficiencyRecord>,
    capacity: usize,
}

impl WindowMemory {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidArgument(
                "window capacity must be at least 1".into(),
            ));
        }
        Ok(Self {
            entries: VecDeque::with_capacity(capacity + 1),
            capacity,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends a record, evicting the oldest one when over capacity.
    pub fn push(&mut self, record: EfficiencyRecord) {
        self.entries.push_back(record);
        if self.entries.len() > self.capacity {
            self.entries.pop_front();
        }
    }

    /// Records oldest first.
    pub fn iter(&self) -> std::collections::vec_deque::Iter<'_, EfficiencyRecord> {
        self.entries.iter()
    }
}

impl Extend<EfficiencyRecord> for WindowMemory {
    fn extend<I: IntoIterator<Item = EfficiencyRecord>>(&mut self, iter: I) {
        for r in iter {
            self.push(r);
        }
    }
}

/// Min-max normalizes all efficiencies in the window jointly to `[0, 1]`.
///
/// A degenerate window (all efficiencies equal, including a single record)
/// maps every value to 0.5. Returns `(action, normalized)` in window order.
pub fn normalize_window(memory: &WindowMemory) -> Vec<(usize, f64)> {
    normalize_records(memory.iter())
}

pub(crate) fn normalize_records<'a, I>(records: I) -> Vec<(usize, f64)>
where
    I: IntoIterator<Item = &'a EfficiencyRecord>,
    I::IntoIter: Clone,
{
    let it = records.into_iter();
    let (lo, hi) = it
        .clone()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.efficiency), hi.max(r.efficiency))
        });
    let span = hi - lo;
    it.map(|r| {
        let v = if span > 0.0 {
            ((r.efficiency - lo) / span).clamp(0.0, 1.0)
        } else {
            0.5
        };
        (r.action, v)
    })
    .collect()
}

/// Per-action mean of the normalized records. Actions without any record in
/// the window get `f64::INFINITY`, which forces them to be tried next.
pub fn action_means(normalized: &[(usize, f64)], action_count: usize) -> Vec<f64> {
    let mut sums = vec![0.0; action_count];
    let mut counts = vec![0usize; action_count];
    for &(a, v) in normalized {
        if a < action_count {
            sums[a] += v;
            counts[a] += 1;
        }
    }
    sums.iter()
        .zip(&counts)
        .map(|(&s, &n)| if n == 0 { f64::INFINITY } else { s / n as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(action: usize, efficiency: f64) -> EfficiencyRecord {
        EfficiencyRecord::new(action, efficiency, 1.0).unwrap()
    }

    fn window(effs: &[(usize, f64)], cap: usize) -> WindowMemory {
        let mut w = WindowMemory::new(cap).unwrap();
        w.extend(effs.iter().map(|&(a, e)| rec(a, e)));
        w
    }

    fn values(v: &[(usize, f64)]) -> Vec<f64> {
        v.iter().map(|p| p.1).collect()
    }

    #[test]
    fn normalization_examples() {
        let w = window(&[(0, 2.0), (1, 4.0), (2, 6.0)], 5);
        assert_eq!(values(&normalize_window(&w)), vec![0.0, 0.5, 1.0]);

        let w = window(&[(0, 5.0), (1, 5.0), (2, 5.0)], 5);
        assert_eq!(values(&normalize_window(&w)), vec![0.5; 3]);

        let w = window(&[(1, 3.0)], 5);
        assert_eq!(normalize_window(&w), vec![(1, 0.5)]);
    }

    #[test]
    fn empty_window_normalizes_to_nothing() {
        let w = WindowMemory::new(3).unwrap();
        assert!(normalize_window(&w).is_empty());
    }

    #[test]
    fn mean_examples() {
        let inf = f64::INFINITY;
        assert_eq!(
            action_means(&[(0, 0.0), (0, 1.0), (1, 0.5)], 3),
            vec![0.5, 0.5, inf]
        );
        assert_eq!(action_means(&[], 3), vec![inf; 3]);
        assert_eq!(action_means(&[(0, 1.0)], 1), vec![1.0]);
    }

    #[test]
    fn eviction_keeps_last_entries_in_order() {
        let w = window(&[(0, 1.0), (1, 2.0), (2, 3.0), (0, 4.0)], 3);
        let effs: Vec<f64> = w.iter().map(|r| r.efficiency).collect();
        assert_eq!(effs, vec![2.0, 3.0, 4.0]);
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn zero_capacity_rejected() {
        assert!(WindowMemory::new(0).is_err());
    }
}
