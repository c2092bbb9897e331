//! Local alignment of decision sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignmentScoring {
    #[serde(rename = "match")]
    pub match_score: f64,
    pub mismatch: f64,
    pub gap: f64,
}

impl Default for AlignmentScoring {
    fn default() -> Self {
        Self {
            match_score: 2.0,
            mismatch: -1.0,
            gap: -1.0,
        }
    }
}

impl AlignmentScoring {
    pub fn new(match_score: f64, mismatch: f64, gap: f64) -> Result<Self> {
        let s = Self {
            match_score,
            mismatch,
            gap,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.match_score > 0.0 && self.mismatch <= 0.0 && self.gap <= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "alignment scoring needs match > 0, mismatch <= 0, gap <= 0; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Best local alignment score between two action sequences.
///
/// Linear gap penalty, two rolling rows of the DP table.
pub fn smith_waterman(a: &[usize], b: &[usize], scoring: &AlignmentScoring) -> f64 {
    let mut prev = vec![0.0; b.len() + 1];
    let mut cur = vec![0.0; b.len() + 1];
    let mut best = 0.0f64;
    for &x in a {
        for (j, &y) in b.iter().enumerate() {
            let s = if x == y {
                scoring.match_score
            } else {
                scoring.mismatch
            };
            let h = (prev[j] + s)
                .max(prev[j + 1] + scoring.gap)
                .max(cur[j] + scoring.gap)
                .max(0.0);
            cur[j + 1] = h;
            best = best.max(h);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Score divided by the best attainable score for the shorter sequence.
pub fn normalized_smith_waterman(a: &[usize], b: &[usize], scoring: &AlignmentScoring) -> f64 {
    let shortest = a.len().min(b.len());
    if shortest == 0 {
        return 0.0;
    }
    smith_waterman(a, b, scoring) / (scoring.match_score * shortest as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub raw: Vec<Vec<f64>>,
    pub normalized: Vec<Vec<f64>>,
}

/// Mean pairwise alignment score between groups of sequences.
///
/// Off-diagonal entries average over all cross pairs; diagonal entries over
/// all pairs of distinct runs (or the run with itself when a group has one).
pub fn similarity_matrix(
    groups: &[Vec<Vec<usize>>],
    scoring: &AlignmentScoring,
) -> Result<SimilarityMatrix> {
    if groups.iter().any(Vec::is_empty) {
        return Err(Error::InvalidArgument(
            "every group needs at least one run".into(),
        ));
    }
    let g = groups.len();
    let mut raw = vec![vec![0.0; g]; g];
    let mut normalized = vec![vec![0.0; g]; g];
    for i in 0..g {
        for j in i..g {
            let (mut sum_raw, mut sum_norm, mut count) = (0.0, 0.0, 0usize);
            for (p, a) in groups[i].iter().enumerate() {
                for (q, b) in groups[j].iter().enumerate() {
                    if i == j && groups[i].len() > 1 && q <= p {
                        continue;
                    }
                    sum_raw += smith_waterman(a, b, scoring);
                    sum_norm += normalized_smith_waterman(a, b, scoring);
                    count += 1;
                }
            }
            let (r, n) = (sum_raw / count as f64, sum_norm / count as f64);
            raw[i][j] = r;
            raw[j][i] = r;
            normalized[i][j] = n;
            normalized[j][i] = n;
        }
    }
    Ok(SimilarityMatrix { raw, normalized })
}
