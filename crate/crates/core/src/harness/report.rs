//! Comparison report assembled from run records alone.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::align::{similarity_matrix, AlignmentScoring, SimilarityMatrix};
use super::stats::{friedman_test, mean_std, paired_t_test, Comparison, Tally};
use crate::benchmarks::FunctionId;
use crate::error::{Error, Result};
use crate::record::RunRecord;

/// A problem instance as it appears in records.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProblemKey {
    pub problem: String,
    pub dimension: usize,
}

impl ProblemKey {
    fn of(record: &RunRecord) -> Self {
        Self {
            problem: record
                .config
                .problem
                .clone()
                .unwrap_or_else(|| "problem".into()),
            dimension: record.config.dimension,
        }
    }

    pub fn slug(&self) -> String {
        format!("{}-d{}", self.problem, self.dimension)
    }

    fn sort_key(&self) -> (usize, &str, usize) {
        let idx = self
            .problem
            .parse::<FunctionId>()
            .ok()
            .and_then(|f| FunctionId::ALL.iter().position(|g| *g == f))
            .unwrap_or(usize::MAX);
        (idx, &self.problem, self.dimension)
    }
}

fn policy_sort_key(label: &str) -> (u8, &str) {
    match label {
        "ter" => (0, label),
        "random" => (1, label),
        l if l.starts_with("single:") => (2, label),
        _ => (3, label),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub problem: String,
    pub dimension: usize,
    pub policy: String,
    pub runs: usize,
    /// Statistics of the final error `y_best` (every optimum is zero).
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub mean_sequence_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedCell {
    pub problem: String,
    pub dimension: usize,
    pub pairs: usize,
    pub t: f64,
    pub p_value: f64,
    pub decision: Comparison,
}

/// Paired t-tests of `first` against `second` over every shared problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub first: String,
    pub second: String,
    pub cells: Vec<PairedCell>,
    pub tally: Tally,
    /// `smaller/indistinct/greater` counts for `first` versus `second`.
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanSummary {
    pub policies: Vec<String>,
    pub problems: Vec<String>,
    pub statistic: f64,
    pub p_value: f64,
    pub mean_ranks: Vec<f64>,
}

/// Best single-heuristic policy by mean error on one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSingle {
    pub problem: String,
    pub dimension: usize,
    pub policy: String,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSimilarity {
    pub problem: String,
    pub dimension: usize,
    pub policies: Vec<String>,
    pub matrix: SimilarityMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub alpha: f64,
    pub scoring: AlignmentScoring,
    pub problems: Vec<ProblemKey>,
    pub policies: Vec<String>,
    pub cells: Vec<CellSummary>,
    pub comparisons: Vec<PairwiseComparison>,
    pub friedman: Option<FriedmanSummary>,
    pub best_single: Vec<BestSingle>,
    pub similarity: Vec<ProblemSimilarity>,
}

impl ComparisonReport {
    pub fn cell(&self, problem: &str, dimension: usize, policy: &str) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.problem == problem && c.dimension == dimension && c.policy == policy)
    }

    pub fn comparison(&self, first: &str, second: &str) -> Option<&PairwiseComparison> {
        self.comparisons
            .iter()
            .find(|c| c.first == first && c.second == second)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

type Cells<'a> = BTreeMap<(usize, String), Vec<&'a RunRecord>>;

/// Builds the report. Depends only on the set of records, not their order.
pub fn build_report(
    records: &[RunRecord],
    scoring: &AlignmentScoring,
    alpha: f64,
) -> Result<ComparisonReport> {
    scoring.validate()?;
    if records.is_empty() {
        return Err(Error::InvalidArgument("no run records to report on".into()));
    }

    let mut problems: Vec<ProblemKey> = Vec::new();
    let mut policies: Vec<String> = Vec::new();
    for r in records {
        let key = ProblemKey::of(r);
        if !problems.contains(&key) {
            problems.push(key);
        }
        if !policies.contains(&r.config.policy) {
            policies.push(r.config.policy.clone());
        }
    }
    problems.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    policies.sort_by(|a, b| policy_sort_key(a).cmp(&policy_sort_key(b)));

    // (problem index, policy) -> records sorted by seed.
    let mut cells: Cells<'_> = BTreeMap::new();
    for r in records {
        let p = problems
            .iter()
            .position(|k| *k == ProblemKey::of(r))
            .unwrap();
        cells
            .entry((p, r.config.policy.clone()))
            .or_default()
            .push(r);
    }
    for runs in cells.values_mut() {
        runs.sort_by_key(|r| r.seed);
        if runs.windows(2).any(|w| w[0].seed == w[1].seed) {
            return Err(Error::InvalidArgument(format!(
                "duplicate seed {} for policy {}",
                runs[0].seed, runs[0].config.policy
            )));
        }
    }

    let mut summaries = Vec::new();
    for (pi, key) in problems.iter().enumerate() {
        for pol in &policies {
            let Some(runs) = cells.get(&(pi, pol.clone())) else {
                continue;
            };
            let finals: Vec<f64> = runs.iter().map(|r| r.final_value).collect();
            let (mean, std) = mean_std(&finals);
            let lengths: Vec<f64> = runs
                .iter()
                .map(|r| r.action_sequence.len() as f64)
                .collect();
            summaries.push(CellSummary {
                problem: key.problem.clone(),
                dimension: key.dimension,
                policy: pol.clone(),
                runs: runs.len(),
                mean,
                std,
                min: finals.iter().copied().fold(f64::INFINITY, f64::min),
                max: finals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean_sequence_length: mean_std(&lengths).0,
            });
        }
    }

    let mut comparisons = Vec::new();
    for (i, first) in policies.iter().enumerate() {
        for second in &policies[i + 1..] {
            comparisons.push(compare(&problems, &cells, first, second, alpha)?);
        }
    }

    let friedman = friedman_summary(&problems, &policies, &summaries)?;

    let best_single = problems
        .iter()
        .filter_map(|k| {
            summaries
                .iter()
                .filter(|c| {
                    c.problem == k.problem
                        && c.dimension == k.dimension
                        && c.policy.starts_with("single:")
                })
                .min_by(|a, b| a.mean.total_cmp(&b.mean))
                .map(|c| BestSingle {
                    problem: k.problem.clone(),
                    dimension: k.dimension,
                    policy: c.policy.clone(),
                    mean: c.mean,
                })
        })
        .collect();

    let mut similarity = Vec::new();
    for (pi, key) in problems.iter().enumerate() {
        let present: Vec<&String> = policies
            .iter()
            .filter(|p| cells.contains_key(&(pi, (*p).clone())))
            .collect();
        let groups: Vec<Vec<Vec<usize>>> = present
            .iter()
            .map(|p| {
                cells[&(pi, (*p).clone())]
                    .iter()
                    .map(|r| r.action_sequence.clone())
                    .collect()
            })
            .collect();
        similarity.push(ProblemSimilarity {
            problem: key.problem.clone(),
            dimension: key.dimension,
            policies: present.into_iter().cloned().collect(),
            matrix: similarity_matrix(&groups, scoring)?,
        });
    }

    Ok(ComparisonReport {
        alpha,
        scoring: *scoring,
        problems,
        policies,
        cells: summaries,
        comparisons,
        friedman,
        best_single,
        similarity,
    })
}

fn compare(
    problems: &[ProblemKey],
    cells: &Cells<'_>,
    first: &str,
    second: &str,
    alpha: f64,
) -> Result<PairwiseComparison> {
    let mut out = Vec::new();
    for (pi, key) in problems.iter().enumerate() {
        let (Some(a), Some(b)) = (
            cells.get(&(pi, first.to_owned())),
            cells.get(&(pi, second.to_owned())),
        ) else {
            continue;
        };
        // Pair runs by seed: same shift, same starting point.
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for ra in a {
            if let Some(rb) = b.iter().find(|rb| rb.seed == ra.seed) {
                xs.push(ra.final_value);
                ys.push(rb.final_value);
            }
        }
        if xs.len() < 2 {
            continue;
        }
        let t = paired_t_test(&xs, &ys, alpha)?;
        out.push(PairedCell {
            problem: key.problem.clone(),
            dimension: key.dimension,
            pairs: xs.len(),
            t: t.t,
            p_value: t.p_value,
            decision: t.decision,
        });
    }
    let tally: Tally = out.iter().map(|c| c.decision).collect();
    Ok(PairwiseComparison {
        first: first.to_owned(),
        second: second.to_owned(),
        cells: out,
        summary: tally.to_string(),
        tally,
    })
}

fn friedman_summary(
    problems: &[ProblemKey],
    policies: &[String],
    summaries: &[CellSummary],
) -> Result<Option<FriedmanSummary>> {
    if policies.len() < 2 || problems.len() < 2 {
        return Ok(None);
    }
    let mut matrix = Vec::with_capacity(policies.len());
    for pol in policies {
        let mut row = Vec::with_capacity(problems.len());
        for k in problems {
            match summaries
                .iter()
                .find(|c| &c.policy == pol && c.problem == k.problem && c.dimension == k.dimension)
            {
                Some(c) => row.push(c.mean),
                None => return Ok(None),
            }
        }
        matrix.push(row);
    }
    let f = friedman_test(&matrix)?;
    Ok(Some(FriedmanSummary {
        policies: policies.to_vec(),
        problems: problems.iter().map(ProblemKey::slug).collect(),
        statistic: f.statistic,
        p_value: f.p_value,
        mean_ranks: f.mean_ranks,
    }))
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("csv: {other:?}")),
    }
}

/// Writes `report/` under `root`: `report.json`, CSV tables, and one curve
/// CSV per run.
pub fn write_report(root: &Path, report: &ComparisonReport, records: &[RunRecord]) -> Result<()> {
    let dir = root.join("report");
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("report.json"), report.to_json()?)?;

    let mut w = csv::Writer::from_path(dir.join("summary.csv")).map_err(csv_error)?;
    w.write_record([
        "problem",
        "dimension",
        "policy",
        "runs",
        "mean",
        "std",
        "min",
        "max",
        "mean_sequence_length",
    ])
    .map_err(csv_error)?;
    for c in &report.cells {
        w.write_record([
            c.problem.clone(),
            c.dimension.to_string(),
            c.policy.clone(),
            c.runs.to_string(),
            c.mean.to_string(),
            c.std.to_string(),
            c.min.to_string(),
            c.max.to_string(),
            c.mean_sequence_length.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("ttests.csv")).map_err(csv_error)?;
    w.write_record([
        "first",
        "second",
        "problem",
        "dimension",
        "pairs",
        "t",
        "p_value",
        "decision",
    ])
    .map_err(csv_error)?;
    for cmp in &report.comparisons {
        for c in &cmp.cells {
            let decision = match c.decision {
                Comparison::FirstSmaller => "<",
                Comparison::Indistinct => "~",
                Comparison::FirstGreater => ">",
            };
            w.write_record([
                cmp.first.clone(),
                cmp.second.clone(),
                c.problem.clone(),
                c.dimension.to_string(),
                c.pairs.to_string(),
                c.t.to_string(),
                c.p_value.to_string(),
                decision.to_owned(),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("ttest_summary.csv")).map_err(csv_error)?;
    w.write_record(["first", "second", "smaller", "indistinct", "greater"])
        .map_err(csv_error)?;
    for cmp in &report.comparisons {
        w.write_record([
            cmp.first.clone(),
            cmp.second.clone(),
            cmp.tally.smaller.to_string(),
            cmp.tally.indistinct.to_string(),
            cmp.tally.greater.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;

    if let Some(f) = &report.friedman {
        let mut w = csv::Writer::from_path(dir.join("friedman.csv")).map_err(csv_error)?;
        w.write_record(["policy", "mean_rank"]).map_err(csv_error)?;
        for (p, r) in f.policies.iter().zip(&f.mean_ranks) {
            w.write_record([p.clone(), r.to_string()])
                .map_err(csv_error)?;
        }
        w.flush()?;
    }

    for s in &report.similarity {
        for (kind, m) in [("raw", &s.matrix.raw), ("normalized", &s.matrix.normalized)] {
            let path = dir.join(format!(
                "similarity-{}-d{}-{kind}.csv",
                s.problem, s.dimension
            ));
            let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
            let mut header = vec![String::from("policy")];
            header.extend(s.policies.iter().cloned());
            w.write_record(&header).map_err(csv_error)?;
            for (p, row) in s.policies.iter().zip(m) {
                let mut line = vec![p.clone()];
                line.extend(row.iter().map(f64::to_string));
                w.write_record(&line).map_err(csv_error)?;
            }
            w.flush()?;
        }
    }

    for r in records {
        let key = ProblemKey::of(r);
        let path = dir
            .join("curves")
            .join(key.slug())
            .join(r.config.policy.replace(':', "-"))
            .join(format!("run-{}.csv", r.seed));
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        r.write_curve_csv(&path)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::RunConfig;
    use crate::resource::ResourceKind;

    fn record(
        problem: &str,
        policy: &str,
        seed: u64,
        final_value: f64,
        seq: Vec<usize>,
    ) -> RunRecord {
        RunRecord {
            curve: vec![(1.0, 10.0), (2.0, final_value)],
            initiations: Vec::new(),
            initial_value: 10.0,
            final_value,
            overall_improvement: 10.0 - final_value,
            overall_efficiency: (10.0 - final_value) / 2.0,
            consumed: 2.0,
            seed,
            action_sequence: seq,
            config: RunConfig {
                policy: policy.into(),
                tau: None,
                window: None,
                heuristics: vec!["ls1".into()],
                budget: 2.0,
                resource: ResourceKind::EvaluationCount,
                problem: Some(problem.into()),
                dimension: 2,
            },
        }
    }

    #[test]
    fn single_run_has_zero_std() {
        let r = build_report(
            &[record("sphere", "ter", 0, 3.0, vec![0])],
            &AlignmentScoring::default(),
            0.05,
        )
        .unwrap();
        let c = r.cell("sphere", 2, "ter").unwrap();
        assert_eq!((c.mean, c.std, c.runs), (3.0, 0.0, 1));
        assert!(r.friedman.is_none());
    }

    #[test]
    fn two_policies_give_one_comparison() {
        let recs: Vec<RunRecord> = (0..4)
            .flat_map(|s| {
                [
                    record("sphere", "ter", s, 1.0 + s as f64 * 0.1, vec![0, 1]),
                    record("sphere", "random", s, 5.0 + s as f64 * 0.3, vec![1, 0]),
                ]
            })
            .collect();
        let r = build_report(&recs, &AlignmentScoring::default(), 0.05).unwrap();
        assert_eq!(r.policies, vec!["ter", "random"]);
        assert_eq!(r.comparisons.len(), 1);
        let cmp = r.comparison("ter", "random").unwrap();
        assert_eq!(cmp.cells.len(), 1);
        assert_eq!(cmp.summary, "1/0/0");
        assert_eq!(cmp.tally.total(), cmp.cells.len());
    }

    #[test]
    fn order_independent() {
        let mut recs = vec![
            record("sphere", "single:ls1", 0, 1.0, vec![0]),
            record("ackley", "ter", 0, 2.0, vec![0, 1]),
            record("sphere", "ter", 1, 0.5, vec![2]),
            record("sphere", "ter", 0, 0.25, vec![1]),
            record("ackley", "single:ls1", 0, 4.0, vec![0]),
        ];
        let a = build_report(&recs, &AlignmentScoring::default(), 0.05).unwrap();
        recs.reverse();
        let b = build_report(&recs, &AlignmentScoring::default(), 0.05).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.problems[0].problem, "sphere");
        assert_eq!(a.best_single.len(), 2);
        let f = a.friedman.as_ref().unwrap();
        assert_eq!(f.mean_ranks, vec![1.0, 2.0]);
    }

    #[test]
    fn similarity_is_symmetric() {
        let recs = vec![
            record("sphere", "ter", 0, 1.0, vec![0, 1, 2]),
            record("sphere", "ter", 1, 1.0, vec![0, 1, 2]),
            record("sphere", "random", 0, 1.0, vec![2, 2, 1]),
        ];
        let r = build_report(&recs, &AlignmentScoring::default(), 0.05).unwrap();
        let m = &r.similarity[0].matrix.raw;
        assert_eq!(m[0][0], 6.0);
        assert_eq!(m[0][1], m[1][0]);
        assert!(m.iter().flatten().all(|&v| v >= 0.0));
    }

    #[test]
    fn duplicate_seed_rejected() {
        let recs = vec![
            record("sphere", "ter", 0, 1.0, vec![0]),
            record("sphere", "ter", 0, 2.0, vec![0]),
        ];
        assert!(build_report(&recs, &AlignmentScoring::default(), 0.05).is_err());
        assert!(build_report(&[], &AlignmentScoring::default(), 0.05).is_err());
    }

    #[test]
    fn writes_tables() {
        let dir = tempfile::tempdir().unwrap();
        let recs = vec![
            record("sphere", "ter", 0, 1.0, vec![0]),
            record("sphere", "ter", 1, 2.0, vec![0]),
            record("sphere", "random", 0, 3.0, vec![0]),
            record("sphere", "random", 1, 5.0, vec![0]),
        ];
        let r = build_report(&recs, &AlignmentScoring::default(), 0.05).unwrap();
        write_report(dir.path(), &r, &recs).unwrap();
        let d = dir.path().join("report");
        for f in [
            "report.json",
            "summary.csv",
            "ttests.csv",
            "ttest_summary.csv",
        ] {
            assert!(d.join(f).is_file(), "{f}");
        }
        assert!(d.join("curves/sphere-d2/random/run-1.csv").is_file());
        let summary = fs::read_to_string(d.join("summary.csv")).unwrap();
        assert!(summary.starts_with("problem,dimension,policy,runs,mean,std"));
        assert_eq!(summary.lines().count(), 3);
    }
}
