//! Scalable shifted test functions (sphere, Schwefel 2.21, Rosenbrock,
//! Rastrigin, Griewank, Ackley) without bias terms: every optimum value is
//! zero and sits at the shift vector `o`.

use std::f64::consts::{E, PI};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contract::{Bounds, Objective};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionId {
    Sphere,
    Schwefel221,
    Rosenbrock,
    Rastrigin,
    Griewank,
    Ackley,
}

impl FunctionId {
    pub const ALL: [FunctionId; 6] = [
        FunctionId::Sphere,
        FunctionId::Schwefel221,
        FunctionId::Rosenbrock,
        FunctionId::Rastrigin,
        FunctionId::Griewank,
        FunctionId::Ackley,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionId::Sphere => "sphere",
            FunctionId::Schwefel221 => "schwefel221",
            FunctionId::Rosenbrock => "rosenbrock",
            FunctionId::Rastrigin => "rastrigin",
            FunctionId::Griewank => "griewank",
            FunctionId::Ackley => "ackley",
        }
    }

    /// Symmetric box half-width.
    pub fn half_width(self) -> f64 {
        match self {
            FunctionId::Sphere | FunctionId::Schwefel221 | FunctionId::Rosenbrock => 100.0,
            FunctionId::Rastrigin => 5.0,
            FunctionId::Griewank => 600.0,
            FunctionId::Ackley => 32.0,
        }
    }

    pub fn bounds(self) -> Bounds {
        let h = self.half_width();
        Bounds::new(-h, h)
    }

    /// Value at the shifted point `z = x - o`.
    pub fn value(self, z: &[f64]) -> f64 {
        match self {
            FunctionId::Sphere => z.iter().map(|v| v * v).sum(),
            FunctionId::Schwefel221 => z.iter().fold(0.0, |m, v| m.max(v.abs())),
            FunctionId::Rosenbrock => z
                .windows(2)
                .map(|w| {
                    // Shifted so the minimizer is z = 0.
                    let (a, b) = (w[0] + 1.0, w[1] + 1.0);
                    100.0 * (a * a - b).powi(2) + (a - 1.0).powi(2)
                })
                .sum(),
            FunctionId::Rastrigin => z
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                .sum(),
            FunctionId::Griewank => {
                let sum: f64 = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                // Clamp rounding noise below the optimum.
                (sum - prod + 1.0).max(0.0)
            }
            FunctionId::Ackley => {
                let n = z.len() as f64;
                let sq = z.iter().map(|v| v * v).sum::<f64>() / n;
                let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                // Grouped so the optimum evaluates to exactly zero.
                (20.0 * (1.0 - (-0.2 * sq.sqrt()).exp()) + (E - cs.exp())).max(0.0)
            }
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        let by_index = match s.as_str() {
            "f1" => Some(FunctionId::Sphere),
            "f2" => Some(FunctionId::Schwefel221),
            "f3" => Some(FunctionId::Rosenbrock),
            "f4" => Some(FunctionId::Rastrigin),
            "f5" => Some(FunctionId::Griewank),
            "f6" => Some(FunctionId::Ackley),
            _ => None,
        };
        by_index
            .or_else(|| FunctionId::ALL.into_iter().find(|f| f.name() == s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown benchmark function `{s}`")))
    }
}

/// Where the shift vector comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftSource {
    Seed(u64),
    File(std::path::PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkProblem {
    function: FunctionId,
    bounds: Vec<Bounds>,
    shift: Vec<f64>,
    evaluations: u64,
    scratch: Vec<f64>,
}

impl BenchmarkProblem {
    pub fn with_shift(function: FunctionId, shift: Vec<f64>) -> Result<Self> {
        if shift.is_empty() {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        let d = shift.len();
        Ok(Self {
            function,
            bounds: vec![function.bounds(); d],
            scratch: vec![0.0; d],
            shift,
            evaluations: 0,
        })
    }

    pub fn function(&self) -> FunctionId {
        self.function
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Evaluates `x`, counting the call.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        if x.len() != self.shift.len() {
            return Err(Error::InvalidArgument(format!(
                "expected a point of dimension {}, got {}",
                self.shift.len(),
                x.len()
            )));
        }
        for ((z, xi), oi) in self.scratch.iter_mut().zip(x).zip(&self.shift) {
            *z = xi - oi;
        }
        self.evaluations += 1;
        Ok(self.function.value(&self.scratch))
    }
}

impl Objective for BenchmarkProblem {
    fn dimension(&self) -> usize {
        self.shift.len()
    }

    fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    fn evaluate(&mut self, x: &[f64]) -> f64 {
        BenchmarkProblem::evaluate(self, x)
            .expect("optimizer passed a point of the wrong dimension")
    }
}

/// Shift drawn uniformly from the central half of the box.
pub fn seeded_shift(function: FunctionId, dimension: usize, seed: u64) -> Vec<f64> {
    let h = function.half_width() / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dimension).map(|_| rng.random_range(-h..=h)).collect()
}

/// Reads a shift file: one decimal value per line, exactly `dimension` lines
/// (blank lines ignored).
pub fn read_shift_file(path: &Path, dimension: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read shift file {}: {e}", path.display())))?;
    let values = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|e| Error::Format(format!("shift file line {}: `{l}`: {e}", i + 1)))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != dimension {
        return Err(Error::Format(format!(
            "shift file {} has {} values, expected {dimension}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}

pub fn write_shift_file(path: &Path, shift: &[f64]) -> Result<()> {
    let text: String = shift.iter().map(|v| format!("{v}\n")).collect();
    fs::write(path, text)?;
    Ok(())
}

pub fn make_problem(
    function: FunctionId,
    dimension: usize,
    source: &ShiftSource,
) -> Result<BenchmarkProblem> {
    if dimension == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let shift = match source {
        ShiftSource::Seed(seed) => seeded_shift(function, dimension, *seed),
        ShiftSource::File(path) => read_shift_file(path, dimension)?,
    };
    BenchmarkProblem::with_shift(function, shift)
}
