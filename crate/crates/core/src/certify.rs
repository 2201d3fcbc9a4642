//! Semi-device-independent certification from round records.
//!
//! The witness is the design-weighted average of the per-cell success
//! frequencies. Rounds are assumed i.i.d. from the design distribution, so
//! the per-round success indicator has the witness as its mean and a pooled
//! Hoeffding bound applies. The classical reference is the best 1-cbit
//! strategy, `balanced_partition_optimum(d, 2)`, which is 5/6 at `d = 3`.
//!
//! Coherence certification requires every cell's one-sided Hoeffding lower
//! bound at level `alpha / M` (Bonferroni over `M` cells) to exceed 1/2.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classical::balanced_partition_optimum;
use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::record::RoundRecord;

/// Name of the concentration bound recorded in reports.
pub const BOUND_NAME: &str = "hoeffding";

/// A cell count deviating from its design expectation by more than this many
/// standard deviations flags the input as not following the design.
pub const DESIGN_SIGMA_LIMIT: f64 = 5.0;

/// Per-cell trial and success counts, foldable and mergeable.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCounts {
    spec: GameSpec,
    /// `trials[j-1] = [n(a, j), n(b, j)]` for `S_j = {a, b}`.
    trials: Vec<[u64; 2]>,
    successes: Vec<[u64; 2]>,
}

impl CellCounts {
    pub fn new(d: usize) -> Result<Self> {
        let spec = GameSpec::canonical(d)?;
        let m = spec.num_sets();
        Ok(Self {
            spec,
            trials: vec![[0; 2]; m],
            successes: vec![[0; 2]; m],
        })
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    /// Adds one record; `location` names it in errors.
    pub fn add(&mut self, rec: &RoundRecord, location: impl FnOnce() -> String) -> Result<()> {
        rec.validate(&self.spec).map_err(|reason| Error::InvalidRecord {
            location: location(),
            reason,
        })?;
        let (a, _) = self.spec.pair(rec.j).expect("validated");
        let slot = usize::from(rec.x != a);
        self.trials[rec.j - 1][slot] += 1;
        self.successes[rec.j - 1][slot] += u64::from(rec.correct());
        Ok(())
    }

    /// Combines counts from another shard of the same game.
    pub fn merge(&mut self, other: &CellCounts) -> Result<()> {
        if other.spec.d() != self.spec.d() {
            return Err(Error::DimensionMismatch {
                strategy: other.spec.d(),
                game: self.spec.d(),
            });
        }
        for (mine, theirs) in self.trials.iter_mut().zip(&other.trials) {
            mine[0] += theirs[0];
            mine[1] += theirs[1];
        }
        for (mine, theirs) in self.successes.iter_mut().zip(&other.successes) {
            mine[0] += theirs[0];
            mine[1] += theirs[1];
        }
        Ok(())
    }

    /// `(n, s)` for cell `(i, j)`, or `None` if `i` is not in `S_j`.
    pub fn get(&self, i: usize, j: usize) -> Option<(u64, u64)> {
        let (a, b) = self.spec.pair(j).ok()?;
        let slot = if i == a {
            0
        } else if i == b {
            1
        } else {
            return None;
        };
        Some((self.trials[j - 1][slot], self.successes[j - 1][slot]))
    }

    /// All cells as `(i, j, n, s)` in set order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u64, u64)> + '_ {
        self.spec
            .pair_sets()
            .iter()
            .enumerate()
            .flat_map(move |(k, &(a, b))| {
                [
                    (a, k + 1, self.trials[k][0], self.successes[k][0]),
                    (b, k + 1, self.trials[k][1], self.successes[k][1]),
                ]
            })
    }

    pub fn total_rounds(&self) -> u64 {
        self.trials.iter().flatten().sum()
    }

    pub fn num_cells(&self) -> usize {
        2 * self.trials.len()
    }

    fn require_all_cells(&self) -> Result<()> {
        let empty: Vec<String> = self
            .iter()
            .filter(|c| c.2 == 0)
            .map(|(i, j, _, _)| format!("(i={i}, j={j})"))
            .collect();
        if empty.is_empty() {
            Ok(())
        } else {
            Err(Error::InsufficientData(format!(
                "no rounds for cell(s) {}",
                empty.join(", ")
            )))
        }
    }
}

/// Folds records into per-cell counts. Errors name the 1-based record number.
pub fn empirical_matrix<'a, I>(records: I, d: usize) -> Result<CellCounts>
where
    I: IntoIterator<Item = &'a RoundRecord>,
{
    let mut counts = CellCounts::new(d)?;
    for (k, rec) in records.into_iter().enumerate() {
        counts.add(rec, || format!("record {}", k + 1))?;
    }
    Ok(counts)
}

/// Folds a line-delimited record stream. Errors name the 1-based line.
pub fn counts_from_reader<R: std::io::BufRead>(input: R, d: usize) -> Result<CellCounts> {
    let mut counts = CellCounts::new(d)?;
    for item in crate::record::read_records(input) {
        let (line, rec) = item?;
        counts.add(&rec, || format!("line {line}"))?;
    }
    Ok(counts)
}

/// `sum_j w_j * 1/2 * sum_{i in S_j} s(i,j)/n(i,j)`.
pub fn witness_value(counts: &CellCounts, spec: &GameSpec) -> Result<f64> {
    if spec.d() != counts.spec.d() {
        return Err(Error::DimensionMismatch {
            strategy: counts.spec.d(),
            game: spec.d(),
        });
    }
    counts.require_all_cells()?;
    Ok(counts
        .trials
        .iter()
        .zip(&counts.successes)
        .zip(spec.set_distribution())
        .map(|((n, s), w)| w * 0.5 * (s[0] as f64 / n[0] as f64 + s[1] as f64 / n[1] as f64))
        .sum())
}

/// Two-sided Hoeffding radius for the mean of `n` variables in `[0, 1]`.
pub fn hoeffding_radius(n: u64, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// One-sided Hoeffding deviation at level `alpha`.
pub fn hoeffding_one_sided(n: u64, alpha: f64) -> f64 {
    ((1.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::domain(format!("alpha {alpha} outside (0, 0.5)")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QuantumnessVerdict {
    Quantum,
    NotCertified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoherenceVerdict {
    Coherent,
    NotCertified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DesignStatus {
    Consistent,
    MismatchedDesign,
}

impl fmt::Display for QuantumnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantumnessVerdict::Quantum => "QUANTUM",
            QuantumnessVerdict::NotCertified => "NOT_CERTIFIED",
        })
    }
}

impl fmt::Display for CoherenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoherenceVerdict::Coherent => "COHERENT",
            CoherenceVerdict::NotCertified => "NOT_CERTIFIED",
        })
    }
}

impl fmt::Display for DesignStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DesignStatus::Consistent => "CONSISTENT",
            DesignStatus::MismatchedDesign => "MISMATCHED_DESIGN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub i: usize,
    pub j: usize,
    pub n: u64,
    pub s: u64,
    pub frequency: f64,
    /// One-sided lower confidence bound at level `alpha / M`.
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignCheck {
    pub status: DesignStatus,
    /// Largest `|observed - expected| / sd` over the cells.
    pub max_deviation_sigma: f64,
    pub sigma_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub d: usize,
    pub total_rounds: u64,
    pub cells: Vec<CellReport>,
    pub witness_value: f64,
    pub classical_bound: f64,
    pub confidence_radius: f64,
    pub quantumness_verdict: QuantumnessVerdict,
    pub coherence_verdict: CoherenceVerdict,
    pub alpha: f64,
    pub bound: String,
    pub design_check: DesignCheck,
    pub version: String,
}

/// Compares observed cell counts with the design expectation `N w_j / 2`.
pub fn design_check(counts: &CellCounts) -> DesignCheck {
    let n = counts.total_rounds() as f64;
    let spec = &counts.spec;
    let max_dev = counts
        .iter()
        .map(|(i, j, obs, _)| {
            let p = spec.cell_probability(i, j);
            let sd = (n * p * (1.0 - p)).sqrt();
            let diff = (obs as f64 - n * p).abs();
            if sd > 0.0 {
                diff / sd
            } else if diff > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    DesignCheck {
        status: if max_dev > DESIGN_SIGMA_LIMIT {
            DesignStatus::MismatchedDesign
        } else {
            DesignStatus::Consistent
        },
        max_deviation_sigma: max_dev,
        sigma_limit: DESIGN_SIGMA_LIMIT,
    }
}

fn coherence_cells(counts: &CellCounts, alpha: f64) -> Vec<CellReport> {
    let per_cell_alpha = alpha / counts.num_cells() as f64;
    counts
        .iter()
        .map(|(i, j, n, s)| {
            let frequency = s as f64 / n as f64;
            CellReport {
                i,
                j,
                n,
                s,
                frequency,
                lower_bound: frequency - hoeffding_one_sided(n, per_cell_alpha),
            }
        })
        .collect()
}

/// Quantumness verdict on folded counts: QUANTUM iff
/// `witness - radius > classical_bound`.
pub fn quantumness_from_counts(counts: &CellCounts, alpha: f64) -> Result<(f64, f64, f64, QuantumnessVerdict)> {
    check_alpha(alpha)?;
    let witness = witness_value(counts, &counts.spec)?;
    let bound = balanced_partition_optimum(counts.spec.d(), 2)?;
    let radius = hoeffding_radius(counts.total_rounds(), alpha);
    let verdict = if witness - radius > bound {
        QuantumnessVerdict::Quantum
    } else {
        QuantumnessVerdict::NotCertified
    };
    Ok((witness, bound, radius, verdict))
}

pub fn coherence_from_counts(counts: &CellCounts, alpha: f64) -> Result<CoherenceVerdict> {
    check_alpha(alpha)?;
    counts.require_all_cells()?;
    let all_above = coherence_cells(counts, alpha).iter().all(|c| c.lower_bound > 0.5);
    Ok(if all_above {
        CoherenceVerdict::Coherent
    } else {
        CoherenceVerdict::NotCertified
    })
}

/// Full report from folded counts.
pub fn report_from_counts(counts: &CellCounts, alpha: f64) -> Result<WitnessReport> {
    let (witness_value, classical_bound, confidence_radius, quantumness_verdict) =
        quantumness_from_counts(counts, alpha)?;
    let coherence_verdict = coherence_from_counts(counts, alpha)?;
    Ok(WitnessReport {
        d: counts.spec.d(),
        total_rounds: counts.total_rounds(),
        cells: coherence_cells(counts, alpha),
        witness_value,
        classical_bound,
        confidence_radius,
        quantumness_verdict,
        coherence_verdict,
        alpha,
        bound: BOUND_NAME.to_string(),
        design_check: design_check(counts),
        version: crate::VERSION.to_string(),
    })
}

pub fn certify_quantumness<'a, I>(records: I, d: usize, alpha: f64) -> Result<WitnessReport>
where
    I: IntoIterator<Item = &'a RoundRecord>,
{
    check_alpha(alpha)?;
    let counts = empirical_matrix(records, d)?;
    report_from_counts(&counts, alpha)
}

pub fn certify_coherence<'a, I>(records: I, d: usize, alpha: f64) -> Result<CoherenceVerdict>
where
    I: IntoIterator<Item = &'a RoundRecord>,
{
    check_alpha(alpha)?;
    let counts = empirical_matrix(records, d)?;
    coherence_from_counts(&counts, alpha)
}
