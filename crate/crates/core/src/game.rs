//! Canonical game specification and exact success-matrix evaluation.
//!
//! Values are indexed `1..=d`. Pair sets are the two-element subsets of
//! `{1..d}` in lexicographic order, indexed `1..=d(d-1)/2`. For `d = 4` this
//! order is `{1,2},{1,3},{1,4},{2,3},{2,4},{3,4}`.
//!
//! The input distribution picks `j` from `set_distribution`, then one of the
//! two members of `S_j` uniformly. Shared randomness between the parties is
//! not modeled; for the average-success functional deterministic classical
//! encodings are extremal, so the classical optimum is unchanged.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::Ensemble;
use crate::qubit::helstrom_success;
use crate::{EPS_ALG, EPS_NUM};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameSpec {
    d: usize,
    pair_sets: Vec<(usize, usize)>,
    set_distribution: Vec<f64>,
}

impl GameSpec {
    /// Lexicographic pair sets with a uniform set distribution.
    pub fn canonical(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::domain(format!("d = {d}, need d >= 3")));
        }
        let pair_sets: Vec<_> = (1..=d)
            .flat_map(|a| (a + 1..=d).map(move |b| (a, b)))
            .collect();
        let w = 1.0 / pair_sets.len() as f64;
        let set_distribution = vec![w; pair_sets.len()];
        Ok(Self {
            d,
            pair_sets,
            set_distribution,
        })
    }

    /// Canonical pair sets with a caller-chosen set distribution.
    pub fn with_distribution(d: usize, set_distribution: Vec<f64>) -> Result<Self> {
        let mut spec = Self::canonical(d)?;
        if set_distribution.len() != spec.pair_sets.len() {
            return Err(Error::domain(format!(
                "set distribution has {} weights, need {}",
                set_distribution.len(),
                spec.pair_sets.len()
            )));
        }
        if set_distribution.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::domain("set weights must lie in [0, 1]"));
        }
        let total: f64 = set_distribution.iter().sum();
        if (total - 1.0).abs() > EPS_NUM {
            return Err(Error::domain(format!("set weights sum to {total}, not 1")));
        }
        spec.set_distribution = set_distribution;
        Ok(spec)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_sets(&self) -> usize {
        self.pair_sets.len()
    }

    pub fn pair_sets(&self) -> &[(usize, usize)] {
        &self.pair_sets
    }

    /// Members of `S_j` for a 1-based `j`.
    pub fn pair(&self, j: usize) -> Result<(usize, usize)> {
        j.checked_sub(1)
            .and_then(|k| self.pair_sets.get(k))
            .copied()
            .ok_or_else(|| Error::domain(format!("set index {j} outside 1..={}", self.num_sets())))
    }

    pub fn set_distribution(&self) -> &[f64] {
        &self.set_distribution
    }

    /// Weight of set `j` (1-based).
    pub fn set_weight(&self, j: usize) -> f64 {
        self.set_distribution[j - 1]
    }

    /// Indices `j` with `i` in `S_j`; always `d - 1` of them.
    pub fn allowed_sets(&self, i: usize) -> Result<Vec<usize>> {
        if i == 0 || i > self.d {
            return Err(Error::domain(format!("value index {i} outside 1..={}", self.d)));
        }
        Ok(self
            .pair_sets
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == i || b == i)
            .map(|(k, _)| k + 1)
            .collect())
    }

    /// The member of `S_j` other than `i`, if `i` belongs to `S_j`.
    pub fn partner(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = self.pair(j).ok()?;
        if i == a {
            Some(b)
        } else if i == b {
            Some(a)
        } else {
            None
        }
    }

    /// Design probability of drawing the cell `(i, j)`.
    pub fn cell_probability(&self, i: usize, j: usize) -> f64 {
        match self.partner(i, j) {
            Some(_) => self.set_weight(j) / 2.0,
            None => 0.0,
        }
    }
}

/// Alice's encoding. Bob's decoder is induced: the Helstrom measurement of
/// the announced pair for qubits, the unique consistent member (or a fair
/// coin on a tie) for classical symbols.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Classical { encoding: Vec<usize>, levels: usize },
    Quantum { ensemble: Ensemble, noise: f64 },
}

impl Strategy {
    /// `encoding[k]` is the symbol sent for value `k + 1`.
    pub fn classical(encoding: Vec<usize>, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::domain("classical strategy needs at least one level"));
        }
        if let Some(bad) = encoding.iter().find(|&&m| m >= levels) {
            return Err(Error::domain(format!("symbol {bad} outside 0..{levels}")));
        }
        Ok(Strategy::Classical { encoding, levels })
    }

    pub fn quantum(ensemble: Ensemble, noise: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&noise) {
            return Err(Error::domain(format!("noise {noise} outside [0, 1]")));
        }
        Ok(Strategy::Quantum { ensemble, noise })
    }

    /// Number of values the strategy encodes.
    pub fn d(&self) -> usize {
        match self {
            Strategy::Classical { encoding, .. } => encoding.len(),
            Strategy::Quantum { ensemble, .. } => ensemble.len(),
        }
    }

    pub fn check_dimension(&self, spec: &GameSpec) -> Result<()> {
        if self.d() != spec.d() {
            return Err(Error::DimensionMismatch {
                strategy: self.d(),
                game: spec.d(),
            });
        }
        Ok(())
    }

    /// Probability that Bob names `i` given inputs `(i, j)`, where
    /// `k` is the other member of `S_j`.
    fn cell(&self, i: usize, k: usize) -> f64 {
        match self {
            Strategy::Classical { encoding, .. } => {
                if encoding[i - 1] != encoding[k - 1] {
                    1.0
                } else {
                    0.5
                }
            }
            Strategy::Quantum { ensemble, noise } => {
                let states = ensemble.states();
                helstrom_success(&states[i - 1], &states[k - 1], *noise)
                    .expect("noise validated at construction")
            }
        }
    }
}

/// Exact cell probabilities `p(i | x_i, j)`.
///
/// `cells[j - 1]` holds the two cells of `S_j = {a, b}` as `[p(a), p(b)]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessMatrix {
    pair_sets: Vec<(usize, usize)>,
    cells: Vec<[f64; 2]>,
}

impl SuccessMatrix {
    pub fn from_cells(spec: &GameSpec, cells: Vec<[f64; 2]>) -> Result<Self> {
        if cells.len() != spec.num_sets() {
            return Err(Error::domain(format!(
                "{} cell pairs given for {} sets",
                cells.len(),
                spec.num_sets()
            )));
        }
        if cells.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::domain("cell probability outside [0, 1]"));
        }
        Ok(Self {
            pair_sets: spec.pair_sets().to_vec(),
            cells,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (a, b) = *self.pair_sets.get(j.checked_sub(1)?)?;
        let row = self.cells[j - 1];
        if i == a {
            Some(row[0])
        } else if i == b {
            Some(row[1])
        } else {
            None
        }
    }

    /// All cells as `(i, j, p)` in set order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.pair_sets
            .iter()
            .zip(&self.cells)
            .enumerate()
            .flat_map(|(k, (&(a, b), row))| [(a, k + 1, row[0]), (b, k + 1, row[1])])
    }

    pub fn len(&self) -> usize {
        2 * self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn rows(&self) -> &[[f64; 2]] {
        &self.cells
    }
}

pub fn success_matrix(strategy: &Strategy, spec: &GameSpec) -> Result<SuccessMatrix> {
    strategy.check_dimension(spec)?;
    let cells = spec
        .pair_sets()
        .iter()
        .map(|&(a, b)| [strategy.cell(a, b), strategy.cell(b, a)])
        .collect();
    Ok(SuccessMatrix {
        pair_sets: spec.pair_sets().to_vec(),
        cells,
    })
}

/// `sum_j w_j * 1/2 * sum_{i in S_j} p(i | x_i, j)`.
pub fn average_success(matrix: &SuccessMatrix, spec: &GameSpec) -> f64 {
    matrix
        .cells
        .iter()
        .zip(spec.set_distribution())
        .map(|(row, w)| w * 0.5 * (row[0] + row[1]))
        .sum()
}

pub fn min_cell(matrix: &SuccessMatrix) -> f64 {
    matrix
        .cells
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// The game is won when every cell beats a fair coin by more than `EPS_ALG`.
pub fn wins(matrix: &SuccessMatrix) -> bool {
    min_cell(matrix) > 0.5 + EPS_ALG
}
