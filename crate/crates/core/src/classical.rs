//! Exact classical optima.
//!
//! Bob's decoder is forced by the encoding: if the two members of `S_j` map
//! to different symbols he names the consistent one, otherwise he flips a
//! coin. Under the uniform canonical distribution the average success of an
//! encoding is therefore `(P + separated) / 2P`, where `P = d(d-1)/2` and
//! `separated` counts pairs with distinct symbols. All averages here are
//! exact rationals.

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest `levels^d` the exhaustive search accepts.
pub const ENUMERATION_LIMIT: u64 = 100_000_000;

/// Below this size the scan runs serially.
const PARALLEL_THRESHOLD: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalOptimum {
    /// `encoding[k]` is the symbol for value `k + 1`.
    pub encoding: Vec<usize>,
    pub average: Ratio<u64>,
    pub can_win: bool,
}

impl ClassicalOptimum {
    pub fn average_f64(&self) -> f64 {
        ratio_to_f64(self.average)
    }
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn num_pairs(d: usize) -> u64 {
    (d * (d - 1) / 2) as u64
}

/// Number of pairs `{a, b}` with `encoding[a] != encoding[b]`.
pub fn separated_pairs(encoding: &[usize]) -> u64 {
    let mut sep = 0;
    for a in 0..encoding.len() {
        for b in a + 1..encoding.len() {
            if encoding[a] != encoding[b] {
                sep += 1;
            }
        }
    }
    sep
}

/// Exact average success of an encoding under the canonical game.
pub fn exact_average(encoding: &[usize]) -> Ratio<u64> {
    let p = num_pairs(encoding.len());
    Ratio::new(p + separated_pairs(encoding), 2 * p)
}

/// Decodes an enumeration index as a base-`levels` numeral, value 1 first.
fn decode(mut index: u64, d: usize, levels: usize, out: &mut [usize]) {
    for slot in out[..d].iter_mut().rev() {
        *slot = (index % levels as u64) as usize;
        index /= levels as u64;
    }
}

fn scan(range: std::ops::Range<u64>, d: usize, levels: usize) -> Option<(u64, u64)> {
    let mut enc = vec![0; d];
    let mut best: Option<(u64, u64)> = None;
    for index in range {
        decode(index, d, levels, &mut enc);
        let sep = separated_pairs(&enc);
        if best.is_none_or(|(s, _)| sep > s) {
            best = Some((sep, index));
        }
    }
    best
}

/// Higher separation wins; on a tie the smaller index (lexicographically
/// smaller encoding) wins.
fn better(a: Option<(u64, u64)>, b: Option<(u64, u64)>) -> Option<(u64, u64)> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

/// Scans all `levels^d` encodings and returns the first maximizer.
pub fn brute_force_optimum(d: usize, levels: usize) -> Result<ClassicalOptimum> {
    if d < 3 {
        return Err(Error::domain(format!("d = {d}, need d >= 3")));
    }
    if levels == 0 {
        return Err(Error::domain("levels must be at least 1"));
    }
    let total = (levels as u64)
        .checked_pow(d as u32)
        .filter(|&t| t <= ENUMERATION_LIMIT)
        .ok_or_else(|| {
            Error::ResourceLimit(format!(
                "{levels}^{d} encodings exceeds the limit of {ENUMERATION_LIMIT}"
            ))
        })?;

    let best = if total < PARALLEL_THRESHOLD {
        scan(0..total, d, levels)
    } else {
        let chunk = PARALLEL_THRESHOLD;
        let chunks = total.div_ceil(chunk);
        (0..chunks)
            .into_par_iter()
            .map(|c| scan(c * chunk..((c + 1) * chunk).min(total), d, levels))
            .reduce(|| None, better)
    };
    let (sep, index) = best.expect("at least one encoding");
    let mut encoding = vec![0; d];
    decode(index, d, levels, &mut encoding);
    let p = num_pairs(d);
    Ok(ClassicalOptimum {
        encoding,
        average: Ratio::new(p + sep, 2 * p),
        can_win: sep == p,
    })
}

/// Part sizes of the most balanced split of `d` values into `levels` symbols.
pub fn balanced_parts(d: usize, levels: usize) -> Vec<usize> {
    let (q, r) = (d / levels, d % levels);
    (0..levels).map(|k| q + usize::from(k < r)).collect()
}

/// Closed-form classical optimum: `[P - U + U/2] / P` with `U` the number of
/// unseparated pairs of the balanced partition.
pub fn balanced_partition_optimum_exact(d: usize, levels: usize) -> Result<Ratio<u64>> {
    if d < 3 {
        return Err(Error::domain(format!("d = {d}, need d >= 3")));
    }
    if levels == 0 {
        return Err(Error::domain("levels must be at least 1"));
    }
    let p = num_pairs(d);
    let u: u64 = balanced_parts(d, levels)
        .iter()
        .map(|&n| (n * n.saturating_sub(1) / 2) as u64)
        .sum();
    Ok(Ratio::new(2 * p - u, 2 * p))
}

pub fn balanced_partition_optimum(d: usize, levels: usize) -> Result<f64> {
    balanced_partition_optimum_exact(d, levels).map(ratio_to_f64)
}

/// Largest `d` for which [`min_levels_to_win`] re-derives the answer by
/// exhaustive search.
pub const MIN_LEVELS_BRUTE_FORCE_MAX_D: usize = 6;

/// Least number of classical symbols with which some encoding wins.
///
/// Winning requires every pair separated, i.e. an injective encoding, so
/// the answer is `d`. For small `d` the value is confirmed by search.
pub fn min_levels_to_win(d: usize) -> Result<usize> {
    if d < 3 {
        return Err(Error::domain(format!("d = {d}, need d >= 3")));
    }
    if d <= MIN_LEVELS_BRUTE_FORCE_MAX_D {
        for levels in 1..=d {
            if brute_force_optimum(d, levels)?.can_win {
                return Ok(levels);
            }
        }
        unreachable!("the identity encoding wins with d levels");
    }
    Ok(d)
}
