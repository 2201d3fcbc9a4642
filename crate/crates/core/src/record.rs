//! Round records and their line-delimited file format.
//!
//! One JSON object per line with integer fields `round`, `x`, `j`, `guess`.
//! `x` and `guess` are 1-based value indices, `j` is the 1-based index of the
//! lexicographic pair set. Unknown fields are ignored; blank lines are
//! skipped; anything else that fails to parse is an error naming the line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub x: usize,
    pub j: usize,
    pub guess: usize,
}

impl RoundRecord {
    pub fn correct(&self) -> bool {
        self.guess == self.x
    }

    /// Checks index ranges and `x in S_j` against `spec`.
    pub fn validate(&self, spec: &GameSpec) -> std::result::Result<(), String> {
        let d = spec.d();
        if self.x == 0 || self.x > d {
            return Err(format!("x = {} outside 1..={d}", self.x));
        }
        if self.guess == 0 || self.guess > d {
            return Err(format!("guess = {} outside 1..={d}", self.guess));
        }
        if self.j == 0 || self.j > spec.num_sets() {
            return Err(format!("j = {} outside 1..={}", self.j, spec.num_sets()));
        }
        if spec.partner(self.x, self.j).is_none() {
            let (a, b) = spec.pair(self.j).expect("range checked");
            return Err(format!("x = {} not in S_{} = {{{a}, {b}}}", self.x, self.j));
        }
        Ok(())
    }
}

pub fn write_record<W: Write>(out: &mut W, rec: &RoundRecord) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, rec)?;
    out.write_all(b"\n")
}

/// Streams `(line number, record)` pairs from a reader. Line numbers are
/// 1-based and parse errors carry them.
pub fn read_records<R: BufRead>(input: R) -> impl Iterator<Item = Result<(usize, RoundRecord)>> {
    input
        .lines()
        .enumerate()
        .filter_map(|(k, line)| {
            let lineno = k + 1;
            let line = match line {
                Ok(l) => l,
                Err(e) => {
                    return Some(Err(Error::InvalidRecord {
                        location: format!("line {lineno}"),
                        reason: e.to_string(),
                    }))
                }
            };
            if line.trim().is_empty() {
                return None;
            }
            Some(
                serde_json::from_str::<RoundRecord>(&line)
                    .map(|rec| (lineno, rec))
                    .map_err(|e| Error::InvalidRecord {
                        location: format!("line {lineno}"),
                        reason: e.to_string(),
                    }),
            )
        })
}
