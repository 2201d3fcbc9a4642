//! Seeded Monte Carlo generation of round records.
//!
//! Round `r` (1-based) draws from its own ChaCha8 substream
//! `(seed, stream = r)`, so rounds can be produced in any order or in
//! parallel and still come out identical. Within a round the draw order is
//! fixed: the set `j`, then the value `x` in `S_j`, then Bob's outcome.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{GameSpec, Strategy};
use crate::quantum::substream;
use crate::qubit::{born_probability, helstrom_measurement, sample_outcome, TwoOutcomeMeasurement};
use crate::record::RoundRecord;

/// Name recorded alongside seeds so runs can be reproduced.
pub const GENERATOR: &str = "chacha8-stream-per-round";

#[derive(Debug, Clone)]
enum Decoder {
    /// Symbol per value (0-based index).
    Classical(Vec<usize>),
    /// Helstrom measurement per pair set, plus the encoding states and noise.
    Quantum {
        measurements: Vec<TwoOutcomeMeasurement>,
        states: Vec<crate::qubit::QubitState>,
        noise: f64,
    },
}

#[derive(Debug, Clone)]
pub struct Simulation {
    spec: GameSpec,
    decoder: Decoder,
    cumulative: Vec<f64>,
    rounds: u64,
    seed: u64,
}

impl Simulation {
    pub fn new(strategy: &Strategy, spec: &GameSpec, rounds: u64, seed: u64) -> Result<Self> {
        strategy.check_dimension(spec)?;
        let decoder = match strategy {
            Strategy::Classical { encoding, .. } => Decoder::Classical(encoding.clone()),
            Strategy::Quantum { ensemble, noise } => {
                let states = ensemble.states().to_vec();
                let measurements = spec
                    .pair_sets()
                    .iter()
                    .map(|&(a, b)| helstrom_measurement(&states[a - 1], &states[b - 1]))
                    .collect();
                Decoder::Quantum {
                    measurements,
                    states,
                    noise: *noise,
                }
            }
        };
        let cumulative = spec
            .set_distribution()
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            spec: spec.clone(),
            decoder,
            cumulative,
            rounds,
            seed,
        })
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generates round `round` (1-based) from its own substream.
    pub fn record(&self, round: u64) -> RoundRecord {
        let mut rng = substream(self.seed, round);

        let u: f64 = rng.random();
        let last = self.cumulative.len() - 1;
        let k = self.cumulative.iter().position(|&c| u < c).unwrap_or(last);
        let j = k + 1;
        let (a, b) = self.spec.pair_sets()[k];

        let x = if rng.random::<f64>() < 0.5 { a } else { b };

        let p_first = match &self.decoder {
            Decoder::Classical(enc) => {
                if enc[a - 1] != enc[b - 1] {
                    if x == a {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    0.5
                }
            }
            Decoder::Quantum {
                measurements,
                states,
                noise,
            } => born_probability(&states[x - 1], &measurements[k], 0, *noise)
                .expect("noise validated at construction"),
        };
        let outcome = sample_outcome(&mut rng, p_first).expect("probability in range");
        let guess = if outcome == 0 { a } else { b };
        RoundRecord { round, x, j, guess }
    }

    /// Serial stream of all rounds in order; constant memory.
    pub fn iter(&self) -> impl Iterator<Item = RoundRecord> + '_ {
        (1..=self.rounds).map(move |r| self.record(r))
    }

    /// Ordered batches of at most `chunk` rounds, each generated in parallel.
    pub fn par_batches(&self, chunk: u64) -> impl Iterator<Item = Vec<RoundRecord>> + '_ {
        let chunk = chunk.max(1);
        let batches = self.rounds.div_ceil(chunk);
        (0..batches).map(move |b| {
            let start = b * chunk + 1;
            let end = ((b + 1) * chunk).min(self.rounds);
            (start..=end).into_par_iter().map(|r| self.record(r)).collect()
        })
    }
}

/// Convenience wrapper: the full record stream for a strategy.
pub fn simulate(strategy: &Strategy, spec: &GameSpec, rounds: u64, seed: u64) -> Result<Simulation> {
    Simulation::new(strategy, spec, rounds, seed)
}

/// Fraction of rounds with `guess == x`.
pub fn empirical_average<'a, I>(records: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a RoundRecord>,
{
    let (n, hits) = records
        .into_iter()
        .fold((0u64, 0u64), |(n, h), r| (n + 1, h + u64::from(r.correct())));
    if n == 0 {
        return Err(Error::InsufficientData("no rounds".into()));
    }
    Ok(hits as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::trine;

    #[test]
    fn zero_rounds_is_empty() {
        let spec = GameSpec::canonical(3).unwrap();
        let st = Strategy::quantum(trine(), 0.0).unwrap();
        let sim = simulate(&st, &spec, 0, 1).unwrap();
        assert_eq!(sim.iter().count(), 0);
        assert_eq!(sim.par_batches(10).count(), 0);
    }

    #[test]
    fn records_are_valid_and_deterministic() {
        let spec = GameSpec::canonical(4).unwrap();
        let st = Strategy::classical(vec![0, 1, 0, 1], 2).unwrap();
        let sim = simulate(&st, &spec, 1000, 5).unwrap();
        let a: Vec<_> = sim.iter().collect();
        let b: Vec<_> = sim.par_batches(77).flatten().collect();
        assert_eq!(a, b);
        for (k, r) in a.iter().enumerate() {
            assert_eq!(r.round, k as u64 + 1);
            r.validate(&spec).unwrap();
        }
    }

    #[test]
    fn separated_classical_pairs_always_correct() {
        let spec = GameSpec::canonical(3).unwrap();
        let st = Strategy::classical(vec![0, 1, 2], 3).unwrap();
        let sim = simulate(&st, &spec, 500, 9).unwrap();
        assert!(sim.iter().all(|r| r.correct()));
    }

    #[test]
    fn dimension_checked() {
        let spec = GameSpec::canonical(4).unwrap();
        let st = Strategy::quantum(trine(), 0.0).unwrap();
        assert!(matches!(simulate(&st, &spec, 1, 1), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn empirical_average_examples() {
        let rec = RoundRecord { round: 1, x: 1, j: 1, guess: 1 };
        assert_eq!(empirical_average(&[rec, rec]).unwrap(), 1.0);
        assert!(matches!(empirical_average(&[]), Err(Error::InsufficientData(_))));
    }
}
