//! Qubit encodings: canonical ensembles, ensemble diagnostics, numerical
//! ensemble search and the triangle-inequality bounds on summed
//! distinguishability.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{average_success, success_matrix, GameSpec, Strategy};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::qubit::{overlap, QubitState};
use crate::EPS_ALG;

/// One qubit state per value of `X`, in value order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    states: Vec<QubitState>,
}

impl Ensemble {
    pub fn new(states: Vec<QubitState>) -> Result<Self> {
        if states.len() < 3 {
            return Err(Error::domain(format!(
                "an ensemble needs at least 3 states, got {}",
                states.len()
            )));
        }
        Ok(Self { states })
    }

    pub fn states(&self) -> &[QubitState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `|0>`, `(|0> - sqrt3 |1>)/2`, `(|0> + sqrt3 |1>)/2`.
pub fn trine() -> Ensemble {
    let h = 3f64.sqrt() / 2.0;
    Ensemble {
        states: vec![
            QubitState::zero(),
            QubitState::real(0.5, -h).expect("normalized"),
            QubitState::real(0.5, h).expect("normalized"),
        ],
    }
}

/// `|0>` and `(|0> - sqrt2 w |1>)/sqrt3` for `w` in `{1, e^{2pi i/3}, e^{-2pi i/3}}`.
pub fn tetrad() -> Ensemble {
    let a = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    let r = -(2.0f64 / 3.0).sqrt();
    let mut states = vec![QubitState::zero()];
    for phase in [0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0] {
        states.push(QubitState::new(a, Complex64::from_polar(r, phase)).expect("normalized"));
    }
    Ensemble { states }
}

/// `cos(k pi/d)|0> + sin(k pi/d)|1>` for `k = 0..d`.
pub fn polygon(d: usize) -> Result<Ensemble> {
    if d < 3 {
        return Err(Error::domain(format!("d = {d}, need d >= 3")));
    }
    let states = (0..d)
        .map(|k| {
            let t = k as f64 * PI / d as f64;
            QubitState::real(t.cos(), t.sin()).expect("normalized")
        })
        .collect();
    Ok(Ensemble { states })
}

/// Every pair of states is a distinct ray.
pub fn pairwise_linearly_independent(states: &[QubitState]) -> bool {
    states.iter().enumerate().all(|(a, s)| {
        states[a + 1..]
            .iter()
            .all(|t| overlap(s, t).norm() < 1.0 - EPS_ALG)
    })
}

/// True when no single orthonormal basis diagonalizes every state.
///
/// For pure qubits a common diagonalizing basis exists exactly when the
/// distinct rays number at most two and are mutually orthogonal.
pub fn has_universal_coherence(states: &[QubitState]) -> bool {
    let mut rays: Vec<QubitState> = Vec::new();
    for s in states {
        if !rays.iter().any(|r| r.same_ray(s)) {
            rays.push(*s);
        }
    }
    match rays.as_slice() {
        [] | [_] => false,
        [a, b] => overlap(a, b).norm() >= EPS_ALG,
        _ => true,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleOptimum {
    pub ensemble: Ensemble,
    pub average: f64,
    /// Best value reached by each restart, in restart order.
    pub restart_values: Vec<f64>,
    pub best_restart: usize,
}

/// Maps search parameters to states with the gauge fixed: state 1 at the
/// north pole, state 2 with zero azimuth, the rest free.
fn states_from_params(d: usize, params: &[f64]) -> Vec<QubitState> {
    let mut states = Vec::with_capacity(d);
    states.push(QubitState::zero());
    states.push(QubitState::from_bloch(params[0], 0.0));
    for k in 0..d - 2 {
        states.push(QubitState::from_bloch(params[1 + 2 * k], params[2 + 2 * k]));
    }
    states
}

fn num_params(d: usize) -> usize {
    1 + 2 * (d - 2)
}

/// Seeded substream for `(seed, index)`.
pub(crate) fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_start(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let polar = |rng: &mut ChaCha8Rng| (1.0 - 2.0 * rng.random::<f64>()).acos();
    let mut x = vec![polar(rng)];
    for _ in 0..d - 2 {
        x.push(polar(rng));
        x.push(2.0 * PI * rng.random::<f64>());
    }
    x
}

/// Multi-restart Nelder-Mead maximization of the canonical average success
/// over `d` pure qubit states. Restart `r` draws its start point from the
/// substream `(seed, r)`; the best restart wins, lowest index on ties.
pub fn optimize_ensemble(d: usize, restarts: usize, seed: u64) -> Result<EnsembleOptimum> {
    if restarts == 0 {
        return Err(Error::domain("restarts must be at least 1"));
    }
    let spec = GameSpec::canonical(d)?;
    let objective = |x: &[f64]| -> f64 {
        let ensemble = Ensemble {
            states: states_from_params(d, x),
        };
        let st = Strategy::Quantum { ensemble, noise: 0.0 };
        let m = success_matrix(&st, &spec).expect("dimension fixed");
        -average_success(&m, &spec)
    };
    let opts = NelderMeadOptions {
        max_iterations: 4_000 * num_params(d),
        ..NelderMeadOptions::default()
    };

    let runs: Vec<(Vec<f64>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r as u64);
            let start = random_start(d, &mut rng);
            let mut best = nelder_mead(objective, &start, 0.5, opts);
            // Re-seed the simplex at the incumbent to escape early collapse.
            for _ in 0..3 {
                let again = nelder_mead(objective, &best.x, 0.05, opts);
                if again.value < best.value - 1e-15 {
                    best = again;
                } else {
                    break;
                }
            }
            (best.x, -best.value)
        })
        .collect();

    let best_restart = runs
        .iter()
        .enumerate()
        .fold(0, |acc, (k, run)| if run.1 > runs[acc].1 { k } else { acc });
    let ensemble = Ensemble {
        states: states_from_params(d, &runs[best_restart].0),
    };
    Ok(EnsembleOptimum {
        ensemble,
        average: runs[best_restart].1,
        restart_values: runs.iter().map(|r| r.1).collect(),
        best_restart,
    })
}

fn check_magnitudes(mags: &[f64]) -> Result<()> {
    if let Some(m) = mags.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(Error::domain(format!("magnitude {m} outside [0, 1]")));
    }
    Ok(())
}

/// `(1+|c|) sqrt(1-|a|^2) + (1+|a|) sqrt(1-|c|^2)`, the triangle-inequality
/// bound on the summed distinguishability of three states.
pub fn delta_bound_d3(a_mag: f64, c_mag: f64) -> Result<f64> {
    check_magnitudes(&[a_mag, c_mag])?;
    Ok((1.0 + c_mag) * (1.0 - a_mag * a_mag).sqrt() + (1.0 + a_mag) * (1.0 - c_mag * c_mag).sqrt())
}

/// Four-state analogue of [`delta_bound_d3`].
pub fn delta_bound_d4(a_mag: f64, c_mag: f64, e_mag: f64) -> Result<f64> {
    check_magnitudes(&[a_mag, c_mag, e_mag])?;
    let s = |m: f64| (1.0 - m * m).sqrt();
    Ok((1.0 + c_mag + e_mag) * s(a_mag)
        + (1.0 + a_mag + e_mag) * s(c_mag)
        + (1.0 + a_mag + c_mag) * s(e_mag))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DeltaProblem {
    D3,
    D4,
}

impl DeltaProblem {
    fn arity(self) -> usize {
        match self {
            DeltaProblem::D3 => 2,
            DeltaProblem::D4 => 3,
        }
    }

    fn eval(self, x: &[f64]) -> f64 {
        match self {
            DeltaProblem::D3 => delta_bound_d3(x[0], x[1]),
            DeltaProblem::D4 => delta_bound_d4(x[0], x[1], x[2]),
        }
        .expect("magnitudes clamped to [0, 1]")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaMaximum {
    pub argmax: Vec<f64>,
    pub value: f64,
}

/// Grid search over `[0, 1]^k` followed by simplex refinement of the best
/// grid point.
pub fn maximize_delta(which: DeltaProblem, grid_step: f64) -> Result<DeltaMaximum> {
    if !(grid_step > 0.0 && grid_step <= 0.01) {
        return Err(Error::domain(format!("grid step {grid_step} outside (0, 0.01]")));
    }
    let k = which.arity();
    let points = (1.0 / grid_step).round() as usize;
    let axis: Vec<f64> = (0..=points)
        .map(|n| (n as f64 * grid_step).min(1.0))
        .chain(std::iter::once(1.0))
        .collect();
    let mut axis = axis;
    axis.dedup();

    let mut best = (vec![0.0; k], f64::NEG_INFINITY);
    let mut idx = vec![0usize; k];
    let mut x = vec![0.0; k];
    'grid: loop {
        for (xi, &n) in x.iter_mut().zip(&idx) {
            *xi = axis[n];
        }
        let v = which.eval(&x);
        if v > best.1 {
            best = (x.clone(), v);
        }
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < axis.len() {
                continue 'grid;
            }
            *slot = 0;
        }
        break;
    }

    let clamp = |x: &[f64]| -> Vec<f64> { x.iter().map(|v| v.clamp(0.0, 1.0)).collect() };
    let refined = nelder_mead(
        |x| -which.eval(&clamp(x)),
        &best.0,
        grid_step,
        NelderMeadOptions::default(),
    );
    let argmax = clamp(&refined.x);
    let value = which.eval(&argmax);
    if value >= best.1 {
        Ok(DeltaMaximum { argmax, value })
    } else {
        Ok(DeltaMaximum {
            argmax: best.0,
            value: best.1,
        })
    }
}

/// Optimal 2-to-1 quantum random access code success, `cos^2(pi/8)`
/// (commonly rounded to 0.85).
pub fn qrac_reference() -> f64 {
    (PI / 8.0).cos().powi(2)
}
