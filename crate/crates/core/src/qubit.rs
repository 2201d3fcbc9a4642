//! Two-level pure states, Helstrom discrimination and Born-rule sampling.
//!
//! Noise is a single-parameter depolarizing channel applied to the
//! communicated qubit before it is measured:
//! `rho -> (1 - noise) rho + noise I/2`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{EPS_ALG, EPS_NUM};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A normalized pure qubit state `amp0 |0> + amp1 |1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    amp0: Complex64,
    amp1: Complex64,
}

impl QubitState {
    /// Builds a state from its amplitudes. Amplitudes are stored as given.
    pub fn new(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let norm_sqr = amp0.norm_sqr() + amp1.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > EPS_ALG {
            return Err(Error::Normalization { norm_sqr });
        }
        Ok(Self { amp0, amp1 })
    }

    /// Real-amplitude convenience constructor.
    pub fn real(amp0: f64, amp1: f64) -> Result<Self> {
        Self::new(Complex64::new(amp0, 0.0), Complex64::new(amp1, 0.0))
    }

    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        Self {
            amp0: Complex64::new((theta / 2.0).cos(), 0.0),
            amp1: Complex64::from_polar((theta / 2.0).sin(), phi),
        }
    }

    pub fn zero() -> Self {
        Self { amp0: ONE, amp1: ZERO }
    }

    pub fn one() -> Self {
        Self { amp0: ZERO, amp1: ONE }
    }

    pub fn amp0(&self) -> Complex64 {
        self.amp0
    }

    pub fn amp1(&self) -> Complex64 {
        self.amp1
    }

    /// Same state multiplied by a global phase `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let u = Complex64::from_polar(1.0, phase);
        Self {
            amp0: self.amp0 * u,
            amp1: self.amp1 * u,
        }
    }

    /// Applies a 2x2 unitary given row-major. The caller guarantees unitarity.
    pub fn transformed(&self, u: &[[Complex64; 2]; 2]) -> Self {
        Self {
            amp0: u[0][0] * self.amp0 + u[0][1] * self.amp1,
            amp1: u[1][0] * self.amp0 + u[1][1] * self.amp1,
        }
    }

    /// `<self|op|self>`, real part.
    fn expectation(&self, op: &Mat2) -> f64 {
        let v = [self.amp0, self.amp1];
        let mut acc = ZERO;
        for r in 0..2 {
            for c in 0..2 {
                acc += v[r].conj() * op[r][c] * v[c];
            }
        }
        acc.re
    }

    /// Projector `|self><self|`.
    fn projector(&self) -> Mat2 {
        let v = [self.amp0, self.amp1];
        let mut m = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = v[r] * v[c].conj();
            }
        }
        m
    }

    /// True when the two states are the same ray (equal up to global phase).
    pub fn same_ray(&self, other: &QubitState) -> bool {
        overlap(self, other).norm() > 1.0 - EPS_ALG
    }
}

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

fn identity_half() -> Mat2 {
    let h = Complex64::new(0.5, 0.0);
    [[h, ZERO], [ZERO, h]]
}

/// A two-outcome POVM `{effect0, effect1}` on a qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoOutcomeMeasurement {
    effect0: Mat2,
    effect1: Mat2,
}

impl TwoOutcomeMeasurement {
    /// Validates completeness, hermiticity and positivity of both effects.
    pub fn new(effect0: Mat2, effect1: Mat2) -> Result<Self> {
        for r in 0..2 {
            for c in 0..2 {
                let target = if r == c { ONE } else { ZERO };
                if (effect0[r][c] + effect1[r][c] - target).norm() > EPS_NUM {
                    return Err(Error::domain("effects do not sum to the identity"));
                }
            }
        }
        for e in [&effect0, &effect1] {
            if !is_hermitian(e) {
                return Err(Error::domain("effect is not Hermitian"));
            }
            if !is_positive(e) {
                return Err(Error::domain("effect is not positive semidefinite"));
            }
        }
        Ok(Self { effect0, effect1 })
    }

    /// Projective measurement in the basis `{|0>, |1>}`.
    pub fn computational() -> Self {
        Self {
            effect0: QubitState::zero().projector(),
            effect1: QubitState::one().projector(),
        }
    }

    pub fn effect(&self, outcome: usize) -> &Mat2 {
        match outcome {
            0 => &self.effect0,
            _ => &self.effect1,
        }
    }
}

fn is_hermitian(m: &Mat2) -> bool {
    m[0][0].im.abs() <= EPS_NUM
        && m[1][1].im.abs() <= EPS_NUM
        && (m[0][1] - m[1][0].conj()).norm() <= EPS_NUM
}

fn is_positive(m: &Mat2) -> bool {
    // 2x2 Hermitian: both eigenvalues >= 0 iff trace >= 0 and det >= 0.
    let tr = m[0][0].re + m[1][1].re;
    let det = m[0][0].re * m[1][1].re - m[0][1].norm_sqr();
    tr >= -EPS_NUM && det >= -EPS_NUM
}

/// `<s1|s2>`.
pub fn overlap(s1: &QubitState, s2: &QubitState) -> Complex64 {
    s1.amp0.conj() * s2.amp0 + s1.amp1.conj() * s2.amp1
}

fn check_noise(noise: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::domain(format!("noise {noise} outside [0, 1]")));
    }
    Ok(())
}

/// Optimal probability of telling two equiprobable pure states apart,
/// `1/2 (1 + (1 - noise) sqrt(1 - |<s1|s2>|^2))`.
pub fn helstrom_success(s1: &QubitState, s2: &QubitState, noise: f64) -> Result<f64> {
    check_noise(noise)?;
    let ov2 = overlap(s1, s2).norm_sqr().min(1.0);
    Ok(0.5 * (1.0 + (1.0 - noise) * (1.0 - ov2).sqrt()))
}

/// Projective measurement that attains the Helstrom bound for `(s1, s2)`.
///
/// Outcome 0 points at `s1`, outcome 1 at `s2`. The difference operator
/// `D = |s1><s1| - |s2><s2|` is traceless with eigenvalues `+-lambda`, so the
/// positive-eigenspace projector is `(I + D/lambda)/2`. When `lambda` vanishes
/// the states are the same ray and both effects are `I/2`.
pub fn helstrom_measurement(s1: &QubitState, s2: &QubitState) -> TwoOutcomeMeasurement {
    let p1 = s1.projector();
    let p2 = s2.projector();
    let mut diff = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            diff[r][c] = p1[r][c] - p2[r][c];
        }
    }
    let z = 0.5 * (diff[0][0].re - diff[1][1].re);
    let lambda = (z * z + diff[0][1].norm_sqr()).sqrt();
    if lambda < EPS_ALG {
        return TwoOutcomeMeasurement {
            effect0: identity_half(),
            effect1: identity_half(),
        };
    }
    let mut effect0 = [[ZERO; 2]; 2];
    let mut effect1 = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c { 0.5 } else { 0.0 };
            let half_d = diff[r][c] / (2.0 * lambda);
            effect0[r][c] = Complex64::new(id, 0.0) + half_d;
            effect1[r][c] = Complex64::new(id, 0.0) - half_d;
        }
    }
    TwoOutcomeMeasurement { effect0, effect1 }
}

/// Probability of `outcome` when `state` passes through the depolarizing
/// channel and is then measured with `meas`.
pub fn born_probability(
    state: &QubitState,
    meas: &TwoOutcomeMeasurement,
    outcome: usize,
    noise: f64,
) -> Result<f64> {
    check_noise(noise)?;
    if outcome > 1 {
        return Err(Error::domain(format!("outcome {outcome} is not 0 or 1")));
    }
    let e = meas.effect(outcome);
    let trace = e[0][0].re + e[1][1].re;
    let p = (1.0 - noise) * state.expectation(e) + noise * trace / 2.0;
    Ok(p.clamp(0.0, 1.0))
}

/// Draws outcome 0 with probability `p0`, else 1. Consumes one `f64` draw.
pub fn sample_outcome<R: Rng + ?Sized>(rng: &mut R, p0: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::domain(format!("probability {p0} outside [0, 1]")));
    }
    let u: f64 = rng.random();
    Ok(if u < p0 { 0 } else { 1 })
}
