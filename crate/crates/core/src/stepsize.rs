//! Generators for the momentum sequence `θ_k`.
//!
//! Every accelerated method starts from `θ₀ = 1`. The fixed-exponent methods
//! need `(1−θ_{k+1})/θ_{k+1}^γ ≤ 1/θ_k^γ`; dual averaging needs it with
//! equality; gain adaptation couples it to the gains,
//! `(1−θ_{k+1})/(G_{k+1}θ_{k+1}^γ) = 1/(G_kθ_k^γ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROOT_TOL: f64 = 1e-14;
const MAX_NEWTON: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    /// `θ_k = γ/(k+γ)`
    Explicit,
    /// root of `θ^γ = θ_k^γ (1−θ)`
    EqualityRoot,
    /// root of the gain-coupled equality
    GainCoupled,
    /// linearized gain-coupled rule
    GainCoupledExplicit,
}

impl ThetaMode {
    pub fn uses_gains(self) -> bool {
        matches!(self, ThetaMode::GainCoupled | ThetaMode::GainCoupledExplicit)
    }
}

pub fn theta_explicit(gamma: f64, k: usize) -> f64 {
    gamma / (k as f64 + gamma)
}

/// The unique `θ_{k+1} ∈ (0, θ_k)` with `θ^γ − θ_k^γ(1−θ) = 0`.
pub fn theta_next_root(gamma: f64, theta_k: f64) -> Result<f64> {
    check_theta(theta_k)?;
    solve_coupled(gamma, theta_k.powf(gamma), theta_k)
}

/// The unique `θ_{k+1} ∈ (0, 1)` with `(1−θ)/(G_{k+1}θ^γ) = 1/(G_kθ_k^γ)`.
pub fn theta_next_gain_equality(gamma: f64, theta_k: f64, gain_k: f64, gain_next: f64) -> Result<f64> {
    check_theta(theta_k)?;
    check_gain(gain_k)?;
    check_gain(gain_next)?;
    let c = gain_k / gain_next * theta_k.powf(gamma);
    // c^{1/γ} is θ_k when the gains agree
    let start = if gain_k == gain_next { theta_k } else { c.powf(1.0 / gamma).min(1.0) };
    solve_coupled(gamma, c, start)
}

/// `1/θ_{k+1} = (γα/(1+α(γ−1)))/θ_k + 1/(1+α(γ−1))`, `α = G_{k+1}/G_k`.
pub fn theta_next_gain_explicit(gamma: f64, theta_k: f64, alpha_k: f64) -> f64 {
    let denom = 1.0 + alpha_k * (gamma - 1.0);
    let inv = gamma * alpha_k / denom / theta_k + 1.0 / denom;
    1.0 / inv
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("theta must lie in (0, 1], got {theta}")))
    }
}

fn check_gain(g: f64) -> Result<()> {
    if g > 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("gain must be positive and finite, got {g}")))
    }
}

/// Root in `(0, 1)` of `θ^γ = c(1−θ)`, found on the normalized residual
/// `ψ(θ) = θ^γ/c + θ − 1`. For `γ ≥ 1`, `ψ` is convex and increasing, so
/// Newton from a point right of the root descends monotonically; bisection on
/// `(0, start]` covers `γ < 1`.
fn solve_coupled(gamma: f64, c: f64, start: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Config(format!("exponent must be positive, got {gamma}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Config(format!("theta equation coefficient must be positive, got {c}")));
    }
    if gamma == 1.0 {
        return Ok(c / (1.0 + c));
    }
    let psi = |t: f64| t.powf(gamma) / c + t - 1.0;
    let dpsi = |t: f64| gamma * t.powf(gamma - 1.0) / c + 1.0;
    let (mut lo, mut hi) = (0.0, start.min(1.0));
    if psi(hi) < 0.0 {
        hi = 1.0;
    }
    let mut t = hi;
    let mut resid = psi(t);
    for _ in 0..MAX_NEWTON {
        if resid.abs() <= ROOT_TOL {
            return Ok(t);
        }
        if resid > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let mut next = t - resid / dpsi(t);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == t {
            break;
        }
        t = next;
        resid = psi(t);
    }
    if resid.abs() <= 1e-13 {
        return Ok(t);
    }
    Err(Error::NonConvergence {
        what: "theta recursion",
        iters: MAX_NEWTON,
        residual: resid,
    })
}

/// Stateful `θ_k` generator owned by one solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSequence {
    mode: ThetaMode,
    gamma: f64,
    k: usize,
    theta: f64,
    gain: f64,
}

impl ThetaSequence {
    pub fn new(mode: ThetaMode, gamma: f64) -> Self {
        Self {
            mode,
            gamma,
            k: 0,
            theta: 1.0,
            gain: 1.0,
        }
    }

    /// Gain-coupled sequence whose `θ₀ = 1` is paired with gain `G₀`.
    pub fn with_initial_gain(mode: ThetaMode, gamma: f64, gain0: f64) -> Self {
        Self {
            gain: gain0,
            ..Self::new(mode, gamma)
        }
    }

    pub fn mode(&self) -> ThetaMode {
        self.mode
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Candidate `θ_{k+1}` for a tentative next gain, without advancing.
    pub fn peek(&self, gain_next: f64) -> Result<f64> {
        match self.mode {
            ThetaMode::Explicit => Ok(theta_explicit(self.gamma, self.k + 1)),
            ThetaMode::EqualityRoot => theta_next_root(self.gamma, self.theta),
            ThetaMode::GainCoupled => theta_next_gain_equality(self.gamma, self.theta, self.gain, gain_next),
            ThetaMode::GainCoupledExplicit => {
                check_gain(gain_next)?;
                Ok(theta_next_gain_explicit(self.gamma, self.theta, gain_next / self.gain))
            }
        }
    }

    /// Advances to `θ_{k+1}`; `gain_next` is ignored by the uncoupled modes.
    pub fn advance(&mut self, gain_next: f64) -> Result<f64> {
        let next = self.peek(gain_next)?;
        self.k += 1;
        self.theta = next;
        if self.mode.uses_gains() {
            self.gain = gain_next;
        }
        Ok(next)
    }

    /// Changes the exponent used by subsequent steps (exponent adaptation).
    pub fn set_gamma(&mut self, gamma: f64) {
        self.gamma = gamma;
    }

    /// Back to `θ = 1`, keeping `gain` as the previous gain.
    pub fn restart(&mut self) {
        self.k = 0;
        self.theta = 1.0;
    }

    /// Overwrites the accepted gain for the current `θ_k`.
    pub fn set_gain(&mut self, gain: f64) {
        self.gain = gain;
    }
}
