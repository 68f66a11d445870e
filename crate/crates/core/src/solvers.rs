//! The Bregman proximal gradient family.
//!
//! | algorithm | step                                                                |
//! |-----------|---------------------------------------------------------------------|
//! | BPG       | `x⁺ = argmin ℓ(x|x_k) + L D_h(x, x_k)`                              |
//! | BPG-LS    | BPG with the gain line search `G_k L` in place of `L`               |
//! | ABPG      | accelerated, fixed triangle-scaling exponent `γ`                    |
//! | ABPG-e    | accelerated, exponent `γ_k` decreased until sufficient decrease     |
//! | ABPG-g    | accelerated, fixed `γ`, gain `G_k` adapted by line search           |
//! | ABDA      | accelerated dual averaging                                          |
//!
//! ABPG and ABPG-g can be wrapped in a function-value restart.
//!
//! Every run returns a [`SolverTrace`] with one row per iteration. Row `k`
//! holds `F(x_k)` and the quantities used to produce `x_{k+1}`; the value at
//! the final iterate is in [`SolverTrace::final_f`].

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::kernels::{interpolate, local_ts_gain, BregmanKernel, KernelKind};
use crate::objectives::{Objective, Regularizer};
use crate::stepsize::{theta_next_gain_equality, theta_next_gain_explicit, ThetaMode, ThetaSequence};
use crate::subproblems::{check_pairing, dual_avg_step, prox_step, DualAvgQuery, FeasibleSet, ProxQuery};

/// Relative rounding allowance in the sufficient-decrease tests.
const DECREASE_RTOL: f64 = 8.0 * f64::EPSILON;

/// `min_{x ∈ C} f(x) + Ψ(x)` with the kernel used for the Bregman steps.
#[derive(Clone, Debug)]
pub struct CompositeProblem {
    pub objective: Objective,
    pub reg: Regularizer,
    pub set: FeasibleSet,
    pub kernel: BregmanKernel,
}

impl CompositeProblem {
    /// Pairs the objective with the kernel it is relatively smooth to.
    pub fn new(objective: Objective, reg: Regularizer, set: FeasibleSet) -> Result<Self> {
        let kernel = BregmanKernel::new(objective.paired_kernel(), objective.dim());
        check_pairing(kernel.kind(), set, &reg)?;
        Ok(Self {
            objective,
            reg,
            set,
            kernel,
        })
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn l(&self) -> f64 {
        self.objective.rel_smooth_l()
    }

    /// `F(x) = f(x) + Ψ(x)`.
    pub fn value(&self, x: &Array1<f64>) -> Result<f64> {
        Ok(self.objective.value(x)? + self.reg.value(x))
    }

    /// Rejects starting points outside the relative interior of the feasible set.
    pub fn check_start(&self, x0: &Array1<f64>) -> Result<()> {
        check_dim(self.dim(), x0.len())?;
        let strict = self.kernel.kind() != KernelKind::SquaredEuclidean || self.set == FeasibleSet::Simplex;
        for (i, &v) in x0.iter().enumerate() {
            if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
                return Err(Error::Domain {
                    coord: i,
                    value: v,
                    reason: "starting point must be strictly feasible",
                });
            }
        }
        if self.set == FeasibleSet::Simplex {
            let s = x0.sum();
            if (s - 1.0).abs() > 1e-10 {
                return Err(Error::Config(format!("starting point sums to {s}, not 1")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "bpg")]
    Bpg,
    #[serde(rename = "bpg-ls")]
    BpgLs,
    #[serde(rename = "abpg")]
    Abpg,
    #[serde(rename = "abpg-e")]
    AbpgE,
    #[serde(rename = "abpg-g")]
    AbpgG,
    #[serde(rename = "abda")]
    Abda,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Bpg,
        Algorithm::BpgLs,
        Algorithm::Abpg,
        Algorithm::AbpgE,
        Algorithm::AbpgG,
        Algorithm::Abda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Bpg => "bpg",
            Algorithm::BpgLs => "bpg-ls",
            Algorithm::Abpg => "abpg",
            Algorithm::AbpgE => "abpg-e",
            Algorithm::AbpgG => "abpg-g",
            Algorithm::Abda => "abda",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == norm)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Fixed exponent for ABPG, ABPG-g and ABDA.
    pub gamma: f64,
    /// ABPG-e: initial exponent, floor and decrement.
    pub gamma0: f64,
    pub gamma_min: f64,
    pub delta: f64,
    /// ABPG-g and BPG-LS: gain growth factor and floor.
    pub rho: f64,
    pub gain_min: f64,
    pub max_iter: usize,
    pub theta_mode: ThetaMode,
    pub restart: bool,
    /// Cap on line-search trials per iteration.
    pub max_trials: usize,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, max_iter: usize) -> Self {
        let theta_mode = match algorithm {
            Algorithm::AbpgG => ThetaMode::GainCoupled,
            _ => ThetaMode::EqualityRoot,
        };
        Self {
            algorithm,
            gamma: 2.0,
            gamma0: 3.0,
            gamma_min: 0.0,
            delta: 0.2,
            rho: 1.5,
            gain_min: 1e-3,
            max_iter,
            theta_mode,
            restart: false,
            max_trials: 60,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_restart(mut self, restart: bool) -> Self {
        self.restart = restart;
        self
    }

    pub fn with_theta_mode(mut self, mode: ThetaMode) -> Self {
        self.theta_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.gamma > 0.0 && self.gamma <= 2.5) {
            return fail(format!("gamma must lie in (0, 2.5], got {}", self.gamma));
        }
        if !(self.rho > 1.0) {
            return fail(format!("rho must exceed 1, got {}", self.rho));
        }
        if !(self.gain_min > 0.0) {
            return fail(format!("gain_min must be positive, got {}", self.gain_min));
        }
        if !(self.delta > 0.0) {
            return fail(format!("delta must be positive, got {}", self.delta));
        }
        if !(self.gamma_min >= 0.0 && self.gamma0 >= self.gamma_min) {
            return fail(format!(
                "need gamma0 >= gamma_min >= 0, got gamma0 = {}, gamma_min = {}",
                self.gamma0, self.gamma_min
            ));
        }
        if self.max_trials == 0 {
            return fail("max_trials must be positive".into());
        }
        let needs_root = matches!(self.algorithm, Algorithm::Abda)
            || matches!(self.theta_mode, ThetaMode::EqualityRoot | ThetaMode::GainCoupled);
        if needs_root && self.gamma < 1.0 && self.algorithm != Algorithm::AbpgE {
            return fail(format!("root-based theta modes need gamma >= 1, got {}", self.gamma));
        }
        if self.algorithm == Algorithm::AbpgG && !(self.gamma > 1.0) {
            return fail(format!("gain adaptation needs gamma > 1, got {}", self.gamma));
        }
        if self.restart && !matches!(self.algorithm, Algorithm::Abpg | Algorithm::AbpgG) {
            return fail(format!("restart is only supported for abpg and abpg-g, not {}", self.algorithm));
        }
        Ok(())
    }
}

/// One iteration. Fields that do not apply to an algorithm are `NaN`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    /// `F(x_k)`
    pub f: f64,
    pub theta: f64,
    pub gamma: f64,
    /// accepted gain `G_k`
    pub gain: f64,
    /// local triangle-scaling gain `Ĝ_k`
    pub local_gain: f64,
    /// line-search trials (1 when there is no inner loop)
    pub inner: usize,
    pub grad_calls: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct SolverTrace {
    pub algorithm: Algorithm,
    pub rows: Vec<TraceRow>,
    pub final_f: f64,
    pub x_final: Array1<f64>,
    pub best_f: f64,
    pub x_best: Array1<f64>,
    /// Iterations `k` after which momentum was reset.
    pub restarts: Vec<usize>,
}

impl SolverTrace {
    /// `F(x_0), …, F(x_K)`.
    pub fn f_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.f).chain(std::iter::once(self.final_f)).collect()
    }

    pub fn gains(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gain).collect()
    }

    pub fn total_grad_calls(&self) -> usize {
        self.rows.last().map_or(0, |r| r.grad_calls)
    }
}

struct Recorder {
    algorithm: Algorithm,
    start: Instant,
    rows: Vec<TraceRow>,
    grad_calls: usize,
    best_f: f64,
    x_best: Array1<f64>,
    restarts: Vec<usize>,
}

impl Recorder {
    fn new(algorithm: Algorithm, x0: &Array1<f64>, f0: f64, capacity: usize) -> Self {
        Self {
            algorithm,
            start: Instant::now(),
            rows: Vec::with_capacity(capacity),
            grad_calls: 0,
            best_f: f0,
            x_best: x0.clone(),
            restarts: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, f: f64, theta: f64, gamma: f64, gain: f64, local_gain: f64, inner: usize) {
        let k = self.rows.len();
        self.rows.push(TraceRow {
            k,
            f,
            theta,
            gamma,
            gain,
            local_gain,
            inner,
            grad_calls: self.grad_calls,
            seconds: self.start.elapsed().as_secs_f64(),
        });
    }

    fn observe(&mut self, x: &Array1<f64>, f: f64) {
        if f < self.best_f {
            self.best_f = f;
            self.x_best.assign(x);
        }
    }

    fn finish(self, x_final: Array1<f64>, final_f: f64) -> SolverTrace {
        SolverTrace {
            algorithm: self.algorithm,
            rows: self.rows,
            final_f,
            x_final,
            best_f: self.best_f,
            x_best: self.x_best,
            restarts: self.restarts,
        }
    }
}

/// Runs the configured algorithm (with restart when `cfg.restart`).
pub fn run(problem: &CompositeProblem, cfg: &SolverConfig, x0: &Array1<f64>) -> Result<SolverTrace> {
    match cfg.algorithm {
        _ if cfg.restart => run_with_restart(problem, cfg, x0),
        Algorithm::Bpg => run_bpg(problem, cfg, x0),
        Algorithm::BpgLs => run_bpg_ls(problem, cfg, x0),
        Algorithm::Abpg => run_abpg(problem, cfg, x0),
        Algorithm::AbpgE => run_abpg_e(problem, cfg, x0),
        Algorithm::AbpgG => run_abpg_g(problem, cfg, x0),
        Algorithm::Abda => run_abda(problem, cfg, x0),
    }
}

fn prepare(problem: &CompositeProblem, cfg: &SolverConfig, x0: &Array1<f64>, alg: Algorithm) -> Result<f64> {
    let cfg = SolverConfig { algorithm: alg, ..cfg.clone() };
    cfg.validate()?;
    problem.check_start(x0)?;
    problem.value(x0)
}

fn prox(problem: &CompositeProblem, g: &Array1<f64>, r: &Array1<f64>, coeff: f64) -> Result<Array1<f64>> {
    prox_step(
        &problem.kernel,
        &ProxQuery {
            g,
            ref_point: r,
            coeff,
            reg: problem.reg,
            set: problem.set,
        },
    )
}

/// `f(x⁺) ≤ f(y) + <∇f(y), x⁺ − y> + bound`, up to rounding in `f`.
fn sufficient_decrease(f_next: f64, f_y: f64, g: &Array1<f64>, x_next: &Array1<f64>, y: &Array1<f64>, bound: f64) -> bool {
    let step = x_next - y;
    let model = f_y + g.dot(&step) + bound;
    let scale = f_y.abs() + f_next.abs() + g.iter().zip(x_next.iter().zip(y.iter())).map(|(gi, (a, b))| gi.abs() * (a.abs() + b.abs())).sum::<f64>();
    f_next <= model + DECREASE_RTOL * scale
}

fn local_gain_or_nan(problem: &CompositeProblem, x_next: &Array1<f64>, y: &Array1<f64>, z_next: &Array1<f64>, z: &Array1<f64>, theta: f64, gamma: f64) -> f64 {
    local_ts_gain(&problem.kernel, x_next, y, z_next, z, theta, gamma).unwrap_or(f64::NAN)
}

/// Bregman proximal gradient with the fixed coefficient `L`.
pub fn run_bpg(problem: &CompositeProblem, cfg: &SolverConfig, x0: &Array1<f64>) -> Result<SolverTrace> {
    let mut fx = prepare(problem, cfg, x0, Algorithm::Bpg)?;
    let l = problem.l();
    let mut rec = Recorder::new(Algorithm::Bpg, x0, fx, cfg.max_iter);
    let mut x = x0.clone();
    for k in 0..cfg.max_iter {
        let g = problem.objective.grad(&x).map_err(|e| e.at(k))?;
        rec.grad_calls += 1;
        let x_next = prox(problem, &g, &x, l).map_err(|e| e.at(k))?;
        rec.push(fx, f64::NAN, f64::NAN, f64::NAN, f64::NAN, 1);
        fx = problem.value(&x_next).map_err(|e| e.at(k))?;
        x = x_next;
        rec.observe(&x, fx);
    }
    Ok(rec.finish(x, fx))
}

/// BPG with the gain line search `M_k = max{G_{k−1}/ρ, G_min}`, `G_k = M_k ρᵗ`.
pub fn run_bpg_ls(problem: &CompositeProblem, cfg: &SolverConfig, x0: &Array1<f64>) -> Result<SolverTrace> {
    let mut fx = prepare(problem, cfg, x0, Algorithm::BpgLs)?;
    let l = problem.l();
    let mut rec = Recorder::new(Algorithm::BpgLs, x0, fx, cfg.max_iter);
    let mut x = x0.clone();
    let mut gain_prev = 1.0;
    for k in 0..cfg.max_iter {
        let (f_smooth, g) = problem.objective.value_grad(&x).map_err(|e| e.at(k))?;
        rec.grad_calls += 1;
        let m = (gain_prev / cfg.rho).max(cfg.gain_min);
        let mut accepted = None;
        for t in 0..cfg.max_trials {
            let gain = m * cfg.rho.powi(t as i32);
            let x_next = match prox(problem, &g, &x, gain * l) {
                Ok(v) => v,
                Err(Error::Unbounded { .. }) => continue,
                Err(e) => return Err(e.at(k)),
            };
            let f_next = problem.objective.value(&x_next).map_err(|e| e.at(k))?;
            let d = problem.kernel.divergence(&x_next, &x).map_err(|e| e.at(k))?;
            if sufficient_decrease(f_next, f_smooth, &g, &x_next, &x, gain * l * d) {
                accepted = Some((gain, t + 1, x_next, f_next));
                break;
            }
        }
        let (gain, trials, x_next, f_next) = accepted.ok_or(Error::Adaptation { iter: k, trials: cfg.max_trials })?;
        rec.push(fx, f64::NAN, f64::NAN, gain, f64::NAN, trials);
        gain_prev = gain;
        fx = f_next + problem.reg.value(&x_next);
        x = x_next;
        rec.observe(&x, fx);
    }
    Ok(rec.finish(x, fx))
}

/// Accelerated BPG with a fixed exponent; `theta_mode` picks the `θ` rule.
pub fn run_abpg(problem: &CompositeProblem, cfg: &SolverConfig, x0: &Array1<f64>) -> Result<SolverTrace> {
    let mut fx = prepare(problem, cfg, x0, Algorithm::Abpg)?;
    let l = problem.l();
    let gamma = cfg.gamma;
    let mut seq = ThetaSequence::new(cfg.theta_mode, gamma);
    let mut rec = Recorder::new(Algorithm::Abpg, x0, fx, cfg.max_iter);
    let mut x = x0.clone();
    let mut z = x0.clone();
    for k in 0..cfg.max_iter {
        let theta = seq.theta();
        let y = interpolate(&x, &z, theta);
        let g = problem.objective.grad(&y).map_err(|e| e.at(k))?;
        rec.grad_calls += 1;
        let z_next = prox(problem, &g, &z, theta.powf(gamma - 1.0) * l).map_err(|e| e.at(k))?;
        let x_next = interpolate(&x, &z_next, theta);
        let ghat = local_gain_or_nan(problem, &x_next, &y, &z_next, &z, theta, gamma);
        rec.push(fx, theta, gamma, f64::NAN, ghat, 1);
        let f_next = problem.value(&x_next).map_err(|e| e.at(k))?;
        if cfg.restart && f_next > fx {
            seq.restart();
            z = x_next.clone();
            rec.restarts.push(k);
        } else {
            seq.advance(1.0).map_err(|e| e.at(k))?;
            z = z_next;
        }
        x = x_next;
        fx = f_next;
        rec.observe(&x, fx);
    }
    Ok(rec.finish(x, fx))
}

/// ABPG with exponent adaptation. Within iteration `k`, `θ_k` stays fixed
/// while `γ_k = max{γ_{k−1} − δt, γ_min}` is lowered until sufficient
/// decrease holds; `θ_{k+1}` then solves the equality with exponent `γ_k`.
pub fn run_abpg_e(problem: &CompositeProblem, cfg: &SolverConfig, x0: &Array1<f64>) -> Result<SolverTrace> {
    let mut fx = prepare(problem, cfg, x0, Algorithm::AbpgE)?;
    let l = problem.l();
    let mut gamma_prev = cfg.gamma0;
    let mut seq = ThetaSequence::new(ThetaMode::EqualityRoot, gamma_prev);
    let mut rec = Recorder::new(Algorithm::AbpgE, x0, fx, cfg.max_iter);
    let mut x = x0.clone();
    let mut z = x0.clone();
    for k in 0..cfg.max_iter {
        let theta = seq.theta();
        let y = interpolate(&x, &z, theta);
        let (f_y, g) = problem.objective.value_grad(&y).map_err(|e| e.at(k))?;
        rec.grad_calls += 1;
        let mut accepted = None;
        for t in 0..cfg.max_trials {
            let gamma = (gamma_prev - cfg.delta * t as f64).max(cfg.gamma_min);
            if gamma <= 0.0 {
                break;
            }
            let step = prox(problem, &g, &z, theta.powf(gamma - 1.0) * l);
            let candidate = match step {
                Ok(z_next) => {
                    let x_next = interpolate(&x, &z_next, theta);
                    let f_next = problem.objective.value(&x_next).map_err(|e| e.at(k))?;
                    let d = problem.kernel.divergence(&z_next, &z).map_err(|e| e.at(k))?;
                    let bound = theta.powf(gamma) * l * d;
                    sufficient_decrease(f_next, f_y, &g, &x_next, &y, bound).then_some((z_next, x_next, f_next))
                }
                Err(Error::Unbounded { .. }) => None,
                Err(e) => return Err(e.at(k)),
            };
            if let Some((z_next, x_next, f_next)) = candidate {
                accepted = Some((gamma, t + 1, z_next, x_next, f_next));
                break;
            }
            if gamma <= cfg.gamma_min {
                break;
            }
        }
        let (gamma, trials, z_next, x_next, f_next) = accepted.ok_or(Error::Adaptation { iter: k, trials: cfg.max_trials })?;
        let ghat = local_gain_or_nan(problem, &x_next, &y, &z_next, &z, theta, gamma);
        rec.push(fx, theta, gamma, f64::NAN, ghat, trials);
        gamma_prev = gamma;
        seq.set_gamma(gamma);
        seq.advance(1.0).map_err(|e| e.at(k))?;
        z = z_next;
        fx = f_next + problem.reg.value(&x_next);
        x = x_next;
        rec.observe(&x, fx);
    }
    Ok(rec.finish(x, fx))
}

/// ABPG with gain adaptation. Every trial recomputes `θ_k` (when `k > 0`),
/// `y_k` and `∇f(y_k)`, so each trial costs one gradient call.
pub fn run_abpg_g(problem: &CompositeProblem, cfg: &SolverConfig, x0: &Array1<f64>) -> Result<SolverTrace> {
    let mut fx = prepare(problem, cfg, x0, Algorithm::AbpgG)?;
    let l = problem.l();
    let gamma = cfg.gamma;
    let explicit = cfg.theta_mode == ThetaMode::GainCoupledExplicit;
    let mut rec = Recorder::new(Algorithm::AbpgG, x0, fx, cfg.max_iter);
    let mut x = x0.clone();
    let mut z = x0.clone();
    let mut gain_prev = 1.0;
    let mut theta_prev = 1.0;
    // iterations since the last (re)start; θ = 1 while it is zero
    let mut local_k = 0usize;
    for k in 0..cfg.max_iter {
        let m = (gain_prev / cfg.rho).max(cfg.gain_min);
        let mut accepted = None;
        for t in 0..cfg.max_trials {
            let gain = m * cfg.rho.powi(t as i32);
            let theta = if local_k == 0 {
                1.0
            } else if explicit {
                theta_next_gain_explicit(gamma, theta_prev, gain / gain_prev)
            } else {
                theta_next_gain_equality(gamma, theta_prev, gain_prev, gain).map_err(|e| e.at(k))?
            };
            let y = interpolate(&x, &z, theta);
            let (f_y, g) = problem.objective.value_grad(&y).map_err(|e| e.at(k))?;
            rec.grad_calls += 1;
            let z_next = match prox(problem, &g, &z, gain * theta.powf(gamma - 1.0) * l) {
                Ok(v) => v,
                Err(Error::Unbounded { .. }) => continue,
                Err(e) => return Err(e.at(k)),
            };
            let x_next = interpolate(&x, &z_next, theta);
            let f_next = problem.objective.value(&x_next).map_err(|e| e.at(k))?;
            let d = problem.kernel.divergence(&z_next, &z).map_err(|e| e.at(k))?;
            let bound = gain * theta.powf(gamma) * l * d;
            if sufficient_decrease(f_next, f_y, &g, &x_next, &y, bound) {
                accepted = Some((gain, theta, t + 1, y, z_next, x_next, f_next));
                break;
            }
        }
        let (gain, theta, trials, y, z_next, x_next, f_next) =
            accepted.ok_or(Error::Adaptation { iter: k, trials: cfg.max_trials })?;
        let ghat = local_gain_or_nan(problem, &x_next, &y, &z_next, &z, theta, gamma);
        rec.push(fx, theta, gamma, gain, ghat, trials);
        gain_prev = gain;
        theta_prev = theta;
        let f_next = f_next + problem.reg.value(&x_next);
        if cfg.restart && f_next > fx {
            local_k = 0;
            z = x_next.clone();
            rec.restarts.push(k);
        } else {
            local_k += 1;
            z = z_next;
        }
        x = x_next;
        fx = f_next;
        rec.observe(&x, fx);
    }
    Ok(rec.finish(x, fx))
}

/// Accelerated Bregman dual averaging; `θ` always follows the equality root
/// so that `Σ_{t≤k} θ_t^{1−γ} = θ_k^{−γ}`.
pub fn run_abda(problem: &CompositeProblem, cfg: &SolverConfig, x0: &Array1<f64>) -> Result<SolverTrace> {
    let mut fx = prepare(problem, cfg, x0, Algorithm::Abda)?;
    let l = problem.l();
    let gamma = cfg.gamma;
    let mut seq = ThetaSequence::new(ThetaMode::EqualityRoot, gamma);
    let mut rec = Recorder::new(Algorithm::Abda, x0, fx, cfg.max_iter);
    let mut x = x0.clone();
    let mut z = x0.clone();
    let mut g_accum = Array1::<f64>::zeros(x0.len());
    let mut theta_accum = 0.0;
    for k in 0..cfg.max_iter {
        let theta = seq.theta();
        let y = interpolate(&x, &z, theta);
        let g = problem.objective.grad(&y).map_err(|e| e.at(k))?;
        rec.grad_calls += 1;
        let w = theta.powf(1.0 - gamma);
        g_accum.scaled_add(w, &g);
        theta_accum += w;
        let query = DualAvgQuery {
            g_accum: &g_accum,
            theta_accum,
            l,
            reg: problem.reg,
            set: problem.set,
        };
        let z_next = dual_avg_step(&problem.kernel, &query).map_err(|e| {
            if matches!(e, Error::Unbounded { .. }) {
                log::error!("dual averaging over the Burg orthant needs a positive accumulated gradient; consider a squared-L2 regularizer");
            }
            e.at(k)
        })?;
        let x_next = interpolate(&x, &z_next, theta);
        let ghat = local_gain_or_nan(problem, &x_next, &y, &z_next, &z, theta, gamma);
        rec.push(fx, theta, gamma, f64::NAN, ghat, 1);
        seq.advance(1.0).map_err(|e| e.at(k))?;
        z = z_next;
        fx = problem.value(&x_next).map_err(|e| e.at(k))?;
        x = x_next;
        rec.observe(&x, fx);
    }
    Ok(rec.finish(x, fx))
}

/// ABPG or ABPG-g with momentum reset whenever `F(x_{k+1}) > F(x_k)`:
/// `θ ← 1`, `z ← x_{k+1}`; ABPG-g keeps its last accepted gain.
pub fn run_with_restart(problem: &CompositeProblem, cfg: &SolverConfig, x0: &Array1<f64>) -> Result<SolverTrace> {
    let cfg = cfg.clone().with_restart(true);
    match cfg.algorithm {
        Algorithm::Abpg => run_abpg(problem, &cfg, x0),
        Algorithm::AbpgG => run_abpg_g(problem, &cfg, x0),
        other => Err(Error::Config(format!("restart is only supported for abpg and abpg-g, not {other}"))),
    }
}

/// Best point of a long ABPG-g run with restart (`iters` iterations, `γ = 2`).
pub fn reference_solution(problem: &CompositeProblem, x0: &Array1<f64>, iters: usize) -> Result<(f64, Array1<f64>)> {
    let cfg = SolverConfig::new(Algorithm::AbpgG, iters).with_restart(true);
    let trace = run(problem, &cfg, x0)?;
    Ok((trace.best_f, trace.x_best))
}
