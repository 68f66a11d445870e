//! Running several algorithms on one instance against a shared reference optimum.

use std::thread;

use bregman_core::{run, Algorithm, Error as CoreError, Instance, SolverConfig, SolverTrace};
use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::certificate::{fit_rate_slope, geo_mean_gain};
use crate::Result;

pub const FSTAR_METHOD: &str =
    "minimum over the best iterates of all compared runs and of an abpg-g run with restart for ref_iters iterations";

#[derive(Clone, Debug)]
pub struct CompareOptions {
    pub algorithms: Vec<Algorithm>,
    /// Shared settings; `algorithm` and `theta_mode` are set per run.
    pub base: SolverConfig,
    pub ref_iters: usize,
    /// Known optimal value; skips the reference run when set.
    pub f_star: Option<f64>,
    pub slope_window: Option<(usize, usize)>,
}

impl CompareOptions {
    pub fn config_for(&self, alg: Algorithm) -> SolverConfig {
        let defaults = SolverConfig::new(alg, self.base.max_iter);
        SolverConfig {
            algorithm: alg,
            theta_mode: match alg {
                Algorithm::AbpgG if self.base.theta_mode.uses_gains() => self.base.theta_mode,
                Algorithm::Abpg if !self.base.theta_mode.uses_gains() => self.base.theta_mode,
                _ => defaults.theta_mode,
            },
            restart: self.base.restart && matches!(alg, Algorithm::Abpg | Algorithm::AbpgG),
            ..self.base.clone()
        }
    }

    /// `[K/10, K]` unless overridden.
    pub fn window(&self) -> (usize, usize) {
        self.slope_window
            .unwrap_or((self.base.max_iter / 10, self.base.max_iter))
    }
}

pub struct Outcome {
    pub algorithm: Algorithm,
    pub result: std::result::Result<SolverTrace, CoreError>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub error: Option<String>,
    pub final_f: Option<f64>,
    pub final_gap: Option<f64>,
    pub best_f: Option<f64>,
    /// `Ḡ_K` for gain-adapted runs
    pub geo_mean_gain: Option<f64>,
    pub slope: Option<f64>,
    pub grad_calls: Option<usize>,
    pub restarts: Option<usize>,
    pub final_gamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub family: String,
    pub m: usize,
    pub n: usize,
    pub seed: Option<u64>,
    pub iters: usize,
    pub gamma: f64,
    pub f_star: f64,
    pub f_star_method: String,
    pub ref_iters: usize,
    /// `L·D_h(x̂, x₀)` with `x̂` the point attaining `f_star`; unknown when
    /// `f_star` was supplied
    pub bound_scale: Option<f64>,
    pub slope_window: (usize, usize),
    pub algorithms: Vec<AlgorithmSummary>,
}

/// Runs every algorithm, each on its own thread.
pub fn run_all(instance: &Instance, opts: &CompareOptions) -> Vec<Outcome> {
    thread::scope(|s| {
        let handles: Vec<_> = opts
            .algorithms
            .iter()
            .map(|&alg| {
                let cfg = opts.config_for(alg);
                s.spawn(move || Outcome {
                    algorithm: alg,
                    result: run(&instance.problem, &cfg, &instance.x0),
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    })
}

/// `(F*, x̂)` as the best point over the reference run and `outcomes`.
pub fn reference_optimum(instance: &Instance, ref_iters: usize, outcomes: &[Outcome]) -> Result<(f64, Array1<f64>)> {
    let (mut f_star, mut x_hat) = bregman_core::solvers::reference_solution(&instance.problem, &instance.x0, ref_iters)?;
    for trace in outcomes.iter().filter_map(|o| o.result.as_ref().ok()) {
        if trace.best_f < f_star {
            f_star = trace.best_f;
            x_hat = trace.x_best.clone();
        }
    }
    Ok((f_star, x_hat))
}

pub fn bound_scale(instance: &Instance, x_hat: &Array1<f64>) -> Result<f64> {
    Ok(instance.problem.l() * instance.problem.kernel.divergence(x_hat, &instance.x0)?)
}

pub fn summarize(instance: &Instance, opts: &CompareOptions, outcomes: &[Outcome], f_star: f64, bound_scale: Option<f64>) -> Summary {
    let window = opts.window();
    let algorithms = outcomes
        .iter()
        .map(|o| match &o.result {
            Err(e) => AlgorithmSummary {
                algorithm: o.algorithm,
                error: Some(e.to_string()),
                final_f: None,
                final_gap: None,
                best_f: None,
                geo_mean_gain: None,
                slope: None,
                grad_calls: None,
                restarts: None,
                final_gamma: None,
            },
            Ok(t) => {
                let gaps: Vec<f64> = t.f_values().iter().map(|f| f - f_star).collect();
                let geo = (o.algorithm == Algorithm::AbpgG)
                    .then(|| geo_mean_gain(&t.gains(), opts.base.gamma).ok())
                    .flatten();
                AlgorithmSummary {
                    algorithm: o.algorithm,
                    error: None,
                    final_f: Some(t.final_f),
                    final_gap: Some(t.final_f - f_star),
                    best_f: Some(t.best_f),
                    geo_mean_gain: geo,
                    slope: fit_rate_slope(&gaps, window.0, window.1).ok(),
                    grad_calls: Some(t.total_grad_calls()),
                    restarts: Some(t.restarts.len()),
                    final_gamma: t.rows.last().map(|r| r.gamma).filter(|g| !g.is_nan()),
                }
            }
        })
        .collect();
    Summary {
        family: instance.family.to_string(),
        m: instance.m(),
        n: instance.n(),
        seed: instance.seed,
        iters: opts.base.max_iter,
        gamma: opts.base.gamma,
        f_star,
        f_star_method: if opts.f_star.is_some() { "supplied".into() } else { FSTAR_METHOD.into() },
        ref_iters: if opts.f_star.is_some() { 0 } else { opts.ref_iters },
        bound_scale,
        slope_window: window,
        algorithms,
    }
}
