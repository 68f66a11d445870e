//! Rate certificates replayed from recorded traces.

use bregman_core::Algorithm;
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

/// `Ḡ_k = (G₀^γ G₁⋯G_k)^{1/(k+γ)}` for `gains = [G₀, …, G_k]`, in log space.
pub fn geo_mean_gain(gains: &[f64], gamma: f64) -> Result<f64> {
    geo_mean_gain_series(gains, gamma)?
        .last()
        .copied()
        .ok_or_else(|| HarnessError::Invalid("geometric mean of an empty gain sequence".into()))
}

/// `Ḡ_0, …, Ḡ_k`.
pub fn geo_mean_gain_series(gains: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if !(gamma > 0.0) {
        return Err(HarnessError::Invalid(format!("gamma must be positive, got {gamma}")));
    }
    let mut log_sum = 0.0;
    let mut out = Vec::with_capacity(gains.len());
    for (k, &g) in gains.iter().enumerate() {
        if !(g > 0.0 && g.is_finite()) {
            return Err(HarnessError::Invalid(format!("gain G_{k} = {g} is not positive")));
        }
        log_sum += if k == 0 { gamma * g.ln() } else { g.ln() };
        out.push((log_sum / (k as f64 + gamma)).exp());
    }
    Ok(out)
}

/// Least-squares slope of `log gap_k` against `log k` for `k ∈ [k_lo, k_hi]`,
/// where `gaps[k]` is the gap at iterate `k`.
pub fn fit_rate_slope(gaps: &[f64], k_lo: usize, k_hi: usize) -> Result<f64> {
    if k_lo < 1 || k_hi <= k_lo {
        return Err(HarnessError::Invalid(format!("slope window [{k_lo}, {k_hi}] needs 1 <= k_lo < k_hi")));
    }
    if k_hi >= gaps.len() {
        return Err(HarnessError::Invalid(format!(
            "slope window ends at {k_hi} but the trace has {} iterates",
            gaps.len()
        )));
    }
    let mut pts = Vec::with_capacity(k_hi - k_lo + 1);
    for (k, &gap) in gaps.iter().enumerate().take(k_hi + 1).skip(k_lo) {
        if !(gap > 0.0) {
            return Err(HarnessError::Invalid(format!("gap at k = {k} is {gap:e}; the window must end before the numerical floor")));
        }
        pts.push(((k as f64).ln(), gap.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Which bound on `F(x_{k+1}) − F(x̂)` an algorithm's trace can be checked against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundKind {
    /// `scale / (k+1)`
    Proximal,
    /// `scale / Σ_{t≤k} 1/G_t`
    ProximalLineSearch,
    /// `(γ/(k+γ))^γ · scale`
    Accelerated { gamma: f64 },
    /// `(γ/(k+γ))^γ · Ḡ_k · scale`
    GainAdapted { gamma: f64 },
    /// no bound (exponent adaptation)
    Unavailable,
}

impl BoundKind {
    pub fn for_algorithm(alg: Algorithm, gamma: f64) -> Self {
        match alg {
            Algorithm::Bpg => BoundKind::Proximal,
            Algorithm::BpgLs => BoundKind::ProximalLineSearch,
            Algorithm::Abpg | Algorithm::Abda => BoundKind::Accelerated { gamma },
            Algorithm::AbpgG => BoundKind::GainAdapted { gamma },
            Algorithm::AbpgE => BoundKind::Unavailable,
        }
    }
}

/// One certificate row: the bound for the iterate produced at step `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub k: usize,
    /// `Ḡ_k`, NaN unless gains are adapted
    pub geo_mean_gain: f64,
    pub theory_bound: f64,
    /// `F(x_{k+1}) − F*`
    pub observed_gap: f64,
    /// slope of `log gap` over `[k_lo, k+1]`
    pub slope: Option<f64>,
}

impl Certificate {
    /// Bound respected up to the absolute slack.
    pub fn holds(&self, slack: f64) -> bool {
        self.theory_bound.is_nan() || self.observed_gap <= self.theory_bound + slack
    }
}

/// Certificates from `F(x_0..x_K)` and the per-step gains (`NaN` when absent).
/// `bound_scale` is `L·D_h(x̂, x₀)`.
pub fn certificates(
    f_values: &[f64],
    gains: &[f64],
    kind: BoundKind,
    f_star: f64,
    bound_scale: f64,
    slope_lo: usize,
) -> Result<Vec<Certificate>> {
    let steps = f_values.len().saturating_sub(1);
    if gains.len() != steps {
        return Err(HarnessError::Invalid(format!(
            "{} gains for {steps} steps",
            gains.len()
        )));
    }
    let gbar = match kind {
        BoundKind::GainAdapted { gamma } => geo_mean_gain_series(gains, gamma)?,
        _ => vec![f64::NAN; steps],
    };
    let gaps: Vec<f64> = f_values.iter().map(|f| f - f_star).collect();
    let slope_lo = slope_lo.max(1);
    let mut inv_gain_sum = 0.0;
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        let kf = k as f64;
        let theory_bound = match kind {
            BoundKind::Proximal => bound_scale / (kf + 1.0),
            BoundKind::ProximalLineSearch => {
                inv_gain_sum += 1.0 / gains[k];
                bound_scale / inv_gain_sum
            }
            BoundKind::Accelerated { gamma } => (gamma / (kf + gamma)).powf(gamma) * bound_scale,
            BoundKind::GainAdapted { gamma } => (gamma / (kf + gamma)).powf(gamma) * gbar[k] * bound_scale,
            BoundKind::Unavailable => f64::NAN,
        };
        let slope = if k + 1 > slope_lo {
            fit_rate_slope(&gaps, slope_lo, k + 1).ok()
        } else {
            None
        };
        out.push(Certificate {
            k,
            geo_mean_gain: gbar[k],
            theory_bound,
            observed_gap: gaps[k + 1],
            slope,
        });
    }
    Ok(out)
}
