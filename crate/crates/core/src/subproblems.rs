//! Exact solvers for the prox-type subproblems
//!
//! ```text
//! prox:      argmin_{z ∈ C}  <g, z> + Ψ(z) + c·D_h(z, z_ref)
//! dual avg:  argmin_{z ∈ C}  <g_acc, z> + ϑ·Ψ(z) + L·h(z)
//! ```
//!
//! Supported (kernel, set, Ψ) pairings:
//!
//! - Burg: simplex with `Ψ = 0`; orthant with `Ψ ∈ {0, L1, squared L2}`
//! - Shannon: orthant with `Ψ ∈ {0, L1}`
//! - squared Euclidean: simplex or orthant, any `Ψ`
//!
//! For Burg, both subproblems reduce to `argmin <a, z> + Ψ(z) − c Σ log zᵢ`
//! with `a = g + c ⊘ z_ref` (prox) or `a = g_acc` (dual averaging).

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::kernels::{BregmanKernel, KernelKind};
use crate::objectives::Regularizer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibleSet {
    Simplex,
    NonnegOrthant,
}

#[derive(Clone, Debug)]
pub struct ProxQuery<'a> {
    pub g: &'a Array1<f64>,
    pub ref_point: &'a Array1<f64>,
    pub coeff: f64,
    pub reg: Regularizer,
    pub set: FeasibleSet,
}

#[derive(Clone, Debug)]
pub struct DualAvgQuery<'a> {
    pub g_accum: &'a Array1<f64>,
    pub theta_accum: f64,
    pub l: f64,
    pub reg: Regularizer,
    pub set: FeasibleSet,
}

const EXP_CLIP: f64 = 700.0;
const SIMPLEX_TOL: f64 = 1e-14;
const MAX_NEWTON: usize = 100;

/// Rejects pairings without an exact solver.
pub fn check_pairing(kind: KernelKind, set: FeasibleSet, reg: &Regularizer) -> Result<()> {
    reg.validate()?;
    let ok = match (kind, set, reg) {
        (KernelKind::SquaredEuclidean, _, _) => true,
        (KernelKind::BurgEntropy, FeasibleSet::Simplex, Regularizer::Zero) => true,
        (KernelKind::BurgEntropy, FeasibleSet::NonnegOrthant, _) => true,
        (KernelKind::ShannonEntropy, FeasibleSet::NonnegOrthant, Regularizer::Zero | Regularizer::L1(_)) => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("{kind:?} kernel over {set:?} with regularizer {reg}")))
    }
}

pub fn prox_step(kernel: &BregmanKernel, q: &ProxQuery<'_>) -> Result<Array1<f64>> {
    check_pairing(kernel.kind(), q.set, &q.reg)?;
    check_dim(kernel.dim(), q.g.len())?;
    kernel.check_interior(q.ref_point)?;
    check_coeff(q.coeff)?;
    let c = q.coeff;
    match kernel.kind() {
        KernelKind::BurgEntropy => {
            let a = q.g + &q.ref_point.mapv(|r| c / r);
            burg_linear(&a, c, q.reg, q.set)
        }
        KernelKind::ShannonEntropy => {
            let shift = q.reg.lambda();
            let z = q
                .g
                .iter()
                .zip(q.ref_point.iter())
                .map(|(&gi, &ri)| (ri * clipped_exp(-(gi + shift) / c)).max(f64::MIN_POSITIVE));
            Ok(Array1::from_iter(z))
        }
        KernelKind::SquaredEuclidean => Ok(euclidean_prox(q.g, q.ref_point, c, q.reg, q.set)),
    }
}

pub fn dual_avg_step(kernel: &BregmanKernel, q: &DualAvgQuery<'_>) -> Result<Array1<f64>> {
    check_pairing(kernel.kind(), q.set, &q.reg)?;
    check_dim(kernel.dim(), q.g_accum.len())?;
    check_coeff(q.l)?;
    if !(q.theta_accum > 0.0) {
        return Err(Error::Config(format!("theta_accum must be positive, got {}", q.theta_accum)));
    }
    let reg = q.reg.scaled(q.theta_accum);
    match kernel.kind() {
        KernelKind::BurgEntropy => burg_linear(q.g_accum, q.l, reg, q.set),
        KernelKind::ShannonEntropy => {
            let shift = reg.lambda();
            Ok(q.g_accum.mapv(|gi| clipped_exp(-(gi + shift) / q.l - 1.0).max(f64::MIN_POSITIVE)))
        }
        KernelKind::SquaredEuclidean => {
            let origin = Array1::zeros(q.g_accum.len());
            Ok(euclidean_prox(q.g_accum, &origin, q.l, reg, q.set))
        }
    }
}

fn check_coeff(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("proximal coefficient must be positive and finite, got {c}")))
    }
}

/// Entropic steps keep iterates interior: tiny coordinates are floored at
/// the smallest normal float instead of underflowing to zero.
fn clipped_exp(t: f64) -> f64 {
    if t.abs() > EXP_CLIP {
        log::warn!("exponent {t:e} clipped to ±{EXP_CLIP} in entropic step");
        t.clamp(-EXP_CLIP, EXP_CLIP).exp()
    } else {
        t.exp()
    }
}

/// `argmin <a, z> + Ψ(z) − c Σ log zᵢ` over the set.
fn burg_linear(a: &Array1<f64>, c: f64, reg: Regularizer, set: FeasibleSet) -> Result<Array1<f64>> {
    match set {
        FeasibleSet::Simplex => burg_simplex(a, c),
        FeasibleSet::NonnegOrthant => {
            let mut z = Array1::zeros(a.len());
            for (i, &ai) in a.iter().enumerate() {
                z[i] = match reg {
                    Regularizer::Zero => burg_coordinate(i, ai, c)?,
                    Regularizer::L1(lam) => burg_coordinate(i, ai + lam, c)?,
                    Regularizer::SquaredL2(mu) if mu == 0.0 => burg_coordinate(i, ai, c)?,
                    // positive root of mu z² + a z − c = 0
                    Regularizer::SquaredL2(mu) => {
                        let disc = (ai * ai + 4.0 * mu * c).sqrt();
                        if ai >= 0.0 {
                            2.0 * c / (ai + disc)
                        } else {
                            (disc - ai) / (2.0 * mu)
                        }
                    }
                };
            }
            Ok(z)
        }
    }
}

fn burg_coordinate(coord: usize, a: f64, c: f64) -> Result<f64> {
    if a > 0.0 && a.is_finite() {
        Ok(c / a)
    } else {
        Err(Error::Unbounded { coord, coeff: a })
    }
}

/// Solves `zᵢ = c / (aᵢ + λ)`, `Σ zᵢ = 1`.
///
/// With `dᵢ = aᵢ − min a` and `μ = λ + min a`, `Σ c/(dᵢ + μ)` is convex and
/// strictly decreasing on `μ > 0`, so Newton started left of the root
/// (`μ = c`, where the sum is at least 1) increases monotonically to it.
/// Bisection on the bracket `(0, n c]` guards against rounding.
fn burg_simplex(a: &Array1<f64>, c: f64) -> Result<Array1<f64>> {
    let n = a.len();
    let amin = a.iter().cloned().fold(f64::INFINITY, f64::min);
    if !amin.is_finite() {
        return Err(Error::Config("non-finite linear coefficient in simplex subproblem".into()));
    }
    let d = a.mapv(|ai| ai - amin);
    let eval = |mu: f64| -> (f64, f64) {
        let mut s = 0.0;
        let mut ds = 0.0;
        for &di in d.iter() {
            let t = c / (di + mu);
            s += t;
            ds -= t / (di + mu);
        }
        (s - 1.0, ds)
    };
    let (mut lo, mut hi) = (0.0, n as f64 * c);
    let mut mu = c;
    let mut resid = f64::INFINITY;
    for _ in 0..MAX_NEWTON {
        let (s, ds) = eval(mu);
        resid = s;
        if s.abs() <= SIMPLEX_TOL {
            break;
        }
        if s > 0.0 {
            lo = mu;
        } else {
            hi = mu;
        }
        let mut next = mu - s / ds;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == mu {
            break;
        }
        mu = next;
    }
    if resid.abs() > 1e-12 {
        return Err(Error::NonConvergence {
            what: "simplex multiplier",
            iters: MAX_NEWTON,
            residual: resid,
        });
    }
    Ok(d.mapv(|di| c / (di + mu)))
}

/// `argmin <g, z> + Ψ(z) + (c/2)‖z − r‖²` over the set.
fn euclidean_prox(g: &Array1<f64>, r: &Array1<f64>, c: f64, reg: Regularizer, set: FeasibleSet) -> Array1<f64> {
    let target = match (reg, set) {
        (Regularizer::Zero, _) => r - &(g / c),
        // on both sets |z| = z, so L1 is a linear shift
        (Regularizer::L1(lam), FeasibleSet::NonnegOrthant) => r - &(g.mapv(|gi| gi + lam) / c),
        (Regularizer::L1(_), FeasibleSet::Simplex) => r - &(g / c),
        (Regularizer::SquaredL2(mu), _) => (r * c - g) / (c + mu),
    };
    match set {
        FeasibleSet::NonnegOrthant => target.mapv(|v| v.max(0.0)),
        FeasibleSet::Simplex => project_simplex(&target),
    }
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(v: &Array1<f64>) -> Array1<f64> {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            tau = t;
        }
    }
    v.mapv(|vi| (vi - tau).max(0.0))
}
