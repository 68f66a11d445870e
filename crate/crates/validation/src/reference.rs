use bregman_core::{KernelKind, Regularizer};
use rand::Rng;

/// `D_h(x, y)` summed coordinatewise, `+∞` outside the kernel domain.
pub fn divergence(kind: KernelKind, x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| match kind {
            KernelKind::SquaredEuclidean => 0.5 * (a - b) * (a - b),
            KernelKind::ShannonEntropy => {
                if a < 0.0 {
                    f64::INFINITY
                } else if a == 0.0 {
                    b
                } else {
                    a * (a / b).ln() - a + b
                }
            }
            KernelKind::BurgEntropy => {
                if a <= 0.0 {
                    f64::INFINITY
                } else {
                    a / b - (a / b).ln() - 1.0
                }
            }
        })
        .sum()
}

pub fn regularizer(reg: Regularizer, z: &[f64]) -> f64 {
    match reg {
        Regularizer::Zero => 0.0,
        Regularizer::L1(lam) => lam * z.iter().map(|v| v.abs()).sum::<f64>(),
        Regularizer::SquaredL2(lam) => 0.5 * lam * z.iter().map(|v| v * v).sum::<f64>(),
    }
}

/// `<g, z> + Ψ(z) + c·D_h(z, r)`.
pub fn prox_objective(kind: KernelKind, g: &[f64], r: &[f64], c: f64, reg: Regularizer, z: &[f64]) -> f64 {
    let lin: f64 = g.iter().zip(z).map(|(a, b)| a * b).sum();
    lin + regularizer(reg, z) + c * divergence(kind, z, r)
}

/// `n` draws spread evenly in `log` over `[lo, hi]`.
pub fn log_uniform(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|_| rng.random_range(a..b).exp()).collect()
}
