//! Legendre reference functions `h`, their Bregman divergences, and
//! triangle-scaling diagnostics.
//!
//! All three kernels are separable, so the Hessian is only ever exposed as a
//! quadratic form `<∇²h(x) v, v>`.
//!
//! | kernel            | h(x)            | D_h(x, y)                              |
//! |-------------------|-----------------|----------------------------------------|
//! | squared Euclidean | ½‖x‖²           | ½‖x − y‖²                              |
//! | Shannon entropy   | Σ xᵢ log xᵢ     | Σ xᵢ log(xᵢ/yᵢ) − xᵢ + yᵢ  (KL)        |
//! | Burg entropy      | −Σ log xᵢ       | Σ −log(xᵢ/yᵢ) + xᵢ/yᵢ − 1  (IS)        |

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    SquaredEuclidean,
    ShannonEntropy,
    BurgEntropy,
}

/// A separable Legendre kernel on `ℝⁿ` (Euclidean) or the positive orthant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BregmanKernel {
    kind: KernelKind,
    dim: usize,
}

impl BregmanKernel {
    pub fn new(kind: KernelKind, dim: usize) -> Self {
        assert!(dim > 0, "kernel dimension must be positive");
        Self { kind, dim }
    }

    pub fn squared_euclidean(dim: usize) -> Self {
        Self::new(KernelKind::SquaredEuclidean, dim)
    }

    pub fn shannon(dim: usize) -> Self {
        Self::new(KernelKind::ShannonEntropy, dim)
    }

    pub fn burg(dim: usize) -> Self {
        Self::new(KernelKind::BurgEntropy, dim)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Checks `x ∈ dom h`. Shannon admits zero coordinates, Burg does not.
    pub fn check_domain(&self, x: &Array1<f64>) -> Result<()> {
        check_dim(self.dim, x.len())?;
        match self.kind {
            KernelKind::SquaredEuclidean => check_finite(x),
            KernelKind::ShannonEntropy => check_positive(x, false),
            KernelKind::BurgEntropy => check_positive(x, true),
        }
    }

    /// Checks `x ∈ int dom h`.
    pub fn check_interior(&self, x: &Array1<f64>) -> Result<()> {
        check_dim(self.dim, x.len())?;
        match self.kind {
            KernelKind::SquaredEuclidean => check_finite(x),
            _ => check_positive(x, true),
        }
    }

    pub fn value(&self, x: &Array1<f64>) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match self.kind {
            KernelKind::SquaredEuclidean => 0.5 * x.dot(x),
            KernelKind::ShannonEntropy => x.iter().map(|&v| xlogx(v)).sum(),
            KernelKind::BurgEntropy => -x.iter().map(|v| v.ln()).sum::<f64>(),
        })
    }

    pub fn grad(&self, x: &Array1<f64>) -> Result<Array1<f64>> {
        self.check_interior(x)?;
        Ok(match self.kind {
            KernelKind::SquaredEuclidean => x.clone(),
            KernelKind::ShannonEntropy => x.mapv(|v| v.ln() + 1.0),
            KernelKind::BurgEntropy => x.mapv(|v| -1.0 / v),
        })
    }

    /// `D_h(x, y)` with `x ∈ dom h`, `y ∈ int dom h`.
    pub fn divergence(&self, x: &Array1<f64>, y: &Array1<f64>) -> Result<f64> {
        self.check_domain(x)?;
        self.check_interior(y)?;
        let pairs = x.iter().zip(y.iter());
        Ok(match self.kind {
            KernelKind::SquaredEuclidean => {
                0.5 * pairs.map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            }
            KernelKind::ShannonEntropy => pairs
                .map(|(&a, &b)| {
                    if a == 0.0 {
                        b
                    } else {
                        let d = a - b;
                        a * (d / b).ln_1p() - d
                    }
                })
                .sum(),
            KernelKind::BurgEntropy => pairs
                .map(|(&a, &b)| {
                    let d = (a - b) / b;
                    d - d.ln_1p()
                })
                .sum(),
        })
    }

    /// `<∇²h(x) v, v>`.
    pub fn hessian_quadratic_form(&self, x: &Array1<f64>, v: &Array1<f64>) -> Result<f64> {
        self.check_interior(x)?;
        check_dim(self.dim, v.len())?;
        let pairs = x.iter().zip(v.iter());
        Ok(match self.kind {
            KernelKind::SquaredEuclidean => v.dot(v),
            KernelKind::ShannonEntropy => pairs.map(|(a, b)| b * b / a).sum(),
            KernelKind::BurgEntropy => pairs.map(|(a, b)| b * b / (a * a)).sum(),
        })
    }
}

fn xlogx(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v * v.ln()
    }
}

fn check_finite(x: &Array1<f64>) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(coord) => Err(Error::Domain {
            coord,
            value: x[coord],
            reason: "coordinate must be finite",
        }),
        None => Ok(()),
    }
}

fn check_positive(x: &Array1<f64>, strict: bool) -> Result<()> {
    let bad = |v: f64| !v.is_finite() || v < 0.0 || (strict && v == 0.0);
    match x.iter().position(|&v| bad(v)) {
        Some(coord) => Err(Error::Domain {
            coord,
            value: x[coord],
            reason: if strict {
                "coordinate must be strictly positive"
            } else {
                "coordinate must be nonnegative"
            },
        }),
        None => Ok(()),
    }
}

/// Relaxed triangle-scaling gain `G(x, z, z̃)` for exponent `γ`:
/// `D_h((1−θ)x+θz, (1−θ)x+θz̃) ≤ G θ^γ D_h(z, z̃)` for all `θ ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleGain {
    pub x: Array1<f64>,
    pub z: Array1<f64>,
    pub ztil: Array1<f64>,
    pub gamma: f64,
    pub gain: f64,
}

/// Local triangle-scaling gain `D_h(x⁺, y) / (θ^γ D_h(z⁺, z))` observed along an
/// accelerated step, where `x⁺ = (1−θ)x + θz⁺` and `y = (1−θ)x + θz`.
pub fn local_ts_gain(
    kernel: &BregmanKernel,
    x_next: &Array1<f64>,
    y: &Array1<f64>,
    z_next: &Array1<f64>,
    z: &Array1<f64>,
    theta: f64,
    gamma: f64,
) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Config(format!("theta must lie in (0, 1], got {theta}")));
    }
    let dz = kernel.divergence(z_next, z)?;
    if dz <= 0.0 {
        return Err(Error::DegenerateStep);
    }
    let dx = kernel.divergence(x_next, y)?;
    Ok(dx / (theta.powf(gamma) * dz))
}

/// Closed-form upper bounds on the `γ = 2` gain for the KL and IS divergences.
///
/// The Euclidean kernel scales exactly, so its gain is 1.
pub fn gain_bound(
    kernel: &BregmanKernel,
    x: &Array1<f64>,
    z: &Array1<f64>,
    ztil: &Array1<f64>,
) -> Result<TripleGain> {
    for p in [x, z, ztil] {
        kernel.check_interior(p)?;
    }
    let denom = kernel.divergence(z, ztil)?;
    let numer: f64 = match kernel.kind() {
        KernelKind::SquaredEuclidean => {
            return Ok(TripleGain {
                x: x.clone(),
                z: z.clone(),
                ztil: ztil.clone(),
                gamma: 2.0,
                gain: 1.0,
            })
        }
        KernelKind::ShannonEntropy => (0..x.len())
            .map(|i| {
                let d = z[i] - ztil[i];
                d * d / x[i].min(ztil[i])
            })
            .sum(),
        KernelKind::BurgEntropy => (0..x.len())
            .map(|i| {
                let d = z[i] - ztil[i];
                let lo = x[i].min(z[i]).min(ztil[i]);
                d * d / (lo * lo)
            })
            .sum(),
    };
    if denom <= 0.0 {
        return Err(Error::DegenerateStep);
    }
    Ok(TripleGain {
        x: x.clone(),
        z: z.clone(),
        ztil: ztil.clone(),
        gamma: 2.0,
        gain: numer / denom,
    })
}

/// `(1−θ)x + θz`.
pub fn interpolate(x: &Array1<f64>, z: &Array1<f64>, theta: f64) -> Array1<f64> {
    x * (1.0 - theta) + z * theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn divergence_examples() {
        let s = BregmanKernel::shannon(2);
        assert_eq!(s.divergence(&array![1.0, 1.0], &array![1.0, 1.0]).unwrap(), 0.0);

        let s1 = BregmanKernel::shannon(1);
        let d = s1.divergence(&array![2.0], &array![1.0]).unwrap();
        assert!((d - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);

        let b1 = BregmanKernel::burg(1);
        let d = b1.divergence(&array![2.0], &array![1.0]).unwrap();
        assert!((d - (1.0 - 2f64.ln())).abs() < 1e-15);
        assert!((d - 0.306853).abs() < 1e-6);
    }

    #[test]
    fn shannon_admits_zero_first_argument() {
        let s = BregmanKernel::shannon(2);
        let d = s.divergence(&array![0.0, 1.0], &array![0.5, 1.0]).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        assert!(s.divergence(&array![1.0, 1.0], &array![0.0, 1.0]).is_err());
    }

    #[test]
    fn burg_rejects_boundary_points() {
        let b = BregmanKernel::burg(3);
        let err = b
            .divergence(&array![1.0, 0.0, 1.0], &array![1.0, 1.0, 1.0])
            .unwrap_err();
        assert!(matches!(err, Error::Domain { coord: 1, .. }));
        let err = b.grad(&array![1.0, 1.0, -2.0]).unwrap_err();
        assert!(matches!(err, Error::Domain { coord: 2, .. }));
    }

    #[test]
    fn gradient_examples() {
        let e = BregmanKernel::squared_euclidean(2);
        assert_eq!(e.grad(&array![3.0, -2.0]).unwrap(), array![3.0, -2.0]);
        assert_eq!(BregmanKernel::shannon(1).grad(&array![1.0]).unwrap(), array![1.0]);
        assert_eq!(BregmanKernel::burg(1).grad(&array![2.0]).unwrap(), array![-0.5]);
    }

    #[test]
    fn hessian_form_examples() {
        let e = BregmanKernel::squared_euclidean(2);
        assert_eq!(e.hessian_quadratic_form(&array![7.0, -1.0], &array![1.0, 1.0]).unwrap(), 2.0);
        let b = BregmanKernel::burg(1);
        assert_eq!(b.hessian_quadratic_form(&array![1.0], &array![1.0]).unwrap(), 1.0);
        let s = BregmanKernel::shannon(2);
        assert_eq!(s.hessian_quadratic_form(&array![2.0, 4.0], &array![2.0, 2.0]).unwrap(), 3.0);
    }

    #[test]
    fn euclidean_local_gain_is_one() {
        let k = BregmanKernel::squared_euclidean(3);
        let x = array![0.3, -1.0, 2.0];
        let z = array![1.0, 4.0, -0.5];
        let zn = array![-2.0, 0.5, 0.25];
        for theta in [1.0, 0.5, 0.1, 1e-3] {
            let xn = interpolate(&x, &zn, theta);
            let y = interpolate(&x, &z, theta);
            let g = local_ts_gain(&k, &xn, &y, &zn, &z, theta, 2.0).unwrap();
            assert!((g - 1.0).abs() < 1e-10, "theta={theta} gain={g}");
        }
    }

    #[test]
    fn local_gain_degenerate_step() {
        let k = BregmanKernel::burg(2);
        let z = array![1.0, 2.0];
        let err = local_ts_gain(&k, &z, &z, &z, &z, 0.5, 2.0).unwrap_err();
        assert_eq!(err, Error::DegenerateStep);
    }

    #[test]
    fn burg_local_gain_small_theta_limit() {
        let k = BregmanKernel::burg(1);
        let x = array![1.0];
        let z = array![2.0];
        let ztil = array![1.0];
        let theta = 1e-4;
        let xn = interpolate(&x, &z, theta);
        let y = interpolate(&x, &ztil, theta);
        let g = local_ts_gain(&k, &xn, &y, &z, &ztil, theta, 2.0).unwrap();
        let expected = 0.5 / (1.0 - 2f64.ln());
        assert!(((g - expected) / expected).abs() < 1e-2, "{g} vs {expected}");
        assert!((expected - 1.6294).abs() < 1e-4);
    }

    #[test]
    fn gain_bound_examples() {
        let s = BregmanKernel::shannon(1);
        let g = gain_bound(&s, &array![1.0], &array![2.0], &array![1.0]).unwrap();
        assert_eq!(g.gamma, 2.0);
        assert!((g.gain - 1.0 / (2.0 * 2f64.ln() - 1.0)).abs() < 1e-12);
        assert!((g.gain - 2.58870).abs() < 1e-5);

        let e = BregmanKernel::squared_euclidean(2);
        let g = gain_bound(&e, &array![1.0, 2.0], &array![0.0, 1.0], &array![5.0, 5.0]).unwrap();
        assert_eq!(g.gain, 1.0);

        let z = array![1.0, 3.0];
        assert_eq!(gain_bound(&s.clone(), &z, &z, &z).map(|_| ()), Err(Error::Dimension { expected: 1, got: 2 }));
        let s2 = BregmanKernel::shannon(2);
        assert_eq!(gain_bound(&s2, &z, &z, &z).unwrap_err(), Error::DegenerateStep);
    }

    fn positive_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.05f64..20.0, n)
    }

    proptest! {
        #[test]
        fn divergences_are_nonnegative(x in positive_vec(4), y in positive_vec(4)) {
            let (x, y) = (Array1::from(x), Array1::from(y));
            for kind in [KernelKind::SquaredEuclidean, KernelKind::ShannonEntropy, KernelKind::BurgEntropy] {
                let k = BregmanKernel::new(kind, 4);
                prop_assert!(k.divergence(&x, &y).unwrap() >= -1e-12);
                prop_assert!(k.divergence(&x, &x).unwrap().abs() <= 1e-12);
            }
        }

        #[test]
        fn divergence_matches_three_term_definition(x in positive_vec(3), y in positive_vec(3)) {
            let (x, y) = (Array1::from(x), Array1::from(y));
            for kind in [KernelKind::SquaredEuclidean, KernelKind::ShannonEntropy, KernelKind::BurgEntropy] {
                let k = BregmanKernel::new(kind, 3);
                let direct = k.value(&x).unwrap() - k.value(&y).unwrap()
                    - k.grad(&y).unwrap().dot(&(&x - &y));
                let d = k.divergence(&x, &y).unwrap();
                let scale = 1.0 + k.value(&x).unwrap().abs() + k.value(&y).unwrap().abs();
                prop_assert!((d - direct).abs() <= 1e-12 * scale * 10.0);
            }
        }
    }
}
