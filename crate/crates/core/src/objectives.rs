//! Smooth objectives `f` with their relative-smoothness constants, and the
//! simple regularizers `Ψ`.
//!
//! Each objective is paired with the kernel it is relatively smooth to:
//!
//! - D-optimal design `−log det(Σ xᵢ vᵢvᵢᵀ)`: Burg entropy, `L = 1`
//! - Poisson likelihood `D_KL(b, Ax)`: Burg entropy, `L = ‖b‖₁`
//! - relative-entropy regression `D_KL(Ax, b)`: Shannon entropy, `L = max_j ‖A_{:j}‖₁`
//! - least squares `½‖Ax − b‖²`: squared Euclidean, `L = λ_max(AᵀA)`

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::kernels::KernelKind;

#[derive(Clone, Debug, PartialEq)]
pub enum ObjectiveKind {
    /// Columns of `v` (m×n) are the design vectors.
    DOptimal { v: Array2<f64> },
    PoissonKl { a: Array2<f64>, b: Array1<f64> },
    RelEntropy { a: Array2<f64>, b: Array1<f64> },
    LeastSquares { a: Array2<f64>, b: Array1<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    kind: ObjectiveKind,
    rel_smooth_l: f64,
}

impl Objective {
    pub fn d_optimal(v: Array2<f64>) -> Result<Self> {
        let (m, n) = v.dim();
        if m == 0 || n < m + 1 {
            return Err(Error::Config(format!(
                "D-optimal design needs n >= m + 1 (m = {m}, n = {n})"
            )));
        }
        if v.iter().any(|e| !e.is_finite()) {
            return Err(Error::Config("design vectors must be finite".into()));
        }
        let center = Array1::from_elem(n, 1.0 / n as f64);
        cholesky(&moment_matrix(&v, &center)).map_err(|_| {
            Error::Config("design vectors do not span the ambient space".into())
        })?;
        Ok(Self {
            kind: ObjectiveKind::DOptimal { v },
            rel_smooth_l: 1.0,
        })
    }

    pub fn poisson_kl(a: Array2<f64>, b: Array1<f64>) -> Result<Self> {
        check_nonneg_system(&a, &b)?;
        let l = b.sum();
        Ok(Self {
            kind: ObjectiveKind::PoissonKl { a, b },
            rel_smooth_l: l,
        })
    }

    pub fn rel_entropy(a: Array2<f64>, b: Array1<f64>) -> Result<Self> {
        check_nonneg_system(&a, &b)?;
        let l = a
            .sum_axis(Axis(0))
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if !(l > 0.0) {
            return Err(Error::Config("matrix has no positive column".into()));
        }
        Ok(Self {
            kind: ObjectiveKind::RelEntropy { a, b },
            rel_smooth_l: l,
        })
    }

    pub fn least_squares(a: Array2<f64>, b: Array1<f64>) -> Result<Self> {
        check_dim(a.nrows(), b.len())?;
        let l = lambda_max_gram(&a);
        if !(l > 0.0) {
            return Err(Error::Config("least-squares matrix is zero".into()));
        }
        Ok(Self {
            kind: ObjectiveKind::LeastSquares { a, b },
            rel_smooth_l: l,
        })
    }

    /// Replaces the relative-smoothness constant (any larger value stays valid).
    pub fn with_rel_smooth_l(mut self, l: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Config(format!("relative smoothness constant must be positive, got {l}")));
        }
        self.rel_smooth_l = l;
        Ok(self)
    }

    pub fn kind(&self) -> &ObjectiveKind {
        &self.kind
    }

    pub fn rel_smooth_l(&self) -> f64 {
        self.rel_smooth_l
    }

    /// Number of decision variables `n`.
    pub fn dim(&self) -> usize {
        match &self.kind {
            ObjectiveKind::DOptimal { v } => v.ncols(),
            ObjectiveKind::PoissonKl { a, .. }
            | ObjectiveKind::RelEntropy { a, .. }
            | ObjectiveKind::LeastSquares { a, .. } => a.ncols(),
        }
    }

    /// The kernel against which `rel_smooth_l` is a valid constant.
    pub fn paired_kernel(&self) -> KernelKind {
        match &self.kind {
            ObjectiveKind::DOptimal { .. } | ObjectiveKind::PoissonKl { .. } => KernelKind::BurgEntropy,
            ObjectiveKind::RelEntropy { .. } => KernelKind::ShannonEntropy,
            ObjectiveKind::LeastSquares { .. } => KernelKind::SquaredEuclidean,
        }
    }

    pub fn value(&self, x: &Array1<f64>) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        match &self.kind {
            ObjectiveKind::DOptimal { v } => {
                check_nonneg(x)?;
                let chol = cholesky(&moment_matrix(v, x))?;
                Ok(-2.0 * chol.diag().iter().map(|d| d.ln()).sum::<f64>())
            }
            ObjectiveKind::PoissonKl { a, b } => {
                let ax = a.dot(x);
                let mut total = 0.0;
                for (i, (&u, &bi)) in ax.iter().zip(b.iter()).enumerate() {
                    if !(u > 0.0) {
                        return Err(Error::Domain {
                            coord: i,
                            value: u,
                            reason: "(Ax)_i must be positive where b_i > 0",
                        });
                    }
                    total += bi * (bi / u).ln() - bi + u;
                }
                Ok(total)
            }
            ObjectiveKind::RelEntropy { a, b } => {
                let ax = a.dot(x);
                let mut total = 0.0;
                for (i, (&u, &bi)) in ax.iter().zip(b.iter()).enumerate() {
                    if !(u >= 0.0) {
                        return Err(Error::Domain {
                            coord: i,
                            value: u,
                            reason: "(Ax)_i must be nonnegative",
                        });
                    }
                    total += if u == 0.0 { bi } else { u * (u / bi).ln() - u + bi };
                }
                Ok(total)
            }
            ObjectiveKind::LeastSquares { a, b } => {
                let r = a.dot(x) - b;
                Ok(0.5 * r.dot(&r))
            }
        }
    }

    /// `(f(x), ∇f(x))` from a single factorization or residual.
    pub fn value_grad(&self, x: &Array1<f64>) -> Result<(f64, Array1<f64>)> {
        match &self.kind {
            ObjectiveKind::DOptimal { v } => {
                check_dim(self.dim(), x.len())?;
                check_nonneg(x)?;
                let chol = cholesky(&moment_matrix(v, x))?;
                let f = -2.0 * chol.diag().iter().map(|d| d.ln()).sum::<f64>();
                let w = forward_substitute(&chol, v);
                Ok((f, -(&w * &w).sum_axis(Axis(0))))
            }
            _ => Ok((self.value(x)?, self.grad(x)?)),
        }
    }

    pub fn grad(&self, x: &Array1<f64>) -> Result<Array1<f64>> {
        check_dim(self.dim(), x.len())?;
        match &self.kind {
            ObjectiveKind::DOptimal { v } => {
                check_nonneg(x)?;
                let chol = cholesky(&moment_matrix(v, x))?;
                let w = forward_substitute(&chol, v);
                Ok(-(&w * &w).sum_axis(Axis(0)))
            }
            ObjectiveKind::PoissonKl { a, b } => {
                let ax = a.dot(x);
                let mut r = Array1::zeros(ax.len());
                for (i, (&u, &bi)) in ax.iter().zip(b.iter()).enumerate() {
                    if !(u > 0.0) {
                        return Err(Error::Domain {
                            coord: i,
                            value: u,
                            reason: "(Ax)_i must be positive where b_i > 0",
                        });
                    }
                    r[i] = 1.0 - bi / u;
                }
                Ok(a.t().dot(&r))
            }
            ObjectiveKind::RelEntropy { a, b } => {
                let ax = a.dot(x);
                let mut r = Array1::zeros(ax.len());
                for (i, (&u, &bi)) in ax.iter().zip(b.iter()).enumerate() {
                    if !(u > 0.0) {
                        return Err(Error::Domain {
                            coord: i,
                            value: u,
                            reason: "(Ax)_i must be positive for the gradient",
                        });
                    }
                    r[i] = (u / bi).ln();
                }
                Ok(a.t().dot(&r))
            }
            ObjectiveKind::LeastSquares { a, b } => Ok(a.t().dot(&(a.dot(x) - b))),
        }
    }
}

fn check_nonneg(x: &Array1<f64>) -> Result<()> {
    match x.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
        Some(coord) => Err(Error::Domain {
            coord,
            value: x[coord],
            reason: "design weights must be nonnegative",
        }),
        None => Ok(()),
    }
}

fn check_nonneg_system(a: &Array2<f64>, b: &Array1<f64>) -> Result<()> {
    check_dim(a.nrows(), b.len())?;
    if a.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::Config("matrix entries must be nonnegative and finite".into()));
    }
    if let Some(i) = b.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Config(format!("b[{i}] = {} must be positive", b[i])));
    }
    if let Some(i) = a.rows().into_iter().position(|row| row.iter().all(|v| *v == 0.0)) {
        return Err(Error::Config(format!("row {i} of the matrix is zero")));
    }
    Ok(())
}

/// `H(x) = Σⱼ xⱼ vⱼvⱼᵀ = V diag(x) Vᵀ`.
pub fn moment_matrix(v: &Array2<f64>, x: &Array1<f64>) -> Array2<f64> {
    let weighted = v * &x.view().insert_axis(Axis(0));
    weighted.dot(&v.t())
}

const PIVOT_RTOL: f64 = 1e-13;

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(h: &Array2<f64>) -> Result<Array2<f64>> {
    let m = h.nrows();
    let mut l = Array2::<f64>::zeros((m, m));
    for j in 0..m {
        let mut d = h[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        // a pivot lost to cancellation means the matrix is numerically singular
        if !(d > PIVOT_RTOL * h[[j, j]]) || !d.is_finite() {
            return Err(Error::SingularMatrix { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[[j, j]] = d;
        for i in (j + 1)..m {
            let mut s = h[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L W = B` for lower-triangular `L`, all columns at once.
fn forward_substitute(l: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let m = l.nrows();
    let mut w = b.clone();
    for i in 0..m {
        for k in 0..i {
            let lik = l[[i, k]];
            if lik != 0.0 {
                let (done, mut rest) = w.view_mut().split_at(Axis(0), i);
                rest.row_mut(0).scaled_add(-lik, &done.row(k));
            }
        }
        let inv = 1.0 / l[[i, i]];
        w.row_mut(i).mapv_inplace(|v| v * inv);
    }
    w
}

/// Largest eigenvalue of `AᵀA` by power iteration, nudged upward by a relative
/// 1e-9 so the returned value is a valid Lipschitz constant.
pub fn lambda_max_gram(a: &Array2<f64>) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = Array1::from_iter((0..n).map(|i| 1.0 + (i as f64 * 0.618_033_988_749).fract()));
    v /= v.dot(&v).sqrt();
    let mut lambda = 0.0;
    for _ in 0..100_000 {
        let w = a.t().dot(&a.dot(&v));
        let next = v.dot(&w);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
        if (next - lambda).abs() <= 1e-15 * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda * (1.0 + 1e-9)
}

/// The simple, prox-friendly part `Ψ` of the composite objective.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "lambda", rename_all = "snake_case")]
pub enum Regularizer {
    Zero,
    /// `λ‖x‖₁`
    L1(f64),
    /// `(λ/2)‖x‖²`
    SquaredL2(f64),
}

impl Regularizer {
    pub fn value(&self, x: &Array1<f64>) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            Regularizer::L1(lam) => lam * x.iter().map(|v| v.abs()).sum::<f64>(),
            Regularizer::SquaredL2(lam) => 0.5 * lam * x.dot(x),
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            Regularizer::L1(lam) | Regularizer::SquaredL2(lam) => lam,
        }
    }

    /// `s·Ψ`.
    pub fn scaled(&self, s: f64) -> Regularizer {
        match *self {
            Regularizer::Zero => Regularizer::Zero,
            Regularizer::L1(lam) => Regularizer::L1(lam * s),
            Regularizer::SquaredL2(lam) => Regularizer::SquaredL2(lam * s),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lam = self.lambda();
        if lam >= 0.0 && lam.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!("regularization weight must be nonnegative, got {lam}")))
        }
    }
}

impl fmt::Display for Regularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularizer::Zero => write!(f, "zero"),
            Regularizer::L1(lam) => write!(f, "l1:{lam}"),
            Regularizer::SquaredL2(lam) => write!(f, "l2:{lam}"),
        }
    }
}

impl FromStr for Regularizer {
    type Err = Error;

    /// Accepts `zero`, `l1:<λ>` and `l2:<λ>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "zero" || s == "none" {
            return Ok(Regularizer::Zero);
        }
        let (kind, lam) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("cannot parse regularizer `{s}`")))?;
        let lam: f64 = lam
            .parse()
            .map_err(|_| Error::Config(format!("bad regularization weight `{lam}`")))?;
        let reg = match kind {
            "l1" => Regularizer::L1(lam),
            "l2" | "sql2" => Regularizer::SquaredL2(lam),
            _ => return Err(Error::Config(format!("unknown regularizer `{kind}`"))),
        };
        reg.validate()?;
        Ok(reg)
    }
}
