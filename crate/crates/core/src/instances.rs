//! Problem instances: seeded generators, a LibSVM reader and a JSON file format.
//!
//! All generators draw from `ChaCha8Rng::seed_from_u64(seed)`. Matrices are
//! filled in row-major order; for the orthant families `A` is drawn before `b`.
//!
//! Instance file layout (JSON):
//!
//! ```text
//! {
//!   "format": "bregman-instance", "version": 1,
//!   "family": "dopt" | "dopt_libsvm" | "poisson" | "relentropy",
//!   "m": .., "n": .., "seed": u64 | null,
//!   "reg": {"kind": "zero" | "l1" | "squared_l2", "lambda": ..},
//!   "l": ..,
//!   "matrix": {"rows": .., "cols": .., "data": [row-major]},
//!   "b": [..] | null,
//!   "x0": [..]
//! }
//! ```
//!
//! Floats are written with shortest round-trip formatting, so a file read
//! back reproduces every entry bit for bit.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{Objective, ObjectiveKind, Regularizer};
use crate::solvers::CompositeProblem;
use crate::subproblems::FeasibleSet;

const FORMAT_TAG: &str = "bregman-instance";
const FORMAT_VERSION: u32 = 1;
const SANDWICH_PAIRS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "dopt")]
    DOptimal,
    #[serde(rename = "dopt_libsvm")]
    DOptimalLibsvm,
    #[serde(rename = "poisson")]
    Poisson,
    #[serde(rename = "relentropy")]
    RelEntropy,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::DOptimal => "dopt",
            Family::DOptimalLibsvm => "dopt_libsvm",
            Family::Poisson => "poisson",
            Family::RelEntropy => "relentropy",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "dopt" | "doptimal" | "d_optimal" => Ok(Family::DOptimal),
            "dopt_libsvm" | "libsvm" => Ok(Family::DOptimalLibsvm),
            "poisson" => Ok(Family::Poisson),
            "relentropy" | "rel_entropy" => Ok(Family::RelEntropy),
            _ => Err(Error::Config(format!("unknown instance family `{s}`"))),
        }
    }
}

/// A problem together with its canonical starting point.
#[derive(Clone, Debug)]
pub struct Instance {
    pub family: Family,
    pub seed: Option<u64>,
    pub problem: CompositeProblem,
    pub x0: Array1<f64>,
}

impl Instance {
    fn data_matrix(&self) -> &Array2<f64> {
        match self.problem.objective.kind() {
            ObjectiveKind::DOptimal { v } => v,
            ObjectiveKind::PoissonKl { a, .. }
            | ObjectiveKind::RelEntropy { a, .. }
            | ObjectiveKind::LeastSquares { a, .. } => a,
        }
    }

    fn rhs(&self) -> Option<&Array1<f64>> {
        match self.problem.objective.kind() {
            ObjectiveKind::DOptimal { .. } => None,
            ObjectiveKind::PoissonKl { b, .. }
            | ObjectiveKind::RelEntropy { b, .. }
            | ObjectiveKind::LeastSquares { b, .. } => Some(b),
        }
    }

    /// Rows of the data matrix (the design dimension for D-optimal).
    pub fn m(&self) -> usize {
        self.data_matrix().nrows()
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.data_matrix().ncols()
    }

    pub fn to_json(&self) -> Result<String> {
        let mat = self.data_matrix();
        let file = InstanceFile {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            family: self.family,
            m: self.m(),
            n: self.n(),
            seed: self.seed,
            reg: self.problem.reg,
            l: self.problem.l(),
            matrix: MatrixPayload {
                rows: mat.nrows(),
                cols: mat.ncols(),
                data: mat.iter().copied().collect(),
            },
            b: self.rhs().map(|b| b.to_vec()),
            x0: self.x0.to_vec(),
        };
        serde_json::to_string(&file).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        file.into_instance()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixPayload {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    format: String,
    version: u32,
    family: Family,
    m: usize,
    n: usize,
    seed: Option<u64>,
    reg: Regularizer,
    l: f64,
    matrix: MatrixPayload,
    b: Option<Vec<f64>>,
    x0: Vec<f64>,
}

impl InstanceFile {
    fn into_instance(self) -> Result<Instance> {
        if self.format != FORMAT_TAG || self.version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported instance format {} v{}",
                self.format, self.version
            )));
        }
        let MatrixPayload { rows, cols, data } = self.matrix;
        if (rows, cols) != (self.m, self.n) {
            return Err(Error::Config(format!(
                "matrix is {rows}x{cols} but header says {}x{}",
                self.m, self.n
            )));
        }
        let mat = Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Config(e.to_string()))?;
        let rhs = || {
            self.b
                .clone()
                .map(Array1::from)
                .ok_or_else(|| Error::Config(format!("{} instance is missing `b`", self.family)))
        };
        let (objective, set) = match self.family {
            Family::DOptimal | Family::DOptimalLibsvm => (Objective::d_optimal(mat)?, FeasibleSet::Simplex),
            Family::Poisson => (Objective::poisson_kl(mat, rhs()?)?, FeasibleSet::NonnegOrthant),
            Family::RelEntropy => (Objective::rel_entropy(mat, rhs()?)?, FeasibleSet::NonnegOrthant),
        };
        let objective = objective.with_rel_smooth_l(self.l)?;
        let problem = CompositeProblem::new(objective, self.reg, set)?;
        let x0 = Array1::from(self.x0);
        problem.check_start(&x0)?;
        Ok(Instance {
            family: self.family,
            seed: self.seed,
            problem,
            x0,
        })
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.sample::<f64, _>(Open01))
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Config(format!("instance dimensions must be positive, got {m}x{n}")));
    }
    Ok(())
}

/// D-optimal design over `n` Gaussian design vectors in `R^m`.
pub fn gen_doptimal(m: usize, n: usize, seed: u64) -> Result<Instance> {
    check_dims(m, n)?;
    let mut rng = rng(seed);
    let v = Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(StandardNormal));
    let objective = Objective::d_optimal(v)?;
    finish(Family::DOptimal, Some(seed), objective, Regularizer::Zero, FeasibleSet::Simplex, seed)
}

/// Poisson regularization: a small squared-L2 penalty when `m < n`, none otherwise.
pub fn default_poisson_reg(m: usize, n: usize) -> Regularizer {
    if m < n {
        Regularizer::SquaredL2(1e-3)
    } else {
        Regularizer::Zero
    }
}

pub fn default_relentropy_reg() -> Regularizer {
    Regularizer::L1(1e-3)
}

/// Poisson linear inverse problem with uniform `A` and `b`, `L = ‖b‖₁`.
pub fn gen_poisson(m: usize, n: usize, seed: u64, reg: Regularizer) -> Result<Instance> {
    check_dims(m, n)?;
    let mut rng = rng(seed);
    let a = uniform_matrix(&mut rng, m, n);
    let b = Array1::from_shape_fn(m, |_| rng.sample::<f64, _>(Open01));
    let objective = Objective::poisson_kl(a, b)?;
    finish(Family::Poisson, Some(seed), objective, reg, FeasibleSet::NonnegOrthant, seed)
}

/// Relative-entropy regression with uniform `A` and `b`, `L = max_j ‖A_{:j}‖₁`.
pub fn gen_relentropy(m: usize, n: usize, seed: u64, reg: Regularizer) -> Result<Instance> {
    check_dims(m, n)?;
    let mut rng = rng(seed);
    let a = uniform_matrix(&mut rng, m, n);
    let b = Array1::from_shape_fn(m, |_| rng.sample::<f64, _>(Open01));
    let objective = Objective::rel_entropy(a, b)?;
    finish(Family::RelEntropy, Some(seed), objective, reg, FeasibleSet::NonnegOrthant, seed)
}

/// D-optimal instance from a feature matrix (one sample per column).
pub fn doptimal_from_features(features: Array2<f64>, unit_norm: bool) -> Result<Instance> {
    let mut v = features;
    if unit_norm {
        for mut col in v.columns_mut() {
            let nrm = col.dot(&col).sqrt();
            if nrm > 0.0 {
                col /= nrm;
            }
        }
    }
    let objective = Objective::d_optimal(v)?;
    finish(Family::DOptimalLibsvm, None, objective, Regularizer::Zero, FeasibleSet::Simplex, 0)
}

fn finish(family: Family, seed: Option<u64>, objective: Objective, reg: Regularizer, set: FeasibleSet, check_seed: u64) -> Result<Instance> {
    let n = objective.dim();
    let problem = CompositeProblem::new(objective, reg, set)?;
    let x0 = match set {
        FeasibleSet::Simplex => Array1::from_elem(n, 1.0 / n as f64),
        FeasibleSet::NonnegOrthant => Array1::ones(n),
    };
    problem.check_start(&x0)?;
    check_sandwich(&problem, &x0, SANDWICH_PAIRS, check_seed)?;
    Ok(Instance {
        family,
        seed,
        problem,
        x0,
    })
}

/// Random feasible point near `x0`: coordinates scaled by factors in
/// `(0.1, 3)`, renormalized on the simplex.
pub fn random_feasible_point(rng: &mut impl Rng, x0: &Array1<f64>, set: FeasibleSet) -> Array1<f64> {
    let mut x = x0.mapv(|v| v * rng.random_range(0.1..3.0));
    if set == FeasibleSet::Simplex {
        let s = x.sum();
        x /= s;
    }
    x
}

/// Checks `0 ≤ f(x) − f(y) − <∇f(y), x − y> ≤ L D_h(x, y)` on random pairs.
pub fn check_sandwich(problem: &CompositeProblem, x0: &Array1<f64>, pairs: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a_5a5a);
    let f = &problem.objective;
    let l = problem.l();
    for _ in 0..pairs {
        let x = random_feasible_point(&mut rng, x0, problem.set);
        let y = random_feasible_point(&mut rng, x0, problem.set);
        let (fx, fy) = (f.value(&x)?, f.value(&y)?);
        let gap = fx - fy - f.grad(&y)?.dot(&(&x - &y));
        let d = problem.kernel.divergence(&x, &y)?;
        let tol = 1e-9 * (1.0 + fx.abs() + fy.abs());
        if gap < -tol || gap > l * d + tol {
            return Err(Error::Config(format!(
                "relative smoothness check failed: f-gap {gap:e}, L*D = {:e}",
                l * d
            )));
        }
    }
    Ok(())
}

/// Parsed LibSVM data: one sample per column of `features`.
#[derive(Clone, Debug, PartialEq)]
pub struct LibsvmData {
    pub features: Array2<f64>,
    pub labels: Array1<f64>,
}

pub fn load_libsvm(path: &Path) -> Result<LibsvmData> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_libsvm(&text)
}

pub fn parse_libsvm(text: &str) -> Result<LibsvmData> {
    let mut labels = Vec::new();
    let mut samples: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dim = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let perr = |msg: String| Error::Parse { line, msg };
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok
            .parse()
            .map_err(|_| perr(format!("invalid label `{label_tok}`")))?;
        let mut entries = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| perr(format!("expected `index:value`, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| perr(format!("invalid feature index `{idx}`")))?;
            if idx == 0 {
                return Err(perr("feature indices are 1-based".into()));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| perr(format!("invalid feature value `{val}`")))?;
            if !val.is_finite() {
                return Err(perr(format!("non-finite feature value `{val}`")));
            }
            dim = dim.max(idx);
            entries.push((idx - 1, val));
        }
        labels.push(label);
        samples.push(entries);
    }
    if samples.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no samples found".into(),
        });
    }
    let mut features = Array2::zeros((dim, samples.len()));
    for (j, entries) in samples.iter().enumerate() {
        for &(i, v) in entries {
            features[[i, j]] = v;
        }
    }
    Ok(LibsvmData {
        features,
        labels: Array1::from(labels),
    })
}
