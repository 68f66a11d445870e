//! Brute-force minimization over a box or the probability simplex in two or
//! three dimensions.
//!
//! A coarse grid is scanned, then the window around the incumbent is rescanned
//! with a finer step until the step is at most `FINE_STEP`, followed by
//! `EXTRA_REFINEMENTS` more rounds.

const COARSE_POINTS: usize = 41;
const SHRINK: f64 = 8.0;
const FINE_STEP: f64 = 1e-4;
const EXTRA_REFINEMENTS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// `{z ≥ 0 : Σ z = 1}`, parametrized by the first `n − 1` coordinates
    Simplex,
    /// `[0, hi]ⁿ`
    Box { hi: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridMin {
    pub z: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Minimizes `f` (which may return `+∞` off its domain) over `domain` in `n`
/// dimensions.
pub fn grid_minimize(n: usize, domain: Domain, f: impl Fn(&[f64]) -> f64) -> GridMin {
    assert!((2..=3).contains(&n), "grid search is meant for 2 or 3 dimensions");
    let (free, extent) = match domain {
        Domain::Simplex => (n - 1, 1.0),
        Domain::Box { hi } => (n, hi),
    };
    let mut lo = vec![0.0; free];
    let mut hi = vec![extent; free];
    let mut step = extent / (COARSE_POINTS - 1) as f64;
    let mut best = GridMin {
        z: vec![f64::NAN; n],
        value: f64::INFINITY,
        evaluations: 0,
    };
    let mut extra = 0;
    loop {
        scan(n, domain, &lo, &hi, step, &f, &mut best);
        if step <= FINE_STEP {
            if extra == EXTRA_REFINEMENTS {
                break;
            }
            extra += 1;
        }
        if !best.value.is_finite() {
            break;
        }
        for i in 0..free {
            lo[i] = (best.z[i] - 2.0 * step).max(0.0);
            hi[i] = (best.z[i] + 2.0 * step).min(extent);
        }
        step /= SHRINK;
    }
    best
}

fn scan(n: usize, domain: Domain, lo: &[f64], hi: &[f64], step: f64, f: &impl Fn(&[f64]) -> f64, best: &mut GridMin) {
    let counts: Vec<usize> = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| ((b - a) / step).round() as usize + 1)
        .collect();
    let mut idx = vec![0usize; lo.len()];
    let mut z = vec![0.0; n];
    loop {
        for (i, &j) in idx.iter().enumerate() {
            z[i] = (lo[i] + j as f64 * step).min(hi[i]);
        }
        let feasible = match domain {
            Domain::Simplex => {
                let last = 1.0 - z[..n - 1].iter().sum::<f64>();
                z[n - 1] = last.max(0.0);
                last > -1e-15
            }
            Domain::Box { .. } => true,
        };
        if feasible {
            let v = f(&z);
            best.evaluations += 1;
            if v < best.value {
                best.value = v;
                best.z.copy_from_slice(&z);
            }
        }
        let mut d = 0;
        loop {
            if d == idx.len() {
                return;
            }
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}
