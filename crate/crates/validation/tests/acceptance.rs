//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::fs;
use std::panic;
use std::path::Path;
use std::time::Instant;

use bregman_core::kernels::{gain_bound, interpolate};
use bregman_core::stepsize::{theta_explicit, theta_next_gain_explicit};
use bregman_core::subproblems::{prox_step, ProxQuery};
use bregman_core::{
    gen_doptimal, gen_poisson, gen_relentropy, run, Algorithm, BregmanKernel, CompositeProblem, FeasibleSet, Instance,
    KernelKind, Objective, Regularizer, SolverConfig, SolverTrace, ThetaMode, ThetaSequence,
};
use bregman_harness::compare::{bound_scale, reference_optimum, run_all, summarize, CompareOptions, Outcome};
use bregman_harness::{certificates, BoundKind};
use bregman_validation::{divergence, grid_minimize, log_uniform, prox_objective, regularizer, Domain};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Check = fn() -> Result<Verdict, String>;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Result<Verdict, String> {
    Ok(Verdict { passed, detail })
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

const KINDS: [KernelKind; 3] = [KernelKind::SquaredEuclidean, KernelKind::ShannonEntropy, KernelKind::BurgEntropy];
const THETA_GRID: [f64; 7] = [0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 1.0];

fn arr(v: Vec<f64>) -> Array1<f64> {
    Array1::from_vec(v)
}

fn triple(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> (Array1<f64>, Array1<f64>, Array1<f64>) {
    (arr(log_uniform(rng, n, lo, hi)), arr(log_uniform(rng, n, lo, hi)), arr(log_uniform(rng, n, lo, hi)))
}

/// `D_h((1−θ)x+θz, (1−θ)x+θz̃)` and `D_h(z, z̃)`.
fn scaled_pair(k: &BregmanKernel, x: &Array1<f64>, z: &Array1<f64>, zt: &Array1<f64>, theta: f64) -> Result<(f64, f64), String> {
    let num = k.divergence(&interpolate(x, z, theta), &interpolate(x, zt, theta)).map_err(e)?;
    Ok((num, k.divergence(z, zt).map_err(e)?))
}

fn ac1_kernels() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 5;
    let (mut negative, mut worst_identity, mut worst_oracle, mut worst_fd, mut worst_limit) = (0, 0f64, 0f64, 0f64, 0f64);
    for kind in KINDS {
        let k = BregmanKernel::new(kind, n);
        for _ in 0..100 {
            let (x, z, zt) = triple(&mut rng, n, 0.25, 4.0);
            let d = k.divergence(&z, &zt).map_err(e)?;
            if d < 0.0 {
                negative += 1;
            }
            let reference = divergence(kind, z.as_slice().unwrap(), zt.as_slice().unwrap());
            worst_oracle = worst_oracle.max((d - reference).abs() / reference);
            worst_identity = worst_identity.max(k.divergence(&x, &x).map_err(e)?.abs());

            let g = k.grad(&x).map_err(e)?;
            let mut fd = Array1::zeros(n);
            for i in 0..n {
                let h = 1e-5 * x[i];
                let (mut up, mut down) = (x.clone(), x.clone());
                up[i] += h;
                down[i] -= h;
                fd[i] = (k.value(&up).map_err(e)? - k.value(&down).map_err(e)?) / (up[i] - down[i]);
            }
            let err = (&fd - &g).mapv(|v| v * v).sum().sqrt() / g.mapv(|v| v * v).sum().sqrt();
            worst_fd = worst_fd.max(err);

            let theta = 1e-4;
            let (num, _) = scaled_pair(&k, &x, &z, &zt, theta)?;
            let limit = 0.5 * k.hessian_quadratic_form(&x, &(&z - &zt)).map_err(e)?;
            worst_limit = worst_limit.max((num / (theta * theta) - limit).abs() / limit);
        }
    }
    let passed = negative == 0 && worst_identity == 0.0 && worst_oracle < 1e-12 && worst_fd <= 1e-6 && worst_limit < 1e-2;
    verdict(
        passed,
        format!(
            "300 triples: {negative} negative divergences, max |D(x,x)| {worst_identity:.1e}, max rel diff to oracle {worst_oracle:.1e}, \
             max grad FD rel err {worst_fd:.1e} (tol 1e-6), max limit rel err at theta=1e-4 {worst_limit:.1e} (tol 1e-2)"
        ),
    )
}

fn ac2_scaling_exponents() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 5;
    let euclid = BregmanKernel::squared_euclidean(n);
    let mut worst_ratio = 0f64;
    for _ in 0..1000 {
        let mut draw = || Array1::from_iter((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let (x, z, zt) = (draw(), draw(), draw());
        let theta = rng.random_range(0.01..=1.0);
        let (num, den) = scaled_pair(&euclid, &x, &z, &zt, theta)?;
        worst_ratio = worst_ratio.max((num / (theta * theta * den) - 1.0).abs());
    }

    let kl = BregmanKernel::shannon(n);
    let mut kl_violations = 0;
    let mut kl_worst = 0f64;
    for _ in 0..100 {
        let (x, z, zt) = triple(&mut rng, n, 0.01, 10.0);
        for theta in THETA_GRID {
            let (num, den) = scaled_pair(&kl, &x, &z, &zt, theta)?;
            let ratio = num / (theta * den);
            kl_worst = kl_worst.max(ratio);
            if ratio > 1.0 + 1e-12 {
                kl_violations += 1;
            }
        }
    }

    let burg = BregmanKernel::burg(1);
    let (x, z, zt) = (arr(vec![0.003]), arr(vec![250.0]), arr(vec![330.0]));
    let theta: f64 = 1e-4;
    let (num, den) = scaled_pair(&burg, &x, &z, &zt, theta)?;
    let is_ratio = num / (theta.powf(0.6) * den);

    let passed = worst_ratio <= 1e-12 && kl_violations == 0 && is_ratio > 1.0;
    verdict(
        passed,
        format!(
            "euclidean max |ratio-1| {worst_ratio:.1e} over 1000 tuples; KL gamma=1: {kl_violations} violations in 700 checks \
             (max ratio {kl_worst:.6}); IS fixture ratio at gamma=0.6 is {is_ratio:.1}"
        ),
    )
}

fn ac3_gain_bounds() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let n = 5;
    let mut report = Vec::new();
    let mut violations = 0;
    for kind in [KernelKind::ShannonEntropy, KernelKind::BurgEntropy] {
        let k = BregmanKernel::new(kind, n);
        let mut worst = 0f64;
        for _ in 0..100 {
            let (x, z, zt) = triple(&mut rng, n, 0.01, 10.0);
            let gain = gain_bound(&k, &x, &z, &zt).map_err(e)?.gain;
            for theta in THETA_GRID {
                let (num, den) = scaled_pair(&k, &x, &z, &zt, theta)?;
                let ratio = num / (gain * theta * theta * den);
                worst = worst.max(ratio);
                if ratio > 1.0 + 1e-12 {
                    violations += 1;
                }
            }
        }
        report.push(format!("{kind:?} max D/(G theta^2 D) {worst:.4}"));
    }
    verdict(violations == 0, format!("{violations} violations in 1400 checks; {}", report.join(", ")))
}

fn ac4_theta_machinery() -> Result<Verdict, String> {
    let (mut excess, mut dominance, mut identity, mut explicit) = (0f64, 0f64, 0f64, 0f64);
    for gamma in [1.0, 1.5, 2.0] {
        let mut seq = ThetaSequence::new(ThetaMode::EqualityRoot, gamma);
        let mut gain_theta = 1.0;
        let mut vartheta: f64 = 1.0;
        for k in 0..10_000 {
            let (t, t1) = (theta_explicit(gamma, k), theta_explicit(gamma, k + 1));
            let rhs = 1.0 / t.powf(gamma);
            excess = excess.max(((1.0 - t1) / t1.powf(gamma) - rhs) / rhs);

            dominance = dominance.max(seq.theta() / t - 1.0);
            if gamma > 1.0 && k <= 1000 {
                let target = seq.theta().powf(-gamma);
                identity = identity.max((vartheta - target).abs() / target);
            }
            explicit = explicit.max((gain_theta - t).abs());

            let next = seq.advance(1.0).map_err(e)?;
            vartheta += next.powf(1.0 - gamma);
            gain_theta = theta_next_gain_explicit(gamma, gain_theta, 1.0);
        }
    }
    let passed = excess <= 1e-12 && dominance <= 1e-12 && identity <= 1e-10 && explicit <= 1e-12;
    verdict(
        passed,
        format!(
            "k<=1e4: max normalized explicit-sequence excess {excess:.1e} (slack 1e-12), max root/explicit excess {dominance:.1e}; \
             k<=1e3: max vartheta identity rel err {identity:.1e} (tol 1e-10); gain-explicit at alpha=1 max |diff| {explicit:.1e} (tol 1e-12)"
        ),
    )
}

fn ac5_prox_oracle() -> Result<Verdict, String> {
    let reg_sets = |kind: KernelKind, set: FeasibleSet| -> Vec<fn(f64) -> Regularizer> {
        let zero: fn(f64) -> Regularizer = |_| Regularizer::Zero;
        let l1: fn(f64) -> Regularizer = Regularizer::L1;
        let l2: fn(f64) -> Regularizer = Regularizer::SquaredL2;
        match (kind, set) {
            (KernelKind::SquaredEuclidean, _) | (KernelKind::BurgEntropy, FeasibleSet::NonnegOrthant) => vec![zero, l1, l2],
            (KernelKind::ShannonEntropy, FeasibleSet::NonnegOrthant) => vec![zero, l1],
            (KernelKind::BurgEntropy, FeasibleSet::Simplex) => vec![zero],
            (KernelKind::ShannonEntropy, FeasibleSet::Simplex) => vec![],
        }
    };
    let mut pairings = Vec::new();
    for kind in KINDS {
        for set in [FeasibleSet::Simplex, FeasibleSet::NonnegOrthant] {
            for reg in reg_sets(kind, set) {
                pairings.push((kind, set, reg));
            }
        }
    }
    let results: Vec<Result<(f64, f64, f64), String>> = std::thread::scope(|s| {
        let handles: Vec<_> = pairings
            .iter()
            .enumerate()
            .map(|(p, &(kind, set, reg))| s.spawn(move || prox_pairing(kind, set, reg, 500 + p as u64)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err("panicked".into()))).collect()
    });
    let (mut coord, mut objective, mut three_point) = (0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for r in results {
        let (c, o, t) = r?;
        coord = coord.max(c);
        objective = objective.max(o);
        three_point = three_point.max(t);
    }
    let passed = coord <= 1e-3 && objective <= 1e-8 && three_point <= 1e-9;
    verdict(
        passed,
        format!(
            "{} pairings x 100 queries at n=2,3: max coordinate diff {coord:.1e} (tol 1e-3), max objective excess over grid {objective:.1e} \
             (tol 1e-8), max three-point deficit {three_point:.1e} (tol 1e-9)",
            pairings.len()
        ),
    )
}

/// Worst coordinate gap, objective excess and three-point deficit for one pairing.
fn prox_pairing(kind: KernelKind, set: FeasibleSet, make_reg: fn(f64) -> Regularizer, seed: u64) -> Result<(f64, f64, f64), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut coord, mut objective, mut three_point) = (0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut done = 0;
    while done < 100 {
        let n = 2 + done % 2;
        let kernel = BregmanKernel::new(kind, n);
        let g = arr((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
        let mut r = log_uniform(&mut rng, n, 0.2, 2.0);
        if set == FeasibleSet::Simplex {
            let s: f64 = r.iter().sum();
            r.iter_mut().for_each(|v| *v /= s);
        }
        let r = arr(r);
        let c = rng.random_range(0.5..2.0);
        let reg = make_reg(rng.random_range(0.05..0.5));
        let q = ProxQuery {
            g: &g,
            ref_point: &r,
            coeff: c,
            reg,
            set,
        };
        let z = match prox_step(&kernel, &q) {
            Ok(z) if z.iter().all(|v| *v <= 10.0) => z,
            Ok(_) | Err(bregman_core::Error::Unbounded { .. }) => continue,
            Err(err) => return Err(err.to_string()),
        };
        done += 1;
        let (gs, rs, zs) = (g.as_slice().unwrap(), r.as_slice().unwrap(), z.as_slice().unwrap());
        let domain = match set {
            FeasibleSet::Simplex => Domain::Simplex,
            FeasibleSet::NonnegOrthant => Domain::Box {
                hi: 1.5 * z.iter().chain(r.iter()).fold(0f64, |m, v| m.max(*v)) + 1.0,
            },
        };
        let best = grid_minimize(n, domain, |w| prox_objective(kind, gs, rs, c, reg, w));
        for (a, b) in zs.iter().zip(&best.z) {
            coord = coord.max((a - b).abs());
        }
        let value = prox_objective(kind, gs, rs, c, reg, zs);
        objective = objective.max(value - best.value);

        let phi = |w: &[f64]| (gs.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + regularizer(reg, w)) / c;
        for _ in 0..20 {
            let mut x = log_uniform(&mut rng, n, 0.05, 5.0);
            if set == FeasibleSet::Simplex {
                let s: f64 = x.iter().sum();
                x.iter_mut().for_each(|v| *v /= s);
            }
            let lhs = phi(&x) + divergence(kind, &x, rs);
            let rhs = phi(zs) + divergence(kind, zs, rs) + divergence(kind, &x, zs);
            three_point = three_point.max(rhs - lhs);
        }
    }
    Ok((coord, objective, three_point))
}

fn experiment_instances() -> Result<Vec<Instance>, String> {
    Ok(vec![
        gen_doptimal(80, 200, 1).map_err(e)?,
        gen_poisson(200, 100, 1, bregman_core::instances::default_poisson_reg(200, 100)).map_err(e)?,
        gen_relentropy(100, 1000, 1, bregman_core::instances::default_relentropy_reg()).map_err(e)?,
    ])
}

fn ac6_bpg_monotone() -> Result<Verdict, String> {
    let mut report = Vec::new();
    let mut passed = true;
    for inst in experiment_instances()? {
        let trace = run(&inst.problem, &SolverConfig::new(Algorithm::Bpg, 1000), &inst.x0).map_err(e)?;
        let f = trace.f_values();
        let worst = f.windows(2).map(|w| (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE)).fold(f64::NEG_INFINITY, f64::max);
        passed &= worst <= 1e-10;
        report.push(format!("{} {}x{} max rel increase {worst:.1e}", inst.family, inst.m(), inst.n()));
    }
    verdict(passed, format!("1000 BPG iterations: {}", report.join("; ")))
}

fn ac7_euclidean_bound() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (m, n) = (80, 50);
    let a = Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(StandardNormal));
    let x_true = Array1::from_iter((0..n).map(|_| rng.random_range(0.5..1.5)));
    let b = a.dot(&x_true);
    let problem = CompositeProblem::new(Objective::least_squares(a, b).map_err(e)?, Regularizer::Zero, FeasibleSet::NonnegOrthant)
        .map_err(e)?;
    let x0 = Array1::zeros(n);
    let trace = run(&problem, &SolverConfig::new(Algorithm::Abpg, 1001), &x0).map_err(e)?;
    let scale = problem.l() * 0.5 * (&x_true - &x0).mapv(|v| v * v).sum();
    let f = trace.f_values();
    let mut worst = f64::NEG_INFINITY;
    for k in 0..=1000 {
        let bound = (2.0 / (k as f64 + 2.0)).powi(2) * scale;
        worst = worst.max(f[k + 1] - bound);
    }
    verdict(
        worst <= 1e-8,
        format!("ABPG least squares 80x50, k<=1000: max (gap - bound) {worst:.2e} (slack 1e-8), final gap {:.1e}", f[1001]),
    )
}

fn ac8_gain_certificate() -> Result<Verdict, String> {
    let inst = gen_doptimal(40, 100, 1).map_err(e)?;
    let cfg = SolverConfig::new(Algorithm::AbpgG, 2001);
    let trace = run(&inst.problem, &cfg, &inst.x0).map_err(e)?;
    let outcomes = [Outcome {
        algorithm: Algorithm::AbpgG,
        result: Ok(trace.clone()),
    }];
    let (f_star, x_hat) = reference_optimum(&inst, 20_000, &outcomes).map_err(e)?;
    let scale = bound_scale(&inst, &x_hat).map_err(e)?;
    let certs =
        certificates(&trace.f_values(), &trace.gains(), BoundKind::GainAdapted { gamma: cfg.gamma }, f_star, scale, 1).map_err(e)?;
    let certs = &certs[..=2000];
    let margin = certs.iter().map(|c| c.theory_bound - c.observed_gap).fold(f64::INFINITY, f64::min);
    let gbar_max = certs.iter().map(|c| c.geo_mean_gain).fold(0f64, f64::max);
    verdict(
        certs.iter().all(|c| c.holds(0.0)) && gbar_max < 10.0,
        format!("ABPG-g D-optimal 40x100, k<=2000: min (bound - gap) {margin:.2e}, max Gbar {gbar_max:.3} (limit 10)"),
    )
}

fn ac9_empirical_rates() -> Result<Verdict, String> {
    let inst = gen_doptimal(80, 200, 1).map_err(e)?;
    let opts = CompareOptions {
        algorithms: vec![Algorithm::Bpg, Algorithm::Abpg, Algorithm::AbpgG],
        base: SolverConfig::new(Algorithm::Bpg, 1000),
        ref_iters: 10_000,
        f_star: None,
        slope_window: Some((100, 1000)),
    };
    let outcomes = run_all(&inst, &opts);
    let (f_star, x_hat) = reference_optimum(&inst, opts.ref_iters, &outcomes).map_err(e)?;
    let summary = summarize(&inst, &opts, &outcomes, f_star, Some(bound_scale(&inst, &x_hat).map_err(e)?));
    let slope = |alg: Algorithm| -> Result<f64, String> {
        let s = summary.algorithms.iter().find(|s| s.algorithm == alg).ok_or("missing run")?;
        s.slope.ok_or_else(|| format!("{alg}: {}", s.error.clone().unwrap_or_else(|| "no slope".into())))
    };
    let (bpg, abpg, abpg_g) = (slope(Algorithm::Bpg)?, slope(Algorithm::Abpg)?, slope(Algorithm::AbpgG)?);
    verdict(
        abpg <= -1.7 && abpg_g <= -1.7 && bpg >= -1.4,
        format!("D-optimal 80x200 seed 1, slopes over [100,1000]: abpg {abpg:.3}, abpg-g {abpg_g:.3} (want <= -1.7); bpg {bpg:.3} (want >= -1.4)"),
    )
}

fn ac10_dual_averaging() -> Result<Verdict, String> {
    let inst = gen_doptimal(80, 200, 1).map_err(e)?;
    let abpg = run(&inst.problem, &SolverConfig::new(Algorithm::Abpg, 500), &inst.x0).map_err(e)?;
    let abda = run(&inst.problem, &SolverConfig::new(Algorithm::Abda, 500), &inst.x0).map_err(e)?;
    let worst = abpg
        .f_values()
        .iter()
        .zip(abda.f_values())
        .map(|(a, b)| (a - b).abs() / a.abs())
        .fold(0f64, f64::max);
    verdict(worst <= 1e-8, format!("D-optimal 80x200, 500 iterations: max rel F difference {worst:.1e} (tol 1e-8)"))
}

fn oracle_bound_excess(trace: &SolverTrace, rho: f64) -> f64 {
    let g0 = trace.rows[0].gain;
    trace
        .rows
        .iter()
        .map(|r| r.grad_calls as f64 - (2.0 * (r.k as f64 + 1.0) + (r.gain / g0).ln() / rho.ln()))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn ac11_oracle_calls() -> Result<Verdict, String> {
    let mut runs = vec![(gen_doptimal(40, 100, 1).map_err(e)?, 2000)];
    runs.extend(experiment_instances()?.into_iter().map(|i| (i, 1000)));
    runs.push((gen_relentropy(1000, 100, 1, bregman_core::instances::default_relentropy_reg()).map_err(e)?, 1000));
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for (inst, iters) in &runs {
        for restart in [false, true] {
            let cfg = SolverConfig::new(Algorithm::AbpgG, *iters).with_restart(restart);
            let trace = run(&inst.problem, &cfg, &inst.x0).map_err(e)?;
            worst = worst.max(oracle_bound_excess(&trace, cfg.rho));
            count += 1;
        }
    }
    verdict(worst <= 1e-9, format!("{count} ABPG-g runs (with and without restart): max N_k - bound {worst:.2}"))
}

/// Numeric columns of a CSV file with the `seconds` column removed.
fn csv_without_seconds(path: &Path) -> Result<Vec<String>, String> {
    let text = fs::read_to_string(path).map_err(|err| format!("{}: {err}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty csv")?.split(',').collect();
    let drop = header.iter().position(|h| *h == "seconds").ok_or("no seconds column")?;
    Ok(text
        .lines()
        .map(|l| l.split(',').enumerate().filter(|(i, _)| *i != drop).map(|(_, f)| f).collect::<Vec<_>>().join(","))
        .collect())
}

fn ac12_determinism() -> Result<Verdict, String> {
    let dir = tempfile::tempdir().map_err(e)?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let cli = |args: &[&str]| -> Result<(), String> {
        match bregman_harness::cli_main(std::iter::once("bregman").chain(args.iter().copied())) {
            0 => Ok(()),
            code => Err(format!("bregman {} exited with {code}", args.join(" "))),
        }
    };
    let inst = p("inst.json");
    cli(&["gen", "--family", "dopt", "--m", "20", "--n", "50", "--seed", "7", "--out", &inst])?;
    let algos = "bpg,bpg-ls,abpg,abpg-e,abpg-g,abda";
    for tag in ["a", "b"] {
        let out = p(&format!("{tag}.csv"));
        cli(&["compare", "--instance", &inst, "--algos", algos, "--iters", "300", "--ref-iters", "3000", "--out", &out])?;
    }
    let mut files = vec![String::new()];
    files.extend(algos.split(',').map(|a| format!(".{a}")));
    let mut differing = Vec::new();
    for f in &files {
        let (a, b) = (p(&format!("a{f}.csv")), p(&format!("b{f}.csv")));
        if csv_without_seconds(Path::new(&a))? != csv_without_seconds(Path::new(&b))? {
            differing.push(format!("{f}.csv"));
        }
    }
    let summaries_equal = fs::read(p("a.summary.json")).map_err(e)? == fs::read(p("b.summary.json")).map_err(e)?;
    verdict(
        differing.is_empty() && summaries_equal,
        format!(
            "two compare runs on D-optimal 20x50 seed 7: {} of {} CSV files differ outside the seconds column, summaries {}",
            differing.len(),
            files.len(),
            if summaries_equal { "identical" } else { "differ" }
        ),
    )
}

const CRITERIA: [(&str, &str, Option<f64>, Check); 12] = [
    ("AC-1", "kernel correctness", Some(10.0), ac1_kernels),
    ("AC-2", "triangle scaling exponents", Some(10.0), ac2_scaling_exponents),
    ("AC-3", "gain bound validity", Some(10.0), ac3_gain_bounds),
    ("AC-4", "theta machinery", Some(5.0), ac4_theta_machinery),
    ("AC-5", "prox oracle equivalence", Some(60.0), ac5_prox_oracle),
    ("AC-6", "BPG monotonicity", Some(120.0), ac6_bpg_monotone),
    ("AC-7", "accelerated Euclidean bound", Some(10.0), ac7_euclidean_bound),
    ("AC-8", "gain-adapted certificate", Some(120.0), ac8_gain_certificate),
    ("AC-9", "empirical rates", Some(300.0), ac9_empirical_rates),
    ("AC-10", "dual averaging equivalence", Some(60.0), ac10_dual_averaging),
    ("AC-11", "oracle-call bound", None, ac11_oracle_calls),
    ("AC-12", "determinism", None, ac12_determinism),
];

fn main() {
    let mut failed = Vec::new();
    for (id, title, budget, check) in CRITERIA {
        let start = Instant::now();
        let result = panic::catch_unwind(check);
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match result {
            Ok(Ok(v)) => (v.passed, v.detail),
            Ok(Err(msg)) => (false, format!("error: {msg}")),
            Err(_) => (false, "panicked".to_string()),
        };
        let in_time = budget.is_none_or(|b| secs <= b);
        let timing = match budget {
            Some(b) => format!("{secs:.1} s of {b:.0} s"),
            None => format!("{secs:.1} s"),
        };
        let pass = ok && in_time;
        println!("[{}] {id} {title}: {detail} ({timing})", if pass { "PASS" } else { "FAIL" });
        if !pass {
            failed.push(id);
        }
    }
    println!("acceptance: {} passed, {} failed{}", CRITERIA.len() - failed.len(), failed.len(), if failed.is_empty() {
        String::new()
    } else {
        format!(" ({})", failed.join(", "))
    });
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
