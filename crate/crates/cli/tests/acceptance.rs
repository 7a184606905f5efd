//! End-to-end acceptance criteria, one PASS/FAIL line each. Runs as a plain
//! binary so the lines are always visible; exits non-zero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use convexcert_core::certify::{
    check_conjugate_relations, check_sc_implication, check_smoothness, check_strong_convexity,
    estimate_l, estimate_mu, ConditionId, Family,
};
use convexcert_core::conjugate::{
    biconjugate_gap, conjugate_brute, llt_1d, BruteForce, Conjugator, GridFunction,
};
use convexcert_core::duality::{counterexample_suite, verify_part_i, verify_part_ii};
use convexcert_core::expr::{ad_gradient, parse_expression};
use convexcert_core::point::linspace;
use convexcert_core::zoo::{
    make_huber, make_logsumexp, make_quadratic, make_sin, ZooEntry, ZooParams, ZooRegistry,
};
use convexcert_core::{fd_gradient, AxisBox, FunctionOracle, Point, SamplingPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn zoo_entries() -> Vec<ZooEntry> {
    let reg = ZooRegistry::standard();
    let mut out: Vec<ZooEntry> = reg
        .names()
        .into_iter()
        .map(|n| reg.build(n, &ZooParams::default()).expect("default build"))
        .collect();
    out.push(make_quadratic(&[1.0, 4.0]).unwrap());
    out.push(make_quadratic(&[0.5, 2.0, 3.0]).unwrap());
    out.push(make_logsumexp(3).unwrap());
    out
}

fn quadratic_duality() -> Outcome {
    let mut worst_value = 0.0f64;
    let mut worst_slack = 0.0f64;
    for mu in [0.5, 1.0, 2.0, 10.0] {
        let e = make_quadratic(&[mu]).map_err(err)?;
        // Maximizers s/μ of the slopes lie in [−3, 3], inside the grid.
        let g = GridFunction::sample(&e.oracle, -4.0, 4.0, 200_001).map_err(err)?;
        let slopes = linspace(-3.0 * mu, 3.0 * mu, 601);
        let r = llt_1d(&g, &slopes).map_err(err)?;
        for (s, v) in slopes.iter().zip(&r.values) {
            worst_value = worst_value.max((v - s * s / (2.0 * mu)).abs());
        }
        let plan = SamplingPlan::new(e.default_box.clone(), 1000, 0);
        let i = verify_part_i(&e, &plan).map_err(err)?;
        let ii = verify_part_ii(&e, &plan).map_err(err)?;
        ensure!(i.bound_satisfied && ii.bound_satisfied, "mu={mu}: bound not satisfied");
        worst_slack = worst_slack.max(i.slack.abs()).max(ii.slack.abs());
    }
    ensure!(worst_value <= 1e-6, "max |f* - s^2/(2mu)| = {worst_value:e}");
    ensure!(worst_slack <= 1e-6, "max |slack| = {worst_slack:e}");
    Ok(format!("max conjugate error {worst_value:.1e}, max |slack| {worst_slack:.1e}"))
}

/// A random continuous piecewise function of up to 8 pieces mixing linear,
/// convex, concave and oscillating parts.
fn random_piecewise(rng: &mut ChaCha8Rng) -> FunctionOracle {
    let k = rng.gen_range(1..=8);
    let breaks: Vec<f64> = {
        let mut b: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(-5.0..5.0)).collect();
        b.sort_by(f64::total_cmp);
        b
    };
    let pieces: Vec<(u8, f64, f64)> = (0..k)
        .map(|_| (rng.gen_range(0..4), rng.gen_range(-3.0..3.0), rng.gen_range(0.1..2.0)))
        .collect();
    let value = move |x: &[f64]| {
        let x = x[0];
        let i = breaks.iter().filter(|b| **b <= x).count();
        let (kind, a, c) = pieces[i];
        match kind {
            0 => a * x,
            1 => a * x + c * x * x,
            2 => a * x - c * x.abs(),
            _ => a * x + c * (2.0 * x).sin(),
        }
    };
    FunctionOracle::from_fns(1, false, value, |_| vec![0.0])
}

fn llt_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut largest = 0;
    for trial in 0..50 {
        let f = random_piecewise(&mut rng);
        let n = if trial % 10 == 0 { 10_000 } else { rng.gen_range(2..=10_000) };
        largest = largest.max(n);
        let (lo, hi) = (-6.0, 6.0);
        let g = GridFunction::sample(&f, lo, hi, n).map_err(err)?;
        let slopes = linspace(-8.0, 8.0, 401);
        let fast = llt_1d(&g, &slopes).map_err(err)?;
        let slow = BruteForce.transform(&g, &slopes).map_err(err)?;
        ensure!(fast.values == slow.values, "trial {trial}: values differ");
        ensure!(fast.argmax_index == slow.argmax_index, "trial {trial}: maximizers differ");
        let domain = AxisBox::cube(1, lo, hi).map_err(err)?;
        for (j, s) in slopes.iter().enumerate().step_by(25) {
            let b = conjugate_brute(&f, &domain, n, &Point::scalar(*s).map_err(err)?).map_err(err)?;
            ensure!(b == fast.values[j], "trial {trial} s={s}: {b} vs {}", fast.values[j]);
        }
    }

    let time = |n: usize| -> Result<f64, String> {
        let xs = linspace(-5.0, 5.0, n);
        let vs = xs.iter().map(|x| x * x + (3.0 * x).sin()).collect();
        let g = GridFunction::new(xs, vs).map_err(err)?;
        let slopes = linspace(-10.0, 10.0, n);
        // Repeat small transforms so both sizes time the same total work.
        let reps = (100_000 / n).max(1);
        let mut runs: Vec<f64> = (0..9)
            .map(|_| {
                let t = Instant::now();
                for _ in 0..reps {
                    std::hint::black_box(llt_1d(&g, &slopes))?;
                }
                Ok(t.elapsed().as_secs_f64() / reps as f64)
            })
            .collect::<convexcert_core::Result<_>>()
            .map_err(err)?;
        runs.sort_by(f64::total_cmp);
        Ok(runs[runs.len() / 2])
    };
    let ratio = time(10_000)? / time(1_000)?;
    ensure!(ratio <= 15.0, "runtime ratio n=1e4 / n=1e3 is {ratio:.1}");
    Ok(format!("50 functions (grids up to {largest}) identical; runtime ratio {ratio:.1}x"))
}

fn convex_equivalence() -> Outcome {
    let entries = [
        make_quadratic(&[1.0, 4.0]).map_err(err)?,
        make_huber(1.0).map_err(err)?,
        make_logsumexp(2).map_err(err)?,
    ];
    let mut worst = f64::INFINITY;
    for e in &entries {
        let l = e.constants.known_l.ok_or("missing L")?;
        let plan = SamplingPlan::new(e.default_box.clone(), 1000, 17);
        for id in ConditionId::of_family(Family::Smoothness) {
            let v = check_smoothness(&e.oracle, l, &plan, id).map_err(err)?;
            ensure!(v.holds && v.worst_margin >= -1e-7, "{} {id}: margin {}", e.name, v.worst_margin);
            worst = worst.min(v.worst_margin);
        }
    }
    Ok(format!("24 verdicts hold, worst margin {worst:.1e}"))
}

/// min over a 10⁶-point grid of ½f′(x)² / (f(x) − f_min), f = x² + 3 sin² x.
fn pl_grid_oracle() -> f64 {
    linspace(-10.0, 10.0, 1_000_000)
        .into_iter()
        .filter(|x| *x != 0.0)
        .map(|x| {
            let f = x * x + 3.0 * x.sin().powi(2);
            let g = 2.0 * x + 3.0 * (2.0 * x).sin();
            0.5 * g * g / f
        })
        .fold(f64::INFINITY, f64::min)
}

fn strictness_counterexamples() -> Outcome {
    // Frozen grid value, attained near x = -2.2017.
    const PL_GRID_MIN: f64 = 0.175531;
    let pl = pl_grid_oracle();
    ensure!((pl - PL_GRID_MIN).abs() <= 5e-7, "grid oracle moved: {pl}");
    ensure!(pl >= 1.0 / 32.0, "grid oracle PL constant {pl} < 1/32");
    let claims = counterexample_suite().map_err(err)?;
    ensure!(claims.len() == 3, "{} claims", claims.len());
    for c in &claims {
        ensure!(c.established(), "claim {} not established", c.label);
    }
    let (a, b, c) = (&claims[0], &claims[1], &claims[2]);
    ensure!(a.holding.condition_id == ConditionId::Sm0 && a.holding.parameter == Some(1.0), "sin holding");
    let w = &a.witness;
    ensure!(
        w.condition_id == ConditionId::Sm5 && w.x.as_slice() == [0.0] && w.y.as_slice() == [PI],
        "sin witness {w:?}"
    );
    ensure!(w.margin <= -(PI + 2.0) + 1e-6, "sin margin {}", w.margin);
    ensure!(b.holding.condition_id == ConditionId::SciPl && b.holding.parameter == Some(1.0 / 32.0), "PL holding");
    ensure!(b.violating.iter().any(|v| v.condition_id.family() == Family::Convexity), "PL violating");
    ensure!(c.holding.condition_id == ConditionId::Sm2, "Huber holding");
    ensure!(
        c.violating.iter().any(|v| v.parameter == Some(1e-3) && v.condition_id.family() == Family::StrongConvexity),
        "Huber at mu = 1e-3"
    );
    Ok(format!(
        "3 claims re-verified; sin SM_5 margin {:.6}, grid PL constant {pl:.6}",
        w.margin
    ))
}

fn sc_implication_chain() -> Outcome {
    let mut count = 0;
    for e in zoo_entries() {
        let Some(mu) = e.constants.known_mu.filter(|m| *m > 0.0) else { continue };
        let plan = SamplingPlan::new(e.default_box.clone(), 1000, 23);
        for id in ConditionId::of_family(Family::StrongConvexity) {
            let v = check_strong_convexity(&e.oracle, mu, &plan, id).map_err(err)?;
            ensure!(v.holds, "{} {id}: {}", e.name, v.worst_margin);
            count += 1;
        }
        for id in ConditionId::of_family(Family::Implication) {
            let v = check_sc_implication(&e.oracle, mu, e.constants.known_min_value, &plan, id).map_err(err)?;
            ensure!(v.holds, "{} {id}: {}", e.name, v.worst_margin);
            count += 1;
        }
    }
    ensure!(count > 0, "no entry with known mu > 0");
    Ok(format!("{count} verdicts hold"))
}

fn conjugate_relations() -> Outcome {
    let mut n_entries = 0;
    for e in zoo_entries() {
        if e.conjugate.is_none() {
            continue;
        }
        let plan = SamplingPlan::new(e.default_box.clone(), 1000, 31).with_lattice(false);
        let v = check_conjugate_relations(&e, &plan, ConditionId::Conj12).map_err(err)?;
        ensure!(v.holds && v.worst_margin >= -1e-7, "{}: {}", e.name, v.worst_margin);
        ensure!(v.n_evaluated >= 1000, "{}: only {} points", e.name, v.n_evaluated);
        n_entries += 1;
    }
    let mut worst_gap = 0.0f64;
    for e in zoo_entries().into_iter().filter(|e| e.dim() == 1 && e.convex) {
        let gap = biconjugate_gap(&e.oracle, &e.default_box, 4001).map_err(err)?;
        ensure!(gap <= 1e-5, "{}: biconjugate gap {gap}", e.name);
        worst_gap = worst_gap.max(gap);
    }
    let neg = FunctionOracle::from_fns(1, true, |x| -x[0] * x[0], |x| vec![-2.0 * x[0]]);
    let gap = biconjugate_gap(&neg, &AxisBox::cube(1, -1.0, 1.0).map_err(err)?, 4001).map_err(err)?;
    ensure!((gap - 1.0).abs() <= 1e-6, "-x^2 gap {gap}");
    Ok(format!(
        "Fenchel-Young equality on {n_entries} entries; convex gaps <= {worst_gap:.1e}; -x^2 gap {gap:.9}"
    ))
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let size = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / size.max(1.0)
}

fn gradient_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    let mut functions = 0;
    for e in zoo_entries().into_iter().filter(|e| e.oracle.is_smooth()) {
        for _ in 0..1000 {
            let u: Vec<f64> = (0..e.dim()).map(|_| rng.gen()).collect();
            let x = e.default_box.from_unit(&u);
            let g = e.oracle.grad_select(&x).map_err(err)?;
            let fd = fd_gradient(&e.oracle, &x, 1e-5).map_err(err)?;
            worst = worst.max(relative_error(&g, &fd));
        }
        functions += 1;
    }
    for (text, dim) in [
        ("x1^2 + 3*sin(x1)^2", 1),
        ("exp(x1) + x2^4 - x1*x2", 2),
        ("log(1 + exp(x1 - x2)) + cos(x3)*x1", 3),
        ("sqrt(1 + x1^2 + x2^2)", 2),
        ("sum(x1^2, 2*x2^2, sin(x1*x2))", 2),
    ] {
        let e = parse_expression(text, dim).map_err(err)?;
        let oracle = e.oracle();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let p = Point::new(x).map_err(err)?;
            let ad = ad_gradient(&e, &p).map_err(err)?;
            let fd = fd_gradient(&oracle, &p, 1e-5).map_err(err)?;
            worst = worst.max(relative_error(&ad, &fd));
        }
        functions += 1;
    }
    ensure!(worst <= 1e-5, "worst relative error {worst:e}");
    Ok(format!("{functions} functions x 1000 points, worst relative error {worst:.1e}"))
}

fn estimator_accuracy() -> Outcome {
    let mut worst = 0.0f64;
    for diag in [&[2.0][..], &[1.0, 4.0], &[0.5, 2.0, 3.0]] {
        let e = make_quadratic(diag).map_err(err)?;
        let plan = SamplingPlan::new(e.default_box.clone(), 1000, 5);
        let (mu, l) = (e.constants.known_mu.unwrap(), e.constants.known_l.unwrap());
        let em = estimate_mu(&e.oracle, &plan).map_err(err)?;
        let el = estimate_l(&e.oracle, &plan).map_err(err)?;
        ensure!((em - mu).abs() <= 1e-6 && (el - l).abs() <= 1e-6, "{diag:?}: mu {em}, L {el}");
        worst = worst.max((em - mu).abs()).max((el - l).abs());
    }
    let sin = make_sin();
    let plan = SamplingPlan::new(AxisBox::cube(1, 0.0, 2.0 * PI).map_err(err)?, 20_000, 5);
    let l = estimate_l(&sin.oracle, &plan).map_err(err)?;
    ensure!((l - 1.0).abs() <= 1e-3, "L(sin) estimated as {l}");
    Ok(format!("quadratics within {worst:.1e}; L(sin) = {l:.6}"))
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_convexcert");
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/configs");
    let dir = tempfile::tempdir().map_err(err)?;
    let golden = [
        ("certify", "sin_chain.conf", 1),
        ("certify", "sin_sm4.conf", 0),
        ("certify", "quadratic_sc.conf", 0),
        ("certify", "quadratic_sc_too_big.conf", 1),
        ("certify", "expr_convex.conf", 0),
        ("certify", "pl_nonconvex.conf", 1),
        ("certify", "huber_conj.conf", 0),
        ("duality", "duality_quadratic.conf", 0),
        ("duality", "duality_wrong_l.conf", 1),
        ("certify", "bad_key.conf", 2),
    ];
    for (job, conf, want) in golden {
        let mut bodies = Vec::new();
        let out = dir.path().join(format!("{conf}.json"));
        for _ in 0..2 {
            let status = Command::new(bin)
                .arg(job)
                .arg("--config")
                .arg(configs.join(conf))
                .arg("--out")
                .arg(&out)
                .env_remove("CONVEXCERT_SEED")
                .output()
                .map_err(err)?
                .status
                .code();
            ensure!(status == Some(want), "{conf}: exit {status:?}, expected {want}");
            let mut v: serde_json::Value =
                serde_json::from_str(&std::fs::read_to_string(&out).map_err(err)?).map_err(err)?;
            v.as_object_mut().ok_or("report is not an object")?.remove("timing");
            bodies.push(serde_json::to_vec_pretty(&v).map_err(err)?);
        }
        ensure!(bodies[0] == bodies[1], "{conf}: reports differ between runs");
    }
    Ok(format!("{} configs: exit statuses match, reports byte-identical", golden.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("quadratic duality tightness", quadratic_duality),
        ("linear-time transform equals brute force", llt_equivalence),
        ("convex smoothness equivalence", convex_equivalence),
        ("strictness counterexamples", strictness_counterexamples),
        ("strong convexity implication chain", sc_implication_chain),
        ("conjugate relations", conjugate_relations),
        ("gradient correctness", gradient_correctness),
        ("estimator accuracy", estimator_accuracy),
        ("CLI determinism and exit codes", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
