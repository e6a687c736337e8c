//! Acceptance criteria. Prints one `[PASS]` or `[FAIL]` line per criterion
//! and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssfdet::{
    birman_solomyak_check, cauchy_det_closed, inner, interaction_closed, interaction_quadrature, residue_weights,
    section_det, ssf_of_cyclic_part, xi_interaction, DetMethod, PolyBump, Segment,
};
use ssfdet_cli::{gen_instance, presets, run_suite, Cell, Instance, InstanceSpec, Report, RunOptions, SuiteConfig};

const GOLDEN_DET_TOL: f64 = 1e-9;
const GOLDEN_LOG_TOL: f64 = 1e-9;
const GOLDEN_L1_TOL: f64 = 1e-10;
const GOLDEN_RUNTIME: Duration = Duration::from_millis(1);
const THEOREM_TOL: f64 = 1e-8;
const METHODS_TOL: f64 = 1e-8;
const ENSEMBLE_RUNTIME: Duration = Duration::from_secs(30);
const PREDICTED_TOL: f64 = 1e-10;
const COUNTER_DET_TOL: f64 = 1e-12;
const COUNTER_INTEGRAL_TOL: f64 = 1e-10;
const DUAL_TOL: f64 = 1e-9;
const DIFF_SQ_TOL: f64 = 1e-9;
const QUAD_ABS_TOL: f64 = 1e-8;
const QUAD_REL_TOL: f64 = 1e-6;
const CAUCHY_REL_TOL: f64 = 1e-10;
const WEIGHT_TOL: f64 = 1e-9;
const TRACE_FORMULA_TOL: f64 = 1e-6;
const SUBSPACE_TOL: f64 = 1e-9;
const CONVERGE_FINAL_TOL: f64 = 1e-9;
const CONVERGE_SLACK: f64 = 1.10;
const CONVERGE_RUNTIME: Duration = Duration::from_secs(60);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn float(r: &Report, i: usize, col: &str) -> f64 {
    match r.get(i, col) {
        Some(Cell::Float(v)) => *v,
        Some(Cell::Int(v)) => *v as f64,
        _ => f64::NAN,
    }
}

fn flag(r: &Report, i: usize, col: &str) -> bool {
    matches!(r.get(i, col), Some(Cell::Bool(true)))
}

fn text<'a>(r: &'a Report, i: usize, col: &str) -> &'a str {
    match r.get(i, col) {
        Some(Cell::Text(s)) => s,
        _ => "",
    }
}

fn rows_of<'a>(r: &'a Report, prefix: &'a str) -> impl Iterator<Item = usize> + 'a {
    (0..r.rows.len()).filter(move |&i| text(r, i, "batch").starts_with(prefix))
}

fn max_of(r: &Report, rows: &[usize], col: &str) -> f64 {
    rows.iter().map(|&i| float(r, i, col)).fold(0.0, f64::max)
}

fn golden() -> Outcome {
    let inst = gen_instance(&InstanceSpec::golden(), 0).expect("golden instance");
    let (pair, set) = (&inst.pair, &inst.set);
    let s5 = 5f64.sqrt();
    // Hand-solved: b = (3 ± √5)/2, section det = 1 / (1 + (√5 - 2)²).
    let det_oracle = 1.0 / (1.0 + (s5 - 2.0).powi(2));
    let log_oracle = (1.0 + (s5 - 2.0).powi(2)).ln();

    let run = || {
        let dets: Vec<f64> = DetMethod::ALL.iter().map(|&m| section_det(pair, set, m).unwrap()).collect();
        let integral = xi_interaction(pair, set).unwrap().value;
        let l1 = ssf_of_cyclic_part(pair).unwrap().l1();
        (dets, integral, l1)
    };
    let (dets, integral, l1) = run();
    let elapsed = (0..20)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(run());
            t.elapsed()
        })
        .min()
        .unwrap();

    let det_err = dets.iter().map(|d| (d - det_oracle).abs()).fold(0.0, f64::max);
    let log_err = (-dets[0].ln() - log_oracle).abs().max((integral - log_oracle).abs());
    let l1_err = (l1 - 1.0).abs();
    let pass = det_err <= GOLDEN_DET_TOL
        && (det_oracle - 0.947_213_595_5).abs() <= GOLDEN_DET_TOL
        && log_err <= GOLDEN_LOG_TOL
        && l1_err <= GOLDEN_L1_TOL
        && elapsed < GOLDEN_RUNTIME;
    outcome(
        pass,
        format!(
            "det={:.10} (err {det_err:.1e}), -ln det={:.10}, integral={integral:.10} (err {log_err:.1e}), l1 err {l1_err:.1e}, {:?}",
            dets[0],
            -dets[0].ln(),
            elapsed
        ),
    )
}

fn theorem_main(r: &Report, elapsed: Duration) -> Outcome {
    let rows: Vec<usize> = rows_of(r, "main_").collect();
    let dims: Vec<f64> = rows.iter().map(|&i| float(r, i, "dim")).collect();
    let in_range = dims.iter().all(|&d| (4.0..=40.0).contains(&d));
    let all_main = rows.iter().all(|&i| text(r, i, "classification") == "thm_main");
    let bounded = rows.iter().all(|&i| {
        let v = float(r, i, "integral_closed");
        (float(r, i, "neg_log_det") - v).abs() <= THEOREM_TOL * v.abs().max(1.0)
    });
    let methods = max_of(r, &rows, "methods_residual");
    let generators = ["main_gaussian", "main_jacobi", "main_gapped"]
        .iter()
        .filter(|g| rows.iter().any(|&i| text(r, i, "batch") == **g))
        .count();
    let pass = rows.len() >= 200
        && generators >= 2
        && in_range
        && all_main
        && bounded
        && methods <= METHODS_TOL
        && elapsed < ENSEMBLE_RUNTIME;
    outcome(
        pass,
        format!(
            "{} instances from {generators} generators, max identity residual {:.1e}, max method spread {methods:.1e}, {:.1?}",
            rows.len(),
            max_of(r, &rows, "theorem_residual"),
            elapsed
        ),
    )
}

fn theorem_xi_one(r: &Report) -> Outcome {
    let rows: Vec<usize> = rows_of(r, "xi_one_").collect();
    let ok = rows.iter().all(|&i| {
        let v = float(r, i, "integral_closed");
        text(r, i, "classification") == "thm_xi_one" && (float(r, i, "neg_log_det") - v).abs() <= THEOREM_TOL * v.abs().max(1.0)
    });
    outcome(
        rows.len() >= 100 && ok,
        format!("{} instances, max residual {:.1e}", rows.len(), max_of(r, &rows, "theorem_residual")),
    )
}

fn trace_mismatch(r: &Report) -> Outcome {
    let rows: Vec<usize> = rows_of(r, "mismatch_").collect();
    let ok = rows
        .iter()
        .all(|&i| text(r, i, "classification") == "trace_mismatch" && float(r, i, "predicted_det") <= PREDICTED_TOL);
    outcome(
        rows.len() >= 50 && ok,
        format!("{} instances, max predicted det {:.1e}", rows.len(), max_of(r, &rows, "predicted_det")),
    )
}

fn counterexample() -> Outcome {
    let out = run_suite(&presets::counterexample(), &RunOptions::default());
    let r = &out.report;
    let det = float(r, 0, "diff_sq_det");
    let integral = float(r, 0, "integral_closed");
    let reference = (9.0f64 / 8.0).ln();
    let pass = (det - 1.0).abs() <= COUNTER_DET_TOL
        && (integral - reference).abs() <= COUNTER_INTEGRAL_TOL
        && (integral - 0.117_783_0).abs() <= 1e-7
        && flag(r, 0, "expected_mismatch")
        && !flag(r, 0, "theorem_pass")
        && out.failures == 0;
    outcome(pass, format!("diff_sq_det={det:.15}, integral={integral:.10}, ln(9/8)={reference:.10}, flagged"))
}

fn corollaries(r: &Report) -> Outcome {
    let rows: Vec<usize> = rows_of(r, "main_").collect();
    let dual = max_of(r, &rows, "dual_residual");
    let dsq = max_of(r, &rows, "diff_sq_residual");
    let complete = rows.iter().all(|&i| float(r, i, "dual_residual").is_finite() && float(r, i, "diff_sq_residual").is_finite());
    outcome(
        complete && dual <= DUAL_TOL && dsq <= DIFF_SQ_TOL,
        format!("{} instances, max |primal - dual| {dual:.1e}, max |diff_sq - primal*dual| {dsq:.1e}", rows.len()),
    )
}

fn leibniz(m: &[Vec<f64>]) -> f64 {
    fn go(m: &[Vec<f64>], used: &mut Vec<bool>, row: usize) -> f64 {
        if row == m.len() {
            return 1.0;
        }
        let mut total = 0.0;
        let mut sign = 1.0;
        for c in 0..m.len() {
            if used[c] {
                continue;
            }
            used[c] = true;
            total += sign * m[row][c] * go(m, used, row + 1);
            used[c] = false;
            sign = -sign;
        }
        total
    }
    go(m, &mut vec![false; m.len()], 0)
}

fn oracles(ensemble: &[Instance]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    // Interaction: closed form against quadrature on random bounded families.
    let mut quad_worst = 0.0f64;
    let mut quad_ok = true;
    let mut families = 0;
    while families < 100 {
        let kx = rng.random_range(1..4);
        let ky = rng.random_range(1..4);
        let mut draw = |k: usize| -> Vec<Segment> {
            let mut s: Vec<Segment> = (0..k)
                .map(|_| {
                    let lo = rng.random_range(-4.0..4.0);
                    Segment::new(lo, lo + rng.random_range(0.01..1.0))
                })
                .collect();
            s.sort_by(|p, q| p.lo.total_cmp(&q.lo));
            s
        };
        let (xs, ys) = (draw(kx), draw(ky));
        let sep = xs.iter().flat_map(|p| ys.iter().map(move |q| p.distance(q))).fold(f64::INFINITY, f64::min);
        let overlapping = |s: &[Segment]| s.windows(2).any(|w| w[1].lo <= w[0].hi);
        if sep < 1e-3 || overlapping(&xs) || overlapping(&ys) {
            continue;
        }
        families += 1;
        let closed = interaction_closed(&xs, &ys).value;
        let quad = interaction_quadrature(&xs, &ys, 1e-10).unwrap_or(f64::NAN);
        let err = (closed - quad).abs();
        quad_ok &= err <= QUAD_ABS_TOL.max(QUAD_REL_TOL * closed);
        quad_worst = quad_worst.max(err);
    }

    // Cauchy determinant against the permutation expansion.
    let mut cauchy_worst = 0.0f64;
    for n in 1..=8 {
        for _ in 0..5 {
            let mut x = rng.random_range(-2.0..0.0);
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for _ in 0..n {
                x += rng.random_range(0.05..1.0);
                a.push(x);
                x += rng.random_range(0.05..1.0);
                b.push(x);
            }
            let m: Vec<Vec<f64>> = a.iter().map(|&aj| b.iter().map(|&bk| 1.0 / (bk - aj)).collect()).collect();
            let oracle = leibniz(&m);
            let closed = cauchy_det_closed(&a, &b).unwrap();
            cauchy_worst = cauchy_worst.max((closed - oracle).abs() / oracle.abs());
        }
    }

    // Residue weights against eigenvector overlaps, and the trace formula.
    let mut weight_worst = 0.0f64;
    let mut trace_worst = 0.0f64;
    for inst in ensemble {
        let pair = &inst.pair;
        let w = residue_weights(pair).unwrap();
        for k in 0..pair.dim() {
            let wa = inner(&pair.eig_a().vector(k), pair.phi()).norm_sqr();
            let wb = inner(&pair.eig_b().vector(k), pair.phi()).norm_sqr();
            weight_worst = weight_worst.max((w.a[k] - wa).abs()).max((w.b[k] - wb).abs());
        }
        let r = pair.eig_a().spectral_radius().max(pair.eig_b().spectral_radius()) + 0.5;
        for degree in 0..=3 {
            let coeffs: Vec<f64> = (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = PolyBump { lo: -r, hi: r, coeffs };
            let check = birman_solomyak_check(pair, &f, 64).unwrap();
            trace_worst = trace_worst.max(check.residual());
        }
    }

    let pass = quad_ok && cauchy_worst <= CAUCHY_REL_TOL && weight_worst <= WEIGHT_TOL && trace_worst <= TRACE_FORMULA_TOL;
    outcome(
        pass,
        format!(
            "quadrature {families} families max err {quad_worst:.1e}; cauchy max rel err {cauchy_worst:.1e}; \
             weights max err {weight_worst:.1e}; trace formula max err {trace_worst:.1e} over {} pairs",
            ensemble.len()
        ),
    )
}

fn subspace() -> Outcome {
    let out = run_suite(&presets::subspace(), &RunOptions::default());
    let r = &out.report;
    let rows: Vec<usize> = (0..r.rows.len()).filter(|&i| flag(r, i, "subspace_hypothesis")).collect();
    let ok = rows.iter().all(|&i| {
        let norm = float(r, i, "subspace_norm");
        norm <= float(r, i, "subspace_bound") + SUBSPACE_TOL && norm < 1.0
    });
    let worst = rows.iter().map(|&i| float(r, i, "subspace_norm") - float(r, i, "subspace_bound")).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        rows.len() >= 100 && ok,
        format!("{} instances with |phi|^2 < delta, max (norm - bound) {worst:.2e}", rows.len()),
    )
}

fn convergence() -> Outcome {
    let start = Instant::now();
    let out = run_suite(&presets::converge(), &RunOptions::default());
    let elapsed = start.elapsed();
    let r = &out.report;
    let n = r.rows.len();
    if n == 0 || !text(r, 0, "error").is_empty() {
        return outcome(false, format!("study failed: {}", if n == 0 { "no rows" } else { text(r, 0, "error") }));
    }
    let residual = |i: usize| float(r, i, "conv_det_residual").max(float(r, i, "conv_integral_residual"));
    let monotone = (1..n).all(|i| residual(i) <= CONVERGE_SLACK * residual(i - 1) + 1e-12);
    let m0 = float(r, 0, "conv_m0");
    let persist = m0.is_finite() && (0..n).all(|i| float(r, i, "conv_m") < m0 || flag(r, i, "conv_gap_persist"));
    let last = n - 1;
    let full = float(r, last, "conv_m") == float(r, last, "dim");
    let grid: Vec<f64> = (0..n).map(|i| float(r, i, "conv_m")).collect();
    let pass = grid == [25.0, 50.0, 100.0, 150.0, 200.0]
        && full
        && monotone
        && residual(last) <= CONVERGE_FINAL_TOL
        && persist
        && elapsed < CONVERGE_RUNTIME;
    let trail: Vec<String> = (0..n).map(|i| format!("{:.1e}", residual(i))).collect();
    outcome(pass, format!("residuals [{}], M0={m0}, {:.1?}", trail.join(", "), elapsed))
}

fn theorem_config() -> SuiteConfig {
    SuiteConfig { batches: presets::theorem_batches(), ..presets::full() }
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("1 golden pair", golden()));

    let start = Instant::now();
    let theorem = run_suite(&theorem_config(), &RunOptions::default());
    let elapsed = start.elapsed();
    let r = &theorem.report;
    results.push(("2 identity, zero boundary values", theorem_main(r, elapsed)));
    results.push(("3 identity, unit boundary values", theorem_xi_one(r)));
    results.push(("4 trace mismatch forces zero", trace_mismatch(r)));
    results.push(("5 counterexample", counterexample()));
    results.push(("6 dual and squared-difference identities", corollaries(r)));

    let spec = presets::theorem_batches().into_iter().next().and_then(|b| b.instance).expect("gaussian batch");
    let ensemble: Vec<Instance> = (0..20u64).filter_map(|s| gen_instance(&spec, 1000 + s).ok()).collect();
    results.push(("7 oracle agreement", oracles(&ensemble)));
    results.push(("8 subspace bound", subspace()));
    results.push(("9 convergence study", convergence()));

    let mut failed = 0;
    for (name, o) in &results {
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
