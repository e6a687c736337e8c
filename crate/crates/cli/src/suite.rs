//! Runs configured batches and collects one report row per check.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;

use ssfdet::{
    classify_boundary, convergence_study, diff_sq_det_projectors, interaction_closed, interaction_quadrature,
    section_det, section_det_dual, ssf_from_counts, ssf_of_cyclic_part, subspace_bound_check, xi_interaction,
    xi_minus_one_interaction, Classification, DetMethod, HermitianMatrix, IntervalSet, DEFAULT_ETA_MIN,
};

use crate::config::{Batch, BatchKind, SuiteConfig, Tolerances};
use crate::instance::{gen_instance, Instance};
use crate::report::{Cell, Report};
use crate::rng::instance_seed;

/// Report columns, in output order.
pub const COLUMNS: &[&str] = &[
    "batch",
    "kind",
    "index",
    "seed",
    "attempts",
    "dim",
    "classification",
    "gap_distance",
    "index_trace",
    "phi_norm_sq",
    "ssf_l1",
    "ssf_l1_residual",
    "ssf_l1_tol",
    "ssf_l1_pass",
    "det_direct",
    "det_overlap",
    "det_product",
    "methods_residual",
    "methods_tol",
    "methods_pass",
    "det_dual",
    "dual_residual",
    "dual_tol",
    "dual_pass",
    "diff_sq_det",
    "diff_sq_residual",
    "diff_sq_tol",
    "diff_sq_pass",
    "neg_log_det",
    "integral_closed",
    "theorem_residual",
    "theorem_tol",
    "theorem_pass",
    "integral_quadrature",
    "quadrature_residual",
    "quadrature_tol",
    "quadrature_pass",
    "predicted_det",
    "predicted_tol",
    "predicted_pass",
    "reference_integral",
    "reference_residual",
    "reference_tol",
    "reference_pass",
    "subspace_hypothesis",
    "subspace_delta",
    "subspace_norm",
    "subspace_bound",
    "subspace_residual",
    "subspace_tol",
    "subspace_pass",
    "kernel_primal",
    "kernel_bound",
    "kernel_distance",
    "conv_m",
    "conv_eta",
    "conv_gap_inclusion",
    "conv_gap_persist",
    "conv_m0",
    "conv_det_residual",
    "conv_integral_residual",
    "conv_tol",
    "conv_pass",
    "expected_mismatch",
    "pass",
    "error",
];

pub const TIMING_COLUMN: &str = "time_ms";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub tol_scale: f64,
    pub timings: bool,
    /// Run only the first instance of each batch.
    pub first_only: bool,
    /// Overrides the config seed.
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { tol_scale: 1.0, timings: false, first_only: false, seed: None }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub report: Report,
    /// Rows whose `pass` flag is false.
    pub failures: usize,
}

/// Named cells for one row; unset columns are emitted as missing.
#[derive(Debug, Default)]
struct Row(HashMap<&'static str, Cell>);

impl Row {
    fn set(&mut self, key: &'static str, value: impl Into<Cell>) {
        debug_assert!(COLUMNS.contains(&key), "unknown column {key}");
        self.0.insert(key, value.into());
    }

    /// Records a residual against its tolerance; returns the pass flag.
    fn check(&mut self, prefix: &'static str, residual: f64, tol: f64) -> bool {
        let pass = residual <= tol;
        let (r, t, p) = residual_keys(prefix);
        self.set(r, residual);
        self.set(t, tol);
        self.set(p, pass);
        pass
    }

    fn into_cells(mut self, timing: Option<f64>) -> Vec<Cell> {
        let mut cells: Vec<Cell> = COLUMNS.iter().map(|c| self.0.remove(c).unwrap_or(Cell::Missing)).collect();
        if let Some(ms) = timing {
            cells.push(Cell::Float(ms));
        }
        cells
    }
}

fn residual_keys(prefix: &'static str) -> (&'static str, &'static str, &'static str) {
    match prefix {
        "ssf_l1" => ("ssf_l1_residual", "ssf_l1_tol", "ssf_l1_pass"),
        "methods" => ("methods_residual", "methods_tol", "methods_pass"),
        "dual" => ("dual_residual", "dual_tol", "dual_pass"),
        "diff_sq" => ("diff_sq_residual", "diff_sq_tol", "diff_sq_pass"),
        "theorem" => ("theorem_residual", "theorem_tol", "theorem_pass"),
        "quadrature" => ("quadrature_residual", "quadrature_tol", "quadrature_pass"),
        "reference" => ("reference_residual", "reference_tol", "reference_pass"),
        "subspace" => ("subspace_residual", "subspace_tol", "subspace_pass"),
        other => panic!("no residual columns for {other}"),
    }
}

pub fn run_suite(config: &SuiteConfig, opts: &RunOptions) -> SuiteOutcome {
    let tol = config.tolerances.scaled(opts.tol_scale);
    let base = opts.seed.unwrap_or(config.seed);
    let tasks: Vec<(usize, &Batch, usize)> = config
        .batches
        .iter()
        .enumerate()
        .flat_map(|(bi, b)| {
            let n = if opts.first_only { b.count.min(1) } else { b.count };
            (0..n).map(move |i| (bi, b, i))
        })
        .collect();

    let rows: Vec<Vec<Vec<Cell>>> = tasks
        .par_iter()
        .map(|&(bi, batch, index)| {
            let start = Instant::now();
            let seed = instance_seed(base, bi, index);
            let rows = run_task(batch, index, seed, &tol, config.quadrature);
            let ms = opts.timings.then(|| start.elapsed().as_secs_f64() * 1e3);
            rows.into_iter().map(|r| r.into_cells(ms)).collect()
        })
        .collect();

    let mut columns = COLUMNS.to_vec();
    if opts.timings {
        columns.push(TIMING_COLUMN);
    }
    let mut report = Report::new(&columns);
    let pass_col = report.column("pass").expect("pass column");
    let mut failures = 0;
    for row in rows.into_iter().flatten() {
        if row[pass_col] != Cell::Bool(true) {
            failures += 1;
        }
        report.push(row);
    }
    SuiteOutcome { report, failures }
}

fn run_task(batch: &Batch, index: usize, seed: u64, tol: &Tolerances, quadrature: bool) -> Vec<Row> {
    let mut head = Row::default();
    head.set("batch", batch.name.as_str());
    head.set("index", index);
    head.set("seed", Cell::Text(seed.to_string()));
    let kind = match batch.kind {
        BatchKind::Theorem => "theorem",
        BatchKind::Subspace => "subspace",
        BatchKind::Converge => "converge",
        BatchKind::Counterexample => "counterexample",
    };
    head.set("kind", kind);

    if batch.kind == BatchKind::Counterexample {
        return vec![counterexample_row(head, tol)];
    }
    let spec = batch.instance.as_ref().expect("validated config has an instance");
    let inst = match gen_instance(spec, seed) {
        Ok(inst) => inst,
        Err(e) => return vec![failed(head, e.to_string())],
    };
    head.set("attempts", inst.attempts);
    head.set("dim", inst.pair.dim());
    head.set("phi_norm_sq", inst.pair.phi_norm_sq());
    match batch.kind {
        BatchKind::Theorem => vec![theorem_row(head, &inst, tol, quadrature)],
        BatchKind::Subspace => vec![subspace_row(head, &inst, tol)],
        BatchKind::Converge => converge_rows(head, &inst, batch, tol),
        BatchKind::Counterexample => unreachable!(),
    }
}

fn failed(mut row: Row, message: String) -> Row {
    row.set("error", message);
    row.set("pass", false);
    row
}

fn theorem_row(mut row: Row, inst: &Instance, tol: &Tolerances, quadrature: bool) -> Row {
    match theorem_checks(&mut row, inst, tol, quadrature) {
        Ok(pass) => {
            row.set("pass", pass);
            row
        }
        Err(e) => failed(row, e.to_string()),
    }
}

fn theorem_checks(row: &mut Row, inst: &Instance, tol: &Tolerances, quadrature: bool) -> ssfdet::Result<bool> {
    let (pair, set) = (&inst.pair, &inst.set);
    let report = classify_boundary(pair, set, DEFAULT_ETA_MIN);
    row.set("classification", report.classification.as_str());
    row.set("gap_distance", report.gap_distance);
    row.set("index_trace", report.index());

    let t = pair.phi_norm_sq();
    let l1 = ssf_of_cyclic_part(pair)?.l1();
    row.set("ssf_l1", l1);
    let mut pass = row.check("ssf_l1", (l1 - t).abs(), tol.ssf_l1 * t.max(1.0));

    match report.classification {
        Classification::ThmMain | Classification::ThmXiOne => {
            let dets: Vec<f64> =
                DetMethod::ALL.iter().map(|&m| section_det(pair, set, m)).collect::<ssfdet::Result<_>>()?;
            row.set("det_direct", dets[0]);
            row.set("det_overlap", dets[1]);
            row.set("det_product", dets[2]);
            let spread = dets.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
                - dets.iter().fold(f64::INFINITY, |m, &x| m.min(x));
            pass &= row.check("methods", spread, tol.methods);

            let primal = dets[0];
            let dual = section_det_dual(pair, set, DetMethod::Direct)?;
            row.set("det_dual", dual);
            pass &= row.check("dual", (primal - dual).abs(), tol.dual);

            let dsq = diff_sq_det_projectors(pair.eig_a(), pair.eig_b(), set)?;
            row.set("diff_sq_det", dsq);
            pass &= row.check("diff_sq", (dsq - primal * dual).abs(), tol.diff_sq);

            let integral = if report.classification == Classification::ThmMain {
                xi_interaction(pair, set)?
            } else {
                xi_minus_one_interaction(pair, set)?
            };
            let nld = -primal.ln();
            row.set("neg_log_det", nld);
            row.set("integral_closed", integral.value);
            pass &= row.check("theorem", (nld - integral.value).abs(), tol.theorem * integral.value.abs().max(1.0));

            if quadrature && report.classification == Classification::ThmMain {
                let xi = ssf_of_cyclic_part(pair)?;
                let q = interaction_quadrature(&xi.inside(set), &xi.outside(set), 1e-10)?;
                row.set("integral_quadrature", q);
                let qtol = tol.quadrature_abs.max(tol.quadrature_rel * integral.value.abs());
                pass &= row.check("quadrature", (q - integral.value).abs(), qtol);
            }
        }
        Classification::TraceMismatch => {
            let primal = section_det(pair, set, DetMethod::Direct)?;
            let dual = section_det_dual(pair, set, DetMethod::Direct)?;
            row.set("det_direct", primal);
            row.set("det_dual", dual);
            row.set("diff_sq_det", diff_sq_det_projectors(pair.eig_a(), pair.eig_b(), set)?);
            let predicted = if report.index() > 0 { primal } else { dual };
            let ok = predicted <= tol.predicted;
            row.set("predicted_det", predicted);
            row.set("predicted_tol", tol.predicted);
            row.set("predicted_pass", ok);
            pass &= ok;
        }
        Classification::Invalid => {}
    }
    Ok(pass)
}

fn subspace_row(mut row: Row, inst: &Instance, tol: &Tolerances) -> Row {
    let r = match subspace_bound_check(&inst.pair, &inst.set) {
        Ok(r) => r,
        Err(e) => return failed(row, e.to_string()),
    };
    row.set("subspace_hypothesis", r.hypothesis_holds);
    row.set("subspace_delta", r.delta);
    row.set("subspace_bound", r.bound);
    let pass = if r.hypothesis_holds {
        row.set("subspace_norm", r.norm);
        row.set("kernel_primal", r.kernel_primal);
        row.set("kernel_bound", r.kernel_bound);
        row.set("kernel_distance", r.kernel_distance);
        let within = row.check("subspace", r.norm - r.bound, tol.subspace);
        within && r.below_one
    } else {
        true
    };
    row.set("pass", pass);
    row
}

fn converge_rows(head: Row, inst: &Instance, batch: &Batch, tol: &Tolerances) -> Vec<Row> {
    let delta = inst.set.boundary_distance(
        &inst.pair.eig_a().values.iter().chain(&inst.pair.eig_b().values).copied().collect::<Vec<_>>(),
    );
    let study = match convergence_study(&inst.pair, &inst.set, &batch.grid, batch.epsilon_fraction * delta) {
        Ok(s) => s,
        Err(e) => return vec![failed(head, e.to_string())],
    };
    let dim = inst.pair.dim();
    let mut rows = Vec::with_capacity(study.rows.len());
    let mut prev: Option<f64> = None;
    for r in &study.rows {
        let mut row = Row(head.0.clone());
        row.set("classification", r.classification.as_str());
        row.set("conv_m", r.m);
        row.set("conv_eta", study.eta);
        row.set("conv_gap_inclusion", r.gap_inclusion);
        row.set("conv_gap_persist", r.gap_persist);
        row.set("conv_m0", study.m0);
        row.set("det_direct", r.det);
        row.set("integral_closed", r.integral);
        row.set("conv_det_residual", r.det_residual);
        row.set("conv_integral_residual", r.integral_residual);
        let residual = r.det_residual.max(r.integral_residual.unwrap_or(f64::INFINITY));
        let bound = if r.m == dim {
            Some(tol.converge_final)
        } else {
            prev.map(|p| (1.0 + tol.converge_slack) * p + tol.converge_floor)
        };
        let step_ok = bound.is_none_or(|b| residual <= b);
        let persist_ok = study.m0.is_some_and(|m0| r.m < m0 || r.gap_persist);
        row.set("conv_tol", bound);
        row.set("conv_pass", step_ok);
        row.set("pass", step_ok && persist_ok && r.gap_inclusion);
        prev = Some(residual);
        rows.push(row);
    }
    rows
}

/// `A = diag(0, 3)`, `B = A + 1`, `I = [-1, 2]`: the determinant of
/// `1 - (1_I(A) - 1_I(B))²` is `1` while the `ξ` interaction is `ln(9/8)`.
pub fn counterexample_pair() -> (HermitianMatrix, HermitianMatrix, IntervalSet) {
    let a = HermitianMatrix::from_real_diag(&[0.0, 3.0]).expect("valid");
    let b = HermitianMatrix::from_real_diag(&[1.0, 4.0]).expect("valid");
    (a, b, IntervalSet::single(-1.0, 2.0).expect("valid"))
}

fn counterexample_row(mut row: Row, tol: &Tolerances) -> Row {
    let result = (|| -> ssfdet::Result<(f64, f64)> {
        let (a, b, set) = counterexample_pair();
        let (ea, eb) = (a.eig()?, b.eig()?);
        let det = diff_sq_det_projectors(&ea, &eb, &set)?;
        let xi = ssf_from_counts(&ea.values, &eb.values)?;
        Ok((det, interaction_closed(&xi.inside(&set), &xi.outside(&set)).value))
    })();
    let (det, integral) = match result {
        Ok(v) => v,
        Err(e) => return failed(row, e.to_string()),
    };
    row.set("dim", 2usize);
    row.set("diff_sq_det", det);
    row.set("neg_log_det", -det.ln());
    row.set("integral_closed", integral);
    row.set("reference_integral", (9.0f64 / 8.0).ln());
    let det_ok = row.check("diff_sq", (det - 1.0).abs(), tol.counterexample_det);
    let int_ok = row.check("reference", (integral - (9.0f64 / 8.0).ln()).abs(), tol.counterexample_integral);
    row.check("theorem", (-det.ln() - integral).abs(), tol.theorem);
    row.set("expected_mismatch", true);
    row.set("pass", det_ok && int_ok);
    row
}
