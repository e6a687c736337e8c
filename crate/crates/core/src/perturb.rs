//! Stability of spectral subspaces under the perturbation, and convergence of
//! determinants and integrals for truncated, spectrally filtered models.

use crate::dets::{section_det, DetMethod};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::linalg::{eig_hermitian, op_norm, spectral_projector, CMatrix, HermitianMatrix, C64, DEFAULT_GUARD};
use crate::pair::{classify_boundary, Classification, RankOnePair, DEFAULT_ETA_MIN};
use crate::ssf::xi_count;
use crate::xint::xi_interaction;

/// `Σ_δ = Σ + [0, δ]`.
pub fn enlarged_set(sigma: &IntervalSet, delta: f64) -> Result<IntervalSet> {
    if !(delta >= 0.0) {
        return Err(Error::OutOfRange { what: "delta", value: delta });
    }
    Ok(sigma.widened(0.0, delta))
}

/// `‖1_Σ(A) - 1_{Σ'}(B)‖`.
pub fn projector_diff_norm(pair: &RankOnePair, sigma: &IntervalSet, sigma_b: &IntervalSet) -> Result<f64> {
    let pa = spectral_projector(pair.eig_a(), sigma, DEFAULT_GUARD)?;
    let pb = spectral_projector(pair.eig_b(), sigma_b, DEFAULT_GUARD)?;
    Ok(op_norm(&pa.matrix.sub(&pb.matrix)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceReport {
    /// `{j : a_j ∈ Σ}`.
    pub indices: Vec<usize>,
    /// `dist(σ(A) ∩ Σ, σ(A) \ Σ)`; `+∞` if `Σ` holds every eigenvalue.
    pub delta: f64,
    pub phi_norm_sq: f64,
    /// `‖φ‖² < δ` and `σ(A) ∩ Σ` nonempty.
    pub hypothesis_holds: bool,
    /// `‖1_Σ(A) - 1_{Σ_δ}(B)‖`.
    pub norm: f64,
    /// `‖φ‖² / δ`.
    pub bound: f64,
    pub below_one: bool,
    pub below_bound: bool,
    /// `‖P Q^c P‖` with `P = 1_Σ(A)`, `Q = 1_{Σ_δ}(B)`.
    pub kernel_primal: f64,
    /// `‖P^c Q P^c‖`.
    pub kernel_dual: f64,
    /// `‖φ‖⁴ / δ²`.
    pub kernel_bound: f64,
    /// Distance from `σ(A) ∩ Σ` to the eigenvalues of `B` outside `Σ_δ`.
    pub kernel_distance: f64,
}

/// Checks `‖1_Σ(A) - 1_{Σ_δ}(B)‖ ≤ ‖φ‖² / δ < 1` for a set `Σ` meeting
/// `σ(A)`.
///
/// Only the eigenvalues of `A` inside `Σ` matter. Both projectors are taken
/// on widened copies of `Σ_δ` whose boundaries keep away from the relevant
/// spectrum, which leaves the projectors unchanged while avoiding rank
/// decisions at eigenvalues that sit on `∂Σ`.
pub fn subspace_bound_check(pair: &RankOnePair, sigma: &IntervalSet) -> Result<SubspaceReport> {
    if !sigma.is_bounded() {
        return Err(Error::UnboundedSet);
    }
    let a = &pair.eig_a().values;
    let b = &pair.eig_b().values;
    let indices = pair.eig_a().indices_in(sigma);
    let inside: Vec<f64> = indices.iter().map(|&j| a[j]).collect();
    let outside: Vec<f64> = (0..a.len()).filter(|j| !indices.contains(j)).map(|j| a[j]).collect();
    let delta = inside
        .iter()
        .flat_map(|x| outside.iter().map(move |y| (x - y).abs()))
        .fold(f64::INFINITY, f64::min);
    let t = pair.phi_norm_sq();
    let hypothesis_holds = !inside.is_empty() && t < delta;

    let points: Vec<(f64, f64)> = inside.iter().map(|&x| (x, x)).collect();
    let core = IntervalSet::normalized(&points)?;
    let (norm, kernel_primal, kernel_dual, kernel_distance) = if hypothesis_holds && delta.is_finite() {
        let set_a = core.widened(delta / 2.0, delta / 2.0);
        let set_b = core.widened((delta - t) / 2.0, (delta + t) / 2.0);
        let pa = spectral_projector(pair.eig_a(), &set_a, DEFAULT_GUARD)?;
        let pb = spectral_projector(pair.eig_b(), &set_b, DEFAULT_GUARD)?;
        let norm = op_norm(&pa.matrix.sub(&pb.matrix));
        let qc = pb.complement();
        let primal = op_norm(&pa.matrix.matmul(&qc.matrix).matmul(&pa.matrix));
        let pc = pa.complement();
        let dual = op_norm(&pc.matrix.matmul(&pb.matrix).matmul(&pc.matrix));
        let distance = inside
            .iter()
            .flat_map(|x| b.iter().filter(|y| !set_b.contains(**y)).map(move |y| (x - y).abs()))
            .fold(f64::INFINITY, f64::min);
        (norm, primal, dual, distance)
    } else {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    };
    let bound = t / delta;
    Ok(SubspaceReport {
        indices,
        delta,
        phi_norm_sq: t,
        hypothesis_holds,
        norm,
        bound,
        below_one: norm < 1.0,
        below_bound: norm <= bound + 1e-9,
        kernel_primal,
        kernel_dual,
        kernel_bound: bound * bound,
        kernel_distance,
    })
}

/// Parameters of a truncated and filtered model: keep the leading `m`
/// coordinates in `basis`, and discard eigenvalues farther than `epsilon`
/// from `σ(A)`. `eta = delta - epsilon` is the gap the boundary of `I` keeps
/// from the model spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxScheme {
    /// Unitary change of basis; `None` means the standard basis.
    pub basis: Option<CMatrix>,
    pub m: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
}

impl ApproxScheme {
    /// `delta` is the distance from the finite points of `∂I` to
    /// `σ(A) ∪ σ(B)`; `epsilon` must lie in `(0, delta / 2)`.
    pub fn new(pair: &RankOnePair, set: &IntervalSet, m: usize, epsilon: f64) -> Result<Self> {
        if m == 0 || m > pair.dim() {
            return Err(Error::OutOfRange { what: "truncation size", value: m as f64 });
        }
        let spectrum: Vec<f64> = pair.eig_a().values.iter().chain(&pair.eig_b().values).copied().collect();
        let delta = set.boundary_distance(&spectrum);
        if !(epsilon > 0.0 && epsilon < delta / 2.0) {
            return Err(Error::OutOfRange { what: "epsilon", value: epsilon });
        }
        Ok(ApproxScheme { basis: None, m, epsilon, delta, eta: delta - epsilon })
    }

    pub fn with_basis(mut self, basis: CMatrix) -> Self {
        self.basis = Some(basis);
        self
    }
}

/// `(A_M, φ_M)`: the leading `M×M` block of `U* A U` with every eigenvalue
/// farther than `ε` from `σ(A)` replaced by the eigenvalue of `A` nearest `0`,
/// and the leading `M` coordinates of `U* φ`.
pub fn truncate_filter(pair: &RankOnePair, scheme: &ApproxScheme) -> Result<RankOnePair> {
    let m = scheme.m;
    let (a_rot, phi_rot) = match &scheme.basis {
        None => (pair.a().matrix().clone(), pair.phi().to_vec()),
        Some(u) => {
            let uh = u.adjoint();
            (uh.matmul(pair.a().matrix()).matmul(u), uh.mat_vec(pair.phi()))
        }
    };
    let block = HermitianMatrix::new(a_rot.leading_block(m, m))?;
    let phi_m = phi_rot[..m].to_vec();

    let sigma_a = &pair.eig_a().values;
    let anchor = sigma_a
        .iter()
        .copied()
        .min_by(|x, y| x.abs().total_cmp(&y.abs()))
        .expect("nonempty spectrum");
    let eig = eig_hermitian(&block)?;
    let far: Vec<usize> = (0..m)
        .filter(|&k| sigma_a.iter().all(|&s| (eig.values[k] - s).abs() > scheme.epsilon))
        .collect();
    let a_m = if far.is_empty() {
        block
    } else {
        let mut mat = block.into_matrix();
        for &k in &far {
            let v = eig.vector(k);
            mat = mat.add(&CMatrix::outer(&v, &v).scale(C64::new(anchor - eig.values[k], 0.0)));
        }
        HermitianMatrix::new(mat)?
    };
    RankOnePair::new(a_m, phi_m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub m: usize,
    pub det: f64,
    /// `None` when the truncated model does not satisfy the theorem hypotheses.
    pub integral: Option<f64>,
    pub det_residual: f64,
    pub integral_residual: Option<f64>,
    /// `dist(∂I, σ(A_M)) ≥ η`.
    pub gap_inclusion: bool,
    /// No eigenvalue of `A_M` or `B_M` in `[E, E + η)` and `ξ_M(E) = 0`, for
    /// every finite boundary point `E`.
    pub gap_persist: bool,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub reference_det: f64,
    pub reference_integral: f64,
    pub eta: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Smallest grid size from which every row keeps the gap.
    pub m0: Option<usize>,
}

/// Determinants and integrals of truncated models over a grid of sizes,
/// against the full pair.
pub fn convergence_study(pair: &RankOnePair, set: &IntervalSet, grid: &[usize], epsilon: f64) -> Result<ConvergenceStudy> {
    let report = classify_boundary(pair, set, DEFAULT_ETA_MIN);
    if report.classification != Classification::ThmMain {
        return Err(Error::ClassificationMismatch {
            expected: Classification::ThmMain.to_string(),
            found: report.classification.to_string(),
        });
    }
    let reference_det = section_det(pair, set, DetMethod::Direct)?;
    let reference_integral = xi_interaction(pair, set)?.value;
    let mut eta = f64::NAN;
    let mut rows = Vec::with_capacity(grid.len());
    for &m in grid {
        let scheme = ApproxScheme::new(pair, set, m, epsilon)?;
        eta = scheme.eta;
        let model = truncate_filter(pair, &scheme)?;
        rows.push(study_row(&model, set, &scheme, reference_det, reference_integral));
    }
    let mut m0 = None;
    for row in rows.iter().rev() {
        if !row.gap_persist {
            break;
        }
        m0 = Some(row.m);
    }
    Ok(ConvergenceStudy { reference_det, reference_integral, eta, rows, m0 })
}

fn study_row(model: &RankOnePair, set: &IntervalSet, scheme: &ApproxScheme, det_ref: f64, int_ref: f64) -> ConvergenceRow {
    let a = &model.eig_a().values;
    let b = &model.eig_b().values;
    let boundary = set.boundary_points();
    let gap_inclusion = set.boundary_distance(a) >= scheme.eta - 1e-9;
    let gap_persist = boundary.iter().all(|&e| {
        let clear = a.iter().chain(b).all(|&x| !(e <= x && x < e + scheme.eta));
        clear && xi_count(a, b, e) == 0
    });
    let classification = classify_boundary(model, set, DEFAULT_ETA_MIN).classification;
    let det = section_det(model, set, DetMethod::Direct).unwrap_or(f64::NAN);
    let integral = match classification {
        Classification::ThmMain => xi_interaction(model, set).ok().map(|r| r.value),
        _ => None,
    };
    ConvergenceRow {
        m: scheme.m,
        det,
        integral,
        det_residual: (det - det_ref).abs(),
        integral_residual: integral.map(|v| (v - int_ref).abs()),
        gap_inclusion,
        gap_persist,
        classification,
    }
}

/// `r_{i+1} ≤ slack · r_i + floor` along the sequence.
pub fn nonincreasing_within(residuals: &[f64], slack: f64, floor: f64) -> bool {
    residuals.windows(2).all(|w| w[1] <= slack * w[0] + floor)
}

/// Jacobi matrix with diagonal `±1` by parity plus `noise`-scaled
/// perturbations, and off-diagonal `hop` plus perturbations. `draws` supplies
/// values in `[-1, 1]`, consumed diagonal first.
pub fn jacobi_surrogate(dim: usize, hop: f64, noise: f64, mut draws: impl FnMut() -> f64) -> Result<HermitianMatrix> {
    let diag: Vec<f64> = (0..dim)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } + noise * draws())
        .collect();
    let off: Vec<f64> = (0..dim.saturating_sub(1)).map(|_| hop + noise * draws()).collect();
    HermitianMatrix::tridiagonal(&diag, &off)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn golden() -> RankOnePair {
        let h = 0.5f64.sqrt();
        RankOnePair::from_real(&[vec![0.0, 0.0], vec![0.0, 2.0]], &[h, h]).unwrap()
    }

    #[test]
    fn enlarged_set_merges() {
        let s = IntervalSet::new(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_eq!(enlarged_set(&s, 1.5).unwrap(), IntervalSet::single(0.0, 2.5).unwrap());
        assert_eq!(enlarged_set(&s, 0.5).unwrap().intervals().len(), 2);
        assert!(enlarged_set(&s, -1.0).is_err());
    }

    #[test]
    fn golden_projector_difference() {
        let p = golden();
        let sigma = IntervalSet::single(-0.5, 0.5).unwrap();
        let sigma_d = enlarged_set(&sigma, 1.5).unwrap();
        let n = projector_diff_norm(&p, &sigma, &sigma_d).unwrap();
        let expected = (1.0 - 0.947_213_595_499_958f64).sqrt();
        assert_abs_diff_eq!(n, expected, epsilon = 1e-10);
        assert!(n < 0.5);
    }

    #[test]
    fn golden_subspace_report() {
        let p = golden();
        let r = subspace_bound_check(&p, &IntervalSet::single(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(r.indices, vec![0]);
        assert_eq!(r.delta, 2.0);
        assert!(r.hypothesis_holds && r.below_one && r.below_bound);
        assert_abs_diff_eq!(r.bound, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.norm, (1.0 - 0.947_213_595_499_958f64).sqrt(), epsilon = 1e-10);
        assert!(r.kernel_primal <= r.kernel_bound + 1e-12);
    }

    #[test]
    fn hypothesis_violation_is_flagged() {
        let p = RankOnePair::from_real(&[vec![0.0, 0.0], vec![0.0, 1.0]], &[1.0, 1.0]).unwrap();
        let r = subspace_bound_check(&p, &IntervalSet::single(0.0, 0.0).unwrap()).unwrap();
        assert!(!r.hypothesis_holds);
        assert!(r.norm.is_nan());
    }

    #[test]
    fn full_truncation_is_exact() {
        let p = golden();
        let i = IntervalSet::single(-1.0, 1.0).unwrap();
        let scheme = ApproxScheme::new(&p, &i, 2, 0.1).unwrap();
        let model = truncate_filter(&p, &scheme).unwrap();
        assert_eq!(model.a(), p.a());
        assert_eq!(model.phi(), p.phi());
        assert!(ApproxScheme::new(&p, &i, 2, 0.5).is_err());
        assert!(ApproxScheme::new(&p, &i, 3, 0.1).is_err());
    }

    #[test]
    fn filter_replaces_stray_eigenvalues() {
        // leading 2x2 block has eigenvalues 0.5 ± 0.5·sqrt(2), far from {0, 1, 3}
        let rows = vec![vec![0.5, 0.5, 0.0], vec![0.5, 0.5, 0.0], vec![0.0, 0.0, 3.0]];
        let a = HermitianMatrix::from_real_rows(&rows).unwrap();
        let p = RankOnePair::new(a, vec![C64::new(0.1, 0.0); 3]).unwrap();
        let i = IntervalSet::single(-0.5, 0.5).unwrap();
        let scheme = ApproxScheme::new(&p, &i, 2, 0.05).unwrap();
        let model = truncate_filter(&p, &scheme).unwrap();
        for &x in &model.eig_a().values {
            assert!(p.eig_a().values.iter().any(|s| (s - x).abs() <= 0.05 + 1e-12), "{x}");
        }
    }

    #[test]
    fn monotonicity_helper() {
        assert!(nonincreasing_within(&[1.0, 0.5, 0.52, 0.0], 1.1, 0.0));
        assert!(!nonincreasing_within(&[1.0, 0.5, 0.6], 1.1, 0.0));
        assert!(nonincreasing_within(&[0.0, 1e-13], 1.1, 1e-12));
    }
}
