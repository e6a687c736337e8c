//! The pair `(A, B = A + φφ*)`: construction, cyclic reduction, interlacing,
//! and classification of a candidate set `I` against the theorem hypotheses.

use std::fmt;

use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::linalg::{eig_hermitian, inner, vec_norm, CMatrix, EigenSystem, HermitianMatrix, C64};
use crate::ssf::xi_count;

/// Relative Lanczos breakdown threshold, scaled by `‖A‖`.
pub const LANCZOS_BREAKDOWN: f64 = 1e-10;
/// Relative weight `|⟨v_k, φ⟩|² / ‖φ‖²` below which an eigenvector of `A`
/// counts as numerically untouched by the perturbation.
pub const WEIGHT_DEFLATION: f64 = 1e-14;
/// Default minimum distance between `∂I` and the spectra of `A` and `B`.
pub const DEFAULT_ETA_MIN: f64 = 1e-8;

/// A Hermitian matrix together with its positive rank-one perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOnePair {
    a: HermitianMatrix,
    phi: Vec<C64>,
    b: HermitianMatrix,
    eig_a: EigenSystem,
    eig_b: EigenSystem,
}

impl RankOnePair {
    pub fn new(a: HermitianMatrix, phi: Vec<C64>) -> Result<Self> {
        let b = a.plus_rank_one(&phi)?;
        let eig_a = eig_hermitian(&a)?;
        let eig_b = eig_hermitian(&b)?;
        Ok(RankOnePair { a, phi, b, eig_a, eig_b })
    }

    /// Convenience constructor for real data.
    pub fn from_real(a_rows: &[Vec<f64>], phi: &[f64]) -> Result<Self> {
        let a = HermitianMatrix::from_real_rows(a_rows)?;
        Self::new(a, phi.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &HermitianMatrix {
        &self.a
    }

    pub fn b(&self) -> &HermitianMatrix {
        &self.b
    }

    pub fn phi(&self) -> &[C64] {
        &self.phi
    }

    pub fn eig_a(&self) -> &EigenSystem {
        &self.eig_a
    }

    pub fn eig_b(&self) -> &EigenSystem {
        &self.eig_b
    }

    /// `‖φ‖² = tr(B - A)`
    pub fn phi_norm_sq(&self) -> f64 {
        self.phi.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_unperturbed(&self) -> bool {
        self.phi.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    pub fn interlacing(&self) -> InterlacingReport {
        interlacing_report(self)
    }

    /// The pair restricted to the cyclic subspace of `φ`.
    ///
    /// Returns `None` for `φ = 0`. A pair that already interlaces strictly is
    /// returned unchanged; otherwise it is reduced by [`lanczos_deflate`].
    /// If the Krylov space is numerically smaller than Lanczos can detect
    /// (localized eigenvectors with vanishing overlap), eigen-directions with
    /// relative weight below [`WEIGHT_DEFLATION`] are dropped as well.
    pub fn cyclic_part(&self) -> Result<Option<RankOnePair>> {
        if self.is_unperturbed() {
            return Ok(None);
        }
        let report = self.interlacing();
        if report.strict {
            return Ok(Some(self.clone()));
        }
        let tol = LANCZOS_BREAKDOWN * self.eig_a.spectral_radius();
        let deflated = lanczos_deflate(&self.a, &self.phi, Some(tol))?;
        let mut phi = vec![C64::new(0.0, 0.0); deflated.tridiagonal.dim()];
        phi[0] = C64::new(deflated.e1_scale, 0.0);
        let mut reduced = RankOnePair::new(deflated.tridiagonal, phi)?;
        if !reduced.interlacing().strict {
            reduced = reduced.weight_deflated(WEIGHT_DEFLATION)?;
        }
        let check = reduced.interlacing();
        if !check.strict {
            return Err(Error::InterlacingViolation { position: check.first_violation.unwrap_or(0) });
        }
        Ok(Some(reduced))
    }

    /// `(diag(a_k), (|⟨v_k, φ⟩|)_k)` over the eigenvectors of `A` whose
    /// relative weight exceeds `rel_tol`.
    fn weight_deflated(&self, rel_tol: f64) -> Result<RankOnePair> {
        let total = self.phi_norm_sq();
        let (diag, weights): (Vec<f64>, Vec<C64>) = (0..self.dim())
            .filter_map(|k| {
                let w = inner(&self.eig_a.vector(k), &self.phi).norm();
                (w * w > rel_tol * total).then_some((self.eig_a.values[k], C64::new(w, 0.0)))
            })
            .unzip();
        RankOnePair::new(HermitianMatrix::from_real_diag(&diag)?, weights)
    }

    /// Copy with eigenvector columns multiplied by `exp(iθ)`. Every
    /// determinant of overlaps must be blind to this.
    pub fn rephased(&self, phases_a: &[f64], phases_b: &[f64]) -> RankOnePair {
        let rephase = |e: &EigenSystem, phases: &[f64]| {
            let n = e.dim();
            let vectors = CMatrix::from_fn(n, n, |i, k| e.vectors[(i, k)] * C64::from_polar(1.0, phases[k]));
            EigenSystem { values: e.values.clone(), vectors }
        };
        RankOnePair {
            a: self.a.clone(),
            phi: self.phi.clone(),
            b: self.b.clone(),
            eig_a: rephase(&self.eig_a, phases_a),
            eig_b: rephase(&self.eig_b, phases_b),
        }
    }
}

pub fn make_pair(a: HermitianMatrix, phi: Vec<C64>) -> Result<RankOnePair> {
    RankOnePair::new(a, phi)
}

/// Jacobi matrix of `A` on the Krylov space of `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deflation {
    pub tridiagonal: HermitianMatrix,
    /// `‖φ‖`; `φ` corresponds to `e1_scale · e_1` in the new basis.
    pub e1_scale: f64,
}

/// Lanczos tridiagonalization with full reorthogonalization, stopped at the
/// first off-diagonal coefficient `≤ tol` (default `1e-10 · ‖A‖`).
pub fn lanczos_deflate(a: &HermitianMatrix, phi: &[C64], tol: Option<f64>) -> Result<Deflation> {
    let n = a.dim();
    if phi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: phi.len() });
    }
    let norm = vec_norm(phi);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let tol = match tol {
        Some(t) => t,
        None => LANCZOS_BREAKDOWN * eig_hermitian(a)?.spectral_radius(),
    };

    let mut basis: Vec<Vec<C64>> = vec![phi.iter().map(|z| z / norm).collect()];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    loop {
        let j = basis.len() - 1;
        let mut w = a.matrix().mat_vec(&basis[j]);
        let aj = inner(&basis[j], &w).re;
        alpha.push(aj);
        for (wi, qi) in w.iter_mut().zip(&basis[j]) {
            *wi -= qi * aj;
        }
        if j > 0 {
            let bj = beta[j - 1];
            for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= qi * bj;
            }
        }
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= qi * c;
                }
            }
        }
        let b = vec_norm(&w);
        if basis.len() == n || b <= tol {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
    Ok(Deflation { tridiagonal: HermitianMatrix::tridiagonal(&alpha, &beta)?, e1_scale: norm })
}

/// Result of checking `a_1 < b_1 < a_2 < … < a_M < b_M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterlacingReport {
    pub strict: bool,
    /// Smallest consecutive gap in the merged sequence; zero on violation.
    pub margin: f64,
    /// Position in the merged sequence `a_1, b_1, a_2, …` of the first
    /// non-increasing step.
    pub first_violation: Option<usize>,
}

pub fn interlacing_report(pair: &RankOnePair) -> InterlacingReport {
    let a = &pair.eig_a.values;
    let b = &pair.eig_b.values;
    let merged: Vec<f64> = a.iter().zip(b).flat_map(|(&x, &y)| [x, y]).collect();
    let mut margin = f64::INFINITY;
    for (pos, w) in merged.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if !(gap > 0.0) {
            return InterlacingReport { strict: false, margin: 0.0, first_violation: Some(pos + 1) };
        }
        margin = margin.min(gap);
    }
    InterlacingReport { strict: true, margin, first_violation: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// Gap condition holds and `ξ = 0` on all of `∂I`.
    ThmMain,
    /// Gap condition holds and `ξ = 1` on all of `∂I`.
    ThmXiOne,
    /// Gap condition holds and `tr(1_I(A) - 1_I(B)) ≠ 0`.
    TraceMismatch,
    /// Boundary too close to a spectrum, or mixed boundary values with zero index.
    Invalid,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::ThmMain => "thm_main",
            Classification::ThmXiOne => "thm_xi_one",
            Classification::TraceMismatch => "trace_mismatch",
            Classification::Invalid => "invalid",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    /// Distance from the finite points of `∂I` to `σ(A) ∪ σ(B)`.
    pub gap_distance: f64,
    /// `ξ` at each finite boundary point, in increasing order.
    pub xi_on_boundary: Vec<i64>,
    /// `{j : a_j ∈ I}`, zero-based.
    pub ja: Vec<usize>,
    /// `{k : b_k ∈ I}`, zero-based.
    pub jb: Vec<usize>,
    pub classification: Classification,
}

impl BoundaryReport {
    pub fn index(&self) -> i64 {
        self.ja.len() as i64 - self.jb.len() as i64
    }
}

pub fn classify_boundary(pair: &RankOnePair, set: &IntervalSet, eta_min: f64) -> BoundaryReport {
    let a = &pair.eig_a.values;
    let b = &pair.eig_b.values;
    let spectrum: Vec<f64> = a.iter().chain(b).copied().collect();
    let gap_distance = set.boundary_distance(&spectrum);
    let xi_on_boundary: Vec<i64> = set.boundary_points().iter().map(|&e| xi_count(a, b, e)).collect();
    let ja = pair.eig_a.indices_in(set);
    let jb = pair.eig_b.indices_in(set);

    let classification = if !(gap_distance > eta_min) {
        Classification::Invalid
    } else if ja.len() != jb.len() {
        Classification::TraceMismatch
    } else if xi_on_boundary.iter().all(|&x| x == 0) {
        Classification::ThmMain
    } else if xi_on_boundary.iter().all(|&x| x == 1) {
        Classification::ThmXiOne
    } else {
        Classification::Invalid
    };
    BoundaryReport { gap_distance, xi_on_boundary, ja, jb, classification }
}
