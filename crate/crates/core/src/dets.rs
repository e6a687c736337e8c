//! Section determinants `det(1 - 1_I(A) 1_{I^c}(B) 1_I(A))`, their duals, and
//! the closed forms they reduce to for rank-one pairs.

use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::linalg::{
    determinant, eig_hermitian, inner, spectral_projector, CMatrix, EigenSystem, HermitianMatrix, C64,
    DEFAULT_GUARD,
};
use crate::pair::RankOnePair;

/// How to fill the overlap matrix `⟨φ_j, ψ_k⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlapRoute {
    /// Inner products of computed eigenvectors.
    Direct,
    /// `⟨φ_j, φ⟩⟨φ, ψ_k⟩ / (b_k - a_j)`, from the eigenvalue equation of `B`.
    EigenvalueEquation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    pub entries: CMatrix,
    pub route: OverlapRoute,
}

impl OverlapMatrix {
    pub fn det(&self) -> C64 {
        determinant(&self.entries)
    }

    /// `|det O|²`, invariant under eigenvector rephasing.
    pub fn det_abs_sq(&self) -> f64 {
        self.det().norm_sqr()
    }
}

/// `O[j][k] = ⟨φ_{ja[j]}, ψ_{jb[k]}⟩`.
pub fn overlap_matrix(pair: &RankOnePair, ja: &[usize], jb: &[usize], route: OverlapRoute) -> Result<OverlapMatrix> {
    let ea = pair.eig_a();
    let eb = pair.eig_b();
    let entries = match route {
        OverlapRoute::Direct => CMatrix::from_fn(ja.len(), jb.len(), |j, k| {
            inner(&ea.vector(ja[j]), &eb.vector(jb[k]))
        }),
        OverlapRoute::EigenvalueEquation => {
            let phi = pair.phi();
            for &j in ja {
                for &k in jb {
                    if eb.values[k] == ea.values[j] {
                        return Err(Error::CoincidentNodes { left: ea.values[j], right: eb.values[k] });
                    }
                }
            }
            let left: Vec<C64> = ja.iter().map(|&j| inner(&ea.vector(j), phi)).collect();
            let right: Vec<C64> = jb.iter().map(|&k| inner(phi, &eb.vector(k))).collect();
            CMatrix::from_fn(ja.len(), jb.len(), |j, k| {
                left[j] * right[k] / (eb.values[jb[k]] - ea.values[ja[j]])
            })
        }
    };
    Ok(OverlapMatrix { entries, route })
}

/// `|⟨φ_j, φ⟩|²` and `|⟨ψ_k, φ⟩|²` recovered from the two spectra alone.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueWeights {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// `w_A[j] = |b_j - a_j| Π_{l≠j} |b_l - a_j| / |a_l - a_j|`, and the same
/// with the roles of the spectra exchanged. Needs strict interlacing.
pub fn residue_weights(pair: &RankOnePair) -> Result<ResidueWeights> {
    let (a, b) = interlaced_spectra(pair)?;
    let weight = |x: &[f64], y: &[f64], j: usize| {
        let mut log = (y[j] - x[j]).abs().ln();
        for l in 0..x.len() {
            if l != j {
                log += (y[l] - x[j]).abs().ln() - (x[l] - x[j]).abs().ln();
            }
        }
        log.exp()
    };
    Ok(ResidueWeights {
        a: (0..a.len()).map(|j| weight(a, b, j)).collect(),
        b: (0..b.len()).map(|k| weight(b, a, k)).collect(),
    })
}

/// The same products without absolute values:
/// `(b_j - a_j) Π (b_l - a_j)/(a_l - a_j)` and `(a_k - b_k) Π (a_l - b_k)/(b_l - b_k)`.
/// The first is positive for interlacing spectra, the second negative, with
/// magnitudes equal to [`residue_weights`].
pub fn residue_weights_signed(pair: &RankOnePair) -> Result<ResidueWeights> {
    let (a, b) = interlaced_spectra(pair)?;
    let weight = |x: &[f64], y: &[f64], j: usize| {
        let mut w = y[j] - x[j];
        for l in 0..x.len() {
            if l != j {
                w *= (y[l] - x[j]) / (x[l] - x[j]);
            }
        }
        w
    };
    Ok(ResidueWeights {
        a: (0..a.len()).map(|j| weight(a, b, j)).collect(),
        b: (0..b.len()).map(|k| weight(b, a, k)).collect(),
    })
}

fn interlaced_spectra(pair: &RankOnePair) -> Result<(&[f64], &[f64])> {
    let report = pair.interlacing();
    if !report.strict {
        return Err(Error::InterlacingViolation { position: report.first_violation.unwrap_or(0) });
    }
    Ok((&pair.eig_a().values, &pair.eig_b().values))
}

/// `(sign, ln|det|)` of the Cauchy matrix `[1 / (b_k - a_j)]`, from
/// `Π_{i<j} (a_i - a_j)(b_j - b_i) / Π_{j,k} (b_k - a_j)`.
pub fn log_cauchy_det(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let n = a.len();
    let mut sign = 1.0;
    let mut log = 0.0;
    let mut acc = |x: f64, left: f64, right: f64, up: bool| -> Result<()> {
        if x == 0.0 {
            return Err(Error::CoincidentNodes { left, right });
        }
        sign *= x.signum();
        log += if up { x.abs().ln() } else { -x.abs().ln() };
        Ok(())
    };
    for i in 0..n {
        for j in i + 1..n {
            acc(a[i] - a[j], a[i], a[j], true)?;
            acc(b[j] - b[i], b[i], b[j], true)?;
        }
    }
    for &aj in a {
        for &bk in b {
            acc(bk - aj, aj, bk, false)?;
        }
    }
    Ok((sign, log))
}

pub fn cauchy_det_closed(a: &[f64], b: &[f64]) -> Result<f64> {
    let (sign, log) = log_cauchy_det(a, b)?;
    Ok(sign * log.exp())
}

/// Evaluation route for a section determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetMethod {
    /// Eigenvalues of `1_I(A) 1_{I^c}(B) 1_I(A)`.
    Direct,
    /// `|det ⟨φ_j, ψ_k⟩|²` over `j ∈ J_A`, `k ∈ J_B`.
    Overlap,
    /// Closed-form product over the spectra of the cyclic part.
    Product,
}

impl DetMethod {
    pub const ALL: [DetMethod; 3] = [DetMethod::Direct, DetMethod::Overlap, DetMethod::Product];

    pub fn as_str(&self) -> &'static str {
        match self {
            DetMethod::Direct => "direct",
            DetMethod::Overlap => "overlap",
            DetMethod::Product => "product",
        }
    }
}

/// Spectrum of `T = P Q P` where `P = 1_I(A)`, `Q = 1_{I^c}(B)` (or the dual
/// roles `P = 1_{I^c}(A)`, `Q = 1_I(B)`), and `det(1 - T)` from it.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectSection {
    pub value: f64,
    pub spectrum: Vec<f64>,
    /// How far the raw spectrum of `T` strays outside `[0, 1]`.
    pub clamp_deviation: f64,
}

pub fn direct_section(eig_a: &EigenSystem, eig_b: &EigenSystem, set: &IntervalSet, dual: bool) -> Result<DirectSection> {
    let pa = spectral_projector(eig_a, set, DEFAULT_GUARD)?;
    let pb = spectral_projector(eig_b, set, DEFAULT_GUARD)?;
    let (p, q) = if dual { (pa.complement(), pb) } else { (pa, pb.complement()) };
    let t = p.matrix.matmul(&q.matrix).matmul(&p.matrix);
    let spectrum = eig_hermitian(&HermitianMatrix::new(hermitian_part(&t))?)?.values;
    let mut clamp_deviation: f64 = 0.0;
    let mut log = 0.0;
    for &x in &spectrum {
        clamp_deviation = clamp_deviation.max(-x).max(x - 1.0);
        log += (1.0 - x.clamp(0.0, 1.0)).ln();
    }
    Ok(DirectSection { value: log.exp(), spectrum, clamp_deviation })
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(m.rows(), m.cols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// `det(1 - 1_I(A) 1_{I^c}(B) 1_I(A))`.
pub fn section_det(pair: &RankOnePair, set: &IntervalSet, method: DetMethod) -> Result<f64> {
    section(pair, set, method, false)
}

/// `det(1 - 1_{I^c}(A) 1_I(B) 1_{I^c}(A))`.
pub fn section_det_dual(pair: &RankOnePair, set: &IntervalSet, method: DetMethod) -> Result<f64> {
    section(pair, set, method, true)
}

fn section(pair: &RankOnePair, set: &IntervalSet, method: DetMethod, dual: bool) -> Result<f64> {
    check_guard(pair, set)?;
    match method {
        DetMethod::Direct => Ok(direct_section(pair.eig_a(), pair.eig_b(), set, dual)?.value),
        DetMethod::Overlap => {
            let (ja, jb) = section_indices(pair.eig_a(), pair.eig_b(), set, dual)?;
            Ok(overlap_matrix(pair, &ja, &jb, OverlapRoute::Direct)?.det_abs_sq())
        }
        DetMethod::Product => {
            // eigenvectors outside the cyclic space are shared by A and B
            // and drop out of every section determinant
            let Some(reduced) = pair.cyclic_part()? else {
                return Ok(1.0);
            };
            let (ja, jb) = section_indices(reduced.eig_a(), reduced.eig_b(), set, dual)?;
            Ok(product_formula(&reduced.eig_a().values, &reduced.eig_b().values, &ja, &jb)?.exp())
        }
    }
}

fn check_guard(pair: &RankOnePair, set: &IntervalSet) -> Result<()> {
    for e in set.boundary_points() {
        for &x in pair.eig_a().values.iter().chain(&pair.eig_b().values) {
            if (x - e).abs() <= DEFAULT_GUARD {
                return Err(Error::BoundaryCollision { eigenvalue: x, boundary: e });
            }
        }
    }
    Ok(())
}

fn section_indices(ea: &EigenSystem, eb: &EigenSystem, set: &IntervalSet, dual: bool) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut ja = ea.indices_in(set);
    let mut jb = eb.indices_in(set);
    if dual {
        ja = complement(&ja, ea.dim());
        jb = complement(&jb, eb.dim());
    }
    if ja.len() != jb.len() {
        return Err(Error::CardinalityMismatch { ja: ja.len(), jb: jb.len() });
    }
    Ok((ja, jb))
}

fn complement(idx: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|k| !idx.contains(k)).collect()
}

/// `ln |det ⟨φ_j, ψ_k⟩|²` over `j ∈ ja`, `k ∈ jb` for a cyclic pair, as
///
/// `Σ_{j ≤ N < k} ln( |b_{m_k} - a_{l_j}| |a_{l_k} - b_{m_j}|
///                 / (|a_{l_k} - a_{l_j}| |b_{m_k} - b_{m_j}|) )`
///
/// where `l` lists `ja` followed by the other indices and `m` does the same
/// for `jb`.
pub fn product_formula(a: &[f64], b: &[f64], ja: &[usize], jb: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    if ja.len() != jb.len() {
        return Err(Error::CardinalityMismatch { ja: ja.len(), jb: jb.len() });
    }
    let n = a.len();
    let rest = |idx: &[usize]| complement(idx, n);
    let la = rest(ja);
    let mb = rest(jb);
    let mut log = 0.0;
    for (&lj, &mj) in ja.iter().zip(jb) {
        for (&lk, &mk) in la.iter().zip(&mb) {
            log += (b[mk] - a[lj]).abs().ln() + (a[lk] - b[mj]).abs().ln()
                - (a[lk] - a[lj]).abs().ln()
                - (b[mk] - b[mj]).abs().ln();
        }
    }
    if log.is_nan() {
        return Err(Error::CoincidentNodes { left: f64::NAN, right: f64::NAN });
    }
    Ok(log)
}

/// `det(1 - (1_I(A) - 1_I(B))²)`, as the product of the primal and dual
/// section determinants.
pub fn diff_sq_det(pair: &RankOnePair, set: &IntervalSet) -> Result<f64> {
    Ok(section_det(pair, set, DetMethod::Direct)? * section_det_dual(pair, set, DetMethod::Direct)?)
}

/// `det(1 - D²)` with `D = 1_I(A) - 1_I(B)`, from the eigenvalues of `D`.
/// Works for any two Hermitian matrices.
pub fn diff_sq_det_projectors(eig_a: &EigenSystem, eig_b: &EigenSystem, set: &IntervalSet) -> Result<f64> {
    let pa = spectral_projector(eig_a, set, DEFAULT_GUARD)?;
    let pb = spectral_projector(eig_b, set, DEFAULT_GUARD)?;
    let d = HermitianMatrix::new(pa.matrix.sub(&pb.matrix))?;
    let log: f64 = eig_hermitian(&d)?
        .values
        .iter()
        .map(|x| (1.0 - (x * x).min(1.0)).ln())
        .sum();
    Ok(log.exp())
}

/// `tr(1_I(A) - 1_I(B)) = |J_A| - |J_B|`.
pub fn index_trace(pair: &RankOnePair, set: &IntervalSet) -> i64 {
    pair.eig_a().indices_in(set).len() as i64 - pair.eig_b().indices_in(set).len() as i64
}
