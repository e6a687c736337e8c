//! The spectral shift function of a rank-one pair and the trace formula it
//! satisfies.

use crate::error::{Error, Result};
use crate::interval::{IntervalSet, Segment};
use crate::linalg::{eig_hermitian, inner, CMatrix, HermitianMatrix, C64};
use crate::pair::RankOnePair;
use crate::quadrature::gauss_legendre;

/// `ξ(E) = #{a_j < E} - #{b_k < E}`.
///
/// Valid for any two spectra of equal size; equals the spectral shift
/// function wherever it is evaluated away from both spectra.
pub fn xi_count(a: &[f64], b: &[f64], e: f64) -> i64 {
    let below = |v: &[f64]| v.iter().filter(|&&x| x < e).count() as i64;
    below(a) - below(b)
}

/// A `{0, 1}`-valued step function `Σ 1_{(lo_n, hi_n]}` with disjoint,
/// increasing pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepFunction {
    pieces: Vec<Segment>,
}

impl StepFunction {
    pub fn empty() -> Self {
        StepFunction { pieces: Vec::new() }
    }

    /// Pieces must be nonempty, increasing and non-overlapping; touching
    /// pieces are merged.
    pub fn from_pieces(pieces: Vec<Segment>) -> Result<Self> {
        let mut out: Vec<Segment> = Vec::with_capacity(pieces.len());
        for p in pieces {
            if p.is_empty() {
                continue;
            }
            match out.last_mut() {
                Some(last) if p.lo < last.hi => {
                    return Err(Error::InvalidIntervals(format!(
                        "step pieces overlap: ({}, {}] and ({}, {}]",
                        last.lo, last.hi, p.lo, p.hi
                    )))
                }
                Some(last) if p.lo == last.hi => last.hi = p.hi,
                _ => out.push(p),
            }
        }
        Ok(StepFunction { pieces: out })
    }

    pub fn pieces(&self) -> &[Segment] {
        &self.pieces
    }

    pub fn eval(&self, e: f64) -> u8 {
        self.pieces.iter().any(|p| p.lo < e && e <= p.hi) as u8
    }

    /// `∫ ξ`.
    pub fn l1(&self) -> f64 {
        self.pieces.iter().map(Segment::len).sum()
    }

    /// Pieces of `ξ · 1_I`.
    pub fn inside(&self, set: &IntervalSet) -> Vec<Segment> {
        self.pieces.iter().flat_map(|&p| set.clip(p)).collect()
    }

    /// Pieces of `ξ · 1_{I^c}`.
    pub fn outside(&self, set: &IntervalSet) -> Vec<Segment> {
        self.pieces.iter().flat_map(|&p| set.clip_complement(p)).collect()
    }
}

/// `ξ = Σ_n 1_{(a_n, b_n]}` for a pair with strictly interlacing spectra.
///
/// A pair with `φ = 0` has `ξ ≡ 0`. Otherwise interlacing must hold; use
/// [`ssf_of_cyclic_part`] for pairs where `φ` is not cyclic.
pub fn ssf_of_pair(pair: &RankOnePair) -> Result<StepFunction> {
    if pair.is_unperturbed() {
        return Ok(StepFunction::empty());
    }
    let report = pair.interlacing();
    if !report.strict {
        return Err(Error::InterlacingViolation { position: report.first_violation.unwrap_or(0) });
    }
    let a = &pair.eig_a().values;
    let b = &pair.eig_b().values;
    StepFunction::from_pieces(a.iter().zip(b).map(|(&lo, &hi)| Segment::new(lo, hi)).collect())
}

/// `ξ` computed on the cyclic subspace of `φ`, which carries all of it.
pub fn ssf_of_cyclic_part(pair: &RankOnePair) -> Result<StepFunction> {
    match pair.cyclic_part()? {
        None => Ok(StepFunction::empty()),
        Some(reduced) => ssf_of_pair(&reduced),
    }
}

/// `ξ` of an arbitrary pair of equal-size spectra via [`xi_count`].
///
/// Fails if the count leaves `{0, 1}` anywhere.
pub fn ssf_from_counts(a: &[f64], b: &[f64]) -> Result<StepFunction> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let mut nodes: Vec<f64> = a.iter().chain(b).copied().collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let mut pieces = Vec::new();
    for w in nodes.windows(2) {
        match xi_count(a, b, 0.5 * (w[0] + w[1])) {
            0 => {}
            1 => pieces.push(Segment::new(w[0], w[1])),
            v => return Err(Error::OutOfRange { what: "spectral shift value", value: v as f64 }),
        }
    }
    StepFunction::from_pieces(pieces)
}

pub fn ssf_eval(xi: &StepFunction, e: f64) -> u8 {
    xi.eval(e)
}

pub fn ssf_l1(xi: &StepFunction) -> f64 {
    xi.l1()
}

/// `arg(1 + ⟨φ, (A - E - iε)^{-1} φ⟩) / π` with the argument in `[0, 2π)`.
/// Tends to `ξ(E)` as `ε → 0` for `E` off both spectra.
pub fn ssf_resolvent(pair: &RankOnePair, e: f64, eps: f64) -> f64 {
    let eig = pair.eig_a();
    let z = C64::new(e, eps);
    let mut f = C64::new(1.0, 0.0);
    for k in 0..eig.dim() {
        let w = inner(&eig.vector(k), pair.phi()).norm_sqr();
        f += w / (C64::new(eig.values[k], 0.0) - z);
    }
    let mut arg = f.arg();
    if arg < 0.0 {
        arg += 2.0 * std::f64::consts::PI;
    }
    arg / std::f64::consts::PI
}

/// Polynomial `Σ c_i x^i` on `[lo, hi]`, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyBump {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl PolyBump {
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Derivative of the polynomial part.
    pub fn derivative(&self) -> PolyBump {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
        PolyBump { lo: self.lo, hi: self.hi, coeffs }
    }

    /// Integral over `s ∩ [lo, hi]`, by antiderivative.
    fn integral_over(&self, s: &Segment) -> f64 {
        let lo = s.lo.max(self.lo);
        let hi = s.hi.min(self.hi);
        if !(hi > lo) {
            return 0.0;
        }
        let anti = |x: f64| {
            self.coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, c)| acc * x + c / (i as f64 + 1.0))
                * x
        };
        anti(hi) - anti(lo)
    }
}

/// Both sides of `tr(f(B) - f(A)) = ∫ f'(E) ξ(E) dE` for a polynomial bump `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceFormulaCheck {
    /// `∫ f' ξ`, computed exactly.
    pub integral: f64,
    /// `tr(f(B) - f(A))`, as `∫_0^1 ⟨φ, f'(A + sφφ*) φ⟩ ds`.
    pub trace: f64,
}

impl TraceFormulaCheck {
    pub fn residual(&self) -> f64 {
        (self.integral - self.trace).abs()
    }
}

/// Checks the trace formula against `ξ` on the cyclic part, integrating the
/// coupling constant `s` with an `nodes`-point Gauss–Legendre rule. The
/// support of `f` should contain the spectra of `A + sφφ*` for `s ∈ [0, 1]`,
/// so that `f` is a polynomial wherever it matters.
pub fn birman_solomyak_check(pair: &RankOnePair, f: &PolyBump, nodes: usize) -> Result<TraceFormulaCheck> {
    let fprime = f.derivative();
    let xi = ssf_of_cyclic_part(pair)?;
    let integral: f64 = xi.pieces().iter().map(|p| fprime.integral_over(p)).sum();

    let (x, w) = gauss_legendre(nodes);
    let mut trace = 0.0;
    for (&xi_node, &wi) in x.iter().zip(&w) {
        let s = 0.5 * (xi_node + 1.0);
        let m = pair.a().matrix().add(&CMatrix::outer(pair.phi(), pair.phi()).scale(C64::new(s, 0.0)));
        let eig = eig_hermitian(&HermitianMatrix::new(m)?)?;
        let mut sum = 0.0;
        for k in 0..eig.dim() {
            sum += fprime.eval(eig.values[k]) * inner(&eig.vector(k), pair.phi()).norm_sqr();
        }
        trace += 0.5 * wi * sum;
    }
    Ok(TraceFormulaCheck { integral, trace })
}
