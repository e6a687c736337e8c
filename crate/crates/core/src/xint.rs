//! The interaction integral `∫_I ∫_{I^c} f(x) f(y) / (x - y)² dx dy` for
//! indicator functions `f`, and its comparison with `-ln det`.

use crate::dets::{section_det, DetMethod};
use crate::error::{Error, Result};
use crate::interval::{IntervalSet, Segment};
use crate::pair::{classify_boundary, Classification, RankOnePair, DEFAULT_ETA_MIN};
use crate::quadrature::adaptive_simpson;
use crate::ssf::ssf_of_cyclic_part;

/// One `(X_i, Y_j)` contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionTerm {
    pub x: usize,
    pub y: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionResult {
    /// Sum of all terms; `+∞` if any pair of pieces touches or both are
    /// unbounded.
    pub value: f64,
    pub terms: Vec<InteractionTerm>,
}

impl InteractionResult {
    pub fn is_divergent(&self) -> bool {
        self.value == f64::INFINITY
    }
}

/// `∫_X ∫_Y dx dy / (x - y)²` for disjoint unions of segments, summed
/// pairwise in closed form.
///
/// For bounded `X = [x1, x2]`, `Y = [y1, y2]` the pair contributes
/// `ln(1 + |X||Y| / ((y2 - x1)(y1 - x2)))`. If one of them is a half-line,
/// the contribution is `ln(1 + |Z| / dist(X, Y))` with `Z` the bounded one.
pub fn interaction_closed(xs: &[Segment], ys: &[Segment]) -> InteractionResult {
    let mut terms = Vec::with_capacity(xs.len() * ys.len());
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            terms.push(InteractionTerm { x: i, y: j, value: pair_term(x, y) });
        }
    }
    let value = terms.iter().map(|t| t.value).sum();
    InteractionResult { value, terms }
}

fn pair_term(x: &Segment, y: &Segment) -> f64 {
    let dist = x.distance(y);
    if !(dist > 0.0) || (!x.is_bounded() && !y.is_bounded()) {
        return f64::INFINITY;
    }
    match (x.is_bounded(), y.is_bounded()) {
        (true, true) => {
            let denom = (y.hi - x.lo) * (y.lo - x.hi);
            (x.len() * y.len() / denom).ln_1p()
        }
        (false, true) => (y.len() / dist).ln_1p(),
        (true, false) => (x.len() / dist).ln_1p(),
        (false, false) => unreachable!(),
    }
}

/// The same integral by adaptive quadrature in `x`, with the `y` integral
/// done exactly. Half-lines are truncated at `10` hull widths beyond the
/// finite endpoints; use only as a cross-check of [`interaction_closed`].
pub fn interaction_quadrature(xs: &[Segment], ys: &[Segment], rel_tol: f64) -> Result<f64> {
    for x in xs {
        for y in ys {
            if !(x.distance(y) > 0.0) {
                return Err(Error::OutOfRange { what: "segment separation", value: x.distance(y) });
            }
        }
    }
    let finite: Vec<f64> = xs
        .iter()
        .chain(ys)
        .flat_map(|s| [s.lo, s.hi])
        .filter(|v| v.is_finite())
        .collect();
    let (lo, hi) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let width = if hi > lo { hi - lo } else { 1.0 };
    let cut = |s: &Segment| Segment::new(s.lo.max(lo - 10.0 * width), s.hi.min(hi + 10.0 * width));
    let xs: Vec<Segment> = xs.iter().map(cut).collect();
    let ys: Vec<Segment> = ys.iter().map(cut).collect();

    let inner = |x: f64| -> f64 { ys.iter().map(|y| 1.0 / (y.lo - x) - 1.0 / (y.hi - x)).sum() };
    // rough scale for the absolute tolerance
    let estimate: f64 = interaction_closed(&xs, &ys).value.abs().max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    for x in &xs {
        if x.is_empty() {
            continue;
        }
        let share = rel_tol * estimate / xs.len() as f64;
        total += adaptive_simpson(&inner, x.lo, x.hi, share)?;
    }
    Ok(total)
}

/// `∫_I ∫_{I^c} ξ(x) ξ(y) / (x - y)²`; requires [`Classification::ThmMain`].
pub fn xi_interaction(pair: &RankOnePair, set: &IntervalSet) -> Result<InteractionResult> {
    require(pair, set, Classification::ThmMain)?;
    let xi = ssf_of_cyclic_part(pair)?;
    Ok(interaction_closed(&xi.inside(set), &xi.outside(set)))
}

/// Pieces of `1 - ξ` on the cyclic part: the gaps `(b_n, a_{n+1}]` together
/// with the half-lines below `a_1` and above `b_M`.
pub fn gap_pieces(pair: &RankOnePair) -> Result<Vec<Segment>> {
    let Some(reduced) = pair.cyclic_part()? else {
        return Ok(vec![Segment::new(f64::NEG_INFINITY, f64::INFINITY)]);
    };
    let a = &reduced.eig_a().values;
    let b = &reduced.eig_b().values;
    let m = a.len();
    let mut out = vec![Segment::new(f64::NEG_INFINITY, a[0])];
    out.extend((0..m - 1).map(|n| Segment::new(b[n], a[n + 1])));
    out.push(Segment::new(b[m - 1], f64::INFINITY));
    Ok(out)
}

/// `∫_I ∫_{I^c} (1 - ξ(x))(1 - ξ(y)) / (x - y)²`; requires
/// [`Classification::ThmXiOne`].
pub fn xi_minus_one_interaction(pair: &RankOnePair, set: &IntervalSet) -> Result<InteractionResult> {
    require(pair, set, Classification::ThmXiOne)?;
    let gaps = gap_pieces(pair)?;
    let inside: Vec<Segment> = gaps.iter().flat_map(|&g| set.clip(g)).collect();
    let outside: Vec<Segment> = gaps.iter().flat_map(|&g| set.clip_complement(g)).collect();
    Ok(interaction_closed(&inside, &outside))
}

fn require(pair: &RankOnePair, set: &IntervalSet, expected: Classification) -> Result<()> {
    let found = classify_boundary(pair, set, DEFAULT_ETA_MIN).classification;
    if found != expected {
        return Err(Error::ClassificationMismatch { expected: expected.to_string(), found: found.to_string() });
    }
    Ok(())
}

/// `-ln det` against the matching interaction integral.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremResidual {
    pub classification: Classification,
    pub det: f64,
    pub neg_log_det: f64,
    pub integral: f64,
    pub residual: f64,
}

/// Compares `-ln det(1 - 1_I(A) 1_{I^c}(B) 1_I(A))` with the interaction
/// integral of `ξ` (for `ThmMain`) or of `1 - ξ` (for `ThmXiOne`).
pub fn theorem_residual(pair: &RankOnePair, set: &IntervalSet, method: DetMethod) -> Result<TheoremResidual> {
    let classification = classify_boundary(pair, set, DEFAULT_ETA_MIN).classification;
    let integral = match classification {
        Classification::ThmMain => xi_interaction(pair, set)?.value,
        Classification::ThmXiOne => xi_minus_one_interaction(pair, set)?.value,
        other => {
            return Err(Error::ClassificationMismatch {
                expected: format!("{} or {}", Classification::ThmMain, Classification::ThmXiOne),
                found: other.to_string(),
            })
        }
    };
    let det = section_det(pair, set, method)?;
    let neg_log_det = -det.ln();
    Ok(TheoremResidual { classification, det, neg_log_det, integral, residual: (neg_log_det - integral).abs() })
}
