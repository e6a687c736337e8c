//! Finite unions of closed real intervals, with `±∞` allowed as endpoints.

use crate::error::{Error, Result};

/// A real interval `lo..hi`. Whether the endpoints are included is decided
/// by the owner; for integrals and lengths it never matters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
}

impl Segment {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Segment { lo, hi }
    }

    pub fn len(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        !(self.hi > self.lo)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Gap between two segments; zero when they touch or overlap.
    pub fn distance(&self, other: &Segment) -> f64 {
        if self.hi <= other.lo {
            other.lo - self.hi
        } else if other.hi <= self.lo {
            self.lo - other.hi
        } else {
            0.0
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// The set `I = [E_1, E_2] ∪ [E_3, E_4] ∪ …` with
/// `-∞ ≤ E_1 ≤ E_2 < E_3 ≤ E_4 < … ≤ +∞`.
///
/// Intervals are closed. Degenerate intervals `[a, a]` are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<Segment>,
}

impl IntervalSet {
    /// Builds the set from endpoints already in canonical order.
    pub fn new(intervals: &[(f64, f64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(intervals.len());
        for (idx, &(lo, hi)) in intervals.iter().enumerate() {
            check_endpoints(lo, hi)?;
            if let Some(prev) = out.last().map(|s: &Segment| s.hi) {
                if !(prev < lo) {
                    return Err(Error::InvalidIntervals(format!(
                        "interval {idx} starts at {lo}, not strictly after previous end {prev}"
                    )));
                }
            }
            out.push(Segment::new(lo, hi));
        }
        Ok(IntervalSet { intervals: out })
    }

    /// Builds the set from arbitrary closed intervals, sorting and merging
    /// overlapping or touching ones.
    pub fn normalized(intervals: &[(f64, f64)]) -> Result<Self> {
        let mut segs = Vec::with_capacity(intervals.len());
        for &(lo, hi) in intervals {
            check_endpoints(lo, hi)?;
            segs.push(Segment::new(lo, hi));
        }
        segs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Segment> = Vec::with_capacity(segs.len());
        for s in segs {
            match merged.last_mut() {
                Some(last) if s.lo <= last.hi => last.hi = last.hi.max(s.hi),
                _ => merged.push(s),
            }
        }
        Ok(IntervalSet { intervals: merged })
    }

    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn real_line() -> Self {
        IntervalSet {
            intervals: vec![Segment::new(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    pub fn single(lo: f64, hi: f64) -> Result<Self> {
        Self::new(&[(lo, hi)])
    }

    pub fn intervals(&self) -> &[Segment] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(Segment::is_bounded)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|s| s.contains(x))
    }

    /// Finite points of `∂I` in increasing order. A degenerate interval
    /// contributes a single point.
    pub fn boundary_points(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(2 * self.intervals.len());
        for s in &self.intervals {
            for x in [s.lo, s.hi] {
                if x.is_finite() && pts.last() != Some(&x) {
                    pts.push(x);
                }
            }
        }
        pts
    }

    /// Open intervals making up `ℝ \ I`.
    pub fn complement_segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut start = f64::NEG_INFINITY;
        for s in &self.intervals {
            if s.lo > start {
                out.push(Segment::new(start, s.lo));
            }
            start = s.hi;
        }
        if start < f64::INFINITY {
            out.push(Segment::new(start, f64::INFINITY));
        }
        out
    }

    /// Parts of `seg` inside `I`; zero-length pieces are dropped.
    pub fn clip(&self, seg: Segment) -> Vec<Segment> {
        intersect(&self.intervals, seg)
    }

    /// Parts of `seg` inside `ℝ \ I`; zero-length pieces are dropped.
    pub fn clip_complement(&self, seg: Segment) -> Vec<Segment> {
        intersect(&self.complement_segments(), seg)
    }

    /// Each `[lo, hi]` becomes `[lo - left, hi + right]`, then overlaps merge.
    pub fn widened(&self, left: f64, right: f64) -> Self {
        let raw: Vec<(f64, f64)> = self
            .intervals
            .iter()
            .map(|s| (s.lo - left, s.hi + right))
            .collect();
        // endpoints stay ordered for nonnegative widths
        Self::normalized(&raw).expect("widening preserves validity")
    }

    /// Smallest distance from a finite boundary point to any of `points`.
    /// `+∞` when the boundary has no finite point.
    pub fn boundary_distance(&self, points: &[f64]) -> f64 {
        self.boundary_points()
            .iter()
            .flat_map(|e| points.iter().map(move |p| (p - e).abs()))
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_endpoints(lo: f64, hi: f64) -> Result<()> {
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::InvalidIntervals("NaN endpoint".into()));
    }
    if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
        return Err(Error::InvalidIntervals(format!("degenerate infinite interval [{lo}, {hi}]")));
    }
    if lo > hi {
        return Err(Error::InvalidIntervals(format!("lo {lo} exceeds hi {hi}")));
    }
    Ok(())
}

fn intersect(parts: &[Segment], seg: Segment) -> Vec<Segment> {
    parts
        .iter()
        .filter_map(|p| {
            let s = Segment::new(p.lo.max(seg.lo), p.hi.min(seg.hi));
            (!s.is_empty()).then_some(s)
        })
        .collect()
}
