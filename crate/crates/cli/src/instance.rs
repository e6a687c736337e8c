//! Seeded generation of `(A, φ, I)` instances.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use ssfdet::{
    classify_boundary, jacobi_surrogate, xi_count, CMatrix, Classification, HermitianMatrix, IntervalSet, RankOnePair,
    C64, DEFAULT_ETA_MIN,
};

use crate::rng::{attempt_rng, complex_normal};

pub const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("no valid instance after {attempts} attempts: {last}")]
    Unsatisfiable { attempts: usize, last: String },
    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Numeric(#[from] ssfdet::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub generator: Generator,
    /// Ignored by `explicit` and `diagonal_gapped`, whose size is implied.
    #[serde(default)]
    pub dim: usize,
    /// If set, the dimension is drawn uniformly from `dim..=dim_max`.
    #[serde(default)]
    pub dim_max: Option<usize>,
    #[serde(default)]
    pub gap_layout: Vec<Cluster>,
    #[serde(default)]
    pub phi_mode: PhiMode,
    #[serde(default = "default_phi_norm")]
    pub phi_norm: f64,
    pub interval: IntervalSpec,
    /// Minimum distance from `∂I` to both spectra.
    #[serde(default = "default_delta_min")]
    pub delta_min: f64,
    /// Minimum interlacing margin for random generators; `0` skips the check.
    #[serde(default = "default_margin_min")]
    pub margin_min: f64,
}

fn default_phi_norm() -> f64 {
    1.0
}

fn default_delta_min() -> f64 {
    1e-3
}

fn default_margin_min() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// Fixed real symmetric matrix.
    Explicit { a: Vec<Vec<f64>> },
    /// Diagonal matrix with eigenvalues drawn uniformly inside `gap_layout` clusters.
    DiagonalGapped,
    /// Hermitian Gaussian matrix scaled by `1/√dim`.
    DenseGaussian,
    /// Jacobi matrix with diagonal `±1` and off-diagonal `hop`, both jittered by `noise`.
    Jacobi {
        #[serde(default = "default_hop")]
        hop: f64,
        #[serde(default = "default_noise")]
        noise: f64,
    },
}

fn default_hop() -> f64 {
    0.4
}

fn default_noise() -> f64 {
    0.05
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cluster {
    pub center: f64,
    pub width: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiMode {
    /// Complex Gaussian direction.
    #[default]
    RandomUnit,
    /// `(1, …, 1)` direction.
    Ones,
    /// Given coordinates, used as is.
    Explicit { values: Vec<f64> },
    /// `e_1` direction.
    FirstBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    ThmMain,
    ThmXiOne,
    TraceMismatch,
}

impl Target {
    pub fn classification(self) -> Classification {
        match self {
            Target::ThmMain => Classification::ThmMain,
            Target::ThmXiOne => Classification::ThmXiOne,
            Target::TraceMismatch => Classification::TraceMismatch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntervalSpec {
    /// Boundary points at midpoints of gaps of `σ(A) ∪ σ(B)`, chosen so the
    /// instance has the requested classification.
    Auto {
        target: Target,
        #[serde(default = "default_boundary_points")]
        boundary_points: usize,
        /// Start the first interval at `-∞`.
        #[serde(default)]
        lower_unbounded: bool,
    },
    /// Closed intervals; `null` stands for an infinite endpoint.
    Explicit { intervals: Vec<[Option<f64>; 2]> },
    /// `Σ` spanning a random run of at most `max_len` consecutive eigenvalues
    /// of `A`; `φ` is rescaled so `‖φ‖² / δ` falls in `ratio`.
    SpectralBlock { max_len: usize, ratio: [f64; 2] },
    /// `(-∞, m]` with `m` the midpoint of the widest bounded gap where `ξ = 0`.
    WidestGap,
}

fn default_boundary_points() -> usize {
    2
}

/// A generated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub pair: RankOnePair,
    pub set: IntervalSet,
    pub seed: u64,
    pub attempts: usize,
}

impl InstanceSpec {
    pub fn golden() -> Self {
        let h = 0.5f64.sqrt();
        InstanceSpec {
            generator: Generator::Explicit { a: vec![vec![0.0, 0.0], vec![0.0, 2.0]] },
            dim: 2,
            dim_max: None,
            gap_layout: Vec::new(),
            phi_mode: PhiMode::Explicit { values: vec![h, h] },
            phi_norm: 1.0,
            interval: IntervalSpec::Explicit { intervals: vec![[Some(-1.0), Some(1.0)]] },
            delta_min: default_delta_min(),
            margin_min: default_margin_min(),
        }
    }

    fn is_random(&self) -> bool {
        !matches!(self.generator, Generator::Explicit { .. })
    }
}

/// Builds the instance for `seed`, redrawing with derived sub-seeds until
/// the interval requirements are met.
pub fn gen_instance(spec: &InstanceSpec, seed: u64) -> Result<Instance, GenError> {
    validate(spec)?;
    let mut last = String::from("no attempt made");
    let mut attempts = 0;
    for attempt in 0..MAX_ATTEMPTS {
        attempts = attempt + 1;
        let mut rng = attempt_rng(seed, attempt);
        match try_instance(spec, &mut rng) {
            Ok(Some((pair, set))) => return Ok(Instance { pair, set, seed, attempts: attempt + 1 }),
            Ok(None) => last = "interval requirements not met".into(),
            Err(GenError::Numeric(e)) => last = e.to_string(),
            Err(e) => return Err(e),
        }
        if !spec.is_random() && !matches!(spec.interval, IntervalSpec::Auto { .. } | IntervalSpec::SpectralBlock { .. }) {
            break;
        }
    }
    Err(GenError::Unsatisfiable { attempts, last })
}

fn validate(spec: &InstanceSpec) -> Result<(), GenError> {
    let bad = |m: &str| Err(GenError::InvalidSpec(m.to_string()));
    match &spec.generator {
        Generator::Explicit { a } if a.is_empty() => return bad("explicit matrix is empty"),
        Generator::DiagonalGapped if spec.gap_layout.is_empty() => return bad("diagonal_gapped needs gap_layout"),
        Generator::DenseGaussian | Generator::Jacobi { .. } if spec.dim == 0 => return bad("dim must be positive"),
        _ => {}
    }
    if let Some(max) = spec.dim_max {
        if max < spec.dim {
            return bad("dim_max is below dim");
        }
    }
    if !(spec.phi_norm >= 0.0) || !(spec.delta_min > 0.0) {
        return bad("phi_norm must be nonnegative and delta_min positive");
    }
    if let IntervalSpec::SpectralBlock { max_len, ratio } = &spec.interval {
        if *max_len == 0 || !(0.0 < ratio[0] && ratio[0] <= ratio[1] && ratio[1] < 1.0) {
            return bad("spectral_block needs max_len ≥ 1 and 0 < ratio[0] ≤ ratio[1] < 1");
        }
    }
    Ok(())
}

type Draw = Option<(RankOnePair, IntervalSet)>;

fn try_instance(spec: &InstanceSpec, rng: &mut impl Rng) -> Result<Draw, GenError> {
    let a = build_matrix(spec, rng)?;
    let n = a.dim();
    let phi = build_phi(spec, n, rng)?;
    let pair = RankOnePair::new(a, phi)?;
    if spec.is_random() && spec.margin_min > 0.0 {
        let r = pair.interlacing();
        if !r.strict || r.margin < spec.margin_min {
            return Ok(None);
        }
    }
    match &spec.interval {
        IntervalSpec::Explicit { intervals } => {
            let raw: Vec<(f64, f64)> = intervals
                .iter()
                .map(|[lo, hi]| (lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY)))
                .collect();
            let set = IntervalSet::new(&raw).map_err(|e| GenError::InvalidSpec(e.to_string()))?;
            Ok(Some((pair, set)))
        }
        IntervalSpec::Auto { target, boundary_points, lower_unbounded } => {
            Ok(auto_interval(&pair, *target, *boundary_points, *lower_unbounded, spec.delta_min, rng)
                .map(|set| (pair, set)))
        }
        IntervalSpec::SpectralBlock { max_len, ratio } => spectral_block(pair, *max_len, *ratio, spec.delta_min, rng),
        IntervalSpec::WidestGap => Ok(widest_gap(&pair, spec.delta_min).map(|set| (pair, set))),
    }
}

fn build_matrix(spec: &InstanceSpec, rng: &mut impl Rng) -> Result<HermitianMatrix, GenError> {
    let dim = match spec.dim_max {
        Some(max) => rng.random_range(spec.dim..=max),
        None => spec.dim,
    };
    let m = match &spec.generator {
        Generator::Explicit { a } => HermitianMatrix::from_real_rows(a)?,
        Generator::DiagonalGapped => {
            let mut diag = Vec::new();
            for c in &spec.gap_layout {
                for _ in 0..c.count {
                    diag.push(c.center + c.width * (rng.random::<f64>() - 0.5));
                }
            }
            HermitianMatrix::from_real_diag(&diag)?
        }
        Generator::DenseGaussian => {
            let scale = 1.0 / (dim as f64).sqrt();
            let mut h = CMatrix::zeros(dim, dim);
            for i in 0..dim {
                h[(i, i)] = C64::new(crate::rng::normal(rng) * scale, 0.0);
                for j in i + 1..dim {
                    let z = complex_normal(rng) * scale;
                    h[(i, j)] = z;
                    h[(j, i)] = z.conj();
                }
            }
            HermitianMatrix::new(h)?
        }
        Generator::Jacobi { hop, noise } => jacobi_surrogate(dim, *hop, *noise, || rng.random_range(-1.0..=1.0))?,
    };
    Ok(m)
}

fn build_phi(spec: &InstanceSpec, n: usize, rng: &mut impl Rng) -> Result<Vec<C64>, GenError> {
    let direction: Vec<C64> = match &spec.phi_mode {
        PhiMode::Explicit { values } => {
            if values.len() != n {
                return Err(GenError::InvalidSpec(format!("phi has {} entries, matrix has dimension {n}", values.len())));
            }
            return Ok(values.iter().map(|&x| C64::new(x, 0.0)).collect());
        }
        PhiMode::RandomUnit => (0..n).map(|_| complex_normal(rng)).collect(),
        PhiMode::Ones => vec![C64::new(1.0, 0.0); n],
        PhiMode::FirstBasis => (0..n).map(|i| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect(),
    };
    let norm = ssfdet::vec_norm(&direction);
    Ok(direction.iter().map(|z| z * (spec.phi_norm / norm)).collect())
}

/// Candidate boundary points with the value of `ξ` there: midpoints of
/// bounded gaps of half-width at least `delta_min`, plus one point on each
/// side of the joint spectrum.
fn gap_points(pair: &RankOnePair, delta_min: f64) -> Vec<(f64, i64)> {
    let a = &pair.eig_a().values;
    let b = &pair.eig_b().values;
    let mut s: Vec<f64> = a.iter().chain(b).copied().collect();
    s.sort_by(f64::total_cmp);
    let outer = delta_min.max(1.0);
    let mut pts = vec![s[0] - outer];
    for w in s.windows(2) {
        if (w[1] - w[0]) / 2.0 >= delta_min {
            pts.push(0.5 * (w[0] + w[1]));
        }
    }
    pts.push(s[s.len() - 1] + outer);
    pts.into_iter().map(|e| (e, xi_count(a, b, e))).collect()
}

fn auto_interval(
    pair: &RankOnePair,
    target: Target,
    count: usize,
    lower_unbounded: bool,
    delta_min: f64,
    rng: &mut impl Rng,
) -> Option<IntervalSet> {
    let candidates: Vec<f64> = gap_points(pair, delta_min)
        .into_iter()
        .filter(|&(_, xi)| match target {
            Target::ThmMain => xi == 0,
            Target::ThmXiOne => xi == 1,
            Target::TraceMismatch => true,
        })
        .map(|(e, _)| e)
        .collect();
    if count == 0 || candidates.len() < count {
        return None;
    }
    let mut picks: Vec<f64> = sample(rng, candidates.len(), count).into_iter().map(|i| candidates[i]).collect();
    picks.sort_by(f64::total_cmp);

    let mut raw = Vec::new();
    let mut rest = picks.as_slice();
    if lower_unbounded {
        raw.push((f64::NEG_INFINITY, rest[0]));
        rest = &rest[1..];
    }
    for chunk in rest.chunks(2) {
        raw.push(match chunk {
            [lo, hi] => (*lo, *hi),
            [lo] => (*lo, f64::INFINITY),
            _ => unreachable!(),
        });
    }
    let set = IntervalSet::new(&raw).ok()?;
    let report = classify_boundary(pair, &set, DEFAULT_ETA_MIN);
    (report.classification == target.classification() && report.gap_distance >= delta_min).then_some(set)
}

fn spectral_block(
    pair: RankOnePair,
    max_len: usize,
    ratio: [f64; 2],
    delta_min: f64,
    rng: &mut impl Rng,
) -> Result<Draw, GenError> {
    let a = &pair.eig_a().values;
    let n = a.len();
    if n < 2 {
        return Ok(None);
    }
    let len = rng.random_range(1..=max_len.min(n - 1));
    let start = rng.random_range(0..=n - len);
    let end = start + len - 1;
    let mut delta = f64::INFINITY;
    if start > 0 {
        delta = delta.min(a[start] - a[start - 1]);
    }
    if end + 1 < n {
        delta = delta.min(a[end + 1] - a[end]);
    }
    if !(delta >= delta_min) {
        return Ok(None);
    }
    let t = delta * rng.random_range(ratio[0]..=ratio[1]);
    let scale = (t / pair.phi_norm_sq()).sqrt();
    let phi = pair.phi().iter().map(|z| z * scale).collect();
    let set = IntervalSet::single(a[start], a[end])?;
    let rescaled = RankOnePair::new(pair.a().clone(), phi)?;
    Ok(Some((rescaled, set)))
}

fn widest_gap(pair: &RankOnePair, delta_min: f64) -> Option<IntervalSet> {
    let a = &pair.eig_a().values;
    let b = &pair.eig_b().values;
    let mut s: Vec<f64> = a.iter().chain(b).copied().collect();
    s.sort_by(f64::total_cmp);
    let best = s
        .windows(2)
        .filter(|w| (w[1] - w[0]) / 2.0 >= delta_min && xi_count(a, b, 0.5 * (w[0] + w[1])) == 0)
        .max_by(|x, y| (x[1] - x[0]).total_cmp(&(y[1] - y[0])))?;
    IntervalSet::single(f64::NEG_INFINITY, 0.5 * (best[0] + best[1])).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gapped(target: Target) -> InstanceSpec {
        InstanceSpec {
            generator: Generator::DiagonalGapped,
            dim: 0,
            dim_max: None,
            gap_layout: vec![
                Cluster { center: -2.0, width: 1.0, count: 5 },
                Cluster { center: 2.0, width: 1.0, count: 5 },
            ],
            phi_mode: PhiMode::RandomUnit,
            phi_norm: 0.8,
            interval: IntervalSpec::Auto { target, boundary_points: 2, lower_unbounded: false },
            delta_min: 1e-3,
            margin_min: 1e-6,
        }
    }

    #[test]
    fn golden_spec_is_exact() {
        let inst = gen_instance(&InstanceSpec::golden(), 0).unwrap();
        let h = 0.5f64.sqrt();
        let expected = RankOnePair::from_real(&[vec![0.0, 0.0], vec![0.0, 2.0]], &[h, h]).unwrap();
        assert_eq!(inst.pair, expected);
        assert_eq!(inst.set, IntervalSet::single(-1.0, 1.0).unwrap());
    }

    #[test]
    fn auto_targets_are_met() {
        for target in [Target::ThmMain, Target::ThmXiOne, Target::TraceMismatch] {
            for seed in 0..5 {
                let inst = gen_instance(&gapped(target), seed).unwrap();
                assert_eq!(inst.pair.dim(), 10);
                let r = classify_boundary(&inst.pair, &inst.set, DEFAULT_ETA_MIN);
                assert_eq!(r.classification, target.classification());
                assert!(r.gap_distance >= 1e-3);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = InstanceSpec {
            generator: Generator::DenseGaussian,
            dim: 6,
            dim_max: Some(12),
            ..gapped(Target::ThmMain)
        };
        let x = gen_instance(&spec, 42).unwrap();
        let y = gen_instance(&spec, 42).unwrap();
        assert_eq!(x.pair, y.pair);
        assert_eq!(x.set, y.set);
        assert_ne!(gen_instance(&spec, 43).unwrap().pair, x.pair);
    }

    #[test]
    fn phi_norm_is_applied() {
        let inst = gen_instance(&gapped(Target::ThmMain), 3).unwrap();
        assert!((inst.pair.phi_norm_sq() - 0.64).abs() < 1e-12);
    }

    #[test]
    fn spectral_block_respects_ratio() {
        let spec = InstanceSpec { interval: IntervalSpec::SpectralBlock { max_len: 3, ratio: [0.2, 0.8] }, ..gapped(Target::ThmMain) };
        let inst = gen_instance(&spec, 11).unwrap();
        let r = ssfdet::subspace_bound_check(&inst.pair, &inst.set).unwrap();
        assert!(r.hypothesis_holds);
        assert!(r.phi_norm_sq / r.delta >= 0.2 - 1e-12 && r.phi_norm_sq / r.delta <= 0.8 + 1e-12);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = gapped(Target::ThmMain);
        spec.gap_layout.clear();
        assert!(matches!(gen_instance(&spec, 0), Err(GenError::InvalidSpec(_))));
        let mut spec = InstanceSpec::golden();
        spec.phi_mode = PhiMode::Explicit { values: vec![1.0] };
        assert!(matches!(gen_instance(&spec, 0), Err(GenError::InvalidSpec(_))));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = gapped(Target::ThmXiOne);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<InstanceSpec>(&text).unwrap(), spec);
        assert!(serde_json::from_str::<InstanceSpec>(r#"{"generator":{"kind":"dense_gaussian"},"interval":{"kind":"widest_gap"},"bogus":1}"#).is_err());
    }
}
