//! Suite configuration files and built-in presets.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::instance::{Cluster, Generator, InstanceSpec, IntervalSpec, PhiMode, Target};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("batch {batch}: {message}")]
    Batch { batch: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub format_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Cross-check closed-form integrals by quadrature.
    #[serde(default = "yes")]
    pub quadrature: bool,
    #[serde(default)]
    pub batches: Vec<Batch>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchKind {
    /// Determinant identities, classified per instance.
    Theorem,
    /// Projector-difference bound for spectral subspaces.
    Subspace,
    /// Truncation study over an `M` grid.
    Converge,
    /// Fixed rank-two pair where the identity must fail.
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Batch {
    pub name: String,
    pub kind: BatchKind,
    #[serde(default = "one")]
    pub count: usize,
    #[serde(default)]
    pub instance: Option<InstanceSpec>,
    /// Truncation sizes, ascending (converge only).
    #[serde(default)]
    pub grid: Vec<usize>,
    /// Filter radius as a fraction of the boundary gap, in `(0, 0.5)`.
    #[serde(default = "quarter")]
    pub epsilon_fraction: f64,
}

fn one() -> usize {
    1
}

fn quarter() -> f64 {
    0.25
}

/// Tolerances for every residual in a report. Absolute unless noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `|-ln det - integral|`, scaled by `max(1, |integral|)`.
    pub theorem: f64,
    /// Largest pairwise gap between determinant methods.
    pub methods: f64,
    pub dual: f64,
    pub diff_sq: f64,
    pub quadrature_abs: f64,
    pub quadrature_rel: f64,
    /// `|∫ξ - ‖φ‖²|`, scaled by `max(1, ‖φ‖²)`.
    pub ssf_l1: f64,
    /// Determinant forced to vanish by an index mismatch.
    pub predicted: f64,
    pub subspace: f64,
    /// Residual at full size in a convergence study.
    pub converge_final: f64,
    /// Relative growth allowed between consecutive convergence residuals.
    pub converge_slack: f64,
    /// Absolute floor under which convergence residuals count as zero.
    pub converge_floor: f64,
    pub counterexample_det: f64,
    pub counterexample_integral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            theorem: 1e-8,
            methods: 1e-8,
            dual: 1e-9,
            diff_sq: 1e-9,
            quadrature_abs: 1e-8,
            quadrature_rel: 1e-6,
            ssf_l1: 1e-10,
            predicted: 1e-10,
            subspace: 1e-9,
            converge_final: 1e-9,
            converge_slack: 0.10,
            converge_floor: 1e-12,
            counterexample_det: 1e-12,
            counterexample_integral: 1e-10,
        }
    }
}

impl Tolerances {
    /// Multiplies every tolerance except the relative slack.
    pub fn scaled(&self, s: f64) -> Self {
        Tolerances {
            theorem: self.theorem * s,
            methods: self.methods * s,
            dual: self.dual * s,
            diff_sq: self.diff_sq * s,
            quadrature_abs: self.quadrature_abs * s,
            quadrature_rel: self.quadrature_rel * s,
            ssf_l1: self.ssf_l1 * s,
            predicted: self.predicted * s,
            subspace: self.subspace * s,
            converge_final: self.converge_final * s,
            converge_slack: self.converge_slack,
            converge_floor: self.converge_floor * s,
            counterexample_det: self.counterexample_det * s,
            counterexample_integral: self.counterexample_integral * s,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: SuiteConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.format_version != FORMAT_VERSION {
            return Err(ConfigError::Version(self.format_version));
        }
        for b in &self.batches {
            let fail = |message: &str| Err(ConfigError::Batch { batch: b.name.clone(), message: message.into() });
            match b.kind {
                BatchKind::Counterexample => {}
                _ if b.instance.is_none() => return fail("missing instance spec"),
                BatchKind::Subspace => {
                    let ok = matches!(
                        b.instance.as_ref().map(|s| &s.interval),
                        Some(IntervalSpec::SpectralBlock { .. } | IntervalSpec::Explicit { .. })
                    );
                    if !ok {
                        return fail("subspace batches need a spectral_block or explicit interval");
                    }
                }
                BatchKind::Converge => {
                    if b.grid.is_empty() || b.grid.windows(2).any(|w| w[0] >= w[1]) || b.grid[0] == 0 {
                        return fail("grid must be a nonempty increasing list of positive sizes");
                    }
                    if !(b.epsilon_fraction > 0.0 && b.epsilon_fraction < 0.5) {
                        return fail("epsilon_fraction must lie in (0, 0.5)");
                    }
                }
                BatchKind::Theorem => {}
            }
        }
        Ok(())
    }
}

pub mod presets {
    //! Configurations used by the CLI verbs when no `--config` is given.

    use super::*;

    fn auto(target: Target, boundary_points: usize, lower_unbounded: bool) -> IntervalSpec {
        IntervalSpec::Auto { target, boundary_points, lower_unbounded }
    }

    fn spec(generator: Generator, dim: usize, dim_max: Option<usize>, interval: IntervalSpec) -> InstanceSpec {
        InstanceSpec {
            generator,
            dim,
            dim_max,
            gap_layout: Vec::new(),
            phi_mode: PhiMode::RandomUnit,
            phi_norm: 1.0,
            interval,
            delta_min: 1e-3,
            margin_min: 1e-6,
        }
    }

    fn layout() -> Vec<Cluster> {
        vec![
            Cluster { center: -3.0, width: 1.0, count: 4 },
            Cluster { center: 0.0, width: 1.5, count: 6 },
            Cluster { center: 3.0, width: 1.0, count: 5 },
        ]
    }

    fn batch(name: &str, kind: BatchKind, count: usize, instance: Option<InstanceSpec>) -> Batch {
        Batch { name: name.into(), kind, count, instance, grid: Vec::new(), epsilon_fraction: 0.25 }
    }

    fn jacobi() -> Generator {
        Generator::Jacobi { hop: 0.4, noise: 0.05 }
    }

    pub fn golden() -> SuiteConfig {
        SuiteConfig {
            format_version: FORMAT_VERSION,
            seed: 0,
            tolerances: Tolerances::default(),
            quadrature: true,
            batches: vec![batch("golden", BatchKind::Theorem, 1, Some(InstanceSpec::golden()))],
        }
    }

    pub fn theorem_batches() -> Vec<Batch> {
        let gapped = |target, points, lower| InstanceSpec {
            gap_layout: layout(),
            ..spec(Generator::DiagonalGapped, 0, None, auto(target, points, lower))
        };
        vec![
            batch(
                "main_gaussian",
                BatchKind::Theorem,
                80,
                Some(spec(Generator::DenseGaussian, 4, Some(40), auto(Target::ThmMain, 2, false))),
            ),
            batch(
                "main_jacobi",
                BatchKind::Theorem,
                60,
                Some(spec(jacobi(), 4, Some(40), auto(Target::ThmMain, 3, true))),
            ),
            batch("main_gapped", BatchKind::Theorem, 60, Some(gapped(Target::ThmMain, 4, false))),
            batch(
                "xi_one_gaussian",
                BatchKind::Theorem,
                50,
                Some(spec(Generator::DenseGaussian, 4, Some(40), auto(Target::ThmXiOne, 2, false))),
            ),
            batch("xi_one_gapped", BatchKind::Theorem, 50, Some(gapped(Target::ThmXiOne, 2, true))),
            batch(
                "mismatch_jacobi",
                BatchKind::Theorem,
                50,
                Some(spec(jacobi(), 4, Some(40), auto(Target::TraceMismatch, 2, false))),
            ),
        ]
    }

    pub fn subspace_batches() -> Vec<Batch> {
        let block = IntervalSpec::SpectralBlock { max_len: 4, ratio: [0.05, 0.95] };
        vec![
            batch(
                "subspace_gapped",
                BatchKind::Subspace,
                60,
                Some(InstanceSpec { gap_layout: layout(), ..spec(Generator::DiagonalGapped, 0, None, block.clone()) }),
            ),
            batch(
                "subspace_gaussian",
                BatchKind::Subspace,
                40,
                Some(spec(Generator::DenseGaussian, 4, Some(24), block)),
            ),
        ]
    }

    pub fn converge_batch() -> Batch {
        let instance = InstanceSpec {
            phi_mode: PhiMode::FirstBasis,
            phi_norm: 0.5,
            margin_min: 0.0,
            ..spec(jacobi(), 200, None, IntervalSpec::WidestGap)
        };
        Batch { grid: vec![25, 50, 100, 150, 200], ..batch("converge_jacobi", BatchKind::Converge, 1, Some(instance)) }
    }

    pub fn counterexample_batch() -> Batch {
        batch("counterexample", BatchKind::Counterexample, 1, None)
    }

    fn suite(seed: u64, batches: Vec<Batch>) -> SuiteConfig {
        SuiteConfig { format_version: FORMAT_VERSION, seed, tolerances: Tolerances::default(), quadrature: true, batches }
    }

    /// Every check: theorem ensembles, subspace bounds, convergence, counterexample.
    pub fn full() -> SuiteConfig {
        let mut batches = theorem_batches();
        batches.extend(subspace_batches());
        batches.push(converge_batch());
        batches.push(counterexample_batch());
        suite(1, batches)
    }

    pub fn subspace() -> SuiteConfig {
        suite(2, subspace_batches())
    }

    pub fn converge() -> SuiteConfig {
        suite(3, vec![converge_batch()])
    }

    pub fn counterexample() -> SuiteConfig {
        suite(0, vec![counterexample_batch()])
    }
}
