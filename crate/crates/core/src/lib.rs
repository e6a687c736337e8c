//! Fredholm determinants of spectral-projector sections for rank-one
//! perturbations `B = A + φφ*` of Hermitian matrices, and the double
//! integrals of the spectral shift function they equal.

// `!(x > y)` is used deliberately so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dets;
pub mod error;
pub mod interval;
pub mod linalg;
pub mod pair;
pub mod perturb;
pub mod quadrature;
pub mod ssf;
pub mod xint;

pub use dets::{
    cauchy_det_closed, diff_sq_det, diff_sq_det_projectors, direct_section, index_trace, log_cauchy_det,
    overlap_matrix, product_formula, residue_weights, residue_weights_signed, section_det, section_det_dual,
    DetMethod, DirectSection, OverlapMatrix, OverlapRoute, ResidueWeights,
};
pub use error::{Error, Result};
pub use interval::{IntervalSet, Segment};
pub use linalg::{
    determinant, eig_hermitian, inner, op_norm, spectral_projector, trace, vec_norm, CMatrix, EigenSystem,
    HermitianMatrix, Projector, C64, DEFAULT_GUARD,
};
pub use pair::{
    classify_boundary, interlacing_report, lanczos_deflate, make_pair, BoundaryReport, Classification, Deflation,
    InterlacingReport, RankOnePair, DEFAULT_ETA_MIN, LANCZOS_BREAKDOWN, WEIGHT_DEFLATION,
};
pub use perturb::{
    convergence_study, enlarged_set, jacobi_surrogate, nonincreasing_within, projector_diff_norm,
    subspace_bound_check, truncate_filter, ApproxScheme, ConvergenceRow, ConvergenceStudy, SubspaceReport,
};
pub use ssf::{
    birman_solomyak_check, ssf_eval, ssf_from_counts, ssf_l1, ssf_of_cyclic_part, ssf_of_pair, ssf_resolvent,
    xi_count, PolyBump, StepFunction, TraceFormulaCheck,
};
pub use xint::{
    gap_pieces, interaction_closed, interaction_quadrature, theorem_residual, xi_interaction,
    xi_minus_one_interaction, InteractionResult, InteractionTerm, TheoremResidual,
};
