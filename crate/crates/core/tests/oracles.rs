mod common;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssfdet::*;

fn golden() -> (RankOnePair, IntervalSet) {
    let h = 0.5f64.sqrt();
    (diag_pair(&[0.0, 2.0], &[h, h]), IntervalSet::single(-1.0, 1.0).unwrap())
}

#[test]
fn golden_pair_by_hand() {
    let (pair, set) = golden();
    let s5 = 5f64.sqrt();
    assert_abs_diff_eq!(pair.eig_b().values[0], (3.0 - s5) / 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(pair.eig_b().values[1], (3.0 + s5) / 2.0, epsilon = 1e-14);

    let expected = 1.0 / (1.0 + (s5 - 2.0).powi(2));
    for method in DetMethod::ALL {
        assert_abs_diff_eq!(section_det(&pair, &set, method).unwrap(), expected, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(section_det_oracle(&pair, &set), expected, epsilon = 1e-12);
    assert_abs_diff_eq!(expected, 0.947_213_595_5, epsilon = 1e-9);

    let integral = xi_interaction(&pair, &set).unwrap().value;
    assert_abs_diff_eq!(integral, -expected.ln(), epsilon = 1e-12);
    assert_abs_diff_eq!(integral, 0.054_230_66, epsilon = 1e-8);
    assert_abs_diff_eq!(ssf_of_cyclic_part(&pair).unwrap().l1(), 1.0, epsilon = 1e-12);
}

#[test]
fn counterexample_mismatch() {
    let a = HermitianMatrix::from_real_diag(&[0.0, 3.0]).unwrap().eig().unwrap();
    let b = HermitianMatrix::from_real_diag(&[1.0, 4.0]).unwrap().eig().unwrap();
    let set = IntervalSet::single(-1.0, 2.0).unwrap();
    assert_abs_diff_eq!(diff_sq_det_projectors(&a, &b, &set).unwrap(), 1.0, epsilon = 1e-12);
    let xi = ssf_from_counts(&a.values, &b.values).unwrap();
    assert_eq!(xi.pieces(), &[Segment::new(0.0, 1.0), Segment::new(3.0, 4.0)]);
    let value = interaction_closed(&xi.inside(&set), &xi.outside(&set)).value;
    // ∫_0^1 ∫_3^4 (y - x)^{-2} dy dx = ln(9/8)
    assert_abs_diff_eq!(value, (9.0f64 / 8.0).ln(), epsilon = 1e-14);
}

#[test]
fn single_pair_interaction_by_integration() {
    // ∫_0^1 ∫_2^3 (y - x)^{-2} dy dx = ln(4/3)
    let v = interaction_closed(&[Segment::new(0.0, 1.0)], &[Segment::new(2.0, 3.0)]).value;
    assert_abs_diff_eq!(v, (4.0f64 / 3.0).ln(), epsilon = 1e-15);
    // half-line: ∫_0^1 ∫_2^∞ (y - x)^{-2} dy dx = ln 2
    let v = interaction_closed(&[Segment::new(0.0, 1.0)], &[Segment::new(2.0, f64::INFINITY)]).value;
    assert_abs_diff_eq!(v, 2f64.ln(), epsilon = 1e-15);
    assert!(interaction_closed(&[Segment::new(0.0, 1.0)], &[Segment::new(1.0, 2.0)]).is_divergent());
}

#[test]
fn xi_one_boundary_uses_gap_pieces() {
    // ξ = 1 on (a_n, b_n]; both boundaries sit mid-piece.
    let pair = diag_pair(&[0.0, 2.0], &[0.9, 0.9]);
    let b = &pair.eig_b().values;
    let set = IntervalSet::single(0.5 * b[0], 1.0 + 0.5 * b[1]).unwrap();
    assert_eq!(classify_boundary(&pair, &set, DEFAULT_ETA_MIN).classification, Classification::ThmXiOne);
    let det = section_det_oracle(&pair, &set);
    let integral = xi_minus_one_interaction(&pair, &set).unwrap().value;
    assert_relative_eq!(-det.ln(), integral, max_relative = 1e-10);
}

#[test]
fn trace_mismatch_forces_zero_determinant() {
    // I holds a_1 but not b_1, so tr(1_I(A) - 1_I(B)) = 1.
    let pair = diag_pair(&[0.0, 3.0], &[0.8, 0.5]);
    let b1 = pair.eig_b().values[0];
    assert!(b1 > 0.2);
    let set = IntervalSet::single(-1.0, 0.5 * b1).unwrap();
    let report = classify_boundary(&pair, &set, DEFAULT_ETA_MIN);
    assert_eq!(report.classification, Classification::TraceMismatch);
    assert_eq!(report.index(), 1);
    assert!(section_det(&pair, &set, DetMethod::Direct).unwrap() < 1e-10);
    assert!(section_det_oracle(&pair, &set) < 1e-10);
}

#[test]
fn truncation_at_full_dimension_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = jacobi_surrogate(30, 0.4, 0.05, || rng.random_range(-0.5..0.5)).unwrap();
    let mut phi = vec![C64::new(0.0, 0.0); 30];
    phi[0] = C64::new(0.5, 0.0);
    let pair = RankOnePair::new(a, phi).unwrap();
    let set = IntervalSet::single(-3.0, 0.0).unwrap();
    assert_eq!(classify_boundary(&pair, &set, DEFAULT_ETA_MIN).classification, Classification::ThmMain);
    let study = convergence_study(&pair, &set, &[10, 20, 30], 0.1).unwrap();
    let last = study.rows.last().unwrap();
    assert!(last.det_residual < 1e-12);
    assert!(study.m0.is_some());
    assert_relative_eq!(study.reference_det, section_det_oracle(&pair, &set), max_relative = 1e-10);
}
