#![allow(dead_code)]

use proptest::prelude::*;
use ssfdet::{determinant, CMatrix, EigenSystem, HermitianMatrix, IntervalSet, RankOnePair, C64};

/// Random real symmetric `A` and real `φ` with `‖φ‖ ≥ 0.2`.
pub fn real_pair(max_dim: usize) -> impl Strategy<Value = RankOnePair> {
    (2..=max_dim)
        .prop_flat_map(|n| (prop::collection::vec(-2.0..2.0f64, n * n), prop::collection::vec(-1.0..1.0f64, n)))
        .prop_filter_map("phi too small", |(entries, phi)| {
            let n = phi.len();
            if phi.iter().map(|x| x * x).sum::<f64>() < 0.04 {
                return None;
            }
            let rows: Vec<Vec<f64>> =
                (0..n).map(|i| (0..n).map(|j| 0.5 * (entries[i * n + j] + entries[j * n + i])).collect()).collect();
            RankOnePair::from_real(&rows, &phi).ok()
        })
}

/// Strictly increasing `a_1 < b_1 < a_2 < …` with gaps in `[0.05, 1]`.
pub fn interlaced(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max_len).prop_flat_map(|n| prop::collection::vec(0.05..1.0f64, 2 * n)).prop_map(|gaps| {
        let mut x = -1.0;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, g) in gaps.iter().enumerate() {
            x += g;
            if i % 2 == 0 { a.push(x) } else { b.push(x) }
        }
        (a, b)
    })
}

/// Leibniz expansion over all permutations.
pub fn leibniz_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, m: &[Vec<f64>], total: &mut f64) {
    let n = perm.len();
    if k == n {
        let mut sign = 1.0;
        for i in 0..n {
            for j in i + 1..n {
                if perm[i] > perm[j] {
                    sign = -sign;
                }
            }
        }
        *total += sign * (0..n).map(|i| m[i][perm[i]]).product::<f64>();
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, m, total);
        perm.swap(k, i);
    }
}

/// Projector onto eigenvectors with eigenvalue in `set`, built from scratch.
pub fn projector(eig: &EigenSystem, set: &IntervalSet) -> CMatrix {
    let n = eig.dim();
    let mut p = CMatrix::zeros(n, n);
    for k in 0..n {
        if set.contains(eig.values[k]) {
            let v = eig.vector(k);
            p = p.add(&CMatrix::outer(&v, &v));
        }
    }
    p
}

/// `det(1 - P (1 - Q) P)` by LU on the full matrix.
pub fn section_det_oracle(pair: &RankOnePair, set: &IntervalSet) -> f64 {
    let n = pair.dim();
    let id = CMatrix::identity(n);
    let p = projector(pair.eig_a(), set);
    let q = id.sub(&projector(pair.eig_b(), set));
    determinant(&id.sub(&p.matmul(&q).matmul(&p))).re
}

/// A bounded interval whose endpoints sit in gaps where `ξ = 0`: below
/// `a_1` and halfway across the gap `(b_k, a_{k+1})`.
pub fn main_interval(pair: &RankOnePair, k: usize) -> Option<IntervalSet> {
    let a = &pair.eig_a().values;
    let b = &pair.eig_b().values;
    let k = k % a.len();
    let hi = if k + 1 < a.len() { 0.5 * (b[k] + a[k + 1]) } else { b[k] + 1.0 };
    let set = IntervalSet::single(a[0] - 1.0, hi).ok()?;
    (set.boundary_distance(a).min(set.boundary_distance(b)) > 1e-4).then_some(set)
}

pub fn diag_pair(a: &[f64], phi: &[f64]) -> RankOnePair {
    RankOnePair::new(
        HermitianMatrix::from_real_diag(a).unwrap(),
        phi.iter().map(|&x| C64::new(x, 0.0)).collect(),
    )
    .unwrap()
}
