//! Fixed instances for the benchmarks.

use ssfdet::{IntervalSet, RankOnePair};
use ssfdet_cli::{gen_instance, presets, Instance, InstanceSpec};

/// Dense Gaussian pair of dimension `dim` with a set satisfying the zero
/// boundary hypothesis.
pub fn gaussian_instance(dim: usize, seed: u64) -> Instance {
    let mut spec = presets::theorem_batches()
        .into_iter()
        .next()
        .and_then(|b| b.instance)
        .expect("preset has an instance");
    spec.dim = dim;
    spec.dim_max = None;
    gen_instance(&spec, seed).expect("preset instances generate")
}

pub fn golden() -> (RankOnePair, IntervalSet) {
    let inst = gen_instance(&InstanceSpec::golden(), 0).expect("golden instance");
    (inst.pair, inst.set)
}
