//! Seeded generators for modules, maps and structures used by tests, benches
//! and the CLI. All randomness flows through a caller-supplied seed.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coalgebra::{CoderivationComponents, MorphismComponents};
use crate::graded::{GradedModule, Symmetry};
use crate::lincomb::Vector;
use crate::multimap::MultiMap;
use crate::scalar::{int, Scalar};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small nonzero integer in `[-bound, bound]`.
pub fn small_nonzero(rng: &mut SeededRng, bound: i64) -> Scalar {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return int(v);
        }
    }
}

/// Module of dimension `dim` with degrees drawn from `degrees`.
pub fn random_module(rng: &mut SeededRng, dim: usize, degrees: std::ops::RangeInclusive<i64>, prefix: &str) -> GradedModule {
    let mut ds: Vec<i64> = (0..dim).map(|_| rng.gen_range(degrees.clone())).collect();
    ds.sort();
    GradedModule::from_basis(ds.into_iter().enumerate().map(|(i, d)| (d, format!("{prefix}{i}")))).expect("labels are unique")
}

/// Random homogeneous map; each admissible coefficient is nonzero with probability `density`.
pub fn random_map(
    rng: &mut SeededRng,
    arity: usize,
    source: Arc<GradedModule>,
    target: Arc<GradedModule>,
    degree: i64,
    symmetry: Symmetry,
    density: f64,
) -> MultiMap {
    let tgt = target.clone();
    let src = source.clone();
    MultiMap::from_fn(arity, source, target, degree, symmetry, |word| {
        let out_degree: i64 = word.iter().map(|&i| src.degree(i)).sum::<i64>() + degree;
        let mut v = Vector::new();
        for j in tgt.indices_of_degree(out_degree) {
            if rng.gen_bool(density) {
                v.add_term(j, small_nonzero(rng, 3));
            }
        }
        v
    })
}

/// Random degree-`+1` coderivation components (no square-zero condition).
pub fn random_coderivation(rng: &mut SeededRng, module: Arc<GradedModule>, max_arity: usize, density: f64) -> CoderivationComponents {
    let comps = (1..=max_arity)
        .map(|n| random_map(rng, n, module.clone(), module.clone(), 1, Symmetry::Symmetric, density))
        .collect();
    CoderivationComponents::new(module, comps).expect("random components are well formed")
}

/// Random coalgebra morphism components (no equivariance condition).
pub fn random_morphism(
    rng: &mut SeededRng,
    source: Arc<GradedModule>,
    target: Arc<GradedModule>,
    max_arity: usize,
    density: f64,
) -> MorphismComponents {
    let comps = (1..=max_arity)
        .map(|n| random_map(rng, n, source.clone(), target.clone(), 0, Symmetry::Symmetric, density))
        .collect();
    MorphismComponents::new(source, target, comps).expect("random components are well formed")
}
