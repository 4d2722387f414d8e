//! Structure and morphism checkers, the décalage dictionary and the
//! obstruction calculus.

mod common;

use std::sync::Arc;

use common::display::display_residual;
use common::transfer::perturbed_prefixes;
use linfty_core::catalog::{massey, random_dgl, sl2};
use linfty_core::coalgebra::{compose_formal, MorphismComponents};
use linfty_core::linfty::{check_linfty_shifted, suspension};
use linfty_core::random::{random_map, random_module, seeded};
use linfty_core::{
    build_splitting, canonical_words, check_linfty, check_lmorphism, check_lmorphism_dgl, contractible_factor,
    decompose, delta_hom, lift, minimal_model, obstruction_r, shift_structure, transfer_morphism, unshift_structure,
    CoderivationComponents, Dgl, DglAxiom, Error, GradedModule, HodgeData, LInftyAlgebra, LInftyMorphism, LiftSquare,
    MultiMap, Scalar, Symmetry, Vector,
};
use num_traits::One;
use proptest::prelude::*;

fn hodge(dgl: &Dgl) -> HodgeData {
    HodgeData::new(dgl, &build_splitting(dgl)).unwrap()
}

fn random_family(seed: u64, arity: usize) -> (Arc<GradedModule>, Vec<MultiMap>) {
    let mut rng = seeded(seed);
    let module = Arc::new(random_module(&mut rng, 3, -1..=2, "v"));
    let mu = (1..=arity)
        .map(|n| random_map(&mut rng, n, module.clone(), module.clone(), 2 - n as i64, Symmetry::Exterior, 0.5))
        .collect();
    (module, mu)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decalage_roundtrip(seed in any::<u64>()) {
        let (module, mu) = random_family(seed, 3);
        let q = shift_structure(&module, &mu).unwrap();
        let back = unshift_structure(&module, &q).unwrap();
        for (a, b) in mu.iter().zip(&back) {
            prop_assert!(a.same_values(b));
        }
    }

    #[test]
    fn both_structure_checkers_agree(seed in any::<u64>()) {
        let (module, mu) = random_family(seed, 3);
        let algebra = LInftyAlgebra::unchecked(module, mu).unwrap();
        prop_assert_eq!(check_linfty(&algebra).holds(), check_linfty_shifted(&algebra).holds());
    }
}

#[test]
fn low_arity_decalage_signs() {
    let (module, mu) = random_family(17, 2);
    let q = shift_structure(&module, &mu).unwrap();
    for i in 0..module.dim() {
        assert_eq!(q.component(1).eval(&[i]), mu[0].eval(&[i]));
    }
    // (−1)^{n(n−1)/2} = −1, and ↑² passes the suspension of ↓a past the first ↑.
    for word in canonical_words(&module, 2, Symmetry::Plain) {
        let odd = module.degree(word[0]).rem_euclid(2) == 1;
        let expected = if odd { mu[1].eval(&word).negated() } else { mu[1].eval(&word) };
        assert_eq!(q.component(2).eval(&word), expected);
    }
}

#[test]
fn dgls_and_zero_families_are_linfty() {
    for seed in 0..10 {
        let algebra = random_dgl(&mut seeded(seed)).to_linfty(4);
        assert!(check_linfty(&algebra).holds() && check_linfty_shifted(&algebra).holds());
    }
    let (module, mu) = random_family(3, 3);
    let zero: Vec<MultiMap> = mu.iter().map(|m| m.scaled(&Scalar::from_integer(0.into()))).collect();
    assert!(check_linfty(&LInftyAlgebra::unchecked(module, zero).unwrap()).holds());
}

/// `[h,e] = 2e`, `[h,f] = −2f`, `[e,f] = h + e`: the Jacobiator on `(e,f,h)` is `2e`.
/// No two-dimensional graded bracket can fail Jacobi, so this is the smallest example.
#[test]
fn jacobi_violation_fails_at_arity_three() {
    let module = sl2().module().clone();
    let idx = |l: &str| module.index_of(l).unwrap();
    let mut bracket = sl2().bracket().clone();
    let mut ef = Vector::basis(idx("h"));
    ef.add_term(idx("e"), Scalar::one());
    bracket.insert(&[idx("e"), idx("f")], &ef).unwrap();
    let d = MultiMap::zero(1, module.clone(), module.clone(), 1, Symmetry::Symmetric);
    let violation = Dgl::first_violation(&d, &bracket).unwrap().unwrap();
    assert_eq!(violation.0, DglAxiom::Jacobi);
    assert!(matches!(Dgl::new(d.clone(), bracket.clone()), Err(Error::Precondition(_))));
    let mu3 = MultiMap::zero(3, module.clone(), module.clone(), -1, Symmetry::Exterior);
    let algebra = LInftyAlgebra::unchecked(module, vec![d.relabel_symmetry(Symmetry::Exterior), bracket, mu3]).unwrap();
    assert_eq!(check_linfty(&algebra).failing_arity(), Some(3));
    assert_eq!(check_linfty_shifted(&algebra).failing_arity(), Some(3));
}

fn transfer_of(dgl: &Dgl, arity: usize) -> LInftyMorphism {
    let h = hodge(dgl);
    let m = minimal_model(&h, arity).unwrap();
    transfer_morphism(&h, &m).unwrap()
}

fn display_holds(morphism: &LInftyMorphism) -> bool {
    (1..=morphism.max_arity()).all(|n| {
        canonical_words(morphism.source().module(), n, Symmetry::Exterior)
            .iter()
            .all(|w| display_residual(morphism, w).is_zero())
    })
}

#[test]
fn identity_morphism_passes() {
    let algebra = massey(1, 1, 1).to_linfty(3);
    let id: Vec<MultiMap> = (1..=3)
        .map(|n| {
            if n == 1 {
                MultiMap::identity(algebra.module().clone()).relabel_symmetry(Symmetry::Exterior)
            } else {
                MultiMap::zero(n, algebra.module().clone(), algebra.module().clone(), 1 - n as i64, Symmetry::Exterior)
            }
        })
        .collect();
    let morphism = LInftyMorphism::new(algebra.clone(), algebra, id).unwrap();
    assert!(check_lmorphism(&morphism).unwrap().holds());
}

#[test]
fn doubled_linear_part_fails_on_both_paths() {
    for (i, dgl) in [massey(1, 1, 1), random_dgl(&mut seeded(2)), random_dgl(&mut seeded(4))].into_iter().enumerate() {
        let f = transfer_of(&dgl, 3);
        let mut comps = f.components().to_vec();
        let v = comps[0].eval(&[0]).scaled(&Scalar::from_integer(2.into()));
        comps[0].insert(&[0], &v).unwrap();
        let broken = LInftyMorphism::unchecked(f.source().clone(), f.target().clone(), comps).unwrap();
        let coalgebra = check_lmorphism(&broken).unwrap().holds();
        assert_eq!(coalgebra, check_lmorphism_dgl(&broken, &dgl).unwrap().holds());
        assert_eq!(coalgebra, display_holds(&broken));
        if i == 0 {
            assert!(!coalgebra, "[2a, b] = 2w while d f_2(a, b) = −w");
        }
    }
}

#[test]
fn general_display_agrees_on_transfer_morphisms() {
    for seed in 0..10 {
        let dgl = random_dgl(&mut seeded(seed));
        let f = transfer_of(&dgl, 3);
        assert!(display_holds(&f), "seed {seed}");
        assert!(check_lmorphism_dgl(&f, &dgl).unwrap().holds());
    }
}

#[test]
fn general_display_agrees_on_a_morphism_into_a_minimal_model() {
    for dgl in [massey(1, 1, 1), massey(0, 1, 0)] {
        let h = hodge(&dgl);
        let m = minimal_model(&h, 3).unwrap();
        assert!(!m.mu(3).is_zero());
        let f = transfer_morphism(&h, &m).unwrap();
        let l = dgl.to_linfty(3);
        let zero = Arc::new(GradedModule::zero());
        let zero_from = |s: &Arc<GradedModule>| {
            let comps = (1..=3).map(|n| MultiMap::zero(n, s.clone(), zero.clone(), 0, Symmetry::Symmetric)).collect();
            MorphismComponents::new(s.clone(), zero.clone(), comps).unwrap()
        };
        let square = LiftSquare {
            qa: m.shifted().clone(),
            qb: l.shifted().clone(),
            qc: m.shifted().clone(),
            qd: CoderivationComponents::zero(zero.clone(), 1, 3),
            c: MorphismComponents::identity(m.shifted().module().clone(), 3),
            f: f.shifted().clone(),
            e: zero_from(m.shifted().module()),
            d: zero_from(l.shifted().module()),
        };
        let g = lift(&square).unwrap();
        let g = LInftyMorphism::from_shifted(l, m, g).unwrap();
        assert!(check_lmorphism(&g).unwrap().holds());
        assert!(display_holds(&g));
        let mut comps = g.components().to_vec();
        comps[1] = comps[1].scaled(&Scalar::from_integer(3.into()));
        let broken = LInftyMorphism::unchecked(g.source().clone(), g.target().clone(), comps).unwrap();
        assert_eq!(check_lmorphism(&broken).unwrap().holds(), display_holds(&broken));
    }
}

#[test]
fn delta_examples() {
    for seed in 0..8 {
        let dgl = random_dgl(&mut seeded(seed));
        let q = dgl.to_linfty(2).shifted().clone();
        let (w, q1) = (q.module().clone(), q.component(1).clone());
        let mut rng = seeded(seed + 50);
        for (arity, degree) in [(1, 0), (2, 0), (2, -1), (3, 1)] {
            let g = random_map(&mut rng, arity, w.clone(), w.clone(), degree, Symmetry::Symmetric, 0.5);
            let dg = delta_hom(&g, &q1, &q1).unwrap();
            assert!(delta_hom(&dg, &q1, &q1).unwrap().is_zero(), "δδ = 0");
            let zero = MultiMap::zero(arity, w.clone(), w.clone(), degree, Symmetry::Symmetric);
            assert!(delta_hom(&zero, &q1, &q1).unwrap().is_zero());
        }
        // Chain maps: the differential itself and the Hodge projector.
        assert!(delta_hom(&q1, &q1, &q1).unwrap().is_zero());
        let p = hodge(&dgl).projector().with_modules(w.clone(), w.clone(), 0);
        assert!(delta_hom(&p, &q1, &q1).unwrap().is_zero());
    }
}

#[test]
fn truncated_morphisms_satisfy_the_recursion() {
    for seed in 0..8 {
        let dgl = random_dgl(&mut seeded(seed));
        let f = transfer_of(&dgl, 4);
        let (qh, ql) = (f.source().shifted(), f.target().shifted());
        for n in 2..=4 {
            let prefix = f.shifted().truncated(n - 1);
            let r = obstruction_r(&prefix, &qh.truncated(n), &ql.truncated(n)).unwrap();
            let df = delta_hom(f.shifted().component(n), qh.component(1), ql.component(1)).unwrap();
            assert!(df.same_values(&r), "seed {seed}, n = {n}");
        }
    }
}

#[test]
fn obstruction_is_a_cycle() {
    for (prefix, q, q_target) in perturbed_prefixes(20) {
        let r = obstruction_r(&prefix, &q, &q_target).unwrap();
        assert!(delta_hom(&r, q.component(1), q_target.component(1)).unwrap().is_zero());
    }
}

#[test]
fn obstruction_rejects_a_broken_prefix() {
    let dgl = massey(1, 1, 1);
    let f = transfer_of(&dgl, 3);
    let mut comps = f.shifted().truncated(2).components().to_vec();
    comps[1] = comps[1].scaled(&Scalar::from_integer(5.into()));
    let prefix = MorphismComponents::new(comps[0].source().clone(), comps[0].target().clone(), comps).unwrap();
    let err = obstruction_r(&prefix, f.source().shifted(), f.target().shifted());
    assert!(matches!(err, Err(Error::Precondition(_))));
}

#[test]
fn obstruction_under_strict_composition() {
    for seed in [0u64, 3, 5, 8] {
        let dgl = random_dgl(&mut seeded(seed));
        let h = hodge(&dgl);
        let m = minimal_model(&h, 3).unwrap();
        let f = transfer_morphism(&h, &m).unwrap();
        let factor = contractible_factor(&h, 3).unwrap();
        let dec = decompose(&h, &m, &f, &factor).unwrap();
        let ql = dgl.to_linfty(3).shifted().clone();
        let wh = suspension(h.homology());
        // Strict inclusion H → H × F and strict projection H × F → H.
        let incl = MultiMap::from_fn(1, wh.clone(), dec.sum.clone(), 0, Symmetry::Symmetric, |w| Vector::basis(dec.h_positions[w[0]]));
        let proj = MultiMap::from_fn(1, dec.sum.clone(), wh.clone(), 0, Symmetry::Symmetric, |w| {
            dec.h_positions.iter().position(|&p| p == w[0]).map(Vector::basis).unwrap_or_default()
        });
        let incl = MorphismComponents::strict(incl, 3).unwrap();
        let proj = MorphismComponents::strict(proj, 3).unwrap();
        for n in 2..=3 {
            let g = dec.morphism.truncated(n - 1);
            let gf = compose_formal(&g, &incl).unwrap();
            let left = obstruction_r(&gf, &m.shifted().truncated(n), &ql.truncated(n)).unwrap();
            let right = obstruction_r(&g, &dec.product.truncated(n), &ql.truncated(n)).unwrap();
            assert!(left.same_values(&right.precompose_linear(incl.component(1)).unwrap()));

            let g = dec.inverse.truncated(n - 1);
            let eg = compose_formal(&proj, &g).unwrap();
            let left = obstruction_r(&eg, &ql.truncated(n), &m.shifted().truncated(n)).unwrap();
            let right = obstruction_r(&g, &ql.truncated(n), &dec.product.truncated(n)).unwrap();
            assert!(left.same_values(&right.then(proj.component(1)).unwrap()));
        }
    }
}
