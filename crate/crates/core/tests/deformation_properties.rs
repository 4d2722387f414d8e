//! Independent checks of the deformation constructions: dimension counts, the
//! cancellation cases behind `Q̃² = 0`, correspondence roundtrips and base change.

use std::sync::Arc;

use linfty_core::catalog::contractible_pair;
use linfty_core::deformation::{
    base_change, check_deformation_morphism, classifying_morphism, deformation_from_morphism, tangent_base,
    tangent_complex, unidef_correspondence, universal_deformation, window_truncate, Deformation, FormalDgManifold,
    TangentComplex, Window,
};
use linfty_core::linalg::kernel;
use linfty_core::random::{random_module, seeded, small_nonzero};
use linfty_core::scalar::int;
use linfty_core::{
    coalgebra::compose_coderivations, compose_formal, CoderivationComponents, GradedModule, MorphismComponents,
    MultiMap, Scalar, Symmetry, Vector,
};
use proptest::prelude::*;

fn quadratic_fiber() -> FormalDgManifold {
    let m = Arc::new(GradedModule::from_basis([(0, "x"), (1, "y")]).unwrap());
    let mut comps: Vec<MultiMap> = (1..=4).map(|n| MultiMap::zero(n, m.clone(), m.clone(), 1, Symmetry::Symmetric)).collect();
    comps[1].insert(&[0, 0], &Vector::basis(1)).unwrap();
    FormalDgManifold::new(CoderivationComponents::new(m, comps).unwrap()).unwrap()
}

fn quadratic_tangent() -> TangentComplex {
    tangent_complex(&quadratic_fiber(), Window::default()).unwrap()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim S^n(M)` from the counts of even and odd coordinates.
fn sym_power_dim(even: usize, odd: usize, n: usize) -> usize {
    (0..=n).map(|j| multiset(even, j) * binomial(odd, n - j)).sum()
}

fn multiset(kinds: usize, j: usize) -> usize {
    if kinds == 0 {
        return usize::from(j == 0);
    }
    binomial(kinds + j - 1, j)
}

#[test]
fn tangent_dimension_matches_the_count_of_hom_spaces() {
    for seed in 0..6u64 {
        let mut rng = seeded(seed);
        let dim = 1 + seed as usize % 2;
        let module = Arc::new(random_module(&mut rng, dim, -1..=2, "m"));
        let even = module.degrees().iter().filter(|d| *d % 2 == 0).count();
        let odd = dim - even;
        for p in 1..=3 {
            let window = Window::new(p + 1, p).unwrap();
            let t = tangent_complex(&FormalDgManifold::trivial(module.clone(), 4), window).unwrap();
            let expected: usize = (1..=p).map(|n| sym_power_dim(even, odd, n) * dim).sum();
            assert_eq!(t.module().dim(), expected, "seed {seed}, P = {p}");
            assert!(t.dgl().differential().is_zero());
        }
    }
}

#[test]
fn single_even_coordinate_has_zero_differential() {
    let m = Arc::new(GradedModule::from_basis([(0, "x")]).unwrap());
    let t = tangent_complex(&FormalDgManifold::trivial(m, 4), Window::default()).unwrap();
    assert_eq!(t.module().dim(), 3);
    assert!(t.dgl().differential().is_zero());
    // s = id on x, t(x⊙x) = x: (s∘t)(x⊙x) = x and (t∘s)(x⊙x) = 2x.
    let field = |label: &str| t.module().index_of(label).unwrap();
    let value = t.dgl().bracket().eval(&[field("x<x"), field("x<x,x")]);
    assert_eq!(value, Vector::single(field("x<x,x"), int(-1)));
}

#[test]
fn differential_squares_to_zero_with_nonzero_fiber_structure() {
    for fiber in [quadratic_fiber(), FormalDgManifold::from_linfty(&contractible_pair(0).to_linfty(4))] {
        let t = tangent_complex(&fiber, Window::default()).unwrap();
        let d = t.dgl().differential();
        assert!(!d.is_zero());
        for i in 0..t.module().dim() {
            assert!(d.eval_vectors(&[d.eval(&[i])]).is_zero());
        }
    }
}

fn base_letters(d: &Deformation, word: &[usize]) -> usize {
    d.product().split(word).1.len()
}

#[test]
fn one_base_letter_case_cancels_across_three_sums() {
    let t = quadratic_tangent();
    let universal = universal_deformation(&t).unwrap();
    let product = universal.product();
    let qm = product.embed_fiber_field(universal.fiber().vector_field());
    let qu = product.embed_base_field(universal.base().vector_field());
    let q = universal.perturbation();
    let s1 = compose_coderivations(&qm, q).unwrap();
    let s2 = compose_coderivations(q, &qm).unwrap();
    let s3 = compose_coderivations(q, &qu).unwrap();
    let mut nonzero = [false; 3];
    for n in 1..=4 {
        for word in linfty_core::canonical_words(product.module(), n, Symmetry::Symmetric) {
            if base_letters(&universal, &word) != 1 {
                continue;
            }
            let parts = [s1[n - 1].eval(&word), s2[n - 1].eval(&word), s3[n - 1].eval(&word)];
            for (flag, part) in nonzero.iter_mut().zip(&parts) {
                *flag |= !part.is_zero();
            }
            let mut total = parts[0].clone();
            total.add_assign(&parts[1]);
            total.add_assign(&parts[2]);
            assert!(total.is_zero(), "word {word:?}");
        }
    }
    assert_eq!(nonzero, [true; 3]);
}

#[test]
fn two_base_letter_case_cancels_against_the_bracket() {
    let t = quadratic_tangent();
    let universal = universal_deformation(&t).unwrap();
    let product = universal.product();
    let qu = product.embed_base_field(universal.base().vector_field());
    let q = universal.perturbation();
    let qq = compose_coderivations(q, q).unwrap();
    let qb = compose_coderivations(q, &qu).unwrap();
    let mut nontrivial = false;
    for n in 2..=4 {
        for word in linfty_core::canonical_words(product.module(), n, Symmetry::Symmetric) {
            if base_letters(&universal, &word) != 2 {
                continue;
            }
            let left = qq[n - 1].eval(&word);
            nontrivial |= !left.is_zero();
            let mut total = left;
            total.add_assign(&qb[n - 1].eval(&word));
            assert!(total.is_zero(), "word {word:?}");
        }
    }
    assert!(nontrivial);
}

#[test]
fn trivial_deformation_is_classified_by_zero() {
    let t = quadratic_tangent();
    let b = Arc::new(GradedModule::from_basis([(-1, "c"), (0, "a")]).unwrap());
    let d = Deformation::trivial(FormalDgManifold::trivial(b, 4), t.fiber().clone());
    let f = unidef_correspondence(&d, &t).unwrap();
    assert!(f.components().iter().all(MultiMap::is_zero));
}

/// A random cocycle of `U` in degree −1.
fn random_cocycle(t: &TangentComplex, seed: u64) -> Vector {
    let u = tangent_base(t);
    let dq = u.linear_part();
    let columns: Vec<usize> = t.suspension().indices_of_degree(-1).collect();
    let mut rows = vec![Vector::new(); t.suspension().dim()];
    for (local, &c) in columns.iter().enumerate() {
        for (&j, coeff) in dq.eval(&[c]).iter() {
            rows[j].add_term(local, coeff.clone());
        }
    }
    let basis = kernel(&rows, columns.len());
    let mut rng = seeded(seed);
    let mut out = Vector::new();
    for v in &basis {
        let c = small_nonzero(&mut rng, 3);
        for (&local, coeff) in v.iter() {
            out.add_term(columns[local], coeff * &c);
        }
    }
    out
}

fn odd_line_morphism(t: &TangentComplex, u: &Vector) -> (FormalDgManifold, MorphismComponents) {
    let b = Arc::new(GradedModule::from_basis([(-1, "t")]).unwrap());
    let mut f1 = MultiMap::zero(1, b.clone(), t.suspension().clone(), 0, Symmetry::Symmetric);
    f1.insert(&[0], u).unwrap();
    (FormalDgManifold::trivial(b, 4), MorphismComponents::strict(f1, 3).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn correspondence_is_a_bijection_on_the_window(seed in 0u64..1000) {
        let t = quadratic_tangent();
        let u = random_cocycle(&t, seed);
        prop_assert!(!u.is_zero());
        let (base, f) = odd_line_morphism(&t, &u);
        let deformation = deformation_from_morphism(&base, &f, &t, 4).unwrap();
        let back = unidef_correspondence(&deformation, &t).unwrap();
        prop_assert_eq!(&back, &window_truncate(&f, &t, 4).unwrap());
        let again = deformation_from_morphism(&base, &back, &t, 4).unwrap();
        prop_assert_eq!(again.perturbation(), deformation.perturbation());
        let universal = universal_deformation(&t).unwrap();
        let morphism = classifying_morphism(&deformation, &universal, &back).unwrap();
        prop_assert_eq!(check_deformation_morphism(&deformation, &universal, &morphism).unwrap(), None);
    }
}

#[test]
fn the_classifying_morphism_is_unique_on_the_window() {
    let t = quadratic_tangent();
    let u = random_cocycle(&t, 7);
    let (base, f) = odd_line_morphism(&t, &u);
    let deformation = deformation_from_morphism(&base, &f, &t, 4).unwrap();
    let universal = universal_deformation(&t).unwrap();
    let (_, other) = odd_line_morphism(&t, &u.scaled(&int(2)));
    let morphism = classifying_morphism(&deformation, &universal, &other).unwrap();
    assert!(check_deformation_morphism(&deformation, &universal, &morphism).unwrap().is_some());
}

fn even_line(label: &str) -> FormalDgManifold {
    FormalDgManifold::trivial(Arc::new(GradedModule::from_basis([(0, label)]).unwrap()), 4)
}

fn line_map(source: &FormalDgManifold, target: &FormalDgManifold, coeffs: &[Scalar]) -> MorphismComponents {
    let comps = (1..=4)
        .map(|n| {
            let mut c = MultiMap::zero(n, source.module().clone(), target.module().clone(), 0, Symmetry::Symmetric);
            if let Some(k) = coeffs.get(n - 1) {
                c.insert(&vec![0; n], &Vector::single(0, k.clone())).unwrap();
            }
            c
        })
        .collect();
    MorphismComponents::new(source.module().clone(), target.module().clone(), comps).unwrap()
}

/// The deformation over an even line classified by `a ↦ (x ↦ y)`.
fn over_even_line(t: &TangentComplex) -> Deformation {
    let base = even_line("a");
    let u = t.suspension().index_of("y<x").unwrap();
    let mut f1 = MultiMap::zero(1, base.module().clone(), t.suspension().clone(), 0, Symmetry::Symmetric);
    f1.insert(&[0], &Vector::basis(u)).unwrap();
    deformation_from_morphism(&base, &MorphismComponents::strict(f1, 3).unwrap(), t, 4).unwrap()
}

#[test]
fn base_change_along_identity_and_zero() {
    let t = quadratic_tangent();
    let d = over_even_line(&t);
    let (same, _) = base_change(&d, d.base(), &MorphismComponents::identity(d.base().module().clone(), 4)).unwrap();
    assert_eq!(same.perturbation(), d.perturbation());
    let (product, morphism) = base_change(&d, d.base(), &line_map(d.base(), d.base(), &[])).unwrap();
    assert!(product.is_product());
    assert_eq!(check_deformation_morphism(&product, &d, &morphism).unwrap(), None);
}

#[test]
fn base_change_is_functorial() {
    let t = quadratic_tangent();
    let d = over_even_line(&t);
    let (middle, outer) = (even_line("t"), even_line("s"));
    let g = line_map(&middle, d.base(), &[int(2), int(1)]);
    let f = line_map(&outer, &middle, &[int(3), int(-1), int(5)]);
    let (over_middle, _) = base_change(&d, &middle, &g).unwrap();
    let (stepwise, _) = base_change(&over_middle, &outer, &f).unwrap();
    let (direct, morphism) = base_change(&d, &outer, &compose_formal(&g, &f).unwrap()).unwrap();
    assert_eq!(stepwise.perturbation(), direct.perturbation());
    assert!(!direct.is_product());
    assert_eq!(check_deformation_morphism(&direct, &d, &morphism).unwrap(), None);
}

#[test]
fn base_change_rejects_a_non_dg_map() {
    let t = quadratic_tangent();
    let d = over_even_line(&t);
    let b = Arc::new(GradedModule::from_basis([(-1, "c"), (0, "a")]).unwrap());
    let mut q1 = MultiMap::zero(1, b.clone(), b.clone(), 1, Symmetry::Symmetric);
    q1.insert(&[0], &Vector::basis(1)).unwrap();
    let base = FormalDgManifold::new(CoderivationComponents::new(b.clone(), vec![q1]).unwrap()).unwrap();
    let mut f1 = MultiMap::zero(1, b, d.base().module().clone(), 0, Symmetry::Symmetric);
    f1.insert(&[1], &Vector::basis(0)).unwrap();
    let f = MorphismComponents::strict(f1, 4).unwrap();
    assert!(matches!(base_change(&d, &base, &f), Err(linfty_core::Error::Precondition(_))));
}
