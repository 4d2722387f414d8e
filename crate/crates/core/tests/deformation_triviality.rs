//! Deformations over contractible bases and over split bases.

use std::sync::Arc;

use linfty_core::deformation::{
    check_deformation_morphism, deformation_from_morphism, is_trivial_candidate, restrict_to_summand, tangent_complex,
    Deformation, FormalDgManifold, TangentComplex, Window,
};
use linfty_core::report::Status;
use linfty_core::scalar::int;
use linfty_core::{check_equivariance, CoderivationComponents, GradedModule, MorphismComponents, MultiMap, Scalar, Symmetry, Vector};
use proptest::prelude::*;

fn manifold(module: Arc<GradedModule>, linear: &[(usize, usize)], max_arity: usize) -> FormalDgManifold {
    let mut q1 = MultiMap::zero(1, module.clone(), module.clone(), 1, Symmetry::Symmetric);
    for &(from, to) in linear {
        q1.insert(&[from], &Vector::basis(to)).unwrap();
    }
    let mut comps = vec![q1];
    for n in 2..=max_arity {
        comps.push(MultiMap::zero(n, module.clone(), module.clone(), 1, Symmetry::Symmetric));
    }
    FormalDgManifold::new(CoderivationComponents::new(module, comps).unwrap()).unwrap()
}

fn quadratic_tangent() -> TangentComplex {
    let m = Arc::new(GradedModule::from_basis([(0, "x"), (1, "y")]).unwrap());
    let mut comps: Vec<MultiMap> = (1..=4).map(|n| MultiMap::zero(n, m.clone(), m.clone(), 1, Symmetry::Symmetric)).collect();
    comps[1].insert(&[0, 0], &Vector::basis(1)).unwrap();
    let fiber = FormalDgManifold::new(CoderivationComponents::new(m, comps).unwrap()).unwrap();
    tangent_complex(&fiber, Window::default()).unwrap()
}

/// The tangent vector `x ↦ y`, a cocycle with `[u, u] = 0`.
fn linear_vector(t: &TangentComplex) -> usize {
    (0..t.suspension().dim()).find(|&i| t.suspension().label(i) == "y<x").unwrap()
}

/// Base `{a: 0, b: 1}` with `Q_1(a) = b`, classified by `a ↦ c·u`.
fn over_contractible_base(t: &TangentComplex, c: &Scalar) -> Deformation {
    let b = Arc::new(GradedModule::from_basis([(0, "a"), (1, "b")]).unwrap());
    let base = manifold(b.clone(), &[(0, 1)], 4);
    let mut f1 = MultiMap::zero(1, b, t.suspension().clone(), 0, Symmetry::Symmetric);
    f1.insert(&[0], &Vector::basis(linear_vector(t)).scaled(c)).unwrap();
    let f = MorphismComponents::strict(f1, 3).unwrap();
    deformation_from_morphism(&base, &f, t, 4).unwrap()
}

#[test]
fn contractible_base_with_vanishing_linear_part_is_trivial() {
    let t = quadratic_tangent();
    let deformation = over_contractible_base(&t, &int(1));
    assert!(!deformation.is_product());
    let report = is_trivial_candidate(&deformation).unwrap();
    assert_eq!(report.status, Status::Pass);
    let q = report.trivializer.unwrap();
    assert_eq!(q.component(1), &MultiMap::identity(deformation.product().module().clone()));
    assert!(check_equivariance(&q, &deformation.product_structure(), &deformation.total()).unwrap().holds());
}

#[test]
fn criterion_does_not_apply_with_homology_in_the_base() {
    let t = quadratic_tangent();
    let b = Arc::new(GradedModule::from_basis([(0, "a")]).unwrap());
    let base = manifold(b.clone(), &[], 4);
    let mut f1 = MultiMap::zero(1, b, t.suspension().clone(), 0, Symmetry::Symmetric);
    f1.insert(&[0], &Vector::basis(linear_vector(&t))).unwrap();
    let deformation = deformation_from_morphism(&base, &MorphismComponents::strict(f1, 3).unwrap(), &t, 4).unwrap();
    assert_eq!(is_trivial_candidate(&deformation).unwrap().status, Status::NotApplicable);
}

#[test]
fn restriction_to_a_summand_with_contractible_complement() {
    let t = quadratic_tangent();
    let u = linear_vector(&t);
    let b = Arc::new(GradedModule::from_basis([(0, "c"), (0, "a"), (1, "b")]).unwrap());
    let base = manifold(b.clone(), &[(1, 2)], 4);
    let mut f1 = MultiMap::zero(1, b, t.suspension().clone(), 0, Symmetry::Symmetric);
    f1.insert(&[0], &Vector::basis(u)).unwrap();
    f1.insert(&[1], &Vector::basis(u).scaled(&int(2))).unwrap();
    let deformation = deformation_from_morphism(&base, &MorphismComponents::strict(f1, 3).unwrap(), &t, 4).unwrap();
    let split = restrict_to_summand(&deformation, &[0]).unwrap();
    assert_eq!(split.restricted.base().module().dim(), 1);
    assert_eq!(check_deformation_morphism(&split.restricted, &deformation, &split.inclusion).unwrap(), None);
    let back = split.retraction.expect("complement is contractible");
    assert_eq!(check_deformation_morphism(&deformation, &split.restricted, &back).unwrap(), None);
}

#[test]
fn restriction_rejects_a_non_split_base() {
    let t = quadratic_tangent();
    let b = Arc::new(GradedModule::from_basis([(0, "c"), (1, "b")]).unwrap());
    let base = manifold(b, &[(0, 1)], 4);
    let deformation = Deformation::trivial(base, t.fiber().clone());
    assert!(restrict_to_summand(&deformation, &[0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn trivializer_exists_for_every_scale(c in -4i64..=4) {
        let t = quadratic_tangent();
        let deformation = over_contractible_base(&t, &int(c));
        let report = is_trivial_candidate(&deformation).unwrap();
        prop_assert_eq!(report.status, Status::Pass);
    }
}

#[test]
fn product_deformation_over_contractible_base_is_trivialized() {
    let t = quadratic_tangent();
    let b = Arc::new(GradedModule::from_basis([(0, "a"), (1, "b")]).unwrap());
    let deformation = Deformation::trivial(manifold(b, &[(0, 1)], 4), t.fiber().clone());
    let report = is_trivial_candidate(&deformation).unwrap();
    assert_eq!(report.status, Status::Pass);
    assert!(report.trivializer.is_some());
}
