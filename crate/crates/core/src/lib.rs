//! Exact-arithmetic engine for L∞-algebras.
//!
//! Everything is computed over ℚ with zero tolerance and truncated at a
//! user-chosen arity bound.

pub mod error;
pub mod catalog;
pub mod coalgebra;
pub mod deformation;
pub mod graded;
pub mod io;
pub mod lincomb;
pub mod linalg;
pub mod linfty;
pub mod multimap;
pub mod random;
pub mod report;
pub mod scalar;
mod solver;
pub mod transfer;
pub mod trees;

pub use error::{Error, Result};
pub use graded::{
    canonicalize, chi_sign, decalage_inverse_sign, decalage_sign, enumerate_shuffles, epsilon_sign, BasisTuple,
    Component, GradedModule, Permutation, Symmetry,
};
pub use lincomb::{LinComb, Vector, WordComb};
pub use multimap::{canonical_words, koszul_apply, word_product, MultiMap, Slot};
pub use scalar::Scalar;
pub use coalgebra::{
    check_equivariance, coderivation_block, coderivation_square, commutator, compose_coderivations, compose_formal,
    expand_coderivation, expand_morphism, morphism_multi_index, CoalgebraMap, CoderivationComponents,
    MorphismComponents,
};
pub use report::{CheckReport, Failure, Status};
pub use trees::{
    add_trees, compose_trees, enumerate_ot, evaluate, sign_e, subtract_tree, weight_w, BilinearFamily, Node,
    NodeValue, OrientedTree, SixTuple, Triple,
};
pub use linfty::{
    check_linfty, check_lmorphism, check_lmorphism_dgl, delta_hom, obstruction_r, shift_structure, unshift_structure,
    Dgl, DglAxiom, LInftyAlgebra, LInftyMorphism,
};
pub use transfer::{
    build_splitting, contractible_factor, decompose, invert_formal, lift, lift_with_linear, minimal_model, strictify, transfer_morphism,
    ContractibleFactor, Decomposition, HodgeData, LiftSquare, Splitting,
};
