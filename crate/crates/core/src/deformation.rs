//! Formal DG manifolds, deformations over DG bases, base change, the tangent
//! complex, the universal deformation on `U = L[1]` and the semiuniversal
//! deformation on `V = H[1]`.
//!
//! A product `B × M` is the tagged direct sum of the two modules: base letters
//! carry [`BASE_TAG`], fiber letters [`FIBER_TAG`]. Every component lives on
//! the product, so the image condition `im(Q) ⊆ {0} × M` is a check on output
//! tags.
//!
//! The tangent complex keeps coderivation components of polynomial degree
//! `1..=P` and drops the rest. Components of degree `> P` form an ideal, so the
//! window is a DGL on the nose. A base coordinate of `U` of polynomial degree
//! `k` is only meaningful together with `k` fiber arguments; identities into a
//! universal base are asserted on arity `n` only for coordinates with `n + k ≤ A`.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coalgebra::{
    apply_after_power, check_equivariance, coderivation_square, commutator, equivariance_sides, CoderivationComponents,
    MorphismComponents,
};
use crate::error::{argument, precondition, Error, Result};
use crate::graded::{action_sign_for, GradedModule, Permutation, Symmetry};
use crate::lincomb::Vector;
use crate::linfty::{Dgl, LInftyAlgebra, LInftyMorphism};
use crate::multimap::{canonical_words, MultiMap};
use crate::report::{CheckReport, Failure, Status};
use crate::scalar::{factorial, minus_one_pow, Scalar};
use crate::transfer::{build_splitting, invert_formal, lift, lift_with_linear, minimal_model, transfer_morphism, HodgeData, LiftSquare};

pub const BASE_TAG: &str = "B:";
pub const FIBER_TAG: &str = "M:";

/// Arity bound `A` of structures and polynomial bound `P` of tangent vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub arity: usize,
    pub poly_degree: usize,
}

impl Default for Window {
    fn default() -> Self {
        Self { arity: 4, poly_degree: 3 }
    }
}

impl Window {
    /// The universal deformation over a `P`-window is exact up to arity `P + 1`.
    pub fn new(arity: usize, poly_degree: usize) -> Result<Self> {
        if arity < 2 || poly_degree < 1 {
            return argument("the window needs arity ≥ 2 and polynomial degree ≥ 1");
        }
        if arity > poly_degree + 1 {
            return argument(format!("arity {arity} exceeds polynomial degree {poly_degree} + 1"));
        }
        Ok(Self { arity, poly_degree })
    }
}

fn first_entry(comps: &[MultiMap]) -> Option<Failure> {
    comps.iter().find_map(|c| {
        c.entries().iter().next().map(|(word, value)| Failure { arity: c.arity(), word: word.clone(), residual: value.clone() })
    })
}

/// A graded module with a degree `+1` vector field `Q`, `Q_0 = 0`, `[Q,Q] = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalDgManifold {
    vector_field: CoderivationComponents,
}

impl FormalDgManifold {
    /// Asserts `Q² = 0` up to the truncation of `Q`.
    pub fn new(vector_field: CoderivationComponents) -> Result<Self> {
        if vector_field.degree() != 1 {
            return argument("a DG structure has degree 1");
        }
        if vector_field.curvature().is_some() {
            return precondition("only local formal DG manifolds (Q_0 = 0) are supported");
        }
        if let Some(f) = first_entry(coderivation_square(&vector_field).components()) {
            return precondition(format!("[Q,Q] ≠ 0 at arity {} on {:?}", f.arity, f.word));
        }
        Ok(Self { vector_field })
    }

    pub fn unchecked(vector_field: CoderivationComponents) -> Self {
        Self { vector_field }
    }

    pub fn from_linfty(algebra: &LInftyAlgebra) -> Self {
        Self { vector_field: algebra.shifted().clone() }
    }

    /// `(M, 0)` truncated at `max_arity`.
    pub fn trivial(module: Arc<GradedModule>, max_arity: usize) -> Self {
        Self { vector_field: CoderivationComponents::zero(module, 1, max_arity) }
    }

    /// The L∞-algebra on `M[−1]`.
    pub fn to_linfty(&self) -> Result<LInftyAlgebra> {
        let module = Arc::new(self.module().shifted(-1));
        LInftyAlgebra::from_shifted(module, self.vector_field.clone())
    }

    pub fn module(&self) -> &Arc<GradedModule> {
        self.vector_field.module()
    }

    pub fn vector_field(&self) -> &CoderivationComponents {
        &self.vector_field
    }

    pub fn max_arity(&self) -> usize {
        self.vector_field.max_arity()
    }

    pub fn truncated(&self, max_arity: usize) -> Self {
        Self { vector_field: self.vector_field.truncated(max_arity) }
    }

    pub fn linear_part(&self) -> MultiMap {
        match self.max_arity() {
            0 => MultiMap::zero(1, self.module().clone(), self.module().clone(), 1, Symmetry::Symmetric),
            _ => self.vector_field.component(1).clone(),
        }
    }

    /// `Q_1 = 0`.
    pub fn is_minimal(&self) -> bool {
        self.linear_part().is_zero()
    }

    /// `H(M, Q_1) = 0`.
    pub fn is_linearly_contractible(&self) -> bool {
        let q1 = self.linear_part();
        let columns: Vec<Vector> = (0..self.module().dim()).map(|i| q1.eval(&[i])).collect();
        2 * crate::linalg::rank(&columns) == self.module().dim()
    }
}

/// Where a letter of `B × M` comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    Base(usize),
    Fiber(usize),
}

/// The tagged direct sum `B × M` with its two position tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Product {
    module: Arc<GradedModule>,
    base: Arc<GradedModule>,
    fiber: Arc<GradedModule>,
    base_positions: Vec<usize>,
    fiber_positions: Vec<usize>,
    letters: Vec<Letter>,
}

impl Product {
    pub fn new(base: &Arc<GradedModule>, fiber: &Arc<GradedModule>) -> Self {
        let (module, base_positions, fiber_positions) = base.direct_sum(fiber, BASE_TAG, FIBER_TAG);
        let mut letters = vec![Letter::Base(0); module.dim()];
        for (i, &p) in base_positions.iter().enumerate() {
            letters[p] = Letter::Base(i);
        }
        for (i, &p) in fiber_positions.iter().enumerate() {
            letters[p] = Letter::Fiber(i);
        }
        Self { module: Arc::new(module), base: base.clone(), fiber: fiber.clone(), base_positions, fiber_positions, letters }
    }

    pub fn module(&self) -> &Arc<GradedModule> {
        &self.module
    }

    pub fn base(&self) -> &Arc<GradedModule> {
        &self.base
    }

    pub fn fiber(&self) -> &Arc<GradedModule> {
        &self.fiber
    }

    pub fn base_position(&self, i: usize) -> usize {
        self.base_positions[i]
    }

    pub fn fiber_position(&self, i: usize) -> usize {
        self.fiber_positions[i]
    }

    pub fn letter(&self, j: usize) -> Letter {
        self.letters[j]
    }

    /// `word = sign · (base letters)(fiber letters)`, each part in its original order.
    pub fn split(&self, word: &[usize]) -> (Scalar, Vec<usize>, Vec<usize>) {
        let degrees = self.module.degrees();
        let (mut base, mut fiber) = (Vec::new(), Vec::new());
        let mut fiber_degree = 0i64;
        let mut exponent = 0i64;
        for &j in word {
            match self.letters[j] {
                Letter::Base(i) => {
                    exponent += degrees[j] * fiber_degree;
                    base.push(i);
                }
                Letter::Fiber(i) => {
                    fiber_degree += degrees[j];
                    fiber.push(i);
                }
            }
        }
        (minus_one_pow(exponent), base, fiber)
    }

    /// The product word `(base)(fiber)` in flat indices.
    pub fn join(&self, base: &[usize], fiber: &[usize]) -> Vec<usize> {
        base.iter().map(|&i| self.base_positions[i]).chain(fiber.iter().map(|&i| self.fiber_positions[i])).collect()
    }

    pub fn embed_base_vector(&self, v: &Vector) -> Vector {
        v.iter().map(|(&i, c)| (self.base_positions[i], c.clone())).collect()
    }

    pub fn embed_fiber_vector(&self, v: &Vector) -> Vector {
        v.iter().map(|(&i, c)| (self.fiber_positions[i], c.clone())).collect()
    }

    /// The part of `v` on base letters, in base coordinates.
    pub fn base_part(&self, v: &Vector) -> Vector {
        v.iter()
            .filter_map(|(&j, c)| match self.letters[j] {
                Letter::Base(i) => Some((i, c.clone())),
                Letter::Fiber(_) => None,
            })
            .collect()
    }

    /// The part of `v` on fiber letters, in fiber coordinates.
    pub fn fiber_part(&self, v: &Vector) -> Vector {
        v.iter()
            .filter_map(|(&j, c)| match self.letters[j] {
                Letter::Fiber(i) => Some((i, c.clone())),
                Letter::Base(_) => None,
            })
            .collect()
    }

    /// `Q^B` extended by zero to the product.
    pub fn embed_base_field(&self, q: &CoderivationComponents) -> CoderivationComponents {
        self.embed_structure(q, true)
    }

    /// `Q^M` extended by zero to the product.
    pub fn embed_fiber_field(&self, q: &CoderivationComponents) -> CoderivationComponents {
        self.embed_structure(q, false)
    }

    fn embed_structure(&self, q: &CoderivationComponents, on_base: bool) -> CoderivationComponents {
        let comps = q
            .components()
            .iter()
            .map(|c| {
                MultiMap::from_fn(c.arity(), self.module.clone(), self.module.clone(), 1, Symmetry::Symmetric, |word| {
                    let (_, base, fiber) = self.split(word);
                    match (on_base, base.is_empty(), fiber.is_empty()) {
                        (true, _, true) => self.embed_base_vector(&c.eval(&base)),
                        (false, true, _) => self.embed_fiber_vector(&c.eval(&fiber)),
                        _ => Vector::new(),
                    }
                })
            })
            .collect();
        CoderivationComponents::new(self.module.clone(), comps).expect("embedded components keep their shape")
    }

    /// `F = f × Id: B × M → B' × M` for `f: B → B'`.
    pub fn product_map(&self, f: &MorphismComponents, target: &Product, max_arity: usize) -> Result<MorphismComponents> {
        if f.source() != &self.base || f.target() != &target.base || self.fiber != target.fiber {
            return argument("f × Id needs f: B → B' over a common fiber");
        }
        let comps = (1..=max_arity)
            .map(|n| {
                MultiMap::from_fn(n, self.module.clone(), target.module.clone(), 0, Symmetry::Symmetric, |word| {
                    let (sign, base, fiber) = self.split(word);
                    if fiber.is_empty() && n <= f.max_arity() {
                        target.embed_base_vector(&f.component(n).eval(&base)).scaled(&sign)
                    } else if base.is_empty() && n == 1 {
                        target.embed_fiber_vector(&Vector::basis(fiber[0]))
                    } else {
                        Vector::new()
                    }
                })
            })
            .collect();
        MorphismComponents::new(self.module.clone(), target.module.clone(), comps)
    }
}

/// The defining conditions of a deformation, in the order they are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeformationAxiom {
    /// `Q|_{{0}×M} = 0`.
    FiberRestriction,
    /// `im(Q) ⊆ {0} × M`.
    ImageInFiber,
    /// `(Q^M + Q^B + Q)² = 0`.
    SquareZero,
}

/// A deformation `(B, Q^B, Q)` of `(M, Q^M)`.
///
/// `weights[i]` is the polynomial degree of base coordinate `i` when the base
/// is a tangent window, and `0` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deformation {
    base: FormalDgManifold,
    fiber: FormalDgManifold,
    product: Product,
    perturbation: CoderivationComponents,
    weights: Vec<usize>,
}

impl Deformation {
    /// Asserts the three defining conditions up to the common truncation.
    pub fn new(base: FormalDgManifold, fiber: FormalDgManifold, perturbation: CoderivationComponents) -> Result<Self> {
        let weights = vec![0; base.module().dim()];
        let deformation = Self::unchecked(base, fiber, perturbation, weights)?;
        if let Some((axiom, failure)) = deformation.first_defect() {
            return precondition(format!(
                "deformation condition {axiom:?} fails at arity {} on {:?}",
                failure.arity, failure.word
            ));
        }
        Ok(deformation)
    }

    /// Assembles the data without checking the defining conditions.
    pub fn unchecked(
        base: FormalDgManifold,
        fiber: FormalDgManifold,
        perturbation: CoderivationComponents,
        weights: Vec<usize>,
    ) -> Result<Self> {
        let product = Product::new(base.module(), fiber.module());
        if perturbation.module() != product.module() || perturbation.degree() != 1 {
            return argument("the perturbation must be a degree 1 vector field on B × M");
        }
        if perturbation.curvature().is_some() {
            return precondition("a deformation has Q_0 = 0");
        }
        let a = base.max_arity().min(fiber.max_arity()).min(perturbation.max_arity());
        let (base, fiber, perturbation) = (base.truncated(a), fiber.truncated(a), perturbation.truncated(a));
        Ok(Self { base, fiber, product, perturbation, weights })
    }

    /// The product deformation `Q = 0`.
    pub fn trivial(base: FormalDgManifold, fiber: FormalDgManifold) -> Self {
        let product = Product::new(base.module(), fiber.module());
        let a = base.max_arity().min(fiber.max_arity());
        let perturbation = CoderivationComponents::zero(product.module().clone(), 1, a);
        let weights = vec![0; base.module().dim()];
        Self::unchecked(base, fiber, perturbation, weights).expect("the zero perturbation has the right shape")
    }

    pub fn base(&self) -> &FormalDgManifold {
        &self.base
    }

    pub fn fiber(&self) -> &FormalDgManifold {
        &self.fiber
    }

    pub fn product(&self) -> &Product {
        &self.product
    }

    pub fn perturbation(&self) -> &CoderivationComponents {
        &self.perturbation
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn max_arity(&self) -> usize {
        self.perturbation.max_arity()
    }

    /// `Q^B + Q^M` on the product.
    pub fn product_structure(&self) -> CoderivationComponents {
        let qb = self.product.embed_base_field(self.base.vector_field());
        let qm = self.product.embed_fiber_field(self.fiber.vector_field());
        qb.add(&qm).expect("both live on the product")
    }

    /// `Q̃ = Q^B + Q^M + Q`.
    pub fn total(&self) -> CoderivationComponents {
        self.product_structure().add(&self.perturbation).expect("all three live on the product")
    }

    /// The first violated defining condition with a witness.
    pub fn first_defect(&self) -> Option<(DeformationAxiom, Failure)> {
        for comp in self.perturbation.components() {
            for (word, value) in comp.entries() {
                let (_, base, _) = self.product.split(word);
                if base.is_empty() {
                    let failure = Failure { arity: word.len(), word: word.clone(), residual: value.clone() };
                    return Some((DeformationAxiom::FiberRestriction, failure));
                }
                let stray = self.product.embed_base_vector(&self.product.base_part(value));
                if !stray.is_zero() {
                    let failure = Failure { arity: word.len(), word: word.clone(), residual: stray };
                    return Some((DeformationAxiom::ImageInFiber, failure));
                }
            }
        }
        first_entry(coderivation_square(&self.total()).components()).map(|f| (DeformationAxiom::SquareZero, f))
    }

    /// Whether `Q = 0`.
    pub fn is_product(&self) -> bool {
        self.perturbation.is_zero()
    }

    pub fn truncated(&self, max_arity: usize) -> Self {
        Self {
            base: self.base.truncated(max_arity),
            fiber: self.fiber.truncated(max_arity),
            perturbation: self.perturbation.truncated(max_arity),
            ..self.clone()
        }
    }
}

/// Equivariance of `f` with residuals kept only on target coordinates `j`
/// with `n + weight(j) ≤ max_arity`.
pub fn check_weighted_equivariance(
    f: &MorphismComponents,
    q: &CoderivationComponents,
    q_target: &CoderivationComponents,
    max_arity: usize,
    weight: impl Fn(usize) -> usize,
) -> Result<CheckReport> {
    if q.module() != f.source() || q_target.module() != f.target() {
        return argument("vector fields do not live on the morphism's modules");
    }
    for n in 1..=max_arity.min(f.max_arity()) {
        for word in canonical_words(f.source(), n, Symmetry::Symmetric) {
            let (left, right) = equivariance_sides(f, q, q_target, &word);
            let residual: Vector =
                left.difference(&right).iter().filter(|(&j, _)| n + weight(j) <= max_arity).map(|(&j, c)| (j, c.clone())).collect();
            if !residual.is_zero() {
                return Ok(CheckReport { max_arity, first_failure: Some(Failure { arity: n, word, residual }) });
            }
        }
    }
    Ok(CheckReport::pass(max_arity))
}

/// A morphism `(F, f)` of deformations over bases `B → B'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationMorphism {
    pub total: MorphismComponents,
    pub base: MorphismComponents,
}

/// The conditions a morphism of deformations must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MorphismCondition {
    /// `f` intertwines `Q^B` and `Q^{B'}`.
    BaseEquivariance,
    /// `F` intertwines `Q̃` and `Q̃'`.
    TotalEquivariance,
    /// `F` restricted to `M` is the inclusion of `M`.
    FiberInclusion,
    /// `pr_{B'} ∘ F = f ∘ pr_B`.
    BaseProjection,
    /// The square over `f` is cartesian: the fiber block of `F_1` is invertible.
    Cartesian,
}

/// The first failed condition of a morphism of deformations, if any.
pub fn check_deformation_morphism(
    source: &Deformation,
    target: &Deformation,
    morphism: &DeformationMorphism,
) -> Result<Option<(MorphismCondition, Failure)>> {
    let (ps, pt) = (&source.product, &target.product);
    if morphism.total.source() != ps.module() || morphism.total.target() != pt.module() {
        return argument("F must map the source product to the target product");
    }
    if morphism.base.source() != ps.base() || morphism.base.target() != pt.base() || ps.fiber() != pt.fiber() {
        return argument("f must map the source base to the target base over a common fiber");
    }
    let a = source.max_arity().min(target.max_arity()).min(morphism.total.max_arity()).min(morphism.base.max_arity());
    let weights = target.weights.clone();
    let base_report = check_weighted_equivariance(
        &morphism.base.truncated(a),
        &source.base.vector_field().truncated(a),
        &target.base.vector_field().truncated(a),
        a,
        |j| weights[j],
    )?;
    if let Some(f) = base_report.first_failure {
        return Ok(Some((MorphismCondition::BaseEquivariance, f)));
    }
    let total_weight = |j: usize| match pt.letter(j) {
        Letter::Base(i) => weights[i],
        Letter::Fiber(_) => 0,
    };
    let total_report =
        check_weighted_equivariance(&morphism.total.truncated(a), &source.total().truncated(a), &target.total().truncated(a), a, total_weight)?;
    if let Some(f) = total_report.first_failure {
        return Ok(Some((MorphismCondition::TotalEquivariance, f)));
    }
    for n in 1..=a {
        let fn_map = morphism.total.component(n);
        for word in canonical_words(ps.module(), n, Symmetry::Symmetric) {
            let (sign, base, fiber) = ps.split(&word);
            let value = fn_map.eval(&word);
            if base.is_empty() {
                let expected = if n == 1 { pt.embed_fiber_vector(&Vector::basis(fiber[0])) } else { Vector::new() };
                let residual = value.difference(&expected);
                if !residual.is_zero() {
                    return Ok(Some((MorphismCondition::FiberInclusion, Failure { arity: n, word, residual })));
                }
            }
            let expected = if fiber.is_empty() { morphism.base.component(n).eval(&base).scaled(&sign) } else { Vector::new() };
            let residual = pt.base_part(&value).difference(&expected);
            if !residual.is_zero() {
                return Ok(Some((MorphismCondition::BaseProjection, Failure { arity: n, word, residual: pt.embed_base_vector(&residual) })));
            }
        }
    }
    let columns: Vec<Vector> = (0..ps.fiber().dim())
        .map(|i| pt.fiber_part(&morphism.total.component(1).eval(&[ps.fiber_position(i)])))
        .collect();
    if crate::linalg::rank(&columns) != ps.fiber().dim() {
        return Ok(Some((MorphismCondition::Cartesian, Failure { arity: 1, word: vec![], residual: Vector::new() })));
    }
    Ok(None)
}

/// Base change along a DG morphism `f: B → B'`:
/// `Q_n(b, m) = Σ_t Σ_{|I|=r} Q'_{s+t}(f_I(b), m)`, together with `(f × Id, f)`.
pub fn base_change(
    deformation: &Deformation,
    base: &FormalDgManifold,
    f: &MorphismComponents,
) -> Result<(Deformation, DeformationMorphism)> {
    let target_base = deformation.base.module();
    if f.source() != base.module() || f.target() != target_base {
        return argument("f must map the new base to the base of the deformation");
    }
    let a = deformation.max_arity().min(base.max_arity()).min(f.max_arity());
    let f = f.truncated(a);
    let weights = deformation.weights.clone();
    let report =
        check_weighted_equivariance(&f, &base.vector_field().truncated(a), &deformation.base.vector_field().truncated(a), a, |j| weights[j])?;
    if let Some(failure) = report.first_failure {
        return precondition(format!("f is not a DG morphism: fails at arity {} on {:?}", failure.arity, failure.word));
    }
    let product = Product::new(base.module(), deformation.fiber.module());
    let total_map = product.product_map(&f, &deformation.product, a)?;
    let q_prime = deformation.perturbation.truncated(a);
    let comps = (1..=a)
        .map(|n| {
            MultiMap::from_fn(n, product.module().clone(), product.module().clone(), 1, Symmetry::Symmetric, |word| {
                if product.split(word).1.is_empty() {
                    return Vector::new();
                }
                let mut out = Vector::new();
                for k in 1..=n {
                    let image = apply_after_power(q_prime.component(k), &total_map, word);
                    out.add_assign(&product.embed_fiber_vector(&deformation.product.fiber_part(&image)));
                }
                out
            })
        })
        .collect();
    let perturbation = CoderivationComponents::new(product.module().clone(), comps)?;
    let pulled = Deformation::new(base.truncated(a), deformation.fiber.truncated(a), perturbation)?;
    Ok((pulled, DeformationMorphism { total: total_map, base: f }))
}

/// The tangent complex: coderivations of `S(M)` of polynomial degree `1..=P`,
/// bracket `[s,t] = s∘t − (−1)^{st} t∘s`, differential `d(s) = (−1)^s [s, Q^M]`.
#[derive(Clone, Debug)]
pub struct TangentComplex {
    fiber: FormalDgManifold,
    window: Window,
    elements: Vec<Elementary>,
    fields: Vec<CoderivationComponents>,
    index: HashMap<(Vec<usize>, usize), usize>,
    dgl: Dgl,
    suspension: Arc<GradedModule>,
}

/// The elementary coderivation sending the canonical word `word` to `output`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Elementary {
    pub word: Vec<usize>,
    pub output: usize,
}

impl TangentComplex {
    pub fn fiber(&self) -> &FormalDgManifold {
        &self.fiber
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dgl(&self) -> &Dgl {
        &self.dgl
    }

    /// `L`, with the linear grading.
    pub fn module(&self) -> &Arc<GradedModule> {
        self.dgl.module()
    }

    /// `U = L[1]`.
    pub fn suspension(&self) -> &Arc<GradedModule> {
        &self.suspension
    }

    pub fn element(&self, i: usize) -> &Elementary {
        &self.elements[i]
    }

    pub fn poly_degree(&self, i: usize) -> usize {
        self.elements[i].word.len()
    }

    pub fn weights(&self) -> Vec<usize> {
        self.elements.iter().map(|e| e.word.len()).collect()
    }

    /// `Σ c_i s_i` as a coderivation of `S(M)` of the given degree.
    pub fn vector_field(&self, coords: &Vector, degree: i64) -> Result<CoderivationComponents> {
        let module = self.fiber.module().clone();
        let mut out = CoderivationComponents::zero(module, degree, self.window.poly_degree);
        for (&i, c) in coords.iter() {
            if self.module().degree(i) != degree {
                return argument("tangent vector is not homogeneous of the requested degree");
            }
            out = out.add(&self.fields[i].scaled(c))?;
        }
        Ok(out)
    }

    /// Coordinates of a coderivation, components above `P` dropped.
    pub fn coordinates(&self, field: &CoderivationComponents) -> Vector {
        field_coordinates(&self.index, self.window.poly_degree, field)
    }

    /// `(↑u)(m_1 ⊙ … ⊙ m_k)` for a basis vector `u` of `U` and fiber letters `m`.
    pub fn apply(&self, u: usize, fiber_word: &[usize]) -> Vector {
        if fiber_word.len() != self.poly_degree(u) {
            return Vector::new();
        }
        self.fields[u].component(fiber_word.len()).eval(fiber_word)
    }
}

fn tangent_label(module: &GradedModule, word: &[usize], output: usize) -> String {
    let args: Vec<&str> = word.iter().map(|&i| module.label(i)).collect();
    format!("{}<{}", module.label(output), args.join(","))
}

/// The tangent complex of `M` truncated at polynomial degree `P`.
pub fn tangent_complex(fiber: &FormalDgManifold, window: Window) -> Result<TangentComplex> {
    let p = window.poly_degree;
    if fiber.max_arity() < p.max(window.arity) {
        return argument(format!("Q^M is known up to arity {}, the window needs {}", fiber.max_arity(), p.max(window.arity)));
    }
    let m = fiber.module().clone();
    let mut raw: Vec<(i64, Elementary)> = Vec::new();
    for k in 1..=p {
        for word in canonical_words(&m, k, Symmetry::Symmetric) {
            let word_degree: i64 = word.iter().map(|&i| m.degree(i)).sum();
            for output in 0..m.dim() {
                raw.push((m.degree(output) - word_degree, Elementary { word: word.clone(), output }));
            }
        }
    }
    raw.sort_by_key(|(d, _)| *d);
    let module = Arc::new(GradedModule::from_basis(raw.iter().map(|(d, e)| (*d, tangent_label(&m, &e.word, e.output))))?);
    let elements: Vec<Elementary> = raw.into_iter().map(|(_, e)| e).collect();
    let index: HashMap<(Vec<usize>, usize), usize> =
        elements.iter().enumerate().map(|(i, e)| ((e.word.clone(), e.output), i)).collect();
    let fields: Vec<CoderivationComponents> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let degree = module.degree(i);
            let comps = (1..=p)
                .map(|k| {
                    let mut c = MultiMap::zero(k, m.clone(), m.clone(), degree, Symmetry::Symmetric);
                    if k == e.word.len() {
                        c.insert(&e.word, &Vector::basis(e.output)).expect("canonical word of the right degree");
                    }
                    c
                })
                .collect();
            CoderivationComponents::with_degree(m.clone(), degree, comps)
        })
        .collect::<Result<_>>()?;
    let qm = fiber.vector_field().truncated(p);
    let coordinates = |field: &CoderivationComponents| field_coordinates(&index, p, field);
    let differential = MultiMap::from_fn(1, module.clone(), module.clone(), 1, Symmetry::Symmetric, |w| {
        let s = &fields[w[0]];
        let bracket = commutator(s, &qm).expect("same module");
        coordinates(&bracket).scaled(&minus_one_pow(s.degree()))
    });
    let bracket = MultiMap::from_fn(2, module.clone(), module.clone(), 0, Symmetry::Exterior, |w| {
        coordinates(&commutator(&fields[w[0]], &fields[w[1]]).expect("same module"))
    });
    let dgl = Dgl::new(differential, bracket)?;
    let suspension = crate::linfty::suspension(&module);
    Ok(TangentComplex { fiber: fiber.clone(), window, elements, fields, index, dgl, suspension })
}

fn field_coordinates(index: &HashMap<(Vec<usize>, usize), usize>, poly_degree: usize, field: &CoderivationComponents) -> Vector {
    let mut out = Vector::new();
    for comp in field.components().iter().take(poly_degree) {
        for (word, value) in comp.entries() {
            for (&o, c) in value.iter() {
                out.add_term(index[&(word.clone(), o)], c.clone());
            }
        }
    }
    out
}

/// How the map induced by `q_n` on `(U × M)^{⊗n}` places the `U` argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotReading {
    /// The `U` argument may sit in any slot (Koszul sign to bring it to the front).
    EverySlot,
    /// Only words `u ⊗ m_1 ⊗ … ⊗ m_{n−1}` are hit.
    FirstSlot,
}

/// `Q_n = (1/n!) Σ_{σ∈S_n} ε(σ) q̂_n ∘ σ`, where `q̂_n` is the map induced by
/// `q_n(u ⊗ m_1 ⊗ … ⊗ m_{n−1}) = (↑u)(m_1 ⊙ … ⊙ m_{n−1})`.
pub fn universal_perturbation(tangent: &TangentComplex, product: &Product, reading: SlotReading) -> Result<CoderivationComponents> {
    if product.base() != tangent.suspension() || product.fiber() != tangent.fiber.module() {
        return argument("the product must be U × M");
    }
    let a = tangent.window.arity;
    let degrees = product.module().degrees().to_vec();
    let q_hat = |word: &[usize]| -> Vector {
        let positions: Vec<usize> =
            (0..word.len()).filter(|&i| matches!(product.letter(word[i]), Letter::Base(_))).collect();
        if positions.len() != 1 || (reading == SlotReading::FirstSlot && positions[0] != 0) {
            return Vector::new();
        }
        let (sign, base, fiber) = product.split(word);
        product.embed_fiber_vector(&tangent.apply(base[0], &fiber)).scaled(&sign)
    };
    let mut comps = Vec::with_capacity(a);
    for n in 1..=a {
        let perms = Permutation::all(n);
        let scale = Scalar::one() / factorial(n);
        comps.push(MultiMap::from_fn(n, product.module().clone(), product.module().clone(), 1, Symmetry::Symmetric, |word| {
            let base_letters = word.iter().filter(|&&j| matches!(product.letter(j), Letter::Base(_))).count();
            if base_letters != 1 {
                return Vector::new();
            }
            let word_degrees: Vec<i64> = word.iter().map(|&i| degrees[i]).collect();
            let mut out = Vector::new();
            for sigma in &perms {
                let sign = action_sign_for(sigma, &word_degrees, Symmetry::Symmetric).expect("orders match");
                out.add_scaled(&sign, &q_hat(&sigma.permute(word)));
            }
            out.scaled(&scale)
        }));
    }
    CoderivationComponents::new(product.module().clone(), comps)
}

/// The base `(U, Q^U)` of the tangent complex, truncated at the window arity.
pub fn tangent_base(tangent: &TangentComplex) -> FormalDgManifold {
    FormalDgManifold::from_linfty(&tangent.dgl.to_linfty(tangent.window.arity))
}

/// The universal deformation `(U, Q^U, Q)` of `M`.
pub fn universal_deformation(tangent: &TangentComplex) -> Result<Deformation> {
    let base = tangent_base(tangent);
    let fiber = tangent.fiber.truncated(tangent.window.arity);
    let product = Product::new(base.module(), fiber.module());
    let perturbation = universal_perturbation(tangent, &product, SlotReading::EverySlot)?;
    let deformation = Deformation::unchecked(base, fiber, perturbation, tangent.weights())?;
    if let Some((axiom, failure)) = deformation.first_defect() {
        return precondition(format!("universal deformation: {axiom:?} fails at arity {} on {:?}", failure.arity, failure.word));
    }
    Ok(deformation)
}

/// The classifying morphism `f: B → U` of a deformation:
/// `(↑f_n(b_1⊙…⊙b_n))_k(m_1,…,m_k) = Q'_{n+k}(b_1,…,b_n,m_1,…,m_k)` for `n + k ≤ A`.
pub fn unidef_correspondence(deformation: &Deformation, tangent: &TangentComplex) -> Result<MorphismComponents> {
    if deformation.fiber.module() != tangent.fiber.module() {
        return argument("the deformation and the tangent complex have different fibers");
    }
    let a = deformation.max_arity();
    if a < 2 || a > tangent.window.poly_degree + 1 {
        return argument(format!("arity {a} does not fit the tangent window {:?}", tangent.window));
    }
    if let Some((axiom, failure)) = deformation.first_defect() {
        return precondition(format!("not a deformation: {axiom:?} fails at arity {} on {:?}", failure.arity, failure.word));
    }
    let product = &deformation.product;
    let q = &deformation.perturbation;
    for n in 1..=a {
        for word in canonical_words(product.base(), n, Symmetry::Symmetric) {
            let value = q.component(n).eval(&product.join(&word, &[]));
            if !value.is_zero() {
                return precondition(format!("Q' moves the zero section on base word {word:?}; the window has no constant vector fields"));
            }
        }
    }
    let u = tangent.suspension().clone();
    let comps = (1..a)
        .map(|n| {
            MultiMap::from_fn(n, product.base().clone(), u.clone(), 0, Symmetry::Symmetric, |base_word| {
                let mut out = Vector::new();
                for (i, e) in tangent.elements.iter().enumerate() {
                    let k = e.word.len();
                    if n + k > a || u.degree(i) != base_word.iter().map(|&b| product.base().degree(b)).sum::<i64>() {
                        continue;
                    }
                    let value = q.component(n + k).eval(&product.join(base_word, &e.word));
                    let c = value.coeff(&product.fiber_position(e.output));
                    if !c.is_zero() {
                        out.add_term(i, c);
                    }
                }
                out
            })
        })
        .collect();
    MorphismComponents::new(product.base().clone(), u, comps)
}

/// The deformation classified by `f: B → U`: `Q'_{n+k}(b, m) = (↑f_n(b))_k(m)` up to arity `max_arity`.
pub fn deformation_from_morphism(
    base: &FormalDgManifold,
    f: &MorphismComponents,
    tangent: &TangentComplex,
    max_arity: usize,
) -> Result<Deformation> {
    if f.target() != tangent.suspension() || f.source() != base.module() {
        return argument("f must map the base to U");
    }
    if max_arity < 2 || max_arity > tangent.window.poly_degree + 1 || f.max_arity() + 1 < max_arity {
        return argument(format!("arity {max_arity} does not fit the window {:?} or the morphism", tangent.window));
    }
    let base = base.truncated(max_arity);
    let fiber = tangent.fiber.truncated(max_arity);
    let product = Product::new(base.module(), fiber.module());
    let comps = (1..=max_arity)
        .map(|n| {
            MultiMap::from_fn(n, product.module().clone(), product.module().clone(), 1, Symmetry::Symmetric, |word| {
                let (sign, b, m) = product.split(word);
                if b.is_empty() || m.is_empty() {
                    return Vector::new();
                }
                let mut out = Vector::new();
                for (&i, c) in f.component(b.len()).eval(&b).iter() {
                    out.add_scaled(c, &tangent.apply(i, &m));
                }
                product.embed_fiber_vector(&out).scaled(&sign)
            })
        })
        .collect();
    let perturbation = CoderivationComponents::new(product.module().clone(), comps)?;
    Deformation::new(base, fiber, perturbation)
}

/// Drops the components of `f: B → U` outside the window `n + k ≤ A`.
pub fn window_truncate(f: &MorphismComponents, tangent: &TangentComplex, max_arity: usize) -> Result<MorphismComponents> {
    let comps = (1..max_arity.min(f.max_arity() + 1))
        .map(|n| {
            MultiMap::from_fn(n, f.source().clone(), f.target().clone(), 0, Symmetry::Symmetric, |w| {
                f.component(n).eval(w).iter().filter(|(&i, _)| n + tangent.poly_degree(i) <= max_arity).map(|(&i, c)| (i, c.clone())).collect()
            })
        })
        .collect();
    MorphismComponents::new(f.source().clone(), f.target().clone(), comps)
}

/// Whether `f: B → U` is a DG morphism on the window.
pub fn check_window_morphism(f: &MorphismComponents, base: &FormalDgManifold, tangent: &TangentComplex, max_arity: usize) -> Result<CheckReport> {
    let u = tangent_base(tangent);
    let weights = tangent.weights();
    let padded = pad(f, max_arity)?;
    check_weighted_equivariance(&padded, &base.vector_field().truncated(max_arity), &u.vector_field().truncated(max_arity), max_arity, |j| {
        weights[j]
    })
}

fn pad(f: &MorphismComponents, max_arity: usize) -> Result<MorphismComponents> {
    let comps = (1..=max_arity)
        .map(|n| {
            if n <= f.max_arity() {
                f.component(n).clone()
            } else {
                MultiMap::zero(n, f.source().clone(), f.target().clone(), 0, Symmetry::Symmetric)
            }
        })
        .collect();
    MorphismComponents::new(f.source().clone(), f.target().clone(), comps)
}

/// The morphism `(f × Id, f)` from a deformation to the universal one.
pub fn classifying_morphism(deformation: &Deformation, universal: &Deformation, f: &MorphismComponents) -> Result<DeformationMorphism> {
    let a = universal.max_arity();
    let f = pad(f, a)?;
    let total = deformation.product.product_map(&f, &universal.product, a)?;
    Ok(DeformationMorphism { total, base: f })
}

/// The semiuniversal deformation with its transfer data.
#[derive(Clone, Debug)]
pub struct Semiuniversal {
    pub hodge: HodgeData,
    pub minimal: LInftyAlgebra,
    pub transfer: LInftyMorphism,
    pub deformation: Deformation,
}

/// `(V, Q^V, Q')` with `V = H[1]`, `Q'_n(v_1,…,v_r,m_1,…,m_s) = (↑f_r(v_1,…,v_r))_s(m_1,…,m_s)`
/// for the transfer quasi-isomorphism `f: H → L`.
pub fn semiuniversal_deformation(tangent: &TangentComplex) -> Result<Semiuniversal> {
    let a = tangent.window.arity;
    let splitting = build_splitting(&tangent.dgl);
    let hodge = HodgeData::new(&tangent.dgl, &splitting)?;
    let minimal = minimal_model(&hodge, a)?;
    let transfer = transfer_morphism(&hodge, &minimal)?;
    let base = FormalDgManifold::from_linfty(&minimal);
    let deformation = deformation_from_morphism(&base, transfer.shifted(), tangent, a)?;
    Ok(Semiuniversal { hodge, minimal, transfer, deformation })
}

/// Outcome of the triviality criterion for a contractible base with `Q_1 = 0`.
#[derive(Clone, Debug)]
pub struct TrivialityReport {
    pub status: Status,
    /// `q: (B × M, Q^B + Q^M) → (B × M, Q̃)` with `q_1 = Id`.
    pub trivializer: Option<MorphismComponents>,
    pub reason: Option<String>,
}

/// When `(B, Q^B_1)` is contractible and `Q_1 = 0`, lifts the square
/// `M → (B × M, Q̃)`, `(B × M, Q^B + Q^M) → B` to a trivializer with `q_1 = Id`.
pub fn is_trivial_candidate(deformation: &Deformation) -> Result<TrivialityReport> {
    let not_applicable = |reason: &str| TrivialityReport { status: Status::NotApplicable, trivializer: None, reason: Some(reason.into()) };
    if !deformation.base.is_linearly_contractible() {
        return Ok(not_applicable("criterion not applicable: (B, Q^B_1) has homology"));
    }
    if deformation.max_arity() >= 1 && !deformation.perturbation.component(1).is_zero() {
        return Ok(not_applicable("criterion not applicable: Q_1 ≠ 0"));
    }
    let a = deformation.max_arity();
    let product = &deformation.product;
    let (pm, bm, mm) = (product.module().clone(), product.base().clone(), product.fiber().clone());
    let inclusion = MultiMap::from_fn(1, mm.clone(), pm.clone(), 0, Symmetry::Symmetric, |w| product.embed_fiber_vector(&Vector::basis(w[0])));
    let projection = MultiMap::from_fn(1, pm.clone(), bm.clone(), 0, Symmetry::Symmetric, |w| product.base_part(&Vector::basis(w[0])));
    let square = LiftSquare {
        qa: deformation.fiber.vector_field().clone(),
        qb: deformation.product_structure(),
        qc: deformation.total(),
        qd: deformation.base.vector_field().clone(),
        c: MorphismComponents::strict(inclusion.clone(), a)?,
        f: MorphismComponents::strict(inclusion, a)?,
        e: MorphismComponents::strict(projection.clone(), a)?,
        d: MorphismComponents::strict(projection, a)?,
    };
    let q = lift_with_linear(&square, &MultiMap::identity(pm))?;
    let report = check_equivariance(&q, &square.qb, &square.qc)?;
    if let Some(f) = report.first_failure {
        return Err(Error::Precondition(format!("the lifted trivializer fails at arity {} on {:?}", f.arity, f.word)));
    }
    Ok(TrivialityReport { status: Status::Pass, trivializer: Some(q), reason: None })
}

/// A deformation restricted to a direct summand `B''` of its base, with the
/// inclusion and, when the complement is linearly contractible, a morphism back.
#[derive(Clone, Debug)]
pub struct SummandRestriction {
    pub restricted: Deformation,
    pub inclusion: DeformationMorphism,
    pub retraction: Option<DeformationMorphism>,
}

fn sub_manifold(base: &FormalDgManifold, keep: &[usize]) -> Result<(FormalDgManifold, MultiMap)> {
    let module = base.module();
    let sub = Arc::new(GradedModule::from_basis(keep.iter().map(|&i| (module.degree(i), module.label(i).to_string())))?);
    let position: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let comps = base
        .vector_field()
        .components()
        .iter()
        .map(|c| {
            let restricted = MultiMap::from_fn(c.arity(), sub.clone(), sub.clone(), 1, Symmetry::Symmetric, |w| {
                let word: Vec<usize> = w.iter().map(|&k| keep[k]).collect();
                c.eval(&word).iter().filter_map(|(i, v)| position.get(i).map(|&k| (k, v.clone()))).collect()
            });
            restricted
        })
        .collect();
    let inclusion = MultiMap::from_fn(1, sub.clone(), module.clone(), 0, Symmetry::Symmetric, |w| Vector::basis(keep[w[0]]));
    Ok((FormalDgManifold::unchecked(CoderivationComponents::new(sub, comps)?), inclusion))
}

/// Restricts a deformation along a split `B = B' ⊕ B''` of formal DG manifolds,
/// `keep` listing the base coordinates of `B''`.
pub fn restrict_to_summand(deformation: &Deformation, keep: &[usize]) -> Result<SummandRestriction> {
    let base = &deformation.base;
    let dim = base.module().dim();
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&i| i >= dim) {
        return argument("summand coordinates must be increasing base indices");
    }
    let complement: Vec<usize> = (0..dim).filter(|i| !keep.contains(i)).collect();
    let in_keep = |i: &usize| keep.contains(i);
    for comp in base.vector_field().components() {
        for (word, value) in comp.entries() {
            let kept = word.iter().filter(|i| in_keep(i)).count();
            let ok = if kept == word.len() {
                value.keys().all(in_keep)
            } else if kept == 0 {
                value.keys().all(|i| !in_keep(i))
            } else {
                false
            };
            if !ok {
                return precondition(format!("the base is not a direct sum along this split (word {word:?})"));
            }
        }
    }
    let a = deformation.max_arity();
    let (small, j) = sub_manifold(base, keep)?;
    let (rest, _) = sub_manifold(base, &complement)?;
    let small_product = Product::new(small.module(), deformation.fiber.module());
    let big = &deformation.product;
    let embed = |w: &[usize]| -> Vec<usize> {
        let (sign, b, m) = small_product.split(w);
        debug_assert!(sign.is_one() || !b.is_empty());
        let _ = sign;
        big.join(&b.iter().map(|&k| keep[k]).collect::<Vec<_>>(), &m)
    };
    let comps = deformation
        .perturbation
        .components()
        .iter()
        .map(|c| {
            MultiMap::from_fn(c.arity(), small_product.module().clone(), small_product.module().clone(), 1, Symmetry::Symmetric, |w| {
                let (sign, _, _) = small_product.split(w);
                let value = c.eval(&embed(w)).scaled(&sign);
                small_product.embed_fiber_vector(&big.fiber_part(&value))
            })
        })
        .collect();
    let restricted = Deformation::new(small.clone(), deformation.fiber.clone(), CoderivationComponents::new(small_product.module().clone(), comps)?)?;
    let j_morphism = MorphismComponents::strict(j, a)?;
    let inclusion = DeformationMorphism { total: small_product.product_map(&j_morphism, big, a)?, base: j_morphism.clone() };

    let retraction = if rest.is_linearly_contractible() {
        let projection = MultiMap::from_fn(1, base.module().clone(), small.module().clone(), 0, Symmetry::Symmetric, |w| {
            keep.iter().position(|&i| i == w[0]).map(Vector::basis).unwrap_or_default()
        });
        let p = MorphismComponents::strict(projection, a)?;
        let (pulled, p_times_id) = base_change(&restricted, base, &p)?;
        let pr_base = MultiMap::from_fn(1, big.module().clone(), base.module().clone(), 0, Symmetry::Symmetric, |w| {
            big.base_part(&Vector::basis(w[0]))
        });
        let square = LiftSquare {
            qa: restricted.total(),
            qb: pulled.total(),
            qc: deformation.total(),
            qd: base.vector_field().clone(),
            c: inclusion.total.clone(),
            f: small_product.product_map(&j_morphism, &pulled.product, a)?,
            e: MorphismComponents::strict(pr_base.clone(), a)?,
            d: MorphismComponents::strict(pr_base, a)?,
        };
        let g = lift(&square)?;
        let g_inverse = invert_formal(&g, None)?;
        let total = crate::coalgebra::compose_formal(&p_times_id.total, &g_inverse)?;
        Some(DeformationMorphism { total, base: p })
    } else {
        None
    };
    Ok(SummandRestriction { restricted, inclusion, retraction })
}
