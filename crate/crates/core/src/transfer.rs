//! Splittings, the Hodge decomposition `L = H ⊕ F`, the tree-sum minimal model
//! on `H`, the quasi-isomorphism `H → L`, strictification, formal inversion,
//! the lifting property, the contractible factor and the decomposition
//! `H × F ≅ L`.
//!
//! Morphism-level constructions act on shifted components (`W = L[1]`).

use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use crate::coalgebra::{check_equivariance, compose_component, compose_formal, equivariance_sides, CoderivationComponents, MorphismComponents};
use crate::error::{argument, precondition, Result};
use crate::graded::{chi_sign, GradedModule, Permutation, Symmetry};
use crate::linalg::{complement, coordinates, kernel, Echelon};
use crate::lincomb::Vector;
use crate::linfty::{delta_hom, obstruction_r, suspension, Dgl, LInftyAlgebra, LInftyMorphism};
use crate::multimap::{canonical_words, MultiMap};
use crate::scalar::Scalar;
use crate::solver::{apply_linear, Equations, MapUnknowns};
use crate::trees::{enumerate_ot, evaluate, sign_e, BilinearFamily};

/// Columns picked by leftmost-pivot reduction while building a splitting.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SplittingPivots {
    /// Basis vectors spanning a complement of the cycles.
    pub cycle_complement: Vec<String>,
    /// Basis vectors spanning a complement of the boundaries.
    pub boundary_complement: Vec<String>,
}

/// A degree `−1` map `η` with `dηd = d`, `η² = 0`, `ηdη = η`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    eta: MultiMap,
    pivots: SplittingPivots,
}

impl Splitting {
    /// Validates the three identities for a supplied `η`.
    pub fn new(dgl: &Dgl, eta: MultiMap) -> Result<Self> {
        if eta.arity() != 1 || eta.degree() != -1 || eta.source() != dgl.module() || eta.target() != dgl.module() {
            return argument("η must be a degree −1 endomorphism of L");
        }
        let eta = eta.relabel_symmetry(Symmetry::Symmetric);
        if let Some(identity) = splitting_violation(dgl.differential(), &eta) {
            return precondition(format!("η violates {identity}"));
        }
        Ok(Self { eta, pivots: SplittingPivots::default() })
    }

    pub fn eta(&self) -> &MultiMap {
        &self.eta
    }

    pub fn pivots(&self) -> &SplittingPivots {
        &self.pivots
    }
}

fn compose_unary(outer: &MultiMap, inner: &MultiMap) -> MultiMap {
    inner.then(outer).expect("unary maps on a common module")
}

/// The first of `dηd = d`, `η² = 0`, `ηdη = η` that fails, if any.
pub fn splitting_violation(d: &MultiMap, eta: &MultiMap) -> Option<&'static str> {
    let ded = compose_unary(d, &compose_unary(eta, d));
    if !ded.same_values(d) {
        return Some("dηd = d");
    }
    if !compose_unary(eta, eta).is_zero() {
        return Some("η² = 0");
    }
    if !compose_unary(eta, &compose_unary(d, eta)).same_values(eta) {
        return Some("ηdη = η");
    }
    None
}

/// Images `map(e_j)` for `j` in `range`, as rows indexed by output coordinate.
fn equation_rows(map: &MultiMap, range: std::ops::Range<usize>) -> Vec<Vector> {
    let offset = range.start;
    let mut rows: std::collections::BTreeMap<usize, Vector> = std::collections::BTreeMap::new();
    for j in range {
        for (&i, c) in map.eval(&[j]).iter() {
            rows.entry(i).or_default().add_term(j - offset, c.clone());
        }
    }
    rows.into_values().collect()
}

fn shift_vector(v: &Vector, offset: usize) -> Vector {
    v.iter().map(|(&i, c)| (i + offset, c.clone())).collect()
}

/// Degreewise splitting by exact row reduction: complements of the cycles and
/// of the boundaries are spanned by basis vectors chosen from the left.
pub fn build_splitting(dgl: &Dgl) -> Splitting {
    let module = dgl.module().clone();
    let d = dgl.differential();
    let mut eta = MultiMap::zero(1, module.clone(), module.clone(), -1, Symmetry::Symmetric);
    let mut pivots = SplittingPivots::default();
    for comp in module.components() {
        let range = module.indices_of_degree(comp.degree);
        let next = module.indices_of_degree(comp.degree + 1);
        let cycles: Vec<Vector> =
            kernel(&equation_rows(d, range.clone()), range.len()).iter().map(|v| shift_vector(v, range.start)).collect();
        let chosen = complement(&cycles, range.clone());
        let boundaries: Vec<Vector> = chosen.iter().map(|&c| d.eval(&[c])).collect();
        let others = complement(&boundaries, next.clone());
        pivots.cycle_complement.extend(chosen.iter().map(|&c| module.label(c).to_string()));
        pivots.boundary_complement.extend(others.iter().map(|&c| module.label(c).to_string()));
        if chosen.is_empty() {
            continue;
        }
        let mut basis = boundaries.clone();
        basis.extend(others.iter().map(|&s| Vector::basis(s)));
        for j in next {
            let coords = coordinates(&basis, &Vector::basis(j)).expect("basis of the next degree");
            let image: Vector =
                coords.iter().filter(|(&t, _)| t < chosen.len()).map(|(&t, c)| (chosen[t], c.clone())).collect();
            if !image.is_zero() {
                eta.insert(&[j], &image).expect("degree −1 value");
            }
        }
    }
    Splitting { eta, pivots }
}

/// `L = H ⊕ F` with `H = ker [d,η]`, `F = im [d,η]`, and `g = η[·,·]`.
#[derive(Clone, Debug)]
pub struct HodgeData {
    dgl: Dgl,
    splitting: Splitting,
    projector: MultiMap,
    homology: Arc<GradedModule>,
    contractible: Arc<GradedModule>,
    include_h: MultiMap,
    project_h: MultiMap,
    include_f: MultiMap,
    project_f: MultiMap,
    g: MultiMap,
}

fn unary_from_images(source: &Arc<GradedModule>, target: &Arc<GradedModule>, images: &[Vector]) -> MultiMap {
    MultiMap::from_fn(1, source.clone(), target.clone(), 0, Symmetry::Symmetric, |w| images[w[0]].clone())
}

impl HodgeData {
    pub fn new(dgl: &Dgl, splitting: &Splitting) -> Result<Self> {
        let module = dgl.module().clone();
        let d = dgl.differential();
        let eta = splitting.eta();
        let projector = compose_unary(d, eta).add(&compose_unary(eta, d))?;
        let mut h_basis: Vec<(i64, String, Vector)> = Vec::new();
        let mut f_basis: Vec<(i64, String, Vector)> = Vec::new();
        for comp in module.components() {
            let range = module.indices_of_degree(comp.degree);
            for v in kernel(&equation_rows(&projector, range.clone()), range.len()) {
                let v = shift_vector(&v, range.start);
                // The free column is the largest index in the support of a kernel vector.
                let lead = *v.iter().map(|(i, _)| i).max().expect("nonzero kernel vector");
                h_basis.push((comp.degree, module.label(lead).to_string(), v));
            }
            let mut echelon = Echelon::new();
            for j in range.clone() {
                echelon.insert(&projector.eval(&[j]));
            }
            for (&p, row) in echelon.rows() {
                f_basis.push((comp.degree, module.label(p).to_string(), row.clone()));
            }
        }
        let homology = Arc::new(GradedModule::from_basis(h_basis.iter().map(|(d, l, _)| (*d, l.clone())))?);
        let contractible = Arc::new(GradedModule::from_basis(f_basis.iter().map(|(d, l, _)| (*d, l.clone())))?);
        let h_vectors: Vec<Vector> = h_basis.into_iter().map(|(_, _, v)| v).collect();
        let f_vectors: Vec<Vector> = f_basis.into_iter().map(|(_, _, v)| v).collect();
        let include_h = unary_from_images(&homology, &module, &h_vectors);
        let include_f = unary_from_images(&contractible, &module, &f_vectors);
        let one_minus_p = MultiMap::identity(module.clone()).sub(&projector)?;
        let project_h = MultiMap::from_fn(1, module.clone(), homology.clone(), 0, Symmetry::Symmetric, |w| {
            coordinates(&h_vectors, &one_minus_p.eval(w)).expect("(1 − P)v lies in H")
        });
        let project_f = MultiMap::from_fn(1, module.clone(), contractible.clone(), 0, Symmetry::Symmetric, |w| {
            coordinates(&f_vectors, &projector.eval(w)).expect("Pv lies in F")
        });
        let g = dgl.bracket().then(eta)?;
        Ok(Self {
            dgl: dgl.clone(),
            splitting: splitting.clone(),
            projector,
            homology,
            contractible,
            include_h,
            project_h,
            include_f,
            project_f,
            g,
        })
    }

    pub fn dgl(&self) -> &Dgl {
        &self.dgl
    }

    pub fn splitting(&self) -> &Splitting {
        &self.splitting
    }

    /// `P = [d, η] = dη + ηd`.
    pub fn projector(&self) -> &MultiMap {
        &self.projector
    }

    pub fn homology(&self) -> &Arc<GradedModule> {
        &self.homology
    }

    pub fn contractible(&self) -> &Arc<GradedModule> {
        &self.contractible
    }

    pub fn include_h(&self) -> &MultiMap {
        &self.include_h
    }

    /// `pr_H`, the coordinates of `(1 − P)v` in the basis of `H`.
    pub fn project_h(&self) -> &MultiMap {
        &self.project_h
    }

    pub fn include_f(&self) -> &MultiMap {
        &self.include_f
    }

    /// `pr_F`, the coordinates of `Pv` in the basis of `F`.
    pub fn project_f(&self) -> &MultiMap {
        &self.project_f
    }

    /// `g = η ∘ [·,·]`.
    pub fn g(&self) -> &MultiMap {
        &self.g
    }

    /// The induced bracket `(1 − dη)[·,·]` on `H`.
    pub fn induced_bracket(&self) -> MultiMap {
        let b = self.dgl.bracket();
        MultiMap::from_fn(2, self.homology.clone(), self.homology.clone(), 0, Symmetry::Exterior, |w| {
            let args = [self.include_h.eval(&[w[0]]), self.include_h.eval(&[w[1]])];
            self.project_h.eval_vectors(&[b.eval_vectors(&args)])
        })
    }

    /// `(F, d|_F, 0)` as an L∞-algebra truncated at `max_arity`.
    pub fn contractible_algebra(&self, max_arity: usize) -> Result<LInftyAlgebra> {
        let d = self.dgl.differential();
        let d_f = MultiMap::from_fn(1, self.contractible.clone(), self.contractible.clone(), 1, Symmetry::Symmetric, |w| {
            self.project_f.eval_vectors(&[d.eval_vectors(&[self.include_f.eval(w)])])
        });
        LInftyAlgebra::linear(&d_f, max_arity)
    }
}

/// `Σ_{φ∈Ot(n)} e(φ) φ(root, g, …, g) ∘ α_n` restricted to `H^{⊗n}`, as an exterior map into `L`.
pub fn tree_sum(hodge: &HodgeData, n: usize, root: &MultiMap) -> Result<MultiMap> {
    let module = hodge.dgl.module().clone();
    let trees = enumerate_ot(n)?;
    let mut evaluated = Vec::with_capacity(trees.len());
    for tree in &trees {
        let mut maps = vec![root.to_plain()];
        maps.extend(std::iter::repeat(hodge.g.to_plain()).take(n - 2));
        let family = BilinearFamily::new(module.clone(), maps)?;
        evaluated.push((sign_e(tree), evaluate(tree, &family)?));
    }
    let perms = Permutation::all(n);
    let images: Vec<Vector> = (0..hodge.homology.dim()).map(|i| hodge.include_h.eval(&[i])).collect();
    let degree = root.degree() - (n as i64 - 2);
    Ok(MultiMap::from_fn(n, hodge.homology.clone(), module, degree, Symmetry::Exterior, |word| {
        let degrees: Vec<i64> = word.iter().map(|&i| hodge.homology.degree(i)).collect();
        let mut out = Vector::new();
        for sigma in &perms {
            let sign = chi_sign(sigma, &degrees).expect("orders match");
            let args: Vec<Vector> = sigma.permute(word).iter().map(|&i| images[i].clone()).collect();
            for (e, map) in &evaluated {
                out.add_scaled(&(&sign * e), &map.eval_vectors(&args));
            }
        }
        out
    }))
}

/// Coefficient of the tree sum in arity `n`: `−(1/2)^{n−1}`.
///
/// The prefactor `(−1/2)^{n−1}` is off by `(−1)^n`; with it the morphism
/// identity fails from arity 3 on as soon as `η ≠ 0`.
pub fn tree_coefficient(n: usize) -> Scalar {
    let half = Scalar::new(1.into(), 2.into());
    -(1..n).fold(Scalar::one(), |acc, _| acc * &half)
}

/// `μ_1 = 0`, `μ_n = −(1/2)^{n−1} Σ_φ e(φ) φ((1 − [d,η])[·,·], g, …, g) ∘ α_n` on `H`.
pub fn minimal_model(hodge: &HodgeData, max_arity: usize) -> Result<LInftyAlgebra> {
    if max_arity == 0 {
        return argument("the arity bound must be at least 1");
    }
    let h = hodge.homology.clone();
    let module = hodge.dgl.module().clone();
    let one_minus_p = MultiMap::identity(module).sub(&hodge.projector)?;
    let root = hodge.dgl.bracket().then(&one_minus_p)?;
    let mut mu = vec![MultiMap::zero(1, h.clone(), h.clone(), 1, Symmetry::Exterior)];
    for n in 2..=max_arity {
        let sum = tree_sum(hodge, n, &root)?.then(&hodge.project_h)?;
        mu.push(sum.scaled(&tree_coefficient(n)));
    }
    LInftyAlgebra::unchecked(h, mu)
}

/// `f_1 = ι_H`, `f_n = (1/2)^{n−1} Σ_φ e(φ) φ(g, …, g) ∘ α_n`; `f_2 = −g`.
pub fn transfer_morphism(hodge: &HodgeData, minimal: &LInftyAlgebra) -> Result<LInftyMorphism> {
    let a = minimal.max_arity();
    let mut f = vec![hodge.include_h.relabel_symmetry(Symmetry::Exterior)];
    for n in 2..=a {
        f.push(tree_sum(hodge, n, &hodge.g)?.scaled(&-tree_coefficient(n)));
    }
    LInftyMorphism::unchecked(minimal.clone(), hodge.dgl.to_linfty(a), f)
}

/// Inverse of a bijective unary degree-0 map.
pub fn linear_inverse(map: &MultiMap) -> Result<MultiMap> {
    if map.arity() != 1 || map.degree() != 0 || map.source().dim() != map.target().dim() {
        return precondition("only square degree-0 linear maps can be inverted");
    }
    let columns: Vec<Vector> = (0..map.source().dim()).map(|i| map.eval(&[i])).collect();
    let mut images = Vec::with_capacity(columns.len());
    for j in 0..map.target().dim() {
        match coordinates(&columns, &Vector::basis(j)) {
            Some(c) => images.push(c),
            None => return precondition("linear part is singular"),
        }
    }
    if crate::linalg::rank(&columns) != columns.len() {
        return precondition("linear part is singular");
    }
    Ok(MultiMap::from_fn(1, map.target().clone(), map.source().clone(), 0, Symmetry::Symmetric, |w| images[w[0]].clone()))
}

fn is_identity_on(map: &MultiMap) -> bool {
    map.same_values(&MultiMap::identity(map.source().clone()))
}

/// Lemma (i) recursion: `κ_1 = Id`, `κ_{n+1} = −Σ_{k≤n} Σ_{|I|=n+1} κ_k ∘ f_I ∘ g^{⊙(n+1)}`,
/// so that `κ ∘ f` is strict; `retraction` satisfies `retraction ∘ f_1 = Id`.
pub fn strictify(f: &MorphismComponents, retraction: &MultiMap) -> Result<MorphismComponents> {
    let w = f.target().clone();
    if retraction.arity() != 1 || retraction.source() != &w || retraction.target() != f.source() {
        return argument("the retraction must map the target back to the source");
    }
    if !is_identity_on(&compose_unary(retraction, f.component(1))) {
        return precondition("the retraction does not split the linear part");
    }
    let a = f.max_arity();
    let mut comps = vec![MultiMap::identity(w.clone())];
    for n in 2..=a {
        comps.push(MultiMap::zero(n, w.clone(), w.clone(), 0, Symmetry::Symmetric));
        let kappa = MorphismComponents::new(w.clone(), w.clone(), comps.clone())?;
        let partial = compose_component(&kappa, f, n);
        comps[n - 1] = partial.precompose_linear(retraction)?.scaled(&-Scalar::one());
    }
    MorphismComponents::new(w.clone(), w, comps)
}

/// Lemma (ii) recursion: `κ_1 = Id`, `κ_n = −u ∘ Σ_{k≥2} e_k ∘ κ_I`, so that
/// `e ∘ κ` is strict; `section` satisfies `e_1 ∘ section = Id`.
pub fn strictify_surjective(e: &MorphismComponents, section: &MultiMap) -> Result<MorphismComponents> {
    let c = e.source().clone();
    if !is_identity_on(&compose_unary(e.component(1), section)) {
        return precondition("the section does not split the linear part");
    }
    let a = e.max_arity();
    let mut comps = vec![MultiMap::identity(c.clone())];
    for n in 2..=a {
        comps.push(MultiMap::zero(n, c.clone(), c.clone(), 0, Symmetry::Symmetric));
        let kappa = MorphismComponents::new(c.clone(), c.clone(), comps.clone())?;
        let partial = compose_component(e, &kappa, n);
        comps[n - 1] = partial.then(section)?.scaled(&-Scalar::one());
    }
    MorphismComponents::new(c.clone(), c, comps)
}

/// The explicit strictification of the transfer morphism:
/// `κ_n = −F_n ∘ pr_H^{⊙n}` and `(κ^{-1})_n = F_n ∘ pr_H^{⊙n}` for `n ≥ 2`.
pub fn strictify_transfer(hodge: &HodgeData, f: &LInftyMorphism) -> Result<(MorphismComponents, MorphismComponents)> {
    let shifted = f.shifted();
    let wl = shifted.target().clone();
    let pr = hodge.project_h.with_modules(wl.clone(), shifted.source().clone(), 0);
    let mut kappa = vec![MultiMap::identity(wl.clone())];
    let mut inverse = vec![MultiMap::identity(wl.clone())];
    for n in 2..=shifted.max_arity() {
        let term = shifted.component(n).precompose_linear(&pr)?;
        kappa.push(term.scaled(&-Scalar::one()));
        inverse.push(term);
    }
    Ok((
        MorphismComponents::new(wl.clone(), wl.clone(), kappa)?,
        MorphismComponents::new(wl.clone(), wl, inverse)?,
    ))
}

/// `κ ∘ Q ∘ κ^{-1}` for a morphism `κ` with invertible linear part.
pub fn transport_structure(kappa: &MorphismComponents, q: &CoderivationComponents) -> Result<CoderivationComponents> {
    if kappa.source() != q.module() {
        return argument("κ must start at the module of Q");
    }
    let inverse_linear = linear_inverse(kappa.component(1))?;
    let target = kappa.target().clone();
    let a = kappa.max_arity().min(q.max_arity());
    let mut comps: Vec<MultiMap> = Vec::new();
    for n in 1..=a {
        let mut current = comps.clone();
        current.push(MultiMap::zero(n, target.clone(), target.clone(), q.degree(), Symmetry::Symmetric));
        let partial = CoderivationComponents::with_degree(target.clone(), q.degree(), current)?;
        let kappa_n = kappa.truncated(n);
        // Q'_n ∘ κ_1^{⊙n} = (κ∘Q)_n − Σ_{k<n} Q'_k ∘ κ_I, evaluated on the source.
        let on_source = MultiMap::from_fn(n, kappa.source().clone(), target.clone(), q.degree(), Symmetry::Symmetric, |w| {
            let (left, right) = equivariance_sides(&kappa_n, q, &partial, w);
            right.difference(&left)
        });
        comps.push(on_source.precompose_linear(&inverse_linear)?);
    }
    CoderivationComponents::with_degree(target, q.degree(), comps)
}

/// Formal inverse `g` with `g ∘ f = Id`.
///
/// With an invertible `f_1` this is `g_1 = f_1^{-1}`,
/// `g_n = −Σ_{k=2}^{n} Σ_{|I|=n} g_1 ∘ f_k ∘ g_I`, a two-sided inverse. With a
/// split injective `f_1` and a retraction `g'`, the left inverse
/// `g_n = −Σ_{k<n} Σ_{|I|=n} g_k ∘ f_I ∘ g'^{⊙n}` is built instead.
pub fn invert_formal(f: &MorphismComponents, retraction: Option<&MultiMap>) -> Result<MorphismComponents> {
    let a = f.max_arity();
    let (source, target) = (f.source().clone(), f.target().clone());
    match linear_inverse(f.component(1)) {
        Ok(g1) => {
            let mut comps = vec![g1.clone()];
            for n in 2..=a {
                comps.push(MultiMap::zero(n, target.clone(), source.clone(), 0, Symmetry::Symmetric));
                let g = MorphismComponents::new(target.clone(), source.clone(), comps.clone())?;
                let fg = compose_component(f, &g, n);
                comps[n - 1] = fg.then(&g1)?.scaled(&-Scalar::one());
            }
            MorphismComponents::new(target, source, comps)
        }
        Err(_) => {
            let Some(r) = retraction else {
                return precondition("f_1 is singular and no retraction was supplied");
            };
            if !is_identity_on(&compose_unary(r, f.component(1))) {
                return precondition("the retraction does not split f_1");
            }
            let mut comps = vec![r.relabel_symmetry(Symmetry::Symmetric)];
            for n in 2..=a {
                comps.push(MultiMap::zero(n, target.clone(), source.clone(), 0, Symmetry::Symmetric));
                let g = MorphismComponents::new(target.clone(), source.clone(), comps.clone())?;
                let gf = compose_component(&g, f, n);
                comps[n - 1] = gf.precompose_linear(r)?.scaled(&-Scalar::one());
            }
            MorphismComponents::new(target, source, comps)
        }
    }
}

/// A chain map `x: X → Y` (unary, degree 0) with `constraint(x)` linear equations.
fn solve_chain_map(
    source: &Arc<GradedModule>,
    target: &Arc<GradedModule>,
    q1_source: &MultiMap,
    q1_target: &MultiMap,
    extra: impl Fn(&MapUnknowns, &mut Equations),
) -> Option<MultiMap> {
    let unknowns = MapUnknowns::new(1, source.clone(), target.clone(), 0, |_| true);
    let mut eqs = Equations::default();
    for i in 0..source.dim() {
        eqs.push(&unknowns.delta_word(q1_source, q1_target, &[i]), &Vector::new());
    }
    extra(&unknowns, &mut eqs);
    eqs.solve(&unknowns)
}

/// A commutative square `A →c C`, `A →f B`, `C →e D`, `B →d D` of shifted morphisms
/// with the structures of its corners.
#[derive(Clone, Debug)]
pub struct LiftSquare {
    pub qa: CoderivationComponents,
    pub qb: CoderivationComponents,
    pub qc: CoderivationComponents,
    pub qd: CoderivationComponents,
    pub c: MorphismComponents,
    pub f: MorphismComponents,
    pub e: MorphismComponents,
    pub d: MorphismComponents,
}

/// Lifting property: `g: B → C` with `g ∘ f = c` and `e ∘ g = d`.
///
/// `f` must be split injective and `e` split surjective, one of them a
/// quasi-isomorphism. The homotopy step solves `δ(x) = δ(β) − r` exactly on
/// maps vanishing on `im f_1^{⊙n}` with values in `ker e_1`.
pub fn lift(square: &LiftSquare) -> Result<MorphismComponents> {
    let a = square.c.max_arity().min(square.f.max_arity()).min(square.e.max_arity()).min(square.d.max_arity());
    let (qb, qc) = (&square.qb, &square.qc);
    let f1 = square.f.component(1).clone();
    let e1 = square.e.component(1).clone();

    if !square.f.truncated(a).is_strict() {
        let r = linear_retraction(&f1)
            .ok_or_else(|| crate::error::Error::Precondition("f_1 is not split injective".into()))?;
        let kappa = strictify(&square.f.truncated(a), &r)?;
        let kappa_inv = invert_formal(&kappa, None)?;
        let qb2 = transport_structure(&kappa, qb)?;
        let inner = LiftSquare {
            qb: qb2,
            f: compose_formal(&kappa, &square.f.truncated(a))?,
            d: compose_formal(&square.d.truncated(a), &kappa_inv)?,
            ..square.clone()
        };
        let g = lift(&inner)?;
        return compose_formal(&g, &kappa);
    }
    if !square.e.truncated(a).is_strict() {
        let s = linear_section(&e1).ok_or_else(|| crate::error::Error::Precondition("e_1 is not split surjective".into()))?;
        let kappa = strictify_surjective(&square.e.truncated(a), &s)?;
        let kappa_inv = invert_formal(&kappa, None)?;
        let qc2 = transport_structure(&kappa_inv, qc)?;
        let inner = LiftSquare {
            qc: qc2,
            c: compose_formal(&kappa_inv, &square.c.truncated(a))?,
            e: compose_formal(&square.e.truncated(a), &kappa)?,
            ..square.clone()
        };
        let g = lift(&inner)?;
        return compose_formal(&kappa, &g);
    }

    lift_strict(square, a, None)
}

/// [`lift`] with a prescribed linear part `g_1`; `f` and `e` must be strict.
///
/// `g_1` must be a chain map with `g_1 ∘ f_1 = c_1` and `e_1 ∘ g_1 = d_1`.
pub fn lift_with_linear(square: &LiftSquare, linear: &MultiMap) -> Result<MorphismComponents> {
    let a = square.c.max_arity().min(square.f.max_arity()).min(square.e.max_arity()).min(square.d.max_arity());
    if !square.f.truncated(a).is_strict() || !square.e.truncated(a).is_strict() {
        return precondition("a prescribed linear part needs strict f and e");
    }
    if linear.arity() != 1 || linear.source() != square.qb.module() || linear.target() != square.qc.module() {
        return argument("the linear part must map B to C");
    }
    let linear = linear.relabel_symmetry(Symmetry::Symmetric);
    if !compose_unary(&linear, square.f.component(1)).same_values(square.c.component(1))
        || !compose_unary(square.e.component(1), &linear).same_values(square.d.component(1))
    {
        return precondition("the linear part does not fill the square");
    }
    let (q1b, q1c) = (square.qb.component(1), square.qc.component(1));
    if !delta_hom(&linear, q1b, q1c)?.is_zero() {
        return precondition("the linear part is not a chain map");
    }
    lift_strict(square, a, Some(linear))
}

fn lift_strict(square: &LiftSquare, a: usize, linear: Option<MultiMap>) -> Result<MorphismComponents> {
    let (qa, qb, qc, qd) = (&square.qa, &square.qb, &square.qc, &square.qd);
    let (b, c_mod, d_mod) = (qb.module().clone(), qc.module().clone(), qd.module().clone());
    let q1 = |q: &CoderivationComponents| {
        if q.max_arity() >= 1 {
            q.component(1).clone()
        } else {
            MultiMap::zero(1, q.module().clone(), q.module().clone(), 1, Symmetry::Symmetric)
        }
    };
    let f1 = square.f.component(1).clone();
    let e1 = square.e.component(1).clone();
    let identity_rows = |unknowns: &MapUnknowns, eqs: &mut Equations, pre: &MultiMap, post: Option<&MultiMap>, dim: usize| {
        for i in 0..dim {
            let value = match post {
                Some(p) => apply_linear(p, &unknowns.eval_vectors(&[pre.eval(&[i])])),
                None => unknowns.eval_vectors(&[pre.eval(&[i])]),
            };
            eqs.push(&value, &Vector::basis(i));
        }
    };
    let u = solve_chain_map(&d_mod, &c_mod, &q1(qd), &q1(qc), |unk, eqs| {
        for i in 0..d_mod.dim() {
            eqs.push(&apply_linear(&e1, &unk.eval_word(&[i])), &Vector::basis(i));
        }
    })
    .ok_or_else(|| crate::error::Error::Precondition("e_1 has no chain-map section".into()))?;
    let v = solve_chain_map(&b, qa.module(), &q1(qb), &q1(qa), |unk, eqs| {
        identity_rows(unk, eqs, &f1, None, qa.module().dim());
    })
    .ok_or_else(|| crate::error::Error::Precondition("f_1 has no chain-map retraction".into()))?;

    let mut comps: Vec<MultiMap> = Vec::new();
    for n in 1..=a {
        if n == 1 {
            if let Some(g1) = &linear {
                comps.push(g1.clone());
                continue;
            }
        }
        let cv = square.c.component(n).precompose_linear(&v)?;
        let mut beta = cv.clone();
        beta = beta.add(&square.d.component(n).then(&u)?)?;
        beta = beta.sub(&cv.then(&e1)?.then(&u)?)?;
        let mut target_rhs = delta_hom(&beta, &q1(qb), &q1(qc))?;
        if n >= 2 {
            let prefix = MorphismComponents::new(b.clone(), c_mod.clone(), comps.clone())?;
            let r = obstruction_r(&prefix, &qb.truncated(n), &qc.truncated(n))?;
            target_rhs = target_rhs.sub(&r)?;
        }
        let unknowns = MapUnknowns::new(n, b.clone(), c_mod.clone(), 0, |_| true);
        let mut eqs = Equations::default();
        for word in canonical_words(&b, n, Symmetry::Symmetric) {
            eqs.push(&unknowns.delta_word(&q1(qb), &q1(qc), &word), &target_rhs.eval(&word));
            eqs.push(&apply_linear(&e1, &unknowns.eval_word(&word)), &Vector::new());
        }
        for word in canonical_words(qa.module(), n, Symmetry::Symmetric) {
            let args: Vec<Vector> = word.iter().map(|&i| f1.eval(&[i])).collect();
            eqs.push(&unknowns.eval_vectors(&args), &Vector::new());
        }
        let x = eqs
            .solve(&unknowns)
            .ok_or_else(|| crate::error::Error::Precondition("no homotopy: neither factor is contractible".into()))?;
        comps.push(beta.sub(&x)?);
    }
    MorphismComponents::new(b, c_mod, comps)
}

/// A linear left inverse of an injective unary map (leftmost pivots).
pub fn linear_retraction(map: &MultiMap) -> Option<MultiMap> {
    let columns: Vec<Vector> = (0..map.source().dim()).map(|i| map.eval(&[i])).collect();
    if crate::linalg::rank(&columns) != columns.len() {
        return None;
    }
    let extra = complement(&columns, 0..map.target().dim());
    let mut basis = columns.clone();
    basis.extend(extra.iter().map(|&j| Vector::basis(j)));
    let n = columns.len();
    Some(MultiMap::from_fn(1, map.target().clone(), map.source().clone(), 0, Symmetry::Symmetric, |w| {
        let coords = coordinates(&basis, &Vector::basis(w[0])).expect("basis of the target");
        coords.iter().filter(|(&t, _)| t < n).map(|(&t, c)| (t, c.clone())).collect()
    }))
}

/// A linear right inverse of a surjective unary map.
pub fn linear_section(map: &MultiMap) -> Option<MultiMap> {
    let source = map.source().clone();
    let target = map.target().clone();
    let unknowns = MapUnknowns::new(1, target.clone(), source.clone(), 0, |_| true);
    let mut eqs = Equations::default();
    for i in 0..target.dim() {
        eqs.push(&apply_linear(map, &unknowns.eval_word(&[i])), &Vector::basis(i));
    }
    eqs.solve(&unknowns)
}

/// `ι: (F, d, 0) → L` with `ι_1` the inclusion and `p: L → (F, d, 0)` with `p ∘ ι = Id`.
#[derive(Clone, Debug)]
pub struct ContractibleFactor {
    pub algebra: LInftyAlgebra,
    pub iota: MorphismComponents,
    pub p: MorphismComponents,
}

fn solve_delta(
    rhs: &MultiMap,
    q1: &MultiMap,
    q1_target: &MultiMap,
    filter: impl Fn(&[usize]) -> bool,
) -> Option<MultiMap> {
    let unknowns = MapUnknowns::new(rhs.arity(), rhs.source().clone(), rhs.target().clone(), rhs.degree() - 1, &filter);
    let mut eqs = Equations::default();
    for word in canonical_words(rhs.source(), rhs.arity(), Symmetry::Symmetric) {
        if filter(&word) {
            eqs.push(&unknowns.delta_word(q1, q1_target, &word), &rhs.eval(&word));
        }
    }
    eqs.solve(&unknowns)
}

/// Builds `ι` by solving `δ(ι_n) = r(ι_1, …, ι_{n−1})` in the acyclic
/// `Hom(F^{⊙n}, L)`, then `p` on the strictified target with
/// `p_1 = pr_F`, `p_n = η r(p_1, …, p_{n−1})`.
pub fn contractible_factor(hodge: &HodgeData, max_arity: usize) -> Result<ContractibleFactor> {
    let algebra = hodge.contractible_algebra(max_arity)?;
    let l_algebra = hodge.dgl.to_linfty(max_arity);
    let (qf, ql) = (algebra.shifted().clone(), l_algebra.shifted().clone());
    let (wf, wl) = (qf.module().clone(), ql.module().clone());
    let incl = hodge.include_f.with_modules(wf.clone(), wl.clone(), 0);
    let pr = hodge.project_f.with_modules(wl.clone(), wf.clone(), 0);

    let mut iota = vec![incl.clone()];
    for n in 2..=max_arity {
        let prefix = MorphismComponents::new(wf.clone(), wl.clone(), iota.clone())?;
        let r = obstruction_r(&prefix, &qf.truncated(n), &ql.truncated(n))?;
        if !delta_hom(&r, qf.component(1), ql.component(1))?.is_zero() {
            return precondition(format!("obstruction at arity {n} is not a cycle"));
        }
        let x = solve_delta(&r, qf.component(1), ql.component(1), |_| true)
            .ok_or_else(|| crate::error::Error::Precondition("Hom(F^n, L) is not acyclic".into()))?;
        iota.push(x);
    }
    let iota = MorphismComponents::new(wf.clone(), wl.clone(), iota)?;

    let kappa = strictify(&iota, &pr)?;
    let q_strict = transport_structure(&kappa, &ql)?;
    let eta_f = MultiMap::from_fn(1, wf.clone(), wf.clone(), -1, Symmetry::Symmetric, |w| {
        let through = hodge.splitting.eta.eval_vectors(&[hodge.include_f.eval(w)]);
        hodge.project_f.eval_vectors(&[through])
    });
    let mut p = vec![pr.clone()];
    for n in 2..=max_arity {
        let prefix = MorphismComponents::new(wl.clone(), wf.clone(), p.clone())?;
        let r = obstruction_r(&prefix, &q_strict.truncated(n), &qf.truncated(n))?;
        if !delta_hom(&r, q_strict.component(1), qf.component(1))?.is_zero() {
            return precondition(format!("obstruction at arity {n} is not a cycle"));
        }
        p.push(r.then(&eta_f)?);
    }
    let p_strict = MorphismComponents::new(wl.clone(), wf.clone(), p)?;
    let p = compose_formal(&p_strict, &kappa)?;
    Ok(ContractibleFactor { algebra, iota, p })
}

/// `f × ι: H × F → L` together with the product structure and its inverse.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub sum: Arc<GradedModule>,
    pub h_positions: Vec<usize>,
    pub f_positions: Vec<usize>,
    pub product: CoderivationComponents,
    pub morphism: MorphismComponents,
    pub inverse: MorphismComponents,
}

fn classify(word: &[usize], h_pos: &[usize]) -> (bool, bool) {
    let in_h = word.iter().filter(|i| h_pos.contains(i)).count();
    (in_h == word.len(), in_h == 0)
}

/// Assembles `f × ι` from the transfer morphism and `ι`; components on mixed
/// words solve `δ(x) = r` in the acyclic mixed part.
pub fn decompose(hodge: &HodgeData, minimal: &LInftyAlgebra, transfer: &LInftyMorphism, factor: &ContractibleFactor) -> Result<Decomposition> {
    let a = minimal.max_arity().min(transfer.max_arity()).min(factor.iota.max_arity());
    let wh = suspension(&hodge.homology);
    let wf = suspension(&hodge.contractible);
    let (sum, h_pos, f_pos) = wh.direct_sum(&wf, "H:", "F:");
    let sum = Arc::new(sum);
    let ql = hodge.dgl.to_linfty(a).shifted().clone();
    let (qh, qf) = (minimal.shifted(), factor.algebra.shifted());
    let back = |word: &[usize], pos: &[usize]| -> Vec<usize> {
        word.iter().map(|i| pos.iter().position(|p| p == i).expect("classified")).collect()
    };
    let embed = |v: &Vector, pos: &[usize]| -> Vector { v.iter().map(|(&i, c)| (pos[i], c.clone())).collect() };
    let mut product = Vec::new();
    for n in 1..=a {
        product.push(MultiMap::from_fn(n, sum.clone(), sum.clone(), 1, Symmetry::Symmetric, |w| match classify(w, &h_pos) {
            (true, _) => embed(&qh.component(n).eval(&back(w, &h_pos)), &h_pos),
            (_, true) => embed(&qf.component(n).eval(&back(w, &f_pos)), &f_pos),
            _ => Vector::new(),
        }));
    }
    let product = CoderivationComponents::new(sum.clone(), product)?;
    let fh = transfer.shifted();
    let mut comps: Vec<MultiMap> = Vec::new();
    for n in 1..=a {
        let pure = MultiMap::from_fn(n, sum.clone(), ql.module().clone(), 0, Symmetry::Symmetric, |w| match classify(w, &h_pos) {
            (true, _) => fh.component(n).eval(&back(w, &h_pos)),
            (_, true) => factor.iota.component(n).eval(&back(w, &f_pos)),
            _ => Vector::new(),
        });
        if n == 1 {
            comps.push(pure);
            continue;
        }
        let prefix = MorphismComponents::new(sum.clone(), ql.module().clone(), comps.clone())?;
        let r = obstruction_r(&prefix, &product.truncated(n), &ql.truncated(n))?;
        let mixed = |w: &[usize]| {
            let (all_h, no_h) = classify(w, &h_pos);
            !all_h && !no_h
        };
        let x = solve_delta(&r, product.component(1), ql.component(1), mixed)
            .ok_or_else(|| crate::error::Error::Precondition("mixed obstruction has no solution".into()))?;
        comps.push(pure.add(&x)?);
    }
    let morphism = MorphismComponents::new(sum.clone(), ql.module().clone(), comps)?;
    let report = check_equivariance(&morphism, &product, &ql)?;
    if let Some(f) = report.first_failure {
        return precondition(format!("f × ι fails the morphism condition at arity {}", f.arity));
    }
    let inverse = invert_formal(&morphism, None)?;
    Ok(Decomposition { sum, h_positions: h_pos, f_positions: f_pos, product, morphism, inverse })
}
