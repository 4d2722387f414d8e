//! L∞-algebras and L∞-morphisms in the `μ_n` / `f_n` presentation, the
//! décalage dictionary to coderivations on `W = L[1]`, structure checkers and
//! the obstruction calculus `δ`, `r`.
//!
//! The shifted form is canonical; `μ_n` and `f_n` are views.

use std::sync::Arc;

use crate::coalgebra::{check_equivariance, coderivation_square, equivariance_sides, CoderivationComponents, MorphismComponents};
use crate::error::{argument, precondition, Result};
use crate::graded::{chi_sign, decalage_sign, enumerate_shuffles, GradedModule, Symmetry};
use crate::lincomb::Vector;
use crate::multimap::{canonical_words, koszul_apply, MultiMap, Slot};
use crate::report::{CheckReport, Failure};
use crate::scalar::{minus_one_pow, Scalar};

/// Which DGL axiom a candidate structure violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DglAxiom {
    DifferentialSquare,
    Antisymmetry,
    Jacobi,
    Leibniz,
}

/// A differential graded Lie algebra `(L, d, [·,·])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dgl {
    module: Arc<GradedModule>,
    differential: MultiMap,
    bracket: MultiMap,
}

impl Dgl {
    /// Validates every axiom; the bracket may be given as a plain map.
    pub fn new(differential: MultiMap, bracket: MultiMap) -> Result<Self> {
        match Self::first_violation(&differential, &bracket)? {
            None => Ok(Self::assemble(differential, bracket)),
            Some((axiom, failure)) => precondition(format!(
                "{axiom:?} fails on basis word {:?} with residual {:?}",
                failure.word, failure.residual
            )),
        }
    }

    fn assemble(differential: MultiMap, bracket: MultiMap) -> Self {
        let module = differential.source().clone();
        let bracket = bracket.relabel_symmetry(Symmetry::Exterior);
        Self { module, differential: differential.relabel_symmetry(Symmetry::Symmetric), bracket }
    }

    /// The first violated axiom, checked in the order d², antisymmetry, Jacobi, Leibniz.
    pub fn first_violation(differential: &MultiMap, bracket: &MultiMap) -> Result<Option<(DglAxiom, Failure)>> {
        let module = differential.source().clone();
        if differential.arity() != 1 || differential.degree() != 1 || **differential.target() != *module {
            return argument("the differential must be a degree +1 endomorphism");
        }
        if bracket.arity() != 2 || bracket.degree() != 0 || **bracket.source() != *module || **bracket.target() != *module {
            return argument("the bracket must be a degree 0 bilinear map L ⊗ L → L");
        }
        let degrees = module.degrees().to_vec();
        for i in 0..module.dim() {
            let dd = differential.eval_vectors(&[differential.eval(&[i])]);
            if !dd.is_zero() {
                return Ok(Some((DglAxiom::DifferentialSquare, Failure { arity: 1, word: vec![i], residual: dd })));
            }
        }
        for word in canonical_words(&module, 2, Symmetry::Plain) {
            let (a, b) = (word[0], word[1]);
            let mut residual = bracket.eval(&[a, b]);
            residual.add_scaled(&minus_one_pow(degrees[a] * degrees[b]), &bracket.eval(&[b, a]));
            if !residual.is_zero() {
                return Ok(Some((DglAxiom::Antisymmetry, Failure { arity: 2, word, residual })));
            }
        }
        let br = |x: &Vector, y: &Vector| bracket.eval_vectors(&[x.clone(), y.clone()]);
        for word in canonical_words(&module, 3, Symmetry::Plain) {
            let (a, b, c) = (word[0], word[1], word[2]);
            let (va, vb, vc) = (Vector::basis(a), Vector::basis(b), Vector::basis(c));
            let (da, db, dc) = (degrees[a], degrees[b], degrees[c]);
            let mut residual = br(&va, &br(&vb, &vc)).scaled(&minus_one_pow(da * dc));
            residual.add_scaled(&minus_one_pow(db * da), &br(&vb, &br(&vc, &va)));
            residual.add_scaled(&minus_one_pow(dc * db), &br(&vc, &br(&va, &vb)));
            if !residual.is_zero() {
                return Ok(Some((DglAxiom::Jacobi, Failure { arity: 3, word, residual })));
            }
        }
        for word in canonical_words(&module, 2, Symmetry::Plain) {
            let (a, b) = (word[0], word[1]);
            let (va, vb) = (Vector::basis(a), Vector::basis(b));
            let mut residual = differential.eval_vectors(&[br(&va, &vb)]);
            residual.sub_assign(&br(&differential.eval(&[a]), &vb));
            residual.add_scaled(&-minus_one_pow(degrees[a]), &br(&va, &differential.eval(&[b])));
            if !residual.is_zero() {
                return Ok(Some((DglAxiom::Leibniz, Failure { arity: 2, word, residual })));
            }
        }
        Ok(None)
    }

    pub fn module(&self) -> &Arc<GradedModule> {
        &self.module
    }

    pub fn differential(&self) -> &MultiMap {
        &self.differential
    }

    pub fn bracket(&self) -> &MultiMap {
        &self.bracket
    }

    /// `μ_1 = d`, `μ_2 = [·,·]`, `μ_n = 0` for `3 ≤ n ≤ max_arity`.
    pub fn to_linfty(&self, max_arity: usize) -> LInftyAlgebra {
        let mut mu = vec![self.differential.relabel_symmetry(Symmetry::Exterior), self.bracket.clone()];
        for n in 3..=max_arity {
            mu.push(MultiMap::zero(n, self.module.clone(), self.module.clone(), 2 - n as i64, Symmetry::Exterior));
        }
        mu.truncate(max_arity);
        LInftyAlgebra::unchecked(self.module.clone(), mu).expect("DGL components have the right shape")
    }
}

/// `W = L[1]` with the same basis labels.
pub fn suspension(module: &GradedModule) -> Arc<GradedModule> {
    Arc::new(module.shifted(1))
}

fn word_degrees(module: &GradedModule, word: &[usize]) -> Vec<i64> {
    word.iter().map(|&i| module.degree(i)).collect()
}

/// `Q_n(↓a_1⊙…⊙↓a_n) = (−1)^{Σ(n−i)|a_i|} ↓μ_n(a_1,…,a_n)`, the décalage image of
/// `(−1)^{n(n−1)/2} ↓∘μ_n∘↑ⁿ`.
pub fn shift_map(map: &MultiMap, shifted_source: &Arc<GradedModule>, shifted_target: &Arc<GradedModule>) -> Result<MultiMap> {
    if map.symmetry() != Symmetry::Exterior {
        return argument("only exterior maps shift to symmetric ones");
    }
    let n = map.arity();
    let source = map.source().clone();
    let degree = map.degree() + n as i64 - 1;
    Ok(MultiMap::from_fn(n, shifted_source.clone(), shifted_target.clone(), degree, Symmetry::Symmetric, |word| {
        map.eval(word).scaled(&decalage_sign(&word_degrees(&source, word)))
    }))
}

/// Inverse of [`shift_map`].
pub fn unshift_map(map: &MultiMap, source: &Arc<GradedModule>, target: &Arc<GradedModule>) -> Result<MultiMap> {
    if map.symmetry() != Symmetry::Symmetric {
        return argument("only symmetric maps unshift to exterior ones");
    }
    let n = map.arity();
    let degree = map.degree() + 1 - n as i64;
    Ok(MultiMap::from_fn(n, source.clone(), target.clone(), degree, Symmetry::Exterior, |word| {
        map.eval(word).scaled(&decalage_sign(&word_degrees(source, word)))
    }))
}

/// The coderivation `(Q_1, …, Q_A)` on `S(L[1])` of a family `(μ_1, …, μ_A)`.
pub fn shift_structure(module: &Arc<GradedModule>, mu: &[MultiMap]) -> Result<CoderivationComponents> {
    let shifted = suspension(module);
    let mut comps = Vec::with_capacity(mu.len());
    for (k, m) in mu.iter().enumerate() {
        let n = k + 1;
        if m.arity() != n || m.degree() != 2 - n as i64 || **m.source() != **module || **m.target() != **module {
            return argument(format!("μ_{n} must be an n-ary map L → L of degree {}", 2 - n as i64));
        }
        comps.push(shift_map(m, &shifted, &shifted)?);
    }
    CoderivationComponents::new(shifted, comps)
}

/// `(μ_1, …, μ_A)` from a degree `+1` coderivation on `S(L[1])`.
pub fn unshift_structure(module: &Arc<GradedModule>, q: &CoderivationComponents) -> Result<Vec<MultiMap>> {
    if q.module().degrees().iter().zip(module.degrees()).any(|(w, l)| *w != l - 1) || q.module().dim() != module.dim() {
        return argument("the coderivation does not live on L[1]");
    }
    q.components().iter().map(|m| unshift_map(m, module, module)).collect()
}

/// An L∞-algebra `(L, μ_1, …, μ_A)` truncated at arity `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LInftyAlgebra {
    module: Arc<GradedModule>,
    mu: Vec<MultiMap>,
    shifted: CoderivationComponents,
}

impl LInftyAlgebra {
    /// Builds the structure and asserts `Q² = 0` up to the truncation.
    pub fn new(module: Arc<GradedModule>, mu: Vec<MultiMap>) -> Result<Self> {
        let algebra = Self::unchecked(module, mu)?;
        let report = check_linfty(&algebra);
        if let Some(f) = report.first_failure {
            return precondition(format!("generalized Jacobi identity fails at arity {} on {:?}", f.arity, f.word));
        }
        Ok(algebra)
    }

    /// Builds a candidate structure without checking the generalized Jacobi identities.
    pub fn unchecked(module: Arc<GradedModule>, mu: Vec<MultiMap>) -> Result<Self> {
        let shifted = shift_structure(&module, &mu)?;
        Ok(Self { module, mu, shifted })
    }

    /// The algebra whose shifted structure is `q` on `S(L[1])`.
    pub fn from_shifted(module: Arc<GradedModule>, q: CoderivationComponents) -> Result<Self> {
        let mu = unshift_structure(&module, &q)?;
        Ok(Self { module, mu, shifted: q })
    }

    /// The linear algebra `(L, μ_1)` with all higher brackets zero.
    pub fn linear(differential: &MultiMap, max_arity: usize) -> Result<Self> {
        let module = differential.source().clone();
        let mut mu = vec![differential.relabel_symmetry(Symmetry::Exterior)];
        for n in 2..=max_arity {
            mu.push(MultiMap::zero(n, module.clone(), module.clone(), 2 - n as i64, Symmetry::Exterior));
        }
        Self::unchecked(module, mu)
    }

    pub fn module(&self) -> &Arc<GradedModule> {
        &self.module
    }

    pub fn mu(&self, n: usize) -> &MultiMap {
        &self.mu[n - 1]
    }

    pub fn brackets(&self) -> &[MultiMap] {
        &self.mu
    }

    pub fn max_arity(&self) -> usize {
        self.mu.len()
    }

    pub fn shifted(&self) -> &CoderivationComponents {
        &self.shifted
    }

    pub fn is_minimal(&self) -> bool {
        self.mu.first().is_none_or(MultiMap::is_zero)
    }

    pub fn truncated(&self, max_arity: usize) -> Self {
        let mu: Vec<MultiMap> = self.mu.iter().take(max_arity).cloned().collect();
        Self { module: self.module.clone(), shifted: self.shifted.truncated(max_arity), mu }
    }
}

/// Generalized Jacobi identities
/// `Σ_{k+l=n+1} Σ_{σ∈Sh(k,n)} (−1)^{k(l−1)} χ(σ) μ_l(μ_k(a_σ(1),…), a_σ(k+1),…) = 0`
/// for every `n ≤ A`, evaluated directly on `L`.
pub fn check_linfty(algebra: &LInftyAlgebra) -> CheckReport {
    let module = &algebra.module;
    let a = algebra.max_arity();
    for n in 1..=a {
        let shuffles: Vec<_> = (1..=n).map(|k| enumerate_shuffles(k, n).expect("k ≤ n")).collect();
        for word in canonical_words(module, n, Symmetry::Exterior) {
            let degrees = word_degrees(module, &word);
            let mut total = Vector::new();
            for k in 1..=n {
                let l = n + 1 - k;
                for sigma in &shuffles[k - 1] {
                    let permuted = sigma.permute(&word);
                    let inner = algebra.mu(k).eval(&permuted[..k]);
                    if inner.is_zero() {
                        continue;
                    }
                    let mut args = vec![inner];
                    args.extend(permuted[k..].iter().map(|&i| Vector::basis(i)));
                    let sign = minus_one_pow((k * (l - 1)) as i64) * chi_sign(sigma, &degrees).expect("orders match");
                    total.add_scaled(&sign, &algebra.mu(l).eval_vectors(&args));
                }
            }
            if !total.is_zero() {
                return CheckReport { max_arity: a, first_failure: Some(Failure { arity: n, word, residual: total }) };
            }
        }
    }
    CheckReport::pass(a)
}

/// The coalgebra-side check `Q² = 0` on the shifted structure.
pub fn check_linfty_shifted(algebra: &LInftyAlgebra) -> CheckReport {
    let square = coderivation_square(&algebra.shifted);
    for (k, comp) in square.components().iter().enumerate() {
        if let Some((word, residual)) = comp.entries().iter().next() {
            return CheckReport {
                max_arity: algebra.max_arity(),
                first_failure: Some(Failure { arity: k + 1, word: word.clone(), residual: residual.clone() }),
            };
        }
    }
    CheckReport::pass(algebra.max_arity())
}

/// An L∞-morphism `f = (f_1, …, f_A) : L → L'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LInftyMorphism {
    source: LInftyAlgebra,
    target: LInftyAlgebra,
    f: Vec<MultiMap>,
    shifted: MorphismComponents,
}

/// `F_n` from `f_n` by the same décalage rule as for structures.
pub fn shift_morphism(source: &Arc<GradedModule>, target: &Arc<GradedModule>, f: &[MultiMap]) -> Result<MorphismComponents> {
    let (ws, wt) = (suspension(source), suspension(target));
    let mut comps = Vec::with_capacity(f.len());
    for (k, m) in f.iter().enumerate() {
        let n = k + 1;
        if m.arity() != n || m.degree() != 1 - n as i64 || **m.source() != **source || **m.target() != **target {
            return argument(format!("f_{n} must be an n-ary map L → L' of degree {}", 1 - n as i64));
        }
        comps.push(shift_map(m, &ws, &wt)?);
    }
    MorphismComponents::new(ws, wt, comps)
}

/// `f_n` from `F_n`.
pub fn unshift_morphism(source: &Arc<GradedModule>, target: &Arc<GradedModule>, f: &MorphismComponents) -> Result<Vec<MultiMap>> {
    f.components().iter().map(|m| unshift_map(m, source, target)).collect()
}

impl LInftyMorphism {
    /// Builds the morphism and asserts the equivariance up to the truncation.
    pub fn new(source: LInftyAlgebra, target: LInftyAlgebra, f: Vec<MultiMap>) -> Result<Self> {
        let morphism = Self::unchecked(source, target, f)?;
        let report = check_lmorphism(&morphism)?;
        if let Some(fail) = report.first_failure {
            return precondition(format!("morphism condition fails at arity {} on {:?}", fail.arity, fail.word));
        }
        Ok(morphism)
    }

    pub fn unchecked(source: LInftyAlgebra, target: LInftyAlgebra, f: Vec<MultiMap>) -> Result<Self> {
        let f: Vec<MultiMap> = f.into_iter().map(|m| m.relabel_symmetry(Symmetry::Exterior)).collect();
        let shifted = shift_morphism(&source.module, &target.module, &f)?;
        Ok(Self { source, target, f, shifted })
    }

    pub fn from_shifted(source: LInftyAlgebra, target: LInftyAlgebra, shifted: MorphismComponents) -> Result<Self> {
        let f = unshift_morphism(&source.module, &target.module, &shifted)?;
        Ok(Self { source, target, f, shifted })
    }

    pub fn source(&self) -> &LInftyAlgebra {
        &self.source
    }

    pub fn target(&self) -> &LInftyAlgebra {
        &self.target
    }

    pub fn component(&self, n: usize) -> &MultiMap {
        &self.f[n - 1]
    }

    pub fn components(&self) -> &[MultiMap] {
        &self.f
    }

    pub fn max_arity(&self) -> usize {
        self.f.len()
    }

    pub fn shifted(&self) -> &MorphismComponents {
        &self.shifted
    }
}

/// Coalgebra-side morphism check: `F` intertwines `Q` and `Q'` up to the truncation.
pub fn check_lmorphism(morphism: &LInftyMorphism) -> Result<CheckReport> {
    check_equivariance(&morphism.shifted, &morphism.source.shifted, &morphism.target.shifted)
}

/// The DGL-target condition
/// `d f_n − Σ_{i+j=n} Σ_σ χ(σ)(−1)^{i+(j−1)(a_σ(1)+…+a_σ(i))} [f_i(…), f_j(…)]
///  = Σ_{k+l=n+1} Σ_{σ∈Sh(k,n)} (−1)^{k(l−1)} χ(σ) f_l(μ_k(…), …)`,
/// with the bracket sum over `σ ∈ Sh(i,n)` such that `σ(1) < σ(i+1)`.
pub fn check_lmorphism_dgl(morphism: &LInftyMorphism, target: &Dgl) -> Result<CheckReport> {
    if **target.module() != *morphism.target.module {
        return argument("the DGL is not the target of the morphism");
    }
    let a = morphism.max_arity().min(morphism.source.max_arity());
    let module = morphism.source.module.clone();
    for n in 1..=a {
        let shuffles: Vec<_> = (1..=n).map(|k| enumerate_shuffles(k, n).expect("k ≤ n")).collect();
        for word in canonical_words(&module, n, Symmetry::Exterior) {
            let degrees = word_degrees(&module, &word);
            let mut residual = target.differential().eval_vectors(&[morphism.component(n).eval(&word)]);
            for i in 1..n {
                let j = n - i;
                for sigma in shuffles[i - 1].iter().filter(|s| s.apply(1) < s.apply(i + 1)) {
                    let permuted = sigma.permute(&word);
                    let front: i64 = permuted[..i].iter().map(|&x| module.degree(x)).sum();
                    let sign = chi_sign(sigma, &degrees).expect("orders match")
                        * minus_one_pow(i as i64 + (j as i64 - 1) * front);
                    let left = morphism.component(i).eval(&permuted[..i]);
                    let right = morphism.component(j).eval(&permuted[i..]);
                    residual.add_scaled(&-sign, &target.bracket().eval_vectors(&[left, right]));
                }
            }
            for k in 1..=n {
                let l = n + 1 - k;
                for sigma in &shuffles[k - 1] {
                    let permuted = sigma.permute(&word);
                    let inner = morphism.source.mu(k).eval(&permuted[..k]);
                    if inner.is_zero() {
                        continue;
                    }
                    let mut args = vec![inner];
                    args.extend(permuted[k..].iter().map(|&x| Vector::basis(x)));
                    let sign = minus_one_pow((k * (l - 1)) as i64) * chi_sign(sigma, &degrees).expect("orders match");
                    residual.add_scaled(&-sign, &morphism.component(l).eval_vectors(&args));
                }
            }
            if !residual.is_zero() {
                return Ok(CheckReport { max_arity: a, first_failure: Some(Failure { arity: n, word, residual }) });
            }
        }
    }
    Ok(CheckReport::pass(a))
}

/// `Q_1^{(n)}` followed by `g`: `Σ_i (−1)^{|Q_1|(|w_1|+…+|w_{i−1}|)} g(w_1,…,Q_1 w_i,…,w_n)`.
fn after_linear_extension(g: &MultiMap, q1: &MultiMap, word: &[usize]) -> Vector {
    let degrees = g.source().degrees();
    let mut out = Vector::new();
    for i in 0..word.len() {
        let mut slots = vec![Slot::Identity; word.len()];
        slots[i] = Slot::Map(q1);
        let (sign, vectors) = koszul_apply(&slots, word, degrees);
        out.add_scaled(&sign, &g.eval_vectors(&vectors));
    }
    out
}

/// `δ(g) = Q_1' ∘ g − (−1)^{|g|} g ∘ Q_1^{(n)}` on symmetric maps `W^{⊙n} → W'`.
pub fn delta_hom(g: &MultiMap, q1: &MultiMap, q1_target: &MultiMap) -> Result<MultiMap> {
    if q1.arity() != 1 || q1_target.arity() != 1 || q1.source() != g.source() || q1_target.source() != g.target() {
        return argument("δ needs the linear parts of the source and target structures");
    }
    let sign = minus_one_pow(g.degree());
    let degree = g.degree() + q1.degree();
    Ok(MultiMap::from_fn(g.arity(), g.source().clone(), g.target().clone(), degree, g.symmetry(), |word| {
        let mut out = q1_target.eval_vectors(&[g.eval(word)]);
        out.add_scaled(&-sign.clone(), &after_linear_extension(g, q1, word));
        out
    }))
}

/// `r(f_1,…,f_{n−1}) = Σ_{k+l=n+1, k≥2} f_l∘Q_k^{(n)} − Σ_{k=2}^{n} Σ_{|I|=n} Q'_k∘f_I`.
///
/// `prefix` holds `F_1,…,F_{n−1}` and must be an `L_{n−1}`-homomorphism.
pub fn obstruction_r(prefix: &MorphismComponents, q: &CoderivationComponents, q_target: &CoderivationComponents) -> Result<MultiMap> {
    let n = prefix.max_arity() + 1;
    if q.max_arity() < n || q_target.max_arity() < n {
        return argument(format!("structures must reach arity {n}"));
    }
    let report = check_equivariance(prefix, &q.truncated(n - 1), &q_target.truncated(n - 1))?;
    if let Some(f) = report.first_failure {
        return precondition(format!("prefix is not an L_{}-homomorphism (fails at arity {})", n - 1, f.arity));
    }
    let mut comps = prefix.components().to_vec();
    comps.push(MultiMap::zero(n, prefix.source().clone(), prefix.target().clone(), 0, Symmetry::Symmetric));
    let extended = MorphismComponents::new(prefix.source().clone(), prefix.target().clone(), comps)?;
    Ok(MultiMap::from_fn(n, prefix.source().clone(), prefix.target().clone(), 1, Symmetry::Symmetric, |word| {
        let (left, right) = equivariance_sides(&extended, q, q_target, word);
        right.difference(&left)
    }))
}

/// Scalar helper: `(−1/2)^{k}`.
pub fn minus_half_pow(k: usize) -> Scalar {
    let mut out = Scalar::from_integer(1.into());
    for _ in 0..k {
        out *= crate::scalar::ratio(-1, 2);
    }
    out
}
