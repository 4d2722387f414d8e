//! The free symmetric coalgebra `S(W)`: coalgebra morphisms and coderivations
//! through their corestriction components.
//!
//! All components are symmetric maps on `W` (ε-action). A family is truncated
//! at its `max_arity`; every identity is asserted arity by arity below it.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;

use crate::error::{argument, Result};
use crate::graded::{bubble_sort_parity, canonicalize, epsilon_sign, enumerate_shuffles, GradedModule, Permutation, Symmetry};
use crate::lincomb::{Vector, WordComb};
use crate::multimap::{canonical_words, koszul_apply, word_product, MultiMap, Slot};
use crate::report::{CheckReport, Failure};
use crate::scalar::{factorial, parity_sign, Scalar};

/// Components `(Q_1, …, Q_A)` of a coderivation of fixed degree on `S(W)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoderivationComponents {
    module: Arc<GradedModule>,
    degree: i64,
    comps: Vec<MultiMap>,
    curvature: Option<Vector>,
}

impl CoderivationComponents {
    /// Degree `+1` family; `comps[n-1]` is `Q_n`.
    pub fn new(module: Arc<GradedModule>, comps: Vec<MultiMap>) -> Result<Self> {
        Self::with_degree(module, 1, comps)
    }

    pub fn with_degree(module: Arc<GradedModule>, degree: i64, comps: Vec<MultiMap>) -> Result<Self> {
        for (k, comp) in comps.iter().enumerate() {
            if comp.arity() != k + 1
                || comp.degree() != degree
                || comp.symmetry() != Symmetry::Symmetric
                || **comp.source() != *module
                || **comp.target() != *module
            {
                return argument(format!("component {} is not a symmetric degree-{degree} map on W", k + 1));
            }
        }
        Ok(Self { module, degree, comps, curvature: None })
    }

    pub fn zero(module: Arc<GradedModule>, degree: i64, max_arity: usize) -> Self {
        let comps = (1..=max_arity)
            .map(|n| MultiMap::zero(n, module.clone(), module.clone(), degree, Symmetry::Symmetric))
            .collect();
        Self { module, degree, comps, curvature: None }
    }

    /// Enables `Q_0(1) = q0`, an element of degree `degree`.
    pub fn with_curvature(mut self, q0: Vector) -> Result<Self> {
        if q0.keys().any(|&i| i >= self.module.dim() || self.module.degree(i) != self.degree) {
            return argument("curvature must be homogeneous of the coderivation degree");
        }
        self.curvature = if q0.is_zero() { None } else { Some(q0) };
        Ok(self)
    }

    pub fn module(&self) -> &Arc<GradedModule> {
        &self.module
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn max_arity(&self) -> usize {
        self.comps.len()
    }

    /// `Q_n` for `1 ≤ n ≤ max_arity`.
    pub fn component(&self, n: usize) -> &MultiMap {
        &self.comps[n - 1]
    }

    pub fn components(&self) -> &[MultiMap] {
        &self.comps
    }

    pub fn curvature(&self) -> Option<&Vector> {
        self.curvature.as_ref()
    }

    pub fn truncated(&self, max_arity: usize) -> Self {
        Self { comps: self.comps.iter().take(max_arity).cloned().collect(), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.curvature.is_none() && self.comps.iter().all(MultiMap::is_zero)
    }

    fn component_or_zero(&self, n: usize) -> Option<&MultiMap> {
        if n >= 1 && n <= self.comps.len() {
            Some(&self.comps[n - 1])
        } else {
            None
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> Self {
        Self {
            comps: self.comps.iter().map(|c| c.scaled(factor)).collect(),
            curvature: self.curvature.as_ref().map(|c| c.scaled(factor)).filter(|c| !c.is_zero()),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree || *self.module != *other.module {
            return argument("coderivations of different degree or module");
        }
        let n = self.max_arity().min(other.max_arity());
        let comps = (1..=n).map(|k| self.component(k).add(other.component(k))).collect::<Result<Vec<_>>>()?;
        let mut curvature = self.curvature.clone().unwrap_or_default();
        if let Some(c) = &other.curvature {
            curvature.add_assign(c);
        }
        Self::with_degree(self.module.clone(), self.degree, comps)?.with_curvature(curvature)
    }
}

/// Components `(F_1, …, F_A)` of a degree-0 coalgebra morphism `S(W) → S(W')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismComponents {
    source: Arc<GradedModule>,
    target: Arc<GradedModule>,
    comps: Vec<MultiMap>,
}

impl MorphismComponents {
    pub fn new(source: Arc<GradedModule>, target: Arc<GradedModule>, comps: Vec<MultiMap>) -> Result<Self> {
        for (k, comp) in comps.iter().enumerate() {
            if comp.arity() != k + 1
                || comp.degree() != 0
                || comp.symmetry() != Symmetry::Symmetric
                || **comp.source() != *source
                || **comp.target() != *target
            {
                return argument(format!("component {} is not a symmetric degree-0 map W → W'", k + 1));
            }
        }
        Ok(Self { source, target, comps })
    }

    /// `F_1 = f`, `F_n = 0` for `2 ≤ n ≤ max_arity`.
    pub fn strict(linear: MultiMap, max_arity: usize) -> Result<Self> {
        let source = linear.source().clone();
        let target = linear.target().clone();
        let linear = linear.relabel_symmetry(Symmetry::Symmetric);
        let mut comps = vec![linear];
        for n in 2..=max_arity {
            comps.push(MultiMap::zero(n, source.clone(), target.clone(), 0, Symmetry::Symmetric));
        }
        Self::new(source, target, comps)
    }

    pub fn identity(module: Arc<GradedModule>, max_arity: usize) -> Self {
        Self::strict(MultiMap::identity(module), max_arity).expect("identity is a valid morphism")
    }

    pub fn source(&self) -> &Arc<GradedModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedModule> {
        &self.target
    }

    pub fn max_arity(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, n: usize) -> &MultiMap {
        &self.comps[n - 1]
    }

    pub fn components(&self) -> &[MultiMap] {
        &self.comps
    }

    pub fn truncated(&self, max_arity: usize) -> Self {
        Self { comps: self.comps.iter().take(max_arity).cloned().collect(), ..self.clone() }
    }

    pub fn is_strict(&self) -> bool {
        self.comps.iter().skip(1).all(MultiMap::is_zero)
    }

    /// First component (arity, word, residual) where the two families differ.
    pub fn first_difference(&self, other: &Self) -> Option<Failure> {
        for (k, (a, b)) in self.comps.iter().zip(&other.comps).enumerate() {
            if let Some((word, residual)) = a.first_difference(b) {
                return Some(Failure { arity: k + 1, word, residual });
            }
        }
        None
    }
}

/// A map `W^{⊙n} → S(W')` stored on canonical words, values in canonical words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalgebraMap {
    arity: usize,
    source: Arc<GradedModule>,
    target: Arc<GradedModule>,
    entries: BTreeMap<Vec<usize>, WordComb>,
}

impl CoalgebraMap {
    pub fn from_fn(
        arity: usize,
        source: Arc<GradedModule>,
        target: Arc<GradedModule>,
        mut f: impl FnMut(&[usize]) -> WordComb,
    ) -> Self {
        let mut entries = BTreeMap::new();
        for word in canonical_words(&source, arity, Symmetry::Symmetric) {
            let value = f(&word);
            if !value.is_zero() {
                entries.insert(word, value);
            }
        }
        Self { arity, source, target, entries }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, WordComb> {
        &self.entries
    }

    pub fn eval(&self, word: &[usize]) -> WordComb {
        let mut sorted = word.to_vec();
        let degrees = self.source.degrees();
        let odd = bubble_sort_parity(&mut sorted, |i| degrees[i], Symmetry::Symmetric);
        match self.entries.get(&sorted) {
            Some(v) if odd => v.negated(),
            Some(v) => v.clone(),
            None => WordComb::new(),
        }
    }

    /// Projection onto `W'^{⊙k}`.
    pub fn block(&self, k: usize) -> Self {
        let entries = self
            .entries
            .iter()
            .filter_map(|(w, v)| {
                let part: WordComb = v.iter().filter(|(key, _)| key.len() == k).map(|(key, c)| (key.clone(), c.clone())).collect();
                (!part.is_zero()).then(|| (w.clone(), part))
            })
            .collect();
        Self { entries, ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (word, value) in &other.entries {
            let slot = self.entries.entry(word.clone()).or_default();
            slot.add_assign(value);
            if slot.is_zero() {
                self.entries.remove(word);
            }
        }
    }
}

/// Set partitions of `{0..n-1}` into exactly `k` blocks, blocks ordered by
/// their least element, each block increasing.
pub fn set_partitions(n: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(i: usize, n: usize, k: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if blocks.len() + (n - i) < k {
            return;
        }
        if i == n {
            if blocks.len() == k {
                out.push(blocks.clone());
            }
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, k, blocks, out);
            blocks[b].pop();
        }
        if blocks.len() < k {
            blocks.push(vec![i]);
            rec(i + 1, n, k, blocks, out);
            blocks.pop();
        }
    }
    rec(0, n, k, &mut blocks, &mut out);
    out
}

/// Compositions `I = (i_1, …, i_k)` of `n` with positive parts.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(rest: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            if rest == 0 {
                out.push(current.clone());
            }
            return;
        }
        let slots_left = k - current.len();
        for part in 1..=rest.saturating_sub(slots_left - 1) {
            current.push(part);
            rec(rest - part, k, current, out);
            current.pop();
        }
    }
    if k > 0 {
        rec(n, k, &mut current, &mut out);
    } else if n == 0 {
        out.push(Vec::new());
    }
    out
}

/// Sign `ε(σ_P, w)` of the permutation listing the blocks of `P` one after another.
pub(crate) fn partition_sign(blocks: &[Vec<usize>], word: &[usize], degrees: &[i64]) -> Scalar {
    let mut order: Vec<usize> = blocks.iter().flatten().copied().collect();
    parity_sign(bubble_sort_parity(&mut order, |p| degrees[word[p]], Symmetry::Symmetric))
}

fn block_words(blocks: &[Vec<usize>], word: &[usize]) -> Vec<Vec<usize>> {
    blocks.iter().map(|b| b.iter().map(|&p| word[p]).collect()).collect()
}

/// `F_I = (1/(I!k!)) (F_{i_1}⊙…⊙F_{i_k}) ∘ α_n`, evaluated by the full sum over Σ_n.
pub fn morphism_multi_index(f: &MorphismComponents, index: &[usize]) -> Result<CoalgebraMap> {
    let n: usize = index.iter().sum();
    if index.is_empty() || index.iter().any(|&i| i == 0 || i > f.max_arity()) {
        return argument(format!("multi-index {index:?} outside 1..={}", f.max_arity()));
    }
    let k = index.len();
    let mut denominator = factorial(k);
    for &i in index {
        denominator *= factorial(i);
    }
    let weight = Scalar::one() / denominator;
    let slots: Vec<Slot<'_>> = index.iter().map(|&i| Slot::Map(f.component(i))).collect();
    let perms = Permutation::all(n);
    let source_degrees = f.source.degrees().to_vec();
    let target_degrees = f.target.degrees().to_vec();
    Ok(CoalgebraMap::from_fn(n, f.source.clone(), f.target.clone(), |word| {
        let word_degrees: Vec<i64> = word.iter().map(|&i| source_degrees[i]).collect();
        let mut out = WordComb::new();
        for sigma in &perms {
            let sign = epsilon_sign(sigma, &word_degrees).expect("orders match");
            let (koszul, vectors) = koszul_apply(&slots, &sigma.permute(word), &source_degrees);
            let product = word_product(&vectors, &target_degrees, Symmetry::Symmetric);
            out.add_scaled(&(sign * koszul * &weight), &product);
        }
        out
    }))
}

/// `F_{n,k} = Σ_{i_1+…+i_k=n} F_I` for `k = 1..n`, returned in order of `k`.
pub fn expand_morphism(f: &MorphismComponents, n: usize) -> Result<Vec<CoalgebraMap>> {
    if n == 0 || n > f.max_arity() {
        return argument(format!("arity {n} outside 1..={}", f.max_arity()));
    }
    let mut blocks = Vec::with_capacity(n);
    for k in 1..=n {
        let mut block = CoalgebraMap::from_fn(n, f.source.clone(), f.target.clone(), |_| WordComb::new());
        for index in compositions(n, k) {
            block.add_assign(&morphism_multi_index(f, &index)?);
        }
        blocks.push(block);
    }
    Ok(blocks)
}

/// `F_{n,k}(w)` on one word through the set-partition form of the same sum.
pub fn morphism_power(f: &MorphismComponents, word: &[usize], k: usize) -> WordComb {
    let mut out = WordComb::new();
    let source_degrees = f.source.degrees();
    let target_degrees = f.target.degrees();
    for blocks in set_partitions(word.len(), k) {
        if blocks.iter().any(|b| b.len() > f.max_arity()) {
            continue;
        }
        let sign = partition_sign(&blocks, word, source_degrees);
        let vectors: Vec<Vector> =
            block_words(&blocks, word).iter().map(|w| f.component(w.len()).eval(w)).collect();
        out.add_scaled(&sign, &word_product(&vectors, target_degrees, Symmetry::Symmetric));
    }
    out
}

/// `target_map ∘ F_{n,k}` on one word, without materialising `S^k(W')`.
pub(crate) fn apply_after_power(target_map: &MultiMap, f: &MorphismComponents, word: &[usize]) -> Vector {
    let k = target_map.arity();
    let mut out = Vector::new();
    let source_degrees = f.source.degrees();
    for blocks in set_partitions(word.len(), k) {
        if blocks.iter().any(|b| b.len() > f.max_arity()) {
            continue;
        }
        let sign = partition_sign(&blocks, word, source_degrees);
        let vectors: Vec<Vector> =
            block_words(&blocks, word).iter().map(|w| f.component(w.len()).eval(w)).collect();
        out.add_scaled(&sign, &target_map.eval_vectors(&vectors));
    }
    out
}

/// `Q_{n,l} = (Q_{n−l+1} ⊗ 1 ⊗ … ⊗ 1) ∘ α_{n−l+1,n}`, projected to `W^{⊙l}`.
pub fn coderivation_block(q: &CoderivationComponents, n: usize, l: usize) -> Result<CoalgebraMap> {
    if l == 0 || l > n + 1 {
        return argument(format!("output power {l} outside 1..={}", n + 1));
    }
    let k = n + 1 - l;
    let module = q.module.clone();
    let degrees = module.degrees().to_vec();
    if k == 0 {
        let q0 = q.curvature.clone().unwrap_or_default();
        return Ok(CoalgebraMap::from_fn(n, module.clone(), module, |word| {
            let mut vectors = vec![q0.clone()];
            vectors.extend(word.iter().map(|&i| Vector::basis(i)));
            word_product(&vectors, &degrees, Symmetry::Symmetric)
        }));
    }
    let Some(qk) = q.component_or_zero(k) else {
        return argument(format!("component Q_{k} beyond the truncation"));
    };
    let shuffles = enumerate_shuffles(k, n)?;
    let mut slots = vec![Slot::Map(qk)];
    slots.extend(std::iter::repeat(Slot::Identity).take(n - k));
    Ok(CoalgebraMap::from_fn(n, module.clone(), module, |word| {
        let word_degrees: Vec<i64> = word.iter().map(|&i| degrees[i]).collect();
        let mut out = WordComb::new();
        for sigma in &shuffles {
            let sign = epsilon_sign(sigma, &word_degrees).expect("orders match");
            let (koszul, vectors) = koszul_apply(&slots, &sigma.permute(word), &degrees);
            out.add_scaled(&(sign * koszul), &word_product(&vectors, &degrees, Symmetry::Symmetric));
        }
        out
    }))
}

/// `Q̂_n(w) = Σ_{l=0}^{n} Σ_{σ∈Sh(l,n)} ε(σ) Q_l(w_{σ(1)},…) ⊙ w_{σ(l+1)} ⊙ …`.
pub fn expand_coderivation(q: &CoderivationComponents, n: usize) -> Result<CoalgebraMap> {
    if n == 0 || n > q.max_arity() {
        return argument(format!("arity {n} outside 1..={}", q.max_arity()));
    }
    let module = q.module.clone();
    let degrees = module.degrees().to_vec();
    Ok(CoalgebraMap::from_fn(n, module.clone(), module, |word| {
        let word_degrees: Vec<i64> = word.iter().map(|&i| degrees[i]).collect();
        let mut out = WordComb::new();
        for l in 0..=n {
            let value_of_front: Box<dyn Fn(&[usize]) -> Vector> = if l == 0 {
                match &q.curvature {
                    Some(q0) => Box::new(move |_| q0.clone()),
                    None => continue,
                }
            } else {
                let ql = q.component(l);
                Box::new(move |w| ql.eval(w))
            };
            for sigma in enumerate_shuffles(l, n).expect("l ≤ n") {
                let sign = epsilon_sign(&sigma, &word_degrees).expect("orders match");
                let permuted = sigma.permute(word);
                let mut vectors = vec![value_of_front(&permuted[..l])];
                vectors.extend(permuted[l..].iter().map(|&i| Vector::basis(i)));
                out.add_scaled(&sign, &word_product(&vectors, &degrees, Symmetry::Symmetric));
            }
        }
        out
    }))
}

/// `Σ_{k} Σ_{σ∈Sh(k,n)} ε(σ) outer_{n−k+1}(inner_k(w_{σ(1..k)}), w_{σ(k+1)}, …)` on one word.
fn shuffle_insert(
    outer: impl Fn(usize) -> Option<MultiMap>,
    inner: &CoderivationComponents,
    word: &[usize],
    degrees: &[i64],
) -> Vector {
    let n = word.len();
    let word_degrees: Vec<i64> = word.iter().map(|&i| degrees[i]).collect();
    let mut out = Vector::new();
    for k in 0..=n {
        let Some(outer_map) = outer(n - k + 1) else { continue };
        if k == 0 {
            if let Some(q0) = &inner.curvature {
                let mut args = vec![q0.clone()];
                args.extend(word.iter().map(|&i| Vector::basis(i)));
                out.add_assign(&outer_map.eval_vectors(&args));
            }
            continue;
        }
        let Some(inner_map) = inner.component_or_zero(k) else { continue };
        for sigma in enumerate_shuffles(k, n).expect("k ≤ n") {
            let sign = epsilon_sign(&sigma, &word_degrees).expect("orders match");
            let permuted = sigma.permute(word);
            let front = inner_map.eval(&permuted[..k]);
            if front.is_zero() {
                continue;
            }
            let mut args = vec![front];
            args.extend(permuted[k..].iter().map(|&i| Vector::basis(i)));
            out.add_scaled(&sign, &outer_map.eval_vectors(&args));
        }
    }
    out
}

/// Corestriction components of the composite `P ∘ Q` of two coderivations.
///
/// Terms that would need `P_{n+1}` beyond the truncation are dropped, so with
/// curvature the top component is only a truncation.
pub fn compose_coderivations(p: &CoderivationComponents, q: &CoderivationComponents) -> Result<Vec<MultiMap>> {
    if *p.module != *q.module {
        return argument("coderivations live on different modules");
    }
    let a = p.max_arity().min(q.max_arity());
    let module = p.module.clone();
    let degrees = module.degrees().to_vec();
    let degree = p.degree + q.degree;
    Ok((1..=a)
        .map(|n| {
            MultiMap::from_fn(n, module.clone(), module.clone(), degree, Symmetry::Symmetric, |word| {
                shuffle_insert(|m| p.component_or_zero(m).cloned(), q, word, &degrees)
            })
        })
        .collect())
}

/// `Q ∘ Q` as a degree-`2|Q|` family of components.
pub fn coderivation_square(q: &CoderivationComponents) -> CoderivationComponents {
    let comps = compose_coderivations(q, q).expect("same module");
    let mut square = CoderivationComponents::with_degree(q.module.clone(), 2 * q.degree, comps).expect("valid components");
    if let Some(q0) = &q.curvature {
        let q1q0 = if q.max_arity() >= 1 { q.component(1).eval_vectors(std::slice::from_ref(q0)) } else { Vector::new() };
        square = square.with_curvature(q1q0).expect("homogeneous");
    }
    square
}

/// Graded commutator `[P, Q] = P∘Q − (−1)^{|P||Q|} Q∘P`.
pub fn commutator(p: &CoderivationComponents, q: &CoderivationComponents) -> Result<CoderivationComponents> {
    let pq = compose_coderivations(p, q)?;
    let qp = compose_coderivations(q, p)?;
    let sign = parity_sign((p.degree * q.degree).rem_euclid(2) == 1);
    let comps = pq
        .iter()
        .zip(&qp)
        .map(|(a, b)| {
            let mut c = a.clone();
            c.add_assign_unchecked(&-sign.clone(), b);
            c
        })
        .collect();
    let mut out = CoderivationComponents::with_degree(p.module.clone(), p.degree + q.degree, comps)?;
    let mut curvature = Vector::new();
    if let (Some(q0), Some(p1)) = (&q.curvature, p.component_or_zero(1)) {
        curvature.add_assign(&p1.eval_vectors(std::slice::from_ref(q0)));
    }
    if let (Some(p0), Some(q1)) = (&p.curvature, q.component_or_zero(1)) {
        curvature.add_scaled(&-sign, &q1.eval_vectors(std::slice::from_ref(p0)));
    }
    out.curvature = if curvature.is_zero() { None } else { Some(curvature) };
    Ok(out)
}

/// `(F ∘ G)_p = Σ_k Σ_{|I|=p} F_k ∘ G_I`, truncated at the shorter family.
pub fn compose_formal(f: &MorphismComponents, g: &MorphismComponents) -> Result<MorphismComponents> {
    if *f.source != *g.target {
        return argument("cannot compose: source of F differs from target of G");
    }
    let a = f.max_arity().min(g.max_arity());
    let g = g.truncated(a);
    let comps = (1..=a).map(|p| compose_component(f, &g, p)).collect();
    MorphismComponents::new(g.source.clone(), f.target.clone(), comps)
}

/// The single component `(F ∘ G)_p`; needs `F_1..F_p` and `G_1..G_p`.
pub fn compose_component(f: &MorphismComponents, g: &MorphismComponents, p: usize) -> MultiMap {
    MultiMap::from_fn(p, g.source.clone(), f.target.clone(), 0, Symmetry::Symmetric, |word| {
        let mut out = Vector::new();
        for k in 1..=p.min(f.max_arity()) {
            out.add_assign(&apply_after_power(f.component(k), g, word));
        }
        out
    })
}

/// Both sides of `Σ_k Σ_{|I|=n} Q'_k∘F_I = Σ_{k+l=n+1} F_l∘(Q_k⊗1⊗…⊗1)∘α_{k,n}` on one word.
pub fn equivariance_sides(
    f: &MorphismComponents,
    q: &CoderivationComponents,
    q_target: &CoderivationComponents,
    word: &[usize],
) -> (Vector, Vector) {
    let n = word.len();
    let mut left = Vector::new();
    for k in 1..=n.min(q_target.max_arity()) {
        left.add_assign(&apply_after_power(q_target.component(k), f, word));
    }
    let right = shuffle_insert(
        |l| (l >= 1 && l <= f.max_arity()).then(|| f.component(l).clone()),
        q,
        word,
        f.source.degrees(),
    );
    (left, right)
}

/// Checks that `F` intertwines `Q` and `Q'` for every arity up to the shared truncation.
pub fn check_equivariance(
    f: &MorphismComponents,
    q: &CoderivationComponents,
    q_target: &CoderivationComponents,
) -> Result<CheckReport> {
    if *q.module != *f.source || *q_target.module != *f.target {
        return argument("coderivations do not live on the morphism's modules");
    }
    if q.degree != q_target.degree {
        return argument("coderivations of different degrees");
    }
    let mut a = f.max_arity().min(q.max_arity()).min(q_target.max_arity());
    if q.curvature.is_some() || q_target.curvature.is_some() {
        let image = f.component(1).eval_vectors(&[q.curvature.clone().unwrap_or_default()]);
        let expected = q_target.curvature.clone().unwrap_or_default();
        let residual = image.difference(&expected);
        if !residual.is_zero() {
            return Ok(CheckReport { max_arity: a, first_failure: Some(Failure { arity: 0, word: vec![], residual }) });
        }
        a = a.saturating_sub(1);
    }
    let fixed = f.truncated(a.max(1));
    for n in 1..=a {
        for word in canonical_words(&f.source, n, Symmetry::Symmetric) {
            let (left, right) = equivariance_sides(if q.curvature.is_some() { f } else { &fixed }, q, q_target, &word);
            let residual = left.difference(&right);
            if !residual.is_zero() {
                return Ok(CheckReport { max_arity: a, first_failure: Some(Failure { arity: n, word, residual }) });
            }
        }
    }
    Ok(CheckReport::pass(a))
}

/// Canonical form of a symmetric word, or `None` if it vanishes.
pub fn canonical_symmetric_word(word: &[usize], degrees: &[i64]) -> Option<(Scalar, Vec<usize>)> {
    canonicalize(word, degrees, Symmetry::Symmetric).map(|(odd, w)| (parity_sign(odd), w))
}
