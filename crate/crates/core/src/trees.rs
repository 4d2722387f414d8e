//! Oriented binary trees: enumeration, the invariants `v`, `w`, `e`, the
//! operations addition, subtraction and composition, signed evaluation on
//! families of bilinear maps, and the triple ↔ 6-tuple correspondence.
//!
//! Ramifications are numbered `0..n-1` in increasing `v` (pre-order, root
//! first); leaves are numbered `1..=n` left to right. Child slot 1 is drawn
//! down-left and contributes the ternary digit 1.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{argument, Error, Result};
use crate::graded::{GradedModule, Permutation, Symmetry};
use crate::multimap::{MultiMap, Slot};
use crate::scalar::{int, minus_one_pow, Scalar};

/// Planar shape of an oriented tree; one shape per oriented-equivalence class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Shape {
    Leaf,
    Node(Box<Shape>, Box<Shape>),
}

impl Shape {
    fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(a, b) => a.leaves() + b.leaves(),
        }
    }
}

/// A node of a tree: a ramification (pre-order index) or a leaf (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Ramification(usize),
    Leaf(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct RamificationInfo {
    digits: Vec<u8>,
    parent: Option<usize>,
    children: [Node; 2],
    leaves: usize,
}

/// Oriented tree with `n ≥ 1` leaves and `n − 1` ramifications.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrientedTree {
    shape: Shape,
    ramifications: Vec<RamificationInfo>,
    leaf_digits: Vec<Vec<u8>>,
    leaf_parent: Vec<Option<usize>>,
}

/// Exact ternary value `0.d_1d_2…` of a node, with its digit string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NodeValue {
    pub digits: Vec<u8>,
    pub value: Scalar,
}

impl NodeValue {
    fn from_digits(digits: Vec<u8>) -> Self {
        let mut value = Scalar::zero();
        let mut scale = Scalar::from_integer(1.into());
        for &d in &digits {
            scale /= int(3);
            value += &scale * int(d as i64);
        }
        Self { digits, value }
    }
}

impl fmt::Display for NodeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0.")?;
        if self.digits.is_empty() {
            write!(f, "0")?;
        }
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl OrientedTree {
    fn from_shape(shape: Shape) -> Self {
        let mut tree = Self { shape: shape.clone(), ramifications: Vec::new(), leaf_digits: Vec::new(), leaf_parent: Vec::new() };
        let mut digits = Vec::new();
        tree.index(&shape, None, &mut digits);
        tree
    }

    fn index(&mut self, shape: &Shape, parent: Option<usize>, digits: &mut Vec<u8>) -> Node {
        match shape {
            Shape::Leaf => {
                self.leaf_digits.push(digits.clone());
                self.leaf_parent.push(parent);
                Node::Leaf(self.leaf_digits.len())
            }
            Shape::Node(left, right) => {
                let me = self.ramifications.len();
                self.ramifications.push(RamificationInfo {
                    digits: digits.clone(),
                    parent,
                    children: [Node::Leaf(0), Node::Leaf(0)],
                    leaves: shape.leaves(),
                });
                digits.push(1);
                let a = self.index(left, Some(me), digits);
                digits.pop();
                digits.push(2);
                let b = self.index(right, Some(me), digits);
                digits.pop();
                self.ramifications[me].children = [a, b];
                Node::Ramification(me)
            }
        }
    }

    /// The tree `τ` with one leaf.
    pub fn tau() -> Self {
        Self::from_shape(Shape::Leaf)
    }

    /// The unique tree `β` with two leaves.
    pub fn beta() -> Self {
        add_trees(&Self::tau(), &Self::tau())
    }

    pub fn n_leaves(&self) -> usize {
        self.leaf_digits.len()
    }

    pub fn n_ramifications(&self) -> usize {
        self.ramifications.len()
    }

    /// Parent of a non-root node; `None` for the root and for `τ`'s leaf.
    pub fn parent(&self, node: Node) -> Result<Option<usize>> {
        self.check_node(node)?;
        Ok(match node {
            Node::Ramification(k) => self.ramifications[k].parent,
            Node::Leaf(i) => self.leaf_parent[i - 1],
        })
    }

    /// Children of a ramification in slot order `(π = 1, π = 2)`.
    pub fn children(&self, k: usize) -> Result<[Node; 2]> {
        self.check_node(Node::Ramification(k))?;
        Ok(self.ramifications[k].children)
    }

    /// `π_{parent}(node)`, the slot in which `node` hangs.
    pub fn orientation(&self, node: Node) -> Result<Option<u8>> {
        Ok(self.node_value(node)?.digits.last().copied())
    }

    fn check_node(&self, node: Node) -> Result<()> {
        match node {
            Node::Ramification(k) if k < self.ramifications.len() => Ok(()),
            Node::Leaf(i) if i >= 1 && i <= self.n_leaves() => Ok(()),
            _ => argument(format!("{node:?} is not a node of this tree")),
        }
    }

    /// `v(node)`; the digit string is the path of slots from the root.
    pub fn node_value(&self, node: Node) -> Result<NodeValue> {
        self.check_node(node)?;
        let digits = match node {
            Node::Ramification(k) => self.ramifications[k].digits.clone(),
            Node::Leaf(i) => self.leaf_digits[i - 1].clone(),
        };
        Ok(NodeValue::from_digits(digits))
    }

    fn digits(&self, node: Node) -> &[u8] {
        match node {
            Node::Ramification(k) => &self.ramifications[k].digits,
            Node::Leaf(i) => &self.leaf_digits[i - 1],
        }
    }

    /// Number of leaves of the subtree `φ|_K`.
    pub fn subtree_leaves(&self, k: usize) -> Result<usize> {
        self.check_node(Node::Ramification(k))?;
        Ok(self.ramifications[k].leaves)
    }

    /// Leaves that lie before the ramification `k` in the `v` order.
    pub fn leaves_before(&self, k: usize) -> Result<usize> {
        self.check_node(Node::Ramification(k))?;
        let dk = &self.ramifications[k].digits;
        Ok(self.leaf_digits.iter().filter(|d| d.as_slice() < dk.as_slice()).count())
    }

    fn subshape(&self, k: usize) -> Shape {
        fn walk<'a>(shape: &'a Shape, digits: &[u8]) -> &'a Shape {
            match (shape, digits.split_first()) {
                (_, None) => shape,
                (Shape::Node(a, _), Some((1, rest))) => walk(a, rest),
                (Shape::Node(_, b), Some((_, rest))) => walk(b, rest),
                (Shape::Leaf, Some(_)) => unreachable!("digits address an existing node"),
            }
        }
        walk(&self.shape, &self.ramifications[k].digits).clone()
    }

    /// The subtree `φ|_K` rooted at ramification `k`.
    pub fn restrict(&self, k: usize) -> Result<Self> {
        self.check_node(Node::Ramification(k))?;
        Ok(Self::from_shape(self.subshape(k)))
    }

    /// Ramification indices of `φ|_K` inside this tree (a contiguous pre-order range).
    pub fn subtree_ramifications(&self, k: usize) -> Result<std::ops::Range<usize>> {
        self.check_node(Node::Ramification(k))?;
        Ok(k..k + self.ramifications[k].leaves - 1)
    }

    /// Textual literal: `.` for a leaf, `(left right)` for a ramification.
    pub fn literal(&self) -> String {
        fn write(shape: &Shape, out: &mut String) {
            match shape {
                Shape::Leaf => out.push('.'),
                Shape::Node(a, b) => {
                    out.push('(');
                    write(a, out);
                    out.push(' ');
                    write(b, out);
                    out.push(')');
                }
            }
        }
        let mut out = String::new();
        write(&self.shape, &mut out);
        out
    }

    /// Parses a literal; whitespace is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        fn parse_at(chars: &[char], pos: &mut usize) -> Result<Shape> {
            match chars.get(*pos) {
                Some('.') => {
                    *pos += 1;
                    Ok(Shape::Leaf)
                }
                Some('(') => {
                    *pos += 1;
                    let a = parse_at(chars, pos)?;
                    let b = parse_at(chars, pos)?;
                    if chars.get(*pos) != Some(&')') {
                        return Err(Error::Parse(format!("expected ')' at position {}", *pos)));
                    }
                    *pos += 1;
                    Ok(Shape::Node(Box::new(a), Box::new(b)))
                }
                other => Err(Error::Parse(format!("unexpected {other:?} at position {}", *pos))),
            }
        }
        let mut pos = 0;
        let shape = parse_at(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Parse("trailing characters after tree literal".into()));
        }
        Ok(Self::from_shape(shape))
    }
}

impl fmt::Debug for OrientedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrientedTree({})", self.literal())
    }
}

impl fmt::Display for OrientedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal())
    }
}

/// Canonical representatives of `Ot(n)`; trees with heavier left subtrees come first.
pub fn enumerate_ot(n: usize) -> Result<Vec<OrientedTree>> {
    if n == 0 {
        return argument("a tree needs at least one leaf");
    }
    Ok(shapes(n).into_iter().map(OrientedTree::from_shape).collect())
}

fn shapes(n: usize) -> Vec<Shape> {
    if n == 1 {
        return vec![Shape::Leaf];
    }
    let mut out = Vec::new();
    for left in (1..n).rev() {
        let lefts = shapes(left);
        let rights = shapes(n - left);
        for a in &lefts {
            for b in &rights {
                out.push(Shape::Node(Box::new(a.clone()), Box::new(b.clone())));
            }
        }
    }
    out
}

/// `w_φ(i) = s_φ(i) − (i − 1)` for leaves and `w_φ(K) = w_{φ−φ|_K}(K)` for ramifications.
pub fn weight_w(tree: &OrientedTree, node: Node) -> Result<i64> {
    tree.check_node(node)?;
    if tree.n_leaves() < 2 {
        return argument("the weight is defined for trees with at least two leaves");
    }
    match node {
        Node::Leaf(i) => {
            let dl = tree.digits(node);
            let smaller = tree.ramifications.iter().filter(|r| r.digits.as_slice() < dl).count();
            Ok(smaller as i64 - (i as i64 - 1))
        }
        Node::Ramification(0) => argument("the root has no weight"),
        Node::Ramification(k) => {
            let reduced = subtract_tree(tree, k)?;
            let leaf = tree.leaves_before(k)? + 1;
            weight_w(&reduced, Node::Leaf(leaf))
        }
    }
}

/// `e(φ) = (−1)^{w_φ(1)+…+w_φ(n)}`, and `e(τ) = 1`.
pub fn sign_e(tree: &OrientedTree) -> Scalar {
    if tree.n_leaves() < 2 {
        return int(1);
    }
    let total: i64 = (1..=tree.n_leaves()).map(|i| weight_w(tree, Node::Leaf(i)).expect("leaf exists")).sum();
    minus_one_pow(total)
}

/// `a + b`: a new root with `a` in slot 1 and `b` in slot 2.
pub fn add_trees(a: &OrientedTree, b: &OrientedTree) -> OrientedTree {
    OrientedTree::from_shape(Shape::Node(Box::new(a.shape.clone()), Box::new(b.shape.clone())))
}

/// `φ − φ|_K`: the subtree at ramification `k` becomes a single leaf.
pub fn subtract_tree(tree: &OrientedTree, k: usize) -> Result<OrientedTree> {
    tree.check_node(Node::Ramification(k))?;
    fn replace(shape: &Shape, digits: &[u8]) -> Shape {
        match (shape, digits.split_first()) {
            (_, None) => Shape::Leaf,
            (Shape::Node(a, b), Some((1, rest))) => Shape::Node(Box::new(replace(a, rest)), b.clone()),
            (Shape::Node(a, b), Some((_, rest))) => Shape::Node(a.clone(), Box::new(replace(b, rest))),
            (Shape::Leaf, Some(_)) => unreachable!("digits address an existing node"),
        }
    }
    Ok(OrientedTree::from_shape(replace(&tree.shape, &tree.ramifications[k].digits)))
}

/// `φ ∘ (ψ^{(1)}, …, ψ^{(n)})`: grafts `ψ^{(i)}` onto leaf `i`.
pub fn compose_trees(outer: &OrientedTree, inner: &[OrientedTree]) -> Result<OrientedTree> {
    if inner.len() != outer.n_leaves() {
        return argument(format!("{} inner trees for {} leaves", inner.len(), outer.n_leaves()));
    }
    fn graft(shape: &Shape, inner: &[OrientedTree], next: &mut usize) -> Shape {
        match shape {
            Shape::Leaf => {
                *next += 1;
                inner[*next - 1].shape.clone()
            }
            Shape::Node(a, b) => {
                let a = graft(a, inner, next);
                let b = graft(b, inner, next);
                Shape::Node(Box::new(a), Box::new(b))
            }
        }
    }
    let mut next = 0;
    Ok(OrientedTree::from_shape(graft(&outer.shape, inner, &mut next)))
}

/// Bilinear maps `b_K : L ⊗ L → L` indexed by the ramifications in pre-order.
#[derive(Clone, Debug)]
pub struct BilinearFamily {
    module: Arc<GradedModule>,
    maps: Vec<MultiMap>,
}

impl BilinearFamily {
    pub fn new(module: Arc<GradedModule>, maps: Vec<MultiMap>) -> Result<Self> {
        for m in &maps {
            if m.arity() != 2 || **m.source() != *module || **m.target() != *module {
                return argument("family members must be bilinear maps L ⊗ L → L");
            }
        }
        Ok(Self { module, maps })
    }

    /// The same map at every ramification of a tree with `n` leaves.
    pub fn constant(map: &MultiMap, n_leaves: usize) -> Result<Self> {
        Self::new(map.source().clone(), vec![map.clone(); n_leaves.saturating_sub(1)])
    }

    pub fn module(&self) -> &Arc<GradedModule> {
        &self.module
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn get(&self, k: usize) -> &MultiMap {
        &self.maps[k]
    }

    /// Sub-family on a contiguous range of ramifications.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self { module: self.module.clone(), maps: self.maps[range].to_vec() }
    }

    /// Total degree `Σ_K |b_K|`.
    pub fn total_degree(&self) -> i64 {
        self.maps.iter().map(MultiMap::degree).sum()
    }

    pub fn concat(parts: &[&Self]) -> Result<Self> {
        let module = parts.first().map(|p| p.module.clone()).ok_or_else(|| Error::Argument("empty family list".into()))?;
        Self::new(module, parts.iter().flat_map(|p| p.maps.iter().cloned()).collect())
    }
}

/// `φ(B) : L^{⊗n} → L`, a plain multilinear map; Koszul signs come from map degrees.
pub fn evaluate(tree: &OrientedTree, family: &BilinearFamily) -> Result<MultiMap> {
    if family.len() != tree.n_ramifications() {
        return argument(format!(
            "family has {} maps for {} ramifications",
            family.len(),
            tree.n_ramifications()
        ));
    }
    let module = family.module.clone();
    fn rec(shape: &Shape, family: &BilinearFamily, next: &mut usize, module: &Arc<GradedModule>) -> Result<Option<MultiMap>> {
        match shape {
            Shape::Leaf => Ok(None),
            Shape::Node(a, b) => {
                let outer = family.maps[*next].clone();
                *next += 1;
                let left = rec(a, family, next, module)?;
                let right = rec(b, family, next, module)?;
                let slots = [
                    left.as_ref().map_or(Slot::Identity, Slot::Map),
                    right.as_ref().map_or(Slot::Identity, Slot::Map),
                ];
                MultiMap::tensor_compose(&outer, &slots, module.clone()).map(Some)
            }
        }
    }
    let mut next = 0;
    match rec(&tree.shape, family, &mut next, &module)? {
        Some(map) => Ok(map),
        None => Ok(MultiMap::identity(module).to_plain()),
    }
}

/// Exponent of the composition sign: `Σ_i |B^{(i)}| · Σ_{K∈V, v(K) > v(i)} |b_K|`.
pub fn composition_exponent(outer: &OrientedTree, outer_family: &BilinearFamily, inner_families: &[BilinearFamily]) -> Result<i64> {
    if inner_families.len() != outer.n_leaves() || outer_family.len() != outer.n_ramifications() {
        return argument("family shapes do not match the composition");
    }
    let mut exponent = 0;
    for (i, family) in inner_families.iter().enumerate() {
        let leaf_digits = outer.digits(Node::Leaf(i + 1));
        let later: i64 = (0..outer.n_ramifications())
            .filter(|&k| outer.ramifications[k].digits.as_slice() > leaf_digits)
            .map(|k| outer_family.get(k).degree())
            .sum();
        exponent += family.total_degree() * later;
    }
    Ok(exponent)
}

/// Family of the composite tree assembled from the outer and inner families.
pub fn composite_family(
    outer: &OrientedTree,
    outer_family: &BilinearFamily,
    inner: &[OrientedTree],
    inner_families: &[BilinearFamily],
) -> Result<BilinearFamily> {
    // Pre-order of the composite interleaves each grafted subtree right after
    // the outer ramification whose slot it fills.
    fn rec(
        shape: &Shape,
        outer_family: &BilinearFamily,
        inner_families: &[BilinearFamily],
        next_ram: &mut usize,
        next_leaf: &mut usize,
        out: &mut Vec<MultiMap>,
    ) {
        match shape {
            Shape::Leaf => {
                out.extend(inner_families[*next_leaf].maps.iter().cloned());
                *next_leaf += 1;
            }
            Shape::Node(a, b) => {
                out.push(outer_family.maps[*next_ram].clone());
                *next_ram += 1;
                rec(a, outer_family, inner_families, next_ram, next_leaf, out);
                rec(b, outer_family, inner_families, next_ram, next_leaf, out);
            }
        }
    }
    if inner.len() != outer.n_leaves() || inner_families.len() != inner.len() {
        return argument("family shapes do not match the composition");
    }
    let mut maps = Vec::new();
    let (mut r, mut l) = (0, 0);
    rec(&outer.shape, outer_family, inner_families, &mut r, &mut l, &mut maps);
    BilinearFamily::new(outer_family.module.clone(), maps)
}

/// A triple `(Φ, K, σ)` with `K` a non-root ramification of `Φ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub tree: OrientedTree,
    pub ramification: usize,
    pub sigma: Permutation,
}

/// A 6-tuple `(k, φ, ψ, ρ, γ, δ)` with `2 ≤ k ≤ n − 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SixTuple {
    pub k: usize,
    pub phi: OrientedTree,
    pub psi: OrientedTree,
    pub rho: Permutation,
    pub gamma: Permutation,
    pub delta: Permutation,
}

impl SixTuple {
    pub fn n(&self) -> usize {
        self.rho.len()
    }

    /// `r = γ^{-1}(1) − 1`.
    pub fn r(&self) -> usize {
        self.gamma.inverse().apply(1) - 1
    }
}

/// Forward direction `(Φ, K, σ) ↦ (k, φ, ψ, ρ, γ, δ)`.
pub fn triple_to_six(triple: &Triple) -> Result<SixTuple> {
    let n = triple.tree.n_leaves();
    let kk = triple.ramification;
    if n < 3 || triple.sigma.len() != n {
        return argument("a triple needs n ≥ 3 and σ ∈ Σ_n");
    }
    if kk == 0 {
        return argument("the root is not an admissible ramification (k ≤ n − 1)");
    }
    triple.tree.check_node(Node::Ramification(kk))?;
    let k = triple.tree.subtree_leaves(kk)?;
    let l = n + 1 - k;
    let phi = triple.tree.restrict(kk)?;
    let psi = subtract_tree(&triple.tree, kk)?;
    let r = triple.tree.leaves_before(kk)?;
    let s = |i: usize| triple.sigma.apply(i);
    let mut front: Vec<usize> = (r + 1..=r + k).map(s).collect();
    front.sort_unstable();
    let mut images = front.clone();
    images.extend((1..=n).filter(|i| !front.contains(i)));
    let rho = Permutation::new(images)?;
    let rho_inv = rho.inverse();
    let delta = Permutation::new((1..=k).map(|i| rho_inv.apply(s(r + i))).collect())?;
    let gamma_images: Vec<usize> = (1..=l)
        .map(|i| {
            if i <= r {
                rho_inv.apply(s(i)) + 1 - k
            } else if i == r + 1 {
                1
            } else {
                rho_inv.apply(s(i + k - 1)) + 1 - k
            }
        })
        .collect();
    let gamma = Permutation::new(gamma_images)?;
    Ok(SixTuple { k, phi, psi, rho, gamma, delta })
}

/// Backward direction `(k, φ, ψ, ρ, γ, δ) ↦ (Φ, K, σ)`.
pub fn six_to_triple(six: &SixTuple) -> Result<Triple> {
    let n = six.rho.len();
    let k = six.k;
    let l = n + 1 - k;
    if n < 3 || k < 2 || k > n - 1 {
        return argument("6-tuple needs n ≥ 3 and 2 ≤ k ≤ n − 1");
    }
    if six.phi.n_leaves() != k || six.psi.n_leaves() != l || six.gamma.len() != l || six.delta.len() != k {
        return argument("6-tuple components have inconsistent sizes");
    }
    if !six.rho.is_shuffle(k) {
        return argument("ρ is not a (k, n)-shuffle");
    }
    let r = six.r();
    let mut inner = vec![OrientedTree::tau(); l];
    inner[r] = six.phi.clone();
    let tree = compose_trees(&six.psi, &inner)?;
    let ramification = (0..tree.n_ramifications())
        .find(|&c| tree.leaves_before(c).ok() == Some(r) && tree.ramifications[c].leaves == k && {
            let digits = &tree.ramifications[c].digits;
            six.psi.leaf_digits[r] == *digits
        })
        .ok_or_else(|| Error::Argument("grafted root not found".into()))?;
    let g = |i: usize| six.gamma.apply(i);
    let sigma_images: Vec<usize> = (1..=n)
        .map(|i| {
            if i <= r {
                six.rho.apply(g(i) + k - 1)
            } else if i <= r + k {
                six.rho.apply(six.delta.apply(i - r))
            } else {
                six.rho.apply(g(i - (k - 1)) + k - 1)
            }
        })
        .collect();
    Ok(Triple { tree, ramification, sigma: Permutation::new(sigma_images)? })
}

/// Every triple `(Φ, K, σ)` with `K` a non-root ramification, for `n ≥ 3` leaves.
pub fn all_triples(n: usize) -> Result<Vec<Triple>> {
    let mut out = Vec::new();
    for tree in enumerate_ot(n)? {
        for k in 1..tree.n_ramifications() {
            for sigma in Permutation::all(n) {
                out.push(Triple { tree: tree.clone(), ramification: k, sigma });
            }
        }
    }
    Ok(out)
}

/// Every 6-tuple for `n ≥ 3`.
pub fn all_six_tuples(n: usize) -> Result<Vec<SixTuple>> {
    let mut out = Vec::new();
    for k in 2..n {
        let l = n + 1 - k;
        for phi in enumerate_ot(k)? {
            for psi in enumerate_ot(l)? {
                for rho in crate::graded::enumerate_shuffles(k, n)? {
                    for gamma in Permutation::all(l) {
                        for delta in Permutation::all(k) {
                            out.push(SixTuple {
                                k,
                                phi: phi.clone(),
                                psi: psi.clone(),
                                rho: rho.clone(),
                                gamma: gamma.clone(),
                                delta,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The three maps of the sign lemma for corresponding tuples, each already
/// multiplied by its stated sign so that all three must coincide:
/// `ψ(B')∘γ∘(φ(B'')∘δ⊗1⊗…⊗1)∘ρ`,
/// `(−1)^{r+rk} ψ(B')∘(1^{⊗r}⊗φ(B'')⊗1⊗…⊗1)∘σ` and
/// `(−1)^{r+rk+Σ_{K∈W} |b_K|·|B''|} Φ(B)∘σ`, where `W` collects the
/// ramifications of `ψ` lying after `K̂` in `Φ`.
pub fn sign_lemma_terms(
    six: &SixTuple,
    outer_family: &BilinearFamily,
    inner_family: &BilinearFamily,
    action: Symmetry,
) -> Result<[MultiMap; 3]> {
    let triple = six_to_triple(six)?;
    let module = outer_family.module.clone();
    let n = six.n();
    let k = six.k;
    let l = n + 1 - k;
    let r = six.r() as i64;
    let psi_map = evaluate(&six.psi, outer_family)?;
    let phi_map = evaluate(&six.phi, inner_family)?;

    let psi_gamma = psi_map.after_permutation(&six.gamma, action)?;
    let phi_delta = phi_map.after_permutation(&six.delta, action)?;
    let mut slots = vec![Slot::Map(&phi_delta)];
    slots.extend(std::iter::repeat(Slot::Identity).take(l - 1));
    let first = MultiMap::tensor_compose(&psi_gamma, &slots, module.clone())?.after_permutation(&six.rho, action)?;

    let mut slots = vec![Slot::Identity; l];
    slots[r as usize] = Slot::Map(&phi_map);
    let middle = MultiMap::tensor_compose(&psi_map, &slots, module.clone())?.after_permutation(&triple.sigma, action)?;
    let second = middle.scaled(&minus_one_pow(r + r * k as i64));

    let mut inner_families = vec![BilinearFamily::new(module.clone(), vec![])?; l];
    inner_families[r as usize] = inner_family.clone();
    let mut inner_trees = vec![OrientedTree::tau(); l];
    inner_trees[r as usize] = six.phi.clone();
    let family = composite_family(&six.psi, outer_family, &inner_trees, &inner_families)?;
    let whole = evaluate(&triple.tree, &family)?.after_permutation(&triple.sigma, action)?;
    let hat = &triple.tree.ramifications[triple.ramification].digits;
    let inside = triple.tree.subtree_ramifications(triple.ramification)?;
    let later: i64 = (0..triple.tree.n_ramifications())
        .filter(|c| !inside.contains(c) && triple.tree.ramifications[*c].digits > *hat)
        .map(|c| family.get(c).degree())
        .sum();
    let third = whole.scaled(&minus_one_pow(r + r * k as i64 + later * inner_family.total_degree()));
    Ok([first, second, third])
}
