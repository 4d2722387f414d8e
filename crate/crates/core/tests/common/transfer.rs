//! Transfer oracles that avoid the tree machinery.
//!
//! `canonical_transfer` solves the morphism equations arity by arity with
//! components in `im η`; such a solution is unique, so it must agree with the
//! tree sums. `massey_mu3` expands the two three-leaf trees by hand.

use linfty_core::linfty::unshift_structure;
use linfty_core::linfty::unshift_morphism;
use linfty_core::{
    obstruction_r, CoderivationComponents, Dgl, HodgeData, MorphismComponents, MultiMap, Scalar, Symmetry, Vector,
};
use linfty_core::catalog::random_dgl;
use linfty_core::random::{random_map, seeded};
use linfty_core::{build_splitting, minimal_model, transfer_morphism};
use num_traits::One;

/// `(μ_n)` on `H` and `(f_n)` into `L`, unshifted, from `F_n = η r_0`, `Q'_n = −pr_H r_0`.
pub fn canonical_transfer(dgl: &Dgl, hodge: &HodgeData, arity: usize) -> (Vec<MultiMap>, Vec<MultiMap>) {
    let ql = dgl.to_linfty(arity).shifted().clone();
    let wl = ql.module().clone();
    let wh = linfty_core::linfty::suspension(hodge.homology());
    let eta = hodge.splitting().eta().with_modules(wl.clone(), wl.clone(), -1);
    let project = hodge.project_h().with_modules(wl.clone(), wh.clone(), 0);
    let mut q = vec![MultiMap::zero(1, wh.clone(), wh.clone(), 1, Symmetry::Symmetric)];
    let mut f = vec![hodge.include_h().with_modules(wh.clone(), wl.clone(), 0)];
    for n in 2..=arity {
        q.push(MultiMap::zero(n, wh.clone(), wh.clone(), 1, Symmetry::Symmetric));
        let partial = CoderivationComponents::new(wh.clone(), q.clone()).unwrap();
        let prefix = MorphismComponents::new(wh.clone(), wl.clone(), f.clone()).unwrap();
        let r0 = obstruction_r(&prefix, &partial, &ql.truncated(n)).unwrap();
        q[n - 1] = r0.then(&project).unwrap().scaled(&-Scalar::one());
        f.push(r0.then(&eta).unwrap());
    }
    let q = CoderivationComponents::new(wh.clone(), q).unwrap();
    let f = MorphismComponents::new(wh, wl, f).unwrap();
    (
        unshift_structure(hodge.homology(), &q).unwrap(),
        unshift_morphism(hodge.homology(), dgl.module(), &f).unwrap(),
    )
}

pub fn sign(odd: bool) -> Scalar {
    if odd {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

/// `χ(σ; x)` from inversions: `sgn(σ)` times the Koszul sign of each swapped pair.
pub fn chi(perm: &[usize], degrees: &[i64]) -> Scalar {
    let mut odd = false;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                odd ^= true;
                odd ^= (degrees[perm[i]] * degrees[perm[j]]).rem_euclid(2) == 1;
            }
        }
    }
    sign(odd)
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// `μ_3 = −(1/4) Σ_σ χ(σ)[ −R(g(x_σ1, x_σ2), x_σ3) + (−1)^{|x_σ1|} R(x_σ1, g(x_σ2, x_σ3)) ]`
/// with `R = (1 − P)[·,·]`, projected to `H`; the two summands are the left
/// comb (`e = −1`) and the right comb (`e = +1`).
pub fn massey_mu3(dgl: &Dgl, hodge: &HodgeData, word: &[usize]) -> Vector {
    let h = hodge.homology();
    let bracket = |u: &Vector, v: &Vector| dgl.bracket().eval_vectors(&[u.clone(), v.clone()]);
    let eta = |u: &Vector| hodge.splitting().eta().eval_vectors(&[u.clone()]);
    let projector = |u: &Vector| hodge.projector().eval_vectors(&[u.clone()]);
    let root = |u: &Vector, v: &Vector| {
        let b = bracket(u, v);
        b.difference(&projector(&b))
    };
    let xs: Vec<Vector> = word.iter().map(|&i| hodge.include_h().eval(&[i])).collect();
    let degrees: Vec<i64> = word.iter().map(|&i| h.degree(i)).collect();
    let mut sum = Vector::new();
    for perm in PERMS3 {
        let c = chi(&perm, &degrees);
        let (a, b, z) = (&xs[perm[0]], &xs[perm[1]], &xs[perm[2]]);
        let left = root(&eta(&bracket(a, b)), z);
        let right = root(a, &eta(&bracket(b, z))).scaled(&sign(degrees[perm[0]].rem_euclid(2) == 1));
        sum.add_scaled(&c, &right.difference(&left));
    }
    let value = hodge.project_h().eval_vectors(&[sum]);
    value.scaled(&Scalar::new((-1).into(), 4.into()))
}

/// Transfer morphisms with `f_{n−1}` shifted by a random `δ`-cycle: still
/// `L_{n−1}`, but `r` is no longer `δ(f_n)`.
pub fn perturbed_prefixes(count: usize) -> Vec<(MorphismComponents, CoderivationComponents, CoderivationComponents)> {
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < count {
        let dgl = random_dgl(&mut seeded(seed));
        let h = HodgeData::new(&dgl, &build_splitting(&dgl)).unwrap();
        let f = transfer_morphism(&h, &minimal_model(&h, 4).unwrap()).unwrap();
        let (qh, ql) = (f.source().shifted().clone(), f.target().shifted().clone());
        let n = 2 + (seed as usize % 3);
        let mut rng = seeded(seed + 1000);
        let wh = qh.module().clone();
        let noise = random_map(&mut rng, n - 1, wh.clone(), wh.clone(), 0, Symmetry::Symmetric, 0.7);
        let cycle = noise.then(&h.include_h().with_modules(wh.clone(), ql.module().clone(), 0)).unwrap();
        let mut comps = f.shifted().truncated(n - 1).components().to_vec();
        if n - 1 >= 2 {
            comps[n - 2] = comps[n - 2].add(&cycle).unwrap();
        }
        out.push((MorphismComponents::new(wh, ql.module().clone(), comps).unwrap(), qh.truncated(n), ql.truncated(n)));
        seed += 1;
    }
    out
}
