//! Named differential graded Lie algebras and the seeded random generator
//! built from them.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{argument, Result};
use crate::graded::{GradedModule, Symmetry};
use crate::linalg::coordinates;
use crate::lincomb::Vector;
use crate::linfty::Dgl;
use crate::multimap::MultiMap;
use crate::random::{small_nonzero, SeededRng};
use crate::scalar::{int, Scalar};

/// Basis `(label, degree)` in any order; it is sorted stably by degree.
pub type BasisSpec<'a> = &'a [(&'a str, i64)];
/// `(argument labels, [(coefficient, output label)])`.
pub type Entries<'a> = &'a [(&'a [&'a str], &'a [(i64, &'a str)])];

fn module_from(basis: BasisSpec<'_>) -> Result<Arc<GradedModule>> {
    let mut sorted: Vec<(i64, String)> = basis.iter().map(|(l, d)| (*d, l.to_string())).collect();
    sorted.sort_by_key(|(d, _)| *d);
    Ok(Arc::new(GradedModule::from_basis(sorted)?))
}

fn lookup(module: &GradedModule, label: &str) -> Result<usize> {
    module.index_of(label).ok_or_else(|| crate::error::Error::Argument(format!("unknown basis label {label:?}")))
}

fn fill(map: &mut MultiMap, module: &GradedModule, entries: Entries<'_>) -> Result<()> {
    for (args, value) in entries {
        let word = args.iter().map(|l| lookup(module, l)).collect::<Result<Vec<_>>>()?;
        let mut v = Vector::new();
        for (c, l) in value.iter() {
            v.add_term(lookup(module, l)?, int(*c));
        }
        map.insert(&word, &v)?;
    }
    Ok(())
}

/// A DGL from label tables; entries are listed on one ordering of each word.
pub fn build_dgl(basis: BasisSpec<'_>, differential: Entries<'_>, bracket: Entries<'_>) -> Result<Dgl> {
    let module = module_from(basis)?;
    let mut d = MultiMap::zero(1, module.clone(), module.clone(), 1, Symmetry::Symmetric);
    fill(&mut d, &module, differential)?;
    let mut b = MultiMap::zero(2, module.clone(), module.clone(), 0, Symmetry::Exterior);
    fill(&mut b, &module, bracket)?;
    Dgl::new(d, b)
}

pub fn sl2() -> Dgl {
    build_dgl(
        &[("e", 0), ("f", 0), ("h", 0)],
        &[],
        &[(&["h", "e"], &[(2, "e")]), (&["h", "f"], &[(-2, "f")]), (&["e", "f"], &[(1, "h")])],
    )
    .expect("sl2 is a Lie algebra")
}

/// The two-dimensional non-abelian Lie algebra `[x, y] = y`.
pub fn aff2() -> Dgl {
    build_dgl(&[("x", 0), ("y", 0)], &[], &[(&["x", "y"], &[(1, "y")])]).expect("aff2 is a Lie algebra")
}

pub fn heisenberg() -> Dgl {
    build_dgl(&[("x", 0), ("y", 0), ("z", 0)], &[], &[(&["x", "y"], &[(1, "z")])]).expect("heis3 is a Lie algebra")
}

/// Two-term acyclic complex `x ↦ y` in degrees `k`, `k+1`, abelian.
pub fn contractible_pair(k: i64) -> Dgl {
    build_dgl(&[("x", k), ("y", k + 1)], &[(&["x"], &[(1, "y")])], &[]).expect("acyclic pair")
}

/// Six-dimensional DGL with a nonzero triple Massey-type bracket:
/// `[a,b] = w = dx`, `[x,c] = z`, all other brackets zero; `|a|=p`, `|b|=q`, `|c|=r`.
pub fn massey(p: i64, q: i64, r: i64) -> Dgl {
    build_dgl(
        &[("a", p), ("b", q), ("c", r), ("x", p + q - 1), ("w", p + q), ("z", p + q + r - 1)],
        &[(&["x"], &[(1, "w")])],
        &[(&["a", "b"], &[(1, "w")]), (&["x", "c"], &[(1, "z")])],
    )
    .expect("the Massey template satisfies Jacobi and Leibniz for all degrees")
}

/// `g ⊗ A` for a Lie algebra `g` concentrated in degree 0 and the square-zero
/// CDGA `A = ⟨1, e, t⟩`, `|e| = k − 1`, `|t| = k`, `de = t`.
pub fn tensor_square_zero(g: &Dgl, k: i64) -> Result<Dgl> {
    let gm = g.module();
    if gm.degrees().iter().any(|&d| d != 0) || !g.differential().is_zero() {
        return argument("the Lie factor must be concentrated in degree 0 with d = 0");
    }
    let labels: Vec<String> = gm.labels().to_vec();
    let names = |suffix: &str| labels.iter().map(|l| format!("{l}{suffix}")).collect::<Vec<_>>();
    let (plain, with_e, with_t) = (names(""), names("·e"), names("·t"));
    let mut basis: Vec<(i64, String)> = plain.iter().map(|l| (0, l.clone())).collect();
    basis.extend(with_e.iter().map(|l| (k - 1, l.clone())));
    basis.extend(with_t.iter().map(|l| (k, l.clone())));
    basis.sort_by_key(|(d, _)| *d);
    let module = Arc::new(GradedModule::from_basis(basis)?);
    let idx = |l: &str| module.index_of(l).expect("label present");
    let mut d = MultiMap::zero(1, module.clone(), module.clone(), 1, Symmetry::Symmetric);
    for i in 0..labels.len() {
        d.insert(&[idx(&with_e[i])], &Vector::basis(idx(&with_t[i])))?;
    }
    let mut b = MultiMap::zero(2, module.clone(), module.clone(), 0, Symmetry::Exterior);
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            let value = g.bracket().eval(&[i, j]);
            for (family, _) in [(&plain, 0), (&with_e, 1), (&with_t, 2)] {
                let image: Vector = value.iter().map(|(&o, c)| (idx(&family[o]), c.clone())).collect();
                if family == &plain && i < j {
                    b.insert(&[idx(&plain[i]), idx(&plain[j])], &image)?;
                } else if family != &plain {
                    b.insert(&[idx(&plain[i]), idx(&family[j])], &image)?;
                }
            }
        }
    }
    Dgl::new(d, b)
}

/// `g ⊗ ℚ[t]/(t²)` with `|t| = k` even, `d = 0`.
pub fn tensor_dual_numbers(g: &Dgl, k: i64) -> Result<Dgl> {
    let gm = g.module();
    if k % 2 != 0 || gm.degrees().iter().any(|&d| d != 0) || !g.differential().is_zero() {
        return argument("need an even degree and a Lie factor in degree 0");
    }
    let labels = gm.labels().to_vec();
    let mut basis: Vec<(i64, String)> = labels.iter().map(|l| (0, l.clone())).collect();
    basis.extend(labels.iter().map(|l| (k, format!("{l}·t"))));
    basis.sort_by_key(|(d, _)| *d);
    let module = Arc::new(GradedModule::from_basis(basis)?);
    let n = labels.len();
    let (at0, att) = if k > 0 { (0, n) } else { (n, 0) };
    let d = MultiMap::zero(1, module.clone(), module.clone(), 1, Symmetry::Symmetric);
    let mut b = MultiMap::zero(2, module.clone(), module.clone(), 0, Symmetry::Exterior);
    for i in 0..n {
        for j in 0..n {
            let value = g.bracket().eval(&[i, j]);
            let shift = |offset: usize| value.iter().map(|(&o, c)| (o + offset, c.clone())).collect::<Vector>();
            if i < j {
                b.insert(&[at0 + i, at0 + j], &shift(at0))?;
            }
            b.insert(&[at0 + i, att + j], &shift(att))?;
        }
    }
    Dgl::new(d, b)
}

/// Direct sum of DGLs with labels tagged by `tags`.
pub fn direct_sum(left: &Dgl, right: &Dgl, tags: (&str, &str)) -> Result<Dgl> {
    let (sum, lpos, rpos) = left.module().direct_sum(right.module(), tags.0, tags.1);
    let sum = Arc::new(sum);
    let mut d = MultiMap::zero(1, sum.clone(), sum.clone(), 1, Symmetry::Symmetric);
    let mut b = MultiMap::zero(2, sum.clone(), sum.clone(), 0, Symmetry::Exterior);
    for (part, pos) in [(left, &lpos), (right, &rpos)] {
        let embed = |v: &Vector| v.iter().map(|(&i, c)| (pos[i], c.clone())).collect::<Vector>();
        for (word, v) in part.differential().entries() {
            d.insert(&[pos[word[0]]], &embed(v))?;
        }
        for (word, v) in part.bracket().entries() {
            b.insert(&[pos[word[0]], pos[word[1]]], &embed(v))?;
        }
    }
    Dgl::new(d, b)
}

/// An abelian DGL: `pairs` acyclic pairs and `cycles` lone cycles with degrees in `degrees`.
pub fn abelian_complex(rng: &mut SeededRng, pairs: usize, cycles: usize, degrees: std::ops::RangeInclusive<i64>) -> Dgl {
    let (lo, hi) = (*degrees.start(), *degrees.end());
    let mut basis = Vec::new();
    let mut d_entries = Vec::new();
    for p in 0..pairs {
        let k = rng.gen_range(lo..hi);
        basis.push((format!("s{p}"), k));
        basis.push((format!("t{p}"), k + 1));
        d_entries.push((format!("s{p}"), format!("t{p}")));
    }
    for c in 0..cycles {
        basis.push((format!("h{c}"), rng.gen_range(lo..=hi)));
    }
    let basis_ref: Vec<(&str, i64)> = basis.iter().map(|(l, d)| (l.as_str(), *d)).collect();
    let d_tables: Vec<(Vec<&str>, Vec<(i64, &str)>)> =
        d_entries.iter().map(|(s, t)| (vec![s.as_str()], vec![(1, t.as_str())])).collect();
    let d_ref: Vec<(&[&str], &[(i64, &str)])> = d_tables.iter().map(|(a, v)| (a.as_slice(), v.as_slice())).collect();
    build_dgl(&basis_ref, &d_ref, &[]).expect("abelian complexes are DGLs")
}

/// Transports a DGL along a random invertible degree-preserving basis change.
pub fn random_basis_change(rng: &mut SeededRng, dgl: &Dgl) -> Result<Dgl> {
    let module = dgl.module().clone();
    let n = module.dim();
    // Column i of T is the image of e_i; T is invertible by construction.
    let mut columns: Vec<Vector> = (0..n).map(Vector::basis).collect();
    for deg_block in module.components().iter().map(|c| module.indices_of_degree(c.degree)) {
        let idx: Vec<usize> = deg_block.collect();
        for _ in 0..idx.len() * 2 {
            let (&i, &j) = (idx.choose(rng).expect("nonempty"), idx.choose(rng).expect("nonempty"));
            if i != j {
                let c = small_nonzero(rng, 2);
                let add = columns[j].scaled(&c);
                columns[i].add_assign(&add);
            }
        }
        if rng.gen_bool(0.5) {
            let i = *idx.choose(rng).expect("nonempty");
            columns[i] = columns[i].scaled(&Scalar::new(1.into(), 2.into()));
        }
    }
    let to_new = |v: &Vector| coordinates(&columns, v).expect("T is invertible");
    let d = MultiMap::from_fn(1, module.clone(), module.clone(), 1, Symmetry::Symmetric, |w| {
        to_new(&dgl.differential().eval_vectors(&[columns[w[0]].clone()]))
    });
    let b = MultiMap::from_fn(2, module.clone(), module.clone(), 0, Symmetry::Exterior, |w| {
        to_new(&dgl.bracket().eval_vectors(&[columns[w[0]].clone(), columns[w[1]].clone()]))
    });
    Dgl::new(d, b)
}

/// Seeded random DGL of total dimension at most 6 with degrees in `[−2, 3]`.
pub fn random_dgl(rng: &mut SeededRng) -> Dgl {
    let base = match rng.gen_range(0..7) {
        0 => {
            let pairs = rng.gen_range(1..=2);
            let cycles = rng.gen_range(0..=2);
            abelian_complex(rng, pairs, cycles, -2..=3)
        }
        1 => {
            let pair = contractible_pair(rng.gen_range(-2..=2));
            let cycle = abelian_complex(rng, 0, 1, -2..=3);
            let with_pair = direct_sum(&sl2(), &pair, ("", "p.")).expect("sum");
            direct_sum(&with_pair, &cycle, ("", "q.")).expect("sum")
        }
        2 => direct_sum(&heisenberg(), &contractible_pair(rng.gen_range(-2..=2)), ("", "p.")).expect("sum"),
        3 => tensor_square_zero(&aff2(), rng.gen_range(1..=3)).expect("aff2 ⊗ A"),
        4 => tensor_dual_numbers(&sl2(), *[-2, 2].choose(rng).expect("nonempty")).expect("sl2 ⊗ ℚ[t]/t²"),
        5 => {
            let p = rng.gen_range(0..=1);
            let q = rng.gen_range(0..=1);
            let r = rng.gen_range(-1..=1);
            massey(p, q, r)
        }
        _ => direct_sum(&aff2(), &massey_small(rng), ("", "m.")).expect("sum"),
    };
    random_basis_change(rng, &base).expect("basis changes preserve the axioms")
}

fn massey_small(rng: &mut SeededRng) -> Dgl {
    let k = rng.gen_range(-1..=2);
    direct_sum(&contractible_pair(k), &abelian_complex(rng, 0, 2, -2..=3), ("", "h.")).expect("sum")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;

    #[test]
    fn catalog_members_are_dgls() {
        for g in [sl2(), aff2(), heisenberg(), contractible_pair(0), massey(0, 0, 0), massey(1, 0, -1)] {
            assert!(Dgl::first_violation(g.differential(), g.bracket()).unwrap().is_none());
        }
        assert_eq!(tensor_square_zero(&aff2(), 2).unwrap().module().dim(), 6);
        assert_eq!(tensor_dual_numbers(&sl2(), 2).unwrap().module().dim(), 6);
    }

    #[test]
    fn random_dgls_are_small_and_valid() {
        let mut rng = seeded(7);
        for _ in 0..40 {
            let g = random_dgl(&mut rng);
            assert!(g.module().dim() <= 6);
            assert!(g.module().degrees().iter().all(|d| (-2..=3).contains(d)));
        }
    }
}
