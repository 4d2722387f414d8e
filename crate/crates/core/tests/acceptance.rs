//! The ten acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::coalgebra::{by_length, identity_word, reduced_coproduct, tensor_apply};
use common::transfer::{massey_mu3, perturbed_prefixes};
use linfty_core::catalog::random_dgl;
use linfty_core::deformation::{
    base_change, deformation_from_morphism, semiuniversal_deformation, tangent_complex, unidef_correspondence,
    universal_deformation, FormalDgManifold, Window,
};
use linfty_core::linfty::suspension;
use linfty_core::random::{random_coderivation, random_map, random_module, random_morphism, seeded, SeededRng};
use linfty_core::trees::{all_six_tuples, sign_lemma_terms};
use linfty_core::{
    build_splitting, canonical_words, check_linfty, check_lmorphism, coderivation_square, compose_formal,
    contractible_factor, decompose, delta_hom, enumerate_ot, expand_coderivation, expand_morphism, invert_formal, io,
    minimal_model, obstruction_r, sign_e, transfer_morphism, BilinearFamily, CoalgebraMap, CoderivationComponents,
    GradedModule, HodgeData, MorphismComponents, MultiMap, OrientedTree, Symmetry, Vector,
};
use num_traits::One;
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn hodge(dgl: &linfty_core::Dgl) -> HodgeData {
    HodgeData::new(dgl, &build_splitting(dgl)).expect("splitting is valid")
}

/// Every full bracketing of `n` leaves, built by recursion on the root split.
fn bracketings(n: usize) -> BTreeSet<String> {
    if n == 1 {
        return BTreeSet::from([".".to_string()]);
    }
    let mut out = BTreeSet::new();
    for k in 1..n {
        for left in bracketings(k) {
            for right in bracketings(n - k) {
                out.insert(format!("({left} {right})"));
            }
        }
    }
    out
}

fn tree_counts() -> Outcome {
    let mut counts = Vec::new();
    for n in 1..=6 {
        let literals: BTreeSet<String> = enumerate_ot(n).map_err(|e| e.to_string())?.iter().map(OrientedTree::literal).collect();
        ensure!(literals == bracketings(n), "n = {n}: enumeration differs from the recursive oracle");
        counts.push(literals.len());
    }
    ensure!(counts == [1, 1, 2, 5, 14, 42], "counts {counts:?}");
    let figure: BTreeSet<String> =
        ["(. (. (. .)))", "(. ((. .) .))", "((. .) (. .))", "(((. .) .) .)", "((. (. .)) .)"].map(String::from).into();
    let four: BTreeSet<String> = enumerate_ot(4).unwrap().iter().map(OrientedTree::literal).collect();
    ensure!(four == figure, "the four-leaf trees differ from the expected five");
    Ok(format!("counts {counts:?}"))
}

fn tree_signs() -> Outcome {
    let e = |literal: &str| sign_e(&OrientedTree::parse(literal).unwrap());
    let one = linfty_core::Scalar::one();
    ensure!(e(".") == one, "e(τ) = {}", e("."));
    ensure!(e("(. .)") == -one.clone(), "e(β) = {}", e("(. .)"));
    let (first, second) = (e("((. .) .)"), e("(. (. .))"));
    ensure!(first == -one.clone() && second == one, "3-leaf signs ({first}, {second})");
    Ok("e(τ)=1, e(β)=-1, 3-leaf (-1, 1)".into())
}

fn full_morphism(f: &MorphismComponents, n: usize) -> CoalgebraMap {
    let mut blocks = expand_morphism(f, n).unwrap().into_iter();
    let mut total = blocks.next().unwrap();
    for b in blocks {
        total.add_assign(&b);
    }
    total
}

fn coalgebra_diagrams() -> Outcome {
    let mut words = 0;
    for sample in 0..30u64 {
        let mut rng = seeded(9000 + sample);
        let dim = rng.gen_range(1..=3);
        let w = Arc::new(random_module(&mut rng, dim, -1..=2, "w"));
        let target_dim = rng.gen_range(1..=3);
        let target = Arc::new(random_module(&mut rng, target_dim, -1..=2, "t"));
        let q = random_coderivation(&mut rng, w.clone(), 4, 0.6);
        let f = random_morphism(&mut rng, w.clone(), target.clone(), 4, 0.6);
        let q_hat: BTreeMap<usize, CoalgebraMap> = (1..=4).map(|n| (n, expand_coderivation(&q, n).unwrap())).collect();
        let f_hat: BTreeMap<usize, CoalgebraMap> = (1..=4).map(|n| (n, full_morphism(&f, n))).collect();
        let degrees = w.degrees();
        for n in 1..=4 {
            for word in canonical_words(&w, n, Symmetry::Symmetric) {
                let split = reduced_coproduct(&identity_word(&word), degrees);
                let left = reduced_coproduct(&q_hat[&n].eval(&word), degrees);
                let mut right = tensor_apply(&split, by_length(&q_hat), identity_word, 0, degrees);
                right.add_assign(&tensor_apply(&split, identity_word, by_length(&q_hat), 1, degrees));
                ensure!(left == right, "coderivation diagram, sample {sample}, word {word:?}");
                let left = reduced_coproduct(&f_hat[&n].eval(&word), target.degrees());
                let right = tensor_apply(&split, by_length(&f_hat), by_length(&f_hat), 0, degrees);
                ensure!(left == right, "morphism diagram, sample {sample}, word {word:?}");
                words += 1;
            }
        }
    }
    Ok(format!("30 triples, {words} words"))
}

fn transfer_soundness() -> Outcome {
    for seed in 0..30u64 {
        let dgl = random_dgl(&mut seeded(seed));
        let module = dgl.module();
        ensure!(module.dim() <= 6, "seed {seed}: dimension {}", module.dim());
        ensure!(module.degrees().iter().all(|d| (-2..=3).contains(d)), "seed {seed}: degrees {:?}", module.degrees());
        let h = hodge(&dgl);
        let minimal = minimal_model(&h, 4).map_err(|e| e.to_string())?;
        let report = check_linfty(&minimal);
        ensure!(report.holds(), "seed {seed}: minimal model fails at arity {:?}", report.failing_arity());
        let f = transfer_morphism(&h, &minimal).map_err(|e| e.to_string())?;
        let report = check_lmorphism(&f).map_err(|e| e.to_string())?;
        ensure!(report.holds(), "seed {seed}: transfer morphism fails at arity {:?}", report.failing_arity());
    }
    Ok("30 random DGLs up to arity 4".into())
}

fn massey_fixture() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/fixtures/massey.json");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let dgl = io::dgl(&io::parse(&text).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let h = hodge(&dgl);
    let minimal = minimal_model(&h, 3).map_err(|e| e.to_string())?;
    let mut nonzero = 0;
    for word in canonical_words(h.homology(), 3, Symmetry::Exterior) {
        let expected = massey_mu3(&dgl, &h, &word);
        ensure!(minimal.mu(3).eval(&word) == expected, "μ_3{word:?} differs from the two-tree expansion");
        nonzero += usize::from(!expected.is_zero());
    }
    ensure!(nonzero > 0, "μ_3 vanishes on the fixture");
    Ok(format!("μ_3 nonzero on {nonzero} word(s), equal to the two-tree expansion"))
}

fn obstruction_lemma() -> Outcome {
    let prefixes = perturbed_prefixes(20);
    for (k, (prefix, q, q_target)) in prefixes.iter().enumerate() {
        ensure!(q.max_arity() <= 4, "sample {k}: arity {}", q.max_arity());
        let r = obstruction_r(prefix, q, q_target).map_err(|e| e.to_string())?;
        let boundary = delta_hom(&r, q.component(1), q_target.component(1)).map_err(|e| e.to_string())?;
        ensure!(boundary.is_zero(), "sample {k}: δr ≠ 0 at n = {}", q.max_arity());
    }
    Ok(format!("{} truncated morphisms", prefixes.len()))
}

/// `(H, μ) ⊕ (F, d, 0)` evaluated directly from the minimal model and the factor.
fn expected_product(h_positions: &[usize], f_positions: &[usize], q_h: &CoderivationComponents, q_f: &CoderivationComponents, word: &[usize]) -> Vector {
    let to_h: Option<Vec<usize>> = word.iter().map(|i| h_positions.iter().position(|p| p == i)).collect();
    if let Some(h_word) = to_h {
        let value = q_h.component(word.len()).eval(&h_word);
        return value.iter().map(|(&j, c)| (h_positions[j], c.clone())).collect();
    }
    let to_f: Option<Vec<usize>> = word.iter().map(|i| f_positions.iter().position(|p| p == i)).collect();
    match to_f {
        Some(f_word) if word.len() == 1 => {
            q_f.component(1).eval(&f_word).iter().map(|(&j, c)| (f_positions[j], c.clone())).collect()
        }
        _ => Vector::new(),
    }
}

fn decomposition() -> Outcome {
    for seed in 0..10u64 {
        let dgl = random_dgl(&mut seeded(seed));
        let h = hodge(&dgl);
        let minimal = minimal_model(&h, 4).map_err(|e| e.to_string())?;
        let f = transfer_morphism(&h, &minimal).map_err(|e| e.to_string())?;
        let factor = contractible_factor(&h, 4).map_err(|e| e.to_string())?;
        let dec = decompose(&h, &minimal, &f, &factor).map_err(|e| e.to_string())?;
        let inverse = invert_formal(&dec.morphism, None).map_err(|e| e.to_string())?;
        let round = compose_formal(&inverse, &dec.morphism).map_err(|e| e.to_string())?;
        let identity = MorphismComponents::identity(dec.sum.clone(), 4);
        ensure!(round.first_difference(&identity).is_none(), "seed {seed}: inverse ∘ (f × ι) ≠ Id");
        let round = compose_formal(&dec.morphism, &inverse).map_err(|e| e.to_string())?;
        let identity = MorphismComponents::identity(dec.morphism.target().clone(), 4);
        ensure!(round.first_difference(&identity).is_none(), "seed {seed}: (f × ι) ∘ inverse ≠ Id");

        let q_l = dgl.to_linfty(4).shifted().clone();
        let conjugated = linfty_core::transfer::transport_structure(&inverse, &q_l).map_err(|e| e.to_string())?;
        ensure!(*suspension(h.homology()) == **minimal.shifted().module(), "seed {seed}: homology modules differ");
        for n in 1..=4 {
            for word in canonical_words(&dec.sum, n, Symmetry::Symmetric) {
                let expected = expected_product(
                    &dec.h_positions,
                    &dec.f_positions,
                    minimal.shifted(),
                    factor.algebra.shifted(),
                    &word,
                );
                ensure!(conjugated.component(n).eval(&word) == expected, "seed {seed}: conjugated structure differs on {word:?}");
            }
        }
    }
    Ok("10 random DGLs up to arity 4".into())
}

/// `x` in degree 0, `y` in degree 1, `Q_2(x, x) = y`.
fn quadratic_fiber(max_arity: usize) -> FormalDgManifold {
    let m = Arc::new(GradedModule::from_basis([(0, "x"), (1, "y")]).unwrap());
    let mut comps: Vec<MultiMap> = (1..=max_arity).map(|n| MultiMap::zero(n, m.clone(), m.clone(), 1, Symmetry::Symmetric)).collect();
    comps[1].insert(&[0, 0], &Vector::basis(1)).unwrap();
    FormalDgManifold::new(CoderivationComponents::new(m, comps).unwrap()).unwrap()
}

fn universal_deformation_criterion() -> Outcome {
    let window = Window::new(4, 3).map_err(|e| e.to_string())?;
    let fiber = quadratic_fiber(4);
    ensure!(fiber.module().dim() == 2, "fiber dimension");
    let t = tangent_complex(&fiber, window).map_err(|e| e.to_string())?;
    let universal = universal_deformation(&t).map_err(|e| e.to_string())?;
    let square = coderivation_square(&universal.total());
    ensure!(square.components().iter().all(MultiMap::is_zero), "Q̃² ≠ 0");
    ensure!(universal.first_defect().is_none(), "universal deformation has a defect");
    let semi = semiuniversal_deformation(&t).map_err(|e| e.to_string())?;
    for (name, d) in [("universal", &universal), ("semiuniversal", &semi.deformation)] {
        let f = unidef_correspondence(d, &t).map_err(|e| e.to_string())?;
        let again = deformation_from_morphism(d.base(), &f, &t, window.arity).map_err(|e| e.to_string())?;
        ensure!(again.perturbation() == d.perturbation(), "{name}: correspondence does not round-trip");
    }
    Ok(format!("dim U = {}, window (4, 3)", t.module().dim()))
}

fn semiuniversal_agreement() -> Outcome {
    let t = tangent_complex(&quadratic_fiber(4), Window::default()).map_err(|e| e.to_string())?;
    let semi = semiuniversal_deformation(&t).map_err(|e| e.to_string())?;
    let universal = universal_deformation(&t).map_err(|e| e.to_string())?;
    let (pulled, _) = base_change(&universal, semi.deformation.base(), semi.transfer.shifted()).map_err(|e| e.to_string())?;
    ensure!(!semi.deformation.perturbation().is_zero(), "semiuniversal perturbation vanishes");
    for n in 1..=semi.deformation.max_arity() {
        let (ours, theirs) = (semi.deformation.perturbation().component(n), pulled.perturbation().component(n));
        ensure!(ours.same_values(theirs), "component {n}: {:?}", ours.first_difference(theirs));
    }
    Ok(format!("base dimension {}, {} components", semi.deformation.base().module().dim(), semi.deformation.max_arity()))
}

fn random_family(rng: &mut SeededRng, module: &Arc<GradedModule>, len: usize, symmetry: Symmetry) -> BilinearFamily {
    let maps = (0..len)
        .map(|_| {
            let degree = rng.gen_range(-1..=1);
            random_map(rng, 2, module.clone(), module.clone(), degree, symmetry, 0.7).to_plain()
        })
        .collect();
    BilinearFamily::new(module.clone(), maps).unwrap()
}

fn sign_lemma() -> Outcome {
    let mut tuples = 0;
    for n in 2..=4 {
        for (k, symmetry) in [Symmetry::Plain, Symmetry::Exterior].into_iter().enumerate() {
            let mut rng = seeded(7000 + 10 * n as u64 + k as u64);
            for six in all_six_tuples(n).map_err(|e| e.to_string())? {
                let module = Arc::new(random_module(&mut rng, 3, -1..=1, "e"));
                let outer = random_family(&mut rng, &module, six.psi.n_ramifications(), symmetry);
                let inner = random_family(&mut rng, &module, six.phi.n_ramifications(), symmetry);
                let [first, second, third] =
                    sign_lemma_terms(&six, &outer, &inner, Symmetry::Exterior).map_err(|e| e.to_string())?;
                ensure!(first.same_values(&second) && second.same_values(&third), "n = {n}: {six:?}");
                tuples += 1;
            }
        }
    }
    ensure!(tuples > 0, "no tuples");
    Ok(format!("{tuples} tuples"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("tree counts", tree_counts, Duration::from_secs(1)),
        ("tree signs", tree_signs, Duration::from_secs(1)),
        ("coalgebra diagrams", coalgebra_diagrams, Duration::from_secs(30)),
        ("transfer soundness", transfer_soundness, Duration::from_secs(300)),
        ("Massey fixture", massey_fixture, Duration::from_secs(10)),
        ("obstruction lemma", obstruction_lemma, Duration::from_secs(30)),
        ("decomposition", decomposition, Duration::from_secs(300)),
        ("universal deformation", universal_deformation_criterion, Duration::from_secs(120)),
        ("semiuniversal agreement", semiuniversal_agreement, Duration::from_secs(120)),
        ("sign lemma", sign_lemma, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over the {budget:?} budget")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({elapsed:.2?})", k + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason} ({elapsed:.2?})", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
