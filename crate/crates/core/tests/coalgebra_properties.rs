//! Composition and square laws of the coalgebra layer, against fully expanded maps.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use linfty_core::random::{random_coderivation, random_module, random_morphism, seeded};
use linfty_core::{
    canonical_words, coderivation_square, compose_formal, expand_coderivation, expand_morphism, CoalgebraMap,
    MorphismComponents, Symmetry, WordComb,
};
use proptest::prelude::*;

fn full(f: &MorphismComponents) -> BTreeMap<usize, CoalgebraMap> {
    (1..=f.max_arity())
        .map(|n| {
            let mut blocks = expand_morphism(f, n).unwrap().into_iter();
            let mut total = blocks.next().unwrap();
            for b in blocks {
                total.add_assign(&b);
            }
            (n, total)
        })
        .collect()
}

fn apply_all(maps: &BTreeMap<usize, CoalgebraMap>, x: &WordComb) -> WordComb {
    let mut out = WordComb::new();
    for (word, c) in x.iter() {
        out.add_scaled(c, &maps[&word.len()].eval(word));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn formal_composition_matches_expanded_composition(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let l = Arc::new(random_module(&mut rng, 2, -1..=1, "l"));
        let m = Arc::new(random_module(&mut rng, 2, -1..=1, "m"));
        let n = Arc::new(random_module(&mut rng, 2, -1..=1, "n"));
        let g = random_morphism(&mut rng, l.clone(), m.clone(), 4, 0.7);
        let f = random_morphism(&mut rng, m.clone(), n.clone(), 4, 0.7);
        let fg = compose_formal(&f, &g).unwrap();
        let (hat_f, hat_g, hat_fg) = (full(&f), full(&g), full(&fg));
        for arity in 1..=4 {
            for word in canonical_words(&l, arity, Symmetry::Symmetric) {
                let via = apply_all(&hat_f, &hat_g[&arity].eval(&word));
                prop_assert_eq!(hat_fg[&arity].eval(&word), via);
            }
        }
    }

    #[test]
    fn formal_composition_is_associative(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let mods: Vec<_> = (0..4).map(|i| Arc::new(random_module(&mut rng, 2, -1..=1, &format!("m{i}_")))).collect();
        let h = random_morphism(&mut rng, mods[0].clone(), mods[1].clone(), 4, 0.6);
        let g = random_morphism(&mut rng, mods[1].clone(), mods[2].clone(), 4, 0.6);
        let f = random_morphism(&mut rng, mods[2].clone(), mods[3].clone(), 4, 0.6);
        let left = compose_formal(&compose_formal(&f, &g).unwrap(), &h).unwrap();
        let right = compose_formal(&f, &compose_formal(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn square_components_match_expanded_square(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let w = Arc::new(random_module(&mut rng, 3, -1..=2, "w"));
        let q = random_coderivation(&mut rng, w.clone(), 4, 0.5);
        let hats: BTreeMap<usize, CoalgebraMap> = (1..=4).map(|n| (n, expand_coderivation(&q, n).unwrap())).collect();
        let square = coderivation_square(&q);
        for n in 1..=4 {
            for word in canonical_words(&w, n, Symmetry::Symmetric) {
                let twice = apply_all(&hats, &hats[&n].eval(&word));
                let linear: WordComb = twice.iter().filter(|(k, _)| k.len() == 1).map(|(k, c)| (k.clone(), c.clone())).collect();
                let component: WordComb = square.component(n).eval(&word).iter().map(|(&i, c)| (vec![i], c.clone())).collect();
                prop_assert_eq!(component, linear);
            }
        }
    }
}

#[test]
fn strict_compositions_stay_strict() {
    let mut rng = seeded(5);
    let a = Arc::new(random_module(&mut rng, 3, 0..=1, "a"));
    let f = MorphismComponents::strict(random_morphism(&mut rng, a.clone(), a.clone(), 1, 0.8).component(1).clone(), 4).unwrap();
    let g = MorphismComponents::strict(random_morphism(&mut rng, a.clone(), a.clone(), 1, 0.8).component(1).clone(), 4).unwrap();
    let fg = compose_formal(&f, &g).unwrap();
    assert!(fg.is_strict());
    let linear = g.component(1).then(f.component(1)).unwrap();
    assert_eq!(fg.component(1), &linear);
}
