use std::sync::OnceLock;

use mxparse::derivation::Derivation;
use mxparse::search::{advance, mass_cutoff, Hypothesis};
use mxparse::{Corpus, Parser, SearchConfig};
use mxparse_testkit::{exhaustive_argmax, toy_model};
use proptest::prelude::*;

fn toy() -> &'static (Corpus, Parser) {
    static TOY: OnceLock<(Corpus, Parser)> = OnceLock::new();
    TOY.get_or_init(toy_model)
}

#[test]
fn wide_search_finds_the_exhaustive_argmax() {
    let (corpus, parser) = toy();
    let cfg = SearchConfig::new(200, 200, 1.0).unwrap();
    let mut agree = 0;
    for s in corpus.sentences() {
        let best = exhaustive_argmax(&s.tokens, &parser.models, &parser.grammar, &parser.dict).unwrap();
        let found = parser.parse(&s.tokens, &cfg).unwrap();
        let top = found.best().unwrap();
        assert!(top.log_score <= best.log_score + 1e-12);
        if top.tree == best.tree {
            agree += 1;
        }
    }
    assert_eq!(agree, corpus.len());
}

#[test]
fn overfit_toy_model_recovers_its_training_trees() {
    let (corpus, parser) = toy();
    let cfg = SearchConfig::default();
    let recovered = corpus
        .sentences()
        .iter()
        .filter(|s| parser.parse(&s.tokens, &cfg).unwrap().best().map(|p| &p.tree) == Some(&s.tree))
        .count();
    assert!(recovered * 10 >= corpus.len() * 9, "{recovered}/{}", corpus.len());
}

#[test]
fn search_is_deterministic() {
    let (corpus, parser) = toy();
    let cfg = SearchConfig::default();
    for s in corpus.sentences().iter().take(10) {
        assert_eq!(parser.parse(&s.tokens, &cfg).unwrap(), parser.parse(&s.tokens, &cfg).unwrap());
    }
}

fn sentence() -> impl Strategy<Value = Vec<String>> {
    let words = ["the", "dog", "saw", "a", "cat", "with", "John", "liked", "big", "of", "and", "zorp", "."];
    prop::collection::vec(prop::sample::select(words.to_vec()), 1..9)
        .prop_map(|ws| ws.into_iter().map(str::to_owned).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn returned_parses_are_consistent(tokens in sentence(), k in 1usize..12, m in 1usize..12, q in 0.5f64..=1.0) {
        let (_, parser) = toy();
        let cfg = SearchConfig::new(k, m, q).unwrap();
        let outcome = parser.parse(&tokens, &cfg).unwrap();
        let parses = outcome.parses();
        prop_assert!(parses.len() <= m);
        for w in parses.windows(2) {
            prop_assert!(w[0].log_score >= w[1].log_score);
        }
        for p in parses {
            prop_assert_eq!(p.tree.words(), tokens.iter().map(String::as_str).collect::<Vec<_>>());
            prop_assert_eq!(p.q_values.len(), p.derivation.len());
            let sum: f64 = p.q_values.iter().map(|q| q.ln()).sum();
            prop_assert!((sum - p.log_score).abs() <= 1e-12 * sum.abs().max(1.0));
            let d = Derivation::new(tokens.clone(), p.derivation.actions().to_vec());
            prop_assert_eq!(&d.replay(&parser.grammar).unwrap(), &p.tree);
            let rescored = parser.models.log_score_derivation(&d, &parser.grammar, &parser.dict).unwrap();
            prop_assert!((rescored - p.log_score).abs() <= 1e-9 * rescored.abs().max(1.0));
        }
    }

    #[test]
    fn children_never_outscore_parents(tokens in sentence(), q in 0.3f64..=1.0, picks in prop::collection::vec(any::<prop::sample::Index>(), 60)) {
        let (_, parser) = toy();
        let mut hyp = Hypothesis::<f64>::initial(&tokens).unwrap();
        for pick in &picks {
            let children = advance(&hyp, &parser.models, &parser.grammar, &parser.dict, q);
            if children.is_empty() {
                break;
            }
            for c in &children {
                prop_assert!(c.log_score() <= hyp.log_score());
                prop_assert_eq!(c.len(), hyp.len() + 1);
            }
            hyp = pick.get(&children).clone();
            if hyp.is_complete() {
                break;
            }
        }
    }

    #[test]
    fn mass_cutoff_counts_prefixes_below_the_threshold(mut qs in prop::collection::vec(0.0f64..1.0, 1..12), t in 0.01f64..1.0) {
        let total: f64 = qs.iter().sum();
        prop_assume!(total > 0.0);
        for q in &mut qs {
            *q /= total;
        }
        qs.sort_by(|a, b| b.total_cmp(a));
        let below = (1..=qs.len()).filter(|&m| qs[..m].iter().sum::<f64>() < t).count();
        prop_assert_eq!(mass_cutoff(&qs, t), below.max(1));
        prop_assert_eq!(mass_cutoff(&qs, 1.0), qs.iter().filter(|&&q| q > 0.0).count());
    }
}
