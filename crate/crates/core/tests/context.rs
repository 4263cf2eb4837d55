use std::collections::HashMap;

use mxparse::context::{collect_events, predicates, Predicate};
use mxparse::derivation::{derive, Grammar, Procedure};
use mxparse::search::TagDictionary;
use mxparse::Corpus;
use mxparse_testkit::{corpus_of, fixture_corpus, generated_trees};
use proptest::prelude::*;

fn is_sub_multiset(small: &[&str], big: &[&str]) -> bool {
    let mut pool: HashMap<&str, usize> = HashMap::new();
    for f in big {
        *pool.entry(f).or_default() += 1;
    }
    small.iter().all(|f| match pool.get_mut(f) {
        Some(n) if *n > 0 => {
            *n -= 1;
            true
        }
        _ => false,
    })
}

/// Backed-off templates are full templates with some positions starred; the
/// backed-off predicate must fire alongside the full one and carry a subset
/// of its fields.
fn check_backoff(preds: &[Predicate]) -> Result<(), String> {
    let mut by_template: HashMap<&str, Vec<Vec<&str>>> = HashMap::new();
    for p in preds {
        by_template.entry(p.template()).or_default().push(p.fields().collect());
    }
    for p in preds {
        let name = p.template();
        if !name.contains('*') {
            continue;
        }
        let full = name.replace('*', "");
        let Some(candidates) = by_template.get(full.as_str()) else {
            return Err(format!("{name} fires without {full}"));
        };
        let fields: Vec<&str> = p.fields().collect();
        if !candidates.iter().any(|c| c.len() > fields.len() && is_sub_multiset(&fields, c)) {
            return Err(format!("{name} {fields:?} is not implied by any {full}"));
        }
    }
    Ok(())
}

#[test]
fn backed_off_predicates_are_implied_on_every_fixture_state() {
    let corpus = fixture_corpus();
    let grammar = Grammar::from_trees(corpus.trees());
    let dict = TagDictionary::from_corpus(&corpus);
    let mut checked = 0;
    for t in corpus.trees() {
        for (_, state) in derive(t, &grammar).unwrap().steps(&grammar).unwrap() {
            if state.is_complete() {
                continue;
            }
            let preds = predicates(&state, &dict);
            check_backoff(&preds).unwrap();
            checked += preds.iter().filter(|p| p.template().contains('*')).count();
        }
    }
    assert!(checked > 10_000);
}

#[test]
fn collecting_a_doubled_corpus_doubles_every_event() {
    let corpus = fixture_corpus();
    let doubled: Corpus = corpus.trees().chain(corpus.trees()).cloned().collect();
    let grammar = Grammar::from_trees(corpus.trees());
    let dict = TagDictionary::from_corpus(&corpus);
    let once = collect_events(&corpus, &grammar, &dict);
    let twice = collect_events(&doubled, &grammar, &dict);
    assert_eq!(twice.total(), 2 * once.total());
    for p in Procedure::ALL {
        let (a, b) = (once.events(p), twice.events(p));
        assert_eq!(b.len(), 2 * a.len());
        assert_eq!(&b[..a.len()], a);
        assert_eq!(&b[a.len()..], a);
    }
}

#[test]
fn one_event_per_action() {
    let corpus = fixture_corpus();
    let grammar = Grammar::from_trees(corpus.trees());
    let dict = TagDictionary::from_corpus(&corpus);
    let events = collect_events(&corpus, &grammar, &dict);
    let actions: usize = corpus.trees().map(|t| derive(t, &grammar).unwrap().len()).sum();
    assert_eq!(events.total(), actions);
    assert!(events.underivable.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn extraction_is_total_deterministic_and_backs_off(seed in any::<u64>()) {
        let trees = generated_trees(seed, 3, 3, 40, &["S", "SBAR", "NP", "VP", "PP", "ADVP", "PRT", "WHNP"]);
        let corpus = corpus_of(&trees);
        let grammar = Grammar::from_trees(&trees);
        let dict = TagDictionary::from_corpus(&corpus);
        for t in &trees {
            for (_, state) in derive(t, &grammar).unwrap().steps(&grammar).unwrap() {
                if state.is_complete() {
                    continue;
                }
                let a = predicates(&state, &dict);
                prop_assert!(!a.is_empty());
                prop_assert_eq!(&a, &predicates(&state.clone(), &dict));
                prop_assert!(check_backoff(&a).is_ok(), "{:?}", check_backoff(&a));
            }
        }
    }
}
