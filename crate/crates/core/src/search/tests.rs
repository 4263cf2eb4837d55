use approx::assert_relative_eq;

use super::*;
use crate::context::Predicate;
use crate::derivation::{Annotation, ChunkTag, Label, Procedure};
use crate::maxent::{GisConfig, MaxentModel};
use crate::parser::{Parser, TrainOptions};
use crate::treebank::{read_bracketed, Corpus};

fn l(s: &str) -> Label {
    Label::from(s)
}

fn model(
    procedure: crate::derivation::Procedure,
    actions: Vec<Action>,
    features: Vec<(Predicate, Action, f64)>,
) -> MaxentModel<f64> {
    MaxentModel::from_features(procedure, actions, features, 1).unwrap()
}

fn toy_parser() -> Parser<f64> {
    let text = "(S (NP (DT the) (NN dog)) (VP (VBD saw) (NP (DT a) (NN cat)))) \
                (S (NP (DT a) (NN cat)) (VP (VBD saw) (NP (DT the) (NN dog)))) \
                (S (NP (PRP I)) (VP (VBD saw) (NP (DT the) (NN cat)))) \
                (S (NP (DT the) (NN dog)) (VP (VBD ran)))";
    let corpus: Corpus = read_bracketed(text).unwrap().into_iter().collect();
    let options = TrainOptions {
        cutoff: 1,
        gis: GisConfig { max_iters: 200, tol: 1e-4 },
    };
    Parser::train(&corpus, &options).unwrap().0
}

#[test]
fn mass_cutoff_examples() {
    assert_eq!(mass_cutoff(&[0.6, 0.3, 0.05, 0.05], 0.95), 2);
    assert_eq!(mass_cutoff(&[1.0], 0.5), 1);
    assert_eq!(mass_cutoff(&[1.0], 1.0), 1);
    assert_eq!(mass_cutoff(&[0.97, 0.03], 0.95), 1);
    assert_eq!(mass_cutoff(&[0.5, 0.3, 0.2, 0.0], 1.0), 3);
    assert_eq!(mass_cutoff::<f64>(&[], 0.9), 0);
}

#[test]
fn config_defaults_and_validation() {
    let cfg = SearchConfig::<f64>::default();
    assert_eq!((cfg.k, cfg.m, cfg.q), (20, 20, 0.95));
    assert!(SearchConfig::new(0, 1, 0.5).is_err());
    assert!(SearchConfig::new(1, 0, 0.5).is_err());
    assert!(SearchConfig::new(1, 1, 0.0).is_err());
    assert!(SearchConfig::new(1, 1, 1.5).is_err());
    assert!(SearchConfig::new(1, 1, 1.0f32).is_ok());
}

#[test]
fn tag_dictionary_restricts_known_words() {
    let p = toy_parser();
    let all = SearchConfig::new(20, 20, 1.0).unwrap();
    let root = Hypothesis::<f64>::initial(&["dog", "ran"]).unwrap();
    let kids = advance(&root, &p.models, &p.grammar, &p.dict, all.q);
    assert_eq!(kids.len(), 1);
    assert_eq!(kids[0].actions(), [Action::Tag(l("NN"))]);
    let unknown = Hypothesis::<f64>::initial(&["zebra"]).unwrap();
    let kids = advance(&unknown, &p.models, &p.grammar, &p.dict, all.q);
    assert_eq!(kids.len(), p.grammar.tags().len());
}

#[test]
fn check_steps_have_at_most_two_children_and_q_one_keeps_all() {
    let p = toy_parser();
    let mut frontier = vec![Hypothesis::<f64>::initial(&["the", "dog", "saw", "a", "cat"]).unwrap()];
    let mut seen_check = false;
    for _ in 0..30 {
        let mut next = Vec::new();
        for h in &frontier {
            let kids = advance(h, &p.models, &p.grammar, &p.dict, 1.0);
            if h.state().phase() == Phase::Check {
                seen_check = true;
                assert!(kids.len() <= 2);
                let legal = h.state().legal_actions(&p.grammar);
                let in_vocab = legal
                    .iter()
                    .filter(|a| p.models.model(a.procedure()).action_id(a).is_some())
                    .count();
                assert_eq!(kids.len(), in_vocab);
            }
            next.extend(kids.into_iter().filter(|k| !k.is_complete()));
        }
        next.truncate(8);
        frontier = next;
    }
    assert!(seen_check);
}

#[test]
fn children_never_score_above_parents() {
    let p = toy_parser();
    let root = Hypothesis::<f64>::initial(&["a", "cat", "ran"]).unwrap();
    let mut frontier = vec![root];
    while let Some(h) = frontier.pop() {
        for k in advance(&h, &p.models, &p.grammar, &p.dict, 0.9) {
            assert!(k.log_score() <= h.log_score());
            if !k.is_complete() && frontier.len() < 50 {
                frontier.push(k);
            }
        }
    }
}

#[test]
fn single_path_model_gives_probability_one() {
    let w0 = |w: &str| Predicate::new("w0", &[w]);
    let tag = model(
        Procedure::Tag,
        vec![Action::Tag(l("NN"))],
        vec![(w0("dog"), Action::Tag(l("NN")), 2.0)],
    );
    let start = Action::Chunk(ChunkTag::Start(l("NP")));
    let chunk = model(Procedure::Chunk, vec![start.clone()], vec![]);
    let build = model(Procedure::Build, vec![Action::Build(Annotation::Start(l("NP")))], vec![]);
    let check = model(Procedure::Check, vec![Action::Check(true)], vec![]);
    let models = ModelSet::new([tag, chunk, build, check]).unwrap();
    let grammar = Grammar::new(["NN"], ["NP"], crate::treebank::HeadRules::standard().clone());
    let out = top_k_bfs(&["dog"], &models, &grammar, &TagDictionary::new(), &SearchConfig::default()).unwrap();
    assert_eq!(out.parses().len(), 1);
    let best = out.best().unwrap();
    assert_eq!(best.score(), 1.0);
    assert_eq!(best.tree.to_string(), "(NP (NN dog))");
    assert_eq!(best.derivation.actions(), [Action::Tag(l("NN")), start]);
}

/// Chunk model preferring `Other` everywhere, which leaves pass 3 with
/// nothing but preterminals: a dead end.
fn greedy_trap() -> (ModelSet<f64>, Grammar, TagDictionary) {
    let tag = model(Procedure::Tag, vec![Action::Tag(l("DT")), Action::Tag(l("NN"))], vec![]);
    let start = Action::Chunk(ChunkTag::Start(l("NP")));
    let join = Action::Chunk(ChunkTag::Join(l("NP")));
    let other = Action::Chunk(ChunkTag::Other);
    let at0 = Predicate::new("chunkandpostag(0*)", &["DT"]);
    let at1 = Predicate::new("chunkandpostag(0*)", &["NN"]);
    let chunk = model(
        Procedure::Chunk,
        vec![start, join.clone(), other.clone()],
        vec![(at0, other.clone(), 3.0), (at1.clone(), other, 3.0), (at1, join, 2.0)],
    );
    let build = model(
        Procedure::Build,
        vec![Action::Build(Annotation::Start(l("NP"))), Action::Build(Annotation::Join(l("NP")))],
        vec![],
    );
    let check = model(Procedure::Check, vec![Action::Check(true), Action::Check(false)], vec![]);
    let mut dict = TagDictionary::new();
    dict.add("a", "DT");
    dict.add("b", "NN");
    let grammar = Grammar::new(["DT", "NN"], ["NP"], crate::treebank::HeadRules::standard().clone());
    (ModelSet::new([tag, chunk, build, check]).unwrap(), grammar, dict)
}

#[test]
fn greedy_search_dies_where_the_beam_survives() {
    let (models, grammar, dict) = greedy_trap();
    let greedy = SearchConfig::new(1, 1, 0.01).unwrap();
    assert!(top_k_bfs(&["a", "b"], &models, &grammar, &dict, &greedy).unwrap().is_no_parse());

    let beam = SearchConfig::new(2, 1, 1.0).unwrap();
    let out = top_k_bfs(&["a", "b"], &models, &grammar, &dict, &beam).unwrap();
    let best = out.best().expect("a parse");
    let chunk_tags = best.derivation.actions()[2..4].to_vec();
    assert_ne!(chunk_tags, [Action::Chunk(ChunkTag::Other), Action::Chunk(ChunkTag::Other)]);
}

#[test]
fn returned_parses_are_consistent() {
    let p = toy_parser();
    let cfg = SearchConfig::default();
    let out = p.parse(&["the", "cat", "saw", "a", "dog"], &cfg).unwrap();
    let parses = out.parses();
    assert!(!parses.is_empty() && parses.len() <= cfg.m);
    for w in parses.windows(2) {
        assert!(w[0].log_score >= w[1].log_score);
    }
    for sp in parses {
        assert_eq!(sp.derivation.replay(&p.grammar).unwrap(), sp.tree);
        let product: f64 = sp.q_values.iter().product();
        assert_relative_eq!(sp.score(), product, max_relative = 1e-12);
        let rescored = p.models.log_score_derivation(&sp.derivation, &p.grammar, &p.dict).unwrap();
        assert_relative_eq!(sp.log_score, rescored, max_relative = 1e-12);
        assert!(sp.score() > 0.0 && sp.score() <= 1.0);
    }
    let mut trees: Vec<String> = parses.iter().map(|s| s.tree.to_string()).collect();
    trees.sort();
    trees.dedup();
    assert_eq!(trees.len(), parses.len());
    assert_eq!(out, p.parse(&["the", "cat", "saw", "a", "dog"], &cfg).unwrap());
}

#[test]
fn trained_toy_parser_recovers_training_tree() {
    let p = toy_parser();
    let out = p.parse(&["the", "dog", "saw", "a", "cat"], &SearchConfig::default()).unwrap();
    assert_eq!(
        out.best().unwrap().tree.to_string(),
        "(S (NP (DT the) (NN dog)) (VP (VBD saw) (NP (DT a) (NN cat))))"
    );
}

#[test]
fn empty_sentence_is_an_error() {
    let p = toy_parser();
    let none: [&str; 0] = [];
    assert!(p.parse(&none, &SearchConfig::default()).is_err());
}
