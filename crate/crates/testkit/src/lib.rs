//! Brute-force oracles and small fixtures shared by the mxparse test suites.
//!
//! Nothing here goes through the search module: the enumerators walk
//! [`ParserState::legal_actions`] and [`ParserState::apply`] directly.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use mxparse::context::{predicates, Predicate};
use mxparse::derivation::{Action, Grammar, ParserState, Phase};
use mxparse::maxent::{GisConfig, ModelSet};
use mxparse::parser::TrainOptions;
use mxparse::search::TagDictionary;
use mxparse::synth::{Generator, FIXTURE};
use mxparse::treebank::{write_bracketed, Corpus, HeadRules, ParseTree};
use mxparse::Parser;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Calls `visit` with every complete action sequence for `tokens` and its
/// final state.
pub fn for_each_derivation<S, V>(tokens: &[S], grammar: &Grammar, mut visit: V)
where
    S: AsRef<str>,
    V: FnMut(&[Action], &ParserState),
{
    fn walk<V: FnMut(&[Action], &ParserState)>(
        state: &ParserState,
        grammar: &Grammar,
        path: &mut Vec<Action>,
        visit: &mut V,
    ) {
        if state.is_complete() {
            visit(path, state);
            return;
        }
        for a in state.legal_actions(grammar) {
            let next = state.apply(&a, grammar).expect("legal action applies");
            path.push(a);
            walk(&next, grammar, path, visit);
            path.pop();
        }
    }
    let root = ParserState::initial(tokens).expect("non-empty sentence");
    walk(&root, grammar, &mut Vec::new(), &mut visit);
}

/// Every action sequence whose replay yields `tree`.
///
/// Branches are cut as soon as a tag differs from the gold tag or a forest
/// tree is not a subtree of `tree`; neither can be undone by later actions.
pub fn derivations_of(tree: &ParseTree, grammar: &Grammar) -> Vec<Vec<Action>> {
    let subtrees: BTreeSet<(usize, usize, String)> = tree
        .preorder()
        .map(|t| (t.span().start, t.span().end, write_bracketed(t)))
        .collect();
    let gold_tags = tree.tags();
    let consistent = |s: &ParserState| {
        (0..s.len()).all(|i| s.tag(i).is_none_or(|t| **t == *gold_tags[i]))
            && s.forest().iter().all(|f| {
                let t = f.node.to_tree(s.tokens());
                subtrees.contains(&(t.span().start, t.span().end, write_bracketed(&t)))
            })
    };
    fn walk<C: Fn(&ParserState) -> bool>(
        state: &ParserState,
        grammar: &Grammar,
        consistent: &C,
        path: &mut Vec<Action>,
        out: &mut Vec<Vec<Action>>,
    ) {
        if !consistent(state) {
            return;
        }
        if state.is_complete() {
            out.push(path.clone());
            return;
        }
        for a in state.legal_actions(grammar) {
            let next = state.apply(&a, grammar).expect("legal action applies");
            path.push(a);
            walk(&next, grammar, consistent, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    let root = ParserState::initial(&tree.words()).expect("non-empty sentence");
    walk(&root, grammar, &consistent, &mut Vec::new(), &mut out);
    out.retain(|actions| {
        let mut s = root.clone();
        for a in actions {
            s = s.apply(a, grammar).expect("recorded action applies");
        }
        s.tree().as_ref() == Some(tree)
    });
    out
}

/// Number of distinct action sequences producing each tree, keyed by its
/// bracketed form.
pub fn derivations_per_tree<S: AsRef<str>>(tokens: &[S], grammar: &Grammar) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for_each_derivation(tokens, grammar, |_, state| {
        let tree = state.tree().expect("complete state has a tree");
        *out.entry(write_bracketed(&tree)).or_insert(0) += 1;
    });
    out
}

/// Highest-scoring complete derivation found by exhaustive search.
#[derive(Clone, Debug)]
pub struct Best {
    pub tree: ParseTree,
    pub actions: Vec<Action>,
    pub log_score: f64,
}

/// Global argmax of `Σ ln q` over all derivations of `tokens`, by depth-first
/// branch and bound. Tag actions are restricted by `dict` and actions with
/// zero probability are skipped. Ties go to the lexicographically smaller
/// action sequence.
pub fn exhaustive_argmax<S: AsRef<str>>(
    tokens: &[S],
    models: &ModelSet<f64>,
    grammar: &Grammar,
    dict: &TagDictionary,
) -> Option<Best> {
    struct Search<'a> {
        models: &'a ModelSet<f64>,
        grammar: &'a Grammar,
        dict: &'a TagDictionary,
        path: Vec<Action>,
        best: Option<Best>,
    }

    impl Search<'_> {
        fn bound(&self) -> f64 {
            self.best.as_ref().map_or(f64::NEG_INFINITY, |b| b.log_score)
        }

        fn walk(&mut self, state: &ParserState, score: f64) {
            if state.is_complete() {
                let better = match &self.best {
                    None => true,
                    Some(b) => match score.partial_cmp(&b.log_score) {
                        Some(Ordering::Greater) => true,
                        Some(Ordering::Equal) => self.path < b.actions,
                        _ => false,
                    },
                };
                if better {
                    self.best = Some(Best {
                        tree: state.tree().expect("complete state has a tree"),
                        actions: self.path.clone(),
                        log_score: score,
                    });
                }
                return;
            }
            let mut legal = state.legal_actions(self.grammar);
            if state.phase() == Phase::Tag {
                let word = &state.tokens()[state.cursor()];
                legal.retain(|a| matches!(a, Action::Tag(t) if self.dict.allows(word, t)));
            }
            let Some(first) = legal.first() else {
                return;
            };
            let model = self.models.model(first.procedure());
            let log_q = model.log_distribution(&predicates(state, self.dict));
            let mut scored: Vec<(f64, Action)> = legal
                .into_iter()
                .filter_map(|a| {
                    let lq = log_q[model.action_id(&a)?];
                    (lq.exp() > 0.0).then_some((lq, a))
                })
                .collect();
            scored.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
            for (lq, a) in scored {
                let child = score + lq;
                if child < self.bound() {
                    break;
                }
                let next = state.apply(&a, self.grammar).expect("legal action applies");
                self.path.push(a);
                self.walk(&next, child);
                self.path.pop();
            }
        }
    }

    let root = ParserState::initial(tokens).ok()?;
    let mut search = Search {
        models,
        grammar,
        dict,
        path: Vec::new(),
        best: None,
    };
    search.walk(&root, 0.0);
    search.best
}

/// The bundled fixture corpus, normalized.
pub fn fixture_corpus() -> Corpus {
    Corpus::read_normalized(FIXTURE, HeadRules::standard())
        .expect("fixture parses")
        .0
}

/// `count` generated trees with `min..=max` tokens whose constituent labels
/// all come from `labels`.
pub fn generated_trees(seed: u64, count: usize, min: usize, max: usize, labels: &[&str]) -> Vec<ParseTree> {
    let mut g = Generator::new(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let text = g.tree_in(min, max);
        let (corpus, _) = Corpus::read_normalized(&text, HeadRules::standard()).expect("generated tree parses");
        let Some(s) = corpus.sentences().first() else {
            continue;
        };
        if s.tree.constituents().all(|c| labels.contains(&c.label())) {
            out.push(s.tree.clone());
        }
    }
    out
}

/// `trees` as a corpus.
pub fn corpus_of(trees: &[ParseTree]) -> Corpus {
    trees.iter().cloned().collect()
}

/// A parser trained to near-convergence on `corpus` with every feature kept.
pub fn overfit_parser(corpus: &Corpus) -> Parser {
    let opts = TrainOptions {
        cutoff: 1,
        gis: GisConfig {
            max_iters: 200,
            tol: 1e-4,
        },
    };
    Parser::train(corpus, &opts).expect("toy corpus trains").0
}

/// The small overfit model used by the search oracle: 50 generated trees of
/// 3 to 7 tokens labelled from S, NP, VP and PP.
pub fn toy_model() -> (Corpus, Parser) {
    let corpus = corpus_of(&generated_trees(TOY_SEED, 50, 3, 7, &["S", "NP", "VP", "PP"]));
    let parser = overfit_parser(&corpus);
    (corpus, parser)
}

pub const TOY_SEED: u64 = 12;

/// At least `per_model` contexts for each procedure, taken from random walks
/// over legal actions (tags restricted by `dict`) on the sentences of `corpus`.
/// A walk that reaches a state without legal actions is abandoned there.
pub fn sample_contexts(corpus: &Corpus, grammar: &Grammar, dict: &TagDictionary, per_model: usize, seed: u64) -> [Vec<Vec<Predicate>>; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: [Vec<Vec<Predicate>>; 4] = Default::default();
    let sentences = corpus.sentences();
    let mut k = 0;
    while out.iter().any(|v| v.len() < per_model) {
        let tokens = &sentences[k % sentences.len()].tokens;
        k += 1;
        let mut state = ParserState::initial(tokens).expect("non-empty sentence");
        while !state.is_complete() {
            let mut legal = state.legal_actions(grammar);
            if state.phase() == Phase::Tag {
                let word = &state.tokens()[state.cursor()];
                legal.retain(|a| matches!(a, Action::Tag(t) if dict.allows(word, t)));
            }
            let Some(first) = legal.first() else {
                break;
            };
            let p = first.procedure();
            out[p.index()].push(predicates(&state, dict));
            let a = legal.choose(&mut rng).expect("some legal action");
            state = state.apply(a, grammar).expect("legal action applies");
        }
    }
    out
}
