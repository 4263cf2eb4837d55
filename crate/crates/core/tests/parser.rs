use mxparse::parser::TrainOptions;
use mxparse::treebank::read_bracketed;
use mxparse::{Corpus, Error, Parser};

fn corpus(text: &str) -> Corpus {
    read_bracketed(text).unwrap().into_iter().collect()
}

#[test]
fn empty_corpus_is_rejected() {
    assert!(matches!(Parser::train(&Corpus::new(), &TrainOptions::default()), Err(Error::NoSentences)));
}

#[test]
fn corpus_without_derivable_trees_is_rejected() {
    let c = corpus("(S (S (S (S (S (NP (DT a) (NN b))))))) (VP (VP (VP (VP (VP (VB go))))))");
    assert!(matches!(Parser::train(&c, &TrainOptions::default()), Err(Error::NoDerivableTrees(2))));
}

#[test]
fn underivable_trees_are_skipped_and_reported() {
    let c = corpus(
        "(S (NP (DT the) (NN dog)) (VP (VBD ran))) (S (S (S (S (S (NP (DT a) (NN b))))))) \
         (S (NP (DT a) (NN cat)) (VP (VBD sat)))",
    );
    let opts = TrainOptions {
        cutoff: 1,
        ..TrainOptions::default()
    };
    let (_, summary) = Parser::train(&c, &opts).unwrap();
    assert_eq!(summary.underivable.len(), 1);
    assert_eq!(summary.underivable[0].0, 1);
    assert_eq!(summary.reports.len(), 4);
}

#[test]
fn huge_cutoff_leaves_a_degenerate_model() {
    let c = corpus("(S (NP (DT the) (NN dog)) (VP (VBD ran)))");
    let opts = TrainOptions {
        cutoff: 1_000_000_000,
        ..TrainOptions::default()
    };
    assert!(matches!(Parser::train(&c, &opts), Err(Error::DegenerateModel(_))));
}
