use mxparse::synth::Generator;
use mxparse::treebank::{normalize_tree, read_bracketed, write_bracketed, HeadRules, ParseTree};
use mxparse_testkit::fixture_corpus;
use proptest::prelude::*;

fn generated(seed: u64, max: usize) -> ParseTree {
    let text = Generator::new(seed).tree_in(3, max);
    read_bracketed(&text).unwrap().remove(0)
}

#[test]
fn fixture_trees_round_trip() {
    for t in fixture_corpus().trees() {
        let back = read_bracketed(&write_bracketed(t)).unwrap();
        assert_eq!(back, vec![t.clone()]);
    }
}

#[test]
fn normalized_fixture_has_no_decorations() {
    for t in fixture_corpus().trees() {
        for n in t.preorder() {
            assert!(!n.label()[1..].contains(['-', '=']), "{}", n.label());
            assert_ne!(n.label(), "-NONE-");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn write_then_read_is_identity(seed in any::<u64>(), max in 3usize..40) {
        let t = generated(seed, max);
        let text = write_bracketed(&t);
        prop_assert_eq!(read_bracketed(&text).unwrap(), vec![t]);
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), max in 3usize..40) {
        let t = generated(seed, max);
        let once = normalize_tree(&t, HeadRules::standard()).unwrap();
        let twice = normalize_tree(&once, HeadRules::standard()).unwrap();
        prop_assert_eq!(&once, &twice);
        for n in once.preorder() {
            prop_assert!(!n.label()[1..].contains(['-', '=']));
        }
    }

    #[test]
    fn head_finding_is_deterministic(seed in any::<u64>()) {
        let t = generated(seed, 30);
        let a = t.with_head_rules(HeadRules::standard());
        let b = t.with_head_rules(HeadRules::standard());
        let heads = |t: &ParseTree| t.preorder().map(|n| n.head_index()).collect::<Vec<_>>();
        prop_assert_eq!(heads(&a), heads(&b));
        for n in a.constituents() {
            prop_assert!(n.span().contains(n.head_index()));
        }
    }
}
