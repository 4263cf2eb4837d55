//! Bracketed constituency trees, their normalization, and head finding.

mod heads;
mod normalize;
mod reader;

use std::fmt;

use crate::error::{Error, Result};

pub use self::heads::{Direction, HeadRule, HeadRules};
pub use self::normalize::{normalize_label, normalize_tree};
pub use self::reader::{read_bracketed, write_bracketed};

/// Half-open token interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index < self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

/// A labeled constituency tree.
///
/// Leaves are preterminals: their label is a part-of-speech tag and they
/// carry the surface word. Internal nodes carry a constituent label, at least
/// one child, and the head word selected by a [`HeadRules`] table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParseTree {
    label: String,
    span: Span,
    children: Vec<ParseTree>,
    word: Option<String>,
    head_index: usize,
    head_word: String,
}

impl ParseTree {
    /// Preterminal `(tag word)` at sentence position `position`.
    pub fn leaf(tag: impl Into<String>, word: impl Into<String>, position: usize) -> Self {
        let word = word.into();
        ParseTree {
            label: tag.into(),
            span: Span::new(position, position + 1),
            children: Vec::new(),
            head_index: position,
            head_word: word.clone(),
            word: Some(word),
        }
    }

    /// Internal node over `children`, whose spans must be contiguous.
    pub fn node(label: impl Into<String>, children: Vec<ParseTree>, rules: &HeadRules) -> Result<Self> {
        let label = label.into();
        if children.is_empty() {
            return Err(Error::MalformedTree(format!("constituent {label} has no children")));
        }
        for pair in children.windows(2) {
            if pair[0].span.end != pair[1].span.start {
                return Err(Error::MalformedTree(format!(
                    "children of {label} are not contiguous: {} then {}",
                    pair[0].span, pair[1].span
                )));
            }
        }
        let span = Span::new(children[0].span.start, children[children.len() - 1].span.end);
        let labels: Vec<&str> = children.iter().map(|c| c.label.as_str()).collect();
        let head = &children[rules.find_head(&label, &labels)];
        let (head_index, head_word) = (head.head_index, head.head_word.clone());
        Ok(ParseTree {
            label,
            span,
            children,
            word: None,
            head_index,
            head_word,
        })
    }

    /// Internal node with a head already chosen; spans are trusted.
    pub(crate) fn node_with_head(label: impl Into<String>, children: Vec<ParseTree>, head_child: usize) -> Self {
        let span = Span::new(children[0].span.start, children[children.len() - 1].span.end);
        let head = &children[head_child];
        let (head_index, head_word) = (head.head_index, head.head_word.clone());
        ParseTree {
            label: label.into(),
            span,
            children,
            word: None,
            head_index,
            head_word,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn span(&self) -> Span {
        self.span
    }

    pub fn children(&self) -> &[ParseTree] {
        &self.children
    }

    pub fn word(&self) -> Option<&str> {
        self.word.as_deref()
    }

    pub fn head_index(&self) -> usize {
        self.head_index
    }

    pub fn head_word(&self) -> &str {
        &self.head_word
    }

    pub fn is_leaf(&self) -> bool {
        self.word.is_some()
    }

    /// True iff every child is a preterminal.
    ///
    /// # Panics
    ///
    /// On a leaf; flatness is only defined for constituents.
    pub fn is_flat(&self) -> bool {
        assert!(!self.is_leaf(), "is_flat called on preterminal ({} {})", self.label, self.head_word);
        self.children.iter().all(ParseTree::is_leaf)
    }

    /// Surface words in order.
    pub fn words(&self) -> Vec<&str> {
        self.leaves().map(|l| l.head_word.as_str()).collect()
    }

    /// Part-of-speech tags in order.
    pub fn tags(&self) -> Vec<&str> {
        self.leaves().map(|l| l.label.as_str()).collect()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &ParseTree> {
        self.preorder().filter(|n| n.is_leaf())
    }

    /// All nodes, parents before children, left to right.
    pub fn preorder(&self) -> Preorder<'_> {
        Preorder { stack: vec![self] }
    }

    /// Internal nodes (constituents), preterminals excluded.
    pub fn constituents(&self) -> impl Iterator<Item = &ParseTree> {
        self.preorder().filter(|n| !n.is_leaf())
    }

    /// Copy of this tree with head words recomputed under `rules`.
    pub fn with_head_rules(&self, rules: &HeadRules) -> ParseTree {
        if self.is_leaf() {
            return self.clone();
        }
        let children = self.children.iter().map(|c| c.with_head_rules(rules)).collect();
        ParseTree::node(self.label.clone(), children, rules).expect("spans of a valid tree stay contiguous")
    }

    /// Copy of this tree with every span moved so it starts at `start`.
    pub fn shifted_to(&self, start: usize) -> ParseTree {
        let delta = start as isize - self.span.start as isize;
        self.shift(delta)
    }

    fn shift(&self, delta: isize) -> ParseTree {
        let mv = |i: usize| (i as isize + delta) as usize;
        ParseTree {
            label: self.label.clone(),
            span: Span::new(mv(self.span.start), mv(self.span.end)),
            children: self.children.iter().map(|c| c.shift(delta)).collect(),
            word: self.word.clone(),
            head_index: mv(self.head_index),
            head_word: self.head_word.clone(),
        }
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_bracketed(self))
    }
}

pub struct Preorder<'a> {
    stack: Vec<&'a ParseTree>,
}

impl<'a> Iterator for Preorder<'a> {
    type Item = &'a ParseTree;

    fn next(&mut self) -> Option<&'a ParseTree> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}

/// One sentence of a treebank: its tokens and gold tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<String>,
    pub tree: ParseTree,
}

/// Ordered collection of gold-annotated sentences.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
}

impl Corpus {
    pub fn new() -> Self {
        Corpus::default()
    }

    /// Adds a tree; its tokens are its leaf words and it is moved to span `[0, n)`.
    pub fn push(&mut self, tree: ParseTree) {
        let tree = if tree.span().start == 0 { tree } else { tree.shifted_to(0) };
        let tokens = tree.words().into_iter().map(str::to_owned).collect();
        self.sentences.push(Sentence { tokens, tree });
    }

    /// Reads bracketed text and normalizes every tree, dropping vacuous ones.
    ///
    /// Returns the corpus and the number of trees dropped.
    pub fn read_normalized(text: &str, rules: &HeadRules) -> Result<(Corpus, usize)> {
        let mut corpus = Corpus::new();
        let mut dropped = 0;
        for tree in read_bracketed(text)? {
            match normalize_tree(&tree, rules) {
                Ok(t) => corpus.push(t),
                Err(Error::VacuousTree) => dropped += 1,
                Err(e) => return Err(e),
            }
        }
        Ok((corpus, dropped))
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn trees(&self) -> impl Iterator<Item = &ParseTree> {
        self.sentences.iter().map(|s| &s.tree)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

impl FromIterator<ParseTree> for Corpus {
    fn from_iter<I: IntoIterator<Item = ParseTree>>(iter: I) -> Self {
        let mut corpus = Corpus::new();
        for t in iter {
            corpus.push(t);
        }
        corpus
    }
}
