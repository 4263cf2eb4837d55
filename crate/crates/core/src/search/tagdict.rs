use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::derivation::Label;
use crate::error::{Error, Result};
use crate::treebank::Corpus;

const HEADER: &str = "mxparse-tagdict 1";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Entry {
    count: u32,
    tags: BTreeSet<Label>,
}

/// Tags observed for each training word, with word frequencies.
///
/// During search a known word may only receive one of its observed tags;
/// unknown words may receive any tag.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TagDictionary {
    words: BTreeMap<String, Entry>,
}

impl TagDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_corpus(corpus: &Corpus) -> Self {
        let mut dict = Self::new();
        for tree in corpus.trees() {
            for leaf in tree.leaves() {
                dict.add(leaf.word().unwrap_or_default(), leaf.label());
            }
        }
        dict
    }

    /// Records one occurrence of `word` tagged `tag`.
    pub fn add(&mut self, word: &str, tag: &str) {
        let entry = self.words.entry(word.to_owned()).or_default();
        entry.count += 1;
        if !entry.tags.contains(tag) {
            entry.tags.insert(Label::from(tag));
        }
    }

    /// Training frequency of `word`; 0 if unseen.
    pub fn count(&self, word: &str) -> u32 {
        self.words.get(word).map_or(0, |e| e.count)
    }

    pub fn tags(&self, word: &str) -> Option<&BTreeSet<Label>> {
        self.words.get(word).map(|e| &e.tags)
    }

    /// Whether search may tag `word` with `tag`.
    pub fn allows(&self, word: &str, tag: &str) -> bool {
        self.words.get(word).is_none_or(|e| e.tags.contains(tag))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// One line per word: `word<TAB>count<TAB>tag tag ...`, words sorted.
    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER}\n");
        for (word, e) in &self.words {
            let tags: Vec<&str> = e.tags.iter().map(|t| &**t).collect();
            writeln!(out, "{word}\t{}\t{}", e.count, tags.join(" ")).expect("write to String");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(HEADER) {
            return Err(Error::ModelFormat("tag dictionary: bad header".into()));
        }
        let mut dict = Self::new();
        for (n, line) in lines.enumerate() {
            let bad = || Error::ModelFormat(format!("tag dictionary line {}: malformed", n + 2));
            let mut fields = line.split('\t');
            let (Some(word), Some(count), Some(tags), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(bad());
            };
            let count: u32 = count.parse().map_err(|_| bad())?;
            let tags: BTreeSet<Label> = tags.split(' ').filter(|t| !t.is_empty()).map(Label::from).collect();
            if tags.is_empty() || count == 0 {
                return Err(bad());
            }
            dict.words.insert(word.to_owned(), Entry { count, tags });
        }
        Ok(dict)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{read_bracketed, Corpus};

    fn corpus() -> Corpus {
        read_bracketed("(S (NP (NN run)) (VP (VBZ runs))) (S (NP (PRP I)) (VP (VBP run)))")
            .unwrap()
            .into_iter()
            .collect()
    }

    #[test]
    fn counts_and_tags() {
        let d = TagDictionary::from_corpus(&corpus());
        assert_eq!(d.count("run"), 2);
        assert_eq!(d.count("unseen"), 0);
        let tags: Vec<&str> = d.tags("run").unwrap().iter().map(|t| &**t).collect();
        assert_eq!(tags, ["NN", "VBP"]);
        assert!(d.allows("run", "NN"));
        assert!(!d.allows("run", "VBZ"));
        assert!(d.allows("unseen", "VBZ"));
    }

    #[test]
    fn text_round_trip() {
        let d = TagDictionary::from_corpus(&corpus());
        let text = d.to_text();
        assert_eq!(TagDictionary::parse(&text).unwrap(), d);
        assert!(TagDictionary::parse("nope\n").is_err());
        assert!(TagDictionary::parse("mxparse-tagdict 1\nword\tx\tNN\n").is_err());
    }
}
