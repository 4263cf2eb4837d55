//! PARSEVAL scoring, exact match, and best-of-N oracle reranking.
//!
//! A constituent is a `(label, start, end)` triple for every internal node,
//! the root included and preterminals excluded. Proposed and gold
//! constituents are matched as multisets.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::treebank::ParseTree;

/// Tags dropped when punctuation is ignored.
pub const PUNCTUATION_TAGS: [&str; 5] = ["``", "''", ".", ":", ","];
/// Tags dropped when quotation marks are ignored.
pub const QUOTE_TAGS: [&str; 2] = ["``", "''"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub ignore_quotes: bool,
    /// Score PRT as ADVP.
    pub collapse_advp_prt: bool,
    pub ignore_all_punctuation: bool,
    /// Skip sentences with more gold tokens than this.
    pub max_length: Option<usize>,
}

impl EvalOptions {
    /// The setting of the published comparison: punctuation ignored and
    /// ADVP/PRT merged.
    pub fn lenient() -> Self {
        EvalOptions {
            ignore_quotes: true,
            collapse_advp_prt: true,
            ignore_all_punctuation: true,
            max_length: None,
        }
    }

    fn drops(&self, tag: &str) -> bool {
        (self.ignore_quotes && QUOTE_TAGS.contains(&tag)) || (self.ignore_all_punctuation && PUNCTUATION_TAGS.contains(&tag))
    }

    fn label<'a>(&self, label: &'a str) -> &'a str {
        if self.collapse_advp_prt && label == "PRT" {
            "ADVP"
        } else {
            label
        }
    }
}

type Bracket<'a> = (&'a str, usize, usize);

/// Kept words and the bracket list in preorder, after applying `opts`.
fn brackets<'a>(tree: &'a ParseTree, opts: &EvalOptions) -> (Vec<&'a str>, Vec<Bracket<'a>>) {
    let leaves: Vec<&ParseTree> = tree.leaves().collect();
    // new_index[i] = kept tokens before original position i
    let mut new_index = Vec::with_capacity(leaves.len() + 1);
    let mut words = Vec::with_capacity(leaves.len());
    for leaf in &leaves {
        new_index.push(words.len());
        if !opts.drops(leaf.label()) {
            words.push(leaf.word().unwrap_or_default());
        }
    }
    new_index.push(words.len());
    let offset = tree.span().start;
    let mut out = Vec::new();
    for node in tree.preorder().filter(|n| !n.is_leaf()) {
        let s = node.span();
        let (start, end) = (new_index[s.start - offset], new_index[s.end - offset]);
        if start < end {
            out.push((opts.label(node.label()), start, end));
        }
    }
    (words, out)
}

/// Per-sentence counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SentenceRow {
    pub id: usize,
    /// Gold token count before any token is ignored.
    pub length: usize,
    pub matched: usize,
    pub proposed: usize,
    pub gold: usize,
    pub exact: bool,
    /// Rank of the scored parse, if one was proposed.
    pub rank: Option<usize>,
}

impl SentenceRow {
    pub fn precision(&self) -> f64 {
        ratio(self.matched, self.proposed)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.matched, self.gold)
    }
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

fn f_measure(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Scores sentence `id`: `proposed` against `gold`, or an unparsed sentence.
pub fn score_sentence(id: usize, proposed: Option<&ParseTree>, gold: &ParseTree, opts: &EvalOptions) -> Result<SentenceRow> {
    let (gold_words, gold_brackets) = brackets(gold, opts);
    let mut row = SentenceRow {
        id,
        length: gold.span().len(),
        gold: gold_brackets.len(),
        ..SentenceRow::default()
    };
    let Some(proposed) = proposed else {
        return Ok(row);
    };
    let (words, prop_brackets) = brackets(proposed, opts);
    if words != gold_words {
        return Err(Error::Alignment { sentence: id });
    }
    let mut pool: HashMap<Bracket, usize> = HashMap::new();
    for b in &gold_brackets {
        *pool.entry(*b).or_insert(0) += 1;
    }
    for b in &prop_brackets {
        if let Some(n) = pool.get_mut(b).filter(|n| **n > 0) {
            *n -= 1;
            row.matched += 1;
        }
    }
    row.proposed = prop_brackets.len();
    row.exact = prop_brackets == gold_brackets;
    Ok(row)
}

/// `(matched, |P|, |T|)` for one proposed tree against its gold tree.
pub fn parseval(proposed: &ParseTree, gold: &ParseTree, opts: &EvalOptions) -> Result<(usize, usize, usize)> {
    let row = score_sentence(0, Some(proposed), gold, opts)?;
    Ok((row.matched, row.proposed, row.gold))
}

/// Identical bracketing, preterminal labels aside.
pub fn exact_match(proposed: &ParseTree, gold: &ParseTree, opts: &EvalOptions) -> Result<bool> {
    Ok(score_sentence(0, Some(proposed), gold, opts)?.exact)
}

/// Corpus totals and per-sentence rows.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub matched: usize,
    pub proposed: usize,
    pub gold: usize,
    pub exact: usize,
    pub rows: Vec<SentenceRow>,
}

impl EvalReport {
    pub fn sentences(&self) -> usize {
        self.rows.len()
    }

    pub fn precision(&self) -> f64 {
        ratio(self.matched, self.proposed)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.matched, self.gold)
    }

    pub fn f_measure(&self) -> f64 {
        f_measure(self.precision(), self.recall())
    }

    pub fn exact_rate(&self) -> f64 {
        ratio(self.exact, self.rows.len())
    }

    /// Aligned summary lines; rates are fractions to six decimals.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let rate = |x: f64| format!("{x:.6}");
        let lines = [
            ("sentences", self.sentences().to_string()),
            ("matched", self.matched.to_string()),
            ("proposed", self.proposed.to_string()),
            ("gold", self.gold.to_string()),
            ("precision", rate(self.precision())),
            ("recall", rate(self.recall())),
            ("f-measure", rate(self.f_measure())),
            ("exact match", rate(self.exact_rate())),
        ];
        for (k, v) in lines {
            writeln!(s, "{k:<12} {v:>8}").expect("write to String");
        }
        s
    }

    /// Tab-separated rows with a header line.
    pub fn to_delimited(&self) -> String {
        let mut s = String::from("sentence\tlength\tmatched\tproposed\tgold\texact\n");
        for r in &self.rows {
            writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.id,
                r.length,
                r.matched,
                r.proposed,
                r.gold,
                u8::from(r.exact)
            )
            .expect("write to String");
        }
        s
    }
}

/// Micro-averaged report: totals summed over rows.
pub fn aggregate(rows: Vec<SentenceRow>) -> Result<EvalReport> {
    if rows.is_empty() {
        return Err(Error::NoSentences);
    }
    Ok(EvalReport {
        matched: rows.iter().map(|r| r.matched).sum(),
        proposed: rows.iter().map(|r| r.proposed).sum(),
        gold: rows.iter().map(|r| r.gold).sum(),
        exact: rows.iter().filter(|r| r.exact).count(),
        rows,
    })
}

fn within_length(gold: &ParseTree, opts: &EvalOptions) -> bool {
    opts.max_length.is_none_or(|n| gold.span().len() <= n)
}

/// Evaluates one proposal (or none) per gold tree.
pub fn evaluate(proposed: &[Option<ParseTree>], gold: &[ParseTree], opts: &EvalOptions) -> Result<EvalReport> {
    if proposed.len() != gold.len() {
        return Err(Error::Alignment {
            sentence: proposed.len().min(gold.len()),
        });
    }
    let mut rows = Vec::with_capacity(gold.len());
    for (id, (p, g)) in proposed.iter().zip(gold).enumerate() {
        if within_length(g, opts) {
            let mut row = score_sentence(id, p.as_ref(), g, opts)?;
            row.rank = p.as_ref().map(|_| 0);
            rows.push(row);
        }
    }
    aggregate(rows)
}

/// Per sentence, picks the parse among the first `n` with the highest
/// average of precision and recall (earliest on ties) and scores the picks.
pub fn oracle_rerank(kbest: &[Vec<ParseTree>], gold: &[ParseTree], n: usize, opts: &EvalOptions) -> Result<EvalReport> {
    if kbest.len() != gold.len() {
        return Err(Error::Alignment {
            sentence: kbest.len().min(gold.len()),
        });
    }
    let mut rows = Vec::with_capacity(gold.len());
    for (id, (list, g)) in kbest.iter().zip(gold).enumerate() {
        if !within_length(g, opts) {
            continue;
        }
        let mut best = score_sentence(id, None, g, opts)?;
        let mut best_value = f64::NEG_INFINITY;
        for (rank, p) in list.iter().take(n).enumerate() {
            let mut row = score_sentence(id, Some(p), g, opts)?;
            row.rank = Some(rank);
            let value = (row.precision() + row.recall()) / 2.0;
            if value > best_value {
                best_value = value;
                best = row;
            }
        }
        rows.push(best);
    }
    aggregate(rows)
}
