//! Contextual predicates for each procedure and the training events built
//! from gold derivations.
//!
//! A predicate is the template id followed by the captured field values,
//! joined with the ASCII unit separator (`0x1F`). Values never contain the
//! separator, a tab or a newline; such characters are replaced by U+FFFD.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, BufRead, Write};

use crate::derivation::{derive, Action, Annotation, ChunkTag, Grammar, ParserState, Phase, Procedure};
use crate::error::{Error, Result};
use crate::search::TagDictionary;
use crate::treebank::Corpus;

pub const SEPARATOR: char = '\u{1f}';
pub const BOS: &str = "<BOS>";
pub const EOS: &str = "<EOS>";
pub const NO_TREE: &str = "<NOTREE>";
/// Words seen fewer times than this in training get spelling predicates.
pub const RARE_WORD_THRESHOLD: u32 = 5;

/// A contextual predicate that holds in some parser state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate(String);

impl Predicate {
    pub fn new(template: &str, fields: &[&str]) -> Predicate {
        let mut s = String::with_capacity(template.len() + fields.iter().map(|f| f.len() + 1).sum::<usize>());
        s.push_str(template);
        for f in fields {
            s.push(SEPARATOR);
            push_clean(&mut s, f);
        }
        Predicate(s)
    }

    /// Wraps an already encoded predicate, e.g. one read from a model file.
    pub fn from_encoded(encoded: impl Into<String>) -> Predicate {
        Predicate(encoded.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn template(&self) -> &str {
        self.0.split(SEPARATOR).next().unwrap_or("")
    }

    pub fn fields(&self) -> impl Iterator<Item = &str> {
        self.0.split(SEPARATOR).skip(1)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn push_clean(out: &mut String, value: &str) {
    if value.contains([SEPARATOR, '\t', '\n', '\r']) {
        out.extend(value.chars().map(|c| match c {
            SEPARATOR | '\t' | '\n' | '\r' => '\u{fffd}',
            c => c,
        }));
    } else {
        out.push_str(value);
    }
}

/// Predicates for whichever procedure acts next in `s`.
pub fn predicates(s: &ParserState, dict: &TagDictionary) -> Vec<Predicate> {
    match s.phase() {
        Phase::Tag => predicates_tag(s, dict),
        Phase::Chunk => predicates_chunk(s),
        Phase::Build => predicates_build(s),
        Phase::Check => predicates_check(s),
        Phase::Complete => Vec::new(),
    }
}

fn word_at(s: &ParserState, i: isize) -> &str {
    if i < 0 {
        BOS
    } else {
        s.tokens().get(i as usize).map_or(EOS, |w| &**w)
    }
}

fn tag_at(s: &ParserState, i: isize) -> &str {
    if i < 0 {
        BOS
    } else {
        s.tag(i as usize).map_or(EOS, |t| &**t)
    }
}

/// Tagger context: surrounding words, previous tags and, for rare words,
/// spelling features.
pub fn predicates_tag(s: &ParserState, dict: &TagDictionary) -> Vec<Predicate> {
    let i = s.cursor() as isize;
    let word = word_at(s, i);
    let mut out = vec![
        Predicate::new("w0", &[word]),
        Predicate::new("w-1", &[word_at(s, i - 1)]),
        Predicate::new("w-2", &[word_at(s, i - 2)]),
        Predicate::new("w+1", &[word_at(s, i + 1)]),
        Predicate::new("w+2", &[word_at(s, i + 2)]),
        Predicate::new("t-1", &[tag_at(s, i - 1)]),
        Predicate::new("t-2,-1", &[tag_at(s, i - 2), tag_at(s, i - 1)]),
    ];
    if dict.count(word) < RARE_WORD_THRESHOLD {
        const PREFIX: [&str; 4] = ["pre1", "pre2", "pre3", "pre4"];
        const SUFFIX: [&str; 4] = ["suf1", "suf2", "suf3", "suf4"];
        let chars: Vec<(usize, char)> = word.char_indices().collect();
        for k in 1..=chars.len().min(4) {
            let cut = chars.get(k).map_or(word.len(), |&(b, _)| b);
            out.push(Predicate::new(PREFIX[k - 1], &[&word[..cut]]));
            let from = chars[chars.len() - k].0;
            out.push(Predicate::new(SUFFIX[k - 1], &[&word[from..]]));
        }
        if word.chars().any(|c| c.is_ascii_digit()) {
            out.push(Predicate::new("number", &[]));
        }
        if word.chars().any(char::is_uppercase) {
            out.push(Predicate::new("uppercase", &[]));
        }
        if word.contains('-') {
            out.push(Predicate::new("hyphen", &[]));
        }
    }
    out
}

fn push_field(s: &mut String, value: &str) {
    s.push(SEPARATOR);
    push_clean(s, value);
}

/// A chunk tag or build annotation: its kind, then the label if it has one.
#[derive(Clone, Copy)]
struct Mark<'a>(&'static str, Option<&'a str>);

/// Word, tag or label, and mark of one leaf or forest tree; the mark is
/// present only left of the cursor.
#[derive(Clone, Copy)]
struct View<'a> {
    word: &'a str,
    label: &'a str,
    mark: Option<Mark<'a>>,
}

impl View<'_> {
    fn boundary(b: &'static str, offset: isize) -> View<'static> {
        View { word: b, label: b, mark: (offset < 0).then_some(Mark(b, None)) }
    }

    fn push(&self, s: &mut String, with_word: bool) {
        if with_word {
            push_field(s, self.word);
        }
        push_field(s, self.label);
        if let Some(Mark(kind, label)) = self.mark {
            s.push(SEPARATOR);
            s.push_str(kind);
            if let Some(l) = label {
                s.push(' ');
                push_clean(s, l);
            }
        }
    }
}

fn leaf_view(s: &ParserState, offset: isize) -> View<'_> {
    let i = s.cursor() as isize + offset;
    if i < 0 {
        return View::boundary(BOS, offset);
    }
    if i as usize >= s.len() {
        return View::boundary(EOS, offset);
    }
    let i = i as usize;
    View {
        word: &s.tokens()[i],
        label: s.tag(i).map_or(EOS, |t| &**t),
        mark: (offset < 0).then(|| match s.chunk_tag(i).expect("chunk tags left of the cursor") {
            ChunkTag::Start(x) => Mark("Start", Some(&**x)),
            ChunkTag::Join(x) => Mark("Join", Some(&**x)),
            ChunkTag::Other => Mark("Other", None),
        }),
    }
}

fn tree_view(s: &ParserState, offset: isize) -> View<'_> {
    let Some(t) = s.tree_at(offset) else {
        return View::boundary(NO_TREE, offset);
    };
    View {
        word: &s.tokens()[t.node.head()],
        label: t.node.label(),
        mark: (offset < 0).then(|| match &t.annotation {
            Some(Annotation::Start(x)) => Mark("Start", Some(&**x)),
            Some(Annotation::Join(x)) => Mark("Join", Some(&**x)),
            None => Mark(NO_TREE, None),
        }),
    }
}

/// Views at offsets -2..=2, indexed by offset + 2.
fn views<'a>(s: &'a ParserState, view: fn(&'a ParserState, isize) -> View<'a>) -> [View<'a>; 5] {
    [-2, -1, 0, 1, 2].map(|n| view(s, n))
}

const SINGLE_OFFSETS: [isize; 5] = [0, -1, -2, 1, 2];
const PAIRS: [(isize, isize); 2] = [(-1, 0), (0, 1)];
const DROPS: [(bool, bool); 4] = [(false, false), (true, false), (false, true), (true, true)];

const CHUNK_SINGLE: [[&str; 2]; 5] = [
    ["chunkandpostag(0)", "chunkandpostag(0*)"],
    ["chunkandpostag(-1)", "chunkandpostag(-1*)"],
    ["chunkandpostag(-2)", "chunkandpostag(-2*)"],
    ["chunkandpostag(1)", "chunkandpostag(1*)"],
    ["chunkandpostag(2)", "chunkandpostag(2*)"],
];
const CHUNK_PAIR: [[&str; 4]; 2] = [
    ["chunkandpostag(-1,0)", "chunkandpostag(-1*,0)", "chunkandpostag(-1,0*)", "chunkandpostag(-1*,0*)"],
    ["chunkandpostag(0,1)", "chunkandpostag(0*,1)", "chunkandpostag(0,1*)", "chunkandpostag(0*,1*)"],
];
const CONS_SINGLE: [&str; 5] = ["cons(0)", "cons(-1)", "cons(-2)", "cons(1)", "cons(2)"];
const CONS_PAIR: [[&str; 4]; 2] = [
    ["cons(-1,0)", "cons(-1*,0)", "cons(-1,0*)", "cons(-1*,0*)"],
    ["cons(0,1)", "cons(0*,1)", "cons(0,1*)", "cons(0*,1*)"],
];
/// Triples keep the head word of the current tree; the two other positions
/// are backed off as in `DROPS`.
const CONS_TRIPLE: [([isize; 3], [&str; 4]); 3] = [
    ([0, -1, -2], ["cons(0,-1,-2)", "cons(0,-1*,-2)", "cons(0,-1,-2*)", "cons(0,-1*,-2*)"]),
    ([0, 1, 2], ["cons(0,1,2)", "cons(0,1*,2)", "cons(0,1,2*)", "cons(0,1*,2*)"]),
    ([-1, 0, 1], ["cons(-1,0,1)", "cons(-1*,0,1)", "cons(-1,0,1*)", "cons(-1*,0,1*)"]),
];

fn at<'a>(views: &[View<'a>; 5], n: isize) -> View<'a> {
    views[(n + 2) as usize]
}

fn template(name: &str) -> String {
    let mut s = String::with_capacity(name.len() + 48);
    s.push_str(name);
    s
}

/// Chunker context: words, tags and chunk tags of the leaves around the cursor.
pub fn predicates_chunk(s: &ParserState) -> Vec<Predicate> {
    let v = views(s, leaf_view);
    let mut out = Vec::with_capacity(18);
    for (k, &n) in SINGLE_OFFSETS.iter().enumerate() {
        for (b, name) in CHUNK_SINGLE[k].iter().enumerate() {
            let mut p = template(name);
            at(&v, n).push(&mut p, b == 0);
            out.push(Predicate(p));
        }
    }
    for (k, &(m, n)) in PAIRS.iter().enumerate() {
        for (name, &(drop_a, drop_b)) in CHUNK_PAIR[k].iter().zip(&DROPS) {
            let mut p = template(name);
            at(&v, m).push(&mut p, !drop_a);
            at(&v, n).push(&mut p, !drop_b);
            out.push(Predicate(p));
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Bracket {
    Round,
    Square,
    Curly,
}

fn opener(word: &str) -> Option<Bracket> {
    match word {
        "(" | "-LRB-" => Some(Bracket::Round),
        "[" | "-LSB-" => Some(Bracket::Square),
        "{" | "-LCB-" => Some(Bracket::Curly),
        _ => None,
    }
}

fn closer(word: &str) -> Option<Bracket> {
    match word {
        ")" | "-RRB-" => Some(Bracket::Round),
        "]" | "-RSB-" => Some(Bracket::Square),
        "}" | "-RCB-" => Some(Bracket::Curly),
        _ => None,
    }
}

/// Builder context: heads and labels of nearby trees, plus punctuation
/// predicates about the run the cursor tree could join.
pub fn predicates_build(s: &ParserState) -> Vec<Predicate> {
    let v = views(s, tree_view);
    let mut out = Vec::with_capacity(28);
    for (name, &n) in CONS_SINGLE.iter().zip(&SINGLE_OFFSETS) {
        let mut p = template(name);
        at(&v, n).push(&mut p, true);
        out.push(Predicate(p));
    }
    for (k, &(m, n)) in PAIRS.iter().enumerate() {
        for (name, &(drop_a, drop_b)) in CONS_PAIR[k].iter().zip(&DROPS) {
            let mut p = template(name);
            at(&v, m).push(&mut p, !drop_a);
            at(&v, n).push(&mut p, !drop_b);
            out.push(Predicate(p));
        }
    }
    for (offsets, names) in &CONS_TRIPLE {
        let others: Vec<usize> = (0..3).filter(|&k| offsets[k] != 0).collect();
        for (name, &(drop_x, drop_y)) in names.iter().zip(&DROPS) {
            let dropped = |k: usize| (k == others[0] && drop_x) || (k == others[1] && drop_y);
            let mut p = template(name);
            for (k, &n) in offsets.iter().enumerate() {
                at(&v, n).push(&mut p, !dropped(k));
            }
            out.push(Predicate(p));
        }
    }
    punctuation(s, &mut out);
    out
}

fn punctuation(s: &ParserState, out: &mut Vec<Predicate>) {
    let Some(run_start) = s.joinable_run_start() else {
        return;
    };
    let Some(current) = s.tree_at(0).map(|t| &t.node) else {
        return;
    };
    if !current.is_preterminal() {
        return;
    }
    let word = &*s.tokens()[current.span().start];
    let run_words = &s.tokens()[run_start..current.span().start];
    if let Some(b) = closer(word) {
        if run_words.iter().any(|w| opener(w) == Some(b)) {
            out.push(Predicate::new("bracketsmatch", &[]));
        }
    }
    if word == "," && run_words.iter().any(|w| &**w == ",") {
        out.push(Predicate::new("iscomma", &[]));
    }
    if run_start == 0 && current.span().end == s.len() && s.tag(current.span().start).is_some_and(|t| &**t == ".") {
        out.push(Predicate::new("endofsentence", &[]));
    }
}

/// Checker context: the proposed constituent's label, its first and last
/// children, pairs ending at the last child, its production and the leaves
/// just outside it.
pub fn predicates_check(s: &ParserState) -> Vec<Predicate> {
    let Some(p) = s.proposed_constituent() else {
        return Vec::new();
    };
    let label = &*p.label;
    let run: Vec<(&str, &str)> = s
        .trees(p.first, p.last)
        .into_iter()
        .map(|t| (&*s.tokens()[t.node.head()], &**t.node.label()))
        .collect();
    let tree = |i: usize| run[i - p.first];
    let mut out = Vec::with_capacity(16 + 4 * (p.last - p.first));
    let (last_head, last_label) = tree(p.last);
    let (first_head, first_label) = tree(p.first);
    out.push(Predicate::new("checkcons(last)", &[last_head, last_label, label]));
    out.push(Predicate::new("checkcons(last*)", &[last_label, label]));
    out.push(Predicate::new("checkcons(begin)", &[first_head, first_label, label]));
    out.push(Predicate::new("checkcons(begin*)", &[first_label, label]));
    for i in p.first..p.last {
        let (head, lab) = tree(i);
        out.push(Predicate::new("checkcons(i,last)", &[head, lab, last_head, last_label, label]));
        out.push(Predicate::new("checkcons(i*,last)", &[lab, last_head, last_label, label]));
        out.push(Predicate::new("checkcons(i,last*)", &[head, lab, last_label, label]));
        out.push(Predicate::new("checkcons(i*,last*)", &[lab, last_label, label]));
    }
    let mut production = vec![label];
    production.extend((p.first..=p.last).map(|i| tree(i).1));
    out.push(Predicate::new("production", &production));
    const SURROUND: [(isize, &str, &str); 4] = [
        (-1, "surround(-1)", "surround(-1*)"),
        (-2, "surround(-2)", "surround(-2*)"),
        (1, "surround(1)", "surround(1*)"),
        (2, "surround(2)", "surround(2*)"),
    ];
    for (n, full, backed_off) in SURROUND {
        let leaf = if n < 0 {
            p.span.start as isize + n
        } else {
            p.span.end as isize + n - 1
        };
        let (word, tag) = (word_at(s, leaf), tag_at(s, leaf));
        out.push(Predicate::new(full, &[tag, word]));
        out.push(Predicate::new(backed_off, &[tag]));
    }
    if p.last - p.first > 1 {
        let mut seen = HashSet::with_capacity(out.len());
        out.retain(|q| seen.insert(q.0.clone()));
    }
    out
}

/// An action in the context it was decided in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub action: Action,
    pub predicates: Vec<Predicate>,
}

impl Event {
    pub fn procedure(&self) -> Procedure {
        self.action.procedure()
    }
}

/// Training events split by procedure, plus the sentences that could not be derived.
#[derive(Debug, Default)]
pub struct EventCollections {
    pub by_procedure: [Vec<Event>; 4],
    pub underivable: Vec<(usize, Error)>,
}

impl EventCollections {
    pub fn events(&self, p: Procedure) -> &[Event] {
        &self.by_procedure[p.index()]
    }

    pub fn into_events(self, p: Procedure) -> Vec<Event> {
        let [a, b, c, d] = self.by_procedure;
        [a, b, c, d].into_iter().nth(p.index()).expect("four procedures")
    }

    pub fn total(&self) -> usize {
        self.by_procedure.iter().map(Vec::len).sum()
    }
}

/// Events for every action of every derivable gold tree, in corpus order.
pub fn collect_events(corpus: &Corpus, grammar: &Grammar, dict: &TagDictionary) -> EventCollections {
    let mut out = EventCollections::default();
    for (i, sentence) in corpus.sentences().iter().enumerate() {
        let steps = match derive(&sentence.tree, grammar).and_then(|d| d.steps(grammar)) {
            Ok(steps) => steps,
            Err(e) => {
                out.underivable.push((i, e));
                continue;
            }
        };
        for (action, state) in steps {
            let predicates = predicates(&state, dict);
            out.by_procedure[action.procedure().index()].push(Event { action, predicates });
        }
    }
    out
}

/// Writes one event per line: procedure, action payload, then the predicates,
/// all tab-separated.
pub fn write_events<W: Write>(events: &[Event], mut w: W) -> io::Result<()> {
    for e in events {
        write!(w, "{}\t{}", e.procedure(), e.action.payload())?;
        for p in &e.predicates {
            write!(w, "\t{p}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_events<R: BufRead>(r: R) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let bad = || Error::ModelFormat(format!("event line {}: malformed", n + 1));
        let procedure: Procedure = fields.next().ok_or_else(bad)?.parse()?;
        let action = Action::from_payload(procedure, fields.next().ok_or_else(bad)?)?;
        let predicates = fields.map(Predicate::from_encoded).collect();
        out.push(Event { action, predicates });
    }
    Ok(out)
}
