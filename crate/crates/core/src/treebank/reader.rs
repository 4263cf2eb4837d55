use super::{HeadRules, ParseTree};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Vec<(Tok<'_>, Pos)> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut atom_start: Option<(usize, Pos)> = None;
    for (i, ch) in text.char_indices() {
        let here = Pos { line, column };
        let breaks = ch.is_whitespace() || ch == '(' || ch == ')';
        if breaks {
            if let Some((s, p)) = atom_start.take() {
                out.push((Tok::Atom(&text[s..i]), p));
            }
            match ch {
                '(' => out.push((Tok::Open, here)),
                ')' => out.push((Tok::Close, here)),
                _ => {}
            }
        } else if atom_start.is_none() {
            atom_start = Some((i, here));
        }
        if ch == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    if let Some((s, p)) = atom_start {
        out.push((Tok::Atom(&text[s..]), p));
    }
    out
}

/// Tree as read, before spans and heads are assigned.
#[derive(Debug)]
pub(super) enum Raw {
    Leaf { tag: String, word: String },
    Node { label: String, children: Vec<Raw> },
}

impl Raw {
    pub(super) fn build(&self, start: usize, rules: &HeadRules) -> ParseTree {
        match self {
            Raw::Leaf { tag, word } => ParseTree::leaf(tag.clone(), word.clone(), start),
            Raw::Node { label, children } => {
                let mut next = start;
                let built: Vec<ParseTree> = children
                    .iter()
                    .map(|c| {
                        let t = c.build(next, rules);
                        next = t.span().end;
                        t
                    })
                    .collect();
                ParseTree::node(label.clone(), built, rules).expect("raw children are contiguous")
            }
        }
    }

    pub(super) fn from_tree(tree: &ParseTree) -> Raw {
        match tree.word() {
            Some(w) => Raw::Leaf {
                tag: tree.label().to_owned(),
                word: w.to_owned(),
            },
            None => Raw::Node {
                label: tree.label().to_owned(),
                children: tree.children().iter().map(Raw::from_tree).collect(),
            },
        }
    }
}

struct Parser<'a> {
    toks: Vec<(Tok<'a>, Pos)>,
    at: usize,
    end: Pos,
}

impl<'a> Parser<'a> {
    fn err(&self, pos: Pos, message: impl Into<String>) -> Error {
        Error::Parse {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&(Tok<'a>, Pos)> {
        self.toks.get(self.at)
    }

    fn next(&mut self) -> Result<(Tok<'a>, Pos)> {
        let t = self
            .toks
            .get(self.at)
            .cloned()
            .ok_or_else(|| self.err(self.end, "unbalanced parentheses: unexpected end of input"))?;
        self.at += 1;
        Ok(t)
    }

    /// Parses a bracket whose `(` has just been consumed at `open`.
    /// Returns `None` as the label for an unlabeled wrapper bracket.
    fn bracket(&mut self, open: Pos) -> Result<(Option<String>, Raw)> {
        let label = match self.next()? {
            (Tok::Atom(a), _) => Some(a.to_owned()),
            (Tok::Open, _) => {
                self.at -= 1;
                None
            }
            (Tok::Close, p) => return Err(self.err(p, "empty constituent \"()\"")),
        };
        match self.next()? {
            (Tok::Atom(word), wpos) => {
                let Some(tag) = label else {
                    return Err(self.err(wpos, format!("word {word:?} without a tag")));
                };
                match self.next()? {
                    (Tok::Close, _) => Ok((
                        Some(tag.clone()),
                        Raw::Leaf {
                            tag,
                            word: word.to_owned(),
                        },
                    )),
                    (Tok::Open, p) => Err(self.err(p, format!("leaf ({tag} {word}) cannot have children"))),
                    (Tok::Atom(extra), p) => {
                        Err(self.err(p, format!("leaf ({tag} {word}) has a second word {extra:?}")))
                    }
                }
            }
            (Tok::Close, p) => Err(self.err(
                p,
                format!("empty constituent ({})", label.as_deref().unwrap_or("")),
            )),
            (Tok::Open, p) => {
                let mut children = vec![self.bracket(p)?.1];
                loop {
                    match self.next()? {
                        (Tok::Close, _) => break,
                        (Tok::Open, p) => children.push(self.bracket(p)?.1),
                        (Tok::Atom(a), p) => {
                            return Err(self.err(p, format!("stray word {a:?} among constituents")))
                        }
                    }
                }
                match label {
                    Some(label) => Ok((Some(label.clone()), Raw::Node { label, children })),
                    None if children.len() == 1 => Ok((None, children.pop().expect("one child"))),
                    None => Err(self.err(open, "unlabeled bracket with several trees")),
                }
            }
        }
    }
}

pub(super) fn read_raw(text: &str) -> Result<Vec<Raw>> {
    let toks = lex(text);
    let end = {
        let line = text.split('\n').count();
        let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Pos { line, column }
    };
    let mut p = Parser { toks, at: 0, end };
    let mut trees = Vec::new();
    while let Some((tok, pos)) = p.peek().cloned() {
        p.at += 1;
        match tok {
            Tok::Open => trees.push(p.bracket(pos)?.1),
            Tok::Close => return Err(p.err(pos, "unbalanced parentheses: unexpected \")\"")),
            Tok::Atom(a) => return Err(p.err(pos, format!("word {a:?} outside any bracket"))),
        }
    }
    Ok(trees)
}

/// Reads every top-level bracketed tree in `text`, with spans from 0 and
/// heads from the standard rule table.
///
/// An unlabeled outer bracket around a single tree, as in `( (S ...) )`,
/// is unwrapped.
pub fn read_bracketed(text: &str) -> Result<Vec<ParseTree>> {
    let rules = HeadRules::standard();
    Ok(read_raw(text)?.iter().map(|r| r.build(0, rules)).collect())
}

/// Canonical single-line form: `(LABEL child child)` with one space between items.
pub fn write_bracketed(tree: &ParseTree) -> String {
    let mut out = String::new();
    write_into(tree, &mut out);
    out
}

fn write_into(tree: &ParseTree, out: &mut String) {
    out.push('(');
    out.push_str(tree.label());
    if let Some(w) = tree.word() {
        out.push(' ');
        out.push_str(w);
    }
    for c in tree.children() {
        out.push(' ');
        write_into(c, out);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::Span;

    #[test]
    fn reads_nested_tree() {
        let t = read_bracketed("(S (NP (PRP I)) (VP (VBD saw)))").unwrap().remove(0);
        let c: Vec<_> = t.constituents().skip(1).map(|n| (n.label().to_owned(), n.span())).collect();
        assert_eq!(c, [("NP".to_owned(), Span::new(0, 1)), ("VP".to_owned(), Span::new(1, 2))]);
        assert_eq!(write_bracketed(&t), "(S (NP (PRP I)) (VP (VBD saw)))");
    }

    #[test]
    fn reads_single_leaf() {
        let t = read_bracketed("(NN dog)").unwrap().remove(0);
        assert!(t.is_leaf());
        assert_eq!(t.span(), Span::new(0, 1));
        assert_eq!(write_bracketed(&t), "(NN dog)");
    }

    #[test]
    fn unwraps_outer_bracket_and_reads_many() {
        let text = "( (S (NP (NNP John))\n     (VP (VBD slept))) )\n(NP (-LRB- -LRB-) (NN x) (-RRB- -RRB-))";
        let ts = read_bracketed(text).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[0].label(), "S");
        assert_eq!(ts[1].tags(), ["-LRB-", "NN", "-RRB-"]);
    }

    fn err_at(text: &str) -> (usize, usize, String) {
        match read_bracketed(text) {
            Err(Error::Parse { line, column, message }) => (line, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs_report_positions() {
        let (_, _, m) = err_at("(S (NP)");
        assert!(m.contains("empty constituent"), "{m}");
        let (l, c, m) = err_at("(S (NP (NN a))");
        assert!(m.contains("unbalanced"), "{m}");
        assert_eq!((l, c), (1, 15));
        let (l, c, m) = err_at("(S\n (NN dog (X y)))");
        assert!(m.contains("cannot have children"), "{m}");
        assert_eq!((l, c), (2, 10));
        let (_, _, m) = err_at("(S (NN a)))");
        assert!(m.contains("unexpected \")\""), "{m}");
        let (_, _, m) = err_at("()");
        assert!(m.contains("empty"), "{m}");
        let (_, _, m) = err_at("(NN a b)");
        assert!(m.contains("second word"), "{m}");
    }

    #[test]
    fn empty_input_has_no_trees() {
        assert!(read_bracketed("  \n").unwrap().is_empty());
    }
}
