//! A seeded toy grammar producing Penn-Treebank-style trees.
//!
//! Output carries the raw treebank decorations (function tags, `-NONE-`
//! traces, quotation marks and an unlabeled outer bracket) so that reading it
//! back goes through normalization. Prepositional attachment is mostly
//! lexical: `of` attaches to the noun phrase, other prepositions usually to
//! the verb phrase. Long sentences come from right-nested clause coordination.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DT: &[&str] = &["the", "a", "this", "every", "that"];
const NN: &[&str] = &[
    "dog", "cat", "bank", "market", "report", "company", "plan", "deal", "price", "stock", "city", "judge", "board",
    "park", "house",
];
const NNS: &[&str] = &["dogs", "cats", "banks", "markets", "reports", "plans", "prices", "stocks", "investors", "analysts"];
const NNP: &[&str] = &["Smith", "Jones", "Acme", "Boston", "Chicago", "Mary", "John", "Friday"];
const JJ: &[&str] = &["big", "small", "new", "old", "strong", "weak", "local"];
const PRP: &[&str] = &["he", "she", "they", "it", "we"];
const CD: &[&str] = &["two", "three", "10", "25"];
const VBD_T: &[&str] = &["saw", "bought", "sold", "liked", "approved", "rejected", "found", "took"];
const VBD_I: &[&str] = &["ran", "fell", "rose", "left", "slept", "arrived"];
const VBD_SAY: &[&str] = &["said", "reported", "believed"];
const VBD_PRT: &[&str] = &["picked", "gave", "sold"];
const RP: &[&str] = &["up", "out"];
const MD: &[&str] = &["will", "could", "may"];
const VB: &[&str] = &["buy", "sell", "approve", "see"];
const RB: &[&str] = &["quickly", "slowly", "yesterday", "today"];
const IN_VP: &[&str] = &["in", "on", "with", "at", "by", "for"];
const CC: &[&str] = &["and", "but", "or"];
const WDT: &[&str] = &["that", "which"];
const LOC_TAGS: &[&str] = &["-LOC", "-CLR", "-TMP", ""];

#[derive(Clone, Debug)]
enum Gen {
    Leaf(&'static str, String),
    Node(String, Vec<Gen>),
}

impl Gen {
    fn leaf(tag: &'static str, word: &str) -> Gen {
        Gen::Leaf(tag, word.to_owned())
    }

    fn node(label: impl Into<String>, children: Vec<Gen>) -> Gen {
        Gen::Node(label.into(), children)
    }

    /// Tokens that survive normalization.
    fn length(&self) -> usize {
        match self {
            Gen::Leaf(tag, _) => usize::from(!matches!(*tag, "-NONE-" | "``" | "''")),
            Gen::Node(_, children) => children.iter().map(Gen::length).sum(),
        }
    }

    fn write(&self, out: &mut String) {
        match self {
            Gen::Leaf(tag, word) => {
                out.push('(');
                out.push_str(tag);
                out.push(' ');
                out.push_str(word);
                out.push(')');
            }
            Gen::Node(label, children) => {
                out.push('(');
                out.push_str(label);
                for c in children {
                    out.push(' ');
                    c.write(out);
                }
                out.push(')');
            }
        }
    }
}

/// Generator state: the random source and a counter for trace indices.
pub struct Generator {
    rng: ChaCha8Rng,
    trace: usize,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            trace: 0,
        }
    }

    fn pick(&mut self, words: &[&'static str]) -> &'static str {
        words.choose(&mut self.rng).expect("non-empty word list")
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn simple_np(&mut self) -> Gen {
        let kids = match self.rng.gen_range(0..9) {
            0 | 1 => vec![Gen::leaf("DT", self.pick(DT)), Gen::leaf("NN", self.pick(NN))],
            2 => vec![
                Gen::leaf("DT", self.pick(DT)),
                Gen::leaf("JJ", self.pick(JJ)),
                Gen::leaf("NN", self.pick(NN)),
            ],
            3 => vec![Gen::leaf("NNP", self.pick(NNP))],
            4 => vec![Gen::leaf("NNP", self.pick(NNP)), Gen::leaf("NNP", self.pick(NNP))],
            5 => vec![Gen::leaf("PRP", self.pick(PRP))],
            6 => vec![Gen::leaf("DT", self.pick(DT)), Gen::leaf("NNS", self.pick(NNS))],
            7 => vec![Gen::leaf("CD", self.pick(CD)), Gen::leaf("NNS", self.pick(NNS))],
            _ => vec![Gen::leaf("JJ", self.pick(JJ)), Gen::leaf("NNS", self.pick(NNS))],
        };
        Gen::node("NP", kids)
    }

    fn np(&mut self, depth: usize, function: &str) -> Gen {
        let label = format!("NP{function}");
        if depth >= 2 {
            let Gen::Node(_, kids) = self.simple_np() else { unreachable!() };
            return Gen::node(label, kids);
        }
        match self.rng.gen_range(0..100) {
            0..=13 => {
                let pp = Gen::node("PP", vec![Gen::leaf("IN", "of"), self.np(depth + 1, "")]);
                Gen::node(label, vec![self.simple_np(), pp])
            }
            14..=20 => {
                self.trace += 1;
                let t = self.trace;
                let wh = Gen::node(format!("WHNP-{t}"), vec![Gen::leaf("WDT", self.pick(WDT))]);
                let subject = Gen::node("NP-SBJ", vec![Gen::leaf("-NONE-", &format!("*T*-{t}"))]);
                let clause = Gen::node("S", vec![subject, self.simple_vp(depth + 1)]);
                Gen::node(label, vec![self.simple_np(), Gen::node("SBAR", vec![wh, clause])])
            }
            21..=25 => Gen::node(
                label,
                vec![self.simple_np(), Gen::leaf("CC", "and"), self.simple_np()],
            ),
            _ => {
                let Gen::Node(_, kids) = self.simple_np() else { unreachable!() };
                Gen::node(label, kids)
            }
        }
    }

    fn pp(&mut self, depth: usize) -> Gen {
        let function = self.pick(LOC_TAGS);
        Gen::node(
            format!("PP{function}"),
            vec![Gen::leaf("IN", self.pick(IN_VP)), self.np(depth + 1, "")],
        )
    }

    /// Verb phrase without clausal complements.
    fn simple_vp(&mut self, depth: usize) -> Gen {
        let kids = match self.rng.gen_range(0..100) {
            0..=34 => vec![Gen::leaf("VBD", self.pick(VBD_T)), self.np(depth + 1, "")],
            35..=49 if self.chance(0.2) => {
                let object = Gen::node("NP", vec![self.simple_np(), self.pp(depth + 1)]);
                vec![Gen::leaf("VBD", self.pick(VBD_T)), object]
            }
            35..=49 => vec![Gen::leaf("VBD", self.pick(VBD_T)), self.np(depth + 1, ""), self.pp(depth)],
            50..=59 => vec![Gen::leaf("VBD", self.pick(VBD_I))],
            60..=71 => vec![Gen::leaf("VBD", self.pick(VBD_I)), self.pp(depth)],
            72..=79 => vec![
                Gen::leaf("VBD", self.pick(VBD_I)),
                Gen::node("ADVP-TMP", vec![Gen::leaf("RB", self.pick(RB))]),
            ],
            80..=91 => {
                let inner = Gen::node("VP", vec![Gen::leaf("VB", self.pick(VB)), self.np(depth + 1, "")]);
                vec![Gen::leaf("MD", self.pick(MD)), inner]
            }
            _ => vec![
                Gen::leaf("VBD", self.pick(VBD_PRT)),
                Gen::node("PRT", vec![Gen::leaf("RP", self.pick(RP))]),
                self.np(depth + 1, ""),
            ],
        };
        Gen::node("VP", kids)
    }

    fn vp(&mut self, depth: usize) -> Gen {
        if depth == 0 && self.chance(0.15) {
            let say = Gen::leaf("VBD", self.pick(VBD_SAY));
            let inner = self.clause(depth + 1);
            return if self.chance(0.5) {
                let sbar = Gen::node("SBAR", vec![Gen::leaf("IN", "that"), inner]);
                Gen::node("VP", vec![say, sbar])
            } else {
                Gen::node(
                    "VP",
                    vec![say, Gen::leaf(",", ","), Gen::leaf("``", "``"), inner, Gen::leaf("''", "''")],
                )
            };
        }
        if depth == 0 && self.chance(0.05) {
            let a = self.simple_vp(depth + 1);
            let b = self.simple_vp(depth + 1);
            return Gen::node("VP", vec![a, Gen::leaf("CC", "and"), b]);
        }
        self.simple_vp(depth)
    }

    fn clause(&mut self, depth: usize) -> Gen {
        let subject = self.np(depth + 1, "-SBJ");
        let vp = self.vp(depth);
        Gen::node("S", vec![subject, vp])
    }

    /// Clauses coordinated as `S -> S , CC S`, nested to the right, until
    /// about `target` tokens.
    fn coordination(&mut self, target: usize) -> Gen {
        let first = self.clause(0);
        let length = first.length();
        if length + 3 >= target {
            return first;
        }
        let rest = self.coordination(target - length - 2);
        Gen::node("S", vec![first, Gen::leaf(",", ","), Gen::leaf("CC", self.pick(CC)), rest])
    }

    /// A sentence of roughly `target` tokens.
    fn sentence(&mut self, target: usize) -> Gen {
        let Gen::Node(_, mut kids) = self.coordination(target.saturating_sub(1)) else {
            unreachable!()
        };
        kids.push(Gen::leaf(".", "."));
        Gen::node("S", kids)
    }

    /// One raw bracketed tree of about `target` tokens, wrapped as `( (S ...) )`.
    pub fn tree(&mut self, target: usize) -> String {
        let mut out = String::from("( ");
        self.sentence(target).write(&mut out);
        out.push_str(" )");
        out
    }

    /// A tree whose normalized length lies in `min..=max`.
    pub fn tree_in(&mut self, min: usize, max: usize) -> String {
        assert!(min >= 3 && min <= max, "length range {min}..={max} too narrow");
        loop {
            let target = self.rng.gen_range(min..=max);
            let s = self.sentence(target);
            if (min..=max).contains(&s.length()) {
                let mut out = String::from("( ");
                s.write(&mut out);
                out.push_str(" )");
                return out;
            }
        }
    }
}

/// `count` raw trees; lengths mostly short with a tail up to `max_len`.
pub fn generate_corpus(seed: u64, count: usize, max_len: usize) -> Vec<String> {
    let mut g = Generator::new(seed);
    let mid = 15.min(max_len);
    (0..count)
        .map(|i| match i % 20 {
            0..=11 => g.tree_in(5.min(mid), mid),
            12..=16 => g.tree_in(mid, 35.min(max_len).max(mid)),
            _ => g.tree_in(35.min(max_len).max(mid), max_len),
        })
        .collect()
}

/// Seed and size of the corpus shipped in `data/fixture.mrg`.
pub const FIXTURE_SEED: u64 = 1996;
pub const FIXTURE_SIZE: usize = 240;
pub const FIXTURE_MAX_LEN: usize = 60;

/// The shipped fixture corpus, raw text.
pub const FIXTURE: &str = include_str!("../data/fixture.mrg");
