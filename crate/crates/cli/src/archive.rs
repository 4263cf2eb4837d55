//! Single-file model archive: a text index followed by the member files.
//!
//! ```text
//! mxparse-archive 1
//! members 8
//! meta <bytes>
//! grammar <bytes>
//! ...
//! <member bodies, concatenated in index order>
//! ```

use std::path::Path;

use mxparse::derivation::{Grammar, Procedure};
use mxparse::maxent::{MaxentModel, ModelSet};
use mxparse::search::TagDictionary;
use mxparse::treebank::HeadRules;
use mxparse::Parser;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "mxparse-archive";
const MEMBERS: [&str; 8] = [
    "meta",
    "grammar",
    "headrules",
    "tagdict",
    "model-tag",
    "model-chunk",
    "model-build",
    "model-check",
];

/// How an archive was trained.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainMeta {
    /// Hex SHA-256 of the training corpus file.
    pub corpus_sha256: String,
    pub sentences: usize,
    pub underivable: usize,
    pub cutoff: u64,
    pub max_iters: usize,
    pub tol: f64,
}

impl TrainMeta {
    pub fn hash_corpus(bytes: &[u8]) -> String {
        Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn to_text(&self) -> String {
        format!(
            "corpus-sha256 {}\nsentences {}\nunderivable {}\ncutoff {}\niterations {}\ntolerance {}\n",
            self.corpus_sha256, self.sentences, self.underivable, self.cutoff, self.max_iters, self.tol
        )
    }

    fn parse(text: &str) -> Result<TrainMeta> {
        let mut fields = std::collections::HashMap::new();
        for line in text.lines() {
            let (k, v) = line
                .split_once(' ')
                .ok_or_else(|| CliError::Archive(format!("meta: malformed line {line:?}")))?;
            fields.insert(k, v);
        }
        fn get<T: std::str::FromStr>(fields: &std::collections::HashMap<&str, &str>, key: &str) -> Result<T> {
            fields
                .get(key)
                .ok_or_else(|| CliError::Archive(format!("meta: missing {key}")))?
                .parse()
                .map_err(|_| CliError::Archive(format!("meta: bad {key}")))
        }
        Ok(TrainMeta {
            corpus_sha256: get(&fields, "corpus-sha256")?,
            sentences: get(&fields, "sentences")?,
            underivable: get(&fields, "underivable")?,
            cutoff: get(&fields, "cutoff")?,
            max_iters: get(&fields, "iterations")?,
            tol: get(&fields, "tolerance")?,
        })
    }
}

/// A trained parser and its training metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelArchive {
    pub meta: TrainMeta,
    pub parser: Parser,
}

fn grammar_text(g: &Grammar) -> String {
    let mut s = format!("tags {}\n", g.tags().len());
    for t in g.tags() {
        s.push_str(t);
        s.push('\n');
    }
    s.push_str(&format!("labels {}\n", g.labels().len()));
    for l in g.labels() {
        s.push_str(l);
        s.push('\n');
    }
    s
}

fn parse_grammar(text: &str, rules: HeadRules) -> Result<Grammar> {
    let bad = || CliError::Archive("grammar: malformed".into());
    let mut lines = text.lines();
    let mut list = |name: &str| -> Result<Vec<String>> {
        let n: usize = lines
            .next()
            .and_then(|l| l.strip_prefix(name))
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(bad)?;
        (0..n).map(|_| lines.next().map(str::to_owned).ok_or_else(bad)).collect()
    };
    let tags = list("tags")?;
    let labels = list("labels")?;
    Ok(Grammar::new(tags, labels, rules))
}

fn member(name: &str) -> impl FnOnce(mxparse::Error) -> CliError + '_ {
    move |e| CliError::Archive(format!("{name}: {e}"))
}

impl ModelArchive {
    pub fn to_bytes(&self) -> Vec<u8> {
        let p = &self.parser;
        let bodies = [
            self.meta.to_text(),
            grammar_text(&p.grammar),
            p.grammar.head_rules().to_string(),
            p.dict.to_text(),
            p.models.model(Procedure::Tag).to_text(),
            p.models.model(Procedure::Chunk).to_text(),
            p.models.model(Procedure::Build).to_text(),
            p.models.model(Procedure::Check).to_text(),
        ];
        let mut out = format!("{MAGIC} {FORMAT_VERSION}\nmembers {}\n", MEMBERS.len());
        for (name, body) in MEMBERS.iter().zip(&bodies) {
            out.push_str(&format!("{name} {}\n", body.len()));
        }
        for body in &bodies {
            out.push_str(body);
        }
        out.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ModelArchive> {
        let text = std::str::from_utf8(bytes).map_err(|_| CliError::Archive("not UTF-8".into()))?;
        let mut rest = text;
        let mut line = || -> Result<&str> {
            let (l, tail) = rest
                .split_once('\n')
                .ok_or_else(|| CliError::Archive("truncated index".into()))?;
            rest = tail;
            Ok(l)
        };
        let header = line()?;
        match header.split_once(' ') {
            Some((MAGIC, v)) if v == FORMAT_VERSION.to_string() => {}
            Some((MAGIC, v)) => {
                return Err(CliError::Archive(format!(
                    "format version {v} is not supported (expected {FORMAT_VERSION})"
                )))
            }
            _ => return Err(CliError::Archive(format!("not a model archive (header {header:?})"))),
        }
        if line()? != format!("members {}", MEMBERS.len()) {
            return Err(CliError::Archive("unexpected member count".into()));
        }
        let mut sizes = Vec::with_capacity(MEMBERS.len());
        for name in MEMBERS {
            let l = line()?;
            let size = l
                .strip_prefix(name)
                .and_then(|s| s.strip_prefix(' '))
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| CliError::Archive(format!("expected index entry for {name}, found {l:?}")))?;
            sizes.push(size);
        }
        let mut bodies = Vec::with_capacity(MEMBERS.len());
        for (name, size) in MEMBERS.iter().zip(sizes) {
            if rest.len() < size || !rest.is_char_boundary(size) {
                return Err(CliError::Archive(format!("member {name} is truncated")));
            }
            let (body, tail) = rest.split_at(size);
            bodies.push(body);
            rest = tail;
        }
        if !rest.is_empty() {
            return Err(CliError::Archive("trailing bytes after the last member".into()));
        }
        let meta = TrainMeta::parse(bodies[0])?;
        let rules = HeadRules::parse(bodies[2]).map_err(member("headrules"))?;
        let grammar = parse_grammar(bodies[1], rules)?;
        let dict = TagDictionary::parse(bodies[3]).map_err(member("tagdict"))?;
        let mut models = Vec::with_capacity(4);
        for (k, p) in Procedure::ALL.into_iter().enumerate() {
            let m = MaxentModel::parse(bodies[4 + k]).map_err(member(MEMBERS[4 + k]))?;
            if m.procedure() != p {
                return Err(CliError::Archive(format!("{} holds a {} model", MEMBERS[4 + k], m.procedure())));
            }
            models.push(m);
        }
        let models = ModelSet::new(models).map_err(member("models"))?;
        Ok(ModelArchive {
            meta,
            parser: Parser { grammar, dict, models },
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(CliError::io(path))
    }

    pub fn load(path: &Path) -> Result<ModelArchive> {
        let bytes = std::fs::read(path).map_err(CliError::io(path))?;
        ModelArchive::from_bytes(&bytes)
    }
}
