use super::reader::Raw;
use super::{HeadRules, ParseTree};
use crate::error::{Error, Result};

const EMPTY_ELEMENT: &str = "-NONE-";
const QUOTE_TAGS: [&str; 2] = ["``", "''"];

/// Strips function tags and coreference indices: `NP-SBJ-1` → `NP`, `NP=2` → `NP`.
///
/// Labels that begin with `-` (`-NONE-`, `-LRB-`) are left alone.
pub fn normalize_label(label: &str) -> &str {
    match label.char_indices().skip(1).find(|&(_, c)| c == '-' || c == '=') {
        Some((i, _)) if !label.starts_with('-') => &label[..i],
        _ => label,
    }
}

/// Removes function tags, empty elements and quotation marks, prunes
/// constituents left without children, and recomputes spans and heads.
pub fn normalize_tree(tree: &ParseTree, rules: &HeadRules) -> Result<ParseTree> {
    let raw = strip(&Raw::from_tree(tree)).ok_or(Error::VacuousTree)?;
    Ok(raw.build(0, rules))
}

fn strip(raw: &Raw) -> Option<Raw> {
    match raw {
        Raw::Leaf { tag, word } => {
            if tag == EMPTY_ELEMENT || QUOTE_TAGS.contains(&tag.as_str()) {
                None
            } else {
                Some(Raw::Leaf {
                    tag: normalize_label(tag).to_owned(),
                    word: word.clone(),
                })
            }
        }
        Raw::Node { label, children } => {
            let children: Vec<Raw> = children.iter().filter_map(strip).collect();
            (!children.is_empty()).then(|| Raw::Node {
                label: normalize_label(label).to_owned(),
                children,
            })
        }
    }
}
