use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const FORMAT_VERSION: u32 = 1;
const STANDARD_TABLE: &str = include_str!("../../data/head_rules.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadRule {
    pub direction: Direction,
    pub priorities: Vec<String>,
}

/// Per-label head-percolation rules with a leftmost-child fallback.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HeadRules {
    rules: BTreeMap<String, HeadRule>,
}

impl HeadRules {
    /// The table shipped in `data/head_rules.txt`.
    pub fn standard() -> &'static HeadRules {
        static RULES: OnceLock<HeadRules> = OnceLock::new();
        RULES.get_or_init(|| HeadRules::parse(STANDARD_TABLE).expect("shipped head-rule table parses"))
    }

    pub fn parse(text: &str) -> Result<HeadRules> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, header)) if header == format!("headrules {FORMAT_VERSION}") => {}
            Some((n, header)) => {
                return Err(Error::HeadRules(format!(
                    "line {n}: expected header \"headrules {FORMAT_VERSION}\", found {header:?}"
                )))
            }
            None => return Err(Error::HeadRules("missing header".into())),
        }
        let mut rules = BTreeMap::new();
        for (n, line) in lines {
            let mut fields = line.split_whitespace();
            let parent = fields.next().expect("non-empty line");
            let direction = match fields.next() {
                Some("left") => Direction::LeftToRight,
                Some("right") => Direction::RightToLeft,
                other => {
                    return Err(Error::HeadRules(format!("line {n}: bad direction {other:?}")));
                }
            };
            let priorities = fields.map(str::to_owned).collect();
            if rules.insert(parent.to_owned(), HeadRule { direction, priorities }).is_some() {
                return Err(Error::HeadRules(format!("line {n}: duplicate rule for {parent}")));
            }
        }
        Ok(HeadRules { rules })
    }

    pub fn rule(&self, label: &str) -> Option<&HeadRule> {
        self.rules.get(label)
    }

    /// Index of the head among children with the given labels.
    pub fn find_head(&self, label: &str, children: &[&str]) -> usize {
        debug_assert!(!children.is_empty());
        if children.len() == 1 {
            return 0;
        }
        let Some(rule) = self.rules.get(label) else {
            return 0;
        };
        for wanted in &rule.priorities {
            let hit = match rule.direction {
                Direction::LeftToRight => children.iter().position(|c| c == wanted),
                Direction::RightToLeft => children.iter().rposition(|c| c == wanted),
            };
            if let Some(i) = hit {
                return i;
            }
        }
        0
    }
}

impl fmt::Display for HeadRules {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "headrules {FORMAT_VERSION}")?;
        for (parent, rule) in &self.rules {
            let dir = match rule.direction {
                Direction::LeftToRight => "left",
                Direction::RightToLeft => "right",
            };
            write!(f, "{parent} {dir}")?;
            for p in &rule.priorities {
                write!(f, " {p}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
