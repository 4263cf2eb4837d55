use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::Error;

/// Interned label or tag string; cheap to clone.
pub type Label = Arc<str>;

/// The four tree-building procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Procedure {
    Tag,
    Chunk,
    Build,
    Check,
}

impl Procedure {
    pub const ALL: [Procedure; 4] = [Procedure::Tag, Procedure::Chunk, Procedure::Build, Procedure::Check];

    pub fn name(self) -> &'static str {
        match self {
            Procedure::Tag => "tag",
            Procedure::Chunk => "chunk",
            Procedure::Build => "build",
            Procedure::Check => "check",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Procedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Procedure::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::ModelFormat(format!("unknown procedure {s:?}")))
    }
}

/// Chunk tag assigned to a word in the second pass.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChunkTag {
    Start(Label),
    Join(Label),
    Other,
}

/// Start/Join annotation placed on a tree by `BUILD`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Annotation {
    Start(Label),
    Join(Label),
}

impl Annotation {
    pub fn label(&self) -> &Label {
        match self {
            Annotation::Start(l) | Annotation::Join(l) => l,
        }
    }

    pub fn is_start(&self) -> bool {
        matches!(self, Annotation::Start(_))
    }
}

/// One step of a derivation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Tag(Label),
    Chunk(ChunkTag),
    Build(Annotation),
    Check(bool),
}

impl Action {
    pub fn procedure(&self) -> Procedure {
        match self {
            Action::Tag(_) => Procedure::Tag,
            Action::Chunk(_) => Procedure::Chunk,
            Action::Build(_) => Procedure::Build,
            Action::Check(_) => Procedure::Check,
        }
    }

    /// Payload without the procedure prefix, e.g. `Join VP` or `Yes`.
    pub fn payload(&self) -> String {
        match self {
            Action::Tag(t) => t.to_string(),
            Action::Chunk(ChunkTag::Start(x)) | Action::Build(Annotation::Start(x)) => format!("Start {x}"),
            Action::Chunk(ChunkTag::Join(x)) | Action::Build(Annotation::Join(x)) => format!("Join {x}"),
            Action::Chunk(ChunkTag::Other) => "Other".to_owned(),
            Action::Check(true) => "Yes".to_owned(),
            Action::Check(false) => "No".to_owned(),
        }
    }

    /// Inverse of [`Action::payload`] for a known procedure.
    pub fn from_payload(procedure: Procedure, payload: &str) -> Result<Action, Error> {
        let bad = || Error::ModelFormat(format!("bad {procedure} action {payload:?}"));
        let labeled = |s: &str| -> Option<(bool, Label)> {
            let (kind, x) = s.split_once(' ')?;
            if x.is_empty() || x.contains(char::is_whitespace) {
                return None;
            }
            match kind {
                "Start" => Some((true, Label::from(x))),
                "Join" => Some((false, Label::from(x))),
                _ => None,
            }
        };
        Ok(match procedure {
            Procedure::Tag if !payload.is_empty() && !payload.contains(char::is_whitespace) => {
                Action::Tag(Label::from(payload))
            }
            Procedure::Tag => return Err(bad()),
            Procedure::Chunk if payload == "Other" => Action::Chunk(ChunkTag::Other),
            Procedure::Chunk => match labeled(payload).ok_or_else(bad)? {
                (true, x) => Action::Chunk(ChunkTag::Start(x)),
                (false, x) => Action::Chunk(ChunkTag::Join(x)),
            },
            Procedure::Build => match labeled(payload).ok_or_else(bad)? {
                (true, x) => Action::Build(Annotation::Start(x)),
                (false, x) => Action::Build(Annotation::Join(x)),
            },
            Procedure::Check => match payload {
                "Yes" => Action::Check(true),
                "No" => Action::Check(false),
                _ => return Err(bad()),
            },
        })
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.procedure() {
            Procedure::Tag => "TAG",
            Procedure::Chunk => "CHUNK",
            Procedure::Build => "BUILD",
            Procedure::Check => "CHECK",
        };
        write!(f, "{kind} {}", self.payload())
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Action, Error> {
        let (kind, payload) = s
            .split_once(' ')
            .ok_or_else(|| Error::ModelFormat(format!("bad action {s:?}")))?;
        let procedure = match kind {
            "TAG" => Procedure::Tag,
            "CHUNK" => Procedure::Chunk,
            "BUILD" => Procedure::Build,
            "CHECK" => Procedure::Check,
            _ => return Err(Error::ModelFormat(format!("bad action {s:?}"))),
        };
        Action::from_payload(procedure, payload)
    }
}
