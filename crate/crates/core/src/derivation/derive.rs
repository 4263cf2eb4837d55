use super::action::{Action, Annotation, ChunkTag, Label};
use super::state::{Grammar, ParserState, Phase};
use crate::error::{Error, Result};
use crate::treebank::ParseTree;

/// A sentence and the action sequence applied to it from the initial state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    tokens: Vec<String>,
    actions: Vec<Action>,
}

impl Derivation {
    pub fn new(tokens: Vec<String>, actions: Vec<Action>) -> Derivation {
        Derivation { tokens, actions }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Each action paired with the state it was applied to.
    pub fn steps(&self, grammar: &Grammar) -> Result<Vec<(Action, ParserState)>> {
        let mut state = ParserState::initial(&self.tokens)?;
        let mut out = Vec::with_capacity(self.actions.len());
        for a in &self.actions {
            let next = state.apply(a, grammar)?;
            out.push((a.clone(), std::mem::replace(&mut state, next)));
        }
        Ok(out)
    }

    /// State reached by applying every action.
    pub fn final_state(&self, grammar: &Grammar) -> Result<ParserState> {
        let mut state = ParserState::initial(&self.tokens)?;
        for a in &self.actions {
            state = state.apply(a, grammar)?;
        }
        Ok(state)
    }

    /// The tree built by the derivation; fails unless it is complete.
    pub fn replay(&self, grammar: &Grammar) -> Result<ParseTree> {
        self.final_state(grammar)?
            .tree()
            .ok_or_else(|| Error::Underivable("derivation does not complete a parse".into()))
    }
}

struct GoldNode<'a> {
    tree: &'a ParseTree,
    parent: Option<usize>,
    position: usize,
    siblings: usize,
}

fn index_tree<'a>(tree: &'a ParseTree, parent: Option<usize>, position: usize, siblings: usize, out: &mut Vec<GoldNode<'a>>) {
    let id = out.len();
    out.push(GoldNode {
        tree,
        parent,
        position,
        siblings,
    });
    let n = tree.children().len();
    for (i, c) in tree.children().iter().enumerate() {
        index_tree(c, Some(id), i, n, out);
    }
}

/// The unique derivation whose replay rebuilds `gold`.
///
/// `gold` must span `[0, n)` and use tags and labels known to `grammar`.
/// Trees the procedures cannot produce (a bare preterminal, a unary
/// constituent above a full-span one, too deep unary chains) are reported as
/// [`Error::Underivable`].
pub fn derive(gold: &ParseTree, grammar: &Grammar) -> Result<Derivation> {
    let underivable = |why: String| Error::Underivable(format!("{why}: {gold}"));
    if gold.is_leaf() {
        return Err(underivable("a lone preterminal has no constituent".into()));
    }
    let tokens: Vec<String> = gold.words().into_iter().map(str::to_owned).collect();
    let mut nodes = Vec::new();
    index_tree(gold, None, 0, 1, &mut nodes);
    let leaves: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].tree.is_leaf()).collect();
    let label_of = |id: usize| Label::from(nodes[id].tree.label());
    let flat_parent = |leaf: usize| nodes[leaf].parent.filter(|&p| nodes[p].tree.is_flat());

    let mut state = ParserState::initial(&tokens)?;
    let mut actions = Vec::new();
    let mut step = |state: &mut ParserState, a: Action| -> Result<()> {
        *state = state.apply(&a, grammar).map_err(|e| underivable(e.to_string()))?;
        actions.push(a);
        Ok(())
    };

    for &l in &leaves {
        step(&mut state, Action::Tag(label_of(l)))?;
    }
    // Forest position -> gold node, maintained alongside the state.
    let mut forest_ids: Vec<usize> = Vec::new();
    for &l in &leaves {
        let tag = match flat_parent(l) {
            Some(p) if nodes[l].position == 0 => {
                forest_ids.push(p);
                ChunkTag::Start(label_of(p))
            }
            Some(p) => ChunkTag::Join(label_of(p)),
            None => {
                forest_ids.push(l);
                ChunkTag::Other
            }
        };
        step(&mut state, Action::Chunk(tag))?;
    }

    while !state.is_complete() {
        debug_assert_eq!(state.phase(), Phase::Build);
        let cursor = state.cursor();
        let g = *forest_ids
            .get(cursor)
            .ok_or_else(|| underivable("no tree left to build on".into()))?;
        let parent = nodes[g]
            .parent
            .ok_or_else(|| underivable("root formed before the parse terminated".into()))?;
        let annotation = if nodes[g].position == 0 {
            Annotation::Start(label_of(parent))
        } else {
            Annotation::Join(label_of(parent))
        };
        step(&mut state, Action::Build(annotation))?;
        let complete = nodes[g].position + 1 == nodes[g].siblings;
        let first = state.proposed_constituent().map(|p| p.first);
        step(&mut state, Action::Check(complete))?;
        if complete {
            let first = first.expect("check turn has a proposal");
            forest_ids.splice(first..=cursor, [parent]);
        }
    }

    let derivation = Derivation { tokens, actions };
    let rebuilt = state.tree().expect("complete state has a tree");
    if rebuilt != gold.with_head_rules(grammar.head_rules()) {
        return Err(underivable(format!("replay yields {rebuilt}")));
    }
    Ok(derivation)
}
