use std::collections::BTreeSet;
use std::sync::Arc;

use super::action::{Action, Annotation, ChunkTag, Label};
use crate::error::{Error, Result};
use crate::treebank::{HeadRules, ParseTree, Span};

/// Deepest stack of unary constituents `CHECK Yes` may create over one tree.
pub const MAX_UNARY_DEPTH: usize = 3;

/// Tag and label inventories plus the head rules used when constituents form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    tags: Vec<Label>,
    labels: Vec<Label>,
    head_rules: HeadRules,
}

impl Grammar {
    pub fn new<T, L>(tags: T, labels: L, head_rules: HeadRules) -> Grammar
    where
        T: IntoIterator,
        T::Item: AsRef<str>,
        L: IntoIterator,
        L::Item: AsRef<str>,
    {
        let sorted = |it: Vec<String>| -> Vec<Label> {
            it.into_iter()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .map(Label::from)
                .collect()
        };
        Grammar {
            tags: sorted(tags.into_iter().map(|t| t.as_ref().to_owned()).collect()),
            labels: sorted(labels.into_iter().map(|l| l.as_ref().to_owned()).collect()),
            head_rules,
        }
    }

    /// Inventories observed in `trees`, with the standard head rules.
    pub fn from_trees<'a>(trees: impl IntoIterator<Item = &'a ParseTree>) -> Grammar {
        let mut tags = BTreeSet::new();
        let mut labels = BTreeSet::new();
        for t in trees {
            for n in t.preorder() {
                if n.is_leaf() {
                    tags.insert(n.label().to_owned());
                } else {
                    labels.insert(n.label().to_owned());
                }
            }
        }
        Grammar::new(tags, labels, HeadRules::standard().clone())
    }

    pub fn tags(&self) -> &[Label] {
        &self.tags
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn head_rules(&self) -> &HeadRules {
        &self.head_rules
    }

    fn has_tag(&self, t: &str) -> bool {
        self.tags.binary_search_by(|x| (**x).cmp(t)).is_ok()
    }

    fn has_label(&self, l: &str) -> bool {
        self.labels.binary_search_by(|x| (**x).cmp(l)).is_ok()
    }
}

/// Immutable node of the parser's forest; subtrees are shared between states.
#[derive(Debug)]
pub struct Node {
    label: Label,
    span: Span,
    head: usize,
    head_child: usize,
    children: Vec<Arc<Node>>,
}

impl Node {
    fn preterminal(tag: Label, position: usize) -> Node {
        Node {
            label: tag,
            span: Span::new(position, position + 1),
            head: position,
            head_child: 0,
            children: Vec::new(),
        }
    }

    fn constituent(label: Label, children: Vec<Arc<Node>>, rules: &HeadRules) -> Node {
        let labels: Vec<&str> = children.iter().map(|c| &*c.label).collect();
        let head_child = rules.find_head(&label, &labels);
        Node {
            span: Span::new(children[0].span.start, children[children.len() - 1].span.end),
            head: children[head_child].head,
            head_child,
            label,
            children,
        }
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn span(&self) -> Span {
        self.span
    }

    /// Token index of the head word.
    pub fn head(&self) -> usize {
        self.head
    }

    pub fn children(&self) -> &[Arc<Node>] {
        &self.children
    }

    pub fn is_preterminal(&self) -> bool {
        self.children.is_empty()
    }

    /// Number of stacked single-child constituents starting at this node.
    pub fn unary_depth(&self) -> usize {
        match self.children.as_slice() {
            [only] if !only.is_preterminal() => 1 + only.unary_depth(),
            _ => 0,
        }
    }

    pub fn to_tree(&self, tokens: &[Label]) -> ParseTree {
        if self.is_preterminal() {
            ParseTree::leaf(&*self.label, &*tokens[self.span.start], self.span.start)
        } else {
            let children = self.children.iter().map(|c| c.to_tree(tokens)).collect();
            ParseTree::node_with_head(&*self.label, children, self.head_child)
        }
    }
}

/// A forest tree and the annotation `BUILD` gave it, if any.
#[derive(Clone, Debug)]
pub struct ForestTree {
    pub node: Arc<Node>,
    pub annotation: Option<Annotation>,
}

/// Which procedure acts next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Tag,
    Chunk,
    Build,
    Check,
    Complete,
}

/// The run of trees `CHECK` is asked about: `Start X` followed by `Join X`s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proposal {
    pub label: Label,
    /// Forest indices `first..=last`.
    pub first: usize,
    pub last: usize,
    pub span: Span,
}

/// Persistent stack; clones share every element.
#[derive(Debug)]
struct Link<T> {
    value: T,
    prev: Option<Arc<Link<T>>>,
}

#[derive(Debug)]
struct Stack<T> {
    top: Option<Arc<Link<T>>>,
    len: usize,
}

impl<T> Clone for Stack<T> {
    fn clone(&self) -> Self {
        Stack {
            top: self.top.clone(),
            len: self.len,
        }
    }
}

impl<T> Stack<T> {
    fn new() -> Self {
        Stack { top: None, len: 0 }
    }

    fn push(&mut self, value: T) {
        let prev = self.top.take();
        self.top = Some(Arc::new(Link { value, prev }));
        self.len += 1;
    }

    fn peek(&self) -> Option<&T> {
        self.top.as_deref().map(|l| &l.value)
    }

    /// Top to bottom.
    fn iter(&self) -> impl Iterator<Item = &T> {
        std::iter::successors(self.top.as_deref(), |l| l.prev.as_deref()).map(|l| &l.value)
    }

    /// Element `i`, counting from the bottom.
    fn get(&self, i: usize) -> Option<&T> {
        if i >= self.len {
            return None;
        }
        self.iter().nth(self.len - 1 - i)
    }

    fn pop(&mut self) -> Option<T>
    where
        T: Clone,
    {
        let link = self.top.take()?;
        self.top = link.prev.clone();
        self.len -= 1;
        Some(match Arc::try_unwrap(link) {
            Ok(l) => l.value,
            Err(l) => l.value.clone(),
        })
    }

    /// Bottom to top.
    fn to_vec(&self) -> Vec<T>
    where
        T: Clone,
    {
        let mut v: Vec<T> = self.iter().cloned().collect();
        v.reverse();
        v
    }
}

/// Per-word annotations: a persistent stack while its pass runs, one shared
/// array afterwards.
#[derive(Debug)]
enum Seq<T> {
    Growing(Stack<T>),
    Frozen(Arc<[T]>),
}

impl<T> Clone for Seq<T> {
    fn clone(&self) -> Self {
        match self {
            Seq::Growing(s) => Seq::Growing(s.clone()),
            Seq::Frozen(a) => Seq::Frozen(a.clone()),
        }
    }
}

impl<T: Clone> Seq<T> {
    fn get(&self, i: usize) -> Option<&T> {
        match self {
            Seq::Growing(s) => s.get(i),
            Seq::Frozen(a) => a.get(i),
        }
    }

    fn last(&self) -> Option<&T> {
        match self {
            Seq::Growing(s) => s.peek(),
            Seq::Frozen(a) => a.last(),
        }
    }

    fn push(&mut self, value: T) {
        match self {
            Seq::Growing(s) => s.push(value),
            Seq::Frozen(_) => unreachable!("push after the pass ended"),
        }
    }

    fn freeze(&mut self) {
        if let Seq::Growing(s) = self {
            *self = Seq::Frozen(s.to_vec().into());
        }
    }

    fn to_vec(&self) -> Vec<T> {
        match self {
            Seq::Growing(s) => s.to_vec(),
            Seq::Frozen(a) => a.to_vec(),
        }
    }

    fn as_slice(&self) -> &[T] {
        match self {
            Seq::Growing(_) => unreachable!("slice of an unfinished pass"),
            Seq::Frozen(a) => a,
        }
    }
}

/// Partial parse: the sentence, the annotations made so far and the forest.
///
/// Clones are cheap: all history is shared between a state and its successors.
#[derive(Clone, Debug)]
pub struct ParserState {
    tokens: Arc<[Label]>,
    tags: Seq<Label>,
    chunk_tags: Seq<ChunkTag>,
    /// Forest trees left of the cursor, nearest on top.
    done: Stack<ForestTree>,
    /// Forest tree at the cursor.
    focus: Option<ForestTree>,
    /// Chunker output; `pending[next..]` lies right of the cursor.
    pending: Arc<[ForestTree]>,
    next: usize,
    cursor: usize,
    phase: Phase,
}

impl ParserState {
    pub fn initial<S: AsRef<str>>(tokens: &[S]) -> Result<ParserState> {
        if tokens.is_empty() {
            return Err(Error::EmptySentence);
        }
        Ok(ParserState {
            tokens: tokens.iter().map(|t| Label::from(t.as_ref())).collect(),
            tags: Seq::Growing(Stack::new()),
            chunk_tags: Seq::Growing(Stack::new()),
            done: Stack::new(),
            focus: None,
            pending: Arc::new([]),
            next: 0,
            cursor: 0,
            phase: Phase::Tag,
        })
    }

    pub fn tokens(&self) -> &[Label] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tags assigned so far.
    pub fn tags(&self) -> Vec<Label> {
        self.tags.to_vec()
    }

    pub fn tag(&self, i: usize) -> Option<&Label> {
        self.tags.get(i)
    }

    /// Chunk tags assigned so far.
    pub fn chunk_tags(&self) -> Vec<ChunkTag> {
        self.chunk_tags.to_vec()
    }

    pub fn chunk_tag(&self, i: usize) -> Option<&ChunkTag> {
        self.chunk_tags.get(i)
    }

    /// The current forest, left to right. Empty before pass 3.
    pub fn forest(&self) -> Vec<ForestTree> {
        let mut v = self.done.to_vec();
        v.extend(self.focus.iter().cloned());
        v.extend(self.pending[self.next..].iter().cloned());
        v
    }

    pub fn forest_len(&self) -> usize {
        self.done.len + usize::from(self.focus.is_some()) + self.pending.len() - self.next
    }

    /// Forest tree `offset` positions from the cursor.
    pub fn tree_at(&self, offset: isize) -> Option<&ForestTree> {
        match offset {
            0 => self.focus.as_ref(),
            o if o < 0 => self.done.iter().nth((-o - 1) as usize),
            o => self.pending.get(self.next + o as usize - 1),
        }
    }

    /// Forest trees `first..=last`, which must not lie right of the cursor.
    pub fn trees(&self, first: usize, last: usize) -> Vec<&ForestTree> {
        assert!(first <= last && last <= self.cursor, "trees right of the cursor");
        let mut v: Vec<&ForestTree> = Vec::with_capacity(last - first + 1);
        if last == self.cursor {
            v.extend(self.focus.as_ref());
        }
        let below = self.cursor.min(last + 1);
        v.extend(self.done.iter().skip(self.cursor - below).take(below - first));
        v.reverse();
        v
    }

    /// Next word (passes 1–2) or leftmost unannotated tree (pass 3).
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    fn root(&self) -> &Node {
        &self.focus.as_ref().expect("complete state has a root").node
    }

    /// Pass number 1–3; a complete state reports the pass it finished in.
    pub fn pass(&self) -> u8 {
        match self.phase {
            Phase::Tag => 1,
            Phase::Chunk => 2,
            Phase::Build | Phase::Check => 3,
            // CHECK never accepts a flat proposal, so a flat root was chunked.
            Phase::Complete if self.root().children.iter().all(|c| c.is_preterminal()) => 2,
            Phase::Complete => 3,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.phase == Phase::Complete
    }

    /// The finished tree of a complete state.
    pub fn tree(&self) -> Option<ParseTree> {
        self.is_complete().then(|| self.root().to_tree(&self.tokens))
    }

    /// Trees of the current forest, annotations dropped.
    pub fn forest_trees(&self) -> Vec<ParseTree> {
        self.forest().iter().map(|t| t.node.to_tree(&self.tokens)).collect()
    }

    /// The rightmost `Start X, Join X, ...` run, during a `CHECK` turn.
    pub fn proposed_constituent(&self) -> Option<Proposal> {
        if self.phase != Phase::Check {
            return None;
        }
        let last = self.focus.as_ref()?;
        let label = last.annotation.as_ref()?.label().clone();
        let (first, start) = if last.annotation.as_ref()?.is_start() {
            (self.cursor, last.node.span.start)
        } else {
            self.run_start()?
        };
        Some(Proposal {
            label,
            first,
            last: self.cursor,
            span: Span::new(start, last.node.span.end),
        })
    }

    /// Forest index and first token of the nearest `Start` left of the cursor.
    fn run_start(&self) -> Option<(usize, usize)> {
        for (k, t) in self.done.iter().enumerate() {
            if t.annotation.as_ref()?.is_start() {
                return Some((self.cursor - 1 - k, t.node.span.start));
            }
        }
        None
    }

    /// The incomplete run a `BUILD` on the cursor tree could join: label and
    /// forest indices `first..cursor`.
    pub fn joinable_run(&self) -> Option<(Label, usize)> {
        if self.phase != Phase::Build {
            return None;
        }
        let label = self.done.peek()?.annotation.as_ref()?.label().clone();
        Some((label, self.run_start()?.0))
    }

    /// First token of the run the cursor tree could join.
    pub fn joinable_run_start(&self) -> Option<usize> {
        self.joinable_run().and_then(|_| self.run_start()).map(|(_, start)| start)
    }

    /// Actions the next procedure may take, in a fixed order.
    ///
    /// # Panics
    ///
    /// On a complete state.
    pub fn legal_actions(&self, grammar: &Grammar) -> Vec<Action> {
        assert!(!self.is_complete(), "legal_actions called on a complete state");
        match self.phase {
            Phase::Tag => grammar.tags.iter().cloned().map(Action::Tag).collect(),
            Phase::Chunk => {
                let mut out: Vec<Action> = grammar
                    .labels
                    .iter()
                    .cloned()
                    .map(|x| Action::Chunk(ChunkTag::Start(x)))
                    .collect();
                if let Some(x) = self.open_chunk_label() {
                    out.push(Action::Chunk(ChunkTag::Join(x.clone())));
                }
                out.push(Action::Chunk(ChunkTag::Other));
                out
            }
            Phase::Build => {
                if self.focus.is_none() {
                    return Vec::new();
                }
                let mut out: Vec<Action> = grammar
                    .labels
                    .iter()
                    .cloned()
                    .map(|x| Action::Build(Annotation::Start(x)))
                    .collect();
                if let Some((x, _)) = self.joinable_run() {
                    out.push(Action::Build(Annotation::Join(x)));
                }
                out
            }
            Phase::Check => {
                let (yes, no) = self.check_options();
                let mut out = Vec::with_capacity(2);
                if no {
                    out.push(Action::Check(false));
                }
                if yes {
                    out.push(Action::Check(true));
                }
                out
            }
            Phase::Complete => unreachable!(),
        }
    }

    fn open_chunk_label(&self) -> Option<&Label> {
        match self.chunk_tags.last()? {
            ChunkTag::Start(x) | ChunkTag::Join(x) => Some(x),
            ChunkTag::Other => None,
        }
    }

    /// Whether `Yes` and `No` are available to `CHECK`.
    fn check_options(&self) -> (bool, bool) {
        let p = self.proposed_constituent().expect("check turn has a proposal");
        let run = self.trees(p.first, p.last);
        let flat = run.iter().all(|t| t.node.is_preterminal());
        let full = p.span == Span::new(0, self.tokens.len());
        let too_deep = p.first == p.last && 1 + run[0].node.unary_depth() > MAX_UNARY_DEPTH;
        let yes = !flat && !too_deep;
        // No on a full-span proposal, or with no tree left for BUILD, cannot complete.
        let no = !(full && !flat) && self.next < self.pending.len();
        (yes, no)
    }

    pub fn is_legal(&self, action: &Action, grammar: &Grammar) -> bool {
        match (self.phase, action) {
            (Phase::Tag, Action::Tag(t)) => grammar.has_tag(t),
            (Phase::Chunk, Action::Chunk(ChunkTag::Start(x))) => grammar.has_label(x),
            (Phase::Chunk, Action::Chunk(ChunkTag::Join(x))) => self.open_chunk_label() == Some(x),
            (Phase::Chunk, Action::Chunk(ChunkTag::Other)) => true,
            (Phase::Build, Action::Build(a)) => {
                self.focus.is_some()
                    && match a {
                        Annotation::Start(x) => grammar.has_label(x),
                        Annotation::Join(x) => self.joinable_run().is_some_and(|(y, _)| &y == x),
                    }
            }
            (Phase::Check, Action::Check(yes)) => {
                let (y, n) = self.check_options();
                if *yes {
                    y
                } else {
                    n
                }
            }
            _ => false,
        }
    }

    /// State after `action`; rejects actions that are not legal here.
    pub fn apply(&self, action: &Action, grammar: &Grammar) -> Result<ParserState> {
        if self.is_complete() {
            return Err(illegal(action, "the parse is already complete"));
        }
        if !self.is_legal(action, grammar) {
            return Err(illegal(action, &format!("not legal in {:?} phase at position {}", self.phase, self.cursor)));
        }
        let mut next = self.clone();
        next.apply_legal(action, grammar);
        Ok(next)
    }

    /// Applies an action already known to be legal.
    pub(crate) fn apply_legal(&mut self, action: &Action, grammar: &Grammar) {
        let n = self.tokens.len();
        match action {
            Action::Tag(t) => {
                self.tags.push(t.clone());
                self.cursor += 1;
                if self.cursor == n {
                    self.tags.freeze();
                    self.phase = Phase::Chunk;
                    self.cursor = 0;
                }
            }
            Action::Chunk(c) => {
                self.chunk_tags.push(c.clone());
                self.cursor += 1;
                if self.cursor == n {
                    self.chunk_tags.freeze();
                    self.detect_chunks(grammar);
                }
            }
            Action::Build(a) => {
                self.focus.as_mut().expect("build turn has a tree").annotation = Some(a.clone());
                self.phase = Phase::Check;
            }
            Action::Check(false) => {
                let t = self.focus.take().expect("check turn has a tree");
                self.done.push(t);
                self.focus = self.pending.get(self.next).cloned();
                self.next += 1;
                self.cursor += 1;
                self.phase = Phase::Build;
            }
            Action::Check(true) => {
                let p = self.proposed_constituent().expect("check turn has a proposal");
                let mut children = Vec::with_capacity(p.last - p.first + 1);
                children.push(self.focus.take().expect("check turn has a tree").node);
                for _ in p.first..p.last {
                    children.push(self.done.pop().expect("run lies left of the cursor").node);
                }
                children.reverse();
                let node = Node::constituent(p.label, children, &grammar.head_rules);
                let full = node.span == Span::new(0, n);
                self.focus = Some(ForestTree {
                    node: Arc::new(node),
                    annotation: None,
                });
                self.cursor = p.first;
                self.phase = if full { Phase::Complete } else { Phase::Build };
            }
        }
    }

    /// Groups `Start X, Join X...` runs into flat constituents and enters pass 3.
    fn detect_chunks(&mut self, grammar: &Grammar) {
        let mut forest: Vec<ForestTree> = Vec::new();
        let mut run: Vec<Arc<Node>> = Vec::new();
        let mut run_label: Option<Label> = None;
        let close = |run: &mut Vec<Arc<Node>>, label: &mut Option<Label>, forest: &mut Vec<ForestTree>| {
            if let Some(x) = label.take() {
                let node = Node::constituent(x, std::mem::take(run), &grammar.head_rules);
                forest.push(ForestTree {
                    node: Arc::new(node),
                    annotation: None,
                });
            }
        };
        let tags = self.tags.as_slice();
        for (i, (tag, chunk)) in tags.iter().zip(self.chunk_tags.as_slice()).enumerate() {
            let leaf = Arc::new(Node::preterminal(tag.clone(), i));
            match chunk {
                ChunkTag::Start(x) => {
                    close(&mut run, &mut run_label, &mut forest);
                    run_label = Some(x.clone());
                    run.push(leaf);
                }
                ChunkTag::Join(_) => run.push(leaf),
                ChunkTag::Other => {
                    close(&mut run, &mut run_label, &mut forest);
                    forest.push(ForestTree {
                        node: leaf,
                        annotation: None,
                    });
                }
            }
        }
        close(&mut run, &mut run_label, &mut forest);
        let single_chunk = forest.len() == 1 && !forest[0].node.is_preterminal();
        self.focus = Some(forest[0].clone());
        self.pending = forest.into();
        self.next = 1;
        self.cursor = 0;
        self.phase = if single_chunk { Phase::Complete } else { Phase::Build };
    }
}

fn illegal(action: &Action, reason: &str) -> Error {
    Error::IllegalAction {
        action: action.to_string(),
        reason: reason.to_owned(),
    }
}
