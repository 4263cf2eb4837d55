//! Top-K breadth-first search over derivations.
//!
//! Partial derivations are kept in one heap per derivation length. Each
//! round takes the `K` best derivations from the longest non-empty heap and
//! extends them with the most probable legal actions, keeping just enough
//! actions to cover probability mass `Q`. Finished derivations are collected
//! until `M` parses are found or every heap is empty.

mod tagdict;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use crate::context::predicates;
use crate::derivation::{Action, Derivation, Grammar, ParserState, Phase};
use crate::error::{Error, Result};
use crate::maxent::ModelSet;
use crate::scalar::Scalar;
use crate::treebank::ParseTree;

pub use self::tagdict::TagDictionary;

/// Search parameters: beam width `k`, number of parses `m`, mass threshold `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig<F> {
    pub k: usize,
    pub m: usize,
    pub q: F,
}

impl<F: Scalar> Default for SearchConfig<F> {
    fn default() -> Self {
        SearchConfig {
            k: 20,
            m: 20,
            q: F::from_f64_lossy(0.95),
        }
    }
}

impl<F: Scalar> SearchConfig<F> {
    pub fn new(k: usize, m: usize, q: F) -> Result<Self> {
        let cfg = SearchConfig { k, m, q };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("M must be at least 1".into()));
        }
        if !(self.q > F::zero() && self.q <= F::one()) {
            return Err(Error::InvalidConfig(format!("Q = {} is outside (0, 1]", self.q)));
        }
        Ok(())
    }
}

/// Number of top actions to keep from `q_values` (sorted descending): the
/// largest `m` whose leading `m` values sum to less than `threshold`, but at
/// least 1. With `threshold >= 1` every positive value is kept.
pub fn mass_cutoff<F: Scalar>(q_values: &[F], threshold: F) -> usize {
    if q_values.is_empty() {
        return 0;
    }
    if threshold >= F::one() {
        return q_values.iter().filter(|&&q| q > F::zero()).count().max(1);
    }
    let mut sum = F::zero();
    let mut m = 0;
    for &q in q_values {
        sum = sum + q;
        if sum < threshold {
            m += 1;
        } else {
            break;
        }
    }
    m.max(1)
}

struct Step<F> {
    action: Action,
    q: F,
    prev: Option<Arc<Step<F>>>,
}

/// A partial derivation under search.
#[derive(Clone)]
pub struct Hypothesis<F> {
    state: ParserState,
    log_score: F,
    len: usize,
    last: Option<Arc<Step<F>>>,
}

impl<F: Scalar> Hypothesis<F> {
    pub fn initial<S: AsRef<str>>(tokens: &[S]) -> Result<Self> {
        Ok(Hypothesis {
            state: ParserState::initial(tokens)?,
            log_score: F::zero(),
            len: 0,
            last: None,
        })
    }

    pub fn state(&self) -> &ParserState {
        &self.state
    }

    /// `Σ ln q` of the actions so far.
    pub fn log_score(&self) -> F {
        self.log_score
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_complete(&self) -> bool {
        self.state.is_complete()
    }

    /// Actions with their `q` values, first to last.
    pub fn steps(&self) -> Vec<(Action, F)> {
        let mut out = Vec::with_capacity(self.len);
        let mut cur = self.last.as_deref();
        while let Some(step) = cur {
            out.push((step.action.clone(), step.q));
            cur = step.prev.as_deref();
        }
        out.reverse();
        out
    }

    pub fn actions(&self) -> Vec<Action> {
        self.steps().into_iter().map(|(a, _)| a).collect()
    }

    /// Lexicographic order of the action sequences. Equal-length sequences
    /// are compared back to their shared prefix only.
    fn cmp_actions(&self, other: &Self) -> Ordering {
        if self.len != other.len {
            return self.actions().cmp(&other.actions());
        }
        let (mut a, mut b) = (self.last.as_ref(), other.last.as_ref());
        let mut order = Ordering::Equal;
        while let (Some(x), Some(y)) = (a, b) {
            if Arc::ptr_eq(x, y) {
                break;
            }
            let o = x.action.cmp(&y.action);
            if o != Ordering::Equal {
                order = o;
            }
            a = x.prev.as_ref();
            b = y.prev.as_ref();
        }
        order
    }

    fn extend(&self, action: Action, log_q: F, grammar: &Grammar) -> Self {
        let mut state = self.state.clone();
        state.apply_legal(&action, grammar);
        Hypothesis {
            state,
            log_score: self.log_score + log_q,
            len: self.len + 1,
            last: Some(Arc::new(Step {
                action,
                q: log_q.exp(),
                prev: self.last.clone(),
            })),
        }
    }

    fn into_parse(self) -> ScoredParse<F> {
        let tree = self.state.tree().expect("complete state");
        let steps = self.steps();
        let tokens = self.state.tokens().iter().map(|t| t.to_string()).collect();
        let (actions, q_values) = steps.into_iter().unzip();
        ScoredParse {
            tree,
            derivation: Derivation::new(tokens, actions),
            q_values,
            log_score: self.log_score,
        }
    }
}

/// Higher score first; equal scores by action sequence, smaller first.
fn compare<F: Scalar>(a: &Hypothesis<F>, b: &Hypothesis<F>) -> Ordering {
    match b.log_score.partial_cmp(&a.log_score) {
        Some(Ordering::Equal) | None => a.cmp_actions(b),
        Some(o) => o,
    }
}

/// Max-heap entry: the best hypothesis compares greatest.
struct Ranked<F>(Hypothesis<F>);

impl<F: Scalar> PartialEq for Ranked<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<F: Scalar> Eq for Ranked<F> {}

impl<F: Scalar> PartialOrd for Ranked<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Scalar> Ord for Ranked<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(&other.0, &self.0)
    }
}

/// The children of `hyp` worth keeping: legal actions (tags restricted by
/// the dictionary), ranked by `q`, cut to cover mass `threshold`.
pub fn advance<F: Scalar>(
    hyp: &Hypothesis<F>,
    models: &ModelSet<F>,
    grammar: &Grammar,
    dict: &TagDictionary,
    threshold: F,
) -> Vec<Hypothesis<F>> {
    let state = &hyp.state;
    let mut legal = state.legal_actions(grammar);
    if state.phase() == Phase::Tag {
        let word = &state.tokens()[state.cursor()];
        legal.retain(|a| matches!(a, Action::Tag(t) if dict.allows(word, t)));
    }
    if legal.is_empty() {
        return Vec::new();
    }
    let procedure = legal[0].procedure();
    let model = models.model(procedure);
    let log_q = model.log_distribution(&predicates(state, dict));
    let mut ranked: Vec<(F, F, Action)> = legal
        .into_iter()
        .filter_map(|a| {
            let lq = log_q[model.action_id(&a)?];
            let q = lq.exp();
            (q > F::zero()).then_some((q, lq, a))
        })
        .collect();
    ranked.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(Ordering::Equal).then_with(|| x.2.cmp(&y.2)));
    let qs: Vec<F> = ranked.iter().map(|r| r.0).collect();
    let m = mass_cutoff(&qs, threshold);
    ranked.truncate(m);
    ranked
        .into_iter()
        .map(|(_, lq, a)| hyp.extend(a, lq, grammar))
        .collect()
}

/// A complete parse with its derivation and score.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredParse<F> {
    pub tree: ParseTree,
    pub derivation: Derivation,
    /// `q(a_i | b_i)` of each action.
    pub q_values: Vec<F>,
    /// `Σ ln q(a_i | b_i)`.
    pub log_score: F,
}

impl<F: Scalar> ScoredParse<F> {
    /// Product of the action probabilities.
    pub fn score(&self) -> F {
        self.log_score.exp()
    }
}

/// Result of searching one sentence.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome<F> {
    /// Up to `M` parses, best first.
    Parsed(Vec<ScoredParse<F>>),
    /// Every derivation was pruned or reached a dead end.
    NoParse,
}

impl<F> SearchOutcome<F> {
    pub fn parses(&self) -> &[ScoredParse<F>] {
        match self {
            SearchOutcome::Parsed(p) => p,
            SearchOutcome::NoParse => &[],
        }
    }

    pub fn into_parses(self) -> Vec<ScoredParse<F>> {
        match self {
            SearchOutcome::Parsed(p) => p,
            SearchOutcome::NoParse => Vec::new(),
        }
    }

    pub fn best(&self) -> Option<&ScoredParse<F>> {
        self.parses().first()
    }

    pub fn is_no_parse(&self) -> bool {
        matches!(self, SearchOutcome::NoParse)
    }
}

/// Top-K breadth-first search for up to `cfg.m` parses of `tokens`.
pub fn top_k_bfs<F: Scalar, S: AsRef<str>>(
    tokens: &[S],
    models: &ModelSet<F>,
    grammar: &Grammar,
    dict: &TagDictionary,
    cfg: &SearchConfig<F>,
) -> Result<SearchOutcome<F>> {
    cfg.validate()?;
    let root = Hypothesis::initial(tokens)?;
    let mut heaps: Vec<BinaryHeap<Ranked<F>>> = vec![BinaryHeap::new()];
    heaps[0].push(Ranked(root));
    let mut complete: Vec<Hypothesis<F>> = Vec::new();
    while complete.len() < cfg.m {
        let Some(i) = heaps.iter().rposition(|h| !h.is_empty()) else {
            break;
        };
        let size = cfg.k.min(heaps[i].len());
        let popped: Vec<Hypothesis<F>> = (0..size).filter_map(|_| heaps[i].pop()).map(|r| r.0).collect();
        if heaps.len() == i + 1 {
            heaps.push(BinaryHeap::new());
        }
        for hyp in &popped {
            for child in advance(hyp, models, grammar, dict, cfg.q) {
                if child.is_complete() {
                    complete.push(child);
                } else {
                    heaps[i + 1].push(Ranked(child));
                }
            }
        }
    }
    if complete.is_empty() {
        return Ok(SearchOutcome::NoParse);
    }
    complete.sort_by(compare);
    complete.truncate(cfg.m);
    Ok(SearchOutcome::Parsed(complete.into_iter().map(Hypothesis::into_parse).collect()))
}

#[cfg(test)]
mod tests;
