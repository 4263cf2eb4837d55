use std::collections::HashMap;
use std::fmt::Write as _;

use crate::context::{predicates, Predicate};
use crate::derivation::{Action, Derivation, Grammar, Procedure};
use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, Scalar};
use crate::search::TagDictionary;

const HEADER: &str = "mxparse-model 1";

/// A trained conditional model `p(a | b)` for one procedure.
///
/// Stores `α_j` exactly as written to the model file, plus `ln α_j` for
/// scoring, so a model read back from its file behaves bit-identically.
#[derive(Clone, Debug)]
pub struct MaxentModel<F> {
    procedure: Procedure,
    actions: Vec<Action>,
    action_index: HashMap<Action, usize>,
    predicates: Vec<Predicate>,
    predicate_index: HashMap<String, usize>,
    /// Features of predicate `i` are `offsets[i]..offsets[i + 1]`.
    offsets: Vec<usize>,
    feature_action: Vec<usize>,
    alphas: Vec<F>,
    log_alphas: Vec<F>,
    correction: usize,
}

impl<F: PartialEq> PartialEq for MaxentModel<F> {
    fn eq(&self, other: &Self) -> bool {
        self.procedure == other.procedure
            && self.actions == other.actions
            && self.predicates == other.predicates
            && self.offsets == other.offsets
            && self.feature_action == other.feature_action
            && self.alphas == other.alphas
            && self.correction == other.correction
    }
}

impl<F: Scalar> MaxentModel<F> {
    /// Builds a model from `(predicate, action, α)` triples.
    ///
    /// Actions must be listed in `actions`; a repeated `(predicate, action)`
    /// pair or an `α` outside `(0, ∞)` is an error.
    pub fn from_features(
        procedure: Procedure,
        actions: Vec<Action>,
        features: impl IntoIterator<Item = (Predicate, Action, F)>,
        correction: usize,
    ) -> Result<Self> {
        let mut actions = actions;
        actions.sort();
        actions.dedup();
        if let Some(a) = actions.iter().find(|a| a.procedure() != procedure) {
            return Err(Error::ModelFormat(format!("action {a} in a {procedure} model")));
        }
        let action_index: HashMap<Action, usize> = actions.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let mut triples = Vec::new();
        for (p, a, alpha) in features {
            let Some(&ai) = action_index.get(&a) else {
                return Err(Error::ModelFormat(format!("feature action {a} missing from the vocabulary")));
            };
            if !(alpha > F::zero() && alpha.is_finite()) {
                return Err(Error::ModelFormat(format!("parameter {alpha} outside (0, inf)")));
            }
            triples.push((p, ai, alpha));
        }
        triples.sort_by(|x, y| (&x.0, x.1).cmp(&(&y.0, y.1)));
        if triples.windows(2).any(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
            return Err(Error::ModelFormat("duplicate feature".into()));
        }
        let mut predicates: Vec<Predicate> = Vec::new();
        let mut offsets = vec![0];
        let mut feature_action = Vec::with_capacity(triples.len());
        let mut alphas = Vec::with_capacity(triples.len());
        for (p, ai, alpha) in triples {
            if predicates.last() != Some(&p) {
                if !predicates.is_empty() {
                    offsets.push(feature_action.len());
                }
                predicates.push(p);
            }
            feature_action.push(ai);
            alphas.push(alpha);
        }
        if !predicates.is_empty() {
            offsets.push(feature_action.len());
        }
        let predicate_index = predicates.iter().enumerate().map(|(i, p)| (p.as_str().to_owned(), i)).collect();
        let log_alphas = alphas.iter().map(|a: &F| a.ln()).collect();
        Ok(MaxentModel {
            procedure,
            actions,
            action_index,
            predicates,
            predicate_index,
            offsets,
            feature_action,
            alphas,
            log_alphas,
            correction,
        })
    }

    pub fn procedure(&self) -> Procedure {
        self.procedure
    }

    /// The action vocabulary, sorted; distributions are indexed by it.
    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action_id(&self, action: &Action) -> Option<usize> {
        self.action_index.get(action).copied()
    }

    /// The GIS correction constant the model was trained with.
    pub fn correction(&self) -> usize {
        self.correction
    }

    pub fn num_features(&self) -> usize {
        self.alphas.len()
    }

    /// `(predicate, action, α)` for every feature, in parameter order.
    pub fn features(&self) -> impl Iterator<Item = (&Predicate, &Action, F)> + '_ {
        self.predicates.iter().enumerate().flat_map(move |(i, p)| {
            (self.offsets[i]..self.offsets[i + 1]).map(move |j| (p, &self.actions[self.feature_action[j]], self.alphas[j]))
        })
    }

    /// `Σ ln α_j` of the firing features, per action.
    pub fn log_potentials(&self, context: &[Predicate]) -> Vec<F> {
        let mut out = vec![F::zero(); self.actions.len()];
        for p in context {
            if let Some(&i) = self.predicate_index.get(p.as_str()) {
                for j in self.offsets[i]..self.offsets[i + 1] {
                    out[self.feature_action[j]] = out[self.feature_action[j]] + self.log_alphas[j];
                }
            }
        }
        out
    }

    /// `ln p(a | context)` for every action of the vocabulary.
    pub fn log_distribution(&self, context: &[Predicate]) -> Vec<F> {
        let mut scores = self.log_potentials(context);
        let norm = log_sum_exp(&scores);
        for s in &mut scores {
            *s = *s - norm;
        }
        scores
    }

    /// `p(a | context)` for every action of the vocabulary.
    pub fn distribution(&self, context: &[Predicate]) -> Vec<F> {
        self.log_distribution(context).into_iter().map(F::exp).collect()
    }

    /// `p(action | context)`; 0 for an action outside the vocabulary.
    pub fn prob_conditional(&self, action: &Action, context: &[Predicate]) -> F {
        match self.action_id(action) {
            Some(i) => self.distribution(context)[i],
            None => F::zero(),
        }
    }

    /// Text form: header, procedure, correction constant, then the action,
    /// predicate and feature tables. `α` is printed in shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |args: std::fmt::Arguments| {
            s.write_fmt(args).expect("write to String");
            s.push('\n');
        };
        line(format_args!("{HEADER}"));
        line(format_args!("procedure {}", self.procedure));
        line(format_args!("correction {}", self.correction));
        line(format_args!("actions {}", self.actions.len()));
        for a in &self.actions {
            line(format_args!("{}", a.payload()));
        }
        line(format_args!("predicates {}", self.predicates.len()));
        for p in &self.predicates {
            line(format_args!("{p}"));
        }
        line(format_args!("features {}", self.alphas.len()));
        for i in 0..self.predicates.len() {
            for j in self.offsets[i]..self.offsets[i + 1] {
                line(format_args!("{i} {} {}", self.feature_action[j], self.alphas[j]));
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, &str)> {
            lines
                .next()
                .map(|(n, l)| (n + 1, l))
                .ok_or_else(|| Error::ModelFormat(format!("unexpected end of model file, expected {what}")))
        };
        let bad = |n: usize, what: &str| Error::ModelFormat(format!("model line {n}: {what}"));
        let keyed = |(n, l): (usize, &str), key: &str| -> Result<usize> {
            l.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| bad(n, &format!("expected `{key} <count>`")))
        };
        let (n, header) = next("header")?;
        if header != HEADER {
            return Err(bad(n, "bad header"));
        }
        let (n, proc_line) = next("procedure")?;
        let procedure: Procedure = proc_line
            .strip_prefix("procedure ")
            .ok_or_else(|| bad(n, "expected procedure"))?
            .parse()?;
        let correction = keyed(next("correction")?, "correction")?;
        let n_actions = keyed(next("actions")?, "actions")?;
        let mut actions = Vec::with_capacity(n_actions);
        for _ in 0..n_actions {
            let (_, l) = next("action")?;
            actions.push(Action::from_payload(procedure, l)?);
        }
        if actions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ModelFormat("actions not sorted and distinct".into()));
        }
        let n_predicates = keyed(next("predicates")?, "predicates")?;
        let mut predicates = Vec::with_capacity(n_predicates);
        for _ in 0..n_predicates {
            let (_, l) = next("predicate")?;
            predicates.push(Predicate::from_encoded(l));
        }
        let n_features = keyed(next("features")?, "features")?;
        let mut triples = Vec::with_capacity(n_features);
        for _ in 0..n_features {
            let (n, l) = next("feature")?;
            let mut f = l.split(' ');
            let (Some(p), Some(a), Some(alpha), None) = (f.next(), f.next(), f.next(), f.next()) else {
                return Err(bad(n, "expected `predicate action alpha`"));
            };
            let p: usize = p.parse().map_err(|_| bad(n, "bad predicate id"))?;
            let a: usize = a.parse().map_err(|_| bad(n, "bad action id"))?;
            let alpha: F = alpha.parse().map_err(|_| bad(n, "bad parameter"))?;
            let (Some(p), Some(a)) = (predicates.get(p), actions.get(a)) else {
                return Err(bad(n, "id out of range"));
            };
            triples.push((p.clone(), a.clone(), alpha));
        }
        if let Ok((n, _)) = next("end of file") {
            return Err(bad(n, "trailing data"));
        }
        let model = Self::from_features(procedure, actions, triples, correction)?;
        if model.predicates != predicates {
            return Err(Error::ModelFormat("predicate table not sorted, distinct and used".into()));
        }
        Ok(model)
    }
}

/// The four procedure models of a parser.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSet<F> {
    models: [MaxentModel<F>; 4],
}

impl<F: Scalar> ModelSet<F> {
    /// Models in any order; exactly one per procedure is required.
    pub fn new(models: impl IntoIterator<Item = MaxentModel<F>>) -> Result<Self> {
        let mut slots: [Option<MaxentModel<F>>; 4] = Default::default();
        for m in models {
            let slot = &mut slots[m.procedure().index()];
            if slot.is_some() {
                return Err(Error::ModelFormat(format!("two {} models", m.procedure())));
            }
            *slot = Some(m);
        }
        let [Some(t), Some(c), Some(b), Some(k)] = slots else {
            let missing = Procedure::ALL.iter().zip(&slots).find(|(_, s)| s.is_none()).map(|(p, _)| *p);
            return Err(Error::ModelFormat(format!("missing {} model", missing.expect("one is missing"))));
        };
        Ok(ModelSet { models: [t, c, b, k] })
    }

    pub fn model(&self, procedure: Procedure) -> &MaxentModel<F> {
        &self.models[procedure.index()]
    }

    pub fn models(&self) -> &[MaxentModel<F>; 4] {
        &self.models
    }

    /// `q(a | b)`: the conditional of the model matching the action's procedure.
    pub fn q(&self, action: &Action, context: &[Predicate]) -> F {
        self.model(action.procedure()).prob_conditional(action, context)
    }

    /// `Σ ln q(a_i | b_i)` over the derivation's actions.
    pub fn log_score_derivation(&self, d: &Derivation, grammar: &Grammar, dict: &TagDictionary) -> Result<F> {
        let mut total = F::zero();
        for (action, state) in d.steps(grammar)? {
            total = total + self.q(&action, &predicates(&state, dict)).ln();
        }
        Ok(total)
    }

    /// Product of `q(a_i | b_i)` over the derivation's actions.
    pub fn score_derivation(&self, d: &Derivation, grammar: &Grammar, dict: &TagDictionary) -> Result<F> {
        Ok(self.log_score_derivation(d, grammar, dict)?.exp())
    }
}
