use std::collections::{BTreeSet, HashMap};

use crate::context::{Event, Predicate};
use crate::derivation::{Action, Procedure};
use crate::error::{Error, Result};

/// Feature pairs seen fewer times than this are discarded.
pub const DEFAULT_CUTOFF: u64 = 5;

/// The training events of one procedure with their `(predicate, action)` counts.
#[derive(Clone, Debug)]
pub struct TrainingSample {
    procedure: Procedure,
    events: Vec<Event>,
    pair_counts: HashMap<(Predicate, Action), u64>,
}

impl TrainingSample {
    pub fn new(procedure: Procedure, events: Vec<Event>) -> Result<Self> {
        let mut pair_counts = HashMap::new();
        for e in &events {
            if e.procedure() != procedure {
                return Err(Error::IllegalAction {
                    action: e.action.to_string(),
                    reason: format!("event in a {procedure} training sample"),
                });
            }
            for p in &e.predicates {
                *pair_counts.entry((p.clone(), e.action.clone())).or_insert(0) += 1;
            }
        }
        Ok(TrainingSample {
            procedure,
            events,
            pair_counts,
        })
    }

    pub fn procedure(&self) -> Procedure {
        self.procedure
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn pair_count(&self, predicate: &Predicate, action: &Action) -> u64 {
        self.pair_counts
            .get(&(predicate.clone(), action.clone()))
            .copied()
            .unwrap_or(0)
    }

    /// All pair counts, in no particular order.
    pub fn pair_counts(&self) -> impl Iterator<Item = (&Predicate, &Action, u64)> {
        self.pair_counts.iter().map(|((p, a), &n)| (p, a, n))
    }

    /// Distinct actions of the sample, sorted.
    pub fn actions(&self) -> Vec<Action> {
        let set: BTreeSet<&Action> = self.events.iter().map(|e| &e.action).collect();
        set.into_iter().cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Feature {
    pub predicate: Predicate,
    pub action: Action,
}

/// Action vocabulary and features of one model, both sorted; a feature's
/// parameter index is its position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureTable {
    procedure: Procedure,
    actions: Vec<Action>,
    features: Vec<Feature>,
}

impl FeatureTable {
    /// Sorts and deduplicates both lists.
    pub fn new(procedure: Procedure, mut actions: Vec<Action>, mut features: Vec<Feature>) -> Self {
        actions.sort();
        actions.dedup();
        features.sort();
        features.dedup();
        FeatureTable {
            procedure,
            actions,
            features,
        }
    }

    pub fn procedure(&self) -> Procedure {
        self.procedure
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// One feature per `(predicate, action)` pair occurring at least `cutoff` times.
pub fn build_features(sample: &TrainingSample, cutoff: u64) -> Result<FeatureTable> {
    let features: Vec<Feature> = sample
        .pair_counts()
        .filter(|&(_, _, n)| n >= cutoff)
        .map(|(p, a, _)| Feature {
            predicate: p.clone(),
            action: a.clone(),
        })
        .collect();
    if features.is_empty() {
        return Err(Error::DegenerateModel(sample.procedure().to_string()));
    }
    Ok(FeatureTable::new(sample.procedure(), sample.actions(), features))
}
