//! Training all four models from a corpus, and parsing with them.

use crate::context::collect_events;
use crate::derivation::{Grammar, Procedure};
use crate::error::{Error, Result};
use crate::maxent::{build_features, gis_train, GisConfig, GisReport, ModelSet, TrainingSample, DEFAULT_CUTOFF};
use crate::scalar::Scalar;
use crate::search::{top_k_bfs, SearchConfig, SearchOutcome, TagDictionary};
use crate::treebank::Corpus;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainOptions {
    pub cutoff: u64,
    pub gis: GisConfig,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            cutoff: DEFAULT_CUTOFF,
            gis: GisConfig::default(),
        }
    }
}

/// Per-procedure training reports and the sentences that were skipped.
#[derive(Clone, Debug)]
pub struct TrainSummary {
    pub reports: Vec<(Procedure, GisReport)>,
    pub events: [usize; 4],
    pub features: [usize; 4],
    /// Corpus indices of trees without a derivation, with the reason.
    pub underivable: Vec<(usize, String)>,
}

/// Everything needed to parse: label sets, tag dictionary and models.
#[derive(Clone, Debug, PartialEq)]
pub struct Parser<F> {
    pub grammar: Grammar,
    pub dict: TagDictionary,
    pub models: ModelSet<F>,
}

impl<F: Scalar> Parser<F> {
    pub fn train(corpus: &Corpus, options: &TrainOptions) -> Result<(Self, TrainSummary)> {
        if corpus.is_empty() {
            return Err(Error::NoSentences);
        }
        let grammar = Grammar::from_trees(corpus.trees());
        let dict = TagDictionary::from_corpus(corpus);
        let mut events = collect_events(corpus, &grammar, &dict);
        if events.total() == 0 {
            return Err(Error::NoDerivableTrees(corpus.len()));
        }
        let underivable = events.underivable.drain(..).map(|(i, e)| (i, e.to_string())).collect();
        let mut models = Vec::with_capacity(4);
        let mut summary = TrainSummary {
            reports: Vec::with_capacity(4),
            events: [0; 4],
            features: [0; 4],
            underivable,
        };
        for p in Procedure::ALL {
            let sample = TrainingSample::new(p, std::mem::take(&mut events.by_procedure[p.index()]))?;
            let table = build_features(&sample, options.cutoff)?;
            let (model, report) = gis_train::<F>(&sample, &table, &options.gis)?;
            summary.events[p.index()] = sample.len();
            summary.features[p.index()] = model.num_features();
            summary.reports.push((p, report));
            models.push(model);
        }
        let parser = Parser {
            grammar,
            dict,
            models: ModelSet::new(models)?,
        };
        Ok((parser, summary))
    }

    pub fn parse<S: AsRef<str>>(&self, tokens: &[S], cfg: &SearchConfig<F>) -> Result<SearchOutcome<F>> {
        top_k_bfs(tokens, &self.models, &self.grammar, &self.dict, cfg)
    }
}
