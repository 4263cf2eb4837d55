use std::collections::HashMap;

use super::model::MaxentModel;
use super::sample::{FeatureTable, TrainingSample};
use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, CompensatedSum, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GisConfig {
    /// Upper bound on parameter updates.
    pub max_iters: usize,
    /// Stop once every feature's model expectation is within `tol` of its
    /// empirical expectation (both per training event).
    pub tol: f64,
}

impl Default for GisConfig {
    fn default() -> Self {
        GisConfig {
            max_iters: 100,
            tol: 1e-3,
        }
    }
}

/// What happened during training.
#[derive(Clone, Debug, PartialEq)]
pub struct GisReport {
    /// Number of parameter updates performed.
    pub iterations: usize,
    /// Mean training log-likelihood before the first update and after each one.
    pub log_likelihood: Vec<f64>,
    /// Largest expectation gap at the same points.
    pub gaps: Vec<f64>,
    pub converged: bool,
    pub correction: usize,
}

impl GisReport {
    pub fn final_gap(&self) -> f64 {
        *self.gaps.last().expect("at least one evaluation")
    }
}

/// Distinct active-predicate sets with the actions observed in them.
struct Context {
    predicates: Vec<usize>,
    total: usize,
    action_counts: Vec<(usize, usize)>,
    /// Correction feature value `C - Σ_j f_j(a, b)` per action.
    slack: Vec<usize>,
}

struct Stats<F> {
    log_likelihood: F,
    model: Vec<F>,
    model_slack: F,
}

/// Trains `α` by Generalized Iterative Scaling.
///
/// The correction constant `C` is the largest number of features firing on
/// any `(action, event context)` pair; a correction feature tops every pair
/// up to `C` and is trained like the others. Conditionals only depend on
/// feature weights relative to the correction weight, so it is divided out
/// of the returned `α` and not stored.
pub fn gis_train<F: Scalar>(
    sample: &TrainingSample,
    table: &FeatureTable,
    config: &GisConfig,
) -> Result<(MaxentModel<F>, GisReport)> {
    let procedure = sample.procedure();
    let actions = table.actions();
    let action_index: HashMap<_, usize> = actions.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut predicate_index: HashMap<&str, usize> = HashMap::new();
    // Features of predicate i as (action, feature index).
    let mut by_predicate: Vec<Vec<(usize, usize)>> = Vec::new();
    for (j, f) in table.features().iter().enumerate() {
        let &a = action_index.get(&f.action).ok_or_else(|| {
            Error::ModelFormat(format!("feature action {} missing from the vocabulary", f.action))
        })?;
        let next = predicate_index.len();
        let i = *predicate_index.entry(f.predicate.as_str()).or_insert(next);
        if i == by_predicate.len() {
            by_predicate.push(Vec::new());
        }
        by_predicate[i].push((a, j));
    }

    let mut contexts: Vec<Context> = Vec::new();
    let mut context_index: HashMap<Vec<usize>, usize> = HashMap::new();
    for e in sample.events() {
        let &a = action_index.get(&e.action).ok_or_else(|| {
            Error::ModelFormat(format!("training action {} missing from the vocabulary", e.action))
        })?;
        let mut active: Vec<usize> = e
            .predicates
            .iter()
            .filter_map(|p| predicate_index.get(p.as_str()).copied())
            .collect();
        active.sort_unstable();
        active.dedup();
        let next = contexts.len();
        let c = *context_index.entry(active.clone()).or_insert(next);
        if c == contexts.len() {
            contexts.push(Context {
                predicates: active,
                total: 0,
                action_counts: Vec::new(),
                slack: Vec::new(),
            });
        }
        let ctx = &mut contexts[c];
        ctx.total += 1;
        match ctx.action_counts.iter_mut().find(|(x, _)| *x == a) {
            Some((_, n)) => *n += 1,
            None => ctx.action_counts.push((a, 1)),
        }
    }

    let n_features = table.len();
    let mut empirical = vec![0usize; n_features];
    let mut correction = 1;
    for ctx in &mut contexts {
        ctx.slack = vec![0; actions.len()];
        for &p in &ctx.predicates {
            for &(a, j) in &by_predicate[p] {
                ctx.slack[a] += 1;
                if let Some(&(_, n)) = ctx.action_counts.iter().find(|(x, _)| *x == a) {
                    empirical[j] += n;
                }
            }
        }
        correction = correction.max(ctx.slack.iter().copied().max().unwrap_or(0));
    }
    let mut empirical_slack = 0;
    for ctx in &mut contexts {
        for s in &mut ctx.slack {
            *s = correction - *s;
        }
        empirical_slack += ctx.action_counts.iter().map(|&(a, n)| n * ctx.slack[a]).sum::<usize>();
    }
    if let Some(j) = empirical.iter().position(|&n| n == 0) {
        let f = &table.features()[j];
        return Err(Error::UnsupportedFeature {
            procedure: procedure.to_string(),
            feature: format!("{} / {}", f.predicate, f.action),
        });
    }

    let n_events = F::from_usize_lossy(sample.len().max(1));
    let empirical: Vec<F> = empirical.iter().map(|&n| F::from_usize_lossy(n) / n_events).collect();
    let empirical_slack = F::from_usize_lossy(empirical_slack) / n_events;
    let inv_c = F::one() / F::from_usize_lossy(correction);
    let mut lambda = vec![F::zero(); n_features];
    let mut lambda_slack = F::zero();
    let mut scores = vec![F::zero(); actions.len()];

    let mut evaluate = |lambda: &[F], lambda_slack: F| -> Stats<F> {
        let mut ll = CompensatedSum::new();
        let mut model = vec![CompensatedSum::new(); n_features];
        let mut model_slack = CompensatedSum::new();
        for ctx in &contexts {
            for (s, &k) in scores.iter_mut().zip(&ctx.slack) {
                *s = lambda_slack * F::from_usize_lossy(k);
            }
            for &p in &ctx.predicates {
                for &(a, j) in &by_predicate[p] {
                    scores[a] = scores[a] + lambda[j];
                }
            }
            let norm = log_sum_exp(&scores);
            for &(a, n) in &ctx.action_counts {
                ll.add(F::from_usize_lossy(n) * (scores[a] - norm));
            }
            let weight = F::from_usize_lossy(ctx.total);
            if empirical_slack > F::zero() {
                for (&s, &k) in scores.iter().zip(&ctx.slack) {
                    model_slack.add(weight * F::from_usize_lossy(k) * (s - norm).exp());
                }
            }
            for &p in &ctx.predicates {
                for &(a, j) in &by_predicate[p] {
                    model[j].add(weight * (scores[a] - norm).exp());
                }
            }
        }
        Stats {
            log_likelihood: ll.total() / n_events,
            model: model.iter().map(|m| m.total() / n_events).collect(),
            model_slack: model_slack.total() / n_events,
        }
    };
    let gap = |stats: &Stats<F>| {
        empirical
            .iter()
            .zip(&stats.model)
            .map(|(&e, &m)| (e - m).abs().to_f64_lossy())
            .fold(0.0, f64::max)
    };
    let non_finite = |iteration| Error::NonFinite {
        procedure: procedure.to_string(),
        iteration,
    };

    let mut stats = evaluate(&lambda, lambda_slack);
    let mut report = GisReport {
        iterations: 0,
        log_likelihood: vec![stats.log_likelihood.to_f64_lossy()],
        gaps: vec![gap(&stats)],
        converged: false,
        correction,
    };
    loop {
        if !stats.log_likelihood.is_finite() || stats.model.iter().any(|m| !m.is_finite()) {
            return Err(non_finite(report.iterations));
        }
        if report.final_gap() <= config.tol {
            report.converged = true;
            break;
        }
        if report.iterations == config.max_iters {
            break;
        }
        for j in 0..n_features {
            lambda[j] = lambda[j] + (empirical[j].ln() - stats.model[j].ln()) * inv_c;
        }
        // A correction feature that never fires keeps weight 0.
        if empirical_slack > F::zero() {
            lambda_slack = lambda_slack + (empirical_slack.ln() - stats.model_slack.ln()) * inv_c;
        }
        report.iterations += 1;
        if lambda.iter().chain([&lambda_slack]).any(|l| !l.is_finite()) {
            return Err(non_finite(report.iterations));
        }
        stats = evaluate(&lambda, lambda_slack);
        report.log_likelihood.push(stats.log_likelihood.to_f64_lossy());
        report.gaps.push(gap(&stats));
    }

    let alphas: Vec<F> = lambda.iter().map(|&l| (l - lambda_slack).exp()).collect();
    if alphas.iter().any(|a| !(*a > F::zero() && a.is_finite())) {
        return Err(non_finite(report.iterations));
    }
    let features = table
        .features()
        .iter()
        .zip(alphas)
        .map(|(f, alpha)| (f.predicate.clone(), f.action.clone(), alpha));
    let model = MaxentModel::from_features(procedure, actions.to_vec(), features, correction)?;
    Ok((model, report))
}
