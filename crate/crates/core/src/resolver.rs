//! The learned linking stage ("sieve 8") and end-to-end evaluation.
//!
//! After the rule sieves have built partial entities, each still-unresolved
//! pronoun is scored against every preceding partial entity inside its
//! sentence window. The best-scoring entity wins if it clears the merge
//! threshold; the merge happens immediately, so information gathered for one
//! pronoun is available to the next.

use crate::corpus::{Document, Span};
use crate::entity::{order_candidates, EntityStore};
use crate::error::{Error, Result};
use crate::features::{extract_pair, FeatureContext};
use crate::learner::Classifier;
use crate::lexicon::PronounClass;
use crate::mention::Mention;
use crate::sieves::{run_pipeline, SieveConfig};
use crate::lexicon::Lexicons;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResolverConfig {
    /// Minimum classifier probability required to link.
    pub merge_threshold: f64,
    /// How many sentences back a candidate entity may reach.
    pub sentence_window: usize,
    /// Optional per-pronoun-class window overrides.
    pub class_windows: BTreeMap<PronounClass, usize>,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        ResolverConfig {
            merge_threshold: 0.5,
            sentence_window: 3,
            class_windows: BTreeMap::new(),
        }
    }
}

impl ResolverConfig {
    pub fn window_for(&self, class: Option<PronounClass>) -> usize {
        class
            .and_then(|c| self.class_windows.get(&c).copied())
            .unwrap_or(self.sentence_window)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.merge_threshold) {
            return Err(Error::Config(format!(
                "merge_threshold {} outside [0, 1]",
                self.merge_threshold
            )));
        }
        if self.sentence_window == 0 || self.class_windows.values().any(|w| *w == 0) {
            return Err(Error::Config("sentence windows must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkStatus {
    Linked,
    NonAnaphoric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Placed in a multi-mention entity by a rule sieve.
    Rule,
    /// Decided by the trained classifier.
    Model,
}

/// The outcome for one pronoun.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub pronoun: usize,
    pub antecedent_entity: Option<usize>,
    pub score: f64,
    pub status: LinkStatus,
    pub provenance: Provenance,
    /// The antecedent entity's members at link time, never including the
    /// pronoun itself. Empty when non-anaphoric.
    pub antecedent_members: Vec<usize>,
}

/// Anything that can score a (pronoun, candidate entity) pair.
///
/// The production scorer wraps a trained [`Classifier`]; tests substitute
/// scripted or oracle scorers.
pub trait PronounScorer {
    fn score(&self, store: &EntityStore, pronoun: usize, entity: usize) -> Result<f64>;
}

/// Scores pairs with a trained classifier over extracted features.
pub struct ClassifierScorer<'a> {
    pub classifier: &'a Classifier,
    pub ctx: &'a FeatureContext<'a>,
}

impl<'a> ClassifierScorer<'a> {
    pub fn new(classifier: &'a Classifier, ctx: &'a FeatureContext<'a>) -> Result<Self> {
        if classifier.n_features() != ctx.layout.len() {
            return Err(Error::VocabMismatch(format!(
                "classifier expects {} features, layout provides {}",
                classifier.n_features(),
                ctx.layout.len()
            )));
        }
        Ok(ClassifierScorer { classifier, ctx })
    }
}

impl PronounScorer for ClassifierScorer<'_> {
    fn score(&self, store: &EntityStore, pronoun: usize, entity: usize) -> Result<f64> {
        let features = extract_pair(self.ctx, store, pronoun, entity)?;
        self.classifier.predict_proba(&features)
    }
}

/// Scores 1.0 exactly when the candidate entity holds a mention from the
/// pronoun's gold chain, 0.0 otherwise. Used to probe the upper bound of
/// the linking stage in isolation.
pub struct OracleScorer<'a> {
    pub doc: &'a Document,
    pub mentions: &'a [Mention],
}

impl PronounScorer for OracleScorer<'_> {
    fn score(&self, store: &EntityStore, pronoun: usize, entity: usize) -> Result<f64> {
        let span = self.mentions[pronoun].span;
        let Some(chain) = self.doc.gold_chains.iter().find(|c| c.spans.contains(&span))
        else {
            return Ok(0.0);
        };
        let hit = store
            .entity(entity)
            .mentions
            .iter()
            .any(|m| chain.spans.contains(&self.mentions[*m].span));
        Ok(if hit { 1.0 } else { 0.0 })
    }
}

/// Links one pronoun: scores candidate entities nearest-first, keeps the
/// maximum (ties go to the nearer candidate), and merges when the score
/// clears the threshold. Returns the resolution; mutates `store` on a link.
pub fn resolve_pronoun(
    pronoun: usize,
    mentions: &[Mention],
    store: &mut EntityStore,
    scorer: &dyn PronounScorer,
    cfg: &ResolverConfig,
) -> Result<Resolution> {
    let m = &mentions[pronoun];
    if !m.is_pronoun() {
        return Err(Error::NotAPronoun(pronoun));
    }
    let window = cfg.window_for(m.pronoun_class);
    let candidates = order_candidates(pronoun, mentions, store, Some(window));
    let mut best: Option<(usize, f64)> = None;
    for cand in candidates {
        let score = scorer.score(store, pronoun, cand)?;
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((cand, score));
        }
    }
    match best {
        Some((entity, score)) if score >= cfg.merge_threshold => {
            let members = store.entity(entity).mentions.clone();
            let own = store.entity_of(pronoun);
            store.merge(entity, own)?;
            Ok(Resolution {
                pronoun,
                antecedent_entity: Some(entity),
                score,
                status: LinkStatus::Linked,
                provenance: Provenance::Model,
                antecedent_members: members,
            })
        }
        best => Ok(Resolution {
            pronoun,
            antecedent_entity: None,
            score: best.map_or(0.0, |(_, s)| s),
            status: LinkStatus::NonAnaphoric,
            provenance: Provenance::Model,
            antecedent_members: Vec::new(),
        }),
    }
}

/// Runs the full resolution pass over one document: the rule-sieve pipeline,
/// then the scorer over every remaining pronoun in document order. Passing
/// no scorer leaves those pronouns non-anaphoric (the rule-only pathway).
pub fn resolve_document(
    doc: &Document,
    mentions: &[Mention],
    sieve_cfg: &SieveConfig,
    resolver_cfg: &ResolverConfig,
    scorer: Option<&dyn PronounScorer>,
    lex: &Lexicons,
) -> Result<(EntityStore, Vec<Resolution>)> {
    resolver_cfg.validate()?;
    let mut store = run_pipeline(doc, mentions, sieve_cfg, lex)?;
    let rule_resolved: Vec<bool> = mentions
        .iter()
        .map(|m| m.is_pronoun() && store.entity(store.entity_of(m.id)).len() > 1)
        .collect();
    let mut resolutions = Vec::new();
    for m in mentions.iter().filter(|m| m.is_pronoun()) {
        if rule_resolved[m.id] {
            let entity = store.entity_of(m.id);
            let members: Vec<usize> = store
                .entity(entity)
                .mentions
                .iter()
                .copied()
                .filter(|other| *other != m.id)
                .collect();
            resolutions.push(Resolution {
                pronoun: m.id,
                antecedent_entity: Some(entity),
                score: 1.0,
                status: LinkStatus::Linked,
                provenance: Provenance::Rule,
                antecedent_members: members,
            });
            continue;
        }
        match scorer {
            Some(scorer) => {
                resolutions.push(resolve_pronoun(m.id, mentions, &mut store, scorer, resolver_cfg)?)
            }
            None => resolutions.push(Resolution {
                pronoun: m.id,
                antecedent_entity: None,
                score: 0.0,
                status: LinkStatus::NonAnaphoric,
                provenance: Provenance::Rule,
                antecedent_members: Vec::new(),
            }),
        }
    }
    Ok((store, resolutions))
}

/// True when `span` sits in a gold chain with an earlier span — the pronoun
/// has a gold antecedent.
pub fn is_gold_anaphoric(doc: &Document, span: Span) -> bool {
    doc.gold_chains
        .iter()
        .filter(|c| c.spans.contains(&span))
        .any(|c| c.spans.iter().any(|s| *s < span))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalPolicy {
    /// Every detected pronoun counts toward precision.
    AllPronouns,
    /// Pronouns without a gold antecedent are dropped from both counts.
    GoldAnaphoricOnly,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub linked: usize,
    pub correct: usize,
    pub gold_anaphoric: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl EvalReport {
    pub fn from_counts(linked: usize, correct: usize, gold_anaphoric: usize) -> Self {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(correct, linked);
        let recall = ratio(correct, gold_anaphoric);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        EvalReport {
            linked,
            correct,
            gold_anaphoric,
            precision,
            recall,
            f1,
        }
    }
}

/// Scores predictions against gold chains.
///
/// A linked pronoun is correct when its antecedent entity snapshot holds at
/// least one mention from the pronoun's gold chain. Precision divides by
/// linked pronouns, recall by gold-anaphoric pronouns; 0/0 = 0.
pub fn evaluate(
    items: &[(&Document, &[Mention], &[Resolution])],
    policy: EvalPolicy,
) -> Result<EvalReport> {
    if items.iter().all(|(doc, _, _)| !doc.has_gold()) {
        return Err(Error::MissingGold);
    }
    let (mut linked, mut correct, mut gold_anaphoric) = (0usize, 0usize, 0usize);
    for (doc, mentions, resolutions) in items {
        for r in *resolutions {
            let span = mentions[r.pronoun].span;
            let anaphoric = is_gold_anaphoric(doc, span);
            if policy == EvalPolicy::GoldAnaphoricOnly && !anaphoric {
                continue;
            }
            if anaphoric {
                gold_anaphoric += 1;
            }
            if r.status != LinkStatus::Linked {
                continue;
            }
            linked += 1;
            let chain = doc.gold_chains.iter().find(|c| c.spans.contains(&span));
            if let Some(chain) = chain {
                let hit = r
                    .antecedent_members
                    .iter()
                    .any(|m| chain.spans.contains(&mentions[*m].span));
                if hit {
                    correct += 1;
                }
            }
        }
    }
    Ok(EvalReport::from_counts(linked, correct, gold_anaphoric))
}
