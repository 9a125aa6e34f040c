//! Training-pair sampling.
//!
//! For every gold-anaphoric pronoun the positive example pairs it with the
//! entity of its *closest* preceding gold antecedent; the negatives are the
//! entities holding a mention strictly between that antecedent and the
//! pronoun. Pronouns already linked by a rule sieve contribute nothing —
//! the learned stage never sees them at resolution time either.

use crate::corpus::Document;
use crate::entity::EntityStore;
use crate::error::{Error, Result};
use crate::features::{
    extract_pair, ClusterFeatureSource, FeatureContext, FeatureLayout, FeatureVector,
    FeatureVocab,
};
use crate::lexicon::Lexicons;
use crate::embedding::EmbeddingTable;
use crate::mention::{detect_mentions, DetectionMode, HeadRule, Mention};
use crate::sieves::{run_pipeline, SieveConfig};
use serde::{Deserialize, Serialize};

/// A document carried through detection and the rule sieves.
#[derive(Clone, Debug)]
pub struct PreparedDoc {
    pub doc: Document,
    pub mentions: Vec<Mention>,
    pub store: EntityStore,
}

pub fn prepare_document(
    doc: Document,
    lex: &Lexicons,
    sieve_cfg: &SieveConfig,
    detection: DetectionMode,
    head_rule: HeadRule,
) -> Result<PreparedDoc> {
    let mentions = detect_mentions(&doc, lex, detection, head_rule)?;
    let store = run_pipeline(&doc, &mentions, sieve_cfg, lex)?;
    Ok(PreparedDoc {
        doc,
        mentions,
        store,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub features: FeatureVector,
    pub label: bool,
    // provenance, for fold assignment and debugging
    pub doc_id: String,
    pub pronoun: usize,
    pub candidate: usize,
}

/// Pronouns a rule sieve already placed in a multi-mention entity.
pub fn rule_resolved_pronouns(prepared: &PreparedDoc) -> Vec<usize> {
    prepared
        .mentions
        .iter()
        .filter(|m| m.is_pronoun())
        .filter(|m| prepared.store.entity(prepared.store.entity_of(m.id)).len() > 1)
        .map(|m| m.id)
        .collect()
}

/// The closest preceding detected mention whose span belongs to the same
/// gold chain as `pronoun`, together with the chain id.
pub fn closest_gold_antecedent(
    prepared: &PreparedDoc,
    pronoun: &Mention,
) -> Option<(usize, u32)> {
    let chain = prepared
        .doc
        .gold_chains
        .iter()
        .find(|c| c.spans.contains(&pronoun.span))?;
    let ant = prepared
        .mentions
        .iter()
        .filter(|m| m.id < pronoun.id && chain.spans.contains(&m.span))
        .map(|m| m.id)
        .max()?;
    Some((ant, chain.id))
}

/// Builds the labeled pair set over prepared documents. See module docs for
/// the sampling rule. Errors with [`Error::NoGoldChains`] when no document
/// carries gold annotation.
pub fn build_training_set(
    prepared: &[PreparedDoc],
    layout: FeatureLayout,
    cluster_source: ClusterFeatureSource,
    lex: &Lexicons,
    vocab: &FeatureVocab,
    embeddings: Option<&EmbeddingTable>,
) -> Result<Vec<TrainingExample>> {
    if prepared.iter().all(|p| !p.doc.has_gold()) {
        return Err(Error::NoGoldChains);
    }
    let mut examples = Vec::new();
    for p in prepared {
        let ctx = FeatureContext::new(
            &p.doc,
            &p.mentions,
            lex,
            vocab,
            layout,
            embeddings,
            cluster_source,
        )?;
        let rule_resolved = rule_resolved_pronouns(p);
        for pron in p.mentions.iter().filter(|m| m.is_pronoun()) {
            if rule_resolved.contains(&pron.id) {
                continue;
            }
            let Some((ant_id, _)) = closest_gold_antecedent(p, pron) else {
                continue;
            };
            let positive_entity = p.store.entity_of(ant_id);
            examples.push(TrainingExample {
                features: extract_pair(&ctx, &p.store, pron.id, positive_entity)?,
                label: true,
                doc_id: p.doc.id.clone(),
                pronoun: pron.id,
                candidate: positive_entity,
            });
            for entity in p.store.entities() {
                if entity.id == positive_entity {
                    continue;
                }
                let between = entity
                    .mentions
                    .iter()
                    .any(|m| *m > ant_id && *m < pron.id);
                if !between {
                    continue;
                }
                examples.push(TrainingExample {
                    features: extract_pair(&ctx, &p.store, pron.id, entity.id)?,
                    label: false,
                    doc_id: p.doc.id.clone(),
                    pronoun: pron.id,
                    candidate: entity.id,
                });
            }
        }
    }
    Ok(examples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_conll;
    use crate::features::Mode;

    /// Two chains and an unannotated distractor between antecedent and
    /// pronoun:
    ///   s0: [Anna]{c1} saw [the report]{c2} .
    ///   s1: [the judge] read [it]{c2} .
    ///   s2: [she]{c1} left .
    fn fixture() -> PreparedDoc {
        let rows: Vec<(usize, &str, &str, &str, &str, &str, &str, &str)> = vec![
            (0, "Anna", "NNP", "B-PER", "animate", "B-NP-SBJ", "0", "1"),
            (0, "saw", "VBD", "O", "-", "-", "-", "-"),
            (0, "the", "DT", "O", "-", "B-NP-OBJ", "0", "2"),
            (0, "report", "NN", "O", "inanimate", "I-NP-OBJ", "0", "2"),
            (0, ".", ".", "O", "-", "-", "-", "-"),
            (1, "the", "DT", "O", "-", "B-NP-SBJ", "-", "-"),
            (1, "judge", "NN", "O", "animate", "I-NP-SBJ", "-", "-"),
            (1, "read", "VBD", "O", "-", "-", "-", "-"),
            (1, "it", "PRP", "O", "-", "B-NP-OBJ", "1", "2"),
            (1, ".", ".", "O", "-", "-", "-", "-"),
            (2, "she", "PRP", "O", "animate", "B-NP-SBJ", "1", "1"),
            (2, "left", "VBD", "O", "-", "-", "-", "-"),
        ];
        let mut lines = Vec::new();
        let mut prev = 0usize;
        for (si, form, fine, ner, anim, phrase, mention, chain) in rows {
            if si != prev {
                lines.push(String::new());
                prev = si;
            }
            let coarse = if fine.starts_with("NN") {
                "N"
            } else if fine.starts_with("VB") {
                "V"
            } else if fine == "PRP" {
                "PRON"
            } else if fine == "DT" {
                "DET"
            } else {
                "PUNC"
            };
            let nc = if ner.contains("PER") { "PER" } else { "O" };
            lines.push(format!(
                "s0\t{si}\t{form}\t{coarse}\t{ner}\t{}\t{form}\t{nc}\t{mention}\t{chain}\t{anim}\t{phrase}\t{fine}",
                form.to_lowercase()
            ));
        }
        let doc = parse_conll(&lines.join("\n")).unwrap().remove(0);
        let lex = Lexicons::miniature_english();
        prepare_document(
            doc,
            &lex,
            &SieveConfig::default(),
            DetectionMode::FromAnnotations,
            HeadRule::default(),
        )
        .unwrap()
    }

    #[test]
    fn positive_is_closest_antecedent_negatives_lie_between() {
        let p = fixture();
        let lex = Lexicons::miniature_english();
        let vocab = FeatureVocab::build([&p.doc]);
        let layout = FeatureLayout::new(Mode::Hybrid, None).unwrap();
        let examples = build_training_set(
            std::slice::from_ref(&p),
            layout,
            ClusterFeatureSource::System,
            &lex,
            &vocab,
            None,
        )
        .unwrap();

        // Mentions: 0=Anna 1="the report" 2="the judge" 3=it 4=she
        // "it" (3): antecedent "the report" (1); between: "the judge" (2).
        // "she" (4): antecedent "Anna" (0); between: 1, 2, 3.
        let for_it: Vec<&TrainingExample> =
            examples.iter().filter(|e| e.pronoun == 3).collect();
        assert_eq!(for_it.len(), 2);
        assert!(for_it[0].label && for_it[0].candidate == 1);
        assert!(!for_it[1].label && for_it[1].candidate == 2);

        let for_she: Vec<&TrainingExample> =
            examples.iter().filter(|e| e.pronoun == 4).collect();
        assert_eq!(for_she.len(), 4);
        assert!(for_she[0].label && for_she[0].candidate == 0);
        let negs: Vec<usize> = for_she[1..].iter().map(|e| e.candidate).collect();
        assert_eq!(negs, vec![1, 2, 3]);
        assert!(for_she[1..].iter().all(|e| !e.label));
    }

    #[test]
    fn no_gold_chains_is_an_error() {
        let p = fixture();
        let mut doc = p.doc.clone();
        doc.gold_chains.clear();
        let lex = Lexicons::miniature_english();
        let prepared = prepare_document(
            doc,
            &lex,
            &SieveConfig::default(),
            DetectionMode::FromAnnotations,
            HeadRule::default(),
        )
        .unwrap();
        let vocab = FeatureVocab::build([&prepared.doc]);
        let layout = FeatureLayout::new(Mode::MentionPair, None).unwrap();
        assert!(matches!(
            build_training_set(
                &[prepared],
                layout,
                ClusterFeatureSource::System,
                &lex,
                &vocab,
                None
            ),
            Err(Error::NoGoldChains)
        ));
    }

    #[test]
    fn mention_pair_mode_samples_identical_pairs_with_narrower_vectors() {
        let p = fixture();
        let lex = Lexicons::miniature_english();
        let vocab = FeatureVocab::build([&p.doc]);
        let hybrid = build_training_set(
            std::slice::from_ref(&p),
            FeatureLayout::new(Mode::Hybrid, None).unwrap(),
            ClusterFeatureSource::System,
            &lex,
            &vocab,
            None,
        )
        .unwrap();
        let pair = build_training_set(
            std::slice::from_ref(&p),
            FeatureLayout::new(Mode::MentionPair, None).unwrap(),
            ClusterFeatureSource::System,
            &lex,
            &vocab,
            None,
        )
        .unwrap();
        assert_eq!(hybrid.len(), pair.len());
        for (h, m) in hybrid.iter().zip(&pair) {
            assert_eq!((h.pronoun, h.candidate, h.label), (m.pronoun, m.candidate, m.label));
            assert_eq!(h.features.len(), 51);
            assert_eq!(m.features.len(), 34);
        }
    }
}
