//! Randomized property tests for the library's core invariants: attribute
//! unions under entity merges, candidate ordering, serialization round
//! trips, forest prediction replay, threshold monotonicity, and window
//! soundness.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sievecoref::attrs::{
    AnimacyValue, AttributeLattice, GenderValue, NumberValue, PersonValue, ValueSet,
};
use sievecoref::corpus::{parse_conll, write_conll, Span};
use sievecoref::entity::{order_candidates, EntityStore};
use sievecoref::features::FeatureLayout;
use sievecoref::learner::forest::{train_forest, GridPoint};
use sievecoref::learner::sampling::{build_training_set, prepare_document};
use sievecoref::learner::tree::TreeNode;
use sievecoref::learner::TrainData;
use sievecoref::lexicon::Lexicons;
use sievecoref::mention::{detect_mentions, DetectionMode, HeadRule, Mention, MentionKind, Role};
use sievecoref::resolver::{resolve_document, LinkStatus, PronounScorer, ResolverConfig};
use sievecoref::sieves::SieveConfig;
use sievecoref::synth::{gen_corpus, SynthSpec};
use std::collections::BTreeSet;

/// Builds a standalone mention for merge experiments; positions are spread
/// out so candidate ordering stays unambiguous.
fn plain_mention(id: usize, attrs: AttributeLattice) -> Mention {
    Mention {
        id,
        span: Span::new(id / 5, (id % 5) * 3, (id % 5) * 3 + 1),
        head_index: (id % 5) * 3,
        kind: MentionKind::CommonNoun,
        pronoun_class: None,
        attrs,
        role: Role::Other,
        start_doc: id * 3,
        head_doc: id * 3,
    }
}

fn lattice_strategy() -> impl Strategy<Value = AttributeLattice> {
    fn pick<T: Copy>(bits: u8, all: &[T]) -> Vec<T> {
        all.iter()
            .enumerate()
            .filter(|(i, _)| bits & (1 << i) != 0)
            .map(|(_, v)| *v)
            .collect()
    }
    (0u8..4, 0u8..4, 0u8..8, 0u8..8).prop_map(|(n, a, p, g)| AttributeLattice {
        number: ValueSet::from_values(pick(n, &[NumberValue::Singular, NumberValue::Plural])),
        animacy: ValueSet::from_values(pick(a, &[AnimacyValue::Animate, AnimacyValue::Inanimate])),
        person: ValueSet::from_values(pick(
            p,
            &[PersonValue::First, PersonValue::Second, PersonValue::Third],
        )),
        gender: ValueSet::from_values(pick(
            g,
            &[GenderValue::Feminine, GenderValue::Masculine, GenderValue::Neuter],
        )),
    })
}

/// Deterministic pair scorer: stable in [0, 1], no model needed.
struct HashScorer {
    salt: u64,
}

impl PronounScorer for HashScorer {
    fn score(
        &self,
        _store: &EntityStore,
        pronoun: usize,
        entity: usize,
    ) -> sievecoref::error::Result<f64> {
        let mut h = self.salt;
        for v in [pronoun as u64, entity as u64] {
            h ^= v
                .wrapping_add(0x9e3779b97f4a7c15)
                .wrapping_add(h << 6)
                .wrapping_add(h >> 2);
        }
        Ok((h % 1000) as f64 / 999.0)
    }
}

/// Scores on the pronoun alone, so entity merges made at one threshold
/// cannot perturb the scores seen at another.
struct PronounOnlyScorer {
    salt: u64,
}

impl PronounScorer for PronounOnlyScorer {
    fn score(
        &self,
        _store: &EntityStore,
        pronoun: usize,
        _entity: usize,
    ) -> sievecoref::error::Result<f64> {
        let h = (pronoun as u64)
            .wrapping_add(self.salt)
            .wrapping_mul(0x9e3779b97f4a7c15);
        Ok((h % 1000) as f64 / 999.0)
    }
}

fn replay_tree(node: &TreeNode, features: &[f64]) -> f64 {
    match node {
        TreeNode::Leaf { prob, .. } => *prob,
        TreeNode::Split {
            slot,
            test,
            left,
            right,
        } => {
            if test.goes_left(features[*slot]) {
                replay_tree(left, features)
            } else {
                replay_tree(right, features)
            }
        }
    }
}

/// Reimplements the sampling contract from scratch and compares it with
/// `build_training_set` on one document.
fn check_sampling_against_brute_force(doc: &sievecoref::corpus::Document) {
    use sievecoref::features::{ClusterFeatureSource, FeatureVocab, Mode};
    let lex = Lexicons::miniature_english();
    let sieve_cfg = SieveConfig::default();
    let prepared = vec![prepare_document(
        doc.clone(),
        &lex,
        &sieve_cfg,
        DetectionMode::FromAnnotations,
        HeadRule::default(),
    )
    .unwrap()];
    let vocab = FeatureVocab::build([doc]);
    let layout = FeatureLayout::new(Mode::Hybrid, None).unwrap();
    let examples =
        build_training_set(&prepared, layout, ClusterFeatureSource::System, &lex, &vocab, None)
            .unwrap();
    let p = &prepared[0];

    // Brute force over pronouns in document order.
    let mut expected: Vec<(usize, usize, bool)> = Vec::new();
    for m in &p.mentions {
        if m.kind != MentionKind::Pronoun {
            continue;
        }
        // Pronouns a rule sieve already resolved are skipped.
        if p.store.entity(p.store.entity_of(m.id)).len() > 1 {
            continue;
        }
        // Closest preceding detected mention whose span shares the pronoun's
        // gold chain.
        let chain = doc.gold_chains.iter().find(|c| c.spans.contains(&m.span));
        let Some(chain) = chain else { continue };
        let antecedent = p
            .mentions
            .iter()
            .filter(|c| c.id < m.id && chain.spans.contains(&c.span))
            .map(|c| c.id)
            .max();
        let Some(ant) = antecedent else { continue };
        let positive_entity = p.store.entity_of(ant);
        expected.push((m.id, positive_entity, true));
        for e in p.store.entities() {
            if e.id == positive_entity {
                continue;
            }
            if e.mentions.iter().any(|mid| ant < *mid && *mid < m.id) {
                expected.push((m.id, e.id, false));
            }
        }
    }
    let got: Vec<(usize, usize, bool)> = examples
        .iter()
        .map(|ex| (ex.pronoun, ex.candidate, ex.label))
        .collect();
    assert_eq!(got, expected, "doc {}", doc.id);
}

proptest! {
    /// Entity attributes after any merge sequence equal the brute-force
    /// union of member mention attributes.
    #[test]
    fn entity_attributes_equal_brute_force_unions(
        lattices in prop::collection::vec(lattice_strategy(), 2..50),
        seed in any::<u64>(),
    ) {
        let mentions: Vec<Mention> = lattices
            .iter()
            .enumerate()
            .map(|(i, l)| plain_mention(i, *l))
            .collect();
        let mut store = EntityStore::new(&mentions);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let merges = rng.random_range(0..mentions.len());
        for _ in 0..merges {
            let ids: Vec<usize> = store.entities().map(|e| e.id).collect();
            if ids.len() < 2 {
                break;
            }
            let a = ids[rng.random_range(0..ids.len())];
            let b = ids[rng.random_range(0..ids.len())];
            if a != b {
                store.merge(a, b).unwrap();
            }
        }
        for entity in store.entities() {
            let expected = entity
                .mentions
                .iter()
                .map(|m| mentions[*m].attrs)
                .fold(AttributeLattice::default(), |acc, l| acc.union(l));
            prop_assert_eq!(entity.attrs, expected, "entity {}", entity.id);
            // The entity id is the minimum member id, members sorted.
            prop_assert_eq!(entity.id, *entity.mentions.iter().min().unwrap());
            let mut sorted = entity.mentions.clone();
            sorted.sort_unstable();
            prop_assert_eq!(&sorted, &entity.mentions);
        }
    }

    /// Serialization round trip: any generated document survives
    /// write → parse unchanged.
    #[test]
    fn generated_documents_round_trip(seed in any::<u64>()) {
        let (docs, _) = gen_corpus(&SynthSpec::default(), 1, seed).unwrap();
        let text = write_conll(&docs);
        let back = parse_conll(&text).unwrap();
        prop_assert_eq!(docs, back);
    }

    /// Candidate ordering matches an independent reimplementation of
    /// "nearest preceding member wins" ranking.
    #[test]
    fn candidate_order_matches_brute_force(seed in any::<u64>(), window in 1usize..5) {
        let (docs, _) = gen_corpus(&SynthSpec::default(), 1, seed).unwrap();
        let doc = &docs[0];
        let lex = Lexicons::miniature_english();
        let mentions =
            detect_mentions(doc, &lex, DetectionMode::FromAnnotations, HeadRule::default())
                .unwrap();
        let store =
            sievecoref::sieves::run_pipeline(doc, &mentions, &SieveConfig::default(), &lex)
                .unwrap();
        for m in &mentions {
            let got = order_candidates(m.id, &mentions, &store, Some(window));
            // Brute force: best (sentence distance, token distance, member id)
            // triple per foreign entity over preceding members in the window.
            let mut keyed: Vec<((usize, usize, usize), usize)> = store
                .entities()
                .filter(|e| e.id != store.entity_of(m.id))
                .filter_map(|e| {
                    e.mentions
                        .iter()
                        .map(|mid| &mentions[*mid])
                        .filter(|c| c.id < m.id && m.span.sent - c.span.sent <= window)
                        .map(|c| {
                            (
                                (
                                    m.span.sent - c.span.sent,
                                    m.start_doc.saturating_sub(c.start_doc),
                                    c.id,
                                ),
                                e.id,
                            )
                        })
                        .min()
                })
                .collect();
            keyed.sort();
            let expected: Vec<usize> = keyed.into_iter().map(|(_, id)| id).collect();
            prop_assert_eq!(got, expected, "mention {}", m.id);
        }
    }

    /// Forest probability equals the mean of individual tree votes.
    #[test]
    fn forest_prediction_is_mean_of_tree_replays(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = 80;
        let features: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..6).map(|_| rng.random_range(-4.0..4.0)).collect())
            .collect();
        let labels: Vec<bool> = features.iter().map(|v| v[0] + v[3] > 0.5).collect();
        let categorical = BTreeSet::new();
        let data = TrainData {
            features: features.iter().map(|v| v.as_slice()).collect(),
            labels,
            categorical: &categorical,
            n_slots: 6,
        };
        let point = GridPoint { n_estimators: 12, max_depth: Some(6), ..GridPoint::default() };
        let model = train_forest(&data, point, seed).unwrap();
        for _ in 0..20 {
            let probe: Vec<f64> = (0..6).map(|_| rng.random_range(-4.0..4.0)).collect();
            let got = model.predict_proba(&probe).unwrap();
            let mean: f64 = model
                .trees
                .iter()
                .map(|t| replay_tree(t, &probe))
                .sum::<f64>()
                / model.trees.len() as f64;
            prop_assert!((got - mean).abs() <= 1e-12, "got {got}, replay {mean}");
        }
    }

    /// Raising the threshold never increases the number of linked pronouns
    /// when scores are fixed per pronoun.
    #[test]
    fn threshold_sweep_is_monotone(seed in any::<u64>()) {
        let (docs, _) = gen_corpus(&SynthSpec::default(), 2, seed).unwrap();
        let lex = Lexicons::miniature_english();
        let mut previous = usize::MAX;
        for threshold in [0.0, 0.2, 0.5, 0.8, 1.0] {
            let cfg = ResolverConfig { merge_threshold: threshold, ..ResolverConfig::default() };
            let mut linked = 0usize;
            for doc in &docs {
                let mentions = detect_mentions(
                    doc,
                    &lex,
                    DetectionMode::FromAnnotations,
                    HeadRule::default(),
                )
                .unwrap();
                let scorer = PronounOnlyScorer { salt: seed };
                let (_, res) = resolve_document(
                    doc,
                    &mentions,
                    &SieveConfig::default(),
                    &cfg,
                    Some(&scorer),
                    &lex,
                )
                .unwrap();
                linked += res.iter().filter(|r| r.status == LinkStatus::Linked).count();
            }
            prop_assert!(linked <= previous, "threshold {threshold}: {linked} > {previous}");
            previous = linked;
        }
    }

    /// No model link reaches past the configured sentence window: the
    /// linked entity always holds a preceding member inside it.
    #[test]
    fn links_never_cross_the_window(seed in any::<u64>(), window in 1usize..4) {
        let (docs, _) = gen_corpus(&SynthSpec::default(), 2, seed).unwrap();
        let lex = Lexicons::miniature_english();
        let cfg = ResolverConfig {
            merge_threshold: 0.0,
            sentence_window: window,
            ..ResolverConfig::default()
        };
        for doc in &docs {
            let mentions =
                detect_mentions(doc, &lex, DetectionMode::FromAnnotations, HeadRule::default())
                    .unwrap();
            let scorer = HashScorer { salt: seed };
            let (_, res) = resolve_document(
                doc,
                &mentions,
                &SieveConfig::default(),
                &cfg,
                Some(&scorer),
                &lex,
            )
            .unwrap();
            for r in res {
                if r.status != LinkStatus::Linked
                    || r.provenance == sievecoref::resolver::Provenance::Rule
                {
                    continue;
                }
                let pron = &mentions[r.pronoun];
                let nearest = r
                    .antecedent_members
                    .iter()
                    .map(|m| &mentions[*m])
                    .filter(|m| m.id < pron.id)
                    .map(|m| pron.span.sent - m.span.sent)
                    .min();
                prop_assert!(
                    nearest.is_some_and(|d| d <= window),
                    "pronoun {} linked across {nearest:?} > window {window}",
                    r.pronoun
                );
            }
        }
    }

    /// Training examples match a brute-force sampler: positive = closest
    /// preceding gold antecedent's entity, negatives = entities with a
    /// member strictly between.
    #[test]
    fn sampling_matches_brute_force(seed in any::<u64>()) {
        let (docs, _) = gen_corpus(&SynthSpec::default(), 1, seed).unwrap();
        check_sampling_against_brute_force(&docs[0]);
    }
}
