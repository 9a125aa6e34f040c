//! End-to-end ablation harness: each setting describes one complete system
//! configuration — resolution mode, cluster-feature source, embeddings,
//! rule sieves, sieve order, and classifier family — and is trained and
//! evaluated in isolation, yielding one row of a precision/recall/F1 table.

use crate::corpus::Document;
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::features::{
    ClusterFeatureSource, FeatureContext, FeatureLayout, FeatureVocab, Mode,
};
use crate::learner::forest::{train_forest, GridPoint};
use crate::learner::logistic::{train_logistic, LogisticParams};
use crate::learner::sampling::{build_training_set, prepare_document};
use crate::learner::{Classifier, TrainData};
use crate::lexicon::Lexicons;
use crate::mention::{detect_mentions, DetectionMode, HeadRule};
use crate::resolver::{
    evaluate, resolve_document, ClassifierScorer, EvalPolicy, EvalReport, Resolution,
    ResolverConfig,
};
use crate::sieves::{SieveConfig, SieveName};
use serde::{Deserialize, Serialize};

/// Which pathway resolves pronouns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemMode {
    /// Rule sieves only; no learned stage.
    RuleOnly,
    /// Learned stage over singleton candidates with pair-level features.
    MentionPair,
    /// Rule sieves build partial entities; learned stage ranks them with
    /// cluster-level features.
    Hybrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierKind {
    Forest,
    Logistic,
}

/// One row of the settings matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationSetting {
    pub name: String,
    pub mode: SystemMode,
    pub cluster_source: ClusterFeatureSource,
    pub use_embeddings: bool,
    pub use_rule_sieves: bool,
    /// Runs the rule sieves in reverse order (order-sensitivity row).
    pub reverse_sieves: bool,
    pub classifier: ClassifierKind,
    pub detection: DetectionMode,
}

impl AblationSetting {
    fn sieve_config(&self) -> SieveConfig {
        if !self.use_rule_sieves {
            return SieveConfig::none();
        }
        let mut cfg = SieveConfig::default();
        if self.reverse_sieves {
            cfg.order = SieveName::ALL.iter().rev().copied().collect();
        }
        cfg
    }

    fn feature_mode(&self) -> Mode {
        match self.mode {
            SystemMode::MentionPair => Mode::MentionPair,
            _ => Mode::Hybrid,
        }
    }
}

/// Shared knobs for every row: classifier hyper-parameters, resolver
/// thresholds, and the evaluation policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationConfig {
    pub forest: GridPoint,
    pub logistic: LogisticParams,
    pub resolver: ResolverConfig,
    pub policy: EvalPolicy,
}

impl Default for AblationConfig {
    fn default() -> Self {
        AblationConfig {
            forest: GridPoint::default(),
            logistic: LogisticParams::default(),
            resolver: ResolverConfig::default(),
            policy: EvalPolicy::GoldAnaphoricOnly,
        }
    }
}

/// One settings row with its evaluation result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub setting: AblationSetting,
    pub report: EvalReport,
}

/// The default matrix, mirroring the published settings table: baselines,
/// the hybrid system under gold/system cluster features with embeddings and
/// rule sieves toggled, a reversed sieve order, and a logistic-regression
/// swap.
pub fn standard_matrix() -> Vec<AblationSetting> {
    let base = AblationSetting {
        name: String::new(),
        mode: SystemMode::Hybrid,
        cluster_source: ClusterFeatureSource::System,
        use_embeddings: true,
        use_rule_sieves: true,
        reverse_sieves: false,
        classifier: ClassifierKind::Forest,
        detection: DetectionMode::FromAnnotations,
    };
    let named = |name: &str, s: AblationSetting| AblationSetting {
        name: name.to_string(),
        ..s
    };
    vec![
        named(
            "rule-only",
            AblationSetting {
                mode: SystemMode::RuleOnly,
                use_embeddings: false,
                ..base.clone()
            },
        ),
        named(
            "mention-pair",
            AblationSetting {
                mode: SystemMode::MentionPair,
                use_embeddings: false,
                use_rule_sieves: false,
                ..base.clone()
            },
        ),
        named(
            "hybrid-gold-emb-sieves",
            AblationSetting {
                cluster_source: ClusterFeatureSource::Gold,
                detection: DetectionMode::FromGold,
                ..base.clone()
            },
        ),
        named(
            "hybrid-system-noemb-sieves",
            AblationSetting {
                use_embeddings: false,
                ..base.clone()
            },
        ),
        named("hybrid-system-emb-sieves", base.clone()),
        named(
            "hybrid-gold-noemb-nosieves",
            AblationSetting {
                cluster_source: ClusterFeatureSource::Gold,
                detection: DetectionMode::FromGold,
                use_embeddings: false,
                use_rule_sieves: false,
                ..base.clone()
            },
        ),
        named(
            "hybrid-gold-emb-nosieves",
            AblationSetting {
                cluster_source: ClusterFeatureSource::Gold,
                detection: DetectionMode::FromGold,
                use_rule_sieves: false,
                ..base.clone()
            },
        ),
        named(
            "hybrid-system-emb-sieves-reversed",
            AblationSetting {
                reverse_sieves: true,
                ..base.clone()
            },
        ),
        named(
            "logistic-system-emb-sieves",
            AblationSetting {
                classifier: ClassifierKind::Logistic,
                ..base
            },
        ),
    ]
}

/// Trains (if the mode has a learned stage) and evaluates one setting.
pub fn run_setting(
    setting: &AblationSetting,
    train: &[Document],
    test: &[Document],
    lex: &Lexicons,
    embeddings: Option<&EmbeddingTable>,
    cfg: &AblationConfig,
    seed: u64,
) -> Result<AblationRow> {
    let sieve_cfg = setting.sieve_config();
    sieve_cfg.validate()?;
    cfg.resolver.validate()?;

    let classifier = match setting.mode {
        SystemMode::RuleOnly => None,
        _ => Some(train_classifier(setting, train, lex, embeddings, cfg, seed)?),
    };

    let emb = if setting.use_embeddings { embeddings } else { None };
    let layout = FeatureLayout::new(setting.feature_mode(), emb.map(|t| t.dim()))?;
    let vocab = FeatureVocab::build(train);

    let mut per_doc: Vec<(Vec<crate::mention::Mention>, Vec<Resolution>)> = Vec::new();
    for doc in test {
        let mentions = detect_mentions(doc, lex, setting.detection, HeadRule::default())?;
        let resolutions = match &classifier {
            None => {
                let (_, res) =
                    resolve_document(doc, &mentions, &sieve_cfg, &cfg.resolver, None, lex)?;
                res
            }
            Some(model) => {
                let ctx = FeatureContext::new(
                    doc,
                    &mentions,
                    lex,
                    &vocab,
                    layout,
                    emb,
                    setting.cluster_source,
                )?;
                let scorer = ClassifierScorer::new(model, &ctx)?;
                let (_, res) = resolve_document(
                    doc,
                    &mentions,
                    &sieve_cfg,
                    &cfg.resolver,
                    Some(&scorer),
                    lex,
                )?;
                res
            }
        };
        per_doc.push((mentions, resolutions));
    }
    let items: Vec<(&Document, &[crate::mention::Mention], &[Resolution])> = test
        .iter()
        .zip(&per_doc)
        .map(|(d, (m, r))| (d, m.as_slice(), r.as_slice()))
        .collect();
    let report = evaluate(&items, cfg.policy)?;
    Ok(AblationRow {
        setting: setting.clone(),
        report,
    })
}

/// Trains the learned stage for a setting on `train`.
pub fn train_classifier(
    setting: &AblationSetting,
    train: &[Document],
    lex: &Lexicons,
    embeddings: Option<&EmbeddingTable>,
    cfg: &AblationConfig,
    seed: u64,
) -> Result<Classifier> {
    if setting.mode == SystemMode::RuleOnly {
        return Err(Error::Config(
            "the rule-only mode has no learned stage to train".into(),
        ));
    }
    if setting.use_embeddings && embeddings.is_none() {
        return Err(Error::Config(
            "setting requests embeddings but no table was provided".into(),
        ));
    }
    let emb = if setting.use_embeddings { embeddings } else { None };
    let layout = FeatureLayout::new(setting.feature_mode(), emb.map(|t| t.dim()))?;
    let sieve_cfg = setting.sieve_config();
    let vocab = FeatureVocab::build(train);
    let prepared: Vec<_> = train
        .iter()
        .map(|d| {
            prepare_document(d.clone(), lex, &sieve_cfg, setting.detection, HeadRule::default())
        })
        .collect::<Result<_>>()?;
    let examples = build_training_set(&prepared, layout, setting.cluster_source, lex, &vocab, emb)?;
    let categorical = layout.categorical_slots();
    let data = TrainData::from_examples(&examples, &categorical)?;
    Ok(match setting.classifier {
        ClassifierKind::Forest => Classifier::Forest(train_forest(&data, cfg.forest, seed)?),
        ClassifierKind::Logistic => {
            Classifier::Logistic(train_logistic(&data, cfg.logistic.clone())?)
        }
    })
}

/// Runs every setting in the matrix; one result row per setting, in order.
pub fn ablation_run(
    matrix: &[AblationSetting],
    train: &[Document],
    test: &[Document],
    lex: &Lexicons,
    embeddings: Option<&EmbeddingTable>,
    cfg: &AblationConfig,
    seed: u64,
) -> Result<Vec<AblationRow>> {
    matrix
        .iter()
        .map(|s| run_setting(s, train, test, lex, embeddings, cfg, seed))
        .collect()
}
