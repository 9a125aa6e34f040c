//! Orchestration layer shared by the command-line tool and the language
//! bindings: model training and persistence, corpus-level resolution,
//! prediction dumps, dump-based evaluation, and plain-text report tables.

use crate::ablation::{AblationRow, ClassifierKind, SystemMode};
use crate::corpus::{Document, Span};
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::features::{ClusterFeatureSource, FeatureContext, FeatureLayout, FeatureVocab};
use crate::learner::cv::{cross_validate, CvReport, GridReport};
use crate::learner::forest::{train_forest, GridPoint};
use crate::learner::logistic::{train_logistic, LogisticParams};
use crate::learner::sampling::{build_training_set, prepare_document, TrainingExample};
use crate::learner::{Classifier, TrainData};
use crate::lexicon::Lexicons;
use crate::mention::{detect_mentions, DetectionMode, HeadRule, Mention};
use crate::resolver::{
    evaluate, resolve_document, ClassifierScorer, EvalPolicy, EvalReport, LinkStatus,
    Provenance, Resolution, ResolverConfig,
};
use crate::sieves::SieveConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// On-disk model format version; bumped on breaking layout changes.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A trained pronoun-linking model with everything needed to replay it:
/// the classifier, the feature layout and codebooks it was trained with,
/// the cluster-feature source, and the decision threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub format_version: u32,
    pub cluster_source: ClusterFeatureSource,
    pub layout: FeatureLayout,
    pub vocab: FeatureVocab,
    pub merge_threshold: f64,
    pub classifier: Classifier,
}

impl SavedModel {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Model(format!("serialization failed: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: SavedModel =
            serde_json::from_str(text).map_err(|e| Error::Model(format!("parse failed: {e}")))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Model(format!(
                "unsupported model format version {} (this build reads {})",
                model.format_version, MODEL_FORMAT_VERSION
            )));
        }
        if model.classifier.n_features() != model.layout.len() {
            return Err(Error::Model(format!(
                "classifier width {} does not match layout width {}",
                model.classifier.n_features(),
                model.layout.len()
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Everything `train_model` needs besides the corpus itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub mode: SystemMode,
    pub cluster_source: ClusterFeatureSource,
    pub detection: DetectionMode,
    pub classifier: ClassifierKind,
    pub forest: GridPoint,
    pub logistic: LogisticParams,
    pub sieves: SieveConfig,
    pub merge_threshold: f64,
    /// Cross-validation folds; 0 skips cross-validation.
    pub cv_folds: usize,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            mode: SystemMode::Hybrid,
            cluster_source: ClusterFeatureSource::System,
            detection: DetectionMode::FromAnnotations,
            classifier: ClassifierKind::Forest,
            forest: GridPoint::default(),
            logistic: LogisticParams::default(),
            sieves: SieveConfig::default(),
            merge_threshold: ResolverConfig::default().merge_threshold,
            cv_folds: 10,
            seed: 0,
        }
    }
}

pub struct TrainOutcome {
    pub model: SavedModel,
    /// Cross-validation estimate; absent when `cv_folds` is 0.
    pub cv: Option<CvReport>,
    pub n_examples: usize,
    pub n_documents: usize,
}

/// Builds a training set from gold-annotated documents.
pub fn build_examples(
    docs: &[Document],
    lex: &Lexicons,
    embeddings: Option<&EmbeddingTable>,
    opts: &TrainOptions,
) -> Result<(Vec<TrainingExample>, FeatureLayout, FeatureVocab)> {
    if opts.mode == SystemMode::RuleOnly {
        return Err(Error::Config(
            "the rule-only mode has no learned stage to train".into(),
        ));
    }
    let layout = FeatureLayout::new(
        match opts.mode {
            SystemMode::MentionPair => crate::features::Mode::MentionPair,
            _ => crate::features::Mode::Hybrid,
        },
        embeddings.map(|t| t.dim()),
    )?;
    let vocab = FeatureVocab::build(docs);
    let prepared: Vec<_> = docs
        .iter()
        .map(|d| prepare_document(d.clone(), lex, &opts.sieves, opts.detection, HeadRule::default()))
        .collect::<Result<_>>()?;
    let examples =
        build_training_set(&prepared, layout, opts.cluster_source, lex, &vocab, embeddings)?;
    Ok((examples, layout, vocab))
}

/// Trains the learned stage: optional cross-validation for the report, then
/// a final fit on the full training set.
pub fn train_model(
    docs: &[Document],
    lex: &Lexicons,
    embeddings: Option<&EmbeddingTable>,
    opts: &TrainOptions,
) -> Result<TrainOutcome> {
    let (examples, layout, vocab) = build_examples(docs, lex, embeddings, opts)?;
    let categorical = layout.categorical_slots();
    let cv = if opts.cv_folds > 0 && opts.classifier == ClassifierKind::Forest {
        Some(cross_validate(
            &examples,
            &categorical,
            opts.forest,
            opts.cv_folds,
            opts.seed,
        )?)
    } else {
        None
    };
    let data = TrainData::from_examples(&examples, &categorical)?;
    let classifier = match opts.classifier {
        ClassifierKind::Forest => Classifier::Forest(train_forest(&data, opts.forest, opts.seed)?),
        ClassifierKind::Logistic => {
            Classifier::Logistic(train_logistic(&data, opts.logistic.clone())?)
        }
    };
    Ok(TrainOutcome {
        model: SavedModel {
            format_version: MODEL_FORMAT_VERSION,
            cluster_source: opts.cluster_source,
            layout,
            vocab,
            merge_threshold: opts.merge_threshold,
            classifier,
        },
        cv,
        n_examples: examples.len(),
        n_documents: docs.len(),
    })
}

/// One document's resolution output, with the inputs needed to interpret it.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedDoc {
    /// Position of the document in the input slice.
    pub doc_index: usize,
    pub doc_id: String,
    pub mentions: Vec<Mention>,
    pub resolutions: Vec<Resolution>,
}

/// Checks that the run configuration agrees with what the model was
/// trained on.
pub fn check_model_compatibility(
    model: &SavedModel,
    mode: SystemMode,
    embeddings: Option<&EmbeddingTable>,
) -> Result<()> {
    let requested = match mode {
        SystemMode::MentionPair => crate::features::Mode::MentionPair,
        SystemMode::Hybrid => crate::features::Mode::Hybrid,
        SystemMode::RuleOnly => {
            return Err(Error::Config(
                "a model cannot be applied in rule-only mode".into(),
            ))
        }
    };
    if model.layout.mode != requested {
        return Err(Error::ModelModeMismatch {
            model: model.layout.mode,
            requested,
        });
    }
    match (model.layout.emb_dim, embeddings) {
        (Some(_), None) => Err(Error::Config(
            "model was trained with embedding features but no table was provided".into(),
        )),
        (Some(d), Some(t)) if t.dim() != d => Err(Error::DimensionMismatch {
            expected: d,
            found: t.dim(),
        }),
        _ => Ok(()),
    }
}

/// Resolves every document, in parallel, deterministically. `model` absent
/// means the rule-only pathway. Results are ordered by document id.
pub fn resolve_corpus(
    docs: &[Document],
    model: Option<&SavedModel>,
    lex: &Lexicons,
    embeddings: Option<&EmbeddingTable>,
    sieves: &SieveConfig,
    resolver: &ResolverConfig,
    detection: DetectionMode,
) -> Result<Vec<ResolvedDoc>> {
    let mut resolved: Vec<ResolvedDoc> = docs
        .par_iter()
        .enumerate()
        .map(|(i, doc)| {
            let mentions = detect_mentions(doc, lex, detection, HeadRule::default())?;
            let resolutions = match model {
                None => {
                    let (_, res) = resolve_document(doc, &mentions, sieves, resolver, None, lex)?;
                    res
                }
                Some(m) => {
                    let ctx = FeatureContext::new(
                        doc,
                        &mentions,
                        lex,
                        &m.vocab,
                        m.layout,
                        embeddings,
                        m.cluster_source,
                    )?;
                    let scorer = ClassifierScorer::new(&m.classifier, &ctx)?;
                    let (_, res) =
                        resolve_document(doc, &mentions, sieves, resolver, Some(&scorer), lex)?;
                    res
                }
            };
            Ok(ResolvedDoc {
                doc_index: i,
                doc_id: doc.id.clone(),
                mentions,
                resolutions,
            })
        })
        .collect::<Result<_>>()?;
    resolved.sort_by(|a, b| a.doc_id.cmp(&b.doc_id).then(a.doc_index.cmp(&b.doc_index)));
    Ok(resolved)
}

/// One prediction-dump record: everything known about one pronoun decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpRecord {
    pub doc_id: String,
    pub pronoun: Span,
    pub form: String,
    pub linked: bool,
    pub score: f64,
    pub provenance: Provenance,
    /// Antecedent entity member spans at link time; empty if not linked.
    pub members: Vec<Span>,
}

fn provenance_name(p: Provenance) -> &'static str {
    match p {
        Provenance::Rule => "rule",
        Provenance::Model => "model",
    }
}

fn parse_provenance(s: &str) -> Result<Provenance> {
    match s {
        "rule" => Ok(Provenance::Rule),
        "model" => Ok(Provenance::Model),
        other => Err(Error::Config(format!("unknown provenance {other:?}"))),
    }
}

fn parse_span(s: &str) -> Result<Span> {
    let bad = || Error::Config(format!("malformed span {s:?}, expected sent:start-end"));
    let (sent, rest) = s.split_once(':').ok_or_else(bad)?;
    let (start, end) = rest.split_once('-').ok_or_else(bad)?;
    Ok(Span::new(
        sent.parse().map_err(|_| bad())?,
        start.parse().map_err(|_| bad())?,
        end.parse().map_err(|_| bad())?,
    ))
}

/// Flattens resolved documents into dump records, one per pronoun decision.
pub fn dump_records(docs: &[Document], resolved: &[ResolvedDoc]) -> Vec<DumpRecord> {
    let mut records = Vec::new();
    for rd in resolved {
        let doc = &docs[rd.doc_index];
        for res in &rd.resolutions {
            let pron = &rd.mentions[res.pronoun];
            records.push(DumpRecord {
                doc_id: rd.doc_id.clone(),
                pronoun: pron.span,
                form: doc.span_text(pron.span),
                linked: res.status == LinkStatus::Linked,
                score: res.score,
                provenance: res.provenance,
                members: res
                    .antecedent_members
                    .iter()
                    .map(|m| rd.mentions[*m].span)
                    .collect(),
            });
        }
    }
    records
}

/// Renders dump records in the line-oriented prediction format: one
/// tab-separated record per pronoun.
pub fn render_dump(records: &[DumpRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let members = if r.members.is_empty() {
            "-".to_string()
        } else {
            r.members
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{:.6}\t{}\t{}\n",
            r.doc_id,
            r.pronoun,
            r.form,
            if r.linked { "LINKED" } else { "NONANAPHORIC" },
            r.score,
            provenance_name(r.provenance),
            members
        ));
    }
    out
}

pub fn parse_dump(text: &str) -> Result<Vec<DumpRecord>> {
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 7 {
            return Err(Error::MalformedLine {
                line: lineno + 1,
                expected: 7,
                found: cols.len(),
            });
        }
        let linked = match cols[3] {
            "LINKED" => true,
            "NONANAPHORIC" => false,
            other => {
                return Err(Error::Config(format!(
                    "line {}: unknown link status {other:?}",
                    lineno + 1
                )))
            }
        };
        let members = if cols[6] == "-" {
            Vec::new()
        } else {
            cols[6].split(',').map(parse_span).collect::<Result<_>>()?
        };
        records.push(DumpRecord {
            doc_id: cols[0].to_string(),
            pronoun: parse_span(cols[1])?,
            form: cols[2].to_string(),
            linked,
            score: cols[4]
                .parse()
                .map_err(|_| Error::Config(format!("line {}: bad score", lineno + 1)))?,
            provenance: parse_provenance(cols[5])?,
            members,
        });
    }
    Ok(records)
}

/// Evaluates a prediction dump against gold chains, reproducing the
/// in-memory evaluation semantics from the serialized records alone.
pub fn eval_dump(records: &[DumpRecord], gold: &[Document], policy: EvalPolicy) -> Result<EvalReport> {
    if !gold.iter().any(|d| d.has_gold()) {
        return Err(Error::MissingGold);
    }
    let chains: BTreeMap<&str, Vec<&[Span]>> = gold
        .iter()
        .map(|d| {
            (
                d.id.as_str(),
                d.gold_chains.iter().map(|c| c.spans.as_slice()).collect(),
            )
        })
        .collect();
    let empty: Vec<&[Span]> = Vec::new();
    let (mut linked, mut correct, mut gold_anaphoric) = (0usize, 0usize, 0usize);
    for r in records {
        let doc_chains = chains.get(r.doc_id.as_str()).unwrap_or(&empty);
        let pron_chain = doc_chains.iter().find(|c| c.contains(&r.pronoun));
        let anaphoric = pron_chain
            .map(|c| c.iter().any(|s| *s < r.pronoun))
            .unwrap_or(false);
        if policy == EvalPolicy::GoldAnaphoricOnly && !anaphoric {
            continue;
        }
        if anaphoric {
            gold_anaphoric += 1;
        }
        if r.linked {
            linked += 1;
            if let Some(chain) = pron_chain {
                if r.members.iter().any(|m| chain.contains(m)) {
                    correct += 1;
                }
            }
        }
    }
    Ok(EvalReport::from_counts(linked, correct, gold_anaphoric))
}

/// Evaluates resolved documents directly (no dump round-trip).
pub fn eval_resolved(
    docs: &[Document],
    resolved: &[ResolvedDoc],
    policy: EvalPolicy,
) -> Result<EvalReport> {
    let items: Vec<(&Document, &[Mention], &[Resolution])> = resolved
        .iter()
        .map(|rd| {
            (
                &docs[rd.doc_index],
                rd.mentions.as_slice(),
                rd.resolutions.as_slice(),
            )
        })
        .collect();
    evaluate(&items, policy)
}

/// Fixed-field text table for an evaluation report.
pub fn render_eval_text(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<20} {:>10} {:>10} {:>10}\n",
        "measure", "precision", "recall", "f1"
    ));
    out.push_str(&format!(
        "{:<20} {:>10.4} {:>10.4} {:>10.4}\n",
        "pronouns", report.precision, report.recall, report.f1
    ));
    out.push_str(&format!(
        "linked {}  correct {}  gold-anaphoric {}\n",
        report.linked, report.correct, report.gold_anaphoric
    ));
    out
}

pub fn render_cv_text(report: &CvReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<8} {:>10} {:>10} {:>10}\n",
        "fold", "precision", "recall", "f1"
    ));
    for (i, f) in report.folds.iter().enumerate() {
        out.push_str(&format!(
            "{:<8} {:>10.4} {:>10.4} {:>10.4}\n",
            i + 1,
            f.precision,
            f.recall,
            f.f1
        ));
    }
    out.push_str(&format!(
        "{:<8} {:>10.4} {:>10.4} {:>10.4}\n",
        "mean", report.mean_precision, report.mean_recall, report.mean_f1
    ));
    out
}

pub fn render_grid_text(report: &GridReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:<8} {:<10} {:>10} {:>10} {:>10}\n",
        "max_depth", "trees", "criterion", "precision", "recall", "f1"
    ));
    for r in &report.results {
        let depth = match r.point.max_depth {
            Some(d) => d.to_string(),
            None => "none".to_string(),
        };
        out.push_str(&format!(
            "{:<12} {:<8} {:<10} {:>10.4} {:>10.4} {:>10.4}\n",
            depth,
            r.point.n_estimators,
            r.point.criterion.name(),
            r.mean_precision,
            r.mean_recall,
            r.mean_f1
        ));
    }
    let best_f1 = report
        .results
        .iter()
        .find(|r| r.point == report.best)
        .map(|r| r.mean_f1)
        .unwrap_or(f64::NAN);
    out.push_str(&format!("best: {} (mean f1 {best_f1:.4})\n", report.best));
    out
}

pub fn render_ablation_text(rows: &[AblationRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<36} {:>10} {:>10} {:>10} {:>8} {:>8} {:>8}\n",
        "setting", "precision", "recall", "f1", "linked", "correct", "gold"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:<36} {:>10.4} {:>10.4} {:>10.4} {:>8} {:>8} {:>8}\n",
            row.setting.name,
            row.report.precision,
            row.report.recall,
            row.report.f1,
            row.report.linked,
            row.report.correct,
            row.report.gold_anaphoric
        ));
    }
    out
}
