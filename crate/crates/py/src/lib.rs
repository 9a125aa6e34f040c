//! Python bindings for the pronoun-resolution engine.
//!
//! Exposes the corpus format, synthetic-corpus generator, embedding tables,
//! model training/persistence, and the resolver as a small extension module.
//! Reports (generation stats, cross-validation, evaluation) cross the
//! boundary as plain dicts so Python callers need no wrapper types.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use std::path::PathBuf;

use sievecoref::ablation::{ClassifierKind, SystemMode};
use sievecoref::corpus::{parse_conll, read_corpus, write_conll, Document};
use sievecoref::embedding::{EmbeddingTable, OovPolicy};
use sievecoref::engine::{
    check_model_compatibility, dump_records, eval_dump, parse_dump, render_dump, resolve_corpus,
    train_model, DumpRecord, SavedModel, TrainOptions,
};
use sievecoref::features::{ClusterFeatureSource, Mode};
use sievecoref::learner::cv::CvReport;
use sievecoref::learner::forest::GridPoint;
use sievecoref::learner::tree::Criterion;
use sievecoref::learner::Classifier;
use sievecoref::lexicon::Lexicons;
use sievecoref::mention::DetectionMode;
use sievecoref::resolver::{EvalPolicy, Provenance, ResolverConfig};
use sievecoref::sieves::SieveConfig;
use sievecoref::synth::{gen_corpus, synthetic_embeddings, SynthSpec};

fn py_err(e: sievecoref::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn io_err(e: std::io::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

// ---------------------------------------------------------------------------
// string -> enum parsers (mirror the CLI's spellings)
// ---------------------------------------------------------------------------

fn parse_mode(s: &str) -> PyResult<SystemMode> {
    match s {
        "hybrid" => Ok(SystemMode::Hybrid),
        "mention-pair" => Ok(SystemMode::MentionPair),
        "rule-only" => Ok(SystemMode::RuleOnly),
        _ => Err(PyValueError::new_err(format!(
            "unknown mode {s:?}; expected \"hybrid\", \"mention-pair\", or \"rule-only\""
        ))),
    }
}

fn parse_cluster_source(s: &str) -> PyResult<ClusterFeatureSource> {
    match s {
        "system" => Ok(ClusterFeatureSource::System),
        "gold" => Ok(ClusterFeatureSource::Gold),
        _ => Err(PyValueError::new_err(format!(
            "unknown cluster source {s:?}; expected \"system\" or \"gold\""
        ))),
    }
}

fn parse_detection(s: &str) -> PyResult<DetectionMode> {
    match s {
        "from-annotations" => Ok(DetectionMode::FromAnnotations),
        "from-gold" => Ok(DetectionMode::FromGold),
        _ => Err(PyValueError::new_err(format!(
            "unknown detection mode {s:?}; expected \"from-annotations\" or \"from-gold\""
        ))),
    }
}

fn parse_classifier(s: &str) -> PyResult<ClassifierKind> {
    match s {
        "forest" => Ok(ClassifierKind::Forest),
        "logistic" => Ok(ClassifierKind::Logistic),
        _ => Err(PyValueError::new_err(format!(
            "unknown classifier {s:?}; expected \"forest\" or \"logistic\""
        ))),
    }
}

fn parse_criterion(s: &str) -> PyResult<Criterion> {
    match s {
        "gini" => Ok(Criterion::Gini),
        "entropy" => Ok(Criterion::Entropy),
        _ => Err(PyValueError::new_err(format!(
            "unknown split criterion {s:?}; expected \"gini\" or \"entropy\""
        ))),
    }
}

fn parse_policy(s: &str) -> PyResult<EvalPolicy> {
    match s {
        "all-pronouns" => Ok(EvalPolicy::AllPronouns),
        "gold-anaphoric-only" => Ok(EvalPolicy::GoldAnaphoricOnly),
        _ => Err(PyValueError::new_err(format!(
            "unknown evaluation policy {s:?}; expected \"all-pronouns\" or \"gold-anaphoric-only\""
        ))),
    }
}

/// A lexicon directory, or the built-in miniature English set (the same
/// default the command-line tool uses).
fn load_lexicons(dir: &Option<PathBuf>) -> PyResult<Lexicons> {
    match dir {
        Some(d) => Lexicons::load_dir(d).map_err(py_err),
        None => Ok(Lexicons::miniature_english()),
    }
}

// ---------------------------------------------------------------------------
// serde -> Python conversion
// ---------------------------------------------------------------------------

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    match v {
        serde_json::Value::Null => Ok(py.None()),
        serde_json::Value::Bool(b) => b.into_py_any(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        serde_json::Value::String(s) => s.into_py_any(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

/// Serializes any `Serialize` report and converts it to nested dicts/lists.
fn report_to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

/// A list of annotated documents in the 13-column tab-separated format.
#[pyclass(frozen)]
struct Corpus {
    docs: Vec<Document>,
}

#[pymethods]
impl Corpus {
    /// Generates a synthetic annotated corpus.
    ///
    /// Returns ``(corpus, stats)`` where ``stats`` is a dict with document,
    /// sentence, token, pronoun, chain, and gold-mention counts.  The same
    /// ``seed`` always yields the same corpus.
    #[staticmethod]
    #[pyo3(signature = (n_docs=10, seed=0, *, entities=None, mentions_per_entity=None,
                        pronoun_rate=None, quote_rate=None, distractor_rate=None,
                        max_chain_gap=None))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        py: Python<'_>,
        n_docs: usize,
        seed: u64,
        entities: Option<usize>,
        mentions_per_entity: Option<usize>,
        pronoun_rate: Option<f64>,
        quote_rate: Option<f64>,
        distractor_rate: Option<f64>,
        max_chain_gap: Option<usize>,
    ) -> PyResult<(Corpus, Py<PyAny>)> {
        let mut spec = SynthSpec::default();
        if let Some(v) = entities {
            spec.entities = v;
        }
        if let Some(v) = mentions_per_entity {
            spec.mentions_per_entity = v;
        }
        if let Some(v) = pronoun_rate {
            spec.pronoun_rate = v;
        }
        if let Some(v) = quote_rate {
            spec.quote_rate = v;
        }
        if let Some(v) = distractor_rate {
            spec.distractor_rate = v;
        }
        if let Some(v) = max_chain_gap {
            spec.max_chain_gap = v;
        }
        let (docs, stats) = gen_corpus(&spec, n_docs, seed).map_err(py_err)?;
        Ok((Corpus { docs }, report_to_py(py, &stats)?))
    }

    /// Parses documents from annotation text.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Corpus> {
        Ok(Corpus {
            docs: parse_conll(text).map_err(py_err)?,
        })
    }

    /// Reads documents from an annotation file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Corpus> {
        Ok(Corpus {
            docs: read_corpus(&path).map_err(py_err)?,
        })
    }

    /// Serializes the corpus back to annotation text.
    fn to_text(&self) -> String {
        write_conll(&self.docs)
    }

    /// Writes the corpus to a file.
    fn save(&self, path: PathBuf) -> PyResult<()> {
        std::fs::write(path, write_conll(&self.docs)).map_err(io_err)
    }

    /// Splits into ``(first n_train documents, rest)``.
    fn split(&self, n_train: usize) -> PyResult<(Corpus, Corpus)> {
        if n_train > self.docs.len() {
            return Err(PyValueError::new_err(format!(
                "cannot take {n_train} documents from a corpus of {}",
                self.docs.len()
            )));
        }
        Ok((
            Corpus {
                docs: self.docs[..n_train].to_vec(),
            },
            Corpus {
                docs: self.docs[n_train..].to_vec(),
            },
        ))
    }

    fn doc_ids(&self) -> Vec<String> {
        self.docs.iter().map(|d| d.id.clone()).collect()
    }

    fn token_count(&self) -> usize {
        self.docs.iter().map(|d| d.token_count()).sum()
    }

    fn __len__(&self) -> usize {
        self.docs.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Corpus({} documents, {} tokens)",
            self.docs.len(),
            self.token_count()
        )
    }
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

/// A token -> vector table used for the embedding feature slots.
#[pyclass(frozen)]
struct Embeddings {
    table: EmbeddingTable,
}

#[pymethods]
impl Embeddings {
    /// Builds deterministic synthetic vectors covering every token in the
    /// corpus (animate and inanimate nouns land in separated regions).
    #[staticmethod]
    #[pyo3(signature = (corpus, dim=16, seed=0))]
    fn synthetic(corpus: PyRef<'_, Corpus>, dim: usize, seed: u64) -> PyResult<Embeddings> {
        Ok(Embeddings {
            table: synthetic_embeddings(&corpus.docs, dim, seed).map_err(py_err)?,
        })
    }

    /// Loads a text table (``token v1 v2 ...`` per line).
    ///
    /// ``oov`` selects what unknown tokens map to: ``"zero"`` or ``"mean"``.
    #[staticmethod]
    #[pyo3(signature = (path, oov="zero"))]
    fn load(path: PathBuf, oov: &str) -> PyResult<Embeddings> {
        let policy = match oov {
            "zero" => OovPolicy::ZeroVector,
            "mean" => OovPolicy::MeanVector,
            _ => {
                return Err(PyValueError::new_err(format!(
                    "unknown oov policy {oov:?}; expected \"zero\" or \"mean\""
                )))
            }
        };
        Ok(Embeddings {
            table: EmbeddingTable::load(&path, policy).map_err(py_err)?,
        })
    }

    fn dim(&self) -> usize {
        self.table.dim()
    }

    fn __len__(&self) -> usize {
        self.table.len()
    }

    fn __contains__(&self, token: &str) -> bool {
        self.table.contains(token)
    }

    fn __repr__(&self) -> String {
        format!("Embeddings({} tokens, dim {})", self.table.len(), self.table.dim())
    }
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

/// A trained pronoun-linking model plus its training metadata.
#[pyclass(frozen)]
struct Model {
    inner: SavedModel,
    cv: Option<CvReport>,
    n_examples: Option<usize>,
    n_documents: Option<usize>,
}

#[pymethods]
impl Model {
    /// Trains a model on a gold-annotated corpus.
    ///
    /// ``mode`` is ``"hybrid"`` (rule sieves build partial entities first) or
    /// ``"mention-pair"`` (singleton candidates, pair features only).
    /// ``cv_folds=0`` skips cross-validation; otherwise ``cv`` on the result
    /// holds the fold scores.  Training is deterministic per seed.
    #[staticmethod]
    #[pyo3(signature = (corpus, *, mode="hybrid", cluster_source="system",
                        detection="from-annotations", classifier="forest",
                        n_estimators=100, max_depth=None, criterion="gini",
                        merge_threshold=0.5, cv_folds=0, seed=0,
                        embeddings=None, rule_sieves=true, sentence_window=3,
                        lexicons=None))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        corpus: PyRef<'_, Corpus>,
        mode: &str,
        cluster_source: &str,
        detection: &str,
        classifier: &str,
        n_estimators: usize,
        max_depth: Option<usize>,
        criterion: &str,
        merge_threshold: f64,
        cv_folds: usize,
        seed: u64,
        embeddings: Option<PyRef<'_, Embeddings>>,
        rule_sieves: bool,
        sentence_window: usize,
        lexicons: Option<PathBuf>,
    ) -> PyResult<Model> {
        let mut sieves = if rule_sieves {
            SieveConfig::default()
        } else {
            SieveConfig::none()
        };
        sieves.sentence_window = sentence_window;
        let opts = TrainOptions {
            mode: parse_mode(mode)?,
            cluster_source: parse_cluster_source(cluster_source)?,
            detection: parse_detection(detection)?,
            classifier: parse_classifier(classifier)?,
            forest: GridPoint {
                max_depth,
                n_estimators,
                criterion: parse_criterion(criterion)?,
            },
            sieves,
            merge_threshold,
            cv_folds,
            seed,
            ..TrainOptions::default()
        };
        let table = embeddings.as_ref().map(|e| &e.table);
        let lex = load_lexicons(&lexicons)?;
        let outcome = train_model(&corpus.docs, &lex, table, &opts).map_err(py_err)?;
        Ok(Model {
            inner: outcome.model,
            cv: outcome.cv,
            n_examples: Some(outcome.n_examples),
            n_documents: Some(outcome.n_documents),
        })
    }

    /// Loads a model saved with :meth:`save` (training metadata is not
    /// persisted, so ``cv``/``n_examples``/``n_documents`` are ``None``).
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Model> {
        Ok(Model {
            inner: SavedModel::load(&path).map_err(py_err)?,
            cv: None,
            n_examples: None,
            n_documents: None,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    /// Cross-validation report as a dict, or ``None`` if not computed.
    fn cv(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        match &self.cv {
            Some(report) => report_to_py(py, report),
            None => Ok(py.None()),
        }
    }

    #[getter]
    fn mode(&self) -> &'static str {
        match self.inner.layout.mode {
            Mode::Hybrid => "hybrid",
            Mode::MentionPair => "mention-pair",
        }
    }

    #[getter]
    fn classifier(&self) -> &'static str {
        match self.inner.classifier {
            Classifier::Forest(_) => "forest",
            Classifier::Logistic(_) => "logistic",
        }
    }

    #[getter]
    fn merge_threshold(&self) -> f64 {
        self.inner.merge_threshold
    }

    #[getter]
    fn uses_embeddings(&self) -> bool {
        self.inner.layout.emb_dim.is_some()
    }

    #[getter]
    fn n_examples(&self) -> Option<usize> {
        self.n_examples
    }

    #[getter]
    fn n_documents(&self) -> Option<usize> {
        self.n_documents
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(mode={}, classifier={}, threshold={}, embeddings={})",
            self.mode(),
            self.classifier(),
            self.inner.merge_threshold,
            self.uses_embeddings()
        )
    }
}

// ---------------------------------------------------------------------------
// Resolved
// ---------------------------------------------------------------------------

/// Per-pronoun resolution decisions for a corpus.
#[pyclass(frozen)]
struct Resolved {
    records: Vec<DumpRecord>,
}

#[pymethods]
impl Resolved {
    /// The 7-column tab-separated dump (one line per detected pronoun).
    fn to_tsv(&self) -> String {
        render_dump(&self.records)
    }

    #[staticmethod]
    fn from_tsv(text: &str) -> PyResult<Resolved> {
        Ok(Resolved {
            records: parse_dump(text).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Resolved> {
        let text = std::fs::read_to_string(path).map_err(io_err)?;
        Self::from_tsv(&text)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        std::fs::write(path, self.to_tsv()).map_err(io_err)
    }

    /// One dict per pronoun: doc, sentence/start/end, form, linked, score,
    /// provenance (``"rule"``/``"model"``), and antecedent member spans.
    fn records(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let list = PyList::empty(py);
        for r in &self.records {
            let d = PyDict::new(py);
            d.set_item("doc", &r.doc_id)?;
            d.set_item("sentence", r.pronoun.sent)?;
            d.set_item("start", r.pronoun.start)?;
            d.set_item("end", r.pronoun.end)?;
            d.set_item("form", &r.form)?;
            d.set_item("linked", r.linked)?;
            d.set_item("score", r.score)?;
            d.set_item(
                "provenance",
                match r.provenance {
                    Provenance::Rule => "rule",
                    Provenance::Model => "model",
                },
            )?;
            d.set_item(
                "members",
                r.members.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            )?;
            list.append(d)?;
        }
        list.into_py_any(py)
    }

    /// Scores the decisions against the corpus's gold chains; returns a dict
    /// with linked/correct/gold_anaphoric counts and precision/recall/f1.
    #[pyo3(signature = (corpus, policy="gold-anaphoric-only"))]
    fn evaluate(
        &self,
        py: Python<'_>,
        corpus: PyRef<'_, Corpus>,
        policy: &str,
    ) -> PyResult<Py<PyAny>> {
        let report =
            eval_dump(&self.records, &corpus.docs, parse_policy(policy)?).map_err(py_err)?;
        report_to_py(py, &report)
    }

    fn linked_count(&self) -> usize {
        self.records.iter().filter(|r| r.linked).count()
    }

    fn __len__(&self) -> usize {
        self.records.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Resolved({} pronouns, {} linked)",
            self.records.len(),
            self.linked_count()
        )
    }
}

// ---------------------------------------------------------------------------
// resolve
// ---------------------------------------------------------------------------

/// Resolves every detected pronoun in the corpus.
///
/// Without a model only the rule sieves run (first/second-person pronouns in
/// reported speech); with one, sieve-unresolved pronouns are linked to the
/// best-scoring preceding entity at or above ``merge_threshold``.  When
/// ``merge_threshold`` is omitted the model's stored threshold (or 0.5) is
/// used.  ``rule_sieves=False`` disables the sieve pipeline and
/// ``reverse_sieves=True`` runs it in reverse precision order.
#[pyfunction]
#[pyo3(signature = (corpus, model=None, *, embeddings=None, merge_threshold=None,
                    sentence_window=3, rule_sieves=true, reverse_sieves=false,
                    detection="from-annotations", lexicons=None))]
#[allow(clippy::too_many_arguments)]
fn resolve(
    corpus: PyRef<'_, Corpus>,
    model: Option<PyRef<'_, Model>>,
    embeddings: Option<PyRef<'_, Embeddings>>,
    merge_threshold: Option<f64>,
    sentence_window: usize,
    rule_sieves: bool,
    reverse_sieves: bool,
    detection: &str,
    lexicons: Option<PathBuf>,
) -> PyResult<Resolved> {
    let mut sieves = if rule_sieves {
        SieveConfig::default()
    } else {
        SieveConfig::none()
    };
    sieves.sentence_window = sentence_window;
    if reverse_sieves {
        sieves.order.reverse();
    }
    let saved = model.as_ref().map(|m| &m.inner);
    let table = embeddings.as_ref().map(|e| &e.table);
    if let Some(m) = saved {
        let mode = match m.layout.mode {
            Mode::Hybrid => SystemMode::Hybrid,
            Mode::MentionPair => SystemMode::MentionPair,
        };
        check_model_compatibility(m, mode, table).map_err(py_err)?;
    }
    let resolver = ResolverConfig {
        merge_threshold: merge_threshold
            .unwrap_or_else(|| saved.map(|m| m.merge_threshold).unwrap_or(0.5)),
        sentence_window,
        ..ResolverConfig::default()
    };
    let lex = load_lexicons(&lexicons)?;
    let resolved = resolve_corpus(
        &corpus.docs,
        saved,
        &lex,
        table,
        &sieves,
        &resolver,
        parse_detection(detection)?,
    )
    .map_err(py_err)?;
    Ok(Resolved {
        records: dump_records(&corpus.docs, &resolved),
    })
}

#[pymodule]
fn sievecoref_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Corpus>()?;
    m.add_class::<Embeddings>()?;
    m.add_class::<Model>()?;
    m.add_class::<Resolved>()?;
    m.add_function(wrap_pyfunction!(resolve, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
