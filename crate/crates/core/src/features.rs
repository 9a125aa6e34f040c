//! Feature extraction for pronoun–candidate pairs.
//!
//! A candidate is always an entity; in pair mode only the antecedent
//! *mention* (the candidate's member nearest to the pronoun) contributes,
//! while hybrid mode adds entity-level slots and, optionally, embedding
//! distances plus the raw head vectors. The pair-mode slots are a strict
//! subset of the hybrid slots with identical values for the same pair, so
//! models of the two modes are comparable.
//!
//! Slots are numbered 1..=54 here ("rows"); a [`FeatureLayout`] projects the
//! rows a mode uses into a dense vector.

use crate::attrs::{LatticeValue, PersonValue, ValueSet};
use crate::corpus::{Document, Token};
use crate::embedding::{euclidean, EmbeddingTable};
use crate::entity::{Entity, EntityStore};
use crate::error::{Error, Result};
use crate::lexicon::{Lexicons, PronounClass};
use crate::mention::{Mention, MentionKind, Role};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Pairing mode: score pronoun–mention pairs, or pronoun–entity pairs with
/// cluster-level evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    MentionPair,
    Hybrid,
}

/// Where entity-level slots read their cluster from: the sieve output, or
/// the gold chains (for upper-bound experiment rows).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterFeatureSource {
    #[default]
    System,
    Gold,
}

const SYMBOLIC_ROWS: usize = 51;

/// Rows available in pair mode: no entity-level evidence, no animacy/person
/// lattice slots, no embeddings.
const MENTION_PAIR_ROWS: [usize; 34] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, // pronoun side
    17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, // antecedent side
    38, 39, 40, 41, 42, 43, 44, 45, // pair side
];

/// Rows whose values are category codes rather than quantities.
const CATEGORICAL_ROWS: [usize; 25] = [
    6, 7, 8, 9, 10, 11, 14, 15, 16, 20, 21, 22, 23, 24, 25, 26, 31, 33, 34, 35, 37, 40, 48,
    49, 50,
];
// row 51 is a small code too, listed separately to keep the array literal
// readable in reports
const CATEGORICAL_ROWS_EXTRA: [usize; 1] = [51];

pub fn row_is_categorical(row: usize) -> bool {
    CATEGORICAL_ROWS.contains(&row) || CATEGORICAL_ROWS_EXTRA.contains(&row)
}

pub fn row_name(row: usize) -> &'static str {
    match row {
        1 => "pron-is-personal",
        2 => "pron-is-demonstrative",
        3 => "pron-is-reflexive",
        4 => "pron-is-third-person",
        5 => "pron-is-speech-form",
        6 => "pron-pos-left-1",
        7 => "pron-pos-left-2",
        8 => "pron-pos-left-3",
        9 => "pron-pos-right-1",
        10 => "pron-pos-right-2",
        11 => "pron-pos-right-3",
        12 => "pron-is-subject",
        13 => "pron-is-object",
        14 => "pron-number",
        15 => "pron-animacy",
        16 => "pron-person",
        17 => "ant-token-count",
        18 => "ant-is-pronoun",
        19 => "ant-is-demonstrative-phrase",
        20 => "ant-pos-left-1",
        21 => "ant-pos-left-2",
        22 => "ant-pos-left-3",
        23 => "ant-pos-right-1",
        24 => "ant-pos-right-2",
        25 => "ant-pos-right-3",
        26 => "ant-number",
        27 => "ant-is-subject",
        28 => "ant-is-object",
        29 => "entity-member-count",
        30 => "ant-is-reflexive",
        31 => "ant-mention-type",
        32 => "entity-first-sentence",
        33 => "ant-animacy",
        34 => "ant-person",
        35 => "ant-ner-label",
        36 => "entity-rank",
        37 => "entity-animacy",
        38 => "pair-sentence-distance",
        39 => "pair-token-distance",
        40 => "pair-number-agreement",
        41 => "pair-both-subject",
        42 => "pair-both-object",
        43 => "pair-same-string",
        44 => "pair-token-distance-lt-3",
        45 => "pair-same-sentence",
        46 => "entity-min-sentence-distance",
        47 => "ant-longer-than-pron",
        48 => "pair-animacy-agreement",
        49 => "pair-person-agreement",
        50 => "pair-object-subject-code",
        51 => "pair-reflexive-subject-code",
        52 => "emb-dist-heads",
        53 => "emb-dist-head-to-span",
        54 => "emb-dist-context-to-head",
        _ => "unknown",
    }
}

/// Shape of the feature vector a model consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub mode: Mode,
    /// Embedding dimension when embedding slots are included (hybrid only).
    pub emb_dim: Option<usize>,
}

impl FeatureLayout {
    pub fn new(mode: Mode, emb_dim: Option<usize>) -> Result<Self> {
        if mode == Mode::MentionPair && emb_dim.is_some() {
            return Err(Error::Config(
                "embedding slots are only available in hybrid mode".into(),
            ));
        }
        Ok(Self { mode, emb_dim })
    }

    /// Rows present in this layout, in slot order (embedding raw blocks are
    /// not rows and follow the listed rows).
    pub fn rows(&self) -> Vec<usize> {
        match self.mode {
            Mode::MentionPair => MENTION_PAIR_ROWS.to_vec(),
            Mode::Hybrid => {
                let mut rows: Vec<usize> = (1..=SYMBOLIC_ROWS).collect();
                if self.emb_dim.is_some() {
                    rows.extend([52, 53, 54]);
                }
                rows
            }
        }
    }

    pub fn len(&self) -> usize {
        self.rows().len() + 2 * self.emb_dim.unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Slot indices holding category codes (for subset splits in trees).
    pub fn categorical_slots(&self) -> BTreeSet<usize> {
        self.rows()
            .iter()
            .enumerate()
            .filter(|(_, row)| row_is_categorical(**row))
            .map(|(slot, _)| slot)
            .collect()
    }

    pub fn slot_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.rows().iter().map(|r| row_name(*r).to_string()).collect();
        if let Some(d) = self.emb_dim {
            for i in 0..d {
                names.push(format!("pron-head-vec-{i}"));
            }
            for i in 0..d {
                names.push(format!("ant-head-vec-{i}"));
            }
        }
        names
    }

    /// Slot index of a row in this layout, if the layout carries it.
    pub fn slot_of_row(&self, row: usize) -> Option<usize> {
        self.rows().iter().position(|r| *r == row)
    }
}

pub type FeatureVector = Vec<f64>;

/// Category codebooks for POS and NER tags, frozen at training time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVocab {
    /// index 0 = unknown tag, 1 = past the document edge
    pub pos: Vec<String>,
    /// index 0 = unknown label
    pub ner: Vec<String>,
}

pub const POS_UNKNOWN: usize = 0;
pub const POS_BOUNDARY: usize = 1;
pub const NER_UNKNOWN: usize = 0;

impl FeatureVocab {
    /// Collects the fine POS tags and NER labels of a corpus.
    pub fn build<'d, I: IntoIterator<Item = &'d Document>>(docs: I) -> Self {
        let mut pos = BTreeSet::new();
        let mut ner = BTreeSet::new();
        for doc in docs {
            for tok in doc.tokens() {
                pos.insert(tok.pos_fine.clone());
                ner.insert(tok.ner_type().unwrap_or("O").to_string());
            }
        }
        let mut pos_list = vec!["<unk>".to_string(), "<edge>".to_string()];
        pos_list.extend(pos);
        let mut ner_list = vec!["<unk>".to_string()];
        ner_list.extend(ner);
        Self {
            pos: pos_list,
            ner: ner_list,
        }
    }

    pub fn pos_code(&self, tag: &str) -> usize {
        self.pos
            .iter()
            .position(|t| t == tag)
            .unwrap_or(POS_UNKNOWN)
    }

    pub fn ner_code(&self, label: &str) -> usize {
        self.ner
            .iter()
            .position(|t| t == label)
            .unwrap_or(NER_UNKNOWN)
    }
}

/// Everything extraction needs about one document.
pub struct FeatureContext<'a> {
    pub doc: &'a Document,
    pub mentions: &'a [Mention],
    pub lex: &'a Lexicons,
    pub vocab: &'a FeatureVocab,
    pub layout: FeatureLayout,
    pub embeddings: Option<&'a EmbeddingTable>,
    pub cluster_source: ClusterFeatureSource,
    /// Flattened tokens for O(1) doc-level context lookups.
    flat: Vec<(usize, usize)>,
}

impl<'a> FeatureContext<'a> {
    pub fn new(
        doc: &'a Document,
        mentions: &'a [Mention],
        lex: &'a Lexicons,
        vocab: &'a FeatureVocab,
        layout: FeatureLayout,
        embeddings: Option<&'a EmbeddingTable>,
        cluster_source: ClusterFeatureSource,
    ) -> Result<Self> {
        match (layout.emb_dim, embeddings) {
            (Some(d), Some(table)) if table.dim() != d => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: table.dim(),
                });
            }
            (Some(_), None) => {
                return Err(Error::Config(
                    "layout includes embedding slots but no table was provided".into(),
                ));
            }
            _ => {}
        }
        let mut flat = Vec::with_capacity(doc.token_count());
        for sent in &doc.sentences {
            for ti in 0..sent.tokens.len() {
                flat.push((sent.index, ti));
            }
        }
        Ok(Self {
            doc,
            mentions,
            lex,
            vocab,
            layout,
            embeddings,
            cluster_source,
            flat,
        })
    }

    fn token_at(&self, doc_index: usize) -> Option<&'a Token> {
        self.flat
            .get(doc_index)
            .map(|(s, t)| self.doc.token(*s, *t))
    }

    fn pos_context_code(&self, doc_index: isize) -> f64 {
        if doc_index < 0 {
            return POS_BOUNDARY as f64;
        }
        match self.token_at(doc_index as usize) {
            Some(tok) => self.vocab.pos_code(&tok.pos_fine) as f64,
            None => POS_BOUNDARY as f64,
        }
    }
}

fn agreement_code<V: LatticeValue>(a: ValueSet<V>, b: ValueSet<V>) -> f64 {
    if a.is_empty() || b.is_empty() {
        2.0
    } else if a.intersects(b) {
        1.0
    } else {
        0.0
    }
}

fn mention_type_code(kind: MentionKind) -> f64 {
    match kind {
        MentionKind::Pronoun => 0.0,
        MentionKind::NamedEntity | MentionKind::ProperNoun => 1.0,
        MentionKind::CommonNoun | MentionKind::Demonstrative => 2.0,
    }
}

const ENTITY_RANK_CAP: usize = 15;

/// Entity-level evidence, resolved against either the system entity or the
/// antecedent's gold chain.
struct ClusterView {
    member_count: f64,
    first_sentence: f64,
    rank: f64,
    animacy_bits: f64,
    min_sent_dist: f64,
}

fn system_cluster_view(
    store: &EntityStore,
    entity: &Entity,
    mentions: &[Mention],
    pron: &Mention,
) -> ClusterView {
    let first = &mentions[entity.first_mention()];
    let rank = store
        .entities()
        .position(|e| e.id == entity.id)
        .unwrap_or(0)
        .min(ENTITY_RANK_CAP);
    let min_sent_dist = entity
        .mentions
        .iter()
        .map(|m| pron.span.sent.abs_diff(mentions[*m].span.sent))
        .min()
        .unwrap_or(0);
    ClusterView {
        member_count: entity.len() as f64,
        first_sentence: first.span.sent as f64,
        rank: rank as f64,
        animacy_bits: entity.attrs.animacy.bits() as f64,
        min_sent_dist: min_sent_dist as f64,
    }
}

fn gold_cluster_view(
    ctx: &FeatureContext,
    ant: &Mention,
    pron: &Mention,
) -> Option<ClusterView> {
    let chain = ctx
        .doc
        .gold_chains
        .iter()
        .find(|c| c.spans.contains(&ant.span))?;
    let rank = ctx
        .doc
        .gold_chains
        .iter()
        .position(|c| c.id == chain.id)
        .unwrap_or(0)
        .min(ENTITY_RANK_CAP);
    let mut animacy = ValueSet::empty();
    for span in &chain.spans {
        if let Some(m) = ctx.mentions.iter().find(|m| m.span == *span) {
            animacy = animacy.union(m.attrs.animacy);
        }
    }
    let min_sent_dist = chain
        .spans
        .iter()
        .map(|s| pron.span.sent.abs_diff(s.sent))
        .min()
        .unwrap_or(0);
    Some(ClusterView {
        member_count: chain.spans.len() as f64,
        first_sentence: chain.spans[0].sent as f64,
        rank: rank as f64,
        animacy_bits: animacy.bits() as f64,
        min_sent_dist: min_sent_dist as f64,
    })
}

/// Extracts the feature vector for (pronoun, candidate entity).
///
/// The antecedent mention is the candidate's member nearest to (and
/// preceding) the pronoun. Errors: [`Error::NotAPronoun`] if `pronoun` is
/// not a pronoun mention, [`Error::CandidateNotPreceding`] if no member
/// precedes it.
pub fn extract_pair(
    ctx: &FeatureContext,
    store: &EntityStore,
    pronoun: usize,
    candidate: usize,
) -> Result<FeatureVector> {
    let pron = &ctx.mentions[pronoun];
    if pron.kind != MentionKind::Pronoun {
        return Err(Error::NotAPronoun(pronoun));
    }
    let entity = store.entity(candidate);
    let ant_id = entity
        .mentions
        .iter()
        .copied()
        .filter(|m| *m < pronoun)
        .max()
        .ok_or(Error::CandidateNotPreceding {
            pronoun,
            candidate: entity.id,
        })?;
    let ant = &ctx.mentions[ant_id];

    let mut sym = [0.0f64; SYMBOLIC_ROWS + 1];

    // Pronoun side.
    let class = pron.pronoun_class.unwrap_or(PronounClass::Personal);
    sym[1] = f64::from(class == PronounClass::Personal);
    sym[2] = f64::from(class == PronounClass::Demonstrative);
    sym[3] = f64::from(class == PronounClass::Reflexive);
    sym[4] = f64::from(pron.attrs.person.contains(PersonValue::Third));
    sym[5] = f64::from(ctx.lex.is_speech_pronoun(&pron.head_token(ctx.doc).form));
    let p_start = pron.start_doc as isize;
    let p_end = (pron.start_doc + pron.span.len() - 1) as isize;
    for i in 1..=3 {
        sym[5 + i] = ctx.pos_context_code(p_start - i as isize);
        sym[8 + i] = ctx.pos_context_code(p_end + i as isize);
    }
    sym[12] = f64::from(pron.role == Role::Subject);
    sym[13] = f64::from(pron.role == Role::Object);
    sym[14] = f64::from(pron.attrs.number.bits());
    sym[15] = f64::from(pron.attrs.animacy.bits());
    sym[16] = f64::from(pron.attrs.person.bits());

    // Antecedent side.
    sym[17] = ant.span.len() as f64;
    sym[18] = f64::from(ant.kind == MentionKind::Pronoun);
    sym[19] = f64::from(ant.kind == MentionKind::Demonstrative);
    let a_start = ant.start_doc as isize;
    let a_end = (ant.start_doc + ant.span.len() - 1) as isize;
    for i in 1..=3 {
        sym[19 + i] = ctx.pos_context_code(a_start - i as isize);
        sym[22 + i] = ctx.pos_context_code(a_end + i as isize);
    }
    sym[26] = f64::from(ant.attrs.number.bits());
    sym[27] = f64::from(ant.role == Role::Subject);
    sym[28] = f64::from(ant.role == Role::Object);
    sym[30] = f64::from(
        ant.kind == MentionKind::Pronoun
            && ant.pronoun_class == Some(PronounClass::Reflexive),
    );
    sym[31] = mention_type_code(ant.kind);
    sym[33] = f64::from(ant.attrs.animacy.bits());
    sym[34] = f64::from(ant.attrs.person.bits());
    sym[35] = ctx
        .vocab
        .ner_code(ant.head_token(ctx.doc).ner_type().unwrap_or("O")) as f64;

    // Entity side.
    let cluster = match ctx.cluster_source {
        ClusterFeatureSource::System => system_cluster_view(store, entity, ctx.mentions, pron),
        ClusterFeatureSource::Gold => gold_cluster_view(ctx, ant, pron)
            .unwrap_or_else(|| system_cluster_view(store, entity, ctx.mentions, pron)),
    };
    sym[29] = cluster.member_count;
    sym[32] = cluster.first_sentence;
    sym[36] = cluster.rank;
    sym[37] = cluster.animacy_bits;
    sym[46] = cluster.min_sent_dist;

    // Pair side.
    let sent_dist = pron.span.sent - ant.span.sent;
    let tok_dist = pron.start_doc - ant.start_doc;
    sym[38] = sent_dist as f64;
    sym[39] = tok_dist as f64;
    sym[40] = agreement_code(pron.attrs.number, ant.attrs.number);
    sym[41] = f64::from(pron.role == Role::Subject && ant.role == Role::Subject);
    sym[42] = f64::from(pron.role == Role::Object && ant.role == Role::Object);
    sym[43] = f64::from(pron.text(ctx.doc) == ant.text(ctx.doc));
    sym[44] = f64::from(tok_dist < 3);
    sym[45] = f64::from(sent_dist == 0);
    sym[47] = f64::from(ant.span.len() > pron.span.len());
    sym[48] = agreement_code(pron.attrs.animacy, ant.attrs.animacy);
    sym[49] = agreement_code(pron.attrs.person, ant.attrs.person);
    sym[50] = if pron.role == Role::Object && ant.role == Role::Subject {
        if sent_dist == 0 {
            1.0
        } else {
            2.0
        }
    } else {
        0.0
    };
    sym[51] = if class == PronounClass::Reflexive && ant.role == Role::Subject {
        if sent_dist == 0 {
            1.0
        } else {
            2.0
        }
    } else {
        0.0
    };

    // Project and append embedding slots.
    let mut out = Vec::with_capacity(ctx.layout.len());
    for row in ctx.layout.rows() {
        match row {
            1..=51 => out.push(sym[row]),
            52..=54 => {} // handled below with the raw blocks
            _ => unreachable!("layout row {row}"),
        }
    }
    if let Some(dim) = ctx.layout.emb_dim {
        let table = ctx.embeddings.expect("validated in FeatureContext::new");
        let pron_head = table.lookup(&pron.head_token(ctx.doc).form);
        let ant_head = table.lookup(&ant.head_token(ctx.doc).form);
        let ant_span_tokens: Vec<&str> = ctx
            .doc
            .span_tokens(ant.span)
            .iter()
            .map(|t| t.form.as_str())
            .collect();
        let ant_span_mean = table.mean_of(&ant_span_tokens);
        let mut context_forms: Vec<&str> = Vec::new();
        for off in [-2isize, -1, 1, 2] {
            let idx = p_start + off;
            if idx >= 0 {
                if let Some(tok) = ctx.token_at(idx as usize) {
                    context_forms.push(tok.form.as_str());
                }
            }
        }
        let context_mean = table.mean_of(&context_forms);
        out.push(euclidean(&pron_head, &ant_head)?);
        out.push(euclidean(&pron_head, &ant_span_mean)?);
        out.push(euclidean(&context_mean, &ant_head)?);
        debug_assert_eq!(pron_head.len(), dim);
        out.extend_from_slice(&pron_head);
        out.extend_from_slice(&ant_head);
    }
    debug_assert_eq!(out.len(), ctx.layout.len());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_conll;
    use crate::embedding::OovPolicy;
    use crate::mention::{detect_mentions, DetectionMode, HeadRule};
    use crate::sieves::{run_pipeline, SieveConfig};

    fn fixture() -> (Document, Lexicons) {
        // "Anna Karimi slept . The judge saw the report . She left ."
        let rows = [
            ("Anna", "NNP", "B-PER", "animate", "B-NP-SBJ", "0", "1"),
            ("Karimi", "NNP", "I-PER", "animate", "I-NP-SBJ", "0", "1"),
            ("slept", "VBD", "O", "-", "-", "-", "-"),
            (".", ".", "O", "-", "-", "-", "-"),
        ];
        let rows2 = [
            ("the", "DT", "O", "-", "B-NP-SBJ", "-", "-"),
            ("judge", "NN", "O", "animate", "I-NP-SBJ", "-", "-"),
            ("saw", "VBD", "O", "-", "-", "-", "-"),
            ("the", "DT", "O", "-", "B-NP-OBJ", "-", "-"),
            ("report", "NN", "O", "inanimate", "I-NP-OBJ", "-", "-"),
            (".", ".", "O", "-", "-", "-", "-"),
        ];
        let rows3 = [
            ("she", "PRP", "O", "animate", "B-NP-SBJ", "1", "1"),
            ("left", "VBD", "O", "-", "-", "-", "-"),
            (".", ".", "O", "-", "-", "-", "-"),
        ];
        let mut lines = Vec::new();
        for (si, rows) in [&rows[..], &rows2[..], &rows3[..]].iter().enumerate() {
            if si > 0 {
                lines.push(String::new());
            }
            for (form, fine, ner, anim, phrase, mention, chain) in rows.iter() {
                let coarse = if fine.starts_with("NN") {
                    "N"
                } else if fine.starts_with("VB") {
                    "V"
                } else if *fine == "PRP" {
                    "PRON"
                } else if *fine == "DT" {
                    "DET"
                } else {
                    "PUNC"
                };
                let nc = if ner.contains("PER") { "PER" } else { "O" };
                lines.push(format!(
                    "f0\t{si}\t{form}\t{coarse}\t{ner}\t{}\t{form}\t{nc}\t{mention}\t{chain}\t{anim}\t{phrase}\t{fine}",
                    form.to_lowercase()
                ));
            }
        }
        let doc = parse_conll(&lines.join("\n")).unwrap().remove(0);
        (doc, Lexicons::miniature_english())
    }

    struct Built {
        doc: Document,
        lex: Lexicons,
        mentions: Vec<Mention>,
        store: EntityStore,
        vocab: FeatureVocab,
    }

    fn build() -> Built {
        let (doc, lex) = fixture();
        let mentions =
            detect_mentions(&doc, &lex, DetectionMode::FromAnnotations, HeadRule::default())
                .unwrap();
        let store = run_pipeline(&doc, &mentions, &SieveConfig::default(), &lex).unwrap();
        let vocab = FeatureVocab::build([&doc]);
        Built {
            doc,
            lex,
            mentions,
            store,
            vocab,
        }
    }

    fn pronoun_id(b: &Built) -> usize {
        b.mentions
            .iter()
            .find(|m| m.kind == MentionKind::Pronoun)
            .unwrap()
            .id
    }

    #[test]
    fn layout_lengths() {
        assert_eq!(
            FeatureLayout::new(Mode::MentionPair, None).unwrap().len(),
            34
        );
        assert_eq!(FeatureLayout::new(Mode::Hybrid, None).unwrap().len(), 51);
        assert_eq!(
            FeatureLayout::new(Mode::Hybrid, Some(8)).unwrap().len(),
            51 + 3 + 16
        );
        assert!(FeatureLayout::new(Mode::MentionPair, Some(8)).is_err());
    }

    #[test]
    fn pair_rows_are_a_subset_of_hybrid_rows_with_equal_values() {
        let b = build();
        let pron = pronoun_id(&b);
        let hybrid_layout = FeatureLayout::new(Mode::Hybrid, None).unwrap();
        let pair_layout = FeatureLayout::new(Mode::MentionPair, None).unwrap();
        let mk_ctx = |layout| {
            FeatureContext::new(&b.doc, &b.mentions, &b.lex, &b.vocab, layout, None, ClusterFeatureSource::System)
                .unwrap()
        };
        let hybrid_ctx = mk_ctx(hybrid_layout);
        let pair_ctx = mk_ctx(pair_layout);
        for entity in b.store.entities() {
            if entity.first_mention() >= pron {
                continue;
            }
            let hv = extract_pair(&hybrid_ctx, &b.store, pron, entity.id).unwrap();
            let pv = extract_pair(&pair_ctx, &b.store, pron, entity.id).unwrap();
            for (slot, row) in pair_layout.rows().iter().enumerate() {
                let h_slot = hybrid_layout.slot_of_row(*row).unwrap();
                assert_eq!(pv[slot], hv[h_slot], "row {row} differs");
            }
        }
    }

    #[test]
    fn expected_values_for_a_known_pair() {
        let b = build();
        let pron = pronoun_id(&b);
        let layout = FeatureLayout::new(Mode::Hybrid, None).unwrap();
        let ctx = FeatureContext::new(
            &b.doc, &b.mentions, &b.lex, &b.vocab, layout, None, ClusterFeatureSource::System,
        )
        .unwrap();
        // Candidate: "Anna Karimi" (mention 0, singleton entity 0).
        let v = extract_pair(&ctx, &b.store, pron, 0).unwrap();
        let row = |r: usize| v[layout.slot_of_row(r).unwrap()];
        assert_eq!(row(1), 1.0); // personal pronoun
        assert_eq!(row(4), 1.0); // third person
        assert_eq!(row(12), 1.0); // subject
        assert_eq!(row(17), 2.0); // "Anna Karimi" has two tokens
        assert_eq!(row(18), 0.0);
        assert_eq!(row(27), 1.0); // antecedent is a subject
        assert_eq!(row(29), 1.0); // singleton entity
        assert_eq!(row(31), 1.0); // proper-name antecedent
        assert_eq!(row(38), 2.0); // two sentences apart
        assert_eq!(row(40), 1.0); // number agrees (both singular)
        assert_eq!(row(41), 1.0); // subject parallelism
        assert_eq!(row(45), 0.0); // not same sentence
        assert_eq!(row(46), 2.0); // nearest member two sentences away
        assert_eq!(row(47), 1.0); // antecedent longer than the pronoun
        assert_eq!(row(48), 1.0); // animacy agrees
        assert_eq!(row(49), 1.0); // person agrees
    }

    #[test]
    fn incompatible_candidate_disagrees_in_animacy() {
        let b = build();
        let pron = pronoun_id(&b);
        let layout = FeatureLayout::new(Mode::Hybrid, None).unwrap();
        let ctx = FeatureContext::new(
            &b.doc, &b.mentions, &b.lex, &b.vocab, layout, None, ClusterFeatureSource::System,
        )
        .unwrap();
        let report = b
            .mentions
            .iter()
            .find(|m| m.text(&b.doc) == "the report")
            .unwrap();
        let v = extract_pair(&ctx, &b.store, pron, b.store.entity_of(report.id)).unwrap();
        let row = |r: usize| v[layout.slot_of_row(r).unwrap()];
        assert_eq!(row(48), 0.0); // she (animate) vs report (inanimate)
        assert_eq!(row(40), 1.0); // number still agrees
        assert_eq!(row(28), 1.0); // antecedent was an object
        assert_eq!(row(50), 0.0); // pronoun is not an object
    }

    #[test]
    fn non_pronoun_and_non_preceding_are_errors() {
        let b = build();
        let layout = FeatureLayout::new(Mode::Hybrid, None).unwrap();
        let ctx = FeatureContext::new(
            &b.doc, &b.mentions, &b.lex, &b.vocab, layout, None, ClusterFeatureSource::System,
        )
        .unwrap();
        assert!(matches!(
            extract_pair(&ctx, &b.store, 0, 1),
            Err(Error::NotAPronoun(0))
        ));
        let pron = pronoun_id(&b);
        // The pronoun is the last mention; an entity whose only member is
        // the pronoun itself can never precede it. Build that error via a
        // later mention: use the pronoun's own singleton entity.
        let own = b.store.entity_of(pron);
        assert!(matches!(
            extract_pair(&ctx, &b.store, pron, own),
            Err(Error::CandidateNotPreceding { .. })
        ));
    }

    #[test]
    fn embedding_slots_change_with_the_candidate() {
        let b = build();
        let pron = pronoun_id(&b);
        let emb = EmbeddingTable::parse(
            "anna 1 0\nkarimi 1 0\njudge 1 0\nreport 0 1\nshe 1 0\n",
            OovPolicy::ZeroVector,
        )
        .unwrap();
        let layout = FeatureLayout::new(Mode::Hybrid, Some(2)).unwrap();
        let ctx = FeatureContext::new(
            &b.doc, &b.mentions, &b.lex, &b.vocab, layout, Some(&emb), ClusterFeatureSource::System,
        )
        .unwrap();
        // Forms are case-sensitive in the table; "Anna"/"Karimi" are OOV here
        // while "she"/"report" resolve, which is enough to see 52 move.
        let report = b
            .mentions
            .iter()
            .find(|m| m.text(&b.doc) == "the report")
            .unwrap();
        let judge = b
            .mentions
            .iter()
            .find(|m| m.text(&b.doc) == "the judge")
            .unwrap();
        let v_report = extract_pair(&ctx, &b.store, pron, b.store.entity_of(report.id)).unwrap();
        let v_judge = extract_pair(&ctx, &b.store, pron, b.store.entity_of(judge.id)).unwrap();
        let slot52 = layout.slot_of_row(52).unwrap();
        // she=(1,0): dist to judge=(1,0) is 0, to report=(0,1) is sqrt(2)
        assert!(v_judge[slot52] < v_report[slot52]);
        assert_eq!(v_judge.len(), layout.len());
    }

    #[test]
    fn gold_cluster_source_reads_chain_level_counts() {
        let b = build();
        let pron = pronoun_id(&b);
        let layout = FeatureLayout::new(Mode::Hybrid, None).unwrap();
        let ctx = FeatureContext::new(
            &b.doc, &b.mentions, &b.lex, &b.vocab, layout, None, ClusterFeatureSource::Gold,
        )
        .unwrap();
        // "Anna Karimi" belongs to gold chain 1, which also contains the
        // pronoun: two spans.
        let v = extract_pair(&ctx, &b.store, pron, 0).unwrap();
        assert_eq!(v[layout.slot_of_row(29).unwrap()], 2.0);
        // "the judge" is in no gold chain: falls back to the system entity.
        let judge = b
            .mentions
            .iter()
            .find(|m| m.text(&b.doc) == "the judge")
            .unwrap();
        let v = extract_pair(&ctx, &b.store, pron, b.store.entity_of(judge.id)).unwrap();
        assert_eq!(v[layout.slot_of_row(29).unwrap()], 1.0);
    }

    #[test]
    fn categorical_slots_follow_the_layout() {
        let pair = FeatureLayout::new(Mode::MentionPair, None).unwrap();
        let cats = pair.categorical_slots();
        // row 6 is the first categorical row; it sits at slot 5 in pair mode
        assert!(cats.contains(&5));
        // boolean rows are not categorical: row 1 -> slot 0
        assert!(!cats.contains(&0));
        let hybrid = FeatureLayout::new(Mode::Hybrid, Some(4)).unwrap();
        // embedding slots are never categorical
        let len = hybrid.len();
        assert!(hybrid.categorical_slots().iter().all(|s| *s < 51));
        assert_eq!(len, 51 + 3 + 8);
    }
}
