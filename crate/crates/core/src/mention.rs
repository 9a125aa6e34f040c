//! Mention extraction and per-mention attributes.
//!
//! Mentions come from three annotation layers: NP chunks (phrase-type
//! column), named-entity runs, and pronoun tokens. Duplicate spans collapse
//! into one mention. Every mention gets a head token, a kind, a grammatical
//! role and an attribute lattice; entities later union those lattices.

use crate::attrs::{AnimacyValue, AttributeLattice, NumberValue, PersonValue, ValueSet};
use crate::corpus::{Document, Span, Token, TokenAnimacy, NULL};
use crate::error::{Error, Result};
use crate::lexicon::{Lexicons, PronounClass};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// What kind of phrase a mention is; drives which sieves may touch it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MentionKind {
    Pronoun,
    NamedEntity,
    ProperNoun,
    CommonNoun,
    /// Multi-token phrase opened by a demonstrative determiner.
    Demonstrative,
}

/// Grammatical role, read off the chunk tag suffix (`B-NP-SBJ` etc.).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Subject,
    Object,
    Other,
}

/// Where mention spans come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectionMode {
    /// NP chunks + NER runs + pronoun tokens.
    FromAnnotations,
    /// Exactly the gold chain spans (for gold-cluster experiment rows).
    FromGold,
}

/// Which token of a multi-token span counts as the head.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeadRule {
    /// Rightmost noun before the first preposition (default).
    #[default]
    RightmostNounBeforePreposition,
    /// Leftmost noun of the span.
    LeftmostNoun,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mention {
    /// Index into the document's mention list; document order.
    pub id: usize,
    pub span: Span,
    /// Token index of the head within the span's sentence.
    pub head_index: usize,
    pub kind: MentionKind,
    /// Present iff `kind == Pronoun`.
    pub pronoun_class: Option<PronounClass>,
    pub attrs: AttributeLattice,
    pub role: Role,
    /// Document-level token index of the span start.
    pub start_doc: usize,
    /// Document-level token index of the head.
    pub head_doc: usize,
}

impl Mention {
    pub fn head_token<'d>(&self, doc: &'d Document) -> &'d Token {
        doc.token(self.span.sent, self.head_index)
    }

    pub fn text(&self, doc: &Document) -> String {
        doc.span_text(self.span)
    }

    pub fn is_pronoun(&self) -> bool {
        self.kind == MentionKind::Pronoun
    }

    /// Strictly earlier in document order (mention ids follow that order).
    pub fn precedes(&self, other: &Mention) -> bool {
        self.id < other.id
    }
}

// ---------------------------------------------------------------------------
// POS conventions. Tags cover both the 16-tag coarse set and the fine set;
// helpers accept either so corpora tagged only at one level still work.

pub fn is_noun(tok: &Token) -> bool {
    matches!(tok.pos_coarse.as_str(), "N" | "NOUN" | "PROPN" | "Ne")
        || tok.pos_fine.starts_with("NN")
}

pub fn is_proper_pos(tok: &Token) -> bool {
    matches!(tok.pos_fine.as_str(), "NNP" | "NNPS") || tok.pos_coarse == "PROPN"
}

pub fn is_plural_pos(tok: &Token) -> bool {
    matches!(tok.pos_fine.as_str(), "NNS" | "NNPS")
}

pub fn is_preposition(tok: &Token) -> bool {
    matches!(tok.pos_coarse.as_str(), "P" | "ADP" | "PREP") || tok.pos_fine == "IN"
}

pub fn is_pronoun_pos(tok: &Token) -> bool {
    matches!(tok.pos_coarse.as_str(), "PRON" | "PRO")
        || matches!(tok.pos_fine.as_str(), "PRP" | "PRP$" | "WP")
}

pub fn is_punctuation(tok: &Token) -> bool {
    tok.pos_coarse == "PUNC"
        || matches!(tok.pos_fine.as_str(), "." | "," | ":" | "``" | "''")
        || tok.form.chars().all(|c| c.is_ascii_punctuation())
}

fn is_determiner(tok: &Token) -> bool {
    tok.pos_coarse == "DET" || tok.pos_fine == "DT"
}

// ---------------------------------------------------------------------------
// Chunk layer

fn chunk_tag(tok: &Token) -> Option<(&str, &str)> {
    // "B-NP-SBJ" -> (B, NP-SBJ); "-"/"O" -> None
    let pt = tok.phrase_type.as_str();
    if pt == NULL || pt == "O" || pt.is_empty() {
        return None;
    }
    pt.split_once('-')
}

fn chunk_role(rest: &str) -> Role {
    match rest.rsplit_once('-').map(|(_, r)| r) {
        Some("SBJ") => Role::Subject,
        Some("OBJ") => Role::Object,
        _ => Role::Other,
    }
}

fn is_np_chunk(rest: &str) -> bool {
    rest == "NP" || rest.starts_with("NP-")
}

/// Finds the head token index (within the sentence) of a span.
pub fn mention_head(doc: &Document, span: Span, rule: HeadRule) -> usize {
    let tokens = doc.span_tokens(span);
    match rule {
        HeadRule::RightmostNounBeforePreposition => {
            // Region: everything before the first preposition (whole span if none).
            let cutoff = tokens
                .iter()
                .position(is_preposition)
                .unwrap_or(tokens.len());
            let region = &tokens[..cutoff.max(1)];
            let pick = region
                .iter()
                .rposition(is_noun)
                .or_else(|| {
                    region
                        .iter()
                        .rposition(|t| !is_punctuation(t) && !is_determiner(t))
                })
                .unwrap_or(region.len() - 1);
            span.start + pick
        }
        HeadRule::LeftmostNoun => {
            let pick = tokens
                .iter()
                .position(is_noun)
                .unwrap_or(0);
            span.start + pick
        }
    }
}

fn classify(doc: &Document, span: Span, head_index: usize, lex: &Lexicons) -> MentionKind {
    let head = doc.token(span.sent, head_index);
    if span.len() == 1 {
        let tok = doc.token(span.sent, span.start);
        if is_pronoun_pos(tok) || lex.pronoun(&tok.form).is_some() {
            return MentionKind::Pronoun;
        }
    }
    let first = doc.token(span.sent, span.start);
    if span.len() >= 2 && lex.is_demonstrative_marker(&first.form) {
        return MentionKind::Demonstrative;
    }
    if head.ner_type().is_some() {
        return MentionKind::NamedEntity;
    }
    if is_proper_pos(head) {
        return MentionKind::ProperNoun;
    }
    MentionKind::CommonNoun
}

/// Attribute evidence for one mention. Pronouns read the pronoun table;
/// everything else combines head POS (number), NER / animacy column /
/// title list / name gazetteer (animacy), and the gazetteer (gender).
/// Non-pronoun mentions are third person.
pub fn compute_attributes(
    doc: &Document,
    span: Span,
    head_index: usize,
    kind: MentionKind,
    lex: &Lexicons,
) -> AttributeLattice {
    if kind == MentionKind::Pronoun {
        let tok = doc.token(span.sent, span.start);
        return match lex.pronoun(&tok.form) {
            Some(entry) => entry.attributes(),
            None => AttributeLattice::default(),
        };
    }

    let head = doc.token(span.sent, head_index);
    let mut attrs = AttributeLattice {
        person: ValueSet::of(PersonValue::Third),
        ..Default::default()
    };
    attrs.number = ValueSet::of(if is_plural_pos(head) {
        NumberValue::Plural
    } else {
        NumberValue::Singular
    });
    match head.ner_type() {
        Some("PER") => attrs.animacy.insert(AnimacyValue::Animate),
        Some(_) => attrs.animacy.insert(AnimacyValue::Inanimate),
        None => {}
    }
    match head.animacy {
        TokenAnimacy::Animate => attrs.animacy.insert(AnimacyValue::Animate),
        TokenAnimacy::Inanimate => attrs.animacy.insert(AnimacyValue::Inanimate),
        TokenAnimacy::Unknown => {}
    }
    if lex.is_title(&head.lemma) || lex.is_title(&head.form) {
        attrs.animacy.insert(AnimacyValue::Animate);
    }
    if let Some(gender) = lex.name_gender(&head.form) {
        attrs.animacy.insert(AnimacyValue::Animate);
        attrs.gender = attrs.gender.union(gender);
    }
    attrs
}

/// Extracts the document's mentions in document order.
///
/// Document order is (sentence, start token, longer span first). Duplicate
/// spans proposed by several layers collapse into one mention.
pub fn detect_mentions(
    doc: &Document,
    lex: &Lexicons,
    mode: DetectionMode,
    head_rule: HeadRule,
) -> Result<Vec<Mention>> {
    let mut spans: BTreeMap<Span, Option<Role>> = BTreeMap::new();

    match mode {
        DetectionMode::FromGold => {
            for chain in &doc.gold_chains {
                for span in &chain.spans {
                    spans.entry(*span).or_insert(None);
                }
            }
        }
        DetectionMode::FromAnnotations => {
            if doc
                .tokens()
                .all(|t| t.phrase_type == NULL || t.phrase_type.is_empty())
            {
                return Err(Error::MissingAnnotations(doc.id.clone()));
            }
            for sent in &doc.sentences {
                collect_chunk_spans(sent.index, &sent.tokens, &mut spans);
                collect_ner_spans(sent.index, &sent.tokens, &mut spans);
                for (ti, tok) in sent.tokens.iter().enumerate() {
                    if is_pronoun_pos(tok) {
                        let span = Span::new(sent.index, ti, ti);
                        spans.entry(span).or_insert(None);
                    }
                }
            }
        }
    }

    // Fill roles for spans that did not come from the chunk layer by
    // borrowing the role of an identical chunk span, if present.
    let mut ordered: Vec<(Span, Role)> = spans
        .iter()
        .map(|(span, role)| (*span, role.unwrap_or(Role::Other)))
        .collect();
    // Document order: sentence, then start, then longer span first.
    ordered.sort_by_key(|(span, _)| (span.sent, span.start, std::cmp::Reverse(span.end)));

    let mut doc_offsets = Vec::with_capacity(doc.sentences.len());
    let mut acc = 0usize;
    for sent in &doc.sentences {
        doc_offsets.push(acc);
        acc += sent.tokens.len();
    }

    let mut mentions = Vec::with_capacity(ordered.len());
    for (id, (span, role)) in ordered.into_iter().enumerate() {
        let head_index = mention_head(doc, span, head_rule);
        let kind = classify(doc, span, head_index, lex);
        let pronoun_class = if kind == MentionKind::Pronoun {
            let form = &doc.token(span.sent, span.start).form;
            Some(
                lex.pronoun(form)
                    .map(|e| e.class)
                    .unwrap_or(PronounClass::Personal),
            )
        } else {
            None
        };
        let attrs = compute_attributes(doc, span, head_index, kind, lex);
        mentions.push(Mention {
            id,
            span,
            head_index,
            kind,
            pronoun_class,
            attrs,
            role,
            start_doc: doc_offsets[span.sent] + span.start,
            head_doc: doc_offsets[span.sent] + head_index,
        });
    }
    Ok(mentions)
}

fn collect_chunk_spans(
    sent: usize,
    tokens: &[Token],
    spans: &mut BTreeMap<Span, Option<Role>>,
) {
    let mut start: Option<(usize, Role)> = None;
    for (ti, tok) in tokens.iter().enumerate() {
        match chunk_tag(tok) {
            Some(("B", rest)) if is_np_chunk(rest) => {
                if let Some((s, role)) = start.take() {
                    spans.insert(Span::new(sent, s, ti - 1), Some(role));
                }
                start = Some((ti, chunk_role(rest)));
            }
            Some(("I", rest)) if is_np_chunk(rest) && start.is_some() => {}
            _ => {
                if let Some((s, role)) = start.take() {
                    spans.insert(Span::new(sent, s, ti - 1), Some(role));
                }
            }
        }
    }
    if let Some((s, role)) = start.take() {
        spans.insert(Span::new(sent, s, tokens.len() - 1), Some(role));
    }
}

fn collect_ner_spans(sent: usize, tokens: &[Token], spans: &mut BTreeMap<Span, Option<Role>>) {
    let mut run: Option<(usize, String)> = None;
    for (ti, tok) in tokens.iter().enumerate() {
        let ty = tok.ner_type().map(str::to_string);
        let begins = tok.ner.starts_with("B-");
        let continues = match (&run, &ty) {
            (Some((_, prev)), Some(t)) => prev == t && !begins,
            _ => false,
        };
        if continues {
            continue;
        }
        if let Some((s, _)) = run.take() {
            spans.entry(Span::new(sent, s, ti - 1)).or_insert(None);
        }
        if let Some(t) = ty {
            run = Some((ti, t));
        }
    }
    if let Some((s, _)) = run {
        spans.entry(Span::new(sent, s, tokens.len() - 1)).or_insert(None);
    }
}
