//! The rule sieves: seven deterministic passes in decreasing-precision
//! order, each scanning active mentions against candidate entities and
//! committing the first match. Pronouns are left alone by every sieve
//! except the speaker sieve; they are handled by the learned linking stage.

use crate::attrs::PersonValue;
use crate::corpus::{Document, Span};
use crate::entity::{order_candidates, select_active_mentions, EntityStore};
use crate::error::{Error, Result};
use crate::lexicon::Lexicons;
use crate::mention::{is_proper_pos, is_punctuation, Mention, MentionKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SieveName {
    Speaker,
    ExactMatch,
    StrictHead,
    ProperName,
    Location,
    Title,
    Demonstrative,
}

impl SieveName {
    pub const ALL: [SieveName; 7] = [
        SieveName::Speaker,
        SieveName::ExactMatch,
        SieveName::StrictHead,
        SieveName::ProperName,
        SieveName::Location,
        SieveName::Title,
        SieveName::Demonstrative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SieveName::Speaker => "speaker",
            SieveName::ExactMatch => "exact-match",
            SieveName::StrictHead => "strict-head",
            SieveName::ProperName => "proper-name",
            SieveName::Location => "location",
            SieveName::Title => "title",
            SieveName::Demonstrative => "demonstrative",
        }
    }

    /// Sieves that compare across the whole document; the rest are limited
    /// to a sentence window.
    pub fn is_global(self) -> bool {
        matches!(self, SieveName::ExactMatch | SieveName::ProperName)
    }
}

impl fmt::Display for SieveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SieveName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_lowercase().replace('_', "-");
        SieveName::ALL
            .into_iter()
            .find(|v| v.name() == norm)
            .ok_or_else(|| Error::UnknownSieveName(s.to_string()))
    }
}

/// Pipeline configuration: which sieves run, in what order, and how far
/// back windowed sieves may look.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveConfig {
    pub order: Vec<SieveName>,
    pub enabled: BTreeMap<SieveName, bool>,
    /// Default lookback for windowed sieves, in sentences.
    pub sentence_window: usize,
    /// Per-sieve window overrides.
    pub window_overrides: BTreeMap<SieveName, usize>,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            order: SieveName::ALL.to_vec(),
            enabled: SieveName::ALL.into_iter().map(|s| (s, true)).collect(),
            sentence_window: 3,
            window_overrides: BTreeMap::new(),
        }
    }
}

impl SieveConfig {
    /// No rule sieves at all (learned-stage-only configurations).
    pub fn none() -> Self {
        Self {
            order: Vec::new(),
            enabled: SieveName::ALL.into_iter().map(|s| (s, false)).collect(),
            sentence_window: 3,
            window_overrides: BTreeMap::new(),
        }
    }

    pub fn is_enabled(&self, sieve: SieveName) -> bool {
        self.enabled.get(&sieve).copied().unwrap_or(true)
    }

    /// The sieves that will actually run, in order.
    pub fn effective_order(&self) -> Vec<SieveName> {
        self.order
            .iter()
            .copied()
            .filter(|s| self.is_enabled(*s))
            .collect()
    }

    /// `None` means unlimited (document-global sieve).
    pub fn window_for(&self, sieve: SieveName) -> Option<usize> {
        if let Some(w) = self.window_overrides.get(&sieve) {
            return Some(*w);
        }
        if sieve.is_global() {
            None
        } else {
            Some(self.sentence_window)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for s in &self.order {
            if !seen.insert(*s) {
                return Err(Error::Config(format!("sieve {s} listed twice in order")));
            }
        }
        for s in SieveName::ALL {
            if self.is_enabled(s) && !self.order.contains(&s) {
                return Err(Error::Config(format!(
                    "sieve {s} is enabled but missing from the order"
                )));
            }
        }
        Ok(())
    }
}

/// Runs the configured sieves over fresh singleton entities.
pub fn run_pipeline(
    doc: &Document,
    mentions: &[Mention],
    cfg: &SieveConfig,
    lex: &Lexicons,
) -> Result<EntityStore> {
    cfg.validate()?;
    let mut store = EntityStore::new(mentions);
    for sieve in cfg.effective_order() {
        apply_sieve(doc, mentions, &mut store, sieve, cfg, lex)?;
    }
    Ok(store)
}

/// One pass of one sieve.
pub fn apply_sieve(
    doc: &Document,
    mentions: &[Mention],
    store: &mut EntityStore,
    sieve: SieveName,
    cfg: &SieveConfig,
    lex: &Lexicons,
) -> Result<()> {
    let window = cfg.window_for(sieve);
    // The speaker sieve may link a quoted pronoun to a mention that *follows*
    // the quote, so the usual "skip the document-initial mention" shortcut
    // (nothing can precede it) does not apply there.
    let actives: Vec<usize> = if sieve == SieveName::Speaker {
        store.entities().map(|e| e.first_mention()).collect()
    } else {
        select_active_mentions(store)
    };
    for m_id in actives {
        // A merge earlier in this pass may have demoted the mention.
        let own = store.entity_of(m_id);
        if store.entity(own).first_mention() != m_id {
            continue;
        }
        let m = &mentions[m_id];
        if sieve == SieveName::Speaker {
            speaker_link(doc, mentions, store, m_id, lex)?;
            continue;
        }
        if m.kind == MentionKind::Pronoun {
            continue;
        }
        let candidates = order_candidates(m_id, mentions, store, window);
        'candidates: for cand in candidates {
            for &p_id in &store.entity(cand).mentions.clone() {
                let p = &mentions[p_id];
                if !p.precedes(m) || p.kind == MentionKind::Pronoun {
                    continue;
                }
                if let Some(w) = window {
                    if m.span.sent - p.span.sent > w {
                        continue;
                    }
                }
                if sieve_predicate(sieve, doc, m, p, lex) {
                    let own = store.entity_of(m_id);
                    store.merge(cand, own)?;
                    break 'candidates;
                }
            }
        }
    }
    Ok(())
}

fn sieve_predicate(
    sieve: SieveName,
    doc: &Document,
    m: &Mention,
    p: &Mention,
    lex: &Lexicons,
) -> bool {
    match sieve {
        SieveName::Speaker => unreachable!("speaker sieve has its own path"),
        SieveName::ExactMatch => exact_match(doc, m, p),
        SieveName::StrictHead => strict_head(doc, m, p),
        SieveName::ProperName => proper_name(doc, m, p, lex),
        SieveName::Location => location_match(doc, m, p),
        SieveName::Title => title_apposition(doc, m, p, lex),
        SieveName::Demonstrative => demonstrative_match(doc, m, p),
    }
}

// ---------------------------------------------------------------------------
// Sieve predicates

fn forms(doc: &Document, m: &Mention) -> Vec<String> {
    doc.span_tokens(m.span)
        .iter()
        .map(|t| t.form.clone())
        .collect()
}

fn head_form<'d>(doc: &'d Document, m: &Mention) -> &'d str {
    &m.head_token(doc).form
}

/// `needle` appears in `haystack` in order, not necessarily contiguously.
fn is_token_subsequence(needle: &[String], haystack: &[String]) -> bool {
    let mut it = haystack.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

/// `needle` appears in `haystack` as a contiguous sublist.
fn is_token_sublist(needle: &[String], haystack: &[String]) -> bool {
    needle.len() <= haystack.len()
        && (0..=haystack.len() - needle.len())
            .any(|i| haystack[i..i + needle.len()] == *needle)
}

/// Identical surface strings ("Islamic Azad University" twice).
fn exact_match(doc: &Document, m: &Mention, p: &Mention) -> bool {
    forms(doc, m) == forms(doc, p)
}

/// Same head and the shorter mention's tokens are an ordered subsequence of
/// the longer one's: "Tehran Court" ⊂ "Tehran High Court". Ruled out when
/// the extra material is on the wrong side of the head: "Tehran University"
/// vs "Washington University" share a head but neither contains the other.
fn strict_head(doc: &Document, m: &Mention, p: &Mention) -> bool {
    if head_form(doc, m) != head_form(doc, p) {
        return false;
    }
    let fm = forms(doc, m);
    let fp = forms(doc, p);
    is_token_subsequence(&fm, &fp) || is_token_subsequence(&fp, &fm)
}

/// Identical proper-noun heads carrying person evidence (PER tag or a
/// gazetteer name): "Karimi" ← "Dr. Karimi of Tehran". The person
/// restriction keeps head-sharing organizations ("Tehran University" /
/// "Washington University") apart.
fn proper_name(doc: &Document, m: &Mention, p: &Mention, lex: &Lexicons) -> bool {
    let hm = m.head_token(doc);
    let hp = p.head_token(doc);
    if hm.form != hp.form || !is_proper_pos(hm) || !is_proper_pos(hp) {
        return false;
    }
    let person_evidence = |t: &crate::corpus::Token| {
        t.ner_type() == Some("PER") || lex.name_gender(&t.form).is_some()
    };
    person_evidence(hm) && person_evidence(hp)
}

const LOCATION_TYPES: [&str; 3] = ["LOC", "GPE", "FAC"];

/// Both heads are location-typed and one mention contains the other as a
/// contiguous token sequence: "Tehran" ⊂ "Tehran city".
fn location_match(doc: &Document, m: &Mention, p: &Mention) -> bool {
    let loc = |x: &Mention| {
        x.head_token(doc)
            .ner_type()
            .is_some_and(|t| LOCATION_TYPES.contains(&t))
    };
    if !loc(m) || !loc(p) {
        return false;
    }
    let fm = forms(doc, m);
    let fp = forms(doc, p);
    is_token_sublist(&fm, &fp) || is_token_sublist(&fp, &fm)
}

/// A title phrase and a person name adjacent in the same sentence
/// (apposition, at most one punctuation token between them).
fn title_apposition(doc: &Document, m: &Mention, p: &Mention, lex: &Lexicons) -> bool {
    if m.span.sent != p.span.sent {
        return false;
    }
    let (a, b) = if p.span.start <= m.span.start { (p, m) } else { (m, p) };
    if b.span.start <= a.span.end {
        return false; // overlapping spans are not an apposition
    }
    let gap = b.span.start - a.span.end - 1;
    if gap > 1 {
        return false;
    }
    if gap == 1 && !is_punctuation(doc.token(a.span.sent, a.span.end + 1)) {
        return false;
    }
    let is_title_phrase = |x: &Mention| {
        let h = x.head_token(doc);
        lex.is_title(&h.lemma) || lex.is_title(&h.form)
    };
    let is_person_name = |x: &Mention| {
        let h = x.head_token(doc);
        h.ner_type() == Some("PER") || (is_proper_pos(h) && lex.name_gender(&h.form).is_some())
    };
    (is_title_phrase(a) && is_person_name(b)) || (is_person_name(a) && is_title_phrase(b))
}

/// A demonstrative phrase whose content head matches an earlier mention's
/// head: "this exhibition" ← "the flower exhibition".
fn demonstrative_match(doc: &Document, m: &Mention, p: &Mention) -> bool {
    m.kind == MentionKind::Demonstrative && head_form(doc, m) == head_form(doc, p)
}

// ---------------------------------------------------------------------------
// Speaker sieve

pub(crate) const QUOTE_MARKS: [&str; 7] = ["\"", "“", "”", "«", "»", "``", "''"];

/// Token-index ranges (open, close), exclusive interior, of paired quote
/// marks within one sentence.
pub(crate) fn quote_ranges(doc: &Document, sent: usize) -> Vec<(usize, usize)> {
    let mut ranges = Vec::new();
    let mut open: Option<usize> = None;
    for (ti, tok) in doc.sentences[sent].tokens.iter().enumerate() {
        if QUOTE_MARKS.contains(&tok.form.as_str()) {
            match open.take() {
                Some(o) => ranges.push((o, ti)),
                None => open = Some(ti),
            }
        }
    }
    ranges
}

fn inside_any(ranges: &[(usize, usize)], ti: usize) -> bool {
    ranges.iter().any(|(o, c)| ti > *o && ti < *c)
}

fn span_inside_any(ranges: &[(usize, usize)], span: Span) -> bool {
    ranges.iter().any(|(o, c)| span.start > *o && span.end < *c)
}

/// Links a first/second-person pronoun inside a quotation to the quoting
/// speaker: the mention nearest to the reporting verb, outside the quotes,
/// in the same sentence. Number and animacy must stay compatible (person
/// deliberately is not checked — that shift is the point of the sieve).
fn speaker_link(
    doc: &Document,
    mentions: &[Mention],
    store: &mut EntityStore,
    m_id: usize,
    lex: &Lexicons,
) -> Result<()> {
    let m = &mentions[m_id];
    if m.kind != MentionKind::Pronoun {
        return Ok(());
    }
    let first_or_second = m.attrs.person.contains(PersonValue::First)
        || m.attrs.person.contains(PersonValue::Second);
    if !first_or_second && !lex.is_speech_pronoun(&m.head_token(doc).form) {
        return Ok(());
    }
    let ranges = quote_ranges(doc, m.span.sent);
    if !inside_any(&ranges, m.span.start) {
        return Ok(());
    }

    // Reporting verb in the same sentence, outside all quote ranges.
    let sent = &doc.sentences[m.span.sent];
    let verb = sent
        .tokens
        .iter()
        .enumerate()
        .filter(|(ti, tok)| !inside_any(&ranges, *ti) && lex.is_quote_verb(&tok.lemma))
        .map(|(ti, _)| ti)
        .next();
    let Some(verb_ti) = verb else {
        return Ok(());
    };

    // Speaker: non-pronoun mention in the same sentence, outside quotes,
    // nearest to the verb (ties prefer the mention before the verb).
    let speaker = mentions
        .iter()
        .filter(|s| {
            s.id != m_id
                && s.kind != MentionKind::Pronoun
                && s.span.sent == m.span.sent
                && !span_inside_any(&ranges, s.span)
        })
        .min_by_key(|s| {
            let dist = if s.span.end < verb_ti {
                verb_ti - s.span.end
            } else if s.span.start > verb_ti {
                s.span.start - verb_ti
            } else {
                return (usize::MAX, 0usize); // contains the verb: not a speaker
            };
            let after_penalty = usize::from(s.span.start > verb_ti);
            (dist * 2 + after_penalty, s.id)
        });
    let Some(speaker) = speaker else {
        return Ok(());
    };
    if !m.attrs.number.compatible(speaker.attrs.number)
        || !m.attrs.animacy.compatible(speaker.attrs.animacy)
    {
        return Ok(());
    }

    let se = store.entity_of(speaker.id);
    let me = store.entity_of(m_id);
    if se != me {
        store.merge(se, me)?;
    }
    Ok(())
}
