//! Corpus model and the 13-column tabular format.
//!
//! A corpus file is a sequence of documents delimited by
//! `#begin document <id>` / `#end document` lines. Each token is one line of
//! 13 tab-separated columns, in order:
//!
//! 1. document name
//! 2. sentence number
//! 3. token form
//! 4. coarse part-of-speech
//! 5. named-entity tag (BIO)
//! 6. root (lemma) of the token, or the token itself
//! 7. original (unnormalized) token
//! 8. coarse named-entity tag
//! 9. coreference mention index within its chain
//! 10. coreference chain number
//! 11. animacy
//! 12. phrase type (BIO chunk, with an optional grammatical-role suffix)
//! 13. fine part-of-speech
//!
//! The null marker for any column is `-`. Blank lines separate sentences.
//! Extra trailing columns are tolerated (with a warning); missing columns
//! are an error. Gold chains are reconstructed from maximal runs of tokens
//! sharing the same (chain, mention index) pair; a run never crosses a
//! sentence boundary.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

pub const COLUMNS: usize = 13;
pub const NULL: &str = "-";

/// Token-level animacy annotation (column 11).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenAnimacy {
    Animate,
    Inanimate,
    Unknown,
}

impl TokenAnimacy {
    fn parse(s: &str) -> Self {
        match s {
            "animate" => TokenAnimacy::Animate,
            "inanimate" => TokenAnimacy::Inanimate,
            _ => TokenAnimacy::Unknown,
        }
    }

    fn as_column(self) -> &'static str {
        match self {
            TokenAnimacy::Animate => "animate",
            TokenAnimacy::Inanimate => "inanimate",
            TokenAnimacy::Unknown => NULL,
        }
    }
}

/// One token with all its layer annotations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub form: String,
    /// Root/lemma column; falls back to the form in generated data.
    pub lemma: String,
    /// The unnormalized token exactly as it appeared in the source text.
    pub original: String,
    pub pos_coarse: String,
    pub pos_fine: String,
    /// BIO named-entity tag, e.g. `B-PER`, or `O`.
    pub ner: String,
    pub ner_coarse: String,
    pub animacy: TokenAnimacy,
    /// BIO chunk tag with optional role suffix, e.g. `B-NP-SBJ`, or `-`.
    pub phrase_type: String,
    /// Sentence index within the document (0-based).
    pub sent_index: usize,
    /// Token index within the sentence (0-based).
    pub token_index: usize,
    /// Token index within the document (0-based, across sentences).
    pub doc_token_index: usize,
    pub coref_chain: Option<u32>,
    pub coref_mention: Option<u32>,
}

impl Token {
    /// NER type with any BIO prefix stripped; `None` for `O`/null.
    pub fn ner_type(&self) -> Option<&str> {
        let t = self
            .ner
            .strip_prefix("B-")
            .or_else(|| self.ner.strip_prefix("I-"))
            .unwrap_or(&self.ner);
        if t == "O" || t == NULL || t.is_empty() {
            None
        } else {
            Some(t)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub tokens: Vec<Token>,
}

/// A contiguous token span inside one sentence. `end` is inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub sent: usize,
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(sent: usize, start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { sent, start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_token(&self, sent: usize, token: usize) -> bool {
        self.sent == sent && (self.start..=self.end).contains(&token)
    }
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}-{}", self.sent, self.start, self.end)
    }
}

/// A gold coreference chain: spans in document order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldChain {
    pub id: u32,
    pub spans: Vec<Span>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub sentences: Vec<Sentence>,
    pub gold_chains: Vec<GoldChain>,
}

impl Document {
    pub fn token(&self, sent: usize, idx: usize) -> &Token {
        &self.sentences[sent].tokens[idx]
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    pub fn span_tokens(&self, span: Span) -> &[Token] {
        &self.sentences[span.sent].tokens[span.start..=span.end]
    }

    /// Space-joined surface form of a span.
    pub fn span_text(&self, span: Span) -> String {
        let forms: Vec<&str> = self.span_tokens(span).iter().map(|t| t.form.as_str()).collect();
        forms.join(" ")
    }

    /// The gold chain that contains exactly this span, if any.
    pub fn chain_of_span(&self, span: Span) -> Option<u32> {
        self.gold_chains
            .iter()
            .find(|c| c.spans.contains(&span))
            .map(|c| c.id)
    }

    pub fn has_gold(&self) -> bool {
        !self.gold_chains.is_empty()
    }

    /// Checks structural invariants; used by tests and before writing.
    pub fn validate(&self) -> Result<()> {
        for (i, sent) in self.sentences.iter().enumerate() {
            if sent.index != i {
                return Err(Error::InconsistentChain {
                    line: 0,
                    reason: format!("sentence {i} carries index {}", sent.index),
                });
            }
        }
        for chain in &self.gold_chains {
            if chain.spans.is_empty() {
                return Err(Error::InconsistentChain {
                    line: 0,
                    reason: format!("chain {} has no mentions", chain.id),
                });
            }
            let mut seen = std::collections::HashSet::new();
            for span in &chain.spans {
                if !seen.insert(*span) {
                    return Err(Error::InconsistentChain {
                        line: 0,
                        reason: format!("chain {} repeats span {span}", chain.id),
                    });
                }
                if span.sent >= self.sentences.len()
                    || span.end >= self.sentences[span.sent].tokens.len()
                {
                    return Err(Error::InconsistentChain {
                        line: 0,
                        reason: format!("chain {} span {span} is out of bounds", chain.id),
                    });
                }
            }
        }
        Ok(())
    }
}

fn col(s: &str) -> Option<&str> {
    if s == NULL || s.is_empty() {
        None
    } else {
        Some(s)
    }
}

/// Parses corpus text into documents. See the module docs for the format.
pub fn parse_conll(input: &str) -> Result<Vec<Document>> {
    struct RunState {
        start: Span,
        last_token: usize,
        first_line: usize,
    }

    struct DocBuilder {
        id: String,
        sentences: Vec<Sentence>,
        current: Vec<Token>,
        current_sent_label: Option<String>,
        doc_token_count: usize,
        // open runs of (chain, mention index) -> span under construction
        open_runs: BTreeMap<(u32, u32), RunState>,
        // finished spans per (chain, mention index); more than one is an error
        finished: BTreeMap<(u32, u32), (Span, usize)>,
    }

    impl DocBuilder {
        fn new(id: String) -> Self {
            Self {
                id,
                sentences: Vec::new(),
                current: Vec::new(),
                current_sent_label: None,
                doc_token_count: 0,
                open_runs: BTreeMap::new(),
                finished: BTreeMap::new(),
            }
        }

        fn close_runs(&mut self, keep: Option<(u32, u32)>) -> Result<()> {
            let keys: Vec<(u32, u32)> = self
                .open_runs
                .keys()
                .copied()
                .filter(|k| Some(*k) != keep)
                .collect();
            for key in keys {
                let run = self.open_runs.remove(&key).expect("key just listed");
                let span = Span::new(run.start.sent, run.start.start, run.last_token);
                if let Some((old, _)) = self.finished.get(&key) {
                    return Err(Error::InconsistentChain {
                        line: run.first_line,
                        reason: format!(
                            "chain {} mention {} appears at both {} and {}",
                            key.0, key.1, old, span
                        ),
                    });
                }
                self.finished.insert(key, (span, run.first_line));
            }
            Ok(())
        }

        fn flush_sentence(&mut self) -> Result<()> {
            self.close_runs(None)?;
            if !self.current.is_empty() {
                let index = self.sentences.len();
                let tokens = std::mem::take(&mut self.current);
                self.sentences.push(Sentence { index, tokens });
            }
            self.current_sent_label = None;
            Ok(())
        }

        fn finish(mut self) -> Result<Document> {
            self.flush_sentence()?;
            // Group finished spans by chain, ordered by document position.
            let mut chains: BTreeMap<u32, Vec<Span>> = BTreeMap::new();
            for ((chain, _), (span, _)) in &self.finished {
                chains.entry(*chain).or_default().push(*span);
            }
            let gold_chains = chains
                .into_iter()
                .map(|(id, mut spans)| {
                    spans.sort();
                    GoldChain { id, spans }
                })
                .collect();
            Ok(Document {
                id: self.id,
                sentences: self.sentences,
                gold_chains,
            })
        }
    }

    let mut docs = Vec::new();
    let mut builder: Option<DocBuilder> = None;
    let mut extra_column_lines = 0usize;

    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim_end_matches('\r');

        if let Some(rest) = line.strip_prefix("#begin document") {
            if let Some(b) = builder.take() {
                docs.push(b.finish()?);
            }
            builder = Some(DocBuilder::new(rest.trim().to_string()));
            continue;
        }
        if line.starts_with("#end document") {
            if let Some(b) = builder.take() {
                docs.push(b.finish()?);
            }
            continue;
        }
        if line.starts_with('#') {
            continue; // other comment lines
        }
        if line.trim().is_empty() {
            if let Some(b) = builder.as_mut() {
                b.flush_sentence()?;
            }
            continue;
        }

        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < COLUMNS {
            return Err(Error::MalformedLine {
                line: lineno,
                expected: COLUMNS,
                found: fields.len(),
            });
        }
        if fields.len() > COLUMNS {
            extra_column_lines += 1;
        }

        let doc_name = fields[0].to_string();
        let b = match builder.as_mut() {
            Some(b) if b.id == doc_name => b,
            _ => {
                // Document boundary without an explicit marker.
                if let Some(prev) = builder.take() {
                    docs.push(prev.finish()?);
                }
                builder = Some(DocBuilder::new(doc_name));
                builder.as_mut().expect("just set")
            }
        };

        // A change in the sentence-number column also breaks the sentence,
        // so files without blank separators still parse.
        let sent_label = fields[1].to_string();
        if b.current_sent_label.as_deref() != Some(sent_label.as_str())
            && !b.current.is_empty()
        {
            b.flush_sentence()?;
        }
        b.current_sent_label = Some(sent_label);

        let mention = col(fields[8])
            .map(|s| {
                s.parse::<u32>().map_err(|_| Error::InconsistentChain {
                    line: lineno,
                    reason: format!("mention index {s:?} is not an integer"),
                })
            })
            .transpose()?;
        let chain = col(fields[9])
            .map(|s| {
                s.parse::<u32>().map_err(|_| Error::InconsistentChain {
                    line: lineno,
                    reason: format!("chain number {s:?} is not an integer"),
                })
            })
            .transpose()?;
        let (chain, mention) = match (chain, mention) {
            (Some(c), Some(m)) => (Some(c), Some(m)),
            (None, None) => (None, None),
            _ => {
                return Err(Error::InconsistentChain {
                    line: lineno,
                    reason: "chain number and mention index must appear together".into(),
                })
            }
        };

        let sent_index = b.sentences.len();
        let token_index = b.current.len();
        let token = Token {
            form: fields[2].to_string(),
            pos_coarse: fields[3].to_string(),
            ner: fields[4].to_string(),
            lemma: col(fields[5]).unwrap_or(fields[2]).to_string(),
            original: fields[6].to_string(),
            ner_coarse: fields[7].to_string(),
            coref_mention: mention,
            coref_chain: chain,
            animacy: TokenAnimacy::parse(fields[10]),
            phrase_type: fields[11].to_string(),
            pos_fine: fields[12].to_string(),
            sent_index,
            token_index,
            doc_token_index: b.doc_token_count,
        };
        b.doc_token_count += 1;

        // Maintain annotation runs.
        let key = chain.zip(mention);
        b.close_runs(key)?;
        if let Some(key) = key {
            match b.open_runs.get_mut(&key) {
                Some(run) if run.last_token + 1 == token_index => {
                    run.last_token = token_index;
                }
                Some(_) => {
                    return Err(Error::InconsistentChain {
                        line: lineno,
                        reason: format!(
                            "chain {} mention {} resumed after a gap",
                            key.0, key.1
                        ),
                    });
                }
                None => {
                    b.open_runs.insert(
                        key,
                        RunState {
                            start: Span::new(sent_index, token_index, token_index),
                            last_token: token_index,
                            first_line: lineno,
                        },
                    );
                }
            }
        }
        b.current.push(token);
    }

    if let Some(b) = builder.take() {
        docs.push(b.finish()?);
    }
    if extra_column_lines > 0 {
        log::warn!("{extra_column_lines} line(s) had extra trailing columns; extras ignored");
    }
    if docs.iter().all(|d| d.token_count() == 0) {
        return Err(Error::EmptyInput);
    }
    docs.retain(|d| d.token_count() > 0);
    Ok(docs)
}

pub fn read_corpus(path: &Path) -> Result<Vec<Document>> {
    let text = std::fs::read_to_string(path)?;
    parse_conll(&text)
}

/// Serializes documents back to the 13-column format.
///
/// Mention indexes are written as the span's position within its chain, and
/// sentence numbers as 0-based indexes, which is also what [`parse_conll`]
/// reconstructs — so parse → write → parse is the identity for documents
/// whose gold spans do not share tokens.
pub fn write_conll(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        // (sent, token) -> (chain, mention index)
        let mut marks: BTreeMap<(usize, usize), (u32, u32)> = BTreeMap::new();
        for chain in &doc.gold_chains {
            for (idx, span) in chain.spans.iter().enumerate() {
                for tok in span.start..=span.end {
                    marks.insert((span.sent, tok), (chain.id, idx as u32));
                }
            }
        }

        let _ = writeln!(out, "#begin document {}", doc.id);
        for (si, sent) in doc.sentences.iter().enumerate() {
            if si > 0 {
                out.push('\n');
            }
            for (ti, tok) in sent.tokens.iter().enumerate() {
                let (mention_col, chain_col) = match marks.get(&(si, ti)) {
                    Some((chain, idx)) => (idx.to_string(), chain.to_string()),
                    None => (NULL.to_string(), NULL.to_string()),
                };
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    doc.id,
                    si,
                    tok.form,
                    tok.pos_coarse,
                    tok.ner,
                    tok.lemma,
                    tok.original,
                    tok.ner_coarse,
                    mention_col,
                    chain_col,
                    tok.animacy.as_column(),
                    tok.phrase_type,
                    tok.pos_fine,
                );
            }
        }
        let _ = writeln!(out, "#end document");
    }
    out
}

pub fn write_corpus(path: &Path, docs: &[Document]) -> Result<()> {
    std::fs::write(path, write_conll(docs))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(doc: &str, sent: usize, form: &str, mention: &str, chain: &str) -> String {
        format!(
            "{doc}\t{sent}\t{form}\tN\tO\t{form}\t{form}\tO\t{mention}\t{chain}\t-\tB-NP\tNN"
        )
    }

    #[test]
    fn parses_one_document_with_one_chain() {
        let text = format!(
            "#begin document d0\n{}\n{}\n\n{}\n#end document\n",
            line("d0", 0, "Anna", "0", "7"),
            line("d0", 0, "slept", "-", "-"),
            line("d0", 1, "She", "1", "7"),
        );
        let docs = parse_conll(&text).unwrap();
        assert_eq!(docs.len(), 1);
        let d = &docs[0];
        assert_eq!(d.id, "d0");
        assert_eq!(d.sentences.len(), 2);
        assert_eq!(d.gold_chains.len(), 1);
        assert_eq!(
            d.gold_chains[0].spans,
            vec![Span::new(0, 0, 0), Span::new(1, 0, 0)]
        );
    }

    #[test]
    fn multi_token_mentions_form_single_spans() {
        let text = format!(
            "{}\n{}\n{}\n",
            line("d0", 0, "Tehran", "0", "3"),
            line("d0", 0, "Court", "0", "3"),
            line("d0", 0, "ruled", "-", "-"),
        );
        let docs = parse_conll(&text).unwrap();
        assert_eq!(docs[0].gold_chains[0].spans, vec![Span::new(0, 0, 1)]);
    }

    #[test]
    fn adjacent_mentions_with_distinct_indexes_stay_separate() {
        let text = format!(
            "{}\n{}\n",
            line("d0", 0, "Anna", "0", "2"),
            line("d0", 0, "Anna", "1", "2"),
        );
        let docs = parse_conll(&text).unwrap();
        assert_eq!(
            docs[0].gold_chains[0].spans,
            vec![Span::new(0, 0, 0), Span::new(0, 1, 1)]
        );
    }

    #[test]
    fn short_line_is_malformed() {
        let err = parse_conll("d0\t0\tAnna\tN\tO\n").unwrap_err();
        match err {
            Error::MalformedLine { line, expected, found } => {
                assert_eq!((line, expected, found), (1, COLUMNS, 5));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn extra_columns_are_tolerated() {
        let text = format!("{}\textra\n", line("d0", 0, "Anna", "-", "-"));
        let docs = parse_conll(&text).unwrap();
        assert_eq!(docs[0].token_count(), 1);
    }

    #[test]
    fn chain_without_mention_index_is_inconsistent() {
        let text = line("d0", 0, "Anna", "-", "7");
        assert!(matches!(
            parse_conll(&text).unwrap_err(),
            Error::InconsistentChain { line: 1, .. }
        ));
    }

    #[test]
    fn duplicate_mention_runs_are_inconsistent() {
        let text = format!(
            "{}\n{}\n{}\n",
            line("d0", 0, "Anna", "0", "7"),
            line("d0", 0, "slept", "-", "-"),
            line("d0", 0, "Anna", "0", "7"),
        );
        assert!(matches!(
            parse_conll(&text).unwrap_err(),
            Error::InconsistentChain { .. }
        ));
    }

    #[test]
    fn mention_runs_do_not_cross_sentences() {
        // Same (chain, mention) pair at a sentence boundary would be a
        // resumed run, i.e. two runs for one pair -> error.
        let text = format!(
            "{}\n\n{}\n",
            line("d0", 0, "Anna", "0", "7"),
            line("d0", 1, "Anna", "0", "7"),
        );
        assert!(matches!(
            parse_conll(&text).unwrap_err(),
            Error::InconsistentChain { .. }
        ));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse_conll("").unwrap_err(), Error::EmptyInput));
        assert!(matches!(
            parse_conll("#begin document x\n#end document\n").unwrap_err(),
            Error::EmptyInput
        ));
    }

    #[test]
    fn document_split_on_name_change_without_markers() {
        let text = format!(
            "{}\n{}\n",
            line("d0", 0, "Anna", "-", "-"),
            line("d1", 0, "Sara", "-", "-"),
        );
        let docs = parse_conll(&text).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].id, "d0");
        assert_eq!(docs[1].id, "d1");
    }

    #[test]
    fn round_trip_is_identity() {
        let text = format!(
            "#begin document d0\n{}\n{}\n\n{}\n#end document\n",
            line("d0", 0, "Anna", "0", "7"),
            line("d0", 0, "slept", "-", "-"),
            line("d0", 1, "She", "1", "7"),
        );
        let docs = parse_conll(&text).unwrap();
        let written = write_conll(&docs);
        assert_eq!(written, text);
        let reparsed = parse_conll(&written).unwrap();
        assert_eq!(reparsed, docs);
    }

    #[test]
    fn lemma_falls_back_to_form() {
        let text = "d0\t0\tsaid\tV\tO\t-\tsaid\tO\t-\t-\t-\t-\tVBD\n";
        let docs = parse_conll(text).unwrap();
        assert_eq!(docs[0].token(0, 0).lemma, "said");
    }
}
