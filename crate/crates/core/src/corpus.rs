//! Documents, spans, sentence alignments and their on-disk formats.
//!
//! Spans are half-open token intervals in memory. Files that carry token
//! positions use 1-based inclusive `[k, l]` pairs; [`Span::from_inclusive`]
//! and [`Span::to_inclusive`] convert at the boundary.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-open token interval `[start, end)` with `start < end`.
///
/// The null span is modelled as `Option<Span>::None` throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    start: usize,
    end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start >= end {
            return Err(Error::Validation(format!("span [{start}, {end}) is empty or reversed")));
        }
        Ok(Span { start, end })
    }

    /// From a 1-based inclusive `(k, l)` pair.
    pub fn from_inclusive(k: usize, l: usize) -> Result<Self> {
        if k == 0 || k > l {
            return Err(Error::Validation(format!("inclusive span [{k}, {l}] must satisfy 1 <= k <= l")));
        }
        Ok(Span { start: k - 1, end: l })
    }

    /// Back to a 1-based inclusive `(k, l)` pair.
    pub fn to_inclusive(self) -> (usize, usize) {
        (self.start + 1, self.end)
    }

    pub fn start(self) -> usize {
        self.start
    }

    pub fn end(self) -> usize {
        self.end
    }

    pub fn len(self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlap(self, other: Span) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        hi.saturating_sub(lo)
    }

    /// Shifts both endpoints down by `by`. Fails if the result would be empty
    /// or negative.
    pub(crate) fn shifted_down(self, by: usize) -> Option<Span> {
        let start = self.start.checked_sub(by)?;
        Span::new(start, self.end.checked_sub(by)?).ok()
    }
}

/// Non-empty run of consecutive sentence indices `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SentenceRange {
    start: usize,
    end: usize,
}

impl SentenceRange {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start >= end {
            return Err(Error::Validation(format!("sentence range [{start}, {end}) is empty")));
        }
        Ok(SentenceRange { start, end })
    }

    pub fn single(id: usize) -> Self {
        SentenceRange { start: id, end: id + 1 }
    }

    /// Accepts a strictly increasing, gap-free, non-empty id list.
    pub fn from_ids(ids: &[usize]) -> Result<Self> {
        let (first, last) = match (ids.first(), ids.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return Err(Error::Validation("empty sentence id list".into())),
        };
        if !is_contiguous(ids) {
            return Err(Error::Validation(format!("sentence ids {ids:?} are not a contiguous increasing run")));
        }
        Ok(SentenceRange { start: first, end: last + 1 })
    }

    pub fn start(self) -> usize {
        self.start
    }

    pub fn end(self) -> usize {
        self.end
    }

    pub fn len(self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn ids(self) -> Vec<usize> {
        (self.start..self.end).collect()
    }

    pub fn overlaps(self, other: SentenceRange) -> bool {
        self.start < other.end && other.start < self.end
    }
}

fn is_contiguous(ids: &[usize]) -> bool {
    ids.windows(2).all(|w| w[1] == w[0] + 1)
}

fn is_strictly_increasing(ids: &[usize]) -> bool {
    ids.windows(2).all(|w| w[0] < w[1])
}

/// Joins tokens with a single space, or with nothing for scripts written
/// without inter-word spaces.
pub fn detokenize<S: AsRef<str>>(tokens: &[S], no_space: bool) -> String {
    let sep = if no_space { "" } else { " " };
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        out.push_str(t.as_ref());
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sentence {
    pub sent_id: usize,
    pub text: String,
    pub tokens: Vec<String>,
    pub token_range: Span,
}

/// A tokenized, sentence-split document. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    doc_id: String,
    lang: String,
    no_space: bool,
    sentences: Vec<Sentence>,
    tokens: Vec<String>,
}

impl Document {
    /// Builds a document from `(text, tokens)` sentences, deriving token
    /// ranges. Every sentence needs at least one non-empty token and its
    /// tokens must detokenize back to its text.
    pub fn new<I>(doc_id: impl Into<String>, lang: impl Into<String>, no_space: bool, sentences: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<String>)>,
    {
        let doc_id = doc_id.into();
        let mut tokens = Vec::new();
        let mut out = Vec::new();
        for (sent_id, (text, toks)) in sentences.into_iter().enumerate() {
            if toks.is_empty() {
                return Err(Error::Validation(format!("document {doc_id:?}: sentence {sent_id} has no tokens")));
            }
            if let Some(pos) = toks.iter().position(|t| t.is_empty()) {
                return Err(Error::Validation(format!("document {doc_id:?}: sentence {sent_id} token {pos} is empty")));
            }
            let joined = detokenize(&toks, no_space);
            if joined != text {
                return Err(Error::Validation(format!(
                    "document {doc_id:?}: sentence {sent_id} text {text:?} does not match its tokens (joined {joined:?})"
                )));
            }
            let start = tokens.len();
            tokens.extend(toks.iter().cloned());
            out.push(Sentence { sent_id, text, tokens: toks, token_range: Span { start, end: tokens.len() } });
        }
        Ok(Document { doc_id, lang: lang.into(), no_space, sentences: out, tokens })
    }

    /// Convenience constructor: each sentence given as its token list.
    pub fn from_tokens<S: AsRef<str>>(
        doc_id: impl Into<String>,
        lang: impl Into<String>,
        no_space: bool,
        sentences: &[Vec<S>],
    ) -> Result<Self> {
        let sents = sentences.iter().map(|toks| {
            let toks: Vec<String> = toks.iter().map(|t| t.as_ref().to_string()).collect();
            (detokenize(&toks, no_space), toks)
        });
        Document::new(doc_id, lang, no_space, sents.collect::<Vec<_>>())
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn no_space(&self) -> bool {
        self.no_space
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    /// Sentence boundaries `0 = b_0 < b_1 < ... < b_S = M`.
    pub fn boundaries(&self) -> Vec<usize> {
        let mut b = Vec::with_capacity(self.sentences.len() + 1);
        b.push(0);
        b.extend(self.sentences.iter().map(|s| s.token_range.end));
        b
    }

    /// Token span covered by a run of sentences.
    pub fn span_of(&self, range: SentenceRange) -> Result<Span> {
        if range.end > self.sentences.len() {
            return Err(Error::Reference(format!(
                "sentence range [{}, {}) outside document {:?} with {} sentences",
                range.start,
                range.end,
                self.doc_id,
                self.sentences.len()
            )));
        }
        Ok(Span {
            start: self.sentences[range.start].token_range.start,
            end: self.sentences[range.end - 1].token_range.end,
        })
    }

    /// Index of the sentence containing token `pos`.
    pub fn sentence_at(&self, pos: usize) -> Option<usize> {
        if pos >= self.tokens.len() {
            return None;
        }
        Some(self.sentences.partition_point(|s| s.token_range.end <= pos))
    }

    pub fn check_span(&self, span: Span) -> Result<()> {
        if span.end > self.tokens.len() {
            return Err(Error::Validation(format!(
                "span [{}, {}) exceeds document {:?} of {} tokens",
                span.start,
                span.end,
                self.doc_id,
                self.tokens.len()
            )));
        }
        Ok(())
    }
}

/// Sentences whose token range lies entirely inside `span`. A null span
/// covers nothing.
pub fn span_to_sentence_cover(doc: &Document, span: Option<Span>) -> Vec<usize> {
    let Some(span) = span else {
        return Vec::new();
    };
    doc.sentences.iter().filter(|s| span.contains(s.token_range)).map(|s| s.sent_id).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SentenceRecord {
    text: String,
    tokens: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentRecord {
    doc_id: String,
    lang: String,
    #[serde(default)]
    no_space: bool,
    sentences: Vec<SentenceRecord>,
}

/// Reads line-delimited document records. Blank lines are skipped.
pub fn read_corpus<R: BufRead>(reader: R, origin: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DocumentRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        if !seen.insert(rec.doc_id.clone()) {
            return Err(Error::Validation(format!("duplicate doc_id {:?}", rec.doc_id)).at(origin, lineno));
        }
        let sents = rec.sentences.into_iter().map(|s| (s.text, s.tokens));
        let doc = Document::new(rec.doc_id, rec.lang, rec.no_space, sents.collect::<Vec<_>>())
            .map_err(|e| e.at(origin, lineno))?;
        docs.push(doc);
    }
    Ok(docs)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file), &path.display().to_string())
}

pub fn write_corpus<W: Write>(mut w: W, docs: &[Document]) -> std::io::Result<()> {
    for doc in docs {
        let rec = DocumentRecord {
            doc_id: doc.doc_id.clone(),
            lang: doc.lang.clone(),
            no_space: doc.no_space,
            sentences: doc
                .sentences
                .iter()
                .map(|s| SentenceRecord { text: s.text.clone(), tokens: s.tokens.clone() })
                .collect(),
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// One aligned unit: source sentence ids paired with target sentence ids.
/// Either side may be empty (a null alignment), not both.
#[derive(Clone, Debug, PartialEq)]
pub struct AlignmentGroup {
    src: Vec<usize>,
    tgt: Vec<usize>,
    score: Option<f64>,
}

impl AlignmentGroup {
    pub fn new(src: Vec<usize>, tgt: Vec<usize>, score: Option<f64>) -> Result<Self> {
        if src.is_empty() && tgt.is_empty() {
            return Err(Error::Validation("alignment group with both sides empty".into()));
        }
        if !is_strictly_increasing(&src) || !is_strictly_increasing(&tgt) {
            return Err(Error::Validation(format!(
                "alignment group ids must be strictly increasing: src {src:?}, tgt {tgt:?}"
            )));
        }
        if let Some(s) = score {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::Validation(format!("alignment score {s} is not in [0, inf)")));
            }
        }
        Ok(AlignmentGroup { src, tgt, score })
    }

    pub fn from_ranges(src: Option<SentenceRange>, tgt: Option<SentenceRange>, score: Option<f64>) -> Result<Self> {
        AlignmentGroup::new(
            src.map(SentenceRange::ids).unwrap_or_default(),
            tgt.map(SentenceRange::ids).unwrap_or_default(),
            score,
        )
    }

    pub fn src(&self) -> &[usize] {
        &self.src
    }

    pub fn tgt(&self) -> &[usize] {
        &self.tgt
    }

    pub fn score(&self) -> Option<f64> {
        self.score
    }

    pub fn is_null(&self) -> bool {
        self.src.is_empty() || self.tgt.is_empty()
    }

    pub fn is_contiguous(&self) -> bool {
        is_contiguous(&self.src) && is_contiguous(&self.tgt)
    }

    fn transposed(&self) -> Self {
        AlignmentGroup { src: self.tgt.clone(), tgt: self.src.clone(), score: self.score }
    }
}

/// Sentence alignment for one document pair. No sentence belongs to two
/// groups on either side.
#[derive(Clone, Debug, PartialEq)]
pub struct Alignment {
    src_doc_id: String,
    tgt_doc_id: String,
    links: Vec<AlignmentGroup>,
}

impl Alignment {
    pub fn new(
        src_doc_id: impl Into<String>,
        tgt_doc_id: impl Into<String>,
        links: Vec<AlignmentGroup>,
    ) -> Result<Self> {
        let a = Alignment { src_doc_id: src_doc_id.into(), tgt_doc_id: tgt_doc_id.into(), links };
        a.check_disjoint()?;
        Ok(a)
    }

    fn check_disjoint(&self) -> Result<()> {
        let mut src = HashSet::new();
        let mut tgt = HashSet::new();
        for g in &self.links {
            for &s in &g.src {
                if !src.insert(s) {
                    return Err(Error::Validation(format!(
                        "source sentence {s} appears in more than one group ({} -> {})",
                        self.src_doc_id, self.tgt_doc_id
                    )));
                }
            }
            for &t in &g.tgt {
                if !tgt.insert(t) {
                    return Err(Error::Validation(format!(
                        "target sentence {t} appears in more than one group ({} -> {})",
                        self.src_doc_id, self.tgt_doc_id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn src_doc_id(&self) -> &str {
        &self.src_doc_id
    }

    pub fn tgt_doc_id(&self) -> &str {
        &self.tgt_doc_id
    }

    pub fn links(&self) -> &[AlignmentGroup] {
        &self.links
    }

    /// All `(s, t)` sentence pairs induced by the groups. Null groups induce
    /// none.
    pub fn induced_links(&self) -> BTreeSet<(usize, usize)> {
        self.links.iter().flat_map(|g| g.src.iter().flat_map(move |&s| g.tgt.iter().map(move |&t| (s, t)))).collect()
    }

    /// The same alignment seen from the target side.
    pub fn transposed(&self) -> Self {
        Alignment {
            src_doc_id: self.tgt_doc_id.clone(),
            tgt_doc_id: self.src_doc_id.clone(),
            links: self.links.iter().map(AlignmentGroup::transposed).collect(),
        }
    }

    /// Checks sentence indices against the two documents and, optionally,
    /// that every group side is a contiguous run.
    pub fn check_against(&self, src: &Document, tgt: &Document, require_contiguous: bool) -> Result<()> {
        if src.doc_id() != self.src_doc_id || tgt.doc_id() != self.tgt_doc_id {
            return Err(Error::Reference(format!(
                "alignment {} -> {} checked against documents {} -> {}",
                self.src_doc_id,
                self.tgt_doc_id,
                src.doc_id(),
                tgt.doc_id()
            )));
        }
        for g in &self.links {
            if let Some(&s) = g.src.iter().find(|&&s| s >= src.sentence_count()) {
                return Err(Error::Reference(format!(
                    "source sentence {s} not in document {:?} ({} sentences)",
                    self.src_doc_id,
                    src.sentence_count()
                )));
            }
            if let Some(&t) = g.tgt.iter().find(|&&t| t >= tgt.sentence_count()) {
                return Err(Error::Reference(format!(
                    "target sentence {t} not in document {:?} ({} sentences)",
                    self.tgt_doc_id,
                    tgt.sentence_count()
                )));
            }
            if require_contiguous && !g.is_contiguous() {
                return Err(Error::Validation(format!("group src {:?} tgt {:?} is not contiguous", g.src, g.tgt)));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupRecord {
    src: Vec<usize>,
    tgt: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlignmentRecord {
    src_doc_id: String,
    tgt_doc_id: String,
    links: Vec<GroupRecord>,
}

/// Parses alignment records and checks the structural invariants (group
/// shape, non-overlap) without resolving documents.
pub fn parse_alignments<R: BufRead>(reader: R, origin: &str) -> Result<Vec<(usize, Alignment)>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: AlignmentRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
        let links = rec
            .links
            .into_iter()
            .map(|g| AlignmentGroup::new(g.src, g.tgt, g.score))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.at(origin, lineno))?;
        let a = Alignment::new(rec.src_doc_id, rec.tgt_doc_id, links).map_err(|e| e.at(origin, lineno))?;
        out.push((lineno, a));
    }
    Ok(out)
}

/// Reads alignments and resolves every doc id and sentence index against the
/// given documents. Gold data should pass `require_contiguous = true`.
pub fn read_alignments<R: BufRead>(
    reader: R,
    origin: &str,
    src_docs: &[Document],
    tgt_docs: &[Document],
    require_contiguous: bool,
) -> Result<Vec<Alignment>> {
    let src_by_id: HashMap<&str, &Document> = src_docs.iter().map(|d| (d.doc_id(), d)).collect();
    let tgt_by_id: HashMap<&str, &Document> = tgt_docs.iter().map(|d| (d.doc_id(), d)).collect();
    let mut out = Vec::new();
    for (lineno, a) in parse_alignments(reader, origin)? {
        let src = src_by_id.get(a.src_doc_id()).ok_or_else(|| {
            Error::Reference(format!("unknown source doc_id {:?}", a.src_doc_id())).at(origin, lineno)
        })?;
        let tgt = tgt_by_id.get(a.tgt_doc_id()).ok_or_else(|| {
            Error::Reference(format!("unknown target doc_id {:?}", a.tgt_doc_id())).at(origin, lineno)
        })?;
        a.check_against(src, tgt, require_contiguous).map_err(|e| e.at(origin, lineno))?;
        out.push(a);
    }
    Ok(out)
}

pub fn load_alignments(
    path: impl AsRef<Path>,
    src_docs: &[Document],
    tgt_docs: &[Document],
    require_contiguous: bool,
) -> Result<Vec<Alignment>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_alignments(BufReader::new(file), &path.display().to_string(), src_docs, tgt_docs, require_contiguous)
}

pub fn write_alignments<W: Write>(mut w: W, alignments: &[Alignment]) -> std::io::Result<()> {
    for a in alignments {
        let rec = AlignmentRecord {
            src_doc_id: a.src_doc_id.clone(),
            tgt_doc_id: a.tgt_doc_id.clone(),
            links: a
                .links
                .iter()
                .map(|g| GroupRecord { src: g.src.clone(), tgt: g.tgt.clone(), score: g.score })
                .collect(),
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
