//! Bilingual-dictionary similarity and the lexical span scorer built on it.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::{Document, SentenceRange, Span};
use crate::error::{Error, Result};
use crate::predict::{make_qid, PredictionRecord, ScoreSource, Scorer, SpanPrediction};

/// Source-term to target-term translation pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dictionary {
    entries: HashMap<String, HashSet<String>>,
    len: usize,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, source: impl Into<String>, target: impl Into<String>) {
        if self.entries.entry(source.into()).or_default().insert(target.into()) {
            self.len += 1;
        }
    }

    pub fn contains(&self, source: &str, target: &str) -> bool {
        self.entries.get(source).is_some_and(|t| t.contains(target))
    }

    pub fn translations(&self, source: &str) -> impl Iterator<Item = &str> {
        self.entries.get(source).into_iter().flatten().map(String::as_str)
    }

    /// Number of distinct pairs.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Target-to-source view of the same pairs.
    pub fn inverted(&self) -> Dictionary {
        let mut inv = Dictionary::new();
        for (s, ts) in &self.entries {
            for t in ts {
                inv.insert(t.clone(), s.clone());
            }
        }
        inv
    }

    /// Tab-separated `source<TAB>target` lines. Blank lines are skipped.
    pub fn read<R: BufRead>(reader: R, origin: &str) -> Result<Self> {
        let mut dict = Dictionary::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::parse(origin, lineno, e.to_string()))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(s), Some(t), None) if !s.is_empty() && !t.is_empty() => dict.insert(s, t),
                _ => return Err(Error::parse(origin, lineno, "expected exactly two non-empty tab-separated fields")),
            }
        }
        Ok(dict)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Dictionary::read(BufReader::new(file), &path.display().to_string())
    }
}

/// Count of one-to-one token correspondences found greedily: source tokens
/// left to right, each taking the first unused target token it translates to.
pub fn greedy_matches<S: AsRef<str>, T: AsRef<str>>(src: &[S], tgt: &[T], dict: &Dictionary) -> usize {
    let mut used = vec![false; tgt.len()];
    let mut matched = 0;
    for s in src {
        let s = s.as_ref();
        if let Some(j) = (0..tgt.len()).find(|&j| !used[j] && dict.contains(s, tgt[j].as_ref())) {
            used[j] = true;
            matched += 1;
        }
    }
    matched
}

/// Dice-style similarity `2 * matches / (|src| + |tgt|)`, in `[0, 1]`.
pub fn lexical_score<S: AsRef<str>, T: AsRef<str>>(src: &[S], tgt: &[T], dict: &Dictionary) -> f64 {
    let total = src.len() + tgt.len();
    if total == 0 {
        return 0.0;
    }
    2.0 * greedy_matches(src, tgt, dict) as f64 / total as f64
}

/// Scores every run of up to `max_sentences` target sentences against the
/// query and keeps the `top_k` best. Spans are in token space; records carry
/// `null_score` for the threshold null rule.
#[derive(Clone, Debug)]
pub struct LexicalScorer {
    dict: Dictionary,
    max_sentences: usize,
    top_k: usize,
    null_score: f64,
}

impl LexicalScorer {
    pub fn new(dict: Dictionary) -> Self {
        LexicalScorer { dict, max_sentences: 2, top_k: 5, null_score: 0.0 }
    }

    pub fn max_sentences(mut self, n: usize) -> Self {
        self.max_sentences = n.max(1);
        self
    }

    pub fn top_k(mut self, k: usize) -> Self {
        self.top_k = k.max(1);
        self
    }

    pub fn null_score(mut self, s: f64) -> Self {
        self.null_score = s;
        self
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }
}

impl Scorer for LexicalScorer {
    fn predict(&self, query: &Document, query_span: Span, target: &Document) -> Result<PredictionRecord> {
        query.check_span(query_span)?;
        let q = &query.tokens()[query_span.start()..query_span.end()];
        let n = target.sentence_count();
        let mut preds = Vec::new();
        for start in 0..n {
            for len in 1..=self.max_sentences.min(n - start) {
                let span = target.span_of(SentenceRange::new(start, start + len)?)?;
                let t = &target.tokens()[span.start()..span.end()];
                preds.push(SpanPrediction { span: Some(span), score: lexical_score(q, t, &self.dict) });
            }
        }
        preds.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.span.cmp(&b.span)));
        preds.truncate(self.top_k);
        PredictionRecord::new(
            make_qid(query, query_span),
            query.doc_id(),
            query_span,
            target.doc_id(),
            preds,
            self.null_score,
            ScoreSource::Lexical,
            false,
        )
    }
}
