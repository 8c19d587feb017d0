//! A scorer that knows the answer: position distributions concentrated on a
//! gold alignment's group boundaries. Used to exercise the pipeline end to
//! end with a controllable amount of noise.

use std::collections::HashMap;

use crate::corpus::{Alignment, Document, SentenceRange, Span};
use crate::error::{Error, Result};
use crate::predict::{make_qid, top_k_spans, PositionDistributions, PredictionRecord, ScoreSource, Scorer};

#[derive(Clone, Debug)]
struct Oriented {
    query_doc: String,
    target_doc: String,
    /// Query-side token span -> gold target token span (None = null aligned).
    answers: HashMap<Span, Option<Span>>,
    queries: Vec<Span>,
}

#[derive(Clone, Debug)]
pub struct PlantedScorer {
    forward: Oriented,
    reverse: Oriented,
    sharpness: f64,
    top_k: usize,
}

impl PlantedScorer {
    /// `sharpness` in `(0, 1]` is the mass placed on each gold boundary; the
    /// remainder is spread evenly over the other positions.
    pub fn new(gold: &Alignment, src: &Document, tgt: &Document, sharpness: f64) -> Result<Self> {
        if !(sharpness > 0.0 && sharpness <= 1.0) {
            return Err(Error::Config(format!("sharpness must be in (0, 1], got {sharpness}")));
        }
        gold.check_against(src, tgt, true)?;
        Ok(PlantedScorer {
            forward: orient(gold, src, tgt)?,
            reverse: orient(&gold.transposed(), tgt, src)?,
            sharpness,
            top_k: 5,
        })
    }

    pub fn top_k(mut self, k: usize) -> Self {
        self.top_k = k.max(1);
        self
    }

    /// Query spans for the given query document: one per gold group side and
    /// one per sentence outside every group, in document order.
    pub fn queries(&self, query_doc_id: &str) -> Result<&[Span]> {
        Ok(&self.side(query_doc_id)?.queries)
    }

    fn side(&self, query_doc_id: &str) -> Result<&Oriented> {
        if query_doc_id == self.forward.query_doc {
            Ok(&self.forward)
        } else if query_doc_id == self.reverse.query_doc {
            Ok(&self.reverse)
        } else {
            Err(Error::Reference(format!("planted scorer has no gold for query document {query_doc_id:?}")))
        }
    }

    /// The constructed distributions for one query span, with an `<NA>` slot
    /// at position 0.
    pub fn distributions(
        &self,
        query: &Document,
        query_span: Span,
        target: &Document,
    ) -> Result<PositionDistributions> {
        let side = self.side(query.doc_id())?;
        if side.target_doc != target.doc_id() {
            return Err(Error::Reference(format!(
                "planted scorer pairs {:?} with {:?}, not {:?}",
                side.query_doc,
                side.target_doc,
                target.doc_id()
            )));
        }
        let positions = target.token_count() + 1;
        let rest = if positions > 1 { (1.0 - self.sharpness) / (positions - 1) as f64 } else { 0.0 };
        let mut p1 = vec![rest; positions];
        let mut p2 = vec![rest; positions];
        match side.answers.get(&query_span).copied().flatten() {
            Some(answer) => {
                p1[answer.start() + 1] = self.sharpness;
                p2[answer.end()] = self.sharpness;
            }
            None => {
                p1[0] = self.sharpness;
                p2[0] = self.sharpness;
            }
        }
        PositionDistributions::new(p1, p2, true)
    }
}

impl Scorer for PlantedScorer {
    fn predict(&self, query: &Document, query_span: Span, target: &Document) -> Result<PredictionRecord> {
        let dists = self.distributions(query, query_span, target)?;
        let preds = top_k_spans(&dists, self.top_k)?;
        PredictionRecord::new(
            make_qid(query, query_span),
            query.doc_id(),
            query_span,
            target.doc_id(),
            preds,
            dists.start()[0] * dists.end()[0],
            ScoreSource::Planted,
            true,
        )
    }
}

fn orient(gold: &Alignment, query: &Document, target: &Document) -> Result<Oriented> {
    let mut answers = HashMap::new();
    let mut covered = vec![false; query.sentence_count()];
    for g in gold.links() {
        if g.src().is_empty() {
            continue;
        }
        let q = query.span_of(SentenceRange::from_ids(g.src())?)?;
        let a = if g.tgt().is_empty() { None } else { Some(target.span_of(SentenceRange::from_ids(g.tgt())?)?) };
        for &s in g.src() {
            covered[s] = true;
        }
        answers.insert(q, a);
    }
    for (s, _) in covered.iter().enumerate().filter(|(_, c)| !**c) {
        answers.insert(query.sentences()[s].token_range, None);
    }
    let mut queries: Vec<Span> = answers.keys().copied().collect();
    queries.sort();
    Ok(Oriented { query_doc: query.doc_id().to_string(), target_doc: target.doc_id().to_string(), answers, queries })
}
