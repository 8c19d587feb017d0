//! Bidirectional combination by averaging best-span probabilities per
//! sentence pair and thresholding.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{span_to_sentence_cover, Alignment, AlignmentGroup, Document};
use crate::error::{Error, Result};
use crate::optimize::sort_groups;
use crate::predict::{Direction, PredictionRecord};
use crate::snap::{snap_span, BoundaryRule};

pub const DEFAULT_THETA: f64 = 0.4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingDirection {
    /// The absent direction counts as probability 0.
    #[default]
    Half,
    /// Pairs seen in one direction only are dropped.
    Skip,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymConfig {
    pub theta: f64,
    pub missing: MissingDirection,
}

impl Default for SymConfig {
    fn default() -> Self {
        SymConfig { theta: DEFAULT_THETA, missing: MissingDirection::Half }
    }
}

/// A sentence pair supported by one direction's best span. Ids are always
/// in forward (source, target) orientation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectedSentenceScore {
    pub src_sent_id: usize,
    pub tgt_sent_id: usize,
    pub prob: f64,
    pub direction: Direction,
}

/// Pairs each query sentence with every answered-document sentence lying
/// completely inside the query's best span, at that span's probability.
///
/// Records must already be null-ruled. For [`Direction::Reverse`] the
/// querying document is the target side and ids are swapped on output.
pub fn directed_scores(
    records: &[PredictionRecord],
    querying: &Document,
    answered: &Document,
    direction: Direction,
) -> Result<Vec<DirectedSentenceScore>> {
    // max over records hitting the same pair
    let mut best: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for rec in records {
        if rec.has_null_slot() {
            return Err(Error::Contract(format!("record {} has not been through a null rule", rec.qid())));
        }
        if rec.query_doc_id() != querying.doc_id() || rec.target_doc_id() != answered.doc_id() {
            return Err(Error::Reference(format!(
                "record {} pairs {:?} -> {:?}, expected {:?} -> {:?}",
                rec.qid(),
                rec.query_doc_id(),
                rec.target_doc_id(),
                querying.doc_id(),
                answered.doc_id()
            )));
        }
        let Some(top) = rec.best() else { continue };
        let Some(span) = top.span else { continue };
        answered.check_span(span)?;
        let answers = span_to_sentence_cover(answered, Some(span));
        if answers.is_empty() {
            continue;
        }
        let query = snap_span(querying, Some(rec.query_span()), BoundaryRule::Nearest)?;
        for q in query.start()..query.end() {
            for &a in &answers {
                let key = match direction {
                    Direction::Forward => (q, a),
                    Direction::Reverse => (a, q),
                };
                let slot = best.entry(key).or_insert(top.score);
                *slot = slot.max(top.score);
            }
        }
    }
    Ok(best
        .into_iter()
        .map(|((s, t), prob)| DirectedSentenceScore { src_sent_id: s, tgt_sent_id: t, prob, direction })
        .collect())
}

/// Averages the two directions per sentence pair and keeps pairs whose
/// average strictly exceeds `theta`. Pairs sharing a sentence are merged
/// into one many-to-many group scored by its best pair average, so a merged
/// group may list non-adjacent sentences.
pub fn average_and_threshold(
    fwd: &[DirectedSentenceScore],
    rev: &[DirectedSentenceScore],
    src_doc_id: &str,
    tgt_doc_id: &str,
    config: &SymConfig,
) -> Result<Alignment> {
    if !(0.0..=1.0).contains(&config.theta) {
        return Err(Error::Config(format!("theta must be in [0, 1], got {}", config.theta)));
    }
    let mut table: BTreeMap<(usize, usize), (Option<f64>, Option<f64>)> = BTreeMap::new();
    for d in fwd {
        table.entry((d.src_sent_id, d.tgt_sent_id)).or_default().0 = Some(d.prob);
    }
    for d in rev {
        table.entry((d.src_sent_id, d.tgt_sent_id)).or_default().1 = Some(d.prob);
    }
    let kept: Vec<((usize, usize), f64)> = table
        .into_iter()
        .filter_map(|(pair, probs)| {
            let avg = match (probs, config.missing) {
                ((Some(a), Some(b)), _) => (a + b) / 2.0,
                ((Some(p), None) | (None, Some(p)), MissingDirection::Half) => p / 2.0,
                _ => return None,
            };
            (avg > config.theta).then_some((pair, avg))
        })
        .collect();
    let groups = merge_connected(&kept)?;
    Alignment::new(src_doc_id, tgt_doc_id, groups)
}

/// Connected components of the bipartite link graph, one group each.
fn merge_connected(pairs: &[((usize, usize), f64)]) -> Result<Vec<AlignmentGroup>> {
    // Union-find over link indices keyed by shared source/target sentences.
    let mut parent: Vec<usize> = (0..pairs.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut by_src: BTreeMap<usize, usize> = BTreeMap::new();
    let mut by_tgt: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, ((s, t), _)) in pairs.iter().enumerate() {
        for owner in [by_src.get(s).copied(), by_tgt.get(t).copied()].into_iter().flatten() {
            let (a, b) = (find(&mut parent, owner), find(&mut parent, i));
            parent[a.max(b)] = a.min(b);
        }
        by_src.entry(*s).or_insert(i);
        by_tgt.entry(*t).or_insert(i);
    }
    let mut comps: BTreeMap<usize, (BTreeSet<usize>, BTreeSet<usize>, f64)> = BTreeMap::new();
    for (i, ((s, t), avg)) in pairs.iter().enumerate() {
        let root = find(&mut parent, i);
        let entry = comps.entry(root).or_insert_with(|| (BTreeSet::new(), BTreeSet::new(), 0.0));
        entry.0.insert(*s);
        entry.1.insert(*t);
        entry.2 = entry.2.max(*avg);
    }
    let mut groups = comps
        .into_values()
        .map(|(s, t, score)| AlignmentGroup::new(s.into_iter().collect(), t.into_iter().collect(), Some(score)))
        .collect::<Result<Vec<_>>>()?;
    sort_groups(&mut groups);
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Span;
    use crate::predict::{ScoreSource, SpanPrediction};

    fn score(s: usize, t: usize, prob: f64, direction: Direction) -> DirectedSentenceScore {
        DirectedSentenceScore { src_sent_id: s, tgt_sent_id: t, prob, direction }
    }

    fn run(fwd: &[DirectedSentenceScore], rev: &[DirectedSentenceScore], cfg: SymConfig) -> Alignment {
        average_and_threshold(fwd, rev, "s", "t", &cfg).unwrap()
    }

    #[test]
    fn both_directions_averaged() {
        let a =
            run(&[score(0, 0, 0.9, Direction::Forward)], &[score(0, 0, 0.7, Direction::Reverse)], SymConfig::default());
        assert_eq!(a.links().len(), 1);
        assert!((a.links()[0].score().unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn one_sided_half_rejected() {
        let a = run(&[score(0, 0, 0.5, Direction::Forward)], &[], SymConfig::default());
        assert!(a.links().is_empty());
        let a = run(
            &[score(0, 0, 0.9, Direction::Forward)],
            &[],
            SymConfig { missing: MissingDirection::Skip, ..SymConfig::default() },
        );
        assert!(a.links().is_empty());
    }

    #[test]
    fn theta_is_strict() {
        let a =
            run(&[score(0, 0, 0.4, Direction::Forward)], &[score(0, 0, 0.4, Direction::Reverse)], SymConfig::default());
        assert!(a.links().is_empty());
    }

    #[test]
    fn shared_sentences_merge() {
        let fwd = [
            score(0, 0, 1.0, Direction::Forward),
            score(1, 0, 1.0, Direction::Forward),
            score(2, 2, 1.0, Direction::Forward),
        ];
        let a = run(&fwd, &fwd, SymConfig::default());
        assert_eq!(a.links().len(), 2);
        assert_eq!(a.links()[0].src(), [0, 1]);
        assert_eq!(a.links()[0].tgt(), [0]);
    }

    fn doc(id: &str, lens: &[usize]) -> Document {
        let sents: Vec<Vec<String>> =
            lens.iter().enumerate().map(|(i, &n)| (0..n).map(|j| format!("{id}{i}_{j}")).collect()).collect();
        Document::from_tokens(id, "xx", false, &sents).unwrap()
    }

    fn rec(q: &Document, t: &Document, query: Span, best: Option<Span>, prob: f64) -> PredictionRecord {
        PredictionRecord::new(
            "q",
            q.doc_id(),
            query,
            t.doc_id(),
            vec![SpanPrediction { span: best, score: prob }],
            0.0,
            ScoreSource::File,
            false,
        )
        .unwrap()
    }

    #[test]
    fn containment_rule() {
        let s = doc("s", &[2]);
        let t = doc("t", &[2, 2, 2, 2, 2, 2]);
        let q = s.sentences()[0].token_range;
        let exact = directed_scores(&[rec(&s, &t, q, Some(Span::new(6, 8).unwrap()), 0.9)], &s, &t, Direction::Forward)
            .unwrap();
        assert_eq!(exact, vec![score(0, 3, 0.9, Direction::Forward)]);

        let two = directed_scores(&[rec(&s, &t, q, Some(Span::new(4, 8).unwrap()), 0.6)], &s, &t, Direction::Forward)
            .unwrap();
        assert_eq!(two.len(), 2);
        assert!(two.iter().all(|d| d.prob == 0.6));

        let inside =
            directed_scores(&[rec(&s, &t, q, Some(Span::new(10, 11).unwrap()), 0.9)], &s, &t, Direction::Forward)
                .unwrap();
        assert!(inside.is_empty());

        let null = directed_scores(&[rec(&s, &t, q, None, 0.9)], &s, &t, Direction::Forward).unwrap();
        assert!(null.is_empty());
    }

    #[test]
    fn reverse_scores_are_reoriented() {
        let s = doc("s", &[2, 2]);
        let t = doc("t", &[3]);
        let q = t.sentences()[0].token_range;
        let out = directed_scores(&[rec(&t, &s, q, Some(Span::new(2, 4).unwrap()), 0.7)], &t, &s, Direction::Reverse)
            .unwrap();
        assert_eq!(out, vec![score(1, 0, 0.7, Direction::Reverse)]);
    }

    #[test]
    fn unruled_records_rejected() {
        let s = doc("s", &[2]);
        let t = doc("t", &[2]);
        let r = PredictionRecord::new("q", "s", Span::new(0, 2).unwrap(), "t", vec![], 0.0, ScoreSource::File, true)
            .unwrap();
        assert!(matches!(directed_scores(&[r], &s, &t, Direction::Forward), Err(Error::Contract(_))));
    }
}
