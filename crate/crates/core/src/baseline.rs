//! Dictionary-similarity sentence alignment by monotonic dynamic programming.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::corpus::{Alignment, AlignmentGroup, Document};
use crate::error::{Error, Result};
use crate::predict::{lexical_score, Dictionary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BeadType {
    OneOne,
    OneZero,
    ZeroOne,
    OneTwo,
    TwoOne,
    TwoTwo,
}

impl BeadType {
    /// Tie-break order: 1-1 first, then fewer source sentences, then fewer
    /// target sentences.
    pub const ALL: [BeadType; 6] =
        [BeadType::OneOne, BeadType::ZeroOne, BeadType::OneZero, BeadType::OneTwo, BeadType::TwoOne, BeadType::TwoTwo];

    pub fn shape(self) -> (usize, usize) {
        match self {
            BeadType::OneOne => (1, 1),
            BeadType::OneZero => (1, 0),
            BeadType::ZeroOne => (0, 1),
            BeadType::OneTwo => (1, 2),
            BeadType::TwoOne => (2, 1),
            BeadType::TwoTwo => (2, 2),
        }
    }

    pub fn is_null(self) -> bool {
        matches!(self, BeadType::OneZero | BeadType::ZeroOne)
    }
}

/// Per-bead penalties subtracted from the bead similarity. 1-1 beads carry
/// none. The defaults are not calibrated against any particular corpus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeadPenalties {
    pub one_zero: f64,
    pub zero_one: f64,
    pub one_two: f64,
    pub two_one: f64,
    pub two_two: f64,
}

impl Default for BeadPenalties {
    fn default() -> Self {
        BeadPenalties { one_zero: 0.25, zero_one: 0.25, one_two: 0.05, two_one: 0.05, two_two: 0.10 }
    }
}

impl BeadPenalties {
    pub fn penalty(&self, kind: BeadType) -> f64 {
        match kind {
            BeadType::OneOne => 0.0,
            BeadType::OneZero => self.one_zero,
            BeadType::ZeroOne => self.zero_one,
            BeadType::OneTwo => self.one_two,
            BeadType::TwoOne => self.two_one,
            BeadType::TwoTwo => self.two_two,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for kind in BeadType::ALL {
            let p = self.penalty(kind);
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Config(format!("bead penalty for {kind:?} must be finite and >= 0, got {p}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bead {
    pub src: Range<usize>,
    pub tgt: Range<usize>,
    pub kind: BeadType,
    pub sim: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DpAlignment {
    pub beads: Vec<Bead>,
    /// Objective value: summed similarity minus penalties.
    pub score: f64,
    pub avsim: f64,
    /// `avsim * sim` per bead.
    pub confidences: Vec<f64>,
}

/// Optimal monotonic bead sequence for `n` source and `m` target sentences
/// under an arbitrary bead similarity. Null beads always have similarity 0;
/// `sim` is only called for two-sided beads.
pub fn dp_align_with<F>(n: usize, m: usize, mut sim: F, penalties: &BeadPenalties) -> Result<(Vec<Bead>, f64)>
where
    F: FnMut(Range<usize>, Range<usize>) -> f64,
{
    penalties.validate()?;
    let width = m + 1;
    let mut best = vec![f64::NEG_INFINITY; (n + 1) * width];
    let mut back: Vec<Option<BeadType>> = vec![None; (n + 1) * width];
    best[0] = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                continue;
            }
            for kind in BeadType::ALL {
                let (a, b) = kind.shape();
                if i < a || j < b {
                    continue;
                }
                let prev = best[(i - a) * width + (j - b)];
                if prev == f64::NEG_INFINITY {
                    continue;
                }
                let s = if kind.is_null() { 0.0 } else { sim(i - a..i, j - b..j) };
                let cand = prev + s - penalties.penalty(kind);
                if cand > best[i * width + j] {
                    best[i * width + j] = cand;
                    back[i * width + j] = Some(kind);
                }
            }
        }
    }
    let mut beads = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let kind = back[i * width + j].expect("every cell is reachable through null beads");
        let (a, b) = kind.shape();
        let s = if kind.is_null() { 0.0 } else { sim(i - a..i, j - b..j) };
        beads.push(Bead { src: i - a..i, tgt: j - b..j, kind, sim: s });
        i -= a;
        j -= b;
    }
    beads.reverse();
    Ok((beads, best[n * width + m]))
}

/// Mean similarity over two-sided beads; 0 when there are none.
pub fn avsim(beads: &[Bead]) -> f64 {
    let two_sided: Vec<f64> = beads.iter().filter(|b| !b.kind.is_null()).map(|b| b.sim).collect();
    if two_sided.is_empty() {
        0.0
    } else {
        two_sided.iter().sum::<f64>() / two_sided.len() as f64
    }
}

fn tokens_of<'a>(doc: &'a Document, ids: &Range<usize>) -> &'a [String] {
    let sents = doc.sentences();
    let start = sents[ids.start].token_range.start();
    let end = sents[ids.end - 1].token_range.end();
    &doc.tokens()[start..end]
}

/// Aligns two documents with dictionary similarity computed over the
/// concatenated tokens of each bead side.
pub fn dp_align(src: &Document, tgt: &Document, dict: &Dictionary, penalties: &BeadPenalties) -> Result<DpAlignment> {
    if src.sentence_count() == 0 || tgt.sentence_count() == 0 {
        return Err(Error::Validation(format!(
            "cannot align empty document ({:?}: {} sentences, {:?}: {} sentences)",
            src.doc_id(),
            src.sentence_count(),
            tgt.doc_id(),
            tgt.sentence_count()
        )));
    }
    let (beads, score) = dp_align_with(
        src.sentence_count(),
        tgt.sentence_count(),
        |s, t| lexical_score(tokens_of(src, &s), tokens_of(tgt, &t), dict),
        penalties,
    )?;
    let avsim = avsim(&beads);
    let confidences = beads.iter().map(|b| avsim * b.sim).collect();
    Ok(DpAlignment { beads, score, avsim, confidences })
}

impl DpAlignment {
    /// One group per bead, scored by its confidence.
    pub fn to_alignment(&self, src_doc_id: &str, tgt_doc_id: &str) -> Result<Alignment> {
        let groups = self
            .beads
            .iter()
            .zip(&self.confidences)
            .map(|(b, &conf)| AlignmentGroup::new(b.src.clone().collect(), b.tgt.clone().collect(), Some(conf)))
            .collect::<Result<Vec<_>>>()?;
        Alignment::new(src_doc_id, tgt_doc_id, groups)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_dict(words: &[&str]) -> Dictionary {
        let mut d = Dictionary::new();
        for w in words {
            d.insert(*w, *w);
        }
        d
    }

    fn doc(id: &str, sents: &[&[&str]]) -> Document {
        let v: Vec<Vec<&str>> = sents.iter().map(|s| s.to_vec()).collect();
        Document::from_tokens(id, "xx", false, &v).unwrap()
    }

    #[test]
    fn identical_structure_gives_diagonal() {
        let d = identity_dict(&["a", "b", "c", "d", "e", "f"]);
        let s = doc("s", &[&["a", "b"], &["c", "d"], &["e", "f"]]);
        let t = doc("t", &[&["a", "b"], &["c", "d"], &["e", "f"]]);
        let dp = dp_align(&s, &t, &d, &BeadPenalties::default()).unwrap();
        assert_eq!(dp.beads.len(), 3);
        assert!(dp.beads.iter().all(|b| b.kind == BeadType::OneOne && b.sim == 1.0));
        assert_eq!(dp.avsim, 1.0);
        assert_eq!(dp.confidences, vec![1.0; 3]);
    }

    #[test]
    fn avsim_over_two_sided_beads() {
        let bead = |kind, sim| Bead { src: 0..1, tgt: 0..1, kind, sim };
        assert_eq!(
            avsim(&[bead(BeadType::OneOne, 1.0), bead(BeadType::OneOne, 0.5), bead(BeadType::ZeroOne, 0.0)]),
            0.75
        );
        assert_eq!(avsim(&[bead(BeadType::ZeroOne, 0.0), bead(BeadType::OneZero, 0.0)]), 0.0);
        assert_eq!(avsim(&[bead(BeadType::OneOne, 0.3)]), 0.3);
    }

    #[test]
    fn empty_document_rejected() {
        let d = Dictionary::new();
        let s = doc("s", &[]);
        let t = doc("t", &[&["a"]]);
        assert!(dp_align(&s, &t, &d, &BeadPenalties::default()).is_err());
    }

    #[test]
    fn negative_penalty_rejected() {
        let p = BeadPenalties { two_two: -1.0, ..BeadPenalties::default() };
        assert!(dp_align_with(1, 1, |_, _| 0.0, &p).is_err());
    }

    #[test]
    fn beads_partition_both_sides() {
        let (beads, _) =
            dp_align_with(4, 3, |s, t| if s.start == t.start { 0.9 } else { 0.1 }, &BeadPenalties::default()).unwrap();
        let mut src = 0;
        let mut tgt = 0;
        for b in &beads {
            assert_eq!(b.src.start, src);
            assert_eq!(b.tgt.start, tgt);
            src = b.src.end;
            tgt = b.tgt.end;
        }
        assert_eq!((src, tgt), (4, 3));
    }
}
