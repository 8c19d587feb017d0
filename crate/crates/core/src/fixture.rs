//! Seeded synthetic bitext with a known sentence alignment.
//!
//! Target documents reorder the aligned groups, groups span one or two
//! sentences on each side, and both sides carry unaligned sentences.
//! Tokens are unique per sentence, and the bundled dictionary pairs the
//! tokens of each aligned group, so lexical scoring can see the gold links.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Alignment, AlignmentGroup, Document};
use crate::error::{Error, Result};
use crate::optimize::sort_groups;
use crate::predict::Dictionary;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BitextSpec {
    pub docs: usize,
    /// Inclusive range of two-sided groups per document.
    pub groups: (usize, usize),
    /// Inclusive range of tokens per sentence.
    pub sentence_len: (usize, usize),
    /// Minimum share of null-aligned sentences per document, both sides pooled.
    pub null_share: f64,
    pub seed: u64,
}

impl Default for BitextSpec {
    fn default() -> Self {
        BitextSpec { docs: 30, groups: (4, 8), sentence_len: (3, 8), null_share: 0.12, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct PlantedBitext {
    pub src: Vec<Document>,
    pub tgt: Vec<Document>,
    pub gold: Vec<Alignment>,
    pub dictionary: Dictionary,
}

impl PlantedBitext {
    /// Share of sentences, over both sides of every document, that belong to
    /// a null group.
    pub fn null_share(&self) -> f64 {
        let total: usize = self.src.iter().chain(&self.tgt).map(Document::sentence_count).sum();
        let null: usize = self
            .gold
            .iter()
            .flat_map(|a| a.links())
            .filter(|g| g.is_null())
            .map(|g| g.src().len() + g.tgt().len())
            .sum();
        null as f64 / total as f64
    }
}

enum Slot {
    Group(usize),
    Null,
}

/// Places `nulls` null markers at random positions among `items`.
fn interleave(rng: &mut ChaCha8Rng, items: Vec<usize>, nulls: usize) -> Vec<Slot> {
    let mut out: Vec<Slot> = items.into_iter().map(Slot::Group).collect();
    for _ in 0..nulls {
        let at = rng.random_range(0..=out.len());
        out.insert(at, Slot::Null);
    }
    out
}

/// Lays out slots into consecutive sentence ids. Returns the ids of each
/// group and of each null sentence.
fn layout(slots: &[Slot], sizes: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>, usize) {
    let mut ids = vec![Vec::new(); sizes.len()];
    let mut nulls = Vec::new();
    let mut next = 0;
    for slot in slots {
        match *slot {
            Slot::Group(g) => {
                ids[g] = (next..next + sizes[g]).collect();
                next += sizes[g];
            }
            Slot::Null => {
                nulls.push(next);
                next += 1;
            }
        }
    }
    (ids, nulls, next)
}

pub fn planted_bitext(spec: &BitextSpec) -> Result<PlantedBitext> {
    let (g_lo, g_hi) = spec.groups;
    let (l_lo, l_hi) = spec.sentence_len;
    if spec.docs == 0 || g_lo == 0 || g_lo > g_hi || l_lo == 0 || l_lo > l_hi {
        return Err(Error::Config(format!("invalid bitext spec {spec:?}")));
    }
    if !(0.0..1.0).contains(&spec.null_share) {
        return Err(Error::Config(format!("null share must be in [0, 1), got {}", spec.null_share)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = PlantedBitext { src: Vec::new(), tgt: Vec::new(), gold: Vec::new(), dictionary: Dictionary::new() };
    for d in 0..spec.docs {
        let n_groups = rng.random_range(g_lo..=g_hi);
        let src_sizes: Vec<usize> = (0..n_groups).map(|_| rng.random_range(1..=2)).collect();
        let tgt_sizes: Vec<usize> = (0..n_groups).map(|_| rng.random_range(1..=2)).collect();
        let aligned: usize = src_sizes.iter().chain(&tgt_sizes).sum();
        let min_nulls = ((spec.null_share * aligned as f64) / (1.0 - spec.null_share)).ceil() as usize;
        let nulls = min_nulls.max(1) + rng.random_range(0..=1);
        let src_nulls = rng.random_range(0..=nulls);

        let src_slots = interleave(&mut rng, (0..n_groups).collect(), src_nulls);
        let mut order: Vec<usize> = (0..n_groups).collect();
        order.shuffle(&mut rng);
        if n_groups > 1 && order.windows(2).all(|w| w[0] < w[1]) {
            order.swap(0, 1);
        }
        let tgt_slots = interleave(&mut rng, order, nulls - src_nulls);
        let (src_ids, src_null_ids, n_src) = layout(&src_slots, &src_sizes);
        let (tgt_ids, tgt_null_ids, n_tgt) = layout(&tgt_slots, &tgt_sizes);

        let mut sentence = |side: char, i: usize| -> Vec<String> {
            let len = rng.random_range(l_lo..=l_hi);
            (0..len).map(|j| format!("{side}{d}_{i}_{j}")).collect()
        };
        let src_sents: Vec<Vec<String>> = (0..n_src).map(|i| sentence('s', i)).collect();
        let tgt_sents: Vec<Vec<String>> = (0..n_tgt).map(|i| sentence('t', i)).collect();

        for g in 0..n_groups {
            let s: Vec<&String> = src_ids[g].iter().flat_map(|&i| &src_sents[i]).collect();
            let t: Vec<&String> = tgt_ids[g].iter().flat_map(|&i| &tgt_sents[i]).collect();
            for (a, b) in s.iter().zip(&t) {
                out.dictionary.insert(a.as_str(), b.as_str());
            }
        }

        let mut groups = Vec::new();
        for g in 0..n_groups {
            groups.push(AlignmentGroup::new(src_ids[g].clone(), tgt_ids[g].clone(), None)?);
        }
        for &s in &src_null_ids {
            groups.push(AlignmentGroup::new(vec![s], vec![], None)?);
        }
        for &t in &tgt_null_ids {
            groups.push(AlignmentGroup::new(vec![], vec![t], None)?);
        }
        sort_groups(&mut groups);

        let (src_id, tgt_id) = (format!("src{d:03}"), format!("tgt{d:03}"));
        out.src.push(Document::from_tokens(&src_id, "xx", false, &src_sents)?);
        out.tgt.push(Document::from_tokens(&tgt_id, "yy", false, &tgt_sents)?);
        out.gold.push(Alignment::new(src_id, tgt_id, groups)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bitext_shape() {
        let b = planted_bitext(&BitextSpec::default()).unwrap();
        assert_eq!(b.src.len(), 30);
        assert!(b.null_share() >= 0.10);
        let mut many = false;
        let mut crossing = false;
        for ((s, t), g) in b.src.iter().zip(&b.tgt).zip(&b.gold) {
            g.check_against(s, t, true).unwrap();
            let two: Vec<_> = g.links().iter().filter(|g| !g.is_null()).collect();
            many |= two.iter().any(|g| g.src().len() > 1 || g.tgt().len() > 1);
            crossing |= two.windows(2).any(|w| w[1].tgt()[0] < w[0].tgt()[0]);
            let covered: usize = g.links().iter().map(|g| g.src().len()).sum();
            assert_eq!(covered, s.sentence_count());
        }
        assert!(many && crossing);
    }

    #[test]
    fn seeded() {
        let a = planted_bitext(&BitextSpec { seed: 3, ..BitextSpec::default() }).unwrap();
        let b = planted_bitext(&BitextSpec { seed: 3, ..BitextSpec::default() }).unwrap();
        assert_eq!(a.gold, b.gold);
        assert_eq!(a.src, b.src);
    }
}
