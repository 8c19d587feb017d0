//! SQuAD-layout span-prediction datasets built from parallel text.
//!
//! Each record uses a source sentence as the question and hides its
//! translation among `U` negative target sentences: `u` in front and
//! `U - u` behind, with `u` uniform on `0..=U`. Every record draws from its
//! own random stream derived from `(seed, pair index)`, so output does not
//! depend on processing order.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{detokenize, Alignment, Document};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub text: String,
    pub tokens: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelPair {
    /// Index of the source document; contextual sampling stays inside it.
    pub doc: usize,
    pub src: Segment,
    pub tgt: Segment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub name: String,
    pub src_lang: String,
    pub tgt_lang: String,
    pub src_no_space: bool,
    pub tgt_no_space: bool,
    pairs: Vec<ParallelPair>,
}

fn segment(doc: &Document, ids: &[usize]) -> Segment {
    let tokens: Vec<String> = ids.iter().flat_map(|&i| doc.sentences()[i].tokens.iter().cloned()).collect();
    let text = detokenize(&ids.iter().map(|&i| doc.sentences()[i].text.as_str()).collect::<Vec<_>>(), doc.no_space());
    Segment { text, tokens }
}

impl ParallelCorpus {
    pub fn new(
        name: impl Into<String>,
        (src_lang, src_no_space): (String, bool),
        (tgt_lang, tgt_no_space): (String, bool),
        pairs: Vec<ParallelPair>,
    ) -> Result<Self> {
        if let Some(i) = pairs.iter().position(|p| p.src.tokens.is_empty() || p.tgt.tokens.is_empty()) {
            return Err(Error::Validation(format!("parallel pair {i} has an empty side")));
        }
        if pairs.windows(2).any(|w| w[1].doc < w[0].doc) {
            return Err(Error::Validation("parallel pairs must be ordered by document".into()));
        }
        Ok(ParallelCorpus { name: name.into(), src_lang, tgt_lang, src_no_space, tgt_no_space, pairs })
    }

    /// Sentence `i` of each source document translates sentence `i` of the
    /// target document on the same line.
    pub fn from_parallel_documents(name: &str, src: &[Document], tgt: &[Document]) -> Result<Self> {
        if src.len() != tgt.len() {
            return Err(Error::Validation(format!("{} source documents vs {} target documents", src.len(), tgt.len())));
        }
        let mut pairs = Vec::new();
        for (d, (s, t)) in src.iter().zip(tgt).enumerate() {
            if s.sentence_count() != t.sentence_count() {
                return Err(Error::Validation(format!(
                    "documents {:?} and {:?} differ in sentence count ({} vs {})",
                    s.doc_id(),
                    t.doc_id(),
                    s.sentence_count(),
                    t.sentence_count()
                )));
            }
            for i in 0..s.sentence_count() {
                pairs.push(ParallelPair { doc: d, src: segment(s, &[i]), tgt: segment(t, &[i]) });
            }
        }
        let (s0, t0) = lang_info(src, tgt);
        ParallelCorpus::new(name, s0, t0, pairs)
    }

    /// One pair per two-sided gold group; multi-sentence sides are joined.
    pub fn from_alignments(name: &str, src: &[Document], tgt: &[Document], gold: &[Alignment]) -> Result<Self> {
        let src_by_id: HashMap<&str, &Document> = src.iter().map(|d| (d.doc_id(), d)).collect();
        let tgt_by_id: HashMap<&str, &Document> = tgt.iter().map(|d| (d.doc_id(), d)).collect();
        let mut pairs = Vec::new();
        for (d, a) in gold.iter().enumerate() {
            let s = src_by_id
                .get(a.src_doc_id())
                .ok_or_else(|| Error::Reference(format!("unknown source doc_id {:?}", a.src_doc_id())))?;
            let t = tgt_by_id
                .get(a.tgt_doc_id())
                .ok_or_else(|| Error::Reference(format!("unknown target doc_id {:?}", a.tgt_doc_id())))?;
            a.check_against(s, t, false)?;
            let mut groups: Vec<_> = a.links().iter().filter(|g| !g.is_null()).collect();
            groups.sort_by_key(|g| g.src()[0]);
            for g in groups {
                pairs.push(ParallelPair { doc: d, src: segment(s, g.src()), tgt: segment(t, g.tgt()) });
            }
        }
        let (s0, t0) = lang_info(src, tgt);
        ParallelCorpus::new(name, s0, t0, pairs)
    }

    pub fn pairs(&self) -> &[ParallelPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Query and answer sides swapped.
    pub fn reversed(&self) -> Self {
        ParallelCorpus {
            name: self.name.clone(),
            src_lang: self.tgt_lang.clone(),
            tgt_lang: self.src_lang.clone(),
            src_no_space: self.tgt_no_space,
            tgt_no_space: self.src_no_space,
            pairs: self
                .pairs
                .iter()
                .map(|p| ParallelPair { doc: p.doc, src: p.tgt.clone(), tgt: p.src.clone() })
                .collect(),
        }
    }

    /// `src-tgt` language label used in question ids.
    pub fn direction_label(&self) -> String {
        format!("{}-{}", self.src_lang, self.tgt_lang)
    }
}

fn lang_info(src: &[Document], tgt: &[Document]) -> ((String, bool), (String, bool)) {
    let info = |d: Option<&Document>| d.map_or((String::from("und"), false), |d| (d.lang().to_string(), d.no_space()));
    (info(src.first()), info(tgt.first()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Negatives drawn uniformly from other pairs' target sides.
    #[default]
    Random,
    /// Negatives are the answer's neighbours in its own document.
    Contextual,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SquadVersion {
    #[serde(rename = "v1.1")]
    V1_1,
    #[default]
    #[serde(rename = "v2.0")]
    V2_0,
}

impl SquadVersion {
    pub fn as_str(self) -> &'static str {
        match self {
            SquadVersion::V1_1 => "v1.1",
            SquadVersion::V2_0 => "v2.0",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullSampling {
    /// Source sentences without any alignment in their document pair.
    #[default]
    Unaligned,
    /// Source sentences taken from other document pairs.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthConfig {
    pub num_negatives: usize,
    pub mode: SamplingMode,
    pub seed: u64,
    pub max_query_tokens: usize,
    pub max_context_tokens: usize,
    pub version: SquadVersion,
    /// Upper bound on unanswerable questions per document pair, as a
    /// fraction of its source sentences.
    pub null_cap: f64,
    pub null_sampling: NullSampling,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            num_negatives: 9,
            mode: SamplingMode::Random,
            seed: 0,
            max_query_tokens: 100,
            max_context_tokens: 1000,
            version: SquadVersion::V2_0,
            null_cap: 0.10,
            null_sampling: NullSampling::Unaligned,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if self.max_query_tokens == 0 || self.max_context_tokens == 0 {
            return Err(Error::Config("token limits must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.null_cap) {
            return Err(Error::Config(format!("null cap must be in [0, 1], got {}", self.null_cap)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquadRecord {
    pub qid: String,
    pub question: String,
    pub context: String,
    pub answer_text: String,
    /// Character offset into `context`; -1 for unanswerable records.
    pub answer_start: i64,
    pub is_impossible: bool,
}

fn record_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn build_record(
    qid: String,
    question: &Segment,
    before: &[&Segment],
    answer: &Segment,
    after: &[&Segment],
    no_space: bool,
) -> SquadRecord {
    let sep = if no_space { "" } else { " " };
    let mut context = String::new();
    let mut chars = 0usize;
    let mut push = |context: &mut String, s: &str| {
        if !context.is_empty() {
            context.push_str(sep);
            chars += sep.chars().count();
        }
        let at = chars;
        context.push_str(s);
        chars += s.chars().count();
        at
    };
    for s in before {
        push(&mut context, &s.text);
    }
    let answer_start = push(&mut context, &answer.text);
    for s in after {
        push(&mut context, &s.text);
    }
    SquadRecord {
        qid,
        question: question.text.clone(),
        context,
        answer_text: answer.text.clone(),
        answer_start: answer_start as i64,
        is_impossible: false,
    }
}

/// One answerable record per surviving pair.
///
/// Pairs whose question or answer exceeds `max_query_tokens`, or whose
/// context exceeds `max_context_tokens`, are dropped. In contextual mode a
/// short neighbourhood on one side is made up from the other, and pairs in
/// documents with fewer than `U + 1` sentences are dropped.
pub fn synthesize(corpus: &ParallelCorpus, config: &SynthConfig) -> Result<Vec<SquadRecord>> {
    config.validate()?;
    let k = corpus.len();
    let u_max = config.num_negatives;
    if k == 0 {
        return Err(Error::Config("cannot synthesize from an empty corpus".into()));
    }
    if u_max >= k {
        return Err(Error::Config(format!("{u_max} negatives need more than {u_max} pairs, corpus has {k}")));
    }
    // document extents for contextual sampling
    let mut doc_range: HashMap<usize, (usize, usize)> = HashMap::new();
    for (i, p) in corpus.pairs.iter().enumerate() {
        doc_range.entry(p.doc).and_modify(|r| r.1 = i + 1).or_insert((i, i + 1));
    }
    let direction = corpus.direction_label();
    let mut out = Vec::new();
    for (idx, pair) in corpus.pairs.iter().enumerate() {
        if pair.src.tokens.len() > config.max_query_tokens || pair.tgt.tokens.len() > config.max_query_tokens {
            continue;
        }
        let mut rng = record_rng(config.seed, idx as u64);
        let u = rng.random_range(0..=u_max);
        let (before, after): (Vec<&Segment>, Vec<&Segment>) = match config.mode {
            SamplingMode::Random => {
                let picks = sample(&mut rng, k - 1, u_max).into_vec();
                let negs: Vec<&Segment> =
                    picks.into_iter().map(|j| if j >= idx { j + 1 } else { j }).map(|j| &corpus.pairs[j].tgt).collect();
                (negs[..u].to_vec(), negs[u..].to_vec())
            }
            SamplingMode::Contextual => {
                let (lo, hi) = doc_range[&pair.doc];
                if hi - lo < u_max + 1 {
                    continue;
                }
                let before_avail = idx - lo;
                let after_avail = hi - 1 - idx;
                let mut before = u.min(before_avail);
                let mut after = u_max - before;
                if after > after_avail {
                    after = after_avail;
                    before = u_max - after;
                }
                (
                    corpus.pairs[idx - before..idx].iter().map(|p| &p.tgt).collect(),
                    corpus.pairs[idx + 1..=idx + after].iter().map(|p| &p.tgt).collect(),
                )
            }
        };
        let context_tokens: usize =
            before.iter().chain(after.iter()).map(|s| s.tokens.len()).sum::<usize>() + pair.tgt.tokens.len();
        if context_tokens > config.max_context_tokens {
            continue;
        }
        let qid = format!("{}:{}:{}", corpus.name, idx, direction);
        out.push(build_record(qid, &pair.src, &before, &pair.tgt, &after, corpus.tgt_no_space));
    }
    Ok(out)
}

/// A comparable document pair with its gold sentence alignment.
#[derive(Clone, Copy, Debug)]
pub struct AlignedDocPair<'a> {
    pub src: &'a Document,
    pub tgt: &'a Document,
    pub gold: &'a Alignment,
}

/// Unanswerable records whose context is a whole target document.
///
/// At most `floor(null_cap * source sentences)` questions per document
/// pair, drawn either from that pair's unaligned source sentences or from
/// source sentences of other pairs.
pub fn synthesize_null_examples(
    corpus_name: &str,
    docs: &[AlignedDocPair<'_>],
    config: &SynthConfig,
) -> Result<Vec<SquadRecord>> {
    config.validate()?;
    if config.version == SquadVersion::V1_1 {
        return Err(Error::Config("SQuAD v1.1 cannot express unanswerable questions".into()));
    }
    let mut out = Vec::new();
    for (d, pair) in docs.iter().enumerate() {
        pair.gold.check_against(pair.src, pair.tgt, false)?;
        let n = pair.src.sentence_count();
        let cap = (config.null_cap * n as f64 + 1e-9).floor() as usize;
        if cap == 0 {
            continue;
        }
        // candidate (doc index, sentence index) questions
        let pool: Vec<(usize, usize)> = match config.null_sampling {
            NullSampling::Unaligned => {
                let mut aligned = vec![false; n];
                for g in pair.gold.links().iter().filter(|g| !g.is_null()) {
                    for &s in g.src() {
                        aligned[s] = true;
                    }
                }
                (0..n).filter(|&s| !aligned[s]).map(|s| (d, s)).collect()
            }
            NullSampling::Random => docs
                .iter()
                .enumerate()
                .filter(|&(o, _)| o != d)
                .flat_map(|(o, p)| (0..p.src.sentence_count()).map(move |s| (o, s)))
                .collect(),
        };
        let mut rng = record_rng(config.seed, (1u64 << 63) | d as u64);
        let mut picks: Vec<(usize, usize)> = if pool.len() <= cap {
            pool
        } else {
            sample(&mut rng, pool.len(), cap).into_iter().map(|i| pool[i]).collect()
        };
        picks.sort_unstable();

        let tgt = pair.tgt;
        let context_tokens = tgt.token_count();
        if context_tokens > config.max_context_tokens {
            continue;
        }
        let context = detokenize(&tgt.sentences().iter().map(|s| s.text.as_str()).collect::<Vec<_>>(), tgt.no_space());
        let direction = format!("{}-{}", pair.src.lang(), tgt.lang());
        for (o, s) in picks {
            let sentence = &docs[o].src.sentences()[s];
            if sentence.tokens.len() > config.max_query_tokens {
                continue;
            }
            out.push(SquadRecord {
                qid: format!("{corpus_name}:null-{d}-{o}-{s}:{direction}"),
                question: sentence.text.clone(),
                context: context.clone(),
                answer_text: String::new(),
                answer_start: -1,
                is_impossible: true,
            });
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct SquadAnswer<'a> {
    text: &'a str,
    answer_start: i64,
}

#[derive(Serialize)]
struct SquadQa<'a> {
    id: &'a str,
    question: &'a str,
    answers: Vec<SquadAnswer<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    is_impossible: Option<bool>,
}

#[derive(Serialize)]
struct SquadParagraph<'a> {
    context: &'a str,
    qas: Vec<SquadQa<'a>>,
}

#[derive(Serialize)]
struct SquadArticle<'a> {
    title: &'a str,
    paragraphs: Vec<SquadParagraph<'a>>,
}

#[derive(Serialize)]
struct SquadDataset<'a> {
    version: &'a str,
    data: Vec<SquadArticle<'a>>,
}

/// Writes the standard SQuAD dataset layout. Consecutive records sharing a
/// context become one paragraph.
pub fn write_squad<W: Write>(w: W, title: &str, version: SquadVersion, records: &[SquadRecord]) -> Result<()> {
    if version == SquadVersion::V1_1 {
        if let Some(r) = records.iter().find(|r| r.is_impossible) {
            return Err(Error::Config(format!("record {} is unanswerable; v1.1 cannot express it", r.qid)));
        }
    }
    let mut paragraphs: Vec<SquadParagraph> = Vec::new();
    for r in records {
        let qa = SquadQa {
            id: &r.qid,
            question: &r.question,
            answers: if r.is_impossible {
                Vec::new()
            } else {
                vec![SquadAnswer { text: &r.answer_text, answer_start: r.answer_start }]
            },
            is_impossible: (version == SquadVersion::V2_0).then_some(r.is_impossible),
        };
        match paragraphs.last_mut() {
            Some(p) if p.context == r.context => p.qas.push(qa),
            _ => paragraphs.push(SquadParagraph { context: &r.context, qas: vec![qa] }),
        }
    }
    let dataset = SquadDataset { version: version.as_str(), data: vec![SquadArticle { title, paragraphs }] };
    serde_json::to_writer(w, &dataset).map_err(|e| Error::io("<squad output>", e.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::AlignmentGroup;

    fn corpus(k: usize, docs: usize) -> ParallelCorpus {
        let per_doc = k.div_ceil(docs);
        let pairs = (0..k)
            .map(|i| ParallelPair {
                doc: i / per_doc,
                src: Segment { text: format!("q{i} x"), tokens: vec![format!("q{i}"), "x".into()] },
                tgt: Segment { text: format!("a{i} y"), tokens: vec![format!("a{i}"), "y".into()] },
            })
            .collect();
        ParallelCorpus::new("c", ("en".into(), false), ("fr".into(), false), pairs).unwrap()
    }

    fn cfg(u: usize) -> SynthConfig {
        SynthConfig { num_negatives: u, seed: 7, ..SynthConfig::default() }
    }

    #[test]
    fn zero_negatives_context_is_answer() {
        let recs = synthesize(&corpus(5, 1), &cfg(0)).unwrap();
        assert_eq!(recs.len(), 5);
        for r in &recs {
            assert_eq!(r.context, r.answer_text);
            assert_eq!(r.answer_start, 0);
        }
        assert_eq!(recs[3].qid, "c:3:en-fr");
    }

    #[test]
    fn nine_negatives_give_ten_sentences() {
        let recs = synthesize(&corpus(40, 1), &cfg(9)).unwrap();
        for r in &recs {
            assert_eq!(r.context.split(' ').filter(|t| t.starts_with('a')).count(), 10);
            let start = r.answer_start as usize;
            let got: String = r.context.chars().skip(start).take(r.answer_text.chars().count()).collect();
            assert_eq!(got, r.answer_text);
        }
    }

    #[test]
    fn too_many_negatives_rejected() {
        assert!(matches!(synthesize(&corpus(5, 1), &cfg(5)), Err(Error::Config(_))));
        let empty = ParallelCorpus::new("c", ("en".into(), false), ("fr".into(), false), vec![]).unwrap();
        assert!(matches!(synthesize(&empty, &cfg(0)), Err(Error::Config(_))));
    }

    #[test]
    fn contextual_uses_neighbours_and_drops_short_docs() {
        let c = corpus(12, 2); // two documents of 6 pairs
        let mut config = cfg(3);
        config.mode = SamplingMode::Contextual;
        let recs = synthesize(&c, &config).unwrap();
        assert_eq!(recs.len(), 12);
        // first pair of the second document: only following neighbours exist
        let r = recs.iter().find(|r| r.qid == "c:6:en-fr").unwrap();
        assert_eq!(r.context, "a6 y a7 y a8 y a9 y");
        config.num_negatives = 6;
        assert!(synthesize(&c, &config).unwrap().is_empty());
    }

    #[test]
    fn length_filters() {
        let mut config = cfg(2);
        config.max_context_tokens = 5;
        assert!(synthesize(&corpus(10, 1), &config).unwrap().is_empty());
        config.max_context_tokens = 6;
        assert_eq!(synthesize(&corpus(10, 1), &config).unwrap().len(), 10);
        config.max_query_tokens = 1;
        assert!(synthesize(&corpus(10, 1), &config).unwrap().is_empty());
    }

    #[test]
    fn no_space_join_offsets_in_chars() {
        let pairs = (0..3)
            .map(|i| ParallelPair {
                doc: 0,
                src: Segment { text: format!("s{i}"), tokens: vec![format!("s{i}")] },
                tgt: Segment { text: format!("文{i}です"), tokens: vec![format!("文{i}"), "です".into()] },
            })
            .collect();
        let c = ParallelCorpus::new("ja", ("en".into(), false), ("ja".into(), true), pairs).unwrap();
        for r in synthesize(&c, &cfg(2)).unwrap() {
            assert!(!r.context.contains(' '));
            let got: String =
                r.context.chars().skip(r.answer_start as usize).take(r.answer_text.chars().count()).collect();
            assert_eq!(got, r.answer_text);
        }
    }

    fn doc(id: &str, n: usize) -> Document {
        let sents: Vec<Vec<String>> = (0..n).map(|i| vec![format!("{id}{i}")]).collect();
        Document::from_tokens(id, "en", false, &sents).unwrap()
    }

    #[test]
    fn null_examples_from_unaligned_sentences() {
        let (s, t) = (doc("s", 10), doc("t", 9));
        let groups = (0..9).map(|i| AlignmentGroup::new(vec![i], vec![i], None).unwrap()).collect();
        let gold = Alignment::new("s", "t", groups).unwrap();
        let pair = AlignedDocPair { src: &s, tgt: &t, gold: &gold };
        let recs = synthesize_null_examples("c", &[pair], &cfg(0)).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].question, "s9");
        assert!(recs[0].is_impossible);
        assert_eq!(recs[0].answer_start, -1);
        assert_eq!(recs[0].answer_text, "");

        let mut config = cfg(0);
        config.null_cap = 0.0;
        assert!(synthesize_null_examples("c", &[pair], &config).unwrap().is_empty());
        config.null_cap = 0.1;
        config.version = SquadVersion::V1_1;
        assert!(matches!(synthesize_null_examples("c", &[pair], &config), Err(Error::Config(_))));
    }

    #[test]
    fn fully_aligned_doc_has_no_null_examples() {
        let (s, t) = (doc("s", 10), doc("t", 10));
        let groups = (0..10).map(|i| AlignmentGroup::new(vec![i], vec![i], None).unwrap()).collect();
        let gold = Alignment::new("s", "t", groups).unwrap();
        let pair = AlignedDocPair { src: &s, tgt: &t, gold: &gold };
        assert!(synthesize_null_examples("c", &[pair], &cfg(0)).unwrap().is_empty());
    }

    #[test]
    fn squad_layout() {
        let recs = synthesize(&corpus(3, 1), &cfg(1)).unwrap();
        let mut buf = Vec::new();
        write_squad(&mut buf, "c", SquadVersion::V2_0, &recs).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["version"], "v2.0");
        let qa = &v["data"][0]["paragraphs"][0]["qas"][0];
        assert_eq!(qa["is_impossible"], false);
        assert_eq!(qa["answers"][0]["text"], recs[0].answer_text);

        let mut buf = Vec::new();
        write_squad(&mut buf, "c", SquadVersion::V1_1, &recs).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert!(v["data"][0]["paragraphs"][0]["qas"][0].get("is_impossible").is_none());
    }

    #[test]
    fn corpus_from_documents() {
        let (s, t) = (doc("s", 3), doc("t", 3));
        let c =
            ParallelCorpus::from_parallel_documents("c", std::slice::from_ref(&s), std::slice::from_ref(&t)).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.reversed().pairs()[0].src.text, "t0");
        let short = doc("u", 2);
        assert!(ParallelCorpus::from_parallel_documents("c", std::slice::from_ref(&s), &[short]).is_err());

        let gold = Alignment::new(
            "s",
            "t",
            vec![
                AlignmentGroup::new(vec![0, 1], vec![0], None).unwrap(),
                AlignmentGroup::new(vec![2], vec![], None).unwrap(),
            ],
        )
        .unwrap();
        let c = ParallelCorpus::from_alignments("c", &[s], &[t], &[gold]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.pairs()[0].src.text, "s0 s1");
    }
}
