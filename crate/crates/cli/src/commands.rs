use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use spanalign::align::{align_ilp, align_sym, IlpConfig, Solver};
use spanalign::baseline::{dp_align, BeadPenalties};
use spanalign::corpus::{load_alignments, load_corpus, write_alignments, write_corpus, Alignment, Document};
use spanalign::eval::{pair_eval_corpus, report, span_eval, span_eval_records, EvalEntry, ReportFormat, SpanPair};
use spanalign::fixture::{planted_bitext, BitextSpec};
use spanalign::optimize::{CPrime, CombineConfig, OneSidedPolicy, SolveReport, DEFAULT_EXACT_CAP};
use spanalign::predict::io::DEFAULT_VECTOR_TOP_K;
use spanalign::predict::{
    apply_null_rule, load_predictions, score_queries, sentence_queries, write_predictions, Dictionary, Direction,
    LexicalScorer, NullMode, NullRule, PlantedScorer, PredictionFile, PredictionHeader, PredictionRecord,
};
use spanalign::snap::{SentenceUnitCandidate, SnapConfig, DEFAULT_MIN_SCORE};
use spanalign::symmetrize::{SymConfig, DEFAULT_THETA};
use spanalign::synth::{
    synthesize, synthesize_null_examples, write_squad, AlignedDocPair, ParallelCorpus, SynthConfig,
};
use spanalign::{Error, Result};

use crate::args::{
    AlignIlpArgs, AlignSymArgs, BaselineArgs, Corpora, EvalArgs, NullArgs, PipelineArgs, ScoreArgs, SynthArgs,
};
use crate::config::{RunConfig, ScorerKind, SolverKind};
use crate::output::{io_at, OutDir};

pub const DEFAULT_TOP_K: usize = 5;
pub const DEFAULT_SHARPNESS: f64 = 1.0;

pub const FWD_PREDICTIONS: &str = "predictions.fwd.jsonl";
pub const REV_PREDICTIONS: &str = "predictions.rev.jsonl";

pub struct Context {
    pub config: RunConfig,
    pub out: OutDir,
    pub pool: rayon::ThreadPool,
    pub seed: u64,
}

impl Context {
    /// Runs `f` for every index on the worker pool. Results come back in
    /// index order, and so does the first error.
    fn par_map<T, F>(&self, n: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync,
    {
        let results: Vec<Result<T>> = self.pool.install(|| (0..n).into_par_iter().map(&f).collect());
        results.into_iter().collect()
    }
}

type PairKey = (String, String);

fn require_files(paths: &[&Path]) -> Result<()> {
    for p in paths {
        if !p.is_file() {
            return Err(Error::io(*p, std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found")));
        }
    }
    Ok(())
}

fn load_pairs(c: &Corpora) -> Result<(Vec<Document>, Vec<Document>)> {
    let src = load_corpus(&c.src)?;
    let tgt = load_corpus(&c.tgt)?;
    if src.len() != tgt.len() {
        return Err(Error::Validation(format!(
            "{} holds {} documents but {} holds {}; documents pair by line order",
            c.src.display(),
            src.len(),
            c.tgt.display(),
            tgt.len()
        )));
    }
    Ok((src, tgt))
}

/// Gold alignment for every document pair, in pair order.
fn gold_for_pairs(path: &Path, src: &[Document], tgt: &[Document], contiguous: bool) -> Result<Vec<Alignment>> {
    let golds = load_alignments(path, src, tgt, contiguous)?;
    let mut by_pair: HashMap<PairKey, Alignment> = HashMap::new();
    for g in golds {
        let key = (g.src_doc_id().to_string(), g.tgt_doc_id().to_string());
        if by_pair.insert(key.clone(), g).is_some() {
            return Err(Error::Validation(format!(
                "{}: duplicate alignment for {} -> {}",
                path.display(),
                key.0,
                key.1
            )));
        }
    }
    src.iter()
        .zip(tgt)
        .map(|(s, t)| {
            by_pair.remove(&(s.doc_id().to_string(), t.doc_id().to_string())).ok_or_else(|| {
                Error::Reference(format!(
                    "{}: no alignment for document pair {} -> {}",
                    path.display(),
                    s.doc_id(),
                    t.doc_id()
                ))
            })
        })
        .collect()
}

fn null_rule(args: &NullArgs, config: &RunConfig, header: &PredictionHeader) -> NullRule {
    let mode = args.null_rule.or(config.null.mode).unwrap_or(if header.null_slot {
        NullMode::NaToken
    } else {
        NullMode::ScoreThreshold
    });
    NullRule { mode, tau: args.tau.or(config.null.tau).unwrap_or(0.0) }
}

fn load_ruled(
    path: &Path,
    expected: Direction,
    args: &NullArgs,
    config: &RunConfig,
) -> Result<(PredictionHeader, Vec<PredictionRecord>)> {
    let PredictionFile { header, records } = load_predictions(path, args.vector_top_k.unwrap_or(DEFAULT_VECTOR_TOP_K))?;
    if header.direction != expected {
        return Err(Error::Validation(format!(
            "{}: header direction is {:?}, expected {:?}",
            path.display(),
            header.direction,
            expected
        )));
    }
    let rule = null_rule(args, config, &header);
    let ruled = records.iter().map(|r| apply_null_rule(r, &rule)).collect::<Result<Vec<_>>>().map_err(|e| match e {
        Error::Contract(m) | Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok((header, ruled))
}

/// Splits records by document pair. `reverse` records query the target
/// side. Records for pairs outside the corpora are an error.
fn group_by_pair(
    records: Vec<PredictionRecord>,
    origin: &Path,
    src: &[Document],
    tgt: &[Document],
    reverse: bool,
) -> Result<Vec<Vec<PredictionRecord>>> {
    let mut index: HashMap<PairKey, usize> = HashMap::new();
    for (i, (s, t)) in src.iter().zip(tgt).enumerate() {
        let (q, a) = if reverse { (t, s) } else { (s, t) };
        index.insert((q.doc_id().to_string(), a.doc_id().to_string()), i);
    }
    let mut out = vec![Vec::new(); src.len()];
    for r in records {
        let key = (r.query_doc_id().to_string(), r.target_doc_id().to_string());
        let i = index.get(&key).ok_or_else(|| {
            Error::Reference(format!(
                "{}: record {} pairs {} -> {}, which is not a document pair of the corpora",
                origin.display(),
                r.qid(),
                key.0,
                key.1
            ))
        })?;
        out[*i].push(r);
    }
    Ok(out)
}

fn write_alignment_file(ctx: &Context, name: &str, alignments: &[Alignment]) -> Result<PathBuf> {
    ctx.out.write(name, |w| io_at(name, write_alignments(w, alignments)))
}

fn write_json_lines<T: Serialize>(ctx: &Context, name: &str, rows: &[T]) -> Result<PathBuf> {
    ctx.out.write(name, |w| {
        for row in rows {
            io_at(name, serde_json::to_writer(&mut *w, row).map_err(std::io::Error::from))?;
            io_at(name, w.write_all(b"\n"))?;
        }
        Ok(())
    })
}

pub fn synth(ctx: &Context, args: &SynthArgs) -> Result<()> {
    let mut inputs = vec![args.corpora.src.as_path(), args.corpora.tgt.as_path()];
    inputs.extend(args.gold.as_deref());
    require_files(&inputs)?;
    let cfg = &ctx.config.synth;
    let defaults = SynthConfig::default();
    let config = SynthConfig {
        num_negatives: args.negatives.or(cfg.negatives).unwrap_or(defaults.num_negatives),
        mode: args.mode.or(cfg.mode).unwrap_or(defaults.mode),
        seed: ctx.seed,
        max_query_tokens: args.max_query_tokens.or(cfg.max_query_tokens).unwrap_or(defaults.max_query_tokens),
        max_context_tokens: args.max_context_tokens.or(cfg.max_context_tokens).unwrap_or(defaults.max_context_tokens),
        version: args.squad_version.or(cfg.squad_version).unwrap_or(defaults.version),
        null_cap: args.null_cap.or(cfg.null_cap).unwrap_or(defaults.null_cap),
        null_sampling: args.null_sampling.or(cfg.null_sampling).unwrap_or(defaults.null_sampling),
    };
    let name = args.name.clone().or_else(|| cfg.name.clone()).unwrap_or_else(|| "corpus".into());
    if args.null_examples && args.gold.is_none() {
        return Err(Error::Config("--null-examples needs --gold".into()));
    }

    let (src, tgt) = load_pairs(&args.corpora)?;
    let golds = match &args.gold {
        Some(path) => Some(gold_for_pairs(path, &src, &tgt, false)?),
        None => None,
    };
    let corpus = match &golds {
        Some(g) => ParallelCorpus::from_alignments(&name, &src, &tgt, g)?,
        None => ParallelCorpus::from_parallel_documents(&name, &src, &tgt)?,
    };
    let corpus = if args.reverse { corpus.reversed() } else { corpus };
    let mut records = synthesize(&corpus, &config)?;
    log::info!("{} answerable records from {} pairs", records.len(), corpus.len());

    if args.null_examples {
        let golds = golds.expect("checked above");
        let transposed: Vec<Alignment> = golds.iter().map(Alignment::transposed).collect();
        let pairs: Vec<AlignedDocPair> = (0..src.len())
            .map(|i| {
                if args.reverse {
                    AlignedDocPair { src: &tgt[i], tgt: &src[i], gold: &transposed[i] }
                } else {
                    AlignedDocPair { src: &src[i], tgt: &tgt[i], gold: &golds[i] }
                }
            })
            .collect();
        let nulls = synthesize_null_examples(&name, &pairs, &config)?;
        log::info!("{} unanswerable records", nulls.len());
        records.extend(nulls);
    }
    ctx.out.write(&args.output, |w| write_squad(w, &name, config.version, &records))?;
    Ok(())
}

fn write_prediction_file(
    ctx: &Context,
    name: &str,
    header: &PredictionHeader,
    per_pair: &[Vec<PredictionRecord>],
) -> Result<()> {
    let all: Vec<PredictionRecord> = per_pair.iter().flatten().cloned().collect();
    ctx.out.write(name, |w| write_predictions(w, header, &all))?;
    Ok(())
}

pub fn score(ctx: &Context, args: &ScoreArgs) -> Result<()> {
    let cfg = &ctx.config.score;
    let kind = args
        .scorer
        .or(cfg.scorer)
        .ok_or_else(|| Error::Config("choose a scorer with --scorer lexical|planted".into()))?;
    let mut inputs = vec![args.corpora.src.as_path(), args.corpora.tgt.as_path()];
    match kind {
        ScorerKind::Lexical => {
            inputs.push(args.dict.as_deref().ok_or_else(|| Error::Config("the lexical scorer needs --dict".into()))?)
        }
        ScorerKind::Planted => {
            inputs.push(args.gold.as_deref().ok_or_else(|| Error::Config("the planted scorer needs --gold".into()))?)
        }
    }
    require_files(&inputs)?;
    let top_k = args.top_k.or(cfg.top_k).unwrap_or(DEFAULT_TOP_K);
    let (src, tgt) = load_pairs(&args.corpora)?;
    let want_fwd = args.direction != "rev";
    let want_rev = args.direction != "fwd";

    let (fwd, rev, null_slot, producer) = match kind {
        ScorerKind::Lexical => {
            let dict = Dictionary::load(args.dict.as_ref().expect("checked"))?;
            let max_sentences = args.max_sentences.or(cfg.max_sentences).unwrap_or(2);
            let forward = LexicalScorer::new(dict.clone()).top_k(top_k).max_sentences(max_sentences);
            let backward = LexicalScorer::new(dict.inverted()).top_k(top_k).max_sentences(max_sentences);
            let run = |i: usize| -> Result<(Vec<PredictionRecord>, Vec<PredictionRecord>)> {
                let (s, t) = (&src[i], &tgt[i]);
                let f = if want_fwd { score_queries(&forward, s, t, &sentence_queries(s))? } else { Vec::new() };
                let r = if want_rev { score_queries(&backward, t, s, &sentence_queries(t))? } else { Vec::new() };
                Ok((f, r))
            };
            let out = ctx.par_map(src.len(), run)?;
            let (f, r): (Vec<_>, Vec<_>) = out.into_iter().unzip();
            (f, r, false, "lexical")
        }
        ScorerKind::Planted => {
            let golds = gold_for_pairs(args.gold.as_ref().expect("checked"), &src, &tgt, true)?;
            let sharpness = args.sharpness.or(cfg.sharpness).unwrap_or(DEFAULT_SHARPNESS);
            let run = |i: usize| planted_records(&src[i], &tgt[i], &golds[i], sharpness, top_k, want_fwd, want_rev);
            let out = ctx.par_map(src.len(), run)?;
            let (f, r): (Vec<_>, Vec<_>) = out.into_iter().unzip();
            (f, r, true, "planted")
        }
    };
    if want_fwd {
        write_prediction_file(
            ctx,
            FWD_PREDICTIONS,
            &PredictionHeader::new(Direction::Forward, producer, null_slot),
            &fwd,
        )?;
    }
    if want_rev {
        write_prediction_file(
            ctx,
            REV_PREDICTIONS,
            &PredictionHeader::new(Direction::Reverse, producer, null_slot),
            &rev,
        )?;
    }
    Ok(())
}

type RecordPair = (Vec<PredictionRecord>, Vec<PredictionRecord>);

fn planted_records(
    src: &Document,
    tgt: &Document,
    gold: &Alignment,
    sharpness: f64,
    top_k: usize,
    want_fwd: bool,
    want_rev: bool,
) -> Result<RecordPair> {
    let scorer = PlantedScorer::new(gold, src, tgt, sharpness)?.top_k(top_k);
    let f = if want_fwd { score_queries(&scorer, src, tgt, scorer.queries(src.doc_id())?)? } else { Vec::new() };
    let r = if want_rev { score_queries(&scorer, tgt, src, scorer.queries(tgt.doc_id())?)? } else { Vec::new() };
    Ok((f, r))
}

fn ilp_config(ctx: &Context, args: &AlignIlpArgs, have_rev: bool) -> IlpConfig {
    let cfg = &ctx.config;
    let c_prime = args.c_prime.or(cfg.combine.c_prime.map(|s| s.0)).unwrap_or(if have_rev {
        CPrime::Auto
    } else {
        CPrime::Fixed(0.0)
    });
    IlpConfig {
        snap: SnapConfig {
            min_score: args.snap.min_score.or(cfg.snap.min_score).unwrap_or(DEFAULT_MIN_SCORE),
            rule: args.snap.boundary.or(cfg.snap.boundary).unwrap_or_default(),
        },
        combine: CombineConfig {
            c: args.c.or(cfg.combine.c).unwrap_or(1.0),
            c_prime,
            one_sided: args.one_sided.or(cfg.combine.one_sided).unwrap_or(OneSidedPolicy::Keep),
        },
        solver: solver_of(args.solver.or(cfg.solver.kind), args.exact_cap.or(cfg.solver.exact_cap)),
        emit_nulls: args.emit_nulls || cfg.solver.emit_nulls.unwrap_or(false),
    }
}

fn solver_of(kind: Option<SolverKind>, cap: Option<usize>) -> Solver {
    match kind.unwrap_or(SolverKind::Exact) {
        SolverKind::Exact => Solver::Exact { cap: cap.unwrap_or(DEFAULT_EXACT_CAP) },
        SolverKind::Greedy => Solver::Greedy,
    }
}

#[derive(Serialize)]
struct ReportRow<'a> {
    src_doc_id: &'a str,
    tgt_doc_id: &'a str,
    candidates: usize,
    #[serde(flatten)]
    report: &'a SolveReport,
}

#[derive(Serialize)]
struct UnitRow<'a> {
    src_doc_id: &'a str,
    tgt_doc_id: &'a str,
    direction: &'static str,
    #[serde(flatten)]
    unit: &'a SentenceUnitCandidate,
}

#[derive(Serialize)]
struct CandidateRow<'a> {
    src_doc_id: &'a str,
    tgt_doc_id: &'a str,
    id: usize,
    src: Vec<usize>,
    tgt: Vec<usize>,
    omega: f64,
}

pub fn align_ilp_cmd(ctx: &Context, args: &AlignIlpArgs) -> Result<()> {
    let mut inputs = vec![args.corpora.src.as_path(), args.corpora.tgt.as_path(), args.fwd.as_path()];
    inputs.extend(args.rev.as_deref());
    require_files(&inputs)?;
    let config = ilp_config(ctx, args, args.rev.is_some());
    let (src, tgt) = load_pairs(&args.corpora)?;
    let (_, fwd) = load_ruled(&args.fwd, Direction::Forward, &args.null, &ctx.config)?;
    let fwd = group_by_pair(fwd, &args.fwd, &src, &tgt, false)?;
    let rev = match &args.rev {
        Some(path) => {
            let (_, rev) = load_ruled(path, Direction::Reverse, &args.null, &ctx.config)?;
            group_by_pair(rev, path, &src, &tgt, true)?
        }
        None => vec![Vec::new(); src.len()],
    };
    let outcomes = ctx.par_map(src.len(), |i| {
        align_ilp(&src[i], &tgt[i], &fwd[i], &rev[i], &config).map_err(|e| match e {
            Error::CapExceeded { .. } => {
                log::error!("document pair {} -> {}: {e}", src[i].doc_id(), tgt[i].doc_id());
                e
            }
            Error::Degenerate(m) => {
                Error::Degenerate(format!("document pair {} -> {}: {m}", src[i].doc_id(), tgt[i].doc_id()))
            }
            other => other,
        })
    })?;
    let alignments: Vec<Alignment> = outcomes.iter().map(|o| o.alignment.clone()).collect();
    write_alignment_file(ctx, "alignments.ilp.jsonl", &alignments)?;
    if args.report {
        let rows: Vec<ReportRow> = outcomes
            .iter()
            .map(|o| ReportRow {
                src_doc_id: o.alignment.src_doc_id(),
                tgt_doc_id: o.alignment.tgt_doc_id(),
                candidates: o.candidates.len(),
                report: &o.report,
            })
            .collect();
        write_json_lines(ctx, "solve_report.jsonl", &rows)?;
    }
    if args.dump_candidates {
        let mut units = Vec::new();
        let mut cands = Vec::new();
        for o in &outcomes {
            let (s, t) = (o.alignment.src_doc_id(), o.alignment.tgt_doc_id());
            for (direction, list) in [("fwd", &o.units.0), ("rev", &o.units.1)] {
                units.extend(list.iter().map(|unit| UnitRow { src_doc_id: s, tgt_doc_id: t, direction, unit }));
            }
            cands.extend(o.candidates.iter().map(|c| CandidateRow {
                src_doc_id: s,
                tgt_doc_id: t,
                id: c.id,
                src: c.src.ids(),
                tgt: c.tgt.ids(),
                omega: c.omega,
            }));
        }
        write_json_lines(ctx, "units.jsonl", &units)?;
        write_json_lines(ctx, "candidates.jsonl", &cands)?;
    }
    Ok(())
}

fn sym_config(
    config: &RunConfig,
    theta: Option<f64>,
    missing: Option<spanalign::symmetrize::MissingDirection>,
) -> SymConfig {
    SymConfig {
        theta: theta.or(config.sym.theta).unwrap_or(DEFAULT_THETA),
        missing: missing.or(config.sym.missing).unwrap_or_default(),
    }
}

pub fn align_sym_cmd(ctx: &Context, args: &AlignSymArgs) -> Result<()> {
    require_files(&[&args.corpora.src, &args.corpora.tgt, &args.fwd, &args.rev])?;
    let config = sym_config(&ctx.config, args.theta, args.missing);
    let (src, tgt) = load_pairs(&args.corpora)?;
    let (_, fwd) = load_ruled(&args.fwd, Direction::Forward, &args.null, &ctx.config)?;
    let (_, rev) = load_ruled(&args.rev, Direction::Reverse, &args.null, &ctx.config)?;
    let fwd = group_by_pair(fwd, &args.fwd, &src, &tgt, false)?;
    let rev = group_by_pair(rev, &args.rev, &src, &tgt, true)?;
    let alignments = ctx.par_map(src.len(), |i| align_sym(&src[i], &tgt[i], &fwd[i], &rev[i], &config))?;
    write_alignment_file(ctx, "alignments.sym.jsonl", &alignments)?;
    Ok(())
}

pub fn baseline_cmd(ctx: &Context, args: &BaselineArgs) -> Result<()> {
    require_files(&[&args.corpora.src, &args.corpora.tgt, &args.dict])?;
    let base = ctx.config.baseline;
    let penalties = BeadPenalties {
        one_zero: args.penalty_one_zero.unwrap_or(base.one_zero),
        zero_one: args.penalty_zero_one.unwrap_or(base.zero_one),
        one_two: args.penalty_one_two.unwrap_or(base.one_two),
        two_one: args.penalty_two_one.unwrap_or(base.two_one),
        two_two: args.penalty_two_two.unwrap_or(base.two_two),
    };
    penalties.validate()?;
    let (src, tgt) = load_pairs(&args.corpora)?;
    let dict = Dictionary::load(&args.dict)?;
    let alignments = ctx.par_map(src.len(), |i| {
        let dp = dp_align(&src[i], &tgt[i], &dict, &penalties)?;
        log::info!("{} -> {}: AVSIM {:.4}", src[i].doc_id(), tgt[i].doc_id(), dp.avsim);
        dp.to_alignment(src[i].doc_id(), tgt[i].doc_id())
    })?;
    write_alignment_file(ctx, "alignments.baseline.jsonl", &alignments)?;
    Ok(())
}

fn emit_report(ctx: &Context, entries: &[EvalEntry], format: ReportFormat, report_file: Option<&str>) -> Result<()> {
    print!("{}", report(entries, format));
    if let Some(name) = report_file {
        let text = report(entries, ReportFormat::Json);
        ctx.out.write(name, |w| io_at(name, w.write_all(text.as_bytes())))?;
    }
    Ok(())
}

pub fn eval_cmd(ctx: &Context, args: &EvalArgs) -> Result<()> {
    require_files(&[&args.corpora.src, &args.corpora.tgt, &args.gold, &args.pred])?;
    if let Some(name) = &args.report_file {
        ctx.out.path(name)?;
    }
    let (src, tgt) = load_pairs(&args.corpora)?;
    let golds = gold_for_pairs(&args.gold, &src, &tgt, false)?;
    let entry = if args.mode == "pair" {
        let preds = load_alignments(&args.pred, &src, &tgt, false)?;
        let result = pair_eval_corpus(&preds, &golds)?;
        EvalEntry::pair(&args.model, args.direction.as_deref().unwrap_or("bidi"), result)
    } else {
        let PredictionFile { header, records } =
            load_predictions(&args.pred, args.null.vector_top_k.unwrap_or(DEFAULT_VECTOR_TOP_K))?;
        let direction = header.direction;
        let rule = null_rule(&args.null, &ctx.config, &header);
        let ruled = records.iter().map(|r| apply_null_rule(r, &rule)).collect::<Result<Vec<_>>>()?;
        let reverse = direction == Direction::Reverse;
        let grouped = group_by_pair(ruled, &args.pred, &src, &tgt, reverse)?;
        let per_pair: Vec<Vec<SpanPair>> = ctx.par_map(src.len(), |i| {
            if reverse {
                span_eval_records(&grouped[i], &tgt[i], &src[i], &golds[i].transposed())
            } else {
                span_eval_records(&grouped[i], &src[i], &tgt[i], &golds[i])
            }
        })?;
        let result = span_eval(per_pair.into_iter().flatten());
        let label = args.direction.clone().unwrap_or_else(|| direction.label().to_string());
        EvalEntry::span(&args.model, label, &result)
    };
    emit_report(ctx, &[entry], args.format, args.report_file.as_deref())
}

/// Planted demo: score both directions, then align through both strategies
/// and evaluate against the gold that planted the scores.
pub fn pipeline(ctx: &Context, args: &PipelineArgs) -> Result<()> {
    let (src, tgt, golds) = match (&args.src, &args.tgt, &args.gold) {
        (Some(s), Some(t), Some(g)) => {
            require_files(&[s, t, g])?;
            let corpora = Corpora { src: s.clone(), tgt: t.clone() };
            let (src, tgt) = load_pairs(&corpora)?;
            let golds = gold_for_pairs(g, &src, &tgt, true)?;
            (src, tgt, golds)
        }
        _ => {
            let bitext = planted_bitext(&BitextSpec { docs: args.docs, seed: ctx.seed, ..BitextSpec::default() })?;
            ctx.out.write("bitext.src.jsonl", |w| io_at("bitext.src.jsonl", write_corpus(w, &bitext.src)))?;
            ctx.out.write("bitext.tgt.jsonl", |w| io_at("bitext.tgt.jsonl", write_corpus(w, &bitext.tgt)))?;
            ctx.out.write("bitext.gold.jsonl", |w| io_at("bitext.gold.jsonl", write_alignments(w, &bitext.gold)))?;
            ctx.out.write("bitext.dict.tsv", |w| {
                let mut pairs: Vec<(String, String)> = Vec::new();
                for s in bitext.src.iter().flat_map(|d| d.tokens()) {
                    for t in bitext.dictionary.translations(s) {
                        pairs.push((s.clone(), t.to_string()));
                    }
                }
                pairs.sort();
                for (s, t) in pairs {
                    io_at("bitext.dict.tsv", writeln!(w, "{s}\t{t}"))?;
                }
                Ok(())
            })?;
            (bitext.src, bitext.tgt, bitext.gold)
        }
    };
    let cfg = &ctx.config;
    let sharpness = args.sharpness.or(cfg.score.sharpness).unwrap_or(DEFAULT_SHARPNESS);
    let top_k = cfg.score.top_k.unwrap_or(DEFAULT_TOP_K);
    let scored =
        ctx.par_map(src.len(), |i| planted_records(&src[i], &tgt[i], &golds[i], sharpness, top_k, true, true))?;
    let (fwd, rev): (Vec<_>, Vec<_>) = scored.into_iter().unzip();
    write_prediction_file(ctx, FWD_PREDICTIONS, &PredictionHeader::new(Direction::Forward, "planted", true), &fwd)?;
    write_prediction_file(ctx, REV_PREDICTIONS, &PredictionHeader::new(Direction::Reverse, "planted", true), &rev)?;

    let rule = NullRule { mode: cfg.null.mode.unwrap_or(NullMode::NaToken), tau: cfg.null.tau.unwrap_or(0.0) };
    let ruled = |recs: &[Vec<PredictionRecord>]| -> Result<Vec<Vec<PredictionRecord>>> {
        recs.iter().map(|rs| rs.iter().map(|r| apply_null_rule(r, &rule)).collect()).collect()
    };
    let (fwd, rev) = (ruled(&fwd)?, ruled(&rev)?);

    let ilp = IlpConfig {
        snap: SnapConfig {
            min_score: cfg.snap.min_score.unwrap_or(DEFAULT_MIN_SCORE),
            rule: cfg.snap.boundary.unwrap_or_default(),
        },
        combine: CombineConfig {
            c: cfg.combine.c.unwrap_or(1.0),
            c_prime: args.c_prime.or(cfg.combine.c_prime.map(|s| s.0)).unwrap_or(CPrime::Auto),
            one_sided: cfg.combine.one_sided.unwrap_or_default(),
        },
        solver: solver_of(args.solver.or(cfg.solver.kind), cfg.solver.exact_cap),
        emit_nulls: cfg.solver.emit_nulls.unwrap_or(false),
    };
    let ilp_out = ctx.par_map(src.len(), |i| Ok(align_ilp(&src[i], &tgt[i], &fwd[i], &rev[i], &ilp)?.alignment))?;
    write_alignment_file(ctx, "alignments.ilp.jsonl", &ilp_out)?;
    let sym = sym_config(cfg, args.theta, None);
    let sym_out = ctx.par_map(src.len(), |i| align_sym(&src[i], &tgt[i], &fwd[i], &rev[i], &sym))?;
    write_alignment_file(ctx, "alignments.sym.jsonl", &sym_out)?;

    let span_items = |recs: &[Vec<PredictionRecord>], reverse: bool| -> Result<Vec<SpanPair>> {
        let per_pair = ctx.par_map(src.len(), |i| {
            if reverse {
                span_eval_records(&recs[i], &tgt[i], &src[i], &golds[i].transposed())
            } else {
                span_eval_records(&recs[i], &src[i], &tgt[i], &golds[i])
            }
        })?;
        Ok(per_pair.into_iter().flatten().collect())
    };
    let entries = vec![
        EvalEntry::span("planted", "fwd", &span_eval(span_items(&fwd, false)?)),
        EvalEntry::span("planted", "rev", &span_eval(span_items(&rev, true)?)),
        EvalEntry::pair("planted+ilp", "bidi", pair_eval_corpus(&ilp_out, &golds)?),
        EvalEntry::pair("planted+sym", "bidi", pair_eval_corpus(&sym_out, &golds)?),
    ];
    emit_report(ctx, &entries, ReportFormat::Text, Some("report.json"))
}
