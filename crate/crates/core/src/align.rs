//! Per-document-pair drivers that chain snapping, score combination and
//! selection for both alignment strategies.
//!
//! Forward records query the source document against the target; reverse
//! records query the target against the source. Both must already be
//! null-ruled.

use crate::corpus::{Alignment, Document};
use crate::error::Result;
use crate::optimize::{
    alignment_from_selection, combine_scores, solve_exact, solve_greedy, CombineConfig, SolveReport, SpanPairCandidate,
    DEFAULT_EXACT_CAP,
};
use crate::predict::{Direction, PredictionRecord};
use crate::snap::{collect_candidates, SentenceUnitCandidate, SnapConfig};
use crate::symmetrize::{average_and_threshold, directed_scores, SymConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Exact { cap: usize },
    Greedy,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::Exact { cap: DEFAULT_EXACT_CAP }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IlpConfig {
    pub snap: SnapConfig,
    pub combine: CombineConfig,
    pub solver: Solver,
    pub emit_nulls: bool,
}

#[derive(Clone, Debug)]
pub struct IlpOutcome {
    pub alignment: Alignment,
    pub report: SolveReport,
    pub candidates: Vec<SpanPairCandidate>,
    /// Snapped units per direction, reverse already in source/target order.
    pub units: (Vec<SentenceUnitCandidate>, Vec<SentenceUnitCandidate>),
}

pub fn solve(cands: &[SpanPairCandidate], n_src: usize, n_tgt: usize, solver: Solver) -> Result<SolveReport> {
    match solver {
        Solver::Exact { cap } => solve_exact(cands, n_src, n_tgt, cap),
        Solver::Greedy => solve_greedy(cands, n_src, n_tgt),
    }
}

/// Span-pair selection over one document pair. With an empty `rev` and
/// `CombineConfig::unidirectional` this is the forward-only variant.
pub fn align_ilp(
    src: &Document,
    tgt: &Document,
    fwd: &[PredictionRecord],
    rev: &[PredictionRecord],
    config: &IlpConfig,
) -> Result<IlpOutcome> {
    let fwd_units = collect_candidates(fwd, src, tgt, &config.snap)?;
    let rev_units: Vec<SentenceUnitCandidate> =
        collect_candidates(rev, tgt, src, &config.snap)?.iter().map(SentenceUnitCandidate::reoriented).collect();
    let candidates = combine_scores(&fwd_units, &rev_units, &config.combine)?;
    let report = solve(&candidates, src.sentence_count(), tgt.sentence_count(), config.solver)?;
    let alignment = alignment_from_selection(&report, &candidates, src, tgt, config.emit_nulls)?;
    Ok(IlpOutcome { alignment, report, candidates, units: (fwd_units, rev_units) })
}

/// Averaged best-span probabilities per sentence pair, thresholded.
pub fn align_sym(
    src: &Document,
    tgt: &Document,
    fwd: &[PredictionRecord],
    rev: &[PredictionRecord],
    config: &SymConfig,
) -> Result<Alignment> {
    let f = directed_scores(fwd, src, tgt, Direction::Forward)?;
    let r = directed_scores(rev, tgt, src, Direction::Reverse)?;
    average_and_threshold(&f, &r, src.doc_id(), tgt.doc_id(), config)
}
