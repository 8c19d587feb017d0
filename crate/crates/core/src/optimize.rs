//! Globally consistent selection of sentence-unit pairs.
//!
//! Each candidate pairs a source sentence run with a target sentence run and
//! carries a combined score. A selection is feasible when no sentence on
//! either side is covered by two selected candidates; the solvers maximise
//! the summed score over feasible selections. Since candidates are whole
//! sentence runs, the per-sentence constraint selects the same feasible sets
//! as a per-token one.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Alignment, AlignmentGroup, Document, SentenceRange};
use crate::error::{Error, Result};
use crate::snap::SentenceUnitCandidate;

pub const DEFAULT_EXACT_CAP: usize = 200;

/// Objective values closer than this are treated as equal when breaking ties.
const TIE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpanPairCandidate {
    pub id: usize,
    pub src: SentenceRange,
    pub tgt: SentenceRange,
    pub omega: f64,
}

impl SpanPairCandidate {
    pub fn conflicts(&self, other: &SpanPairCandidate) -> bool {
        self.src.overlaps(other.src) || self.tgt.overlaps(other.tgt)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CPrime {
    Fixed(f64),
    /// `max(fwd) / max(rev)` over the document pair.
    Auto,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OneSidedPolicy {
    /// Keep a candidate seen in one direction with that direction's term only.
    #[default]
    Keep,
    Drop,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CombineConfig {
    pub c: f64,
    pub c_prime: CPrime,
    pub one_sided: OneSidedPolicy,
}

impl Default for CombineConfig {
    fn default() -> Self {
        CombineConfig { c: 1.0, c_prime: CPrime::Auto, one_sided: OneSidedPolicy::Keep }
    }
}

impl CombineConfig {
    /// Forward scores only.
    pub fn unidirectional() -> Self {
        CombineConfig { c: 1.0, c_prime: CPrime::Fixed(0.0), one_sided: OneSidedPolicy::Keep }
    }

    fn validate(&self) -> Result<()> {
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !finite_nonneg(self.c) {
            return Err(Error::Config(format!("c must be finite and >= 0, got {}", self.c)));
        }
        if let CPrime::Fixed(cp) = self.c_prime {
            if !finite_nonneg(cp) {
                return Err(Error::Config(format!("c' must be finite and >= 0, got {cp}")));
            }
            if self.c == 0.0 && cp == 0.0 {
                return Err(Error::Config("c and c' cannot both be zero".into()));
            }
        }
        Ok(())
    }
}

fn max_score(cands: &[SentenceUnitCandidate]) -> f64 {
    cands.iter().map(|c| c.avg_score).fold(0.0, f64::max)
}

/// Resolves the reverse-direction weight for one document pair.
pub fn resolve_c_prime(
    fwd: &[SentenceUnitCandidate],
    rev: &[SentenceUnitCandidate],
    config: &CombineConfig,
) -> Result<f64> {
    match config.c_prime {
        CPrime::Fixed(cp) => Ok(cp),
        CPrime::Auto => {
            let (mf, mr) = (max_score(fwd), max_score(rev));
            if mf == 0.0 && mr == 0.0 {
                return Err(Error::Degenerate("automatic c' needs a positive score in at least one direction".into()));
            }
            Ok(if mr == 0.0 { 1.0 } else { mf / mr })
        }
    }
}

/// Combines forward scores `w` and reverse scores `w'` into
/// `c * w + c' * w'`, matching candidates on identical sentence runs.
/// `rev` must already be in forward orientation.
///
/// Ids follow (source run, target run) order. An empty pair of inputs
/// yields no candidates.
pub fn combine_scores(
    fwd: &[SentenceUnitCandidate],
    rev: &[SentenceUnitCandidate],
    config: &CombineConfig,
) -> Result<Vec<SpanPairCandidate>> {
    config.validate()?;
    if fwd.is_empty() && rev.is_empty() {
        return Ok(Vec::new());
    }
    let c_prime = resolve_c_prime(fwd, rev, config)?;
    let mut table: HashMap<(SentenceRange, SentenceRange), (Option<f64>, Option<f64>)> = HashMap::new();
    for f in fwd {
        table.entry((f.src, f.tgt)).or_default().0 = Some(f.avg_score);
    }
    for r in rev {
        table.entry((r.src, r.tgt)).or_default().1 = Some(r.avg_score);
    }
    let mut keyed: Vec<_> = table
        .into_iter()
        .filter_map(|(key, scores)| {
            let omega = match scores {
                (Some(w), Some(wr)) => config.c * w + c_prime * wr,
                (Some(w), None) if config.one_sided == OneSidedPolicy::Keep => config.c * w,
                (None, Some(wr)) if config.one_sided == OneSidedPolicy::Keep => c_prime * wr,
                _ => return None,
            };
            Some((key, omega))
        })
        .collect();
    keyed.sort_by_key(|a| a.0);
    Ok(keyed
        .into_iter()
        .enumerate()
        .map(|(id, ((src, tgt), omega))| SpanPairCandidate { id, src, tgt, omega })
        .collect())
}

/// Wraps one-direction candidates with `Ω = avg_score`.
pub fn candidates_from_units(units: &[SentenceUnitCandidate]) -> Vec<SpanPairCandidate> {
    combine_scores(units, &[], &CombineConfig::unidirectional()).expect("unidirectional config is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Bruteforce,
    BranchAndBound,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub objective: f64,
    /// Selected candidate ids, ascending.
    pub selected: Vec<usize>,
    pub method: SolveMethod,
    pub optimal: bool,
    pub nodes_explored: u64,
}

fn validate_candidates(cands: &[SpanPairCandidate], n_src: usize, n_tgt: usize) -> Result<()> {
    let mut ids = std::collections::HashSet::new();
    for c in cands {
        if !ids.insert(c.id) {
            return Err(Error::Validation(format!("duplicate candidate id {}", c.id)));
        }
        if !c.omega.is_finite() || c.omega < 0.0 {
            return Err(Error::Validation(format!("candidate {} has invalid score {}", c.id, c.omega)));
        }
        if c.src.end() > n_src || c.tgt.end() > n_tgt {
            return Err(Error::Validation(format!(
                "candidate {} ranges [{}, {}) x [{}, {}) exceed {} x {} sentences",
                c.id,
                c.src.start(),
                c.src.end(),
                c.tgt.start(),
                c.tgt.end(),
                n_src,
                n_tgt
            )));
        }
    }
    Ok(())
}

fn objective_of(cands: &[SpanPairCandidate], selected: &[usize]) -> f64 {
    let by_id: HashMap<usize, f64> = cands.iter().map(|c| (c.id, c.omega)).collect();
    selected.iter().map(|id| by_id[id]).sum()
}

/// Exact maximum-weight feasible selection by depth-first branch and bound.
///
/// Candidates are branched in descending score order, include-branch first.
/// A node is pruned when an admissible bound (the smaller of the plain sum
/// of open scores and per-sentence apportioned sums on each side) cannot
/// reach the incumbent. Zero-score candidates never change the objective and
/// are not selected. Among optimal selections the lexicographically smallest
/// ascending id list wins.
pub fn solve_exact(cands: &[SpanPairCandidate], n_src: usize, n_tgt: usize, cap: usize) -> Result<SolveReport> {
    if cands.len() > cap {
        return Err(Error::CapExceeded { count: cands.len(), cap });
    }
    validate_candidates(cands, n_src, n_tgt)?;
    let mut order: Vec<SpanPairCandidate> = cands.iter().filter(|c| c.omega > 0.0).copied().collect();
    order.sort_by(|a, b| b.omega.total_cmp(&a.omega).then(a.id.cmp(&b.id)));
    let n = order.len();
    let conflicts: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| j != i && order[i].conflicts(&order[j])).collect()).collect();

    let mut search = Search {
        order: &order,
        conflicts: &conflicts,
        n_src,
        n_tgt,
        blocked: vec![0; n],
        chosen: Vec::new(),
        score: 0.0,
        best: Vec::new(),
        best_score: 0.0,
        nodes: 0,
    };
    search.descend(0);

    let mut selected: Vec<usize> = search.best.iter().map(|&i| order[i].id).collect();
    selected.sort_unstable();
    Ok(SolveReport {
        objective: objective_of(cands, &selected),
        selected,
        method: SolveMethod::BranchAndBound,
        optimal: true,
        nodes_explored: search.nodes,
    })
}

struct Search<'a> {
    order: &'a [SpanPairCandidate],
    conflicts: &'a [Vec<usize>],
    n_src: usize,
    n_tgt: usize,
    /// Number of chosen candidates conflicting with each position.
    blocked: Vec<u32>,
    chosen: Vec<usize>,
    score: f64,
    best: Vec<usize>,
    best_score: f64,
    nodes: u64,
}

impl Search<'_> {
    /// Upper bound on what positions `from..` can still add.
    fn bound(&self, from: usize) -> f64 {
        let mut plain = 0.0;
        let mut per_src = vec![0.0f64; self.n_src];
        let mut per_tgt = vec![0.0f64; self.n_tgt];
        for (i, c) in self.order.iter().enumerate().skip(from) {
            if self.blocked[i] > 0 {
                continue;
            }
            plain += c.omega;
            let ws = c.omega / c.src.len() as f64;
            for v in &mut per_src[c.src.start()..c.src.end()] {
                *v = v.max(ws);
            }
            let wt = c.omega / c.tgt.len() as f64;
            for v in &mut per_tgt[c.tgt.start()..c.tgt.end()] {
                *v = v.max(wt);
            }
        }
        let s: f64 = per_src.iter().sum();
        let t: f64 = per_tgt.iter().sum();
        // apportioning rounds; pad so the bound stays admissible
        plain.min(s * (1.0 + 1e-9)).min(t * (1.0 + 1e-9))
    }

    fn better_than_best(&self) -> bool {
        if self.score > self.best_score + TIE_EPS {
            return true;
        }
        if self.score < self.best_score - TIE_EPS {
            return false;
        }
        let mut mine: Vec<usize> = self.chosen.iter().map(|&i| self.order[i].id).collect();
        let mut theirs: Vec<usize> = self.best.iter().map(|&i| self.order[i].id).collect();
        mine.sort_unstable();
        theirs.sort_unstable();
        mine < theirs
    }

    fn descend(&mut self, pos: usize) {
        self.nodes += 1;
        let mut next = pos;
        while next < self.order.len() && self.blocked[next] > 0 {
            next += 1;
        }
        if next == self.order.len() {
            if self.better_than_best() {
                self.best = self.chosen.clone();
                self.best_score = self.score;
            }
            return;
        }
        if self.score + self.bound(next) < self.best_score - TIE_EPS {
            return;
        }
        // include
        for &j in &self.conflicts[next] {
            self.blocked[j] += 1;
        }
        self.chosen.push(next);
        let before = self.score;
        self.score += self.order[next].omega;
        self.descend(next + 1);
        self.score = before;
        self.chosen.pop();
        for &j in &self.conflicts[next] {
            self.blocked[j] -= 1;
        }
        // exclude
        self.descend(next + 1);
    }
}

/// Accepts candidates in descending score order (ties by id) whenever they
/// conflict with nothing already accepted. Not optimal in general.
pub fn solve_greedy(cands: &[SpanPairCandidate], n_src: usize, n_tgt: usize) -> Result<SolveReport> {
    validate_candidates(cands, n_src, n_tgt)?;
    let mut order: Vec<&SpanPairCandidate> = cands.iter().filter(|c| c.omega > 0.0).collect();
    order.sort_by(|a, b| b.omega.total_cmp(&a.omega).then(a.id.cmp(&b.id)));
    let mut src_used = vec![false; n_src];
    let mut tgt_used = vec![false; n_tgt];
    let mut selected = Vec::new();
    for c in order {
        let free =
            (c.src.start()..c.src.end()).all(|s| !src_used[s]) && (c.tgt.start()..c.tgt.end()).all(|t| !tgt_used[t]);
        if free {
            src_used[c.src.start()..c.src.end()].fill(true);
            tgt_used[c.tgt.start()..c.tgt.end()].fill(true);
            selected.push(c.id);
        }
    }
    selected.sort_unstable();
    Ok(SolveReport {
        objective: objective_of(cands, &selected),
        nodes_explored: cands.len() as u64,
        selected,
        method: SolveMethod::Greedy,
        optimal: false,
    })
}

/// Every sentence on either side covered at most once by the selection.
pub fn is_feasible(cands: &[SpanPairCandidate], selected: &[usize], n_src: usize, n_tgt: usize) -> bool {
    let by_id: HashMap<usize, &SpanPairCandidate> = cands.iter().map(|c| (c.id, c)).collect();
    let mut src = vec![0u32; n_src];
    let mut tgt = vec![0u32; n_tgt];
    for id in selected {
        let Some(c) = by_id.get(id) else { return false };
        for s in c.src.start()..c.src.end() {
            src[s] += 1;
        }
        for t in c.tgt.start()..c.tgt.end() {
            tgt[t] += 1;
        }
    }
    src.iter().chain(&tgt).all(|&k| k <= 1)
}

/// Turns a solver selection into an alignment, one group per selected
/// candidate with the candidate score. With `emit_nulls`, every uncovered
/// sentence becomes its own one-sided group.
pub fn alignment_from_selection(
    report: &SolveReport,
    cands: &[SpanPairCandidate],
    src_doc: &Document,
    tgt_doc: &Document,
    emit_nulls: bool,
) -> Result<Alignment> {
    let by_id: HashMap<usize, &SpanPairCandidate> = cands.iter().map(|c| (c.id, c)).collect();
    let mut groups = Vec::new();
    let mut src_used = vec![false; src_doc.sentence_count()];
    let mut tgt_used = vec![false; tgt_doc.sentence_count()];
    for id in &report.selected {
        let c = by_id.get(id).ok_or_else(|| Error::Reference(format!("selected id {id} is not a candidate")))?;
        if c.src.end() > src_used.len() || c.tgt.end() > tgt_used.len() {
            return Err(Error::Reference(format!("candidate {id} exceeds the document pair")));
        }
        src_used[c.src.start()..c.src.end()].fill(true);
        tgt_used[c.tgt.start()..c.tgt.end()].fill(true);
        groups.push(AlignmentGroup::from_ranges(Some(c.src), Some(c.tgt), Some(c.omega))?);
    }
    if emit_nulls {
        for (s, _) in src_used.iter().enumerate().filter(|(_, u)| !**u) {
            groups.push(AlignmentGroup::new(vec![s], vec![], None)?);
        }
        for (t, _) in tgt_used.iter().enumerate().filter(|(_, u)| !**u) {
            groups.push(AlignmentGroup::new(vec![], vec![t], None)?);
        }
    }
    sort_groups(&mut groups);
    Alignment::new(src_doc.doc_id(), tgt_doc.doc_id(), groups)
}

/// Orders groups by first source id, one-sided target groups last.
pub(crate) fn sort_groups(groups: &mut [AlignmentGroup]) {
    groups.sort_by_key(|g| {
        (g.src().first().copied().unwrap_or(usize::MAX), g.tgt().first().copied().unwrap_or(usize::MAX))
    });
}
