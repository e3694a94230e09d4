//! Certificate search.
//!
//! The search alternates Cremona simplification with decompositions
//! `v = outer #_site inner`, where `inner` is a base-family vector and
//! `outer` is searched recursively. Failures are memoized on the sorted,
//! gcd-normalized vector, and the decomposition depth is deepened
//! iteratively up to [`SearchLimits::max_depth`].

use std::collections::HashMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use thiserror::Error;

use crate::base::{match_ints, necessary_kernel, FailReason};
use crate::certificate::Certificate;
use crate::cremona::{reduce_kernel, CremonaWord, ReductionStatus};
use crate::lattice::{ClassVector, PositivityKind, Rational};

mod candidates;
mod families;
mod probe;

pub use candidates::{candidate_decompositions, Decomposition};
pub use families::{
    asymp1_part1, asymp1_part2, asymp1_part3, asymp1_part3_trimmed, coef2_certificate, nagata_compose,
};
pub use probe::{indecomposability_probe, NearMiss, ProbeLimits, ProbeReport, ProbeVerdict};

use candidates::{candidates_sorted, Candidate};

/// Entries beyond this magnitude are not searched, so products stay in `i128`.
const ENTRY_LIMIT: i128 = 1 << 52;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("PreconditionViolated: {0}")]
    PreconditionViolated(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_depth: usize,
    /// Maximum number of search nodes expanded over all deepening rounds.
    pub node_budget: u64,
    /// Degrees `s` tried for square-family inner vectors `c·(s; 1^{s²})`.
    pub candidate_degrees: RangeInclusive<i128>,
    /// Expand the first branch point in parallel. The certificate found may
    /// then differ from the sequential one.
    pub parallel: bool,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_depth: 16,
            node_budget: 1_000_000,
            candidate_degrees: 2..=16,
            parallel: false,
        }
    }
}

/// A disproof: `word` maps the input to `image`, which fails a necessary
/// condition. Cremona maps preserve nef and ample vectors, so the input fails too.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disproof {
    pub image: ClassVector,
    pub word: CremonaWord,
    pub reason: FailReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProveOutcome {
    Proved(Certificate),
    Disproved(Disproof),
    Inconclusive { nodes_used: u64 },
}

impl ProveOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProveOutcome::Proved(_))
    }

    pub fn is_disproved(&self) -> bool {
        matches!(self, ProveOutcome::Disproved(_))
    }
}

/// A decomposition rejected because its outer factor fails a necessary condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunedBranch {
    pub vector: ClassVector,
    pub outer: ClassVector,
    pub inner: ClassVector,
    pub reason: FailReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: ProveOutcome,
    pub nodes_used: u64,
    pub pruned: Vec<PrunedBranch>,
}

pub fn prove(v: &ClassVector, kind: PositivityKind, limits: &SearchLimits) -> ProveOutcome {
    prove_with_report(v, kind, limits).outcome
}

pub fn prove_with_report(v: &ClassVector, kind: PositivityKind, limits: &SearchLimits) -> SearchReport {
    let inconclusive = |nodes_used| SearchReport {
        outcome: ProveOutcome::Inconclusive { nodes_used },
        nodes_used,
        pruned: Vec::new(),
    };
    let Some(content) = v.content() else {
        let outcome = match Certificate::base(v.clone(), kind) {
            Some(c) => ProveOutcome::Proved(c),
            None => match necessary_kernel(v.degree(), v.mults(), kind) {
                Err(reason) => ProveOutcome::Disproved(Disproof {
                    image: v.clone(),
                    word: CremonaWord::new(),
                    reason,
                }),
                Ok(()) => ProveOutcome::Inconclusive { nodes_used: 0 },
            },
        };
        return SearchReport {
            outcome,
            nodes_used: 0,
            pruned: Vec::new(),
        };
    };
    let normalized = v.scale_unchecked(&(Rational::from_integer(1.into()) / &content));
    let Some((d, m)) = normalized.to_i128s() else {
        return inconclusive(0);
    };
    if std::iter::once(&d).chain(&m).any(|x| x.abs() > ENTRY_LIMIT) {
        return inconclusive(0);
    }
    let mut report = if limits.parallel {
        prove_parallel(d, m, kind, limits)
    } else {
        let mut s = Searcher::new(kind, limits);
        let outcome = s.run(d, m);
        SearchReport {
            outcome,
            nodes_used: s.nodes,
            pruned: s.pruned,
        }
    };
    let one = Rational::from_integer(1.into());
    if content != one {
        report.outcome = match report.outcome {
            ProveOutcome::Proved(c) => {
                ProveOutcome::Proved(Certificate::scale(content.clone(), c).expect("content is positive"))
            }
            ProveOutcome::Disproved(mut dp) => {
                dp.image = dp.image.scale_unchecked(&content);
                dp.reason = necessary_kernel(dp.image.degree(), dp.image.mults(), kind)
                    .expect_err("scaling by a positive factor keeps the failure");
                ProveOutcome::Disproved(dp)
            }
            other => other,
        };
    }
    report
}

/// Search result for a single node.
enum Step {
    Proved(Certificate),
    Disproved(Disproof),
    Failed,
    Aborted,
}

fn memo_key(d: i128, m: &[i128]) -> Vec<i128> {
    let g = m.iter().fold(d.abs(), |acc, &x| num_integer::gcd(acc, x));
    let g = if g == 0 { 1 } else { g };
    let mut key: Vec<i128> = m.iter().map(|x| x / g).collect();
    key.sort_unstable_by(|a, b| b.cmp(a));
    key.insert(0, d / g);
    key
}

struct Searcher<'a> {
    kind: PositivityKind,
    limits: &'a SearchLimits,
    nodes: u64,
    /// Deepest remaining depth at which a vector is known to fail;
    /// `usize::MAX` for vectors that are disproved outright.
    memo: HashMap<Vec<i128>, usize>,
    pruned: Vec<PrunedBranch>,
}

impl<'a> Searcher<'a> {
    fn new(kind: PositivityKind, limits: &'a SearchLimits) -> Self {
        Searcher {
            kind,
            limits,
            nodes: 0,
            memo: HashMap::new(),
            pruned: Vec::new(),
        }
    }

    fn run(&mut self, d: i128, m: Vec<i128>) -> ProveOutcome {
        for depth in 0..=self.limits.max_depth {
            match self.search(d, m.clone(), depth) {
                Step::Proved(c) => return ProveOutcome::Proved(c),
                Step::Disproved(dp) => return ProveOutcome::Disproved(dp),
                Step::Aborted => break,
                Step::Failed => {}
            }
        }
        ProveOutcome::Inconclusive { nodes_used: self.nodes }
    }

    fn search(&mut self, d: i128, m: Vec<i128>, depth: usize) -> Step {
        if self.nodes >= self.limits.node_budget {
            return Step::Aborted;
        }
        self.nodes += 1;
        let kind = self.kind;
        if let Err(reason) = necessary_kernel(&d, &m, kind) {
            self.memo.insert(memo_key(d, &m), usize::MAX);
            return Step::Disproved(Disproof {
                image: ClassVector::from_i128s(d, &m),
                word: CremonaWord::new(),
                reason,
            });
        }
        if let Some(witness) = match_ints(d, &m, kind) {
            return Step::Proved(Certificate::Base {
                claim: crate::certificate::Claim::new(ClassVector::from_i128s(d, &m), kind),
                witness,
            });
        }
        if m.len() < 3 {
            return match small_k(d, &m, kind) {
                Some(c) => Step::Proved(c),
                None => Step::Failed,
            };
        }
        let key = memo_key(d, &m);
        if self.memo.get(&key).is_some_and(|&failed| failed >= depth) {
            return Step::Failed;
        }

        let (mut rd, mut rm, mut ops) = (d, m.clone(), Vec::new());
        let status = reduce_kernel(&mut rd, &mut rm, &mut ops);
        let word = CremonaWord::from(ops);
        let step = match status {
            ReductionStatus::NegativeEntry | ReductionStatus::NonPositiveDegree => {
                let reason = necessary_kernel(&rd, &rm, kind).expect_err("reduced image fails a check");
                Step::Disproved(Disproof {
                    image: ClassVector::from_i128s(rd, &rm),
                    word,
                    reason,
                })
            }
            _ if !word.is_empty() => match self.search(rd, rm, depth) {
                Step::Proved(child) => Step::Proved(Certificate::cremona(ClassVector::from_i128s(d, &m), word, child)),
                Step::Disproved(dp) => {
                    let mut full = word;
                    full.extend(dp.word);
                    Step::Disproved(Disproof { word: full, ..dp })
                }
                other => other,
            },
            _ => self.decompose(d, &m, depth),
        };
        match step {
            Step::Failed => {
                let e = self.memo.entry(key).or_insert(0);
                *e = (*e).max(depth);
            }
            Step::Disproved(_) => {
                self.memo.insert(key, usize::MAX);
            }
            _ => {}
        }
        step
    }

    /// Tries every candidate decomposition of the sorted, reduced `(d; m)`.
    fn decompose(&mut self, d: i128, m: &[i128], depth: usize) -> Step {
        if depth == 0 {
            return Step::Failed;
        }
        for cand in candidates_sorted(m, &self.limits.candidate_degrees) {
            match self.try_candidate(d, m, &cand, depth) {
                Step::Failed | Step::Disproved(_) => continue,
                other => return other,
            }
        }
        Step::Failed
    }

    fn try_candidate(&mut self, d: i128, m: &[i128], cand: &Candidate, depth: usize) -> Step {
        if let Err(reason) = necessary_kernel(&d, &cand.outer, self.kind) {
            self.pruned.push(PrunedBranch {
                vector: ClassVector::from_i128s(d, m),
                outer: ClassVector::from_i128s(d, &cand.outer),
                inner: ClassVector::from_i128s(cand.inner_degree, &cand.inner),
                reason,
            });
            return Step::Failed;
        }
        match self.search(d, cand.outer.clone(), depth - 1) {
            Step::Proved(outer) => Step::Proved(cand.assemble(d, m, outer)),
            other => other,
        }
    }
}

fn prove_parallel(d: i128, m: Vec<i128>, kind: PositivityKind, limits: &SearchLimits) -> SearchReport {
    // Walk the deterministic prefix (checks, base match, reduction) sequentially,
    // then fan out over the candidate decompositions of the reduced vector.
    let mut s = Searcher::new(kind, limits);
    let sequential_only = limits.max_depth == 0 || m.len() < 3;
    if sequential_only {
        let outcome = s.run(d, m);
        return SearchReport {
            outcome,
            nodes_used: s.nodes,
            pruned: s.pruned,
        };
    }
    let shallow = s.search(d, m.clone(), 0);
    match shallow {
        Step::Proved(c) => {
            return SearchReport {
                outcome: ProveOutcome::Proved(c),
                nodes_used: s.nodes,
                pruned: s.pruned,
            }
        }
        Step::Disproved(dp) => {
            return SearchReport {
                outcome: ProveOutcome::Disproved(dp),
                nodes_used: s.nodes,
                pruned: s.pruned,
            }
        }
        _ => {}
    }
    let (mut rd, mut rm, mut ops) = (d, m.clone(), Vec::new());
    reduce_kernel(&mut rd, &mut rm, &mut ops);
    let word = CremonaWord::from(ops);
    let cands = candidates_sorted(&rm, &limits.candidate_degrees);
    let used = std::sync::atomic::AtomicU64::new(s.nodes);
    let found = cands.par_iter().find_map_first(|cand| {
        let mut sub = Searcher::new(kind, limits);
        let mut result = None;
        for depth in 1..=limits.max_depth {
            match sub.try_candidate(rd, &rm, cand, depth) {
                Step::Proved(c) => {
                    result = Some(c);
                    break;
                }
                Step::Aborted => break,
                _ => {}
            }
        }
        used.fetch_add(sub.nodes, std::sync::atomic::Ordering::Relaxed);
        result
    });
    let nodes_used = used.into_inner();
    let outcome = match found {
        Some(c) if word.is_empty() => ProveOutcome::Proved(c),
        Some(c) => ProveOutcome::Proved(Certificate::cremona(ClassVector::from_i128s(d, &m), word, c)),
        None => ProveOutcome::Inconclusive { nodes_used },
    };
    SearchReport {
        outcome,
        nodes_used,
        pruned: s.pruned,
    }
}

/// Certificates for `k ≤ 2`, where the necessary conditions are also
/// sufficient, as sums of scaled base vectors.
fn small_k(d: i128, m: &[i128], kind: PositivityKind) -> Option<Certificate> {
    let base = |dd: i128, mm: &[i128], kk| Certificate::base(ClassVector::from_i128s(dd, mm), kk);
    let sum = |a: Option<Certificate>, b: Option<Certificate>| Certificate::sum(a?, b?).ok();
    let zeros = vec![0; m.len()];
    match (m.len(), kind) {
        (1, PositivityKind::Nef) | (2, PositivityKind::Nef) => {
            // One slot is zero here, otherwise the two-heavy family matched.
            let t = if m.len() == 2 && m[0] == 0 { 1 } else { 0 };
            let a = m[t];
            if a == 0 || d == a {
                return None;
            }
            let mut lead = zeros.clone();
            lead[t] = a;
            sum(base(a, &lead, PositivityKind::Nef), base(d - a, &zeros, PositivityKind::Nef))
        }
        (1, PositivityKind::Ample) => {
            let a = m[0];
            if d > 2 * a {
                sum(base(2 * a, &[a], PositivityKind::Ample), base(d - 2 * a, &[0], PositivityKind::Nef))
            } else {
                // a < d < 2a: (d; a) = (d − a)·(2; 1) + (2a − d)·(1; 1).
                sum(
                    base(2 * (d - a), &[d - a], PositivityKind::Ample),
                    base(2 * a - d, &[2 * a - d], PositivityKind::Nef),
                )
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests;
