//! Bounded search for decompositions anywhere in a Cremona orbit.
//!
//! The orbit is explored breadth-first on sorted representatives, applying
//! every reflection `R_ijk` and keeping members with positive degree at most
//! the degree bound and no negative entries. For each member, every candidate
//! decomposition is screened: both factors must survive the necessary
//! conditions at every step of their standard reduction. A negative answer
//! only ever means "nothing found within these bounds".

use std::collections::{HashSet, VecDeque};
use std::ops::RangeInclusive;

use crate::base::{necessary_kernel, FailReason};
use crate::cremona::reduce_kernel;
use crate::lattice::{ClassVector, PositivityKind};
use crate::scalar::descending_order;

use super::candidates::candidates_sorted;
use super::Decomposition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeLimits {
    /// Largest degree of an orbit member; `None` means twice the input degree.
    pub max_degree: Option<i128>,
    pub max_members: usize,
    pub candidate_degrees: RangeInclusive<i128>,
    /// Near-misses kept in the report; all are counted.
    pub max_near_misses: usize,
}

impl Default for ProbeLimits {
    fn default() -> Self {
        ProbeLimits {
            max_degree: None,
            max_members: 20_000,
            candidate_degrees: 2..=16,
            max_near_misses: 256,
        }
    }
}

/// A decomposition whose outer factor passes the direct necessary conditions
/// but is refuted during its reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearMiss {
    pub member: ClassVector,
    pub outer: ClassVector,
    pub inner: ClassVector,
    pub refuted_at: ClassVector,
    pub reason: FailReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeVerdict {
    NoDecompositionFoundWithinBounds,
    /// Every surviving decomposition of the first orbit member that has one.
    DecompositionFound { member: ClassVector, decompositions: Vec<Decomposition> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub members_explored: usize,
    /// True when the member cap stopped the exploration early.
    pub truncated: bool,
    pub near_miss_count: usize,
    pub near_misses: Vec<NearMiss>,
    pub verdict: ProbeVerdict,
}

enum Screen {
    Pass,
    Direct,
    Reduced(ClassVector, FailReason),
}

fn screen(d: i128, m: &[i128]) -> Screen {
    let kind = PositivityKind::Nef;
    if necessary_kernel(&d, m, kind).is_err() {
        return Screen::Direct;
    }
    if m.len() < 3 {
        return Screen::Pass;
    }
    let (mut rd, mut rm, mut ops) = (d, m.to_vec(), Vec::new());
    reduce_kernel(&mut rd, &mut rm, &mut ops);
    match necessary_kernel(&rd, &rm, kind) {
        Ok(()) => Screen::Pass,
        Err(reason) => Screen::Reduced(ClassVector::from_i128s(rd, &rm), reason),
    }
}

fn sorted(m: &mut [i128]) {
    m.sort_unstable_by(|a, b| b.cmp(a));
}

/// Probes `v` (integer entries) for decompositions across its orbit.
pub fn indecomposability_probe(v: &ClassVector, limits: &ProbeLimits) -> ProbeReport {
    let mut report = ProbeReport {
        members_explored: 0,
        truncated: false,
        near_miss_count: 0,
        near_misses: Vec::new(),
        verdict: ProbeVerdict::NoDecompositionFoundWithinBounds,
    };
    let Some((d0, m0)) = v.to_i128s() else {
        return report;
    };
    let bound = limits.max_degree.unwrap_or(2 * d0.max(0));
    let start: Vec<i128> = descending_order(&m0).into_iter().map(|i| m0[i]).collect();

    let mut seen: HashSet<(i128, Vec<i128>)> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((d0, start.clone()));
    queue.push_back((d0, start));

    while let Some((d, m)) = queue.pop_front() {
        report.members_explored += 1;
        if let Some(found) = examine(d, &m, limits, &mut report) {
            report.verdict = found;
            return report;
        }
        if m.len() < 3 {
            continue;
        }
        let mut tried = HashSet::new();
        let k = m.len();
        for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    if !tried.insert((m[i], m[j], m[l])) {
                        continue;
                    }
                    let delta = d - m[i] - m[j] - m[l];
                    if delta == 0 {
                        continue;
                    }
                    let nd = d + delta;
                    let mut nm = m.clone();
                    for t in [i, j, l] {
                        nm[t] += delta;
                    }
                    if nd <= 0 || nd > bound || nm.iter().any(|&x| x < 0) {
                        continue;
                    }
                    sorted(&mut nm);
                    if seen.len() >= limits.max_members {
                        report.truncated = true;
                        continue;
                    }
                    if seen.insert((nd, nm.clone())) {
                        queue.push_back((nd, nm));
                    }
                }
            }
        }
    }
    report
}

fn examine(d: i128, m: &[i128], limits: &ProbeLimits, report: &mut ProbeReport) -> Option<ProbeVerdict> {
    let member = ClassVector::from_i128s(d, m);
    let mut found = Vec::new();
    for cand in candidates_sorted(m, &limits.candidate_degrees) {
        let outer = ClassVector::from_i128s(d, &cand.outer);
        let inner = ClassVector::from_i128s(cand.inner_degree, &cand.inner);
        match screen(d, &cand.outer) {
            Screen::Pass => found.push(Decomposition {
                vector: member.clone(),
                permutation: cand.permutation(m.len()),
                site: cand.outer.len(),
                outer,
                inner,
            }),
            Screen::Direct => {}
            Screen::Reduced(refuted_at, reason) => {
                report.near_miss_count += 1;
                if report.near_misses.len() < limits.max_near_misses {
                    report.near_misses.push(NearMiss {
                        member: member.clone(),
                        outer,
                        inner,
                        refuted_at,
                        reason,
                    });
                }
            }
        }
    }
    (!found.is_empty()).then_some(ProbeVerdict::DecompositionFound {
        member,
        decompositions: found,
    })
}
