//! Candidate decompositions `v = outer #_site inner` with a base-family inner.
//!
//! Inner vectors are drawn from entries of equal value `c`:
//!
//! * tight squares `c·(s; 1^{s²})` on part of a run;
//! * `c·(⌈√R⌉; 1^R)` covering a whole run of length `R`;
//! * tight two-heavy vectors `c·(d'; A/c, B/c, 1^r)` and `c·(d'; A/c, 1^r)`
//!   with `d'² = (A/c)² + (B/c)² + r`, using larger entries `A`, `B` divisible by `c`.
//!
//! The consumed entries move to the end of the vector (a permutation when
//! they are not already there) and are replaced by one slot `degree(inner)`.

use std::ops::RangeInclusive;

use num_integer::Roots;

use crate::certificate::Certificate;
use crate::cremona::{CremonaOp, CremonaWord};
use crate::lattice::{ClassVector, PositivityKind};
use crate::scalar::descending_order;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Candidate {
    pub outer: Vec<i128>,
    pub inner_degree: i128,
    pub inner: Vec<i128>,
    /// 0-based positions of the consumed entries, increasing.
    pub consumed: Vec<usize>,
    pub tight: bool,
}

impl Candidate {
    fn new(m: &[i128], inner_degree: i128, consumed: Vec<usize>, tight: bool) -> Candidate {
        let inner: Vec<i128> = consumed.iter().map(|&i| m[i]).collect();
        let mut outer: Vec<i128> = (0..m.len())
            .filter(|i| consumed.binary_search(i).is_err())
            .map(|i| m[i])
            .collect();
        outer.push(inner_degree);
        Candidate {
            outer,
            inner_degree,
            inner,
            consumed,
            tight,
        }
    }

    /// Permutation moving the consumed entries to the end, or `None` if they
    /// already are the tail.
    pub fn permutation(&self, k: usize) -> Option<Vec<usize>> {
        let tail_start = k - self.consumed.len();
        if self.consumed.iter().enumerate().all(|(t, &i)| i == tail_start + t) {
            return None;
        }
        let mut map: Vec<usize> = (0..k)
            .filter(|i| self.consumed.binary_search(i).is_err())
            .map(|i| i + 1)
            .collect();
        map.extend(self.consumed.iter().map(|i| i + 1));
        Some(map)
    }

    /// Wraps a certificate for the outer vector into one for `(d; m)`.
    pub fn assemble(&self, d: i128, m: &[i128], outer: Certificate) -> Certificate {
        let inner = Certificate::base(ClassVector::from_i128s(self.inner_degree, &self.inner), PositivityKind::Nef)
            .expect("candidate inner vectors are base-family members");
        let glued = Certificate::glue(outer, self.outer.len(), inner).expect("inner degree fills the last slot");
        match self.permutation(m.len()) {
            None => glued,
            Some(map) => Certificate::cremona(
                ClassVector::from_i128s(d, m),
                CremonaWord::from(vec![CremonaOp::Permute(map)]),
                glued,
            ),
        }
    }
}

/// Candidates for a sorted (non-increasing) `m`, best first: tight inner
/// vectors, then more consumed entries, then smaller inner degree.
pub(crate) fn candidates_sorted(m: &[i128], degrees: &RangeInclusive<i128>) -> Vec<Candidate> {
    let mut out = Vec::new();
    let runs = runs(m);
    for &(c, start, len) in &runs {
        let run_tail = |n: usize| -> Vec<usize> { (start + len - n..start + len).collect() };
        for s in degrees.clone().filter(|&s| s >= 2) {
            let cover = (s * s) as usize;
            if cover > len {
                break;
            }
            out.push(Candidate::new(m, c * s, run_tail(cover), true));
        }
        let root = (len as u128).sqrt() as i128;
        if len >= 2 && root * root != len as i128 {
            out.push(Candidate::new(m, c * (root + 1), run_tail(len), false));
        }
        two_heavy(m, &runs, c, start, len, degrees, &mut out);
    }
    out.sort_by_key(|cand| (!cand.tight, std::cmp::Reverse(cand.consumed.len()), cand.inner_degree));
    out.dedup_by(|a, b| a.outer == b.outer && a.inner == b.inner && a.consumed == b.consumed);
    out
}

/// Maximal runs `(value, start, len)` of equal positive entries.
fn runs(m: &[i128]) -> Vec<(i128, usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < m.len() {
        let mut j = i + 1;
        while j < m.len() && m[j] == m[i] {
            j += 1;
        }
        if m[i] > 0 {
            out.push((m[i], i, j - i));
        }
        i = j;
    }
    out
}

fn two_heavy(
    m: &[i128],
    runs: &[(i128, usize, usize)],
    c: i128,
    start: usize,
    len: usize,
    degrees: &RangeInclusive<i128>,
    out: &mut Vec<Candidate>,
) {
    let max_degree = *degrees.end();
    // Heavy entries: last position of each larger run divisible by `c`, and
    // the second-to-last when the run repeats.
    let mut heavy: Vec<(i128, usize)> = Vec::new();
    for &(value, s, l) in runs {
        if value > c && value % c == 0 {
            heavy.push((value / c, s + l - 1));
            if l >= 2 {
                heavy.push((value / c, s + l - 2));
            }
        }
    }
    let mut push = |extra: &[usize], sq: i128, lower: i128| {
        for dp in lower.max(1)..=max_degree {
            let r = dp * dp - sq;
            if r > len as i128 {
                break;
            }
            if r < 1 {
                continue;
            }
            let mut consumed: Vec<usize> = extra.to_vec();
            consumed.extend(start + len - r as usize..start + len);
            consumed.sort_unstable();
            out.push(Candidate::new(m, c * dp, consumed, true));
        }
    };
    for (a, &(x, i)) in heavy.iter().enumerate() {
        push(&[i], x * x, x + 1);
        for &(y, j) in &heavy[a + 1..] {
            if j != i {
                push(&[i, j], x * x + y * y, x + y);
            }
        }
    }
}

/// A decomposition of a sorted integer vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// The sorted vector being decomposed.
    pub vector: ClassVector,
    /// Moves the consumed entries to the end, when they are not already there.
    pub permutation: Option<Vec<usize>>,
    pub outer: ClassVector,
    pub site: usize,
    pub inner: ClassVector,
}

/// Candidate decompositions of `v` after sorting its multiplicities. Vectors
/// with non-integer or oversized entries have none.
pub fn candidate_decompositions(v: &ClassVector, degrees: &RangeInclusive<i128>) -> Vec<Decomposition> {
    let Some((d, m)) = v.to_i128s() else {
        return Vec::new();
    };
    let sorted: Vec<i128> = descending_order(&m).into_iter().map(|i| m[i]).collect();
    let vector = ClassVector::from_i128s(d, &sorted);
    candidates_sorted(&sorted, degrees)
        .into_iter()
        .map(|cand| Decomposition {
            vector: vector.clone(),
            permutation: cand.permutation(sorted.len()),
            site: cand.outer.len(),
            outer: ClassVector::from_i128s(d, &cand.outer),
            inner: ClassVector::from_i128s(cand.inner_degree, &cand.inner),
        })
        .collect()
}
