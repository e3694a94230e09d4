//! The Cremona group `Cr_k`: coordinate permutations together with the
//! reflections `R_ijk(η) = η + ⟨η, r_ijk⟩ r_ijk`, `r_ijk = l − e_i − e_j − e_k`.
//!
//! Indices in [`CremonaOp`] are 1-based, matching the usual `R_123` notation.

use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::lattice::{ClassVector, Rational};
use crate::scalar::{descending_order, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CremonaError {
    #[error("index {index} out of range for {len} multiplicities")]
    IndexError { index: usize, len: usize },
    #[error("reflection indices must be distinct, got ({0}, {1}, {2})")]
    RepeatedIndex(usize, usize, usize),
    #[error("reflections need at least 3 points, vector has {0}")]
    TooFewPoints(usize),
    #[error("not a permutation of 1..={len}: {map:?}")]
    InvalidPermutation { map: Vec<usize>, len: usize },
    #[error("standard reduction needs integer entries")]
    NonIntegerInput,
    #[error("word contains a sort that was never bound to a permutation")]
    UnresolvedSort,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CremonaOp {
    /// New slot `t` takes the old value at slot `map[t]`.
    Permute(Vec<usize>),
    Reflect(usize, usize, usize),
    /// Stable non-increasing sort of the multiplicities.
    SortDescending,
}

impl fmt::Display for CremonaOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CremonaOp::Permute(map) => {
                f.write_str("permute")?;
                for i in map {
                    write!(f, " {i}")?;
                }
                Ok(())
            }
            CremonaOp::Reflect(i, j, k) => write!(f, "reflect {i} {j} {k}"),
            CremonaOp::SortDescending => f.write_str("sort"),
        }
    }
}

/// A sequence of generators applied left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CremonaWord(Vec<CremonaOp>);

impl CremonaWord {
    pub fn new() -> Self {
        CremonaWord(Vec::new())
    }

    pub fn ops(&self) -> &[CremonaOp] {
        &self.0
    }

    pub fn push(&mut self, op: CremonaOp) {
        self.0.push(op);
    }

    pub fn extend(&mut self, other: CremonaWord) {
        self.0.extend(other.0);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_ops(self) -> Vec<CremonaOp> {
        self.0
    }
}

impl From<Vec<CremonaOp>> for CremonaWord {
    fn from(ops: Vec<CremonaOp>) -> Self {
        CremonaWord(ops)
    }
}

impl FromIterator<CremonaOp> for CremonaWord {
    fn from_iter<I: IntoIterator<Item = CremonaOp>>(iter: I) -> Self {
        CremonaWord(iter.into_iter().collect())
    }
}

fn check_index(i: usize, len: usize) -> Result<usize, CremonaError> {
    if i == 0 || i > len {
        Err(CremonaError::IndexError { index: i, len })
    } else {
        Ok(i - 1)
    }
}

pub(crate) fn check_permutation(map: &[usize], len: usize) -> Result<(), CremonaError> {
    let bad = || CremonaError::InvalidPermutation {
        map: map.to_vec(),
        len,
    };
    if map.len() != len {
        return Err(bad());
    }
    let mut seen = vec![false; len];
    for &i in map {
        if i == 0 || i > len || seen[i - 1] {
            return Err(bad());
        }
        seen[i - 1] = true;
    }
    Ok(())
}

pub(crate) fn reflect_in_place<T: Scalar>(d: &mut T, m: &mut [T], a: usize, b: usize, c: usize) {
    let delta = d.clone() - m[a].clone() - m[b].clone() - m[c].clone();
    *d = d.clone() + delta.clone();
    for i in [a, b, c] {
        m[i] = m[i].clone() + delta.clone();
    }
}

fn permute_in_place<T: Clone>(m: &mut Vec<T>, map: &[usize]) {
    *m = map.iter().map(|&i| m[i - 1].clone()).collect();
}

/// Applies one generator and returns the op with any sort resolved to the
/// concrete permutation it realized.
pub(crate) fn apply_in_place<T: Scalar>(
    op: &CremonaOp,
    d: &mut T,
    m: &mut Vec<T>,
) -> Result<CremonaOp, CremonaError> {
    match op {
        CremonaOp::Permute(map) => {
            check_permutation(map, m.len())?;
            permute_in_place(m, map);
            Ok(op.clone())
        }
        CremonaOp::Reflect(i, j, k) => {
            if m.len() < 3 {
                return Err(CremonaError::TooFewPoints(m.len()));
            }
            let (a, b, c) = (
                check_index(*i, m.len())?,
                check_index(*j, m.len())?,
                check_index(*k, m.len())?,
            );
            if a == b || b == c || a == c {
                return Err(CremonaError::RepeatedIndex(*i, *j, *k));
            }
            reflect_in_place(d, m, a, b, c);
            Ok(op.clone())
        }
        CremonaOp::SortDescending => {
            let map: Vec<usize> = descending_order(m).into_iter().map(|i| i + 1).collect();
            permute_in_place(m, &map);
            Ok(CremonaOp::Permute(map))
        }
    }
}

pub fn apply_op(op: &CremonaOp, v: &ClassVector) -> Result<ClassVector, CremonaError> {
    let (mut d, mut m) = v.clone().into_parts();
    apply_in_place(op, &mut d, &mut m)?;
    Ok(ClassVector::new(d, m))
}

pub fn apply_word(w: &CremonaWord, v: &ClassVector) -> Result<ClassVector, CremonaError> {
    apply_word_resolved(w, v).map(|(v, _)| v)
}

/// Applies a word and also returns it with every sort replaced by the
/// permutation it realized on this input.
pub fn apply_word_resolved(
    w: &CremonaWord,
    v: &ClassVector,
) -> Result<(ClassVector, CremonaWord), CremonaError> {
    let (mut d, mut m) = v.clone().into_parts();
    let mut resolved = CremonaWord::new();
    for op in w.ops() {
        resolved.push(apply_in_place(op, &mut d, &mut m)?);
    }
    Ok((ClassVector::new(d, m), resolved))
}

pub fn invert_permutation(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (t, &i) in map.iter().enumerate() {
        inv[i - 1] = t + 1;
    }
    inv
}

pub fn invert_word(w: &CremonaWord) -> Result<CremonaWord, CremonaError> {
    w.ops()
        .iter()
        .rev()
        .map(|op| match op {
            CremonaOp::Permute(map) => Ok(CremonaOp::Permute(invert_permutation(map))),
            CremonaOp::Reflect(..) => Ok(op.clone()),
            CremonaOp::SortDescending => Err(CremonaError::UnresolvedSort),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionStatus {
    ReducedNonNegative,
    NegativeEntry,
    NonPositiveDegree,
    TooFewPoints,
}

impl fmt::Display for ReductionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ReductionStatus::ReducedNonNegative => "ReducedNonNegative",
            ReductionStatus::NegativeEntry => "NegativeEntry",
            ReductionStatus::NonPositiveDegree => "NonPositiveDegree",
            ReductionStatus::TooFewPoints => "TooFewPoints",
        };
        f.write_str(s)
    }
}

/// Sort, then reflect in the three largest slots while `d − m_1 − m_2 − m_3 < 0`.
/// Identity sorts are not recorded.
pub(crate) fn reduce_kernel<T: Scalar>(
    d: &mut T,
    m: &mut Vec<T>,
    ops: &mut Vec<CremonaOp>,
) -> ReductionStatus {
    if m.len() < 3 {
        return ReductionStatus::TooFewPoints;
    }
    loop {
        let order = descending_order(m);
        if order.iter().enumerate().any(|(t, &i)| t != i) {
            let map: Vec<usize> = order.into_iter().map(|i| i + 1).collect();
            permute_in_place(m, &map);
            ops.push(CremonaOp::Permute(map));
        }
        if m.iter().any(|x| *x < T::zero()) {
            return ReductionStatus::NegativeEntry;
        }
        if *d <= T::zero() {
            return ReductionStatus::NonPositiveDegree;
        }
        let delta = d.clone() - m[0].clone() - m[1].clone() - m[2].clone();
        if delta >= T::zero() {
            return ReductionStatus::ReducedNonNegative;
        }
        reflect_in_place(d, m, 0, 1, 2);
        ops.push(CremonaOp::Reflect(1, 2, 3));
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub op: CremonaOp,
    pub result: ClassVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub final_vector: ClassVector,
    /// Forward word: `apply_word(word, input) == final_vector`.
    pub word: CremonaWord,
    pub status: ReductionStatus,
    pub steps: Vec<ReductionStep>,
}

/// Degree-reduction by repeated sorting and `R_123`, on integer vectors.
pub fn standard_reduce(v: &ClassVector) -> Result<Reduction, CremonaError> {
    if !v.is_integral() {
        return Err(CremonaError::NonIntegerInput);
    }
    let (mut d, mut m) = v.clone().into_parts();
    let mut ops = Vec::new();
    let status = reduce_kernel(&mut d, &mut m, &mut ops);
    let mut steps = Vec::with_capacity(ops.len());
    let mut cur = v.clone();
    for op in &ops {
        cur = apply_op(op, &cur)?;
        steps.push(ReductionStep {
            op: op.clone(),
            result: cur.clone(),
        });
    }
    let final_vector = ClassVector::new(d, m);
    debug_assert_eq!(cur, final_vector);
    Ok(Reduction {
        final_vector,
        word: CremonaWord(ops),
        status,
        steps,
    })
}

/// Clears denominators, then runs [`standard_reduce`] on `c·v`. Returns `c`.
pub fn reduce_scaled(v: &ClassVector) -> Result<(Rational, Reduction), CremonaError> {
    let lcm = v
        .entries()
        .fold(num_bigint::BigInt::one(), |acc, x| {
            num_integer::Integer::lcm(&acc, x.denom())
        });
    let c = Rational::from_integer(lcm);
    let scaled = v.scale_unchecked(&c);
    Ok((c, standard_reduce(&scaled)?))
}
