//! Base families of nef and ample vectors, cheap necessary conditions used
//! for pruning and disproof, and a (−1)-class oracle for `k ≤ 8`.
//!
//! The families, after dividing out the content and sorting:
//!
//! * pullback `(d; 0^k)` with `d ≥ 0`, nef (ample only when `k = 0`, `d > 0`);
//! * square `(d; 1^r, 0^s)`, nef iff `d² ≥ r`, ample iff `d² > r` and `s = 0`;
//! * two-heavy `(d; m1, m2, 1^r, 0^s)`, nef iff `d ≥ m1 + m2` and
//!   `d² ≥ m1² + m2² + r`, ample iff both are strict and `s = 0`.
//!
//! The ample two-heavy rule is flagged `remark_based` so strict verification
//! can refuse it.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::lattice::{ClassVector, PositivityKind, Rational};
use crate::scalar::{descending_order, self_intersection, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Pullback,
    Square,
    TwoHeavy,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Pullback => "pullback",
            Family::Square => "square",
            Family::TwoHeavy => "two-heavy",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "pullback" => Some(Family::Pullback),
            "square" => Some(Family::Square),
            "two-heavy" => Some(Family::TwoHeavy),
            _ => None,
        }
    }
}

/// Parameters of the normalized family vector `(degree; m1, m2, 1^ones, 0^zeros)`.
/// `m1`/`m2` are only meaningful for [`Family::TwoHeavy`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FamilyParams {
    pub degree: i128,
    pub m1: i128,
    pub m2: i128,
    pub ones: usize,
    pub zeros: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseWitness {
    pub family: Family,
    pub scale: Rational,
    /// Sorting permutation: slot `t` of the sorted vector is slot
    /// `permutation[t]` (1-based) of the witnessed vector.
    pub permutation: Vec<usize>,
    pub params: FamilyParams,
    pub remark_based: bool,
}

impl BaseWitness {
    /// The normalized, sorted family member.
    pub fn family_vector(&self) -> ClassVector {
        let p = &self.params;
        let mut mults = Vec::new();
        if self.family == Family::TwoHeavy {
            mults.push(p.m1);
            mults.push(p.m2);
        }
        mults.extend(std::iter::repeat(1).take(p.ones));
        mults.extend(std::iter::repeat(0).take(p.zeros));
        ClassVector::from_i128s(p.degree, &mults)
    }

    /// Scale and un-permute the family member. Returns `None` if the stored
    /// permutation is malformed.
    pub fn rebuild(&self) -> Option<ClassVector> {
        let sorted = self.family_vector().scale_unchecked(&self.scale);
        let k = sorted.len();
        if crate::cremona::check_permutation(&self.permutation, k).is_err() {
            return None;
        }
        let mut mults = vec![Rational::zero(); k];
        for (t, &i) in self.permutation.iter().enumerate() {
            mults[i - 1] = sorted.mults()[t].clone();
        }
        Some(ClassVector::new(sorted.degree().clone(), mults))
    }
}

/// Normalizes to coprime integers and returns `(content, degree, mults)`.
fn normalize(v: &ClassVector) -> Option<(Rational, i128, Vec<i128>)> {
    let Some(c) = v.content() else {
        return Some((Rational::from_integer(1.into()), 0, vec![0; v.len()]));
    };
    let conv = |x: &Rational| -> Option<i128> {
        let q = x / &c;
        debug_assert!(q.is_integer());
        q.numer().to_i128()
    };
    let d = conv(v.degree())?;
    let m = v.mults().iter().map(conv).collect::<Option<Vec<_>>>()?;
    Some((c, d, m))
}

/// Matches `v` against the base families for `kind`. Entries too large for
/// `i128` after normalization never match.
pub fn match_base(v: &ClassVector, kind: PositivityKind) -> Option<BaseWitness> {
    let (c, d, m) = normalize(v)?;
    match_normalized(d, &m, c, kind)
}

/// Integer entry point: divides out the gcd itself.
pub(crate) fn match_ints(d: i128, m: &[i128], kind: PositivityKind) -> Option<BaseWitness> {
    let g = m.iter().fold(d.abs(), |acc, x| acc.gcd(x));
    if g == 0 {
        return match_normalized(0, m, Rational::from_integer(1.into()), kind);
    }
    let nm: Vec<i128> = m.iter().map(|x| x / g).collect();
    match_normalized(d / g, &nm, Rational::from_integer(BigInt::from(g)), kind)
}

fn match_normalized(d: i128, m: &[i128], scale: Rational, kind: PositivityKind) -> Option<BaseWitness> {
    if d < 0 || m.iter().any(|&x| x < 0) {
        return None;
    }
    let order = descending_order(m);
    let sorted: Vec<i128> = order.iter().map(|&i| m[i]).collect();
    let permutation: Vec<usize> = order.iter().map(|&i| i + 1).collect();
    let k = sorted.len();
    let zeros = sorted.iter().rev().take_while(|&&x| x == 0).count();
    let nonzero = &sorted[..k - zeros];
    let witness = |family, m1, m2, ones, remark_based| BaseWitness {
        family,
        scale: scale.clone(),
        permutation: permutation.clone(),
        params: FamilyParams {
            degree: d,
            m1,
            m2,
            ones,
            zeros,
        },
        remark_based,
    };
    let dd = d.checked_mul(d)?;

    if nonzero.is_empty() {
        let ok = match kind {
            PositivityKind::Nef => true,
            PositivityKind::Ample => k == 0 && d > 0,
        };
        return ok.then(|| witness(Family::Pullback, 0, 0, 0, false));
    }

    if nonzero.iter().all(|&x| x == 1) {
        let r = nonzero.len() as i128;
        let ok = match kind {
            PositivityKind::Nef => dd >= r,
            PositivityKind::Ample => dd > r && zeros == 0,
        };
        if ok {
            return Some(witness(Family::Square, 0, 0, nonzero.len(), false));
        }
    }

    if nonzero.len() >= 2 && nonzero[2..].iter().all(|&x| x == 1) {
        let (m1, m2) = (nonzero[0], nonzero[1]);
        let r = (nonzero.len() - 2) as i128;
        let rhs = m1.checked_mul(m1)?.checked_add(m2.checked_mul(m2)?)?.checked_add(r)?;
        let (ok, remark) = match kind {
            PositivityKind::Nef => (d >= m1 + m2 && dd >= rhs, false),
            PositivityKind::Ample => (d > m1 + m2 && dd > rhs && zeros == 0, true),
        };
        if ok {
            return Some(witness(Family::TwoHeavy, m1, m2, nonzero.len() - 2, remark));
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    /// Multiplicity below zero (nef) or not above zero (ample).
    Multiplicity { slot: usize, value: Rational },
    Degree { degree: Rational },
    SlotExceedsDegree { slot: usize, value: Rational, degree: Rational },
    PairExceedsDegree { first: Rational, second: Rational, degree: Rational },
    SelfIntersection { value: Rational },
}

/// Why a vector cannot be nef (or ample). Failing a necessary condition is a
/// disproof for the stated kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FailReason {
    pub kind: PositivityKind,
    pub violation: Violation,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lt, ge) = match self.kind {
            PositivityKind::Nef => ("<", "0"),
            PositivityKind::Ample => ("<=", "0"),
        };
        match &self.violation {
            Violation::Multiplicity { slot, value } => {
                write!(f, "multiplicity m_{slot} = {value} {lt} {ge}")
            }
            Violation::Degree { degree } => write!(f, "degree {degree} {lt} 0"),
            Violation::SlotExceedsDegree { slot, value, degree } => {
                write!(f, "{degree} {lt} m_{slot} = {value}")
            }
            Violation::PairExceedsDegree { first, second, degree } => {
                write!(f, "{degree} {lt} {first}+{second}")
            }
            Violation::SelfIntersection { value } => {
                write!(f, "self-intersection {value} {lt} 0")
            }
        }
    }
}

pub(crate) fn necessary_kernel<T: Scalar>(d: &T, m: &[T], kind: PositivityKind) -> Result<(), FailReason> {
    let zero = T::zero();
    let strict = kind == PositivityKind::Ample;
    // `bad(a, b)` is `a < b` for nef and `a <= b` for ample.
    let bad = |a: &T, b: &T| if strict { a <= b } else { a < b };
    let fail = |violation| Err(FailReason { kind, violation });
    for (i, x) in m.iter().enumerate() {
        if bad(x, &zero) {
            return fail(Violation::Multiplicity {
                slot: i + 1,
                value: x.to_rational(),
            });
        }
    }
    if bad(d, &zero) {
        return fail(Violation::Degree {
            degree: d.to_rational(),
        });
    }
    let (mut top, mut second): (Option<usize>, Option<usize>) = (None, None);
    for (i, x) in m.iter().enumerate() {
        if top.map_or(true, |t| *x > m[t]) {
            second = top;
            top = Some(i);
        } else if second.map_or(true, |s| *x > m[s]) {
            second = Some(i);
        }
    }
    if let Some(t) = top {
        if bad(d, &m[t]) {
            return fail(Violation::SlotExceedsDegree {
                slot: t + 1,
                value: m[t].to_rational(),
                degree: d.to_rational(),
            });
        }
    }
    if let (Some(t), Some(s)) = (top, second) {
        if bad(d, &(m[t].clone() + m[s].clone())) {
            return fail(Violation::PairExceedsDegree {
                first: m[t].to_rational(),
                second: m[s].to_rational(),
                degree: d.to_rational(),
            });
        }
    }
    let si = self_intersection(d, m);
    if bad(&si, &zero) {
        return fail(Violation::SelfIntersection {
            value: si.to_rational(),
        });
    }
    Ok(())
}

/// Necessary conditions from pairing with the effective classes `e_i`, `l`,
/// `l − e_i`, `l − e_i − e_j` and from `v·v ≥ 0`. `Ok` is not a proof.
pub fn necessary_conditions(v: &ClassVector, kind: PositivityKind) -> Result<(), FailReason> {
    necessary_kernel(v.degree(), v.mults(), kind)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseError {
    #[error("the (-1)-class oracle only covers k <= 8, got k = {0}")]
    KTooLarge(usize),
    #[error("the oracle needs integer entries")]
    NonIntegerInput,
}

pub(crate) const ORACLE_MAX_K: usize = 8;
const BOX_DEGREE: i64 = 6;
const BOX_MULT: i64 = 3;

/// All integer classes `(d; m)` with `d ≤ max_degree`, `|m_j| ≤ max_mult`,
/// `c·c = −1` and `3d − Σm = 1`, each as `[d, m_1, ..., m_k]`.
pub(crate) fn enumerate_minus_one(k: usize, max_degree: i64, max_mult: i64) -> Vec<Vec<i64>> {
    fn rec(
        slot: usize,
        k: usize,
        squares_left: i64,
        sum_left: i64,
        max_mult: i64,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        let remaining = (k - slot) as i64;
        if remaining == 0 {
            if squares_left == 0 && sum_left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // Cauchy–Schwarz: (Σm)² ≤ r·Σm² on the remaining slots.
        if sum_left * sum_left > remaining * squares_left {
            return;
        }
        for x in -max_mult..=max_mult {
            if x * x > squares_left {
                continue;
            }
            cur.push(x);
            rec(slot + 1, k, squares_left - x * x, sum_left - x, max_mult, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for d in 0..=max_degree {
        let mut cur = vec![d];
        rec(0, k, d * d + 1, 3 * d - 1, max_mult, &mut cur, &mut out);
    }
    out
}

fn minus_one_table(k: usize) -> &'static [Vec<i64>] {
    const INIT: OnceLock<Vec<Vec<i64>>> = OnceLock::new();
    static CACHE: [OnceLock<Vec<Vec<i64>>>; ORACLE_MAX_K + 1] = [INIT; ORACLE_MAX_K + 1];
    CACHE[k].get_or_init(|| enumerate_minus_one(k, BOX_DEGREE, BOX_MULT))
}

/// The (−1)-classes on the blow-up at `k ≤ 8` general points.
pub fn minus_one_classes(k: usize) -> Result<Vec<ClassVector>, BaseError> {
    if k > ORACLE_MAX_K {
        return Err(BaseError::KTooLarge(k));
    }
    Ok(minus_one_table(k)
        .iter()
        .map(|c| ClassVector::from_ints(c[0], &c[1..]))
        .collect())
}

/// Independent nef test for `k ≤ 8`: `v` pairs non-negatively with every
/// (−1)-class, plus `l` and `l − e_1` when `k ≤ 1`. Test-only ground truth.
pub fn delpezzo_nef_oracle(v: &ClassVector) -> Result<bool, BaseError> {
    let k = v.len();
    if k > ORACLE_MAX_K {
        return Err(BaseError::KTooLarge(k));
    }
    let (d, m) = v.to_i128s().ok_or(BaseError::NonIntegerInput)?;
    let pair = |c: &[i64]| -> i128 {
        c[1..]
            .iter()
            .zip(&m)
            .fold(d * c[0] as i128, |acc, (&x, &y)| acc - x as i128 * y)
    };
    if k <= 1 {
        if d < 0 {
            return Ok(false);
        }
        if k == 1 && d - m[0] < 0 {
            return Ok(false);
        }
    }
    Ok(minus_one_table(k).iter().all(|c| pair(c) >= 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(s: &str) -> ClassVector {
        s.parse().unwrap()
    }

    #[test]
    fn match_examples() {
        let w = match_base(&v("9;3^9"), PositivityKind::Nef).unwrap();
        assert_eq!(w.family, Family::Square);
        assert_eq!(w.scale, int(3));
        assert_eq!(w.params.ones, 9);

        let w = match_base(&v("3;2,1,1,1,1,0"), PositivityKind::Nef).unwrap();
        assert_eq!(w.family, Family::TwoHeavy);
        assert_eq!((w.params.m1, w.params.m2, w.params.ones, w.params.zeros), (2, 1, 3, 1));

        assert_eq!(match_base(&v("2;1^5"), PositivityKind::Nef), None);
    }

    #[test]
    fn match_kinds() {
        assert_eq!(match_base(&v("1;0^10"), PositivityKind::Nef).unwrap().family, Family::Pullback);
        assert_eq!(match_base(&v("1;0^10"), PositivityKind::Ample), None);
        assert!(match_base(&v("3;"), PositivityKind::Ample).is_some());
        assert!(match_base(&v("0;0,0"), PositivityKind::Nef).is_some());
        assert!(match_base(&v("3;1^8"), PositivityKind::Ample).is_some());
        assert_eq!(match_base(&v("3;1^9"), PositivityKind::Ample), None);
        assert!(match_base(&v("3;1^9"), PositivityKind::Nef).is_some());
        assert_eq!(match_base(&v("3;1^8,0"), PositivityKind::Ample), None);
        let w = match_base(&v("5;2,1,1,1"), PositivityKind::Ample).unwrap();
        assert!(w.remark_based);
        assert!(!match_base(&v("5;2,1,1,1"), PositivityKind::Nef).unwrap().remark_based);
        assert_eq!(match_base(&v("3;-1,1"), PositivityKind::Nef), None);
    }

    #[test]
    fn rational_vectors_normalize() {
        let w = match_base(&v("3/2;1/2^9"), PositivityKind::Nef).unwrap();
        assert_eq!(w.family, Family::Square);
        assert_eq!(w.scale, Rational::new(1.into(), 2.into()));
        assert_eq!(w.rebuild().unwrap(), v("3/2;1/2^9"));
    }

    #[test]
    fn necessary_examples() {
        let r = necessary_conditions(&v("10;3^2,9"), PositivityKind::Nef).unwrap_err();
        assert!(matches!(r.violation, Violation::PairExceedsDegree { .. }));
        assert_eq!(r.to_string(), "10 < 9+3");
        let r = necessary_conditions(&v("2;1^5"), PositivityKind::Nef).unwrap_err();
        assert_eq!(r.violation, Violation::SelfIntersection { value: int(-1) });
        assert!(necessary_conditions(&v("170;39^19"), PositivityKind::Nef).is_ok());
        assert!(necessary_conditions(&v("1;0^3"), PositivityKind::Nef).is_ok());
        assert!(necessary_conditions(&v("1;0^3"), PositivityKind::Ample).is_err());
        assert!(necessary_conditions(&v("3;1,-1,0"), PositivityKind::Nef).is_err());
        assert!(necessary_conditions(&v("-1;"), PositivityKind::Nef).is_err());
        assert!(necessary_conditions(&v("2;3"), PositivityKind::Nef).is_err());
    }

    #[test]
    fn minus_one_counts() {
        let expected = [0, 1, 3, 6, 10, 16, 27, 56, 240];
        for k in 0..=8 {
            assert_eq!(minus_one_classes(k).unwrap().len(), expected[k], "k = {k}");
        }
        let two = minus_one_classes(2).unwrap();
        assert!(two.contains(&v("1;1,1")));
        assert!(two.contains(&v("0;-1,0")));
        assert_eq!(minus_one_classes(9), Err(BaseError::KTooLarge(9)));
    }

    #[test]
    fn minus_one_box_is_sufficient() {
        for k in 0..=8 {
            let small = enumerate_minus_one(k, BOX_DEGREE, BOX_MULT);
            let large = enumerate_minus_one(k, BOX_DEGREE + 2, BOX_MULT + 1);
            assert_eq!(small.len(), large.len(), "k = {k}");
        }
    }

    #[test]
    fn oracle_examples() {
        assert!(delpezzo_nef_oracle(&v("3;1^8")).unwrap());
        assert!(!delpezzo_nef_oracle(&v("3;2,2")).unwrap());
        assert!(!delpezzo_nef_oracle(&v("1;1,1")).unwrap());
        assert!(delpezzo_nef_oracle(&v("1;")).unwrap());
        assert!(!delpezzo_nef_oracle(&v("2;3")).unwrap());
        assert!(delpezzo_nef_oracle(&v("2;2")).unwrap());
        assert_eq!(delpezzo_nef_oracle(&v("3;1^9")), Err(BaseError::KTooLarge(9)));
        assert_eq!(delpezzo_nef_oracle(&v("3/2;1")), Err(BaseError::NonIntegerInput));
    }

    #[test]
    fn soundness_against_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..10_000 {
            let k = rng.gen_range(0..=8);
            let d = rng.gen_range(-2..=12);
            let m: Vec<i64> = (0..k).map(|_| rng.gen_range(-1..=8)).collect();
            let x = ClassVector::from_ints(d, &m);
            let truth = delpezzo_nef_oracle(&x).unwrap();
            if let Some(w) = match_base(&x, PositivityKind::Nef) {
                assert!(truth, "{x} matched {:?} but oracle says not nef", w.family);
                assert_eq!(w.rebuild().unwrap(), x);
            }
            if let Some(w) = match_base(&x, PositivityKind::Ample) {
                assert!(truth, "{x} matched ample {:?}", w.family);
                assert_eq!(w.rebuild().unwrap(), x);
            }
            if necessary_conditions(&x, PositivityKind::Nef).is_err() {
                assert!(!truth, "{x} failed necessary conditions but oracle says nef");
            }
        }
    }

    #[test]
    fn integer_entry_point_agrees() {
        let x = v("78;39^4");
        let (d, m) = x.to_i128s().unwrap();
        assert_eq!(match_ints(d, &m, PositivityKind::Nef), match_base(&x, PositivityKind::Nef));
    }
}
