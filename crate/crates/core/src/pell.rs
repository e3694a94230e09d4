//! Continued fractions of `√N`, solutions of `d² − N·m² = 1`, and the
//! homogeneous targets `(d; m^N)` built from them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{ClassVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PellError {
    #[error("PerfectSquare: {0} is a perfect square")]
    PerfectSquare(u64),
    #[error("OutOfConjectureRange: N = {0} must be square-free and greater than 9")]
    OutOfConjectureRange(u64),
    #[error("NotHomogeneous: {0} is not of the form (d; m^N) with d > 0, m > 0, N >= 1")]
    NotHomogeneous(String),
}

/// `√N = [a0; period, period, ...]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion {
    pub a0: u64,
    pub period: Vec<u64>,
}

impl fmt::Display for CfExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.a0)?;
        for a in &self.period {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PellSolution {
    pub d: BigInt,
    pub m: BigInt,
}

pub fn integer_sqrt(n: u64) -> u64 {
    n.sqrt()
}

pub fn is_square_free(n: u64) -> bool {
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

pub fn cf_sqrt(n: u64) -> Result<CfExpansion, PellError> {
    let a0 = integer_sqrt(n);
    if a0 * a0 == n {
        return Err(PellError::PerfectSquare(n));
    }
    let (n, a0w) = (n as u128, a0 as u128);
    let (mut m, mut d, mut a) = (0u128, 1u128, a0w);
    let mut period = Vec::new();
    while a != 2 * a0w {
        m = d * a - m;
        d = (n - m * m) / d;
        a = (a0w + m) / d;
        period.push(a as u64);
    }
    Ok(CfExpansion { a0, period })
}

/// Value `p/q` of `[a_0; a_1, ..., a_n]`, from `p_k = a_k p_{k−1} + p_{k−2}`.
pub fn convergent(terms: &[u64]) -> Rational {
    let (p, q) = convergent_parts(terms);
    Rational::new(p, q)
}

fn convergent_parts(terms: &[u64]) -> (BigInt, BigInt) {
    assert!(!terms.is_empty(), "a continued fraction needs at least one term");
    let (mut p, mut p_prev) = (BigInt::one(), BigInt::zero());
    let (mut q, mut q_prev) = (BigInt::zero(), BigInt::one());
    for &a in terms {
        let a = BigInt::from(a);
        let np = &a * &p + &p_prev;
        let nq = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, np);
        q_prev = std::mem::replace(&mut q, nq);
    }
    (p, q)
}

/// `a0, (period)^r, a_1..a_{n−1}`.
fn truncated_terms(cf: &CfExpansion, r: usize) -> Vec<u64> {
    let n = cf.period.len();
    let mut terms = Vec::with_capacity(1 + n * (r + 1));
    terms.push(cf.a0);
    for _ in 0..r {
        terms.extend_from_slice(&cf.period);
    }
    terms.extend_from_slice(&cf.period[..n - 1]);
    terms
}

/// Minimal positive solution of `d² − N·m² = 1`.
pub fn pell_fundamental(n: u64) -> Result<PellSolution, PellError> {
    Ok(pell_solutions(n, 1)?.remove(0))
}

/// The first `count` positive solutions in increasing order.
pub fn pell_solutions(n: u64, count: usize) -> Result<Vec<PellSolution>, PellError> {
    let cf = cf_sqrt(n)?;
    let odd = cf.period.len() % 2 == 1;
    let rs = (0..).map(|t| if odd { 2 * t + 1 } else { t });
    Ok(rs
        .take(count)
        .map(|r| {
            let (d, m) = convergent_parts(&truncated_terms(&cf, r));
            PellSolution { d, m }
        })
        .collect())
}

/// `(d; m^N)` for the fundamental solution; `N` must be square-free and above 9.
pub fn conjecture_target(n: u64) -> Result<ClassVector, PellError> {
    if n <= 9 || !is_square_free(n) {
        return Err(PellError::OutOfConjectureRange(n));
    }
    let s = pell_fundamental(n)?;
    Ok(ClassVector::homogeneous(
        Rational::from_integer(s.d),
        Rational::from_integer(s.m),
        n as usize,
    ))
}

/// `(d² − N·m²)/d²` for a homogeneous `(d; m^N)`: the remainder bound
/// implied by the vector being nef.
pub fn remainder_bound(v: &ClassVector) -> Result<Rational, PellError> {
    let not = || PellError::NotHomogeneous(v.to_string());
    let m = v.mults().first().ok_or_else(not)?;
    if !m.is_positive() || !v.degree().is_positive() || v.mults().iter().any(|x| x != m) {
        return Err(not());
    }
    let d2 = v.degree() * v.degree();
    Ok(v.self_intersection() / d2)
}
