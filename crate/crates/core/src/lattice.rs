//! Lattice vectors `(d; m_1, ..., m_k)` in the hyperbolic lattice `H_k`.
//!
//! A vector stands for the class `d·l − Σ m_j e_j` with `⟨l,l⟩ = 1`,
//! `⟨e_i,e_j⟩ = −δ_ij` and `⟨l,e_j⟩ = 0`. All entries are exact rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number in canonical reduced form.
pub type Rational = BigRational;

/// Upper bound on a single `m^r` repetition count accepted by the parser.
const MAX_REPEAT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("length mismatch: {left} vs {right} multiplicities")]
    LengthMismatch { left: usize, right: usize },
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScalar(Rational),
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
}

/// Nef or ample. `Ample` is the stronger claim, so the derived order is
/// `Nef < Ample`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PositivityKind {
    Nef,
    Ample,
}

impl PositivityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PositivityKind::Nef => "nef",
            PositivityKind::Ample => "ample",
        }
    }

    /// True when a claim of kind `self` also justifies a claim of kind `other`.
    pub fn implies(self, other: PositivityKind) -> bool {
        self >= other
    }
}

impl fmt::Display for PositivityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PositivityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nef" => Ok(PositivityKind::Nef),
            "ample" => Ok(PositivityKind::Ample),
            other => Err(format!("unknown positivity kind `{other}`")),
        }
    }
}

/// A class `(d; m_1, ..., m_k)`. No sign constraints are imposed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassVector {
    degree: Rational,
    mults: Vec<Rational>,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl ClassVector {
    pub fn new(degree: Rational, mults: Vec<Rational>) -> Self {
        ClassVector { degree, mults }
    }

    pub fn from_ints(degree: i64, mults: &[i64]) -> Self {
        ClassVector {
            degree: int(degree),
            mults: mults.iter().map(|&m| int(m)).collect(),
        }
    }

    /// `(d; m^count)`.
    pub fn homogeneous(degree: Rational, mult: Rational, count: usize) -> Self {
        ClassVector {
            degree,
            mults: vec![mult; count],
        }
    }

    /// The vector with degree 0 and a single multiplicity 1 in slot `i` (1-based).
    pub fn exceptional(k: usize, i: usize) -> Self {
        let mut mults = vec![Rational::zero(); k];
        mults[i - 1] = Rational::one();
        ClassVector {
            degree: Rational::zero(),
            mults,
        }
    }

    pub fn degree(&self) -> &Rational {
        &self.degree
    }

    pub fn mults(&self) -> &[Rational] {
        &self.mults
    }

    /// Multiplicity at a 1-based slot.
    pub fn mult(&self, slot: usize) -> Option<&Rational> {
        slot.checked_sub(1).and_then(|i| self.mults.get(i))
    }

    /// Number of multiplicity slots `k`.
    pub fn len(&self) -> usize {
        self.mults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mults.is_empty()
    }

    pub fn into_parts(self) -> (Rational, Vec<Rational>) {
        (self.degree, self.mults)
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        std::iter::once(&self.degree).chain(self.mults.iter())
    }

    pub fn is_integral(&self) -> bool {
        self.entries().all(|x| x.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.entries().all(|x| x.is_zero())
    }

    pub fn pairing(&self, other: &ClassVector) -> Result<Rational, LatticeError> {
        self.check_len(other)?;
        let mut acc = &self.degree * &other.degree;
        for (a, b) in self.mults.iter().zip(&other.mults) {
            acc -= a * b;
        }
        Ok(acc)
    }

    pub fn self_intersection(&self) -> Rational {
        self.mults
            .iter()
            .fold(&self.degree * &self.degree, |acc, m| acc - m * m)
    }

    /// Pairing with the anticanonical class `(3; 1^k)`: `3d − Σ m_j`.
    pub fn anticanonical_pairing(&self) -> Rational {
        self.mults
            .iter()
            .fold(&self.degree * int(3), |acc, m| acc - m)
    }

    pub fn scale(&self, c: &Rational) -> Result<ClassVector, LatticeError> {
        if !c.is_positive() {
            return Err(LatticeError::NonPositiveScalar(c.clone()));
        }
        Ok(self.scale_unchecked(c))
    }

    pub(crate) fn scale_unchecked(&self, c: &Rational) -> ClassVector {
        ClassVector {
            degree: &self.degree * c,
            mults: self.mults.iter().map(|m| m * c).collect(),
        }
    }

    pub fn add(&self, other: &ClassVector) -> Result<ClassVector, LatticeError> {
        self.check_len(other)?;
        Ok(ClassVector {
            degree: &self.degree + &other.degree,
            mults: self
                .mults
                .iter()
                .zip(&other.mults)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Appends `count` zero multiplicities.
    pub fn pad_with_zeros(&self, count: usize) -> ClassVector {
        let mut mults = self.mults.clone();
        mults.extend(std::iter::repeat(Rational::zero()).take(count));
        ClassVector {
            degree: self.degree.clone(),
            mults,
        }
    }

    /// The positive factor `c` such that `self / c` has coprime integer
    /// entries. Returns `None` for the zero vector.
    pub fn content(&self) -> Option<Rational> {
        let lcm = self
            .entries()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let gcd = self.entries().fold(BigInt::zero(), |acc, x| {
            acc.gcd(&(x.numer() * (&lcm / x.denom())))
        });
        if gcd.is_zero() {
            None
        } else {
            Some(Rational::new(gcd, lcm))
        }
    }

    /// Integer entries as `i128`, or `None` if any entry is fractional or too large.
    pub fn to_i128s(&self) -> Option<(i128, Vec<i128>)> {
        fn conv(x: &Rational) -> Option<i128> {
            if x.is_integer() {
                x.numer().to_i128()
            } else {
                None
            }
        }
        let d = conv(&self.degree)?;
        let m = self.mults.iter().map(conv).collect::<Option<Vec<_>>>()?;
        Some((d, m))
    }

    pub fn from_i128s(degree: i128, mults: &[i128]) -> ClassVector {
        ClassVector {
            degree: Rational::from_integer(BigInt::from(degree)),
            mults: mults
                .iter()
                .map(|&m| Rational::from_integer(BigInt::from(m)))
                .collect(),
        }
    }

    fn check_len(&self, other: &ClassVector) -> Result<(), LatticeError> {
        if self.len() != other.len() {
            return Err(LatticeError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for ClassVector {
    /// Writes the vector in the `d;m^r,...` grammar, collapsing runs of
    /// equal consecutive multiplicities.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.degree)?;
        let mut first = true;
        let mut i = 0;
        while i < self.mults.len() {
            let mut j = i + 1;
            while j < self.mults.len() && self.mults[j] == self.mults[i] {
                j += 1;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            if j - i > 1 {
                write!(f, "{}^{}", self.mults[i], j - i)?;
            } else {
                write!(f, "{}", self.mults[i])?;
            }
            i = j;
        }
        Ok(())
    }
}

impl FromStr for ClassVector {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_vector(s)
    }
}

pub fn format_vector(v: &ClassVector) -> String {
    v.to_string()
}

/// Parses `degree ";" [item ("," item)*]` where `item := rational ["^" count]`.
pub fn parse_vector(text: &str) -> Result<ClassVector, LatticeError> {
    let mut p = Parser::new(text);
    let degree = p.rational()?;
    p.expect(';')?;
    let mut mults = Vec::new();
    if !p.at_end() {
        loop {
            let value = p.rational()?;
            let count = if p.eat('^') {
                p.positive_integer()?
            } else {
                1
            };
            if count > MAX_REPEAT || mults.len() as u64 + count > MAX_REPEAT {
                return Err(p.error("repetition count too large"));
            }
            mults.extend(std::iter::repeat(value).take(count as usize));
            if p.at_end() {
                break;
            }
            p.expect(',')?;
        }
    }
    Ok(ClassVector::new(degree, mults))
}

/// Parses a single rational `p` or `p/q`.
pub fn parse_rational(text: &str) -> Result<Rational, LatticeError> {
    let mut p = Parser::new(text);
    let r = p.rational()?;
    if !p.at_end() {
        return Err(p.error("trailing input"));
    }
    Ok(r)
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let chars = text
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Parser {
            chars,
            pos: 0,
            len: text.len(),
            _text: text,
        }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|&(i, _)| i).unwrap_or(self.len)
    }

    fn error(&self, message: &str) -> LatticeError {
        LatticeError::Syntax {
            position: self.offset(),
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), LatticeError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn digits(&mut self) -> Result<BigInt, LatticeError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        Ok(s.parse().expect("ascii digits"))
    }

    fn rational(&mut self) -> Result<Rational, LatticeError> {
        let negative = self.eat('-');
        let mut numer = self.digits()?;
        if negative {
            numer = -numer;
        }
        let denom = if self.eat('/') {
            let at = self.offset();
            let d = self.digits()?;
            if d.is_zero() {
                return Err(LatticeError::Syntax {
                    position: at,
                    message: "zero denominator".into(),
                });
            }
            d
        } else {
            BigInt::one()
        };
        Ok(Rational::new(numer, denom))
    }

    fn positive_integer(&mut self) -> Result<u64, LatticeError> {
        let at = self.offset();
        let n = self.digits()?;
        match n.to_u64() {
            Some(v) if v > 0 => Ok(v),
            _ => Err(LatticeError::Syntax {
                position: at,
                message: "expected a positive repetition count".into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(s: &str) -> ClassVector {
        s.parse().unwrap()
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(v("1;").pairing(&v("1;")).unwrap(), int(1));
        assert_eq!(v("0;1,0").pairing(&v("0;1,0")).unwrap(), int(-1));
        assert_eq!(v("3;1,1").pairing(&v("2;1,1")).unwrap(), int(4));
        assert_eq!(
            v("3;1").pairing(&v("3;1,1")),
            Err(LatticeError::LengthMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn self_intersection_examples() {
        assert_eq!(v("170;39^19").self_intersection(), int(1));
        assert_eq!(v("0;0^5").self_intersection(), int(0));
        assert_eq!(v("10;3^2,9").self_intersection(), int(1));
    }

    #[test]
    fn anticanonical_examples() {
        assert_eq!(v("10;3^11").anticanonical_pairing(), int(-3));
        assert_eq!(v("1;0^8").anticanonical_pairing(), int(3));
        assert_eq!(v("2;1,1,1").anticanonical_pairing(), int(3));
    }

    #[test]
    fn scale_and_add() {
        assert_eq!(v("2;1^4").scale(&int(39)).unwrap(), v("78;39^4"));
        assert_eq!(v("2;1^4").scale(&int(3)).unwrap(), v("6;3^4"));
        assert_eq!(v("5;2,1").scale(&int(1)).unwrap(), v("5;2,1"));
        assert!(matches!(
            v("2;1").scale(&int(0)),
            Err(LatticeError::NonPositiveScalar(_))
        ));
        assert_eq!(v("1;0,0").add(&v("0;0,0")).unwrap(), v("1;0,0"));
        assert_eq!(v("3;1,1").add(&v("3;1,1")).unwrap(), v("6;2,2"));
        assert_eq!(v("2;1,1,1,1").add(&v("1;1,1,0,0")).unwrap(), v("3;2,2,1,1"));
    }

    #[test]
    fn parse_examples() {
        let a = v("170;39^19");
        assert_eq!(a.degree(), &int(170));
        assert_eq!(a.len(), 19);
        assert!(a.mults().iter().all(|m| *m == int(39)));
        assert_eq!(v("10;3^7,6"), ClassVector::from_ints(10, &[3, 3, 3, 3, 3, 3, 3, 6]));
        let r = v("3/2;1/2^4");
        assert_eq!(r.degree(), &Rational::new(3.into(), 2.into()));
        assert_eq!(r.len(), 4);
        assert_eq!(v(" 4 ; 2 , 1 ^ 2 "), ClassVector::from_ints(4, &[2, 1, 1]));
        assert_eq!(v("-1;-2"), ClassVector::from_ints(-1, &[-2]));
        assert_eq!(v("6/4;"), v("3/2;"));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = |s: &str| match parse_vector(s) {
            Err(LatticeError::Syntax { position, .. }) => position,
            other => panic!("expected syntax error for {s:?}, got {other:?}"),
        };
        assert_eq!(err("10"), 2);
        assert_eq!(err("10;3,"), 5);
        assert_eq!(err("10;3^0"), 5);
        assert_eq!(err("1/0;"), 2);
        assert_eq!(err("a;"), 0);
        err("1;2;3");
        err("");
    }

    #[test]
    fn formatting_collapses_runs() {
        assert_eq!(v("170;39^19").to_string(), "170;39^19");
        assert_eq!(v("10;3,3,9").to_string(), "10;3^2,9");
        assert_eq!(v("1;").to_string(), "1;");
        assert_eq!(v("3/2;1/2^4,0").to_string(), "3/2;1/2^4,0");
    }

    #[test]
    fn content_normalizes() {
        assert_eq!(v("9;3^9").content(), Some(int(3)));
        assert_eq!(
            v("3/2;1/2^4").content(),
            Some(Rational::new(1.into(), 2.into()))
        );
        assert_eq!(v("0;0,0").content(), None);
    }

    #[test]
    fn signature_sanity() {
        for k in 1..6 {
            let l = ClassVector::from_ints(1, &vec![0; k]);
            assert_eq!(l.pairing(&l).unwrap(), int(1));
            for i in 1..=k {
                for j in 1..=k {
                    let expected = if i == j { -1 } else { 0 };
                    let p = ClassVector::exceptional(k, i)
                        .pairing(&ClassVector::exceptional(k, j))
                        .unwrap();
                    assert_eq!(p, int(expected));
                }
                assert_eq!(l.pairing(&ClassVector::exceptional(k, i)).unwrap(), int(0));
            }
        }
    }

    fn rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..8).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
    }

    fn vector(k: usize) -> impl Strategy<Value = ClassVector> {
        (rational(), proptest::collection::vec(rational(), k))
            .prop_map(|(d, m)| ClassVector::new(d, m))
    }

    fn triple() -> impl Strategy<Value = (ClassVector, ClassVector, ClassVector)> {
        (0usize..7).prop_flat_map(|k| (vector(k), vector(k), vector(k)))
    }

    proptest! {
        #[test]
        fn pairing_is_bilinear((u, w, x) in triple(), a in rational(), b in rational()) {
            let combo = ClassVector::new(
                u.degree() * &a + w.degree() * &b,
                u.mults().iter().zip(w.mults()).map(|(p, q)| p * &a + q * &b).collect(),
            );
            let lhs = combo.pairing(&x).unwrap();
            let rhs = u.pairing(&x).unwrap() * &a + w.pairing(&x).unwrap() * &b;
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn scaling_squares_self_intersection((u, _, _) in triple(), c in (1i64..20, 1i64..6)) {
            let c = Rational::new(c.0.into(), c.1.into());
            let scaled = u.scale(&c).unwrap();
            prop_assert_eq!(scaled.self_intersection(), u.self_intersection() * &c * &c);
        }

        #[test]
        fn format_parse_round_trip((u, _, _) in triple()) {
            let text = format_vector(&u);
            prop_assert_eq!(parse_vector(&text).unwrap(), u);
        }
    }
}
