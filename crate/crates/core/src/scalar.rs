use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::Num;

use crate::lattice::Rational;

/// Exact ordered ring elements the kernels are generic over: `Rational` for
/// the public API and `i128` for the prover's hot loop.
pub(crate) trait Scalar: Clone + Ord + Num + Debug {
    fn to_rational(&self) -> Rational;
}

impl Scalar for Rational {
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

impl Scalar for i128 {
    fn to_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(*self))
    }
}

pub(crate) fn self_intersection<T: Scalar>(d: &T, m: &[T]) -> T {
    m.iter()
        .fold(d.clone() * d.clone(), |acc, x| acc - x.clone() * x.clone())
}

/// 0-based indices ordering `m` non-increasingly; ties keep their original order.
pub(crate) fn descending_order<T: Ord>(m: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m.len()).collect();
    idx.sort_by(|&a, &b| m[b].cmp(&m[a]));
    idx
}
