//! Explicit certificates for the homogeneous families
//! `(a²l+1; a^{a²l²+2l})`, `(a²l−1; a^{a²l²−2l})`, `(2a²l+1; (2a)^{a²l²+l}, 1)`,
//! for `(d; 2^{⌊d²/4⌋})`, and conditional compositions of Nagata hypotheses.
//!
//! Each constructor writes down the glue sites and reflection words directly
//! and leaves checking to the verifier.

use crate::certificate::Certificate;
use crate::cremona::{CremonaOp, CremonaWord};
use crate::lattice::{int, ClassVector, PositivityKind, Rational};

use super::ProverError;

fn violated<T>(msg: impl Into<String>) -> Result<T, ProverError> {
    Err(ProverError::PreconditionViolated(msg.into()))
}

fn vector(d: i128, blocks: &[(i128, i128)]) -> ClassVector {
    let mut m = Vec::new();
    for &(value, count) in blocks {
        m.extend(std::iter::repeat(value).take(count as usize));
    }
    ClassVector::from_i128s(d, &m)
}

fn base(v: ClassVector) -> Result<Certificate, ProverError> {
    match Certificate::base(v.clone(), PositivityKind::Nef) {
        Some(c) => Ok(c),
        None => violated(format!("{v} is not a base-family vector")),
    }
}

/// `c·(s; 1^{s²})`.
fn scaled_square(c: i128, s: i128) -> Result<Certificate, ProverError> {
    base(vector(c * s, &[(c, s * s)]))
}

/// The chain `R_{1,2,3}, R_{1,4,5}, …` over `steps` pairs, with identity
/// reflections (`δ = 0`) left out.
fn pair_chain(steps: i128, delta: i128) -> CremonaWord {
    if delta == 0 {
        return CremonaWord::new();
    }
    (1..=steps as usize)
        .map(|j| CremonaOp::Reflect(1, 2 * j, 2 * j + 1))
        .collect()
}

/// Cremona node over a base leaf for the image of `v` under `word`.
fn reduce_to_base(v: ClassVector, word: CremonaWord) -> Result<Certificate, ProverError> {
    if word.is_empty() {
        return base(v);
    }
    let image = crate::cremona::apply_word(&word, &v).expect("well-formed chain");
    Ok(Certificate::cremona(v, word, base(image)?))
}

fn glue(outer: Certificate, site: usize, inner: Certificate) -> Certificate {
    Certificate::glue(outer, site, inner).expect("constructor glues match degrees")
}

/// `(a²l+1; a^{a²l²+2l})`, with an extra trailing `1` when `tail` is set.
fn part1(a: i128, l: i128, tail: bool) -> Result<Certificate, ProverError> {
    if a < 1 || l < 1 || a * l < 2 {
        return violated(format!("part 1 needs a, l >= 1 and a*l >= 2, got a={a}, l={l}"));
    }
    let d = a * a * l + 1;
    let n = 2 * a * l + 2 * l - 1;
    let mut blocks = vec![(a * (a * l - 1), 1), (a, n)];
    if tail {
        blocks.push((1, 1));
    }
    let v1 = vector(d, &blocks);
    let v1_cert = reduce_to_base(v1, pair_chain((n - 1) / 2, 1 - a))?;
    Ok(glue(v1_cert, 1, scaled_square(a, a * l - 1)?))
}

/// Certificate for `(a²l+1; a^{a²l²+2l})`; requires `a·l ≥ 2`.
pub fn asymp1_part1(a: i128, l: i128) -> Result<Certificate, ProverError> {
    part1(a, l, false)
}

/// Certificate for `(a²l−1; a^{a²l²−2l})`; requires `a ≥ 2`, `a·l ≥ 3`, `a·l − l ≥ 2`.
pub fn asymp1_part2(a: i128, l: i128) -> Result<Certificate, ProverError> {
    if a < 2 || l < 1 || a * l < 3 || a * l - l - 2 < 0 {
        return violated(format!(
            "part 2 needs a >= 2, a*l >= 3 and a*l - l >= 2, got a={a}, l={l}"
        ));
    }
    let d = a * a * l - 1;
    let n1 = 4 * a * l - 2 * l - 4;
    let x = a * l - l - 1;
    let d2 = a * a * l - 2 * a * l + l + 1;

    // (d2; x(a−1), (a−1)^{2al−1}) reduces to (a+l−1; l−1, 1^{2al−2}, a−1).
    let v2 = vector(d2, &[(x * (a - 1), 1), (a - 1, 2 * a * l - 1)]);
    let v2_cert = reduce_to_base(v2, pair_chain(a * l - 1, 2 - a))?;
    // u2 = (a−1)·(x; x−1, 1^{2x−1}).
    let u2 = base(vector((a - 1) * x, &[((a - 1) * (x - 1), 1), (a - 1, 2 * x - 1)]))?;
    let v1_image = glue(v2_cert, 1, u2);

    let v1 = vector(d, &[(a * (a * l - 2), 1), (a, n1)]);
    let word = pair_chain(n1 / 2, -1);
    debug_assert_eq!(
        crate::cremona::apply_word(&word, &v1).ok().as_ref(),
        Some(v1_image.vector())
    );
    let v1_cert = Certificate::cremona(v1, word, v1_image);
    Ok(glue(v1_cert, 1, scaled_square(a, a * l - 2)?))
}

fn part3_precondition(a: i128, l: i128) -> Result<(), ProverError> {
    if a < 1 || l < 2 {
        return violated(format!("part 3 needs a >= 1 and l > 1, got a={a}, l={l}"));
    }
    let b = a >> a.trailing_zeros();
    if l <= 2 * b {
        return violated(format!("part 3 needs l > 2b where a = 2^k*b, b odd; got a={a}, l={l}"));
    }
    Ok(())
}

/// Certificate for `(2a²l+1; (2a)^{a²l²+l}, 1)`; requires `l > 1` and `l > 2b`
/// where `a = 2^k·b` with `b` odd.
pub fn asymp1_part3(a: i128, l: i128) -> Result<Certificate, ProverError> {
    part3_precondition(a, l)?;
    part3(a, l)
}

fn part3(a: i128, l: i128) -> Result<Certificate, ProverError> {
    if l % 2 == 0 {
        return part1(2 * a, l / 2, true);
    }
    let d = 2 * a * a * l + 1;
    if a % 2 == 1 {
        let w = vector(d, &[(2 * a * (a * l - 1), 1), (2 * a, 2 * a * l + l - 1), (1, 1)]);
        let w_cert = reduce_to_base(w, pair_chain((2 * a * l + l - 1) / 2, 1 - 2 * a))?;
        return Ok(glue(w_cert, 1, scaled_square(2 * a, a * l - 1)?));
    }

    // a even: three copies of 2a·(al/2; 1^{(al/2)²}) and one (2; 1^4) reduce
    // the problem to 2·part3(a/2, l).
    let h = a * l / 2;
    let big = a * a * l;
    let count = h * h + l;
    let v1 = vector(d, &[(big, 3), (2 * a, count), (1, 1)]);
    let k = v1.len();
    let mut map: Vec<usize> = (4..=k - 1).collect();
    map.extend([1, 2, 3, k]);
    let word = CremonaWord::from(vec![CremonaOp::Reflect(1, 2, 3), CremonaOp::Permute(map)]);

    let half = Certificate::scale(int(2), part3(a / 2, l)?).expect("positive factor");
    let image = glue(half, k - 3, base(vector(2, &[(1, 4)]))?);
    debug_assert_eq!(crate::cremona::apply_word(&word, &v1).ok().as_ref(), Some(image.vector()));
    let mut acc = Certificate::cremona(v1, word, image);
    for site in [3, 2, 1] {
        acc = glue(acc, site, scaled_square(2 * a, h)?);
    }
    Ok(acc)
}

/// Certificate for `(2a²l+1; (2a)^{a²l²+l})`: the trailing `1` of
/// [`asymp1_part3`] is removed by gluing the empty vector `(1;)` into it.
pub fn asymp1_part3_trimmed(a: i128, l: i128) -> Result<Certificate, ProverError> {
    let c = asymp1_part3(a, l)?;
    let site = c.vector().len();
    Ok(glue(c, site, base(vector(1, &[]))?))
}

/// Certificate for `(d; 2^{⌊d²/4⌋})`, `d ≥ 4`.
pub fn coef2_certificate(d: i128) -> Result<Certificate, ProverError> {
    if d < 2 {
        return violated(format!("coefficient-2 family needs d >= 2, got {d}"));
    }
    let k = d / 2;
    if d % 2 == 0 {
        let leaf = base(vector(k, &[(1, k * k)]))?;
        return Ok(Certificate::scale(int(2), leaf).expect("positive factor"));
    }
    if k == 1 {
        return violated("d = 3 (N = 2) is outside the reach of the lattice constructions");
    }
    if k % 2 == 0 {
        asymp1_part1(2, k / 2)
    } else {
        asymp1_part3_trimmed(1, k)
    }
}

/// Conditional certificate for `(d; m^{N1·N2})` from the hypotheses that
/// `(x; m^{N1})` and `(d; x^{N2})` are ample, given `d² > x²·N2 > m²·N1·N2`.
pub fn nagata_compose(n1: usize, n2: usize, d: &Rational, m: &Rational, x: &Rational) -> Result<Certificate, ProverError> {
    let zero = int(0);
    if n1 == 0 || n2 == 0 || *d <= zero || *m <= zero || *x <= zero {
        return violated("nagata composition needs positive N1, N2, d, m, x");
    }
    let (rn1, rn2) = (int(n1 as i64), int(n2 as i64));
    if !(d * d > x * x * &rn2) || !(x * x > m * m * &rn1) {
        return violated(format!("x = {x} is outside the window d^2 > x^2*N2, x^2 > m^2*N1"));
    }
    let outer = Certificate::assume(
        ClassVector::homogeneous(d.clone(), x.clone(), n2),
        PositivityKind::Ample,
        format!("nagata({n2})"),
    );
    let inner = ClassVector::homogeneous(x.clone(), m.clone(), n1);
    let mut acc = outer;
    for site in (1..=n2).rev() {
        let leaf = Certificate::assume(inner.clone(), PositivityKind::Ample, format!("nagata({n1})"));
        acc = glue(acc, site, leaf);
    }
    Ok(acc)
}
