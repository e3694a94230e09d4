//! Table of upper bounds on the homogeneous remainder `R_N` for `10 ≤ N ≤ N_max`.
//!
//! Columns: the bound `1/N`; the best closed-form bound from the three
//! homogeneous families; the conjectural `1/d²` from the fundamental Pell
//! solution (square-free `N` only); and the best bound backed by a
//! certificate that actually verifies.

use std::io;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::certificate::{encode, verify, Certificate, Verdict};
use crate::lattice::{int, ClassVector, PositivityKind, Rational};
use crate::pell::{conjecture_target, integer_sqrt, remainder_bound};
use crate::prover::{
    asymp1_part1, asymp1_part2, asymp1_part3_trimmed, coef2_certificate, prove, ProveOutcome, SearchLimits,
};

#[derive(Debug, Clone)]
pub struct BoundsOptions {
    /// Limits for proving the conjectural target of each row.
    pub limits: SearchLimits,
    /// When set, the certificate behind each proved bound is written here as `N<n>.json`.
    pub certificate_dir: Option<PathBuf>,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions {
            limits: SearchLimits {
                node_budget: 20_000,
                ..SearchLimits::default()
            },
            certificate_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsRow {
    pub n: u64,
    pub xu: Rational,
    pub family: Option<Rational>,
    pub conjecture: Option<Rational>,
    pub proved: Option<Rational>,
    pub certified_file: Option<String>,
}

/// A family member `(d; m^N)` with its closed-form remainder bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMatch {
    pub part: u8,
    pub a: i128,
    pub l: i128,
    pub bound: Rational,
}

fn unit_over(d: i128) -> Rational {
    Rational::new(1.into(), (d * d).into())
}

fn exact_sqrt(x: i128) -> Option<i128> {
    if x < 0 {
        return None;
    }
    let r = num_integer::Roots::sqrt(&x);
    (r * r == x).then_some(r)
}

/// Every `(part, a, l)` meeting its preconditions with exactly `N` points.
pub fn family_matches(n: u64) -> Vec<FamilyMatch> {
    let n = n as i128;
    let mut out = Vec::new();
    let mut l = 1;
    while l * l <= n + 2 * l {
        let a_for = |target: i128| -> Option<i128> {
            (target > 0 && target % (l * l) == 0).then(|| exact_sqrt(target / (l * l))).flatten()
        };
        if let Some(a) = a_for(n - 2 * l).filter(|&a| a >= 1 && a * l >= 2) {
            out.push(FamilyMatch { part: 1, a, l, bound: unit_over(a * a * l + 1) });
        }
        if let Some(a) = a_for(n + 2 * l).filter(|&a| a >= 2 && a * l >= 3 && a * l - l >= 2) {
            out.push(FamilyMatch { part: 2, a, l, bound: unit_over(a * a * l - 1) });
        }
        if let Some(a) = a_for(n - l).filter(|&a| a >= 1 && l > 1 && l > 2 * (a >> a.trailing_zeros())) {
            out.push(FamilyMatch { part: 3, a, l, bound: unit_over(2 * a * a * l + 1) });
        }
        l += 1;
    }
    out
}

fn family_certificate(f: &FamilyMatch) -> Option<Certificate> {
    match f.part {
        1 => asymp1_part1(f.a, f.l),
        2 => asymp1_part2(f.a, f.l),
        _ => asymp1_part3_trimmed(f.a, f.l),
    }
    .ok()
}

/// Certificates with exactly `N` equal multiplicities that we know how to build.
fn certified_candidates(n: u64, limits: &SearchLimits) -> Vec<Certificate> {
    let mut out: Vec<Certificate> = family_matches(n).iter().filter_map(family_certificate).collect();
    let s = integer_sqrt(n);
    if s * s == n {
        out.extend(Certificate::base(
            ClassVector::homogeneous(int(s as i64), int(1), n as usize),
            PositivityKind::Nef,
        ));
    }
    let d = 2 * integer_sqrt(n) as i128;
    for d in [d, d + 1] {
        if (d * d / 4) as u64 == n {
            out.extend(coef2_certificate(d).ok());
        }
    }
    if let Ok(target) = conjecture_target(n) {
        if let ProveOutcome::Proved(c) = prove(&target, PositivityKind::Nef, limits) {
            out.push(c);
        }
    }
    out
}

fn row(n: u64, options: &BoundsOptions) -> io::Result<BoundsRow> {
    let family = family_matches(n).into_iter().map(|f| f.bound).min();
    let conjecture = conjecture_target(n)
        .ok()
        .map(|v| remainder_bound(&v).expect("Pell targets are homogeneous"));
    let mut best: Option<(Rational, Certificate)> = None;
    for c in certified_candidates(n, &options.limits) {
        let Verdict::Valid { vector, .. } = verify(&c) else {
            continue;
        };
        let Ok(bound) = remainder_bound(&vector) else {
            continue;
        };
        if vector.len() as u64 == n && best.as_ref().map_or(true, |(b, _)| bound < *b) {
            best = Some((bound, c));
        }
    }
    let mut certified_file = None;
    if let (Some(dir), Some((_, c))) = (&options.certificate_dir, &best) {
        let path = dir.join(format!("N{n}.json"));
        std::fs::write(&path, encode(c))?;
        certified_file = Some(path.display().to_string());
    }
    Ok(BoundsRow {
        n,
        xu: Rational::new(1.into(), n.into()),
        family,
        conjecture,
        proved: best.map(|(b, _)| b),
        certified_file,
    })
}

/// One row per `N` in `10..=n_max`, computed in parallel, in increasing order.
pub fn bounds_table(n_max: u64, options: &BoundsOptions) -> io::Result<Vec<BoundsRow>> {
    if let Some(dir) = &options.certificate_dir {
        std::fs::create_dir_all(dir)?;
    }
    (10..=n_max).into_par_iter().map(|n| row(n, options)).collect()
}

pub const CSV_HEADER: [&str; 6] = ["N", "xu", "family", "conjecture", "proved", "certified_file"];

pub fn write_csv<W: io::Write>(rows: &[BoundsRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let cell = |x: &Option<Rational>| x.as_ref().map(|r| r.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.xu.to_string(),
            cell(&r.family),
            cell(&r.conjecture),
            cell(&r.proved),
            r.certified_file.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
