//! Certificate trees and their independent verifier.
//!
//! Every node stores its claimed conclusion `(vector, kind)`. The verifier
//! recomputes each conclusion from the children with exact arithmetic and
//! rejects any mismatch. Inference rules:
//!
//! * base: the vector matches a base family for the claimed kind;
//! * assume: an explicitly labelled hypothesis, reported back to the caller;
//! * glue: `outer #_site inner` with `inner` nef, kind of `outer`;
//! * cremona: `apply_word(word, claim) == child`, needs `k ≥ 3`, kind of child;
//! * scale: positive rational multiple, kind of child;
//! * sum: entrywise sum, ample if either summand is ample, else nef.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;

use crate::base::{match_base, BaseWitness, Family};
use crate::cremona::{apply_word, CremonaWord};
use crate::gluing::glue;
use crate::lattice::{ClassVector, PositivityKind, Rational};

mod codec;

pub use codec::{decode, encode, SchemaError, FORMAT_HEADER, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Claim {
    pub vector: ClassVector,
    pub kind: PositivityKind,
}

impl Claim {
    pub fn new(vector: ClassVector, kind: PositivityKind) -> Self {
        Claim { vector, kind }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.vector)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Base {
        claim: Claim,
        witness: BaseWitness,
    },
    Assume {
        claim: Claim,
        label: String,
    },
    Glue {
        claim: Claim,
        site: usize,
        outer: Box<Certificate>,
        inner: Box<Certificate>,
    },
    Cremona {
        claim: Claim,
        /// Forward word: maps the claimed vector to the child's vector.
        word: CremonaWord,
        child: Box<Certificate>,
    },
    Scale {
        claim: Claim,
        factor: Rational,
        child: Box<Certificate>,
    },
    Sum {
        claim: Claim,
        left: Box<Certificate>,
        right: Box<Certificate>,
    },
}

/// Kind of a sum: ample when at least one summand is ample.
pub fn sum_kind(a: PositivityKind, b: PositivityKind) -> PositivityKind {
    a.max(b)
}

impl Certificate {
    pub fn claim(&self) -> &Claim {
        match self {
            Certificate::Base { claim, .. }
            | Certificate::Assume { claim, .. }
            | Certificate::Glue { claim, .. }
            | Certificate::Cremona { claim, .. }
            | Certificate::Scale { claim, .. }
            | Certificate::Sum { claim, .. } => claim,
        }
    }

    pub fn claim_mut(&mut self) -> &mut Claim {
        match self {
            Certificate::Base { claim, .. }
            | Certificate::Assume { claim, .. }
            | Certificate::Glue { claim, .. }
            | Certificate::Cremona { claim, .. }
            | Certificate::Scale { claim, .. }
            | Certificate::Sum { claim, .. } => claim,
        }
    }

    pub fn vector(&self) -> &ClassVector {
        &self.claim().vector
    }

    pub fn kind(&self) -> PositivityKind {
        self.claim().kind
    }

    /// Base leaf for `v`, if it matches a family for `kind`.
    pub fn base(v: ClassVector, kind: PositivityKind) -> Option<Certificate> {
        let witness = match_base(&v, kind)?;
        Some(Certificate::Base {
            claim: Claim::new(v, kind),
            witness,
        })
    }

    pub fn assume(v: ClassVector, kind: PositivityKind, label: impl Into<String>) -> Certificate {
        Certificate::Assume {
            claim: Claim::new(v, kind),
            label: label.into(),
        }
    }

    /// Glue node with the conclusion computed from the children.
    pub fn glue(outer: Certificate, site: usize, inner: Certificate) -> Result<Certificate, crate::gluing::GlueError> {
        let vector = glue(outer.vector(), site, inner.vector())?;
        Ok(Certificate::Glue {
            claim: Claim::new(vector, outer.kind()),
            site,
            outer: Box::new(outer),
            inner: Box::new(inner),
        })
    }

    /// Cremona node concluding `v`, where `apply_word(word, v)` is the child's vector.
    pub fn cremona(v: ClassVector, word: CremonaWord, child: Certificate) -> Certificate {
        Certificate::Cremona {
            claim: Claim::new(v, child.kind()),
            word,
            child: Box::new(child),
        }
    }

    pub fn scale(factor: Rational, child: Certificate) -> Result<Certificate, crate::lattice::LatticeError> {
        let vector = child.vector().scale(&factor)?;
        Ok(Certificate::Scale {
            claim: Claim::new(vector, child.kind()),
            factor,
            child: Box::new(child),
        })
    }

    pub fn sum(left: Certificate, right: Certificate) -> Result<Certificate, crate::lattice::LatticeError> {
        let vector = left.vector().add(right.vector())?;
        Ok(Certificate::Sum {
            claim: Claim::new(vector, sum_kind(left.kind(), right.kind())),
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    /// Child nodes in a fixed order (outer before inner, left before right).
    pub fn children(&self) -> Vec<&Certificate> {
        match self {
            Certificate::Base { .. } | Certificate::Assume { .. } => vec![],
            Certificate::Glue { outer, inner, .. } => vec![outer, inner],
            Certificate::Cremona { child, .. } | Certificate::Scale { child, .. } => vec![child],
            Certificate::Sum { left, right, .. } => vec![left, right],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn assumptions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_assumptions(&mut out);
        out
    }

    fn collect_assumptions(&self, out: &mut BTreeSet<String>) {
        if let Certificate::Assume { label, .. } = self {
            out.insert(label.clone());
        }
        for c in self.children() {
            c.collect_assumptions(out);
        }
    }

    /// The root claim together with its assumption labels, unverified.
    pub fn conclusion(&self) -> (ClassVector, PositivityKind, BTreeSet<String>) {
        (self.vector().clone(), self.kind(), self.assumptions())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid {
        vector: ClassVector,
        kind: PositivityKind,
    },
    ConditionallyValid {
        vector: ClassVector,
        kind: PositivityKind,
        assumptions: BTreeSet<String>,
    },
    Invalid {
        path: String,
        reason: String,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Refuse assumption leaves and remark-based ample witnesses.
    pub strict: bool,
}

#[derive(Debug)]
struct Rejection {
    path: String,
    reason: String,
}

pub fn verify(c: &Certificate) -> Verdict {
    verify_with(c, VerifyOptions::default())
}

pub fn verify_with(c: &Certificate, options: VerifyOptions) -> Verdict {
    let mut assumptions = BTreeSet::new();
    match check(c, "$", options, &mut assumptions) {
        Err(Rejection { path, reason }) => Verdict::Invalid { path, reason },
        Ok(()) => {
            let Claim { vector, kind } = c.claim().clone();
            if assumptions.is_empty() {
                Verdict::Valid { vector, kind }
            } else {
                Verdict::ConditionallyValid {
                    vector,
                    kind,
                    assumptions,
                }
            }
        }
    }
}

fn reject<T>(path: &str, reason: impl Into<String>) -> Result<T, Rejection> {
    Err(Rejection {
        path: path.to_string(),
        reason: reason.into(),
    })
}

fn expect_vector(path: &str, claimed: &ClassVector, computed: &ClassVector) -> Result<(), Rejection> {
    if claimed != computed {
        return reject(
            path,
            format!("ConclusionMismatch: claimed {claimed}, recomputed {computed}"),
        );
    }
    Ok(())
}

fn expect_kind(path: &str, claimed: PositivityKind, computed: PositivityKind) -> Result<(), Rejection> {
    if claimed != computed {
        return reject(
            path,
            format!("KindMismatch: claimed {claimed}, rule yields {computed}"),
        );
    }
    Ok(())
}

fn check(
    c: &Certificate,
    path: &str,
    options: VerifyOptions,
    assumptions: &mut BTreeSet<String>,
) -> Result<(), Rejection> {
    match c {
        Certificate::Base { claim, witness } => {
            if options.strict && witness.remark_based {
                return reject(path, "StrictMode: remark-based ample witness refused");
            }
            match match_base(&claim.vector, claim.kind) {
                Some(ref w) if w == witness => {}
                Some(_) => return reject(path, "WitnessMismatch: witness differs from recomputed match"),
                None => {
                    return reject(
                        path,
                        format!("NoBaseFamily: {} is not a {} base vector", claim.vector, claim.kind),
                    )
                }
            }
            match witness.rebuild() {
                Some(ref v) if *v == claim.vector => Ok(()),
                _ => reject(path, "WitnessMismatch: witness does not rebuild the vector"),
            }
        }
        Certificate::Assume { label, .. } => {
            if options.strict {
                return reject(path, format!("StrictMode: assumption `{label}` refused"));
            }
            assumptions.insert(label.clone());
            Ok(())
        }
        Certificate::Glue {
            claim,
            site,
            outer,
            inner,
        } => {
            let outer_path = format!("{path}.outer");
            let inner_path = format!("{path}.inner");
            check(outer, &outer_path, options, assumptions)?;
            check(inner, &inner_path, options, assumptions)?;
            if !inner.kind().implies(PositivityKind::Nef) {
                return reject(path, "InnerNotNef");
            }
            let computed = match glue(outer.vector(), *site, inner.vector()) {
                Ok(v) => v,
                Err(e) => return reject(path, e.to_string()),
            };
            expect_vector(path, &claim.vector, &computed)?;
            expect_kind(path, claim.kind, outer.kind())
        }
        Certificate::Cremona { claim, word, child } => {
            check(child, &format!("{path}.child"), options, assumptions)?;
            if claim.vector.len() < 3 {
                return reject(
                    path,
                    format!("TooFewPoints: Cremona action needs k >= 3, got {}", claim.vector.len()),
                );
            }
            let image = match apply_word(word, &claim.vector) {
                Ok(v) => v,
                Err(e) => return reject(path, format!("BadWord: {e}")),
            };
            if image != *child.vector() {
                return reject(
                    path,
                    format!("WordMismatch: word maps claim to {image}, child certifies {}", child.vector()),
                );
            }
            expect_kind(path, claim.kind, child.kind())
        }
        Certificate::Scale { claim, factor, child } => {
            check(child, &format!("{path}.child"), options, assumptions)?;
            if !factor.is_positive() {
                return reject(path, format!("NonPositiveScalar: {factor}"));
            }
            expect_vector(path, &claim.vector, &child.vector().scale_unchecked(factor))?;
            expect_kind(path, claim.kind, child.kind())
        }
        Certificate::Sum { claim, left, right } => {
            check(left, &format!("{path}.left"), options, assumptions)?;
            check(right, &format!("{path}.right"), options, assumptions)?;
            let computed = match left.vector().add(right.vector()) {
                Ok(v) => v,
                Err(e) => return reject(path, e.to_string()),
            };
            expect_vector(path, &claim.vector, &computed)?;
            expect_kind(path, claim.kind, sum_kind(left.kind(), right.kind()))
        }
    }
}

/// Whether a certificate leans on the flagged ample two-heavy rule anywhere.
pub fn uses_remark_rule(c: &Certificate) -> bool {
    match c {
        Certificate::Base { witness, .. } => witness.family == Family::TwoHeavy && witness.remark_based,
        _ => c.children().into_iter().any(uses_remark_rule),
    }
}
