//! The `#_i` composition: splice an inner vector into slot `i` of an outer
//! vector whose multiplicity there equals the inner degree.

use thiserror::Error;

use crate::lattice::{ClassVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlueError {
    #[error("glue site {site} out of range for {len} multiplicities")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("DegreeMismatch: slot {site} holds {slot_value} but inner degree is {inner_degree}")]
    DegreeMismatch {
        site: usize,
        slot_value: Rational,
        inner_degree: Rational,
    },
}

/// `outer #_site inner`, with `site` 1-based. The inner multiplicities occupy
/// positions `site..site + k(inner) − 1` of the result.
pub fn glue(outer: &ClassVector, site: usize, inner: &ClassVector) -> Result<ClassVector, GlueError> {
    let slot = outer.mult(site).ok_or(GlueError::SiteOutOfRange {
        site,
        len: outer.len(),
    })?;
    if slot != inner.degree() {
        return Err(GlueError::DegreeMismatch {
            site,
            slot_value: slot.clone(),
            inner_degree: inner.degree().clone(),
        });
    }
    let m = outer.mults();
    let mut mults = Vec::with_capacity(m.len() + inner.len() - 1);
    mults.extend_from_slice(&m[..site - 1]);
    mults.extend_from_slice(inner.mults());
    mults.extend_from_slice(&m[site..]);
    Ok(ClassVector::new(outer.degree().clone(), mults))
}

/// Glues `u` into every slot of `w`, from the last slot down to the first.
pub fn glue_fold(w: &ClassVector, u: &ClassVector) -> Result<ClassVector, GlueError> {
    let mut acc = w.clone();
    for site in (1..=w.len()).rev() {
        acc = glue(&acc, site, u)?;
    }
    Ok(acc)
}
