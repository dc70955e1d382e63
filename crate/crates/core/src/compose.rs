//! Representations of products assembled from representations of the factors.
//! Useful for non-square-free polynomials, whose factorisation the caller supplies.

use thiserror::Error;

use crate::linalg;
use crate::minrep::PencilRep;
use crate::poly::BivariatePoly;
use crate::verify::{self, QualityParams, RobustError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComposeError {
    #[error("no factors given")]
    Empty,
    #[error("multiplicity of factor {index} must be at least 1")]
    ZeroMultiplicity { index: usize },
    #[error("factor {index}: {source}")]
    Factor { index: usize, source: RobustError },
    #[error("factor {index}: best representation scored {scaled:.3e}")]
    FactorQuality { index: usize, scaled: f64 },
}

/// `(diag(A_i), diag(B_i), diag(C_i))`; `None` for an empty list.
pub fn block_diag(reps: &[PencilRep]) -> Option<PencilRep> {
    if reps.is_empty() {
        return None;
    }
    let a = linalg::block_diagonal(reps.iter().map(|r| &r.a));
    let b = linalg::block_diagonal(reps.iter().map(|r| &r.b));
    let c = linalg::block_diagonal(reps.iter().map(|r| &r.c));
    Some(PencilRep { a, b, c })
}

/// Robustly represents each factor and repeats its block `multiplicity` times.
/// Factor `i` is constructed with seed `seed + i`.
pub fn represent_factored(
    factors: &[(BivariatePoly, usize)],
    params: &QualityParams,
    seed: u64,
) -> Result<PencilRep, ComposeError> {
    if factors.is_empty() {
        return Err(ComposeError::Empty);
    }
    let mut blocks = Vec::new();
    for (index, (p, mult)) in factors.iter().enumerate() {
        if *mult == 0 {
            return Err(ComposeError::ZeroMultiplicity { index });
        }
        let outcome = verify::robust_construct(p, params, seed.wrapping_add(index as u64))
            .map_err(|source| ComposeError::Factor { index, source })?;
        if !outcome.passed() {
            return Err(ComposeError::FactorQuality { index, scaled: outcome.report.scaled });
        }
        blocks.extend(std::iter::repeat_n(outcome.rep, *mult));
    }
    Ok(block_diag(&blocks).expect("at least one block"))
}

/// `prod p_i^(m_i)`, expanded.
pub fn expand_product(factors: &[(BivariatePoly, usize)]) -> BivariatePoly {
    let one = BivariatePoly::constant(linalg::C64::new(1.0, 0.0));
    factors.iter().fold(one, |acc, (p, m)| (0..*m).fold(acc, |acc, _| acc.mul(p)))
}
