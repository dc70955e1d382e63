//! Roots of a pair of bivariate polynomials via the two-parameter eigenvalue
//! problem
//!
//! ```text
//! (A1 + x B1 + y C1) u1 = 0,    (A2 + x B2 + y C2) u2 = 0.
//! ```
//!
//! With the operator determinants
//! `D0 = B1 (x) C2 - C1 (x) B2`, `D1 = C1 (x) A2 - A1 (x) C2`,
//! `D2 = A1 (x) B2 - B1 (x) A2` (Kronecker products), the eigenvalues satisfy
//! `D1 w = x D0 w` and `D2 w = y D0 w` with the common vector `w = u1 (x) u2`.
//! Only the nonsingular case (`D0` invertible) is handled.

use nalgebra::DVector;
use thiserror::Error;

use crate::linalg::{self, CMatrix, LinalgError, C64};
use crate::minrep::PencilRep;
use crate::poly::BivariatePoly;
use crate::verify::{self, QualityParams, RobustError};

/// `D0` with a larger condition number is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MepError {
    #[error("Delta0 is numerically singular (condition {0:.3e}); the singular two-parameter problem is not supported")]
    SingularDelta0(f64),
    #[error(transparent)]
    Eigen(#[from] LinalgError),
    #[error("representation of {which}: {source}")]
    Construct { which: char, source: RobustError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaOperators {
    pub delta0: CMatrix,
    pub delta1: CMatrix,
    pub delta2: CMatrix,
}

impl DeltaOperators {
    pub fn size(&self) -> usize {
        self.delta0.nrows()
    }
}

pub fn build_deltas(rep1: &PencilRep, rep2: &PencilRep) -> DeltaOperators {
    let (a1, b1, c1) = (&rep1.a, &rep1.b, &rep1.c);
    let (a2, b2, c2) = (&rep2.a, &rep2.b, &rep2.c);
    DeltaOperators {
        delta0: b1.kronecker(c2) - c1.kronecker(b2),
        delta1: c1.kronecker(a2) - a1.kronecker(c2),
        delta2: a1.kronecker(b2) - b1.kronecker(a2),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub x: C64,
    pub y: C64,
    pub vector: DVector<C64>,
}

/// All `N` eigenvalue pairs. `x` comes from the pencil `(D1, D0)`; `y` is
/// the least-squares solution of `D2 w = y D0 w` on the computed vector.
pub fn solve_mep(deltas: &DeltaOperators) -> Result<Vec<Eigenpair>, MepError> {
    let n = deltas.size();
    if n == 1 {
        let d0 = deltas.delta0[(0, 0)];
        if d0.norm() == 0.0 {
            return Err(MepError::SingularDelta0(f64::INFINITY));
        }
        let (x, y) = (deltas.delta1[(0, 0)] / d0, deltas.delta2[(0, 0)] / d0);
        return Ok(vec![Eigenpair { x, y, vector: DVector::from_element(1, C64::new(1.0, 0.0)) }]);
    }
    let condition = linalg::condition_number(&deltas.delta0);
    if condition.is_nan() || condition > SINGULAR_CONDITION {
        return Err(MepError::SingularDelta0(condition));
    }
    let eig = linalg::generalized_eigen(&deltas.delta1, &deltas.delta0)?;
    let pairs = (0..n)
        .map(|k| {
            let w: DVector<C64> = eig.vectors.column(k).into_owned();
            let x = eig.alpha[k] / eig.beta[k];
            let d0w = &deltas.delta0 * &w;
            let d2w = &deltas.delta2 * &w;
            let y = d0w.dotc(&d2w) / C64::new(d0w.norm_squared(), 0.0);
            Eigenpair { x, y, vector: w }
        })
        .collect();
    Ok(pairs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: C64,
    pub y: C64,
    pub residual_p: f64,
    pub residual_q: f64,
}

impl Root {
    pub fn residual(&self) -> f64 {
        self.residual_p.max(self.residual_q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub count: usize,
    pub roots: Vec<Root>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveOptions {
    pub quality: QualityParams,
    /// One Newton step on `(p, q)` per root.
    pub refine: bool,
}

/// Represents `p` (seed `seed`) and `q` (seed `seed + 1`), solves the
/// two-parameter problem and returns the roots sorted by residual.
pub fn solve_system(p: &BivariatePoly, q: &BivariatePoly, options: &SolveOptions, seed: u64) -> Result<RootSet, MepError> {
    let rep = |poly: &BivariatePoly, which: char, seed: u64| {
        verify::robust_construct(poly, &options.quality, seed)
            .map(|o| o.rep)
            .map_err(|source| MepError::Construct { which, source })
    };
    let rep_p = rep(p, 'p', seed)?;
    let rep_q = rep(q, 'q', seed.wrapping_add(1))?;
    let pairs = solve_mep(&build_deltas(&rep_p, &rep_q))?;

    let mut roots: Vec<Root> = pairs
        .into_iter()
        .map(|pair| {
            let (x, y) = if options.refine { newton_step(p, q, pair.x, pair.y) } else { (pair.x, pair.y) };
            Root { x, y, residual_p: p.eval(x, y).norm(), residual_q: q.eval(x, y).norm() }
        })
        .collect();
    roots.sort_by(|a, b| a.residual().total_cmp(&b.residual()));
    Ok(RootSet { count: roots.len(), roots })
}

/// One Newton step for `p = q = 0`; the point is kept if the Jacobian is
/// singular or the step does not reduce the residual.
pub fn newton_step(p: &BivariatePoly, q: &BivariatePoly, x: C64, y: C64) -> (C64, C64) {
    let (fp, fq) = (p.eval(x, y), q.eval(x, y));
    let (px, py) = (p.d_dx().eval(x, y), p.d_dy().eval(x, y));
    let (qx, qy) = (q.d_dx().eval(x, y), q.d_dy().eval(x, y));
    let det = px * qy - py * qx;
    if det.norm() == 0.0 {
        return (x, y);
    }
    let dx = (fp * qy - py * fq) / det;
    let dy = (px * fq - fp * qx) / det;
    let (nx, ny) = (x - dx, y - dy);
    let before = fp.norm().max(fq.norm());
    let after = p.eval(nx, ny).norm().max(q.eval(nx, ny).norm());
    if after.is_finite() && after < before {
        (nx, ny)
    } else {
        (x, y)
    }
}
