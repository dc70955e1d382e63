//! Quality scoring of a representation, and the retry loop that escalates
//! from the plain construction to swapped and randomly transformed variables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::C64;
use crate::minrep::{self, ConstructError, PencilRep};
use crate::poly::BivariatePoly;
use crate::transform::{self, ProjectiveTransform, TransformError};

/// Total attempts: direct, swapped, then random substitutions.
pub const MAX_ATTEMPTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityParams {
    pub samples: usize,
    pub eps: f64,
    pub delta: f64,
}

impl Default for QualityParams {
    fn default() -> Self {
        Self { samples: 200, eps: 1e-4, delta: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub nu: f64,
    pub scaled: f64,
    pub passed: bool,
    pub samples: usize,
}

/// `k` points with real and imaginary parts uniform on `[0, 1]`.
pub fn sample_points<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<(C64, C64)> {
    let mut draw = || C64::new(rng.random::<f64>(), rng.random::<f64>());
    (0..k).map(|_| (draw(), draw())).collect()
}

/// `nu = max |p - det(A + xB + yC)| / (|p| + eps)` over `k` random points.
pub fn quality(p: &BivariatePoly, rep: &PencilRep, params: &QualityParams, seed: u64) -> QualityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = sample_points(params.samples.max(1), &mut rng);
    quality_at(p, rep, &points, params)
}

pub fn quality_at(p: &BivariatePoly, rep: &PencilRep, points: &[(C64, C64)], params: &QualityParams) -> QualityReport {
    let nu = points
        .iter()
        .map(|&(x, y)| {
            let v = p.eval(x, y);
            (v - rep.det_at(x, y)).norm() / (v.norm() + params.eps)
        })
        .fold(0.0, |acc: f64, e| if e.is_nan() { f64::INFINITY } else { acc.max(e) });
    let scaled = nu * rep.max_inf_norm();
    QualityReport { nu, scaled, passed: scaled <= params.delta, samples: points.len() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttemptKind {
    Direct,
    Swap,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    pub kind: AttemptKind,
    /// Substitution applied before normalising.
    pub transform: ProjectiveTransform,
    pub outcome: Result<QualityReport, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustOutcome {
    /// Best representation found, in the original variables.
    pub rep: PencilRep,
    /// Total substitution behind `rep` (pre-transform, then normalisation).
    pub transform: ProjectiveTransform,
    pub report: QualityReport,
    pub attempts: Vec<Attempt>,
}

impl RobustOutcome {
    pub fn passed(&self) -> bool {
        self.report.passed
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RobustError {
    #[error("polynomial is constant")]
    Constant,
    #[error("likely non-square-free: no attempt reached normal form ({attempts} attempts)")]
    LikelyNonSquareFree { attempts: usize },
    #[error("construction failed in all {attempts} attempts; last error: {last}")]
    AllFailed { attempts: usize, last: String },
}

enum AttemptError {
    Normalize(TransformError),
    Construct(ConstructError),
    PullBack(TransformError),
}

impl AttemptError {
    fn describe(&self) -> String {
        match self {
            Self::Normalize(e) => format!("normalize: {e}"),
            Self::Construct(e) => format!("construct: {e}"),
            Self::PullBack(e) => format!("pull back: {e}"),
        }
    }
}

fn run_attempt(p: &BivariatePoly, pre: &ProjectiveTransform, seed: u64) -> Result<(PencilRep, ProjectiveTransform), AttemptError> {
    let moved = transform::apply_transform(p, pre).map_err(AttemptError::Normalize)?;
    let record = transform::normalize(&moved, seed).map_err(AttemptError::Normalize)?;
    let rep = minrep::construct(&record.normalized).map_err(AttemptError::Construct)?;
    let total = pre.then(&record.transform);
    let rep = transform::pull_back(&rep.balanced(), &total).map_err(AttemptError::PullBack)?;
    Ok((rep.balanced(), total))
}

/// Constructs, scores against `p` and escalates through the attempt ladder
/// until a representation passes `params.delta`. If none passes, the best
/// scoring one is returned with `report.passed == false`.
pub fn robust_construct(p: &BivariatePoly, params: &QualityParams, seed: u64) -> Result<RobustOutcome, RobustError> {
    let p = p.trimmed();
    let n = p.degree_bound();
    if n == 0 {
        return Err(RobustError::Constant);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = sample_points(params.samples.max(1), &mut rng);

    if n == 1 {
        let rep = minrep::construct(&p).expect("degree one is always representable");
        let report = quality_at(&p, &rep, &points, params);
        let transform = ProjectiveTransform::identity();
        let attempts = vec![Attempt { kind: AttemptKind::Direct, transform, outcome: Ok(report) }];
        return Ok(RobustOutcome { rep, transform, report, attempts });
    }

    let mut attempts = Vec::with_capacity(MAX_ATTEMPTS);
    let mut best: Option<(PencilRep, ProjectiveTransform, QualityReport)> = None;
    let mut normalized_any = false;
    let mut last_error = String::new();

    for index in 0..MAX_ATTEMPTS {
        let (kind, pre) = match index {
            0 => (AttemptKind::Direct, ProjectiveTransform::identity()),
            1 => (AttemptKind::Swap, ProjectiveTransform::swap_xy()),
            _ => (AttemptKind::Random, ProjectiveTransform::random(&mut rng)),
        };
        let normalize_seed: u64 = rng.random();
        match run_attempt(&p, &pre, normalize_seed) {
            Ok((rep, total)) => {
                normalized_any = true;
                let report = quality_at(&p, &rep, &points, params);
                attempts.push(Attempt { kind, transform: pre, outcome: Ok(report) });
                let better = best.as_ref().is_none_or(|(_, _, b)| report.scaled < b.scaled || b.scaled.is_nan());
                if better {
                    best = Some((rep, total, report));
                }
                if report.passed {
                    break;
                }
            }
            Err(e) => {
                if !matches!(e, AttemptError::Normalize(_)) {
                    normalized_any = true;
                }
                last_error = e.describe();
                attempts.push(Attempt { kind, transform: pre, outcome: Err(last_error.clone()) });
            }
        }
    }

    match best {
        Some((rep, transform, report)) => Ok(RobustOutcome { rep, transform, report, attempts }),
        None if !normalized_any => Err(RobustError::LikelyNonSquareFree { attempts: attempts.len() }),
        None => Err(RobustError::AllFailed { attempts: attempts.len(), last: last_error }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn cubic() -> BivariatePoly {
        BivariatePoly::from_real_terms(&[(3, 0, 1.0), (2, 1, -3.0), (1, 2, 2.0), (1, 0, 1.0), (0, 0, 1.0)])
    }

    #[test]
    fn exact_linear_rep_scores_zero() {
        let p = BivariatePoly::from_real_terms(&[(1, 0, 2.0), (0, 1, -1.0), (0, 0, 3.0)]);
        let rep = minrep::construct(&p).unwrap();
        let report = quality(&p, &rep, &QualityParams::default(), 0);
        assert!(report.nu < 1e-12);
        assert!(report.passed);
        assert_eq!(report.samples, 200);
    }

    #[test]
    fn perturbation_is_detected() {
        let p = cubic();
        let mut rep = minrep::construct(&p).unwrap();
        assert!(quality(&p, &rep, &QualityParams::default(), 1).passed);
        rep.a[(0, 0)] += c(1.0);
        let report = quality(&p, &rep, &QualityParams::default(), 1);
        assert!(report.nu > 0.0);
        assert!(!report.passed);
    }

    #[test]
    fn sample_points_lie_in_unit_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (x, y) in sample_points(500, &mut rng) {
            for v in [x.re, x.im, y.re, y.im] {
                assert!((0.0..1.0).contains(&v));
            }
        }
    }

    #[test]
    fn normal_input_passes_first_attempt() {
        let outcome = robust_construct(&cubic(), &QualityParams::default(), 4).unwrap();
        assert!(outcome.passed());
        assert_eq!(outcome.attempts.len(), 1);
        assert!(outcome.transform.is_identity());
    }

    #[test]
    fn circle_is_normalised_and_pulled_back() {
        let p = BivariatePoly::from_real_terms(&[(2, 0, 1.0), (0, 2, 1.0), (0, 0, -1.0)]);
        let outcome = robust_construct(&p, &QualityParams::default(), 0).unwrap();
        assert!(outcome.passed(), "{:?}", outcome.report);
        let (x, y) = (C64::new(0.3, 0.4), C64::new(-1.2, 0.1));
        assert!((outcome.rep.det_at(x, y) - p.eval(x, y)).norm() < 1e-10);
    }

    #[test]
    fn square_is_likely_non_square_free() {
        let p = BivariatePoly::from_real_terms(&[(2, 0, 1.0), (1, 1, 2.0), (0, 2, 1.0)]);
        let err = robust_construct(&p, &QualityParams::default(), 0).unwrap_err();
        assert!(matches!(err, RobustError::LikelyNonSquareFree { .. }));
        assert!(err.to_string().contains("likely non-square-free"));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = BivariatePoly::from_real_terms(&[(3, 0, 0.3), (0, 3, 0.7), (1, 1, 0.2), (0, 0, 0.9), (2, 1, 0.4)]);
        let a = robust_construct(&p, &QualityParams::default(), 12).unwrap();
        let b = robust_construct(&p, &QualityParams::default(), 12).unwrap();
        assert_eq!(a, b);
    }
}
