//! Projective changes of variables that bring a square-free polynomial into
//! the normal form required by the construction, and the matching pull-back
//! of a representation to the original variables.
//!
//! A transform `T` maps homogeneous coordinates as `[x; y; z] = T [x~; y~; z~]`.
//! The normal form asks for
//!
//! - `p_n0 != 0`,
//! - simple roots of `v(xi) = p_n0 xi^(n-1) + ... + p_{1,n-1}`, at most one of
//!   them zero,
//! - `p_0n = p_{0,n-1} = 0`.

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::C64;
use crate::minrep::PencilRep;
use crate::poly::{self, BivariatePoly, PolyError, UnivariatePoly};

/// Number of random substitutions tried before giving up.
pub const MAX_RANDOM_ATTEMPTS: usize = 5;
/// Random transforms with a larger condition number are redrawn.
pub const MAX_RANDOM_CONDITION: f64 = 1e6;
/// Transforms with a larger condition number are treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;
/// Shift candidates need `|h'(s)|` at least this fraction of the largest.
pub const SLOPE_RATIO: f64 = 1e-2;
/// Relative size under which a coefficient counts as zero in the normal form.
pub const COEFF_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("transform is singular (condition number {0:.3e})")]
    Singular(f64),
    #[error("polynomial is constant")]
    Constant,
    #[error("leading coefficient p_n0 vanishes")]
    ZeroLeading,
    #[error("boundary polynomial has a multiple root")]
    MultipleRoot,
    #[error("shifted coefficients p_0n, p_0,n-1 did not cancel (residual {0:.3e})")]
    Cancellation(f64),
    #[error("likely non-square-free: no normal form after {attempts} random substitutions")]
    LikelyNonSquareFree { attempts: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Why a polynomial is not in normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NormalFormViolation {
    #[error("degree must be at least 2")]
    DegreeTooSmall,
    #[error("p_n0 is zero")]
    LeadingZero,
    #[error("p_0n is not zero")]
    CornerNonzero,
    #[error("p_0,n-1 is not zero")]
    SubCornerNonzero,
    #[error("roots of v are not simple")]
    MultipleRoots,
    #[error("root finding for v failed")]
    RootFinding,
}

/// Invertible 3x3 complex change of homogeneous coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveTransform {
    matrix: Matrix3<C64>,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

impl ProjectiveTransform {
    pub fn new(matrix: Matrix3<C64>) -> Result<Self, TransformError> {
        let t = Self { matrix };
        let cond = t.condition_number();
        if !cond.is_finite() || cond > SINGULAR_CONDITION {
            return Err(TransformError::Singular(cond));
        }
        Ok(t)
    }

    pub fn identity() -> Self {
        Self { matrix: Matrix3::identity() }
    }

    /// Exchanges the roles of `x` and `y`.
    pub fn swap_xy() -> Self {
        let (o, z) = (one(), zero());
        Self { matrix: Matrix3::new(z, o, z, o, z, z, z, z, o) }
    }

    /// `x = x~ + s y~ + t z~`, `y = y~`, `z = z~`.
    pub fn shear(s: C64, t: C64) -> Self {
        let (o, z) = (one(), zero());
        Self { matrix: Matrix3::new(o, s, t, z, o, z, z, z, o) }
    }

    /// Haar-distributed unitary matrix: QR of a complex Gaussian matrix with
    /// the phases of `R`'s diagonal moved into `Q`. Unitary substitutions keep
    /// the Bombieri norm of the homogeneous form, so coefficients do not grow.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        loop {
            let g = Matrix3::from_fn(|_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re * scale, im * scale)
            });
            if (Self { matrix: g }).condition_number() > MAX_RANDOM_CONDITION {
                continue;
            }
            let qr = g.qr();
            let (mut q, r) = (qr.q(), qr.r());
            for j in 0..3 {
                let d = r[(j, j)];
                let phase = d / d.norm();
                for i in 0..3 {
                    q[(i, j)] *= phase;
                }
            }
            return Self { matrix: q };
        }
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.matrix
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == Matrix3::identity()
    }

    pub fn condition_number(&self) -> f64 {
        let sv = self.matrix.singular_values();
        let min = sv.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            sv.max() / min
        }
    }

    pub fn inverse(&self) -> Result<Matrix3<C64>, TransformError> {
        self.matrix.try_inverse().ok_or(TransformError::Singular(f64::INFINITY))
    }

    /// Substitution `self` followed by `next`: `p o self o next`.
    pub fn then(&self, next: &Self) -> Self {
        Self { matrix: self.matrix * next.matrix }
    }

    /// Maps transformed coordinates `(x~, y~, z~)` to original ones.
    pub fn map_point(&self, x: C64, y: C64, z: C64) -> (C64, C64, C64) {
        let v = self.matrix * nalgebra::Vector3::new(x, y, z);
        (v[0], v[1], v[2])
    }
}

/// Rewrites `p` in the new variables: `p~(x~, y~) = p_h(T [x~; y~; 1])` with
/// `p_h` homogenized to the degree bound of `p`. The result keeps that bound.
pub fn apply_transform(p: &BivariatePoly, t: &ProjectiveTransform) -> Result<BivariatePoly, TransformError> {
    let cond = t.condition_number();
    if !cond.is_finite() || cond > SINGULAR_CONDITION {
        return Err(TransformError::Singular(cond));
    }
    let n = p.degree_bound();
    let m = t.matrix();
    let linear = |row: usize| {
        BivariatePoly::with_degree_bound(1, [(1, 0, m[(row, 0)]), (0, 1, m[(row, 1)]), (0, 0, m[(row, 2)])])
            .expect("degree one terms")
    };
    let powers = |form: BivariatePoly| {
        let mut out = vec![BivariatePoly::constant(one())];
        for k in 1..=n {
            let next = out[k - 1].mul(&form);
            out.push(next);
        }
        out
    };
    let (px, py, pz) = (powers(linear(0)), powers(linear(1)), powers(linear(2)));

    let mut out = BivariatePoly::zero(n);
    for i in 0..=n {
        for j in 0..=n - i {
            let c = p.coeff(i, j);
            if c == zero() {
                continue;
            }
            let term = px[i].mul(&py[j]).mul(&pz[n - i - j]).scale(c);
            out = out.add(&term);
        }
    }
    Ok(out.with_bound(n))
}

/// Representation of the original polynomial from one of the transformed
/// polynomial: with `S = T^-1`,
/// `B' = s11 B + s21 C + s31 A`, `C' = s12 B + s22 C + s32 A`,
/// `A' = s13 B + s23 C + s33 A`.
pub fn pull_back(rep: &PencilRep, t: &ProjectiveTransform) -> Result<PencilRep, TransformError> {
    let cond = t.condition_number();
    if !cond.is_finite() || cond > SINGULAR_CONDITION {
        return Err(TransformError::Singular(cond));
    }
    if t.is_identity() {
        return Ok(rep.clone());
    }
    let s = t.inverse()?;
    let combine = |col: usize| &rep.b * s[(0, col)] + &rep.c * s[(1, col)] + &rep.a * s[(2, col)];
    Ok(PencilRep::new(combine(2), combine(0), combine(1)).expect("same shapes"))
}

/// Result of bringing a polynomial into normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationRecord {
    /// Composition of every substitution applied.
    pub transform: ProjectiveTransform,
    pub normalized: BivariatePoly,
    pub shift_s: C64,
    pub shift_t: C64,
}

/// Checks the normal-form conditions and returns the ordered roots of `v`.
pub fn check_normal_form(p: &BivariatePoly) -> Result<Vec<C64>, NormalFormViolation> {
    let n = p.degree_bound();
    if n < 2 {
        return Err(NormalFormViolation::DegreeTooSmall);
    }
    let scale = p.max_abs();
    if p.coeff(n, 0).norm() <= COEFF_ZERO_TOL * scale {
        return Err(NormalFormViolation::LeadingZero);
    }
    if p.coeff(0, n).norm() > COEFF_ZERO_TOL * scale {
        return Err(NormalFormViolation::CornerNonzero);
    }
    if p.coeff(0, n - 1).norm() > COEFF_ZERO_TOL * scale {
        return Err(NormalFormViolation::SubCornerNonzero);
    }
    let v = p.reduced_boundary().map_err(|_| NormalFormViolation::CornerNonzero)?;
    let roots = v.roots().map_err(|_| NormalFormViolation::RootFinding)?;
    if !poly::roots_are_simple(&roots) {
        return Err(NormalFormViolation::MultipleRoots);
    }
    Ok(roots)
}

/// Whether the roots of the top-degree form `h` are simple (the line `z = 0`
/// meets the curve in `n` distinct points).
pub fn boundary_roots_simple(p: &BivariatePoly) -> bool {
    match p.boundary_univariate().and_then(|h| h.roots()) {
        Ok(roots) => poly::roots_are_simple(&roots),
        Err(_) => false,
    }
}

/// Applies `x = x~ + s y~ + t z~` with `s` a root of `h` and `t` chosen so
/// that `p~_0n = p~_{0,n-1} = 0`.
pub fn shift_substitution(p: &BivariatePoly) -> Result<NormalizationRecord, TransformError> {
    let n = p.degree_bound();
    if n == 0 {
        return Err(TransformError::Constant);
    }
    let scale = p.max_abs();
    if p.coeff(n, 0).norm() <= COEFF_ZERO_TOL * scale {
        return Err(TransformError::ZeroLeading);
    }
    let h = p.boundary_univariate()?;
    let roots = h.roots()?;
    if !poly::roots_are_simple(&roots) {
        return Err(TransformError::MultipleRoot);
    }
    let dh = h.derivative();
    let slopes: Vec<f64> = roots.iter().map(|&r| dh.eval(r).norm()).collect();
    let steepest = slopes.iter().copied().fold(0.0, f64::max);
    if steepest <= COEFF_ZERO_TOL * h.max_abs() {
        return Err(TransformError::MultipleRoot);
    }
    // Among roots with a well-conditioned t, keep the shift whose result has
    // the smallest coefficients; growth there is inherited by the pencil.
    let mut best: Option<NormalizationRecord> = None;
    for (&root, &slope) in roots.iter().zip(&slopes) {
        if slope < SLOPE_RATIO * steepest {
            continue;
        }
        let Ok(record) = shift_at_root(p, root) else { continue };
        if best.as_ref().is_none_or(|b| record.normalized.max_abs() < b.normalized.max_abs()) {
            best = Some(record);
        }
    }
    best.ok_or(TransformError::MultipleRoot)
}

/// The shift for a chosen root `s` of `h`, with
/// `t = -(p_{n-1,0} s^(n-1) + ... + p_{0,n-1}) / h'(s)`.
pub fn shift_at_root(p: &BivariatePoly, s: C64) -> Result<NormalizationRecord, TransformError> {
    let n = p.degree_bound();
    if n == 0 {
        return Err(TransformError::Constant);
    }
    let slope = p.boundary_univariate()?.derivative().eval(s);
    if slope == zero() {
        return Err(TransformError::MultipleRoot);
    }
    let next_form = UnivariatePoly::new((0..n).map(|j| p.coeff(n - 1 - j, j)).collect());
    let t = -next_form.eval(s) / slope;

    let shear = ProjectiveTransform::shear(s, t);
    let mut normalized = apply_transform(p, &shear)?;
    let tol = COEFF_ZERO_TOL * normalized.max_abs();
    let leftover = normalized.coeff(0, n).norm().max(normalized.coeff(0, n - 1).norm());
    if leftover > tol {
        return Err(TransformError::Cancellation(leftover));
    }
    normalized.set_coeff(0, n, zero())?;
    normalized.set_coeff(0, n - 1, zero())?;
    Ok(NormalizationRecord { transform: shear, normalized, shift_s: s, shift_t: t })
}

fn zero_corner(p: &BivariatePoly) -> BivariatePoly {
    let n = p.degree_bound();
    let mut out = p.clone();
    out.set_coeff(0, n, zero()).expect("in range");
    if n >= 1 {
        out.set_coeff(0, n - 1, zero()).expect("in range");
    }
    out
}

/// Brings `p` into normal form, trying the identity, then a plain shift,
/// then up to [`MAX_RANDOM_ATTEMPTS`] random substitutions drawn from a
/// generator seeded with `seed`.
pub fn normalize(p: &BivariatePoly, seed: u64) -> Result<NormalizationRecord, TransformError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    normalize_with_rng(p, &mut rng)
}

pub fn normalize_with_rng<R: Rng + ?Sized>(p: &BivariatePoly, rng: &mut R) -> Result<NormalizationRecord, TransformError> {
    let p = p.trimmed();
    let n = p.degree_bound();
    if n == 0 {
        return Err(TransformError::Constant);
    }

    if n >= 2 && check_normal_form(&p).is_ok() {
        return Ok(NormalizationRecord {
            transform: ProjectiveTransform::identity(),
            normalized: zero_corner(&p),
            shift_s: zero(),
            shift_t: zero(),
        });
    }

    let attempt = |candidate: &BivariatePoly, base: ProjectiveTransform| -> Option<NormalizationRecord> {
        if candidate.degree() < n {
            return None;
        }
        let record = shift_substitution(candidate).ok()?;
        if n >= 2 && check_normal_form(&record.normalized).is_err() {
            return None;
        }
        Some(NormalizationRecord { transform: base.then(&record.transform), ..record })
    };

    if let Some(record) = attempt(&p, ProjectiveTransform::identity()) {
        return Ok(record);
    }
    for _ in 0..MAX_RANDOM_ATTEMPTS {
        let t = ProjectiveTransform::random(rng);
        let candidate = apply_transform(&p, &t)?;
        if let Some(record) = attempt(&candidate, t) {
            return Ok(record);
        }
    }
    Err(TransformError::LikelyNonSquareFree { attempts: MAX_RANDOM_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_poly(n: usize, rng: &mut ChaCha8Rng) -> BivariatePoly {
        let terms: Vec<_> = (0..=n)
            .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
            .map(|(i, j)| (i, j, C64::new(rng.random::<f64>(), rng.random::<f64>())))
            .collect();
        BivariatePoly::from_terms(terms)
    }

    /// Direct summation of the homogenized polynomial at `T (x, y, 1)`.
    fn eval_through(p: &BivariatePoly, t: &ProjectiveTransform, x: C64, y: C64) -> C64 {
        let (u, v, w) = t.map_point(x, y, c(1.0));
        let n = p.degree_bound();
        p.terms().map(|(i, j, a)| a * u.powu(i as u32) * v.powu(j as u32) * w.powu((n - i - j) as u32)).sum()
    }

    #[test]
    fn identity_leaves_polynomial_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_poly(4, &mut rng);
        let q = apply_transform(&p, &ProjectiveTransform::identity()).unwrap();
        assert!(q.sub(&p).max_abs() < 1e-15);
    }

    #[test]
    fn swap_transposes_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_poly(5, &mut rng);
        let q = apply_transform(&p, &ProjectiveTransform::swap_xy()).unwrap();
        for (i, j, a) in p.terms() {
            assert_eq!(q.coeff(j, i), a);
        }
    }

    #[test]
    fn random_transform_agrees_with_evaluation_through_t() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_poly(7, &mut rng);
        let t = ProjectiveTransform::random(&mut rng);
        let q = apply_transform(&p, &t).unwrap();
        for _ in 0..100 {
            let (x, y) = (C64::new(rng.random(), rng.random()), C64::new(rng.random(), rng.random()));
            let expected = eval_through(&p, &t, x, y);
            assert!((q.eval(x, y) - expected).norm() <= 1e-10 * expected.norm().max(1.0));
        }
    }

    #[test]
    fn singular_transform_is_rejected() {
        let m = Matrix3::from_fn(|i, _| c(i as f64));
        assert!(matches!(ProjectiveTransform::new(m), Err(TransformError::Singular(_))));
        let p = BivariatePoly::from_real_terms(&[(1, 0, 1.0)]);
        let t = ProjectiveTransform { matrix: m };
        assert!(apply_transform(&p, &t).is_err());
    }

    #[test]
    fn shift_at_zero_root_is_identity() {
        // h(xi) = xi (xi - 1)(xi - 2) and p_02 = 0 already.
        let p = BivariatePoly::from_real_terms(&[(3, 0, 1.0), (2, 1, -3.0), (1, 2, 2.0), (1, 0, 1.0), (0, 0, 1.0)]);
        let record = shift_at_root(&p, c(0.0)).unwrap();
        assert_eq!(record.shift_t, c(0.0));
        assert!(record.transform.is_identity());
        assert_eq!(record.normalized, p);
    }

    #[test]
    fn shift_cancels_corner_of_cubic() {
        // (x - y)(x - 2y)(x - 3y) + 1
        let mut cubic = BivariatePoly::constant(c(1.0));
        for r in [1.0, 2.0, 3.0] {
            cubic = cubic.mul_linear(c(1.0), c(-r));
        }
        let p = cubic.add(&BivariatePoly::constant(c(1.0)));
        let record = shift_substitution(&p).unwrap();
        // Independent check: expand p(x + s y + t, y) directly.
        let (s, t) = (record.shift_s, record.shift_t);
        let direct = apply_transform(&p, &ProjectiveTransform::shear(s, t)).unwrap();
        assert!(direct.coeff(0, 3).norm() < 1e-12);
        assert!(direct.coeff(0, 2).norm() < 1e-12);
        assert_eq!(record.normalized.coeff(0, 3), c(0.0));
        assert_eq!(record.normalized.coeff(0, 2), c(0.0));
        assert_eq!(record.normalized.coeff(3, 0), c(1.0));
    }

    #[test]
    fn shift_moves_boundary_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_poly(6, &mut rng);
        let record = shift_substitution(&p).unwrap();
        assert!((record.normalized.coeff(6, 0) - p.coeff(6, 0)).norm() < 1e-14);
        let old = p.boundary_univariate().unwrap().roots().unwrap();
        let new = record.normalized.boundary_univariate().unwrap().roots().unwrap();
        for r in &old {
            let shifted = r - record.shift_s;
            let best = new.iter().map(|q| (q - shifted).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8 * (1.0 + r.norm()), "{r}");
        }
    }

    #[test]
    fn shift_rejects_multiple_root() {
        let p = BivariatePoly::from_real_terms(&[(2, 0, 1.0), (1, 1, 2.0), (0, 2, 1.0), (0, 0, 1.0)]);
        assert_eq!(shift_substitution(&p), Err(TransformError::MultipleRoot));
    }

    #[test]
    fn normalize_circle() {
        let p = BivariatePoly::from_real_terms(&[(2, 0, 1.0), (0, 2, 1.0), (0, 0, 1.0)]);
        let record = normalize(&p, 0).unwrap();
        let roots = check_normal_form(&record.normalized).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(record.normalized.coeff(2, 0).norm() > 0.0);
    }

    #[test]
    fn normalize_flags_square() {
        let p = BivariatePoly::from_real_terms(&[(2, 0, 1.0), (1, 1, 2.0), (0, 2, 1.0)]);
        assert_eq!(normalize(&p, 0), Err(TransformError::LikelyNonSquareFree { attempts: MAX_RANDOM_ATTEMPTS }));
    }

    #[test]
    fn normalize_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_poly(5, &mut rng);
        let first = normalize(&p, 7).unwrap();
        let second = normalize(&first.normalized, 7).unwrap();
        assert!(second.transform.is_identity());
        assert_eq!(second.normalized, first.normalized);
    }

    #[test]
    fn normalize_is_deterministic() {
        let p = BivariatePoly::from_real_terms(&[(2, 0, 0.0), (1, 1, 1.0), (0, 2, 1.0), (0, 0, 1.0)]);
        let a = normalize(&p, 11).unwrap();
        let b = normalize(&p, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_leading_coefficient_triggers_random_transform() {
        // x y + y^2 + 1 has p_20 = 0.
        let p = BivariatePoly::from_real_terms(&[(1, 1, 1.0), (0, 2, 1.0), (0, 0, 1.0)]);
        let record = normalize(&p, 3).unwrap();
        assert!(!record.transform.is_identity());
        check_normal_form(&record.normalized).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let (x, y) = (C64::new(rng.random(), rng.random()), C64::new(rng.random(), rng.random()));
            let expected = eval_through(&p, &record.transform, x, y);
            assert!((record.normalized.eval(x, y) - expected).norm() < 1e-9 * (1.0 + expected.norm()));
        }
    }

    #[test]
    fn square_factor_always_gives_multiple_boundary_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let square = BivariatePoly::from_real_terms(&[(2, 0, 1.0), (1, 1, 2.0), (0, 2, 1.0)]);
        let other = random_poly(2, &mut rng);
        let p = square.mul(&other);
        for _ in 0..5 {
            let t = ProjectiveTransform::random(&mut rng);
            let q = apply_transform(&p, &t).unwrap();
            assert!(!boundary_roots_simple(&q));
        }
    }

    #[test]
    fn pull_back_identity_and_swap() {
        let a = CMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64));
        let b = CMatrix::from_fn(2, 2, |i, j| c((3 * i + j) as f64 + 1.0));
        let cm = CMatrix::from_fn(2, 2, |i, j| c(i as f64 - j as f64));
        let rep = PencilRep::new(a.clone(), b.clone(), cm.clone()).unwrap();
        assert_eq!(pull_back(&rep, &ProjectiveTransform::identity()).unwrap(), rep);
        let swapped = pull_back(&rep, &ProjectiveTransform::swap_xy()).unwrap();
        assert_eq!(swapped.a, a);
        assert_eq!(swapped.b, cm);
        assert_eq!(swapped.c, b);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_poly(3, &mut rng);
        let t1 = ProjectiveTransform::random(&mut rng);
        let t2 = ProjectiveTransform::random(&mut rng);
        let sequential = apply_transform(&apply_transform(&p, &t1).unwrap(), &t2).unwrap();
        let composed = apply_transform(&p, &t1.then(&t2)).unwrap();
        assert!(sequential.sub(&composed).max_abs() < 1e-12 * sequential.max_abs());
    }
}
