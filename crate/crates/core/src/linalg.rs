//! Dense complex linear algebra used by the construction and the solver.
//!
//! Everything here works on `nalgebra::DMatrix<Complex64>`. The generalized
//! eigensolver is a complex single-shift QZ iteration built from Givens
//! rotations: reduce `B` to upper triangular form, reduce the pair to
//! Hessenberg-triangular form, then iterate until `A` is upper triangular.
//! Standard eigenvalues are obtained by running the same iteration with
//! `B = I`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;

const EPS: f64 = f64::EPSILON;

/// Iteration budget per eigenvalue for the QZ sweep.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix dimensions do not match: {0}x{1} against {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("QZ iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

/// Plane rotation `G = [[c, s], [-conj(s), c]]` with real `c`.
#[derive(Debug, Clone, Copy)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    /// Rotation with `G * [a; b] = [r; 0]`.
    fn zeroing(a: C64, b: C64) -> Self {
        let nb = b.norm();
        if nb == 0.0 {
            return Self { c: 1.0, s: C64::new(0.0, 0.0) };
        }
        let na = a.norm();
        if na == 0.0 {
            return Self { c: 0.0, s: b.conj() / nb };
        }
        let norm = na.hypot(nb);
        Self { c: na / norm, s: (a / na) * b.conj() / norm }
    }

    #[inline]
    fn rotate(&self, x: C64, y: C64) -> (C64, C64) {
        (x * self.c + self.s * y, -self.s.conj() * x + y * self.c)
    }

    /// Left multiplication on rows `i` (keeper) and `j`, restricted to `cols`.
    fn apply_rows(&self, m: &mut CMatrix, i: usize, j: usize, cols: std::ops::Range<usize>) {
        for col in cols {
            let (x, y) = self.rotate(m[(i, col)], m[(j, col)]);
            m[(i, col)] = x;
            m[(j, col)] = y;
        }
    }

    /// Right multiplication by a unitary acting on columns `i` (keeper) and `j`,
    /// restricted to `rows`.
    fn apply_cols(&self, m: &mut CMatrix, i: usize, j: usize, rows: std::ops::Range<usize>) {
        for row in rows {
            let (x, y) = self.rotate(m[(row, i)], m[(row, j)]);
            m[(row, i)] = x;
            m[(row, j)] = y;
        }
    }
}

/// Generalized Schur form `Q^H A Z = S`, `Q^H B Z = T` with `S`, `T` upper
/// triangular. `Q` is not accumulated.
#[derive(Debug, Clone)]
pub struct GeneralizedSchur {
    pub s: CMatrix,
    pub t: CMatrix,
    pub z: Option<CMatrix>,
}

impl GeneralizedSchur {
    /// Diagonal pairs `(alpha, beta)`; eigenvalues are `alpha / beta`.
    pub fn eigenpairs(&self) -> Vec<(C64, C64)> {
        (0..self.s.nrows()).map(|k| (self.s[(k, k)], self.t[(k, k)])).collect()
    }
}

/// Eigenvalues and right eigenvectors of `A x = lambda B x` in homogeneous form.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    /// Unit 2-norm right eigenvectors stored as columns.
    pub vectors: CMatrix,
}

impl GeneralizedEigen {
    /// `alpha / beta`, infinite where `beta` vanishes.
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.alpha.iter().zip(&self.beta).map(|(a, b)| a / b).collect()
    }
}

fn check_pair(a: &CMatrix, b: &CMatrix) -> Result<(), LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.nrows(), a.ncols()));
    }
    if a.shape() != b.shape() {
        return Err(LinalgError::DimensionMismatch(a.nrows(), a.ncols(), b.nrows(), b.ncols()));
    }
    if a.iter().chain(b.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    Ok(())
}

/// Reduces `(a, b)` to generalized Schur form with the QZ iteration.
pub fn qz(a: &CMatrix, b: &CMatrix, want_z: bool) -> Result<GeneralizedSchur, LinalgError> {
    check_pair(a, b)?;
    let n = a.nrows();
    let mut a = a.clone();
    let mut b = b.clone();
    let mut z = want_z.then(|| CMatrix::identity(n, n));

    // B := Q^H B upper triangular.
    for j in 0..n {
        for i in (j + 1..n).rev() {
            if b[(i, j)] == C64::new(0.0, 0.0) {
                continue;
            }
            let g = Givens::zeroing(b[(i - 1, j)], b[(i, j)]);
            g.apply_rows(&mut b, i - 1, i, j..n);
            g.apply_rows(&mut a, i - 1, i, 0..n);
            b[(i, j)] = C64::new(0.0, 0.0);
        }
    }

    // Hessenberg-triangular reduction.
    for j in 0..n.saturating_sub(2) {
        for i in (j + 2..n).rev() {
            if a[(i, j)] == C64::new(0.0, 0.0) {
                continue;
            }
            let g = Givens::zeroing(a[(i - 1, j)], a[(i, j)]);
            g.apply_rows(&mut a, i - 1, i, j..n);
            g.apply_rows(&mut b, i - 1, i, i - 1..n);
            a[(i, j)] = C64::new(0.0, 0.0);

            let g = Givens::zeroing(b[(i, i)], b[(i, i - 1)]);
            g.apply_cols(&mut b, i, i - 1, 0..i + 1);
            g.apply_cols(&mut a, i, i - 1, 0..n);
            if let Some(z) = z.as_mut() {
                g.apply_cols(z, i, i - 1, 0..n);
            }
            b[(i, i - 1)] = C64::new(0.0, 0.0);
        }
    }

    qz_sweeps(&mut a, &mut b, z.as_mut())?;
    Ok(GeneralizedSchur { s: a, t: b, z })
}

fn qz_sweeps(a: &mut CMatrix, b: &mut CMatrix, mut z: Option<&mut CMatrix>) -> Result<(), LinalgError> {
    let n = a.nrows();
    if n <= 1 {
        return Ok(());
    }
    let anorm = a.norm().max(f64::MIN_POSITIVE);
    let bnorm = b.norm().max(f64::MIN_POSITIVE);
    let btol = EPS * bnorm;
    let max_sweeps = MAX_SWEEPS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut ihi = n - 1;

    while ihi > 0 {
        // Locate the active unreduced block [ilo, ihi].
        let mut ilo = 0;
        for k in (1..=ihi).rev() {
            let sub = a[(k, k - 1)].norm();
            let mut scale = a[(k - 1, k - 1)].norm() + a[(k, k)].norm();
            if scale == 0.0 {
                scale = anorm;
            }
            if sub <= EPS * scale {
                a[(k, k - 1)] = C64::new(0.0, 0.0);
                ilo = k;
                break;
            }
        }
        if ilo == ihi {
            ihi -= 1;
            since_deflation = 0;
            continue;
        }

        if let Some(k) = (ilo..=ihi).find(|&k| b[(k, k)].norm() <= btol) {
            b[(k, k)] = C64::new(0.0, 0.0);
            chase_infinite(a, b, z.as_deref_mut(), k, ilo, ihi);
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > max_sweeps {
            return Err(LinalgError::NoConvergence(total));
        }

        let shift = if since_deflation.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            a[(ihi, ihi)] / b[(ihi, ihi)] + a[(ihi, ihi - 1)] / b[(ihi - 1, ihi - 1)] * 1.5
        } else {
            wilkinson_shift(a, b, ihi)
        };

        let v0 = a[(ilo, ilo)] / b[(ilo, ilo)] - shift;
        let v1 = a[(ilo + 1, ilo)] / b[(ilo, ilo)];
        let g = Givens::zeroing(v0, v1);
        g.apply_rows(a, ilo, ilo + 1, ilo..n);
        g.apply_rows(b, ilo, ilo + 1, ilo..n);

        for k in ilo..ihi {
            let g = Givens::zeroing(b[(k + 1, k + 1)], b[(k + 1, k)]);
            let last = (k + 3).min(ihi + 1);
            g.apply_cols(a, k + 1, k, 0..last);
            g.apply_cols(b, k + 1, k, 0..k + 2);
            if let Some(z) = z.as_deref_mut() {
                g.apply_cols(z, k + 1, k, 0..n);
            }
            b[(k + 1, k)] = C64::new(0.0, 0.0);

            if k + 2 <= ihi {
                let g = Givens::zeroing(a[(k + 1, k)], a[(k + 2, k)]);
                g.apply_rows(a, k + 1, k + 2, k..n);
                g.apply_rows(b, k + 1, k + 2, k + 1..n);
                a[(k + 2, k)] = C64::new(0.0, 0.0);
            }
        }
    }
    Ok(())
}

/// Eigenvalue of the trailing 2x2 pencil closest to `a[ihi,ihi] / b[ihi,ihi]`.
fn wilkinson_shift(a: &CMatrix, b: &CMatrix, ihi: usize) -> C64 {
    let (a11, a12, a21, a22) = (a[(ihi - 1, ihi - 1)], a[(ihi - 1, ihi)], a[(ihi, ihi - 1)], a[(ihi, ihi)]);
    let (b11, b12, b22) = (b[(ihi - 1, ihi - 1)], b[(ihi - 1, ihi)], b[(ihi, ihi)]);
    let target = a22 / b22;
    let qa = b11 * b22;
    let qb = -(a11 * b22 + a22 * b11 - a21 * b12);
    let qc = a11 * a22 - a12 * a21;
    let disc = (qb * qb - qa * qc * 4.0).sqrt();
    let d = if (-qb + disc).norm() > (-qb - disc).norm() { -qb + disc } else { -qb - disc };
    if d.norm() == 0.0 {
        return target;
    }
    let r1 = d / (qa * 2.0);
    let r2 = if r1.norm() == 0.0 { target } else { qc / (qa * r1) };
    if (r1 - target).norm() <= (r2 - target).norm() {
        r1
    } else {
        r2
    }
}

/// Moves a zero diagonal entry of `b` at `k` to `ihi` and deflates an
/// infinite eigenvalue there.
fn chase_infinite(a: &mut CMatrix, b: &mut CMatrix, mut z: Option<&mut CMatrix>, k: usize, ilo: usize, ihi: usize) {
    let n = a.nrows();
    for j in k..ihi {
        let g = Givens::zeroing(b[(j, j + 1)], b[(j + 1, j + 1)]);
        g.apply_rows(b, j, j + 1, j + 1..n);
        g.apply_rows(a, j, j + 1, j.saturating_sub(1)..n);
        b[(j + 1, j + 1)] = C64::new(0.0, 0.0);
        if j > ilo {
            let g = Givens::zeroing(a[(j + 1, j)], a[(j + 1, j - 1)]);
            g.apply_cols(a, j, j - 1, 0..j + 2);
            g.apply_cols(b, j, j - 1, 0..j + 1);
            if let Some(z) = z.as_deref_mut() {
                g.apply_cols(z, j, j - 1, 0..n);
            }
            a[(j + 1, j - 1)] = C64::new(0.0, 0.0);
        }
    }
    let g = Givens::zeroing(a[(ihi, ihi)], a[(ihi, ihi - 1)]);
    g.apply_cols(a, ihi, ihi - 1, 0..ihi + 1);
    g.apply_cols(b, ihi, ihi - 1, 0..ihi);
    if let Some(z) = z {
        g.apply_cols(z, ihi, ihi - 1, 0..n);
    }
    a[(ihi, ihi - 1)] = C64::new(0.0, 0.0);
}

/// Full generalized eigendecomposition of `A x = lambda B x`.
pub fn generalized_eigen(a: &CMatrix, b: &CMatrix) -> Result<GeneralizedEigen, LinalgError> {
    let schur = qz(a, b, true)?;
    let n = a.nrows();
    let (s, t) = (&schur.s, &schur.t);
    let z = schur.z.as_ref().expect("Z requested");
    let snorm = s.norm();
    let tnorm = t.norm();
    let mut vectors = CMatrix::zeros(n, n);
    let mut y = vec![C64::new(0.0, 0.0); n];

    for k in 0..n {
        let (alpha, beta) = (s[(k, k)], t[(k, k)]);
        let small = (EPS * (beta.norm() * snorm + alpha.norm() * tnorm)).max(f64::MIN_POSITIVE);
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        y[k] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut sum = C64::new(0.0, 0.0);
            for l in j + 1..=k {
                sum += (beta * s[(j, l)] - alpha * t[(j, l)]) * y[l];
            }
            let mut d = beta * s[(j, j)] - alpha * t[(j, j)];
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            y[j] = -sum / d;
            let growth = y[j].norm();
            if growth > 1e100 {
                y[j..=k].iter_mut().for_each(|v| *v /= growth);
            }
        }
        let mut col = CMatrix::zeros(n, 1);
        for row in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..=k {
                acc += z[(row, l)] * y[l];
            }
            col[(row, 0)] = acc;
        }
        let norm = col.norm();
        if norm > 0.0 {
            col /= C64::new(norm, 0.0);
        }
        vectors.set_column(k, &col.column(0));
    }

    let (alpha, beta) = schur.eigenpairs().into_iter().unzip();
    Ok(GeneralizedEigen { alpha, beta, vectors })
}

/// Eigenvalues of a square matrix.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>, LinalgError> {
    let identity = CMatrix::identity(m.nrows(), m.ncols());
    let schur = qz(m, &identity, false)?;
    Ok(schur.eigenpairs().into_iter().map(|(a, b)| a / b).collect())
}

/// Diagonal similarity scaling (powers of two) that equalizes row and column
/// norms. Eigenvalues are unchanged.
pub fn balance(m: &CMatrix) -> CMatrix {
    let mag = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].l1_norm());
    let d = balancing_factors(&mag);
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (d[j] / d[i]))
}

/// Powers of two `d` such that `D^-1 M D` (entry `m_ij d_j / d_i`) has
/// roughly equal off-diagonal row and column sums, for a matrix of entry
/// magnitudes `mag`.
pub fn balancing_factors(mag: &DMatrix<f64>) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    let n = mag.nrows();
    let mut m = mag.clone();
    let mut d = vec![1.0; n];
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                c += m[(j, i)];
                r += m[(i, j)];
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / RADIX {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            while c > r * RADIX {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
    d
}

/// Infinity norm (maximum absolute row sum).
pub fn inf_norm(m: &CMatrix) -> f64 {
    m.row_iter().map(|row| row.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Determinant by LU factorization with partial pivoting.
pub fn det(m: &CMatrix) -> C64 {
    if m.nrows() == 0 {
        return C64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// 2-norm condition number from the singular values; infinite when singular.
pub fn condition_number(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Block diagonal matrix of the given blocks.
pub fn block_diagonal<'a>(blocks: impl IntoIterator<Item = &'a CMatrix> + Clone) -> CMatrix {
    let size: usize = blocks.clone().into_iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(size, size);
    let mut offset = 0;
    for block in blocks {
        let m = block.nrows();
        out.view_mut((offset, offset), (m, m)).copy_from(block);
        offset += m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pseudo_random(n: usize, seed: u64) -> CMatrix {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    fn backward_error(a: &CMatrix, b: &CMatrix, eig: &GeneralizedEigen) -> f64 {
        let (na, nb) = (a.norm(), b.norm());
        (0..a.nrows())
            .map(|k| {
                let x = eig.vectors.column(k).into_owned();
                let r = a * &x * eig.beta[k] - b * &x * eig.alpha[k];
                r.norm() / (eig.beta[k].norm() * na + eig.alpha[k].norm() * nb)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn schur_form_is_triangular_and_backward_stable() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (17, 4), (40, 5)] {
            let a = pseudo_random(n, seed);
            let b = pseudo_random(n, seed + 100);
            let schur = qz(&a, &b, true).unwrap();
            for i in 0..n {
                for j in 0..i {
                    assert_eq!(schur.s[(i, j)], c(0.0, 0.0));
                    assert_eq!(schur.t[(i, j)], c(0.0, 0.0));
                }
            }
            let eig = generalized_eigen(&a, &b).unwrap();
            assert!(backward_error(&a, &b, &eig) < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn matches_reference_eigenvalues() {
        // Reference values from scipy.linalg.eigvals (LAPACK zggev).
        let a = CMatrix::from_row_slice(
            3,
            3,
            &[c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0), c(0.5, 0.0), c(-1.0, 1.0), c(3.0, 0.0), c(0.0, 2.0), c(1.0, 1.0), c(1.0, 0.0)],
        );
        let b = CMatrix::from_row_slice(
            3,
            3,
            &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, -1.0), c(3.0, 0.0)],
        );
        let mut got = generalized_eigen(&a, &b).unwrap().eigenvalues();
        let mut expected = REFERENCE_3X3.to_vec();
        let key = |z: &C64| (z.re, z.im);
        got.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        expected.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).norm() < 1e-12, "{g} vs {e}");
        }
    }

    const REFERENCE_3X3: [C64; 3] = [
        C64 { re: 1.1344133141067383, im: 0.7052750240082514 },
        C64 { re: 0.04130697652588589, im: -0.2011590110474268 },
        C64 { re: -3.238220290632624, im: 0.5583839870391766 },
    ];

    #[test]
    fn singular_b_yields_infinite_eigenvalue() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let eig = generalized_eigen(&a, &b).unwrap();
        let finite: Vec<_> = eig.eigenvalues().into_iter().filter(|z| z.re.is_finite() && z.norm() < 1e12).collect();
        // det(A - lambda B) = (1 - lambda) * 4 - 6 = -2 - 4 lambda
        assert_eq!(finite.len(), 1);
        assert!((finite[0] - c(-0.5, 0.0)).norm() < 1e-14);
        assert!(eig.beta.iter().any(|b| b.norm() == 0.0));
    }

    #[test]
    fn standard_eigenvalues_of_triangular_matrix() {
        let m = CMatrix::from_row_slice(3, 3, &[c(1.0, 0.0), c(5.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 3.0)]);
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((ev[0] - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 3.0)).norm() < 1e-14);
        assert!((ev[2] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn balancing_preserves_spectrum() {
        let mut m = pseudo_random(6, 9);
        for j in 0..6 {
            m[(0, j)] *= 1e6;
            m[(j, 0)] *= 1e-6;
        }
        let bal = balance(&m);
        assert!(inf_norm(&bal) < inf_norm(&m));
        let mut e1 = eigenvalues(&m).unwrap();
        let mut e2 = eigenvalues(&bal).unwrap();
        let key = |z: &C64| (z.re, z.im);
        e1.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        e2.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (x, y) in e1.iter().zip(&e2) {
            assert!((x - y).norm() < 1e-8 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn block_diagonal_layout() {
        let a = CMatrix::from_element(1, 1, c(2.0, 0.0));
        let b = CMatrix::from_element(2, 2, c(1.0, 1.0));
        let d = block_diagonal([&a, &b]);
        assert_eq!(d.shape(), (3, 3));
        assert_eq!(d[(0, 0)], c(2.0, 0.0));
        assert_eq!(d[(0, 1)], c(0.0, 0.0));
        assert_eq!(d[(2, 1)], c(1.0, 1.0));
        assert_eq!(det(&d), c(2.0, 0.0) * det(&b));
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let a = CMatrix::zeros(2, 2);
        let b = CMatrix::zeros(3, 3);
        assert!(matches!(qz(&a, &b, false), Err(LinalgError::DimensionMismatch(..))));
    }
}
