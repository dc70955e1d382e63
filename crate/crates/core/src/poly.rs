//! Dense bivariate and univariate polynomials with complex coefficients.

use std::fmt;

use thiserror::Error;

use crate::linalg::{self, CMatrix, LinalgError, C64};

/// Relative tolerance used when trimming a polynomial to its true degree.
pub const TRIM_TOL: f64 = 1e-12;
/// Relative tolerance under which a root counts as zero.
pub const ZERO_ROOT_TOL: f64 = 1e-10;
/// Relative separation below which two roots count as coincident.
pub const SEPARATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("term x^{i} y^{j} exceeds the degree bound {n}")]
    TermOutOfRange { i: usize, j: usize, n: usize },
    #[error("polynomial is constant")]
    Constant,
    #[error("univariate polynomial has degree zero")]
    DegreeZero,
    #[error("coefficient p_0n = {0} is not zero")]
    NonzeroCorner(C64),
    #[error("root finding failed: {0}")]
    Eigen(#[from] LinalgError),
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[inline]
fn tri_len(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Bivariate polynomial `sum p_ij x^i y^j` over the triangle `i + j <= n`.
///
/// Coefficients are stored by total degree: row `d` holds
/// `p_{d,0}, p_{d-1,1}, ..., p_{0,d}`.
#[derive(Clone, PartialEq)]
pub struct BivariatePoly {
    n: usize,
    coeffs: Vec<C64>,
}

impl BivariatePoly {
    /// Zero polynomial with degree bound `n`.
    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: vec![C64::new(0.0, 0.0); tri_len(n)] }
    }

    pub fn constant(c: C64) -> Self {
        let mut p = Self::zero(0);
        p.coeffs[0] = c;
        p
    }

    /// Polynomial with degree bound `n` built from `(i, j, p_ij)` terms; repeated
    /// terms accumulate. The bound is kept as given even if the top terms vanish.
    pub fn with_degree_bound(
        n: usize,
        terms: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(n);
        for (i, j, c) in terms {
            if i + j > n {
                return Err(PolyError::TermOutOfRange { i, j, n });
            }
            p.coeffs[tri_index(i, j)] += c;
        }
        Ok(p)
    }

    /// Canonical constructor: like [`with_degree_bound`](Self::with_degree_bound)
    /// with the result trimmed to its true degree.
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let terms: Vec<_> = terms.into_iter().collect();
        let n = terms.iter().map(|&(i, j, _)| i + j).max().unwrap_or(0);
        Self::with_degree_bound(n, terms).expect("bound covers every term").trimmed()
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real_terms(terms: &[(usize, usize, f64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(i, j, c)| (i, j, C64::new(c, 0.0))))
    }

    /// Degree bound `n` (the size of the stored triangle).
    pub fn degree_bound(&self) -> usize {
        self.n
    }

    /// `p_ij`, zero outside the triangle.
    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        if i + j > self.n {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[tri_index(i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, c: C64) -> Result<(), PolyError> {
        if i + j > self.n {
            return Err(PolyError::TermOutOfRange { i, j, n: self.n });
        }
        self.coeffs[tri_index(i, j)] = c;
        Ok(())
    }

    /// Nonzero-or-not terms as `(i, j, p_ij)` ordered by total degree.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..=self.n).flat_map(move |d| (0..=d).map(move |j| (d - j, j, self.coeffs[tri_index(d - j, j)])))
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    /// True degree, ignoring total-degree rows whose coefficients are all
    /// below `TRIM_TOL * max|p_ij|`.
    pub fn degree(&self) -> usize {
        let tol = TRIM_TOL * self.max_abs();
        (0..=self.n)
            .rev()
            .find(|&d| (0..=d).any(|j| self.coeffs[tri_index(d - j, j)].norm() > tol))
            .unwrap_or(0)
    }

    /// Copy with the degree bound reduced to the true degree.
    pub fn trimmed(&self) -> Self {
        self.with_bound(self.degree())
    }

    /// Copy with a different degree bound; terms above a smaller bound are dropped.
    pub fn with_bound(&self, n: usize) -> Self {
        let mut out = Self::zero(n);
        let shared = tri_len(n.min(self.n));
        out.coeffs[..shared].copy_from_slice(&self.coeffs[..shared]);
        out
    }

    /// Evaluates with nested Horner schemes, over `y` inside and `x` outside.
    pub fn eval(&self, x: C64, y: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in (0..=self.n).rev() {
            let mut inner = C64::new(0.0, 0.0);
            for j in (0..=self.n - i).rev() {
                inner = inner * y + self.coeffs[tri_index(i, j)];
            }
            acc = acc * x + inner;
        }
        acc
    }

    /// Homogenized value `sum p_ij x^i y^j z^(n-i-j)` with respect to the degree bound.
    pub fn eval_homogeneous(&self, x: C64, y: C64, z: C64) -> C64 {
        let powers = |v: C64| {
            let mut out = vec![C64::new(1.0, 0.0); self.n + 1];
            for k in 1..=self.n {
                out[k] = out[k - 1] * v;
            }
            out
        };
        let (xp, yp, zp) = (powers(x), powers(y), powers(z));
        self.terms().map(|(i, j, c)| c * xp[i] * yp[j] * zp[self.n - i - j]).sum()
    }

    /// Partial derivative with respect to `x`.
    pub fn d_dx(&self) -> Self {
        let n = self.n.saturating_sub(1);
        let mut out = Self::zero(n);
        for (i, j, c) in self.terms().filter(|&(i, _, _)| i > 0) {
            out.coeffs[tri_index(i - 1, j)] = c * i as f64;
        }
        out
    }

    /// Partial derivative with respect to `y`.
    pub fn d_dy(&self) -> Self {
        let n = self.n.saturating_sub(1);
        let mut out = Self::zero(n);
        for (i, j, c) in self.terms().filter(|&(_, j, _)| j > 0) {
            out.coeffs[tri_index(i, j - 1)] = c * j as f64;
        }
        out
    }

    /// `self + other`, degree bound the larger of the two.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.with_bound(self.n.max(other.n));
        for (k, c) in other.coeffs.iter().enumerate() {
            out.coeffs[k] += c;
        }
        out
    }

    /// `self - other`, degree bound the larger of the two.
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.with_bound(self.n.max(other.n));
        for (k, c) in other.coeffs.iter().enumerate() {
            out.coeffs[k] -= c;
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }

    /// `(a x + b y) * self`, degree bound raised by one.
    pub fn mul_linear(&self, a: C64, b: C64) -> Self {
        let mut out = Self::zero(self.n + 1);
        for (i, j, c) in self.terms() {
            out.coeffs[tri_index(i + 1, j)] += a * c;
            out.coeffs[tri_index(i, j + 1)] += b * c;
        }
        out
    }

    /// Full product; degree bound is the sum of the bounds.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n + other.n);
        for (i, j, c) in self.terms() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for (k, l, d) in other.terms() {
                out.coeffs[tri_index(i + k, j + l)] += c * d;
            }
        }
        out
    }

    /// Homogeneous part of total degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        let mut out = Self::zero(d);
        if d <= self.n {
            for j in 0..=d {
                out.coeffs[tri_index(d - j, j)] = self.coeffs[tri_index(d - j, j)];
            }
        }
        out
    }

    /// `h(xi) = p_n0 xi^n + p_{n-1,1} xi^(n-1) + ... + p_0n`, the top-degree
    /// form read at `(xi, 1)`.
    pub fn boundary_univariate(&self) -> Result<UnivariatePoly, PolyError> {
        let n = self.n;
        if n == 0 {
            return Err(PolyError::Constant);
        }
        Ok(UnivariatePoly::new((0..=n).map(|j| self.coeff(n - j, j)).collect()))
    }

    /// `v(xi) = p_n0 xi^(n-1) + ... + p_{1,n-1}`, which equals `h(xi) / xi`
    /// when `p_0n` vanishes.
    pub fn reduced_boundary(&self) -> Result<UnivariatePoly, PolyError> {
        let n = self.n;
        if n == 0 {
            return Err(PolyError::Constant);
        }
        let corner = self.coeff(0, n);
        if corner.norm() > ZERO_ROOT_TOL * self.max_abs() {
            return Err(PolyError::NonzeroCorner(corner));
        }
        Ok(UnivariatePoly::new((0..n).map(|j| self.coeff(n - j, j)).collect()))
    }
}

impl fmt::Debug for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BivariatePoly(n={}; ", self.n)?;
        let mut first = true;
        for (i, j, c) in self.terms().filter(|t| t.2 != C64::new(0.0, 0.0)) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})x^{i}y^{j}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

/// Univariate polynomial, coefficients highest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariatePoly {
    coeffs: Vec<C64>,
}

impl UnivariatePoly {
    /// Builds a polynomial and strips exactly-zero leading coefficients.
    pub fn new(coeffs: Vec<C64>) -> Self {
        let first = coeffs.iter().position(|c| *c != C64::new(0.0, 0.0)).unwrap_or(coeffs.len().saturating_sub(1));
        let mut coeffs = coeffs[first.min(coeffs.len())..].to_vec();
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    /// `lead * prod (t - r)` expanded, in the order given.
    pub fn from_roots(lead: C64, roots: &[C64]) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            coeffs.push(C64::new(0.0, 0.0));
            for k in (1..coeffs.len()).rev() {
                let prev = coeffs[k - 1];
                coeffs[k] -= r * prev;
            }
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> C64 {
        self.coeffs[0]
    }

    /// Coefficient of `t^k`.
    pub fn coeff(&self, k: usize) -> C64 {
        let d = self.degree();
        if k > d {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[d - k]
        }
    }

    pub fn eval(&self, t: C64) -> C64 {
        self.coeffs.iter().fold(C64::new(0.0, 0.0), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        let d = self.degree();
        if d == 0 {
            return Self::new(vec![C64::new(0.0, 0.0)]);
        }
        Self::new(self.coeffs[..d].iter().enumerate().map(|(k, c)| c * (d - k) as f64).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// All roots with multiplicity, ordered by [`order_roots`].
    ///
    /// Roots are the eigenvalues of the balanced companion matrix, each
    /// polished by a guarded Newton step on the polynomial itself.
    pub fn roots(&self) -> Result<Vec<C64>, PolyError> {
        let d = self.degree();
        if d == 0 {
            return Err(PolyError::DegreeZero);
        }
        let lead = self.leading();
        let mut roots = if d == 1 {
            vec![-self.coeffs[1] / lead]
        } else {
            let mut companion = CMatrix::zeros(d, d);
            for k in 0..d {
                companion[(0, k)] = -self.coeffs[k + 1] / lead;
            }
            for k in 1..d {
                companion[(k, k - 1)] = C64::new(1.0, 0.0);
            }
            linalg::eigenvalues(&linalg::balance(&companion))?
        };
        self.polish(&mut roots);
        order_roots(&mut roots);
        Ok(roots)
    }

    fn polish(&self, roots: &mut [C64]) {
        if roots.len() < 2 {
            return;
        }
        let deriv = self.derivative();
        for k in 0..roots.len() {
            let nearest = roots
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != k)
                .map(|(_, r)| (r - roots[k]).norm())
                .fold(f64::INFINITY, f64::min);
            for _ in 0..2 {
                let r = roots[k];
                let value = self.eval(r);
                let slope = deriv.eval(r);
                if slope.norm() == 0.0 {
                    break;
                }
                let step = value / slope;
                let candidate = r - step;
                if step.norm() < 0.25 * nearest && self.eval(candidate).norm() < value.norm() {
                    roots[k] = candidate;
                } else {
                    break;
                }
            }
        }
    }
}

/// Sorts roots by real part then imaginary part, and moves a root that is
/// zero relative to the largest root to the last position.
pub fn order_roots(roots: &mut Vec<C64>) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if let Some(pos) = roots.iter().position(|r| r.norm() <= ZERO_ROOT_TOL * scale) {
        let zero = roots.remove(pos);
        roots.push(zero);
    }
}

/// Smallest pairwise distance between roots (infinite for fewer than two).
pub fn min_separation(roots: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for (k, a) in roots.iter().enumerate() {
        for b in &roots[k + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}

/// Whether the roots are pairwise separated by more than
/// `SEPARATION_TOL * (1 + max|root|)`.
pub fn roots_are_simple(roots: &[C64]) -> bool {
    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    min_separation(roots) > SEPARATION_TOL * (1.0 + scale)
}

/// Whether the root is zero relative to the scale of the root set.
pub fn is_zero_root(root: C64, roots: &[C64]) -> bool {
    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    root.norm() <= ZERO_ROOT_TOL * scale
}
