//! Construction of a size-`n` determinantal representation
//! `p(x, y) = det(A + x B + y C)` for a polynomial of degree `n` in normal form.
//!
//! The construction builds bivariate polynomials `q_0 = 1, q_1, ..., q_{n-1}`
//! linked by `q_j = sum_l f_{jl} q_{j-l}` with linear forms
//! `f_{jl} = alpha_{jl} x + beta_{jl} y`, and peels off one degree of the
//! residual `r = p - p_n0 x q_{n-1} - sum gamma_j q_j` per step. The final
//! residual is affine in `x`, and the coefficients are assembled into a
//! companion-like pencil:
//!
//! ```text
//!     | r00 + r10 x   gamma_1 ... gamma_{n-2}      p_n0 x |
//!     |   -f_11          1                                |
//! M = |   -f_22        -f_21   1                          |
//!     |    ...                       ...                  |
//!     | -f_{n-1,n-1}   ...          -f_{n-1,1}      1     |
//! ```

use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{self, CMatrix, C64};
use crate::poly::{BivariatePoly, UnivariatePoly};
use crate::transform::{self, NormalFormViolation};

/// Relative tolerance on `|r_{0,n-k}|` after the gamma step.
pub const ANNIHILATION_TOL: f64 = 1e-10;
/// Beta systems with a larger infinity-norm condition number are rejected.
pub const MAX_BETA_CONDITION: f64 = 1e10;
/// Diagonal entries of `W` below this fraction of `max |W|` are singular.
pub const PIVOT_TOL: f64 = 1e-12;
/// `g` must have no `t^(n-k)` term; relative tolerance for that check.
pub const G_LEADING_TOL: f64 = 1e-8;
/// Terms of degree two or more left in the final residual, relative to `|p|`.
pub const FINAL_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShapeError {
    #[error("A, B, C must be square matrices of one size (got {0:?}, {1:?}, {2:?})")]
    Mismatch((usize, usize), (usize, usize), (usize, usize)),
    #[error("empty representation")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("polynomial is constant")]
    Constant,
    #[error("not in normal form: {0}")]
    NotNormal(#[from] NormalFormViolation),
    #[error("step {k}: root xi_{index} is zero")]
    ZeroRoot { k: usize, index: usize },
    #[error("step {k}: beta system is ill-conditioned (condition {condition:.3e})")]
    IllConditioned { k: usize, condition: f64 },
    #[error("step {k}: zero pivot in row {row} of the beta system")]
    SingularPivot { k: usize, row: usize },
    #[error("step {k}: g has a leading term {leading:.3e}")]
    InconsistentG { k: usize, leading: f64 },
    #[error("step {k}: y^(n-k) coefficient not annihilated (residual {residual:.3e})")]
    Annihilation { k: usize, residual: f64 },
    #[error("final residual is not affine in x (largest stray term {0:.3e})")]
    ResidualNotReduced(f64),
}

/// `A + x B + y C` with square matrices of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilRep {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
}

impl PencilRep {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix) -> Result<Self, ShapeError> {
        let n = a.nrows();
        let square = |m: &CMatrix| m.nrows() == n && m.ncols() == n;
        if !(square(&a) && square(&b) && square(&c)) {
            return Err(ShapeError::Mismatch(a.shape(), b.shape(), c.shape()));
        }
        if n == 0 {
            return Err(ShapeError::Empty);
        }
        Ok(Self { a, b, c })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn at(&self, x: C64, y: C64) -> CMatrix {
        &self.a + &self.b * x + &self.c * y
    }

    pub fn det_at(&self, x: C64, y: C64) -> C64 {
        linalg::det(&self.at(x, y))
    }

    /// `max(|A|_inf, |B|_inf, |C|_inf)`.
    pub fn max_inf_norm(&self) -> f64 {
        linalg::inf_norm(&self.a).max(linalg::inf_norm(&self.b)).max(linalg::inf_norm(&self.c))
    }

    /// Diagonal similarity `D^-1 (A, B, C) D` with power-of-two `D`, chosen to
    /// equalize row and column sums of `|A| + |B| + |C|`. The determinant is
    /// unchanged, and the scaling itself introduces no rounding.
    pub fn balanced(&self) -> Self {
        let n = self.order();
        let mag = DMatrix::from_fn(n, n, |i, j| self.a[(i, j)].l1_norm() + self.b[(i, j)].l1_norm() + self.c[(i, j)].l1_norm());
        let d = linalg::balancing_factors(&mag);
        let scale = |m: &CMatrix| CMatrix::from_fn(n, n, |i, j| m[(i, j)] * (d[j] / d[i]));
        Self { a: scale(&self.a), b: scale(&self.b), c: scale(&self.c) }
    }
}

impl fmt::Display for PencilRep {
    /// Entry-wise affine forms, one matrix row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.order();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| affine_form(self.a[(i, j)], self.b[(i, j)], self.c[(i, j)]))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn affine_form(a: C64, b: C64, c: C64) -> String {
    let mut out = String::new();
    for (coef, var) in [(a, ""), (b, "x"), (c, "y")] {
        if coef.norm() == 0.0 {
            continue;
        }
        let (negative, body) = if coef.im == 0.0 {
            let mag = coef.re.abs();
            let num = if mag == 1.0 && !var.is_empty() { String::new() } else { format!("{mag}") };
            (coef.re < 0.0, num)
        } else {
            (false, format!("({coef})"))
        };
        match (out.is_empty(), negative) {
            (true, true) => out.push('-'),
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
            (true, false) => {}
        }
        out.push_str(&body);
        out.push_str(var);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// The unknowns of the construction, 1-based as in the recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFrame {
    n: usize,
    xi: Vec<C64>,
    alpha: Vec<Vec<C64>>,
    beta: Vec<Vec<C64>>,
    gamma: Vec<C64>,
}

impl CoefficientFrame {
    /// Frame after initialisation: `f_{i1} = x - xi_i y`; the remaining
    /// forms are `x` below the last row and zero in it.
    pub fn new(xi: Vec<C64>) -> Self {
        let n = xi.len() + 1;
        let alpha = (1..n)
            .map(|i| (1..=i).map(|l| if l == 1 || i < n - 1 { c(1.0) } else { c(0.0) }).collect())
            .collect();
        let beta = (1..n).map(|i| (1..=i).map(|l| if l == 1 { -xi[i - 1] } else { c(0.0) }).collect()).collect();
        Self { n, xi, alpha, beta, gamma: vec![c(0.0); n.saturating_sub(2)] }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// `xi_1, ..., xi_{n-1}`.
    pub fn roots(&self) -> &[C64] {
        &self.xi
    }

    pub fn xi(&self, i: usize) -> C64 {
        self.xi[i - 1]
    }

    pub fn alpha(&self, i: usize, l: usize) -> C64 {
        self.alpha[i - 1][l - 1]
    }

    pub fn beta(&self, i: usize, l: usize) -> C64 {
        self.beta[i - 1][l - 1]
    }

    /// `gamma_j` for `1 <= j <= n-2`.
    pub fn gamma(&self, j: usize) -> C64 {
        self.gamma[j - 1]
    }

    pub fn gammas(&self) -> &[C64] {
        &self.gamma
    }

    pub fn set_alpha(&mut self, i: usize, l: usize, v: C64) {
        self.alpha[i - 1][l - 1] = v;
    }

    pub fn set_beta(&mut self, i: usize, l: usize, v: C64) {
        self.beta[i - 1][l - 1] = v;
    }

    pub fn set_gamma(&mut self, j: usize, v: C64) {
        self.gamma[j - 1] = v;
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// One step of the main loop, recorded for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub k: usize,
    /// Coefficients of `h`, highest power first, length `n-k+1`.
    pub h: Vec<C64>,
    pub alpha: C64,
    pub g: UnivariatePoly,
    pub w: CMatrix,
    pub beta: Vec<C64>,
    /// `s^(k)`: residual before the gamma step.
    pub s: BivariatePoly,
    pub gamma: C64,
    /// `r^(k)`, untruncated.
    pub residual: BivariatePoly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionTrace {
    pub roots: Vec<C64>,
    /// `r^(1) = p - p_n0 x q_{n-1}`.
    pub initial_residual: BivariatePoly,
    pub steps: Vec<StepTrace>,
    pub frame: CoefficientFrame,
    /// `q_0, ..., q_{n-1}` for the final frame.
    pub q: Vec<BivariatePoly>,
    pub final_residual: BivariatePoly,
}

/// Determinantal representation of `p`, which must be in normal form (for
/// `n >= 2`). Degree one is handled directly.
pub fn construct(p: &BivariatePoly) -> Result<PencilRep, ConstructError> {
    let n = p.degree_bound();
    if n == 0 {
        return Err(ConstructError::Constant);
    }
    if n == 1 {
        return Ok(linear_rep(p));
    }
    construct_with_trace(p).map(|(rep, _)| rep)
}

fn linear_rep(p: &BivariatePoly) -> PencilRep {
    let one = |v: C64| DMatrix::from_element(1, 1, v);
    PencilRep { a: one(p.coeff(0, 0)), b: one(p.coeff(1, 0)), c: one(p.coeff(0, 1)) }
}

pub fn construct_with_trace(p: &BivariatePoly) -> Result<(PencilRep, ConstructionTrace), ConstructError> {
    let n = p.degree_bound();
    if n == 0 {
        return Err(ConstructError::Constant);
    }
    let xi = transform::check_normal_form(p)?;
    let lead = p.coeff(n, 0);
    let scale = p.max_abs();

    let mut frame = CoefficientFrame::new(xi.clone());
    let mut q = update_q(&frame, 1);
    let top = p.sub(&q[n - 1].mul_linear(lead, c(0.0)));
    let initial_residual = top.clone();
    let mut r = top;
    let mut steps = Vec::with_capacity(n.saturating_sub(2));

    for k in 2..n {
        let h: Vec<C64> = (0..=n - k).map(|j| r.coeff(n - k + 1 - j, j) / lead).collect();
        let alpha = compute_alpha(h[0], n, k);
        let g = build_g(&h, &xi, alpha, n, k)?;
        let w = beta_system(&xi, n, k);
        let beta = solve_beta(&g, &w, &xi, n, k)?;

        frame.set_alpha(n - 1, k, alpha);
        for (m, &b) in beta.iter().enumerate() {
            frame.set_beta(k + m, k, b);
        }
        q = update_q(&frame, k);

        let mut s = p.sub(&q[n - 1].mul_linear(lead, c(0.0)));
        for l in 2..k {
            s = s.sub(&q[n - l].scale(frame.gamma(n - l)));
        }
        let (gamma, next) = compute_gamma(&s, &q[n - k], &xi, n, k, scale)?;
        frame.set_gamma(n - k, gamma);
        steps.push(StepTrace { k, h, alpha, g, w, beta, s, gamma, residual: next.clone() });
        r = next;
    }

    let stray = r.terms().filter(|&(i, j, _)| i + j >= 2 || j >= 1).map(|(_, _, v)| v.norm()).fold(0.0, f64::max);
    if stray > FINAL_RESIDUAL_TOL * scale {
        return Err(ConstructError::ResidualNotReduced(stray / scale));
    }
    let rep = assemble(&frame, r.coeff(0, 0), r.coeff(1, 0), lead);
    let trace = ConstructionTrace { roots: xi, initial_residual, steps, frame, q, final_residual: r };
    Ok((rep, trace))
}

/// `alpha_{n-1,k} = h_{n-k} - n + k + 1`, where `h_{n-k}` is the leading
/// coefficient of `h` (normalised by `p_n0`).
pub fn compute_alpha(h_lead: C64, n: usize, k: usize) -> C64 {
    h_lead - c(n as f64) + c(k as f64) + c(1.0)
}

/// `prod_{i in range} (t - xi_i)` with factors multiplied in index order.
fn prod_at(t: C64, xi: &[C64], range: std::ops::RangeInclusive<usize>) -> C64 {
    range.fold(c(1.0), |acc, i| acc * (t - xi[i - 1]))
}

fn prod_poly(xi: &[C64], range: std::ops::RangeInclusive<usize>) -> Vec<C64> {
    let roots: Vec<C64> = range.map(|i| xi[i - 1]).collect();
    UnivariatePoly::from_roots(c(1.0), &roots).coeffs().to_vec()
}

/// `g(t) = h(t) - t sum_{l=k}^{n-2} prod_{i<=l-k}(t-xi_i) prod_{j>l}(t-xi_j)
///         - alpha t prod_{i<=n-k-1}(t-xi_i)`.
///
/// The `t^(n-k)` terms cancel by the choice of `alpha`; the check guards
/// against a wrong `alpha` or `h`. Returned with degree at most `n-k-1`.
pub fn build_g(h: &[C64], xi: &[C64], alpha: C64, n: usize, k: usize) -> Result<UnivariatePoly, ConstructError> {
    let deg = n - k;
    // Ascending powers, length deg + 1.
    let mut acc: Vec<C64> = h.iter().rev().copied().collect();
    let mut sub_shifted = |coeffs: Vec<C64>, w: C64| {
        // coeffs: highest first; subtract w * t * poly.
        for (pow, v) in coeffs.iter().rev().enumerate() {
            acc[pow + 1] -= w * v;
        }
    };
    for l in k..=n - 2 {
        let roots: Vec<C64> = (1..=l - k).chain(l + 1..=n - 1).map(|i| xi[i - 1]).collect();
        sub_shifted(UnivariatePoly::from_roots(c(1.0), &roots).coeffs().to_vec(), c(1.0));
    }
    sub_shifted(prod_poly(xi, 1..=n - k - 1), alpha);

    let leading = acc[deg].norm();
    let scale = h.iter().map(|v| v.norm()).fold(1.0, f64::max);
    if leading > G_LEADING_TOL * scale {
        return Err(ConstructError::InconsistentG { k, leading });
    }
    acc.truncate(deg);
    acc.reverse();
    Ok(UnivariatePoly::new(acc))
}

/// `W_{ml} = prod_{i<l}(xi_m - xi_i) prod_{j=l+k}^{n-1}(xi_m - xi_j)` for
/// `1 <= m, l <= n-k`. Lower triangular, with `k - 1` subdiagonals.
pub fn beta_system(xi: &[C64], n: usize, k: usize) -> CMatrix {
    let size = n - k;
    CMatrix::from_fn(size, size, |mi, li| {
        let (m, l) = (mi + 1, li + 1);
        let t = xi[m - 1];
        prod_at(t, xi, 1..=l - 1) * prod_at(t, xi, l + k..=n - 1)
    })
}

/// Solves `W beta = g(xi_1..xi_{n-k})` by forward substitution.
pub fn solve_beta(g: &UnivariatePoly, w: &CMatrix, xi: &[C64], n: usize, k: usize) -> Result<Vec<C64>, ConstructError> {
    let size = n - k;
    let max_w = w.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for i in 0..size {
        if w[(i, i)].norm() < PIVOT_TOL * max_w || w[(i, i)].norm() == 0.0 {
            return Err(ConstructError::SingularPivot { k, row: i + 1 });
        }
    }
    let condition = lower_triangular_condition(w);
    if condition.is_nan() || condition > MAX_BETA_CONDITION {
        return Err(ConstructError::IllConditioned { k, condition });
    }
    let mut beta = vec![c(0.0); size];
    for m in 0..size {
        let mut rhs = g.eval(xi[m]);
        for l in 0..m {
            rhs -= w[(m, l)] * beta[l];
        }
        beta[m] = rhs / w[(m, m)];
    }
    Ok(beta)
}

/// `|W|_inf |W^-1|_inf`, with the inverse built column by column.
fn lower_triangular_condition(w: &CMatrix) -> f64 {
    let size = w.nrows();
    let mut inv = CMatrix::zeros(size, size);
    for col in 0..size {
        for m in col..size {
            let mut v = if m == col { c(1.0) } else { c(0.0) };
            for l in col..m {
                v -= w[(m, l)] * inv[(l, col)];
            }
            inv[(m, col)] = v / w[(m, m)];
        }
    }
    linalg::inf_norm(w) * linalg::inf_norm(&inv)
}

/// `q_0 = 1`, `q_j = sum_{l=1}^{min(j,k)} f_{jl} q_{j-l}`.
pub fn update_q(frame: &CoefficientFrame, k: usize) -> Vec<BivariatePoly> {
    let n = frame.degree();
    let mut q = vec![BivariatePoly::constant(c(1.0))];
    for j in 1..n {
        let mut next = BivariatePoly::zero(j);
        for l in 1..=j.min(k) {
            next = next.add(&q[j - l].mul_linear(frame.alpha(j, l), frame.beta(j, l)));
        }
        q.push(next.with_bound(j));
    }
    q
}

/// `gamma_{n-k} = (-1)^(n-k) s_{0,n-k} / (xi_1 ... xi_{n-k})`, which cancels
/// the `y^(n-k)` term of `s` since `q_{n-k}(0, y) = (-1)^(n-k) xi_1...xi_{n-k} y^(n-k)`.
/// Returns `gamma` and `r = s - gamma q_{n-k}`.
pub fn compute_gamma(
    s: &BivariatePoly,
    q: &BivariatePoly,
    xi: &[C64],
    n: usize,
    k: usize,
    scale: f64,
) -> Result<(C64, BivariatePoly), ConstructError> {
    let d = n - k;
    let mut prod = c(1.0);
    for (i, &root) in xi.iter().take(d).enumerate() {
        if root.norm() == 0.0 || crate::poly::is_zero_root(root, xi) {
            return Err(ConstructError::ZeroRoot { k, index: i + 1 });
        }
        prod *= root;
    }
    let target = s.coeff(0, d);
    let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
    let gamma = target * sign / prod;
    let tol = ANNIHILATION_TOL * (scale + target.norm());
    let mut last = f64::INFINITY;
    // The opposite sign is a defensive fallback; it does not fire on the
    // recurrence as implemented.
    for candidate in [gamma, -gamma] {
        let r = s.sub(&q.scale(candidate));
        let residual = r.coeff(0, d).norm();
        if residual <= tol {
            return Ok((candidate, r));
        }
        last = last.min(residual);
    }
    Err(ConstructError::Annihilation { k, residual: last })
}

/// Places the frame into `A`, `B`, `C`.
pub fn assemble(frame: &CoefficientFrame, r00: C64, r10: C64, lead: C64) -> PencilRep {
    let n = frame.degree();
    let mut a = CMatrix::zeros(n, n);
    let mut b = CMatrix::zeros(n, n);
    let mut cm = CMatrix::zeros(n, n);
    a[(0, 0)] = r00;
    for j in 1..n.saturating_sub(1) {
        a[(0, j)] = frame.gamma(j);
    }
    b[(0, 0)] += r10;
    b[(0, n - 1)] += lead;
    for i in 1..n {
        a[(i, i)] = c(1.0);
        for l in 1..=i {
            b[(i, i - l)] = -frame.alpha(i, l);
            cm[(i, i - l)] = -frame.beta(i, l);
        }
    }
    PencilRep { a, b, c: cm }
}
