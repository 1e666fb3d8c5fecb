use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::FiniteMatrix;
use crate::norms::{eigen_extremes_hermitian, operator_norm_l2, DEFAULT_TOL};

const SINGULAR_RATIO: f64 = 1e-13;
const DEGENERATE_TOL: f64 = 1e-12;

/// Spectral data of `A*A`.
#[derive(Debug, Clone)]
pub struct Conditioning {
    pub gram: FiniteMatrix,
    /// `s = λ_max(A*A) = ‖A*A‖_{ℓ²}`.
    pub s: f64,
    pub lambda_min: f64,
    /// `κ(A*A) = λ_max / λ_min`.
    pub kappa: f64,
}

impl Conditioning {
    pub fn of(a: &FiniteMatrix, tol: f64) -> Result<Self> {
        let gram = a.adjoint().multiply(a)?;
        let (lambda_min, s) = eigen_extremes_hermitian(&gram, tol)?;
        if !(s > 0.0) || lambda_min < SINGULAR_RATIO * s {
            return Err(Error::NotInvertible(format!(
                "A*A has eigenvalues in [{lambda_min:e}, {s:e}]"
            )));
        }
        Ok(Self {
            gram,
            s,
            lambda_min,
            kappa: s / lambda_min,
        })
    }

    /// `κ = 1` up to `1e-12`, so `B = 0`.
    pub fn is_degenerate(&self) -> bool {
        self.kappa - 1.0 <= DEGENERATE_TOL
    }

    /// `a = (1 − 1/κ)^{−1}`; infinite in the degenerate case.
    pub fn a(&self) -> f64 {
        1.0 / (1.0 - 1.0 / self.kappa)
    }

    /// `B = I − s^{−1}A*A`.
    pub fn b_matrix(&self) -> FiniteMatrix {
        let identity = FiniteMatrix::identity(self.gram.window());
        identity
            .sub(&self.gram.scale(1.0 / self.s))
            .expect("same window")
    }
}

/// `(B, s)` with `B = I − s^{−1}A*A` and `s = λ_max(A*A)`, so that
/// `‖B‖_{ℓ²} ≤ 1 − 1/κ(A*A)`.
pub fn build_b(a: &FiniteMatrix, tol: f64) -> Result<(FiniteMatrix, f64)> {
    let c = Conditioning::of(a, tol)?;
    Ok((c.b_matrix(), c.s))
}

/// Result of [`neumann_inverse`].
#[derive(Debug, Clone)]
pub struct NeumannInverse {
    pub inverse: FiniteMatrix,
    /// Number of series terms `B⁰, …, B^N`.
    pub terms: usize,
    /// `‖A · A_inv − I‖_{ℓ²}`.
    pub residual: f64,
    /// `a^{−(N+1)}/(1 − a^{−1})`, bounding the dropped tail in operator norm.
    pub tail_bound: f64,
}

/// `A^{−1} = s^{−1}(Σ_{n≤N} Bⁿ)A*`, truncated once the geometric tail
/// `a^{−(N+1)}/(1 − a^{−1})` drops below `tol`.
pub fn neumann_inverse(a: &FiniteMatrix, tol: f64, max_terms: usize) -> Result<NeumannInverse> {
    if !(tol > 0.0) {
        return Err(Error::param(format!("tolerance must be positive, got {tol}")));
    }
    let c = Conditioning::of(a, DEFAULT_TOL)?;
    neumann_with(a, &c, tol, max_terms)
}

pub(crate) fn neumann_with(
    a: &FiniteMatrix,
    c: &Conditioning,
    tol: f64,
    max_terms: usize,
) -> Result<NeumannInverse> {
    let adjoint = a.adjoint();
    let identity = FiniteMatrix::identity(a.window());
    if c.is_degenerate() {
        let inverse = adjoint.scale(1.0 / c.s);
        let residual = operator_norm_l2(&a.multiply(&inverse)?.sub(&identity)?, DEFAULT_TOL)?;
        return Ok(NeumannInverse {
            inverse,
            terms: 1,
            residual,
            tail_bound: 0.0,
        });
    }
    let q = 1.0 - 1.0 / c.kappa;
    let tail = |last: usize| q.powi(last as i32 + 1) / (1.0 - q);
    let mut last = 0usize;
    while tail(last) >= tol {
        last += 1;
        if last + 1 > max_terms {
            return Err(Error::Convergence {
                iterations: max_terms,
                context: format!("Neumann tail still {:e} after {max_terms} terms", tail(last - 1)),
            });
        }
    }
    let b = c.b_matrix();
    // Horner: S ← I + B S, run N times from S = I.
    let mut sum = identity.clone();
    for _ in 0..last {
        sum = identity.add(&b.multiply(&sum)?)?;
    }
    let inverse = sum.multiply(&adjoint)?.scale(1.0 / c.s);
    let residual = operator_norm_l2(&a.multiply(&inverse)?.sub(&identity)?, DEFAULT_TOL)?;
    Ok(NeumannInverse {
        inverse,
        terms: last + 1,
        residual,
        tail_bound: tail(last),
    })
}

/// Dense LU inverse, used as the reference for measured norms.
pub fn direct_inverse(a: &FiniteMatrix) -> Result<FiniteMatrix> {
    let n = a.size();
    let m = DMatrix::<Complex64>::from_fn(n, n, |r, c| a.at(r, c));
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::NotInvertible("LU factorization is singular".into()))?;
    let data = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| inv[(r, c)])
        .collect();
    FiniteMatrix::from_row_major(a.window(), data)
}
