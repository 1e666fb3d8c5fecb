//! Norm-controlled inversion.
//!
//! For invertible `A` put `s = ‖A*A‖_{ℓ²}` and `B = I − s^{−1}A*A`. Then
//! `‖B‖_{ℓ²} ≤ 1 − 1/κ(A*A)` and `A^{−1} = s^{−1}(Σ Bⁿ)A*`. If the decay
//! norm satisfies the power condition `‖X^m‖ ≤ D‖X‖^{m−θ}‖X‖_{ℓ²}^θ`, the
//! base-`m` digits of `n` turn it into a bound on `‖Bⁿ‖` that is
//! sub-exponential in `n`, which the geometric decay of `‖Bⁿ‖_{ℓ²}` beats;
//! summing gives an explicit bound on `‖A^{−1}‖` in the decay norm.
//!
//! All norms on the decay side are normalized by
//! [`normalization_constant`](crate::norms::normalization_constant) so they are
//! submultiplicative with constant one. The certificate concerns the finite
//! matrix as an operator on its own window.

mod bound;
mod digits;
mod neumann;

use serde::{Deserialize, Serialize};

pub use bound::{
    bn_digit_bound, branch, norm_control_bound, s_derivative, s_function, t0_value, Branch,
    LogValue, NormControl, NormControlInputs,
};
pub use digits::{digit_expansion, DigitExpansion};
pub use neumann::{build_b, direct_inverse, neumann_inverse, Conditioning, NeumannInverse};

use crate::error::{Error, Result};
use crate::matrix::FiniteMatrix;
use crate::norms::{normalization_constant, operator_norm_l2, AlgebraSpec, DEFAULT_TOL};
use crate::scaled::Scaled;

/// `κ`, `a`, `b` and the normalized norms behind `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub s: f64,
    pub lambda_min: f64,
    pub kappa: f64,
    pub a: f64,
    /// `b = (‖I‖′ + s^{−1}‖A*A‖′)/(1 − 1/κ)`.
    pub b: f64,
    /// Normalization factor `K`.
    pub k: f64,
    /// `‖I‖′`.
    pub identity_norm: f64,
    /// `‖A*A‖′`.
    pub gram_norm: f64,
}

fn constants_from(c: &Conditioning, spec: &AlgebraSpec) -> Result<Constants> {
    let k = normalization_constant(spec)?;
    let identity_norm = k * spec.norm(&FiniteMatrix::identity(c.gram.window()))?;
    let gram_norm = k * spec.norm(&c.gram)?;
    let a = c.a();
    Ok(Constants {
        s: c.s,
        lambda_min: c.lambda_min,
        kappa: c.kappa,
        a,
        b: a * (identity_norm + gram_norm / c.s),
        k,
        identity_norm,
        gram_norm,
    })
}

/// `κ(A*A)`, `a = (1 − 1/κ)^{−1}` and `b`; [`Error::Degenerate`] when `κ = 1`.
pub fn constants(a: &FiniteMatrix, spec: &AlgebraSpec) -> Result<Constants> {
    let c = Conditioning::of(a, DEFAULT_TOL)?;
    if c.is_degenerate() {
        return Err(Error::Degenerate { s: c.s });
    }
    constants_from(&c, spec)
}

/// Logs of `‖B^j‖′` for `j = 1..=n_max` and of `‖B^j‖_{ℓ²}` for
/// `j = 1..=op_max`, from a single sequential run of powers.
#[derive(Debug, Clone)]
pub struct PowerTable {
    ln_norm: Vec<Option<f64>>,
    ln_op: Vec<Option<f64>>,
}

impl PowerTable {
    pub fn new(b: &FiniteMatrix, spec: &AlgebraSpec, n_max: u64, op_max: u64) -> Result<Self> {
        let ln_k = normalization_constant(spec)?.ln();
        let base = Scaled::new(b);
        let mut x = base.clone();
        let mut ln_norm = Vec::with_capacity(n_max as usize);
        let mut ln_op = Vec::with_capacity(op_max as usize);
        for j in 1..=n_max.max(op_max) {
            if j > 1 {
                x = x.multiply(&base)?;
            }
            if j <= n_max {
                ln_norm.push(x.ln_norm(|m| spec.norm(m))?.map(|l| l + ln_k));
            }
            if j <= op_max {
                ln_op.push(x.ln_norm(|m| operator_norm_l2(m, DEFAULT_TOL))?);
            }
        }
        Ok(Self { ln_norm, ln_op })
    }

    pub fn n_max(&self) -> u64 {
        self.ln_norm.len() as u64
    }

    pub fn op_max(&self) -> u64 {
        self.ln_op.len() as u64
    }

    /// `ln ‖B^j‖′`, `None` for a zero power; `j ≥ 1`.
    pub fn ln_norm(&self, j: u64) -> Option<f64> {
        self.ln_norm[j as usize - 1]
    }

    /// `ln ‖B^j‖_{ℓ²}`, `None` for a zero power; `j ≥ 1`.
    pub fn ln_op(&self, j: u64) -> Option<f64> {
        self.ln_op[j as usize - 1]
    }

    /// `max_j ‖B^{mj}‖′ / (‖B^j‖′^{m−θ} ‖B^j‖_{ℓ²}^θ)` over every cofactor
    /// `j ≤ n_max/m` that occurs in a base-`m` expansion of some `n ≤ n_max`.
    /// Zero powers are skipped.
    pub fn brandenburg_constant(&self, m: u32, theta: f64) -> Result<f64> {
        crate::differential::check_power_params(m, theta)?;
        let top = self.n_max() / m as u64;
        if top > self.op_max() {
            return Err(Error::param("power table is too short for this m"));
        }
        let mut d = 0.0_f64;
        for j in 1..=top {
            let (Some(l), Some(lb)) = (self.ln_norm(j), self.ln_op(j)) else {
                continue;
            };
            let Some(lm) = self.ln_norm(m as u64 * j) else {
                continue;
            };
            d = d.max((lm - (m as f64 - theta) * l - theta * lb).exp());
        }
        Ok(d)
    }
}

/// Source of the power-condition constant `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DMode {
    /// Measured over the cofactor powers up to the ladder length.
    Empirical,
    User(f64),
}

/// Controls for [`certify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    /// Largest `n` whose `‖Bⁿ‖` is measured and checked against the digit bound.
    pub ladder_max: u64,
    /// Neumann truncation tolerance.
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            ladder_max: 256,
            tol: 1e-10,
            max_terms: 100_000,
        }
    }
}

/// Measured `‖Bⁿ‖′` against the digit bound over `1 ≤ n ≤ ladder_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DigitCheck {
    pub n_max: u64,
    pub violations: u64,
    /// `min_n (ln bound(n) − ln ‖Bⁿ‖′)` over nonzero powers.
    pub min_ln_margin: Option<f64>,
}

/// Everything [`certify`] measured and derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionCertificate {
    pub spec: AlgebraSpec,
    pub size: usize,
    pub branch: Branch,
    pub kappa: f64,
    pub lambda_min: f64,
    /// `s = λ_max(A*A)`.
    pub s: f64,
    /// `None` in the degenerate case.
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub m: u32,
    pub theta: f64,
    /// `D` used in the bound, `max(D_source, 1)`.
    pub d: f64,
    pub d_mode: DMode,
    pub d_empirical: Option<f64>,
    /// Largest cofactor power on which `D` was measured.
    pub d_checked_up_to: Option<u64>,
    pub t0: Option<f64>,
    pub bound: LogValue,
    /// `‖A^{−1}‖′` from a dense inverse.
    pub measured_inverse_norm: f64,
    pub measured_inverse_norm_raw: f64,
    pub dominates: bool,
    pub normalization: f64,
    /// `‖A*‖′`.
    pub adjoint_norm: f64,
    pub adjoint_norm_raw: f64,
    pub gram_norm: Option<f64>,
    pub neumann_terms: usize,
    pub residual: f64,
    /// `‖A_inv − A_direct‖_{ℓ²} / ‖A_direct‖_{ℓ²}`.
    pub neumann_deviation: f64,
    pub digit_check: Option<DigitCheck>,
}

/// Precomputed data shared by certificates for different `(m, θ, D)`.
pub struct Certifier {
    spec: AlgebraSpec,
    size: usize,
    conditioning: Conditioning,
    constants: Option<Constants>,
    table: Option<PowerTable>,
    neumann: NeumannInverse,
    measured_raw: f64,
    adjoint_raw: f64,
    deviation: f64,
}

impl Certifier {
    pub fn new(a: &FiniteMatrix, spec: &AlgebraSpec, options: CertifyOptions) -> Result<Self> {
        if !spec.algebra_valid() {
            return Err(Error::param(format!("{spec} is not a Banach algebra")));
        }
        if options.ladder_max < 2 {
            return Err(Error::param("ladder_max must be at least 2"));
        }
        let conditioning = Conditioning::of(a, DEFAULT_TOL)?;
        let neumann = neumann::neumann_with(a, &conditioning, options.tol, options.max_terms)?;
        let direct = direct_inverse(a)?;
        let direct_norm = operator_norm_l2(&direct, DEFAULT_TOL)?;
        let deviation = operator_norm_l2(&neumann.inverse.sub(&direct)?, DEFAULT_TOL)? / direct_norm;
        let (constants, table) = if conditioning.is_degenerate() {
            (None, None)
        } else {
            let table = PowerTable::new(
                &conditioning.b_matrix(),
                spec,
                options.ladder_max,
                options.ladder_max / 2,
            )?;
            (Some(constants_from(&conditioning, spec)?), Some(table))
        };
        Ok(Self {
            spec: *spec,
            size: a.size(),
            measured_raw: spec.norm(&direct)?,
            adjoint_raw: spec.norm(&a.adjoint())?,
            conditioning,
            constants,
            table,
            neumann,
            deviation,
        })
    }

    pub fn constants(&self) -> Option<&Constants> {
        self.constants.as_ref()
    }

    pub fn power_table(&self) -> Option<&PowerTable> {
        self.table.as_ref()
    }

    pub fn neumann(&self) -> &NeumannInverse {
        &self.neumann
    }

    /// Empirical `D` for `(m, θ)`, `None` in the degenerate case.
    pub fn d_empirical(&self, m: u32, theta: f64) -> Result<Option<f64>> {
        self.table
            .as_ref()
            .map(|t| t.brandenburg_constant(m, theta))
            .transpose()
    }

    pub fn certificate(&self, m: u32, theta: f64, d_mode: DMode) -> Result<InversionCertificate> {
        let br = branch(m, theta)?;
        let k = normalization_constant(&self.spec)?;
        let adjoint_norm = k * self.adjoint_raw;
        let measured = k * self.measured_raw;
        let d_empirical = self.d_empirical(m, theta)?;
        let d_source = match d_mode {
            DMode::User(d) if !(d > 0.0 && d.is_finite()) => {
                return Err(Error::param(format!("D must be positive, got {d}")));
            }
            DMode::User(d) => d,
            DMode::Empirical => d_empirical.unwrap_or(1.0),
        };
        let d = d_source.max(1.0);
        let c = &self.conditioning;

        let (branch, t0, bound, digit_check) = match &self.constants {
            None => (
                Branch::Degenerate,
                None,
                LogValue::from_ln((adjoint_norm / c.s).ln()),
                None,
            ),
            Some(k) => {
                let nc = norm_control_bound(&NormControlInputs {
                    s: c.s,
                    adjoint_norm,
                    a: k.a,
                    b: k.b,
                    m,
                    theta,
                    d,
                })?;
                let check = self.digit_check(m, theta, d, k)?;
                (br, nc.t0, nc.bound, Some(check))
            }
        };
        let dominates = bound.ln + 1e-9 >= measured.ln();
        Ok(InversionCertificate {
            spec: self.spec,
            size: self.size,
            branch,
            kappa: c.kappa,
            lambda_min: c.lambda_min,
            s: c.s,
            a: self.constants.map(|k| k.a),
            b: self.constants.map(|k| k.b),
            m,
            theta,
            d,
            d_mode,
            d_empirical,
            d_checked_up_to: match d_mode {
                DMode::Empirical => self.table.as_ref().map(|t| t.n_max() / m as u64),
                DMode::User(_) => None,
            },
            t0,
            bound,
            measured_inverse_norm: measured,
            measured_inverse_norm_raw: self.measured_raw,
            dominates,
            normalization: k,
            adjoint_norm,
            adjoint_norm_raw: self.adjoint_raw,
            gram_norm: self.constants.map(|k| k.gram_norm),
            neumann_terms: self.neumann.terms,
            residual: self.neumann.residual,
            neumann_deviation: self.deviation,
            digit_check,
        })
    }

    fn digit_check(&self, m: u32, theta: f64, d: f64, k: &Constants) -> Result<DigitCheck> {
        let table = self.table.as_ref().expect("non-degenerate");
        let mut violations = 0;
        let mut margin: Option<f64> = None;
        for n in 1..=table.n_max() {
            let Some(measured) = table.ln_norm(n) else {
                continue;
            };
            let bound = bn_digit_bound(n, m, theta, d, k.a, k.b)?;
            let gap = bound.ln - measured;
            if gap < -1e-9 {
                violations += 1;
            }
            margin = Some(margin.map_or(gap, |g| g.min(gap)));
        }
        Ok(DigitCheck {
            n_max: table.n_max(),
            violations,
            min_ln_margin: margin,
        })
    }
}

/// Full inversion certificate for `A` in the normalized `spec` norm.
pub fn certify(
    a: &FiniteMatrix,
    spec: &AlgebraSpec,
    m: u32,
    theta: f64,
    d_mode: DMode,
    options: CertifyOptions,
) -> Result<InversionCertificate> {
    branch(m, theta)?;
    Certifier::new(a, spec, options)?.certificate(m, theta, d_mode)
}
