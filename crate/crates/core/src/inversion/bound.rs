use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// A positive quantity held as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogValue {
    pub ln: f64,
}

impl LogValue {
    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    pub fn from_value(v: f64) -> Self {
        Self { ln: v.ln() }
    }

    /// Linear value, `None` if it overflows an `f64`.
    pub fn value(&self) -> Option<f64> {
        let v = self.ln.exp();
        v.is_finite().then_some(v)
    }

    /// Linear value saturating to `+∞`.
    pub fn value_or_inf(&self) -> f64 {
        self.ln.exp()
    }

    pub fn overflow(&self) -> bool {
        self.value().is_none()
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v:e}"),
            None => write!(f, "exp({})", self.ln),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LogValueRepr {
    ln: f64,
    value: Option<f64>,
    overflow: bool,
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LogValueRepr {
            ln: self.ln,
            value: self.value(),
            overflow: self.overflow(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Self::from_ln(LogValueRepr::deserialize(d)?.ln))
    }
}

/// Which closed form bounds the Neumann series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `θ < m − 1`: sub-exponential growth against geometric decay.
    Subexponential,
    /// `θ = m − 1`: polynomial growth, summed through the Gamma function.
    Gamma,
    /// `A*A = sI`, so `A^{−1} = s^{−1}A*`.
    Degenerate,
}

const BRANCH_TOL: f64 = 1e-12;

/// Branch for `(m, θ)`, after validating `m ≥ 2` and `0 < θ ≤ m − 1`.
pub fn branch(m: u32, theta: f64) -> Result<Branch> {
    crate::differential::check_power_params(m, theta)?;
    if (theta - (m - 1) as f64).abs() <= BRANCH_TOL {
        Ok(Branch::Gamma)
    } else {
        Ok(Branch::Subexponential)
    }
}

fn check_constants(d: f64, a: f64, b: f64) -> Result<()> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::param(format!("a must exceed 1, got {a}")));
    }
    if !(d > 0.0 && d.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(Error::param(format!("D and b must be positive, got D = {d}, b = {b}")));
    }
    Ok(())
}

/// `(m − 1)(m − θ)/(m − 1 − θ)`.
fn growth_coefficient(m: f64, theta: f64) -> f64 {
    (m - 1.0) * (m - theta) / (m - 1.0 - theta)
}

/// Closed-form bound on `‖Bⁿ‖` for `n ≥ 1`:
/// `(Db)^{(m−1)(m−θ)/(m−1−θ) n^{log_m(m−θ)}} a^{−n}` for `θ < m − 1`, and
/// `(Db)^{(m−1) log_m(mn + 1)} a^{−n}` for `θ = m − 1`.
pub fn bn_digit_bound(n: u64, m: u32, theta: f64, d: f64, a: f64, b: f64) -> Result<LogValue> {
    let br = branch(m, theta)?;
    check_constants(d, a, b)?;
    if n < 1 {
        return Err(Error::param("the digit bound is stated for n ≥ 1"));
    }
    let (mf, nf) = (m as f64, n as f64);
    let ln_db = (d * b).ln();
    let exponent = match br {
        Branch::Gamma => (mf - 1.0) * (mf * nf + 1.0).ln() / mf.ln(),
        _ => {
            let beta = (mf - theta).ln() / mf.ln();
            growth_coefficient(mf, theta) * nf.powf(beta)
        }
    };
    Ok(LogValue::from_ln(exponent * ln_db - nf * a.ln()))
}

/// Coefficient `c` and exponent `β = log_m(m − θ)` of
/// `s(t) = t − c t^β`, `c = (m−1)(m−θ) ln(Db)/((m−1−θ) ln a)`.
fn s_parameters(m: u32, theta: f64, d: f64, b: f64, a: f64) -> Result<(f64, f64)> {
    if branch(m, theta)? != Branch::Subexponential {
        return Err(Error::param("s(t) is defined for θ < m − 1"));
    }
    check_constants(d, a, b)?;
    let mf = m as f64;
    let beta = (mf - theta).ln() / mf.ln();
    Ok((growth_coefficient(mf, theta) * (d * b).ln() / a.ln(), beta))
}

/// `s(t) = t − c t^{log_m(m−θ)}`.
pub fn s_function(t: f64, m: u32, theta: f64, d: f64, b: f64, a: f64) -> Result<f64> {
    let (c, beta) = s_parameters(m, theta, d, b, a)?;
    Ok(t - c * t.powf(beta))
}

/// `s′(t) = 1 − cβ t^{β−1}`.
pub fn s_derivative(t: f64, m: u32, theta: f64, d: f64, b: f64, a: f64) -> Result<f64> {
    let (c, beta) = s_parameters(m, theta, d, b, a)?;
    Ok(1.0 - c * beta * t.powf(beta - 1.0))
}

/// Minimizer of `s(t)` on `t ≥ 0`:
/// `t₀ = ((m−1)(m−θ) log_m(m−θ) ln(Db)/((m−1−θ) ln a))^{ln m/(ln m − ln(m−θ))}`.
///
/// Returns zero when `Db ≤ 1`, where `s` is increasing from `s(0) = 0`.
pub fn t0_value(m: u32, theta: f64, d: f64, b: f64, a: f64) -> Result<f64> {
    if theta <= 1e-6 {
        return Err(Error::param(format!("theta = {theta} is too close to zero")));
    }
    let (c, beta) = s_parameters(m, theta, d, b, a)?;
    if d * b <= 1.0 {
        return Ok(0.0);
    }
    Ok((c * beta).powf(1.0 / (1.0 - beta)))
}

/// Constants entering the inverse-norm bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormControlInputs {
    /// `s = ‖A*A‖_{ℓ²}`.
    pub s: f64,
    /// `‖A*‖` in the normalized family norm.
    pub adjoint_norm: f64,
    pub a: f64,
    pub b: f64,
    pub m: u32,
    pub theta: f64,
    pub d: f64,
}

/// Bound on `‖A^{−1}‖` and, on the sub-exponential branch, `t₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormControl {
    pub branch: Branch,
    pub t0: Option<f64>,
    pub bound: LogValue,
}

/// Explicit bound on the normalized norm of `A^{−1}`:
///
/// * `θ < m − 1`:
///   `s^{−1}‖A*‖ (2t₀ + (1 − 2^{log_m(1−θ/m)})^{−1}(ln a)^{−1}) a exp((ln m − ln(m−θ))/ln(m−θ) t₀ ln a)`;
/// * `θ = m − 1`:
///   `s^{−1}‖A*‖ a² (ln a)^{−1} (Db)^{m−1} Γ((m−1) ln(Db)/(ln m ln a) + 1)`.
pub fn norm_control_bound(x: &NormControlInputs) -> Result<NormControl> {
    let br = branch(x.m, x.theta)?;
    check_constants(x.d, x.a, x.b)?;
    if !(x.s > 0.0 && x.adjoint_norm > 0.0) {
        return Err(Error::param("s and ‖A*‖ must be positive"));
    }
    let m = x.m as f64;
    let ln_a = x.a.ln();
    let ln_db = (x.d * x.b).ln();
    let prefactor = (x.adjoint_norm / x.s).ln();
    match br {
        Branch::Gamma => {
            let arg = (m - 1.0) * ln_db.max(0.0) / (m.ln() * ln_a) + 1.0;
            let ln = prefactor + 2.0 * ln_a - ln_a.ln() + (m - 1.0) * ln_db + ln_gamma(arg)?;
            Ok(NormControl {
                branch: br,
                t0: None,
                bound: LogValue::from_ln(ln),
            })
        }
        _ => {
            let t0 = t0_value(x.m, x.theta, x.d, x.b, x.a)?;
            let slope = 1.0 - 2f64.powf((1.0 - x.theta / m).ln() / m.ln());
            let ln_m_theta = (m - x.theta).ln();
            let tail = (m.ln() - ln_m_theta) / ln_m_theta * t0 * ln_a;
            let ln = prefactor + (2.0 * t0 + 1.0 / (slope * ln_a)).ln() + ln_a + tail;
            Ok(NormControl {
                branch: br,
                t0: Some(t0),
                bound: LogValue::from_ln(ln),
            })
        }
    }
}
