//! Off-diagonal decay norms and the ambient operator norm.
//!
//! All four decay families weight an entry by the polynomial weight
//! `u_α(i, j) = (1 + |i − j|)^α` and differ only in how the weighted
//! magnitudes are aggregated:
//!
//! | family   | aggregate                                                      |
//! |----------|----------------------------------------------------------------|
//! | Schur    | max of the sup over rows / columns of the row / column `p`-norm |
//! | BGS      | `p`-norm over diagonals `k` of the sup along `i − j = k`        |
//! | Beurling | `p`-norm over `k` of the sup over `|i − j| ≥ |k|`              |
//! | Jaffard  | sup over all entries (all three above at `p = ∞`)              |
//!
//! Norms are evaluated on the finite matrix as given; nothing is extrapolated
//! to the bi-infinite operator.

mod spectral;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::FiniteMatrix;
use crate::sum::p_norm;

pub use spectral::{
    eigen_extremes_hermitian, operator_norm_l2, spectral_radius, PowerIteration,
    DEFAULT_MAX_ITERATIONS, DEFAULT_TOL,
};

/// Norm family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Schur,
    Bgs,
    Beurling,
    Jaffard,
    #[serde(rename = "op")]
    OperatorL2,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Schur => "schur",
            Family::Bgs => "bgs",
            Family::Beurling => "beurling",
            Family::Jaffard => "jaffard",
            Family::OperatorL2 => "op",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "schur" => Ok(Family::Schur),
            "bgs" => Ok(Family::Bgs),
            "beurling" => Ok(Family::Beurling),
            "jaffard" => Ok(Family::Jaffard),
            "op" | "operator" | "l2" => Ok(Family::OperatorL2),
            other => Err(Error::param(format!("unknown norm family '{other}'"))),
        }
    }
}

/// Polynomial weight `u_α(i, j) = (1 + |i − j|)^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyWeight {
    alpha: f64,
}

impl PolyWeight {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Weight at diagonal offset `k = i − j`.
    #[inline]
    pub fn at(&self, k: i64) -> f64 {
        if self.alpha == 0.0 {
            1.0
        } else {
            (1.0 + k.unsigned_abs() as f64).powf(self.alpha)
        }
    }

    /// Weights for offsets `0..len`.
    fn table(&self, len: usize) -> Vec<f64> {
        (0..len as i64).map(|k| self.at(k)).collect()
    }
}

/// A norm family together with its parameters.
///
/// `p` is ignored for Jaffard and the operator norm; `alpha` is ignored for
/// the operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub family: Family,
    #[serde(with = "extended_real")]
    pub p: f64,
    pub alpha: f64,
}

impl AlgebraSpec {
    pub fn new(family: Family, p: f64, alpha: f64) -> Result<Self> {
        let p = match family {
            Family::Jaffard => f64::INFINITY,
            Family::OperatorL2 => 2.0,
            _ => p,
        };
        let alpha = if family == Family::OperatorL2 { 0.0 } else { alpha };
        check_p(p)?;
        check_alpha(alpha)?;
        Ok(Self { family, p, alpha })
    }

    pub fn schur(p: f64, alpha: f64) -> Result<Self> {
        Self::new(Family::Schur, p, alpha)
    }

    pub fn operator() -> Self {
        Self {
            family: Family::OperatorL2,
            p: 2.0,
            alpha: 0.0,
        }
    }

    /// Whether the family norm is submultiplicative up to a constant,
    /// i.e. `α > 1 − 1/p` for the decay families.
    pub fn algebra_valid(&self) -> bool {
        match self.family {
            Family::OperatorL2 => true,
            _ => self.alpha > 1.0 - 1.0 / self.p,
        }
    }

    /// Raw family norm.
    pub fn norm(&self, a: &FiniteMatrix) -> Result<f64> {
        match self.family {
            Family::Schur => schur_norm(a, self.p, self.alpha),
            Family::Bgs => bgs_norm(a, self.p, self.alpha),
            Family::Beurling => beurling_norm(a, self.p, self.alpha),
            Family::Jaffard => jaffard_norm(a, self.alpha),
            Family::OperatorL2 => operator_norm_l2(a, DEFAULT_TOL),
        }
    }

    /// Family norm multiplied by [`normalization_constant`], which is
    /// submultiplicative with constant one.
    pub fn normalized_norm(&self, a: &FiniteMatrix) -> Result<f64> {
        Ok(normalization_constant(self)? * self.norm(a)?)
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::OperatorL2 => write!(f, "op"),
            Family::Jaffard => write!(f, "jaffard(alpha={})", self.alpha),
            _ => write!(f, "{}(p={}, alpha={})", self.family, self.p, self.alpha),
        }
    }
}

/// `p` serialized as a number, or the string `"inf"`.
pub(crate) mod extended_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => super::parse_p(&s).map_err(serde::de::Error::custom),
        }
    }
}

/// Parses `p`, accepting `inf`/`infinity`.
pub fn parse_p(s: &str) -> Result<f64> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .map_err(|_| Error::param(format!("cannot parse p = '{s}'"))),
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::param(format!("p must lie in [1, ∞], got {p}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::param(format!("alpha must be finite and ≥ 0, got {alpha}")));
    }
    Ok(())
}

/// Conjugate exponent `p′ = p/(p − 1)`, with `1′ = ∞` and `∞′ = 1`.
pub fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `1/p′ = 1 − 1/p`.
pub(crate) fn inv_dual(p: f64) -> f64 {
    1.0 - 1.0 / p
}

/// `C_{p,α} = ((αp′ + 1)/(αp′ − 1))^{1/p′}`, an upper bound for
/// `(Σ_k (1 + |k|)^{−αp′})^{1/p′}` and hence for `‖A‖_{A_{1,0}} / ‖A‖_{A_{p,α}}`.
/// Equal to one at `p = 1`.
pub fn amalgam_constant(p: f64, alpha: f64) -> Result<f64> {
    check_p(p)?;
    check_alpha(alpha)?;
    if p == 1.0 {
        return Ok(1.0);
    }
    let q = dual_exponent(p);
    let s = alpha * q;
    if s <= 1.0 {
        return Err(Error::param(format!(
            "alpha = {alpha} ≤ 1 − 1/p = {} (not an algebra)",
            inv_dual(p)
        )));
    }
    Ok(((s + 1.0) / (s - 1.0)).powf(1.0 / q))
}

/// Constant `K ≥ 1` with `‖AB‖ ≤ K ‖A‖ ‖B‖` for the family, so that
/// `K‖·‖` is submultiplicative.
///
/// Every decay family starts from `u_α(i,j) ≤ 2^α (u_α(i,k) + u_α(k,j))`,
/// which splits `‖AB‖` into two terms each carrying one unweighted `ℓ¹`
/// factor, bounded by `C_{p,α}` times the family norm:
///
/// * Schur: `K = 2^{α+1} C_{p,α}` (row / column Hölder plus the Schur test).
/// * BGS: `K = 2^{α+1} C_{p,α}` (Young's inequality on the diagonal sups).
/// * Beurling: `K = 2^{α+1} 2^{1/p} C_{p,α}`; the split moves each offset
///   `r` to `⌈r/2⌉`, and every such value is then hit at most twice per side.
/// * Jaffard: the Schur constant at `p = ∞`, `2^{α+1} (α + 1)/(α − 1)`.
/// * Operator norm: `K = 1`.
///
/// These are loose on purpose; only the inequality is relied on.
pub fn normalization_constant(spec: &AlgebraSpec) -> Result<f64> {
    if !spec.algebra_valid() {
        return Err(Error::param(format!(
            "{spec} is not a Banach algebra: need alpha > 1 − 1/p"
        )));
    }
    let split = 2f64.powf(spec.alpha + 1.0);
    match spec.family {
        Family::OperatorL2 => Ok(1.0),
        Family::Schur | Family::Bgs => Ok(split * amalgam_constant(spec.p, spec.alpha)?),
        Family::Beurling => {
            Ok(split * 2f64.powf(1.0 / spec.p) * amalgam_constant(spec.p, spec.alpha)?)
        }
        Family::Jaffard => Ok(split * amalgam_constant(f64::INFINITY, spec.alpha)?),
    }
}

/// Gröchenig–Schur norm `‖A‖_{A_{p,α}}`.
pub fn schur_norm(a: &FiniteMatrix, p: f64, alpha: f64) -> Result<f64> {
    check_p(p)?;
    let w = PolyWeight::new(alpha)?.table(a.size());
    let n = a.size();
    let mut best = 0.0_f64;
    let mut buf = vec![0.0; n];
    for r in 0..n {
        for (c, slot) in buf.iter_mut().enumerate() {
            *slot = a.at(r, c).norm() * w[r.abs_diff(c)];
        }
        best = best.max(p_norm(&buf, p));
    }
    for c in 0..n {
        for (r, slot) in buf.iter_mut().enumerate() {
            *slot = a.at(r, c).norm() * w[r.abs_diff(c)];
        }
        best = best.max(p_norm(&buf, p));
    }
    Ok(best)
}

/// Weighted diagonal sups `h(k) = sup_{i−j=k} |a(i,j)| u_α(k)` ordered as
/// `k = 0, 1, −1, 2, −2, …`, so that transposition only swaps neighbours.
fn diagonal_sups(a: &FiniteMatrix, alpha: f64) -> Result<Vec<f64>> {
    let w = PolyWeight::new(alpha)?.table(a.size());
    let n = a.size();
    let mut out = Vec::with_capacity(2 * n - 1);
    let sup_on = |k: isize| -> f64 {
        let mut m = 0.0_f64;
        for r in 0..n {
            let c = r as isize - k;
            if c >= 0 && (c as usize) < n {
                m = m.max(a.at(r, c as usize).norm() * w[k.unsigned_abs()]);
            }
        }
        m
    };
    out.push(sup_on(0));
    for k in 1..n as isize {
        out.push(sup_on(k));
        out.push(sup_on(-k));
    }
    Ok(out)
}

/// Baskakov–Gohberg–Sjöstrand norm `‖A‖_{C_{p,α}}`.
pub fn bgs_norm(a: &FiniteMatrix, p: f64, alpha: f64) -> Result<f64> {
    check_p(p)?;
    Ok(p_norm(&diagonal_sups(a, alpha)?, p))
}

/// Beurling norm `‖A‖_{B_{p,α}}`: `p`-norm over `k` of the radially
/// nonincreasing envelope `sup_{|i−j| ≥ |k|} |a(i,j)| u_α(i,j)`.
pub fn beurling_norm(a: &FiniteMatrix, p: f64, alpha: f64) -> Result<f64> {
    check_p(p)?;
    let h = diagonal_sups(a, alpha)?;
    let n = a.size();
    // radial[r] = max(h(r), h(−r)); envelope[r] = max_{r' ≥ r} radial[r'].
    let mut envelope = vec![0.0; n];
    envelope[0] = h[0];
    for r in 1..n {
        envelope[r] = h[2 * r - 1].max(h[2 * r]);
    }
    for r in (0..n - 1).rev() {
        envelope[r] = envelope[r].max(envelope[r + 1]);
    }
    let mut values = Vec::with_capacity(2 * n - 1);
    values.push(envelope[0]);
    for &e in &envelope[1..] {
        values.push(e);
        values.push(e);
    }
    Ok(p_norm(&values, p))
}

/// Jaffard norm `sup_{i,j} |a(i,j)| u_α(i,j)`.
pub fn jaffard_norm(a: &FiniteMatrix, alpha: f64) -> Result<f64> {
    let w = PolyWeight::new(alpha)?.table(a.size());
    let n = a.size();
    let mut best = 0.0_f64;
    for r in 0..n {
        for c in 0..n {
            best = best.max(a.at(r, c).norm() * w[r.abs_diff(c)]);
        }
    }
    Ok(best)
}
