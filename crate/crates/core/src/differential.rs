//! Differential norm inequalities and the power condition.
//!
//! Empirical constants here are running maxima over seeded samples, so they
//! are lower bounds for the true constants. The only certified quantity is
//! [`certified_amalgam_bound`], an explicit upper bound for the unweighted
//! `ℓ¹` Schur norm in terms of the weighted norm and the operator norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{derive_seed, gen_decay};
use crate::matrix::FiniteMatrix;
use crate::norms::{
    amalgam_constant, inv_dual, operator_norm_l2, schur_norm, AlgebraSpec, Family, DEFAULT_TOL,
};
use crate::scaled::Scaled;

fn check_algebra(p: f64, alpha: f64) -> Result<()> {
    let spec = AlgebraSpec::schur(p, alpha)?;
    if !spec.algebra_valid() {
        return Err(Error::param(format!(
            "need alpha > 1 − 1/p, got p = {p}, alpha = {alpha}"
        )));
    }
    Ok(())
}

/// `θ₀ = (α + 1/p − 1)/(α + 1/p − 1/2)`, in `(0, 1)` whenever `α > 1 − 1/p`.
pub fn theta0(p: f64, alpha: f64) -> Result<f64> {
    check_algebra(p, alpha)?;
    let s = alpha + 1.0 / p;
    Ok((s - 1.0) / (s - 0.5))
}

/// `τ₀` from the two norms, see [`tau0`].
pub fn tau0_from_norms(weighted: f64, operator: f64, p: f64, alpha: f64) -> Result<u64> {
    check_algebra(p, alpha)?;
    if !(weighted > 0.0 && operator > 0.0) {
        return Err(Error::param("tau0 is undefined for the zero matrix"));
    }
    let c = amalgam_constant(p, alpha)?;
    let exponent = 1.0 / (alpha + 0.5 - inv_dual(p));
    let t = (c * weighted / operator).powf(exponent).floor();
    Ok(t as u64)
}

/// Integer part of `(C_{p,α} ‖A‖_{p,α} / ‖A‖_{ℓ²})^{1/(α + 1/2 − 1/p′)}`.
///
/// At `p = 1` the convention `p′ = ∞` applies, so `C = 1` and the exponent is
/// `1/(α + 1/2)`.
pub fn tau0(a: &FiniteMatrix, p: f64, alpha: f64) -> Result<u64> {
    check_algebra(p, alpha)?;
    let w = schur_norm(a, p, alpha)?;
    let op = operator_norm_l2(a, DEFAULT_TOL)?;
    tau0_from_norms(w, op, p, alpha)
}

/// The two-term splitting estimate at cutoff `tau`:
/// `‖A‖(2τ + 1)^{1/2} + 2^{1/p′}(αp′ − 1)^{−1/p′}‖A‖_{p,α}(τ + 1)^{−α + 1/p′}`.
///
/// It dominates `‖A‖_{A_{1,0}}` for every integer `τ ≥ 0`.
pub fn amalgam_bound_at(weighted: f64, operator: f64, p: f64, alpha: f64, tau: u64) -> Result<f64> {
    check_algebra(p, alpha)?;
    let q = inv_dual(p);
    let tail_constant = if q == 0.0 {
        1.0
    } else {
        2f64.powf(q) * ((alpha - q) / q).powf(-q)
    };
    let t = tau as f64;
    Ok(operator * (2.0 * t + 1.0).sqrt() + tail_constant * weighted * (t + 1.0).powf(q - alpha))
}

/// [`amalgam_bound_at`] with `τ = τ₀(A)`; an upper bound for `schur_norm(A, 1, 0)`.
pub fn certified_amalgam_bound(a: &FiniteMatrix, p: f64, alpha: f64) -> Result<f64> {
    check_algebra(p, alpha)?;
    let w = schur_norm(a, p, alpha)?;
    let op = operator_norm_l2(a, DEFAULT_TOL)?;
    let tau = tau0_from_norms(w, op, p, alpha)?;
    amalgam_bound_at(w, op, p, alpha, tau)
}

/// `‖AB‖ / (‖A‖‖B‖((‖A‖_B/‖A‖)^θ + (‖B‖_B/‖B‖)^θ))`, with `‖·‖_B` the
/// operator norm; `None` if either factor is zero.
pub fn diff_ratio(a: &FiniteMatrix, b: &FiniteMatrix, spec: &AlgebraSpec, theta: f64) -> Result<Option<f64>> {
    let (na, nb) = (spec.norm(a)?, spec.norm(b)?);
    if na == 0.0 || nb == 0.0 {
        return Ok(None);
    }
    let oa = operator_norm_l2(a, DEFAULT_TOL)?;
    let ob = operator_norm_l2(b, DEFAULT_TOL)?;
    let nab = spec.norm(&a.multiply(b)?)?;
    Ok(Some(nab / (na * nb * ((oa / na).powf(theta) + (ob / nb).powf(theta)))))
}

/// Result of [`diff_inequality_sample`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffReport {
    pub spec: AlgebraSpec,
    pub theta: f64,
    pub n: usize,
    pub seed: u64,
    pub sample_count: usize,
    /// Samples dropped because a factor was zero.
    pub skipped: usize,
    /// Empirical `D₀`.
    pub max_ratio: f64,
    pub certified_d0: Option<f64>,
    /// Samples whose ratio exceeds `certified_d0`.
    pub violations: usize,
    /// For the Schur family: samples violating
    /// `‖AB‖ ≤ 2^α (‖A‖ M(B) + M(A) ‖B‖)` with `M` the certified amalgam bound.
    pub product_bound_violations: Option<usize>,
}

struct Sample {
    ratio: Option<f64>,
    product_violation: Option<bool>,
}

fn product_bound_holds(a: &FiniteMatrix, b: &FiniteMatrix, spec: &AlgebraSpec) -> Result<bool> {
    let (p, alpha) = (spec.p, spec.alpha);
    let lhs = schur_norm(&a.multiply(b)?, p, alpha)?;
    let rhs = 2f64.powf(alpha)
        * (schur_norm(a, p, alpha)? * certified_amalgam_bound(b, p, alpha)?
            + certified_amalgam_bound(a, p, alpha)? * schur_norm(b, p, alpha)?);
    Ok(lhs <= rhs * (1.0 + 1e-12))
}

/// Pairs `(A, B)` of `n × n` decay matrices for sample `index`.
pub fn sample_pair(n: usize, alpha: f64, seed: u64, index: u64) -> Result<(FiniteMatrix, FiniteMatrix)> {
    let sub = derive_seed(seed, index);
    Ok((
        gen_decay(n, alpha, derive_seed(sub, 0))?,
        gen_decay(n, alpha, derive_seed(sub, 1))?,
    ))
}

/// Empirical `D₀` of the order-`θ` differential inequality over seeded
/// `n × n` decay pairs, default `n = 64`.
pub fn diff_inequality_sample(spec: &AlgebraSpec, theta: f64, n_samples: usize, seed: u64) -> Result<DiffReport> {
    diff_inequality_sample_sized(spec, theta, n_samples, seed, 64, None)
}

/// [`diff_inequality_sample`] with explicit size and an optional certified
/// constant to test against.
pub fn diff_inequality_sample_sized(
    spec: &AlgebraSpec,
    theta: f64,
    n_samples: usize,
    seed: u64,
    n: usize,
    certified_d0: Option<f64>,
) -> Result<DiffReport> {
    if !spec.algebra_valid() {
        return Err(Error::param(format!("{spec} is not a Banach algebra")));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::param(format!("theta must lie in (0, 1], got {theta}")));
    }
    let check_product = spec.family == Family::Schur && spec.alpha >= 0.0;
    let samples: Vec<Sample> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let (a, b) = sample_pair(n, spec.alpha, seed, i)?;
            let ratio = diff_ratio(&a, &b, spec, theta)?;
            let product_violation = if check_product && ratio.is_some() {
                Some(!product_bound_holds(&a, &b, spec)?)
            } else {
                None
            };
            Ok(Sample {
                ratio,
                product_violation,
            })
        })
        .collect::<Result<_>>()?;

    let ratios: Vec<f64> = samples.iter().filter_map(|s| s.ratio).collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let violations = certified_d0.map_or(0, |d| ratios.iter().filter(|&&r| r > d).count());
    let product_bound_violations = check_product.then(|| {
        samples
            .iter()
            .filter(|s| s.product_violation == Some(true))
            .count()
    });
    Ok(DiffReport {
        spec: *spec,
        theta,
        n,
        seed,
        sample_count: n_samples,
        skipped: n_samples - ratios.len(),
        max_ratio,
        certified_d0,
        violations,
        product_bound_violations,
    })
}

/// Norms `fine ⊂ middle ⊂ coarse` for [`triplet_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletSpecs {
    pub fine: AlgebraSpec,
    pub middle: AlgebraSpec,
    pub coarse: AlgebraSpec,
}

/// A constant `c` with `‖X‖_to ≤ c ‖X‖_from` for all `X`, when one is known.
///
/// Known cases: equal specs; any decay norm into the operator norm or into the
/// same family at `(p, α) = (1, 0)` (also Schur at `(1, 0)`), with constant
/// `C_{p,α}`.
pub fn embedding_constant(from: &AlgebraSpec, to: &AlgebraSpec) -> Result<f64> {
    if from == to {
        return Ok(1.0);
    }
    if from.family == Family::OperatorL2 {
        return Err(Error::structural(format!("no embedding of op into {to}")));
    }
    let decay_to_l1 = to.p == 1.0
        && to.alpha == 0.0
        && (to.family == Family::Schur
            || to.family == from.family
            || (to.family == Family::Bgs && from.family == Family::Beurling));
    if to.family == Family::OperatorL2 || decay_to_l1 {
        return amalgam_constant(from.p, from.alpha);
    }
    Err(Error::structural(format!("no known embedding of {from} into {to}")))
}

/// Empirical constants of the two hypotheses and the conclusion of the
/// triplet theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripletReport {
    pub specs: TripletSpecs,
    pub theta0: f64,
    pub theta1: f64,
    pub samples: usize,
    pub skipped: usize,
    /// Max over pairs of the order-`θ₀` ratio of fine against middle.
    pub d0_empirical: f64,
    /// Max over all factors of `‖X‖_M / (‖X‖_A^{1−θ₁} ‖X‖_B^{θ₁})`.
    pub d1_empirical: f64,
    /// Max over pairs of the order-`θ₀θ₁` ratio of fine against coarse.
    pub conclusion_empirical: f64,
    /// `D₀ D₁^{θ₀}`.
    pub implied_constant: f64,
    /// Pairs whose conclusion ratio exceeds `r₀ · max(r₁(A), r₁(B))^{θ₀}`.
    pub chain_violations: usize,
}

const NEST_TOL: f64 = 1e-9;

/// Check the triplet implication on sample pairs.
///
/// Errors if a sample shows the norms are not nested, i.e.
/// `‖X‖_M > c‖X‖_A` or `‖X‖_B > c‖X‖_M` beyond tolerance with `c` from
/// [`embedding_constant`].
pub fn triplet_check(
    pairs: &[(FiniteMatrix, FiniteMatrix)],
    specs: &TripletSpecs,
    theta0: f64,
    theta1: f64,
) -> Result<TripletReport> {
    for t in [theta0, theta1] {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::param(format!("exponents must lie in (0, 1], got {t}")));
        }
    }
    let c_fm = embedding_constant(&specs.fine, &specs.middle)?;
    let c_mc = embedding_constant(&specs.middle, &specs.coarse)?;

    struct Norms {
        fine: f64,
        middle: f64,
        coarse: f64,
    }
    let measure = |x: &FiniteMatrix| -> Result<Norms> {
        let n = Norms {
            fine: specs.fine.norm(x)?,
            middle: specs.middle.norm(x)?,
            coarse: specs.coarse.norm(x)?,
        };
        if n.middle > c_fm * n.fine * (1.0 + NEST_TOL) || n.coarse > c_mc * n.middle * (1.0 + NEST_TOL) {
            return Err(Error::structural(format!(
                "norms not nested on a sample: fine {}, middle {}, coarse {}",
                n.fine, n.middle, n.coarse
            )));
        }
        Ok(n)
    };
    let r1 = |n: &Norms| n.middle / (n.fine.powf(1.0 - theta1) * n.coarse.powf(theta1));

    let (mut d0, mut d1, mut dc) = (0.0_f64, 0.0_f64, 0.0_f64);
    let (mut skipped, mut chain_violations) = (0, 0);
    for (a, b) in pairs {
        let (na, nb) = (measure(a)?, measure(b)?);
        if na.fine == 0.0 || nb.fine == 0.0 || na.coarse == 0.0 || nb.coarse == 0.0 {
            skipped += 1;
            continue;
        }
        let nab = specs.fine.norm(&a.multiply(b)?)?;
        let pair_term = |ta: f64, tb: f64, t: f64| (ta / na.fine).powf(t) + (tb / nb.fine).powf(t);
        let r0 = nab / (na.fine * nb.fine * pair_term(na.middle, nb.middle, theta0));
        let rc = nab / (na.fine * nb.fine * pair_term(na.coarse, nb.coarse, theta0 * theta1));
        let r1_pair = r1(&na).max(r1(&nb));
        if rc > r0 * r1_pair.powf(theta0) * (1.0 + NEST_TOL) {
            chain_violations += 1;
        }
        d0 = d0.max(r0);
        d1 = d1.max(r1_pair);
        dc = dc.max(rc);
    }
    Ok(TripletReport {
        specs: *specs,
        theta0,
        theta1,
        samples: pairs.len(),
        skipped,
        d0_empirical: d0,
        d1_empirical: d1,
        conclusion_empirical: dc,
        implied_constant: d0 * d1.powf(theta0),
        chain_violations,
    })
}

/// One rung `X = A^n` of the power ladder, in logs; `None` marks a zero norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub n: u64,
    pub ln_norm: Option<f64>,
    pub ln_norm_op: Option<f64>,
    pub ln_norm_next: Option<f64>,
    /// `ln(‖X^m‖ / (‖X‖^{m−θ} ‖X‖_B^θ))`.
    pub ln_ratio: Option<f64>,
}

/// Result of [`brandenburg_estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub spec: AlgebraSpec,
    pub m: u32,
    pub theta: f64,
    pub n_max: u64,
    /// Max ratio over the ladder (zero if no rung had nonzero norms).
    pub d_empirical: f64,
    /// Some power vanished or underflowed, ending the ladder early.
    pub underflow: bool,
    pub rows: Vec<PowerRow>,
}

pub(crate) fn check_power_params(m: u32, theta: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::param(format!("m must be at least 2, got {m}")));
    }
    let top = (m - 1) as f64;
    if !(theta > 0.0 && theta <= top + 1e-12) {
        return Err(Error::param(format!("theta must lie in (0, {top}], got {theta}")));
    }
    Ok(())
}

/// `max ‖X^m‖ / (‖X‖^{m−θ} ‖X‖_B^θ)` over `X ∈ {A, A^m, A^{m²}, …}` with
/// exponent at most `n_max`, computed in log-magnitude form.
pub fn brandenburg_estimate(
    a: &FiniteMatrix,
    spec: &AlgebraSpec,
    m: u32,
    theta: f64,
    n_max: u64,
) -> Result<PowerReport> {
    check_power_params(m, theta)?;
    if n_max < 1 {
        return Err(Error::param("n_max must be at least 1"));
    }
    let family = |x: &FiniteMatrix| spec.norm(x);
    let op = |x: &FiniteMatrix| operator_norm_l2(x, DEFAULT_TOL);

    let mut rows = Vec::new();
    let mut d = 0.0_f64;
    let mut underflow = false;
    let mut x = Scaled::new(a);
    let mut n = 1u64;
    loop {
        let ln_norm = x.ln_norm(family)?;
        let ln_norm_op = x.ln_norm(op)?;
        let next = x.power(m)?;
        let ln_norm_next = next.ln_norm(family)?;
        let ln_ratio = match (ln_norm, ln_norm_op) {
            (Some(l), Some(lb)) => {
                let top = ln_norm_next.unwrap_or(f64::NEG_INFINITY);
                Some(top - (m as f64 - theta) * l - theta * lb)
            }
            _ => None,
        };
        if let Some(r) = ln_ratio {
            d = d.max(r.exp());
        }
        rows.push(PowerRow {
            n,
            ln_norm,
            ln_norm_op,
            ln_norm_next,
            ln_ratio: ln_ratio.filter(|r| r.is_finite()),
        });
        if ln_norm.is_none() || ln_norm_next.is_none() {
            underflow = true;
            break;
        }
        match n.checked_mul(m as u64) {
            Some(next_n) if next_n <= n_max => {
                n = next_n;
                x = next;
            }
            _ => break,
        }
    }
    Ok(PowerReport {
        spec: *spec,
        m,
        theta,
        n_max,
        d_empirical: d,
        underflow,
        rows,
    })
}
