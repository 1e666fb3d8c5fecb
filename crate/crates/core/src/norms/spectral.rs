//! Power iteration for the ambient `ℓ²` quantities: operator norm, extreme
//! eigenvalues of Hermitian matrices and the spectral radius.
//!
//! Every run starts from the normalized all-ones vector. Because a fixed
//! start can be orthogonal to the dominant eigenvector (the all-ones vector
//! is in the kernel of `[[1, −1], [−1, 1]]`), a second deterministic start
//! built from Weyl sequences is always run as well and the larger estimate
//! kept. Both estimates approach the true value from below for positive
//! semidefinite operators, so the maximum is still a lower estimate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{FiniteMatrix, IndexWindow};
use crate::sum::Neumaier;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

/// Residual threshold (relative) for accepting a Rayleigh quotient as an eigenvalue.
const RESIDUAL_ACCEPT: f64 = 1e-4;

/// Iteration controls shared by all power-method routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl PowerIteration {
    pub fn with_tol(tol: f64) -> Result<Self> {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::param(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self {
            tol,
            ..Self::default()
        })
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let mut acc = Neumaier::new();
    for z in v {
        acc.add((z / max).norm_sqr());
    }
    max * acc.value().sqrt()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = vec_norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    for (a, b) in x.iter().zip(y) {
        let z = a.conj() * b;
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Deterministic start vectors: all-ones, then a complex Weyl sequence.
fn start_vectors(n: usize) -> [Vec<Complex64>; 2] {
    const G1: f64 = 0.618_033_988_749_894_9;
    const G2: f64 = 0.414_213_562_373_095_1;
    let ones = vec![Complex64::new(1.0, 0.0); n];
    let weyl = (0..n)
        .map(|k| {
            let k = k as f64 + 1.0;
            Complex64::new((k * G1).fract() + 0.25, (k * G2).fract() - 0.5)
        })
        .collect();
    [ones, weyl]
}

/// Geometric-rate aware stopping rule on a scalar sequence.
struct Monitor {
    prev: Option<f64>,
    prev_delta: Option<f64>,
}

impl Monitor {
    fn new() -> Self {
        Self {
            prev: None,
            prev_delta: None,
        }
    }

    /// True once the extrapolated remaining error is below `tol · |value|`.
    fn converged(&mut self, value: f64, tol: f64) -> bool {
        let Some(prev) = self.prev.replace(value) else {
            return false;
        };
        let delta = (value - prev).abs();
        let scale = value.abs().max(f64::MIN_POSITIVE);
        let last = self.prev_delta.replace(delta);
        if delta <= 8.0 * f64::EPSILON * scale {
            return true;
        }
        if delta > tol * scale {
            return false;
        }
        match last {
            Some(d0) if d0 > 0.0 => {
                let rate = delta / d0;
                rate < 1.0 && delta * rate / (1.0 - rate) <= tol * scale
            }
            _ => false,
        }
    }
}

struct Eigenpair {
    value: f64,
    vector: Vec<Complex64>,
    residual: f64,
}

/// Outcome of a bounded run from one start.
enum Run {
    /// Converged, or `None` when the start is annihilated by the operator.
    Done(Option<Eigenpair>),
    /// Iteration limit reached; carries the last normalized iterate.
    Stalled(Vec<Complex64>),
}

/// Iterations of the plain method before switching to [`accelerated_run`].
const PLAIN_LIMIT: usize = 256;

/// Rayleigh-quotient power iteration for a Hermitian operator from one start,
/// for at most `limit` steps.
fn rayleigh_run(
    apply: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    mut v: Vec<Complex64>,
    ctl: &PowerIteration,
    limit: usize,
) -> Run {
    normalize(&mut v);
    let mut monitor = Monitor::new();
    for _ in 0..limit {
        let w = apply(&v);
        let lambda = dot(&v, &w).re;
        let w_norm = vec_norm(&w);
        if w_norm == 0.0 {
            return Run::Done(None);
        }
        if monitor.converged(lambda, ctl.tol) {
            let residual = vec_norm(
                &w.iter()
                    .zip(&v)
                    .map(|(a, b)| a - b * lambda)
                    .collect::<Vec<_>>(),
            );
            return Run::Done(Some(Eigenpair {
                value: lambda,
                vector: v,
                residual,
            }));
        }
        v = w;
        normalize(&mut v);
    }
    Run::Stalled(v)
}

/// Power iteration driven by `M^16` for clustered spectra, run after the
/// plain method stalls: the iterates
/// advance with `M^16` (formed by repeated squaring of the materialized
/// operator) while the Rayleigh quotient is still taken with `M`.
fn accelerated_run(
    apply: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    n: usize,
    start: Vec<Complex64>,
    ctl: &PowerIteration,
    limit: usize,
    context: &str,
) -> Result<Option<Eigenpair>> {
    let window = IndexWindow::zero_based(n)?;
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[k] = Complex64::new(1.0, 0.0);
        columns.push(apply(&e));
    }
    let mut power = FiniteMatrix::from_fn(window, |i, j| columns[j as usize][i as usize]);
    for _ in 0..4 {
        power = power.multiply(&power)?;
        let m = power.max_abs();
        if m == 0.0 {
            return Ok(None);
        }
        power = power.scale(1.0 / m);
    }
    let mut v = start;
    normalize(&mut v);
    let mut monitor = Monitor::new();
    for _ in 0..limit {
        let w = apply(&v);
        let lambda = dot(&v, &w).re;
        if monitor.converged(lambda, ctl.tol) {
            let residual = vec_norm(
                &w.iter()
                    .zip(&v)
                    .map(|(a, b)| a - b * lambda)
                    .collect::<Vec<_>>(),
            );
            return Ok(Some(Eigenpair {
                value: lambda,
                vector: v,
                residual,
            }));
        }
        let mut next = power.apply(&v);
        if normalize(&mut next) == 0.0 {
            return Ok(None);
        }
        v = next;
    }
    Err(Error::Convergence {
        iterations: ctl.max_iterations,
        context: format!("{context}, accelerated"),
    })
}

/// Largest eigenvalue of a positive semidefinite operator on `ℂⁿ`.
fn top_psd(
    apply: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    n: usize,
    ctl: &PowerIteration,
    context: &str,
) -> Result<Eigenpair> {
    let mut best: Option<Eigenpair> = None;
    for start in start_vectors(n) {
        let plain = ctl.max_iterations.min(PLAIN_LIMIT);
        let run = match rayleigh_run(apply, start, ctl, plain) {
            Run::Done(r) => r,
            Run::Stalled(v) if plain < ctl.max_iterations => {
                accelerated_run(apply, n, v, ctl, ctl.max_iterations - plain, context)?
            }
            Run::Stalled(_) => {
                return Err(Error::Convergence {
                    iterations: ctl.max_iterations,
                    context: context.to_string(),
                })
            }
        };
        if let Some(pair) = run {
            if best.as_ref().map_or(true, |b| pair.value > b.value) {
                best = Some(pair);
            }
        }
    }
    Ok(best.unwrap_or(Eigenpair {
        value: 0.0,
        vector: vec![Complex64::new(0.0, 0.0); n],
        residual: 0.0,
    }))
}

/// Largest singular value `sqrt(λ_max(A*A))`, by power iteration on `A*A`.
pub fn operator_norm_l2(a: &FiniteMatrix, tol: f64) -> Result<f64> {
    let ctl = PowerIteration::with_tol(tol)?;
    operator_norm_with(a, &ctl)
}

pub(crate) fn operator_norm_with(a: &FiniteMatrix, ctl: &PowerIteration) -> Result<f64> {
    if a.is_zero() {
        return Ok(0.0);
    }
    let apply = |x: &[Complex64]| a.apply_adjoint(&a.apply(x));
    let top = top_psd(&apply, a.size(), ctl, "operator norm (power iteration on A*A)")?;
    Ok(top.value.max(0.0).sqrt())
}

/// `(λ_min, λ_max)` of a Hermitian matrix.
///
/// If the Gershgorin lower bound `g` is positive, `λ_max = g + λ_max(H − gI)`
/// by power iteration on the shifted matrix. Otherwise power iteration runs
/// on `H`, and when that does not produce a nonnegative, well-resolved
/// eigenpair (indefinite `H`, or `±ρ` ties) it is recomputed on `H + σI`.
/// `λ_min` then comes from power iteration on `λ_max I − H`.
pub fn eigen_extremes_hermitian(h: &FiniteMatrix, tol: f64) -> Result<(f64, f64)> {
    let ctl = PowerIteration::with_tol(tol)?;
    eigen_extremes_with(h, &ctl)
}

pub(crate) fn eigen_extremes_with(h: &FiniteMatrix, ctl: &PowerIteration) -> Result<(f64, f64)> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::structural("matrix is not Hermitian within 1e-12"));
    }
    if h.is_zero() {
        return Ok((0.0, 0.0));
    }
    let n = h.size();
    let gershgorin_low = (0..n)
        .map(|r| {
            let off: f64 = (0..n).filter(|&c| c != r).map(|c| h.at(r, c).norm()).sum();
            h.at(r, r).re - off
        })
        .fold(f64::INFINITY, f64::min);
    let plain = |x: &[Complex64]| h.apply(x);
    let lambda_max = if gershgorin_low > 0.0 {
        // Positive definite: iterate on H − gI, which spreads a tight cluster.
        let shifted = |x: &[Complex64]| {
            h.apply(x)
                .iter()
                .zip(x)
                .map(|(hx, xi)| hx - xi * gershgorin_low)
                .collect::<Vec<_>>()
        };
        gershgorin_low + top_psd(&shifted, n, ctl, "lambda_max (power iteration on H - gI)")?.value
    } else {
        indefinite_top(h, &plain, ctl)?
    };
    let reflected = |x: &[Complex64]| {
        h.apply(x)
            .iter()
            .zip(x)
            .map(|(hx, xi)| xi * lambda_max - hx)
            .collect::<Vec<_>>()
    };
    let gap = top_psd(&reflected, n, ctl, "lambda_min (power iteration on lambda_max I - H)")?;
    Ok((lambda_max - gap.value.max(0.0), lambda_max))
}

/// `λ_max` when positivity is not evident: plain power iteration, falling
/// back to the shift `H + σI` (`σ` the largest absolute row sum) when the
/// result is negative or poorly resolved.
fn indefinite_top(
    h: &FiniteMatrix,
    plain: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    ctl: &PowerIteration,
) -> Result<f64> {
    let n = h.size();
    let dominant = top_psd(plain, n, ctl, "lambda_max (power iteration on H)")?;
    Ok(if dominant.value >= 0.0
        && dominant.residual <= RESIDUAL_ACCEPT * dominant.value.abs()
        && dominant.vector.iter().any(|z| z.norm() > 0.0)
    {
        dominant.value
    } else {
        let sigma = (0..n)
            .map(|r| h.row(r).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let shifted = |x: &[Complex64]| {
            h.apply(x)
                .iter()
                .zip(x)
                .map(|(hx, xi)| hx + xi * sigma)
                .collect::<Vec<_>>()
        };
        top_psd(&shifted, n, ctl, "lambda_max (shifted power iteration)")?.value - sigma
    })
}

/// Modulus of the dominant eigenvalue of a general square matrix.
///
/// Estimates `‖A v_k‖` along normalized power iterates from each
/// deterministic start in turn; the largest converged estimate wins. Fails
/// if no start converges (e.g. distinct dominant eigenvalues of equal modulus
/// on a non-normal matrix).
pub fn spectral_radius(a: &FiniteMatrix, tol: f64) -> Result<f64> {
    let ctl = PowerIteration::with_tol(tol)?;
    if a.is_zero() {
        return Ok(0.0);
    }
    let mut best: Option<f64> = None;
    let mut failures = 0;
    for start in start_vectors(a.size()) {
        match radius_run(a, start, &ctl) {
            Ok(r) => best = Some(best.map_or(r, |b: f64| b.max(r))),
            Err(_) => failures += 1,
        }
    }
    best.ok_or(Error::Convergence {
        iterations: failures * ctl.max_iterations,
        context: "spectral radius (all deterministic restarts failed)".to_string(),
    })
}

fn radius_run(a: &FiniteMatrix, mut v: Vec<Complex64>, ctl: &PowerIteration) -> Result<f64> {
    normalize(&mut v);
    let mut monitor = Monitor::new();
    for _ in 0..ctl.max_iterations {
        let mut w = a.apply(&v);
        let growth = normalize(&mut w);
        if growth == 0.0 {
            return Ok(0.0);
        }
        if monitor.converged(growth, ctl.tol) {
            return Ok(growth);
        }
        v = w;
    }
    Err(Error::Convergence {
        iterations: ctl.max_iterations,
        context: "spectral radius".to_string(),
    })
}
