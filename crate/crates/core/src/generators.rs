//! Deterministic test inputs.
//!
//! The stream generator is xoshiro256++ seeded through SplitMix64, and floats
//! are taken from the top 53 bits of each output, so a `(kind, params, seed)`
//! triple pins every generated value independently of the `rand` version.
//! Per-sample streams come from [`derive_seed`], so parallel sampling yields
//! the same inputs under any schedule.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::GridFunction;
use crate::matrix::{laurent_from_symbol, FiniteMatrix, FourierSymbol, IndexWindow};
use crate::norms::{eigen_extremes_hermitian, schur_norm, DEFAULT_TOL};

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent sub-seed for sample `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15_u64.wrapping_mul(index.wrapping_add(1))))
}

/// Seeded portable stream.
pub struct SeededRng(Xoshiro256PlusPlus);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform on the closed complex unit disc, by rejection from the square.
    pub fn unit_disc(&mut self) -> Complex64 {
        loop {
            let x = self.uniform_in(-1.0, 1.0);
            let y = self.uniform_in(-1.0, 1.0);
            if x * x + y * y <= 1.0 {
                return Complex64::new(x, y);
            }
        }
    }
}

/// Which generator produced a fixture, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenSpec {
    Decay { n: usize, alpha: f64, seed: u64 },
    Invertible { n: usize, alpha: f64, kappa_target: f64, seed: u64 },
    Laurent { degree: usize, alpha: f64, lo: i64, hi: i64, seed: u64 },
    TrigPoly { degree: usize, lo: f64, hi: f64, grid: usize, seed: u64 },
}

fn decay_profile(k: u64, alpha: f64) -> f64 {
    (1.0 + k as f64).powf(-alpha - 1.0)
}

/// `a(i, j) = u(i, j) (1 + |i − j|)^{−α−1}` with `u` uniform in the unit disc,
/// on the window `{0, …, n−1}`. Entries are drawn row by row.
pub fn gen_decay(n: usize, alpha: f64, seed: u64) -> Result<FiniteMatrix> {
    if n < 2 {
        return Err(Error::param(format!("gen_decay needs n ≥ 2, got {n}")));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::param(format!("alpha must be finite and ≥ 0, got {alpha}")));
    }
    let mut rng = SeededRng::new(seed);
    let window = IndexWindow::zero_based(n)?;
    Ok(FiniteMatrix::from_fn(window, |i, j| {
        rng.unit_disc() * decay_profile(i.abs_diff(j), alpha)
    }))
}

/// An invertible matrix `I + tE` together with its measured conditioning.
#[derive(Debug, Clone)]
pub struct Invertible {
    pub matrix: FiniteMatrix,
    /// Measured `κ(A*A)`.
    pub kappa: f64,
    /// The factor `t` applied to the decay perturbation.
    pub scale: f64,
}

fn measured_kappa(a: &FiniteMatrix) -> Result<f64> {
    let ata = a.adjoint().multiply(a)?;
    let (lo, hi) = eigen_extremes_hermitian(&ata, DEFAULT_TOL)?;
    Ok(if lo > 0.0 { hi / lo } else { f64::INFINITY })
}

/// `A = I + tE` with `E = gen_decay(n, alpha, seed)` and `t ∈ (0, 1]` the
/// largest value found by bisection with measured `κ(A*A) ≤ kappa_target`.
pub fn gen_invertible(n: usize, alpha: f64, kappa_target: f64, seed: u64) -> Result<Invertible> {
    if !(kappa_target > 1.0) {
        return Err(Error::param(format!("kappa_target must exceed 1, got {kappa_target}")));
    }
    let e = gen_decay(n, alpha, seed)?;
    let identity = FiniteMatrix::identity(e.window());
    let build = |t: f64| identity.add(&e.scale(t));

    let full = build(1.0)?;
    let kappa = measured_kappa(&full)?;
    if kappa <= kappa_target {
        return Ok(Invertible {
            matrix: full,
            kappa,
            scale: 1.0,
        });
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut accepted: Option<(FiniteMatrix, f64)> = None;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        let candidate = build(mid)?;
        let k = measured_kappa(&candidate)?;
        if k <= kappa_target {
            lo = mid;
            accepted = Some((candidate, k));
        } else {
            hi = mid;
        }
        if lo > 0.0 && hi - lo <= 1e-2 * lo {
            break;
        }
    }
    match accepted {
        Some((matrix, kappa)) => Ok(Invertible {
            matrix,
            kappa,
            scale: lo,
        }),
        None => Err(Error::Generation(format!(
            "no scaling in 50 bisection steps reaches kappa ≤ {kappa_target}"
        ))),
    }
}

/// Random symbol on `{−degree, …, degree}` with `|f̂(n)| ≤ (1 + |n|)^{−α−1}`.
pub fn gen_symbol(degree: usize, alpha: f64, seed: u64) -> Result<FourierSymbol> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::param(format!("alpha must be finite and ≥ 0, got {alpha}")));
    }
    let mut rng = SeededRng::new(seed);
    let d = degree as i64;
    Ok(FourierSymbol::new(
        (-d..=d).map(|n| (n, rng.unit_disc() * decay_profile(n.unsigned_abs(), alpha))),
    ))
}

/// Laurent truncation of [`gen_symbol`] on `window`.
pub fn gen_laurent(
    degree: usize,
    alpha: f64,
    window: IndexWindow,
    seed: u64,
) -> Result<FiniteMatrix> {
    Ok(laurent_from_symbol(&gen_symbol(degree, alpha, seed)?, window))
}

/// Real trigonometric polynomial `c₀ + Σ_{k=1}^{d} (a_k cos kx + b_k sin kx)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    fn oscillating(&self, x: f64) -> (f64, f64, f64) {
        let (mut v, mut d, mut dd) = (0.0, 0.0, 0.0);
        for (k, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let k = (k + 1) as f64;
            let (s, c) = (k * x).sin_cos();
            v += a * c + b * s;
            d += k * (b * c - a * s);
            dd -= k * k * (a * c + b * s);
        }
        (v, d, dd)
    }

    /// `(f, f′, f″)` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let (v, d, dd) = self.oscillating(x);
        (self.constant + v, d, dd)
    }

    /// Samples with exact first and second derivatives on a uniform grid.
    pub fn sample(&self, lo: f64, hi: f64, grid: usize) -> Result<GridFunction> {
        GridFunction::from_fn(lo, hi, grid, |x| self.eval(x))
    }

    /// Coefficients of `e^{ikx}`, for Wiener-side checks.
    pub fn symbol(&self) -> FourierSymbol {
        let mut pairs = vec![(0, Complex64::new(self.constant, 0.0))];
        for (k, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let k = k as i64 + 1;
            // a cos + b sin = ((a − ib)/2) e^{ikx} + ((a + ib)/2) e^{−ikx}
            pairs.push((k, Complex64::new(a / 2.0, -b / 2.0)));
            pairs.push((-k, Complex64::new(a / 2.0, b / 2.0)));
        }
        FourierSymbol::new(pairs)
    }
}

/// Trigonometric polynomial of the given degree with `a_k, b_k` uniform in
/// `[−1/k, 1/k]`, shifted so the grid minimum of `f` is at least one.
pub fn gen_trig_poly(
    degree: usize,
    seed: u64,
    interval: (f64, f64),
    grid: usize,
) -> Result<(TrigPoly, GridFunction)> {
    let (lo, hi) = interval;
    let mut rng = SeededRng::new(seed);
    let mut cos = Vec::with_capacity(degree);
    let mut sin = Vec::with_capacity(degree);
    for k in 1..=degree {
        let r = 1.0 / k as f64;
        cos.push(rng.uniform_in(-r, r));
        sin.push(rng.uniform_in(-r, r));
    }
    let mut poly = TrigPoly {
        constant: 0.0,
        cos,
        sin,
    };
    let probe = poly.sample(lo, hi, grid)?;
    let min = probe.values().iter().copied().fold(f64::INFINITY, f64::min);
    poly.constant = 1.0 - min;
    loop {
        let f = poly.sample(lo, hi, grid)?;
        if f.values().iter().all(|&v| v >= 1.0) {
            return Ok((poly, f));
        }
        poly.constant = poly.constant.next_up();
    }
}

/// Convenience for periodic checks: a trig polynomial on `[0, 2π]`.
pub fn gen_periodic_trig_poly(degree: usize, seed: u64, grid: usize) -> Result<(TrigPoly, GridFunction)> {
    gen_trig_poly(degree, seed, (0.0, TAU), grid)
}

/// Upper bound for `κ(A*A)` from the Schur test, used only for diagnostics.
pub fn schur_kappa_bound(a: &FiniteMatrix) -> Result<f64> {
    let identity = FiniteMatrix::identity(a.window());
    let e = a.sub(&identity)?;
    let r = schur_norm(&e, 1.0, 0.0)?;
    if r >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let k = (1.0 + r) / (1.0 - r);
    Ok(k * k)
}
