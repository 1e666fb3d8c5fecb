//! Wiener algebras and `C¹[a, b]` on the Fourier and sample side.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::FourierSymbol;
use crate::sum::sum;

/// `Σ |f̂(n)|`.
pub fn wiener_norm(f: &FourierSymbol) -> f64 {
    sum(f.iter().map(|(_, c)| c.norm()))
}

/// `Σ (|n| + 1) |f̂(n)|`.
pub fn wiener1_norm(f: &FourierSymbol) -> f64 {
    sum(f.iter().map(|(n, c)| (n.unsigned_abs() as f64 + 1.0) * c.norm()))
}

/// Truncated reciprocal of a symbol with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WienerInverse {
    pub inverse: FourierSymbol,
    pub grid_size: usize,
    pub tol: f64,
    /// `min |f|` over the sampling grid.
    pub min_modulus: f64,
    /// `Σ |ĝ(n)|` over coefficients dropped below `tol`.
    pub dropped_mass: f64,
    /// `‖f · g − 1‖_W` for the truncated `g`.
    pub residual: f64,
}

/// Fourier coefficients of `1/f` from `grid_size` equispaced samples.
///
/// `grid_size` must be a power of two larger than twice the degree of `f`.
pub fn wiener_inverse(f: &FourierSymbol, grid_size: usize, tol: f64) -> Result<WienerInverse> {
    if !grid_size.is_power_of_two() || grid_size < 2 {
        return Err(Error::param(format!("grid size must be a power of two, got {grid_size}")));
    }
    if (grid_size as u64) <= 2 * f.degree() {
        return Err(Error::param(format!(
            "grid size {grid_size} cannot resolve a symbol of degree {}",
            f.degree()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::param(format!("tolerance must be positive, got {tol}")));
    }
    let g = grid_size;
    let step = std::f64::consts::TAU / g as f64;
    let samples: Vec<Complex64> = (0..g).map(|k| f.eval(k as f64 * step)).collect();
    let max = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let min_modulus = samples.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if max == 0.0 || min_modulus <= 1e-12 * max {
        return Err(Error::NotInvertible(format!(
            "symbol nearly vanishes on the grid (min |f| = {min_modulus:e})"
        )));
    }

    let mut buffer: Vec<Complex64> = samples.iter().map(|z| z.inv()).collect();
    FftPlanner::<f64>::new().plan_fft_forward(g).process(&mut buffer);

    let half = (g / 2) as i64;
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (k, z) in buffer.into_iter().enumerate() {
        let n = if (k as i64) < half { k as i64 } else { k as i64 - g as i64 };
        let c = z / g as f64;
        if c.norm() < tol {
            dropped.push(c.norm());
        } else {
            kept.push((n, c));
        }
    }
    let inverse = FourierSymbol::new(kept);
    let product = f.convolve(&inverse);
    let defect = product
        .iter()
        .map(|(n, c)| if n == 0 { c - 1.0 } else { c });
    let mut residual_terms: Vec<f64> = defect.map(|c| c.norm()).collect();
    if product.get(0) == Complex64::new(0.0, 0.0) {
        residual_terms.push(1.0);
    }
    Ok(WienerInverse {
        inverse,
        grid_size: g,
        tol,
        min_modulus,
        dropped_mass: sum(dropped),
        residual: sum(residual_terms),
    })
}

/// Real samples of a function on a uniform grid over `[lo, hi]`, with
/// optional exact derivative samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    derivative: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    second_derivative: Option<Vec<f64>>,
}

pub const MIN_GRID: usize = 16;

impl GridFunction {
    pub fn new(
        lo: f64,
        hi: f64,
        values: Vec<f64>,
        derivative: Option<Vec<f64>>,
        second_derivative: Option<Vec<f64>>,
    ) -> Result<Self> {
        let f = Self {
            lo,
            hi,
            values,
            derivative,
            second_derivative,
        };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::param(format!("bad interval [{}, {}]", self.lo, self.hi)));
        }
        let g = self.values.len();
        if g < MIN_GRID {
            return Err(Error::param(format!("grid needs at least {MIN_GRID} points, got {g}")));
        }
        for s in [&self.derivative, &self.second_derivative].into_iter().flatten() {
            if s.len() != g {
                return Err(Error::param("derivative samples do not match the grid"));
            }
        }
        let all = self
            .values
            .iter()
            .chain(self.derivative.iter().flatten())
            .chain(self.second_derivative.iter().flatten());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite sample".into()));
        }
        Ok(())
    }

    /// Sample `x ↦ (f, f′, f″)` at `grid` points.
    pub fn from_fn(lo: f64, hi: f64, grid: usize, f: impl Fn(f64) -> (f64, f64, f64)) -> Result<Self> {
        if grid < 2 {
            return Err(Error::param(format!("grid needs at least {MIN_GRID} points, got {grid}")));
        }
        let h = (hi - lo) / (grid - 1) as f64;
        let (mut v, mut d, mut dd) = (Vec::new(), Vec::new(), Vec::new());
        for k in 0..grid {
            let x = if k + 1 == grid { hi } else { lo + k as f64 * h };
            let (a, b, c) = f(x);
            v.push(a);
            d.push(b);
            dd.push(c);
        }
        Self::new(lo, hi, v, Some(d), Some(dd))
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative(&self) -> Option<&[f64]> {
        self.derivative.as_deref()
    }

    pub fn second_derivative(&self) -> Option<&[f64]> {
        self.second_derivative.as_deref()
    }

    fn require_derivative(&self) -> Result<&[f64]> {
        self.derivative()
            .ok_or_else(|| Error::param("derivative samples are required"))
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.lo != other.lo || self.hi != other.hi || self.len() != other.len() {
            return Err(Error::structural("grid functions live on different grids"));
        }
        Ok(())
    }

    /// Pointwise product; derivatives follow the product rule.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        let v: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        let d = match (&self.derivative, &other.derivative) {
            (Some(da), Some(db)) => Some(
                (0..self.len())
                    .map(|k| da[k] * other.values[k] + self.values[k] * db[k])
                    .collect(),
            ),
            _ => None,
        };
        Self::new(self.lo, self.hi, v, d, None)
    }

    /// `1/f` with derivative `−f′/f²`.
    pub fn reciprocal(&self) -> Result<Self> {
        if let Some(k) = self.values.iter().position(|&v| v == 0.0 || !(1.0 / v).is_finite()) {
            return Err(Error::NotInvertible(format!(
                "function vanishes at grid point {k}"
            )));
        }
        let v = self.values.iter().map(|x| 1.0 / x).collect();
        let d = self.derivative.as_ref().map(|d| {
            d.iter()
                .zip(&self.values)
                .map(|(dx, x)| -dx / (x * x))
                .collect()
        });
        Self::new(self.lo, self.hi, v, d, None)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid function serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        f.validate()?;
        Ok(f)
    }
}

fn sup(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Grid values of `(‖f‖_C, ‖f‖_{C¹})`.
pub fn c1_norms(f: &GridFunction) -> Result<(f64, f64)> {
    let d = f.require_derivative()?;
    let s = sup(f.values());
    Ok((s, s + sup(d)))
}

/// Two sides of an inequality evaluated on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

const REL_TOL: f64 = 1e-9;

impl InequalityReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs * (1.0 + REL_TOL),
        }
    }
}

/// `‖1/f‖_{C¹} ≤ ‖1/f‖_C² ‖f‖_{C¹}` on the grid.
pub fn c1_inversion_check(f: &GridFunction) -> Result<InequalityReport> {
    let (_, f_c1) = c1_norms(f)?;
    let inv = f.reciprocal()?;
    let (inv_c, inv_c1) = c1_norms(&inv)?;
    Ok(InequalityReport::new(inv_c1, inv_c * inv_c * f_c1))
}

/// `‖fg‖_{C¹} ≤ ‖f‖_{C¹}‖g‖_C + ‖f‖_C‖g‖_{C¹}` on the grid.
pub fn c1_leibniz_check(f: &GridFunction, g: &GridFunction) -> Result<InequalityReport> {
    let (f_c, f_c1) = c1_norms(f)?;
    let (g_c, g_c1) = c1_norms(g)?;
    let (_, fg_c1) = c1_norms(&f.product(g)?)?;
    Ok(InequalityReport::new(fg_c1, f_c1 * g_c + f_c * g_c1))
}

/// `‖f′‖_C ≤ max(4‖f‖_C^{1/2}‖f″‖_C^{1/2}, 8(b − a)^{−1}‖f‖_C)` on the grid.
pub fn c2_interpolation_check(f: &GridFunction) -> Result<InequalityReport> {
    let d = f.require_derivative()?;
    let dd = f
        .second_derivative()
        .ok_or_else(|| Error::param("second derivative samples are required"))?;
    let (lo, hi) = f.interval();
    let s = sup(f.values());
    let rhs = f64::max(4.0 * (s * sup(dd)).sqrt(), 8.0 * s / (hi - lo));
    Ok(InequalityReport::new(sup(d), rhs))
}

/// `‖fg‖_{W¹} ≤ ‖f‖_{W¹}‖g‖_W + ‖f‖_W‖g‖_{W¹}` via exact convolution.
pub fn w1_leibniz_check(f: &FourierSymbol, g: &FourierSymbol) -> InequalityReport {
    let lhs = wiener1_norm(&f.convolve(g));
    let rhs = wiener1_norm(f) * wiener_norm(g) + wiener_norm(f) * wiener1_norm(g);
    InequalityReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 4.0 * f64::EPSILON),
    }
}
