//! Matrix powers in log-magnitude form.

use crate::error::Result;
use crate::matrix::FiniteMatrix;

/// `X = e^{ln_scale} · mantissa` with `max |mantissa| = 1` (or `mantissa = 0`).
#[derive(Debug, Clone)]
pub(crate) struct Scaled {
    pub ln_scale: f64,
    pub mantissa: FiniteMatrix,
}

impl Scaled {
    pub fn new(x: &FiniteMatrix) -> Self {
        let mut s = Self {
            ln_scale: 0.0,
            mantissa: x.clone(),
        };
        s.rescale();
        s
    }

    fn rescale(&mut self) {
        let m = self.mantissa.max_abs();
        if m > 0.0 {
            self.mantissa = self.mantissa.scale(1.0 / m);
            self.ln_scale += m.ln();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let mut out = Self {
            ln_scale: self.ln_scale + other.ln_scale,
            mantissa: self.mantissa.multiply(&other.mantissa)?,
        };
        out.rescale();
        Ok(out)
    }

    /// `X^m` by repeated multiplication in a fixed order.
    pub fn power(&self, m: u32) -> Result<Self> {
        let mut out = self.clone();
        for _ in 1..m {
            out = out.multiply(self)?;
        }
        Ok(out)
    }

    /// `ln ‖X‖` for a norm evaluated on the mantissa, `None` when `X = 0`.
    pub fn ln_norm(&self, norm: impl Fn(&FiniteMatrix) -> Result<f64>) -> Result<Option<f64>> {
        if self.is_zero() {
            return Ok(None);
        }
        let v = norm(&self.mantissa)?;
        Ok((v > 0.0).then(|| self.ln_scale + v.ln()))
    }
}
