//! Compensated summation.
//!
//! Norm reductions and symbol arithmetic run through [`Neumaier`]; dense
//! products and matrix-vector products use plain sums. Either way every sum
//! visits its terms in a fixed ascending order, so results do not depend on
//! how work is split across threads.

use num_complex::Complex64;

/// Neumaier (improved Kahan) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise Neumaier sum of complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of an iterator, visited in iteration order.
pub fn sum<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut acc = Neumaier::new();
    for x in items {
        acc.add(x);
    }
    acc.value()
}

/// `p`-norm of nonnegative magnitudes; `p = ∞` is the plain maximum.
///
/// Finite `p` is evaluated as `M (Σ (x/M)^p)^{1/p}` with `M = max x` so large
/// exponents neither overflow nor underflow.
pub(crate) fn p_norm(values: &[f64], p: f64) -> f64 {
    let max = values.iter().copied().fold(0.0_f64, f64::max);
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    if p == 1.0 {
        return sum(values.iter().copied());
    }
    let s = sum(values.iter().map(|&x| (x / max).powf(p)));
    max * s.powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s = sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn p_norm_cases() {
        assert_eq!(p_norm(&[3.0, 4.0], 2.0), 5.0);
        assert_eq!(p_norm(&[3.0, 4.0], 1.0), 7.0);
        assert_eq!(p_norm(&[3.0, 4.0], f64::INFINITY), 4.0);
        assert_eq!(p_norm(&[0.0, 0.0], 2.0), 0.0);
        assert!((p_norm(&[1e200, 1e200], 2.0) - 2f64.sqrt() * 1e200).abs() < 1e186);
    }
}
