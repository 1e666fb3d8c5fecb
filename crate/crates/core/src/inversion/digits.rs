use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base-`m` digits of `n` together with the cofactor chain
/// `n₀ = n`, `n_k = (n_{k−1} − ε_{k−1})/m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitExpansion {
    pub n: u64,
    pub m: u32,
    /// `ε₀, …, ε_l`, least significant first; `ε_l ≥ 1`.
    pub digits: Vec<u32>,
    /// `n₀, …, n_l`.
    pub cofactors: Vec<u64>,
}

impl DigitExpansion {
    /// Index of the leading digit.
    pub fn l(&self) -> usize {
        self.digits.len() - 1
    }

    /// `Σ ε_i m^i`.
    pub fn value(&self) -> u64 {
        self.digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.m as u64 + d as u64)
    }
}

pub fn digit_expansion(n: u64, m: u32) -> Result<DigitExpansion> {
    if n < 1 {
        return Err(Error::param("digit expansion needs n ≥ 1"));
    }
    if m < 2 {
        return Err(Error::param(format!("base must be at least 2, got {m}")));
    }
    let base = m as u64;
    let mut digits = Vec::new();
    let mut cofactors = Vec::new();
    let mut k = n;
    while k > 0 {
        cofactors.push(k);
        let e = k % base;
        digits.push(e as u32);
        k = (k - e) / base;
    }
    Ok(DigitExpansion {
        n,
        m,
        digits,
        cofactors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let one = digit_expansion(1, 2).unwrap();
        assert_eq!((one.digits.clone(), one.l()), (vec![1], 0));
        let e = digit_expansion(11, 2).unwrap();
        assert_eq!(e.digits, vec![1, 1, 0, 1]);
        assert_eq!(e.cofactors, vec![11, 5, 2, 1]);
        let e = digit_expansion(9, 3).unwrap();
        assert_eq!(e.digits, vec![0, 0, 1]);
        assert_eq!(e.cofactors, vec![9, 3, 1]);
        assert!(digit_expansion(0, 2).is_err());
        assert!(digit_expansion(5, 1).is_err());
    }
}
