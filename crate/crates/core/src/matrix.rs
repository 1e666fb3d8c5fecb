//! Finite truncations of bi-infinite matrices and finitely supported Fourier symbols.
//!
//! A [`FiniteMatrix`] lives on an [`IndexWindow`] `{lo, …, hi}` of ℤ, so the
//! entry `a(i, j)` is addressed by the same integers the infinite matrix uses.
//! Norms only ever look at `i − j`, which makes the window offset irrelevant
//! for them, but it keeps Laurent truncations and file round-trips honest.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::ComplexNeumaier;

/// Rows at or above this size are multiplied in parallel.
const PAR_THRESHOLD: usize = 32;

/// Inclusive index range `{lo, …, hi}` of ℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexWindow {
    lo: i64,
    hi: i64,
}

impl IndexWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::structural(format!("empty window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Window `{0, …, n−1}`.
    pub fn zero_based(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::structural("window of size 0"));
        }
        Self::new(0, n as i64 - 1)
    }

    /// Window `{−r, …, r}`.
    pub fn centered(radius: usize) -> Self {
        let r = radius as i64;
        Self { lo: -r, hi: r }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    fn local(&self, i: i64) -> usize {
        debug_assert!(self.contains(i));
        (i - self.lo) as usize
    }
}

impl fmt::Display for IndexWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}..{}}}", self.lo, self.hi)
    }
}

/// Dense complex matrix on `window × window`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMatrix {
    window: IndexWindow,
    data: Vec<Complex64>,
}

impl FiniteMatrix {
    pub fn zeros(window: IndexWindow) -> Self {
        let n = window.len();
        Self {
            window,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(window: IndexWindow) -> Self {
        let mut m = Self::zeros(window);
        let n = window.len();
        for r in 0..n {
            m.data[r * n + r] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds `a(i, j) = f(i, j)` with `i, j` taken from the window.
    pub fn from_fn(window: IndexWindow, mut f: impl FnMut(i64, i64) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(window.len() * window.len());
        for i in window.indices() {
            for j in window.indices() {
                data.push(f(i, j));
            }
        }
        Self { window, data }
    }

    /// Row-major local data; `data.len()` must be a perfect square.
    pub fn from_row_major(window: IndexWindow, data: Vec<Complex64>) -> Result<Self> {
        let n = window.len();
        if data.len() != n * n {
            return Err(Error::structural(format!(
                "expected {} entries for window {window}, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Self { window, data })
    }

    /// Real matrix on `{0, …, n−1}` from nested rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let window = IndexWindow::zero_based(n)?;
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::structural("rows must form a square matrix"));
            }
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Ok(Self { window, data })
    }

    /// Real diagonal matrix on `{0, …, n−1}`.
    pub fn diag(values: &[f64]) -> Result<Self> {
        let window = IndexWindow::zero_based(values.len())?;
        let mut m = Self::zeros(window);
        let n = values.len();
        for (r, &v) in values.iter().enumerate() {
            m.data[r * n + r] = Complex64::new(v, 0.0);
        }
        Ok(m)
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    /// Side length.
    pub fn size(&self) -> usize {
        self.window.len()
    }

    /// Entry `a(i, j)` by window index; zero outside the window.
    pub fn get(&self, i: i64, j: i64) -> Complex64 {
        if !self.window.contains(i) || !self.window.contains(j) {
            return Complex64::new(0.0, 0.0);
        }
        self.data[self.window.local(i) * self.size() + self.window.local(j)]
    }

    pub fn set(&mut self, i: i64, j: i64, value: Complex64) -> Result<()> {
        if !self.window.contains(i) || !self.window.contains(j) {
            return Err(Error::structural(format!(
                "index ({i}, {j}) outside window {}",
                self.window
            )));
        }
        let n = self.size();
        let k = self.window.local(i) * n + self.window.local(j);
        self.data[k] = value;
        Ok(())
    }

    /// Entry by local (row, column) position.
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.size() + c]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        let n = self.size();
        &self.data[r * n..(r + 1) * n]
    }

    fn check_window(&self, other: &Self, op: &str) -> Result<()> {
        if self.window != other.window {
            return Err(Error::structural(format!(
                "{op}: window mismatch {} vs {}",
                self.window, other.window
            )));
        }
        Ok(())
    }

    /// Matrix product `C(i, j) = Σ_k A(i, k) B(k, j)`.
    ///
    /// Every entry accumulates its terms in ascending `k`, so rows may be
    /// computed on different threads without changing a single bit.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_window(other, "multiply")?;
        let n = self.size();
        let b_re: Vec<f64> = other.data.iter().map(|z| z.re).collect();
        let b_im: Vec<f64> = other.data.iter().map(|z| z.im).collect();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        let fill_row = |(r, out): (usize, &mut [Complex64])| {
            let mut re = vec![0.0; n];
            let mut im = vec![0.0; n];
            for (k, a) in self.data[r * n..(r + 1) * n].iter().enumerate() {
                let (ar, ai) = (a.re, a.im);
                let br = &b_re[k * n..(k + 1) * n];
                let bi = &b_im[k * n..(k + 1) * n];
                for c in 0..n {
                    re[c] += ar * br[c] - ai * bi[c];
                    im[c] += ar * bi[c] + ai * br[c];
                }
            }
            for (slot, (x, y)) in out.iter_mut().zip(re.into_iter().zip(im)) {
                *slot = Complex64::new(x, y);
            }
        };
        if n >= PAR_THRESHOLD {
            data.par_chunks_mut(n).enumerate().for_each(fill_row);
        } else {
            data.chunks_mut(n).enumerate().for_each(fill_row);
        }
        Ok(Self {
            window: self.window,
            data,
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.size();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        Self {
            window: self.window,
            data,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            window: self.window,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_window(other, "add")?;
        Ok(Self {
            window: self.window,
            data: self.data.iter().zip(&other.data).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_window(other, "sub")?;
        Ok(Self {
            window: self.window,
            data: self.data.iter().zip(&other.data).map(|(x, y)| x - y).collect(),
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// `‖A − A*‖_max ≤ tol · max(1, ‖A‖_max)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.size();
        let scale = self.max_abs().max(1.0);
        (0..n).all(|r| (r..n).all(|c| (self.at(r, c) - self.at(c, r).conj()).norm() <= tol * scale))
    }

    /// `y = A x` on local coordinates, summed in ascending column order.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        debug_assert_eq!(x.len(), n);
        (0..n)
            .map(|r| {
                let (mut re, mut im) = (0.0, 0.0);
                for (a, b) in self.row(r).iter().zip(x) {
                    re += a.re * b.re - a.im * b.im;
                    im += a.re * b.im + a.im * b.re;
                }
                Complex64::new(re, im)
            })
            .collect()
    }

    /// `y = A* x` on local coordinates, summed in ascending row order.
    pub fn apply_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        debug_assert_eq!(x.len(), n);
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        for (r, b) in x.iter().enumerate() {
            for (c, a) in self.row(r).iter().enumerate() {
                // conj(a) * b
                re[c] += a.re * b.re + a.im * b.im;
                im[c] += a.re * b.im - a.im * b.re;
            }
        }
        re.into_iter().zip(im).map(|(x, y)| Complex64::new(x, y)).collect()
    }

    pub fn to_file(&self) -> MatrixFile {
        let mut entries = Vec::new();
        for i in self.window.indices() {
            for j in self.window.indices() {
                let z = self.get(i, j);
                if z.re != 0.0 || z.im != 0.0 {
                    entries.push((i, j, z.re, z.im));
                }
            }
        }
        MatrixFile {
            format_version: FORMAT_VERSION,
            window: (self.window.lo, self.window.hi),
            entries,
        }
    }

    pub fn from_file(file: &MatrixFile) -> Result<Self> {
        check_version(file.format_version)?;
        let window = IndexWindow::new(file.window.0, file.window.1)
            .map_err(|e| Error::Format(e.to_string()))?;
        let mut m = Self::zeros(window);
        let mut seen = std::collections::HashSet::new();
        for &(i, j, re, im) in &file.entries {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Format(format!("non-finite entry at ({i}, {j})")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Format(format!("duplicate entry ({i}, {j})")));
            }
            m.set(i, j, Complex64::new(re, im))
                .map_err(|e| Error::Format(e.to_string()))?;
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("matrix file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_file(&file)
    }
}

pub const FORMAT_VERSION: u32 = 1;

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format_version {v}")));
    }
    Ok(())
}

/// On-disk matrix: `{"format_version":1, "window":[lo,hi], "entries":[[i,j,re,im],...]}`.
///
/// Absent entries are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub format_version: u32,
    pub window: (i64, i64),
    pub entries: Vec<(i64, i64, f64, f64)>,
}

/// Finitely supported sequence `n ↦ f̂(n)`; the function is `Σ f̂(n) e^{inx}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "SymbolFile", try_from = "SymbolFile")]
pub struct FourierSymbol {
    coeffs: BTreeMap<i64, Complex64>,
}

impl FourierSymbol {
    /// Builds a symbol, dropping exact zeros and summing repeated indices.
    pub fn new(pairs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coeffs: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, z) in pairs {
            *coeffs.entry(n).or_default() += z;
        }
        coeffs.retain(|_, z| z.re != 0.0 || z.im != 0.0);
        Self { coeffs }
    }

    pub fn from_real(pairs: &[(i64, f64)]) -> Self {
        Self::new(pairs.iter().map(|&(n, x)| (n, Complex64::new(x, 0.0))))
    }

    pub fn get(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    /// Nonzero coefficients in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &z)| (n, z))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max |n|` over the support (0 for the zero symbol).
    pub fn degree(&self) -> u64 {
        self.coeffs.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0)
    }

    /// Pointwise product of the functions, i.e. convolution of coefficients.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut out: BTreeMap<i64, ComplexNeumaier> = BTreeMap::new();
        for (&n, &x) in &self.coeffs {
            for (&k, &y) in &other.coeffs {
                out.entry(n + k).or_default().add(x * y);
            }
        }
        Self::new(out.into_iter().map(|(n, acc)| (n, acc.value())))
    }

    /// `f(x) = Σ f̂(n) e^{inx}`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let mut acc = ComplexNeumaier::new();
        for (&n, &z) in &self.coeffs {
            acc.add(z * Complex64::from_polar(1.0, n as f64 * x));
        }
        acc.value()
    }

    pub fn to_file(&self) -> SymbolFile {
        SymbolFile {
            format_version: FORMAT_VERSION,
            coeffs: self.iter().map(|(n, z)| (n, z.re, z.im)).collect(),
        }
    }

    pub fn from_file(file: &SymbolFile) -> Result<Self> {
        check_version(file.format_version)?;
        let mut seen = std::collections::HashSet::new();
        for &(n, re, im) in &file.coeffs {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Format(format!("non-finite coefficient at {n}")));
            }
            if !seen.insert(n) {
                return Err(Error::Format(format!("duplicate coefficient {n}")));
            }
        }
        Ok(Self::new(
            file.coeffs.iter().map(|&(n, re, im)| (n, Complex64::new(re, im))),
        ))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("symbol file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SymbolFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_file(&file)
    }
}

/// On-disk symbol: `{"format_version":1, "coeffs":[[n,re,im],...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolFile {
    pub format_version: u32,
    pub coeffs: Vec<(i64, f64, f64)>,
}

impl From<FourierSymbol> for SymbolFile {
    fn from(f: FourierSymbol) -> Self {
        f.to_file()
    }
}

impl TryFrom<SymbolFile> for FourierSymbol {
    type Error = Error;

    fn try_from(file: SymbolFile) -> Result<Self> {
        Self::from_file(&file)
    }
}

/// Truncated Laurent matrix `A(i, j) = f̂(i − j)`.
pub fn laurent_from_symbol(symbol: &FourierSymbol, window: IndexWindow) -> FiniteMatrix {
    FiniteMatrix::from_fn(window, |i, j| symbol.get(i - j))
}
