use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::dist::DiscreteDistribution;
use super::sampler::JointSampler;
use crate::error::{Error, Result};
use crate::rng;

/// One nonzero coefficient `A[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub coef: f64,
}

/// Sparse nonnegative matrix `A` plus independent feature laws; `X = A · Y`.
///
/// Entries are kept in row-major order (columns ascending within a row); that
/// order is also the canonical summation order for `x`, so two scenarios with
/// the same arithmetic produce bit-identical arrival values.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInstance {
    n: usize,
    m: usize,
    entries: Vec<Entry>,
    row_start: Vec<usize>,
    // entry positions for each column, rows ascending
    col_entries: Vec<Vec<usize>>,
    features: Vec<DiscreteDistribution>,
}

/// One draw of the features and the induced arrival values.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
}

impl LinearInstance {
    pub fn new(n: usize, m: usize, entries: Vec<(usize, usize, f64)>, features: Vec<DiscreteDistribution>) -> Result<Self> {
        if features.len() != m {
            return Err(Error::InvalidInstance(format!("{} feature laws for m = {m}", features.len())));
        }
        let mut entries: Vec<Entry> = entries.into_iter().map(|(row, col, coef)| Entry { row, col, coef }).collect();
        for e in &entries {
            if e.row >= n {
                return Err(Error::IndexOutOfRange { index: e.row, limit: n });
            }
            if e.col >= m {
                return Err(Error::IndexOutOfRange { index: e.col, limit: m });
            }
            if !(e.coef.is_finite() && e.coef > 0.0) {
                return Err(Error::InvalidInstance(format!("coefficient {} at ({}, {}) must be positive", e.coef, e.row, e.col)));
            }
        }
        entries.sort_by_key(|e| (e.row, e.col));
        if let Some(w) = entries.windows(2).find(|w| w[0].row == w[1].row && w[0].col == w[1].col) {
            return Err(Error::InvalidInstance(format!("duplicate entry ({}, {})", w[0].row, w[0].col)));
        }
        let mut row_start = alloc::vec![0usize; n + 1];
        for e in &entries {
            row_start[e.row + 1] += 1;
        }
        for i in 0..n {
            row_start[i + 1] += row_start[i];
        }
        let mut col_entries = alloc::vec![Vec::new(); m];
        for (k, e) in entries.iter().enumerate() {
            col_entries[e.col].push(k);
        }
        Ok(Self { n, m, entries, row_start, col_entries, features })
    }

    /// Identity matrix over the given laws: independent arrivals `X_i = Z_i`.
    pub fn independent(features: Vec<DiscreteDistribution>) -> Self {
        let n = features.len();
        Self::new(n, n, (0..n).map(|i| (i, i, 1.0)).collect(), features).expect("identity instance is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn features(&self) -> &[DiscreteDistribution] {
        &self.features
    }

    pub fn feature(&self, j: usize) -> &DiscreteDistribution {
        &self.features[j]
    }

    pub fn row(&self, i: usize) -> &[Entry] {
        &self.entries[self.row_start[i]..self.row_start[i + 1]]
    }

    /// `(row, coef)` pairs of column `j`, rows ascending.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.col_entries[j].iter().map(move |&k| (self.entries[k].row, self.entries[k].coef))
    }

    pub fn column_len(&self, j: usize) -> usize {
        self.col_entries[j].len()
    }

    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        let row = self.row(i);
        match row.binary_search_by_key(&j, |e| e.col) {
            Ok(k) => row[k].coef,
            Err(_) => 0.0,
        }
    }

    /// Maximum number of nonzero entries in any row.
    pub fn row_sparsity(&self) -> usize {
        (0..self.n).map(|i| self.row_start[i + 1] - self.row_start[i]).max().unwrap_or(0)
    }

    /// Maximum number of nonzero entries in any column.
    pub fn col_sparsity(&self) -> usize {
        self.col_entries.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_unweighted(&self) -> bool {
        self.entries.iter().all(|e| e.coef == 1.0)
    }

    /// Number of joint scenarios of `Y` (product of support sizes).
    pub fn joint_support_size(&self) -> u128 {
        self.features.iter().fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    /// `x = A · y` in the canonical summation order.
    pub fn apply(&self, y: &[f64], x: &mut [f64]) {
        for (i, xi) in x.iter_mut().enumerate().take(self.n) {
            let mut acc = 0.0;
            for e in self.row(i) {
                acc += e.coef * y[e.col];
            }
            *xi = acc;
        }
    }

    pub fn x_of(&self, y: &[f64]) -> Vec<f64> {
        let mut x = alloc::vec![0.0; self.n];
        self.apply(y, &mut x);
        x
    }

    /// Draws `y` for `(seed, index)`.
    pub fn draw_y(&self, seed: u64, index: u64, y: &mut [f64]) {
        let mut rng = rng::stream_rng(seed, index);
        for (yj, d) in y.iter_mut().zip(&self.features) {
            *yj = if d.is_constant() { d.atoms()[0].0 } else { d.sample(rng.random::<f64>()) };
        }
    }

    pub fn realize(&self, seed: u64, index: u64) -> Realization {
        let mut y = alloc::vec![0.0; self.m];
        self.draw_y(seed, index, &mut y);
        let x = self.x_of(&y);
        Realization { y, x }
    }

    /// Rescales every column to max coefficient 1 and every feature by the
    /// old maximum, leaving the law of `X` unchanged.
    pub fn normalize_columns(&self) -> Result<Self> {
        let mut scale = alloc::vec![0.0f64; self.m];
        for j in 0..self.m {
            scale[j] = self.column(j).map(|(_, a)| a).fold(0.0, f64::max);
            if scale[j] == 0.0 {
                return Err(Error::EmptyColumn(j));
            }
        }
        let entries = self
            .entries
            .iter()
            .map(|e| (e.row, e.col, if e.coef == scale[e.col] { 1.0 } else { e.coef / scale[e.col] }))
            .collect();
        let features = self
            .features
            .iter()
            .zip(&scale)
            .map(|(d, &s)| if s == 1.0 { Ok(d.clone()) } else { d.scaled(s) })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.n, self.m, entries, features)
    }

    /// True when every column has maximum coefficient exactly 1.
    pub fn is_column_normalized(&self) -> bool {
        (0..self.m).all(|j| self.column(j).map(|(_, a)| a).fold(0.0, f64::max) == 1.0)
    }

    /// Keeps only the rows flagged in `keep` (other rows become empty) and
    /// drops features that no kept row uses. Returns the new instance and,
    /// for each new feature, its original index.
    pub fn restrict_rows(&self, keep: &[bool]) -> (Self, Vec<usize>) {
        let mut used = alloc::vec![false; self.m];
        for e in &self.entries {
            if keep[e.row] {
                used[e.col] = true;
            }
        }
        let mut remap = alloc::vec![usize::MAX; self.m];
        let mut original = Vec::new();
        for j in 0..self.m {
            if used[j] {
                remap[j] = original.len();
                original.push(j);
            }
        }
        let entries = self.entries.iter().filter(|e| keep[e.row]).map(|e| (e.row, remap[e.col], e.coef)).collect();
        let features = original.iter().map(|&j| self.features[j].clone()).collect();
        let inst = Self::new(self.n, original.len(), entries, features).expect("restriction of a valid instance");
        (inst, original)
    }

    /// Same matrix with every feature replaced by the given laws.
    pub fn with_features(&self, features: Vec<DiscreteDistribution>) -> Result<Self> {
        let entries = self.entries.iter().map(|e| (e.row, e.col, e.coef)).collect();
        Self::new(self.n, self.m, entries, features)
    }
}

impl JointSampler for LinearInstance {
    fn dim(&self) -> usize {
        self.n
    }

    fn draw(&self, seed: u64, index: u64, out: &mut [f64]) {
        let mut y = alloc::vec![0.0; self.m];
        self.draw_y(seed, index, &mut y);
        self.apply(&y, out);
    }
}
