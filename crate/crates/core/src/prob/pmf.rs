use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of any input distribution.
pub const MASS_TOL: f64 = 1e-12;

/// Finite symbol set `{0, .., size-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Alphabet(size))
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;
    fn try_from(size: usize) -> Result<Self> {
        Alphabet::new(size)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.0
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn check_row(what: &'static str, index: usize, row: &[f64]) -> Result<()> {
    let mut sum = 0.0;
    for &p in row {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::NegativeEntry {
                what,
                index,
                value: p,
            });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > MASS_TOL {
        return Err(Error::NotNormalized { what, index, sum });
    }
    Ok(())
}

/// Probability mass function over an [`Alphabet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates nonnegativity and unit mass. Nothing is renormalized.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        check_row("pmf", 0, &probs)?;
        Ok(Pmf { probs })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Alphabet::new(size)?;
        Ok(Pmf {
            probs: vec![1.0 / size as f64; size],
        })
    }

    pub fn point(size: usize, at: usize) -> Result<Self> {
        Alphabet::new(size)?;
        if at >= size {
            return Err(Error::DimensionMismatch(alloc::format!(
                "point mass at {at} outside alphabet of size {size}"
            )));
        }
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Ok(Pmf { probs })
    }

    /// `(1-p, p)` over `{0, 1}`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Pmf {
            probs: vec![1.0 - p, p],
        })
    }

    /// Renormalizes a nonnegative vector with positive mass. Used for
    /// internally generated iterates, never for user input.
    pub(crate) fn from_weights(mut w: Vec<f64>) -> Self {
        let s: f64 = w.iter().sum();
        for p in &mut w {
            *p /= s;
        }
        Pmf { probs: w }
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet(self.probs.len())
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Vec<f64> {
        p.probs
    }
}

/// Row-stochastic matrix `p(out | in)`; one [`Pmf`] per input symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Kernel {
    n_in: usize,
    n_out: usize,
    data: Vec<f64>,
}

impl Kernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_in = rows.len();
        if n_in == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let n_out = rows[0].len();
        let mut data = Vec::with_capacity(n_in * n_out);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_out {
                return Err(Error::DimensionMismatch(alloc::format!(
                    "kernel row {i} has {} entries, expected {n_out}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Kernel::from_flat(n_in, n_out, data)
    }

    pub fn from_flat(n_in: usize, n_out: usize, data: Vec<f64>) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if data.len() != n_in * n_out {
            return Err(Error::DimensionMismatch(alloc::format!(
                "kernel data has {} entries, expected {n_in}x{n_out}",
                data.len()
            )));
        }
        for i in 0..n_in {
            check_row("kernel row", i, &data[i * n_out..(i + 1) * n_out])?;
        }
        Ok(Kernel { n_in, n_out, data })
    }

    pub(crate) fn from_flat_unchecked(n_in: usize, n_out: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n_in * n_out);
        Kernel { n_in, n_out, data }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Alphabet::new(n)?;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Ok(Kernel {
            n_in: n,
            n_out: n,
            data,
        })
    }

    /// Every input maps to output symbol 0: the output carries no information.
    pub fn constant(n_in: usize, n_out: usize) -> Result<Self> {
        Alphabet::new(n_in)?;
        Alphabet::new(n_out)?;
        let mut data = vec![0.0; n_in * n_out];
        for i in 0..n_in {
            data[i * n_out] = 1.0;
        }
        Ok(Kernel { n_in, n_out, data })
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Kernel {
            n_in: 2,
            n_out: 2,
            data: vec![1.0 - p, p, p, 1.0 - p],
        })
    }

    /// Identity kernel padded with never-used output symbols.
    pub fn embedding(n_in: usize, n_out: usize) -> Result<Self> {
        if n_out < n_in {
            return Err(Error::DimensionMismatch(alloc::format!(
                "cannot embed {n_in} symbols into {n_out}"
            )));
        }
        Alphabet::new(n_in)?;
        let mut data = vec![0.0; n_in * n_out];
        for i in 0..n_in {
            data[i * n_out + i] = 1.0;
        }
        Ok(Kernel { n_in, n_out, data })
    }

    #[inline]
    pub fn n_in(&self) -> usize {
        self.n_in
    }

    #[inline]
    pub fn n_out(&self) -> usize {
        self.n_out
    }

    #[inline]
    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.data[input * self.n_out + output]
    }

    #[inline]
    pub fn row(&self, input: usize) -> &[f64] {
        &self.data[input * self.n_out..(input + 1) * self.n_out]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n_out)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn is_constant_output(&self) -> bool {
        // all rows identical: output independent of input
        let first = self.row(0);
        self.rows().all(|r| r == first)
    }
}

impl TryFrom<Vec<Vec<f64>>> for Kernel {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Kernel::new(rows)
    }
}

impl From<Kernel> for Vec<Vec<f64>> {
    fn from(k: Kernel) -> Self {
        k.rows().map(|r| r.to_vec()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_rejects_bad_mass() {
        assert!(matches!(
            Pmf::new(vec![0.5, 0.499]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            Pmf::new(vec![1.5, -0.5]),
            Err(Error::NegativeEntry { index: 0, .. })
        ));
        assert!(Pmf::new(vec![0.1, 0.2, 0.7]).is_ok());
    }

    #[test]
    fn kernel_reports_offending_row() {
        let err = Kernel::new(vec![vec![1.0, 0.0], vec![0.5, 0.499]]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { index: 1, .. }));
        let err = Kernel::new(vec![vec![1.0, 0.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn constant_kernel_is_uninformative() {
        assert!(Kernel::constant(3, 2).unwrap().is_constant_output());
        assert!(!Kernel::identity(2).unwrap().is_constant_output());
    }

    #[test]
    fn alphabet_zero_rejected() {
        assert_eq!(Alphabet::new(0), Err(Error::EmptyAlphabet));
    }
}
