use super::joint::JointPmf;
use crate::error::{Error, Result};

/// `-sum p log2 p` with the `0 log 0 = 0` convention taken by branch.
pub(crate) fn entropy_of_masses(masses: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in masses {
        if p > 0.0 {
            h -= p * libm::log2(p);
        }
    }
    h.max(0.0)
}

/// Entropy in bits of the marginal of `j` over `vars`.
pub fn entropy(j: &JointPmf, vars: &[&str]) -> Result<f64> {
    j.entropy(vars)
}

/// `I(a; b | given)` in bits. An empty `given` gives the unconditional value.
pub fn mutual_information(j: &JointPmf, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
    j.mutual_information(a, b, given)
}

/// Binary entropy function `h(p)` in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(entropy_of_masses(&[p, 1.0 - p]))
}

/// Binary convolution `a(1-b) + b(1-a)`: crossover of two cascaded BSCs.
#[inline]
pub fn star(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}
