//! Unnamed dense joints for the optimizer inner loops.
//!
//! Same layout as [`super::JointPmf`] (row-major, last variable fastest) but
//! variables are addressed by position and nothing is validated.

use alloc::vec;
use alloc::vec::Vec;

use super::info::entropy_of_masses;

/// Marginal of a row-major tensor over the positions in `keep`, laid out in
/// the order given.
pub(crate) fn marginal(sizes: &[usize], probs: &[f64], keep: &[usize]) -> Vec<f64> {
    let nv = sizes.len();
    let mut tstride = vec![0usize; nv];
    let mut total = 1usize;
    for &k in keep.iter().rev() {
        tstride[k] = total;
        total *= sizes[k];
    }
    let mut out = vec![0.0; total];
    if keep.is_empty() {
        out[0] = probs.iter().sum();
        return out;
    }
    // a trailing block of summed-out variables can be added without the odometer
    let mut tail = 1usize;
    let mut last = nv;
    while last > 0 && !keep.contains(&(last - 1)) {
        last -= 1;
        tail *= sizes[last];
    }
    let mut digits = vec![0usize; last];
    let mut t = 0usize;
    for chunk in probs.chunks(tail) {
        out[t] += chunk.iter().sum::<f64>();
        let mut v = last;
        while v > 0 {
            v -= 1;
            digits[v] += 1;
            t += tstride[v];
            if digits[v] < sizes[v] {
                break;
            }
            t -= tstride[v] * sizes[v];
            digits[v] = 0;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub(crate) struct Dense {
    pub sizes: Vec<usize>,
    pub probs: Vec<f64>,
}

impl Dense {
    pub fn source(p: &[f64]) -> Self {
        Dense {
            sizes: vec![p.len()],
            probs: p.to_vec(),
        }
    }

    /// Joint over several variables given as one flat table.
    pub fn joint(sizes: &[usize], p: &[f64]) -> Self {
        Dense {
            sizes: sizes.to_vec(),
            probs: p.to_vec(),
        }
    }

    /// Appends variables with sizes `outputs` drawn from the row-major
    /// kernel `k` whose rows index the product of the `given` positions.
    pub fn push(&mut self, given: &[usize], outputs: &[usize], k: &[f64]) {
        let nv = self.sizes.len();
        let n_out: usize = outputs.iter().product();
        let mut rstride = vec![0usize; nv];
        let mut s = 1;
        for &g in given.iter().rev() {
            rstride[g] = s;
            s *= self.sizes[g];
        }
        let mut next = Vec::with_capacity(self.probs.len() * n_out);
        let mut digits = vec![0usize; nv];
        let mut r = 0usize;
        for &p in &self.probs {
            let row = &k[r * n_out..(r + 1) * n_out];
            next.extend(row.iter().map(|&q| p * q));
            let mut v = nv;
            while v > 0 {
                v -= 1;
                digits[v] += 1;
                r += rstride[v];
                if digits[v] < self.sizes[v] {
                    break;
                }
                r -= rstride[v] * self.sizes[v];
                digits[v] = 0;
            }
        }
        self.sizes.extend_from_slice(outputs);
        self.probs = next;
    }

    pub fn h(&self, vars: &[usize]) -> f64 {
        if vars.is_empty() {
            return 0.0;
        }
        entropy_of_masses(&marginal(&self.sizes, &self.probs, vars))
    }

    /// `I(a; b | g)`, clamped at zero.
    pub fn mi(&self, a: &[usize], b: &[usize], g: &[usize]) -> f64 {
        let mut ag = a.to_vec();
        ag.extend_from_slice(g);
        let mut bg = b.to_vec();
        bg.extend_from_slice(g);
        let mut abg = ag.clone();
        abg.extend_from_slice(b);
        (self.h(&ag) + self.h(&bg) - self.h(&abg) - self.h(g)).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{compose_chain, BroadcastChannel, Factor, Kernel, Pmf};

    #[test]
    fn matches_named_pipeline() {
        let ch = BroadcastChannel::bsbc_cascade(0.1, 0.2).unwrap();
        let named = compose_chain(&[
            Factor::source("u", &Pmf::new(vec![0.3, 0.7]).unwrap()).unwrap(),
            Factor::conditional("x", "u", &Kernel::bsc(0.2).unwrap()).unwrap(),
            Factor::channel("x", "y1", "y2", &ch).unwrap(),
        ])
        .unwrap();
        let mut d = Dense::source(&[0.3, 0.7]);
        d.push(&[0], &[2], Kernel::bsc(0.2).unwrap().as_flat());
        d.push(&[1], &[2, 2], ch.transition());
        assert_eq!(d.probs, named.probs());
        let a = named.mutual_information(&["u"], &["y2"], &["y1"]).unwrap();
        assert!((d.mi(&[0], &[3], &[2]) - a).abs() < 1e-15);
        let b = named.mutual_information(&["x"], &["y1"], &["u"]).unwrap();
        assert!((d.mi(&[1], &[2], &[0]) - b).abs() < 1e-15);
    }

    #[test]
    fn marginal_with_summed_tail() {
        let sizes = [2, 3, 2];
        let p: Vec<f64> = (0..12).map(|i| i as f64 / 66.0).collect();
        let m = marginal(&sizes, &p, &[0]);
        assert!((m[0] - 15.0 / 66.0).abs() < 1e-15);
        let m = marginal(&sizes, &p, &[2, 0]);
        // (z=0,x=0) = 0+2+4
        assert!((m[0] - 6.0 / 66.0).abs() < 1e-15);
    }
}
