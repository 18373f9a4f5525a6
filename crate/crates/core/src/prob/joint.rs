use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::pmf::{check_row, Alphabet, Kernel, Pmf, MASS_TOL};
use super::BroadcastChannel;
use crate::error::{Error, Result};

/// Upper limit on the number of cells in a dense joint tensor.
pub const MAX_CELLS: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub alphabet: Alphabet,
}

impl Var {
    pub fn new(name: &str, size: usize) -> Result<Self> {
        Ok(Var {
            name: name.to_string(),
            alphabet: Alphabet::new(size)?,
        })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.alphabet.size()
    }
}

/// Dense probability tensor over named finite variables, row-major with the
/// last variable varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointPmf {
    vars: Vec<Var>,
    probs: Vec<f64>,
}

fn cell_count(vars: &[Var]) -> Result<usize> {
    let mut cells: usize = 1;
    for v in vars {
        cells = cells
            .checked_mul(v.size())
            .filter(|&c| c <= MAX_CELLS)
            .ok_or(Error::TooLarge(usize::MAX))?;
    }
    Ok(cells)
}

fn check_unique(vars: &[Var]) -> Result<()> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].iter().any(|w| w.name == v.name) {
            return Err(Error::DuplicateVariable(v.name.clone()));
        }
    }
    Ok(())
}

impl JointPmf {
    pub fn new(vars: Vec<Var>, probs: Vec<f64>) -> Result<Self> {
        check_unique(&vars)?;
        let cells = cell_count(&vars)?;
        if probs.len() != cells {
            return Err(Error::DimensionMismatch(alloc::format!(
                "joint tensor has {} entries, variables need {cells}",
                probs.len()
            )));
        }
        check_row("joint pmf", 0, &probs)?;
        Ok(JointPmf { vars, probs })
    }

    pub(crate) fn from_parts_unchecked(vars: Vec<Var>, probs: Vec<f64>) -> Self {
        JointPmf { vars, probs }
    }

    /// Single-variable joint from a pmf.
    pub fn from_pmf(name: &str, pmf: &Pmf) -> Result<Self> {
        Ok(JointPmf {
            vars: vec![Var::new(name, pmf.len())?],
            probs: pmf.probs().to_vec(),
        })
    }

    #[inline]
    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub(crate) fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let i = self.var_index(n)?;
            if out.contains(&i) {
                return Err(Error::DuplicateVariable(n.to_string()));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Marginal over `keep` (variable indices), laid out in the order given.
    pub(crate) fn marginal_of(&self, keep: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = self.vars.iter().map(Var::size).collect();
        super::dense::marginal(&sizes, &self.probs, keep)
    }

    /// Entropy in bits of the marginal over `idx`.
    pub(crate) fn entropy_of(&self, idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 0.0;
        }
        super::info::entropy_of_masses(&self.marginal_of(idx))
    }

    pub fn entropy(&self, names: &[&str]) -> Result<f64> {
        if names.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(self.entropy_of(&self.indices(names)?))
    }

    /// `H(a | given)`.
    pub fn conditional_entropy(&self, a: &[&str], given: &[&str]) -> Result<f64> {
        let ia = self.indices(a)?;
        let ig = self.indices(given)?;
        disjoint(&self.vars, &ia, &ig)?;
        let mut ag = ia.clone();
        ag.extend_from_slice(&ig);
        Ok((self.entropy_of(&ag) - self.entropy_of(&ig)).max(0.0))
    }

    /// `I(a; b | given)` in bits; `given` may be empty.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        let ia = self.indices(a)?;
        let ib = self.indices(b)?;
        let ig = self.indices(given)?;
        disjoint(&self.vars, &ia, &ib)?;
        disjoint(&self.vars, &ia, &ig)?;
        disjoint(&self.vars, &ib, &ig)?;
        Ok(self.mi_of(&ia, &ib, &ig))
    }

    pub(crate) fn mi_of(&self, ia: &[usize], ib: &[usize], ig: &[usize]) -> f64 {
        let cat = |x: &[usize], y: &[usize]| {
            let mut v = x.to_vec();
            v.extend_from_slice(y);
            v
        };
        let ag = cat(ia, ig);
        let bg = cat(ib, ig);
        let abg = cat(&ag, ib);
        let mi = self.entropy_of(&ag) + self.entropy_of(&bg)
            - self.entropy_of(&abg)
            - self.entropy_of(ig);
        mi.max(0.0)
    }

    /// Sums out every variable not in `keep`. Variables keep their original
    /// relative order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        if keep.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut idx = self.indices(keep)?;
        idx.sort_unstable();
        let probs = self.marginal_of(&idx);
        let vars = idx.iter().map(|&i| self.vars[i].clone()).collect();
        Ok(JointPmf { vars, probs })
    }

    /// Total mass; 1 up to rounding for every constructed joint.
    pub fn mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Conditional table `p(out | given)` as a kernel whose rows index the
    /// product of `given` (first variable slowest). Rows with zero mass are
    /// filled with the uniform distribution.
    pub fn conditional(&self, out: &[&str], given: &[&str]) -> Result<Kernel> {
        let io = self.indices(out)?;
        let ig = self.indices(given)?;
        disjoint(&self.vars, &io, &ig)?;
        let n_out: usize = io.iter().map(|&i| self.vars[i].size()).product();
        let n_in: usize = ig.iter().map(|&i| self.vars[i].size()).product();
        let mut both = ig.clone();
        both.extend_from_slice(&io);
        let mut joint = self.marginal_of(&both);
        for row in joint.chunks_mut(n_out) {
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter_mut().for_each(|p| *p /= s);
            } else {
                row.iter_mut().for_each(|p| *p = 1.0 / n_out as f64);
            }
        }
        Ok(Kernel::from_flat_unchecked(n_in, n_out, joint))
    }
}

fn disjoint(vars: &[Var], a: &[usize], b: &[usize]) -> Result<()> {
    for i in a {
        if b.contains(i) {
            return Err(Error::OverlappingSets(vars[*i].name.clone()));
        }
    }
    Ok(())
}

/// One factor of a chain-rule product: `p(outputs | given)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    given: Vec<String>,
    outputs: Vec<Var>,
    n_in: usize,
    n_out: usize,
    table: Vec<f64>,
}

impl Factor {
    /// Unconditioned factor `p(name)`.
    pub fn source(name: &str, pmf: &Pmf) -> Result<Self> {
        Ok(Factor {
            given: Vec::new(),
            outputs: vec![Var::new(name, pmf.len())?],
            n_in: 1,
            n_out: pmf.len(),
            table: pmf.probs().to_vec(),
        })
    }

    /// Unconditioned multi-variable factor taken from an existing joint.
    pub fn joint(j: &JointPmf) -> Self {
        Factor {
            given: Vec::new(),
            outputs: j.vars.clone(),
            n_in: 1,
            n_out: j.probs.len(),
            table: j.probs.clone(),
        }
    }

    /// `p(name | given)`.
    pub fn conditional(name: &str, given: &str, kernel: &Kernel) -> Result<Self> {
        Ok(Factor {
            given: vec![given.to_string()],
            outputs: vec![Var::new(name, kernel.n_out())?],
            n_in: kernel.n_in(),
            n_out: kernel.n_out(),
            table: kernel.as_flat().to_vec(),
        })
    }

    /// General factor: kernel rows index the product of `given`, columns the
    /// product of `outputs` (first variable slowest in both).
    pub fn multi(given: &[&str], outputs: &[(&str, usize)], kernel: &Kernel) -> Result<Self> {
        let outputs = outputs
            .iter()
            .map(|(n, s)| Var::new(n, *s))
            .collect::<Result<Vec<_>>>()?;
        let n_out: usize = outputs.iter().map(Var::size).product();
        if n_out != kernel.n_out() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "kernel has {} columns, outputs need {n_out}",
                kernel.n_out()
            )));
        }
        Ok(Factor {
            given: given.iter().map(|s| s.to_string()).collect(),
            outputs,
            n_in: kernel.n_in(),
            n_out,
            table: kernel.as_flat().to_vec(),
        })
    }

    /// The channel `p(y1, y2 | x)` as a factor.
    pub fn channel(x: &str, y1: &str, y2: &str, ch: &BroadcastChannel) -> Result<Self> {
        Ok(Factor {
            given: vec![x.to_string()],
            outputs: vec![Var::new(y1, ch.y1_size())?, Var::new(y2, ch.y2_size())?],
            n_in: ch.x_size(),
            n_out: ch.y1_size() * ch.y2_size(),
            table: ch.transition().to_vec(),
        })
    }
}

/// Multiplies the factors in order into a dense joint. Each factor may only
/// condition on variables produced by earlier factors.
pub fn compose_chain(factors: &[Factor]) -> Result<JointPmf> {
    let mut vars: Vec<Var> = Vec::new();
    let mut probs: Vec<f64> = vec![1.0];
    for f in factors {
        let gidx = f
            .given
            .iter()
            .map(|g| {
                vars.iter()
                    .position(|v| &v.name == g)
                    .ok_or_else(|| Error::DanglingVariable(g.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows: usize = gidx.iter().map(|&i| vars[i].size()).product();
        if rows != f.n_in {
            return Err(Error::DimensionMismatch(alloc::format!(
                "factor has {} rows, conditioning variables give {rows}",
                f.n_in
            )));
        }
        for o in &f.outputs {
            if vars.iter().any(|v| v.name == o.name) {
                return Err(Error::DuplicateVariable(o.name.clone()));
            }
        }
        let mut next_vars = vars.clone();
        next_vars.extend(f.outputs.iter().cloned());
        let cells = cell_count(&next_vars).map_err(|_| Error::TooLarge(usize::MAX))?;

        // row index of each current cell into the factor table
        let nv = vars.len();
        let sizes: Vec<usize> = vars.iter().map(Var::size).collect();
        let mut rstride = vec![0usize; nv];
        let mut s = 1;
        for &g in gidx.iter().rev() {
            rstride[g] = s;
            s *= sizes[g];
        }
        let mut next = Vec::with_capacity(cells);
        let mut digits = vec![0usize; nv];
        let mut r = 0usize;
        for &p in &probs {
            let row = &f.table[r * f.n_out..(r + 1) * f.n_out];
            next.extend(row.iter().map(|&q| p * q));
            let mut v = nv;
            while v > 0 {
                v -= 1;
                digits[v] += 1;
                r += rstride[v];
                if digits[v] < sizes[v] {
                    break;
                }
                r -= rstride[v] * sizes[v];
                digits[v] = 0;
            }
        }
        vars = next_vars;
        probs = next;
    }
    let mass: f64 = probs.iter().sum();
    if (mass - 1.0).abs() > MASS_TOL * 16.0 {
        return Err(Error::NotNormalized {
            what: "composed joint",
            index: 0,
            sum: mass,
        });
    }
    Ok(JointPmf::from_parts_unchecked(vars, probs))
}

/// Free-function form of [`JointPmf::marginalize`].
pub fn marginalize(j: &JointPmf, keep: &[&str]) -> Result<JointPmf> {
    j.marginalize(keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsbc_joint() -> JointPmf {
        let ch = BroadcastChannel::bsbc_cascade(0.1, 0.1).unwrap();
        compose_chain(&[
            Factor::source("u", &Pmf::uniform(2).unwrap()).unwrap(),
            Factor::conditional("x", "u", &Kernel::bsc(0.2).unwrap()).unwrap(),
            Factor::channel("x", "y1", "y2", &ch).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn compose_preserves_mass_and_factors() {
        let j = bsbc_joint();
        assert!((j.mass() - 1.0).abs() < 1e-15);
        assert_eq!(j.vars().len(), 4);
        let k = j.conditional(&["x"], &["u"]).unwrap();
        for (a, b) in k.as_flat().iter().zip(Kernel::bsc(0.2).unwrap().as_flat()) {
            assert!((a - b).abs() < 1e-12);
        }
        let y1 = j.marginalize(&["y1"]).unwrap();
        assert!((y1.probs()[0] - 0.5).abs() < 1e-15);
        assert!((y1.probs()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_kernel_makes_copies() {
        let j = compose_chain(&[
            Factor::source("u", &Pmf::new(vec![0.3, 0.7]).unwrap()).unwrap(),
            Factor::conditional("x", "u", &Kernel::identity(2).unwrap()).unwrap(),
        ])
        .unwrap();
        // off-diagonal cells are exactly zero
        assert_eq!(j.probs(), &[0.3, 0.0, 0.0, 0.7]);
    }

    #[test]
    fn dangling_and_mismatch_errors() {
        let e = compose_chain(&[Factor::conditional("x", "u", &Kernel::bsc(0.2).unwrap()).unwrap()])
            .unwrap_err();
        assert_eq!(e, Error::DanglingVariable("u".into()));
        let e = compose_chain(&[
            Factor::source("u", &Pmf::uniform(3).unwrap()).unwrap(),
            Factor::conditional("x", "u", &Kernel::bsc(0.2).unwrap()).unwrap(),
        ])
        .unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch(_)));
        let e = compose_chain(&[
            Factor::source("u", &Pmf::uniform(2).unwrap()).unwrap(),
            Factor::conditional("u", "u", &Kernel::bsc(0.2).unwrap()).unwrap(),
        ])
        .unwrap_err();
        assert_eq!(e, Error::DuplicateVariable("u".into()));
    }

    #[test]
    fn marginalize_keep_all_is_identity() {
        let j = bsbc_joint();
        let m = j.marginalize(&["y2", "u", "x", "y1"]).unwrap();
        assert_eq!(m, j);
        assert!(matches!(
            j.marginalize(&["w"]),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn marginalize_product_recovers_factor() {
        let j = compose_chain(&[
            Factor::source("a", &Pmf::new(vec![0.2, 0.8]).unwrap()).unwrap(),
            Factor::source("b", &Pmf::new(vec![0.1, 0.6, 0.3]).unwrap()).unwrap(),
        ])
        .unwrap();
        let b = j.marginalize(&["b"]).unwrap();
        for (x, y) in b.probs().iter().zip([0.1, 0.6, 0.3]) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn overlapping_sets_rejected() {
        let j = bsbc_joint();
        assert_eq!(
            j.mutual_information(&["u"], &["u", "x"], &[]),
            Err(Error::OverlappingSets("u".into()))
        );
        assert_eq!(
            j.mutual_information(&["u"], &["x"], &["x"]),
            Err(Error::OverlappingSets("x".into()))
        );
    }
}
