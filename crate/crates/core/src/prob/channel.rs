use alloc::vec;
use alloc::vec::Vec;

use super::pmf::{check_row, Alphabet, Kernel};
use crate::error::{Error, Result};

/// Two-output memoryless channel `p(y1, y2 | x)` with conference link
/// capacities `c12` (Rx1 → Rx2) and `c21` (Rx2 → Rx1), in bits per use.
#[derive(Clone, Debug, PartialEq)]
pub struct BroadcastChannel {
    x: Alphabet,
    y1: Alphabet,
    y2: Alphabet,
    /// `[x][y1][y2]`, row-major.
    w: Vec<f64>,
    c12: f64,
    c21: f64,
}

fn check_capacity(c: f64) -> Result<f64> {
    if c.is_finite() && c >= 0.0 {
        Ok(c)
    } else {
        Err(Error::InvalidCapacity(c))
    }
}

impl BroadcastChannel {
    /// `w` is laid out `[x][y1][y2]`. Every `x` slice must be a joint pmf.
    pub fn new(
        x_size: usize,
        y1_size: usize,
        y2_size: usize,
        w: Vec<f64>,
        c12: f64,
        c21: f64,
    ) -> Result<Self> {
        let x = Alphabet::new(x_size)?;
        let y1 = Alphabet::new(y1_size)?;
        let y2 = Alphabet::new(y2_size)?;
        let m = y1_size * y2_size;
        if w.len() != x_size * m {
            return Err(Error::DimensionMismatch(alloc::format!(
                "transition has {} entries, expected {x_size}x{y1_size}x{y2_size}",
                w.len()
            )));
        }
        for xi in 0..x_size {
            check_row("channel slice x", xi, &w[xi * m..(xi + 1) * m])?;
        }
        Ok(BroadcastChannel {
            x,
            y1,
            y2,
            w,
            c12: check_capacity(c12)?,
            c21: check_capacity(c21)?,
        })
    }

    /// Nested `[x][y1][y2]` form as used by channel files.
    pub fn from_nested(t: &[Vec<Vec<f64>>], c12: f64, c21: f64) -> Result<Self> {
        let xs = t.len();
        let y1s = t.first().map_or(0, Vec::len);
        let y2s = t.first().and_then(|s| s.first()).map_or(0, Vec::len);
        let mut w = Vec::with_capacity(xs * y1s * y2s);
        for (xi, slice) in t.iter().enumerate() {
            if slice.len() != y1s {
                return Err(Error::DimensionMismatch(alloc::format!(
                    "transition[{xi}] has {} rows, expected {y1s}",
                    slice.len()
                )));
            }
            for (a, row) in slice.iter().enumerate() {
                if row.len() != y2s {
                    return Err(Error::DimensionMismatch(alloc::format!(
                        "transition[{xi}][{a}] has {} entries, expected {y2s}",
                        row.len()
                    )));
                }
                w.extend_from_slice(row);
            }
        }
        BroadcastChannel::new(xs, y1s, y2s, w, c12, c21)
    }

    /// `p(y1|x) p(y2|y1)`: physically degraded by construction.
    pub fn cascade(first: &Kernel, second: &Kernel, c12: f64, c21: f64) -> Result<Self> {
        if first.n_out() != second.n_in() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "cascade: first stage has {} outputs, second takes {}",
                first.n_out(),
                second.n_in()
            )));
        }
        let (nx, n1, n2) = (first.n_in(), first.n_out(), second.n_out());
        let mut w = Vec::with_capacity(nx * n1 * n2);
        for x in 0..nx {
            for a in 0..n1 {
                for b in 0..n2 {
                    w.push(first.get(x, a) * second.get(a, b));
                }
            }
        }
        BroadcastChannel::new(nx, n1, n2, w, c12, c21)
    }

    /// `p(y1|x) p(y2|x)`: outputs conditionally independent given the input.
    pub fn independent(to_y1: &Kernel, to_y2: &Kernel, c12: f64, c21: f64) -> Result<Self> {
        if to_y1.n_in() != to_y2.n_in() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "kernels take {} and {} inputs",
                to_y1.n_in(),
                to_y2.n_in()
            )));
        }
        let (nx, n1, n2) = (to_y1.n_in(), to_y1.n_out(), to_y2.n_out());
        let mut w = Vec::with_capacity(nx * n1 * n2);
        for x in 0..nx {
            for a in 0..n1 {
                for b in 0..n2 {
                    w.push(to_y1.get(x, a) * to_y2.get(x, b));
                }
            }
        }
        BroadcastChannel::new(nx, n1, n2, w, c12, c21)
    }

    /// Deterministic channel `y1 = f1(x)`, `y2 = f2(x)`.
    pub fn deterministic(
        f1: &[usize],
        y1_size: usize,
        f2: &[usize],
        y2_size: usize,
        c12: f64,
        c21: f64,
    ) -> Result<Self> {
        if f1.len() != f2.len() {
            return Err(Error::DimensionMismatch("maps differ in length".into()));
        }
        let m = y1_size * y2_size;
        let mut w = vec![0.0; f1.len() * m];
        for (x, (&a, &b)) in f1.iter().zip(f2).enumerate() {
            if a >= y1_size || b >= y2_size {
                return Err(Error::DimensionMismatch(alloc::format!(
                    "deterministic map sends x={x} outside the output alphabet"
                )));
            }
            w[x * m + a * y2_size + b] = 1.0;
        }
        BroadcastChannel::new(f1.len(), y1_size, y2_size, w, c12, c21)
    }

    /// Binary cascade `Y1 = X ⊕ N1`, `Y2 = Y1 ⊕ N2` with `N_k ~ Bern(p_k)`.
    pub fn bsbc_cascade(p1: f64, p2: f64) -> Result<Self> {
        BroadcastChannel::cascade(&Kernel::bsc(p1)?, &Kernel::bsc(p2)?, 0.0, 0.0)
    }

    /// Two independent identical BSCs: `Y_k = X ⊕ N_k`, `N_k ~ Bern(p)`.
    pub fn bsbc_pair(p: f64) -> Result<Self> {
        let k = Kernel::bsc(p)?;
        BroadcastChannel::independent(&k, &k, 0.0, 0.0)
    }

    pub fn with_links(&self, c12: f64, c21: f64) -> Result<Self> {
        Ok(BroadcastChannel {
            c12: check_capacity(c12)?,
            c21: check_capacity(c21)?,
            ..self.clone()
        })
    }

    #[inline]
    pub fn x_size(&self) -> usize {
        self.x.size()
    }
    #[inline]
    pub fn y1_size(&self) -> usize {
        self.y1.size()
    }
    #[inline]
    pub fn y2_size(&self) -> usize {
        self.y2.size()
    }
    #[inline]
    pub fn c12(&self) -> f64 {
        self.c12
    }
    #[inline]
    pub fn c21(&self) -> f64 {
        self.c21
    }

    /// Flat `[x][y1][y2]` transition tensor.
    #[inline]
    pub fn transition(&self) -> &[f64] {
        &self.w
    }

    #[inline]
    pub fn p(&self, x: usize, y1: usize, y2: usize) -> f64 {
        self.w[(x * self.y1_size() + y1) * self.y2_size() + y2]
    }

    /// The channel as a kernel from `x` to the pair `(y1, y2)`.
    pub fn as_kernel(&self) -> Kernel {
        Kernel::from_flat_unchecked(self.x_size(), self.y1_size() * self.y2_size(), self.w.clone())
    }

    /// `p(y1 | x)`.
    pub fn to_y1(&self) -> Kernel {
        let (nx, n1, n2) = (self.x_size(), self.y1_size(), self.y2_size());
        let mut d = vec![0.0; nx * n1];
        for x in 0..nx {
            for a in 0..n1 {
                d[x * n1 + a] = (0..n2).map(|b| self.p(x, a, b)).sum();
            }
        }
        Kernel::from_flat_unchecked(nx, n1, d)
    }

    /// `p(y2 | x)`.
    pub fn to_y2(&self) -> Kernel {
        let (nx, n1, n2) = (self.x_size(), self.y1_size(), self.y2_size());
        let mut d = vec![0.0; nx * n2];
        for x in 0..nx {
            for b in 0..n2 {
                d[x * n2 + b] = (0..n1).map(|a| self.p(x, a, b)).sum();
            }
        }
        Kernel::from_flat_unchecked(nx, n2, d)
    }

    /// The same channel with the roles of the receivers exchanged.
    pub fn swapped(&self) -> Self {
        let (nx, n1, n2) = (self.x_size(), self.y1_size(), self.y2_size());
        let mut w = vec![0.0; nx * n1 * n2];
        for x in 0..nx {
            for a in 0..n1 {
                for b in 0..n2 {
                    w[(x * n2 + b) * n1 + a] = self.p(x, a, b);
                }
            }
        }
        BroadcastChannel {
            x: self.x,
            y1: self.y2,
            y2: self.y1,
            w,
            c12: self.c21,
            c21: self.c12,
        }
    }

    /// Physical degradedness test `p(y1,y2|x) = p(y1|x) q(y2|y1)`.
    ///
    /// The candidate `q(y2|y1)` averages `p(y2|y1,x)` over the inputs with
    /// `p(y1|x) > tol`, weighted by `p(y1|x)` (uniform input). The channel is
    /// degraded when every such conditional deviates from `q` by at most
    /// `tol`. Output symbols `y1` reachable from no input get a uniform row.
    pub fn is_physically_degraded(&self, tol: f64) -> Degradedness {
        let (nx, n1, n2) = (self.x_size(), self.y1_size(), self.y2_size());
        let k1 = self.to_y1();
        let mut q = vec![0.0; n1 * n2];
        for a in 0..n1 {
            let mut weight = 0.0;
            for x in 0..nx {
                let pa = k1.get(x, a);
                if pa > tol {
                    weight += pa;
                    for b in 0..n2 {
                        q[a * n2 + b] += self.p(x, a, b);
                    }
                }
            }
            for b in 0..n2 {
                q[a * n2 + b] = if weight > 0.0 {
                    q[a * n2 + b] / weight
                } else {
                    1.0 / n2 as f64
                };
            }
        }
        let mut residual: f64 = 0.0;
        for x in 0..nx {
            for a in 0..n1 {
                let pa = k1.get(x, a);
                if pa > tol {
                    for b in 0..n2 {
                        let dev = (self.p(x, a, b) / pa - q[a * n2 + b]).abs();
                        residual = residual.max(dev);
                    }
                }
            }
        }
        if residual <= tol {
            Degradedness::Degraded {
                kernel: Kernel::from_flat_unchecked(n1, n2, q),
                residual,
            }
        } else {
            Degradedness::NotDegraded { residual }
        }
    }

    pub fn require_degraded(&self, tol: f64) -> Result<Kernel> {
        match self.is_physically_degraded(tol) {
            Degradedness::Degraded { kernel, .. } => Ok(kernel),
            Degradedness::NotDegraded { residual } => Err(Error::NotDegraded(residual)),
        }
    }
}

/// Outcome of [`BroadcastChannel::is_physically_degraded`].
#[derive(Clone, Debug, PartialEq)]
pub enum Degradedness {
    Degraded { kernel: Kernel, residual: f64 },
    NotDegraded { residual: f64 },
}

impl Degradedness {
    pub fn is_degraded(&self) -> bool {
        matches!(self, Degradedness::Degraded { .. })
    }

    pub fn kernel(&self) -> Option<&Kernel> {
        match self {
            Degradedness::Degraded { kernel, .. } => Some(kernel),
            Degradedness::NotDegraded { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cascade_is_degraded_with_second_stage() {
        let ch = BroadcastChannel::bsbc_cascade(0.1, 0.2).unwrap();
        let d = ch.is_physically_degraded(1e-9);
        let k = d.kernel().expect("degraded");
        for (a, b) in k.as_flat().iter().zip(Kernel::bsc(0.2).unwrap().as_flat()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_first_output_is_degraded() {
        let ch = BroadcastChannel::independent(
            &Kernel::identity(2).unwrap(),
            &Kernel::bsc(0.3).unwrap(),
            0.0,
            0.0,
        )
        .unwrap();
        assert!(ch.is_physically_degraded(1e-9).is_degraded());
    }

    #[test]
    fn independent_noises_not_degraded() {
        let ch = BroadcastChannel::bsbc_pair(0.1).unwrap();
        match ch.is_physically_degraded(1e-9) {
            Degradedness::NotDegraded { residual } => {
                // averaged q(y2=0|y1=0) = 0.82 vs p(y2=0|y1=0,x=1) = 0.1
                assert!((residual - 0.72).abs() < 1e-12);
            }
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn nested_validation_points_at_slice() {
        let t = vec![
            vec![vec![0.5, 0.5], vec![0.0, 0.0]],
            vec![vec![0.5, 0.499], vec![0.0, 0.0]],
        ];
        let e = BroadcastChannel::from_nested(&t, 0.0, 0.0).unwrap_err();
        assert!(matches!(e, Error::NotNormalized { index: 1, .. }));
        assert!(matches!(
            BroadcastChannel::bsbc_pair(0.1).unwrap().with_links(-1.0, 0.0),
            Err(Error::InvalidCapacity(_))
        ));
    }

    #[test]
    fn swapped_exchanges_roles() {
        let ch = BroadcastChannel::bsbc_cascade(0.1, 0.2)
            .unwrap()
            .with_links(0.3, 0.1)
            .unwrap();
        let s = ch.swapped();
        assert_eq!(s.c12(), 0.1);
        assert_eq!(s.to_y1(), ch.to_y2());
        assert_eq!(s.swapped(), ch);
    }
}
