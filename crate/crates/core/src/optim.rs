//! Search over products of probability simplices.
//!
//! Regions are suprema over distributions; nothing here certifies global
//! optimality. Every search is a coarse lattice scan followed by restarts of
//! a multiplicative-update (exponentiated gradient) coordinate ascent, one
//! simplex block at a time. Randomness comes from ChaCha streams keyed by
//! `(seed, tag, index, restart)`, so results do not depend on evaluation
//! order or thread count.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Shared search budget for every region and rate optimizer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptBudget {
    /// Number of weights `λ` on the uniform grid over `[0, 1]`.
    pub lambda_count: usize,
    /// Lattice points per simplex edge for the seeding scan.
    pub grid_res: usize,
    /// Ascent restarts per objective.
    pub restarts: usize,
    /// Ascent sweeps per restart.
    pub max_iter: usize,
    /// Stop once a sweep improves the objective by less than this.
    pub tol: f64,
    pub seed: u64,
    /// Largest lattice scanned exhaustively; above it the lattice is sampled.
    pub grid_cap: usize,
    /// Step of the exhaustive scan used when the only unknown is a binary input pmf.
    pub fine_step: f64,
}

impl Default for OptBudget {
    fn default() -> Self {
        OptBudget {
            lambda_count: 65,
            grid_res: 9,
            restarts: 16,
            max_iter: 500,
            tol: 1e-9,
            seed: 0,
            grid_cap: 4096,
            fine_step: 1e-4,
        }
    }
}

impl OptBudget {
    /// Uniform grid of weights `λ_k = k / (count - 1)`.
    pub fn lambdas(&self) -> Vec<f64> {
        let n = self.lambda_count.max(1);
        if n == 1 {
            return vec![0.5];
        }
        (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
    }
}

/// Runs independent indexed jobs and returns results in index order.
pub trait Executor: Sync {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// In-order, single-threaded executor.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

/// Stream identifiers separating the users of the shared seed.
pub mod tags {
    pub const DEGRADED: u64 = 1;
    pub const DEGRADED_NOCOOP: u64 = 2;
    pub const MARTON: u64 = 3;
    pub const MARTON_COOP: u64 = 4;
    pub const CUTSET: u64 = 5;
    pub const COMMON_NOCOOP: u64 = 6;
    pub const COMMON_SINGLE: u64 = 7;
    pub const COMMON_TWO_STEP: u64 = 8;
    pub const COMMON_COROLLARY: u64 = 9;
    pub const COMMON_UPPER: u64 = 10;
    pub const MORE_CAPABLE: u64 = 11;
    pub const DF_CODE: u64 = 12;
    pub const DF_TRIALS: u64 = 13;
    pub const GRID: u64 = 14;
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic PRNG for the job `(tag, a, b)` under `seed`.
pub fn stream_rng(seed: u64, tag: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix64(mix64(mix64(tag) ^ a) ^ b));
    rng
}

/// Concatenation of simplex blocks; parameters are stored flat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl Layout {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        let mut o = 0;
        offsets.push(0);
        for &d in &dims {
            o += d;
            offsets.push(o);
        }
        Layout { dims, offsets }
    }

    /// Layout with `count` copies of a `dim`-simplex appended.
    pub fn repeat(mut self, count: usize, dim: usize) -> Self {
        for _ in 0..count {
            self.dims.push(dim);
            let last = *self.offsets.last().unwrap();
            self.offsets.push(last + dim);
        }
        self
    }

    #[inline]
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn blocks(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn block(&self, b: usize) -> Range<usize> {
        self.offsets[b]..self.offsets[b + 1]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn uniform(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.len());
        for &d in &self.dims {
            p.extend(core::iter::repeat_n(1.0 / d as f64, d));
        }
        p
    }

    /// Independent Dirichlet(1) draw for every block.
    pub fn dirichlet<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.len());
        for &d in &self.dims {
            let start = p.len();
            let mut s = 0.0;
            for _ in 0..d {
                // 1 - u lies in (0, 1]
                let u: f64 = 1.0 - rng.gen::<f64>();
                let e = -libm::log(u);
                s += e;
                p.push(e);
            }
            if s > 0.0 {
                p[start..].iter_mut().for_each(|x| *x /= s);
            } else {
                p[start..].iter_mut().for_each(|x| *x = 1.0 / d as f64);
            }
        }
        p
    }
}

/// Binomial coefficient, saturating.
fn choose(n: usize, k: usize) -> usize {
    let k = k.min(n - k.min(n));
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    r as usize
}

/// All points of the `dim`-simplex with coordinates in `{0, 1/(res-1), .., 1}`.
pub fn simplex_lattice(dim: usize, res: usize) -> Vec<Vec<f64>> {
    let steps = res.max(2) - 1;
    let mut out = Vec::new();
    let mut cur = vec![0usize; dim];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, steps: usize, out: &mut Vec<Vec<f64>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.iter().map(|&c| c as f64 / steps as f64).collect());
            return;
        }
        for c in (0..=left).rev() {
            cur[i] = c;
            rec(i + 1, left - c, cur, steps, out);
        }
    }
    if dim == 0 {
        return out;
    }
    rec(0, steps, &mut cur, steps, &mut out);
    out
}

fn lattice_size(dim: usize, res: usize) -> usize {
    let steps = res.max(2) - 1;
    choose(steps + dim - 1, dim - 1)
}

/// Uniformly random lattice point (stars and bars).
fn random_lattice_point<R: Rng>(dim: usize, res: usize, rng: &mut R) -> Vec<f64> {
    let steps = res.max(2) - 1;
    let slots = steps + dim - 1;
    // choose dim-1 bar positions among `slots`
    let mut pos: Vec<usize> = (0..slots).collect();
    for i in 0..dim - 1 {
        let j = rng.gen_range(i..slots);
        pos.swap(i, j);
    }
    let mut bars: Vec<usize> = pos[..dim - 1].to_vec();
    bars.sort_unstable();
    let mut out = Vec::with_capacity(dim);
    let mut prev = 0usize;
    for (k, &b) in bars.iter().enumerate() {
        let start = if k == 0 { 0 } else { prev + 1 };
        out.push((b - start) as f64 / steps as f64);
        prev = b;
    }
    let start = if bars.is_empty() { 0 } else { prev + 1 };
    out.push((slots - start) as f64 / steps as f64);
    out
}

/// Seeding scan: the full product lattice when it has at most
/// `budget.grid_cap` points, otherwise `grid_cap` uniformly sampled lattice
/// points (drawn from the `GRID` stream under `tag`).
pub fn grid_points(layout: &Layout, budget: &OptBudget, tag: u64) -> Vec<Vec<f64>> {
    let res = budget.grid_res;
    let mut total: usize = 1;
    for &d in layout.dims() {
        total = total.saturating_mul(lattice_size(d, res));
    }
    if total <= budget.grid_cap {
        let lattices: Vec<Vec<Vec<f64>>> =
            layout.dims().iter().map(|&d| simplex_lattice(d, res)).collect();
        let mut idx = vec![0usize; lattices.len()];
        let mut out = Vec::with_capacity(total);
        loop {
            let mut p = Vec::with_capacity(layout.len());
            for (b, &i) in idx.iter().enumerate() {
                p.extend_from_slice(&lattices[b][i]);
            }
            out.push(p);
            let mut b = lattices.len();
            loop {
                if b == 0 {
                    return out;
                }
                b -= 1;
                idx[b] += 1;
                if idx[b] < lattices[b].len() {
                    break;
                }
                idx[b] = 0;
            }
        }
    }
    let mut rng = stream_rng(budget.seed, tags::GRID, tag, 0);
    (0..budget.grid_cap)
        .map(|_| {
            let mut p = Vec::with_capacity(layout.len());
            for &d in layout.dims() {
                p.extend(random_lattice_point(d, res, &mut rng));
            }
            p
        })
        .collect()
}

/// `p0` scan over a binary pmf at step `budget.fine_step`.
pub fn fine_binary_grid(budget: &OptBudget) -> Vec<Vec<f64>> {
    let steps = libm::round(1.0 / budget.fine_step).max(1.0) as usize;
    (0..=steps)
        .map(|k| {
            let p0 = k as f64 / steps as f64;
            vec![p0, 1.0 - p0]
        })
        .collect()
}

const FD_STEP: f64 = 1e-7;
const START_MIX: f64 = 1e-6;

#[inline]
fn better(a: f64, b: f64) -> bool {
    // NaN never wins
    a > b
}

/// Multiplicative-update coordinate ascent from `start`.
///
/// Each sweep visits every block, estimates the directional derivatives
/// along `e_i - p` by forward differences and applies
/// `p_i <- p_i exp(eta g_i) / Z` with a backtracking step. Starting points
/// are pulled `1e-6` towards the block centroid so no coordinate is frozen at
/// zero.
pub fn ascend<F>(layout: &Layout, start: &[f64], f: &F, budget: &OptBudget) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let mut p = start.to_vec();
    for b in 0..layout.blocks() {
        let r = layout.block(b);
        let d = r.len() as f64;
        for x in &mut p[r] {
            *x = (1.0 - START_MIX) * *x + START_MIX / d;
        }
    }
    let mut fx = f(&p);
    if !fx.is_finite() {
        return (p, fx);
    }
    let mut eta = vec![1.0f64; layout.blocks()];
    let mut q = p.clone();
    let mut grad = Vec::new();
    for _ in 0..budget.max_iter {
        let before = fx;
        for b in 0..layout.blocks() {
            let r = layout.block(b);
            if r.len() < 2 {
                continue;
            }
            grad.clear();
            for i in r.clone() {
                q.copy_from_slice(&p);
                for j in r.clone() {
                    q[j] *= 1.0 - FD_STEP;
                }
                q[i] += FD_STEP;
                let g = (f(&q) - fx) / FD_STEP;
                grad.push(if g.is_finite() { g } else { 0.0 });
            }
            let mut tries = 0;
            while tries < 12 {
                tries += 1;
                let mut m = f64::NEG_INFINITY;
                for (k, i) in r.clone().enumerate() {
                    if p[i] > 0.0 {
                        m = m.max(libm::log(p[i]) + eta[b] * grad[k]);
                    }
                }
                let mut s = 0.0;
                for (k, i) in r.clone().enumerate() {
                    q[i] = if p[i] > 0.0 {
                        libm::exp(libm::log(p[i]) + eta[b] * grad[k] - m)
                    } else {
                        0.0
                    };
                    s += q[i];
                }
                for i in r.clone() {
                    q[i] /= s;
                }
                for j in 0..p.len() {
                    if !r.contains(&j) {
                        q[j] = p[j];
                    }
                }
                let fq = f(&q);
                if better(fq, fx) {
                    p.copy_from_slice(&q);
                    fx = fq;
                    eta[b] = (eta[b] * 2.0).min(1e6);
                    break;
                }
                eta[b] *= 0.25;
                if eta[b] < 1e-12 {
                    eta[b] = 1e-12;
                    break;
                }
            }
        }
        if fx - before < budget.tol {
            break;
        }
    }
    (p, fx)
}

/// Best point found by a search.
#[derive(Clone, Debug, PartialEq)]
pub struct Maximum {
    pub params: Vec<f64>,
    pub value: f64,
}

/// Restart starting points: the best `⌈restarts/4⌉` candidates by
/// `scores` (first index wins ties), then Dirichlet(1) draws from the
/// streams `(tag, index, r)`.
pub fn restart_starts(
    layout: &Layout,
    candidates: &[Vec<f64>],
    scores: &[f64],
    budget: &OptBudget,
    tag: u64,
    index: u64,
) -> Vec<Vec<f64>> {
    let n_top = budget.restarts.div_ceil(4);
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(budget.restarts);
    for &i in &order {
        if starts.len() >= n_top.min(budget.restarts) {
            break;
        }
        if !starts.iter().any(|s| s == &candidates[i]) {
            starts.push(candidates[i].clone());
        }
    }
    let mut r = starts.len() as u64;
    while starts.len() < budget.restarts {
        let mut rng = stream_rng(budget.seed, tag, index, r);
        starts.push(layout.dirichlet(&mut rng));
        r += 1;
    }
    starts
}

/// Maximizes a scalar objective: scan `grid_points ∪ extra`, then ascend
/// from [`restart_starts`]. The first of equal values (scan order, then
/// restart order) is kept.
pub fn maximize<F, E>(
    layout: &Layout,
    f: &F,
    budget: &OptBudget,
    tag: u64,
    extra: &[Vec<f64>],
    exec: &E,
) -> Maximum
where
    F: Fn(&[f64]) -> f64 + Sync,
    E: Executor,
{
    let mut cands = grid_points(layout, budget, tag);
    cands.extend_from_slice(extra);
    let scores = exec.map(cands.len(), |i| f(&cands[i]));
    let starts = restart_starts(layout, &cands, &scores, budget, tag, 0);
    let ascended = exec.map(starts.len(), |r| ascend(layout, &starts[r], f, budget));

    let mut best = Maximum {
        params: layout.uniform(),
        value: f64::NEG_INFINITY,
    };
    for (c, &s) in cands.iter().zip(&scores) {
        if better(s, best.value) {
            best = Maximum {
                params: c.clone(),
                value: s,
            };
        }
    }
    for (p, v) in ascended {
        if better(v, best.value) {
            best = Maximum { params: p, value: v };
        }
    }
    best
}
