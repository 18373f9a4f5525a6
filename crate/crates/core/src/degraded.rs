//! Physically degraded broadcast channel with a link from receiver 1 to
//! receiver 2.
//!
//! Rates are reported in the `(R1, R0 + R2)` plane: the common and private
//! messages of receiver 2 share one axis. For an auxiliary `U` with
//! `U - X - Y1 - Y2` the achievable rectangle is
//!
//! ```text
//! R1      <= I(X;Y1|U)
//! R0 + R2 <= min(I(U;Y1), I(U;Y2) + C12)
//! ```
//!
//! and the capacity region is the convex hull of these rectangles.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontier::{frontier_from_pool, trace_region, Candidate, RateFrontier, RatePolytope, RegionProblem};
use crate::optim::{tags, Executor, Layout, OptBudget};
use crate::prob::{binary_entropy, star, BroadcastChannel, Dense, Kernel, Pmf};

/// Tolerance of the degradedness precondition.
pub const DEGRADED_TOL: f64 = 1e-9;

/// Witness `(p(u), p(x|u))` with the rates it achieves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradedInnerPoint {
    pub p_u: Pmf,
    pub p_x_given_u: Kernel,
    pub r1: f64,
    pub r02: f64,
}

/// Information terms of one witness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct DegradedTerms {
    /// `I(X;Y1|U)`
    pub r1: f64,
    pub i_u_y1: f64,
    pub i_u_y2: f64,
    pub i_x_y1: f64,
}

impl DegradedTerms {
    pub fn r02(&self, c12: f64) -> f64 {
        self.i_u_y1.min(self.i_u_y2 + c12)
    }
}

pub(crate) fn terms(p_u: &[f64], p_x_given_u: &[f64], ch: &BroadcastChannel) -> DegradedTerms {
    let (nx, n1, n2) = (ch.x_size(), ch.y1_size(), ch.y2_size());
    let mut d = Dense::source(p_u);
    d.push(&[0], &[nx], p_x_given_u);
    d.push(&[1], &[n1, n2], ch.transition());
    DegradedTerms {
        r1: d.mi(&[1], &[2], &[0]),
        i_u_y1: d.mi(&[0], &[2], &[]),
        i_u_y2: d.mi(&[0], &[3], &[]),
        i_x_y1: d.mi(&[1], &[2], &[]),
    }
}

/// Largest auxiliary alphabet allowed with cooperation.
pub fn coop_card_bound(ch: &BroadcastChannel) -> usize {
    ch.x_size().min(ch.y1_size())
}

/// Largest auxiliary alphabet allowed without cooperation.
pub fn nocoop_card_bound(ch: &BroadcastChannel) -> usize {
    coop_card_bound(ch).min(ch.y2_size())
}

fn check_witness(p_u: &Pmf, p_x_given_u: &Kernel, ch: &BroadcastChannel, bound: usize) -> Result<()> {
    ch.require_degraded(DEGRADED_TOL)?;
    if p_u.len() > bound {
        return Err(Error::Cardinality(alloc::format!(
            "|U| = {} exceeds the bound {bound}",
            p_u.len()
        )));
    }
    if p_x_given_u.n_in() != p_u.len() || p_x_given_u.n_out() != ch.x_size() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "p(x|u) is {}x{}, expected {}x{}",
            p_x_given_u.n_in(),
            p_x_given_u.n_out(),
            p_u.len(),
            ch.x_size()
        )));
    }
    Ok(())
}

/// `(I(X;Y1|U), min(I(U;Y1), I(U;Y2) + C12))` for one witness.
pub fn degraded_rate_point(p_u: &Pmf, p_x_given_u: &Kernel, ch: &BroadcastChannel) -> Result<(f64, f64)> {
    check_witness(p_u, p_x_given_u, ch, coop_card_bound(ch))?;
    let t = terms(p_u.probs(), p_x_given_u.as_flat(), ch);
    Ok((t.r1, t.r02(ch.c12())))
}

/// `(I(X;Y1|U), I(U;Y2))`: the point without cooperation.
pub fn nocoop_rate_point(p_u: &Pmf, p_x_given_u: &Kernel, ch: &BroadcastChannel) -> Result<(f64, f64)> {
    check_witness(p_u, p_x_given_u, ch, nocoop_card_bound(ch))?;
    let t = terms(p_u.probs(), p_x_given_u.as_flat(), ch);
    Ok((t.r1, t.i_u_y2))
}

/// `I(X;Y1) + min(0, C12 - (I(U;Y1) - I(U;Y2)))`, the largest sum rate of
/// the witness rectangle.
pub fn degraded_sum_rate_gain(p_u: &Pmf, p_x_given_u: &Kernel, ch: &BroadcastChannel) -> Result<f64> {
    check_witness(p_u, p_x_given_u, ch, coop_card_bound(ch))?;
    let t = terms(p_u.probs(), p_x_given_u.as_flat(), ch);
    Ok(t.i_x_y1 + (ch.c12() - (t.i_u_y1 - t.i_u_y2)).min(0.0))
}

struct DegradedProblem<'a> {
    ch: &'a BroadcastChannel,
    card_u: usize,
    coop: bool,
}

impl DegradedProblem<'_> {
    fn split<'p>(&self, params: &'p [f64]) -> (&'p [f64], &'p [f64]) {
        params.split_at(self.card_u)
    }

    fn rates(&self, params: &[f64]) -> (f64, f64) {
        let (pu, k) = self.split(params);
        let t = terms(pu, k, self.ch);
        (t.r1, if self.coop { t.r02(self.ch.c12()) } else { t.i_u_y2 })
    }
}

impl RegionProblem for DegradedProblem<'_> {
    type Witness = DegradedInnerPoint;

    fn layout(&self) -> Layout {
        Layout::new(vec![self.card_u]).repeat(self.card_u, self.ch.x_size())
    }

    fn polytope(&self, params: &[f64]) -> RatePolytope {
        let (r1, r02) = self.rates(params);
        RatePolytope::rectangle(r1, r02)
    }

    fn witness(&self, params: &[f64]) -> DegradedInnerPoint {
        let (pu, k) = self.split(params);
        let (r1, r02) = self.rates(params);
        DegradedInnerPoint {
            p_u: Pmf::from_weights(pu.to_vec()),
            p_x_given_u: Kernel::from_flat_unchecked(self.card_u, self.ch.x_size(), k.to_vec()),
            r1,
            r02,
        }
    }

    fn seeds(&self) -> Vec<Vec<f64>> {
        let (nu, nx) = (self.card_u, self.ch.x_size());
        let mut seeds = Vec::new();
        // U constant, uniform input
        let mut s = vec![0.0; nu];
        s[0] = 1.0;
        s.extend(core::iter::repeat_n(1.0 / nx as f64, nu * nx));
        seeds.push(s);
        // U = X, uniform input
        if nu == nx {
            let mut s = vec![1.0 / nu as f64; nu];
            s.extend_from_slice(Kernel::identity(nx).expect("nonempty").as_flat());
            seeds.push(s);
        }
        seeds
    }
}

fn region<E: Executor>(
    ch: &BroadcastChannel,
    budget: &OptBudget,
    exec: &E,
    coop: bool,
) -> Result<RateFrontier<DegradedInnerPoint>> {
    ch.require_degraded(DEGRADED_TOL)?;
    let card_u = if coop { coop_card_bound(ch) } else { nocoop_card_bound(ch) };
    let problem = DegradedProblem { ch, card_u, coop };
    let tag = if coop { tags::DEGRADED } else { tags::DEGRADED_NOCOOP };
    Ok(trace_region(&problem, budget, tag, exec))
}

/// Inner frontier of the `(R1, R0 + R2)` capacity region with cooperation.
pub fn degraded_region<E: Executor>(
    ch: &BroadcastChannel,
    budget: &OptBudget,
    exec: &E,
) -> Result<RateFrontier<DegradedInnerPoint>> {
    region(ch, budget, exec, true)
}

/// Inner frontier of the capacity region without the conference link.
pub fn nocoop_degraded_region<E: Executor>(
    ch: &BroadcastChannel,
    budget: &OptBudget,
    exec: &E,
) -> Result<RateFrontier<DegradedInnerPoint>> {
    region(ch, budget, exec, false)
}

/// Closed-form rates of the cascaded binary symmetric channel with
/// `U ~ Bern(1/2)` and `X = U xor Bern(alpha)`:
/// `(h(alpha * p1) - h(p1), min(1 - h(alpha * p1), 1 - h(alpha * p12) + C12))`.
pub fn bsbc_closed_form_point(p1: f64, p2: f64, c12: f64, alpha: f64) -> Result<(f64, f64)> {
    for p in [p1, p2] {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidProbability(alpha));
    }
    if !(c12 >= 0.0) {
        return Err(Error::InvalidCapacity(c12));
    }
    let p12 = star(p1, p2);
    let h1 = binary_entropy(star(alpha, p1))?;
    let h12 = binary_entropy(star(alpha, p12))?;
    let r1 = (h1 - binary_entropy(p1)?).max(0.0);
    Ok((r1, (1.0 - h1).min(1.0 - h12 + c12)))
}

/// Frontier of the closed-form points over the crossover grid `alphas`,
/// convexified on the `λ` grid of `budget`.
pub fn bsbc_region_closed_form(
    p1: f64,
    p2: f64,
    c12: f64,
    alphas: &[f64],
    budget: &OptBudget,
) -> Result<RateFrontier<DegradedInnerPoint>> {
    let mut pool = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let (r1, r02) = bsbc_closed_form_point(p1, p2, c12, a)?;
        pool.push(Candidate {
            witness: DegradedInnerPoint {
                p_u: Pmf::uniform(2)?,
                p_x_given_u: Kernel::bsc(a)?,
                r1,
                r02,
            },
            poly: RatePolytope::rectangle(r1, r02),
        });
    }
    Ok(frontier_from_pool(pool, &budget.lambdas(), budget))
}
