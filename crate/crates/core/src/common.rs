//! Common-message rates with conferencing receivers.
//!
//! Both receivers want the same message. With descriptions `Û` of `Y2` and
//! `V̂` of `Y1` exchanged in one simultaneous step the rate is
//! `min(I(X;Y1,Û), I(X;Y2,V̂))`. In the two-step scheme receiver 1 first
//! sends a description and receiver 2 answers after decoding:
//!
//! ```text
//! R12 = min( I(X;Y1) + C21,
//!            I(X;Y2) - I(V̂;Y1|Y2,X) + min(C12, H(V̂|Y2) - H(V̂|Y1)) )
//! ```
//!
//! valid when `C12 >= I(V̂;Y1|Y2,X)`; `R21` swaps the roles. Every rate is
//! below `min(I(X;Y1) + C21, I(X;Y2) + C12, I(X;Y1,Y2))`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{fine_binary_grid, maximize, tags, Executor, Layout, OptBudget};
use crate::prob::{entropy_of_masses, BroadcastChannel, Dense, Kernel, Pmf};

/// `p(x)` with the two descriptions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonWitness {
    pub p_x: Pmf,
    pub p_uhat_given_y2: Kernel,
    pub p_vhat_given_y1: Kernel,
}

impl CommonWitness {
    /// Constant descriptions.
    pub fn silent(p_x: Pmf, ch: &BroadcastChannel) -> Self {
        CommonWitness {
            p_x,
            p_uhat_given_y2: Kernel::constant(ch.y2_size(), 1).expect("nonempty"),
            p_vhat_given_y1: Kernel::constant(ch.y1_size(), 1).expect("nonempty"),
        }
    }

    /// `Û = Y2`, `V̂ = Y1`.
    pub fn copies(p_x: Pmf, ch: &BroadcastChannel) -> Self {
        CommonWitness {
            p_x,
            p_uhat_given_y2: Kernel::identity(ch.y2_size()).expect("nonempty"),
            p_vhat_given_y1: Kernel::identity(ch.y1_size()).expect("nonempty"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    None,
    SingleStep,
    #[serde(rename = "two_step_12")]
    TwoStep12,
    #[serde(rename = "two_step_21")]
    TwoStep21,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::None => "none",
            Scheme::SingleStep => "single_step",
            Scheme::TwoStep12 => "two_step_12",
            Scheme::TwoStep21 => "two_step_21",
        }
    }
}

/// Two-step direction: which receiver describes its output first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Receiver 1 sends `V̂` first.
    D12,
    /// Receiver 2 sends `Û` first.
    D21,
}

/// Outcome of evaluating a scheme at a witness.
///
/// When the requested scheme violates its link constraint, `feasible` is
/// false, `scheme` is [`Scheme::None`] and `rate` is the rate without
/// cooperation at the same `p(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonRateReport {
    pub scheme: Scheme,
    pub rate: f64,
    pub witness: CommonWitness,
    pub feasible: bool,
    /// Upper bound at the same `p(x)`.
    pub upper: f64,
    /// Link slacks of the requested scheme (`C - required`).
    pub slack12: f64,
    pub slack21: f64,
}

const X: usize = 0;
const Y1: usize = 1;
const Y2: usize = 2;
const UH: usize = 3;
const VH: usize = 4;

fn tensor(p_x: &[f64], uh: (&[f64], usize), vh: (&[f64], usize), ch: &BroadcastChannel) -> Dense {
    let mut d = Dense::source(p_x);
    d.push(&[X], &[ch.y1_size(), ch.y2_size()], ch.transition());
    d.push(&[Y2], &[uh.1], uh.0);
    d.push(&[Y1], &[vh.1], vh.0);
    d
}

fn check(w: &CommonWitness, ch: &BroadcastChannel) -> Result<Dense> {
    if w.p_x.len() != ch.x_size() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "p(x) has {} symbols, channel input has {}",
            w.p_x.len(),
            ch.x_size()
        )));
    }
    let (uh, vh) = (&w.p_uhat_given_y2, &w.p_vhat_given_y1);
    if uh.n_in() != ch.y2_size() || vh.n_in() != ch.y1_size() {
        return Err(Error::DimensionMismatch(
            "description kernels must be indexed by the opposite output".into(),
        ));
    }
    if uh.n_out() > ch.y2_size() + 1 || vh.n_out() > ch.y1_size() + 1 {
        return Err(Error::Cardinality(alloc::format!(
            "descriptions have {} and {} symbols, bounds are {} and {}",
            uh.n_out(),
            vh.n_out(),
            ch.y2_size() + 1,
            ch.y1_size() + 1
        )));
    }
    Ok(tensor(w.p_x.probs(), (uh.as_flat(), uh.n_out()), (vh.as_flat(), vh.n_out()), ch))
}

/// Raw terms of every scheme at one witness.
#[derive(Clone, Copy, Debug)]
struct Terms {
    i1: f64,
    i2: f64,
    i12: f64,
    single: f64,
    single_slack12: f64,
    single_slack21: f64,
    two12: f64,
    two12_slack: f64,
    two21: f64,
    two21_slack: f64,
}

fn terms(d: &Dense, ch: &BroadcastChannel) -> Terms {
    let (c12, c21) = (ch.c12(), ch.c21());
    let i1 = d.mi(&[X], &[Y1], &[]);
    let i2 = d.mi(&[X], &[Y2], &[]);
    let i12 = d.mi(&[X], &[Y1, Y2], &[]);
    let single = d.mi(&[X], &[Y1, UH], &[]).min(d.mi(&[X], &[Y2, VH], &[]));
    let single_slack21 = c21 - (d.mi(&[UH], &[Y2], &[]) - d.mi(&[UH], &[Y1], &[]));
    let single_slack12 = c12 - (d.mi(&[VH], &[Y1], &[]) - d.mi(&[VH], &[Y2], &[]));
    // H(V̂|Y2) - H(V̂|Y1) = I(V̂;Y1) - I(V̂;Y2)
    let need12 = d.mi(&[VH], &[Y1], &[Y2, X]);
    let gain12 = d.mi(&[VH], &[Y1], &[]) - d.mi(&[VH], &[Y2], &[]);
    let two12 = (i1 + c21).min(i2 - need12 + c12.min(gain12));
    let need21 = d.mi(&[UH], &[Y2], &[Y1, X]);
    let gain21 = d.mi(&[UH], &[Y2], &[]) - d.mi(&[UH], &[Y1], &[]);
    let two21 = (i2 + c12).min(i1 - need21 + c21.min(gain21));
    Terms {
        i1,
        i2,
        i12,
        single,
        single_slack12,
        single_slack21,
        two12,
        two12_slack: c12 - need12,
        two21,
        two21_slack: c21 - need21,
    }
}

impl Terms {
    fn nocoop(&self) -> f64 {
        self.i1.min(self.i2)
    }

    fn upper(&self, ch: &BroadcastChannel) -> f64 {
        (self.i1 + ch.c21()).min(self.i2 + ch.c12()).min(self.i12)
    }

    fn single_feasible(&self) -> bool {
        self.single_slack12 >= 0.0 && self.single_slack21 >= 0.0
    }

    /// Best feasible two-step direction, ties to 12.
    fn two_step(&self) -> Option<(Scheme, f64)> {
        let a = (self.two12_slack >= 0.0).then_some(self.two12);
        let b = (self.two21_slack >= 0.0).then_some(self.two21);
        match (a, b) {
            (Some(a), Some(b)) if b > a => Some((Scheme::TwoStep21, b)),
            (Some(a), _) => Some((Scheme::TwoStep12, a)),
            (None, Some(b)) => Some((Scheme::TwoStep21, b)),
            (None, None) => None,
        }
    }
}

fn report(
    w: &CommonWitness,
    t: &Terms,
    ch: &BroadcastChannel,
    used: Option<(Scheme, f64)>,
    slacks: (f64, f64),
) -> CommonRateReport {
    let (scheme, rate, feasible) = match used {
        Some((s, r)) => (s, r, true),
        None => (Scheme::None, t.nocoop(), false),
    };
    CommonRateReport {
        scheme,
        rate,
        witness: w.clone(),
        feasible,
        upper: t.upper(ch),
        slack12: slacks.0,
        slack21: slacks.1,
    }
}

/// `min(I(X;Y1,Û), I(X;Y2,V̂))` subject to both link constraints.
pub fn single_step_rate(w: &CommonWitness, ch: &BroadcastChannel) -> Result<CommonRateReport> {
    let t = terms(&check(w, ch)?, ch);
    let used = t.single_feasible().then_some((Scheme::SingleStep, t.single));
    Ok(report(w, &t, ch, used, (t.single_slack12, t.single_slack21)))
}

/// Two-step rate in one direction.
pub fn two_step_rate(w: &CommonWitness, ch: &BroadcastChannel, dir: Direction) -> Result<CommonRateReport> {
    let t = terms(&check(w, ch)?, ch);
    let (used, slacks) = match dir {
        Direction::D12 => (
            (t.two12_slack >= 0.0).then_some((Scheme::TwoStep12, t.two12)),
            (t.two12_slack, ch.c21()),
        ),
        Direction::D21 => (
            (t.two21_slack >= 0.0).then_some((Scheme::TwoStep21, t.two21)),
            (ch.c12(), t.two21_slack),
        ),
    };
    Ok(report(w, &t, ch, used, slacks))
}

/// `max(R12, R21)` with ties to 12.
pub fn best_two_step_rate(w: &CommonWitness, ch: &BroadcastChannel) -> Result<CommonRateReport> {
    let t = terms(&check(w, ch)?, ch);
    let used = t.two_step();
    Ok(report(w, &t, ch, used, (t.two12_slack, t.two21_slack)))
}

/// `min(I(X;Y1) + C21, I(X;Y2) + C12, I(X;Y1,Y2))` at `p_x`.
pub fn common_upper_at(p_x: &Pmf, ch: &BroadcastChannel) -> Result<f64> {
    let w = CommonWitness::silent(p_x.clone(), ch);
    Ok(terms(&check(&w, ch)?, ch).upper(ch))
}

/// Optimized scalar rate with its input distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateOptimum {
    pub rate: f64,
    pub p_x: Pmf,
}

fn input_terms(p_x: &[f64], ch: &BroadcastChannel) -> (f64, f64, f64) {
    let mut d = Dense::source(p_x);
    d.push(&[X], &[ch.y1_size(), ch.y2_size()], ch.transition());
    (d.mi(&[X], &[Y1], &[]), d.mi(&[X], &[Y2], &[]), d.mi(&[X], &[Y1, Y2], &[]))
}

fn input_seeds(ch: &BroadcastChannel, budget: &OptBudget) -> Vec<Vec<f64>> {
    let nx = ch.x_size();
    let mut s = vec![vec![1.0 / nx as f64; nx]];
    if nx == 2 {
        s.extend(fine_binary_grid(budget));
    }
    s
}

fn optimize_input<E, F>(ch: &BroadcastChannel, budget: &OptBudget, exec: &E, tag: u64, f: F) -> RateOptimum
where
    E: Executor,
    F: Fn(&[f64]) -> f64 + Sync,
{
    let layout = Layout::new(vec![ch.x_size()]);
    let m = maximize(&layout, &f, budget, tag, &input_seeds(ch, budget), exec);
    RateOptimum {
        rate: m.value,
        p_x: Pmf::from_weights(m.params),
    }
}

/// `sup_{p(x)} min(I(X;Y1), I(X;Y2))`.
pub fn nocoop_common_capacity<E: Executor>(ch: &BroadcastChannel, budget: &OptBudget, exec: &E) -> RateOptimum {
    optimize_input(ch, budget, exec, tags::COMMON_NOCOOP, |p| {
        let (a, b, _) = input_terms(p, ch);
        a.min(b)
    })
}

/// `sup_{p(x)} min(I(X;Y1) + C21, I(X;Y2) + C12, I(X;Y1,Y2))`.
pub fn common_upper_bound<E: Executor>(ch: &BroadcastChannel, budget: &OptBudget, exec: &E) -> RateOptimum {
    optimize_input(ch, budget, exec, tags::COMMON_UPPER, |p| {
        let (a, b, c) = input_terms(p, ch);
        (a + ch.c21()).min(b + ch.c12()).min(c)
    })
}

/// Which scheme an optimized search evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeChoice {
    SingleStep,
    TwoStep,
}

struct WitnessLayout {
    nx: usize,
    n1: usize,
    n2: usize,
}

impl WitnessLayout {
    fn new(ch: &BroadcastChannel) -> Self {
        WitnessLayout {
            nx: ch.x_size(),
            n1: ch.y1_size(),
            n2: ch.y2_size(),
        }
    }

    fn layout(&self) -> Layout {
        Layout::new(vec![self.nx])
            .repeat(self.n2, self.n2 + 1)
            .repeat(self.n1, self.n1 + 1)
    }

    fn split<'a>(&self, p: &'a [f64]) -> (&'a [f64], &'a [f64], &'a [f64]) {
        let (px, rest) = p.split_at(self.nx);
        let (uh, vh) = rest.split_at(self.n2 * (self.n2 + 1));
        (px, uh, vh)
    }

    fn witness(&self, p: &[f64]) -> CommonWitness {
        let (px, uh, vh) = self.split(p);
        CommonWitness {
            p_x: Pmf::from_weights(px.to_vec()),
            p_uhat_given_y2: Kernel::from_flat_unchecked(self.n2, self.n2 + 1, uh.to_vec()),
            p_vhat_given_y1: Kernel::from_flat_unchecked(self.n1, self.n1 + 1, vh.to_vec()),
        }
    }

    fn terms(&self, p: &[f64], ch: &BroadcastChannel) -> Terms {
        let (px, uh, vh) = self.split(p);
        terms(&tensor(px, (uh, self.n2 + 1), (vh, self.n1 + 1), ch), ch)
    }

    fn embed(&self, px: &[f64], uh_copy: bool, vh_copy: bool) -> Vec<f64> {
        let mut s = px.to_vec();
        s.extend(desc(self.n2, uh_copy));
        s.extend(desc(self.n1, vh_copy));
        s
    }
}

/// Constant or copying description of an `n`-ary output into `n + 1` symbols.
fn desc(n: usize, copy: bool) -> Vec<f64> {
    let mut k = vec![0.0; n * (n + 1)];
    for r in 0..n {
        k[r * (n + 1) + if copy { r } else { 0 }] = 1.0;
    }
    k
}

/// Best rate of a scheme over `p(x)` and both descriptions. Searches are
/// seeded with constant and copying descriptions at the scanned inputs;
/// infeasible witnesses score their fallback rate.
pub fn optimize_common<E: Executor>(
    ch: &BroadcastChannel,
    scheme: SchemeChoice,
    budget: &OptBudget,
    exec: &E,
) -> Result<CommonRateReport> {
    let wl = WitnessLayout::new(ch);
    let score = |p: &[f64]| {
        let t = wl.terms(p, ch);
        match scheme {
            SchemeChoice::SingleStep => {
                if t.single_feasible() {
                    t.single
                } else {
                    t.nocoop()
                }
            }
            SchemeChoice::TwoStep => t.two_step().map_or(t.nocoop(), |(_, r)| r),
        }
    };
    let mut seeds = Vec::new();
    for px in input_seeds(ch, &OptBudget {
        fine_step: budget.fine_step.max(1e-2),
        ..*budget
    }) {
        for (a, b) in [(false, false), (true, false), (false, true), (true, true)] {
            seeds.push(wl.embed(&px, a, b));
        }
    }
    let tag = match scheme {
        SchemeChoice::SingleStep => tags::COMMON_SINGLE,
        SchemeChoice::TwoStep => tags::COMMON_TWO_STEP,
    };
    let m = maximize(&wl.layout(), &score, budget, tag, &seeds, exec);
    let w = wl.witness(&m.params);
    match scheme {
        SchemeChoice::SingleStep => single_step_rate(&w, ch),
        SchemeChoice::TwoStep => best_two_step_rate(&w, ch),
    }
}

/// One point of a rate-versus-link-capacity curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub c: f64,
    pub rate: f64,
    pub scheme: Scheme,
    pub p_x: Pmf,
}

/// Two-step rate with `Û = Y2`, `V̂ = Y1` and `C12 = C21 = C`, optimized over
/// `p(x)` for every `C` of the grid. Values of `C` where neither direction is
/// feasible report the rate without cooperation.
pub fn corollary_two_step_curve<E: Executor>(
    ch: &BroadcastChannel,
    c_grid: &[f64],
    budget: &OptBudget,
    exec: &E,
) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::with_capacity(c_grid.len());
    let wl = WitnessLayout::new(ch);
    for (k, &c) in c_grid.iter().enumerate() {
        let chc = ch.with_links(c, c)?;
        let rate_of = |px: &[f64]| {
            let t = wl.terms(&wl.embed(px, true, true), &chc);
            t.two_step().map_or(t.nocoop(), |(_, r)| r)
        };
        let layout = Layout::new(vec![ch.x_size()]);
        let tag = tags::COMMON_COROLLARY ^ ((k as u64) << 8);
        let m = maximize(&layout, &rate_of, budget, tag, &input_seeds(ch, budget), exec);
        let t = wl.terms(&wl.embed(&m.params, true, true), &chc);
        let (scheme, rate) = t.two_step().unwrap_or((Scheme::None, t.nocoop()));
        out.push(CurvePoint {
            c,
            rate,
            scheme,
            p_x: Pmf::from_weights(m.params),
        });
    }
    Ok(out)
}

/// `H(Y1)` and `H(Y1,Y2)` for two independent BSC(p) outputs of a
/// Bern(1-p0) input.
fn bsbc2_entropies(p: f64, p0: f64) -> (f64, f64) {
    let q = 1.0 - p;
    let y1 = p0 * q + (1.0 - p0) * p;
    let h1 = entropy_of_masses(&[y1, 1.0 - y1]);
    let a = p0 * q * q + (1.0 - p0) * p * p;
    let b = p0 * p * p + (1.0 - p0) * q * q;
    let h12 = entropy_of_masses(&[a, p * q, p * q, b]);
    (h1, h12)
}

fn check_bsbc2(p: f64, c: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidCapacity(c));
    }
    Ok(())
}

/// `min(H(Y1) - 2h(p) + C, H(Y1,Y2) - 2h(p))` for two independent identical
/// binary symmetric channels with `P(X = 0) = p0`; requires `C >= h(p)`.
pub fn bsbc2_corollary_rate_at(p: f64, c: f64, p0: f64) -> Result<f64> {
    check_bsbc2(p, c)?;
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidProbability(p0));
    }
    let hp = entropy_of_masses(&[p, 1.0 - p]);
    if c < hp {
        return Err(Error::InvalidConfig(alloc::format!(
            "link capacity {c} is below h(p) = {hp}"
        )));
    }
    let (h1, h12) = bsbc2_entropies(p, p0);
    Ok((h1 - 2.0 * hp + c).min(h12 - 2.0 * hp))
}

/// Supremum over `p0` of [`bsbc2_corollary_rate_at`], returned with the
/// maximizer. The objective is concave and symmetric about `1/2`; a grid of
/// step `1e-4` is refined by golden-section search.
pub fn bsbc2_corollary_rate(p: f64, c: f64) -> Result<(f64, f64)> {
    let f = |p0: f64| bsbc2_corollary_rate_at(p, c, p0);
    let mut best = (f(0.5)?, 0.5);
    for k in 0..=10_000 {
        let p0 = k as f64 * 1e-4;
        let v = f(p0)?;
        if v > best.0 {
            best = (v, p0);
        }
    }
    let (mut lo, mut hi) = ((best.1 - 1e-4).max(0.0), (best.1 + 1e-4).min(1.0));
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    for _ in 0..60 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a)? >= f(b)? {
            hi = b;
        } else {
            lo = a;
        }
    }
    let mid = 0.5 * (lo + hi);
    let v = f(mid)?;
    if v > best.0 {
        best = (v, mid);
    }
    Ok(best)
}

/// Result of testing the strong more-capable condition
/// `I(X;Y1) > I(X;Y2) + C12 - C21 + H(Y2|Y1,X)`.
///
/// The condition quantifies over every input; only a violation is
/// conclusive, so `holds` means "not falsified on the scanned inputs".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoreCapableReport {
    pub holds: bool,
    /// Smallest `lhs - rhs` found.
    pub min_margin: f64,
    pub argmin: Pmf,
    /// `sup I(X;Y2) + C12` when the condition holds.
    pub capacity_if_holds: Option<f64>,
    pub capacity_input: Option<Pmf>,
    /// `H(Y2|Y1,X) < C21 < H(Y2|Y1)` and `H(Y1|Y2,X) < C12 < H(Y1|Y2)` at
    /// the capacity input, under which the upper bound is attained.
    pub window_holds: bool,
}

fn margin(p_x: &[f64], ch: &BroadcastChannel) -> f64 {
    let mut d = Dense::source(p_x);
    d.push(&[X], &[ch.y1_size(), ch.y2_size()], ch.transition());
    let i1 = d.mi(&[X], &[Y1], &[]);
    let i2 = d.mi(&[X], &[Y2], &[]);
    let h = (d.h(&[X, Y1, Y2]) - d.h(&[X, Y1])).max(0.0);
    i1 - (i2 + ch.c12() - ch.c21() + h)
}

/// Checks the condition by minimizing its margin over inputs; when it is
/// not falsified the capacity is `sup I(X;Y2) + C12`.
pub fn strong_more_capable_check<E: Executor>(
    ch: &BroadcastChannel,
    budget: &OptBudget,
    exec: &E,
) -> MoreCapableReport {
    let layout = Layout::new(vec![ch.x_size()]);
    let mut seeds = input_seeds(ch, budget);
    for x in 0..ch.x_size() {
        let mut e = vec![0.0; ch.x_size()];
        e[x] = 1.0;
        seeds.push(e);
    }
    let m = maximize(&layout, &|p: &[f64]| -margin(p, ch), budget, tags::MORE_CAPABLE, &seeds, exec);
    let min_margin = -m.value;
    let holds = min_margin > 0.0;
    let mut rep = MoreCapableReport {
        holds,
        min_margin,
        argmin: Pmf::from_weights(m.params),
        capacity_if_holds: None,
        capacity_input: None,
        window_holds: false,
    };
    if holds {
        let cap = optimize_input(ch, budget, exec, tags::MORE_CAPABLE ^ 0xff, |p| {
            input_terms(p, ch).1 + ch.c12()
        });
        let mut d = Dense::source(cap.p_x.probs());
        d.push(&[X], &[ch.y1_size(), ch.y2_size()], ch.transition());
        let h = |a: &[usize], g: &[usize]| {
            let mut ag = a.to_vec();
            ag.extend_from_slice(g);
            (d.h(&ag) - d.h(g)).max(0.0)
        };
        let (c12, c21) = (ch.c12(), ch.c21());
        rep.window_holds = h(&[Y2], &[Y1, X]) < c21
            && c21 < h(&[Y2], &[Y1])
            && h(&[Y1], &[Y2, X]) < c12
            && c12 < h(&[Y1], &[Y2]);
        rep.capacity_if_holds = Some(cap.rate);
        rep.capacity_input = Some(cap.p_x);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::Sequential;
    use crate::prob::binary_entropy;

    fn h(p: f64) -> f64 {
        binary_entropy(p).unwrap()
    }

    fn pair(c: f64) -> BroadcastChannel {
        BroadcastChannel::bsbc_pair(0.1).unwrap().with_links(c, c).unwrap()
    }

    fn uniform() -> Pmf {
        Pmf::uniform(2).unwrap()
    }

    #[test]
    fn single_step_examples() {
        let ch = pair(0.3);
        let r = single_step_rate(&CommonWitness::silent(uniform(), &ch), &ch).unwrap();
        assert!(r.feasible && r.scheme == Scheme::SingleStep);
        assert!((r.rate - (1.0 - h(0.1))).abs() < 1e-12);

        // H(Y2|Y1) = H(Y1,Y2) - 1 = 0.680077...
        let ch = pair(0.680_078);
        let r = single_step_rate(&CommonWitness::copies(uniform(), &ch), &ch).unwrap();
        assert!(r.feasible);
        assert!((r.rate - 0.742_085_858_5).abs() < 1e-9, "{}", r.rate);
        let ch = pair(0.68);
        let r = single_step_rate(&CommonWitness::copies(uniform(), &ch), &ch).unwrap();
        assert!(!r.feasible && r.scheme == Scheme::None);
        assert!((r.rate - (1.0 - h(0.1))).abs() < 1e-12);
    }

    #[test]
    fn two_step_examples() {
        let ch = pair(0.0);
        let r = two_step_rate(&CommonWitness::silent(uniform(), &ch), &ch, Direction::D12).unwrap();
        assert!(r.feasible && (r.rate - (1.0 - h(0.1))).abs() < 1e-12);

        let ch = pair(0.55);
        let r = two_step_rate(&CommonWitness::copies(uniform(), &ch), &ch, Direction::D12).unwrap();
        assert!(r.feasible && r.scheme == Scheme::TwoStep12);
        let want = (1.0 - h(0.1)) - h(0.1) + 0.55;
        assert!((r.rate - want).abs() < 1e-12);
        assert!((r.rate - 0.612_008).abs() < 1e-6);
        assert!(r.rate <= r.upper + 1e-9);
    }

    #[test]
    fn closed_form_matches_tensor_path() {
        for &(c, p0) in &[(0.47, 0.5), (0.55, 0.3), (0.6, 0.5), (0.7, 0.42), (0.9, 0.5)] {
            let ch = pair(c);
            let w = CommonWitness::copies(Pmf::new(vec![p0, 1.0 - p0]).unwrap(), &ch);
            let r = two_step_rate(&w, &ch, Direction::D12).unwrap();
            let cf = bsbc2_corollary_rate_at(0.1, c, p0).unwrap();
            assert!((r.rate - cf).abs() < 1e-9, "c={c} p0={p0}: {} vs {cf}", r.rate);
        }
        assert!(bsbc2_corollary_rate_at(0.1, 0.4, 0.5).is_err());
    }

    #[test]
    fn closed_form_curve_values() {
        let (r, p0) = bsbc2_corollary_rate(0.1, h(0.1)).unwrap();
        assert!((r - (1.0 - h(0.1))).abs() < 1e-9 && (p0 - 0.5).abs() < 1e-3);
        let (r, _) = bsbc2_corollary_rate(0.1, 0.7).unwrap();
        assert!((r - 0.742_085_858_5).abs() < 1e-9);
        let (a, _) = bsbc2_corollary_rate(0.1, 0.5).unwrap();
        let (b, _) = bsbc2_corollary_rate(0.1, 0.6).unwrap();
        assert!((b - a - 0.1).abs() < 1e-9);
    }

    #[test]
    fn baselines() {
        let b = OptBudget {
            restarts: 4,
            ..OptBudget::default()
        };
        let r = nocoop_common_capacity(&pair(0.0), &b, &Sequential);
        assert!((r.rate - (1.0 - h(0.1))).abs() < 1e-9);
        let u = common_upper_bound(&pair(1.0), &b, &Sequential);
        assert!((u.rate - 0.742_085_858_5).abs() < 1e-9);
        let u0 = common_upper_bound(&pair(0.0), &b, &Sequential);
        assert!((u0.rate - r.rate).abs() < 1e-9);
    }

    #[test]
    fn more_capable_examples() {
        let b = OptBudget {
            restarts: 4,
            ..OptBudget::default()
        };
        let noiseless = Kernel::identity(2).unwrap();
        let ch = BroadcastChannel::independent(&noiseless, &Kernel::bsc(0.3).unwrap(), 0.05, 0.95).unwrap();
        let r = strong_more_capable_check(&ch, &b, &Sequential);
        assert!(r.holds, "{r:?}");
        assert!((r.capacity_if_holds.unwrap() - (1.0 - h(0.3) + 0.05)).abs() < 1e-9);
        assert!(!r.window_holds);

        let r = strong_more_capable_check(&pair(0.2), &b, &Sequential);
        assert!(!r.holds);

        let mute = Kernel::constant(2, 1).unwrap();
        let ch = BroadcastChannel::independent(&Kernel::bsc(0.1).unwrap(), &mute, 0.1, 0.3).unwrap();
        let r = strong_more_capable_check(&ch, &b, &Sequential);
        assert!(r.holds);
        assert!((r.capacity_if_holds.unwrap() - 0.1).abs() < 1e-12);
    }
}
