//! General broadcast channel with conference links in both directions.
//!
//! Receivers exchange compressed descriptions `Û` of `Y2` and `V̂` of `Y1`
//! over the links before decoding Marton-coded messages. A witness
//! `p(u,v,x) p(û|y2) p(v̂|y1)` is usable when
//!
//! ```text
//! C21 >= I(Û;Y2) - I(Û;Y1)        C12 >= I(V̂;Y1) - I(V̂;Y2)
//! ```
//!
//! and then contributes
//! `{R1 <= I(U;Y1,Û), R2 <= I(V;Y2,V̂), R1 + R2 <= I(U;Y1,Û) + I(V;Y2,V̂) - I(U;V)}`.
//! The common auxiliary `W` of the full Marton region is held constant.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontier::{trace_region, RateFrontier, RatePolytope, RegionProblem};
use crate::optim::{fine_binary_grid, tags, Executor, Layout, OptBudget};
use crate::prob::{BroadcastChannel, Dense, JointPmf, Kernel, Var};

/// Auxiliary distributions of the cooperative Marton scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartonWitness {
    /// Joint over `(u, v, x)`.
    pub p_uvx: JointPmf,
    pub p_uhat_given_y2: Kernel,
    pub p_vhat_given_y1: Kernel,
}

/// Rates and link slacks of one witness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralRatePoint {
    pub r_u: f64,
    pub r_v: f64,
    pub i_uv: f64,
    pub feasible: bool,
    pub slack12: f64,
    pub slack21: f64,
}

impl GeneralRatePoint {
    /// Rates contributed by the witness; empty unless feasible.
    pub fn polytope(&self) -> RatePolytope {
        if self.feasible {
            RatePolytope {
                r1: self.r_u,
                r2: self.r_v,
                sum: self.r_u + self.r_v - self.i_uv,
            }
        } else {
            RatePolytope::infeasible(-(self.slack12.min(0.0) + self.slack21.min(0.0)))
        }
    }
}

/// Variable positions in the evaluation tensor.
const U: usize = 0;
const V: usize = 1;
const Y1: usize = 3;
const Y2: usize = 4;
const UH: usize = 5;
const VH: usize = 6;

fn tensor(
    sizes: [usize; 3],
    p_uvx: &[f64],
    uh: (&[f64], usize),
    vh: (&[f64], usize),
    ch: &BroadcastChannel,
) -> Dense {
    let mut d = Dense::joint(&sizes, p_uvx);
    d.push(&[2], &[ch.y1_size(), ch.y2_size()], ch.transition());
    d.push(&[Y2], &[uh.1], uh.0);
    d.push(&[Y1], &[vh.1], vh.0);
    d
}

fn point_of(d: &Dense, ch: &BroadcastChannel) -> GeneralRatePoint {
    let slack21 = ch.c21() - (d.mi(&[UH], &[Y2], &[]) - d.mi(&[UH], &[Y1], &[]));
    let slack12 = ch.c12() - (d.mi(&[VH], &[Y1], &[]) - d.mi(&[VH], &[Y2], &[]));
    GeneralRatePoint {
        r_u: d.mi(&[U], &[Y1, UH], &[]),
        r_v: d.mi(&[V], &[Y2, VH], &[]),
        i_uv: d.mi(&[U], &[V], &[]),
        feasible: slack12 >= 0.0 && slack21 >= 0.0,
        slack12,
        slack21,
    }
}

fn check_witness(w: &MartonWitness, ch: &BroadcastChannel) -> Result<[usize; 3]> {
    let vars = w.p_uvx.vars();
    if vars.len() != 3 {
        return Err(Error::DimensionMismatch(alloc::format!(
            "p(u,v,x) has {} variables",
            vars.len()
        )));
    }
    let sizes = [vars[0].size(), vars[1].size(), vars[2].size()];
    if sizes[2] != ch.x_size() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "x has {} symbols, channel input has {}",
            sizes[2],
            ch.x_size()
        )));
    }
    let (uh, vh) = (&w.p_uhat_given_y2, &w.p_vhat_given_y1);
    if uh.n_in() != ch.y2_size() || vh.n_in() != ch.y1_size() {
        return Err(Error::DimensionMismatch(
            "description kernels must be indexed by the opposite output".to_string(),
        ));
    }
    if uh.n_out() > ch.y2_size() + 1 {
        return Err(Error::Cardinality(alloc::format!(
            "|Û| = {} exceeds |Y2| + 1 = {}",
            uh.n_out(),
            ch.y2_size() + 1
        )));
    }
    if vh.n_out() > ch.y1_size() + 1 {
        return Err(Error::Cardinality(alloc::format!(
            "|V̂| = {} exceeds |Y1| + 1 = {}",
            vh.n_out(),
            ch.y1_size() + 1
        )));
    }
    Ok(sizes)
}

fn witness_tensor(w: &MartonWitness, ch: &BroadcastChannel) -> Result<Dense> {
    let sizes = check_witness(w, ch)?;
    Ok(tensor(
        sizes,
        w.p_uvx.probs(),
        (w.p_uhat_given_y2.as_flat(), w.p_uhat_given_y2.n_out()),
        (w.p_vhat_given_y1.as_flat(), w.p_vhat_given_y1.n_out()),
        ch,
    ))
}

/// Rates `I(U;Y1,Û)`, `I(V;Y2,V̂)`, `I(U;V)` and the link slacks.
pub fn marton_coop_point(w: &MartonWitness, ch: &BroadcastChannel) -> Result<GeneralRatePoint> {
    let d = witness_tensor(w, ch)?;
    Ok(point_of(&d, ch))
}

/// `I(U;Y1) + C21 - I(Û;Y2|U,Y1)`.
pub fn partial_coop_r1_bound(w: &MartonWitness, ch: &BroadcastChannel) -> Result<f64> {
    let d = witness_tensor(w, ch)?;
    Ok(d.mi(&[U], &[Y1], &[]) + ch.c21() - d.mi(&[UH], &[Y2], &[U, Y1]))
}

/// Builds a witness from flat tables; the joint must be laid out `[u][v][x]`.
pub fn marton_witness(
    card_u: usize,
    card_v: usize,
    p_uvx: Vec<f64>,
    p_uhat_given_y2: Kernel,
    p_vhat_given_y1: Kernel,
) -> Result<MartonWitness> {
    let nx = p_uvx.len() / (card_u * card_v).max(1);
    let vars = vec![Var::new("u", card_u)?, Var::new("v", card_v)?, Var::new("x", nx)?];
    Ok(MartonWitness {
        p_uvx: JointPmf::new(vars, p_uvx)?,
        p_uhat_given_y2,
        p_vhat_given_y1,
    })
}

struct MartonProblem<'a> {
    ch: &'a BroadcastChannel,
    card_u: usize,
    card_v: usize,
    coop: bool,
    extra: Vec<Vec<f64>>,
}

impl MartonProblem<'_> {
    fn joint_len(&self) -> usize {
        self.card_u * self.card_v * self.ch.x_size()
    }

    fn uh_size(&self) -> usize {
        if self.coop {
            self.ch.y2_size() + 1
        } else {
            1
        }
    }

    fn vh_size(&self) -> usize {
        if self.coop {
            self.ch.y1_size() + 1
        } else {
            1
        }
    }

    /// Splits parameters into the joint and the two description kernels.
    /// Without cooperation the kernels are constant.
    fn tables(&self, params: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let (n1, n2) = (self.ch.y1_size(), self.ch.y2_size());
        let j = params[..self.joint_len()].to_vec();
        if !self.coop {
            return (j, vec![1.0; n2], vec![1.0; n1]);
        }
        let ku = n2 * self.uh_size();
        let uh = params[self.joint_len()..self.joint_len() + ku].to_vec();
        let vh = params[self.joint_len() + ku..].to_vec();
        (j, uh, vh)
    }

    /// Evaluates a parameter vector. A description whose link constraint
    /// fails is replaced by a constant one, so the returned tables are the
    /// witness actually achieving the returned point.
    fn solve(&self, params: &[f64]) -> (GeneralRatePoint, Vec<f64>, Vec<f64>, Vec<f64>) {
        let sizes = [self.card_u, self.card_v, self.ch.x_size()];
        let (j, mut uh, mut vh) = self.tables(params);
        let (su, sv) = (self.uh_size(), self.vh_size());
        let mut pt = point_of(&tensor(sizes, &j, (&uh, su), (&vh, sv), self.ch), self.ch);
        if pt.feasible || !self.coop {
            return (pt, j, uh, vh);
        }
        if pt.slack21 < 0.0 {
            uh = constant_kernel(self.ch.y2_size(), su);
        }
        if pt.slack12 < 0.0 {
            vh = constant_kernel(self.ch.y1_size(), sv);
        }
        pt = point_of(&tensor(sizes, &j, (&uh, su), (&vh, sv), self.ch), self.ch);
        (pt, j, uh, vh)
    }
}

fn constant_kernel(n_in: usize, n_out: usize) -> Vec<f64> {
    let mut k = vec![0.0; n_in * n_out];
    for r in 0..n_in {
        k[r * n_out] = 1.0;
    }
    k
}

/// Kernel copying the input into the first `n_in` of `n_out` symbols.
fn copy_kernel(n_in: usize, n_out: usize) -> Vec<f64> {
    let mut k = vec![0.0; n_in * n_out];
    for r in 0..n_in {
        k[r * n_out + r] = 1.0;
    }
    k
}

impl RegionProblem for MartonProblem<'_> {
    type Witness = MartonWitness;

    fn layout(&self) -> Layout {
        let l = Layout::new(vec![self.joint_len()]);
        if self.coop {
            l.repeat(self.ch.y2_size(), self.uh_size())
                .repeat(self.ch.y1_size(), self.vh_size())
        } else {
            l
        }
    }

    fn polytope(&self, params: &[f64]) -> RatePolytope {
        self.solve(params).0.polytope()
    }

    fn witness(&self, params: &[f64]) -> MartonWitness {
        let (_, j, uh, vh) = self.solve(params);
        let (n1, n2) = (self.ch.y1_size(), self.ch.y2_size());
        marton_witness(
            self.card_u,
            self.card_v,
            j,
            Kernel::from_flat_unchecked(n2, uh.len() / n2, uh),
            Kernel::from_flat_unchecked(n1, vh.len() / n1, vh),
        )
        .expect("optimizer iterates are valid pmfs")
    }

    fn seeds(&self) -> Vec<Vec<f64>> {
        let nx = self.ch.x_size();
        let (cu, cv) = (self.card_u, self.card_v);
        let at = |u: usize, v: usize, x: usize| (u * cv + v) * nx + x;
        let mut joints = Vec::new();
        // U = X, V = X, both, neither; uniform input
        let mut push = |f: &dyn Fn(usize) -> Option<(usize, usize)>| {
            let mut j = vec![0.0; self.joint_len()];
            for x in 0..nx {
                match f(x) {
                    Some((u, v)) => j[at(u, v, x)] = 1.0 / nx as f64,
                    None => return,
                }
            }
            joints.push(j);
        };
        push(&|_| Some((0, 0)));
        push(&|x| (x < cu).then_some((x, 0)));
        push(&|x| (x < cv).then_some((0, x)));
        push(&|x| (x < cu && x < cv).then_some((x, x)));
        if !self.coop {
            return joints;
        }
        let (n1, n2) = (self.ch.y1_size(), self.ch.y2_size());
        let uh = [constant_kernel(n2, n2 + 1), copy_kernel(n2, n2 + 1)];
        let vh = [constant_kernel(n1, n1 + 1), copy_kernel(n1, n1 + 1)];
        let mut seeds = Vec::new();
        for j in joints.iter().chain(&self.extra) {
            for a in &uh {
                for b in &vh {
                    let mut s = j.clone();
                    s.extend_from_slice(a);
                    s.extend_from_slice(b);
                    seeds.push(s);
                }
            }
        }
        seeds
    }
}

fn check_cards(card_u: usize, card_v: usize, ch: &BroadcastChannel) -> Result<()> {
    if card_u == 0 || card_v == 0 {
        return Err(Error::Cardinality("auxiliary alphabets must be nonempty".to_string()));
    }
    let cells = (card_u * card_v).saturating_mul(ch.x_size() * ch.y1_size() * ch.y2_size());
    let cells = cells.saturating_mul((ch.y1_size() + 1) * (ch.y2_size() + 1));
    if cells > crate::prob::MAX_CELLS {
        return Err(Error::TooLarge(cells));
    }
    Ok(())
}

/// Marton inner frontier without cooperation (`Û`, `V̂` constant).
pub fn marton_nocoop_region<E: Executor>(
    ch: &BroadcastChannel,
    card_u: usize,
    card_v: usize,
    budget: &OptBudget,
    exec: &E,
) -> Result<RateFrontier<MartonWitness>> {
    check_cards(card_u, card_v, ch)?;
    let p = MartonProblem {
        ch,
        card_u,
        card_v,
        coop: false,
        extra: Vec::new(),
    };
    Ok(trace_region(&p, budget, tags::MARTON, exec))
}

/// Cooperative Marton inner frontier. The search is seeded with the
/// solutions of the search without cooperation, so the result dominates it.
pub fn marton_coop_region<E: Executor>(
    ch: &BroadcastChannel,
    card_u: usize,
    card_v: usize,
    budget: &OptBudget,
    exec: &E,
) -> Result<RateFrontier<MartonWitness>> {
    let base = marton_nocoop_region(ch, card_u, card_v, budget, exec)?;
    let extra = base.witnesses.iter().map(|w| w.p_uvx.probs().to_vec()).collect();
    let p = MartonProblem {
        ch,
        card_u,
        card_v,
        coop: true,
        extra,
    };
    Ok(trace_region(&p, budget, tags::MARTON_COOP, exec))
}

/// Input distribution attaining one direction of the cut-set bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutsetWitness {
    pub p_x: crate::prob::Pmf,
}

/// Cut-set caps `(I(X;Y1) + C21, I(X;Y2) + C12, I(X;Y1,Y2))` at `p_x`.
pub fn cutset_polytope(p_x: &[f64], ch: &BroadcastChannel) -> RatePolytope {
    let mut d = Dense::source(p_x);
    d.push(&[0], &[ch.y1_size(), ch.y2_size()], ch.transition());
    RatePolytope {
        r1: d.mi(&[0], &[1], &[]) + ch.c21(),
        r2: d.mi(&[0], &[2], &[]) + ch.c12(),
        sum: d.mi(&[0], &[1, 2], &[]),
    }
}

struct CutsetProblem<'a> {
    ch: &'a BroadcastChannel,
    budget: OptBudget,
    extra: Vec<Vec<f64>>,
}

impl RegionProblem for CutsetProblem<'_> {
    type Witness = CutsetWitness;

    fn layout(&self) -> Layout {
        Layout::new(vec![self.ch.x_size()])
    }

    fn polytope(&self, params: &[f64]) -> RatePolytope {
        cutset_polytope(params, self.ch)
    }

    fn witness(&self, params: &[f64]) -> CutsetWitness {
        CutsetWitness {
            p_x: crate::prob::Pmf::from_weights(params.to_vec()),
        }
    }

    fn seeds(&self) -> Vec<Vec<f64>> {
        let mut s = if self.ch.x_size() == 2 {
            fine_binary_grid(&self.budget)
        } else {
            Vec::new()
        };
        s.extend(self.extra.iter().cloned());
        s
    }
}

/// Outer frontier `max over p(x)` of the cut-set polytope per direction.
pub fn cutset_bound<E: Executor>(
    ch: &BroadcastChannel,
    budget: &OptBudget,
    exec: &E,
) -> RateFrontier<CutsetWitness> {
    cutset_bound_seeded(ch, budget, exec, &[])
}

/// [`cutset_bound`] with additional input distributions scanned.
pub fn cutset_bound_seeded<E: Executor>(
    ch: &BroadcastChannel,
    budget: &OptBudget,
    exec: &E,
    extra: &[Vec<f64>],
) -> RateFrontier<CutsetWitness> {
    let p = CutsetProblem {
        ch,
        budget: *budget,
        extra: extra.to_vec(),
    };
    trace_region(&p, budget, tags::CUTSET, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::Sequential;
    use crate::prob::{binary_entropy, compose_chain, Factor};

    fn h(p: f64) -> f64 {
        binary_entropy(p).unwrap()
    }

    fn diag_witness(uh: Kernel, vh: Kernel) -> MartonWitness {
        // U = V = X uniform
        marton_witness(2, 2, vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5], uh, vh).unwrap()
    }

    #[test]
    fn constant_descriptions_give_marton() {
        let ch = BroadcastChannel::bsbc_cascade(0.1, 0.1).unwrap().with_links(0.2, 0.3).unwrap();
        let w = diag_witness(Kernel::constant(2, 1).unwrap(), Kernel::constant(2, 1).unwrap());
        let p = marton_coop_point(&w, &ch).unwrap();
        assert!((p.r_u - (1.0 - h(0.1))).abs() < 1e-12);
        assert!((p.r_v - (1.0 - h(0.18))).abs() < 1e-12);
        assert!((p.i_uv - 1.0).abs() < 1e-12);
        assert!(p.feasible && (p.slack12 - 0.2).abs() < 1e-12 && (p.slack21 - 0.3).abs() < 1e-12);
        let s = p.polytope().sum;
        assert!((s - (0.531_004_406_4 + 0.319_922_954_3 - 1.0)).abs() < 1e-9);
        assert!(p.polytope().is_empty());
    }

    #[test]
    fn copy_of_y1_needs_conditional_entropy() {
        let ch = BroadcastChannel::bsbc_pair(0.1).unwrap();
        let w = diag_witness(Kernel::constant(2, 1).unwrap(), Kernel::identity(2).unwrap());
        // H(Y1|Y2) for the pair at uniform input
        let j = compose_chain(&[
            Factor::source("x", &crate::prob::Pmf::uniform(2).unwrap()).unwrap(),
            Factor::channel("x", "y1", "y2", &ch).unwrap(),
        ])
        .unwrap();
        let hc = j.conditional_entropy(&["y1"], &["y2"]).unwrap();
        let i12 = j.mutual_information(&["x"], &["y1", "y2"], &[]).unwrap();
        for (c, ok) in [(hc - 1e-6, false), (hc + 1e-6, true)] {
            let p = marton_coop_point(&w, &ch.with_links(c, 0.0).unwrap()).unwrap();
            assert_eq!(p.feasible, ok);
            assert!((p.slack12 - (c - hc)).abs() < 1e-12);
            assert!((p.r_v - i12).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_bound_examples() {
        let ch = BroadcastChannel::bsbc_pair(0.1).unwrap().with_links(0.0, 0.8).unwrap();
        let w = diag_witness(Kernel::constant(2, 1).unwrap(), Kernel::constant(2, 1).unwrap());
        let b = partial_coop_r1_bound(&w, &ch).unwrap();
        assert!((b - (1.0 - h(0.1) + 0.8)).abs() < 1e-12);
        let w = diag_witness(Kernel::identity(2).unwrap(), Kernel::constant(2, 1).unwrap());
        let b = partial_coop_r1_bound(&w, &ch).unwrap();
        // H(Y2|U,Y1) = H(Y2|X) = h(0.1) when U = X
        assert!((b - (1.0 - h(0.1) + 0.8 - h(0.1))).abs() < 1e-12);
        let p = marton_coop_point(&w, &ch).unwrap();
        assert!(p.feasible && b >= p.r_u - 1e-12);
    }

    #[test]
    fn witness_validation() {
        let ch = BroadcastChannel::bsbc_pair(0.1).unwrap();
        let w = diag_witness(
            Kernel::from_flat(2, 4, vec![0.25; 8]).unwrap(),
            Kernel::constant(2, 1).unwrap(),
        );
        assert!(matches!(marton_coop_point(&w, &ch), Err(Error::Cardinality(_))));
        let w = diag_witness(Kernel::constant(3, 1).unwrap(), Kernel::constant(2, 1).unwrap());
        assert!(matches!(marton_coop_point(&w, &ch), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn cutset_of_noiseless_pair() {
        let ch = BroadcastChannel::independent(&Kernel::identity(2).unwrap(), &Kernel::identity(2).unwrap(), 0.0, 0.0)
            .unwrap();
        let b = OptBudget {
            lambda_count: 5,
            restarts: 2,
            ..OptBudget::default()
        };
        let f = cutset_bound(&ch, &b, &Sequential);
        assert!((f.max_sum() - 1.0).abs() < 1e-9);
    }
}
