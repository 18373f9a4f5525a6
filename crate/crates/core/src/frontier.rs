//! Weighted-sum tracing of two-dimensional rate regions.
//!
//! A region is a union of per-witness polytopes
//! `{R1 <= a, R2 <= b, R1 + R2 <= c, R >= 0}`, closed under time sharing.
//! Its boundary is recovered through the support function
//! `max λ R1 + (1-λ) R2` on a uniform grid of `λ`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::optim::{ascend, grid_points, restart_starts, Executor, Layout, OptBudget};

/// Rate constraints contributed by one witness distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePolytope {
    pub r1: f64,
    pub r2: f64,
    /// Sum-rate cap; `f64::INFINITY` for rectangles.
    pub sum: f64,
}

impl RatePolytope {
    pub fn rectangle(r1: f64, r2: f64) -> Self {
        RatePolytope {
            r1,
            r2,
            sum: f64::INFINITY,
        }
    }

    /// Empty polytope carrying a constraint violation `> 0` for the search
    /// surrogate.
    pub fn infeasible(violation: f64) -> Self {
        let v = -violation.abs().max(f64::MIN_POSITIVE);
        RatePolytope { r1: v, r2: v, sum: v }
    }

    pub fn is_empty(&self) -> bool {
        self.r1 < 0.0 || self.r2 < 0.0 || self.sum < 0.0
    }

    /// Maximizing vertex of `λ R1 + (1-λ) R2` and its value, or `None` for
    /// an empty polytope. At `λ = 1/2` the vertex with the larger `R1` is
    /// returned.
    pub fn support(&self, lambda: f64) -> Option<(f64, f64, f64)> {
        if self.is_empty() {
            return None;
        }
        let (r1, r2) = if lambda >= 0.5 {
            let r1 = self.r1.min(self.sum);
            (r1, self.r2.min(self.sum - r1))
        } else {
            let r2 = self.r2.min(self.sum);
            (self.r1.min(self.sum - r2), r2)
        };
        Some((r1, r2, lambda * r1 + (1.0 - lambda) * r2))
    }

    /// Search score: the support value, or a negative surrogate that grows
    /// as an empty polytope approaches nonemptiness.
    pub fn score(&self, lambda: f64) -> f64 {
        match self.support(lambda) {
            Some((_, _, v)) => v,
            None => self.r1.min(self.r2).min(self.sum).min(0.0) - 1.0,
        }
    }
}

/// One traced boundary point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub lambda: f64,
    pub r1: f64,
    pub r2: f64,
    /// Index into [`RateFrontier::witnesses`].
    pub witness_id: usize,
}

/// Sweep parameters recorded with a frontier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub budget: OptBudget,
}

/// Pareto boundary of a rate region with the distributions achieving it.
///
/// Points are sorted by `r1` ascending with `r2` non-increasing and all lie
/// on the upper concave envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFrontier<W> {
    pub points: Vec<FrontierPoint>,
    pub witnesses: Vec<W>,
    pub meta: SweepMeta,
}

impl<W> RateFrontier<W> {
    /// Support function of the convex hull of the points.
    pub fn support(&self, lambda: f64) -> f64 {
        self.points
            .iter()
            .map(|p| lambda * p.r1 + (1.0 - lambda) * p.r2)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_sum(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.r1 + p.r2)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_r1(&self) -> f64 {
        self.points.iter().map(|p| p.r1).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_r2(&self) -> f64 {
        self.points.iter().map(|p| p.r2).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn witness(&self, p: &FrontierPoint) -> &W {
        &self.witnesses[p.witness_id]
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Keeps the points on the decreasing part of the upper concave envelope,
/// sorted by `r1` ascending. Points within `tol` of the envelope (including
/// duplicates) are retained.
pub fn upper_concave_envelope(points: &[FrontierPoint], tol: f64) -> Vec<FrontierPoint> {
    let mut pts: Vec<FrontierPoint> = points.to_vec();
    pts.sort_by(|a, b| {
        a.r1.partial_cmp(&b.r1)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(b.r2.partial_cmp(&a.r2).unwrap_or(core::cmp::Ordering::Equal))
            .then(a.lambda.partial_cmp(&b.lambda).unwrap_or(core::cmp::Ordering::Equal))
    });
    if pts.len() <= 1 {
        return pts;
    }
    // strict upper hull on distinct coordinates
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in &pts {
        let q = (p.r1, p.r2);
        if hull.last() == Some(&q) {
            continue;
        }
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) >= 0.0 {
            hull.pop();
        }
        hull.push(q);
    }
    // support value test against the hull's supporting lines
    let on_hull = |p: &FrontierPoint| {
        // Pareto part: nothing in the hull dominates p by more than tol
        let dominated = hull
            .iter()
            .any(|h| h.0 >= p.r1 - tol && h.1 >= p.r2 - tol && (h.0 > p.r1 + tol || h.1 > p.r2 + tol));
        if dominated {
            return false;
        }
        // below a hull edge by more than tol
        for w in hull.windows(2) {
            let (a, b) = (w[0], w[1]);
            if p.r1 >= a.0 && p.r1 <= b.0 && b.0 > a.0 {
                let t = (p.r1 - a.0) / (b.0 - a.0);
                let y = a.1 + t * (b.1 - a.1);
                if p.r2 < y - tol {
                    return false;
                }
            }
        }
        true
    };
    pts.into_iter().filter(|p| on_hull(p)).collect()
}

/// A rate region parameterized by a product of simplices.
pub trait RegionProblem: Sync {
    type Witness: Clone + Send + Sync;

    fn layout(&self) -> Layout;

    /// Rate polytope of a parameter vector (each block a pmf). Infeasible
    /// parameters give an empty polytope, see [`RatePolytope::infeasible`].
    fn polytope(&self, params: &[f64]) -> RatePolytope;

    fn witness(&self, params: &[f64]) -> Self::Witness;

    /// Extra candidates scanned together with the lattice.
    fn seeds(&self) -> Vec<Vec<f64>> {
        Vec::new()
    }
}

/// One evaluated candidate in a region search.
#[derive(Clone, Debug)]
pub struct Candidate<W> {
    pub witness: W,
    pub poly: RatePolytope,
}

/// Traces a region: lattice scan and seeds evaluated once, restarts of the
/// ascent per `λ`, then every `λ` reselects its best point from the pooled
/// candidates so that each row is a true supporting point of the pool.
pub fn trace_region<P, E>(
    problem: &P,
    budget: &OptBudget,
    tag: u64,
    exec: &E,
) -> RateFrontier<P::Witness>
where
    P: RegionProblem,
    E: Executor,
{
    let layout = problem.layout();
    let mut params = grid_points(&layout, budget, tag);
    params.extend(problem.seeds());
    let polys: Vec<RatePolytope> = exec.map(params.len(), |i| problem.polytope(&params[i]));
    let lambdas = budget.lambdas();
    let ascended: Vec<Vec<(Vec<f64>, RatePolytope)>> = exec.map(lambdas.len(), |k| {
        let lambda = lambdas[k];
        let scores: Vec<f64> = polys.iter().map(|c| c.score(lambda)).collect();
        let starts = restart_starts(&layout, &params, &scores, budget, tag, k as u64);
        let f = |p: &[f64]| problem.polytope(p).score(lambda);
        starts
            .iter()
            .map(|s| {
                let (p, _) = ascend(&layout, s, &f, budget);
                let poly = problem.polytope(&p);
                (p, poly)
            })
            .collect()
    });
    let mut pool: Vec<Candidate<Vec<f64>>> = params
        .into_iter()
        .zip(polys)
        .map(|(witness, poly)| Candidate { witness, poly })
        .collect();
    for a in ascended {
        pool.extend(a.into_iter().map(|(witness, poly)| Candidate { witness, poly }));
    }
    let f = frontier_from_pool(pool, &lambdas, budget);
    RateFrontier {
        points: f.points,
        witnesses: f.witnesses.iter().map(|p| problem.witness(p)).collect(),
        meta: f.meta,
    }
}

/// Selects, for every `λ`, the first pool candidate with the largest support
/// value, then drops anything off the upper concave envelope.
pub fn frontier_from_pool<W: Clone>(
    pool: Vec<Candidate<W>>,
    lambdas: &[f64],
    budget: &OptBudget,
) -> RateFrontier<W> {
    let mut chosen: Vec<(f64, usize, f64, f64)> = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let mut best: Option<(usize, f64, f64, f64)> = None;
        for (i, c) in pool.iter().enumerate() {
            if let Some((r1, r2, v)) = c.poly.support(lambda) {
                if best.is_none_or(|b| v > b.3) {
                    best = Some((i, r1, r2, v));
                }
            }
        }
        if let Some((i, r1, r2, _)) = best {
            chosen.push((lambda, i, r1, r2));
        }
    }
    let mut ids: Vec<usize> = Vec::new();
    let mut witnesses = Vec::new();
    let mut points = Vec::with_capacity(chosen.len());
    for (lambda, i, r1, r2) in chosen {
        let witness_id = match ids.iter().position(|&j| j == i) {
            Some(w) => w,
            None => {
                ids.push(i);
                witnesses.push(pool[i].witness.clone());
                witnesses.len() - 1
            }
        };
        points.push(FrontierPoint {
            lambda,
            r1,
            r2,
            witness_id,
        });
    }
    let points = upper_concave_envelope(&points, 1e-12);
    RateFrontier {
        points,
        witnesses,
        meta: SweepMeta { budget: *budget },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pt(r1: f64, r2: f64) -> FrontierPoint {
        FrontierPoint {
            lambda: 0.0,
            r1,
            r2,
            witness_id: 0,
        }
    }

    #[test]
    fn polytope_support_vertices() {
        let p = RatePolytope {
            r1: 0.6,
            r2: 0.5,
            sum: 0.8,
        };
        let (r1, r2, _) = p.support(1.0).unwrap();
        assert!(r1 == 0.6 && (r2 - 0.2).abs() < 1e-15);
        let (r1, r2, _) = p.support(0.0).unwrap();
        assert!((r1 - 0.3).abs() < 1e-15 && r2 == 0.5);
        let empty = RatePolytope {
            r1: 0.5,
            r2: 0.3,
            sum: -0.1,
        };
        assert!(empty.support(0.3).is_none());
        assert!(empty.score(0.3) < 0.0);
        let rect = RatePolytope::rectangle(0.2, 0.4);
        assert_eq!(rect.support(0.7).map(|s| (s.0, s.1)), Some((0.2, 0.4)));
    }

    #[test]
    fn envelope_drops_interior_points() {
        let pts = vec![pt(0.0, 1.0), pt(0.5, 0.4), pt(0.5, 0.6), pt(1.0, 0.0), pt(0.2, 0.8)];
        let env = upper_concave_envelope(&pts, 1e-12);
        let coords: Vec<(f64, f64)> = env.iter().map(|p| (p.r1, p.r2)).collect();
        // (0.5,0.4) is dominated, (0.2,0.8) lies on the segment to (0.5,0.6)?
        // slope 0->0.5: (0.6-1)/0.5 = -0.8 so y(0.2)=0.84 > 0.8: dropped
        assert_eq!(coords, vec![(0.0, 1.0), (0.5, 0.6), (1.0, 0.0)]);
    }

    #[test]
    fn envelope_is_pareto_sorted() {
        let pts = vec![pt(0.3, 0.3), pt(0.1, 0.9), pt(0.9, 0.1), pt(0.6, 0.6)];
        let env = upper_concave_envelope(&pts, 1e-12);
        for w in env.windows(2) {
            assert!(w[0].r1 <= w[1].r1 && w[0].r2 >= w[1].r2);
        }
        assert!(!env.iter().any(|p| p.r1 == 0.3));
    }
}
