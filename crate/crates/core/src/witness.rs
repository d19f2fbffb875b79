//! The fixed-point-free map built from a separation.
//!
//! Given a claimed fixed-point set `C` split into `A0`/`A1`, the sets
//! `B1 = ({0} × X) ∪ (C ∩ O0)` and `B-1 = ({1} × X) ∪ (C ∩ O1)` are closed and
//! disjoint, and
//!
//! ```text
//! g(p) = 1 on B1,  -1 on B-1,  (d(p, B-1) - d(p, B1)) / (d(p, B-1) + d(p, B1)) elsewhere
//! F(t, x) = (t + ε·g(t, x), f(t, x))
//! ```
//!
//! maps the domain into itself. `F` moves every point of `C` by `ε` in `t`,
//! so if `C` really contained every fixed point of `f`, `F` would have none.
//! Sampling the domain for approximate fixed points of `f` where `|g| < 1`
//! therefore exhibits fixed points that `C` misses.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{cell_side, dist_boxset_boxset, BoxSet, Dyadic, Point};
use crate::index::BoxIndex;
use crate::oracle::Oracle;
use crate::sampling::Halton;
use crate::separator::{membership_o, split, Separation, Side};

/// Stored refutation points are capped; the count is not.
pub const MAX_REPORTED_REFUTATIONS: usize = 10_000;

/// Seed perturbation for the claimed-set sample stream.
const CLAIMED_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// Step size `2^-(k+2)`.
///
/// Every `A1` box has `j_0 >= 1` (otherwise its component would touch
/// `t = 0`), so the non-face part of `B-1` has `t >= 2^-k - 2^-(k+2)`. For
/// `t <= 2^-(k+2)` that gives `d(p, B1) <= t <= d(p, B-1)`, hence `g >= 0`,
/// hence `t + ε·g >= 0`; for larger `t`, `t + ε·g >= t - ε >= 0`. The bound at
/// `t = 1` is symmetric.
pub fn choose_epsilon(sep: &Separation) -> Dyadic {
    Dyadic::unit(sep.level() + 2)
}

#[derive(Debug, Clone)]
pub struct SeparationWitness {
    separation: Separation,
    claimed: BoxSet,
    b1: BoxSet,
    bm1: BoxSet,
    b1_index: BoxIndex,
    bm1_index: BoxIndex,
    dropped: usize,
    epsilon: Dyadic,
    delta: Dyadic,
    oracle: Arc<dyn Oracle>,
}

impl SeparationWitness {
    /// Build `B1`/`B-1` from a separation of level `k` and a claimed set of
    /// the same level.
    ///
    /// Claimed boxes inside `A0` (`A1`) go to `B1` (`B-1`) whole. Any other
    /// claimed box is split to level `k + 2` and each piece is kept on the side
    /// it touches; pieces touching neither lie outside `O0 ∪ O1` and are
    /// dropped. Kept pieces are within `2^-(k+2)` of their side, so
    /// `dist(B1, B-1) >= 2^-(k+1)`.
    pub fn new(separation: Separation, claimed: BoxSet, oracle: Arc<dyn Oracle>) -> Result<Self> {
        let k = separation.level();
        if claimed.level() != k {
            return Err(Error::LevelMismatch { expected: k, found: claimed.level() });
        }
        if claimed.dim() != oracle.dim() + 1 {
            return Err(Error::DimensionMismatch { expected: oracle.dim() + 1, found: claimed.dim() });
        }
        let fine = k + 2;
        let mut b1 = BoxSet::new(fine, claimed.dim())?;
        let mut bm1 = BoxSet::new(fine, claimed.dim())?;
        let mut dropped = 0;
        let a0_index = separation.index(Side::O0);
        let a1_index = separation.index(Side::O1);
        for cell in claimed.boxes() {
            let whole = BoxSet::from_boxes(k, claimed.dim(), [cell.clone()])?.refine_to(fine)?;
            if separation.a0().contains(cell.index()) {
                for piece in whole.boxes() {
                    b1.insert(piece)?;
                }
            } else if separation.a1().contains(cell.index()) {
                for piece in whole.boxes() {
                    bm1.insert(piece)?;
                }
            } else {
                for piece in whole.boxes() {
                    if a0_index.box_distance(&piece).is_some_and(|d| d.is_zero()) {
                        b1.insert(piece)?;
                    } else if a1_index.box_distance(&piece).is_some_and(|d| d.is_zero()) {
                        bm1.insert(piece)?;
                    } else {
                        dropped += 1;
                    }
                }
            }
        }
        let delta = face_aware_distance(&b1, &bm1)?;
        let epsilon = choose_epsilon(&separation);
        Ok(SeparationWitness {
            b1_index: BoxIndex::new(&b1),
            bm1_index: BoxIndex::new(&bm1),
            separation,
            claimed,
            b1,
            bm1,
            dropped,
            epsilon,
            delta,
            oracle,
        })
    }

    /// Split `claimed` and build the witness against it.
    pub fn for_claim(claimed: BoxSet, oracle: Arc<dyn Oracle>) -> Result<Self> {
        let separation = split(&claimed)?;
        Self::new(separation, claimed, oracle)
    }

    pub fn separation(&self) -> &Separation {
        &self.separation
    }

    pub fn claimed(&self) -> &BoxSet {
        &self.claimed
    }

    /// Non-face part of `B1`, at level `k + 2`.
    pub fn b1(&self) -> &BoxSet {
        &self.b1
    }

    /// Non-face part of `B-1`, at level `k + 2`.
    pub fn bm1(&self) -> &BoxSet {
        &self.bm1
    }

    /// Claimed level-`k+2` pieces outside both neighborhoods.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn epsilon(&self) -> Dyadic {
        self.epsilon
    }

    /// `dist(B1, B-1)`, faces included.
    pub fn delta(&self) -> Dyadic {
        self.delta
    }

    pub fn oracle(&self) -> &Arc<dyn Oracle> {
        &self.oracle
    }

    /// Residual threshold for approximate fixed points:
    /// `ω(2^-(k+2)) + 2^-(k+2)`.
    pub fn tau(&self) -> f64 {
        let r = cell_side(self.separation.level() + 2);
        self.oracle.modulus(r) + r
    }

    /// Tolerance on `|g|`: `g` is `(2/δ)`-Lipschitz, so a point within
    /// `2^-(k+2)` of `B1 ∪ B-1` has `|g| >= 1 - (2/δ)·2^-(k+2)`.
    pub fn tau_g(&self) -> f64 {
        2.0 / self.delta.to_f64() * cell_side(self.separation.level() + 2)
    }

    pub fn distance_b1(&self, p: &Point) -> f64 {
        let face = p.t();
        self.b1_index.point_distance(p.coords()).map_or(face, |d| d.min(face))
    }

    pub fn distance_bm1(&self, p: &Point) -> f64 {
        let face = 1.0 - p.t();
        self.bm1_index.point_distance(p.coords()).map_or(face, |d| d.min(face))
    }
}

/// Exact `dist(({0} × X) ∪ B1, ({1} × X) ∪ B-1)`.
fn face_aware_distance(b1: &BoxSet, bm1: &BoxSet) -> Result<Dyadic> {
    let level = b1.level();
    let cells = 1u64 << level;
    let mut best = Dyadic::new(1, 0);
    if !b1.is_empty() && !bm1.is_empty() {
        best = best.min(dist_boxset_boxset(b1, bm1)?);
    }
    if let Some(lowest) = bm1.indices().map(|ix| ix[0]).min() {
        best = best.min(Dyadic::new(lowest.into(), level));
    }
    if let Some(highest) = b1.indices().map(|ix| ix[0]).max() {
        best = best.min(Dyadic::new(cells - 1 - u64::from(highest), level));
    }
    Ok(best)
}

/// The distance-quotient extension: `1` on `B1`, `-1` on `B-1`.
pub fn g_eval(w: &SeparationWitness, p: &Point) -> f64 {
    let d1 = w.distance_b1(p);
    if d1 == 0.0 {
        return 1.0;
    }
    let dm1 = w.distance_bm1(p);
    if dm1 == 0.0 {
        return -1.0;
    }
    (dm1 - d1) / (dm1 + d1)
}

/// Raw coordinates of `F(p)`, without the range check.
pub fn f_values(w: &SeparationWitness, p: &Point) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.dim());
    out.push(p.t() + w.epsilon.to_f64() * g_eval(w, p));
    out.extend(w.oracle.evaluate(p));
    out
}

/// `F(t, x) = (t + ε·g(t, x), f(t, x))`.
pub fn f_eval(w: &SeparationWitness, p: &Point) -> Result<Point> {
    let values = f_values(w, p);
    Point::from_coords(values.clone()).map_err(|_| Error::OracleContract {
        oracle: w.oracle.name().to_string(),
        detail: format!("F({:?}) = {values:?} leaves the domain", p.coords()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refutation {
    pub point: Vec<f64>,
    pub residual: f64,
    pub g: f64,
    pub in_o0: bool,
    pub in_o1: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessVerdict {
    /// Sampled approximate fixed points of `f` escape the claimed set.
    Refuted,
    /// No sampled approximate fixed point escapes.
    Clean,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub seed: u64,
    pub samples: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub tau: f64,
    pub tau_g: f64,
    /// Domain samples whose `F` value left `[0,1]^(n+1)`.
    pub range_violations: usize,
    /// Smallest distance from a sampled `F` value to the domain boundary.
    pub min_range_slack: f64,
    pub approximate_fixed_points: usize,
    pub refutation_count: usize,
    pub refutations: Vec<Refutation>,
    pub claimed_samples: usize,
    /// Claimed-set samples with `|g| = 1`.
    pub claimed_unit_g: usize,
    /// Smallest `d_inf(F(p), p)` over claimed-set samples with `|g| = 1`.
    pub min_claimed_displacement: Option<f64>,
    /// Claimed-set samples with `|g| = 1` displaced by less than `ε`.
    pub displacement_violations: usize,
    pub verdict: WitnessVerdict,
}

struct DomainSample {
    slack: f64,
    approximate: bool,
    refutation: Option<Refutation>,
}

struct ClaimedSample {
    unit_g: bool,
    displacement: f64,
}

/// Check the witness on `samples` seeded low-discrepancy points of the
/// oracle's domain and `samples` points of the claimed set.
///
/// Domain points with residual `<= τ` count as approximate fixed points; one
/// that lies outside `O0 ∪ O1`, or where `|g| < 1 - τ_g`, is a refutation of
/// the claim that `C` covers every fixed point.
pub fn verify_witness(w: &SeparationWitness, samples: usize, seed: u64) -> Result<WitnessReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let dim = w.claimed.dim();
    let (t_lo, t_hi) = w.oracle.t_domain();
    let tau = w.tau();
    let tau_g = w.tau_g();
    let eps = w.epsilon.to_f64();
    let sep = &w.separation;

    let domain = Halton::new(dim, seed);
    let domain_results: Vec<DomainSample> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut coords = domain.point(i);
            coords[0] = t_lo + coords[0] * (t_hi - t_lo);
            let p = Point::from_coords(coords).expect("samples lie in the unit cube");
            let values = f_values(w, &p);
            let slack = values.iter().map(|&v| v.min(1.0 - v)).fold(f64::INFINITY, f64::min);
            let residual = values[1..].iter().zip(p.x()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            // NaN residuals fail the comparison and are never approximate
            let approximate = residual <= tau;
            let refutation = approximate
                .then(|| {
                    let g = g_eval(w, &p);
                    let in_o0 = membership_o(sep, Side::O0, &p);
                    let in_o1 = membership_o(sep, Side::O1, &p);
                    let escaped = !(in_o0 || in_o1) || g.abs() < 1.0 - tau_g;
                    escaped.then(|| Refutation { point: p.coords().to_vec(), residual, g, in_o0, in_o1 })
                })
                .flatten();
            DomainSample { slack: if slack.is_nan() { f64::NEG_INFINITY } else { slack }, approximate, refutation }
        })
        .collect();

    let claimed_boxes: Vec<_> = w.claimed.boxes().filter(|b| b.lower(0) >= t_lo && b.upper(0) <= t_hi).collect();
    let claimed_results: Vec<ClaimedSample> = if claimed_boxes.is_empty() {
        Vec::new()
    } else {
        let stream = Halton::new(dim, seed ^ CLAIMED_STREAM);
        (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let cell = &claimed_boxes[i as usize % claimed_boxes.len()];
                let h = cell.side();
                let coords: Vec<f64> =
                    stream.point(i).iter().zip(cell.index()).map(|(u, &j)| (j as f64 + u) * h).collect();
                let p = Point::from_coords(coords).expect("claimed boxes lie in the unit cube");
                let g = g_eval(w, &p);
                let values = f_values(w, &p);
                let displacement = values.iter().zip(p.coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                ClaimedSample { unit_g: g.abs() == 1.0, displacement }
            })
            .collect()
    };

    let mut refutations = Vec::new();
    let mut refutation_count = 0;
    let mut range_violations = 0;
    let mut min_range_slack = f64::INFINITY;
    let mut approximate_fixed_points = 0;
    for s in domain_results {
        min_range_slack = min_range_slack.min(s.slack);
        if s.slack < 0.0 {
            range_violations += 1;
        }
        approximate_fixed_points += usize::from(s.approximate);
        if let Some(r) = s.refutation {
            refutation_count += 1;
            if refutations.len() < MAX_REPORTED_REFUTATIONS {
                refutations.push(r);
            }
        }
    }

    let mut claimed_unit_g = 0;
    let mut min_claimed_displacement: Option<f64> = None;
    let mut displacement_violations = 0;
    for s in &claimed_results {
        if s.unit_g {
            claimed_unit_g += 1;
            min_claimed_displacement = Some(min_claimed_displacement.map_or(s.displacement, |m| m.min(s.displacement)));
            if s.displacement < eps {
                displacement_violations += 1;
            }
        }
    }

    Ok(WitnessReport {
        seed,
        samples,
        epsilon: eps,
        delta: w.delta.to_f64(),
        tau,
        tau_g,
        range_violations,
        min_range_slack,
        approximate_fixed_points,
        refutation_count,
        refutations,
        claimed_samples: claimed_results.len(),
        claimed_unit_g,
        min_claimed_displacement,
        displacement_violations,
        verdict: if refutation_count > 0 { WitnessVerdict::Refuted } else { WitnessVerdict::Clean },
    })
}
