//! Two-parameter problems reduced to one parameter through the Hilbert curve.
//!
//! With `φ : [0,1] → [0,1]^2` continuous and onto, `h(t, x) = f(φ(t), x)` is a
//! one-parameter oracle. A component of fixed points of `h` spanning `[0, 1]`
//! in `t` maps under `φ` onto all of `[0, 1]^2`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{BoxSet, Point};
use crate::oracle::{Modulus, Oracle};

/// Largest supported curve order; `4^m` cells must index into `u64` and the
/// matching trace level `2m` must stay under the level cap.
pub const MAX_ORDER: u32 = 15;

/// Hilbert index `d` to cell `(x, y)` on the `2^order` grid. The curve starts
/// in cell `(0, 0)` and ends in cell `(2^order - 1, 0)`.
pub fn d2xy(order: u32, d: u64) -> (u32, u32) {
    let (mut x, mut y) = (0u64, 0u64);
    let mut t = d;
    let mut s = 1u64;
    while s < (1u64 << order) {
        let rx = 1 & (t / 2);
        let ry = 1 & (t ^ rx);
        rotate(s, &mut x, &mut y, rx, ry);
        x += s * rx;
        y += s * ry;
        t /= 4;
        s *= 2;
    }
    (x as u32, y as u32)
}

/// Inverse of [`d2xy`].
pub fn xy2d(order: u32, x: u32, y: u32) -> u64 {
    let n = 1u64 << order;
    let (mut x, mut y) = (u64::from(x), u64::from(y));
    let mut d = 0;
    let mut s = n / 2;
    while s > 0 {
        let rx = u64::from(x & s > 0);
        let ry = u64::from(y & s > 0);
        d += s * s * ((3 * rx) ^ ry);
        rotate(n, &mut x, &mut y, rx, ry);
        s /= 2;
    }
    d
}

fn rotate(n: u64, x: &mut u64, y: &mut u64, rx: u64, ry: u64) {
    if ry == 0 {
        if rx == 1 {
            *x = n - 1 - *x;
            *y = n - 1 - *y;
        }
        std::mem::swap(x, y);
    }
}

/// Order-`m` Hilbert polygon.
///
/// `φ(i/4^m)` is the corner where the limit curve enters cell `i`, so the
/// polygon agrees with the limit curve on every dyadic of level `2m` and
/// visits the cells in curve order. Between those parameters it is linear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpaceFillingCurve {
    order: u32,
}

impl SpaceFillingCurve {
    /// Hölder constant: `d_inf(φ(s), φ(t)) <= C·|s - t|^(1/2)`.
    pub const HOLDER: f64 = 3.0;

    pub fn new(order: u32) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!("curve order must be in 1..={MAX_ORDER}, got {order}")));
        }
        Ok(SpaceFillingCurve { order })
    }

    /// Default order `floor(k_max / 2)`, so that level `k_max` columns fit
    /// inside single curve cells.
    pub fn for_depth(k_max: u32) -> Result<Self> {
        Self::new(k_max / 2)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn cells(&self) -> u64 {
        1u64 << (2 * self.order)
    }

    /// `C·ρ^(1/2)`.
    pub fn modulus(&self, rho: f64) -> f64 {
        Self::HOLDER * rho.max(0.0).sqrt()
    }

    /// Entry corner of cell `i`, or `(1, 0)` for `i = 4^m`.
    pub fn vertex(&self, i: u64) -> (f64, f64) {
        if i >= self.cells() {
            return (1.0, 0.0);
        }
        let (x, y) = d2xy(self.order, i);
        // the first quarter of cell i at the next order holds its entry corner
        let (fx, fy) = d2xy(self.order + 1, 4 * i);
        let scale = (self.order as f64).exp2();
        ((f64::from(x) + f64::from(fx - 2 * x)) / scale, (f64::from(y) + f64::from(fy - 2 * y)) / scale)
    }
}

impl fmt::Display for SpaceFillingCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hilbert-{}", self.order)
    }
}

/// `φ(t)`, clamped to `[0, 1]`.
pub fn curve_eval(c: &SpaceFillingCurve, t: f64) -> (f64, f64) {
    let t = t.clamp(0.0, 1.0);
    let s = t * c.cells() as f64;
    let i = (s.floor() as u64).min(c.cells());
    let frac = s - i as f64;
    let (x0, y0) = c.vertex(i);
    if frac == 0.0 {
        return (x0, y0);
    }
    let (x1, y1) = c.vertex(i + 1);
    (x0 + frac * (x1 - x0), y0 + frac * (y1 - y0))
}

/// A continuous map `[0,1]^2 × [0,1]^n → [0,1]^n` with a modulus in the max
/// norm over all `2 + n` coordinates.
pub trait TwoParamOracle: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn evaluate(&self, u: f64, v: f64, x: &[f64]) -> Vec<f64>;
    fn modulus(&self, rho: f64) -> f64;
    fn modulus_description(&self) -> String;
}

/// `f((u, v), x) = (1 - u)·x + u·v` in every coordinate. Fixed points are
/// everything at `u = 0` and `x = (v, ..., v)` for `u > 0`.
#[derive(Debug, Clone)]
pub struct LinearHomotopy2 {
    name: String,
    n: usize,
}

impl LinearHomotopy2 {
    pub fn new(n: usize) -> Self {
        let name = if n == 1 { "homotopy2".to_string() } else { format!("homotopy2-{n}d") };
        LinearHomotopy2 { name, n }
    }
}

impl TwoParamOracle for LinearHomotopy2 {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn evaluate(&self, u: f64, v: f64, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&xi| (1.0 - u) * xi + u * v).collect()
    }
    // |Δ| <= |Δu|·|x - v| + (1 - u)·|Δx| + u·|Δv|
    fn modulus(&self, rho: f64) -> f64 {
        3.0 * rho.max(0.0)
    }
    fn modulus_description(&self) -> String {
        Modulus::lipschitz(3.0).to_string()
    }
}

/// Resolve a two-parameter corpus name: `homotopy2` or `homotopy2-<n>d`.
pub fn lookup_two_param(name: &str) -> Result<Arc<dyn TwoParamOracle>> {
    let unknown = || Error::InvalidArgument(format!("unknown two-parameter function `{name}`"));
    if name == "homotopy2" {
        return Ok(Arc::new(LinearHomotopy2::new(1)));
    }
    let n: usize = name
        .strip_prefix("homotopy2-")
        .and_then(|r| r.strip_suffix('d'))
        .and_then(|r| r.parse().ok())
        .ok_or_else(unknown)?;
    if n == 0 {
        return Err(unknown());
    }
    Ok(Arc::new(LinearHomotopy2::new(n)))
}

/// `h(t, x) = f(φ(t), x)` with `ω_h(ρ) = ω_f(max(C·ρ^(1/2), ρ))`.
#[derive(Debug, Clone)]
pub struct LiftedOracle {
    name: String,
    base: Arc<dyn TwoParamOracle>,
    curve: SpaceFillingCurve,
}

impl LiftedOracle {
    pub fn base(&self) -> &Arc<dyn TwoParamOracle> {
        &self.base
    }

    pub fn curve(&self) -> SpaceFillingCurve {
        self.curve
    }
}

pub fn lift(base: Arc<dyn TwoParamOracle>, curve: SpaceFillingCurve) -> LiftedOracle {
    LiftedOracle { name: format!("{}@{curve}", base.name()), base, curve }
}

impl Oracle for LiftedOracle {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn evaluate(&self, p: &Point) -> Vec<f64> {
        let (u, v) = curve_eval(&self.curve, p.t());
        self.base.evaluate(u, v, p.x())
    }
    fn modulus(&self, rho: f64) -> f64 {
        self.base.modulus(self.curve.modulus(rho).max(rho))
    }
    fn modulus_description(&self) -> String {
        format!(
            "omega_f(max({}*sqrt(rho), rho)), omega_f(rho) = {}",
            SpaceFillingCurve::HOLDER,
            self.base.modulus_description()
        )
    }
}

/// Parameter cells at curve order `m` hit by the columns of a level-`k` set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellCoverage {
    pub order: u32,
    pub cells: BTreeSet<(u32, u32)>,
}

impl CellCoverage {
    pub fn total(&self) -> u64 {
        1u64 << (2 * self.order)
    }

    pub fn is_full(&self) -> bool {
        self.cells.len() as u64 == self.total()
    }

    pub fn contains(&self, u: u32, v: u32) -> bool {
        self.cells.contains(&(u, v))
    }
}

/// Column `j_0` at level `k >= 2m` spans parameters inside curve cell
/// `j_0 >> (k - 2m)`, which `φ` maps into a single grid cell.
pub fn pushforward(c: &SpaceFillingCurve, component: &BoxSet) -> Result<CellCoverage> {
    let k = component.level();
    if k < 2 * c.order() {
        return Err(Error::CurveTooCoarse { k, order: c.order() });
    }
    let shift = k - 2 * c.order();
    let columns: BTreeSet<u32> = component.indices().map(|ix| ix[0]).collect();
    let cells = columns.into_iter().map(|j0| d2xy(c.order(), u64::from(j0 >> shift))).collect();
    Ok(CellCoverage { order: c.order(), cells })
}
