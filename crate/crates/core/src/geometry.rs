//! Dyadic boxes, finite unions of boxes, and exact max-norm distances.
//!
//! A box at level `k` is stored as its integer index vector `(j_0, ..., j_n)`;
//! its realized set is `Π [j_i / 2^k, (j_i + 1) / 2^k]`. Coordinate 0 is the
//! parameter `t`, coordinates `1..=n` are the state `x`. All box-to-box and
//! box-set distances are computed in integer units and returned as [`Dyadic`]
//! values, so they are exact for every level up to [`MAX_LEVEL`].

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::BoxIndex;

/// Deepest supported subdivision level. `2^30` cells per axis keeps every
/// index in `u32` and every cross-level product in `u64`.
pub const MAX_LEVEL: u32 = 30;

pub(crate) fn check_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::LevelCap { level, max: MAX_LEVEL });
    }
    Ok(())
}

/// `2^-level` as an `f64` (exact).
pub fn cell_side(level: u32) -> f64 {
    (-(level as f64)).exp2()
}

/// A point `(t, x)` of `[0,1] × [0,1]^n`, stored as one coordinate vector
/// with `t` first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(t: f64, x: &[f64]) -> Result<Self> {
        let mut coords = Vec::with_capacity(x.len() + 1);
        coords.push(t);
        coords.extend_from_slice(x);
        Self::from_coords(coords)
    }

    pub fn from_coords(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a point needs a parameter and at least one state coordinate, got {} coordinates",
                coords.len()
            )));
        }
        for (axis, &value) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::PointOutOfDomain { axis, value });
            }
        }
        Ok(Self { coords })
    }

    pub fn t(&self) -> f64 {
        self.coords[0]
    }

    pub fn x(&self) -> &[f64] {
        &self.coords[1..]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Number of coordinates, `n + 1`.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Max-norm distance between two points.
pub fn dist_inf(p: &Point, q: &Point) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: q.dim() });
    }
    Ok(p.coords.iter().zip(&q.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Exact non-negative dyadic rational `num / 2^exp`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Dyadic {
    pub num: u64,
    pub exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };

    pub fn new(num: u64, exp: u32) -> Self {
        Dyadic { num, exp }.reduced()
    }

    /// `2^-exp`.
    pub fn unit(exp: u32) -> Self {
        Dyadic { num: 1, exp }
    }

    fn reduced(mut self) -> Self {
        if self.num == 0 {
            return Self::ZERO;
        }
        let shift = self.num.trailing_zeros().min(self.exp);
        self.num >>= shift;
        self.exp -= shift;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 * cell_side(self.exp)
    }

    fn widened(self, exp: u32) -> u128 {
        (self.num as u128) << (exp - self.exp)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.widened(exp).cmp(&other.widened(exp))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        if r.exp == 0 {
            write!(f, "{}", r.num)
        } else {
            write!(f, "{}/2^{}", r.num, r.exp)
        }
    }
}

/// A cell of the level-`k` dyadic grid on `[0,1]^(n+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicBox {
    level: u32,
    index: Vec<u32>,
}

impl DyadicBox {
    pub fn new(level: u32, index: Vec<u32>) -> Result<Self> {
        check_level(level)?;
        if index.len() < 2 {
            return Err(Error::InvalidArgument(format!("a box needs at least two coordinates, got {}", index.len())));
        }
        let cells = 1u64 << level;
        if let Some(&j) = index.iter().find(|&&j| u64::from(j) >= cells) {
            return Err(Error::IndexOutOfRange { level, index: j.into() });
        }
        Ok(Self { level, index })
    }

    pub(crate) fn from_parts(level: u32, index: Vec<u32>) -> Self {
        debug_assert!(index.iter().all(|&j| u64::from(j) < 1u64 << level));
        Self { level, index }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> &[u32] {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn side(&self) -> f64 {
        cell_side(self.level)
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.index[axis] as f64 * self.side()
    }

    pub fn upper(&self, axis: usize) -> f64 {
        (self.index[axis] as f64 + 1.0) * self.side()
    }

    pub fn center(&self) -> Point {
        let h = self.side();
        Point { coords: self.index.iter().map(|&j| (j as f64 + 0.5) * h).collect() }
    }

    /// Closed-box membership.
    pub fn contains_point(&self, p: &Point) -> bool {
        p.dim() == self.dim() && (0..self.dim()).all(|i| self.lower(i) <= p.coords[i] && p.coords[i] <= self.upper(i))
    }

    pub fn children(&self) -> Vec<DyadicBox> {
        children(self)
    }

    pub fn parent(&self) -> Option<DyadicBox> {
        (self.level > 0)
            .then(|| DyadicBox { level: self.level - 1, index: self.index.iter().map(|j| j >> 1).collect() })
    }

    /// The level-`level` box containing this one. `level` must not exceed
    /// `self.level()`.
    pub fn ancestor(&self, level: u32) -> DyadicBox {
        assert!(level <= self.level, "ancestor level must not exceed box level");
        let shift = self.level - level;
        DyadicBox { level, index: self.index.iter().map(|j| j >> shift).collect() }
    }

    /// Exact max-norm distance between the realized closed boxes. Levels may
    /// differ.
    pub fn distance(&self, other: &DyadicBox) -> Result<Dyadic> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let exp = self.level.max(other.level);
        let gap = box_gap_units(&self.index, self.level, &other.index, other.level, exp);
        Ok(Dyadic::new(gap, exp))
    }
}

/// Max-norm gap between two index boxes, in units of `2^-exp`.
pub(crate) fn box_gap_units(a: &[u32], la: u32, b: &[u32], lb: u32, exp: u32) -> u64 {
    let (sa, sb) = (exp - la, exp - lb);
    a.iter()
        .zip(b)
        .map(|(&ja, &jb)| {
            let (a_lo, a_hi) = ((ja as u64) << sa, ((ja as u64) + 1) << sa);
            let (b_lo, b_hi) = ((jb as u64) << sb, ((jb as u64) + 1) << sb);
            b_lo.saturating_sub(a_hi).max(a_lo.saturating_sub(b_hi))
        })
        .max()
        .unwrap_or(0)
}

/// The `2^(n+1)` boxes one level down that tile `b`.
pub fn children(b: &DyadicBox) -> Vec<DyadicBox> {
    let d = b.dim();
    (0u32..1 << d)
        .map(|mask| DyadicBox {
            level: b.level + 1,
            index: b.index.iter().enumerate().map(|(i, &j)| 2 * j + ((mask >> (d - 1 - i)) & 1)).collect(),
        })
        .collect()
}

/// Whether two same-level closed boxes intersect (face, edge, or corner
/// contact included).
pub fn boxes_touch(a: &DyadicBox, b: &DyadicBox) -> Result<bool> {
    if a.level != b.level {
        return Err(Error::LevelMismatch { expected: a.level, found: b.level });
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(a.index.iter().zip(&b.index).all(|(&x, &y)| x.abs_diff(y) <= 1))
}

/// Max-norm distance from a point to a closed box.
pub fn dist_point_box(p: &Point, b: &DyadicBox) -> f64 {
    dist_point_cell(p.coords(), b.index(), b.side())
}

pub(crate) fn dist_point_cell(coords: &[f64], index: &[u32], side: f64) -> f64 {
    coords
        .iter()
        .zip(index)
        .map(|(&c, &j)| {
            let lo = j as f64 * side;
            let hi = lo + side;
            (lo - c).max(c - hi).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// A finite union of boxes of one level, ordered lexicographically by index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSet {
    level: u32,
    dim: usize,
    cells: BTreeSet<Vec<u32>>,
}

impl BoxSet {
    /// An empty set of level-`level` boxes in `[0,1]^dim`.
    pub fn new(level: u32, dim: usize) -> Result<Self> {
        check_level(level)?;
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("box sets need dimension >= 2, got {dim}")));
        }
        Ok(Self { level, dim, cells: BTreeSet::new() })
    }

    pub fn from_boxes<I>(level: u32, dim: usize, boxes: I) -> Result<Self>
    where
        I: IntoIterator<Item = DyadicBox>,
    {
        let mut set = Self::new(level, dim)?;
        for b in boxes {
            set.insert(b)?;
        }
        Ok(set)
    }

    /// Every box of the level-`level` grid.
    pub fn full_grid(level: u32, dim: usize) -> Result<Self> {
        let mut set = Self::new(level, dim)?;
        set.cells = GridIter::new(level, dim).collect();
        Ok(set)
    }

    /// Insert a box; rejects level and dimension mismatches. Duplicate
    /// inserts are no-ops.
    pub fn insert(&mut self, b: DyadicBox) -> Result<bool> {
        if b.level != self.level {
            return Err(Error::LevelMismatch { expected: self.level, found: b.level });
        }
        if b.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: b.dim() });
        }
        Ok(self.cells.insert(b.index))
    }

    pub(crate) fn insert_index(&mut self, index: Vec<u32>) {
        debug_assert_eq!(index.len(), self.dim);
        self.cells.insert(index);
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of coordinates, `n + 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, index: &[u32]) -> bool {
        self.cells.contains(index)
    }

    /// Member indices in lexicographic order.
    pub fn indices(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.cells.iter().map(Vec::as_slice)
    }

    pub fn boxes(&self) -> impl Iterator<Item = DyadicBox> + '_ {
        self.cells.iter().map(|ix| DyadicBox::from_parts(self.level, ix.clone()))
    }

    /// The same realized set expressed with boxes of a finer level.
    pub fn refine_to(&self, level: u32) -> Result<BoxSet> {
        check_level(level)?;
        if level < self.level {
            return Err(Error::LevelMismatch { expected: self.level, found: level });
        }
        let shift = level - self.level;
        let per_axis = 1u32 << shift;
        let mut out = BoxSet::new(level, self.dim)?;
        for ix in &self.cells {
            for offset in GridIter::with_extent(per_axis, self.dim) {
                let child = ix.iter().zip(&offset).map(|(&j, &o)| (j << shift) + o).collect();
                out.cells.insert(child);
            }
        }
        Ok(out)
    }

    /// Subset of members satisfying `keep`.
    pub fn filter<F>(&self, mut keep: F) -> BoxSet
    where
        F: FnMut(&[u32]) -> bool,
    {
        BoxSet { level: self.level, dim: self.dim, cells: self.cells.iter().filter(|ix| keep(ix)).cloned().collect() }
    }

    /// Whether every realized box of `finer` lies inside the realized union of
    /// `self` (exact integer containment).
    pub fn covers(&self, finer: &BoxSet) -> bool {
        if finer.level < self.level || finer.dim != self.dim {
            return false;
        }
        let shift = finer.level - self.level;
        finer.cells.iter().all(|ix| {
            let anc: Vec<u32> = ix.iter().map(|j| j >> shift).collect();
            self.cells.contains(&anc)
        })
    }

    pub fn union(&self, other: &BoxSet) -> Result<BoxSet> {
        if other.level != self.level {
            return Err(Error::LevelMismatch { expected: self.level, found: other.level });
        }
        let mut out = self.clone();
        out.cells.extend(other.cells.iter().cloned());
        Ok(out)
    }

    pub fn difference(&self, other: &BoxSet) -> BoxSet {
        self.filter(|ix| !other.contains(ix))
    }
}

/// Lexicographic enumeration of all index vectors in `[0, extent)^dim`.
pub(crate) struct GridIter {
    extent: u32,
    next: Option<Vec<u32>>,
}

impl GridIter {
    pub(crate) fn new(level: u32, dim: usize) -> Self {
        Self::with_extent(1u32 << level, dim)
    }

    pub(crate) fn with_extent(extent: u32, dim: usize) -> Self {
        let next = (extent > 0).then(|| vec![0; dim]);
        GridIter { extent, next }
    }
}

impl Iterator for GridIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.extent {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

/// Max-norm distance from `p` to the realized union of `a`.
pub fn dist_point_boxset(p: &Point, a: &BoxSet) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySet("dist_point_boxset"));
    }
    if p.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: p.dim() });
    }
    let side = cell_side(a.level);
    Ok(a.indices().map(|ix| dist_point_cell(p.coords(), ix, side)).fold(f64::INFINITY, f64::min))
}

/// Exact max-norm distance between the realized unions of two box sets.
pub fn dist_boxset_boxset(a: &BoxSet, b: &BoxSet) -> Result<Dyadic> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("dist_boxset_boxset"));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let index = BoxIndex::new(large);
    let mut best = Dyadic::new(u64::MAX >> 2, 0);
    for bx in small.boxes() {
        let d = index.box_distance(&bx).expect("index is nonempty");
        if d < best {
            best = d;
            if best.is_zero() {
                break;
            }
        }
    }
    Ok(best)
}

/// `sup_{y in a} d_inf(y, b)`, exact.
///
/// Both sets are brought to the common level `L`. On each level-`L` cell the
/// distance to a union of level-`L` cells is piecewise linear with breakpoints
/// on the half-cell lattice, so the supremum is attained at a lattice point of
/// level `L + 1`.
pub fn directed_hausdorff(a: &BoxSet, b: &BoxSet) -> Result<Dyadic> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("hausdorff"));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let level = a.level.max(b.level);
    check_level(level + 1)?;
    let a = a.refine_to(level)?;
    let b_fine = b.refine_to(level)?;
    let index = BoxIndex::new(&b_fine);
    let half = cell_side(level + 1);
    let scale = (level + 1) as i32;

    let mut worst = 0.0f64;
    let mut coords = vec![0.0; a.dim()];
    for ix in a.indices() {
        if b_fine.contains(ix) {
            continue;
        }
        for offset in GridIter::with_extent(3, a.dim()) {
            for ((c, &j), &o) in coords.iter_mut().zip(ix).zip(&offset) {
                *c = (2 * j + o) as f64 * half;
            }
            let d = index.point_distance(&coords).expect("b is non-empty");
            if d > worst {
                worst = d;
            }
        }
    }
    // lattice coordinates are exact dyadics, so the float result is too
    let num = (worst * (scale as f64).exp2()).round() as u64;
    Ok(Dyadic::new(num, level + 1))
}

/// Hausdorff distance between the realized unions of two box sets (levels
/// may differ).
pub fn hausdorff(a: &BoxSet, b: &BoxSet) -> Result<Dyadic> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}
