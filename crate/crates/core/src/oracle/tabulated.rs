//! Oracle defined by a table of node values on a uniform dyadic grid,
//! interpolated multilinearly.
//!
//! File format (JSON):
//!
//! ```json
//! {
//!   "name": "ramp",
//!   "n": 1,
//!   "level": 4,
//!   "t_range": [0.0, 0.25],
//!   "lipschitz": 4.0,
//!   "values": [[0.0], [0.0625], ...]
//! }
//! ```
//!
//! Nodes sit at multiples of `2^-level` on every axis. The parameter axis
//! spans `t_range` (default `[0, 1]`, endpoints must be node positions); state
//! axes span `[0, 1]`. `values` lists one `n`-vector per node in lexicographic
//! `(t, x_1, ..., x_n)` order. The declared modulus is a max-norm Lipschitz
//! constant, checked on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Modulus, Oracle};
use crate::error::{Error, Result};
use crate::geometry::{cell_side, check_level, GridIter, Point};

const LOAD_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub name: String,
    pub n: usize,
    pub level: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_range: Option<[f64; 2]>,
    pub lipschitz: f64,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct TabulatedOracle {
    name: String,
    n: usize,
    level: u32,
    t_range: (f64, f64),
    lipschitz: f64,
    /// Node counts per axis, `t` first.
    counts: Vec<usize>,
    /// Flat node values, `n` per node.
    values: Vec<f64>,
}

impl TabulatedOracle {
    pub fn from_table(table: TableFile) -> Result<Self> {
        let TableFile { name, n, level, t_range, lipschitz, values } = table;
        check_level(level)?;
        if n == 0 {
            return Err(Error::Table("n must be positive".into()));
        }
        if !(lipschitz.is_finite() && lipschitz >= 0.0) {
            return Err(Error::Table(format!("lipschitz must be finite and nonnegative, got {lipschitz}")));
        }
        let h = cell_side(level);
        let (t_lo, t_hi) = match t_range {
            Some([lo, hi]) => (lo, hi),
            None => (0.0, 1.0),
        };
        let on_grid = |v: f64| (v / h).fract() == 0.0;
        if !(0.0 <= t_lo && t_lo < t_hi && t_hi <= 1.0 && on_grid(t_lo) && on_grid(t_hi)) {
            return Err(Error::Table(format!(
                "t_range [{t_lo}, {t_hi}] must be a nonempty subinterval of [0, 1] with endpoints on the 2^-{level} grid"
            )));
        }
        let per_axis = (1usize << level) + 1;
        let mut counts = vec![((t_hi - t_lo) / h) as usize + 1];
        counts.resize(n + 1, per_axis);
        let nodes: usize = counts.iter().product();
        if values.len() != nodes {
            return Err(Error::Table(format!("expected {nodes} node values, found {}", values.len())));
        }
        let mut flat = Vec::with_capacity(nodes * n);
        for (node, v) in values.iter().enumerate() {
            if v.len() != n {
                return Err(Error::Table(format!("node {node} has {} values, expected {n}", v.len())));
            }
            if let Some(bad) = v.iter().find(|c| !(0.0..=1.0).contains(*c)) {
                return Err(Error::Table(format!("node {node} value {bad} lies outside [0, 1]")));
            }
            flat.extend_from_slice(v);
        }
        let oracle = TabulatedOracle { name, n, level, t_range: (t_lo, t_hi), lipschitz, counts, values: flat };
        oracle.check_lipschitz()?;
        Ok(oracle)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_table(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Tabulate `f` at the nodes of the `2^-level` grid.
    pub fn sample<F>(name: &str, n: usize, level: u32, t_range: Option<[f64; 2]>, lipschitz: f64, f: F) -> Result<Self>
    where
        F: Fn(&Point) -> Vec<f64>,
    {
        Self::from_table(Self::sample_table(name, n, level, t_range, lipschitz, f)?)
    }

    pub fn sample_table<F>(
        name: &str,
        n: usize,
        level: u32,
        t_range: Option<[f64; 2]>,
        lipschitz: f64,
        f: F,
    ) -> Result<TableFile>
    where
        F: Fn(&Point) -> Vec<f64>,
    {
        check_level(level)?;
        let h = cell_side(level);
        let [t_lo, t_hi] = t_range.unwrap_or([0.0, 1.0]);
        let t_nodes = ((t_hi - t_lo) / h).round() as u32 + 1;
        let x_nodes = (1u32 << level) + 1;
        let mut values = Vec::new();
        for t in 0..t_nodes {
            for x in GridIter::with_extent(x_nodes, n) {
                let mut coords = vec![t_lo + t as f64 * h];
                coords.extend(x.iter().map(|&j| j as f64 * h));
                values.push(f(&Point::from_coords(coords)?));
            }
        }
        Ok(TableFile { name: name.to_string(), n, level, t_range, lipschitz, values })
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn node_offset(&self, node: &[usize]) -> usize {
        node.iter().zip(&self.counts).fold(0, |acc, (&i, &c)| acc * c + i) * self.n
    }

    fn node_position(&self, node: &[usize]) -> Vec<f64> {
        let h = cell_side(self.level);
        node.iter()
            .enumerate()
            .map(|(axis, &i)| if axis == 0 { self.t_range.0 + i as f64 * h } else { i as f64 * h })
            .collect()
    }

    /// Within each cell the interpolant's max-norm Lipschitz constant is at
    /// most the sum over axes of the largest edge difference along that axis,
    /// divided by the spacing; the declared constant must dominate it.
    fn check_lipschitz(&self) -> Result<()> {
        let h = cell_side(self.level);
        let d = self.counts.len();
        let cell_counts: Vec<u32> = self.counts.iter().map(|&c| (c - 1) as u32).collect();
        let mut corner = vec![0usize; d];
        let mut other = vec![0usize; d];
        for cell in CellIter::new(&cell_counts) {
            let mut total = 0.0;
            let mut worst: Option<(f64, Vec<usize>, Vec<usize>)> = None;
            for axis in 0..d {
                let mut axis_max = 0.0f64;
                for mask in 0u32..1 << d {
                    if mask >> axis & 1 == 1 {
                        continue;
                    }
                    for i in 0..d {
                        corner[i] = cell[i] as usize + (mask >> i & 1) as usize;
                    }
                    other.copy_from_slice(&corner);
                    other[axis] += 1;
                    let (a, b) = (self.node_offset(&corner), self.node_offset(&other));
                    let diff = (0..self.n).map(|k| (self.values[a + k] - self.values[b + k]).abs()).fold(0.0, f64::max);
                    if diff > axis_max {
                        axis_max = diff;
                    }
                    if worst.as_ref().filter(|w| diff <= w.0).is_none() {
                        worst = Some((diff, corner.clone(), other.clone()));
                    }
                }
                total += axis_max;
            }
            if total / h > self.lipschitz * (1.0 + LOAD_TOLERANCE) + LOAD_TOLERANCE {
                let (diff, a, b) = worst.expect("cells have edges");
                return Err(Error::Table(format!(
                    "declared lipschitz {} violated in cell {:?}: local constant {}; largest jump {} between nodes {:?} and {:?}",
                    self.lipschitz,
                    cell,
                    total / h,
                    diff,
                    self.node_position(&a),
                    self.node_position(&b),
                )));
            }
        }
        Ok(())
    }

    fn interpolate(&self, coords: &[f64]) -> Vec<f64> {
        let h = cell_side(self.level);
        let d = self.counts.len();
        let mut base = vec![0usize; d];
        let mut weight = vec![0.0f64; d];
        for axis in 0..d {
            let origin = if axis == 0 { self.t_range.0 } else { 0.0 };
            let u = (coords[axis] - origin) / h;
            let cell = (u.floor().max(0.0) as usize).min(self.counts[axis] - 2);
            base[axis] = cell;
            weight[axis] = u - cell as f64;
        }
        let mut out = vec![0.0; self.n];
        let mut node = vec![0usize; d];
        for mask in 0u32..1 << d {
            let mut w = 1.0;
            for axis in 0..d {
                let bit = mask >> axis & 1;
                node[axis] = base[axis] + bit as usize;
                w *= if bit == 1 { weight[axis] } else { 1.0 - weight[axis] };
            }
            if w == 0.0 {
                continue;
            }
            let off = self.node_offset(&node);
            for (o, v) in out.iter_mut().zip(&self.values[off..off + self.n]) {
                *o += w * v;
            }
        }
        out
    }
}

impl Oracle for TabulatedOracle {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn evaluate(&self, p: &Point) -> Vec<f64> {
        let t = p.t();
        if t < self.t_range.0 || t > self.t_range.1 {
            return vec![f64::NAN; self.n];
        }
        self.interpolate(p.coords())
    }

    fn modulus(&self, rho: f64) -> f64 {
        self.lipschitz * rho
    }

    fn modulus_description(&self) -> String {
        Modulus::lipschitz(self.lipschitz).to_string()
    }

    fn t_domain(&self) -> (f64, f64) {
        self.t_range
    }
}

/// Lexicographic enumeration of cell indices with per-axis extents.
struct CellIter<'a> {
    extents: &'a [u32],
    next: Option<Vec<u32>>,
}

impl<'a> CellIter<'a> {
    fn new(extents: &'a [u32]) -> Self {
        let next = extents.iter().all(|&e| e > 0).then(|| vec![0; extents.len()]);
        CellIter { extents, next }
    }
}

impl Iterator for CellIter<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.extents[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{evaluate_checked, example1};

    #[test]
    fn constant_table_is_constant() {
        let o = TabulatedOracle::sample("half", 1, 3, None, 0.0, |_| vec![0.5]).unwrap();
        for &(t, x) in &[(0.0, 0.0), (0.3, 0.71), (1.0, 1.0)] {
            assert_eq!(o.evaluate(&Point::new(t, &[x]).unwrap()), vec![0.5]);
        }
    }

    #[test]
    fn reproduces_multilinear_functions() {
        let f = |p: &Point| vec![0.25 * p.t() + 0.5 * p.x()[0] * (1.0 - p.t()) + 0.125];
        let o = TabulatedOracle::sample("bilinear", 1, 2, None, 1.0, f).unwrap();
        for &(t, x) in &[(0.1, 0.9), (0.5, 0.5), (0.99, 0.01)] {
            let p = Point::new(t, &[x]).unwrap();
            assert!((o.evaluate(&p)[0] - f(&p)[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip() {
        let table = TabulatedOracle::sample_table("id", 1, 2, Some([0.0, 0.5]), 1.0, |p| p.x().to_vec()).unwrap();
        let text = serde_json::to_string(&table).unwrap();
        let o = TabulatedOracle::from_json(&text).unwrap();
        assert_eq!(o.t_domain(), (0.0, 0.5));
        let p = Point::new(0.25, &[0.375]).unwrap();
        assert_eq!(o.evaluate(&p), vec![0.375]);
        let outside = Point::new(0.75, &[0.375]).unwrap();
        assert!(evaluate_checked(&o, &outside).is_err());
    }

    #[test]
    fn modulus_violation_names_nodes() {
        let step = |p: &Point| vec![if p.x()[0] < 0.5 { 0.0 } else { 1.0 }];
        let err = TabulatedOracle::sample("step", 1, 3, None, 1.0, step).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("between nodes [0.0, 0.375] and [0.0, 0.5]"), "{msg}");
    }

    #[test]
    fn schema_errors() {
        assert!(TabulatedOracle::from_json(r#"{"name":"x","n":1,"level":1,"lipschitz":1,"values":[]}"#).is_err());
        let bad_key = r#"{"name":"x","n":1,"level":0,"lipschitz":1,"values":[[0],[0],[0],[0]],"extra":1}"#;
        assert!(TabulatedOracle::from_json(bad_key).is_err());
        let out_of_range = r#"{"name":"x","n":1,"level":0,"lipschitz":9,"values":[[0],[0],[0],[2]]}"#;
        assert!(TabulatedOracle::from_json(out_of_range).is_err());
    }

    #[test]
    fn declared_constant_must_cover_the_table() {
        // sampled sine example: differences across cells near t = 0 are large
        let f = |p: &Point| vec![example1(p.t(), p.x()[0])];
        assert!(TabulatedOracle::sample("ex1", 1, 6, None, 2.0, f).is_err());
        assert!(TabulatedOracle::sample("ex1", 1, 6, None, 40.0, f).is_ok());
    }
}
