//! Parametric self-maps `f : [0,1] × [0,1]^n → [0,1]^n` with a declared
//! modulus of continuity, and the built-in corpus.

pub mod cantor;
pub mod tabulated;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

pub use cantor::{cantor_g, CantorInterval};
pub use tabulated::TabulatedOracle;

/// Default truncation depth of the Cantor construction.
pub const DEFAULT_CANTOR_DEPTH: u32 = 8;

/// A black-box continuous map together with a modulus `ω` such that
/// `d_inf(f(p), f(q)) <= ω(d_inf(p, q))`.
///
/// Implementations must be pure: identical inputs give identical outputs, and
/// concurrent calls need no coordination.
pub trait Oracle: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// Dimension `n` of the state space.
    fn dim(&self) -> usize;

    /// `f(t, x)`; callers validate the result with [`evaluate_checked`].
    fn evaluate(&self, p: &Point) -> Vec<f64>;

    /// `ω(ρ)`: nondecreasing, `ω(0) = 0`.
    fn modulus(&self, rho: f64) -> f64;

    /// Human-readable form of the modulus.
    fn modulus_description(&self) -> String;

    /// Parameter interval on which the oracle is defined. The tracer requires
    /// the full `[0, 1]`.
    fn t_domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

/// Evaluate and enforce the oracle contract: `n` finite outputs in `[0, 1]`.
pub fn evaluate_checked(oracle: &dyn Oracle, p: &Point) -> Result<Vec<f64>> {
    if p.dim() != oracle.dim() + 1 {
        return Err(Error::DimensionMismatch { expected: oracle.dim() + 1, found: p.dim() });
    }
    let y = oracle.evaluate(p);
    if y.len() != oracle.dim() {
        return Err(Error::OracleContract {
            oracle: oracle.name().to_string(),
            detail: format!("returned {} coordinates, expected {}", y.len(), oracle.dim()),
        });
    }
    if let Some((i, v)) = y.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::OracleContract {
            oracle: oracle.name().to_string(),
            detail: format!("output coordinate {i} = {v} at {:?} lies outside [0, 1]", p.coords()),
        });
    }
    Ok(y)
}

/// `d_inf(f(p), x_p)`.
pub fn residual(oracle: &dyn Oracle, p: &Point) -> Result<f64> {
    let y = evaluate_checked(oracle, p)?;
    Ok(y.iter().zip(p.x()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `ω(ρ) = sqrt·ρ^(1/2) + linear·ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Modulus {
    pub sqrt: f64,
    pub linear: f64,
}

impl Modulus {
    pub const ZERO: Modulus = Modulus { sqrt: 0.0, linear: 0.0 };

    pub fn lipschitz(l: f64) -> Self {
        Modulus { sqrt: 0.0, linear: l }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let rho = rho.max(0.0);
        self.sqrt * rho.sqrt() + self.linear * rho
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.sqrt == 0.0, self.linear == 0.0) {
            (true, true) => write!(f, "0"),
            (true, false) => write!(f, "{}*rho", self.linear),
            (false, true) => write!(f, "{}*sqrt(rho)", self.sqrt),
            (false, false) => write!(f, "{}*sqrt(rho) + {}*rho", self.sqrt, self.linear),
        }
    }
}

/// `f(t, x) = x`.
#[derive(Debug, Clone)]
pub struct Identity {
    name: String,
    n: usize,
}

impl Identity {
    pub fn new(n: usize) -> Self {
        let name = if n == 1 { "identity".to_string() } else { format!("identity-{n}d") };
        Identity { name, n }
    }
}

impl Oracle for Identity {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn evaluate(&self, p: &Point) -> Vec<f64> {
        p.x().to_vec()
    }
    fn modulus(&self, rho: f64) -> f64 {
        rho
    }
    fn modulus_description(&self) -> String {
        Modulus::lipschitz(1.0).to_string()
    }
}

/// `f(t, x) = c`.
#[derive(Debug, Clone)]
pub struct Constant {
    name: String,
    value: Vec<f64>,
}

impl Constant {
    pub fn new(value: Vec<f64>) -> Result<Self> {
        check_unit_vector(&value)?;
        let name = format!("constant-{}", join(&value));
        Ok(Constant { name, value })
    }
}

impl Oracle for Constant {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.value.len()
    }
    fn evaluate(&self, _p: &Point) -> Vec<f64> {
        self.value.clone()
    }
    fn modulus(&self, _rho: f64) -> f64 {
        0.0
    }
    fn modulus_description(&self) -> String {
        Modulus::ZERO.to_string()
    }
}

/// `f(t, x) = (1 - t)·x + t·c`: the identity at `t = 0`, the constant `c` at
/// `t = 1`. Fixed points are the whole column `t = 0` plus `x = c` for `t > 0`.
#[derive(Debug, Clone)]
pub struct LinearHomotopy {
    name: String,
    target: Vec<f64>,
    modulus: Modulus,
}

impl LinearHomotopy {
    pub fn new(target: Vec<f64>) -> Result<Self> {
        check_unit_vector(&target)?;
        let name = format!("homotopy-{}", join(&target));
        // |Δ| <= |Δx| + |Δt|·|c - x'|
        let spread = target.iter().map(|&c| c.max(1.0 - c)).fold(0.0, f64::max);
        Ok(LinearHomotopy { name, target, modulus: Modulus::lipschitz(1.0 + spread) })
    }
}

impl Oracle for LinearHomotopy {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.target.len()
    }
    fn evaluate(&self, p: &Point) -> Vec<f64> {
        let t = p.t();
        p.x().iter().zip(&self.target).map(|(&x, &c)| (1.0 - t) * x + t * c).collect()
    }
    fn modulus(&self, rho: f64) -> f64 {
        self.modulus.eval(rho)
    }
    fn modulus_description(&self) -> String {
        self.modulus.to_string()
    }
}

/// The sine-curve example on its natural domain `X = [-1, 1]`:
/// `x` at `t = 0`, `(1 - t)·x + t·sin(1/t)` otherwise.
pub fn example1_natural(t: f64, x: f64) -> f64 {
    if t == 0.0 {
        x
    } else {
        (1.0 - t) * x + t * (1.0 / t).sin()
    }
}

/// [`example1_natural`] conjugated by the affine map `[0,1] → [-1,1]`,
/// `y = 2x - 1`. Simplifies to `(1 - t)·x + t·(1 + sin(1/t))/2`; exactly `x`
/// at `t = 0`.
pub fn example1(t: f64, x: f64) -> f64 {
    if t == 0.0 {
        x
    } else {
        (1.0 - t) * x + 0.5 * t * (1.0 + (1.0 / t).sin())
    }
}

/// Fixed point of [`example1`] at `t > 0`, on the rescaled domain.
pub fn example1_fixed_point(t: f64) -> f64 {
    0.5 * (1.0 + (1.0 / t).sin())
}

/// The sine-curve oracle on `[0,1]`. Its fixed-point set is the full column
/// `t = 0` together with the graph of [`example1_fixed_point`].
///
/// Modulus `ω(ρ) = ρ^(1/2) + 3ρ`: the affine part contributes `2ρ + ρ/2`, and
/// `h(t) = t·sin(1/t)` satisfies `|h(t) - h(s)| <= 2δ^(1/2) + δ` for
/// `δ = |t - s| <= 1` (split at `min(t, s) = δ^(1/2)`: above it use
/// `|h'| <= 1 + 1/t`, below it bound both values by their arguments), halved
/// by the rescaling.
#[derive(Debug, Clone)]
pub struct Example1 {
    modulus: Modulus,
}

impl Default for Example1 {
    fn default() -> Self {
        Example1 { modulus: Modulus { sqrt: 1.0, linear: 3.0 } }
    }
}

impl Oracle for Example1 {
    fn name(&self) -> &str {
        "example1"
    }
    fn dim(&self) -> usize {
        1
    }
    fn evaluate(&self, p: &Point) -> Vec<f64> {
        vec![example1(p.t(), p.x()[0]).clamp(0.0, 1.0)]
    }
    fn modulus(&self, rho: f64) -> f64 {
        self.modulus.eval(rho)
    }
    fn modulus_description(&self) -> String {
        self.modulus.to_string()
    }
}

/// `f(t, x) = g(x)` for the Cantor map [`cantor_g`] truncated at `depth`.
/// Lipschitz with constant `4/3`: on a removed interval of width `w`,
/// `g' = 1 + (a + b - 2x)` ranges over `[1 - w, 1 + w]` and `w <= 1/3`.
#[derive(Debug, Clone)]
pub struct Example2 {
    name: String,
    depth: u32,
}

impl Example2 {
    pub fn new(depth: u32) -> Result<Self> {
        if depth == 0 || depth > cantor::MAX_DEPTH {
            return Err(Error::InvalidArgument(format!(
                "cantor depth must lie in 1..={}, got {depth}",
                cantor::MAX_DEPTH
            )));
        }
        Ok(Example2 { name: format!("example2-d{depth}"), depth })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }
}

impl Oracle for Example2 {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        1
    }
    fn evaluate(&self, p: &Point) -> Vec<f64> {
        vec![example2(p.t(), p.x()[0], self.depth)]
    }
    fn modulus(&self, rho: f64) -> f64 {
        4.0 / 3.0 * rho
    }
    fn modulus_description(&self) -> String {
        Modulus::lipschitz(4.0 / 3.0).to_string()
    }
}

/// The Cantor example: ignores `t`.
pub fn example2(_t: f64, x: f64, depth: u32) -> f64 {
    cantor_g(x, depth)
}

fn check_unit_vector(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidArgument("vector must have at least one coordinate".into()));
    }
    if let Some(c) = v.iter().find(|c| !(0.0..=1.0).contains(*c)) {
        return Err(Error::InvalidArgument(format!("coordinate {c} lies outside [0, 1]")));
    }
    Ok(())
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// The built-in one-parameter corpus.
pub fn corpus() -> Vec<Arc<dyn Oracle>> {
    let mut out: Vec<Arc<dyn Oracle>> = vec![
        Arc::new(Identity::new(1)),
        Arc::new(Identity::new(2)),
        Arc::new(Constant::new(vec![0.5]).unwrap()),
        Arc::new(Constant::new(vec![0.2]).unwrap()),
        Arc::new(Constant::new(vec![0.5, 0.25]).unwrap()),
        Arc::new(LinearHomotopy::new(vec![0.5]).unwrap()),
        Arc::new(LinearHomotopy::new(vec![0.3]).unwrap()),
        Arc::new(Example1::default()),
    ];
    for depth in 4..=DEFAULT_CANTOR_DEPTH {
        out.push(Arc::new(Example2::new(depth).unwrap()));
    }
    out
}

/// Resolve a corpus name.
///
/// Accepted forms: `identity`, `identity-<n>d`, `constant-<c,...>`,
/// `homotopy-<c,...>`, `example1`, `example2` (uses `cantor_depth`),
/// `example2-d<depth>`.
pub fn lookup(name: &str, cantor_depth: u32) -> Result<Arc<dyn Oracle>> {
    let unknown = || Error::InvalidArgument(format!("unknown function `{name}`"));
    let parse_vec = |s: &str| -> Result<Vec<f64>> {
        s.split(',').map(|c| c.trim().parse::<f64>().map_err(|_| unknown())).collect()
    };
    Ok(match name {
        "identity" => Arc::new(Identity::new(1)),
        "example1" => Arc::new(Example1::default()),
        "example2" => Arc::new(Example2::new(cantor_depth)?),
        "constant" => Arc::new(Constant::new(vec![0.5])?),
        "homotopy" => Arc::new(LinearHomotopy::new(vec![0.5])?),
        _ => {
            if let Some(rest) = name.strip_prefix("identity-").and_then(|r| r.strip_suffix('d')) {
                let n: usize = rest.parse().map_err(|_| unknown())?;
                if n == 0 {
                    return Err(unknown());
                }
                Arc::new(Identity::new(n))
            } else if let Some(rest) = name.strip_prefix("constant-") {
                Arc::new(Constant::new(parse_vec(rest)?)?)
            } else if let Some(rest) = name.strip_prefix("homotopy-") {
                Arc::new(LinearHomotopy::new(parse_vec(rest)?)?)
            } else if let Some(rest) = name.strip_prefix("example2-d") {
                Arc::new(Example2::new(rest.parse().map_err(|_| unknown())?)?)
            } else {
                return Err(unknown());
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist_inf;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn example1_values() {
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(example1(0.0, x), x);
            assert_eq!(example1_natural(0.0, 2.0 * x - 1.0), 2.0 * x - 1.0);
        }
        assert!((example1_natural(1.0, 0.4) - 0.841_470_984_807_896_5).abs() < 1e-15);
        let t = 2.0 / PI;
        assert!((example1_natural(t, 0.0) - 2.0 / PI).abs() < 1e-15);
        // rescaling is a conjugacy
        for &(t, x) in &[(0.3, 0.2), (0.01, 0.9), (0.77, 0.5)] {
            let via_natural = (example1_natural(t, 2.0 * x - 1.0) + 1.0) / 2.0;
            assert!((example1(t, x) - via_natural).abs() < 1e-15);
        }
    }

    #[test]
    fn example2_values() {
        for t in [0.0, 0.4, 1.0] {
            assert_eq!(example2(t, 0.0, 8), 0.0);
        }
        assert!((example2(0.7, 0.5, 8) - 19.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn example2_fixed_slice_is_truncated_cantor_set() {
        // residual scan on a 2^-12 grid against the enumerated intervals
        let depth = 6;
        let ivs = cantor::removed_intervals(depth);
        for i in 0..=4096u32 {
            let x = i as f64 / 4096.0;
            let fixed = example2(0.3, x, depth) == x;
            let removed = ivs.iter().any(|iv| iv.contains(x));
            assert_eq!(fixed, !removed, "x = {x}");
        }
    }

    #[test]
    fn homotopy_fixed_points() {
        let h = LinearHomotopy::new(vec![0.5]).unwrap();
        for i in 1..=64 {
            let t = i as f64 / 64.0;
            let p = Point::new(t, &[0.5]).unwrap();
            assert!(residual(&h, &p).unwrap() < 1e-15);
            let q = Point::new(t, &[0.25]).unwrap();
            assert!(residual(&h, &q).unwrap() > 0.0);
        }
        let p = Point::new(0.0, &[0.9]).unwrap();
        assert_eq!(residual(&h, &p).unwrap(), 0.0);
    }

    #[test]
    fn identity_and_constant_fixed_sets() {
        let id = Identity::new(1);
        let c = Constant::new(vec![0.5]).unwrap();
        for i in 0..=16 {
            let p = Point::new(i as f64 / 16.0, &[(16 - i) as f64 / 16.0]).unwrap();
            assert_eq!(residual(&id, &p).unwrap(), 0.0);
            assert_eq!(residual(&c, &p).unwrap() == 0.0, p.x()[0] == 0.5);
        }
    }

    #[test]
    fn declared_moduli_hold_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for oracle in corpus() {
            let d = oracle.dim() + 1;
            for _ in 0..10_000 {
                let p = Point::from_coords((0..d).map(|_| rng.gen()).collect()).unwrap();
                // half the pairs close together, where sqrt moduli are tightest
                let scale = if rng.gen_bool(0.5) { 1e-3 } else { 1.0 };
                let q = Point::from_coords(
                    p.coords().iter().map(|&c| (c + scale * (rng.gen::<f64>() - 0.5)).clamp(0.0, 1.0)).collect(),
                )
                .unwrap();
                let fp = evaluate_checked(oracle.as_ref(), &p).unwrap();
                let fq = evaluate_checked(oracle.as_ref(), &q).unwrap();
                let out = fp.iter().zip(&fq).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let rho = dist_inf(&p, &q).unwrap();
                assert!(
                    out <= oracle.modulus(rho) + 1e-9,
                    "{}: {out} > ω({rho}) = {}",
                    oracle.name(),
                    oracle.modulus(rho)
                );
            }
        }
    }

    #[test]
    fn example1_modulus_near_origin() {
        // the sqrt term matters only close to t = 0
        let f = Example1::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20_000 {
            let t = rng.gen::<f64>() * 0.05;
            let s = (t + rng.gen::<f64>() * 1e-3).min(1.0);
            let x = rng.gen::<f64>();
            let p = Point::new(t, &[x]).unwrap();
            let q = Point::new(s, &[x]).unwrap();
            let out = (f.evaluate(&p)[0] - f.evaluate(&q)[0]).abs();
            assert!(out <= f.modulus(s - t) + 1e-12);
        }
    }

    #[test]
    fn lookup_resolves_names() {
        assert_eq!(lookup("identity", 8).unwrap().name(), "identity");
        assert_eq!(lookup("identity-3d", 8).unwrap().dim(), 3);
        assert_eq!(lookup("example2", 5).unwrap().name(), "example2-d5");
        assert_eq!(lookup("constant-0.5,0.25", 8).unwrap().dim(), 2);
        assert_eq!(lookup("homotopy-0.3", 8).unwrap().name(), "homotopy-0.3");
        assert!(lookup("nope", 8).is_err());
        assert!(lookup("constant-1.5", 8).is_err());
        assert!(lookup("example2-d0", 8).is_err());
    }

    #[test]
    fn contract_violation_is_reported() {
        #[derive(Debug)]
        struct Escapes;
        impl Oracle for Escapes {
            fn name(&self) -> &str {
                "escapes"
            }
            fn dim(&self) -> usize {
                1
            }
            fn evaluate(&self, p: &Point) -> Vec<f64> {
                vec![p.x()[0] + 2.0]
            }
            fn modulus(&self, rho: f64) -> f64 {
                rho
            }
            fn modulus_description(&self) -> String {
                "rho".into()
            }
        }
        let p = Point::new(0.5, &[0.5]).unwrap();
        assert!(matches!(evaluate_checked(&Escapes, &p), Err(Error::OracleContract { .. })));
    }
}
