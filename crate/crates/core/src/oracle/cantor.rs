//! Middle-third Cantor construction truncated at a finite depth, and the
//! self-map of `[0,1]` whose fixed points are exactly that truncated set.

use serde::Serialize;

/// Deepest supported construction stage (`3^30` fits in `u64`).
pub const MAX_DEPTH: u32 = 30;

/// A removed open interval `(a, b) = ((3m+1)/3^s, (3m+2)/3^s)` of stage `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CantorInterval {
    /// Numerator of `a` over `denominator`.
    pub left: u64,
    /// `3^stage`.
    pub denominator: u64,
    pub stage: u32,
}

impl CantorInterval {
    pub fn a(&self) -> f64 {
        self.left as f64 / self.denominator as f64
    }

    pub fn b(&self) -> f64 {
        (self.left + 1) as f64 / self.denominator as f64
    }

    pub fn width(&self) -> f64 {
        1.0 / self.denominator as f64
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a() < x && x < self.b()
    }
}

/// The removed interval of stage `<= depth` containing `x`, if any.
pub fn containing_interval(x: f64, depth: u32) -> Option<CantorInterval> {
    let depth = depth.min(MAX_DEPTH);
    // surviving closed interval [lo, lo + 1] / 3^stage
    let mut lo = 0u64;
    let mut denominator = 1u64;
    for stage in 1..=depth {
        denominator *= 3;
        let base = 3 * lo;
        let interval = CantorInterval { left: base + 1, denominator, stage };
        if interval.contains(x) {
            return Some(interval);
        }
        lo = if x <= interval.a() { base } else { base + 2 };
    }
    None
}

/// Whether `x` survives the first `depth` middle-third removals.
pub fn in_truncated_cantor(x: f64, depth: u32) -> bool {
    (0.0..=1.0).contains(&x) && containing_interval(x, depth).is_none()
}

/// `g(x) = x` on the truncated Cantor set and `x + (x - a)(b - x)` on each
/// removed interval `(a, b)`.
pub fn cantor_g(x: f64, depth: u32) -> f64 {
    match containing_interval(x, depth) {
        Some(iv) => x + (x - iv.a()) * (iv.b() - x),
        None => x,
    }
}

/// All removed intervals of stage `<= depth`, ordered by stage then position.
pub fn removed_intervals(depth: u32) -> Vec<CantorInterval> {
    let depth = depth.min(MAX_DEPTH);
    let mut out = Vec::new();
    let mut survivors = vec![0u64];
    let mut denominator = 1u64;
    for stage in 1..=depth {
        denominator *= 3;
        let mut next = Vec::with_capacity(2 * survivors.len());
        for &lo in &survivors {
            out.push(CantorInterval { left: 3 * lo + 1, denominator, stage });
            next.push(3 * lo);
            next.push(3 * lo + 2);
        }
        survivors = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_examples() {
        assert_eq!(cantor_g(0.0, 8), 0.0);
        assert_eq!(cantor_g(1.0, 8), 1.0);
        let half = cantor_g(0.5, 8);
        assert!((half - 19.0 / 36.0).abs() < 1e-15, "{half}");
        // 1/4 = 0.020202... in base 3
        assert_eq!(cantor_g(0.25, 8), 0.25);
        assert!(in_truncated_cantor(0.25, 30));
        assert!(in_truncated_cantor(1.0 / 3.0, 8));
    }

    #[test]
    fn interval_count_and_measure() {
        let ivs = removed_intervals(6);
        assert_eq!(ivs.len(), (1 << 6) - 1);
        let removed: f64 = ivs.iter().map(CantorInterval::width).sum();
        let want = 1.0 - (2.0f64 / 3.0).powi(6);
        assert!((removed - want).abs() < 1e-12);
    }

    #[test]
    fn lookup_agrees_with_enumeration() {
        let ivs = removed_intervals(5);
        for i in 0..=2000 {
            let x = i as f64 / 2000.0;
            let scan = ivs.iter().find(|iv| iv.contains(x)).copied();
            assert_eq!(containing_interval(x, 5), scan, "x = {x}");
        }
    }

    #[test]
    fn g_dominates_identity_and_stays_in_range() {
        for i in 0..=4096 {
            let x = i as f64 / 4096.0;
            let g = cantor_g(x, 8);
            assert!(g >= x && g <= 1.0);
            assert_eq!(g == x, in_truncated_cantor(x, 8), "x = {x}");
        }
    }
}
