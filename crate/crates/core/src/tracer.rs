//! One-evaluation exclusion certificates for dyadic boxes, and the level-`k`
//! candidate set built from them (an outer approximation of the union of
//! boxes meeting the fixed-point set).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{cell_side, check_level, BoxSet, DyadicBox, GridIter};
use crate::oracle::{residual, Oracle};

/// Added to the certificate threshold so that float rounding in the center
/// residual cannot turn a boundary case into an exclusion.
pub const ROUNDING_GUARD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// The realized box provably holds no fixed point.
    Excluded,
    /// No claim.
    Candidate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxClassification {
    pub cell: DyadicBox,
    pub verdict: Verdict,
    /// `d_inf(f(c), x_c)` at the box center `c`.
    pub residual: f64,
}

/// Certificate slack at level `k`: `ω(ρ) + ρ` with `ρ = 2^-(k+1)`, the
/// max-norm center-to-corner radius.
pub fn certificate_slack(oracle: &dyn Oracle, level: u32) -> f64 {
    let rho = cell_side(level + 1);
    oracle.modulus(rho) + rho
}

fn require_full_domain(oracle: &dyn Oracle) -> Result<()> {
    if oracle.t_domain() != (0.0, 1.0) {
        return Err(Error::InvalidArgument(format!(
            "oracle `{}` is defined only for t in [{}, {}]; tracing needs [0, 1]",
            oracle.name(),
            oracle.t_domain().0,
            oracle.t_domain().1
        )));
    }
    Ok(())
}

/// For every `p` in the box with center `c`,
/// `d(f(p), x_p) >= d(f(c), x_c) - ω(ρ) - ρ`; the box is excluded when the
/// right-hand side is positive.
pub fn classify_box(oracle: &dyn Oracle, cell: &DyadicBox) -> Result<BoxClassification> {
    check_level(cell.level())?;
    if cell.dim() != oracle.dim() + 1 {
        return Err(Error::DimensionMismatch { expected: oracle.dim() + 1, found: cell.dim() });
    }
    let residual = residual(oracle, &cell.center())?;
    let threshold = certificate_slack(oracle, cell.level()) + ROUNDING_GUARD;
    let verdict = if residual > threshold { Verdict::Excluded } else { Verdict::Candidate };
    Ok(BoxClassification { cell: cell.clone(), verdict, residual })
}

/// Classify every box of the level-`k` grid, or only the children of
/// `restrict_to` (a level `k - 1` set). Output is in lexicographic order.
pub fn classify_level(oracle: &dyn Oracle, level: u32, restrict_to: Option<&BoxSet>) -> Result<Vec<BoxClassification>> {
    check_level(level)?;
    require_full_domain(oracle)?;
    let dim = oracle.dim() + 1;
    let cells: Vec<DyadicBox> = match restrict_to {
        None => GridIter::new(level, dim).map(|ix| DyadicBox::from_parts(level, ix)).collect(),
        Some(parent) => {
            if level == 0 || parent.level() != level - 1 {
                return Err(Error::LevelMismatch { expected: level.saturating_sub(1), found: parent.level() });
            }
            if parent.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: parent.dim() });
            }
            // children of lexicographically ordered parents are not globally
            // ordered, so sort
            let mut cells: Vec<DyadicBox> = parent.boxes().flat_map(|b| b.children()).collect();
            cells.sort_unstable();
            cells
        }
    };
    cells.par_iter().map(|c| classify_box(oracle, c)).collect()
}

/// The candidate boxes at level `k`: a superset of the level-`k` boxes (within
/// the enumerated region) that contain fixed points.
pub fn build_level(oracle: &dyn Oracle, level: u32, restrict_to: Option<&BoxSet>) -> Result<BoxSet> {
    let dim = oracle.dim() + 1;
    let classified = classify_level(oracle, level, restrict_to)?;
    candidates_of(level, dim, &classified)
}

pub(crate) fn candidates_of(level: u32, dim: usize, classified: &[BoxClassification]) -> Result<BoxSet> {
    let mut out = BoxSet::new(level, dim)?;
    for c in classified.iter().filter(|c| c.verdict == Verdict::Candidate) {
        out.insert_index(c.cell.index().to_vec());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{Constant, Identity};

    fn bx(level: u32, index: &[u32]) -> DyadicBox {
        DyadicBox::new(level, index.to_vec()).unwrap()
    }

    #[test]
    fn identity_boxes_are_candidates() {
        let id = Identity::new(1);
        for ix in [[0, 0], [3, 1], [2, 3]] {
            let c = classify_box(&id, &bx(2, &ix)).unwrap();
            assert_eq!(c.verdict, Verdict::Candidate);
            assert_eq!(c.residual, 0.0);
        }
        assert_eq!(build_level(&id, 1, None).unwrap().len(), 4);
    }

    #[test]
    fn constant_half_examples() {
        let c = Constant::new(vec![0.5]).unwrap();
        let low = classify_box(&c, &bx(2, &[1, 0])).unwrap();
        assert_eq!(low.verdict, Verdict::Excluded);
        assert_eq!(low.residual, 0.375);
        let mid = classify_box(&c, &bx(2, &[1, 2])).unwrap();
        assert_eq!(mid.verdict, Verdict::Candidate);
        assert_eq!(mid.residual, 0.125);
    }

    #[test]
    fn constant_half_level_three_columns() {
        // fixed set is x = 1/2; slack is 2^-4, so exactly the two cells with a
        // face on x = 1/2 survive in every column
        let c = Constant::new(vec![0.5]).unwrap();
        let s = build_level(&c, 3, None).unwrap();
        assert_eq!(s.len(), 16);
        for ix in s.indices() {
            assert!(ix[1] == 3 || ix[1] == 4, "{ix:?}");
        }
    }

    #[test]
    fn full_grid_enumeration_count() {
        let id = Identity::new(2);
        assert_eq!(classify_level(&id, 2, None).unwrap().len(), 1 << (2 * 3));
    }

    #[test]
    fn restriction_stays_inside_children() {
        let c = Constant::new(vec![0.5]).unwrap();
        let parent = build_level(&c, 2, None).unwrap();
        let child = build_level(&c, 3, Some(&parent)).unwrap();
        assert!(parent.covers(&child));
        let wrong = build_level(&c, 4, Some(&parent));
        assert!(matches!(wrong, Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn excluded_implies_residual_above_slack() {
        let c = Constant::new(vec![0.2]).unwrap();
        for cl in classify_level(&c, 5, None).unwrap() {
            if cl.verdict == Verdict::Excluded {
                assert!(cl.residual > certificate_slack(&c, 5));
            }
        }
    }
}
