//! Separation of a box set without a spanning component into the part
//! connected to the face `t = 0` and the rest, with open neighborhoods of
//! both parts that are disjoint by exact arithmetic.

use serde::{Deserialize, Serialize};

use crate::components::{label_components, spanning_components};
use crate::error::{Error, Result};
use crate::geometry::{cell_side, dist_boxset_boxset, BoxSet, Dyadic, Point};
use crate::index::BoxIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    O0,
    O1,
}

/// `A0`: components touching `t = 0`; `A1`: everything else. `O0` and `O1`
/// are the open `margin`-neighborhoods of `A0` and `A1`.
#[derive(Clone, Debug)]
pub struct Separation {
    level: u32,
    a0: BoxSet,
    a1: BoxSet,
    gap: Option<Dyadic>,
    a0_index: BoxIndex,
    a1_index: BoxIndex,
}

impl Separation {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn a0(&self) -> &BoxSet {
        &self.a0
    }

    pub fn a1(&self) -> &BoxSet {
        &self.a1
    }

    pub fn side(&self, which: Side) -> &BoxSet {
        match which {
            Side::O0 => &self.a0,
            Side::O1 => &self.a1,
        }
    }

    /// Dilation radius `2^-(k+1)`.
    pub fn margin(&self) -> Dyadic {
        Dyadic::unit(self.level + 1)
    }

    /// Exact `dist(A0, A1)`; `None` when either side is empty.
    pub fn gap(&self) -> Option<Dyadic> {
        self.gap
    }

    pub(crate) fn index(&self, which: Side) -> &BoxIndex {
        match which {
            Side::O0 => &self.a0_index,
            Side::O1 => &self.a1_index,
        }
    }

    /// Distance from `p` to `A_which`; `None` when that side is empty.
    pub fn distance(&self, which: Side, p: &Point) -> Option<f64> {
        self.index(which).point_distance(p.coords())
    }
}

/// Split `set` into `A0` (components touching `t = 0`) and `A1`.
///
/// Fails if `set` has a spanning component. Distinct components share no
/// touching pair, so their index gap is at least one cell and
/// `dist(A0, A1) >= 2^-k`; this is re-verified exactly before returning.
pub fn split(set: &BoxSet) -> Result<Separation> {
    let labeling = label_components(set);
    if let Some(&id) = spanning_components(&labeling).first() {
        return Err(Error::SpanningComponent { id });
    }
    let a0 = labeling.select(|id| labeling.components()[id].touches_t0);
    let a1 = set.difference(&a0);
    let gap = if a0.is_empty() || a1.is_empty() { None } else { Some(dist_boxset_boxset(&a0, &a1)?) };
    if let Some(g) = gap {
        assert!(g >= Dyadic::unit(set.level()), "components closer than one cell: {g}");
    }
    Ok(Separation { level: set.level(), a0_index: BoxIndex::new(&a0), a1_index: BoxIndex::new(&a1), a0, a1, gap })
}

/// `d_inf(p, A_which) < 2^-(k+1)`. Always false for an empty side.
pub fn membership_o(sep: &Separation, which: Side, p: &Point) -> bool {
    sep.distance(which, p).is_some_and(|d| d < cell_side(sep.level + 1))
}
