//! Occupancy pyramid over a [`BoxSet`] for nearest-box queries.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::geometry::{box_gap_units, cell_side, dist_point_cell, BoxSet, Dyadic, DyadicBox};

/// For every level `l <= k`, the set of level-`l` cells that contain at least
/// one member of the indexed level-`k` set. Nearest-member queries run a
/// best-first descent from the root cell; cell distances are lower bounds on
/// member distances, so the first member popped is the nearest.
#[derive(Debug, Clone)]
pub struct BoxIndex {
    level: u32,
    dim: usize,
    occupied: Vec<HashSet<Box<[u32]>>>,
}

struct Entry<K> {
    key: K,
    level: u32,
    index: Box<[u32]>,
}

impl<K: PartialEq> PartialEq for Entry<K> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.level == other.level
    }
}

impl<K: PartialEq> Eq for Entry<K> {}

trait HeapKey: PartialEq {
    fn order(&self, other: &Self) -> Ordering;
}

impl HeapKey for f64 {
    fn order(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

impl HeapKey for u64 {
    fn order(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl<K: HeapKey> PartialOrd for Entry<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// min-heap on key; deeper nodes first on ties so leaves surface early
impl<K: HeapKey> Ord for Entry<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.order(&self.key).then(self.level.cmp(&other.level))
    }
}

impl BoxIndex {
    pub fn new(set: &BoxSet) -> Self {
        let level = set.level();
        let mut occupied: Vec<HashSet<Box<[u32]>>> = vec![HashSet::new(); level as usize + 1];
        for ix in set.indices() {
            for l in (0..=level).rev() {
                let shift = level - l;
                let anc: Box<[u32]> = ix.iter().map(|j| j >> shift).collect();
                if !occupied[l as usize].insert(anc) {
                    // coarser ancestors were inserted with this one
                    break;
                }
            }
        }
        BoxIndex { level, dim: set.dim(), occupied }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_empty(&self) -> bool {
        self.occupied[self.level as usize].is_empty()
    }

    pub fn contains(&self, index: &[u32]) -> bool {
        self.occupied[self.level as usize].contains(index)
    }

    fn push_children<K, F>(&self, heap: &mut BinaryHeap<Entry<K>>, level: u32, index: &[u32], key: F)
    where
        K: HeapKey,
        F: Fn(u32, &[u32]) -> K,
    {
        let child_level = level + 1;
        let occupied = &self.occupied[child_level as usize];
        let mut child = vec![0u32; self.dim];
        for mask in 0u32..1 << self.dim {
            for (i, c) in child.iter_mut().enumerate() {
                *c = 2 * index[i] + ((mask >> i) & 1);
            }
            if occupied.contains(child.as_slice()) {
                heap.push(Entry {
                    key: key(child_level, &child),
                    level: child_level,
                    index: child.clone().into_boxed_slice(),
                });
            }
        }
    }

    /// Max-norm distance from a point (given by coordinates) to the nearest
    /// member; `None` for an empty index.
    pub fn point_distance(&self, coords: &[f64]) -> Option<f64> {
        if self.is_empty() {
            return None;
        }
        debug_assert_eq!(coords.len(), self.dim);
        let cells = (1u64 << self.level) as f64;
        let home: Vec<u32> = coords.iter().map(|&c| ((c * cells).floor().clamp(0.0, cells - 1.0)) as u32).collect();
        if self.contains(&home) {
            return Some(0.0);
        }

        let key = |level: u32, ix: &[u32]| dist_point_cell(coords, ix, cell_side(level));
        let mut heap = BinaryHeap::new();
        let root: Box<[u32]> = vec![0; self.dim].into_boxed_slice();
        heap.push(Entry { key: 0.0f64, level: 0, index: root });
        while let Some(Entry { key: d, level, index }) = heap.pop() {
            if level == self.level {
                return Some(d);
            }
            self.push_children(&mut heap, level, &index, key);
        }
        unreachable!("nonempty pyramid always reaches a leaf")
    }

    /// Exact max-norm distance from a box (any level) to the nearest member.
    pub fn box_distance(&self, b: &DyadicBox) -> Option<Dyadic> {
        if self.is_empty() {
            return None;
        }
        debug_assert_eq!(b.dim(), self.dim);
        let exp = self.level.max(b.level());
        let key = |level: u32, ix: &[u32]| box_gap_units(b.index(), b.level(), ix, level, exp);
        let mut heap = BinaryHeap::new();
        let root: Box<[u32]> = vec![0; self.dim].into_boxed_slice();
        heap.push(Entry { key: 0u64, level: 0, index: root });
        while let Some(Entry { key: d, level, index }) = heap.pop() {
            if level == self.level {
                return Some(Dyadic::new(d, exp));
            }
            self.push_children(&mut heap, level, &index, key);
        }
        unreachable!("nonempty pyramid always reaches a leaf")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dist_point_boxset, Point};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_set(rng: &mut ChaCha8Rng, level: u32, dim: usize, count: usize) -> BoxSet {
        let cells = 1u32 << level;
        let mut s = BoxSet::new(level, dim).unwrap();
        for _ in 0..count {
            let ix = (0..dim).map(|_| rng.gen_range(0..cells)).collect();
            s.insert(DyadicBox::new(level, ix).unwrap()).unwrap();
        }
        s
    }

    #[test]
    fn point_queries_match_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..60 {
            let level = 1 + trial % 6;
            let dim = 2 + (trial as usize % 2);
            let count = 1 + rng.gen_range(0..20);
            let set = random_set(&mut rng, level, dim, count);
            let index = BoxIndex::new(&set);
            for _ in 0..50 {
                let coords: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
                let p = Point::from_coords(coords.clone()).unwrap();
                let want = dist_point_boxset(&p, &set).unwrap();
                assert_eq!(index.point_distance(&coords).unwrap(), want);
            }
        }
    }

    #[test]
    fn box_queries_match_pairwise_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let level = 1 + trial % 5;
            let count = 1 + rng.gen_range(0..12);
            let set = random_set(&mut rng, level, 2, count);
            let index = BoxIndex::new(&set);
            let qlevel = rng.gen_range(0..=level + 1);
            let q = random_set(&mut rng, qlevel, 2, 1).boxes().next().unwrap();
            let want = set.boxes().map(|b| b.distance(&q).unwrap()).min().unwrap();
            assert_eq!(index.box_distance(&q).unwrap(), want);
        }
    }

    #[test]
    fn empty_index_answers_none() {
        let index = BoxIndex::new(&BoxSet::new(3, 2).unwrap());
        assert!(index.point_distance(&[0.5, 0.5]).is_none());
    }
}
