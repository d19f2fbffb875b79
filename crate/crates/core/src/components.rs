//! Connected components of unions of closed boxes.
//!
//! Two same-level closed boxes intersect iff their indices differ by at most
//! one in every coordinate, so the components of the realized union are the
//! classes of the transitive closure of that relation.

use std::collections::HashMap;

use serde::Serialize;

use crate::geometry::{BoxSet, GridIter};

/// Disjoint-set forest with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind { parent: (0..len).collect(), size: vec![1; len] }
    }

    pub fn find(&mut self, id: usize) -> usize {
        let mut root = id;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut id = id;
        while self.parent[id] != root {
            let next = self.parent[id];
            self.parent[id] = root;
            id = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    /// `{0} × X`
    T0,
    /// `{1} × X`
    T1,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentInfo {
    pub id: usize,
    pub size: usize,
    pub touches_t0: bool,
    pub touches_t1: bool,
    pub spanning: bool,
    /// Sorted, distinct parameter columns `j_0` occupied by the component.
    #[serde(skip)]
    pub columns: Vec<u32>,
}

/// Partition of a [`BoxSet`] into touching-connected components. Component
/// ids are dense and assigned in lexicographic order of each component's
/// first box.
#[derive(Clone, Debug)]
pub struct ComponentLabeling {
    boxset: BoxSet,
    /// Label of each member, in the set's lexicographic order.
    labels: Vec<usize>,
    components: Vec<ComponentInfo>,
}

impl ComponentLabeling {
    pub fn boxset(&self) -> &BoxSet {
        &self.boxset
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn components(&self) -> &[ComponentInfo] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn label_of(&self, index: &[u32]) -> Option<usize> {
        self.boxset.indices().position(|ix| ix == index).map(|pos| self.labels[pos])
    }

    /// Members of component `id` as a box set.
    pub fn component_set(&self, id: usize) -> BoxSet {
        self.select(|c| c == id)
    }

    /// Union of the components whose id satisfies `keep`.
    pub fn select<F: Fn(usize) -> bool>(&self, keep: F) -> BoxSet {
        let mut out = BoxSet::new(self.boxset.level(), self.boxset.dim()).expect("valid level");
        for (ix, &label) in self.boxset.indices().zip(&self.labels) {
            if keep(label) {
                out.insert_index(ix.to_vec());
            }
        }
        out
    }
}

/// Union-find over touching adjacency.
pub fn label_components(set: &BoxSet) -> ComponentLabeling {
    let dim = set.dim();
    let position: HashMap<&[u32], usize> = set.indices().enumerate().map(|(i, ix)| (ix, i)).collect();
    let mut uf = UnionFind::new(set.len());

    // offsets in {-1, 0, 1}^dim that are lexicographically positive; each
    // touching pair is visited once
    let offsets: Vec<Vec<i64>> = GridIter::with_extent(3, dim)
        .map(|o| o.iter().map(|&v| v as i64 - 1).collect::<Vec<i64>>())
        .filter(|o| o.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0))
        .collect();
    let cells = 1i64 << set.level();
    let mut neighbor = vec![0u32; dim];
    for (i, ix) in set.indices().enumerate() {
        'offsets: for off in &offsets {
            for k in 0..dim {
                let v = ix[k] as i64 + off[k];
                if !(0..cells).contains(&v) {
                    continue 'offsets;
                }
                neighbor[k] = v as u32;
            }
            if let Some(&j) = position.get(neighbor.as_slice()) {
                uf.union(i, j);
            }
        }
    }

    let last_column = (cells - 1) as u32;
    let mut dense: HashMap<usize, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(set.len());
    let mut components: Vec<ComponentInfo> = Vec::new();
    for (i, ix) in set.indices().enumerate() {
        let root = uf.find(i);
        let id = *dense.entry(root).or_insert_with(|| {
            components.push(ComponentInfo {
                id: components.len(),
                size: 0,
                touches_t0: false,
                touches_t1: false,
                spanning: false,
                columns: Vec::new(),
            });
            components.len() - 1
        });
        labels.push(id);
        let info = &mut components[id];
        info.size += 1;
        info.touches_t0 |= ix[0] == 0;
        info.touches_t1 |= ix[0] == last_column;
        // members arrive sorted by j_0, so columns stay sorted
        if info.columns.last() != Some(&ix[0]) {
            info.columns.push(ix[0]);
        }
    }
    for info in &mut components {
        info.spanning = info.columns.len() as i64 == cells;
    }
    ComponentLabeling { boxset: set.clone(), labels, components }
}

/// Components whose parameter columns cover all `2^k` columns, i.e. whose
/// projection onto the parameter axis is `[0, 1]`.
pub fn spanning_components(labeling: &ComponentLabeling) -> Vec<usize> {
    labeling.components.iter().filter(|c| c.spanning).map(|c| c.id).collect()
}

/// Components meeting the given parameter face.
pub fn face_components(labeling: &ComponentLabeling, face: Face) -> Vec<usize> {
    labeling
        .components
        .iter()
        .filter(|c| match face {
            Face::T0 => c.touches_t0,
            Face::T1 => c.touches_t1,
        })
        .map(|c| c.id)
        .collect()
}
