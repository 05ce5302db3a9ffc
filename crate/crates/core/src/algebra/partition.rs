//! Union-find partitions of `[0, m)`; used to represent congruences.

/// A partition backed by union-find with path compression.
#[derive(Debug, Clone)]
pub struct Partition {
    parent: Vec<usize>,
}

impl Partition {
    pub fn identity(n: usize) -> Self {
        Partition {
            parent: (0..n).collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut p = Partition::identity(n);
        for i in 1..n {
            p.union(0, i);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let up = self.parent[self.parent[x]];
            self.parent[x] = up;
            x = up;
        }
        x
    }

    /// Representative without mutation (no path compression).
    pub fn find_const(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `x` and `y`; true if they were distinct.
    pub fn union(&mut self, x: usize, y: usize) -> bool {
        let rx = self.find(x);
        let ry = self.find(y);
        if rx == ry {
            return false;
        }
        // Keep the smaller index as representative for determinism.
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }

    pub fn same(&self, x: usize, y: usize) -> bool {
        self.find_const(x) == self.find_const(y)
    }

    pub fn is_identity(&self) -> bool {
        (0..self.len()).all(|x| self.find_const(x) == x)
    }

    pub fn is_full(&self) -> bool {
        if self.len() <= 1 {
            return true;
        }
        let r = self.find_const(0);
        (1..self.len()).all(|x| self.find_const(x) == r)
    }

    pub fn class_count(&self) -> usize {
        (0..self.len()).filter(|&x| self.find_const(x) == x).count()
    }

    /// Canonical labeling: element -> index of its class, classes numbered by
    /// first occurrence. Equal partitions yield equal vectors.
    pub fn canon(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.len()];
        let mut next = 0;
        let mut class_of_root = std::collections::HashMap::new();
        for x in 0..self.len() {
            let r = self.find_const(x);
            let c = *class_of_root.entry(r).or_insert_with(|| {
                let c = next;
                next += 1;
                c
            });
            label[x] = c;
        }
        label
    }

    /// Blocks sorted by least element, each block sorted.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for x in 0..self.len() {
            by_root.entry(self.find_const(x)).or_default().push(x);
        }
        by_root.into_values().collect()
    }

    /// Blocks with at least two elements.
    pub fn nontrivial_blocks(&self) -> Vec<Vec<usize>> {
        self.blocks().into_iter().filter(|b| b.len() > 1).collect()
    }

    /// Refinement order: `self ≤ other` iff every class of `self` lies
    /// inside a class of `other`.
    pub fn leq(&self, other: &Partition) -> bool {
        debug_assert_eq!(self.len(), other.len());
        (0..self.len()).all(|x| other.same(x, self.find_const(x)))
    }

    /// Join in the partition lattice (transitive closure of the union).
    pub fn join(&self, other: &Partition) -> Partition {
        debug_assert_eq!(self.len(), other.len());
        let mut out = self.clone();
        for x in 0..other.len() {
            out.union(x, other.find_const(x));
        }
        out
    }

    /// Meet in the partition lattice (common refinement).
    pub fn meet(&self, other: &Partition) -> Partition {
        debug_assert_eq!(self.len(), other.len());
        let mut key_to_rep: std::collections::HashMap<(usize, usize), usize> = Default::default();
        let mut out = Partition::identity(self.len());
        for x in 0..self.len() {
            let key = (self.find_const(x), other.find_const(x));
            match key_to_rep.entry(key) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    out.union(*e.get(), x);
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(x);
                }
            }
        }
        out
    }

    /// Partition with a single named nontrivial block.
    pub fn with_block(n: usize, block: &[usize]) -> Partition {
        let mut p = Partition::identity(n);
        for w in block.windows(2) {
            p.union(w[0], w[1]);
        }
        p
    }

    /// All unordered related pairs `(x, y)` with `x < y`.
    pub fn related_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in self.nontrivial_blocks() {
            for i in 0..b.len() {
                for j in i + 1..b.len() {
                    out.push((b[i], b[j]));
                }
            }
        }
        out
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.canon() == other.canon()
    }
}

impl Eq for Partition {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_basics() {
        let mut p = Partition::identity(5);
        assert!(p.union(0, 3));
        assert!(!p.union(3, 0));
        assert!(p.union(1, 2));
        assert!(p.same(0, 3));
        assert!(!p.same(0, 1));
        assert_eq!(p.class_count(), 3);
        assert_eq!(p.blocks(), vec![vec![0, 3], vec![1, 2], vec![4]]);
    }

    #[test]
    fn join_meet_leq() {
        let a = Partition::with_block(4, &[0, 1]);
        let b = Partition::with_block(4, &[1, 2]);
        let j = a.join(&b);
        assert!(j.same(0, 2));
        assert!(!j.same(0, 3));
        let m = a.meet(&b);
        assert!(m.is_identity());
        assert!(a.leq(&j));
        assert!(b.leq(&j));
        assert!(!a.leq(&b));
    }

    #[test]
    fn canon_is_stable() {
        let a = Partition::with_block(4, &[2, 3]);
        let mut b = Partition::identity(4);
        b.union(3, 2);
        assert_eq!(a, b);
        assert_eq!(a.canon(), vec![0, 1, 2, 2]);
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        /// Union-find equality agrees with a naive relation closure.
        #[test]
        fn matches_naive_closure(pairs in proptest::collection::vec((0usize..8, 0usize..8), 0..12)) {
            let n = 8;
            let mut p = Partition::identity(n);
            for &(a, b) in &pairs {
                p.union(a, b);
            }
            // naive: boolean matrix closure
            let mut rel = vec![vec![false; n]; n];
            for i in 0..n {
                rel[i][i] = true;
            }
            for &(a, b) in &pairs {
                rel[a][b] = true;
                rel[b][a] = true;
            }
            loop {
                let mut changed = false;
                for i in 0..n {
                    for j in 0..n {
                        if rel[i][j] {
                            for k in 0..n {
                                if rel[j][k] && !rel[i][k] {
                                    rel[i][k] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(p.same(i, j), rel[i][j]);
                }
            }
        }
    }
}
