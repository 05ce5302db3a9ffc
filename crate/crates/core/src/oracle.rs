//! Independent brute-force oracles.
//!
//! These recompute results of the main algorithms by structurally different
//! routes (pair-matrix closure, full partition enumeration, plain fixpoint
//! scans). They back the verification suite and the test oracles, so they
//! must stay independent of the union-find-based implementations.

use crate::algebra::{FiniteAlgebra, Partition};

/// Naive principal congruence: O(m^2) boolean pair matrix, closed under
/// reflexivity/symmetry/transitivity and all fundamental translations by
/// direct per-pair enumeration.
pub fn naive_principal_congruence(alg: &FiniteAlgebra, a: usize, b: usize) -> Vec<Vec<bool>> {
    let m = alg.size();
    let mut rel = vec![vec![false; m]; m];
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    rel[a][b] = true;
    rel[b][a] = true;
    loop {
        let mut changed = false;
        // transitive closure
        for i in 0..m {
            for j in 0..m {
                if rel[i][j] {
                    for k in 0..m {
                        if rel[j][k] && !rel[i][k] {
                            rel[i][k] = true;
                            rel[k][i] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        // translation closure
        for u in 0..m {
            for v in 0..m {
                if !rel[u][v] || u == v {
                    continue;
                }
                let mut new_pairs = Vec::new();
                crate::algebra::for_each_translation_of_pair(alg, u, v, |fu, fv| {
                    if !rel[fu][fv] {
                        new_pairs.push((fu, fv));
                    }
                    true
                });
                for (x, y) in new_pairs {
                    if !rel[x][y] {
                        rel[x][y] = true;
                        rel[y][x] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// Compares a partition with a boolean relation matrix.
pub fn partition_equals_matrix(p: &Partition, rel: &[Vec<bool>]) -> bool {
    let m = p.len();
    (0..m).all(|i| (0..m).all(|j| p.same(i, j) == rel[i][j]))
}

/// Enumerates every partition of `[0, m)` (restricted set partitions via
/// growth strings). Only feasible for small m.
pub fn all_partitions(m: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; m];
    fn rec(labels: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<Partition>) {
        if pos == labels.len() {
            let m = labels.len();
            let mut p = Partition::identity(m);
            for i in 0..m {
                for j in (i + 1)..m {
                    if labels[i] == labels[j] {
                        p.union(i, j);
                    }
                }
            }
            out.push(p);
            return;
        }
        for c in 0..=max_used + 1 {
            labels[pos] = c;
            rec(labels, pos + 1, max_used.max(c), out);
        }
    }
    if m == 0 {
        return vec![Partition::identity(0)];
    }
    labels[0] = 0;
    rec(&mut labels, 1, 0, &mut out);
    out
}

/// All congruences by testing every partition of the universe. Only for
/// very small algebras.
pub fn congruences_by_enumeration(alg: &FiniteAlgebra) -> Vec<Partition> {
    all_partitions(alg.size())
        .into_iter()
        .filter(|p| crate::algebra::is_congruence(alg, p).is_ok())
        .collect()
}

/// Monolith by full enumeration: the least nonzero congruence if it exists.
pub fn monolith_by_enumeration(alg: &FiniteAlgebra) -> Option<Partition> {
    let congruences = congruences_by_enumeration(alg);
    let nonzero: Vec<&Partition> = congruences.iter().filter(|p| !p.is_identity()).collect();
    let least = nonzero
        .iter()
        .find(|p| nonzero.iter().all(|q| p.leq(q)))?;
    Some((*least).clone())
}

/// Subuniverse closure by repeated full scans without support shortcuts.
pub fn brute_subuniverse(alg: &FiniteAlgebra, gens: &[usize]) -> Vec<usize> {
    let mut set: std::collections::BTreeSet<usize> = gens.iter().copied().collect();
    for (op_idx, op) in alg.ops().iter().enumerate() {
        if op.sym.arity == 0 {
            set.insert(alg.eval(op_idx, &[]));
        }
    }
    loop {
        let snapshot: Vec<usize> = set.iter().copied().collect();
        let mut added = false;
        for (op_idx, op) in alg.ops().iter().enumerate() {
            let arity = op.sym.arity;
            if arity == 0 {
                continue;
            }
            let mut idx = vec![0usize; arity];
            'tuples: loop {
                let args: Vec<usize> = idx.iter().map(|&i| snapshot[i]).collect();
                if set.insert(alg.eval(op_idx, &args)) {
                    added = true;
                }
                let mut p = arity;
                loop {
                    if p == 0 {
                        break 'tuples;
                    }
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < snapshot.len() {
                        break;
                    }
                    idx[p] = 0;
                }
            }
        }
        if !added {
            return set.into_iter().collect();
        }
    }
}
