//! Backtracking isomorphism search for small algebras.

use std::collections::HashMap;

use super::FiniteAlgebra;

/// Per-element fingerprint used to prune the backtracking search: counts of
/// appearances in low-arity operation graphs.
fn fingerprints(alg: &FiniteAlgebra) -> Vec<Vec<u64>> {
    let m = alg.size();
    let mut fp = vec![Vec::new(); m];
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let arity = op.sym.arity;
        if m.pow(arity as u32) > 1_000_000 {
            // Skip enormous tables; correctness is preserved by the final
            // verification pass.
            for f in fp.iter_mut() {
                f.push(0);
                f.push(0);
            }
            continue;
        }
        let mut as_output = vec![0u64; m];
        let mut diag = vec![0u64; m];
        for args in alg.tuples(arity) {
            let v = alg.eval(op_idx, &args);
            as_output[v] += 1;
            if args.iter().all(|&a| a == args.first().copied().unwrap_or(0)) {
                // value on the diagonal tuple (x, x, ..., x)
                if let Some(&x) = args.first() {
                    if v == x {
                        diag[x] += 1;
                    }
                }
            }
        }
        for x in 0..m {
            fp[x].push(as_output[x]);
            fp[x].push(diag[x]);
        }
    }
    fp
}

fn compatible(alg1: &FiniteAlgebra, alg2: &FiniteAlgebra, map: &[Option<usize>]) -> bool {
    // Check all op applications whose arguments are already mapped.
    for (op_idx, op) in alg1.ops().iter().enumerate() {
        let arity = op.sym.arity;
        if alg1.size().pow(arity as u32) > 1_000_000 {
            continue;
        }
        for args in alg1.tuples(arity) {
            let imgs: Option<Vec<usize>> = args.iter().map(|&a| map[a]).collect();
            let Some(imgs) = imgs else { continue };
            let out = alg1.eval(op_idx, &args);
            let Some(out_img) = map[out] else { continue };
            if alg2.eval(op_idx, &imgs) != out_img {
                return false;
            }
        }
    }
    true
}

/// Signature-respecting bijection between two algebras, or `None`.
/// Signatures must match symbol-for-symbol.
pub fn is_isomorphic(alg1: &FiniteAlgebra, alg2: &FiniteAlgebra) -> Option<Vec<usize>> {
    if !alg1.signature().matches(&alg2.signature()) {
        return None;
    }
    if alg1.size() != alg2.size() {
        return None;
    }
    let m = alg1.size();
    let fp1 = fingerprints(alg1);
    let fp2 = fingerprints(alg2);
    // Candidate targets per source element, filtered by fingerprint.
    let mut by_fp: HashMap<&[u64], Vec<usize>> = HashMap::new();
    for (y, f) in fp2.iter().enumerate() {
        by_fp.entry(f.as_slice()).or_default().push(y);
    }
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(m);
    for f in &fp1 {
        match by_fp.get(f.as_slice()) {
            Some(ys) => candidates.push(ys.clone()),
            None => return None,
        }
    }
    // Order elements by fewest candidates first.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&x| candidates[x].len());

    let mut map: Vec<Option<usize>> = vec![None; m];
    let mut used = vec![false; m];

    fn backtrack(
        alg1: &FiniteAlgebra,
        alg2: &FiniteAlgebra,
        order: &[usize],
        candidates: &[Vec<usize>],
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        depth: usize,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let x = order[depth];
        for &y in &candidates[x] {
            if used[y] {
                continue;
            }
            map[x] = Some(y);
            used[y] = true;
            if compatible(alg1, alg2, map)
                && backtrack(alg1, alg2, order, candidates, map, used, depth + 1)
            {
                return true;
            }
            map[x] = None;
            used[y] = false;
        }
        false
    }

    if !backtrack(alg1, alg2, &order, &candidates, &mut map, &mut used, 0) {
        return None;
    }
    let out: Vec<usize> = map.into_iter().map(|o| o.unwrap()).collect();
    // Final full verification on every feasible operation.
    for (op_idx, op) in alg1.ops().iter().enumerate() {
        let arity = op.sym.arity;
        if m.pow(arity as u32) > 4_000_000 {
            continue;
        }
        for args in alg1.tuples(arity) {
            let imgs: Vec<usize> = args.iter().map(|&a| out[a]).collect();
            if out[alg1.eval(op_idx, &args)] != alg2.eval(op_idx, &imgs) {
                return None;
            }
        }
    }
    Some(out)
}
