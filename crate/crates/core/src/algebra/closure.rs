//! Subuniverse generation and subalgebra materialization.

use std::collections::BTreeSet;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use super::{Args, FiniteAlgebra, OpKind, Operation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubuniverseError {
    #[error("closure exceeded the element cap {cap}")]
    CapExceeded { cap: usize },
    #[error("operation {op} has arity {arity}, too large to enumerate without support")]
    ArityTooLarge { op: String, arity: usize },
}

/// Least subset containing `gens`, closed under all operations (including
/// constants). Returned in ascending index order.
pub fn generate_subuniverse(
    alg: &FiniteAlgebra,
    gens: &[usize],
    cap: usize,
) -> Result<Vec<usize>, SubuniverseError> {
    let mut set: BTreeSet<usize> = gens.iter().copied().collect();
    // Constants first.
    for (op_idx, op) in alg.ops().iter().enumerate() {
        if op.sym.arity == 0 {
            set.insert(alg.eval(op_idx, &[]));
        }
    }
    if set.len() > cap {
        return Err(SubuniverseError::CapExceeded { cap });
    }
    loop {
        let snapshot: Vec<usize> = set.iter().copied().collect();
        let mut added = false;
        for (op_idx, op) in alg.ops().iter().enumerate() {
            let arity = op.sym.arity;
            if arity == 0 {
                continue;
            }
            if let Some(support) = &op.support {
                for t in support.iter() {
                    if t.iter().all(|&a| set.contains(&(a as usize))) {
                        let args: SmallVec<[usize; 5]> =
                            t.iter().map(|&a| a as usize).collect();
                        let v = alg.eval(op_idx, &args);
                        if set.insert(v) {
                            added = true;
                            if set.len() > cap {
                                return Err(SubuniverseError::CapExceeded { cap });
                            }
                        }
                    }
                }
            } else {
                let k = snapshot.len();
                if k > 0 && (k as f64).powi(arity as i32) > 5e8 {
                    return Err(SubuniverseError::ArityTooLarge {
                        op: op.sym.name.clone(),
                        arity,
                    });
                }
                let mut idx = vec![0usize; arity];
                'tuples: loop {
                    let args: SmallVec<[usize; 5]> = idx.iter().map(|&i| snapshot[i]).collect();
                    let v = alg.eval(op_idx, &args);
                    if set.insert(v) {
                        added = true;
                        if set.len() > cap {
                            return Err(SubuniverseError::CapExceeded { cap });
                        }
                    }
                    let mut p = arity;
                    loop {
                        if p == 0 {
                            break 'tuples;
                        }
                        p -= 1;
                        idx[p] += 1;
                        if idx[p] < k {
                            break;
                        }
                        idx[p] = 0;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    Ok(set.into_iter().collect())
}

/// Materializes the subalgebra on `subset` (which must be closed under all
/// operations). Element order follows `subset`.
pub fn subalgebra(alg: &FiniteAlgebra, subset: &[usize]) -> FiniteAlgebra {
    let mut to_new = vec![usize::MAX; alg.size()];
    for (new, &old) in subset.iter().enumerate() {
        to_new[old] = new;
    }
    let labels: Vec<String> = subset.iter().map(|&x| alg.label(x).to_string()).collect();
    let to_old: Arc<Vec<usize>> = Arc::new(subset.to_vec());
    let to_new_arc: Arc<Vec<usize>> = Arc::new(to_new.clone());
    let mut ops = Vec::new();
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let parent = alg.clone();
        let to_old = Arc::clone(&to_old);
        let to_new_eval = Arc::clone(&to_new_arc);
        let id = format!("sub:{}", op.sym.name);
        let eval = move |args: &[usize]| -> usize {
            let lifted: SmallVec<[usize; 5]> = args.iter().map(|&x| to_old[x]).collect();
            let v = parent.eval(op_idx, &lifted);
            let new = to_new_eval[v];
            assert!(new != usize::MAX, "subset not closed under {op_idx}");
            new
        };
        let support = op.support.as_ref().map(|s| {
            let filtered: Vec<Args> = s
                .iter()
                .filter(|t| t.iter().all(|&a| to_new[a as usize] != usize::MAX))
                .map(|t| t.iter().map(|&a| to_new[a as usize] as u32).collect())
                .collect();
            Arc::new(filtered)
        });
        ops.push(Operation {
            sym: op.sym.clone(),
            kind: OpKind::Rule {
                id,
                eval: Arc::new(eval),
            },
            support,
        });
    }
    FiniteAlgebra::new(labels, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::flat_meet_algebra;

    #[test]
    fn empty_gens_with_constant_zero() {
        let alg = flat_meet_algebra(&["0", "x", "y"]);
        assert_eq!(generate_subuniverse(&alg, &[], 100).unwrap(), vec![0]);
    }

    #[test]
    fn closure_is_monotone_and_idempotent() {
        let alg = flat_meet_algebra(&["0", "x", "y", "z"]);
        let a = generate_subuniverse(&alg, &[1], 100).unwrap();
        let b = generate_subuniverse(&alg, &[1, 2], 100).unwrap();
        assert!(a.iter().all(|x| b.contains(x)));
        let again = generate_subuniverse(&alg, &b, 100).unwrap();
        assert_eq!(again, b);
    }

    #[test]
    fn cap_fires() {
        let alg = flat_meet_algebra(&["0", "x", "y", "z"]);
        assert_eq!(
            generate_subuniverse(&alg, &[0, 1, 2, 3], 2),
            Err(SubuniverseError::CapExceeded { cap: 2 })
        );
    }

    #[test]
    fn subalgebra_restricts_ops() {
        let alg = flat_meet_algebra(&["0", "x", "y"]);
        let sub = subalgebra(&alg, &[0, 2]);
        assert_eq!(sub.size(), 2);
        assert_eq!(sub.labels(), &["0".to_string(), "y".to_string()]);
        assert_eq!(sub.meet_of(1, 1), 1);
        assert_eq!(sub.meet_of(0, 1), 0);
    }
}
