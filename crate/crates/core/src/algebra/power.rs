//! Power subalgebras and binary direct products.

use std::collections::HashMap;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use super::{FiniteAlgebra, OpKind, Operation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PowerError {
    #[error("generation exceeded the element cap {cap}")]
    CapExceeded { cap: usize },
    #[error("generator vector has length {got}, expected {want}")]
    BadVectorLength { got: usize, want: usize },
}

/// Materializes the subalgebra of `alg^width` generated pointwise by the
/// given vectors. Elements are labeled by their coordinate vectors.
pub fn power_subalgebra(
    alg: &FiniteAlgebra,
    width: usize,
    gens: &[Vec<usize>],
    cap: usize,
) -> Result<FiniteAlgebra, PowerError> {
    for g in gens {
        if g.len() != width {
            return Err(PowerError::BadVectorLength {
                got: g.len(),
                want: width,
            });
        }
    }
    let mut elems: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let push = |v: Vec<usize>, elems: &mut Vec<Vec<usize>>, index: &mut HashMap<_, _>| {
        if !index.contains_key(&v) {
            index.insert(v.clone(), elems.len());
            elems.push(v);
        }
    };
    for g in gens {
        push(g.clone(), &mut elems, &mut index);
    }
    // Constants.
    for (op_idx, op) in alg.ops().iter().enumerate() {
        if op.sym.arity == 0 {
            let c = alg.eval(op_idx, &[]);
            push(vec![c; width], &mut elems, &mut index);
        }
    }
    if elems.len() > cap {
        return Err(PowerError::CapExceeded { cap });
    }
    loop {
        let snapshot_len = elems.len();
        for (op_idx, op) in alg.ops().iter().enumerate() {
            let arity = op.sym.arity;
            if arity == 0 {
                continue;
            }
            let mut idx = vec![0usize; arity];
            'tuples: loop {
                let mut out = Vec::with_capacity(width);
                for k in 0..width {
                    let args: SmallVec<[usize; 5]> =
                        idx.iter().map(|&i| elems[i][k]).collect();
                    out.push(alg.eval(op_idx, &args));
                }
                push(out, &mut elems, &mut index);
                if elems.len() > cap {
                    return Err(PowerError::CapExceeded { cap });
                }
                let mut p = arity;
                loop {
                    if p == 0 {
                        break 'tuples;
                    }
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < snapshot_len {
                        break;
                    }
                    idx[p] = 0;
                }
            }
        }
        if elems.len() == snapshot_len {
            break;
        }
    }
    Ok(materialize_vector_algebra(alg, width, elems))
}

/// Builds a finite algebra whose elements are the given coordinate vectors,
/// closed under the pointwise operations (the caller guarantees closure).
pub fn materialize_vector_algebra(
    alg: &FiniteAlgebra,
    width: usize,
    elems: Vec<Vec<usize>>,
) -> FiniteAlgebra {
    let index: HashMap<Vec<usize>, usize> = elems
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    let labels: Vec<String> = elems
        .iter()
        .map(|v| {
            let parts: Vec<&str> = v.iter().map(|&x| alg.label(x)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let elems = Arc::new(elems);
    let index = Arc::new(index);
    let mut ops = Vec::new();
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let base = alg.clone();
        let elems = Arc::clone(&elems);
        let index = Arc::clone(&index);
        let id = format!("power:{}", op.sym.name);
        let eval = move |args: &[usize]| -> usize {
            let mut out = Vec::with_capacity(width);
            for k in 0..width {
                let coord_args: SmallVec<[usize; 5]> =
                    args.iter().map(|&e| elems[e][k]).collect();
                out.push(base.eval(op_idx, &coord_args));
            }
            *index
                .get(&out)
                .unwrap_or_else(|| panic!("vector set not closed under {}", op_idx))
        };
        ops.push(Operation {
            sym: op.sym.clone(),
            kind: OpKind::Rule {
                id,
                eval: Arc::new(eval),
            },
            support: None,
        });
    }
    FiniteAlgebra::new(labels, ops)
}

/// Full direct product of two algebras over the same signature.
pub fn product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> FiniteAlgebra {
    assert!(
        a.signature().matches(&b.signature()),
        "product requires matching signatures"
    );
    let (ma, mb) = (a.size(), b.size());
    let labels: Vec<String> = (0..ma * mb)
        .map(|i| format!("({},{})", a.label(i / mb), b.label(i % mb)))
        .collect();
    let mut ops = Vec::new();
    for (op_idx, op) in a.ops().iter().enumerate() {
        let left = a.clone();
        let right = b.clone();
        let id = format!("product:{}", op.sym.name);
        let eval = move |args: &[usize]| -> usize {
            let la: SmallVec<[usize; 5]> = args.iter().map(|&x| x / right.size()).collect();
            let lb: SmallVec<[usize; 5]> = args.iter().map(|&x| x % right.size()).collect();
            left.eval(op_idx, &la) * right.size() + right.eval(op_idx, &lb)
        };
        ops.push(Operation {
            sym: op.sym.clone(),
            kind: OpKind::Rule {
                id,
                eval: Arc::new(eval),
            },
            support: None,
        });
    }
    FiniteAlgebra::new(labels, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::flat_meet_algebra;
    use crate::algebra::{generate_subuniverse, subalgebra};

    #[test]
    fn width_one_power_matches_subalgebra() {
        let alg = flat_meet_algebra(&["0", "x", "y"]);
        let p = power_subalgebra(&alg, 1, &[vec![1]], 100).unwrap();
        let sub = {
            let s = generate_subuniverse(&alg, &[1], 100).unwrap();
            subalgebra(&alg, &s)
        };
        assert!(crate::algebra::is_isomorphic(&p, &sub).is_some());
    }

    #[test]
    fn empty_gens_power_is_zero_vector() {
        let alg = flat_meet_algebra(&["0", "x"]);
        let p = power_subalgebra(&alg, 3, &[], 100).unwrap();
        assert_eq!(p.size(), 1);
        assert_eq!(p.label(0), "(0,0,0)");
    }

    #[test]
    fn cap_exceeded() {
        let alg = flat_meet_algebra(&["0", "x", "y"]);
        let err = power_subalgebra(&alg, 2, &[vec![1, 1], vec![2, 2], vec![1, 2]], 2);
        assert_eq!(err.unwrap_err(), PowerError::CapExceeded { cap: 2 });
    }

    #[test]
    fn product_projections_are_homomorphisms() {
        let a = flat_meet_algebra(&["0", "x"]);
        let b = flat_meet_algebra(&["0", "p", "q"]);
        let prod = product(&a, &b);
        assert_eq!(prod.size(), 6);
        let meet = prod.op_index("meet").unwrap();
        for x in 0..prod.size() {
            for y in 0..prod.size() {
                let v = prod.eval(meet, &[x, y]);
                assert_eq!(v / 3, a.meet_of(x / 3, y / 3));
                assert_eq!(v % 3, b.meet_of(x % 3, y % 3));
            }
        }
    }
}
