//! Principal congruence generation, congruence lattices, monoliths, and
//! quotient algebras.

use std::collections::BTreeSet;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use super::{for_each_translation_of_pair, Args, FiniteAlgebra, OpKind, Operation, Partition};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("universe size {size} exceeds the guard {guard}")]
    SizeGuard { size: usize, guard: usize },
    #[error("partition does not respect operation {op}: {detail}")]
    NotACongruence { op: String, detail: String },
}

/// A witness that a partition fails to be a congruence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceViolation {
    pub op: String,
    pub args_a: Vec<usize>,
    pub args_b: Vec<usize>,
    pub out_a: usize,
    pub out_b: usize,
}

/// Least congruence relating `a` and `b`: worklist closure under all
/// fundamental translations (Maltsev's Lemma).
pub fn principal_congruence(alg: &FiniteAlgebra, a: usize, b: usize) -> Partition {
    let mut part = Partition::identity(alg.size());
    let mut queue: Vec<(usize, usize)> = Vec::new();
    if part.union(a, b) {
        queue.push((a, b));
    }
    while let Some((u, v)) = queue.pop() {
        let mut merges: Vec<(usize, usize)> = Vec::new();
        for_each_translation_of_pair(alg, u, v, |fu, fv| {
            if fu != fv && !part.same(fu, fv) {
                part.union(fu, fv);
                merges.push((fu, fv));
            }
            true
        });
        queue.extend(merges);
    }
    part
}

/// Checks whether a partition is a congruence; returns the first violation.
pub fn is_congruence(alg: &FiniteAlgebra, theta: &Partition) -> Result<(), CongruenceViolation> {
    assert_eq!(theta.len(), alg.size());
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let arity = op.sym.arity;
        if arity == 0 {
            continue;
        }
        if let Some(support) = &op.support {
            // Tuples off-support on both sides evaluate to 0 on both sides.
            for t in support.iter() {
                for pos in 0..arity {
                    let x = t[pos] as usize;
                    let mut args: Vec<usize> = t.iter().map(|&e| e as usize).collect();
                    let out_a = alg.eval(op_idx, &args);
                    for y in 0..alg.size() {
                        if y == x || !theta.same(x, y) {
                            continue;
                        }
                        args[pos] = y;
                        let out_b = alg.eval(op_idx, &args);
                        if !theta.same(out_a, out_b) {
                            let mut args_a = args.clone();
                            args_a[pos] = x;
                            return Err(CongruenceViolation {
                                op: op.sym.name.clone(),
                                args_a,
                                args_b: args,
                                out_a,
                                out_b,
                            });
                        }
                        args[pos] = x;
                    }
                }
            }
        } else {
            for args in alg.tuples(arity) {
                let out_a = alg.eval(op_idx, &args);
                for pos in 0..arity {
                    let x = args[pos];
                    let mut args_b = args.clone();
                    for y in 0..alg.size() {
                        if y == x || !theta.same(x, y) {
                            continue;
                        }
                        args_b[pos] = y;
                        let out_b = alg.eval(op_idx, &args_b);
                        if !theta.same(out_a, out_b) {
                            return Err(CongruenceViolation {
                                op: op.sym.name.clone(),
                                args_a: args.clone(),
                                args_b,
                                out_a,
                                out_b,
                            });
                        }
                    }
                    args_b[pos] = x;
                }
            }
        }
    }
    Ok(())
}

/// All congruences: join closure of the principal congruences, plus the
/// identity. Guarded by universe size.
pub fn congruence_lattice(
    alg: &FiniteAlgebra,
    guard: usize,
) -> Result<Vec<Partition>, CongruenceError> {
    if alg.size() > guard {
        return Err(CongruenceError::SizeGuard {
            size: alg.size(),
            guard,
        });
    }
    let n = alg.size();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out: Vec<Partition> = Vec::new();
    let push = |p: Partition, out: &mut Vec<Partition>, seen: &mut BTreeSet<Vec<usize>>| {
        if seen.insert(p.canon()) {
            out.push(p);
            true
        } else {
            false
        }
    };
    push(Partition::identity(n), &mut out, &mut seen);
    for a in 0..n {
        for b in (a + 1)..n {
            push(principal_congruence(alg, a, b), &mut out, &mut seen);
        }
    }
    // Join-close. Joins of congruences are congruences.
    let mut frontier: Vec<usize> = (0..out.len()).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &i in &frontier {
            for j in 0..out.len() {
                let joined = out[i].join(&out[j]);
                if push(joined, &mut out, &mut seen) {
                    next.push(out.len() - 1);
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// The least nonzero congruence when the algebra is subdirectly
/// irreducible, else `None`. Computed from the minimal nonzero principal
/// congruences: the monolith exists iff there is a unique minimal one.
pub fn monolith(alg: &FiniteAlgebra, guard: usize) -> Result<Option<Partition>, CongruenceError> {
    if alg.size() > guard {
        return Err(CongruenceError::SizeGuard {
            size: alg.size(),
            guard,
        });
    }
    let n = alg.size();
    if n <= 1 {
        // No nonzero congruence at all.
        return Ok(None);
    }
    let mut principals: Vec<Partition> = Vec::new();
    let mut seen = BTreeSet::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let p = principal_congruence(alg, a, b);
            if seen.insert(p.canon()) {
                principals.push(p);
            }
        }
    }
    let mut minimal: Vec<&Partition> = Vec::new();
    'outer: for p in &principals {
        for q in &principals {
            if q != p && q.leq(p) {
                continue 'outer;
            }
        }
        minimal.push(p);
    }
    if minimal.len() == 1 {
        Ok(Some(minimal[0].clone()))
    } else {
        Ok(None)
    }
}

/// Finitely subdirectly irreducible: every two nonzero principal
/// congruences intersect nontrivially.
pub fn is_fsi(alg: &FiniteAlgebra, guard: usize) -> Result<bool, CongruenceError> {
    if alg.size() > guard {
        return Err(CongruenceError::SizeGuard {
            size: alg.size(),
            guard,
        });
    }
    let n = alg.size();
    let mut principals: Vec<Partition> = Vec::new();
    let mut seen = BTreeSet::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let p = principal_congruence(alg, a, b);
            if seen.insert(p.canon()) {
                principals.push(p);
            }
        }
    }
    for i in 0..principals.len() {
        for j in i + 1..principals.len() {
            if principals[i].meet(&principals[j]).is_identity() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A quotient algebra together with its projection map.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub algebra: FiniteAlgebra,
    /// Element of the parent -> element of the quotient.
    pub projection: Vec<usize>,
}

impl Quotient {
    /// Pulls the quotient's identity congruence back to the parent: the
    /// kernel of the projection.
    pub fn kernel(&self) -> Partition {
        let mut p = Partition::identity(self.projection.len());
        let mut rep_of: std::collections::HashMap<usize, usize> = Default::default();
        for (x, &b) in self.projection.iter().enumerate() {
            if let Some(&r) = rep_of.get(&b) {
                p.union(r, x);
            } else {
                rep_of.insert(b, x);
            }
        }
        p
    }
}

/// Quotient by a verified congruence. Fails with a violating operation and
/// tuple when `theta` is not a congruence.
pub fn quotient(alg: &FiniteAlgebra, theta: &Partition) -> Result<Quotient, CongruenceError> {
    if let Err(v) = is_congruence(alg, theta) {
        let detail = format!(
            "{}({}) = {} but {}({}) = {}",
            v.op,
            v.args_a
                .iter()
                .map(|&x| alg.label(x).to_string())
                .collect::<Vec<_>>()
                .join(","),
            alg.label(v.out_a),
            v.op,
            v.args_b
                .iter()
                .map(|&x| alg.label(x).to_string())
                .collect::<Vec<_>>()
                .join(","),
            alg.label(v.out_b),
        );
        return Err(CongruenceError::NotACongruence { op: v.op, detail });
    }
    let blocks = theta.blocks();
    let mut projection = vec![usize::MAX; alg.size()];
    for (bi, block) in blocks.iter().enumerate() {
        for &x in block {
            projection[x] = bi;
        }
    }
    let labels: Vec<String> = blocks
        .iter()
        .map(|block| {
            if block.len() == 1 {
                alg.label(block[0]).to_string()
            } else if alg.zero().is_some_and(|z| block.contains(&z)) {
                // The zero class keeps the bottom-element name.
                "0".to_string()
            } else {
                let inner: Vec<&str> = block.iter().map(|&x| alg.label(x)).collect();
                format!("{{{}}}", inner.join("|"))
            }
        })
        .collect();
    let reps: Vec<usize> = blocks.iter().map(|b| b[0]).collect();
    let proj = Arc::new(projection.clone());
    let mut ops = Vec::new();
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let parent = alg.clone();
        let reps = reps.clone();
        let proj_arc = Arc::clone(&proj);
        let id = format!("quotient:{}", op.sym.name);
        let eval = move |args: &[usize]| -> usize {
            let lifted: SmallVec<[usize; 5]> = args.iter().map(|&b| reps[b]).collect();
            proj_arc[parent.eval(op_idx, &lifted)]
        };
        let support = op.support.as_ref().map(|s| {
            let mut out: BTreeSet<Args> = BTreeSet::new();
            for t in s.iter() {
                out.insert(t.iter().map(|&x| proj[x as usize] as u32).collect());
            }
            Arc::new(out.into_iter().collect::<Vec<_>>())
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
    let algebra = FiniteAlgebra::new(labels, ops);
    Ok(Quotient {
        algebra,
        projection,
    })
}
