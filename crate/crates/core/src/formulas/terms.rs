//! Term families for the product and machine branches of the witness
//! formulas: bounded product chains and bounded tape-operation compositions,
//! sized from a catalog of subdirectly irreducible representatives.

use thiserror::Error;

use crate::algebra::FiniteAlgebra;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("empty catalog")]
    EmptyCatalog,
    #[error("product nilpotence not reached within bound {0}")]
    NilpotenceBound(usize),
}

/// Shapes of product terms. Products associate to the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductShape {
    /// `y_1 · (y_2 · ( … · (y_M · x) … ))`; M = 0 is the identity.
    LeftChain(usize),
    /// `y_1 · ( … · (y_{M-1} · (x · y_M)) … )`; M ≥ 1.
    RightTail(usize),
}

impl ProductShape {
    pub fn const_count(&self) -> usize {
        match self {
            ProductShape::LeftChain(m) => *m,
            ProductShape::RightTail(m) => *m,
        }
    }

    /// Evaluates the term on `x` with the given constants.
    pub fn apply(&self, alg: &FiniteAlgebra, consts: &[usize], x: usize) -> usize {
        let prod = alg.op_index("prod").expect("product present");
        match self {
            ProductShape::LeftChain(m) => {
                debug_assert_eq!(consts.len(), *m);
                let mut acc = x;
                for &y in consts.iter().rev() {
                    acc = alg.eval(prod, &[y, acc]);
                }
                acc
            }
            ProductShape::RightTail(m) => {
                debug_assert_eq!(consts.len(), *m);
                let mut acc = alg.eval(prod, &[x, consts[*m - 1]]);
                for &y in consts[..*m - 1].iter().rev() {
                    acc = alg.eval(prod, &[y, acc]);
                }
                acc
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ProductShape::LeftChain(0) => "id".to_string(),
            ProductShape::LeftChain(m) => format!("y1·(…·(y{m}·x))"),
            ProductShape::RightTail(m) => format!("y1·(…·(x·y{m}))"),
        }
    }
}

/// Least `k` such that every right-associated product of `k` elements is 0.
pub fn product_nilpotence(alg: &FiniteAlgebra, bound: usize) -> Result<usize, TermError> {
    let prod = alg.op_index("prod").expect("product present");
    let zero = alg.zero().expect("bottom element");
    // values of k-fold products, k = 1, 2, ...
    let mut reachable: Vec<usize> = (0..alg.size()).filter(|&x| x != zero).collect();
    for k in 2..=bound {
        let mut next = std::collections::BTreeSet::new();
        for x in 0..alg.size() {
            for &r in &reachable {
                let v = alg.eval(prod, &[x, r]);
                if v != zero {
                    next.insert(v);
                }
            }
        }
        if next.is_empty() {
            return Ok(k);
        }
        reachable = next.into_iter().collect();
    }
    Err(TermError::NilpotenceBound(bound))
}

/// Whether `e_1(m, x) = 0` holds throughout.
fn e1_identically_zero(alg: &FiniteAlgebra) -> bool {
    let zero = match alg.zero() {
        Some(z) => z,
        None => return false,
    };
    let Some(op) = alg.op_index("S1") else {
        return true;
    };
    for m in 0..alg.size() {
        for x in 0..alg.size() {
            if alg.eval(op, &[m, x, x, x]) != zero {
                return false;
            }
        }
    }
    true
}

/// The product-term family: chains strictly shorter than the maximum
/// product nilpotence over the catalog members with `e_1 ≡ 0`.
pub fn compute_product_terms_p(catalog: &[&FiniteAlgebra]) -> Result<Vec<ProductShape>, TermError> {
    if catalog.is_empty() {
        return Err(TermError::EmptyCatalog);
    }
    let mut n = 0usize;
    for alg in catalog {
        if !e1_identically_zero(alg) {
            continue;
        }
        n = n.max(product_nilpotence(alg, 64)?);
    }
    if n == 0 {
        return Err(TermError::EmptyCatalog);
    }
    let mut out = Vec::new();
    for m in 0..n {
        out.push(ProductShape::LeftChain(m));
        if m >= 1 {
            out.push(ProductShape::RightTail(m));
        }
    }
    Ok(out)
}

/// A composition of tape operations
/// `F_1(b_1, b_2, F_2(b_3, b_4, … F_k(…, x) …))`, stored as the op names
/// outermost first. Empty = identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineTermShape {
    pub ops: Vec<String>,
}

impl MachineTermShape {
    pub fn identity() -> Self {
        MachineTermShape { ops: Vec::new() }
    }

    pub fn const_count(&self) -> usize {
        2 * self.ops.len()
    }

    /// Constants pair up with the ops outermost first.
    pub fn apply(&self, alg: &FiniteAlgebra, consts: &[usize], x: usize) -> usize {
        debug_assert_eq!(consts.len(), self.const_count());
        let mut acc = x;
        for (k, name) in self.ops.iter().enumerate().rev() {
            let op = alg.op_index(name).expect("tape op present");
            acc = alg.eval(op, &[consts[2 * k], consts[2 * k + 1], acc]);
        }
        acc
    }

    pub fn describe(&self) -> String {
        if self.ops.is_empty() {
            return "id".to_string();
        }
        let mut out = "x".to_string();
        for name in self.ops.iter().rev() {
            out = format!("{name}(·,·,{out})");
        }
        out
    }
}

/// Tape-op name list of an algebra's signature.
pub fn tape_op_names(alg: &FiniteAlgebra) -> Vec<String> {
    alg.ops()
        .iter()
        .map(|o| o.sym.name.clone())
        .filter(|n| n.starts_with("L(") || n.starts_with("R("))
        .collect()
}

/// The machine-term families: S drives pairs into per-coordinate monoliths
/// (depth bounded by interval length plus monolith cycle length over the
/// machine catalog), T realizes bounded tape-op orbits. A non-machine
/// catalog yields the identity-only fallback.
pub fn compute_machine_terms_st(
    reference: &FiniteAlgebra,
    machine_catalog: &[(usize, usize)],
) -> (Vec<MachineTermShape>, Vec<MachineTermShape>) {
    let names = tape_op_names(reference);
    if names.is_empty() || machine_catalog.is_empty() {
        return (
            vec![MachineTermShape::identity()],
            vec![MachineTermShape::identity()],
        );
    }
    let s_depth = machine_catalog
        .iter()
        .map(|&(interval_len, cycle)| interval_len + cycle)
        .max()
        .unwrap_or(1)
        .min(4);
    let t_depth = machine_catalog
        .iter()
        .map(|&(_, cycle)| cycle)
        .max()
        .unwrap_or(0)
        .min(3);
    let compositions = |depth: usize| -> Vec<MachineTermShape> {
        let mut out = vec![MachineTermShape::identity()];
        let mut level = vec![Vec::<String>::new()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for seq in &level {
                for n in &names {
                    let mut s = seq.clone();
                    s.push(n.clone());
                    out.push(MachineTermShape { ops: s.clone() });
                    next.push(s);
                }
            }
            level = next;
        }
        out
    };
    (compositions(s_depth), compositions(t_depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::si::{build_sequential, build_small_si, SmallSiKind};
    use crate::tm::parse_tm;

    fn tm() -> crate::tm::TuringMachine {
        parse_tm("states 2\n1 0 1 R 0\n").unwrap()
    }

    #[test]
    fn nilpotence_of_catalog_members() {
        let s3 = build_sequential(&tm(), 3);
        assert_eq!(product_nilpotence(&s3, 64).unwrap(), 4);
        let two = build_small_si(&tm(), SmallSiKind::TwoElt);
        assert_eq!(product_nilpotence(&two, 64).unwrap(), 2);
        let w = build_small_si(&tm(), SmallSiKind::W);
        assert_eq!(product_nilpotence(&w, 64).unwrap(), 3);
    }

    #[test]
    fn product_terms_from_catalog() {
        let s3 = build_sequential(&tm(), 3);
        let p = compute_product_terms_p(&[&s3]).unwrap();
        // N = 4: chains of length 0..3 plus right tails 1..3.
        assert_eq!(p.len(), 4 + 3);
        assert!(p.contains(&ProductShape::LeftChain(0)));
        assert!(p.contains(&ProductShape::RightTail(3)));
        assert_eq!(compute_product_terms_p(&[]), Err(TermError::EmptyCatalog));
    }

    #[test]
    fn product_shapes_evaluate() {
        let s3 = build_sequential(&tm(), 3);
        let a1 = s3.element("a1").unwrap();
        let a2 = s3.element("a2").unwrap();
        let b3 = s3.element("b3").unwrap();
        let b1 = s3.element("b1").unwrap();
        // a1·(a2·b3) = b1
        assert_eq!(
            ProductShape::LeftChain(2).apply(&s3, &[a1, a2], b3),
            b1
        );
        // Right tail x·y1: a1·b2 = b1.
        let b2 = s3.element("b2").unwrap();
        assert_eq!(ProductShape::RightTail(1).apply(&s3, &[b2], a1), b1);
        // Two-step right tail: a1·(a2·b3)... with the tail at the end:
        // y1·(x·y2) for x = a2 gives a1·(a2·b3) = b1.
        assert_eq!(ProductShape::RightTail(2).apply(&s3, &[a1, b3], a2), b1);
    }

    #[test]
    fn machine_terms_fall_back_to_identity() {
        let reference = crate::aprime::build_aprime(&tm());
        let (s, t) = compute_machine_terms_st(&reference, &[]);
        assert_eq!(s, vec![MachineTermShape::identity()]);
        assert_eq!(t, vec![MachineTermShape::identity()]);
    }

    #[test]
    fn machine_terms_enumerate_compositions() {
        let reference = crate::aprime::build_aprime(&tm());
        // interval length 2, cycle 0 -> depth 2 compositions of 2 tape ops.
        let (s, t) = compute_machine_terms_st(&reference, &[(2, 0)]);
        assert_eq!(s.len(), 1 + 2 + 4);
        assert_eq!(t, vec![MachineTermShape::identity()]);
    }
}
