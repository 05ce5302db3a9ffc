//! First-order congruence formulas over finite algebras: AST, brute-force
//! evaluator, the library of chain-shape formulas, and semantic checks for
//! definable principal subcongruences.

mod ast;
mod dpsc;
mod eval;
mod library;
mod terms;

pub use ast::{Formula, NamedFormula, Term, VarId};
pub use dpsc::{
    dpsc_check, dpsc_witness_jonsson, pi_psi_semantic, DpscError, DpscReport, DpscWitness,
    PairOutcome,
};
pub use eval::{EvalError, EvalOptions, Evaluator};
pub use library::{build_library, build_zeta, BaseStrategy, FormulaLibrary};
pub use terms::{
    compute_machine_terms_st, compute_product_terms_p, MachineTermShape, ProductShape, TermError,
};

use crate::algebra::FiniteAlgebra;

/// The idempotent-image terms: `e_0(m,x) = S0(m,x,x,x)`,
/// `e_1(m,x) = S1(m,x,x,x)`, `e_2(m,n,x) = S2(m,n,x,x,x)`.
/// `mbar` has one element for i in {0,1} and two for i = 2.
pub fn e_i(alg: &FiniteAlgebra, i: usize, mbar: &[usize], x: usize) -> usize {
    match i {
        0 | 1 => {
            let op = alg
                .op_index(if i == 0 { "S0" } else { "S1" })
                .expect("S gate present");
            assert_eq!(mbar.len(), 1);
            alg.eval(op, &[mbar[0], x, x, x])
        }
        2 => {
            let op = alg.op_index("S2").expect("S2 present");
            assert_eq!(mbar.len(), 2);
            alg.eval(op, &[mbar[0], mbar[1], x, x, x])
        }
        _ => panic!("e_i index out of range"),
    }
}

/// Iterates the parameter space of `e_i`: single elements for i in {0,1},
/// pairs for i = 2 (single elements first, then pairs, fixed order).
pub fn ei_params(size: usize, i: usize) -> Vec<Vec<usize>> {
    match i {
        0 | 1 => (0..size).map(|m| vec![m]).collect(),
        2 => {
            let mut out = Vec::with_capacity(size * size);
            for m in 0..size {
                for n in 0..size {
                    out.push(vec![m, n]);
                }
            }
            out
        }
        _ => panic!("e_i index out of range"),
    }
}

/// A witness that the algebra lies in the class where some `e_i(m̄, ·)` is
/// the identity.
pub fn in_class_mi(alg: &FiniteAlgebra, i: usize) -> Option<Vec<usize>> {
    for mbar in ei_params(alg.size(), i) {
        if (0..alg.size()).all(|x| e_i(alg, i, &mbar, x) == x) {
            return Some(mbar);
        }
    }
    None
}

/// A counterexample to one of the chain identities for the directed
/// five-polynomial scheme built from `S_i(m̄, ·, ·, ·)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JonssonCounterexample {
    pub identity: &'static str,
    pub triple: (usize, usize, usize),
}

/// Verifies the directed chain identities for
/// p0 = x, p1 = S_i(m̄,x,y,z), p2 = x∧z, p3 = S_i(m̄,z,y,x), p4 = z:
/// each p_j(x,y,x) = x, even-indexed neighbors agree at x = y, odd-indexed
/// neighbors agree at y = z.
pub fn jonsson_check(
    alg: &FiniteAlgebra,
    i: usize,
    mbar: &[usize],
) -> Result<(), JonssonCounterexample> {
    let m = alg.size();
    let s = |x: usize, y: usize, z: usize| -> usize {
        let mut args: Vec<usize> = mbar.to_vec();
        args.extend_from_slice(&[x, y, z]);
        let op = match i {
            0 => alg.op_index("S0").unwrap(),
            1 => alg.op_index("S1").unwrap(),
            _ => alg.op_index("S2").unwrap(),
        };
        alg.eval(op, &args)
    };
    let p = |j: usize, x: usize, y: usize, z: usize| -> usize {
        match j {
            0 => x,
            1 => s(x, y, z),
            2 => alg.meet_of(x, z),
            3 => s(z, y, x),
            _ => z,
        }
    };
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                for j in 0..=4 {
                    if p(j, x, y, x) != x {
                        return Err(JonssonCounterexample {
                            identity: "p_j(x,y,x) = x",
                            triple: (x, y, x),
                        });
                    }
                }
                // even neighbors agree at x = y
                for j in [0usize, 2] {
                    if p(j, x, x, z) != p(j + 1, x, x, z) {
                        return Err(JonssonCounterexample {
                            identity: "p_j(x,x,z) = p_{j+1}(x,x,z) for even j",
                            triple: (x, x, z),
                        });
                    }
                }
                // odd neighbors agree at y = z
                for j in [1usize, 3] {
                    if p(j, x, z, z) != p(j + 1, x, z, z) {
                        return Err(JonssonCounterexample {
                            identity: "p_j(x,y,y) = p_{j+1}(x,y,y) for odd j",
                            triple: (x, z, z),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
