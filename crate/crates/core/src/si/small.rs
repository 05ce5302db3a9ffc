//! The three small subdirectly irreducible algebras that kill every S gate:
//! the two-element flat algebra {0, C}, the three-element algebra
//! {0, H, M(1,0)}, and the four-element quotient W = ⟨H,C⟩/Cg(M(1,0), 0).

use crate::algebra::{
    generate_subuniverse, is_isomorphic, principal_congruence, quotient, subalgebra,
    FiniteAlgebra,
};
use crate::aprime::build_aprime;
use crate::tm::TuringMachine;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallSiKind {
    TwoElt,
    ThreeElt,
    W,
}

/// Builds one of the three catalog algebras as an honest subalgebra or
/// quotient of the machine algebra for `tm`.
pub fn build_small_si(tm: &TuringMachine, kind: SmallSiKind) -> FiniteAlgebra {
    let aprime = build_aprime(tm);
    let pick = |labels: &[&str]| -> Vec<usize> {
        labels
            .iter()
            .map(|l| aprime.element(l).expect("catalog element"))
            .collect()
    };
    match kind {
        SmallSiKind::TwoElt => subalgebra(&aprime, &pick(&["0", "C"])),
        SmallSiKind::ThreeElt => subalgebra(&aprime, &pick(&["0", "H", "M(1,0)"])),
        SmallSiKind::W => {
            let gens = pick(&["H", "C"]);
            let closure = generate_subuniverse(&aprime, &gens, 64).expect("small closure");
            let sub = subalgebra(&aprime, &closure);
            let m = sub.element("M(1,0)").expect("M(1,0) in <H,C>");
            let theta = principal_congruence(&sub, m, 0);
            quotient(&sub, &theta).expect("Cg(M,0) is a congruence").algebra
        }
    }
}

/// Whether the algebra satisfies `e_i(m̄, x) = 0` for every `i`, `m̄`, `x`.
pub fn satisfies_ei_zero(alg: &FiniteAlgebra) -> bool {
    let zero = match alg.zero() {
        Some(z) => z,
        None => return false,
    };
    let m = alg.size();
    for name in ["S0", "S1"] {
        if let Some(op) = alg.op_index(name) {
            for u in 0..m {
                for x in 0..m {
                    if alg.eval(op, &[u, x, x, x]) != zero {
                        return false;
                    }
                }
            }
        }
    }
    if let Some(op) = alg.op_index("S2") {
        for u in 0..m {
            for v in 0..m {
                for x in 0..m {
                    if alg.eval(op, &[u, v, x, x, x]) != zero {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Matches an algebra against the three catalog algebras. `None` means the
/// precondition failed or no catalog member is isomorphic.
pub fn classify_small_si(alg: &FiniteAlgebra, tm: &TuringMachine) -> Option<SmallSiKind> {
    if !satisfies_ei_zero(alg) {
        return None;
    }
    for kind in [SmallSiKind::TwoElt, SmallSiKind::ThreeElt, SmallSiKind::W] {
        let reference = build_small_si(tm, kind);
        if is_isomorphic(alg, &reference).is_some() {
            return Some(kind);
        }
    }
    None
}
