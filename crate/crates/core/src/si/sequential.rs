//! Sequential algebras: finite flat product chains.
//!
//! The infinite two-sided chain has universe {0, a_i, b_i | i ∈ Z} with
//! a_i · b_{i+1} = b_i and all other products 0. Finite subdirectly
//! irreducible truncations must be closed under the product and must keep a
//! unique atom: the universe here is {0, a_1..a_{n-1}, b_1..b_n}. (Including
//! a top a_n would add an isolated atom Cg(a_n, 0) and destroy subdirect
//! irreducibility.)

use std::sync::Arc;

use smallvec::{smallvec, SmallVec};

use crate::algebra::{Args, FiniteAlgebra, OpKind, Operation};
use crate::tm::TuringMachine;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SeqElem {
    Zero,
    A(usize),
    B(usize),
}

struct SeqCtx {
    n: usize,
}

impl SeqCtx {
    fn size(&self) -> usize {
        2 * self.n
    }

    fn elem(&self, idx: usize) -> SeqElem {
        if idx == 0 {
            return SeqElem::Zero;
        }
        // Layout: 0, a1, b1, a2, b2, …, a_{n-1}, b_{n-1}, b_n.
        let k = idx - 1;
        let i = k / 2 + 1;
        if i < self.n && k % 2 == 0 {
            SeqElem::A(i)
        } else if k % 2 == 1 {
            SeqElem::B(i)
        } else {
            SeqElem::B(self.n)
        }
    }

    fn index(&self, e: SeqElem) -> usize {
        match e {
            SeqElem::Zero => 0,
            SeqElem::A(i) => 1 + 2 * (i - 1),
            // b_n has no companion a_n, so it sits at the top index.
            SeqElem::B(i) if i == self.n => 2 * self.n - 1,
            SeqElem::B(i) => 2 + 2 * (i - 1),
        }
    }

    fn label(&self, e: SeqElem) -> String {
        match e {
            SeqElem::Zero => "0".into(),
            SeqElem::A(i) => format!("a{i}"),
            SeqElem::B(i) => format!("b{i}"),
        }
    }
}

fn seq_meet(x: SeqElem, y: SeqElem) -> SeqElem {
    if x == y {
        x
    } else {
        SeqElem::Zero
    }
}

fn seq_prod(x: SeqElem, y: SeqElem) -> SeqElem {
    match (x, y) {
        (SeqElem::A(i), SeqElem::B(j)) if j == i + 1 => SeqElem::B(i),
        _ => SeqElem::Zero,
    }
}

/// Builds the sequential algebra with top chain element `b_n` over the
/// signature of the machine algebra for `tm`. All operations outside
/// {meet, prod, J, J', K, T} are identically zero.
pub fn build_sequential(tm: &TuringMachine, n: usize) -> FiniteAlgebra {
    assert!(n >= 1, "sequential algebras need n >= 1");
    let reference = crate::aprime::build_aprime(tm);
    let ctx = Arc::new(SeqCtx { n });
    let labels: Vec<String> = (0..ctx.size()).map(|i| ctx.label(ctx.elem(i))).collect();

    let rule = |ctx: &Arc<SeqCtx>,
                name: &str,
                f: Box<dyn Fn(&SeqCtx, &[SeqElem]) -> SeqElem + Send + Sync>|
     -> (String, OpKind) {
        let ctx = Arc::clone(ctx);
        let id = format!("seq:{name}");
        (
            id.clone(),
            OpKind::Rule {
                id,
                eval: Arc::new(move |args: &[usize]| {
                    let elems: SmallVec<[SeqElem; 5]> =
                        args.iter().map(|&a| ctx.elem(a)).collect();
                    ctx.index(f(&ctx, &elems))
                }),
            },
        )
    };

    let mut ops: Vec<Operation> = Vec::new();
    for sym in reference.ops().iter().map(|o| o.sym.clone()) {
        let (kind, support): (OpKind, Vec<Args>) = match sym.name.as_str() {
            "zero" => (
                rule(&ctx, "zero", Box::new(|_, _| SeqElem::Zero)).1,
                vec![],
            ),
            "meet" => (
                rule(&ctx, "meet", Box::new(|_, a| seq_meet(a[0], a[1]))).1,
                (1..ctx.size()).map(|x| smallvec![x as u32, x as u32]).collect(),
            ),
            "prod" => (
                rule(&ctx, "prod", Box::new(|_, a| seq_prod(a[0], a[1]))).1,
                (1..n)
                    .map(|i| {
                        smallvec![
                            ctx.index(SeqElem::A(i)) as u32,
                            ctx.index(SeqElem::B(i + 1)) as u32
                        ]
                    })
                    .collect(),
            ),
            "J" => (
                rule(&ctx, "J", Box::new(|_, a| seq_meet(a[0], a[1]))).1,
                (1..ctx.size())
                    .flat_map(|x| {
                        (0..ctx.size()).map(move |z| smallvec![x as u32, x as u32, z as u32])
                    })
                    .collect(),
            ),
            "Jp" | "K" => (
                rule(
                    &ctx,
                    &sym.name,
                    Box::new(|_, a| seq_meet(seq_meet(a[0], a[1]), a[2])),
                )
                .1,
                (1..ctx.size())
                    .map(|x| smallvec![x as u32, x as u32, x as u32])
                    .collect(),
            ),
            "T" => (
                rule(
                    &ctx,
                    "T",
                    Box::new(|_, a| seq_meet(seq_prod(a[0], a[1]), seq_prod(a[2], a[3]))),
                )
                .1,
                (1..n)
                    .map(|i| {
                        let a = ctx.index(SeqElem::A(i)) as u32;
                        let b = ctx.index(SeqElem::B(i + 1)) as u32;
                        smallvec![a, b, a, b]
                    })
                    .collect(),
            ),
            _ => (
                rule(&ctx, &format!("zero-{}", sym.name), Box::new(|_, _| SeqElem::Zero)).1,
                vec![],
            ),
        };
        ops.push(Operation {
            sym,
            kind,
            support: Some(Arc::new(support)),
        });
    }
    FiniteAlgebra::new(labels, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{monolith, principal_congruence, Partition};
    use crate::oracle;
    use crate::tm::parse_tm;

    fn tm() -> TuringMachine {
        parse_tm("states 2\n1 0 1 R 0\n").unwrap()
    }

    fn ev(alg: &FiniteAlgebra, op: &str, labels: &[&str]) -> String {
        let idx = alg.op_index(op).unwrap();
        let args: Vec<usize> = labels.iter().map(|l| alg.element(l).unwrap()).collect();
        alg.label(alg.eval(idx, &args)).to_string()
    }

    #[test]
    fn s3_products() {
        let s3 = build_sequential(&tm(), 3);
        assert_eq!(s3.size(), 6);
        assert_eq!(ev(&s3, "prod", &["a1", "b2"]), "b1");
        assert_eq!(ev(&s3, "prod", &["a2", "b3"]), "b2");
        assert_eq!(ev(&s3, "prod", &["a1", "b3"]), "0");
    }

    #[test]
    fn s1_is_two_element_flat() {
        let s1 = build_sequential(&tm(), 1);
        assert_eq!(s1.size(), 2);
        let prod = s1.op_index("prod").unwrap();
        assert!(s1.op_is_zero(prod).unwrap());
        let t = s1.op_index("T").unwrap();
        assert!(s1.op_is_zero(t).unwrap());
    }

    #[test]
    fn s2_t_value() {
        let s2 = build_sequential(&tm(), 2);
        assert_eq!(ev(&s2, "T", &["a1", "b2", "a1", "b2"]), "b1");
    }

    #[test]
    fn s3_cg_of_b2_zero() {
        let s3 = build_sequential(&tm(), 3);
        let b2 = s3.element("b2").unwrap();
        let cg = principal_congruence(&s3, b2, 0);
        let expect: Vec<usize> = ["0", "b1", "b2"]
            .iter()
            .map(|l| s3.element(l).unwrap())
            .collect();
        let mut sorted = expect.clone();
        sorted.sort();
        assert_eq!(cg.nontrivial_blocks(), vec![sorted]);
        // Independent oracle route.
        let rel = oracle::naive_principal_congruence(&s3, b2, 0);
        assert!(oracle::partition_equals_matrix(&cg, &rel));
    }

    #[test]
    fn sequential_monoliths() {
        for n in 1..=6 {
            let s = build_sequential(&tm(), n);
            let m = monolith(&s, 64).unwrap().expect("sequential algebras are SI");
            let b1 = s.element("b1").unwrap();
            assert_eq!(
                m,
                Partition::with_block(s.size(), &[0, b1]),
                "monolith of n={n}"
            );
        }
    }

    #[test]
    fn subalgebra_generated_by_a1_b3() {
        let s3 = build_sequential(&tm(), 3);
        let a1 = s3.element("a1").unwrap();
        let b3 = s3.element("b3").unwrap();
        let sub = crate::algebra::generate_subuniverse(&s3, &[a1, b3], 100).unwrap();
        let mut want = vec![0, a1, b3];
        want.sort();
        assert_eq!(sub, want);
        assert_eq!(sub, oracle::brute_subuniverse(&s3, &[a1, b3]));
    }

    #[test]
    fn identity_embedding_into_larger_chain() {
        // S_m sits inside S_n on the matching labels; all ops agree.
        let s2 = build_sequential(&tm(), 2);
        let s4 = build_sequential(&tm(), 4);
        let embed: Vec<usize> = (0..s2.size())
            .map(|x| s4.element(s2.label(x)).unwrap())
            .collect();
        for (op_idx, op) in s2.ops().iter().enumerate() {
            let arity = op.sym.arity;
            for args in s2.tuples(arity) {
                let image: Vec<usize> = args.iter().map(|&x| embed[x]).collect();
                assert_eq!(
                    embed[s2.eval(op_idx, &args)],
                    s4.eval(op_idx, &image),
                    "op {} not preserved",
                    op.sym.name
                );
            }
        }
    }
}
