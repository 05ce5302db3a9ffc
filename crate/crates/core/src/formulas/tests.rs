use super::*;
use crate::algebra::{generate_subuniverse, principal_congruence, product, subalgebra};
use crate::aprime::build_aprime;
use crate::si::{build_sequential, build_small_si, SmallSiKind};
use crate::tm::{parse_tm, TuringMachine};

fn tm() -> TuringMachine {
    parse_tm("states 2\n1 0 1 R 0\n").unwrap()
}

/// Library with product terms from the sequential/small catalog and
/// identity-only machine terms.
fn library() -> FormulaLibrary {
    let reference = build_aprime(&tm());
    let s3 = build_sequential(&tm(), 3);
    let s5 = build_sequential(&tm(), 5);
    let two = build_small_si(&tm(), SmallSiKind::TwoElt);
    let three = build_small_si(&tm(), SmallSiKind::ThreeElt);
    let w = build_small_si(&tm(), SmallSiKind::W);
    let p = compute_product_terms_p(&[&s3, &s5, &two, &three, &w]).unwrap();
    let (s, t) = compute_machine_terms_st(&reference, &[]);
    build_library(&reference, p, s, t)
}

/// Three-element demonstration algebra {0, 1, C} over the machine
/// signature: the machine-algebra case tables restricted to the set, with
/// I redefined to 0 so the set is closed. e_1(1, ·) is the identity.
fn tiny_m1() -> crate::algebra::FiniteAlgebra {
    use crate::algebra::{OpKind, Operation};
    use crate::aprime::Elem;
    use std::sync::Arc;
    let reference = build_aprime(&tm());
    let elems = [Elem::Zero, Elem::One, Elem::C { bar: false }];
    let back = move |e: Elem| -> usize { elems.iter().position(|&x| x == e).unwrap_or(0) };
    let lift = move |i: usize| -> Elem { elems[i] };
    let mut ops: Vec<Operation> = Vec::new();
    for sym in reference.ops().iter().map(|o| o.sym.clone()) {
        let f: Arc<dyn Fn(&[Elem]) -> Elem + Send + Sync> = match sym.name.as_str() {
            "zero" => Arc::new(|_: &[Elem]| Elem::Zero),
            "meet" => Arc::new(|a: &[Elem]| crate::aprime::meet(a[0], a[1])),
            "prod" => Arc::new(|a: &[Elem]| crate::aprime::prod(a[0], a[1])),
            "J" => Arc::new(|a: &[Elem]| crate::aprime::j_op(a[0], a[1], a[2])),
            "Jp" => Arc::new(|a: &[Elem]| crate::aprime::jp_op(a[0], a[1], a[2])),
            "K" => Arc::new(|a: &[Elem]| crate::aprime::k_op(a[0], a[1], a[2])),
            "S0" => Arc::new(|a: &[Elem]| crate::aprime::s0_op(a[0], a[1], a[2], a[3])),
            "S1" => Arc::new(|a: &[Elem]| crate::aprime::s1_op(a[0], a[1], a[2], a[3])),
            "S2" => Arc::new(|a: &[Elem]| crate::aprime::s2_op(a[0], a[1], a[2], a[3], a[4])),
            "T" => Arc::new(|a: &[Elem]| crate::aprime::t_op(a[0], a[1], a[2], a[3])),
            _ => Arc::new(|_: &[Elem]| Elem::Zero),
        };
        let id = format!("tiny:{}", sym.name);
        ops.push(Operation {
            sym,
            kind: OpKind::Rule {
                id,
                eval: Arc::new(move |args: &[usize]| {
                    let e: Vec<Elem> = args.iter().map(|&a| lift(a)).collect();
                    back(f(&e))
                }),
            },
            support: None,
        });
    }
    crate::algebra::FiniteAlgebra::new(vec!["0".into(), "1".into(), "C".into()], ops)
}

#[test]
fn eval_basics() {
    let lib = library();
    let alg = build_small_si(&tm(), SmallSiKind::TwoElt);
    let mut ev = Evaluator::new(&alg, &lib, EvalOptions::default()).unwrap();
    // x = x
    let f = Formula::Eq(Term::Const(1), Term::Const(1));
    assert!(ev.eval(&f, &mut vec![]).unwrap());
    // ∃t (t = a ∧ t = b) is false when a ≠ b
    let f = Formula::Exists(
        vec![0],
        Box::new(Formula::And(vec![
            Formula::Eq(Term::Var(0), Term::Const(0)),
            Formula::Eq(Term::Var(0), Term::Const(1)),
        ])),
    );
    assert!(!ev.eval(&f, &mut vec![None]).unwrap());
}

#[test]
fn unbound_variable_errors() {
    let lib = library();
    let alg = build_small_si(&tm(), SmallSiKind::TwoElt);
    let mut ev = Evaluator::new(&alg, &lib, EvalOptions::default()).unwrap();
    let f = Formula::Eq(Term::Var(3), Term::Const(0));
    assert_eq!(
        ev.eval(&f, &mut vec![None, None, None, None]),
        Err(EvalError::UnboundVar(3))
    );
}

#[test]
fn budget_exceeded_reports() {
    let lib = library();
    let alg = build_aprime(&tm());
    let mut ev = Evaluator::new(&alg, &lib, EvalOptions { budget: 10 }).unwrap();
    let f = Formula::Exists(
        vec![0, 1, 2],
        Box::new(Formula::Neq(Term::Var(0), Term::Var(0))),
    );
    assert_eq!(
        ev.eval(&f, &mut vec![None, None, None]),
        Err(EvalError::BudgetExceeded(10))
    );
}

#[test]
fn e_i_values_on_machine_algebra() {
    let alg = build_aprime(&tm());
    let one = alg.element("1").unwrap();
    let c = alg.element("C").unwrap();
    let h = alg.element("H").unwrap();
    let d = alg.element("D").unwrap();
    let cbar = alg.element("~C").unwrap();
    assert_eq!(e_i(&alg, 1, &[one], c), c);
    assert_eq!(e_i(&alg, 1, &[h], c), 0);
    assert_eq!(e_i(&alg, 2, &[c, cbar], d), d);
}

#[test]
fn m_class_membership() {
    let alg = tiny_m1();
    let one = alg.element("1").unwrap();
    assert_eq!(in_class_mi(&alg, 1), Some(vec![one]));

    // The full machine algebra carries identity witnesses for all three
    // gates: any V_0 symbol for e_0, the head marker 1 for e_1, and any
    // barred pair for e_2. The e-conditions only discriminate on algebras
    // that lack gate elements.
    let aprime = build_aprime(&tm());
    assert!(in_class_mi(&aprime, 0).is_some());
    assert_eq!(in_class_mi(&aprime, 1), Some(vec![aprime.element("1").unwrap()]));
    assert!(in_class_mi(&aprime, 2).is_some());
    let w = build_small_si(&tm(), SmallSiKind::W);
    for i in 0..3 {
        assert_eq!(in_class_mi(&w, i), None);
    }

    let trivial = {
        let z = generate_subuniverse(&aprime, &[], 4).unwrap();
        subalgebra(&aprime, &z)
    };
    assert_eq!(trivial.size(), 1);
    assert!(in_class_mi(&trivial, 0).is_some());
}

#[test]
fn jonsson_identities() {
    let alg = tiny_m1();
    let one = alg.element("1").unwrap();
    assert_eq!(jonsson_check(&alg, 1, &[one]), Ok(()));

    // With a non-identity witness the scheme fails and reports a triple.
    let aprime = build_aprime(&tm());
    let h = aprime.element("H").unwrap();
    let err = jonsson_check(&aprime, 1, &[h]).unwrap_err();
    assert!(!err.identity.is_empty());

    let trivial = {
        let z = generate_subuniverse(&aprime, &[], 4).unwrap();
        subalgebra(&aprime, &z)
    };
    assert_eq!(jonsson_check(&trivial, 0, &[0]), Ok(()));
}

#[test]
fn library_structure() {
    let lib = library();
    let psi1 = lib.def("psi_1");
    match &psi1.body {
        Formula::Or(parts) => assert_eq!(parts.len(), 7),
        other => panic!("psi_1 should be a disjunction, got {other:?}"),
    }
    let psi2 = lib.def("psi_2");
    assert!(matches!(&psi2.body, Formula::Exists(_, _)));
    let gamma = lib.def("gamma_one_sided");
    match &gamma.body {
        Formula::Or(parts) => assert_eq!(parts.len(), 4),
        other => panic!("gamma_one_sided should be a disjunction, got {other:?}"),
    }
    match &lib.def("gamma").body {
        Formula::Or(parts) => assert_eq!(parts.len(), 2),
        other => panic!("gamma should be symmetrized, got {other:?}"),
    }
    let dump = lib.sexpr("psi_2");
    assert!(dump.contains("psi_1"));
    assert!(lib.sexpr("psi_S").contains("psi0"));
}

#[test]
fn psi_dot_on_two_element_algebra() {
    let lib = library();
    let alg = build_small_si(&tm(), SmallSiKind::TwoElt);
    let c = alg.element("C").unwrap();
    let mut ev = Evaluator::new(&alg, &lib, EvalOptions::default()).unwrap();
    assert!(ev.eval_named("psi_dot", &[c, 0, c, 0]).unwrap());
    assert!(ev.eval_named("psi_3", &[c, 0, c, 0]).unwrap());
    assert!(pi_psi_semantic(&mut ev, "psi_3", c, 0).unwrap());
    assert!(pi_psi_semantic(&mut ev, "psi", c, 0).unwrap());
}

#[test]
fn pi_of_equal_pair_defines_identity() {
    let lib = library();
    let alg = build_small_si(&tm(), SmallSiKind::W);
    let mut ev = Evaluator::new(&alg, &lib, EvalOptions::default()).unwrap();
    for c in 0..alg.size() {
        assert!(
            pi_psi_semantic(&mut ev, "psi", c, c).unwrap(),
            "psi(-,-,{c},{c}) must define the identity"
        );
    }
}

#[test]
fn pi_rejects_non_defining_pair_in_w() {
    // In W, Cg(H, 0) is the full congruence but psi(-,-,H,0) misses the
    // {D, 0} pairs reachable only through deeper products.
    let lib = library();
    let alg = build_small_si(&tm(), SmallSiKind::W);
    let h = alg.element("H").unwrap();
    let d = alg.element("D").unwrap();
    let mut ev = Evaluator::new(&alg, &lib, EvalOptions::default()).unwrap();
    assert!(pi_psi_semantic(&mut ev, "psi", d, 0).unwrap());
    assert!(!pi_psi_semantic(&mut ev, "psi_3", h, 0).unwrap());
}

#[test]
fn psi_s_on_e_image_pairs() {
    // c, d in the e_1(1,·) image: psi_S captures the decreasing pairs of
    // Cg(c, d), and the split form psi_2 the whole relation.
    let lib = library();
    let alg = tiny_m1();
    let c = alg.element("C").unwrap();
    let mut ev = Evaluator::new(&alg, &lib, EvalOptions::default()).unwrap();
    assert!(ev.eval_named("psi_S", &[c, 0, c, 0]).unwrap());
    let cg = principal_congruence(&alg, c, 0);
    for u in 0..alg.size() {
        for v in 0..alg.size() {
            if u == v {
                continue;
            }
            if alg.leq(v, u) {
                assert_eq!(
                    ev.eval_named("psi_S", &[u, v, c, 0]).unwrap(),
                    cg.same(u, v),
                    "psi_S vs Cg oracle at decreasing ({u},{v})"
                );
            }
            assert_eq!(
                ev.eval_named("psi_2", &[u, v, c, 0]).unwrap(),
                cg.same(u, v),
                "psi_2 vs Cg oracle at ({u},{v})"
            );
        }
    }
}

#[test]
fn witness_construction_on_small_cd_algebra() {
    let alg = tiny_m1();
    let c = alg.element("C").unwrap();
    let w = dpsc_witness_jonsson(&alg, c, 0, 64).unwrap();
    let (wc, wd) = w.pair;
    assert_ne!(wc, wd);
    let cg_ab = principal_congruence(&alg, c, 0);
    assert!(cg_ab.same(wc, wd));
    assert!(matches!(
        dpsc_witness_jonsson(&alg, c, c, 64),
        Err(DpscError::EqualPair)
    ));
}

#[test]
fn witness_on_product_tracks_differing_coordinate() {
    let alg = tiny_m1();
    let prod_alg = product(&alg, &alg);
    let c = alg.element("C").unwrap();
    // (C, C) vs (0, C): pairs differ in the first coordinate only.
    let a = c * alg.size() + c;
    let b = 0 * alg.size() + c;
    let w = dpsc_witness_jonsson(&prod_alg, a, b, 64).unwrap();
    let (wc, wd) = w.pair;
    assert_ne!(wc, wd);
    // The witness pair differs in the first coordinate and agrees in the
    // second.
    assert_ne!(wc / alg.size(), wd / alg.size());
    assert_eq!(wc % alg.size(), wd % alg.size());
}

#[test]
fn product_term_oracle_examples() {
    // Catalog containing S_3 forces chains up to length 3.
    let s3 = build_sequential(&tm(), 3);
    let p = compute_product_terms_p(&[&s3]).unwrap();
    assert!(p.iter().any(|s| *s == ProductShape::LeftChain(3)));
    assert!(!p.iter().any(|s| *s == ProductShape::LeftChain(4)));
}

#[test]
fn dpsc_check_passes_on_small_catalog() {
    let lib = library();
    for (name, alg) in [
        ("two", build_small_si(&tm(), SmallSiKind::TwoElt)),
        ("three", build_small_si(&tm(), SmallSiKind::ThreeElt)),
        ("w", build_small_si(&tm(), SmallSiKind::W)),
        ("tiny", tiny_m1()),
    ] {
        let report = dpsc_check(&alg, &lib, EvalOptions::default(), 64).unwrap();
        let detail: Vec<String> = report
            .failures
            .iter()
            .map(|&(a, b)| format!("({},{})", alg.label(a), alg.label(b)))
            .collect();
        assert!(report.passed, "{name}: failures {detail:?}");
        assert_eq!(
            report.outcomes.len(),
            alg.size() * alg.size() - alg.size(),
            "{name}: every ordered pair is witnessed"
        );
    }
}

#[test]
fn dpsc_check_vacuous_on_trivial_algebra() {
    let lib = library();
    let aprime = build_aprime(&tm());
    let trivial = {
        let z = generate_subuniverse(&aprime, &[], 4).unwrap();
        subalgebra(&aprime, &z)
    };
    let report = dpsc_check(&trivial, &lib, EvalOptions::default(), 64).unwrap();
    assert!(report.passed);
    assert!(report.outcomes.is_empty());
}

#[test]
fn w_transcript_names_routes() {
    let lib = library();
    let alg = build_small_si(&tm(), SmallSiKind::W);
    let report = dpsc_check(&alg, &lib, EvalOptions::default(), 64).unwrap();
    assert!(report.passed);
    assert!(report
        .outcomes
        .iter()
        .all(|o| o.route.starts_with("gamma_")));
    // At least one pair needs a genuine product step (H,0 and C,0 style).
    assert!(report
        .outcomes
        .iter()
        .any(|o| o.route.contains("gamma_dot") && o.route.contains("y1")));
}

#[test]
fn psi_soundness_spot_check() {
    // Every true psi instance lies in the union-find congruence.
    let lib = library();
    let alg = build_small_si(&tm(), SmallSiKind::W);
    let mut ev = Evaluator::new(&alg, &lib, EvalOptions::default()).unwrap();
    for c in 0..alg.size() {
        for d in 0..alg.size() {
            let cg = principal_congruence(&alg, c, d);
            for u in 0..alg.size() {
                for v in 0..alg.size() {
                    if u != v && ev.eval_named("psi", &[u, v, c, d]).unwrap() {
                        assert!(cg.same(u, v), "unsound at ({u},{v}) from ({c},{d})");
                    }
                }
            }
        }
    }
}

#[test]
fn monotone_disjunction() {
    // psi_1 is implied by each member.
    let lib = library();
    let alg = build_small_si(&tm(), SmallSiKind::W);
    let mut ev = Evaluator::new(&alg, &lib, EvalOptions::default()).unwrap();
    for name in ["psi_S", "psi_J", "psi_Jp", "psi_JpJ", "psi_JS", "psi_JpS", "psi_JpJS"] {
        for u in 0..alg.size() {
            for vv in 0..alg.size() {
                if ev.eval_named(name, &[u, vv, 1, 0]).unwrap() {
                    assert!(ev.eval_named("psi_1", &[u, vv, 1, 0]).unwrap());
                }
            }
        }
    }
}

#[test]
fn e_image_downward_closed() {
    let alg = build_aprime(&tm());
    for i in 0..3 {
        for nbar in ei_params(alg.size(), i).into_iter().step_by(7) {
            for u in 0..alg.size() {
                if e_i(&alg, i, &nbar, u) == u {
                    // flat order below u is {u, 0}
                    assert_eq!(e_i(&alg, i, &nbar, 0), 0);
                }
            }
        }
    }
}

#[test]
fn zeta_holds_on_fsi_and_fails_on_non_fsi() {
    let lib = library();
    // W is subdirectly irreducible, hence finitely subdirectly irreducible.
    let w = build_small_si(&tm(), SmallSiKind::W);
    let mut ev = Evaluator::new(&w, &lib, EvalOptions::default()).unwrap();
    assert!(ev.eval_named("zeta", &[]).unwrap());
    assert!(crate::algebra::is_fsi(&w, 64).unwrap());

    // TwoElt x TwoElt is not FSI, and zeta agrees.
    let two = build_small_si(&tm(), SmallSiKind::TwoElt);
    let sq = product(&two, &two);
    assert!(!crate::algebra::is_fsi(&sq, 64).unwrap());
    let mut ev = Evaluator::new(&sq, &lib, EvalOptions::default()).unwrap();
    assert!(!ev.eval_named("zeta", &[]).unwrap());
}
