use super::*;
use crate::tm::parse_tm;

fn e(alg: &FiniteAlgebra, label: &str) -> usize {
    alg.element(label)
        .unwrap_or_else(|| panic!("no element {label}"))
}

fn ev(alg: &FiniteAlgebra, op: &str, labels: &[&str]) -> String {
    let idx = alg.op_index(op).unwrap_or_else(|| panic!("no op {op}"));
    let args: Vec<usize> = labels.iter().map(|l| e(alg, l)).collect();
    alg.label(alg.eval(idx, &args)).to_string()
}

fn one_instruction() -> TuringMachine {
    parse_tm("states 2\n1 0 1 R 0\n").unwrap()
}

fn left_writer() -> TuringMachine {
    // (state 1, read 0, write 1, move L, next 0)
    parse_tm("states 2\n1 0 1 L 0\n").unwrap()
}

#[test]
fn universe_and_signature_counts() {
    let alg = build_aprime(&one_instruction());
    assert_eq!(alg.size(), 8 + 20 * 2);
    assert_eq!(alg.ops().len(), 11 + 6);

    let tm0 = parse_tm("states 2\n").unwrap();
    let alg0 = build_aprime(&tm0);
    assert_eq!(alg0.ops().len(), 11);

    let tm2 = parse_tm("states 3\n1 0 1 R 2\n2 0 1 R 0\n").unwrap();
    let alg2 = build_aprime(&tm2);
    assert_eq!(alg2.size(), 8 + 20 * 3);
    assert_eq!(alg2.ops().len(), 11 + 12);
}

#[test]
fn omit_k_variant() {
    let alg = build_aprime_with(&one_instruction(), true);
    assert_eq!(alg.ops().len(), 16);
    assert!(alg.op_index("K").is_none());
}

#[test]
fn meet_cases() {
    let alg = build_aprime(&one_instruction());
    assert_eq!(ev(&alg, "meet", &["C", "C"]), "C");
    assert_eq!(ev(&alg, "meet", &["C", "D"]), "0");
    assert_eq!(ev(&alg, "meet", &["0", "H"]), "0");
}

#[test]
fn prod_cases() {
    let alg = build_aprime(&one_instruction());
    assert_eq!(ev(&alg, "prod", &["H", "C"]), "D");
    assert_eq!(ev(&alg, "prod", &["2", "D"]), "D");
    assert_eq!(ev(&alg, "prod", &["1", "C"]), "C");
    assert_eq!(ev(&alg, "prod", &["2", "~D"]), "~D");
    assert_eq!(ev(&alg, "prod", &["H", "~C"]), "~D");
    assert_eq!(ev(&alg, "prod", &["1", "~C"]), "~C");
    assert_eq!(ev(&alg, "prod", &["C", "H"]), "0");
}

#[test]
fn j_cases() {
    let alg = build_aprime(&one_instruction());
    assert_eq!(ev(&alg, "J", &["C", "C", "D"]), "C");
    assert_eq!(ev(&alg, "J", &["C", "~C", "C"]), "C");
    assert_eq!(ev(&alg, "J", &["C", "~C", "D"]), "0");
    assert_eq!(ev(&alg, "J", &["1", "2", "H"]), "0");
}

#[test]
fn jp_cases() {
    let alg = build_aprime(&one_instruction());
    assert_eq!(ev(&alg, "Jp", &["C", "C", "D"]), "0");
    assert_eq!(ev(&alg, "Jp", &["C", "~C", "D"]), "C");
    assert_eq!(ev(&alg, "Jp", &["H", "H", "H"]), "H");
}

#[test]
fn k_cases() {
    let alg = build_aprime(&one_instruction());
    assert_eq!(ev(&alg, "K", &["~C", "C", "D"]), "C");
    assert_eq!(ev(&alg, "K", &["C", "C", "~C"]), "~C");
    assert_eq!(ev(&alg, "K", &["1", "1", "1"]), "1");
    assert_eq!(ev(&alg, "K", &["1", "2", "H"]), "0");
}

#[test]
fn s_cases() {
    let alg = build_aprime(&one_instruction());
    assert_eq!(ev(&alg, "S1", &["1", "C", "D", "C"]), "C");
    assert_eq!(ev(&alg, "S1", &["H", "C", "C", "C"]), "0");
    assert_eq!(ev(&alg, "S2", &["C", "~C", "D", "D", "H"]), "D");
    assert_eq!(ev(&alg, "S2", &["1", "2", "D", "D", "D"]), "0");
    assert_eq!(ev(&alg, "S0", &["C(0,0,0)", "C", "C", "D"]), "C");
}

#[test]
fn t_cases() {
    let alg = build_aprime(&one_instruction());
    assert_eq!(ev(&alg, "T", &["H", "C", "H", "C"]), "D");
    assert_eq!(ev(&alg, "T", &["2", "D", "H", "C"]), "~D");
    assert_eq!(ev(&alg, "T", &["1", "1", "1", "1"]), "0");
}

#[test]
fn i_cases() {
    let alg = build_aprime(&one_instruction());
    assert_eq!(ev(&alg, "I", &["1"]), "C(1,0,0)");
    assert_eq!(ev(&alg, "I", &["H"]), "M(1,0)");
    assert_eq!(ev(&alg, "I", &["2"]), "D(1,0,0)");
    assert_eq!(ev(&alg, "I", &["C"]), "0");
}

#[test]
fn tape_op_cases_for_left_instruction() {
    // Instruction (1, 0, 1, L, 0): i=1, r=0, written bit s=1, target j=0.
    let alg = build_aprime(&left_writer());
    assert_eq!(ev(&alg, "L(1,0,0)", &["1", "1", "C(1,0,1)"]), "C(0,0,1)");
    assert_eq!(ev(&alg, "L(1,0,0)", &["H", "1", "C(1,0,0)"]), "M(0,0)");
    assert_eq!(ev(&alg, "L(1,0,0)", &["2", "H", "M(1,0)"]), "D(0,0,1)");
    assert_eq!(ev(&alg, "L(1,0,0)", &["1", "1", "~C(1,0,1)"]), "~C(0,0,1)");
    // Head-bit mismatch in the M case: u = C(1,0,1) but t = 0.
    assert_eq!(ev(&alg, "L(1,0,0)", &["H", "1", "C(1,0,1)"]), "0");
}

#[test]
fn u_op_cases() {
    let alg = build_aprime(&left_writer());
    // F = L(1,0,0); F(2, H, M(1,0)) = D(0,0,1).
    assert_eq!(ev(&alg, "U1:L(1,0,0)", &["2", "H", "H", "M(1,0)"]), "D(0,0,1)");
    assert_eq!(ev(&alg, "U1:L(1,0,0)", &["2", "1", "H", "M(1,0)"]), "0");
    assert_eq!(ev(&alg, "U0:L(1,0,0)", &["2", "2", "H", "M(1,0)"]), "D(0,0,1)");
    // y ≠ z in U1 produces the barred image.
    assert_eq!(ev(&alg, "U1:L(1,0,0)", &["2", "H", "2", "M(1,0)"]), "~D(0,0,1)");
}

#[test]
fn bar_involution() {
    assert_eq!(Elem::C { bar: false }.bar(), Some(Elem::C { bar: true }));
    assert_eq!(
        Elem::C { bar: true }.bar().unwrap().bar().unwrap(),
        Elem::C { bar: true }
    );
    assert_eq!(Elem::H.bar(), None);
    assert_eq!(
        Elem::Mi { i: 1, r: 0, bar: false }.bar(),
        Some(Elem::Mi { i: 1, r: 0, bar: true })
    );
}

#[test]
fn flatness() {
    let alg = build_aprime(&one_instruction());
    let meet = alg.op_index("meet").unwrap();
    for x in 0..alg.size() {
        assert_eq!(alg.eval(meet, &[x, x]), x);
        assert_eq!(alg.eval(meet, &[x, 0]), 0);
        for y in 0..alg.size() {
            if x != y {
                assert_eq!(alg.eval(meet, &[x, y]), 0);
            }
        }
    }
}

#[test]
fn case_tables_match_lattice_expressions_low_arity() {
    let ctx = MachineAlgebra::new(one_instruction(), false);
    let elems: Vec<Elem> = (0..ctx.size()).map(|i| ctx.elem(i)).collect();
    for &x in &elems {
        for &y in &elems {
            for &z in &elems {
                assert_eq!(j_op(x, y, z), latt::j(x, y, z), "J({x:?},{y:?},{z:?})");
                assert_eq!(jp_op(x, y, z), latt::jp(x, y, z));
                assert_eq!(k_op(x, y, z), latt::k(x, y, z));
            }
        }
    }
}

#[test]
fn e2_term_identity() {
    // S2(x, y, z, z, z) = z when x = ∂y, else 0.
    let ctx = MachineAlgebra::new(one_instruction(), false);
    let elems: Vec<Elem> = (0..ctx.size()).map(|i| ctx.elem(i)).collect();
    for &x in &elems {
        for &y in &elems {
            for &z in &elems {
                let got = s2_op(x, y, z, z, z);
                let want = if y.barrable() && Some(x) == y.bar() {
                    z
                } else {
                    Elem::Zero
                };
                assert_eq!(got, want);
            }
        }
    }
}

#[test]
fn t_of_repeated_pair_is_product() {
    let ctx = MachineAlgebra::new(one_instruction(), false);
    let elems: Vec<Elem> = (0..ctx.size()).map(|i| ctx.elem(i)).collect();
    for &w in &elems {
        for &x in &elems {
            assert_eq!(t_op(w, x, w, x), prod(w, x));
        }
    }
}

/// Support lists must contain every tuple with a nonzero value.
#[test]
fn support_complete_for_low_arities() {
    let alg = build_aprime(&one_instruction());
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let arity = op.sym.arity;
        if arity == 0 || arity > 3 {
            continue;
        }
        let support = op.support.as_ref().unwrap();
        let set: std::collections::BTreeSet<Vec<usize>> = support
            .iter()
            .map(|t| t.iter().map(|&a| a as usize).collect())
            .collect();
        for args in alg.tuples(arity) {
            if alg.eval(op_idx, &args) != 0 {
                assert!(
                    set.contains(&args),
                    "op {} nonzero on {:?} but not in support",
                    op.sym.name,
                    args
                );
            }
        }
    }
}

#[test]
fn support_sound_everywhere() {
    // Everything listed in a support must at least be a valid tuple; and
    // sampled off-support tuples must evaluate to zero.
    use rand::{Rng, SeedableRng};
    let alg = build_aprime(&one_instruction());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let arity = op.sym.arity;
        if arity == 0 {
            continue;
        }
        let support = op.support.as_ref().unwrap();
        let set: std::collections::BTreeSet<Vec<usize>> = support
            .iter()
            .map(|t| t.iter().map(|&a| a as usize).collect())
            .collect();
        for _ in 0..20_000 {
            let args: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..alg.size())).collect();
            if !set.contains(&args) {
                assert_eq!(
                    alg.eval(op_idx, &args),
                    0,
                    "op {} nonzero off support on {:?}",
                    op.sym.name,
                    args
                );
            }
        }
    }
}

#[test]
fn zero_absorption_matches_expected_classification() {
    let alg = build_aprime(&one_instruction());
    let reports = classify_zero_absorbing(&alg, 100_000, 0);
    for r in &reports {
        let expected: Vec<bool> = match r.op.as_str() {
            "J" | "Jp" | "K" => vec![true, true, false],
            "S0" | "S1" => vec![true, true, false, false],
            "S2" => vec![true, true, true, false, false],
            _ => vec![true; r.absorbing.len()],
        };
        assert_eq!(r.absorbing, expected, "op {}", r.op);
    }
}

#[test]
fn meet_commuting_reports() {
    let alg = build_aprime(&one_instruction());
    let meet = alg.op_index("meet").unwrap();
    assert!(check_meet_commuting(&alg, meet, 10_000, 0).commutes);
    let i = alg.op_index("I").unwrap();
    assert!(check_meet_commuting(&alg, i, 10_000, 0).commutes);
    // J does not commute with meet; the scan finds a counterexample.
    let j = alg.op_index("J").unwrap();
    let report = check_meet_commuting(&alg, j, 10_000, 0);
    assert!(!report.commutes);
    assert!(report.counterexample.is_some());
}

#[test]
fn json_round_trip_by_rule_id() {
    let tm = one_instruction();
    let alg = build_aprime(&tm);
    let text = crate::algebra::json::dump_string(&alg).unwrap();
    let loaded = crate::algebra::json::load_string(&text, &builtin_rule_resolver).unwrap();
    assert_eq!(loaded.labels(), alg.labels());
    let j = alg.op_index("J").unwrap();
    for x in 0..alg.size() {
        assert_eq!(loaded.eval(j, &[x, x, 0]), alg.eval(j, &[x, x, 0]));
    }
}

#[test]
fn config_encoding_matches_expected_symbols() {
    let cfg = Configuration::new([2], 1, 1); // state 1, head 1, bit at 2
    // reads bit 0 at the head
    assert_eq!(
        config_coordinate(&cfg, 0),
        Elem::Ci { i: 1, r: 0, s: 0, bar: false }
    );
    assert_eq!(config_coordinate(&cfg, 1), Elem::Mi { i: 1, r: 0, bar: false });
    assert_eq!(
        config_coordinate(&cfg, 2),
        Elem::Di { i: 1, r: 0, s: 1, bar: false }
    );
}

#[test]
fn alpha_beta_vectors() {
    assert_eq!(alpha_coordinate(0, -1), Elem::One);
    assert_eq!(alpha_coordinate(0, 0), Elem::H);
    assert_eq!(alpha_coordinate(0, 1), Elem::Two);
    assert_eq!(beta_coordinate(0, -1), Elem::C { bar: false });
    assert_eq!(beta_coordinate(0, 0), Elem::D { bar: false });
}
