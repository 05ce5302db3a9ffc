use super::*;
use crate::algebra::Partition;
use crate::tm::parse_tm;

/// Halts on the blank tape in one step; marches right over 1s.
fn halting_two_state() -> TuringMachine {
    parse_tm("states 2\n1 0 1 R 0\n1 1 1 R 1\n").unwrap()
}

fn stuck_all_ones(n: &Interval) -> Configuration {
    Configuration::new(n.iter(), n.hi, 1)
}

fn spec_03() -> MachineSpec {
    let tm = halting_two_state();
    let n = Interval::new(0, 3);
    let window = Interval::new(0, 3);
    let p = stuck_all_ones(&n);
    MachineSpec::with_default_phi(&tm, n, window, p)
}

#[test]
fn default_phi_is_the_all_ones_walk() {
    let spec = spec_03();
    assert_eq!(spec.phi.len(), 4);
    for q in &spec.phi {
        assert_eq!(q.state, 1);
        assert!(spec.n.iter().all(|k| q.bit(k) == 1));
    }
    let heads: std::collections::BTreeSet<i64> = spec.phi.iter().map(|q| q.head).collect();
    assert_eq!(heads.into_iter().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
}

#[test]
fn phi_conditions_pass_on_default() {
    let spec = spec_03();
    let report = check_phi_conditions(&spec);
    assert!(report.all_pass(), "{:?}", report.conditions);
}

#[test]
fn phi_condition_four_rejects_halting_cone() {
    let mut spec = spec_03();
    // A configuration that reads 0 at the head halts in one step.
    spec.phi.push(Configuration::new([1, 2, 3], 0, 1));
    let report = check_phi_conditions(&spec);
    assert!(!report.conditions[3].0, "{:?}", report.conditions);
}

#[test]
fn phi_condition_five_rejects_singleton_interval() {
    let tm = halting_two_state();
    let n = Interval::new(0, 0);
    let window = Interval::new(0, 0);
    let p = stuck_all_ones(&n);
    let spec = MachineSpec::with_default_phi(&tm, n, window, p);
    let report = check_phi_conditions(&spec);
    assert!(!report.conditions[4].0);
}

#[test]
fn pn_universe_and_i_action() {
    let spec = spec_03();
    let pn = build_machine_pn(&spec).unwrap();
    // 1 + |N| + |Ω_N| where Ω has 4 heads, 2 states, 2^4 tapes.
    assert_eq!(pn.algebra.size(), 1 + 4 + 4 * 2 * 16);
    let i = pn.algebra.op_index("I").unwrap();
    let a0 = pn.algebra.element("a(0)").unwrap();
    let init = pn.config_index(&Configuration::initial(0)).unwrap();
    assert_eq!(pn.algebra.eval(i, &[a0]), init);
    assert_eq!(pn.algebra.eval(i, &[init]), 0);
}

#[test]
fn pn_tape_op_steps_configurations() {
    let spec = spec_03();
    let pn = build_machine_pn(&spec).unwrap();
    let alg = &pn.algebra;
    // R(1,1,1) applied to (a(0), a(1), all-ones head-0) steps the machine.
    let op = alg.op_index("R(1,1,1)").unwrap();
    let a0 = alg.element("a(0)").unwrap();
    let a1 = alg.element("a(1)").unwrap();
    let q0 = pn.config_index(&Configuration::new([0, 1, 2, 3], 0, 1)).unwrap();
    let q1 = pn.config_index(&Configuration::new([0, 1, 2, 3], 1, 1)).unwrap();
    assert_eq!(alg.eval(op, &[a0, a1, q0]), q1);
    // Wrong new-cell bit parameter gives 0.
    let op0 = alg.op_index("R(1,1,0)").unwrap();
    assert_eq!(alg.eval(op0, &[a0, a1, q0]), 0);
    // Successor leaving the interval gives 0: head 3 steps out of N.
    let a2 = alg.element("a(2)").unwrap();
    let a3 = alg.element("a(3)").unwrap();
    let q3 = pn.config_index(&stuck_all_ones(&spec.n)).unwrap();
    assert_eq!(alg.eval(op, &[a2, a3, q3]), 0);
}

#[test]
fn pn_u_identities() {
    let spec = spec_03();
    let pn = build_machine_pn(&spec).unwrap();
    let alg = &pn.algebra;
    let f = alg.op_index("R(1,1,1)").unwrap();
    let u1 = alg.op_index("U1:R(1,1,1)").unwrap();
    let u0 = alg.op_index("U0:R(1,1,1)").unwrap();
    let a0 = alg.element("a(0)").unwrap();
    let a1 = alg.element("a(1)").unwrap();
    for u in 0..alg.size() {
        let want = alg.eval(f, &[a0, a1, u]);
        assert_eq!(alg.eval(u1, &[a0, a1, a1, u]), want);
        assert_eq!(alg.eval(u0, &[a0, a0, a1, u]), want);
        // Off-pattern applications are 0.
        assert_eq!(alg.eval(u1, &[a0, a0, a1, u]), 0);
        assert_eq!(alg.eval(u0, &[a0, a1, a1, u]), 0);
    }
}

#[test]
fn pn_jp_of_equal_args_is_identity_on_configs() {
    let spec = spec_03();
    let pn = build_machine_pn(&spec).unwrap();
    let alg = &pn.algebra;
    let jp = alg.op_index("Jp").unwrap();
    for q in pn.config_base..alg.size() {
        assert_eq!(alg.eval(jp, &[q, q, q]), q);
    }
}

#[test]
fn theta_phi_quotient_is_si_with_p_zero_monolith() {
    let spec = spec_03();
    let result = theta_phi_quotient(&spec).unwrap();
    // Quotient universe: zero class, 4 sigma elements, 4 phi configs.
    assert_eq!(result.quotient.algebra.size(), 9);
    let mono = result.monolith.expect("quotient is subdirectly irreducible");
    let p_class = result.quotient.projection[result.pn.config_index(&spec.p).unwrap()];
    let zero_class = result.quotient.projection[0];
    assert_eq!(
        mono,
        Partition::with_block(9, &[zero_class, p_class]),
        "monolith class is {{P, 0}}"
    );
}

#[test]
fn theta_phi_rejects_bad_phi() {
    let mut spec = spec_03();
    spec.phi.push(Configuration::new([1, 2, 3], 0, 1));
    assert!(matches!(
        theta_phi_quotient(&spec),
        Err(ThetaPhiError::Conditions(_))
    ));
}

#[test]
fn quotient_by_identity_partition_is_pn_itself() {
    let spec = spec_03();
    let pn = build_machine_pn(&spec).unwrap();
    let q = crate::algebra::quotient(&pn.algebra, &Partition::identity(pn.algebra.size()))
        .unwrap();
    assert_eq!(q.algebra.size(), pn.algebra.size());
}

#[test]
fn spec_text_round_trip() {
    let tm = halting_two_state();
    let text = "N 0 3\nwindow 0 3\nP 1@3:1111\n";
    let spec = MachineSpec::parse(&tm, text).unwrap();
    assert_eq!(spec.p, stuck_all_ones(&Interval::new(0, 3)));
    assert_eq!(spec.phi.len(), 4);
    // Explicit phi list override.
    let text = "N 0 3\nwindow 0 3\nP 1@3:1111\nphi 1@3:1111\n";
    let spec = MachineSpec::parse(&tm, text).unwrap();
    assert_eq!(spec.phi.len(), 1);
    // Window must contain N.
    let text = "N 0 3\nwindow 0 2\nP 1@3:111\n";
    assert!(matches!(
        MachineSpec::parse(&tm, text),
        Err(SpecParseError::WindowTooSmall)
    ));
}

#[test]
fn k_agrees_with_triple_meet_when_s2_vanishes() {
    // On the quotient: S2 ≡ 0 forces J = x∧y and J' = K = x∧y∧z.
    let spec = spec_03();
    let result = theta_phi_quotient(&spec).unwrap();
    let alg = &result.quotient.algebra;
    assert!(crate::si::s2_identically_zero(alg));
    let (j, jp, k, meet) = (
        alg.op_index("J").unwrap(),
        alg.op_index("Jp").unwrap(),
        alg.op_index("K").unwrap(),
        alg.op_index("meet").unwrap(),
    );
    for x in 0..alg.size() {
        for y in 0..alg.size() {
            let xy = alg.eval(meet, &[x, y]);
            for z in 0..alg.size() {
                let xyz = alg.eval(meet, &[xy, z]);
                assert_eq!(alg.eval(j, &[x, y, z]), xy);
                assert_eq!(alg.eval(jp, &[x, y, z]), xyz);
                assert_eq!(alg.eval(k, &[x, y, z]), xyz);
            }
        }
    }
}
