//! Construction of the named formula library: the chain-shape witnesses
//! ψ_S, ψ_J, ψ_J', ψ_J'J and their S-tailed variants, the split forms ψ_2,
//! ψ_3, ψ_4, the witness-producing Γ family, and the subdirect-irreducibility
//! sentences.

use std::collections::HashMap;

use crate::algebra::FiniteAlgebra;

use super::ast::{Formula, NamedFormula, Term, VarId};
use super::terms::{MachineTermShape, ProductShape};

/// Implementations of the base leaves ψ0/Γ0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseStrategy {
    /// Semantic: membership in the union-find congruence of the last two
    /// arguments. Sound by definition and exact on the base class.
    CgMembership,
}

#[derive(Debug, Clone)]
pub struct FormulaLibrary {
    pub op_names: Vec<String>,
    pub base_names: Vec<String>,
    pub bases: Vec<BaseStrategy>,
    pub defs: Vec<NamedFormula>,
    pub names: HashMap<String, usize>,
    pub product_terms: Vec<ProductShape>,
    pub machine_terms_s: Vec<MachineTermShape>,
    pub machine_terms_t: Vec<MachineTermShape>,
}

impl FormulaLibrary {
    pub fn def(&self, name: &str) -> &NamedFormula {
        &self.defs[self.names[name]]
    }

    pub fn sexpr(&self, name: &str) -> String {
        let def = self.def(name);
        let names: Vec<String> = self.defs.iter().map(|d| d.name.clone()).collect();
        format!(
            "({} ({}) {})",
            def.name,
            def.params
                .iter()
                .map(|p| format!("v{p}"))
                .collect::<Vec<_>>()
                .join(" "),
            super::ast::SExpr {
                formula: &def.body,
                op_names: &self.op_names,
                def_names: &names,
                base_names: &self.base_names,
            }
        )
    }
}

struct Ops {
    prod: usize,
    j: usize,
    jp: usize,
    s: [usize; 3],
    i_op: usize,
    tape: HashMap<String, usize>,
}

struct DefBuilder {
    name: String,
    params: Vec<VarId>,
    next: VarId,
}

impl DefBuilder {
    fn with_params(name: &str, count: usize) -> Self {
        DefBuilder {
            name: name.to_string(),
            params: (0..count as u32).collect(),
            next: count as u32,
        }
    }

    fn fresh(&mut self) -> VarId {
        let v = self.next;
        self.next += 1;
        v
    }

    fn fresh_many(&mut self, k: usize) -> Vec<VarId> {
        (0..k).map(|_| self.fresh()).collect()
    }

    fn finish(self, body: Formula) -> NamedFormula {
        NamedFormula {
            name: self.name,
            params: self.params.clone(),
            var_count: self.next as usize,
            body,
        }
    }
}

fn v(id: VarId) -> Term {
    Term::Var(id)
}

/// `e_i(m̄, t)` as a term.
fn e_term(ops: &Ops, i: usize, mbar: &[VarId], t: &Term) -> Term {
    let mut args: Vec<Term> = mbar.iter().map(|&m| v(m)).collect();
    args.extend([t.clone(), t.clone(), t.clone()]);
    Term::App(ops.s[i], args)
}

/// `S_j(m̄, a, b, c)` as a term.
fn s_term(ops: &Ops, j: usize, mbar: &[VarId], a: Term, b: Term, c: Term) -> Term {
    let mut args: Vec<Term> = mbar.iter().map(|&m| v(m)).collect();
    args.extend([a, b, c]);
    Term::App(ops.s[j], args)
}

fn ei_arity(i: usize) -> usize {
    if i == 2 {
        2
    } else {
        1
    }
}

/// Product-shape term over constant variables and a main term.
fn product_term(ops: &Ops, shape: &ProductShape, consts: &[VarId], main: Term) -> Term {
    match shape {
        ProductShape::LeftChain(m) => {
            let mut acc = main;
            for k in (0..*m).rev() {
                acc = Term::App(ops.prod, vec![v(consts[k]), acc]);
            }
            acc
        }
        ProductShape::RightTail(m) => {
            let mut acc = Term::App(ops.prod, vec![main, v(consts[*m - 1])]);
            for k in (0..*m - 1).rev() {
                acc = Term::App(ops.prod, vec![v(consts[k]), acc]);
            }
            acc
        }
    }
}

/// Machine-shape term over constant variables and a main term.
fn machine_term(ops: &Ops, shape: &MachineTermShape, consts: &[VarId], main: Term) -> Term {
    let mut acc = main;
    for (k, name) in shape.ops.iter().enumerate().rev() {
        let op = ops.tape[name];
        acc = Term::App(op, vec![v(consts[2 * k]), v(consts[2 * k + 1]), acc]);
    }
    acc
}

/// Builds the library against a reference algebra's signature.
pub fn build_library(
    reference: &FiniteAlgebra,
    product_terms: Vec<ProductShape>,
    machine_terms_s: Vec<MachineTermShape>,
    machine_terms_t: Vec<MachineTermShape>,
) -> FormulaLibrary {
    let op_names: Vec<String> = reference.ops().iter().map(|o| o.sym.name.clone()).collect();
    let idx = |name: &str| -> usize {
        op_names
            .iter()
            .position(|n| n == name)
            .unwrap_or_else(|| panic!("signature lacks {name}"))
    };
    let ops = Ops {
        prod: idx("prod"),
        j: idx("J"),
        jp: idx("Jp"),
        s: [idx("S0"), idx("S1"), idx("S2")],
        i_op: idx("I"),
        tape: op_names
            .iter()
            .enumerate()
            .filter(|(_, n)| n.starts_with("L(") || n.starts_with("R("))
            .map(|(i, n)| (n.clone(), i))
            .collect(),
    };

    let base_names = vec!["psi0".to_string(), "gamma0".to_string()];
    let bases = vec![BaseStrategy::CgMembership, BaseStrategy::CgMembership];
    let psi0 = 0usize;
    let gamma0 = 1usize;

    let mut defs: Vec<NamedFormula> = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let add = |def: NamedFormula, defs: &mut Vec<NamedFormula>, names: &mut HashMap<String, usize>| -> usize {
        let id = defs.len();
        names.insert(def.name.clone(), id);
        defs.push(def);
        id
    };

    // ψ_S(w,x,y,z): some retraction fixes (y,z), sends (w,x) to a pair
    // related by the base congruence of (y,z), and an S head over those
    // same images reconstructs (w,x). Tying the inner images of the
    // reconstruction to the first block's retraction is what makes the
    // S-head application a polynomial image of a related pair.
    let psi_s = {
        let mut b = DefBuilder::with_params("psi_S", 4);
        let (w, x, y, z) = (v(0), v(1), v(2), v(3));
        let mut disjuncts = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                let nbar = b.fresh_many(ei_arity(i));
                let mbar = b.fresh_many(ei_arity(j));
                let ew = e_term(&ops, i, &nbar, &w);
                let ex = e_term(&ops, i, &nbar, &x);
                let reconstruct = Formula::Exists(
                    mbar.clone(),
                    Box::new(Formula::And(vec![
                        Formula::Eq(
                            w.clone(),
                            s_term(&ops, j, &mbar, w.clone(), x.clone(), ew.clone()),
                        ),
                        Formula::Eq(
                            x.clone(),
                            s_term(&ops, j, &mbar, w.clone(), x.clone(), ex.clone()),
                        ),
                    ])),
                );
                disjuncts.push(Formula::Exists(
                    nbar.clone(),
                    Box::new(Formula::And(vec![
                        Formula::Eq(y.clone(), e_term(&ops, i, &nbar, &y)),
                        Formula::Eq(z.clone(), e_term(&ops, i, &nbar, &z)),
                        Formula::Base(psi0, vec![ew, ex, y.clone(), z.clone()]),
                        reconstruct,
                    ])),
                ));
            }
        }
        add(b.finish(Formula::Or(disjuncts)), &mut defs, &mut names)
    };

    // ψ_J(w,x,y,z): a single collapsed J link over an S2 image.
    let psi_j = {
        let mut b = DefBuilder::with_params("psi_J", 4);
        let (w, x, y, z) = (v(0), v(1), v(2), v(3));
        let bb = b.fresh();
        let e2w = |t: &Term| -> Term {
            Term::App(
                ops.s[2],
                vec![w.clone(), v(bb), t.clone(), t.clone(), t.clone()],
            )
        };
        let body = Formula::Exists(
            vec![bb],
            Box::new(Formula::And(vec![
                Formula::Eq(
                    w.clone(),
                    Term::App(ops.j, vec![w.clone(), v(bb), e2w(&w)]),
                ),
                Formula::Eq(
                    x.clone(),
                    Term::App(ops.j, vec![w.clone(), v(bb), e2w(&x)]),
                ),
                Formula::Call(psi_s, vec![e2w(&w), e2w(&x), y, z]),
            ])),
        );
        add(b.finish(body), &mut defs, &mut names)
    };

    // ψ_J'(w,x,y,z): a single J' link over an e_i image.
    let psi_jp = {
        let mut b = DefBuilder::with_params("psi_Jp", 4);
        let (w, x, y, z) = (v(0), v(1), v(2), v(3));
        let mut disjuncts = Vec::new();
        for i in 0..3 {
            let nbar = b.fresh_many(ei_arity(i));
            let a = b.fresh();
            let bb = b.fresh();
            let mut vars = nbar.clone();
            vars.extend([a, bb]);
            disjuncts.push(Formula::Exists(
                vars,
                Box::new(Formula::And(vec![
                    Formula::Eq(
                        w.clone(),
                        Term::App(ops.jp, vec![v(a), v(bb), e_term(&ops, i, &nbar, &w)]),
                    ),
                    Formula::Eq(
                        x.clone(),
                        Term::App(ops.jp, vec![v(a), v(bb), e_term(&ops, i, &nbar, &x)]),
                    ),
                    Formula::Call(
                        psi_s,
                        vec![
                            e_term(&ops, i, &nbar, &w),
                            e_term(&ops, i, &nbar, &x),
                            y.clone(),
                            z.clone(),
                        ],
                    ),
                ])),
            ));
        }
        add(b.finish(Formula::Or(disjuncts)), &mut defs, &mut names)
    };

    // ψ_J'J(w,x,y,z): a J' link from w to t followed by a J link from t to x.
    let psi_jpj = {
        let mut b = DefBuilder::with_params("psi_JpJ", 4);
        let (w, x, y, z) = (v(0), v(1), v(2), v(3));
        let t = b.fresh();
        let mut alpha_parts = Vec::new();
        for i in 0..3 {
            let nbar = b.fresh_many(ei_arity(i));
            let a = b.fresh();
            let mut vars = nbar.clone();
            vars.push(a);
            alpha_parts.push(Formula::Exists(
                vars,
                Box::new(Formula::And(vec![
                    Formula::Eq(
                        w.clone(),
                        Term::App(ops.jp, vec![w.clone(), v(a), e_term(&ops, i, &nbar, &w)]),
                    ),
                    Formula::Eq(
                        v(t),
                        Term::App(ops.jp, vec![w.clone(), v(a), e_term(&ops, i, &nbar, &x)]),
                    ),
                    Formula::Call(
                        psi_s,
                        vec![
                            e_term(&ops, i, &nbar, &w),
                            e_term(&ops, i, &nbar, &x),
                            y.clone(),
                            z.clone(),
                        ],
                    ),
                ])),
            ));
        }
        let bb = b.fresh();
        let e2w = |tm: &Term| -> Term {
            Term::App(
                ops.s[2],
                vec![w.clone(), v(bb), tm.clone(), tm.clone(), tm.clone()],
            )
        };
        let beta = Formula::Exists(
            vec![bb],
            Box::new(Formula::And(vec![
                Formula::Eq(v(t), Term::App(ops.j, vec![v(t), v(bb), e2w(&w)])),
                Formula::Eq(x.clone(), Term::App(ops.j, vec![v(t), v(bb), e2w(&x)])),
                Formula::Call(psi_s, vec![e2w(&w), e2w(&x), y.clone(), z.clone()]),
            ])),
        );
        let body = Formula::Exists(
            vec![t],
            Box::new(Formula::And(vec![Formula::Or(alpha_parts), beta])),
        );
        add(b.finish(body), &mut defs, &mut names)
    };

    // S-tailed compositions.
    let tailed = |name: &str,
                  head: usize,
                  defs: &mut Vec<NamedFormula>,
                  names: &mut HashMap<String, usize>|
     -> usize {
        let mut b = DefBuilder::with_params(name, 4);
        let t = b.fresh();
        let body = Formula::Exists(
            vec![t],
            Box::new(Formula::And(vec![
                Formula::Call(head, vec![v(0), v(t), v(2), v(3)]),
                Formula::Call(psi_s, vec![v(t), v(1), v(2), v(3)]),
            ])),
        );
        let def = b.finish(body);
        let id = defs.len();
        names.insert(def.name.clone(), id);
        defs.push(def);
        id
    };
    let psi_js = tailed("psi_JS", psi_j, &mut defs, &mut names);
    let psi_jps = tailed("psi_JpS", psi_jp, &mut defs, &mut names);
    let psi_jpjs = tailed("psi_JpJS", psi_jpj, &mut defs, &mut names);

    // ψ_1: the seven chain types.
    let psi_1 = {
        let b = DefBuilder::with_params("psi_1", 4);
        let args = vec![v(0), v(1), v(2), v(3)];
        let body = Formula::Or(vec![
            Formula::Call(psi_s, args.clone()),
            Formula::Call(psi_j, args.clone()),
            Formula::Call(psi_jp, args.clone()),
            Formula::Call(psi_jpj, args.clone()),
            Formula::Call(psi_js, args.clone()),
            Formula::Call(psi_jps, args.clone()),
            Formula::Call(psi_jpjs, args),
        ]);
        add(b.finish(body), &mut defs, &mut names)
    };

    // Split through a common lower endpoint.
    let split = |name: &str,
                 inner: usize,
                 defs: &mut Vec<NamedFormula>,
                 names: &mut HashMap<String, usize>|
     -> usize {
        let mut b = DefBuilder::with_params(name, 4);
        let t = b.fresh();
        let body = Formula::Exists(
            vec![t],
            Box::new(Formula::And(vec![
                Formula::Call(inner, vec![v(0), v(t), v(2), v(3)]),
                Formula::Call(inner, vec![v(1), v(t), v(2), v(3)]),
            ])),
        );
        let def = b.finish(body);
        let id = defs.len();
        names.insert(def.name.clone(), id);
        defs.push(def);
        id
    };
    let psi_2 = split("psi_2", psi_1, &mut defs, &mut names);

    // ψ_(·)(w,x,y,z): a single J'-with-constant link applied to y, z.
    let psi_dot = {
        let mut b = DefBuilder::with_params("psi_dot", 4);
        let t = b.fresh();
        let body = Formula::Exists(
            vec![t],
            Box::new(Formula::And(vec![
                Formula::Eq(v(0), Term::App(ops.jp, vec![v(0), v(t), v(2)])),
                Formula::Eq(v(1), Term::App(ops.jp, vec![v(0), v(t), v(3)])),
            ])),
        );
        add(b.finish(body), &mut defs, &mut names)
    };
    let psi_3 = split("psi_3", psi_dot, &mut defs, &mut names);

    // ψ_T(w,x,y,z): a J' link over a bounded tape-op orbit of y, z.
    let psi_t = {
        let mut b = DefBuilder::with_params("psi_T", 4);
        let t = b.fresh();
        let mut disjuncts = Vec::new();
        for shape in &machine_terms_t {
            let consts = b.fresh_many(shape.const_count());
            let gy = machine_term(&ops, shape, &consts, v(2));
            let gz = machine_term(&ops, shape, &consts, v(3));
            let inner = Formula::And(vec![
                Formula::Eq(v(0), Term::App(ops.jp, vec![v(0), v(t), gy])),
                Formula::Eq(v(1), Term::App(ops.jp, vec![v(0), v(t), gz])),
            ]);
            disjuncts.push(if consts.is_empty() {
                inner
            } else {
                Formula::Exists(consts, Box::new(inner))
            });
        }
        let body = Formula::Exists(vec![t], Box::new(Formula::Or(disjuncts)));
        add(b.finish(body), &mut defs, &mut names)
    };
    let psi_4 = split("psi_4", psi_t, &mut defs, &mut names);

    let psi = {
        let b = DefBuilder::with_params("psi", 4);
        let args = vec![v(0), v(1), v(2), v(3)];
        let body = Formula::Or(vec![
            Formula::Call(psi_2, args.clone()),
            Formula::Call(psi_3, args.clone()),
            Formula::Call(psi_4, args),
        ]);
        add(b.finish(body), &mut defs, &mut names)
    };

    // Γ_0: the base witness relation.
    let gamma_0_def = {
        let b = DefBuilder::with_params("gamma_0", 4);
        let body = Formula::Base(gamma0, vec![v(0), v(1), v(2), v(3)]);
        add(b.finish(body), &mut defs, &mut names)
    };

    // Γ_1: the base witness applied to e-images of (y,z).
    let gamma_1 = {
        let mut b = DefBuilder::with_params("gamma_1", 4);
        let mut disjuncts = Vec::new();
        for j in 0..3 {
            let nbar = b.fresh_many(ei_arity(j));
            disjuncts.push(Formula::Exists(
                nbar.clone(),
                Box::new(Formula::And(vec![
                    Formula::Neq(e_term(&ops, j, &nbar, &v(2)), e_term(&ops, j, &nbar, &v(3))),
                    Formula::Base(
                        gamma0,
                        vec![
                            v(0),
                            v(1),
                            e_term(&ops, j, &nbar, &v(2)),
                            e_term(&ops, j, &nbar, &v(3)),
                        ],
                    ),
                ])),
            ));
        }
        add(b.finish(Formula::Or(disjuncts)), &mut defs, &mut names)
    };

    // Γ_(·): product-term images of the pair, plain and meet-normalized.
    // The meet-normalized variants apply the term to (y∧m, z∧m): this is
    // the formula-level version of replacing an incomparable pair by
    // (a, a∧b) before driving it down.
    let meet_op = idx("meet");
    let gamma_dot = {
        let mut b = DefBuilder::with_params("gamma_dot", 4);
        let mut disjuncts = Vec::new();
        for shape in &product_terms {
            let consts = b.fresh_many(shape.const_count());
            let ty = product_term(&ops, shape, &consts, v(2));
            let tz = product_term(&ops, shape, &consts, v(3));
            let inner = Formula::And(vec![Formula::Eq(v(0), ty), Formula::Eq(v(1), tz)]);
            disjuncts.push(if consts.is_empty() {
                inner
            } else {
                Formula::Exists(consts, Box::new(inner))
            });
            let consts = b.fresh_many(shape.const_count());
            let m = b.fresh();
            let my = Term::App(meet_op, vec![v(2), v(m)]);
            let mz = Term::App(meet_op, vec![v(3), v(m)]);
            let ty = product_term(&ops, shape, &consts, my);
            let tz = product_term(&ops, shape, &consts, mz);
            let mut vars = consts;
            vars.push(m);
            disjuncts.push(Formula::Exists(
                vars,
                Box::new(Formula::And(vec![
                    Formula::Eq(v(0), ty),
                    Formula::Eq(v(1), tz),
                ])),
            ));
        }
        add(b.finish(Formula::Or(disjuncts)), &mut defs, &mut names)
    };

    // Γ_T: tape-term images, plain and meet-normalized.
    let gamma_t = {
        let mut b = DefBuilder::with_params("gamma_T", 4);
        let mut disjuncts = Vec::new();
        for shape in &machine_terms_s {
            let consts = b.fresh_many(shape.const_count());
            let ty = machine_term(&ops, shape, &consts, v(2));
            let tz = machine_term(&ops, shape, &consts, v(3));
            let inner = Formula::And(vec![Formula::Eq(v(0), ty), Formula::Eq(v(1), tz)]);
            disjuncts.push(if consts.is_empty() {
                inner
            } else {
                Formula::Exists(consts, Box::new(inner))
            });
            let consts = b.fresh_many(shape.const_count());
            let m = b.fresh();
            let my = Term::App(meet_op, vec![v(2), v(m)]);
            let mz = Term::App(meet_op, vec![v(3), v(m)]);
            let ty = machine_term(&ops, shape, &consts, my);
            let tz = machine_term(&ops, shape, &consts, mz);
            let mut vars = consts;
            vars.push(m);
            disjuncts.push(Formula::Exists(
                vars,
                Box::new(Formula::And(vec![
                    Formula::Eq(v(0), ty),
                    Formula::Eq(v(1), tz),
                ])),
            ));
        }
        add(b.finish(Formula::Or(disjuncts)), &mut defs, &mut names)
    };

    // Γ_I: product-term images of (I(y), I(z)).
    let gamma_i = {
        let mut b = DefBuilder::with_params("gamma_I", 4);
        let u = b.fresh();
        let vv = b.fresh();
        let body = Formula::Exists(
            vec![u, vv],
            Box::new(Formula::And(vec![
                Formula::Eq(v(u), Term::App(ops.i_op, vec![v(2)])),
                Formula::Eq(v(vv), Term::App(ops.i_op, vec![v(3)])),
                Formula::Call(gamma_dot, vec![v(0), v(1), v(u), v(vv)]),
            ])),
        );
        add(b.finish(body), &mut defs, &mut names)
    };

    // One-sided disjunction, then symmetrized in (y, z): the generated
    // congruence does not depend on the pair's order, and witnesses for an
    // increasing pair arise from terms applied to the swapped pair.
    let gamma_one_sided = {
        let b = DefBuilder::with_params("gamma_one_sided", 4);
        let args = vec![v(0), v(1), v(2), v(3)];
        let body = Formula::Or(vec![
            Formula::Call(gamma_1, args.clone()),
            Formula::Call(gamma_dot, args.clone()),
            Formula::Call(gamma_t, args.clone()),
            Formula::Call(gamma_i, args),
        ]);
        add(b.finish(body), &mut defs, &mut names)
    };
    let gamma = {
        let b = DefBuilder::with_params("gamma", 4);
        let body = Formula::Or(vec![
            Formula::Call(gamma_one_sided, vec![v(0), v(1), v(2), v(3)]),
            Formula::Call(gamma_one_sided, vec![v(0), v(1), v(3), v(2)]),
        ]);
        add(b.finish(body), &mut defs, &mut names)
    };
    let _ = (psi, gamma, gamma_0_def);

    let mut lib = FormulaLibrary {
        op_names,
        base_names,
        bases,
        defs,
        names,
        product_terms,
        machine_terms_s,
        machine_terms_t,
    };
    build_zeta(&mut lib);
    lib
}

/// Appends the subdirect-irreducibility sentences: `zeta` (finitely
/// subdirectly irreducible members of the class, via a shared witnessed
/// subcongruence) and `sigma_si` (subdirectly irreducible members, via a
/// shared generating pair).
pub fn build_zeta(lib: &mut FormulaLibrary) {
    let gamma = lib.names["gamma"];
    let psi = lib.names["psi"];

    // zeta = ∀ a,b,a',b' [a=b ∨ a'=b' ∨ ∃c,d,c',d' [Γ(c,d,a,b) ∧
    //        Γ(c',d',a',b') ∧ ∃r,s [r≠s ∧ ψ(r,s,c,d) ∧ ψ(r,s,c',d')]]]
    let mut b = DefBuilder::with_params("zeta", 0);
    let (a, bb, a2, b2) = (b.fresh(), b.fresh(), b.fresh(), b.fresh());
    let (c, d, c2, d2) = (b.fresh(), b.fresh(), b.fresh(), b.fresh());
    let (r, s) = (b.fresh(), b.fresh());
    let inner = Formula::Exists(
        vec![c, d, c2, d2],
        Box::new(Formula::And(vec![
            Formula::Call(gamma, vec![v(c), v(d), v(a), v(bb)]),
            Formula::Call(gamma, vec![v(c2), v(d2), v(a2), v(b2)]),
            Formula::Exists(
                vec![r, s],
                Box::new(Formula::And(vec![
                    Formula::Neq(v(r), v(s)),
                    Formula::Call(psi, vec![v(r), v(s), v(c), v(d)]),
                    Formula::Call(psi, vec![v(r), v(s), v(c2), v(d2)]),
                ])),
            ),
        ])),
    );
    let body = Formula::Forall(
        vec![a, bb, a2, b2],
        Box::new(Formula::Or(vec![
            Formula::Eq(v(a), v(bb)),
            Formula::Eq(v(a2), v(b2)),
            inner,
        ])),
    );
    let def = b.finish(body);
    lib.names.insert(def.name.clone(), lib.defs.len());
    lib.defs.push(def);

    // sigma_si = ∃r,s [r≠s ∧ ∀a,b [a=b ∨ ∃c,d [Γ(c,d,a,b) ∧ ψ(r,s,c,d)]]]
    let mut b = DefBuilder::with_params("sigma_si", 0);
    let (r, s) = (b.fresh(), b.fresh());
    let (a, bb) = (b.fresh(), b.fresh());
    let (c, d) = (b.fresh(), b.fresh());
    let body = Formula::Exists(
        vec![r, s],
        Box::new(Formula::And(vec![
            Formula::Neq(v(r), v(s)),
            Formula::Forall(
                vec![a, bb],
                Box::new(Formula::Or(vec![
                    Formula::Eq(v(a), v(bb)),
                    Formula::Exists(
                        vec![c, d],
                        Box::new(Formula::And(vec![
                            Formula::Call(gamma, vec![v(c), v(d), v(a), v(bb)]),
                            Formula::Call(psi, vec![v(r), v(s), v(c), v(d)]),
                        ])),
                    ),
                ])),
            ),
        ])),
    );
    let def = b.finish(body);
    lib.names.insert(def.name.clone(), lib.defs.len());
    lib.defs.push(def);
}
