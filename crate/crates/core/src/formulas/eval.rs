//! Brute-force satisfaction with short-circuiting quantifier search,
//! memoized named-formula calls, and a tuple budget.

use std::collections::HashMap;
use std::rc::Rc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::algebra::{principal_congruence, FiniteAlgebra, Partition};

use super::ast::{Formula, Term, VarId};
use super::library::{BaseStrategy, FormulaLibrary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable v{0}")]
    UnboundVar(VarId),
    #[error("operation {0} not present in the algebra")]
    UnknownOp(String),
    #[error("quantifier budget exceeded ({0} tuples)")]
    BudgetExceeded(u64),
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Maximum number of quantifier assignments tried.
    pub budget: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { budget: 200_000_000 }
    }
}

/// Evaluation context for one (algebra, library) pair. Holds the op-name
/// resolution, the congruence cache backing the semantic base predicates,
/// and per-call memo tables.
pub struct Evaluator<'a> {
    pub alg: &'a FiniteAlgebra,
    pub lib: &'a FormulaLibrary,
    op_map: Vec<usize>,
    cg_cache: HashMap<(usize, usize), Rc<Partition>>,
    call_memo: HashMap<(usize, SmallVec<[u32; 4]>), bool>,
    spent: u64,
    budget: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        alg: &'a FiniteAlgebra,
        lib: &'a FormulaLibrary,
        opts: EvalOptions,
    ) -> Result<Self, EvalError> {
        let mut op_map = Vec::with_capacity(lib.op_names.len());
        for name in &lib.op_names {
            match alg.op_index(name) {
                Some(idx) => op_map.push(idx),
                None => return Err(EvalError::UnknownOp(name.clone())),
            }
        }
        Ok(Evaluator {
            alg,
            lib,
            op_map,
            cg_cache: HashMap::new(),
            call_memo: HashMap::new(),
            spent: 0,
            budget: opts.budget,
        })
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }

    /// Principal congruence with caching (backs the semantic base leaves).
    pub fn cg(&mut self, a: usize, b: usize) -> Rc<Partition> {
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(p) = self.cg_cache.get(&key) {
            return Rc::clone(p);
        }
        let p = Rc::new(principal_congruence(self.alg, key.0, key.1));
        self.cg_cache.insert(key, Rc::clone(&p));
        p
    }

    fn term(&mut self, t: &Term, env: &[Option<usize>]) -> Result<usize, EvalError> {
        match t {
            Term::Var(v) => env
                .get(*v as usize)
                .copied()
                .flatten()
                .ok_or(EvalError::UnboundVar(*v)),
            Term::Const(c) => Ok(*c),
            Term::App(op, args) => {
                let mut vals: SmallVec<[usize; 5]> = SmallVec::with_capacity(args.len());
                for a in args {
                    vals.push(self.term(a, env)?);
                }
                Ok(self.alg.eval(self.op_map[*op], &vals))
            }
        }
    }

    fn spend(&mut self) -> Result<(), EvalError> {
        self.spent += 1;
        if self.spent > self.budget {
            return Err(EvalError::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    pub fn eval(&mut self, f: &Formula, env: &mut Vec<Option<usize>>) -> Result<bool, EvalError> {
        match f {
            Formula::True => Ok(true),
            Formula::Eq(a, b) => Ok(self.term(a, env)? == self.term(b, env)?),
            Formula::Neq(a, b) => Ok(self.term(a, env)? != self.term(b, env)?),
            Formula::And(parts) => {
                for p in parts {
                    if !self.eval(p, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(parts) => {
                for p in parts {
                    if self.eval(p, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Exists(vars, body) => self.quantify(vars, body, env, true),
            Formula::Forall(vars, body) => self.quantify(vars, body, env, false),
            Formula::Call(idx, args) => {
                let mut vals: SmallVec<[u32; 4]> = SmallVec::with_capacity(args.len());
                for a in args {
                    vals.push(self.term(a, env)? as u32);
                }
                if let Some(&hit) = self.call_memo.get(&(*idx, vals.clone())) {
                    return Ok(hit);
                }
                // The library reference outlives the evaluator's mutable
                // borrow, so the body can be walked without cloning.
                let lib = self.lib;
                let def = &lib.defs[*idx];
                let mut inner_env: Vec<Option<usize>> = vec![None; def.var_count];
                for (p, v) in def.params.iter().zip(vals.iter()) {
                    inner_env[*p as usize] = Some(*v as usize);
                }
                let out = self.eval(&def.body, &mut inner_env)?;
                self.call_memo.insert((*idx, vals), out);
                Ok(out)
            }
            Formula::Base(idx, args) => {
                let mut vals: SmallVec<[usize; 4]> = SmallVec::with_capacity(args.len());
                for a in args {
                    vals.push(self.term(a, env)?);
                }
                let strategy = self.lib.bases[*idx];
                match strategy {
                    BaseStrategy::CgMembership => {
                        let (w, x, y, z) = (vals[0], vals[1], vals[2], vals[3]);
                        if w == x {
                            return Ok(true);
                        }
                        let cg = self.cg(y, z);
                        Ok(cg.same(w, x))
                    }
                }
            }
        }
    }

    fn quantify(
        &mut self,
        vars: &[VarId],
        body: &Formula,
        env: &mut Vec<Option<usize>>,
        existential: bool,
    ) -> Result<bool, EvalError> {
        let m = self.alg.size();
        let k = vars.len();
        let mut assignment = vec![0usize; k];
        loop {
            self.spend()?;
            for (i, v) in vars.iter().enumerate() {
                env[*v as usize] = Some(assignment[i]);
            }
            let value = self.eval(body, env)?;
            if value == existential {
                for v in vars {
                    env[*v as usize] = None;
                }
                return Ok(existential);
            }
            // advance
            let mut i = k;
            loop {
                if i == 0 {
                    for v in vars {
                        env[*v as usize] = None;
                    }
                    return Ok(!existential);
                }
                i -= 1;
                assignment[i] += 1;
                if assignment[i] < m {
                    break;
                }
                assignment[i] = 0;
            }
        }
    }

    /// Evaluates a named formula on concrete elements.
    pub fn eval_named(&mut self, name: &str, args: &[usize]) -> Result<bool, EvalError> {
        let idx = *self
            .lib
            .names
            .get(name)
            .unwrap_or_else(|| panic!("no formula named {name}"));
        let terms: Vec<Term> = args.iter().map(|&a| Term::Const(a)).collect();
        let call = Formula::Call(idx, terms);
        let mut env = Vec::new();
        self.eval(&call, &mut env)
    }
}
