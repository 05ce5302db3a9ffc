//! Formula and term syntax.

use std::fmt;

pub type VarId = u32;

/// First-order terms over a shared operation-name table (indices into
/// `FormulaLibrary::op_names`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(VarId),
    /// A fixed element of the algebra under evaluation.
    Const(usize),
    App(usize, Vec<Term>),
}

/// Quantifier-free connectives plus existential/universal blocks, calls to
/// named formulas, and pluggable base predicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    Eq(Term, Term),
    Neq(Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Vec<VarId>, Box<Formula>),
    Forall(Vec<VarId>, Box<Formula>),
    /// Reference to a named formula in the library, with argument terms.
    Call(usize, Vec<Term>),
    /// Base-strategy predicate (the pluggable ψ0/Γ0 leaves), 4 arguments.
    Base(usize, Vec<Term>),
}

/// A named formula: parameter variables plus a body whose variable ids are
/// local to this definition.
#[derive(Debug, Clone)]
pub struct NamedFormula {
    pub name: String,
    pub params: Vec<VarId>,
    pub var_count: usize,
    pub body: Formula,
}

pub struct SExpr<'a> {
    pub formula: &'a Formula,
    pub op_names: &'a [String],
    pub def_names: &'a [String],
    pub base_names: &'a [String],
}

fn write_term(
    f: &mut fmt::Formatter<'_>,
    t: &Term,
    op_names: &[String],
) -> fmt::Result {
    match t {
        Term::Var(v) => write!(f, "v{v}"),
        Term::Const(c) => write!(f, "#{c}"),
        Term::App(op, args) => {
            write!(f, "({}", op_names[*op])?;
            for a in args {
                write!(f, " ")?;
                write_term(f, a, op_names)?;
            }
            write!(f, ")")
        }
    }
}

impl<'a> fmt::Display for SExpr<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |formula: &'a Formula| SExpr {
            formula,
            op_names: self.op_names,
            def_names: self.def_names,
            base_names: self.base_names,
        };
        match self.formula {
            Formula::True => write!(f, "true"),
            Formula::Eq(a, b) => {
                write!(f, "(= ")?;
                write_term(f, a, self.op_names)?;
                write!(f, " ")?;
                write_term(f, b, self.op_names)?;
                write!(f, ")")
            }
            Formula::Neq(a, b) => {
                write!(f, "(!= ")?;
                write_term(f, a, self.op_names)?;
                write!(f, " ")?;
                write_term(f, b, self.op_names)?;
                write!(f, ")")
            }
            Formula::And(parts) => {
                write!(f, "(and")?;
                for p in parts {
                    write!(f, " {}", sub(p))?;
                }
                write!(f, ")")
            }
            Formula::Or(parts) => {
                write!(f, "(or")?;
                for p in parts {
                    write!(f, " {}", sub(p))?;
                }
                write!(f, ")")
            }
            Formula::Exists(vars, body) => {
                write!(f, "(exists (")?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "v{v}")?;
                }
                write!(f, ") {})", sub(body))
            }
            Formula::Forall(vars, body) => {
                write!(f, "(forall (")?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "v{v}")?;
                }
                write!(f, ") {})", sub(body))
            }
            Formula::Call(idx, args) => {
                write!(f, "({}", self.def_names[*idx])?;
                for a in args {
                    write!(f, " ")?;
                    write_term(f, a, self.op_names)?;
                }
                write!(f, ")")
            }
            Formula::Base(idx, args) => {
                write!(f, "({}", self.base_names[*idx])?;
                for a in args {
                    write!(f, " ")?;
                    write_term(f, a, self.op_names)?;
                }
                write!(f, ")")
            }
        }
    }
}
