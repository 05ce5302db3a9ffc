//! Generic finite-algebra engine.
//!
//! An algebra is a finite indexed universe together with total operations.
//! Operations are backed either by a dense index-major table or by a rule
//! (pure evaluator). Rule-backed operations may carry a *support*: a list of
//! argument tuples outside of which the operation returns the algebra's
//! bottom element. Closure algorithms use the support to avoid enumerating
//! astronomically many zero-valued tuples.

mod closure;
mod congruence;
mod iso;
pub mod json;
mod partition;
mod power;

pub use closure::{generate_subuniverse, subalgebra, SubuniverseError};

pub use congruence::{
    congruence_lattice, is_congruence, is_fsi, monolith, principal_congruence, quotient,
    CongruenceError, CongruenceViolation, Quotient,
};
pub use iso::is_isomorphic;
pub use partition::Partition;
pub use power::{power_subalgebra, product, PowerError};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

/// Argument tuple for an operation application.
pub type Args = SmallVec<[u32; 5]>;

/// One operation symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpSym {
    pub name: String,
    pub arity: usize,
}

/// The operation symbols of an algebra, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    ops: Vec<OpSym>,
}

impl Signature {
    pub fn new(ops: Vec<OpSym>) -> Self {
        let mut names = std::collections::BTreeSet::new();
        for op in &ops {
            assert!(names.insert(op.name.clone()), "duplicate op name {}", op.name);
        }
        Signature { ops }
    }

    pub fn ops(&self) -> &[OpSym] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    /// Same symbols with the same arities in the same order.
    pub fn matches(&self, other: &Signature) -> bool {
        self.ops.len() == other.ops.len()
            && self
                .ops
                .iter()
                .zip(&other.ops)
                .all(|(a, b)| a.name == b.name && a.arity == b.arity)
    }
}

type RuleFn = Arc<dyn Fn(&[usize]) -> usize + Send + Sync>;

#[derive(Clone)]
pub enum OpKind {
    /// Dense index-major table: entry for `(a_0, …, a_{k-1})` lives at
    /// `a_0 * m^{k-1} + … + a_{k-1}`.
    Table(Vec<u32>),
    /// Pure evaluator with a stable identifier for serialization.
    Rule { id: String, eval: RuleFn },
}

#[derive(Clone)]
pub struct Operation {
    pub sym: OpSym,
    pub kind: OpKind,
    /// Tuples that may evaluate to something other than the bottom element.
    /// `None` means unknown (every tuple must be enumerated).
    pub support: Option<Arc<Vec<Args>>>,
}

impl fmt::Debug for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operation({}/{})", self.sym.name, self.sym.arity)
    }
}

/// A finite algebra: labeled universe plus operations.
#[derive(Debug, Clone)]
pub struct FiniteAlgebra {
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    ops: Vec<Operation>,
    /// Index of the bottom element when the algebra has one (named "0").
    zero: Option<usize>,
    meet: Option<usize>,
}

impl FiniteAlgebra {
    pub fn new(labels: Vec<String>, ops: Vec<Operation>) -> Self {
        let label_index: HashMap<String, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        assert_eq!(label_index.len(), labels.len(), "labels must be unique");
        let zero = label_index.get("0").copied();
        let meet = ops.iter().position(|o| o.sym.name == "meet");
        let alg = FiniteAlgebra {
            labels,
            label_index,
            ops,
            zero,
            meet,
        };
        for op in &alg.ops {
            if op.support.is_some() {
                assert!(
                    alg.zero.is_some(),
                    "support-backed op {} requires a bottom element",
                    op.sym.name
                );
            }
            if let OpKind::Table(t) = &op.kind {
                assert_eq!(
                    t.len(),
                    alg.size().pow(op.sym.arity as u32),
                    "table size mismatch for {}",
                    op.sym.name
                );
            }
        }
        alg
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn element(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op(&self, idx: usize) -> &Operation {
        &self.ops[idx]
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.sym.name == name)
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.ops.iter().map(|o| o.sym.clone()).collect())
    }

    pub fn zero(&self) -> Option<usize> {
        self.zero
    }

    /// Evaluates operation `op` on `args`.
    pub fn eval(&self, op: usize, args: &[usize]) -> usize {
        let operation = &self.ops[op];
        debug_assert_eq!(args.len(), operation.sym.arity);
        match &operation.kind {
            OpKind::Table(t) => {
                let mut idx = 0usize;
                for &a in args {
                    idx = idx * self.size() + a;
                }
                t[idx] as usize
            }
            OpKind::Rule { eval, .. } => {
                let v = eval(args);
                debug_assert!(v < self.size(), "op {} out of range", operation.sym.name);
                v
            }
        }
    }

    /// Flat order `x ≤ y` (i.e. `x ∧ y = x`), via the meet operation.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        let meet = self.meet.expect("algebra has no meet operation");
        self.eval(meet, &[x, y]) == x
    }

    pub fn meet_of(&self, x: usize, y: usize) -> usize {
        let meet = self.meet.expect("algebra has no meet operation");
        self.eval(meet, &[x, y])
    }

    pub fn has_meet(&self) -> bool {
        self.meet.is_some()
    }

    /// All argument tuples of length `arity` over the universe, in
    /// lexicographic order.
    pub fn tuples(&self, arity: usize) -> TupleIter {
        TupleIter::new(self.size(), arity)
    }

    /// Whether the operation is identically the bottom element
    /// (cheap check via an empty support; exhaustive otherwise when feasible).
    pub fn op_is_zero(&self, op: usize) -> Option<bool> {
        let zero = self.zero?;
        let operation = &self.ops[op];
        if let Some(s) = &operation.support {
            return Some(s.iter().all(|t| {
                let args: Vec<usize> = t.iter().map(|&a| a as usize).collect();
                self.eval(op, &args) == zero
            }));
        }
        let total = self.size().checked_pow(operation.sym.arity as u32)?;
        if total > 2_000_000 {
            return None;
        }
        for args in self.tuples(operation.sym.arity) {
            if self.eval(op, &args) != zero {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Materializes a dense table for an operation (small arities only).
    pub fn table_of(&self, op: usize) -> Option<Vec<u32>> {
        let arity = self.ops[op].sym.arity;
        let total = self.size().checked_pow(arity as u32)?;
        if total > 4_000_000 {
            return None;
        }
        let mut table = Vec::with_capacity(total);
        for args in self.tuples(arity) {
            table.push(self.eval(op, &args) as u32);
        }
        Some(table)
    }
}

/// Rebuilds every feasible operation as a dense table with a nonzero
/// support list. Closure algorithms run much faster on the result; the
/// algebra must have a bottom element for the support semantics.
pub fn densify(alg: &FiniteAlgebra, max_table: usize) -> FiniteAlgebra {
    let zero = alg.zero();
    let mut ops = Vec::with_capacity(alg.ops().len());
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let arity = op.sym.arity;
        let total = alg.size().checked_pow(arity as u32);
        match (total, zero) {
            (Some(t), Some(z)) if t <= max_table => {
                let mut table = Vec::with_capacity(t);
                let mut support: Vec<Args> = Vec::new();
                for args in alg.tuples(arity) {
                    let v = alg.eval(op_idx, &args);
                    table.push(v as u32);
                    if v != z {
                        support.push(args.iter().map(|&x| x as u32).collect());
                    }
                }
                ops.push(Operation {
                    sym: op.sym.clone(),
                    kind: OpKind::Table(table),
                    support: Some(Arc::new(support)),
                });
            }
            _ => ops.push(op.clone()),
        }
    }
    FiniteAlgebra::new(alg.labels().to_vec(), ops)
}

/// Iterator over all argument tuples of a given arity.
pub struct TupleIter {
    size: usize,
    current: Vec<usize>,
    done: bool,
}

impl TupleIter {
    fn new(size: usize, arity: usize) -> Self {
        TupleIter {
            size,
            current: vec![0; arity],
            done: size == 0 && arity > 0,
        }
    }
}

impl Iterator for TupleIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut i = self.current.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.current[i] += 1;
            if self.current[i] < self.size {
                break;
            }
            self.current[i] = 0;
        }
        Some(out)
    }
}

/// A unary map obtained from one operation by fixing all but one argument.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FundamentalTranslation {
    pub op: usize,
    pub pos: usize,
    /// Constants for the other positions, in argument order (length arity-1).
    pub consts: SmallVec<[u32; 4]>,
}

impl FundamentalTranslation {
    pub fn new(op: usize, pos: usize, consts: impl Into<SmallVec<[u32; 4]>>) -> Self {
        FundamentalTranslation {
            op,
            pos,
            consts: consts.into(),
        }
    }

    pub fn apply(&self, alg: &FiniteAlgebra, x: usize) -> usize {
        let arity = alg.op(self.op).sym.arity;
        debug_assert_eq!(self.consts.len() + 1, arity);
        let mut args: SmallVec<[usize; 5]> = SmallVec::with_capacity(arity);
        let mut ci = 0;
        for p in 0..arity {
            if p == self.pos {
                args.push(x);
            } else {
                args.push(self.consts[ci] as usize);
                ci += 1;
            }
        }
        alg.eval(self.op, &args)
    }

    pub fn describe(&self, alg: &FiniteAlgebra) -> String {
        let sym = &alg.op(self.op).sym;
        let mut parts = Vec::new();
        let mut ci = 0;
        for p in 0..sym.arity {
            if p == self.pos {
                parts.push("_".to_string());
            } else {
                parts.push(alg.label(self.consts[ci] as usize).to_string());
                ci += 1;
            }
        }
        format!("{}({})", sym.name, parts.join(","))
    }
}

/// A composition of fundamental translations, applied first-to-last
/// (the last entry is the outermost map). Empty = identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct UnaryPolynomial {
    pub steps: Vec<FundamentalTranslation>,
}

impl UnaryPolynomial {
    pub fn identity() -> Self {
        UnaryPolynomial { steps: Vec::new() }
    }

    pub fn single(t: FundamentalTranslation) -> Self {
        UnaryPolynomial { steps: vec![t] }
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn apply(&self, alg: &FiniteAlgebra, x: usize) -> usize {
        self.steps.iter().fold(x, |v, t| t.apply(alg, v))
    }

    /// `outer ∘ self`.
    pub fn then(&self, t: FundamentalTranslation) -> Self {
        let mut steps = self.steps.clone();
        steps.push(t);
        UnaryPolynomial { steps }
    }

    pub fn compose(&self, outer: &UnaryPolynomial) -> Self {
        let mut steps = self.steps.clone();
        steps.extend(outer.steps.iter().cloned());
        UnaryPolynomial { steps }
    }

    pub fn describe(&self, alg: &FiniteAlgebra) -> String {
        if self.steps.is_empty() {
            return "id".to_string();
        }
        let mut out = "_".to_string();
        for t in &self.steps {
            out = t.describe(alg).replace('_', &out);
        }
        out
    }
}

/// Enumerates every fundamental translation of the algebra, calling `f` on
/// each; stops early if `f` returns false. Uses supports where available so
/// that only translations that can produce nonzero values on some input are
/// visited, plus the identity-irrelevant zero translation effects are skipped
/// (a translation that is identically zero maps every pair to equal values).
pub fn for_each_translation_of_pair(
    alg: &FiniteAlgebra,
    u: usize,
    v: usize,
    mut f: impl FnMut(usize, usize) -> bool,
) -> bool {
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let arity = op.sym.arity;
        if arity == 0 {
            continue;
        }
        if let Some(support) = &op.support {
            // Only support tuples of u or v at some position can give a
            // nonzero value on either side; all other tuples map both
            // elements to zero.
            for t in support.iter() {
                for pos in 0..arity {
                    let at = t[pos] as usize;
                    if at != u && at != v {
                        continue;
                    }
                    let mut a: SmallVec<[usize; 5]> =
                        t.iter().map(|&x| x as usize).collect();
                    a[pos] = u;
                    let fu = alg.eval(op_idx, &a);
                    a[pos] = v;
                    let fv = alg.eval(op_idx, &a);
                    if !f(fu, fv) {
                        return false;
                    }
                }
            }
        } else {
            let m = alg.size();
            let mut consts = vec![0usize; arity - 1];
            loop {
                for pos in 0..arity {
                    let mut a: SmallVec<[usize; 5]> = SmallVec::with_capacity(arity);
                    let mut ci = 0;
                    for p in 0..arity {
                        if p == pos {
                            a.push(u);
                        } else {
                            a.push(consts[ci]);
                            ci += 1;
                        }
                    }
                    let fu = alg.eval(op_idx, &a);
                    let mut ci = 0;
                    for p in 0..arity {
                        if p != pos {
                            a[p] = consts[ci];
                            ci += 1;
                        }
                    }
                    a[pos] = v;
                    let fv = alg.eval(op_idx, &a);
                    if !f(fu, fv) {
                        return false;
                    }
                }
                // advance consts
                let mut i = consts.len();
                let mut carried = true;
                while i > 0 {
                    i -= 1;
                    consts[i] += 1;
                    if consts[i] < m {
                        carried = false;
                        break;
                    }
                    consts[i] = 0;
                }
                if consts.is_empty() || carried {
                    break;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn flat_meet_algebra(labels: &[&str]) -> FiniteAlgebra {
        let m = labels.len();
        let mut table = vec![0u32; m * m];
        for x in 0..m {
            table[x * m + x] = x as u32;
        }
        FiniteAlgebra::new(
            labels.iter().map(|s| s.to_string()).collect(),
            vec![
                Operation {
                    sym: OpSym {
                        name: "zero".into(),
                        arity: 0,
                    },
                    kind: OpKind::Table(vec![0]),
                    support: None,
                },
                Operation {
                    sym: OpSym {
                        name: "meet".into(),
                        arity: 2,
                    },
                    kind: OpKind::Table(table),
                    support: None,
                },
            ],
        )
    }

    #[test]
    fn tuple_iter_counts() {
        assert_eq!(TupleIter::new(3, 2).count(), 9);
        assert_eq!(TupleIter::new(5, 0).count(), 1);
        assert_eq!(TupleIter::new(2, 3).count(), 8);
    }

    #[test]
    fn flat_meet_and_order() {
        let alg = flat_meet_algebra(&["0", "x", "y"]);
        assert_eq!(alg.meet_of(1, 1), 1);
        assert_eq!(alg.meet_of(1, 2), 0);
        assert!(alg.leq(0, 2));
        assert!(alg.leq(1, 1));
        assert!(!alg.leq(1, 2));
    }

    #[test]
    fn translation_apply() {
        let alg = flat_meet_algebra(&["0", "x", "y"]);
        let meet = alg.op_index("meet").unwrap();
        let t = FundamentalTranslation::new(meet, 0, smallvec::smallvec![1u32]);
        assert_eq!(t.apply(&alg, 1), 1);
        assert_eq!(t.apply(&alg, 2), 0);
        let p = UnaryPolynomial::single(t.clone()).then(t);
        assert_eq!(p.apply(&alg, 1), 1);
    }
}
