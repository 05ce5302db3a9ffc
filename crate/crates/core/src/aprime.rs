//! The machine algebra: a finite flat algebra built from a Turing machine.
//!
//! The universe has a bottom element 0, head markers {1, 2, H}, tape symbols
//! {C, D} with barred twins, and per-state indexed symbols C(i,r,s), D(i,r,s),
//! M(i,r) with barred twins. Operations: flat meet, a nonassociative
//! product, the congruence-shape operations J, J', K, the gated operations
//! S0/S1/S2, the bar-producing T, the blank-tape operation I, one pair of
//! tape operations L/R per machine instruction, and two bar-producing U
//! operations per tape operation.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use smallvec::{smallvec, SmallVec};

use crate::algebra::{Args, FiniteAlgebra, OpKind, OpSym, Operation};
use crate::tm::{Configuration, Dir, Instruction, TuringMachine};

/// One element of the machine algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Zero,
    One,
    Two,
    H,
    C { bar: bool },
    D { bar: bool },
    /// Tape cell left of the head: state `i`, head reads `r`, cell holds `s`.
    Ci { i: u16, r: u8, s: u8, bar: bool },
    /// Tape cell right of the head.
    Di { i: u16, r: u8, s: u8, bar: bool },
    /// The head cell: state `i`, reading `r`.
    Mi { i: u16, r: u8, bar: bool },
}

impl Elem {
    /// The bar involution, defined on barrable elements only.
    pub fn bar(self) -> Option<Elem> {
        match self {
            Elem::Zero | Elem::One | Elem::Two | Elem::H => None,
            Elem::C { bar } => Some(Elem::C { bar: !bar }),
            Elem::D { bar } => Some(Elem::D { bar: !bar }),
            Elem::Ci { i, r, s, bar } => Some(Elem::Ci { i, r, s, bar: !bar }),
            Elem::Di { i, r, s, bar } => Some(Elem::Di { i, r, s, bar: !bar }),
            Elem::Mi { i, r, bar } => Some(Elem::Mi { i, r, bar: !bar }),
        }
    }

    /// Membership in the indexed part of the universe.
    pub fn in_v(self) -> bool {
        matches!(self, Elem::Ci { .. } | Elem::Di { .. } | Elem::Mi { .. })
    }

    /// Membership in the indexed part with state index 0.
    pub fn in_v0(self) -> bool {
        match self {
            Elem::Ci { i, .. } | Elem::Di { i, .. } | Elem::Mi { i, .. } => i == 0,
            _ => false,
        }
    }

    /// Membership in the domain of the bar involution.
    pub fn barrable(self) -> bool {
        self.bar().is_some()
    }

    pub fn is_barred(self) -> bool {
        matches!(
            self,
            Elem::C { bar: true }
                | Elem::D { bar: true }
                | Elem::Ci { bar: true, .. }
                | Elem::Di { bar: true, .. }
                | Elem::Mi { bar: true, .. }
        )
    }

    pub fn label(self) -> String {
        match self {
            Elem::Zero => "0".into(),
            Elem::One => "1".into(),
            Elem::Two => "2".into(),
            Elem::H => "H".into(),
            Elem::C { bar } => format!("{}C", if bar { "~" } else { "" }),
            Elem::D { bar } => format!("{}D", if bar { "~" } else { "" }),
            Elem::Ci { i, r, s, bar } => {
                format!("{}C({},{},{})", if bar { "~" } else { "" }, i, r, s)
            }
            Elem::Di { i, r, s, bar } => {
                format!("{}D({},{},{})", if bar { "~" } else { "" }, i, r, s)
            }
            Elem::Mi { i, r, bar } => format!("{}M({},{})", if bar { "~" } else { "" }, i, r),
        }
    }
}

/// Flat meet.
pub fn meet(x: Elem, y: Elem) -> Elem {
    if x == y {
        x
    } else {
        Elem::Zero
    }
}

fn meet3(x: Elem, y: Elem, z: Elem) -> Elem {
    meet(meet(x, y), z)
}

/// Flat join. Defined only when at most one joinand is nonzero or the
/// joinands agree; the flat semilattice has no other joins.
pub fn flat_join(x: Elem, y: Elem) -> Elem {
    debug_assert!(
        x == Elem::Zero || y == Elem::Zero || x == y,
        "flat join of incomparable elements {x:?}, {y:?}"
    );
    if x == Elem::Zero {
        y
    } else {
        x
    }
}

/// `∂y`, reading elements outside the domain of bar as 0.
fn bar_or_zero(y: Elem) -> Elem {
    y.bar().unwrap_or(Elem::Zero)
}

/// The nonassociative product.
pub fn prod(x: Elem, y: Elem) -> Elem {
    match (x, y) {
        (Elem::Two, Elem::D { bar }) => Elem::D { bar },
        (Elem::H, Elem::C { bar }) => Elem::D { bar },
        (Elem::One, Elem::C { bar }) => Elem::C { bar },
        _ => Elem::Zero,
    }
}

/// Case table for J.
pub fn j_op(x: Elem, y: Elem, z: Elem) -> Elem {
    if x == y {
        x
    } else if y.barrable() && Some(x) == y.bar() {
        meet(x, z)
    } else {
        Elem::Zero
    }
}

/// Case table for J'.
pub fn jp_op(x: Elem, y: Elem, z: Elem) -> Elem {
    if x == y {
        meet(x, z)
    } else if y.barrable() && Some(x) == y.bar() {
        x
    } else {
        Elem::Zero
    }
}

/// Case table for K.
pub fn k_op(x: Elem, y: Elem, z: Elem) -> Elem {
    if y.barrable() && Some(x) == y.bar() {
        y
    } else if x == y && z.barrable() && Some(x) == z.bar() {
        z
    } else {
        meet3(x, y, z)
    }
}

/// Lattice-term forms of J, J', K and the S gates; these are the
/// independent evaluators the verification suite compares against.
pub mod latt {
    use super::*;

    pub fn j(x: Elem, y: Elem, z: Elem) -> Elem {
        flat_join(meet3(x, bar_or_zero(y), z), meet(x, y))
    }

    pub fn jp(x: Elem, y: Elem, z: Elem) -> Elem {
        flat_join(meet3(x, y, z), meet(x, bar_or_zero(y)))
    }

    pub fn k(x: Elem, y: Elem, z: Elem) -> Elem {
        flat_join(
            flat_join(
                meet(bar_or_zero(x), y),
                meet3(bar_or_zero(x), bar_or_zero(y), z),
            ),
            meet3(x, y, z),
        )
    }

    pub fn gated_pair(x: Elem, y: Elem, z: Elem) -> Elem {
        flat_join(meet(x, y), meet(x, z))
    }

    pub fn s0(u: Elem, x: Elem, y: Elem, z: Elem) -> Elem {
        if u.in_v0() {
            gated_pair(x, y, z)
        } else {
            Elem::Zero
        }
    }

    pub fn s1(u: Elem, x: Elem, y: Elem, z: Elem) -> Elem {
        if matches!(u, Elem::One | Elem::Two) {
            gated_pair(x, y, z)
        } else {
            Elem::Zero
        }
    }

    pub fn s2(u: Elem, v: Elem, x: Elem, y: Elem, z: Elem) -> Elem {
        if v.barrable() && Some(u) == v.bar() {
            gated_pair(x, y, z)
        } else {
            Elem::Zero
        }
    }
}

pub use latt::{s0 as s0_op, s1 as s1_op, s2 as s2_op};

/// Case table for T: recovers bars when the product is not injective.
pub fn t_op(w: Elem, x: Elem, y: Elem, z: Elem) -> Elem {
    let p = prod(w, x);
    let q = prod(y, z);
    if (w, x) == (y, z) {
        p
    } else if p == q && p != Elem::Zero {
        p.bar().expect("nonzero products are barrable")
    } else {
        Elem::Zero
    }
}

/// Case table for I: produces a blank-tape encoding from head markers.
pub fn i_op(x: Elem) -> Elem {
    match x {
        Elem::One => Elem::Ci {
            i: 1,
            r: 0,
            s: 0,
            bar: false,
        },
        Elem::H => Elem::Mi {
            i: 1,
            r: 0,
            bar: false,
        },
        Elem::Two => Elem::Di {
            i: 1,
            r: 0,
            s: 0,
            bar: false,
        },
        _ => Elem::Zero,
    }
}

/// The head-tracking relation on {1, 2, H}: holds exactly for (2,2), (2,H),
/// and (1,1).
pub fn precedes(x: Elem, y: Elem) -> bool {
    matches!(
        (x, y),
        (Elem::Two, Elem::Two) | (Elem::Two, Elem::H) | (Elem::One, Elem::One)
    )
}

/// The unbarred cases of a tape operation for instruction `ins` with new-cell
/// bit `t`.
fn lr_base(ins: &Instruction, t: u8, x: Elem, y: Elem, u: Elem) -> Elem {
    let (i, r, s, j) = (ins.state as u16, ins.read, ins.write, ins.next as u16);
    match ins.dir {
        Dir::Left => match (x, y, u) {
            (Elem::One, Elem::One, Elem::Ci { i: ui, r: ur, s: us, bar: false })
                if ui == i && ur == r =>
            {
                Elem::Ci { i: j, r: t, s: us, bar: false }
            }
            (Elem::H, Elem::One, Elem::Ci { i: ui, r: ur, s: us, bar: false })
                if ui == i && ur == r && us == t =>
            {
                Elem::Mi { i: j, r: t, bar: false }
            }
            (Elem::Two, Elem::H, Elem::Mi { i: ui, r: ur, bar: false }) if ui == i && ur == r => {
                Elem::Di { i: j, r: t, s, bar: false }
            }
            (Elem::Two, Elem::Two, Elem::Di { i: ui, r: ur, s: us, bar: false })
                if ui == i && ur == r =>
            {
                Elem::Di { i: j, r: t, s: us, bar: false }
            }
            _ => Elem::Zero,
        },
        Dir::Right => match (x, y, u) {
            (Elem::One, Elem::One, Elem::Ci { i: ui, r: ur, s: us, bar: false })
                if ui == i && ur == r =>
            {
                Elem::Ci { i: j, r: t, s: us, bar: false }
            }
            (Elem::H, Elem::One, Elem::Mi { i: ui, r: ur, bar: false }) if ui == i && ur == r => {
                Elem::Ci { i: j, r: t, s, bar: false }
            }
            (Elem::Two, Elem::H, Elem::Di { i: ui, r: ur, s: us, bar: false })
                if ui == i && ur == r && us == t =>
            {
                Elem::Mi { i: j, r: t, bar: false }
            }
            (Elem::Two, Elem::Two, Elem::Di { i: ui, r: ur, s: us, bar: false })
                if ui == i && ur == r =>
            {
                Elem::Di { i: j, r: t, s: us, bar: false }
            }
            _ => Elem::Zero,
        },
    }
}

/// Full tape operation: the four base cases plus the bar rule (`∂v` when the
/// base cases send `(x, y, ∂u)` to `v` in the indexed part).
pub fn lr_op(ins: &Instruction, t: u8, x: Elem, y: Elem, u: Elem) -> Elem {
    let base = lr_base(ins, t, x, y, u);
    if base != Elem::Zero {
        return base;
    }
    if u.in_v() && u.is_barred() {
        let v = lr_base(ins, t, x, y, u.bar().unwrap());
        if v.in_v() {
            return v.bar().unwrap();
        }
    }
    Elem::Zero
}

/// First bar-producing companion of a tape operation.
pub fn u1_op(f: impl Fn(Elem, Elem, Elem) -> Elem, x: Elem, y: Elem, z: Elem, u: Elem) -> Elem {
    if !precedes(x, z) {
        return Elem::Zero;
    }
    let v = f(x, y, u);
    if v == Elem::Zero {
        return Elem::Zero;
    }
    if y == z {
        v
    } else {
        v.bar().unwrap_or(Elem::Zero)
    }
}

/// Second bar-producing companion of a tape operation.
pub fn u0_op(f: impl Fn(Elem, Elem, Elem) -> Elem, x: Elem, y: Elem, z: Elem, u: Elem) -> Elem {
    if !precedes(x, z) {
        return Elem::Zero;
    }
    let v = f(y, z, u);
    if v == Elem::Zero {
        return Elem::Zero;
    }
    if x == y {
        v
    } else {
        v.bar().unwrap_or(Elem::Zero)
    }
}

/// Index bookkeeping for the universe of a machine algebra.
#[derive(Debug, Clone)]
pub struct MachineAlgebra {
    pub tm: TuringMachine,
    /// Number of states (n + 1).
    pub state_count: usize,
    universe: Vec<Elem>,
    pub omit_k: bool,
}

impl MachineAlgebra {
    pub fn new(tm: TuringMachine, omit_k: bool) -> Self {
        let state_count = tm.state_count();
        let mut universe = vec![
            Elem::Zero,
            Elem::One,
            Elem::Two,
            Elem::H,
            Elem::C { bar: false },
            Elem::D { bar: false },
            Elem::C { bar: true },
            Elem::D { bar: true },
        ];
        for i in 0..state_count as u16 {
            for r in 0..2u8 {
                universe.push(Elem::Mi { i, r, bar: false });
                universe.push(Elem::Mi { i, r, bar: true });
                for s in 0..2u8 {
                    universe.push(Elem::Ci { i, r, s, bar: false });
                    universe.push(Elem::Ci { i, r, s, bar: true });
                    universe.push(Elem::Di { i, r, s, bar: false });
                    universe.push(Elem::Di { i, r, s, bar: true });
                }
            }
        }
        MachineAlgebra {
            tm,
            state_count,
            universe,
            omit_k,
        }
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn elem(&self, idx: usize) -> Elem {
        self.universe[idx]
    }

    /// Index of an element; direct arithmetic, no table lookup.
    pub fn index(&self, e: Elem) -> usize {
        match e {
            Elem::Zero => 0,
            Elem::One => 1,
            Elem::Two => 2,
            Elem::H => 3,
            Elem::C { bar } => 4 + 2 * bar as usize,
            Elem::D { bar } => 5 + 2 * bar as usize,
            Elem::Mi { i, r, bar } => {
                8 + 20 * i as usize + 10 * r as usize + bar as usize
            }
            Elem::Ci { i, r, s, bar } => {
                8 + 20 * i as usize + 10 * r as usize + 2 + 4 * s as usize + bar as usize
            }
            Elem::Di { i, r, s, bar } => {
                8 + 20 * i as usize + 10 * r as usize + 4 + 4 * s as usize + bar as usize
            }
        }
    }
}

fn op_rule(
    ctx: &Arc<MachineAlgebra>,
    name: &str,
    arity: usize,
    support: Vec<Args>,
    f: impl Fn(&MachineAlgebra, &[Elem]) -> Elem + Send + Sync + 'static,
) -> Operation {
    let ctx2 = Arc::clone(ctx);
    let id = format!(
        "builtin:aprime{}:{}:{}",
        if ctx.omit_k { "-nok" } else { "" },
        ctx.tm.code(),
        name
    );
    let eval = move |args: &[usize]| -> usize {
        let elems: SmallVec<[Elem; 5]> = args.iter().map(|&a| ctx2.elem(a)).collect();
        ctx2.index(f(&ctx2, &elems))
    };
    let dedup: BTreeSet<Args> = support.into_iter().collect();
    Operation {
        sym: OpSym {
            name: name.to_string(),
            arity,
        },
        kind: OpKind::Rule {
            id,
            eval: Arc::new(eval),
        },
        support: Some(Arc::new(dedup.into_iter().collect())),
    }
}

fn ix(ctx: &MachineAlgebra, e: Elem) -> u32 {
    ctx.index(e) as u32
}

/// Support generators. Each lists every tuple on which the operation can be
/// nonzero; completeness is cross-checked by the verification suite.
mod support {
    use super::*;

    pub fn nonzero(ctx: &MachineAlgebra) -> Vec<Elem> {
        (1..ctx.size()).map(|i| ctx.elem(i)).collect()
    }

    pub fn barrable(ctx: &MachineAlgebra) -> Vec<Elem> {
        nonzero(ctx).into_iter().filter(|e| e.barrable()).collect()
    }

    pub fn meet(ctx: &MachineAlgebra) -> Vec<Args> {
        nonzero(ctx)
            .iter()
            .map(|&x| smallvec![ix(ctx, x), ix(ctx, x)])
            .collect()
    }

    pub fn prod(ctx: &MachineAlgebra) -> Vec<Args> {
        let mut out = Vec::new();
        for bar in [false, true] {
            let c = Elem::C { bar };
            let d = Elem::D { bar };
            out.push(smallvec![ix(ctx, Elem::Two), ix(ctx, d)]);
            out.push(smallvec![ix(ctx, Elem::H), ix(ctx, c)]);
            out.push(smallvec![ix(ctx, Elem::One), ix(ctx, c)]);
        }
        out
    }

    pub fn j(ctx: &MachineAlgebra) -> Vec<Args> {
        let mut out = Vec::new();
        for x in nonzero(ctx) {
            for z in 0..ctx.size() {
                out.push(smallvec![ix(ctx, x), ix(ctx, x), z as u32]);
            }
            if let Some(bx) = x.bar() {
                out.push(smallvec![ix(ctx, x), ix(ctx, bx), ix(ctx, x)]);
            }
        }
        out
    }

    pub fn jp(ctx: &MachineAlgebra) -> Vec<Args> {
        let mut out = Vec::new();
        for x in nonzero(ctx) {
            out.push(smallvec![ix(ctx, x), ix(ctx, x), ix(ctx, x)]);
            if let Some(bx) = x.bar() {
                for z in 0..ctx.size() {
                    out.push(smallvec![ix(ctx, x), ix(ctx, bx), z as u32]);
                }
            }
        }
        out
    }

    pub fn k(ctx: &MachineAlgebra) -> Vec<Args> {
        let mut out = Vec::new();
        for y in barrable(ctx) {
            let by = y.bar().unwrap();
            for z in 0..ctx.size() {
                out.push(smallvec![ix(ctx, by), ix(ctx, y), z as u32]);
            }
            // x = y = ∂z
            out.push(smallvec![ix(ctx, by), ix(ctx, by), ix(ctx, y)]);
        }
        for x in nonzero(ctx) {
            out.push(smallvec![ix(ctx, x), ix(ctx, x), ix(ctx, x)]);
        }
        out
    }

    fn gated_tail(ctx: &MachineAlgebra, head: &[Elem]) -> Vec<Args> {
        // Tuples (head..., x, y, z) with (x∧y)∨(x∧z) possibly nonzero.
        let mut out = Vec::new();
        for h in head {
            let hh: Args = std::iter::once(ix(ctx, *h)).collect();
            for x in nonzero(ctx) {
                for w in 0..ctx.size() {
                    let mut t1 = hh.clone();
                    t1.extend_from_slice(&[ix(ctx, x), ix(ctx, x), w as u32]);
                    out.push(t1);
                    let mut t2 = hh.clone();
                    t2.extend_from_slice(&[ix(ctx, x), w as u32, ix(ctx, x)]);
                    out.push(t2);
                }
            }
        }
        out
    }

    pub fn s0(ctx: &MachineAlgebra) -> Vec<Args> {
        let v0: Vec<Elem> = nonzero(ctx).into_iter().filter(|e| e.in_v0()).collect();
        gated_tail(ctx, &v0)
    }

    pub fn s1(ctx: &MachineAlgebra) -> Vec<Args> {
        gated_tail(ctx, &[Elem::One, Elem::Two])
    }

    pub fn s2(ctx: &MachineAlgebra) -> Vec<Args> {
        // (u, v) with u = ∂v, then the gated tail.
        let mut out = Vec::new();
        for v in barrable(ctx) {
            let u = v.bar().unwrap();
            let head = [u];
            for mut t in gated_tail(ctx, &head) {
                t.insert(1, ix(ctx, v));
                out.push(t);
            }
        }
        out
    }

    pub fn t(ctx: &MachineAlgebra) -> Vec<Args> {
        let pairs: Vec<(Elem, Elem)> = {
            let mut ps = Vec::new();
            for x in nonzero(ctx) {
                for y in nonzero(ctx) {
                    if super::prod(x, y) != Elem::Zero {
                        ps.push((x, y));
                    }
                }
            }
            ps
        };
        let mut out = Vec::new();
        for &(w, x) in &pairs {
            for &(y, z) in &pairs {
                if super::prod(w, x) == super::prod(y, z) {
                    out.push(smallvec![ix(ctx, w), ix(ctx, x), ix(ctx, y), ix(ctx, z)]);
                }
            }
        }
        out
    }

    pub fn i(ctx: &MachineAlgebra) -> Vec<Args> {
        vec![
            smallvec![ix(ctx, Elem::One)],
            smallvec![ix(ctx, Elem::H)],
            smallvec![ix(ctx, Elem::Two)],
        ]
    }

    pub fn lr(ctx: &MachineAlgebra, ins: &Instruction, t: u8) -> Vec<Args> {
        let (i, r) = (ins.state as u16, ins.read);
        let mut out = Vec::new();
        let mut push = |x: Elem, y: Elem, u: Elem| {
            for ub in [u, u.bar().unwrap()] {
                out.push(smallvec![ix(ctx, x), ix(ctx, y), ix(ctx, ub)]);
            }
        };
        for s in 0..2u8 {
            push(Elem::One, Elem::One, Elem::Ci { i, r, s, bar: false });
            push(Elem::Two, Elem::Two, Elem::Di { i, r, s, bar: false });
        }
        match ins.dir {
            Dir::Left => {
                push(Elem::H, Elem::One, Elem::Ci { i, r, s: t, bar: false });
                push(Elem::Two, Elem::H, Elem::Mi { i, r, bar: false });
            }
            Dir::Right => {
                push(Elem::H, Elem::One, Elem::Mi { i, r, bar: false });
                push(Elem::Two, Elem::H, Elem::Di { i, r, s: t, bar: false });
            }
        }
        out
    }

    pub fn u1(ctx: &MachineAlgebra, f_support: &[Args]) -> Vec<Args> {
        // (x, y, z, u) with (x, y, u) in the tape op's support and x ≺ z.
        let mut out = Vec::new();
        for t in f_support {
            let x = ctx.elem(t[0] as usize);
            for z in [Elem::One, Elem::Two, Elem::H] {
                if precedes(x, z) {
                    out.push(smallvec![t[0], t[1], ix(ctx, z), t[2]]);
                }
            }
        }
        out
    }

    pub fn u0(ctx: &MachineAlgebra, f_support: &[Args]) -> Vec<Args> {
        // (x, y, z, u) with (y, z, u) in the tape op's support and x ≺ z.
        let mut out = Vec::new();
        for t in f_support {
            let z = ctx.elem(t[1] as usize);
            for x in [Elem::One, Elem::Two, Elem::H] {
                if precedes(x, z) {
                    out.push(smallvec![ix(ctx, x), t[0], t[1], t[2]]);
                }
            }
        }
        out
    }
}

/// Name of the tape operation for an instruction and new-cell bit.
pub fn lr_name(ins: &Instruction, t: u8) -> String {
    let head = match ins.dir {
        Dir::Left => "L",
        Dir::Right => "R",
    };
    format!("{}({},{},{})", head, ins.state, ins.read, t)
}

/// Builds the machine algebra for a Turing machine.
pub fn build_aprime(tm: &TuringMachine) -> FiniteAlgebra {
    build_aprime_with(tm, false)
}

/// Variant that can omit the K operation (for comparison experiments).
pub fn build_aprime_with(tm: &TuringMachine, omit_k: bool) -> FiniteAlgebra {
    let ctx = Arc::new(MachineAlgebra::new(tm.clone(), omit_k));
    let labels: Vec<String> = (0..ctx.size()).map(|i| ctx.elem(i).label()).collect();
    let mut ops: Vec<Operation> = Vec::new();

    ops.push(op_rule(&ctx, "zero", 0, vec![], |_, _| Elem::Zero));
    ops.push(op_rule(&ctx, "meet", 2, support::meet(&ctx), |_, a| {
        meet(a[0], a[1])
    }));
    ops.push(op_rule(&ctx, "prod", 2, support::prod(&ctx), |_, a| {
        prod(a[0], a[1])
    }));
    ops.push(op_rule(&ctx, "J", 3, support::j(&ctx), |_, a| {
        j_op(a[0], a[1], a[2])
    }));
    ops.push(op_rule(&ctx, "Jp", 3, support::jp(&ctx), |_, a| {
        jp_op(a[0], a[1], a[2])
    }));
    if !omit_k {
        ops.push(op_rule(&ctx, "K", 3, support::k(&ctx), |_, a| {
            k_op(a[0], a[1], a[2])
        }));
    }
    ops.push(op_rule(&ctx, "S0", 4, support::s0(&ctx), |_, a| {
        s0_op(a[0], a[1], a[2], a[3])
    }));
    ops.push(op_rule(&ctx, "S1", 4, support::s1(&ctx), |_, a| {
        s1_op(a[0], a[1], a[2], a[3])
    }));
    ops.push(op_rule(&ctx, "S2", 5, support::s2(&ctx), |_, a| {
        s2_op(a[0], a[1], a[2], a[3], a[4])
    }));
    ops.push(op_rule(&ctx, "T", 4, support::t(&ctx), |_, a| {
        t_op(a[0], a[1], a[2], a[3])
    }));
    ops.push(op_rule(&ctx, "I", 1, support::i(&ctx), |_, a| i_op(a[0])));

    let mut tape_ops: Vec<(String, Instruction, u8, Vec<Args>)> = Vec::new();
    for ins in tm.instructions() {
        for t in 0..2u8 {
            tape_ops.push((lr_name(ins, t), *ins, t, support::lr(&ctx, ins, t)));
        }
    }
    for (name, ins, t, supp) in &tape_ops {
        let ins = *ins;
        let t = *t;
        ops.push(op_rule(&ctx, name, 3, supp.clone(), move |_, a| {
            lr_op(&ins, t, a[0], a[1], a[2])
        }));
    }
    for (name, ins, t, supp) in &tape_ops {
        let ins1 = *ins;
        let t1 = *t;
        ops.push(op_rule(
            &ctx,
            &format!("U1:{name}"),
            4,
            support::u1(&ctx, supp),
            move |_, a| u1_op(|x, y, u| lr_op(&ins1, t1, x, y, u), a[0], a[1], a[2], a[3]),
        ));
        let ins0 = *ins;
        let t0 = *t;
        ops.push(op_rule(
            &ctx,
            &format!("U0:{name}"),
            4,
            support::u0(&ctx, supp),
            move |_, a| u0_op(|x, y, u| lr_op(&ins0, t0, x, y, u), a[0], a[1], a[2], a[3]),
        ));
    }

    FiniteAlgebra::new(labels, ops)
}

/// Resolves `builtin:aprime:<tm-code>:<op>` rule identifiers, rebuilding the
/// machine algebra the id refers to.
pub fn builtin_rule_resolver(id: &str, sym: &OpSym, labels: &[String]) -> Option<Operation> {
    let rest = id.strip_prefix("builtin:")?;
    let (family, rest) = rest.split_once(':')?;
    let omit_k = match family {
        "aprime" => false,
        "aprime-nok" => true,
        _ => return None,
    };
    // The machine code contains no colon; op names may (U1:..., U0:...).
    let (code, op_name) = rest.split_once(':')?;
    let tm = TuringMachine::from_code(code).ok()?;
    let alg = build_aprime_with(&tm, omit_k);
    if alg.labels() != labels {
        return None;
    }
    let idx = alg.op_index(op_name)?;
    let op = alg.op(idx).clone();
    if op.sym.name != sym.name || op.sym.arity != sym.arity {
        return None;
    }
    Some(op)
}

/// The machine-to-algebra configuration encoding: the coordinate of a
/// configuration element at tape position `k`. Cells left of the head map to
/// C symbols, the head cell to M, cells to the right to D; the state and the
/// currently read bit index the symbol, the cell's own bit is the
/// superscript.
pub fn config_coordinate(cfg: &Configuration, k: i64) -> Elem {
    let state = cfg.state as u16;
    let read = cfg.bit(cfg.head);
    if k < cfg.head {
        Elem::Ci {
            i: state,
            r: read,
            s: cfg.bit(k),
            bar: false,
        }
    } else if k == cfg.head {
        Elem::Mi {
            i: state,
            r: read,
            bar: false,
        }
    } else {
        Elem::Di {
            i: state,
            r: read,
            s: cfg.bit(k),
            bar: false,
        }
    }
}

/// Head-tracking vector: 1 left of `n`, H at `n`, 2 right of `n`.
pub fn alpha_coordinate(n: i64, k: i64) -> Elem {
    match k.cmp(&n) {
        std::cmp::Ordering::Less => Elem::One,
        std::cmp::Ordering::Equal => Elem::H,
        std::cmp::Ordering::Greater => Elem::Two,
    }
}

/// Tape-split vector: C strictly left of `n`, D from `n` on.
pub fn beta_coordinate(n: i64, k: i64) -> Elem {
    if k < n {
        Elem::C { bar: false }
    } else {
        Elem::D { bar: false }
    }
}

/// Per-coordinate zero-absorption report for one operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorptionReport {
    pub op: String,
    /// `true` at position `p` iff the op returns 0 whenever argument `p` is 0.
    pub absorbing: Vec<bool>,
    pub method: &'static str,
}

/// Classifies every operation coordinate as 0-absorbing or not.
///
/// With a support list the test is exact: a coordinate fails to absorb iff
/// some support tuple holds 0 there and evaluates to nonzero. Without
/// support the scan is exhaustive for small arities and sampled above.
pub fn classify_zero_absorbing(alg: &FiniteAlgebra, samples: usize, seed: u64) -> Vec<AbsorptionReport> {
    use rand::SeedableRng;
    let zero = alg.zero().expect("algebra must have a bottom element");
    let mut out = Vec::new();
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let arity = op.sym.arity;
        if arity == 0 {
            continue;
        }
        let mut absorbing = vec![true; arity];
        let method;
        if let Some(supp) = &op.support {
            method = "support-scan";
            for t in supp.iter() {
                let args: Vec<usize> = t.iter().map(|&a| a as usize).collect();
                if alg.eval(op_idx, &args) == zero {
                    continue;
                }
                for (p, &a) in args.iter().enumerate() {
                    if a == zero {
                        absorbing[p] = false;
                    }
                }
            }
        } else if alg.size().pow(arity as u32) <= 1_000_000 {
            method = "exhaustive";
            for args in alg.tuples(arity) {
                if alg.eval(op_idx, &args) == zero {
                    continue;
                }
                for (p, &a) in args.iter().enumerate() {
                    if a == zero {
                        absorbing[p] = false;
                    }
                }
            }
        } else {
            method = "sampled";
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ op_idx as u64);
            for _ in 0..samples {
                let mut args: Vec<usize> =
                    (0..arity).map(|_| rng.gen_range(0..alg.size())).collect();
                let p = rng.gen_range(0..arity);
                args[p] = zero;
                if alg.eval(op_idx, &args) != zero {
                    absorbing[p] = false;
                }
            }
        }
        out.push(AbsorptionReport {
            op: op.sym.name.clone(),
            absorbing,
            method,
        });
    }
    out
}

/// Verdict on whether one operation commutes with the flat meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetCommuteReport {
    pub op: String,
    pub commutes: bool,
    pub counterexample: Option<(Vec<usize>, Vec<usize>)>,
    pub method: &'static str,
}

/// Checks `F(ā) ∧ F(b̄) = F(ā ∧ b̄)` exhaustively when feasible, otherwise on
/// seeded samples plus all pairs touching the support.
pub fn check_meet_commuting(alg: &FiniteAlgebra, op_idx: usize, samples: usize, seed: u64) -> MeetCommuteReport {
    use rand::SeedableRng;
    let op = alg.op(op_idx);
    let arity = op.sym.arity;
    let name = op.sym.name.clone();
    let m = alg.size();
    let check = |a: &[usize], b: &[usize]| -> bool {
        let fab: Vec<usize> = a.iter().zip(b).map(|(&x, &y)| alg.meet_of(x, y)).collect();
        alg.meet_of(alg.eval(op_idx, a), alg.eval(op_idx, b)) == alg.eval(op_idx, &fab)
    };
    if arity == 0 {
        return MeetCommuteReport {
            op: name,
            commutes: true,
            counterexample: None,
            method: "trivial",
        };
    }
    let exhaustive_cost = (m as f64).powi(2 * arity as i32);
    if exhaustive_cost <= 3e7 {
        for a in alg.tuples(arity) {
            for b in alg.tuples(arity) {
                if !check(&a, &b) {
                    return MeetCommuteReport {
                        op: name,
                        commutes: false,
                        counterexample: Some((a, b)),
                        method: "exhaustive",
                    };
                }
            }
        }
        return MeetCommuteReport {
            op: name,
            commutes: true,
            counterexample: None,
            method: "exhaustive",
        };
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed ^ op_idx as u64);
    // For monotone flat operations a violation forces both operation values
    // nonzero and equal, so it suffices to cross support tuples with equal
    // outputs; random samples below back this up for non-monotone cases.
    if let Some(supp) = &op.support {
        let mut by_value: std::collections::HashMap<usize, Vec<Vec<usize>>> = Default::default();
        for t in supp.iter() {
            let a: Vec<usize> = t.iter().map(|&x| x as usize).collect();
            let v = alg.eval(op_idx, &a);
            if v != alg.zero().unwrap_or(usize::MAX) {
                by_value.entry(v).or_default().push(a);
            }
        }
        for group in by_value.values() {
            let full = group.len() * group.len() <= 1_000_000;
            let tries = if full { group.len() * group.len() } else { samples };
            for k in 0..tries {
                let (a, b) = if full {
                    (&group[k / group.len()], &group[k % group.len()])
                } else {
                    (
                        &group[rng.gen_range(0..group.len())],
                        &group[rng.gen_range(0..group.len())],
                    )
                };
                if !check(a, b) {
                    return MeetCommuteReport {
                        op: name,
                        commutes: false,
                        counterexample: Some((a.clone(), b.clone())),
                        method: "support-pairs",
                    };
                }
            }
        }
    }
    for _ in 0..samples {
        let a: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..m)).collect();
        let b: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..m)).collect();
        if !check(&a, &b) {
            return MeetCommuteReport {
                op: name,
                commutes: false,
                counterexample: Some((a, b)),
                method: "sampled",
            };
        }
    }
    MeetCommuteReport {
        op: name,
        commutes: true,
        counterexample: None,
        method: if op.support.is_some() {
            "support-sampled"
        } else {
            "sampled"
        },
    }
}

#[cfg(test)]
mod tests;
