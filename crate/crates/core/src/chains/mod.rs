//! Executable Maltsev-chain calculus: find chains witnessing congruence
//! membership, make them decreasing, normalize link heads, and reduce them
//! to one of the seven canonical shapes, verifying the endpoint images
//! after every rewrite.

use smallvec::SmallVec;
use thiserror::Error;

use crate::algebra::{FiniteAlgebra, FundamentalTranslation, UnaryPolynomial};
use crate::formulas::{e_i, ei_params};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain fails verification at link {0}")]
    BadChain(usize),
    #[error("chain is not decreasing at position {0}")]
    NotDecreasing(usize),
    #[error("head normalization failed")]
    HeadNormalization,
    #[error("no verified link form found between {0} and {1}")]
    LinkForm(usize, usize),
    #[error("rewrite system exceeded the iteration cap {0}")]
    IterationCap(usize),
    #[error("endpoints are not in a common gate image")]
    NoGateImage,
}

/// One link of a raw Maltsev chain: a unary polynomial mapping the
/// generating pair onto two consecutive chain elements.
#[derive(Debug, Clone)]
pub struct Link {
    pub poly: UnaryPolynomial,
    /// When set, the polynomial maps (c, d) to (next, this) instead of
    /// (this, next).
    pub swapped: bool,
}

/// A raw Maltsev chain: elements plus the link polynomials.
#[derive(Debug, Clone, Default)]
pub struct MaltsevChain {
    pub elems: Vec<usize>,
    pub links: Vec<Link>,
}

impl MaltsevChain {
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Each link polynomial must map {c, d} onto the link's endpoints in
    /// the recorded orientation.
    pub fn verify(&self, alg: &FiniteAlgebra, c: usize, d: usize) -> Result<(), ChainError> {
        if self.elems.len() != self.links.len() + 1 {
            return Err(ChainError::BadChain(0));
        }
        for (i, link) in self.links.iter().enumerate() {
            let fc = link.poly.apply(alg, c);
            let fd = link.poly.apply(alg, d);
            let (want_c, want_d) = if link.swapped {
                (self.elems[i + 1], self.elems[i])
            } else {
                (self.elems[i], self.elems[i + 1])
            };
            if fc != want_c || fd != want_d {
                return Err(ChainError::BadChain(i));
            }
        }
        Ok(())
    }

    /// Strictly decreasing in the flat order.
    pub fn is_decreasing(&self, alg: &FiniteAlgebra) -> bool {
        self.elems
            .windows(2)
            .all(|w| w[1] != w[0] && alg.leq(w[1], w[0]))
    }
}

/// Enumerates fundamental translations productive on the pair (u, v),
/// calling `f` with the translation and its images; stops early when `f`
/// returns true.
fn search_translations(
    alg: &FiniteAlgebra,
    u: usize,
    v: usize,
    mut f: impl FnMut(FundamentalTranslation, usize, usize) -> bool,
) -> bool {
    for (op_idx, op) in alg.ops().iter().enumerate() {
        let arity = op.sym.arity;
        if arity == 0 {
            continue;
        }
        if let Some(support) = &op.support {
            for t in support.iter() {
                for pos in 0..arity {
                    let at = t[pos] as usize;
                    if at != u && at != v {
                        continue;
                    }
                    let consts: SmallVec<[u32; 4]> = t
                        .iter()
                        .enumerate()
                        .filter(|(p, _)| *p != pos)
                        .map(|(_, &x)| x)
                        .collect();
                    let tr = FundamentalTranslation::new(op_idx, pos, consts);
                    let fu = tr.apply(alg, u);
                    let fv = tr.apply(alg, v);
                    if f(tr, fu, fv) {
                        return true;
                    }
                }
            }
        } else {
            let m = alg.size();
            if (m as f64).powi(arity as i32 - 1) * arity as f64 > 5e7 {
                continue;
            }
            for pos in 0..arity {
                for consts in alg.tuples(arity - 1) {
                    let cs: SmallVec<[u32; 4]> = consts.iter().map(|&x| x as u32).collect();
                    let tr = FundamentalTranslation::new(op_idx, pos, cs);
                    let fu = tr.apply(alg, u);
                    let fv = tr.apply(alg, v);
                    if f(tr, fu, fv) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Bounded search for a Maltsev chain from `r` to `s` over `Cg(c, d)`:
/// explores the pair graph generated from (c, d) by translation application
/// up to composition depth `depth`, then finds a path of at most `length`
/// links.
pub fn find_maltsev_chain(
    alg: &FiniteAlgebra,
    c: usize,
    d: usize,
    r: usize,
    s: usize,
    depth: usize,
    length: usize,
) -> Option<MaltsevChain> {
    if r == s {
        return Some(MaltsevChain {
            elems: vec![r],
            links: vec![],
        });
    }
    let mut pairs: Vec<(usize, usize, UnaryPolynomial)> =
        vec![(c, d, UnaryPolynomial::identity())];
    let mut seen: std::collections::BTreeSet<(usize, usize)> = [(c, d)].into_iter().collect();
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &idx in &frontier {
            let (u, v, poly) = pairs[idx].clone();
            let mut found: Vec<(usize, usize, UnaryPolynomial)> = Vec::new();
            search_translations(alg, u, v, |tr, fu, fv| {
                if fu != fv && !seen.contains(&(fu, fv)) {
                    seen.insert((fu, fv));
                    found.push((fu, fv, poly.then(tr)));
                }
                false
            });
            for item in found {
                next.push(pairs.len());
                pairs.push(item);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let m = alg.size();
    // Unordered edges with a representative polynomial: the polynomial maps
    // (c, d) to (key.0, key.1) when `swapped` is false.
    let mut best_edge: std::collections::BTreeMap<(usize, usize), (UnaryPolynomial, bool)> =
        Default::default();
    for (u, v, poly) in &pairs {
        let key = if u < v { (*u, *v) } else { (*v, *u) };
        best_edge.entry(key).or_insert_with(|| (poly.clone(), u > v));
    }
    let mut prev: Vec<Option<(usize, UnaryPolynomial, bool)>> = vec![None; m];
    let mut dist = vec![usize::MAX; m];
    dist[r] = 0;
    let mut queue = std::collections::VecDeque::from([r]);
    while let Some(x) = queue.pop_front() {
        if x == s {
            break;
        }
        if dist[x] >= length {
            continue;
        }
        for (&(a, b), (poly, swapped_ab)) in &best_edge {
            let other = if a == x {
                Some(b)
            } else if b == x {
                Some(a)
            } else {
                None
            };
            if let Some(y) = other {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    // Along the path the link runs x -> y; the polynomial
                    // maps (c, d) to (a, b) when !swapped_ab.
                    let maps_to_x_first = (a == x) != *swapped_ab;
                    prev[y] = Some((x, poly.clone(), !maps_to_x_first));
                    queue.push_back(y);
                }
            }
        }
    }
    if dist[s] == usize::MAX {
        return None;
    }
    let mut elems = vec![s];
    let mut links: Vec<Link> = Vec::new();
    let mut cur = s;
    while cur != r {
        let (p, poly, swapped) = prev[cur].clone().unwrap();
        links.push(Link { poly, swapped });
        elems.push(p);
        cur = p;
    }
    elems.reverse();
    links.reverse();
    let chain = MaltsevChain { elems, links };
    chain.verify(alg, c, d).ok()?;
    Some(chain)
}

/// Splits a chain into two strictly decreasing chains meeting at the common
/// lower bound of all chain elements: running meets from the left, and from
/// the right, with each link polynomial meeted by the accumulated constant.
pub fn make_decreasing(
    alg: &FiniteAlgebra,
    chain: &MaltsevChain,
    c: usize,
    d: usize,
) -> Result<(MaltsevChain, MaltsevChain), ChainError> {
    chain.verify(alg, c, d)?;
    let meet_op = alg.op_index("meet").expect("meet present");
    let n = chain.elems.len();
    if n == 1 {
        let single = MaltsevChain {
            elems: vec![chain.elems[0]],
            links: vec![],
        };
        return Ok((single.clone(), single));
    }
    let build = |indices: Vec<usize>| -> MaltsevChain {
        let mut elems = Vec::new();
        let mut links = Vec::new();
        let mut acc = chain.elems[indices[0]];
        elems.push(acc);
        for w in indices.windows(2) {
            let (i, j) = (w[0], w[1]);
            let link_idx = i.min(j);
            let next = alg.meet_of(acc, chain.elems[j]);
            if next == acc {
                continue;
            }
            let base = &chain.links[link_idx];
            let poly = base.poly.clone().then(FundamentalTranslation::new(
                meet_op,
                0,
                smallvec::smallvec![acc as u32],
            ));
            // Orientation is fixed by evaluation below.
            links.push(Link { poly, swapped: false });
            elems.push(next);
            acc = next;
        }
        MaltsevChain { elems, links }
    };
    let mut left = build((0..n).collect());
    let mut right = build((0..n).rev().collect());
    for ch in [&mut left, &mut right] {
        for (i, link) in ch.links.iter_mut().enumerate() {
            link.swapped = link.poly.apply(alg, c) != ch.elems[i];
        }
    }
    left.verify(alg, c, d)?;
    right.verify(alg, c, d)?;
    if left.elems.last() != right.elems.last() {
        return Err(ChainError::BadChain(0));
    }
    if !left.is_decreasing(alg) {
        return Err(ChainError::NotDecreasing(0));
    }
    if !right.is_decreasing(alg) {
        return Err(ChainError::NotDecreasing(1));
    }
    Ok((left, right))
}

/// The canonical chain shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainType {
    Empty,
    S,
    J,
    Jp,
    JpJ,
    JS,
    JpS,
    JpJS,
}

impl ChainType {
    /// Name of the library formula matching the shape.
    pub fn psi_name(&self) -> Option<&'static str> {
        match self {
            ChainType::Empty => None,
            ChainType::S => Some("psi_S"),
            ChainType::J => Some("psi_J"),
            ChainType::Jp => Some("psi_Jp"),
            ChainType::JpJ => Some("psi_JpJ"),
            ChainType::JS => Some("psi_JS"),
            ChainType::JpS => Some("psi_JpS"),
            ChainType::JpJS => Some("psi_JpJS"),
        }
    }
}

/// A verified link in chain-definition form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypedLink {
    /// Both endpoints fixed by the gate retraction e_j(n̄, ·).
    S { j: usize, nbar: Vec<usize> },
    /// u = J(u, q, e_j(n̄, u)) and v = J(u, q, e_j(n̄, v)).
    J { q: usize, j: usize, nbar: Vec<usize> },
    /// u = J'(u, q, e_j(n̄, u)) and v = J'(u, q, e_j(n̄, v)).
    Jp { q: usize, j: usize, nbar: Vec<usize> },
}

impl TypedLink {
    pub fn head_is_j(&self) -> bool {
        matches!(self, TypedLink::J { .. })
    }
    pub fn head_is_jp(&self) -> bool {
        matches!(self, TypedLink::Jp { .. })
    }
}

fn op3(alg: &FiniteAlgebra, name: &str, a: usize, b: usize, c: usize) -> usize {
    alg.eval(alg.op_index(name).expect("op present"), &[a, b, c])
}

/// Verifies the chain-definition equalities of a typed link on (u, v).
pub fn typed_link_holds(alg: &FiniteAlgebra, link: &TypedLink, u: usize, v: usize) -> bool {
    match link {
        TypedLink::S { j, nbar } => e_i(alg, *j, nbar, u) == u && e_i(alg, *j, nbar, v) == v,
        TypedLink::J { q, j, nbar } => {
            op3(alg, "J", u, *q, e_i(alg, *j, nbar, u)) == u
                && op3(alg, "J", u, *q, e_i(alg, *j, nbar, v)) == v
        }
        TypedLink::Jp { q, j, nbar } => {
            op3(alg, "Jp", u, *q, e_i(alg, *j, nbar, u)) == u
                && op3(alg, "Jp", u, *q, e_i(alg, *j, nbar, v)) == v
        }
    }
}

/// Searches gate parameters fixing both endpoints.
fn find_s_link(alg: &FiniteAlgebra, u: usize, v: usize) -> Option<TypedLink> {
    for j in 0..3 {
        for nbar in ei_params(alg.size(), j) {
            if e_i(alg, j, &nbar, u) == u && e_i(alg, j, &nbar, v) == v {
                return Some(TypedLink::S { j, nbar });
            }
        }
    }
    None
}

/// Searches a J or J' typed link for (u, v): preferred constants first
/// (the rewrite templates), then the full constant and gate space.
fn find_f_link(
    alg: &FiniteAlgebra,
    u: usize,
    v: usize,
    jp: bool,
    preferred_q: &[usize],
) -> Option<TypedLink> {
    let mk = |q: usize, j: usize, nbar: Vec<usize>| -> TypedLink {
        if jp {
            TypedLink::Jp { q, j, nbar }
        } else {
            TypedLink::J { q, j, nbar }
        }
    };
    let try_q = |q: usize| -> Option<TypedLink> {
        for nbar in [vec![u, q], vec![q, u]] {
            let link = mk(q, 2, nbar);
            if typed_link_holds(alg, &link, u, v) {
                return Some(link);
            }
        }
        for j in 0..3 {
            for nbar in ei_params(alg.size(), j) {
                let link = mk(q, j, nbar.clone());
                if typed_link_holds(alg, &link, u, v) {
                    return Some(link);
                }
            }
        }
        None
    };
    for &q in preferred_q {
        if let Some(link) = try_q(q) {
            return Some(link);
        }
    }
    for q in 0..alg.size() {
        if let Some(link) = try_q(q) {
            return Some(link);
        }
    }
    None
}

/// A chain in typed form: elements plus verified typed links.
#[derive(Debug, Clone)]
pub struct TypedChain {
    pub elems: Vec<usize>,
    pub links: Vec<TypedLink>,
}

impl TypedChain {
    pub fn verify(&self, alg: &FiniteAlgebra) -> Result<(), ChainError> {
        if self.elems.len() != self.links.len() + 1 {
            return Err(ChainError::BadChain(0));
        }
        for (i, link) in self.links.iter().enumerate() {
            if !typed_link_holds(alg, link, self.elems[i], self.elems[i + 1]) {
                return Err(ChainError::LinkForm(self.elems[i], self.elems[i + 1]));
            }
        }
        Ok(())
    }
}

/// Outcome of reducing a decreasing chain.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub chain_type: ChainType,
    pub chain: TypedChain,
    /// Rewrite trail.
    pub trace: Vec<String>,
}

/// Which translations are not zero-absorbing: the S gates in the last two
/// arguments and J/J'/K in the last argument.
fn translation_absorbing(alg: &FiniteAlgebra, t: &FundamentalTranslation) -> bool {
    let name = alg.op(t.op).sym.name.as_str();
    !matches!(
        (name, t.pos),
        ("J" | "Jp" | "K", 2) | ("S0" | "S1", 2 | 3) | ("S2", 3 | 4)
    )
}

/// The normalized head shapes of a link polynomial.
#[derive(Debug, Clone)]
pub enum HeadShape {
    /// Images land in the gate retract: g' = S_j(n̄, p, q, e_j(n̄, g(x))).
    S {
        j: usize,
        nbar: Vec<usize>,
        p: usize,
        q: usize,
    },
    /// g = outer(F(p, q, inner(x))) with F in {J, J', K} and inner
    /// zero-absorbing.
    F {
        op: &'static str,
        outer: UnaryPolynomial,
        p: usize,
        q: usize,
        inner: UnaryPolynomial,
    },
}

/// Rewrites a link polynomial into a normalized head shape, preserving its
/// images on (c, d): either both images lie in a gate retract (S shape) or
/// the innermost non-absorbing translation is a J/J'/K head; an S head
/// recurses on the outer part with the gate it introduces.
pub fn head_normalize(
    alg: &FiniteAlgebra,
    poly: &UnaryPolynomial,
    c: usize,
    d: usize,
    gate: (usize, Vec<usize>),
) -> Result<HeadShape, ChainError> {
    let gc = poly.apply(alg, c);
    let gd = poly.apply(alg, d);
    let (gate_j, gate_n) = &gate;
    if e_i(alg, *gate_j, gate_n, gc) == gc && e_i(alg, *gate_j, gate_n, gd) == gd {
        // Verify the S-shape evaluation: S_j(n̄, gc, gd, e_j(n̄, g(x))).
        let s_name = ["S0", "S1", "S2"][*gate_j];
        let s_op = alg.op_index(s_name).ok_or(ChainError::HeadNormalization)?;
        let check = |x: usize, want: usize| -> bool {
            let gx = poly.apply(alg, x);
            let e = e_i(alg, *gate_j, gate_n, gx);
            let mut args: Vec<usize> = gate_n.clone();
            args.extend([gc, gd, e]);
            alg.eval(s_op, &args) == want
        };
        if !check(c, gc) || !check(d, gd) {
            return Err(ChainError::HeadNormalization);
        }
        return Ok(HeadShape::S {
            j: *gate_j,
            nbar: gate_n.clone(),
            p: gc,
            q: gd,
        });
    }
    let split = poly
        .steps
        .iter()
        .position(|t| !translation_absorbing(alg, t));
    let Some(k) = split else {
        return Err(ChainError::HeadNormalization);
    };
    let inner = UnaryPolynomial {
        steps: poly.steps[..k].to_vec(),
    };
    let mut head = poly.steps[k].clone();
    let outer = UnaryPolynomial {
        steps: poly.steps[k + 1..].to_vec(),
    };
    let name = alg.op(head.op).sym.name.clone();
    match name.as_str() {
        "J" | "Jp" | "K" => {
            let op: &'static str = match name.as_str() {
                "J" => "J",
                "Jp" => "Jp",
                _ => "K",
            };
            Ok(HeadShape::F {
                op,
                outer,
                p: head.consts[0] as usize,
                q: head.consts[1] as usize,
                inner,
            })
        }
        "S0" | "S1" | "S2" => {
            // The gates are symmetric in their last two arguments, so the
            // active position canonicalizes to the last one.
            let arity = alg.op(head.op).sym.arity;
            head.pos = arity - 1;
            let j = match name.as_str() {
                "S0" => 0,
                "S1" => 1,
                _ => 2,
            };
            let nbar: Vec<usize> = head.consts[..if j == 2 { 2 } else { 1 }]
                .iter()
                .map(|&x| x as usize)
                .collect();
            let c0 = head.apply(alg, inner.apply(alg, c));
            let d0 = head.apply(alg, inner.apply(alg, d));
            if outer.is_identity() {
                return Ok(HeadShape::S {
                    j,
                    nbar,
                    p: c0,
                    q: d0,
                });
            }
            head_normalize(alg, &outer, c0, d0, (j, nbar))
        }
        _ => Err(ChainError::HeadNormalization),
    }
}

/// Candidate constants for the rewrite templates, built with K from the
/// link constants as in the commute constructions.
fn rho_candidates(alg: &FiniteAlgebra, r: usize, p: usize, q: usize, s: usize) -> Vec<usize> {
    let mut out = Vec::new();
    if let Some(k) = alg.op_index("K") {
        for (a, b) in [(p, q), (q, p), (p, r), (q, r), (p, s), (q, s), (r, s)] {
            out.push(alg.eval(k, &[r, a, b]));
        }
    }
    out.extend([q, p, r, s]);
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|&x| seen.insert(x));
    out
}

/// Converts one decreasing raw link into one or two typed links, template
/// candidates first, bounded search as fallback.
pub fn rewrite_link(
    alg: &FiniteAlgebra,
    u: usize,
    v: usize,
    poly: &UnaryPolynomial,
    c: usize,
    d: usize,
    gate: (usize, Vec<usize>),
    trace: &mut Vec<String>,
) -> Result<Vec<(usize, TypedLink)>, ChainError> {
    if let Some(link) = find_s_link(alg, u, v) {
        return Ok(vec![(v, link)]);
    }
    let shape = head_normalize(alg, poly, c, d, gate)?;
    let (preferred, jp_like) = match &shape {
        HeadShape::S { .. } => {
            // S outputs are fixed by their own gate, so an S shape implies
            // an S link; reaching here means the search above missed it.
            return Err(ChainError::LinkForm(u, v));
        }
        HeadShape::F { op, p, q, .. } => (rho_candidates(alg, u, *p, *q, v), *op != "J"),
    };
    if !jp_like {
        if let Some(link) = find_f_link(alg, u, v, false, &preferred) {
            return Ok(vec![(v, link)]);
        }
    } else {
        if let Some(link) = find_f_link(alg, u, v, true, &preferred) {
            return Ok(vec![(v, link)]);
        }
        // Two-link split through t1 = J(u, ρ, e2((u,ρ), v)).
        for &rho in &preferred {
            let t1 = op3(alg, "J", u, rho, e_i(alg, 2, &[u, rho], v));
            if t1 == u || t1 == v {
                continue;
            }
            let first = TypedLink::J {
                q: rho,
                j: 2,
                nbar: vec![u, rho],
            };
            if !typed_link_holds(alg, &first, u, t1) {
                continue;
            }
            if let Some(second) = find_f_link(alg, t1, v, true, &preferred) {
                trace.push(format!(
                    "split {} -> {} through {}",
                    alg.label(u),
                    alg.label(v),
                    alg.label(t1)
                ));
                return Ok(vec![(t1, first), (v, second)]);
            }
        }
    }
    for jp in [false, true] {
        if let Some(link) = find_f_link(alg, u, v, jp, &preferred) {
            return Ok(vec![(v, link)]);
        }
    }
    Err(ChainError::LinkForm(u, v))
}

/// Collapses a run of J links into one: iterated K-folding of the link
/// constants, verification-gated with search fallback.
pub fn collapse_j_run(
    alg: &FiniteAlgebra,
    top: usize,
    bottom: usize,
    links: &[TypedLink],
) -> Result<TypedLink, ChainError> {
    debug_assert!(!links.is_empty());
    let k_op = alg.op_index("K");
    let mut rho = match &links[0] {
        TypedLink::J { q, .. } => *q,
        _ => return Err(ChainError::LinkForm(top, bottom)),
    };
    for link in &links[1..] {
        let TypedLink::J { q, .. } = link else {
            return Err(ChainError::LinkForm(top, bottom));
        };
        if let Some(k) = k_op {
            rho = alg.eval(k, &[top, rho, *q]);
        }
    }
    find_f_link(alg, top, bottom, false, &[rho]).ok_or(ChainError::LinkForm(top, bottom))
}

/// Collapses a run of J' links into a J'-J pair sharing a middle element:
/// the middle is the first link's J' head applied to the gate image of the
/// bottom, per the inductive construction.
pub fn collapse_jp_run(
    alg: &FiniteAlgebra,
    top: usize,
    bottom: usize,
    links: &[TypedLink],
) -> Result<(usize, TypedLink, TypedLink), ChainError> {
    debug_assert!(!links.is_empty());
    let qs: Vec<usize> = links
        .iter()
        .filter_map(|l| match l {
            TypedLink::Jp { q, .. } => Some(*q),
            _ => None,
        })
        .collect();
    if qs.len() != links.len() {
        return Err(ChainError::LinkForm(top, bottom));
    }
    let mut middles: Vec<usize> = Vec::new();
    for link in links {
        if let TypedLink::Jp { q, j, nbar } = link {
            middles.push(op3(alg, "Jp", top, *q, e_i(alg, *j, nbar, bottom)));
        }
    }
    middles.push(bottom);
    let mut seen = std::collections::BTreeSet::new();
    middles.retain(|&x| seen.insert(x));
    for &t in &middles {
        let Some(first) = find_f_link(alg, top, t, true, &qs) else {
            continue;
        };
        if t == bottom {
            return Ok((
                t,
                first,
                TypedLink::J {
                    q: t,
                    j: 2,
                    nbar: vec![t, t],
                },
            ));
        }
        let rhos = rho_candidates(alg, top, qs[0], *qs.last().unwrap(), bottom);
        if let Some(second) = find_f_link(alg, t, bottom, false, &rhos) {
            return Ok((t, first, second));
        }
    }
    Err(ChainError::LinkForm(top, bottom))
}

/// Swaps a J-then-J' pair into a J'-then-J pair with the same endpoints,
/// via the K-built swap constant.
pub fn swap_j_jp(
    alg: &FiniteAlgebra,
    r: usize,
    t: usize,
    s: usize,
    first: &TypedLink,
    second: &TypedLink,
) -> Result<(usize, TypedLink, TypedLink), ChainError> {
    let TypedLink::J { q: q1, .. } = first else {
        return Err(ChainError::LinkForm(r, t));
    };
    let TypedLink::Jp { q: q2, j, nbar } = second else {
        return Err(ChainError::LinkForm(t, s));
    };
    let mut rhos = Vec::new();
    if let Some(k) = alg.op_index("K") {
        rhos.push(alg.eval(k, &[r, *q1, *q2]));
        rhos.push(alg.eval(k, &[r, *q2, *q1]));
    }
    rhos.extend([*q1, *q2]);
    for &rho in &rhos {
        let u = op3(alg, "Jp", r, rho, e_i(alg, *j, nbar, s));
        if u == r {
            continue;
        }
        let Some(fst) = find_f_link(alg, r, u, true, &[rho]) else {
            continue;
        };
        if u == s {
            return Ok((
                u,
                fst,
                TypedLink::J {
                    q: s,
                    j: 2,
                    nbar: vec![s, s],
                },
            ));
        }
        if let Some(snd) = find_f_link(alg, u, s, false, &[rho]) {
            return Ok((u, fst, snd));
        }
    }
    for u in 0..alg.size() {
        if u == r || !alg.leq(s, u) || !alg.leq(u, r) {
            continue;
        }
        if let Some(fst) = find_f_link(alg, r, u, true, &rhos) {
            if let Some(snd) = find_f_link(alg, u, s, false, &rhos) {
                return Ok((u, fst, snd));
            }
        }
    }
    Err(ChainError::LinkForm(r, s))
}

/// Checks the no-chain-needed collapse: for d ≤ c with equal gate images
/// everywhere and polynomials f1, f2 with t = f1(d) = f2(c), either
/// r = f1(c) equals t or t equals s = f2(d).
pub fn check_no_chain_needed(
    alg: &FiniteAlgebra,
    c: usize,
    d: usize,
    f1: &UnaryPolynomial,
    f2: &UnaryPolynomial,
) -> Result<bool, ChainError> {
    if !alg.leq(d, c) {
        return Err(ChainError::NotDecreasing(0));
    }
    for i in 0..3 {
        for nbar in ei_params(alg.size(), i) {
            if e_i(alg, i, &nbar, c) != e_i(alg, i, &nbar, d) {
                return Err(ChainError::NoGateImage);
            }
        }
    }
    let r = f1.apply(alg, c);
    let t = f1.apply(alg, d);
    let t2 = f2.apply(alg, c);
    let s = f2.apply(alg, d);
    if t != t2 {
        return Err(ChainError::BadChain(0));
    }
    Ok(r == t || t == s)
}

/// Reduces a decreasing raw chain to one of the canonical shapes.
pub fn reduce_chain(
    alg: &FiniteAlgebra,
    chain: &MaltsevChain,
    c: usize,
    d: usize,
) -> Result<Reduction, ChainError> {
    chain.verify(alg, c, d)?;
    if !chain.is_decreasing(alg) && !chain.is_empty() {
        return Err(ChainError::NotDecreasing(0));
    }
    let gate = (0..3)
        .flat_map(|j| ei_params(alg.size(), j).into_iter().map(move |n| (j, n)))
        .find(|(j, n)| e_i(alg, *j, n, c) == c && e_i(alg, *j, n, d) == d)
        .ok_or(ChainError::NoGateImage)?;

    let mut trace = Vec::new();
    if chain.is_empty() {
        return Ok(Reduction {
            chain_type: ChainType::Empty,
            chain: TypedChain {
                elems: vec![chain.elems[0]],
                links: vec![],
            },
            trace,
        });
    }

    // Stage A: typed links.
    let mut elems: Vec<usize> = vec![chain.elems[0]];
    let mut links: Vec<TypedLink> = Vec::new();
    for (i, link) in chain.links.iter().enumerate() {
        let (u, v) = (chain.elems[i], chain.elems[i + 1]);
        let typed = rewrite_link(alg, u, v, &link.poly, c, d, gate.clone(), &mut trace)?;
        for (to, tl) in typed {
            elems.push(to);
            links.push(tl);
        }
    }
    // Drop degenerate repeats.
    let mut i = 0;
    while i < links.len() {
        if elems[i] == elems[i + 1] {
            elems.remove(i + 1);
            links.remove(i);
        } else {
            i += 1;
        }
    }

    // Stage B: collapse the S tail.
    if let Some(first_s) = links.iter().position(|l| matches!(l, TypedLink::S { .. })) {
        if first_s + 1 < links.len() || true {
            let top = elems[first_s];
            let bottom = *elems.last().unwrap();
            let link = find_s_link(alg, top, bottom).ok_or(ChainError::LinkForm(top, bottom))?;
            elems.truncate(first_s + 1);
            elems.push(bottom);
            links.truncate(first_s);
            links.push(link);
            trace.push(format!(
                "S tail from {} to {}",
                alg.label(top),
                alg.label(bottom)
            ));
        }
    }
    let s_tail = matches!(links.last(), Some(TypedLink::S { .. }));

    // Stage C: rewrite the J/J' prefix.
    let cap = 4 * chain.links.len().max(1) + 8;
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > cap {
            return Err(ChainError::IterationCap(cap));
        }
        let prefix_len = links.len() - usize::from(s_tail);
        if prefix_len <= 1 {
            break;
        }
        if let Some(i) =
            (0..prefix_len - 1).find(|&i| links[i].head_is_j() && links[i + 1].head_is_j())
        {
            let seg: Vec<TypedLink> = links[i..i + 2].to_vec();
            let merged = collapse_j_run(alg, elems[i], elems[i + 2], &seg)?;
            links.splice(i..i + 2, [merged]);
            elems.remove(i + 1);
            trace.push("J-J => J".into());
            continue;
        }
        if let Some(i) =
            (0..prefix_len - 1).find(|&i| links[i].head_is_jp() && links[i + 1].head_is_jp())
        {
            let seg: Vec<TypedLink> = links[i..i + 2].to_vec();
            let (mid, first, second) = collapse_jp_run(alg, elems[i], elems[i + 2], &seg)?;
            links.splice(i..i + 2, [first, second]);
            elems[i + 1] = mid;
            trace.push("J'-J' => J'-J".into());
            if mid == elems[i + 2] {
                // Degenerate J part: drop it.
                links.remove(i + 1);
                elems.remove(i + 1);
            }
            continue;
        }
        if let Some(i) =
            (0..prefix_len - 1).find(|&i| links[i].head_is_j() && links[i + 1].head_is_jp())
        {
            let (first, second) = (links[i].clone(), links[i + 1].clone());
            let (mid, fst, snd) =
                swap_j_jp(alg, elems[i], elems[i + 1], elems[i + 2], &first, &second)?;
            links[i] = fst;
            links[i + 1] = snd;
            elems[i + 1] = mid;
            trace.push("J-J' => J'-J".into());
            if mid == elems[i + 2] {
                links.remove(i + 1);
                elems.remove(i + 1);
            }
            continue;
        }
        break;
    }

    let typed = TypedChain { elems, links };
    typed.verify(alg)?;
    let prefix: Vec<bool> = typed
        .links
        .iter()
        .filter(|l| !matches!(l, TypedLink::S { .. }))
        .map(|l| l.head_is_jp())
        .collect();
    let chain_type = match (prefix.as_slice(), s_tail) {
        ([], false) => ChainType::Empty,
        ([], true) => ChainType::S,
        ([false], false) => ChainType::J,
        ([false], true) => ChainType::JS,
        ([true], false) => ChainType::Jp,
        ([true], true) => ChainType::JpS,
        ([true, false], false) => ChainType::JpJ,
        ([true, false], true) => ChainType::JpJS,
        _ => return Err(ChainError::IterationCap(cap)),
    };
    Ok(Reduction {
        chain_type,
        chain: typed,
        trace,
    })
}

#[cfg(test)]
mod tests;
