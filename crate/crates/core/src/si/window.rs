//! Power-window construction: the subalgebra of a finite power of the
//! machine algebra generated by the head-tracking vectors α_n and the
//! tape-split vectors β_n, together with the zero-class quotient and the
//! machine-run cross-check.
//!
//! The closure works directly on coordinate vectors and exploits flatness:
//! full tuple enumeration is replaced by op-specific candidate generators
//! (meets for the order parts, bar-matched pairs for the J/J'/K tails,
//! restriction masks for the S gates, product pairs for T, and head-pattern
//! pairs for the tape operations).

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::aprime::{
    alpha_coordinate, beta_coordinate, config_coordinate, i_op, j_op, jp_op, k_op,
    lr_op, meet, prod, t_op, u0_op, u1_op, Elem,
};
use crate::tm::{step, Configuration, StepResult, TuringMachine};

type Vect = Vec<Elem>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GammaWindowError {
    #[error("generation exceeded the element cap {cap}; reduce the half-width")]
    CapExceeded { cap: usize },
    #[error("generation exceeded the work budget; reduce the half-width")]
    WorkExceeded,
    #[error("half-width must be at least 2")]
    WidthTooSmall,
}

/// Report of the window construction.
#[derive(Debug)]
pub struct GammaWindowReport {
    pub half_width: i64,
    /// Verified machine steps in the simulation cross-check.
    pub sim_steps: usize,
    /// Size of the generated subalgebra, when generation ran.
    pub generated_size: Option<usize>,
    pub gamma0_size: Option<usize>,
    /// Nowhere-zero outputs of the tape operations and I.
    pub sigma_size: Option<usize>,
    /// No nowhere-zero generated element contains a barred coordinate.
    pub no_bars_outside_gamma0: Option<bool>,
    /// K maps the restricted set Γ' into the generated set, agreeing with
    /// the triple meet off the zero class.
    pub k_closed_on_gamma_prime: Option<bool>,
    /// Collapsing the zero class is a congruence of the generated algebra.
    pub zero_class_congruence: Option<bool>,
    /// In the zero-class quotient, α_n · β_{n+1} = β_n holds for interior n.
    pub beta_chain_length: Option<usize>,
}

struct Gen<'a> {
    tm: &'a TuringMachine,
    coords: Vec<i64>,
    elems: Vec<Vect>,
    index: HashMap<Vect, usize>,
    work: u64,
    cap: usize,
    work_cap: u64,
    /// Nonzero tape-op applications (x, y, u, out) discovered so far.
    tape_apps: Vec<(usize, usize, usize, Vect)>,
    /// Nowhere-zero outputs of tape ops and I.
    sigma: BTreeSet<Vect>,
    /// Violations of the zero-class congruence found during generation.
    zero_class_ok: bool,
}

impl<'a> Gen<'a> {
    fn width(&self) -> usize {
        self.coords.len()
    }

    fn push(&mut self, v: Vect) -> Result<(), GammaWindowError> {
        if !self.index.contains_key(&v) {
            if self.elems.len() >= self.cap {
                return Err(GammaWindowError::CapExceeded { cap: self.cap });
            }
            self.index.insert(v.clone(), self.elems.len());
            self.elems.push(v);
        }
        Ok(())
    }

    fn spend(&mut self, amount: u64) -> Result<(), GammaWindowError> {
        self.work += amount;
        if self.work > self.work_cap {
            return Err(GammaWindowError::WorkExceeded);
        }
        Ok(())
    }

    fn is_zero_class(v: &Vect) -> bool {
        v.iter().any(|&e| e == Elem::Zero)
    }

    /// One full candidate sweep; returns whether anything new appeared.
    fn sweep(&mut self) -> Result<bool, GammaWindowError> {
        let before = self.elems.len();
        let snapshot: Vec<Vect> = self.elems.clone();
        let n = snapshot.len();
        let w = self.width();
        let barred: Vec<bool> = snapshot
            .iter()
            .map(|v| v.iter().any(|e| e.is_barred()))
            .collect();
        let bar_ids: Vec<usize> = (0..n).filter(|&i| barred[i]).collect();
        let head_like: Vec<usize> = (0..n)
            .filter(|&i| {
                snapshot[i]
                    .iter()
                    .any(|e| matches!(e, Elem::One | Elem::Two | Elem::H))
            })
            .collect();

        // Meets and products.
        self.spend((n * n) as u64 * 2)?;
        for i in 0..n {
            for j in i..n {
                let m: Vect = (0..w).map(|k| meet(snapshot[i][k], snapshot[j][k])).collect();
                self.push(m)?;
            }
        }
        let mut prod_pairs: Vec<(usize, usize, Vect)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let p: Vect = (0..w).map(|k| prod(snapshot[i][k], snapshot[j][k])).collect();
                if p.iter().any(|&e| e != Elem::Zero) {
                    prod_pairs.push((i, j, p.clone()));
                }
                self.push(p)?;
            }
        }

        // J / J' / K. Pairs without bar interaction reduce to meets; pairs
        // with bar-matched or shared barrable coordinates get the full z
        // loop over the productive z candidates.
        for i in 0..n {
            for j in 0..n {
                let x = &snapshot[i];
                let y = &snapshot[j];
                let bar_match = (0..w).any(|k| y[k].barrable() && Some(x[k]) == y[k].bar());
                let shared_barrable = (0..w).any(|k| x[k] == y[k] && x[k].barrable());
                if bar_match {
                    self.spend(3 * n as u64)?;
                    for z in &snapshot {
                        let mut zero_ok = true;
                        for f in [j_op, jp_op, k_op] {
                            let out: Vect = (0..w).map(|k| f(x[k], y[k], z[k])).collect();
                            // Zero-class congruence: outputs on zero-class z
                            // must stay related to the z -> 0 sibling.
                            if Self::is_zero_class(z) {
                                let sib: Vect =
                                    (0..w).map(|k| f(x[k], y[k], Elem::Zero)).collect();
                                if out != sib
                                    && !(Self::is_zero_class(&out) && Self::is_zero_class(&sib))
                                {
                                    zero_ok = false;
                                }
                            }
                            self.push(out)?;
                        }
                        if !zero_ok {
                            self.zero_class_ok = false;
                        }
                    }
                } else if shared_barrable {
                    // Only K's second case can pick up z here, and only for
                    // z matching a barred/unbarred twin.
                    let candidates: Vec<usize> = if barred[i] {
                        (0..n).collect()
                    } else {
                        bar_ids.clone()
                    };
                    self.spend(candidates.len() as u64)?;
                    for &zi in &candidates {
                        let z = &snapshot[zi];
                        let kv: Vect = (0..w).map(|k| k_op(x[k], y[k], z[k])).collect();
                        if Self::is_zero_class(z) {
                            let sib: Vect =
                                (0..w).map(|k| k_op(x[k], y[k], Elem::Zero)).collect();
                            if kv != sib
                                && !(Self::is_zero_class(&kv) && Self::is_zero_class(&sib))
                            {
                                self.zero_class_ok = false;
                            }
                        }
                        self.push(kv)?;
                    }
                }
            }
        }

        // S gates: every output is a join of two restrictions below the
        // same retract e = gate(u) ∧ x, so enumerate distinct retracts and
        // join their lower sets pairwise.
        let mut masks: BTreeSet<Vec<bool>> = BTreeSet::new();
        for v in &snapshot {
            let g1: Vec<bool> = v.iter().map(|e| matches!(e, Elem::One | Elem::Two)).collect();
            if g1.iter().any(|&b| b) {
                masks.insert(g1);
            }
            let g0: Vec<bool> = v.iter().map(|e| e.in_v0()).collect();
            if g0.iter().any(|&b| b) {
                masks.insert(g0);
            }
        }
        for &ui in bar_ids.iter() {
            for v in &snapshot {
                let u = &snapshot[ui];
                let g2a: Vec<bool> = (0..w)
                    .map(|k| v[k].barrable() && Some(u[k]) == v[k].bar())
                    .collect();
                if g2a.iter().any(|&b| b) {
                    masks.insert(g2a);
                }
                let g2b: Vec<bool> = (0..w)
                    .map(|k| u[k].barrable() && Some(v[k]) == u[k].bar())
                    .collect();
                if g2b.iter().any(|&b| b) {
                    masks.insert(g2b);
                }
            }
        }
        let mut retracts: BTreeSet<Vect> = BTreeSet::new();
        for mask in &masks {
            for v in &snapshot {
                let e: Vect = (0..w)
                    .map(|k| if mask[k] { v[k] } else { Elem::Zero })
                    .collect();
                retracts.insert(e);
            }
        }
        self.spend(retracts.len() as u64 * n as u64)?;
        for e in &retracts {
            self.push(e.clone())?;
            let mut lower: BTreeSet<Vect> = BTreeSet::new();
            for v in &snapshot {
                lower.insert((0..w).map(|k| meet(e[k], v[k])).collect());
            }
            let lower: Vec<Vect> = lower.into_iter().collect();
            self.spend((lower.len() * lower.len()) as u64)?;
            for a in &lower {
                for b in &lower {
                    let join: Vect = (0..w)
                        .map(|k| if a[k] != Elem::Zero { a[k] } else { b[k] })
                        .collect();
                    self.push(join)?;
                }
            }
        }

        // T over product pairs.
        self.spend((prod_pairs.len() * prod_pairs.len()) as u64)?;
        for (i1, j1, p) in &prod_pairs {
            for (i2, j2, q) in &prod_pairs {
                if (0..w).any(|k| p[k] == q[k] && p[k] != Elem::Zero) {
                    let t: Vect = (0..w)
                        .map(|k| {
                            t_op(
                                snapshot[*i1][k],
                                snapshot[*j1][k],
                                snapshot[*i2][k],
                                snapshot[*j2][k],
                            )
                        })
                        .collect();
                    self.push(t)?;
                }
            }
        }

        // I.
        self.spend(n as u64)?;
        for v in &snapshot {
            let out: Vect = v.iter().map(|&e| i_op(e)).collect();
            if out.iter().all(|&e| e != Elem::Zero) {
                self.sigma.insert(out.clone());
            }
            self.push(out)?;
        }

        // Tape operations over head-pattern pairs.
        let mut tape_apps: Vec<(usize, usize, usize, Vect)> = Vec::new();
        for ins in self.tm.instructions() {
            for t in 0..2u8 {
                for &i in &head_like {
                    for &j in &head_like {
                        let x = &snapshot[i];
                        let y = &snapshot[j];
                        let pattern = (0..w).any(|k| {
                            matches!(
                                (x[k], y[k]),
                                (Elem::One, Elem::One)
                                    | (Elem::H, Elem::One)
                                    | (Elem::Two, Elem::H)
                                    | (Elem::Two, Elem::Two)
                            )
                        });
                        if !pattern {
                            continue;
                        }
                        self.spend(n as u64)?;
                        for (ui, u) in snapshot.iter().enumerate() {
                            let out: Vect =
                                (0..w).map(|k| lr_op(ins, t, x[k], y[k], u[k])).collect();
                            if out.iter().any(|&e| e != Elem::Zero) {
                                if out.iter().all(|&e| e != Elem::Zero) {
                                    self.sigma.insert(out.clone());
                                }
                                tape_apps.push((i, j, ui, out.clone()));
                            }
                            self.push(out)?;
                        }
                    }
                }
            }
        }

        // U companions over recorded tape applications.
        let apps = tape_apps.clone();
        for ins in self.tm.instructions() {
            for t in 0..2u8 {
                for (i, j, ui, _) in &apps {
                    let x = &snapshot[*i];
                    let y = &snapshot[*j];
                    let u = &snapshot[*ui];
                    self.spend(2 * head_like.len() as u64)?;
                    for &zi in &head_like {
                        let z = &snapshot[zi];
                        let u1: Vect = (0..w)
                            .map(|k| {
                                u1_op(
                                    |a, b, c| lr_op(ins, t, a, b, c),
                                    x[k],
                                    y[k],
                                    z[k],
                                    u[k],
                                )
                            })
                            .collect();
                        self.push(u1)?;
                        let u0: Vect = (0..w)
                            .map(|k| {
                                u0_op(
                                    |a, b, c| lr_op(ins, t, a, b, c),
                                    x[k],
                                    y[k],
                                    z[k],
                                    u[k],
                                )
                            })
                            .collect();
                        self.push(u0)?;
                    }
                }
            }
        }
        self.tape_apps = tape_apps;

        Ok(self.elems.len() > before)
    }
}

/// Runs the machine-op/simulator cross-check: starting from I(α_start), the
/// tape operations must reproduce the simulator's configurations encoded
/// coordinatewise, for as many steps as fit in the window.
fn simulation_check(
    tm: &TuringMachine,
    coords: &[i64],
    start: i64,
    max_steps: usize,
) -> Option<usize> {
    let width = coords.len();
    let alpha = |n: i64| -> Vect { coords.iter().map(|&k| alpha_coordinate(n, k)).collect() };
    let encode = |cfg: &Configuration| -> Vect {
        coords.iter().map(|&k| config_coordinate(cfg, k)).collect()
    };
    // I(α_start) must encode the initial configuration.
    let init = Configuration::initial(start);
    let i_out: Vect = alpha(start).iter().map(|&e| i_op(e)).collect();
    if i_out != encode(&init) {
        return None;
    }
    let mut cfg = init;
    let mut vec = i_out;
    let mut verified = 0;
    for _ in 0..max_steps {
        let next = match step(tm, &cfg) {
            StepResult::Next(q) => q,
            _ => break,
        };
        if !coords.contains(&next.head) || !coords.contains(&cfg.head) {
            break;
        }
        let ins = tm.instruction(cfg.state, cfg.bit(cfg.head)).unwrap();
        let (left, right) = match ins.dir {
            crate::tm::Dir::Left => (next.head, cfg.head),
            crate::tm::Dir::Right => (cfg.head, next.head),
        };
        // The new-cell bit parameter is the bit the head will read next.
        let t = cfg.bit(match ins.dir {
            crate::tm::Dir::Left => cfg.head - 1,
            crate::tm::Dir::Right => cfg.head + 1,
        });
        let (ax, ay) = (alpha(left), alpha(right));
        let out: Vect = (0..width)
            .map(|k| lr_op(ins, t, ax[k], ay[k], vec[k]))
            .collect();
        if out != encode(&next) {
            return Some(verified);
        }
        verified += 1;
        cfg = next;
        vec = out;
    }
    Some(verified)
}

/// Builds the window report. `generate` controls whether the (potentially
/// expensive) full subuniverse generation and its checks run.
pub fn build_gamma_window(
    tm: &TuringMachine,
    half_width: i64,
    generate: bool,
    cap: usize,
) -> Result<GammaWindowReport, GammaWindowError> {
    if half_width < 2 {
        return Err(GammaWindowError::WidthTooSmall);
    }
    let coords: Vec<i64> = (-half_width..=half_width).collect();
    let width = coords.len();

    let sim_steps = simulation_check(tm, &coords, -half_width + 1, 2 * half_width as usize - 1)
        .unwrap_or(0);

    let mut report = GammaWindowReport {
        half_width,
        sim_steps,
        generated_size: None,
        gamma0_size: None,
        sigma_size: None,
        no_bars_outside_gamma0: None,
        k_closed_on_gamma_prime: None,
        zero_class_congruence: None,
        beta_chain_length: None,
    };
    if !generate {
        return Ok(report);
    }

    let mut gen = Gen {
        tm,
        coords: coords.clone(),
        elems: Vec::new(),
        index: HashMap::new(),
        work: 0,
        cap,
        work_cap: 1_000_000_000,
        tape_apps: Vec::new(),
        sigma: BTreeSet::new(),
        zero_class_ok: true,
    };
    gen.push(vec![Elem::Zero; width])?;
    let gen_range: Vec<i64> = (-half_width + 1..half_width).collect();
    for &n in &gen_range {
        gen.push(coords.iter().map(|&k| alpha_coordinate(n, k)).collect())?;
        gen.push(coords.iter().map(|&k| beta_coordinate(n, k)).collect())?;
    }
    while gen.sweep()? {}

    let elems = gen.elems.clone();
    let gamma0: Vec<usize> = (0..elems.len())
        .filter(|&i| Gen::is_zero_class(&elems[i]))
        .collect();
    report.generated_size = Some(elems.len());
    report.gamma0_size = Some(gamma0.len());
    report.sigma_size = Some(gen.sigma.len());

    // No barred coordinates outside the zero class.
    let no_bars = elems
        .iter()
        .filter(|v| !Gen::is_zero_class(v))
        .all(|v| v.iter().all(|e| !e.is_barred()));
    report.no_bars_outside_gamma0 = Some(no_bars);

    // Γ' = Γ0 ∪ Σ ∪ {α_n, β_n}: closed under K, with K = triple meet when
    // the first two arguments avoid the zero class.
    let mut gamma_prime: BTreeSet<Vect> = gamma0.iter().map(|&i| elems[i].clone()).collect();
    gamma_prime.extend(gen.sigma.iter().cloned());
    for &n in &gen_range {
        gamma_prime.insert(coords.iter().map(|&k| alpha_coordinate(n, k)).collect());
        gamma_prime.insert(coords.iter().map(|&k| beta_coordinate(n, k)).collect());
    }
    let gp: Vec<Vect> = gamma_prime.iter().cloned().collect();
    let mut k_closed = true;
    'outer: for a in &gp {
        for b in &gp {
            for c in &gp {
                let kv: Vect = (0..width).map(|k| k_op(a[k], b[k], c[k])).collect();
                if !gamma_prime.contains(&kv) {
                    k_closed = false;
                    break 'outer;
                }
                if !Gen::is_zero_class(a) && !Gen::is_zero_class(b) {
                    if Gen::is_zero_class(c) {
                        // A zero-class third argument can still trigger K's
                        // barred case, but the value stays in the zero class.
                        if !Gen::is_zero_class(&kv) {
                            k_closed = false;
                            break 'outer;
                        }
                    } else {
                        let m3: Vect = (0..width)
                            .map(|k| meet(meet(a[k], b[k]), c[k]))
                            .collect();
                        if kv != m3 {
                            k_closed = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    report.k_closed_on_gamma_prime = Some(k_closed);
    report.zero_class_congruence = Some(gen.zero_class_ok);

    // Sequential structure among the β vectors: α_n · β_{n+1} = β_n.
    let mut chain = 0usize;
    for win in gen_range.windows(2) {
        let (n, n1) = (win[0], win[1]);
        let alpha_n: Vect = coords.iter().map(|&k| alpha_coordinate(n, k)).collect();
        let beta_n: Vect = coords.iter().map(|&k| beta_coordinate(n, k)).collect();
        let beta_n1: Vect = coords.iter().map(|&k| beta_coordinate(n1, k)).collect();
        let p: Vect = (0..width).map(|k| prod(alpha_n[k], beta_n1[k])).collect();
        if p == beta_n {
            chain += 1;
        }
    }
    report.beta_chain_length = Some(chain);

    Ok(report)
}

/// The generated window subalgebra as vectors, for callers that need the
/// raw universe (tests and the power-subalgebra cross-check).
pub fn generate_window_universe(
    tm: &TuringMachine,
    half_width: i64,
    cap: usize,
) -> Result<Vec<Vec<Elem>>, GammaWindowError> {
    if half_width < 2 {
        return Err(GammaWindowError::WidthTooSmall);
    }
    let coords: Vec<i64> = (-half_width..=half_width).collect();
    let mut gen = Gen {
        tm,
        coords: coords.clone(),
        elems: Vec::new(),
        index: HashMap::new(),
        work: 0,
        cap,
        work_cap: 1_000_000_000,
        tape_apps: Vec::new(),
        sigma: BTreeSet::new(),
        zero_class_ok: true,
    };
    gen.push(vec![Elem::Zero; coords.len()])?;
    for n in -half_width + 1..half_width {
        gen.push(coords.iter().map(|&k| alpha_coordinate(n, k)).collect())?;
        gen.push(coords.iter().map(|&k| beta_coordinate(n, k)).collect())?;
    }
    while gen.sweep()? {}
    Ok(gen.elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tm::parse_tm;

    fn loop_machine() -> TuringMachine {
        parse_tm("states 2\n1 0 0 R 1\n").unwrap()
    }

    #[test]
    fn i_of_alpha_encodes_initial_configuration() {
        let coords: Vec<i64> = (-3..=3).collect();
        let out: Vec<Elem> = coords
            .iter()
            .map(|&k| i_op(alpha_coordinate(0, k)))
            .collect();
        for (pos, &k) in coords.iter().enumerate() {
            let want = match k.cmp(&0) {
                std::cmp::Ordering::Less => Elem::Ci { i: 1, r: 0, s: 0, bar: false },
                std::cmp::Ordering::Equal => Elem::Mi { i: 1, r: 0, bar: false },
                std::cmp::Ordering::Greater => Elem::Di { i: 1, r: 0, s: 0, bar: false },
            };
            assert_eq!(out[pos], want);
        }
    }

    #[test]
    fn alpha_meets_land_in_zero_class() {
        let coords: Vec<i64> = (-2..=2).collect();
        for n in -1..=1 {
            for m in -1..=1 {
                if n == m {
                    continue;
                }
                let v: Vec<Elem> = coords
                    .iter()
                    .map(|&k| meet(alpha_coordinate(n, k), alpha_coordinate(m, k)))
                    .collect();
                assert!(v.iter().any(|&e| e == Elem::Zero));
            }
        }
    }

    #[test]
    fn loop_machine_simulation_cross_check() {
        let report = build_gamma_window(&loop_machine(), 6, false, 4096).unwrap();
        assert!(report.sim_steps >= 10, "verified {} steps", report.sim_steps);
    }

    #[test]
    fn generated_window_contains_configuration_elements() {
        let tm = loop_machine();
        let universe = generate_window_universe(&tm, 2, 4096).unwrap();
        let coords: Vec<i64> = (-2..=2).collect();
        // I(α_n) for every generator index n lies in the closure.
        for n in -1..=1 {
            let v: Vec<Elem> = coords
                .iter()
                .map(|&k| i_op(alpha_coordinate(n, k)))
                .collect();
            assert!(universe.contains(&v), "missing I(alpha_{n})");
        }
    }

    #[test]
    fn window_report_checks_pass_for_loop_machine() {
        let report = build_gamma_window(&loop_machine(), 2, true, 4096).unwrap();
        assert!(report.sim_steps >= 1);
        assert!(report.generated_size.unwrap() > 10);
        assert_eq!(report.no_bars_outside_gamma0, Some(true));
        assert_eq!(report.k_closed_on_gamma_prime, Some(true));
        assert_eq!(report.zero_class_congruence, Some(true));
        assert_eq!(report.beta_chain_length, Some(2));
    }

    #[test]
    fn width_guard() {
        assert!(matches!(
            build_gamma_window(&loop_machine(), 1, false, 100),
            Err(GammaWindowError::WidthTooSmall)
        ));
    }
}
