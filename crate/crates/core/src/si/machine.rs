//! Machine configuration algebras: the algebra on {0} ∪ {a_n | n ∈ N} ∪ Ω_N
//! whose tape operations execute machine steps, and its quotient by the
//! congruence that collapses the complement of a run set Φ.

use std::collections::BTreeSet;
use std::sync::Arc;

use smallvec::smallvec;
use thiserror::Error;

use crate::algebra::{
    monolith, quotient, Args, CongruenceError, FiniteAlgebra, OpKind, Operation, Partition,
    Quotient,
};
use crate::tm::{
    enumerate_omega, leq_n, restricted_successor, Configuration, Dir, Interval, TuringMachine,
};

/// Specification of a machine algebra: head interval, tape window, the run
/// set Φ, and its base configuration P.
#[derive(Debug, Clone)]
pub struct MachineSpec {
    pub tm: TuringMachine,
    pub n: Interval,
    pub window: Interval,
    pub p: Configuration,
    pub phi: Vec<Configuration>,
}

#[derive(Debug, Error)]
pub enum SpecParseError {
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error("missing field {0}")]
    Missing(&'static str),
    #[error("window must contain the head interval")]
    WindowTooSmall,
}

impl MachineSpec {
    /// `Φ` defaulting: all configurations that reach `p` inside the
    /// restricted space, provided no halting configuration is reachable
    /// from `p` itself.
    pub fn with_default_phi(
        tm: &TuringMachine,
        n: Interval,
        window: Interval,
        p: Configuration,
    ) -> Self {
        let phi = default_phi(tm, &n, &window, &p);
        MachineSpec {
            tm: tm.clone(),
            n,
            window,
            p,
            phi,
        }
    }

    /// Parses the structured text form:
    /// ```text
    /// N <lo> <hi>
    /// window <lo> <hi>
    /// P <state>@<head>:<bits>
    /// phi <state>@<head>:<bits>   # optional, repeated; omit for default
    /// ```
    /// Bits run over the window cells from lo to hi.
    pub fn parse(tm: &TuringMachine, text: &str) -> Result<Self, SpecParseError> {
        let mut n = None;
        let mut window = None;
        let mut p = None;
        let mut phi: Vec<Configuration> = Vec::new();
        let mut explicit_phi = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap();
            match head {
                "N" | "window" => {
                    let lo: i64 = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or(SpecParseError::Line(line_no, "expected two integers".into()))?;
                    let hi: i64 = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or(SpecParseError::Line(line_no, "expected two integers".into()))?;
                    if lo > hi {
                        return Err(SpecParseError::Line(line_no, "empty interval".into()));
                    }
                    if head == "N" {
                        n = Some(Interval::new(lo, hi));
                    } else {
                        window = Some(Interval::new(lo, hi));
                    }
                }
                "P" | "phi" => {
                    let w = window.ok_or(SpecParseError::Missing("window before P/phi"))?;
                    let body = tokens
                        .next()
                        .ok_or(SpecParseError::Line(line_no, "expected configuration".into()))?;
                    let cfg = parse_config(body, &w)
                        .map_err(|e| SpecParseError::Line(line_no, e))?;
                    if head == "P" {
                        p = Some(cfg);
                    } else {
                        explicit_phi = true;
                        phi.push(cfg);
                    }
                }
                other => {
                    return Err(SpecParseError::Line(line_no, format!("unknown field {other}")))
                }
            }
        }
        let n = n.ok_or(SpecParseError::Missing("N"))?;
        let window = window.ok_or(SpecParseError::Missing("window"))?;
        let p = p.ok_or(SpecParseError::Missing("P"))?;
        if !window.contains_interval(&n) {
            return Err(SpecParseError::WindowTooSmall);
        }
        if explicit_phi {
            Ok(MachineSpec {
                tm: tm.clone(),
                n,
                window,
                p,
                phi,
            })
        } else {
            Ok(MachineSpec::with_default_phi(tm, n, window, p))
        }
    }
}

fn parse_config(body: &str, window: &Interval) -> Result<Configuration, String> {
    let (state, rest) = body.split_once('@').ok_or("expected <state>@<head>:<bits>")?;
    let (head, bits) = rest.split_once(':').ok_or("expected <state>@<head>:<bits>")?;
    let state: usize = state.parse().map_err(|_| "bad state".to_string())?;
    let head: i64 = head.parse().map_err(|_| "bad head".to_string())?;
    if bits.len() != window.len() {
        return Err(format!(
            "expected {} tape bits for window {window}",
            window.len()
        ));
    }
    let mut ones = Vec::new();
    for (off, ch) in bits.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => ones.push(window.lo + off as i64),
            _ => return Err("tape bits must be 0/1".to_string()),
        }
    }
    Ok(Configuration::new(ones, head, state))
}

/// Label in the `state@head:bits` grammar.
pub fn config_label(cfg: &Configuration, window: &Interval) -> String {
    let bits: String = window
        .iter()
        .map(|k| if cfg.bit(k) == 1 { '1' } else { '0' })
        .collect();
    format!("{}@{}:{}", cfg.state, cfg.head, bits)
}

/// Default Φ: the backward cone of `p` in the restricted configuration
/// space, provided the forward walk from `p` never halts; otherwise empty.
pub fn default_phi(
    tm: &TuringMachine,
    n: &Interval,
    window: &Interval,
    p: &Configuration,
) -> Vec<Configuration> {
    // Forward walk from p must avoid halting configurations.
    let mut current = p.clone();
    let mut seen = BTreeSet::new();
    loop {
        if current.is_halting() {
            return Vec::new();
        }
        if !seen.insert(current.clone()) {
            break;
        }
        match restricted_successor(tm, n, window, &current) {
            Some(next) => current = next,
            None => break,
        }
    }
    enumerate_omega(tm, n, window)
        .into_iter()
        .filter(|q| leq_n(tm, n, p, q, window).unwrap_or(false))
        .collect()
}

/// Report of the five conditions on (Φ, P).
#[derive(Debug, Clone)]
pub struct PhiReport {
    /// One entry per condition (1)–(5): pass flag and detail.
    pub conditions: Vec<(bool, String)>,
}

impl PhiReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|(ok, _)| *ok)
    }
}

/// Verifies conditions (1)–(5) on the run set.
pub fn check_phi_conditions(spec: &MachineSpec) -> PhiReport {
    let MachineSpec {
        tm,
        n,
        window,
        p,
        phi,
    } = spec;
    let phi_set: BTreeSet<&Configuration> = phi.iter().collect();
    let mut conditions = Vec::new();

    // (1) every member of Φ reaches P
    let mut bad = phi
        .iter()
        .filter(|q| !leq_n(tm, n, p, q, window).unwrap_or(false));
    conditions.push(match bad.next() {
        None => (true, "every Q in phi reaches P".to_string()),
        Some(q) => (false, format!("{} does not reach P", config_label(q, window))),
    });

    // (2) Φ is closed under successors that still reach P
    let mut detail = (true, "phi closed under reachable successors".to_string());
    for q in phi {
        if let Some(next) = restricted_successor(tm, n, window, q) {
            if leq_n(tm, n, p, &next, window).unwrap_or(false) && !phi_set.contains(&next) {
                detail = (
                    false,
                    format!("successor {} missing from phi", config_label(&next, window)),
                );
                break;
            }
        }
    }
    conditions.push(detail);

    // (3) initial configurations that reach P belong to Φ
    let mut detail = (true, "initial configurations covered".to_string());
    for head in n.iter() {
        let q = Configuration::initial(head);
        if leq_n(tm, n, p, &q, window).unwrap_or(false) && !phi_set.contains(&q) {
            detail = (
                false,
                format!("initial {} missing from phi", config_label(&q, window)),
            );
            break;
        }
    }
    conditions.push(detail);

    // (4) nothing in Φ can reach a halting configuration
    let mut detail = (true, "no member reaches a halting configuration".to_string());
    'outer: for q in phi {
        let mut current = q.clone();
        let mut seen = BTreeSet::new();
        loop {
            if current.is_halting() {
                detail = (
                    false,
                    format!(
                        "{} reaches halting {}",
                        config_label(q, window),
                        config_label(&current, window)
                    ),
                );
                break 'outer;
            }
            if !seen.insert(current.clone()) {
                break;
            }
            match restricted_successor(tm, n, window, &current) {
                Some(next) => current = next,
                None => break,
            }
        }
    }
    conditions.push(detail);

    // (5) interval is nontrivial and every head position is covered
    let covered = n.iter().all(|h| phi.iter().any(|q| q.head == h));
    let ok = n.len() > 1 && covered;
    conditions.push((
        ok,
        if n.len() <= 1 {
            "interval has a single cell".to_string()
        } else if covered {
            "every head position occurs in phi".to_string()
        } else {
            "some head position missing from phi".to_string()
        },
    ));

    PhiReport { conditions }
}

/// The machine algebra before quotienting, with its element bookkeeping.
#[derive(Debug, Clone)]
pub struct MachinePn {
    pub algebra: FiniteAlgebra,
    pub configs: Vec<Configuration>,
    /// Index of `a_n` by head position.
    pub sigma_of_head: std::collections::BTreeMap<i64, usize>,
    pub config_base: usize,
}

impl MachinePn {
    pub fn config_index(&self, cfg: &Configuration) -> Option<usize> {
        self.configs
            .iter()
            .position(|c| c == cfg)
            .map(|i| i + self.config_base)
    }
}

/// Builds the algebra on {0} ∪ Σ_N ∪ Ω_N per the machine-algebra recipe.
pub fn build_machine_pn(spec: &MachineSpec) -> Result<MachinePn, SpecParseError> {
    if !spec.window.contains_interval(&spec.n) {
        return Err(SpecParseError::WindowTooSmall);
    }
    let tm = &spec.tm;
    let n = spec.n;
    let window = spec.window;
    let configs = enumerate_omega(tm, &n, &window);
    let sigma: Vec<i64> = n.iter().collect();
    let config_base = 1 + sigma.len();
    let size = config_base + configs.len();

    let mut labels = vec!["0".to_string()];
    for &h in &sigma {
        labels.push(format!("a({h})"));
    }
    for cfg in &configs {
        labels.push(config_label(cfg, &window));
    }

    let sigma_of_head: std::collections::BTreeMap<i64, usize> = sigma
        .iter()
        .enumerate()
        .map(|(i, &h)| (h, 1 + i))
        .collect();
    let config_index: std::collections::BTreeMap<Configuration, usize> = configs
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), config_base + i))
        .collect();

    // Element interpretation helpers shared by the op closures.
    #[derive(Clone)]
    struct Ctx {
        head_of_sigma: Vec<i64>,
        configs: Vec<Configuration>,
        config_base: usize,
        config_index: std::collections::BTreeMap<Configuration, usize>,
    }
    impl Ctx {
        fn sigma_head(&self, x: usize) -> Option<i64> {
            if x >= 1 && x < 1 + self.head_of_sigma.len() {
                Some(self.head_of_sigma[x - 1])
            } else {
                None
            }
        }
        fn config(&self, x: usize) -> Option<&Configuration> {
            x.checked_sub(self.config_base).and_then(|i| self.configs.get(i))
        }
    }
    let ctx = Arc::new(Ctx {
        head_of_sigma: sigma.clone(),
        configs: configs.clone(),
        config_base,
        config_index,
    });

    let reference = crate::aprime::build_aprime(tm);
    let mut ops: Vec<Operation> = Vec::new();

    let zero_rule = |name: &str| -> Operation {
        Operation {
            sym: crate::algebra::OpSym {
                name: name.to_string(),
                arity: reference
                    .op_index(name)
                    .map(|i| reference.op(i).sym.arity)
                    .unwrap_or(0),
            },
            kind: OpKind::Rule {
                id: format!("pn-zero:{name}"),
                eval: Arc::new(|_| 0),
            },
            support: Some(Arc::new(Vec::new())),
        }
    };

    // Tape-op application on P_N: (a_m, a_{m+1}, Q) -> step(Q) under the
    // side conditions of the instruction table.
    let lr_eval = |ctx: &Ctx,
                   tm: &TuringMachine,
                   n: &Interval,
                   window: &Interval,
                   ins: &crate::tm::Instruction,
                   t: u8,
                   x: usize,
                   y: usize,
                   u: usize|
     -> usize {
        let (Some(hx), Some(hy), Some(q)) = (ctx.sigma_head(x), ctx.sigma_head(y), ctx.config(u))
        else {
            return 0;
        };
        if hy != hx + 1 {
            return 0;
        }
        let (m, m1) = (hx, hy);
        let ok = match ins.dir {
            Dir::Left => {
                q.head == m1
                    && q.state == ins.state
                    && q.bit(m1) == ins.read
                    && q.bit(m) == t
            }
            Dir::Right => {
                q.head == m
                    && q.state == ins.state
                    && q.bit(m) == ins.read
                    && q.bit(m1) == t
            }
        };
        if !ok {
            return 0;
        }
        match restricted_successor(tm, n, window, q) {
            Some(next) => *ctx.config_index.get(&next).expect("successor enumerated"),
            None => 0,
        }
    };

    for sym in reference.ops().iter().map(|o| o.sym.clone()) {
        let name = sym.name.clone();
        let op = match name.as_str() {
            "zero" => Operation {
                sym,
                kind: OpKind::Rule {
                    id: "pn:zero".into(),
                    eval: Arc::new(|_| 0),
                },
                support: Some(Arc::new(Vec::new())),
            },
            "meet" => Operation {
                sym,
                kind: OpKind::Rule {
                    id: "pn:meet".into(),
                    eval: Arc::new(|a: &[usize]| if a[0] == a[1] { a[0] } else { 0 }),
                },
                support: Some(Arc::new(
                    (1..size).map(|x| smallvec![x as u32, x as u32]).collect(),
                )),
            },
            "J" => Operation {
                sym,
                kind: OpKind::Rule {
                    id: "pn:J".into(),
                    eval: Arc::new(|a: &[usize]| if a[0] == a[1] { a[0] } else { 0 }),
                },
                support: Some(Arc::new(
                    (1..size)
                        .flat_map(|x| {
                            (0..size).map(move |z| smallvec![x as u32, x as u32, z as u32])
                        })
                        .collect(),
                )),
            },
            "Jp" | "K" => Operation {
                sym,
                kind: OpKind::Rule {
                    id: format!("pn:{name}"),
                    eval: Arc::new(|a: &[usize]| {
                        if a[0] == a[1] && a[1] == a[2] {
                            a[0]
                        } else {
                            0
                        }
                    }),
                },
                support: Some(Arc::new(
                    (1..size)
                        .map(|x| smallvec![x as u32, x as u32, x as u32])
                        .collect(),
                )),
            },
            "prod" | "S0" | "S1" | "S2" | "T" => zero_rule(&name),
            "I" => {
                let ctx = Arc::clone(&ctx);
                let supp: Vec<Args> = sigma_of_head
                    .values()
                    .map(|&i| smallvec![i as u32])
                    .collect();
                Operation {
                    sym,
                    kind: OpKind::Rule {
                        id: "pn:I".into(),
                        eval: Arc::new(move |a: &[usize]| match ctx.sigma_head(a[0]) {
                            Some(h) => *ctx
                                .config_index
                                .get(&Configuration::initial(h))
                                .expect("initial configuration enumerated"),
                            None => 0,
                        }),
                    },
                    support: Some(Arc::new(supp)),
                }
            }
            _ => {
                // Tape operations L(i,r,t) / R(i,r,t) and their U companions.
                let mut built = None;
                for ins in tm.instructions() {
                    for t in 0..2u8 {
                        let base = crate::aprime::lr_name(ins, t);
                        if name == base {
                            let ctx = Arc::clone(&ctx);
                            let tm = tm.clone();
                            let ins = *ins;
                            let mut supp: Vec<Args> = Vec::new();
                            for ci in 0..configs.len() {
                                for (&h, &ai) in &sigma_of_head {
                                    if let Some(&aj) = sigma_of_head.get(&(h + 1)) {
                                        let u = (config_base + ci) as u32;
                                        supp.push(smallvec![ai as u32, aj as u32, u]);
                                    }
                                }
                            }
                            built = Some(Operation {
                                sym: sym.clone(),
                                kind: OpKind::Rule {
                                    id: format!("pn:{name}"),
                                    eval: Arc::new(move |a: &[usize]| {
                                        lr_eval(&ctx, &tm, &n, &window, &ins, t, a[0], a[1], a[2])
                                    }),
                                },
                                support: Some(Arc::new(supp)),
                            });
                        } else if name == format!("U1:{base}") || name == format!("U0:{base}") {
                            let one = name.starts_with("U1");
                            let ctx = Arc::clone(&ctx);
                            let tm = tm.clone();
                            let ins = *ins;
                            let mut supp: Vec<Args> = Vec::new();
                            for ci in 0..configs.len() {
                                for (&h, &ai) in &sigma_of_head {
                                    if let Some(&aj) = sigma_of_head.get(&(h + 1)) {
                                        let u = (config_base + ci) as u32;
                                        if one {
                                            supp.push(smallvec![
                                                ai as u32, aj as u32, aj as u32, u
                                            ]);
                                        } else {
                                            supp.push(smallvec![
                                                ai as u32, ai as u32, aj as u32, u
                                            ]);
                                        }
                                    }
                                }
                            }
                            built = Some(Operation {
                                sym: sym.clone(),
                                kind: OpKind::Rule {
                                    id: format!("pn:{name}"),
                                    eval: Arc::new(move |a: &[usize]| {
                                        let (x, y, z, u) = (a[0], a[1], a[2], a[3]);
                                        let (hx, hz) =
                                            match (ctx.sigma_head(x), ctx.sigma_head(z)) {
                                                (Some(hx), Some(hz)) => (hx, hz),
                                                _ => return 0,
                                            };
                                        if hz != hx + 1 {
                                            return 0;
                                        }
                                        if one {
                                            // U1(a_m, a_{m+1}, a_{m+1}, q)
                                            if y != z {
                                                return 0;
                                            }
                                            lr_eval(&ctx, &tm, &n, &window, &ins, t, x, y, u)
                                        } else {
                                            // U0(a_m, a_m, a_{m+1}, q)
                                            if x != y {
                                                return 0;
                                            }
                                            lr_eval(&ctx, &tm, &n, &window, &ins, t, x, z, u)
                                        }
                                    }),
                                },
                                support: Some(Arc::new(supp)),
                            });
                        }
                    }
                }
                built.unwrap_or_else(|| zero_rule(&name))
            }
        };
        ops.push(op);
    }

    Ok(MachinePn {
        algebra: FiniteAlgebra::new(labels, ops),
        configs,
        sigma_of_head,
        config_base,
    })
}

#[derive(Debug, Error)]
pub enum ThetaPhiError {
    #[error("phi conditions failed: {0}")]
    Conditions(String),
    #[error(transparent)]
    Spec(#[from] SpecParseError),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
}

/// Result of the Θ(Φ) quotient: the base algebra, the quotient, and its
/// monolith.
#[derive(Debug)]
pub struct ThetaPhi {
    pub pn: MachinePn,
    pub quotient: Quotient,
    pub monolith: Option<Partition>,
    pub report: PhiReport,
}

/// Builds P_N, verifies the Φ conditions, quotients by the congruence whose
/// only nontrivial class is (Ω_N \ Φ) ∪ {0}, and computes the monolith.
pub fn theta_phi_quotient(spec: &MachineSpec) -> Result<ThetaPhi, ThetaPhiError> {
    let report = check_phi_conditions(spec);
    if !report.all_pass() {
        let failing: Vec<String> = report
            .conditions
            .iter()
            .enumerate()
            .filter(|(_, (ok, _))| !ok)
            .map(|(i, (_, d))| format!("({}) {}", i + 1, d))
            .collect();
        return Err(ThetaPhiError::Conditions(failing.join("; ")));
    }
    let pn = build_machine_pn(spec)?;
    let phi_set: BTreeSet<&Configuration> = spec.phi.iter().collect();
    let mut gamma = vec![0usize];
    for (i, cfg) in pn.configs.iter().enumerate() {
        if !phi_set.contains(cfg) {
            gamma.push(pn.config_base + i);
        }
    }
    let theta = Partition::with_block(pn.algebra.size(), &gamma);
    let q = quotient(&pn.algebra, &theta)?;
    let mono = monolith(&q.algebra, crate::DEFAULT_LATTICE_GUARD.max(q.algebra.size()))?;
    Ok(ThetaPhi {
        pn,
        quotient: q,
        monolith: mono,
        report,
    })
}

#[cfg(test)]
mod tests;
