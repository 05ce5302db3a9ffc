//! Turing machines, configurations, and interval-restricted reachability.
//!
//! Machines are deterministic single-tape machines over the alphabet {0,1}
//! with states indexed `0..state_count`. State 1 is the start state and
//! state 0 is the halting state; no instruction may read from state 0.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Head movement of an instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Left,
    Right,
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dir::Left => write!(f, "L"),
            Dir::Right => write!(f, "R"),
        }
    }
}

/// One 5-tuple `(state, read, write, dir, next)`: in state `state` reading
/// `read`, write `write`, move `dir`, and enter state `next`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub state: usize,
    pub read: u8,
    pub write: u8,
    pub dir: Dir,
    pub next: usize,
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.state, self.read, self.write, self.dir, self.next
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TmError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: instruction from halting state")]
    FromHaltingState { line: usize },
    #[error("line {line}: duplicate instruction for (state {state}, read {read})")]
    Duplicate { line: usize, state: usize, read: u8 },
    #[error("line {line}: state index {state} out of range (state count {count})")]
    StateOutOfRange {
        line: usize,
        state: usize,
        count: usize,
    },
    #[error("missing `states <n>` header")]
    MissingHeader,
}

/// A deterministic Turing machine. State 1 is initial, state 0 is halting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    state_count: usize,
    instructions: Vec<Instruction>,
}

impl TuringMachine {
    /// Builds a machine, validating the instruction list.
    pub fn new(state_count: usize, instructions: Vec<Instruction>) -> Result<Self, TmError> {
        if state_count < 1 {
            return Err(TmError::Parse {
                line: 0,
                msg: "state count must be at least 1".into(),
            });
        }
        let mut seen: Vec<(usize, u8)> = Vec::new();
        for (k, ins) in instructions.iter().enumerate() {
            let line = k + 1;
            if ins.state == 0 {
                return Err(TmError::FromHaltingState { line });
            }
            for &s in &[ins.state, ins.next] {
                if s >= state_count {
                    return Err(TmError::StateOutOfRange {
                        line,
                        state: s,
                        count: state_count,
                    });
                }
            }
            if seen.contains(&(ins.state, ins.read)) {
                return Err(TmError::Duplicate {
                    line,
                    state: ins.state,
                    read: ins.read,
                });
            }
            seen.push((ins.state, ins.read));
        }
        Ok(TuringMachine {
            state_count,
            instructions,
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// The unique instruction for `(state, read)`, if any.
    pub fn instruction(&self, state: usize, read: u8) -> Option<&Instruction> {
        self.instructions
            .iter()
            .find(|i| i.state == state && i.read == read)
    }

    /// Compact one-line encoding used in rule identifiers.
    pub fn code(&self) -> String {
        let body: Vec<String> = self
            .instructions
            .iter()
            .map(|i| format!("{},{},{},{},{}", i.state, i.read, i.write, i.dir, i.next))
            .collect();
        format!("s{};{}", self.state_count, body.join("|"))
    }

    /// Parses the `code()` form back into a machine.
    pub fn from_code(code: &str) -> Result<Self, TmError> {
        let rest = code.strip_prefix('s').ok_or(TmError::MissingHeader)?;
        let (count, body) = rest.split_once(';').ok_or(TmError::MissingHeader)?;
        let state_count: usize = count.parse().map_err(|_| TmError::MissingHeader)?;
        let mut instructions = Vec::new();
        if !body.is_empty() {
            for part in body.split('|') {
                let fields: Vec<&str> = part.split(',').collect();
                if fields.len() != 5 {
                    return Err(TmError::Parse {
                        line: 0,
                        msg: format!("bad instruction code `{part}`"),
                    });
                }
                instructions.push(Instruction {
                    state: fields[0].parse().map_err(|_| TmError::MissingHeader)?,
                    read: fields[1].parse().map_err(|_| TmError::MissingHeader)?,
                    write: fields[2].parse().map_err(|_| TmError::MissingHeader)?,
                    dir: if fields[3] == "L" { Dir::Left } else { Dir::Right },
                    next: fields[4].parse().map_err(|_| TmError::MissingHeader)?,
                })
            }
        }
        TuringMachine::new(state_count, instructions)
    }
}

/// Parses the plain-text machine format: a `states <n>` line followed by one
/// instruction `<s> <r> <w> <L|R> <t>` per line. `#` starts a comment.
pub fn parse_tm(text: &str) -> Result<TuringMachine, TmError> {
    let mut state_count: Option<usize> = None;
    let mut instructions = Vec::new();
    let mut errors = Vec::new();
    let mut inst_lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens[0] == "states" {
            if tokens.len() != 2 {
                errors.push(TmError::Parse {
                    line: line_no,
                    msg: "expected `states <count>`".into(),
                });
                continue;
            }
            match tokens[1].parse::<usize>() {
                Ok(n) => state_count = Some(n),
                Err(_) => errors.push(TmError::Parse {
                    line: line_no,
                    msg: format!("bad state count `{}`", tokens[1]),
                }),
            }
            continue;
        }
        if tokens.len() != 5 {
            errors.push(TmError::Parse {
                line: line_no,
                msg: format!("expected 5 fields, got {}", tokens.len()),
            });
            continue;
        }
        let parse_bit = |tok: &str, what: &str| -> Result<u8, TmError> {
            match tok {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(TmError::Parse {
                    line: line_no,
                    msg: format!("bad {what} `{tok}`"),
                }),
            }
        };
        let ins = (|| -> Result<Instruction, TmError> {
            let state = tokens[0].parse::<usize>().map_err(|_| TmError::Parse {
                line: line_no,
                msg: format!("bad state `{}`", tokens[0]),
            })?;
            let read = parse_bit(tokens[1], "read bit")?;
            let write = parse_bit(tokens[2], "write bit")?;
            let dir = match tokens[3] {
                "L" => Dir::Left,
                "R" => Dir::Right,
                other => {
                    return Err(TmError::Parse {
                        line: line_no,
                        msg: format!("bad direction `{other}`"),
                    })
                }
            };
            let next = tokens[4].parse::<usize>().map_err(|_| TmError::Parse {
                line: line_no,
                msg: format!("bad state `{}`", tokens[4]),
            })?;
            Ok(Instruction {
                state,
                read,
                write,
                dir,
                next,
            })
        })();
        match ins {
            Ok(i) => {
                instructions.push(i);
                inst_lines.push(line_no);
            }
            Err(e) => errors.push(e),
        }
    }
    if let Some(err) = errors.into_iter().next() {
        return Err(err);
    }
    let count = state_count.ok_or(TmError::MissingHeader)?;
    // Re-map validation errors to source line numbers.
    TuringMachine::new(count, instructions.clone()).map_err(|e| match e {
        TmError::FromHaltingState { line } => TmError::FromHaltingState {
            line: inst_lines[line - 1],
        },
        TmError::Duplicate { line, state, read } => TmError::Duplicate {
            line: inst_lines[line - 1],
            state,
            read,
        },
        TmError::StateOutOfRange { line, state, count } => TmError::StateOutOfRange {
            line: inst_lines[line - 1],
            state,
            count,
        },
        other => other,
    })
}

/// A machine configuration: sparse tape (finite support of 1s), head
/// position, and state. Equality ignores explicitly stored zeros because
/// zeros are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    /// Positions holding a 1.
    tape: BTreeMap<i64, ()>,
    pub head: i64,
    pub state: usize,
}

impl Configuration {
    pub fn new(ones: impl IntoIterator<Item = i64>, head: i64, state: usize) -> Self {
        Configuration {
            tape: ones.into_iter().map(|p| (p, ())).collect(),
            head,
            state,
        }
    }

    /// Blank-tape configuration in the given state.
    pub fn blank(head: i64, state: usize) -> Self {
        Configuration::new([], head, state)
    }

    /// Initial configuration: blank tape, start state 1.
    pub fn initial(head: i64) -> Self {
        Configuration::blank(head, 1)
    }

    pub fn bit(&self, pos: i64) -> u8 {
        u8::from(self.tape.contains_key(&pos))
    }

    pub fn set_bit(&mut self, pos: i64, bit: u8) {
        if bit == 0 {
            self.tape.remove(&pos);
        } else {
            self.tape.insert(pos, ());
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = i64> + '_ {
        self.tape.keys().copied()
    }

    pub fn is_halting(&self) -> bool {
        self.state == 0
    }

    /// True when `state` is the start state and the tape is blank.
    pub fn is_initial(&self) -> bool {
        self.state == 1 && self.tape.is_empty()
    }

    /// True when every 1 on the tape lies inside `window`.
    pub fn supported_in(&self, window: &Interval) -> bool {
        self.ones().all(|p| window.contains(p))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ones: Vec<String> = self.ones().map(|p| p.to_string()).collect();
        write!(f, "{}@{}:{{{}}}", self.state, self.head, ones.join(","))
    }
}

/// A nonempty integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "interval must be nonempty");
        Interval { lo, hi }
    }

    pub fn contains(&self, p: i64) -> bool {
        self.lo <= p && p <= self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Result of one machine step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Next(Configuration),
    /// The configuration is in the halting state.
    Halted,
    /// No instruction matches (partial machine).
    Stuck,
}

/// Applies the unique matching instruction.
pub fn step(tm: &TuringMachine, q: &Configuration) -> StepResult {
    if q.is_halting() {
        return StepResult::Halted;
    }
    match tm.instruction(q.state, q.bit(q.head)) {
        None => StepResult::Stuck,
        Some(ins) => {
            let mut next = q.clone();
            next.set_bit(q.head, ins.write);
            next.head += match ins.dir {
                Dir::Left => -1,
                Dir::Right => 1,
            };
            next.state = ins.next;
            StepResult::Next(next)
        }
    }
}

/// Runs for at most `max_steps` steps. Returns the visited configurations
/// (at most `max_steps + 1`) and whether the halting state was reached.
pub fn run(
    tm: &TuringMachine,
    q0: &Configuration,
    max_steps: usize,
) -> (Vec<Configuration>, bool) {
    let mut trace = vec![q0.clone()];
    let mut current = q0.clone();
    for _ in 0..max_steps {
        match step(tm, &current) {
            StepResult::Halted | StepResult::Stuck => break,
            StepResult::Next(q) => {
                trace.push(q.clone());
                current = q;
            }
        }
    }
    let halted = trace.last().map(|q| q.is_halting()).unwrap_or(false);
    (trace, halted)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReachError {
    #[error("window {window} does not contain head interval {n}")]
    WindowTooSmall { window: Interval, n: Interval },
}

/// Machine successor restricted to `Ω_N`: defined when the configuration is
/// non-halting, an instruction matches, and the successor's head stays in
/// `n` with tape support inside `window`.
pub fn restricted_successor(
    tm: &TuringMachine,
    n: &Interval,
    window: &Interval,
    q: &Configuration,
) -> Option<Configuration> {
    match step(tm, q) {
        StepResult::Next(next) if n.contains(next.head) && next.supported_in(window) => Some(next),
        _ => None,
    }
}

/// `p ≤_N q`: there is a finite sequence `q = q_0, …, q_m = p` of
/// configurations in `Ω_N` with each `q_{i+1}` the machine successor of
/// `q_i`. Follows the deterministic successor until `p` is found, the
/// walk leaves `Ω_N`, or a configuration repeats.
pub fn leq_n(
    tm: &TuringMachine,
    n: &Interval,
    p: &Configuration,
    q: &Configuration,
    window: &Interval,
) -> Result<bool, ReachError> {
    if !window.contains_interval(n) {
        return Err(ReachError::WindowTooSmall {
            window: *window,
            n: *n,
        });
    }
    if !n.contains(q.head) || !q.supported_in(window) {
        return Ok(false);
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut current = q.clone();
    loop {
        if current == *p {
            return Ok(true);
        }
        if !seen.insert(current.clone()) {
            return Ok(false);
        }
        match restricted_successor(tm, n, window, &current) {
            Some(next) => current = next,
            None => return Ok(false),
        }
    }
}

/// All configurations with head in `n` and tape support in `window`.
pub fn enumerate_omega(tm: &TuringMachine, n: &Interval, window: &Interval) -> Vec<Configuration> {
    let cells: Vec<i64> = window.iter().collect();
    let mut out = Vec::new();
    for state in 0..tm.state_count() {
        for head in n.iter() {
            for mask in 0u64..(1u64 << cells.len()) {
                let ones = cells
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p);
                out.push(Configuration::new(ones, head, state));
            }
        }
    }
    out
}
