//! Verifier machines: two-way finite automata with quantum and classical
//! states, plus the purely probabilistic restriction (quantum dimension 0,
//! coin-tossing transitions).
//!
//! A machine holds classical states partitioned into reading, communication
//! and halting states, a tape bracketed by end-markers, a constant-size
//! quantum register, per-(state, symbol) actions (unitary, projective
//! measurement, or coin toss) and communication transitions. Specs and tapes
//! are immutable; stepping a configuration produces fresh values, so
//! concurrent simulations over one spec are safe by construction.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{
    is_unitary, mat_apply, measure_branches, CMat, CVec, ProjectiveMeasurement, DEFAULT_TOL,
    VALIDATION_TOL,
};
use crate::prover::ProverStrategy;

pub type StateId = u16;
/// Head move: −1, 0 or +1.
pub type Move = i8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Reading,
    Communication,
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateInfo {
    pub name: String,
    pub kind: StateKind,
}

/// A tape cell: one of the two end-markers or an input symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TapeSymbol {
    LeftMarker,
    RightMarker,
    Input(char),
}

impl std::fmt::Display for TapeSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TapeSymbol::LeftMarker => write!(f, "^"),
            TapeSymbol::RightMarker => write!(f, "$"),
            TapeSymbol::Input(c) => write!(f, "{c}"),
        }
    }
}

/// The action a reading state performs on a tape symbol, together with the
/// classical transition(s) it induces.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Unitary {
        op: CMat,
        next: StateId,
        mv: Move,
    },
    Measure {
        m: ProjectiveMeasurement,
        /// One (next state, move) arm per measurement outcome, same order.
        arms: Vec<(StateId, Move)>,
    },
    /// Coin-tossing transition for quantum-free machines; probabilities must
    /// lie in {0, 1/2, 1} and sum to 1.
    Coin {
        arms: Vec<(f64, StateId, Move)>,
    },
}

/// Communication behavior of a communication state: the symbol it emits and
/// the successor per prover response. The head never moves here.
#[derive(Debug, Clone, PartialEq)]
pub struct CommEntry {
    pub emit: String,
    pub responses: BTreeMap<String, StateId>,
}

/// A full machine description.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifierSpec {
    pub name: String,
    pub states: Vec<StateInfo>,
    pub initial: StateId,
    pub input_alphabet: Vec<char>,
    pub comm_alphabet: Vec<String>,
    /// 0 means a purely probabilistic machine with no quantum register.
    pub quantum_dim: usize,
    pub initial_quantum: CVec,
    /// Dense action table indexed by state × tape symbol; `None` entries are
    /// validation violations for reading states.
    actions: Vec<Option<Action>>,
    comm: Vec<Option<CommEntry>>,
}

impl VerifierSpec {
    fn symbol_count(&self) -> usize {
        self.input_alphabet.len() + 2
    }

    pub fn symbol_index(&self, sym: TapeSymbol) -> Option<usize> {
        match sym {
            TapeSymbol::LeftMarker => Some(0),
            TapeSymbol::RightMarker => Some(1),
            TapeSymbol::Input(c) => self
                .input_alphabet
                .iter()
                .position(|&a| a == c)
                .map(|i| i + 2),
        }
    }

    pub fn tape_symbols(&self) -> Vec<TapeSymbol> {
        let mut syms = vec![TapeSymbol::LeftMarker, TapeSymbol::RightMarker];
        syms.extend(self.input_alphabet.iter().map(|&c| TapeSymbol::Input(c)));
        syms
    }

    pub fn action(&self, state: StateId, sym: TapeSymbol) -> Option<&Action> {
        let idx = self.symbol_index(sym)?;
        self.actions[state as usize * self.symbol_count() + idx].as_ref()
    }

    pub fn comm_entry(&self, state: StateId) -> Option<&CommEntry> {
        self.comm[state as usize].as_ref()
    }

    pub fn state_kind(&self, state: StateId) -> StateKind {
        self.states[state as usize].kind
    }

    pub fn state_name(&self, state: StateId) -> &str {
        &self.states[state as usize].name
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s.name == name)
            .map(|i| i as StateId)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn is_halting(&self, state: StateId) -> bool {
        matches!(
            self.state_kind(state),
            StateKind::Accept | StateKind::Reject
        )
    }
}

/// The input bracketed by end-markers; cell 0 is the left marker and cell
/// n+1 the right one.
#[derive(Debug, Clone, PartialEq)]
pub struct Tape {
    cells: Vec<TapeSymbol>,
}

impl Tape {
    pub fn new(spec: &VerifierSpec, input: &str) -> Result<Tape> {
        let mut cells = Vec::with_capacity(input.chars().count() + 2);
        cells.push(TapeSymbol::LeftMarker);
        for c in input.chars() {
            if !spec.input_alphabet.contains(&c) {
                return Err(Error::InvalidArgument(format!(
                    "input symbol {c:?} is not in the machine alphabet {:?}",
                    spec.input_alphabet
                )));
            }
            cells.push(TapeSymbol::Input(c));
        }
        cells.push(TapeSymbol::RightMarker);
        Ok(Tape { cells })
    }

    /// Number of input cells (tape length minus the two markers).
    pub fn input_len(&self) -> usize {
        self.cells.len() - 2
    }

    pub fn symbol(&self, head: usize) -> TapeSymbol {
        self.cells[head]
    }

    pub fn last_cell(&self) -> usize {
        self.cells.len() - 1
    }
}

/// Communication transcript of the current iteration: (emitted, response)
/// symbol pairs in order.
pub type CommHistory = Vec<(String, String)>;

/// A machine configuration against a fixed tape.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub classical: StateId,
    pub head: usize,
    pub quantum: CVec,
    pub history: CommHistory,
}

/// Starting configuration: initial classical state, head on the left
/// end-marker, initial quantum state, empty history.
pub fn initial_config(spec: &VerifierSpec, input: &str) -> Result<Configuration> {
    Tape::new(spec, input)?;
    Ok(Configuration {
        classical: spec.initial,
        head: 0,
        quantum: spec.initial_quantum.clone(),
        history: Vec::new(),
    })
}

/// One machine step from a non-halting configuration: every successor with
/// its transition probability. Probabilities sum to 1 (up to pruning of
/// numerically-zero measurement branches).
pub fn step(
    spec: &VerifierSpec,
    tape: &Tape,
    cfg: &Configuration,
    prover: &ProverStrategy,
    input: &str,
) -> Result<Vec<(Configuration, f64)>> {
    if spec.is_halting(cfg.classical) {
        return Err(Error::InvalidArgument(format!(
            "step called on halting configuration in state {}",
            spec.state_name(cfg.classical)
        )));
    }
    match spec.state_kind(cfg.classical) {
        StateKind::Reading => {
            let sym = tape.symbol(cfg.head);
            let action = spec.action(cfg.classical, sym).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "no action for state {} on symbol {sym}",
                    spec.state_name(cfg.classical)
                ))
            })?;
            step_reading(tape, cfg, action)
        }
        StateKind::Communication => {
            let entry = spec.comm_entry(cfg.classical).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "communication state {} has no communication entry",
                    spec.state_name(cfg.classical)
                ))
            })?;
            let response = prover.respond(input, &cfg.history, &entry.emit);
            let next = *entry.responses.get(&response).ok_or_else(|| {
                Error::ProtocolViolation {
                    state: spec.state_name(cfg.classical).to_string(),
                    response: response.clone(),
                }
            })?;
            let mut history = cfg.history.clone();
            history.push((entry.emit.clone(), response));
            Ok(vec![(
                Configuration {
                    classical: next,
                    head: cfg.head,
                    quantum: cfg.quantum.clone(),
                    history,
                },
                1.0,
            )])
        }
        StateKind::Accept | StateKind::Reject => unreachable!(),
    }
}

fn step_reading(
    tape: &Tape,
    cfg: &Configuration,
    action: &Action,
) -> Result<Vec<(Configuration, f64)>> {
    let moved = |mv: Move| -> usize {
        let h = cfg.head as isize + mv as isize;
        debug_assert!(h >= 0 && h <= tape.last_cell() as isize);
        h.clamp(0, tape.last_cell() as isize) as usize
    };
    match action {
        Action::Unitary { op, next, mv } => {
            let quantum = if cfg.quantum.dim() == 0 {
                cfg.quantum.clone()
            } else {
                mat_apply(op, &cfg.quantum)?
            };
            Ok(vec![(
                Configuration {
                    classical: *next,
                    head: moved(*mv),
                    quantum,
                    history: cfg.history.clone(),
                },
                1.0,
            )])
        }
        Action::Measure { m, arms } => {
            let branches = measure_branches(m, &cfg.quantum)?;
            Ok(branches
                .into_iter()
                .map(|b| {
                    let (next, mv) = arms[b.outcome];
                    (
                        Configuration {
                            classical: next,
                            head: moved(mv),
                            quantum: b.post_state,
                            history: cfg.history.clone(),
                        },
                        b.probability,
                    )
                })
                .collect())
        }
        Action::Coin { arms } => Ok(arms
            .iter()
            .filter(|(p, _, _)| *p > 0.0)
            .map(|&(p, next, mv)| {
                (
                    Configuration {
                        classical: next,
                        head: moved(mv),
                        quantum: cfg.quantum.clone(),
                        history: cfg.history.clone(),
                    },
                    p,
                )
            })
            .collect()),
    }
}

/// A single validation violation with the offending (state, symbol) context.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub state: Option<String>,
    pub symbol: Option<String>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (&self.state, &self.symbol) {
            (Some(s), Some(sym)) => write!(f, "({s}, {sym}): {}", self.message),
            (Some(s), None) => write!(f, "({s}): {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

fn violation(state: Option<&str>, symbol: Option<TapeSymbol>, message: String) -> Violation {
    Violation {
        state: state.map(str::to_string),
        symbol: symbol.map(|s| s.to_string()),
        message,
    }
}

/// Check every structural invariant of a machine description. An empty
/// report means the machine is valid; violations are data, not failures.
pub fn validate_spec(spec: &VerifierSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let quantum = spec.quantum_dim > 0;

    if spec.states.is_empty() {
        out.push(violation(None, None, "machine has no states".into()));
        return out;
    }
    if spec.state_kind(spec.initial) != StateKind::Reading {
        out.push(violation(
            Some(spec.state_name(spec.initial)),
            None,
            "initial state must be a reading state".into(),
        ));
    }
    {
        let mut names: Vec<&str> = spec.states.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != spec.states.len() {
            out.push(violation(None, None, "duplicate state names".into()));
        }
    }
    if quantum {
        if spec.initial_quantum.dim() != spec.quantum_dim {
            out.push(violation(
                None,
                None,
                format!(
                    "initial quantum state has dimension {}, machine register has {}",
                    spec.initial_quantum.dim(),
                    spec.quantum_dim
                ),
            ));
        } else if !spec.initial_quantum.is_normalized(DEFAULT_TOL) {
            out.push(violation(
                None,
                None,
                "initial quantum state is not normalized".into(),
            ));
        }
    } else if spec.initial_quantum.dim() != 0 {
        out.push(violation(
            None,
            None,
            "quantum-free machine carries a nonempty initial quantum state".into(),
        ));
    }

    let syms = spec.tape_symbols();
    for (sid, info) in spec.states.iter().enumerate() {
        let sid = sid as StateId;
        match info.kind {
            StateKind::Reading => {
                if spec.comm_entry(sid).is_some() {
                    out.push(violation(
                        Some(&info.name),
                        None,
                        "reading state has a communication entry".into(),
                    ));
                }
                for &sym in &syms {
                    match spec.action(sid, sym) {
                        None => out.push(violation(
                            Some(&info.name),
                            Some(sym),
                            "missing action".into(),
                        )),
                        Some(action) => {
                            validate_action(spec, &info.name, sym, action, quantum, &mut out)
                        }
                    }
                }
            }
            StateKind::Communication => {
                match spec.comm_entry(sid) {
                    None => out.push(violation(
                        Some(&info.name),
                        None,
                        "communication state has no emitted symbol".into(),
                    )),
                    Some(entry) => {
                        if !spec.comm_alphabet.contains(&entry.emit) {
                            out.push(violation(
                                Some(&info.name),
                                None,
                                format!(
                                    "emitted symbol {:?} is outside the communication alphabet",
                                    entry.emit
                                ),
                            ));
                        }
                        for gamma in &spec.comm_alphabet {
                            if !entry.responses.contains_key(gamma) {
                                out.push(violation(
                                    Some(&info.name),
                                    None,
                                    format!("no successor for response {gamma:?}"),
                                ));
                            }
                        }
                        for (gamma, next) in &entry.responses {
                            if !spec.comm_alphabet.contains(gamma) {
                                out.push(violation(
                                    Some(&info.name),
                                    None,
                                    format!("response {gamma:?} is outside the communication alphabet"),
                                ));
                            }
                            if *next as usize >= spec.states.len() {
                                out.push(violation(
                                    Some(&info.name),
                                    None,
                                    format!("response {gamma:?} targets an unknown state"),
                                ));
                            }
                        }
                    }
                }
                for &sym in &syms {
                    if spec.action(sid, sym).is_some() {
                        out.push(violation(
                            Some(&info.name),
                            Some(sym),
                            "communication state has a reading action".into(),
                        ));
                    }
                }
            }
            StateKind::Accept | StateKind::Reject => {
                for &sym in &syms {
                    if spec.action(sid, sym).is_some() {
                        out.push(violation(
                            Some(&info.name),
                            Some(sym),
                            "halting state has an action".into(),
                        ));
                    }
                }
            }
        }
    }
    out
}

fn validate_action(
    spec: &VerifierSpec,
    state: &str,
    sym: TapeSymbol,
    action: &Action,
    quantum: bool,
    out: &mut Vec<Violation>,
) {
    let check_move = |mv: Move, out: &mut Vec<Violation>| {
        if !(-1..=1).contains(&mv) {
            out.push(violation(
                Some(state),
                Some(sym),
                format!("head move {mv} outside {{-1,0,1}}"),
            ));
        }
        if sym == TapeSymbol::LeftMarker && mv < 0 {
            out.push(violation(
                Some(state),
                Some(sym),
                "moves left of the left end-marker".into(),
            ));
        }
        if sym == TapeSymbol::RightMarker && mv > 0 {
            out.push(violation(
                Some(state),
                Some(sym),
                "moves right of the right end-marker".into(),
            ));
        }
    };
    let check_target = |next: StateId, out: &mut Vec<Violation>| {
        if next as usize >= spec.states.len() {
            out.push(violation(
                Some(state),
                Some(sym),
                "transition targets an unknown state".into(),
            ));
        }
    };
    match action {
        Action::Unitary { op, next, mv } => {
            if !quantum {
                out.push(violation(
                    Some(state),
                    Some(sym),
                    "unitary action on a quantum-free machine".into(),
                ));
            } else {
                if op.dim() != spec.quantum_dim {
                    out.push(violation(
                        Some(state),
                        Some(sym),
                        format!(
                            "operator dimension {} does not match register dimension {}",
                            op.dim(),
                            spec.quantum_dim
                        ),
                    ));
                }
                if !is_unitary(op, VALIDATION_TOL) {
                    out.push(violation(
                        Some(state),
                        Some(sym),
                        "operator is not unitary".into(),
                    ));
                }
            }
            check_move(*mv, out);
            check_target(*next, out);
        }
        Action::Measure { m, arms } => {
            if !quantum {
                out.push(violation(
                    Some(state),
                    Some(sym),
                    "measurement action on a quantum-free machine".into(),
                ));
            } else {
                if m.dim() != spec.quantum_dim {
                    out.push(violation(
                        Some(state),
                        Some(sym),
                        "measurement dimension does not match register".into(),
                    ));
                }
                for msg in m.validate(VALIDATION_TOL) {
                    out.push(violation(Some(state), Some(sym), msg));
                }
            }
            if arms.len() != m.outcomes().len() {
                out.push(violation(
                    Some(state),
                    Some(sym),
                    format!(
                        "{} outcome(s) but {} transition arm(s)",
                        m.outcomes().len(),
                        arms.len()
                    ),
                ));
            }
            for &(next, mv) in arms {
                check_move(mv, out);
                check_target(next, out);
            }
        }
        Action::Coin { arms } => {
            if quantum {
                out.push(violation(
                    Some(state),
                    Some(sym),
                    "coin-tossing action on a quantum machine".into(),
                ));
            }
            let mut total = 0.0;
            for &(p, next, mv) in arms {
                if p != 0.0 && p != 0.5 && p != 1.0 {
                    out.push(violation(
                        Some(state),
                        Some(sym),
                        format!("coin probability {p} outside {{0, 1/2, 1}}"),
                    ));
                }
                total += p;
                check_move(mv, out);
                check_target(next, out);
            }
            if (total - 1.0).abs() > 1e-12 {
                out.push(violation(
                    Some(state),
                    Some(sym),
                    format!("coin probabilities sum to {total}, not 1"),
                ));
            }
        }
    }
}

/// Incremental construction of a [`VerifierSpec`]. Unset (reading state,
/// symbol) pairs are filled at `finish` time with an identity action into the
/// designated dead state, keeping the transition table total as the machine
/// definitions require.
pub struct SpecBuilder {
    name: String,
    input_alphabet: Vec<char>,
    comm_alphabet: Vec<String>,
    quantum_dim: usize,
    states: Vec<StateInfo>,
    actions: BTreeMap<(StateId, TapeSymbol), Action>,
    comm: BTreeMap<StateId, CommEntry>,
}

impl SpecBuilder {
    pub fn new(name: &str, input_alphabet: &[char], quantum_dim: usize) -> Self {
        SpecBuilder {
            name: name.to_string(),
            input_alphabet: input_alphabet.to_vec(),
            comm_alphabet: Vec::new(),
            quantum_dim,
            states: Vec::new(),
            actions: BTreeMap::new(),
            comm: BTreeMap::new(),
        }
    }

    pub fn comm_alphabet(&mut self, symbols: &[&str]) -> &mut Self {
        self.comm_alphabet = symbols.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn state(&mut self, name: &str, kind: StateKind) -> StateId {
        let id = self.states.len() as StateId;
        self.states.push(StateInfo {
            name: name.to_string(),
            kind,
        });
        id
    }

    pub fn unitary(
        &mut self,
        state: StateId,
        syms: &[TapeSymbol],
        op: CMat,
        next: StateId,
        mv: Move,
    ) -> &mut Self {
        for &sym in syms {
            self.actions.insert(
                (state, sym),
                Action::Unitary {
                    op: op.clone(),
                    next,
                    mv,
                },
            );
        }
        self
    }

    pub fn measure(
        &mut self,
        state: StateId,
        syms: &[TapeSymbol],
        m: ProjectiveMeasurement,
        arms: Vec<(StateId, Move)>,
    ) -> &mut Self {
        for &sym in syms {
            self.actions.insert(
                (state, sym),
                Action::Measure {
                    m: m.clone(),
                    arms: arms.clone(),
                },
            );
        }
        self
    }

    pub fn coin(
        &mut self,
        state: StateId,
        syms: &[TapeSymbol],
        arms: Vec<(f64, StateId, Move)>,
    ) -> &mut Self {
        for &sym in syms {
            self.actions
                .insert((state, sym), Action::Coin { arms: arms.clone() });
        }
        self
    }

    /// Communication entry; any alphabet symbol not listed in `responses`
    /// falls back to `fallback` (the machines route nonsense replies to the
    /// reject state).
    pub fn comm(
        &mut self,
        state: StateId,
        emit: &str,
        responses: &[(&str, StateId)],
        fallback: StateId,
    ) -> &mut Self {
        let mut map = BTreeMap::new();
        for gamma in &self.comm_alphabet {
            map.insert(gamma.clone(), fallback);
        }
        for (gamma, next) in responses {
            map.insert(gamma.to_string(), *next);
        }
        self.comm.insert(
            state,
            CommEntry {
                emit: emit.to_string(),
                responses: map,
            },
        );
        self
    }

    pub fn input_symbols(&self) -> Vec<TapeSymbol> {
        self.input_alphabet
            .iter()
            .map(|&c| TapeSymbol::Input(c))
            .collect()
    }

    pub fn finish(
        self,
        initial: StateId,
        initial_quantum: CVec,
        dead: StateId,
    ) -> VerifierSpec {
        let symbol_count = self.input_alphabet.len() + 2;
        let mut actions = vec![None; self.states.len() * symbol_count];
        let mut comm = vec![None; self.states.len()];
        let mut spec = VerifierSpec {
            name: self.name,
            states: self.states,
            initial,
            input_alphabet: self.input_alphabet,
            comm_alphabet: self.comm_alphabet,
            quantum_dim: self.quantum_dim,
            initial_quantum,
            actions: Vec::new(),
            comm: Vec::new(),
        };
        let syms = spec.tape_symbols();
        for ((state, sym), action) in self.actions {
            let idx = spec
                .symbol_index(sym)
                .expect("builder action on a symbol outside the tape alphabet");
            actions[state as usize * symbol_count + idx] = Some(action);
        }
        for (state, entry) in self.comm {
            comm[state as usize] = Some(entry);
        }
        // Fill unreachable (reading state, symbol) holes: halt rejecting.
        let identity_like = if spec.quantum_dim > 0 {
            CMat::identity(spec.quantum_dim)
        } else {
            CMat::identity(0)
        };
        for (sid, info) in spec.states.iter().enumerate() {
            if info.kind != StateKind::Reading {
                continue;
            }
            for &sym in &syms {
                let idx = spec.symbol_index(sym).unwrap();
                let slot = &mut actions[sid * symbol_count + idx];
                if slot.is_none() {
                    *slot = Some(if spec.quantum_dim > 0 {
                        Action::Unitary {
                            op: identity_like.clone(),
                            next: dead,
                            mv: 0,
                        }
                    } else {
                        Action::Coin {
                            arms: vec![(1.0, dead, 0)],
                        }
                    });
                }
            }
        }
        spec.actions = actions;
        spec.comm = comm;
        spec
    }
}

/// Mutate one unitary entry; used by tests to corrupt machines on purpose.
pub fn corrupt_unitary(spec: &mut VerifierSpec, state: StateId, sym: TapeSymbol, op: CMat) {
    let count = spec.symbol_count();
    let idx = spec.symbol_index(sym).expect("unknown symbol");
    if let Some(Action::Unitary { op: slot, .. }) =
        spec.actions[state as usize * count + idx].as_mut()
    {
        *slot = op;
    } else {
        panic!("entry is not a unitary action");
    }
}

/// Mutate one coin entry's probabilities; used by tests.
pub fn corrupt_coin(spec: &mut VerifierSpec, state: StateId, sym: TapeSymbol, probs: &[f64]) {
    let count = spec.symbol_count();
    let idx = spec.symbol_index(sym).expect("unknown symbol");
    if let Some(Action::Coin { arms }) = spec.actions[state as usize * count + idx].as_mut() {
        for (arm, &p) in arms.iter_mut().zip(probs) {
            arm.0 = p;
        }
    } else {
        panic!("entry is not a coin action");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::ProverStrategy;

    /// Quantum-free walker: from the left marker step right, then move ±1 on
    /// fair coins; accept on the right marker, reject back on the left one.
    pub(crate) fn ruin_spec() -> VerifierSpec {
        let mut b = SpecBuilder::new("gamblers-ruin", &['a'], 0);
        let s0 = b.state("s0", StateKind::Reading);
        let walk = b.state("walk", StateKind::Reading);
        let acc = b.state("acc", StateKind::Accept);
        let rej = b.state("rej", StateKind::Reject);
        b.coin(s0, &[TapeSymbol::LeftMarker], vec![(1.0, walk, 1)]);
        b.coin(
            walk,
            &[TapeSymbol::Input('a')],
            vec![(0.5, walk, -1), (0.5, walk, 1)],
        );
        b.coin(walk, &[TapeSymbol::LeftMarker], vec![(1.0, rej, 0)]);
        b.coin(walk, &[TapeSymbol::RightMarker], vec![(1.0, acc, 0)]);
        b.finish(s0, CVec::new(vec![]), rej)
    }

    #[test]
    fn valid_toy_spec_has_empty_report() {
        assert!(validate_spec(&ruin_spec()).is_empty());
    }

    #[test]
    fn coin_distribution_must_sum_to_one() {
        let mut spec = ruin_spec();
        let walk = spec.state_id("walk").unwrap();
        corrupt_coin(&mut spec, walk, TapeSymbol::Input('a'), &[1.0, 0.5]);
        let report = validate_spec(&spec);
        assert_eq!(report.len(), 1);
        assert!(report[0].message.contains("sum to 1.5"));
        assert_eq!(report[0].state.as_deref(), Some("walk"));
    }

    #[test]
    fn initial_config_checks_alphabet() {
        let spec = ruin_spec();
        let cfg = initial_config(&spec, "aaa").unwrap();
        assert_eq!(cfg.classical, spec.initial);
        assert_eq!(cfg.head, 0);
        assert!(cfg.history.is_empty());

        let err = initial_config(&spec, "ab#").unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn coin_step_splits_mass() {
        let spec = ruin_spec();
        let tape = Tape::new(&spec, "aaa").unwrap();
        let prover = ProverStrategy::silent();
        let cfg = initial_config(&spec, "aaa").unwrap();
        let succ = step(&spec, &tape, &cfg, &prover, "aaa").unwrap();
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].0.head, 1);

        let walk_cfg = &succ[0].0;
        let succ2 = step(&spec, &tape, walk_cfg, &prover, "aaa").unwrap();
        assert_eq!(succ2.len(), 2);
        let total: f64 = succ2.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(succ2.iter().any(|(c, _)| c.head == 0));
        assert!(succ2.iter().any(|(c, _)| c.head == 2));
    }

    #[test]
    fn step_on_halting_state_is_an_error() {
        let spec = ruin_spec();
        let tape = Tape::new(&spec, "a").unwrap();
        let cfg = Configuration {
            classical: spec.state_id("acc").unwrap(),
            head: 0,
            quantum: CVec::new(vec![]),
            history: Vec::new(),
        };
        let err = step(&spec, &tape, &cfg, &ProverStrategy::silent(), "a").unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn quantum_free_spec_round_trips_without_register() {
        let spec = ruin_spec();
        assert_eq!(spec.quantum_dim, 0);
        assert_eq!(spec.initial_quantum.dim(), 0);
        let tape = Tape::new(&spec, "aa").unwrap();
        let mut frontier = vec![initial_config(&spec, "aa").unwrap()];
        for _ in 0..6 {
            let mut next = Vec::new();
            for cfg in &frontier {
                if spec.is_halting(cfg.classical) {
                    continue;
                }
                for (succ, _) in step(&spec, &tape, cfg, &ProverStrategy::silent(), "aa").unwrap()
                {
                    assert_eq!(succ.quantum.dim(), 0);
                    assert!(succ.head <= tape.last_cell());
                    next.push(succ);
                }
            }
            frontier = next;
        }
    }
}
