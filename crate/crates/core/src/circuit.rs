//! Circuit representation, canonical protocol circuits, and the native-gate
//! compiler.
//!
//! Circuits are ordered lists of locations: preparations, gates (optionally
//! conditioned on an earlier measurement outcome), ancilla measure-reset
//! steps, and explicit idle steps on data qubits. Locations are the unit of
//! fault injection.
//!
//! # Register conventions
//!
//! Protocol circuits on the five-qubit code use qubits 0..4 as data qubits
//! d1..d5, qubit 5 as the measurement ancilla and qubit 6 as the flag.
//! Ancilla-mediated parity measurement of a Pauli P prepares the ancilla in
//! |+> (H on the reset ancilla), applies controlled-P_i from the ancilla to
//! each data qubit left to right, undoes the basis change and reads the
//! ancilla out in the Z basis. With a flag, two extra CX couplings from the
//! ancilla to the flag qubit are inserted after the first and before the
//! last data coupling, so an X-type ancilla fault between them flips the
//! flag while the noiseless action is unchanged.

use serde::{Deserialize, Serialize};

use crate::gate::{conjugate_by_gate, Gate};
use crate::pauli::{Letter, PauliString};
use crate::tableau::Basis;
use crate::{Error, Result};

/// Data qubits of the 5-qubit-code register.
pub const DATA: [usize; 5] = [0, 1, 2, 3, 4];
/// Measurement ancilla of the 5-qubit-code register.
pub const ANCILLA: usize = 5;
/// Flag qubit of the 5-qubit-code register.
pub const FLAG: usize = 6;

/// Qubit role labels carried in circuit metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Data(u8),
    Ancilla,
    Flag,
}

impl Role {
    pub fn label(&self) -> String {
        match self {
            Role::Data(i) => format!("d{i}"),
            Role::Ancilla => "ancilla".into(),
            Role::Flag => "flag".into(),
        }
    }

    pub fn from_label(s: &str) -> Result<Role> {
        match s {
            "ancilla" => Ok(Role::Ancilla),
            "flag" => Ok(Role::Flag),
            _ => s
                .strip_prefix('d')
                .and_then(|d| d.parse::<u8>().ok())
                .map(Role::Data)
                .ok_or_else(|| Error::UnknownLabel(s.into())),
        }
    }
}

/// Outcome condition for feedforward gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    /// Label of the measurement the gate is conditioned on.
    pub label: String,
    /// Apply the gate iff the recorded outcome equals this sign.
    pub outcome: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    Prepare {
        qubit: usize,
        basis: Basis,
    },
    Gate {
        gate: Gate,
        condition: Option<Condition>,
    },
    /// Z-basis readout of `qubit`, recorded under `label`, followed by a
    /// reset to |0>.
    MeasureReset {
        qubit: usize,
        label: String,
    },
    Idle {
        qubit: usize,
    },
}

/// One fault location: a dense index plus the operation at that point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub index: usize,
    pub op: Op,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: usize,
    pub name: String,
    pub description: String,
    pub roles: Vec<Role>,
    pub locations: Vec<Location>,
    /// Final qubit relabelling: new position i holds old qubit `relabel[i]`.
    pub relabel: Option<Vec<usize>>,
}

impl Circuit {
    pub fn new(n: usize, name: &str, roles: Vec<Role>) -> Circuit {
        assert_eq!(roles.len(), n);
        Circuit {
            n,
            name: name.into(),
            description: String::new(),
            roles,
            locations: Vec::new(),
            relabel: None,
        }
    }

    fn push(&mut self, op: Op) {
        for q in op_qubits(&op) {
            assert!(q < self.n, "qubit {q} out of range in {}", self.name);
        }
        self.locations.push(Location {
            index: self.locations.len(),
            op,
        });
    }

    pub fn prepare(&mut self, qubit: usize, basis: Basis) {
        self.push(Op::Prepare { qubit, basis });
    }

    pub fn gate(&mut self, gate: Gate) {
        self.push(Op::Gate {
            gate,
            condition: None,
        });
    }

    pub fn gate_if(&mut self, gate: Gate, label: &str, outcome: i8) {
        self.push(Op::Gate {
            gate,
            condition: Some(Condition {
                label: label.into(),
                outcome,
            }),
        });
    }

    pub fn measure_reset(&mut self, qubit: usize, label: &str) {
        self.push(Op::MeasureReset {
            qubit,
            label: label.into(),
        });
    }

    pub fn idle(&mut self, qubit: usize) {
        self.push(Op::Idle { qubit });
    }

    /// Dense, ordered list of fault locations. Stable for a fixed circuit.
    pub fn enumerate_locations(&self) -> &[Location] {
        debug_assert!(self.locations.iter().enumerate().all(|(i, l)| l.index == i));
        &self.locations
    }

    pub fn measurement_labels(&self) -> Vec<&str> {
        self.locations
            .iter()
            .filter_map(|l| match &l.op {
                Op::MeasureReset { label, .. } => Some(label.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Append all locations of `other` (same register) to this circuit.
    pub fn extend(&mut self, other: &Circuit) {
        assert_eq!(self.n, other.n);
        for loc in &other.locations {
            self.push(loc.op.clone());
        }
    }

    /// Ancilla-mediated parity measurement block for the Hermitian Pauli
    /// `parity` (letters on data qubits), optionally flag-protected.
    /// Untouched data qubits get one idle location each, appended after the
    /// block's measurement.
    pub fn parity_block(
        &mut self,
        parity: &PauliString,
        ancilla: usize,
        label: &str,
        flag: Option<usize>,
    ) {
        assert!(parity.phase().is_real());
        let touched: Vec<(usize, Letter)> = (0..parity.num_qubits())
            .filter_map(|q| {
                let l = parity.letter(q);
                (l != Letter::I).then_some((q, l))
            })
            .collect();
        assert!(touched.len() >= 2, "parity block needs weight >= 2");
        self.gate(Gate::H(ancilla));
        let last = touched.len() - 1;
        for (i, (q, letter)) in touched.iter().enumerate() {
            let g = match letter {
                Letter::X => Gate::Cx(ancilla, *q),
                Letter::Y => Gate::Cy(ancilla, *q),
                Letter::Z => Gate::Cz(ancilla, *q),
                Letter::I => unreachable!(),
            };
            self.gate(g);
            if let Some(f) = flag {
                // flag couplings after the first and before the last data
                // coupling
                if i == 0 || i == last - 1 {
                    self.gate(Gate::Cx(ancilla, f));
                }
            }
        }
        self.gate(Gate::H(ancilla));
        self.measure_reset(ancilla, label);
        for q in DATA {
            if q < parity.num_qubits()
                && parity.letter(q) == Letter::I
                && self
                    .roles
                    .get(q)
                    .is_some_and(|r| matches!(r, Role::Data(_)))
            {
                self.idle(q);
            }
        }
    }
}

fn op_qubits(op: &Op) -> Vec<usize> {
    match op {
        Op::Prepare { qubit, .. } | Op::MeasureReset { qubit, .. } | Op::Idle { qubit } => {
            vec![*qubit]
        }
        Op::Gate { gate, .. } => gate.qubits(),
    }
}

impl Location {
    pub fn qubits(&self) -> Vec<usize> {
        op_qubits(&self.op)
    }
}

fn data_roles(n: usize) -> Vec<Role> {
    let mut roles: Vec<Role> = (1..=n as u8).map(Role::Data).collect();
    roles[n - 1] = Role::Ancilla;
    roles
}

/// Four-qubit GHZ preparation by a heralded XXXX parity measurement with
/// feedforward: prepare |0000>, measure XXXX via the ancilla, and apply Z to
/// the first data qubit when the outcome is -1, so the output is always
/// (|0000> + |1111>)/sqrt(2).
pub fn ghz_circuit() -> Circuit {
    let mut roles = data_roles(5);
    roles[4] = Role::Ancilla;
    let mut c = Circuit::new(5, "ghz", roles);
    c.description = "heralded XXXX parity measurement with feedforward".into();
    for q in 0..4 {
        c.prepare(q, Basis::Zero);
    }
    let xxxx = PauliString::from_letters(
        &[Letter::X, Letter::X, Letter::X, Letter::X, Letter::I],
        crate::pauli::Phase::ONE,
    );
    c.parity_block(&xxxx, 4, "XXXX", None);
    c.gate_if(Gate::Z(0), "XXXX", -1);
    c
}

/// Operators measured during encoding, as strings on the data qubits.
pub const P3: &str = "XZIIZ";
pub const P4: &str = "ZXZII";
pub const P5: &str = "IIZXZ";
pub const T1: &str = "IXIYY";
pub const T2: &str = "XIYYI";
/// The flagged stabilizer measured on the encoded state.
pub const S1: &str = "XXYIY";

fn on_register(n: usize, data_pauli: &str) -> PauliString {
    let p: PauliString = data_pauli.parse().unwrap();
    p.embedded(n, &DATA)
}

/// Logical |-> preparation circuit.
///
/// The first stage prepares |00+0+> and measures the logical operators p3,
/// p4, p5 through the ancilla. With `ft` the verification stage follows:
/// measurements of T1 = IXIYY and T2 = XIYYI, the latter with two flag
/// couplings around its middle data coupling, and a final flag readout.
pub fn encoding_circuit(ft: bool) -> Circuit {
    let n = if ft { 7 } else { 6 };
    let mut roles = data_roles(6);
    if ft {
        roles.push(Role::Flag);
    }
    let name = if ft { "encode-ft" } else { "encode-nonft" };
    let mut c = Circuit::new(n, name, roles);
    c.description = if ft {
        "heralded |->_L preparation with T1/T2 verification and flag".into()
    } else {
        "non-fault-tolerant |->_L preparation".into()
    };
    let basis = [
        Basis::Zero,
        Basis::Zero,
        Basis::Plus,
        Basis::Zero,
        Basis::Plus,
    ];
    for (q, b) in basis.iter().enumerate() {
        c.prepare(q, *b);
    }
    c.prepare(ANCILLA, Basis::Zero);
    if ft {
        c.prepare(FLAG, Basis::Zero);
    }
    c.parity_block(&on_register(n, P3), ANCILLA, "p3", None);
    c.parity_block(&on_register(n, P4), ANCILLA, "p4", None);
    c.parity_block(&on_register(n, P5), ANCILLA, "p5", None);
    if ft {
        c.parity_block(&on_register(n, T1), ANCILLA, "T1", None);
        c.parity_block(&on_register(n, T2), ANCILLA, "T2", Some(FLAG));
        c.measure_reset(FLAG, "flag");
    }
    c
}

/// Flagged measurement of the stabilizer XXYIY on an already-encoded state.
///
/// Gate order (ancilla couplings left to right over data qubits, flag
/// couplings after the first and before the last): CX(a,d1), CX(a,flag),
/// CX(a,d2), CY(a,d3), CX(a,flag), CY(a,d5). With `inject_y` a deliberate Y
/// error is placed on the ancilla right after the CX(a,d2) coupling; it
/// propagates to the data error Y3Y5 and flips both the ancilla and the
/// flag readout.
pub fn flagged_s1_circuit(inject_y: bool) -> Circuit {
    let mut roles = data_roles(6);
    roles.push(Role::Flag);
    let mut c = Circuit::new(
        7,
        if inject_y {
            "s1-flagged-yerr"
        } else {
            "s1-flagged"
        },
        roles,
    );
    c.description = "flagged XXYIY stabilizer measurement".into();
    c.gate(Gate::H(ANCILLA));
    c.gate(Gate::Cx(ANCILLA, 0));
    c.gate(Gate::Cx(ANCILLA, FLAG)); // gate (a)
    c.gate(Gate::Cx(ANCILLA, 1)); // gate (b)
    if inject_y {
        c.gate(Gate::Y(ANCILLA));
    }
    c.gate(Gate::Cy(ANCILLA, 2)); // gate (c)
    c.gate(Gate::Cx(ANCILLA, FLAG)); // gate (d)
    c.gate(Gate::Cy(ANCILLA, 4));
    c.gate(Gate::H(ANCILLA));
    c.measure_reset(ANCILLA, "s1");
    c.idle(3);
    c.measure_reset(FLAG, "flag");
    c
}

/// Unflagged measurement block for one code stabilizer on the 7-qubit
/// register.
pub fn unflagged_stabilizer_block(stabilizer: &str, label: &str) -> Circuit {
    let mut roles = data_roles(6);
    roles.push(Role::Flag);
    let mut c = Circuit::new(7, &format!("meas-{label}"), roles);
    c.parity_block(&on_register(7, stabilizer), ANCILLA, label, None);
    c
}

/// Flagged measurement block for one code stabilizer on the 7-qubit
/// register, including the flag readout.
pub fn flagged_stabilizer_block(stabilizer: &str, label: &str) -> Circuit {
    let mut roles = data_roles(6);
    roles.push(Role::Flag);
    let mut c = Circuit::new(7, &format!("meas-{label}-flagged"), roles);
    c.parity_block(&on_register(7, stabilizer), ANCILLA, label, Some(FLAG));
    // the parity block appends idles after the ancilla readout; the flag
    // readout goes last
    c.measure_reset(FLAG, "flag");
    c
}

/// The transversal logical gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalGate {
    X,
    Y,
    H,
    S,
}

impl LogicalGate {
    pub fn physical_gate(&self, qubit: usize) -> Gate {
        match self {
            LogicalGate::X => Gate::X(qubit),
            LogicalGate::Y => Gate::Y(qubit),
            LogicalGate::H => Gate::H(qubit),
            LogicalGate::S => Gate::S(qubit),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LogicalGate::X => "XL",
            LogicalGate::Y => "YL",
            LogicalGate::H => "HL",
            LogicalGate::S => "SL",
        }
    }
}

/// Circuit form of a transversal logical gate on the 5 data qubits.
///
/// `physical` emits five single-qubit gates plus the relabelling map; the
/// virtual form has zero physical locations and carries the whole gate in
/// the relabel/frame metadata, to be compiled into downstream measurement
/// bases.
pub fn transversal_gate_circuit(g: LogicalGate, physical: bool) -> Result<Circuit> {
    let perm = crate::tables::find_permutation(g)?;
    let roles = (1..=5u8).map(Role::Data).collect();
    let mut c = Circuit::new(
        5,
        &format!(
            "{}-{}",
            g.name(),
            if physical { "physical" } else { "virtual" }
        ),
        roles,
    );
    if physical {
        for q in DATA {
            c.gate(g.physical_gate(q));
        }
    }
    c.description = format!("transversal {} via relabelling {:?}", g.name(), perm);
    c.relabel = Some(perm);
    Ok(c)
}

/// Propagation of an error through the tail of a circuit.
#[derive(Debug, Clone)]
pub struct Propagated {
    /// The residual register error at the end of the circuit.
    pub residual: PauliString,
    /// Labels of measurements whose recorded outcome is flipped.
    pub flipped: Vec<String>,
}

impl Propagated {
    pub fn flips(&self, label: &str) -> bool {
        self.flipped.iter().any(|l| l == label)
    }
}

/// Conjugate `error`, inserted immediately after location `after`, through
/// the remainder of the circuit. Measure-reset locations flip their recorded
/// outcome when the error at that point anticommutes with Z on the measured
/// qubit, and discard the error component on the reset qubit. Preparations
/// likewise discard the component on the prepared qubit.
///
/// Conditional gates are not supported here (propagation is used on
/// feedforward-free measurement blocks).
pub fn propagate_error(circuit: &Circuit, after: usize, error: &PauliString) -> Result<Propagated> {
    let mut cur = *error;
    let mut flipped = Vec::new();
    for loc in &circuit.locations[after + 1..] {
        match &loc.op {
            Op::Gate { gate, condition } => {
                if condition.is_some() {
                    return Err(Error::UnsupportedGate("conditional in propagation".into()));
                }
                cur = conjugate_by_gate(&cur, gate)?;
            }
            Op::MeasureReset { qubit, label } => {
                let z = PauliString::single(circuit.n, *qubit, Letter::Z);
                if !cur.commutes(&z)? {
                    flipped.push(label.clone());
                }
                cur.set_letter(*qubit, Letter::I);
            }
            Op::Prepare { qubit, .. } => {
                cur.set_letter(*qubit, Letter::I);
            }
            Op::Idle { .. } => {}
        }
    }
    Ok(Propagated {
        residual: cur,
        flipped,
    })
}

/// Replace every CX/CY/CZ by the native controlled-Rx(±π/2) plus
/// single-qubit rotations. The Rz(π/2) that each native coupling leaves on
/// its control qubit is deferred and folded into the next basis change or
/// readout pulse on that qubit, so the emitted phase of the final π/2 pulse
/// accounts for the number of couplings that preceded it.
pub fn compile_to_native(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(
        circuit.n,
        &format!("{}-native", circuit.name),
        circuit.roles.clone(),
    );
    out.description = circuit.description.clone();
    out.relabel = circuit.relabel.clone();
    // deferred Rz(π/2) counts per qubit, mod 4
    let mut pending = vec![0u8; circuit.n];
    let flush = |out: &mut Circuit, pending: &mut Vec<u8>, q: usize| {
        for _ in 0..pending[q] {
            out.gate(Gate::S(q));
        }
        pending[q] = 0;
    };
    // non-unitary boundaries flush every deferred phase so that compiled
    // circuits stay segmentwise equivalent to their sources
    let flush_all = |out: &mut Circuit, pending: &mut Vec<u8>| {
        for (q, count) in pending.iter_mut().enumerate() {
            for _ in 0..*count {
                out.gate(Gate::S(q));
            }
            *count = 0;
        }
    };
    for loc in &circuit.locations {
        if matches!(
            &loc.op,
            Op::Prepare { .. }
                | Op::MeasureReset { .. }
                | Op::Gate {
                    condition: Some(_),
                    ..
                }
        ) {
            flush_all(&mut out, &mut pending);
        }
        match &loc.op {
            Op::Prepare { qubit, basis } => {
                out.prepare(*qubit, *basis);
            }
            Op::Idle { qubit } => out.idle(*qubit),
            Op::MeasureReset { qubit, label } => {
                out.measure_reset(*qubit, label);
            }
            Op::Gate { gate, condition } => {
                use Gate::*;
                match (gate, condition) {
                    (Cx(..) | Cy(..) | Cz(..), Some(_)) => {
                        return Err(Error::UnsupportedGate(
                            "conditional two-qubit gate in native compilation".into(),
                        ))
                    }
                    (Cx(c, t), None) => {
                        flush(&mut out, &mut pending, *t);
                        out.gate(CrxMinus(*c, *t));
                        out.gate(SqrtX(*t));
                        pending[*c] = (pending[*c] + 1) & 3;
                    }
                    (Cy(c, t), None) => {
                        flush(&mut out, &mut pending, *t);
                        out.gate(Sdg(*t));
                        out.gate(CrxMinus(*c, *t));
                        out.gate(S(*t));
                        out.gate(SqrtY(*t));
                        pending[*c] = (pending[*c] + 1) & 3;
                    }
                    (Cz(c, t), None) => {
                        flush(&mut out, &mut pending, *t);
                        out.gate(H(*t));
                        out.gate(CrxMinus(*c, *t));
                        out.gate(H(*t));
                        out.gate(S(*t));
                        pending[*c] = (pending[*c] + 1) & 3;
                    }
                    (CrxPlus(..) | CrxMinus(..), _) => {
                        return Err(Error::UnsupportedGate(format!(
                            "{} is already native",
                            gate.name()
                        )))
                    }
                    (g, cond) => {
                        // single-qubit gate: flush unless it is Z-diagonal
                        let q = g.qubits()[0];
                        if !matches!(g, S(_) | Sdg(_) | Z(_)) {
                            flush(&mut out, &mut pending, q);
                        }
                        match cond {
                            None => out.gate(*g),
                            Some(cnd) => out.gate_if(*g, &cnd.label, cnd.outcome),
                        }
                    }
                }
            }
        }
    }
    for q in 0..circuit.n {
        flush(&mut out, &mut pending, q);
    }
    Ok(out)
}

/// Split a circuit into maximal gate-only segments for unitary equivalence
/// checks. Boundaries are preparations, measurements, idles and conditional
/// gates; segments keep the location order.
pub fn unitary_segments(circuit: &Circuit) -> Vec<Vec<Gate>> {
    let mut segments = Vec::new();
    let mut cur: Vec<Gate> = Vec::new();
    for loc in &circuit.locations {
        match &loc.op {
            Op::Gate {
                gate,
                condition: None,
            } => cur.push(*gate),
            Op::Idle { .. } => {}
            _ => {
                if !cur.is_empty() {
                    segments.push(std::mem::take(&mut cur));
                }
            }
        }
    }
    if !cur.is_empty() {
        segments.push(cur);
    }
    segments
}

// ---------------------------------------------------------------------------
// serialization

impl Circuit {
    /// Line-oriented text form, one location per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# name: {}\n", self.name));
        if !self.description.is_empty() {
            s.push_str(&format!("# description: {}\n", self.description));
        }
        s.push_str(&format!("# n: {}\n", self.n));
        let roles: Vec<String> = self.roles.iter().map(|r| r.label()).collect();
        s.push_str(&format!("# roles: {}\n", roles.join(" ")));
        if let Some(perm) = &self.relabel {
            let p: Vec<String> = perm.iter().map(|q| q.to_string()).collect();
            s.push_str(&format!("# relabel: {}\n", p.join(" ")));
        }
        for loc in &self.locations {
            let line = match &loc.op {
                Op::Prepare { qubit, basis } => format!("prep {qubit} {}", basis.label()),
                Op::Gate {
                    gate,
                    condition: None,
                } => format!("gate {gate}"),
                Op::Gate {
                    gate,
                    condition: Some(c),
                } => {
                    format!("cgate {gate} if {} {:+}", c.label, c.outcome)
                }
                Op::MeasureReset { qubit, label } => format!("measure {qubit} {label}"),
                Op::Idle { qubit } => format!("idle {qubit}"),
            };
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut name = String::from("circuit");
        let mut description = String::new();
        let mut n = 0usize;
        let mut roles: Vec<Role> = Vec::new();
        let mut relabel = None;
        let mut ops: Vec<Op> = Vec::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::CircuitParse(raw.into());
            if let Some(meta) = line.strip_prefix('#') {
                let meta = meta.trim();
                if let Some(v) = meta.strip_prefix("name:") {
                    name = v.trim().into();
                } else if let Some(v) = meta.strip_prefix("description:") {
                    description = v.trim().into();
                } else if let Some(v) = meta.strip_prefix("n:") {
                    n = v.trim().parse().map_err(|_| bad())?;
                } else if let Some(v) = meta.strip_prefix("roles:") {
                    roles = v
                        .split_whitespace()
                        .map(Role::from_label)
                        .collect::<Result<Vec<_>>>()?;
                } else if let Some(v) = meta.strip_prefix("relabel:") {
                    relabel = Some(
                        v.split_whitespace()
                            .map(|t| t.parse::<usize>().map_err(|_| bad()))
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let op = match tokens.as_slice() {
                ["prep", q, b] => Op::Prepare {
                    qubit: q.parse().map_err(|_| bad())?,
                    basis: Basis::from_label(b)?,
                },
                ["gate", gname, qs @ ..] if !qs.is_empty() => {
                    let qubits: Vec<usize> = qs
                        .iter()
                        .map(|t| t.parse::<usize>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()?;
                    Op::Gate {
                        gate: Gate::from_name(gname, &qubits)?,
                        condition: None,
                    }
                }
                ["cgate", gname, rest @ ..] if rest.len() >= 4 => {
                    let split = rest.iter().position(|t| *t == "if").ok_or_else(bad)?;
                    let qubits: Vec<usize> = rest[..split]
                        .iter()
                        .map(|t| t.parse::<usize>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()?;
                    let label = rest[split + 1];
                    let outcome: i8 = rest[split + 2].parse().map_err(|_| bad())?;
                    Op::Gate {
                        gate: Gate::from_name(gname, &qubits)?,
                        condition: Some(Condition {
                            label: label.into(),
                            outcome,
                        }),
                    }
                }
                ["measure", q, label] => Op::MeasureReset {
                    qubit: q.parse().map_err(|_| bad())?,
                    label: (*label).into(),
                },
                ["idle", q] => Op::Idle {
                    qubit: q.parse().map_err(|_| bad())?,
                },
                _ => return Err(bad()),
            };
            ops.push(op);
        }
        if n == 0 || roles.len() != n {
            return Err(Error::CircuitParse("missing or inconsistent header".into()));
        }
        let mut c = Circuit::new(n, &name, roles);
        c.description = description;
        c.relabel = relabel;
        for op in ops {
            c.push(op);
        }
        Ok(c)
    }
}
