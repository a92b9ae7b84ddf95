//! Static data of the five-qubit code: stabilizers, logical operators and
//! their incarnations, syndrome lookup tables with and without flag
//! information, and Pauli-frame corrections.
//!
//! Every table is generated from the code definition and then asserted equal
//! to a hard-coded reference copy; a disagreement is a build-breaking
//! inconsistency. Tie-breaking for equivalent recoveries is by (weight,
//! support, letters), which reproduces the reference tables.

use serde::{Deserialize, Serialize};

use crate::circuit::{self, Circuit, Op};
use crate::pauli::{Letter, PauliString, Phase};
use crate::{Error, Result};

/// The four stabilizer generators, as printed left to right.
pub const STABILIZERS: [&str; 4] = ["XXYIY", "YXXYI", "IYXXY", "YIYXX"];
/// Weight-3 generators whose joint +1 eigenstate is the logical |-> state.
pub const MINUS_X_GENERATORS: [&str; 5] = ["IZXZI", "ZIIZX", "XZIIZ", "ZXZII", "IIZXZ"];

/// Reference syndrome table: (syndrome s1..s4, no-flag recovery,
/// with-flag recovery).
const SYNDROME_TABLE: [([i8; 4], &str, &str); 16] = [
    ([1, 1, 1, 1], "I", "I"),
    ([1, -1, 1, -1], "X1", "X1"),
    ([-1, -1, 1, -1], "Z1", "Z1"),
    ([-1, 1, 1, 1], "Y1", "X3Y5"),
    ([1, 1, -1, 1], "X2", "X2"),
    ([-1, -1, -1, 1], "Z2", "Z3Y5"),
    ([-1, -1, 1, 1], "Y2", "Y2"),
    ([-1, 1, 1, -1], "X3", "X1Y2"),
    ([-1, -1, -1, -1], "Z3", "Z3"),
    ([1, -1, -1, 1], "Y3", "Y3"),
    ([1, -1, 1, 1], "X4", "X4"),
    ([1, -1, -1, -1], "Z4", "Y3Y5"),
    ([1, 1, -1, -1], "Y4", "Y4"),
    ([-1, 1, -1, 1], "X5", "X5"),
    ([1, 1, 1, -1], "Y5", "Y5"),
    ([-1, 1, -1, -1], "Z5", "X1Z2"),
];

/// Reference Pauli-frame corrections keyed by (m3, m4, m5).
const FRAME_TABLE: [([i8; 3], &str); 8] = [
    ([1, 1, 1], "I"),
    ([1, 1, -1], "Z4"),
    ([1, -1, 1], "Z2"),
    ([1, -1, -1], "X3"),
    ([-1, 1, 1], "Z1"),
    ([-1, 1, -1], "X5"),
    ([-1, -1, 1], "Z1Z2"),
    ([-1, -1, -1], "Z1X3"),
];

/// Reference weight-3 incarnation families (each entry stands for its five
/// cyclic shifts, all carrying a minus sign).
const INCARNATION_FAMILIES: [(LogicalClass, [&str; 2]); 3] = [
    (LogicalClass::Z, ["IIYZY", "IXXIZ"]),
    (LogicalClass::Y, ["IZZIY", "XIIXY"]),
    (LogicalClass::X, ["IXIYY", "ZIIZX"]),
];

/// The five-qubit code definition.
#[derive(Debug, Clone)]
pub struct CodeDefinition {
    pub stabilizers: [PauliString; 4],
    pub logical_x: PauliString,
    pub logical_y: PauliString,
    pub logical_z: PauliString,
    /// p1..p5, the weight-3 logical -X operators stabilizing |->_L.
    pub minus_x_generators: [PauliString; 5],
    pub t1: PauliString,
    pub t2: PauliString,
}

impl CodeDefinition {
    pub fn five_qubit() -> CodeDefinition {
        let parse = |s: &str| s.parse::<PauliString>().unwrap();
        let stabilizers = STABILIZERS.map(parse);
        let p = MINUS_X_GENERATORS.map(parse);
        let t1 = p[1].multiply(&p[3]).unwrap().multiply(&p[4]).unwrap();
        let t2 = p[0].multiply(&p[2]).unwrap().multiply(&p[4]).unwrap();
        CodeDefinition {
            stabilizers,
            logical_x: parse("XXXXX"),
            logical_y: parse("YYYYY"),
            logical_z: parse("ZZZZZ"),
            minus_x_generators: p,
            t1,
            t2,
        }
    }

    /// The 16 signed elements of the stabilizer group.
    pub fn stabilizer_group(&self) -> Vec<PauliString> {
        signed_group(&self.stabilizers)
    }

    /// The 32 signed elements stabilizing |->_L (generated by p1..p5).
    pub fn minus_state_group(&self) -> Vec<PauliString> {
        signed_group(&self.minus_x_generators)
    }

    /// Stabilizer eigenvalue flips of `e`: +1 iff `e` commutes with s_i.
    pub fn syndrome_of(&self, e: &PauliString) -> [i8; 4] {
        let mut s = [1i8; 4];
        for (i, g) in self.stabilizers.iter().enumerate() {
            s[i] = e.comm_sign(g).expect("5-qubit operators");
        }
        s
    }

    /// Commutation pattern of `e` against p1..p5.
    pub fn p_pattern(&self, e: &PauliString) -> [i8; 5] {
        let mut s = [1i8; 5];
        for (i, g) in self.minus_x_generators.iter().enumerate() {
            s[i] = e.comm_sign(g).expect("5-qubit operators");
        }
        s
    }
}

fn signed_group(generators: &[PauliString]) -> Vec<PauliString> {
    let n = generators.len();
    (0..1usize << n)
        .map(|bits| {
            let mut prod = PauliString::identity(5);
            for (i, g) in generators.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    prod = prod.multiply(g).unwrap();
                }
            }
            prod
        })
        .collect()
}

/// Dense index of a 4-sign syndrome; bit i set iff s_{i+1} flipped.
pub fn syndrome_index(syndrome: [i8; 4]) -> usize {
    syndrome
        .iter()
        .enumerate()
        .map(|(i, &m)| usize::from(m < 0) << i)
        .sum()
}

/// Dense index of a frame key (m3, m4, m5).
pub fn frame_index(m: [i8; 3]) -> usize {
    m.iter()
        .enumerate()
        .map(|(i, &v)| usize::from(v < 0) << i)
        .sum()
}

/// The identity plus the 15 single-qubit errors, in (qubit, X/Y/Z) order.
pub fn single_qubit_errors() -> Vec<PauliString> {
    let mut v = vec![PauliString::identity(5)];
    for q in 0..5 {
        for l in [Letter::X, Letter::Y, Letter::Z] {
            v.push(PauliString::single(5, q, l));
        }
    }
    v
}

// Ordering used to pick canonical representatives: weight, then support
// indices, then letters.
fn rep_key(p: &PauliString) -> (usize, Vec<usize>, String) {
    let support: Vec<usize> = (0..p.num_qubits())
        .filter(|&q| p.letter(q) != Letter::I)
        .collect();
    (p.weight(), support, p.letters_string())
}

fn min_rep<'a>(candidates: impl Iterator<Item = &'a PauliString>) -> PauliString {
    candidates
        .min_by_key(|p| rep_key(p))
        .copied()
        .expect("non-empty candidate set")
}

/// Logical coset of an operator relative to the code's stabilizer group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalClass {
    Trivial,
    X,
    Y,
    Z,
}

impl LogicalClass {
    pub fn label(&self) -> &'static str {
        match self {
            LogicalClass::Trivial => "I",
            LogicalClass::X => "XL",
            LogicalClass::Y => "YL",
            LogicalClass::Z => "ZL",
        }
    }

    /// Whether an error of this class leaves the X-basis logical states
    /// (|+>_L, |->_L) unflipped.
    pub fn preserves_x_eigenstates(&self) -> bool {
        matches!(self, LogicalClass::Trivial | LogicalClass::X)
    }
}

/// Classify `e` modulo the stabilizer group: the canonical syndrome
/// recovery is divided out, the remainder lands in one of the four logical
/// cosets. Also returns the minimum-weight element of e's own stabilizer
/// coset (phase ignored for the class, recorded in the representative).
pub fn logical_class(
    code: &CodeDefinition,
    tables: &DecodeTables,
    e: &PauliString,
) -> Result<(LogicalClass, PauliString)> {
    let syndrome = code.syndrome_of(e);
    let correction = tables.decode(syndrome, false);
    let residue = e.multiply(&correction)?;
    let group = code.stabilizer_group();
    let logicals = [
        (LogicalClass::Trivial, PauliString::identity(5)),
        (LogicalClass::X, code.logical_x),
        (LogicalClass::Y, code.logical_y),
        (LogicalClass::Z, code.logical_z),
    ];
    let mut class = None;
    for (c, l) in &logicals {
        let shifted = residue.multiply(l)?;
        if group.iter().any(|g| g.same_letters(&shifted)) {
            class = Some(*c);
            break;
        }
    }
    let class = class.ok_or_else(|| {
        Error::TableInconsistency(format!(
            "residue of {} lands in no logical coset (bad decode table?)",
            e.compact_name()
        ))
    })?;
    let coset: Vec<PauliString> = group.iter().map(|g| e.multiply(g)).collect::<Result<_>>()?;
    Ok((class, min_rep(coset.iter())))
}

/// Syndrome-to-recovery maps without flag (all single-qubit errors) and
/// with flag (the residual errors of flag-raising faults), plus the
/// Pauli-frame correction map for the encoding measurements.
#[derive(Debug, Clone)]
pub struct DecodeTables {
    pub no_flag: [PauliString; 16],
    pub with_flag: [PauliString; 16],
    pub frame: [PauliString; 8],
}

impl DecodeTables {
    /// Generate all tables for the five-qubit code and check them against
    /// the reference copies.
    pub fn five_qubit(code: &CodeDefinition) -> Result<DecodeTables> {
        let no_flag = generate_no_flag(code)?;
        let with_flag = generate_flag_table(code, &no_flag, &circuit::flagged_s1_circuit(false))?;
        let frame = generate_frame(code)?;
        let tables = DecodeTables {
            no_flag,
            with_flag,
            frame,
        };
        tables.check_reference(code)?;
        Ok(tables)
    }

    pub fn decode(&self, syndrome: [i8; 4], flag_raised: bool) -> PauliString {
        let idx = syndrome_index(syndrome);
        if flag_raised {
            self.with_flag[idx]
        } else {
            self.no_flag[idx]
        }
    }

    pub fn frame_correction(&self, m3: i8, m4: i8, m5: i8) -> PauliString {
        self.frame[frame_index([m3, m4, m5])]
    }

    fn check_reference(&self, code: &CodeDefinition) -> Result<()> {
        for (syndrome, no_flag, with_flag) in SYNDROME_TABLE {
            let idx = syndrome_index(syndrome);
            let want_e = PauliString::from_compact(5, no_flag)?;
            let want_ep = PauliString::from_compact(5, with_flag)?;
            if !self.no_flag[idx].same_letters(&want_e) {
                return Err(Error::TableInconsistency(format!(
                    "no-flag recovery for {syndrome:?}: generated {} expected {no_flag}",
                    self.no_flag[idx].compact_name()
                )));
            }
            if !self.with_flag[idx].same_letters(&want_ep) {
                return Err(Error::TableInconsistency(format!(
                    "with-flag recovery for {syndrome:?}: generated {} expected {with_flag}",
                    self.with_flag[idx].compact_name()
                )));
            }
        }
        for (m, correction) in FRAME_TABLE {
            let idx = frame_index(m);
            let want = PauliString::from_compact(5, correction)?;
            if !self.frame[idx].same_letters(&want) {
                return Err(Error::TableInconsistency(format!(
                    "frame correction for {m:?}: generated {} expected {correction}",
                    self.frame[idx].compact_name()
                )));
            }
        }
        // self-syndrome checks
        for (idx, r) in self.no_flag.iter().enumerate() {
            if syndrome_index(code.syndrome_of(r)) != idx {
                return Err(Error::TableInconsistency(format!(
                    "no-flag recovery {} does not reproduce its syndrome",
                    r.compact_name()
                )));
            }
        }
        for (idx, r) in self.with_flag.iter().enumerate() {
            if syndrome_index(code.syndrome_of(r)) != idx {
                return Err(Error::TableInconsistency(format!(
                    "with-flag recovery {} does not reproduce its syndrome",
                    r.compact_name()
                )));
            }
        }
        Ok(())
    }
}

fn generate_no_flag(code: &CodeDefinition) -> Result<[PauliString; 16]> {
    let mut table = [None::<PauliString>; 16];
    for e in single_qubit_errors() {
        let idx = syndrome_index(code.syndrome_of(&e));
        if let Some(prev) = table[idx] {
            return Err(Error::TableInconsistency(format!(
                "syndrome collision between {} and {}",
                prev.compact_name(),
                e.compact_name()
            )));
        }
        table[idx] = Some(e);
    }
    let filled: Vec<PauliString> = table.into_iter().map(|e| e.unwrap()).collect();
    Ok(filled.try_into().unwrap())
}

fn generate_frame(code: &CodeDefinition) -> Result<[PauliString; 8]> {
    let mut table = Vec::with_capacity(8);
    for idx in 0..8usize {
        let m: Vec<i8> = (0..3)
            .map(|b| if idx >> b & 1 == 1 { -1 } else { 1 })
            .collect();
        let mut candidates = Vec::new();
        for bits in 0..1024u64 {
            let cand = PauliString::from_xz(5, bits & 31, bits >> 5, Phase::ONE);
            let pat = code.p_pattern(&cand);
            if pat[0] == 1 && pat[1] == 1 && pat[2] == m[0] && pat[3] == m[1] && pat[4] == m[2] {
                candidates.push(cand);
            }
        }
        if candidates.is_empty() {
            return Err(Error::TableInconsistency(format!(
                "no frame correction for {m:?}"
            )));
        }
        table.push(min_rep(candidates.iter()));
    }
    Ok(table.try_into().unwrap())
}

/// Build the raised-flag syndrome table for a flagged measurement block.
///
/// Every Pauli fault in the block is propagated symbolically; faults that
/// flip the flag readout contribute their residual data error, keyed by
/// syndrome. Two residuals with the same syndrome must act identically on
/// the code states (equal modulo the stabilizer group, up to the logical X
/// that is trivial on the X-basis logical states this table serves). The
/// stored recovery is the literal residual when it already has minimum
/// weight in its stabilizer coset, otherwise the canonical minimum-weight
/// coset element. Syndromes not produced by any flag-raising fault fall
/// back to the no-flag recovery.
pub fn generate_flag_table(
    code: &CodeDefinition,
    no_flag: &[PauliString; 16],
    block: &Circuit,
) -> Result<[PauliString; 16]> {
    let stab_group = code.stabilizer_group();
    let state_group = code.minus_state_group();
    let mut residuals: [Vec<PauliString>; 16] = Default::default();
    for loc in block.enumerate_locations() {
        let errors: Vec<PauliString> = match &loc.op {
            Op::Gate { gate, .. } => enumerate_pauli_errors(block.n, &gate.qubits()),
            Op::Prepare { .. } | Op::Idle { .. } => enumerate_pauli_errors(block.n, &loc.qubits()),
            // a flipped flag readout leaves no data error and lands on the
            // trivial syndrome, covered by the fallback entry
            Op::MeasureReset { .. } => Vec::new(),
        };
        for err in errors {
            let prop = circuit::propagate_error(block, loc.index, &err)?;
            if !prop.flips("flag") {
                continue;
            }
            let data_err = prop
                .residual
                .restricted(&circuit::DATA)
                .with_phase(Phase::ONE);
            let idx = syndrome_index(code.syndrome_of(&data_err));
            residuals[idx].push(data_err);
        }
    }
    let equivalent = |a: &PauliString, b: &PauliString| -> bool {
        let prod = a.multiply(b).expect("5-qubit operators");
        state_group.iter().any(|g| g.same_letters(&prod))
    };
    let mut table = Vec::with_capacity(16);
    for (idx, found) in residuals.iter().enumerate() {
        let Some(first) = found.first() else {
            table.push(no_flag[idx]);
            continue;
        };
        for other in &found[1..] {
            if !equivalent(first, other) {
                return Err(Error::TableInconsistency(format!(
                    "flag residuals {} and {} share a syndrome but act differently",
                    first.compact_name(),
                    other.compact_name()
                )));
            }
        }
        let coset: Vec<PauliString> = stab_group
            .iter()
            .map(|g| first.multiply(g).expect("5-qubit operators"))
            .collect();
        let min_weight = coset.iter().map(|p| p.weight()).min().unwrap();
        let literal_min: Option<&PauliString> = found
            .iter()
            .filter(|p| p.weight() == min_weight)
            .min_by_key(|p| p.letters_string());
        let entry = match literal_min {
            Some(p) => *p,
            None => min_rep(coset.iter().filter(|p| p.weight() == min_weight)),
        };
        table.push(entry.with_phase(Phase::ONE));
    }
    Ok(table.try_into().unwrap())
}

/// All non-identity Pauli errors on the given qubits, embedded in the
/// register.
pub fn enumerate_pauli_errors(n: usize, qubits: &[usize]) -> Vec<PauliString> {
    let count = 4usize.pow(qubits.len() as u32);
    (1..count)
        .map(|mut v| {
            let mut p = PauliString::identity(n);
            for &q in qubits {
                let letter = match v & 3 {
                    0 => Letter::I,
                    1 => Letter::X,
                    2 => Letter::Y,
                    _ => Letter::Z,
                };
                p.set_letter(q, letter);
                v >>= 2;
            }
            p
        })
        .collect()
}

/// The full incarnation list of one logical operator: every element of its
/// stabilizer coset with exact sign, sorted canonically.
pub fn incarnations(code: &CodeDefinition, class: LogicalClass) -> Vec<PauliString> {
    let l = match class {
        LogicalClass::X => code.logical_x,
        LogicalClass::Y => code.logical_y,
        LogicalClass::Z => code.logical_z,
        LogicalClass::Trivial => PauliString::identity(5),
    };
    let mut coset: Vec<PauliString> = code
        .stabilizer_group()
        .iter()
        .map(|g| l.multiply(g).expect("5-qubit operators"))
        .collect();
    coset.sort_by_key(rep_key);
    coset
}

/// Check the incarnation structure against the reference families: each
/// logical coset holds its weight-5 representative with + sign and ten
/// weight-3 incarnations with - signs given by the cyclic families.
pub fn check_incarnations(code: &CodeDefinition) -> Result<()> {
    for (class, families) in INCARNATION_FAMILIES {
        let coset = incarnations(code, class);
        let weight5: Vec<&PauliString> = coset.iter().filter(|p| p.weight() == 5).collect();
        let weight3: Vec<&PauliString> = coset.iter().filter(|p| p.weight() == 3).collect();
        if weight3.len() != 10 {
            return Err(Error::TableInconsistency(format!(
                "{} coset has {} weight-3 incarnations, expected 10",
                class.label(),
                weight3.len()
            )));
        }
        let canonical = match class {
            LogicalClass::X => code.logical_x,
            LogicalClass::Y => code.logical_y,
            LogicalClass::Z => code.logical_z,
            LogicalClass::Trivial => unreachable!(),
        };
        if !weight5.iter().any(|p| **p == canonical) {
            return Err(Error::TableInconsistency(format!(
                "{} coset lacks its +1 weight-5 representative",
                class.label()
            )));
        }
        let mut expected = Vec::new();
        for family in families {
            let base: PauliString = family.parse().unwrap();
            for shift in 0..5 {
                // shift right by `shift`: new position i takes old i-shift
                let perm: Vec<usize> = (0..5).map(|i| (i + 5 - shift) % 5).collect();
                expected.push(base.permuted(&perm).negated());
            }
        }
        for want in &expected {
            if !weight3.iter().any(|p| **p == *want) {
                return Err(Error::TableInconsistency(format!(
                    "{} coset is missing incarnation {}",
                    class.label(),
                    want
                )));
            }
        }
    }
    Ok(())
}

/// Search the 120 data-qubit permutations for the one making
/// `perm ∘ g^⊗5` a logical gate: the stabilizer group maps to itself
/// (signs included) and the logical operators map to the correct cosets up
/// to sign. Returns the first permutation in lexicographic order.
pub fn find_permutation(g: crate::circuit::LogicalGate) -> Result<Vec<usize>> {
    use crate::circuit::LogicalGate;
    let code = CodeDefinition::five_qubit();
    let group = code.stabilizer_group();
    let (x_target, z_target) = match g {
        LogicalGate::X | LogicalGate::Y => (code.logical_x, code.logical_z),
        LogicalGate::H => (code.logical_z, code.logical_x),
        LogicalGate::S => (code.logical_y, code.logical_z),
    };
    let transversal = |p: &PauliString| -> PauliString {
        let mut cur = *p;
        for q in 0..5 {
            cur = crate::gate::conjugate_by_gate(&cur, &g.physical_gate(q)).unwrap();
        }
        cur
    };
    let in_coset_mod_sign = |p: &PauliString, l: &PauliString| -> bool {
        let shifted = p.multiply(l).expect("5-qubit operators");
        group.iter().any(|s| s.same_letters(&shifted))
    };
    for perm in permutations_of_5() {
        let map = |p: &PauliString| transversal(p).permuted(&perm);
        let stabs_ok = code.stabilizers.iter().all(|s| {
            let img = map(s);
            group.contains(&img)
        });
        if !stabs_ok {
            continue;
        }
        if in_coset_mod_sign(&map(&code.logical_x), &x_target)
            && in_coset_mod_sign(&map(&code.logical_z), &z_target)
        {
            return Ok(perm);
        }
    }
    Err(Error::NoPermutation)
}

fn permutations_of_5() -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(120);
    let mut items: Vec<usize> = (0..5).collect();
    permute(&mut items, 0, &mut out);
    out.sort();
    out
}

fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
    out.sort();
    out.dedup();
}

/// Everything `verify-tables` checks, with row-level exports for the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableReport {
    pub passed: bool,
    pub failures: Vec<String>,
    pub code: CodeRows,
    pub syndrome_rows: Vec<SyndromeRow>,
    pub frame_rows: Vec<FrameRow>,
    pub incarnation_rows: Vec<IncarnationRow>,
}

/// The code definition as plain operator strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeRows {
    pub stabilizers: Vec<String>,
    pub logical_x: String,
    pub logical_z: String,
    pub minus_x_generators: Vec<String>,
    pub t1: String,
    pub t2: String,
}

impl CodeRows {
    fn from_code(code: &CodeDefinition) -> CodeRows {
        CodeRows {
            stabilizers: code
                .stabilizers
                .iter()
                .map(|s| s.letters_string())
                .collect(),
            logical_x: code.logical_x.letters_string(),
            logical_z: code.logical_z.letters_string(),
            minus_x_generators: code
                .minus_x_generators
                .iter()
                .map(|p| p.letters_string())
                .collect(),
            t1: code.t1.letters_string(),
            t2: code.t2.letters_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyndromeRow {
    pub syndrome: [i8; 4],
    pub no_flag: String,
    pub with_flag: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameRow {
    pub m3: i8,
    pub m4: i8,
    pub m5: i8,
    pub correction: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncarnationRow {
    pub class: String,
    pub operator: String,
    pub weight: usize,
}

/// Assert the decode-table invariants: per-map bijectivity onto the 16
/// syndromes, self-syndrome reproduction, the with-flag error set, frame
/// commutation constraints, and the incarnation families.
pub fn verify_tables(code: &CodeDefinition, tables: &DecodeTables) -> TableReport {
    let mut failures = Vec::new();

    // no-flag: every single-qubit error decodes to itself
    for e in single_qubit_errors() {
        let rec = tables.decode(code.syndrome_of(&e), false);
        if !rec.same_letters(&e) {
            failures.push(format!(
                "no-flag decode of {} returned {}",
                e.compact_name(),
                rec.compact_name()
            ));
        }
    }
    // with-flag: the expected correctable set, bijective over syndromes
    let expected_flag_set = [
        "I", "X1", "X3Y5", "Z1", "X2", "Y2", "Z3Y5", "X1Y2", "Y3", "Z3", "X4", "Y4", "Y3Y5", "X5",
        "Y5", "X1Z2",
    ];
    let mut seen = std::collections::HashSet::new();
    for name in expected_flag_set {
        let e = PauliString::from_compact(5, name).unwrap();
        let idx = syndrome_index(code.syndrome_of(&e));
        if !tables.with_flag[idx].same_letters(&e) {
            failures.push(format!(
                "with-flag table does not map syndrome of {name} to it"
            ));
        }
        seen.insert(idx);
    }
    if seen.len() != 16 {
        failures.push("with-flag error set does not cover all 16 syndromes".into());
    }
    // every recovery reproduces its own syndrome; trivial residual class
    for (idx, r) in tables
        .no_flag
        .iter()
        .chain(tables.with_flag.iter())
        .enumerate()
    {
        let idx = idx % 16;
        if syndrome_index(code.syndrome_of(r)) != idx {
            failures.push(format!(
                "recovery {} breaks self-syndrome",
                r.compact_name()
            ));
        }
    }
    for e in single_qubit_errors() {
        match logical_class(code, tables, &e) {
            Ok((LogicalClass::Trivial, _)) => {}
            Ok((class, _)) => failures.push(format!(
                "{} decodes to class {}",
                e.compact_name(),
                class.label()
            )),
            Err(err) => failures.push(err.to_string()),
        }
    }
    // frame corrections: commute with p1, p2 and anticommute exactly with
    // the p_i whose outcome is -1
    for (m, _) in FRAME_TABLE {
        let c = tables.frame_correction(m[0], m[1], m[2]);
        let pat = code.p_pattern(&c);
        if pat[0] != 1 || pat[1] != 1 || pat[2] != m[0] || pat[3] != m[1] || pat[4] != m[2] {
            failures.push(format!(
                "frame correction {} has wrong pattern",
                c.compact_name()
            ));
        }
    }
    if let Err(e) = check_incarnations(code) {
        failures.push(e.to_string());
    }

    let syndrome_rows = (0..16)
        .map(|idx| {
            let syndrome: [i8; 4] = std::array::from_fn(|i| if idx >> i & 1 == 1 { -1 } else { 1 });
            SyndromeRow {
                syndrome,
                no_flag: tables.no_flag[idx].compact_name(),
                with_flag: tables.with_flag[idx].compact_name(),
            }
        })
        .collect();
    let frame_rows = (0..8)
        .map(|idx| {
            let m: [i8; 3] = std::array::from_fn(|i| if idx >> i & 1 == 1 { -1 } else { 1 });
            FrameRow {
                m3: m[0],
                m4: m[1],
                m5: m[2],
                correction: tables.frame[idx].compact_name(),
            }
        })
        .collect();
    let mut incarnation_rows = Vec::new();
    for class in [LogicalClass::X, LogicalClass::Y, LogicalClass::Z] {
        for p in incarnations(code, class) {
            incarnation_rows.push(IncarnationRow {
                class: class.label().into(),
                operator: p.to_string(),
                weight: p.weight(),
            });
        }
    }
    TableReport {
        passed: failures.is_empty(),
        failures,
        code: CodeRows::from_code(code),
        syndrome_rows,
        frame_rows,
        incarnation_rows,
    }
}
