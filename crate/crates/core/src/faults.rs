//! Exhaustive single-fault enumeration and the machine-checked
//! fault-tolerance verifiers.
//!
//! A fault is the insertion of a Pauli error immediately after one circuit
//! location, or a flipped measurement outcome: 15 two-qubit Paulis per
//! two-qubit gate, 3 Paulis per single-qubit gate, preparation or idle
//! step, and one outcome flip per measurement. The verifiers run every
//! fault through every relevant outcome branch and grade the residual
//! errors on the output state.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::Backend;
use crate::circuit::{self, Circuit, Op, DATA};
use crate::pauli::{PauliString, Phase};
use crate::protocols::{
    classify_coset, encoding_acceptance, ideal_logical_minus, run_qec_cycle, CycleFault,
    CycleSegment, CycleSpec, Policy, Toolkit,
};
use crate::tableau::StabilizerState;
use crate::tables::{enumerate_pauli_errors, single_qubit_errors};
use crate::Result;

/// What goes wrong at a fault location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultKind {
    /// A Pauli error on the location's qubits, inserted after it acts.
    Pauli(PauliString),
    /// The measurement records the wrong outcome.
    OutcomeFlip,
}

/// A single fault: a location index plus what goes wrong there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub location_index: usize,
    pub kind: FaultKind,
}

impl Fault {
    pub fn describe(&self, circuit: &Circuit) -> String {
        let loc = &circuit.locations[self.location_index];
        let what = match &self.kind {
            FaultKind::Pauli(p) => p.letters_string().to_string(),
            FaultKind::OutcomeFlip => "outcome-flip".into(),
        };
        format!("loc{} ({:?}) {}", self.location_index, loc.op, what)
    }
}

/// Every single fault of a circuit, in location order.
pub fn enumerate_faults(circuit: &Circuit) -> Vec<Fault> {
    let mut faults = Vec::new();
    for loc in circuit.enumerate_locations() {
        match &loc.op {
            Op::MeasureReset { .. } => faults.push(Fault {
                location_index: loc.index,
                kind: FaultKind::OutcomeFlip,
            }),
            Op::Prepare { .. } | Op::Idle { .. } => {
                for p in enumerate_pauli_errors(1, &[0]) {
                    faults.push(Fault {
                        location_index: loc.index,
                        kind: FaultKind::Pauli(p),
                    });
                }
            }
            Op::Gate { gate, .. } => {
                let arity = gate.qubits().len();
                for p in enumerate_pauli_errors(arity, &(0..arity).collect::<Vec<_>>()) {
                    faults.push(Fault {
                        location_index: loc.index,
                        kind: FaultKind::Pauli(p),
                    });
                }
            }
        }
    }
    faults
}

/// Outcome of one fault in one branch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaultOutcome {
    pub fault_index: usize,
    pub fault: String,
    pub branch: Vec<i8>,
    pub accepted: bool,
    pub flag_raised: bool,
    /// Residual error slot of the classified output state, when accepted.
    pub residual: Option<String>,
    pub logical_flip: bool,
    pub violation: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub name: String,
    pub circuit: String,
    pub total_faults: usize,
    pub total_runs: usize,
    pub accepted_runs: usize,
    pub rejected_runs: usize,
    pub violations: Vec<FaultOutcome>,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn new(name: &str, circuit: &str) -> VerifyReport {
        VerifyReport {
            name: name.into(),
            circuit: circuit.into(),
            total_faults: 0,
            total_runs: 0,
            accepted_runs: 0,
            rejected_runs: 0,
            violations: Vec::new(),
            passed: true,
            notes: Vec::new(),
        }
    }

    fn finish(mut self) -> VerifyReport {
        self.passed = self.violations.is_empty();
        self.violations
            .sort_by_key(|v| (v.fault_index, v.branch.clone()));
        self
    }
}

const BRANCHES: usize = 8;

fn branch_plan(branch: usize) -> Vec<i8> {
    (0..3)
        .map(|b| if branch >> b & 1 == 1 { -1 } else { 1 })
        .collect()
}

/// Machine check of the encoding circuit's fault tolerance: for every
/// single fault and every preparation-outcome branch, an accepted run under
/// the general policy must leave the frame-corrected output within a
/// single-qubit error of |->_L (no logical flip). Returns the full report;
/// any accepted branch with a logical flip is a violation.
pub fn verify_ft_encoding(toolkit: &Toolkit, circuit: &Circuit) -> Result<VerifyReport> {
    let ft = circuit.measurement_labels().contains(&"T1");
    let mut report = VerifyReport::new("ft-encoding", &circuit.name);
    let faults = enumerate_faults(circuit);
    report.total_faults = faults.len();
    let outcomes: Vec<Vec<FaultOutcome>> = faults
        .par_iter()
        .enumerate()
        .map(|(fi, fault)| {
            let mut rows = Vec::with_capacity(BRANCHES);
            for branch in 0..BRANCHES {
                let plan = branch_plan(branch);
                let (record, state) =
                    run_encoding_with(toolkit, circuit, ft, fault, &plan).expect("encoding run");
                let mut row = FaultOutcome {
                    fault_index: fi,
                    fault: fault.describe(circuit),
                    branch: plan,
                    accepted: record.accepted,
                    flag_raised: record.flag_raised,
                    residual: None,
                    logical_flip: false,
                    violation: false,
                };
                if record.accepted {
                    let c = classify_coset(toolkit, &state, &record.pauli_frame)
                        .expect("accepted state classifies");
                    row.residual = Some(c.error.compact_name());
                    row.logical_flip = c.logical_flip;
                    row.violation = c.logical_flip;
                }
                rows.push(row);
            }
            rows
        })
        .collect();
    for rows in outcomes {
        for row in rows {
            report.total_runs += 1;
            if row.accepted {
                report.accepted_runs += 1;
            } else {
                report.rejected_runs += 1;
            }
            if row.violation {
                report.violations.push(row);
            }
        }
    }
    Ok(report.finish())
}

// Run a (possibly mutated) encoding circuit with a fault on the tableau
// backend; acceptance per the general policy.
fn run_encoding_with(
    toolkit: &Toolkit,
    circuit: &Circuit,
    ft: bool,
    fault: &Fault,
    plan: &[i8],
) -> Result<(crate::protocols::RunRecord, StabilizerState)> {
    use crate::exec::{run_circuit, ExecControls};
    use rand_chacha::rand_core::SeedableRng;
    let mut backend = StabilizerState::init(circuit.n);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let controls = ExecControls {
        fault: Some(fault),
        noise: None,
        forced_random: plan,
    };
    let trace = run_circuit(&mut backend, circuit, &controls, &mut rng)?;
    let outcomes: Vec<(String, i8)> = trace
        .outcomes
        .iter()
        .map(|o| (o.label.clone(), o.recorded))
        .collect();
    let (accepted, flag_raised) = encoding_acceptance(ft, Policy::General, &outcomes);
    let m = |l: &str| {
        outcomes
            .iter()
            .rev()
            .find(|(ol, _)| ol == l)
            .map(|(_, v)| *v)
            .unwrap_or(1)
    };
    let record = crate::protocols::RunRecord {
        protocol: circuit.name.clone(),
        outcomes: outcomes.clone(),
        accepted,
        flag_raised,
        pauli_frame: toolkit.tables.frame_correction(m("p3"), m("p4"), m("p5")),
        seed: 1,
    };
    Ok((record, backend))
}

/// Remove the flag couplings, the flag preparation and the flag readout
/// from a circuit: the drop-flag control mutation.
pub fn drop_flag(circuit: &Circuit) -> Circuit {
    let mut out = Circuit::new(
        circuit.n,
        &format!("{}-dropflag", circuit.name),
        circuit.roles.clone(),
    );
    out.description = circuit.description.clone();
    out.relabel = circuit.relabel.clone();
    for loc in &circuit.locations {
        let keep = match &loc.op {
            Op::Gate { gate, .. } => !gate.qubits().contains(&circuit::FLAG),
            Op::MeasureReset { qubit, .. } | Op::Prepare { qubit, .. } | Op::Idle { qubit } => {
                *qubit != circuit::FLAG
            }
        };
        if keep {
            match &loc.op {
                Op::Prepare { qubit, basis } => out.prepare(*qubit, *basis),
                Op::Gate {
                    gate,
                    condition: None,
                } => out.gate(*gate),
                Op::Gate {
                    gate,
                    condition: Some(c),
                } => out.gate_if(*gate, &c.label, c.outcome),
                Op::MeasureReset { qubit, label } => out.measure_reset(*qubit, label),
                Op::Idle { qubit } => out.idle(*qubit),
            }
        }
    }
    out
}

/// Row-by-row check of the flagged-measurement fault table, plus the two
/// fault-tolerance statements for the flagged XXYIY block: an unraised flag
/// leaves at most a single-qubit error, and the raised-flag residuals have
/// pairwise distinct syndromes matching the raised-flag decode table.
pub fn verify_flagged_s1(toolkit: &Toolkit) -> Result<VerifyReport> {
    let block = circuit::flagged_s1_circuit(false);
    let mut report = VerifyReport::new("flagged-s1", &block.name);

    // named gates of the reference fault table: (a), (b), (c), (d)
    let gate_index = |want: crate::gate::Gate, nth: usize| -> usize {
        block
            .locations
            .iter()
            .filter(|l| matches!(&l.op, Op::Gate { gate, .. } if *gate == want))
            .nth(nth)
            .map(|l| l.index)
            .expect("gate present")
    };
    use crate::gate::Gate;
    let loc_a = gate_index(Gate::Cx(circuit::ANCILLA, circuit::FLAG), 0);
    let loc_b = gate_index(Gate::Cx(circuit::ANCILLA, 1), 0);
    let loc_c = gate_index(Gate::Cy(circuit::ANCILLA, 2), 0);
    let loc_d = gate_index(Gate::Cx(circuit::ANCILLA, circuit::FLAG), 1);

    // reference rows: (location, ancilla/target fault letters, expected
    // residual on the data qubits, expected reduced form)
    let rows: [(usize, &str, &str, Option<&str>); 16] = [
        (loc_b, "XI", "Y3Y5", None),
        (loc_b, "YI", "Y3Y5", None),
        (loc_b, "XX", "X2Y3Y5", Some("X1")),
        (loc_b, "YX", "X2Y3Y5", Some("X1")),
        (loc_b, "XY", "Y2Y3Y5", Some("X1Z2")),
        (loc_b, "YY", "Y2Y3Y5", Some("X1Z2")),
        (loc_b, "XZ", "Z2Y3Y5", Some("X1Y2")),
        (loc_b, "YZ", "Z2Y3Y5", Some("X1Y2")),
        (loc_c, "XI", "Y5", None),
        (loc_c, "XX", "X3Y5", None),
        (loc_c, "XY", "Y3Y5", None),
        (loc_c, "XZ", "Z3Y5", None),
        (loc_a, "XZ", "X2Y3Y5", Some("X1")),
        (loc_a, "XI", "X2Y3Y5", Some("X1")),
        (loc_d, "XX", "Y5", None),
        (loc_d, "YX", "Y5", None),
    ];
    for (loc, letters, want_residual, want_reduced) in rows {
        let fault: PauliString = letters.parse().unwrap();
        let target_qubits = block.locations[loc].qubits();
        let embedded = fault.embedded(block.n, &target_qubits);
        let prop = circuit::propagate_error(&block, loc, &embedded)?;
        if !prop.flips("flag") {
            report
                .notes
                .push(format!("row {letters}@loc{loc} did not flip the flag"));
            report.violations.push(FaultOutcome {
                fault_index: loc,
                fault: format!("{letters}@loc{loc}"),
                branch: vec![],
                accepted: true,
                flag_raised: false,
                residual: None,
                logical_flip: false,
                violation: true,
            });
            continue;
        }
        let data = prop.residual.restricted(&DATA).with_phase(Phase::ONE);
        let mut ok = data.compact_name() == want_residual;
        if let Some(reduced) = want_reduced {
            // the reduction is an exact stabilizer-coset statement: the
            // minimum-weight element of the residual's coset is the quoted
            // operator
            let (_, rep) = crate::tables::logical_class(&toolkit.code, &toolkit.tables, &data)?;
            ok = ok && rep.compact_name() == reduced;
        }
        report.total_runs += 1;
        if !ok {
            report.violations.push(FaultOutcome {
                fault_index: loc,
                fault: format!("{letters}@loc{loc}"),
                branch: vec![],
                accepted: true,
                flag_raised: true,
                residual: Some(data.compact_name()),
                logical_flip: false,
                violation: true,
            });
        }
    }
    // the `I` rows: pure flag-qubit errors leave no data error
    for (loc, letters) in [(loc_a, "IX"), (loc_a, "ZX"), (loc_d, "IX"), (loc_d, "ZX")] {
        let fault: PauliString = letters.parse().unwrap();
        let embedded = fault.embedded(block.n, &block.locations[loc].qubits());
        let prop = circuit::propagate_error(&block, loc, &embedded)?;
        report.total_runs += 1;
        if !prop.flips("flag") || prop.residual.restricted(&DATA).weight() != 0 {
            report.violations.push(FaultOutcome {
                fault_index: loc,
                fault: format!("{letters}@loc{loc}"),
                branch: vec![],
                accepted: true,
                flag_raised: prop.flips("flag"),
                residual: Some(prop.residual.restricted(&DATA).compact_name()),
                logical_flip: false,
                violation: true,
            });
        }
    }

    // exhaustive statements over all faults in the block, run on the
    // tableau backend with the encoded input
    let faults = enumerate_faults(&block);
    report.total_faults = faults.len();
    let mut raised_set: Vec<PauliString> = Vec::new();
    for fault in &faults {
        let state: StabilizerState = ideal_logical_minus(toolkit, 7)?;
        let (record, after) = crate::protocols::run_flagged_s1(state, false, Some(fault), None, 1)?;
        report.total_runs += 1;
        let c = classify_coset(toolkit, &after, &PauliString::identity(5))?;
        if !record.flag_raised {
            // no flag: at most a single-qubit error relative to |->_L
            if c.logical_flip {
                report.violations.push(FaultOutcome {
                    fault_index: fault.location_index,
                    fault: fault.describe(&block),
                    branch: vec![],
                    accepted: true,
                    flag_raised: false,
                    residual: Some(c.error.compact_name()),
                    logical_flip: true,
                    violation: true,
                });
            }
        } else {
            // flag raised: the residual must sit in the raised-flag
            // correctable set: decoding the state's syndrome with the flag
            // table must clear the error
            let syndrome: Vec<i8> = toolkit
                .code
                .stabilizers
                .iter()
                .map(|s| after.expectation_sign(&toolkit.on_register(s, 7)))
                .collect::<Result<Vec<_>>>()?;
            let syndrome: [i8; 4] = syndrome.try_into().unwrap();
            let recovery = toolkit.tables.decode(syndrome, true);
            let mut fixed = after.clone();
            fixed.apply_pauli(&recovery.embedded(7, &DATA))?;
            let c2 = classify_coset(toolkit, &fixed, &PauliString::identity(5))?;
            if c2.logical_flip || c2.error.weight() != 0 {
                report.violations.push(FaultOutcome {
                    fault_index: fault.location_index,
                    fault: fault.describe(&block),
                    branch: vec![],
                    accepted: true,
                    flag_raised: true,
                    residual: Some(c2.error.compact_name()),
                    logical_flip: c2.logical_flip,
                    violation: true,
                });
            }
            raised_set.push(recovery);
        }
    }
    raised_set.sort_by_key(|p| p.letters_string());
    raised_set.dedup_by(|a, b| a.same_letters(b));
    report.notes.push(format!(
        "raised-flag recoveries exercised: {}",
        raised_set.len()
    ));
    Ok(report.finish())
}

/// The two verification-evading single-error states on the logically
/// flipped output, with their eigenvalue patterns, plus the exhaustive
/// check that no single fault in the preparation stage reaches them.
pub fn verify_case_b_tables(toolkit: &Toolkit) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("case-b", "encode-ft");
    let code = &toolkit.code;

    // part 1: on the flipped logical state, exactly X4 and Z4 pass both
    // verification checks; their p-patterns are the recorded ones
    let mut passing = Vec::new();
    for e in single_qubit_errors().into_iter().skip(1) {
        let flips_t1 = !e.commutes(&code.t1)?;
        let flips_t2 = !e.commutes(&code.t2)?;
        if flips_t1 && flips_t2 {
            passing.push(e);
        }
    }
    let names: Vec<String> = passing.iter().map(|p| p.compact_name()).collect();
    if names != ["X4", "Z4"] {
        report.violations.push(FaultOutcome {
            fault_index: 0,
            fault: format!("verification-evading set {names:?}"),
            branch: vec![],
            accepted: true,
            flag_raised: false,
            residual: None,
            logical_flip: true,
            violation: true,
        });
    }
    // eigenvalue patterns of p1..p5 on X4|+>_L and Z4|+>_L: the |+>_L
    // state is a -1 eigenstate of every p_i
    let x4 = PauliString::from_compact(5, "X4")?;
    let z4 = PauliString::from_compact(5, "Z4")?;
    let pattern = |e: &PauliString| -> [i8; 5] {
        let p = code.p_pattern(e);
        std::array::from_fn(|i| -p[i])
    };
    if pattern(&x4) != [1, 1, -1, -1, -1] {
        report.violations.push(FaultOutcome {
            fault_index: 1,
            fault: format!("X4|+>_L pattern {:?}", pattern(&x4)),
            branch: vec![],
            accepted: true,
            flag_raised: false,
            residual: None,
            logical_flip: true,
            violation: true,
        });
    }
    if pattern(&z4) != [-1, -1, -1, -1, 1] {
        report.violations.push(FaultOutcome {
            fault_index: 2,
            fault: format!("Z4|+>_L pattern {:?}", pattern(&z4)),
            branch: vec![],
            accepted: true,
            flag_raised: false,
            residual: None,
            logical_flip: true,
            violation: true,
        });
    }
    report
        .notes
        .push(format!("verification-evading single errors: {names:?}"));

    // part 2: no single fault in the preparation stage produces either bad
    // state. The non-FT circuit is exactly the preparation stage; run it
    // alone and test the frame-corrected eigenvalue pattern of every
    // branch.
    let prep = circuit::encoding_circuit(false);
    let faults = enumerate_faults(&prep);
    report.total_faults = faults.len();
    for (fi, fault) in faults.iter().enumerate() {
        for branch in 0..BRANCHES {
            let plan = branch_plan(branch);
            let mut backend = StabilizerState::init(prep.n);
            use crate::exec::{run_circuit, ExecControls};
            use rand_chacha::rand_core::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
            let controls = ExecControls {
                fault: Some(fault),
                noise: None,
                forced_random: &plan,
            };
            let trace = run_circuit(&mut backend, &prep, &controls, &mut rng)?;
            report.total_runs += 1;
            let m = |l: &str| trace.recorded_or(l, 1);
            let frame = toolkit.tables.frame_correction(m("p3"), m("p4"), m("p5"));
            let mut m_pattern = [0i8; 5];
            let mut valid = true;
            for (i, p) in code.minus_x_generators.iter().enumerate() {
                let v = backend.expectation_sign(&toolkit.on_register(p, prep.n))?;
                if v == 0 {
                    valid = false;
                    break;
                }
                m_pattern[i] = v * frame.comm_sign(p)?;
            }
            if !valid {
                continue;
            }
            let bad = m_pattern == [1, 1, -1, -1, -1] || m_pattern == [-1, -1, -1, -1, 1];
            if bad {
                report.violations.push(FaultOutcome {
                    fault_index: fi,
                    fault: fault.describe(&prep),
                    branch: plan,
                    accepted: true,
                    flag_raised: false,
                    residual: Some(format!("pattern {m_pattern:?}")),
                    logical_flip: true,
                    violation: true,
                });
            }
        }
    }
    Ok(report.finish())
}

/// The three distance-3 fault-tolerance criteria for the flag-QEC cycle,
/// checked exhaustively.
pub fn verify_ft_criteria(toolkit: &Toolkit, spec: &CycleSpec) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("qec-cycle", "flag-qec-cycle");
    let cycle_faults = enumerate_cycle_faults(spec);
    report.total_faults = cycle_faults.len();

    // criterion 1: a noise-free cycle removes any single-qubit input error
    for e in single_qubit_errors() {
        let mut state: StabilizerState = ideal_logical_minus(toolkit, 7)?;
        state.apply_pauli(&e.embedded(7, &DATA))?;
        run_qec_cycle(toolkit, spec, &mut state, None, None, 1)?;
        report.total_runs += 1;
        let c = classify_coset(toolkit, &state, &PauliString::identity(5))?;
        if c.logical_flip || c.error.weight() != 0 {
            report.violations.push(FaultOutcome {
                fault_index: 0,
                fault: format!("criterion1 input {}", e.compact_name()),
                branch: vec![],
                accepted: true,
                flag_raised: false,
                residual: Some(c.error.compact_name()),
                logical_flip: c.logical_flip,
                violation: true,
            });
        }
    }

    // criterion 2: a single fault on a clean input leaves at most one
    // single-qubit error (no logical flip)
    let crit2: Vec<Option<FaultOutcome>> = cycle_faults
        .par_iter()
        .enumerate()
        .map(|(fi, cf)| {
            let mut state: StabilizerState =
                ideal_logical_minus(toolkit, 7).expect("ideal preparation");
            run_qec_cycle(toolkit, spec, &mut state, Some(cf), None, 1).expect("cycle run");
            let c = classify_coset(toolkit, &state, &PauliString::identity(5))
                .expect("cycle output classifies");
            if c.logical_flip {
                Some(FaultOutcome {
                    fault_index: fi,
                    fault: describe_cycle_fault(spec, cf),
                    branch: vec![],
                    accepted: true,
                    flag_raised: false,
                    residual: Some(c.error.compact_name()),
                    logical_flip: true,
                    violation: true,
                })
            } else {
                None
            }
        })
        .collect();
    report.total_runs += cycle_faults.len();
    report.violations.extend(crit2.into_iter().flatten());

    // criterion 3: a single fault on any singly-errored input still leaves
    // a valid encoded state with at most a single-qubit error
    let inputs = single_qubit_errors();
    let crit3: Vec<Option<FaultOutcome>> = cycle_faults
        .par_iter()
        .enumerate()
        .flat_map(|(fi, cf)| {
            inputs
                .par_iter()
                .map(move |e| {
                    let mut state: StabilizerState =
                        ideal_logical_minus(toolkit, 7).expect("ideal preparation");
                    state
                        .apply_pauli(&e.embedded(7, &DATA))
                        .expect("input error");
                    run_qec_cycle(toolkit, spec, &mut state, Some(cf), None, 1).expect("cycle run");
                    // any coset state is acceptable; a classification
                    // failure is the violation
                    match classify_coset(toolkit, &state, &PauliString::identity(5)) {
                        Ok(_) => None,
                        Err(_) => Some(FaultOutcome {
                            fault_index: fi,
                            fault: format!(
                                "criterion3 input {} {}",
                                e.compact_name(),
                                describe_cycle_fault(spec, cf)
                            ),
                            branch: vec![],
                            accepted: true,
                            flag_raised: false,
                            residual: None,
                            logical_flip: false,
                            violation: true,
                        }),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    report.total_runs += cycle_faults.len() * inputs.len();
    report.violations.extend(crit3.into_iter().flatten());
    Ok(report.finish())
}

fn describe_cycle_fault(spec: &CycleSpec, cf: &CycleFault) -> String {
    let block = match cf.segment {
        CycleSegment::Flagged(j) => &spec.flagged[j],
        CycleSegment::Unflagged(j) => &spec.unflagged[j],
    };
    format!("{:?} {}", cf.segment, cf.fault.describe(block))
}

/// All single faults across the cycle's conditional block structure.
pub fn enumerate_cycle_faults(spec: &CycleSpec) -> Vec<CycleFault> {
    let mut out = Vec::new();
    for (j, block) in spec.flagged.iter().enumerate() {
        for fault in enumerate_faults(block) {
            out.push(CycleFault {
                segment: CycleSegment::Flagged(j),
                fault,
            });
        }
    }
    for (j, block) in spec.unflagged.iter().enumerate() {
        for fault in enumerate_faults(block) {
            out.push(CycleFault {
                segment: CycleSegment::Unflagged(j),
                fault,
            });
        }
    }
    out
}

/// Adversarial mutation for the cycle checks: reorder the data couplings of
/// the first flagged block so its fault table no longer matches the decode
/// table.
pub fn misordered_s1_cycle(toolkit: &Toolkit) -> CycleSpec {
    let mut spec = CycleSpec::standard(toolkit);
    let block = &mut spec.flagged[0];
    // swap the first two ancilla-data couplings: CX(a,d1) <-> CX(a,d2)
    let idx: Vec<usize> = block
        .locations
        .iter()
        .filter(|l| {
            matches!(&l.op, Op::Gate { gate, .. } if gate.is_two_qubit()
                && gate.qubits()[1] != circuit::FLAG)
        })
        .map(|l| l.index)
        .collect();
    let (i, j) = (idx[1], idx[2]);
    let tmp = block.locations[i].op.clone();
    block.locations[i].op = block.locations[j].op.clone();
    block.locations[j].op = tmp;
    spec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{encoding_circuit, flagged_s1_circuit, ghz_circuit};

    fn toolkit() -> Toolkit {
        Toolkit::new().unwrap()
    }

    #[test]
    fn fault_counts_by_location_kind() {
        let mut c = Circuit::new(
            2,
            "tiny",
            vec![circuit::Role::Data(1), circuit::Role::Ancilla],
        );
        c.gate(crate::gate::Gate::Cx(1, 0));
        c.measure_reset(1, "m");
        assert_eq!(enumerate_faults(&c).len(), 16);

        let empty = Circuit::new(1, "none", vec![circuit::Role::Data(1)]);
        assert!(enumerate_faults(&empty).is_empty());

        // frozen counts for the shipped circuits
        assert_eq!(
            enumerate_faults(&ghz_circuit()).len(),
            12 + 3 + 15 * 4 + 1 + 3 + 3
        );
        assert_eq!(enumerate_faults(&encoding_circuit(true)).len(), 342);
        assert_eq!(enumerate_faults(&flagged_s1_circuit(false)).len(), 101);
    }

    #[test]
    fn named_example_faults_are_rejected_the_documented_way() {
        let tk = toolkit();
        let circuit = encoding_circuit(true);
        // an XY fault (X on the ancilla, Y on the data qubit) after the
        // middle coupling of the p4 block: caught by the T1 consistency
        // check in every branch
        let p4_middle = circuit
            .locations
            .iter()
            .position(|l| {
                matches!(
                    &l.op,
                    Op::Gate {
                        gate: crate::gate::Gate::Cx(crate::circuit::ANCILLA, 1),
                        ..
                    }
                )
            })
            .unwrap();
        let mut xy = PauliString::identity(2);
        xy.set_letter(0, crate::pauli::Letter::X);
        xy.set_letter(1, crate::pauli::Letter::Y);
        let fault = Fault {
            location_index: p4_middle,
            kind: FaultKind::Pauli(xy),
        };
        for branch in 0..BRANCHES {
            let plan = branch_plan(branch);
            let (record, _) = run_encoding_with(&tk, &circuit, true, &fault, &plan).unwrap();
            assert!(!record.accepted, "branch {plan:?} accepted the p4 XY fault");
            assert!(!record.flag_raised);
            // the inconsistency is specifically in T1
            let m = |l: &str| record.outcome(l).unwrap();
            assert_ne!(m("T1"), m("p4") * m("p5"));
        }
        // an XX fault after the middle data coupling of the T2 block:
        // caught by the flag in every branch
        let t2_cy3 = circuit
            .locations
            .iter()
            .position(|l| {
                matches!(
                    &l.op,
                    Op::Gate {
                        gate: crate::gate::Gate::Cy(crate::circuit::ANCILLA, 2),
                        ..
                    }
                )
            })
            .unwrap();
        let mut xx = PauliString::identity(2);
        xx.set_letter(0, crate::pauli::Letter::X);
        xx.set_letter(1, crate::pauli::Letter::X);
        let fault = Fault {
            location_index: t2_cy3,
            kind: FaultKind::Pauli(xx),
        };
        for branch in 0..BRANCHES {
            let plan = branch_plan(branch);
            let (record, _) = run_encoding_with(&tk, &circuit, true, &fault, &plan).unwrap();
            assert!(record.flag_raised, "branch {plan:?} missed the T2 fault");
            assert!(!record.accepted);
        }
    }

    #[test]
    fn flag_qubit_errors_cannot_reach_the_data() {
        // a Z fault on the flag qubit flips nothing; an X fault on it flips
        // the flag readout but leaves no data error
        let block = flagged_s1_circuit(false);
        let first_flag_coupling = block
            .locations
            .iter()
            .position(|l| {
                matches!(&l.op, Op::Gate { gate, .. }
                    if gate.qubits() == vec![crate::circuit::ANCILLA, crate::circuit::FLAG])
            })
            .unwrap();
        for (letters, flips_flag) in [("IZ", false), ("IX", true)] {
            let err: PauliString = letters.parse().unwrap();
            let embedded = err.embedded(block.n, &block.locations[first_flag_coupling].qubits());
            let prop = circuit::propagate_error(&block, first_flag_coupling, &embedded).unwrap();
            assert_eq!(prop.flips("flag"), flips_flag, "{letters}");
            assert_eq!(prop.residual.restricted(&DATA).weight(), 0, "{letters}");
        }
    }

    #[test]
    fn ft_encoding_verification_passes() {
        let tk = toolkit();
        let report = verify_ft_encoding(&tk, &encoding_circuit(true)).unwrap();
        assert!(
            report.passed,
            "violations: {:?}",
            &report.violations[..report.violations.len().min(3)]
        );
        assert_eq!(report.total_runs, report.total_faults * 8);
    }

    #[test]
    fn non_ft_encoding_has_concrete_counterexamples() {
        let tk = toolkit();
        let report = verify_ft_encoding(&tk, &encoding_circuit(false)).unwrap();
        assert!(!report.passed);
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn dropping_the_flag_reintroduces_violations() {
        let tk = toolkit();
        let mutated = drop_flag(&encoding_circuit(true));
        let report = verify_ft_encoding(&tk, &mutated).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn flagged_s1_fault_table_reproduced() {
        let tk = toolkit();
        let report = verify_flagged_s1(&tk).unwrap();
        assert!(report.passed, "violations: {:?}", report.violations);
    }

    #[test]
    fn case_b_analysis_passes() {
        let tk = toolkit();
        let report = verify_case_b_tables(&tk).unwrap();
        assert!(report.passed, "violations: {:?}", report.violations);
    }

    #[test]
    fn cycle_ft_criteria_pass_and_mutation_fails() {
        let tk = toolkit();
        let spec = CycleSpec::standard(&tk);
        let report = verify_ft_criteria(&tk, &spec).unwrap();
        assert!(
            report.passed,
            "violations: {:?}",
            &report.violations[..report.violations.len().min(3)]
        );

        let mutated = misordered_s1_cycle(&tk);
        let report = verify_ft_criteria(&tk, &mutated).unwrap();
        assert!(!report.passed);
    }
}
