//! Circuit executor: walks locations on a backend, injecting faults and
//! stochastic noise, forcing selected measurement branches, and recording
//! outcomes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::backend::Backend;
use crate::circuit::{Circuit, Op};
use crate::faults::{Fault, FaultKind};
use crate::gate::Gate;
use crate::noise::NoiseModel;
use crate::pauli::{Letter, PauliString, Phase};
use crate::tableau::Basis;
use crate::{Error, Result};

/// One recorded measurement.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct OutcomeRecord {
    pub label: String,
    /// The classically recorded value (including readout misassignment and
    /// outcome-flip faults).
    pub recorded: i8,
    /// The value the state actually projected onto.
    pub actual: i8,
    pub deterministic: bool,
}

#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct ExecTrace {
    pub outcomes: Vec<OutcomeRecord>,
    /// Product of Born probabilities of the realized branch.
    pub branch_probability: f64,
}

impl ExecTrace {
    pub fn recorded(&self, label: &str) -> Option<i8> {
        self.outcomes
            .iter()
            .rev()
            .find(|o| o.label == label)
            .map(|o| o.recorded)
    }

    pub fn recorded_or(&self, label: &str, default: i8) -> i8 {
        self.recorded(label).unwrap_or(default)
    }
}

/// Execution controls: a single injected fault, an optional stochastic
/// noise model, and a plan of forced outcomes consumed by measurements
/// whose result is not determined by the state.
pub struct ExecControls<'a> {
    pub fault: Option<&'a Fault>,
    pub noise: Option<&'a NoiseModel>,
    pub forced_random: &'a [i8],
}

impl ExecControls<'_> {
    pub fn clean() -> ExecControls<'static> {
        ExecControls {
            fault: None,
            noise: None,
            forced_random: &[],
        }
    }

    pub fn with_fault(fault: &Fault) -> ExecControls<'_> {
        ExecControls {
            fault: Some(fault),
            noise: None,
            forced_random: &[],
        }
    }

    pub fn with_plan(plan: &[i8]) -> ExecControls<'_> {
        ExecControls {
            fault: None,
            noise: None,
            forced_random: plan,
        }
    }
}

fn orthogonal_flip(basis: Basis) -> Letter {
    match basis {
        Basis::Zero | Basis::One => Letter::X,
        _ => Letter::Z,
    }
}

fn random_pauli_on(n: usize, qubits: &[usize], rng: &mut ChaCha8Rng) -> PauliString {
    // uniform over the non-identity Paulis of the location's arity
    let count: u32 = 4u32.pow(qubits.len() as u32) - 1;
    let pick = rng.random_range(1..=count);
    let mut p = PauliString::identity(n);
    let mut v = pick;
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
}

/// Run `circuit` on `backend`, resuming from its current state.
pub fn run_circuit<B: Backend>(
    backend: &mut B,
    circuit: &Circuit,
    controls: &ExecControls,
    rng: &mut ChaCha8Rng,
) -> Result<ExecTrace> {
    let n = circuit.n;
    if backend.num_qubits() != n {
        return Err(Error::DimensionMismatch(backend.num_qubits(), n));
    }
    let mut trace = ExecTrace {
        outcomes: Vec::new(),
        branch_probability: 1.0,
    };
    let mut plan = controls.forced_random.iter().copied();
    for loc in &circuit.locations {
        let fault_here = controls.fault.filter(|f| f.location_index == loc.index);
        match &loc.op {
            Op::Prepare { qubit, basis } => {
                backend.prepare(*qubit, *basis)?;
                if let Some(nm) = controls.noise {
                    if nm.p_prep > 0.0 && rng.random::<f64>() < nm.p_prep {
                        let flip = PauliString::single(n, *qubit, orthogonal_flip(*basis));
                        backend.apply_pauli(&flip)?;
                    }
                }
            }
            Op::Gate { gate, condition } => {
                let fire = match condition {
                    None => true,
                    Some(c) => trace.recorded(&c.label).is_some_and(|m| m == c.outcome),
                };
                if fire {
                    backend.apply_gate(gate)?;
                    if let Some(nm) = controls.noise {
                        let rate = if gate.is_two_qubit() { nm.p2 } else { nm.p1 };
                        if rate > 0.0 && rng.random::<f64>() < rate {
                            backend.apply_pauli(&random_pauli_on(n, &gate.qubits(), rng))?;
                        }
                    }
                }
            }
            Op::Idle { qubit } => {
                if let Some(nm) = controls.noise {
                    if nm.p_idle > 0.0 && rng.random::<f64>() < nm.p_idle {
                        backend.apply_pauli(&random_pauli_on(n, &[*qubit], rng))?;
                    }
                }
            }
            Op::MeasureReset { qubit, label } => {
                let z = PauliString::single(n, *qubit, Letter::Z);
                // force only measurements that are actually random; the
                // plan never contradicts a determined outcome
                let forced = if backend.expectation_sign(&z)? == 0 {
                    plan.next()
                } else {
                    None
                };
                let m = backend.measure_z(*qubit, forced, rng)?;
                trace.branch_probability *= m.probability;
                if m.value < 0 {
                    backend.apply_gate(&Gate::X(*qubit))?;
                }
                let mut recorded = m.value;
                if let Some(f) = fault_here {
                    if matches!(f.kind, FaultKind::OutcomeFlip) {
                        recorded = -recorded;
                    }
                }
                if let Some(nm) = controls.noise {
                    let eps = if m.value > 0 { nm.eps0 } else { nm.eps1 };
                    if eps > 0.0 && rng.random::<f64>() < eps {
                        recorded = -recorded;
                    }
                    if nm.p_reset_flip > 0.0 && rng.random::<f64>() < nm.p_reset_flip {
                        backend.apply_pauli(&PauliString::single(n, *qubit, Letter::X))?;
                    }
                }
                trace.outcomes.push(OutcomeRecord {
                    label: label.clone(),
                    recorded,
                    actual: m.value,
                    deterministic: m.deterministic,
                });
            }
        }
        if let Some(f) = fault_here {
            if let FaultKind::Pauli(err) = &f.kind {
                let full = err.embedded(n, &loc.qubits()).with_phase(Phase::ONE);
                if full.is_identity_letters() {
                    return Err(Error::InvalidFault);
                }
                backend.apply_pauli(&full)?;
            }
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ghz_circuit;
    use crate::dense::DenseState;
    use crate::tableau::StabilizerState;
    use rand_chacha::rand_core::SeedableRng;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn ghz_feedforward_yields_psi_plus_on_both_backends_and_branches() {
        let circuit = ghz_circuit();
        for forced in [1i8, -1] {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let mut tab = StabilizerState::init(5);
            let plan = [forced];
            let controls = ExecControls::with_plan(&plan);
            let trace = run_circuit(&mut tab, &circuit, &controls, &mut rng).unwrap();
            assert_eq!(trace.recorded("XXXX"), Some(forced));
            // after feedforward the output is |Psi_+> regardless of branch
            for op in ["XXXXI", "ZZIII", "IZZII", "IIZZI"] {
                assert_eq!(
                    tab.expectation(&ps(op)).unwrap(),
                    1,
                    "{op} in branch {forced}"
                );
            }
            // dense agrees
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let mut den = DenseState::init(5);
            let trace_d = run_circuit(&mut den, &circuit, &controls, &mut rng).unwrap();
            assert_eq!(trace_d.recorded("XXXX"), Some(forced));
            assert!((trace_d.branch_probability - 0.5).abs() < 1e-12);
            for op in ["XXXXI", "ZZIII", "IZZII", "IIZZI"] {
                assert!((DenseState::expectation(&den, &ps(op)).unwrap() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        // enumerate every forced branch of circuits with up to three random
        // measurements on the dense oracle
        let ghz = ghz_circuit();
        let mut total = 0.0;
        for forced in [1i8, -1] {
            let plan = [forced];
            let mut den = DenseState::init(5);
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let trace =
                run_circuit(&mut den, &ghz, &ExecControls::with_plan(&plan), &mut rng).unwrap();
            total += trace.branch_probability;
        }
        assert!((total - 1.0).abs() < 1e-12);

        let prep = crate::circuit::encoding_circuit(false);
        let mut total = 0.0;
        for branch in 0..8u8 {
            let plan: Vec<i8> = (0..3)
                .map(|b| if branch >> b & 1 == 1 { -1 } else { 1 })
                .collect();
            let mut den = DenseState::init(6);
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let trace =
                run_circuit(&mut den, &prep, &ExecControls::with_plan(&plan), &mut rng).unwrap();
            assert!((trace.branch_probability - 0.125).abs() < 1e-12);
            total += trace.branch_probability;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compiled_circuits_are_observationally_equivalent_on_the_oracle() {
        // branch-by-branch comparison of source and native-compiled
        // circuits: identical outcomes, branch probabilities and final
        // states
        for (circuit, plans) in [
            (ghz_circuit(), vec![vec![1i8], vec![-1]]),
            (
                crate::circuit::encoding_circuit(true),
                (0..8u8)
                    .map(|b| {
                        (0..3)
                            .map(|i| if b >> i & 1 == 1 { -1 } else { 1 })
                            .collect()
                    })
                    .collect(),
            ),
        ] {
            let compiled = crate::circuit::compile_to_native(&circuit).unwrap();
            for plan in &plans {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                let mut src = DenseState::init(circuit.n);
                let ts = run_circuit(&mut src, &circuit, &ExecControls::with_plan(plan), &mut rng)
                    .unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                let mut cmp = DenseState::init(circuit.n);
                let tc = run_circuit(
                    &mut cmp,
                    &compiled,
                    &ExecControls::with_plan(plan),
                    &mut rng,
                )
                .unwrap();
                let os: Vec<i8> = ts.outcomes.iter().map(|o| o.recorded).collect();
                let oc: Vec<i8> = tc.outcomes.iter().map(|o| o.recorded).collect();
                assert_eq!(os, oc, "{} branch {plan:?}", circuit.name);
                assert!(
                    (ts.branch_probability - tc.branch_probability).abs() < 1e-12,
                    "{} branch {plan:?}",
                    circuit.name
                );
                assert!(
                    (src.fidelity(&cmp) - 1.0).abs() < 1e-10,
                    "{} branch {plan:?}: post-states differ",
                    circuit.name
                );
            }
        }
    }

    #[test]
    fn identity_fault_is_rejected() {
        let circuit = ghz_circuit();
        let gate_loc = circuit
            .locations
            .iter()
            .position(|l| matches!(l.op, Op::Gate { .. }))
            .unwrap();
        let fault =
            Fault { location_index: gate_loc, kind: FaultKind::Pauli(PauliString::identity(1)) };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut tab = StabilizerState::init(5);
        let err = run_circuit(&mut tab, &circuit, &ExecControls::with_fault(&fault), &mut rng);
        assert!(matches!(err, Err(crate::Error::InvalidFault)));
    }

    #[test]
    fn outcome_flip_fault_changes_record_not_state() {
        let circuit = ghz_circuit();
        let meas_index = circuit
            .locations
            .iter()
            .position(|l| matches!(l.op, Op::MeasureReset { .. }))
            .unwrap();
        let fault = Fault {
            location_index: meas_index,
            kind: FaultKind::OutcomeFlip,
        };
        let plan = [1i8];
        let controls = ExecControls {
            fault: Some(&fault),
            noise: None,
            forced_random: &plan,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut tab = StabilizerState::init(5);
        let trace = run_circuit(&mut tab, &circuit, &controls, &mut rng).unwrap();
        let rec = &trace.outcomes[0];
        assert_eq!(rec.actual, 1);
        assert_eq!(rec.recorded, -1);
        // the wrong record triggers the feedforward Z, flipping the GHZ sign
        assert_eq!(tab.expectation(&ps("XXXXI")).unwrap(), -1);
    }
}
