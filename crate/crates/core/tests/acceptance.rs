//! Acceptance suite: one test per criterion, each printing a pass line with
//! its measured evidence (run with `--nocapture` to see them). Every
//! tolerance is pinned here.

use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flagqec::backend::Backend;
use flagqec::circuit::{self, encoding_circuit, flagged_s1_circuit, ghz_circuit, Circuit, DATA};
use flagqec::dense::{matrix_distance_up_to_phase, unitary_of_gates, DenseState};
use flagqec::exec::{run_circuit, ExecControls};
use flagqec::faults::{
    drop_flag, misordered_s1_cycle, verify_case_b_tables, verify_flagged_s1, verify_ft_criteria,
    verify_ft_encoding,
};
use flagqec::gate::Gate;
use flagqec::metrics;
use flagqec::noise::{run_experiment, NoiseModel, ProtocolKind};
use flagqec::pauli::{PauliString, Phase};
use flagqec::protocols::{ideal_logical_minus, run_flagged_s1, CycleSpec, Policy, Toolkit};
use flagqec::tableau::StabilizerState;
use flagqec::tables::{verify_tables, DecodeTables};

fn toolkit() -> Toolkit {
    Toolkit::new().expect("toolkit builds")
}

#[test]
fn criterion_01_generated_tables_match_references() {
    let start = Instant::now();
    let tk = toolkit();
    // generation itself asserts equality with the hard-coded reference
    // tables; regenerate explicitly to make that the tested path
    let regenerated = DecodeTables::five_qubit(&tk.code).expect("tables match references");
    let report = verify_tables(&tk.code, &regenerated);
    assert!(report.passed, "table checks failed: {:?}", report.failures);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "criterion 1 runtime {elapsed:?} >= 1s"
    );
    println!("criterion 1 PASS: syndrome/flag/frame/incarnation tables reproduced ({elapsed:?})");
}

#[test]
fn criterion_02_flagged_s1_fault_table_reproduced() {
    let start = Instant::now();
    let tk = toolkit();
    let report = verify_flagged_s1(&tk).unwrap();
    assert!(
        report.passed,
        "fault-table violations: {:?}",
        report.violations
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "criterion 2 runtime {elapsed:?} >= 10s"
    );
    println!(
        "criterion 2 PASS: all fault-table rows and reductions reproduced, {} faults graded ({elapsed:?})",
        report.total_faults
    );
}

#[test]
fn criterion_03_machine_checked_ft_proof() {
    let start = Instant::now();
    let tk = toolkit();
    let ft = verify_ft_encoding(&tk, &encoding_circuit(true)).unwrap();
    assert!(
        ft.passed && ft.total_runs == ft.total_faults * 8,
        "FT encoding violations: {:?}",
        &ft.violations[..ft.violations.len().min(3)]
    );
    let non_ft = verify_ft_encoding(&tk, &encoding_circuit(false)).unwrap();
    assert!(
        !non_ft.passed && !non_ft.violations.is_empty(),
        "non-FT control found no counterexample"
    );
    let dropped = verify_ft_encoding(&tk, &drop_flag(&encoding_circuit(true))).unwrap();
    assert!(
        !dropped.passed,
        "drop-flag mutation found no counterexample"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "criterion 3 runtime {elapsed:?} >= 5min"
    );
    println!(
        "criterion 3 PASS: {} faults x 8 branches clean; non-FT {} violations; drop-flag {} ({elapsed:?})",
        ft.total_faults,
        non_ft.violations.len(),
        dropped.violations.len()
    );
}

#[test]
fn criterion_04_case_b_tables() {
    let tk = toolkit();
    let report = verify_case_b_tables(&tk).unwrap();
    assert!(report.passed, "case-b violations: {:?}", report.violations);
    println!(
        "criterion 4 PASS: X4/Z4 are the unique verification-evading errors; {} preparation faults x 8 branches reach neither ({} runs)",
        report.total_faults, report.total_runs
    );
}

#[test]
fn criterion_05_worked_y_fault_example() {
    let tk = toolkit();
    // tableau route: recorded outcomes and residual classification
    let input: StabilizerState = ideal_logical_minus(&tk, 7).unwrap();
    let (record, after) = run_flagged_s1(input, true, None, None, 3).unwrap();
    assert!(record.flag_raised, "flag must be raised");
    let syndrome: Vec<i8> = tk
        .code
        .stabilizers
        .iter()
        .map(|s| after.expectation_sign(&tk.on_register(s, 7)).unwrap())
        .collect();
    assert_eq!(syndrome, vec![1, -1, -1, -1]);
    // dense route: the post-measurement data state is exactly Y3Y5 |->_L
    let dense_in: DenseState = ideal_logical_minus(&tk, 7).unwrap();
    let (_, dense_after) = run_flagged_s1(dense_in, true, None, None, 7).unwrap();
    let data = dense_after.leading_substate(5).unwrap();
    let y3y5 = PauliString::from_compact(5, "Y3Y5").unwrap();
    let target = {
        let mut t = metrics::ideal_minus_dense(&tk.code).unwrap();
        t.apply_pauli(&y3y5).unwrap();
        t
    };
    assert!(
        (data.fidelity(&target) - 1.0).abs() < 1e-12,
        "residual is not Y3Y5"
    );
    // flag-conditioned fidelities of the faulted state
    let expect1 = |op: &PauliString| data.expectation(op).unwrap();
    let f1_no = metrics::logical_fidelity(expect1);
    let f1_flag = metrics::logical_fidelity_raised(expect1);
    assert!(f1_no.abs() < 1e-12, "F_L^not-raised = {f1_no}, want 0");
    assert!(
        (f1_flag - 1.0).abs() < 1e-12,
        "F_L^raised = {f1_flag}, want 1"
    );
    // clean run endpoints
    let clean_in: DenseState = ideal_logical_minus(&tk, 7).unwrap();
    let (clean_rec, clean_after) = run_flagged_s1(clean_in, false, None, None, 7).unwrap();
    assert!(!clean_rec.flag_raised);
    let clean = clean_after.leading_substate(5).unwrap();
    let expect0 = |op: &PauliString| clean.expectation(op).unwrap();
    let f0_no = metrics::logical_fidelity(expect0);
    let f0_flag = metrics::logical_fidelity_raised(expect0);
    assert!((f0_no - 1.0).abs() < 1e-12);
    // interpolation in the injection probability: the mixture's
    // expectations are linear, so the closed form evaluated on the mixture
    // equals the two-point interpolation to machine precision
    for pe in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
        let mix_no = metrics::logical_fidelity(|op| (1.0 - pe) * expect0(op) + pe * expect1(op));
        let interp_no = metrics::fidelity_vs_pe(pe, f0_no, f1_no);
        assert!(
            (mix_no - interp_no).abs() < 1e-12,
            "no-flag linearity at pe={pe}"
        );
        let mix_flag =
            metrics::logical_fidelity_raised(|op| (1.0 - pe) * expect0(op) + pe * expect1(op));
        let interp_flag = metrics::fidelity_vs_pe(pe, f0_flag, f1_flag);
        assert!(
            (mix_flag - interp_flag).abs() < 1e-12,
            "raised linearity at pe={pe}"
        );
    }
    // qualitative endpoints: ignoring the flag the fidelity collapses to 0
    // (below 0.5); using it the fidelity is fully recovered
    let without_flag_at_1 = metrics::fidelity_vs_pe(1.0, f0_no, f1_no);
    assert!(without_flag_at_1 < 0.5 && without_flag_at_1.abs() < 1e-12);
    let with_flag_at_1 = metrics::combined_fidelity(1.0, f1_flag, f1_no);
    assert!((with_flag_at_1 - 1.0).abs() < 1e-12);
    println!(
        "criterion 5 PASS: Y fault -> Y3Y5, syndrome [+ - - -], flag raised; F(no flag)=0, F(flag)=1, interpolation linear to 1e-12"
    );
}

#[test]
fn criterion_06_cycle_ft_criteria() {
    let start = Instant::now();
    let tk = toolkit();
    let report = verify_ft_criteria(&tk, &CycleSpec::standard(&tk)).unwrap();
    assert!(
        report.passed,
        "cycle violations: {:?}",
        &report.violations[..report.violations.len().min(3)]
    );
    let mutated = verify_ft_criteria(&tk, &misordered_s1_cycle(&tk)).unwrap();
    assert!(!mutated.passed, "misordered-s1 mutation found no violation");
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 900.0,
        "criterion 6 runtime {elapsed:?} >= 15min"
    );
    println!(
        "criterion 6 PASS: criteria 1-3 exhaustive over {} faults ({} runs); misordered control has {} violations ({elapsed:?})",
        report.total_faults,
        report.total_runs,
        mutated.violations.len()
    );
}

fn compare_backends_on(
    circuit: &Circuit,
    plan: &[i8],
    probes: &[PauliString],
) -> (Vec<i8>, Vec<i8>) {
    let controls = ExecControls::with_plan(plan);
    let mut rng_t = ChaCha8Rng::seed_from_u64(1);
    let mut tab = StabilizerState::init(circuit.n);
    let trace_t = run_circuit(&mut tab, circuit, &controls, &mut rng_t).unwrap();
    let controls = ExecControls::with_plan(plan);
    let mut rng_d = ChaCha8Rng::seed_from_u64(1);
    let mut den = DenseState::init(circuit.n);
    let trace_d = run_circuit(&mut den, circuit, &controls, &mut rng_d).unwrap();
    assert!(
        (trace_t.branch_probability - trace_d.branch_probability).abs() < 1e-10,
        "{}: branch probability {} vs {}",
        circuit.name,
        trace_t.branch_probability,
        trace_d.branch_probability
    );
    let rec_t: Vec<i8> = trace_t.outcomes.iter().map(|o| o.recorded).collect();
    let rec_d: Vec<i8> = trace_d.outcomes.iter().map(|o| o.recorded).collect();
    for p in probes {
        let et = tab.expectation_real(p).unwrap();
        let ed = den.expectation_real(p).unwrap();
        assert!(
            (et - ed).abs() < 1e-10,
            "{}: expectation of {p} differs: {et} vs {ed}",
            circuit.name
        );
    }
    (rec_t, rec_d)
}

#[test]
fn criterion_07_backend_equivalence() {
    let tk = toolkit();
    // probes: the 31 nontrivial encoded-state group operators plus the
    // stabilizers, embedded on the 7-qubit register
    let probes7: Vec<PauliString> = tk
        .code
        .minus_state_group()
        .iter()
        .chain(tk.code.stabilizers.iter())
        .map(|p| p.embedded(7, &DATA).with_phase(Phase::ONE))
        .collect();
    let probes6: Vec<PauliString> = probes7
        .iter()
        .map(|p| p.restricted(&[0, 1, 2, 3, 4, 5]))
        .collect();
    let probes5: Vec<PauliString> = (0..5)
        .flat_map(|q| {
            "XZ".chars().map(move |c| {
                PauliString::single(5, q, flagqec::pauli::Letter::from_char(c).unwrap())
            })
        })
        .collect();

    // every protocol circuit, every preparation branch
    for branch in 0..8u8 {
        let plan: Vec<i8> = (0..3)
            .map(|b| if branch >> b & 1 == 1 { -1 } else { 1 })
            .collect();
        let (t, d) = compare_backends_on(&encoding_circuit(true), &plan, &probes7);
        assert_eq!(t, d);
        let (t, d) = compare_backends_on(&encoding_circuit(false), &plan, &probes6);
        assert_eq!(t, d);
    }
    for forced in [1i8, -1] {
        let (t, d) = compare_backends_on(&ghz_circuit(), &[forced], &probes5);
        assert_eq!(t, d);
    }
    for inject in [false, true] {
        // the flagged measurement runs on the encoded input
        let controls = ExecControls::clean();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut tab: StabilizerState = ideal_logical_minus(&tk, 7).unwrap();
        let mut den: DenseState = ideal_logical_minus(&tk, 7).unwrap();
        let circ = flagged_s1_circuit(inject);
        let trace_t = run_circuit(&mut tab, &circ, &controls, &mut rng).unwrap();
        let controls = ExecControls::clean();
        let trace_d = run_circuit(&mut den, &circ, &controls, &mut rng).unwrap();
        let rec_t: Vec<i8> = trace_t.outcomes.iter().map(|o| o.recorded).collect();
        let rec_d: Vec<i8> = trace_d.outcomes.iter().map(|o| o.recorded).collect();
        assert_eq!(rec_t, rec_d);
        for p in &probes7 {
            let et = tab.expectation_real(p).unwrap();
            let ed = den.expectation_real(p).unwrap();
            assert!((et - ed).abs() < 1e-10, "flagged-s1 expectation of {p}");
        }
    }

    // 500 random Clifford circuits on up to 7 qubits, driven in lockstep
    let mut rng = ChaCha8Rng::seed_from_u64(0xC11FF0D);
    for round in 0..500 {
        let n = rng.random_range(2..=7usize);
        let mut tab = StabilizerState::init(n);
        let mut den = DenseState::init(n);
        let mut mrng_t = ChaCha8Rng::seed_from_u64(9);
        let mut mrng_d = ChaCha8Rng::seed_from_u64(9);
        let ops = rng.random_range(20..60usize);
        for _ in 0..ops {
            if rng.random::<f64>() < 0.15 {
                // measure a random Hermitian Pauli on both backends with a
                // shared forced branch when the outcome is free
                let p = random_pauli(n, &mut rng);
                let forced = if tab.expectation_sign(&p).unwrap() == 0 {
                    Some(if rng.random::<bool>() { 1 } else { -1 })
                } else {
                    None
                };
                let mt = Backend::measure_pauli(&mut tab, &p, forced, &mut mrng_t).unwrap();
                let md = Backend::measure_pauli(&mut den, &p, forced, &mut mrng_d).unwrap();
                assert_eq!(mt.value, md.value, "round {round}: outcome of {p}");
                assert_eq!(mt.deterministic, md.deterministic, "round {round}: {p}");
            } else {
                let g = random_gate(n, &mut rng);
                tab.apply_gate(&g).unwrap();
                den.apply_gate(&g).unwrap();
            }
        }
        for _ in 0..30 {
            let p = random_pauli(n, &mut rng);
            let et = tab.expectation_real(&p).unwrap();
            let ed = den.expectation_real(&p).unwrap();
            assert!((et - ed).abs() < 1e-10, "round {round}: expectation of {p}");
        }
    }
    println!(
        "criterion 7 PASS: tableau and dense agree on all protocol branches and 500 random Clifford circuits (<= 1e-10)"
    );
}

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    loop {
        let x = rng.random_range(0..1u64 << n);
        let z = rng.random_range(0..1u64 << n);
        if x != 0 || z != 0 {
            let phase = if rng.random::<bool>() {
                Phase::ONE
            } else {
                Phase::MINUS_ONE
            };
            return PauliString::from_xz(n, x, z, phase);
        }
    }
}

fn random_gate(n: usize, rng: &mut ChaCha8Rng) -> Gate {
    let q = rng.random_range(0..n);
    let mut t = rng.random_range(0..n);
    while t == q && n > 1 {
        t = rng.random_range(0..n);
    }
    match rng.random_range(0..15u32) {
        0 => Gate::H(q),
        1 => Gate::S(q),
        2 => Gate::Sdg(q),
        3 => Gate::X(q),
        4 => Gate::Y(q),
        5 => Gate::Z(q),
        6 => Gate::SqrtX(q),
        7 => Gate::SqrtXdg(q),
        8 => Gate::SqrtY(q),
        9 => Gate::SqrtYdg(q),
        10 => Gate::Cx(q, t),
        11 => Gate::Cy(q, t),
        12 => Gate::Cz(q, t),
        13 => Gate::CrxPlus(q, t),
        _ => Gate::CrxMinus(q, t),
    }
}

#[test]
fn criterion_08_metric_self_consistency() {
    let tk = toolkit();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for round in 0..100 {
        let st = random_dense_state(5, &mut rng);
        let expect = |op: &PauliString| st.expectation(op).unwrap();
        let cf = metrics::logical_fidelity(expect);
        let ps = metrics::logical_fidelity_projector(&st, &tk.code).unwrap();
        assert!(
            (cf - ps).abs() < 1e-10,
            "round {round}: standard {cf} vs {ps}"
        );
        let cf = metrics::logical_fidelity_raised(expect);
        let ps = metrics::logical_fidelity_raised_projector(&st, &tk.code).unwrap();
        assert!(
            (cf - ps).abs() < 1e-10,
            "round {round}: raised {cf} vs {ps}"
        );
        // the 32 coset projectors resolve the identity
        let (a, b, c, d) = metrics::overlap_distribution(&st, &tk.code).unwrap();
        assert!(
            (a + b + c + d - 1.0).abs() < 1e-10,
            "round {round}: completeness"
        );
    }
    // pairwise orthogonality of the 32 coset states
    let minus = metrics::ideal_minus_dense(&tk.code).unwrap();
    let mut states = Vec::new();
    for plus in [false, true] {
        for e in flagqec::tables::single_qubit_errors() {
            let mut s = minus.clone();
            if plus {
                s.apply_pauli(&tk.code.logical_z).unwrap();
            }
            s.apply_pauli(&e).unwrap();
            states.push(s);
        }
    }
    for i in 0..32 {
        for j in 0..32 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((states[i].inner(&states[j]).norm() - want).abs() < 1e-10);
        }
    }
    println!(
        "criterion 8 PASS: closed forms equal projector sums on 100 random states; 32 coset projectors orthonormal and complete"
    );
}

fn random_dense_state(n: usize, rng: &mut ChaCha8Rng) -> DenseState {
    use num_complex::Complex64;
    let mut st = DenseState::init(n);
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    st.set_amplitudes(amps);
    st
}

#[test]
fn criterion_09_compiler_equivalence() {
    let tk = toolkit();
    let mut circuits = vec![
        ghz_circuit(),
        encoding_circuit(false),
        encoding_circuit(true),
        flagged_s1_circuit(false),
        flagged_s1_circuit(true),
    ];
    circuits.extend(tk.flagged_blocks.iter().cloned());
    circuits.extend(tk.unflagged_blocks.iter().cloned());
    let mut max_d: f64 = 0.0;
    for src in &circuits {
        let compiled = circuit::compile_to_native(src).unwrap();
        let s_seg = circuit::unitary_segments(src);
        let c_seg = circuit::unitary_segments(&compiled);
        assert_eq!(s_seg.len(), c_seg.len(), "{}: segment count", src.name);
        for (s, c) in s_seg.iter().zip(&c_seg) {
            let d = matrix_distance_up_to_phase(
                &unitary_of_gates(src.n, s).unwrap(),
                &unitary_of_gates(src.n, c).unwrap(),
            );
            assert!(d < 1e-10, "{}: segment distance {d}", src.name);
            max_d = max_d.max(d);
        }
    }
    println!(
        "criterion 9 PASS: {} protocol circuits compile to unitarily equivalent native form (max segment distance {max_d:.2e})",
        circuits.len()
    );
}

#[test]
fn criterion_10_monte_carlo_separation() {
    let start = Instant::now();
    let tk = toolkit();
    let nm = NoiseModel {
        p2: 1e-3,
        p1: 1e-4,
        p_idle: 1e-4,
        ..NoiseModel::zero()
    };
    let shots = 120_000;
    let ft = run_experiment(
        &tk,
        ProtocolKind::Encoding {
            ft: true,
            policy: Policy::General,
        },
        &nm,
        shots,
        0xACCE97,
    )
    .unwrap();
    let non_ft = run_experiment(
        &tk,
        ProtocolKind::Encoding {
            ft: false,
            policy: Policy::General,
        },
        &nm,
        shots,
        0xACCE97,
    )
    .unwrap();
    assert!(
        ft.accepted_shots >= 100_000,
        "ft accepted {}",
        ft.accepted_shots
    );
    assert!(
        non_ft.accepted_shots >= 100_000,
        "non-ft accepted {}",
        non_ft.accepted_shots
    );
    let e_ft = 1.0 - ft.fidelity.f_l;
    let e_non = 1.0 - non_ft.fidelity.f_l;
    let var = |e: f64, n: usize| e.max(1.0 / n as f64) * (1.0 - e) / n as f64;
    let sigma = (var(e_ft, ft.accepted_shots) + var(e_non, non_ft.accepted_shots)).sqrt();
    let separation = (e_non - e_ft) / sigma;
    assert!(
        e_ft < e_non && separation >= 5.0,
        "logical error rates: ft {e_ft:.2e} vs non-ft {e_non:.2e} ({separation:.1} sigma)"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "criterion 10 runtime {elapsed:?} >= 10min"
    );
    println!(
        "criterion 10 PASS: logical error rate ft {e_ft:.2e} < non-ft {e_non:.2e}, separation {separation:.1} sigma ({} vs {} accepted shots, {elapsed:?})",
        ft.accepted_shots, non_ft.accepted_shots
    );
}
