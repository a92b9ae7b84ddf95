//! Logical state fidelity and error-distribution metrics.
//!
//! The logical fidelity of a prepared state is the probability that it
//! carries at most a single-qubit error on the target logical state, i.e.
//! that a round of perfect error correction would succeed. Two routes are
//! implemented: the closed-form 16-term expectation expansions (the
//! contract) and direct projector sums over the correctable-error sets on
//! the dense oracle (the cross-check).

use serde::{Deserialize, Serialize};

use crate::backend::Backend;
use crate::dense::DenseState;
use crate::pauli::{PauliString, Phase};
use crate::tables::{single_qubit_errors, CodeDefinition};
use crate::Result;

/// The 16 operators of the closed-form logical-fidelity expansion, all with
/// coefficient +1/8 on top of the constant 1/2.
pub const FIDELITY_OPERATORS: [&str; 16] = [
    "IZXZI", "ZIIZX", "XZIIZ", "ZXZII", "IIZXZ", "YIXIY", "IYYIX", "XIYYI", "IXIYY", "YYIXI",
    "ZZYXY", "YXYZZ", "ZYXYZ", "XYZZY", "YZZYX", "XXXXX",
];

/// The raised-flag fidelity expansion: (coefficient/32, operator) terms on
/// top of the constant 1/2.
pub const FIDELITY_RAISED_TERMS: [(i32, &str); 16] = [
    (6, "IIZXZ"),
    (6, "ZXZII"),
    (6, "YYIXI"),
    (-2, "ZIIZX"),
    (6, "IXIYY"),
    (2, "YZZYX"),
    (2, "XYZZY"),
    (-2, "IZXZI"),
    (2, "ZYXYZ"),
    (6, "XIYYI"),
    (2, "YXYZZ"),
    (2, "ZZYXY"),
    (6, "IYYIX"),
    (-2, "YIXIY"),
    (2, "XXXXX"),
    (-2, "XZIIZ"),
];

/// The raised-flag correctable error set.
pub const RAISED_FLAG_ERRORS: [&str; 16] = [
    "I", "X1", "X3Y5", "Z1", "X2", "Y2", "Z3Y5", "X1Y2", "Y3", "Z3", "X4", "Y4", "Y3Y5", "X5",
    "Y5", "X1Z2",
];

/// Closed-form logical fidelity with the |->_L target: one half plus one
/// eighth of the sum of the 16 expectation values.
pub fn logical_fidelity(expect: impl Fn(&PauliString) -> f64) -> f64 {
    let sum: f64 = FIDELITY_OPERATORS
        .iter()
        .map(|s| expect(&s.parse().unwrap()))
        .sum();
    0.5 + sum / 8.0
}

/// Closed-form logical fidelity conditioned on a raised flag.
pub fn logical_fidelity_raised(expect: impl Fn(&PauliString) -> f64) -> f64 {
    let sum: f64 = FIDELITY_RAISED_TERMS
        .iter()
        .map(|(c, s)| f64::from(*c) * expect(&s.parse().unwrap()))
        .sum();
    0.5 + sum / 32.0
}

/// Weighted combination of the flag-conditioned fidelities.
pub fn combined_fidelity(p_flag: f64, f_raised: f64, f_not_raised: f64) -> f64 {
    p_flag * f_raised + (1.0 - p_flag) * f_not_raised
}

/// Linear interpolation of the fidelity in the error-injection probability.
pub fn fidelity_vs_pe(pe: f64, f0: f64, f1: f64) -> f64 {
    (1.0 - pe) * f0 + pe * f1
}

/// GHZ state fidelity from the 15 nontrivial stabilizer-group expectation
/// values of the target state.
pub fn ghz_fidelity(expect: impl Fn(&PauliString) -> f64) -> f64 {
    let gens: [PauliString; 4] = ["XXXX", "ZZII", "IZZI", "IIZZ"].map(|s| s.parse().unwrap());
    let mut sum = 0.0;
    for bits in 1..16usize {
        let mut op = PauliString::identity(4);
        for (i, g) in gens.iter().enumerate() {
            if bits >> i & 1 == 1 {
                op = op.multiply(g).unwrap();
            }
        }
        sum += expect(&op);
    }
    (1.0 + sum) / 16.0
}

/// The exact |->_L state on five qubits (dense oracle route).
pub fn ideal_minus_dense(code: &CodeDefinition) -> Result<DenseState> {
    let mut st = DenseState::init(5);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    use rand_chacha::rand_core::SeedableRng;
    st.prepare(2, crate::tableau::Basis::Plus)?;
    st.prepare(4, crate::tableau::Basis::Plus)?;
    for p in &code.minus_x_generators[2..] {
        st.measure_pauli(p, Some(1), &mut rng)?;
    }
    Ok(st)
}

/// |alpha>_L with an error applied: E|->_L or E|+>_L.
pub fn coset_state(code: &CodeDefinition, error: &PauliString, plus: bool) -> Result<DenseState> {
    let mut st = ideal_minus_dense(code)?;
    if plus {
        // Z_L maps |->_L to |+>_L up to phase
        st.apply_pauli(&code.logical_z)?;
    }
    st.apply_pauli(&error.with_phase(Phase::ONE))?;
    Ok(st)
}

/// Projector-sum oracle: sum of |<psi| E |target>|^2 over an error set.
pub fn projector_sum_fidelity(
    state: &DenseState,
    target: &DenseState,
    errors: &[PauliString],
) -> f64 {
    errors
        .iter()
        .map(|e| {
            let mut shifted = target.clone();
            shifted.apply_pauli(e).expect("error applies");
            state.inner(&shifted).norm_sqr()
        })
        .sum()
}

/// Projector-sum route for the standard correctable set (identity plus all
/// single-qubit errors).
pub fn logical_fidelity_projector(state: &DenseState, code: &CodeDefinition) -> Result<f64> {
    let target = ideal_minus_dense(code)?;
    Ok(projector_sum_fidelity(
        state,
        &target,
        &single_qubit_errors(),
    ))
}

/// Projector-sum route for the raised-flag correctable set.
pub fn logical_fidelity_raised_projector(state: &DenseState, code: &CodeDefinition) -> Result<f64> {
    let target = ideal_minus_dense(code)?;
    let errors: Vec<PauliString> = RAISED_FLAG_ERRORS
        .iter()
        .map(|s| PauliString::from_compact(5, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(projector_sum_fidelity(state, &target, &errors))
}

/// Overlap distribution of a five-qubit state over the 32 coset basis
/// states: (P0-, P1-, P0+, P1+). P1 sums the 15 single-qubit-error
/// overlaps.
pub fn overlap_distribution(
    state: &DenseState,
    code: &CodeDefinition,
) -> Result<(f64, f64, f64, f64)> {
    let minus = ideal_minus_dense(code)?;
    let mut plus = minus.clone();
    plus.apply_pauli(&code.logical_z)?;
    let overlap = |target: &DenseState, e: &PauliString| -> f64 {
        let mut shifted = target.clone();
        shifted.apply_pauli(e).expect("error applies");
        state.inner(&shifted).norm_sqr()
    };
    let errors = single_qubit_errors();
    let p0_minus = overlap(&minus, &errors[0]);
    let p1_minus: f64 = errors[1..].iter().map(|e| overlap(&minus, e)).sum();
    let p0_plus = overlap(&plus, &errors[0]);
    let p1_plus: f64 = errors[1..].iter().map(|e| overlap(&plus, e)).sum();
    Ok((p0_minus, p1_minus, p0_plus, p1_plus))
}

/// Monte Carlo estimate from per-shot success indicators: (mean, standard
/// error).
pub fn mc_fidelity(successes: &[bool]) -> (f64, f64) {
    if successes.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = successes.len() as f64;
    let mean = successes.iter().filter(|s| **s).count() as f64 / n;
    let stderr = (mean * (1.0 - mean) / n).sqrt();
    (mean, stderr)
}

/// Fidelity metrics of one configuration, with the evaluation mode that
/// produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FidelityReport {
    pub f_l: f64,
    pub f_l_raised: Option<f64>,
    pub f_l_not_raised: Option<f64>,
    pub p_flag: f64,
    pub p0_minus: Option<f64>,
    pub p1_minus: Option<f64>,
    pub p0_plus: Option<f64>,
    pub p1_plus: Option<f64>,
    pub mode: FidelityMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FidelityMode {
    ExactDense,
    TableauExact,
    McEstimate { shots: usize, stderr: f64 },
}

/// Expectation closure over the data qubits of a dense register state
/// (the five-qubit operators are embedded at qubits 0..4).
pub fn dense_data_expectation(state: &DenseState) -> impl Fn(&PauliString) -> f64 + '_ {
    move |op: &PauliString| {
        let full = op.embedded(state.num_qubits(), &crate::circuit::DATA);
        state.expectation(&full).expect("expectation")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Letter;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn code() -> CodeDefinition {
        CodeDefinition::five_qubit()
    }

    fn expect_on(state: &DenseState) -> impl Fn(&PauliString) -> f64 + '_ {
        move |op| state.expectation(op).unwrap()
    }

    #[test]
    fn ideal_state_has_unit_fidelity_both_routes() {
        let code = code();
        let minus = ideal_minus_dense(&code).unwrap();
        assert!((logical_fidelity(expect_on(&minus)) - 1.0).abs() < 1e-12);
        assert!((logical_fidelity_projector(&minus, &code).unwrap() - 1.0).abs() < 1e-12);
        assert!((logical_fidelity_raised(expect_on(&minus)) - 1.0).abs() < 1e-12);
        // the logically flipped state scores zero
        let plus = coset_state(&code, &PauliString::identity(5), true).unwrap();
        assert!(logical_fidelity(expect_on(&plus)).abs() < 1e-12);
        // a single-qubit error still counts as success
        let x1 = coset_state(&code, &PauliString::single(5, 0, Letter::X), false).unwrap();
        assert!((logical_fidelity(expect_on(&x1)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn raised_flag_set_examples() {
        let code = code();
        let y3y5 =
            coset_state(&code, &PauliString::from_compact(5, "Y3Y5").unwrap(), false).unwrap();
        assert!((logical_fidelity_raised(expect_on(&y3y5)) - 1.0).abs() < 1e-12);
        assert!(logical_fidelity(expect_on(&y3y5)).abs() < 1e-12);
        // Z4 shares the syndrome with Y3Y5 and is excluded from the raised
        // set
        let z4 = coset_state(&code, &PauliString::from_compact(5, "Z4").unwrap(), false).unwrap();
        assert!(logical_fidelity_raised(expect_on(&z4)).abs() < 1e-12);
        assert!((logical_fidelity(expect_on(&z4)) - 1.0).abs() < 1e-12);
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> DenseState {
        use num_complex::Complex64;
        let dim = 1usize << n;
        let mut st = DenseState::init(n);
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        st.set_amplitudes(amps);
        st
    }

    #[test]
    fn closed_forms_match_projector_sums_on_random_states() {
        let code = code();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let st = random_state(5, &mut rng);
            let cf = logical_fidelity(expect_on(&st));
            let ps = logical_fidelity_projector(&st, &code).unwrap();
            assert!((cf - ps).abs() < 1e-10, "standard: {cf} vs {ps}");
            let cf = logical_fidelity_raised(expect_on(&st));
            let ps = logical_fidelity_raised_projector(&st, &code).unwrap();
            assert!((cf - ps).abs() < 1e-10, "raised: {cf} vs {ps}");
        }
    }

    #[test]
    fn coset_projectors_are_orthonormal_and_complete() {
        let code = code();
        let minus = ideal_minus_dense(&code).unwrap();
        let mut plus = minus.clone();
        plus.apply_pauli(&code.logical_z).unwrap();
        let mut states = Vec::new();
        for e in single_qubit_errors() {
            for base in [&minus, &plus] {
                let mut st = base.clone();
                st.apply_pauli(&e).unwrap();
                states.push(st);
            }
        }
        assert_eq!(states.len(), 32);
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (a.inner(b).norm() - want).abs() < 1e-10,
                    "overlap ({i},{j})"
                );
            }
        }
        // completeness: a random state's overlaps sum to one
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let st = random_state(5, &mut rng);
        let (a, b, c, d) = overlap_distribution(&st, &code).unwrap();
        assert!((a + b + c + d - 1.0).abs() < 1e-10);
    }

    #[test]
    fn overlap_distribution_examples() {
        let code = code();
        let minus = ideal_minus_dense(&code).unwrap();
        let (p0m, p1m, p0p, p1p) = overlap_distribution(&minus, &code).unwrap();
        assert!((p0m - 1.0).abs() < 1e-12 && p1m < 1e-12 && p0p < 1e-12 && p1p < 1e-12);
        let y2_plus = coset_state(&code, &PauliString::single(5, 1, Letter::Y), true).unwrap();
        let (p0m, p1m, p0p, p1p) = overlap_distribution(&y2_plus, &code).unwrap();
        assert!(p0m < 1e-12 && p1m < 1e-12 && p0p < 1e-12 && (p1p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_combinators() {
        assert_eq!(combined_fidelity(0.0, 0.3, 0.9), 0.9);
        assert_eq!(combined_fidelity(1.0, 0.3, 0.9), 0.3);
        assert!((combined_fidelity(0.5, 0.8, 0.6) - 0.7).abs() < 1e-15);
        assert_eq!(fidelity_vs_pe(0.0, 0.95, 0.1), 0.95);
        assert_eq!(fidelity_vs_pe(1.0, 0.95, 0.1), 0.1);
        assert!((fidelity_vs_pe(0.5, 1.0, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mc_estimator() {
        let all = vec![true; 100];
        assert_eq!(mc_fidelity(&all), (1.0, 0.0));
        let half: Vec<bool> = (0..100).map(|i| i % 2 == 0).collect();
        let (mean, stderr) = mc_fidelity(&half);
        assert!((mean - 0.5).abs() < 1e-12);
        assert!((stderr - 0.05).abs() < 1e-12);
    }

    #[test]
    fn fidelity_agrees_with_coset_classification_on_all_paulis() {
        // every one of the 1024 data-qubit Paulis applied to |->_L scores
        // fidelity 1 exactly when its coset preserves the X-basis logical
        // states, and 0 otherwise
        let code = code();
        let tables = crate::tables::DecodeTables::five_qubit(&code).unwrap();
        let minus = ideal_minus_dense(&code).unwrap();
        for bits in 0..1024u64 {
            let p = PauliString::from_xz(5, bits & 31, bits >> 5, crate::pauli::Phase::ONE);
            let mut st = minus.clone();
            st.apply_pauli(&p).unwrap();
            let f = logical_fidelity(|op| st.expectation(op).unwrap());
            let (class, rep) = crate::tables::logical_class(&code, &tables, &p).unwrap();
            let benign = class.preserves_x_eigenstates();
            let want = if benign { 1.0 } else { 0.0 };
            assert!(
                (f - want).abs() < 1e-10,
                "{}: class {} rep {} fidelity {f}",
                p.letters_string(),
                class.label(),
                rep.compact_name()
            );
        }
    }

    #[test]
    fn ghz_fidelity_examples() {
        // ideal GHZ via direct construction
        let mut st = DenseState::init(4);
        st.apply_gate(&crate::gate::Gate::H(0)).unwrap();
        for t in 1..4 {
            st.apply_gate(&crate::gate::Gate::Cx(0, t)).unwrap();
        }
        assert!((ghz_fidelity(expect_on(&st)) - 1.0).abs() < 1e-12);
        // the sign-flipped GHZ state is orthogonal: the dense oracle gives
        // exactly zero (the 8 X-type group operators all flip sign)
        let mut flipped = st.clone();
        flipped
            .apply_pauli(&PauliString::single(4, 0, Letter::Z))
            .unwrap();
        assert!(ghz_fidelity(expect_on(&flipped)).abs() < 1e-12);
        // |0000> also scores one half
        let zero = DenseState::init(4);
        assert!((ghz_fidelity(expect_on(&zero)) - 0.5).abs() < 1e-12);
    }
}
