//! Exact dense state-vector simulator for small registers.
//!
//! This is the independent brute-force oracle used to cross-validate the
//! tableau backend, the native-gate compiler and every derived constant.
//! Qubit 0 is the most significant bit of the basis index, so basis kets
//! read left to right like Pauli strings. Unlike the tableau backend it
//! supports arbitrary single-qubit unitaries, although the shipped gate set
//! happens to be Clifford.

use num_complex::Complex64;
use rand::Rng;

use crate::gate::Gate;
use crate::pauli::{Letter, PauliString};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default absolute tolerance for amplitude and expectation comparisons.
pub const TOL: f64 = 1e-10;

/// A pure state of `n` qubits as a complex amplitude vector of length 2^n.
#[derive(Debug, Clone)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// |0...0> on `n` qubits.
    pub fn zero(n: usize) -> DenseState {
        assert!(n <= 16, "dense backend limited to small registers");
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        DenseState { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Replace the amplitude vector (renormalized).
    pub fn set_amplitudes(&mut self, amps: Vec<Complex64>) {
        assert_eq!(amps.len(), self.amps.len());
        self.amps = amps;
        self.normalize();
    }

    fn bit(&self, index: usize, qubit: usize) -> usize {
        index >> (self.n - 1 - qubit) & 1
    }

    fn flip(&self, index: usize, qubit: usize) -> usize {
        index ^ (1 << (self.n - 1 - qubit))
    }

    /// Apply a 2x2 unitary to `qubit`.
    pub fn apply_1q(&mut self, m: [[Complex64; 2]; 2], qubit: usize) {
        assert!(qubit < self.n);
        let stride = 1 << (self.n - 1 - qubit);
        for base in 0..self.amps.len() {
            if base & stride == 0 {
                let a0 = self.amps[base];
                let a1 = self.amps[base | stride];
                self.amps[base] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[base | stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Apply a 4x4 unitary to ordered qubits (a, b); a indexes the high bit.
    pub fn apply_2q(&mut self, m: [[Complex64; 4]; 4], a: usize, b: usize) {
        assert!(a < self.n && b < self.n && a != b);
        let sa = 1 << (self.n - 1 - a);
        let sb = 1 << (self.n - 1 - b);
        for base in 0..self.amps.len() {
            if base & sa == 0 && base & sb == 0 {
                let idx = [base, base | sb, base | sa, base | sa | sb];
                let old: Vec<Complex64> = idx.iter().map(|&i| self.amps[i]).collect();
                for (r, &i) in idx.iter().enumerate() {
                    self.amps[i] = (0..4).map(|c| m[r][c] * old[c]).sum();
                }
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        for q in g.qubits() {
            if q >= self.n {
                return Err(Error::QubitOutOfRange(q, self.n));
            }
        }
        match *g {
            Gate::H(q) => self.apply_1q(matrices::H, q),
            Gate::S(q) => self.apply_1q(matrices::S, q),
            Gate::Sdg(q) => self.apply_1q(matrices::SDG, q),
            Gate::X(q) => self.apply_1q(matrices::X, q),
            Gate::Y(q) => self.apply_1q(matrices::Y, q),
            Gate::Z(q) => self.apply_1q(matrices::Z, q),
            Gate::SqrtX(q) => self.apply_1q(matrices::rx(std::f64::consts::FRAC_PI_2), q),
            Gate::SqrtXdg(q) => self.apply_1q(matrices::rx(-std::f64::consts::FRAC_PI_2), q),
            Gate::SqrtY(q) => self.apply_1q(matrices::ry(std::f64::consts::FRAC_PI_2), q),
            Gate::SqrtYdg(q) => self.apply_1q(matrices::ry(-std::f64::consts::FRAC_PI_2), q),
            Gate::Cx(c, t) => self.apply_2q(matrices::controlled(matrices::X), c, t),
            Gate::Cy(c, t) => self.apply_2q(matrices::controlled(matrices::Y), c, t),
            Gate::Cz(c, t) => self.apply_2q(matrices::controlled(matrices::Z), c, t),
            Gate::CrxPlus(c, t) => self.apply_2q(matrices::crx(1.0), c, t),
            Gate::CrxMinus(c, t) => self.apply_2q(matrices::crx(-1.0), c, t),
        }
        Ok(())
    }

    /// Apply a Pauli operator, including its phase.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch(p.num_qubits(), self.n));
        }
        let mut out = vec![ZERO; self.amps.len()];
        let (re, im) = p.phase().re_im();
        let global = Complex64::new(re as f64, im as f64);
        for (idx, &amp) in self.amps.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            let (target, factor) = self.pauli_action(p, idx);
            out[target] += global * factor * amp;
        }
        self.amps = out;
        Ok(())
    }

    // For basis ket |idx>, P|idx> = factor * |target>.
    fn pauli_action(&self, p: &PauliString, idx: usize) -> (usize, Complex64) {
        let mut target = idx;
        let mut factor = ONE;
        for q in 0..self.n {
            let bit = self.bit(idx, q);
            match p.letter(q) {
                Letter::I => {}
                Letter::X => target = self.flip(target, q),
                Letter::Z => {
                    if bit == 1 {
                        factor = -factor;
                    }
                }
                Letter::Y => {
                    target = self.flip(target, q);
                    factor *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                }
            }
        }
        (target, factor)
    }

    /// <self|p|self> as a real number (p is Hermitian when its phase is ±1).
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch(p.num_qubits(), self.n));
        }
        let (re, im) = p.phase().re_im();
        let global = Complex64::new(re as f64, im as f64);
        let mut acc = ZERO;
        for (idx, &amp) in self.amps.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            let (target, factor) = self.pauli_action(p, idx);
            acc += self.amps[target].conj() * global * factor * amp;
        }
        Ok(acc.re)
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// Measure the Hermitian Pauli `p`. Returns (outcome, probability of
    /// that outcome, was_deterministic) and projects the state.
    pub fn measure_pauli(
        &mut self,
        p: &PauliString,
        forced: Option<i8>,
        rng: &mut impl Rng,
    ) -> Result<(i8, f64, bool)> {
        if !p.phase().is_real() {
            return Err(Error::NonHermitian(p.phase()));
        }
        let expect = self.expectation(p)?;
        let p_plus = ((1.0 + expect) / 2.0).clamp(0.0, 1.0);
        let deterministic = !(TOL..=1.0 - TOL).contains(&p_plus);
        let outcome = match forced {
            Some(m) => {
                let prob = if m > 0 { p_plus } else { 1.0 - p_plus };
                if prob < TOL {
                    if deterministic {
                        return Err(Error::ContradictoryOutcome {
                            forced: m,
                            actual: if p_plus > 0.5 { 1 } else { -1 },
                        });
                    }
                    return Err(Error::ImpossibleBranch);
                }
                m
            }
            None => {
                if deterministic {
                    if p_plus > 0.5 {
                        1
                    } else {
                        -1
                    }
                } else if rng.random::<f64>() < p_plus {
                    1
                } else {
                    -1
                }
            }
        };
        // Project onto (1 ± P)/2 and renormalize.
        let mut p_state = self.clone();
        p_state.apply_pauli(p)?;
        let sign = outcome as f64;
        for (a, b) in self.amps.iter_mut().zip(&p_state.amps) {
            *a = (*a + sign * *b) / 2.0;
        }
        self.normalize();
        let prob = if outcome > 0 { p_plus } else { 1.0 - p_plus };
        Ok((outcome, prob, deterministic))
    }

    /// Fidelity |<a|b>|^2 between pure states.
    pub fn fidelity(&self, other: &DenseState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Extract the leading `keep`-qubit substate; the remaining qubits
    /// must be in |0> (the situation after measure-reset).
    pub fn leading_substate(&self, keep: usize) -> Result<DenseState> {
        assert!(keep <= self.n);
        let shift = self.n - keep;
        let mut data = vec![ZERO; 1 << keep];
        let mut dropped = 0.0;
        for (idx, &amp) in self.amps.iter().enumerate() {
            if idx & ((1 << shift) - 1) == 0 {
                data[idx >> shift] = amp;
            } else {
                dropped += amp.norm_sqr();
            }
        }
        if dropped > TOL {
            return Err(Error::DirtyPreparation(keep));
        }
        let mut out = DenseState::zero(keep);
        out.amps = data;
        out.normalize();
        Ok(out)
    }

    /// Relabel qubits: new position i holds what was at `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> DenseState {
        assert_eq!(perm.len(), self.n);
        let mut out = vec![ZERO; self.amps.len()];
        for (idx, &amp) in self.amps.iter().enumerate() {
            let mut new_idx = 0usize;
            for (i, &src) in perm.iter().enumerate() {
                new_idx |= self.bit(idx, src) << (self.n - 1 - i);
            }
            out[new_idx] = amp;
        }
        DenseState {
            n: self.n,
            amps: out,
        }
    }
}

/// Gate matrices in the computational basis.
pub mod matrices {
    use super::*;

    pub const H: [[Complex64; 2]; 2] = {
        const S: f64 = std::f64::consts::FRAC_1_SQRT_2;
        [
            [Complex64::new(S, 0.0), Complex64::new(S, 0.0)],
            [Complex64::new(S, 0.0), Complex64::new(-S, 0.0)],
        ]
    };
    pub const X: [[Complex64; 2]; 2] = [[ZERO, ONE], [ONE, ZERO]];
    pub const Y: [[Complex64; 2]; 2] = [
        [ZERO, Complex64::new(0.0, -1.0)],
        [Complex64::new(0.0, 1.0), ZERO],
    ];
    pub const Z: [[Complex64; 2]; 2] = [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]];
    pub const S: [[Complex64; 2]; 2] = [[ONE, ZERO], [ZERO, Complex64::new(0.0, 1.0)]];
    pub const SDG: [[Complex64; 2]; 2] = [[ONE, ZERO], [ZERO, Complex64::new(0.0, -1.0)]];
    pub const ID: [[Complex64; 2]; 2] = [[ONE, ZERO], [ZERO, ONE]];

    /// Rx(theta) = exp(-i theta X / 2).
    pub fn rx(theta: f64) -> [[Complex64; 2]; 2] {
        let c = Complex64::new((theta / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, -(theta / 2.0).sin());
        [[c, s], [s, c]]
    }

    /// Ry(theta) = exp(-i theta Y / 2).
    pub fn ry(theta: f64) -> [[Complex64; 2]; 2] {
        let c = Complex64::new((theta / 2.0).cos(), 0.0);
        let s = (theta / 2.0).sin();
        [[c, Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), c]]
    }

    /// |0><0| ⊗ I + |1><1| ⊗ U with the first qubit as control.
    pub fn controlled(u: [[Complex64; 2]; 2]) -> [[Complex64; 4]; 4] {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[1][1] = ONE;
        for r in 0..2 {
            for c in 0..2 {
                m[2 + r][2 + c] = u[r][c];
            }
        }
        m
    }

    /// |0><0| ⊗ Rx(sign·π/2) + |1><1| ⊗ Rx(-sign·π/2).
    pub fn crx(sign: f64) -> [[Complex64; 4]; 4] {
        let plus = rx(sign * std::f64::consts::FRAC_PI_2);
        let minus = rx(-sign * std::f64::consts::FRAC_PI_2);
        let mut m = [[ZERO; 4]; 4];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = plus[r][c];
                m[2 + r][2 + c] = minus[r][c];
            }
        }
        m
    }
}

/// The 2^n x 2^n unitary of a gate sequence.
pub fn unitary_of_gates(n: usize, gates: &[Gate]) -> Result<Vec<Vec<Complex64>>> {
    assert!(n <= 8);
    let dim = 1usize << n;
    let mut rows = vec![vec![ZERO; dim]; dim];
    for b in 0..dim {
        let mut st = DenseState::zero(n);
        st.amps[0] = ZERO;
        st.amps[b] = ONE;
        for g in gates {
            st.apply_gate(g)?;
        }
        for (r, row) in rows.iter_mut().enumerate() {
            row[b] = st.amps[r];
        }
    }
    Ok(rows)
}

/// The unitary of a measurement-free circuit. Preparations, measurements
/// and feedforward conditions make a circuit non-unitary and are rejected.
pub fn unitary_of_circuit(circuit: &crate::circuit::Circuit) -> Result<Vec<Vec<Complex64>>> {
    use crate::circuit::Op;
    let mut gates = Vec::new();
    for loc in &circuit.locations {
        match &loc.op {
            Op::Gate {
                gate,
                condition: None,
            } => gates.push(*gate),
            Op::Idle { .. } => {}
            _ => return Err(Error::NotUnitary),
        }
    }
    unitary_of_gates(circuit.n, &gates)
}

/// Dense matrix of a Pauli string (for oracle checks on tiny registers).
pub fn pauli_matrix(p: &PauliString) -> Vec<Vec<Complex64>> {
    let n = p.num_qubits();
    let dim = 1 << n;
    let probe = DenseState::zero(n);
    let mut cols = Vec::with_capacity(dim);
    for b in 0..dim {
        let mut col = vec![ZERO; dim];
        let (target, factor) = probe.pauli_action(p, b);
        let (re, im) = p.phase().re_im();
        col[target] = Complex64::new(re as f64, im as f64) * factor;
        cols.push(col);
    }
    // transpose columns into rows
    (0..dim)
        .map(|r| (0..dim).map(|c| cols[c][r]).collect())
        .collect()
}

/// Frobenius distance between two matrices after fixing the global phase by
/// the largest entry of `a`.
pub fn matrix_distance_up_to_phase(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let mut best = (0usize, 0usize);
    let mut best_norm = 0.0;
    for (r, row) in a.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if v.norm() > best_norm {
                best_norm = v.norm();
                best = (r, c);
            }
        }
    }
    if best_norm < TOL {
        return f64::INFINITY;
    }
    let phase = b[best.0][best.1] / a[best.0][best.1];
    if (phase.norm() - 1.0).abs() > 1e-6 {
        return f64::INFINITY;
    }
    let mut dist2 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (va, vb) in ra.iter().zip(rb) {
            dist2 += (va * phase - vb).norm_sqr();
        }
    }
    dist2.sqrt()
}
