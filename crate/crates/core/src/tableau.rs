//! Stabilizer tableau simulator.
//!
//! A pure stabilizer state of n qubits is stored as n stabilizer rows and n
//! destabilizer rows of phase-exact [`PauliString`]s. Gates act by row-wise
//! conjugation; Pauli measurements follow the usual tableau update: rows
//! anticommuting with the measured operator are merged via the pivot row,
//! the pivot becomes the (signed) measured operator, and the old pivot row
//! is kept as its destabilizer.
//!
//! Random measurement outcomes are drawn from a caller-supplied seeded
//! generator, or pinned with a forced outcome to select a branch.

use rand::Rng;

use crate::gate::{conjugate_by_gate, Gate};
use crate::pauli::{Letter, PauliString, Phase};
use crate::{Error, Result};

/// Basis labels for product-state preparation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    /// |0>
    Zero,
    /// |1>
    One,
    /// |+>
    Plus,
    /// |->
    Minus,
    /// |i>
    PlusI,
    /// |-i>
    MinusI,
}

impl Basis {
    pub fn from_label(label: &str) -> Result<Basis> {
        match label {
            "0" | "|0>" => Ok(Basis::Zero),
            "1" | "|1>" => Ok(Basis::One),
            "+" | "|+>" => Ok(Basis::Plus),
            "-" | "|->" => Ok(Basis::Minus),
            "i" | "|i>" => Ok(Basis::PlusI),
            "-i" | "|-i>" => Ok(Basis::MinusI),
            _ => Err(Error::UnknownLabel(label.into())),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Basis::Zero => "0",
            Basis::One => "1",
            Basis::Plus => "+",
            Basis::Minus => "-",
            Basis::PlusI => "i",
            Basis::MinusI => "-i",
        }
    }

    /// The signed single-qubit stabilizer of this basis state.
    pub fn stabilizer(&self) -> (Letter, Phase) {
        match self {
            Basis::Zero => (Letter::Z, Phase::ONE),
            Basis::One => (Letter::Z, Phase::MINUS_ONE),
            Basis::Plus => (Letter::X, Phase::ONE),
            Basis::Minus => (Letter::X, Phase::MINUS_ONE),
            Basis::PlusI => (Letter::Y, Phase::ONE),
            Basis::MinusI => (Letter::Y, Phase::MINUS_ONE),
        }
    }

    /// A letter anticommuting with the stabilizer, used as destabilizer.
    fn destabilizer(&self) -> Letter {
        match self {
            Basis::Zero | Basis::One => Letter::X,
            _ => Letter::Z,
        }
    }
}

/// Pure stabilizer state as stabilizer/destabilizer rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerState {
    n: usize,
    stabs: Vec<PauliString>,
    destabs: Vec<PauliString>,
}

impl StabilizerState {
    /// |0...0> on `n` qubits.
    pub fn zero(n: usize) -> StabilizerState {
        Self::product(&vec![Basis::Zero; n])
    }

    /// Product state from per-qubit basis labels.
    pub fn product(labels: &[Basis]) -> StabilizerState {
        let n = labels.len();
        let mut stabs = Vec::with_capacity(n);
        let mut destabs = Vec::with_capacity(n);
        for (q, b) in labels.iter().enumerate() {
            let (letter, sign) = b.stabilizer();
            stabs.push(PauliString::single(n, q, letter).with_phase(sign));
            destabs.push(PauliString::single(n, q, b.destabilizer()));
        }
        StabilizerState { n, stabs, destabs }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizer_rows(&self) -> &[PauliString] {
        &self.stabs
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        for row in self.stabs.iter_mut().chain(self.destabs.iter_mut()) {
            *row = conjugate_by_gate(row, g)?;
        }
        Ok(())
    }

    /// Apply a Pauli operator: stabilizer signs flip where they anticommute.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch(p.num_qubits(), self.n));
        }
        for row in self.stabs.iter_mut().chain(self.destabs.iter_mut()) {
            if !row.commutes(p)? {
                *row = row.negated();
            }
        }
        Ok(())
    }

    /// Reset `qubit` to the given basis state. The qubit must currently be
    /// in a Z eigenstate (the situation after a Z measurement).
    pub fn prepare(&mut self, qubit: usize, basis: Basis) -> Result<()> {
        let z = PauliString::single(self.n, qubit, Letter::Z);
        match self.expectation(&z)? {
            1 => {}
            -1 => self.apply_gate(&Gate::X(qubit))?,
            _ => return Err(Error::DirtyPreparation(qubit)),
        }
        match basis {
            Basis::Zero => {}
            Basis::One => self.apply_gate(&Gate::X(qubit))?,
            Basis::Plus => self.apply_gate(&Gate::H(qubit))?,
            Basis::Minus => {
                self.apply_gate(&Gate::X(qubit))?;
                self.apply_gate(&Gate::H(qubit))?;
            }
            Basis::PlusI => {
                self.apply_gate(&Gate::H(qubit))?;
                self.apply_gate(&Gate::S(qubit))?;
            }
            Basis::MinusI => {
                self.apply_gate(&Gate::X(qubit))?;
                self.apply_gate(&Gate::H(qubit))?;
                self.apply_gate(&Gate::S(qubit))?;
            }
        }
        Ok(())
    }

    /// Expectation of a Hermitian Pauli: ±1 if ±p is in the stabilizer
    /// group, 0 otherwise.
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        if !p.phase().is_real() {
            return Err(Error::NonHermitian(p.phase()));
        }
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch(p.num_qubits(), self.n));
        }
        for row in &self.stabs {
            if !row.commutes(p)? {
                return Ok(0);
            }
        }
        let det = self.determined_product(p)?;
        Ok(if det.phase() == p.phase() { 1 } else { -1 })
    }

    // Product of stabilizer rows equal to ±p (p commutes with all rows).
    fn determined_product(&self, p: &PauliString) -> Result<PauliString> {
        let mut prod = PauliString::identity(self.n);
        for (i, d) in self.destabs.iter().enumerate() {
            if !d.commutes(p)? {
                prod = prod.multiply(&self.stabs[i])?;
            }
        }
        debug_assert!(prod.same_letters(p), "stabilizer rows do not span {p}");
        Ok(prod)
    }

    /// Measure the Hermitian Pauli `p`.
    ///
    /// Returns (outcome, was_deterministic). If the operator commutes with
    /// the whole group the outcome is determined and the state unchanged;
    /// otherwise the outcome is ±1 uniformly at random (or `forced`) and ±p
    /// joins the stabilizer group.
    pub fn measure_pauli(
        &mut self,
        p: &PauliString,
        forced: Option<i8>,
        rng: &mut impl Rng,
    ) -> Result<(i8, bool)> {
        if !p.phase().is_real() {
            return Err(Error::NonHermitian(p.phase()));
        }
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch(p.num_qubits(), self.n));
        }
        let pivot = {
            let mut found = None;
            for (i, row) in self.stabs.iter().enumerate() {
                if !row.commutes(p)? {
                    found = Some(i);
                    break;
                }
            }
            found
        };
        match pivot {
            None => {
                let det = self.determined_product(p)?;
                let outcome = if det.phase() == p.phase() { 1 } else { -1 };
                if let Some(f) = forced {
                    if f != outcome {
                        return Err(Error::ContradictoryOutcome {
                            forced: f,
                            actual: outcome,
                        });
                    }
                }
                Ok((outcome, true))
            }
            Some(k) => {
                let outcome = match forced {
                    Some(f) => f,
                    None => {
                        if rng.random::<bool>() {
                            1
                        } else {
                            -1
                        }
                    }
                };
                let old_stab = self.stabs[k];
                for i in 0..self.n {
                    if i != k && !self.stabs[i].commutes(p)? {
                        self.stabs[i] = self.stabs[i].multiply(&old_stab)?;
                    }
                    if !self.destabs[i].commutes(p)? && i != k {
                        self.destabs[i] = self.destabs[i].multiply(&old_stab)?;
                    }
                }
                self.destabs[k] = old_stab;
                self.stabs[k] = if outcome > 0 { *p } else { p.negated() };
                Ok((outcome, false))
            }
        }
    }

    /// Relabel qubits: new position i holds what was at `perm[i]`.
    pub fn permute(&mut self, perm: &[usize]) {
        for row in self.stabs.iter_mut().chain(self.destabs.iter_mut()) {
            *row = row.permuted(perm);
        }
    }

    /// Check the tableau invariants (commutation and pairing structure).
    pub fn check_invariants(&self) -> Result<()> {
        for i in 0..self.n {
            if !self.stabs[i].phase().is_real() {
                return Err(Error::NonHermitian(self.stabs[i].phase()));
            }
            for j in 0..self.n {
                let ss = self.stabs[i].commutes(&self.stabs[j])?;
                let sd = self.stabs[i].commutes(&self.destabs[j])?;
                if !ss || sd == (i == j) {
                    return Err(Error::TableInconsistency(format!(
                        "tableau rows {i},{j} violate commutation structure"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Signed stabilizer rows as text, for debugging dumps.
    pub fn dump(&self) -> String {
        self.stabs
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }
}
