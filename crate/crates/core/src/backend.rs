//! Common interface over the tableau and dense simulation backends.
//!
//! Protocol code is generic over [`Backend`]; the tableau backend is the
//! fast path, the dense backend the oracle. Both must produce identical
//! forced-branch outcomes and expectations on Clifford circuits.

use rand_chacha::ChaCha8Rng;

use crate::dense::{DenseState, TOL};
use crate::gate::Gate;
use crate::pauli::{Letter, PauliString};
use crate::tableau::{Basis, StabilizerState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Measurement {
    pub value: i8,
    pub deterministic: bool,
    /// Born probability of the realized outcome.
    pub probability: f64,
}

pub trait Backend: Clone {
    const NAME: &'static str;

    fn init(n: usize) -> Self;
    fn num_qubits(&self) -> usize;
    fn prepare(&mut self, qubit: usize, basis: Basis) -> Result<()>;
    fn apply_gate(&mut self, g: &Gate) -> Result<()>;
    fn apply_pauli(&mut self, p: &PauliString) -> Result<()>;
    fn measure_pauli(
        &mut self,
        p: &PauliString,
        forced: Option<i8>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Measurement>;
    /// Expectation value of a Hermitian Pauli as a real number.
    fn expectation_real(&self, p: &PauliString) -> Result<f64>;
    /// Relabel qubits: new position i holds what was at `perm[i]`.
    fn permute_qubits(&mut self, perm: &[usize]) -> Result<()>;

    fn measure_z(
        &mut self,
        qubit: usize,
        forced: Option<i8>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Measurement> {
        let z = PauliString::single(self.num_qubits(), qubit, Letter::Z);
        self.measure_pauli(&z, forced, rng)
    }

    /// Expectation rounded to {-1, 0, +1}; errors if it is none of these.
    fn expectation_sign(&self, p: &PauliString) -> Result<i8> {
        let v = self.expectation_real(p)?;
        if (v - 1.0).abs() < 1e-6 {
            Ok(1)
        } else if (v + 1.0).abs() < 1e-6 {
            Ok(-1)
        } else if v.abs() < 1e-6 {
            Ok(0)
        } else {
            Err(Error::NotCosetState)
        }
    }
}

impl Backend for StabilizerState {
    const NAME: &'static str = "tableau";

    fn init(n: usize) -> Self {
        StabilizerState::zero(n)
    }

    fn num_qubits(&self) -> usize {
        self.num_qubits()
    }

    fn prepare(&mut self, qubit: usize, basis: Basis) -> Result<()> {
        StabilizerState::prepare(self, qubit, basis)
    }

    fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        StabilizerState::apply_gate(self, g)
    }

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        StabilizerState::apply_pauli(self, p)
    }

    fn measure_pauli(
        &mut self,
        p: &PauliString,
        forced: Option<i8>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Measurement> {
        let (value, deterministic) = StabilizerState::measure_pauli(self, p, forced, rng)?;
        Ok(Measurement {
            value,
            deterministic,
            probability: if deterministic { 1.0 } else { 0.5 },
        })
    }

    fn expectation_real(&self, p: &PauliString) -> Result<f64> {
        Ok(StabilizerState::expectation(self, p)? as f64)
    }

    fn permute_qubits(&mut self, perm: &[usize]) -> Result<()> {
        StabilizerState::permute(self, perm);
        Ok(())
    }
}

impl Backend for DenseState {
    const NAME: &'static str = "dense";

    fn init(n: usize) -> Self {
        DenseState::zero(n)
    }

    fn num_qubits(&self) -> usize {
        self.num_qubits()
    }

    fn prepare(&mut self, qubit: usize, basis: Basis) -> Result<()> {
        let n = self.num_qubits();
        let z = PauliString::single(n, qubit, Letter::Z);
        let ez = self.expectation(&z)?;
        if (ez - 1.0).abs() > 1e-9 {
            if (ez + 1.0).abs() > 1e-9 {
                return Err(Error::DirtyPreparation(qubit));
            }
            self.apply_gate(&Gate::X(qubit))?;
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

    fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        DenseState::apply_gate(self, g)
    }

    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        DenseState::apply_pauli(self, p)
    }

    fn measure_pauli(
        &mut self,
        p: &PauliString,
        forced: Option<i8>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Measurement> {
        let (value, probability, deterministic) = DenseState::measure_pauli(self, p, forced, rng)?;
        Ok(Measurement {
            value,
            deterministic,
            probability,
        })
    }

    fn expectation_real(&self, p: &PauliString) -> Result<f64> {
        let v = DenseState::expectation(self, p)?;
        // snap tiny numerical noise so sign classification is exact
        if v.abs() < TOL {
            Ok(0.0)
        } else {
            Ok(v)
        }
    }

    fn permute_qubits(&mut self, perm: &[usize]) -> Result<()> {
        *self = self.permuted(perm);
        Ok(())
    }
}
