//! Clifford gate set and phase-exact Pauli conjugation.
//!
//! Besides the textbook gates, the set contains the native two-qubit gate of
//! the target hardware model: `controlled-Rx(±π/2)`, acting as Rx(+π/2) on
//! the target when the control is |0> and Rx(-π/2) when it is |1> (and the
//! inverse of that for the `Minus` variant). Both are Clifford, so the
//! tableau backend can run compiled circuits directly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pauli::{Letter, PauliString, Phase};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    /// Rx(+π/2) up to global phase.
    SqrtX(usize),
    SqrtXdg(usize),
    /// Ry(+π/2) up to global phase.
    SqrtY(usize),
    SqrtYdg(usize),
    Cx(usize, usize),
    Cy(usize, usize),
    Cz(usize, usize),
    /// controlled-Rx(±π/2) = |0><0| ⊗ Rx(+π/2) + |1><1| ⊗ Rx(-π/2)
    ///                     = exp(-iπ/4 Z⊗X).
    CrxPlus(usize, usize),
    /// The inverse native gate, exp(+iπ/4 Z⊗X).
    CrxMinus(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        use Gate::*;
        match *self {
            H(q) | S(q) | Sdg(q) | X(q) | Y(q) | Z(q) | SqrtX(q) | SqrtXdg(q) | SqrtY(q)
            | SqrtYdg(q) => vec![q],
            Cx(c, t) | Cy(c, t) | Cz(c, t) | CrxPlus(c, t) | CrxMinus(c, t) => vec![c, t],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().len() == 2
    }

    /// The control qubit of a controlled gate.
    pub fn control(&self) -> Option<usize> {
        use Gate::*;
        match *self {
            Cx(c, _) | Cy(c, _) | Cz(c, _) | CrxPlus(c, _) | CrxMinus(c, _) => Some(c),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        use Gate::*;
        match self {
            H(_) => "H",
            S(_) => "S",
            Sdg(_) => "SDG",
            X(_) => "X",
            Y(_) => "Y",
            Z(_) => "Z",
            SqrtX(_) => "SX",
            SqrtXdg(_) => "SXDG",
            SqrtY(_) => "SY",
            SqrtYdg(_) => "SYDG",
            Cx(..) => "CX",
            Cy(..) => "CY",
            Cz(..) => "CZ",
            CrxPlus(..) => "CRX+",
            CrxMinus(..) => "CRX-",
        }
    }

    pub fn from_name(name: &str, qubits: &[usize]) -> Result<Gate> {
        use Gate::*;
        let one = |f: fn(usize) -> Gate| -> Result<Gate> {
            if qubits.len() == 1 {
                Ok(f(qubits[0]))
            } else {
                Err(Error::UnsupportedGate(name.into()))
            }
        };
        let two = |f: fn(usize, usize) -> Gate| -> Result<Gate> {
            if qubits.len() == 2 && qubits[0] != qubits[1] {
                Ok(f(qubits[0], qubits[1]))
            } else {
                Err(Error::UnsupportedGate(name.into()))
            }
        };
        match name.to_ascii_uppercase().as_str() {
            "H" => one(H),
            "S" => one(S),
            "SDG" => one(Sdg),
            "X" => one(X),
            "Y" => one(Y),
            "Z" => one(Z),
            "SX" => one(SqrtX),
            "SXDG" => one(SqrtXdg),
            "SY" => one(SqrtY),
            "SYDG" => one(SqrtYdg),
            "CX" => two(Cx),
            "CY" => two(Cy),
            "CZ" => two(Cz),
            "CRX+" => two(CrxPlus),
            "CRX-" => two(CrxMinus),
            _ => Err(Error::UnsupportedGate(name.into())),
        }
    }

    /// Image of X on `qubit` under conjugation by this gate.
    fn image_of_x(&self, n: usize, qubit: usize) -> PauliString {
        use Gate::*;
        let single = |q: usize, l: Letter, ph: Phase| PauliString::single(n, q, l).with_phase(ph);
        let pair = |a: usize, la: Letter, b: usize, lb: Letter, ph: Phase| {
            let mut p = PauliString::single(n, a, la);
            p.set_letter(b, lb);
            p.with_phase(ph)
        };
        match *self {
            H(q) => single(q, Letter::Z, Phase::ONE),
            S(q) => single(q, Letter::Y, Phase::ONE),
            Sdg(q) => single(q, Letter::Y, Phase::MINUS_ONE),
            X(q) => single(q, Letter::X, Phase::ONE),
            Y(q) | Z(q) => single(q, Letter::X, Phase::MINUS_ONE),
            SqrtX(q) | SqrtXdg(q) => single(q, Letter::X, Phase::ONE),
            SqrtY(q) => single(q, Letter::Z, Phase::MINUS_ONE),
            SqrtYdg(q) => single(q, Letter::Z, Phase::ONE),
            Cx(c, t) => {
                if qubit == c {
                    pair(c, Letter::X, t, Letter::X, Phase::ONE)
                } else {
                    single(t, Letter::X, Phase::ONE)
                }
            }
            Cy(c, t) => {
                if qubit == c {
                    pair(c, Letter::X, t, Letter::Y, Phase::ONE)
                } else {
                    pair(c, Letter::Z, t, Letter::X, Phase::ONE)
                }
            }
            Cz(c, t) => {
                if qubit == c {
                    pair(c, Letter::X, t, Letter::Z, Phase::ONE)
                } else {
                    pair(c, Letter::Z, t, Letter::X, Phase::ONE)
                }
            }
            CrxPlus(c, t) => {
                if qubit == c {
                    // -i (Z⊗X)(X⊗I) = -i (ZX)⊗X = Y⊗X
                    pair(c, Letter::Y, t, Letter::X, Phase::ONE)
                } else {
                    single(t, Letter::X, Phase::ONE)
                }
            }
            CrxMinus(c, t) => {
                if qubit == c {
                    pair(c, Letter::Y, t, Letter::X, Phase::MINUS_ONE)
                } else {
                    single(t, Letter::X, Phase::ONE)
                }
            }
        }
    }

    /// Image of Z on `qubit` under conjugation by this gate.
    fn image_of_z(&self, n: usize, qubit: usize) -> PauliString {
        use Gate::*;
        let single = |q: usize, l: Letter, ph: Phase| PauliString::single(n, q, l).with_phase(ph);
        let pair = |a: usize, la: Letter, b: usize, lb: Letter, ph: Phase| {
            let mut p = PauliString::single(n, a, la);
            p.set_letter(b, lb);
            p.with_phase(ph)
        };
        match *self {
            H(q) => single(q, Letter::X, Phase::ONE),
            S(q) | Sdg(q) => single(q, Letter::Z, Phase::ONE),
            X(q) | Y(q) => single(q, Letter::Z, Phase::MINUS_ONE),
            Z(q) => single(q, Letter::Z, Phase::ONE),
            SqrtX(q) => single(q, Letter::Y, Phase::MINUS_ONE),
            SqrtXdg(q) => single(q, Letter::Y, Phase::ONE),
            SqrtY(q) | SqrtYdg(q) => single(
                q,
                Letter::X,
                if matches!(self, SqrtY(_)) {
                    Phase::ONE
                } else {
                    Phase::MINUS_ONE
                },
            ),
            Cx(c, t) => {
                if qubit == c {
                    single(c, Letter::Z, Phase::ONE)
                } else {
                    pair(c, Letter::Z, t, Letter::Z, Phase::ONE)
                }
            }
            Cy(c, t) => {
                if qubit == c {
                    single(c, Letter::Z, Phase::ONE)
                } else {
                    pair(c, Letter::Z, t, Letter::Z, Phase::ONE)
                }
            }
            Cz(c, t) => {
                if qubit == c {
                    single(c, Letter::Z, Phase::ONE)
                } else {
                    single(t, Letter::Z, Phase::ONE)
                }
            }
            CrxPlus(c, t) => {
                if qubit == c {
                    single(c, Letter::Z, Phase::ONE)
                } else {
                    // -i (Z⊗X)(I⊗Z) = -i Z⊗(XZ) = -Z⊗Y
                    pair(c, Letter::Z, t, Letter::Y, Phase::MINUS_ONE)
                }
            }
            CrxMinus(c, t) => {
                if qubit == c {
                    single(c, Letter::Z, Phase::ONE)
                } else {
                    pair(c, Letter::Z, t, Letter::Y, Phase::ONE)
                }
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.qubits().iter().map(|q| q.to_string()).collect();
        write!(f, "{} {}", self.name(), qs.join(" "))
    }
}

/// Returns g · p · g† with exact phase; identity on untouched qubits.
pub fn conjugate_by_gate(p: &PauliString, g: &Gate) -> Result<PauliString> {
    let n = p.num_qubits();
    for q in g.qubits() {
        if q >= n {
            return Err(Error::QubitOutOfRange(q, n));
        }
    }
    let acted = g.qubits();
    // Split p into the untouched part and per-qubit X^x Z^z factors on the
    // acted qubits (Y = i X Z), then map the factors through the gate.
    let mut result = *p;
    let mut phase = Phase::ONE;
    for &q in &acted {
        result.set_letter(q, Letter::I);
    }
    let mut acc = PauliString::identity(n);
    for &q in &acted {
        let (x, z) = p.letter(q).xz();
        if x && z {
            phase = phase * Phase::I;
        }
        if x {
            acc = acc.multiply(&g.image_of_x(n, q))?;
        }
        if z {
            acc = acc.multiply(&g.image_of_z(n, q))?;
        }
    }
    result = result.with_phase(result.phase() * phase);
    result.multiply(&acc)
}

/// Conjugate through a sequence of gates, applied left to right.
pub fn conjugate_through(p: &PauliString, gates: &[Gate]) -> Result<PauliString> {
    let mut cur = *p;
    for g in gates {
        cur = conjugate_by_gate(&cur, g)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn textbook_propagation() {
        // CX(c→t): X_c → X_c X_t
        let g = Gate::Cx(0, 1);
        assert_eq!(conjugate_by_gate(&ps("XI"), &g).unwrap(), ps("XX"));
        // CY(c→t): X_c → X_c Y_t
        let g = Gate::Cy(0, 1);
        assert_eq!(conjugate_by_gate(&ps("XI"), &g).unwrap(), ps("XY"));
        // H: X → Z, Z → X, Y → -Y
        let g = Gate::H(0);
        assert_eq!(conjugate_by_gate(&ps("X"), &g).unwrap(), ps("Z"));
        assert_eq!(conjugate_by_gate(&ps("Z"), &g).unwrap(), ps("X"));
        assert_eq!(conjugate_by_gate(&ps("Y"), &g).unwrap(), ps("-Y"));
    }

    #[test]
    fn conjugation_is_identity_on_untouched_qubits() {
        let p = ps("ZIXY");
        let got = conjugate_by_gate(&p, &Gate::H(1)).unwrap();
        assert_eq!(got, ps("ZIXY"));
    }

    #[test]
    fn conjugation_preserves_commutation() {
        let gates = [
            Gate::H(0),
            Gate::S(1),
            Gate::Cx(0, 1),
            Gate::Cy(1, 0),
            Gate::Cz(0, 1),
            Gate::CrxPlus(0, 1),
            Gate::CrxMinus(1, 0),
            Gate::SqrtX(0),
            Gate::SqrtY(1),
        ];
        for g in &gates {
            for a_bits in 0..16u64 {
                for b_bits in 0..16u64 {
                    let a = PauliString::from_xz(2, a_bits & 3, a_bits >> 2, Phase::ONE);
                    let b = PauliString::from_xz(2, b_bits & 3, b_bits >> 2, Phase::ONE);
                    let ca = conjugate_by_gate(&a, g).unwrap();
                    let cb = conjugate_by_gate(&b, g).unwrap();
                    assert_eq!(
                        a.commutes(&b).unwrap(),
                        ca.commutes(&cb).unwrap(),
                        "commutation broken by {g} on {a}, {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn gate_name_round_trip() {
        let gates = [
            Gate::H(3),
            Gate::Sdg(0),
            Gate::Cx(5, 1),
            Gate::CrxPlus(5, 6),
            Gate::CrxMinus(2, 0),
            Gate::SqrtXdg(4),
        ];
        for g in gates {
            let parsed = Gate::from_name(g.name(), &g.qubits()).unwrap();
            assert_eq!(parsed, g);
        }
        assert!(Gate::from_name("CNOTQ", &[0, 1]).is_err());
        assert!(Gate::from_name("CX", &[1, 1]).is_err());
    }
}
