//! Phase-exact Pauli-string arithmetic.
//!
//! A [`PauliString`] is an n-qubit Pauli operator with a tracked global
//! phase in {+1, +i, -1, -i}. Qubit 0 is the leftmost letter of the printed
//! string. X and Z components are bit-packed into single words so that
//! products and symplectic inner products are word-parallel; registers are
//! limited to 64 qubits (protocol circuits use at most 7).
//!
//! Values are immutable after construction and safe to share across threads.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Maximum register size supported by the bit-packed representation.
pub const MAX_QUBITS: usize = 64;

/// Quarter-turn phase i^k for k in 0..4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u8) -> Phase {
        Phase(k & 3)
    }

    /// Exponent k of i^k.
    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) & 3)
    }

    /// True for +1 and -1.
    pub fn is_real(self) -> bool {
        self.0 & 1 == 0
    }

    /// The sign for a real phase: +1 or -1.
    pub fn sign(self) -> i8 {
        match self.0 {
            0 => 1,
            2 => -1,
            _ => panic!("phase {self} is not real"),
        }
    }

    /// (re, im) of the phase as exact integers.
    pub fn re_im(self) -> (i8, i8) {
        match self.0 {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) & 3)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{s}")
    }
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_xz(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn xz(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// Phase-tracked n-qubit Pauli operator in symplectic (X-bits, Z-bits) form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    phase: Phase,
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl PauliString {
    /// The identity on `n` qubits with phase +1.
    pub fn identity(n: usize) -> PauliString {
        assert!(n <= MAX_QUBITS, "register too large");
        PauliString {
            n,
            x: 0,
            z: 0,
            phase: Phase::ONE,
        }
    }

    /// A single-qubit letter embedded in an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, letter: Letter) -> PauliString {
        let mut p = PauliString::identity(n);
        p.set_letter(qubit, letter);
        p
    }

    /// Build from raw symplectic components.
    pub fn from_xz(n: usize, x: u64, z: u64, phase: Phase) -> PauliString {
        assert!(n <= MAX_QUBITS);
        let mask = mask(n);
        PauliString {
            n,
            x: x & mask,
            z: z & mask,
            phase,
        }
    }

    /// Build from letters, qubit 0 first.
    pub fn from_letters(letters: &[Letter], phase: Phase) -> PauliString {
        let mut p = PauliString::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p.phase = phase;
        p
    }

    /// Parse compact 1-based factor notation such as `"X1Z2"` or `"I"`.
    pub fn from_compact(n: usize, text: &str) -> Result<PauliString> {
        let t = text.trim();
        if t == "I" || t.is_empty() {
            return Ok(PauliString::identity(n));
        }
        let mut p = PauliString::identity(n);
        let mut chars = t.chars().peekable();
        while let Some(c) = chars.next() {
            let letter = Letter::from_char(c).ok_or_else(|| Error::PauliParse(text.into()))?;
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let idx: usize = digits.parse().map_err(|_| Error::PauliParse(text.into()))?;
            if idx == 0 || idx > n {
                return Err(Error::PauliParse(text.into()));
            }
            p.set_letter(idx - 1, letter);
        }
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn with_phase(&self, phase: Phase) -> PauliString {
        PauliString { phase, ..*self }
    }

    pub fn negated(&self) -> PauliString {
        self.with_phase(self.phase * Phase::MINUS_ONE)
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        assert!(qubit < self.n);
        Letter::from_xz(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn set_letter(&mut self, qubit: usize, letter: Letter) {
        assert!(
            qubit < self.n,
            "qubit {qubit} out of range for {} qubits",
            self.n
        );
        let (x, z) = letter.xz();
        self.x = self.x & !(1 << qubit) | (u64::from(x) << qubit);
        self.z = self.z & !(1 << qubit) | (u64::from(z) << qubit);
    }

    /// Count of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// True iff the symplectic inner product with `other` vanishes.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let anti = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        Ok(anti.is_multiple_of(2))
    }

    /// +1 if the operators commute, -1 otherwise.
    pub fn comm_sign(&self, other: &PauliString) -> Result<i8> {
        Ok(if self.commutes(other)? { 1 } else { -1 })
    }

    /// Matrix product `self * other` with exact phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let (ax, az, bx, bz) = (self.x, self.z, other.x, other.z);
        // Per-qubit phase of letter products, i^{+1} on the forward cycle
        // (X,Y),(Y,Z),(Z,X) and i^{-1} on the reverse one.
        let plus = (ax & !az & bx & bz) | (ax & az & !bx & bz) | (!ax & az & bx & !bz);
        let minus = (ax & !az & !bx & bz) | (ax & az & bx & !bz) | (!ax & az & bx & bz);
        let k = (plus.count_ones() as u8).wrapping_sub(minus.count_ones() as u8);
        let phase = self.phase * other.phase * Phase::from_exponent(k & 3);
        Ok(PauliString {
            n: self.n,
            x: ax ^ bx,
            z: az ^ bz,
            phase,
        })
    }

    /// Letters equal, phase ignored.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Embed into a larger register, qubit i of `self` landing on `map[i]`.
    pub fn embedded(&self, n: usize, map: &[usize]) -> PauliString {
        assert_eq!(map.len(), self.n);
        let mut p = PauliString::identity(n);
        for (i, &q) in map.iter().enumerate() {
            p.set_letter(q, self.letter(i));
        }
        p.phase = self.phase;
        p
    }

    /// Restrict to the given qubits (in order), keeping the phase.
    pub fn restricted(&self, qubits: &[usize]) -> PauliString {
        let mut p = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            p.set_letter(i, self.letter(q));
        }
        p.phase = self.phase;
        p
    }

    /// Relabel qubits: the letter at new position i comes from `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> PauliString {
        assert_eq!(perm.len(), self.n);
        let mut p = PauliString::identity(self.n);
        for (i, &old) in perm.iter().enumerate() {
            p.set_letter(i, self.letter(old));
        }
        p.phase = self.phase;
        p
    }

    /// Letters as a plain string, e.g. "XXYIY".
    pub fn letters_string(&self) -> String {
        (0..self.n).map(|q| self.letter(q).as_char()).collect()
    }

    /// Compact 1-based factor notation, e.g. "Y3Y5"; "I" for the identity.
    pub fn compact_name(&self) -> String {
        if self.is_identity_letters() {
            return "I".into();
        }
        let mut s = String::new();
        for q in 0..self.n {
            let l = self.letter(q);
            if l != Letter::I {
                s.push(l.as_char());
                s.push_str(&(q + 1).to_string());
            }
        }
        s
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parse strings like "XXYIY", "-Y3Z4Y5" is *not* accepted here (see
    /// [`PauliString::from_compact`]); an optional sign prefix "+", "-",
    /// "+i", "-i" or "i" is.
    fn from_str(s: &str) -> Result<PauliString> {
        let t = s.trim();
        let (phase, rest) = if let Some(r) = t.strip_prefix("+i").or_else(|| t.strip_prefix("i")) {
            (Phase::I, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = t.strip_prefix('-').or_else(|| t.strip_prefix('\u{2212}')) {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (Phase::ONE, r)
        } else {
            (Phase::ONE, t)
        };
        if rest.is_empty() || rest.len() > MAX_QUBITS {
            return Err(Error::PauliParse(s.into()));
        }
        let mut letters = Vec::with_capacity(rest.len());
        for c in rest.chars() {
            letters.push(Letter::from_char(c).ok_or_else(|| Error::PauliParse(s.into()))?);
        }
        Ok(PauliString::from_letters(&letters, phase))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase, self.letters_string())
    }
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Parse a 5-qubit operator in either plain ("XXYIY") or compact ("Y3Y5")
/// notation.
pub fn parse_operator(n: usize, text: &str) -> Result<PauliString> {
    let t = text.trim();
    let body = t.trim_start_matches(['+', '-']).trim_start_matches('i');
    if body.chars().any(|c| c.is_ascii_digit()) {
        let p = PauliString::from_compact(n, body)?;
        let sign = if t.starts_with('-') {
            Phase::MINUS_ONE
        } else {
            Phase::ONE
        };
        Ok(p.with_phase(sign))
    } else {
        let p: PauliString = t.parse()?;
        if p.num_qubits() != n {
            return Err(Error::DimensionMismatch(p.num_qubits(), n));
        }
        Ok(p)
    }
}
