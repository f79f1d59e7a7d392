//! Pauli operator algebra and Clifford conjugation.
//!
//! A [`PauliString`] is stored in the symplectic (x, z) bit representation with a
//! real sign. Letters map from bits as I = (0,0), X = (1,0), Y = (1,1), Z = (0,1),
//! with Y taken as the Hermitian operator `i·X·Z`. Qubit 0 is the leftmost letter
//! in text form and the most significant digit of a Pauli index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::PauliError;

const WORD: usize = 64;

/// Single-qubit Pauli letter.
///
/// The discriminant is the base-4 digit used by Pauli indices: I, X, Y, Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Letter {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    #[inline]
    pub fn from_code(code: usize) -> Self {
        Letter::ALL[code & 3]
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// An n-qubit Hermitian Pauli operator with a sign of ±1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let words = n.div_ceil(WORD);
        Self {
            n,
            x: vec![0; words],
            z: vec![0; words],
            negative: false,
        }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// A single non-trivial letter on qubit `qubit` of an n-qubit register.
    pub fn single(n: usize, qubit: usize, letter: Letter) -> Result<Self, PauliError> {
        if qubit >= n {
            return Err(PauliError::QubitOutOfRange { qubit, n });
        }
        let mut p = Self::identity(n);
        p.set_letter(qubit, letter);
        Ok(p)
    }

    /// Tensor power of one letter, e.g. `Z⊗Z⊗…⊗Z`.
    pub fn uniform(n: usize, letter: Letter) -> Self {
        Self::from_letters(&vec![letter; n])
    }

    /// Pauli with the given base-4 index on `n` qubits (qubit 0 most significant).
    pub fn from_index(n: usize, index: usize) -> Self {
        let mut p = Self::identity(n);
        for q in 0..n {
            let shift = 2 * (n - 1 - q);
            p.set_letter(q, Letter::from_code(index >> shift));
        }
        p
    }

    /// Base-4 index of the letters, ignoring the sign. Only meaningful for small `n`.
    pub fn index(&self) -> usize {
        debug_assert!(self.n <= 31);
        (0..self.n).fold(0, |acc, q| (acc << 2) | self.letter(q) as usize)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / WORD] >> (q % WORD)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / WORD] >> (q % WORD)) & 1 == 1
    }

    #[inline]
    fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / WORD, q % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    #[inline]
    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let (x, z) = letter.bits();
        self.set_bits(q, x, z);
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    /// +1 or -1.
    #[inline]
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn with_sign(mut self, sign: i8) -> Self {
        self.negative = sign < 0;
        self
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// True when every letter is I or Z, i.e. the operator is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    fn check_len(&self, other: &Self) -> Result<(), PauliError> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool, PauliError> {
        self.check_len(other)?;
        let parity = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((ax, az), (bx, bz))| ((ax & bz) ^ (az & bx)).count_ones())
            .sum::<u32>();
        Ok(parity % 2 == 0)
    }

    /// Group product `self · other`, keeping only a real sign.
    ///
    /// The exact product is `i^k · R` with `R` Hermitian. For commuting inputs `k` is even
    /// and the sign is exact; for anticommuting inputs the factor `±i` is reduced to `±1`.
    pub fn compose(&self, other: &Self) -> Result<Self, PauliError> {
        self.check_len(other)?;
        let mut phase: i32 = 0;
        for q in 0..self.n {
            phase += phase_exponent(self.x_bit(q), self.z_bit(q), other.x_bit(q), other.z_bit(q));
        }
        let phase = phase.rem_euclid(4);
        let mut out = Self::identity(self.n);
        for (w, o) in out.x.iter_mut().enumerate() {
            *o = self.x[w] ^ other.x[w];
        }
        for (w, o) in out.z.iter_mut().enumerate() {
            *o = self.z[w] ^ other.z[w];
        }
        out.negative = self.negative ^ other.negative ^ (phase >= 2);
        Ok(out)
    }

    /// Sub-string on the listed qubits, in list order, with sign +1.
    pub fn restrict(&self, qubits: &[usize]) -> Result<Self, PauliError> {
        let mut out = Self::identity(qubits.len());
        for (j, &q) in qubits.iter().enumerate() {
            if q >= self.n {
                return Err(PauliError::QubitOutOfRange { qubit: q, n: self.n });
            }
            out.set_bits(j, self.x_bit(q), self.z_bit(q));
        }
        Ok(out)
    }

    /// Base-4 index of the restriction to `qubits`, without allocating.
    #[inline]
    pub fn restricted_index(&self, qubits: &[usize]) -> usize {
        qubits
            .iter()
            .fold(0, |acc, &q| (acc << 2) | self.letter(q) as usize)
    }

    /// Heisenberg conjugation `G† · self · G` through a Clifford gate.
    pub fn conjugate(&self, gate: &GateOp) -> Result<Self, PauliError> {
        gate.validate(self.n)?;
        let mut out = self.clone();
        match &gate.kind {
            GateKind::Pauli(letters) => {
                // G P G = ±P, negative exactly when G and P anticommute.
                let local = self.restrict(&gate.qubits)?;
                if !letters.commutes_with(&local)? {
                    out.negative = !out.negative;
                }
            }
            GateKind::Cnot => {
                let (c, t) = (gate.qubits[0], gate.qubits[1]);
                let (xc, zc) = (self.x_bit(c), self.z_bit(c));
                let (xt, zt) = (self.x_bit(t), self.z_bit(t));
                if xc && zt && (xt == zc) {
                    out.negative = !out.negative;
                }
                out.set_bits(c, xc, zc ^ zt);
                out.set_bits(t, xt ^ xc, zt);
            }
        }
        Ok(out)
    }
}

/// Exponent `k` (mod 4) of `i` in the product of two single-qubit Hermitian Paulis.
#[inline]
fn phase_exponent(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

/// Whether two k-qubit Paulis given by base-4 index anticommute.
#[inline]
pub fn indices_anticommute(a: usize, b: usize, k: usize) -> bool {
    let mut parity = false;
    for d in 0..k {
        let (la, lb) = ((a >> (2 * d)) & 3, (b >> (2 * d)) & 3);
        parity ^= la != 0 && lb != 0 && la != lb;
    }
    parity
}

/// Index of the product of two k-qubit Paulis, phase discarded.
#[inline]
pub fn multiply_indices(a: usize, b: usize, k: usize) -> usize {
    // Per-digit letter product in I, X, Y, Z code order.
    const TABLE: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
    (0..k).fold(0, |acc, d| {
        let shift = 2 * d;
        acc | (TABLE[(a >> shift) & 3][(b >> shift) & 3] << shift)
    })
}

/// `+1` when the Paulis commute, `-1` when they anticommute.
#[inline]
pub fn commutation_sign(a: usize, b: usize, k: usize) -> f64 {
    if indices_anticommute(a, b, k) {
        -1.0
    } else {
        1.0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.negative { '-' } else { '+' })?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Parses `"+XIZ"`, `"-ZZ"` or an unsigned `"XIZ"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (negative, body) = match s.chars().next() {
            Some('+') => (false, &s[1..]),
            Some('-') => (true, &s[1..]),
            _ => (false, s),
        };
        let letters = body
            .chars()
            .map(|c| Letter::from_char(c).ok_or(PauliError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if letters.is_empty() {
            return Err(PauliError::Parse(s.to_string()));
        }
        let mut p = Self::from_letters(&letters);
        p.negative = negative;
        Ok(p)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Gate kinds supported by the engines. Every kind is Clifford.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateKind {
    /// A Pauli gate; the string has one letter per entry of the gate's qubit list.
    Pauli(PauliString),
    /// Controlled-NOT; qubit list is `[control, target]`.
    Cnot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateOp {
    kind: GateKind,
    qubits: Vec<usize>,
}

impl GateOp {
    pub fn pauli(letters: PauliString, qubits: Vec<usize>) -> Result<Self, PauliError> {
        if letters.num_qubits() != qubits.len() || qubits.is_empty() {
            return Err(PauliError::SizeMismatch {
                left: letters.num_qubits(),
                right: qubits.len(),
            });
        }
        check_distinct(&qubits)?;
        Ok(Self {
            kind: GateKind::Pauli(letters.with_sign(1)),
            qubits,
        })
    }

    pub fn single(letter: Letter, qubit: usize) -> Self {
        Self {
            kind: GateKind::Pauli(PauliString::from_letters(&[letter])),
            qubits: vec![qubit],
        }
    }

    pub fn x(qubit: usize) -> Self {
        Self::single(Letter::X, qubit)
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self, PauliError> {
        let qubits = vec![control, target];
        check_distinct(&qubits)?;
        Ok(Self {
            kind: GateKind::Cnot,
            qubits,
        })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn arity(&self) -> usize {
        self.qubits.len()
    }

    pub fn validate(&self, n: usize) -> Result<(), PauliError> {
        match self.qubits.iter().find(|&&q| q >= n) {
            Some(&qubit) => Err(PauliError::QubitOutOfRange { qubit, n }),
            None => Ok(()),
        }
    }
}

fn check_distinct(qubits: &[usize]) -> Result<(), PauliError> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(PauliError::RepeatedQubit(*q));
        }
    }
    Ok(())
}
