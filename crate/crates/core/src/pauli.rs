//! n-qubit Pauli strings in symplectic bit encoding.
//!
//! Qubit `i` carries bit `i` of the `x` and `z` masks, with
//! `(x, z) = (0,0)/(1,0)/(1,1)/(0,1)` standing for `I/X/Y/Z`. Global phases
//! are never stored; they only appear in the return value of
//! [`PauliString::multiply`].
//!
//! The text form uses the alphabet `{I,X,Y,Z}` with the leftmost character
//! describing qubit 0. Dense matrices follow the same convention: qubit 0 is
//! the leftmost tensor factor, i.e. the most significant bit of a
//! computational basis index.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use faer::c64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure, Error, Result};
use crate::linalg::CMat;

/// Width of the bit masks.
pub const MAX_QUBITS: usize = 64;

/// Hard ceiling for anything that materializes `4^n`-sized objects.
pub const MAX_DENSE_QUBITS: usize = 6;

/// Single-site Pauli letter, ordered `I < X < Y < Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn code(self) -> usize {
        self as usize
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A power of `i`: one of `{1, i, -1, -i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> c64 {
        match self.0 {
            0 => c64::new(1.0, 0.0),
            1 => c64::new(0.0, 1.0),
            2 => c64::new(-1.0, 0.0),
            _ => c64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_qubits(n: usize) -> Result<()> {
    ensure!(n >= 1, Domain, "a Pauli string needs at least one qubit");
    ensure!(n <= MAX_QUBITS, Capacity, "{n} qubits exceeds the {MAX_QUBITS}-qubit bit-mask width");
    Ok(())
}

fn check_dense(n: usize) -> Result<()> {
    check_qubits(n)?;
    ensure!(
        n <= MAX_DENSE_QUBITS,
        Capacity,
        "{n} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}"
    );
    Ok(())
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self { n: n as u8, x: 0, z: 0 })
    }

    /// Builds a string from raw masks; bit `i` describes qubit `i`.
    pub fn from_bits(n: usize, x: u64, z: u64) -> Result<Self> {
        check_qubits(n)?;
        let extra = !low_mask(n);
        ensure!(
            (x | z) & extra == 0,
            Domain,
            "bit masks set bits beyond qubit {}",
            n - 1
        );
        Ok(Self { n: n as u8, x, z })
    }

    pub fn from_letters(letters: &[Pauli]) -> Result<Self> {
        check_qubits(letters.len())?;
        let (mut x, mut z) = (0u64, 0u64);
        for (i, p) in letters.iter().enumerate() {
            let (xb, zb) = p.bits();
            x |= (xb as u64) << i;
            z |= (zb as u64) << i;
        }
        Ok(Self { n: letters.len() as u8, x, z })
    }

    /// The string acting as `letter` on `site` and trivially elsewhere.
    pub fn single(n: usize, site: usize, letter: Pauli) -> Result<Self> {
        check_qubits(n)?;
        ensure!(site < n, Domain, "site {site} out of range for {n} qubits");
        let (xb, zb) = letter.bits();
        Ok(Self {
            n: n as u8,
            x: (xb as u64) << site,
            z: (zb as u64) << site,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn letter(&self, site: usize) -> Pauli {
        Pauli::from_bits(self.x >> site & 1 == 1, self.z >> site & 1 == 1)
    }

    pub fn letters(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.num_qubits()).map(|i| self.letter(i))
    }

    pub fn is_identity(&self) -> bool {
        self.x | self.z == 0
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    /// Qubits acted on non-trivially, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits())
            .filter(|&i| self.support_mask() >> i & 1 == 1)
            .collect()
    }

    fn same_size(&self, other: &Self) -> Result<()> {
        ensure!(
            self.n == other.n,
            Dimension,
            "Pauli strings on {} and {} qubits",
            self.n,
            other.n
        );
        Ok(())
    }

    /// `true` when the strings anticommute. Sizes are not checked.
    #[inline]
    pub(crate) fn anticommutes(&self, other: &Self) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() & 1 == 1
    }

    /// Commutation sign: `+1` if the strings commute, `-1` otherwise.
    pub fn chi(&self, other: &Self) -> Result<i8> {
        self.same_size(other)?;
        Ok(if self.anticommutes(other) { -1 } else { 1 })
    }

    /// `chi` as a float, for use inside matrix kernels. Sizes are not checked.
    #[inline]
    pub(crate) fn sign(&self, other: &Self) -> f64 {
        if self.anticommutes(other) {
            -1.0
        } else {
            1.0
        }
    }

    /// Returns `(phase, R)` with `phase * R = self * other` as matrices.
    pub fn multiply(&self, other: &Self) -> Result<(Phase, PauliString)> {
        self.same_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> (Phase, PauliString) {
        // Sites where both factors are non-identity and differ contribute
        // +i for cyclic (X,Y), (Y,Z), (Z,X) and -i otherwise.
        let mut power = 0u32;
        let mut both = self.support_mask() & other.support_mask();
        while both != 0 {
            let i = both.trailing_zeros() as usize;
            both &= both - 1;
            let a = self.letter(i);
            let b = other.letter(i);
            if a != b {
                power += match (a, b) {
                    (Pauli::X, Pauli::Y) | (Pauli::Y, Pauli::Z) | (Pauli::Z, Pauli::X) => 1,
                    _ => 3,
                };
            }
        }
        let product = PauliString {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        (Phase::from_power(power), product)
    }

    /// Position in the canonical order used for transfer-matrix rows and
    /// columns: base-4 digits `I=0, X=1, Y=2, Z=3`, qubit 0 most significant.
    pub fn index(&self) -> usize {
        debug_assert!(self.num_qubits() <= 31);
        self.letters().fold(0, |acc, p| acc * 4 + p.code())
    }

    pub fn from_index(n: usize, index: usize) -> Result<Self> {
        check_dense(n)?;
        ensure!(index < 1 << (2 * n), Domain, "index {index} out of range for {n} qubits");
        let mut rest = index;
        let mut letters = vec![Pauli::I; n];
        for slot in letters.iter_mut().rev() {
            *slot = match rest % 4 {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            };
            rest /= 4;
        }
        Self::from_letters(&letters)
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn matrix(&self) -> Result<CMat> {
        let n = self.num_qubits();
        check_dense(n)?;
        let dim = 1usize << n;
        let xr = basis_mask(self.x, n);
        let zr = basis_mask(self.z, n);
        let base = Phase::from_power((self.x & self.z).count_ones()).to_complex();
        let mut m = CMat::zeros(dim, dim);
        for col in 0..dim {
            let flip = if (zr & col).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
            m[(col ^ xr, col)] = base * flip;
        }
        Ok(m)
    }

    /// `(row, value)` for the single non-zero entry in column `col` of the
    /// dense matrix.
    #[inline]
    pub(crate) fn column_entry(&self, col: usize) -> (usize, c64) {
        let n = self.num_qubits();
        let xr = basis_mask(self.x, n);
        let zr = basis_mask(self.z, n);
        let base = Phase::from_power((self.x & self.z).count_ones()).to_complex();
        let flip = if (zr & col).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        (col ^ xr, base * flip)
    }
}

/// Re-indexes a qubit mask so that qubit 0 becomes the most significant of
/// `n` basis-index bits.
fn basis_mask(mask: u64, n: usize) -> usize {
    (0..n).fold(0usize, |acc, i| acc | ((mask >> i & 1) as usize) << (n - 1 - i))
}

/// All `4^n` strings in canonical order, identity first.
pub fn enumerate_all(n: usize) -> Result<Vec<PauliString>> {
    check_dense(n)?;
    (0..1usize << (2 * n))
        .map(|i| PauliString::from_index(n, i))
        .collect()
}

/// Uniformly random string; every site is independently uniform over
/// `{I,X,Y,Z}`.
pub fn sample_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PauliString> {
    check_qubits(n)?;
    let mask = low_mask(n);
    let x = rng.random::<u64>() & mask;
    let z = rng.random::<u64>() & mask;
    Ok(PauliString { n: n as u8, x, z })
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.letters().cmp(other.letters()))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.letters().map(Pauli::as_char).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!(
                    "invalid Pauli letter {other:?} in {s:?} (expected I, X, Y or Z)"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        ensure!(!letters.is_empty(), Parse, "empty Pauli string");
        Self::from_letters(&letters)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
