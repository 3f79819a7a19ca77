//! Sparse algebra over n-qubit Pauli strings.
//!
//! A Pauli string is stored in symplectic form as an (x, z) bitmask pair:
//! the operator is the tensor product over qubits of `i^{x_j z_j} X^{x_j} Z^{z_j}`,
//! phase-canonicalized so every single-qubit factor is exactly one of I, X, Y, Z.
//! Hermitian operators are kept as real-coefficient maps over canonical strings,
//! so all the downstream Lie-algebra arithmetic stays in real scalars with the
//! bracket `(a, b) -> -i[a, b]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Coefficients with magnitude below this are dropped after every operation,
/// keeping term maps canonical.
pub const PRUNE_TOL: f64 = 1e-12;

/// Dense materialization refuses above this qubit count (2^n x 2^n complex).
pub const DENSE_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitCountMismatch(usize, usize),
    #[error("dense materialization cap exceeded: {0} qubits > {DENSE_CAP}")]
    DenseCapExceeded(usize),
    #[error("invalid Pauli character '{0}' (expected I, X, Y or Z)")]
    InvalidCharacter(char),
    #[error("empty Pauli string")]
    Empty,
    #[error("qubit count {0} exceeds mask width 64")]
    TooManyQubits(usize),
}

/// One of the four phases closed under Pauli multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    fn from_i_power(k: u32) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn value(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// An n-qubit Pauli string in canonical symplectic form.
///
/// Two strings are equal iff both masks are equal; the all-zero masks are the
/// identity. Qubit 0 is the leftmost character in the text form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
}

impl PauliString {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64) -> Result<Self, PauliError> {
        if n_qubits == 0 || n_qubits > 64 {
            return Err(PauliError::TooManyQubits(n_qubits));
        }
        let width = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        Ok(Self { n_qubits, x_mask: x_mask & width, z_mask: z_mask & width })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, x_mask: 0, z_mask: 0 }
    }

    /// Single-qubit Pauli on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, axis: Axis) -> Self {
        assert!(qubit < n_qubits, "qubit {qubit} out of range for {n_qubits} qubits");
        let bit = 1u64 << qubit;
        let (x, z) = match axis {
            Axis::X => (bit, 0),
            Axis::Y => (bit, bit),
            Axis::Z => (0, bit),
        };
        Self { n_qubits, x_mask: x, z_mask: z }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Number of qubits on which the string acts nontrivially.
    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    pub fn axis_on(&self, qubit: usize) -> Option<Axis> {
        let x = (self.x_mask >> qubit) & 1 == 1;
        let z = (self.z_mask >> qubit) & 1 == 1;
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
        }
    }

    /// True iff the two strings commute (symplectic product is even).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        let s = (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones();
        s % 2 == 0
    }

    /// Exact matrix product `self * other = phase * r`.
    ///
    /// Panics on qubit-count mismatch.
    pub fn multiply(&self, other: &PauliString) -> (Phase, PauliString) {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        let rx = self.x_mask ^ other.x_mask;
        let rz = self.z_mask ^ other.z_mask;
        // i^{x1.z1} i^{x2.z2} (-1)^{z1.x2} = phase * i^{x3.z3}
        let k = (self.x_mask & self.z_mask).count_ones()
            + (other.x_mask & other.z_mask).count_ones()
            + 2 * (self.z_mask & other.x_mask).count_ones()
            + 3 * (rx & rz).count_ones(); // -1 mod 4
        (
            Phase::from_i_power(k),
            PauliString { n_qubits: self.n_qubits, x_mask: rx, z_mask: rz },
        )
    }

    /// Restriction of the string to a qubit subset: (part on `qubits`, true iff
    /// the complement part is identity).
    pub fn split_on(&self, qubits_mask: u64) -> (PauliString, bool) {
        let on = PauliString {
            n_qubits: self.n_qubits,
            x_mask: self.x_mask & qubits_mask,
            z_mask: self.z_mask & qubits_mask,
        };
        let off_trivial =
            (self.x_mask & !qubits_mask) == 0 && (self.z_mask & !qubits_mask) == 0;
        (on, off_trivial)
    }

    /// Dense 2^n x 2^n matrix. Qubit 0 maps to the most significant index bit,
    /// so the matrix equals `kron(P_0, P_1, ..., P_{n-1})`.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>, PauliError> {
        if self.n_qubits > DENSE_CAP {
            return Err(PauliError::DenseCapExceeded(self.n_qubits));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        let (ix, iz) = self.index_masks();
        let y_count = (self.x_mask & self.z_mask).count_ones();
        let base = Complex64::i().powu(y_count);
        for col in 0..dim as u64 {
            let row = col ^ ix;
            let sign = if ((col & iz).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
            m[(row as usize, col as usize)] = base * sign;
        }
        Ok(m)
    }

    /// Masks translated to basis-index bit positions (qubit j -> bit n-1-j).
    pub(crate) fn index_masks(&self) -> (u64, u64) {
        let n = self.n_qubits;
        let flip = |mask: u64| -> u64 {
            let mut out = 0u64;
            for j in 0..n {
                if (mask >> j) & 1 == 1 {
                    out |= 1 << (n - 1 - j);
                }
            }
            out
        };
        (flip(self.x_mask), flip(self.z_mask))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            let c = match self.axis_on(q) {
                None => 'I',
                Some(Axis::X) => 'X',
                Some(Axis::Y) => 'Y',
                Some(Axis::Z) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(PauliError::Empty);
        }
        let n = s.chars().count();
        if n > 64 {
            return Err(PauliError::TooManyQubits(n));
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (q, c) in s.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                'Z' => z |= 1 << q,
                other => return Err(PauliError::InvalidCharacter(other)),
            }
        }
        Ok(Self { n_qubits: n, x_mask: x, z_mask: z })
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    string: PauliString,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct SumRepr {
    n_qubits: usize,
    terms: Vec<TermRepr>,
}

/// A Hermitian operator as a real-coefficient combination of Pauli strings.
///
/// Zero coefficients are absent; coefficients below [`PRUNE_TOL`] are pruned
/// after arithmetic so the map stays canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianPauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl HermitianPauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut sum = Self::zero(n_qubits);
        for (p, c) in terms {
            assert_eq!(p.n_qubits(), n_qubits, "qubit count mismatch");
            *sum.terms.entry(p).or_insert(0.0) += c;
        }
        sum.prune();
        sum
    }

    pub fn single(p: PauliString, coeff: f64) -> Self {
        Self::from_terms(p.n_qubits(), [(p, coeff)])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, p: &PauliString) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() > PRUNE_TOL);
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &HermitianPauliSum) -> Self {
        self.add_scaled(other, 1.0)
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &HermitianPauliSum, factor: f64) -> Self {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        let mut out = self.clone();
        for (p, c) in &other.terms {
            *out.terms.entry(*p).or_insert(0.0) += factor * c;
        }
        out.prune();
        out
    }

    /// The Hermitian bracket `-i[a, b]`, mirroring the anti-Hermitian algebra
    /// `{iH}` onto Hermitian representatives. Bilinear, antisymmetric.
    pub fn bracket(&self, other: &HermitianPauliSum) -> Self {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        let mut out = Self::zero(self.n_qubits);
        for (p, cp) in &self.terms {
            for (q, cq) in &other.terms {
                if p.commutes_with(q) {
                    continue;
                }
                // anticommuting strings: [P,Q] = 2 PQ with PQ = (+-i) R,
                // so -i[P,Q] has real coefficient +-2.
                let (phase, r) = p.multiply(q);
                let sign = match phase {
                    Phase::PlusI => 2.0,
                    Phase::MinusI => -2.0,
                    _ => unreachable!("anticommuting Pauli product must be imaginary"),
                };
                *out.terms.entry(r).or_insert(0.0) += sign * cp * cq;
            }
        }
        out.prune();
        out
    }

    /// Normalized Frobenius inner product `Tr(a b) / 2^n`, under which distinct
    /// Pauli strings are orthonormal.
    pub fn inner(&self, other: &HermitianPauliSum) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (&self.terms, &other.terms)
        } else {
            (&other.terms, &self.terms)
        };
        small
            .iter()
            .filter_map(|(p, c)| large.get(p).map(|d| c * d))
            .sum()
    }

    /// Frobenius norm under the normalized inner product.
    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Sum of absolute coefficients; upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>, PauliError> {
        if self.n_qubits > DENSE_CAP {
            return Err(PauliError::DenseCapExceeded(self.n_qubits));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (p, c) in &self.terms {
            m += p.to_dense()? * Complex64::new(*c, 0.0);
        }
        Ok(m)
    }
}

impl Serialize for HermitianPauliSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SumRepr {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(p, &c)| TermRepr { string: *p, coeff: c })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianPauliSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = SumRepr::deserialize(d)?;
        for t in &repr.terms {
            if t.string.n_qubits() != repr.n_qubits {
                return Err(serde::de::Error::custom(format!(
                    "term '{}' does not match n_qubits = {}",
                    t.string, repr.n_qubits
                )));
            }
        }
        Ok(Self::from_terms(
            repr.n_qubits,
            repr.terms.into_iter().map(|t| (t.string, t.coeff)),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn sum(terms: &[(&str, f64)]) -> HermitianPauliSum {
        let n = terms[0].0.len();
        HermitianPauliSum::from_terms(n, terms.iter().map(|(s, c)| (p(s), *c)))
    }

    fn random_sum(n: usize, n_terms: usize, rng: &mut ChaCha8Rng) -> HermitianPauliSum {
        let width = (1u64 << n) - 1;
        HermitianPauliSum::from_terms(
            n,
            (0..n_terms).map(|_| {
                (
                    PauliString::new(n, rng.gen::<u64>() & width, rng.gen::<u64>() & width)
                        .unwrap(),
                    rng.gen_range(-1.0..1.0),
                )
            }),
        )
    }

    fn dense_commutator_bracket(
        a: &HermitianPauliSum,
        b: &HermitianPauliSum,
    ) -> DMatrix<Complex64> {
        let (da, db) = (a.to_dense().unwrap(), b.to_dense().unwrap());
        (&da * &db - &db * &da) * Complex64::new(0.0, -1.0)
    }

    #[test]
    fn single_qubit_products() {
        let (phase, r) = p("X").multiply(&p("Z"));
        assert_eq!(phase, Phase::MinusI);
        assert_eq!(r, p("Y"));

        let (phase, r) = p("I").multiply(&p("Y"));
        assert_eq!(phase, Phase::PlusOne);
        assert_eq!(r, p("Y"));
    }

    #[test]
    fn two_qubit_product_matches_dense_oracle() {
        // (X(x)Z) * (Z(x)Z) expected from the 4x4 dense product
        let (phase, r) = p("XZ").multiply(&p("ZZ"));
        let dense = p("XZ").to_dense().unwrap() * p("ZZ").to_dense().unwrap();
        let expected = r.to_dense().unwrap() * phase.value();
        assert_eq!(phase, Phase::MinusI);
        assert_eq!(r, p("YI"));
        assert!((dense - expected).norm() < 1e-14);
    }

    #[test]
    fn bracket_basics() {
        // -i[X, Y] = 2Z
        let b = sum(&[("X", 1.0)]).bracket(&sum(&[("Y", 1.0)]));
        assert_eq!(b, sum(&[("Z", 2.0)]));
        // self-commutator vanishes
        let z = sum(&[("Z", 1.0)]);
        assert!(z.bracket(&z).is_zero());
        // -i[X1 + X2, Z(x)Z] = -2 Y(x)Z - 2 Z(x)Y, value frozen from the
        // dense-matrix commutator oracle (see bracket_matches_dense_commutator)
        let b = sum(&[("XI", 1.0), ("IX", 1.0)]).bracket(&sum(&[("ZZ", 1.0)]));
        assert_eq!(b, sum(&[("YZ", -2.0), ("ZY", -2.0)]));
    }

    #[test]
    fn inner_product_basics() {
        assert_abs_diff_eq!(sum(&[("X", 1.0)]).inner(&sum(&[("X", 1.0)])), 1.0);
        assert_abs_diff_eq!(sum(&[("X", 1.0)]).inner(&sum(&[("Z", 1.0)])), 0.0);
        assert_abs_diff_eq!(sum(&[("X", 2.0), ("Z", 1.0)]).inner(&sum(&[("Z", 1.0)])), 1.0);
    }

    #[test]
    fn dense_single_qubit() {
        let z = sum(&[("Z", 1.0)]).to_dense().unwrap();
        assert_abs_diff_eq!(z[(0, 0)].re, 1.0);
        assert_abs_diff_eq!(z[(1, 1)].re, -1.0);
        let x = sum(&[("X", 1.0)]).to_dense().unwrap();
        assert_abs_diff_eq!(x[(0, 1)].re, 1.0);
        assert_abs_diff_eq!(x[(1, 0)].re, 1.0);
    }

    #[test]
    fn dense_is_kron_product() {
        let yz = p("YZ").to_dense().unwrap();
        let y = p("Y").to_dense().unwrap();
        let z = p("Z").to_dense().unwrap();
        let kron = y.kronecker(&z);
        assert!((yz - kron).norm() < 1e-14);
    }

    #[test]
    fn dense_cap_enforced() {
        let big = HermitianPauliSum::single(PauliString::identity(13), 1.0);
        assert!(matches!(big.to_dense(), Err(PauliError::DenseCapExceeded(13))));
    }

    #[test]
    fn bracket_matches_dense_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4 {
            for _ in 0..10 {
                let a = random_sum(n, 4, &mut rng);
                let b = random_sum(n, 4, &mut rng);
                let lhs = a.bracket(&b).to_dense().unwrap();
                let rhs = dense_commutator_bracket(&a, &b);
                assert!((lhs - rhs).norm() < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn inner_matches_dense_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..10 {
                let a = random_sum(n, 4, &mut rng);
                let b = random_sum(n, 4, &mut rng);
                let dense = (a.to_dense().unwrap() * b.to_dense().unwrap()).trace().re
                    / (1u64 << n) as f64;
                assert_abs_diff_eq!(a.inner(&b), dense, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let a = random_sum(3, 3, &mut rng);
            let b = random_sum(3, 3, &mut rng);
            let c = random_sum(3, 3, &mut rng);
            let total = a
                .bracket(&b.bracket(&c))
                .add(&b.bracket(&c.bracket(&a)))
                .add(&c.bracket(&a.bracket(&b)));
            assert!(total.norm() < 1e-12);
        }
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["XIZY", "I", "ZZZZ", "XY"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!(matches!("XQ".parse::<PauliString>(), Err(PauliError::InvalidCharacter('Q'))));
    }

    #[test]
    fn sum_serde_roundtrip() {
        let a = sum(&[("XZ", 0.5), ("YY", -1.25)]);
        let json = serde_json::to_string(&a).unwrap();
        let back: HermitianPauliSum = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
    }
}
