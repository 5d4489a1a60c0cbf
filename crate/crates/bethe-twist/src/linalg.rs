//! Dense square operators and state vectors over dual-mode scalars.
//!
//! Dimensions here are small (at most 4·2^L with L ≤ 8), so operators are
//! plain row-major `Vec<Scalar>` matrices. The multiply skips zero entries:
//! monodromy blocks conserve or shift the magnon grading, which makes them
//! block-sparse, and in exact mode every skipped bigint multiplication
//! matters. Mode and dimension mismatches are programming errors and panic;
//! all user-facing validation happens upstream.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::scalar::{Mode, Scalar};

/// A nonnegative residual magnitude in one of the two modes.
///
/// Exact-mode checks must come out at exactly zero; float-mode checks compare
/// against a tolerance. [`Residual::passes`] encodes exactly that rule.
#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    Exact(BigRational),
    Float(f64),
}

impl Residual {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Residual::Exact(BigRational::zero()),
            Mode::Float => Residual::Float(0.0),
        }
    }

    /// `|s|` as a residual (modulus in float mode).
    pub fn from_scalar(s: &Scalar) -> Self {
        match s {
            Scalar::Exact(r) => Residual::Exact(r.abs()),
            Scalar::Float(z) => Residual::Float(z.norm()),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Residual::Exact(_) => Mode::Exact,
            Residual::Float(_) => Mode::Float,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Residual::Exact(r) => r.is_zero(),
            Residual::Float(v) => *v == 0.0,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Residual::Exact(r) => r.to_f64().unwrap_or(f64::INFINITY),
            Residual::Float(v) => *v,
        }
    }

    /// Exact residuals pass only at zero; float residuals pass at or below
    /// the tolerance.
    pub fn passes(&self, tolerance: f64) -> bool {
        match self {
            Residual::Exact(r) => r.is_zero(),
            Residual::Float(v) => v.is_finite() && *v <= tolerance,
        }
    }

    /// Pointwise maximum; both sides must share a mode.
    pub fn max(self, other: Residual) -> Residual {
        match (self, other) {
            (Residual::Exact(a), Residual::Exact(b)) => Residual::Exact(a.max(b)),
            (Residual::Float(a), Residual::Float(b)) => Residual::Float(a.max(b)),
            _ => panic!("residual mode mismatch in max"),
        }
    }
}

impl std::fmt::Display for Residual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Decimal rendering for reports; exact zero prints as a bare "0".
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "{:.3e}", self.as_f64())
    }
}

/// Dense square operator.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    dim: usize,
    mode: Mode,
    data: Vec<Scalar>,
}

impl LinearOperator {
    pub fn zeros(dim: usize, mode: Mode) -> Self {
        LinearOperator {
            dim,
            mode,
            data: vec![Scalar::zero(mode); dim * dim],
        }
    }

    pub fn identity(dim: usize, mode: Mode) -> Self {
        let mut out = Self::zeros(dim, mode);
        for i in 0..dim {
            out.set(i, i, Scalar::one(mode));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        debug_assert_eq!(value.mode(), self.mode);
        self.data[row * self.dim + col] = value;
    }

    fn assert_compatible(&self, other: &LinearOperator, op: &str) {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch in {op}");
        assert_eq!(self.mode, other.mode, "operator mode mismatch in {op}");
    }

    /// Matrix product, skipping zero entries on both sides.
    pub fn mul(&self, rhs: &LinearOperator) -> LinearOperator {
        self.assert_compatible(rhs, "mul");
        let n = self.dim;
        let mut out = LinearOperator::zeros(n, self.mode);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let bkj = rhs.get(k, j);
                    if bkj.is_zero() {
                        continue;
                    }
                    let idx = i * n + j;
                    out.data[idx] = &out.data[idx] + &(aik * bkj);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &LinearOperator) -> LinearOperator {
        self.assert_compatible(rhs, "add");
        let data = self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a + b).collect();
        LinearOperator { dim: self.dim, mode: self.mode, data }
    }

    pub fn sub(&self, rhs: &LinearOperator) -> LinearOperator {
        self.assert_compatible(rhs, "sub");
        let data = self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a - b).collect();
        LinearOperator { dim: self.dim, mode: self.mode, data }
    }

    pub fn scale(&self, factor: &Scalar) -> LinearOperator {
        assert_eq!(factor.mode(), self.mode, "operator mode mismatch in scale");
        if factor.is_zero() {
            return LinearOperator::zeros(self.dim, self.mode);
        }
        let data = self.data.iter().map(|a| a * factor).collect();
        LinearOperator { dim: self.dim, mode: self.mode, data }
    }

    /// Adds `factor * src` into `self` at the quadrant offset, skipping zeros.
    /// Used by the monodromy recursion to place scaled sub-blocks.
    pub fn accumulate_scaled(&mut self, row_off: usize, col_off: usize, factor: &Scalar, src: &LinearOperator) {
        if factor.is_zero() {
            return;
        }
        assert_eq!(factor.mode(), self.mode, "mode mismatch in accumulate_scaled");
        for i in 0..src.dim {
            for j in 0..src.dim {
                let v = src.get(i, j);
                if v.is_zero() {
                    continue;
                }
                let idx = (row_off + i) * self.dim + (col_off + j);
                self.data[idx] = &self.data[idx] + &(factor * v);
            }
        }
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim, v.len(), "dimension mismatch in apply");
        assert_eq!(self.mode, v.mode(), "mode mismatch in apply");
        let mut out = StateVector::zero(self.dim, self.mode);
        for i in 0..self.dim {
            let mut acc = Scalar::zero(self.mode);
            for j in 0..self.dim {
                let a = self.get(i, j);
                if a.is_zero() || v.get(j).is_zero() {
                    continue;
                }
                acc = &acc + &(a * v.get(j));
            }
            out.set(i, acc);
        }
        out
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = Scalar::zero(self.mode);
        for i in 0..self.dim {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    /// Max-norm: the largest entry magnitude.
    pub fn max_norm(&self) -> Residual {
        let mut out = Residual::zero(self.mode);
        for e in &self.data {
            out = out.max(Residual::from_scalar(e));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }
}

/// `AB - BA`.
pub fn commutator(a: &LinearOperator, b: &LinearOperator) -> LinearOperator {
    a.mul(b).sub(&b.mul(a))
}

/// Dense state vector on the chain space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    mode: Mode,
    data: Vec<Scalar>,
}

impl StateVector {
    pub fn zero(dim: usize, mode: Mode) -> Self {
        StateVector { mode, data: vec![Scalar::zero(mode); dim] }
    }

    /// The standard basis vector `e_index`.
    pub fn basis(dim: usize, index: usize, mode: Mode) -> Self {
        let mut v = Self::zero(dim, mode);
        v.set(index, Scalar::one(mode));
        v
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    #[inline]
    pub fn get(&self, i: usize) -> &Scalar {
        &self.data[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: Scalar) {
        debug_assert_eq!(value.mode(), self.mode);
        self.data[i] = value;
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.data.iter()
    }

    fn assert_compatible(&self, other: &StateVector, op: &str) {
        assert_eq!(self.len(), other.len(), "vector dimension mismatch in {op}");
        assert_eq!(self.mode, other.mode, "vector mode mismatch in {op}");
    }

    pub fn add(&self, rhs: &StateVector) -> StateVector {
        self.assert_compatible(rhs, "add");
        let data = self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a + b).collect();
        StateVector { mode: self.mode, data }
    }

    pub fn sub(&self, rhs: &StateVector) -> StateVector {
        self.assert_compatible(rhs, "sub");
        let data = self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a - b).collect();
        StateVector { mode: self.mode, data }
    }

    pub fn scale(&self, factor: &Scalar) -> StateVector {
        assert_eq!(factor.mode(), self.mode, "vector mode mismatch in scale");
        let data = self.data.iter().map(|a| a * factor).collect();
        StateVector { mode: self.mode, data }
    }

    /// Inner product `⟨self, rhs⟩`, conjugating the left side in float mode
    /// (exact scalars are real, so exact mode is the plain bilinear form).
    pub fn dot(&self, rhs: &StateVector) -> Scalar {
        self.assert_compatible(rhs, "dot");
        let mut acc = Scalar::zero(self.mode);
        for (a, b) in self.data.iter().zip(rhs.data.iter()) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc = &acc + &(&a.conj() * b);
        }
        acc
    }

    pub fn max_norm(&self) -> Residual {
        let mut out = Residual::zero(self.mode);
        for e in &self.data {
            out = out.max(Residual::from_scalar(e));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::rational(p, d).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let mut m = LinearOperator::zeros(3, Mode::Exact);
        m.set(0, 1, q(2, 3));
        m.set(2, 0, q(-1, 2));
        m.set(1, 1, q(5, 1));
        let id = LinearOperator::identity(3, Mode::Exact);
        assert_eq!(m.mul(&id), m);
        assert_eq!(id.mul(&m), m);
    }

    #[test]
    fn mul_matches_hand_computation() {
        // [[1,2],[3,4]] * [[0,1],[1,0]] = [[2,1],[4,3]]
        let mut a = LinearOperator::zeros(2, Mode::Exact);
        a.set(0, 0, q(1, 1));
        a.set(0, 1, q(2, 1));
        a.set(1, 0, q(3, 1));
        a.set(1, 1, q(4, 1));
        let mut p = LinearOperator::zeros(2, Mode::Exact);
        p.set(0, 1, q(1, 1));
        p.set(1, 0, q(1, 1));
        let ap = a.mul(&p);
        assert_eq!(ap.get(0, 0), &q(2, 1));
        assert_eq!(ap.get(0, 1), &q(1, 1));
        assert_eq!(ap.get(1, 0), &q(4, 1));
        assert_eq!(ap.get(1, 1), &q(3, 1));
    }

    #[test]
    fn trace_and_norm() {
        let mut m = LinearOperator::zeros(2, Mode::Exact);
        m.set(0, 0, q(1, 2));
        m.set(1, 1, q(-3, 2));
        m.set(0, 1, q(-7, 4));
        assert_eq!(m.trace(), q(-1, 1));
        assert_eq!(m.max_norm(), Residual::Exact(q(7, 4).as_exact().unwrap().clone()));
    }

    #[test]
    fn apply_and_dot() {
        let mut m = LinearOperator::zeros(2, Mode::Float);
        m.set(0, 1, Scalar::complex(0.0, 1.0));
        m.set(1, 0, Scalar::complex(0.0, -1.0));
        let v = StateVector::basis(2, 0, Mode::Float);
        let w = m.apply(&v);
        assert_eq!(w.get(1), &Scalar::complex(0.0, -1.0));
        // float dot conjugates the left argument: <iv, iv> = |i|^2 = 1 real
        let iv = v.scale(&Scalar::complex(0.0, 1.0));
        assert!(iv.dot(&iv).distance_f64(&Scalar::real(1.0)) < 1e-15);
    }

    #[test]
    fn commutator_of_commuting_is_zero() {
        let mut a = LinearOperator::zeros(2, Mode::Exact);
        a.set(0, 0, q(2, 1));
        a.set(1, 1, q(3, 1));
        let mut b = LinearOperator::zeros(2, Mode::Exact);
        b.set(0, 0, q(-1, 5));
        b.set(1, 1, q(7, 2));
        assert!(commutator(&a, &b).is_zero());
    }

    #[test]
    fn residual_pass_rules() {
        assert!(Residual::zero(Mode::Exact).passes(0.0));
        let tiny = Residual::Exact(q(1, 1_000_000_000).as_exact().unwrap().clone());
        // exact nonzero never passes, no matter the tolerance
        assert!(!tiny.passes(1.0));
        assert!(Residual::Float(1e-12).passes(1e-10));
        assert!(!Residual::Float(1e-8).passes(1e-10));
        assert!(!Residual::Float(f64::NAN).passes(1e-10));
        assert_eq!(Residual::zero(Mode::Exact).to_string(), "0");
    }

    #[test]
    fn accumulate_scaled_places_quadrants() {
        let mut big = LinearOperator::zeros(4, Mode::Exact);
        let mut small = LinearOperator::zeros(2, Mode::Exact);
        small.set(0, 1, q(1, 1));
        small.set(1, 0, q(2, 1));
        big.accumulate_scaled(2, 0, &q(3, 1), &small);
        assert_eq!(big.get(2, 1), &q(3, 1));
        assert_eq!(big.get(3, 0), &q(6, 1));
        assert!(big.get(0, 0).is_zero());
    }
}
