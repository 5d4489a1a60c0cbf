//! Twisted monodromy matrices.
//!
//! A unimodular 2×2 matrix `kappa` acts on the monodromy matrix by
//! conjugation in the auxiliary space, `T(u) -> kappa T(u) kappa^{-1}`.
//! Because the entries of `T` are themselves operators on the chain space,
//! the conjugated entries are explicit linear combinations of `A, B, C, D`
//! with coefficients built from the entries of `kappa`. Both routes — the
//! closed-form linear combinations and literal 2×2 conjugation with
//! operator-valued entries — are implemented, so each can serve as an
//! oracle for the other.

use crate::error::{Error, Result};
use crate::kernel::ParamSet;
use crate::linalg::{LinearOperator, Residual, StateVector};
use crate::scalar::{Mode, Scalar, COLLISION_DELTA};
use crate::chain::{Monodromy, SpinChainModel};

/// A unimodular twist matrix `[[k11, k12], [k21, k22]]` with `det = 1` and
/// `k11 != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistMatrix {
    k11: Scalar,
    k12: Scalar,
    k21: Scalar,
    k22: Scalar,
}

impl TwistMatrix {
    pub fn new(k11: Scalar, k12: Scalar, k21: Scalar, k22: Scalar) -> Result<Self> {
        let mode = k11.mode();
        for (name, k) in [("k12", &k12), ("k21", &k21), ("k22", &k22)] {
            if k.mode() != mode {
                return Err(Error::ModeMismatch(format!(
                    "twist entry {name} has mode {} but k11 has mode {mode}",
                    k.mode()
                )));
            }
        }
        let det = &(&k11 * &k22) - &(&k12 * &k21);
        let det_dev = &det - &Scalar::one(mode);
        let unimodular = match mode {
            Mode::Exact => det_dev.is_zero(),
            Mode::Float => det_dev.abs_f64() < COLLISION_DELTA,
        };
        if !unimodular {
            return Err(Error::InvalidTwist(format!(
                "twist matrix must have determinant 1, got {det}"
            )));
        }
        let k11_zero = match mode {
            Mode::Exact => k11.is_zero(),
            Mode::Float => k11.abs_f64() < COLLISION_DELTA,
        };
        if k11_zero {
            return Err(Error::InvalidTwist(
                "twist entry k11 must be nonzero".into(),
            ));
        }
        Ok(TwistMatrix { k11, k12, k21, k22 })
    }

    /// The identity twist.
    pub fn identity(mode: Mode) -> Self {
        TwistMatrix {
            k11: Scalar::one(mode),
            k12: Scalar::zero(mode),
            k21: Scalar::zero(mode),
            k22: Scalar::one(mode),
        }
    }

    pub fn mode(&self) -> Mode {
        self.k11.mode()
    }

    pub fn k11(&self) -> &Scalar {
        &self.k11
    }

    pub fn k12(&self) -> &Scalar {
        &self.k12
    }

    pub fn k21(&self) -> &Scalar {
        &self.k21
    }

    pub fn k22(&self) -> &Scalar {
        &self.k22
    }

    pub fn entries(&self) -> [[&Scalar; 2]; 2] {
        [[&self.k11, &self.k12], [&self.k21, &self.k22]]
    }

    /// `kappa^{-1} = [[k22, -k12], [-k21, k11]]` (determinant is 1).
    pub fn inverse_entries(&self) -> [[Scalar; 2]; 2] {
        [
            [self.k22.clone(), -&self.k12],
            [-&self.k21, self.k11.clone()],
        ]
    }

    /// The ratio `k21 / k11` steering the unwanted terms of the twisted
    /// reference-state action.
    pub fn ratio_lower(&self) -> Scalar {
        self.k21
            .checked_div(&self.k11)
            .expect("k11 validated nonzero")
    }

    /// True when `k12` is usable as a denominator (required by the magnon
    /// expansion of the twisted creation operator).
    pub fn has_nonzero_k12(&self) -> bool {
        match self.mode() {
            Mode::Exact => !self.k12.is_zero(),
            Mode::Float => self.k12.abs_f64() >= COLLISION_DELTA,
        }
    }

    pub fn to_float(&self) -> TwistMatrix {
        TwistMatrix {
            k11: self.k11.to_float(),
            k12: self.k12.to_float(),
            k21: self.k21.to_float(),
            k22: self.k22.to_float(),
        }
    }
}

impl std::fmt::Display for TwistMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.k11, self.k12, self.k21, self.k22
        )
    }
}

/// Twisted monodromy entries as closed-form linear combinations:
///
/// ```text
/// At = k11 k22 A - k11 k21 B + k12 k22 C - k12 k21 D
/// Bt = k11^2  B + k11 k12 (D - A) - k12^2 C
/// Ct = k21 k22 A - k21^2  B + k22^2 C - k21 k22 D
/// Dt = k11 k22 D + k11 k21 B - k12 k22 C - k12 k21 A
/// ```
pub fn twisted_monodromy(t: &Monodromy, kappa: &TwistMatrix) -> Monodromy {
    let k11 = &kappa.k11;
    let k12 = &kappa.k12;
    let k21 = &kappa.k21;
    let k22 = &kappa.k22;

    let at = t
        .a
        .scale(&(k11 * k22))
        .sub(&t.b.scale(&(k11 * k21)))
        .add(&t.c.scale(&(k12 * k22)))
        .sub(&t.d.scale(&(k12 * k21)));
    let bt = t
        .b
        .scale(&(k11 * k11))
        .add(&t.d.sub(&t.a).scale(&(k11 * k12)))
        .sub(&t.c.scale(&(k12 * k12)));
    let ct = t
        .a
        .scale(&(k21 * k22))
        .sub(&t.b.scale(&(k21 * k21)))
        .add(&t.c.scale(&(k22 * k22)))
        .sub(&t.d.scale(&(k21 * k22)));
    let dt = t
        .d
        .scale(&(k11 * k22))
        .add(&t.b.scale(&(k11 * k21)))
        .sub(&t.c.scale(&(k12 * k22)))
        .sub(&t.a.scale(&(k12 * k21)));

    Monodromy {
        a: at,
        b: bt,
        c: ct,
        d: dt,
    }
}

/// Oracle route: literal 2×2 conjugation `kappa T kappa^{-1}` with
/// operator-valued entries.
pub fn conjugated_monodromy(t: &Monodromy, kappa: &TwistMatrix) -> Monodromy {
    let k = kappa.entries();
    let kinv = kappa.inverse_entries();
    let dim = t.dim();
    let mode = kappa.mode();
    // (kappa T kappa^{-1})_{ij} = sum_{p,q} kappa[i][p] T[p][q] kinv[q][j]
    let entry = |i: usize, j: usize| -> LinearOperator {
        let mut acc = LinearOperator::zeros(dim, mode);
        for p in 0..2 {
            for q in 0..2 {
                let coeff = k[i][p] * &kinv[q][j];
                if coeff.is_zero() {
                    continue;
                }
                let block = match (p, q) {
                    (0, 0) => &t.a,
                    (0, 1) => &t.b,
                    (1, 0) => &t.c,
                    (1, 1) => &t.d,
                    _ => unreachable!(),
                };
                acc = acc.add(&block.scale(&coeff));
            }
        }
        acc
    };
    Monodromy {
        a: entry(0, 0),
        b: entry(0, 1),
        c: entry(1, 0),
        d: entry(1, 1),
    }
}

/// Max-norm residual between the closed-form linear combinations and the
/// literal conjugation, over all four entries.
pub fn twist_route_residual(t: &Monodromy, kappa: &TwistMatrix) -> Residual {
    let lhs = twisted_monodromy(t, kappa);
    let rhs = conjugated_monodromy(t, kappa);
    lhs.a
        .sub(&rhs.a)
        .max_norm()
        .max(lhs.b.sub(&rhs.b).max_norm())
        .max(lhs.c.sub(&rhs.c).max_norm())
        .max(lhs.d.sub(&rhs.d).max_norm())
}

/// Max-norm residual of trace preservation,
/// `(At + Dt) - (A + D)`.
pub fn trace_preservation_residual(t: &Monodromy, kappa: &TwistMatrix) -> Residual {
    let twisted = twisted_monodromy(t, kappa);
    twisted.transfer().sub(&t.transfer()).max_norm()
}

/// The twisted creation operator `Bt(u)` alone.
pub fn twisted_b(t: &Monodromy, kappa: &TwistMatrix) -> LinearOperator {
    twisted_monodromy(t, kappa).b
}

/// Residuals of the twisted diagonal entries acting on the reference state:
///
/// ```text
/// At(z)|0> = a(z)|0> - (k21/k11) Bt(z)|0>
/// Dt(z)|0> = d(z)|0> + (k21/k11) Bt(z)|0>
/// ```
///
/// Returns `(residual_a, residual_d)`.
pub fn twisted_vacuum_residuals(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    z: &Scalar,
) -> Result<(Residual, Residual)> {
    let profile = model.vacuum_profile();
    let t = model.monodromy(z)?;
    let twisted = twisted_monodromy(&t, kappa);
    let vacuum = model.vacuum_state();
    let ratio = kappa.ratio_lower();

    let a_val = crate::kernel::a_over(&profile, &ParamSet::singleton(z.clone()))?;
    let d_val = crate::kernel::d_over(&profile, &ParamSet::singleton(z.clone()))?;
    let bt_vac = twisted.b.apply(&vacuum);

    let lhs_a = twisted.a.apply(&vacuum);
    let rhs_a = vacuum.scale(&a_val).sub(&bt_vac.scale(&ratio));
    let res_a = lhs_a.sub(&rhs_a).max_norm();

    let lhs_d = twisted.d.apply(&vacuum);
    let rhs_d = vacuum.scale(&d_val).add(&bt_vac.scale(&ratio));
    let res_d = lhs_d.sub(&rhs_d).max_norm();

    Ok((res_a, res_d))
}

/// A general (not necessarily unimodular) 2×2 scalar matrix, used to probe
/// two-sided transformations `kappa1 T kappa2`.
#[derive(Clone, Debug)]
pub struct Mat2 {
    pub entries: [[Scalar; 2]; 2],
}

impl Mat2 {
    pub fn new(entries: [[Scalar; 2]; 2]) -> Self {
        Mat2 { entries }
    }

    pub fn mode(&self) -> Mode {
        self.entries[0][0].mode()
    }
}

/// The two-sided transformation `T -> kappa1 T kappa2` with operator-valued
/// entries, no invertibility or unimodularity required.
pub fn two_sided_transform(t: &Monodromy, left: &Mat2, right: &Mat2) -> Monodromy {
    let dim = t.dim();
    let mode = left.mode();
    let block = |p: usize, q: usize| match (p, q) {
        (0, 0) => &t.a,
        (0, 1) => &t.b,
        (1, 0) => &t.c,
        (1, 1) => &t.d,
        _ => unreachable!(),
    };
    let entry = |i: usize, j: usize| -> LinearOperator {
        let mut acc = LinearOperator::zeros(dim, mode);
        for p in 0..2 {
            for q in 0..2 {
                let coeff = &left.entries[i][p] * &right.entries[q][j];
                if coeff.is_zero() {
                    continue;
                }
                acc = acc.add(&block(p, q).scale(&coeff));
            }
        }
        acc
    };
    Monodromy {
        a: entry(0, 0),
        b: entry(0, 1),
        c: entry(1, 0),
        d: entry(1, 1),
    }
}

/// Max-norm residual of `[R(u,v), kappa ⊗ kappa] = 0` on the 4-dimensional
/// auxiliary tensor square — the invariance that makes conjugation preserve
/// the exchange relation.
pub fn twist_exchange_invariance_residual(
    kappa: &TwistMatrix,
    u: &Scalar,
    v: &Scalar,
    c: &Scalar,
) -> Result<Residual> {
    let r = crate::chain::r_matrix(u, v, c)?;
    let mode = kappa.mode();
    let k = kappa.entries();
    let mut kk = LinearOperator::zeros(4, mode);
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    let val = k[i1][j1] * k[i2][j2];
                    if !val.is_zero() {
                        kk.set(2 * i1 + i2, 2 * j1 + j2, val);
                    }
                }
            }
        }
    }
    Ok(crate::linalg::commutator(&r, &kk).max_norm())
}

/// The product `Bt(u_n) ... Bt(u_1) |0>` of twisted creation operators.
pub fn twisted_bethe_state(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
) -> Result<StateVector> {
    us.check_pairwise_distinct("creation parameters")?;
    let mut state = model.vacuum_state();
    for u in us.iter() {
        let t = model.monodromy(u)?;
        state = twisted_b(&t, kappa).apply(&state);
    }
    Ok(state)
}
