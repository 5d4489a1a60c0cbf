//! The inhomogeneous rational spin-1/2 chain as explicit linear operators.
//!
//! A chain of `L` sites lives on the 2^L-dimensional space spanned by
//! bit-strings: bit `m-1` of a basis index holds the state of site `m`
//! (0 = up, 1 = down), and index 0 is the all-up reference state. The
//! monodromy matrix is a 2×2 array of operators on that space,
//!
//! ```text
//!     T(u) = [ A(u)  B(u) ]
//!            [ C(u)  D(u) ]
//! ```
//!
//! built site by site: appending site `m` maps each entry to a combination
//! of Kronecker products with the site-`m` local matrix, which costs
//! O(4^L) per spectral point instead of the naive product of 4·2^L
//! matrices. `B` creates magnons (flips a spin down), `C` annihilates
//! them, and `A`, `D` preserve the magnon number.

use crate::error::{Error, Result};
use crate::kernel::{f_fn, g_fn, ParamSet, VacuumFunctions};
use crate::linalg::{LinearOperator, Residual, StateVector};
use crate::scalar::{Mode, Scalar, COLLISION_DELTA};

/// Largest supported chain length; 2^8 = 256 keeps exact arithmetic viable.
pub const MAX_LENGTH: usize = 8;

/// Which entry of the 2×2 monodromy matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    A,
    B,
    C,
    D,
}

impl std::fmt::Display for EntryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EntryKind::A => "A",
            EntryKind::B => "B",
            EntryKind::C => "C",
            EntryKind::D => "D",
        };
        write!(f, "{s}")
    }
}

/// The four operator-valued entries of the monodromy matrix at one point.
#[derive(Clone, Debug)]
pub struct Monodromy {
    pub a: LinearOperator,
    pub b: LinearOperator,
    pub c: LinearOperator,
    pub d: LinearOperator,
}

impl Monodromy {
    pub fn entry(&self, kind: EntryKind) -> &LinearOperator {
        match kind {
            EntryKind::A => &self.a,
            EntryKind::B => &self.b,
            EntryKind::C => &self.c,
            EntryKind::D => &self.d,
        }
    }

    /// The transfer matrix `A + D` (the matrix trace over the 2×2 structure).
    pub fn transfer(&self) -> LinearOperator {
        self.a.add(&self.d)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

/// Eigenvalue functions of the reference state: `a(u) = prod_k f(u, xi_k)`
/// and `d(u) = 1`.
#[derive(Clone, Debug)]
pub struct VacuumProfile {
    c: Scalar,
    xi: ParamSet,
}

impl VacuumFunctions for VacuumProfile {
    fn vacuum_a(&self, u: &Scalar) -> Result<Scalar> {
        let mut acc = Scalar::one(u.mode());
        for xi in self.xi.iter() {
            acc = &acc * &f_fn(u, xi, &self.c)?;
        }
        Ok(acc)
    }

    fn vacuum_d(&self, u: &Scalar) -> Result<Scalar> {
        Ok(Scalar::one(u.mode()))
    }
}

impl VacuumProfile {
    /// Logarithmic-derivative-free derivative of `a` by the product rule:
    /// `a'(u) = a(u) * sum_k f'(u, xi_k) / f(u, xi_k)`, with
    /// `f'(u, v) = -c / (u - v)^2`. Only used by the float-mode solver.
    pub fn vacuum_a_derivative(&self, u: &Scalar) -> Result<Scalar> {
        let a = self.vacuum_a(u)?;
        let mut acc = Scalar::zero(u.mode());
        for xi in self.xi.iter() {
            let diff = u - xi;
            let denom = (&diff * &diff) + (&diff * &self.c);
            let term = (-&self.c).checked_div(&denom).map_err(|_| {
                Error::Pole(format!("derivative of reference eigenvalue at u = {u}"))
            })?;
            acc = &acc + &term;
        }
        Ok(&a * &acc)
    }
}

/// An inhomogeneous spin-1/2 chain with fixed coupling constant and
/// inhomogeneity parameters.
#[derive(Clone, Debug)]
pub struct SpinChainModel {
    length: usize,
    c: Scalar,
    xi: ParamSet,
}

impl SpinChainModel {
    /// Builds a model with pairwise-distinct inhomogeneities whose pairwise
    /// differences also avoid `±c`, so structure-function poles cannot be
    /// hit by the operator constructions themselves.
    pub fn new(length: usize, c: Scalar, xi: Vec<Scalar>) -> Result<Self> {
        let model = Self::unchecked(length, c, xi)?;
        model.xi.check_pairwise_distinct("inhomogeneities")
            .map_err(|e| Error::InvalidModel(e.to_string()))?;
        for i in 0..model.length {
            for j in 0..model.length {
                if i == j {
                    continue;
                }
                let shifted = &(model.xi.get(i) - model.xi.get(j)) - &model.c;
                let coincide = match model.c.mode() {
                    Mode::Exact => shifted.is_zero(),
                    Mode::Float => shifted.abs_f64() < COLLISION_DELTA,
                };
                if coincide {
                    return Err(Error::InvalidModel(format!(
                        "inhomogeneities {} and {} differ by the coupling constant; \
                         monodromy entries would hit a structure-function pole",
                        model.xi.get(i),
                        model.xi.get(j)
                    )));
                }
            }
        }
        Ok(model)
    }

    /// Builds the homogeneous model: every site carries the same
    /// inhomogeneity value. The coincidence checks of [`SpinChainModel::new`]
    /// are intentionally waived; all operator formulas stay finite because
    /// only differences `u - xi` enter, never `xi_i - xi_j`.
    pub fn homogeneous(length: usize, c: Scalar, xi0: Scalar) -> Result<Self> {
        let xi = vec![xi0; length];
        Self::unchecked(length, c, xi)
    }

    fn unchecked(length: usize, c: Scalar, xi: Vec<Scalar>) -> Result<Self> {
        if length == 0 || length > MAX_LENGTH {
            return Err(Error::InvalidModel(format!(
                "chain length must be between 1 and {MAX_LENGTH}, got {length}"
            )));
        }
        if xi.len() != length {
            return Err(Error::InvalidModel(format!(
                "expected {length} inhomogeneities, got {}",
                xi.len()
            )));
        }
        let zero_c = match c.mode() {
            Mode::Exact => c.is_zero(),
            Mode::Float => c.abs_f64() < COLLISION_DELTA,
        };
        if zero_c {
            return Err(Error::InvalidModel(
                "coupling constant must be nonzero".into(),
            ));
        }
        for (k, x) in xi.iter().enumerate() {
            if x.mode() != c.mode() {
                return Err(Error::ModeMismatch(format!(
                    "inhomogeneity {k} has mode {} but the coupling constant has mode {}",
                    x.mode(),
                    c.mode()
                )));
            }
        }
        let mode = c.mode();
        let xi = if xi.is_empty() {
            ParamSet::empty(mode)
        } else {
            ParamSet::from_scalars(xi)?
        };
        Ok(SpinChainModel { length, c, xi })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        1 << self.length
    }

    pub fn mode(&self) -> Mode {
        self.c.mode()
    }

    pub fn coupling(&self) -> &Scalar {
        &self.c
    }

    pub fn inhomogeneities(&self) -> &ParamSet {
        &self.xi
    }

    /// Float copy of the model (used by the solver and the dense spectrum).
    pub fn to_float(&self) -> SpinChainModel {
        let xi: Vec<Scalar> = self.xi.iter().map(Scalar::to_float).collect();
        SpinChainModel {
            length: self.length,
            c: self.c.to_float(),
            xi: ParamSet::new(xi, Mode::Float).expect("float copy of validated parameters"),
        }
    }

    /// Evaluation context carrying the coupling constant and the reference
    /// eigenvalue functions of this model.
    pub fn vacuum_profile(&self) -> VacuumProfile {
        VacuumProfile {
            c: self.c.clone(),
            xi: self.xi.clone(),
        }
    }

    /// Rejects spectral points that collide with an inhomogeneity, where the
    /// monodromy entries have poles.
    pub fn check_spectral_point(&self, u: &Scalar) -> Result<()> {
        if u.mode() != self.mode() {
            return Err(Error::ModeMismatch(format!(
                "spectral point has mode {} but the model has mode {}",
                u.mode(),
                self.mode()
            )));
        }
        if self.xi.contains_collision(u) {
            return Err(Error::Pole(format!(
                "spectral point {u} collides with an inhomogeneity"
            )));
        }
        Ok(())
    }

    /// The monodromy matrix at spectral point `u`, assembled site by site.
    ///
    /// Appending site `m` with weights `f_m = f(u, xi_m)`, `g_m = g(u, xi_m)`
    /// maps the previous entries (on 2^(m-1) dimensions) into quadrants of
    /// the new ones (site `m` occupies the high bit):
    ///
    /// ```text
    ///   A -> [ f A   0  ]    B -> [ f B   0  ]
    ///        [ g C   A  ]         [ g D   B  ]
    ///
    ///   C -> [ C   g A ]      D -> [ D   g B ]
    ///        [ 0   f C ]           [ 0   f D ]
    /// ```
    pub fn monodromy(&self, u: &Scalar) -> Result<Monodromy> {
        self.check_spectral_point(u)?;
        let mode = self.mode();
        let one = Scalar::one(mode);

        // Site 1 base case on dimension 2.
        let f1 = f_fn(u, self.xi.get(0), &self.c)?;
        let g1 = g_fn(u, self.xi.get(0), &self.c)?;
        let mut a = LinearOperator::zeros(2, mode);
        a.set(0, 0, f1.clone());
        a.set(1, 1, one.clone());
        let mut b = LinearOperator::zeros(2, mode);
        b.set(1, 0, g1.clone());
        let mut c_op = LinearOperator::zeros(2, mode);
        c_op.set(0, 1, g1);
        let mut d = LinearOperator::zeros(2, mode);
        d.set(0, 0, one.clone());
        d.set(1, 1, f1);

        for m in 1..self.length {
            let fm = f_fn(u, self.xi.get(m), &self.c)?;
            let gm = g_fn(u, self.xi.get(m), &self.c)?;
            let half = 1 << m;
            let dim = half * 2;

            let mut na = LinearOperator::zeros(dim, mode);
            na.accumulate_scaled(0, 0, &fm, &a);
            na.accumulate_scaled(half, 0, &gm, &c_op);
            na.accumulate_scaled(half, half, &one, &a);

            let mut nb = LinearOperator::zeros(dim, mode);
            nb.accumulate_scaled(0, 0, &fm, &b);
            nb.accumulate_scaled(half, 0, &gm, &d);
            nb.accumulate_scaled(half, half, &one, &b);

            let mut nc = LinearOperator::zeros(dim, mode);
            nc.accumulate_scaled(0, 0, &one, &c_op);
            nc.accumulate_scaled(0, half, &gm, &a);
            nc.accumulate_scaled(half, half, &fm, &c_op);

            let mut nd = LinearOperator::zeros(dim, mode);
            nd.accumulate_scaled(0, 0, &one, &d);
            nd.accumulate_scaled(0, half, &gm, &b);
            nd.accumulate_scaled(half, half, &fm, &d);

            a = na;
            b = nb;
            c_op = nc;
            d = nd;
        }

        Ok(Monodromy { a, b, c: c_op, d })
    }

    /// The transfer matrix `A(u) + D(u)`.
    pub fn transfer_matrix(&self, u: &Scalar) -> Result<LinearOperator> {
        Ok(self.monodromy(u)?.transfer())
    }

    /// The all-spins-up reference state.
    pub fn vacuum_state(&self) -> StateVector {
        StateVector::basis(self.dim(), 0, self.mode())
    }

    /// Returns the analytic reference eigenvalue functions after verifying
    /// them empirically: at two admissible integer points the constructed
    /// operators must annihilate the reference state with `C`, and `A`, `D`
    /// must act diagonally with the analytic eigenvalues.
    pub fn checked_vacuum_profile(&self) -> Result<VacuumProfile> {
        let profile = self.vacuum_profile();
        let vacuum = self.vacuum_state();
        let mut tested = 0_i64;
        let mut candidate = 1_i64;
        while tested < 2 {
            let u = Scalar::integer_in(candidate, self.mode());
            candidate += 1;
            if self.check_spectral_point(&u).is_err() {
                continue;
            }
            tested += 1;
            let t = self.monodromy(&u)?;
            let c_vac = t.c.apply(&vacuum);
            let a_res = t.a.apply(&vacuum).sub(&vacuum.scale(&profile.vacuum_a(&u)?));
            let d_res = t.d.apply(&vacuum).sub(&vacuum.scale(&profile.vacuum_d(&u)?));
            let worst = c_vac
                .max_norm()
                .max(a_res.max_norm())
                .max(d_res.max_norm());
            let ok = match self.mode() {
                Mode::Exact => worst.is_zero(),
                Mode::Float => worst.passes(1e-10),
            };
            if !ok {
                return Err(Error::InvalidModel(format!(
                    "reference-state eigenvalues disagree with the analytic product formula \
                     at u = {u} (residual {worst})"
                )));
            }
        }
        Ok(profile)
    }

    /// Applies the creation operators `B(u_n) ... B(u_1)` to the reference
    /// state. Parameters must avoid the inhomogeneities and each other.
    pub fn bethe_state(&self, us: &ParamSet) -> Result<StateVector> {
        us.check_pairwise_distinct("creation parameters")?;
        let mut state = self.vacuum_state();
        for u in us.iter() {
            self.check_spectral_point(u)?;
            state = self.monodromy(u)?.b.apply(&state);
        }
        Ok(state)
    }

    /// The diagonal operator counting flipped spins.
    pub fn magnon_number_operator(&self) -> LinearOperator {
        let dim = self.dim();
        let mut m = LinearOperator::zeros(dim, self.mode());
        for idx in 0..dim {
            let count = (idx as u32).count_ones() as i64;
            m.set(idx, idx, Scalar::integer_in(count, self.mode()));
        }
        m
    }

    /// Max-norm residual of the exchange relation between `T(u) ⊗ T(v)` at
    /// this model's coupling constant.
    ///
    /// Written on 2^L-dimensional blocks: with `p[a][b][c][d] = T(u)_{ab} T(v)_{cd}`,
    /// `q[c][d][a][b] = T(v)_{cd} T(u)_{ab}` and the 4×4 exchange matrix `R`,
    /// the residual is the worst entry of
    /// `sum_k R[(i1 i2),(k1 k2)] p[k1][j1][k2][j2] - sum_k q[i2][k2][i1][k1] R[(k1 k2),(j1 j2)]`
    /// over all sixteen block positions `(i1, i2, j1, j2)`.
    pub fn rtt_residual(&self, u: &Scalar, v: &Scalar) -> Result<Residual> {
        let tu = self.monodromy(u)?;
        let tv = self.monodromy(v)?;
        rtt_residual_for(&tu, &tv, u, v, &self.c)
    }
}

/// Entries of a monodromy-like 2×2 operator array, indexed 0..2.
fn entry_of(t: &Monodromy, i: usize, j: usize) -> &LinearOperator {
    match (i, j) {
        (0, 0) => &t.a,
        (0, 1) => &t.b,
        (1, 0) => &t.c,
        (1, 1) => &t.d,
        _ => unreachable!("monodromy entries are 2x2"),
    }
}

/// Exchange-relation residual for two explicit monodromy-like operator
/// arrays at spectral points `u`, `v` and coupling `c`. Exposed separately
/// so twisted arrays can be checked with the same code path.
pub fn rtt_residual_for(
    tu: &Monodromy,
    tv: &Monodromy,
    u: &Scalar,
    v: &Scalar,
    c: &Scalar,
) -> Result<Residual> {
    let r = r_matrix(u, v, c)?;
    let mode = c.mode();
    let dim = tu.dim();
    assert_eq!(dim, tv.dim(), "monodromy dimension mismatch in rtt_residual");

    // All 16 + 16 pairwise products of entries.
    let mut p = vec![vec![vec![vec![None; 2]; 2]; 2]; 2];
    let mut q = vec![vec![vec![vec![None; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    p[a][b][cc][d] = Some(entry_of(tu, a, b).mul(entry_of(tv, cc, d)));
                    q[cc][d][a][b] = Some(entry_of(tv, cc, d).mul(entry_of(tu, a, b)));
                }
            }
        }
    }
    let p_ref = |a: usize, b: usize, cc: usize, d: usize| p[a][b][cc][d].as_ref().unwrap();
    let q_ref = |cc: usize, d: usize, a: usize, b: usize| q[cc][d][a][b].as_ref().unwrap();

    let mut worst = Residual::zero(mode);
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    let mut lhs = LinearOperator::zeros(dim, mode);
                    let mut rhs = LinearOperator::zeros(dim, mode);
                    for k1 in 0..2 {
                        for k2 in 0..2 {
                            let r_in = r.get(2 * i1 + i2, 2 * k1 + k2);
                            if !r_in.is_zero() {
                                lhs = lhs.add(&p_ref(k1, j1, k2, j2).scale(r_in));
                            }
                            let r_out = r.get(2 * k1 + k2, 2 * j1 + j2);
                            if !r_out.is_zero() {
                                rhs = rhs.add(&q_ref(i2, k2, i1, k1).scale(r_out));
                            }
                        }
                    }
                    let diff = lhs.sub(&rhs).max_norm();
                    // Entry magnitudes grow like products of structure
                    // functions and vary by orders of magnitude with the
                    // draw, so the float residual is scaled relative to the
                    // sides; the exact residual must be identically zero
                    // either way.
                    let relation = match mode {
                        Mode::Exact => diff,
                        Mode::Float => {
                            let denom =
                                1.0 + lhs.max_norm().as_f64() + rhs.max_norm().as_f64();
                            Residual::Float(diff.as_f64() / denom)
                        }
                    };
                    worst = worst.max(relation);
                }
            }
        }
    }
    Ok(worst)
}

/// The 4×4 exchange matrix `R(u, v) = I + g(u, v) P` with `P` the
/// permutation of the two 2-dimensional factors.
pub fn r_matrix(u: &Scalar, v: &Scalar, c: &Scalar) -> Result<LinearOperator> {
    let g = g_fn(u, v, c)?;
    let mode = c.mode();
    let mut r = LinearOperator::identity(4, mode);
    // P[(i1,i2),(j1,j2)] = delta(i1,j2) delta(i2,j1), index 2*i1 + i2.
    for i1 in 0..2 {
        for i2 in 0..2 {
            let row = 2 * i1 + i2;
            let col = 2 * i2 + i1;
            let updated = r.get(row, col) + &g;
            r.set(row, col, updated);
        }
    }
    Ok(r)
}

/// Max-norm residual of `R12 R13 R23 - R23 R13 R12` on the triple tensor
/// product, with arguments `(u,v)`, `(u,w)`, `(v,w)`.
pub fn yang_baxter_residual(u: &Scalar, v: &Scalar, w: &Scalar, c: &Scalar) -> Result<Residual> {
    let r12 = embed_pair(&r_matrix(u, v, c)?, 0, 1);
    let r13 = embed_pair(&r_matrix(u, w, c)?, 0, 2);
    let r23 = embed_pair(&r_matrix(v, w, c)?, 1, 2);
    let lhs = r12.mul(&r13).mul(&r23);
    let rhs = r23.mul(&r13).mul(&r12);
    Ok(lhs.sub(&rhs).max_norm())
}

/// Embeds a 4×4 two-factor operator into the 8-dimensional triple product,
/// acting on tensor slots `s1 < s2` (0-based; slot 0 is the high bit).
fn embed_pair(r4: &LinearOperator, s1: usize, s2: usize) -> LinearOperator {
    let mode = r4.mode();
    let mut out = LinearOperator::zeros(8, mode);
    let bit = |idx: usize, slot: usize| (idx >> (2 - slot)) & 1;
    for row in 0..8 {
        for col in 0..8 {
            // The untouched slot must match.
            let spectator = 3 - s1 - s2;
            if bit(row, spectator) != bit(col, spectator) {
                continue;
            }
            let r_row = 2 * bit(row, s1) + bit(row, s2);
            let r_col = 2 * bit(col, s1) + bit(col, s2);
            let v = r4.get(r_row, r_col);
            if !v.is_zero() {
                out.set(row, col, v.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::commutator;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::rational(p, d).unwrap()
    }

    fn model_l1() -> SpinChainModel {
        SpinChainModel::new(1, q(1, 1), vec![q(0, 1)]).unwrap()
    }

    fn model_l3() -> SpinChainModel {
        SpinChainModel::new(
            3,
            q(1, 1),
            vec![q(0, 1), q(1, 7), q(-2, 5)],
        )
        .unwrap()
    }

    #[test]
    fn construction_validations() {
        assert!(matches!(
            SpinChainModel::new(0, q(1, 1), vec![]),
            Err(Error::InvalidModel(_))
        ));
        assert!(matches!(
            SpinChainModel::new(9, q(1, 1), vec![q(0, 1); 9]),
            Err(Error::InvalidModel(_))
        ));
        assert!(matches!(
            SpinChainModel::new(2, q(1, 1), vec![q(0, 1)]),
            Err(Error::InvalidModel(_))
        ));
        // coincident inhomogeneities
        assert!(matches!(
            SpinChainModel::new(2, q(1, 1), vec![q(0, 1), q(0, 1)]),
            Err(Error::InvalidModel(_))
        ));
        // difference equal to the coupling constant
        assert!(matches!(
            SpinChainModel::new(2, q(1, 1), vec![q(0, 1), q(1, 1)]),
            Err(Error::InvalidModel(_))
        ));
        // zero coupling
        assert!(matches!(
            SpinChainModel::new(1, q(0, 1), vec![q(0, 1)]),
            Err(Error::InvalidModel(_))
        ));
        // mixed modes
        assert!(matches!(
            SpinChainModel::new(1, q(1, 1), vec![Scalar::real(0.0)]),
            Err(Error::ModeMismatch(_))
        ));
        // the homogeneous constructor accepts repeated values
        assert!(SpinChainModel::homogeneous(2, q(1, 1), q(0, 1)).is_ok());
    }

    #[test]
    fn length_one_entries_match_local_matrix() {
        let m = model_l1();
        let u = q(2, 1);
        let t = m.monodromy(&u).unwrap();
        // f(2,0) = 3/2, g(2,0) = 1/2 at c = 1
        assert_eq!(t.a.get(0, 0), &q(3, 2));
        assert_eq!(t.a.get(1, 1), &q(1, 1));
        assert_eq!(t.b.get(1, 0), &q(1, 2));
        assert_eq!(t.c.get(0, 1), &q(1, 2));
        assert_eq!(t.d.get(0, 0), &q(1, 1));
        assert_eq!(t.d.get(1, 1), &q(3, 2));
        assert!(t.b.get(0, 0).is_zero() && t.b.get(0, 1).is_zero() && t.b.get(1, 1).is_zero());
    }

    #[test]
    fn monodromy_rejects_pole_points() {
        let m = model_l1();
        assert!(matches!(m.monodromy(&q(0, 1)), Err(Error::Pole(_))));
    }

    #[test]
    fn vacuum_is_annihilated_and_diagonal() {
        let m = model_l3();
        let profile = m.checked_vacuum_profile().unwrap();
        let vac = m.vacuum_state();
        let u = q(5, 3);
        let t = m.monodromy(&u).unwrap();
        assert!(t.c.apply(&vac).is_zero());
        let a_val = profile.vacuum_a(&u).unwrap();
        assert_eq!(t.a.apply(&vac), vac.scale(&a_val));
        assert_eq!(t.d.apply(&vac), vac.clone());
        // analytic a(u) = prod f(u, xi_k)
        let expected = &(&f_fn(&u, &q(0, 1), &q(1, 1)).unwrap()
            * &f_fn(&u, &q(1, 7), &q(1, 1)).unwrap())
            * &f_fn(&u, &q(-2, 5), &q(1, 1)).unwrap();
        assert_eq!(a_val, expected);
    }

    #[test]
    fn transfer_matrices_commute() {
        let m = model_l3();
        let t1 = m.transfer_matrix(&q(5, 3)).unwrap();
        let t2 = m.transfer_matrix(&q(-7, 4)).unwrap();
        assert!(commutator(&t1, &t2).is_zero());
    }

    #[test]
    fn creation_operators_commute() {
        let m = model_l3();
        let b1 = m.monodromy(&q(5, 3)).unwrap().b;
        let b2 = m.monodromy(&q(-7, 4)).unwrap().b;
        assert!(commutator(&b1, &b2).is_zero());
    }

    #[test]
    fn magnon_grading() {
        let m = model_l3();
        let num = m.magnon_number_operator();
        let u = q(5, 3);
        let t = m.monodromy(&u).unwrap();
        // transfer preserves the grading, B raises it by one
        assert!(commutator(&t.transfer(), &num).is_zero());
        let lhs = num.mul(&t.b);
        let rhs = t.b.mul(&num.add(&LinearOperator::identity(num.dim(), Mode::Exact)));
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn homogeneous_transfer_closed_form() {
        // L = 2, xi = 0, c = 1: transfer(z) = (2 + 2 g(z,0)) I + g(z,0)^2 P12.
        let m = SpinChainModel::homogeneous(2, q(1, 1), q(0, 1)).unwrap();
        let z = q(5, 3);
        let g = g_fn(&z, &q(0, 1), &q(1, 1)).unwrap();
        let t = m.transfer_matrix(&z).unwrap();
        let coeff = &(&q(2, 1) + &(&q(2, 1) * &g));
        let gg = &g * &g;
        let mut expected = LinearOperator::identity(4, Mode::Exact).scale(coeff);
        // P12 swaps basis indices 1 and 2, fixes 0 and 3.
        let mut p = LinearOperator::zeros(4, Mode::Exact);
        p.set(0, 0, q(1, 1));
        p.set(3, 3, q(1, 1));
        p.set(1, 2, q(1, 1));
        p.set(2, 1, q(1, 1));
        expected = expected.add(&p.scale(&gg));
        assert_eq!(t, expected);
    }

    #[test]
    fn exchange_relation_exact() {
        for l in 1..=3 {
            let xi: Vec<Scalar> = [q(0, 1), q(1, 7), q(-2, 5)][..l].to_vec();
            let m = SpinChainModel::new(l, q(1, 1), xi).unwrap();
            let res = m.rtt_residual(&q(5, 3), &q(-7, 4)).unwrap();
            assert!(res.is_zero(), "L={l} residual {res}");
        }
    }

    #[test]
    fn exchange_relation_float() {
        let m = SpinChainModel::new(
            3,
            Scalar::real(1.0),
            vec![Scalar::real(0.0), Scalar::real(1.0 / 7.0), Scalar::real(-0.4)],
        )
        .unwrap();
        let res = m
            .rtt_residual(&Scalar::complex(1.3, 0.2), &Scalar::complex(-0.7, -0.1))
            .unwrap();
        assert!(res.passes(1e-12), "residual {res}");
    }

    #[test]
    fn exchange_matrix_values() {
        // g(3,2) = 1 at c = 1, so R = I + P.
        let r = r_matrix(&q(3, 1), &q(2, 1), &q(1, 1)).unwrap();
        assert_eq!(r.get(0, 0), &q(2, 1));
        assert_eq!(r.get(3, 3), &q(2, 1));
        assert_eq!(r.get(1, 1), &q(1, 1));
        assert_eq!(r.get(1, 2), &q(1, 1));
        assert_eq!(r.get(2, 1), &q(1, 1));
        assert_eq!(r.get(2, 2), &q(1, 1));
        assert!(r.get(0, 1).is_zero());
        // coincident arguments are a pole of g
        assert!(r_matrix(&q(3, 1), &q(3, 1), &q(1, 1)).is_err());
    }

    #[test]
    fn yang_baxter_exact_and_float() {
        let res = yang_baxter_residual(&q(5, 3), &q(-7, 4), &q(1, 9), &q(1, 1)).unwrap();
        assert!(res.is_zero());
        let res = yang_baxter_residual(
            &Scalar::complex(0.9, 0.3),
            &Scalar::complex(-0.2, 0.1),
            &Scalar::real(2.4),
            &Scalar::real(1.0),
        )
        .unwrap();
        assert!(res.passes(1e-13));
    }

    #[test]
    fn bethe_state_basics() {
        let m = model_l3();
        // no parameters: the reference state itself
        let empty = ParamSet::empty(Mode::Exact);
        assert_eq!(m.bethe_state(&empty).unwrap(), m.vacuum_state());
        // order does not matter
        let us1 = ParamSet::new(vec![q(5, 3), q(-7, 4)], Mode::Exact).unwrap();
        let us2 = ParamSet::new(vec![q(-7, 4), q(5, 3)], Mode::Exact).unwrap();
        assert_eq!(m.bethe_state(&us1).unwrap(), m.bethe_state(&us2).unwrap());
        // more creation operators than sites: the zero vector
        let m1 = model_l1();
        let us = ParamSet::new(vec![q(5, 3), q(-7, 4)], Mode::Exact).unwrap();
        assert!(m1.bethe_state(&us).unwrap().is_zero());
        // coincident parameters are rejected when the state is built
        let us = ParamSet::new(vec![q(5, 3), q(5, 3)], Mode::Exact).unwrap();
        assert!(matches!(
            m.bethe_state(&us),
            Err(Error::CoincidentParameters(_))
        ));
    }

    #[test]
    fn single_magnon_component() {
        // L = 1, xi = 0, c = 1: B(u)|0> = g(u, 0) |1>.
        let m = model_l1();
        let us = ParamSet::new(vec![q(3, 1)], Mode::Exact).unwrap();
        let state = m.bethe_state(&us).unwrap();
        assert!(state.get(0).is_zero());
        assert_eq!(state.get(1), &q(1, 3));
    }

    #[test]
    fn float_copy_tracks_exact() {
        let m = model_l3();
        let mf = m.to_float();
        assert_eq!(mf.mode(), Mode::Float);
        let res = mf
            .rtt_residual(&Scalar::real(5.0 / 3.0), &Scalar::real(-7.0 / 4.0))
            .unwrap();
        assert!(res.passes(1e-12));
    }
}
