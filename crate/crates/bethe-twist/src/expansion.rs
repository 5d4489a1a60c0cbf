//! Partition-sum representations of operator actions and the magnon
//! expansion of twisted creation products.
//!
//! Everything in this module rewrites an operator product applied to the
//! reference state as an explicit linear combination of plain creation
//! products `B(w_subset)|0>` — a [`CoefficientMap`] — and checks the
//! combination against direct matrix application. The highlight is the
//! expansion of `Bt(u_1)..Bt(u_n)|0>` over ordered three-block partitions
//! of the parameter set, whose sub-leading coefficients all cancel when
//! the parameters satisfy the Bethe equations, leaving the collapse
//! `Bt(u_bar)|0> = k11^(2n) B(u_bar)|0>`.

use std::collections::BTreeMap;

use crate::bethe::bethe_residual_norm;
use crate::chain::{EntryKind, SpinChainModel};
use crate::error::{Error, Result};
use crate::kernel::{
    enumerate_partitions, f_between, Cardinality, ParamSet, Partition, VacuumFunctions,
};
use crate::linalg::{Residual, StateVector};
use crate::scalar::{Mode, Scalar};
use crate::twist::{twisted_bethe_state, TwistMatrix};

/// A linear combination of creation products, keyed by the ascending index
/// sets (into a fixed source parameter set) of the retained parameters.
#[derive(Clone, Debug)]
pub struct CoefficientMap {
    source: ParamSet,
    terms: BTreeMap<Vec<usize>, Scalar>,
}

impl CoefficientMap {
    pub fn new(source: ParamSet) -> Self {
        CoefficientMap {
            source,
            terms: BTreeMap::new(),
        }
    }

    pub fn source(&self) -> &ParamSet {
        &self.source
    }

    pub fn mode(&self) -> Mode {
        self.source.mode()
    }

    /// Adds `coeff` onto the entry for `key` (ascending indices).
    pub fn insert_add(&mut self, key: Vec<usize>, coeff: Scalar) {
        debug_assert!(key.windows(2).all(|w| w[0] < w[1]), "keys must be ascending");
        debug_assert!(key.iter().all(|&i| i < self.source.len()));
        match self.terms.get_mut(&key) {
            Some(existing) => *existing = &*existing + &coeff,
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn get(&self, key: &[usize]) -> Option<&Scalar> {
        self.terms.get(key)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&mut self, factor: &Scalar) {
        for coeff in self.terms.values_mut() {
            *coeff = &*coeff * factor;
        }
    }

    /// Assembles the combination as a concrete state vector,
    /// `sum_key coeff(key) * B(source[key])|0>`.
    pub fn evaluate(&self, model: &SpinChainModel) -> Result<StateVector> {
        let mut out = StateVector::zero(model.dim(), model.mode());
        for (key, coeff) in &self.terms {
            if coeff.is_zero() {
                continue;
            }
            let subset = self.source.subset(key);
            let state = model.bethe_state(&subset)?;
            out = out.add(&state.scale(coeff));
        }
        Ok(out)
    }

    /// Largest coefficient magnitude among keys other than `excluded`.
    pub fn max_coefficient_excluding(&self, excluded: &[usize]) -> Residual {
        let mut worst = Residual::zero(self.mode());
        for (key, coeff) in &self.terms {
            if key.as_slice() == excluded {
                continue;
            }
            worst = worst.max(Residual::from_scalar(coeff));
        }
        worst
    }
}

fn check_expansion_arguments(model: &SpinChainModel, us: &ParamSet) -> Result<()> {
    us.check_pairwise_distinct("expansion parameters")?;
    for u in us.iter() {
        model.check_spectral_point(u)?;
    }
    Ok(())
}

/// The partition-sum form of a diagonal entry acting on a creation product.
///
/// With `w = {z} u u_bar` (`z` at index 0) the action of `A(z)` is
///
/// ```text
/// sum_{w = w_I ⊔ w_II, #w_I = 1} a(w_I) f(w_II, w_I) / h(z, w_I) B(w_II)|0>
/// ```
///
/// and `D(z)` mirrors it with `d(w_I) f(w_I, w_II) / h(w_I, z)`. The keys of
/// the returned map index into `w`.
pub fn diagonal_action_map(
    model: &SpinChainModel,
    kind: EntryKind,
    z: &Scalar,
    us: &ParamSet,
) -> Result<CoefficientMap> {
    if !matches!(kind, EntryKind::A | EntryKind::D) {
        return Err(Error::InvalidArgument(format!(
            "diagonal_action_map expects entry A or D, got {kind}"
        )));
    }
    check_expansion_arguments(model, us)?;
    model.check_spectral_point(z)?;
    if us.contains_collision(z) {
        return Err(Error::CoincidentParameters(format!(
            "evaluation point {z} collides with a creation parameter"
        )));
    }
    let profile = model.vacuum_profile();
    let c = model.coupling();
    let w = us.with_prepended(z)?;
    let mut map = CoefficientMap::new(w.clone());

    for part in enumerate_partitions(&w, &[Cardinality::Exactly(1), Cardinality::Free]) {
        let w_i = part.block(0);
        let w_ii = part.block(1);
        let pivot = w_i.get(0);
        let coeff = match kind {
            EntryKind::A => {
                // h(z, w_I) is finite even when w_I = {z}: h(z, z) = 1.
                let h = crate::kernel::h_fn(z, pivot, c)?;
                let num = &profile.vacuum_a(pivot)? * &f_between(&w_ii, &w_i, c)?;
                num.checked_div(&h).map_err(|_| {
                    Error::DivisionByZero(format!(
                        "h({z}, {pivot}) vanished in the diagonal partition sum"
                    ))
                })?
            }
            EntryKind::D => {
                let h = crate::kernel::h_fn(pivot, z, c)?;
                let num = &profile.vacuum_d(pivot)? * &f_between(&w_i, &w_ii, c)?;
                num.checked_div(&h).map_err(|_| {
                    Error::DivisionByZero(format!(
                        "h({pivot}, {z}) vanished in the diagonal partition sum"
                    ))
                })?
            }
            _ => unreachable!(),
        };
        map.insert_add(part.indices(1), coeff);
    }
    Ok(map)
}

/// The partition-sum form of the annihilation entry acting on a creation
/// product: over partitions of `w = {z} u u_bar` into two singletons and
/// a remainder,
///
/// ```text
/// sum d(w_I) a(w_II) f(w_I, w_III) f(w_III, w_II) f(w_I, w_II)
///      / (h(w_I, z) h(z, w_II))  B(w_III)|0>
/// ```
pub fn annihilation_action_map(
    model: &SpinChainModel,
    z: &Scalar,
    us: &ParamSet,
) -> Result<CoefficientMap> {
    check_expansion_arguments(model, us)?;
    model.check_spectral_point(z)?;
    if us.contains_collision(z) {
        return Err(Error::CoincidentParameters(format!(
            "evaluation point {z} collides with a creation parameter"
        )));
    }
    let profile = model.vacuum_profile();
    let c = model.coupling();
    let w = us.with_prepended(z)?;
    let mut map = CoefficientMap::new(w.clone());

    let shape = [
        Cardinality::Exactly(1),
        Cardinality::Exactly(1),
        Cardinality::Free,
    ];
    for part in enumerate_partitions(&w, &shape) {
        let w_i = part.block(0);
        let w_ii = part.block(1);
        let w_iii = part.block(2);
        let p1 = w_i.get(0);
        let p2 = w_ii.get(0);
        let num = &(&(&profile.vacuum_d(p1)? * &profile.vacuum_a(p2)?)
            * &(&f_between(&w_i, &w_iii, c)? * &f_between(&w_iii, &w_ii, c)?))
            * &f_between(&w_i, &w_ii, c)?;
        let denom = &crate::kernel::h_fn(p1, z, c)? * &crate::kernel::h_fn(z, p2, c)?;
        let coeff = num.checked_div(&denom).map_err(|_| {
            Error::DivisionByZero(format!(
                "h({p1}, {z}) h({z}, {p2}) vanished in the annihilation partition sum"
            ))
        })?;
        map.insert_add(part.indices(2), coeff);
    }
    Ok(map)
}

/// Max-norm residual between a diagonal entry applied directly and its
/// partition-sum form.
pub fn diagonal_action_residual(
    model: &SpinChainModel,
    kind: EntryKind,
    z: &Scalar,
    us: &ParamSet,
) -> Result<Residual> {
    let map = diagonal_action_map(model, kind, z, us)?;
    let direct = {
        let t = model.monodromy(z)?;
        let psi = model.bethe_state(us)?;
        t.entry(kind).apply(&psi)
    };
    Ok(direct.sub(&map.evaluate(model)?).max_norm())
}

/// Max-norm residual between the annihilation entry applied directly and
/// its partition-sum form.
pub fn annihilation_action_residual(
    model: &SpinChainModel,
    z: &Scalar,
    us: &ParamSet,
) -> Result<Residual> {
    let map = annihilation_action_map(model, z, us)?;
    let direct = {
        let t = model.monodromy(z)?;
        let psi = model.bethe_state(us)?;
        t.c.apply(&psi)
    };
    Ok(direct.sub(&map.evaluate(model)?).max_norm())
}

/// Residuals of the twisted diagonal entries acting on a twisted creation
/// product:
///
/// ```text
/// At(z) Bt(u_bar)|0> = -(k21/k11) Bt(z) Bt(u_bar)|0>
///                    + a(z) f(u_bar, z) Bt(u_bar)|0>
///                    + sum_k g(z, u_k) a(u_k) f(u_bar_k, u_k) Bt(z) Bt(u_bar_k)|0>
///
/// Dt(z) Bt(u_bar)|0> = +(k21/k11) Bt(z) Bt(u_bar)|0>
///                    + d(z) f(z, u_bar) Bt(u_bar)|0>
///                    + sum_k g(u_k, z) d(u_k) f(u_k, u_bar_k) Bt(z) Bt(u_bar_k)|0>
/// ```
///
/// Returns `(residual_for_At, residual_for_Dt)`.
pub fn twisted_offshell_residuals(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    z: &Scalar,
    us: &ParamSet,
) -> Result<(Residual, Residual)> {
    check_expansion_arguments(model, us)?;
    model.check_spectral_point(z)?;
    if us.contains_collision(z) {
        return Err(Error::CoincidentParameters(format!(
            "evaluation point {z} collides with a creation parameter"
        )));
    }
    let profile = model.vacuum_profile();
    let c = model.coupling();
    let ratio = kappa.ratio_lower();

    let t_z = model.monodromy(z)?;
    let twisted_z = crate::twist::twisted_monodromy(&t_z, kappa);
    let psi = twisted_bethe_state(model, kappa, us)?;
    let psi_with_z = twisted_z.b.apply(&psi);

    let mut rhs_a = psi_with_z.scale(&-&ratio);
    let a_z = &profile.vacuum_a(z)? * &crate::kernel::f_to_point(us, z, c)?;
    rhs_a = rhs_a.add(&psi.scale(&a_z));

    let mut rhs_d = psi_with_z.scale(&ratio);
    let d_z = &profile.vacuum_d(z)? * &crate::kernel::f_from_point(z, us, c)?;
    rhs_d = rhs_d.add(&psi.scale(&d_z));

    for k in 0..us.len() {
        let uk = us.get(k);
        let rest = us.complement(k);
        let psi_k = twisted_bethe_state(model, kappa, &rest)?;
        let psi_k_z = twisted_z.b.apply(&psi_k);

        let coeff_a = &(&crate::kernel::g_fn(z, uk, c)? * &profile.vacuum_a(uk)?)
            * &f_between(&rest, &ParamSet::singleton(uk.clone()), c)?;
        rhs_a = rhs_a.add(&psi_k_z.scale(&coeff_a));

        let coeff_d = &(&crate::kernel::g_fn(uk, z, c)? * &profile.vacuum_d(uk)?)
            * &f_between(&ParamSet::singleton(uk.clone()), &rest, c)?;
        rhs_d = rhs_d.add(&psi_k_z.scale(&coeff_d));
    }

    let lhs_a = twisted_z.a.apply(&psi);
    let lhs_d = twisted_z.d.apply(&psi);
    Ok((
        lhs_a.sub(&rhs_a).max_norm(),
        lhs_d.sub(&rhs_d).max_norm(),
    ))
}

/// Signed partition weight of the magnon expansion, excluding the retained
/// creation product itself: for a partition `u_bar = u_I ⊔ u_II ⊔ u_III`,
///
/// ```text
/// k11^(n + #III) k12^(n - #III) (-1)^(#II)
///   d(u_I) a(u_II) f(u_I, u_II) f(u_I, u_III) f(u_III, u_II)
/// ```
///
/// written with nonnegative twist powers, so no inversion of `k12` is needed
/// and the expansion stays valid for `k12 = 0`.
fn expansion_weight(
    profile: &impl VacuumFunctions,
    kappa: &TwistMatrix,
    c: &Scalar,
    part: &Partition,
    n: usize,
) -> Result<Scalar> {
    let u_i = part.block(0);
    let u_ii = part.block(1);
    let u_iii = part.block(2);
    let mode = c.mode();

    let k11_pow = kappa.k11().powi((n + u_iii.len()) as i32)?;
    let k12_pow = kappa.k12().powi((n - u_iii.len()) as i32)?;
    let sign = if u_ii.len() % 2 == 0 {
        Scalar::one(mode)
    } else {
        -&Scalar::one(mode)
    };
    let vacuum = &crate::kernel::d_over(profile, &u_i)? * &crate::kernel::a_over(profile, &u_ii)?;
    let coupling = &(&f_between(&u_i, &u_ii, c)? * &f_between(&u_i, &u_iii, c)?)
        * &f_between(&u_iii, &u_ii, c)?;
    Ok(&(&(&k11_pow * &k12_pow) * &sign) * &(&vacuum * &coupling))
}

/// The magnon expansion of the twisted creation product,
///
/// ```text
/// Bt(u_1)..Bt(u_n)|0> = sum_{u_bar = u_I ⊔ u_II ⊔ u_III}
///     k11^(n + #III) k12^(n - #III) (-1)^(#II)
///     d(u_I) a(u_II) f(u_I, u_II) f(u_I, u_III) f(u_III, u_II)
///     B(u_III)|0>
/// ```
///
/// aggregated per retained index set `u_III`. Keys index into `us`.
pub fn twisted_b_expansion(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
) -> Result<CoefficientMap> {
    check_expansion_arguments(model, us)?;
    let profile = model.vacuum_profile();
    let c = model.coupling();
    let n = us.len();
    let mut map = CoefficientMap::new(us.clone());
    let shape = [Cardinality::Free, Cardinality::Free, Cardinality::Free];
    for part in enumerate_partitions(us, &shape) {
        let weight = expansion_weight(&profile, kappa, c, &part, n)?;
        map.insert_add(part.indices(2), weight);
    }
    Ok(map)
}

/// One aggregated row of the magnon expansion, for reporting.
#[derive(Clone, Debug)]
pub struct ExpansionRow {
    /// Ascending indices of the retained parameters.
    pub key: Vec<usize>,
    /// Aggregated coefficient of `B(retained)|0>`, twist powers included.
    pub coefficient: Scalar,
    /// Uniform power of `k11` carried by every term of this row.
    pub k11_power: usize,
    /// Uniform power of `k12` carried by every term of this row.
    pub k12_power: usize,
}

/// One unaggregated partition term of the magnon expansion.
#[derive(Clone, Debug)]
pub struct ExpansionTerm {
    /// Indices assigned to the first block (weighted by `d`).
    pub block_i: Vec<usize>,
    /// Indices assigned to the second block (weighted by `a`, signed).
    pub block_ii: Vec<usize>,
    /// Indices of the retained creation parameters.
    pub block_iii: Vec<usize>,
    /// The signed scalar weight of this partition, twist powers included.
    pub weight: Scalar,
    /// Power of `k11` in the weight.
    pub k11_power: usize,
    /// Power of `k12` in the weight.
    pub k12_power: usize,
}

/// The expansion as one row per three-block partition, in enumeration
/// order (3^n rows). For a single parameter this is the three-term base
/// case of the induction.
pub fn expansion_terms(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
) -> Result<Vec<ExpansionTerm>> {
    check_expansion_arguments(model, us)?;
    let profile = model.vacuum_profile();
    let c = model.coupling();
    let n = us.len();
    let shape = [Cardinality::Free, Cardinality::Free, Cardinality::Free];
    let mut out = Vec::new();
    for part in enumerate_partitions(us, &shape) {
        let weight = expansion_weight(&profile, kappa, c, &part, n)?;
        let retained = part.indices(2).len();
        out.push(ExpansionTerm {
            block_i: part.indices(0),
            block_ii: part.indices(1),
            block_iii: part.indices(2),
            weight,
            k11_power: n + retained,
            k12_power: n - retained,
        });
    }
    Ok(out)
}

/// The expansion as a deterministic list of rows (keys ascending).
pub fn expansion_rows(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
) -> Result<Vec<ExpansionRow>> {
    let map = twisted_b_expansion(model, kappa, us)?;
    let n = us.len();
    Ok(map
        .terms()
        .map(|(key, coeff)| ExpansionRow {
            key: key.clone(),
            coefficient: coeff.clone(),
            k11_power: n + key.len(),
            k12_power: n - key.len(),
        })
        .collect())
}

/// Max-norm residual between the twisted creation product applied directly
/// and its magnon expansion.
pub fn twisted_b_expansion_residual(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
) -> Result<Residual> {
    let map = twisted_b_expansion(model, kappa, us)?;
    let direct = twisted_bethe_state(model, kappa, us)?;
    Ok(direct.sub(&map.evaluate(model)?).max_norm())
}

/// Certificates of the on-shell collapse
/// `Bt(u_bar)|0> = k11^(2n) B(u_bar)|0>`.
#[derive(Clone, Debug)]
pub struct CollapseReport {
    /// Max-norm of `Bt(u_bar)|0> - k11^(2n) B(u_bar)|0>`.
    pub residual: Residual,
    /// The predicted collapse constant `k11^(2n)`.
    pub expected_constant: Scalar,
    /// Least-squares constant `<psi, psi_t> / <psi, psi>` actually observed.
    pub fitted_constant: Scalar,
    /// Distance between fitted and predicted constants.
    pub constant_error: f64,
    /// Largest aggregated expansion coefficient over all sub-leading keys;
    /// vanishes exactly on shell.
    pub max_subleading: Residual,
}

/// Verifies the roots satisfy the Bethe equations, then certifies the
/// collapse of the twisted creation product onto the plain one. Off-shell
/// parameters are rejected with [`Error::OffShellRoots`], carrying the
/// sub-leading expansion coefficients that survive.
pub fn check_onshell_collapse(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
    tolerance: f64,
) -> Result<CollapseReport> {
    check_expansion_arguments(model, us)?;
    let full_key: Vec<usize> = (0..us.len()).collect();

    let bethe_res = bethe_residual_norm(model, us)?;
    if !bethe_res.passes(tolerance) {
        let map = twisted_b_expansion(model, kappa, us)?;
        let mut surviving: Vec<(String, f64)> = map
            .terms()
            .filter(|(key, _)| key.as_slice() != full_key.as_slice())
            .map(|(key, coeff)| (format!("{key:?}"), coeff.abs_f64()))
            .filter(|(_, mag)| *mag > tolerance)
            .collect();
        surviving.sort_by(|a, b| b.1.total_cmp(&a.1));
        surviving.truncate(8);
        return Err(Error::OffShellRoots {
            max_residual: bethe_res.as_f64(),
            surviving,
        });
    }

    let psi_t = twisted_bethe_state(model, kappa, us)?;
    let psi = model.bethe_state(us)?;
    let expected = kappa.k11().powi(2 * us.len() as i32)?;
    let residual = psi_t.sub(&psi.scale(&expected)).max_norm();

    let denom = psi.dot(&psi);
    if denom.is_zero() {
        return Err(Error::InvalidArgument(
            "creation product vanished; the collapse constant is undefined".into(),
        ));
    }
    let fitted = psi.dot(&psi_t).checked_div(&denom)?;
    let constant_error = fitted.distance_f64(&expected);

    let map = twisted_b_expansion(model, kappa, us)?;
    let max_subleading = map.max_coefficient_excluding(&full_key);

    Ok(CollapseReport {
        residual,
        expected_constant: expected,
        fitted_constant: fitted,
        constant_error,
        max_subleading,
    })
}

/// Which operator's contribution to the expansion is being assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContributionOp {
    B,
    A,
    D,
    C,
}

impl std::fmt::Display for ContributionOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ContributionOp::B => "B",
            ContributionOp::A => "A",
            ContributionOp::D => "D",
            ContributionOp::C => "C",
        };
        write!(f, "{s}")
    }
}

/// How to assemble a contribution: applying the operator directly, or
/// summing its closed partition form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContributionForm {
    Direct,
    Partition,
}

fn check_contribution_arguments(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
    distinguished: usize,
) -> Result<()> {
    check_expansion_arguments(model, us)?;
    if us.is_empty() {
        return Err(Error::InvalidArgument(
            "contribution splitting needs at least one parameter".into(),
        ));
    }
    if distinguished >= us.len() {
        return Err(Error::InvalidArgument(format!(
            "distinguished index {distinguished} out of range for {} parameters",
            us.len()
        )));
    }
    if !kappa.has_nonzero_k12() {
        return Err(Error::InvalidTwist(
            "contribution splitting divides by k12; use a twist with k12 != 0".into(),
        ));
    }
    Ok(())
}

/// The normalized twisted product `Bt(u_bar)|0> / (k11 k12)^n`.
fn normalized_twisted_product(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
) -> Result<StateVector> {
    let psi = twisted_bethe_state(model, kappa, us)?;
    let scale = (&(kappa.k11() * kappa.k12())).powi(us.len() as i32)?;
    let inv = scale.checked_inv()?;
    Ok(psi.scale(&inv))
}

/// One operator's contribution to the normalized expansion
/// `Bt(u_bar)|0> / (k11 k12)^n`, split by the distinguished parameter.
///
/// `Direct` applies the operator at the distinguished parameter to the
/// normalized twisted product of the others:
///
/// ```text
/// contribution(B) =  (k11/k12) B(u_d)  [Bt(rest)|0> / (k11 k12)^(n-1)]
/// contribution(A) = -          A(u_d)  [ .. ]
/// contribution(D) = +          D(u_d)  [ .. ]
/// contribution(C) = -(k12/k11) C(u_d)  [ .. ]
/// ```
///
/// `Partition` assembles the same vector from the expansion terms: each
/// three-block partition contributes its weight times a selector built
/// from `r_I = 1/f(u_I, u_d)` and `r_II = 1/f(u_d, u_II)` (each taken as
/// zero when the distinguished parameter sits inside the block):
/// `B:(r_I r_II)`, `A:(r_I (1 - r_II))`, `D:(r_II (1 - r_I))`,
/// `C:((1 - r_I)(1 - r_II))`. The four selectors sum to one, so the four
/// contributions reassemble the full normalized expansion.
pub fn lambda_contribution(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
    op: ContributionOp,
    form: ContributionForm,
    distinguished: usize,
) -> Result<StateVector> {
    check_contribution_arguments(model, kappa, us, distinguished)?;
    let mode = model.mode();
    let c = model.coupling();

    match form {
        ContributionForm::Direct => {
            let u_d = us.get(distinguished);
            let rest = us.complement(distinguished);
            let base = normalized_twisted_product(model, kappa, &rest)?;
            let t = model.monodromy(u_d)?;
            let one = Scalar::one(mode);
            let (operator, coeff) = match op {
                ContributionOp::B => (&t.b, kappa.k11().checked_div(kappa.k12())?),
                ContributionOp::A => (&t.a, -&one),
                ContributionOp::D => (&t.d, one.clone()),
                ContributionOp::C => (&t.c, -&kappa.k12().checked_div(kappa.k11())?),
            };
            Ok(operator.apply(&base).scale(&coeff))
        }
        ContributionForm::Partition => {
            let profile = model.vacuum_profile();
            let n = us.len();
            let u_d = us.get(distinguished);
            let one = Scalar::one(mode);
            // Normalized weights: strip the uniform (k11 k12)^n.
            let norm = (&(kappa.k11() * kappa.k12())).powi(n as i32)?;
            let norm_inv = norm.checked_inv()?;

            let mut out = StateVector::zero(model.dim(), mode);
            let shape = [Cardinality::Free, Cardinality::Free, Cardinality::Free];
            for part in enumerate_partitions(us, &shape) {
                // Selectors by index membership, not value comparison.
                let r_i = if part.label_of(distinguished) == 0 {
                    Scalar::zero(mode)
                } else {
                    f_between(&part.block(0), &ParamSet::singleton(u_d.clone()), c)?
                        .checked_inv()?
                };
                let r_ii = if part.label_of(distinguished) == 1 {
                    Scalar::zero(mode)
                } else {
                    f_between(&ParamSet::singleton(u_d.clone()), &part.block(1), c)?
                        .checked_inv()?
                };
                let selector = match op {
                    ContributionOp::B => &r_i * &r_ii,
                    ContributionOp::A => &r_i * &(&one - &r_ii),
                    ContributionOp::D => &r_ii * &(&one - &r_i),
                    ContributionOp::C => &(&one - &r_i) * &(&one - &r_ii),
                };
                if selector.is_zero() {
                    continue;
                }
                let weight = &expansion_weight(&profile, kappa, c, &part, n)? * &norm_inv;
                let state = model.bethe_state(&part.block(2))?;
                out = out.add(&state.scale(&(&weight * &selector)));
            }
            Ok(out)
        }
    }
}

/// Max-norm residual between the two forms of one contribution.
pub fn contribution_form_residual(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
    op: ContributionOp,
    distinguished: usize,
) -> Result<Residual> {
    let direct = lambda_contribution(model, kappa, us, op, ContributionForm::Direct, distinguished)?;
    let partition =
        lambda_contribution(model, kappa, us, op, ContributionForm::Partition, distinguished)?;
    Ok(direct.sub(&partition).max_norm())
}

/// Max-norm residual of the reassembly: the four contributions (in either
/// form) must sum to the normalized twisted product.
pub fn contribution_sum_residual(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    us: &ParamSet,
    form: ContributionForm,
    distinguished: usize,
) -> Result<Residual> {
    check_contribution_arguments(model, kappa, us, distinguished)?;
    let mut sum = StateVector::zero(model.dim(), model.mode());
    for op in [
        ContributionOp::B,
        ContributionOp::A,
        ContributionOp::D,
        ContributionOp::C,
    ] {
        sum = sum.add(&lambda_contribution(model, kappa, us, op, form, distinguished)?);
    }
    let expected = normalized_twisted_product(model, kappa, us)?;
    Ok(sum.sub(&expected).max_norm())
}
