//! Bethe equations, transfer-matrix action, root solving and the dense
//! spectrum oracle.
//!
//! For creation parameters `u_1 .. u_n` the algebraic residuals
//!
//! ```text
//! F_k = a(u_k) f(u_bar_k, u_k) - d(u_k) f(u_k, u_bar_k)
//! ```
//!
//! (`u_bar_k` is the set without `u_k`) vanish exactly when the parameters
//! solve the Bethe equations. The same quantities drive the off-shell
//! action of the transfer matrix: `T(z) B(u_1)..B(u_n)|0>` equals
//! `Lambda_0` times the state plus one exchange term per parameter, with
//! `Lambda_k = g(z, u_k) F_k`, so on shell the state is an eigenvector
//! with eigenvalue `Lambda_0`.

use ndarray::Array2;
use ndarray_linalg::Eig;
use num_complex::Complex64;
use rand::Rng;

use crate::chain::SpinChainModel;
use crate::error::{Error, Result};
use crate::kernel::{f_from_point, f_to_point, g_fn, ParamSet, VacuumFunctions};
use crate::linalg::{LinearOperator, Residual};
use crate::scalar::{Mode, Scalar};
use crate::twist::{twisted_bethe_state, TwistMatrix};

/// Algebraic Bethe-equation residuals `F_k`, one per parameter.
pub fn bethe_residuals(model: &SpinChainModel, us: &ParamSet) -> Result<Vec<Scalar>> {
    us.check_pairwise_distinct("Bethe parameters")?;
    let profile = model.vacuum_profile();
    let c = model.coupling();
    let mut out = Vec::with_capacity(us.len());
    for k in 0..us.len() {
        let uk = us.get(k);
        model.check_spectral_point(uk)?;
        let rest = us.complement(k);
        let a_k = profile.vacuum_a(uk)?;
        let d_k = profile.vacuum_d(uk)?;
        let incoming = f_to_point(&rest, uk, c)?;
        let outgoing = f_from_point(uk, &rest, c)?;
        out.push(&(&a_k * &incoming) - &(&d_k * &outgoing));
    }
    Ok(out)
}

/// Scaled magnitude of the worst Bethe residual,
/// `max_k |F_k| / (1 + |a_k f| + |d_k f|)`; zero exactly on shell.
pub fn bethe_residual_norm(model: &SpinChainModel, us: &ParamSet) -> Result<Residual> {
    us.check_pairwise_distinct("Bethe parameters")?;
    let profile = model.vacuum_profile();
    let c = model.coupling();
    let mut worst = Residual::zero(model.mode());
    for k in 0..us.len() {
        let uk = us.get(k);
        model.check_spectral_point(uk)?;
        let rest = us.complement(k);
        let t1 = &profile.vacuum_a(uk)? * &f_to_point(&rest, uk, c)?;
        let t2 = &profile.vacuum_d(uk)? * &f_from_point(uk, &rest, c)?;
        let fk = &t1 - &t2;
        let res = match model.mode() {
            Mode::Exact => Residual::from_scalar(&fk),
            Mode::Float => {
                let scale = 1.0 + t1.abs_f64() + t2.abs_f64();
                Residual::Float(fk.abs_f64() / scale)
            }
        };
        worst = worst.max(res);
    }
    Ok(worst)
}

/// The would-be eigenvalue
/// `Lambda_0(z) = a(z) f(u_bar, z) + d(z) f(z, u_bar)`.
pub fn lambda0(model: &SpinChainModel, z: &Scalar, us: &ParamSet) -> Result<Scalar> {
    model.check_spectral_point(z)?;
    let profile = model.vacuum_profile();
    let c = model.coupling();
    let term_a = &profile.vacuum_a(z)? * &f_to_point(us, z, c)?;
    let term_d = &profile.vacuum_d(z)? * &f_from_point(z, us, c)?;
    Ok(&term_a + &term_d)
}

/// The exchange coefficient `Lambda_k(z) = g(z, u_k) F_k`, written out as
/// `g(z, u_k) (a(u_k) f(u_bar_k, u_k) - d(u_k) f(u_k, u_bar_k))`.
pub fn lambda_k(model: &SpinChainModel, z: &Scalar, us: &ParamSet, k: usize) -> Result<Scalar> {
    if k >= us.len() {
        return Err(Error::InvalidArgument(format!(
            "index {k} out of range for {} parameters",
            us.len()
        )));
    }
    let profile = model.vacuum_profile();
    let c = model.coupling();
    let uk = us.get(k);
    let rest = us.complement(k);
    let fk = &(&profile.vacuum_a(uk)? * &f_to_point(&rest, uk, c)?)
        - &(&profile.vacuum_d(uk)? * &f_from_point(uk, &rest, c)?);
    Ok(&g_fn(z, uk, c)? * &fk)
}

fn check_action_arguments(model: &SpinChainModel, z: &Scalar, us: &ParamSet) -> Result<()> {
    model.check_spectral_point(z)?;
    us.check_pairwise_distinct("creation parameters")?;
    for u in us.iter() {
        model.check_spectral_point(u)?;
    }
    if us.contains_collision(z) {
        return Err(Error::CoincidentParameters(format!(
            "evaluation point {z} collides with a creation parameter"
        )));
    }
    Ok(())
}

/// Max-norm residual of the off-shell transfer-matrix action
///
/// ```text
/// T(z) B(u_1)..B(u_n)|0> = Lambda_0 B(u_bar)|0>
///                        + sum_k Lambda_k B(z) B(u_bar_k)|0>
/// ```
pub fn transfer_action_residual(
    model: &SpinChainModel,
    z: &Scalar,
    us: &ParamSet,
) -> Result<Residual> {
    check_action_arguments(model, z, us)?;
    let transfer = model.transfer_matrix(z)?;
    let psi = model.bethe_state(us)?;
    let lhs = transfer.apply(&psi);
    let mut rhs = psi.scale(&lambda0(model, z, us)?);
    for k in 0..us.len() {
        let swapped = us.complement(k).with_prepended(z)?;
        let state_k = model.bethe_state(&swapped)?;
        rhs = rhs.add(&state_k.scale(&lambda_k(model, z, us, k)?));
    }
    Ok(lhs.sub(&rhs).max_norm())
}

/// Max-norm residual of the same action formula with every creation
/// operator replaced by its twisted counterpart: the twisted transfer
/// matrix equals the plain one, and the coefficients `Lambda_0`,
/// `Lambda_k` are unchanged.
pub fn twisted_transfer_action_residual(
    model: &SpinChainModel,
    kappa: &TwistMatrix,
    z: &Scalar,
    us: &ParamSet,
) -> Result<Residual> {
    check_action_arguments(model, z, us)?;
    let transfer = model.transfer_matrix(z)?;
    let psi = twisted_bethe_state(model, kappa, us)?;
    let lhs = transfer.apply(&psi);
    let mut rhs = psi.scale(&lambda0(model, z, us)?);
    for k in 0..us.len() {
        let swapped = us.complement(k).with_prepended(z)?;
        let state_k = twisted_bethe_state(model, kappa, &swapped)?;
        rhs = rhs.add(&state_k.scale(&lambda_k(model, z, us, k)?));
    }
    Ok(lhs.sub(&rhs).max_norm())
}

/// Relative eigenvector residual
/// `|T(z) psi - Lambda_0 psi| / (|psi| (1 + |Lambda_0|))` at one point.
pub fn eigenvector_residual(
    model: &SpinChainModel,
    z: &Scalar,
    us: &ParamSet,
) -> Result<Residual> {
    check_action_arguments(model, z, us)?;
    let psi = model.bethe_state(us)?;
    let transfer = model.transfer_matrix(z)?;
    let lam = lambda0(model, z, us)?;
    let gap = transfer.apply(&psi).sub(&psi.scale(&lam)).max_norm();
    match model.mode() {
        Mode::Exact => Ok(gap),
        Mode::Float => {
            let scale = psi.max_norm().as_f64() * (1.0 + lam.abs_f64());
            if scale == 0.0 {
                return Err(Error::InvalidArgument(
                    "creation parameters produced the zero vector".into(),
                ));
            }
            Ok(Residual::Float(gap.as_f64() / scale))
        }
    }
}

/// Options for the float-mode Bethe-equation solver.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Independent random restarts of the damped Newton iteration.
    pub restarts: usize,
    /// Newton iterations per restart.
    pub max_iterations: usize,
    /// Scaled algebraic residual required for convergence.
    pub tolerance: f64,
    /// Minimum allowed distance between roots, to inhomogeneities, and of
    /// root differences to `±c`.
    pub admissibility_delta: f64,
    /// Relative eigenvector residual required for acceptance.
    pub eigen_tolerance: f64,
    /// Distance below which two root tuples count as the same solution.
    pub dedup_distance: f64,
    /// Largest allowed root magnitude. The algebraic residual also vanishes
    /// as a root escapes to infinity (the equations degenerate there), so
    /// runaway iterates would otherwise be accepted as spurious solutions.
    pub max_root_magnitude: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            restarts: 50,
            max_iterations: 60,
            tolerance: 1e-12,
            admissibility_delta: 1e-8,
            eigen_tolerance: 1e-8,
            dedup_distance: 1e-6,
            max_root_magnitude: 1e3,
        }
    }
}

/// One accepted Bethe root tuple with its certificates.
#[derive(Clone, Debug)]
pub struct AcceptedRoot {
    /// Roots sorted by (real, imaginary), always float mode.
    pub roots: Vec<Scalar>,
    /// Scaled algebraic residual `max_k |F_k| / (1 + |t1| + |t2|)`.
    pub algebraic_residual: f64,
    /// Worst relative eigenvector residual over the test points.
    pub eigen_residual: f64,
    /// The transfer eigenvalue `Lambda_0` at the first test point.
    pub eigenvalue: Scalar,
}

/// Outcome statistics of a solver run.
#[derive(Clone, Debug, Default)]
pub struct SolveOutcome {
    pub accepted: Vec<AcceptedRoot>,
    pub attempts: usize,
    pub converged: usize,
    pub rejected_admissibility: usize,
    pub rejected_residual: usize,
}

/// Picks `count` integer-valued spectral points avoiding inhomogeneities
/// and the given roots.
fn test_points(model: &SpinChainModel, roots: &[Complex64], count: usize) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = 1_i64;
    while out.len() < count {
        let z = Scalar::real(candidate as f64);
        candidate += 1;
        if model.check_spectral_point(&z).is_err() {
            continue;
        }
        let zc = z.to_complex64();
        if roots.iter().any(|r| (r - zc).norm() < 1e-3) {
            continue;
        }
        out.push(z);
    }
    out
}

/// Solves the Bethe equations for `magnons` parameters in float mode with
/// damped Newton iteration from random starts. Accepted tuples satisfy the
/// scaled algebraic residual bound and are certified as transfer-matrix
/// eigenvectors at two spectral points.
pub fn solve_bethe(
    model: &SpinChainModel,
    magnons: usize,
    rng: &mut impl Rng,
    opts: &SolveOptions,
) -> Result<SolveOutcome> {
    if magnons == 0 {
        return Err(Error::InvalidArgument(
            "the solver needs at least one Bethe parameter".into(),
        ));
    }
    if magnons > model.length() {
        return Err(Error::InvalidArgument(format!(
            "{magnons} parameters exceed the chain length {}; every creation product vanishes",
            model.length()
        )));
    }
    let fmodel = model.to_float();
    let profile = fmodel.vacuum_profile();
    let c = fmodel.coupling().to_complex64();
    let xis: Vec<Complex64> = fmodel
        .inhomogeneities()
        .iter()
        .map(Scalar::to_complex64)
        .collect();

    // Random starts inside a box around the inhomogeneity cloud.
    let re_min = xis.iter().map(|x| x.re).fold(f64::INFINITY, f64::min) - 2.0;
    let re_max = xis.iter().map(|x| x.re).fold(f64::NEG_INFINITY, f64::max) + 2.0;

    // Deterministic starts first: root tuples read off the dense sector
    // eigenvectors through the root-polynomial fit (most sector states are
    // symmetry descendants whose tuples put roots at infinity; their fits
    // fail certification below and cost only a rejected attempt). Random
    // box restarts then cover anything the dense route missed. Every start
    // goes through the same Newton polish and certification.
    let mut starts = tq_seed_tuples(&fmodel, magnons).unwrap_or_default();
    for _ in 0..opts.restarts {
        starts.push(
            (0..magnons)
                .map(|_| {
                    Complex64::new(
                        rng.gen_range(re_min..re_max),
                        rng.gen_range(-2.0..2.0_f64),
                    )
                })
                .collect(),
        );
    }

    let mut outcome = SolveOutcome::default();
    for start in starts {
        outcome.attempts += 1;
        let mut u = start;

        let mut converged = false;
        for _ in 0..opts.max_iterations {
            if u.iter().any(|ui| ui.norm() > opts.max_root_magnitude) {
                break; // escaped toward the degenerate solution at infinity
            }
            let Some((f_vals, scale)) = residual_vector(&profile, c, &xis, &u) else {
                break;
            };
            let worst = f_vals
                .iter()
                .zip(scale.iter())
                .map(|(f, s)| f.norm() / s)
                .fold(0.0, f64::max);
            if worst <= opts.tolerance {
                converged = true;
                break;
            }
            let Some(jac) = jacobian(&profile, c, &u) else {
                break;
            };
            let Some(step) = solve_linear(jac, f_vals.clone()) else {
                break;
            };
            // Damped update: halve the step until the residual decreases.
            let base_norm = f_vals.iter().map(|f| f.norm()).fold(0.0, f64::max);
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..8 {
                let trial: Vec<Complex64> = u
                    .iter()
                    .zip(step.iter())
                    .map(|(ui, di)| ui - lambda * di)
                    .collect();
                if let Some((trial_f, _)) = residual_vector(&profile, c, &xis, &trial) {
                    let trial_norm = trial_f.iter().map(|f| f.norm()).fold(0.0, f64::max);
                    if trial_norm < base_norm {
                        u = trial;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if !converged {
            continue;
        }
        outcome.converged += 1;

        if !is_admissible(&u, &xis, c, opts.admissibility_delta, opts.max_root_magnitude) {
            outcome.rejected_admissibility += 1;
            continue;
        }

        // Sort the tuple canonically and deduplicate.
        let mut sorted = u.clone();
        sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        if outcome.accepted.iter().any(|acc| {
            acc.roots
                .iter()
                .zip(sorted.iter())
                .all(|(a, b)| (a.to_complex64() - b).norm() < opts.dedup_distance)
        }) {
            continue;
        }

        // Certify: scaled algebraic residual and eigenvector residual.
        let root_set = match ParamSet::new(
            sorted.iter().map(|z| Scalar::complex(z.re, z.im)).collect(),
            Mode::Float,
        ) {
            Ok(s) => s,
            Err(_) => {
                outcome.rejected_admissibility += 1;
                continue;
            }
        };
        let algebraic = match bethe_residual_norm(&fmodel, &root_set) {
            Ok(r) => r.as_f64(),
            Err(_) => {
                outcome.rejected_residual += 1;
                continue;
            }
        };
        if algebraic > opts.tolerance * 10.0 {
            outcome.rejected_residual += 1;
            continue;
        }
        let points = test_points(&fmodel, &sorted, 2);
        let mut eigen_worst = 0.0_f64;
        let mut eigenvalue = None;
        let mut certified = true;
        for z in &points {
            match eigenvector_residual(&fmodel, z, &root_set) {
                Ok(r) => eigen_worst = eigen_worst.max(r.as_f64()),
                Err(_) => {
                    certified = false;
                    break;
                }
            }
            if eigenvalue.is_none() {
                eigenvalue = Some(lambda0(&fmodel, z, &root_set)?);
            }
        }
        if !certified || eigen_worst > opts.eigen_tolerance {
            outcome.rejected_residual += 1;
            continue;
        }

        outcome.accepted.push(AcceptedRoot {
            roots: root_set.as_slice().to_vec(),
            algebraic_residual: algebraic,
            eigen_residual: eigen_worst,
            eigenvalue: eigenvalue.expect("at least one test point"),
        });
    }

    // Canonical report order: by the first root's (re, im).
    outcome.accepted.sort_by(|x, y| {
        let a = x.roots[0].to_complex64();
        let b = y.roots[0].to_complex64();
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    Ok(outcome)
}

/// `F_k` and their scales for the Newton iteration; `None` on a pole.
fn residual_vector(
    profile: &crate::chain::VacuumProfile,
    c: Complex64,
    xis: &[Complex64],
    u: &[Complex64],
) -> Option<(Vec<Complex64>, Vec<f64>)> {
    let n = u.len();
    let mut f_vals = Vec::with_capacity(n);
    let mut scales = Vec::with_capacity(n);
    for k in 0..n {
        if xis.iter().any(|xi| (u[k] - xi).norm() < 1e-14) {
            return None;
        }
        let a_k = profile
            .vacuum_a(&Scalar::complex(u[k].re, u[k].im))
            .ok()?
            .to_complex64();
        let mut incoming = Complex64::new(1.0, 0.0);
        let mut outgoing = Complex64::new(1.0, 0.0);
        for j in 0..n {
            if j == k {
                continue;
            }
            let diff = u[j] - u[k];
            if diff.norm() < 1e-14 {
                return None;
            }
            incoming *= 1.0 + c / diff;
            outgoing *= 1.0 - c / diff;
        }
        let t1 = a_k * incoming;
        let t2 = outgoing;
        f_vals.push(t1 - t2);
        scales.push(1.0 + t1.norm() + t2.norm());
    }
    Some((f_vals, scales))
}

/// Analytic Jacobian `dF_k / du_m`; `None` on a pole or vanishing factor.
fn jacobian(
    profile: &crate::chain::VacuumProfile,
    c: Complex64,
    u: &[Complex64],
) -> Option<Vec<Vec<Complex64>>> {
    let n = u.len();
    let mut jac = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for k in 0..n {
        let uk = Scalar::complex(u[k].re, u[k].im);
        let a_k = profile.vacuum_a(&uk).ok()?.to_complex64();
        let a_k_prime = profile.vacuum_a_derivative(&uk).ok()?.to_complex64();

        // t1 = a(u_k) prod_{j != k} f(u_j, u_k), t2 = prod_{j != k} f(u_k, u_j)
        let mut t1 = a_k;
        let mut t2 = Complex64::new(1.0, 0.0);
        let mut f_in = Vec::with_capacity(n);
        let mut f_out = Vec::with_capacity(n);
        for j in 0..n {
            if j == k {
                f_in.push(Complex64::new(1.0, 0.0));
                f_out.push(Complex64::new(1.0, 0.0));
                continue;
            }
            let diff = u[j] - u[k];
            if diff.norm() < 1e-14 {
                return None;
            }
            let fin = 1.0 + c / diff;
            let fout = 1.0 - c / diff;
            if fin.norm() < 1e-14 || fout.norm() < 1e-14 {
                return None;
            }
            f_in.push(fin);
            f_out.push(fout);
            t1 *= fin;
            t2 *= fout;
        }

        // d/du f(u, v) = -c/(u-v)^2, d/dv f(u, v) = +c/(u-v)^2.
        // Diagonal: product rule over every factor of t1 and t2.
        let mut diag = Complex64::new(0.0, 0.0);
        if a_k.norm() > 0.0 {
            diag += t1 * (a_k_prime / a_k);
        } else {
            // a(u_k) = 0 only at a pole-adjacent zero; restart instead.
            return None;
        }
        for j in 0..n {
            if j == k {
                continue;
            }
            let diff = u[j] - u[k];
            let dsq = diff * diff;
            // f(u_j, u_k): derivative in the second slot -> +c/diff^2
            diag += t1 * ((c / dsq) / f_in[j]);
            // f(u_k, u_j): derivative in the first slot of f(u,v) at u=u_k:
            // f(u_k, u_j) = 1 + c/(u_k - u_j), d/du_k = -c/(u_k - u_j)^2 = -c/diff^2
            diag -= t2 * ((-c / dsq) / f_out[j]);
        }
        jac[k][k] = diag;

        for m in 0..n {
            if m == k {
                continue;
            }
            let diff = u[m] - u[k];
            let dsq = diff * diff;
            // t1 depends on u_m through f(u_m, u_k): d/du_m = -c/diff^2
            let d_t1 = t1 * ((-c / dsq) / f_in[m]);
            // t2 depends on u_m through f(u_k, u_m) = 1 - c/diff,
            // d/du_m (1 - c/(u_k - u_m)) = -c/(u_k - u_m)^2 = -c/dsq
            let d_t2 = t2 * ((-c / dsq) / f_out[m]);
            jac[k][m] = d_t1 - d_t2;
        }
    }
    Some(jac)
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_linear(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[pivot][col].norm() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let upper = a[col][k];
                a[row][k] -= factor * upper;
            }
            let rhs = b[col];
            b[row] -= factor * rhs;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Roots must stay away from inhomogeneities, from each other, and their
/// differences must avoid `±c` where the residual formula degenerates.
/// Basis indices of the fixed-magnon sector.
fn sector_indices(dim: usize, magnons: usize) -> Vec<usize> {
    (0..dim)
        .filter(|b| b.count_ones() as usize == magnons)
        .collect()
}

/// The transfer matrix restricted to a sector basis (closed because the
/// transfer matrix commutes with the magnon number).
fn sector_block(transfer: &LinearOperator, idx: &[usize]) -> Array2<Complex64> {
    let n = idx.len();
    let mut arr = Array2::<Complex64>::zeros((n, n));
    for (i, &bi) in idx.iter().enumerate() {
        for (j, &bj) in idx.iter().enumerate() {
            arr[(i, j)] = transfer.get(bi, bj).to_complex64();
        }
    }
    arr
}

/// Roots of the monic polynomial `z^n + c_{n-1} z^{n-1} + ... + c_0` via
/// the companion matrix (tiny `n` only).
fn polynomial_roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = coeffs.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut comp = Array2::<Complex64>::zeros((n, n));
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for (i, coeff) in coeffs.iter().enumerate() {
        comp[(i, n - 1)] = -coeff;
    }
    let (eigs, _vecs) = comp.eig().ok()?;
    Some(eigs.to_vec())
}

/// Deterministic Newton starts from the dense route. The transfer matrices
/// at different points commute, so a sector eigenvector computed once fixes
/// an eigenvalue branch `Lambda(z)` everywhere by a single matrix-vector
/// product. The root polynomial `Q(z) = prod (z - u_k)` of that branch
/// satisfies `Lambda(z) Q(z) = a(z) Q(z-c) + d(z) Q(z+c)`, which is linear
/// in the non-leading coefficients of `Q`; solving it at `n` generic points
/// and factoring `Q` yields the candidate tuple.
fn tq_seed_tuples(fmodel: &SpinChainModel, magnons: usize) -> Result<Vec<Vec<Complex64>>> {
    let c = fmodel.coupling().to_complex64();
    let xis: Vec<Complex64> = fmodel
        .inhomogeneities()
        .iter()
        .map(Scalar::to_complex64)
        .collect();

    // real integer sample points clear of the inhomogeneities
    let mut zs: Vec<f64> = Vec::new();
    let mut z = 2.0;
    while zs.len() < magnons + 1 {
        if xis.iter().all(|xi| (Complex64::new(z, 0.0) - xi).norm() > 1e-3) {
            zs.push(z);
        }
        z += 1.0;
    }

    let idx = sector_indices(fmodel.dim(), magnons);
    let dim = idx.len();
    let block0 = sector_block(&fmodel.transfer_matrix(&Scalar::real(zs[magnons]))?, &idx);
    let (_eigs, vecs) = block0
        .eig()
        .map_err(|e| Error::Backend(format!("sector eigensolver failed: {e}")))?;
    let mut blocks = Vec::with_capacity(magnons);
    for &zr in &zs[..magnons] {
        blocks.push(sector_block(&fmodel.transfer_matrix(&Scalar::real(zr))?, &idx));
    }

    let a_of = |z: Complex64| -> Complex64 { xis.iter().map(|xi| (z - xi + c) / (z - xi)).product() };

    let mut seeds = Vec::new();
    for j in 0..dim {
        let psi = vecs.column(j);
        let Some((anchor, anchor_val)) = psi
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        else {
            continue;
        };
        if anchor_val.norm() < 1e-12 {
            continue;
        }
        let mut mat = vec![vec![Complex64::new(0.0, 0.0); magnons]; magnons];
        let mut rhs = vec![Complex64::new(0.0, 0.0); magnons];
        for (row, (&zr, block)) in zs[..magnons].iter().zip(blocks.iter()).enumerate() {
            let zc = Complex64::new(zr, 0.0);
            let t_psi: Complex64 = block
                .row(anchor)
                .iter()
                .zip(psi.iter())
                .map(|(t, p)| t * p)
                .sum();
            let lam = t_psi / anchor_val;
            let az = a_of(zc);
            let term = |k: u32| lam * zc.powu(k) - az * (zc - c).powu(k) - (zc + c).powu(k);
            for (k, entry) in mat[row].iter_mut().enumerate() {
                *entry = term(k as u32);
            }
            rhs[row] = -term(magnons as u32);
        }
        let Some(q) = solve_linear(mat, rhs) else {
            continue;
        };
        let Some(roots) = polynomial_roots(&q) else {
            continue;
        };
        if roots.iter().all(|r| r.norm().is_finite()) {
            seeds.push(roots);
        }
    }
    Ok(seeds)
}

fn is_admissible(
    u: &[Complex64],
    xis: &[Complex64],
    c: Complex64,
    delta: f64,
    max_magnitude: f64,
) -> bool {
    for (i, ui) in u.iter().enumerate() {
        if ui.norm() > max_magnitude {
            return false;
        }
        if xis.iter().any(|xi| (ui - xi).norm() < delta) {
            return false;
        }
        for uj in u.iter().skip(i + 1) {
            let diff = ui - uj;
            if diff.norm() < delta
                || (diff - c).norm() < delta
                || (diff + c).norm() < delta
            {
                return false;
            }
        }
    }
    true
}

/// All eigenvalues of the transfer matrix at `z`, computed in float mode
/// with a dense eigensolver and sorted by (real, imaginary).
pub fn dense_spectrum(model: &SpinChainModel, z: &Scalar) -> Result<Vec<Scalar>> {
    let fmodel = model.to_float();
    let zf = z.to_float();
    let transfer = fmodel.transfer_matrix(&zf)?;
    let n = transfer.dim();
    let mut arr = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            arr[(i, j)] = transfer.get(i, j).to_complex64();
        }
    }
    let (eigs, _vecs) = arr
        .eig()
        .map_err(|e| Error::Backend(format!("dense eigensolver failed: {e}")))?;
    let mut vals: Vec<Complex64> = eigs.to_vec();
    vals.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(vals.into_iter().map(|v| Scalar::complex(v.re, v.im)).collect())
}

/// Eigenvalues of the transfer matrix restricted to the fixed-magnon
/// sector (the transfer matrix commutes with the magnon number, so the
/// sector block is closed), sorted by (real, imaginary).
pub fn dense_sector_spectrum(
    model: &SpinChainModel,
    z: &Scalar,
    magnons: usize,
) -> Result<Vec<Scalar>> {
    let fmodel = model.to_float();
    let zf = z.to_float();
    let transfer = fmodel.transfer_matrix(&zf)?;
    let idx = sector_indices(transfer.dim(), magnons);
    let arr = sector_block(&transfer, &idx);
    let (eigs, _vecs) = arr
        .eig()
        .map_err(|e| Error::Backend(format!("sector eigensolver failed: {e}")))?;
    let mut vals: Vec<Complex64> = eigs.to_vec();
    vals.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(vals.into_iter().map(|v| Scalar::complex(v.re, v.im)).collect())
}

/// The number of finite admissible root tuples: new (highest-weight)
/// eigenstates first appearing in the `magnons` sector. The rest of that
/// sector is spanned by symmetry descendants of lower sectors, whose
/// tuples contain roots at infinity.
pub fn expected_onshell_count(length: usize, magnons: usize) -> usize {
    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        let mut v = 1usize;
        for i in 0..k {
            v = v * (n - i) / (i + 1);
        }
        v
    }
    let full = binom(length, magnons);
    let below = if magnons == 0 {
        0
    } else {
        binom(length, magnons - 1)
    };
    full.saturating_sub(below)
}

/// Distance from `value` to the nearest entry of the dense spectrum.
pub fn nearest_spectrum_distance(spectrum: &[Scalar], value: &Scalar) -> f64 {
    spectrum
        .iter()
        .map(|s| (s.to_complex64() - value.to_complex64()).norm())
        .fold(f64::INFINITY, f64::min)
}
