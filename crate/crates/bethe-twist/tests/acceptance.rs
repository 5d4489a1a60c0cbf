//! Acceptance gate: one test per criterion, each printing a single
//! `criterion N: PASS` line (visible with `--nocapture`; failures always
//! surface the line through the assertion message).
//!
//! Exact-mode criteria require residuals that are identically zero in
//! rational arithmetic; float criteria use the stated tolerances.

use std::time::Instant;

use bethe_twist::bethe::{
    dense_spectrum, lambda0, nearest_spectrum_distance, solve_bethe, transfer_action_residual,
    twisted_transfer_action_residual, SolveOptions,
};
use bethe_twist::chain::SpinChainModel;
use bethe_twist::expansion::{
    check_onshell_collapse, contribution_form_residual, contribution_sum_residual,
    twisted_b_expansion_residual, twisted_offshell_residuals, ContributionForm, ContributionOp,
};
use bethe_twist::kernel::{
    binomial_partition_sum, binomial_scalar, partition_identity_sides, ParamSet,
    PartialFractionIdentity,
};
use bethe_twist::sampling::{rng_for_check, sample_distinct_params, sample_point, sample_twist};
use bethe_twist::scalar::{Mode, Scalar};
use bethe_twist::twist::{trace_preservation_residual, twisted_vacuum_residuals};

const MASTER_SEED: u64 = 42;

fn rational(p: i64, q: i64) -> Scalar {
    Scalar::rational(p, q).expect("static rational")
}

/// Five pairwise-distinct rationals whose differences avoid ±1, usable as
/// inhomogeneities for any chain length up to five at coupling c = 1.
fn xi_pool() -> Vec<Scalar> {
    vec![
        rational(0, 1),
        rational(1, 7),
        rational(-2, 5),
        rational(3, 11),
        rational(9, 13),
    ]
}

fn exact_model(length: usize) -> SpinChainModel {
    SpinChainModel::new(length, rational(1, 1), xi_pool()[..length].to_vec())
        .expect("admissible model")
}

fn avoid_for(model: &SpinChainModel) -> Vec<Scalar> {
    model.inhomogeneities().as_slice().to_vec()
}

#[test]
fn criterion_01_rtt_exact_and_float() {
    let start = Instant::now();
    let mut rng = rng_for_check(MASTER_SEED, "acceptance-rtt");
    for length in 1..=5 {
        let model = exact_model(length);
        let fmodel = model.to_float();
        let avoid = avoid_for(&model);
        let favoid = avoid_for(&fmodel);
        for _ in 0..20 {
            let uv = sample_distinct_params(&mut rng, 2, model.coupling(), &avoid, Mode::Exact)
                .expect("sample (u, v)");
            let res = model.rtt_residual(uv.get(0), uv.get(1)).expect("rtt residual");
            assert!(
                res.is_zero(),
                "criterion 1: FAIL — exact RTT residual {} nonzero at L={length}",
                res.as_f64()
            );

            let fuv = sample_distinct_params(&mut rng, 2, fmodel.coupling(), &favoid, Mode::Float)
                .expect("sample float (u, v)");
            let fres = fmodel.rtt_residual(fuv.get(0), fuv.get(1)).expect("float rtt residual");
            assert!(
                fres.as_f64() <= 1e-10,
                "criterion 1: FAIL — float RTT residual {} > 1e-10 at L={length}",
                fres.as_f64()
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "criterion 1: FAIL — runtime {elapsed:.2?} exceeds 10 s"
    );
    println!("criterion 1: PASS — RTT exact L=1..5 x20 pairs, float <= 1e-10, in {elapsed:.2?}");
}

#[test]
fn criterion_02_trace_preservation() {
    let mut rng = rng_for_check(MASTER_SEED, "acceptance-trace");
    for length in 1..=5 {
        let model = exact_model(length);
        let avoid = avoid_for(&model);
        for _ in 0..10 {
            let z = sample_point(&mut rng, model.coupling(), &avoid, Mode::Exact)
                .expect("spectral point");
            let t = model.monodromy(&z).expect("monodromy");
            let kappa = sample_twist(&mut rng, Mode::Exact).expect("unimodular twist");
            let res = trace_preservation_residual(&t, &kappa);
            assert!(
                res.is_zero(),
                "criterion 2: FAIL — trace shift {} nonzero at L={length}",
                res.as_f64()
            );
        }
    }
    println!("criterion 2: PASS — trace of the twisted monodromy matches exactly, L=1..5 x10 twists");
}

#[test]
fn criterion_03_vacuum_and_offshell_actions() {
    let mut rng = rng_for_check(MASTER_SEED, "acceptance-vacuum-offshell");
    for draw in 0..10 {
        // Vacuum action of the twisted diagonal entries, varying length.
        let length = 1 + draw % 4;
        let model = exact_model(length);
        let avoid = avoid_for(&model);
        let z = sample_point(&mut rng, model.coupling(), &avoid, Mode::Exact).expect("point");
        let kappa = sample_twist(&mut rng, Mode::Exact).expect("twist");
        let (res_a, res_d) = twisted_vacuum_residuals(&model, &kappa, &z).expect("vacuum action");
        assert!(
            res_a.is_zero() && res_d.is_zero(),
            "criterion 3: FAIL — twisted vacuum action residuals ({}, {}) at L={length}",
            res_a.as_f64(),
            res_d.as_f64()
        );

        // Off-shell action of the twisted diagonal entries on a product of
        // twisted creation operators, n = 1..3 on the length-4 chain.
        let magnons = 1 + draw % 3;
        let model = exact_model(4);
        let avoid = avoid_for(&model);
        let us = sample_distinct_params(&mut rng, magnons, model.coupling(), &avoid, Mode::Exact)
            .expect("creation parameters");
        let mut avoid_z = avoid.clone();
        avoid_z.extend(us.as_slice().iter().cloned());
        let z = sample_point(&mut rng, model.coupling(), &avoid_z, Mode::Exact).expect("point");
        let (res_a, res_d) =
            twisted_offshell_residuals(&model, &kappa, &z, &us).expect("off-shell action");
        assert!(
            res_a.is_zero() && res_d.is_zero(),
            "criterion 3: FAIL — off-shell action residuals ({}, {}) at n={magnons}",
            res_a.as_f64(),
            res_d.as_f64()
        );
    }
    println!("criterion 3: PASS — twisted vacuum and off-shell action formulas exact, L<=4, n<=3, 10 draws");
}

#[test]
fn criterion_04_twisted_transfer_action() {
    let mut rng = rng_for_check(MASTER_SEED, "acceptance-transfer-action");
    let model = exact_model(4);
    let avoid = avoid_for(&model);
    for draw in 0..10 {
        let magnons = 1 + draw % 3;
        let us = sample_distinct_params(&mut rng, magnons, model.coupling(), &avoid, Mode::Exact)
            .expect("creation parameters");
        let mut avoid_z = avoid.clone();
        avoid_z.extend(us.as_slice().iter().cloned());
        let z = sample_point(&mut rng, model.coupling(), &avoid_z, Mode::Exact).expect("point");
        let kappa = sample_twist(&mut rng, Mode::Exact).expect("twist");

        // The same multiple-commutation coefficients Lambda_0, Lambda_k drive
        // both sides: twisted products and plain products, identical draw.
        let twisted = twisted_transfer_action_residual(&model, &kappa, &z, &us)
            .expect("twisted transfer action");
        let plain = transfer_action_residual(&model, &z, &us).expect("plain transfer action");
        assert!(
            twisted.is_zero(),
            "criterion 4: FAIL — twisted transfer action residual {} at n={magnons}",
            twisted.as_f64()
        );
        assert!(
            plain.is_zero(),
            "criterion 4: FAIL — plain transfer action residual {} on the same draw",
            plain.as_f64()
        );
    }
    println!("criterion 4: PASS — transfer action exact off-shell, twisted and plain on shared coefficients");
}

#[test]
fn criterion_05_binomial_partition_lemma() {
    let mut rng = rng_for_check(MASTER_SEED, "acceptance-binomial");
    let c = rational(1, 1);
    for l in 1..=6 {
        for s in 0..=l {
            let mut previous: Option<Scalar> = None;
            for _ in 0..5 {
                let xs = sample_distinct_params(&mut rng, l, &c, &[], Mode::Exact)
                    .expect("parameter set");
                let sum = binomial_partition_sum(&xs, s, &c).expect("partition sum");
                let expected = binomial_scalar(l, s, Mode::Exact);
                assert!(
                    (&sum - &expected).is_zero(),
                    "criterion 5: FAIL — partition sum {sum} != C({l},{s})"
                );
                if let Some(prev) = &previous {
                    assert!(
                        (&sum - prev).is_zero(),
                        "criterion 5: FAIL — value depends on the sampled set at l={l}, s={s}"
                    );
                }
                previous = Some(sum);
            }
        }
    }
    println!("criterion 5: PASS — partition sum equals C(l,s) exactly and is set-independent, l<=6");
}

#[test]
fn criterion_06_partial_fraction_identities() {
    let start = Instant::now();
    let mut rng = rng_for_check(MASTER_SEED, "acceptance-partial-fractions");
    let c = rational(1, 1);
    let identities = [
        PartialFractionIdentity::LeftDirect,
        PartialFractionIdentity::RightDirect,
        PartialFractionIdentity::LeftPartition,
        PartialFractionIdentity::RightPartition,
    ];
    for identity in identities {
        for i in 0..100 {
            let size = 1 + i % 6;
            let us = sample_distinct_params(&mut rng, size, &c, &[], Mode::Exact)
                .expect("parameter set");
            let z = sample_point(&mut rng, &c, us.as_slice(), Mode::Exact).expect("point");
            let (lhs, rhs) = partition_identity_sides(identity, &z, &us, &c).expect("both sides");
            assert!(
                (&lhs - &rhs).is_zero(),
                "criterion 6: FAIL — {identity:?} lhs {lhs} != rhs {rhs} at size {size}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "criterion 6: FAIL — runtime {elapsed:.2?} exceeds 5 s"
    );
    println!("criterion 6: PASS — four partial-fraction identities, 100 exact instances each, in {elapsed:.2?}");
}

#[test]
fn criterion_07_twisted_expansion() {
    let mut rng = rng_for_check(MASTER_SEED, "acceptance-expansion");
    let cases = [
        (1, 1),
        (2, 1),
        (2, 2),
        (3, 1),
        (3, 2),
        (3, 3),
        (4, 1),
        (4, 2),
        (4, 3),
        (4, 3),
    ];
    for (length, magnons) in cases {
        let model = exact_model(length);
        let avoid = avoid_for(&model);
        let us = sample_distinct_params(&mut rng, magnons, model.coupling(), &avoid, Mode::Exact)
            .expect("creation parameters");
        let kappa = sample_twist(&mut rng, Mode::Exact).expect("twist");
        let res = twisted_b_expansion_residual(&model, &kappa, &us).expect("expansion residual");
        assert!(
            res.is_zero(),
            "criterion 7: FAIL — expansion residual {} at L={length}, n={magnons}",
            res.as_f64()
        );
    }
    println!("criterion 7: PASS — twisted creation product equals its partition expansion exactly, 10 draws");
}

#[test]
fn criterion_08_contribution_identities() {
    let mut rng = rng_for_check(MASTER_SEED, "acceptance-contributions");
    let model = exact_model(4);
    let avoid = avoid_for(&model);
    for magnons in 1..=3 {
        let us = sample_distinct_params(&mut rng, magnons, model.coupling(), &avoid, Mode::Exact)
            .expect("creation parameters");
        let kappa = sample_twist(&mut rng, Mode::Exact).expect("twist");
        let distinguished = magnons - 1;
        for op in [
            ContributionOp::B,
            ContributionOp::A,
            ContributionOp::D,
            ContributionOp::C,
        ] {
            let res = contribution_form_residual(&model, &kappa, &us, op, distinguished)
                .expect("contribution forms");
            assert!(
                res.is_zero(),
                "criterion 8: FAIL — {op:?}-contribution forms disagree ({}) at n={magnons}",
                res.as_f64()
            );
        }
        for form in [ContributionForm::Direct, ContributionForm::Partition] {
            let res = contribution_sum_residual(&model, &kappa, &us, form, distinguished)
                .expect("contribution sum");
            assert!(
                res.is_zero(),
                "criterion 8: FAIL — contribution sum ({form:?}) residual {} at n={magnons}",
                res.as_f64()
            );
        }
    }
    println!("criterion 8: PASS — all four contributions match both forms and reassemble the expansion, n=1..3");
}

#[test]
fn criterion_09_onshell_collapse() {
    // Homogeneous length-2 chain at c = 1: the one-magnon Bethe equation is
    // linear with the single root u = -1/2.
    let mut rng = rng_for_check(MASTER_SEED, "acceptance-collapse");
    let model = SpinChainModel::homogeneous(2, Scalar::real(1.0), Scalar::real(0.0))
        .expect("homogeneous model");
    let root = ParamSet::from_scalars(vec![Scalar::real(-0.5)]).expect("root set");
    for _ in 0..5 {
        let kappa = sample_twist(&mut rng, Mode::Float).expect("twist");
        let report = check_onshell_collapse(&model, &kappa, &root, 1e-9).expect("collapse");
        assert!(
            report.residual.as_f64() <= 1e-9,
            "criterion 9: FAIL — collapse residual {} > 1e-9 on the homogeneous chain",
            report.residual.as_f64()
        );
    }

    // Solver roots on the default inhomogeneous length-4 chain, two magnons.
    let model = exact_model(4).to_float();
    let outcome = solve_bethe(&model, 2, &mut rng, &SolveOptions::default()).expect("solver");
    assert!(
        !outcome.accepted.is_empty(),
        "criterion 9: FAIL — solver returned no two-magnon roots"
    );
    for acc in &outcome.accepted {
        let us = ParamSet::from_scalars(acc.roots.clone()).expect("root set");
        let kappa = sample_twist(&mut rng, Mode::Float).expect("twist");
        let report = check_onshell_collapse(&model, &kappa, &us, 1e-8).expect("collapse");
        assert!(
            report.residual.as_f64() <= 1e-8,
            "criterion 9: FAIL — collapse residual {} > 1e-8 on solver roots",
            report.residual.as_f64()
        );
        assert!(
            report.constant_error <= 1e-8,
            "criterion 9: FAIL — fitted constant differs from k11^4 by {}",
            report.constant_error
        );
        assert!(
            report.max_subleading.as_f64() <= 1e-8,
            "criterion 9: FAIL — surviving sub-leading coefficient {}",
            report.max_subleading.as_f64()
        );
    }
    println!(
        "criterion 9: PASS — on-shell collapse to k11^(2n) B(u_bar)|0>: homogeneous root and {} solver tuples",
        outcome.accepted.len()
    );
}

#[test]
fn criterion_10_spectrum_consistency() {
    let mut rng = rng_for_check(MASTER_SEED, "acceptance-spectrum");
    let model = exact_model(4).to_float();
    let points = [Scalar::real(2.0), Scalar::real(3.0)];
    let mut tuples = 0;
    for magnons in 1..=2 {
        let outcome =
            solve_bethe(&model, magnons, &mut rng, &SolveOptions::default()).expect("solver");
        assert!(
            !outcome.accepted.is_empty(),
            "criterion 10: FAIL — no accepted roots at n={magnons}"
        );
        for acc in &outcome.accepted {
            tuples += 1;
            let us = ParamSet::from_scalars(acc.roots.clone()).expect("root set");
            for z in &points {
                let lam = lambda0(&model, z, &us).expect("reference eigenvalue");
                let spectrum = dense_spectrum(&model, z).expect("dense spectrum");
                let dist = nearest_spectrum_distance(&spectrum, &lam);
                assert!(
                    dist <= 1e-8,
                    "criterion 10: FAIL — Lambda_0 misses the dense spectrum by {dist} at z={z}"
                );
            }
        }
    }

    // Homogeneous length-2 chain: dense spectrum {3, 5, 5, 5} at z = 1 and
    // Lambda_0(1; -1/2) = 3.
    let homog = SpinChainModel::homogeneous(2, Scalar::real(1.0), Scalar::real(0.0))
        .expect("homogeneous model");
    let z = Scalar::real(1.0);
    let spectrum = dense_spectrum(&homog, &z).expect("dense spectrum");
    let expected = [3.0, 5.0, 5.0, 5.0];
    assert_eq!(spectrum.len(), 4);
    for (got, want) in spectrum.iter().zip(expected) {
        let gz = got.to_complex64();
        assert!(
            (gz.re - want).abs() <= 1e-9 && gz.im.abs() <= 1e-9,
            "criterion 10: FAIL — homogeneous spectrum entry {gz} != {want}"
        );
    }
    let root = ParamSet::from_scalars(vec![Scalar::real(-0.5)]).expect("root set");
    let lam = lambda0(&homog, &z, &root).expect("reference eigenvalue");
    assert!(
        (lam.to_complex64() - num_complex::Complex64::new(3.0, 0.0)).norm() <= 1e-10,
        "criterion 10: FAIL — Lambda_0(1; -1/2) = {lam} != 3"
    );
    println!(
        "criterion 10: PASS — Lambda_0 sits in the dense spectrum at two points for {tuples} tuples; homogeneous case is {{3,5,5,5}}"
    );
}

#[test]
fn criterion_11_default_suite_runs_clean() {
    let start = Instant::now();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_bethe-twist"))
        .args(["verify", "--suite", "all"])
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    assert!(
        out.status.success(),
        "criterion 11: FAIL — exit {:?}; stdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "criterion 11: FAIL — suite took {elapsed:.2?}"
    );
    println!("criterion 11: PASS — `verify --suite all` exit 0 in {elapsed:.2?}");
}
