//! Deterministic random draws for the verification suite.
//!
//! Every check derives its own RNG stream from the master seed and the
//! check name, so reports are byte-identical for a fixed (config, seed)
//! and adding or reordering checks never perturbs the draws of the
//! others. Parameters are always sampled as exact rationals and converted
//! afterwards, so exact and float runs see the same nominal values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::ParamSet;
use crate::scalar::{Mode, Scalar};
use crate::twist::TwistMatrix;

/// Minimum pairwise separation of sampled parameters (and of their
/// distances to excluded values), keeping exact denominators small and
/// float evaluations well-conditioned.
pub const MIN_SEPARATION: f64 = 1e-2;

fn fnv1a(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// A dedicated RNG stream for one named check under a master seed.
pub fn rng_for_check(master_seed: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(fnv1a(master_seed, name))
}

/// One random exact rational with numerator in `[-20, 20]` and denominator
/// in `[1, 10]`.
pub fn sample_rational(rng: &mut impl Rng) -> Scalar {
    let p = rng.gen_range(-20_i64..=20);
    let q = rng.gen_range(1_i64..=10);
    Scalar::rational(p, q).expect("nonzero denominator")
}

/// Margin-based rejection in f64: a gap of at least [`MIN_SEPARATION`]
/// from the other value and from the shifted values `other ± c` implies,
/// in particular, exact non-coincidence and exact avoidance of `±c`
/// differences — sound for both arithmetic modes.
fn too_close(candidate: &Scalar, other: &Scalar, c: &Scalar) -> bool {
    let d = candidate.to_complex64() - other.to_complex64();
    let cc = c.to_complex64();
    d.norm() < MIN_SEPARATION
        || (d - cc).norm() < MIN_SEPARATION
        || (d + cc).norm() < MIN_SEPARATION
}

/// Samples `count` pairwise-distinct rationals, separated from each other
/// and from every value in `avoid` (any mode), with differences keeping a
/// margin from `0` and `±c`. The result is converted to `mode`.
pub fn sample_distinct_params(
    rng: &mut impl Rng,
    count: usize,
    c: &Scalar,
    avoid: &[Scalar],
    mode: Mode,
) -> Result<ParamSet> {
    let mut picks: Vec<Scalar> = Vec::with_capacity(count);
    let mut attempts = 0;
    while picks.len() < count {
        attempts += 1;
        if attempts > 10_000 {
            return Err(Error::InvalidArgument(format!(
                "could not place {count} separated parameters after {attempts} draws"
            )));
        }
        let candidate = sample_rational(rng);
        if avoid
            .iter()
            .chain(picks.iter())
            .any(|x| too_close(&candidate, x, c))
        {
            continue;
        }
        picks.push(candidate);
    }
    let picks = match mode {
        Mode::Exact => picks,
        Mode::Float => picks.iter().map(Scalar::to_float).collect(),
    };
    if picks.is_empty() {
        return Ok(ParamSet::empty(mode));
    }
    ParamSet::from_scalars(picks)
}

/// One sampled parameter under the same separation rules.
pub fn sample_point(
    rng: &mut impl Rng,
    c: &Scalar,
    avoid: &[Scalar],
    mode: Mode,
) -> Result<Scalar> {
    let set = sample_distinct_params(rng, 1, c, avoid, mode)?;
    Ok(set.get(0).clone())
}

fn sample_nonzero_small(rng: &mut impl Rng) -> Scalar {
    loop {
        let p = rng.gen_range(-6_i64..=6);
        if p == 0 {
            continue;
        }
        let q = rng.gen_range(1_i64..=4);
        return Scalar::rational(p, q).expect("nonzero denominator");
    }
}

/// A random unimodular twist with all entries nonzero: `k11`, `k12`, `k21`
/// are small nonzero rationals and `k22 = (1 + k12 k21) / k11`.
pub fn sample_twist(rng: &mut impl Rng, mode: Mode) -> Result<TwistMatrix> {
    for _ in 0..1000 {
        let k11 = sample_nonzero_small(rng);
        let k12 = sample_nonzero_small(rng);
        let k21 = sample_nonzero_small(rng);
        let one = Scalar::one(Mode::Exact);
        let k22 = (&one + &(&k12 * &k21)).checked_div(&k11)?;
        if k22.is_zero() {
            continue;
        }
        let twist = match mode {
            Mode::Exact => TwistMatrix::new(k11, k12, k21, k22),
            Mode::Float => TwistMatrix::new(
                k11.to_float(),
                k12.to_float(),
                k21.to_float(),
                k22.to_float(),
            ),
        };
        if let Ok(t) = twist {
            return Ok(t);
        }
    }
    Err(Error::InvalidArgument(
        "could not sample a unimodular twist".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_name_separated() {
        let mut a = rng_for_check(42, "alpha");
        let mut b = rng_for_check(42, "alpha");
        let mut c = rng_for_check(42, "beta");
        let xs: Vec<u64> = (0..4).map(|_| a.gen()).collect();
        let ys: Vec<u64> = (0..4).map(|_| b.gen()).collect();
        let zs: Vec<u64> = (0..4).map(|_| c.gen()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
        let mut d = rng_for_check(43, "alpha");
        let ws: Vec<u64> = (0..4).map(|_| d.gen()).collect();
        assert_ne!(xs, ws);
    }

    #[test]
    fn sampled_parameters_respect_separations() {
        let mut rng = rng_for_check(42, "sampling-test");
        let c = Scalar::rational(1, 1).unwrap();
        let avoid = vec![Scalar::rational(0, 1).unwrap(), Scalar::rational(1, 7).unwrap()];
        for _ in 0..20 {
            let set = sample_distinct_params(&mut rng, 4, &c, &avoid, Mode::Exact).unwrap();
            assert_eq!(set.len(), 4);
            for i in 0..4 {
                for x in &avoid {
                    assert!((set.get(i) - x).abs_f64() >= MIN_SEPARATION);
                }
                for j in 0..4 {
                    if i == j {
                        continue;
                    }
                    let diff = set.get(i) - set.get(j);
                    assert!(!diff.is_zero());
                    assert!(!(&diff - &c).is_zero());
                    assert!(!(&diff + &c).is_zero());
                }
            }
        }
    }

    #[test]
    fn float_mode_preserves_nominal_values() {
        let c = Scalar::rational(1, 1).unwrap();
        let mut rng1 = rng_for_check(7, "float-match");
        let mut rng2 = rng_for_check(7, "float-match");
        let exact = sample_distinct_params(&mut rng1, 3, &c, &[], Mode::Exact).unwrap();
        let float = sample_distinct_params(&mut rng2, 3, &c, &[], Mode::Float).unwrap();
        for k in 0..3 {
            assert!(float.get(k).distance_f64(&exact.get(k).to_float()) == 0.0);
        }
    }

    #[test]
    fn sampled_twists_are_unimodular() {
        let mut rng = rng_for_check(42, "twist-sampling");
        for _ in 0..50 {
            let t = sample_twist(&mut rng, Mode::Exact).unwrap();
            let det = &(t.k11() * t.k22()) - &(t.k12() * t.k21());
            assert!(det.is_one());
            assert!(!t.k12().is_zero());
            assert!(!t.k21().is_zero());
        }
    }
}
