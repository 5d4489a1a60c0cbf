//! Exercises the scalar layer: structure functions, the four
//! partial-fraction identities over subset partitions, and the binomial
//! partition lemma, all in exact rational arithmetic.
//!
//! Run with: `cargo run --example partition_identities`

use bethe_twist::kernel::{
    binomial_partition_sum, binomial_scalar, f_fn, g_fn, h_fn, partition_identity_sides,
    PartialFractionIdentity,
};
use bethe_twist::sampling::{rng_for_check, sample_distinct_params, sample_point};
use bethe_twist::{Mode, Result, Scalar};

fn main() -> Result<()> {
    let c = Scalar::rational(1, 1)?;
    let u = Scalar::rational(3, 5)?;
    let v = Scalar::rational(-1, 4)?;

    // The three structure functions that drive every identity in the crate:
    // g = c/(u-v), f = 1 + g, h = f/g.
    println!("g(u,v) = {}", g_fn(&u, &v, &c)?);
    println!("f(u,v) = {}", f_fn(&u, &v, &c)?);
    println!("h(u,v) = {}", h_fn(&u, &v, &c)?);

    let mut rng = rng_for_check(42, "partition-identities-example");

    // Four partial-fraction identities: each expands a product of structure
    // functions over one-element splittings of a parameter set. Exact
    // arithmetic means both sides must agree literally.
    for identity in [
        PartialFractionIdentity::LeftDirect,
        PartialFractionIdentity::RightDirect,
        PartialFractionIdentity::LeftPartition,
        PartialFractionIdentity::RightPartition,
    ] {
        let us = sample_distinct_params(&mut rng, 4, &c, &[], Mode::Exact)?;
        let z = sample_point(&mut rng, &c, us.as_slice(), Mode::Exact)?;
        let (lhs, rhs) = partition_identity_sides(identity, &z, &us, &c)?;
        println!("{identity:?}: lhs = rhs = {lhs}");
        assert!((&lhs - &rhs).is_zero());
    }

    // Binomial partition lemma: summing the double product of f's over all
    // partitions of an l-element set with |second block| = s collapses the
    // parameter dependence entirely, leaving the binomial coefficient.
    for l in 1..=6 {
        let xs = sample_distinct_params(&mut rng, l, &c, &[], Mode::Exact)?;
        let mut row = Vec::new();
        for s in 0..=l {
            let sum = binomial_partition_sum(&xs, s, &c)?;
            assert!((&sum - &binomial_scalar(l, s, Mode::Exact)).is_zero());
            row.push(format!("{sum}"));
        }
        println!("l = {l}: partition sums over random set = [{}]", row.join(", "));
    }
    println!("all scalar identities hold exactly");
    Ok(())
}
