//! Rational kernel: structure functions, parameter sets, partitions, and the
//! scalar identities built from them.
//!
//! The three structure functions of the rational R-matrix, with constant `c`,
//! are
//!
//! ```text
//! g(u,v) = c/(u-v)      f(u,v) = 1 + g(u,v) = (u-v+c)/(u-v)      h(u,v) = f(u,v)/g(u,v) = (u-v+c)/c
//! ```
//!
//! `g` and `f` have a pole at `u = v`; `h` does not (and `h(u,u) = 1`).
//! Products over sets extend these pointwise, with the convention that a
//! product over an empty index set equals one. Everything downstream — Bethe
//! equations, action formulas, twisted-product expansions — is phrased in
//! terms of such products over *partitions* of a parameter set into labelled
//! subsets, so this module also provides deterministic partition enumeration
//! and the two families of scalar lemmas used throughout: partial-fraction
//! expansions of `f`-products and the x-independent binomial partition sum.

use std::fmt;
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::{common_mode, Mode, Scalar, COLLISION_DELTA};

// ---------------------------------------------------------------------------
// Structure functions
// ---------------------------------------------------------------------------

/// The three scalar structure functions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StructureFn {
    G,
    F,
    H,
}

/// Fails when `u` and `v` collide: exact equality in exact mode, distance
/// below [`COLLISION_DELTA`] in float mode.
pub fn check_distinct(u: &Scalar, v: &Scalar, context: &str) -> Result<()> {
    match common_mode(u, v, context)? {
        Mode::Exact => {
            if u == v {
                return Err(Error::Pole(format!("{context}: {u} = {v}")));
            }
        }
        Mode::Float => {
            if u.distance_f64(v) < COLLISION_DELTA {
                return Err(Error::Pole(format!("{context}: {u} within {COLLISION_DELTA:e} of {v}")));
            }
        }
    }
    Ok(())
}

/// `g(u,v) = c/(u-v)`.
pub fn g_fn(u: &Scalar, v: &Scalar, c: &Scalar) -> Result<Scalar> {
    check_distinct(u, v, "g(u,v)")?;
    Ok(c / &(u - v))
}

/// `f(u,v) = (u-v+c)/(u-v)`.
pub fn f_fn(u: &Scalar, v: &Scalar, c: &Scalar) -> Result<Scalar> {
    check_distinct(u, v, "f(u,v)")?;
    let diff = u - v;
    Ok(&(&diff + c) / &diff)
}

/// `h(u,v) = (u-v+c)/c`; regular at `u = v`, requires `c != 0`.
pub fn h_fn(u: &Scalar, v: &Scalar, c: &Scalar) -> Result<Scalar> {
    common_mode(u, v, "h(u,v)")?;
    if c.is_zero() {
        return Err(Error::DivisionByZero("h(u,v) with c = 0".into()));
    }
    Ok(&(&(u - v) + c) / c)
}

pub fn eval_structure_fn(kind: StructureFn, u: &Scalar, v: &Scalar, c: &Scalar) -> Result<Scalar> {
    match kind {
        StructureFn::G => g_fn(u, v, c),
        StructureFn::F => f_fn(u, v, c),
        StructureFn::H => h_fn(u, v, c),
    }
}

// ---------------------------------------------------------------------------
// Parameter sets
// ---------------------------------------------------------------------------

/// An ordered set of same-mode spectral parameters.
///
/// Elements keep a stable index; "set" operations (complement, subset) are
/// index-based and preserve source order. Values are *not* required to be
/// pairwise distinct at construction — operations that would divide by a
/// difference check distinctness themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    mode: Mode,
    elems: Vec<Scalar>,
}

impl ParamSet {
    /// An empty set still needs a mode so that empty products know theirs.
    pub fn empty(mode: Mode) -> Self {
        ParamSet { mode, elems: Vec::new() }
    }

    pub fn new(elems: Vec<Scalar>, mode: Mode) -> Result<Self> {
        for (i, e) in elems.iter().enumerate() {
            if e.mode() != mode {
                return Err(Error::ModeMismatch(format!(
                    "parameter set element {i} ({e}) is {}, set is {mode}",
                    e.mode()
                )));
            }
        }
        Ok(ParamSet { mode, elems })
    }

    /// Non-empty constructor inferring the mode from the first element.
    pub fn from_scalars(elems: Vec<Scalar>) -> Result<Self> {
        let mode = elems
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty parameter set needs an explicit mode".into()))?
            .mode();
        ParamSet::new(elems, mode)
    }

    pub fn singleton(x: Scalar) -> Self {
        let mode = x.mode();
        ParamSet { mode, elems: vec![x] }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.elems[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.elems.iter()
    }

    pub fn as_slice(&self) -> &[Scalar] {
        &self.elems
    }

    /// The set with element `k` removed (order preserved).
    pub fn complement(&self, k: usize) -> ParamSet {
        let elems = self
            .elems
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, e)| e.clone())
            .collect();
        ParamSet { mode: self.mode, elems }
    }

    /// Subset picked out by ascending indices.
    pub fn subset(&self, indices: &[usize]) -> ParamSet {
        let elems = indices.iter().map(|&i| self.elems[i].clone()).collect();
        ParamSet { mode: self.mode, elems }
    }

    /// New set `{z} ∪ self` with `z` at index 0.
    pub fn with_prepended(&self, z: &Scalar) -> Result<ParamSet> {
        common_mode(z, &Scalar::zero(self.mode), "prepend to parameter set")?;
        let mut elems = Vec::with_capacity(self.len() + 1);
        elems.push(z.clone());
        elems.extend(self.elems.iter().cloned());
        Ok(ParamSet { mode: self.mode, elems })
    }

    pub fn to_float(&self) -> ParamSet {
        ParamSet {
            mode: Mode::Float,
            elems: self.elems.iter().map(Scalar::to_float).collect(),
        }
    }

    /// Errors when two elements collide (mode-appropriate test).
    pub fn check_pairwise_distinct(&self, context: &str) -> Result<()> {
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                check_distinct(&self.elems[i], &self.elems[j], context).map_err(|_| {
                    Error::CoincidentParameters(format!(
                        "{context}: elements {i} and {j} coincide ({})",
                        self.elems[i]
                    ))
                })?;
            }
        }
        Ok(())
    }

    /// True when `z` collides with some element.
    pub fn contains_collision(&self, z: &Scalar) -> bool {
        self.elems.iter().any(|e| check_distinct(e, z, "membership").is_err())
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

// ---------------------------------------------------------------------------
// Products over sets
// ---------------------------------------------------------------------------

/// Vacuum eigenvalue functions `a(u)`, `d(u)` supplied by a model.
pub trait VacuumFunctions {
    fn vacuum_a(&self, u: &Scalar) -> Result<Scalar>;
    fn vacuum_d(&self, u: &Scalar) -> Result<Scalar>;
}

/// Evaluation context: the constant `c`, plus (optionally) a vacuum profile
/// for `a`/`d` products.
pub struct EvalContext<'a> {
    c: Scalar,
    vacuum: Option<&'a dyn VacuumFunctions>,
}

impl<'a> EvalContext<'a> {
    pub fn new(c: &Scalar) -> Result<EvalContext<'static>> {
        if c.is_zero() || (c.mode() == Mode::Float && c.abs_f64() < COLLISION_DELTA) {
            return Err(Error::InvalidArgument(format!("constant c = {c} is (numerically) zero")));
        }
        Ok(EvalContext { c: c.clone(), vacuum: None })
    }

    pub fn with_vacuum(c: &Scalar, vacuum: &'a dyn VacuumFunctions) -> Result<EvalContext<'a>> {
        let base = EvalContext::new(c)?;
        Ok(EvalContext { c: base.c, vacuum: Some(vacuum) })
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }
}

/// Product kinds understood by [`prod_over`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ProductKind {
    /// `∏_{x∈X}∏_{y∈Y} f(x,y)`
    F,
    /// `∏∏ g(x,y)`
    G,
    /// `∏∏ h(x,y)`
    H,
    /// `∏_{x∈X} a(x)` (needs a vacuum profile; `Y` must be empty)
    A,
    /// `∏_{x∈X} d(x)`
    D,
}

/// Double or single product over parameter sets; empty products are one (in
/// the ambient mode).
pub fn prod_over(kind: ProductKind, xs: &ParamSet, ys: &ParamSet, ctx: &EvalContext) -> Result<Scalar> {
    match kind {
        ProductKind::F | ProductKind::G | ProductKind::H => {
            let sf = match kind {
                ProductKind::F => StructureFn::F,
                ProductKind::G => StructureFn::G,
                _ => StructureFn::H,
            };
            let mut out = Scalar::one(xs.mode());
            for x in xs.iter() {
                for y in ys.iter() {
                    out = &out * &eval_structure_fn(sf, x, y, &ctx.c)?;
                }
            }
            Ok(out)
        }
        ProductKind::A | ProductKind::D => {
            if !ys.is_empty() {
                return Err(Error::InvalidArgument(
                    "a/d products take a single set; second set must be empty".into(),
                ));
            }
            let vac = ctx
                .vacuum
                .ok_or_else(|| Error::InvalidArgument("a/d product needs a vacuum profile in the context".into()))?;
            let mut out = Scalar::one(xs.mode());
            for x in xs.iter() {
                let factor = match kind {
                    ProductKind::A => vac.vacuum_a(x)?,
                    _ => vac.vacuum_d(x)?,
                };
                out = &out * &factor;
            }
            Ok(out)
        }
    }
}

/// `∏_{x∈X}∏_{y∈Y} f(x,y)`.
pub fn f_between(xs: &ParamSet, ys: &ParamSet, c: &Scalar) -> Result<Scalar> {
    let mut out = Scalar::one(xs.mode());
    for x in xs.iter() {
        for y in ys.iter() {
            out = &out * &f_fn(x, y, c)?;
        }
    }
    Ok(out)
}

/// `∏_{y∈Y} f(z,y)`.
pub fn f_from_point(z: &Scalar, ys: &ParamSet, c: &Scalar) -> Result<Scalar> {
    let mut out = Scalar::one(z.mode());
    for y in ys.iter() {
        out = &out * &f_fn(z, y, c)?;
    }
    Ok(out)
}

/// `∏_{x∈X} f(x,z)`.
pub fn f_to_point(xs: &ParamSet, z: &Scalar, c: &Scalar) -> Result<Scalar> {
    let mut out = Scalar::one(z.mode());
    for x in xs.iter() {
        out = &out * &f_fn(x, z, c)?;
    }
    Ok(out)
}

/// `∏_{y∈Y} g(z,y)`.
pub fn g_from_point(z: &Scalar, ys: &ParamSet, c: &Scalar) -> Result<Scalar> {
    let mut out = Scalar::one(z.mode());
    for y in ys.iter() {
        out = &out * &g_fn(z, y, c)?;
    }
    Ok(out)
}

/// `∏_{x∈X} g(x,z)`.
pub fn g_to_point(xs: &ParamSet, z: &Scalar, c: &Scalar) -> Result<Scalar> {
    let mut out = Scalar::one(z.mode());
    for x in xs.iter() {
        out = &out * &g_fn(x, z, c)?;
    }
    Ok(out)
}

/// `∏_{x∈X} a(x)` over a vacuum profile.
pub fn a_over(vac: &dyn VacuumFunctions, xs: &ParamSet) -> Result<Scalar> {
    let mut out = Scalar::one(xs.mode());
    for x in xs.iter() {
        out = &out * &vac.vacuum_a(x)?;
    }
    Ok(out)
}

/// `∏_{x∈X} d(x)` over a vacuum profile.
pub fn d_over(vac: &dyn VacuumFunctions, xs: &ParamSet) -> Result<Scalar> {
    let mut out = Scalar::one(xs.mode());
    for x in xs.iter() {
        out = &out * &vac.vacuum_d(x)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

/// Label names for partition subsets, by label index.
pub fn label_name(index: usize) -> &'static str {
    const NAMES: [&str; 8] = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII"];
    NAMES.get(index).unwrap_or(&"?")
}

/// Cardinality constraint for one label of a partition enumeration.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Cardinality {
    Free,
    Exactly(usize),
}

/// An assignment of every element of a source set to one of `k` labelled
/// subsets (subsets may be empty).
#[derive(Clone, Debug)]
pub struct Partition {
    source: Rc<ParamSet>,
    labels: Vec<u8>,
    n_labels: usize,
}

impl Partition {
    pub fn source(&self) -> &ParamSet {
        &self.source
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn label_of(&self, element: usize) -> usize {
        self.labels[element] as usize
    }

    /// Ascending source indices carrying the given label.
    pub fn indices(&self, label: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l as usize == label)
            .map(|(i, _)| i)
            .collect()
    }

    /// The labelled subset, elements in source order.
    pub fn block(&self, label: usize) -> ParamSet {
        self.source.subset(&self.indices(label))
    }

    pub fn block_size(&self, label: usize) -> usize {
        self.labels.iter().filter(|&&l| l as usize == label).count()
    }

    /// Per-element label string, e.g. `"I,III,II"`.
    pub fn label_string(&self) -> String {
        self.labels
            .iter()
            .map(|&l| label_name(l as usize))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Enumerates all assignments of the source elements to `constraints.len()`
/// labels satisfying the per-label cardinality constraints.
///
/// Deterministic order: lexicographic in the per-element label word, element
/// 0 most significant, labels ascending. Unsatisfiable constraints yield an
/// empty vector, not an error.
pub fn enumerate_partitions(source: &ParamSet, constraints: &[Cardinality]) -> Vec<Partition> {
    let n = source.len();
    let k = constraints.len();
    if k == 0 {
        return Vec::new();
    }
    let fixed_total: usize = constraints
        .iter()
        .map(|c| match c {
            Cardinality::Exactly(m) => *m,
            Cardinality::Free => 0,
        })
        .sum();
    let any_free = constraints.iter().any(|c| matches!(c, Cardinality::Free));
    if fixed_total > n || (!any_free && fixed_total != n) {
        return Vec::new();
    }

    let source = Rc::new(source.clone());
    let mut out = Vec::new();
    let mut labels = vec![0u8; n];
    let mut counts = vec![0usize; k];

    fn recurse(
        element: usize,
        n: usize,
        constraints: &[Cardinality],
        labels: &mut Vec<u8>,
        counts: &mut Vec<usize>,
        source: &Rc<ParamSet>,
        out: &mut Vec<Partition>,
    ) {
        if element == n {
            let ok = constraints.iter().enumerate().all(|(l, c)| match c {
                Cardinality::Exactly(m) => counts[l] == *m,
                Cardinality::Free => true,
            });
            if ok {
                out.push(Partition {
                    source: Rc::clone(source),
                    labels: labels.clone(),
                    n_labels: constraints.len(),
                });
            }
            return;
        }
        // Deficit pruning: fixed labels still need this many elements.
        let deficit: usize = constraints
            .iter()
            .enumerate()
            .map(|(l, c)| match c {
                Cardinality::Exactly(m) => m.saturating_sub(counts[l]),
                Cardinality::Free => 0,
            })
            .sum();
        let remaining = n - element;
        if deficit > remaining {
            return;
        }
        for l in 0..constraints.len() {
            if let Cardinality::Exactly(m) = constraints[l] {
                if counts[l] >= m {
                    continue;
                }
            }
            labels[element] = l as u8;
            counts[l] += 1;
            recurse(element + 1, n, constraints, labels, counts, source, out);
            counts[l] -= 1;
        }
    }

    recurse(0, n, constraints, &mut labels, &mut counts, &source, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Partial-fraction identities
// ---------------------------------------------------------------------------

/// The four partial-fraction expansions of `f`-products minus one.
///
/// With `ū = {u_1,…,u_n}`, `ū_k = ū \ {u_k}`, and a point `z` distinct from
/// all `u_k`:
///
/// * `LeftDirect`:      `f(ū,z) - 1 = Σ_k g(u_k,z) f(ū_k,u_k)`
/// * `RightDirect`:     `f(z,ū) - 1 = Σ_k g(z,u_k) f(u_k,ū_k)`
/// * `RightPartition`:  the right expansion summed over singleton partitions
///   `ū ⇒ {ū_i, ū_rest}`, `#ū_i = 1`: `Σ f(ū_i,ū_rest) g(z,ū_i)`
/// * `LeftPartition`:   the left expansion over singleton partitions:
///   `Σ f(ū_rest,ū_i) g(ū_i,z)`
///
/// The direct and partition variants are mathematically identical sums; they
/// exercise different code paths (complement loops vs. partition
/// enumeration) and are checked separately.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PartialFractionIdentity {
    LeftDirect,
    RightDirect,
    RightPartition,
    LeftPartition,
}

/// Evaluates both sides of the chosen identity. The caller compares them
/// (exactly, or against a tolerance).
pub fn partition_identity_sides(
    identity: PartialFractionIdentity,
    z: &Scalar,
    us: &ParamSet,
    c: &Scalar,
) -> Result<(Scalar, Scalar)> {
    us.check_pairwise_distinct("partial-fraction identity")?;
    for (k, u) in us.iter().enumerate() {
        check_distinct(z, u, &format!("partial-fraction identity: z vs u_{k}"))?;
    }
    let one = Scalar::one(us.mode());

    let lhs = match identity {
        PartialFractionIdentity::LeftDirect | PartialFractionIdentity::LeftPartition => {
            &f_to_point(us, z, c)? - &one
        }
        _ => &f_from_point(z, us, c)? - &one,
    };

    let mut rhs = Scalar::zero(us.mode());
    match identity {
        PartialFractionIdentity::LeftDirect => {
            for k in 0..us.len() {
                let rest = us.complement(k);
                let term = &g_fn(us.get(k), z, c)? * &f_between(&rest, &ParamSet::singleton(us.get(k).clone()), c)?;
                rhs = &rhs + &term;
            }
        }
        PartialFractionIdentity::RightDirect => {
            for k in 0..us.len() {
                let rest = us.complement(k);
                let term = &g_fn(z, us.get(k), c)? * &f_from_point(us.get(k), &rest, c)?;
                rhs = &rhs + &term;
            }
        }
        PartialFractionIdentity::RightPartition => {
            for part in enumerate_partitions(us, &[Cardinality::Exactly(1), Cardinality::Free]) {
                let single = part.block(0);
                let rest = part.block(1);
                let term = &f_between(&single, &rest, c)? * &g_from_point(z, &single, c)?;
                rhs = &rhs + &term;
            }
        }
        PartialFractionIdentity::LeftPartition => {
            for part in enumerate_partitions(us, &[Cardinality::Exactly(1), Cardinality::Free]) {
                let single = part.block(0);
                let rest = part.block(1);
                let term = &f_between(&rest, &single, c)? * &g_to_point(&single, z, c)?;
                rhs = &rhs + &term;
            }
        }
    }

    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// Binomial partition lemma
// ---------------------------------------------------------------------------

/// `C(l, s)` as a scalar in the requested mode.
pub fn binomial_scalar(l: usize, s: usize, mode: Mode) -> Scalar {
    if s > l {
        return Scalar::zero(mode);
    }
    let b = binomial(BigInt::from(l), BigInt::from(s));
    match mode {
        Mode::Exact => Scalar::Exact(num_rational::BigRational::new(b, BigInt::one())),
        Mode::Float => {
            let mut v = 1f64;
            // small l only; recompute in f64 to avoid bigint->f64 edge cases
            for i in 0..s {
                v = v * ((l - i) as f64) / ((i + 1) as f64);
            }
            Scalar::real(v)
        }
    }
}

/// `Σ_{x̄ ⇒ {x̄_I, x̄_II}, #x̄_II = s} f(x̄_II, x̄_I)`.
///
/// For pairwise distinct `x̄` of size `l` this equals the binomial
/// coefficient `C(l, s)` independently of the values of `x̄`: the apparent
/// poles between partitions that exchange two nearby points cancel pairwise.
pub fn binomial_partition_sum(xs: &ParamSet, s: usize, c: &Scalar) -> Result<Scalar> {
    xs.check_pairwise_distinct("binomial partition sum")?;
    if s > xs.len() {
        return Err(Error::InvalidArgument(format!(
            "subset size {s} exceeds set size {}",
            xs.len()
        )));
    }
    let mut out = Scalar::zero(xs.mode());
    for part in enumerate_partitions(xs, &[Cardinality::Free, Cardinality::Exactly(s)]) {
        let first = part.block(0);
        let second = part.block(1);
        out = &out + &f_between(&second, &first, c)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::rational(p, d).unwrap()
    }

    fn set(vals: &[(i64, i64)]) -> ParamSet {
        ParamSet::from_scalars(vals.iter().map(|&(p, d)| q(p, d)).collect()).unwrap()
    }

    fn one_c() -> Scalar {
        Scalar::from_integer(1)
    }

    #[test]
    fn structure_fn_values() {
        let c = one_c();
        // g(3,1) = 1/(3-1) = 1/2
        assert_eq!(g_fn(&q(3, 1), &q(1, 1), &c).unwrap(), q(1, 2));
        // f(0,1) = (0-1+1)/(0-1) = 0
        assert!(f_fn(&q(0, 1), &q(1, 1), &c).unwrap().is_zero());
        // h is regular on the diagonal and equals one there
        assert!(h_fn(&q(5, 1), &q(5, 1), &c).unwrap().is_one());
        assert!(h_fn(&Scalar::real(2.5), &Scalar::real(2.5), &Scalar::real(1.0)).unwrap().is_one());
    }

    #[test]
    fn f_equals_one_plus_g() {
        let c = q(3, 7);
        let u = q(5, 2);
        let v = q(-1, 3);
        let lhs = f_fn(&u, &v, &c).unwrap();
        let rhs = &Scalar::from_integer(1) + &g_fn(&u, &v, &c).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn poles_detected_per_mode() {
        let c = one_c();
        assert!(matches!(g_fn(&q(2, 1), &q(2, 1), &c), Err(Error::Pole(_))));
        let a = Scalar::real(1.0);
        let b = Scalar::real(1.0 + 1e-9);
        assert!(matches!(f_fn(&a, &b, &Scalar::real(1.0)), Err(Error::Pole(_))));
        // 1e-4 apart is fine
        let b = Scalar::real(1.0 + 1e-4);
        assert!(f_fn(&a, &b, &Scalar::real(1.0)).is_ok());
    }

    #[test]
    fn product_over_sets() {
        let c = one_c();
        let xs = set(&[(5, 1)]);
        let ys = set(&[(1, 1), (2, 1)]);
        // f(5,1) f(5,2) = 5/4 * 4/3 = 5/3
        assert_eq!(f_between(&xs, &ys, &c).unwrap(), q(5, 3));
        // empty products are one
        let empty = ParamSet::empty(Mode::Exact);
        assert!(f_between(&empty, &ys, &c).unwrap().is_one());
        assert!(f_between(&xs, &empty, &c).unwrap().is_one());
        // a zero factor zeroes the product: f(1,2) = 0 at c = 1
        let xs = set(&[(1, 1)]);
        let ys = set(&[(2, 1)]);
        assert!(f_between(&xs, &ys, &c).unwrap().is_zero());
    }

    struct ToyVacuum;
    impl VacuumFunctions for ToyVacuum {
        fn vacuum_a(&self, u: &Scalar) -> Result<Scalar> {
            Ok(u * u)
        }
        fn vacuum_d(&self, _u: &Scalar) -> Result<Scalar> {
            Ok(Scalar::from_integer(1))
        }
    }

    #[test]
    fn prod_over_dispatch() {
        let c = one_c();
        let vac = ToyVacuum;
        let ctx = EvalContext::with_vacuum(&c, &vac).unwrap();
        let xs = set(&[(2, 1), (3, 1)]);
        let empty = ParamSet::empty(Mode::Exact);
        assert_eq!(prod_over(ProductKind::A, &xs, &empty, &ctx).unwrap(), q(36, 1));
        assert!(prod_over(ProductKind::D, &xs, &empty, &ctx).unwrap().is_one());
        assert!(prod_over(ProductKind::A, &xs, &xs, &ctx).is_err());
        let ys = set(&[(1, 1)]);
        // g(2,1) g(3,1) = 1 * 1/2
        assert_eq!(prod_over(ProductKind::G, &xs, &ys, &ctx).unwrap(), q(1, 2));
        // a/d products without a vacuum profile in context must fail
        let bare = EvalContext::new(&c).unwrap();
        assert!(prod_over(ProductKind::A, &xs, &empty, &bare).is_err());
    }

    #[test]
    fn partition_enumeration_counts_and_order() {
        let s2 = set(&[(1, 1), (2, 1)]);
        let free3 = [Cardinality::Free, Cardinality::Free, Cardinality::Free];
        let parts = enumerate_partitions(&s2, &free3);
        assert_eq!(parts.len(), 9);
        let words: Vec<String> = parts.iter().map(|p| p.label_string()).collect();
        assert_eq!(words[0], "I,I");
        assert_eq!(words[1], "I,II");
        assert_eq!(words[2], "I,III");
        assert_eq!(words[3], "II,I");
        assert_eq!(words[8], "III,III");

        let parts = enumerate_partitions(&s2, &[Cardinality::Exactly(1), Cardinality::Free]);
        assert_eq!(parts.len(), 2);

        let s3 = set(&[(1, 1), (2, 1), (3, 1)]);
        let parts = enumerate_partitions(
            &s3,
            &[Cardinality::Exactly(1), Cardinality::Exactly(1), Cardinality::Free],
        );
        assert_eq!(parts.len(), 6);

        // unsatisfiable constraints: empty, not an error
        assert!(enumerate_partitions(&s2, &[Cardinality::Exactly(3), Cardinality::Free]).is_empty());
        assert!(enumerate_partitions(&s2, &[Cardinality::Exactly(1)]).is_empty());
    }

    #[test]
    fn partition_blocks_preserve_source_order() {
        let s3 = set(&[(10, 1), (20, 1), (30, 1)]);
        let parts = enumerate_partitions(&s3, &[Cardinality::Free, Cardinality::Free]);
        // find labels [I, II, I]
        let p = parts.iter().find(|p| p.label_string() == "I,II,I").unwrap();
        assert_eq!(p.indices(0), vec![0, 2]);
        let block = p.block(0);
        assert_eq!(block.get(0), &q(10, 1));
        assert_eq!(block.get(1), &q(30, 1));
        assert_eq!(p.block_size(1), 1);
    }

    #[test]
    fn partial_fraction_frozen_instance() {
        // U = {1,2}, z = 0, c = 1: f(1,0) f(2,0) - 1 = 2*3/2 - 1 = 2,
        // and g(1,0) f(2,1) + g(2,0) f(1,2) = 1*2 + (1/2)*0 = 2.
        let us = set(&[(1, 1), (2, 1)]);
        let z = q(0, 1);
        let c = one_c();
        let (lhs, rhs) = partition_identity_sides(PartialFractionIdentity::LeftDirect, &z, &us, &c).unwrap();
        assert_eq!(lhs, q(2, 1));
        assert_eq!(rhs, q(2, 1));
        for ident in [
            PartialFractionIdentity::RightDirect,
            PartialFractionIdentity::RightPartition,
            PartialFractionIdentity::LeftPartition,
        ] {
            let (lhs, rhs) = partition_identity_sides(ident, &z, &us, &c).unwrap();
            assert_eq!(lhs, rhs, "{ident:?}");
        }
    }

    #[test]
    fn partial_fraction_empty_set() {
        let us = ParamSet::empty(Mode::Exact);
        let (lhs, rhs) =
            partition_identity_sides(PartialFractionIdentity::LeftDirect, &q(3, 1), &us, &one_c()).unwrap();
        assert!(lhs.is_zero());
        assert!(rhs.is_zero());
    }

    #[test]
    fn partial_fraction_rejects_collisions() {
        let us = set(&[(1, 1), (1, 1)]);
        assert!(partition_identity_sides(PartialFractionIdentity::LeftDirect, &q(0, 1), &us, &one_c()).is_err());
        let us = set(&[(1, 1), (2, 1)]);
        assert!(partition_identity_sides(PartialFractionIdentity::LeftDirect, &q(2, 1), &us, &one_c()).is_err());
    }

    #[test]
    fn binomial_sum_frozen_instances() {
        let c = one_c();
        // X = {0,1}, s=1: f(0,1) + f(1,0) = 0 + 2 = 2 = C(2,1)
        let xs = set(&[(0, 1), (1, 1)]);
        assert_eq!(binomial_partition_sum(&xs, 1, &c).unwrap(), q(2, 1));
        assert_eq!(binomial_partition_sum(&xs, 0, &c).unwrap(), q(1, 1));
        // X = {1/3, 2, -5/2}, s = 2 -> C(3,2) = 3
        let xs = set(&[(1, 3), (2, 1), (-5, 2)]);
        assert_eq!(binomial_partition_sum(&xs, 2, &c).unwrap(), q(3, 1));
        // value-independence: another set, same l, s
        let xs = set(&[(7, 2), (-1, 5), (4, 1)]);
        assert_eq!(binomial_partition_sum(&xs, 2, &c).unwrap(), q(3, 1));
        // coincident values rejected
        let xs = set(&[(1, 2), (1, 2)]);
        assert!(binomial_partition_sum(&xs, 1, &c).is_err());
    }

    #[test]
    fn binomial_sum_near_collision_is_stable() {
        // X = {x, x+eps} in float mode: the individually huge f-factors cancel.
        let c = Scalar::real(1.0);
        for eps in [1e-2, 1e-3, 1e-4] {
            let xs = ParamSet::new(vec![Scalar::real(0.3), Scalar::real(0.3 + eps)], Mode::Float).unwrap();
            for s in 0..=2usize {
                let sum = binomial_partition_sum(&xs, s, &c).unwrap();
                let expect = binomial_scalar(2, s, Mode::Float);
                assert!(
                    sum.distance_f64(&expect) < 1e-6,
                    "eps={eps} s={s} sum={sum} expect={expect}"
                );
            }
        }
    }

    #[test]
    fn binomial_scalar_values() {
        assert_eq!(binomial_scalar(6, 3, Mode::Exact), q(20, 1));
        assert_eq!(binomial_scalar(4, 5, Mode::Exact), q(0, 1));
        assert!(binomial_scalar(5, 2, Mode::Float).distance_f64(&Scalar::real(10.0)) < 1e-12);
    }

    // ---- property tests -----------------------------------------------

    fn arb_rational() -> impl Strategy<Value = Scalar> {
        (-20i64..=20, 1i64..=10).prop_map(|(p, d)| q(p, d))
    }

    proptest! {
        #[test]
        fn prop_f_is_one_plus_g(u in arb_rational(), v in arb_rational(), c in arb_rational()) {
            prop_assume!(u != v);
            prop_assume!(!c.is_zero());
            let f = f_fn(&u, &v, &c).unwrap();
            let g = g_fn(&u, &v, &c).unwrap();
            prop_assert_eq!(f, &Scalar::from_integer(1) + &g);
        }

        #[test]
        fn prop_g_times_h_is_f(u in arb_rational(), v in arb_rational(), c in arb_rational()) {
            prop_assume!(u != v);
            prop_assume!(!c.is_zero());
            let f = f_fn(&u, &v, &c).unwrap();
            let g = g_fn(&u, &v, &c).unwrap();
            let h = h_fn(&u, &v, &c).unwrap();
            prop_assert_eq!(f, &g * &h);
        }

        #[test]
        fn prop_partition_counts(n in 0usize..=5, k in 1usize..=3) {
            let elems: Vec<Scalar> = (0..n as i64).map(Scalar::from_integer).collect();
            let source = ParamSet::new(elems, Mode::Exact).unwrap();
            let free = vec![Cardinality::Free; k];
            prop_assert_eq!(enumerate_partitions(&source, &free).len(), k.pow(n as u32));
        }

        #[test]
        fn prop_partition_counts_with_fixed_block(n in 0usize..=5, k in 2usize..=3, s in 0usize..=5) {
            prop_assume!(s <= n);
            let elems: Vec<Scalar> = (0..n as i64).map(Scalar::from_integer).collect();
            let source = ParamSet::new(elems, Mode::Exact).unwrap();
            let mut constraints = vec![Cardinality::Free; k];
            constraints[0] = Cardinality::Exactly(s);
            // choose the fixed block, distribute the rest freely
            let expect = binomial(BigInt::from(n), BigInt::from(s))
                * BigInt::from((k - 1).pow((n - s) as u32));
            prop_assert_eq!(BigInt::from(enumerate_partitions(&source, &constraints).len()), expect);
        }
    }
}
