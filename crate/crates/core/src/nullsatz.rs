//! The `k = 2` polynomial method.
//!
//! `∏_{i<j} (x_i - x_j)` expands into monomials `x^a` with `a` a permutation
//! of `{0, ..., s-1}`, each with coefficient `±1`. Squaring convolves two such
//! expansions. A family `F ⊆ [n]^2` with `|F| > n d` supports no nonzero
//! polynomial of degree `<= d` vanishing on it, which is what turns a
//! nonzero coefficient at `e = a + b` into a rainbow matching.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::SearchBudget;
use crate::error::{Error, Result};
use crate::family::{Family, Universe};
use crate::linalg::rank_rational;
use crate::sequence::{is_satisfying, SequenceSpec, Verdict, VerifyOptions};

fn is_permutation(a: &[u32]) -> bool {
    let mut seen = vec![false; a.len()];
    a.iter().all(|&v| (v as usize) < a.len() && !std::mem::replace(&mut seen[v as usize], true))
}

fn parity_sign(p: &[u32]) -> i8 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1i8;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i] as usize;
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Coefficient of `x_1^a_1 ... x_s^a_s` in `∏_{i<j} (x_i - x_j)`, where
/// `s = a.len()`: the sign of `i ↦ s-1-a_i` when `a` is a permutation of
/// `{0, ..., s-1}`, otherwise 0.
pub fn vandermonde_coeff(a: &[u32]) -> i8 {
    if !is_permutation(a) {
        return 0;
    }
    let s = a.len() as u32;
    let reversed: Vec<u32> = a.iter().map(|&v| s - 1 - v).collect();
    parity_sign(&reversed)
}

/// Coefficient of `x^e` in `∏_{i<j} (x_i - x_j)^2`, with the first
/// permutation pair `(a, b)`, `a + b = e`, in lexicographic order of `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquaredCoeff {
    pub value: BigInt,
    pub witness: Option<PermPair>,
}

type PermPair = (Vec<u32>, Vec<u32>);

/// Sums `sign(a) sign(e - a)` over permutations `a` for which `e - a` is a
/// permutation too.
pub fn squared_coeff(e: &[u32]) -> SquaredCoeff {
    let s = e.len();
    let zero = SquaredCoeff { value: BigInt::zero(), witness: None };
    let total: u64 = e.iter().map(|&v| v as u64).sum();
    if s == 0 || total != (s * s.saturating_sub(1)) as u64 || e.iter().any(|&v| v as usize > 2 * (s - 1)) {
        return zero;
    }

    struct Walk<'a> {
        e: &'a [u32],
        a: Vec<u32>,
        used_a: Vec<bool>,
        used_b: Vec<bool>,
        sum: i128,
        witness: Option<PermPair>,
    }

    impl Walk<'_> {
        fn go(&mut self) {
            let i = self.a.len();
            if i == self.e.len() {
                let b: Vec<u32> = self.e.iter().zip(&self.a).map(|(&e, &a)| e - a).collect();
                self.sum += (vandermonde_coeff(&self.a) * vandermonde_coeff(&b)) as i128;
                if self.witness.is_none() {
                    self.witness = Some((self.a.clone(), b));
                }
                return;
            }
            let s = self.e.len() as u32;
            for v in 0..s.min(self.e[i] + 1) {
                let w = self.e[i] - v;
                if self.used_a[v as usize] || w >= s || self.used_b[w as usize] {
                    continue;
                }
                self.used_a[v as usize] = true;
                self.used_b[w as usize] = true;
                self.a.push(v);
                self.go();
                self.a.pop();
                self.used_a[v as usize] = false;
                self.used_b[w as usize] = false;
            }
        }
    }

    let first: Vec<(i128, Option<PermPair>)> = (0..s as u32)
        .into_par_iter()
        .map(|v0| {
            let mut walk = Walk {
                e,
                a: Vec::with_capacity(s),
                used_a: vec![false; s],
                used_b: vec![false; s],
                sum: 0,
                witness: None,
            };
            let w0 = e[0].wrapping_sub(v0);
            if v0 <= e[0] && (w0 as usize) < s {
                walk.used_a[v0 as usize] = true;
                walk.used_b[w0 as usize] = true;
                walk.a.push(v0);
                walk.go();
            }
            (walk.sum, walk.witness)
        })
        .collect();
    let value: i128 = first.iter().map(|(v, _)| v).sum();
    let witness = first.into_iter().find_map(|(_, w)| w);
    SquaredCoeff { value: BigInt::from(value), witness }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `squared_coeff(e) mod p`, in `[0, p)`.
pub fn coeff_mod_p(e: &[u32], p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("modulus {p} is not prime")));
    }
    let m = BigInt::from(p);
    let r = ((squared_coeff(e).value % &m) + &m) % &m;
    Ok(r.try_into().expect("residue is below p"))
}

/// Two permutations of `{0, ..., s-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermutationPair {
    a: Vec<u32>,
    b: Vec<u32>,
}

impl PermutationPair {
    pub fn new(a: Vec<u32>, b: Vec<u32>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::invalid(format!("permutations of lengths {} and {}", a.len(), b.len())));
        }
        for p in [&a, &b] {
            if !is_permutation(p) {
                return Err(Error::invalid(format!("{p:?} is not a permutation of 0..{}", p.len())));
            }
        }
        Ok(PermutationPair { a, b })
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }

    pub fn s(&self) -> usize {
        self.a.len()
    }

    pub fn sum(&self) -> Vec<u32> {
        self.a.iter().zip(&self.b).map(|(x, y)| x + y).collect()
    }
}

/// Where a sequence `f_i = n (a_i + b_i)` comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub e: Vec<u32>,
    /// Coefficient of `x^a y^b` in `∏_{i<j} (x_i - x_j)(y_i - y_j)`; always `±1`.
    pub product_coeff: i8,
    /// Coefficient of `x^e` in `∏_{i<j} (x_i - x_j)^2`; may vanish.
    #[serde(serialize_with = "crate::nullsatz::as_decimal")]
    pub squared_coeff: BigInt,
}

pub(crate) fn as_decimal<S: serde::Serializer>(v: &BigInt, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&v.to_string())
}

pub fn sequence_from_perms(n: u32, pp: &PermutationPair) -> Result<(SequenceSpec, Provenance)> {
    let universe = Universe::new(n, 2)?;
    let e = pp.sum();
    let f = e.iter().map(|&v| n as u64 * v as u64).collect();
    let product_coeff = vandermonde_coeff(pp.a()) * vandermonde_coeff(pp.b());
    assert!(product_coeff.abs() == 1, "permutation exponents have unit Vandermonde coefficients");
    let provenance =
        Provenance { a: pp.a().to_vec(), b: pp.b().to_vec(), squared_coeff: squared_coeff(&e).value, e, product_coeff };
    Ok((SequenceSpec::new(universe, f)?, provenance))
}

/// A finite subset of `Q^2`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointSet2D {
    points: BTreeSet<(BigRational, BigRational)>,
}

impl PointSet2D {
    pub fn new() -> Self {
        PointSet2D::default()
    }

    pub fn insert(&mut self, x: BigRational, y: BigRational) -> bool {
        self.points.insert((x, y))
    }

    pub fn from_integers(points: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut out = PointSet2D::new();
        for (x, y) in points {
            out.insert(BigRational::from_integer(x.into()), BigRational::from_integer(y.into()));
        }
        out
    }

    /// Members of a `k = 2` family as integer points.
    pub fn from_family(f: &Family) -> Result<Self> {
        if f.universe().k() != 2 {
            return Err(Error::invalid(format!("point sets need k = 2, got k = {}", f.universe().k())));
        }
        Ok(PointSet2D::from_integers(f.iter().map(|t| (t.get(1) as i64, t.get(2) as i64))))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(BigRational, BigRational)> {
        self.points.iter()
    }
}

/// Monomials `x^i y^j` with `i + j <= d`, graded then lexicographic.
fn monomials(d: u32) -> Vec<(u32, u32)> {
    (0..=d).flat_map(|t| (0..=t).rev().map(move |i| (i, t - i))).collect()
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// Least `d >= 1` such that a nonzero polynomial of degree `<= d` vanishes
/// on every point: the first `d` at which the evaluation matrix of all
/// monomials of degree `<= d` has rank below the number of monomials.
pub fn deg_set(points: &PointSet2D) -> Result<u32> {
    if points.is_empty() {
        return Err(Error::invalid("the degree of the empty point set is undefined"));
    }
    let mut d = 1;
    loop {
        let mons = monomials(d);
        let matrix: Vec<Vec<BigRational>> =
            points.iter().map(|(x, y)| mons.iter().map(|&(i, j)| pow(x, i) * pow(y, j)).collect()).collect();
        if rank_rational(&matrix) < mons.len() {
            return Ok(d);
        }
        d += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SzReport {
    pub size: usize,
    pub n: u32,
    /// `None` for the empty family.
    pub degree: Option<u32>,
    /// `n * degree`.
    pub bound: Option<u64>,
    pub holds: bool,
}

/// `|F| <= n deg F`: a polynomial of degree `d` vanishes on at most
/// `d n` points of `[n]^2`.
pub fn sz_check(f: &Family) -> Result<SzReport> {
    let points = PointSet2D::from_family(f)?;
    let n = f.universe().n();
    if points.is_empty() {
        return Ok(SzReport { size: 0, n, degree: None, bound: None, holds: true });
    }
    let degree = deg_set(&points)?;
    let bound = n as u64 * degree as u64;
    Ok(SzReport { size: f.len(), n, degree: Some(degree), bound: Some(bound), holds: f.len() as u64 <= bound })
}

/// Exhaustively checks that `f_i = n (a_i + b_i)` is satisfying.
pub fn verify_polynomial_sequence(
    n: u32,
    pp: &PermutationPair,
    budget: &SearchBudget,
    opts: &VerifyOptions,
) -> Result<(Verdict, Provenance)> {
    let (spec, provenance) = sequence_from_perms(n, pp)?;
    Ok((is_satisfying(&spec, budget, opts)?, provenance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vandermonde_spot_values() {
        assert_eq!(vandermonde_coeff(&[1, 0]), 1);
        assert_eq!(vandermonde_coeff(&[0, 1]), -1);
        assert_eq!(vandermonde_coeff(&[1, 1, 1]), 0);
        assert_eq!(vandermonde_coeff(&[2, 1, 0]), 1);
    }

    #[test]
    fn squared_spot_values() {
        assert_eq!(squared_coeff(&[1, 1]).value, BigInt::from(-2));
        assert_eq!(squared_coeff(&[2, 0]).value, BigInt::from(1));
        assert_eq!(squared_coeff(&[3, 0]).value, BigInt::zero());
        assert_eq!(squared_coeff(&[1, 1]).witness, Some((vec![0, 1], vec![1, 0])));
    }

    #[test]
    fn modular_reduction() {
        assert_eq!(coeff_mod_p(&[1, 1], 2).unwrap(), 0);
        assert_eq!(coeff_mod_p(&[1, 1], 5).unwrap(), 3);
        assert!(coeff_mod_p(&[1, 1], 4).is_err());
        assert!(coeff_mod_p(&[1, 1], 1).is_err());
    }

    #[test]
    fn sequences_from_permutations() {
        let seq = |n, a: &[u32], b: &[u32]| {
            sequence_from_perms(n, &PermutationPair::new(a.to_vec(), b.to_vec()).unwrap())
                .unwrap()
                .0
                .thresholds()
                .to_vec()
        };
        assert_eq!(seq(3, &[0, 1], &[1, 0]), vec![3, 3]);
        assert_eq!(seq(3, &[0, 1], &[0, 1]), vec![0, 6]);
        assert_eq!(seq(2, &[0, 1, 2], &[2, 1, 0]), vec![4, 4, 4]);
        assert!(PermutationPair::new(vec![0, 0], vec![0, 1]).is_err());
    }

    #[test]
    fn degrees() {
        assert_eq!(deg_set(&PointSet2D::from_integers([(3, 7)])).unwrap(), 1);
        assert_eq!(deg_set(&PointSet2D::from_integers((1..=5).map(|i| (i, i)))).unwrap(), 1);
        let grid = PointSet2D::from_integers((1..=3).flat_map(|i| (1..=3).map(move |j| (i, j))));
        assert_eq!(deg_set(&grid).unwrap(), 3);
        assert!(deg_set(&PointSet2D::new()).is_err());
    }

    #[test]
    fn full_grid_meets_bound_with_equality() {
        let f = Family::full(Universe::new(4, 2).unwrap());
        let r = sz_check(&f).unwrap();
        assert_eq!((r.size, r.bound, r.holds), (16, Some(16), true));
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
