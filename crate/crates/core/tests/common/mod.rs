//! Independent reference implementations used as test oracles. Each one is
//! written from the definition, with no shared code beyond the data types.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rainbowlab::{Family, FamilySystem, Tuple, Universe};

pub fn uni(n: u32, k: u32) -> Universe {
    Universe::new(n, k).unwrap()
}

fn disjoint(a: &Tuple, b: &Tuple) -> bool {
    a.coords().iter().zip(b.coords()).all(|(x, y)| x != y)
}

/// Tries every pick from every family.
pub fn naive_rainbow(system: &FamilySystem) -> Option<Vec<Tuple>> {
    let lists: Vec<Vec<Tuple>> = system.families().iter().map(|f| f.to_vec()).collect();
    lists
        .iter()
        .map(|l| l.iter())
        .multi_cartesian_product()
        .find(|picks| picks.iter().tuple_combinations().all(|(a, b)| disjoint(a, b)))
        .map(|picks| picks.into_iter().cloned().collect())
}

/// Every system with `|F_i| = f_i + 1`, family 1 outermost, each family's
/// subsets in lexicographic order of their sorted member lists; returns the
/// first one without a rainbow matching.
pub fn brute_counterexample(u: Universe, f: &[u64]) -> Option<FamilySystem> {
    let all: Vec<Tuple> = u.tuples().collect();
    if f.iter().any(|&v| v as usize >= all.len()) {
        return None;
    }
    f.iter()
        .map(|&v| all.iter().cloned().combinations(v as usize + 1))
        .multi_cartesian_product()
        .map(|fams| {
            let fams = fams.into_iter().map(|ts| Family::from_tuples(u, ts).unwrap()).collect();
            FamilySystem::new(u, fams).unwrap()
        })
        .find(|sys| naive_rainbow(sys).is_none())
}

/// `S_{j,a,b}` straight from the two-case definition.
pub fn shift_oracle(f: &Family, j: u32, a: u32, b: u32) -> Family {
    let members: BTreeSet<Tuple> = f.iter().collect();
    let image = members.iter().map(|t| {
        let moved = t.with(j, a);
        if t.get(j) == b && !members.contains(&moved) {
            moved
        } else {
            t.clone()
        }
    });
    Family::from_tuples(f.universe(), image).unwrap()
}

/// Sparse polynomial in `s` variables.
pub type Poly = HashMap<Vec<u32>, BigInt>;

fn mul(p: &Poly, q: &Poly) -> Poly {
    let mut out: Poly = HashMap::new();
    for (e1, c1) in p {
        for (e2, c2) in q {
            let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigInt::zero) += c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `∏_{i<j} (x_i - x_j)^power`, multiplied out term by term.
pub fn naive_expand(s: usize, power: u32) -> Poly {
    let mut acc: Poly = HashMap::from([(vec![0; s], BigInt::one())]);
    for i in 0..s {
        for j in i + 1..s {
            let mut xi = vec![0; s];
            xi[i] = 1;
            let mut xj = vec![0; s];
            xj[j] = 1;
            let factor: Poly = HashMap::from([(xi, BigInt::one()), (xj, -BigInt::one())]);
            for _ in 0..power {
                acc = mul(&acc, &factor);
            }
        }
    }
    acc
}

/// Rank by plain Gaussian elimination over the rationals.
pub fn rational_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let factor = &row[c] / &pivot_row[c];
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= p * &factor;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Least `d` whose monomials `x^i y^j`, `i + j <= d`, are dependent on the points.
pub fn naive_degree(points: &[(i64, i64)]) -> u32 {
    (1..)
        .find(|&d| {
            let mons: Vec<(u32, u32)> = (0..=d).flat_map(|i| (0..=d - i).map(move |j| (i, j))).collect();
            let m = points
                .iter()
                .map(|&(x, y)| {
                    mons.iter()
                        .map(|&(i, j)| BigRational::from_integer(BigInt::from(x).pow(i) * BigInt::from(y).pow(j)))
                        .collect()
                })
                .collect();
            rational_rank(m) < mons.len()
        })
        .unwrap()
}

/// A family over a fixed universe, as a membership mask.
pub fn family_strategy(u: Universe) -> impl Strategy<Value = Family> {
    weighted_family(u, 0.5)
}

pub fn weighted_family(u: Universe, density: f64) -> impl Strategy<Value = Family> {
    prop::collection::vec(prop::bool::weighted(density), u.size() as usize).prop_map(move |mask| {
        Family::from_tuples(u, u.tuples().zip(mask).filter(|(_, keep)| *keep).map(|(t, _)| t)).unwrap()
    })
}

/// Small universes: `n <= 3`, `k <= 3`.
pub fn small_universe() -> impl Strategy<Value = Universe> {
    (1u32..=3, 1u32..=3).prop_map(|(n, k)| uni(n, k))
}

pub fn system_strategy(max_s: usize) -> impl Strategy<Value = FamilySystem> {
    weighted_system(max_s, 0.5)
}

/// Sparse systems, which often have no rainbow matching.
pub fn sparse_system_strategy(max_s: usize) -> impl Strategy<Value = FamilySystem> {
    weighted_system(max_s, 0.2)
}

fn weighted_system(max_s: usize, density: f64) -> impl Strategy<Value = FamilySystem> {
    small_universe().prop_flat_map(move |u| {
        prop::collection::vec(weighted_family(u, density), 1..=max_s)
            .prop_map(move |fams| FamilySystem::new(u, fams).unwrap())
    })
}

/// Random family with each tuple kept with probability `density`.
pub fn random_family(u: Universe, density: f64, rng: &mut impl rand::Rng) -> Family {
    Family::from_tuples(u, u.tuples().filter(|_| rng.random_bool(density))).unwrap()
}

/// The closed forms rewritten through exp/ln so rounding paths differ.
pub fn bounds_reference(n: f64, s: f64, k: f64) -> (f64, f64, f64) {
    let l = (2.0 * k * s).ln();
    let lg = (k * s).ln() / std::f64::consts::LN_2;
    let spread = (15.0 * std::f64::consts::LN_2 + 3.0 * s.ln() + 3.0 * lg.ln() + (k - 3.0) * n.ln()).exp();
    let base = ((k - 1.0) * n.ln()).exp();
    let log_term = (8f64.ln() + k.ln() + (k - 1.0) * n.ln() + l.ln()).exp();
    let c12 = (4f64.ln() + 2.0 * s.ln() + (k - 2.0) * n.ln()).exp() + spread;
    let sqrt13 = (2.0 * k.ln() + s.ln() + (k - 1.5) * n.ln() + 0.5 * (8.0 * l).ln()).exp();
    let sqrt14 = (14f64.ln() + s.ln() + (k - 1.5) * n.ln() + 0.5 * l.ln()).exp();
    (c12, base + sqrt13.max(log_term), base + sqrt14.max(log_term) + spread)
}
