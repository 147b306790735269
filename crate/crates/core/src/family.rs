//! Tuples of `[n]^k`, families of tuples and multisets of tuples.
//!
//! All public interfaces speak 1-indexed coordinate values. Internally a
//! tuple is also addressed by a `u64` code: the mixed-radix number with the
//! first coordinate most significant and values shifted down by one, so
//! that code order coincides with lexicographic tuple order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// The ambient product `[n]^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Universe {
    n: u32,
    k: u32,
}

impl Universe {
    /// Largest admissible `n^k`.
    pub const MAX_SIZE: u64 = 1 << 40;

    pub fn new(n: u32, k: u32) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::invalid(format!("universe needs n >= 1 and k >= 1, got n={n}, k={k}")));
        }
        let mut size: u64 = 1;
        for _ in 0..k {
            size = size
                .checked_mul(n as u64)
                .filter(|&v| v <= Self::MAX_SIZE)
                .ok_or_else(|| Error::invalid(format!("n^k = {n}^{k} exceeds 2^40")))?;
        }
        Ok(Universe { n, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `n^k`.
    pub fn size(&self) -> u64 {
        (self.n as u64).pow(self.k)
    }

    /// `n^(k-1)`, the size of a hyperplane.
    pub fn hyperplane_size(&self) -> u64 {
        (self.n as u64).pow(self.k - 1)
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        t.0.len() == self.k as usize && t.0.iter().all(|&c| c >= 1 && c <= self.n)
    }

    pub(crate) fn check(&self, t: &Tuple) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::invalid(format!("tuple {t} is not in [{}]^{}", self.n, self.k)))
        }
    }

    pub(crate) fn check_coord(&self, j: u32, a: u32) -> Result<()> {
        if j == 0 || j > self.k {
            return Err(Error::invalid(format!("coordinate {j} out of range 1..={}", self.k)));
        }
        if a == 0 || a > self.n {
            return Err(Error::invalid(format!("value {a} out of range 1..={}", self.n)));
        }
        Ok(())
    }

    pub fn encode(&self, t: &Tuple) -> u64 {
        t.0.iter().fold(0u64, |acc, &c| acc * self.n as u64 + (c - 1) as u64)
    }

    pub fn decode(&self, mut code: u64) -> Tuple {
        let mut coords = vec![0u32; self.k as usize];
        for slot in coords.iter_mut().rev() {
            *slot = (code % self.n as u64) as u32 + 1;
            code /= self.n as u64;
        }
        Tuple(coords)
    }

    /// Value of coordinate `j` (1-indexed) of the tuple with the given code.
    pub fn coord_of(&self, code: u64, j: u32) -> u32 {
        let shift = (self.n as u64).pow(self.k - j);
        ((code / shift) % self.n as u64) as u32 + 1
    }

    /// Every tuple of the universe in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Tuple> + '_ {
        (0..self.size()).map(move |c| self.decode(c))
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]^{}", self.n, self.k)
    }
}

/// A point of `[n]^k`, coordinates 1-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Tuple(pub Vec<u32>);

impl Tuple {
    pub fn new(coords: impl Into<Vec<u32>>) -> Self {
        Tuple(coords.into())
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// Value at coordinate `j` (1-indexed).
    pub fn get(&self, j: u32) -> u32 {
        self.0[(j - 1) as usize]
    }

    /// Copy of this tuple with coordinate `j` set to `value`.
    pub fn with(&self, j: u32, value: u32) -> Tuple {
        let mut coords = self.0.clone();
        coords[(j - 1) as usize] = value;
        Tuple(coords)
    }

    /// The set view `{(1, a_1), ..., (k, a_k)}`.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().enumerate().map(|(i, &a)| (i as u32 + 1, a))
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// True iff the tuples differ in every coordinate.
pub fn disjoint(a: &Tuple, b: &Tuple) -> Result<bool> {
    if a.k() != b.k() {
        return Err(Error::invalid(format!("tuples {a} and {b} have different lengths")));
    }
    Ok(tuples_disjoint(&a.0, &b.0))
}

#[inline]
pub(crate) fn tuples_disjoint(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x != y)
}

/// A set of tuples of one universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    universe: Universe,
    members: BTreeSet<u64>,
}

impl Family {
    pub fn empty(universe: Universe) -> Self {
        Family { universe, members: BTreeSet::new() }
    }

    /// All of `[n]^k`.
    pub fn full(universe: Universe) -> Self {
        Family { universe, members: (0..universe.size()).collect() }
    }

    pub fn from_tuples<I>(universe: Universe, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Tuple>,
    {
        let mut f = Family::empty(universe);
        for t in tuples {
            f.insert(&t)?;
        }
        Ok(f)
    }

    /// Builds a family from raw coordinate slices, panicking on invalid
    /// input. Meant for literals in tests and examples.
    pub fn of(universe: Universe, tuples: &[&[u32]]) -> Self {
        Family::from_tuples(universe, tuples.iter().map(|c| Tuple::new(c.to_vec()))).expect("valid tuple literals")
    }

    pub(crate) fn from_codes<I: IntoIterator<Item = u64>>(universe: Universe, codes: I) -> Self {
        Family { universe, members: codes.into_iter().collect() }
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Inserts `t`; returns false when it was already present.
    pub fn insert(&mut self, t: &Tuple) -> Result<bool> {
        self.universe.check(t)?;
        Ok(self.members.insert(self.universe.encode(t)))
    }

    pub fn remove(&mut self, t: &Tuple) -> bool {
        self.universe.contains(t) && self.members.remove(&self.universe.encode(t))
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        self.universe.contains(t) && self.members.contains(&self.universe.encode(t))
    }

    pub(crate) fn contains_code(&self, code: u64) -> bool {
        self.members.contains(&code)
    }

    pub fn codes(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().copied()
    }

    pub(crate) fn insert_code(&mut self, code: u64) -> bool {
        self.members.insert(code)
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Tuple> + '_ {
        self.members.iter().map(move |&c| self.universe.decode(c))
    }

    pub fn to_vec(&self) -> Vec<Tuple> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &Family) -> bool {
        self.universe == other.universe && self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &Family) -> Result<Family> {
        same_universe(self.universe, other.universe)?;
        Ok(Family { universe: self.universe, members: &self.members | &other.members })
    }

    pub fn difference(&self, other: &Family) -> Result<Family> {
        same_universe(self.universe, other.universe)?;
        Ok(Family { universe: self.universe, members: &self.members - &other.members })
    }

    pub fn intersection(&self, other: &Family) -> Result<Family> {
        same_universe(self.universe, other.universe)?;
        Ok(Family { universe: self.universe, members: &self.members & &other.members })
    }
}

pub(crate) fn same_universe(a: Universe, b: Universe) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::invalid(format!("universe mismatch: {a} vs {b}")))
    }
}

/// `H_{j,a}`: every tuple whose `j`-th coordinate is `a`.
pub fn hyperplane(universe: Universe, j: u32, a: u32) -> Result<Family> {
    universe.check_coord(j, a)?;
    let codes = (0..universe.size()).filter(|&c| universe.coord_of(c, j) == a);
    Ok(Family::from_codes(universe, codes))
}

/// Tuples with positive multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleMultiset {
    universe: Universe,
    entries: BTreeMap<u64, u64>,
}

impl TupleMultiset {
    pub fn empty(universe: Universe) -> Self {
        TupleMultiset { universe, entries: BTreeMap::new() }
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    /// Adds `count` copies of `t`; a zero count is a no-op.
    pub fn add(&mut self, t: &Tuple, count: u64) -> Result<()> {
        self.universe.check(t)?;
        if count > 0 {
            *self.entries.entry(self.universe.encode(t)).or_insert(0) += count;
        }
        Ok(())
    }

    pub(crate) fn add_code(&mut self, code: u64, count: u64) {
        if count > 0 {
            *self.entries.entry(code).or_insert(0) += count;
        }
    }

    pub fn multiplicity(&self, t: &Tuple) -> u64 {
        if !self.universe.contains(t) {
            return 0;
        }
        self.entries.get(&self.universe.encode(t)).copied().unwrap_or(0)
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Number of distinct tuples.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn max_multiplicity(&self) -> u64 {
        self.entries.values().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Tuple, u64)> + '_ {
        self.entries.iter().map(move |(&c, &m)| (self.universe.decode(c), m))
    }

    pub(crate) fn code_entries(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().map(|(&c, &m)| (c, m))
    }

    /// Splits the multiset into layers `L_1, L_2, ...` where `L_l` holds the
    /// tuples of multiplicity at least `l`. The layers sum back to `self`.
    pub fn layers(&self) -> Vec<Family> {
        (1..=self.max_multiplicity())
            .map(|l| Family::from_codes(self.universe, self.entries.iter().filter(|(_, &m)| m >= l).map(|(&c, _)| c)))
            .collect()
    }
}

impl From<&Family> for TupleMultiset {
    fn from(f: &Family) -> Self {
        TupleMultiset { universe: f.universe, entries: f.members.iter().map(|&c| (c, 1)).collect() }
    }
}

/// Anything that assigns a multiplicity to each tuple: families (0/1) and
/// multisets.
pub trait TupleWeights: Sync {
    fn universe(&self) -> Universe;
    fn weight_of_code(&self, code: u64) -> u64;
    /// Sum of all weights.
    fn total_weight(&self) -> u64;
    fn weighted_codes(&self) -> Vec<(u64, u64)>;
}

impl TupleWeights for Family {
    fn universe(&self) -> Universe {
        self.universe
    }
    fn weight_of_code(&self, code: u64) -> u64 {
        self.members.contains(&code) as u64
    }
    fn total_weight(&self) -> u64 {
        self.members.len() as u64
    }
    fn weighted_codes(&self) -> Vec<(u64, u64)> {
        self.members.iter().map(|&c| (c, 1)).collect()
    }
}

impl TupleWeights for TupleMultiset {
    fn universe(&self) -> Universe {
        self.universe
    }
    fn weight_of_code(&self, code: u64) -> u64 {
        self.entries.get(&code).copied().unwrap_or(0)
    }
    fn total_weight(&self) -> u64 {
        self.total()
    }
    fn weighted_codes(&self) -> Vec<(u64, u64)> {
        self.code_entries().collect()
    }
}

/// `x ⊕ y`: multiplicities add.
pub fn multiset_sum(x: &dyn TupleWeights, y: &dyn TupleWeights) -> Result<TupleMultiset> {
    same_universe(x.universe(), y.universe())?;
    let mut out = TupleMultiset::empty(x.universe());
    for (c, m) in x.weighted_codes().into_iter().chain(y.weighted_codes()) {
        out.add_code(c, m);
    }
    Ok(out)
}

/// An ordered list of `s >= 1` families over one universe, with optional
/// thresholds `f_1, ..., f_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySystem {
    universe: Universe,
    families: Vec<Family>,
    thresholds: Option<Vec<u64>>,
}

impl FamilySystem {
    pub fn new(universe: Universe, families: Vec<Family>) -> Result<Self> {
        if families.is_empty() {
            return Err(Error::invalid("a family system needs at least one family"));
        }
        for f in &families {
            same_universe(universe, f.universe())?;
        }
        Ok(FamilySystem { universe, families, thresholds: None })
    }

    pub fn with_thresholds(mut self, thresholds: Vec<u64>) -> Result<Self> {
        if thresholds.len() != self.families.len() {
            return Err(Error::invalid(format!(
                "{} thresholds given for {} families",
                thresholds.len(),
                self.families.len()
            )));
        }
        self.thresholds = Some(thresholds);
        Ok(self)
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    /// Number of families `s`.
    pub fn s(&self) -> usize {
        self.families.len()
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn family(&self, i: usize) -> &Family {
        &self.families[i]
    }

    pub fn thresholds(&self) -> Option<&[u64]> {
        self.thresholds.as_deref()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.families.iter().map(Family::len).collect()
    }

    /// Replaces family `i` (0-indexed).
    pub fn replace(&self, i: usize, f: Family) -> Result<FamilySystem> {
        same_universe(self.universe, f.universe())?;
        let mut out = self.clone();
        out.families[i] = f;
        Ok(out)
    }

    /// Pointwise `F_i ⊆ G_i`.
    pub fn is_pointwise_subset(&self, other: &FamilySystem) -> bool {
        self.s() == other.s() && self.families.iter().zip(&other.families).all(|(a, b)| a.is_subset(b))
    }

    pub fn map_families<F>(&self, f: F) -> Result<FamilySystem>
    where
        F: FnMut(&Family) -> Result<Family>,
    {
        let families = self.families.iter().map(f).collect::<Result<Vec<_>>>()?;
        let mut out = FamilySystem::new(self.universe, families)?;
        out.thresholds = self.thresholds.clone();
        Ok(out)
    }
}
