//! Spread approximation by peeling.
//!
//! A tuple `(x_1, ..., x_k)` is read as the set `{(1,x_1), ..., (k,x_k)}`
//! of `[k] × [n]`, and a [`Pattern`] is a subset with at most one pair per
//! coordinate. Starting from `G = F`, the loop picks an inclusion-maximal
//! pattern `S` with `|G(S)| >= r^(-|S|) |G|`, stops if `|S| >= 3` or `G` is
//! empty, and otherwise records `S` and removes `G[S]` from `G`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::bounds::spread_r;
use crate::error::{Error, Result};
use crate::family::{Family, FamilySystem, Tuple};
use crate::registry::Registry;

/// A set of `(j, a)` pairs with distinct coordinates, sorted by `j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(Vec<(u32, u32)>);

impl Pattern {
    pub fn empty() -> Self {
        Pattern(Vec::new())
    }

    pub fn new(mut elems: Vec<(u32, u32)>) -> Result<Self> {
        elems.sort_unstable();
        if elems.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("a pattern holds at most one pair per coordinate"));
        }
        Ok(Pattern(elems))
    }

    pub fn elems(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, cell: (u32, u32)) -> bool {
        self.0.binary_search(&cell).is_ok()
    }

    /// `self ⊆ t` under the set view of tuples.
    pub fn within(&self, t: &Tuple) -> bool {
        self.0.iter().all(|&(j, a)| t.get(j) == a)
    }

    pub fn is_disjoint(&self, other: &Pattern) -> bool {
        self.0.iter().all(|&c| !other.contains(c))
    }

    fn union(&self, extra: &[(u32, u32)]) -> Pattern {
        let mut elems = self.0.clone();
        elems.extend_from_slice(extra);
        elems.sort_unstable();
        Pattern(elems)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (j, a)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({j},{a})")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(self.0.iter().map(|&(j, a)| [j, a]))
    }
}

/// `F[X]`: members containing `x`.
pub fn restrict(f: &Family, x: &Pattern) -> Family {
    let mut out = Family::empty(f.universe());
    for t in f.iter().filter(|t| x.within(t)) {
        out.insert(&t).expect("same universe");
    }
    out
}

/// `F(X)`: members containing `x` with `x` removed, as tuples over the
/// remaining coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    /// Coordinates not fixed by the pattern, ascending.
    pub coords: Vec<u32>,
    pub members: BTreeSet<Vec<u32>>,
}

impl Quotient {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn quotient(f: &Family, x: &Pattern) -> Quotient {
    let coords: Vec<u32> = (1..=f.universe().k()).filter(|&j| !x.elems().iter().any(|&(i, _)| i == j)).collect();
    let members = f.iter().filter(|t| x.within(t)).map(|t| coords.iter().map(|&j| t.get(j)).collect()).collect();
    Quotient { coords, members }
}

/// `F[S]`: the union of `F[A]` over `A` in `patterns`.
pub fn cover<'a>(f: &Family, patterns: impl IntoIterator<Item = &'a Pattern>) -> Family {
    let patterns: Vec<&Pattern> = patterns.into_iter().collect();
    let mut out = Family::empty(f.universe());
    for t in f.iter().filter(|t| patterns.iter().any(|p| p.within(t))) {
        out.insert(&t).expect("same universe");
    }
    out
}

/// Chooses among qualifying extensions of equal size.
pub trait PatternSelector: Send + Sync {
    fn name(&self) -> &'static str;

    /// `candidates` is nonempty and sorted by extension; returns an index.
    fn choose(&self, candidates: &[Candidate]) -> usize;
}

/// Extension `X` of the current pattern with `|G(S ∪ X)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub extension: Vec<(u32, u32)>,
    pub count: u64,
}

/// Largest `|G(S ∪ X)|`, first in order on ties.
pub struct MaxCount;

impl PatternSelector for MaxCount {
    fn name(&self) -> &'static str {
        "max-count"
    }

    fn choose(&self, candidates: &[Candidate]) -> usize {
        let best = candidates.iter().map(|c| c.count).max().unwrap_or(0);
        candidates.iter().position(|c| c.count == best).unwrap_or(0)
    }
}

pub struct LexFirst;

impl PatternSelector for LexFirst {
    fn name(&self) -> &'static str {
        "lex-first"
    }

    fn choose(&self, _: &[Candidate]) -> usize {
        0
    }
}

pub struct MinCount;

impl PatternSelector for MinCount {
    fn name(&self) -> &'static str {
        "min-count"
    }

    fn choose(&self, candidates: &[Candidate]) -> usize {
        let worst = candidates.iter().map(|c| c.count).min().unwrap_or(0);
        candidates.iter().position(|c| c.count == worst).unwrap_or(0)
    }
}

/// `max-count` is the default.
pub fn selectors() -> Registry<dyn PatternSelector> {
    let mut r: Registry<dyn PatternSelector> = Registry::new("pattern selector");
    r.register("max-count", Box::new(MaxCount))
        .register("lex-first", Box::new(LexFirst))
        .register("min-count", Box::new(MinCount));
    r
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub pattern: Pattern,
    pub g_before: u64,
    pub g_of_s: u64,
    /// False for the final pattern of size `>= 3` that stopped the loop.
    pub recorded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpreadResult {
    pub s0: BTreeSet<Pattern>,
    pub s1: BTreeSet<Pattern>,
    pub s2: BTreeSet<Pattern>,
    /// `F \ T[S]` once post-processed; the final `G` before that.
    #[serde(serialize_with = "family_as_lists")]
    pub leftover: Family,
    pub trace: Vec<TraceStep>,
    pub r_used: f64,
    /// `n <= r_used`: the leftover bound is not guaranteed.
    pub n_le_r_warning: bool,
    /// Singletons promoted by the two-element cap.
    pub promoted: Vec<Pattern>,
    /// Which rule, if any, replaced the whole collection by `{∅}`.
    pub collapsed_by: Option<&'static str>,
}

fn family_as_lists<S: Serializer>(f: &Family, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_seq(f.iter().map(|t| t.0))
}

impl SpreadResult {
    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.s0.iter().chain(&self.s1).chain(&self.s2)
    }

    fn collapse(&mut self, rule: &'static str) {
        self.s0 = BTreeSet::from([Pattern::empty()]);
        self.s1.clear();
        self.s2.clear();
        self.leftover = Family::empty(self.leftover.universe());
        self.collapsed_by = Some(rule);
    }
}

/// Qualifying strict extensions of `s` of the smallest size, sorted.
fn extensions(g: &[Tuple], s: &Pattern, k: u32, r: f64) -> Vec<Candidate> {
    let free: Vec<u32> = (1..=k).filter(|&j| !s.elems().iter().any(|&(i, _)| i == j)).collect();
    let mut counts: HashMap<Vec<(u32, u32)>, u64> = HashMap::new();
    for t in g.iter().filter(|t| s.within(t)) {
        for mask in 1u32..(1 << free.len()) {
            let x: Vec<(u32, u32)> =
                free.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &j)| (j, t.get(j))).collect();
            *counts.entry(x).or_default() += 1;
        }
    }
    let total = g.len() as f64;
    let qualifies = |x: &Vec<(u32, u32)>, c: u64| c as f64 * r.powi((s.len() + x.len()) as i32) >= total;
    let Some(size) = counts.iter().filter(|(x, &c)| qualifies(x, c)).map(|(x, _)| x.len()).min() else {
        return Vec::new();
    };
    let mut out: Vec<Candidate> = counts
        .into_iter()
        .filter(|(x, c)| x.len() == size && qualifies(x, *c))
        .map(|(extension, count)| Candidate { extension, count })
        .collect();
    out.sort_by(|a, b| a.extension.cmp(&b.extension));
    out
}

/// Grows from `∅` until no strict superset qualifies.
fn maximal_pattern(g: &[Tuple], k: u32, r: f64, selector: &dyn PatternSelector) -> (Pattern, u64) {
    let mut s = Pattern::empty();
    let mut count = g.len() as u64;
    loop {
        let cands = extensions(g, &s, k, r);
        if cands.is_empty() {
            return (s, count);
        }
        let pick = &cands[selector.choose(&cands)];
        s = s.union(&pick.extension);
        count = pick.count;
    }
}

/// Runs the peeling loop on one family.
pub fn build_spread(
    f: &Family,
    s: usize,
    r_override: Option<f64>,
    selector: &dyn PatternSelector,
) -> Result<SpreadResult> {
    let u = f.universe();
    let r = r_override.unwrap_or_else(|| spread_r(s as u64, u.k() as u64));
    if r.is_nan() || r <= 1.0 {
        return Err(Error::invalid(format!("spread parameter r must exceed 1, got {r}")));
    }
    let mut g: Vec<Tuple> = f.to_vec();
    let mut out = SpreadResult {
        s0: BTreeSet::new(),
        s1: BTreeSet::new(),
        s2: BTreeSet::new(),
        leftover: Family::empty(u),
        trace: Vec::new(),
        r_used: r,
        n_le_r_warning: u.n() as f64 <= r,
        promoted: Vec::new(),
        collapsed_by: None,
    };
    while !g.is_empty() {
        let (pattern, g_of_s) = maximal_pattern(&g, u.k(), r, selector);
        let recorded = pattern.len() < 3;
        out.trace.push(TraceStep { pattern: pattern.clone(), g_before: g.len() as u64, g_of_s, recorded });
        if !recorded {
            break;
        }
        g.retain(|t| !pattern.within(t));
        match pattern.len() {
            0 => out.s0.insert(pattern),
            1 => out.s1.insert(pattern),
            _ => out.s2.insert(pattern),
        };
    }
    for t in &g {
        out.leftover.insert(t)?;
    }
    Ok(out)
}

/// Enforces the caps: each pair in at most `2(s-1)` two-element patterns,
/// then `|s2| <= 4(s-1)^2`, then `|s1| <= 2(s-1)`; a violated size cap
/// replaces the whole collection by `{∅}`.
pub fn postprocess(result: &SpreadResult, s: usize) -> SpreadResult {
    let mut out = result.clone();
    let limit = 2 * s.saturating_sub(1);
    loop {
        let mut occurrences: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for p in &out.s2 {
            for &c in p.elems() {
                *occurrences.entry(c).or_default() += 1;
            }
        }
        let Some((&cell, _)) = occurrences.iter().find(|(_, &m)| m > limit) else {
            break;
        };
        out.s2.retain(|p| !p.contains(cell));
        let single = Pattern(vec![cell]);
        out.s1.insert(single.clone());
        out.promoted.push(single);
    }
    if out.s2.len() > limit * limit {
        out.collapse("s2-size");
    } else if out.s1.len() > limit {
        out.collapse("s1-size");
    } else {
        let patterns: Vec<Pattern> = out.patterns().cloned().collect();
        let left: Vec<Tuple> = out.leftover.iter().filter(|t| !patterns.iter().any(|p| p.within(t))).collect();
        out.leftover = Family::from_tuples(out.leftover.universe(), left).expect("same universe");
    }
    out
}

/// Builds and post-processes every family of a system.
pub fn spread_system(
    system: &FamilySystem,
    r_override: Option<f64>,
    selector: &dyn PatternSelector,
) -> Result<Vec<SpreadResult>> {
    let s = system.s();
    system.families().iter().map(|f| build_spread(f, s, r_override, selector).map(|r| postprocess(&r, s))).collect()
}

/// Pairwise-disjoint picks `B_i ∈ S_i`, if any.
pub fn pattern_matching(results: &[SpreadResult]) -> Option<Vec<Pattern>> {
    fn go(lists: &[Vec<&Pattern>], chosen: &mut Vec<Pattern>) -> bool {
        let Some(list) = lists.get(chosen.len()) else {
            return true;
        };
        for &p in list {
            if chosen.iter().all(|c| c.is_disjoint(p)) {
                chosen.push(p.clone());
                if go(lists, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let lists: Vec<Vec<&Pattern>> = results.iter().map(|r| r.patterns().collect()).collect();
    let mut chosen = Vec::new();
    go(&lists, &mut chosen).then_some(chosen)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpreadCheck {
    /// `s0 ⊆ {∅}` and every pattern sits in the part for its size.
    pub partition: bool,
    /// `F ⊆ T[S] ∪ leftover` and `leftover ⊆ F`.
    pub cover: bool,
    pub s1_cap: bool,
    pub s2_cap: bool,
    /// Every pair lies in at most `2(s-1)` patterns of `s2`.
    pub pair_cap: bool,
    pub leftover: usize,
    /// `2^15 s^3 log2(sk)^3 n^(k-3)`.
    pub leftover_bound: f64,
    /// `r_used^3 n^(k-3)`.
    pub leftover_bound_r_used: f64,
    /// The leftover bound is only claimed for `n > r_used`.
    pub leftover_bound_applies: bool,
    pub leftover_within_bound: bool,
    pub leftover_within_bound_r_used: bool,
    /// `Some(true)` when the supplied results admit no disjoint pick.
    pub no_pattern_matching: Option<bool>,
}

impl SpreadCheck {
    /// All structural checks, plus the leftover bound when it applies and
    /// the pick check when it was run.
    pub fn passed(&self) -> bool {
        self.partition
            && self.cover
            && self.s1_cap
            && self.s2_cap
            && self.pair_cap
            && (!self.leftover_bound_applies || self.leftover_within_bound)
            && self.no_pattern_matching != Some(false)
    }
}

pub fn verify_spread(
    f: &Family,
    result: &SpreadResult,
    s: usize,
    system_results: Option<&[SpreadResult]>,
) -> SpreadCheck {
    let u = f.universe();
    let partition = result.s0.iter().all(Pattern::is_empty)
        && result.s1.iter().all(|p| p.len() == 1)
        && result.s2.iter().all(|p| p.len() == 2);
    let patterns: Vec<&Pattern> = result.patterns().collect();
    let cover_ok = result.leftover.is_subset(f)
        && f.iter().all(|t| result.leftover.contains(&t) || patterns.iter().any(|p| p.within(&t)));
    let limit = 2 * s.saturating_sub(1);
    let mut occurrences: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for p in &result.s2 {
        for &c in p.elems() {
            *occurrences.entry(c).or_default() += 1;
        }
    }
    let (nf, sf, kf) = (u.n() as f64, s as f64, u.k() as f64);
    let leftover_bound = 32768.0 * sf.powi(3) * (sf * kf).log2().powi(3) * nf.powf(kf - 3.0);
    let leftover_bound_r_used = result.r_used.powi(3) * nf.powf(kf - 3.0);
    let left = result.leftover.len() as f64;
    SpreadCheck {
        partition,
        cover: cover_ok,
        s1_cap: result.s1.len() <= limit,
        s2_cap: result.s2.len() <= limit * limit,
        pair_cap: occurrences.values().all(|&m| m <= limit),
        leftover: result.leftover.len(),
        leftover_bound,
        leftover_bound_r_used,
        leftover_bound_applies: nf > result.r_used,
        leftover_within_bound: left <= leftover_bound,
        leftover_within_bound_r_used: left <= leftover_bound_r_used,
        no_pattern_matching: system_results.map(|rs| pattern_matching(rs).is_none()),
    }
}
