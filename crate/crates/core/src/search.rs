//! Exact rainbow-matching search and the constructions built on it.

use crate::budget::{Meter, SearchBudget};
use crate::error::{Error, Result};
use crate::family::{tuples_disjoint, Family, FamilySystem, Tuple, Universe};
use crate::randmatch::PerfectMatching;
use crate::registry::Registry;

/// One pairwise-disjoint pick per family, in family order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RainbowMatching {
    pub picks: Vec<Tuple>,
}

impl RainbowMatching {
    /// Checks lengths, membership `picks[i] ∈ F_i` and pairwise disjointness.
    pub fn validate(&self, system: &FamilySystem) -> Result<()> {
        if self.picks.len() != system.s() {
            return Err(Error::invalid(format!("{} picks for {} families", self.picks.len(), system.s())));
        }
        for (i, t) in self.picks.iter().enumerate() {
            if !system.family(i).contains(t) {
                return Err(Error::invalid(format!("pick {t} is not in family {}", i + 1)));
            }
            for (j, u) in self.picks.iter().enumerate().skip(i + 1) {
                if !tuples_disjoint(t.coords(), u.coords()) {
                    return Err(Error::invalid(format!("picks {} and {} intersect", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(RainbowMatching),
    /// The search was exhaustive and found nothing.
    NoneExists,
    /// The budget ran out; nothing is claimed.
    BudgetExhausted,
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn is_none(&self) -> bool {
        matches!(self, SearchOutcome::NoneExists)
    }
}

/// A complete decision procedure for the existence of a rainbow matching.
pub trait RainbowSearch: Send + Sync {
    fn name(&self) -> &'static str;

    /// Must return `Found` with a valid matching iff one exists, unless the
    /// meter runs out first.
    fn search(&self, system: &FamilySystem, meter: &mut Meter) -> SearchOutcome;
}

/// All registered search strategies; `backtrack` is the default.
pub fn strategies() -> Registry<dyn RainbowSearch> {
    let mut r: Registry<dyn RainbowSearch> = Registry::new("search strategy");
    r.register("backtrack", Box::new(Backtrack)).register("nested-loop", Box::new(NestedLoop));
    r
}

/// Runs the default strategy under a fresh meter.
pub fn find_rainbow(system: &FamilySystem, budget: &SearchBudget) -> SearchOutcome {
    Backtrack.search(system, &mut budget.meter())
}

fn decoded(system: &FamilySystem) -> Vec<Vec<Vec<u32>>> {
    system.families().iter().map(|f| f.iter().map(|t| t.coords().iter().map(|&c| c - 1).collect()).collect()).collect()
}

/// Depth-first search over families in ascending size order, with
/// per-coordinate used-value bitsets and a forward check that every
/// remaining family still has a compatible candidate.
#[derive(Clone, Copy, Debug, Default)]
pub struct Backtrack;

struct Board {
    k: usize,
    words: usize,
    used: Vec<u64>,
}

impl Board {
    fn new(k: usize, n: usize) -> Self {
        let words = n.div_ceil(64);
        Board { k, words, used: vec![0; k * words] }
    }

    #[inline]
    fn free(&self, t: &[u32]) -> bool {
        t.iter().enumerate().all(|(j, &c)| {
            let c = c as usize;
            self.used[j * self.words + c / 64] >> (c % 64) & 1 == 0
        })
    }

    #[inline]
    fn toggle(&mut self, t: &[u32]) {
        for (j, &c) in t.iter().enumerate().take(self.k) {
            let c = c as usize;
            self.used[j * self.words + c / 64] ^= 1 << (c % 64);
        }
    }
}

impl Backtrack {
    fn dfs(
        order: &[usize],
        families: &[Vec<Vec<u32>>],
        board: &mut Board,
        picks: &mut Vec<usize>,
        meter: &mut Meter,
    ) -> Result<bool, crate::budget::Exhausted> {
        let depth = picks.len();
        if depth == order.len() {
            return Ok(true);
        }
        let fam = &families[order[depth]];
        for (idx, t) in fam.iter().enumerate() {
            if !board.free(t) {
                continue;
            }
            meter.tick()?;
            board.toggle(t);
            let viable = order[depth + 1..].iter().all(|&o| families[o].iter().any(|u| board.free(u)));
            if viable {
                picks.push(idx);
                if Self::dfs(order, families, board, picks, meter)? {
                    board.toggle(t);
                    return Ok(true);
                }
                picks.pop();
            }
            board.toggle(t);
        }
        Ok(false)
    }
}

impl RainbowSearch for Backtrack {
    fn name(&self) -> &'static str {
        "backtrack"
    }

    fn search(&self, system: &FamilySystem, meter: &mut Meter) -> SearchOutcome {
        if system.families().iter().any(Family::is_empty) {
            return SearchOutcome::NoneExists;
        }
        let families = decoded(system);
        let mut order: Vec<usize> = (0..families.len()).collect();
        order.sort_by_key(|&i| families[i].len());
        let u = system.universe();
        let mut board = Board::new(u.k() as usize, u.n() as usize);
        let mut picks = Vec::with_capacity(order.len());
        match Self::dfs(&order, &families, &mut board, &mut picks, meter) {
            Err(_) => SearchOutcome::BudgetExhausted,
            Ok(false) => SearchOutcome::NoneExists,
            Ok(true) => {
                let mut out = vec![Tuple(Vec::new()); order.len()];
                for (depth, &fam) in order.iter().enumerate() {
                    out[fam] = Tuple(families[fam][picks[depth]].iter().map(|&c| c + 1).collect());
                }
                SearchOutcome::Found(RainbowMatching { picks: out })
            }
        }
    }
}

/// Plain `s`-fold product enumeration; each full candidate costs one node.
#[derive(Clone, Copy, Debug, Default)]
pub struct NestedLoop;

impl RainbowSearch for NestedLoop {
    fn name(&self) -> &'static str {
        "nested-loop"
    }

    fn search(&self, system: &FamilySystem, meter: &mut Meter) -> SearchOutcome {
        let families: Vec<Vec<Tuple>> = system.families().iter().map(Family::to_vec).collect();
        if families.iter().any(Vec::is_empty) {
            return SearchOutcome::NoneExists;
        }
        let mut idx = vec![0usize; families.len()];
        loop {
            if meter.tick().is_err() {
                return SearchOutcome::BudgetExhausted;
            }
            let picks: Vec<&Tuple> = idx.iter().zip(&families).map(|(&i, f)| &f[i]).collect();
            let ok = (0..picks.len())
                .all(|a| (a + 1..picks.len()).all(|b| tuples_disjoint(picks[a].coords(), picks[b].coords())));
            if ok {
                return SearchOutcome::Found(RainbowMatching { picks: picks.into_iter().cloned().collect() });
            }
            // odometer, last family fastest
            let mut pos = families.len();
            loop {
                if pos == 0 {
                    return SearchOutcome::NoneExists;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < families[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

/// Why [`greedy_extract`] stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractFailure {
    /// 1-indexed family at which no unused element of `M ∩ F_i` remained.
    pub index: usize,
}

/// Walks `i = 1, ..., s` and picks the lexicographically first unused member
/// of `M ∩ F_i`. Members of a perfect matching are pairwise disjoint, so any
/// distinct picks form a rainbow matching; the walk cannot fail when
/// `|M ∩ F_i| >= i` for every `i`.
pub fn greedy_extract(m: &PerfectMatching, system: &FamilySystem) -> Result<RainbowMatching, ExtractFailure> {
    let mut members = m.members();
    members.sort();
    let mut used = vec![false; members.len()];
    let mut picks = Vec::with_capacity(system.s());
    for (i, family) in system.families().iter().enumerate() {
        let slot = members
            .iter()
            .enumerate()
            .position(|(idx, t)| !used[idx] && family.contains(t))
            .ok_or(ExtractFailure { index: i + 1 })?;
        used[slot] = true;
        picks.push(members[slot].clone());
    }
    Ok(RainbowMatching { picks })
}

/// Grows a system without rainbow matchings to an inclusion-maximal one.
///
/// Scan order is family index ascending, then tuples in lexicographic order;
/// a tuple is kept iff the enlarged system still has no rainbow matching.
/// One pass suffices: a rejected tuple stays rejected as the system grows.
pub fn saturate(system: &FamilySystem, budget: &SearchBudget) -> Result<FamilySystem> {
    saturate_with(&Backtrack, system, &mut budget.meter())
}

pub fn saturate_with(search: &dyn RainbowSearch, system: &FamilySystem, meter: &mut Meter) -> Result<FamilySystem> {
    match search.search(system, meter) {
        SearchOutcome::Found(_) => return Err(Error::invalid("system already admits a rainbow matching")),
        SearchOutcome::BudgetExhausted => {
            return Err(Error::BudgetExhausted("could not certify the input has no rainbow matching".into()))
        }
        SearchOutcome::NoneExists => {}
    }
    let u = system.universe();
    let mut current = system.clone();
    for i in 0..current.s() {
        for code in 0..u.size() {
            if current.family(i).contains_code(code) {
                continue;
            }
            let probe = current.replace(i, Family::from_codes(u, [code]))?;
            match search.search(&probe, meter) {
                SearchOutcome::Found(_) => {}
                SearchOutcome::NoneExists => {
                    let mut grown = current.family(i).clone();
                    grown.insert_code(code);
                    current = current.replace(i, grown)?;
                }
                SearchOutcome::BudgetExhausted => {
                    return Err(Error::BudgetExhausted(format!(
                        "partial saturation: stopped at family {} tuple {}",
                        i + 1,
                        u.decode(code)
                    )))
                }
            }
        }
    }
    Ok(current)
}

/// `[s-1] × [n]^(k-1)`: the family whose `s` copies have no rainbow matching.
pub fn construct_stripe(universe: Universe, s: u32) -> Result<Family> {
    if s < 2 || s - 1 > universe.n() {
        return Err(Error::invalid(format!("stripe needs 1 <= s-1 <= n, got s={s}, n={}", universe.n())));
    }
    let codes = (0..universe.size()).filter(|&c| universe.coord_of(c, 1) < s);
    Ok(Family::from_codes(universe, codes))
}
