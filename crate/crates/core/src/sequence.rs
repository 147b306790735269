//! Deciding whether a threshold sequence is satisfying.
//!
//! `f_1, ..., f_s` is satisfying when every system with `|F_i| > f_i` has a
//! rainbow matching. Adding tuples to a family can only create rainbow
//! matchings, so a counterexample with `|F_i| > f_i` shrinks to one with
//! `|F_i| = f_i + 1` exactly; the exhaustive check only enumerates those.
//!
//! The enumeration walks systems in lexicographic order (families compared
//! as sorted member lists, family 1 first). Whenever a prefix `F_1..F_i`
//! already has no rainbow matching every completion is a counterexample, so
//! the lexicographically least completion is reported at once. Value
//! relabelings in each coordinate preserve rainbow matchings; with symmetry
//! pruning on, only first families that are lexicographically minimal in
//! their orbit are tried. The lexicographically least counterexample always
//! has such a first family, so pruning does not change the witness.

use std::sync::atomic::{AtomicUsize, Ordering};

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{Meter, SearchBudget};
use crate::error::{Error, Result};
use crate::family::{Family, FamilySystem, Universe};
use crate::parallel::with_workers;
use crate::randmatch::substream;
use crate::search::{strategies, RainbowSearch, SearchOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceSpec {
    universe: Universe,
    f: Vec<u64>,
}

impl SequenceSpec {
    pub fn new(universe: Universe, f: Vec<u64>) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::invalid("a sequence needs s >= 1 entries"));
        }
        Ok(SequenceSpec { universe, f })
    }

    /// `f_i = (i - 1) n^(k-1) + c`.
    pub fn arithmetic(universe: Universe, s: usize, c: u64) -> Result<Self> {
        let step = universe.hyperplane_size();
        SequenceSpec::new(universe, (0..s as u64).map(|i| i * step + c).collect())
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn s(&self) -> usize {
        self.f.len()
    }

    pub fn thresholds(&self) -> &[u64] {
        &self.f
    }

    /// True when some `f_i + 1` exceeds `n^k`, making the condition vacuous.
    pub fn is_vacuous(&self) -> bool {
        self.f.iter().any(|&v| v >= self.universe.size())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Satisfying,
    NotSatisfying,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    /// A system with `|F_i| = f_i + 1` and no rainbow matching; present iff
    /// the status is `NotSatisfying`.
    pub witness: Option<FamilySystem>,
    /// Rainbow searches run (prefix and full systems).
    pub systems: u64,
    /// Search nodes charged.
    pub nodes: u64,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Name in [`strategies`].
    pub strategy: String,
    pub workers: usize,
    pub symmetry: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { strategy: "backtrack".into(), workers: 1, symmetry: true }
    }
}

/// Coordinate-wise value relabelings, as code permutation tables.
struct Relabelings {
    tables: Vec<Vec<u64>>,
}

impl Relabelings {
    const MAX_ENTRIES: u64 = 1 << 23;

    fn new(u: Universe) -> Option<Self> {
        let (n, k) = (u.n() as usize, u.k() as usize);
        let fact: u64 = (1..=n as u64).try_fold(1u64, |a, v| a.checked_mul(v))?;
        let group = (0..k).try_fold(1u64, |a, _| a.checked_mul(fact))?;
        if group.checked_mul(u.size())? > Self::MAX_ENTRIES {
            return None;
        }
        let perms: Vec<Vec<u32>> = (0..n as u32).permutations(n).collect();
        let tables = (0..k)
            .map(|_| perms.iter())
            .multi_cartesian_product()
            .map(|g| {
                (0..u.size())
                    .map(|code| {
                        let t = u.decode(code);
                        t.coords().iter().zip(&g).fold(0u64, |acc, (&c, p)| acc * n as u64 + p[(c - 1) as usize] as u64)
                    })
                    .collect()
            })
            .collect();
        Some(Relabelings { tables })
    }

    fn is_canonical(&self, set: &[u64]) -> bool {
        let mut image = Vec::with_capacity(set.len());
        self.tables.iter().all(|t| {
            image.clear();
            image.extend(set.iter().map(|&c| t[c as usize]));
            image.sort_unstable();
            image.as_slice() >= set
        })
    }
}

enum ShardResult {
    Clear { meter: Meter, systems: u64 },
    Counterexample { meter: Meter, systems: u64, families: Vec<Vec<u64>> },
    Exhausted,
    Cancelled,
}

struct Enumeration<'a> {
    universe: Universe,
    sizes: Vec<usize>,
    search: &'a dyn RainbowSearch,
}

impl Enumeration<'_> {
    fn system(&self, chosen: &[Vec<u64>]) -> FamilySystem {
        let fams = chosen.iter().map(|c| Family::from_codes(self.universe, c.iter().copied())).collect();
        FamilySystem::new(self.universe, fams).expect("non-empty system")
    }

    /// Depth-first over families `level..s`, in lexicographic order.
    fn descend(
        &self,
        chosen: &mut Vec<Vec<u64>>,
        meter: &mut Meter,
        systems: &mut u64,
        cancel: &dyn Fn() -> bool,
    ) -> std::result::Result<Option<Vec<Vec<u64>>>, bool> {
        let level = chosen.len();
        if level == self.sizes.len() {
            return Ok(None);
        }
        for combo in (0..self.universe.size()).combinations(self.sizes[level]) {
            if cancel() {
                return Err(false);
            }
            chosen.push(combo);
            *systems += 1;
            match self.search.search(&self.system(chosen), meter) {
                SearchOutcome::BudgetExhausted => return Err(true),
                SearchOutcome::NoneExists => {
                    let mut witness = chosen.clone();
                    for &sz in &self.sizes[level + 1..] {
                        witness.push((0..sz as u64).collect());
                    }
                    return Ok(Some(witness));
                }
                SearchOutcome::Found(_) => {
                    if let Some(w) = self.descend(chosen, meter, systems, cancel)? {
                        return Ok(Some(w));
                    }
                }
            }
            chosen.pop();
        }
        Ok(None)
    }
}

/// Exhaustive verdict under a fresh meter.
pub fn is_satisfying(spec: &SequenceSpec, budget: &SearchBudget, opts: &VerifyOptions) -> Result<Verdict> {
    is_satisfying_metered(spec, &mut budget.meter(), opts)
}

pub fn is_satisfying_metered(spec: &SequenceSpec, meter: &mut Meter, opts: &VerifyOptions) -> Result<Verdict> {
    let registry = strategies();
    let search = registry.get(&opts.strategy)?;
    let u = spec.universe();
    if spec.is_vacuous() {
        return Ok(Verdict { status: Status::Satisfying, witness: None, systems: 0, nodes: 0 });
    }
    let sizes: Vec<usize> = spec.thresholds().iter().map(|&v| v as usize + 1).collect();
    let relabel = if opts.symmetry { Relabelings::new(u) } else { None };
    let en = Enumeration { universe: u, sizes: sizes.clone(), search };

    const BATCH: usize = 64;
    let mut firsts =
        (0..u.size()).combinations(sizes[0]).filter(|c| relabel.as_ref().is_none_or(|r| r.is_canonical(c)));
    let start_nodes = meter.local();
    let mut systems = 0u64;
    loop {
        let batch: Vec<Vec<u64>> = firsts.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            break;
        }
        let best = AtomicUsize::new(usize::MAX);
        let results: Vec<ShardResult> = with_workers(opts.workers, || {
            batch
                .par_iter()
                .enumerate()
                .map(|(idx, first)| {
                    let mut shard_meter = meter.fork();
                    let mut shard_systems = 0u64;
                    let mut chosen = vec![first.clone()];
                    let cancel = || best.load(Ordering::Relaxed) < idx;
                    let outcome = if sizes.len() == 1 {
                        Ok(None)
                    } else {
                        en.descend(&mut chosen, &mut shard_meter, &mut shard_systems, &cancel)
                    };
                    match outcome {
                        Ok(None) => ShardResult::Clear { meter: shard_meter, systems: shard_systems },
                        Ok(Some(families)) => {
                            best.fetch_min(idx, Ordering::Relaxed);
                            ShardResult::Counterexample { meter: shard_meter, systems: shard_systems, families }
                        }
                        Err(true) => ShardResult::Exhausted,
                        Err(false) => ShardResult::Cancelled,
                    }
                })
                .collect()
        });
        for r in results {
            match r {
                ShardResult::Clear { meter: m, systems: s } => {
                    meter.absorb(&m);
                    systems += s;
                }
                ShardResult::Counterexample { meter: m, systems: s, families } => {
                    meter.absorb(&m);
                    systems += s;
                    let witness = en.system(&families).with_thresholds(spec.thresholds().to_vec())?;
                    return Ok(Verdict {
                        status: Status::NotSatisfying,
                        witness: Some(witness),
                        systems,
                        nodes: meter.local() - start_nodes,
                    });
                }
                ShardResult::Exhausted | ShardResult::Cancelled => {
                    return Ok(Verdict {
                        status: Status::Unknown,
                        witness: None,
                        systems,
                        nodes: meter.local() - start_nodes,
                    });
                }
            }
        }
    }
    Ok(Verdict { status: Status::Satisfying, witness: None, systems, nodes: meter.local() - start_nodes })
}

/// Checks that `witness` has sizes `f_i + 1` and, by exhaustive search, no
/// rainbow matching.
pub fn validate_witness(spec: &SequenceSpec, witness: &FamilySystem) -> Result<()> {
    if witness.universe() != spec.universe() || witness.s() != spec.s() {
        return Err(Error::invalid("witness shape does not match the sequence"));
    }
    for (i, (f, &t)) in witness.families().iter().zip(spec.thresholds()).enumerate() {
        if f.len() as u64 != t + 1 {
            return Err(Error::invalid(format!("family {} has size {}, expected {}", i + 1, f.len(), t + 1)));
        }
    }
    match crate::search::find_rainbow(witness, &SearchBudget::unlimited()) {
        SearchOutcome::NoneExists => Ok(()),
        SearchOutcome::Found(m) => Err(Error::invalid(format!("witness has a rainbow matching {:?}", m.picks))),
        SearchOutcome::BudgetExhausted => unreachable!("unlimited budget"),
    }
}

/// Tries `iterations` uniformly random systems with `|F_i| = f_i + 1`;
/// returns the first without a rainbow matching. Deterministic in `seed`.
pub fn falsify_random(spec: &SequenceSpec, seed: u64, iterations: u64) -> Option<FamilySystem> {
    if spec.is_vacuous() {
        return None;
    }
    let u = spec.universe();
    let mut rng = substream(seed, 0);
    let budget = SearchBudget::default();
    for _ in 0..iterations {
        let fams = spec.thresholds().iter().map(|&f| random_subset(u, f as usize + 1, &mut rng)).collect();
        let system = FamilySystem::new(u, fams).ok()?;
        if crate::search::find_rainbow(&system, &budget).is_none() {
            return system.with_thresholds(spec.thresholds().to_vec()).ok();
        }
    }
    None
}

fn random_subset<R: Rng + ?Sized>(u: Universe, amount: usize, rng: &mut R) -> Family {
    let picks = rand::seq::index::sample(rng, u.size() as usize, amount);
    Family::from_codes(u, picks.into_iter().map(|c| c as u64))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanStep {
    pub c: u64,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimalC {
    /// Smallest satisfying offset, `None` when the budget ran out first.
    pub c: Option<u64>,
    /// Counterexample for `c - 1` (absent when `c = 0`).
    pub witness_below: Option<FamilySystem>,
    pub scanned: Vec<ScanStep>,
    pub nodes: u64,
}

/// Scans `c = 0, 1, 2, ...` for the first satisfying `f_i = (i-1) n^(k-1) + c`.
/// Terminates by `c = n^k`, where every position is vacuous.
pub fn minimal_c_search(u: Universe, s: usize, budget: &SearchBudget, opts: &VerifyOptions) -> Result<MinimalC> {
    let mut meter = budget.meter();
    let mut scanned = Vec::new();
    let mut witness_below = None;
    for c in 0..=u.size() {
        let spec = SequenceSpec::arithmetic(u, s, c)?;
        let v = is_satisfying_metered(&spec, &mut meter, opts)?;
        scanned.push(ScanStep { c, status: v.status });
        match v.status {
            Status::Satisfying => {
                return Ok(MinimalC { c: Some(c), witness_below, scanned, nodes: meter.local() });
            }
            Status::NotSatisfying => witness_below = v.witness,
            Status::Unknown => {
                return Ok(MinimalC { c: None, witness_below, scanned, nodes: meter.local() });
            }
        }
    }
    unreachable!("c = n^k is vacuously satisfying")
}
