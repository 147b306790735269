//! Shifting (compression) and the structure of shifted, saturated systems.
//!
//! `S_{j,a,b}` moves every member with `j`-th coordinate `b` to the tuple
//! with `b` replaced by `a`, unless that tuple is already present. The
//! triangular schedule `S_{j,1,2}, S_{j,1,3}, ..., S_{j,n-1,n}` applied for
//! each `j` leaves every family closed under lowering any coordinate.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::budget::SearchBudget;
use crate::error::{Error, Result};
use crate::family::{Family, FamilySystem, Tuple, TupleMultiset, Universe};
use crate::search::{saturate_with, Backtrack, RainbowSearch, SearchOutcome};

/// Code offset of raising coordinate `j` by one.
fn stride(u: Universe, j: u32) -> u64 {
    (u.n() as u64).pow(u.k() - j)
}

/// `S_{j,a,b}(F)`.
pub fn shift_once(f: &Family, j: u32, a: u32, b: u32) -> Result<Family> {
    let u = f.universe();
    u.check_coord(j, a)?;
    u.check_coord(j, b)?;
    if a == b {
        return Err(Error::invalid(format!("shift needs a != b, got a = b = {a}")));
    }
    let step = stride(u, j);
    let mut out = f.clone();
    for t in f.iter() {
        if t.get(j) != b {
            continue;
        }
        let code = u.encode(&t);
        let target = if a < b { code - (b - a) as u64 * step } else { code + (a - b) as u64 * step };
        if !f.contains_code(target) {
            out.remove(&t);
            out.insert_code(target);
        }
    }
    Ok(out)
}

/// Applies `S_{j,a,b}` to every family.
pub fn shift_system(system: &FamilySystem, j: u32, a: u32, b: u32) -> Result<FamilySystem> {
    system.map_families(|f| shift_once(f, j, a, b))
}

/// The triangular schedule for each `j` in ascending order.
pub fn shift_schedule_family(f: &Family) -> Family {
    let u = f.universe();
    let mut cur = f.clone();
    for j in 1..=u.k() {
        for a in 1..u.n() {
            for b in a + 1..=u.n() {
                cur = shift_once(&cur, j, a, b).expect("schedule indices are in range");
            }
        }
    }
    cur
}

/// Applies [`shift_schedule_family`] to every family.
pub fn shift_schedule(system: &FamilySystem) -> FamilySystem {
    system.map_families(|f| Ok(shift_schedule_family(f))).expect("shifting preserves the universe")
}

/// Whether `f` is closed under lowering coordinate `j`.
pub fn is_compressed(f: &Family, j: u32) -> bool {
    let u = f.universe();
    let step = stride(u, j);
    // Closure under one-step lowering implies closure under every lowering.
    f.iter().all(|t| {
        let v = t.get(j);
        v == 1 || f.contains_code(u.encode(&t) - step)
    })
}

pub fn is_compressed_all(f: &Family) -> bool {
    (1..=f.universe().k()).all(|j| is_compressed(f, j))
}

/// The hyperplanes contained in a family and what they leave behind.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneCore {
    /// `T`: pairs `(j, a)` with `H_{j,a} ⊆ F`.
    pub t_set: BTreeSet<(u32, u32)>,
    /// `A`, the union of the hyperplanes in `T`.
    pub covered: Family,
    /// `F \ A`.
    pub leftover: Family,
    /// `B` with `A ⊕ B = ⊕_{(j,a) ∈ T} H_{j,a}`.
    pub b_multiset: TupleMultiset,
    /// `k^2 s^2 n^(k-2) / 2`.
    pub leftover_bound: f64,
}

pub fn hyperplane_core(f: &Family, s: usize) -> HyperplaneCore {
    let u = f.universe();
    let (n, k) = (u.n() as usize, u.k() as usize);
    let mut counts = vec![0u64; n * k];
    for t in f.iter() {
        for (j, a) in t.cells() {
            counts[(j as usize - 1) * n + a as usize - 1] += 1;
        }
    }
    let full = u.hyperplane_size();
    let t_set: BTreeSet<(u32, u32)> =
        (0..n * k).filter(|&idx| counts[idx] == full).map(|idx| ((idx / n) as u32 + 1, (idx % n) as u32 + 1)).collect();

    let mut covered = Family::empty(u);
    let mut leftover = Family::empty(u);
    let mut b_multiset = TupleMultiset::empty(u);
    for t in f.iter() {
        let hits = t.cells().filter(|cell| t_set.contains(cell)).count() as u64;
        let code = u.encode(&t);
        if hits == 0 {
            leftover.insert_code(code);
        } else {
            covered.insert_code(code);
            if hits > 1 {
                b_multiset.add_code(code, hits - 1);
            }
        }
    }
    let (kf, sf, nf) = (k as f64, s as f64, n as f64);
    HyperplaneCore { t_set, covered, leftover, b_multiset, leftover_bound: 0.5 * kf * kf * sf * sf * nf.powf(kf - 2.0) }
}

/// A member `F ∈ F_i` with `(j, a) ∈ F`, `a >= s`, whose replacement
/// `F \ {(j,a)} ∪ {(j,b)}` is missing from `F_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplacementViolation {
    /// 1-indexed family.
    pub family: usize,
    pub tuple: Tuple,
    pub coordinate: u32,
    pub missing: Tuple,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyDiagnostics {
    /// 1-indexed.
    pub family: usize,
    pub size: usize,
    pub t_set: Vec<(u32, u32)>,
    pub covered: usize,
    pub leftover: usize,
    pub b_total: u64,
    pub leftover_bound: f64,
    /// Leftover members with fewer than two coordinates in `[s-1]`.
    pub leftover_violations: Vec<Tuple>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowDegreeReport {
    pub s: usize,
    pub families: Vec<FamilyDiagnostics>,
    pub replacement_violations: Vec<ReplacementViolation>,
    pub total_violations: usize,
}

fn certify(system: &FamilySystem, budget: &SearchBudget) -> Result<()> {
    for (i, f) in system.families().iter().enumerate() {
        if let Some(j) = (1..=f.universe().k()).find(|&j| !is_compressed(f, j)) {
            return Err(Error::Refused(format!("family {} is not compressed in coordinate {j}", i + 1)));
        }
    }
    let mut meter = budget.meter();
    match Backtrack.search(system, &mut meter) {
        SearchOutcome::Found(_) => return Err(Error::Refused("system admits a rainbow matching".into())),
        SearchOutcome::BudgetExhausted => {
            return Err(Error::BudgetExhausted("could not certify the system has no rainbow matching".into()))
        }
        SearchOutcome::NoneExists => {}
    }
    let saturated = saturate_with(&Backtrack, system, &mut meter)?;
    if let Some(i) = (0..system.s()).find(|&i| saturated.family(i) != system.family(i)) {
        let extra = saturated.family(i).difference(system.family(i))?;
        let t = extra.iter().next().expect("saturation only adds tuples");
        return Err(Error::Refused(format!(
            "system is not saturated: {t} can be added to family {} without creating a rainbow matching",
            i + 1
        )));
    }
    Ok(())
}

/// Checks the replacement property of high coordinate values and the
/// two-small-coordinates property of the hyperplane leftover.
///
/// Both hold for compressed, saturated systems without rainbow matchings,
/// and only for those; anything else is refused.
pub fn check_low_degree(system: &FamilySystem, budget: &SearchBudget) -> Result<LowDegreeReport> {
    certify(system, budget)?;
    let u = system.universe();
    let s = system.s();
    let mut replacement_violations = Vec::new();
    let mut families = Vec::new();
    for (i, f) in system.families().iter().enumerate() {
        for t in f.iter() {
            for j in 1..=u.k() {
                if (t.get(j) as usize) < s {
                    continue;
                }
                for b in 1..=u.n() {
                    let r = t.with(j, b);
                    if !f.contains(&r) {
                        replacement_violations.push(ReplacementViolation {
                            family: i + 1,
                            tuple: t.clone(),
                            coordinate: j,
                            missing: r,
                        });
                    }
                }
            }
        }
        let core = hyperplane_core(f, s);
        let leftover_violations: Vec<Tuple> =
            core.leftover.iter().filter(|t| t.coords().iter().filter(|&&x| (x as usize) < s).count() < 2).collect();
        families.push(FamilyDiagnostics {
            family: i + 1,
            size: f.len(),
            t_set: core.t_set.iter().copied().collect(),
            covered: core.covered.len(),
            leftover: core.leftover.len(),
            b_total: core.b_multiset.total(),
            leftover_bound: core.leftover_bound,
            leftover_violations,
        });
    }
    let total_violations =
        replacement_violations.len() + families.iter().map(|d| d.leftover_violations.len()).sum::<usize>();
    Ok(LowDegreeReport { s, families, replacement_violations, total_violations })
}

/// Alternates the shift schedule and saturation until both are fixed.
///
/// Saturation only adds tuples and shifting preserves sizes, so this stops
/// after at most `s n^k` rounds.
pub fn normalize(system: &FamilySystem, budget: &SearchBudget) -> Result<FamilySystem> {
    let mut meter = budget.meter();
    let mut cur = system.clone();
    loop {
        let shifted = shift_schedule(&cur);
        let grown = saturate_with(&Backtrack, &shifted, &mut meter)?;
        if grown == shifted {
            return Ok(grown);
        }
        cur = grown;
    }
}
