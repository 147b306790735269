//! Uniform random perfect matchings of `[n]^k` and Monte Carlo checks of
//! the tail bound for `|G ∩ M|`.
//!
//! A perfect matching is `n` pairwise disjoint tuples covering every cell
//! `(j, a)`. Fixing the first coordinate of member `i` to `i` turns it into
//! `k - 1` independent permutations of `[n]`, a bijection onto all
//! `(n!)^(k-1)` perfect matchings; sampling draws each permutation with an
//! unbiased shuffle.

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::family::{Family, Tuple, TupleMultiset, TupleWeights, Universe};
use crate::parallel::with_workers;

/// Samples per RNG substream. Substream `c` covers samples
/// `c * CHUNK .. (c + 1) * CHUNK`, so results do not depend on the worker
/// count.
pub const CHUNK: usize = 4096;

/// The RNG for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectMatching {
    universe: Universe,
    /// `perms[p][i - 1]` is coordinate `p + 2` of member `i`.
    perms: Vec<Vec<u32>>,
}

impl PerfectMatching {
    pub fn new(universe: Universe, perms: Vec<Vec<u32>>) -> Result<Self> {
        let n = universe.n() as usize;
        if perms.len() + 1 != universe.k() as usize {
            return Err(Error::invalid(format!("need k-1 = {} permutations, got {}", universe.k() - 1, perms.len())));
        }
        for p in &perms {
            let mut seen = vec![false; n];
            if p.len() != n {
                return Err(Error::invalid(format!("permutation of length {} over [{n}]", p.len())));
            }
            for &v in p {
                if v == 0 || v as usize > n || std::mem::replace(&mut seen[v as usize - 1], true) {
                    return Err(Error::invalid(format!("{p:?} is not a permutation of [{n}]")));
                }
            }
        }
        Ok(PerfectMatching { universe, perms })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn perms(&self) -> &[Vec<u32>] {
        &self.perms
    }

    /// Member `i` (1-indexed).
    pub fn member(&self, i: u32) -> Tuple {
        let mut coords = Vec::with_capacity(self.universe.k() as usize);
        coords.push(i);
        coords.extend(self.perms.iter().map(|p| p[(i - 1) as usize]));
        Tuple(coords)
    }

    pub fn members(&self) -> Vec<Tuple> {
        (1..=self.universe.n()).map(|i| self.member(i)).collect()
    }

    fn member_code(&self, i: usize) -> u64 {
        let n = self.universe.n() as u64;
        self.perms.iter().fold(i as u64, |acc, p| acc * n + (p[i] - 1) as u64)
    }

    /// Checks the structural invariant: `n` pairwise disjoint members that
    /// cover every cell exactly once.
    pub fn check(&self) -> Result<()> {
        let (n, k) = (self.universe.n() as usize, self.universe.k() as usize);
        let members = self.members();
        let mut covered = vec![vec![false; n]; k];
        for t in &members {
            for (j, a) in t.cells() {
                let slot = &mut covered[j as usize - 1][a as usize - 1];
                if *slot {
                    return Err(Error::invalid(format!("cell ({j},{a}) covered twice")));
                }
                *slot = true;
            }
        }
        if covered.iter().flatten().all(|&c| c) {
            Ok(())
        } else {
            Err(Error::invalid("some cell is uncovered"))
        }
    }

    /// Index of this matching in `0 .. (n!)^(k-1)`, from the Lehmer codes of
    /// its permutations. `None` when the count overflows `u64`.
    pub fn rank(&self) -> Option<u64> {
        let n = self.universe.n() as usize;
        let fact = (1..=n as u64).try_fold(1u64, |acc, v| acc.checked_mul(v))?;
        self.perms.iter().try_fold(0u64, |acc, p| {
            let mut r = 0u64;
            for i in 0..n {
                let smaller_after = p[i + 1..].iter().filter(|&&v| v < p[i]).count() as u64;
                r = r * (n - i) as u64 + smaller_after;
            }
            acc.checked_mul(fact)?.checked_add(r)
        })
    }
}

pub fn sample_matching<R: Rng + ?Sized>(universe: Universe, rng: &mut R) -> PerfectMatching {
    let n = universe.n();
    let perms = (1..universe.k())
        .map(|_| {
            let mut p: Vec<u32> = (1..=n).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    PerfectMatching { universe, perms }
}

/// `|G ∩ M|` counted with the multiplicities of `g`.
pub fn intersect_count(m: &PerfectMatching, g: &dyn TupleWeights) -> Result<u64> {
    crate::family::same_universe(m.universe, g.universe())?;
    Ok((0..m.universe.n() as usize).map(|i| g.weight_of_code(m.member_code(i))).sum())
}

/// `(n!)^(k-1)`.
pub fn matching_count(n: u32, k: u32) -> BigUint {
    let fact = (1..=n).fold(BigUint::one(), |acc, v| acc * v);
    num_traits::pow(fact, (k - 1) as usize)
}

/// Parameters of the tail bound for `|G ∩ M|` with `|G| = alpha n^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcentrationParams {
    pub alpha: f64,
    pub lambda: f64,
    pub m: f64,
    pub t: u64,
}

impl ConcentrationParams {
    pub fn tail_bound(&self, n: u32) -> f64 {
        tail_bound(self.alpha, n, self.lambda)
    }
}

/// `2 exp(-λ² / (αn/2 + 2λ))`, bounding each of
/// `P(|G ∩ M| >= αn + 2λ)` and `P(|G ∩ M| <= αn - 2λ)`.
pub fn tail_bound(alpha: f64, n: u32, lambda: f64) -> f64 {
    2.0 * (-(lambda * lambda) / (alpha * n as f64 / 2.0 + 2.0 * lambda)).exp()
}

/// Deviation `max(2 sqrt(|G| log(2m) / n^(k-1)), 8 log(2m))` exceeded with
/// probability below `1/m`, natural logarithms throughout.
pub fn set_deviation(g_size: f64, n: u32, k: u32, m: f64) -> f64 {
    multiset_deviation(g_size, n, k, m, 1)
}

/// The multiset form: multiplicities at most `t`,
/// `max(2t sqrt(|G| log(2tm) / n^(k-1)), 8t log(2tm))`.
pub fn multiset_deviation(g_size: f64, n: u32, k: u32, m: f64, t: u64) -> f64 {
    let t = t as f64;
    let log = (2.0 * t * m).ln();
    let scale = (n as f64).powi(k as i32 - 1);
    f64::max(2.0 * t * (g_size * log / scale).sqrt(), 8.0 * t * log)
}

/// Which argument of the deviation `max` is attained.
pub fn deviation_branch(g_size: f64, n: u32, k: u32, m: f64, t: u64) -> &'static str {
    let tf = t as f64;
    let log = (2.0 * tf * m).ln();
    let scale = (n as f64).powi(k as i32 - 1);
    if 2.0 * tf * (g_size * log / scale).sqrt() >= 8.0 * tf * log {
        "sqrt"
    } else {
        "log"
    }
}

/// Splitting a multiset into its `t` layers and union-bounding the set form
/// over the layers (each with `m` replaced by `tm`).
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct LayerCheck {
    pub t: u64,
    pub layer_sizes: Vec<u64>,
    pub total: u64,
    pub summed_layer_deviation: f64,
    pub multiset_deviation: f64,
    pub holds: bool,
}

pub fn layer_check(g: &TupleMultiset, m: f64) -> LayerCheck {
    let u = g.universe();
    let layers = g.layers();
    let t = layers.len() as u64;
    let layer_sizes: Vec<u64> = layers.iter().map(|l| l.len() as u64).collect();
    let summed: f64 = layer_sizes.iter().map(|&sz| set_deviation(sz as f64, u.n(), u.k(), m * t as f64)).sum();
    let bound = if t == 0 { 0.0 } else { multiset_deviation(g.total() as f64, u.n(), u.k(), m, t) };
    LayerCheck {
        t,
        total: layer_sizes.iter().sum(),
        layer_sizes,
        summed_layer_deviation: summed,
        multiset_deviation: bound,
        holds: summed <= bound * (1.0 + 1e-12) && g.total() == g.layers().iter().map(|l| l.len() as u64).sum(),
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TailRow {
    pub lambda: f64,
    pub deviation: f64,
    pub upper_emp: f64,
    pub upper_se: f64,
    pub lower_emp: f64,
    pub lower_se: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TailReport {
    pub n: u32,
    pub k: u32,
    pub g_size: u64,
    pub alpha: f64,
    /// `αn`, the mean of `|G ∩ M|`.
    pub expected_count: f64,
    pub empirical_mean: f64,
    pub count_min: u64,
    pub count_max: u64,
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<TailRow>,
}

pub const CSV_HEADER: &str = "lambda,deviation,upper_emp,upper_se,lower_emp,lower_se,bound,samples,seed";

/// Formats a real to 6 significant digits, shortest form.
pub fn sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

impl TailReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let vals = [r.lambda, r.deviation, r.upper_emp, r.upper_se, r.lower_emp, r.lower_se, r.bound];
            let cells: Vec<String> = vals.iter().map(|v| sig6(*v).to_string()).collect();
            out.push_str(&format!("{},{},{}\n", cells.join(","), self.samples, self.seed));
        }
        out
    }

    /// True iff every empirical tail is within `bound + sigmas * SE`.
    pub fn within_bound(&self, sigmas: f64) -> bool {
        self.rows
            .iter()
            .all(|r| r.upper_emp <= r.bound + sigmas * r.upper_se && r.lower_emp <= r.bound + sigmas * r.lower_se)
    }
}

/// Histogram of `|G ∩ M|` over `samples` matchings drawn from the chunked
/// substreams of `seed`.
pub fn count_histogram(g: &dyn TupleWeights, samples: u64, seed: u64, workers: usize) -> Vec<u64> {
    let u = g.universe();
    let dense: Option<Vec<u32>> = (u.size() <= 1 << 24).then(|| {
        let mut table = vec![0u32; u.size() as usize];
        for (c, w) in g.weighted_codes() {
            table[c as usize] = w as u32;
        }
        table
    });
    let chunks = (samples as usize).div_ceil(CHUNK);
    let partials: Vec<Vec<u64>> = with_workers(workers, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = substream(seed, c as u64);
                let here = CHUNK.min(samples as usize - c * CHUNK);
                let mut hist = Vec::new();
                for _ in 0..here {
                    let m = sample_matching(u, &mut rng);
                    let count: u64 = (0..u.n() as usize)
                        .map(|i| {
                            let code = m.member_code(i);
                            match &dense {
                                Some(t) => t[code as usize] as u64,
                                None => g.weight_of_code(code),
                            }
                        })
                        .sum();
                    if hist.len() <= count as usize {
                        hist.resize(count as usize + 1, 0);
                    }
                    hist[count as usize] += 1;
                }
                hist
            })
            .collect()
    });
    let mut hist = Vec::new();
    for p in partials {
        if hist.len() < p.len() {
            hist.resize(p.len(), 0);
        }
        for (h, v) in hist.iter_mut().zip(p) {
            *h += v;
        }
    }
    hist
}

/// Empirical upper and lower tails of `|G ∩ M|` at deviations `2λ`, each
/// paired with the proven bound.
pub fn mc_tail(g: &dyn TupleWeights, samples: u64, lambdas: &[f64], seed: u64, workers: usize) -> Result<TailReport> {
    if samples == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    if let Some(bad) = lambdas.iter().find(|l| l.is_nan() || **l <= 0.0) {
        return Err(Error::invalid(format!("lambda must be positive, got {bad}")));
    }
    let u = g.universe();
    let g_size = g.total_weight();
    let alpha = g_size as f64 / u.size() as f64;
    let expected = g_size as f64 / u.hyperplane_size() as f64;
    let hist = count_histogram(g, samples, seed, workers);
    let total = samples as f64;
    let freq = |pred: &dyn Fn(f64) -> bool| -> f64 {
        hist.iter().enumerate().filter(|(c, _)| pred(*c as f64)).map(|(_, &v)| v).sum::<u64>() as f64 / total
    };
    let se = |p: f64| (p * (1.0 - p) / total).sqrt();
    let rows = lambdas
        .iter()
        .map(|&lambda| {
            let upper = freq(&|c| c >= expected + 2.0 * lambda);
            let lower = freq(&|c| c <= expected - 2.0 * lambda);
            TailRow {
                lambda,
                deviation: 2.0 * lambda,
                upper_emp: upper,
                upper_se: se(upper),
                lower_emp: lower,
                lower_se: se(lower),
                bound: tail_bound(alpha, u.n(), lambda),
            }
        })
        .collect();
    let mean = hist.iter().enumerate().map(|(c, &v)| c as f64 * v as f64).sum::<f64>() / total;
    Ok(TailReport {
        n: u.n(),
        k: u.k(),
        g_size,
        alpha,
        expected_count: expected,
        empirical_mean: mean,
        count_min: hist.iter().position(|&v| v > 0).unwrap_or(0) as u64,
        count_max: hist.iter().rposition(|&v| v > 0).unwrap_or(0) as u64,
        samples,
        seed,
        rows,
    })
}

/// A uniformly random family of `round(alpha n^k)` tuples.
pub fn random_family<R: Rng + ?Sized>(universe: Universe, alpha: f64, rng: &mut R) -> Result<Family> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0,1], got {alpha}")));
    }
    let size = universe.size();
    if size > usize::MAX as u64 {
        return Err(Error::invalid("universe too large to sample from"));
    }
    let amount = (alpha * size as f64).round() as usize;
    let picks = rand::seq::index::sample(rng, size as usize, amount);
    Ok(Family::from_codes(universe, picks.into_iter().map(|c| c as u64)))
}

/// Chi-square goodness of fit of sampled matchings against the uniform
/// distribution on all `(n!)^(k-1)` perfect matchings.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct UniformityReport {
    pub classes: u64,
    pub samples: u64,
    pub seed: u64,
    pub observed: Vec<u64>,
    pub chi_square: f64,
    pub dof: u64,
    pub p_value: f64,
}

pub const MAX_UNIFORMITY_CLASSES: u64 = 1 << 20;

pub fn uniformity_test(universe: Universe, samples: u64, seed: u64, workers: usize) -> Result<UniformityReport> {
    let classes = matching_count(universe.n(), universe.k());
    let classes: u64 = classes
        .try_into()
        .ok()
        .filter(|&c| c <= MAX_UNIFORMITY_CLASSES)
        .ok_or_else(|| Error::invalid(format!("(n!)^(k-1) for {universe} is too large to tabulate")))?;
    if classes < 2 {
        return Err(Error::invalid("only one perfect matching exists; nothing to test"));
    }
    if samples == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    let chunks = (samples as usize).div_ceil(CHUNK);
    let partials: Vec<Vec<u64>> = with_workers(workers, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = substream(seed, c as u64);
                let mut obs = vec![0u64; classes as usize];
                for _ in 0..CHUNK.min(samples as usize - c * CHUNK) {
                    let m = sample_matching(universe, &mut rng);
                    obs[m.rank().expect("rank fits") as usize] += 1;
                }
                obs
            })
            .collect()
    });
    let mut observed = vec![0u64; classes as usize];
    for p in partials {
        for (o, v) in observed.iter_mut().zip(p) {
            *o += v;
        }
    }
    let expected = samples as f64 / classes as f64;
    let chi_square: f64 = observed.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let dof = classes - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(UniformityReport { classes, samples, seed, observed, chi_square, dof, p_value: dist.sf(chi_square) })
}
