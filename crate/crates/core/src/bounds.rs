//! Closed-form thresholds for arithmetic satisfying sequences.
//!
//! Every `log` is natural except where a base-2 logarithm is written
//! explicitly (`log2`).

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `max(C(sk-1, k), C(n, k) - C(n-s+1, k))`, the matching threshold for
/// `k`-uniform set families. Binomials with a negative top are zero.
pub fn t_bound(n: u64, s: u64, k: u64) -> BigUint {
    if s == 0 || k == 0 {
        return BigUint::zero();
    }
    let first = binomial(s * k - 1, k);
    let lower_top = (n + 1).checked_sub(s);
    let second = binomial(n, k) - lower_top.map_or_else(BigUint::zero, |m| binomial(m, k));
    first.max(second)
}

/// A bound value tagged with whether its hypothesis on `n` holds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub hypothesis_holds: bool,
    pub hypothesis: &'static str,
    /// Which argument of the inner `max` was attained, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<&'static str>,
}

/// Rows of the regime table for fixed `k`, classified by `θ = log s / log n`
/// with cut points `1/2` and `3/4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `s << n^(1/2)`: best upper bound `O(s^2 n^(k-2))`.
    SmallS,
    /// `n^(1/2) << s << n^(3/4)`: best upper bound `O(s n^(k-3/2) sqrt(log 2ks))`
    /// from either the shifting or the spread-approximation bound.
    MiddleS,
    /// `n^(3/4) << s << n`: best upper bound `O(s n^(k-3/2) sqrt(log 2ks))`
    /// from the shifting bound.
    LargeS,
    /// `s >= n`; outside the table.
    Outside,
}

impl Regime {
    pub fn classify(n: f64, s: f64) -> Regime {
        if s >= n || n <= 1.0 {
            return Regime::Outside;
        }
        let theta = s.ln() / n.ln();
        if theta < 0.5 {
            Regime::SmallS
        } else if theta < 0.75 {
            Regime::MiddleS
        } else {
            Regime::LargeS
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::SmallS => "s << n^(1/2)",
            Regime::MiddleS => "n^(1/2) << s << n^(3/4)",
            Regime::LargeS => "n^(3/4) << s << n",
            Regime::Outside => "s >= n (outside table)",
        }
    }

    pub fn best_upper_bound(&self) -> &'static str {
        match self {
            Regime::SmallS => "O_k(s^2 n^(k-2)) via c_thm12",
            Regime::MiddleS => "O_k(s n^(k-3/2) sqrt(log 2ks)) via c_thm13 or c_thm14",
            Regime::LargeS => "O_k(s n^(k-3/2) sqrt(log 2ks)) via c_thm13",
            Regime::Outside => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: u64,
    pub s: u64,
    pub k: u64,
    /// Exact, rendered as a decimal string.
    #[serde(serialize_with = "crate::bounds::as_decimal")]
    pub t_bound: BigUint,
    /// Spread-approximation bound `4 s^2 n^(k-2) + 2^15 s^3 log2(ks)^3 n^(k-3)`.
    pub c_thm12: BoundValue,
    /// Shifting bound `n^(k-1) + max(k^2 s n^(k-3/2) sqrt(8 log 2ks), 8k n^(k-1) log 2ks)`.
    pub c_thm13: BoundValue,
    /// `k`-free bound `n^(k-1) + max(14 s n^(k-3/2) sqrt(log 2ks), 8k n^(k-1) log 2ks)
    /// + 2^15 s^3 log2(ks)^3 n^(k-3)`.
    pub c_thm14: BoundValue,
    /// `u = s sqrt(log(ks) / n)`.
    pub u: BoundValue,
    /// `r = 2^5 s log2(sk)`, the spread parameter.
    pub spread_r: f64,
    pub regime: Regime,
    pub regime_label: &'static str,
    pub best_upper_bound: &'static str,
    pub log_convention: &'static str,
}

pub(crate) fn as_decimal<S: serde::Serializer>(v: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&v.to_string())
}

fn spread_term(n: f64, s: f64, k: f64) -> f64 {
    32768.0 * s.powi(3) * (k * s).log2().powi(3) * n.powf(k - 3.0)
}

pub fn spread_r(s: u64, k: u64) -> f64 {
    32.0 * s as f64 * ((s * k) as f64).log2()
}

pub fn threshold_report(n: u64, s: u64, k: u64) -> BoundReport {
    let (nf, sf, kf) = (n as f64, s as f64, k as f64);
    let log2ks = (2.0 * kf * sf).ln();
    let r = spread_r(s, k);
    let spread_hyp = nf > r;

    let c12 = 4.0 * sf * sf * nf.powf(kf - 2.0) + spread_term(nf, sf, kf);

    let sqrt13 = kf * kf * sf * nf.powf(kf - 1.5) * (8.0 * log2ks).sqrt();
    let log_branch = 8.0 * kf * nf.powf(kf - 1.0) * log2ks;
    let c13 = nf.powf(kf - 1.0) + sqrt13.max(log_branch);

    let sqrt14 = 14.0 * sf * nf.powf(kf - 1.5) * log2ks.sqrt();
    let c14 = nf.powf(kf - 1.0) + sqrt14.max(log_branch) + spread_term(nf, sf, kf);

    let branch = |sq: f64| if sq >= log_branch { "sqrt" } else { "log" };
    let regime = Regime::classify(nf, sf);
    BoundReport {
        n,
        s,
        k,
        t_bound: t_bound(n, s, k),
        c_thm12: BoundValue {
            value: c12,
            hypothesis_holds: spread_hyp,
            hypothesis: "n > 2^5 s log2(sk)",
            branch: None,
        },
        c_thm13: BoundValue { value: c13, hypothesis_holds: n > s, hypothesis: "n > s", branch: Some(branch(sqrt13)) },
        c_thm14: BoundValue {
            value: c14,
            hypothesis_holds: spread_hyp && n > s,
            hypothesis: "n > max(2^5 s log2(sk), s)",
            branch: Some(branch(sqrt14)),
        },
        u: BoundValue {
            value: sf * ((kf * sf).ln() / nf).sqrt(),
            hypothesis_holds: spread_hyp && n > s,
            hypothesis: "n > max(2^5 s log2(sk), s)",
            branch: None,
        },
        spread_r: r,
        regime,
        regime_label: regime.label(),
        best_upper_bound: regime.best_upper_bound(),
        log_convention: "log is natural; log2 is base 2",
    }
}
