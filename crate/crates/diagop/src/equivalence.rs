//! Equivalence relations on diagonal operators at desk scale.
//!
//! - unitary-modulo-compact matching via optimal bottleneck permutations,
//!   with a per-block certificate for the compactness of the residual;
//! - the accumulation-set hypotheses under which a vanishing-gap permutation
//!   exists at all;
//! - resolvent-modulo-compact equivalence decided by the essential spectrum
//!   plus boundedness bit;
//! - relative compactness of a co-diagonal perturbation;
//! - the lower bound that obstructs unitary-modulo-compact equivalence
//!   inside the `B_t` family.

use serde::Serialize;

use crate::matching::{bottleneck_match, PermutationPlan, TailRule};
use crate::operator::OperatorSpec;
use crate::sets::ClosedSetApprox;
use crate::spectra::sigma_bar;
use crate::DiagopError;

/// Per-dyadic-block sups of the matched gap sequence `c_n = b_n - a_{π(n)}`.
#[derive(Debug, Clone, Serialize)]
pub struct CompactCertificate {
    /// `c_n` for `n = 1..N`.
    pub diag_entries: Vec<f64>,
    /// `sup |c_n|` over blocks `[2^j, 2^{j+1})`.
    pub tail_sup_by_block: Vec<f64>,
    pub verdict: CompactVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompactVerdict {
    /// Block sups are non-increasing past block 3 and the last block has
    /// shed at least half of the first positive block; at this horizon the
    /// residual looks compact.
    DecreasingToZeroOnHorizon,
    NotDecreasing,
}

const BLOCK_TOL: f64 = 1e-12;

fn dyadic_block_sups(entries: &[f64]) -> Vec<f64> {
    let n = entries.len() as u64;
    let mut sups = Vec::new();
    let mut lo = 1u64;
    while lo <= n {
        let hi = (2 * lo - 1).min(n);
        let sup = (lo..=hi)
            .map(|i| entries[i as usize - 1].abs())
            .fold(0.0, f64::max);
        sups.push(sup);
        lo *= 2;
    }
    sups
}

fn classify_blocks(sups: &[f64]) -> CompactVerdict {
    let non_increasing = sups
        .iter()
        .skip(3)
        .zip(sups.iter().skip(4))
        .all(|(prev, next)| *next <= *prev + BLOCK_TOL);
    let last = sups.last().copied().unwrap_or(0.0);
    let first_positive = sups.iter().copied().find(|s| *s > BLOCK_TOL);
    let shrunk = match first_positive {
        None => true, // all blocks vanish
        Some(fp) => last <= BLOCK_TOL || last <= 0.5 * fp,
    };
    if non_increasing && shrunk {
        CompactVerdict::DecreasingToZeroOnHorizon
    } else {
        CompactVerdict::NotDecreasing
    }
}

impl CompactCertificate {
    pub fn from_entries(entries: Vec<f64>) -> Self {
        let sups = dyadic_block_sups(&entries);
        let verdict = classify_blocks(&sups);
        CompactCertificate { diag_entries: entries, tail_sup_by_block: sups, verdict }
    }
}

/// Matches the first `N` eigenvalues of two co-diagonal operators by an
/// optimal bottleneck permutation and certifies how the matched gaps decay
/// across dyadic blocks. Decaying block sups are the finite-horizon evidence
/// that `B - uAu*` is compact.
pub fn wvn_construct(
    a: &OperatorSpec,
    b: &OperatorSpec,
    n: u64,
) -> Result<(PermutationPlan, CompactCertificate), DiagopError> {
    a.check_codiagonal(b)?;
    let av: Vec<f64> = (1..=n).map(|i| a.eval(i)).collect();
    let bv: Vec<f64> = (1..=n).map(|i| b.eval(i)).collect();
    let mut plan = bottleneck_match(&av, &bv)?;
    plan.tail_rule = TailRule::Identity;
    let entries: Vec<f64> = plan
        .mapping
        .iter()
        .enumerate()
        .map(|(pos, &j)| bv[pos] - av[j])
        .collect();
    Ok((plan, CompactCertificate::from_entries(entries)))
}

/// Whether a vanishing-gap permutation between the two eigenvalue sequences
/// can exist at all: equal declared accumulation sets and, on both sides,
/// only finitely many terms outside them.
pub fn accumulation_match_feasible(a: &OperatorSpec, b: &OperatorSpec) -> bool {
    let tol = 1e-9;
    a.seq.meta.accumulation.approx_eq(&b.seq.meta.accumulation, tol)
        && a.seq.meta.finitely_many_isolated
        && b.seq.meta.finitely_many_isolated
}

/// Unitary-equivalence-modulo-compact-resolvent-difference, decided by the
/// complete invariant: essential spectrum (at resolution) plus the
/// boundedness bit.
pub fn ucres_equivalent(
    a: &OperatorSpec,
    b: &OperatorSpec,
    window: (f64, f64),
    horizon: u64,
    resolution: f64,
) -> Result<bool, DiagopError> {
    let sa = sigma_bar(a, window, horizon, resolution)?;
    let sb = sigma_bar(b, window, horizon, resolution)?;
    Ok(sa.unbounded_bit == sb.unbounded_bit && sa.ess.approx_eq(&sb.ess, resolution))
}

/// Report of the relative-compactness check of `K` against `A`.
#[derive(Debug, Clone, Serialize)]
pub struct RelCompactReport {
    pub compact: bool,
    /// `sup_n |κ_n / (a_n - i)|` over the horizon and its argmax.
    pub max_gamma: f64,
    pub argmax: u64,
    /// ε-clustered set of the sampled `|γ_n|`.
    pub gamma_set: ClosedSetApprox,
    /// Dyadic block sups of `|γ_n|`.
    pub block_sups: Vec<f64>,
    /// Every cluster of 50 or more samples sits within 1e-2 of zero: the
    /// sampled `|γ_n|` accumulate only at 0.
    pub clusters_only_near_zero: bool,
}

/// Checks whether the co-diagonal symmetric perturbation `K` is relatively
/// `A`-compact, i.e. `K (A - i)^{-1}` compact. For diagonal data this means
/// `γ_n = κ_n / (a_n - i) → 0`; at desk scale the verdict is sampled
/// evidence: the `|γ_n|` may cluster only near zero and their dyadic block
/// sups must shrink across the horizon. `K` must be bounded by metadata.
pub fn relatively_compact_check(
    k: &OperatorSpec,
    a: &OperatorSpec,
    horizon: u64,
    resolution: f64,
) -> Result<RelCompactReport, DiagopError> {
    k.check_codiagonal(a)?;
    let gammas: Vec<f64> = (1..=horizon)
        .map(|n| {
            let kn = k.eval(n);
            let an = a.eval(n);
            kn.abs() / (an * an + 1.0).sqrt()
        })
        .collect();
    let (mut max_gamma, mut argmax) = (0.0f64, 1u64);
    for (i, g) in gammas.iter().enumerate() {
        if *g > max_gamma {
            max_gamma = *g;
            argmax = i as u64 + 1;
        }
    }
    let gamma_set = ClosedSetApprox::from_samples((0.0, max_gamma + 1.0), &gammas, resolution);
    let block_sups = dyadic_block_sups(&gammas);

    let delta = 1e-2;
    // Clusters of at least 50 samples must sit near 0.
    let clusters_near_zero = {
        let mut sorted = gammas.clone();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut ok = true;
        let mut i = 0;
        while i < sorted.len() {
            let start = i;
            while i + 1 < sorted.len() && sorted[i + 1] - sorted[i] <= resolution {
                i += 1;
            }
            if i - start + 1 >= 50 && sorted[i] > delta {
                ok = false;
                break;
            }
            i += 1;
        }
        ok
    };
    let tail_shrinks = {
        let non_increasing_tail = block_sups
            .iter()
            .rev()
            .take(4)
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| *w[0] <= *w[1] + BLOCK_TOL);
        let last = block_sups.last().copied().unwrap_or(0.0);
        non_increasing_tail && (last <= delta || last < max_gamma - BLOCK_TOL)
    };
    let k_bounded = k.seq.meta.bounded();
    let compact = clusters_near_zero && tail_shrinks && k_bounded;
    Ok(RelCompactReport {
        compact,
        max_gamma,
        argmax,
        gamma_set,
        block_sups,
        clusters_only_near_zero: clusters_near_zero,
    })
}

/// Minimum of `a(k, l, m) = |k - l + t/3 - s/(m+2)|` over the grid
/// `1 ≤ k ≤ k_max`, `1 ≤ l ≤ l_max`, `1 ≤ m ≤ m_max`.
///
/// The minimum is bounded below by `(t - s)/3` for `0 ≤ s < t ≤ 1`; it is
/// attained on the diagonal `k = l` (at `m = 1` the bound is exact), which
/// is what forbids `u B_t u* + K = B_s`.
pub fn b_t_obstruction(
    s: f64,
    t: f64,
    k_max: u32,
    l_max: u32,
    m_max: u32,
) -> Result<f64, DiagopError> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) || s >= t {
        return Err(DiagopError::ParamRange(format!(
            "need 0 <= s < t <= 1, got s = {s}, t = {t}"
        )));
    }
    if k_max == 0 || l_max == 0 || m_max == 0 {
        return Err(DiagopError::ParamRange("grid bounds must be >= 1".into()));
    }
    let mut min = f64::INFINITY;
    for k in 1..=k_max as i64 {
        for l in 1..=l_max as i64 {
            let base = (k - l) as f64 + t / 3.0;
            for m in 1..=m_max as u64 {
                let v = (base - s / (m as f64 + 2.0)).abs();
                if v < min {
                    min = v;
                }
            }
        }
    }
    Ok(min)
}
