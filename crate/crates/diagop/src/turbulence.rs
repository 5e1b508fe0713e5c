//! Local orbit walks by small compact steps.
//!
//! Two constructions:
//!
//! - [`orbit_walk_unbounded`]: between two operators with empty essential
//!   spectrum, unbounded on both sides. After pairing indices sign class by
//!   sign class (so paired products are never negative), a cutoff `N` is
//!   chosen with the tail resolvent gap below `δ`; the finite-rank step `K`
//!   carries `(b̃_n - a_n)/L` on the slots past `N`, and the `L`-step chain
//!   `A, A + K, …, A + LK` stays inside the `δ`-ball because the segment
//!   from `a_n` to `b̃_n` never crosses the resolvent singularity when
//!   `a_n b̃_n ≥ 0`.
//! - [`orbit_walk_compact_at_zero`]: from the zero operator toward a
//!   finite-rank diagonal `B` in `N = ⌈‖B‖/r⌉ + 1` equal steps `(1/N)B`;
//!   per-probe distances grow monotonically in the step count and are
//!   bounded by the distance of `B` itself.
//!
//! Walk verification deliberately re-derives every distance through complex
//! arithmetic rather than through the closed forms used by the builders.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::matching::{PermutationPlan, TailRule};
use crate::metrics::{resolvent_gap, TailCertificate};
use crate::operator::OperatorSpec;
use crate::DiagopError;

/// Sign partition of the sampled indices.
#[derive(Debug, Clone, Serialize)]
pub struct SignPartition {
    /// Indices with `a_n ≥ 0`.
    pub nonneg: Vec<u64>,
    /// Indices with `a_n < 0`.
    pub neg: Vec<u64>,
    /// Both classes are infinite according to the declared metadata
    /// (sequence unbounded above and below).
    pub both_infinite_by_meta: bool,
}

pub fn sign_partition(a: &OperatorSpec, horizon: u64) -> SignPartition {
    let mut nonneg = Vec::new();
    let mut neg = Vec::new();
    for n in 1..=horizon {
        if a.eval(n) >= 0.0 {
            nonneg.push(n);
        } else {
            neg.push(n);
        }
    }
    let both_infinite_by_meta = !a.seq.meta.bounded_above && !a.seq.meta.bounded_below;
    SignPartition { nonneg, neg, both_infinite_by_meta }
}

/// Pairing of indices of `A` with indices of `B`, sign class by sign class.
#[derive(Debug, Clone, Serialize)]
pub struct SignMatch {
    /// `(slot in A, index in B)`, sorted by slot; paired values satisfy
    /// `a_slot · b_index ≥ 0`.
    pub pairs: Vec<(u64, u64)>,
    /// Some sign class ran out before the horizon; `pairs` covers the
    /// balanced part only.
    pub truncated: bool,
}

impl SignMatch {
    /// The permuted eigenvalue `b̃` keyed by the slot in `A`'s numbering.
    pub fn btilde(&self, b: &OperatorSpec) -> BTreeMap<u64, f64> {
        self.pairs.iter().map(|&(slot, bi)| (slot, b.eval(bi))).collect()
    }

    /// The pairing as a permutation of `1..=horizon` when it is balanced.
    pub fn to_plan(&self, a: &OperatorSpec, b: &OperatorSpec, horizon: u64) -> PermutationPlan {
        let mut mapping = vec![usize::MAX; horizon as usize];
        for &(slot, bi) in &self.pairs {
            mapping[slot as usize - 1] = bi as usize - 1;
        }
        // Imbalanced leftovers pair up in index order, keeping a bijection.
        let mut spare_b: Vec<usize> = {
            let mut used = vec![false; horizon as usize];
            for &(_, bi) in &self.pairs {
                used[bi as usize - 1] = true;
            }
            (0..horizon as usize).filter(|&i| !used[i]).collect()
        };
        spare_b.reverse();
        for slot in mapping.iter_mut() {
            if *slot == usize::MAX {
                *slot = spare_b.pop().expect("spare indices cover unpaired slots");
            }
        }
        let av: Vec<f64> = (1..=horizon).map(|n| a.eval(n)).collect();
        let bv: Vec<f64> = (1..=horizon).map(|n| b.eval(n)).collect();
        // Cost convention: position n of the A-side pairs eigenvalue
        // b[mapping[n]].
        let cost = mapping
            .iter()
            .enumerate()
            .map(|(slot, &bi)| (av[slot] - bv[bi]).abs())
            .fold(0.0, f64::max);
        PermutationPlan {
            size: horizon as usize,
            mapping,
            bottleneck_cost: cost,
            tail_rule: TailRule::SignBlock,
        }
    }
}

/// Pairs the k-th nonnegative index of `A` with the k-th nonnegative index
/// of `B`, and likewise for the negative classes.
pub fn sign_matched_permutation(
    a: &OperatorSpec,
    b: &OperatorSpec,
    horizon: u64,
) -> Result<SignMatch, DiagopError> {
    a.check_codiagonal(b)?;
    let pa = sign_partition(a, horizon);
    let pb = sign_partition(b, horizon);
    if pa.nonneg.is_empty() || pa.neg.is_empty() || pb.nonneg.is_empty() || pb.neg.is_empty() {
        return Err(DiagopError::ParamRange(
            "sign-matched pairing needs both sign classes nonempty on both sides".into(),
        ));
    }
    let mut pairs: Vec<(u64, u64)> = pa
        .nonneg
        .iter()
        .zip(&pb.nonneg)
        .map(|(&s, &t)| (s, t))
        .chain(pa.neg.iter().zip(&pb.neg).map(|(&s, &t)| (s, t)))
        .collect();
    pairs.sort_unstable();
    let truncated =
        pa.nonneg.len() != pb.nonneg.len() || pa.neg.len() != pb.neg.len();
    Ok(SignMatch { pairs, truncated })
}

/// One group step: a finite-rank diagonal perturbation.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct WalkStep {
    pub shifts: Vec<ShiftEntry>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShiftEntry {
    pub idx: u64,
    pub shift: f64,
}

/// A finite chain of small compact steps staying inside a resolvent ball.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitWalk {
    #[serde(rename = "base")]
    pub base_label: String,
    #[serde(rename = "target")]
    pub target_label: String,
    pub steps: Vec<WalkStep>,
    /// Distance from the base after each step.
    #[serde(rename = "distances")]
    pub per_step_distance: Vec<f64>,
    pub delta: f64,
    #[serde(rename = "r")]
    pub step_norm_bound: f64,
    /// Cutoff below which the walk never touches the operator.
    pub start_index: u64,
    pub tail: TailCertificate,
}

fn walk_distance_closed_form(base: &[(u64, f64)], shifts: &BTreeMap<u64, f64>) -> f64 {
    base.iter()
        .map(|&(n, a)| resolvent_gap(a + shifts.get(&n).copied().unwrap_or(0.0), a))
        .fold(0.0, f64::max)
}

/// Builds the unbounded-operator walk from `A` toward the sign-matched
/// permutation of `B`, with `δ`-ball radius `delta` and step-norm bound `r`.
pub fn orbit_walk_unbounded(
    a: &OperatorSpec,
    b: &OperatorSpec,
    delta: f64,
    r: f64,
    horizon: u64,
) -> Result<OrbitWalk, DiagopError> {
    a.check_codiagonal(b)?;
    if delta <= 0.0 || r <= 0.0 {
        return Err(DiagopError::ParamRange("delta and r must be positive".into()));
    }
    for op in [a, b] {
        let meta = &op.seq.meta;
        if meta.bounded_above || meta.bounded_below || !meta.accumulation.abs_divergent {
            return Err(DiagopError::ParamRange(format!(
                "{} is not an empty-essential-spectrum operator unbounded on both sides",
                op.label()
            )));
        }
    }
    let matched = sign_matched_permutation(a, b, horizon)?;
    let btilde = matched.btilde(b);
    let slots: Vec<u64> = btilde.keys().copied().collect();
    let gaps: Vec<f64> = slots
        .iter()
        .map(|&n| resolvent_gap(a.eval(n), btilde[&n]))
        .collect();

    // Least cutoff N with every paired slot beyond it inside the ball.
    let mut suffix_max = vec![0.0f64; slots.len() + 1];
    for i in (0..slots.len()).rev() {
        suffix_max[i] = suffix_max[i + 1].max(gaps[i]);
    }
    let j_star = (0..=slots.len())
        .find(|&j| suffix_max[j] < delta)
        .expect("empty suffix is inside any positive ball");
    if j_star == slots.len() && slots.iter().any(|&n| btilde[&n] != a.eval(n)) {
        return Err(DiagopError::TargetNotReachable);
    }
    let start_index = if j_star == 0 { 0 } else { slots[j_star - 1] };

    // Step data on the slots past the cutoff.
    let moved: Vec<(u64, f64)> = slots[j_star..]
        .iter()
        .map(|&n| (n, btilde[&n] - a.eval(n)))
        .filter(|&(_, d)| d != 0.0)
        .collect();
    let m_p = moved.iter().map(|&(_, d)| d.abs()).fold(0.0, f64::max);
    if moved.is_empty() {
        return Ok(OrbitWalk {
            base_label: a.label().to_string(),
            target_label: walk_target_label(b, &matched),
            steps: vec![],
            per_step_distance: vec![],
            delta,
            step_norm_bound: r,
            start_index,
            tail: tail_certificate(a, b, horizon, 0.0),
        });
    }
    // Least L with m_p < r L strictly.
    let mut steps_count = (m_p / r).floor() as usize + 1;
    while m_p >= r * steps_count as f64 {
        steps_count += 1;
    }
    let step_shifts: Vec<ShiftEntry> = moved
        .iter()
        .map(|&(idx, d)| ShiftEntry { idx, shift: d / steps_count as f64 })
        .collect();

    let base_entries: Vec<(u64, f64)> = moved.iter().map(|&(n, _)| (n, a.eval(n))).collect();
    let mut per_step_distance = Vec::with_capacity(steps_count);
    let mut cumulative: BTreeMap<u64, f64> = BTreeMap::new();
    for j in 1..=steps_count {
        for s in &step_shifts {
            *cumulative.entry(s.idx).or_insert(0.0) += s.shift;
        }
        let dist = walk_distance_closed_form(&base_entries, &cumulative);
        if dist >= delta {
            return Err(DiagopError::WalkOutsideNeighborhood { step: j, dist, bound: delta });
        }
        per_step_distance.push(dist);
    }
    let head = per_step_distance.last().copied().unwrap_or(0.0);
    Ok(OrbitWalk {
        base_label: a.label().to_string(),
        target_label: walk_target_label(b, &matched),
        steps: vec![WalkStep { shifts: step_shifts }; steps_count],
        per_step_distance,
        delta,
        step_norm_bound: r,
        start_index,
        tail: tail_certificate(a, b, horizon, head),
    })
}

fn walk_target_label(b: &OperatorSpec, matched: &SignMatch) -> String {
    if matched.truncated {
        format!("{} (sign-permuted, balanced prefix)", b.label())
    } else {
        format!("{} (sign-permuted)", b.label())
    }
}

fn tail_certificate(a: &OperatorSpec, b: &OperatorSpec, horizon: u64, head: f64) -> TailCertificate {
    // Both operators are abs-divergent here; the sign-matched tail gap is
    // bounded by the sum of the two resolvent norms past the horizon when
    // the sampled stretch past it keeps growing.
    let grows = |op: &OperatorSpec| {
        let mut prev = op.eval(horizon).abs();
        for n in horizon + 1..=horizon + 128 {
            let v = op.eval(n).abs();
            if v + 1e-12 < prev {
                return false;
            }
            prev = v;
        }
        true
    };
    if grows(a) && grows(b) {
        let min_abs = a.eval(horizon).abs().min(b.eval(horizon).abs());
        let bound = 2.0 / (min_abs * min_abs + 1.0).sqrt();
        TailCertificate::DivergentBound { bound, head_dominates: head >= bound }
    } else {
        TailCertificate::Unverified { reason: "tail not sampled monotone past horizon".into() }
    }
}

/// Builds the walk from the zero operator toward a finite-rank diagonal `B`
/// (entries `(index, value)`), probing the first `probes` basis vectors.
/// The neighborhood is `{C : ‖(C - i)^{-1}ξ_j - (0 - i)^{-1}ξ_j‖ < eps}` and
/// every step has norm `‖B‖/N < r`.
pub fn orbit_walk_compact_at_zero(
    b_entries: &[(u64, f64)],
    probes: u64,
    eps: f64,
    r: f64,
) -> Result<OrbitWalk, DiagopError> {
    if eps <= 0.0 || r <= 0.0 {
        return Err(DiagopError::ParamRange("eps and r must be positive".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(idx, v) in b_entries {
        if idx == 0 {
            return Err(DiagopError::ParamRange("indices start at 1".into()));
        }
        if idx > probes {
            return Err(DiagopError::ProbeWindowExceeded { index: idx, window: probes });
        }
        if !seen.insert(idx) {
            return Err(DiagopError::ParamRange(format!("duplicate index {idx}")));
        }
        if !v.is_finite() {
            return Err(DiagopError::ParamRange(format!("non-finite entry at {idx}")));
        }
    }
    let norm = b_entries.iter().map(|&(_, v)| v.abs()).fold(0.0, f64::max);
    if norm == 0.0 {
        return Ok(OrbitWalk {
            base_label: "0".into(),
            target_label: "0".into(),
            steps: vec![],
            per_step_distance: vec![],
            delta: eps,
            step_norm_bound: r,
            start_index: 0,
            tail: TailCertificate::Equal,
        });
    }
    // Least N with ||B|| < r N strictly.
    let mut n_steps = (norm / r).floor() as usize + 1;
    while norm >= r * n_steps as f64 {
        n_steps += 1;
    }
    let step_shifts: Vec<ShiftEntry> = b_entries
        .iter()
        .map(|&(idx, v)| ShiftEntry { idx, shift: v / n_steps as f64 })
        .collect();
    let mut per_step_distance = Vec::with_capacity(n_steps);
    for l in 1..=n_steps {
        let scale = l as f64 / n_steps as f64;
        let dist = b_entries
            .iter()
            .map(|&(_, v)| {
                let x = scale * v;
                x.abs() / (x * x + 1.0).sqrt()
            })
            .fold(0.0, f64::max);
        if dist >= eps {
            return Err(DiagopError::WalkOutsideNeighborhood { step: l, dist, bound: eps });
        }
        per_step_distance.push(dist);
    }
    Ok(OrbitWalk {
        base_label: "0".into(),
        target_label: format!("finite-rank({})", b_entries.len()),
        steps: vec![WalkStep { shifts: step_shifts }; n_steps],
        per_step_distance,
        delta: eps,
        step_norm_bound: r,
        start_index: 0,
        tail: TailCertificate::Equal,
    })
}

/// Independent verification of a walk against its base operator.
///
/// Recomputes every cumulative distance through complex resolvent
/// arithmetic (a different code path than the builders), checks the stored
/// distances to 1e-12, the ball membership, the step-norm bound, and — for
/// walks built over sign-matched pairs — that no entry segment crosses the
/// resolvent singularity (`a_n · (a_n + total shift) ≥ 0`).
pub fn verify_walk(walk: &OrbitWalk, base: &OperatorSpec) -> Result<(), DiagopError> {
    verify_walk_entries(walk, |n| base.eval(n))
}

/// Verification of a zero-based walk (`orbit_walk_compact_at_zero`).
pub fn verify_walk_from_zero(walk: &OrbitWalk) -> Result<(), DiagopError> {
    verify_walk_entries(walk, |_| 0.0)
}

fn verify_walk_entries(
    walk: &OrbitWalk,
    base_eval: impl Fn(u64) -> f64,
) -> Result<(), DiagopError> {
    if walk.steps.len() != walk.per_step_distance.len() {
        return Err(DiagopError::InvalidSpec(
            "walk stores one distance per step".into(),
        ));
    }
    // Total shift per index over the whole walk, for the endpoint products.
    let mut totals: BTreeMap<u64, f64> = BTreeMap::new();
    for step in &walk.steps {
        for s in &step.shifts {
            *totals.entry(s.idx).or_insert(0.0) += s.shift;
        }
    }
    let products_nonneg = totals
        .iter()
        .all(|(&idx, &total)| base_eval(idx) * (base_eval(idx) + total) >= 0.0);

    let i = Complex64::new(0.0, 1.0);
    let mut cumulative: BTreeMap<u64, f64> = BTreeMap::new();
    for (j, step) in walk.steps.iter().enumerate() {
        let norm = step.shifts.iter().map(|s| s.shift.abs()).fold(0.0, f64::max);
        if norm > walk.step_norm_bound {
            return Err(DiagopError::InvalidSpec(format!(
                "step {} has norm {} > bound {}",
                j + 1,
                norm,
                walk.step_norm_bound
            )));
        }
        for s in &step.shifts {
            *cumulative.entry(s.idx).or_insert(0.0) += s.shift;
        }
        let mut dist = 0.0f64;
        for (&idx, &shift) in &cumulative {
            let a = base_eval(idx);
            let z = (Complex64::new(a + shift, 0.0) - i).inv() - (Complex64::new(a, 0.0) - i).inv();
            dist = dist.max(z.norm());
        }
        let stored = walk.per_step_distance[j];
        if (dist - stored).abs() > 1e-12 {
            return Err(DiagopError::InvalidSpec(format!(
                "step {}: recomputed distance {dist} differs from stored {stored}",
                j + 1
            )));
        }
        if dist >= walk.delta {
            return Err(DiagopError::WalkOutsideNeighborhood {
                step: j + 1,
                dist,
                bound: walk.delta,
            });
        }
    }
    // Interpolation domination: intermediate distances never exceed the
    // final one when the endpoint products are nonnegative.
    if products_nonneg {
        if let Some(&last) = walk.per_step_distance.last() {
            for (j, &d) in walk.per_step_distance.iter().enumerate() {
                if d > last + 1e-12 {
                    return Err(DiagopError::InvalidSpec(format!(
                        "step {} distance {d} exceeds final distance {last}",
                        j + 1
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_generator;
    use crate::family::{make_family, Family};
    use crate::operator::{AccumulationSpec, EigenvalueSequence, TailMeta};

    fn alternating(offset: f64) -> OperatorSpec {
        // a_n = n for even n, -(n + offset)... keep it simple: even -> n + offset,
        // odd -> -(n + offset)
        let gen = parse_generator(&format!(
            "if even(n) then n + {offset} else -(n + {offset})"
        ))
        .unwrap();
        OperatorSpec::new(
            EigenvalueSequence::new(
                format!("alt+{offset}"),
                vec![],
                gen,
                TailMeta {
                    bounded_above: false,
                    bounded_below: false,
                    accumulation: AccumulationSpec::empty_divergent(),
                    finitely_many_isolated: false,
                },
            )
            .unwrap(),
            "xi",
        )
    }

    #[test]
    fn sign_partition_alternating() {
        let a = alternating(0.0);
        let p = sign_partition(&a, 10);
        assert_eq!(p.nonneg, vec![2, 4, 6, 8, 10]);
        assert_eq!(p.neg, vec![1, 3, 5, 7, 9]);
        assert!(p.both_infinite_by_meta);
    }

    #[test]
    fn sign_partition_positive_operator_not_flagged() {
        let a = make_family(&Family::At { t: 0.5 }).unwrap();
        let p = sign_partition(&a, 64);
        assert_eq!(p.nonneg.len(), 64);
        assert!(p.neg.is_empty());
        assert!(!p.both_infinite_by_meta);
    }

    #[test]
    fn sign_match_products_are_nonnegative() {
        let a = alternating(0.0);
        let b = alternating(1.0);
        let m = sign_matched_permutation(&a, &b, 128).unwrap();
        assert!(!m.truncated);
        for &(slot, bi) in &m.pairs {
            assert!(a.eval(slot) * b.eval(bi) >= 0.0);
        }
        // As a permutation plan: slot n of A pairs b[mapping[n]], so the
        // stored cost is the bottleneck of (b-list, a-list) in that order.
        let plan = m.to_plan(&a, &b, 128);
        let av: Vec<f64> = (1..=128).map(|n| a.eval(n)).collect();
        let bv: Vec<f64> = (1..=128).map(|n| b.eval(n)).collect();
        plan.validate(&bv, &av).unwrap();
    }

    #[test]
    fn walk_identical_operators_is_empty() {
        let a = alternating(0.0);
        let w = orbit_walk_unbounded(&a, &a, 0.5, 0.1, 256).unwrap();
        assert!(w.steps.is_empty());
        verify_walk(&w, &a).unwrap();
    }

    #[test]
    fn walk_alternating_fixture() {
        let a = alternating(0.0);
        let b = alternating(1.0);
        let w = orbit_walk_unbounded(&a, &b, 0.5, 0.1, 512).unwrap();
        // every gap |b - a| = 1, so L = ceil(1/0.1) + 1 = 11
        assert_eq!(w.steps.len(), 11);
        assert!(w.steps.iter().all(|s| s.shifts.iter().all(|e| e.shift.abs() < 0.1)));
        assert!(w.per_step_distance.iter().all(|d| *d < 0.5));
        verify_walk(&w, &a).unwrap();

        // large step bound: single step
        let w1 = orbit_walk_unbounded(&a, &b, 0.5, 10.0, 512).unwrap();
        assert_eq!(w1.steps.len(), 1);
        verify_walk(&w1, &a).unwrap();
    }

    #[test]
    fn walk_rejects_bounded_operators() {
        let a = alternating(0.0);
        let c = make_family(&Family::Example41B).unwrap();
        assert!(orbit_walk_unbounded(&a, &c, 0.5, 0.1, 128).is_err());
    }

    #[test]
    fn walk_zero_base_cases() {
        let w = orbit_walk_compact_at_zero(&[], 4, 1.0, 0.5).unwrap();
        assert!(w.steps.is_empty());

        let w = orbit_walk_compact_at_zero(&[(1, 2.0)], 4, 1.0, 0.5).unwrap();
        assert_eq!(w.steps.len(), 5);
        // final distance |1/(2 - i) - 1/(-i)| = sqrt(0.8)
        let last = *w.per_step_distance.last().unwrap();
        assert!((last - 0.8f64.sqrt()).abs() < 1e-12);
        verify_walk_from_zero(&w).unwrap();
    }

    #[test]
    fn walk_zero_distance_monotone_in_step() {
        let entries = [(1u64, 0.8), (2, -1.0), (3, 0.3)];
        let w = orbit_walk_compact_at_zero(&entries, 8, 0.9, 0.2).unwrap();
        assert_eq!(w.steps.len(), 6);
        for pair in w.per_step_distance.windows(2) {
            assert!(pair[0] <= pair[1] + 1e-15);
        }
        verify_walk_from_zero(&w).unwrap();
    }

    #[test]
    fn walk_zero_probe_window_enforced() {
        assert!(matches!(
            orbit_walk_compact_at_zero(&[(9, 1.0)], 4, 1.0, 0.5),
            Err(DiagopError::ProbeWindowExceeded { .. })
        ));
    }

    #[test]
    fn walk_zero_eps_too_small_is_detected() {
        // target distance at l = N is sqrt(0.8) ≈ 0.894 >= 0.5
        assert!(matches!(
            orbit_walk_compact_at_zero(&[(1, 2.0)], 4, 0.5, 0.5),
            Err(DiagopError::WalkOutsideNeighborhood { .. })
        ));
    }
}
