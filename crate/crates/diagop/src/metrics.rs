//! Resolvent metrics for co-diagonal operators.
//!
//! The strong-resolvent metric
//! `d(A,B) = Σ_n Σ_m 2^{-(n+m)} sup_{|t|≤m} ‖e^{itA}ξ_n - e^{itB}ξ_n‖`
//! reduces, when both operators are diagonal in the basis `{ξ_n}`, to a sum
//! over `S(a_n - b_n, m)` where `S(Δ, m) = sup_{|t|≤m} |e^{itΔ} - 1|`, and
//! `|e^{itΔ} - 1| = 2 |sin(tΔ/2)|` gives the closed form
//! `S(Δ, m) = 2` once `m|Δ| ≥ π`, else `2 sin(m|Δ|/2)`.
//!
//! The norm-resolvent distance for co-diagonal operators is
//! `sup_n |1/(a_n - i) - 1/(b_n - i)|`; each term equals
//! `|a - b| / sqrt((a²+1)(b²+1))`. The desk version takes a horizon sup and
//! attaches a tail certificate.

use serde::Serialize;

use crate::operator::OperatorSpec;
use crate::DiagopError;

/// Truncation parameters for the strong-resolvent metric.
#[derive(Debug, Clone, Copy)]
pub struct MetricParams {
    /// Basis cutoff for the `n` sum.
    pub n_max: u32,
    /// Time-window cutoff for the `m` sum.
    pub m_max: u32,
    pub tail_bound_mode: TailBoundMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailBoundMode {
    /// Bound every truncated summand by its worst case 2.
    Ignore,
    /// Use generator tail equality to kill the `n`-tail when the sequences
    /// provably agree past the cutoff.
    MetadataBound,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams { n_max: 20, m_max: 20, tail_bound_mode: TailBoundMode::Ignore }
    }
}

impl MetricParams {
    fn validate(&self) -> Result<(), DiagopError> {
        if self.n_max < 1 || self.m_max < 1 {
            return Err(DiagopError::ParamRange("metric cutoffs must be >= 1".into()));
        }
        Ok(())
    }
}

/// `sup_{|t| ≤ m} |e^{itΔ} - 1|` in closed form.
pub fn unitary_orbit_sup(delta: f64, m: u32) -> f64 {
    let x = (m as f64) * delta.abs();
    if x >= std::f64::consts::PI {
        2.0
    } else {
        2.0 * (x / 2.0).sin()
    }
}

/// Term of the norm-resolvent distance: `|1/(a-i) - 1/(b-i)|`.
pub fn resolvent_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / ((a * a + 1.0) * (b * b + 1.0)).sqrt()
}

/// Truncated strong-resolvent metric plus a rigorous truncation bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SrtDistance {
    pub value: f64,
    /// Upper bound on the truncated mass; `value + error_bound` dominates the
    /// exact metric.
    pub error_bound: f64,
}

/// The strong-resolvent metric between co-diagonal operators, truncated to
/// `n ≤ n_max`, `m ≤ m_max`.
pub fn srt_distance(
    a: &OperatorSpec,
    b: &OperatorSpec,
    params: &MetricParams,
) -> Result<SrtDistance, DiagopError> {
    a.check_codiagonal(b)?;
    params.validate()?;
    let n_max = params.n_max;
    let m_max = params.m_max;
    let mut value = 0.0;
    let mut deltas = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max as u64 {
        deltas.push(a.eval(n) - b.eval(n));
    }
    for (i, &delta) in deltas.iter().enumerate() {
        let wn = 0.5f64.powi(i as i32 + 1);
        for m in 1..=m_max {
            value += wn * 0.5f64.powi(m as i32) * unitary_orbit_sup(delta, m);
        }
    }
    // Σ_{n,m ≥ 1} 2^{-(n+m)} = 1; the box sum is (1 - 2^{-n_max})(1 - 2^{-m_max}).
    let box_mass = (1.0 - 0.5f64.powi(n_max as i32)) * (1.0 - 0.5f64.powi(m_max as i32));
    let mut error_bound = 2.0 * (1.0 - box_mass);
    if params.tail_bound_mode == TailBoundMode::MetadataBound {
        let cut = (n_max as u64)
            .max(a.seq.prefix.len() as u64)
            .max(b.seq.prefix.len() as u64);
        if a.seq.generator.tail_simplify(cut) == b.seq.generator.tail_simplify(cut) {
            // Sequences agree for n > cut. The n-tail of the metric only has
            // nonzero summands for n_max < n <= cut; m-tail persists for
            // rows n <= n_max with delta != 0.
            let mut bound = 0.0;
            for n in (n_max as u64 + 1)..=cut {
                if a.eval(n) != b.eval(n) {
                    bound += 2.0 * 0.5f64.powi(n as i32);
                }
            }
            let m_tail = 0.5f64.powi(m_max as i32);
            for (i, &delta) in deltas.iter().enumerate() {
                if delta != 0.0 {
                    bound += 2.0 * 0.5f64.powi(i as i32 + 1) * m_tail;
                }
            }
            error_bound = error_bound.min(bound);
        }
    }
    Ok(SrtDistance { value, error_bound })
}

/// Tail certificate attached to a horizon-truncated norm-resolvent distance.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub enum TailCertificate {
    /// The generators agree past the horizon: the tail sup is exactly 0.
    Equal,
    /// Both sequences diverge in absolute value and are monotone on the
    /// sampled stretch past the horizon; the tail sup is at most `bound`.
    DivergentBound { bound: f64, head_dominates: bool },
    /// No tail statement at this horizon.
    Unverified { reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct NrtDistance {
    /// `sup_{n ≤ horizon} |1/(a_n - i) - 1/(b_n - i)|`.
    pub value: f64,
    /// Index attaining the sup.
    pub argmax: u64,
    pub tail: TailCertificate,
}

fn tail_is_monotone_increasing(op: &OperatorSpec, horizon: u64) -> bool {
    let mut prev = op.eval(horizon).abs();
    // Check a contiguous stretch and then dyadic probes out to 8x horizon.
    for n in horizon + 1..=horizon + 256 {
        let v = op.eval(n).abs();
        if v + 1e-12 < prev {
            return false;
        }
        prev = v;
    }
    let mut probe = horizon + 256;
    let mut prev = op.eval(probe).abs();
    while probe < horizon.saturating_mul(8) {
        probe = probe.saturating_mul(2);
        let v = op.eval(probe).abs();
        if v + 1e-12 < prev {
            return false;
        }
        prev = v;
    }
    true
}

/// Horizon-truncated norm-resolvent distance with a tail certificate.
pub fn nrt_distance(
    a: &OperatorSpec,
    b: &OperatorSpec,
    horizon: u64,
) -> Result<NrtDistance, DiagopError> {
    a.check_codiagonal(b)?;
    let mut value = 0.0;
    let mut argmax = 1;
    for n in 1..=horizon {
        let g = resolvent_gap(a.eval(n), b.eval(n));
        if g > value {
            value = g;
            argmax = n;
        }
    }
    let cut = horizon
        .max(a.seq.prefix.len() as u64)
        .max(b.seq.prefix.len() as u64);
    let tail = if a.seq.generator.tail_simplify(cut) == b.seq.generator.tail_simplify(cut)
        && cut == horizon
    {
        TailCertificate::Equal
    } else if a.seq.meta.accumulation.abs_divergent
        && b.seq.meta.accumulation.abs_divergent
        && tail_is_monotone_increasing(a, horizon)
        && tail_is_monotone_increasing(b, horizon)
    {
        let min_abs = a.eval(horizon).abs().min(b.eval(horizon).abs());
        let bound = 2.0 / (min_abs * min_abs + 1.0).sqrt();
        TailCertificate::DivergentBound { bound, head_dominates: value >= bound }
    } else {
        TailCertificate::Unverified {
            reason: "tails neither provably equal nor monotone divergent".into(),
        }
    };
    Ok(NrtDistance { value, argmax, tail })
}

/// `|1/((1-s)a + sb - i) - 1/(a - i)|` for `s ∈ [0, 1]`.
///
/// When `ab ≥ -1` this is monotone-dominated by its value at `s = 1`; when
/// `ab < -1` it attains the maximum value 1 at `s = (1+a²)/(a² - ab)`.
pub fn resolvent_interp(a: f64, b: f64, s: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&s));
    let c = (1.0 - s) * a + s * b;
    resolvent_gap(c, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_generator;
    use crate::family::{make_family, Family, IndicatorSet};
    use crate::operator::{AccumulationSpec, EigenvalueSequence, TailMeta};
    use std::collections::BTreeSet;

    fn op_from(gen: &str, label: &str, divergent: bool) -> OperatorSpec {
        let meta = if divergent {
            TailMeta {
                bounded_above: false,
                bounded_below: true,
                accumulation: AccumulationSpec::empty_divergent(),
                finitely_many_isolated: false,
            }
        } else {
            TailMeta {
                bounded_above: true,
                bounded_below: true,
                accumulation: AccumulationSpec::points([0.0]),
                finitely_many_isolated: true,
            }
        };
        OperatorSpec::new(
            EigenvalueSequence::new(label, vec![], parse_generator(gen).unwrap(), meta).unwrap(),
            "xi",
        )
    }

    #[test]
    fn srt_zero_for_identical_operators() {
        let a = make_family(&Family::bt(0.5)).unwrap();
        let d = srt_distance(&a, &a, &MetricParams::default()).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn srt_closed_form_for_pi_gap_in_first_slot() {
        // a_1 - b_1 = pi, all other entries equal: every m-term of row 1
        // contributes its maximum 2, so the value is sum_{m<=20} 2^{-1-m}*2
        // = 1 - 2^{-20}.
        let a = OperatorSpec::new(
            EigenvalueSequence::new(
                "a",
                vec![std::f64::consts::PI],
                parse_generator("0").unwrap(),
                TailMeta {
                    bounded_above: true,
                    bounded_below: true,
                    accumulation: AccumulationSpec::points([0.0]),
                    finitely_many_isolated: true,
                },
            )
            .unwrap(),
            "xi",
        );
        let b = op_from("0", "b", false);
        let d = srt_distance(&a, &b, &MetricParams::default()).unwrap();
        let expected = 1.0 - 0.5f64.powi(20);
        assert!((d.value - expected).abs() < 1e-12, "{} vs {expected}", d.value);
    }

    #[test]
    fn srt_small_gap_single_term() {
        // a_1 - b_1 = 0.1, m_max = 1: d = 2^{-2} * 2 sin(0.05).
        let a = OperatorSpec::new(
            EigenvalueSequence::new(
                "a",
                vec![0.1],
                parse_generator("0").unwrap(),
                TailMeta {
                    bounded_above: true,
                    bounded_below: true,
                    accumulation: AccumulationSpec::points([0.0]),
                    finitely_many_isolated: true,
                },
            )
            .unwrap(),
            "xi",
        );
        let b = op_from("0", "b", false);
        let params = MetricParams { n_max: 20, m_max: 1, ..Default::default() };
        let d = srt_distance(&a, &b, &params).unwrap();
        let expected = 0.25 * 2.0 * (0.05f64).sin();
        assert!((d.value - expected).abs() < 1e-15);
        assert!((expected - 0.024989584635339165).abs() < 1e-15);
    }

    #[test]
    fn srt_error_bound_shrinks_with_metadata() {
        let a = make_family(&Family::bt(0.0)).unwrap();
        let b = make_family(&Family::bt(1.0)).unwrap();
        let ignore = srt_distance(&a, &b, &MetricParams::default()).unwrap();
        let meta = srt_distance(
            &a,
            &b,
            &MetricParams { tail_bound_mode: TailBoundMode::MetadataBound, ..Default::default() },
        )
        .unwrap();
        // different generators: metadata mode cannot certify tail equality
        assert_eq!(ignore.error_bound, meta.error_bound);

        let c = make_family(&Family::bt(1.0)).unwrap();
        let tight = srt_distance(
            &b,
            &c,
            &MetricParams { tail_bound_mode: TailBoundMode::MetadataBound, ..Default::default() },
        )
        .unwrap();
        assert_eq!(tight.value, 0.0);
        assert_eq!(tight.error_bound, 0.0);
    }

    #[test]
    fn basis_mismatch_rejected() {
        let a = make_family(&Family::bt(0.0)).unwrap();
        let mut b = make_family(&Family::bt(1.0)).unwrap();
        b.basis = "eta".into();
        assert!(matches!(
            srt_distance(&a, &b, &MetricParams::default()),
            Err(DiagopError::BasisMismatch { .. })
        ));
        assert!(matches!(
            nrt_distance(&a, &b, 128),
            Err(DiagopError::BasisMismatch { .. })
        ));
    }

    #[test]
    fn nrt_indicator_distance_is_inverse_sqrt_two() {
        let f1: BTreeSet<u64> = [1u64, 5, 100].into_iter().collect();
        let f2: BTreeSet<u64> = [1u64, 6, 100].into_iter().collect();
        let a = make_family(&Family::Indicator(IndicatorSet::Explicit(f1))).unwrap();
        let b = make_family(&Family::Indicator(IndicatorSet::Explicit(f2))).unwrap();
        let d = nrt_distance(&a, &b, 4096).unwrap();
        assert!((d.value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(d.tail, TailCertificate::Equal);
    }

    #[test]
    fn nrt_zero_for_identical() {
        let a = make_family(&Family::At { t: 0.5 }).unwrap();
        let d = nrt_distance(&a, &a, 512).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn nrt_shifted_linear_sequences() {
        let a = op_from("n", "n", true);
        let b = op_from("n + 1", "n+1", true);
        let d = nrt_distance(&a, &b, 512).unwrap();
        // sup at n = 1: |1/(1-i) - 1/(2-i)| = 1/sqrt(10)
        assert!((d.value - 0.31622776601683794).abs() < 1e-12);
        assert_eq!(d.argmax, 1);
        match d.tail {
            TailCertificate::DivergentBound { bound, head_dominates } => {
                assert!(head_dominates);
                assert!(bound < 0.01);
            }
            other => panic!("expected divergent bound, got {other:?}"),
        }
    }

    #[test]
    fn interp_examples() {
        // a=1, b=0, s=0.5 -> sqrt(0.1); dominated by s=1 value sqrt(2)/2
        let mid = resolvent_interp(1.0, 0.0, 0.5);
        assert!((mid - 0.31622776601683794).abs() < 1e-12);
        let end = resolvent_interp(1.0, 0.0, 1.0);
        assert!((end - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(mid <= end);

        assert_eq!(resolvent_interp(3.0, 3.0, 0.7), 0.0);

        // ab < -1: maximum value 1 at s = (1+a^2)/(a^2-ab)
        let (a, b): (f64, f64) = (1.0, -2.0);
        let s_star = (1.0 + a * a) / (a * a - a * b);
        assert!((s_star - 2.0 / 3.0).abs() < 1e-15);
        assert!((resolvent_interp(a, b, s_star) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_numeric_sup() {
        // 10^4-point oracle for S(delta, m).
        for &(delta, m) in &[(0.1, 1u32), (0.5, 3), (2.0, 2), (3.0, 1), (0.01, 20)] {
            let mut sup: f64 = 0.0;
            let steps = 10_000;
            for i in 0..=steps {
                let t = -(m as f64) + 2.0 * (m as f64) * (i as f64) / (steps as f64);
                let re = (t * delta).cos() - 1.0;
                let im = (t * delta).sin();
                sup = sup.max((re * re + im * im).sqrt());
            }
            let s = unitary_orbit_sup(delta, m);
            assert!(
                (s - sup).abs() < 1e-6,
                "S({delta},{m}) = {s} vs numeric {sup}"
            );
        }
    }
}
