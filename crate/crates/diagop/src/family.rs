//! Built-in operator families.
//!
//! - `example41_A` / `example41_B`: the direct sum `A_0 ⊕ 0` (interleaved
//!   into one basis: odd indices carry 1, 2, 3, …, even indices carry 0)
//!   and the zero operator. Both have essential spectrum `{0}`; one is
//!   unbounded.
//! - `A_t` (`0 < t < 1`): eigenvalues `2^(n^t)`; empty essential spectrum,
//!   compact resolvent, pairwise non-unitarily-equivalent domains.
//! - `B_t` (`0 ≤ t ≤ 1`): eigenvalues `k + t/(m+2)` at index `<k, m>`;
//!   essential spectrum is the positive integers for every `t`, and all
//!   `B_t` share one domain.
//! - `A_F`: 0/1 indicator sequences for an index predicate `F`.
//! - `rationals(M)`: an enumeration of `ℚ ∩ [-M, M]`; its spectrum is the
//!   whole interval. Two variants are provided so that distinct enumerations
//!   of the same dense set can be compared.

use std::collections::BTreeSet;

use crate::expr::{GenExpr, Pred};
use crate::operator::{AccumulationSpec, EigenvalueSequence, OperatorSpec, TailMeta};
use crate::DiagopError;

/// Basis label shared by every built-in family.
pub const BUILTIN_BASIS: &str = "xi";

/// Default bound up to which `B_t` declares its integer accumulation points.
pub const DEFAULT_ACCUMULATION_BOUND: u32 = 64;

/// Prefix length of the rational enumerations; horizons above this fall
/// through to the (dense, but less evenly spread) pair-ratio generator.
pub const RATIONALS_PREFIX_LEN: usize = 4096;

/// Index predicate defining an indicator family `A_F`.
#[derive(Debug, Clone, PartialEq)]
pub enum IndicatorSet {
    Even,
    Odd,
    UpTo(u64),
    Explicit(BTreeSet<u64>),
}

/// Enumeration order of the rational family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationVariant {
    /// Zig-zag by denominator, each value once.
    Single,
    /// Same traversal with adjacent entries swapped: a distinct enumeration
    /// of the same set whose even-length prefixes carry identical value
    /// multisets.
    PairSwapped,
    /// Same traversal with every value emitted twice, so prefixes of equal
    /// length cover denominators at different depths.
    Doubled,
}

/// A built-in family identifier with parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Example41A,
    Example41B,
    /// `A_t`, `0 < t < 1`.
    At { t: f64 },
    /// `B_t`, `0 ≤ t ≤ 1`; accumulation points are declared up to `bound`.
    Bt { t: f64, bound: u32 },
    Indicator(IndicatorSet),
    /// Enumeration of `ℚ ∩ [-window, window]`.
    Rationals { window: u32, variant: EnumerationVariant },
}

impl Family {
    pub fn bt(t: f64) -> Family {
        Family::Bt { t, bound: DEFAULT_ACCUMULATION_BOUND }
    }

    pub fn rationals(window: u32) -> Family {
        Family::Rationals { window, variant: EnumerationVariant::Single }
    }
}

/// Builds the operator for a built-in family.
pub fn make_family(family: &Family) -> Result<OperatorSpec, DiagopError> {
    let seq = match family {
        Family::Example41A => {
            // odd indices carry (n+1)/2 = 1, 2, 3, ...; even indices carry 0
            let gen = GenExpr::If {
                pred: Pred::Odd,
                then: Box::new(GenExpr::Div(
                    Box::new(GenExpr::Add(
                        Box::new(GenExpr::Index),
                        Box::new(GenExpr::Const(1.0)),
                    )),
                    Box::new(GenExpr::Const(2.0)),
                )),
                els: Box::new(GenExpr::Const(0.0)),
            };
            EigenvalueSequence::new(
                "example41_A",
                vec![],
                gen,
                TailMeta {
                    bounded_above: false,
                    bounded_below: true,
                    accumulation: AccumulationSpec::points([0.0]),
                    finitely_many_isolated: false,
                },
            )?
        }
        Family::Example41B => EigenvalueSequence::new(
            "example41_B",
            vec![],
            GenExpr::Const(0.0),
            TailMeta {
                bounded_above: true,
                bounded_below: true,
                accumulation: AccumulationSpec::points([0.0]),
                finitely_many_isolated: true,
            },
        )?,
        Family::At { t } => {
            if !(*t > 0.0 && *t < 1.0) {
                return Err(DiagopError::ParamRange(format!(
                    "A_t requires 0 < t < 1, got {t}"
                )));
            }
            let gen = GenExpr::Pow(
                Box::new(GenExpr::Const(2.0)),
                Box::new(GenExpr::Pow(
                    Box::new(GenExpr::Index),
                    Box::new(GenExpr::Const(*t)),
                )),
            );
            EigenvalueSequence::new(
                format!("A_t(t={t})"),
                vec![],
                gen,
                TailMeta {
                    bounded_above: false,
                    bounded_below: true,
                    accumulation: AccumulationSpec::empty_divergent(),
                    finitely_many_isolated: false,
                },
            )?
        }
        Family::Bt { t, bound } => {
            if !(*t >= 0.0 && *t <= 1.0) {
                return Err(DiagopError::ParamRange(format!(
                    "B_t requires 0 <= t <= 1, got {t}"
                )));
            }
            if *bound == 0 {
                return Err(DiagopError::ParamRange("B_t accumulation bound must be >= 1".into()));
            }
            // lambda_{<k,m>} = k + t/(m+2)
            let gen = GenExpr::Add(
                Box::new(GenExpr::PairK),
                Box::new(GenExpr::Div(
                    Box::new(GenExpr::Const(*t)),
                    Box::new(GenExpr::Add(
                        Box::new(GenExpr::PairM),
                        Box::new(GenExpr::Const(2.0)),
                    )),
                )),
            );
            EigenvalueSequence::new(
                format!("B_t(t={t})"),
                vec![],
                gen,
                TailMeta {
                    bounded_above: false,
                    bounded_below: true,
                    accumulation: AccumulationSpec {
                        points: (1..=*bound).map(|k| k as f64).collect(),
                        intervals: vec![],
                        abs_divergent: false,
                        unbounded_above: true,
                        unbounded_below: false,
                    },
                    // For t > 0 no eigenvalue k + t/(m+2) lies in the
                    // accumulation set: every term is isolated. Only B_0
                    // sits entirely inside it.
                    finitely_many_isolated: *t == 0.0,
                },
            )?
        }
        Family::Indicator(set) => {
            let (pred, label, accumulation) = match set {
                IndicatorSet::Even => (
                    Pred::Even,
                    "A_F(even)".to_string(),
                    AccumulationSpec::points([0.0, 1.0]),
                ),
                IndicatorSet::Odd => (
                    Pred::Odd,
                    "A_F(odd)".to_string(),
                    AccumulationSpec::points([0.0, 1.0]),
                ),
                IndicatorSet::UpTo(p) => (
                    Pred::Le(*p),
                    format!("A_F(n<={p})"),
                    AccumulationSpec::points([0.0]),
                ),
                IndicatorSet::Explicit(s) => (
                    Pred::In(s.clone()),
                    format!("A_F(|F|={})", s.len()),
                    AccumulationSpec::points([0.0]),
                ),
            };
            let gen = GenExpr::If {
                pred,
                then: Box::new(GenExpr::Const(1.0)),
                els: Box::new(GenExpr::Const(0.0)),
            };
            EigenvalueSequence::new(
                label,
                vec![],
                gen,
                TailMeta {
                    bounded_above: true,
                    bounded_below: true,
                    accumulation,
                    finitely_many_isolated: true,
                },
            )?
        }
        Family::Rationals { window, variant } => {
            if *window == 0 {
                return Err(DiagopError::ParamRange("rationals window must be >= 1".into()));
            }
            let m = *window as f64;
            let mut prefix = zigzag_rationals(
                *window,
                RATIONALS_PREFIX_LEN,
                *variant == EnumerationVariant::Doubled,
            );
            if *variant == EnumerationVariant::PairSwapped {
                for pair in prefix.chunks_exact_mut(2) {
                    pair.swap(0, 1);
                }
            }
            // Tail: M (k - m) / (k + m) over the pair decoding; attains every
            // rational in (-M, M) infinitely often, so the accumulation set
            // of any tail is the whole interval.
            let gen = GenExpr::Mul(
                Box::new(GenExpr::Const(m)),
                Box::new(GenExpr::Div(
                    Box::new(GenExpr::Sub(
                        Box::new(GenExpr::PairK),
                        Box::new(GenExpr::PairM),
                    )),
                    Box::new(GenExpr::Add(
                        Box::new(GenExpr::PairK),
                        Box::new(GenExpr::PairM),
                    )),
                )),
            );
            let tag = match variant {
                EnumerationVariant::Single => "a",
                EnumerationVariant::PairSwapped => "b",
                EnumerationVariant::Doubled => "c",
            };
            EigenvalueSequence::new(
                format!("rationals(M={window},{tag})"),
                prefix,
                gen,
                TailMeta {
                    bounded_above: true,
                    bounded_below: true,
                    accumulation: AccumulationSpec::interval(-m, m),
                    finitely_many_isolated: true,
                },
            )?
        }
    };
    Ok(OperatorSpec::new(seq, BUILTIN_BASIS))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Zig-zag enumeration of `ℚ ∩ [-M, M]` by increasing denominator; within a
/// denominator, numerators ascend. Reduced fractions only, so each rational
/// appears exactly once (twice consecutively when `doubled`).
fn zigzag_rationals(window: u32, len: usize, doubled: bool) -> Vec<f64> {
    let m = window as i64;
    let mut out = Vec::with_capacity(len);
    let mut q: i64 = 1;
    'outer: loop {
        for p in -m * q..=m * q {
            if gcd(p.unsigned_abs(), q as u64) != 1 {
                continue;
            }
            let v = p as f64 / q as f64;
            out.push(v);
            if out.len() == len {
                break 'outer;
            }
            if doubled {
                out.push(v);
                if out.len() == len {
                    break 'outer;
                }
            }
        }
        q += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{check_meta, MetaCheckParams};

    #[test]
    fn b1_at_index_one() {
        let op = make_family(&Family::bt(1.0)).unwrap();
        assert!((op.eval(1) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn indicator_even_at_odd_index() {
        let op = make_family(&Family::Indicator(IndicatorSet::Even)).unwrap();
        assert_eq!(op.eval(3), 0.0);
        assert_eq!(op.eval(4), 1.0);
    }

    #[test]
    fn a_half_at_four() {
        let op = make_family(&Family::At { t: 0.5 }).unwrap();
        assert_eq!(op.eval(4), 4.0);
    }

    #[test]
    fn example41_a_interleaves() {
        let op = make_family(&Family::Example41A).unwrap();
        let head: Vec<f64> = (1..=6).map(|n| op.eval(n)).collect();
        assert_eq!(head, vec![1.0, 0.0, 2.0, 0.0, 3.0, 0.0]);
    }

    #[test]
    fn param_ranges_enforced() {
        assert!(make_family(&Family::At { t: 0.0 }).is_err());
        assert!(make_family(&Family::At { t: 1.0 }).is_err());
        assert!(make_family(&Family::Bt { t: 1.5, bound: 64 }).is_err());
        assert!(make_family(&Family::Rationals {
            window: 0,
            variant: EnumerationVariant::Single
        })
        .is_err());
    }

    #[test]
    fn zigzag_starts_with_integers_and_halves() {
        let v = zigzag_rationals(1, 8, false);
        assert_eq!(&v[..3], &[-1.0, 0.0, 1.0]);
        assert_eq!(&v[3..5], &[-0.5, 0.5]);
        // q = 3: -2/3, -1/3, 1/3, 2/3
        assert_eq!(&v[5..8], &[-2.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn zigzag_values_are_distinct_and_inside_window() {
        let v = zigzag_rationals(1, 2000, false);
        let mut sorted = v.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        assert_eq!(sorted.len(), v.len(), "reduced fractions are distinct");
        assert!(v.iter().all(|x| (-1.0..=1.0).contains(x)));
    }

    #[test]
    fn pair_swapped_variant_shares_even_prefix_multisets() {
        let a = make_family(&Family::rationals(1)).unwrap();
        let b = make_family(&Family::Rationals {
            window: 1,
            variant: EnumerationVariant::PairSwapped,
        })
        .unwrap();
        assert_ne!(a.eval(1), b.eval(1));
        for n in [2u64, 64, 2048] {
            let mut sa: Vec<f64> = (1..=n).map(|i| a.eval(i)).collect();
            let mut sb: Vec<f64> = (1..=n).map(|i| b.eval(i)).collect();
            sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
            sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
            assert_eq!(sa, sb, "prefix multisets at {n}");
        }
    }

    #[test]
    fn rationals_tail_is_dense_in_window() {
        // The generator past the prefix attains values arbitrarily close to
        // any target in (-M, M), infinitely often.
        let op = make_family(&Family::rationals(1)).unwrap();
        let start = op.seq.tail_start();
        let mut best = f64::INFINITY;
        let target = 0.7317;
        for n in start..start + 200_000 {
            best = best.min((op.eval(n) - target).abs());
        }
        assert!(best < 2e-3, "tail approaches {target}: best {best}");
    }

    #[test]
    fn builtin_metadata_passes_sampled_check_at_default_horizon() {
        let families = [
            Family::Example41A,
            Family::Example41B,
            Family::At { t: 0.3 },
            Family::At { t: 0.5 },
            Family::At { t: 0.7 },
            Family::bt(0.0),
            Family::bt(0.5),
            Family::bt(1.0),
            Family::Indicator(IndicatorSet::Even),
            Family::Indicator(IndicatorSet::UpTo(40)),
            Family::rationals(1),
            Family::Rationals { window: 1, variant: EnumerationVariant::PairSwapped },
            Family::Rationals { window: 1, variant: EnumerationVariant::Doubled },
        ];
        for f in families {
            let op = make_family(&f).unwrap();
            check_meta(&op.seq, &MetaCheckParams::default())
                .unwrap_or_else(|e| panic!("{:?}: {e}", op.label()));
        }
    }
}
