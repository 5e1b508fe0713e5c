//! Operator representations: eigenvalue sequences with declared tail
//! metadata, and diagonal self-adjoint operators over a labeled basis.
//!
//! The declared accumulation set is the ground truth for everything the
//! samples cannot certify (accumulation is a tail property); samples act as
//! a consistency check against it. A declared accumulation point is the
//! essential-spectrum notion for diagonal operators: a value every
//! neighborhood of which contains `a_n` for infinitely many `n` — this
//! covers both eigenvalues of infinite multiplicity and honest accumulation
//! points of the spectrum.

use serde::{Deserialize, Serialize};

use crate::expr::{parse_generator, GenExpr};
use crate::sets::ClosedSetApprox;
use crate::{DiagopError, DEFAULT_HORIZON, DEFAULT_RESOLUTION};

/// Declared accumulation set of an eigenvalue sequence.
///
/// `abs_divergent` means `|a_n| → ∞`, i.e. the accumulation set is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct AccumulationSpec {
    #[serde(default)]
    pub points: Vec<f64>,
    #[serde(default)]
    pub intervals: Vec<(f64, f64)>,
    #[serde(default)]
    pub abs_divergent: bool,
    /// The declared set continues past the largest declared element
    /// (e.g. all positive integers).
    #[serde(default)]
    pub unbounded_above: bool,
    #[serde(default)]
    pub unbounded_below: bool,
}

impl AccumulationSpec {
    pub fn empty_divergent() -> Self {
        AccumulationSpec { abs_divergent: true, ..Default::default() }
    }

    pub fn points(points: impl IntoIterator<Item = f64>) -> Self {
        AccumulationSpec { points: points.into_iter().collect(), ..Default::default() }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        AccumulationSpec { intervals: vec![(a, b)], ..Default::default() }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty()
    }

    /// The declared set clipped to a window, as a closed-set approximation.
    pub fn to_set(&self, window: (f64, f64)) -> ClosedSetApprox {
        ClosedSetApprox::new(
            window,
            self.points.iter().copied(),
            self.intervals.iter().copied(),
        )
        .with_flags(self.unbounded_below, self.unbounded_above)
    }

    /// Distance from `x` to the declared set (ignoring window clipping).
    pub fn distance(&self, x: f64) -> f64 {
        let mut d = f64::INFINITY;
        for &p in &self.points {
            d = d.min((x - p).abs());
        }
        for &(a, b) in &self.intervals {
            d = d.min(if x < a {
                a - x
            } else if x > b {
                x - b
            } else {
                0.0
            });
        }
        d
    }

    pub fn approx_eq(&self, other: &AccumulationSpec, tol: f64) -> bool {
        self.abs_divergent == other.abs_divergent
            && self.unbounded_above == other.unbounded_above
            && self.unbounded_below == other.unbounded_below
            && self.points.len() == other.points.len()
            && self.intervals.len() == other.intervals.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| (a - b).abs() <= tol)
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(x, y)| (x.0 - y.0).abs() <= tol && (x.1 - y.1).abs() <= tol)
    }
}

/// Declared analytic facts about the tail of an eigenvalue sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailMeta {
    pub bounded_above: bool,
    pub bounded_below: bool,
    pub accumulation: AccumulationSpec,
    /// All but finitely many terms lie in the accumulation set.
    pub finitely_many_isolated: bool,
}

impl TailMeta {
    pub fn bounded(&self) -> bool {
        self.bounded_above && self.bounded_below
    }

    fn validate(&self) -> Result<(), DiagopError> {
        if self.accumulation.abs_divergent {
            if !self.accumulation.is_empty() {
                return Err(DiagopError::InvalidSpec(
                    "abs-divergent tails have an empty accumulation set".into(),
                ));
            }
            if self.bounded_above && self.bounded_below {
                return Err(DiagopError::InvalidSpec(
                    "abs-divergent tails cannot be bounded on both sides".into(),
                ));
            }
        }
        Ok(())
    }
}

/// An eigenvalue sequence: explicit prefix, generator for the tail, declared
/// tail metadata, and a label.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueSequence {
    pub prefix: Vec<f64>,
    pub generator: GenExpr,
    pub meta: TailMeta,
    pub label: String,
}

/// Horizon up to which construction eagerly checks generator finiteness.
/// Operations that sample further re-check values as they go.
const VALIDATION_HORIZON: u64 = crate::DEFAULT_HORIZON;

impl EigenvalueSequence {
    pub fn new(
        label: impl Into<String>,
        prefix: Vec<f64>,
        generator: GenExpr,
        meta: TailMeta,
    ) -> Result<Self, DiagopError> {
        meta.validate()?;
        if let Some(bad) = prefix.iter().find(|v| !v.is_finite()) {
            return Err(DiagopError::InvalidSpec(format!(
                "prefix contains non-finite value {bad}"
            )));
        }
        generator.validate(VALIDATION_HORIZON)?;
        Ok(EigenvalueSequence { prefix: prefix.clone(), generator, meta, label: label.into() })
    }

    /// The eigenvalue at basis index `n ≥ 1`.
    pub fn eval(&self, n: u64) -> f64 {
        debug_assert!(n >= 1);
        if n as usize <= self.prefix.len() {
            self.prefix[n as usize - 1]
        } else {
            self.generator.eval(n)
        }
    }

    /// Samples indices `1..=horizon`.
    pub fn sample(&self, horizon: u64) -> Vec<f64> {
        (1..=horizon).map(|n| self.eval(n)).collect()
    }

    /// First index where the generator takes over.
    pub fn tail_start(&self) -> u64 {
        self.prefix.len() as u64 + 1
    }
}

/// A diagonal self-adjoint operator: an eigenvalue sequence in a fixed
/// labeled orthonormal basis. Operators compared by metric or matching
/// operations must share `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub seq: EigenvalueSequence,
    pub basis: String,
}

impl OperatorSpec {
    pub fn new(seq: EigenvalueSequence, basis: impl Into<String>) -> Self {
        OperatorSpec { seq, basis: basis.into() }
    }

    pub fn label(&self) -> &str {
        &self.seq.label
    }

    pub fn eval(&self, n: u64) -> f64 {
        self.seq.eval(n)
    }

    pub fn check_codiagonal(&self, other: &OperatorSpec) -> Result<(), DiagopError> {
        if self.basis != other.basis {
            return Err(DiagopError::BasisMismatch {
                a: self.basis.clone(),
                b: other.basis.clone(),
            });
        }
        Ok(())
    }

    /// The operator `A + K` for a finite-rank diagonal `K` given as
    /// `(index, shift)` pairs. The prefix is materialized out to the largest
    /// touched index; tail metadata is unchanged (finite-rank perturbations
    /// do not move accumulation sets).
    pub fn with_finite_perturbation(
        &self,
        shifts: &[(u64, f64)],
    ) -> Result<OperatorSpec, DiagopError> {
        let max_idx = shifts.iter().map(|&(i, _)| i).max().unwrap_or(0);
        if shifts.iter().any(|&(i, _)| i == 0) {
            return Err(DiagopError::ParamRange("perturbation index 0 (indices start at 1)".into()));
        }
        let new_len = (self.seq.prefix.len() as u64).max(max_idx);
        let mut prefix: Vec<f64> = (1..=new_len).map(|n| self.seq.eval(n)).collect();
        for &(i, s) in shifts {
            prefix[i as usize - 1] += s;
        }
        let seq = EigenvalueSequence::new(
            format!("{}+K", self.seq.label),
            prefix,
            self.seq.generator.clone(),
            self.seq.meta.clone(),
        )?;
        Ok(OperatorSpec { seq, basis: self.basis.clone() })
    }
}

// ---------------------------------------------------------------------------
// JSON form

/// Serialized operator spec, matching the documented file schema.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorSpecDto {
    label: String,
    basis: String,
    prefix: Vec<f64>,
    generator: String,
    meta: TailMetaDto,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailMetaDto {
    bounded_above: bool,
    bounded_below: bool,
    accumulation: AccumulationSpec,
    finitely_many_isolated: bool,
}

impl OperatorSpec {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(OperatorSpecDto {
            label: self.seq.label.clone(),
            basis: self.basis.clone(),
            prefix: self.seq.prefix.clone(),
            generator: self.seq.generator.to_string(),
            meta: TailMetaDto {
                bounded_above: self.seq.meta.bounded_above,
                bounded_below: self.seq.meta.bounded_below,
                accumulation: self.seq.meta.accumulation.clone(),
                finitely_many_isolated: self.seq.meta.finitely_many_isolated,
            },
        })
        .expect("operator spec serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<OperatorSpec, DiagopError> {
        let dto: OperatorSpecDto = serde_json::from_value(value.clone())
            .map_err(|e| DiagopError::InvalidSpec(e.to_string()))?;
        let generator = parse_generator(&dto.generator)?;
        let seq = EigenvalueSequence::new(
            dto.label,
            dto.prefix,
            generator,
            TailMeta {
                bounded_above: dto.meta.bounded_above,
                bounded_below: dto.meta.bounded_below,
                accumulation: dto.meta.accumulation,
                finitely_many_isolated: dto.meta.finitely_many_isolated,
            },
        )?;
        Ok(OperatorSpec { seq, basis: dto.basis })
    }
}

// ---------------------------------------------------------------------------
// Sampled consistency check

/// Parameters of the sampled metadata sanity check.
#[derive(Debug, Clone, Copy)]
pub struct MetaCheckParams {
    pub horizon: u64,
    pub resolution: f64,
    /// Neighborhood radius for declared-point support.
    pub delta: f64,
    /// Cluster size from which a sample cluster must sit near the declared set.
    pub cluster_min: usize,
}

impl Default for MetaCheckParams {
    fn default() -> Self {
        MetaCheckParams {
            horizon: DEFAULT_HORIZON,
            resolution: DEFAULT_RESOLUTION,
            delta: 1e-2,
            cluster_min: 50,
        }
    }
}

/// Outcome of the sampled check, kept for diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct MetaReport {
    pub horizon: u64,
    pub supported_points: usize,
    pub checked_points: usize,
}

/// Sampled sanity check of declared tail metadata (not a proof).
///
/// Two hard conditions:
///
/// 1. every declared accumulation point within the samples' reach is
///    *supported*: at least two samples within `delta`, or an exact hit, or
///    the nearest sample strictly improved between horizon/4 and horizon
///    (the samples are still marching toward the point);
/// 2. no sample cluster of `cluster_min` or more values at `resolution`
///    sits farther than `delta` from the declared set.
pub fn check_meta(
    seq: &EigenvalueSequence,
    params: &MetaCheckParams,
) -> Result<MetaReport, DiagopError> {
    let mut samples = Vec::with_capacity(params.horizon as usize);
    for n in 1..=params.horizon {
        let v = seq.eval(n);
        if !v.is_finite() {
            return Err(DiagopError::NonFiniteValue { index: n, value: v });
        }
        samples.push(v);
    }
    // Reference sample set at a quarter of the horizon: a declared point is
    // "approached" when the nearest sample strictly improved since then.
    let reference = samples[..(samples.len() / 4).max(1)].to_vec();
    let mut sorted = samples.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut sorted_ref = reference;
    sorted_ref.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let acc = &seq.meta.accumulation;
    let mut probes: Vec<f64> = acc.points.clone();
    for &(a, b) in &acc.intervals {
        let steps = 16;
        for i in 0..=steps {
            probes.push(a + (b - a) * (i as f64) / (steps as f64));
        }
    }

    let mut supported = 0usize;
    for &p in &probes {
        let near = count_within(&sorted, p, params.delta);
        let d_full = nearest_distance(&sorted, p);
        let d_ref = nearest_distance(&sorted_ref, p);
        let ok = near >= 2 || d_full <= params.resolution || d_full < d_ref;
        if !ok {
            return Err(DiagopError::InconsistentMetadata(format!(
                "declared accumulation point {p} has no sample support at horizon {} \
                 (nearest sample distance {d_full:.6})",
                params.horizon
            )));
        }
        supported += 1;
    }

    // Cluster check against the declared set.
    let mut i = 0;
    while i < sorted.len() {
        let start = i;
        while i + 1 < sorted.len() && sorted[i + 1] - sorted[i] <= params.resolution {
            i += 1;
        }
        let size = i - start + 1;
        if size >= params.cluster_min {
            let mid = 0.5 * (sorted[start] + sorted[i]);
            let dist = if acc.is_empty() { f64::INFINITY } else { acc.distance(mid) };
            if dist > params.delta {
                return Err(DiagopError::InconsistentMetadata(format!(
                    "{size} samples cluster near {mid} at distance {dist:.6} from the declared set"
                )));
            }
        }
        i += 1;
    }

    Ok(MetaReport {
        horizon: params.horizon,
        supported_points: supported,
        checked_points: probes.len(),
    })
}

fn nearest_distance(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::INFINITY;
    }
    let i = sorted.partition_point(|v| *v < p);
    let mut d = f64::INFINITY;
    if i < sorted.len() {
        d = d.min((sorted[i] - p).abs());
    }
    if i > 0 {
        d = d.min((p - sorted[i - 1]).abs());
    }
    d
}

fn count_within(sorted: &[f64], p: f64, delta: f64) -> usize {
    let lo = sorted.partition_point(|v| *v <= p - delta);
    let hi = sorted.partition_point(|v| *v < p + delta);
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_generator;

    fn seq(gen: &str, meta: TailMeta) -> EigenvalueSequence {
        EigenvalueSequence::new("test", vec![], parse_generator(gen).unwrap(), meta).unwrap()
    }

    fn meta_bounded(acc: AccumulationSpec) -> TailMeta {
        TailMeta {
            bounded_above: true,
            bounded_below: true,
            accumulation: acc,
            finitely_many_isolated: true,
        }
    }

    #[test]
    fn abs_divergent_requires_unboundedness() {
        let meta = TailMeta {
            bounded_above: true,
            bounded_below: true,
            accumulation: AccumulationSpec::empty_divergent(),
            finitely_many_isolated: false,
        };
        let err = EigenvalueSequence::new("x", vec![], GenExpr::Index, meta);
        assert!(err.is_err());
    }

    #[test]
    fn prefix_takes_precedence_over_generator() {
        let meta = meta_bounded(AccumulationSpec::points([0.0]));
        let s = EigenvalueSequence::new(
            "p",
            vec![7.0, 8.0],
            parse_generator("0").unwrap(),
            meta,
        )
        .unwrap();
        assert_eq!(s.eval(1), 7.0);
        assert_eq!(s.eval(2), 8.0);
        assert_eq!(s.eval(3), 0.0);
        assert_eq!(s.tail_start(), 3);
    }

    #[test]
    fn consistency_accepts_constant_zero() {
        let s = seq("0", meta_bounded(AccumulationSpec::points([0.0])));
        assert!(check_meta(&s, &MetaCheckParams::default()).is_ok());
    }

    #[test]
    fn consistency_rejects_false_accumulation_point() {
        // Samples 2^(n^0.5) never approach 0.
        let meta = TailMeta {
            bounded_above: false,
            bounded_below: true,
            accumulation: AccumulationSpec::points([0.0]),
            finitely_many_isolated: false,
        };
        let s = seq("2^(n^0.5)", meta);
        assert!(matches!(
            check_meta(&s, &MetaCheckParams::default()),
            Err(DiagopError::InconsistentMetadata(_))
        ));
    }

    #[test]
    fn consistency_rejects_undeclared_cluster() {
        // Everything accumulates at 0 but the declaration says 5.
        let meta = meta_bounded(AccumulationSpec::points([5.0]));
        let s = EigenvalueSequence::new(
            "c",
            vec![5.0, 5.0, 5.0], // keep the declared point supported
            parse_generator("1/(n+1000000)").unwrap(),
            meta,
        )
        .unwrap();
        assert!(matches!(
            check_meta(&s, &MetaCheckParams::default()),
            Err(DiagopError::InconsistentMetadata(_))
        ));
    }

    #[test]
    fn perturbation_materializes_prefix() {
        let meta = meta_bounded(AccumulationSpec::points([0.0]));
        let a = OperatorSpec::new(seq("0", meta.clone()), "xi");
        let b = a.with_finite_perturbation(&[(3, 2.5), (10, -1.0)]).unwrap();
        assert_eq!(b.eval(3), 2.5);
        assert_eq!(b.eval(10), -1.0);
        assert_eq!(b.eval(11), 0.0);
        assert_eq!(b.seq.meta, meta);
    }

    #[test]
    fn json_round_trip() {
        let meta = TailMeta {
            bounded_above: false,
            bounded_below: true,
            accumulation: AccumulationSpec {
                points: vec![1.0, 2.0],
                intervals: vec![],
                abs_divergent: false,
                unbounded_above: true,
                unbounded_below: false,
            },
            finitely_many_isolated: false,
        };
        let op = OperatorSpec::new(
            EigenvalueSequence::new(
                "bt",
                vec![1.5],
                parse_generator("k(n) + 0.5/(m(n)+2)").unwrap(),
                meta,
            )
            .unwrap(),
            "xi",
        );
        let json = op.to_json();
        let back = OperatorSpec::from_json(&json).unwrap();
        assert_eq!(op, back);
    }

    #[test]
    fn json_rejects_unknown_fields() {
        let mut json = OperatorSpec::new(
            EigenvalueSequence::new(
                "z",
                vec![],
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
        )
        .to_json();
        json.as_object_mut().unwrap().insert("extra".into(), 1.into());
        assert!(OperatorSpec::from_json(&json).is_err());
    }
}
