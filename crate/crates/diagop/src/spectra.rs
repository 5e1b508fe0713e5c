//! Spectrum and essential-spectrum calculus for diagonal operators.
//!
//! For a diagonal operator the spectrum is the closure of its eigenvalue
//! set, and the essential spectrum consists of the eigenvalues of infinite
//! multiplicity together with the accumulation points. At desk scale the
//! spectrum is the ε-clustered sample set united with the declared
//! accumulation set; the essential spectrum is read off the declared
//! metadata after a sampled consistency check.

use serde::Serialize;

use crate::operator::{check_meta, MetaCheckParams, OperatorSpec};
use crate::sets::ClosedSetApprox;
use crate::DiagopError;

/// Essential spectrum together with the boundedness bit
/// (`0` bounded, `1` unbounded).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaBar {
    pub ess: ClosedSetApprox,
    pub unbounded_bit: u8,
}

/// Multiplicity of a sampled eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Multiplicity {
    /// All occurrences lie in the explicit prefix.
    Exact(u64),
    /// Occurrences reach into the generator range; the count is a lower
    /// bound at the sampling horizon.
    AtLeast(u64),
}

/// Spectrum, essential spectrum, and discrete eigenvalues within a window.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub spectrum: ClosedSetApprox,
    pub essential: ClosedSetApprox,
    pub discrete: Vec<(f64, Multiplicity)>,
}

fn sample_checked(a: &OperatorSpec, horizon: u64) -> Result<Vec<f64>, DiagopError> {
    let mut out = Vec::with_capacity(horizon as usize);
    for n in 1..=horizon {
        let v = a.eval(n);
        if !v.is_finite() {
            return Err(DiagopError::NonFiniteValue { index: n, value: v });
        }
        out.push(v);
    }
    Ok(out)
}

/// ε-merged closure approximation of the spectrum within a window: sampled
/// eigenvalues clustered at `resolution`, united with the declared
/// accumulation set. Unbounded flags combine the sequence's declared
/// unboundedness with the accumulation set's.
pub fn spectrum(
    a: &OperatorSpec,
    window: (f64, f64),
    horizon: u64,
    resolution: f64,
) -> Result<ClosedSetApprox, DiagopError> {
    let samples = sample_checked(a, horizon)?;
    let sampled = ClosedSetApprox::from_samples(window, &samples, resolution);
    let acc = a.seq.meta.accumulation.to_set(window);
    let mut out = sampled.union(&acc)?;
    out.unbounded_above = !a.seq.meta.bounded_above || acc.unbounded_above;
    out.unbounded_below = !a.seq.meta.bounded_below || acc.unbounded_below;
    Ok(out)
}

/// The essential spectrum within a window: the declared accumulation set,
/// united with values the generator attains with infinite multiplicity.
///
/// Fails with a diagnostic when the declared metadata contradicts the
/// samples (see [`check_meta`]) or when the generator provably attains a
/// value infinitely often that the declaration does not cover.
pub fn essential_spectrum(
    a: &OperatorSpec,
    window: (f64, f64),
    horizon: u64,
    resolution: f64,
) -> Result<ClosedSetApprox, DiagopError> {
    let params = MetaCheckParams { horizon, resolution, ..MetaCheckParams::default() };
    check_meta(&a.seq, &params)?;
    let acc = &a.seq.meta.accumulation;
    let inf_mult = a
        .seq
        .generator
        .infinite_multiplicity_values(a.seq.tail_start().saturating_sub(1));
    for v in &inf_mult {
        if acc.distance(*v) > resolution {
            return Err(DiagopError::InconsistentMetadata(format!(
                "generator attains {v} with infinite multiplicity but the declared \
                 accumulation set misses it"
            )));
        }
    }
    let declared = acc.to_set(window);
    let extra = ClosedSetApprox::new(window, inf_mult, []);
    declared.union(&extra)
}

/// Pairs the essential spectrum with the boundedness bit.
pub fn sigma_bar(
    a: &OperatorSpec,
    window: (f64, f64),
    horizon: u64,
    resolution: f64,
) -> Result<SigmaBar, DiagopError> {
    let ess = essential_spectrum(a, window, horizon, resolution)?;
    let unbounded_bit = if a.seq.meta.bounded() { 0 } else { 1 };
    Ok(SigmaBar { ess, unbounded_bit })
}

/// `(A - i)^{-1}` is compact iff the essential spectrum is empty, i.e. the
/// eigenvalues diverge in absolute value.
pub fn is_compact_resolvent(a: &OperatorSpec) -> bool {
    let acc = &a.seq.meta.accumulation;
    acc.abs_divergent && acc.is_empty()
}

/// Full spectrum report: spectrum, essential part, and discrete eigenvalues
/// with multiplicities.
pub fn spectrum_report(
    a: &OperatorSpec,
    window: (f64, f64),
    horizon: u64,
    resolution: f64,
) -> Result<SpectrumReport, DiagopError> {
    let spec = spectrum(a, window, horizon, resolution)?;
    let ess = essential_spectrum(a, window, horizon, resolution)?;

    let samples = sample_checked(a, horizon)?;
    let prefix_len = a.seq.prefix.len() as u64;
    // Group samples by exact value; count prefix vs generator occurrences.
    let mut indexed: Vec<(f64, u64)> = samples
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, i as u64 + 1))
        .filter(|(v, _)| *v >= window.0 && *v <= window.1)
        .collect();
    indexed.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut discrete = Vec::new();
    let mut i = 0;
    while i < indexed.len() {
        let v = indexed[i].0;
        let mut count = 0u64;
        let mut beyond_prefix = false;
        while i < indexed.len() && indexed[i].0 == v {
            count += 1;
            beyond_prefix |= indexed[i].1 > prefix_len;
            i += 1;
        }
        if ess.distance(v) > resolution {
            let mult = if beyond_prefix {
                Multiplicity::AtLeast(count)
            } else {
                Multiplicity::Exact(count)
            };
            discrete.push((v, mult));
        }
    }
    Ok(SpectrumReport { spectrum: spec, essential: ess, discrete })
}

/// Basis-vector witnesses for Weyl's criterion: up to `count` distinct
/// indices `n ≤ horizon` with `|a_n - λ| < eps`. Distinct basis vectors
/// converge weakly to zero, so a long list witnesses `λ` in the essential
/// spectrum at the sampled scale.
pub fn weyl_witnesses(
    a: &OperatorSpec,
    lambda: f64,
    eps: f64,
    count: usize,
    horizon: u64,
) -> Vec<u64> {
    let mut out = Vec::new();
    for n in 1..=horizon {
        if (a.eval(n) - lambda).abs() < eps {
            out.push(n);
            if out.len() == count {
                break;
            }
        }
    }
    out
}

/// Result of the finite perturbation-family intersection.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbationIntersection {
    /// `⋂_j σ(A + K_j)`, including the unperturbed `K = 0` term.
    pub result: ClosedSetApprox,
    /// Points of `σ(A)` eliminated by the family.
    pub eliminated: Vec<f64>,
}

/// Intersects the spectra of `A + K_j` over a finite family of finite-rank
/// diagonal perturbations. The unperturbed spectrum is always part of the
/// intersection, so the empty family returns `σ(A)`. The result contains
/// the essential spectrum for any family; with a family that moves every
/// sampled discrete eigenvalue off itself it collapses to it.
pub fn ess_via_perturbations(
    a: &OperatorSpec,
    perturbations: &[Vec<(u64, f64)>],
    window: (f64, f64),
    horizon: u64,
    resolution: f64,
) -> Result<PerturbationIntersection, DiagopError> {
    let base = spectrum(a, window, horizon, resolution)?;
    let mut sets = vec![base.clone()];
    for k in perturbations {
        let perturbed = a.with_finite_perturbation(k)?;
        sets.push(spectrum(&perturbed, window, horizon, resolution)?);
    }
    let result = ClosedSetApprox::intersect_all(&sets)?;
    let eliminated = base
        .points
        .iter()
        .copied()
        .filter(|p| !result.contains_point(*p))
        .collect();
    Ok(PerturbationIntersection { result, eliminated })
}
