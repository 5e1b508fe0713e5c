//! Windowed approximations of closed subsets of the real line.
//!
//! A [`ClosedSetApprox`] is a finite union of points and closed intervals
//! inside a window `[lo, hi]`, with flags recording whether the set continues
//! past either window edge. It is the concrete stand-in for elements of the
//! space of closed subsets of the line, rich enough to hold sampled spectra
//! and declared accumulation sets.

use serde::{Deserialize, Serialize};

use crate::DiagopError;

/// Finite union of points and closed intervals in a window.
///
/// Normalized form: points are sorted, deduplicated, and lie in no interval;
/// intervals are sorted, pairwise disjoint, non-degenerate, and clipped to
/// the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedSetApprox {
    pub window: (f64, f64),
    pub points: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
    pub unbounded_above: bool,
    pub unbounded_below: bool,
}

impl ClosedSetApprox {
    /// Builds a normalized set from raw points and intervals.
    pub fn new(
        window: (f64, f64),
        points: impl IntoIterator<Item = f64>,
        intervals: impl IntoIterator<Item = (f64, f64)>,
    ) -> Self {
        let (lo, hi) = window;
        let mut ivs: Vec<(f64, f64)> = intervals
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .filter(|&(a, b)| b >= lo && a <= hi)
            .map(|(a, b)| (a.max(lo), b.min(hi)))
            .collect();
        ivs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in ivs {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        // Degenerate intervals become points.
        let mut pts: Vec<f64> = points.into_iter().filter(|p| *p >= lo && *p <= hi).collect();
        merged.retain(|&(a, b)| {
            if a == b {
                pts.push(a);
                false
            } else {
                true
            }
        });
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        pts.retain(|p| !merged.iter().any(|&(a, b)| *p >= a && *p <= b));
        ClosedSetApprox {
            window,
            points: pts,
            intervals: merged,
            unbounded_above: false,
            unbounded_below: false,
        }
    }

    pub fn empty(window: (f64, f64)) -> Self {
        ClosedSetApprox::new(window, [], [])
    }

    /// The whole window.
    pub fn full(window: (f64, f64)) -> Self {
        ClosedSetApprox::new(window, [], [window])
    }

    pub fn with_flags(mut self, unbounded_below: bool, unbounded_above: bool) -> Self {
        self.unbounded_below = unbounded_below;
        self.unbounded_above = unbounded_above;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty()
    }

    /// Clusters sorted-or-not samples at `resolution`: runs of consecutive
    /// samples with gaps `<= resolution` merge; a run of identical values
    /// stays a point, a spread run becomes a closed interval.
    pub fn from_samples(window: (f64, f64), samples: &[f64], resolution: f64) -> Self {
        let (lo, hi) = window;
        let mut vals: Vec<f64> = samples.iter().copied().filter(|v| *v >= lo && *v <= hi).collect();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut points = Vec::new();
        let mut intervals = Vec::new();
        let mut i = 0;
        while i < vals.len() {
            let start = i;
            while i + 1 < vals.len() && vals[i + 1] - vals[i] <= resolution {
                i += 1;
            }
            if vals[i] > vals[start] {
                intervals.push((vals[start], vals[i]));
            } else {
                points.push(vals[start]);
            }
            i += 1;
        }
        ClosedSetApprox::new(window, points, intervals)
    }

    pub fn contains_point(&self, p: f64) -> bool {
        self.points.iter().any(|q| *q == p)
            || self.intervals.iter().any(|&(a, b)| p >= a && p <= b)
    }

    /// Distance from `x` to the set (within the window; ignores flags).
    pub fn distance(&self, x: f64) -> f64 {
        let mut d = f64::INFINITY;
        for &p in &self.points {
            d = d.min((x - p).abs());
        }
        for &(a, b) in &self.intervals {
            let dd = if x < a {
                a - x
            } else if x > b {
                x - b
            } else {
                0.0
            };
            d = d.min(dd);
        }
        d
    }

    /// Set union; windows must agree.
    pub fn union(&self, other: &ClosedSetApprox) -> Result<ClosedSetApprox, DiagopError> {
        self.check_window(other)?;
        let mut out = ClosedSetApprox::new(
            self.window,
            self.points.iter().chain(&other.points).copied(),
            self.intervals.iter().chain(&other.intervals).copied(),
        );
        out.unbounded_above = self.unbounded_above || other.unbounded_above;
        out.unbounded_below = self.unbounded_below || other.unbounded_below;
        Ok(out)
    }

    fn check_window(&self, other: &ClosedSetApprox) -> Result<(), DiagopError> {
        if self.window != other.window {
            return Err(DiagopError::WindowMismatch(
                self.window.0,
                self.window.1,
                other.window.0,
                other.window.1,
            ));
        }
        Ok(())
    }

    /// Exact pairwise intersection of the representations.
    pub fn intersect2(&self, other: &ClosedSetApprox) -> Result<ClosedSetApprox, DiagopError> {
        self.check_window(other)?;
        let mut points = Vec::new();
        let mut intervals = Vec::new();
        for &p in &self.points {
            if other.contains_point(p) {
                points.push(p);
            }
        }
        for &p in &other.points {
            if self.intervals.iter().any(|&(a, b)| p >= a && p <= b) {
                points.push(p);
            }
        }
        for &(a1, b1) in &self.intervals {
            for &(a2, b2) in &other.intervals {
                let a = a1.max(a2);
                let b = b1.min(b2);
                if a < b {
                    intervals.push((a, b));
                } else if a == b {
                    points.push(a);
                }
            }
        }
        let mut out = ClosedSetApprox::new(self.window, points, intervals);
        out.unbounded_above = self.unbounded_above && other.unbounded_above;
        out.unbounded_below = self.unbounded_below && other.unbounded_below;
        Ok(out)
    }

    /// Intersection of a nonempty list of sets over a common window.
    pub fn intersect_all(sets: &[ClosedSetApprox]) -> Result<ClosedSetApprox, DiagopError> {
        let mut iter = sets.iter();
        let first = match iter.next() {
            Some(s) => s.clone(),
            None => {
                return Err(DiagopError::ParamRange(
                    "intersection of an empty list of sets".into(),
                ))
            }
        };
        iter.try_fold(first, |acc, s| acc.intersect2(s))
    }

    /// Clips the set to a (sub)window, keeping the flags.
    pub fn clip(&self, window: (f64, f64)) -> ClosedSetApprox {
        let mut out = ClosedSetApprox::new(
            window,
            self.points.iter().copied(),
            self.intervals.iter().copied(),
        );
        out.unbounded_above = self.unbounded_above;
        out.unbounded_below = self.unbounded_below;
        out
    }

    /// Equality of the representations at a resolution: same flags, points
    /// pairwise within `tol`, interval endpoints within `tol`.
    pub fn approx_eq(&self, other: &ClosedSetApprox, tol: f64) -> bool {
        self.unbounded_above == other.unbounded_above
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

    /// Whether every point/interval of `other` is contained in `self`.
    pub fn contains_set(&self, other: &ClosedSetApprox) -> bool {
        other.points.iter().all(|&p| self.contains_point(p))
            && other.intervals.iter().all(|&(a, b)| {
                self.intervals
                    .iter()
                    .any(|&(c, d)| c <= a && b <= d)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: (f64, f64) = (-10.0, 10.0);

    #[test]
    fn normalization_absorbs_points_and_merges_intervals() {
        let s = ClosedSetApprox::new(W, [1.5, 3.0, 3.0, 7.0], [(1.0, 2.0), (1.8, 2.5)]);
        assert_eq!(s.intervals, vec![(1.0, 2.5)]);
        assert_eq!(s.points, vec![3.0, 7.0]);
    }

    #[test]
    fn interval_overlap_intersection() {
        let a = ClosedSetApprox::new(W, [], [(0.0, 2.0)]);
        let b = ClosedSetApprox::new(W, [], [(1.0, 3.0)]);
        let c = a.intersect2(&b).unwrap();
        assert_eq!(c.intervals, vec![(1.0, 2.0)]);
        assert!(c.points.is_empty());
    }

    #[test]
    fn point_intersection() {
        let a = ClosedSetApprox::new(W, [0.0, 1.0], []);
        let b = ClosedSetApprox::new(W, [1.0, 2.0], []);
        let c = a.intersect2(&b).unwrap();
        assert_eq!(c.points, vec![1.0]);
        assert!(c.intervals.is_empty());
    }

    #[test]
    fn full_window_is_identity_for_intersection() {
        let x = ClosedSetApprox::new(W, [-3.0, 4.5], [(0.0, 1.0)]);
        let full = ClosedSetApprox::full(W);
        let c = x.intersect2(&full).unwrap();
        assert_eq!(c, x);
    }

    #[test]
    fn window_mismatch_is_an_error() {
        let a = ClosedSetApprox::empty(W);
        let b = ClosedSetApprox::empty((-1.0, 1.0));
        assert!(matches!(
            a.intersect2(&b),
            Err(DiagopError::WindowMismatch(..))
        ));
    }

    #[test]
    fn clustering_merges_close_samples() {
        let samples = [0.0, 0.0, 1.0, 1.0000005, 1.000001, 5.0];
        let s = ClosedSetApprox::from_samples(W, &samples, 1e-6);
        assert_eq!(s.points, vec![0.0, 5.0]);
        assert_eq!(s.intervals.len(), 1);
        assert!((s.intervals[0].0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distance_and_membership() {
        let s = ClosedSetApprox::new(W, [5.0], [(0.0, 1.0)]);
        assert_eq!(s.distance(0.5), 0.0);
        assert_eq!(s.distance(2.0), 1.0);
        assert_eq!(s.distance(4.0), 1.0);
        assert!(s.contains_point(5.0));
        assert!(!s.contains_point(4.999999));
    }
}
