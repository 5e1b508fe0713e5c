//! Property-based invariants across the library.

use proptest::prelude::*;

use diagop::domains::{band_index, band_profile, fw_decide, BandProfile, FwOutcome};
use diagop::equivalence::b_t_obstruction;
use diagop::expr::{parse_generator, GenExpr, Pred};
use diagop::family::{make_family, Family};
use diagop::matching::bottleneck_match;
use diagop::metrics::{nrt_distance, resolvent_interp, srt_distance, unitary_orbit_sup, MetricParams};
use diagop::operator::{AccumulationSpec, EigenvalueSequence, OperatorSpec, TailMeta};
use diagop::sets::ClosedSetApprox;
use diagop::spectra::{essential_spectrum, spectrum};
use diagop::turbulence::{orbit_walk_compact_at_zero, verify_walk_from_zero};
use diagop::{pair_decode, pair_encode, DEFAULT_RESOLUTION};

// ---------------------------------------------------------------------------
// Expression grammar

fn leaf() -> impl Strategy<Value = GenExpr> {
    prop_oneof![
        // Constants the parser can reproduce (finite f64 values round-trip
        // through the shortest display form).
        (-1e6f64..1e6).prop_map(GenExpr::Const),
        Just(GenExpr::Index),
        Just(GenExpr::PairK),
        Just(GenExpr::PairM),
    ]
}

fn pred() -> impl Strategy<Value = Pred> {
    prop_oneof![
        (0u64..10_000).prop_map(Pred::Le),
        Just(Pred::Even),
        Just(Pred::Odd),
        proptest::collection::btree_set(1u64..500, 0..6).prop_map(Pred::In),
    ]
}

fn expr() -> impl Strategy<Value = GenExpr> {
    leaf().prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GenExpr::Add(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GenExpr::Sub(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GenExpr::Mul(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GenExpr::Div(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GenExpr::Pow(a.into(), b.into())),
            inner.clone().prop_map(|e| GenExpr::Exp2(e.into())),
            // The parser folds `-const`, so negation wraps non-constants only.
            inner.clone().prop_map(|e| match e {
                GenExpr::Const(c) => GenExpr::Const(-c),
                other => GenExpr::Neg(other.into()),
            }),
            (pred(), inner.clone(), inner).prop_map(|(pred, t, e)| GenExpr::If {
                pred,
                then: t.into(),
                els: e.into(),
            }),
        ]
    })
}

proptest! {
    #[test]
    fn parse_print_parse_is_identity(ast in expr()) {
        let printed = ast.to_string();
        let reparsed = parse_generator(&printed)
            .unwrap_or_else(|e| panic!("`{printed}` failed to reparse: {e}"));
        prop_assert_eq!(ast, reparsed);
    }

    #[test]
    fn pair_round_trip(k in 1u64..40, m in 1u64..1_000_000) {
        // k + log2(m) stays within u64 range here; larger pairs overflow
        // and are rejected (covered by a unit test).
        let n = pair_encode(k, m).unwrap();
        prop_assert_eq!(pair_decode(n), (k, m));
    }
}

// ---------------------------------------------------------------------------
// Closed sets

fn closed_set() -> impl Strategy<Value = ClosedSetApprox> {
    let pts = proptest::collection::vec(-10.0f64..10.0, 0..6);
    let ivs = proptest::collection::vec((-10.0f64..10.0, 0.0f64..3.0), 0..4);
    (pts, ivs).prop_map(|(points, raw)| {
        ClosedSetApprox::new(
            (-10.0, 10.0),
            points,
            raw.into_iter().map(|(a, w)| (a, (a + w).min(10.0))),
        )
    })
}

proptest! {
    #[test]
    fn intersection_is_commutative_and_idempotent(a in closed_set(), b in closed_set()) {
        let ab = a.intersect2(&b).unwrap();
        let ba = b.intersect2(&a).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert_eq!(a.intersect2(&a).unwrap(), a);
    }

    #[test]
    fn intersection_is_associative(a in closed_set(), b in closed_set(), c in closed_set()) {
        let left = a.intersect2(&b).unwrap().intersect2(&c).unwrap();
        let right = a.intersect2(&b.intersect2(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn full_window_is_neutral(a in closed_set()) {
        let full = ClosedSetApprox::full((-10.0, 10.0));
        prop_assert_eq!(a.intersect2(&full).unwrap(), a);
    }
}

// ---------------------------------------------------------------------------
// Spectra

fn builtin() -> impl Strategy<Value = OperatorSpec> {
    prop_oneof![
        (0.0f64..=1.0).prop_map(|t| make_family(&Family::bt(t)).unwrap()),
        (0.15f64..0.85).prop_map(|t| make_family(&Family::At { t }).unwrap()),
        Just(make_family(&Family::Example41A).unwrap()),
        Just(make_family(&Family::Example41B).unwrap()),
        Just(make_family(&Family::rationals(1)).unwrap()),
    ]
}

fn finite_perturbation() -> impl Strategy<Value = Vec<(u64, f64)>> {
    proptest::collection::btree_map(1u64..2000, -5.0f64..5.0, 0..12)
        .prop_map(|m| m.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn essential_spectrum_contained_in_spectrum(
        op in builtin(),
        k in finite_perturbation(),
    ) {
        let perturbed = op.with_finite_perturbation(&k).unwrap();
        let w = (-16.0, 16.0);
        let ess = essential_spectrum(&perturbed, w, 2048, DEFAULT_RESOLUTION).unwrap();
        let spec = spectrum(&perturbed, w, 2048, DEFAULT_RESOLUTION).unwrap();
        prop_assert!(spec.contains_set(&ess));
    }

    #[test]
    fn essential_spectrum_invariant_under_finite_rank(
        op in builtin(),
        k in finite_perturbation(),
    ) {
        let w = (-16.0, 16.0);
        let before = essential_spectrum(&op, w, 2048, DEFAULT_RESOLUTION).unwrap();
        let perturbed = op.with_finite_perturbation(&k).unwrap();
        let after = essential_spectrum(&perturbed, w, 2048, DEFAULT_RESOLUTION).unwrap();
        prop_assert_eq!(before, after);
    }
}

// ---------------------------------------------------------------------------
// Metrics

fn prefix_op(label: &str, prefix: Vec<f64>) -> OperatorSpec {
    OperatorSpec::new(
        EigenvalueSequence::new(
            label,
            prefix,
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
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metrics_are_pseudometrics_on_codiagonal_triples(
        a in proptest::collection::vec(-20.0f64..20.0, 24),
        b in proptest::collection::vec(-20.0f64..20.0, 24),
        c in proptest::collection::vec(-20.0f64..20.0, 24),
    ) {
        let (oa, ob, oc) = (prefix_op("a", a), prefix_op("b", b), prefix_op("c", c));
        let p = MetricParams::default();
        let dab = srt_distance(&oa, &ob, &p).unwrap().value;
        let dba = srt_distance(&ob, &oa, &p).unwrap().value;
        prop_assert_eq!(dab.to_bits(), dba.to_bits());
        let dac = srt_distance(&oa, &oc, &p).unwrap().value;
        let dbc = srt_distance(&ob, &oc, &p).unwrap().value;
        prop_assert!(dac <= dab + dbc + 1e-12);

        let nab = nrt_distance(&oa, &ob, 24).unwrap().value;
        let nba = nrt_distance(&ob, &oa, 24).unwrap().value;
        prop_assert_eq!(nab.to_bits(), nba.to_bits());
        let nac = nrt_distance(&oa, &oc, 24).unwrap().value;
        let nbc = nrt_distance(&ob, &oc, 24).unwrap().value;
        prop_assert!(nac <= nab + nbc + 1e-12);
    }

    #[test]
    fn orbit_sup_matches_numeric_oracle(delta in 0.01f64..1.5, m in 1u32..=5) {
        // Grid error near the sup is quadratic in the step; delta * m is kept
        // small enough that a 10^4-point grid resolves it below 1e-6.
        let mut sup: f64 = 0.0;
        let steps = 10_000;
        for i in 0..=steps {
            let t = -(m as f64) + 2.0 * (m as f64) * (i as f64) / (steps as f64);
            let re = (t * delta).cos() - 1.0;
            let im = (t * delta).sin();
            sup = sup.max((re * re + im * im).sqrt());
        }
        prop_assert!((unitary_orbit_sup(delta, m) - sup).abs() < 1e-6);
    }

    #[test]
    fn interpolation_dominated_by_endpoint(
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
        s in 0.0f64..=1.0,
    ) {
        prop_assume!(a * b >= -1.0);
        prop_assert!(resolvent_interp(a, b, s) <= resolvent_interp(a, b, 1.0) + 1e-12);
    }
}

// ---------------------------------------------------------------------------
// Matching

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn bottleneck_matches_brute_force(
        pairs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..7),
    ) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let plan = bottleneck_match(&a, &b).unwrap();
        plan.validate(&a, &b).unwrap();

        fn brute(a: &[f64], b: &[f64], used: &mut Vec<bool>, pos: usize, cur: f64) -> f64 {
            if pos == b.len() {
                return cur;
            }
            let mut best = f64::INFINITY;
            for j in 0..a.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(brute(a, b, used, pos + 1, cur.max((a[j] - b[pos]).abs())));
                    used[j] = false;
                }
            }
            best
        }
        let best = brute(&a, &b, &mut vec![false; a.len()], 0, 0.0);
        prop_assert!((plan.bottleneck_cost - best).abs() < 1e-12);
    }

    #[test]
    fn bottleneck_cost_invariant_under_shift_and_permutation(
        pairs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..24),
        shift in -10.0f64..10.0,
        seed in 0u64..1000,
    ) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let base = bottleneck_match(&a, &b).unwrap().bottleneck_cost;

        // Common shift: invariant up to the re-rounding of the differences.
        let a2: Vec<f64> = a.iter().map(|x| x + shift).collect();
        let b2: Vec<f64> = b.iter().map(|x| x + shift).collect();
        let shifted = bottleneck_match(&a2, &b2).unwrap().bottleneck_cost;
        prop_assert!((shifted - base).abs() <= 1e-9 * (1.0 + base.abs()));

        // Applying one permutation to both lists: exactly invariant.
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(1);
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let a3: Vec<f64> = perm.iter().map(|&i| a[i]).collect();
        let b3: Vec<f64> = perm.iter().map(|&i| b[i]).collect();
        prop_assert_eq!(bottleneck_match(&a3, &b3).unwrap().bottleneck_cost, base);
    }
}

// ---------------------------------------------------------------------------
// Band profiles and the shift criterion

fn profile() -> impl Strategy<Value = BandProfile> {
    proptest::collection::vec(0u64..12, 40..80)
        .prop_map(|dims| BandProfile::from_dims(dims, "random"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn fw_reflexivity_symmetry_monotonicity(p in profile(), q in profile()) {
        let (k_max, n_max, l_max) = (3u32, 16u32, 10u32);
        prop_assume!(p.dims.len() >= (k_max + n_max + l_max) as usize + 1);
        prop_assume!(q.dims.len() >= (k_max + n_max + l_max) as usize + 1);

        let refl = fw_decide(&p, &p, k_max, n_max, l_max).unwrap();
        prop_assert_eq!(refl.outcome, FwOutcome::Equivalent(0));

        let pq = fw_decide(&p, &q, k_max, n_max, l_max).unwrap();
        let qp = fw_decide(&q, &p, k_max, n_max, l_max).unwrap();
        match (&pq.outcome, &qp.outcome) {
            (FwOutcome::Equivalent(x), FwOutcome::Equivalent(y)) => prop_assert_eq!(x, y),
            (FwOutcome::Violation(_), FwOutcome::Violation(_)) => {}
            other => prop_assert!(false, "asymmetric verdicts: {:?}", other),
        }
        if let FwOutcome::Equivalent(k) = pq.outcome {
            for k2 in k..=k_max {
                let again = fw_decide(&p, &q, k2, n_max, l_max).unwrap();
                prop_assert!(matches!(again.outcome, FwOutcome::Equivalent(kk) if kk <= k2));
            }
        }
    }

    #[test]
    fn band_partition_property(slope in 0.2f64..5.0, offset in -3.0f64..3.0, horizon in 64u64..1024) {
        let op = OperatorSpec::new(
            EigenvalueSequence::new(
                "affine",
                vec![],
                parse_generator(&format!("{slope} * n + {offset}")).unwrap(),
                TailMeta {
                    bounded_above: false,
                    bounded_below: true,
                    accumulation: AccumulationSpec::empty_divergent(),
                    finitely_many_isolated: false,
                },
            )
            .unwrap(),
            "xi",
        );
        let top = (1..=horizon).map(|n| band_index(op.eval(n))).max().unwrap();
        let profile = band_profile(&op, top, horizon).unwrap();
        let total: u64 = profile.dims.iter().map(|d| d.floor()).sum();
        prop_assert_eq!(total, horizon);
    }
}

// ---------------------------------------------------------------------------
// Obstruction and walks

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn obstruction_respects_lower_bound(s in 0.0f64..0.98, gap in 0.01f64..0.5) {
        let t = (s + gap).min(1.0);
        prop_assume!(s < t);
        let min = b_t_obstruction(s, t, 40, 40, 40).unwrap();
        prop_assert!(min >= (t - s) / 3.0 - 1e-12);
    }

    #[test]
    fn zero_walks_verify_and_are_monotone(
        entries in proptest::collection::btree_map(1u64..8, -2.0f64..2.0, 1..4),
        r in 0.05f64..0.8,
    ) {
        let list: Vec<(u64, f64)> = entries.into_iter().collect();
        let norm = list.iter().map(|e| e.1.abs()).fold(0.0, f64::max);
        // pick eps strictly above the endpoint distance so the walk exists
        let endpoint = norm / (norm * norm + 1.0).sqrt();
        let walk = orbit_walk_compact_at_zero(&list, 8, endpoint + 0.1, r).unwrap();
        verify_walk_from_zero(&walk).unwrap();
        for w in walk.per_step_distance.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-15);
        }
        for step in &walk.steps {
            for s in &step.shifts {
                prop_assert!(s.shift.abs() < r);
            }
        }
    }
}
