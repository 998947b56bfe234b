use proptest::prelude::*;

use ultrastar::diametrical::quads;
use ultrastar::*;

fn alphabet(k: usize) -> Vec<Rational> {
    (1..=k as i64).map(Rational::from).collect()
}

/// Ultrametric spaces on up to `max_n` points via dendrogram sampling.
fn ultrametric(max_n: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (1..=max_n, 1usize..=5, any::<u64>(), any::<u64>()).prop_map(|(n, k, seed, index)| {
        sample_dendrogram_at(&GeneratorSpec::dendrogram(n, alphabet(k), seed, 1), index).unwrap()
    })
}

/// Two ultrametric spaces of the same size.
fn same_size_pair(max_n: usize) -> impl Strategy<Value = (FiniteMetricSpace, FiniteMetricSpace)> {
    (1..=max_n, 1usize..=4, 1usize..=4, any::<u64>(), any::<u64>()).prop_map(|(n, ka, kb, sa, sb)| {
        (
            sample_dendrogram(&GeneratorSpec::dendrogram(n, alphabet(ka), sa, 1)).unwrap(),
            sample_dendrogram(&GeneratorSpec::dendrogram(n, alphabet(kb), sb, 1)).unwrap(),
        )
    })
}

fn star() -> impl Strategy<Value = LabeledStarGraph> {
    (0i64..4, prop::collection::vec((0i64..12, 1i64..4), 1..10)).prop_map(|(c, leaves)| {
        let leaves = leaves
            .into_iter()
            .enumerate()
            .map(|(i, (num, den))| {
                // a zero center forces positive leaves
                let l = if c == 0 { Rational::new(num + 1, den) } else { Rational::new(num, den) };
                (format!("v{i}"), l)
            })
            .collect();
        LabeledStarGraph::new("hub", Rational::from(c), leaves).unwrap()
    })
}

fn classes(space: &FiniteMetricSpace) -> Vec<FourPointClass> {
    quads(space.len()).map(|q| classify_four_point(&space.restrict_indices(&q).unwrap()).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_spaces_are_ultrametric(space in ultrametric(8)) {
        prop_assert!(space.validate().is_ultrametric);
    }

    #[test]
    fn center_iff_no_forbidden_quad(space in ultrametric(8)) {
        let center = find_center(&space).unwrap();
        let forbidden = forbidden_scan(&space).unwrap();
        prop_assert_eq!(center.is_some(), forbidden.is_none());
        prop_assert_eq!(forbidden_scan_parallel(&space).unwrap(), forbidden);
        let report = diagnose(&space).unwrap();
        if let Some(star) = &report.star {
            prop_assert_eq!(&star.star_metric().unwrap(), &space);
        }
    }

    #[test]
    fn us_property_is_hereditary(space in ultrametric(7), mask in any::<u8>()) {
        prop_assume!(find_center(&space).unwrap().is_some());
        let keep: Vec<usize> = (0..space.len()).filter(|i| mask & (1 << i) != 0).collect();
        prop_assume!(!keep.is_empty());
        let sub = space.restrict_indices(&keep).unwrap();
        prop_assert!(find_center(&sub).unwrap().is_some());
    }

    #[test]
    fn shift_round_trips_and_keeps_classes(space in ultrametric(7), num in 0i64..8) {
        prop_assume!(space.len() >= 2);
        let min = space.min_positive_distance().unwrap();
        // delta = min * num / 8 stays below min
        let delta = Rational::from(min.as_big() * num_delta(num));
        let shifted = shift(&space, &delta).unwrap();
        prop_assert!(shifted.is_ultrametric());
        prop_assert_eq!(&unshift(&shifted, &delta).unwrap(), &space);
        prop_assert_eq!(classes(&shifted), classes(&space));
    }

    #[test]
    fn adjunction_at_the_center_keeps_us(space in ultrametric(6), frac in 1i64..8) {
        prop_assume!(space.len() >= 2);
        let Some(center) = find_center(&space).unwrap() else { return Ok(()) };
        let anchor = center.center;
        let min = space.min_positive_distance().unwrap();
        let eps = Rational::from(min.as_big() * num_delta(frac));
        let out = space.adjoin_near(&anchor, &eps).unwrap();
        prop_assert!(forbidden_scan(&out).unwrap().is_none());
        let c = out.label(out.len() - 1).to_string();
        let swap = swap_isometry(&out, &anchor, &c).unwrap();
        prop_assert!(swap.preserves(&out));
        prop_assert!(swap.compose(&swap).is_identity());
        let without_anchor: Vec<&str> = out.points().iter().map(String::as_str).filter(|p| *p != anchor).collect();
        let without_c: Vec<&str> = out.points().iter().map(String::as_str).filter(|p| *p != c).collect();
        let a = out.restrict(&without_anchor).unwrap();
        let b = out.restrict(&without_c).unwrap();
        prop_assert!(are_isometric(&a, &b).unwrap().is_some());
    }

    #[test]
    fn star_round_trip(s in star()) {
        let space = star_metric(&s).unwrap();
        prop_assert!(space.validate().is_ultrametric);
        let center = find_center(&space).unwrap().expect("star metrics have a center");
        let rebuilt = star_from_center(&space, &center.center).unwrap();
        prop_assert_eq!(&star_metric(&rebuilt).unwrap(), &space);
    }

    #[test]
    fn isometry_is_symmetric((a, b) in same_size_pair(6)) {
        let ab = are_isometric(&a, &b).unwrap();
        let ba = are_isometric(&b, &a).unwrap();
        prop_assert_eq!(ab.is_some(), ba.is_some());
        if let Some(m) = ab {
            prop_assert!(m.is_isometry(&a, &b));
            prop_assert!(m.inverse().is_isometry(&b, &a));
        }
    }

    #[test]
    fn weak_similarity_is_an_equivalence((a, b) in same_size_pair(6)) {
        prop_assert!(weakly_similar(&a, &a).unwrap().unwrap().is_isometric());
        let ab = weakly_similar(&a, &b).unwrap();
        prop_assert_eq!(ab.is_some(), weakly_similar(&b, &a).unwrap().is_some());
        if let Some(w) = ab {
            prop_assert!(w.verify(&a, &b));
            if a.len() >= 2 {
                let sig = |s: &FiniteMetricSpace| multipartite_signature(&diametrical_graph(s).unwrap()).map(|m| m.part_sizes);
                prop_assert_eq!(sig(&a), sig(&b));
            }
        }
    }

    #[test]
    fn isometric_implies_weakly_similar((a, b) in same_size_pair(6)) {
        if are_isometric(&a, &b).unwrap().is_some() {
            prop_assert!(weakly_similar(&a, &b).unwrap().is_some());
        }
    }

    #[test]
    fn spaces_survive_json(space in ultrametric(8)) {
        let text = serde_json::to_string(&space).unwrap();
        prop_assert_eq!(&parse_space_str(&text, SpaceFormat::Json).unwrap(), &space);
    }
}

/// `num / 8` as a big rational.
fn num_delta(num: i64) -> num_rational::BigRational {
    Rational::new(num, 8).as_big().clone()
}

#[test]
fn every_forbidden_quad_has_a_classification_matching_direct_similarity() {
    let spec = GeneratorSpec::exhaustive(4, alphabet(3));
    for space in enumerate_ultrametrics(&spec).unwrap() {
        if let Some(w) = forbidden_scan(&space).unwrap() {
            let sub = space.restrict(&w.quad).unwrap();
            let x = weakly_similar(&sub, &ModelName::X4.space()).unwrap().is_some();
            let y = weakly_similar(&sub, &ModelName::Y4.space()).unwrap().is_some();
            assert!(x != y);
            assert_eq!(w.model() == ForbiddenModel::X4, x);
        }
    }
}

#[test]
fn adjunction_away_from_the_center_can_break_us() {
    // p3 is the center; a twin of p1 forms the 4-cycle p1-p3-c-p4
    let space = FiniteMetricSpace::parse(
        &["p1", "p2", "p3", "p4"],
        &[&["0", "2", "2", "2"], &["2", "0", "2", "2"], &["2", "2", "0", "1"], &["2", "2", "1", "0"]],
    )
    .unwrap();
    assert!(forbidden_scan(&space).unwrap().is_none());
    let out = space.adjoin_near("p1", &Rational::new(1, 8)).unwrap();
    let w = forbidden_scan(&out).unwrap().unwrap();
    assert_eq!(w.quad, ["p1", "p3", "p4", "c"]);
    let safe = space.adjoin_near(&find_center(&space).unwrap().unwrap().center, &Rational::new(1, 8)).unwrap();
    assert!(forbidden_scan(&safe).unwrap().is_none());
}
