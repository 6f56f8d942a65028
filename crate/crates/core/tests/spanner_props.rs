use kpi_edgar::model::{EntityType, Interval};
use kpi_edgar::spanner::{enumerate_spans, filter_overlaps, ScoredSpan};
use proptest::prelude::*;

fn candidates() -> impl Strategy<Value = Vec<ScoredSpan>> {
    prop::collection::vec((0usize..20, 1usize..6, 0usize..3, 0u32..=20), 0..30).prop_map(|v| {
        v.into_iter()
            .map(|(start, len, t, s)| {
                // coarse scores so that ties actually occur
                ScoredSpan::new(
                    start,
                    start + len,
                    EntityType::ANNOTATED[t],
                    f64::from(s) / 20.0,
                )
                .unwrap()
            })
            .collect()
    })
}

fn outranks(a: &ScoredSpan, b: &ScoredSpan) -> bool {
    (
        a.score,
        std::cmp::Reverse(a.span.len()),
        std::cmp::Reverse(a.span.start),
    ) >= (
        b.score,
        std::cmp::Reverse(b.span.len()),
        std::cmp::Reverse(b.span.start),
    )
}

proptest! {
    #[test]
    fn enumeration_matches_brute_force(n in 0usize..=20, max_len in 0usize..=12) {
        let got = enumerate_spans(n, max_len);
        let mut want = Vec::new();
        for a in 0..n {
            for b in a + 1..=n {
                if b - a <= max_len {
                    want.push(Interval::new(a, b));
                }
            }
        }
        prop_assert_eq!(got.len(), want.len());
        let mut sorted = got.clone();
        sorted.sort();
        prop_assert_eq!(sorted, want);
        // ordered by length, then start
        prop_assert!(got.windows(2).all(|w| (w[0].len(), w[0].start) < (w[1].len(), w[1].start)));
    }

    #[test]
    fn kept_spans_are_disjoint_and_sorted(c in candidates()) {
        let kept = filter_overlaps(&c);
        for (i, a) in kept.iter().enumerate() {
            for b in &kept[i + 1..] {
                prop_assert!(!a.span.overlaps(&b.span));
                prop_assert!(a.span.start < b.span.start);
            }
            prop_assert!(c.contains(a));
        }
    }

    #[test]
    fn every_dropped_span_loses_to_a_kept_one(c in candidates()) {
        let kept = filter_overlaps(&c);
        for d in c.iter().filter(|d| !kept.contains(d)) {
            prop_assert!(
                kept.iter().any(|k| k.span.overlaps(&d.span) && outranks(k, d)),
                "{:?} dropped without a better overlapping span", d
            );
        }
    }

    #[test]
    fn filtering_is_idempotent(c in candidates()) {
        let once = filter_overlaps(&c);
        prop_assert_eq!(filter_overlaps(&once), once);
    }

    #[test]
    fn input_order_is_irrelevant(c in candidates(), seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut shuffled = c.clone();
        shuffled.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
        prop_assert_eq!(filter_overlaps(&shuffled), filter_overlaps(&c));
    }
}
