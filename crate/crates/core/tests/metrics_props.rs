mod common;

use common::{
    brute_force_best, f1_from, oracle_credit, perturb_relation, q, random_relation, safe_ratio,
    strict_counts,
};
use kpi_edgar::metrics::{
    cohens_kappa, kappa_per_type, match_relations, prf, relation_counts, score_sentence, Agreement,
    ScoreAccumulator, WordLabelSequence,
};
use kpi_edgar::model::{EntitySpan, EntityType, Relation};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const N: usize = 16;

fn sentence_case(rng: &mut StdRng) -> (Vec<Relation>, Vec<Relation>) {
    let golds: Vec<Relation> = (0..rng.gen_range(0..=6))
        .map(|_| random_relation(rng, N))
        .collect();
    let mut preds = Vec::new();
    for g in &golds {
        if rng.gen_bool(0.7) {
            preds.push(if rng.gen_bool(0.4) {
                *g
            } else {
                perturb_relation(rng, g, N)
            });
        }
    }
    while preds.len() < 6 && rng.gen_bool(0.3) {
        preds.push(random_relation(rng, N));
    }
    (preds, golds)
}

fn span(start: usize, len: usize, t: EntityType) -> EntitySpan {
    EntitySpan::new(start, start + len, t).unwrap()
}

proptest! {
    #[test]
    fn matching_reaches_the_brute_force_optimum(seed in any::<u64>()) {
        let (preds, golds) = sentence_case(&mut StdRng::seed_from_u64(seed));
        let a = match_relations(&preds, &golds);
        let (tp, fp) = brute_force_best(&preds, &golds);
        prop_assert_eq!(a.total_tp(), tp);
        let matched_fp = a.pairs.iter().fold(q(0, 1), |acc, p| acc + &p.counts.fp);
        prop_assert_eq!(matched_fp + q(a.unmatched_pred.len(), 1), fp);
        prop_assert_eq!(a.pairs.len() + a.unmatched_gold.len(), golds.len());
        prop_assert_eq!(a.pairs.len() + a.unmatched_pred.len(), preds.len());
        for p in &a.pairs {
            prop_assert_eq!(golds[p.gold].type_pair(), preds[p.pred].type_pair());
        }
    }

    #[test]
    fn counts_agree_with_the_oracle(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_relation(&mut rng, N);
        let p = perturb_relation(&mut rng, &g, N);
        let c = relation_counts(&p, &g);
        let (tp, fp) = oracle_credit(&p, &g).unwrap();
        prop_assert_eq!(&c.tp, &tp);
        prop_assert_eq!(&c.fp, &fp);
        prop_assert_eq!(&c.tp + &c.fn_, q(1, 1));
    }

    #[test]
    fn counts_ignore_argument_order_of_endpoints(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_relation(&mut rng, N);
        let p = perturb_relation(&mut rng, &g, N);
        let g_swapped = Relation::new(g.tail(), g.head());
        let p_swapped = Relation::new(p.tail(), p.head());
        prop_assert_eq!(relation_counts(&p_swapped, &g_swapped), relation_counts(&p, &g));
    }

    #[test]
    fn wider_overlap_never_hurts(gold_len in 2usize..6, pred_len in 1usize..6, shift in 0usize..6) {
        let gold = Relation::new(span(6, gold_len, EntityType::Kpi), span(14, 1, EntityType::Cy));
        let cy = span(14, 1, EntityType::Cy);
        // slide a fixed-size kpi prediction from far away towards the gold span
        let far = Relation::new(span(6 + shift + 1, pred_len, EntityType::Kpi), cy);
        let near = Relation::new(span(6 + shift, pred_len, EntityType::Kpi), cy);
        let (cf, cn) = (relation_counts(&far, &gold), relation_counts(&near, &gold));
        if kpi_overlap(&near, &gold) >= kpi_overlap(&far, &gold) {
            prop_assert!(cn.tp >= cf.tp);
            prop_assert!(cn.fp <= cf.fp);
        }
    }

    #[test]
    fn adjusted_f1_dominates_strict(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut acc = ScoreAccumulator::new();
        let (mut correct, mut npred, mut ngold) = (0, 0, 0);
        for _ in 0..rng.gen_range(1..8) {
            let (preds, golds) = sentence_case(&mut rng);
            acc.add(&score_sentence(&preds, &golds));
            let (c, p, g) = strict_counts(&preds, &golds);
            correct += c;
            npred += p;
            ngold += g;
        }
        let r = acc.finish();
        let strict_p = safe_ratio(&q(correct, 1), &q(npred, 1));
        let strict_r = safe_ratio(&q(correct, 1), &q(ngold, 1));
        prop_assert_eq!(&r.strict.f1, &f1_from(&strict_p, &strict_r));
        prop_assert!(r.adjusted.f1 >= r.strict.f1, "{} < {}", r.adjusted.f1, r.strict.f1);
    }

    #[test]
    fn exact_predictions_make_both_scores_equal(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut acc = ScoreAccumulator::new();
        for _ in 0..rng.gen_range(1..6) {
            let golds: Vec<Relation> = (0..rng.gen_range(1..=6)).map(|_| random_relation(&mut rng, N)).collect();
            acc.add(&score_sentence(&golds, &golds));
        }
        let r = acc.finish();
        prop_assert_eq!(&r.strict, &r.adjusted);
        prop_assert_eq!(r.adjusted.f1.clone(), q(1, 1));
    }

    #[test]
    fn kappa_is_unchanged_by_repetition(
        pairs in prop::collection::vec((0usize..4, 0usize..4), 2..40),
        k in 2usize..5,
    ) {
        let labels = [EntityType::None, EntityType::Kpi, EntityType::Cy, EntityType::Attr];
        let a: Vec<EntityType> = pairs.iter().map(|p| labels[p.0]).collect();
        let b: Vec<EntityType> = pairs.iter().map(|p| labels[p.1]).collect();
        let once = cohens_kappa(&a.clone().into(), &b.clone().into()).unwrap();
        let rep = |v: &Vec<EntityType>| -> WordLabelSequence { v.repeat(k).into() };
        let many = cohens_kappa(&rep(&a), &rep(&b)).unwrap();
        prop_assert!((once - many).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&once));

        let per_once = kappa_per_type(&a.clone().into(), &b.clone().into(), EntityType::Kpi).unwrap();
        let per_many = kappa_per_type(&rep(&a), &rep(&b), EntityType::Kpi).unwrap();
        match (per_once, per_many) {
            (Agreement::Defined(x), Agreement::Defined(y)) => prop_assert!((x - y).abs() < 1e-12),
            (x, y) => prop_assert_eq!(x, y),
        }
    }
}

fn kpi_overlap(p: &Relation, g: &Relation) -> usize {
    let (pk, gk) = (p.type_aligned().0, g.type_aligned().0);
    (pk.start..pk.end)
        .filter(|i| (gk.start..gk.end).contains(i))
        .count()
}

#[test]
fn matched_counts_divide_like_the_formula() {
    let gold = Relation::new(span(5, 3, EntityType::Kpi), span(10, 1, EntityType::Cy));
    let pred = Relation::new(span(6, 2, EntityType::Kpi), span(10, 1, EntityType::Cy));
    let s = prf(&relation_counts(&pred, &gold));
    assert_eq!(s.precision, q(1, 1));
    assert_eq!(s.recall, q(5, 6));
    assert_eq!(s.f1, q(10, 11));
}
