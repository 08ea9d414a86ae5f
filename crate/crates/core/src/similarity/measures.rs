//! The five model similarity measures.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::assignment::{optimal_assignment, GainMatrix};
use super::ged::ged_raw;
use super::levenshtein::normalized_levenshtein;
use super::{MeasureId, Score, SimilarityConfig};
use crate::petri::{
    bounded_language, ef_relation, BoundedLanguage, EFRelation, LabeledPetriNet, LocalProcessModel, PlaceId, Trace,
};

/// Dice coefficient `2|X ∩ Y| / (|X| + |Y|)`; two empty sets count as equal.
pub fn dice<T: Ord>(x: &BTreeSet<T>, y: &BTreeSet<T>) -> f64 {
    let total = x.len() + y.len();
    if total == 0 {
        return 1.0;
    }
    (2 * x.intersection(y).count()) as f64 / total as f64
}

pub fn sim_transition(a: &LocalProcessModel, b: &LocalProcessModel) -> f64 {
    dice(&a.net().activity_labels(), &b.net().activity_labels())
}

/// Half the Dice overlap of the input labels plus half that of the output
/// labels. Silent labels take part like any other label here.
pub fn place_gain(a: &LabeledPetriNet, p1: PlaceId, b: &LabeledPetriNet, p2: PlaceId) -> f64 {
    0.5 * dice(&a.place_input_labels(p1), &b.place_input_labels(p2))
        + 0.5 * dice(&a.place_output_labels(p1), &b.place_output_labels(p2))
}

fn dice_exact<T: Ord>(x: &BTreeSet<T>, y: &BTreeSet<T>) -> BigRational {
    let total = x.len() + y.len();
    if total == 0 {
        return BigRational::one();
    }
    BigRational::new(BigInt::from(2 * x.intersection(y).count()), BigInt::from(total))
}

pub(crate) fn place_gain_exact(a: &LabeledPetriNet, p1: PlaceId, b: &LabeledPetriNet, p2: PlaceId) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (dice_exact(&a.place_input_labels(p1), &b.place_input_labels(p2))
        + dice_exact(&a.place_output_labels(p1), &b.place_output_labels(p2)))
        * half
}

fn place_gains(a: &LabeledPetriNet, b: &LabeledPetriNet) -> GainMatrix {
    GainMatrix::from_fn(a.place_count(), b.place_count(), |i, j| {
        place_gain(a, PlaceId(i), b, PlaceId(j))
    })
}

pub(crate) fn sim_node_nets(a: &LabeledPetriNet, b: &LabeledPetriNet) -> f64 {
    let (la, lb) = (a.activity_labels(), b.activity_labels());
    let denominator = la.len() + lb.len() + a.place_count() + b.place_count();
    if denominator == 0 {
        return 1.0;
    }
    let shared = la.intersection(&lb).count() as f64;
    let places = optimal_assignment(&place_gains(a, b)).total_gain;
    ((2.0 * shared + 2.0 * places) / denominator as f64).min(1.0)
}

/// Calls `f` with the operands in a fixed order so that measures built on
/// order-sensitive float reductions stay exactly symmetric.
fn ordered<'m, R>(
    a: &'m LocalProcessModel,
    b: &'m LocalProcessModel,
    f: impl FnOnce(&'m LocalProcessModel, &'m LocalProcessModel) -> R,
) -> R {
    if model_key(a) <= model_key(b) {
        f(a, b)
    } else {
        f(b, a)
    }
}

pub(crate) fn model_key(m: &LocalProcessModel) -> String {
    format!("{}|{:?}|{:?}", m.net().canonical_key(), m.initial(), m.final_marking())
}

pub fn sim_node(a: &LocalProcessModel, b: &LocalProcessModel) -> f64 {
    ordered(a, b, |x, y| sim_node_nets(x.net(), y.net()))
}

pub(crate) fn efg_from_relations(a: &EFRelation, b: &EFRelation) -> f64 {
    dice(&a.pairs, &b.pairs)
}

pub fn sim_efg(a: &LocalProcessModel, b: &LocalProcessModel, bound: usize, config: &SimilarityConfig) -> Score {
    let la = bounded_language(a, bound, config.exploration_cap);
    let lb = bounded_language(b, bound, config.exploration_cap);
    Score {
        value: efg_from_relations(&ef_relation(&la), &ef_relation(&lb)),
        approximate: la.truncated || lb.truncated,
    }
}

/// At most `cap` traces, shortest first, then lexicographic.
pub(crate) fn capped_traces(language: &BoundedLanguage, cap: usize) -> (Vec<&Trace>, bool) {
    let mut traces: Vec<&Trace> = language.traces.iter().collect();
    traces.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    let capped = traces.len() > cap;
    traces.truncate(cap);
    (traces, capped)
}

/// Expects `a` and `b` already in canonical order.
pub(crate) fn full_from_languages(a: &BoundedLanguage, b: &BoundedLanguage, language_cap: usize) -> Score {
    let (ta, capped_a) = capped_traces(a, language_cap);
    let (tb, capped_b) = capped_traces(b, language_cap);
    let approximate = a.truncated || b.truncated || capped_a || capped_b;
    let value = match (ta.is_empty(), tb.is_empty()) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => {
            let gains = GainMatrix::from_fn(ta.len(), tb.len(), |i, j| 1.0 - normalized_levenshtein(ta[i], tb[j]));
            let total = optimal_assignment(&gains).total_gain;
            (2.0 * total / (ta.len() + tb.len()) as f64).min(1.0)
        }
    };
    Score { value, approximate }
}

pub fn sim_full(a: &LocalProcessModel, b: &LocalProcessModel, bound: usize, config: &SimilarityConfig) -> Score {
    ordered(a, b, |x, y| {
        let lx = bounded_language(x, bound, config.exploration_cap);
        let ly = bounded_language(y, bound, config.exploration_cap);
        full_from_languages(&lx, &ly, config.language_cap)
    })
}

/// Expects `a` and `b` already in canonical order.
pub(crate) fn ged_similarity_nets(a: &LabeledPetriNet, b: &LabeledPetriNet, budget: usize) -> Score {
    let baseline = a.size() + b.size();
    if baseline == 0 {
        return Score::exact(1.0);
    }
    let outcome = ged_raw(a, b, budget);
    Score {
        value: (1.0 - outcome.cost / baseline as f64).clamp(0.0, 1.0),
        approximate: !outcome.exact,
    }
}

/// `1 - ged / (size(a) + size(b))` with `size = |P| + |T| + |F|`.
pub fn sim_ged(a: &LocalProcessModel, b: &LocalProcessModel, config: &SimilarityConfig) -> Score {
    ordered(a, b, |x, y| ged_similarity_nets(x.net(), y.net(), config.ged_budget))
}

pub fn similarity(measure: MeasureId, a: &LocalProcessModel, b: &LocalProcessModel, config: &SimilarityConfig) -> Score {
    match measure {
        MeasureId::Transition => Score::exact(sim_transition(a, b)),
        MeasureId::Node => Score::exact(sim_node(a, b)),
        MeasureId::Efg(n) => sim_efg(a, b, n, config),
        MeasureId::Full(n) => sim_full(a, b, n, config),
        MeasureId::Ged => sim_ged(a, b, config),
    }
}

/// `1 - similarity`.
pub fn distance(measure: MeasureId, a: &LocalProcessModel, b: &LocalProcessModel, config: &SimilarityConfig) -> Score {
    let s = similarity(measure, a, b, config);
    Score {
        value: 1.0 - s.value,
        approximate: s.approximate,
    }
}
