//! Seeded generators for well-formed local process models.
//!
//! Used by tests, benchmarks and the CLI fixtures. Every generated net is
//! weakly connected and every place has an input and an output arc, by
//! construction.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::petri::{Label, LocalProcessModel, Marking, NetBuilder, PlaceId};

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub max_transitions: usize,
    pub max_places: usize,
    /// Labels are drawn from the first `alphabet` lowercase letters.
    pub alphabet: usize,
    pub silent_probability: f64,
    /// Probability of each additional place/transition arc.
    pub extra_arc_probability: f64,
    /// Put random tokens into the initial and final markings.
    pub random_markings: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            max_transitions: 8,
            max_places: 6,
            alphabet: 6,
            silent_probability: 0.1,
            extra_arc_probability: 0.1,
            random_markings: false,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_lpm<R: Rng>(rng: &mut R, id: impl Into<String>, config: &GeneratorConfig) -> LocalProcessModel {
    let nt = rng.gen_range(1..=config.max_transitions.max(1));
    let mut np = rng.gen_range(0..=config.max_places);
    if nt > 1 && np == 0 {
        np = 1;
    }
    let t_name = |i: usize| format!("t{i}");
    let p_name = |i: usize| format!("p{i}");

    let mut b = NetBuilder::new();
    for i in 0..nt {
        let label = if rng.gen_bool(config.silent_probability) {
            Label::Silent
        } else {
            let c = (b'a' + rng.gen_range(0..config.alphabet.clamp(1, 26)) as u8) as char;
            Label::activity(c.to_string())
        };
        b.transition(t_name(i), label);
    }

    // (inputs, outputs) per place, as transition indices.
    let mut places: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for i in 1..nt {
        let j = rng.gen_range(0..i);
        if places.len() < np {
            if rng.gen_bool(0.5) {
                places.push((vec![j], vec![i]));
            } else {
                places.push((vec![i], vec![j]));
            }
        } else {
            let place = rng.gen_range(0..places.len());
            if rng.gen_bool(0.5) {
                places[place].0.push(i);
            } else {
                places[place].1.push(i);
            }
        }
    }
    while places.len() < np {
        places.push((vec![rng.gen_range(0..nt)], vec![rng.gen_range(0..nt)]));
    }
    for place in places.iter_mut() {
        for t in 0..nt {
            if rng.gen_bool(config.extra_arc_probability) {
                place.0.push(t);
            }
            if rng.gen_bool(config.extra_arc_probability) {
                place.1.push(t);
            }
        }
    }
    for (pi, (inputs, outputs)) in places.iter().enumerate() {
        b.place(p_name(pi));
        for &t in inputs {
            b.arc(t_name(t), p_name(pi));
        }
        for &t in outputs {
            b.arc(p_name(pi), t_name(t));
        }
    }
    let net = b.build().expect("generated net is well formed");

    let (initial, final_marking) = if config.random_markings && np > 0 {
        let mut pick = || {
            let mut m = Marking::empty();
            for _ in 0..rng.gen_range(0..=2) {
                m.add(PlaceId(rng.gen_range(0..np)), 1);
            }
            m
        };
        (pick(), pick())
    } else {
        (Marking::empty(), Marking::empty())
    };
    LocalProcessModel::new(id, net, initial, final_marking).expect("generated model is valid")
}

/// A sequence-shaped model `x0 -> q0 -> x1 -> ... -> x_{k-1}` over `labels`.
pub fn chain_lpm(id: impl Into<String>, labels: &[String]) -> LocalProcessModel {
    let mut b = NetBuilder::new();
    for (i, label) in labels.iter().enumerate() {
        b.transition(format!("t{i:03}"), Label::activity(label.clone()));
        if i > 0 {
            let place = format!("q{:03}", i - 1);
            b.place(place.clone())
                .arc(format!("t{:03}", i - 1), place.clone())
                .arc(place, format!("t{i:03}"));
        }
    }
    LocalProcessModel::with_empty_markings(id, b.build().expect("chain is well formed")).expect("chain is valid")
}

/// Planted population: `groups` disjoint label alphabets, each copied
/// `copies` times with 0, 1 or 2 copy-specific extra labels.
///
/// Under the transition measure two copies of the same group are at most
/// `1 - 20/24 ≈ 0.167` apart and copies of different groups are at
/// distance 1.
#[derive(Debug, Clone)]
pub struct PlantedPopulation {
    pub models: Vec<LocalProcessModel>,
    /// Group index per model.
    pub groups: Vec<usize>,
}

pub const PLANTED_BASE_LABELS: usize = 10;

pub fn planted_population(groups: usize, copies: usize) -> PlantedPopulation {
    let mut models = Vec::new();
    let mut group_of = Vec::new();
    for g in 0..groups {
        for c in 0..copies {
            let mut labels: Vec<String> = (0..PLANTED_BASE_LABELS).map(|i| format!("g{g}_a{i}")).collect();
            for e in 0..c % 3 {
                labels.push(format!("g{g}_c{c}_x{e}"));
            }
            models.push(chain_lpm(format!("g{g}_c{c:02}"), &labels));
            group_of.push(g);
        }
    }
    PlantedPopulation {
        models,
        groups: group_of,
    }
}

impl PlantedPopulation {
    /// Ranks 1.. listing all of group 0 first, then the others in a
    /// seeded shuffle.
    pub fn front_loaded_ranks(&self, seed: u64) -> Vec<u32> {
        let mut order: Vec<usize> = (0..self.models.len()).filter(|&i| self.groups[i] == 0).collect();
        let mut rest: Vec<usize> = (0..self.models.len()).filter(|&i| self.groups[i] != 0).collect();
        rest.shuffle(&mut rng(seed));
        order.extend(rest);
        let mut ranks = vec![0; self.models.len()];
        for (pos, &i) in order.iter().enumerate() {
            ranks[i] = pos as u32 + 1;
        }
        ranks
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::validate_lpm;

    #[test]
    fn generated_models_are_valid_and_bounded() {
        let mut r = rng(7);
        let config = GeneratorConfig {
            random_markings: true,
            ..GeneratorConfig::default()
        };
        for i in 0..500 {
            let m = random_lpm(&mut r, format!("m{i}"), &config);
            assert!(validate_lpm(m.net(), m.initial(), m.final_marking()).is_ok());
            assert!(m.net().transition_count() <= 8);
            assert!(m.net().place_count() <= 6);
        }
    }

    #[test]
    fn generator_is_seeded() {
        let c = GeneratorConfig::default();
        let a: Vec<_> = (0..20).map(|i| random_lpm(&mut rng(3), format!("{i}"), &c)).collect();
        let b: Vec<_> = (0..20).map(|i| random_lpm(&mut rng(3), format!("{i}"), &c)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn planted_ranks_front_load_group_zero() {
        let pop = planted_population(3, 4);
        let ranks = pop.front_loaded_ranks(1);
        for (i, &r) in ranks.iter().enumerate() {
            assert_eq!(pop.groups[i] == 0, r <= 4);
        }
        let mut sorted = ranks.clone();
        sorted.sort();
        assert_eq!(sorted, (1..=12).collect::<Vec<u32>>());
    }
}
