//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the crate's algorithms; only plain accessors of
//! nets and matrices are used.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use lpm_group::petri::{Arc, Label, LabeledPetriNet, Marking, PlaceId, Trace, TransitionId};
use lpm_group::similarity::{DistanceMatrix, GainMatrix, MeasureId};

/// Maximum of `Σ gain` over all injective row/column pairings, summed in
/// row order. Every row (or every column, whichever is fewer) is paired.
pub fn brute_force_assignment(m: &GainMatrix) -> f64 {
    fn rec(m: &GainMatrix, row: usize, used: &mut Vec<bool>, transpose: bool, acc: f64, best: &mut f64) {
        let (rows, cols) = if transpose { (m.cols(), m.rows()) } else { (m.rows(), m.cols()) };
        if row == rows {
            if acc > *best {
                *best = acc;
            }
            return;
        }
        for c in 0..cols {
            if !used[c] {
                used[c] = true;
                let g = if transpose { m.get(c, row) } else { m.get(row, c) };
                rec(m, row + 1, used, transpose, acc + g, best);
                used[c] = false;
            }
        }
    }
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    // Enumerate over the smaller side so sums run in row order when rows <= cols.
    let transpose = m.rows() > m.cols();
    let cols = if transpose { m.rows() } else { m.cols() };
    let mut best = f64::NEG_INFINITY;
    let mut used = vec![false; cols];
    rec(m, 0, &mut used, transpose, 0.0, &mut best);
    best
}

/// Gains `k / 1024`, so every sum is exact in `f64`.
pub fn dyadic_gain_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> GainMatrix {
    GainMatrix::from_fn(rows, cols, |_, _| rng.gen_range(0..=1024) as f64 / 1024.0)
}

/// The textbook recursion, memoized on suffix positions.
pub fn recursive_levenshtein(a: &[String], b: &[String]) -> usize {
    fn d(a: &[String], b: &[String], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            d(a, b, i + 1, j + 1, memo)
        } else {
            1 + d(a, b, i + 1, j, memo)
                .min(d(a, b, i, j + 1, memo))
                .min(d(a, b, i + 1, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    d(a, b, 0, 0, &mut HashMap::new())
}

pub fn normalized_levenshtein_oracle(a: &Trace, b: &Trace) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        0.0
    } else {
        recursive_levenshtein(&a.0, &b.0) as f64 / longest as f64
    }
}

pub fn random_trace<R: Rng>(rng: &mut R, max_len: usize, alphabet: &[&str]) -> Trace {
    let len = rng.gen_range(0..=max_len);
    Trace::new((0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]))
}

/// Replays a transition sequence with the free-token rule; `None` if some
/// step is not enabled.
fn replay(net: &LabeledPetriNet, initial: &Marking, seq: &[TransitionId]) -> Option<Vec<u32>> {
    let n = net.place_count();
    let mut tokens: Vec<u32> = (0..n).map(|p| initial.count(PlaceId(p))).collect();
    let mut free_used = vec![false; n];
    for &t in seq {
        let pre = net.preset(t);
        let post = net.postset(t);
        if pre.is_empty() {
            if post.iter().any(|p| free_used[p.0]) {
                return None;
            }
            for p in post {
                free_used[p.0] = true;
            }
        } else if pre.iter().any(|p| tokens[p.0] == 0) {
            return None;
        }
        for p in pre {
            tokens[p.0] -= 1;
        }
        for p in post {
            tokens[p.0] += 1;
        }
    }
    Some(tokens)
}

/// Every sequence of length `1..=bound` over all transitions, kept if it
/// replays and ends in `final_marking`.
pub fn generate_and_test(
    net: &LabeledPetriNet,
    initial: &Marking,
    final_marking: &Marking,
    bound: usize,
) -> BTreeSet<Vec<TransitionId>> {
    let target: Vec<u32> = (0..net.place_count()).map(|p| final_marking.count(PlaceId(p))).collect();
    let ts: Vec<TransitionId> = net.transitions().collect();
    let mut out = BTreeSet::new();
    for len in 1..=bound {
        let total = ts.len().pow(len as u32);
        for code in 0..total {
            let mut c = code;
            let seq: Vec<TransitionId> = (0..len)
                .map(|_| {
                    let t = ts[c % ts.len()];
                    c /= ts.len();
                    t
                })
                .collect();
            if replay(net, initial, &seq).as_deref() == Some(&target[..]) {
                out.insert(seq);
            }
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Vertex {
    Place(PlaceId),
    Transition(TransitionId),
}

fn vertices(net: &LabeledPetriNet) -> Vec<Vertex> {
    net.places()
        .map(Vertex::Place)
        .chain(net.transitions().map(Vertex::Transition))
        .collect()
}

fn edges(net: &LabeledPetriNet, verts: &[Vertex]) -> Vec<(usize, usize)> {
    let pos = |v: Vertex| verts.iter().position(|&w| w == v).unwrap();
    net.arcs()
        .iter()
        .map(|arc| match *arc {
            Arc::PlaceToTransition(p, t) => (pos(Vertex::Place(p)), pos(Vertex::Transition(t))),
            Arc::TransitionToPlace(t, p) => (pos(Vertex::Transition(t)), pos(Vertex::Place(p))),
        })
        .collect()
}

fn rational_dice(x: &BTreeSet<&Label>, y: &BTreeSet<&Label>) -> BigRational {
    let total = x.len() + y.len();
    if total == 0 {
        BigRational::one()
    } else {
        BigRational::new(BigInt::from(2 * x.intersection(y).count()), BigInt::from(total))
    }
}

fn rational_sub(a: &LabeledPetriNet, u: Vertex, b: &LabeledPetriNet, x: Vertex) -> BigRational {
    match (u, x) {
        (Vertex::Place(p), Vertex::Place(q)) => {
            let g = (rational_dice(&a.place_input_labels(p), &b.place_input_labels(q))
                + rational_dice(&a.place_output_labels(p), &b.place_output_labels(q)))
                / BigRational::from_integer(2.into());
            BigRational::one() - g
        }
        (Vertex::Transition(s), Vertex::Transition(t)) if a.label(s) == b.label(t) => BigRational::zero(),
        _ => BigRational::one(),
    }
}

/// Minimum edit cost over every partial injective node map from `a` to `b`.
pub fn exhaustive_ged(a: &LabeledPetriNet, b: &LabeledPetriNet) -> BigRational {
    let (va, vb) = (vertices(a), vertices(b));
    let (ea, eb) = (edges(a, &va), edges(b, &vb));
    let sub: Vec<Vec<BigRational>> = va
        .iter()
        .map(|&u| vb.iter().map(|&x| rational_sub(a, u, b, x)).collect())
        .collect();

    let cost = |map: &[Option<usize>]| -> BigRational {
        let one = BigRational::one();
        let two = BigRational::from_integer(2.into());
        let mut c = BigRational::zero();
        for (u, x) in map.iter().enumerate() {
            c += match x {
                Some(x) => sub[u][*x].clone(),
                None => one.clone(),
            };
        }
        let mapped: BTreeSet<usize> = map.iter().flatten().copied().collect();
        c += BigRational::from_integer((vb.len() - mapped.len()).into());
        let mut covered = BTreeSet::new();
        for &(u, v) in &ea {
            match (map[u], map[v]) {
                (Some(x), Some(y)) if eb.contains(&(x, y)) => {
                    covered.insert((x, y));
                    c += (sub[u][x].clone() + sub[v][y].clone()) / &two;
                }
                _ => c += &one,
            }
        }
        c += BigRational::from_integer((eb.len() - covered.len()).into());
        c
    };

    fn rec(
        u: usize,
        n: usize,
        used: &mut Vec<bool>,
        map: &mut Vec<Option<usize>>,
        cost: &dyn Fn(&[Option<usize>]) -> BigRational,
        best: &mut Option<BigRational>,
    ) {
        if u == n {
            let c = cost(map);
            if best.as_ref().is_none_or(|b| c < *b) {
                *best = Some(c);
            }
            return;
        }
        map[u] = None;
        rec(u + 1, n, used, map, cost, best);
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                map[u] = Some(x);
                rec(u + 1, n, used, map, cost, best);
                map[u] = None;
                used[x] = false;
            }
        }
    }

    let mut best = None;
    rec(0, va.len(), &mut vec![false; vb.len()], &mut vec![None; va.len()], &cost, &mut best);
    best.expect("at least the empty map")
}

/// Medoid by exhaustive enumeration of mean distances.
pub fn brute_force_medoid(cluster: &[usize], matrix: &DistanceMatrix, ranks: Option<&[u32]>) -> usize {
    let means: Vec<(usize, f64)> = cluster
        .iter()
        .map(|&i| {
            let others: Vec<usize> = cluster.iter().copied().filter(|&j| j != i).collect();
            let mean = if others.is_empty() {
                0.0
            } else {
                others.iter().map(|&j| matrix.get(i, j)).sum::<f64>() / others.len() as f64
            };
            (i, mean)
        })
        .collect();
    let min = means.iter().map(|&(_, m)| m).fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = means.iter().filter(|&&(_, m)| m == min).map(|&(i, _)| i).collect();
    match ranks {
        Some(r) => *tied.iter().min_by_key(|&&i| r[i]).unwrap(),
        None => *tied.iter().min_by(|&&x, &&y| matrix.id(x).cmp(matrix.id(y))).unwrap(),
    }
}

pub fn matrix_from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> DistanceMatrix {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = f(i, j);
            v[i * n + j] = d;
            v[j * n + i] = d;
        }
    }
    DistanceMatrix::from_parts(
        MeasureId::Transition,
        (0..n).map(|i| format!("m{i:03}")).collect(),
        v,
        vec![false; n * n],
    )
    .expect("valid matrix")
}

/// Symmetric matrix with distances on a coarse grid (so ties occur).
pub fn random_distance_matrix<R: Rng>(rng: &mut R, n: usize) -> DistanceMatrix {
    let values: Vec<f64> = (0..n * n).map(|_| rng.gen_range(0..=20) as f64 / 20.0).collect();
    matrix_from_fn(n, |i, j| values[i * n + j])
}
