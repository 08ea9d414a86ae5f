//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::Rng;

use lpm_group::analysis::{group, mean_pairwise_distance, top_n};
use lpm_group::clustering::{
    agglomerate, default_thresholds, silhouette, ClusterSet, ClusteringParams, Merge, RankedModelSet,
    RepresentativeStrategy,
};
use lpm_group::exec::Execution;
use lpm_group::io::write_model_set;
use lpm_group::petri::{bounded_language, valid_complete_firing_sequences, LocalProcessModel, DEFAULT_BOUND};
use lpm_group::similarity::{
    distance_matrix, ged_raw, normalized_levenshtein, optimal_assignment, similarity, MeasureId, SimilarityConfig,
    DEFAULT_GED_BUDGET,
};
use lpm_group::synth::{planted_population, random_lpm, rng, GeneratorConfig};

use support::*;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail.into())
    }
}

fn within(elapsed: Duration, limit_secs: u64, what: &str) -> Result<(), String> {
    check(
        elapsed < Duration::from_secs(limit_secs),
        format!("{what} took {:.1} s, limit {limit_secs} s", elapsed.as_secs_f64()),
    )
}

fn measure_axioms() -> Outcome {
    let start = Instant::now();
    let config = SimilarityConfig::default();
    let mut r = rng(2024);
    let models: Vec<LocalProcessModel> = (0..200)
        .map(|i| random_lpm(&mut r, format!("m{i:03}"), &GeneratorConfig::default()))
        .collect();
    for m in &models {
        check(m.net().transition_count() <= 8 && m.net().place_count() <= 6, format!("{} too large", m.id()))?;
    }
    let measures = MeasureId::all(DEFAULT_BOUND);
    let indices: Vec<usize> = (0..models.len()).collect();
    let failures: Vec<String> = Execution::Parallel
        .map(&indices, |&i| {
            let (a, b) = (&models[i], &models[(i + 1) % models.len()]);
            let twin = a.with_id("twin");
            let mut errs = Vec::new();
            for measure in measures {
                let ab = similarity(measure, a, b, &config);
                let ba = similarity(measure, b, a, &config);
                if ab != ba {
                    errs.push(format!("{measure}: sim({},{}) = {:?} vs {:?}", a.id(), b.id(), ab, ba));
                }
                if !(0.0..=1.0).contains(&ab.value) {
                    errs.push(format!("{measure}: sim({},{}) = {} out of range", a.id(), b.id(), ab.value));
                }
                let self_exact = match measure {
                    MeasureId::Efg(n) | MeasureId::Full(n) => !bounded_language(a, n, config.exploration_cap).truncated,
                    _ => true,
                };
                let aa = similarity(measure, a, &twin, &config);
                if self_exact && aa.value != 1.0 {
                    errs.push(format!("{measure}: sim({0},{0}) = {1}", a.id(), aa.value));
                }
            }
            errs
        })
        .into_iter()
        .flatten()
        .collect();
    check(failures.is_empty(), failures.join("; "))?;
    within(start.elapsed(), 300, "measure axioms")?;
    Ok(format!(
        "200 models, 200 pairs x 5 measures (n = {DEFAULT_BOUND}): symmetric, in [0,1], reflexive ({:.1} s)",
        start.elapsed().as_secs_f64()
    ))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(77);

    let mut largest = (0, 0);
    for k in 0..500 {
        let (rows, cols) = if k < 50 { (7, 7) } else { (r.gen_range(0..=7), r.gen_range(0..=7)) };
        let m = dyadic_gain_matrix(&mut r, rows, cols);
        let got = optimal_assignment(&m).total_gain;
        let want = brute_force_assignment(&m);
        check(got == want, format!("assignment {rows}x{cols}: {got} vs brute force {want}"))?;
        largest = largest.max((rows, cols));
    }

    let alphabet = ["a", "b", "c", "d"];
    for _ in 0..1000 {
        let (x, y) = (random_trace(&mut r, 6, &alphabet), random_trace(&mut r, 6, &alphabet));
        let (got, want) = (normalized_levenshtein(&x, &y), normalized_levenshtein_oracle(&x, &y));
        check(got == want, format!("levenshtein {:?} {:?}: {got} vs {want}", x.0, y.0))?;
    }

    let net_config = GeneratorConfig {
        max_transitions: 5,
        max_places: 4,
        random_markings: true,
        ..GeneratorConfig::default()
    };
    let mut sequences = 0;
    for k in 0..100 {
        let m = random_lpm(&mut r, format!("n{k}"), &net_config);
        let bound = 1 + k % 6;
        let got = valid_complete_firing_sequences(&m, bound, usize::MAX);
        let got: BTreeSet<_> = got.sequences.into_iter().map(|s| s.0).collect();
        let want = generate_and_test(m.net(), m.initial(), m.final_marking(), bound);
        check(got == want, format!("firing sequences of net {k} (n = {bound}) differ"))?;
        sequences += want.len();
    }

    let small = GeneratorConfig {
        max_transitions: 3,
        max_places: 3,
        alphabet: 3,
        silent_probability: 0.2,
        extra_arc_probability: 0.2,
        random_markings: false,
    };
    let mut nodes = 0;
    for k in 0..50 {
        let a = random_lpm(&mut r, "a", &small);
        let b = random_lpm(&mut r, "b", &small);
        let outcome = ged_raw(a.net(), b.net(), DEFAULT_GED_BUDGET);
        let want = exhaustive_ged(a.net(), b.net()).to_f64().unwrap();
        check(outcome.exact && outcome.cost == want, format!("ged pair {k}: {} vs exhaustive {want}", outcome.cost))?;
        nodes = nodes.max(a.net().place_count() + a.net().transition_count());
    }

    within(start.elapsed(), 600, "oracle equivalence")?;
    Ok(format!(
        "500 assignments (up to {}x{}), 1000 trace pairs, 100 nets ({sequences} sequences), 50 GED pairs (up to {nodes} nodes) ({:.1} s)",
        largest.0,
        largest.1,
        start.elapsed().as_secs_f64()
    ))
}

fn clustering_correctness() -> Outcome {
    let three = matrix_from_fn(3, |i, j| if (i, j) == (0, 1) { 0.1 } else { 0.9 });
    let (c, d) = agglomerate(&three, &ClusteringParams::complete(0.5));
    check(c.clusters() == [vec![0, 1], vec![2]], format!("3-point clusters {c}"))?;
    let expected = [
        Merge { left: 0, right: 1, distance: 0.1, size: 2 },
        Merge { left: 3, right: 2, distance: 0.9, size: 3 },
    ];
    check(d.merges() == expected, format!("3-point merges {:?}", d.merges()))?;

    // 0-1 at 0.1, 2-3 at 0.2, then the pairs join at max(0.5, 0.6, 0.55, 0.7) = 0.7.
    let table = [[0.0, 0.1, 0.5, 0.6], [0.1, 0.0, 0.55, 0.7], [0.5, 0.55, 0.0, 0.2], [0.6, 0.7, 0.2, 0.0]];
    let four = matrix_from_fn(4, |i, j| table[i][j]);
    let (_, d) = agglomerate(&four, &ClusteringParams::complete(1.0));
    let expected = [
        Merge { left: 0, right: 1, distance: 0.1, size: 2 },
        Merge { left: 2, right: 3, distance: 0.2, size: 2 },
        Merge { left: 4, right: 5, distance: 0.7, size: 4 },
    ];
    check(d.merges() == expected, format!("4-point merges {:?}", d.merges()))?;
    for (t, want) in [(0.15, 3), (0.65, 2), (0.7, 2), (0.75, 1)] {
        let got = agglomerate(&four, &ClusteringParams::complete(t)).0.len();
        check(got == want, format!("4-point at {t}: {got} clusters, expected {want}"))?;
    }

    let mut r = rng(5);
    for k in 0..20 {
        let n = r.gen_range(5..=30);
        let m = random_distance_matrix(&mut r, n);
        let counts: Vec<usize> = default_thresholds()
            .iter()
            .map(|&t| agglomerate(&m, &ClusteringParams::complete(t)).0.len())
            .collect();
        check(counts.windows(2).all(|w| w[0] >= w[1]), format!("matrix {k}: counts {counts:?}"))?;
    }

    let pairs = matrix_from_fn(4, |i, j| if i / 2 == j / 2 { 0.1 } else { 0.9 });
    let clusters = ClusterSet::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
    let s = silhouette(&pairs, &clusters).ok_or("silhouette undefined")?;
    let manual = (0.9 - 0.1) / 0.9;
    check((s - manual).abs() <= 1e-12, format!("silhouette {s} vs {manual}"))?;
    Ok(format!("3- and 4-point traces exact, 20 monotone sweeps, silhouette {s:.12}"))
}

fn planted_set() -> (RankedModelSet, Vec<usize>) {
    let planted = planted_population(5, 20);
    let ranks = planted.front_loaded_ranks(11);
    let groups = planted.groups.clone();
    (RankedModelSet::new(planted.models, ranks).unwrap(), groups)
}

fn pipeline_protocol() -> Outcome {
    let start = Instant::now();
    let (ranked, groups) = planted_set();
    let m = distance_matrix(ranked.models(), MeasureId::Transition, &SimilarityConfig::default(), Execution::Parallel)
        .map_err(|e| e.to_string())?;
    let (mut within_max, mut between_min) = (0.0f64, 1.0f64);
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if groups[i] == groups[j] {
                within_max = within_max.max(m.get(i, j));
            } else {
                between_min = between_min.min(m.get(i, j));
            }
        }
    }
    check(within_max <= 0.2 && between_min >= 0.7, format!("fixture within {within_max}, between {between_min}"))?;
    let grouping = group(&ranked, &m, &default_thresholds(), RepresentativeStrategy::Dist).map_err(|e| e.to_string())?;
    let reps = grouping.representatives.len();
    check(reps == 5, format!("{reps} representatives"))?;
    let rep_groups: BTreeSet<usize> = grouping.representatives.iter().map(|&i| groups[i]).collect();
    check(rep_groups.len() == 5, "representatives do not cover every group")?;
    within(start.elapsed(), 60, "pipeline")?;
    Ok(format!(
        "100 models -> {reps} representatives (within <= {within_max:.3}, between >= {between_min:.3}, threshold {}) ({:.2} s)",
        grouping.sweep.selected().threshold,
        start.elapsed().as_secs_f64()
    ))
}

fn diversity_improvement() -> Outcome {
    let (ranked, _) = planted_set();
    let m = distance_matrix(ranked.models(), MeasureId::Transition, &SimilarityConfig::default(), Execution::Parallel)
        .map_err(|e| e.to_string())?;
    let grouping = group(&ranked, &m, &default_thresholds(), RepresentativeStrategy::Dist).map_err(|e| e.to_string())?;
    let reps = grouping.representative_set(&ranked).map_err(|e| e.to_string())?;
    let ids = |set: &RankedModelSet| -> Vec<String> { top_n(set, 5).iter().map(|(m, _)| m.id().to_string()).collect() };
    let original = mean_pairwise_distance(&ids(&ranked), &m).map_err(|e| e.to_string())?.ok_or("undefined")?;
    let representative = mean_pairwise_distance(&ids(&reps), &m).map_err(|e| e.to_string())?.ok_or("undefined")?;
    let gap = representative - original;
    check(gap >= 0.3, format!("gap {gap:.4} (original {original:.4}, representatives {representative:.4})"))?;
    Ok(format!("top-5 mean distance {original:.4} -> {representative:.4}, gap {gap:.4}"))
}

fn cli(args: &[&str], out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_lpm-group"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    check(status.status.success(), format!("{args:?}: {}", String::from_utf8_lossy(&status.stderr)))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut r = rng(99);
    let models: Vec<LocalProcessModel> = (0..40)
        .map(|i| random_lpm(&mut r, format!("m{i:02}"), &GeneratorConfig::default()))
        .collect();
    let ranked = RankedModelSet::in_order(models).unwrap();
    let manifest = write_model_set(dir.path(), &ranked, None, None).map_err(|e| e.to_string())?;
    let manifest = manifest.to_str().unwrap();

    let mut compared = 0;
    for (cmd, measure) in [("matrix", "ged"), ("cluster", "efg"), ("diversity", "full"), ("cluster", "node")] {
        let mut runs = Vec::new();
        for (k, threads) in ["1", "4", "1", "8"].iter().enumerate() {
            let out = dir.path().join(format!("{cmd}-{measure}-{k}"));
            cli(
                &[
                    cmd, "--manifest", manifest, "--measure", measure, "--bound", "5", "--ged-budget", "20000",
                    "--threads", threads,
                ],
                &out,
            )?;
            runs.push(files(&out));
        }
        for run in &runs[1..] {
            check(*run == runs[0], format!("{cmd} --measure {measure}: outputs differ across runs"))?;
        }
        compared += runs[0].len();
    }
    Ok(format!("4 commands x 4 runs (threads 1/4/1/8), {compared} files byte-identical"))
}

fn scale() -> Outcome {
    let mut r = rng(600);
    let models: Vec<LocalProcessModel> = (0..600)
        .map(|i| random_lpm(&mut r, format!("m{i:03}"), &GeneratorConfig::default()))
        .collect();
    let config = SimilarityConfig::default();
    let start = Instant::now();
    distance_matrix(&models, MeasureId::Transition, &config, Execution::Parallel).map_err(|e| e.to_string())?;
    let transition = start.elapsed();
    within(transition, 60, "transition matrix over 600 models")?;

    let start = Instant::now();
    let m = distance_matrix(&models[..100], MeasureId::Efg(5), &config, Execution::Parallel).map_err(|e| e.to_string())?;
    let efg = start.elapsed();
    within(efg, 120, "efg matrix over 100 models")?;
    Ok(format!(
        "transition 600 models {:.2} s; efg n=5 100 models {:.2} s ({} approximate pairs)",
        transition.as_secs_f64(),
        efg.as_secs_f64(),
        m.approximate_pairs().len()
    ))
}

fn main() {
    // Ignore the harness flags cargo passes (e.g. --nocapture, filters).
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("measure-axioms", measure_axioms),
        ("oracle-equivalence", oracle_equivalence),
        ("clustering-correctness", clustering_correctness),
        ("pipeline-protocol", pipeline_protocol),
        ("diversity-improvement", diversity_improvement),
        ("determinism", determinism),
        ("scale-smoke", scale),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
