//! One line per acceptance criterion. Run with `cargo test --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ufg_core::bench::davidson::davidson_prob;
use ufg_core::bench::davidson_fit;
use ufg_core::depth::consistency::{gap_table, reference_pmf};
use ufg_core::depth::{depth_map, empirical_depth, zero_depth_screen, DepthMap, DepthScope};
use ufg_core::extremal::{k_best, solve_extremal, Direction, ExtremalOptions};
use ufg_core::poset::{count_posets, ItemUniverse, Poset, PosetSet, DEFAULT_ENUM_LIMIT};
use ufg_core::ufg::{
    enumerate_ufg_family, enumerate_ufg_family_exhaustive, is_ufg, is_ufg_oracle, PosetSample,
};

type Outcome = Result<String, String>;

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn all_scope() -> DepthScope {
    DepthScope::AllPosets {
        limit: DEFAULT_ENUM_LIMIT,
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        Err(format!("{what} took {took:.2?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn exact_values() -> Outcome {
    let start = Instant::now();
    let s = first_sample();
    let f = enumerate_ufg_family(&s);
    let d = |p: &Poset, s: &PosetSample, f| empirical_depth(p, s, f).unwrap();
    check!(
        d(&Poset::trivial(3), &s, &f) == ratio(1, 2),
        "depth of the trivial order"
    );
    check!(d(&p4(), &s, &f).is_zero(), "depth of p4");
    check!(d(&p_total(), &s, &f).is_zero(), "depth of the total order");
    check!(
        d(&p1(), &s, &f) == ratio(1, 2),
        "depth of p1 on the first data set"
    );
    let t = second_sample();
    let g = enumerate_ufg_family(&t);
    check!(
        d(&p1(), &t, &g) == ratio(7, 10),
        "depth of p1 on the second data set"
    );
    let w = |s: &PosetSample, a, b| s.observations().filter(|p| p.contains(a, b)).count();
    check!(
        (0..3).all(|a| (0..3).all(|b| w(&s, a, b) == w(&t, a, b))),
        "sum statistics differ"
    );
    within(start, Duration::from_secs(1), "exact values")?;
    Ok("1/2, 0, 0; p1 at 1/2 vs 7/10 with equal sum statistics".into())
}

fn enumeration_counts() -> Outcome {
    let start = Instant::now();
    let counts: Vec<usize> = (1..=5)
        .map(|m| count_posets(m, DEFAULT_ENUM_LIMIT).unwrap())
        .collect();
    check!(counts == [1, 3, 19, 219, 4231], "counts {counts:?}");
    within(start, Duration::from_secs(30), "enumeration")?;
    Ok(format!("{counts:?}"))
}

fn random_small_samples(count: usize, seed: u64) -> Vec<PosetSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pools = [all_posets(3), all_posets(4)];
    (0..count)
        .map(|i| {
            let pool = &pools[i % 2];
            let unique = rng.gen_range(2..=6);
            random_sample(&mut rng, 3 + i % 2, pool, unique)
        })
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut subsets_checked = 0;
    for s in random_small_samples(200, 31) {
        let all = all_posets(s.m());
        for ids in subsets(s.unique().len(), 1) {
            let members: Vec<Poset> = ids.iter().map(|&i| s.unique()[i]).collect();
            let set = PosetSet::new(members.iter().copied()).unwrap();
            let fast = is_ufg(&set);
            check!(
                fast == is_ufg_oracle(&set, DEFAULT_ENUM_LIMIT).unwrap(),
                "is_ufg disagrees on {members:?}"
            );
            check!(
                fast == oracle_is_ufg(&members, &all),
                "independent oracle disagrees on {members:?}"
            );
            subsets_checked += 1;
        }
        let mut family: Vec<Vec<usize>> = enumerate_ufg_family(&s)
            .sets
            .into_iter()
            .map(|x| x.member_ids)
            .collect();
        let mut exhaustive = enumerate_ufg_family_exhaustive(&s).unwrap();
        family.sort();
        exhaustive.sort();
        check!(
            family == exhaustive,
            "family differs from exhaustive on {:?}",
            s.unique()
        );
    }
    within(start, Duration::from_secs(300), "oracle equivalence")?;
    Ok(format!("200 samples, {subsets_checked} subsets agree"))
}

fn structural_bounds() -> Outcome {
    let mut sets = 0;
    for s in random_small_samples(200, 47) {
        let f = enumerate_ufg_family(&s);
        let m = s.m();
        let bound = f.vc_obs.unwrap_or(usize::MAX).min(m * (m - 1) / 2);
        let ids: Vec<&Vec<usize>> = f.sets.iter().map(|x| &x.member_ids).collect();
        for set in &ids {
            check!(set.len() >= 2, "singleton {set:?}");
            check!(set.len() <= bound, "set {set:?} above bound {bound}");
            if set.len() >= 3 {
                let connected = (0..set.len()).any(|i| {
                    let mut sub = (*set).clone();
                    sub.remove(i);
                    ids.contains(&&sub)
                });
                check!(connected, "set {set:?} has no member one smaller");
            }
            sets += 1;
        }
    }
    for m in [3, 4] {
        let singles: Vec<Poset> = (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| Poset::from_edges(m, [(i, j)])))
            .collect();
        let set = PosetSet::new(singles.iter().copied()).unwrap();
        check!(singles.len() == m * (m - 1) / 2, "witness size");
        check!(is_ufg(&set), "single-edge witness rejected at m = {m}");
        check!(
            is_ufg_oracle(&set, DEFAULT_ENUM_LIMIT).unwrap(),
            "oracle rejects witness at m = {m}"
        );
    }
    Ok(format!(
        "{sets} family sets checked; bound tight at m = 3, 4"
    ))
}

fn tie_set(map: &DepthMap, value: &num_rational::BigRational) -> Vec<Poset> {
    map.entries
        .iter()
        .filter(|(_, d)| d == value)
        .map(|(p, _)| *p)
        .collect()
}

fn extremal_solver() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let pool = all_posets(5);
    let mut solved = 0;
    while solved < 100 {
        let unique = rng.gen_range(3..=6);
        let s = random_sample(&mut rng, 5, &pool, unique);
        let f = enumerate_ufg_family(&s);
        if f.is_empty() {
            continue;
        }
        let map = depth_map(&s, &f, all_scope()).unwrap();
        let mut ascending = map.entries.clone();
        ascending.reverse();
        for (dir, truth) in [(Direction::Max, &map.entries), (Direction::Min, &ascending)] {
            let opts = ExtremalOptions {
                direction: dir,
                ..ExtremalOptions::default()
            };
            let one = solve_extremal(&s, &f, &opts).map_err(|e| e.to_string())?;
            let five = k_best(&s, &f, dir, 5, None).map_err(|e| e.to_string())?;
            check!(one.ranked[0].depth == truth[0].1, "{dir:?} value differs");
            check!(
                tie_set(&map, &truth[0].1).contains(&one.ranked[0].poset),
                "{dir:?} representative"
            );
            check!(
                five.ranked.len() == 5,
                "k_best returned {}",
                five.ranked.len()
            );
            for (r, (_, want)) in five.ranked.iter().zip(truth.iter()) {
                check!(r.depth == *want, "{dir:?} k_best value differs");
                check!(
                    tie_set(&map, want).contains(&r.poset),
                    "{dir:?} k_best representative"
                );
                check!(
                    empirical_depth(&r.poset, &s, &f).unwrap() == r.depth,
                    "reported depth"
                );
            }
            let distinct: std::collections::HashSet<_> =
                five.ranked.iter().map(|r| r.poset).collect();
            check!(distinct.len() == 5, "k_best repeats a poset");
        }
        solved += 1;
    }
    within(start, Duration::from_secs(600), "extremal")?;
    Ok("100 samples at m = 5, max and min, k = 1 and 5".into())
}

fn screen_and_triviality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let mut screened = 0;
    for m in 2..=4 {
        let pool = all_posets(m);
        for _ in 0..40 {
            let unique = rng.gen_range(1..=pool.len().min(6));
            let s = random_sample(&mut rng, m, &pool, unique);
            let map = depth_map(&s, &enumerate_ufg_family(&s), all_scope()).unwrap();
            for (p, d) in &map.entries {
                if zero_depth_screen(p, &s).is_screened() {
                    check!(d.is_zero(), "screened poset {p:?} has depth {d}");
                    screened += 1;
                }
            }
        }
    }
    let u = || ItemUniverse::numbered(3);
    let constant = PosetSample::from_observations(u(), [p3(), p3()]).unwrap();
    let covering = PosetSample::from_observations(u(), [p1(), p2()]).unwrap();
    for s in [constant, covering] {
        let f = enumerate_ufg_family(&s);
        check!(f.is_empty(), "family of {:?} not empty", s.unique());
        let map = depth_map(&s, &f, all_scope()).unwrap();
        check!(
            map.trivial && map.entries.iter().all(|(_, d)| d.is_zero()),
            "nonzero depth on trivial sample"
        );
    }
    Ok(format!(
        "{screened} screened posets at depth 0; trivial samples all zero"
    ))
}

fn consistency() -> Outcome {
    let start = Instant::now();
    let rows = gap_table(&reference_pmf(), &[50, 800], 20, 2024).map_err(|e| e.to_string())?;
    let (small, large) = (rows[0].median, rows[1].median);
    check!(
        large < small,
        "median gap {large} at n = 800 not below {small} at n = 50"
    );
    within(start, Duration::from_secs(300), "consistency")?;
    Ok(format!(
        "median sup gap {small:.4} (n = 50) > {large:.4} (n = 800)"
    ))
}

fn davidson() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(89);
    for _ in 0..1000 {
        let (pi, pj, theta) = (
            rng.gen_range(1e-3..1e3),
            rng.gen_range(1e-3..1e3),
            rng.gen_range(0.0..10.0),
        );
        let (w, t) = davidson_prob(pi, pj, theta);
        let (l, _) = davidson_prob(pj, pi, theta);
        check!(
            (w + l + t - 1.0).abs() < 1e-12,
            "probabilities sum to {}",
            w + l + t
        );
    }
    let pi = [0.4, 0.3, 0.2, 0.1];
    let theta = 0.8;
    let k = pi.len();
    let mut wins = vec![vec![0u64; k]; k];
    let mut ties = vec![vec![0u64; k]; k];
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            let (w, t) = davidson_prob(pi[i], pi[j], theta);
            wins[i][j] = (w * 1e4).round() as u64;
            ties[i][j] = (t * 1e4).round() as u64;
        }
    }
    let model = davidson_fit(&wins, &ties).map_err(|e| e.to_string())?;
    let worst = pi
        .iter()
        .zip(&model.worths)
        .map(|(a, b)| (a - b).abs() / a)
        .fold(0.0, f64::max);
    check!(worst < 0.01, "worth error {worst}");
    check!(
        (model.theta - theta).abs() / theta < 0.01,
        "theta {}",
        model.theta
    );
    let (win, tie) = davidson_prob(3.92, 0.08, 1.45);
    check!(
        (win - 0.81).abs() <= 0.005 && (tie - 0.17).abs() <= 0.005,
        "example gives {win:.4}/{tie:.4}"
    );
    Ok(format!(
        "recovery error {:.2e}; example {win:.4}/{tie:.4}",
        worst
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("exact worked values", exact_values),
        ("poset enumeration counts", enumeration_counts),
        ("oracle equivalence", oracle_equivalence),
        ("structural bounds", structural_bounds),
        ("extremal solver", extremal_solver),
        ("zero screen and triviality", screen_and_triviality),
        ("consistency Monte-Carlo", consistency),
        ("Davidson model", davidson),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!("criterion 9: SKIPPED contingent reproduction: published benchmark poset data not available");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
