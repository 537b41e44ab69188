mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ufg_core::bench::davidson::davidson_prob;
use ufg_core::bench::{
    davidson_fit, davidson_fit_sample, dispersion, edge_persistence, parse_orientations,
    rank_shift, ranked_posets, sum_statistics, tie_counts, BenchError, Orientation,
    PerformanceTable, PersistenceMode,
};
use ufg_core::depth::{depth_map, DepthScope};
use ufg_core::poset::{ItemUniverse, Poset, DEFAULT_ENUM_LIMIT};
use ufg_core::ufg::{enumerate_ufg_family, PosetSample};

const FIXTURE: &str = "\
dataset,algorithm,measure,value
d1,A,acc,0.90
d1,A,loss,0.10
d1,B,acc,0.80
d1,B,loss,0.20
d1,C,acc,0.95
d1,C,loss,0.30
d2,A,acc,0.90
d2,A,loss,0.10
d2,B,acc,0.85
d2,B,loss,0.30
d2,C,acc,0.80
d2,C,loss,0.20
d3,A,acc,0.90
d3,A,loss,0.20
d3,B,acc,0.80
d3,B,loss,0.10
d3,C,acc,0.70
d3,C,loss,0.30
";

fn orientations() -> Vec<(String, Orientation)> {
    parse_orientations("acc: higher\nloss: lower # error rate\n").unwrap()
}

fn fixture() -> PerformanceTable {
    PerformanceTable::from_csv(FIXTURE.as_bytes(), &orientations()).unwrap()
}

#[test]
fn fixture_reproduces_first_sample() {
    let s = fixture().to_sample(None).unwrap();
    let expected = first_sample();
    assert_eq!(s.unique(), expected.unique());
    assert_eq!(s.counts(), expected.counts());
    assert_eq!(s.universe().labels(), ["A", "B", "C"]);
}

#[test]
fn unknown_orientation_is_rejected() {
    let only_acc = parse_orientations("acc: higher").unwrap();
    assert!(matches!(
        PerformanceTable::from_csv(FIXTURE.as_bytes(), &only_acc),
        Err(BenchError::UnknownOrientation(m)) if m == "loss"
    ));
}

#[test]
fn sum_statistics_match_direct_count() {
    let a = sum_statistics(&first_sample());
    let b = sum_statistics(&second_sample());
    assert_eq!(a, b);
    for x in 0..3 {
        for y in 0..3 {
            let direct = [p1(), p2(), p3()]
                .iter()
                .filter(|p| p.contains(x, y))
                .count() as u64;
            assert_eq!(a.matrix[x][y], direct);
        }
        assert_eq!(a.matrix[x][x], 3);
    }
    let ties = tie_counts(&first_sample());
    // y2 and y3 are incomparable in p1 and p2.
    assert_eq!(ties[1][2], 2);
    assert_eq!(ties[2][1], 2);
}

#[test]
fn persistence_on_second_sample() {
    let s = second_sample();
    let map = depth_map(
        &s,
        &enumerate_ufg_family(&s),
        DepthScope::AllPosets {
            limit: DEFAULT_ENUM_LIMIT,
        },
    )
    .unwrap();
    let ranked = ranked_posets(&map, PersistenceMode::AllPosets, &s).unwrap();
    let rows = edge_persistence(&ranked, s.universe(), false).unwrap();
    let row = rows.iter().find(|r| (r.from, r.to) == (0, 1)).unwrap();
    // The deepest poset has y1<y2; the next tie group of 7/10 mixes both.
    assert_eq!(row.k_edge, 1);
    assert!(row.edge_ambiguous);
    assert!(matches!(
        edge_persistence(&ranked, s.universe(), true),
        Err(BenchError::AmbiguousRanking { .. })
    ));
    for r in &rows {
        assert!(ranked[..r.k_edge]
            .iter()
            .all(|(p, _)| p.contains(r.from, r.to)));
        assert!(ranked[..r.k_nonedge]
            .iter()
            .all(|(p, _)| !p.contains(r.from, r.to)));
        assert!(r.k_edge == 0 || r.k_nonedge == 0);
    }
    for (a, b) in ranked[0].0.edges() {
        assert!(
            rows.iter()
                .find(|r| (r.from, r.to) == (a, b))
                .unwrap()
                .k_edge
                >= 1
        );
    }
}

#[test]
fn observed_persistence_repeats_multiplicities() {
    let s = first_sample().scaled(2);
    let map = depth_map(&s, &enumerate_ufg_family(&s), DepthScope::Observed).unwrap();
    let ranked = ranked_posets(&map, PersistenceMode::Observed, &s).unwrap();
    assert_eq!(ranked.len(), 6);
    assert!(ranked.windows(2).all(|w| w[0].1 >= w[1].1));
}

#[test]
fn dispersion_on_first_sample() {
    let s = first_sample();
    let f = enumerate_ufg_family(&s);
    let all = depth_map(
        &s,
        &f,
        DepthScope::AllPosets {
            limit: DEFAULT_ENUM_LIMIT,
        },
    )
    .unwrap();
    let observed: Vec<_> = s
        .unique()
        .iter()
        .map(|p| all.get(p).unwrap().clone())
        .collect();
    let got = dispersion(&all, &observed, 1.0 / 3.0);
    // Oracle: the top observed depth is the threshold, count posets reaching it.
    let top = observed.iter().max().unwrap();
    let reach = all_posets(3)
        .iter()
        .filter(|p| all.get(p).unwrap() >= top)
        .count() as i64;
    assert_eq!(got, ratio(reach, 19));
    assert_eq!(got, ratio(4, 19));
    assert_eq!(
        dispersion(&all, &observed, 1.0),
        ratio(reach_at_least(&all, observed.iter().min().unwrap()), 19)
    );
}

#[test]
fn dispersion_on_second_sample() {
    let s = second_sample();
    let all = depth_map(&s, &enumerate_ufg_family(&s), DepthScope::AllPosets { limit: DEFAULT_ENUM_LIMIT }).unwrap();
    let observed: Vec<_> = s.observations().map(|p| all.get(p).unwrap().clone()).collect();
    assert!(observed.iter().all(|d| *d == ratio(7, 10)));
    assert_eq!(dispersion(&all, &observed, 1.0 / 3.0), ratio(reach_at_least(&all, &ratio(7, 10)), 19));
    assert_eq!(dispersion(&all, &observed, 1.0 / 3.0), ratio(4, 19));
}

fn reach_at_least(all: &ufg_core::depth::DepthMap, t: &num_rational::BigRational) -> i64 {
    all.entries.iter().filter(|(_, d)| d >= t).count() as i64
}

#[test]
fn rank_shift_between_measure_subsets() {
    let t = fixture();
    let full = t.to_sample(None).unwrap();
    let acc_only = t
        .select_measures(&["acc".to_string()])
        .unwrap()
        .to_sample(None)
        .unwrap();
    let scope = || DepthScope::AllPosets {
        limit: DEFAULT_ENUM_LIMIT,
    };
    let a = depth_map(&full, &enumerate_ufg_family(&full), scope()).unwrap();
    let b = depth_map(&acc_only, &enumerate_ufg_family(&acc_only), scope()).unwrap();
    let rs = rank_shift(&a, &b).unwrap();
    assert_eq!(rs.per_poset.len(), 19);
    let shifts: Vec<usize> = rs
        .per_poset
        .iter()
        .map(|(_, x, y)| x.abs_diff(*y))
        .collect();
    assert_eq!(rs.max_shift, *shifts.iter().max().unwrap());
    assert_eq!(rank_shift(&a, &a).unwrap().max_shift, 0);
}

#[test]
fn davidson_worked_probabilities() {
    let (win, tie) = davidson_prob(3.92, 0.08, 1.45);
    assert!((win - 0.81).abs() <= 0.005, "{win}");
    assert!((tie - 0.17).abs() <= 0.005, "{tie}");
    let (win, tie) = davidson_prob(
        (2.0 * 0.68258f64).exp(),
        (2.0 * -1.24203f64).exp(),
        0.37166f64.exp(),
    );
    assert!((win - 0.81).abs() <= 0.005, "{win}");
    assert!((tie - 0.17).abs() <= 0.005, "{tie}");
}

fn expected_counts(pi: &[f64], theta: f64, per_pair: f64) -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
    let k = pi.len();
    let mut wins = vec![vec![0; k]; k];
    let mut ties = vec![vec![0; k]; k];
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            let (w, t) = davidson_prob(pi[i], pi[j], theta);
            wins[i][j] = (w * per_pair).round() as u64;
            ties[i][j] = (t * per_pair).round() as u64;
        }
    }
    (wins, ties)
}

#[test]
fn davidson_recovers_parameters() {
    let pi = [0.4, 0.3, 0.2, 0.1];
    let theta = 0.8;
    let (wins, ties) = expected_counts(&pi, theta, 1e4);
    let model = davidson_fit(&wins, &ties).unwrap();
    for (got, want) in model.worths.iter().zip(pi) {
        assert!((got - want).abs() / want < 0.01, "{got} vs {want}");
    }
    assert!(
        (model.theta - theta).abs() / theta < 0.01,
        "{}",
        model.theta
    );
    assert!((model.worths.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

/// Davidson as a Poisson log-linear model fitted by IRLS: one nuisance
/// intercept per pair, item effects `β` (last pinned to 0) and a tie effect.
fn poisson_irls(wins: &[Vec<u64>], ties: &[Vec<u64>]) -> (Vec<f64>, f64) {
    let k = wins.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let p = pairs.len() + (k - 1) + 1;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for (n, &(i, j)) in pairs.iter().enumerate() {
        let mut base = vec![0.0; p];
        base[n] = 1.0;
        let item = |v: &mut Vec<f64>, a: usize, w: f64| {
            if a + 1 < k {
                v[pairs.len() + a] += w;
            }
        };
        let mut w = base.clone();
        item(&mut w, i, 1.0);
        rows.push((w, wins[i][j] as f64));
        let mut l = base.clone();
        item(&mut l, j, 1.0);
        rows.push((l, wins[j][i] as f64));
        let mut t = base;
        item(&mut t, i, 0.5);
        item(&mut t, j, 0.5);
        t[p - 1] = 1.0;
        rows.push((t, ties[i][j] as f64));
    }
    let x = DMatrix::from_fn(rows.len(), p, |r, c| rows[r].0[c]);
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let mut beta = DVector::zeros(p);
    for _ in 0..100 {
        let eta = &x * &beta;
        let mu = eta.map(f64::exp);
        let z = &eta + (&y - &mu).component_div(&mu);
        let xtw = DMatrix::from_fn(p, rows.len(), |c, r| x[(r, c)] * mu[r]);
        let next = (&xtw * &x).lu().solve(&(&xtw * z)).unwrap();
        let done = (&next - &beta).norm() < 1e-12;
        beta = next;
        if done {
            break;
        }
    }
    let b: Vec<f64> = (0..k)
        .map(|a| {
            if a + 1 < k {
                beta[pairs.len() + a]
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = b.iter().map(|v| v.exp()).sum();
    (
        b.iter().map(|v| v.exp() / total).collect(),
        beta[p - 1].exp(),
    )
}

#[test]
fn davidson_matches_poisson_glm() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let k = rng.gen_range(3..=5);
        let mut wins = vec![vec![0u64; k]; k];
        let mut ties = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                wins[i][j] = rng.gen_range(1..20);
                if i < j {
                    let t = rng.gen_range(1..20);
                    ties[i][j] = t;
                    ties[j][i] = t;
                }
            }
        }
        let model = davidson_fit(&wins, &ties).unwrap();
        let (worths, theta) = poisson_irls(&wins, &ties);
        for (a, b) in model.worths.iter().zip(&worths) {
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
        assert!((model.theta - theta).abs() < 1e-7);
    }
}

#[test]
fn davidson_on_poset_samples() {
    // Ties credit both sides, so an item that never loses still has a finite worth.
    let model = davidson_fit_sample(&second_sample()).unwrap();
    assert!((model.worths.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(model.worths[0] > model.worths[1] && model.worths[1] > model.worths[2]);

    // Without ties an undefeated item has no finite maximum.
    let chains = PosetSample::from_observations(
        ItemUniverse::numbered(3),
        [Poset::chain(&[0, 1, 2]), Poset::chain(&[0, 2, 1])],
    )
    .unwrap();
    assert!(matches!(
        davidson_fit_sample(&chains),
        Err(BenchError::Degenerate(_))
    ));
}

fn random_table(
    rng: &mut ChaCha8Rng,
    datasets: usize,
    algorithms: usize,
    measures: usize,
) -> PerformanceTable {
    let mut csv = String::from("dataset,algorithm,measure,value\n");
    let mut orient = String::new();
    for m in 0..measures {
        orient.push_str(&format!(
            "m{m}: {}\n",
            if m % 2 == 0 { "higher" } else { "lower" }
        ));
    }
    for d in 0..datasets {
        for a in 0..algorithms {
            for m in 0..measures {
                csv.push_str(&format!("d{d},a{a},m{m},{}\n", rng.gen::<f64>()));
            }
        }
    }
    PerformanceTable::from_csv(csv.as_bytes(), &parse_orientations(&orient).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probabilities_sum_to_one(pi in 1e-3f64..1e3, pj in 1e-3f64..1e3, theta in 0.0f64..10.0) {
        let (w, t) = davidson_prob(pi, pj, theta);
        let (l, t2) = davidson_prob(pj, pi, theta);
        prop_assert!((w + l + t - 1.0).abs() < 1e-12);
        prop_assert!((t - t2).abs() < 1e-12);
        let (ws, _) = davidson_prob(pi * 7.5, pj * 7.5, theta);
        prop_assert!((ws - w).abs() < 1e-12);
    }

    #[test]
    fn adding_a_measure_only_removes_edges(seed in any::<u64>(), algorithms in 2usize..6, measures in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_table(&mut rng, 3, algorithms, measures);
        let fewer: Vec<String> = t.measures[..measures - 1].to_vec();
        let sub = t.select_measures(&fewer).unwrap();
        for d in 0..3 {
            let all = t.build_poset(d, None).unwrap();
            let part = sub.build_poset(d, None).unwrap();
            prop_assert!(all.is_subset(&part));
        }
    }

    #[test]
    fn dominance_ignores_affine_rescaling(seed in any::<u64>(), scale in 0.01f64..100.0, shift in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_table(&mut rng, 2, 4, 2);
        let mut csv = String::from("dataset,algorithm,measure,value\n");
        for d in 0..2 {
            for a in 0..4 {
                for m in 0..2 {
                    let v = t.value(d, a, m);
                    let v = if m == 0 { v * scale + shift } else { v };
                    csv.push_str(&format!("{},{},{},{v}\n", t.datasets[d], t.algorithms[a], t.measures[m]));
                }
            }
        }
        let orient: Vec<(String, Orientation)> =
            t.measures.iter().cloned().zip(t.orientations.iter().copied()).collect();
        let u = PerformanceTable::from_csv(csv.as_bytes(), &orient).unwrap();
        let (a, b) = (t.to_sample(None).unwrap(), u.to_sample(None).unwrap());
        prop_assert_eq!(a.unique(), b.unique());
    }
}
