#![allow(dead_code)]

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use ufg_core::poset::{enumerate_posets, ItemUniverse, Poset, DEFAULT_ENUM_LIMIT};
use ufg_core::ufg::PosetSample;

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn p1() -> Poset {
    Poset::from_edges(3, [(0, 1)])
}
pub fn p2() -> Poset {
    Poset::from_edges(3, [(0, 1), (0, 2)])
}
pub fn p3() -> Poset {
    Poset::from_edges(3, [(0, 2), (1, 2)])
}
pub fn p4() -> Poset {
    Poset::from_edges(3, [(2, 0)])
}
pub fn p_total() -> Poset {
    Poset::from_edges(3, [(0, 2), (2, 1)])
}
pub fn q1() -> Poset {
    Poset::from_edges(3, [(0, 1)])
}
pub fn q2() -> Poset {
    Poset::from_edges(3, [(0, 2)])
}
pub fn q3() -> Poset {
    Poset::from_edges(3, [(0, 1), (1, 2)])
}

/// Sample (p1, p2, p3).
pub fn first_sample() -> PosetSample {
    PosetSample::from_observations(ItemUniverse::numbered(3), [p1(), p2(), p3()]).unwrap()
}

/// Sample (p̃1, p̃2, p̃3) with the same sum-statistics as the first.
pub fn second_sample() -> PosetSample {
    PosetSample::from_observations(ItemUniverse::numbered(3), [q1(), q2(), q3()]).unwrap()
}

pub fn all_posets(m: usize) -> Vec<Poset> {
    enumerate_posets(m, DEFAULT_ENUM_LIMIT).unwrap()
}

/// `unique` distinct posets drawn from `pool`, each with multiplicity 1..=3.
pub fn random_sample<R: Rng>(rng: &mut R, m: usize, pool: &[Poset], unique: usize) -> PosetSample {
    let chosen: Vec<Poset> = pool.choose_multiple(rng, unique).copied().collect();
    let pairs = chosen.into_iter().map(|p| (p, rng.gen_range(1..=3)));
    PosetSample::from_counts(ItemUniverse::numbered(m), pairs).unwrap()
}

/// Every subset of `0..n` with at least `min` elements.
pub fn subsets(n: usize, min: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.len() >= min)
        .collect()
}

/// `γ(S)` by filtering every poset through the defining inclusions, pair by pair.
pub fn oracle_closure(members: &[Poset], all: &[Poset]) -> Vec<Poset> {
    if members.is_empty() {
        return Vec::new();
    }
    let m = members[0].size();
    let in_all = |a: usize, b: usize| members.iter().all(|p| p.contains(a, b));
    let in_any = |a: usize, b: usize| members.iter().any(|p| p.contains(a, b));
    all.iter()
        .filter(|q| {
            (0..m).all(|a| {
                (0..m).all(|b| {
                    (!in_all(a, b) || q.contains(a, b)) && (!q.contains(a, b) || in_any(a, b))
                })
            })
        })
        .copied()
        .collect()
}

/// Both defining conditions checked literally over every proper subset.
pub fn oracle_is_ufg(members: &[Poset], all: &[Poset]) -> bool {
    let full = oracle_closure(members, all);
    if full.len() <= members.len() {
        return false;
    }
    let mut covered: Vec<Poset> = Vec::new();
    for sub in subsets(members.len(), 0) {
        if sub.len() == members.len() {
            continue;
        }
        let part: Vec<Poset> = sub.iter().map(|&i| members[i]).collect();
        covered.extend(oracle_closure(&part, all));
    }
    covered.sort_unstable();
    covered.dedup();
    covered != full
}

/// Ufg sets of the sample's distinct posets, by literal conditions, as index lists.
pub fn oracle_family(sample: &PosetSample, all: &[Poset]) -> Vec<Vec<usize>> {
    let unique = sample.unique();
    subsets(unique.len(), 1)
        .into_iter()
        .filter(|s| {
            let members: Vec<Poset> = s.iter().map(|&i| unique[i]).collect();
            oracle_is_ufg(&members, all)
        })
        .collect()
}

/// Depth of every poset in `all` from the oracle family, weights `Π count / n^|S|`.
pub fn oracle_depths(sample: &PosetSample, all: &[Poset]) -> Vec<(Poset, BigRational)> {
    let family = oracle_family(sample, all);
    let n = BigRational::from_integer((sample.n() as i64).into());
    let weight = |s: &[usize]| -> BigRational {
        s.iter()
            .map(|&i| BigRational::from_integer((sample.counts()[i] as i64).into()) / &n)
            .product()
    };
    let total: BigRational = family.iter().map(|s| weight(s)).sum();
    let closures: Vec<Vec<Poset>> = family
        .iter()
        .map(|s| {
            oracle_closure(
                &s.iter().map(|&i| sample.unique()[i]).collect::<Vec<_>>(),
                all,
            )
        })
        .collect();
    all.iter()
        .map(|p| {
            if family.is_empty() {
                return (*p, ratio(0, 1));
            }
            let hit: BigRational = family
                .iter()
                .zip(&closures)
                .filter(|(_, c)| c.contains(p))
                .map(|(s, _)| weight(s))
                .sum();
            (*p, hit / &total)
        })
        .collect()
}
