use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::membership::{is_ufg_members, is_ufg_pair};
use super::sample::PosetSample;
use crate::poset::{io::hasse_string, Poset, PosetError, Relation};

/// Default node budget for the observed VC-dimension search.
pub const DEFAULT_VC_BUDGET: u64 = 50_000_000;

/// A union-free generic set of observed posets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UfgSet {
    /// Sorted indices into [`PosetSample::unique`].
    pub member_ids: Vec<usize>,
    /// `Π ν_n({p})` over the members.
    pub weight: BigRational,
}

/// The family `𝒮_obs` of a sample, with its normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UfgFamily {
    pub sets: Vec<UfgSet>,
    pub total_weight: BigRational,
    /// `1 / total_weight`, absent when the family is empty.
    pub c_n: Option<BigRational>,
    /// Observed VC dimension, `None` if its search ran out of budget.
    pub vc_obs: Option<usize>,
    pub cap: usize,
    pub sample_hash: String,
}

/// Knobs for [`enumerate_ufg_family_with`].
#[derive(Debug, Clone, Copy)]
pub struct FamilyOptions {
    /// Overrides the cardinality cap from the bounds when set.
    pub cap_override: Option<usize>,
    pub vc_budget: u64,
    /// Keep a level `k + 1` candidate only if all its `k`-subsets are family
    /// members, as if the family were downward closed. It is not, so this is
    /// unsound; it exists only so self-checks can prove they notice.
    pub assume_downward_closed: bool,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            cap_override: None,
            vc_budget: DEFAULT_VC_BUDGET,
            assume_downward_closed: false,
        }
    }
}

impl UfgFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Largest member set size present.
    pub fn max_set_size(&self) -> usize {
        self.sets
            .iter()
            .map(|s| s.member_ids.len())
            .max()
            .unwrap_or(0)
    }

    fn from_sets(
        sample: &PosetSample,
        mut member_sets: Vec<Vec<usize>>,
        vc_obs: Option<usize>,
        cap: usize,
    ) -> Self {
        member_sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let n = BigUint::from(sample.n());
        let sets: Vec<UfgSet> = member_sets
            .into_iter()
            .map(|ids| {
                let num: BigUint = ids
                    .iter()
                    .map(|&i| BigUint::from(sample.counts()[i]))
                    .product();
                let den = num_traits::pow(n.clone(), ids.len());
                UfgSet {
                    member_ids: ids,
                    weight: BigRational::new(BigInt::from(num), BigInt::from(den)),
                }
            })
            .collect();
        let total_weight: BigRational = sets.iter().map(|s| &s.weight).sum();
        let c_n = (!total_weight.is_zero()).then(|| total_weight.recip());
        UfgFamily {
            sets,
            total_weight,
            c_n,
            vc_obs,
            cap,
            sample_hash: sample.content_hash(),
        }
    }

    /// Writes the family as JSON lines: a header line, then one line per set.
    pub fn write_jsonl<W: Write>(&self, sample: &PosetSample, mut w: W) -> std::io::Result<()> {
        let header = FamilyHeader {
            sample_hash: self.sample_hash.clone(),
            sets: self.sets.len(),
            cap: self.cap,
            vc_obs: self.vc_obs,
            total_weight: rational_string(&self.total_weight),
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for s in &self.sets {
            let rec = SetRecord {
                members: s.member_ids.clone(),
                edges: s
                    .member_ids
                    .iter()
                    .map(|&i| hasse_string(sample.universe(), &sample.unique()[i]))
                    .collect(),
                weight: rational_string(&s.weight),
            };
            serde_json::to_writer(&mut w, &rec)?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads a family written by [`UfgFamily::write_jsonl`].
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self, PosetError> {
        let bad = |line: usize, msg: String| PosetError::Parse { line, msg };
        let mut lines = r.lines().enumerate();
        let (_, first) = lines
            .next()
            .ok_or_else(|| bad(1, "empty family file".into()))?;
        let first = first.map_err(|e| bad(1, e.to_string()))?;
        let header: FamilyHeader =
            serde_json::from_str(&first).map_err(|e| bad(1, e.to_string()))?;
        let mut sets = Vec::with_capacity(header.sets);
        for (i, line) in lines {
            let line = line.map_err(|e| bad(i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: SetRecord =
                serde_json::from_str(&line).map_err(|e| bad(i + 1, e.to_string()))?;
            let weight = parse_rational(&rec.weight)
                .ok_or_else(|| bad(i + 1, format!("bad weight {:?}", rec.weight)))?;
            sets.push(UfgSet {
                member_ids: rec.members,
                weight,
            });
        }
        let total_weight: BigRational = sets.iter().map(|s| &s.weight).sum();
        if rational_string(&total_weight) != header.total_weight || sets.len() != header.sets {
            return Err(bad(0, "family file is inconsistent with its header".into()));
        }
        let c_n = (!total_weight.is_zero()).then(|| total_weight.recip());
        Ok(UfgFamily {
            sets,
            total_weight,
            c_n,
            vc_obs: header.vc_obs,
            cap: header.cap,
            sample_hash: header.sample_hash,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyHeader {
    sample_hash: String,
    sets: usize,
    cap: usize,
    vc_obs: Option<usize>,
    total_weight: String,
}

#[derive(Serialize, Deserialize)]
struct SetRecord {
    members: Vec<usize>,
    edges: Vec<String>,
    weight: String,
}

/// `num/den` rendering of a rational.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

/// Upper bound on ufg set size from the item count alone (valid for `m ≥ 3`).
pub fn structural_bound(m: usize) -> Option<usize> {
    (m >= 3).then(|| m * (m - 1) / 2)
}

/// `a ∉ γ(A \ {a})` for every `a` in `members`.
fn is_independent(members: &[Poset]) -> bool {
    let k = members.len();
    if k <= 1 {
        return true;
    }
    let m = members[0].size();
    let mut pre_meet = vec![Relation::full(m); k + 1];
    let mut pre_join = vec![Relation::empty(m); k + 1];
    for (i, p) in members.iter().enumerate() {
        pre_meet[i + 1] = pre_meet[i].intersection(p.relation());
        pre_join[i + 1] = pre_join[i].union(p.relation());
    }
    let mut suf_meet = Relation::full(m);
    let mut suf_join = Relation::empty(m);
    for i in (0..k).rev() {
        let meet = pre_meet[i].intersection(&suf_meet);
        let join = pre_join[i].union(&suf_join);
        let r = members[i].relation();
        if meet.is_subset(r) && r.is_subset(&join) {
            return false;
        }
        suf_meet = suf_meet.intersection(r);
        suf_join = suf_join.union(r);
    }
    true
}

/// VC dimension of `{γ(B) ∩ 𝒫_obs : B ⊆ 𝒫_obs}`.
///
/// For a closure system a set `A` is shattered iff no `a ∈ A` lies in
/// `γ(A \ {a})`; shattered sets are closed under subsets, so a
/// branch-and-bound over index-increasing extensions finds the largest one.
pub fn vc_dimension_obs(sample: &PosetSample, budget: u64) -> Result<usize, PosetError> {
    vc_search(sample.unique(), budget, usize::MAX)
}

/// Like [`vc_dimension_obs`] but stops as soon as `stop_at` is reached.
fn vc_search(unique: &[Poset], budget: u64, stop_at: usize) -> Result<usize, PosetError> {
    let n = unique.len();
    if n == 0 {
        return Ok(0);
    }
    struct Search<'a> {
        unique: &'a [Poset],
        best: usize,
        nodes: u64,
        budget: u64,
        stop_at: usize,
    }
    impl Search<'_> {
        fn run(&mut self, current: &mut Vec<Poset>, cands: &[usize]) -> Result<(), PosetError> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(PosetError::SearchBudgetExceeded(self.budget as usize));
            }
            if current.len() > self.best {
                self.best = current.len();
            }
            for (pos, &j) in cands.iter().enumerate() {
                if self.best >= self.stop_at || current.len() + (cands.len() - pos) <= self.best {
                    return Ok(());
                }
                current.push(self.unique[j]);
                let next: Vec<usize> = cands[pos + 1..]
                    .iter()
                    .copied()
                    .filter(|&c| {
                        current.push(self.unique[c]);
                        let ok = is_independent(current);
                        current.pop();
                        ok
                    })
                    .collect();
                self.run(current, &next)?;
                current.pop();
            }
            Ok(())
        }
    }
    let mut s = Search {
        unique,
        best: 0,
        nodes: 0,
        budget,
        stop_at,
    };
    let all: Vec<usize> = (0..n).collect();
    s.run(&mut Vec::new(), &all)?;
    Ok(s.best)
}

/// `min(vc_obs, m(m-1)/2)`; falls back to the structural bound when the VC
/// search exhausts its budget.
pub fn cardinality_cap(sample: &PosetSample, budget: u64) -> (usize, Option<usize>) {
    let structural = structural_bound(sample.m());
    let stop_at = structural.unwrap_or(usize::MAX);
    match vc_search(sample.unique(), budget, stop_at) {
        // Reaching the structural bound stops the search, so `vc` is only a lower bound then.
        Ok(vc) => (
            structural.map_or(vc, |b| vc.min(b)),
            (vc < stop_at).then_some(vc),
        ),
        Err(_) => (structural.unwrap_or(sample.unique().len()), None),
    }
}

/// Enumerates `𝒮_obs` with default options.
pub fn enumerate_ufg_family(sample: &PosetSample) -> UfgFamily {
    enumerate_ufg_family_with(sample, FamilyOptions::default())
}

/// Level-wise enumeration of `𝒮_obs`.
///
/// Level 2 is settled by the pair test. A set of size `k + 1 ≥ 3` is a family
/// member only if one of its `k`-subsets is, so level `k + 1` is generated
/// from one-element extensions of level `k` and then tested individually.
pub fn enumerate_ufg_family_with(sample: &PosetSample, opts: FamilyOptions) -> UfgFamily {
    let unique = sample.unique();
    let u = unique.len();
    let (cap, vc_obs) = match opts.cap_override {
        Some(c) => (c, None),
        None => cardinality_cap(sample, opts.vc_budget),
    };
    if u < 2 || cap < 2 {
        return UfgFamily::from_sets(sample, Vec::new(), vc_obs, cap);
    }
    let mut level: Vec<Vec<usize>> = (0..u)
        .flat_map(|i| (i + 1..u).map(move |j| (i, j)))
        .filter(|&(i, j)| is_ufg_pair(&unique[i], &unique[j]))
        .map(|(i, j)| vec![i, j])
        .collect();
    let mut all = level.clone();
    let mut size = 2;
    while size < cap && !level.is_empty() {
        let mut candidates: Vec<Vec<usize>> = level
            .par_iter()
            .flat_map_iter(|s| {
                (0..u).filter(move |j| !s.contains(j)).map(move |j| {
                    let mut c = s.clone();
                    let pos = c.partition_point(|&x| x < j);
                    c.insert(pos, j);
                    c
                })
            })
            .collect();
        candidates.par_sort_unstable();
        candidates.dedup();
        if opts.assume_downward_closed {
            let known: HashSet<&Vec<usize>> = level.iter().collect();
            candidates.retain(|c| {
                (0..c.len()).all(|i| {
                    let mut sub = c.clone();
                    sub.remove(i);
                    known.contains(&sub)
                })
            });
        }
        level = candidates
            .into_par_iter()
            .filter(|ids| {
                let members: Vec<Poset> = ids.iter().map(|&i| unique[i]).collect();
                is_ufg_members(&members)
            })
            .collect();
        all.extend(level.iter().cloned());
        size += 1;
    }
    UfgFamily::from_sets(sample, all, vc_obs, cap)
}

/// Exhaustive reference: tests every subset of the distinct posets.
pub fn enumerate_ufg_family_exhaustive(
    sample: &PosetSample,
) -> Result<Vec<Vec<usize>>, PosetError> {
    let u = sample.unique().len();
    if u > 20 {
        return Err(PosetError::SearchBudgetExceeded(1 << 20));
    }
    let mut out: Vec<Vec<usize>> = (0u32..(1u32 << u))
        .map(|mask| (0..u).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|ids| {
            let members: Vec<Poset> = ids.iter().map(|&i| sample.unique()[i]).collect();
            is_ufg_members(&members)
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Family sets indexed by member, for callers that need to walk supersets.
pub fn sets_by_member(family: &UfgFamily) -> HashMap<usize, Vec<usize>> {
    let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
    for (si, s) in family.sets.iter().enumerate() {
        for &i in &s.member_ids {
            map.entry(i).or_default().push(si);
        }
    }
    map
}

/// Exact `Σ weight` recomputed from member counts, as a cross-check.
pub fn weight_of(sample: &PosetSample, ids: &[usize]) -> BigRational {
    ids.iter()
        .fold(BigRational::one(), |acc, &i| acc * sample.probability(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::ItemUniverse;

    fn example_sample() -> PosetSample {
        let p1 = Poset::from_edges(3, [(0, 1)]);
        let p2 = Poset::from_edges(3, [(0, 1), (0, 2)]);
        let p3 = Poset::from_edges(3, [(0, 2), (1, 2)]);
        PosetSample::from_observations(ItemUniverse::numbered(3), [p1, p2, p3]).unwrap()
    }

    fn second_sample() -> PosetSample {
        let t1 = Poset::from_edges(3, [(0, 1)]);
        let t2 = Poset::from_edges(3, [(0, 2)]);
        let t3 = Poset::from_edges(3, [(0, 1), (1, 2)]);
        PosetSample::from_observations(ItemUniverse::numbered(3), [t1, t2, t3]).unwrap()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn family_of_first_example() {
        let s = example_sample();
        let f = enumerate_ufg_family(&s);
        let p1 = s.index_of(&Poset::from_edges(3, [(0, 1)])).unwrap();
        let p2 = s.index_of(&Poset::from_edges(3, [(0, 1), (0, 2)])).unwrap();
        let p3 = s.index_of(&Poset::from_edges(3, [(0, 2), (1, 2)])).unwrap();
        let mut expected = vec![sorted(vec![p1, p3]), sorted(vec![p2, p3])];
        expected.sort();
        let got: Vec<Vec<usize>> = f.sets.iter().map(|s| s.member_ids.clone()).collect();
        assert_eq!(got, expected);
        assert_eq!(f.total_weight, ratio(2, 9));
        assert_eq!(f.c_n, Some(ratio(9, 2)));
    }

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort();
        v
    }

    #[test]
    fn family_of_second_example() {
        let f = enumerate_ufg_family(&second_sample());
        assert_eq!(f.len(), 4);
        assert_eq!(f.max_set_size(), 3);
        assert_eq!(f.total_weight, ratio(10, 27));
    }

    #[test]
    fn vc_examples() {
        let single =
            PosetSample::from_observations(ItemUniverse::numbered(3), [Poset::trivial(3)]).unwrap();
        assert_eq!(vc_dimension_obs(&single, DEFAULT_VC_BUDGET), Ok(1));
        assert_eq!(
            vc_dimension_obs(&example_sample(), DEFAULT_VC_BUDGET),
            Ok(2)
        );
        assert_eq!(cardinality_cap(&example_sample(), DEFAULT_VC_BUDGET).0, 2);
    }

    #[test]
    fn vc_budget_fallback() {
        let (cap, vc) = cardinality_cap(&second_sample(), 1);
        assert_eq!(cap, 3);
        assert_eq!(vc, None);
    }

    #[test]
    fn jsonl_round_trip() {
        let s = second_sample();
        let f = enumerate_ufg_family(&s);
        let mut buf = Vec::new();
        f.write_jsonl(&s, &mut buf).unwrap();
        let back = UfgFamily::read_jsonl(&buf[..]).unwrap();
        assert_eq!(back, f);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().contains(r#""weight":"1/9""#));
    }

    #[test]
    fn matches_exhaustive_on_examples() {
        for s in [example_sample(), second_sample()] {
            let f = enumerate_ufg_family(&s);
            let got: Vec<Vec<usize>> = f.sets.iter().map(|s| s.member_ids.clone()).collect();
            assert_eq!(got, enumerate_ufg_family_exhaustive(&s).unwrap());
        }
    }
}
