//! Empirical and population ufg depth.

pub mod consistency;
mod pmf;
mod screen;

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::poset::{enumerate_posets, io::hasse_string, ItemUniverse, Poset, PosetError, Relation};
use crate::ufg::{PosetSample, UfgFamily};

pub use pmf::{population_depth, DiscretePmf};
pub use screen::{triviality_check, zero_depth_screen, ZeroScreen};

/// Which posets a [`DepthMap`] covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DepthScope {
    /// Every poset on the universe; fails above `limit` items.
    AllPosets {
        limit: usize,
    },
    /// The distinct observed posets.
    Observed,
    Explicit(Vec<Poset>),
}

impl DepthScope {
    pub fn name(&self) -> &'static str {
        match self {
            DepthScope::AllPosets { .. } => "all-posets",
            DepthScope::Observed => "observed-only",
            DepthScope::Explicit(_) => "explicit",
        }
    }
}

/// Family sets pre-indexed by `⋂S` and `⋃S`, with weights scaled to a
/// common denominator so depth evaluation is integer addition.
#[derive(Debug, Clone)]
pub struct FamilyIndex {
    meets: Vec<Relation>,
    joins: Vec<Relation>,
    weights: ScaledWeights,
    sample_hash: String,
}

#[derive(Debug, Clone)]
enum ScaledWeights {
    Small { each: Vec<u128>, total: u128 },
    Big { each: Vec<BigUint>, total: BigUint },
}

impl FamilyIndex {
    pub fn new(sample: &PosetSample, family: &UfgFamily) -> Result<Self, PosetError> {
        if family.sample_hash != sample.content_hash() {
            return Err(PosetError::FamilySampleMismatch);
        }
        let m = sample.m();
        let unique = sample.unique();
        let mut meets = Vec::with_capacity(family.len());
        let mut joins = Vec::with_capacity(family.len());
        for s in &family.sets {
            let mut meet = Relation::full(m);
            let mut join = Relation::empty(m);
            for &i in &s.member_ids {
                let r = unique
                    .get(i)
                    .ok_or(PosetError::FamilySampleMismatch)?
                    .relation();
                meet = meet.intersection(r);
                join = join.union(r);
            }
            meets.push(meet);
            joins.push(join);
        }
        // weight(S) = Π counts / n^|S|; rescale every set to the denominator n^K.
        let k = family.max_set_size();
        let n = BigUint::from(sample.n());
        let big: Vec<BigUint> = family
            .sets
            .iter()
            .map(|s| {
                let prod: BigUint = s
                    .member_ids
                    .iter()
                    .map(|&i| BigUint::from(sample.counts()[i]))
                    .product();
                prod * num_traits::pow(n.clone(), k - s.member_ids.len())
            })
            .collect();
        let total: BigUint = big.iter().sum();
        let weights = match total.to_u128() {
            Some(t) => ScaledWeights::Small {
                each: big.iter().map(|w| w.to_u128().unwrap()).collect(),
                total: t,
            },
            None => ScaledWeights::Big { each: big, total },
        };
        Ok(FamilyIndex {
            meets,
            joins,
            weights,
            sample_hash: family.sample_hash.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.meets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.meets.is_empty()
    }

    pub fn meet(&self, set: usize) -> &Relation {
        &self.meets[set]
    }

    pub fn join(&self, set: usize) -> &Relation {
        &self.joins[set]
    }

    /// Whether `p ∈ γ(S)` for the `set`-th family member.
    pub fn covers(&self, set: usize, p: &Poset) -> bool {
        self.meets[set].is_subset(p.relation()) && p.relation().is_subset(&self.joins[set])
    }

    /// Family set ids whose closure contains `p`.
    pub fn containing_sets(&self, p: &Poset) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.covers(s, p)).collect()
    }

    /// Depth of `p`; zero when the family is empty.
    pub fn depth(&self, p: &Poset) -> BigRational {
        self.depth_of_sets(&self.containing_sets(p))
    }

    /// `Σ_{S ∈ sets} weight(S) / Σ_S weight(S)`.
    pub fn depth_of_sets(&self, sets: &[usize]) -> BigRational {
        match &self.weights {
            ScaledWeights::Small { each, total } => {
                if *total == 0 {
                    return BigRational::zero();
                }
                let hit: u128 = sets.iter().map(|&s| each[s]).sum();
                BigRational::new(BigInt::from(hit), BigInt::from(*total))
            }
            ScaledWeights::Big { each, total } => {
                let hit: BigUint = sets.iter().map(|&s| &each[s]).sum();
                BigRational::new(BigInt::from(hit), BigInt::from(total.clone()))
            }
        }
    }

    /// Scaled weight of one set as a float share of the total; used only for heuristics.
    pub fn weight_share(&self, set: usize) -> f64 {
        match &self.weights {
            ScaledWeights::Small { each, total } => each[set] as f64 / *total as f64,
            ScaledWeights::Big { each, total } => {
                BigRational::new(BigInt::from(each[set].clone()), BigInt::from(total.clone()))
                    .to_f64()
                    .unwrap_or(0.0)
            }
        }
    }

    pub fn sample_hash(&self) -> &str {
        &self.sample_hash
    }

    pub(crate) fn weights_view(&self) -> WeightsView<'_> {
        match &self.weights {
            ScaledWeights::Small { each, total } => WeightsView::Small(each, *total),
            ScaledWeights::Big { each, total } => WeightsView::Big(each, total),
        }
    }
}

/// Integer set weights over a common denominator, and their total.
pub(crate) enum WeightsView<'a> {
    Small(&'a [u128], u128),
    Big(&'a [BigUint], &'a BigUint),
}

/// `D_n(p)` for one poset.
pub fn empirical_depth(
    p: &Poset,
    sample: &PosetSample,
    family: &UfgFamily,
) -> Result<BigRational, PosetError> {
    if p.size() != sample.m() {
        return Err(PosetError::UniverseMismatch);
    }
    Ok(FamilyIndex::new(sample, family)?.depth(p))
}

/// Depth values over a scope, ranked by depth descending then canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthMap {
    pub entries: Vec<(Poset, BigRational)>,
    pub scope: &'static str,
    pub sample_hash: String,
    /// Set when the family is empty and every depth is zero by convention.
    pub trivial: bool,
}

impl DepthMap {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, p: &Poset) -> Option<&BigRational> {
        self.entries.iter().find(|(q, _)| q == p).map(|(_, d)| d)
    }

    pub fn max(&self) -> Option<&(Poset, BigRational)> {
        self.entries.first()
    }

    /// The canonically first poset of minimal depth.
    pub fn min(&self) -> Option<&(Poset, BigRational)> {
        let low = &self.entries.last()?.1;
        self.entries.iter().find(|(_, d)| d == low)
    }

    /// Posets in canonical order, the ids used in exports.
    pub fn canonical_posets(&self) -> Vec<Poset> {
        let mut v: Vec<Poset> = self.entries.iter().map(|(p, _)| *p).collect();
        v.sort_unstable();
        v
    }

    pub fn to_csv(&self, universe: &ItemUniverse, places: usize) -> String {
        let ids = self.canonical_posets();
        let mut out = String::from("poset_id,tr_edges,depth_rational,depth_decimal\n");
        for (p, d) in &self.entries {
            let id = ids.binary_search(p).unwrap();
            let _ = writeln!(
                out,
                "{id},{},{},{}",
                hasse_string(universe, p),
                rational_text(d),
                decimal_string(d, places)
            );
        }
        out
    }

    pub fn to_json(&self, universe: &ItemUniverse, places: usize) -> serde_json::Value {
        #[derive(Serialize)]
        struct Entry {
            poset_id: usize,
            tr_edges: String,
            depth_rational: String,
            depth_decimal: String,
        }
        let ids = self.canonical_posets();
        let entries: Vec<Entry> = self
            .entries
            .iter()
            .map(|(p, d)| Entry {
                poset_id: ids.binary_search(p).unwrap(),
                tr_edges: hasse_string(universe, p),
                depth_rational: rational_text(d),
                depth_decimal: decimal_string(d, places),
            })
            .collect();
        serde_json::json!({
            "scope": self.scope,
            "sample_hash": self.sample_hash,
            "trivial": self.trivial,
            "entries": entries,
        })
    }
}

fn rational_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Rounds a nonnegative rational half-up to `places` decimals.
pub fn decimal_string(r: &BigRational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), places);
    let num: BigInt = r.numer() * &scale * 2 + r.denom();
    let q = num.div_floor(&(r.denom() * 2));
    let (int, frac) = q.div_mod_floor(&scale);
    if places == 0 {
        return int.to_string();
    }
    format!("{int}.{:0>width$}", frac.to_string(), width = places)
}

/// Evaluates the depth over `scope`, in parallel over query posets.
pub fn depth_map(
    sample: &PosetSample,
    family: &UfgFamily,
    scope: DepthScope,
) -> Result<DepthMap, PosetError> {
    let index = FamilyIndex::new(sample, family)?;
    let name = scope.name();
    let posets: Vec<Poset> = match scope {
        DepthScope::AllPosets { limit } => enumerate_posets(sample.m(), limit)?,
        DepthScope::Observed => sample.unique().to_vec(),
        DepthScope::Explicit(mut v) => {
            if v.iter().any(|p| p.size() != sample.m()) {
                return Err(PosetError::UniverseMismatch);
            }
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    let mut entries: Vec<(Poset, BigRational)> = posets
        .into_par_iter()
        .map(|p| (p, index.depth(&p)))
        .collect();
    entries.sort_by(|(p, a), (q, b)| b.cmp(a).then_with(|| p.cmp(q)));
    Ok(DepthMap {
        entries,
        scope: name,
        sample_hash: index.sample_hash.clone(),
        trivial: index.is_empty(),
    })
}
