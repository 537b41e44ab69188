use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use sha2::{Digest, Sha256};

use crate::poset::io::{parse_records, write_poset};
use crate::poset::{ItemUniverse, Poset, PosetError, Relation};

/// A multiset of observed posets over one universe.
///
/// Distinct posets are kept in canonical order together with their
/// multiplicities; `ν_n(p) = count(p) / n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetSample {
    universe: Arc<ItemUniverse>,
    unique: Vec<Poset>,
    counts: Vec<u64>,
    n: u64,
}

impl PosetSample {
    /// Builds a sample from raw observations (duplicates allowed, order irrelevant).
    pub fn from_observations<I>(universe: ItemUniverse, observations: I) -> Result<Self, PosetError>
    where
        I: IntoIterator<Item = Poset>,
    {
        Self::from_counts(universe, observations.into_iter().map(|p| (p, 1)))
    }

    /// Builds a sample from `(poset, multiplicity)` pairs; repeated posets are merged.
    pub fn from_counts<I>(universe: ItemUniverse, pairs: I) -> Result<Self, PosetError>
    where
        I: IntoIterator<Item = (Poset, u64)>,
    {
        let m = universe.len();
        let mut merged: BTreeMap<Poset, u64> = BTreeMap::new();
        for (p, c) in pairs {
            if p.size() != m {
                return Err(PosetError::UniverseMismatch);
            }
            if c == 0 {
                continue;
            }
            *merged.entry(p).or_insert(0) += c;
        }
        if merged.is_empty() {
            return Err(PosetError::EmptyInput);
        }
        let n = merged.values().sum();
        let (unique, counts) = merged.into_iter().unzip();
        Ok(PosetSample {
            universe: Arc::new(universe),
            unique,
            counts,
            n,
        })
    }

    /// Parses the multi-record text format; every record must share one universe.
    pub fn parse(text: &str) -> Result<Self, PosetError> {
        let records = parse_records(text)?;
        let Some(first) = records.first() else {
            return Err(PosetError::EmptyInput);
        };
        let universe = first.universe.clone();
        if records.iter().any(|r| r.universe != universe) {
            return Err(PosetError::UniverseMismatch);
        }
        Self::from_counts(universe, records.into_iter().map(|r| (r.poset, r.count)))
    }

    /// Canonical text form: one record per distinct poset with its count.
    pub fn to_text(&self) -> String {
        self.unique
            .iter()
            .zip(&self.counts)
            .map(|(p, &c)| write_poset(&self.universe, p, Some(c)))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// SHA-256 of the canonical text form, hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn universe(&self) -> &ItemUniverse {
        &self.universe
    }

    pub fn shared_universe(&self) -> Arc<ItemUniverse> {
        Arc::clone(&self.universe)
    }

    pub fn m(&self) -> usize {
        self.universe.len()
    }

    pub fn unique(&self) -> &[Poset] {
        &self.unique
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn index_of(&self, p: &Poset) -> Option<usize> {
        self.unique.binary_search(p).ok()
    }

    pub fn count_of(&self, p: &Poset) -> u64 {
        self.index_of(p).map_or(0, |i| self.counts[i])
    }

    /// `ν_n({p})` of the `i`-th distinct poset.
    pub fn probability(&self, i: usize) -> BigRational {
        BigRational::new(BigInt::from(self.counts[i]), BigInt::from(self.n))
    }

    /// Every observation in canonical order, duplicates repeated.
    pub fn observations(&self) -> impl Iterator<Item = &Poset> {
        self.unique
            .iter()
            .zip(&self.counts)
            .flat_map(|(p, &c)| std::iter::repeat_n(p, c as usize))
    }

    /// Pairs contained in every observed poset.
    pub fn universal_pairs(&self) -> Relation {
        self.unique.iter().fold(Relation::full(self.m()), |acc, p| {
            acc.intersection(p.relation())
        })
    }

    /// Pairs contained in at least one observed poset.
    pub fn observed_pairs(&self) -> Relation {
        self.unique
            .iter()
            .fold(Relation::empty(self.m()), |acc, p| acc.union(p.relation()))
    }

    /// The same sample with every multiplicity multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> PosetSample {
        PosetSample {
            universe: Arc::clone(&self.universe),
            unique: self.unique.clone(),
            counts: self.counts.iter().map(|c| c * factor).collect(),
            n: self.n * factor,
        }
    }
}
