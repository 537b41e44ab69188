use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::FamilyIndex;
use crate::poset::{ItemUniverse, Poset, PosetError};
use crate::ufg::{enumerate_ufg_family, PosetSample};

/// A probability mass function with finite support on posets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretePmf {
    support: Vec<Poset>,
    mass: Vec<BigRational>,
}

impl DiscretePmf {
    /// Masses must be nonnegative and sum to one; repeated posets are merged.
    pub fn new<I: IntoIterator<Item = (Poset, BigRational)>>(pairs: I) -> Result<Self, PosetError> {
        let mut pairs: Vec<(Poset, BigRational)> = pairs.into_iter().collect();
        let Some(m) = pairs.first().map(|(p, _)| p.size()) else {
            return Err(PosetError::EmptyInput);
        };
        if pairs.iter().any(|(p, _)| p.size() != m) {
            return Err(PosetError::UniverseMismatch);
        }
        if pairs.iter().any(|(_, w)| w.is_negative()) {
            return Err(PosetError::BadShape("negative probability mass".into()));
        }
        pairs.sort_by_key(|a| a.0);
        let mut support: Vec<Poset> = Vec::new();
        let mut mass: Vec<BigRational> = Vec::new();
        for (p, w) in pairs {
            if support.last() == Some(&p) {
                *mass.last_mut().unwrap() += w;
            } else {
                support.push(p);
                mass.push(w);
            }
        }
        let total: BigRational = mass.iter().sum();
        if !total.is_one() {
            return Err(PosetError::BadShape(format!(
                "probability masses sum to {total}"
            )));
        }
        Ok(DiscretePmf { support, mass })
    }

    /// The empirical measure of a sample.
    pub fn from_sample(sample: &PosetSample) -> Self {
        DiscretePmf {
            support: sample.unique().to_vec(),
            mass: (0..sample.unique().len())
                .map(|i| sample.probability(i))
                .collect(),
        }
    }

    pub fn support(&self) -> &[Poset] {
        &self.support
    }

    pub fn mass(&self) -> &[BigRational] {
        &self.mass
    }

    pub fn m(&self) -> usize {
        self.support[0].size()
    }

    /// An integer-count sample with exactly these proportions.
    ///
    /// Depth only depends on the proportions, so this reuses the sample
    /// machinery for population depth.
    pub fn to_sample(&self) -> Result<PosetSample, PosetError> {
        let lcm = self
            .mass
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let counts = self
            .mass
            .iter()
            .map(|w| {
                (w * BigRational::from_integer(lcm.clone()))
                    .to_integer()
                    .to_u64()
            })
            .collect::<Option<Vec<u64>>>()
            .ok_or_else(|| PosetError::BadShape("probability denominators too large".into()))?;
        PosetSample::from_counts(
            ItemUniverse::numbered(self.m()),
            self.support.iter().copied().zip(counts),
        )
    }
}

/// `D(p)` under `pmf`; the family restricted to the support suffices.
pub fn population_depth(
    p: &Poset,
    pmf: &DiscretePmf,
    limit: usize,
) -> Result<BigRational, PosetError> {
    let m = pmf.m();
    if m > limit {
        return Err(PosetError::UniverseTooLarge { m, limit });
    }
    if p.size() != m {
        return Err(PosetError::UniverseMismatch);
    }
    let sample = pmf.to_sample()?;
    let family = enumerate_ufg_family(&sample);
    if family.total_weight.is_zero() {
        return Ok(BigRational::zero());
    }
    Ok(FamilyIndex::new(&sample, &family)?.depth(p))
}
