//! Monte-Carlo check that `D_n` approaches `D` uniformly as `n` grows.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{depth_map, DepthMap, DepthScope, DiscretePmf};
use crate::poset::{ItemUniverse, Poset, PosetError};
use crate::ufg::{enumerate_ufg_family, PosetSample};

/// Median sup-gap for one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub n: usize,
    pub gaps: Vec<f64>,
    pub median: f64,
}

/// A fixed distribution on 3-item posets whose own family is nonempty.
pub fn reference_pmf() -> DiscretePmf {
    let r = |n: i64| BigRational::new(n.into(), 20.into());
    DiscretePmf::new([
        (Poset::from_edges(3, [(0, 1)]), r(6)),
        (Poset::from_edges(3, [(0, 1), (0, 2)]), r(5)),
        (Poset::from_edges(3, [(0, 2), (1, 2)]), r(4)),
        (Poset::from_edges(3, [(2, 0)]), r(3)),
        (Poset::trivial(3), r(2)),
    ])
    .expect("masses sum to one")
}

fn all_posets_depth(sample: &PosetSample) -> Result<DepthMap, PosetError> {
    let family = enumerate_ufg_family(sample);
    depth_map(sample, &family, DepthScope::AllPosets { limit: sample.m() })
}

/// `sup_p |D_n(p) − D(p)|` for one seeded draw of size `n`.
pub fn sup_gap(
    pmf: &DiscretePmf,
    truth: &DepthMap,
    n: usize,
    seed: u64,
) -> Result<f64, PosetError> {
    let weights: Vec<f64> = pmf
        .mass()
        .iter()
        .map(|w| w.to_f64().unwrap_or(0.0))
        .collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| PosetError::BadShape(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = (0..n).map(|_| pmf.support()[dist.sample(&mut rng)]);
    let sample = PosetSample::from_observations(ItemUniverse::numbered(pmf.m()), draws)?;
    let estimate = all_posets_depth(&sample)?;
    let gap = truth
        .entries
        .iter()
        .map(|(p, d)| (estimate.get(p).expect("same scope") - d).abs())
        .max()
        .unwrap_or_default();
    Ok(gap.to_f64().unwrap_or(f64::NAN))
}

/// Median sup-gap over `seeds` draws for each sample size.
pub fn gap_table(
    pmf: &DiscretePmf,
    sizes: &[usize],
    seeds: u64,
    base_seed: u64,
) -> Result<Vec<GapRow>, PosetError> {
    let truth = all_posets_depth(&pmf.to_sample()?)?;
    sizes
        .iter()
        .map(|&n| {
            let gaps = (0..seeds)
                .map(|s| sup_gap(pmf, &truth, n, base_seed.wrapping_add(s)))
                .collect::<Result<Vec<f64>, _>>()?;
            let mut sorted = gaps.clone();
            sorted.sort_by(f64::total_cmp);
            let mid = sorted.len() / 2;
            let median = if sorted.len() % 2 == 0 {
                (sorted[mid - 1] + sorted[mid]) / 2.0
            } else {
                sorted[mid]
            };
            Ok(GapRow { n, gaps, median })
        })
        .collect()
}
