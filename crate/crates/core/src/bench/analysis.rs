use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;

use super::BenchError;
use crate::depth::DepthMap;
use crate::poset::{ItemUniverse, Poset};
use crate::ufg::PosetSample;

/// `w_(a,b)`: how many observations contain `(a, b)`, diagonal included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumStatistics {
    pub matrix: Vec<Vec<u64>>,
    pub n: u64,
}

impl SumStatistics {
    /// Heatmap-ready matrix: header row of labels, one row per `from` item.
    pub fn to_csv(&self, universe: &ItemUniverse) -> String {
        let mut out = String::from("from");
        for l in universe.labels() {
            let _ = write!(out, ",{l}");
        }
        out.push('\n');
        for (a, row) in self.matrix.iter().enumerate() {
            out.push_str(universe.label(a));
            for c in row {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn sum_statistics(sample: &PosetSample) -> SumStatistics {
    let m = sample.m();
    let mut matrix = vec![vec![0u64; m]; m];
    for (p, &c) in sample.unique().iter().zip(sample.counts()) {
        for (a, b) in p.relation().pairs() {
            matrix[a][b] += c;
        }
    }
    SumStatistics {
        matrix,
        n: sample.n(),
    }
}

/// Observations in which `a` and `b` are incomparable; zero on the diagonal.
pub fn tie_counts(sample: &PosetSample) -> Vec<Vec<u64>> {
    let m = sample.m();
    let mut ties = vec![vec![0u64; m]; m];
    for (p, &c) in sample.unique().iter().zip(sample.counts()) {
        for a in 0..m {
            for b in (0..m).filter(|&b| b != a) {
                if !p.contains(a, b) && !p.contains(b, a) {
                    ties[a][b] += c;
                }
            }
        }
    }
    ties
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PersistenceMode {
    /// Observed posets, each repeated by its multiplicity.
    Observed,
    AllPosets,
}

impl PersistenceMode {
    pub fn name(self) -> &'static str {
        match self {
            PersistenceMode::Observed => "observed",
            PersistenceMode::AllPosets => "all-posets",
        }
    }
}

/// The ranking that persistence is measured on, deepest first.
pub fn ranked_posets(
    map: &DepthMap,
    mode: PersistenceMode,
    sample: &PosetSample,
) -> Result<Vec<(Poset, BigRational)>, BenchError> {
    match mode {
        PersistenceMode::AllPosets => Ok(map.entries.clone()),
        PersistenceMode::Observed => {
            let mut out = Vec::with_capacity(sample.n() as usize);
            for (p, d) in &map.entries {
                let c = sample.count_of(p);
                out.extend(std::iter::repeat_n((*p, d.clone()), c as usize));
            }
            if out.len() as u64 != sample.n() {
                return Err(BenchError::ScopeMismatch);
            }
            Ok(out)
        }
    }
}

/// Persistence of one ordered pair in a depth ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistenceRow {
    pub from: usize,
    pub to: usize,
    /// Largest `k` such that the `k` deepest posets all contain the pair.
    pub k_edge: usize,
    /// Largest `k` such that the `k` deepest posets all lack the pair.
    pub k_nonedge: usize,
    /// Reordering depth ties would change `k_edge`.
    pub edge_ambiguous: bool,
    pub nonedge_ambiguous: bool,
}

/// Prefix length where `has` first fails, and whether ties make it order dependent.
fn prefix(ranked: &[(Poset, BigRational)], has: impl Fn(&Poset) -> bool) -> (usize, bool) {
    let Some(k) = ranked.iter().position(|(p, _)| !has(p)) else {
        return (ranked.len(), false);
    };
    let d = &ranked[k].1;
    let start = ranked[..k]
        .iter()
        .rposition(|(_, e)| e != d)
        .map_or(0, |i| i + 1);
    let end = ranked[k..]
        .iter()
        .position(|(_, e)| e != d)
        .map_or(ranked.len(), |i| k + i);
    let ambiguous = start < k || ranked[k..end].iter().any(|(p, _)| has(p));
    (k, ambiguous)
}

/// Per off-diagonal pair, how far down the ranking it persists.
///
/// With `strict`, a tie group straddling a reported boundary is an error
/// instead of a flag.
pub fn edge_persistence(
    ranked: &[(Poset, BigRational)],
    universe: &ItemUniverse,
    strict: bool,
) -> Result<Vec<PersistenceRow>, BenchError> {
    let m = universe.len();
    let mut rows = Vec::new();
    for a in 0..m {
        for b in (0..m).filter(|&b| b != a) {
            let (k_edge, edge_ambiguous) = prefix(ranked, |p| p.contains(a, b));
            let (k_nonedge, nonedge_ambiguous) = prefix(ranked, |p| !p.contains(a, b));
            if strict && (edge_ambiguous || nonedge_ambiguous) {
                return Err(BenchError::AmbiguousRanking {
                    from: universe.label(a).to_string(),
                    to: universe.label(b).to_string(),
                });
            }
            rows.push(PersistenceRow {
                from: a,
                to: b,
                k_edge,
                k_nonedge,
                edge_ambiguous,
                nonedge_ambiguous,
            });
        }
    }
    Ok(rows)
}

/// Share of `all` at least as deep as the `⌈α·n⌉`-th largest observed depth.
/// `α = 0` selects nothing.
pub fn dispersion(all: &DepthMap, observed: &[BigRational], alpha: f64) -> BigRational {
    assert!((0.0..=1.0).contains(&alpha), "alpha must lie in [0, 1]");
    let n = observed.len();
    // Guard against 0.1 * 30 = 3.0000000000000004 style rounding.
    let rank = ((alpha * n as f64) - 1e-9).ceil().max(0.0) as usize;
    if rank == 0 || all.is_empty() {
        return BigRational::zero();
    }
    let mut sorted: Vec<&BigRational> = observed.iter().collect();
    sorted.sort_by(|a, b| b.cmp(a));
    let threshold = sorted[rank.min(n) - 1];
    let hits = all.entries.iter().filter(|(_, d)| d >= threshold).count();
    BigRational::new(hits.into(), all.len().into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankShift {
    pub max_shift: usize,
    /// Lower middle of the sorted shifts.
    pub median_shift: usize,
    /// `(poset, rank in a, rank in b)`, 1-based ascending ranks, canonical poset order.
    pub per_poset: Vec<(Poset, usize, usize)>,
    /// Some rank was decided by canonical order between equal depths.
    pub ties: bool,
}

fn ascending_ranks(map: &DepthMap) -> (Vec<(Poset, usize)>, bool) {
    let mut entries: Vec<&(Poset, BigRational)> = map.entries.iter().collect();
    entries.sort_by(|(p, a), (q, b)| a.cmp(b).then_with(|| p.cmp(q)));
    let ties = entries.windows(2).any(|w| w[0].1 == w[1].1);
    let mut ranks: Vec<(Poset, usize)> = entries
        .iter()
        .enumerate()
        .map(|(i, (p, _))| (*p, i + 1))
        .collect();
    ranks.sort_unstable();
    (ranks, ties)
}

pub fn rank_shift(a: &DepthMap, b: &DepthMap) -> Result<RankShift, BenchError> {
    let (ra, ta) = ascending_ranks(a);
    let (rb, tb) = ascending_ranks(b);
    if ra.len() != rb.len() || ra.iter().zip(&rb).any(|(x, y)| x.0 != y.0) {
        return Err(BenchError::ScopeMismatch);
    }
    let per_poset: Vec<(Poset, usize, usize)> =
        ra.iter().zip(&rb).map(|(x, y)| (x.0, x.1, y.1)).collect();
    let mut shifts: Vec<usize> = per_poset.iter().map(|(_, x, y)| x.abs_diff(*y)).collect();
    shifts.sort_unstable();
    let max_shift = shifts.last().copied().unwrap_or(0);
    let median_shift = if shifts.is_empty() {
        0
    } else {
        shifts[(shifts.len() - 1) / 2]
    };
    Ok(RankShift {
        max_shift,
        median_shift,
        per_poset,
        ties: ta || tb,
    })
}
